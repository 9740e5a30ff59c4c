"""Toy image captioner: translates tree-topology rasters into bracketed
turtle words, exchanging data with lsystool via files only."""

__version__ = "0.1.0"
