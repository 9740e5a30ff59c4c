"""Words, grammars, probabilistic derivation, and tokenization.

A word is a string over the turtle alphabet {F, +, -, [, ]} with balanced
brackets.  Two tokenizations exist:

* ``char``  — one token per character.
* ``fused`` — every rotation binds the F that follows it, giving the
  surface tokens ``+F`` / ``-F``; a rotation with no following F is an
  error in this scheme.

Token ids are fixed and shared with external prediction files:

    id 0: <bos>    id 1: <eos>
    id 2: F        id 3: + (char) / +F (fused)
    id 4: - (char) / -F (fused)
    id 5: [        id 6: ]
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (DanglingRotation, IllegalCharacter, LsysError,
                     UnbalancedBrackets)

CHAR_SCHEME = "char"
FUSED_SCHEME = "fused"
SCHEMES = (CHAR_SCHEME, FUSED_SCHEME)

BOS_ID = 0
EOS_ID = 1

# Surface form of every token id, per scheme.
TOKEN_TABLE = {
    CHAR_SCHEME: ("<bos>", "<eos>", "F", "+", "-", "[", "]"),
    FUSED_SCHEME: ("<bos>", "<eos>", "F", "+F", "-F", "[", "]"),
}
VOCAB_SIZE = 7

_ALPHABET = set("F+-[]")


def _clean(text):
    """Strip whitespace, keeping each surviving char's original index."""
    kept = []
    for i, ch in enumerate(text):
        if not ch.isspace():
            kept.append((i, ch))
    return kept


def _validate_body(text, original_positions=None):
    """Check alphabet membership and bracket balance of a char string."""
    pos = original_positions or range(len(text))
    stack = []
    for i, ch in zip(pos, text):
        if ch not in _ALPHABET:
            raise IllegalCharacter(f"illegal character {ch!r}", i)
        if ch == "[":
            stack.append(i)
        elif ch == "]":
            if not stack:
                raise UnbalancedBrackets("unmatched ']'", i)
            stack.pop()
    if stack:
        raise UnbalancedBrackets("unmatched '['", stack[0])


def _validate_fusable(text, original_positions=None):
    pos = original_positions or range(len(text))
    for k, (i, ch) in enumerate(zip(pos, text)):
        if ch in "+-" and (k + 1 >= len(text) or text[k + 1] != "F"):
            raise DanglingRotation(f"{ch!r} not followed by 'F'", i)


@dataclass(frozen=True)
class Word:
    """A validated word.  ``text`` is the raw char string (no whitespace)."""

    text: str
    scheme: str = FUSED_SCHEME

    @property
    def tokens(self):
        """Surface token strings under this word's scheme."""
        if self.scheme == CHAR_SCHEME:
            return tuple(self.text)
        out = []
        i = 0
        while i < len(self.text):
            ch = self.text[i]
            if ch in "+-":
                out.append(ch + "F")
                i += 2
            else:
                out.append(ch)
                i += 1
        return tuple(out)

    def __len__(self):
        return len(self.tokens)

    def __str__(self):
        return self.text


def parse(text, scheme=FUSED_SCHEME):
    """Parse a word string, validating alphabet, balance, and fusability."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    kept = _clean(text)
    body = "".join(ch for _, ch in kept)
    positions = [i for i, _ in kept]
    if not body:
        raise LsysError("empty word")
    _validate_body(body, positions)
    if scheme == FUSED_SCHEME:
        _validate_fusable(body, positions)
    return Word(body, scheme)


def to_string(word):
    return word.text


def tokenize(word, scheme=None):
    """Body token ids (no BOS/EOS) of ``word`` under ``scheme``."""
    scheme = scheme or word.scheme
    w = word if scheme == word.scheme else parse(word.text, scheme)
    table = TOKEN_TABLE[scheme]
    index = {tok: i for i, tok in enumerate(table)}
    return [index[t] for t in w.tokens]


def detokenize(ids, scheme=FUSED_SCHEME):
    """Inverse of :func:`tokenize`; rejects BOS/EOS inside the body."""
    table = TOKEN_TABLE[scheme]
    parts = []
    for i in ids:
        if i in (BOS_ID, EOS_ID) or not 0 <= i < VOCAB_SIZE:
            raise LsysError(f"token id {i} not allowed in a word body")
        parts.append(table[i])
    return parse("".join(parts), scheme)


def ids_to_text(ids, scheme=FUSED_SCHEME):
    """Best-effort surface string for possibly-malformed id sequences.

    BOS/EOS and out-of-range ids are dropped; no validation is done.
    Used for the error-rate statistics, which must accept broken output.
    """
    table = TOKEN_TABLE[scheme]
    return "".join(table[i] for i in ids if 2 <= i < VOCAB_SIZE)


# ---------------------------------------------------------------------------
# grammars


@dataclass(frozen=True)
class Production:
    predecessor: str
    successor: str
    probability: float

    def __post_init__(self):
        if len(self.predecessor) != 1 or self.predecessor not in _ALPHABET:
            raise LsysError(f"bad predecessor {self.predecessor!r}")
        _validate_body(self.successor)
        if not 0.0 < self.probability <= 1.0:
            raise LsysError("production probability must be in (0, 1]")


@dataclass(frozen=True)
class Grammar:
    """Probabilistic bracketed grammar plus its display constants."""

    axiom: str
    productions: tuple
    angle_deg: float = 25.0
    step_len: float = 100.0

    def __post_init__(self):
        object.__setattr__(self, "productions", tuple(self.productions))
        if not self.axiom:
            raise LsysError("axiom must be nonempty")
        _validate_body(self.axiom)
        if not self.step_len > 0:
            raise LsysError("segment length must be positive")
        for sym, prods in self.by_predecessor().items():
            total = sum(p.probability for p in prods)
            if abs(total - 1.0) > 1e-9:
                raise LsysError(
                    f"probabilities for {sym!r} sum to {total}, expected 1")

    def by_predecessor(self):
        groups = {}
        for p in self.productions:
            groups.setdefault(p.predecessor, []).append(p)
        return groups


def default_grammar(angle_deg=25.0, step_len=100.0):
    """Branching stand-in grammar used when no grammar file is given."""
    prods = (
        Production("F", "F[+F]F", 0.25),
        Production("F", "F[-F]F", 0.25),
        Production("F", "F[+F][-F]F", 0.20),
        Production("F", "FF", 0.15),
        Production("F", "F", 0.15),
    )
    return Grammar("F", prods, angle_deg, step_len)


def derive(grammar, steps, rng_seed):
    """Run ``steps`` parallel rewriting passes over the axiom.

    One uniform draw is consumed per rewritable symbol occurrence, in
    left-to-right index order within each pass, from a PCG64 stream seeded
    with ``rng_seed``; production choice is by cumulative-sum inversion.
    Deterministic for fixed (grammar, steps, rng_seed).
    """
    if steps < 1:
        raise LsysError("steps must be >= 1")
    rng = np.random.default_rng(rng_seed)
    groups = grammar.by_predecessor()
    cum = {
        sym: (list(itertools.accumulate(p.probability for p in prods)), prods)
        for sym, prods in groups.items()
    }
    word = grammar.axiom
    for _ in range(steps):
        out = []
        for ch in word:
            entry = cum.get(ch)
            if entry is None:
                out.append(ch)
                continue
            bounds, prods = entry
            u = rng.random()
            k = 0
            while k < len(bounds) - 1 and u >= bounds[k]:
                k += 1
            out.append(prods[k].successor)
        word = "".join(out)
    return parse(word, CHAR_SCHEME)
