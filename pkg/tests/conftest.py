import numpy as np
import pytest

from lsystool import core


@pytest.fixture(scope="session")
def grammar():
    return core.default_grammar()


def random_words(grammar, n, seed, max_steps=4):
    """Derived (non-canonicalized) words for property tests."""
    rng = np.random.default_rng(seed)
    words = []
    for _ in range(n):
        steps = int(rng.integers(1, max_steps + 1))
        words.append(core.derive(grammar, steps,
                                 int(rng.integers(0, 2**62))))
    return words


def enumerate_fused_words(max_tokens):
    """Every syntactically valid fused-scheme word of <= max_tokens body
    tokens (balanced brackets, nonempty)."""
    toks = ["F", "+F", "-F", "[", "]"]
    out = []

    def rec(parts, depth, used):
        if parts and depth == 0:
            out.append("".join(parts))
        if used == max_tokens:
            return
        for t in toks:
            if t == "]":
                if depth == 0:
                    continue
                rec(parts + [t], depth - 1, used + 1)
            elif t == "[":
                rec(parts + [t], depth + 1, used + 1)
            else:
                rec(parts + [t], depth, used + 1)

    rec([], 0, 0)
    return out
