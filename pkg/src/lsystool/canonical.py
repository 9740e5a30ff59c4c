"""Canonical form and validity rules for words.

Five conditions give a one-to-one word/image relation:

  1. no two segments may lie exactly on top of each other,
  2. opposite rotations may not be adjacent (+- or -+),
  3. no empty branch [],
  4. sibling branches are sorted right-to-left,
  5. a branch may not end with a sub-branch.

Rules 4 and 5 are repairs (``rewrite_canonical``); rules 1-3 are filters
(``check`` reports, callers reject).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CHAR_SCHEME, Word, parse
from .render import interpret

# Validation angle for rule 1: a generic angle (not a rational fraction of
# 90 in low terms) so only coincidences that hold at *every* angle fire,
# not accidental alignments at special angles like 45.
GENERIC_ANGLE = 25.714285

# Branch ordering: rightmost branch first.  + rotates right, so +F leads.
_RANK = {"+": 0, "F": 1, "-": 2, "[": 3, "]": 4}


@dataclass(frozen=True)
class RuleViolation:
    rule: int
    location: object
    description: str

    def as_dict(self):
        loc = self.location
        if isinstance(loc, tuple):
            loc = list(loc)
        return {"rule": self.rule, "location": loc,
                "description": self.description}


# ---------------------------------------------------------------------------
# tree form

class _Branch:
    __slots__ = ("children", "start")

    def __init__(self, children, start=-1):
        self.children = children
        self.start = start


def _to_tree(text):
    """Parse a balanced char string into nested _Branch/char nodes."""
    root = _Branch([], -1)
    stack = [root]
    for i, ch in enumerate(text):
        if ch == "[":
            node = _Branch([], i)
            stack[-1].children.append(node)
            stack.append(node)
        elif ch == "]":
            stack.pop()
        else:
            stack[-1].children.append(ch)
    return root


def _serialize(node, out):
    for c in node.children:
        if isinstance(c, _Branch):
            out.append("[")
            _serialize(c, out)
            out.append("]")
        else:
            out.append(c)


def _branch_text(node):
    out = []
    _serialize(node, out)
    return "".join(out)


def _sort_key(node):
    return tuple(_RANK[ch] for ch in _branch_text(node))


def _first_char(node):
    cur = node
    while isinstance(cur, _Branch):
        if not cur.children:
            return ""
        cur = cur.children[0]
    return cur


def _last_char(item):
    if isinstance(item, _Branch):
        return "]"
    return item


def _clashes(prev, first):
    return prev in "+-" and first in "+-" and prev != first


def _canonicalize(node):
    for c in node.children:
        if isinstance(c, _Branch):
            _canonicalize(c)
    changed = True
    while changed:
        changed = False
        # rule 4 first: sort each maximal run of adjacent sibling branches,
        # so unwrapping peels the branch that canonically sits last
        i = 0
        kids = node.children
        while i < len(kids):
            if isinstance(kids[i], _Branch):
                j = i
                while j < len(kids) and isinstance(kids[j], _Branch):
                    j += 1
                if j - i > 1:
                    run = sorted(kids[i:j], key=_sort_key)
                    if [id(n) for n in run] != [id(n) for n in kids[i:j]]:
                        kids[i:j] = run
                        changed = True
                i = j
            else:
                i += 1
        # rule 5: unwrap one trailing branch, unless splicing would butt two
        # opposite rotations together (possible only in char-scheme oddities;
        # rewriting must not introduce a rule-2 violation)
        if kids and isinstance(kids[-1], _Branch):
            group = kids[-1]
            prev = _last_char(kids[-2]) if len(kids) > 1 else ""
            if not _clashes(prev, _first_char(group)):
                kids[-1:] = group.children
                changed = True


def rewrite_canonical(word):
    """Apply rules 4 and 5 to fixpoint; rules 1-3 are left to ``check``."""
    tree = _to_tree(word.text)
    _canonicalize(tree)
    text = _branch_text(tree)
    if not text:
        return word  # nothing left to say; caller's check will reject anyway
    return parse(text, word.scheme)


# ---------------------------------------------------------------------------
# checking

def coincident_segment_pairs(segments, tol):
    """Index pairs of segments whose endpoint sets coincide within ``tol``.

    Endpoints are direction-normalized, then quantized onto two grids of
    pitch ``tol`` offset by half a cell; a pair that truly coincides
    (difference orders of magnitude below tol) matches on at least one grid.
    """
    segments = np.asarray(segments, dtype=np.float64).reshape(-1, 4)
    n = segments.shape[0]
    if n < 2:
        return []
    a = segments[:, :2]
    b = segments[:, 2:]
    swap = (a[:, 0] > b[:, 0]) | ((a[:, 0] == b[:, 0]) & (a[:, 1] > b[:, 1]))
    norm = segments.copy()
    norm[swap, :2] = b[swap]
    norm[swap, 2:] = a[swap]
    pairs = set()
    for shift in (0.0, 0.5):
        q = np.floor(norm / tol + shift).astype(np.int64)
        order = np.lexsort(q.T[::-1])
        qs = q[order]
        same = np.all(qs[1:] == qs[:-1], axis=1)
        # group consecutive equal rows; emit all pairs inside each group
        k = 0
        while k < len(same):
            if same[k]:
                j = k
                while j < len(same) and same[j]:
                    j += 1
                group = sorted(int(order[t]) for t in range(k, j + 1))
                for u in range(len(group)):
                    for v in range(u + 1, len(group)):
                        pairs.add((group[u], group[v]))
                k = j
            else:
                k += 1
    return sorted(pairs)


def check(word, validation_angle=GENERIC_ANGLE, step_len=100.0):
    """All rule violations of ``word``; empty list means canonical."""
    text = word.text
    violations = []

    segs = interpret(word, validation_angle, step_len)
    tol = 1e-6 * step_len
    for i, j in coincident_segment_pairs(segs, tol):
        violations.append(RuleViolation(
            1, (i, j), f"segments {i} and {j} coincide"))

    for i in range(len(text) - 1):
        pair = text[i:i + 2]
        if pair in ("+-", "-+"):
            violations.append(RuleViolation(
                2, i, f"opposite rotations {pair!r} adjacent"))
        if pair == "[]":
            violations.append(RuleViolation(3, i, "empty branch '[]'"))

    def walk(node):
        kids = node.children
        i = 0
        while i < len(kids):
            if isinstance(kids[i], _Branch):
                j = i
                while j < len(kids) and isinstance(kids[j], _Branch):
                    j += 1
                run = kids[i:j]
                if len(run) > 1:
                    keys = [_sort_key(c) for c in run]
                    if keys != sorted(keys):
                        violations.append(RuleViolation(
                            4, run[0].start, "sibling branches out of order"))
                i = j
            else:
                i += 1
        if kids and isinstance(kids[-1], _Branch):
            violations.append(RuleViolation(
                5, kids[-1].start, "branch ends with a sub-branch"))
        for c in kids:
            if isinstance(c, _Branch):
                walk(c)

    walk(_to_tree(text))
    violations.sort(key=lambda v: v.rule)
    return violations


def is_canonical(word, validation_angle=GENERIC_ANGLE, step_len=100.0):
    return not check(word, validation_angle, step_len)
