"""Scoring of prediction files: metrics, categories, error rates, diffs.

Predictions arrive as JSON Lines records
``{id, pred_tokens: [int], logprobs: [float]?, terminated: bool}`` with
the token ids documented in :mod:`lsystool.core`.  The harness never runs
a model; teacher-forced log-probabilities must come from the producer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import canonical, core, render
from .canonical import GENERIC_ANGLE
from .core import BOS_ID, EOS_ID, FUSED_SCHEME, parse
from .errors import LsysError, MissingLogProbs

LN2 = math.log(2.0)

CORRECT = "correct"
FALSE_SYNTAX = "false_syntax"
NON_TERMINATING = "non_terminating"
RESIDUE = "residue"
CATEGORIES = (CORRECT, FALSE_SYNTAX, NON_TERMINATING, RESIDUE)


@dataclass(frozen=True)
class PredictionRecord:
    id: int
    pred_tokens: tuple
    terminated: bool
    logprobs: tuple = None


@dataclass(frozen=True)
class CategoryResult:
    category: str
    violations: tuple = ()
    detail: str = ""


def load_predictions(path):
    """Parse a predictions JSONL file; returns (records, reject_reasons)."""
    records, rejects = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                rec = PredictionRecord(
                    id=int(raw["id"]),
                    pred_tokens=tuple(int(t) for t in raw["pred_tokens"]),
                    terminated=bool(raw["terminated"]),
                    logprobs=(tuple(float(x) for x in raw["logprobs"])
                              if raw.get("logprobs") is not None else None),
                )
                if rec.logprobs and any(lp > 0 for lp in rec.logprobs):
                    raise ValueError("log-probability above 0")
            except (KeyError, TypeError, ValueError) as exc:
                rejects.append((lineno, str(exc)))
                continue
            records.append(rec)
    return records, rejects


def save_predictions(records, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            row = {"id": r.id, "pred_tokens": list(r.pred_tokens),
                   "terminated": r.terminated}
            if r.logprobs is not None:
                row["logprobs"] = list(r.logprobs)
            fh.write(json.dumps(row) + "\n")


# ---------------------------------------------------------------------------
# information-theoretic metrics

def _truth_ids(truth_word, scheme):
    return core.tokenize(truth_word, scheme)


def cross_entropy(records, truths, scheme=FUSED_SCHEME):
    """Mean negative log-probability per ground-truth token, in nats.

    The EOS position counts; BOS does not.  ``truths`` maps record id to
    the ground-truth :class:`Word`.
    """
    total, count = 0.0, 0
    for rec in records:
        if rec.logprobs is None:
            raise MissingLogProbs(f"record {rec.id} has no logprobs")
        expect = len(_truth_ids(truths[rec.id], scheme)) + 1  # + EOS
        if len(rec.logprobs) != expect:
            raise LsysError(
                f"record {rec.id}: {len(rec.logprobs)} logprobs for "
                f"{expect} ground-truth tokens")
        total -= sum(rec.logprobs)
        count += expect
    if count == 0:
        raise MissingLogProbs("no scored tokens")
    return total / count


def perplexity(ce_nats):
    if ce_nats < 0:
        raise LsysError("cross-entropy must be nonnegative")
    return math.exp(ce_nats)


def bits_per_char(records, truths, scheme=FUSED_SCHEME):
    """Total NLL in bits over the character count of the ground truth.

    The denominator is the char-scheme expansion length (no BOS/EOS), which
    puts fused and char tokenizations on one comparable scale.
    """
    total_nats, chars = 0.0, 0
    for rec in records:
        if rec.logprobs is None:
            raise MissingLogProbs(f"record {rec.id} has no logprobs")
        total_nats -= sum(rec.logprobs)
        chars += len(truths[rec.id].text)
    if chars == 0:
        raise MissingLogProbs("no scored characters")
    return total_nats / LN2 / chars


# ---------------------------------------------------------------------------
# categorical evaluation

def body_ids(pred_tokens):
    """Strip BOS/EOS framing; body stops at the first EOS."""
    ids = list(pred_tokens)
    if ids and ids[0] == BOS_ID:
        ids = ids[1:]
    if EOS_ID in ids:
        ids = ids[:ids.index(EOS_ID)]
    return ids


def categorize(record, truth, max_len, scheme=FUSED_SCHEME,
               validation_angle=GENERIC_ANGLE, step_len=100.0):
    """Four-way verdict; precedence NonTerminating > FalseSyntax > rest."""
    ids = body_ids(record.pred_tokens)
    if not record.terminated or len(ids) > max_len:
        return CategoryResult(NON_TERMINATING)
    try:
        word = core.detokenize(ids, scheme)
    except LsysError as exc:
        return CategoryResult(FALSE_SYNTAX, detail=str(exc))
    violations = canonical.check(word, validation_angle, step_len)
    if violations:
        return CategoryResult(FALSE_SYNTAX, tuple(violations),
                              "rule violation")
    if ids == _truth_ids(truth, scheme):
        return CategoryResult(CORRECT)
    return CategoryResult(RESIDUE)


def category_fractions(results):
    counts = {c: 0 for c in CATEGORIES}
    for r in results:
        counts[r.category] += 1
    n = max(len(results), 1)
    return {c: counts[c] / n for c in CATEGORIES}


# ---------------------------------------------------------------------------
# surface error rates (rotation groups, brackets, empty branches)

def error_rates(records, scheme=FUSED_SCHEME):
    """Surface statistics over raw prediction strings, malformed included."""
    rot_groups = rot_invalid = 0
    indicated = uneven = 0
    empty_literal = empty_rot_only = 0
    for rec in records:
        text = core.ids_to_text(body_ids(rec.pred_tokens), scheme)
        i = 0
        while i < len(text):
            if text[i] in "+-":
                j = i
                while j < len(text) and text[j] in "+-":
                    j += 1
                rot_groups += 1
                if "+" in text[i:j] and "-" in text[i:j]:
                    rot_invalid += 1
                i = j
            else:
                i += 1
        opens, closes = text.count("["), text.count("]")
        indicated += max(opens, closes)
        uneven += abs(opens - closes)
        empty_literal += text.count("[]")
        empty_rot_only += _rotation_only_branches(text)
    return {
        "invalid_rotation_rate": rot_invalid / rot_groups if rot_groups else 0.0,
        "invalid_bracket_rate": uneven / indicated if indicated else 0.0,
        "empty_branch_rate": empty_literal / indicated if indicated else 0.0,
        "empty_branch_rate_incl_rotation_only":
            (empty_literal + empty_rot_only) / indicated if indicated else 0.0,
    }


def _rotation_only_branches(text):
    count = 0
    i = 0
    while i < len(text):
        if text[i] == "[":
            j = i + 1
            while j < len(text) and text[j] in "+-":
                j += 1
            if j < len(text) and text[j] == "]" and j > i + 1:
                count += 1
        i += 1
    return count


# ---------------------------------------------------------------------------
# hierarchy levels

def level_projection(word, level):
    """Tokens at bracket depth exactly ``level``, brackets counted inside."""
    out = []
    depth = 0
    for tok in word.tokens:
        if tok == "[":
            depth += 1
            if depth == level:
                out.append(tok)
        elif tok == "]":
            if depth == level:
                out.append(tok)
            depth -= 1
        elif depth == level:
            out.append(tok)
    return tuple(out)


def max_depth(word):
    depth = deepest = 0
    for ch in word.text:
        if ch == "[":
            depth += 1
            deepest = max(deepest, depth)
        elif ch == "]":
            depth -= 1
    return deepest


def hierarchy_accuracy(pred_words, truth_words, level):
    """Fraction of valid pairs whose level projections match exactly.

    ``pred_words`` may contain None for syntactically invalid predictions;
    those pairs are excluded.  Returns (fraction, n_scored, n_excluded).
    """
    hits = scored = excluded = 0
    for pred, truth in zip(pred_words, truth_words):
        if pred is None:
            excluded += 1
            continue
        scored += 1
        if level_projection(pred, level) == level_projection(truth, level):
            hits += 1
    return (hits / scored if scored else 0.0), scored, excluded


# ---------------------------------------------------------------------------
# diff rendering

_BLACK = (0, 0, 0)
_RED = (220, 30, 30)
_BLUE = (40, 60, 220)


def diff_render(pred, truth, angle_deg, step_len, size,
                margin=render.DEFAULT_MARGIN):
    """Render truth vs prediction in one frame; shared fit transform.

    Segments in both words are black, truth-only red, prediction-only
    blue.  Returns a (size, size, 3) uint8 array, white background.
    """
    truth_segs = render.interpret(truth, angle_deg, step_len)
    pred_segs = (render.interpret(pred, angle_deg, step_len)
                 if pred is not None else np.zeros((0, 4)))
    union = np.vstack([truth_segs, pred_segs])
    if union.shape[0] == 0:
        return np.full((size, size, 3), 255, dtype=np.uint8)
    fitted = render.fit_to_canvas(union, size, size, margin)
    t_fit = fitted[:len(truth_segs)]
    p_fit = fitted[len(truth_segs):]

    # identical sub-walks yield bitwise-equal segments under the shared
    # transform, so quantized endpoint keys classify reliably
    tol = 1e-3 * size
    t_keys = {_seg_key(s, tol) for s in t_fit}
    p_keys = {_seg_key(s, tol) for s in p_fit}

    img = np.full((size, size, 3), 255, dtype=np.uint8)
    for seg in t_fit:
        color = _BLACK if _seg_key(seg, tol) in p_keys else _RED
        _draw(img, seg, size, color)
    for seg in p_fit:
        if _seg_key(seg, tol) in t_keys:
            continue  # already black
        _draw(img, seg, size, _BLUE)
    return img


def _seg_key(seg, tol):
    x0, y0, x1, y1 = seg
    if (x0, y0) > (x1, y1):
        x0, y0, x1, y1 = x1, y1, x0, y0
    return (round(x0 / tol), round(y0 / tol), round(x1 / tol), round(y1 / tol))


def _draw(img, seg, size, color):
    pts = render.segment_pixels(*seg)
    rows = (size - 1) - pts[:, 1]
    img[rows, pts[:, 0]] = color


def save_rgb_png(img, path):
    from PIL import Image
    Image.fromarray(img, mode="RGB").save(path)


# ---------------------------------------------------------------------------
# full report

def evaluate(manifest, records, scheme=None, max_len=None,
             validation_angle=GENERIC_ANGLE):
    """Score a prediction set against a manifest; returns a report dict."""
    scheme = scheme or manifest.config.get("scheme", FUSED_SCHEME)
    step_len = manifest.config.get("step_len", 100.0)
    by_id = manifest.by_id()
    truths = {}
    for rec in records:
        if rec.id not in by_id:
            raise LsysError(f"prediction id {rec.id} not in manifest")
        truths[rec.id] = parse(by_id[rec.id].word, scheme)
    if max_len is None:
        longest = max((len(w) for w in truths.values()), default=0)
        max_len = 2 * longest

    results = [categorize(r, truths[r.id], max_len, scheme,
                          validation_angle, step_len) for r in records]
    fractions = category_fractions(results)

    pred_words, truth_words = [], []
    for rec, res in zip(records, results):
        truth_words.append(truths[rec.id])
        if res.category in (CORRECT, RESIDUE):
            pred_words.append(core.detokenize(body_ids(rec.pred_tokens),
                                              scheme))
        else:
            pred_words.append(None)
    levels = max((max_depth(w) for w in truth_words), default=0)
    hier = []
    for lv in range(levels + 1):
        frac, scored, excluded = hierarchy_accuracy(pred_words, truth_words,
                                                    lv)
        hier.append(frac)

    report = {
        "n_records": len(records),
        "scheme": scheme,
        "max_len": max_len,
        "categories": fractions,
        "error_rates": error_rates(records, scheme),
        "hierarchy_accuracy": hier,
        "hierarchy_excluded": sum(1 for w in pred_words if w is None),
    }
    if all(r.logprobs is not None for r in records) and records:
        ce = cross_entropy(records, truths, scheme)
        report["ce_nats"] = ce
        report["ppl"] = perplexity(ce)
        report["bpc"] = bits_per_char(records, truths, scheme)
        report["bits_per_token"] = ce / LN2
    return report


def format_report(report):
    """Human-readable tables mirroring the categorical and error summaries."""
    lines = []
    lines.append(f"records: {report['n_records']}  "
                 f"scheme: {report['scheme']}  max_len: {report['max_len']}")
    if "ce_nats" in report:
        lines.append(f"CE {report['ce_nats']:.4f} nats/token   "
                     f"PPL {report['ppl']:.4f}   BPC {report['bpc']:.4f}   "
                     f"bits/token {report['bits_per_token']:.4f}")
    cats = report["categories"]
    lines.append("category      fraction")
    for c in CATEGORIES:
        lines.append(f"  {c:<16}{cats[c]*100:6.2f}%")
    er = report["error_rates"]
    lines.append("error rates")
    for k in ("invalid_rotation_rate", "invalid_bracket_rate",
              "empty_branch_rate", "empty_branch_rate_incl_rotation_only"):
        lines.append(f"  {k:<38}{er[k]*100:6.2f}%")
    hier = " ".join(f"L{i}={f*100:.2f}%" for i, f in
                    enumerate(report["hierarchy_accuracy"]))
    lines.append(f"hierarchy accuracy: {hier}")
    return "\n".join(lines)
