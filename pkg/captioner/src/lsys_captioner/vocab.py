"""Token vocabulary shared with the lsystool prediction file format.

Fixed id assignment (wire format, do not reorder):

    0 <bos>   1 <eos>   2 F   3 +/+F   4 -/-F   5 [   6 ]
"""

BOS = 0
EOS = 1
VOCAB_SIZE = 7

SURFACE = {
    "char": ("<bos>", "<eos>", "F", "+", "-", "[", "]"),
    "fused": ("<bos>", "<eos>", "F", "+F", "-F", "[", "]"),
}


def encode(text, scheme="fused"):
    """Word string -> body token ids (no BOS/EOS)."""
    ids = []
    if scheme == "char":
        lut = {"F": 2, "+": 3, "-": 4, "[": 5, "]": 6}
        for ch in text:
            ids.append(lut[ch])
        return ids
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "+" or ch == "-":
            if i + 1 >= len(text) or text[i + 1] != "F":
                raise ValueError(f"unfusable rotation at {i} in {text!r}")
            ids.append(3 if ch == "+" else 4)
            i += 2
        else:
            ids.append({"F": 2, "[": 5, "]": 6}[ch])
            i += 1
    return ids


def decode(ids, scheme="fused"):
    """Body token ids -> word string; BOS/EOS are rejected."""
    table = SURFACE[scheme]
    out = []
    for t in ids:
        if t in (BOS, EOS):
            raise ValueError("BOS/EOS inside a word body")
        out.append(table[t])
    return "".join(out)
