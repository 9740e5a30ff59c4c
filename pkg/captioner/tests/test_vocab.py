import pytest

from lsys_captioner.vocab import BOS, EOS, VOCAB_SIZE, decode, encode


def test_fixed_ids():
    assert (BOS, EOS, VOCAB_SIZE) == (0, 1, 7)
    assert encode("F[+F]F", "fused") == [2, 5, 3, 6, 2]
    assert encode("F[+F]F", "char") == [2, 5, 3, 2, 6, 2]


def test_round_trip_fused():
    for text in ("F", "F[+F]-F", "F[+F][-F]F", "FF[+F[-F]F]"):
        assert decode(encode(text, "fused"), "fused") == text


def test_round_trip_char():
    for text in ("F", "F+", "F[+F]-F", "-F[F]+"):
        assert decode(encode(text, "char"), "char") == text


def test_unfusable_rotation_rejected():
    with pytest.raises(ValueError):
        encode("F+[-F]", "fused")
    with pytest.raises(ValueError):
        encode("F+", "fused")


def test_decode_rejects_sentinels():
    with pytest.raises(ValueError):
        decode([2, EOS], "fused")
    with pytest.raises(ValueError):
        decode([BOS, 2], "char")
