import json
import subprocess
import sys

import pytest

from lsystool.cli import main


def run_cli(argv, stdin=""):
    """Run the CLI in-process, capturing stdout; returns (code, out)."""
    import io
    from contextlib import redirect_stdout
    old_stdin = sys.stdin
    sys.stdin = io.StringIO(stdin)
    buf = io.StringIO()
    try:
        with redirect_stdout(buf):
            code = main(argv)
    finally:
        sys.stdin = old_stdin
    return code, buf.getvalue()


class TestCanonicalize:
    def test_paper_example_stdin(self):
        code, out = run_cli(["canonicalize"], stdin="F[-F][+F]F\n")
        assert code == 0
        assert out == "F[+F][-F]F\n"

    def test_multiple_words(self):
        code, out = run_cli(["canonicalize"], stdin="F[+F]\nF\n")
        assert out.splitlines() == ["F+F", "F"]


class TestValidate:
    def test_violation_exit_code(self):
        code, out = run_cli(["validate", "--scheme", "char"], stdin="F[]F\n")
        assert code == 1
        assert "rule 3" in out

    def test_clean_exit_code(self):
        code, out = run_cli(["validate"], stdin="F[+F][-F]F\n")
        assert code == 0
        assert out == ""

    def test_json_output(self):
        code, out = run_cli(["validate", "--json", "--scheme", "char"],
                            stdin="F[]F\n")
        row = json.loads(out)
        assert row["violations"][0]["rule"] == 3

    def test_parse_error_is_violation(self):
        code, out = run_cli(["validate"], stdin="F[+F\n")
        assert code == 1


class TestDerive:
    def test_deterministic(self):
        a = run_cli(["derive", "--steps", "3", "--seed", "9"])
        b = run_cli(["derive", "--steps", "3", "--seed", "9"])
        assert a == b and a[0] == 0

    def test_env_seed_fallback(self, monkeypatch):
        monkeypatch.setenv("LSYS_SEED", "123")
        a = run_cli(["derive", "--steps", "2"])
        b = run_cli(["derive", "--steps", "2", "--seed", "123"])
        assert a == b

    def test_grammar_file(self, tmp_path):
        g = {"axiom": "F", "productions": [{"lhs": "F", "rhs": "FF",
                                            "p": 1.0}],
             "angle": 30.0, "f": 100.0}
        path = tmp_path / "g.json"
        path.write_text(json.dumps(g))
        code, out = run_cli(["derive", "--grammar", str(path),
                             "--steps", "3", "--seed", "0"])
        assert out.strip() == "FFFFFFFF"


class TestGenerateRender:
    def test_generate_deterministic_bytes(self, tmp_path):
        m1, m2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for path in (m1, m2):
            code, _ = run_cli(["generate", "--target", "40", "--seed", "7",
                               "--out", str(path)])
            assert code == 0
        assert m1.read_bytes() == m2.read_bytes()

    def test_generate_then_render_and_evaluate(self, tmp_path):
        manifest = tmp_path / "m.jsonl"
        run_cli(["generate", "--target", "20", "--seed", "3",
                 "--out", str(manifest), "--derivation-min", "1",
                 "--derivation-max", "3"])
        code, _ = run_cli(["render", "--manifest", str(manifest),
                           "--epoch-seed", "1",
                           "--out-dir", str(tmp_path / "imgs")])
        assert code == 0
        assert len(list((tmp_path / "imgs").glob("*.pgm"))) == 20

        # echo ground truth back as predictions -> all Correct
        from lsystool import dataset
        from lsystool.core import EOS_ID, parse, tokenize
        m = dataset.load_manifest(manifest)
        preds = tmp_path / "p.jsonl"
        with open(preds, "w") as fh:
            for e in m.entries:
                ids = tokenize(parse(e.word)) + [EOS_ID]
                fh.write(json.dumps({"id": e.id, "pred_tokens": ids,
                                     "terminated": True}) + "\n")
        report_path = tmp_path / "report.json"
        code, out = run_cli(["evaluate", "--manifest", str(manifest),
                             "--predictions", str(preds),
                             "--out", str(report_path)])
        assert code == 0
        report = json.loads(report_path.read_text())
        assert report["categories"]["correct"] == 1.0
        assert report["schema_rejects"] == 0

    def test_render_words_from_stdin(self, tmp_path):
        code, _ = run_cli(["render", "--out-dir", str(tmp_path / "w"),
                           "--delta", "45", "--size", "64"],
                          stdin="F[+F][-F]F\n")
        assert code == 0
        assert (tmp_path / "w" / "0.pgm").exists()

    def test_diff_image(self, tmp_path):
        out = tmp_path / "d.png"
        code, _ = run_cli(["diff", "--truth", "F+F", "--pred", "F",
                           "--out", str(out), "--size", "96"])
        assert code == 0 and out.exists()

    def test_materialize(self, tmp_path):
        manifest = tmp_path / "m.jsonl"
        imgdir = tmp_path / "fixed"
        code, _ = run_cli(["generate", "--target", "10", "--seed", "2",
                           "--out", str(manifest),
                           "--materialize", str(imgdir)])
        assert code == 0
        assert len(list(imgdir.glob("*.pgm"))) == 10


class TestUsage:
    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as e:
            main(["frobnicate"])
        assert e.value.code == 2

    def test_console_script_installed(self):
        out = subprocess.run(["lsystool", "--help"], capture_output=True,
                             text=True)
        assert out.returncode == 0
        assert "canonicalize" in out.stdout
