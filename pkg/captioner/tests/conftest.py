import json
import subprocess

import pytest


def make_manifest(path, target, seed, deriv_min=1, deriv_max=2,
                  all_train=False):
    """Generate a small manifest via the lsystool CLI."""
    subprocess.run(
        ["lsystool", "generate", "--target", str(target), "--seed", str(seed),
         "--derivation-min", str(deriv_min), "--derivation-max",
         str(deriv_max), "--out", str(path)],
        check=True, capture_output=True)
    if all_train:
        rows = [json.loads(line) for line in
                path.read_text().splitlines()]
        for row in rows[1:]:
            row["split"] = "train"
        path.write_text(
            "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows))
    return path


@pytest.fixture(scope="session")
def tiny_manifest(tmp_path_factory):
    """Ten short words, all in the train split."""
    path = tmp_path_factory.mktemp("data") / "tiny.jsonl"
    return make_manifest(path, target=10, seed=3, all_train=True)
