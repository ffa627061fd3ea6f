"""Regenerate the CLI golden files: ``python3 tests/make_golden.py``.

Only rerun after an intentional change to the report schema or numerics,
and review the diff.
"""

import contextlib
import io
import json
import pathlib
import sys

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from _fixtures import hand_fixtures, nonunitary_two_cycle_spec, unitary_fixture  # noqa: E402
from qasym.asymptotics import spec_from_arrays  # noqa: E402
from qasym.channel import random_channel  # noqa: E402
from qasym.cli import main  # noqa: E402
from qasym.io import decomposition_to_dict, encode_matrix, save_channel  # noqa: E402
from qasym.pipeline import analyze  # noqa: E402

GOLDEN = pathlib.Path(__file__).parent / "golden"


def fixture_channels():
    chans = dict(hand_fixtures())
    chans["random_d3"] = random_channel(3, 2, seed=2024)
    return chans


def fixture_specs():
    an = analyze(unitary_fixture())
    return {
        "replacement": spec_from_arrays([1], [2], [np.diag([0.7, 0.3])], [0], [np.eye(1)], 2),
        "unitary": (an.decomposition, an.action, an.reduction.V),
        "nonunitary_two_cycle": nonunitary_two_cycle_spec(),
    }


def run(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    if code:
        raise SystemExit(f"{argv} exited with {code}")
    return buf.getvalue()


def main_golden():
    for sub in ("inputs", "specs", "reports"):
        (GOLDEN / sub).mkdir(parents=True, exist_ok=True)
    for name, ch in fixture_channels().items():
        path = GOLDEN / "inputs" / f"{name}.json"
        save_channel(ch, path)
        out = run(["analyze", str(path), "--no-timings"])
        (GOLDEN / "reports" / f"{name}.json").write_text(out)
    for name, spec in fixture_specs().items():
        with open(GOLDEN / "specs" / f"{name}.json", "w") as fh:
            json.dump(decomposition_to_dict(*spec), fh, indent=1)
            fh.write("\n")
    with open(GOLDEN / "ground.json", "w") as fh:
        json.dump({"state": encode_matrix(np.diag([1.0, 0.0]))}, fh)
        fh.write("\n")
    for name in ("depolarizing", "swap"):
        out = run(["evolve", str(GOLDEN / "inputs" / f"{name}.json"), "--state", str(GOLDEN / "ground.json"),
                   "--steps", "20"])
        (GOLDEN / f"evolve_{name}.csv").write_text(out)
    (GOLDEN / "random_d2_s7.json").write_text(run(["random", "--dim", "2", "--rank", "3", "--seed", "7"]))


if __name__ == "__main__":
    main_golden()
