import json

import numpy as np
import pytest

from _fixtures import nonunitary_two_cycle_spec, qubit_two_cycle
from qasym.channel import random_channel
from qasym.errors import ParseError
from qasym.io import (
    channel_from_dict,
    channel_to_dict,
    decode_matrix,
    decomposition_from_dict,
    decomposition_to_dict,
    encode_matrix,
    loads_channel,
    report_to_dict,
)
from qasym.pipeline import analyze


def test_matrix_encoding_round_trip():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    assert np.array_equal(decode_matrix(encode_matrix(A)), A)
    flat = [p for row in encode_matrix(A) for p in row]
    assert np.array_equal(decode_matrix(flat, (3, 2)), A)
    sq = rng.standard_normal((2, 2))
    assert np.array_equal(decode_matrix([p for row in encode_matrix(sq) for p in row]), sq)


@pytest.mark.parametrize("rep", ["kraus", "choi", "superop"])
def test_channel_round_trip(rep):
    phi = random_channel(3, 4, seed=1)
    doc = json.loads(json.dumps(channel_to_dict(phi, rep)))
    again = channel_from_dict(doc)
    assert np.abs(again.superop - phi.superop).max() < 1e-12


@pytest.mark.parametrize("text", [
    '{"dim": 2,',
    '{"dim": 2, "representation": "kraus"}',
    '{"dim": 2, "representation": "ptm", "matrices": [[[[1, 0]]]]}',
    '{"dim": 2, "representation": "kraus", "matrices": [[[[1, 0], [0, 0]]]]}',
    '{"dim": 2, "representation": "kraus", "matrices": [[[["a", 0], [0, 0]], [[0, 0], [1, 0]]]]}',
    '{"dim": 0, "representation": "kraus", "matrices": []}',
])
def test_malformed_channels(text):
    with pytest.raises(ParseError):
        loads_channel(text)


def test_parse_error_reports_position():
    with pytest.raises(ParseError, match="line 2, column"):
        loads_channel('{"dim": 2,\n ]')


def test_decomposition_round_trip():
    D, A = nonunitary_two_cycle_spec()
    doc = json.loads(json.dumps(decomposition_to_dict(D, A)))
    D2, A2, total = decomposition_from_dict(doc)
    assert total == 3 and A2.pi == A.pi
    for b, c in zip(D.blocks, D2.blocks):
        assert (b.d, b.m) == (c.d, c.m)
        assert np.array_equal(b.W, c.W) and np.array_equal(b.rho, c.rho)


def test_decomposition_defaults_to_canonical_embedding():
    doc = {"blocks": [{"d": 1, "m": 1, "rho": [[[1, 0]]]}, {"d": 1, "m": 2, "rho": encode_matrix(np.eye(2) / 2)}],
           "pi": [1, 0], "U": [[[[1, 0]]], [[[1, 0]]]]}
    D, A, total = decomposition_from_dict(doc)
    assert total == 3
    assert np.array_equal(D.blocks[1].W, np.eye(3)[:, 1:])
    _, _, total = decomposition_from_dict(doc, total_dim=5)
    assert total == 5
    with pytest.raises(ParseError):
        decomposition_from_dict({**doc, "pi": [1]})


def test_report_is_finite_and_consistent():
    report = report_to_dict(analyze(qubit_two_cycle()), timings=False)
    text = json.dumps(report, allow_nan=False)
    assert "timings" not in report
    assert report["decomposition"]["sum_d_squared"] == len(report["spectrum"]["peripheral"])
    assert report["action"]["cycles"] == "(1 2)"
    assert json.loads(text) == report
