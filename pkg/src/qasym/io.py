"""JSON interchange formats for channels, decompositions and analysis reports.

Matrices are encoded as lists of rows, each row a list of ``[re, im]`` pairs.
A flat row-major list of pairs is also accepted on input when the shape can
be inferred.

Channel document::

    {"dim": d, "representation": "kraus" | "choi" | "superop", "matrices": [M, ...]}

Decomposition document (also the synthesis spec)::

    {"M": ..., "dim": d, "blocks": [{"d": .., "m": .., "W": M, "rho": M}, ...],
     "pi": [...], "U": [M, ...]}

``pi`` is 0-based: ``pi[k] = j`` means block ``k`` receives block ``j``.
``W`` and ``dim`` may be omitted in a synthesis spec.
"""

import json
import math

import numpy as np

from qasym.asymptotics import canonical_embedding
from qasym.channel import Channel
from qasym.errors import InvalidSpec, ParseError
from qasym.structure import Block, BlockDecomposition, PeripheralAction, cycle_notation

REPRESENTATIONS = ("kraus", "choi", "superop")
REPORT_SCHEMA = "qasym.analysis/1"


def encode_matrix(A):
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def encode_complex(values):
    return [[float(np.real(z)), float(np.imag(z))] for z in values]


def _pair(p):
    if not (isinstance(p, (list, tuple)) and len(p) == 2):
        raise ParseError(f"expected an [re, im] pair, got {p!r}")
    try:
        return complex(float(p[0]), float(p[1]))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"non-numeric matrix entry {p!r}") from exc


def _is_nested(obj):
    return isinstance(obj, list) and bool(obj) and isinstance(obj[0], list) and bool(obj[0]) \
        and isinstance(obj[0][0], list)


def decode_matrix(obj, shape=None):
    if not isinstance(obj, list) or not obj:
        raise ParseError("matrix must be a non-empty list")
    if _is_nested(obj):
        rows = [[_pair(p) for p in row] for row in obj]
        if len({len(r) for r in rows}) != 1:
            raise ParseError("ragged matrix rows")
        A = np.array(rows, dtype=complex)
    else:
        flat = np.array([_pair(p) for p in obj], dtype=complex)
        if shape is None:
            n = math.isqrt(flat.size)
            if n * n != flat.size:
                raise ParseError("cannot infer the shape of a flat matrix")
            shape = (n, n)
        if flat.size != shape[0] * shape[1]:
            raise ParseError(f"flat matrix has {flat.size} entries, expected {shape}")
        A = flat.reshape(shape)
    if shape is not None and A.shape != tuple(shape):
        raise ParseError(f"matrix has shape {A.shape}, expected {tuple(shape)}")
    return A


def _loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _require(doc, key):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"missing field {key!r}")
    return doc[key]


# ---------------------------------------------------------------------------
# channels
# ---------------------------------------------------------------------------

def channel_to_dict(channel, representation="kraus"):
    if representation not in REPRESENTATIONS:
        raise ValueError(f"unknown representation {representation!r}")
    if representation == "kraus":
        mats = channel.kraus
    else:
        mats = [getattr(channel, representation)]
    return {"dim": channel.dim, "representation": representation,
            "matrices": [encode_matrix(m) for m in mats]}


def channel_from_dict(doc):
    d = _require(doc, "dim")
    rep = _require(doc, "representation")
    mats = _require(doc, "matrices")
    if not isinstance(d, int) or d < 1:
        raise ParseError("dim must be a positive integer")
    if rep not in REPRESENTATIONS:
        raise ParseError(f"unknown representation {rep!r}")
    if not isinstance(mats, list) or not mats:
        raise ParseError("matrices must be a non-empty list")
    if rep == "kraus":
        return Channel(d, kraus=[decode_matrix(m, (d, d)) for m in mats])
    if len(mats) != 1:
        raise ParseError(f"{rep} representation takes exactly one matrix")
    return Channel(d, **{rep: decode_matrix(mats[0], (d * d, d * d))})


def loads_channel(text):
    return channel_from_dict(_loads(text))


def load_channel(path):
    with open(path, encoding="utf-8") as fh:
        return loads_channel(fh.read())


def save_channel(channel, path, representation="kraus"):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(channel_to_dict(channel, representation), fh, indent=1)
        fh.write("\n")


def load_state(path):
    """A density matrix stored either as a bare matrix or as ``{"state": matrix}``."""
    with open(path, encoding="utf-8") as fh:
        doc = _loads(fh.read())
    if isinstance(doc, dict):
        doc = _require(doc, "state")
    return decode_matrix(doc)


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------

def decomposition_to_dict(D, A, V=None):
    """Serialize ``(D, A)``; with ``V`` the block isometries are lifted to the full space."""
    blocks = []
    for b in D.blocks:
        W = b.W if V is None else V @ b.W
        blocks.append({"d": b.d, "m": b.m, "W": encode_matrix(W), "rho": encode_matrix(b.rho)})
    dim = D.dim if V is None else V.shape[0]
    return {"M": D.M, "dim": dim, "blocks": blocks, "pi": [int(p) for p in A.pi],
            "U": [encode_matrix(u) for u in A.U]}


def decomposition_from_dict(doc, total_dim=None):
    """Parse a decomposition/synthesis spec. Returns ``(D, A, total_dim)``."""
    blocks = _require(doc, "blocks")
    pi = _require(doc, "pi")
    U = _require(doc, "U")
    if not isinstance(blocks, list) or not blocks:
        raise ParseError("blocks must be a non-empty list")
    if "M" in doc and doc["M"] != len(blocks):
        raise ParseError("M disagrees with the number of blocks")
    if not (isinstance(pi, list) and all(isinstance(p, int) for p in pi)) or len(pi) != len(blocks):
        raise ParseError("pi must list one integer per block")
    if not isinstance(U, list) or len(U) != len(blocks):
        raise ParseError("U must list one matrix per block")
    dims, mults, rhos = [], [], []
    for b in blocks:
        d, m = _require(b, "d"), _require(b, "m")
        if not (isinstance(d, int) and isinstance(m, int) and d > 0 and m > 0):
            raise ParseError("block sizes must be positive integers")
        dims.append(d)
        mults.append(m)
        rhos.append(decode_matrix(_require(b, "rho"), (m, m)))
    if total_dim is None:
        total_dim = doc.get("dim", sum(d * m for d, m in zip(dims, mults)))
    if not isinstance(total_dim, int):
        raise ParseError("dim must be an integer")
    if all("W" in b for b in blocks):
        W = [decode_matrix(b["W"], None if _is_nested(b["W"]) else (total_dim, d * m))
             for b, d, m in zip(blocks, dims, mults)]
        for k, (w, d, m) in enumerate(zip(W, dims, mults)):
            if w.shape != (total_dim, d * m):
                raise InvalidSpec(f"W_{k + 1} has shape {w.shape}, expected {(total_dim, d * m)}")
    elif any("W" in b for b in blocks):
        raise ParseError("W must be given for all blocks or for none")
    else:
        W = canonical_embedding(dims, mults, total_dim)
    D = BlockDecomposition(tuple(Block(d, m, w, r) for d, m, w, r in zip(dims, mults, W, rhos)))
    A = PeripheralAction(tuple(pi), tuple(decode_matrix(u, (d, d)) for u, d in zip(U, dims)))
    return D, A, total_dim


def load_decomposition(path, total_dim=None):
    with open(path, encoding="utf-8") as fh:
        return decomposition_from_dict(_loads(fh.read()), total_dim)


# ---------------------------------------------------------------------------
# analysis reports
# ---------------------------------------------------------------------------

def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _sorted_eigs(values):
    values = np.asarray(values)
    order = np.lexsort((np.round(np.angle(values) % (2 * np.pi), 9), -np.round(np.abs(values), 9)))
    return values[order]


def report_to_dict(an, timings=True):
    spec, D, A = an.spectrum, an.decomposition, an.action
    cert, md, cp = an.certificate, an.modular, an.cycle_power
    out = {
        "schema": REPORT_SCHEMA,
        "dim": an.channel.dim,
        "validation": {"cp": an.validation.cp, "tp": an.validation.tp,
                       "min_choi_eig": _finite(an.validation.min_choi_eig),
                       "tp_defect": _finite(an.validation.tp_defect)},
        "spectrum": {"eigenvalues": encode_complex(_sorted_eigs(spec.eigenvalues)),
                     "peripheral": encode_complex(_sorted_eigs(spec.peripheral_eigenvalues)),
                     "attractor_dim": spec.attractor_dim,
                     "subperipheral_radius": _finite(spec.subperipheral_radius),
                     "diagnostics": list(spec.diagnostics)},
        "reduction": {"H0_dim": an.reduction.H0_dim, "faithful": an.reduction.faithful},
        "decomposition": {"M": D.M,
                          "blocks": [{"d": b.d, "m": b.m,
                                      "rho_spectrum": [_finite(x) for x in np.linalg.eigvalsh(b.rho)[::-1]]}
                                     for b in D.blocks],
                          "sum_d_squared": int(sum(b.d ** 2 for b in D.blocks))},
        "action": {"pi": [int(p) for p in A.pi], "cycles": cycle_notation(A.pi),
                   "U": [encode_matrix(u) for u in A.U]},
        "unitarity": {"unitary": bool(cert.unitary), "violations": cert.violations,
                      "residual": None if cert.residual is None else _finite(cert.residual)},
        "theorem2": {"idempotent": bool(an.idempotent), "markov": an.markov.verdict,
                     "markov_checks": {k: (_finite(v) if isinstance(v, float) else v)
                                       for k, v in an.markov.checks.items()}},
        "modular": {"M_lcm": md.M_lcm,
                    "matches": bool(cp.matches),
                    "cycle_power_residual": _finite(cp.max_residual),
                    "single_step_residual": _finite(cp.single_step_residual),
                    "no_permutation": bool(cp.no_permutation),
                    "sigma_spectrum": [_finite(x) for x in np.linalg.eigvalsh(md.sigma)[::-1]],
                    "operator_residuals": {k: _finite(v) for k, v in an.modular_operator.residuals.items()}},
    }
    if timings:
        out["timings"] = {k: _finite(v) for k, v in an.timings.items()}
    return out


def report_to_text(report):
    dec = report["decomposition"]
    lines = [
        f"dimension            {report['dim']}",
        f"CPTP                 cp={report['validation']['cp']} tp={report['validation']['tp']}",
        f"peripheral spectrum  {len(report['spectrum']['peripheral'])} eigenvalues on the unit circle",
        f"support H0           d0={report['reduction']['H0_dim']} faithful={report['reduction']['faithful']}",
        f"blocks               M={dec['M']} "
        + " ".join(f"(d={b['d']}, m={b['m']})" for b in dec["blocks"]),
        f"permutation          {report['action']['cycles']}",
        f"unitary asymptotics  {report['unitarity']['unitary']}",
    ]
    for v in report["unitarity"]["violations"]:
        lines.append(f"  violation          block {v['block'] + 1}: {v['reason']} ({v['detail']})")
    lines += [
        f"idempotent           {report['theorem2']['idempotent']}",
        f"markov test          {report['theorem2']['markov']}",
        f"modular period M     {report['modular']['M_lcm']}",
        f"flow = Phi_P^M       {report['modular']['matches']} "
        f"(residual {report['modular']['cycle_power_residual']:.2e})",
    ]
    return "\n".join(lines)
