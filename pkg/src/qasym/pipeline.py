"""End-to-end analysis of a channel's asymptotic structure."""

import time
from dataclasses import dataclass, field

import numpy as np

from qasym.asymptotics import (
    certify_unitary,
    is_idempotent,
    markov_principal_branch_test,
)
from qasym.channel import validate
from qasym.errors import QasymError
from qasym.modular import build_fixed_state, modular_operator, verify_cycle_power
from qasym.numerics import DEFAULT_TOL
from qasym.reduction import reduce
from qasym.spectral import spectrum
from qasym.structure import (
    adjoint_attractor_algebra,
    decompose_algebra,
    decomposition_algebra_basis,
    extract_action,
    extract_rho,
)


class PipelineFailure(QasymError):
    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class Analysis:
    channel: object
    validation: object
    spectrum: object = None
    reduction: object = None
    reduced_spectrum: object = None
    algebra: list = None
    decomposition: object = None
    action: object = None
    certificate: object = None
    idempotent: bool = None
    markov: object = None
    cycles: tuple = None
    modular: object = None
    modular_operator: object = None
    cycle_power: object = None
    timings: dict = field(default_factory=dict)


def analyze(channel, tol=DEFAULT_TOL, seed=0, require_valid=True):
    """Run validation, spectrum, reduction, decomposition, action, certificate and modular checks.

    Raises :class:`PipelineFailure` naming the failing stage. Validation
    failures raise it with stage ``"validate"`` when ``require_valid``.
    """
    out = Analysis(channel, validate(channel, tol))
    if require_valid and not out.validation.ok:
        raise PipelineFailure("validate", f"not a CPTP map: {out.validation}")

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            return fn()
        except QasymError as exc:
            raise PipelineFailure(name, exc) from exc
        finally:
            out.timings[name] = time.perf_counter() - t0

    out.spectrum = stage("spectrum", lambda: spectrum(channel, tol))
    out.reduction = stage("reduce", lambda: reduce(channel, out.spectrum, tol))
    reduced = out.reduction.reduced
    out.reduced_spectrum = (out.spectrum if out.reduction.faithful
                            else stage("reduced_spectrum", lambda: spectrum(reduced, tol)))
    out.algebra = stage("algebra", lambda: adjoint_attractor_algebra(reduced, tol))
    skeleton = stage("decompose", lambda: decompose_algebra(out.algebra, seed, tol))
    out.decomposition = stage("extract_rho", lambda: extract_rho(reduced, skeleton, out.reduced_spectrum, tol))
    out.action = stage("extract_action", lambda: extract_action(reduced, out.decomposition, tol))
    out.certificate = stage("certify", lambda: certify_unitary(out.decomposition, out.action, tol, reduced))
    out.idempotent = is_idempotent(channel, tol)
    out.markov = stage("markov", lambda: markov_principal_branch_test(channel, tol))
    out.cycles, out.modular = stage(
        "modular", lambda: build_fixed_state(out.decomposition, out.action, tol, reduced))
    out.modular_operator = stage(
        "modular_operator",
        lambda: modular_operator(out.modular, decomposition_algebra_basis(out.decomposition), tol))
    out.cycle_power = stage(
        "cycle_power", lambda: verify_cycle_power(reduced, out.decomposition, out.action, out.modular, tol))
    return out


def block_weights(analysis, rho):
    """Trace weight of ``rho`` on each block of ``H0``, followed by the weight outside ``H0``."""
    V = analysis.reduction.V
    r0 = V.conj().T @ rho @ V
    weights = [float(np.trace(b.W.conj().T @ r0 @ b.W).real) for b in analysis.decomposition.blocks]
    weights.append(float(np.trace(rho).real - np.trace(r0).real))
    return weights
