"""Asymptotic structure of finite-dimensional quantum channels."""

from qasym.asymptotics import (
    certify_unitary,
    gkls_superop,
    is_idempotent,
    markov_principal_branch_test,
    peripheral_channel,
    random_spec,
    spec_from_arrays,
    synthesize_extension,
    trajectory,
)
from qasym.channel import (
    Channel,
    adjoint,
    amplitude_damping,
    classical_swap,
    compose,
    dephasing,
    depolarizing,
    power,
    random_channel,
    replacement,
    unitary_channel,
    validate,
)
from qasym.errors import QasymError
from qasym.modular import build_fixed_state, kms_state, modular_flow, modular_operator, verify_cycle_power
from qasym.numerics import DEFAULT_TOL, Tolerances
from qasym.pipeline import Analysis, PipelineFailure, analyze
from qasym.reduction import reduce
from qasym.spectral import cesaro_fixed_oracle, spectrum
from qasym.structure import (
    adjoint_attractor_algebra,
    decompose_algebra,
    extract_action,
    extract_rho,
    reconstruct_peripheral,
)

__version__ = "0.1.0"
