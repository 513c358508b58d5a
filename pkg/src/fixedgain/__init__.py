"""fixedgain: design and analysis of fixed-gain tracking filters.

The package designs constant-gain observers for integrator-chain signal
models by pole placement, rebases them across four state-space coordinate
systems, extracts the equivalent transfer function, and analyzes the
response (noise gain, frequency response, dc flatness, tracking error).

Typical use:

    >>> from fixedgain import ProcessModel, ObserverSpec, design
    >>> model = ProcessModel(order=2, ts=0.1)
    >>> result = design(ObserverSpec.repeated(model, pole=0.8, lag=1.0))
    >>> result.gains.kin.col(0)
    (0.3599..., 0.3999...)
"""

from . import errors
from .analyze import (
    flatness_check,
    flatness_profile,
    flatness_targets,
    frequency_grid,
    frequency_response,
    impulse_response,
    lde_filter,
    optimal_lag_k2,
    ramp_error,
    steady_state_step,
    step_response,
    white_noise_gain,
    white_noise_gain_k2,
)
from .design import (
    DesignResult,
    GainVectors,
    ObserverSpec,
    canonical_pair,
    closed_form_gains,
    companion_column,
    design,
    memory_to_pole,
    pcf_gain,
    pcf_transform,
    placement_residual,
    pole_to_memory,
    realized_char_poly,
)
from .linalg import Matrix
from .poly import Polynomial, from_roots
from .process import ProcessModel
from .realize import (
    FilterState,
    Form,
    StateSpaceModel,
    ccf_realization,
    companion_matrix,
    controllability_matrix,
    extract_kinematic,
    initialize_state,
    observability_matrix,
    ocf_realization,
    pcf_realization,
    read_output,
    run,
    second_order_transfer,
    step,
    transfer_coefficients,
)

__version__ = "0.1.0"

__all__ = [
    "DesignResult",
    "FilterState",
    "Form",
    "GainVectors",
    "Matrix",
    "ObserverSpec",
    "Polynomial",
    "ProcessModel",
    "StateSpaceModel",
    "canonical_pair",
    "ccf_realization",
    "closed_form_gains",
    "companion_column",
    "companion_matrix",
    "controllability_matrix",
    "design",
    "errors",
    "extract_kinematic",
    "flatness_check",
    "flatness_profile",
    "flatness_targets",
    "frequency_grid",
    "frequency_response",
    "from_roots",
    "observability_matrix",
    "impulse_response",
    "initialize_state",
    "lde_filter",
    "memory_to_pole",
    "ocf_realization",
    "optimal_lag_k2",
    "pcf_gain",
    "pcf_realization",
    "pcf_transform",
    "placement_residual",
    "pole_to_memory",
    "ramp_error",
    "read_output",
    "realized_char_poly",
    "run",
    "second_order_transfer",
    "steady_state_step",
    "step",
    "step_response",
    "transfer_coefficients",
    "white_noise_gain",
    "white_noise_gain_k2",
]
