"""Fixed-gain observer design by pole placement.

Given an integrator-chain process and a set of desired closed-loop poles,
this module solves for the correction-gain vector that places the observer's
poles exactly there, then assembles the closed-loop filter in kinematic
coordinates.  The solve happens in process-companion coordinates (PCF), where
the gain is simply the coefficient gap between the process and observer
characteristic polynomials; a similarity transform built from the two
observability matrices carries it back.

The poles are the whole design surface: a single repeated pole ``p`` trades
bandwidth against noise through one number, with ``p = 0`` giving a deadbeat
(finite-memory) filter and ``p -> 1`` an ever-longer memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from .errors import (
    DimensionMismatch,
    DerivativeIndexOutOfRange,
    FixedGainError,
    NonPositiveSamplingPeriod,
    NotMonic,
    SingularMatrix,
    Unobservable,
    UnstablePoles,
    UnsupportedOrder,
)
from .linalg import Matrix
from .poly import Polynomial, from_roots
from .process import ProcessModel
from .realize import Form, StateSpaceModel, companion_matrix, observability_matrix


@dataclass(frozen=True)
class ObserverSpec:
    """What to design: a process, the desired poles, and the read-out.

    Attributes:
        process: the integrator-chain model being tracked.
        poles: desired closed-loop poles, one per state, closed under
            conjugation.  Stability is enforced at design time.
        lag: read-out point in samples behind the newest measurement.
            Fractional and negative (prediction) values are allowed.
        deriv: which kinematic derivative the scalar output taps
            (0 = position, 1 = velocity, ...).
    """

    process: ProcessModel
    poles: tuple[complex, ...]
    lag: float = 0.0
    deriv: int = 0

    def __post_init__(self):
        object.__setattr__(self, "poles", tuple(complex(p) for p in self.poles))
        object.__setattr__(self, "lag", float(self.lag))
        if len(self.poles) != self.process.order:
            raise DimensionMismatch(
                f"need {self.process.order} poles, got {len(self.poles)}"
            )
        if not 0 <= self.deriv < self.process.order:
            raise DerivativeIndexOutOfRange(
                f"derivative index must be in 0..{self.process.order - 1},"
                f" got {self.deriv}"
            )

    @classmethod
    def repeated(
        cls,
        process: ProcessModel,
        pole: float,
        lag: float = 0.0,
        deriv: int = 0,
    ) -> "ObserverSpec":
        """Spec with one real pole repeated across all states -- the common
        single-knob design.  Requires 0 <= pole < 1."""
        pole = float(pole)
        if not 0.0 <= pole < 1.0:
            raise UnstablePoles(f"repeated pole must satisfy 0 <= p < 1, got {pole!r}")
        return cls(process=process, poles=(pole,) * process.order, lag=lag, deriv=deriv)


@dataclass(frozen=True)
class GainVectors:
    """Correction gain in both coordinate systems (K x 1 columns)."""

    kin: Matrix
    pcf: Matrix


class TransformPair(NamedTuple):
    kin_from_pcf: Matrix
    pcf_from_kin: Matrix


@dataclass
class DesignResult:
    """Everything the placement produced.

    The canonical realizations and the transfer coefficients are filled in
    lazily by :mod:`fixedgain.realize`; all other fields are set at design
    time and should be treated as read-only.
    """

    spec: ObserverSpec
    gains: GainVectors
    char_poly: Polynomial                 # observer characteristic polynomial
    companion_col_obs: tuple[float, ...]  # its negated coefficients, reversed
    companion_col_prc: tuple[float, ...]  # same for the process polynomial
    kin_from_pcf: Matrix
    pcf_from_kin: Matrix
    ss_kin: StateSpaceModel
    placement_residual: float
    ss_pcf: StateSpaceModel | None = None
    ss_ocf: StateSpaceModel | None = None
    ss_ccf: StateSpaceModel | None = None
    numerator: Polynomial | None = None

    @property
    def order(self) -> int:
        return self.spec.process.order


def companion_column(char: Polynomial) -> tuple[float, ...]:
    """Last column of the companion matrix whose characteristic polynomial
    is ``char``: entry k is ``-char[K-k]``.  ``char`` must be monic."""
    if not char.is_monic():
        raise NotMonic(f"expected leading coefficient 1, got {char[0]!r}")
    k = char.degree
    if k < 1:
        raise NotMonic("characteristic polynomial must have degree >= 1")
    return tuple(-char[k - i] for i in range(k))


def pcf_gain(col_prc: Sequence[float], col_obs: Sequence[float]) -> Matrix:
    """Correction gain in companion coordinates: the elementwise gap between
    the process and observer companion columns."""
    if len(col_prc) != len(col_obs):
        raise DimensionMismatch(
            f"column lengths differ: {len(col_prc)} vs {len(col_obs)}"
        )
    return Matrix.column([gp - go for gp, go in zip(col_prc, col_obs)])


def canonical_pair(order: int) -> tuple[Matrix, Callable[[Sequence[float]], Matrix]]:
    """Measurement row and transition builder for companion coordinates.

    Returns the 1 x K row (0, ..., 0, 1) together with the function that
    expands a companion column into the full K x K transition matrix.
    """
    row = Matrix.row_vector([0.0] * (order - 1) + [1.0])
    return row, companion_matrix


def pcf_transform(model: ProcessModel) -> TransformPair:
    """Similarity pair between kinematic and process-companion coordinates.

    Both directions are built from observability matrices of the *predictor*
    measurement (measurement row advanced one step) against the process
    transition, in kinematic and companion coordinates respectively.
    """
    order = model.order
    obs_kin = observability_matrix(model.predictor_row(), model.transition_matrix)
    can_row, build = canonical_pair(order)
    can_transition = build(companion_column(model.char_poly))
    obs_can = observability_matrix(can_row, can_transition)
    try:
        kin_from_pcf = obs_kin.inv() @ obs_can
        pcf_from_kin = obs_can.inv() @ obs_kin
    except SingularMatrix as exc:
        raise Unobservable(
            "process/predictor pair is not observable at this order"
        ) from exc
    return TransformPair(kin_from_pcf, pcf_from_kin)


def design(spec: ObserverSpec, *, allow_unstable: bool = False) -> DesignResult:
    """Place the observer poles and assemble the kinematic-form filter.

    Pipeline: expand the requested poles into the observer characteristic
    polynomial, take the coefficient gap to the process polynomial as the
    companion-coordinate gain, map it to kinematic coordinates through the
    observability-based similarity, close the loop against the predictor row,
    and attach the requested read-out row.

    The result carries a placement residual: the characteristic polynomial of
    the assembled closed loop is recovered through the companion similarity
    and evaluated at every requested pole (and, for repeated poles, its
    derivatives up to the multiplicity), scaled by the coefficient magnitude.
    Anything much above 1e-12 means the transforms are losing precision.
    """
    model = spec.process
    if not allow_unstable:
        for p in spec.poles:
            if abs(p) >= 1.0:
                raise UnstablePoles(
                    f"pole {p} is not strictly inside the unit circle"
                )
    char = from_roots(spec.poles)
    col_obs = companion_column(char)
    col_prc = companion_column(model.char_poly)
    gain_pcf_vec = pcf_gain(col_prc, col_obs)
    transforms = pcf_transform(model)
    gain_kin_vec = transforms.kin_from_pcf @ gain_pcf_vec

    closed_loop = model.transition_matrix - gain_kin_vec @ model.predictor_row()
    ss_kin = StateSpaceModel(
        form=Form.KIN,
        transition=closed_loop,
        input_gain=gain_kin_vec,
        output_row=model.output_row(spec.lag, spec.deriv),
        kin_from_form=Matrix.identity(model.order),
        form_from_kin=Matrix.identity(model.order),
    )

    result = DesignResult(
        spec=spec,
        gains=GainVectors(kin=gain_kin_vec, pcf=gain_pcf_vec),
        char_poly=char,
        companion_col_obs=col_obs,
        companion_col_prc=col_prc,
        kin_from_pcf=transforms.kin_from_pcf,
        pcf_from_kin=transforms.pcf_from_kin,
        ss_kin=ss_kin,
        placement_residual=0.0,
    )
    result.placement_residual = placement_residual(
        realized_char_poly(result), spec.poles
    )
    return result


def realized_char_poly(result: DesignResult) -> Polynomial:
    """Characteristic polynomial of the assembled closed loop, recovered by
    rotating the kinematic transition into companion coordinates and reading
    its last column.  Agrees with ``result.char_poly`` up to roundoff."""
    rotated = result.pcf_from_kin @ result.ss_kin.transition @ result.kin_from_pcf
    col = rotated.col(result.order - 1)
    return Polynomial([1.0] + [-c for c in reversed(col)])


def placement_residual(char: Polynomial, poles: Sequence[complex]) -> float:
    """Largest scaled magnitude of ``char`` (and its derivatives, up to each
    pole's multiplicity) over the requested pole set.  Zero means the
    polynomial vanishes exactly where it should."""
    counts: dict[complex, int] = {}
    for p in poles:
        p = complex(p)
        counts[p] = counts.get(p, 0) + 1
    worst = 0.0
    for pole, mult in counts.items():
        d = char
        for _ in range(mult):
            scale = max(1.0, max(abs(c) for c in d.coeffs))
            worst = max(worst, abs(d(pole)) / scale)
            d = d.derivative()
    return worst


def closed_form_gains(order: int, pole: float, ts: float) -> Matrix:
    """Kinematic gain column for a repeated real pole, orders 1-3, in closed
    form.  Matches the pipeline result to roundoff; mainly useful as a fast
    path and a cross-check."""
    p = float(pole)
    ts = float(ts)
    if not 0.0 <= p < 1.0:
        raise UnstablePoles(f"repeated pole must satisfy 0 <= p < 1, got {p!r}")
    if not ts > 0.0:
        raise NonPositiveSamplingPeriod(f"sampling period must be > 0, got {ts!r}")
    if order == 1:
        return Matrix.column([1.0 - p])
    if order == 2:
        return Matrix.column([1.0 - p * p, (1.0 - p) ** 2 / ts])
    if order == 3:
        return Matrix.column(
            [
                1.0 - p ** 3,
                1.5 * (1.0 - p) ** 2 * (1.0 + p) / ts,
                (1.0 - p) ** 3 / (ts * ts),
            ]
        )
    raise UnsupportedOrder(f"closed-form gains cover orders 1-3, got {order}")


def memory_to_pole(memory: float) -> float:
    """Pole with the given memory length in samples: p = exp(-1/memory)."""
    memory = float(memory)
    if not memory > 0.0:
        raise FixedGainError(f"memory length must be > 0, got {memory!r}")
    return math.exp(-1.0 / memory)


def pole_to_memory(pole: float) -> float:
    """Memory length in samples of a real pole in (0, 1): -1/ln(p)."""
    pole = float(pole)
    if not 0.0 < pole < 1.0:
        raise FixedGainError(f"memory is defined for 0 < p < 1, got {pole!r}")
    return -1.0 / math.log(pole)
