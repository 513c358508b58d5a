"""State-space realizations of a designed tracking filter.

A design comes out of :func:`fixedgain.design.design` in kinematic (KIN)
coordinates, where the state is physically meaningful (position, velocity,
...).  This module rebases it into three canonical coordinate systems:

* PCF - the process is in companion form; the coordinates the gain vector is
  first solved in.
* OCF - observable canonical form; the input gain column reads off the
  transfer-function numerator directly.
* CCF - controllable canonical form; the output row reads off the numerator.

All four realizations produce identical input/output behavior; only the
internal state coordinates differ.  Each carries the similarity transform to
and from kinematic coordinates so state estimates remain interpretable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .errors import (
    FormMismatch,
    SingularMatrix,
    Uncontrollable,
    Unobservable,
    UnstablePoles,
)
from .linalg import Matrix
from .poly import Polynomial

if TYPE_CHECKING:  # pragma: no cover
    from .design import DesignResult


class Form(str, enum.Enum):
    """Coordinate system a realization (or a filter state) lives in."""

    KIN = "kin"
    PCF = "pcf"
    OCF = "ocf"
    CCF = "ccf"


# Every constructed transform pair must reproduce the canonical matrices when
# it conjugates the kinematic ones.  Residuals above this bound mean the
# coordinates are too close to degenerate to certify in double precision.
_CERTIFY_TOL = 1e-8


def _max_abs(m: Matrix) -> float:
    return max(abs(v) for row in m.data for v in row)


def _certify_similarity(kin: "StateSpaceModel", candidate: "StateSpaceModel", error) -> None:
    """Check a freshly built transform pair against the identities it must
    satisfy: conjugating the kinematic transition reproduces the canonical
    transition, mapping the output row across reproduces the canonical row,
    and mapping the gain column across reproduces the canonical column.
    Raises ``error`` when the worst residual exceeds the certification bound
    (the rank test alone can miss degeneracy hidden by row scaling)."""
    residual = max(
        _max_abs(
            candidate.form_from_kin @ kin.transition @ candidate.kin_from_form
            - candidate.transition
        ),
        _max_abs(kin.output_row @ candidate.kin_from_form - candidate.output_row),
        _max_abs(candidate.form_from_kin @ kin.input_gain - candidate.input_gain),
    )
    if residual > _CERTIFY_TOL:
        raise error(
            f"cannot certify the {candidate.form.value} transform: identity "
            f"residual {residual:.3e} exceeds {_CERTIFY_TOL:g} (the design's "
            "coordinates are numerically degenerate, e.g. a read-out that "
            "nearly cancels a pole)"
        )


@dataclass(frozen=True)
class StateSpaceModel:
    """One realization: w[n] = transition @ w[n-1] + input_gain * x[n],
    y[n] = output_row @ w[n] (the output uses the *updated* state)."""

    form: Form
    transition: Matrix      # K x K
    input_gain: Matrix      # K x 1
    output_row: Matrix      # 1 x K
    kin_from_form: Matrix   # maps this form's state into kinematic coordinates
    form_from_kin: Matrix

    @property
    def order(self) -> int:
        return self.transition.rows


@dataclass
class FilterState:
    """Mutable running state of one filter instance."""

    form: Form
    vector: list[float]


def observability_matrix(output_row: Matrix, transition: Matrix) -> Matrix:
    """Stack output_row @ transition**k for k = 0 .. K-1 into a K x K matrix."""
    row = output_row
    rows = [row.row(0)]
    for _ in range(transition.rows - 1):
        row = row @ transition
        rows.append(row.row(0))
    return Matrix(rows)


def controllability_matrix(transition: Matrix, input_gain: Matrix) -> Matrix:
    """Set transition**k @ input_gain as column k, for k = 0 .. K-1."""
    col = input_gain
    cols = [col.col(0)]
    for _ in range(transition.rows - 1):
        col = transition @ col
        cols.append(col.col(0))
    return Matrix([[cols[j][i] for j in range(len(cols))] for i in range(len(cols))])


def companion_matrix(column: Sequence[float]) -> Matrix:
    """Companion matrix with the given last column over a shifted identity.

    For column (g0, .., g_{K-1}) this is the K x K matrix whose last column is
    the given one and whose first K-1 columns are the identity shifted down
    one row -- the transition-matrix shape shared by the PCF and OCF forms.
    """
    k = len(column)
    return Matrix(
        [
            [
                column[i] if j == k - 1 else (1.0 if i == j + 1 else 0.0)
                for j in range(k)
            ]
            for i in range(k)
        ]
    )


def pcf_realization(result: "DesignResult") -> StateSpaceModel:
    """Rebase a design into the process-companion coordinates it was solved in."""
    if result.ss_pcf is None:
        kin = result.ss_kin
        model = StateSpaceModel(
            form=Form.PCF,
            transition=companion_matrix(result.companion_col_obs),
            input_gain=result.gains.pcf,
            output_row=kin.output_row @ result.kin_from_pcf,
            kin_from_form=result.kin_from_pcf,
            form_from_kin=result.pcf_from_kin,
        )
        _certify_similarity(kin, model, Unobservable)
        result.ss_pcf = model
    return result.ss_pcf


def ocf_realization(result: "DesignResult") -> StateSpaceModel:
    """Observable canonical form of a design.

    The transform is built by equating observability matrices: the canonical
    pair's observability stack is formed analytically, the kinematic one from
    the design's closed-loop matrices, and the similarity is the product of
    the second's inverse with the first.  The finished pair is certified
    against the transform identities; designs whose read-out row leaves the
    state unobservable (exactly or within roundoff of it) raise
    :class:`Unobservable` rather than returning a corrupt transform.
    """
    if result.ss_ocf is None:
        kin = result.ss_kin
        k = kin.order
        transition = companion_matrix(result.companion_col_obs)
        output_row = Matrix.row_vector([0.0] * (k - 1) + [1.0])
        obs_kin = observability_matrix(kin.output_row, kin.transition)
        obs_can = observability_matrix(output_row, transition)
        try:
            kin_from_ocf = obs_kin.inv() @ obs_can
            ocf_from_kin = obs_can.inv() @ obs_kin
        except SingularMatrix as exc:
            raise Unobservable(
                "closed-loop pair is not observable; cannot reach OCF"
            ) from exc
        model = StateSpaceModel(
            form=Form.OCF,
            transition=transition,
            input_gain=ocf_from_kin @ kin.input_gain,
            output_row=output_row,
            kin_from_form=kin_from_ocf,
            form_from_kin=ocf_from_kin,
        )
        _certify_similarity(kin, model, Unobservable)
        result.ss_ocf = model
    return result.ss_ocf


def ccf_realization(result: "DesignResult") -> StateSpaceModel:
    """Controllable canonical form of a design.

    Built by equating controllability matrices.  The canonical transition
    carries the negated characteristic coefficients across its first row and
    the input gain is the first unit vector; the output row then equals the
    transfer-function numerator coefficients.  As with the observable form,
    the finished pair is certified against the transform identities and
    :class:`Uncontrollable` is raised when certification fails.
    """
    if result.ss_ccf is None:
        kin = result.ss_kin
        k = kin.order
        col = result.companion_col_obs
        first_row = [col[k - 1 - j] for j in range(k)]
        if k == 1:
            transition = Matrix([first_row])
        else:
            transition = Matrix(
                [first_row]
                + [
                    [1.0 if j == i else 0.0 for j in range(k)]
                    for i in range(k - 1)
                ]
            )
        input_gain = Matrix.column([1.0] + [0.0] * (k - 1))
        ctrb_kin = controllability_matrix(kin.transition, kin.input_gain)
        ctrb_can = controllability_matrix(transition, input_gain)
        try:
            kin_from_ccf = ctrb_kin @ ctrb_can.inv()
            ccf_from_kin = ctrb_can @ ctrb_kin.inv()
        except SingularMatrix as exc:
            raise Uncontrollable(
                "closed-loop pair is not controllable; cannot reach CCF"
            ) from exc
        model = StateSpaceModel(
            form=Form.CCF,
            transition=transition,
            input_gain=input_gain,
            output_row=kin.output_row @ kin_from_ccf,
            kin_from_form=kin_from_ccf,
            form_from_kin=ccf_from_kin,
        )
        _certify_similarity(kin, model, Uncontrollable)
        result.ss_ccf = model
    return result.ss_ccf


def transfer_coefficients(result: "DesignResult") -> tuple[Polynomial, Polynomial]:
    """Numerator/denominator of the filter's transfer function.

    The denominator is the observer characteristic polynomial.  The numerator
    coefficients come from the OCF input-gain column read in reverse, padded
    with a structurally-zero constant term, so it has K+1 entries like the
    denominator but no instantaneous-feedthrough ambiguity.  When the
    read-out row leaves the state unobservable — exactly or near enough that
    the OCF transform fails certification — the same coefficients are read
    from the CCF output row instead; controllability rarely degenerates for
    these designs because the input column is the gain vector itself.
    """
    if result.numerator is None:
        try:
            ocf = ocf_realization(result)
            gain_col = ocf.input_gain.col(0)
            k = len(gain_col)
            coeffs = [gain_col[k - 1 - j] for j in range(k)]
        except Unobservable:
            ccf = ccf_realization(result)
            coeffs = list(ccf.output_row.row(0))
        result.numerator = Polynomial(coeffs + [0.0])
    return result.numerator, result.char_poly


def second_order_transfer(pole: float, lag: float) -> tuple[Polynomial, Polynomial]:
    """Closed-form numerator/denominator for the order-2 smoother.

    Matches ``transfer_coefficients`` of the pipeline design with both poles
    at ``pole`` and read-out lag ``lag`` (which may be fractional).
    """
    p = float(pole)
    q = float(lag)
    if not 0.0 <= p < 1.0:
        raise UnstablePoles(f"repeated pole must satisfy 0 <= p < 1, got {p!r}")
    num = Polynomial(
        [
            (q * p + p - q + 1.0) * (1.0 - p),
            -(q * p + 2.0 * p - q) * (1.0 - p),
            0.0,
        ]
    )
    den = Polynomial([1.0, -2.0 * p, p * p])
    return num, den


def initialize_state(ss: StateSpaceModel, x0: float) -> FilterState:
    """State holding the first sample: position x0, all derivatives zero,
    expressed in the realization's own coordinates."""
    kin0 = Matrix.column([float(x0)] + [0.0] * (ss.order - 1))
    w = ss.form_from_kin @ kin0
    return FilterState(form=ss.form, vector=list(w.col(0)))


def read_output(ss: StateSpaceModel, state: FilterState) -> float:
    """Filter output implied by the current state, without advancing it."""
    if state.form is not ss.form:
        raise FormMismatch(f"state is {state.form}, realization is {ss.form}")
    row = ss.output_row.row(0)
    return sum(c * w for c, w in zip(row, state.vector))


def step(ss: StateSpaceModel, state: FilterState, x: float) -> float:
    """Advance one sample: w <- transition @ w + input_gain * x, then return
    the output read from the updated state.  Mutates ``state`` in place."""
    if state.form is not ss.form:
        raise FormMismatch(f"state is {state.form}, realization is {ss.form}")
    w = state.vector
    g = ss.transition.data
    h = ss.input_gain
    n = ss.order
    new = [
        sum(g[i][j] * w[j] for j in range(n)) + h[i, 0] * x
        for i in range(n)
    ]
    state.vector[:] = new
    row = ss.output_row.row(0)
    return sum(c * v for c, v in zip(row, new))


def run(ss: StateSpaceModel, state: FilterState, xs: Sequence[float]) -> list[float]:
    """Step through a whole input sequence, returning the outputs."""
    return [step(ss, state, x) for x in xs]


def extract_kinematic(ss: StateSpaceModel, state: FilterState) -> tuple[float, ...]:
    """Current state mapped back to kinematic coordinates
    (position, velocity, ... regardless of the realization's form)."""
    if state.form is not ss.form:
        raise FormMismatch(f"state is {state.form}, realization is {ss.form}")
    mapped = ss.kin_from_form @ Matrix.column(state.vector)
    return mapped.col(0)
