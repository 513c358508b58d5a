"""Response analysis for designed tracking filters.

Works on the transfer-coefficient view of a filter: a numerator/denominator
pair over descending powers of z, with the denominator monic.  Covers the
questions one actually asks of a smoother: how much measurement noise gets
through (white-noise gain), what the frequency response looks like, how fast
the step response settles, whether ramps are tracked without bias, and how
flat the passband is at dc (moment-matching derivatives).
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from typing import Sequence

from .errors import (
    DimensionMismatch,
    NonConvergent,
    NotNormalized,
    PoleAtOne,
    PoleOnUnitCircle,
    UnstablePoles,
)
from .poly import Polynomial
from . import realize

# Iteration cap for impulse-response truncation; hitting it means the
# response is decaying too slowly to sum in reasonable time.
_SAMPLE_CAP = 1_000_000


def _as_poly(coeffs) -> Polynomial:
    return coeffs if isinstance(coeffs, Polynomial) else Polynomial(coeffs)


def _check_normalized(den: Polynomial) -> None:
    if den[0] != 1.0:
        raise NotNormalized(f"denominator must be monic, leading {den[0]!r}")


def _poly_roots(p: Polynomial) -> list[complex]:
    """All complex roots by Durand-Kerner iteration.

    Accuracy for well-separated roots is near machine precision; tight
    clusters (repeated roots) resolve to roughly the cluster radius, which is
    all the magnitude-based bounds here need.
    """
    n = p.degree
    if n == 0:
        return []
    lead = p[0]
    monic = Polynomial([c / lead for c in p.coeffs])
    seed = 0.4 + 0.9j
    roots = [seed ** (i + 1) for i in range(n)]
    for _ in range(300):
        moved = 0.0
        for i in range(n):
            w = roots[i]
            d = complex(1.0)
            for j in range(n):
                if j != i:
                    d *= w - roots[j]
            if d == 0:
                roots[i] = w + 1e-8 * (1 + 1j)
                moved = math.inf
                continue
            delta = monic(w) / d
            roots[i] = w - delta
            moved = max(moved, abs(delta))
        if moved < 1e-14 * (1.0 + max(abs(w) for w in roots)):
            break
    return roots


def _max_pole_magnitude(den: Polynomial) -> float:
    roots = _poly_roots(den)
    return max((abs(r) for r in roots), default=0.0)


def lde_filter(
    num,
    den,
    xs: Sequence[float],
    prehistory: tuple[Sequence[float], Sequence[float]] | None = None,
) -> list[float]:
    """Run the direct recursion y[n] = sum b[k] x[n-k] - sum a[k] y[n-k].

    ``prehistory``, when given, is a pair ``(past_inputs, past_outputs)``
    ordered most-recent-first (``past_inputs[0]`` is x[-1]).  Missing history
    is taken as zero, which is the cold-start convention.
    """
    b = _as_poly(num)
    a = _as_poly(den)
    _check_normalized(a)
    nb = len(b) - 1
    na = len(a) - 1
    px = deque([0.0] * nb, maxlen=nb or 1)
    py = deque([0.0] * na, maxlen=na or 1)
    if prehistory is not None:
        past_x, past_y = prehistory
        if len(past_x) > nb or len(past_y) > na:
            raise DimensionMismatch(
                f"prehistory longer than coefficient memory ({nb}, {na})"
            )
        for i, v in enumerate(past_x):
            px[i] = float(v)
        for i, v in enumerate(past_y):
            py[i] = float(v)
    out = []
    for x in xs:
        acc = b[0] * x
        for k in range(1, nb + 1):
            acc += b[k] * px[k - 1]
        for k in range(1, na + 1):
            acc -= a[k] * py[k - 1]
        out.append(acc)
        if nb:
            px.appendleft(x)
        if na:
            py.appendleft(acc)
    return out


def impulse_response(num, den, tol: float = 1e-12) -> list[float]:
    """Unit-pulse response, truncated once the remaining tail provably
    contributes less than ``tol`` to the sum of squares.

    The truncation bound uses the decay envelope c * (n+1)**(K-1) * r**n with
    r just above the largest pole magnitude and c fitted on the fly.  Raises
    :class:`NonConvergent` if a pole sits on or outside the unit circle (or
    so close that the cap of one million samples would be exceeded).
    """
    b = _as_poly(num)
    a = _as_poly(den)
    _check_normalized(a)
    k = a.degree
    if k == 0:
        return list(b.coeffs)
    r = _max_pole_magnitude(a)
    if r >= 1.0 - 1e-9:
        raise NonConvergent(f"largest pole magnitude {r:.12g} is not inside the unit circle")
    # Slight pad keeps the envelope valid against root-finding error.
    r_env = min(max(r, 0.05) * (1.0 + 1e-6) + 1e-9, 1.0 - 1e-12)
    env_deg = k - 1
    hist = deque([0.0] * k, maxlen=k)
    h: list[float] = []
    c_fit = 0.0
    power = 1.0  # r_env ** n
    min_run = max(len(b), 2 * k, 8)
    n = 0
    while True:
        x = b[n] if n < len(b) else 0.0
        val = x
        for j in range(1, k + 1):
            val -= a[j] * hist[j - 1]
        h.append(val)
        hist.appendleft(val)
        env = (n + 1) ** env_deg * power
        if env > 1e-300:
            c_fit = max(c_fit, abs(val) / env)
        power *= r_env
        n += 1
        if n >= min_run:
            ratio = (r_env * r_env) * ((n + 2) / (n + 1)) ** (2 * env_deg)
            if ratio < 1.0:
                head = (c_fit * power) ** 2 * (n + 1) ** (2 * env_deg)
                if head / (1.0 - ratio) < tol:
                    break
        if n >= _SAMPLE_CAP:
            raise NonConvergent(
                f"impulse response still above tolerance after {_SAMPLE_CAP} samples"
            )
    return h


def frequency_response(num, den, omega) -> complex:
    """H evaluated at z = exp(i*omega).  ``omega`` is radians per sample;
    complex values are accepted (used internally for dc derivatives)."""
    b = _as_poly(num)
    a = _as_poly(den)
    z = cmath.exp(1j * omega)
    dv = a(z)
    if abs(dv) < 1e-12:
        raise PoleOnUnitCircle(f"denominator vanishes at omega = {omega!r}")
    return b(z) / dv


def white_noise_gain(num, den) -> float:
    """Output variance per unit white measurement-noise variance: the sum of
    squared impulse-response samples, truncated below 1e-12."""
    return sum(v * v for v in impulse_response(num, den, tol=1e-12))


def white_noise_gain_k2(pole: float, lag: float) -> float:
    """Closed-form white-noise gain of the order-2 smoother with both poles
    at ``pole`` and read-out lag ``lag``."""
    p = float(pole)
    q = float(lag)
    if not 0.0 <= p < 1.0:
        raise UnstablePoles(f"repeated pole must satisfy 0 <= p < 1, got {p!r}")
    d = p + p * q - q
    u = 1.0 + p
    return (1.0 - p) * (1.0 / u + 2.0 * d / u**2 + 2.0 * d * d / u**3)


def optimal_lag_k2(pole: float) -> float:
    """Lag minimizing the order-2 white-noise gain: (1 + 3p) / (2 (1 - p)).

    At this lag the numerator gains a zero at z = -1, nulling the response at
    the Nyquist frequency.
    """
    p = float(pole)
    if not 0.0 <= p < 1.0:
        raise UnstablePoles(f"repeated pole must satisfy 0 <= p < 1, got {p!r}")
    return 0.5 * (1.0 + 3.0 * p) / (1.0 - p)


def steady_state_step(num, den) -> float:
    """Final value of the unit-step response: H at z = 1."""
    b = _as_poly(num)
    a = _as_poly(den)
    a1 = sum(a.coeffs)
    if abs(a1) < 1e-12 * max(1.0, max(abs(c) for c in a.coeffs)):
        raise PoleAtOne("denominator vanishes at z = 1; no dc steady state")
    return sum(b.coeffs) / a1


def ramp_error(num, den, lag: float, ts: float, horizon: int) -> float:
    """Tracking error on the unit-slope ramp at sample ``horizon``.

    Feeds x[n] = n*ts through the recursion from a cold start and returns
    (horizon - lag)*ts - y[horizon]: what the lag-matched read-out should
    have produced minus what it did.  For an unbiased design this decays to
    roundoff once the start-up transient dies.
    """
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    ts = float(ts)
    xs = [n * ts for n in range(horizon + 1)]
    ys = lde_filter(num, den, xs)
    return (horizon - float(lag)) * ts - ys[horizon]


def flatness_targets(deriv: int, lag: float, ts: float, count: int) -> list[complex]:
    """dc derivatives (in omega) a perfectly-matched read-out would have.

    A filter that reproduces the ``deriv``-th derivative of the signal,
    evaluated ``lag`` samples back, has frequency response locally equal to
    (i*omega/ts)**deriv * exp(-i*lag*omega) around omega = 0; these are that
    function's derivatives: zero below order ``deriv``, then
    i**k * (-lag)**(k-deriv) * ts**(-deriv) * k!/(k-deriv)!.
    """
    q = float(lag)
    t = float(ts)
    out: list[complex] = []
    for k in range(count):
        if k < deriv:
            out.append(0j)
        else:
            val = (1j) ** k * (-q) ** (k - deriv) * t ** (-deriv)
            out.append(val * math.perm(k, deriv))
    return out


def _dc_derivatives(num, den, orders: int) -> list[complex]:
    """First ``orders`` derivatives of H(omega) at omega = 0.

    H extends analytically to complex omega, so the derivatives are read off
    Taylor coefficients computed by trapezoidal contour integration on a
    circle that stays well inside the nearest pole.  This is spectrally
    accurate and, unlike high-order difference stencils, does not lose the
    high derivatives to rounding.
    """
    b = _as_poly(num)
    a = _as_poly(den)
    dist = math.inf
    for root in _poly_roots(a):
        if root != 0:
            dist = min(dist, abs(cmath.log(root)))
    rho = 0.5 if math.isinf(dist) else max(min(0.5, 0.45 * dist), 1e-3)
    npts = 512
    samples = [
        frequency_response(b, a, rho * cmath.exp(2j * math.pi * j / npts))
        for j in range(npts)
    ]
    out: list[complex] = []
    factorial = 1.0
    for m in range(orders):
        if m:
            factorial *= m
        s = sum(
            samples[j] * cmath.exp(-2j * math.pi * m * j / npts)
            for j in range(npts)
        )
        out.append(factorial * s / (npts * rho**m))
    return out


def flatness_profile(
    num, den, deriv: int, lag: float, ts: float, orders: int
) -> list[tuple[complex, complex]]:
    """(target, measured) dc derivative pairs for orders 0 .. orders-1."""
    targets = flatness_targets(deriv, lag, ts, orders)
    measured = _dc_derivatives(num, den, orders)
    return list(zip(targets, measured))


def flatness_check(num, den, deriv: int, lag: float, ts: float, orders: int) -> float:
    """Largest deviation between measured and ideal dc derivatives over the
    first ``orders`` orders.  Small (roundoff-level) through order K-1 for a
    proper design; the order-K deviation is the price of finite memory."""
    return max(
        (abs(measured - target) for target, measured in
         flatness_profile(num, den, deriv, lag, ts, orders)),
        default=0.0,
    )


def step_response(result, n_max: int) -> list[float]:
    """Unit-step response y[0..n_max] of a design, run through the kinematic
    realization with the state initialized from the first sample."""
    ss = result.ss_kin
    state = realize.initialize_state(ss, 1.0)
    ys = [realize.read_output(ss, state)]
    for _ in range(n_max):
        ys.append(realize.step(ss, state, 1.0))
    return ys


def frequency_grid(num, den, points: int = 1024) -> list[tuple[float, complex]]:
    """(cycles-per-sample, response) pairs on a uniform grid over [0, 0.5]."""
    b = _as_poly(num)
    a = _as_poly(den)
    out = []
    for j in range(points):
        f = 0.5 * j / (points - 1)
        out.append((f, frequency_response(b, a, 2.0 * math.pi * f)))
    return out
