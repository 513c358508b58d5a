"""Shared constants and helpers for the fixedgain test suite.

The frozen numbers here are the standing reference points the suite checks
against: a third-order design whose every intermediate is known in closed
form, the second-order noise-gain benchmark grid, and the matching
optimal-lag row.  Unit tests check them piecewise; the acceptance module
re-checks them end to end at its own tolerances.
"""

from __future__ import annotations

import pytest

from fixedgain import ObserverSpec, ProcessModel, design

# --- the reference third-order design: K=3, Ts=0.04, repeated pole 0.8,
#     read-out lagged two samples ---------------------------------------

REF_ORDER = 3
REF_TS = 0.04
REF_POLE = 0.8
REF_LAG = 2.0

# Gain column in companion coordinates and in kinematic coordinates.
REF_GAIN_PCF = (0.488, -1.080, 0.600)
REF_GAIN_KIN = (0.4880, 2.7000, 5.0000)

# Observer characteristic polynomial (z - 0.8)**3, descending powers.
REF_CHAR = (1.0, -2.400, 1.920, -0.512)

# Closed-loop transition in kinematic coordinates, exact rational entries.
REF_CLOSED_LOOP = (
    (0.512, 0.02048, 0.0004096),
    (-2.7, 0.892, 0.03784),
    (-5.0, -0.2, 0.996),
)
# Same matrix rounded to four decimals (how the constants are usually quoted).
REF_CLOSED_LOOP_4DP = (
    (0.5120, 0.0205, 0.0004),
    (-2.7000, 0.8920, 0.0378),
    (-5.0000, -0.2000, 0.9960),
)

# Similarity from companion to kinematic coordinates and its inverse.
REF_KIN_FROM_PCF = (
    (1.0, 0.0, 0.0),
    (-37.5, -12.5, 12.5),
    (625.0, 625.0, 625.0),
)
REF_PCF_FROM_KIN = (
    (1.0, 0.0, 0.0),
    (-2.0, -0.04, 0.0008),
    (1.0, 0.04, 0.0008),
)

# Input-gain column of the observable canonical form and the transfer
# numerator it induces (descending powers, constant term structurally zero).
REF_GAIN_OCF = (0.2000, -0.4800, 0.2880)
REF_NUMERATOR = (0.288, -0.480, 0.200, 0.000)

# First column of the kinematic-to-OCF transform (doubles as the OCF state
# that holds a unit first sample).
REF_OCF_FROM_KIN_COL0 = (0.7120, -1.6880, 1.0000)


@pytest.fixture
def reference_design():
    model = ProcessModel(REF_ORDER, REF_TS)
    return design(ObserverSpec.repeated(model, REF_POLE, lag=REF_LAG))


# --- second-order noise-gain benchmark: memory lengths l = 2,4,8,12,16
#     (pole p = exp(-1/l)), read-out lags q = 1, 0, -1 -------------------

BENCH_MEMORIES = (2.0, 4.0, 8.0, 12.0, 16.0)
BENCH_POLES_4DP = (0.6065, 0.7788, 0.8825, 0.9200, 0.9394)

# White-noise gain, rows indexed by lag q = 1, 0, -1; columns by memory.
BENCH_WNG = {
    1.0: (0.3185, 0.2268, 0.1338, 0.0940, 0.0724),
    0.0: (0.4997, 0.2809, 0.1484, 0.1007, 0.0762),
    -1.0: (0.7396, 0.3428, 0.1640, 0.1076, 0.0801),
}

# Noise-minimizing lag per memory column, and the gain achieved there.
BENCH_OPTIMAL_LAG = (3.58, 7.54, 15.52, 23.51, 31.51)
BENCH_OPTIMAL_WNG = (0.1225, 0.0622, 0.0312, 0.0208, 0.0156)


def max_abs_diff(got, expected) -> float:
    got = list(got)
    expected = list(expected)
    assert len(got) == len(expected)
    return max(abs(complex(g) - complex(e)) for g, e in zip(got, expected))
