import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from stklein.errors import InvalidGapCondition
from stklein.kinematics import IncidentState, Region, incident_from_energy
from stklein.oracle import radicand_root_scan, transmitted_radicand
from stklein.thresholds import (
    field_ratio,
    gap_edges,
    gap_width,
    gap_width_extrema,
    gap_width_limit,
    min_threshold_over_energy,
    threshold_point,
    velocity_matching_threshold,
)

INC4 = incident_from_energy(4.0, Region())


def test_static_gap_edges():
    gap = gap_edges(INC4, 0.0, -1.0)
    assert gap.qdV_plus == pytest.approx(3.0, abs=1e-12)
    assert gap.qdV_minus == pytest.approx(5.0, abs=1e-12)
    assert gap.width == 2.0


def test_gap_edges_shift_with_region1():
    inc = incident_from_energy(6.5, Region(2.5, 0.7))
    gap = gap_edges(inc, 0.0, -1.0)
    assert (gap.qdV_plus, gap.qdV_minus) == pytest.approx((3.0, 5.0), abs=1e-12)


def test_gap_edges_against_radicand_bisection():
    gap = gap_edges(INC4, 0.5, -1.0)
    f = lambda d: transmitted_radicand(INC4, Region(d, -d), 0.5)  # noqa: E731
    roots = radicand_root_scan(f, (0.0, 10.0))
    assert roots == pytest.approx([gap.qdV_plus, gap.qdV_minus], abs=1e-9)
    # frozen bisection values
    assert gap.qdV_plus == pytest.approx(0.7983219487412094, abs=1e-9)
    assert gap.qdV_minus == pytest.approx(1.9530224871205142, abs=1e-9)


def test_two_method_equality_random():
    rng = np.random.default_rng(8)
    for _ in range(200):
        eps = rng.uniform(1.1, 10.0)
        inc = incident_from_energy(eps, Region())
        v = rng.uniform(0.0, 0.95 * inc.group_velocity)
        r = rng.uniform(-2.0, 0.9)
        gap = gap_edges(inc, v, r)
        f = lambda d: transmitted_radicand(inc, Region(d, r * d), v)  # noqa: E731
        hi = gap.qdV_minus + 1.0
        roots = radicand_root_scan(f, (gap.qdV_plus - 1.0, hi))
        assert min(abs(x - gap.qdV_plus) for x in roots) < 1e-9
        assert min(abs(x - gap.qdV_minus) for x in roots) < 1e-9


def test_invalid_ratio():
    with pytest.raises(InvalidGapCondition):
        gap_edges(INC4, 0.2, 1.0)
    with pytest.raises(InvalidGapCondition):
        gap_width(0.2, 1.5)


@settings(max_examples=300, deadline=None)
@given(
    eps=st.floats(1.01, 1e6),
    frac=st.floats(0.0, 0.999),
    r=st.floats(-5.0, 0.99),
)
def test_width_identity(eps, frac, r):
    inc = incident_from_energy(eps, Region())
    v = frac * inc.group_velocity
    gap = gap_edges(inc, v, r)
    expected = 2.0 * math.sqrt((1 - v) * (1 + v)) / (1 - v * r)
    assert gap.width == pytest.approx(expected, rel=1e-12)
    # the edge difference cannot beat the rounding of the edges themselves
    tol = 1e-12 * max(1.0, gap.qdV_minus / 100.0)
    assert abs(gap.qdV_minus - gap.qdV_plus - expected) <= tol


def test_width_extrema():
    v, w = gap_width_extrema(0.6)
    assert (v, w) == pytest.approx((0.6, 2.5), abs=1e-12)
    res = minimize_scalar(lambda x: -gap_width(x, 0.6), bounds=(0.0, 0.99), method="bounded")
    assert res.x == pytest.approx(0.6, abs=1e-5)
    assert gap_width_extrema(0.0) == (0.0, 2.0)
    assert gap_width(0.0, 0.0) == 2.0


def test_width_limit_as_ratio_approaches_one():
    v = 0.7
    assert gap_width(v, 1 - 1e-9) == pytest.approx(gap_width_limit(v), rel=1e-8)
    assert gap_width_limit(v) == pytest.approx(2 * math.exp(math.atanh(v)), rel=1e-15)


def test_gap_closes_toward_light_speed():
    vs = 1 - np.logspace(-1, -12, 40)
    for r in (-1.0, 0.0, 0.5):
        ws = [gap_width(float(v), r) for v in vs if v > max(0.0, r)]
        assert all(b < a for a, b in zip(ws, ws[1:]))
        assert ws[-1] < 1e-4


def test_velocity_matching_threshold_examples():
    assert velocity_matching_threshold(0.6) == pytest.approx(1.0, abs=1e-15)
    assert velocity_matching_threshold(omega_g=1e-300) == pytest.approx(2.0)
    w = math.acosh(1e4)
    assert math.exp(-w) == pytest.approx(5e-5, rel=1e-4)
    assert velocity_matching_threshold(omega_g=w) == pytest.approx(1.0e-4, rel=1e-4)


def test_threshold_collapse_at_velocity_matching():
    for v_g in np.linspace(0.1, 1 - 1e-12, 60):
        w = math.atanh(v_g)
        inc = IncidentState.from_rapidity(w)
        gap = gap_edges(inc, r_AV=-1.0, omega_m=inc.rapidity)
        assert gap.qdV_minus == pytest.approx(2 * math.exp(-inc.rapidity), rel=1e-12)


@pytest.mark.parametrize("L, expected", [(0.5, 2.0e-4), (1.0, 1.0e-4), (2.0, 5.0e-5)])
def test_field_ratio(L, expected):
    assert field_ratio(omega_g=math.acosh(1e4), L_over_lambdaC=L) == pytest.approx(expected, rel=0.02)


@pytest.mark.parametrize(
    "n, quoted",
    [(2, 1.4e-1), (4, 1.4e-2), (7, 4.5e-4), (10, 1.4e-5)],
)
def test_minimum_threshold(n, quoted):
    e_min, th = min_threshold_over_energy(1 - 10.0**-n)
    assert th == pytest.approx(quoted, rel=0.05)
    # the infimum is the velocity-matching value 2 e^{-w_m}
    w_m = math.atanh(1 - 10.0**-n)
    assert th == pytest.approx(2 * math.exp(-w_m), rel=1e-6)
    assert e_min >= math.cosh(w_m) * (1 - 1e-9)


def test_threshold_point_fields():
    tp = threshold_point(INC4, 0.0)
    assert tp.qdV_th == pytest.approx(5.0, abs=1e-12)
    assert tp.omega_m == 0.0
