"""Klein-gap edges, gap width, and velocity-matching thresholds.

Everything is evaluated in rapidity form. With the incident kinetic
four-momentum written as ``(cosh w_g, sinh w_g)`` and ``v_m = tanh w_m``,

    (E_i - qV_1) - v_m (p_i - qA_1) = cosh(w_g - w_m) / cosh(w_m),

which stays accurate when ``v_m`` and ``v_g`` are both within 1e-16 of 1,
where the direct velocity form loses every significant digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import minimize_scalar

from .errors import DomainError, InvalidGapCondition
from .kinematics import IncidentState

#: incident rapidity whose group velocity is 1 - 1e-15
OMEGA_CEILING = math.atanh(1.0 - 1e-15)


@dataclass(frozen=True)
class GapSpec:
    qdV_plus: float
    qdV_minus: float
    width: float
    r_AV: float
    v_m: float


@dataclass(frozen=True)
class ThresholdPoint:
    qdV_th: float
    E_i: float
    v_m: float
    omega_g: float
    omega_m: float


def _modulation_rapidity(v_m: float | None, omega_m: float | None) -> float:
    if omega_m is not None:
        if v_m is not None:
            raise TypeError("pass either v_m or omega_m, not both")
        if not omega_m >= 0.0:
            raise DomainError(f"modulation rapidity must be non-negative, got {omega_m}")
        return float(omega_m)
    if v_m is None:
        raise TypeError("one of v_m or omega_m is required")
    if not 0.0 <= v_m < 1.0:
        raise DomainError(f"modulation velocity must satisfy 0 <= v_m < 1, got {v_m}")
    return math.atanh(v_m)


def _edges(omega_g: float, omega_m: float, r_AV: float) -> tuple[float, float, float]:
    ch = math.cosh(omega_m)
    denom = 1.0 - math.tanh(omega_m) * r_AV
    dw = omega_g - omega_m
    # cosh(dw) - 1 = 2 sinh^2(dw/2) avoids cancellation near velocity matching
    lower = 2.0 * math.sinh(0.5 * dw) ** 2 / ch / denom
    upper = (math.cosh(dw) + 1.0) / ch / denom
    width = 2.0 / ch / denom
    return lower, upper, width


def gap_edges(
    incident: IncidentState,
    v_m: float | None = None,
    r_AV: float = -1.0,
    *,
    omega_m: float | None = None,
) -> GapSpec:
    """Scalar-step offsets bounding the evanescent window.

    The vector-potential offset follows the scalar one as ``qdA = r_AV * qdV``.
    Region-1 potentials are shifted out, so the edges are offsets from qV_1.
    The modulation may be given as a rapidity ``omega_m`` instead of ``v_m``.

    Raises:
        InvalidGapCondition: if ``r_AV >= 1``.
    """
    if not r_AV < 1.0:
        raise InvalidGapCondition(f"a Klein gap requires r_AV < 1, got {r_AV}")
    w_m = _modulation_rapidity(v_m, omega_m)
    lower, upper, width = _edges(incident.rapidity, w_m, r_AV)
    return GapSpec(lower, upper, width, r_AV, math.tanh(w_m))


def gap_width(v_m: float, r_AV: float) -> float:
    """Klein-gap width (2/gamma_m) / (1 - v_m r_AV)."""
    if not r_AV < 1.0:
        raise InvalidGapCondition(f"a Klein gap requires r_AV < 1, got {r_AV}")
    w_m = _modulation_rapidity(v_m, None)
    return 2.0 / math.cosh(w_m) / (1.0 - v_m * r_AV)


def gap_width_limit(v_m: float) -> float:
    """Supremum of the gap width over r_AV < 1 at fixed v_m, 2 e^{w_m}."""
    return 2.0 * math.exp(_modulation_rapidity(v_m, None))


def gap_width_extrema(r_AV: float) -> tuple[float, float]:
    """Velocity maximising the gap width at fixed r_AV, and that width.

    For ``r_AV <= 0`` the width decreases monotonically from 2 at v_m = 0.
    """
    if not r_AV < 1.0:
        raise InvalidGapCondition(f"a Klein gap requires r_AV < 1, got {r_AV}")
    if r_AV <= 0.0:
        return 0.0, 2.0
    return r_AV, 2.0 / math.sqrt((1.0 - r_AV) * (1.0 + r_AV))


def velocity_matching_threshold(v_g: float | None = None, *, omega_g: float | None = None) -> float:
    """Threshold step 2 e^{-w_g} reached when v_m = v_g at r_AV = -1."""
    if omega_g is None:
        if v_g is None or not 0.0 < v_g < 1.0:
            raise DomainError(f"group velocity must lie in (0, 1), got {v_g}")
        omega_g = math.atanh(v_g)
    elif not omega_g > 0.0:
        raise DomainError(f"rapidity must be positive, got {omega_g}")
    return 2.0 * math.exp(-omega_g)


def field_ratio(
    v_g: float | None = None,
    L_over_lambdaC: float = 1.0,
    *,
    omega_g: float | None = None,
) -> float:
    """Lab field over the critical field for the threshold drop across length L.

    ``L_over_lambdaC`` is the step thickness in reduced Compton wavelengths.
    """
    if not L_over_lambdaC > 0.0:
        raise DomainError(f"thickness must be positive, got {L_over_lambdaC}")
    return velocity_matching_threshold(v_g, omega_g=omega_g) / L_over_lambdaC


def threshold_point(
    incident: IncidentState,
    v_m: float | None = None,
    r_AV: float = -1.0,
    *,
    omega_m: float | None = None,
) -> ThresholdPoint:
    gap = gap_edges(incident, v_m, r_AV, omega_m=omega_m)
    w_m = _modulation_rapidity(v_m, omega_m)
    return ThresholdPoint(gap.qdV_minus, incident.E_i, gap.v_m, incident.rapidity, w_m)


def min_threshold_over_energy(v_m: float, r_AV: float = -1.0) -> tuple[float, float]:
    """Smallest Klein threshold over incident energies that catch the front.

    Bounded Brent minimisation in incident rapidity over (w_m, w_max]. The
    infimum sits on the excluded boundary v_g = v_m, so the located point is
    just inside it.

    Returns:
        ``(E_i - qV_1, qdV_th)`` at the located minimum.
    """
    if not r_AV < 1.0:
        raise InvalidGapCondition(f"a Klein gap requires r_AV < 1, got {r_AV}")
    w_m = _modulation_rapidity(v_m, None)
    w_hi = max(OMEGA_CEILING, w_m + 20.0)

    def objective(w_g: float) -> float:
        return _edges(w_g, w_m, r_AV)[1]

    res = minimize_scalar(
        objective,
        bounds=(w_m, w_hi),
        method="bounded",
        options={"xatol": 1e-10 * max(1.0, w_m)},
    )
    w_g = float(res.x)
    if not w_g > w_m:
        w_g = math.nextafter(w_m, math.inf)
    return math.cosh(w_g), objective(w_g)


__all__ = [
    "GapSpec",
    "ThresholdPoint",
    "field_ratio",
    "gap_edges",
    "gap_width",
    "gap_width_extrema",
    "gap_width_limit",
    "min_threshold_over_energy",
    "threshold_point",
    "velocity_matching_threshold",
]
