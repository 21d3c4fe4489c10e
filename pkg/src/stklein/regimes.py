"""Critical modulation velocities and admissible transmitted-branch selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError
from .kinematics import (
    Branch,
    IncidentState,
    Region,
    StepProblem,
    transmitted_channels,
)

#: velocities closer than this to a boundary are treated as on it
VELOCITY_ATOL = 1e-12


class RegimeLabel(str, Enum):
    SUBCRITICAL_PLUS = "subcritical_plus"
    ABOVE_UP_MIN_PLUS = "above_up_min_plus"
    KLEIN_GAP = "klein_gap"
    BELOW_LOW_MAX_MINUS = "below_low_max_minus"
    MINUS_ONLY = "minus_only"
    NO_CATCH_UP = "no_catch_up"
    INVALID_GAP_CONDITION = "invalid_gap_condition"


@dataclass(frozen=True)
class Regime:
    label: RegimeLabel
    selected_branch: Branch | None = None

    def __post_init__(self):
        if self.label in (RegimeLabel.KLEIN_GAP, RegimeLabel.NO_CATCH_UP) and self.selected_branch:
            raise ValueError(f"{self.label.value} cannot carry a transmitted branch")

    def __str__(self) -> str:
        return self.label.value


@dataclass(frozen=True)
class CriticalVelocities:
    """Slopes of the transition lines singled out in the dispersion diagram.

    Any entry may be ``None`` when the corresponding line does not exist.
    """

    v_up_min: float | None
    v_low_max: float | None
    v_up_tan: float | None
    v_low_tan: float | None

    def ordered(self) -> bool | None:
        """Whether v_up_min <= v_up_tan <= v_low_tan <= v_low_max holds.

        Returns ``None`` when some velocity is missing or outside (0, 1); the
        ordering only describes the upward-step geometry and is advisory.
        """
        vals = (self.v_up_min, self.v_up_tan, self.v_low_tan, self.v_low_max)
        if any(v is None or not 0.0 < v < 1.0 for v in vals):
            return None
        return all(a <= b + VELOCITY_ATOL for a, b in zip(vals, vals[1:]))

    def as_dict(self) -> dict[str, float | None]:
        return {
            "v_up_min": self.v_up_min,
            "v_low_max": self.v_low_max,
            "v_up_tan": self.v_up_tan,
            "v_low_tan": self.v_low_tan,
        }


def simple_critical_velocities(incident: IncidentState, region2: Region) -> tuple[float, float]:
    """Slopes from the incident point to the extrema of the second hyperbola.

    Returns:
        ``(v_up_min, v_low_max)``: lines through ``(qA_2, qV_2 + 1)`` and
        ``(qA_2, qV_2 - 1)`` respectively.
    """
    dp = incident.p_i - region2.qA
    if dp == 0.0:
        raise DomainError("vertical transition line: p_i - qA_2 = 0")
    dE = incident.E_i - region2.qV
    return (dE - 1.0) / dp, (dE + 1.0) / dp


def tangent_velocities(incident: IncidentState, region2: Region) -> tuple[float, float]:
    """Slopes of the two lines through the incident point tangent to medium 2.

    Both come from ``v^2 (k^2 + 1) - 2 v eps k + eps^2 - 1 = 0`` with
    ``k = p_i - qA_2`` and ``eps = E_i - qV_2``; the root taken with the minus
    sign is the upper-branch tangency, the other the lower-branch one.

    Raises:
        DomainError: when the discriminant is negative (no real tangent).
    """
    k = incident.p_i - region2.qA
    eps = incident.E_i - region2.qV
    disc = k * k - eps * eps + 1.0
    if disc < 0.0:
        raise DomainError("no real tangent from the incident point to the second hyperbola")
    a = k * k + 1.0
    b = k * eps
    s = math.sqrt(disc)
    # stable pair: the larger-magnitude root first, the other from the product c/a
    c = eps * eps - 1.0
    big = b + math.copysign(s, b) if b != 0.0 else s
    r_big = big / a
    r_small = c / big if big != 0.0 else 0.0
    if b >= 0.0:
        v_plus, v_minus = r_small, r_big  # b - s, b + s
    else:
        v_plus, v_minus = r_big, r_small
    return v_plus, v_minus


def critical_velocities(incident: IncidentState, region2: Region) -> CriticalVelocities:
    try:
        up_min, low_max = simple_critical_velocities(incident, region2)
    except DomainError:
        up_min = low_max = None
    try:
        up_tan, low_tan = tangent_velocities(incident, region2)
    except DomainError:
        up_tan = low_tan = None
    return CriticalVelocities(up_min, low_max, up_tan, low_tan)


def _select_branch(problem: StepProblem, plus, minus, geom) -> Branch:
    v = problem.v_m
    vg_plus = plus.group_velocity
    vg_minus = minus.group_velocity
    passing = [b for b, vg in ((Branch.PLUS, vg_plus), (Branch.MINUS, vg_minus)) if vg > v]
    if len(passing) == 1:
        return passing[0]
    # grazing or rounding-limited: the comoving energy sign decides the branch
    return Branch.PLUS if geom.W2 > 0.0 else Branch.MINUS


def classify(problem: StepProblem, channels=None) -> Regime:
    """Place a step problem in its velocity interval and pick the transmitted branch.

    The branch is the one whose group velocity exceeds ``v_m`` (it outruns the
    front); the label then records whether the competing root of the same
    dispersion branch also moves forward. ``channels`` may carry a
    precomputed ``transmitted_channels(problem)`` result.
    """
    inc = problem.incident
    v = problem.v_m
    if v >= inc.group_velocity:
        return Regime(RegimeLabel.NO_CATCH_UP)

    plus, minus, geom = channels if channels is not None else transmitted_channels(problem)
    branch = None if geom.evanescent else _select_branch(problem, plus, minus, geom)

    dV = problem.region2.qV - problem.region1.qV
    dA = problem.region2.qA - problem.region1.qA
    if dV > 0.0 and dA >= dV:
        return Regime(RegimeLabel.INVALID_GAP_CONDITION, branch)

    if branch is None:
        return Regime(RegimeLabel.KLEIN_GAP)
    if branch is Branch.PLUS:
        other_forward = minus.group_velocity > VELOCITY_ATOL
        label = RegimeLabel.ABOVE_UP_MIN_PLUS if other_forward else RegimeLabel.SUBCRITICAL_PLUS
    else:
        other_forward = plus.group_velocity > VELOCITY_ATOL
        label = RegimeLabel.BELOW_LOW_MAX_MINUS if other_forward else RegimeLabel.MINUS_ONLY
    return Regime(label, branch)


__all__ = [
    "CriticalVelocities",
    "Regime",
    "RegimeLabel",
    "classify",
    "critical_velocities",
    "simple_critical_velocities",
    "tangent_velocities",
]
