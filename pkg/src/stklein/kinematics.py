"""Dispersion relations and lab-frame channel kinematics at a moving step.

Natural units throughout (hbar = c = 1) with the electron mass set to 1, so
energies and momenta are in units of m and velocities in units of c.
Potentials enter only as the charge-weighted products qV and qA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError

#: relative tolerance on the incident mass shell
ON_SHELL_RTOL = 1e-12
#: radicand within TANGENCY_RTOL * max(1, W2**2) of zero counts as tangency
TANGENCY_RTOL = 1e-9


class Branch(str, Enum):
    PLUS = "plus"
    MINUS = "minus"
    REFLECTED = "reflected"


class Status(str, Enum):
    PROPAGATING = "propagating"
    EVANESCENT = "evanescent"


@dataclass(frozen=True)
class Region:
    """Uniform four-potential on one side of the interface.

    Attributes:
        qV: charge times scalar potential (energy units).
        qA: charge times longitudinal vector potential (momentum units).
    """

    qV: float = 0.0
    qA: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.qV) and math.isfinite(self.qA)):
            raise DomainError(f"potentials must be finite, got qV={self.qV}, qA={self.qA}")

    def shifted(self, dqV: float, dqA: float = 0.0) -> Region:
        return Region(self.qV + dqV, self.qA + dqA)


@dataclass(frozen=True)
class IncidentState:
    """Forward-moving positive-energy plane wave in the first medium."""

    E_i: float
    p_i: float
    region: Region = Region()

    def __post_init__(self):
        eps = self.E_i - self.region.qV
        k = self.p_i - self.region.qA
        if not (math.isfinite(eps) and math.isfinite(k)):
            raise DomainError("incident energy and momentum must be finite")
        if abs(eps * eps - k * k - 1.0) > ON_SHELL_RTOL * max(1.0, eps * eps):
            raise DomainError(f"incident state ({self.E_i}, {self.p_i}) is off-shell")
        if eps < 1.0 - ON_SHELL_RTOL:
            raise DomainError("incident state must lie on the positive-energy branch")
        if not k > 0.0:
            raise DomainError("incident electron must move forward (p_i - qA_1 > 0)")

    @classmethod
    def from_rapidity(cls, omega: float, region: Region = Region()) -> IncidentState:
        """Build the state whose kinetic four-momentum is (cosh w, sinh w)."""
        return cls(region.qV + math.cosh(omega), region.qA + math.sinh(omega), region)

    @property
    def kinetic_energy(self) -> float:
        return self.E_i - self.region.qV

    @property
    def kinetic_momentum(self) -> float:
        return self.p_i - self.region.qA

    @property
    def group_velocity(self) -> float:
        return self.kinetic_momentum / self.kinetic_energy

    @property
    def rapidity(self) -> float:
        return math.asinh(self.kinetic_momentum)


@dataclass(frozen=True)
class StepProblem:
    """Incident electron meeting a step between two regions moving at v_m.

    ``v_m = 0`` is accepted and reproduces the static step.
    """

    region1: Region
    region2: Region
    v_m: float
    incident: IncidentState

    def __post_init__(self):
        if not (0.0 <= self.v_m < 1.0):
            raise DomainError(f"modulation velocity must satisfy 0 <= v_m < 1, got {self.v_m}")
        if self.incident.region != self.region1:
            raise DomainError("incident state must live in region1")

    @classmethod
    def build(
        cls,
        E_i: float,
        region1: Region,
        region2: Region,
        v_m: float,
    ) -> StepProblem:
        return cls(region1, region2, v_m, incident_from_energy(E_i, region1))

    @property
    def gamma_m(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.v_m) * (1.0 + self.v_m))

    @property
    def gamma_m_sq(self) -> float:
        return 1.0 / ((1.0 - self.v_m) * (1.0 + self.v_m))

    @property
    def comoving_energy(self) -> float:
        """gamma_m (E_i - v_m p_i), shared by every channel."""
        inc = self.incident
        return self.gamma_m * (inc.E_i - self.v_m * inc.p_i)


@dataclass(frozen=True)
class TransitionGeometry:
    W1: float
    W2: float
    radicand: float

    @property
    def tolerance(self) -> float:
        return TANGENCY_RTOL * max(1.0, self.W2 * self.W2)

    @property
    def evanescent(self) -> bool:
        return self.radicand < -self.tolerance

    @property
    def tangent(self) -> bool:
        return abs(self.radicand) <= self.tolerance


@dataclass(frozen=True)
class ChannelSolution:
    """One outgoing channel; E and p are complex for evanescent channels."""

    E: complex | float
    p: complex | float
    branch: Branch
    status: Status
    region: Region

    @property
    def group_velocity(self) -> float:
        return group_velocity(self.E, self.p, self.region)


def dispersion_momentum(E: float, region: Region, sign: int = 1) -> float:
    """Momentum on the mass shell ``(E - qV)^2 = (p - qA)^2 + 1``.

    Raises:
        DomainError: if ``|E - qV| < 1`` (the momentum would be imaginary).
    """
    eps = E - region.qV
    rad = (eps - 1.0) * (eps + 1.0)
    if rad < 0.0:
        raise DomainError(f"E - qV = {eps} lies inside the mass gap; use evanescent handling")
    return math.copysign(1.0, sign) * math.sqrt(rad) + region.qA


def incident_from_energy(E_i: float, region1: Region) -> IncidentState:
    if E_i - region1.qV < 1.0:
        raise DomainError(f"E_i - qV_1 = {E_i - region1.qV} is below the positive branch minimum")
    return IncidentState(E_i, dispersion_momentum(E_i, region1, +1), region1)


def group_velocity(E, p, region: Region) -> float:
    """Slope dE/dp = (p - qA)/(E - qV) of the dispersion hyperbola."""
    eps = E - region.qV
    if eps == 0:
        raise DomainError("group velocity undefined at E - qV = 0")
    return (p - region.qA) / eps


def transition_geometry(problem: StepProblem) -> TransitionGeometry:
    inc = problem.incident
    v = problem.v_m
    r1, r2 = problem.region1, problem.region2
    W1 = v * (inc.E_i - r1.qV) - (inc.p_i - r1.qA)
    W2 = (inc.E_i - r2.qV) - v * (inc.p_i - r2.qA)
    radicand = W2 * W2 - (1.0 - v) * (1.0 + v)
    return TransitionGeometry(W1, W2, radicand)


def reflected_channel(problem: StepProblem, geom: TransitionGeometry | None = None) -> ChannelSolution:
    inc = problem.incident
    g2 = problem.gamma_m_sq
    W1 = (geom or transition_geometry(problem)).W1
    E_r = inc.E_i + 2.0 * g2 * problem.v_m * W1
    p_r = inc.p_i + 2.0 * g2 * W1
    return ChannelSolution(E_r, p_r, Branch.REFLECTED, Status.PROPAGATING, problem.region1)


def transmitted_channels(
    problem: StepProblem,
) -> tuple[ChannelSolution, ChannelSolution, TransitionGeometry]:
    """Both roots of the oblique transition into the second medium.

    A negative radicand beyond the tangency band makes both roots evanescent;
    the square root is then taken as ``+i*sqrt(-radicand)`` so that the plus
    root decays ahead of the front in the comoving frame. Inside the band the
    square root is clamped to zero and the channel is reported as grazing.
    """
    geom = transition_geometry(problem)
    v = problem.v_m
    g2 = problem.gamma_m_sq
    r2 = problem.region2
    if geom.evanescent:
        root: complex | float = 1j * math.sqrt(-geom.radicand)
        status = Status.EVANESCENT
    else:
        root = math.sqrt(max(geom.radicand, 0.0))
        status = Status.PROPAGATING

    inc = problem.incident
    # g2*W2 + qV2 rewritten as E_i + g2*v*(v*eps2 - k2): exact at v_m = 0
    shift = v * (inc.E_i - r2.qV) - (inc.p_i - r2.qA)
    centre_p = g2 * v * geom.W2 + r2.qA
    plus = ChannelSolution(
        inc.E_i + g2 * v * (shift + root), centre_p + g2 * root, Branch.PLUS, status, r2
    )
    minus = ChannelSolution(
        inc.E_i + g2 * v * (shift - root), centre_p - g2 * root, Branch.MINUS, status, r2
    )
    return plus, minus, geom


def on_shell_residual(E, p, region: Region) -> float:
    """|(E - qV)^2 - (p - qA)^2 - 1|, relative to max(1, (E - qV)^2)."""
    eps = E - region.qV
    k = p - region.qA
    return abs(eps * eps - k * k - 1.0) / max(1.0, abs(eps) ** 2)


def comoving_energy(E, p, v_m: float) -> complex | float:
    g = 1.0 / math.sqrt((1.0 - v_m) * (1.0 + v_m))
    return g * (E - v_m * p)


def comoving_momentum(E, p, v_m: float) -> complex | float:
    g = 1.0 / math.sqrt((1.0 - v_m) * (1.0 + v_m))
    return g * (p - v_m * E)


__all__ = [
    "Branch",
    "ChannelSolution",
    "IncidentState",
    "Region",
    "Status",
    "StepProblem",
    "TransitionGeometry",
    "comoving_energy",
    "comoving_momentum",
    "dispersion_momentum",
    "group_velocity",
    "incident_from_energy",
    "on_shell_residual",
    "reflected_channel",
    "transition_geometry",
    "transmitted_channels",
]
