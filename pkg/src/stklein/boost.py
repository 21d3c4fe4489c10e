"""Longitudinal Lorentz boosts of four-momenta and Dirac spinors.

Only the 2x2 block acting on the decoupled 1+1D spinor is used in the
scattering formulas. With the z-boost written in Dirac-Pauli form as
``S_z = c1 - alpha^3 c2``, components (1, 3) and (2, 4) of a four-spinor
mix independently; the (1, 3) pair is the two-spinor ``(u1, u2)`` of the
reduced Hamiltonian, transformed by ``[[c1, -c2], [-c2, c1]]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kinematics import StepProblem, comoving_energy
from .scattering import ScatterResult


@dataclass(frozen=True)
class BoostZ:
    omega: float

    @classmethod
    def from_velocity(cls, v: float) -> BoostZ:
        if not -1.0 < v < 1.0:
            raise DomainError(f"boost velocity must satisfy |v| < 1, got {v}")
        return cls(math.atanh(v))

    @property
    def gamma(self) -> float:
        return math.cosh(self.omega)

    @property
    def beta(self) -> float:
        return math.tanh(self.omega)

    @property
    def c1(self) -> float:
        return math.cosh(0.5 * self.omega)

    @property
    def c2(self) -> float:
        return math.sinh(0.5 * self.omega)

    def determinant(self) -> float:
        """c1^2 - c2^2, factored as e^{w/2} e^{-w/2} so it survives large w."""
        return math.exp(0.5 * self.omega) * math.exp(-0.5 * self.omega)

    def lorentz_matrix(self) -> np.ndarray:
        """Coordinate boost acting on contravariant (t, z) or (E, p)."""
        ch, sh = math.cosh(self.omega), math.sinh(self.omega)
        return np.array([[ch, -sh], [-sh, ch]])

    def spinor_matrix(self) -> np.ndarray:
        c1, c2 = self.c1, self.c2
        return np.array([[c1, -c2], [-c2, c1]])

    def spinor_matrix_4x4(self) -> np.ndarray:
        c1, c2 = self.c1, self.c2
        return np.array(
            [
                [c1, 0.0, -c2, 0.0],
                [0.0, c1, 0.0, c2],
                [-c2, 0.0, c1, 0.0],
                [0.0, c2, 0.0, c1],
            ]
        )

    def apply(self, upper, lower) -> tuple[complex, complex]:
        c1, c2 = self.c1, self.c2
        return c1 * upper - c2 * lower, -c2 * upper + c1 * lower

    def compose(self, other: BoostZ) -> BoostZ:
        return BoostZ(self.omega + other.omega)

    def inverse(self) -> BoostZ:
        return BoostZ(-self.omega)


@dataclass(frozen=True)
class BoostedSpinor:
    upper: complex
    lower: complex
    E_prime: complex | float | None = None
    p_prime: complex | float | None = None

    @property
    def ratio(self) -> complex:
        return self.lower / self.upper


def boost_energy_momentum(E, p, v: float) -> tuple:
    """(E, p) seen from a frame moving at velocity v along z."""
    b = BoostZ.from_velocity(v)
    ch, sh = math.cosh(b.omega), math.sinh(b.omega)
    return ch * E - sh * p, ch * p - sh * E


def boost_spinor(gamma, v: float, E=None, p=None) -> BoostedSpinor:
    """Boost the plane-wave spinor (1, gamma); E and p ride along if given."""
    b = BoostZ.from_velocity(v)
    upper, lower = b.apply(1.0, gamma)
    E_prime = p_prime = None
    if E is not None and p is not None:
        E_prime, p_prime = boost_energy_momentum(E, p, v)
    return BoostedSpinor(upper, lower, E_prime, p_prime)


def _boosted_channels(problem: StepProblem, result: ScatterResult):
    b = BoostZ.from_velocity(problem.v_m)
    return (
        np.array(b.apply(1.0, result.gamma_i), dtype=complex),
        np.array(b.apply(1.0, result.gamma_r), dtype=complex),
        np.array(b.apply(1.0, result.gamma_t), dtype=complex),
    )


def comoving_amplitudes(problem: StepProblem, result: ScatterResult) -> tuple[complex, complex]:
    """Solve spinor continuity at the front directly in the comoving frame.

    ``psi'_i + r psi'_r = t psi'_t`` is a 2x2 linear system in (r, t).
    """
    s_i, s_r, s_t = _boosted_channels(problem, result)
    mat = np.column_stack([s_r, -s_t])
    r, t = np.linalg.solve(mat, -s_i)
    return complex(r), complex(t)


def verify_continuity(problem: StepProblem, result: ScatterResult) -> float:
    """Largest component mismatch of the boosted spinors at the front.

    Phases are common at the front because every channel shares one
    comoving energy, so only the spinor amplitudes are compared.
    """
    s_i, s_r, s_t = _boosted_channels(problem, result)
    left = s_i + result.r_amp * s_r
    right = result.t_amp * s_t
    return float(np.max(np.abs(left - right)))


def comoving_energy_spread(problem: StepProblem, result: ScatterResult) -> float:
    """max |E'_a - E'_i| over reflected and transmitted channels."""
    v = problem.v_m
    inc = problem.incident
    e_i = comoving_energy(inc.E_i, inc.p_i, v)
    others = [
        comoving_energy(ch.E, ch.p, v) for ch in (result.reflected, result.transmitted)
    ]
    return max(abs(e - e_i) for e in others)


__all__ = [
    "BoostZ",
    "BoostedSpinor",
    "boost_energy_momentum",
    "boost_spinor",
    "comoving_amplitudes",
    "comoving_energy_spread",
    "verify_continuity",
]
