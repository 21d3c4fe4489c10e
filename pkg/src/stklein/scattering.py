"""Spinor-ratio amplitudes, worldline-projected fluxes and R/T probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConsistencyError, DegenerateChannels, DomainError, NoScattering
from .kinematics import (
    ChannelSolution,
    Region,
    Status,
    StepProblem,
    reflected_channel,
    transmitted_channels,
)
from .regimes import Regime, RegimeLabel, classify

_SMALL_DENOMINATOR = 1e-12
#: internal guard on the evanescent-flux identity; tests check the tighter 1e-10
_GAP_GUARD = 1e-8

CSV_COLUMNS = (
    "E_i",
    "p_i",
    "qV1",
    "qA1",
    "qV2",
    "qA2",
    "v_m",
    "regime",
    "Re(r)",
    "Im(r)",
    "Re(t)",
    "Im(t)",
    "R",
    "T",
)


def gamma_ratio(E, p, region: Region) -> complex | float:
    """Lower-to-upper spinor component ratio of a plane wave.

    The two algebraically equal forms ``(eps - 1)/k`` and ``k/(eps + 1)`` are
    chosen by conditioning: the second on the positive-energy side, the first
    on the negative one, switching when the chosen denominator vanishes.
    """
    eps = E - region.qV
    k = p - region.qA
    forms = ((k, eps + 1.0), (eps - 1.0, k))
    if getattr(eps, "real", eps) < 0.0:
        forms = forms[::-1]
    for num, den in forms:
        if abs(den) >= _SMALL_DENOMINATOR:
            return num / den
    raise DomainError(f"spinor ratio undefined at E - qV = {eps}, p - qA = {k}")


def amplitudes(gamma_i, gamma_r, gamma_t) -> tuple[complex, complex]:
    """Reflection and transmission amplitudes from spinor continuity.

    Solves ``1 + r = t`` and ``G_i + r G_r = t G_t``.
    """
    den = gamma_t - gamma_r
    if den == 0:
        raise DegenerateChannels("transmitted and reflected spinors coincide")
    r = (gamma_i - gamma_t) / den
    t = (gamma_i - gamma_r) / den
    return complex(r), complex(t)


def channel_flux(gamma, amp, v_m: float) -> float:
    """Current of ``amp * (1, gamma)`` projected on the front normal (-v_m, 1)."""
    g = complex(gamma)
    return abs(amp) ** 2 * (2.0 * g.real - v_m * (1.0 + abs(g) ** 2))


@dataclass(frozen=True)
class ScatterResult:
    problem: StepProblem
    regime: Regime
    reflected: ChannelSolution
    transmitted: ChannelSolution
    gamma_i: float
    gamma_r: float
    gamma_t: complex | float
    r_amp: complex
    t_amp: complex
    j_i: float
    j_r: float
    j_t: float
    R: float
    T: float

    @property
    def continuity_residuals(self) -> tuple[float, float]:
        """|1 + r - t| and |G_i + r G_r - t G_t|."""
        r, t = self.r_amp, self.t_amp
        return (
            abs(1.0 + r - t),
            abs(self.gamma_i + r * self.gamma_r - t * self.gamma_t),
        )

    def as_row(self) -> dict[str, object]:
        return problem_row(self.problem) | {
            "regime": self.regime.label.value,
            "Re(r)": self.r_amp.real,
            "Im(r)": self.r_amp.imag,
            "Re(t)": self.t_amp.real,
            "Im(t)": self.t_amp.imag,
            "R": self.R,
            "T": self.T,
        }


def problem_row(problem: StepProblem) -> dict[str, object]:
    """Input half of a result row; outputs default to NaN."""
    nan = math.nan
    return {
        "E_i": problem.incident.E_i,
        "p_i": problem.incident.p_i,
        "qV1": problem.region1.qV,
        "qA1": problem.region1.qA,
        "qV2": problem.region2.qV,
        "qA2": problem.region2.qA,
        "v_m": problem.v_m,
        "regime": "",
        "Re(r)": nan,
        "Im(r)": nan,
        "Re(t)": nan,
        "Im(t)": nan,
        "R": nan,
        "T": nan,
    }


def scatter(problem: StepProblem, regime: Regime | None = None) -> ScatterResult:
    """Full reflection/transmission solution for one step problem.

    Raises:
        NoScattering: the electron cannot catch up with the front.
        DegenerateChannels: reflected and transmitted spinors coincide.
    """
    if problem.v_m >= problem.incident.group_velocity:
        raise NoScattering("electron cannot catch up with the modulation front")
    channels = transmitted_channels(problem)
    if regime is None:
        regime = classify(problem, channels)
    if regime.label is RegimeLabel.NO_CATCH_UP:
        raise NoScattering("electron cannot catch up with the modulation front")

    v = problem.v_m
    plus, minus, geom = channels
    refl = reflected_channel(problem, geom)
    if regime.selected_branch is None:
        # decaying evanescent root
        trans = plus
    else:
        trans = plus if regime.selected_branch is plus.branch else minus

    inc = problem.incident
    g_i = gamma_ratio(inc.E_i, inc.p_i, problem.region1)
    g_r = gamma_ratio(refl.E, refl.p, problem.region1)
    j_i = channel_flux(g_i, 1.0, v)
    if not j_i > 0.0:
        raise NoScattering(f"incident flux through the front is not positive (j_i = {j_i})")
    try:
        g_t = gamma_ratio(trans.E, trans.p, problem.region2)
    except DomainError:
        # static band edge eps = -1, k = 0: spinor (0, 1), limit G_t -> inf
        g_t = complex(math.inf)
        r, t = -1.0 + 0j, 0j
        j_t = 0.0
    else:
        r, t = amplitudes(g_i, g_r, g_t)
        j_t = channel_flux(g_t, t, v)
    j_r = channel_flux(g_r, r, v)
    # reflected flux crosses the front backwards, so j_r < 0
    R = -j_r / j_i
    T = j_t / j_i

    if trans.status is Status.EVANESCENT:
        if abs(R - 1.0) > _GAP_GUARD or abs(T) > _GAP_GUARD:
            raise ConsistencyError(f"evanescent channel carries flux: R={R}, T={T}")
        R, T = 1.0, 0.0

    return ScatterResult(
        problem=problem,
        regime=regime,
        reflected=refl,
        transmitted=trans,
        gamma_i=g_i,
        gamma_r=g_r,
        gamma_t=g_t,
        r_amp=r,
        t_amp=t,
        j_i=j_i,
        j_r=j_r,
        j_t=j_t,
        R=R,
        T=T,
    )


__all__ = [
    "CSV_COLUMNS",
    "ScatterResult",
    "amplitudes",
    "channel_flux",
    "gamma_ratio",
    "problem_row",
    "scatter",
]
