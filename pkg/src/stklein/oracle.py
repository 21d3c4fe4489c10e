"""Independent numerical checks for the closed-form kinematics and amplitudes.

None of these routines call the closed forms they are meant to verify:
channel roots come from a line/hyperbola quadratic, tangencies and gap
edges from bracketed bisection, and static amplitudes from a direct
eigenvector-based matching solve.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import EvanescentStatic, NoRoot
from .kinematics import IncidentState, Region, StepProblem, incident_from_energy

PRESCAN_SAMPLES = 1024
BISECT_XTOL = 1e-12


@dataclass(frozen=True)
class LineHyperbolaProblem:
    """Line through ``anchor = (p, E)`` with slope ``slope`` against a unit hyperbola.

    The hyperbola ``(E - qV)^2 - (p - qA)^2 = 1`` is centred on
    ``(qA, qV)`` of ``hyperbola``.
    """

    anchor: tuple[float, float]
    slope: float
    hyperbola: Region


def solve_quadratic(a: float, b: float, c: float, rtol: float = 1e-12) -> list[float]:
    """Real roots of ``a x^2 + b x + c`` without cancellation, ascending.

    A discriminant within ``rtol * b^2`` of zero is reported as one double root.
    """
    disc = b * b - 4.0 * a * c
    if abs(disc) <= rtol * b * b:
        return [-b / (2.0 * a)]
    if disc < 0.0:
        return []
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    roots = [q / a, c / q] if q != 0.0 else [0.0, 0.0]
    return sorted(roots)


def intersect_line_hyperbola(problem: LineHyperbolaProblem) -> list[tuple[float, float]]:
    """Intersection points ``(p, E)`` in ascending p: none, one tangency, or two."""
    p0, E0 = problem.anchor
    n = problem.slope
    h, k = problem.hyperbola.qA, problem.hyperbola.qV
    c = E0 - n * p0
    # (y - k)^2/a^2 - (x - h)^2/b^2 = 1 with a = b = 1, y = n x + c
    A = n * n - 1.0
    B = 2.0 * n * (c - k) + 2.0 * h
    C = (c - k) ** 2 - (h * h + 1.0)
    return [(x, n * x + c) for x in solve_quadratic(A, B, C)]


def radicand_root_scan(
    f: Callable[[float], float],
    bracket: tuple[float, float],
    samples: int = PRESCAN_SAMPLES,
) -> list[float]:
    """All sign changes of ``f`` on a uniform pre-scan, refined by bisection.

    Raises:
        NoRoot: if no sample pair brackets a sign change.
    """
    lo, hi = bracket
    xs = np.linspace(lo, hi, samples)
    fs = [f(float(x)) for x in xs]
    roots: list[float] = []
    for i in range(samples - 1):
        a, b = float(xs[i]), float(xs[i + 1])
        fa, fb = fs[i], fs[i + 1]
        if fa == 0.0:
            if not roots or roots[-1] != a:
                roots.append(a)
        elif fa * fb < 0.0:
            roots.append(bisect(f, a, b, xtol=BISECT_XTOL))
    if fs[-1] == 0.0:
        roots.append(float(xs[-1]))
    if not roots:
        raise NoRoot(f"no sign change on [{lo}, {hi}]")
    return roots


def transmitted_radicand(incident: IncidentState, region2: Region, v_m: float) -> float:
    """``W2^2 - 1/gamma_m^2`` for the oblique transition at velocity v_m."""
    w2 = (incident.E_i - region2.qV) - v_m * (incident.p_i - region2.qA)
    return w2 * w2 - (1.0 - v_m * v_m)


def _spinor(eps: float, k: float) -> np.ndarray:
    """Null vector of ``[[1 - eps, k], [k, -(1 + eps)]]`` via SVD."""
    mat = np.array([[1.0 - eps, k], [k, -(1.0 + eps)]])
    _, _, vh = np.linalg.svd(mat)
    return vh[-1].conj()


def _current(u: np.ndarray) -> float:
    """psi^dagger sigma_x psi."""
    return float(2.0 * np.real(np.conj(u[0]) * u[1]))


def static_matching_solve(
    E_i: float, region1: Region, region2: Region
) -> tuple[complex, complex, float, float]:
    """Amplitudes and probabilities at a static step by direct spinor matching.

    The transmitted momentum is the root whose group velocity points along
    +z: positive on the upper continuum, negative on the lower one.

    Raises:
        EvanescentStatic: if ``|E_i - qV_2| < 1``.
    """
    eps1 = E_i - region1.qV
    k1 = math.sqrt((eps1 - 1.0) * (eps1 + 1.0))
    eps2 = E_i - region2.qV
    rad2 = (eps2 - 1.0) * (eps2 + 1.0)
    if rad2 < 0.0:
        raise EvanescentStatic(f"E_i - qV_2 = {eps2} lies inside the static gap")
    k2 = math.copysign(math.sqrt(rad2), eps2)

    u_i = _spinor(eps1, k1)
    u_r = _spinor(eps1, -k1)
    u_t = _spinor(eps2, k2)
    # u_i + r u_r = t u_t
    r, t = np.linalg.solve(np.column_stack([u_r, -u_t]), -u_i)
    j_i = _current(u_i)
    R = -abs(r) ** 2 * _current(u_r) / j_i
    T = abs(t) ** 2 * _current(u_t) / j_i
    # amplitudes referred to the (1, Gamma) normalisation used elsewhere
    r_norm = complex(r * u_r[0] / u_i[0])
    t_norm = complex(t * u_t[0] / u_i[0])
    return r_norm, t_norm, float(R), float(T)


def comoving_static_solve(problem: StepProblem) -> tuple[complex, complex, float, float]:
    """Moving-step probabilities from a static solve in the front's rest frame.

    Potentials transform as the four-vector (qV, qA); the projected flux
    through the front equals the comoving longitudinal current up to a
    common factor, so R and T carry over unchanged. Amplitudes are returned
    in the comoving spinor normalisation.
    """
    v = problem.v_m
    g = 1.0 / math.sqrt((1.0 - v) * (1.0 + v))

    def boosted(reg: Region) -> Region:
        return Region(g * (reg.qV - v * reg.qA), g * (reg.qA - v * reg.qV))

    inc = problem.incident
    E_prime = g * (inc.E_i - v * inc.p_i)
    return static_matching_solve(E_prime, boosted(problem.region1), boosted(problem.region2))


def random_problems(
    rng: np.random.Generator,
    n: int,
    *,
    catch_up_margin: float = 1e-3,
) -> list[StepProblem]:
    """Random scattering configurations with the front safely overtaken.

    ``v_m`` is drawn from ``[0, (1 - catch_up_margin) v_g]``; the margin keeps
    the incident flux through the front away from zero, where R and T become
    ratios of rounding-limited differences.
    """
    out = []
    for _ in range(n):
        eps = rng.uniform(1.05, 10.0)
        qv1, qa1 = rng.uniform(-3.0, 3.0, size=2)
        dv = rng.uniform(-3.0, 12.0)
        da = rng.uniform(-5.0, 5.0)
        r1 = Region(float(qv1), float(qa1))
        r2 = Region(float(qv1 + dv), float(qa1 + da))
        inc = incident_from_energy(float(qv1 + eps), r1)
        v = rng.uniform(0.0, (1.0 - catch_up_margin) * inc.group_velocity)
        out.append(StepProblem(r1, r2, float(v), inc))
    return out


__all__ = [
    "LineHyperbolaProblem",
    "comoving_static_solve",
    "intersect_line_hyperbola",
    "radicand_root_scan",
    "random_problems",
    "solve_quadratic",
    "static_matching_solve",
    "transmitted_radicand",
]
