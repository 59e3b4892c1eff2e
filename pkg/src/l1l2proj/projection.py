"""Euclidean projections onto intersections of l1 and l2 balls/spheres.

Three intersection geometries are supported, each with a signed and a
nonnegative-restricted variant:

* ``b1b2``: l1 ball of radius t with the unit l2 ball,
* ``b1s2``: l1 ball of radius t with the unit l2 sphere,
* ``s1s2``: l1 sphere of radius t with the unit l2 sphere.

The nonnegative solvers implement the closed-form case analysis; all
nontrivial cases reduce to one root of the residual phi, delegated to
:mod:`l1l2proj.rootfind`.  Signed problems map to the nonnegative one on
the componentwise absolute value, then restore the signs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .auxiliary import compare_count_tsq, compute_stats, eval_phi, min_count_meeting_radius
from .errors import Infeasible, InvalidRadius, PreconditionFailed
from .rootfind import (
    RootResult,
    TOL_DEFAULT,
    general_bracket,
    initial_bracket,
    psi_root,
    solve_phi,
)

_RADIUS_MSG = "infeasible radius: t must lie in (1, sqrt(n))"


class Geometry(enum.Enum):
    BALL_BALL = "b1b2"
    BALL_SPHERE = "b1s2"
    SPHERE_SPHERE = "s1s2"


@dataclass(frozen=True)
class ProblemKind:
    """Intersection geometry plus the sign restriction flag."""

    geometry: Geometry
    nonnegative: bool = False


@dataclass
class Solution:
    """Projection result with multipliers and the dispatch case label.

    ``lambda_star`` and ``mu_star`` certify optimality through the partial
    Lagrangian dual (see :func:`dual_value`).  ``unique`` is False when the
    problem admits several minimizers, in which case ``x`` is one canonical
    representative.  ``iterations`` counts root-solver iterations (0 for
    closed-form cases).
    """

    x: np.ndarray
    lambda_star: float
    mu_star: float
    case_label: str
    unique: bool
    iterations: int


def _as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("empty input vector")
    return v


def _require_sphere_radius(n: int, t: float) -> None:
    if not 1.0 < t < math.sqrt(n):
        raise InvalidRadius(_RADIUS_MSG)


def canonical_sphere_point(m: int, t: float) -> np.ndarray:
    """Deterministic point with sum t and sum of squares 1 on m slots.

    Uses ceil(t**2) slots: one entry b at the first slot and q = ceil(t**2)-1
    entries a after it, the rest zero, where a solves
    q*(q+1)*a**2 - 2*t*q*a + t**2 - 1 = 0 (minus root) and b = t - q*a.
    Raises :class:`Infeasible` when m < t**2.
    """
    if t <= 1.0:
        raise InvalidRadius("canonical construction needs t > 1")
    if compare_count_tsq(m, t) < 0:
        raise Infeasible(f"support of size {m} cannot carry sum {t} with unit energy")
    mp = min_count_meeting_radius(t)
    q = mp - 1
    disc = max(q * (mp - t * t), 0.0)
    a = (t * q - math.sqrt(disc)) / (q * (q + 1))
    b = t - q * a
    out = np.zeros(m, dtype=float)
    out[0] = b
    out[1:mp] = a
    return out


def dual_value(v, t: float, lam: float, mu: float) -> float:
    """Partial Lagrangian dual value g(lam, mu) for the nonnegative problems.

    For mu > -1 the inner minimization has the shrinkage solution and

        g = ||v||^2/2 - lam*t - mu/2 - ||(v - lam*1)^+||^2 / (2*(1+mu));

    at mu == -1 the quadratic term vanishes and g = ||v||^2/2 - lam*t + 1/2.
    Below mu = -1 the dual is unbounded (-inf).
    """
    v = _as_vector(v)
    vsq = float((v * v).sum())
    if mu < -1.0:
        return float("-inf")
    if mu == -1.0:
        return 0.5 * vsq - lam * t + 0.5
    p = np.maximum(v - lam, 0.0)
    return 0.5 * vsq - lam * t - 0.5 * mu - float((p * p).sum()) / (2.0 * (1.0 + mu))


def _normalized_shrinkage(v: np.ndarray, lam: float) -> tuple[np.ndarray, float]:
    p = np.maximum(v - lam, 0.0)
    nrm = float(np.linalg.norm(p))
    return p / nrm, nrm


def _solve_root(v: np.ndarray, t: float, method: str, tol: float,
                psi_hat: float | None = None) -> RootResult:
    if method.lower() == "fs":
        return solve_phi(v, t, "fs", tol)
    try:
        br = initial_bracket(v, t, psi_hat=psi_hat)
    except PreconditionFailed:
        br = general_bracket(v, t)
    return solve_phi(v, t, method, tol, bracket=br)


def project_b1b2_nonneg(v, t: float, method: str = "qasb",
                        tol: float = TOL_DEFAULT) -> Solution:
    """Projection onto {x >= 0, ||x||_1 <= t, ||x||_2 <= 1}.

    Any t > 0 is accepted: for t >= sqrt(n) the l1 constraint is vacuous and
    the dispatch lands in the pure l2 cases, for t <= 1 the l2 constraint is
    vacuous and it lands in the pure l1 cases.
    """
    v = _as_vector(v)
    if t <= 0.0:
        raise InvalidRadius("radius t must be positive")
    vp = np.maximum(v, 0.0)
    l1 = float(vp.sum())
    l2 = float(np.linalg.norm(vp))
    if l1 <= t and l2 <= 1.0:
        return Solution(vp, 0.0, 0.0, "C_o", True, 0)
    if l2 > 1.0 and l1 <= t * l2:
        return Solution(vp / l2, 0.0, l2 - 1.0, "C_I", True, 0)
    lam_hat = psi_root(v, t)
    p = np.maximum(v - lam_hat, 0.0)
    if float(np.linalg.norm(p)) <= 1.0:
        return Solution(p, lam_hat, 0.0, "C_II", True, 0)
    res = _solve_root(v, t, method, tol, psi_hat=lam_hat)
    x, nrm = _normalized_shrinkage(v, res.root)
    return Solution(x, res.root, nrm - 1.0, "C_III", True, res.iterations)


def _max_support(v: np.ndarray) -> np.ndarray:
    return np.flatnonzero(v == v.max())


def _canonical_on_max_support(v: np.ndarray, t: float) -> np.ndarray:
    idx = _max_support(v)
    x = np.zeros_like(v)
    x[idx] = canonical_sphere_point(idx.size, t)
    return x


def _second_distinct(v: np.ndarray) -> float:
    vmax = v.max()
    rest = v[v < vmax]
    return float(rest.max())


def project_s1s2_nonneg(v, t: float, method: str = "qasb",
                        tol: float = TOL_DEFAULT) -> Solution:
    """Projection onto {x >= 0, ||x||_1 = t, ||x||_2 = 1}."""
    v = _as_vector(v)
    _require_sphere_radius(v.size, t)
    i1 = int((v == v.max()).sum())
    cmp = compare_count_tsq(i1, t)
    if cmp > 0:
        x = _canonical_on_max_support(v, t)
        return Solution(x, float(v.max()), -1.0, "SS(i)", False, 0)
    if cmp == 0:
        x = np.zeros_like(v)
        x[_max_support(v)] = 1.0 / math.sqrt(i1)
        lam2 = _second_distinct(v)
        p = np.maximum(v - lam2, 0.0)
        return Solution(x, lam2, float(np.linalg.norm(p)) - 1.0, "SS(ii)", True, 0)
    res = _solve_root(v, t, method, tol)
    x, nrm = _normalized_shrinkage(v, res.root)
    return Solution(x, res.root, nrm - 1.0, "SS(iii)", True, res.iterations)


def project_b1s2_nonneg(v, t: float, method: str = "qasb",
                        tol: float = TOL_DEFAULT) -> Solution:
    """Projection onto {x >= 0, ||x||_1 <= t, ||x||_2 = 1}."""
    v = _as_vector(v)
    _require_sphere_radius(v.size, t)
    vmax = float(v.max())
    if vmax < 0.0 or vmax == 0.0:
        # only the l2 sphere binds; a unit spike on a maximal entry is optimal
        x = np.zeros_like(v)
        x[int(_max_support(v)[0])] = 1.0
        label = "BS(iv)" if vmax == 0.0 else "BS(v)"
        return Solution(x, 0.0, -1.0, label, False, 0)
    i1 = int((v == vmax).sum())
    cmp = compare_count_tsq(i1, t)
    if cmp > 0:
        x = _canonical_on_max_support(v, t)
        return Solution(x, vmax, -1.0, "BS(iii)", False, 0)
    vp = np.maximum(v, 0.0)
    l1 = float(vp.sum())
    l2 = float(np.linalg.norm(vp))
    if l1 <= t * l2:
        return Solution(vp / l2, 0.0, l2 - 1.0, "BS(ii)", True, 0)
    if cmp == 0:
        # phi vanishes on the whole plateau; report its left endpoint
        lam2 = _second_distinct(v)
        x, nrm = _normalized_shrinkage(v, lam2)
        return Solution(x, lam2, nrm - 1.0, "BS(i)", True, 0)
    res = _solve_root(v, t, method, tol)
    x, nrm = _normalized_shrinkage(v, res.root)
    return Solution(x, res.root, nrm - 1.0, "BS(i)", True, res.iterations)


_NONNEG_SOLVERS = {
    Geometry.BALL_BALL: project_b1b2_nonneg,
    Geometry.BALL_SPHERE: project_b1s2_nonneg,
    Geometry.SPHERE_SPHERE: project_s1s2_nonneg,
}


def project_signed(v, t: float, kind: ProblemKind, method: str = "qasb",
                   tol: float = TOL_DEFAULT) -> Solution:
    """Signed projection via the nonnegative solver on |v|.

    Any minimizer satisfies v_i * x_i >= 0, so solving on |v| and restoring
    signs (with sign(0) taken as +1) is exact.  When the solution puts mass
    on a zero entry of v both signs are optimal there, so uniqueness is
    downgraded in that case.
    """
    v = _as_vector(v)
    w = np.abs(v)
    sol = _NONNEG_SOLVERS[kind.geometry](w, t, method=method, tol=tol)
    signs = np.where(v < 0.0, -1.0, 1.0)
    x = sol.x * signs
    unique = sol.unique and not bool(np.any((v == 0.0) & (x != 0.0)))
    return Solution(x, sol.lambda_star, sol.mu_star, sol.case_label, unique,
                    sol.iterations)


def project(v, t: float, kind: ProblemKind, method: str = "qasb",
            tol: float = TOL_DEFAULT) -> Solution:
    """Dispatch on the problem kind (geometry plus sign restriction)."""
    if kind.nonnegative:
        return _NONNEG_SOLVERS[kind.geometry](v, t, method=method, tol=tol)
    return project_signed(v, t, kind, method=method, tol=tol)


def phi_residual(v, t: float, lam: float) -> float:
    """|phi(lam)| recomputed from scratch; handy as a solution certificate."""
    v = _as_vector(v)
    return abs(eval_phi(compute_stats(v, lam), lam, t))
