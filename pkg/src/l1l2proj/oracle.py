"""Brute-force reference solvers for small instances.

These exist to validate the fast paths, so they deliberately avoid the
incremental machinery: :func:`oracle_project` enumerates every support and
constraint-activity pattern and solves each stationarity system in closed
form, and :func:`oracle_phi_root` walks breakpoints evaluating the residual
directly from the norm definition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .auxiliary import compare_count_tsq, min_count_meeting_radius
from .errors import NoRoot, TooLarge
from .projection import Geometry, ProblemKind

MAX_ORACLE_SIZE = 12

_SUPPORT_EPS = 1e-12   # tolerated negativity of a support entry
_FEAS_EPS = 1e-10      # tolerated constraint violation
_TIE_EPS = 1e-12       # objective improvements below this keep the earlier support


@dataclass
class OracleReport:
    best_x: np.ndarray
    best_objective: float
    candidates_examined: int


def _feasible(geom: Geometry, t: float, l1: float, l2sq: float, xmin: float) -> bool:
    if xmin < -_SUPPORT_EPS:
        return False
    if geom is Geometry.BALL_BALL:
        return l1 <= t + _FEAS_EPS and l2sq <= 1.0 + 2.0 * _FEAS_EPS
    if geom is Geometry.BALL_SPHERE:
        return l1 <= t + _FEAS_EPS and abs(l2sq - 1.0) <= 2.0 * _FEAS_EPS
    return abs(l1 - t) <= _FEAS_EPS and abs(l2sq - 1.0) <= 2.0 * _FEAS_EPS


def _enumerate_nonneg(w: np.ndarray, t: float, geom: Geometry):
    """Best support/candidate descriptor for the nonnegative problem on w."""
    n = w.size
    full = 1 << n
    wl = [float(x) for x in w]
    m = [0] * full
    s = [0.0] * full
    q = [0.0] * full
    mn = [math.inf] * full
    mx = [-math.inf] * full
    for mask in range(1, full):
        low = mask & -mask
        i = low.bit_length() - 1
        rest = mask ^ low
        m[mask] = m[rest] + 1
        s[mask] = s[rest] + wl[i]
        q[mask] = q[rest] + wl[i] * wl[i]
        mn[mask] = wl[i] if wl[i] < mn[rest] else mn[rest]
        mx[mask] = wl[i] if wl[i] > mx[rest] else mx[rest]
    wfull = q[full - 1]
    tsq = t * t
    mp = min_count_meeting_radius(t)

    best_obj = 0.5 * wfull  # x = 0, feasible only for the double ball
    best_desc = (0, "zero", 0.0, 1.0)
    if geom is not Geometry.BALL_BALL:
        best_obj = math.inf
        best_desc = None
    examined = 0

    for mask in range(1, full):
        mm, ss, qq = m[mask], s[mask], q[mask]
        lo, hi = mn[mask], mx[mask]

        def consider_affine(lam: float, c: float) -> None:
            nonlocal best_obj, best_desc, examined
            examined += 1
            xmin = (lo - lam) / c
            l1 = (ss - mm * lam) / c
            l2sq = (qq - 2.0 * lam * ss + mm * lam * lam) / (c * c)
            if not _feasible(geom, t, l1, l2sq, xmin):
                return
            ip = (qq - lam * ss) / c
            obj = 0.5 * (wfull - 2.0 * ip + l2sq)
            if obj < best_obj - _TIE_EPS:
                best_obj = obj
                best_desc = (mask, "affine", lam, c)

        def consider_special(tag: str, l1: float, l2sq: float, ip: float,
                             xmin: float) -> None:
            nonlocal best_obj, best_desc, examined
            examined += 1
            if not _feasible(geom, t, l1, l2sq, xmin):
                return
            obj = 0.5 * (wfull - 2.0 * ip + l2sq)
            if obj < best_obj - _TIE_EPS:
                best_obj = obj
                best_desc = (mask, tag, 0.0, 1.0)

        # no constraint active
        consider_affine(0.0, 1.0)
        # l1 constraint active alone
        consider_affine((ss - t) / mm, 1.0)
        # l2 constraint active alone (both orientations)
        if qq > 0.0:
            rt = math.sqrt(qq)
            consider_affine(0.0, rt)
            consider_affine(0.0, -rt)
        # both constraints active: lam solves a quadratic, scale from the sum
        aq = mm * (tsq - mm)
        bq = 2.0 * ss * (mm - tsq)
        cq = tsq * qq - ss * ss
        roots: list[float] = []
        if aq != 0.0:
            disc = bq * bq - 4.0 * aq * cq
            if disc >= 0.0:
                rd = math.sqrt(disc)
                roots = [(-bq - rd) / (2.0 * aq), (-bq + rd) / (2.0 * aq)]
        elif bq != 0.0:
            roots = [-cq / bq]
        for lam in roots:
            c = (ss - mm * lam) / t
            if c > 0.0:
                consider_affine(lam, c)
        # degenerate stationarity on a constant support: every feasible point
        # shares the objective, so one representative suffices
        if lo == hi and compare_count_tsq(mm, t) >= 0:
            consider_special("twoval", t, 1.0, lo * t, 0.0)
        # uniform point (covers tangential supports with mm == t**2)
        rtm = math.sqrt(mm)
        consider_special("uniform", rtm, 1.0, ss / rtm, 1.0 / rtm)

    return best_desc, examined


def _materialize(w: np.ndarray, t: float, desc) -> np.ndarray:
    mask, tag, lam, c = desc
    x = np.zeros_like(w)
    idx = [i for i in range(w.size) if mask >> i & 1]
    if tag == "zero":
        return x
    if tag == "affine":
        x[idx] = np.maximum((w[idx] - lam) / c, 0.0)
    elif tag == "twoval":
        mp = min_count_meeting_radius(t)
        q = mp - 1
        disc = max(q * (mp - t * t), 0.0)
        a = (t * q - math.sqrt(disc)) / (q * (q + 1))
        vals = np.zeros(len(idx))
        vals[0] = t - q * a
        vals[1:mp] = a
        x[idx] = vals
    elif tag == "uniform":
        x[idx] = 1.0 / math.sqrt(len(idx))
    else:  # pragma: no cover
        raise AssertionError(tag)
    return x


def oracle_project(v, t: float, kind: ProblemKind) -> OracleReport:
    """Exhaustive projection for n <= 12; ground truth for the fast solvers.

    Signed problems are reduced to the nonnegative one on |v|: flipping the
    sign of any component of a feasible point keeps both norms, so a
    minimizer always agrees in sign with v.
    """
    v = np.asarray(v, dtype=float).ravel()
    n = v.size
    if n > MAX_ORACLE_SIZE:
        raise TooLarge(f"oracle enumerates 2**n supports; n={n} exceeds {MAX_ORACLE_SIZE}")
    if n == 0:
        raise ValueError("empty input vector")
    if kind.nonnegative:
        w = v
        signs = None
    else:
        w = np.abs(v)
        signs = np.where(v < 0.0, -1.0, 1.0)
    desc, examined = _enumerate_nonneg(w, t, kind.geometry)
    if desc is None:
        raise NoRoot("no feasible candidate found; is the radius admissible?")
    xw = _materialize(w, t, desc)
    objective = 0.5 * float(((xw - w) ** 2).sum())
    x = xw if signs is None else xw * signs
    return OracleReport(best_x=x, best_objective=objective,
                        candidates_examined=examined)


class PhiRootReport(NamedTuple):
    """Root of phi plus a flag for the flat segment of knife-edge inputs."""

    root: float
    plateau: bool


def _phi_direct(v: np.ndarray, lam: float, t: float) -> float:
    p = np.maximum(v - lam, 0.0)
    s1 = float(p.sum())
    return s1 * s1 - t * t * float((p * p).sum())


def oracle_phi_root(v, t: float) -> PhiRootReport:
    """Breakpoint walk with from-scratch evaluations and a textbook quadratic.

    Independent of the incremental fast path: the residual is evaluated
    straight from its norm definition at every distinct value, and the
    sign-change piece is solved with the standard discriminant formula.
    When the residual is identically zero on a leading segment (count of
    maxima exactly t**2) the left endpoint is reported with ``plateau``.
    """
    v = np.asarray(v, dtype=float).ravel()
    vals = np.unique(v)[::-1]
    i1 = int((v == vals[0]).sum())
    cmp = compare_count_tsq(i1, t)
    if cmp > 0:
        raise NoRoot("count of maximal entries exceeds t**2")
    if cmp == 0:
        if vals.size < 2:
            raise NoRoot("constant vector with count == t**2 has a flat residual")
        return PhiRootReport(root=float(vals[1]), plateau=True)
    tsq = t * t
    for j in range(1, vals.size):
        lam_j = float(vals[j])
        val = _phi_direct(v, lam_j, t)
        if val == 0.0:
            return PhiRootReport(root=lam_j, plateau=False)
        if val > 0.0:
            upper = float(vals[j - 1])
            sel = v[v >= upper]
            count = float(sel.size)
            s = float(sel.sum())
            w = float((sel * sel).sum())
            return PhiRootReport(root=_smaller_quadratic_root(count, s, w, tsq),
                                 plateau=False)
    sel = v
    return PhiRootReport(
        root=_smaller_quadratic_root(float(sel.size), float(sel.sum()),
                                     float((sel * sel).sum()), tsq),
        plateau=False,
    )


def _smaller_quadratic_root(count: float, s: float, w: float, tsq: float) -> float:
    a = (count - tsq) * count
    b = -2.0 * (count - tsq) * s
    c = s * s - tsq * w
    disc = max(b * b - 4.0 * a * c, 0.0)
    return (-b - math.sqrt(disc)) / (2.0 * a)
