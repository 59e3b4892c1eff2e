"""Root location for the piecewise-quadratic residual phi.

Four interchangeable methods are provided:

* :func:`forward_search` sorts a copy of the input and walks breakpoints
  until the sign change, then returns the closed-form piece root (exact).
* :func:`bisection` is the classic baseline on a bracket.
* :func:`ssnsb` combines a secant upper bound with a tangent lower bound
  and probes their midpoint.
* :func:`qasb` combines the secant upper bound with the current piece's
  closed-form root, exiting exactly when no data value separates the two.

The bracketing methods maintain the invariant phi(l) > 0 > phi(r) with
l < r at every iteration, keep a stats triple anchored at r, and touch only
the shrinking set of candidate entries inside [l, r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .auxiliary import (
    ActiveSet,
    BreakpointStats,
    active_between,
    breakpoints,
    compare_count_tsq,
    compute_stats,
    empty_active,
    eval_phi,
    eval_phi_subderiv,
    eval_psi,
    min_count_meeting_radius,
    peek_stats,
    piece_smaller_root,
    prune_active,
    update_stats,
)
from .errors import DegenerateInput, NoRoot, NonConvergence, PreconditionFailed

TOL_DEFAULT = 1e-9
MAX_ITER = 200

_NAN = float("nan")


@dataclass(frozen=True)
class TraceRow:
    """One solver iteration in the shape of the iteration tables.

    ``active_size`` is the number of candidate entries still inside the
    bracket when the iteration starts; the exact-root exit row reports 0
    since nothing remains to scan.  ``lower_probe`` is the tangent or
    piece-root point (method dependent), ``upper_probe`` the secant point;
    both are NaN where a method does not compute them.
    """

    k: int
    active_size: int
    l: float
    lower_probe: float
    midpoint: float
    upper_probe: float
    r: float


@dataclass
class RootResult:
    """Root plus iteration metadata.

    ``trace`` is populated only when tracing was requested, in which case it
    holds one row per iteration.  Forward search reports the number of
    breakpoint evaluations as its iteration count and never traces.
    """

    root: float
    iterations: int
    trace: list[TraceRow] = field(default_factory=list)
    method: str = ""


@dataclass
class Bracket:
    """Interval [l, r] with phi(l) > 0 > phi(r) plus cached solver state.

    ``stats_r`` is anchored at ``r``; ``active`` holds the candidates with
    l <= v_i < r.  A bracket with ``l == r`` is already solved (the root is
    ``l``); constructors return this form when a closed-form root falls out
    of the setup.  Solvers never mutate a bracket, so one bracket can seed
    several runs.
    """

    l: float
    r: float
    phi_l: float
    phi_r: float
    stats_r: BreakpointStats
    active: ActiveSet

    @property
    def solved(self) -> bool:
        return self.l == self.r


def psi_root(v, t: float) -> float:
    """Exact root of psi(lam) = ||(v - lam*1)^+||_1 - t.

    Iteratively filters the candidate set and solves the linear segment it
    identifies; terminates after at most n passes with the exact root (the
    segment solve is closed form).  With ||v^+||_1 > t the root is positive.
    """
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("empty input vector")
    work = v
    while True:
        lam = (work.sum() - t) / work.size
        keep = work > lam
        if keep.all():
            return float(lam)
        nxt = work[keep]
        if nxt.size == 0:
            # all remaining entries tie at the root value
            return float(lam)
        work = nxt


def _phi_at(v: np.ndarray, lam: float, t: float) -> float:
    return eval_phi(compute_stats(v, lam), lam, t)


def initial_bracket(v, t: float, psi_hat: float | None = None) -> Bracket:
    """Narrow bracket (l, r) = ((||v||_1 - t*||v||_2)/n, psi-root).

    Valid whenever ||v||_1 > t, ||v||_1 > t*||v||_2 and the plain l1-ball
    projection still has l2 norm above 1 (norms taken on the positive part,
    so mixed-sign inputs are accepted).  Raises :class:`PreconditionFailed`
    when any hypothesis fails; callers then fall back to
    :func:`general_bracket`.
    """
    v = np.asarray(v, dtype=float).ravel()
    n = v.size
    vp = np.maximum(v, 0.0)
    l1 = float(vp.sum())
    l2 = float(math.sqrt((vp * vp).sum()))
    if not l1 > t:
        raise PreconditionFailed("positive-part l1 mass does not exceed t")
    if not l1 > t * l2:
        raise PreconditionFailed("l1 mass does not exceed t times the l2 norm")
    lam_hat = psi_root(v, t) if psi_hat is None else float(psi_hat)
    p = np.maximum(v - lam_hat, 0.0)
    if not math.sqrt(float((p * p).sum())) > 1.0:
        raise PreconditionFailed("l1-ball projection already inside the l2 ball")
    lam_tilde = (l1 - t * l2) / n
    stats_r = compute_stats(v, lam_hat)
    phi_r = eval_phi(stats_r, lam_hat, t)
    phi_l = _phi_at(v, lam_tilde, t)
    if not (phi_l > 0.0 and phi_r < 0.0 and lam_tilde < lam_hat):
        raise PreconditionFailed("numerical sign check failed on the bracket ends")
    return Bracket(lam_tilde, lam_hat, phi_l, phi_r, stats_r,
                   active_between(v, lam_tilde, lam_hat))


def general_bracket(v, t: float) -> Bracket:
    """Bracket valid for any root location, including lam <= 0.

    The left end is the closed-form smaller root of the last quadratic
    piece, which never overshoots the root; when it lands at or below the
    smallest data value it *is* the root and a solved bracket is returned.
    The right end is the midpoint of the two largest distinct values, where
    phi is strictly negative.
    """
    v = np.asarray(v, dtype=float).ravel()
    n = v.size
    if n == 0:
        raise ValueError("empty input vector")
    bp = breakpoints(v, t)
    if bp.k < 2:
        raise DegenerateInput("constant vector has no usable bracket")
    i1 = int((v == bp.values[0]).sum())
    if compare_count_tsq(i1, t) >= 0:
        raise NoRoot("count of maximal entries reaches t**2; no unique root")
    if compare_count_tsq(n, t) <= 0:
        raise NoRoot("dimension does not exceed t**2")
    full = compute_stats(v, float(bp.values[-1]))
    l = piece_smaller_root(full, t)
    if l <= bp.values[-1]:
        return Bracket(l, l, 0.0, 0.0, compute_stats(v, l), empty_active())
    phi_l = _phi_at(v, l, t)
    if phi_l <= 0.0:
        # mathematically phi(l) >= 0; a non-positive value means l is the
        # root up to rounding
        return Bracket(l, l, 0.0, 0.0, compute_stats(v, l), empty_active())
    r = 0.5 * (float(bp.values[0]) + float(bp.values[1]))
    stats_r = compute_stats(v, r)
    phi_r = eval_phi(stats_r, r, t)
    if not phi_r < 0.0:
        raise PreconditionFailed("numerical sign check failed at the right end")
    return Bracket(l, r, phi_l, phi_r, stats_r, active_between(v, l, r))


def bracket_from_endpoints(v, t: float, l: float, r: float) -> Bracket:
    """Build a bracket from user-supplied endpoints, verifying the signs."""
    v = np.asarray(v, dtype=float).ravel()
    if not l < r:
        raise PreconditionFailed("need l < r")
    phi_l = _phi_at(v, l, t)
    phi_r = _phi_at(v, r, t)
    if phi_l < 0.0 or phi_r > 0.0:
        raise PreconditionFailed("phi(l) > 0 > phi(r) does not hold")
    return Bracket(float(l), float(r), phi_l, phi_r, compute_stats(v, r),
                   active_between(v, l, r))


def make_bracket(v, t: float) -> Bracket:
    """Narrow bracket when its hypotheses hold, general bracket otherwise."""
    try:
        return initial_bracket(v, t)
    except PreconditionFailed:
        return general_bracket(v, t)


def forward_search(v, t: float) -> RootResult:
    """Breakpoint scan with sorting; returns the exact closed-form root.

    Sorts a copy descending, seeds running sums with the first ceil(t**2)
    entries and walks forward, evaluating phi only where the value strictly
    drops.  The first non-negative value identifies the piece holding the
    root; if the scan exhausts, the root lies in the last piece.
    """
    v = np.asarray(v, dtype=float).ravel()
    n = v.size
    tsq = t * t
    if not (1.0 < t and tsq < n):
        raise NoRoot("forward search requires 1 < t < sqrt(n)")
    u = np.sort(v)[::-1]
    i1 = int((u == u[0]).sum())
    if compare_count_tsq(i1, t) >= 0:
        raise NoRoot("count of maximal entries reaches t**2; no root below the max")
    jt = min_count_meeting_radius(t)
    # smallest piece size whose root formula is non-degenerate
    jt_strict = jt if compare_count_tsq(jt, t) > 0 else jt + 1
    csum = np.cumsum(u)
    csq = np.cumsum(u * u)
    evaluations = 0
    jstar = n
    block = 4096
    for start in range(jt, n, block):
        q = np.arange(start, min(start + block, n))
        x = u[q]
        drop = x < u[q - 1]
        cnt = (q + 1).astype(float)
        s_in = csum[q]
        w_in = csq[q]
        phi = (cnt - tsq) * (cnt * x - 2.0 * s_in) * x + s_in * s_in - tsq * w_in
        hit = drop & (phi >= 0.0) & (q >= jt_strict)
        idx = np.flatnonzero(hit)
        if idx.size:
            q0 = int(q[idx[0]])
            evaluations += int(np.count_nonzero(drop[: idx[0] + 1]))
            jstar = q0
            break
        evaluations += int(np.count_nonzero(drop))
    if jstar == n:
        s = float(csum[-1])
        w = float(csq[-1])
    else:
        s = float(csum[jstar - 1])
        w = float(csq[jstar - 1])
    ratio = max((jstar * w - s * s) / (jstar - tsq), 0.0)
    root = (s - t * math.sqrt(ratio)) / jstar
    return RootResult(root=float(root), iterations=evaluations, method="fs")


def _entry_result(bracket: Bracket, tol: float, method: str) -> RootResult | None:
    if bracket.solved:
        return RootResult(bracket.l, 0, [], method)
    if abs(bracket.phi_l) <= tol:
        return RootResult(bracket.l, 0, [], method)
    if abs(bracket.phi_r) <= tol:
        return RootResult(bracket.r, 0, [], method)
    if bracket.r - bracket.l <= tol:
        return RootResult(0.5 * (bracket.l + bracket.r), 0, [], method)
    return None


def bisection(v, t: float, bracket: Bracket, tol: float = TOL_DEFAULT,
              record_trace: bool = False) -> RootResult:
    """Midpoint halving with incremental stats updates."""
    early = _entry_result(bracket, tol, "bm")
    if early is not None:
        return early
    l, r = bracket.l, bracket.r
    phi_l, phi_r = bracket.phi_l, bracket.phi_r
    stats_r, active = bracket.stats_r, bracket.active
    rows: list[TraceRow] = []
    k = 0
    while r - l > tol:
        if k >= MAX_ITER:
            raise NonConvergence(f"bisection failed to converge in {MAX_ITER} iterations")
        u0 = len(active)
        mid = 0.5 * (l + r)
        st_mid = peek_stats(stats_r, active, mid)
        phi_mid = eval_phi(st_mid, mid, t)
        k += 1
        if record_trace:
            rows.append(TraceRow(k, u0, l, _NAN, mid, _NAN, r))
        if abs(phi_mid) <= tol:
            return RootResult(mid, k, rows, "bm")
        if phi_mid > 0.0:
            l, phi_l = mid, phi_mid
            active = prune_active(active, mid)
        else:
            r, phi_r = mid, phi_mid
            stats_r, active = update_stats(stats_r, active, v, mid)
    return RootResult(0.5 * (l + r), k, rows, "bm")


def ssnsb(v, t: float, bracket: Bracket, tol: float = TOL_DEFAULT,
          record_trace: bool = False) -> RootResult:
    """Secant upper bound, tangent lower bound, probe at their midpoint.

    The secant point always lands right of the root and the tangent point
    left of it, so the bracket update keeps its sign invariants: a positive
    probe moves (l, r) to (probe, secant), a non-positive one to
    (tangent, probe).  A vanishing subderivative at l falls back to one
    plain bisection step.
    """
    early = _entry_result(bracket, tol, "ssnsb")
    if early is not None:
        return early
    l, r = bracket.l, bracket.r
    phi_l, phi_r = bracket.phi_l, bracket.phi_r
    stats_r, active = bracket.stats_r, bracket.active
    rows: list[TraceRow] = []
    k = 0
    lam = 0.5 * (l + r)
    while r - l > tol:
        if k >= MAX_ITER:
            raise NonConvergence(f"ssnsb failed to converge in {MAX_ITER} iterations")
        u0 = len(active)
        lam_s = r - phi_r * (l - r) / (phi_l - phi_r)
        st_l = peek_stats(stats_r, active, l)
        deriv = eval_phi_subderiv(st_l, l, t)
        if deriv == 0.0:
            mid = 0.5 * (l + r)
            st_mid = peek_stats(stats_r, active, mid)
            phi_mid = eval_phi(st_mid, mid, t)
            k += 1
            if record_trace:
                rows.append(TraceRow(k, u0, l, _NAN, mid, _NAN, r))
            lam = mid
            if abs(phi_mid) <= tol:
                return RootResult(mid, k, rows, "ssnsb")
            if phi_mid > 0.0:
                l, phi_l = mid, phi_mid
                active = prune_active(active, mid)
            else:
                r, phi_r = mid, phi_mid
                stats_r, active = update_stats(stats_r, active, v, mid)
            continue
        lam_t = l - phi_l / deriv
        lam = 0.5 * (lam_s + lam_t)
        st_m = peek_stats(stats_r, active, lam)
        phi_m = eval_phi(st_m, lam, t)
        k += 1
        if record_trace:
            rows.append(TraceRow(k, u0, l, lam_t, lam, lam_s, r))
        if abs(phi_m) <= tol:
            return RootResult(lam, k, rows, "ssnsb")
        if phi_m > 0.0:
            st_s = peek_stats(stats_r, active, lam_s)
            phi_s = eval_phi(st_s, lam_s, t)
            if phi_s >= 0.0:
                # rounding has pushed the secant point onto the root
                return RootResult(lam_s, k, rows, "ssnsb")
            l, phi_l = lam, phi_m
            r, phi_r = lam_s, phi_s
        else:
            st_t = peek_stats(stats_r, active, lam_t)
            phi_t = eval_phi(st_t, lam_t, t)
            if phi_t <= 0.0:
                return RootResult(lam_t, k, rows, "ssnsb")
            l, phi_l = lam_t, phi_t
            r, phi_r = lam, phi_m
        stats_r, active = update_stats(stats_r, active, v, r)
        active = prune_active(active, l)
    return RootResult(lam, k, rows, "ssnsb")


def qasb(v, t: float, bracket: Bracket, tol: float = TOL_DEFAULT,
         record_trace: bool = False) -> RootResult:
    """Secant upper bound paired with the current piece's closed-form root.

    When no data value lies strictly between l and the piece root, that
    root is exact and the method returns it immediately.  Otherwise the
    probe at the midpoint shrinks the bracket: a positive probe moves
    (l, r) to (probe, secant), a non-positive one to (piece root, probe).
    """
    early = _entry_result(bracket, tol, "qasb")
    if early is not None:
        return early
    l, r = bracket.l, bracket.r
    phi_l, phi_r = bracket.phi_l, bracket.phi_r
    stats_r, active = bracket.stats_r, bracket.active
    rows: list[TraceRow] = []
    k = 0
    lam = 0.5 * (l + r)
    while r - l > tol:
        if k >= MAX_ITER:
            raise NonConvergence(f"qasb failed to converge in {MAX_ITER} iterations")
        u0 = len(active)
        lam_s = r - phi_r * (l - r) / (phi_l - phi_r)
        st_l = peek_stats(stats_r, active, l, strict=True)
        lam_q = piece_smaller_root(st_l, t)
        vals = active.values
        if not bool(np.any((vals > l) & (vals < lam_q))):
            k += 1
            if record_trace:
                rows.append(TraceRow(k, 0, l, _NAN, lam_q, _NAN, r))
            return RootResult(lam_q, k, rows, "qasb")
        lam = 0.5 * (lam_s + lam_q)
        st_m = peek_stats(stats_r, active, lam)
        phi_m = eval_phi(st_m, lam, t)
        k += 1
        if record_trace:
            rows.append(TraceRow(k, u0, l, lam_q, lam, lam_s, r))
        if abs(phi_m) <= tol:
            return RootResult(lam, k, rows, "qasb")
        if phi_m > 0.0:
            st_s = peek_stats(stats_r, active, lam_s)
            phi_s = eval_phi(st_s, lam_s, t)
            if phi_s >= 0.0:
                return RootResult(lam_s, k, rows, "qasb")
            l, phi_l = lam, phi_m
            r, phi_r = lam_s, phi_s
        else:
            st_q = peek_stats(stats_r, active, lam_q)
            phi_q = eval_phi(st_q, lam_q, t)
            if phi_q <= 0.0:
                return RootResult(lam_q, k, rows, "qasb")
            l, phi_l = lam_q, phi_q
            r, phi_r = lam, phi_m
        stats_r, active = update_stats(stats_r, active, v, r)
        active = prune_active(active, l)
    return RootResult(lam, k, rows, "qasb")


_BRACKETED = {"bm": bisection, "ssnsb": ssnsb, "qasb": qasb}

METHODS = ("fs", "bm", "ssnsb", "qasb")


def solve_phi(v, t: float, method: str = "qasb", tol: float = TOL_DEFAULT,
              record_trace: bool = False, bracket: Bracket | None = None) -> RootResult:
    """Front end: pick or build a bracket and run the requested method."""
    method = method.lower()
    if method == "fs":
        return forward_search(v, t)
    if method not in _BRACKETED:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if bracket is None:
        bracket = make_bracket(v, t)
    return _BRACKETED[method](v, t, bracket, tol, record_trace=record_trace)
