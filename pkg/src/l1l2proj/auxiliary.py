"""Threshold statistics and the piecewise-quadratic residual machinery.

Every projection handled by this package reduces to locating a scalar
threshold ``lam``.  Two residual functions drive that search:

    psi(lam) = ||(v - lam*1)^+||_1 - t
    phi(lam) = ||(v - lam*1)^+||_1**2 - t**2 * ||(v - lam*1)^+||_2**2

Both depend on ``v`` only through the count, the sum and the sum of squares
of the entries at or above ``lam``.  These are collected in a
:class:`BreakpointStats` triple; between two adjacent distinct values of
``v`` the triple is constant and ``phi`` is a plain quadratic in ``lam``
whose coefficients are read off the triple:

    phi(lam) = (count - t**2) * (count*lam - 2*sum) * lam + sum**2 - t**2*sumsq

Solvers move the threshold strictly downward or within a shrinking window,
so the triples are kept current incrementally from a set of still-active
candidate entries instead of rescanning the whole vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePiece, NoRoot

# Relative guard for comparing an integer count against t**2.  Knife-edge
# ties (e.g. t = sqrt(2) with two tied maxima) must be detected although
# t**2 carries one rounding error.
COUNT_GUARD = 1e-12


def compare_count_tsq(count: int, t: float) -> int:
    """Return -1, 0 or +1 as ``count`` is <, == or > ``t**2`` under the guard."""
    tsq = t * t
    if abs(count - tsq) <= COUNT_GUARD * max(tsq, 1.0):
        return 0
    return -1 if count < tsq else 1


def min_count_meeting_radius(t: float) -> int:
    """Smallest integer count c with c >= t**2, honouring the guard."""
    tsq = t * t
    return max(int(math.ceil(tsq - COUNT_GUARD * max(tsq, 1.0))), 1)


@dataclass(frozen=True)
class BreakpointStats:
    """Count / sum / sum-of-squares of the entries at or above ``anchor``.

    Entries exactly equal to the anchor are included.  For any anchor with
    ``count >= 1`` the triple satisfies ``count * sumsq >= sum**2``.
    """

    anchor: float
    count: int
    sum: float
    sumsq: float


@dataclass
class ActiveSet:
    """Candidate positions not yet absorbed into a stats triple.

    ``values`` caches ``v[indices]`` so solvers can partition without
    re-gathering.  Both arrays shrink monotonically during a solver run.
    """

    indices: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return int(self.indices.size)


def empty_active() -> ActiveSet:
    return ActiveSet(np.empty(0, dtype=np.int64), np.empty(0, dtype=float))


def active_between(v: np.ndarray, lo: float, hi: float) -> ActiveSet:
    """Candidates with ``lo <= v_i < hi``."""
    v = np.asarray(v, dtype=float)
    idx = np.flatnonzero((v >= lo) & (v < hi))
    return ActiveSet(idx.astype(np.int64, copy=False), v[idx])


def compute_stats(v, lam: float) -> BreakpointStats:
    """Stats triple at ``lam`` from a single full pass over ``v``."""
    v = np.asarray(v, dtype=float)
    sel = v[v >= lam]
    return BreakpointStats(
        anchor=float(lam),
        count=int(sel.size),
        sum=float(sel.sum()),
        sumsq=float((sel * sel).sum()),
    )


def peek_stats(prev: BreakpointStats, active: ActiveSet, lam: float,
               strict: bool = False) -> BreakpointStats:
    """Stats at ``lam`` <= ``prev.anchor`` without committing the move.

    With ``strict=True`` entries exactly equal to ``lam`` are excluded,
    which selects the quadratic piece immediately to the right of ``lam``
    when ``lam`` happens to be a data value.
    """
    if lam > prev.anchor:
        raise ValueError("peek_stats only moves the anchor downward")
    vals = active.values
    mask = (vals > lam) if strict else (vals >= lam)
    sel = vals[mask]
    return BreakpointStats(
        anchor=float(lam),
        count=prev.count + int(sel.size),
        sum=prev.sum + float(sel.sum()),
        sumsq=prev.sumsq + float((sel * sel).sum()),
    )


def update_stats(prev: BreakpointStats, active: ActiveSet, v,
                 lam: float) -> tuple[BreakpointStats, ActiveSet]:
    """Lower the anchor to ``lam`` < ``prev.anchor``, absorbing candidates.

    Entries with value >= ``lam`` move into the returned stats; the
    returned active set keeps only entries below ``lam``.  Cost is one pass
    over the active set.
    """
    vals = active.values if active.values is not None else np.asarray(v, float)[active.indices]
    mask = vals >= lam
    sel = vals[mask]
    stats = BreakpointStats(
        anchor=float(lam),
        count=prev.count + int(sel.size),
        sum=prev.sum + float(sel.sum()),
        sumsq=prev.sumsq + float((sel * sel).sum()),
    )
    keep = ~mask
    return stats, ActiveSet(active.indices[keep], vals[keep])


def prune_active(active: ActiveSet, lo: float) -> ActiveSet:
    """Drop candidates below ``lo``; they can never re-enter a window."""
    keep = active.values >= lo
    if keep.all():
        return active
    return ActiveSet(active.indices[keep], active.values[keep])


def eval_psi(v, lam: float, t: float) -> float:
    """Residual ||(v - lam*1)^+||_1 - t; identically -t once lam >= max(v)."""
    v = np.asarray(v, dtype=float)
    return float(np.maximum(v - lam, 0.0).sum()) - t


def eval_phi(stats: BreakpointStats, lam: float, t: float) -> float:
    """Quadratic-piece value of phi at ``lam`` from a consistent stats triple."""
    tsq = t * t
    return (stats.count - tsq) * (stats.count * lam - 2.0 * stats.sum) * lam \
        + stats.sum * stats.sum - tsq * stats.sumsq


def eval_phi_subderiv(stats: BreakpointStats, lam: float, t: float) -> float:
    """Derivative 2*(count - t**2)*(count*lam - sum) of the active piece.

    At a breakpoint this is a valid subgradient of phi on the convex region
    left of the first piece whose count reaches t**2.
    """
    return 2.0 * (stats.count - t * t) * (stats.count * lam - stats.sum)


def piece_smaller_root(stats: BreakpointStats, t: float) -> float:
    """Smaller root of the quadratic piece described by ``stats``.

    Requires ``count > t**2`` (the convex pieces).  A single-entry piece has
    a double root at its own value, which is returned directly.  Raises
    :class:`NoRoot` for concave pieces with two or more distinct entries
    (negative discriminant) and :class:`DegeneratePiece` when the count
    equals t**2, where the piece is constant.
    """
    count = stats.count
    if count < 1:
        raise NoRoot("empty piece has no root")
    if count == 1:
        return stats.sum
    cmp = compare_count_tsq(count, t)
    if cmp == 0:
        raise DegeneratePiece("piece with count == t**2 is constant")
    if cmp < 0:
        raise NoRoot("concave piece with count < t**2 has no real root")
    ratio = (count * stats.sumsq - stats.sum * stats.sum) / (count - t * t)
    ratio = max(ratio, 0.0)  # Cauchy-Schwarz keeps it >= 0 up to rounding
    return (stats.sum - t * math.sqrt(ratio)) / count


@dataclass(frozen=True)
class Breakpoints:
    """Distinct values of ``v`` in descending order.

    ``jt`` is the 0-based position of the first distinct value whose
    cumulative entry count reaches t**2; it always exists when t <= sqrt(n).
    """

    values: np.ndarray
    k: int
    jt: int


def breakpoints(v, t: float) -> Breakpoints:
    v = np.asarray(v, dtype=float)
    uniq, counts = np.unique(v, return_counts=True)
    vals = uniq[::-1]
    cum = np.cumsum(counts[::-1])
    need = min_count_meeting_radius(t)
    if cum[-1] < need:
        raise ValueError("radius exceeds sqrt(n); no piece reaches t**2")
    jt = int(np.searchsorted(cum, need))
    return Breakpoints(values=vals, k=int(vals.size), jt=jt)
