"""Ensemble analysis for two-district plans.

Plans label every unit 1 or 2; swapping the two labels yields the same
division, so the distance between plans is the Hamming count minimized
over the relabeling.  An ensemble embedded on a circle is summarized by
splitting the circle into equal arcs and, within each arc, averaging the
(coherently relabeled) plans into a per-unit District-1 fraction.  Labels
are made coherent by chaining: the first plan of the first arc keeps its
labels, each later arc's first plan is aligned to the previous arc's
first plan, and remaining plans are aligned within their arc.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .mmspace import MetricMeasureSpace

ARC_COUNT_DEFAULT = 8


def _as_labels(plan) -> np.ndarray:
    arr = np.asarray(plan)
    if arr.ndim != 1:
        raise ValueError("a plan must be a 1-d label sequence")
    if not np.all(np.isin(arr, (1, 2))):
        raise ValueError("district labels must be 1 or 2")
    return arr.astype(np.int8)


@dataclass(frozen=True)
class Ensemble:
    """P plans assigning U units to districts 1 and 2."""

    assignments: np.ndarray
    unit_ids: tuple[str, ...] | None = None
    plan_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        A = np.asarray(self.assignments)
        if A.ndim != 2:
            raise ValueError("assignments must be a plans x units table")
        if not np.all(np.isin(A, (1, 2))):
            raise ValueError("district labels must be 1 or 2")
        A = A.astype(np.int8)
        ones = (A == 1).sum(axis=1)
        if np.any(ones == 0) or np.any(ones == A.shape[1]):
            bad = int(np.argmax((ones == 0) | (ones == A.shape[1])))
            raise ValueError(f"plan {bad} does not use both district labels")
        unit_ids = self.unit_ids
        if unit_ids is None:
            unit_ids = tuple(f"u{i}" for i in range(A.shape[1]))
        elif len(unit_ids) != A.shape[1]:
            raise ValueError("unit_ids length must match the unit count")
        plan_ids = self.plan_ids
        if plan_ids is None:
            plan_ids = tuple(f"p{i}" for i in range(A.shape[0]))
        elif len(plan_ids) != A.shape[0]:
            raise ValueError("plan_ids length must match the plan count")
        A.setflags(write=False)
        object.__setattr__(self, "assignments", A)
        object.__setattr__(self, "unit_ids", tuple(str(u) for u in unit_ids))
        object.__setattr__(self, "plan_ids", tuple(str(p) for p in plan_ids))

    @property
    def n_plans(self) -> int:
        return self.assignments.shape[0]

    @property
    def n_units(self) -> int:
        return self.assignments.shape[1]


@dataclass(frozen=True)
class ArcSummary:
    """Per-arc aggregate: which plans landed there and, unless the arc is
    empty, each unit's share of plans assigning it to District 1."""

    arc_index: int
    plan_indices: tuple[int, ...]
    fractions: np.ndarray | None


def hamming(plan_a, plan_b) -> int:
    """Units that must change district, minimized over label swaps."""
    a = _as_labels(plan_a)
    b = _as_labels(plan_b)
    if a.shape != b.shape:
        raise ValueError("plans must have the same number of units")
    direct = int(np.count_nonzero(a != b))
    return min(direct, a.shape[0] - direct)


def ensemble_distances(ensemble: Ensemble, threads: int = 1) -> MetricMeasureSpace:
    """Plan-by-plan Hamming matrix as a uniform metric-measure space.

    The relabel-minimized Hamming count is a pseudometric: swap-equivalent
    plans sit at distance zero.  Rows may be computed in parallel; the
    result does not depend on the thread count.
    """
    A = ensemble.assignments
    P, U = A.shape
    D = np.zeros((P, P))

    def fill_row(i):
        direct = np.count_nonzero(A[i][None, :] != A[i + 1:], axis=1)
        D[i, i + 1:] = np.minimum(direct, U - direct)

    if threads > 1 and P > 2:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill_row, range(P - 1)))
    else:
        for i in range(P - 1):
            fill_row(i)
    D = D + D.T
    return MetricMeasureSpace(D)


def align(plan_q, plan_p) -> np.ndarray:
    """Relabel ``plan_q`` (or not) to minimize its difference from ``plan_p``.

    Returns ``plan_q`` or its 1<->2 swap, whichever differs from
    ``plan_p`` in fewer units; an exact tie keeps ``plan_q`` unchanged.
    """
    q = _as_labels(plan_q)
    p = _as_labels(plan_p)
    if q.shape != p.shape:
        raise ValueError("plans must have the same number of units")
    direct = int(np.count_nonzero(q != p))
    if q.shape[0] - direct < direct:
        return (3 - q).astype(np.int8)
    return q.copy()


def arc_summaries(coords, ensemble: Ensemble, n_arcs: int = ARC_COUNT_DEFAULT,
                  within_arc_reference: str = "arc_first") -> list[ArcSummary]:
    """Summarize an embedded ensemble over equal arcs of the circle.

    ``coords`` are circular coordinates in [0, 1); arc k covers
    [k/n_arcs, (k+1)/n_arcs).  Each arc's first plan is the one with the
    lowest coordinate (ties to the lowest plan index); the first plan of
    the first nonempty arc keeps its labels and later first plans chain
    to the previous nonempty arc.  Remaining plans align to their arc's
    first plan, or to the overall first plan with
    ``within_arc_reference="ensemble_first"``.  Empty arcs report no
    fractions.
    """
    if within_arc_reference not in ("arc_first", "ensemble_first"):
        raise ValueError("within_arc_reference must be 'arc_first' or 'ensemble_first'")
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (ensemble.n_plans,):
        raise ValueError("coords length must match the number of plans")
    if coords.size and (coords.min() < 0 or coords.max() >= 1):
        raise ValueError("circular coordinates must lie in [0, 1)")

    arc_of = np.minimum((coords * n_arcs).astype(int), n_arcs - 1)
    members = [np.flatnonzero(arc_of == k) for k in range(n_arcs)]
    A = ensemble.assignments

    def first_plan(idx: np.ndarray) -> int:
        # lowest coordinate, ties broken by plan index
        best = idx[0]
        for i in idx[1:]:
            if coords[i] < coords[best]:
                best = i
        return int(best)

    summaries = []
    previous_first: np.ndarray | None = None
    root_first: np.ndarray | None = None
    for k in range(n_arcs):
        idx = members[k]
        if idx.size == 0:
            summaries.append(ArcSummary(k, (), None))
            continue
        lead = first_plan(idx)
        lead_labels = A[lead] if previous_first is None else align(A[lead], previous_first)
        if root_first is None:
            root_first = lead_labels
        reference = lead_labels if within_arc_reference == "arc_first" else root_first
        ones = np.zeros(ensemble.n_units)
        for i in idx:
            labels = lead_labels if i == lead else align(A[i], reference)
            ones += labels == 1
        fractions = ones / idx.size
        summaries.append(ArcSummary(k, tuple(int(i) for i in idx), fractions))
        previous_first = lead_labels
    return summaries
