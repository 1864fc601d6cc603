"""Finite metric-measure spaces: a distance matrix plus point weights.

A space is a square symmetric distance matrix together with a strictly
positive probability vector over the points.  The module also provides a
diagnostic validator for raw matrices (symmetry, diagonal, negativity,
optional triangle-inequality check) and the p-diameter
``(sum_{i,k} d(i,k)^p w_i w_k)^(1/p)``, with the max distance at p = inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

WEIGHT_SUM_TOL = 1e-12
SYMMETRY_RTOL = 1e-9


def _as_square_matrix(D) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {D.shape}")
    return D


@dataclass(frozen=True)
class MetricMeasureSpace:
    """Square distance matrix with fully supported probability weights.

    ``weights`` defaults to uniform.  Arrays are copied and frozen at
    construction, so instances are safe to share across threads.
    """

    distances: np.ndarray
    weights: np.ndarray | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        D = _as_square_matrix(self.distances).copy()
        n = D.shape[0]
        scale = max(1.0, float(np.max(np.abs(D))) if D.size else 0.0)
        if not np.all(np.isfinite(D)):
            raise ValueError("distances must be finite")
        if np.max(np.abs(D - D.T), initial=0.0) > SYMMETRY_RTOL * scale:
            raise ValueError("distance matrix is not symmetric")
        if np.max(np.abs(np.diag(D)), initial=0.0) > SYMMETRY_RTOL * scale:
            raise ValueError("distance matrix has a nonzero diagonal")
        if D.size and D.min() < 0:
            raise ValueError("distance matrix has negative entries")

        if self.weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(self.weights, dtype=float).copy()
        if w.shape != (n,):
            raise ValueError(f"weights must have shape ({n},), got {w.shape}")
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive (full support)")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1 (got {w.sum()!r})")

        if self.labels is not None and len(self.labels) != n:
            raise ValueError("labels length does not match matrix size")

        D.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "distances", D)
        object.__setattr__(self, "weights", w)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))

    @property
    def n_points(self) -> int:
        return self.distances.shape[0]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_metric` on a raw square matrix."""

    n_points: int
    symmetric: bool
    worst_asymmetry: float
    worst_asymmetry_at: tuple[int, int] | None
    zero_diagonal: bool
    worst_diagonal: float
    worst_diagonal_at: int | None
    nonnegative: bool
    min_entry: float
    # max over triples of d(i,k) - d(i,j) - d(j,k); positive means violated.
    triangle_defect: float | None = None
    # (i, k, j): endpoints i,k with intermediate j realizing the defect.
    worst_triple: tuple[int, int, int] | None = None
    triangle_ok: bool | None = None
    messages: tuple[str, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        ok = self.symmetric and self.zero_diagonal and self.nonnegative
        if self.triangle_ok is not None:
            ok = ok and self.triangle_ok
        return ok


def validate_metric(D, check_triangle: bool = False, tol: float = 1e-9) -> ValidationReport:
    """Diagnose metric-axiom violations of a square matrix.

    Reports symmetry, zero-diagonal and nonnegativity findings, and when
    ``check_triangle`` is set, the worst triangle-inequality defect
    ``max_{i,j,k} d(i,k) - d(i,j) - d(j,k)`` (positive = violated) with a
    witnessing triple.  Violations are reported, not raised; only a
    non-square input is an error.
    """
    D = _as_square_matrix(D)
    n = D.shape[0]
    messages = []

    asym = np.abs(D - D.T)
    worst_asym = float(asym.max()) if n else 0.0
    asym_at = None
    if worst_asym > tol:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        asym_at = (int(i), int(j))
        messages.append(f"symmetry violation at {asym_at}: |D[i,j]-D[j,i]| = {worst_asym:.6g}")
    symmetric = worst_asym <= tol

    diag = np.abs(np.diag(D))
    worst_diag = float(diag.max()) if n else 0.0
    diag_at = None
    if worst_diag > tol:
        diag_at = int(np.argmax(diag))
        messages.append(f"nonzero diagonal at {diag_at}: {worst_diag:.6g}")
    zero_diagonal = worst_diag <= tol

    min_entry = float(D.min()) if n else 0.0
    nonnegative = min_entry >= -tol
    if not nonnegative:
        messages.append(f"negative entry: {min_entry:.6g}")

    defect = None
    worst_triple = None
    triangle_ok = None
    if check_triangle:
        defect = -math.inf if n else 0.0
        for j in range(n):
            # d(i,k) - d(i,j) - d(j,k) for all endpoint pairs (i,k) via j
            gap = D - (D[:, j][:, None] + D[j, :][None, :])
            g = float(gap.max())
            if g > defect:
                i, k = np.unravel_index(int(np.argmax(gap)), gap.shape)
                defect = g
                worst_triple = (int(i), int(k), int(j))
        triangle_ok = defect <= tol
        if not triangle_ok:
            messages.append(
                f"triangle inequality defect {defect:.6g} at triple {worst_triple}"
            )

    return ValidationReport(
        n_points=n,
        symmetric=symmetric,
        worst_asymmetry=worst_asym,
        worst_asymmetry_at=asym_at,
        zero_diagonal=zero_diagonal,
        worst_diagonal=worst_diag,
        worst_diagonal_at=diag_at,
        nonnegative=nonnegative,
        min_entry=min_entry,
        triangle_defect=defect,
        worst_triple=worst_triple,
        triangle_ok=triangle_ok,
        messages=tuple(messages),
    )


def p_diameter(space: MetricMeasureSpace, p: float) -> float:
    """Weighted L^p size of a space; the plain diameter at p = inf.

    For finite p this is ``(sum_{i,k} d(i,k)^p w_i w_k)^(1/p)``; it is
    nondecreasing in p and scales linearly with the distances.
    """
    if p < 1:
        raise ValueError(f"p must be in [1, inf], got {p}")
    D = space.distances
    if math.isinf(p):
        return float(D.max()) if D.size else 0.0
    w = space.weights
    total = float(np.einsum("ik,i,k->", D**p, w, w))
    return total ** (1.0 / p)
