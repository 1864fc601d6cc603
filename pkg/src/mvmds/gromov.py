"""Brute-force Gromov-Hausdorff-type distances on small finite spaces.

Maps between finite spaces are plain integer index arrays (``f[i]`` is the
target index of source point i).  The one-sided distance ``srgh`` is the
minimum function distortion over all m^n maps, which coincides with the
infimum over semi-correspondences (any semi-correspondence can be thinned
to a map without increasing the sup-distortion).  The two-sided ``mgh``
symmetrizes by taking the worse direction and is a genuine metric, unlike
the finite-p transport distortions.

Enumerations are guarded by ``n * log2(m) <= 30``; exhaustive relation
enumeration is kept only as an oracle for tiny spaces.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import CapacityError
from .mmspace import MetricMeasureSpace
from .srgw import SemiCoupling, coupling_from_map, distortion_inf

ENUMERATION_BUDGET_BITS = 30
RELATION_ORACLE_CELLS = 9
_BATCH = 1 << 14


def _as_matrix(space) -> np.ndarray:
    if isinstance(space, MetricMeasureSpace):
        return space.distances
    D = np.asarray(space, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {D.shape}")
    return D


def function_distortion(f, D_X, D_Y) -> float:
    """Half the sup over point pairs of |d_X(i,k) - d_Y(f(i),f(k))|."""
    D_X = _as_matrix(D_X)
    D_Y = _as_matrix(D_Y)
    f = np.asarray(f, dtype=int)
    if f.shape != (D_X.shape[0],):
        raise ValueError("map length must match the source space")
    if f.size and (f.min() < 0 or f.max() >= D_Y.shape[0]):
        raise ValueError("map targets out of range")
    return 0.5 * float(np.max(np.abs(D_X - D_Y[np.ix_(f, f)]), initial=0.0))


def relation_distortion(R, D_X, D_Y) -> float:
    """Half the sup over pairs of related pairs of |d_X - d_Y|."""
    D_X = _as_matrix(D_X)
    D_Y = _as_matrix(D_Y)
    pairs = np.asarray(sorted(R), dtype=int)
    if pairs.size == 0:
        raise ValueError("relation must be nonempty")
    xs, ys = pairs[:, 0], pairs[:, 1]
    dx = D_X[np.ix_(xs, xs)]
    dy = D_Y[np.ix_(ys, ys)]
    return 0.5 * float(np.max(np.abs(dx - dy)))


def _guard_enumeration(n: int, m: int):
    if n * math.log2(max(m, 1)) > ENUMERATION_BUDGET_BITS:
        raise CapacityError(
            f"enumerating {m}^{n} maps exceeds the size guard "
            f"(n * log2(m) = {n * math.log2(max(m, 1)):.1f} > {ENUMERATION_BUDGET_BITS})"
        )


def _map_batches(n: int, m: int):
    """Lexicographically ordered batches of all m^n maps as (B, n) arrays."""
    total = m**n
    place = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, _BATCH):
        ts = np.arange(start, min(total, start + _BATCH), dtype=np.int64)
        yield (ts[:, None] // place[None, :]) % m


def srgh(X, Y) -> float:
    """One-sided Gromov-Hausdorff distance: min function distortion X -> Y."""
    D_X = _as_matrix(X)
    D_Y = _as_matrix(Y)
    n, m = D_X.shape[0], D_Y.shape[0]
    _guard_enumeration(n, m)
    best = math.inf
    for F in _map_batches(n, m):
        target = D_Y[F[:, :, None], F[:, None, :]]
        dis = np.max(np.abs(D_X[None, :, :] - target), axis=(1, 2))
        best = min(best, float(dis.min()))
    return 0.5 * best


def mgh(X, Y) -> float:
    """Two-sided distance: worse of the two one-sided enumerations."""
    return max(srgh(X, Y), srgh(Y, X))


def srgw_inf_bruteforce(X: MetricMeasureSpace, D_Y) -> tuple[float, np.ndarray]:
    """Exact sup-distortion transport value via Monge-map enumeration.

    Minimizes ``distortion_inf`` of the induced semi-coupling over all
    maps; for fully supported weights this equals :func:`srgh` exactly.
    Returns the value and the lexicographically smallest minimizing map.
    """
    if not isinstance(X, MetricMeasureSpace):
        raise ValueError("X must be a MetricMeasureSpace")
    D_X = X.distances
    D_Y = _as_matrix(D_Y)
    n, m = D_X.shape[0], D_Y.shape[0]
    _guard_enumeration(n, m)
    best = math.inf
    best_map = None
    for targets in itertools.product(range(m), repeat=n):
        coupling = coupling_from_map(np.array(targets), X.weights, m)
        value = distortion_inf(coupling, D_X, D_Y)
        if value < best:
            best = value
            best_map = np.array(targets, dtype=int)
    return best, best_map


def srgh_relation_oracle(X, Y) -> float:
    """Min distortion over ALL semi-correspondences, enumerated exhaustively.

    Only feasible for n*m <= 9 cells; retained as an independent oracle
    for the map-enumeration shortcut used by :func:`srgh`.
    """
    D_X = _as_matrix(X)
    D_Y = _as_matrix(Y)
    n, m = D_X.shape[0], D_Y.shape[0]
    if n * m > RELATION_ORACLE_CELLS:
        raise CapacityError(f"relation oracle limited to {RELATION_ORACLE_CELLS} cells")
    cells = [(i, j) for i in range(n) for j in range(m)]
    best = math.inf
    for bits in range(1, 1 << (n * m)):
        R = [cells[t] for t in range(n * m) if bits >> t & 1]
        if len({i for i, _ in R}) != n:
            continue  # not surjective onto the source
        best = min(best, relation_distortion(R, D_X, D_Y))
    return best


def asymmetric_hausdorff(A, B, D_Z) -> float:
    """Directed Hausdorff value sup_{a in A} inf_{b in B} d_Z(a, b).

    The max over the two directions is the standard Hausdorff distance.
    """
    D_Z = _as_matrix(D_Z)
    A = np.asarray(A, dtype=int)
    B = np.asarray(B, dtype=int)
    if A.size == 0 or B.size == 0:
        raise ValueError("index sets must be nonempty")
    return float(np.max(np.min(D_Z[np.ix_(A, B)], axis=1)))


def glued_metric(D_X, D_Y, R, epsilon: float | None = None) -> np.ndarray:
    """Glue two spaces along a semi-correspondence into one ambient matrix.

    Cross distances are ``eps + min_{(x',y') in R} d_X(x,x') + d_Y(y',y)``
    with ``eps`` defaulting to the relation's distortion; the result is a
    pseudometric on the disjoint union in which the directed Hausdorff
    distance from the X block to the Y block is at most ``eps``.
    """
    D_X = _as_matrix(D_X)
    D_Y = _as_matrix(D_Y)
    pairs = np.asarray(sorted(R), dtype=int)
    if pairs.size == 0:
        raise ValueError("relation must be nonempty")
    if epsilon is None:
        epsilon = relation_distortion(R, D_X, D_Y)
    n, m = D_X.shape[0], D_Y.shape[0]
    xs, ys = pairs[:, 0], pairs[:, 1]
    # cross[i, j] = min over relation cells of D_X[i, x'] + D_Y[y', j]
    cross = np.min(D_X[:, xs][:, :, None] + D_Y[ys, :][None, :, :], axis=1) + epsilon
    Z = np.zeros((n + m, n + m))
    Z[:n, :n] = D_X
    Z[n:, n:] = D_Y
    Z[:n, n:] = cross
    Z[n:, :n] = cross.T
    return Z
