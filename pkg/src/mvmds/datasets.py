"""Deterministic synthetic datasets and geodetic ground truth.

``rotated_pattern`` builds a metric space of rotated copies of a seeded
planar point pattern, with the distance between two copies given by the
minimum-cost point matching (root of the summed squared displacement over
the best pairing).  Matching over pairings, rather than comparing points
by index, makes the distance a genuine pseudometric on patterns and gives
a pattern with 2-fold symmetry distance ~0 to its half-turn.

``wgs84_geodesic`` is the inverse geodesic problem on the WGS-84
ellipsoid, with a spherical fallback when the iteration does not converge
(near-antipodal pairs).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .manifolds import Manifold, pairwise_distances, random_points
from .mmspace import MetricMeasureSpace

WGS84_SEMI_MAJOR_KM = 6378.137
WGS84_FLATTENING = 1.0 / 298.257223563
SPHERICAL_FALLBACK_RADIUS_KM = 6371.0
_VINCENTY_MAX_ITER = 200
_VINCENTY_TOL = 1e-12


@dataclass(frozen=True)
class GeoPoint:
    """Geodetic coordinates in degrees."""

    latitude: float
    longitude: float

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude out of range: {self.latitude}")
        if not -180.0 <= self.longitude < 180.0:
            raise ValueError(f"longitude out of range: {self.longitude}")


def anchor_pattern(n_anchor: int, seed) -> np.ndarray:
    """The seeded planar pattern used by :func:`rotated_pattern`."""
    if n_anchor < 2:
        raise ValueError("n_anchor must be at least 2")
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n_anchor, 2))


def rotate_pattern(points, angle: float) -> np.ndarray:
    """Rotate a planar pattern counter-clockwise about the origin."""
    c, s = math.cos(angle), math.sin(angle)
    R = np.array([[c, -s], [s, c]])
    return np.asarray(points, dtype=float) @ R.T


def pattern_distance(a, b) -> float:
    """Min-cost matching distance between two equal-size planar patterns."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("patterns must have the same shape")
    cost = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=-1)
    rows, cols = linear_sum_assignment(cost)
    return math.sqrt(float(cost[rows, cols].sum()))


def rotated_pattern(n_anchor: int, n_samples: int, seed,
                    angles=None) -> MetricMeasureSpace:
    """Metric space of rotated copies of one seeded pattern.

    Copies are taken at uniform random angles (or at the given ones), and
    the distance between two copies depends only on their angle
    difference, so the space has the geometry of a circle with a chordal
    metric.  Weights are uniform.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    rng = np.random.default_rng(seed)
    pattern = rng.standard_normal((n_anchor, 2))
    if n_anchor < 2:
        raise ValueError("n_anchor must be at least 2")
    if angles is None:
        angles = rng.uniform(0.0, 2.0 * math.pi, n_samples)
    else:
        angles = np.asarray(angles, dtype=float)
        if angles.shape != (n_samples,):
            raise ValueError("angles length must equal n_samples")
    copies = [rotate_pattern(pattern, float(t)) for t in angles]
    D = np.zeros((n_samples, n_samples))
    for i in range(n_samples):
        for j in range(i + 1, n_samples):
            D[i, j] = pattern_distance(copies[i], copies[j])
    D = D + D.T
    return MetricMeasureSpace(D)


def sample_manifold(manifold: Manifold, n: int, noise_sd: float = 0.0,
                    seed=0) -> tuple[np.ndarray, MetricMeasureSpace]:
    """Uniform seeded samples on a manifold with optionally noisy distances.

    Gaussian noise of the given standard deviation is added to the
    geodesic matrix, which is then symmetrized, re-zeroed on the diagonal,
    and floored at zero.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    points = random_points(manifold, n, rng)
    D = pairwise_distances(manifold, points)
    if noise_sd > 0:
        D = D + rng.normal(0.0, noise_sd, D.shape)
        D = 0.5 * (D + D.T)
        np.fill_diagonal(D, 0.0)
        np.maximum(D, 0.0, out=D)
    return points, MetricMeasureSpace(D)


def _spherical_fallback_km(lat1, lon1, lat2, lon2) -> float:
    half_dlat = 0.5 * (lat2 - lat1)
    half_dlon = 0.5 * (lon2 - lon1)
    h = math.sin(half_dlat) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(half_dlon) ** 2
    return 2.0 * SPHERICAL_FALLBACK_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def wgs84_geodesic(a: GeoPoint, b: GeoPoint) -> float:
    """Inverse-geodesic distance on the WGS-84 ellipsoid, in kilometers.

    Iterates the classical inverse solution; when it fails to converge
    within 200 steps (possible near antipodal pairs) the spherical
    distance at radius 6371 km is returned instead and a RuntimeWarning
    flags the fallback.
    """
    if a == b:
        return 0.0
    f = WGS84_FLATTENING
    major = WGS84_SEMI_MAJOR_KM
    minor = (1.0 - f) * major
    lat1, lon1 = math.radians(a.latitude), math.radians(a.longitude)
    lat2, lon2 = math.radians(b.latitude), math.radians(b.longitude)

    u1 = math.atan((1.0 - f) * math.tan(lat1))
    u2 = math.atan((1.0 - f) * math.tan(lat2))
    sin_u1, cos_u1 = math.sin(u1), math.cos(u1)
    sin_u2, cos_u2 = math.sin(u2), math.cos(u2)
    L = lon2 - lon1

    lam = L
    converged = False
    sin_sigma = cos_sigma = sigma = cos_sq_alpha = cos_2sigma_m = 0.0
    for _ in range(_VINCENTY_MAX_ITER):
        sin_lam, cos_lam = math.sin(lam), math.cos(lam)
        sin_sigma = math.sqrt(
            (cos_u2 * sin_lam) ** 2
            + (cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_lam) ** 2
        )
        if sin_sigma == 0.0:
            return 0.0  # coincident on the auxiliary sphere
        cos_sigma = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_lam
        sigma = math.atan2(sin_sigma, cos_sigma)
        sin_alpha = cos_u1 * cos_u2 * sin_lam / sin_sigma
        cos_sq_alpha = 1.0 - sin_alpha * sin_alpha
        if cos_sq_alpha == 0.0:
            cos_2sigma_m = 0.0  # equatorial geodesic
        else:
            cos_2sigma_m = cos_sigma - 2.0 * sin_u1 * sin_u2 / cos_sq_alpha
        C = f / 16.0 * cos_sq_alpha * (4.0 + f * (4.0 - 3.0 * cos_sq_alpha))
        lam_prev = lam
        lam = L + (1.0 - C) * f * sin_alpha * (
            sigma + C * sin_sigma * (
                cos_2sigma_m + C * cos_sigma * (-1.0 + 2.0 * cos_2sigma_m**2)))
        if abs(lam - lam_prev) < _VINCENTY_TOL:
            converged = True
            break

    if not converged:
        warnings.warn("inverse geodesic did not converge; falling back to "
                      "spherical distance at 6371 km", RuntimeWarning, stacklevel=2)
        return _spherical_fallback_km(lat1, lon1, lat2, lon2)

    u_sq = cos_sq_alpha * (major**2 - minor**2) / minor**2
    A = 1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)))
    B = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)))
    delta_sigma = B * sin_sigma * (
        cos_2sigma_m + B / 4.0 * (
            cos_sigma * (-1.0 + 2.0 * cos_2sigma_m**2)
            - B / 6.0 * cos_2sigma_m * (-3.0 + 4.0 * sin_sigma**2)
            * (-3.0 + 4.0 * cos_2sigma_m**2)))
    return minor * A * (sigma - delta_sigma)


def geodesic_distance_matrix(points: list[GeoPoint]) -> MetricMeasureSpace:
    """Pairwise WGS-84 distances as a metric-measure space (uniform weights)."""
    n = len(points)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = wgs84_geodesic(points[i], points[j])
    D = D + D.T
    return MetricMeasureSpace(D)
