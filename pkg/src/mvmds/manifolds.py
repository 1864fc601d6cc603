"""Target-space geometry for circle, sphere, and Euclidean embeddings.

Points are stored in singularity-free charts: an angle in [0, 2pi) on the
circle, a unit 3-vector on the sphere (the radius lives on the manifold
object), and a plain coordinate tuple in Euclidean space.  Arrays of points
stack these along the first axis.

Provides geodesic distances, the gradient of the distance with respect to
one endpoint (zero at coincidence and at the cut locus), a retraction that
returns a step to the chart (angle wrapping, renormalization), seeded
jittered grids for warm starts, and pairwise distance matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

# Angular tolerance below which a pair counts as coincident/antipodal and
# the distance gradient is taken to be zero (measure-zero subgradient set).
CUT_LOCUS_TOL = 1e-9


@dataclass(frozen=True)
class Circle:
    """Circle of a given radius; points are angles in [0, 2pi)."""

    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class Sphere:
    """Round 2-sphere of a given radius; points are unit 3-vectors."""

    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True)
class Euclidean:
    """Flat R^dim with the straight-line metric."""

    dim: int = 2

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be at least 1")


Manifold = Circle | Sphere | Euclidean


def parse_manifold(text: str) -> Manifold:
    """Parse a manifold spec string: ``circle:r=1.0``, ``sphere:r=6371``,
    ``euclidean:d=2``.  The parameter may be omitted (radius 1, dim 2)."""
    kind, _, param = text.strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "circle":
            return Circle(float(param.removeprefix("r=")) if param else 1.0)
        if kind == "sphere":
            return Sphere(float(param.removeprefix("r=")) if param else 1.0)
        if kind == "euclidean":
            return Euclidean(int(param.removeprefix("d=")) if param else 2)
    except ValueError as exc:
        raise ValueError(f"bad manifold parameter in {text!r}: {exc}") from None
    raise ValueError(f"unknown manifold kind {kind!r} (circle | sphere | euclidean)")


def manifold_spec(manifold: Manifold) -> str:
    """Inverse of :func:`parse_manifold`."""
    if isinstance(manifold, Circle):
        return f"circle:r={manifold.radius!r}"
    if isinstance(manifold, Sphere):
        return f"sphere:r={manifold.radius!r}"
    return f"euclidean:d={manifold.dim}"


def wrap_angle(theta):
    """Wrap angles into [0, 2pi)."""
    return np.mod(theta, TWO_PI)


def signed_angle_difference(a, b):
    """Shortest signed angular difference a - b, in (-pi, pi]."""
    d = np.mod(np.asarray(a) - np.asarray(b) + math.pi, TWO_PI) - math.pi
    # mod maps the boundary to -pi; report +pi for a symmetric convention
    return np.where(d == -math.pi, math.pi, d)


def geodesic_distance(manifold: Manifold, p, q) -> float:
    """Geodesic distance between two points of the manifold."""
    if isinstance(manifold, Circle):
        delta = abs(float(signed_angle_difference(p, q)))
        return manifold.radius * delta
    if isinstance(manifold, Sphere):
        s = float(np.clip(np.dot(p, q), -1.0, 1.0))
        return manifold.radius * math.acos(s)
    return float(np.linalg.norm(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)))


def distance_gradient(manifold: Manifold, p, q):
    """Gradient of ``d(p, q)`` with respect to ``p``, plus the scale term.

    Returns ``(tangent, scale_derivative)`` where ``tangent`` is a scalar
    for the circle and an ambient tangent vector for sphere/Euclidean, and
    ``scale_derivative`` is ``d(d)/d(log radius) = d`` for circle and
    sphere (0 for Euclidean, which has no scale parameter).  At coincidence
    or at the cut locus the tangent is zero.
    """
    if isinstance(manifold, Circle):
        delta = float(signed_angle_difference(p, q))
        d = manifold.radius * abs(delta)
        if abs(delta) < CUT_LOCUS_TOL or abs(abs(delta) - math.pi) < CUT_LOCUS_TOL:
            return 0.0, 0.0
        return manifold.radius * math.copysign(1.0, delta), d
    if isinstance(manifold, Sphere):
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        s = float(np.clip(np.dot(p, q), -1.0, 1.0))
        ang = math.acos(s)
        d = manifold.radius * ang
        if ang < CUT_LOCUS_TOL or math.pi - ang < CUT_LOCUS_TOL:
            return np.zeros(3), 0.0
        # project -r*q/sqrt(1-s^2) onto the tangent plane at p
        tangent = -manifold.radius * (q - s * p) / math.sqrt(1.0 - s * s)
        return tangent, d
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    diff = p - q
    d = float(np.linalg.norm(diff))
    if d == 0.0:
        return np.zeros_like(diff), 0.0
    return diff / d, 0.0


def retract(manifold: Manifold, p, step):
    """Move from ``p`` by a tangent ``step`` and re-enter the chart.

    Works elementwise on arrays of points.  Circle: add and wrap.  Sphere:
    add in ambient coordinates and renormalize (a zero result is an error).
    Euclidean: add.
    """
    if isinstance(manifold, Circle):
        return wrap_angle(np.asarray(p, dtype=float) + step)
    if isinstance(manifold, Sphere):
        v = np.asarray(p, dtype=float) + step
        norm = np.linalg.norm(v, axis=-1, keepdims=True)
        if np.any(norm < 1e-15):
            raise FloatingPointError("sphere retraction produced a zero vector")
        return v / norm
    return np.asarray(p, dtype=float) + step


def grid(manifold: Manifold, count: int, jitter: float = 0.1, seed: int = 0) -> np.ndarray:
    """Deterministic quasi-uniform grid of ``count`` points, optionally
    perturbed by uniform noise of amplitude ``jitter`` times the nominal
    spacing (breaks exact symmetries that stall the transport solver)."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if not 0 <= jitter < 0.5:
        raise ValueError("jitter must be in [0, 0.5)")
    rng = np.random.default_rng(seed)

    if isinstance(manifold, Circle):
        spacing = TWO_PI / count
        angles = np.arange(count) * spacing
        if jitter > 0:
            angles = angles + rng.uniform(-1.0, 1.0, count) * (jitter * spacing)
        return wrap_angle(angles)

    if isinstance(manifold, Sphere):
        k = np.arange(count)
        z = 1.0 - (2.0 * k + 1.0) / count
        phi = TWO_PI * k / GOLDEN_RATIO
        rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        pts = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
        if jitter > 0:
            spacing = math.sqrt(4.0 * math.pi / count)
            pts = pts + rng.uniform(-1.0, 1.0, (count, 3)) * (jitter * spacing)
            norms = np.linalg.norm(pts, axis=1, keepdims=True)
            pts = pts / norms
        return pts

    d = manifold.dim
    per_axis = max(1, math.ceil(count ** (1.0 / d)))
    if per_axis == 1:
        axis = np.array([0.5])
        spacing = 1.0
    else:
        axis = np.linspace(0.0, 1.0, per_axis)
        spacing = 1.0 / (per_axis - 1)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)[:count]
    if jitter > 0:
        pts = pts + rng.uniform(-1.0, 1.0, pts.shape) * (jitter * spacing)
    return pts


def random_points(manifold: Manifold, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random points (unit cube for Euclidean)."""
    if isinstance(manifold, Circle):
        return rng.uniform(0.0, TWO_PI, count)
    if isinstance(manifold, Sphere):
        v = rng.normal(size=(count, 3))
        return v / np.linalg.norm(v, axis=1, keepdims=True)
    return rng.uniform(0.0, 1.0, (count, manifold.dim))


def pairwise_distances(manifold: Manifold, points) -> np.ndarray:
    """Exactly symmetric zero-diagonal matrix of geodesic distances."""
    points = np.asarray(points, dtype=float)
    if isinstance(manifold, Circle):
        delta = np.abs(points[:, None] - points[None, :])
        base = np.minimum(delta, TWO_PI - delta)
        D = manifold.radius * base
    elif isinstance(manifold, Sphere):
        dots = np.clip(points @ points.T, -1.0, 1.0)
        D = manifold.radius * np.arccos(dots)
    else:
        diff = points[:, None, :] - points[None, :, :]
        D = np.sqrt(np.sum(diff * diff, axis=-1))
    # mirror the strict upper triangle for bitwise symmetry
    U = np.triu(D, 1)
    return U + U.T
