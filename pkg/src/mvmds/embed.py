"""Manifold embedding by transport warm start plus Riemannian Adam.

The pipeline embeds a finite metric space into a circle, sphere, or
Euclidean space in two stages: first solve a semi-relaxed transport
problem against a jittered grid on the target (whose rounded map places
every source point on a grid node), then descend the stress functional

    stress(y_1..y_n) = 1/2 * sum_{i,j} (d_X(x_i,x_j) - d_Y(y_i,y_j))^2

with Adam, keeping moments in chart coordinates (angles on the circle,
ambient unit vectors on the sphere) and retracting after every step.  An
optional scale variable (optimized as log radius so it stays positive)
lets the target's size be learned alongside the configuration.

``dis2`` on results is the transport distortion of the embedding map
itself, which for uniform weights equals sqrt(stress/2)/n.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DivergenceError
from .manifolds import (
    TWO_PI,
    Circle,
    Euclidean,
    Manifold,
    Sphere,
    grid,
    pairwise_distances,
    random_points,
    retract,
    wrap_angle,
)
from .mmspace import MetricMeasureSpace
from .srgw import SolverConfig, SolverResult, solve_srgw2

# Pair angles this close to 0 or pi (radians) get a zero subgradient.
_CUT_TOL = 1e-9


@dataclass(frozen=True)
class EmbeddingProblem:
    """A space to embed, the target manifold, and warm-start knobs."""

    space: MetricMeasureSpace
    manifold: Manifold
    learn_scale: bool = False
    grid_count: int = 100
    jitter: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.grid_count < 1:
            raise ValueError("grid_count must be at least 1")
        if not 0 <= self.jitter < 0.5:
            raise ValueError("jitter must be in [0, 0.5)")


@dataclass(frozen=True)
class OptimizerConfig:
    """Adam hyperparameters and stopping rule for the descent stage."""

    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    max_steps: int = 1000
    rel_threshold: float = 1e-3

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        if self.max_steps < 0:
            raise ValueError("max_steps must be nonnegative")


@dataclass(frozen=True)
class EmbeddingResult:
    """Final configuration with its stress history.

    ``trace`` records the stress at initialization and after every Adam
    step; its last entry is the stress of the returned configuration.
    ``circular_coords`` (angle / 2pi) is filled for circle targets.
    """

    points: np.ndarray
    scale: float
    stress: float
    dis2: float
    trace: tuple[float, ...]
    circular_coords: np.ndarray | None = None


def _with_scale(manifold: Manifold, radius: float) -> Manifold:
    if isinstance(manifold, Euclidean):
        return manifold
    return replace(manifold, radius=radius)


def stress(points, manifold: Manifold, D_X) -> float:
    """Half-sum of squared distance discrepancies over all ordered pairs."""
    D_X = np.asarray(D_X, dtype=float)
    D = pairwise_distances(manifold, points)
    if D.shape != D_X.shape:
        raise ValueError("point count does not match the distance matrix")
    diff = D_X - D
    return 0.5 * float(np.sum(diff * diff))


def _gradient_parts(points, manifold: Manifold, D_X):
    """Residuals and per-point stress gradient, vectorized per manifold."""
    if isinstance(manifold, Circle):
        theta = np.asarray(points, dtype=float)
        delta = np.mod(theta[:, None] - theta[None, :] + math.pi, TWO_PI) - math.pi
        dist = manifold.radius * np.abs(delta)
        sign = np.sign(delta)
        sign[np.abs(delta) < _CUT_TOL] = 0.0
        sign[np.abs(np.abs(delta) - math.pi) < _CUT_TOL] = 0.0
        residual = D_X - dist
        grads = -2.0 * manifold.radius * np.sum(residual * sign, axis=1)
        return residual, dist, grads

    if isinstance(manifold, Sphere):
        U = np.asarray(points, dtype=float)
        dots = np.clip(U @ U.T, -1.0, 1.0)
        ang = np.arccos(dots)
        dist = manifold.radius * ang
        residual = D_X - dist
        sin_ang = np.sqrt(np.maximum(0.0, 1.0 - dots * dots))
        usable = (ang > _CUT_TOL) & (math.pi - ang > _CUT_TOL)
        inv = np.where(usable, 1.0 / np.where(usable, sin_ang, 1.0), 0.0)
        A = residual * manifold.radius * inv
        np.fill_diagonal(A, 0.0)
        grads = 2.0 * (A @ U - (np.sum(A * dots, axis=1))[:, None] * U)
        return residual, dist, grads

    Y = np.asarray(points, dtype=float)
    diff = Y[:, None, :] - Y[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    residual = D_X - dist
    with np.errstate(divide="ignore", invalid="ignore"):
        B = np.where(dist > 0, residual / np.where(dist > 0, dist, 1.0), 0.0)
    grads = -2.0 * (B.sum(axis=1)[:, None] * Y - B @ Y)
    return residual, dist, grads


def stress_gradient(points, manifold: Manifold, D_X, learn_scale: bool = False):
    """Gradient of the stress with respect to the points (and log scale).

    Point gradients are tangent vectors in the chart used by the
    optimizer; the second return value is d(stress)/d(log radius) when
    ``learn_scale`` is set (None otherwise, and unsupported for Euclidean
    targets, which carry no scale).
    """
    D_X = np.asarray(D_X, dtype=float)
    residual, dist, grads = _gradient_parts(points, manifold, D_X)
    if not learn_scale:
        return grads, None
    if isinstance(manifold, Euclidean):
        raise ValueError("Euclidean targets have no scale parameter")
    return grads, -float(np.sum(residual * dist))


def _distortion2(points, manifold: Manifold, space: MetricMeasureSpace) -> float:
    """dis_2 of the semi-coupling induced by the embedding map."""
    D = pairwise_distances(manifold, points)
    diff = space.distances - D
    w = space.weights
    return 0.5 * math.sqrt(max(0.0, float(np.einsum("ik,i,k->", diff * diff, w, w))))


def _finish(points, manifold, radius, space, trace) -> EmbeddingResult:
    scaled = _with_scale(manifold, radius)
    final_stress = trace[-1]
    coords = None
    if isinstance(manifold, Circle):
        coords = wrap_angle(np.asarray(points, dtype=float)) / TWO_PI
    return EmbeddingResult(
        points=np.asarray(points, dtype=float),
        scale=radius if not isinstance(manifold, Euclidean) else 1.0,
        stress=final_stress,
        dis2=_distortion2(points, scaled, space),
        trace=tuple(trace),
        circular_coords=coords,
    )


def optimize(problem: EmbeddingProblem, init_points, init_scale: float,
             cfg: OptimizerConfig | None = None) -> EmbeddingResult:
    """Descend the stress from a given configuration with Adam.

    Stops when the relative stress change falls below
    ``cfg.rel_threshold`` or after ``cfg.max_steps``.  If a step blows
    the stress up past ten times the best seen, the learning rate is
    halved and descent continues; the best configuration encountered is
    the one returned.  A non-finite stress raises
    :class:`~mvmds.errors.DivergenceError` with the trace attached.
    """
    if cfg is None:
        cfg = OptimizerConfig()
    manifold = problem.manifold
    D_X = problem.space.distances
    coords = np.array(init_points, dtype=float)
    n = D_X.shape[0]
    if coords.shape[0] != n:
        raise ValueError("init_points count does not match the space")
    learn = problem.learn_scale and not isinstance(manifold, Euclidean)
    radius = 1.0 if isinstance(manifold, Euclidean) else float(init_scale)
    log_radius = math.log(radius) if radius > 0 else 0.0

    current = stress(coords, _with_scale(manifold, radius), D_X)
    trace = [current]
    best = current
    best_state = (coords.copy(), radius)
    if current == 0.0 or cfg.max_steps == 0:
        return _finish(coords, manifold, radius, problem.space, trace)

    m_pts = np.zeros_like(coords)
    v_pts = np.zeros_like(coords)
    m_s = v_s = 0.0
    lr = cfg.learning_rate
    previous = current
    for step in range(1, cfg.max_steps + 1):
        scaled = _with_scale(manifold, radius)
        grads, scale_grad = stress_gradient(coords, scaled, D_X, learn_scale=learn)

        m_pts = cfg.beta1 * m_pts + (1 - cfg.beta1) * grads
        v_pts = cfg.beta2 * v_pts + (1 - cfg.beta2) * grads * grads
        m_hat = m_pts / (1 - cfg.beta1**step)
        v_hat = v_pts / (1 - cfg.beta2**step)
        coords = retract(manifold, coords, -lr * m_hat / (np.sqrt(v_hat) + cfg.epsilon))

        if learn:
            m_s = cfg.beta1 * m_s + (1 - cfg.beta1) * scale_grad
            v_s = cfg.beta2 * v_s + (1 - cfg.beta2) * scale_grad * scale_grad
            log_radius -= lr * (m_s / (1 - cfg.beta1**step)) / (
                math.sqrt(v_s / (1 - cfg.beta2**step)) + cfg.epsilon)
            if not -690.0 < log_radius < 690.0:
                raise DivergenceError(
                    "learned scale left the representable range", trace=trace)
            radius = math.exp(log_radius)

        current = stress(coords, _with_scale(manifold, radius), D_X)
        if not math.isfinite(current):
            raise DivergenceError("stress became non-finite", trace=trace)
        trace.append(current)
        if current < best:
            best = current
            best_state = (coords.copy(), radius)
        elif best > 0 and current > 10.0 * best:
            lr *= 0.5
        if abs(previous - current) < cfg.rel_threshold * max(previous, 1e-300):
            break
        previous = current

    coords, radius = best_state
    if trace[-1] != best:
        trace.append(best)
    return _finish(coords, manifold, radius, problem.space, trace)


def srgw_gd(problem: EmbeddingProblem, cfg: OptimizerConfig | None = None,
            solver_config: SolverConfig | None = None) -> tuple[EmbeddingResult, SolverResult]:
    """Warm-started embedding: transport onto a grid, then Adam descent.

    Builds a jittered grid on the target, solves the p = 2 semi-relaxed
    transport problem from the space onto the grid, initializes each point
    at its rounded grid node, and descends the stress.  Returns the
    embedding together with the transport solve (whose trace and map the
    run metadata records).  Deterministic given ``problem.seed``.
    """
    manifold = problem.manifold
    n = problem.space.n_points
    if problem.grid_count < n:
        warnings.warn(
            f"grid_count={problem.grid_count} is below the number of points ({n}); "
            "the warm start cannot be injective", stacklevel=2)
    nodes = grid(manifold, problem.grid_count, problem.jitter, problem.seed)
    D_nodes = pairwise_distances(manifold, nodes)
    solve = solve_srgw2(problem.space, D_nodes, solver_config or SolverConfig())
    if solve.monge_map is None:
        raise DivergenceError("transport solve produced no usable map",
                              trace=solve.objective_trace)
    init_points = nodes[np.asarray(solve.monge_map, dtype=int)]
    init_scale = 1.0 if isinstance(manifold, Euclidean) else manifold.radius
    result = optimize(problem, init_points, init_scale, cfg)
    return result, solve


def random_init_gd(problem: EmbeddingProblem, trials: int,
                   cfg: OptimizerConfig | None = None) -> list[EmbeddingResult]:
    """Independent descents from uniform random initializations.

    Trial t draws its start from a generator seeded by (problem.seed, t).
    A diverging trial is reported as a warning and skipped; summarize the
    returned results with min/max of ``dis2`` across trials.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    manifold = problem.manifold
    n = problem.space.n_points
    init_scale = 1.0 if isinstance(manifold, Euclidean) else manifold.radius
    results = []
    for trial in range(trials):
        rng = np.random.default_rng([problem.seed, trial])
        init = random_points(manifold, n, rng)
        try:
            results.append(optimize(problem, init, init_scale, cfg))
        except DivergenceError as exc:
            warnings.warn(f"trial {trial} diverged after {len(exc.trace)} steps",
                          stacklevel=2)
    if not results:
        raise DivergenceError("all random-initialization trials diverged")
    return results


def circular_coordinate(manifold: Manifold, point):
    """Angle normalized to [0, 1), counter-clockwise from (1, 0)."""
    if not isinstance(manifold, Circle):
        raise ValueError("circular coordinates require a circle target")
    return wrap_angle(point) / TWO_PI
