"""Semi-relaxed Gromov-Wasserstein distortions, solver, and Monge rounding.

A semi-coupling is an n x m nonnegative plan whose row sums equal the
source weights; the column marginal is free.  The p-distortion of a plan
compares all pairs of source distances against all pairs of target
distances weighted by the plan:

    dis_p(plan) = 1/2 * (sum_{i,j,k,l} |DX[i,k] - DY[j,l]|^p
                         plan[i,j] plan[k,l]) ** (1/p)

and for p = inf the sup over pairs of support cells, halved.

For p = 2 the squared objective E = sum (DX - DY)^2 plan plan factorizes
into marginal terms plus a triple product DX @ plan @ DY, which gives an
O(n^2 m + n m^2) objective/gradient and powers a Frank-Wolfe solver: the
linear minimization over the semi-coupling polytope puts each row's mass
on one column (row argmin of the gradient), and the objective is an exact
quadratic along line segments, so the step size has a closed form.

Because optimal semi-couplings are attained by maps (Monge form) when the
target is finite, every solve ends with a rounding pass that replaces each
row with a Dirac chosen to minimize the row's contribution given the other
rows; each replacement is non-increasing in dis_p.

The quadratic objective is non-convex and plain conditional gradient from
the product coupling stalls on symmetric or homogeneous targets, so on
small problems the solver additionally builds deterministic candidate
maps by anchored greedy construction (fix the first point on each target
column in turn, then extend by minimal incremental cost) and polishes the
best map with single-move and pair-swap sweeps.  All of this is exact
arithmetic on the same objective and never degrades the rounded solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mmspace import MetricMeasureSpace, SYMMETRY_RTOL

ROW_SUM_TOL = 1e-10
# Rounded maps are accepted whenever they do not lose more than this.
ROUNDING_SLACK = 1e-12
# Anchored greedy candidates cost O(n^2 m^2); map polish costs
# O(n^2 max(n, m)) per sweep.  Both are skipped above these budgets.
_ANCHOR_BUDGET = 2e8
_POLISH_BUDGET = 5e7


def _check_distance_matrix(D, name: str) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {D.shape}")
    scale = max(1.0, float(np.max(np.abs(D))) if D.size else 0.0)
    if np.max(np.abs(D - D.T), initial=0.0) > SYMMETRY_RTOL * scale:
        raise ValueError(f"{name} must be symmetric")
    if np.max(np.abs(np.diag(D)), initial=0.0) > SYMMETRY_RTOL * scale:
        raise ValueError(f"{name} must have a zero diagonal")
    return D


@dataclass(frozen=True)
class SemiCoupling:
    """Nonnegative n x m plan whose row i sums to ``source_weights[i]``."""

    plan: np.ndarray
    source_weights: np.ndarray

    def __post_init__(self):
        plan = np.asarray(self.plan, dtype=float).copy()
        w = np.asarray(self.source_weights, dtype=float).copy()
        if plan.ndim != 2:
            raise ValueError(f"plan must be 2-d, got shape {plan.shape}")
        if w.shape != (plan.shape[0],):
            raise ValueError("source_weights length must match plan rows")
        if not (np.all(np.isfinite(plan)) and np.all(np.isfinite(w))):
            raise ValueError("plan and source_weights must be finite")
        scale = max(1.0, float(plan.max(initial=0.0)))
        if plan.min(initial=0.0) < -1e-12 * scale:
            raise ValueError("plan has negative entries")
        np.maximum(plan, 0.0, out=plan)
        if np.max(np.abs(plan.sum(axis=1) - w), initial=0.0) > ROW_SUM_TOL:
            raise ValueError("plan row sums do not match source_weights")
        plan.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "plan", plan)
        object.__setattr__(self, "source_weights", w)

    @property
    def shape(self) -> tuple[int, int]:
        return self.plan.shape

    def column_marginal(self) -> np.ndarray:
        return self.plan.sum(axis=0)


@dataclass(frozen=True)
class SolverConfig:
    """Frank-Wolfe solver knobs.

    ``support_threshold`` of None means the data-relative default
    ``1e-12 * max plan entry`` wherever a support cutoff is needed.
    """

    max_iterations: int = 1000
    rel_tolerance: float = 1e-9
    init_mode: str = "product"
    seed: int | None = None
    support_threshold: float | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.rel_tolerance <= 0:
            raise ValueError("rel_tolerance must be positive")
        if self.init_mode not in ("product", "random"):
            raise ValueError("init_mode must be 'product' or 'random'")


@dataclass(frozen=True)
class SolverResult:
    """Final coupling with its quadratic-objective trace.

    ``objective_trace`` holds E = sum (DX - DY)^2 plan plan per accepted
    iterate (nonincreasing; the last entry belongs to ``coupling``), and
    ``distortion`` = dis_2(coupling) = sqrt(E_final)/2.  ``monge_map`` is
    the rounded assignment when rounding did not lose accuracy (it cannot,
    up to roundoff), else None.
    """

    coupling: SemiCoupling
    objective_trace: tuple[float, ...]
    distortion: float
    monge_map: tuple[int, ...] | None


def product_coupling(source_weights, m: int) -> SemiCoupling:
    """The plan spreading each row's mass uniformly over all m columns."""
    w = np.asarray(source_weights, dtype=float)
    return SemiCoupling(np.outer(w, np.full(m, 1.0 / m)), w)


def random_coupling(source_weights, m: int, seed) -> SemiCoupling:
    """Random feasible plan: uniform entries rescaled row-wise."""
    w = np.asarray(source_weights, dtype=float)
    rng = np.random.default_rng(seed)
    raw = rng.random((w.shape[0], m))
    plan = raw * (w / raw.sum(axis=1))[:, None]
    return SemiCoupling(plan, w)


def coupling_from_map(targets, source_weights, m: int) -> SemiCoupling:
    """The semi-coupling induced by a map: row i is a Dirac at targets[i]."""
    w = np.asarray(source_weights, dtype=float)
    targets = np.asarray(targets, dtype=int)
    if targets.shape != w.shape:
        raise ValueError("targets length must match source_weights")
    if targets.size and (targets.min() < 0 or targets.max() >= m):
        raise ValueError("map targets out of range")
    plan = np.zeros((w.shape[0], m))
    plan[np.arange(w.shape[0]), targets] = w
    return SemiCoupling(plan, w)


def _support_threshold(plan: np.ndarray, threshold: float | None) -> float:
    if threshold is not None:
        return threshold
    return 1e-12 * float(plan.max(initial=0.0))


def _quadratic_objective(plan: np.ndarray, D_X: np.ndarray, D_Y: np.ndarray) -> float:
    """E(plan) = sum_{ijkl} (DX[i,k] - DY[j,l])^2 plan[i,j] plan[k,l]."""
    r = plan.sum(axis=1)
    c = plan.sum(axis=0)
    term_x = float(r @ (D_X * D_X) @ r)
    term_y = float(c @ (D_Y * D_Y) @ c)
    cross = float(np.sum(plan * (D_X @ plan @ D_Y)))
    return term_x + term_y - 2.0 * cross


def distortion_p(coupling: SemiCoupling, D_X, D_Y, p: float) -> float:
    """p-distortion of a semi-coupling for finite p >= 1."""
    if not 1 <= p < math.inf:
        raise ValueError(f"p must be in [1, inf), got {p}")
    D_X = _check_distance_matrix(D_X, "D_X")
    D_Y = _check_distance_matrix(D_Y, "D_Y")
    plan = coupling.plan
    n, m = plan.shape
    if D_X.shape[0] != n or D_Y.shape[0] != m:
        raise ValueError("distance matrices do not match the plan shape")
    if p == 2:
        total = max(0.0, _quadratic_objective(plan, D_X, D_Y))
        return 0.5 * math.sqrt(total)
    total = 0.0
    for i in range(n):
        # costs[k, j, l] = |DX[i,k] - DY[j,l]|^p
        costs = np.abs(D_X[i][:, None, None] - D_Y[None, :, :]) ** p
        per_column = np.einsum("kjl,kl->j", costs, plan)
        total += float(plan[i] @ per_column)
    return 0.5 * max(0.0, total) ** (1.0 / p)


def distortion_inf(coupling: SemiCoupling, D_X, D_Y, support_threshold: float | None = None) -> float:
    """Sup-distortion over pairs of support cells, halved."""
    D_X = _check_distance_matrix(D_X, "D_X")
    D_Y = _check_distance_matrix(D_Y, "D_Y")
    plan = coupling.plan
    if D_X.shape[0] != plan.shape[0] or D_Y.shape[0] != plan.shape[1]:
        raise ValueError("distance matrices do not match the plan shape")
    cells = np.argwhere(plan > _support_threshold(plan, support_threshold))
    if cells.shape[0] == 0:
        raise ValueError("coupling has empty support")
    rows, cols = cells[:, 0], cells[:, 1]
    worst = 0.0
    block = 2048
    for start in range(0, rows.shape[0], block):
        sl = slice(start, start + block)
        dx = D_X[np.ix_(rows[sl], rows)]
        dy = D_Y[np.ix_(cols[sl], cols)]
        worst = max(worst, float(np.max(np.abs(dx - dy))))
    return 0.5 * worst


def objective_and_gradient(coupling: SemiCoupling, D_X, D_Y) -> tuple[float, np.ndarray]:
    """Factorized squared objective E and its gradient.

    G[i,j] = 2 (sum_k DX[i,k]^2 mu_k + sum_l DY[j,l]^2 nu_l
               - 2 (DX @ plan @ DY)[i,j])
    with mu, nu the row/column marginals of the plan; E = <G, plan> / 2.
    """
    D_X = _check_distance_matrix(D_X, "D_X")
    D_Y = _check_distance_matrix(D_Y, "D_Y")
    plan = coupling.plan
    if D_X.shape[0] != plan.shape[0] or D_Y.shape[0] != plan.shape[1]:
        raise ValueError("distance matrices do not match the plan shape")
    mu = plan.sum(axis=1)
    nu = plan.sum(axis=0)
    row_term = (D_X * D_X) @ mu
    col_term = (D_Y * D_Y) @ nu
    cross = D_X @ plan @ D_Y
    grad = 2.0 * (row_term[:, None] + col_term[None, :] - 2.0 * cross)
    energy = 0.5 * float(np.sum(grad * plan))
    return energy, grad


def lmo(G, mu) -> SemiCoupling:
    """Linear minimization over the semi-coupling polytope.

    Vertices put each row's mass on a single column; the minimizer of
    <G, plan> sends row i to ``argmin_j G[i,j]`` (ties to the lowest
    column index).
    """
    G = np.asarray(G, dtype=float)
    mu = np.asarray(mu, dtype=float)
    return coupling_from_map(np.argmin(G, axis=1), mu, G.shape[1])


def exact_line_search(coupling: SemiCoupling, vertex: SemiCoupling, D_X, D_Y) -> float:
    """Optimal step toward ``vertex`` along E(plan + tau * delta).

    The objective is an exact quadratic a*tau^2 + b*tau + E with
    b = <grad, delta> and a the quadratic form of delta against itself;
    returns the minimizer clamped to [0, 1].
    """
    delta = vertex.plan - coupling.plan
    if np.max(np.abs(delta.sum(axis=1)), initial=0.0) > 1e-8:
        raise ValueError("couplings do not share row marginals")
    _, grad = objective_and_gradient(coupling, D_X, D_Y)
    b = float(np.sum(grad * delta))
    a = _quadratic_objective(delta, np.asarray(D_X, float), np.asarray(D_Y, float))
    if a > 0:
        return float(np.clip(-b / (2.0 * a), 0.0, 1.0))
    return 1.0 if b < 0 else 0.0


def _round_pass(plan, mu, D_X, D_Y, p, sup_threshold, targets):
    """One in-place sweep of per-row Dirac replacement; returns targets."""
    n, m = plan.shape
    dx_sq_mu = (D_X * D_X) @ mu if p == 2 else None
    dy_sq = D_Y * D_Y if p == 2 else None
    cross_cache = plan @ D_Y if p == 2 else None
    col_sums = plan.sum(axis=0)
    for i in range(n):
        if p == 2:
            others = col_sums - plan[i]
            quad = dy_sq @ others
            cross = D_X[i] @ cross_cache
            cost = dx_sq_mu[i] + quad - 2.0 * cross
        elif math.isinf(p):
            mask = plan > sup_threshold
            mask[i, :] = False
            cells = np.argwhere(mask)
            if cells.shape[0] == 0:
                cost = np.zeros(m)
            else:
                dx_vals = D_X[i, cells[:, 0]]
                cost = np.max(np.abs(dx_vals[:, None] - D_Y[cells[:, 1], :]), axis=0)
        else:
            without_i = plan.copy()
            without_i[i, :] = 0.0
            costs = np.abs(D_X[i][:, None, None] - D_Y[None, :, :]) ** p
            cost = np.einsum("kjl,kl->j", costs, without_i)
        j_hat = int(np.argmin(cost))
        col_sums -= plan[i]
        plan[i, :] = 0.0
        plan[i, j_hat] = mu[i]
        col_sums[j_hat] += mu[i]
        if p == 2:
            cross_cache[i, :] = mu[i] * D_Y[j_hat]
        targets[i] = j_hat
    return targets


def monge_round(coupling: SemiCoupling, D_X, D_Y, p: float,
                support_threshold: float | None = None,
                max_passes: int = 10) -> tuple[np.ndarray, SemiCoupling]:
    """Round a semi-coupling to one induced by a map, never increasing dis_p.

    Sweeps the rows in index order; row i is replaced by a Dirac at the
    column minimizing the summed (max, for p = inf) discrepancy of row i's
    source distances against the mass held by the other rows.  Sweeps
    repeat until the assignment is stable or ``max_passes`` is reached.
    """
    if p < 1:
        raise ValueError(f"p must be in [1, inf], got {p}")
    D_X = _check_distance_matrix(D_X, "D_X")
    D_Y = _check_distance_matrix(D_Y, "D_Y")
    plan = coupling.plan.copy()
    mu = coupling.source_weights
    n, m = plan.shape
    if D_X.shape[0] != n or D_Y.shape[0] != m:
        raise ValueError("distance matrices do not match the plan shape")
    if np.any(mu <= 0):
        raise ValueError("source weights must be fully supported")
    sup = _support_threshold(plan, support_threshold)

    targets = np.full(n, -1, dtype=int)
    for _ in range(max_passes):
        previous = targets.copy()
        targets = _round_pass(plan, mu, D_X, D_Y, p, sup, targets)
        if np.array_equal(previous, targets):
            break
    return targets, SemiCoupling(plan, mu)


def is_monge(coupling: SemiCoupling, support_threshold: float | None = None) -> bool:
    """True iff every row carries exactly one entry above the threshold."""
    plan = coupling.plan
    counts = np.sum(plan > _support_threshold(plan, support_threshold), axis=1)
    return bool(np.all(counts == 1))


def _map_objective(targets, mu, D_X, D_Y) -> float:
    """E of the coupling induced by a map: sum (DX - DY[f,f])^2 mu mu."""
    f = np.asarray(targets, dtype=int)
    diff = D_X - D_Y[np.ix_(f, f)]
    return float(np.einsum("ik,i,k->", diff * diff, mu, mu))


def _greedy_anchor_maps(D_X, D_Y, mu) -> np.ndarray:
    """One candidate map per anchor column: place point 0 on the anchor,
    then each further point on the column with minimal incremental cost
    against the points already placed (ties to the lowest index)."""
    n, m = D_X.shape[0], D_Y.shape[0]
    maps = np.empty((m, n), dtype=int)
    for j0 in range(m):
        f = maps[j0]
        f[0] = j0
        for t in range(1, n):
            diffs = D_X[:t, t][:, None] - D_Y[f[:t], :]
            cost = (mu[:t][:, None] * diffs * diffs).sum(axis=0)
            f[t] = int(np.argmin(cost))
    return maps


def _icm_swap_polish(targets, mu, D_X, D_Y, max_rounds: int = 20) -> tuple[np.ndarray, float]:
    """Descend over maps with single-target moves and pairwise exchanges.

    Moves are scored by O(n)-sized deltas; the exact objective is
    recomputed once at the end.
    """
    n, m = D_X.shape[0], D_Y.shape[0]
    f = np.asarray(targets, dtype=int).copy()
    for _ in range(max_rounds):
        changed = False
        for i in range(n):
            mask = np.arange(n) != i
            # cost[j]: row i's summed pair discrepancy if moved to column j
            diffs = D_X[i, mask][:, None] - D_Y[f[mask], :]
            cost = (mu[mask][:, None] * diffs * diffs).sum(axis=0)
            j = int(np.argmin(cost))
            if j != f[i] and cost[j] < cost[f[i]]:
                f[i] = j
                changed = True
        for i1 in range(n):
            mask1 = np.arange(n) != i1
            k_mask = mask1.copy()
            for i2 in range(i1 + 1, n):
                if f[i1] == f[i2]:
                    continue
                k_mask[i2] = False
                fk = f[k_mask]
                w = mu[k_mask]
                d1, d2 = D_X[i1, k_mask], D_X[i2, k_mask]
                old = (mu[i1] * w @ (d1 - D_Y[f[i1], fk]) ** 2
                       + mu[i2] * w @ (d2 - D_Y[f[i2], fk]) ** 2)
                new = (mu[i1] * w @ (d1 - D_Y[f[i2], fk]) ** 2
                       + mu[i2] * w @ (d2 - D_Y[f[i1], fk]) ** 2)
                if new < old:
                    f[i1], f[i2] = f[i2], f[i1]
                    changed = True
                k_mask[i2] = True
        if not changed:
            break
    return f, _map_objective(f, mu, D_X, D_Y)


def solve_srgw2(X: MetricMeasureSpace, D_Y, cfg: SolverConfig | None = None) -> SolverResult:
    """Minimize dis_2 over semi-couplings of X into the target matrix.

    Frank-Wolfe iterations (gradient, row-argmin vertex, exact line
    search) run until the relative objective decrease drops below
    ``cfg.rel_tolerance`` or ``cfg.max_iterations`` is hit, then the
    iterate is rounded to a Monge map.  On problems within the size
    budgets the rounded map additionally competes against anchored
    greedy candidates and is polished by move/swap sweeps, all
    deterministic.  The resulting map coupling is reported whenever its
    distortion does not exceed the unrounded one by more than roundoff
    slack (it cannot, up to roundoff); ``objective_trace`` follows the
    Frank-Wolfe iterates and ends at the reported coupling's objective.
    """
    if cfg is None:
        cfg = SolverConfig()
    if not isinstance(X, MetricMeasureSpace):
        raise ValueError("X must be a MetricMeasureSpace")
    D_X = X.distances
    D_Y = _check_distance_matrix(D_Y, "D_Y")
    mu = X.weights
    m = D_Y.shape[0]

    if cfg.init_mode == "product":
        current = product_coupling(mu, m)
    else:
        current = random_coupling(mu, m, cfg.seed)

    plan = current.plan.copy()
    energy, grad = objective_and_gradient(current, D_X, D_Y)
    trace = [energy]
    for _ in range(cfg.max_iterations):
        vertex_targets = np.argmin(grad, axis=1)
        vertex_plan = np.zeros_like(plan)
        vertex_plan[np.arange(plan.shape[0]), vertex_targets] = mu
        delta = vertex_plan - plan
        b = float(np.sum(grad * delta))
        a = _quadratic_objective(delta, D_X, D_Y)
        if a > 0:
            tau = float(np.clip(-b / (2.0 * a), 0.0, 1.0))
        else:
            tau = 1.0 if b < 0 else 0.0
        if tau == 0.0:
            break
        candidate = plan + tau * delta
        new_energy, new_grad = objective_and_gradient(
            SemiCoupling(candidate, mu), D_X, D_Y)
        if new_energy > energy:
            break  # roundoff-level stall; keep the better iterate
        plan, grad = candidate, new_grad
        decrease = energy - new_energy
        energy = new_energy
        trace.append(energy)
        if decrease < cfg.rel_tolerance * max(energy, 1e-300):
            break

    unrounded = SemiCoupling(plan, mu)
    targets, rounded = monge_round(
        unrounded, D_X, D_Y, p=2, support_threshold=cfg.support_threshold)
    best_targets = np.asarray(targets, dtype=int)
    best_energy = max(0.0, _quadratic_objective(rounded.plan, D_X, D_Y))

    n = D_X.shape[0]
    if best_energy > 0 and (n * m) ** 2 <= _ANCHOR_BUDGET:
        for candidate in _greedy_anchor_maps(D_X, D_Y, mu):
            cand_energy = _map_objective(candidate, mu, D_X, D_Y)
            if cand_energy < best_energy:
                best_energy, best_targets = cand_energy, candidate.copy()
    if best_energy > 0 and n * n * max(n, m) <= _POLISH_BUDGET:
        best_targets, best_energy = _icm_swap_polish(best_targets, mu, D_X, D_Y)
    best_energy = max(0.0, best_energy)

    dis_unrounded = 0.5 * math.sqrt(max(0.0, energy))
    dis_best = 0.5 * math.sqrt(best_energy)
    if dis_best <= dis_unrounded + ROUNDING_SLACK:
        if best_energy <= trace[-1]:
            trace.append(best_energy)
        return SolverResult(
            coupling=coupling_from_map(best_targets, mu, m),
            objective_trace=tuple(trace),
            distortion=dis_best,
            monge_map=tuple(int(t) for t in best_targets),
        )
    return SolverResult(
        coupling=unrounded,
        objective_trace=tuple(trace),
        distortion=dis_unrounded,
        monge_map=None,
    )
