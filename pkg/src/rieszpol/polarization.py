"""Max-min polarization: certified inner minimum and the outer optimizer.

``inner_min`` computes min_x U(x) over the domain for a fixed configuration
by branch and bound over a hierarchy of cells.  Each cell gets a rigorous
lower bound for U from a second-order Taylor model with a Hessian bound
valid on the whole cell, so the returned value is certified to be within
``tol`` (relative) of the true minimum.

``maximize_polarization`` searches for the configuration maximizing that
minimum: gradient ascent on a soft-min of U over a fixed mesh with an
annealed sharpness, followed by trust-region LP steps that use the
gradients of U at all near-minimal points (the supergradients of the
nonsmooth objective).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize, spatial

from .domains import Cells, Configuration, Domain, domain_cells, grid, roots_of_unity, sample_uniform
from .domains import fibonacci_sphere, sphere_mesh
from .potentials import potential, potential_grad, potential_hessian

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class NonConvergenceError(RuntimeError):
    """The inner-min certificate was not reached within the budget."""


@dataclass
class PolarizationResult:
    value: float
    argmin: np.ndarray
    mesh_size: int
    refinement_steps: int
    tolerance: float
    lower_bound: float = math.nan

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "argmin": np.asarray(self.argmin).tolist(),
            "mesh_size": self.mesh_size,
            "refinement_steps": self.refinement_steps,
            "tolerance": self.tolerance,
            "lower_bound": self.lower_bound,
        }


@dataclass
class MaxMinResult:
    config: Configuration
    value: float
    restarts: int
    converged: bool
    history: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "value": self.value,
            "restarts": self.restarts,
            "converged": self.converged,
        }


# ---------------------------------------------------------------------------
# exact circle values


def equally_spaced_value(n: int, p: float) -> float:
    """Potential of the n-th roots of unity at a midpoint between neighbours.

    sum_{k<n} (2 sin((2k+1) pi / (2n)))^{-p}, summed over the first half of
    the terms (the sum is symmetric under k -> n-1-k) so every sine argument
    stays in (0, pi/2].
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    half = n // 2
    k = np.arange(half, dtype=float)
    terms = (2.0 * np.sin((2.0 * k + 1.0) * math.pi / (2.0 * n))) ** -p
    total = 2.0 * float(np.sum(terms[::-1]))
    if n % 2:
        total += 2.0 ** -p
    return total


def _kernel(s, p: float):
    with np.errstate(divide="ignore", over="ignore"):
        return (2.0 * np.abs(np.sin(0.5 * np.asarray(s, dtype=float)))) ** -p


def discrete_polarization(angles, n: int, p: float) -> float:
    """min over the 2n angles pi k / n of sum_j g(t - t_j), g(s) = (2|sin(s/2)|)^{-p}."""
    a = np.asarray(angles, dtype=float)
    if len(a) != n:
        raise ValueError(f"expected {n} angles, got {len(a)}")
    tests = math.pi * np.arange(2 * n) / n
    with np.errstate(over="ignore"):
        vals = np.sum(_kernel(tests[:, None] - a[None, :], p), axis=1)
    return float(np.min(vals))


def shifted_optimal_angles(n: int) -> np.ndarray:
    """The configuration pi/(2n) + 2 (j-1) pi / n attaining the discrete optimum."""
    return math.pi / (2.0 * n) + TWO_PI * np.arange(n) / n


def discrete_optimum(n: int, p: float) -> float:
    """P of the equally spaced configuration 2(j-1)pi/n evaluated at pi/(2n)."""
    return float(np.sum(_kernel(math.pi / (2.0 * n) - TWO_PI * np.arange(n) / n, p)))


# ---------------------------------------------------------------------------
# certified inner minimum


_CHUNK = 50_000


def _evaluate_cells(cells: Cells, nodes: np.ndarray, p: float, ambient: int):
    """U at cell centres, a lower bound of U on each cell, and a flag telling
    whether a critical point of U can lie in the cell (cube cells only)."""
    k = len(cells)
    U = np.empty(k)
    lb = np.empty(k)
    crit = np.ones(k, dtype=bool)
    for s in range(0, k, _CHUNK):
        sl = slice(s, min(k, s + _CHUNK))
        c = cells.centers[sl]
        h = cells.radius[sl]
        v = c[:, None, :] - nodes[None, :, :]
        r = np.sqrt(np.einsum("knm,knm->kn", v, v))
        with np.errstate(divide="ignore", invalid="ignore"):
            rp = r ** -p
            u = np.sum(rp, axis=1)
            g = -np.einsum("kn,knm->km", p * rp / (r * r), v)
            lb0 = np.sum((r + h[:, None]) ** -p, axis=1)
            safe = np.all(r > h[:, None], axis=1)
            near = np.where(safe[:, None], r - h[:, None], 1.0)
            hsum = np.sum(near ** (-p - 2.0), axis=1)
        hlow = p * hsum if ambient >= 2 else np.zeros_like(hsum)
        if cells.kind == "sphere":
            # exact per-node minimum over the cap of angular radius theta
            # around c: |z - x|^2 = 1 + |x|^2 - 2 z.x on the unit sphere
            theta = 2.0 * np.arcsin(np.minimum(1.0, 0.5 * h))
            rho = np.linalg.norm(nodes, axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                cosphi = np.where(rho > 0, (c @ nodes.T) / np.where(rho > 0, rho, 1.0), 1.0)
            phi = np.arccos(np.clip(cosphi, -1.0, 1.0))
            far = 1.0 + rho * rho - 2.0 * rho * np.cos(np.minimum(math.pi, phi + theta[:, None]))
            lb0 = np.maximum(lb0, np.sum(np.maximum(far, 0.0) ** (-0.5 * p), axis=1))
            lam = np.einsum("km,km->k", g, c)
            gt = np.linalg.norm(g - lam[:, None] * c, axis=1)
            q = -lam - hlow
            with np.errstate(divide="ignore", invalid="ignore"):
                s_star = np.where(q > 0, np.minimum(h, gt / np.where(q > 0, q, 1.0)), h)
            model = -gt * s_star + 0.5 * q * s_star * s_star
        elif cells.kind == "cube":
            half = cells.half[sl]
            box = -np.sum(np.abs(g), axis=1) * half
            gn = np.linalg.norm(g, axis=1)
            ball = -gn - np.einsum("km,km->k", g, c)
            model = np.maximum(box, ball) - 0.5 * hlow * h * h
            hnorm = p * (p + 1.0) * hsum
            crit[sl] = ~safe | (gn <= hnorm * h)
        else:
            model = -np.abs(g[:, 0]) * h
        lb2 = np.where(safe, u + model, -np.inf)
        U[sl] = u
        lb[sl] = np.maximum(lb0, lb2)
    return U, lb, crit


def inner_min(
    config: Configuration,
    p: float,
    tol: float = 1e-9,
    max_levels: int = 60,
    max_cells: int = 1_500_000,
    polish: bool = True,
) -> PolarizationResult:
    """Certified global minimum of U(x) = sum_j |x - x_j|^{-p} over the domain.

    The returned ``value`` is U at ``argmin`` and ``lower_bound`` is a
    certified lower bound with value - lower_bound <= tol * value.  For the
    ball with p <= d - 2 the potential is superharmonic off the nodes, so
    only the boundary sphere is searched; otherwise interior cubes are
    searched as well and discarded once the gradient bound excludes a
    critical point inside them.
    """
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    domain = config.domain
    nodes = config.points
    m = domain.ambient_dim
    start = max(64, 16 * config.n)
    if domain.kind == "ball":
        groups = [Cells.sphere(domain.d - 1).refine_to(start)]
        if p > domain.d - 2:
            groups.append(Cells.cube(domain.d).refine_to(start).keep_intersecting_ball())
    else:
        groups = [domain_cells(domain).refine_to(start)]

    best = math.inf
    arg = None
    lower = math.inf
    evaluated = 0
    if domain.kind == "ball":
        # every point of the ball is within 1 of the origin
        root = float(np.sum((1.0 + np.linalg.norm(nodes, axis=1)) ** -p))
    else:
        root = -math.inf
    for level in range(max_levels):
        results = []
        for cells in groups:
            U, lb, crit = _evaluate_cells(cells, nodes, p, m)
            evaluated += len(cells)
            cand = np.where(cells.inside & np.isfinite(U), U, math.inf)
            if len(cand):
                i = int(np.argmin(cand))
                if cand[i] < best:
                    best = float(cand[i])
                    arg = domain.project(cells.centers[i : i + 1])[0]
            results.append((cells, lb, crit))
        if not math.isfinite(best):
            thr = math.inf
        else:
            thr = best - tol * abs(best)
        if root >= thr:
            lower = root
            groups = []
            break
        nxt = []
        total = 0
        for cells, lb, crit in results:
            open_ = (lb < thr) & crit
            pruned = ~open_ & crit
            if np.any(pruned):
                lower = min(lower, float(np.min(lb[pruned])))
            if not np.any(open_):
                continue
            child = cells.select(open_)
            if child.dim == 0:
                continue
            child = child.subdivide()
            if child.kind == "cube":
                child = child.keep_intersecting_ball()
            nxt.append(child)
            total += len(child)
        groups = nxt
        if not groups:
            break
        if total > max_cells:
            raise NonConvergenceError(
                f"inner_min: {total} open cells at level {level} exceeds budget {max_cells}"
            )
    else:
        raise NonConvergenceError(f"inner_min: no certificate after {max_levels} levels")

    lower = min(lower, best)
    if polish and arg is not None:
        y, u = local_min(domain, nodes, p, arg[None, :])
        if u[0] < best:
            best, arg = float(u[0]), y[0]
    return PolarizationResult(best, arg, evaluated, level + 1, tol, lower)


# ---------------------------------------------------------------------------
# local descent (vectorized Newton)


def _limit_step(v: np.ndarray, y: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    # never jump more than half the distance to the nearest node
    dmin = np.min(np.linalg.norm(y[:, None, :] - nodes[None, :, :], axis=2), axis=1)
    vn = np.linalg.norm(v, axis=1)
    scale = np.minimum(1.0, 0.5 * dmin / np.maximum(vn, 1e-300))
    return v * scale[:, None]


def _sphere_direction(y, g, H):
    k, m = y.shape
    lam = np.einsum("km,km->k", g, y)
    gt = g - lam[:, None] * y
    A = np.zeros((k, m + 1, m + 1))
    A[:, :m, :m] = H - lam[:, None, None] * np.eye(m)
    A[:, :m, m] = y
    A[:, m, :m] = y
    b = np.zeros((k, m + 1))
    b[:, :m] = -gt
    with np.errstate(all="ignore"):
        try:
            v = np.linalg.solve(A, b[..., None])[..., 0][:, :m]
        except np.linalg.LinAlgError:
            v = np.full((k, m), np.nan)
    bad = ~np.all(np.isfinite(v), axis=1) | (np.einsum("km,km->k", v, gt) >= 0)
    v[bad] = -gt[bad]
    return v, gt


def _ball_direction(y, g, H):
    k, m = y.shape
    with np.errstate(all="ignore"):
        try:
            v = -np.linalg.solve(H, g[..., None])[..., 0]
        except np.linalg.LinAlgError:
            v = np.full((k, m), np.nan)
    bad = ~np.all(np.isfinite(v), axis=1) | (np.einsum("km,km->k", v, g) >= 0)
    v[bad] = -g[bad]
    return v


def _newton_direction(domain: Domain, y, g, H, on_bdry):
    k, m = y.shape
    if domain.kind == "segment":
        h = H[:, :1, 0]
        v = np.where(h > 0, -g / np.where(h > 0, h, 1.0), -g)
        v[((y[:, 0] <= 0.0) & (g[:, 0] > 0)) | ((y[:, 0] >= 1.0) & (g[:, 0] < 0))] = 0.0
        return v
    v = np.zeros_like(y)
    sph = np.ones(k, dtype=bool) if domain.spherical else on_bdry
    if np.any(sph) and m >= 2:
        v[sph], _ = _sphere_direction(y[sph], g[sph], H[sph])
    if np.any(~sph):
        v[~sph] = _ball_direction(y[~sph], g[~sph], H[~sph])
    return v


def local_min(domain: Domain, nodes: np.ndarray, p: float, y0: np.ndarray, iters: int = 40):
    """Run damped Newton descent of U from each row of y0; returns (Y, U(Y)).

    A row stops once a full backtracking search fails to decrease U.
    """
    y = domain.project(np.array(y0, dtype=float, ndmin=2))
    k = len(y)
    on_bdry = np.zeros(k, dtype=bool)
    if domain.kind == "ball":
        on_bdry = np.linalg.norm(y, axis=1) >= 1.0 - 1e-12
    active = np.ones(k, dtype=bool)
    for _ in range(iters):
        idx = np.flatnonzero(active)
        if not len(idx):
            break
        ya = y[idx]
        u, g, H = potential_hessian(ya, nodes, p)
        bd = on_bdry[idx]
        if domain.kind == "ball":
            # release boundary points where descent points inward
            bd &= np.einsum("km,km->k", g, ya) <= 0
            on_bdry[idx] = bd
        v = _limit_step(_newton_direction(domain, ya, g, H, bd), ya, nodes)
        alpha = np.ones(len(idx))
        done = np.linalg.norm(v, axis=1) < 1e-15
        moved = np.zeros(len(idx), dtype=bool)
        for _ in range(30):
            trial = domain.project(ya + alpha[:, None] * v)
            ut = potential(trial, nodes, p)
            ok = ~done & (ut < u)
            ya[ok] = trial[ok]
            moved |= ok
            done |= ok
            if np.all(done):
                break
            alpha = np.where(done, alpha, 0.5 * alpha)
        y[idx] = ya
        active[idx[~moved]] = False
        if domain.kind == "ball":
            on_bdry[idx] |= np.linalg.norm(ya, axis=1) >= 1.0 - 1e-12
    return y, potential(y, nodes, p)


# ---------------------------------------------------------------------------
# the outer max-min optimizer


@dataclass
class SolverOptions:
    restarts: int = 16
    seed: int = 0
    structured_start: bool = True
    stages: int = 10
    stage_iters: int = 40
    mesh_size: Optional[int] = None
    polish_top: int = 4
    polish_iters: int = 300
    inner_tol: float = 1e-9
    agree_tol: float = 1e-6


def _structured_start(domain: Domain, n: int, rng: np.random.Generator) -> np.ndarray:
    if domain.kind == "circle":
        return roots_of_unity(n, rng.uniform(0, TWO_PI)).points
    if domain.kind == "sphere":
        return sphere_mesh(domain.d, n) if n > 1 else np.eye(domain.d + 1)[:1]
    if domain.kind == "ball":
        return np.zeros((n, domain.d))
    return ((np.arange(n) + 0.5) / n).reshape(-1, 1)


def _default_mesh_size(domain: Domain, n: int) -> int:
    if domain.kind in ("circle", "segment"):
        return max(256, 64 * n)
    if domain.kind == "sphere":
        return max(2000, 150 * n)
    return max(3000, 250 * n)


class _Mesh:
    """Fixed search mesh with a neighbour graph for mesh-local minima."""

    def __init__(self, domain: Domain, size: int):
        self.domain = domain
        self.points = grid(domain, size)
        k = len(self.points)
        if domain.kind in ("circle", "segment"):
            idx = np.arange(k)
            left, right = idx - 1, idx + 1
            if domain.kind == "circle":
                left %= k
                right %= k
            else:
                left[0], right[-1] = 1, k - 2
            self.neighbors = np.column_stack([left, right])
        else:
            kk = min(k, 2 * domain.ambient_dim + 3)
            _, nb = spatial.cKDTree(self.points).query(self.points, k=kk)
            self.neighbors = nb[:, 1:]
        dist, _ = spatial.cKDTree(self.points).query(self.points, k=2)
        self.spacing = float(np.median(dist[:, 1]))

    def local_minima(self, values: np.ndarray) -> np.ndarray:
        ok = np.isfinite(values) & np.all(values[:, None] <= values[self.neighbors], axis=1)
        return np.flatnonzero(ok)


def _minima_set(mesh: _Mesh, nodes: np.ndarray, p: float, prev: Optional[np.ndarray] = None):
    """Local minima of U: mesh local minima (and previous ones) refined by Newton."""
    vals = potential(mesh.points, nodes, p)
    idx = mesh.local_minima(vals)
    order = np.argsort(vals[idx], kind="stable")
    idx = idx[order[: max(64, 8 * len(nodes))]]
    starts = mesh.points[idx]
    if prev is not None and len(prev):
        starts = np.vstack([prev[: len(idx)], starts])
    y, u = local_min(mesh.domain, nodes, p, starts)
    order = np.argsort(u, kind="stable")
    y, u = y[order], u[order]
    fin = np.isfinite(u)
    y, u = y[fin], u[fin]
    close = spatial.cKDTree(y).query_ball_point(y, 1e-7)
    taken = np.zeros(len(y), dtype=bool)
    keep = []
    for i in range(len(y)):
        if not taken[i]:
            keep.append(i)
            taken[close[i]] = True
    return y[keep], u[keep]


def _softmin_and_grad(X: np.ndarray, Y: np.ndarray, p: float, beta: float):
    v = Y[:, None, :] - X[None, :, :]
    r2 = np.maximum(np.einsum("knm,knm->kn", v, v), 1e-24)
    rp = r2 ** (-p / 2.0)
    U = np.sum(rp, axis=1)
    z = -beta * U
    zmax = np.max(z)
    w = np.exp(z - zmax)
    tot = np.sum(w)
    S = -(zmax + math.log(tot)) / beta
    w /= tot
    # dU(y_i)/dx_j = p r^{-p-2} (y_i - x_j)
    coef = w[:, None] * p * rp / r2
    G = np.einsum("kn,knm->nm", coef, v)
    return S, G


def _tangent_project(domain: Domain, X: np.ndarray, G: np.ndarray) -> np.ndarray:
    if domain.spherical:
        return G - np.einsum("nm,nm->n", G, X)[:, None] * X
    if domain.kind == "ball":
        norms = np.linalg.norm(X, axis=1)
        out = G.copy()
        bd = norms >= 1.0 - 1e-12
        radial = np.einsum("nm,nm->n", G, X)
        push = bd & (radial > 0)
        out[push] -= (radial[push] / norms[push] ** 2)[:, None] * X[push]
        return out
    out = G.copy()
    out[(X[:, 0] <= 0.0) & (G[:, 0] < 0)] = 0.0
    out[(X[:, 0] >= 1.0) & (G[:, 0] > 0)] = 0.0
    return out


def _anneal(domain: Domain, X: np.ndarray, p: float, mesh: _Mesh, opts: SolverOptions) -> np.ndarray:
    Y = mesh.points
    U0 = potential(Y, X, p)
    scale = float(np.median(U0[np.isfinite(U0)]))
    beta = 1.0 / max(scale, 1e-300)
    step = 0.5 * mesh.spacing * max(1.0, len(Y) ** (1.0 / max(1, domain.d)) / (4.0 * len(X)))
    for _ in range(opts.stages):
        S, G = _softmin_and_grad(X, Y, p, beta)
        for _ in range(opts.stage_iters):
            D = _tangent_project(domain, X, G)
            dn = np.max(np.linalg.norm(D, axis=1))
            if not dn > 0:
                break
            trial = domain.project(X + (step / dn) * D)
            St, Gt = _softmin_and_grad(trial, Y, p, beta)
            if St > S:
                X, S, G = trial, St, Gt
                step *= 1.3
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        beta *= 2.0
    return X


def _dof_bases(domain: Domain, X: np.ndarray) -> list:
    if domain.spherical:
        return list(domain.tangent_basis(X))
    return [np.eye(domain.ambient_dim) for _ in range(len(X))]


def _lp_step(domain, X, Y, U, p, radius, F):
    n, m = X.shape
    bases = _dof_bases(domain, X)
    dofs = [b.shape[1] for b in bases]
    offs = np.concatenate([[0], np.cumsum(dofs)])
    nv = int(offs[-1])
    v = Y[:, None, :] - X[None, :, :]
    r2 = np.einsum("knm,knm->kn", v, v)
    coef = p * r2 ** (-p / 2.0) / r2
    grads = coef[:, :, None] * v  # dU(y_k)/dx_j
    Gmat = np.zeros((len(Y), nv))
    for j in range(n):
        Gmat[:, offs[j] : offs[j + 1]] = grads[:, j, :] @ bases[j]
    # keep constraints that could bind within the trust region
    reach = U - np.sum(np.abs(Gmat), axis=1) * radius
    act = reach <= F + 1e-12 * abs(F)
    act[np.argmin(U)] = True
    Ga, Ua = Gmat[act], U[act]
    # variables: [delta (nv), t]; maximize t  s.t.  t - Ga delta <= Ua
    c = np.zeros(nv + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-Ga, np.ones((len(Ga), 1))])
    b_ub = Ua.copy()
    bounds = [(-radius, radius)] * nv + [(None, None)]
    extra_A, extra_b = [], []
    if domain.kind == "ball":
        norms = np.linalg.norm(X, axis=1)
        for j in np.flatnonzero(norms >= 1.0 - 1e-12):
            row = np.zeros(nv + 1)
            row[offs[j] : offs[j + 1]] = X[j] / norms[j]
            extra_A.append(row)
            extra_b.append(0.0)
    elif domain.kind == "segment":
        for j in range(n):
            lo = max(-radius, -X[j, 0])
            hi = min(radius, 1.0 - X[j, 0])
            bounds[offs[j]] = (lo, hi)
    if extra_A:
        A_ub = np.vstack([A_ub, np.asarray(extra_A)])
        b_ub = np.concatenate([b_ub, extra_b])
    res = optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        return None, F
    delta = res.x[:nv]
    step = np.zeros_like(X)
    for j in range(n):
        step[j] = bases[j] @ delta[offs[j] : offs[j + 1]]
    return domain.project(X + step), float(res.x[-1])


def _polish(domain, X, p, mesh: _Mesh, opts: SolverOptions):
    Y, U = _minima_set(mesh, X, p)
    F = float(U[0])
    radius = 0.4 * mesh.spacing
    stall = 0
    for _ in range(opts.polish_iters):
        newX, predicted = _lp_step(domain, X, Y, U, p, radius, F)
        if newX is None or predicted - F <= 1e-15 * abs(F):
            radius *= 0.25
        else:
            Yn, Un = _minima_set(mesh, newX, p, prev=Y)
            Fn = float(Un[0])
            if Fn > F:
                stall = stall + 1 if Fn - F <= 1e-13 * abs(F) else 0
                ratio = (Fn - F) / (predicted - F)
                X, Y, U, F = newX, Yn, Un, Fn
                if ratio > 0.5:
                    radius *= 2.0
            else:
                radius *= 0.25
        if radius < 1e-13 or stall >= 8:
            break
    return X, F


def maximize_polarization(
    domain: Domain, n: int, p: float, opts: Optional[SolverOptions] = None
) -> MaxMinResult:
    """Best n-point configuration found for max_omega min_x U_omega(x).

    Every restart is annealed on a soft-min of U over a fixed mesh; the
    ``polish_top`` best are polished by trust-region LP steps on the exact
    minimum, and each polished configuration is scored by the certified
    ``inner_min``.  The value returned is a certified inner minimum of the
    returned configuration, hence a lower bound for M_n^p up to ``inner_tol``.
    ``converged`` is True when at least two polished restarts agree to
    ``agree_tol`` (relative) with the best.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    opts = opts or SolverOptions()
    rng = np.random.default_rng(opts.seed)
    mesh = _Mesh(domain, opts.mesh_size or _default_mesh_size(domain, n))
    starts = []
    for r in range(opts.restarts):
        if r == 0 and opts.structured_start:
            starts.append(_structured_start(domain, n, rng))
        else:
            starts.append(sample_uniform(domain, n, int(rng.integers(2**63))).points)

    scored = []
    for i, X0 in enumerate(starts):
        X = _anneal(domain, X0, p, mesh, opts)
        _, U = _minima_set(mesh, X, p)
        scored.append((float(U[0]), i, X))
    scored.sort(key=lambda s: (-s[0], s[1]))

    finals = []
    for F0, i, X in scored[: max(1, opts.polish_top)]:
        X, F = _polish(domain, X, p, mesh, opts)
        res = _certified(Configuration(domain, domain.project(X)), p, opts.inner_tol)
        finals.append((res.value, i, X))
        log.debug("restart %d: anneal %.12g polished %.12g", i, F0, res.value)
    finals.sort(key=lambda s: (-s[0], s[1]))
    best_val, _, best_X = finals[0]
    agree = sum(1 for v, _, _ in finals if v >= best_val * (1.0 - opts.agree_tol))
    converged = agree >= 2 or len(finals) == 1
    return MaxMinResult(
        Configuration(domain, domain.project(best_X)),
        best_val,
        opts.restarts,
        converged,
        history=[v for v, _, _ in finals],
    )


def _certified(config: Configuration, p: float, tol: float) -> PolarizationResult:
    # loosen the tolerance rather than fail on nearly flat minima
    while True:
        try:
            return inner_min(config, p, tol)
        except NonConvergenceError:
            if tol >= 1e-3:
                raise
            tol *= 10.0
