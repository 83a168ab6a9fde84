"""Riesz p-energy, minimal-energy configurations and the energy lower bound.

The energy counts ordered pairs: E_p = sum_{j != k} |x_j - x_k|^{-p}.
Minimal energies give the polarization lower bound
M_n^p >= E_p^min(n) / (n - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .domains import Configuration, Domain, fibonacci_sphere, roots_of_unity, sample_uniform

COINCIDENCE = 1e-9
_ROWS = 512


class CoincidenceError(ValueError):
    """Two configuration points are closer than the coincidence guard."""


@dataclass
class EnergyResult:
    config: Configuration
    energy: float
    restarts: int
    gradient_norm: float

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "energy": self.energy,
            "restarts": self.restarts,
            "gradient_norm": self.gradient_norm,
        }


@dataclass(frozen=True)
class EnergyBound:
    """A lower bound for M_n^p from an n-point energy.

    ``certified`` is True only when the energy used is the true minimum
    (the roots of unity on the circle); otherwise it is a best-found value
    and the bound is heuristic.
    """

    value: float
    energy: float
    certified: bool

    def __float__(self) -> float:
        return self.value


@dataclass
class EnergyOptions:
    restarts: int = 8
    seed: int = 0
    structured_start: bool = True
    max_iter: int = 3000
    gtol: float = 1e-10


def _pair_terms(points: np.ndarray, p: float, with_grad: bool):
    n, m = points.shape
    total = 0.0
    grad = np.zeros_like(points) if with_grad else None
    dmin = math.inf
    cols = [np.ascontiguousarray(points[:, a]) for a in range(m)]
    for s in range(0, n, _ROWS):
        e = min(n, s + _ROWS)
        diffs = [c[s:e, None] - c[None, :] for c in cols]
        r2 = diffs[0] * diffs[0]
        for dd in diffs[1:]:
            r2 += dd * dd
        idx = np.arange(e - s)
        r2[idx, s + idx] = np.inf
        if n > 1:
            dmin = min(dmin, float(np.sqrt(np.min(r2))))
        with np.errstate(divide="ignore"):
            rp = 1.0 / r2 if p == 2.0 else np.power(r2, -0.5 * p)
        total += float(np.sum(rp))
        if with_grad:
            # d/dx_i of the ordered sum counts each pair twice
            w = rp / r2
            for a, dd in enumerate(diffs):
                grad[s:e, a] = -2.0 * p * np.sum(w * dd, axis=1)
    return total, grad, dmin


def energy(config: Configuration, p: float) -> float:
    """Ordered-pair Riesz p-energy; rejects points closer than 1e-9."""
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    total, _, dmin = _pair_terms(config.points, p, False)
    if dmin < COINCIDENCE:
        raise CoincidenceError(f"points at distance {dmin:.3e} < {COINCIDENCE}")
    return total


def energy_and_grad(points: np.ndarray, p: float):
    """Energy and its gradient with respect to every point (ambient coordinates)."""
    total, grad, dmin = _pair_terms(np.asarray(points, dtype=float), p, True)
    if dmin < COINCIDENCE:
        return math.inf, grad
    return total, grad


def roots_of_unity_energy(n: int, p: float) -> float:
    """n sum_{k=1}^{n-1} (2 sin(pi k / n))^{-p}, summed over the symmetric half."""
    if n < 2:
        return 0.0
    k = np.arange(1, (n - 1) // 2 + 1, dtype=float)
    half = float(np.sum(((2.0 * np.sin(math.pi * k / n)) ** -p)[::-1]))
    total = 2.0 * half
    if n % 2 == 0:
        total += 2.0 ** -p
    return n * total


def _feasible_grad(domain: Domain, X: np.ndarray, G: np.ndarray) -> np.ndarray:
    """The part of G along which a descent step stays feasible."""
    if domain.spherical:
        return G - np.einsum("nm,nm->n", G, X)[:, None] * X
    if domain.kind == "ball":
        out = G.copy()
        norms = np.linalg.norm(X, axis=1)
        radial = np.einsum("nm,nm->n", G, X)
        pin = (norms >= 1.0 - 1e-12) & (radial < 0)
        out[pin] -= (radial[pin] / norms[pin] ** 2)[:, None] * X[pin]
        return out
    out = G.copy()
    out[(X[:, 0] <= 0.0) & (G[:, 0] > 0)] = 0.0
    out[(X[:, 0] >= 1.0) & (G[:, 0] < 0)] = 0.0
    return out


def _descend(domain: Domain, X: np.ndarray, p: float, opts: EnergyOptions):
    E, G = energy_and_grad(X, p)
    D = _feasible_grad(domain, X, G)
    dn = np.max(np.linalg.norm(D, axis=1))
    alpha = 0.05 / max(dn, 1e-300) * _min_distance(X)
    prev = None
    for _ in range(opts.max_iter):
        if dn <= opts.gtol * max(1.0, E):
            break
        accepted = False
        for _ in range(60):
            trial = domain.project(X - alpha * D)
            Et, Gt = energy_and_grad(trial, p)
            if Et <= E - 1e-4 * alpha * float(np.sum(D * D)):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        Dt = _feasible_grad(domain, trial, Gt)
        s = (trial - X).ravel()
        y = (Dt - D).ravel()
        sy = float(s @ y)
        X, E, G, D = trial, Et, Gt, Dt
        dn = np.max(np.linalg.norm(D, axis=1))
        alpha = float(s @ s) / sy if sy > 0 else 2.0 * alpha
        # keep a single step from jumping across a neighbour
        alpha = min(alpha, 0.5 * _min_distance(X) / max(dn, 1e-300))
        if prev is not None and prev - E <= 1e-16 * E and dn <= 1e-7 * max(1.0, E):
            break
        prev = E
    return X, E, dn


def _min_distance(X: np.ndarray) -> float:
    if len(X) < 2:
        return 1.0
    _, _, dmin = _pair_terms(X, 1.0, False)
    return dmin


def _structured(domain: Domain, n: int, rng: np.random.Generator) -> np.ndarray:
    if domain.kind == "circle":
        return roots_of_unity(n, rng.uniform(0, 2 * math.pi)).points
    if domain.kind == "sphere" and domain.d == 2:
        return fibonacci_sphere(n)
    if domain.kind == "segment":
        return np.linspace(0.0, 1.0, n).reshape(-1, 1)
    return sample_uniform(domain, n, int(rng.integers(2**63))).points


def minimize_energy(
    domain: Domain, n: int, p: float, opts: Optional[EnergyOptions] = None
) -> EnergyResult:
    """Best-found minimal-energy configuration by multistart projected descent.

    Each start runs projected gradient descent with Barzilai-Borwein steps
    and Armijo backtracking.  ``gradient_norm`` is the largest per-point
    norm of the feasible gradient at the returned configuration.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    opts = opts or EnergyOptions()
    rng = np.random.default_rng(opts.seed)
    best = None
    for r in range(opts.restarts):
        if r == 0 and opts.structured_start:
            X0 = _structured(domain, n, rng)
        else:
            X0 = sample_uniform(domain, n, int(rng.integers(2**63))).points
        X, E, dn = _descend(domain, X0, p, opts)
        if best is None or E < best[1]:
            best = (X, E, dn)
    X, E, dn = best
    config = Configuration(domain, domain.project(X))
    return EnergyResult(config, energy(config, p), opts.restarts, float(dn))


def polarization_lower_bound_from_energy(
    domain: Domain, n: int, p: float, opts: Optional[EnergyOptions] = None
) -> EnergyBound:
    """E_p(n) / (n - 1), a lower bound for M_n^p when E_p(n) is the minimum.

    On the circle the roots of unity minimize the energy for every p > 0,
    so the closed form is used and the bound is certified.  Elsewhere the
    energy is best-found and the result is flagged as not certified.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if domain.kind == "circle":
        e = roots_of_unity_energy(n, p)
        return EnergyBound(e / (n - 1), e, True)
    e = minimize_energy(domain, n, p, opts).energy
    return EnergyBound(e / (n - 1), e, False)


def superadditivity_check(energies: Sequence[float], n0: int = 2) -> list:
    """Residuals (n-1) E(n+1) - (n+1) E(n) for energies indexed from n0."""
    e = [float(x) for x in energies]
    return [(n0 + i - 1) * e[i + 1] - (n0 + i + 1) * e[i] for i in range(len(e) - 1)]
