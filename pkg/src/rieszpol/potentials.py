"""Riesz potentials, and the trigonometric machinery on the unit circle.

On the circle a configuration is given by angles t_j and the potential at
e^{it} is A_p(t) = sum_j (2 |sin((t - t_j)/2)|)^{-p}.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .domains import Configuration

TWO_PI = 2.0 * math.pi
PROXIMITY = 1e-3


class ProximityError(ValueError):
    """Evaluation point too close to a node for a derivative formula."""


# ---------------------------------------------------------------------------
# ambient kernel sums (vectorized over evaluation points)


def _diffs(y: np.ndarray, nodes: np.ndarray):
    v = y[:, None, :] - nodes[None, :, :]
    r2 = np.einsum("knm,knm->kn", v, v)
    return v, r2


def potential(y: np.ndarray, nodes: np.ndarray, p: float) -> np.ndarray:
    """U(y_k) = sum_j |y_k - x_j|^{-p} for every row y_k; +inf on coincidence."""
    y = np.atleast_2d(y)
    _, r2 = _diffs(y, nodes)
    with np.errstate(divide="ignore"):
        return np.sum(r2 ** (-p / 2.0), axis=1)


def potential_grad(y: np.ndarray, nodes: np.ndarray, p: float):
    """Values and gradients (with respect to y) of U at the rows of y."""
    y = np.atleast_2d(y)
    v, r2 = _diffs(y, nodes)
    with np.errstate(divide="ignore", invalid="ignore"):
        rp = r2 ** (-p / 2.0)
        w = p * rp / r2
        grad = -np.einsum("kn,knm->km", w, v)
    return np.sum(rp, axis=1), grad


def potential_hessian(y: np.ndarray, nodes: np.ndarray, p: float):
    """Values, gradients and Hessians of U at the rows of y."""
    y = np.atleast_2d(y)
    m = y.shape[1]
    v, r2 = _diffs(y, nodes)
    rp = r2 ** (-p / 2.0)
    w = p * rp / r2
    grad = -np.einsum("kn,knm->km", w, v)
    w2 = p * (p + 2.0) * rp / (r2 * r2)
    hess = np.einsum("kn,kna,knb->kab", w2, v, v) - np.sum(w, axis=1)[:, None, None] * np.eye(m)
    return np.sum(rp, axis=1), grad, hess


def riesz_potential(config: Configuration, p: float, x) -> float:
    """sum_j |x - x_j|^{-p}; +inf when x coincides with a configuration point."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(potential(x, config.points, p)[0])


# ---------------------------------------------------------------------------
# the circle in angle form


def _gaps(angles, t) -> np.ndarray:
    a = np.asarray(angles, dtype=float)
    return (np.asarray(t, dtype=float)[..., None] - a) * 0.5


def circle_A(angles, p: float, t):
    """A_p(t) = sum_j (2|sin((t - t_j)/2)|)^{-p}; vectorized over t."""
    s = np.abs(np.sin(_gaps(angles, t)))
    with np.errstate(divide="ignore"):
        out = np.sum((2.0 * s) ** -p, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _check_proximity(angles, t) -> None:
    a = np.asarray(angles, dtype=float)
    dist = np.abs(np.mod(np.asarray(t, dtype=float)[..., None] - a + math.pi, TWO_PI) - math.pi)
    if np.any(dist < PROXIMITY):
        raise ProximityError(f"t is within {PROXIMITY} of a node")


def circle_A_second_derivative(angles, p: float, t):
    """A_p''(t), summed termwise from the closed form of each term's derivative.

    With S = sin(s/2) and the term F = (2|S|)^{-p},
    F'' = F ((p^2/4) cot^2(s/2) + (p/4) csc^2(s/2)).
    """
    _check_proximity(angles, t)
    h = _gaps(angles, t)
    s = np.sin(h)
    c = np.cos(h)
    f = (2.0 * np.abs(s)) ** -p
    cot2 = (c / s) ** 2
    csc2 = 1.0 / (s * s)
    out = np.sum(f * (0.25 * p * p * cot2 + 0.25 * p * csc2), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def circle_A_recurrence_rhs(angles, p: float, t):
    """(A_p'' + (p^2/4) A_p) / (p^2 + p), which equals A_{p+2}."""
    return (circle_A_second_derivative(angles, p, t) + 0.25 * p * p * circle_A(angles, p, t)) / (
        p * p + p
    )


def circle_A_recurrence_check(angles, p: float, t) -> float:
    """Relative residual of A_{p+2} against the two-step recurrence."""
    lhs = circle_A(angles, p + 2.0, t)
    rhs = circle_A_recurrence_rhs(angles, p, t)
    return abs(lhs - rhs) / abs(lhs)


@lru_cache(maxsize=None)
def _csc2_derivative_poly(k: int) -> np.ndarray:
    """Coefficients (in u = cot(s/2)) of the k-th derivative of csc^2(s/2)."""
    # csc^2 = 1 + u^2 and du/ds = -(1 + u^2)/2
    poly = np.array([1.0, 0.0, 1.0])
    for _ in range(k):
        poly = P.polymul(P.polyder(poly), [-0.5, 0.0, -0.5])
    return poly


def log_derivative_functional(angles, m: int, t):
    """-(log|Q|)^{(m)}(t) for Q(t) = prod_j sin((t - t_j)/2), m even >= 2.

    Each node contributes g_m(t - t_j) = f^{(m-2)}(t - t_j)/4 with
    f(s) = csc^2(s/2).
    """
    if m < 2 or m % 2:
        raise ValueError(f"m must be an even integer >= 2, got {m}")
    _check_proximity(angles, t)
    h = _gaps(angles, t)
    u = np.cos(h) / np.sin(h)
    out = 0.25 * np.sum(P.polyval(u, _csc2_derivative_poly(m - 2)), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def log_q_derivatives(angles, t):
    """(log|Q|)'(t) and (log|Q|)''(t)."""
    h = _gaps(angles, t)
    s = np.sin(h)
    d1 = 0.5 * np.sum(np.cos(h) / s, axis=-1)
    d2 = -0.25 * np.sum(1.0 / (s * s), axis=-1)
    return d1, d2


def log_abs_q(angles, t):
    h = _gaps(angles, t)
    with np.errstate(divide="ignore"):
        return np.sum(np.log(np.abs(np.sin(h))), axis=-1)


def product_max_point(angles) -> float:
    """A maximizer t_0 in [0, 2pi) of |Q(t)| = prod_j |sin((t - t_j)/2)|.

    log|Q| is evaluated on a grid of at least 64 n points; every grid local
    maximum is then polished by Newton's method on (log|Q|)', which is
    strictly decreasing between consecutive nodes, and the best is kept.
    Ties go to the smallest angle.
    """
    a = np.mod(np.asarray(angles, dtype=float), TWO_PI)
    n = len(a)
    if n < 1:
        raise ValueError("need at least one angle")
    size = max(64 * n, 256)
    tg = TWO_PI * np.arange(size) / size
    vals = log_abs_q(a, tg)
    cand = np.flatnonzero((vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1)) & np.isfinite(vals))
    best_t, best_v = None, -math.inf
    for i in cand:
        t = _newton_log_q(a, tg[i], TWO_PI / size)
        v = float(log_abs_q(a, t))
        if v > best_v + 1e-14 or (abs(v - best_v) <= 1e-14 and t < best_t):
            best_t, best_v = t, v
    return float(np.mod(best_t, TWO_PI))


def _newton_log_q(a: np.ndarray, t0: float, step: float) -> float:
    # bracket the root of (log|Q|)' inside the open arc between the adjacent nodes
    lo, hi = t0 - step, t0 + step
    d_lo, _ = log_q_derivatives(a, lo)
    d_hi, _ = log_q_derivatives(a, hi)
    if not (d_lo > 0 > d_hi):
        # widen to the enclosing arc
        rel = np.sort(np.mod(a - t0, TWO_PI))
        nxt = t0 + (rel[0] if rel[0] > 0 else rel[1] if len(rel) > 1 else TWO_PI)
        prv = t0 - (TWO_PI - rel[-1]) if rel[-1] > 0 else t0 - TWO_PI
        lo, hi = prv + 1e-12, nxt - 1e-12
    t = t0
    for _ in range(100):
        d1, d2 = log_q_derivatives(a, t)
        if not np.isfinite(d1):
            break
        if d1 > 0:
            lo = t
        else:
            hi = t
        nt = t - d1 / d2 if d2 < 0 else 0.5 * (lo + hi)
        if not lo < nt < hi:
            nt = 0.5 * (lo + hi)
        if abs(nt - t) < 1e-15 * max(1.0, abs(t)):
            t = nt
            break
        t = nt
    return t


def polarization_at_product_max(angles, p: float) -> float:
    """A_p at the maximizer of the product of distances."""
    return circle_A(angles, p, product_max_point(angles))
