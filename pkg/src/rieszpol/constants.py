"""Special functions and closed-form constants for Riesz polarization.

Everything here is a pure function of its arguments.  The gamma and zeta
routines are self-contained (no scipy) so that the closed forms below can
be cross-checked against independent library implementations in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .domains import Domain


class RieszDomainError(ValueError):
    """Argument outside the domain where a formula is defined."""


class UnavailableConstantError(ValueError):
    """No closed-form bound is known for the requested case."""


# ---------------------------------------------------------------------------
# Gamma

# Lanczos coefficients for g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Gamma function for x > 0 (Lanczos approximation, rel. error ~1e-15)."""
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise RieszDomainError(f"gamma requires x > 0, got {x!r}")
    if x < 0.5:
        return gamma(x + 1.0) / x
    if x > 171.6:
        return math.inf
    if x == round(x) and x <= 30:
        return float(math.factorial(int(x) - 1))
    z = x - 1.0
    a = _LANCZOS_COEF[0]
    t = z + _LANCZOS_G + 0.5
    for i in range(1, len(_LANCZOS_COEF)):
        a += _LANCZOS_COEF[i] / (z + i)
    # split the power to avoid overflow for large x
    half = t ** ((z + 0.5) / 2.0)
    return math.sqrt(2.0 * math.pi) * half * (half * math.exp(-t)) * a


# ---------------------------------------------------------------------------
# Zeta functions

# B_2, B_4, ..., B_20
_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
)


def hurwitz_zeta(s: float, a: float) -> float:
    """sum_{k>=0} (k + a)^{-s} for s > 1, a > 0, by Euler-Maclaurin summation.

    The head is summed directly up to N and the tail is replaced by the
    integral, the half-endpoint term and up to ten Bernoulli corrections.
    The correction series is cut where its terms stop decreasing; the
    first omitted term bounds the error.
    """
    s = float(s)
    if not s > 1.0:
        raise RieszDomainError(f"zeta requires s > 1, got {s!r}")
    if not a > 0.0:
        raise RieszDomainError(f"hurwitz_zeta requires a > 0, got {a!r}")
    n_head = max(12, int(math.ceil(s / 2.0)) + 6)
    head = math.fsum((k + a) ** -s for k in range(n_head))
    x = n_head + a
    tail = x ** (1.0 - s) / (s - 1.0) + 0.5 * x ** -s
    # rising factorial s(s+1)...(s+2j-2) times x^{-s-2j+1} / (2j)!
    coef = s * x ** (-s - 1.0)
    fact = 2.0
    prev = math.inf
    for j, b in enumerate(_BERNOULLI_EVEN, start=1):
        term = b / fact * coef
        if abs(term) >= prev:
            break
        tail += term
        prev = abs(term)
        if prev < 1e-18 * (head + tail):
            break
        coef *= (s + 2 * j - 1) * (s + 2 * j) / (x * x)
        fact *= (2 * j + 1) * (2 * j + 2)
    return head + tail


def riemann_zeta(p: float) -> float:
    """Riemann zeta function for real p > 1."""
    p = float(p)
    if not p > 1.0:
        raise RieszDomainError(f"riemann_zeta requires p > 1, got {p!r}")
    return hurwitz_zeta(p, 1.0)


def dirichlet_l_minus3(s: float) -> float:
    """L(s, chi_{-3}) = sum_k chi(k) k^{-s}, chi the nontrivial character mod 3."""
    return 3.0 ** -s * (hurwitz_zeta(s, 1.0 / 3.0) - hurwitz_zeta(s, 2.0 / 3.0))


def epstein_zeta_hex(p: float) -> float:
    """Epstein zeta of the unit hexagonal lattice, sum over X != 0 of |X|^{-p}.

    The lattice m(1,0) + n(1/2, sqrt(3)/2) has |X|^2 = m^2 + mn + n^2, whose
    Dirichlet series factors as 6 zeta(s) L(s, chi_{-3}) with s = p/2.
    """
    p = float(p)
    if not p > 2.0:
        raise RieszDomainError(f"epstein_zeta_hex requires p > 2, got {p!r}")
    s = p / 2.0
    return 6.0 * riemann_zeta(s) * dirichlet_l_minus3(s)


def epstein_zeta_hex_direct(p: float, radius: float = 200.0) -> float:
    """Truncated lattice sum over |X| <= radius plus the continuum tail.

    The tail replaces the points beyond ``radius`` by the lattice density
    2/sqrt(3) times the integral of r^{-p}; its error is of lower order
    than the tail itself.  Kept as an independent route for checking
    :func:`epstein_zeta_hex`.
    """
    import numpy as np

    p = float(p)
    if not p > 2.0:
        raise RieszDomainError(f"epstein_zeta_hex requires p > 2, got {p!r}")
    rmax = int(math.ceil(2.0 * radius / math.sqrt(3.0))) + 2
    total = 0.0
    ms = np.arange(-rmax, rmax + 1, dtype=float)
    for nn in range(-rmax, rmax + 1):
        x = ms + 0.5 * nn
        y = 0.5 * math.sqrt(3.0) * nn
        r2 = x * x + y * y
        keep = (r2 > 0) & (r2 <= radius * radius)
        total += float(np.sum(r2[keep] ** (-p / 2.0)))
    density = 2.0 / math.sqrt(3.0)
    tail = 2.0 * math.pi * density * radius ** (2.0 - p) / (p - 2.0)
    return total + tail


# ---------------------------------------------------------------------------
# Geometric constants


@dataclass(frozen=True)
class GeometricConstants:
    d: int
    beta_d: float
    sphere_area: float
    tau_d: float


def ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d."""
    return math.pi ** (d / 2.0) / gamma(d / 2.0 + 1.0)


def sphere_area(d: int) -> float:
    """d-dimensional Hausdorff measure of the unit sphere S^d in R^{d+1}."""
    return 2.0 * math.pi ** ((d + 1) / 2.0) / gamma((d + 1) / 2.0)


def tau(d: int) -> float:
    """(1/d) Gamma((d+1)/2) / (sqrt(pi) Gamma(d/2)); equals beta_d / |S^d|."""
    return gamma((d + 1) / 2.0) / (d * math.sqrt(math.pi) * gamma(d / 2.0))


def geometric_constants(d: int) -> GeometricConstants:
    if int(d) != d or d < 1:
        raise RieszDomainError(f"dimension must be a positive integer, got {d!r}")
    d = int(d)
    return GeometricConstants(d, ball_volume(d), sphere_area(d), tau(d))


# ---------------------------------------------------------------------------
# Wiener constants and the C_{p,d} constants


def wiener_sphere(d: int, p: float) -> float:
    if not 0.0 < p < d:
        raise RieszDomainError(f"sphere Wiener constant needs 0 < p < d, got p={p}, d={d}")
    return (
        2.0 ** (d - p - 1.0)
        * gamma((d + 1) / 2.0)
        * gamma((d - p) / 2.0)
        / (math.sqrt(math.pi) * gamma(d - p / 2.0))
    )


def wiener_ball(d: int, p: float) -> float:
    if not (p > 0.0 and d - 2 <= p < d):
        raise RieszDomainError(f"ball Wiener constant needs max(0,d-2) <= p < d, got p={p}, d={d}")
    return gamma((d - p) / 2.0) * gamma(p / 2.0 + 1.0) / gamma(d / 2.0)


def wiener_constant(domain: "Domain", p: float) -> float:
    """Wiener constant W_p of the circle, a sphere or a ball."""
    if domain.kind in ("circle", "sphere"):
        return wiener_sphere(domain.d, p)
    if domain.kind == "ball":
        return wiener_ball(domain.d, p)
    raise UnavailableConstantError(f"no closed-form Wiener constant for {domain.kind}")


def c_pd_lower(p: float, d: int, strict: bool = True) -> float:
    """Lower estimate for C_{p,d}, p > d >= 2.

    The estimate is only established when (p - d)/2 is not an integer;
    with ``strict`` such p are rejected.
    """
    if not (d >= 2 and p > d):
        raise RieszDomainError(f"C_(p,d) lower estimate needs p > d >= 2, got p={p}, d={d}")
    half = (p - d) / 2.0
    if strict and half == round(half):
        raise UnavailableConstantError(f"(p-d)/2 = {half:g} is an integer; estimate not established")
    return (
        d
        * math.pi ** (p / 2.0)
        / (p - d)
        * (gamma(1.0 + half) / gamma(1.0 + p / 2.0)) ** (p / d)
    )


def c_p1(p: float) -> float:
    """C_{p,1} = 2 zeta(p)."""
    return 2.0 * riemann_zeta(p)


def c_p2_conjectured(p: float) -> float:
    """Conjectured C_{p,2} from the hexagonal lattice."""
    return (math.sqrt(3.0) / 2.0) ** (p / 2.0) * epstein_zeta_hex(p)


def conjectured_sigma_p1(p: float) -> float:
    """The constant 2 (2^p - 1) zeta(p) forced by optimality of roots of unity."""
    if not p > 1.0:
        raise RieszDomainError(f"sigma_(p,1) requires p > 1, got {p!r}")
    return 2.0 * (2.0 ** p - 1.0) * riemann_zeta(p)


def chebyshev_closed_form(n: int, p: int) -> float:
    """Exact M_n^p on the circle for p = 2 and p = 4."""
    if n < 1:
        raise RieszDomainError(f"n must be >= 1, got {n}")
    if p == 2:
        return n * n / 4.0
    if p == 4:
        return n ** 4 / 48.0 + n * n / 24.0
    raise RieszDomainError(f"closed form only known for p in {{2, 4}}, got {p!r}")


# ---------------------------------------------------------------------------
# Bounds


@dataclass(frozen=True)
class BoundValue:
    """A bound on M_n^p with the formula it came from.

    ``asymptotic`` marks bounds that come from a liminf statement: they
    hold for the normalized quantity in the limit, not at each finite n.
    """

    value: float
    kind: str
    source: str
    conjectural: bool = False
    asymptotic: bool = False


def _upper_sphere(d: int, p: float, n: int) -> BoundValue:
    t = tau(d)
    if p > d:
        return BoundValue((n * p * t / (p - d)) ** (p / d), "upper", "sphere_upper")
    if p == d:
        ln = math.log(n)
        val = t * n * (ln + math.log(ln) + math.log(2.0 ** d * t)) / (1.0 - 1.0 / ln)
        return BoundValue(val, "upper", "sphere_upper")
    return BoundValue(n * wiener_sphere(d, p), "upper", "sphere_upper")


def _upper_ball(d: int, p: float, n: int) -> BoundValue:
    if p > d:
        return BoundValue((p * n / (p - d)) ** (p / d), "upper", "ball_upper")
    if p == d:
        ln = math.log(n)
        val = n * (ln + math.log(ln) + d * math.log(2.0)) / (1.0 - 1.0 / ln)
        return BoundValue(val, "upper", "ball_upper")
    if p > d - 2:
        return BoundValue(n * wiener_ball(d, p), "upper", "ball_upper")
    return BoundValue(float(n), "upper", "ball_constant")


def _c_pd(p: float, d: int) -> tuple[float, str, bool]:
    if d == 1:
        return c_p1(p), "C_p1=2zeta(p)", False
    if d == 2:
        return c_p2_conjectured(p), "C_p2 hexagonal", True
    return c_pd_lower(p, d), "C_pd lower estimate", False


def _lower_sphere(d: int, p: float, n: int) -> BoundValue:
    area = sphere_area(d)
    if p > d:
        c, tag, conj = _c_pd(p, d)
        val = c / area ** (p / d) * n ** (p / d)
        src = "sphere_asymptotic"
        return BoundValue(val, "lower", f"{src};{tag}", conjectural=conj, asymptotic=True)
    if p == d:
        return BoundValue(tau(d) * n * math.log(n), "lower", "sphere_log", asymptotic=True)
    return BoundValue(n * wiener_sphere(d, p), "lower", "sphere_wiener", asymptotic=True)


def _lower_ball(d: int, p: float, n: int, source: Optional[str]) -> BoundValue:
    if p > d:
        if source != "ball_asymptotic" and n >= 2 ** d:
            return BoundValue(4.0 ** -p * n ** (p / d), "lower", "packing")
        if source == "packing":
            raise UnavailableConstantError(f"packing bound needs n >= 2^d = {2 ** d}")
        c, tag, conj = _c_pd(p, d)
        val = c * (gamma(d / 2.0 + 1.0) / math.pi ** (d / 2.0)) ** (p / d) * n ** (p / d)
        return BoundValue(val, "lower", f"ball_asymptotic;{tag}", conjectural=conj, asymptotic=True)
    if p == d:
        return BoundValue(n * math.log(n), "lower", "ball_log", asymptotic=True)
    # all points at the centre give potential exactly n on the unit sphere
    return BoundValue(float(n), "lower", "ball_constant")


def polarization_bound(
    domain: "Domain", p: float, n: int, kind: str, source: Optional[str] = None
) -> BoundValue:
    """Closed-form lower or upper bound on M_n^p(domain).

    Upper bounds hold for every n >= 3.  Lower bounds flagged ``asymptotic``
    are the liminf constants multiplied by the matching power of n.  For the
    ball with p > d and n >= 2^d the finite packing bound 4^{-p} n^{p/d} is
    preferred; pass ``source="ball_asymptotic"`` for the asymptotic one instead.
    """
    if not p > 0:
        raise RieszDomainError(f"p must be positive, got {p!r}")
    if kind not in ("lower", "upper"):
        raise ValueError(f"kind must be 'lower' or 'upper', got {kind!r}")
    if domain.kind == "segment":
        raise UnavailableConstantError("no closed-form polarization bound for the segment")
    d = domain.d
    if kind == "upper":
        if n < 3:
            raise RieszDomainError(f"upper estimates are stated for n >= 3, got n={n}")
        if domain.kind == "ball":
            return _upper_ball(d, p, n)
        return _upper_sphere(d, p, n)
    if n < 1:
        raise RieszDomainError(f"n must be >= 1, got {n}")
    if p == d and n < 2:
        raise RieszDomainError("n log n normalization needs n >= 2")
    if domain.kind == "ball":
        return _lower_ball(d, p, n, source)
    return _lower_sphere(d, p, n)
