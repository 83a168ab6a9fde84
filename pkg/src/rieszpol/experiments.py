"""Sweeps over n, limit extrapolation, verification suites and exploration.

A ``SweepTable`` holds one row per n with the value, its three standard
normalizations and the closed-form lower and upper bounds.  On the circle
the lower bound is the exact roots-of-unity energy divided by n - 1, which
is certified at every n; elsewhere the closed-form bounds are used and
flagged when they are conjectural or only asymptotic.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import constants as C
from .domains import Configuration, Domain, cap_measure, maximal_delta_net, sample_uniform
from .energy import (
    EnergyOptions,
    energy,
    minimize_energy,
    polarization_lower_bound_from_energy,
    roots_of_unity_energy,
    superadditivity_check,
)
from .polarization import (
    SolverOptions,
    discrete_optimum,
    equally_spaced_value,
    inner_min,
    maximize_polarization,
    shifted_optimal_angles,
)
from .potentials import (
    ProximityError,
    circle_A,
    circle_A_recurrence_check,
    log_derivative_functional,
    polarization_at_product_max,
)
from .serialize import dumps

COLUMNS = (
    "n", "p", "d", "value", "norm_pow", "norm_nlogn", "norm_n",
    "lower", "upper", "lower_src", "upper_src", "flags",
)
SUITES = (
    "circle_closed_forms", "sphere_bounds", "ball_bounds", "discrete_circle",
    "recurrences", "energy_bounds", "conjecture1_d1",
)


class BoundViolationError(AssertionError):
    """A certified bound sandwich failed on an exact row."""


class InsufficientDataError(ValueError):
    pass


def thread_count() -> int:
    """Worker cap from RPL_THREADS (default 1)."""
    raw = os.environ.get("RPL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn: Callable, items: Sequence) -> list:
    """map() over items with up to RPL_THREADS workers, results in input order."""
    workers = min(thread_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# sweep tables


@dataclass
class SweepRow:
    n: int
    p: float
    d: int
    value: float
    norm_pow: float
    norm_nlogn: float
    norm_n: float
    lower: float
    upper: float
    lower_src: str
    upper_src: str
    flags: str

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, c) for c in COLUMNS)


@dataclass
class SweepTable:
    domain: Domain
    method: str
    rows: list = field(default_factory=list)
    reference: Optional[dict] = None

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        vals = [getattr(r, name) for r in self.rows]
        if name in ("lower_src", "upper_src", "flags"):
            return np.asarray(vals, dtype=object)
        return np.asarray(vals, dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([repr(float(x)) if isinstance(x, float) else x for x in r.as_tuple()])
        return buf.getvalue()

    def to_json(self) -> dict:
        out = {
            "domain": self.domain.to_json(),
            "method": self.method,
            "columns": list(COLUMNS),
            "rows": [dict(zip(COLUMNS, r.as_tuple())) for r in self.rows],
        }
        if self.reference is not None:
            out["reference"] = self.reference
        return out

    def to_svg(self, x: str = "n", ys: Sequence[str] = ("value", "upper"), width: int = 640, height: int = 400) -> str:
        """A self-contained line chart of columns ``ys`` against ``x``.

        The x axis is logarithmic when the x values span more than two decades.
        """
        xs = self.column(x)
        series = [(name, self.column(name)) for name in ys]
        logx = len(xs) > 1 and np.all(xs > 0) and xs.max() / xs.min() > 100
        tx = np.log10(xs) if logx else xs
        finite = np.concatenate([s[np.isfinite(s)] for _, s in series] or [np.zeros(1)])
        y0, y1 = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
        if y1 <= y0:
            y0, y1 = y0 - 0.5, y1 + 0.5
        x0, x1 = (float(tx.min()), float(tx.max())) if len(tx) else (0.0, 1.0)
        if x1 <= x0:
            x0, x1 = x0 - 0.5, x1 + 0.5
        L, R, T, B = 70, 20, 20, 50

        def px(v):
            return L + (v - x0) / (x1 - x0) * (width - L - R)

        def py(v):
            return height - B - (v - y0) / (y1 - y0) * (height - T - B)

        colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            '<rect width="100%" height="100%" fill="white"/>',
            f'<line x1="{L}" y1="{height - B}" x2="{width - R}" y2="{height - B}" stroke="black"/>',
            f'<line x1="{L}" y1="{T}" x2="{L}" y2="{height - B}" stroke="black"/>',
            f'<text x="{(width + L) / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12">'
            f'{"log10 " if logx else ""}{x}</text>',
            f'<text x="{L - 6}" y="{py(y1):.1f}" text-anchor="end" font-size="10">{y1:.6g}</text>',
            f'<text x="{L - 6}" y="{py(y0):.1f}" text-anchor="end" font-size="10">{y0:.6g}</text>',
            f'<text x="{px(x0):.1f}" y="{height - B + 14}" text-anchor="middle" font-size="10">{x0:.6g}</text>',
            f'<text x="{px(x1):.1f}" y="{height - B + 14}" text-anchor="middle" font-size="10">{x1:.6g}</text>',
        ]
        for k, (name, s) in enumerate(series):
            ok = np.isfinite(s)
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(tx[ok], s[ok]))
            color = colors[k % len(colors)]
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
            out.append(
                f'<text x="{width - R - 4}" y="{T + 14 * (k + 1)}" text-anchor="end" '
                f'font-size="11" fill="{color}">{name}</text>'
            )
        out.append("</svg>")
        return "\n".join(out) + "\n"


def _normalizations(value: float, n: int, p: float, d: int):
    pow_ = value / n ** (p / d)
    nlogn = value / (n * math.log(n)) if n >= 2 else math.nan
    return pow_, nlogn, value / n


def _bounds(domain: Domain, n: int, p: float):
    flags = []
    if domain.kind == "circle":
        if n >= 2:
            lower, lsrc = roots_of_unity_energy(n, p) / (n - 1), "energy_roots"
        else:
            lower, lsrc = 2.0 ** -p, "single_point"
    else:
        try:
            b = C.polarization_bound(domain, p, n, "lower")
            lower, lsrc = b.value, b.source
            if b.conjectural:
                flags.append("lower_conjectural")
            if b.asymptotic:
                flags.append("lower_asymptotic")
        except (C.UnavailableConstantError, C.RieszDomainError):
            lower, lsrc = math.nan, ""
    try:
        b = C.polarization_bound(domain, p, n, "upper")
        upper, usrc = b.value, b.source
    except (C.UnavailableConstantError, C.RieszDomainError):
        upper, usrc = math.nan, ""
    return lower, upper, lsrc, usrc, flags


def _make_row(domain: Domain, n: int, p: float, value: float, flags: list, exact: bool) -> SweepRow:
    lower, upper, lsrc, usrc, bflags = _bounds(domain, n, p)
    flags = list(flags) + bflags
    hard = exact and not any(f in bflags for f in ("lower_conjectural", "lower_asymptotic"))
    rtol = 1e-12
    low_ok = not math.isfinite(lower) or lower <= value * (1 + rtol)
    up_ok = not math.isfinite(upper) or value <= upper * (1 + rtol)
    if not (low_ok and up_ok):
        if hard:
            raise BoundViolationError(
                f"n={n} p={p}: {lower!r} <= {value!r} <= {upper!r} fails ({lsrc}, {usrc})"
            )
        flags.append("sandwich_violation")
    pw, nl, nn = _normalizations(value, n, p, domain.d)
    return SweepRow(n, float(p), domain.d, float(value), pw, nl, nn, float(lower), float(upper), lsrc, usrc, ";".join(flags))


def sweep(
    domain: Domain,
    p: float,
    n_values: Iterable[int],
    method: str = "exact_circle",
    opts: Optional[SolverOptions] = None,
) -> SweepTable:
    """One row per n: the polarization value, normalizations and bounds.

    ``exact_circle`` uses the closed-form equally spaced value (circle only)
    and asserts the bound sandwich whenever both bounds are non-conjectural
    and finite-n.  ``optimizer`` uses maximize_polarization; its rows are
    flagged ``best_found`` and sandwich failures are only flagged.
    """
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")
    ns = [int(n) for n in n_values]
    if method == "exact_circle":
        if domain.kind != "circle":
            raise ValueError(f"method exact_circle needs the circle, got {domain}")

        def one(n):
            return _make_row(domain, n, p, equally_spaced_value(n, p), ["exact"], True)

    elif method == "optimizer":

        def one(n):
            res = maximize_polarization(domain, n, p, opts)
            flags = ["best_found"] + ([] if res.converged else ["unconverged"])
            return _make_row(domain, n, p, res.value, flags, False)

    else:
        raise ValueError(f"unknown method {method!r}")
    return SweepTable(domain, method, ordered_map(one, ns))


def asymptote_estimate(table: SweepTable, normalization: str = "pow") -> dict:
    """Intercept and slope of a linear fit of a normalized column.

    The abscissa is 1/ln n when p = d and 1/n otherwise; the intercept is
    the extrapolated limit.  ``normalization`` is one of pow, nlogn, n (or
    the column names norm_pow, norm_nlogn, norm_n).
    """
    col = normalization if normalization.startswith("norm_") else f"norm_{normalization}"
    if col not in ("norm_pow", "norm_nlogn", "norm_n"):
        raise ValueError(f"unknown normalization {normalization!r}")
    if len(table) < 3:
        raise InsufficientDataError(f"need at least 3 rows, got {len(table)}")
    n = table.column("n")
    if np.any(np.diff(n) <= 0):
        raise InsufficientDataError("n must be strictly increasing")
    y = table.column(col)
    row = table.rows[0]
    x = 1.0 / np.log(n) if row.p == row.d else 1.0 / n
    slope, limit = np.polyfit(x, y, 1)
    return {"limit": float(limit), "slope": float(slope)}


# ---------------------------------------------------------------------------
# verification


@dataclass
class Claim:
    tag: str
    status: str
    observed: float
    expected: float
    tolerance: float
    note: str = ""

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "status": self.status,
            "observed": self.observed,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "note": self.note,
        }


@dataclass
class VerificationReport:
    suite: str
    claims: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.claims)

    def add(self, tag: str, ok: bool, observed: float, expected: float, tolerance: float, note: str = ""):
        self.claims.append(Claim(tag, "pass" if ok else "fail", float(observed), float(expected), float(tolerance), note))

    def to_json(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "claims": [c.to_json() for c in self.claims]}

    def dumps(self) -> str:
        return dumps(self)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def closed_form_n_values() -> list:
    return list(range(1, 65)) + [1000, 10000]


def _suite_circle_closed_forms(rep: VerificationReport, seed: int) -> None:
    ns = closed_form_n_values()
    e2 = max(_rel(equally_spaced_value(n, 2), n * n / 4) for n in ns)
    rep.add("circle_p2_closed_form", e2 <= 1e-12, e2, 0.0, 1e-12, "max relative error of n^2/4")
    e4 = max(_rel(equally_spaced_value(n, 4), n**4 / 48 + n**2 / 24) for n in ns)
    rep.add("circle_p4_closed_form", e4 <= 1e-12, e4, 0.0, 1e-12, "max relative error of n^4/48 + n^2/24")
    for n, p, exp in ((6, 2, 9.0), (3, 4, 2.0625), (2, 3, 1 / math.sqrt(2))):
        v = equally_spaced_value(n, p)
        rep.add(f"circle_value_n{n}_p{p}", _rel(v, exp) <= 1e-12, v, exp, 1e-12)


def _suite_sphere_bounds(rep: VerificationReport, seed: int) -> None:
    w = C.wiener_constant(Domain.sphere(2), 1.0)
    rep.add("wiener_sphere_d2_p1", w == 1.0, w, 1.0, 0.0)
    dom = Domain.sphere(2)
    for p in (2.0, 3.0):
        for n in (4, 6, 12):
            val = maximize_polarization(dom, n, p, SolverOptions(restarts=6, seed=seed)).value
            low = float(polarization_lower_bound_from_energy(dom, n, p, EnergyOptions(seed=seed)))
            up = C.polarization_bound(dom, p, n, "upper").value
            rep.add(f"sphere_sandwich_lower_n{n}_p{p:g}", low <= val * (1 + 1e-9), val, low, 1e-9,
                    "energy bound <= value (best-found energy)")
            rep.add(f"sphere_sandwich_upper_n{n}_p{p:g}", val <= up, val, up, 0.0, "value <= upper formula")


def _suite_ball_bounds(rep: VerificationReport, seed: int, n_max: int = 8) -> None:
    w = C.wiener_constant(Domain.ball(3), 1.0)
    rep.add("wiener_ball_d3_p1", w == 1.0, w, 1.0, 0.0)
    dom = Domain.ball(3)
    opts = SolverOptions(restarts=3, polish_top=2, seed=seed, inner_tol=1e-7)
    for n in range(1, n_max + 1):
        v = maximize_polarization(dom, n, 1.0, opts).value
        rep.add(f"ball_constancy_n{n}", abs(v - n) <= 1e-3, v, n, 1e-3)
    worst = -math.inf
    rng = np.random.default_rng(seed)
    for _ in range(40):
        n = int(rng.integers(1, 9))
        c = sample_uniform(dom, n, int(rng.integers(2**63)))
        worst = max(worst, inner_min(c, 1.0, 1e-9).value - n)
    rep.add("ball_inner_min_at_most_n", worst <= 1e-9, worst, 0.0, 1e-9, "max of inner_min - n over random configs")


def discrete_polarization_batch(angles: np.ndarray, p: float) -> np.ndarray:
    """discrete_polarization for each row of a (K, n) array of angles."""
    a = np.asarray(angles, dtype=float)
    n = a.shape[1]
    tests = math.pi * np.arange(2 * n) / n
    s = np.abs(np.sin(0.5 * (tests[None, :, None] - a[:, None, :])))
    with np.errstate(divide="ignore", over="ignore"):
        return np.min(np.sum((2.0 * s) ** -p, axis=2), axis=1)


def _suite_discrete_circle(rep: VerificationReport, seed: int, trials: int = 10_000) -> None:
    rng = np.random.default_rng(seed)
    for n in range(2, 9):
        for p in (1.0, 2.0, 4.0):
            opt = discrete_optimum(n, p)
            att = float(discrete_polarization_batch(shifted_optimal_angles(n)[None, :], p)[0])
            rep.add(f"discrete_attained_n{n}_p{p:g}", _rel(att, opt) <= 1e-12, att, opt, 1e-12)
            vals = discrete_polarization_batch(rng.uniform(0, 2 * math.pi, (trials, n)), p)
            worst = float(np.max(vals))
            rep.add(f"discrete_bound_n{n}_p{p:g}", worst <= opt + 1e-12, worst, opt, 1e-12,
                    f"max over {trials} random configurations")


def _random_t(angles: np.ndarray, rng: np.random.Generator) -> float:
    while True:
        t = rng.uniform(0, 2 * math.pi)
        dist = np.abs(np.mod(t - angles + math.pi, 2 * math.pi) - math.pi)
        if np.all(dist > 1e-2):
            return t


def _suite_recurrences(rep: VerificationReport, seed: int, trials: int = 100) -> None:
    rng = np.random.default_rng(seed)
    for p in (1.0, 2.0, 3.5):
        worst = 0.0
        for _ in range(trials):
            a = rng.uniform(0, 2 * math.pi, int(rng.integers(1, 13)))
            worst = max(worst, circle_A_recurrence_check(a, p, _random_t(a, rng)))
        rep.add(f"A_recurrence_p{p:g}", worst <= 1e-9, worst, 0.0, 1e-9)
    w2 = w4 = 0.0
    for _ in range(trials):
        a = rng.uniform(0, 2 * math.pi, int(rng.integers(1, 13)))
        t = _random_t(a, rng)
        a2, a4 = circle_A(a, 2.0, t), circle_A(a, 4.0, t)
        w2 = max(w2, _rel(log_derivative_functional(a, 2, t), a2))
        w4 = max(w4, _rel(log_derivative_functional(a, 4, t), 6.0 * a4 - a2))
    rep.add("log_derivative_m2_equals_A2", w2 <= 1e-9, w2, 0.0, 1e-9)
    rep.add("log_derivative_m4_equals_6A4_minus_A2", w4 <= 1e-9, w4, 0.0, 1e-9)
    worst4 = worst2 = -math.inf
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        a = rng.uniform(0, 2 * math.pi, n)
        worst4 = max(worst4, polarization_at_product_max(a, 4.0) - (n**4 / 48 + n**2 / 24))
        worst2 = max(worst2, polarization_at_product_max(a, 2.0) - n * n / 4)
    rep.add("product_max_p4_bound", worst4 <= 1e-10, worst4, 0.0, 1e-10, "max excess over n^4/48 + n^2/24")
    rep.add("product_max_p2_bound", worst2 <= 1e-10, worst2, 0.0, 1e-10, "max excess over n^2/4")


def _suite_energy_bounds(rep: VerificationReport, seed: int) -> None:
    from .domains import roots_of_unity

    worst = max(abs(energy(roots_of_unity(n), 2.0) - n * (n * n - 1) / 12) for n in range(2, 101))
    rep.add("roots_energy_p2_closed_form", worst <= 1e-10 * 100**3, worst, 0.0, 1e-10 * 100**3,
            "max absolute error (relative tolerance 1e-10 at n=100)")
    n = 10_000
    ratio = roots_of_unity_energy(n, 2.0) / n**3
    exp = C.c_p1(2.0) / (2 * math.pi) ** 2
    rep.add("energy_leading_term_n1e4", _rel(ratio, exp) <= 0.01, ratio, exp, 0.01)
    worst = -math.inf
    for n in range(2, 51):
        worst = max(worst, float(polarization_lower_bound_from_energy(Domain.circle(), n, 2.0)) - equally_spaced_value(n, 2.0))
    rep.add("energy_lower_bound_circle", worst <= 0.0, worst, 0.0, 0.0, "max of bound - value, n=2..50")
    res = superadditivity_check([n * (n * n - 1) / 12 for n in range(2, 51)], n0=2)
    rep.add("superadditivity_circle_p2", min(res) >= -1e-6, min(res), 0.0, 1e-6)
    es = [minimize_energy(Domain.sphere(2), n, 1.0, EnergyOptions(seed=seed)).energy for n in range(2, 9)]
    res = superadditivity_check(es, n0=2)
    rep.add("superadditivity_sphere_p1", min(res) >= -1e-6, min(res), 0.0, 1e-6, "best-found energies")


def _suite_conjecture1_d1(rep: VerificationReport, seed: int) -> None:
    n = 100_000
    for p in (2.0, 3.0, 4.0):
        obs = equally_spaced_value(n, p) / n**p
        exp = C.conjectured_sigma_p1(p) / (2 * math.pi) ** p
        rep.add(f"sigma_p1_circle_p{p:g}", _rel(obs, exp) <= 0.005, obs, exp, 0.005)
    n = 1_000_000
    obs = equally_spaced_value(n, 1.0) / (n * math.log(n))
    exp = 1.0 / math.pi
    rep.add("p_equals_d_circle_rate", _rel(obs, exp) <= 0.15, obs, exp, 0.15)


_SUITES = {
    "circle_closed_forms": _suite_circle_closed_forms,
    "sphere_bounds": _suite_sphere_bounds,
    "ball_bounds": _suite_ball_bounds,
    "discrete_circle": _suite_discrete_circle,
    "recurrences": _suite_recurrences,
    "energy_bounds": _suite_energy_bounds,
    "conjecture1_d1": _suite_conjecture1_d1,
}


def verify_suite(name: str, seed: int = 0) -> VerificationReport:
    """Run a named batch of checks; failures are report entries, not errors."""
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    rep = VerificationReport(name)
    _SUITES[name](rep, seed)
    return rep


# ---------------------------------------------------------------------------
# exploration


def conjecture_explore(
    domain: Domain, p: float, n_values: Iterable[int], opts: Optional[SolverOptions] = None
) -> SweepTable:
    """Normalized polarization against the conjectured limit; no pass/fail.

    For p > 1 the ratio column is norm_pow = value / n^p and the reference
    is sigma_{p,1} / H^p with H the length of the curve.  For p = 1 the
    ratio is norm_nlogn and the reference 2 / H.  Circle values are exact;
    segment values come from the optimizer.
    """
    if domain.kind not in ("circle", "segment"):
        raise ValueError(f"exploration supports the circle and the segment, got {domain}")
    if p < 1:
        raise ValueError(f"exploration needs p >= 1, got {p}")
    length = 2 * math.pi if domain.kind == "circle" else 1.0
    if p > 1:
        ref = {"column": "norm_pow", "value": C.conjectured_sigma_p1(p) / length**p, "conjectural": True}
    else:
        ref = {"column": "norm_nlogn", "value": 2.0 / length, "conjectural": True}
    if domain.kind == "circle":
        table = sweep(domain, p, n_values, "exact_circle")
    else:
        ns = [int(n) for n in n_values]

        def one(n):
            res = maximize_polarization(domain, n, p, opts)
            flags = ["best_found"] + ([] if res.converged else ["unconverged"])
            return _make_row(domain, n, p, res.value, flags, False)

        table = SweepTable(domain, "optimizer", ordered_map(one, ns))
    for r in table.rows:
        r.flags = ";".join(f for f in (r.flags, "exploratory") if f)
    table.reference = ref
    return table


# ---------------------------------------------------------------------------
# Monte Carlo checks of the Wiener constants


def sample_equilibrium(domain: Domain, p: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Samples from the p-equilibrium measure of a sphere or ball.

    Spheres: the normalized surface measure.  Balls: the boundary sphere
    when p <= d - 2, otherwise the radial density proportional to
    (1 - |x|^2)^{(p - d)/2}.
    """
    m = domain.ambient_dim
    x = rng.standard_normal((size, m))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    if domain.spherical:
        return x
    if domain.kind != "ball":
        raise C.UnavailableConstantError(f"no equilibrium sampler for {domain}")
    d = domain.d
    if p <= d - 2:
        return x
    r = np.sqrt(rng.beta(d / 2.0, (p - d) / 2.0 + 1.0, size))
    return x * r[:, None]


def wiener_monte_carlo(domain: Domain, p: float, pairs: int = 1_000_000, seed: int = 0) -> float:
    """Mean of |x - y|^{-p} over independent equilibrium pairs."""
    rng = np.random.default_rng(seed)
    x = sample_equilibrium(domain, p, pairs, rng)
    y = sample_equilibrium(domain, p, pairs, rng)
    return float(np.mean(np.linalg.norm(x - y, axis=1) ** -p))


def packing_net_check(n: int = 16, p: float = 4.0, seed: int = 0) -> dict:
    """delta-net of the unit disk with delta = 4 n^{-1/2} and its inner minimum."""
    delta = 4.0 / math.sqrt(n)
    net = maximal_delta_net(Domain.ball(2), delta, seed=seed)
    res = inner_min(net, p, 1e-9)
    return {"delta": delta, "size": net.n, "inner_min": res.value, "threshold": delta**-p}


def cap_bound_check(trials: int = 100, seed: int = 0) -> float:
    """Largest cap_measure(d, r) - tau_d r^d over random r, d in {2, 3}."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for d in (2, 3):
        for r in rng.uniform(0, 2, trials):
            worst = max(worst, cap_measure(d, r) - C.tau(d) * r**d)
    return worst
