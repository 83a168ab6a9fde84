import csv
import io
import json
import math

import numpy as np
import pytest

from rieszpol import constants as C
from rieszpol.domains import Domain
from rieszpol.experiments import (
    COLUMNS,
    BoundViolationError,
    InsufficientDataError,
    SweepTable,
    _make_row,
    asymptote_estimate,
    cap_bound_check,
    conjecture_explore,
    discrete_polarization_batch,
    ordered_map,
    packing_net_check,
    sweep,
    verify_suite,
    wiener_monte_carlo,
)
from rieszpol.polarization import SolverOptions, discrete_polarization
from rieszpol.serialize import dumps


def test_sweep_p2_constant_ratio():
    t = sweep(Domain.circle(), 2.0, [4, 8, 16])
    np.testing.assert_allclose(t.column("norm_pow"), 0.25, rtol=1e-14)
    assert all("exact" in r.flags for r in t.rows)
    est = asymptote_estimate(t, "pow")
    assert est["limit"] == pytest.approx(0.25, rel=1e-12)
    assert est["slope"] == pytest.approx(0.0, abs=1e-10)


def test_sweep_subdimensional_rate():
    t = sweep(Domain.circle(), 0.5, [100_000])
    w = C.wiener_constant(Domain.circle(), 0.5)
    assert t.rows[0].norm_n == pytest.approx(w, rel=0.01)


def test_sweep_p_equals_d_upper():
    t = sweep(Domain.circle(), 1.0, [1_000_000])
    r = t.rows[0]
    assert r.value <= r.upper
    assert r.upper_src == "sphere_upper"


@pytest.mark.parametrize("p", [0.5, 1.0, 1.5, 2.0, 3.0])
def test_sweep_sandwich_holds(p):
    # exact rows raise on a certified violation, so building the table is the check
    t = sweep(Domain.circle(), p, range(1, 120))
    for r in t.rows:
        assert r.lower <= r.value * (1 + 1e-12)
        assert "sandwich_violation" not in r.flags


def test_make_row_raises_on_violation():
    with pytest.raises(BoundViolationError):
        _make_row(Domain.circle(), 10, 2.0, 100.0, ["exact"], True)
    row = _make_row(Domain.circle(), 10, 2.0, 100.0, ["best_found"], False)
    assert "sandwich_violation" in row.flags


def test_asymptote_p1():
    t = sweep(Domain.circle(), 1.0, [1000, 3000, 10_000, 30_000, 100_000, 300_000, 1_000_000])
    est = asymptote_estimate(t, "nlogn")
    assert est["limit"] == pytest.approx(1 / math.pi, rel=0.10)


def test_asymptote_p3():
    t = sweep(Domain.circle(), 3.0, [1000, 2000, 5000, 10_000])
    est = asymptote_estimate(t, "norm_pow")
    exp = C.conjectured_sigma_p1(3.0) / (2 * math.pi) ** 3
    assert est["limit"] == pytest.approx(exp, rel=0.005)


def test_asymptote_errors():
    t = sweep(Domain.circle(), 2.0, [4, 8])
    with pytest.raises(InsufficientDataError):
        asymptote_estimate(t)
    t = sweep(Domain.circle(), 2.0, [4, 8, 16])
    with pytest.raises(ValueError):
        asymptote_estimate(t, "bogus")


def test_sweep_rejects():
    with pytest.raises(ValueError):
        sweep(Domain.sphere(2), 2.0, [4])
    with pytest.raises(ValueError):
        sweep(Domain.circle(), 2.0, [4], method="nope")
    with pytest.raises(ValueError):
        sweep(Domain.circle(), -1.0, [4])


def test_csv_roundtrip():
    t = sweep(Domain.circle(), 1.3, [3, 10, 77])
    rows = list(csv.reader(io.StringIO(t.to_csv())))
    assert tuple(rows[0]) == COLUMNS
    for line, row in zip(rows[1:], t.rows):
        assert float(line[COLUMNS.index("value")]) == row.value
        assert float(line[COLUMNS.index("upper")]) == row.upper


def test_json_and_svg():
    t = sweep(Domain.circle(), 2.0, [4, 8, 16])
    js = json.loads(dumps(t))
    assert js["columns"] == list(COLUMNS)
    assert len(js["rows"]) == 3
    svg = t.to_svg()
    assert svg.startswith("<svg") and svg.count("<polyline") == 2
    assert "value" in svg and "upper" in svg


def test_optimizer_sweep_flags():
    t = sweep(Domain.sphere(2), 2.0, [2, 3], method="optimizer", opts=SolverOptions(restarts=2))
    assert all("best_found" in r.flags for r in t.rows)
    assert t.rows[0].value == pytest.approx(1.0, rel=1e-6)


def test_ordered_map_threads(monkeypatch):
    monkeypatch.setenv("RPL_THREADS", "4")
    assert ordered_map(lambda x: x * x, list(range(20))) == [x * x for x in range(20)]
    a = sweep(Domain.circle(), 1.5, range(1, 40)).to_csv()
    monkeypatch.setenv("RPL_THREADS", "1")
    assert sweep(Domain.circle(), 1.5, range(1, 40)).to_csv() == a


def test_discrete_batch_matches_scalar():
    rng = np.random.default_rng(0)
    a = rng.uniform(0, 2 * math.pi, (50, 5))
    batch = discrete_polarization_batch(a, 2.0)
    np.testing.assert_allclose(batch, [discrete_polarization(r, 5, 2.0) for r in a], rtol=1e-14)


@pytest.mark.parametrize("name", ["circle_closed_forms", "discrete_circle", "energy_bounds", "conjecture1_d1"])
def test_fast_suites_pass(name):
    rep = verify_suite(name)
    assert rep.passed, [c for c in rep.claims if c.status != "pass"]
    js = json.loads(rep.dumps())
    assert js["suite"] == name and js["passed"] is True


@pytest.mark.slow
def test_recurrences_suite_passes():
    assert verify_suite("recurrences").passed


def test_verify_unknown_suite():
    with pytest.raises(ValueError):
        verify_suite("nope")


def test_explore_circle_reference():
    t = conjecture_explore(Domain.circle(), 3.0, [100, 1000, 10_000])
    assert t.reference["column"] == "norm_pow"
    assert t.rows[-1].norm_pow == pytest.approx(t.reference["value"], rel=0.005)
    assert all("exploratory" in r.flags for r in t.rows)
    t = conjecture_explore(Domain.circle(), 1.0, [1000, 100_000])
    assert t.reference["value"] == pytest.approx(1 / math.pi)


def test_explore_segment_records_finite_ratios():
    t = conjecture_explore(Domain.segment(), 3.0, [2, 3, 4], SolverOptions(restarts=2))
    r = t.column("norm_pow")
    assert np.all(np.isfinite(r)) and np.all(r > 0)
    assert all("best_found" in row.flags for row in t.rows)


def test_explore_rejects():
    with pytest.raises(ValueError):
        conjecture_explore(Domain.sphere(2), 3.0, [4])
    with pytest.raises(ValueError):
        conjecture_explore(Domain.circle(), 0.5, [4])


@pytest.mark.parametrize("domain", [Domain.sphere(2), Domain.ball(3)], ids=str)
def test_wiener_monte_carlo(domain):
    assert wiener_monte_carlo(domain, 1.0, pairs=1_000_000, seed=0) == pytest.approx(1.0, abs=3e-3)


@pytest.mark.parametrize("d, p", [(3, 1.5), (4, 2.5)])
def test_wiener_monte_carlo_ball(d, p):
    # heavy tails for p near d make the sample mean converge slowly; keep p away from d
    w = C.wiener_constant(Domain.ball(d), p)
    assert wiener_monte_carlo(Domain.ball(d), p, pairs=1_000_000, seed=1) == pytest.approx(w, rel=1e-2)


def test_wiener_ball_at_newtonian_exponent():
    # p = d - 2: the boundary measure has energy 1 for every d
    for d in (3, 4, 5, 6):
        assert C.wiener_constant(Domain.ball(d), d - 2.0) == pytest.approx(1.0, rel=1e-14)


def test_packing_net_check():
    out = packing_net_check(16, 4.0)
    assert out["delta"] == 1.0
    assert out["size"] <= 16
    assert out["inner_min"] >= out["threshold"]


def test_cap_bound_check():
    assert cap_bound_check() <= 1e-15
