import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszpol.domains import Configuration, Domain, grid, roots_of_unity, sample_uniform
from rieszpol.polarization import (
    MaxMinResult,
    NonConvergenceError,
    PolarizationResult,
    SolverOptions,
    discrete_optimum,
    discrete_polarization,
    equally_spaced_value,
    inner_min,
    local_min,
    maximize_polarization,
    shifted_optimal_angles,
)
from rieszpol.potentials import circle_A, riesz_potential


def rotation_gap(angles, n):
    """Largest angular deviation of sorted angles from the best-fitting rotation of the roots."""
    a = np.sort(np.mod(angles, 2 * np.pi))
    base = 2 * np.pi * np.arange(n) / n
    shift = np.angle(np.mean(np.exp(1j * (a - base))))
    dev = np.mod(a - base - shift + np.pi, 2 * np.pi) - np.pi
    return float(np.max(np.abs(dev)))


@pytest.mark.parametrize(
    "n, p, expected",
    [(6, 2, 9.0), (3, 4, 2.0625), (2, 3, 2 ** -0.5), (1, 2, 0.25), (4, 4, 6.0)],
)
def test_equally_spaced_examples(n, p, expected):
    assert equally_spaced_value(n, p) == pytest.approx(expected, rel=1e-14)


def test_equally_spaced_p2_identity():
    for n in list(range(1, 200)) + [1000, 4321, 10_000]:
        assert equally_spaced_value(n, 2) == pytest.approx(n * n / 4, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=300), st.floats(min_value=0.1, max_value=8.0))
def test_equally_spaced_matches_potential_at_midpoint(n, p):
    a = 2 * np.pi * np.arange(n) / n
    assert equally_spaced_value(n, p) == pytest.approx(circle_A(a, p, math.pi / n), rel=1e-11)


@pytest.mark.parametrize("n, p", [(0, 1.0), (3, 0.0), (3, -1.0)])
def test_equally_spaced_rejects(n, p):
    with pytest.raises(ValueError):
        equally_spaced_value(n, p)


def test_inner_min_examples():
    r = inner_min(roots_of_unity(4), 2.0)
    assert r.value == pytest.approx(4.0, rel=1e-9)
    ang = math.atan2(r.argmin[1], r.argmin[0])
    k = (ang - math.pi / 4) / (math.pi / 2)
    assert abs(k - round(k)) < 1e-5

    poles = Configuration(Domain.sphere(2), [[0, 0, 1.0], [0, 0, -1.0]])
    r = inner_min(poles, 2.0)
    assert r.value == pytest.approx(1.0, rel=1e-9)
    assert abs(r.argmin[2]) < 1e-4

    origin = Configuration(Domain.ball(3), np.zeros((5, 3)))
    r = inner_min(origin, 1.0)
    assert r.value == pytest.approx(5.0, rel=1e-9)
    assert np.linalg.norm(r.argmin) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "domain, n, p",
    [
        (Domain.circle(), 5, 1.0),
        (Domain.circle(), 7, 3.0),
        (Domain.segment(), 4, 2.0),
        (Domain.sphere(2), 6, 1.0),
        (Domain.sphere(2), 5, 3.0),
        (Domain.sphere(3), 4, 2.0),
        (Domain.ball(2), 4, 3.0),
        (Domain.ball(3), 5, 0.5),
        (Domain.ball(3), 4, 2.0),
    ],
    ids=str,
)
def test_inner_min_is_min_and_certified(domain, n, p):
    cfg = sample_uniform(domain, n, seed=n)
    r = inner_min(cfg, p, tol=1e-8)
    assert isinstance(r, PolarizationResult)
    assert riesz_potential(cfg, p, r.argmin) == pytest.approx(r.value, rel=1e-12)
    assert r.lower_bound <= r.value
    assert r.value - r.lower_bound <= 1e-8 * r.value * (1 + 1e-12)
    probe = np.vstack([sample_uniform(domain, 100, seed=99).points, grid(domain, 500)])
    from rieszpol.potentials import potential

    assert r.value <= np.min(potential(probe, cfg.points, p)) * (1 + 1e-12)


def test_inner_min_circle_matches_dense_scan():
    rng = np.random.default_rng(3)
    t = np.linspace(0, 2 * np.pi, 400_000, endpoint=False)
    for _ in range(10):
        a = rng.uniform(0, 2 * np.pi, 5)
        r = inner_min(Configuration.from_angles(a), 2.0, tol=1e-10)
        assert r.value <= np.min(circle_A(a, 2.0, t)) + 1e-12
        assert r.value >= np.min(circle_A(a, 2.0, t)) * (1 - 1e-6)


def test_inner_min_repeated_points():
    cfg = Configuration(Domain.sphere(2), [[0, 0, 1.0]] * 3)
    r = inner_min(cfg, 1.0)
    assert r.value == pytest.approx(1.5, rel=1e-9)


def test_inner_min_budget_error():
    cfg = sample_uniform(Domain.sphere(2), 6, seed=0)
    with pytest.raises(NonConvergenceError):
        inner_min(cfg, 2.0, tol=1e-14, max_levels=3)


def test_inner_min_json():
    r = inner_min(roots_of_unity(3), 1.0)
    js = r.to_json()
    assert set(["value", "argmin", "mesh_size", "refinement_steps", "tolerance"]) <= set(js)


@pytest.mark.parametrize("d", [3, 4])
def test_ball_low_p_inner_min_at_most_n(d):
    # U is superharmonic for p <= d - 2, so its min over the ball is at most n
    p = d - 2.0
    for seed in range(20):
        n = 1 + seed % 7
        cfg = sample_uniform(Domain.ball(d), n, seed=seed)
        assert inner_min(cfg, p, tol=1e-9).value <= n * (1 + 1e-9)


def test_local_min_descends():
    cfg = sample_uniform(Domain.sphere(2), 5, seed=1)
    y0 = sample_uniform(Domain.sphere(2), 1, seed=2).points[0]
    y, v = local_min(Domain.sphere(2), cfg.points, 2.0, y0)
    assert v <= riesz_potential(cfg, 2.0, y0)
    assert abs(np.linalg.norm(y) - 1) < 1e-12


@pytest.mark.parametrize("n, p", [(5, 2.0), (4, 4.0), (3, 1.0)])
def test_maximize_circle(n, p):
    res = maximize_polarization(Domain.circle(), n, p, SolverOptions(restarts=4, seed=1))
    assert isinstance(res, MaxMinResult)
    assert res.value == pytest.approx(equally_spaced_value(n, p), rel=1e-6)
    assert rotation_gap(res.config.angles(), n) < 1e-4


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.0, 4.0])
def test_maximize_circle_never_beats_optimum(p):
    res = maximize_polarization(Domain.circle(), 6, p, SolverOptions(restarts=3, seed=2, structured_start=False))
    assert res.value <= equally_spaced_value(6, p) * (1 + 1e-9)


def test_maximize_value_is_inner_min_of_config():
    res = maximize_polarization(Domain.sphere(2), 4, 2.0, SolverOptions(restarts=3, seed=0))
    assert inner_min(res.config, 2.0).value == pytest.approx(res.value, rel=1e-8)
    assert res.value == pytest.approx(2.5, rel=1e-6)


@pytest.mark.slow
def test_maximize_ball_constant():
    res = maximize_polarization(Domain.ball(3), 4, 1.0, SolverOptions(restarts=3, seed=0, inner_tol=1e-7))
    assert res.value == pytest.approx(4.0, abs=1e-3)


def test_maximize_deterministic():
    o = SolverOptions(restarts=3, seed=5)
    a = maximize_polarization(Domain.circle(), 4, 2.0, o)
    b = maximize_polarization(Domain.circle(), 4, 2.0, o)
    np.testing.assert_array_equal(a.config.points, b.config.points)
    assert a.value == b.value


def test_maximize_single_point():
    res = maximize_polarization(Domain.circle(), 1, 2.0, SolverOptions(restarts=2))
    assert res.value == pytest.approx(0.25, rel=1e-9)


def test_maximize_monotone_in_n():
    o = SolverOptions(restarts=3, seed=0)
    vals = [maximize_polarization(Domain.segment(), n, 2.0, o).value for n in range(1, 5)]
    assert all(a <= b * (1 + 1e-9) for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_discrete_optimum_attained(n, p):
    assert discrete_polarization(shifted_optimal_angles(n), n, p) == pytest.approx(discrete_optimum(n, p), rel=1e-14)


def test_discrete_examples():
    assert discrete_polarization([math.pi / 2], 1, 2.0) == pytest.approx(0.5, rel=1e-15)
    # t_1 = pi/2 maximizes over a fine grid for n = 1
    ts = np.linspace(0, 2 * np.pi, 10_001)
    best = max(discrete_polarization([t], 1, 2.0) for t in ts)
    assert best == pytest.approx(0.5, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=0, max_value=2 * math.pi), min_size=1, max_size=9), st.sampled_from([1.0, 2.0, 4.0]))
def test_discrete_bounded_by_optimum(angles, p):
    n = len(angles)
    assert discrete_polarization(angles, n, p) <= discrete_optimum(n, p) + 1e-12


def test_discrete_rejects_length():
    with pytest.raises(ValueError):
        discrete_polarization([0.0, 1.0], 3, 2.0)


def test_discrete_coincidence_infinite():
    assert discrete_polarization([0.0], 1, 1.0) <= 1.0
    assert discrete_polarization([0.0, math.pi], 2, 1.0) < math.inf
