import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszpol.domains import Configuration, Domain, roots_of_unity, sample_uniform
from rieszpol.potentials import (
    ProximityError,
    circle_A,
    circle_A_recurrence_check,
    circle_A_recurrence_rhs,
    circle_A_second_derivative,
    log_abs_q,
    log_derivative_functional,
    log_q_derivatives,
    polarization_at_product_max,
    potential_grad,
    potential_hessian,
    product_max_point,
    riesz_potential,
)

angle_lists = st.lists(st.floats(min_value=0.0, max_value=2 * math.pi), min_size=1, max_size=12)


def far_point(angles, rng, margin=0.05):
    """A random t at least `margin` away from every angle."""
    a = np.asarray(angles)
    while True:
        t = rng.uniform(0, 2 * math.pi)
        if np.min(np.abs(np.mod(t - a + math.pi, 2 * math.pi) - math.pi)) > margin:
            return t


def test_riesz_potential_examples():
    c = Configuration.from_angles([0.0, math.pi])
    assert riesz_potential(c, 4.0, [0.0, 1.0]) == pytest.approx(0.5, rel=1e-15)
    origin = Configuration(Domain.ball(3), np.zeros((5, 3)))
    assert riesz_potential(origin, 2.7, [0.0, 0.6, 0.8]) == pytest.approx(5.0, rel=1e-15)
    c = sample_uniform(Domain.sphere(2), 4, seed=0)
    assert riesz_potential(c, 1.0, c.points[0]) == math.inf


def test_circle_A_examples():
    for n in [1, 2, 5, 17]:
        a = 2 * np.pi * np.arange(n) / n
        assert circle_A(a, 2.0, math.pi / n) == pytest.approx(n * n / 4, rel=1e-13)
    assert circle_A([0.0], 1.0, math.pi) == pytest.approx(0.5, rel=1e-15)
    assert circle_A([0.3], 1.0, 0.3) == math.inf


def test_circle_A_vectorized():
    a = [0.1, 2.0, 4.0]
    ts = np.linspace(0.5, 1.5, 7)
    np.testing.assert_allclose(circle_A(a, 2.5, ts), [circle_A(a, 2.5, t) for t in ts], rtol=1e-15)


def test_circle_A_matches_ambient_form():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(1, 15))
        a = rng.uniform(0, 2 * math.pi, n)
        p = float(rng.uniform(0.1, 6.0))
        t = far_point(a, rng, 1e-2)
        amb = riesz_potential(Configuration.from_angles(a), p, [math.cos(t), math.sin(t)])
        assert circle_A(a, p, t) == pytest.approx(amb, rel=1e-12)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.5])
def test_recurrence_random_configs(p):
    rng = np.random.default_rng(int(10 * p))
    for _ in range(100):
        a = rng.uniform(0, 2 * math.pi, int(rng.integers(1, 12)))
        t = far_point(a, rng)
        assert circle_A_recurrence_check(a, p, t) <= 1e-9


def test_recurrence_examples():
    # single node at 0, t = pi: A_2 = 1/4, A_2'' = 1/8, so (1/8 + 1/4)/6 = 1/16
    assert circle_A([0.0], 4.0, math.pi) == pytest.approx(1 / 16, rel=1e-15)
    assert circle_A_recurrence_rhs([0.0], 2.0, math.pi) == pytest.approx(1 / 16, rel=1e-14)
    a = np.pi / 2 * np.arange(4)
    assert circle_A(a, 4.0, math.pi / 4) == pytest.approx(6.0, rel=1e-14)
    assert circle_A_recurrence_rhs(a, 2.0, math.pi / 4) == pytest.approx(6.0, rel=1e-14)
    assert circle_A_recurrence_check(a + 0.2, 2.0, 0.2 + math.pi / 4) <= 1e-12


def test_recurrence_literal_coefficient_disagrees():
    # the p^2 A_p variant of the recurrence gives 3/16 instead of 1/16 at a single node
    lit = (circle_A_second_derivative([0.0], 2.0, math.pi) + 4 * circle_A([0.0], 2.0, math.pi)) / 6
    assert lit == pytest.approx(3 / 16, rel=1e-14)
    assert abs(lit - circle_A([0.0], 4.0, math.pi)) > 0.1


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 3.5])
def test_second_derivative_finite_difference(p):
    rng = np.random.default_rng(1)
    h = 1e-4
    for _ in range(30):
        a = rng.uniform(0, 2 * math.pi, 5)
        t = far_point(a, rng, 0.2)
        fd = (circle_A(a, p, t + h) - 2 * circle_A(a, p, t) + circle_A(a, p, t - h)) / h**2
        assert fd == pytest.approx(circle_A_second_derivative(a, p, t), rel=1e-5)


def test_proximity_guard():
    with pytest.raises(ProximityError):
        circle_A_second_derivative([0.0, 1.0], 2.0, 1.0 + 1e-4)
    with pytest.raises(ProximityError):
        log_derivative_functional([0.0], 2, 2 * math.pi - 1e-5)


@settings(max_examples=100, deadline=None)
@given(angle_lists, st.floats(min_value=0.0, max_value=2 * math.pi))
def test_log_functional_m2_is_A2(angles, t):
    a = np.asarray(angles)
    if np.min(np.abs(np.mod(t - a + math.pi, 2 * math.pi) - math.pi)) < 1e-2:
        return
    assert log_derivative_functional(a, 2, t) == pytest.approx(circle_A(a, 2.0, t), rel=1e-12)


def test_log_functional_m4_identity():
    # the corrected recurrence gives -(log|Q|)'''' = 6 A_4 - A_2
    rng = np.random.default_rng(4)
    for _ in range(100):
        a = rng.uniform(0, 2 * math.pi, int(rng.integers(1, 10)))
        t = far_point(a, rng)
        expected = 6 * circle_A(a, 4.0, t) - circle_A(a, 2.0, t)
        assert log_derivative_functional(a, 4, t) == pytest.approx(expected, rel=1e-9)


@pytest.mark.xfail(strict=True, reason="literal 6A_4 - 4A_2 inherits the recurrence coefficient typo")
def test_log_functional_m4_literal_form():
    a = [0.0]
    t = math.pi
    assert log_derivative_functional(a, 4, t) == pytest.approx(
        6 * circle_A(a, 4.0, t) - 4 * circle_A(a, 2.0, t), rel=1e-9
    )


@pytest.mark.parametrize("m", [2, 4, 6])
def test_log_functional_finite_difference(m):
    rng = np.random.default_rng(m)
    a = rng.uniform(0, 2 * math.pi, 4)
    t = far_point(a, rng, 0.3)
    # (m-2)-th central difference of the m = 2 closed form, Richardson-extrapolated
    k = m - 2
    w = [math.comb(k, i) * (-1) ** i for i in range(k + 1)]

    def fd(h):
        return sum(wi * log_derivative_functional(a, 2, t + (k / 2 - i) * h) for i, wi in enumerate(w)) / h**k

    h = 1e-3 if k < 4 else 1e-2
    est = (4 * fd(h) - fd(2 * h)) / 3
    assert est == pytest.approx(log_derivative_functional(a, m, t), rel=1e-5)


@pytest.mark.parametrize("m", [0, 3, 5])
def test_log_functional_rejects_odd(m):
    with pytest.raises(ValueError):
        log_derivative_functional([0.0], m, 1.0)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 20])
def test_log_functional_m2_equally_spaced(n):
    a = 2 * np.pi * np.arange(n) / n
    assert log_derivative_functional(a, 2, math.pi / n) == pytest.approx(n * n / 4, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_product_max_equally_spaced(n):
    a = 2 * np.pi * np.arange(n) / n
    t0 = product_max_point(a)
    # every midpoint is a maximizer
    k = (t0 - math.pi / n) / (2 * math.pi / n)
    assert abs(k - round(k)) < 1e-9
    assert abs(math.sin(n * t0 / 2)) == pytest.approx(1.0, abs=1e-12)


def test_product_max_examples():
    assert product_max_point([0.0]) == pytest.approx(math.pi, abs=1e-12)
    t0 = product_max_point([0.0, math.pi / 2])
    assert t0 == pytest.approx(5 * math.pi / 4, abs=1e-10)
    grid = np.linspace(0, 2 * math.pi, 1_000_000, endpoint=False)
    brute = grid[np.argmax(log_abs_q([0.0, math.pi / 2], grid))]
    assert abs(brute - t0) < 2 * math.pi / 1_000_000


def test_product_max_is_global_critical_point():
    rng = np.random.default_rng(7)
    grid = np.linspace(0, 2 * math.pi, 200_000, endpoint=False)
    for _ in range(50):
        a = rng.uniform(0, 2 * math.pi, int(rng.integers(1, 13)))
        t0 = product_max_point(a)
        d1, d2 = log_q_derivatives(a, t0)
        assert abs(d1) <= 1e-8
        assert d2 <= 0
        assert log_abs_q(a, t0) >= np.max(log_abs_q(a, grid)) - 1e-12


def test_polarization_at_product_max_examples():
    for n in [1, 2, 4, 9]:
        a = 2 * np.pi * np.arange(n) / n + 0.3
        assert polarization_at_product_max(a, 4.0) == pytest.approx(n**4 / 48 + n**2 / 24, rel=1e-12)
    rng = np.random.default_rng(0)
    for _ in range(100):
        assert polarization_at_product_max(rng.uniform(0, 2 * math.pi, 6), 4.0) <= 28.5 + 1e-10
        assert polarization_at_product_max(rng.uniform(0, 2 * math.pi, 5), 2.0) <= 25 / 4 + 1e-10


@pytest.mark.parametrize("p", [0.5, 1.0, 3.0])
def test_potential_grad_finite_difference(p):
    rng = np.random.default_rng(2)
    nodes = rng.standard_normal((6, 3))
    y = rng.standard_normal((4, 3)) * 3
    val, grad = potential_grad(y, nodes, p)
    _, g2, hess = potential_hessian(y, nodes, p)
    np.testing.assert_allclose(grad, g2, rtol=1e-14)
    h = 1e-6
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        v_hi, g_hi = potential_grad(y + e, nodes, p)
        v_lo, g_lo = potential_grad(y - e, nodes, p)
        np.testing.assert_allclose((v_hi - v_lo) / (2 * h), grad[:, j], rtol=1e-6)
        np.testing.assert_allclose((g_hi - g_lo) / (2 * h), hess[:, :, j], rtol=1e-5, atol=1e-9)
