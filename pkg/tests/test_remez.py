import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractal_remez import fractals
from fractal_remez.fractals import FractalSet, build_preset, transform
from fractal_remez.geometry import Ball, Cube
from fractal_remez.polynomials import Polynomial, chebyshev
from fractal_remez.remez import (bg_bound, bmo_oscillation, empirical_remez,
                                 markov_check, reverse_holder, simple_bound,
                                 sup_norm)

INF = math.inf


# -- bounds -------------------------------------------------------------------


def test_bg_bound_k0():
    for n in (1, 2, 3):
        for lam in (0.1, 0.5, 1.0):
            assert bg_bound(n, 0, lam) == 1.0


def test_bg_bound_example():
    # beta = 1/2, (1+beta)/(1-beta) = 3, T_1(3) = 3
    assert bg_bound(1, 1, 0.5) == pytest.approx(3.0, rel=1e-12)


def test_bg_bound_full_measure():
    for k in (1, 4, 8):
        assert bg_bound(1, k, 1.0) == 1.0


def test_bg_bound_rejects_bad_lambda():
    with pytest.raises(ValueError):
        bg_bound(1, 2, 0.0)
    with pytest.raises(ValueError):
        bg_bound(1, 2, -0.1)


def test_simple_bound_examples():
    assert simple_bound(1, 0, 0.3) == 1.0
    assert simple_bound(2, 3, 0.5) == pytest.approx(4096.0)
    assert simple_bound(1, 5, 1.0) == pytest.approx(4.0 ** 5)


@given(st.integers(1, 3), st.integers(1, 8), st.floats(0.01, 1.0))
@settings(max_examples=200)
def test_bg_below_simple(n, k, lam):
    assert bg_bound(n, k, lam) <= simple_bound(n, k, lam) * (1 + 1e-12)


def test_bg_monotone_in_lambda_and_k():
    lams = np.linspace(0.05, 1.0, 40)
    for n in (1, 2):
        for k in (1, 3, 6):
            vals = [bg_bound(n, k, la) for la in lams]
            assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        for lam in (0.2, 0.7):
            by_k = [bg_bound(n, k, lam) for k in range(0, 9)]
            assert all(b >= a - 1e-12 for a, b in zip(by_k, by_k[1:]))


# -- sup norms ----------------------------------------------------------------


def test_sup_norm_constant():
    c = Polynomial.constant(-3.5, 2)
    assert sup_norm(c, Ball((0.0, 0.0), 1.0)) == pytest.approx(3.5, abs=1e-12)
    X = build_preset("cantor:1/3", 5)
    assert sup_norm(Polynomial.constant(2.0, 1), X) == 2.0


def test_sup_norm_chebyshev_equioscillation():
    val = sup_norm(chebyshev(4), Ball((0.0,), 1.0))
    assert val == pytest.approx(1.0, abs=1e-6)


def test_sup_norm_radial_on_ball():
    p = Polynomial.from_dict(2, {(2, 0): 1.0, (0, 2): 1.0})
    assert sup_norm(p, Ball((0.0, 0.0), 1.0)) == pytest.approx(1.0, abs=1e-6)


def test_sup_norm_monotone_in_budget():
    p = Polynomial.random(np.random.default_rng(0), 2, 5)
    dom = Ball((0.2, -0.1), 1.3)
    vals = [sup_norm(p, dom, budget=2 ** b) for b in (7, 9, 11, 13)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_sup_norm_on_cube_domain():
    p = chebyshev(3)
    assert sup_norm(p, Cube((0.5,), 0.5)) == pytest.approx(1.0, abs=1e-9)


# -- empirical comparison -----------------------------------------------------


def test_empirical_constant_polynomial():
    X = build_preset("cantor:1/3", 6)
    V = Ball((0.5,), 0.5)
    one = Polynomial.constant(1.0, 1)
    for q in (1, 2, INF):
        for r in (1, 2, INF):
            rep = empirical_remez(one, V, X, q, r)
            assert rep.empirical_ratio == pytest.approx(1.0, rel=1e-9)


def test_empirical_extremal_matches_sharp_bound():
    eps = 0.25
    base = build_preset("cube:1", 11)
    omega = transform(base, 2.0 - eps, [-1.0])
    p = chebyshev(4).compose_affine(2.0 / (2.0 - eps), eps / (2.0 - eps))
    rep = empirical_remez(p, Ball((0.0,), 1.0), omega, INF, INF)
    assert rep.bound_bg == pytest.approx(bg_bound(1, 4, (2 - eps) / 2),
                                         rel=1e-12)
    assert rep.empirical_ratio == pytest.approx(rep.bound_bg, rel=0.01)


def test_empirical_scale_invariance():
    X = build_preset("cantor:1/3", 7)
    V = Ball((0.5,), 0.6)
    p = Polynomial.random(np.random.default_rng(1), 1, 3)
    r1 = empirical_remez(p, V, X, INF, INF).empirical_ratio
    r2 = empirical_remez(17.0 * p, V, X, INF, INF).empirical_ratio
    assert r2 == pytest.approx(r1, rel=1e-9)


def test_empirical_translation_dilation_invariance():
    X = build_preset("cantor:1/3", 7)
    V = Ball((0.5,), 0.6)
    p = Polynomial.random(np.random.default_rng(2), 1, 3)
    sigma, t = 2.5, -1.75
    Xs = transform(X, sigma, [t])
    Vs = Ball((sigma * 0.5 + t,), sigma * 0.6)
    ps = p.compose_affine(1.0 / sigma, -t / sigma)
    r1 = empirical_remez(p, V, X, INF, INF)
    r2 = empirical_remez(ps, Vs, Xs, INF, INF)
    assert r2.empirical_ratio == pytest.approx(r1.empirical_ratio, rel=1e-9)
    assert r2.lam == pytest.approx(r1.lam, rel=1e-9)


def test_empirical_flags_vanishing_polynomial():
    pts = np.array([[0.0], [1.0]])
    X = FractalSet(points=pts, masses=np.ones(2) / 2, s=1.0, diam=1.0,
                   cell_diam=0.1, total_mass=1.0)
    p = Polynomial.from_dict(1, {(1,): 1.0, (2,): -1.0})  # x(1 - x)
    rep = empirical_remez(p, Ball((0.5,), 0.6), X, INF, INF)
    assert rep.hypothesis_violated
    assert rep.empirical_ratio == math.inf


def test_empirical_requires_containment():
    X = build_preset("cantor:1/3", 5)
    with pytest.raises(ValueError):
        empirical_remez(Polynomial.constant(1.0, 1), Ball((0.0,), 0.25), X,
                        INF, INF)


def test_empirical_full_measure_respects_power_bound():
    # the Lebesgue case s = n: measured sup ratios never exceed (4n/lam)^k
    omega = build_preset("cube:1", 10)  # [0, 1] with H_1 mass = length
    V = Ball((0.0,), 1.5)  # lam = 1 / 3
    rng = np.random.default_rng(5)
    for _ in range(50):
        p = Polynomial.random(rng, 1, 3)
        rep = empirical_remez(p, V, omega, INF, INF)
        assert rep.lam == pytest.approx(1.0 / 3.0, rel=1e-12)
        assert rep.empirical_ratio <= rep.bound_simple * (1 + 1e-9)
        assert rep.empirical_ratio <= rep.bound_bg * (1 + 1e-6)


def test_empirical_integral_exponents_run():
    X = build_preset("cantor:1/3", 6)
    V = Ball((0.5,), 0.5)
    p = Polynomial.random(np.random.default_rng(3), 1, 2)
    for q, r in ((1, 2), (2, 2), (2, INF)):
        rep = empirical_remez(p, V, X, q, r)
        assert rep.empirical_ratio > 0.0
        assert rep.bound_bg is None or (q is INF and r is INF)


# -- gradient ratio -----------------------------------------------------------


def test_markov_constant_polynomial():
    X = build_preset("cube:1", 8)
    assert markov_check(Polynomial.constant(5.0, 1), X, [0.5], 0.25) == 0.0


def test_markov_identity_function():
    # cloud representatives stop at 1 - 2^-depth, so allow that gap
    X = build_preset("cube:1", 10)
    p = Polynomial.variable(0, 1)
    c = markov_check(p, X, [0.0], 1.0)
    assert c == pytest.approx(1.0, rel=2.0 ** -10 * 1.5)


def test_markov_chebyshev_classical_constant():
    # on [-1, 1] with the ball of radius 1 at 0: c <= 2 k^2 + tolerance
    X = transform(build_preset("cube:1", 11), 2.0, [-1.0])
    for k in (2, 3, 5):
        c = markov_check(chebyshev(k), X, [0.0], 1.0)
        assert c <= 2 * k ** 2 + 0.1
        assert c == pytest.approx(k ** 2, rel=0.05)


def test_markov_zero_division():
    pts = np.array([[0.0], [1.0]])
    X = FractalSet(points=pts, masses=np.ones(2) / 2, s=1.0, diam=1.0,
                   cell_diam=0.1, total_mass=1.0)
    p = Polynomial.from_dict(1, {(1,): 1.0, (2,): -1.0})
    with pytest.raises(ZeroDivisionError):
        markov_check(p, X, [0.0], 1.0)


def test_markov_empty_ball():
    X = build_preset("cantor:1/3", 5)
    with pytest.raises(ValueError):
        markov_check(Polynomial.variable(0, 1), X, [0.5], 2.0)


# -- BMO and reverse Holder ---------------------------------------------------


def test_bmo_constant_polynomial_zero():
    X = build_preset("cantor:1/3", 7)
    p = Polynomial.constant(3.0 + 0.0j, 1)
    rep = bmo_oscillation(p, X, [0.5, 1.0], num_centers=8)
    assert rep.max_oscillation == pytest.approx(0.0, abs=1e-12)


def test_bmo_scaling_invariance():
    X = build_preset("cantor:1/3", 7)
    z = Polynomial(1, 1, np.array([0.0 + 0j, 1.0 + 0j]))
    centers = X.points[:16]
    r1 = bmo_oscillation(z, X, [0.3, 1.0], centers=centers)
    r2 = bmo_oscillation(2.0 * z, X, [0.3, 1.0], centers=centers)
    assert r2.max_oscillation == pytest.approx(r1.max_oscillation, abs=1e-12)


def test_bmo_excluded_mass_reported():
    X = build_preset("cantor:1/3", 6)
    z = Polynomial(1, 1, np.array([0.0 + 0j, 1.0 + 0j]))
    rep = bmo_oscillation(z, X, [1.5], centers=X.points[:4])
    # the origin is a cloud point where ln|z| = -inf
    assert rep.max_excluded_mass == pytest.approx(X.masses[0], abs=1e-15)


def test_bmo_all_mass_excluded_raises():
    X = build_preset("cantor:1/3", 5)
    zero = Polynomial.constant(0.0 + 0.0j, 1)
    with pytest.raises(ValueError):
        bmo_oscillation(zero, X, [1.0], centers=X.points[:4])


def test_reverse_holder_constant():
    X = build_preset("cantor:1/3", 6)
    c = Polynomial.constant(2.0, 1)
    for l in (2, 4, INF):
        assert reverse_holder(c, X, [0.0], 2.0, l) == pytest.approx(1.0,
                                                                    rel=1e-12)


def test_reverse_holder_identity_on_whole_set():
    z = Polynomial(1, 1, np.array([0.0 + 0j, 1.0 + 0j]))
    vals = {}
    for depth in (8, 10):
        X = build_preset("cantor:1/3", depth)
        vals[depth] = reverse_holder(z, X, [0.0], 2.0, 2)
        assert vals[depth] < 10.0
    assert max(vals.values()) / min(vals.values()) < 2.0


def test_reverse_holder_at_least_one():
    X = build_preset("cantor:1/3", 7)
    rng = np.random.default_rng(4)
    for _ in range(10):
        p = Polynomial.random(rng, 1, 3)
        val = reverse_holder(p, X, [0.5], 0.75, 2)
        assert val >= 1.0 - 1e-12


def test_reverse_holder_exponent_validation():
    X = build_preset("cantor:1/3", 5)
    with pytest.raises(ValueError):
        reverse_holder(Polynomial.constant(1.0, 1), X, [0.0], 1.0, 3)
