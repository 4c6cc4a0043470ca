"""Driving function tests: values, gradients, Hessians, axiom audits.

Closed forms are checked against finite differences and against frozen
hand-computed values; the axiom auditor must accept the shipped update
rules and reject the degenerate and the non-smooth ones.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpzlab.assumptions import check_assumptions
from kpzlab.driving import (CallableDriving, DrivingFunction,
                            EdwardsWilkinsonDriving, GeneralizedKpzDriving,
                            PolymerDriving, Stencil, gkpz_monotone_threshold,
                            make_driving, psi_example, psi_example_prime,
                            stencil_offsets, stencil_size)

ALL_BUILTINS = [make_driving(n, d) for n in ("polymer", "gkpz", "ew")
                for d in (1, 2)]


def test_stencil_offsets_order():
    assert stencil_offsets(1) == [(0,), (1,), (-1,)]
    assert stencil_offsets(2) == [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
    assert stencil_size(3) == 7


def test_stencil_validation_and_props():
    s = Stencil(1, [1.0, 2.0, 3.0])
    assert s.center == 1.0
    assert s.mean == 2.0
    with pytest.raises(ValueError):
        Stencil(2, [1.0, 2.0, 3.0])
    flat = Stencil.constant(2, 0.5)
    assert flat.values.shape == (5,)


# ---------------------------------------------------------------------------
# values


def test_polymer_zero_at_origin():
    assert PolymerDriving(1).value((0.0, 0.0, 0.0)) == 0.0
    assert PolymerDriving(2).value(np.zeros(5)) == 0.0


def test_polymer_worked_value():
    # log((1 + e^0.2 + e^0.1)/3), frozen
    v = PolymerDriving(1).value((0.0, 0.2, 0.1))
    assert v == pytest.approx(0.10333055956113443, abs=1e-14)


def test_polymer_overflow_safe():
    # max-shifted evaluation keeps huge stencils finite
    v = PolymerDriving(1).value((1000.0, 999.0, 998.0))
    assert np.isfinite(v)
    assert v == pytest.approx(1000.0 + math.log((1 + math.e**-1 + math.e**-2) / 3),
                              abs=1e-10)


def test_ew_is_plain_mean():
    assert EdwardsWilkinsonDriving(1).value((3.0, 6.0, 0.0)) == 3.0


def test_gkpz_value_formula():
    phi = GeneralizedKpzDriving(1, coupling=0.05)
    u = np.array([0.0, 0.4, -0.2])
    ubar = u.mean()
    expect = ubar + 0.05 * sum(psi_example(x - ubar) for x in u)
    assert phi.value(u) == pytest.approx(expect, abs=1e-15)


def test_gkpz_default_coupling():
    assert GeneralizedKpzDriving(1).coupling == pytest.approx(1 / 16)
    assert GeneralizedKpzDriving(2).coupling == pytest.approx(1 / 32)
    with pytest.raises(ValueError):
        GeneralizedKpzDriving(1, coupling=0.0)


@pytest.mark.parametrize("phi", ALL_BUILTINS, ids=lambda p: f"{p.name}-d{p.d}")
@pytest.mark.parametrize("c", [-5.0, 0.7, 40.0])
def test_shift_equivariance(phi, c):
    rng = np.random.default_rng(12)
    u = rng.uniform(-2, 2, size=phi.n)
    assert phi.value(u + c) == pytest.approx(phi.value(u) + c, abs=1e-10)


@pytest.mark.parametrize("phi", ALL_BUILTINS, ids=lambda p: f"{p.name}-d{p.d}")
def test_permutation_symmetry(phi):
    rng = np.random.default_rng(3)
    u = rng.uniform(-2, 2, size=phi.n)
    for _ in range(5):
        p = rng.permutation(phi.n)
        assert phi.value(u[p]) == pytest.approx(phi.value(u), abs=1e-12)


@given(u=st.lists(st.floats(-10, 10), min_size=3, max_size=3),
       c=st.floats(-20, 20))
@settings(max_examples=150, deadline=None)
def test_polymer_equivariance_property(u, c):
    phi = PolymerDriving(1)
    u = np.array(u)
    assert phi.value(u + c) == pytest.approx(phi.value(u) + c, abs=1e-9)


@given(u=st.lists(st.floats(-10, 10), min_size=5, max_size=5),
       c=st.floats(-20, 20))
@settings(max_examples=150, deadline=None)
def test_gkpz_equivariance_property(u, c):
    phi = GeneralizedKpzDriving(2)
    u = np.array(u)
    assert phi.value(u + c) == pytest.approx(phi.value(u) + c, abs=1e-9)


# ---------------------------------------------------------------------------
# gradients


def test_polymer_gradient_at_origin():
    g = PolymerDriving(1).gradient(np.zeros(3))
    assert np.allclose(g, 1 / 3, atol=1e-15)


@pytest.mark.parametrize("phi", ALL_BUILTINS, ids=lambda p: f"{p.name}-d{p.d}")
def test_gradients_are_stochastic_vectors(phi):
    rng = np.random.default_rng(7)
    U = rng.uniform(-0.5, 0.5, size=(phi.n, 64))
    G = phi.gradient_many(U)
    assert G.min() >= -1e-12
    assert np.abs(G.sum(axis=0) - 1.0).max() <= 1e-12


def test_gkpz_gradient_matches_fd():
    phi = GeneralizedKpzDriving(1, coupling=0.03)
    rng = np.random.default_rng(8)
    # stay away from the psi kink at |u_a - mean| = 1
    U = rng.uniform(-0.3, 0.3, size=(3, 32))
    G = phi.gradient_many(U)
    G_fd = DrivingFunction.gradient_many(phi, U)
    assert np.abs(G - G_fd).max() < 1e-6


def test_polymer_gradient_matches_fd():
    phi = PolymerDriving(2)
    rng = np.random.default_rng(9)
    U = rng.uniform(-1, 1, size=(5, 16))
    assert np.abs(phi.gradient_many(U)
                  - DrivingFunction.gradient_many(phi, U)).max() < 1e-6


# ---------------------------------------------------------------------------
# Hessians at the flat stencil


def test_polymer_hessian_d1_closed_form():
    h = PolymerDriving(1).hessian_origin()
    assert h.q == pytest.approx(2 / 9, abs=1e-15)
    assert h.r == pytest.approx(-1 / 9, abs=1e-15)
    assert h.q_minus_r == pytest.approx(1 / 3, abs=1e-15)


def test_gkpz_hessian_closed_form():
    for d in (1, 2):
        c = 1.0 / (16 * d)
        h = GeneralizedKpzDriving(d).hessian_origin()
        n = 2 * d + 1
        assert h.q == pytest.approx(2 * c * (n - 1) / n, abs=1e-15)
        assert h.r == pytest.approx(-2 * c / n, abs=1e-15)
        assert h.q_minus_r == pytest.approx(2 * c, abs=1e-15)


@pytest.mark.parametrize("phi", ALL_BUILTINS, ids=lambda p: f"{p.name}-d{p.d}")
def test_hessian_row_sums_vanish(phi):
    # consequence of shift equivariance: q + 2d r = 0
    h = phi.hessian_origin()
    assert abs(h.q + 2 * phi.d * h.r) <= 1e-10


@pytest.mark.parametrize("name", ["polymer", "gkpz"])
@pytest.mark.parametrize("d", [1, 2])
def test_hessian_fd_matches_analytic(name, d):
    phi = make_driving(name, d)
    H = phi.hessian_matrix_fd()
    h = phi.hessian_origin()
    n = phi.n
    expect = np.full((n, n), h.r) + np.eye(n) * (h.q - h.r)
    assert np.abs(H - expect).max() <= 1e-5


def test_ew_hessian_degenerate():
    h = EdwardsWilkinsonDriving(1).hessian_origin()
    assert h.q == 0.0 and h.r == 0.0


# ---------------------------------------------------------------------------
# psi and the monotonicity threshold


def test_psi_example_values():
    assert psi_example(0.5) == 0.25
    assert psi_example(-1.0) == 1.0
    assert psi_example(2.0) == 3.0
    assert psi_example_prime(0.25) == 0.5
    assert psi_example_prime(-3.0) == -2.0
    arr = psi_example(np.array([-2.0, 0.0, 0.5]))
    assert np.allclose(arr, [3.0, 0.0, 0.25])


def test_monotone_threshold():
    assert gkpz_monotone_threshold(1) == pytest.approx(1 / 8)
    assert gkpz_monotone_threshold(2) == pytest.approx(1 / 16)
    # default coupling sits strictly inside the monotone region
    assert GeneralizedKpzDriving(1).coupling < gkpz_monotone_threshold(1)


def test_make_driving_rejects_unknown():
    with pytest.raises(ValueError):
        make_driving("ballistic", 1)


# ---------------------------------------------------------------------------
# axiom audit


def test_audit_accepts_polymer():
    rep = check_assumptions(PolymerDriving(1), samples=20_000)
    assert rep.passed
    assert rep.witness_constant >= 0.9 * (1 / 3) / 4
    assert rep.quadratic_radius > 0
    assert np.isfinite(rep.witness_threshold)
    d = rep.as_dict()
    assert d["passed"] and d["witness"]["constant_c"] == rep.witness_constant


def test_audit_accepts_gkpz_at_threshold():
    phi = GeneralizedKpzDriving(1, coupling=gkpz_monotone_threshold(1))
    rep = check_assumptions(phi, samples=20_000)
    assert rep.check("monotonicity").passed
    assert rep.passed


def test_audit_rejects_plain_mean():
    rep = check_assumptions(EdwardsWilkinsonDriving(1), samples=20_000)
    assert not rep.passed
    assert not rep.check("nondegenerate_hessian").passed
    assert not rep.check("strict_domination").passed
    for name in ("shift_additivity", "zero_at_origin", "permutation_symmetry",
                 "monotonicity", "mean_domination"):
        assert rep.check(name).passed


def test_audit_flags_non_c2_update():
    # mean plus |.|^1.5 spread penalty: equivariant and symmetric but the
    # second derivative blows up at the origin
    def rough(u):
        ub = u.mean()
        return float(ub + 0.1 * (np.abs(u - ub) ** 1.5).sum())

    rep = check_assumptions(CallableDriving(1, rough, name="rough"),
                            samples=2_000)
    assert not rep.passed
    assert not rep.check("c2_near_origin").passed
    assert rep.check("shift_additivity").passed


def test_callable_wrapper_fd_fallbacks():
    inner = PolymerDriving(1)
    phi = CallableDriving(1, lambda u: float(inner.value(u)), name="wrapped")
    rng = np.random.default_rng(5)
    u = rng.uniform(-1, 1, size=3)
    assert phi.value(u) == pytest.approx(inner.value(u), abs=1e-14)
    assert np.abs(phi.gradient(u) - inner.gradient(u)).max() < 1e-6
    h_fd = phi.hessian_origin()
    h = inner.hessian_origin()
    assert h_fd.q == pytest.approx(h.q, abs=1e-5)
    assert h_fd.r == pytest.approx(h.r, abs=1e-5)
