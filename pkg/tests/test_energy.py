import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixspec import build
from mixspec.domain import Box, Interval
from mixspec.energy import (EdgeForm, ExteriorFunction, GridFunction, TailDivergenceError,
                            ZeroFunctionError, convexity_gap, derivative_pairing, el_residual,
                            gradient, hessian, lp_norm_p, nonlocal_tail, quadratic_form_matrix,
                            rayleigh, seminorm_p, signed_energy, simon_gap)
from mixspec.kernel import assemble
from mixspec.measure import SpectralMeasure

from conftest import atoms, box_op, interval_op

MIXED = SpectralMeasure([(1.0, 1.0), (0.5, 0.5)], [(0.2, 0.4, 1.0)], [], [], 0.5)


def test_zero_function_has_zero_energy():
    op = interval_op(MIXED, 3.0)
    assert seminorm_p(op, np.zeros(op.n)) == 0
    assert all(v == 0 for v in signed_energy(op, np.zeros(op.n)).to_dict().values())


def test_mass_only_measure(rng):
    # a pure mass measure fails the structural hypotheses, so skip the check
    op = assemble(build(Interval(0, 1), 0.05), SpectralMeasure([(0.0, 2.5)], [], [], [], 0.1), 1.5,
                  check=False)
    u = rng.standard_normal(op.n)
    assert seminorm_p(op, u) == pytest.approx(2.5 * lp_norm_p(op.domain, u, 1.5), rel=1e-14)
    assert rayleigh(op, u) == pytest.approx(2.5, rel=1e-14)


def test_gradient_energy_example():
    op = assemble(build(Interval(0, 1), 0.25), atoms((1.0, 1.0)), 2.0)
    assert seminorm_p(op, [0.0, 1.0, 0.0]) == pytest.approx(8.0, rel=1e-14)


def test_unsigned_total_has_one_over_p(rng):
    op = interval_op(MIXED, 3.0)
    u = rng.standard_normal(op.n)
    assert signed_energy(op, u).signed_total == pytest.approx(seminorm_p(op, u) / 3.0, rel=1e-14)


def test_signed_total_affine_decreasing_in_w(rng):
    dom = build(Interval(0, 1), 0.05)
    u = rng.standard_normal(dom.n)
    ws = [0.0, 0.5, 1.0, 1.5]
    vals = [signed_energy(assemble(dom, SpectralMeasure([(1.0, 1.0)], [], [(0.2, w)], [], 0.5), 2.0),
                          u).signed_total for w in ws]
    d = np.diff(vals)
    assert np.all(d < 0)
    np.testing.assert_allclose(d, d[0], rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(p=st.sampled_from([1.5, 2.0, 3.0]), seed=st.integers(0, 2 ** 31), w=st.floats(0, 2))
def test_pairing_is_p_times_energy(p, seed, w):
    m = SpectralMeasure([(1.0, 1.0), (0.6, 0.7)], [], [(0.2, w)], [], 0.5)
    op = interval_op(m, p, n=12)
    u = np.random.default_rng(seed).standard_normal(op.n)
    pe = p * signed_energy(op, u).signed_total
    assert derivative_pairing(op, u, u) == pytest.approx(pe, rel=1e-12, abs=1e-12 * abs(pe))
    assert derivative_pairing(op, u, np.zeros(op.n)) == 0


@pytest.mark.parametrize("p", [2.0, 2.5, 3.0, 4.0])
def test_pairing_matches_central_differences(p, rng):
    op = box_op(MIXED, p, h=0.2)
    for _ in range(5):
        u, v = rng.standard_normal((2, op.n))
        e = 1e-5
        fd = (signed_energy(op, u + e * v).signed_total
              - signed_energy(op, u - e * v).signed_total) / (2 * e)
        assert derivative_pairing(op, u, v) == pytest.approx(fd, rel=1e-5)


def test_rayleigh_homogeneous_and_shift(rng):
    m = atoms((0.5, 1.0))
    op = interval_op(m, 3.0)
    op_shift = interval_op(m.with_atom("plus", 0.0, 0.3), 3.0)
    u = rng.standard_normal(op.n)
    assert rayleigh(op, -2.5 * u) == pytest.approx(rayleigh(op, u), rel=1e-14)
    assert rayleigh(op_shift, u) - rayleigh(op, u) == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(ZeroFunctionError):
        rayleigh(op, np.zeros(op.n))


def test_quadratic_form_matrix(rng):
    op = box_op(MIXED, 2.0, h=0.2)
    A = quadratic_form_matrix(op)
    assert np.array_equal(A, A.T)
    u = rng.standard_normal(op.n)
    assert u @ A @ u == pytest.approx(seminorm_p(op, u), rel=1e-12)


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_hessian_matches_finite_differences(p, rng):
    op = interval_op(MIXED, p, n=8)
    u = rng.standard_normal(op.n)
    H = hessian(op, u, eps=0.0)
    H = H.toarray() if hasattr(H, "toarray") else H
    e = 1e-6
    cols = [(gradient(op, u + e * v) - gradient(op, u - e * v)) / (2 * e) for v in np.eye(op.n)]
    np.testing.assert_allclose(H, np.array(cols).T, rtol=1e-6, atol=1e-6 * np.abs(H).max())


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_edge_form_agrees_with_energy(p, rng):
    op = box_op(MIXED, p, h=0.2)
    ef = EdgeForm.from_operator(op, "plus")
    u = rng.standard_normal(op.n)
    assert ef.energy(u) == pytest.approx(seminorm_p(op, u), rel=1e-13)
    np.testing.assert_allclose(ef.gradient(u), gradient(op, u), rtol=1e-12, atol=1e-13)


def test_el_residual_of_dense_eigenvector():
    from mixspec.solver import eig_all_p2
    op = interval_op(atoms((0.5, 1.0)), 2.0)
    lam, v = eig_all_p2(op)[1]
    assert np.max(np.abs(el_residual(op, v, lam))) < 1e-9 * lam


def test_gridfunction_csv(tmp_path):
    d = build(Box(0, 1, 0, 1), 0.25)
    GridFunction(np.arange(9.0), d).to_csv(tmp_path / "u.csv")
    lines = (tmp_path / "u.csv").read_text().splitlines()
    assert lines[0] == "x,y,value" and len(lines) == 10
    with pytest.raises(ValueError):
        GridFunction(np.zeros(3), d)


# nonlocal tail

def test_tail_closed_form_1d():
    v = ExteriorFunction.constant(1, 1.0)
    val = nonlocal_tail(None, atoms((0.5, 1.0)), 2.0, v, [0.0], 1.0)
    assert val == pytest.approx(2 / math.pi, rel=1e-9)


def test_tail_vanishes_for_compact_inner_support():
    d = build(Interval(-1, 1), 0.1)
    v = ExteriorFunction.from_domain(d, np.ones(d.n))
    assert nonlocal_tail(d, atoms((0.5, 1.0)), 2.0, v, [0.0], 5.0) == 0.0
    assert nonlocal_tail(d, atoms((0.5, 1.0)), 2.0, np.zeros(d.n), [0.0], 0.2) == 0.0


def test_tail_constant_switch():
    v = ExteriorFunction.constant(1, 1.0)
    raw = nonlocal_tail(None, atoms((0.5, 1.0)), 2.0, v, [0.0], 1.0, include_constant=False)
    assert raw == pytest.approx(2.0, rel=1e-9)


def test_tail_divergence_detected():
    v = ExteriorFunction(np.zeros(1), 1.0, np.zeros(0), far_value=1.0, decay=-2.0)
    with pytest.raises(TailDivergenceError):
        nonlocal_tail(None, atoms((0.5, 1.0)), 2.0, v, [0.0], 1.0)


# pointwise inequalities

def test_simon_gap_trivial_cases(rng):
    t = rng.standard_normal((50, 2))
    assert np.all(simon_gap(t, t, 3.0) == 0)
    np.testing.assert_allclose(simon_gap(t, rng.standard_normal((50, 2)), 2.0), 0, atol=1e-12)


@pytest.mark.parametrize("p", [1.5, 3.0])
def test_simon_gap_nonnegative(p, rng):
    t1, t2 = rng.standard_normal((2, 20000, 2)) * rng.uniform(0.01, 10, (2, 20000, 1))
    assert np.min(simon_gap(t1, t2, p)) >= 0


def test_convexity_gap_trivial_cases():
    assert convexity_gap(1.5, -0.7, 1.0, 3.0) == 0
    assert convexity_gap(1.5, 0.0, 2.3, 1.5) == 0
    with pytest.raises(ValueError):
        convexity_gap(1.0, 1.0, 0.5, 2.0)
