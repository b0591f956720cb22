import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mixspec import build
from mixspec.domain import Box, Interval
from mixspec.kernel import assemble, exterior_diagonal, normalizing_constant
from mixspec.measure import SpectralMeasure

from conftest import atoms, interval_op


def test_constant_half_in_1d():
    assert normalizing_constant(1, 2.0, 0.5) == pytest.approx(1 / math.pi, rel=1e-14)


@pytest.mark.parametrize("N, p", [(1, 2.0), (2, 1.5), (2, 3.0)])
def test_constant_vanishes_linearly_at_endpoints(N, p):
    lo = [normalizing_constant(N, p, s) / s for s in (1e-5, 1e-6)]
    hi = [normalizing_constant(N, p, 1 - e) / e for e in (1e-5, 1e-6)]
    assert lo[0] == pytest.approx(lo[1], rel=1e-4) and lo[1] > 0
    assert hi[0] == pytest.approx(hi[1], rel=1e-4) and hi[1] > 0


def test_local_atom_routes_to_faces():
    op = assemble(build(Box(0, 1, 0, 1), 0.2), atoms((1.0, 1.0)), 2.0)
    assert op.W_plus is None and not np.any(op.d_plus)
    assert op.a1_plus == 1.0 and op.a0_plus == 0.0


def test_mass_atom_routes_to_a0():
    op = interval_op(SpectralMeasure([(0.0, 0.7), (1.0, 1.0)], [], [], [], 1.0))
    assert op.a0_plus == 0.7 and op.a1_plus == 1.0


def test_pair_weight_between_neighbours():
    op = assemble(build(Interval(0, 1), 0.25), atoms((0.5, 1.0)), 2.0)
    assert op.W_plus[0, 1] == pytest.approx(1 / math.pi, rel=1e-13)
    assert op.W_plus[0, 2] == pytest.approx(1 / math.pi / 4, rel=1e-13)


def test_exterior_integral_in_1d():
    d = build(Interval(0, 1), 0.005)
    mid = int(np.argmin(np.abs(d.nodes[:, 0] - 0.5)))
    assert d.nodes[mid, 0] == pytest.approx(0.5)
    assert exterior_diagonal(d, 2.0, 0.5, mid) == pytest.approx(4.0, rel=0.01)
    assert exterior_diagonal(d, 2.0, 0.5, 0) > exterior_diagonal(d, 2.0, 0.5, mid)


def test_assembled_exterior_matches_direct_sum():
    d = build(Box(0, 1, 0, 1), 0.1)
    op = assemble(d, atoms((0.5, 1.0)), 2.0)
    c = normalizing_constant(2, 2.0, 0.5)
    for i in (0, 17, 44):
        direct = c * d.cell_volume * exterior_diagonal(d, 2.0, 0.5, i, r_out_factor=64.0)
        assert op.d_plus[i] == pytest.approx(direct, rel=1e-3)


@settings(max_examples=25, deadline=None)
@given(s=st.floats(0.05, 0.95), p=st.sampled_from([1.5, 2.0, 3.0]), w=st.floats(0.1, 3.0))
def test_operator_invariants(s, p, w):
    op = assemble(build(Box(0, 1, 0, 1), 0.2), atoms((s, w)), p)
    W = op.W_plus
    assert np.allclose(W, W.T, rtol=0, atol=0)
    assert np.all(np.diag(W) == 0) and np.all(W >= 0)
    assert np.all(op.d_plus >= 0)


def test_minus_part_stays_below_s_bar():
    m = SpectralMeasure([(1.0, 1.0)], [], [(0.3, 0.2)], [], 0.5)
    op = interval_op(m)
    assert op.a1_minus == 0 and op.signed
    assert op.plus_only().signed is False


def test_pieces_use_quadrature():
    m = SpectralMeasure([], [(0.3, 0.6, 2.0)], [], [], 0.3)
    d = build(Interval(0, 1), 0.1)
    W = assemble(d, m, 2.0, quad_order=24).W_plus
    r = 0.1
    x, wq = np.polynomial.legendre.leggauss(200)
    s = 0.45 + 0.15 * x
    ref = np.sum(2.0 * 0.15 * wq * np.array([normalizing_constant(1, 2.0, t) * r ** (-1 - 2 * t)
                                               for t in s])) * d.cell_volume ** 2
    assert W[0, 1] == pytest.approx(ref, rel=1e-10)
