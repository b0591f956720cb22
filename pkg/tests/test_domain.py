import numpy as np
import pytest

from mixspec.domain import (Box, Disk, EmptyDomainError, Interval, Mask, ball_of_same_volume, build,
                            l_shape, schwarz_rearrange, shape_from_dict)


def test_interval_nodes():
    d = build(Interval(0, 1), 0.25)
    assert d.n == 3
    np.testing.assert_allclose(d.nodes[:, 0], [0.25, 0.5, 0.75])


def test_box_nodes():
    assert build(Box(0, 1, 0, 1), 0.25).n == 9


def test_disk_nodes():
    d = build(Disk((0.0, 0.0), 1.0), 0.5)
    assert d.n == 12
    got = {tuple(x) for x in np.round(d.nodes, 12)}
    want = {(sx * a, sy * b) for a, b in [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75)]
            for sx in (1, -1) for sy in (1, -1)}
    assert got == want


def test_nodes_are_lexicographic():
    d = build(Disk((0.1, -0.2), 0.7), 0.05)
    order = np.lexsort(d.nodes.T[::-1])
    assert np.array_equal(order, np.arange(d.n))


def test_empty_domain_rejected():
    with pytest.raises((EmptyDomainError, ValueError)):
        build(Interval(0, 0.1), 0.25)


def test_ball_1d_is_interval():
    d = build(Interval(0, 1), 0.05)
    b = ball_of_same_volume(d)
    assert b.dim == 1 and b.n == d.n


def test_ball_2d_area():
    d = build(Box(0, 1.02, 0, 1.02), 0.02)  # 50 x 50 nodes, discrete area 1
    assert d.volume == pytest.approx(1.0)
    b = ball_of_same_volume(d)
    assert isinstance(b.shape, Disk)
    assert b.shape.r == pytest.approx(1 / np.sqrt(np.pi), rel=0.005)
    assert abs(b.volume - d.volume) <= 4 * d.cell_volume + 1e-12


def test_ball_of_one_cell():
    d = build(Mask(np.ones((1, 1), dtype=bool)), 0.1)
    assert ball_of_same_volume(d).n >= 1


def test_rearrange_constant_and_sorting():
    d = build(Interval(0, 1), 0.25)
    np.testing.assert_array_equal(schwarz_rearrange(d, np.full(3, 2.0), d), [2.0, 2.0, 2.0])
    np.testing.assert_array_equal(schwarz_rearrange(d, np.array([3.0, 1.0, 2.0]), d), [2.0, 3.0, 1.0])


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_rearrange_preserves_norm(p, rng):
    d = build(Box(0, 1, 0, 1), 0.1)
    ball = ball_of_same_volume(d, min_nodes=d.n)
    u = np.abs(rng.standard_normal(d.n))
    us = schwarz_rearrange(d, u, ball)
    assert np.sum(us ** p) == pytest.approx(np.sum(u ** p), rel=1e-14)


@pytest.mark.parametrize("h", [0.05, 1 / 28, 0.025])
def test_l_shape_cell_count(h):
    d = build(l_shape(1.0, h), h)
    assert d.n == round(1 / h ** 2)


def test_shape_from_dict(tmp_path):
    np.savetxt(tmp_path / "m.csv", np.array([[1, 1], [1, 0]]), delimiter=",", fmt="%d")
    m = shape_from_dict({"shape": "mask", "path": "m.csv"}, tmp_path)
    assert build(m, 0.1).n == 3
    assert isinstance(shape_from_dict({"shape": "disk", "r": 1}), Disk)
    with pytest.raises(ValueError):
        shape_from_dict({"shape": "torus"})


def test_translation_changes_only_nodes():
    d = build(Box(0, 1, 0, 1), 0.1)
    t = d.translated((3, 0))
    np.testing.assert_allclose(t.nodes - d.nodes, np.tile([0.3, 0.0], (d.n, 1)), atol=1e-12)
