import math

import numpy as np
import pytest

from mixspec import build
from mixspec.domain import Box, Disk, Interval
from mixspec.kernel import assemble
from mixspec.shapes import (VolumeMismatchError, area_family, faber_krahn_experiment,
                            interval_family, polya_szego_check, rearrangement_ball)
from mixspec.solver import eig1

from conftest import atoms

HALF = atoms((0.5, 1.0))


def ops(p, h=0.1):
    d = build(Box(0, 1, 0, 1), h)
    ball = rearrangement_ball(d)
    return assemble(d, HALF, p), assemble(ball, HALF, p)


def test_radial_function_on_ball_has_no_gap():
    d = build(Disk((0.0, 0.0), 0.56), 0.08)
    op = assemble(d, HALF, 2.0)
    r = np.linalg.norm(d.nodes, axis=1)
    u = np.exp(-r)
    res = polya_szego_check(op, op, u)
    assert abs(res.gap) <= 1e-12 * res.E_u


def test_constant_function_ball_to_ball():
    d = build(Disk((0.0, 0.0), 0.5), 0.1)
    op = assemble(d, HALF, 1.5)
    assert polya_szego_check(op, op, np.ones(d.n)).passed


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_random_functions_mostly_pass(p, rng):
    op_d, op_b = ops(p)
    results = [polya_szego_check(op_d, op_b, rng.uniform(0, 1, op_d.n)) for _ in range(20)]
    assert sum(r.passed for r in results) >= 19
    assert np.mean([r.gap for r in results]) > 0


def test_polya_szego_argument_checks():
    op_d, op_b = ops(2.0)
    op_1d = assemble(build(Interval(0, 1), 0.1), HALF, 2.0)
    with pytest.raises(ValueError):
        polya_szego_check(op_d, op_1d, np.ones(op_d.n))


def test_area_family_volumes():
    fam = area_family(0.05)
    assert list(fam)[0] == "disk"
    assert set(fam) == {"disk", "square", "rect2x0.5", "rect4x0.25", "L"}
    for name, d in fam.items():
        assert abs(d.volume - 1.0) <= 4 * d.cell_volume + 1e-12, name


def test_interval_translates_have_equal_eig1():
    fam = interval_family(0.02)
    lams = [eig1(assemble(d, HALF, 2.0), n_restarts=1).lam for d in fam.values()]
    assert max(lams) - min(lams) <= 1e-10 * lams[0]


def test_translation_invariance_2d():
    d = build(Box(0, 1, 0, 0.5), 0.1)
    a = eig1(assemble(d, HALF, 3.0), n_restarts=1).lam
    b = eig1(assemble(d.translated((4, -3)), HALF, 3.0), n_restarts=1).lam
    assert abs(a - b) <= 1e-10 * a


def test_scaling_diagnostic():
    # dilation by 2 on the same lattice: lambda scales like t^{-ps}
    h = 0.1
    small = eig1(assemble(build(Box(0, 0.5, 0, 0.5), h / 2), HALF, 2.0), n_restarts=1).lam
    big = eig1(assemble(build(Box(0, 1, 0, 1), h), HALF, 2.0), n_restarts=1).lam
    assert big == pytest.approx(small * 2.0 ** (-1.0), rel=1e-10)


def test_volume_mismatch_detected():
    shapes = {"square": build(Box(0, 1, 0, 1), 0.1), "small": build(Box(0, 0.5, 0, 0.5), 0.1)}
    with pytest.raises(VolumeMismatchError):
        faber_krahn_experiment(shapes, HALF, 2.0)


def test_faber_krahn_small_table(tmp_path):
    table = faber_krahn_experiment(area_family, atoms((1.0, 1.0)), 2.0, h_levels=[0.05, 0.025])
    assert table.ball == "disk" and table.winner == "disk"
    assert table.ball_minimal_every_level and table.stable_ordering
    assert table.ranking()[0] == "disk"
    assert set(table.extrapolated) == {"disk", "square", "rect2x0.5", "rect4x0.25", "L"}
    table.to_csv(tmp_path / "fk.csv")
    lines = (tmp_path / "fk.csv").read_text().splitlines()
    assert lines[0] == "shape,h,lambda1,volume" and len(lines) == 11
    assert table.extrapolated["square"] == pytest.approx(2 * math.pi ** 2, rel=0.05)
