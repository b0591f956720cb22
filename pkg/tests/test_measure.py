import math

import pytest

from mixspec.measure import (MeasureError, SpectralMeasure, critical_exponent, gamma, integrate,
                             s_sharp, validate)


def M(plus=(), plus_pieces=(), minus=(), minus_pieces=(), s_bar=0.5):
    return SpectralMeasure(list(plus), list(plus_pieces), list(minus), list(minus_pieces), s_bar)


def test_single_dirac_is_valid():
    assert validate(M(plus=[(0.5, 1.0)])).ok


def test_minus_mass_above_s_bar_is_flagged():
    rep = validate(M(plus=[(1.0, 1.0)], minus=[(0.8, 0.1)]))
    assert not rep.ok
    assert "1.5" in rep.codes()


def test_masses_on_correct_sides_are_valid():
    assert validate(M(plus_pieces=[(0.6, 0.9, 2.0)], minus=[(0.1, 0.05)])).ok


def test_missing_top_mass_is_flagged():
    assert "1.4" in validate(M(plus=[(0.2, 1.0)])).codes()


def test_malformed_entries_never_raise():
    rep = validate(M(plus=[(1.2, -1.0)], plus_pieces=[(0.7, 0.6, 1.0)]))
    assert set(rep.codes()) >= {"struct"}


def test_overlapping_pieces():
    rep = validate(M(plus_pieces=[(0.5, 0.8, 1.0), (0.7, 0.9, 1.0)]))
    assert "struct" in rep.codes()


def test_endpoint_piece_warns():
    rep = validate(M(plus_pieces=[(0.5, 1.0, 1.0)]))
    assert rep.ok and rep.warnings


def test_require_positive():
    m = M(plus=[(1.0, 1.0)], minus=[(0.1, 0.1)])
    assert validate(m).ok
    assert "positive" in validate(m, require_positive=True).codes()


@pytest.mark.parametrize("m, expected", [
    (M(plus=[(1.0, 1.0)], minus=[(0.2, 0.1)]), 0.1),
    (M(plus=[(1.0, 1.0)]), 0.0),
    (M(plus_pieces=[(0.5, 1.0, 2.0)], minus_pieces=[(0.0, 0.25, 0.2)]), 0.05),
])
def test_gamma(m, expected):
    assert gamma(m) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("m, expected", [
    (M(plus=[(1.0, 1.0), (0.3, 1.0)], s_bar=0.25), 1.0),
    (M(plus=[(0.7, 2.0)]), 0.7),
    (M(plus_pieces=[(0.4, 0.8, 1.0)]), 0.8),
])
def test_s_sharp(m, expected):
    assert s_sharp(m) == expected


def test_gamma_and_s_sharp_need_top_mass():
    m = M(plus=[(0.1, 1.0)])
    with pytest.raises(MeasureError):
        gamma(m)
    with pytest.raises(MeasureError):
        s_sharp(m)


def test_integrate_examples():
    assert integrate(M(plus=[(0.5, 2.0)]), "plus", lambda s: s) == pytest.approx(1.0)
    assert integrate(M(plus_pieces=[(0.0, 1.0, 1.0)]), "plus", lambda s: s * s,
                     quad_order=4) == pytest.approx(1.0 / 3.0, rel=1e-14)
    m = M(plus=[(1.0, 1.0)], plus_pieces=[(0.25, 0.75, 2.0)])
    assert integrate(m, "plus", lambda s: 1.0) == pytest.approx(2.0, rel=1e-14)


def test_integrate_rejects_bad_order():
    with pytest.raises(ValueError):
        integrate(M(plus=[(0.5, 1.0)]), "plus", lambda s: s, quad_order=0)


@pytest.mark.parametrize("N, p, s, expected", [(2, 2.0, 0.5, 4.0), (1, 2.0, 0.75, math.inf),
                                               (2, 1.5, 1.0, 6.0)])
def test_critical_exponent(N, p, s, expected):
    assert critical_exponent(M(plus=[(s, 1.0)], s_bar=min(s, 0.5)), N, p) == expected


def test_dict_round_trip():
    m = M(plus=[(1.0, 1.0)], plus_pieces=[(0.3, 0.6, 2.0)], minus=[(0.1, 0.2)])
    assert SpectralMeasure.from_dict(m.to_dict()) == m


def test_from_dict_needs_s_bar():
    with pytest.raises(MeasureError):
        SpectralMeasure.from_dict({"mu_plus": [{"s": 1, "w": 1}]})
