"""Signed spectral measures on [0, 1].

A measure is stored as a positive and a negative part, each a finite list of
Dirac atoms ``(s, w)`` plus piecewise-constant densities ``(a, b, rho)``.
Every integral against such a measure is a finite sum of point evaluations
and Gauss-Legendre rules, so polynomial integrands are integrated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

Sign = Literal["plus", "minus"]

#: Gauss-Legendre nodes per density piece unless told otherwise.
DEFAULT_QUAD_ORDER = 16

#: Density pieces are clipped to this window before kernel assembly.
CLIP_WINDOW = (1e-3, 1.0 - 1e-3)


class MeasureError(ValueError):
    """Raised when a measure cannot support the requested computation."""


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def __len__(self) -> int:
        return len(self.violations)

    def to_dict(self) -> dict:
        return {
            "valid": self.ok,
            "violations": [v.to_dict() for v in self.violations],
            "warnings": list(self.warnings),
        }


def _atoms(items) -> tuple[tuple[float, float], ...]:
    return tuple((float(s), float(w)) for s, w in items)


def _pieces(items) -> tuple[tuple[float, float, float], ...]:
    return tuple((float(a), float(b), float(rho)) for a, b, rho in items)


@dataclass(frozen=True)
class SpectralMeasure:
    """Signed measure ``mu = mu_plus - mu_minus`` on the order axis ``s``.

    Parameters
    ----------
    plus_atoms, minus_atoms
        Sequences of ``(s, weight)``.
    plus_pieces, minus_pieces
        Sequences of ``(a, b, density)``: constant density on ``[a, b]``.
    s_bar
        Threshold order: the positive part must charge ``[s_bar, 1]`` and
        the negative part must live strictly below it.
    """

    plus_atoms: tuple = ()
    plus_pieces: tuple = ()
    minus_atoms: tuple = ()
    minus_pieces: tuple = ()
    s_bar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "plus_atoms", _atoms(self.plus_atoms))
        object.__setattr__(self, "minus_atoms", _atoms(self.minus_atoms))
        object.__setattr__(self, "plus_pieces", _pieces(self.plus_pieces))
        object.__setattr__(self, "minus_pieces", _pieces(self.minus_pieces))
        object.__setattr__(self, "s_bar", float(self.s_bar))

    # -- constructors -----------------------------------------------------
    @classmethod
    def dirac(cls, s: float, weight: float = 1.0, s_bar: float | None = None):
        """Single positive atom; ``s_bar`` defaults to ``s`` (or 1 at s=0)."""
        if s_bar is None:
            s_bar = s if s > 0 else 1.0
        return cls(plus_atoms=[(s, weight)], s_bar=s_bar)

    def parts(self, sign: Sign):
        if sign == "plus":
            return self.plus_atoms, self.plus_pieces
        if sign == "minus":
            return self.minus_atoms, self.minus_pieces
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")

    @property
    def has_minus(self) -> bool:
        return bool(self.minus_atoms or self.minus_pieces)

    def positive_part(self) -> "SpectralMeasure":
        return SpectralMeasure(self.plus_atoms, self.plus_pieces, (), (), self.s_bar)

    def with_atom(self, sign: Sign, s: float, weight: float) -> "SpectralMeasure":
        if sign == "plus":
            return SpectralMeasure(self.plus_atoms + ((s, weight),), self.plus_pieces,
                                   self.minus_atoms, self.minus_pieces, self.s_bar)
        return SpectralMeasure(self.plus_atoms, self.plus_pieces,
                               self.minus_atoms + ((s, weight),), self.minus_pieces,
                               self.s_bar)

    def scaled(self, t: float) -> "SpectralMeasure":
        """Multiply both parts by ``t >= 0``."""
        return SpectralMeasure(
            [(s, t * w) for s, w in self.plus_atoms],
            [(a, b, t * r) for a, b, r in self.plus_pieces],
            [(s, t * w) for s, w in self.minus_atoms],
            [(a, b, t * r) for a, b, r in self.minus_pieces],
            self.s_bar,
        )

    def __add__(self, other: "SpectralMeasure") -> "SpectralMeasure":
        return SpectralMeasure(
            self.plus_atoms + other.plus_atoms,
            self.plus_pieces + other.plus_pieces,
            self.minus_atoms + other.minus_atoms,
            self.minus_pieces + other.minus_pieces,
            self.s_bar,
        )

    def open_part(self, clip: tuple[float, float] | None = CLIP_WINDOW):
        """Restriction to the open interval ``(0, 1)``.

        Atoms at the endpoints are dropped. Pieces are intersected with
        ``clip`` when given; those are the only pieces the pairwise kernel
        sees.
        """
        lo, hi = clip if clip is not None else (0.0, 1.0)

        def keep_atoms(atoms):
            return [(s, w) for s, w in atoms if 0.0 < s < 1.0]

        def keep_pieces(pieces):
            out = []
            for a, b, r in pieces:
                a2, b2 = max(a, lo), min(b, hi)
                if b2 > a2:
                    out.append((a2, b2, r))
            return out

        return SpectralMeasure(keep_atoms(self.plus_atoms), keep_pieces(self.plus_pieces),
                               keep_atoms(self.minus_atoms), keep_pieces(self.minus_pieces),
                               self.s_bar)

    def endpoint_mass(self, sign: Sign, s: float) -> float:
        """Total atom weight sitting exactly at ``s`` (used for 0 and 1)."""
        atoms, _ = self.parts(sign)
        return float(sum(w for t, w in atoms if t == s))

    def mass(self, sign: Sign, lo: float = 0.0, hi: float = 1.0,
             include_hi: bool = True) -> float:
        """Mass of ``[lo, hi]`` (or ``[lo, hi)``) under one part."""
        atoms, pieces = self.parts(sign)
        total = 0.0
        for s, w in atoms:
            if s >= lo and (s <= hi if include_hi else s < hi):
                total += w
        for a, b, r in pieces:
            overlap = min(b, hi) - max(a, lo)
            if overlap > 0:
                total += r * overlap
        return total

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        def block(atoms, pieces):
            return ([{"s": s, "w": w} for s, w in atoms]
                    + [{"from": a, "to": b, "density": r} for a, b, r in pieces])

        return {
            "mu_plus": block(self.plus_atoms, self.plus_pieces),
            "mu_minus": block(self.minus_atoms, self.minus_pieces),
            "s_bar": self.s_bar,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectralMeasure":
        def split(entries):
            atoms, pieces = [], []
            for e in entries or []:
                if "s" in e:
                    atoms.append((e["s"], e.get("w", 1.0)))
                elif "from" in e:
                    pieces.append((e["from"], e["to"], e.get("density", 1.0)))
                else:
                    raise MeasureError(f"unrecognized measure entry {e!r}")
            return atoms, pieces

        pa, pp = split(data.get("mu_plus"))
        ma, mp = split(data.get("mu_minus"))
        if "s_bar" not in data:
            raise MeasureError("measure block needs 's_bar'")
        return cls(pa, pp, ma, mp, data["s_bar"])


def validate(m: SpectralMeasure, require_positive: bool = False) -> ValidationReport:
    """Check the structural hypotheses; never raises.

    Violation codes ``1.4``-``1.6`` name the standard hypotheses on the
    measure (positive mass at high order, no negative mass at high order,
    finite ratio). ``struct`` covers malformed entries and ``positive``
    the optional requirement that the negative part vanish.
    """
    rep = ValidationReport()
    add = rep.violations.append

    if not (0.0 < m.s_bar <= 1.0):
        add(Violation("struct", f"s_bar={m.s_bar} must lie in (0, 1]"))

    for sign in ("plus", "minus"):
        atoms, pieces = m.parts(sign)
        for s, w in atoms:
            if not 0.0 <= s <= 1.0:
                add(Violation("struct", f"{sign} atom at s={s} outside [0, 1]"))
            if w < 0 or not math.isfinite(w):
                add(Violation("struct", f"{sign} atom at s={s} has weight {w} < 0"))
        for a, b, r in pieces:
            if not (0.0 <= a < b <= 1.0):
                add(Violation("struct", f"{sign} piece [{a}, {b}] is not a subinterval of [0, 1]"))
            if r < 0 or not math.isfinite(r):
                add(Violation("struct", f"{sign} piece [{a}, {b}] has density {r} < 0"))
            if a <= 0.0 or b >= 1.0:
                rep.warnings.append(
                    f"{sign} piece [{a}, {b}] touches an endpoint; the kernel uses "
                    f"[{CLIP_WINDOW[0]}, {CLIP_WINDOW[1]}] and endpoint mass must be given as atoms")
        ordered = sorted(pieces)
        for (a1, b1, _), (a2, b2, _) in zip(ordered, ordered[1:]):
            if a2 < b1:
                add(Violation("struct", f"{sign} pieces [{a1}, {b1}] and [{a2}, {b2}] overlap"))

    top_plus = m.mass("plus", m.s_bar, 1.0)
    if not top_plus > 0:
        add(Violation("1.4", f"mu_plus([s_bar, 1]) = {top_plus} must be positive"))
    top_minus = m.mass("minus", m.s_bar, 1.0)
    if top_minus > 0:
        add(Violation("1.5", f"mu_minus([s_bar, 1]) = {top_minus} must vanish"))
    if not top_plus > 0 and m.mass("minus", 0.0, m.s_bar, include_hi=False) > 0:
        add(Violation("1.6", "no finite gamma: mu_minus([0, s_bar)) > 0 while mu_plus([s_bar, 1]) = 0"))
    if require_positive and m.has_minus:
        add(Violation("positive", "this computation requires mu_minus = 0"))
    return rep


def gamma(m: SpectralMeasure) -> float:
    """Smallest admissible ratio ``mu_minus([0, s_bar)) / mu_plus([s_bar, 1])``."""
    top = m.mass("plus", m.s_bar, 1.0)
    if not top > 0:
        raise MeasureError("gamma undefined: mu_plus([s_bar, 1]) = 0")
    return m.mass("minus", 0.0, m.s_bar, include_hi=False) / top


def s_sharp(m: SpectralMeasure) -> float:
    """Largest ``s >= s_bar`` with ``mu_plus([s, 1]) > 0``."""
    cands = [s for s, w in m.plus_atoms if s >= m.s_bar and w > 0]
    cands += [b for a, b, r in m.plus_pieces if b > m.s_bar and b > a and r > 0]
    if not cands:
        raise MeasureError("mu_plus([s_bar, 1]) = 0: no admissible s_sharp")
    return float(max(cands))


def integrate(m: SpectralMeasure, sign: Sign, f: Callable, quad_order: int = DEFAULT_QUAD_ORDER):
    """Integrate ``f`` against one part of ``m``.

    ``f`` is called once per atom and once per quadrature node with a float
    argument; it may return a scalar or an array (arrays are accumulated
    elementwise in a fixed order).
    """
    if quad_order < 1:
        raise ValueError("quad_order must be >= 1")
    atoms, pieces = m.parts(sign)
    total = 0.0
    for s, w in atoms:
        if w != 0:
            total = total + w * f(s)
    if pieces:
        x, wq = np.polynomial.legendre.leggauss(quad_order)
        for a, b, rho in pieces:
            if rho == 0 or b <= a:
                continue
            half, mid = 0.5 * (b - a), 0.5 * (a + b)
            for xk, wk in zip(x, wq):
                total = total + (rho * half * wk) * f(mid + half * xk)
    return total


def critical_exponent(m: SpectralMeasure, N: int, p: float) -> float:
    """Sobolev exponent ``N p / (N - p s_sharp)``; ``inf`` when ``N <= p s_sharp``."""
    if p <= 1:
        raise ValueError("p must exceed 1")
    ps = p * s_sharp(m)
    if N > ps:
        return N * p / (N - ps)
    return math.inf
