"""Rearrangement and equal-volume shape comparisons."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .domain import (Box, DiscreteDomain, Disk, Interval, ball_of_same_volume, build, l_shape,
                     schwarz_rearrange)
from .energy import seminorm_p, values
from .kernel import AssembledOperator, assemble
from .measure import SpectralMeasure
from .solver import eig1


class VolumeMismatchError(ValueError):
    pass


@dataclass
class PolyaSzegoResult:
    E_u: float
    E_ustar: float
    gap: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.gap >= -self.tol

    def __iter__(self):
        return iter((self.E_u, self.E_ustar, self.gap))

    def to_dict(self) -> dict:
        return {"E_u": self.E_u, "E_ustar": self.E_ustar, "gap": self.gap,
                "tol": self.tol, "passed": self.passed}


def rearrangement_ball(d: DiscreteDomain) -> DiscreteDomain:
    """Ball of (nearly) the same volume with room for every node value of ``d``.

    Node values outside the support enter the energy exactly like exterior
    zeros, so a few extra ball nodes do not change the rearranged energy.
    """
    return ball_of_same_volume(d, min_nodes=d.n)


def polya_szego_check(op_domain: AssembledOperator, op_ball: AssembledOperator, u,
                      rtol: float = 1e-6) -> PolyaSzegoResult:
    """Energy of ``u`` against that of its Schwarz rearrangement on the ball."""
    if op_domain.domain.dim != op_ball.domain.dim:
        raise ValueError("domain and ball have different dimensions")
    if op_domain.signed or op_ball.signed:
        raise ValueError("the rearrangement inequality needs a nonnegative measure")
    if op_domain.p != op_ball.p:
        raise ValueError("operators use different exponents")
    uv = values(u, op_domain.n)
    ustar = schwarz_rearrange(op_domain.domain, uv, op_ball.domain)
    e_u = seminorm_p(op_domain, uv)
    e_star = seminorm_p(op_ball, ustar)
    return PolyaSzegoResult(e_u, e_star, e_u - e_star, rtol * e_u)


# ---------------------------------------------------------------------------
# Faber-Krahn
# ---------------------------------------------------------------------------

def area_family(h: float, area: float = 1.0) -> dict[str, DiscreteDomain]:
    """Disk, square, 2:1 and 4:1 rectangles (scaled to ``area``) and an
    L-shape, each with about ``area / h^2`` nodes."""
    fam = {}
    target = area / h ** 2
    for name, aspect in (("square", 1.0), ("rect2x0.5", 4.0), ("rect4x0.25", 16.0)):
        ny0 = math.sqrt(target / aspect)
        best = None
        for ny in range(max(int(ny0) - 2, 1), int(ny0) + 3):
            nx = max(int(round(target / ny)), 1)
            miss = abs(nx * ny - target)
            key = (miss > 1, abs(math.log(nx / ny / aspect)), miss)
            if best is None or key < best[0]:
                best = (key, nx, ny)
        _, nx, ny = best
        fam[name] = build(Box(0.0, (nx + 1) * h, 0.0, (ny + 1) * h), h)
    fam["L"] = build(l_shape(area, h), h)
    fam["disk"] = ball_of_same_volume(fam["square"])
    return dict(sorted(fam.items(), key=lambda kv: kv[0] != "disk"))


def interval_family(h: float, length: float = 1.0, shifts=(0, 3, 17)) -> dict[str, DiscreteDomain]:
    """Translates of one interval by whole cells (1D has no other shapes)."""
    n = max(int(round(length / h)), 1)
    return {f"interval+{k}h": build(Interval(k * h, (k + n + 1) * h), h) for k in shifts}


def _is_ball(d: DiscreteDomain) -> bool:
    return d.dim == 1 or isinstance(d.shape, Disk)


def _check_volumes(level: Mapping[str, DiscreteDomain]) -> float:
    doms = list(level.values())
    h, N = doms[0].h, doms[0].dim
    others = [d.volume for d in doms if not _is_ball(d)] or [d.volume for d in doms]
    rho = float(np.median(others))
    cell = h ** N
    for name, d in level.items():
        # disks grow by symmetric shells of up to 8 nodes
        slack = (4.0 if (N == 2 and _is_ball(d)) else 1.0) * cell
        if abs(d.volume - rho) > slack + 1e-12:
            raise VolumeMismatchError(
                f"{name}: volume {d.volume:.6g} differs from {rho:.6g} by more than {slack:.3g}")
    return rho


@dataclass
class FaberKrahnTable:
    rows: list = field(default_factory=list)
    extrapolated: dict = field(default_factory=dict)
    winner: str = ""
    ball: str = ""
    ball_minimal: bool = False
    ball_minimal_every_level: bool = False
    stable_ordering: bool = True

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["shape", "h", "lambda1", "volume"])
            for r in self.rows:
                w.writerow([r["shape"], repr(r["h"]), repr(r["lambda1"]), repr(r["volume"])])

    def ranking(self, h: float | None = None) -> list[str]:
        h = min(r["h"] for r in self.rows) if h is None else h
        level = [r for r in self.rows if r["h"] == h]
        return [r["shape"] for r in sorted(level, key=lambda r: r["lambda1"])]

    def to_dict(self) -> dict:
        return {"rows": self.rows, "extrapolated": self.extrapolated, "winner": self.winner,
                "ball": self.ball, "ball_minimal": self.ball_minimal,
                "ball_minimal_every_level": self.ball_minimal_every_level,
                "stable_ordering": self.stable_ordering}


def faber_krahn_experiment(shapes, m: SpectralMeasure, p: float, h_levels=None,
                           n_restarts: int = 2, tol: float = 1e-9, seed: int = 0) -> FaberKrahnTable:
    """First eigenvalue of every shape at every grid level.

    ``shapes`` is either a callable ``h -> {name: DiscreteDomain}`` (used with
    ``h_levels``) or one mapping of equal-volume domains. The two finest
    levels are extrapolated linearly to ``h = 0``.
    """
    if callable(shapes):
        if not h_levels:
            raise ValueError("h_levels are required with a shape factory")
        levels = [shapes(h) for h in sorted(h_levels, reverse=True)]
    else:
        levels = [dict(shapes)]
    table = FaberKrahnTable()
    by_h = []
    for level in levels:
        _check_volumes(level)
        h = next(iter(level.values())).h
        lam = {}
        for name, d in level.items():
            op = assemble(d, m, p)
            lam[name] = eig1(op, tol=tol, n_restarts=n_restarts, seed=seed).lam
            table.rows.append({"shape": name, "h": h, "lambda1": lam[name], "volume": d.volume})
        balls = [k for k, d in level.items() if _is_ball(d)]
        by_h.append((h, lam, balls[0] if balls else None))

    h_f, lam_f, ball = by_h[-1]
    table.ball = ball or ""
    table.winner = min(lam_f, key=lam_f.get)
    table.ball_minimal = ball is not None and all(lam_f[ball] <= v for v in lam_f.values())
    table.ball_minimal_every_level = ball is not None and all(
        all(lam[b] <= v for v in lam.values()) for _, lam, b in by_h if b is not None)
    if len(by_h) >= 2:
        h_c, lam_c, _ = by_h[-2]
        for name in lam_f:
            if name in lam_c:
                slope = (lam_c[name] - lam_f[name]) / (h_c - h_f)
                table.extrapolated[name] = lam_f[name] - slope * h_f
        rank = lambda lam: sorted(lam, key=lam.get)  # noqa: E731
        table.stable_ordering = rank(lam_c) == rank(lam_f)
    return table
