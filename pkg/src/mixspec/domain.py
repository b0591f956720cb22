"""Uniform-grid Dirichlet domains in one and two dimensions.

Every domain lives on a translate of the lattice ``h Z^N``. Interior nodes are
the lattice points strictly inside the shape; all other lattice points are
exterior and carry the value zero. Intervals and boxes put lattice points at
``a + k h`` (so ``(0, 1)`` with ``h = 1/(n+1)`` gives the classical ``n`` node
Dirichlet grid); disks and masks use cell centres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class EmptyDomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# continuum shapes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    a: float
    b: float
    dim = 1

    @property
    def diam(self) -> float:
        return self.b - self.a

    def shifted(self, dx) -> "Interval":
        return Interval(self.a + dx[0], self.b + dx[0])

    def to_dict(self) -> dict:
        return {"shape": "interval", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Box:
    ax: float
    bx: float
    ay: float
    by: float
    dim = 2

    @property
    def diam(self) -> float:
        return math.hypot(self.bx - self.ax, self.by - self.ay)

    def shifted(self, dx) -> "Box":
        return Box(self.ax + dx[0], self.bx + dx[0], self.ay + dx[1], self.by + dx[1])

    def to_dict(self) -> dict:
        return {"shape": "box", "ax": self.ax, "bx": self.bx, "ay": self.ay, "by": self.by}


@dataclass(frozen=True)
class Disk:
    center: tuple
    r: float
    dim = 2

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def diam(self) -> float:
        return 2.0 * self.r

    def shifted(self, dx) -> "Disk":
        return Disk((self.center[0] + dx[0], self.center[1] + dx[1]), self.r)

    def to_dict(self) -> dict:
        return {"shape": "disk", "center": list(self.center), "r": self.r}


@dataclass(frozen=True, eq=False)
class Mask:
    """Bitmap of cells; ``cells[row, col]`` is the cell whose centre is
    ``origin + ((col + 1/2) h, (row + 1/2) h)``."""

    cells: np.ndarray
    origin: tuple = (0.0, 0.0)
    dim = 2

    def __post_init__(self):
        object.__setattr__(self, "cells", np.asarray(self.cells, dtype=bool))
        object.__setattr__(self, "origin", tuple(float(c) for c in self.origin))

    def diam_at(self, h: float) -> float:
        rows, cols = np.nonzero(self.cells)
        if rows.size == 0:
            return 0.0
        return h * math.hypot(cols.max() - cols.min() + 1, rows.max() - rows.min() + 1)

    def shifted(self, dx) -> "Mask":
        return Mask(self.cells, (self.origin[0] + dx[0], self.origin[1] + dx[1]))

    def to_dict(self) -> dict:
        return {"shape": "mask", "origin": list(self.origin),
                "cells": self.cells.astype(int).tolist()}


# ---------------------------------------------------------------------------
# discrete domain
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiscreteDomain:
    """Interior lattice nodes of a shape.

    Attributes
    ----------
    nodes : (n, dim) array
        Coordinates, sorted lexicographically.
    index : (n, dim) int array
        Integer lattice coordinates, ``nodes = origin + index * h``.
    faces : (m, 2) int array
        Nearest-neighbour faces ``(i, j)``; ``j = -1`` marks a face whose
        other side is exterior.
    """

    dim: int
    h: float
    shape: object
    origin: np.ndarray
    index: np.ndarray
    nodes: np.ndarray = field(repr=False)
    faces: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def cell_volume(self) -> float:
        return self.h ** self.dim

    @property
    def volume(self) -> float:
        return self.n * self.cell_volume

    @property
    def diam(self) -> float:
        if isinstance(self.shape, Mask):
            return self.shape.diam_at(self.h)
        return self.shape.diam

    @property
    def center(self) -> np.ndarray:
        s = self.shape
        if isinstance(s, Interval):
            return np.array([(s.a + s.b) / 2])
        if isinstance(s, Box):
            return np.array([(s.ax + s.bx) / 2, (s.ay + s.by) / 2])
        if isinstance(s, Disk):
            return np.array(s.center)
        return self.nodes.mean(axis=0)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n)

    def translated(self, cells) -> "DiscreteDomain":
        """Same shape moved by an integer number of cells per axis."""
        return build(self.shape.shifted(np.asarray(cells, dtype=float) * self.h), self.h)

    def describe(self) -> dict:
        d = self.shape.to_dict()
        d.update(h=self.h, n=self.n, volume=self.volume)
        return d


def _count_open(a: float, b: float, h: float) -> int:
    """Number of ``k >= 1`` with ``a + k h < b`` (robust to round-off)."""
    ratio = (b - a) / h
    n = math.ceil(ratio - 1e-9) - 1
    return max(n, 0)


def _faces(index: np.ndarray) -> np.ndarray:
    lookup = {tuple(k): i for i, k in enumerate(index.tolist())}
    faces = []
    dim = index.shape[1]
    for i, k in enumerate(index.tolist()):
        for ax in range(dim):
            up = list(k)
            up[ax] += 1
            j = lookup.get(tuple(up), -1)
            faces.append((i, j))
            down = list(k)
            down[ax] -= 1
            if tuple(down) not in lookup:
                faces.append((i, -1))
    return np.array(faces, dtype=np.int64).reshape(-1, 2)


def _finish(shape, h: float, origin, index) -> DiscreteDomain:
    index = np.asarray(index, dtype=np.int64)
    if index.size == 0:
        raise EmptyDomainError(f"no interior node for {shape} at h={h}")
    origin = np.asarray(origin, dtype=float)
    nodes = origin + index * h
    order = np.lexsort(index.T[::-1])
    index, nodes = index[order], nodes[order]
    return DiscreteDomain(index.shape[1], float(h), shape, origin, index, nodes, _faces(index))


def build(shape, h: float) -> DiscreteDomain:
    """Enumerate the interior nodes of ``shape`` at spacing ``h``."""
    if not h > 0:
        raise ValueError("h must be positive")
    if isinstance(shape, Interval):
        n = _count_open(shape.a, shape.b, h)
        return _finish(shape, h, [shape.a], np.arange(1, n + 1)[:, None])
    if isinstance(shape, Box):
        nx = _count_open(shape.ax, shape.bx, h)
        ny = _count_open(shape.ay, shape.by, h)
        ii, jj = np.meshgrid(np.arange(1, nx + 1), np.arange(1, ny + 1), indexing="ij")
        return _finish(shape, h, [shape.ax, shape.ay], np.c_[ii.ravel(), jj.ravel()])
    if isinstance(shape, Disk):
        m = int(math.ceil(shape.r / h)) + 1
        k = np.arange(-m, m)
        ii, jj = np.meshgrid(k, k, indexing="ij")
        # exact squared distance in lattice units
        d2 = (ii + 0.5) ** 2 + (jj + 0.5) ** 2
        inside = d2 * h * h < shape.r ** 2
        origin = np.array(shape.center) + 0.5 * h
        return _finish(shape, h, origin, np.c_[ii[inside], jj[inside]])
    if isinstance(shape, Mask):
        rows, cols = np.nonzero(shape.cells)
        origin = np.array(shape.origin) + 0.5 * h
        return _finish(shape, h, origin, np.c_[cols, rows])
    raise TypeError(f"unknown shape {shape!r}")


def shape_from_dict(d: dict, base_dir: Path | None = None):
    kind = d.get("shape")
    if kind == "interval":
        return Interval(d.get("a", 0.0), d.get("b", 1.0))
    if kind == "box":
        return Box(d.get("ax", 0.0), d.get("bx", 1.0), d.get("ay", 0.0), d.get("by", 1.0))
    if kind == "disk":
        return Disk(tuple(d.get("center", (0.0, 0.0))), d["r"])
    if kind == "mask":
        if "cells" in d:
            cells = np.asarray(d["cells"])
        else:
            path = Path(d["path"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            cells = np.loadtxt(path, delimiter=",", ndmin=2)
        return Mask(cells != 0, tuple(d.get("origin", (0.0, 0.0))))
    raise ValueError(f"unknown shape kind {kind!r}")


def l_shape(area: float, h: float) -> Mask:
    """L-shaped mask with ``round(area / h^2)`` cells: a ``2k x 2k`` block
    minus a ``k x k`` corner, with the leftover cells added to (or removed
    from) a partial strip along the two long outer edges."""
    target = max(int(round(area / h ** 2)), 3)
    k = max(int(round(math.sqrt(target / 3.0))), 1)
    r = target - 3 * k * k
    cells = np.zeros((2 * k + 2, 2 * k + 2), dtype=bool)
    cells[1:2 * k + 1, 1:2 * k + 1] = True
    cells[k + 1:, k + 1:] = False
    if r > 0:
        strip = [(0, j) for j in range(1, 2 * k + 1)] + [(i, 0) for i in range(0, 2 * k + 1)]
        for ij in strip[:r]:
            cells[ij] = True
    elif r < 0:
        strip = [(1, j) for j in range(1, 2 * k + 1)] + [(i, 1) for i in range(2, 2 * k + 1)]
        for ij in strip[:-r]:
            cells[ij] = False
    rows, cols = np.flatnonzero(cells.any(1)), np.flatnonzero(cells.any(0))
    cells = cells[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]
    return Mask(cells, (0.0, 0.0))


def mask_at(cells: np.ndarray, refine: int, origin=(0.0, 0.0)) -> Mask:
    """Refine a coarse cell pattern by ``refine`` cells per coarse cell."""
    fine = np.kron(np.asarray(cells, dtype=int), np.ones((refine, refine), dtype=int))
    return Mask(fine.astype(bool), origin)


# ---------------------------------------------------------------------------
# balls and rearrangement
# ---------------------------------------------------------------------------

def _disk_radii(h: float, max_count: int):
    """Sorted distinct node distances of the centred cell lattice and the
    node count strictly inside each next radius."""
    m = int(math.ceil(math.sqrt(max_count / math.pi))) + 3
    k = np.arange(-m, m) + 0.5
    d2 = (k[:, None] ** 2 + k[None, :] ** 2).ravel()
    uniq, counts = np.unique(d2, return_counts=True)
    cum = np.cumsum(counts)  # nodes with d2 <= uniq[i]
    # keep only shells fully inside the enumerated square
    keep = uniq < (m - 0.5) ** 2
    return np.sqrt(uniq[keep]) * h, cum[keep]


def ball_of_same_volume(d: DiscreteDomain, h: float | None = None,
                        center=None, min_nodes: int | None = None) -> DiscreteDomain:
    """Ball (interval in 1D, disk in 2D) whose discrete volume best matches ``d``.

    In 2D the disk node count moves in symmetric shells of 4 or 8 nodes, so
    the match is to within half a shell. The smallest non-empty disk is
    returned when ``d`` is smaller than one shell. With ``min_nodes`` the
    smallest ball holding at least that many nodes is returned instead.
    """
    h = d.h if h is None else h
    target = d.volume / h ** d.dim
    if d.dim == 1:
        n = max(int(round(target)), 1, min_nodes or 0)
        c = 0.0 if center is None else float(np.ravel(center)[0])
        half = 0.5 * (n + 1) * h
        return build(Interval(c - half, c + half), h)
    c = (0.0, 0.0) if center is None else tuple(np.ravel(center))
    radii, counts = _disk_radii(h, max(int(target), min_nodes or 0) + 64)
    # discrete volume is monotone in the radius: bisect on it
    k = int(np.searchsorted(counts, target))
    k = min(k, len(counts) - 1)
    if k > 0 and abs(counts[k - 1] - target) <= abs(counts[k] - target):
        k -= 1
    if min_nodes is not None and counts[k] < min_nodes:
        k = int(np.searchsorted(counts, min_nodes))
    r_next = radii[k + 1] if k + 1 < len(radii) else radii[k] + h
    r = 0.5 * (radii[k] + r_next)
    return build(Disk(c, r), h)


def _center_order(ball: DiscreteDomain) -> np.ndarray:
    rel = (ball.nodes - ball.center) / ball.h
    d2 = np.round(np.sum(rel ** 2, axis=1), 9)
    return np.argsort(d2, kind="stable")


def schwarz_rearrange(d: DiscreteDomain, u, ball: DiscreteDomain) -> np.ndarray:
    """Symmetric decreasing rearrangement of ``|u|`` onto ``ball``.

    Values of ``|u|`` are sorted decreasingly and written to the ball nodes
    in order of distance from the centre (ties in node order). Returns the
    node values on ``ball``; extra ball nodes get zero.
    """
    vals = np.sort(np.abs(np.asarray(u, dtype=float)))[::-1]
    if vals.size != d.n:
        raise ValueError(f"u has {vals.size} values, domain has {d.n} nodes")
    if vals.size > ball.n:
        if np.any(vals[ball.n:] != 0):
            raise ValueError("target ball has too few nodes for the support of u")
        vals = vals[: ball.n]
    out = np.zeros(ball.n)
    out[_center_order(ball)[: vals.size]] = vals
    return out
