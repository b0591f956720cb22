"""Discrete coefficients of the superposition operator.

The Gagliardo double integral is replaced by a node-to-node (midpoint) sum on
the lattice. For every interior pair ``i != j``

    W_ij = h^{2N} * int_{(0,1)} c(N, p, s) |x_i - x_j|^{-(N+ps)} dmu(s)

and for every interior node the pairs ``(x_i, y)`` with ``y`` outside the
domain are folded into

    d_i = h^N * int_{(0,1)} c(N, p, s) * Ext_s(x_i) dmu(s)

where ``Ext_s(x_i)`` is the midpoint sum of ``|x_i - y|^{-(N+ps)}`` over all
exterior lattice cells. Atoms at ``s = 0`` and ``s = 1`` become the mass and
gradient coefficients ``a0`` and ``a1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln, zeta

from .domain import DiscreteDomain
from .measure import (DEFAULT_QUAD_ORDER, MeasureError, SpectralMeasure,
                      integrate, validate)

#: Exterior quadrature radius in units of the domain diameter.
R_OUT_FACTOR = 8.0


def normalizing_constant(N: int, p: float, s: float) -> float:
    """``c(N, p, s)`` making the seminorm interpolate between L^p and W^{1,p}."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"s={s} must lie in (0, 1)")
    log_c = (math.log(s * p / 2.0) + math.log1p(-s) + (2 * s - 1) * math.log(2.0)
             - 0.5 * (N - 1) * math.log(math.pi)
             + gammaln((N + p * s) / 2.0) - gammaln((p + 1) / 2.0) - gammaln(2.0 - s))
    return math.exp(log_c)


def sphere_measure(N: int) -> float:
    """Surface measure of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def lattice_zeta(N: int, sigma: float) -> float:
    """``sum over k in Z^N \\ {0} of |k|^{-sigma}`` for ``sigma > N``."""
    if sigma <= N:
        raise ValueError("lattice sum diverges for sigma <= N")
    if N == 1:
        return 2.0 * float(zeta(sigma))
    if N == 2:
        z = sigma / 2.0
        beta = 4.0 ** (-z) * (float(zeta(z, 0.25)) - float(zeta(z, 0.75)))
        return 4.0 * float(zeta(z)) * beta
    raise ValueError("only N = 1, 2 are supported")


def exterior_diagonal(domain: DiscreteDomain, p: float, s: float, node: int,
                      r_out_factor: float = R_OUT_FACTOR) -> float:
    """Integral of ``|x_i - y|^{-(N+ps)}`` over the complement of the domain.

    Midpoint quadrature on the exterior lattice cells within
    ``R_out = r_out_factor * diam`` of the node, plus the exact far field
    ``|S^{N-1}| R_out^{-ps} / (ps)``.
    """
    N, h = domain.dim, domain.h
    sigma = N + p * s
    r_out = r_out_factor * domain.diam
    m = int(math.floor(r_out / h))
    k = np.arange(-m, m + 1)
    offs = np.stack(np.meshgrid(*([k] * N), indexing="ij"), axis=-1).reshape(-1, N)
    dist = h * np.sqrt(np.sum(offs.astype(float) ** 2, axis=1))
    keep = (dist <= r_out) & (dist > 0)
    offs, dist = offs[keep], dist[keep]

    lo = domain.index.min(axis=0)
    shape = domain.index.max(axis=0) - lo + 1
    occupied = np.zeros(shape, dtype=bool)
    occupied[tuple((domain.index - lo).T)] = True
    target = domain.index[node] + offs - lo
    inside_box = np.all((target >= 0) & (target < shape), axis=1)
    interior = np.zeros(len(offs), dtype=bool)
    interior[inside_box] = occupied[tuple(target[inside_box].T)]

    near = float(np.sum(h ** N * dist[~interior] ** (-sigma)))
    tail = sphere_measure(N) * r_out ** (-p * s) / (p * s)
    return near + tail


def _exterior_lattice(domain: DiscreteDomain, sigma: float, kernel_rowsum: np.ndarray):
    """Midpoint exterior sum over *all* exterior lattice cells.

    Uses ``sum_exterior = sum_lattice - sum_interior``, the lattice sum being
    an Epstein zeta value. Equivalent to :func:`exterior_diagonal` with an
    unbounded quadrature radius, at O(n) cost per node.
    """
    N, h = domain.dim, domain.h
    return h ** N * (h ** (-sigma) * lattice_zeta(N, sigma) - kernel_rowsum)


@dataclass(frozen=True, eq=False)
class AssembledOperator:
    """All coefficients of the discrete operator, split by measure sign.

    ``W_plus``/``W_minus`` are ``None`` when that part has no mass in
    ``(0, 1)``; that keeps purely local problems sparse.
    """

    p: float
    domain: DiscreteDomain
    W_plus: np.ndarray | None
    W_minus: np.ndarray | None
    d_plus: np.ndarray
    d_minus: np.ndarray
    a0_plus: float = 0.0
    a0_minus: float = 0.0
    a1_plus: float = 0.0
    a1_minus: float = 0.0
    measure: SpectralMeasure | None = None

    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def signed(self) -> bool:
        return (self.W_minus is not None or bool(np.any(self.d_minus))
                or self.a0_minus != 0 or self.a1_minus != 0)

    def part(self, sign: str):
        """``(W, d, a0, a1)`` of one sign."""
        if sign == "plus":
            return self.W_plus, self.d_plus, self.a0_plus, self.a1_plus
        if sign == "minus":
            return self.W_minus, self.d_minus, self.a0_minus, self.a1_minus
        raise ValueError(sign)

    def plus_only(self) -> "AssembledOperator":
        zero = np.zeros_like(self.d_minus)
        m = self.measure.positive_part() if self.measure is not None else None
        return replace(self, W_minus=None, d_minus=zero, a0_minus=0.0, a1_minus=0.0, measure=m)

    def shifted_mass(self, c: float) -> "AssembledOperator":
        """Operator of ``mu + c delta_0``."""
        m = self.measure.with_atom("plus", 0.0, c) if self.measure is not None else None
        return replace(self, a0_plus=self.a0_plus + c, measure=m)


def _pair_distances(domain: DiscreteDomain) -> np.ndarray:
    x = domain.nodes
    diff = x[:, None, :] - x[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(r, np.inf)
    return r


def _assemble_part(domain, open_measure, sign, p, quad_order, log_r):
    atoms, pieces = open_measure.parts(sign)
    if not atoms and not pieces:
        return None, np.zeros(domain.n)
    N, h, n = domain.dim, domain.h, domain.n

    def stacked(s):
        sigma = N + p * s
        K = np.exp(-sigma * log_r)  # zero on the diagonal (log_r = inf)
        rowsum = K.sum(axis=1)
        c = normalizing_constant(N, p, s)
        out = np.empty((n, n + 1))
        out[:, :n] = (c * h ** (2 * N)) * K
        out[:, n] = (c * h ** N) * _exterior_lattice(domain, sigma, rowsum)
        return out

    total = integrate(open_measure, sign, stacked, quad_order)
    if np.ndim(total) == 0:  # every weight was zero
        return None, np.zeros(n)
    return total[:, :n], total[:, n]


def assemble(domain: DiscreteDomain, m: SpectralMeasure, p: float,
             quad_order: int = DEFAULT_QUAD_ORDER, check: bool = True) -> AssembledOperator:
    """Assemble the discrete operator of ``m`` at exponent ``p`` on ``domain``."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    if check:
        rep = validate(m)
        if not rep.ok:
            raise MeasureError("; ".join(f"({v.code}) {v.message}" for v in rep.violations))
        for w in rep.warnings:
            warnings.warn(w, stacklevel=2)
    open_m = m.open_part()
    log_r = None
    if open_m.plus_atoms or open_m.plus_pieces or open_m.minus_atoms or open_m.minus_pieces:
        log_r = np.log(_pair_distances(domain))
    W_plus, d_plus = _assemble_part(domain, open_m, "plus", p, quad_order, log_r)
    W_minus, d_minus = _assemble_part(domain, open_m, "minus", p, quad_order, log_r)
    return AssembledOperator(
        p=float(p), domain=domain,
        W_plus=W_plus, W_minus=W_minus, d_plus=d_plus, d_minus=d_minus,
        a0_plus=m.endpoint_mass("plus", 0.0), a0_minus=m.endpoint_mass("minus", 0.0),
        a1_plus=m.endpoint_mass("plus", 1.0), a1_minus=m.endpoint_mass("minus", 1.0),
        measure=m,
    )


def add_operators(a: AssembledOperator, b: AssembledOperator) -> AssembledOperator:
    """Coefficientwise sum (same domain and ``p``)."""
    if a.domain is not b.domain and a.n != b.n:
        raise ValueError("operators live on different domains")

    def plus(x, y):
        if x is None:
            return y
        if y is None:
            return x
        return x + y

    m = a.measure + b.measure if a.measure is not None and b.measure is not None else None
    return AssembledOperator(a.p, a.domain, plus(a.W_plus, b.W_plus), plus(a.W_minus, b.W_minus),
                             a.d_plus + b.d_plus, a.d_minus + b.d_minus,
                             a.a0_plus + b.a0_plus, a.a0_minus + b.a0_minus,
                             a.a1_plus + b.a1_plus, a.a1_minus + b.a1_minus, m)
