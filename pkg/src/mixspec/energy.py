"""Discrete energies, their derivatives, and pointwise inequalities.

Every part of the discrete seminorm is a sum of ``coef * |D u|^p`` over a
family of linear "differences" ``D``:

* interior pairs ``u_i - u_j`` with weight ``W_ij`` (ordered pairs, so each
  unordered pair counts twice, as in the double integral);
* exterior pairs ``u_i - 0`` with weight ``2 d_i``;
* lattice faces ``(u_j - u_i) / h`` with weight ``a1 h^N`` (zero outside);
* point values ``u_i`` with weight ``a0 h^N``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp

from .domain import DiscreteDomain
from .kernel import AssembledOperator, normalizing_constant, sphere_measure
from .measure import SpectralMeasure, integrate


class ZeroFunctionError(ValueError):
    pass


class TailDivergenceError(ValueError):
    pass


@dataclass
class GridFunction:
    """Node values on a domain; zero everywhere off the interior nodes."""

    values: np.ndarray
    domain: DiscreteDomain

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.domain.n,):
            raise ValueError(f"expected {self.domain.n} values, got {self.values.shape}")

    def to_csv(self, path) -> None:
        cols = [f"x{k}" for k in range(self.domain.dim)] if self.domain.dim > 1 else ["x"]
        if self.domain.dim == 2:
            cols = ["x", "y"]
        data = np.c_[self.domain.nodes, self.values]
        np.savetxt(path, data, delimiter=",", header=",".join(cols + ["value"]),
                   comments="", fmt="%.17g")


def values(u, n: int | None = None) -> np.ndarray:
    arr = np.asarray(u.values if isinstance(u, GridFunction) else u, dtype=float)
    if n is not None and arr.shape != (n,):
        raise ValueError(f"dimension mismatch: expected {n} node values, got {arr.shape}")
    return arr


def phi(t, p):
    """``|t|^{p-2} t`` with the value 0 at 0."""
    return np.sign(t) * np.abs(t) ** (p - 1)


def face_differences(domain: DiscreteDomain, u: np.ndarray) -> np.ndarray:
    i, j = domain.faces.T
    uj = np.where(j >= 0, u[np.maximum(j, 0)], 0.0)
    return (uj - u[i]) / domain.h


def lp_norm_p(domain: DiscreteDomain, u, p: float) -> float:
    """``sum |u_i|^p h^N``."""
    return float(np.sum(np.abs(values(u, domain.n)) ** p) * domain.cell_volume)


def gradient_energy(domain: DiscreteDomain, u, p: float) -> float:
    """Discrete ``int |grad u|^p``: face differences, exterior value 0."""
    return float(np.sum(np.abs(face_differences(domain, values(u, domain.n))) ** p)
                 * domain.cell_volume)


def kernel_energy(W, u: np.ndarray, p: float) -> float:
    if W is None:
        return 0.0
    D = u[:, None] - u[None, :]
    return float(np.sum(W * np.abs(D) ** p))


def exterior_energy(d: np.ndarray, u: np.ndarray, p: float) -> float:
    return float(np.sum(2.0 * d * np.abs(u) ** p))


def seminorm_p(op: AssembledOperator, u, sign: str = "plus") -> float:
    """Discrete ``int [u]_{s,p}^p dmu_sign(s)``."""
    u = values(u, op.n)
    W, d, a0, a1 = op.part(sign)
    total = kernel_energy(W, u, op.p) + exterior_energy(d, u, op.p)
    if a1:
        total += a1 * gradient_energy(op.domain, u, op.p)
    if a0:
        total += a0 * lp_norm_p(op.domain, u, op.p)
    return total


@dataclass
class EnergyBreakdown:
    """Raw seminorm pieces; ``signed_total`` carries the ``1/p`` factor."""

    plus_kernel: float
    minus_kernel: float
    plus_exterior: float
    minus_exterior: float
    grad_term: float
    mass_term: float
    total_plus: float
    total_minus: float
    signed_total: float

    def to_dict(self) -> dict:
        return asdict(self)


def signed_energy(op: AssembledOperator, u) -> EnergyBreakdown:
    u = values(u, op.n)
    p = op.p
    grad = gradient_energy(op.domain, u, p)
    mass = lp_norm_p(op.domain, u, p)
    pk, mk = kernel_energy(op.W_plus, u, p), kernel_energy(op.W_minus, u, p)
    pe, me = exterior_energy(op.d_plus, u, p), exterior_energy(op.d_minus, u, p)
    tp = pk + pe + op.a1_plus * grad + op.a0_plus * mass
    tm = mk + me + op.a1_minus * grad + op.a0_minus * mass
    return EnergyBreakdown(pk, mk, pe, me, grad, mass, tp, tm, (tp - tm) / p)


def _gradient_part(op: AssembledOperator, u: np.ndarray, sign: str) -> np.ndarray:
    """Vector ``g`` with ``g @ v = <J'_sign(u), v>``."""
    p = op.p
    W, d, a0, a1 = op.part(sign)
    g = 2.0 * d * phi(u, p)
    if W is not None:
        g += 2.0 * np.sum(W * phi(u[:, None] - u[None, :], p), axis=1)
    dom = op.domain
    if a1:
        flux = phi(face_differences(dom, u), p) * (a1 * dom.cell_volume / dom.h)
        i, j = dom.faces.T
        np.add.at(g, i, -flux)
        inner = j >= 0
        np.add.at(g, j[inner], flux[inner])
    if a0:
        g += a0 * dom.cell_volume * phi(u, p)
    return g


def gradient(op: AssembledOperator, u, sign: str | None = None) -> np.ndarray:
    """Pairings ``<J'_p(u), e_i>`` against the coordinate basis.

    ``sign=None`` gives the signed functional (plus minus minus).
    """
    u = values(u, op.n)
    if sign is not None:
        return _gradient_part(op, u, sign)
    g = _gradient_part(op, u, "plus")
    if op.signed:
        g -= _gradient_part(op, u, "minus")
    return g


def derivative_pairing(op: AssembledOperator, u, v) -> float:
    return float(gradient(op, u) @ values(v, op.n))


def rayleigh(op: AssembledOperator, u) -> float:
    """``(int [u]^p dmu+ - int [u]^p dmu-) / ||u||_p^p``."""
    u = values(u, op.n)
    den = lp_norm_p(op.domain, u, op.p)
    if den == 0:
        raise ZeroFunctionError("Rayleigh quotient of the zero function")
    e = signed_energy(op, u)
    return op.p * e.signed_total / den


def mass_vector(op: AssembledOperator, u) -> np.ndarray:
    """``phi(u_i) h^N``: pairing of ``|u|^{p-2} u`` with the coordinate basis."""
    return phi(values(u, op.n), op.p) * op.domain.cell_volume


def el_residual(op: AssembledOperator, u, lam: float) -> np.ndarray:
    """Pointwise residual ``(L u - lam |u|^{p-2} u)(x_i)``."""
    return (gradient(op, u) - lam * mass_vector(op, u)) / op.domain.cell_volume


def _weights(t, p, eps):
    if p == 2:
        return np.ones_like(t)
    return (t * t + eps * eps) ** ((p - 2) / 2.0)


def hessian(op: AssembledOperator, u=None, sign: str = "plus", eps: float = 0.0):
    """Hessian of ``(1/p) int [u]^p dmu_sign`` at ``u``.

    For ``p != 2`` the weights ``|t|^{p-2}`` are regularized to
    ``(t^2 + eps^2)^{(p-2)/2}``. Returns a dense array when the part has a
    pairwise kernel, a sparse CSC matrix otherwise. At ``p = 2`` the result
    does not depend on ``u``.
    """
    p = op.p
    n = op.n
    dom = op.domain
    u = np.zeros(n) if u is None else values(u, n)
    W, d, a0, a1 = op.part(sign)
    diag = 2.0 * d * _weights(u, p, eps)
    if a0:
        diag = diag + a0 * dom.cell_volume * _weights(u, p, eps)
    if W is not None:
        if p != 2:
            D = u[:, None] - u[None, :]
            np.fill_diagonal(D, 1.0)
            w = W * _weights(D, p, eps)
        else:
            w = W
        H = -2.0 * w
        H[np.diag_indices(n)] += 2.0 * w.sum(axis=1) + diag
    else:
        H = sp.diags(diag, format="csc", shape=(n, n))
    if a1:
        i, j = dom.faces.T
        c = a1 * dom.cell_volume / dom.h ** 2 * _weights(face_differences(dom, u), p, eps)
        inner = j >= 0
        rows = np.r_[i, j[inner], i[inner], j[inner]]
        cols = np.r_[i, j[inner], j[inner], i[inner]]
        vals = np.r_[c, c[inner], -c[inner], -c[inner]]
        L = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsc()
        H = H + L.toarray() if isinstance(H, np.ndarray) else (H + L).tocsc()
    return (p - 1) * H


def quadratic_form_matrix(op: AssembledOperator) -> np.ndarray:
    """Symmetric ``A`` with ``u^T A u = p J_2(u)`` (requires ``p = 2``)."""
    if op.p != 2:
        raise ValueError("the quadratic form exists only for p = 2")

    def dense(M):
        return M.toarray() if sp.issparse(M) else M

    A = dense(hessian(op, sign="plus"))
    if op.signed:
        A = A - dense(hessian(op, sign="minus"))
    return A


# ---------------------------------------------------------------------------
# nonlocal tail
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeForm:
    """One sign of the energy as a weighted sum over node pairs.

    ``S(u) = sum_e c_e |u[i_e] - u[j_e]|^p`` where ``j_e = -1`` stands for
    the exterior value 0. Kernel pairs, exterior coefficients, gradient faces
    and the mass term all become edges; ``kind`` tags them with
    ``"kernel"``, ``"exterior"``, ``"face"`` or ``"mass"``.
    """

    i: np.ndarray
    j: np.ndarray
    c: np.ndarray
    kind: np.ndarray
    p: float
    n: int

    @classmethod
    def from_operator(cls, op: AssembledOperator, sign: str = "plus") -> "EdgeForm":
        W, d, a0, a1 = op.part(sign)
        dom, p, n = op.domain, op.p, op.n
        I, J, C, K = [], [], [], []

        def push(i, j, c, kind):
            keep = c != 0
            I.append(np.asarray(i)[keep])
            J.append(np.asarray(j)[keep])
            C.append(np.asarray(c, dtype=float)[keep])
            K.append(np.full(int(keep.sum()), kind))

        if W is not None:
            iu, ju = np.triu_indices(n, 1)
            push(iu, ju, 2.0 * W[iu, ju], "kernel")
        push(np.arange(n), np.full(n, -1), 2.0 * d, "exterior")
        if a1:
            fi, fj = dom.faces.T
            push(fi, fj, np.full(len(fi), a1 * dom.cell_volume / dom.h ** p), "face")
        if a0:
            push(np.arange(n), np.full(n, -1), np.full(n, a0 * dom.cell_volume), "mass")
        return cls(np.concatenate(I), np.concatenate(J), np.concatenate(C),
                   np.concatenate(K), p, n)

    def differences(self, u) -> np.ndarray:
        u = values(u, self.n)
        return u[self.i] - np.where(self.j >= 0, u[np.maximum(self.j, 0)], 0.0)

    def energy(self, u) -> float:
        return float(self.c @ np.abs(self.differences(u)) ** self.p)

    def gradient(self, u) -> np.ndarray:
        """Gradient of ``S / p``."""
        flux = self.c * phi(self.differences(u), self.p)
        g = np.bincount(self.i, flux, minlength=self.n)
        inner = self.j >= 0
        g -= np.bincount(self.j[inner], flux[inner], minlength=self.n)
        return g

    def hessian(self, u, eps: float = 0.0) -> np.ndarray:
        """Dense Hessian of ``S / p`` (weights regularized as in :func:`hessian`)."""
        w = (self.p - 1) * self.c * _weights(self.differences(u), self.p, eps)
        H = np.zeros((self.n, self.n))
        np.add.at(H, (self.i, self.i), w)
        inner = self.j >= 0
        ji, ii, wi = self.j[inner], self.i[inner], w[inner]
        np.add.at(H, (ji, ji), wi)
        np.add.at(H, (ii, ji), -wi)
        np.add.at(H, (ji, ii), -wi)
        return H


@dataclass
class ExteriorFunction:
    """Function on R^N given by cell values on a box and a power law beyond.

    ``values[k]`` is the value on the cell centred at ``origin + (k + 1/2) h``
    (index order x, y). Outside the box
    ``|v(x)| = far_value * |x - far_center|^{-decay}``.
    """

    origin: np.ndarray
    h: float
    values: np.ndarray
    far_value: float = 0.0
    decay: float = 0.0
    far_center: np.ndarray | None = None

    def __post_init__(self):
        self.origin = np.atleast_1d(np.asarray(self.origin, dtype=float))
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != self.origin.size:
            self.values = self.values.reshape((-1,) + (1,) * (self.origin.size - 1))
        fc = self.origin + 0.5 * self.h * np.array(self.values.shape) if self.far_center is None else self.far_center
        self.far_center = np.atleast_1d(np.asarray(fc, dtype=float))

    @classmethod
    def constant(cls, N: int, value: float) -> "ExteriorFunction":
        return cls(np.zeros(N), 1.0, np.zeros((0,) * N), far_value=value, decay=0.0,
                   far_center=np.zeros(N))

    @classmethod
    def from_domain(cls, domain: DiscreteDomain, u) -> "ExteriorFunction":
        """Piecewise-constant extension of node values (zero outside)."""
        u = values(u, domain.n)
        lo = domain.index.min(axis=0)
        shape = domain.index.max(axis=0) - lo + 1
        grid = np.zeros(shape)
        grid[tuple((domain.index - lo).T)] = u
        origin = domain.origin + (lo - 0.5) * domain.h
        return cls(origin, domain.h, grid, 0.0, 0.0)

    @property
    def dim(self) -> int:
        return self.origin.size

    @property
    def box_diam(self) -> float:
        return float(self.h * np.linalg.norm(self.values.shape))

    def abs_eval(self, x: np.ndarray) -> np.ndarray:
        """``|v|`` at points ``x`` of shape ``(..., N)``."""
        x = np.asarray(x, dtype=float)
        k = np.floor((x - self.origin) / self.h).astype(np.int64)
        shape = np.array(self.values.shape)
        inside = np.all((k >= 0) & (k < shape), axis=-1)
        out = np.empty(x.shape[:-1])
        if self.values.size:
            out[inside] = np.abs(self.values[tuple(k[inside].T)])
        far = ~inside
        if np.any(far):
            if self.far_value == 0:
                out[far] = 0.0
            else:
                r = np.linalg.norm(x[far] - self.far_center, axis=-1)
                out[far] = abs(self.far_value) * r ** (-self.decay)
        return out


def nonlocal_tail(domain: DiscreteDomain | None, m: SpectralMeasure, p: float, v,
                  x0, R: float, include_constant: bool = True,
                  panels: int = 400, nodes_per_panel: int = 8, n_angles: int = 256,
                  quad_order: int = 16) -> float:
    """Weighted far-field size of ``v`` outside ``B_R(x0)``.

    ``[ int_(0,1) R^{sp} c(N,p,s) int_{|x-x0|>R} |v|^{p-1} |x-x0|^{-N-ps} dx dmu+(s) ]^{1/(p-1)}``

    The inner integral is done in polar coordinates about ``x0``: composite
    Gauss-Legendre in ``log r`` up to ``R_out``, then the exact power-law
    remainder. ``include_constant=False`` drops ``c(N, p, s)``.
    ``v`` is an :class:`ExteriorFunction` or node values on ``domain``.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    if not isinstance(v, ExteriorFunction):
        v = ExteriorFunction.from_domain(domain, v)
    N = v.dim
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    mu = m.open_part(clip=None)
    if not (mu.plus_atoms or mu.plus_pieces):
        return 0.0
    decay_exp = v.decay * (p - 1)
    s_min = min([s for s, _ in mu.plus_atoms] + [a for a, _, _ in mu.plus_pieces])
    if v.far_value != 0 and p * s_min + decay_exp <= 0:
        raise TailDivergenceError("declared decay makes the tail integral infinite")

    box_center = v.origin + 0.5 * v.h * np.array(v.values.shape)
    reach = v.box_diam + np.linalg.norm(x0 - box_center) + np.linalg.norm(x0 - v.far_center)
    r_out = 8.0 * (reach + R)

    # radial nodes: panels uniform in log r on [R, r_out]
    edges = np.exp(np.linspace(math.log(R), math.log(r_out), panels + 1))
    xg, wg = np.polynomial.legendre.leggauss(nodes_per_panel)
    a, b = edges[:-1, None], edges[1:, None]
    r = (0.5 * (a + b) + 0.5 * (b - a) * xg).ravel()
    wr = (0.5 * (b - a) * wg).ravel()

    if N == 1:
        dirs = np.array([[1.0], [-1.0]])
        wdir = np.array([1.0, 1.0])
    elif N == 2:
        th = 2 * math.pi * (np.arange(n_angles) + 0.5) / n_angles
        dirs = np.c_[np.cos(th), np.sin(th)]
        wdir = np.full(n_angles, 2 * math.pi / n_angles)
    else:
        raise ValueError("only N = 1, 2 are supported")
    pts = x0 + r[:, None, None] * dirs[None, :, :]
    ang = (v.abs_eval(pts) ** (p - 1)) @ wdir          # int over the sphere
    far_amp = abs(v.far_value) ** (p - 1)

    def integrand(s):
        ps = p * s
        inner = float(np.sum(wr * ang * r ** (-1.0 - ps)))
        if far_amp:
            inner += sphere_measure(N) * far_amp * r_out ** (-ps - decay_exp) / (ps + decay_exp)
        c = normalizing_constant(N, p, s) if include_constant else 1.0
        return c * R ** ps * inner

    total = integrate(mu, "plus", integrand, quad_order)
    return float(total) ** (1.0 / (p - 1))


# ---------------------------------------------------------------------------
# pointwise inequalities
# ---------------------------------------------------------------------------

def simon_constant(p: float) -> float:
    """Constant used in :func:`simon_gap`: ``2^{2-p}`` for ``p >= 2``, ``p - 1`` below."""
    return 2.0 ** (2.0 - p) if p >= 2 else p - 1.0


def simon_gap(t1, t2, p: float):
    """Slack in the monotonicity inequality for ``t -> |t|^{p-2} t``.

    Vectors are taken along the last axis. Returns
    ``<phi(t1) - phi(t2), t1 - t2> - C |t1 - t2|^p`` for ``p >= 2`` and
    ``... - C |t1 - t2|^2 / (|t1| + |t2|)^{2-p}`` for ``p < 2``.
    """
    t1 = np.atleast_1d(np.asarray(t1, dtype=float))
    t2 = np.atleast_1d(np.asarray(t2, dtype=float))
    n1 = np.linalg.norm(t1, axis=-1)
    n2 = np.linalg.norm(t2, axis=-1)

    def vphi(t, nt):
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(nt > 0, nt ** (p - 2), 0.0)
        return t * scale[..., None]

    diff = t1 - t2
    nd2 = np.sum(diff * diff, axis=-1)  # same sum as lhs, so p = 2 cancels exactly
    lhs = np.sum((vphi(t1, n1) - vphi(t2, n2)) * diff, axis=-1)
    C = simon_constant(p)
    if p >= 2:
        rhs = C * nd2 ** (p / 2.0)
    else:
        tot = n1 + n2
        with np.errstate(divide="ignore", invalid="ignore"):
            rhs = np.where(tot > 0, C * nd2 / tot ** (2 - p), 0.0)
    return lhs - rhs


def convexity_gap(U, V, t, p: float):
    """``g(1) - g(t)`` with ``g(t) = |U - tV|^p + |U-V|^{p-2}(U-V) V |t|^p``.

    Requires ``U V <= 0``; the result is then nonnegative.
    """
    U, V, t = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (U, V, t)))
    if np.any(U * V > 0):
        raise ValueError("convexity_gap requires U * V <= 0")
    k = phi(U - V, p) * V

    def g(tt):
        return np.abs(U - tt * V) ** p + k * np.abs(tt) ** p

    out = g(np.ones_like(t)) - g(t)
    return out if out.ndim else float(out)
