"""Maximum principles, nodal sets and a search for positivity failures."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .energy import (GridFunction, ZeroFunctionError, gradient, hessian, quadratic_form_matrix,
                     signed_energy, values)
from .kernel import AssembledOperator
from .solver import EPS, ConvergenceError, NonCoerciveError, FixedSignError, _effective_tol

VIOLATION_TOL = 1e-9


def _require_unsigned(op: AssembledOperator) -> None:
    if op.signed:
        raise ValueError("this operation needs a nonnegative measure (mu_minus = 0)")


def _solve_matrix(H, b):
    if sp.issparse(H):
        return spla.spsolve(sp.csc_matrix(H), b)
    return sla.solve(H, b, assume_a="sym")


def _objective(op, u, f_h):
    return signed_energy(op, u).signed_total - float(f_h @ u)


def _full_hessian(op, u, eps):
    H = hessian(op, u, sign="plus", eps=eps)
    if op.signed:
        Hm = hessian(op, u, sign="minus", eps=eps)
        if sp.issparse(H) and sp.issparse(Hm):
            H = H - Hm
        else:
            H = (H.toarray() if sp.issparse(H) else H) - (Hm.toarray() if sp.issparse(Hm) else Hm)
    return H


def _minimize_source(op: AssembledOperator, f, tol: float, max_iter: int) -> np.ndarray:
    """Minimize ``J(u) - sum f_i u_i h^N`` by damped (IRLS for ``p < 2``) Newton."""
    p, hN = op.p, op.domain.cell_volume
    f = values(f, op.n)
    f_h = f * hN
    if not np.any(f):
        return np.zeros(op.n)
    if p == 2:
        return np.asarray(_solve_matrix(_full_hessian(op, None, 0.0), f_h), dtype=float)

    # strictly convex objective: any start works
    u = np.full(op.n, 1.0)
    scale_f = np.max(np.abs(f))
    eff = _effective_tol(p, tol)
    stall = 0
    obj = _objective(op, u, f_h)
    for _ in range(max_iter):
        g = gradient(op, u) - f_h
        res = np.max(np.abs(g)) / hN / scale_f
        if res <= tol:
            return u
        umax = np.max(np.abs(u))
        if p < 2:
            H = _full_hessian(op, u, EPS * umax) / (p - 1)
        else:
            H = _full_hessian(op, u, 1e-8 * umax)
        step = -np.asarray(_solve_matrix(H, g), dtype=float)
        slope = float(g @ step)
        if slope >= 0:
            step, slope = -g, -float(g @ g)
        t = 1.0
        while t > 1e-12:
            cand = u + t * step
            obj_c = _objective(op, cand, f_h)
            if obj_c <= obj + 1e-4 * t * slope + 64 * EPS * abs(obj):
                break
            t *= 0.5
        stall = stall + 1 if abs(obj_c - obj) <= 4 * EPS * abs(obj) else 0
        u, obj = cand, obj_c
        if stall > 10:
            break
    g = gradient(op, u) - f_h
    res = np.max(np.abs(g)) / hN / scale_f
    if res <= eff:
        return u
    raise ConvergenceError(f"source problem did not converge (residual {res:.3g})")


def solve_source(op: AssembledOperator, f, tol: float = 1e-10, max_iter: int = 500) -> GridFunction:
    """Minimizer of ``(1/p) int [u]^p dmu - int f u``, i.e. the solution of
    ``L u = f`` with zero exterior data. Residuals are measured pointwise
    relative to ``max |f|``."""
    _require_unsigned(op)
    return GridFunction(_minimize_source(op, f, tol, max_iter), op.domain)


@dataclass
class SupersolutionCertificate:
    u: GridFunction
    pairing_minima: float
    min_value: float
    positivity: bool | None
    tol: float = VIOLATION_TOL

    @property
    def is_supersolution(self) -> bool:
        return self.pairing_minima >= -self.tol

    def to_dict(self) -> dict:
        return {"pairing_minima": self.pairing_minima, "min_value": self.min_value,
                "supersolution": self.is_supersolution, "positivity": self.positivity}


def check_weak_max(op: AssembledOperator, u, tol: float = VIOLATION_TOL) -> SupersolutionCertificate:
    """Test ``L u >= 0`` against every coordinate vector, then ``u >= 0``.

    Pairings are divided by ``h^N`` so they read as pointwise values of
    ``L u``. ``positivity`` is ``None`` when ``u`` is not a supersolution.
    """
    _require_unsigned(op)
    uv = values(u, op.n)
    pairing = float(np.min(gradient(op, uv, "plus")) / op.domain.cell_volume)
    min_value = float(np.min(uv))
    positivity = (min_value >= -tol) if pairing >= -tol else None
    gf = u if isinstance(u, GridFunction) else GridFunction(uv, op.domain)
    return SupersolutionCertificate(gf, pairing, min_value, positivity, tol)


@dataclass
class StrongMinReport:
    min_value: float
    below: list
    threshold: float

    @property
    def passed(self) -> bool:
        return not self.below

    def to_dict(self) -> dict:
        return {"min_value": self.min_value, "below": self.below,
                "threshold": self.threshold, "passed": self.passed}


def strong_min_audit(op: AssembledOperator, u, threshold: float = 0.0,
                     tol: float = VIOLATION_TOL) -> StrongMinReport:
    uv = values(u, op.n)
    if not np.any(uv):
        raise ZeroFunctionError("the audit needs a nonzero supersolution")
    cert = check_weak_max(op, uv, tol)
    if not cert.is_supersolution:
        raise ValueError(f"u is not a supersolution (min pairing {cert.pairing_minima:.3g})")
    below = [int(i) for i in np.flatnonzero(uv <= threshold)]
    return StrongMinReport(float(uv.min()), below, threshold)


@dataclass
class NodalReport:
    lam: float
    vol_plus: float
    vol_minus: float
    product_plus: float
    product_minus: float

    @property
    def bound_ratio(self) -> float:
        return min(self.product_plus, self.product_minus)

    def as_tuple(self):
        return self.vol_plus, self.vol_minus, self.bound_ratio

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "vol_plus": self.vol_plus, "vol_minus": self.vol_minus,
                "product_plus": self.product_plus, "product_minus": self.product_minus}


def nodal_measure_bound(op: AssembledOperator, eig, s_sharp: float, N: int | None = None,
                        p: float | None = None) -> NodalReport:
    """Nodal volumes ``h^N #{+-u > 0}`` and ``lambda |Omega_+-|^{p s#/N}``."""
    lam, u = eig
    uv = values(u, op.n)
    N = op.domain.dim if N is None else N
    p = op.p if p is None else p
    hN = op.domain.cell_volume
    vp, vm = hN * np.count_nonzero(uv > 0), hN * np.count_nonzero(uv < 0)
    if vp == 0 or vm == 0:
        raise FixedSignError("nodal bounds need a sign-changing function")
    e = p * s_sharp / N
    return NodalReport(float(lam), float(vp), float(vm), float(lam * vp ** e), float(lam * vm ** e))


# ---------------------------------------------------------------------------
# signed measures
# ---------------------------------------------------------------------------

@dataclass
class MPCandidate:
    trial: int
    f: np.ndarray
    u: np.ndarray
    min_value: float
    violation: float
    node: int
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"trial": self.trial, "min_value": self.min_value, "violation": self.violation,
                "node": self.node, "notes": self.notes}


def signed_coercivity(op: AssembledOperator) -> float:
    """Smallest value of the signed Rayleigh quotient (p = 2: exact; otherwise
    from the first-eigenvalue solver)."""
    if op.p == 2:
        A = quadratic_form_matrix(op)
        return float(sla.eigvalsh(A / op.domain.cell_volume, subset_by_index=[0, 0])[0])
    from .solver import eig1
    return eig1(op, tol=1e-8, n_restarts=2).lam


def random_sources(n: int, trials: int, seed: int):
    """Nonnegative, nonzero sources: dense uniform, sparse and single-node."""
    for k in range(trials):
        rng = np.random.default_rng([seed, k])
        kind = k % 3
        if kind == 0:
            f = rng.uniform(0.0, 1.0, n)
        elif kind == 1:
            f = np.where(rng.uniform(size=n) < 0.1, rng.uniform(0.0, 1.0, n), 0.0)
        else:
            f = np.zeros(n)
        if not np.any(f):
            f[rng.integers(n)] = 1.0
        yield k, f


def signed_mp_failure_search(op: AssembledOperator, trials: int = 100, seed: int = 0,
                             tol: float = VIOLATION_TOL):
    """Look for a nonnegative source whose solution has a negative node.

    Returns the candidate with the largest ``-min(u) / max|u|`` above
    ``tol``, or ``None``. A non-coercive signed energy is recorded in the
    candidate notes; for ``p != 2`` it ends the search with a warning since
    the energy then has no minimizer.
    """
    if trials <= 0:
        return None
    notes = []
    lam1 = None
    try:
        lam1 = signed_coercivity(op)
    except NonCoerciveError:
        lam1 = -math.inf
    if lam1 <= 0:
        notes.append(f"signed energy is not coercive (lowest quotient {lam1:.6g})")
        if op.p != 2:
            # no minimizer exists; nothing to search
            warnings.warn(notes[-1], stacklevel=2)
            return None
    best = None
    for k, f in random_sources(op.n, trials, seed):
        if op.p == 2:
            u = np.asarray(_solve_matrix(_full_hessian(op, None, 0.0), f * op.domain.cell_volume))
        else:
            u = _minimize_source(op, f, 1e-10, 500)
        scale = np.max(np.abs(u))
        if scale == 0:
            continue
        i = int(np.argmin(u))
        v = -u[i] / scale
        if v > tol and (best is None or v > best.violation):
            best = MPCandidate(k, f, u, float(u[i]), float(v), i, list(notes))
    return best
