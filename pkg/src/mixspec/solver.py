"""Eigenpairs of the discrete operator.

``eig1`` minimizes the Rayleigh quotient on the unit L^p sphere,
``eig_all_p2`` is the dense oracle for ``p = 2``, ``eig2_minimax`` runs a
string method between ``e1`` and ``-e1``, ``eig2_twoball_bound`` and
``lemma91_path`` evaluate explicit competitor paths built from the positive
and negative parts of a sign-changing function, and ``brute_force_tiny``
enumerates eigenpairs of very small problems by multi-start Newton.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .energy import (EdgeForm, GridFunction, ZeroFunctionError, el_residual, gradient, hessian,
                     lp_norm_p, mass_vector, phi, quadratic_form_matrix, rayleigh,
                     values)
from .kernel import AssembledOperator

log = logging.getLogger(__name__)

ARMIJO = 1e-4
SHRINK = 0.5
DEDUP_RTOL = 1e-8
EPS = np.finfo(float).eps
NEWTON_POLISH_MAX_N = 600


class ConvergenceError(RuntimeError):
    pass


class NonCoerciveError(RuntimeError):
    pass


class FixedSignError(ValueError):
    pass


@dataclass
class EigenResult:
    lam: float
    u: np.ndarray
    residual: float
    iterations: int
    restarts_agreeing: int = 1
    starts: list = field(default_factory=list, repr=False)

    def grid_function(self, op: AssembledOperator) -> GridFunction:
        return GridFunction(self.u, op.domain)

    def to_dict(self) -> dict:
        return {"lambda1": self.lam, "residual": self.residual,
                "iterations": self.iterations, "restarts_agreeing": self.restarts_agreeing}


@dataclass
class PathResult:
    path: list
    energies: np.ndarray
    max_energy: float
    endpoint_check: tuple
    sweeps: int
    params: np.ndarray | None = None
    info: dict = field(default_factory=dict)

    def energy_table(self) -> np.ndarray:
        t = self.params if self.params is not None else np.linspace(0, 1, len(self.path))
        return np.c_[t, self.energies]


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def normalize(op: AssembledOperator, u) -> np.ndarray:
    u = values(u, op.n)
    nrm = lp_norm_p(op.domain, u, op.p) ** (1.0 / op.p)
    if nrm == 0:
        raise ZeroFunctionError("cannot normalize the zero function")
    return u / nrm


def relative_residual(op: AssembledOperator, u, lam: float) -> float:
    """``max_i |L u - lam |u|^{p-2} u|(x_i)`` relative to ``|lam| ||u||_inf^{p-1}``."""
    u = values(u, op.n)
    r = el_residual(op, u, lam)
    scale = max(abs(lam), 1e-300) * np.max(np.abs(u)) ** (op.p - 1)
    return float(np.max(np.abs(r)) / scale)


def _metric_matrix(op: AssembledOperator, u=None):
    """Preconditioner at ``u``: the positive-part Hessian, with IRLS weights
    for ``p < 2`` and a mildly regularized Hessian for ``p > 2``."""
    if op.p == 2:
        return hessian(op, sign="plus")
    scale = np.max(np.abs(u))
    if op.p < 2:
        # secant weights |t|^{p-2}: the quadratic majorizer of |t|^p (IRLS).
        # eps only guards exact ties; a larger eps undershoots the weight
        # of nearly equal pairs and the step then oscillates on them
        return hessian(op, u, sign="plus", eps=EPS * scale) / (op.p - 1)
    return hessian(op, u, sign="plus", eps=1e-2 * scale)


class _Metric:
    """Factored preconditioner for descent steps, refactored when ``p != 2``."""

    def __init__(self, op: AssembledOperator):
        self.op = op
        self._fixed = None
        if op.p == 2:
            self._fixed = self._factor(_metric_matrix(op))

    @staticmethod
    def _factor(H):
        if sp.issparse(H):
            lu = spla.splu(sp.csc_matrix(H))
            return lu.solve
        cf = sla.cho_factor(H, check_finite=False)
        return lambda b: sla.cho_solve(cf, b, check_finite=False)

    def solver_at(self, u):
        if self._fixed is not None:
            return self._fixed
        return self._factor(_metric_matrix(self.op, u))


def _effective_tol(p: float, tol: float) -> float:
    # phi is only (p-1)-Hoelder for p < 2, so round-off in nearly equal pairs
    # leaves a residual floor; accepted only once lambda has stagnated
    return tol if p >= 2 else max(tol, tol ** (p - 1))


def _descend(op: AssembledOperator, u0, tol: float, max_iter: int, metric: _Metric):
    """Preconditioned projected gradient with Armijo backtracking."""
    p = op.p
    u = normalize(op, u0)
    lam = rayleigh(op, u)
    eff = _effective_tol(p, tol)
    stall = 0
    for it in range(1, max_iter + 1):
        if lam < 0:
            raise NonCoerciveError(f"Rayleigh quotient reached {lam:.6g} < 0")
        r = gradient(op, u) - lam * mass_vector(op, u)
        res = relative_residual(op, u, lam)
        if res <= tol:
            return u, lam, res, it
        d = -metric.solver_at(u)(r)
        slope = p * float(r @ d)
        alpha = 1.0
        while True:
            cand = normalize(op, u + alpha * d)
            lam_c = rayleigh(op, cand)
            # round-off allowance: near convergence the decrease is below eps*lam
            if lam_c <= lam + ARMIJO * alpha * slope + 64 * EPS * abs(lam):
                break
            alpha *= SHRINK
            if alpha < 1e-14:
                cand, lam_c = u, lam
                break
        # p < 2: lambda frozen to round-off means the Hoelder floor is reached
        # (for p >= 2 the vector keeps improving when the spectral gap is small)
        stall = stall + 1 if abs(lam_c - lam) <= 4 * EPS * abs(lam) else 0
        u, lam = cand, lam_c
        if p < 2 and stall > 10:
            break
    res = relative_residual(op, u, lam)
    if res <= eff:
        return u, lam, res, it
    why = "stagnated" if it < max_iter else "no convergence"
    raise ConvergenceError(f"{why} after {it} iterations (residual {res:.3g})")


def start_vectors(n: int, n_restarts: int, seed: int) -> list[np.ndarray]:
    """All-ones start followed by seeded standard-normal starts."""
    starts = [np.ones(n)]
    for k in range(n_restarts):
        rng = np.random.default_rng([seed, k])
        starts.append(rng.standard_normal(n))
    return starts


def _canonical(u: np.ndarray) -> np.ndarray:
    return u if u[np.argmax(np.abs(u))] >= 0 else -u


# ---------------------------------------------------------------------------
# first eigenvalue
# ---------------------------------------------------------------------------

def eig1(op: AssembledOperator, tol: float = 1e-9, max_iter: int = 5000,
         n_restarts: int = 8, seed: int = 0, workers: int = 1) -> EigenResult:
    """First eigenpair by Rayleigh-quotient minimization on ``||u||_p = 1``.

    Runs from the all-ones start and ``n_restarts`` seeded random starts,
    keeps the lowest value and counts the starts that reach the same ``|u|``
    (within 1e-6) and the same eigenvalue.
    """
    metric = _Metric(op)
    starts = start_vectors(op.n, n_restarts, seed)

    def run(u0):
        try:
            return _descend(op, u0, tol, max_iter, metric)
        except ConvergenceError as exc:
            return exc

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(run, starts))
    else:
        runs = [run(u0) for u0 in starts]
    done = [r for r in runs if not isinstance(r, Exception)]
    if not done:
        raise runs[0]
    best = min(done, key=lambda r: r[1])
    u_best = _canonical(best[0])
    agree = 0
    for u, lam, _, _ in done:
        same_lam = abs(lam - best[1]) <= 1e-8 * max(abs(best[1]), 1.0)
        same_u = np.max(np.abs(np.abs(u) - np.abs(u_best))) <= 1e-6 * np.max(np.abs(u_best))
        agree += bool(same_lam and same_u)
    return EigenResult(best[1], u_best, best[2], best[3], agree,
                       starts=[(lam, _canonical(u)) for u, lam, _, _ in done])


# ---------------------------------------------------------------------------
# dense p = 2 spectrum
# ---------------------------------------------------------------------------

def eig_all_p2(op: AssembledOperator):
    """All eigenpairs for ``p = 2``, ascending; vectors have unit discrete L^2 norm."""
    if op.p != 2:
        raise ValueError("eig_all_p2 requires p = 2")
    # the point-mass part is a multiple of the identity: add it after eigh
    shift = op.a0_plus - op.a0_minus
    A = quadratic_form_matrix(replace(op, a0_plus=0.0, a0_minus=0.0))
    hN = op.domain.cell_volume
    lam, vec = sla.eigh(A / hN)
    vec = vec / math.sqrt(hN)
    return [(float(l) + shift, _canonical(vec[:, k])) for k, l in enumerate(lam)]


# ---------------------------------------------------------------------------
# second eigenvalue: string method between e1 and -e1
# ---------------------------------------------------------------------------

def odd_reflection_trial(op: AssembledOperator, u1) -> np.ndarray:
    """``u1`` with its sign flipped across the mid-plane of the longest axis,
    made orthogonal to ``u1`` in the discrete L^2 pairing."""
    u1 = values(u1, op.n)
    x = op.domain.nodes
    axis = int(np.argmax(np.ptp(x, axis=0)))
    mid = 0.5 * (x[:, axis].min() + x[:, axis].max())
    sgn = np.sign(x[:, axis] - mid)
    v = u1 * sgn
    v = v - (v @ u1) / (u1 @ u1) * u1
    if not np.any(v > 0) or not np.any(v < 0):
        raise FixedSignError("odd reflection trial is not sign-changing")
    return v


def _reparametrize(points: list[np.ndarray], op: AssembledOperator) -> list[np.ndarray]:
    """Equal ambient arclength, endpoints kept, interior projected to the sphere."""
    X = np.array(points)
    seg = np.linalg.norm(np.diff(X, axis=0), axis=1)
    s = np.r_[0.0, np.cumsum(seg)]
    if s[-1] == 0:
        return points
    target = np.linspace(0.0, s[-1], len(points))
    k = np.clip(np.searchsorted(s, target, side="right") - 1, 0, len(points) - 2)
    w = ((target - s[k]) / np.where(seg[k] > 0, seg[k], 1.0))[:, None]
    Y = (1 - w) * X[k] + w * X[k + 1]
    out = [points[0]] + [normalize(op, y) for y in Y[1:-1]] + [points[-1]]
    return out


def _armijo_descent(op, u, lam, solve):
    r = gradient(op, u) - lam * mass_vector(op, u)
    d = -solve(r)
    slope = op.p * float(r @ d)
    alpha = 1.0
    while alpha >= 1e-10:
        cand = normalize(op, u + alpha * d)
        lam_c = rayleigh(op, cand)
        if lam_c <= lam + ARMIJO * alpha * slope + 64 * EPS * abs(lam):
            return cand, lam_c
        alpha *= SHRINK
    return u, lam


def _climb_direction(op, u, lam, tangent, solve, P):
    """Preconditioned descent with the tangential component reversed
    (reflection in the metric of ``P``)."""
    r = gradient(op, u) - lam * mass_vector(op, u)
    d = -solve(r)
    Pt = P @ tangent
    return d + 2.0 * float(tangent @ r) / float(tangent @ Pt) * tangent


def eig2_minimax(op: AssembledOperator, e1: EigenResult | None = None, path_points: int = 33,
                 tol: float = 1e-9, max_sweeps: int = 5000, trial=None,
                 climb_after: int = 20) -> PathResult:
    """Upper estimate of the second eigenvalue from a minimax path.

    The string starts at ``cos(theta) e1 + sin(theta) v`` for a sign-changing
    trial ``v`` and ``theta`` in ``[0, pi]``. Interior points take Armijo
    descent steps and are reparametrized by arclength. After ``climb_after``
    sweeps the highest point becomes a climbing image and converges to the
    saddle; the two halves of the string are then reparametrized separately.
    ``max_energy`` is the largest Rayleigh quotient along the sampled path.
    """
    if op.signed:
        raise ValueError("eig2_minimax is only available for nonnegative measures")
    if path_points < 5 or path_points % 2 == 0:
        raise ValueError("path_points must be odd and at least 5")
    if e1 is None:
        e1 = eig1(op, tol=tol)
    u1 = normalize(op, e1.u)
    v = odd_reflection_trial(op, u1) if trial is None else values(trial, op.n)
    v = v - (v @ u1) / (u1 @ u1) * u1
    v = normalize(op, v)

    P = _path_metric(op, u1)
    solve = _Metric._factor(P)
    theta = np.linspace(0.0, math.pi, path_points)
    path = [u1] + [normalize(op, math.cos(t) * u1 + math.sin(t) * v) for t in theta[1:-1]] + [-u1]
    energies = np.array([rayleigh(op, u) for u in path])
    eff = _effective_tol(op.p, tol)

    ci = None
    tau = 1.0
    ci_res = math.inf
    best_res = math.inf
    rejected = 0
    stall = 0
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        prev_max = energies.max()
        for k in range(1, path_points - 1):
            if k == ci:
                continue
            path[k], energies[k] = _armijo_descent(op, path[k], energies[k], solve)

        if ci is None and sweeps >= climb_after:
            ci = 1 + int(np.argmax(energies[1:-1]))
        if ci is not None:
            tangent = path[ci + 1] - path[ci - 1]
            tangent /= np.linalg.norm(tangent)
            if op.p == 2:
                Pc, solve_c = P, solve
            else:
                Pc = _metric_matrix(op, path[ci])
                solve_c = _Metric._factor(Pc)
            d = _climb_direction(op, path[ci], energies[ci], tangent, solve_c, Pc)
            cand = normalize(op, path[ci] + tau * d)
            lam_c = rayleigh(op, cand)
            res_c = relative_residual(op, cand, lam_c)
            if res_c <= ci_res or res_c <= eff:
                path[ci], energies[ci], ci_res = cand, lam_c, res_c
                tau = min(1.0, 1.25 * tau)
                rejected = 0
            else:
                tau = max(0.5 * tau, 1e-4)
                rejected += 1
            if rejected >= 50 and ci_res > eff and op.n <= NEWTON_POLISH_MAX_N:
                # the metric ignores the singular mass term near the nodal
                # set (p < 2); finish the saddle with Newton on (u, lambda)
                rejected = 0
                got = _newton_pair(op, path[ci], energies[ci])
                if got is not None:
                    u_n, lam_n = got
                    res_n = relative_residual(op, u_n, lam_n)
                    if res_n <= eff and abs(lam_n - energies[ci]) <= 0.01 * energies[ci]:
                        path[ci], energies[ci], ci_res = u_n, lam_n, res_n
            left = _reparametrize(path[:ci + 1], op)
            right = _reparametrize(path[ci:], op)
            path = left + right[1:]
        else:
            path = _reparametrize(path, op)
        energies = np.array([rayleigh(op, u) for u in path])

        if ci is not None:
            if ci_res <= eff and energies.max() <= energies[ci] * (1 + 1e-12):
                break
            stall = stall + 1 if ci_res >= best_res else 0
            best_res = min(best_res, ci_res)
            if stall > 200 and ci_res <= eff:
                break
        elif abs(energies.max() - prev_max) <= tol * abs(prev_max) and sweeps > 2:
            ci = 1 + int(np.argmax(energies[1:-1]))
    else:
        raise ConvergenceError(f"string did not converge in {max_sweeps} sweeps "
                               f"(saddle residual {ci_res:.3g})")

    ends = (bool(np.allclose(path[0], u1, atol=1e-10)), bool(np.allclose(path[-1], -u1, atol=1e-10)))
    if not all(ends):
        raise ConvergenceError("path endpoints drifted away from e1 and -e1")
    return PathResult(path=path, energies=energies, max_energy=float(energies.max()),
                      endpoint_check=ends, sweeps=sweeps,
                      params=np.linspace(0.0, 1.0, path_points),
                      info={"saddle_index": ci, "saddle_residual": ci_res})


def _path_metric(op: AssembledOperator, u1: np.ndarray):
    """Fixed preconditioner for all path points."""
    if op.p == 2:
        return hessian(op, sign="plus")
    scale = np.max(np.abs(u1))
    H = hessian(op, u1, sign="plus", eps=1e-2 * scale)
    return H / (op.p - 1) if op.p < 2 else H


# ---------------------------------------------------------------------------
# competitor paths from the positive and negative parts
# ---------------------------------------------------------------------------

def _split(op: AssembledOperator, u):
    u = values(u, op.n)
    up, um = np.maximum(u, 0.0), np.maximum(-u, 0.0)
    if not up.any() or not um.any():
        raise FixedSignError("u must take both signs")
    return u, up, um


def eig2_twoball_bound(op: AssembledOperator, u, grid: int = 721) -> float:
    """Largest Rayleigh quotient on ``span{u+, u-}``.

    Sweeps ``f = cos(w) u+ - sin(w) u-`` over a grid of ``w`` in
    ``[0, pi)`` (the other half circle gives ``-f``) and refines the best
    cell with a bounded scalar search.
    """
    from scipy.optimize import minimize_scalar

    _, up, um = _split(op, u)

    def energy(w):
        return rayleigh(op, math.cos(w) * up - math.sin(w) * um)

    ws = np.linspace(0.0, math.pi, grid, endpoint=False)
    vals = np.array([energy(w) for w in ws])
    k = int(np.argmax(vals))
    step = ws[1] - ws[0]
    res = minimize_scalar(lambda w: -energy(w), bounds=(ws[k] - step, ws[k] + step),
                          method="bounded", options={"xatol": 1e-12})
    return float(max(vals[k], -res.fun))


@dataclass
class PathHypotheses:
    """Discrete forms of the two sign conditions on ``u``.

    ``nonlocal_value = |u-|^p a + |u+|^p b`` over kernel and exterior pairs,
    ``local_value`` the same expression over gradient faces, where
    ``a = sum c_e |A-B|^{p-2}(A-B) A`` and ``b`` has ``B`` in place of the
    trailing ``A``. Both must be ``<= 0``.
    """

    nonlocal_value: float
    local_value: float
    tol: float

    @property
    def nonlocal_ok(self) -> bool:
        return self.nonlocal_value <= self.tol

    @property
    def local_ok(self) -> bool:
        return self.local_value <= self.tol

    @property
    def holds(self) -> bool:
        return self.nonlocal_ok and self.local_ok

    def to_dict(self) -> dict:
        return {"nonlocal_value": self.nonlocal_value, "local_value": self.local_value,
                "nonlocal_ok": self.nonlocal_ok, "local_ok": self.local_ok}


def path_hypotheses(op: AssembledOperator, u, tol: float = 0.0) -> PathHypotheses:
    _, up, um = _split(op, u)
    form = EdgeForm.from_operator(op, "plus")
    A, B = form.differences(up), form.differences(um)
    flux = form.c * phi(A - B, op.p)
    hN = op.domain.cell_volume
    cp, cm = np.sum(up ** op.p) * hN, np.sum(um ** op.p) * hN
    out = []
    for kinds in (("kernel", "exterior"), ("face",)):
        sel = np.isin(form.kind, kinds)
        a, b = float(flux[sel] @ A[sel]), float(flux[sel] @ B[sel])
        out.append(cm * a + cp * b)
    return PathHypotheses(out[0], out[1], tol)


def lemma91_path(op: AssembledOperator, u, samples: int = 101) -> PathResult:
    """Sample ``gamma_t = (u+ - cos(pi t) u-) / ||.||_p`` for ``t`` in ``[0, 1/2]``.

    ``info`` holds the hypothesis report for ``u`` and for ``-u``, the
    ``X_p`` norm of ``u / ||u||_p`` and ``max_t ||gamma_t||_{X_p}``. Failing
    hypotheses are reported, not raised.
    """
    if op.signed:
        raise ValueError("the path construction needs a nonnegative measure")
    u, up, um = _split(op, u)
    ts = np.linspace(0.0, 0.5, samples)
    path = [normalize(op, up - math.cos(math.pi * t) * um) for t in ts]
    path[-1] = normalize(op, up)
    energies = np.array([rayleigh(op, g) for g in path])
    norm_u = rayleigh(op, u) ** (1.0 / op.p)
    norms = np.maximum(energies, 0.0) ** (1.0 / op.p)
    hyp, neg = path_hypotheses(op, u), path_hypotheses(op, -u)
    ends = (bool(np.allclose(path[0], normalize(op, u), atol=1e-12)),
            bool(np.allclose(path[-1], normalize(op, up), atol=1e-12)))
    return PathResult(path=path, energies=energies, max_energy=float(energies.max()),
                      endpoint_check=ends, sweeps=0, params=ts,
                      info={"hypotheses": hyp, "negated_hypotheses": neg,
                            "norm_u": float(norm_u), "max_path_norm": float(norms.max()),
                            "bound_holds": bool(norms.max() <= norm_u + 1e-10)})


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

class _SignedEdges:
    """Signed energy of a small operator as plus and minus edge forms."""

    def __init__(self, op: AssembledOperator):
        self.plus = EdgeForm.from_operator(op, "plus")
        self.minus = EdgeForm.from_operator(op, "minus") if op.signed else None

    def gradient(self, u):
        g = self.plus.gradient(u)
        return g - self.minus.gradient(u) if self.minus is not None else g

    def hessian(self, u, eps):
        H = self.plus.hessian(u, eps)
        return H - self.minus.hessian(u, eps) if self.minus is not None else H


def _newton_pair(op: AssembledOperator, u, lam, max_iter: int = 100):
    """Damped Newton on ``(u, lambda)`` with the constraint ``||u||_p^p = 1``.

    Runs until the line search can no longer reduce ``|F|``, so degenerate
    (linearly convergent) solutions are still driven to round-off. For
    ``p < 2`` the Jacobian weights are regularized and ``eps`` is continued
    down to 1e-14.
    """
    p, hN, n = op.p, op.domain.cell_volume, op.n
    form = _SignedEdges(op)

    def F(u, lam):
        return np.r_[form.gradient(u) - lam * phi(u, p) * hN, np.sum(np.abs(u) ** p) * hN - 1.0]

    f = F(u, lam)
    eps_list = [0.0] if p >= 2 else [10.0 ** -k for k in range(4, 15, 2)]
    for eps_rel in eps_list:
        for _ in range(max_iter):
            fn = np.linalg.norm(f)
            eps = eps_rel * np.max(np.abs(u))
            J = np.empty((n + 1, n + 1))
            J[:n, :n] = form.hessian(u, eps) - lam * (p - 1) * np.diag(
                (u * u + eps * eps) ** ((p - 2) / 2)) * hN
            J[:n, n] = -phi(u, p) * hN
            J[n, :n] = p * phi(u, p) * hN
            J[n, n] = 0.0
            try:
                step = np.linalg.solve(J, -f)
            except np.linalg.LinAlgError:
                return None
            if not np.all(np.isfinite(step)):
                return None
            t = 1.0
            while t > 1e-6:
                cu, cl = u + t * step[:n], lam + t * step[n]
                cf = F(cu, cl)
                if np.linalg.norm(cf) <= (1 - 1e-4 * t) * fn:
                    break
                t *= 0.5
            else:
                break
            u, lam, f = cu, cl, cf
            if np.linalg.norm(step) <= 1e-15 * (np.linalg.norm(u) + abs(lam)):
                break
    if not np.all(np.isfinite(u)) or np.max(np.abs(u)) == 0:
        return None
    return normalize(op, u), lam


def brute_force_tiny(op: AssembledOperator, starts_per_pattern: int = 200, seed: int = 0,
                     cap: float = math.inf, residual_tol: float = 1e-10):
    """All eigenpairs found by multi-start damped Newton on ``(u, lambda)``.

    Starts are drawn per sign pattern (modulo a global sign) with random
    magnitudes. Pairs whose normalized functions differ by less than 1e-8
    up to sign are merged. Returns ``(lambda, u)`` sorted by ``lambda``.
    """
    n = op.n
    if n > 5:
        raise ValueError("brute_force_tiny is limited to at most 5 nodes")
    res_tol = _effective_tol(op.p, residual_tol)
    # for p > 2 a residual at round-off pins u only to about eps^{1/(p-1)}
    same_tol = max(1e-8, 1e2 * EPS ** (1.0 / (op.p - 1))) if op.p > 2 else 1e-8
    found: list[tuple[float, np.ndarray]] = []
    for pat_id in range(2 ** (n - 1)):
        signs = np.array([1.0] + [(-1.0) ** ((pat_id >> k) & 1) for k in range(n - 1)])
        rng = np.random.default_rng([seed, pat_id])
        for _ in range(starts_per_pattern):
            u0 = normalize(op, signs * rng.uniform(0.05, 1.0, n))
            got = _newton_pair(op, u0, rayleigh(op, u0))
            if got is None:
                continue
            u, lam = got
            if lam > cap or relative_residual(op, u, lam) >= res_tol:
                continue
            u = _canonical(u)
            if any(min(np.max(np.abs(u - v)), np.max(np.abs(u + v))) < same_tol for _, v in found):
                continue
            found.append((float(lam), u))
    found.sort(key=lambda t: t[0])
    return found


def distinct_values(pairs, rtol: float = DEDUP_RTOL) -> list[float]:
    """Eigenvalues with relative duplicates (``rtol``) removed."""
    out: list[float] = []
    for lam, _ in sorted(pairs, key=lambda t: t[0]):
        if not out or abs(lam - out[-1]) > rtol * max(abs(out[-1]), 1.0):
            out.append(lam)
    return out
