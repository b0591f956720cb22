"""``mixspec`` command line: JSON config in, JSON/CSV results out."""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .domain import build, shape_from_dict
from .energy import ExteriorFunction, nonlocal_tail
from .kernel import assemble
from .measure import MeasureError, SpectralMeasure, critical_exponent, gamma, s_sharp, validate
from .principles import (check_weak_max, random_sources, signed_mp_failure_search, solve_source,
                         strong_min_audit)
from .shapes import (area_family, faber_krahn_experiment, interval_family, polya_szego_check,
                     rearrangement_ball)
from .solver import (ConvergenceError, NonCoerciveError, brute_force_tiny, distinct_values, eig1,
                     eig2_minimax, eig2_twoball_bound, eig_all_p2)

log = logging.getLogger("mixspec")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64
EXIT_NOINPUT = 66

DEFAULTS = {
    "p": 2.0,
    "solver": {"tol": 1e-9, "max_iter": 5000, "restarts": 8, "seed": 0, "path_points": 33,
               "max_sweeps": 5000, "quad_order": 16},
    "maxprin": {"trials": 100},
    "faber_krahn": {"area": 1.0, "h_levels": None, "restarts": 2},
    "polya_szego": {"draws": 200, "rtol": 1e-6},
    "tail": {"x0": None, "R": None, "v": "eig1", "include_constant": True},
    "oracle_tiny": {"starts_per_pattern": 200},
}


class ConfigError(ValueError):
    pass


def materialize(cfg: dict) -> dict:
    """Fill in every default so the persisted config is self-contained."""
    if "domain" not in cfg or "measure" not in cfg:
        raise ConfigError("config needs 'domain' and 'measure' blocks")
    out = copy.deepcopy(cfg)
    out["p"] = float(out.get("p", DEFAULTS["p"]))
    for block, defaults in DEFAULTS.items():
        if isinstance(defaults, dict):
            merged = dict(defaults)
            merged.update(out.get(block) or {})
            out[block] = merged
    meas = out["measure"]
    out["measure"] = dict(meas, mu_plus=list(meas.get("mu_plus") or []),
                          mu_minus=list(meas.get("mu_minus") or []))
    if "h" not in out["domain"]:
        raise ConfigError("domain block needs a grid spacing 'h'")
    return out


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(_jsonable(data), sort_keys=True, indent=2) + "\n")


def write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


# ---------------------------------------------------------------------------
# context shared by commands
# ---------------------------------------------------------------------------

class Run:
    def __init__(self, cfg: dict, base_dir: Path, out_dir: Path, threads: int, args):
        self.cfg = cfg
        self.base_dir = base_dir
        self.out = out_dir
        self.threads = threads
        self.args = args
        self.measure = SpectralMeasure.from_dict(cfg["measure"])
        self.p = cfg["p"]
        self._domain = None
        self._op = None

    @property
    def solver(self) -> dict:
        return self.cfg["solver"]

    @property
    def domain(self):
        if self._domain is None:
            shape = shape_from_dict(self.cfg["domain"], self.base_dir)
            self._domain = build(shape, float(self.cfg["domain"]["h"]))
        return self._domain

    @property
    def op(self):
        if self._op is None:
            self._op = assemble(self.domain, self.measure, self.p,
                                quad_order=int(self.solver["quad_order"]))
        return self._op

    def eig1(self, op=None):
        s = self.solver
        return eig1(op or self.op, tol=s["tol"], max_iter=int(s["max_iter"]),
                    n_restarts=int(s["restarts"]), seed=int(s["seed"]), workers=self.threads)


def cmd_validate(run: Run) -> tuple[dict, int]:
    rep = validate(run.measure)
    out = rep.to_dict()
    out["codes"] = rep.codes()
    if rep.ok:
        dim = 1 if run.cfg["domain"].get("shape") == "interval" else 2
        out["gamma"] = gamma(run.measure)
        out["s_sharp"] = s_sharp(run.measure)
        out["critical_exponent"] = critical_exponent(run.measure, dim, run.p)
    for code in out["codes"]:
        print(f"mixspec: hypothesis ({code}) violated", file=sys.stderr)
    return out, EXIT_OK if rep.ok else EXIT_INVALID


def cmd_assemble(run: Run) -> tuple[dict, int]:
    op = run.op
    out = {"n": op.n, "dim": op.domain.dim, "h": op.domain.h, "volume": op.domain.volume,
           "p": op.p, "signed": op.signed,
           "d_plus_range": [float(op.d_plus.min()), float(op.d_plus.max())],
           "a0": [op.a0_plus, op.a0_minus], "a1": [op.a1_plus, op.a1_minus],
           "kernel_plus": op.W_plus is not None, "kernel_minus": op.W_minus is not None}
    if run.args.dump_operator:
        out["dump"] = dump_operator(op, Path(run.args.dump_operator))
    return out, EXIT_OK


def dump_operator(op, path: Path) -> list[str]:
    """``.npz`` keeps every array; any other suffix writes a pair CSV
    ``i,j,w_plus,w_minus`` and a diagonal CSV ``i,d_plus,d_minus``."""
    n = op.n
    Wp = np.zeros((n, n)) if op.W_plus is None else np.asarray(op.W_plus)
    Wm = np.zeros((n, n)) if op.W_minus is None else np.asarray(op.W_minus)
    coeffs = np.array([op.a0_plus, op.a0_minus, op.a1_plus, op.a1_minus])
    if path.suffix == ".npz":
        np.savez(path, nodes=op.domain.nodes, W_plus=Wp, W_minus=Wm, d_plus=op.d_plus,
                 d_minus=op.d_minus, a0_a1=coeffs)
        return [str(path)]
    iu, ju = np.triu_indices(n, 1)
    keep = (Wp[iu, ju] != 0) | (Wm[iu, ju] != 0)
    write_rows(path, ["i", "j", "w_plus", "w_minus"],
               zip(iu[keep].tolist(), ju[keep].tolist(), Wp[iu, ju][keep], Wm[iu, ju][keep]))
    diag = path.with_name(path.stem + "_diag.csv")
    write_rows(diag, ["i", "d_plus", "d_minus"], zip(range(n), op.d_plus, op.d_minus))
    write_json(path.with_name(path.stem + "_coeffs.json"),
               {"a0_plus": op.a0_plus, "a0_minus": op.a0_minus,
                "a1_plus": op.a1_plus, "a1_minus": op.a1_minus})
    return [str(path), str(diag)]


def cmd_eig1(run: Run) -> tuple[dict, int]:
    res = run.eig1()
    res.grid_function(run.op).to_csv(run.out / "eigenfunction.csv")
    return res.to_dict(), EXIT_OK


def cmd_eig2(run: Run) -> tuple[dict, int]:
    s = run.solver
    e1 = run.eig1()
    path = eig2_minimax(run.op, e1, path_points=int(s["path_points"]), tol=s["tol"],
                        max_sweeps=int(s["max_sweeps"]))
    write_rows(run.out / "path.csv", ["t", "energy"], path.energy_table())
    saddle = path.path[int(np.argmax(path.energies))]
    out = {"lambda1": e1.lam, "lambda2_minimax": path.max_energy, "sweeps": path.sweeps,
           "endpoint_check": list(path.endpoint_check),
           "saddle_residual": path.info.get("saddle_residual")}
    try:
        out["lambda2_twoball"] = eig2_twoball_bound(run.op, saddle)
    except ValueError:
        out["lambda2_twoball"] = None
    return out, EXIT_OK


def cmd_spectrum(run: Run) -> tuple[dict, int]:
    pairs = eig_all_p2(run.op)
    write_rows(run.out / "spectrum.csv", ["k", "lambda"], [(k + 1, l) for k, (l, _) in enumerate(pairs)])
    lam1 = pairs[0][0]
    sign_changing = all(np.any(u > 0) and np.any(u < 0)
                        for l, u in pairs[1:] if l > lam1 * (1 + 1e-9))
    vals = distinct_values(pairs)
    return {"n": len(pairs), "lambda1": lam1,
            "lambda2": vals[1] if len(vals) > 1 else None,
            "gap": (vals[1] - vals[0]) if len(vals) > 1 else None,
            "higher_sign_changing": bool(sign_changing)}, EXIT_OK


def cmd_maxprin(run: Run) -> tuple[dict, int]:
    trials = int(run.args.trials if run.args.trials is not None else run.cfg["maxprin"]["trials"])
    seed = int(run.solver["seed"])
    op = run.op
    if op.signed:
        cand = signed_mp_failure_search(op, trials, seed)
        return {"signed": True, "trials": trials,
                "violations": [] if cand is None else [cand.to_dict()],
                "worst": None if cand is None else cand.to_dict()}, EXIT_OK
    violations, worst = [], None
    for k, f in random_sources(op.n, trials, seed):
        u = solve_source(op, f, tol=run.solver["tol"])
        cert = check_weak_max(op, u)
        strong = strong_min_audit(op, u) if cert.is_supersolution else None
        rec = {"trial": k, "min_value": cert.min_value, "weak": cert.positivity,
               "strong": None if strong is None else strong.passed}
        if worst is None or rec["min_value"] < worst["min_value"]:
            worst = rec
        if cert.positivity is False or (strong is not None and not strong.passed):
            violations.append(rec)
    return {"signed": False, "trials": trials, "violations": violations, "worst": worst}, EXIT_OK


def cmd_faber_krahn(run: Run) -> tuple[dict, int]:
    fk = run.cfg["faber_krahn"]
    h = float(run.cfg["domain"]["h"])
    levels = fk["h_levels"] or [2 * h, h]
    if run.domain.dim == 1:
        length = run.domain.volume
        family = lambda hh: interval_family(hh, length)  # noqa: E731
    else:
        family = lambda hh: area_family(hh, fk["area"])  # noqa: E731
    table = faber_krahn_experiment(family, run.measure, run.p, levels,
                                   n_restarts=int(fk["restarts"]), tol=run.solver["tol"],
                                   seed=int(run.solver["seed"]))
    table.to_csv(run.out / "faber_krahn.csv")
    out = table.to_dict()
    out["ranking"] = table.ranking()
    return out, EXIT_OK


def cmd_polya_szego(run: Run) -> tuple[dict, int]:
    ps = run.cfg["polya_szego"]
    op = run.op
    ball = rearrangement_ball(run.domain)
    op_ball = assemble(ball, run.measure, run.p, quad_order=int(run.solver["quad_order"]))
    rng = np.random.default_rng(int(run.solver["seed"]))
    rows = []
    for k in range(int(ps["draws"])):
        u = rng.uniform(0.0, 1.0, op.n) * (rng.uniform(size=op.n) < rng.uniform(0.2, 1.0))
        if not u.any():
            u[0] = 1.0
        r = polya_szego_check(op, op_ball, u, rtol=ps["rtol"])
        rows.append((k, r.E_u, r.E_ustar, r.gap, r.passed))
    write_rows(run.out / "polya_szego.csv", ["draw", "E_u", "E_ustar", "gap", "passed"], rows)
    gaps = np.array([r[3] for r in rows])
    passed = np.array([r[4] for r in rows])
    return {"draws": len(rows), "pass_fraction": float(passed.mean()),
            "mean_gap": float(gaps.mean()), "min_gap": float(gaps.min()),
            "ball_nodes": ball.n, "domain_nodes": op.n}, EXIT_OK


def cmd_tail(run: Run) -> tuple[dict, int]:
    tc = run.cfg["tail"]
    dom = run.domain
    x0 = np.asarray(tc["x0"] if tc["x0"] is not None else dom.center, dtype=float)
    R = float(tc["R"] if tc["R"] is not None else 0.25 * dom.diam)
    if tc["v"] == "ones":
        v = ExteriorFunction.constant(dom.dim, 1.0)
    else:
        v = ExteriorFunction.from_domain(dom, run.eig1().u)
    val = nonlocal_tail(dom, run.measure, run.p, v, x0, R,
                        include_constant=bool(tc["include_constant"]))
    return {"tail": val, "x0": x0.tolist(), "R": R, "v": tc["v"],
            "include_constant": bool(tc["include_constant"])}, EXIT_OK


def cmd_oracle_tiny(run: Run) -> tuple[dict, int]:
    pairs = brute_force_tiny(run.op, int(run.cfg["oracle_tiny"]["starts_per_pattern"]),
                             seed=int(run.solver["seed"]))
    write_rows(run.out / "oracle.csv", ["lambda"] + [f"u{i}" for i in range(run.op.n)],
               [(l, *u) for l, u in pairs])
    return {"pairs": len(pairs), "eigenvalues": distinct_values(pairs)}, EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "assemble": cmd_assemble,
    "eig1": cmd_eig1,
    "eig2": cmd_eig2,
    "spectrum-p2": cmd_spectrum,
    "maxprin": cmd_maxprin,
    "faber-krahn": cmd_faber_krahn,
    "polya-szego": cmd_polya_szego,
    "tail": cmd_tail,
    "oracle-tiny": cmd_oracle_tiny,
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mixspec", description="Superposition operator toolkit.")
    ap.add_argument("command", help=", ".join(COMMANDS))
    ap.add_argument("-c", "--config", required=True, help="JSON config file")
    ap.add_argument("-o", "--out", help="output root (default $MIXSPEC_OUT or ./mixspec-out)")
    ap.add_argument("--threads", type=int, default=1, help="worker cap for restarts")
    ap.add_argument("--seed", type=int, help="overrides solver.seed")
    ap.add_argument("--dump-operator", help="write assembled coefficients to this .npz")
    ap.add_argument("--trials", type=int, help="maxprin trial count")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command not in COMMANDS:
        print(f"mixspec: unknown command {args.command!r}", file=sys.stderr)
        return EXIT_USAGE
    cfg_path = Path(args.config)
    try:
        raw = json.loads(cfg_path.read_text())
    except (OSError, UnicodeDecodeError) as exc:
        print(f"mixspec: cannot read config: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except json.JSONDecodeError as exc:
        print(f"mixspec: config is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        if args.seed is not None:
            raw.setdefault("solver", {})["seed"] = args.seed
        cfg = materialize(raw)
    except (ConfigError, TypeError, ValueError) as exc:
        print(f"mixspec: invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID

    digest = config_hash(cfg)
    root = Path(args.out or os.environ.get("MIXSPEC_OUT") or "mixspec-out")
    run_dir = root / digest[:16]
    out_dir = run_dir / args.command
    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(run_dir / "config.json", cfg)

    header = {"command": args.command, "version": __version__, "config_hash": digest}
    try:
        run = Run(cfg, cfg_path.parent, out_dir, max(args.threads, 1), args)
        result, code = COMMANDS[args.command](run)
    except MeasureError as exc:
        result, code = {"error": "invalid measure", "detail": str(exc)}, EXIT_INVALID
    except (ConfigError, KeyError, TypeError) as exc:
        result, code = {"error": "invalid config", "detail": str(exc)}, EXIT_INVALID
    except (ConvergenceError, NonCoerciveError) as exc:
        result, code = {"error": type(exc).__name__, "detail": str(exc)}, EXIT_NUMERICAL
    except ValueError as exc:
        result, code = {"error": "invalid input", "detail": str(exc)}, EXIT_INVALID
    write_json(out_dir / "result.json", {**header, **result})
    print(out_dir / "result.json")
    return code


if __name__ == "__main__":
    sys.exit(main())
