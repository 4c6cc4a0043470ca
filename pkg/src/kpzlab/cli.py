"""Command-line front end: config parsing, study dispatch, artifacts.

Each command writes <command>-<seed>.csv and .json into the output
directory (atomic rename), prints one line per assertion, and exits 0 only
if every assertion passed. Config errors and cone-policy refusals exit 2.
"""
from __future__ import annotations

import argparse
import platform
import sys
import time
from typing import Dict, List, Optional

import numpy as np
import scipy

from . import __version__
from .assumptions import check_assumptions
from .config import (ConfigError, ENV_WORKERS, effective_workers,
                     dump_resolved, load_config, plan_from_config,
                     scheme_params)
from .driving import make_driving
from .lattice import (EvolutionConfig, HeightHistory, LatticeGeometry,
                      evolve, min_cone_side, slice_csv_rows, step)
from .noise import NoiseModel, NoiseSpec
from .output import sha256_text, write_csv, write_json
from .rescale import coefficients, decompose, macro_terms, make_scheme
from .rng import derive_seed
from .studies import (GaussianBump, drift_bound_study, gradient_scaling_study,
                      remainder_ratio_study, stationarity_study,
                      whitenoise_pairing_study)
from .walk import (_l1_ball, backward_walk_distribution, derivative_fd,
                   derivative_via_walk)

COMMANDS = ("simulate", "decompose", "check-phi", "walk-check", "remainder",
            "gradient", "drift", "whitenoise", "stationarity")


class ConeRefusal(Exception):
    def __init__(self, needed: int, got: int, horizon: int):
        super().__init__(
            f"cone-exact policy violated: horizon {horizon} needs side "
            f"L >= {needed}, got L = {got}; rerun with plan.l >= {needed} "
            f"or geometry = torus")
        self.needed = needed


def resolve_side(policy: str, side: int, horizon: int) -> int:
    """Torus side for a run that must stay exact up to `horizon` steps."""
    needed = max(3, min_cone_side(horizon))
    if policy == "cone-exact":
        if side == 0:
            return needed
        if side < needed:
            raise ConeRefusal(needed, side, horizon)
        return side
    if side <= 0:
        raise ConfigError("torus geometry needs plan.l > 0")
    return side


def _noise(cfg: Dict, replica: int) -> NoiseModel:
    m = cfg["model"]
    return NoiseModel(NoiseSpec(m["noise_family"], m["noise_scale"],
                                derive_seed(cfg["run"]["seed"], replica)))


# ---------------------------------------------------------------------------
# command implementations: each returns (rows, json_payload, assertions)


def _cmd_simulate(cfg: Dict, workers: int):
    m, p = cfg["model"], cfg["plan"]
    T = p["t"]
    phi = make_driving(m["phi"], m["d"], m["coupling"])
    L = resolve_side(p["geometry"], p["l"], T)
    g = LatticeGeometry(m["d"], L)
    noise = _noise(cfg, 0)
    sl = evolve(EvolutionConfig(phi, noise, g, p["epsilon"], T,
                                keep_history=False))
    rows = slice_csv_rows(sl, p["epsilon"], noise.spec.seed)
    v = sl.values
    payload = {"t": T, "L": L, "d": m["d"], "epsilon": p["epsilon"],
               "height_min": float(v.min()), "height_max": float(v.max()),
               "height_mean": float(v.mean()), "height_std": float(v.std())}
    return rows, payload, {}


def _cmd_decompose(cfg: Dict, workers: int):
    m, p = cfg["model"], cfg["plan"]
    T, eps = p["t"], p["epsilon"]
    if T < 1:
        raise ConfigError("decompose needs plan.t >= 1")
    phi = make_driving(m["phi"], m["d"], m["coupling"])
    hess = phi.hessian_origin()
    scheme = make_scheme(cfg["scheme"]["preset"], **scheme_params(cfg))
    L = resolve_side(p["geometry"], p["l"], T)
    g = LatticeGeometry(m["d"], L)
    x0 = tuple(0 for _ in range(m["d"]))
    degenerate = abs(hess.q - hess.r) < 1e-14
    coef = None if degenerate else coefficients(scheme, eps, m["d"], hess,
                                                NoiseSpec(m["noise_family"],
                                                          m["noise_scale"],
                                                          0).sigma)
    rows = []
    worst_lattice = 0.0
    worst_macro = 0.0
    for k in range(p["replicas"]):
        noise = _noise(cfg, k)
        cur = evolve(EvolutionConfig(phi, noise, g, eps, T - 1,
                                     keep_history=False))
        hist = HeightHistory([cur, step(cur, phi, noise, eps)])
        s = decompose(hist, phi, noise, eps, T - 1, x0)
        row = {"replica": k, "epsilon": eps, "t": s.t}
        for i, xi in enumerate(s.x, start=1):
            row[f"x{i}"] = xi
        resid = s.increment - (s.A + s.B + s.C + s.D)
        rel = abs(resid) / max(abs(s.increment), 1e-300)
        worst_lattice = max(worst_lattice, rel)
        row.update(A=s.A, B=s.B, C=s.C, D=s.D, increment=s.increment,
                   lattice_residual=resid)
        if coef is not None:
            sm = macro_terms(s, scheme, eps, NoiseSpec(m["noise_family"],
                                                       m["noise_scale"],
                                                       0).sigma, hess, m["d"])
            mresid = sm.time_derivative - (sm.laplacian_term + sm.grad_sq_term
                                           + sm.noise_term + sm.remainder)
            mrel = abs(mresid) / max(abs(sm.time_derivative), 1e-300)
            worst_macro = max(worst_macro, mrel)
            row["nu"] = coef.nu
            row["lambda"] = coef.lam
            row.update(D_coef=coef.D, xi=sm.xi,
                       time_derivative=sm.time_derivative,
                       laplacian_term=sm.laplacian_term,
                       grad_sq_term=sm.grad_sq_term,
                       noise_term=sm.noise_term, remainder=sm.remainder,
                       macro_residual=mresid)
        rows.append(row)
    assertions = {"lattice_identity_1e-10": worst_lattice <= 1e-10}
    payload = {"t": T, "epsilon": eps, "replicas": p["replicas"],
               "worst_lattice_residual_rel": worst_lattice,
               "degenerate_hessian": degenerate}
    if coef is not None:
        assertions["macro_identity_1e-10"] = worst_macro <= 1e-10
        payload["worst_macro_residual_rel"] = worst_macro
        payload["coefficients"] = {"nu": coef.nu, "lambda": coef.lam,
                                   "D": coef.D}
    return rows, payload, assertions


def _cmd_check_phi(cfg: Dict, workers: int):
    m = cfg["model"]
    phi = make_driving(m["phi"], m["d"], m["coupling"])
    report = check_assumptions(phi, seed=cfg["run"]["seed"])
    rows = [{"check": c.name, "passed": c.passed, "worst": c.worst,
             "detail": c.detail} for c in report.checks]
    assertions = {c.name: c.passed for c in report.checks}
    return rows, report.as_dict(), assertions


def _cmd_walk_check(cfg: Dict, workers: int):
    m, p = cfg["model"], cfg["plan"]
    T, eps, d = p["t"], p["epsilon"], m["d"]
    if T < 1:
        raise ConfigError("walk-check needs plan.t >= 1")
    phi = make_driving(m["phi"], m["d"], m["coupling"])
    L = resolve_side(p["geometry"], p["l"], T)
    g = LatticeGeometry(d, L)
    noise = _noise(cfg, 0)
    x0 = tuple(0 for _ in range(d))
    hist = evolve(EvolutionConfig(phi, noise, g, eps, T))
    dist = backward_walk_distribution(hist, phi, T, x0)
    tol = max(1e-8, 1e-4 * eps)
    rows = []
    worst = 0.0
    worst_mass = 0.0
    for s in range(1, T + 1):
        total = dist.total_mass(s)
        worst_mass = max(worst_mass, abs(eps * total - eps))
        reach = T - s
        for y in _l1_ball(x0, reach, d):
            dw = derivative_via_walk(dist, s, y, eps)
            df = derivative_fd(phi, noise, g, eps, T, x0, s, y)
            diff = abs(dw - df)
            worst = max(worst, diff)
            row = {"s": s}
            for i, yi in enumerate(y, start=1):
                row[f"y{i}"] = yi
            row.update(walk_derivative=dw, fd_derivative=df, abs_diff=diff)
            rows.append(row)
    assertions = {"derivative_agreement": worst <= tol,
                  "mass_is_epsilon": worst_mass <= 1e-6 * eps}
    payload = {"t": T, "epsilon": eps, "d": d, "tolerance": tol,
               "worst_abs_diff": worst, "worst_mass_error": worst_mass,
               "sites_checked": len(rows)}
    return rows, payload, assertions


def _cmd_study(cfg: Dict, workers: int, command: str):
    plan = plan_from_config(cfg)
    if command == "remainder":
        res = remainder_ratio_study(plan, workers=workers)
        rows = res.tables["series"]
    elif command == "gradient":
        res = gradient_scaling_study(plan, workers=workers)
        rows = res.tables["series"]
    elif command == "drift":
        res = drift_bound_study(plan, times=cfg["plan"]["times"],
                                workers=workers)
        rows = res.tables["estimates"]
    elif command == "whitenoise":
        tf = cfg["test_function"]
        fn = GaussianBump(d=plan.d, amplitude=tf["amplitude"],
                          center_t=tf["center_t"], width_t=tf["width_t"],
                          center_x=tuple(tf["center_x"]),
                          width_x=tuple(tf["width_x"]))
        res = whitenoise_pairing_study(plan, fn, workers=workers)
        rows = res.tables["pairings"]
    else:
        res = stationarity_study(plan, checkpoints=cfg["plan"]["checkpoints"],
                                 workers=workers)
        rows = res.tables["quantiles"]
    return rows, res.summary, res.assertions


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kpzlab",
        description="Lattice growth models with a local KPZ decomposition: "
                    "simulation, exact identities, and Monte Carlo "
                    "verification studies.")
    ap.add_argument("--version", action="version",
                    version=f"kpzlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "grow a surface and export the final height slice",
        "decompose": "decompose one-step increments into the four parts",
        "check-phi": "audit a driving function against the model axioms",
        "walk-check": "compare walk derivatives with finite differences",
        "remainder": "remainder-to-term ratio decay study",
        "gradient": "normalized nearest-neighbor gradient scale study",
        "drift": "one-step drift upper-bound study",
        "whitenoise": "rescaled-noise pairing normality study",
        "stationarity": "long-run gradient-field stability study",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", metavar="FILE",
                        help="INI config file (see docs/config.md)")
        sp.add_argument("--seed", type=int, help="master seed (wins over file)")
        sp.add_argument("--out", help="output directory (wins over file)")
        sp.add_argument("--workers", type=int,
                        help=f"worker processes (wins over file and "
                             f"${ENV_WORKERS})")
        sp.add_argument("--set", action="append", default=[], metavar="S.K=V",
                        help="override any config key, e.g. plan.replicas=50")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.monotonic()
    try:
        cfg = load_config(args.config, args.command, args.set)
        if args.seed is not None:
            cfg["run"]["seed"] = args.seed
        if args.out is not None:
            cfg["run"]["out"] = args.out
        if args.workers is not None:
            cfg["run"]["workers"] = args.workers
        workers = effective_workers(cfg)

        if args.command == "simulate":
            rows, payload, assertions = _cmd_simulate(cfg, workers)
        elif args.command == "decompose":
            rows, payload, assertions = _cmd_decompose(cfg, workers)
        elif args.command == "check-phi":
            rows, payload, assertions = _cmd_check_phi(cfg, workers)
        elif args.command == "walk-check":
            rows, payload, assertions = _cmd_walk_check(cfg, workers)
        else:
            rows, payload, assertions = _cmd_study(cfg, workers, args.command)
    except (ConfigError, ConeRefusal) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    seed = cfg["run"]["seed"]
    out = cfg["run"]["out"]
    base = f"{args.command}-{seed}"
    csv_path = f"{out}/{base}.csv"
    json_path = f"{out}/{base}.json"
    resolved = dump_resolved(cfg)
    manifest = {
        "command": args.command,
        "seed": seed,
        "workers": workers,
        "config_sha256": sha256_text(resolved),
        "resolved_config": resolved,
        "versions": {"kpzlab": __version__,
                     "python": platform.python_version(),
                     "numpy": np.__version__,
                     "scipy": scipy.__version__},
        "wall_time_s": time.monotonic() - t0,
    }
    doc = {"manifest": manifest, "assertions": assertions,
           "passed": all(assertions.values()), "report": payload}
    write_csv(csv_path, rows)
    write_json(json_path, doc)

    for name, ok in assertions.items():
        print(f"assertion {name}: {'PASS' if ok else 'FAIL'}")
    status = 0 if all(assertions.values()) else 1
    print(f"{args.command}: {'ok' if status == 0 else 'FAILED'} "
          f"({manifest['wall_time_s']:.2f}s) -> {csv_path}, {json_path}")
    return status


if __name__ == "__main__":
    sys.exit(main())
