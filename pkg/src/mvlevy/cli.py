"""Command-line front end.

Subcommands: sample, simulate, fixpoint, multiplicity, check,
selfconsistent, constants.  Every run reads a JSON config (plus --set
overrides), writes a resolved config, a JSON report, and CSV data into the
output directory.  Exit codes: 0 success, 2 validation error, 3 numerical
failure, 4 failed condition check under --strict.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import conditions, fixed_point, measures, selfconsistent, simulate
from . import levy as levy_mod
from . import drift as drift_mod
from . import rng as _rng
from .errors import (Blowup, MvLevyError, NoiseFloorExceedsTol,
                     NoTransition, QuadratureFailure)

NUMERICAL_ERRORS = (Blowup, QuadratureFailure, NoiseFloorExceedsTol, NoTransition)


def _fmt(x):
    return f"{float(x):.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(v) for v in row])


def _load_config(path, overrides):
    cfg = {}
    if path:
        with open(path) as fh:
            cfg = json.load(fh)
    for item in overrides or []:
        key, _, raw = item.partition("=")
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        node = cfg
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = val
    return cfg


def _resolve_out(args, cfg):
    out = args.out or cfg.get("output_dir") or os.environ.get("MVLEVY_OUT", ".")
    os.makedirs(out, exist_ok=True)
    return out


def _dump(out, name, obj):
    path = os.path.join(out, name)
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _specs(cfg):
    levy = levy_mod.LevyMeasureSpec.from_json(cfg["levy"])
    drift = drift_mod.DriftSpec.from_json(cfg["drift"])
    return levy, drift


def _sim_config(cfg):
    return simulate.SimConfig.from_json(cfg["sim"])


def _fp_config(cfg):
    fp = cfg["fixed_point"]
    return fixed_point.FixedPointConfig(max_iter=fp["max_iter"], w1_tol=fp["w1_tol"],
                                        sim=_sim_config(cfg),
                                        damping=fp.get("damping", 0.0))


def cmd_sample(args, cfg, out):
    levy = levy_mod.LevyMeasureSpec.from_json(cfg["levy"])
    n = cfg.get("n", 10000)
    dt = cfg.get("dt", 1.0)
    seed = cfg["seed"]
    gen = _rng.stream(seed)
    draws = levy_mod.sample_increment(levy, dt, gen, size=n)
    _write_csv(os.path.join(out, "samples.csv"),
               [f"x_{i+1}" for i in range(levy.dim)], draws)
    report = {"n": n, "dt": dt, "mean": [float(v) for v in draws.mean(axis=0)]}
    if levy.kind == levy_mod.STABLE and levy.dim == 1 and levy.scale == 1.0:
        cf = {}
        for t in (0.5, 1.0, 2.0):
            emp = float(np.mean(np.cos(t * draws[:, 0])))
            cf[str(t)] = {"empirical": emp,
                          "target": math.exp(-(dt * t ** levy.alpha)
                                             if levy.alpha < 2 else -dt * t ** 2)}
        report["char_fn"] = cf
    _dump(out, "report.json", report)
    return 0


def cmd_simulate(args, cfg, out):
    levy, drift = _specs(cfg)
    sim = _sim_config(cfg)
    frozen = cfg.get("frozen_mean", [0.0] * drift.dim)
    mu = measures.EmpiricalMeasure.dirac(frozen)
    x0 = cfg.get("x0", frozen)
    occ = simulate.frozen_trajectory(drift, mu, levy, np.asarray(x0, float), sim)
    occ.to_csv(os.path.join(out, "occupation.csv"))
    report = {"mean": [float(v) for v in occ.mean()],
              "second_moment": measures.moment(occ, 2.0),
              "ess": occ.ess, "T": occ.T, "dt": occ.dt}
    _dump(out, "report.json", report)
    return 0


def cmd_fixpoint(args, cfg, out):
    levy, drift = _specs(cfg)
    fp = _fp_config(cfg)
    mu0 = measures.EmpiricalMeasure.dirac(cfg.get("mu0_mean", [0.0] * drift.dim))
    rep = fixed_point.iterate_lambda(drift, levy, mu0, fp)
    rep.final.to_csv(os.path.join(out, "fixed_point.csv"))
    _dump(out, "report.json", {
        "converged": rep.converged, "iterations": rep.iterations,
        "history": rep.history, "noise_floor": rep.noise_floor,
        "moment_beta_star": rep.moment_beta_star,
        "mean": [float(v) for v in rep.final.mean()]})
    return 0


def cmd_multiplicity(args, cfg, out):
    levy, drift = _specs(cfg)
    fp = _fp_config(cfg)
    seeds = cfg["seeds"]
    rep = fixed_point.multiplicity_search(drift, levy, seeds,
                                          cfg.get("M_star", 0.0), fp)
    n_distinct = int(rep.distinct_pairs.any(axis=1).sum()) if len(seeds) > 1 else 1
    _dump(out, "report.json", {
        "seeds": [list(map(float, s)) for s in rep.seeds],
        "distinct_pairs": rep.distinct_pairs.tolist(),
        "evidence": {f"{i},{j}": v for (i, j), v in rep.separation_evidence.items()},
        "errors": {str(i): str(e) for i, e in rep.errors.items()}})
    for i, r in enumerate(rep.fixed_points):
        if r is not None:
            r.final.to_csv(os.path.join(out, f"fixed_point_{i}.csv"))
    return 0


def cmd_check(args, cfg, out):
    levy = levy_mod.LevyMeasureSpec.from_json(cfg["levy"])
    report = {}
    ok = True
    if "ex14" in cfg:
        p = cfg["ex14"]
        res = conditions.ex14_check(p["lam"], p["kappa"], p["beta"], p["eps"],
                                    p["r0"], p["a1"], p["a2"], levy)
        report["ex14"] = {k: res[k] for k in ("we_ok", "we2_ok", "convex_ok")}
        ok = ok and all(report["ex14"].values())
    if "ex15" in cfg:
        p = cfg["ex15"]
        res = conditions.ex15_check(p["lam"], p["kappa"], p["beta"], p["eps"],
                                    p["r0"], p["y1"], p["y2"], levy)
        report["ex15"] = {k: res[k] for k in ("eq1_ok", "wq2_ok")}
        ok = ok and all(report["ex15"].values())
    if "m_star" in cfg:
        p = cfg["m_star"]
        params = drift_mod.A1Params(**p)
        res = conditions.m_star(params, levy)
        report["m_star"] = {k: res[k] for k in ("M_star", "chosen_l", "case")}
    report["ok"] = ok
    _dump(out, "report.json", report)
    if args.strict and not ok:
        return 4
    return 0


def cmd_selfconsistent(args, cfg, out):
    gamma = args.gamma if args.gamma is not None else cfg["gamma"]
    report = {"gamma": gamma, "formula_value":
              (12.0 - gamma ** 2) / (2.0 * gamma) if gamma < selfconsistent.GAMMA_C else 0.0}
    if args.beta_scan:
        lo, hi, step = (float(v) for v in args.beta_scan.split(":"))
        betas = np.arange(lo, hi + 1e-12, step)
        rows = []
        for b in betas:
            case = selfconsistent.GradientCase(gamma, float(b))
            rc = selfconsistent.root_count(case, max(6.0, 1.6 * math.sqrt(max(b, 1.0))),
                                           1000, refine=False)
            rows.append((b, rc["count"]))
        _write_csv(os.path.join(out, "beta_scan.csv"), ["beta", "root_count"], rows)
        report["beta_scan"] = {str(float(b)): int(c) for b, c in rows}
    else:
        bc = selfconsistent.beta_c(gamma, cfg.get("tol", 0.02))
        report["beta_c"] = bc.value
        report["supercritical"] = bc.supercritical
    if args.beta is not None:
        case = selfconsistent.GradientCase(gamma, args.beta)
        ms = np.linspace(-6.0, 6.0, 241)
        rows = [(m, selfconsistent.h_fn(case, float(m))) for m in ms]
        _write_csv(os.path.join(out, "h_values.csv"), ["m", "h"], rows)
    _dump(out, "report.json", report)
    return 0


def cmd_constants(args, cfg, out):
    levy = levy_mod.LevyMeasureSpec.from_json(cfg["levy"])
    p = cfg["appendix"]
    sigma = None
    if "sigma_knots" in p:
        sigma = levy_mod.SigmaSpec(tuple(tuple(k) for k in p.pop("sigma_knots")))
    ap = conditions.AppendixParams(sigma=sigma, **p)
    res = conditions.appendix_constants(ap, levy)
    _dump(out, "report.json", {
        "c": res.c, "a": res.a, "eps": res.eps, "lambda0": res.lambda0,
        "C_contr": res.C_contr, "lambda_contr": res.lambda_contr,
        "c1": res.c1, "c2": res.c2})
    return 0


COMMANDS = {
    "sample": cmd_sample,
    "simulate": cmd_simulate,
    "fixpoint": cmd_fixpoint,
    "multiplicity": cmd_multiplicity,
    "check": cmd_check,
    "selfconsistent": cmd_selfconsistent,
    "constants": cmd_constants,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="mvlevy",
                                 description="Stationary-distribution toolkit "
                                             "for jump mean-field SDEs")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None, help="JSON config file")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--set", action="append", default=[], dest="overrides",
                        metavar="KEY=VALUE", help="override a config entry")
        if name == "check":
            sp.add_argument("--strict", action="store_true")
        if name == "selfconsistent":
            sp.add_argument("--gamma", type=float, default=None)
            sp.add_argument("--beta", type=float, default=None)
            sp.add_argument("--beta-scan", default=None,
                            metavar="LO:HI:STEP")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config, args.overrides)
        out = _resolve_out(args, cfg)
        _dump(out, "resolved_config.json", cfg)
        return COMMANDS[args.command](args, cfg, out)
    except NUMERICAL_ERRORS as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (MvLevyError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
