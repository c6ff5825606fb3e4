"""Command line front-end: ``shockfront <subcommand> --config <path> [--out <dir>] [--seed <u64>]``.

Exit codes: 0 success, 1 usage or configuration error, 2 hypothesis or
validation failure, 3 numerical breakdown.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
import csv
import json
import math
import os
import shutil
import sys
import tempfile

import numpy as np

from . import __version__
from ._accel import backend
from .errors import (CompatibilityError, ConfigError, HypothesisViolated, ShockfrontError, ValidityLost)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_BREAKDOWN = 0, 1, 2, 3
SUBCOMMANDS = ("thermo-check", "simulate-smooth", "build-shock", "riccati")
FIELD_MAX_NODES = 200  # per axis when writing rectangular fields


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _seed(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser():
    p = _Parser(prog="shockfront", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"shockfront {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="scenario JSON file")
        s.add_argument("--out", default="shockfront-out", help="output directory")
        s.add_argument("--seed", type=_seed, default=0, help="seed for randomized content")
    return p


# ------------------------------------------------------------------ output helpers

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


class RunDir:
    """Collects files in a scratch directory and moves them into place on success."""

    def __init__(self, final, header):
        self.final = final
        self.header = header
        parent = os.path.dirname(os.path.abspath(final)) or "."
        os.makedirs(parent, exist_ok=True)
        self.tmp = tempfile.mkdtemp(prefix=".tmp-", dir=parent)

    def csv(self, name, columns, rows):
        with open(os.path.join(self.tmp, name), "w", newline="") as fh:
            fh.write(f"# {self.header}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(v) for v in row])

    def json(self, name, obj):
        body = {"header": self.header, **_jsonable(obj)}
        with open(os.path.join(self.tmp, name), "w") as fh:
            json.dump(body, fh, indent=2, sort_keys=True, allow_nan=False)
            fh.write("\n")

    def commit(self):
        if os.path.isdir(self.final):
            shutil.rmtree(self.final)
        os.replace(self.tmp, self.final)

    def abort(self):
        shutil.rmtree(self.tmp, ignore_errors=True)


def _field_rows(fld):
    """Valid nodes of a rectangular field, thinned to at most FIELD_MAX_NODES per axis."""
    st = max(1, int(math.ceil(len(fld.t) / FIELD_MAX_NODES)))
    sr = max(1, int(math.ceil(len(fld.r) / FIELD_MAX_NODES)))
    last = int(round((fld.t_stop - fld.t[0]) / fld.dt)) if len(fld.t) > 1 else 0
    levels = sorted(set(range(0, last + 1, st)) | {last})
    for n in levels:
        for j in range(fld.lo[n], fld.hi[n] + 1):
            if (j - fld.lo[n]) % sr and j != fld.hi[n]:
                continue
            a, b = fld.w1[n, j], fld.w2[n, j]
            if np.isfinite(a) and np.isfinite(b):
                yield fld.t[n], fld.r[j], a, b


def _field_meta(fld):
    return {"domain": fld.domain, "d": fld.d, "status": fld.status, "t_stop": fld.t_stop,
            "t_range": [fld.t[0], fld.t[-1]], "nt": len(fld.t), "r_range": [fld.r[0], fld.r[-1]],
            "nr": len(fld.r), "columns": ["t", "r", "w1", "w2"], "thinned_to": FIELD_MAX_NODES,
            "meta": {k: v for k, v in fld.meta.items()}}


# ------------------------------------------------------------------ subcommands

def cmd_thermo_check(sc, out, header):
    from .eos import validate_bethe_weyl
    model = sc.model
    try:
        rep = validate_bethe_weyl(model, sc.data["rho_range"], n=sc.data["n"])
    except ShockfrontError as exc:
        raise ConfigError(str(exc)) from None
    rho = np.geomspace(*sc.data["rho_range"], 64)
    rd = RunDir(out, header)
    rd.json("thermo_report.json", {"model": model.to_json(), "passed": rep.passed, "checks": rep.checks,
                                   "margins": rep.margins, "notes": rep.notes,
                                   "rho_range": sc.data["rho_range"], "n": sc.data["n"]})
    rd.csv("thermo.csv", ["rho", "p", "c", "H", "G"],
           zip(rho, model.pressure(rho), model.sound_speed(rho), model.enthalpy(rho),
               model.fundamental_derivative(rho)))
    rd.commit()
    return EXIT_OK if rep.passed else EXIT_INVALID


def cmd_simulate_smooth(sc, out, header):
    from .smooth import evolve_smooth, verify_c0
    num = sc.data["numerics"]
    r_lo, r_hi = sc.data["r_range"]
    fld = evolve_smooth(sc.model, sc.cfg, sc.data["initial"], r_lo, r_hi, sc.data["t_end"],
                        nr=int(num.get("nr", 400)), nt=int(num.get("nt", 400)),
                        boundary=num.get("boundary", "mask"), resolve_frac=float(num.get("resolve_frac", 0.03)),
                        raise_on_stop=False)
    rd = RunDir(out, header)
    rd.csv("field.csv", ["t", "r", "w1", "w2"], _field_rows(fld))
    rd.json("field.json", _field_meta(fld))
    code = EXIT_OK
    if fld.status != "ok":
        rd.json("c0_report.json", {"skipped": f"evolution stopped: {fld.status}", "t_stop": fld.t_stop})
        code = EXIT_BREAKDOWN
    else:
        rep = verify_c0(sc.model, sc.cfg, fld, n_paths=int(num.get("n_paths", 16)))
        rd.json("c0_report.json", {"passed": rep.passed, "checks": rep.checks, "worst": rep.worst,
                                   "slack": rep.slack, "n_paths": rep.n_paths, "notes": rep.notes})
        code = EXIT_OK if rep.passed else EXIT_INVALID
    rd.commit()
    return code


FRONT_COLUMNS = ["t", "r", "rho_minus", "u_minus", "rho_plus", "u_plus", "U", "margin_lax1", "margin_lax2",
                 "rh_res1", "rh_res2"]


def _one_shock_run(sc, R0, out, header):
    """Build, validate and write one R0; returns (summary row, exit code)."""
    from .angular import build_shock_wave, check_hypotheses, validate_solution
    d = sc.data
    t_end = d["t_end"] if d["t_end"] is not None else d["t_end_per_R0"] * R0
    num = dict(d["numerics"])
    for side in ("left", "right"):
        if d[side].natural:
            num.setdefault(f"extend_{side}", "natural")
    left, right = d["left"].at_radius(R0), d["right"].at_radius(R0)
    tag = f"R0_{_fmt(R0)}"
    rd = RunDir(os.path.join(out, tag), header)
    manifest = {"name": sc.name, "model": sc.model.to_json(), "d": sc.cfg.d, "R0": R0, "t_end": t_end,
                "left": d["left"].raw, "right": d["right"].raw, "numerics": num, "version": __version__,
                "backend": backend()}
    try:
        lo = num.get("left_lo", 0.05) * R0
        hi = num.get("right_span", 4.0) * R0
        hyp = check_hypotheses(sc.model, sc.cfg, left, right, R0, C0_cfg=d["C0"], left_range=(lo, R0),
                               right_range=(R0, hi))
        manifest["hypotheses"] = {"passed": hyp.passed, "checks": hyp.checks, "margins": hyp.margins,
                                  "where": hyp.where, "C0": hyp.C0}
        if d["require_hypotheses"] and not hyp.passed:
            bad = [k for k, v in hyp.checks.items() if not v]
            raise HypothesisViolated("hypotheses fail: " + ", ".join(bad))
        sol = build_shock_wave(sc.model, sc.cfg, left, right, R0, t_end, numerics=num)
    except (CompatibilityError, ValidityLost, HypothesisViolated) as exc:
        manifest.update(outcome="rejected", error=f"{type(exc).__name__}: {exc}")
        rd.json("manifest.json", manifest)
        rd.commit()
        return [R0, math.nan, math.nan, "rejected", False], EXIT_INVALID
    except ShockfrontError as exc:
        manifest.update(outcome="breakdown", error=f"{type(exc).__name__}: {exc}")
        rd.json("manifest.json", manifest)
        rd.commit()
        return [R0, math.nan, math.nan, "breakdown", False], EXIT_BREAKDOWN
    rep = validate_solution(sc.model, sc.cfg, sol)
    sound = not (sol.T_reached < sol.T_bound)
    manifest.update(outcome="completed", reason=sol.reason, T_reached=sol.T_reached, T_bound=sol.T_bound,
                    bound_sound=sound, validation={"passed": rep.passed, "checks": rep.checks,
                                                   "worst": rep.worst, "flagged": rep.flagged,
                                                   "notes": rep.notes},
                    mesh={"rows": sol.middle.rows, "max_correction": sol.meta["max_correction"]})
    rd.json("manifest.json", manifest)
    rd.csv("front.csv", FRONT_COLUMNS, sol.front.rows(sc.model))
    rd.csv("left.csv", ["t", "r", "w1", "w2"], _field_rows(sol.left))
    rd.csv("right.csv", ["t", "r", "w1", "w2"], _field_rows(sol.right))
    mid = sol.middle
    m, k = np.nonzero(mid.valid)
    rd.csv("middle.csv", ["m", "k", "t", "r", "w1", "w2"],
           zip(m, k, mid.t[m, k], mid.r[m, k], mid.w1[m, k], mid.w2[m, k]))
    c1 = sol.c1_curve
    rd.csv("c1_curve.csv", ["t", "r", "w1", "w2"], zip(c1.t, c1.r, c1.w1, c1.w2))
    if sol.ledger is not None:
        rd.json("bound_ledger.json", sol.ledger.to_json())
    rd.commit()
    code = EXIT_OK
    if not (rep.passed and sound):
        code = EXIT_INVALID
    if sol.reason == "nonfinite":
        code = EXIT_BREAKDOWN
    return [R0, sol.T_bound, sol.T_reached, sol.reason, rep.passed], code


def cmd_build_shock(sc, out, header):
    from .riccati import thread_count
    R0s = sc.data["R0"]
    os.makedirs(out, exist_ok=True)
    threads = min(thread_count(), len(R0s))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda r: _one_shock_run(sc, r, out, header), R0s))
    else:
        results = [_one_shock_run(sc, r, out, header) for r in R0s]
    rows = [r for r, _ in results]
    rd = RunDir(os.path.join(out, "sweep"), header)
    rd.csv("sweep.csv", ["R0", "T_bound", "T_reached", "reason", "validated"], rows)
    rd.commit()
    codes = [c for _, c in results]
    if EXIT_BREAKDOWN in codes:
        return EXIT_BREAKDOWN
    return EXIT_INVALID if EXIT_INVALID in codes else EXIT_OK


def cmd_riccati(sc, out, header, seed):
    from .riccati import blowup_problem, random_problem, run_batch
    d = sc.data
    problems = list(d["problems"])
    rng = np.random.default_rng(seed)
    for i in range(d["random"]):
        p = random_problem(rng, T=d["T"])
        p.label = f"random-{i}"
        problems.append(p)
    for i in range(d["blowup"]):
        p = blowup_problem(rng)
        p.label = f"blowup-{i}"
        problems.append(p)
    rows = run_batch(problems)
    rd = RunDir(out, header)
    rd.csv("riccati.csv", ["id", "cond1", "cond2", "K", "completed", "bound_ok"],
           ([r.id, r.cond1, r.cond2, r.K, r.completed, r.bound_ok] for r in rows))
    rd.commit()
    # the lemma promises completion and bounds whenever both conditions hold
    broken = [r for r in rows if r.cond1 and r.cond2 and not (r.completed and r.bound_ok)]
    return EXIT_INVALID if broken else EXIT_OK


def main(argv=None):
    from .scenario import parse_scenario, scenario_hash
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"shockfront: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
        sc = parse_scenario(raw, args.command)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"shockfront: bad configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    header = f"shockfront-run {__version__} {scenario_hash(raw, args.seed)}"
    try:
        if args.command == "thermo-check":
            code = cmd_thermo_check(sc, args.out, header)
        elif args.command == "simulate-smooth":
            code = cmd_simulate_smooth(sc, args.out, header)
        elif args.command == "build-shock":
            code = cmd_build_shock(sc, args.out, header)
        else:
            code = cmd_riccati(sc, args.out, header, args.seed)
    except ConfigError as exc:
        print(f"shockfront: bad configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HypothesisViolated, CompatibilityError) as exc:
        print(f"shockfront: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ShockfrontError as exc:
        print(f"shockfront: numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
