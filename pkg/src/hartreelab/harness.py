"""Configuration, experiment orchestration, persistence and the CLI.

Config files are flat ``section.key = value`` lines with ``#`` comments.
Every experiment writes its artifacts plus a manifest.json carrying the
config echo, library versions, wall time, verdicts and a sha256 per output
file.  With a fixed seed and a single thread the CSV outputs are
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import evolve as ev
from . import groundstate as gs
from . import params as pm
from . import virial as vr
from .disc import (KLambdaOperator, RadialField, build_grid, build_riesz_kernel,
                   gaussian_field, hardy_check, mass, read_field_csv,
                   write_field_csv)
from .errors import DomainError, HartreeLabError, ParseError, ValidationError

FLOAT_FMT = "{:.17e}"

EXPERIMENTS = ("check-params", "ground-state", "evolve", "dichotomy",
               "virial-check", "gn-verify")

# key -> (type, default); None default means required (per experiment)
SCHEMA = {
    "experiment": (str, None),
    "seed": (int, 0),
    "output.dir": (str, "out"),
    "params.n": (int, None),
    "params.lambda": (float, 0.0),
    "params.alpha": (float, None),
    "params.tau": (float, None),
    "params.eps": (int, -1),
    "grid.J": (int, 1024),
    "grid.R_max": (float, 15.0),
    "grid.mapping": (str, "uniform"),
    "grid.r_min": (float, 0.0),          # 0: mapping default
    "solver.tol_J": (float, 1e-10),
    "solver.tol_el": (float, 1e-3),
    "solver.max_iters": (int, 20000),
    "solver.multistart": (int, 1),
    "solver.mode": (str, "variational"),
    "evolve.T": (float, 1.0),
    "evolve.dt": (float, 1e-3),
    "evolve.cadence": (float, 0.01),
    "evolve.init": (str, "gaussian"),
    "evolve.amp": (float, 0.5),
    "evolve.sigma": (float, 1.0),
    "evolve.adaptive": (bool, True),
    "evolve.energy_jump_tol": (float, 1e-5),
    "evolve.dt_min": (float, 1e-9),
    "evolve.boundary_guard": (float, -1.0),   # < 0: disabled
    "evolve.save_fields": (bool, False),
    "evolve.wall": (str, "dirichlet"),
    "dichotomy.c_list": (str, "0.8,0.9,1.1,1.2"),
    "dichotomy.T": (float, 2.0),
    "virial.R_list": (str, "4.0"),
    "virial.traj": (str, ""),
    "gn.fields": (int, 100),
}


def _coerce(key: str, raw: str, lineno: int):
    typ, _ = SCHEMA[key]
    raw = raw.strip()
    try:
        if typ is bool:
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        return typ(raw)
    except ValueError:
        raise ParseError(f"line {lineno}: cannot parse {key} = {raw!r} as "
                         f"{typ.__name__}") from None


def parse_config_text(text: str) -> dict:
    """Flat key-value parser; raises ParseError with line numbers."""
    out: dict = {}
    issues = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ParseError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in SCHEMA:
            issues.append(f"unknown key {key!r} (line {lineno})")
            continue
        out[key] = _coerce(key, raw, lineno)
    if issues:
        raise ValidationError(issues)
    return out


def load_config(path: str | None = None, overrides: dict | None = None) -> dict:
    """Config with defaults, validated; aggregates all violations."""
    cfg = {k: v for k, (_, v) in SCHEMA.items() if v is not None}
    if path:
        with open(path) as fh:
            cfg.update(parse_config_text(fh.read()))
    issues = []
    for key, val in (overrides or {}).items():
        if key not in SCHEMA:
            issues.append(f"unknown key {key!r} (override)")
            continue
        cfg[key] = val if not isinstance(val, str) else _coerce(key, val, 0)
    exp = cfg.get("experiment")
    if exp not in EXPERIMENTS:
        issues.append(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")
    if exp != "virial-check":
        for key in ("params.n", "params.alpha", "params.tau"):
            if key not in cfg:
                issues.append(f"missing required key {key}")
    if "params.tau" in cfg and not cfg["params.tau"] > 0:
        issues.append(f"params.tau must be > 0, got {cfg['params.tau']}")
    if "params.n" in cfg and cfg["params.n"] < 3:
        issues.append(f"params.n must be >= 3, got {cfg['params.n']}")
    if cfg.get("grid.mapping", "uniform") not in ("uniform", "log"):
        issues.append(f"grid.mapping must be uniform|log, got {cfg['grid.mapping']!r}")
    if cfg.get("evolve.wall", "dirichlet") not in ("dirichlet", "harmonic"):
        issues.append(f"evolve.wall must be dirichlet|harmonic")
    if issues:
        raise ValidationError(issues)
    return cfg


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return FLOAT_FMT.format(x)
    return str(x)


def write_csv(path: str, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


class Workspace:
    """Collects outputs for one experiment and emits the manifest."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.dir = cfg["output.dir"]
        os.makedirs(self.dir, exist_ok=True)
        self.outputs: list = []
        self.verdicts: dict = {}
        self.t0 = time.time()

    def path(self, name: str) -> str:
        p = os.path.join(self.dir, name)
        os.makedirs(os.path.dirname(p), exist_ok=True)
        return p

    def register(self, path: str) -> None:
        self.outputs.append(path)

    def csv(self, name: str, header: list, rows: list) -> str:
        p = self.path(name)
        write_csv(p, header, rows)
        self.register(p)
        return p

    def json(self, name: str, payload: dict) -> str:
        p = self.path(name)
        with open(p, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True, default=float)
            fh.write("\n")
        self.register(p)
        return p

    def finish(self) -> str:
        manifest = {
            "experiment": self.cfg.get("experiment"),
            "config": {k: self.cfg[k] for k in sorted(self.cfg)},
            "versions": {
                "hartreelab": __version__,
                "numpy": np.__version__,
                "python": sys.version.split()[0],
            },
            "wall_time_s": time.time() - self.t0,
            "verdicts": self.verdicts,
            "outputs": [{"path": os.path.relpath(p, self.dir),
                         "sha256": _sha256(p)} for p in self.outputs],
        }
        p = os.path.join(self.dir, "manifest.json")
        with open(p, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=float)
            fh.write("\n")
        return p


def _derive_params(cfg: dict) -> pm.ModelParams:
    return pm.derive(cfg["params.n"], cfg["params.lambda"], cfg["params.alpha"],
                     cfg["params.tau"], cfg["params.eps"])


def _build_stack(cfg: dict, wall: str):
    prm = _derive_params(cfg)
    r_min = cfg["grid.r_min"] if cfg["grid.r_min"] > 0 else None
    grid = build_grid(prm.n, cfg["grid.R_max"], cfg["grid.J"],
                      cfg["grid.mapping"], r_min=r_min)
    kern = build_riesz_kernel(grid, prm.alpha)
    op = KLambdaOperator(grid, prm.lam, wall=wall)
    return prm, grid, kern, op


def _solver_options(cfg: dict, mode: str | None = None) -> gs.SolverOptions:
    return gs.SolverOptions(tol_J=cfg["solver.tol_J"], tol_el=cfg["solver.tol_el"],
                            max_iters=cfg["solver.max_iters"],
                            multistart=cfg["solver.multistart"],
                            seed=cfg["seed"], mode=mode or cfg["solver.mode"])


# ---------------------------------------------------------------------------
# Experiment pipelines
# ---------------------------------------------------------------------------

def run_check_params(cfg: dict, ws: Workspace) -> int:
    try:
        prm = _derive_params(cfg)
    except DomainError as exc:
        ws.verdicts["status"] = "infeasible-parameters"
        ws.json("check_params.json", {"error": str(exc)})
        return 2
    thm = pm.check_theorem_ranges(prm)
    lem = pm.check_lemma_ranges(prm)
    wit = pm.find_exponent_witness(prm)

    def report(rep):
        return {"passed": rep.passed, "tau_window": list(rep.tau_window),
                "checks": [{"name": c.name, "slack": c.slack, "passed": c.passed,
                            "marginal": c.marginal} for c in rep.checks]}

    payload = {
        "kappa": prm.kappa, "p": prm.p,
        "theorem_ranges": report(thm), "lemma_ranges": report(lem),
        "ranges_disagree": lem.disagrees_with_theorem,
    }
    if isinstance(wit, pm.ExponentWitness):
        payload["witness"] = {
            "q": wit.q, "r": wit.r,
            "inv_a1": wit.inv_a1, "inv_b1": wit.inv_b1, "inv_a2": wit.inv_a2,
            "inv_b2": wit.inv_b2, "inv_a3": wit.inv_a3, "inv_b4": wit.inv_b4,
            "reverify_violations": pm.verify_witness(prm, wit),
        }
        status = 0
    else:
        payload["infeasible_constraint"] = wit.constraint
        status = 2
    ws.verdicts["status"] = "witness" if status == 0 else "infeasible"
    ws.json("check_params.json", payload)
    return status


def _ground_state(cfg: dict, mode: str | None = None):
    prm, grid, kern, op = _build_stack(cfg, wall="harmonic")
    result = gs.minimize_weinstein(prm, grid, kern, op,
                                   opts=_solver_options(cfg, mode))
    return prm, grid, kern, op, result


def run_ground_state(cfg: dict, ws: Workspace) -> int:
    prm, grid, kern, op, result = _ground_state(cfg)
    write_field_csv(result.phi, ws.path("phi.csv"),
                    meta={"C": result.C, "params": {
                        "n": prm.n, "lambda": prm.lam, "alpha": prm.alpha,
                        "tau": prm.tau, "eps": prm.epsilon}})
    ws.register(ws.path("phi.csv"))
    ws.register(ws.path("phi.csv") + ".json")
    ws.json("result.json", {
        "C": result.C, "J_value": result.J_value,
        "pohozaev_residual": result.pohozaev_residual,
        "el_residual": result.el_residual, "iterations": result.iterations,
        "multiple_basins": result.multiple_basins,
        "basin_spread": result.basin_spread,
        "form_phi": result.form_phi, "P_phi": result.P_phi,
        "energy_phi": result.energy_phi,
    })
    ws.verdicts["status"] = "converged"
    return 0


def _initial_data(cfg: dict, prm, grid, kern, op) -> tuple:
    """(field, ground_state_or_None) per evolve.init."""
    spec_str = cfg["evolve.init"]
    if spec_str == "gaussian":
        return gaussian_field(grid, cfg["evolve.amp"], cfg["evolve.sigma"]), None
    if spec_str.startswith("groundstate-scaled:"):
        c = float(spec_str.split(":", 1)[1])
        result = gs.minimize_weinstein(prm, grid, kern, op,
                                       opts=_solver_options(cfg, "anchored"))
        return RadialField(grid, c * result.phi.values), result
    if spec_str.startswith("file:"):
        field, _ = read_field_csv(spec_str.split(":", 1)[1])
        if field.grid.content_hash() != grid.content_hash():
            raise ValidationError([f"field file grid does not match config grid"])
        return RadialField(grid, field.values), None
    raise ValidationError([f"unknown evolve.init {spec_str!r}"])


def _run_and_write(cfg: dict, ws: Workspace, prm, grid, kern, op, u0,
                   ground_state, tag: str = "") -> ev.RunResult:
    guard = cfg["evolve.boundary_guard"]
    rr = ev.run(u0, prm, T=cfg["evolve.T"], dt=cfg["evolve.dt"],
                cadence=cfg["evolve.cadence"], kernel=kern, op=op,
                ground_state=ground_state, adaptive=cfg["evolve.adaptive"],
                dt_min=cfg["evolve.dt_min"],
                energy_jump_tol=cfg["evolve.energy_jump_tol"],
                boundary_guard=guard if guard >= 0 else None,
                store_fields=cfg["evolve.save_fields"])
    name = f"trajectory{tag}.csv"
    ws.csv(name, list(ev.DiagnosticsRecord.CSV_COLUMNS),
           [r.row() for r in rr.records])
    if cfg["evolve.save_fields"]:
        for k, (t, field) in enumerate(rr.snapshots):
            p = ws.path(f"fields{tag}/snap_{k:05d}.csv")
            write_field_csv(field, p, meta={"t": t})
            ws.register(p)
            ws.register(p + ".json")
    return rr


def run_evolve(cfg: dict, ws: Workspace) -> int:
    prm, grid, kern, op = _build_stack(cfg, wall=cfg["evolve.wall"])
    u0, gstate = _initial_data(cfg, prm, grid, kern, op)
    rr = _run_and_write(cfg, ws, prm, grid, kern, op, u0, gstate)
    ws.verdicts["run"] = rr.verdict
    ws.verdicts["detector"] = ev.blowup_detector(rr.records, rr.dt_collapsed)
    ws.json("verdict.json", {
        "verdict": rr.verdict, "t_star": rr.t_star, "dt_final": rr.dt_final,
        "dt_collapsed": rr.dt_collapsed,
        "detector": ws.verdicts["detector"],
        "steps": rr.final.step_count,
    })
    return 0


def run_dichotomy(cfg: dict, ws: Workspace) -> int:
    """Threshold sweep u0 = c phi; classification versus observed dynamics.

    Solver and controller defaults here differ from the plain evolve
    pipeline: the reference state is the anchored quasi-soliton on the
    harmonic-exterior wall (its tail never vanishes at the box edge), the
    energy-jump tolerance is 1e-4 (the soliton's inhomogeneous cusp makes
    splitting jumps ~1.5e-5 |E| at the nominal step) and the dt floor is
    1e-5 so a collapse cascade resolves quickly.
    """
    cfg = dict(cfg)
    cfg["evolve.wall"] = "harmonic"
    prm, grid, kern, op = _build_stack(cfg, wall="harmonic")
    if prm.epsilon != -1:
        ws.verdicts["status"] = "outside-theory"
        ws.json("verdict.json", {"error": "dichotomy requires eps = -1"})
        return 2
    result = gs.minimize_weinstein(prm, grid, kern, op,
                                   opts=_solver_options(cfg, "anchored"))
    cs = [float(x) for x in cfg["dichotomy.c_list"].split(",")]
    rows = []
    agree_all = True
    for c in cs:
        u0 = RadialField(grid, c * result.phi.values)
        cls = ev.classify(u0, result, prm, kern, op)
        rr = ev.run(u0, prm, T=cfg["dichotomy.T"], dt=cfg["evolve.dt"],
                    cadence=cfg["evolve.cadence"], kernel=kern, op=op,
                    ground_state=result, energy_jump_tol=1e-4, dt_min=1e-5)
        det = ev.blowup_detector(rr.records, rr.dt_collapsed)
        agree = (cls["verdict"], det) in (("bounded-predicted", "bounded"),
                                          ("blowup-predicted", "blowup-detected"))
        agree_all = agree_all and agree
        i_max = max(r.functional_i for r in rr.records)
        rows.append([c, cls["ME"], cls["MG"], cls["MP"], cls["verdict"],
                     rr.verdict, det,
                     rr.t_star if rr.t_star is not None else float("nan"),
                     max(r.gradnorm for r in rr.records) / rr.records[0].gradnorm,
                     i_max, int(agree)])
    ws.csv("dichotomy.csv",
           ["c", "ME", "MG", "MP", "predicted", "run_verdict", "detector",
            "t_star", "grad_growth", "I_max", "agree"], rows)
    ws.verdicts["all_agree"] = bool(agree_all)
    ws.json("verdict.json", {"all_agree": bool(agree_all),
                             "C": result.C, "el_residual": result.el_residual,
                             "t1": result.C ** (-1.0 / (prm.p - 1.0))})
    return 0


def run_virial_check(cfg: dict, ws: Workspace) -> int:
    traj_dir = cfg["virial.traj"]
    if not traj_dir or not os.path.isdir(traj_dir):
        raise ValidationError([f"virial.traj must point at a trajectory "
                               f"directory, got {traj_dir!r}"])
    names = sorted(fn for fn in os.listdir(traj_dir)
                   if fn.endswith(".csv") and not fn.endswith(".json"))
    snapshots = []
    grid = None
    for fn in names:
        field, meta = read_field_csv(os.path.join(traj_dir, fn))
        if grid is None:
            grid = field.grid
        else:
            field = RadialField(grid, field.values)
        snapshots.append((float(meta["t"]), field))
    if len(snapshots) < 3:
        raise ValidationError(["trajectory has fewer than 3 snapshots"])
    prm = _derive_params(cfg)
    kern = build_riesz_kernel(grid, prm.alpha)
    op = KLambdaOperator(grid, prm.lam, wall=cfg["evolve.wall"])
    worst = 0.0
    for R in (float(x) for x in cfg["virial.R_list"].split(",")):
        mult = vr.build_multiplier(grid, R)
        reports = vr.virial_residual(snapshots, mult, prm, kern, op)
        rows = [[r.t, r.V, r.M, r.V2_fd, r.V2_analytic, *r.per_term, r.residual]
                for r in reports]
        ws.csv(f"virial_R{R:g}.csv",
               ["t", "V", "M", "V2_fd", "V2_analytic", "term1", "term2",
                "term3", "term4", "term5", "term6", "residual"], rows)
        worst = max(worst, max(r.residual for r in reports))
    ws.verdicts["max_residual"] = worst
    ws.json("verdict.json", {"max_residual": worst})
    return 0


def run_gn_verify(cfg: dict, ws: Workspace) -> int:
    prm, grid, kern, op, result = _ground_state(cfg)
    C = gs.sharp_constant(result, prm, kern, op)
    rng = np.random.default_rng(cfg["seed"])
    rows = []
    violations = 0
    for k in range(cfg["gn.fields"]):
        u = random_smooth_field(grid, rng)
        ratio, ok = gs.gn_verify(u, prm, kern, op, C)
        lhs, rhs, hardy_ok = hardy_check(u, op)
        violations += (not ok) + (not hardy_ok)
        rows.append([k, ratio, int(ok), lhs, rhs, int(hardy_ok)])
    ratio_phi, _ = gs.gn_verify(result.phi, prm, kern, op, C)
    ws.csv("gn.csv", ["field", "gn_ratio", "gn_pass", "hardy_lhs",
                      "hardy_rhs", "hardy_pass"], rows)
    ws.verdicts["violations"] = violations
    ws.json("verdict.json", {"C": C, "violations": violations,
                             "ratio_at_phi": ratio_phi})
    return 0


def random_smooth_field(grid, rng) -> RadialField:
    """Band-limited random radial field: a few smooth windowed humps."""
    r = grid.nodes
    vals = np.zeros(grid.J)
    for _ in range(4):
        center = rng.uniform(0.0, 0.45 * grid.R_max)
        width = rng.uniform(0.5, 0.12 * grid.R_max)
        vals += rng.standard_normal() * np.exp(-((r - center) / width) ** 2)
    vals *= np.exp(-((r / (0.7 * grid.R_max)) ** 8))
    return RadialField(grid, vals)


PIPELINES = {
    "check-params": run_check_params,
    "ground-state": run_ground_state,
    "evolve": run_evolve,
    "dichotomy": run_dichotomy,
    "virial-check": run_virial_check,
    "gn-verify": run_gn_verify,
}


def run_experiment(cfg: dict) -> int:
    """Dispatch; exit code 0 success, 2 infeasible/outside-theory, 1 error."""
    ws = Workspace(cfg)
    try:
        status = PIPELINES[cfg["experiment"]](cfg, ws)
    except HartreeLabError as exc:
        ws.verdicts["status"] = "error"
        ws.json("error.json", {"error": type(exc).__name__, "message": str(exc)})
        ws.finish()
        print(f"error: {exc}", file=sys.stderr)
        return 1
    ws.finish()
    return status


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def _add_common(sp):
    sp.add_argument("--config", default=None, help="config file path")
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("overrides", nargs="*",
                    help="extra section.key=value overrides")


def main(argv: list | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="hartreelab",
        description="Numerical laboratory for the energy-critical "
                    "inhomogeneous Hartree equation with inverse-square "
                    "potential")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check-params", help="exponent calculus report")
    sp.add_argument("--n", type=int)
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--tau", type=float)
    sp.add_argument("--eps", type=int)
    _add_common(sp)

    sp = sub.add_parser("ground-state", help="compute the ground state")
    sp.add_argument("--params-file", default=None,
                    help="config file holding the params block")
    sp.add_argument("--grid", default=None, help="J,Rmax,mapping")
    sp.add_argument("--tol", type=float, default=None, help="solver.tol_el")
    sp.add_argument("--multistart", type=int, default=None)
    _add_common(sp)

    sp = sub.add_parser("evolve", help="time integration with diagnostics")
    sp.add_argument("--init", default=None,
                    help="gaussian | groundstate-scaled:c | file:PATH")
    sp.add_argument("--T", type=float, default=None)
    sp.add_argument("--dt", type=float, default=None)
    sp.add_argument("--cadence", type=float, default=None)
    _add_common(sp)

    sp = sub.add_parser("dichotomy", help="threshold sweep u0 = c phi")
    sp.add_argument("--c-list", default=None)
    _add_common(sp)

    sp = sub.add_parser("virial-check", help="virial residuals on a trajectory")
    sp.add_argument("--traj", default=None, help="directory of field snapshots")
    sp.add_argument("--R", default=None, help="comma list of cutoff radii")
    _add_common(sp)

    sp = sub.add_parser("gn-verify", help="inequality scan against the constant")
    _add_common(sp)

    ns = ap.parse_args(argv)
    overrides: dict = {"experiment": ns.command}
    for item in ns.overrides:
        if "=" not in item:
            print(f"override must be key=value, got {item!r}", file=sys.stderr)
            return 1
        key, val = item.split("=", 1)
        overrides[key.strip()] = val.strip()
    if ns.out:
        overrides["output.dir"] = ns.out
    if ns.seed is not None:
        overrides["seed"] = ns.seed
    flag_map = {
        "check-params": [("n", "params.n"), ("lam", "params.lambda"),
                         ("alpha", "params.alpha"), ("tau", "params.tau"),
                         ("eps", "params.eps")],
        "ground-state": [("tol", "solver.tol_el"),
                         ("multistart", "solver.multistart")],
        "evolve": [("init", "evolve.init"), ("T", "evolve.T"),
                   ("dt", "evolve.dt"), ("cadence", "evolve.cadence")],
        "dichotomy": [("c_list", "dichotomy.c_list")],
        "virial-check": [("traj", "virial.traj"), ("R", "virial.R_list")],
        "gn-verify": [],
    }
    for attr, key in flag_map.get(ns.command, []):
        val = getattr(ns, attr, None)
        if val is not None:
            overrides[key] = str(val) if not isinstance(val, str) else val
    config_path = ns.config
    if ns.command == "ground-state" and ns.params_file and not config_path:
        config_path = ns.params_file
    if ns.command == "ground-state" and ns.grid:
        parts = ns.grid.split(",")
        overrides["grid.J"] = parts[0]
        if len(parts) > 1:
            overrides["grid.R_max"] = parts[1]
        if len(parts) > 2:
            overrides["grid.mapping"] = parts[2]
    try:
        cfg = load_config(config_path, overrides)
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        status = run_experiment(cfg)
    except DomainError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    return status


if __name__ == "__main__":
    sys.exit(main())
