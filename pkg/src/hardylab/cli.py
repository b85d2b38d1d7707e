"""Command line entry point ``hardy``.

Global flags (--out, --jobs, --seed, --tol) may be given before or after the
subcommand.  Exit status: 0 all runs within tolerance, 2 validation failure
(nothing was run), 3 at least one run failed or missed its tolerance.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import artifacts
from .params import HardyParams, ParameterError, derive_exponents, subcritical

EXIT_OK, EXIT_VALIDATION, EXIT_PARTIAL = 0, 2, 3


class ManifestError(ValueError):
    pass


@dataclass
class RunResult:
    report: dict
    ok: bool
    series: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# value parsing


def parse_number(text: str) -> float | int | str:
    t = text.strip()
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(Fraction(t))
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return float(t)
    except ValueError:
        return t


def expand_value(text: str) -> list:
    """'a:b:n' expands to n evenly spaced values from a to b inclusive."""
    parts = text.split(":")
    if len(parts) == 3:
        lo, hi, n = (parse_number(x) for x in parts)
        if not isinstance(n, int) or n < 1 or isinstance(lo, str) or isinstance(hi, str):
            raise ManifestError(f"bad range {text!r}")
        return [float(v) for v in np.linspace(lo, hi, n)]
    return [parse_number(text)]


# ---------------------------------------------------------------------------
# per-point runners; each returns RunResult


def _g(opts, key, default):
    v = opts.get(key, default)
    return default if v is None else v


def run_exponents(p: HardyParams, opts: dict) -> RunResult:
    ex = derive_exponents(p)
    rep = {"params": p.to_dict(), "exponents": ex.to_dict()}
    if p.q is not None:
        rep["subcritical"] = subcritical(p)
    return RunResult(rep, True)


def run_admissible(p: HardyParams, opts: dict) -> RunResult:
    from .admissibility import capacity_index, dirac_admissible
    c = capacity_index(p)
    rep = {"params": p.to_dict(), "index": c.to_dict(), "dirac_admissible": dirac_admissible(p),
           "q_c": derive_exponents(p).q_c}
    return RunResult(rep, True)


def run_omega(p: HardyParams, opts: dict) -> RunResult:
    from . import spherical as sph
    n = int(_g(opts, "n", 512))
    tol = float(_g(opts, "tol", 1e-3))
    g = sph.AzimuthalGrid.uniform(n)
    method = _g(opts, "method", "shooting")
    if method in ("shoot", "shooting"):
        sol = sph.solve_omega_shooting(p, g, tol=tol)
    elif method == "variational":
        sol = sph.solve_omega_variational(p, g)
    else:
        raise ValueError(f"unknown method {method!r}")
    rep = sol.report()
    rep.pop("energy_history", None)
    expected = sph.Verdict.EXISTS if subcritical(p) else sph.Verdict.NONEXISTENT
    ok = sol.verdict is expected
    if sol.omega is not None:
        ok = ok and sol.residual_norm <= tol
        table = {"theta": sol.theta, "omega": sol.omega, "psi": sol.psi}
        return RunResult(rep, ok, {"omega": (sol.theta, sol.omega)}, {"profile": table})
    return RunResult(rep, ok)


def run_linear1d(p: HardyParams, opts: dict) -> RunResult:
    from . import linear1d as l1
    action = _g(opts, "action", "eigen")
    mesh = l1.IntervalMesh.graded(d_min=float(_g(opts, "d_min", 1e-8)), ratio=float(_g(opts, "ratio", 0.75)))
    a = 0.5 * derive_exponents(p).alpha_plus
    if action == "eigen":
        res = l1.eigenpair(p, mesh)
        slope = l1.local_exponent(res.phi)
        rep = {"lambda_kappa": res.lambda_kappa, "log_slope": slope, "expected_slope": a,
               "iterations": res.iterations}
        ok = abs(slope - a) <= 0.01
        series = {"phi": (mesh.nodes, res.phi.values)}
    elif action in ("hardy", "hardy-const"):
        h = l1.hardy_constant_check(mesh)
        rep = h.to_dict()
        ok = h.constant >= 0.25 - 1e-3
        series = {}
    elif action == "green":
        lo, hi = l1.envelope_bounds(p, mesh, stride=int(_g(opts, "stride", 8)))
        rep = {"wronskian": l1.green_wronskian(p), "envelope_lower": lo, "envelope_upper": hi}
        ok = lo > 0 and math.isfinite(hi)
        series = {}
    elif action == "dirichlet":
        sol = l1.dirichlet_W(p, mesh, float(_g(opts, "h0", 1.0)), float(_g(opts, "h1", 0.0)))
        lim = l1.boundary_limit(p, sol)
        rep = {"h0": sol.h0, "h1": sol.h1, **lim}
        ok = abs(lim["limit"] - sol.h0) <= float(_g(opts, "tol", 1e-2)) * max(1.0, abs(sol.h0))
        series = {"u": (mesh.nodes, sol.u.values)}
    else:
        raise ValueError(f"unknown linear1d action {action!r}")
    rep["params"] = p.to_dict()
    rep["action"] = action
    rep["mesh"] = {"n": int(mesh.nodes.size), "nodes_per_decade": mesh.nodes_per_decade()}
    return RunResult(rep, bool(ok), series)


def run_kernel(p: HardyParams, opts: dict) -> RunResult:
    from . import kernels as kn
    action = _g(opts, "action", "residual")
    cfg = kn.KernelConfig(p)
    N = p.N
    if action == "eval":
        x = np.array([float(v) for v in str(_g(opts, "x", "0,0,1")).split(",")])
        rep = {"x": x, "K": float(kn.poisson_kernel(cfg, x))}
        ok = True
    elif action == "residual":
        lo = [0.2] * (N - 1) + [0.3]
        hi = [0.6] * (N - 1) + [0.9]
        pts = kn.box_points(lo, hi, 4)
        lad = kn.residual_ladder(cfg, pts, 0.02, levels=4)
        rep = dict(lad)
        ok = all(abs(o - 2.0) <= 0.2 for o in lad["order"])
    elif action == "homogeneity":
        rep = kn.homogeneity_degree(cfg, np.array([[0.3] * (N - 1) + [0.5], [0.1] * (N - 1) + [0.9]]))
        ok = abs(rep["degree"] - rep["expected"]) <= 1e-6
    elif action in ("decay", "marcinkiewicz"):
        s = np.geomspace(float(_g(opts, "s_min", 10.0)), float(_g(opts, "s_max", 1000.0)), 9)
        method = _g(opts, "method", "quadrature")
        rep = kn.marcinkiewicz_decay(cfg, s, method=method, n_samples=int(_g(opts, "n_samples", 400_000)),
                                     seed=int(_g(opts, "seed", 0)), jobs=1)
        ok = rep["rel_error"] <= 0.05
        rep["action"] = action
        rep["params"] = p.to_dict()
        return RunResult(rep, bool(ok), tables={"levels": {"s": s, "F": rep["F"]}})
    elif action == "integrability":
        r = kn.kernel_Lq_integrability(cfg, p.require_q())
        rep = r.to_dict()
        rep.pop("partial_integrals")
        rep["q_c"] = derive_exponents(p).q_c
        expected = "Finite" if subcritical(p) else "Divergent"
        ok = r.verdict in (expected, "Inconclusive")
    else:
        raise ValueError(f"unknown kernel action {action!r}")
    rep["params"] = p.to_dict()
    rep["action"] = action
    return RunResult(rep, bool(ok))


def run_bvp(p: HardyParams, opts: dict) -> RunResult:
    from . import bvp
    action = _g(opts, "action", "dirac")
    if action == "maximal":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", bvp.ExtrapolationWarning)
            rep = bvp.solve_maximal(p, n1=int(_g(opts, "n1", 41)))
        rep["params"] = p.to_dict()
        rep["action"] = action
        return RunResult(rep, rep["rel_error"] <= 0.05)
    mesh = bvp.PolarMesh(float(_g(opts, "r_in", 1e-3)), float(_g(opts, "rho", 0.9)),
                         int(_g(opts, "n_theta", 41)), N=p.N)
    if action == "dirac":
        k = float(_g(opts, "k", 1.0))
        sol = bvp.solve_dirac(p, mesh, k)
        rep = sol.report.to_dict()
        ratio = rep["constants"]["ray_ratio"]
        ok = ratio is None or (0.9 <= ratio["min"] and ratio["max"] <= 1.1)
        r = mesh.radii
        return RunResult(rep, ok, {"axis": (r, sol.u.values[:, 0])})
    if action == "strong":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", bvp.LadderWarning)
            res = bvp.solve_strong_singularity(p, mesh)
        omega = bvp.omega_on_mesh(p, mesh)
        mask = bvp.interior_mask(mesh)
        dist = {repr(r): bvp.profile_distance(prof, omega, mask) for r, prof in res.profiles.items()}
        rep = res.report.to_dict()
        rep.update(profile_distance=dist, ladder=res.ladder)
        ok = res.saturated and all(v <= 0.05 for v in dist.values())
        series = {f"profile_r{r:g}": (mesh.theta, prof) for r, prof in res.profiles.items()}
        series["omega"] = (mesh.theta, omega)
        tables = {f"profile_r{r:g}": {"theta": mesh.theta, "scaled_u": prof, "omega": omega}
                  for r, prof in res.profiles.items()}
        return RunResult(rep, bool(ok), series, tables)
    raise ValueError(f"unknown bvp action {action!r}")


def _barrier_spec(p: HardyParams, opts: dict):
    from .barriers import BarrierSpec
    gamma = opts.get("gamma")
    if gamma is None and not p.critical_kappa:
        ex = derive_exponents(p)
        gamma = 0.25 * (ex.alpha_minus + ex.alpha_plus)
    q = p.require_q()
    g_eff = 0.5 if p.critical_kappa else float(gamma)
    beta = opts.get("beta")
    if beta is None:
        beta = max(2.0 / (q - 1.0) + g_eff, 0.5 * (p.N - 2), 1.0)
    return BarrierSpec(p, float(_g(opts, "R", 1.0)), float(beta), None if gamma is None else float(gamma),
                       float(_g(opts, "Lambda", 1.0)))


def run_barrier(p: HardyParams, opts: dict) -> RunResult:
    from . import barriers as br
    action = _g(opts, "action", "certify")
    spec = _barrier_spec(p, opts)
    n = int(_g(opts, "n", 200))
    if action == "eval":
        val = br.barrier_eval(spec, float(_g(opts, "rho", 0.0)), float(_g(opts, "xN", 0.5)))
        rep = {"spec": spec.to_dict(), "value": val}
        ok = True
    elif action == "threshold":
        rep = {"spec": spec.to_dict(), "threshold": br.lambda_threshold(spec, n),
               "constant": br.certified_constant(spec, n), "powers": list(br.threshold_powers(spec))}
        ok = True
    elif action == "certify":
        rep = br.certify(spec, float(_g(opts, "factor", 10.0)), n)
        ok = rep["certified"] and rep["ladder_monotone"]
    else:
        raise ValueError(f"unknown barrier action {action!r}")
    rep["action"] = action
    return RunResult(rep, bool(ok))


RUNNERS: dict[str, Callable[[HardyParams, dict], RunResult]] = {
    "exponents": run_exponents,
    "admissible": run_admissible,
    "omega": run_omega,
    "linear1d": run_linear1d,
    "kernel": run_kernel,
    "bvp": run_bvp,
    "barrier": run_barrier,
}

# commands whose grid points need q
NEEDS_Q = {"admissible", "omega", "bvp", "barrier"}


# ---------------------------------------------------------------------------
# manifests


@dataclass
class RunManifest:
    command: str
    grid: dict
    options: dict
    out: Optional[str] = None
    seed: int = 0
    tol: Optional[float] = None

    def points(self) -> list[dict]:
        keys = sorted(self.grid)
        if any(len(self.grid[k]) == 0 for k in keys):
            return []
        return [dict(zip(keys, combo)) for combo in itertools.product(*(self.grid[k] for k in keys))]


RESERVED = {"command", "out", "seed", "tol", "jobs"}
GRID_KEYS = ("N", "kappa", "q")


def _manifest_from_pairs(pairs: list[tuple[str, list]]) -> RunManifest:
    values: dict[str, list] = {}
    for k, vs in pairs:
        values.setdefault(k, []).extend(vs)
    if "command" not in values or len(values["command"]) != 1:
        raise ManifestError("manifest needs exactly one 'command'")
    command = str(values.pop("command")[0])
    head = command.split(".")[0]
    if head not in RUNNERS:
        raise ManifestError(f"unknown command {command!r}")
    single = {}
    for k in ("out", "seed", "tol", "jobs"):
        if k in values:
            if len(values[k]) != 1:
                raise ManifestError(f"{k!r} must appear once")
            single[k] = values.pop(k)[0]
    grid = {}
    options = {}
    if "." in command:
        options["action"] = command.split(".", 1)[1]
    for k, vs in values.items():
        if k in GRID_KEYS or len(vs) > 1:
            grid[k] = vs
        else:
            options[k] = vs[0]
    for k in ("N", "kappa"):
        grid.setdefault(k, [])
    return RunManifest(command, grid, options, single.get("out"), int(single.get("seed", 0)),
                       None if single.get("tol") is None else float(single["tol"]))


def parse_manifest_text(text: str) -> RunManifest:
    """key=value lines (repeat a key for a list, 'a:b:n' for a range) or a JSON object."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ManifestError(f"invalid JSON manifest: {exc}") from exc
        pairs = []
        for k, v in obj.items():
            vs = v if isinstance(v, list) else [v]
            out = []
            for x in vs:
                out.extend(expand_value(x) if isinstance(x, str) and k != "command" else [x])
            pairs.append((k, out))
        return _manifest_from_pairs(pairs)
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ManifestError(f"line {lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        if not k:
            raise ManifestError(f"line {lineno}: empty key")
        pairs.append((k, [v] if k == "command" else expand_value(v)))
    return _manifest_from_pairs(pairs)


def validate_points(manifest: RunManifest) -> list[tuple[dict, HardyParams]]:
    head = manifest.command.split(".")[0]
    out = []
    for pt in manifest.points():
        try:
            p = HardyParams(pt["N"], pt["kappa"], pt.get("q"))
        except (ParameterError, TypeError) as exc:
            raise ManifestError(f"grid point {pt}: {exc}") from exc
        if head in NEEDS_Q and p.q is None:
            raise ManifestError(f"command {head!r} needs q")
        if head == "kernel" and manifest.options.get("action", pt.get("action")) == "integrability" and p.q is None:
            raise ManifestError("kernel integrability needs q")
        out.append((pt, p))
    return out


def _execute(job):
    head, p, opts = job
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = RUNNERS[head](p, opts)
        return {"status": "ok" if res.ok else "tolerance", "report": artifacts.clean(res.report),
                "series": {k: (np.asarray(x).tolist(), np.asarray(y).tolist()) for k, (x, y) in res.series.items()},
                "tables": {k: {c: np.asarray(v).tolist() for c, v in t.items()} for k, t in res.tables.items()},
                "elapsed": time.perf_counter() - t0}
    except Exception as exc:  # recorded, not fatal to the sweep
        return {"status": "error", "report": {"error": f"{type(exc).__name__}: {exc}"}, "series": {}, "tables": {},
                "elapsed": time.perf_counter() - t0}


def run_manifest(manifest: RunManifest, out: Optional[Path], jobs: int = 1) -> int:
    try:
        points = validate_points(manifest)
    except ManifestError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if not points:
        return EXIT_OK
    head = manifest.command.split(".")[0]
    jobs_in = []
    for pt, p in points:
        opts = dict(manifest.options)
        opts.update({k: v for k, v in pt.items() if k not in GRID_KEYS})
        opts.setdefault("seed", manifest.seed)
        if manifest.tol is not None:
            opts.setdefault("tol", manifest.tol)
        jobs_in.append((head, p, opts))
    t0 = time.time()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_execute, jobs_in))
    else:
        results = [_execute(j) for j in jobs_in]
    rows = []
    timings = {}
    for i, ((pt, p), res) in enumerate(zip(points, results)):
        tag = f"run_{i:04d}"
        timings[tag] = res.pop("elapsed")
        row = {"run": tag, "status": res["status"], **{k: pt.get(k) for k in GRID_KEYS}}
        extra = {k: v for k, v in pt.items() if k not in GRID_KEYS}
        row.update(extra)
        row.update(artifacts.scalar_columns(res["report"]))
        rows.append(row)
        if out is not None:
            artifacts.write_json(out / "runs" / f"{tag}.json",
                                 {"run": tag, "command": manifest.command, "point": pt, "status": res["status"],
                                  "seed": manifest.seed, "options": jobs_in[i][2], "report": res["report"]})
            for name, (x, y) in res["series"].items():
                artifacts.write_series(out / "plots" / f"{tag}_{name}.dat", x, y)
            for name, cols in res["tables"].items():
                artifacts.write_columns(out / "tables" / f"{tag}_{name}.csv", cols)
    failed = sum(r["status"] != "ok" for r in rows)
    if out is not None:
        artifacts.write_csv(out / "table.csv", rows, leading=("run", "status") + GRID_KEYS)
        artifacts.write_json(out / "summary.json", {"command": manifest.command, "n_runs": len(rows),
                                                    "n_failed": failed, "seed": manifest.seed})
        (out / "meta").mkdir(parents=True, exist_ok=True)
        artifacts.write_json(out / "meta" / "metadata.json",
                             artifacts.metadata({"wall_seconds": time.time() - t0, "run_seconds": timings,
                                                 "jobs": jobs}))
    return EXIT_OK if failed == 0 else EXIT_PARTIAL


# ---------------------------------------------------------------------------
# argument parsing


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--out", default=d, help="output directory for reports")
    parser.add_argument("--jobs", type=int, default=argparse.SUPPRESS if suppress else 1)
    parser.add_argument("--seed", type=int, default=d)
    parser.add_argument("--tol", type=float, default=d)


def _params_flags(parser, need_q: bool):
    parser.add_argument("--N", type=int, required=True)
    parser.add_argument("--kappa", type=str, required=True, help="e.g. 0.25 or 3/16")
    parser.add_argument("--q", type=str, required=need_q, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardy", description="Boundary singularity lab for -Lap u - kappa u/d^2 + |u|^(q-1)u = 0")
    _global_flags(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, need_q, **kw):
        sp = sub.add_parser(name, **kw)
        _global_flags(sp, suppress=True)
        _params_flags(sp, need_q)
        return sp

    add("exponents", False, help="characteristic and critical exponents")
    add("admissible", True, help="capacity index and Dirac admissibility")
    sp = add("omega", True, help="spherical profile omega_kappa")
    sp.add_argument("--n", "--grid", dest="n", type=int, default=512)
    sp.add_argument("--method", choices=("shoot", "shooting", "variational"), default="shooting")
    sp = add("linear1d", False, help="interval eigenproblem, Hardy constant, Green function")
    sp.add_argument("action", choices=("eigen", "hardy", "hardy-const", "green", "dirichlet"))
    sp.add_argument("--h0", type=float, default=1.0)
    sp.add_argument("--h1", type=float, default=0.0)
    sp = add("kernel", False, help="half-space kernel diagnostics")
    sp.add_argument("action", choices=("eval", "residual", "homogeneity", "decay", "marcinkiewicz",
                                       "integrability"))
    sp.add_argument("--x", default="0,0,1", help="comma separated point for eval")
    sp.add_argument("--method", choices=("quadrature", "montecarlo"), default="quadrature")
    sp.add_argument("--n-samples", dest="n_samples", type=int, default=400_000)
    sp = add("bvp", True, help="2-D boundary value problems")
    sp.add_argument("action", choices=("dirac", "strong", "maximal"))
    sp.add_argument("--k", type=float, default=1.0)
    sp.add_argument("--r-in", "--rin", dest="r_in", type=float, default=1e-3)
    sp.add_argument("--rho", type=float, default=0.9)
    sp.add_argument("--n-theta", dest="n_theta", type=int, default=41)
    sp = add("barrier", True, help="flat-model boundary barriers")
    sp.add_argument("action", choices=("eval", "threshold", "certify"))
    sp.add_argument("--R", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--Lambda", type=float, default=1.0)
    sp.add_argument("--rho", type=float, default=0.0)
    sp.add_argument("--xN", type=float, default=0.5)
    sp.add_argument("--n", type=int, default=200)
    sp = sub.add_parser("sweep", help="run a manifest over a parameter grid")
    _global_flags(sp, suppress=True)
    sp.add_argument("manifest", help="manifest file (key=value lines or JSON)")
    return ap


def _single(args) -> int:
    try:
        p = HardyParams(args.N, float(Fraction(args.kappa)),
                        None if args.q is None else float(Fraction(args.q)))
        if args.command in NEEDS_Q:
            p.require_q()
    except (ParameterError, ValueError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    skip = {"command", "N", "kappa", "q", "out", "jobs"}
    opts = {k: v for k, v in vars(args).items() if k not in skip}
    from .barriers import ConstraintViolation
    from .bvp import NotAdmissibleError
    try:
        res = RUNNERS[args.command](p, opts)
    except (ConstraintViolation, NotAdmissibleError) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:
        print(f"run failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    sys.stdout.write(artifacts.dumps(res.report))
    if args.out:
        out = Path(args.out)
        artifacts.write_json(out / "report.json", res.report)
        for name, (x, y) in res.series.items():
            artifacts.write_series(out / "plots" / f"{name}.dat", x, y)
        for name, cols in res.tables.items():
            artifacts.write_columns(out / f"{name}.csv", cols)
        (out / "meta").mkdir(parents=True, exist_ok=True)
        artifacts.write_json(out / "meta" / "metadata.json", artifacts.metadata())
    return EXIT_OK if res.ok else EXIT_PARTIAL


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sweep":
        try:
            manifest = parse_manifest_text(Path(args.manifest).read_text(encoding="utf-8"))
        except (OSError, ManifestError) as exc:
            print(f"validation failure: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        # command-line flags override the manifest
        if args.seed is not None:
            manifest.seed = args.seed
        if args.tol is not None:
            manifest.tol = args.tol
        out = args.out or manifest.out
        return run_manifest(manifest, Path(out) if out else None, max(1, args.jobs))
    return _single(args)


if __name__ == "__main__":
    sys.exit(main())
