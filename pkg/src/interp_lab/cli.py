"""Command-line interface: ``interp-lab <command> [flags]``.

Exit codes: 0 success, 1 per-point sweep failures, 2 bad input, 3 degenerate
geometry or zero Lagrange value, 4 solver failure or exhausted budget.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from interp_lab import bounds, dfo, eep, geometry
from interp_lab.errors import (
    AmbiguousRegion,
    BudgetExhausted,
    DegenerateSampleSet,
    DegenerateSwap,
    HypothesisViolated,
    InterpLabError,
    OutsideHull,
    ProblemFileError,
    SingularPartition,
    ZeroLagrangeValue,
)
from interp_lab.geometry import InterpolationInstance

EXIT_PARSE = 2
EXIT_GEOMETRY = 3
EXIT_SOLVER = 4

DEFAULT_GRID = (-2.5, 2.5, -1.5, 2.5, 20, 20)
SWEEP_COLUMNS = ("dispatcher", "eep", "improved", "quadratic")


def fmt(v: float) -> str:
    return format(float(v), ".17g")


# problem files -------------------------------------------------------------

@dataclass(frozen=True)
class ProblemFile:
    nu: float
    theta: tuple
    x: tuple | None = None

    def instance(self) -> InterpolationInstance:
        if self.x is None:
            raise ProblemFileError("problem has no query point x (use --x)")
        return InterpolationInstance(np.array(self.theta), np.array(self.x), self.nu)


def _finite_vector(v, what):
    if not isinstance(v, list) or not v:
        raise ProblemFileError(f"{what} must be a nonempty array of numbers")
    out = []
    for a in v:
        if isinstance(a, bool) or not isinstance(a, (int, float)) or not math.isfinite(a):
            raise ProblemFileError(f"{what} contains a non-finite or non-numeric entry: {a!r}")
        out.append(float(a))
    return tuple(out)


def parse_problem(text: str) -> ProblemFile:
    """Parse and validate a JSON problem document."""
    try:
        doc = json.loads(text, parse_constant=lambda c: float(c))
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must be a JSON object")
    unknown = set(doc) - {"nu", "theta", "x"}
    if unknown:
        raise ProblemFileError(f"unknown keys: {sorted(unknown)}")
    nu = doc.get("nu", 1.0)
    if isinstance(nu, bool) or not isinstance(nu, (int, float)) or not math.isfinite(nu) or nu <= 0:
        raise ProblemFileError("nu must be a positive finite number")
    if "theta" not in doc or not isinstance(doc["theta"], list):
        raise ProblemFileError("theta must be an array of points")
    theta = tuple(_finite_vector(p, "theta point") for p in doc["theta"])
    n = len(theta) - 1
    if n < 1 or any(len(p) != n for p in theta):
        raise ProblemFileError("theta must hold n+1 points with n coordinates each")
    x = doc.get("x")
    if x is not None:
        x = _finite_vector(x, "x")
        if len(x) != n:
            raise ProblemFileError(f"x must have {n} coordinates")
    return ProblemFile(float(nu), theta, x)


def dump_problem(pf: ProblemFile) -> str:
    """Serialize with 17 significant digits (lossless for doubles)."""
    vec = lambda v: "[" + ", ".join(fmt(a) for a in v) + "]"
    parts = [f'"nu": {fmt(pf.nu)}', '"theta": [' + ", ".join(vec(p) for p in pf.theta) + "]"]
    if pf.x is not None:
        parts.append(f'"x": {vec(pf.x)}')
    return "{" + ", ".join(parts) + "}\n"


def parse_coords(text: str, what: str = "--x") -> tuple:
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError as exc:
        raise ProblemFileError(f"{what}: expected comma-separated numbers") from exc
    if not all(math.isfinite(v) for v in vals):
        raise ProblemFileError(f"{what}: coordinates must be finite")
    return vals


def parse_grid(text: str):
    parts = text.split(",")
    if len(parts) != 6:
        raise ProblemFileError("--grid expects a,b,c,d,nx,ny")
    try:
        a, b, c, d = (float(t) for t in parts[:4])
        nx, ny = int(parts[4]), int(parts[5])
    except ValueError as exc:
        raise ProblemFileError("--grid: malformed number") from exc
    if not all(math.isfinite(v) for v in (a, b, c, d)) or not (a < b and c < d):
        raise ProblemFileError("--grid: box must be nonempty")
    if nx < 2 or ny < 2:
        raise ProblemFileError("--grid: resolution must be at least 2 per axis")
    return a, b, c, d, nx, ny


def load_problem(args, need_x: bool = True) -> ProblemFile:
    if args.problem is None:
        raise ProblemFileError("--problem is required")
    try:
        with open(args.problem, encoding="utf-8") as fh:
            pf = parse_problem(fh.read())
    except OSError as exc:
        raise ProblemFileError(f"cannot read {args.problem}: {exc.strerror}") from exc
    x = pf.x
    if getattr(args, "x", None) is not None:
        x = parse_coords(args.x)
        if len(x) != len(pf.theta) - 1:
            raise ProblemFileError(f"--x must have {len(pf.theta) - 1} coordinates")
    nu = pf.nu
    if getattr(args, "nu", None) is not None:
        if not (math.isfinite(args.nu) and args.nu > 0):
            raise ProblemFileError("--nu must be positive")
        nu = args.nu
    pf = ProblemFile(nu, pf.theta, x)
    if need_x and pf.x is None:
        raise ProblemFileError("problem has no query point x (use --x)")
    return pf


def worker_count() -> int:
    env = os.environ.get("INTERP_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ProblemFileError("INTERP_LAB_THREADS must be an integer") from exc
    return os.cpu_count() or 1


def _out(text: str):
    sys.stdout.write(text)


# bound ----------------------------------------------------------------------

def _report_dict(rep: bounds.BoundReport) -> dict:
    d = {"value": rep.value, "method": rep.method.value, "sharp": rep.sharp.value}
    if rep.region is not None:
        d["region"] = rep.region.value
    if rep.witness is not None:
        d["witness"] = getattr(rep.witness, "kind", type(rep.witness).__name__)
    if rep.anchor_w is not None:
        d["anchor_w"] = [float(v) for v in rep.anchor_w]
    if rep.note:
        d["note"] = rep.note
    return d


def cmd_bound(args) -> int:
    inst = load_problem(args).instance()
    bary = geometry.barycentric(inst)
    curv = geometry.curvature(inst, bary)
    result = {"ell": [float(v) for v in bary.ell], "i_plus": list(bary.i_plus),
              "i_minus": list(bary.i_minus), "i_zero": list(bary.i_zero),
              "inertia": [curv.n_pos, curv.n_neg, curv.n_zero]}
    try:
        region = geometry.classify_region(inst, bary, curv)
        result["region"] = region.tag.value
        if region.labeling:
            result["labeling"] = list(region.labeling)
    except AmbiguousRegion as amb:
        result["region"] = "Ambiguous(" + "|".join(c.tag.value for c in amb.candidates) + ")"
    reps = {"anchored_at_x": bounds.bound_anchored(inst, bary, inst.x),
            "improved": bounds.bound_improved(inst, bary)}
    try:
        reps["waldron"] = bounds.bound_waldron(inst, bary)
    except OutsideHull:
        pass
    reps["quadratic"] = bounds.bound_quadratic(inst, curv)[0]
    if inst.dim == 2:
        reps["dispatcher"] = bounds.sharp_bound_bivariate(inst, args.tol)
    result["bounds"] = {k: _report_dict(v) for k, v in reps.items()}
    result["gradient_bound"] = bounds.bound_gradient(inst, bary)
    try:
        cert = bounds.certify_mu(inst, bary, curv)
        result["mu"] = {"all_nonneg": cert.all_nonneg, "min_entry": cert.min_entry}
    except (ZeroLagrangeValue, SingularPartition) as exc:
        result["mu"] = {"error": str(exc)}
    if args.eep:
        sol = eep.solve(eep.build(inst), args.tol)
        result["eep"] = {"objective": sol.objective, "iterations": sol.iterations,
                         "kkt_residual": sol.kkt_residual}

    lines = [f"ell            {' '.join(fmt(v) for v in bary.ell)}",
             f"I+ / I- / I0   {list(bary.i_plus)} / {list(bary.i_minus)} / {list(bary.i_zero)}",
             f"inertia(G)     {tuple(result['inertia'])}",
             f"region         {result['region']}"]
    for name, d in result["bounds"].items():
        lines.append(f"{name:<14} {fmt(d['value'])}  [{d['method']}, {d['sharp']}]")
    lines.append(f"gradient bound {fmt(result['gradient_bound'])}")
    mu = result["mu"]
    lines.append("mu certificate " + (f"error: {mu['error']}" if "error" in mu else
                                      f"{'pass' if mu['all_nonneg'] else 'fail'} (min {fmt(mu['min_entry'])})"))
    if "eep" in result:
        lines.append(f"eep            {fmt(result['eep']['objective'])}")
    _out("\n".join(lines) + "\n")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(result, fh, indent=2)
            fh.write("\n")
    return 0


# sweep ----------------------------------------------------------------------

def _sweep_point(task):
    theta, nu, x, cols, tol = task
    inst = InterpolationInstance(np.array(theta), np.array(x), nu)
    out = {}
    try:
        bary = geometry.barycentric(inst)
        if "dispatcher" in cols:
            rep = bounds.sharp_bound_bivariate(inst, tol)
            out["dispatcher"] = fmt(rep.value)
            out["method"] = rep.method.value
        if "eep" in cols:
            out["eep"] = fmt(eep.solve(eep.build(inst), tol).objective)
        if "improved" in cols:
            out["improved"] = fmt(bounds.bound_improved(inst, bary).value)
        if "quadratic" in cols:
            out["quadratic"] = fmt(bounds.bound_quadratic(inst, geometry.curvature(inst, bary))[0].value)
        return out, None
    except InterpLabError as exc:
        return out, f"{type(exc).__name__}: {exc}"


def sweep_rows(pf: ProblemFile, grid, cols, tol=1e-6, workers=1):
    """Evaluate the grid; returns (header, rows, failures) in row-major order
    (x2 outer, x1 inner)."""
    a, b, c, d, nx, ny = grid
    base = np.zeros(len(pf.theta) - 1) if pf.x is None else np.array(pf.x)
    tasks, coords = [], []
    for x2 in np.linspace(c, d, ny):
        for x1 in np.linspace(a, b, nx):
            x = base.copy()
            x[0], x[1] = x1, x2
            tasks.append((pf.theta, pf.nu, tuple(x), cols, tol))
            coords.append((x1, x2))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        results = [_sweep_point(t) for t in tasks]
    header = ["x1", "x2"]
    if "dispatcher" in cols:
        header += ["dispatcher", "method"]
    header += [k for k in SWEEP_COLUMNS[1:] if k in cols]
    rows, failures = [], []
    for (x1, x2), (vals, err) in zip(coords, results):
        rows.append([fmt(x1), fmt(x2)] + [vals.get(h, "") for h in header[2:]])
        if err:
            failures.append(((x1, x2), err))
    return header, rows, failures


def cmd_sweep(args) -> int:
    pf = load_problem(args, need_x=False)
    grid = parse_grid(args.grid) if args.grid else DEFAULT_GRID
    if args.full_res:
        grid = grid[:4] + (100, 100)
    cols = [c.strip() for c in args.bounds.split(",")] if args.bounds else ["dispatcher", "improved", "quadratic"]
    if args.eep and "eep" not in cols:
        cols.append("eep")
    bad = [c for c in cols if c not in SWEEP_COLUMNS]
    if bad:
        raise ProblemFileError(f"--bounds: unknown columns {bad}")
    n = len(pf.theta) - 1
    if n < 2:
        raise ProblemFileError("sweeps need n >= 2")
    if n != 2 and "dispatcher" in cols:
        raise ProblemFileError("the dispatcher column requires n == 2")
    header, rows, failures = sweep_rows(pf, grid, tuple(cols), args.tol, worker_count())
    text = ",".join(header) + "\n" + "".join(",".join(r) + "\n" for r in rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        _out(text)
    if failures:
        sys.stderr.write(f"{len(failures)} grid point(s) failed\n")
        for (x1, x2), err in failures[:10]:
            sys.stderr.write(f"  ({fmt(x1)}, {fmt(x2)}): {err}\n")
        return 1
    return 0


# certify / eep --------------------------------------------------------------

def cmd_certify(args) -> int:
    inst = load_problem(args).instance()
    bary = geometry.barycentric(inst)
    cert = bounds.certify_mu(inst, bary)
    width = 24
    lines = ["mu" + " " * 6 + "".join(f"{'j=' + str(j):>{width}}" for j in cert.cols)]
    for i, row in zip(cert.rows, cert.mu):
        lines.append(f"i={i:<6}" + "".join(f"{fmt(v):>{width}}" for v in row))
    lines.append(f"min entry  {fmt(cert.min_entry)}")
    lines.append(f"verdict    {'pass: quadratic bound is sharp' if cert.all_nonneg else 'fail'}")
    _out("\n".join(lines) + "\n")
    return 0


def cmd_eep(args) -> int:
    inst = load_problem(args).instance()
    prob = eep.build(inst)
    sol = eep.solve(prob, args.tol)
    res = {"objective": sol.objective, "iterations": sol.iterations,
           "barrier_mu_final": sol.barrier_mu_final,
           "max_constraint_violation": sol.max_constraint_violation,
           "kkt_residual": sol.kkt_residual,
           "variables": prob.n_vars, "constraints": prob.n_constraints,
           "y": [float(v) for v in sol.y], "g": [[float(v) for v in r] for r in sol.g]}
    _out(f"objective  {fmt(sol.objective)}\niterations {sol.iterations}\n"
         f"kkt        {fmt(sol.kkt_residual)}\nviolation  {fmt(sol.max_constraint_violation)}\n")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(res, fh, indent=2)
            fh.write("\n")
    return 0


# dfo ------------------------------------------------------------------------

def cmd_dfo(args) -> int:
    if args.function not in dfo.SUITE:
        raise ProblemFileError(f"unknown function {args.function!r}; choose from {sorted(dfo.SUITE)}")
    if args.n < 1:
        raise ProblemFileError("--n must be at least 1")
    tf = dfo.SUITE[args.function](args.n)
    if args.start:
        start = np.array(parse_coords(args.start, "--start"))
        if start.shape[0] != args.n:
            raise ProblemFileError(f"--start must have {args.n} coordinates")
    else:
        start = np.zeros(args.n)
        start[0] = 2.0
    nu = tf.nu if args.nu is None else args.nu
    if not nu > 0 or not args.epsilon > 0:
        raise ProblemFileError("--nu and --epsilon must be positive")
    mode = dfo.Mode.FIXED_BUDGET if args.mode == "fixed" else dfo.Mode.GRADIENT_STOP
    cfg = dfo.DfoConfig(tf.f, nu=nu, epsilon=args.epsilon,
                        delta="auto" if args.delta is None else args.delta,
                        max_iter=args.max_iter, mode=mode,
                        f_star=None if args.no_fstar else tf.f_star, gradient=tf.grad)
    state, trace = dfo.run(cfg, start)
    n = args.n
    header = ["iteration", "spread", "simplex_grad_norm", "true_grad_norm", "f_reflection",
              "f_hat_reflection"] + [f"r{k + 1}" for k in range(n)] + [f"f{k + 1}" for k in range(n + 1)]
    lines = [",".join(header)]
    for r in trace.records:
        lines.append(",".join([str(r.iteration), fmt(r.spread), fmt(r.simplex_grad_norm),
                               fmt(r.true_grad_norm), fmt(r.f_reflection), fmt(r.f_hat_reflection)]
                              + [fmt(v) for v in r.reflection] + [fmt(v) for v in r.sorted_values]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    budget = trace.budget
    grad_final = float(np.linalg.norm(tf.grad(state.centroid)))
    summary = [f"function       {tf.name} (n={n}, nu={fmt(nu)})",
               f"delta          {fmt(trace.delta)}",
               f"iterations     {len(trace)}",
               f"stopped        {trace.stopped}",
               f"final |Df(c)|  {fmt(grad_final)}"]
    if budget is not None:
        summary.append(f"budget         {budget} ({'respected' if len(trace) <= budget else 'exceeded'})")
    (sys.stderr if not args.out else sys.stdout).write("\n".join(summary) + "\n")
    if not args.out:
        _out(text)
    return 0


# probe ----------------------------------------------------------------------

def _is_acute(theta) -> bool:
    m = theta.shape[0]
    for i in range(m):
        for j in range(m):
            for k in range(j + 1, m):
                if i in (j, k):
                    continue
                if (theta[j] - theta[i]) @ (theta[k] - theta[i]) < 0:
                    return False
    return True


def probe_conjecture(seed: int, trials: int, n_min: int = 2, n_max: int = 2) -> dict:
    """Random search for negative mu on acute and non-acute simplices.

    Only counts are reported; nothing is asserted.
    """
    rng = np.random.default_rng(seed)
    stats = {"acute": [0, 0], "obtuse": [0, 0], "skipped": 0}
    for t in range(trials):
        n = int(rng.integers(n_min, n_max + 1))
        if t % 2 == 0:
            theta = dfo.regular_simplex(np.zeros(n), 1.0) + 0.15 * rng.standard_normal((n + 1, n))
        else:
            theta = rng.standard_normal((n + 1, n))
        x = 3.0 * rng.standard_normal(n)
        try:
            inst = InterpolationInstance(theta, x)
            bary = geometry.barycentric(inst)
            if np.all(bary.ell[1:] > 0):
                stats["skipped"] += 1
                continue
            cert = bounds.certify_mu(inst, bary)
        except InterpLabError:
            stats["skipped"] += 1
            continue
        key = "acute" if _is_acute(theta) else "obtuse"
        stats[key][0] += 1
        stats[key][1] += int(not cert.all_nonneg)
    return stats


def cmd_probe(args) -> int:
    if args.trials < 1:
        raise ProblemFileError("--trials must be at least 1")
    if not 2 <= args.n_min <= args.n_max:
        raise ProblemFileError("need 2 <= --n-min <= --n-max")
    s = probe_conjecture(args.seed, args.trials, args.n_min, args.n_max)
    _out(f"seed {args.seed}, trials {args.trials}, n in [{args.n_min}, {args.n_max}]\n"
         f"acute simplices   : {s['acute'][0]} instances, {s['acute'][1]} with a negative mu\n"
         f"other simplices   : {s['obtuse'][0]} instances, {s['obtuse'][1]} with a negative mu\n"
         f"skipped           : {s['skipped']} (inside hull or degenerate)\n"
         "observation only; the acute-simplex conjecture is not asserted\n")
    return 0


# entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="interp-lab",
                                description="Error bounds for linear interpolation of C^{1,1} functions.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol=True):
        sp.add_argument("--problem", help="JSON problem file")
        sp.add_argument("--x", help="query point, comma-separated (overrides the file)")
        sp.add_argument("--nu", type=float, help="Lipschitz constant (overrides the file)")
        if tol:
            sp.add_argument("--tol", type=float, default=1e-6, help="EEP gap tolerance")
        sp.add_argument("--out", help="output path")

    sp = sub.add_parser("bound", help="all applicable bounds at one point")
    common(sp)
    sp.add_argument("--eep", action="store_true", help="also solve the EEP numerically")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("sweep", help="bounds on a grid, written as CSV")
    common(sp)
    sp.add_argument("--grid", help="a,b,c,d,nx,ny (x1 in [a,b], x2 in [c,d])")
    sp.add_argument("--bounds", help="columns among dispatcher,eep,improved,quadratic")
    sp.add_argument("--eep", action="store_true", help="add the EEP column")
    sp.add_argument("--full-res", action="store_true", help="100x100 grid")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("certify", help="mu certificate table")
    common(sp, tol=False)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("eep", help="solve the error estimation problem")
    common(sp)
    sp.set_defaults(func=cmd_eep)

    sp = sub.add_parser("dfo", help="run the reflection simplex method on a suite function")
    sp.add_argument("--function", default="sphere", help=f"one of {sorted(dfo.SUITE)}")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--start", help="start point, comma-separated (default 2e_1)")
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--nu", type=float)
    sp.add_argument("--delta", type=float, help="simplex radius (default 2 eps / (5 n nu))")
    sp.add_argument("--mode", choices=["gradient", "fixed"], default="gradient")
    sp.add_argument("--max-iter", type=int, default=100_000)
    sp.add_argument("--no-fstar", action="store_true", help="do not use the known minimum value")
    sp.add_argument("--seed", type=int, default=0, help="accepted for interface uniformity")
    sp.add_argument("--out", help="trace CSV path")
    sp.set_defaults(func=cmd_dfo)

    sp = sub.add_parser("probe-conjecture", help="search for negative mu on random simplices")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--n-min", type=int, default=2)
    sp.add_argument("--n-max", type=int, default=2)
    sp.set_defaults(func=cmd_probe)
    return p


# flags whose values may legitimately start with '-' (negative coordinates)
_COORD_FLAGS = ("--x", "--grid", "--start")


def _join_coord_flags(argv):
    out, it = [], iter(argv)
    for tok in it:
        if tok in _COORD_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_join_coord_flags(argv))
    try:
        return args.func(args)
    except ProblemFileError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (DegenerateSampleSet, DegenerateSwap, ZeroLagrangeValue, SingularPartition,
            HypothesisViolated) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_GEOMETRY
    except BudgetExhausted as exc:
        sys.stderr.write(f"error: BudgetExhausted: {exc}\n")
        return EXIT_SOLVER
    except InterpLabError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_SOLVER
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
