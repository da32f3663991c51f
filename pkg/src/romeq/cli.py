"""Command-line front end: snapshots | train | eval | bench | sweep | compare-intrusive."""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import storage
from ._version import __version__
from .basis import SnapshotSet, build_snapshots, pod_basis
from .benchmarks import BENCH_DEFAULTS, FAMILY_BUILDERS, benchmark_problem
from .fom import fom_solve
from .intrusive import intrusive_rom
from .opinf import (assemble_data_matrix, assemble_training,
                    rank_diagnostics, train_from_data)
from .rom import rom_solve
from .sampling import (disjoint_test_parameters, nested_prefixes,
                       training_parameters, uniform_random)
from .util import parallel_map
from .vecform import relative_residual


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_grid(text):
    return tuple(float(v) for v in text.split(",") if v.strip() != "")


def _resolve_problem(args):
    if getattr(args, "problem", None):
        return storage.load_problem(args.problem)
    if getattr(args, "family", None):
        return benchmark_problem(args.family, getattr(args, "n", None))
    raise SystemExit("pass either --problem FILE or --family NAME")


def _training_params(problem, args, rng):
    if getattr(args, "train_params", None):
        rows = [tuple(float(v) for v in chunk.split(","))
                for chunk in args.train_params.split(";") if chunk.strip()]
        return np.asarray(rows, dtype=float)
    mode = args.train_sampling
    if mode is None:
        family = getattr(args, "family", None)
        mode = BENCH_DEFAULTS[family]["sampling"] if family else "log"
    count = args.train_count
    if count is None:
        family = getattr(args, "family", None)
        count = BENCH_DEFAULTS[family]["train_count"] if family else 100
    return training_parameters(problem.domain, count, mode, rng)


def _maybe_figures(args):
    return not getattr(args, "no_figures", False)


# --- snapshots ---------------------------------------------------------------

def cmd_snapshots(args):
    problem = _resolve_problem(args)
    rng = np.random.default_rng(args.seed)
    params = _training_params(problem, args, rng)
    t0 = time.perf_counter()
    snaps = build_snapshots(problem, params)
    wall = time.perf_counter() - t0
    residuals = [relative_residual(problem, mu, snaps.states[:, i])
                 for i, mu in enumerate(params)]
    storage.write_snapshots(args.out, snaps, problem,
                            residual_norms=residuals,
                            seeds={"seed": args.seed}, wall_time_s=wall)
    print(f"wrote {snaps.k} snapshots (N = {snaps.states.shape[0]}) to {args.out} "
          f"in {wall:.2f} s; max residual {max(residuals):.3e}")
    return 0


# --- train -------------------------------------------------------------------

def _train_pipeline(problem, snaps, r=None, energy=None, grid1=None, grid2=None,
                    snapshots_s=None):
    t0 = time.perf_counter()
    basis = pod_basis(snaps, r=r, energy=energy)
    svd_s = time.perf_counter() - t0
    td = assemble_training(problem, basis, snaps)
    D = assemble_data_matrix(td)
    diagnostics = rank_diagnostics(td, D)
    basis_ref = f"{basis.method}:r={basis.r}"
    if problem.name:
        basis_ref += f":problem={problem.name}"
    t1 = time.perf_counter()
    model = train_from_data(td, grid1=grid1, grid2=grid2, basis_ref=basis_ref)
    train_s = time.perf_counter() - t1
    timing = {
        "snapshots_s": snapshots_s,
        "svd_s": svd_s,
        "train_s": train_s,
        "T_off": (snapshots_s or 0.0) + svd_s + train_s,
    }
    return model, basis, diagnostics, timing


def cmd_train(args):
    snaps, problem, manifest = storage.read_snapshots(args.snapshots)
    grid1 = _parse_grid(args.grid_lambda1) if args.grid_lambda1 else None
    grid2 = _parse_grid(args.grid_lambda2) if args.grid_lambda2 else None
    model, basis, diagnostics, timing = _train_pipeline(
        problem, snaps, r=args.r, energy=args.energy, grid1=grid1, grid2=grid2,
        snapshots_s=manifest.get("wall_time_s"))
    extra = {
        "rank_diagnostics": diagnostics.summary(),
        "timing": timing,
        "training_parameters": snaps.parameters.tolist(),
    }
    seeds = dict(manifest.get("seeds", {}))
    storage.write_model(args.out, model, basis, problem, extra=extra, seeds=seeds)
    if _maybe_figures(args):
        from . import plots
        plots.save_singular_values(basis.singular_values,
                                   Path(args.out) / "singular_values.png")
    print(f"trained r={model.r} model: lambda={model.lam}, "
          f"training mse {model.training_mse:.3e}, T_off {timing['T_off']:.2f} s")
    return 0


# --- eval --------------------------------------------------------------------

def _timed_rom_solves(model, test_params):
    rom_solve(model, test_params[0])  # warm-up, excluded from timing
    reports = []
    t0 = time.perf_counter()
    for mu in test_params:
        reports.append(rom_solve(model, mu))
    t_on = time.perf_counter() - t0
    return reports, t_on


def _fom_truths(problem, test_params, timed=False):
    if timed:
        fom_solve(problem, test_params[0])  # warm-up
        truths = []
        t0 = time.perf_counter()
        for mu in test_params:
            truths.append(fom_solve(problem, mu))
        total = time.perf_counter() - t0
        return truths, total
    truths = parallel_map(lambda mu: fom_solve(problem, mu), list(test_params))
    return truths, None


def _evaluate(problem, model, basis, test_params, reference=False):
    V = basis.V[:, :model.r]
    reports, t_on = _timed_rom_solves(model, test_params)
    truths, ref_total = _fom_truths(problem, test_params, timed=reference)
    rows = []
    errors = []
    for mu, x, rep in zip(test_params, truths, reports):
        norm_x = float(np.linalg.norm(x))
        if rep.converged and norm_x > 0.0:
            err = float(np.linalg.norm(x - V @ rep.xhat) / norm_x)
            errors.append(err)
        else:
            err = float("nan")
        rows.append(list(mu) + [err, rep.iterations, rep.converged])
    er_avg = float(np.mean(errors)) if errors else float("nan")
    failed = sum(1 for rep in reports if not rep.converged)
    return rows, er_avg, t_on, ref_total, failed


def _timing_payload(t_off, t_on, count, ref_total=None):
    payload = {
        "T_off": t_off,
        "T_on": t_on,
        "T_tot": t_off + t_on,
        "T_avg": t_on / count,
        "test_count": count,
    }
    if ref_total is not None:
        payload["reference_total"] = ref_total
        payload["reference_avg"] = ref_total / count
    return payload


def cmd_eval(args):
    model, basis, problem, manifest = storage.read_model(args.model)
    rng = np.random.default_rng(args.seed)
    excluded = np.asarray(manifest.get("training_parameters", []), dtype=float)
    if args.allow_overlap or excluded.size == 0:
        test_params = uniform_random(problem.domain, args.test_count, rng)
    else:
        test_params = disjoint_test_parameters(problem.domain, args.test_count,
                                               rng, excluded)
    rows, er_avg, t_on, ref_total, failed = _evaluate(
        problem, model, basis, test_params, reference=args.reference)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d = problem.d
    header = [f"mu_{j + 1}" for j in range(d)] + \
        ["rel_error", "rom_iterations", "converged"]
    write_csv(out / "results.csv", header, rows)
    t_off = float(manifest.get("timing", {}).get("T_off") or 0.0)
    storage.write_json(out / "timing.json",
                       _timing_payload(t_off, t_on, len(test_params), ref_total))
    eval_manifest = storage.base_manifest(problem, seeds={"test_seed": args.seed})
    eval_manifest.update({"type": "eval", "er_avg": er_avg,
                          "failed_samples": failed, "model": str(args.model)})
    storage.write_json(out / "manifest.json", eval_manifest)
    if _maybe_figures(args):
        from . import plots
        plots.save_error_scatter(test_params, [row[d] for row in rows],
                                 out / "errors.png", title=f"er_avg = {er_avg:.3e}")
    print(f"er_avg = {er_avg:.6e} over {len(test_params)} test parameters "
          f"({failed} failed); T_on = {t_on:.3f} s")
    return 1 if failed else 0


# --- bench -------------------------------------------------------------------

def cmd_bench(args):
    defaults = BENCH_DEFAULTS[args.family]
    n = args.n or defaults["n"]
    r_values = tuple(int(v) for v in args.r.split(",")) if args.r \
        else defaults["r_values"]
    train_count = args.train_count or defaults["train_count"]
    test_count = args.test_count or defaults["test_count"]
    sampling = args.train_sampling or defaults["sampling"]
    problem = benchmark_problem(args.family, n)
    rng = np.random.default_rng(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    train_params = training_parameters(problem.domain, train_count, sampling, rng)
    t0 = time.perf_counter()
    snaps = build_snapshots(problem, train_params)
    snapshots_s = time.perf_counter() - t0
    residuals = [relative_residual(problem, mu, snaps.states[:, i])
                 for i, mu in enumerate(train_params)]
    storage.write_snapshots(out / "snapshots", snaps, problem,
                            residual_norms=residuals,
                            seeds={"seed": args.seed}, wall_time_s=snapshots_s)

    test_params = disjoint_test_parameters(problem.domain, test_count, rng,
                                           train_params)
    grid1 = _parse_grid(args.grid_lambda1) if args.grid_lambda1 else None
    grid2 = _parse_grid(args.grid_lambda2) if args.grid_lambda2 else None

    d = problem.d
    header = [f"mu_{j + 1}" for j in range(d)] + \
        ["rel_error", "rom_iterations", "converged"]
    summary = {}
    ref_total = None
    failed_total = 0
    for i, r in enumerate(r_values):
        model, basis, diagnostics, timing = _train_pipeline(
            problem, snaps, r=r, grid1=grid1, grid2=grid2,
            snapshots_s=snapshots_s)
        rdir = out / f"r{r}"
        rdir.mkdir(exist_ok=True)
        storage.write_model(rdir / "model", model, basis, problem,
                            extra={"rank_diagnostics": diagnostics.summary(),
                                   "timing": timing,
                                   "training_parameters": train_params.tolist()},
                            seeds={"seed": args.seed})
        # time the full-order reference once, on the shared test set
        rows, er_avg, t_on, ref, failed = _evaluate(
            problem, model, basis, test_params, reference=(i == 0))
        if ref is not None:
            ref_total = ref
        failed_total += failed
        write_csv(rdir / "results.csv", header, rows)
        storage.write_json(rdir / "timing.json",
                           _timing_payload(timing["T_off"], t_on,
                                           len(test_params), ref))
        summary[r] = {"er_avg": er_avg, "T_off": timing["T_off"], "T_on": t_on,
                      "T_tot": timing["T_off"] + t_on,
                      "T_avg": t_on / len(test_params)}
        if _maybe_figures(args):
            from . import plots
            plots.save_error_scatter(test_params, [row[d] for row in rows],
                                     rdir / "errors.png",
                                     title=f"r = {r}, er_avg = {er_avg:.3e}")
            plots.save_singular_values(basis.singular_values,
                                       rdir / "singular_values.png")

    metrics = ["er_avg", "T_off", "T_on", "T_tot", "T_avg"]
    rows = []
    for metric in metrics:
        row = [metric] + [summary[r][metric] for r in r_values]
        if metric == "T_tot":
            row.append(ref_total if ref_total is not None else float("nan"))
        elif metric == "T_avg":
            row.append(ref_total / len(test_params)
                       if ref_total is not None else float("nan"))
        else:
            row.append(float("nan"))
        rows.append(row)
    header_sum = ["metric"] + [f"r={r}" for r in r_values] + ["reference"]
    write_csv(out / "summary.csv", header_sum, rows)
    bench_manifest = storage.base_manifest(problem, seeds={"seed": args.seed})
    bench_manifest.update({"type": "bench", "family": args.family, "n": n,
                           "r_values": list(r_values),
                           "train_count": len(train_params),
                           "test_count": len(test_params),
                           "sampling": sampling})
    storage.write_json(out / "manifest.json", bench_manifest)

    width = max(len(m) for m in metrics) + 2
    print(" " * width + "  ".join(f"{h:>12}" for h in header_sum[1:]))
    for row in rows:
        cells = "  ".join(f"{v:>12.4e}" if isinstance(v, float) else f"{v:>12}"
                          for v in row[1:])
        print(f"{row[0]:<{width}}" + cells)
    return 1 if failed_total else 0


# --- sweep -------------------------------------------------------------------

def cmd_sweep(args):
    problem = _resolve_problem(args)
    sizes = [int(v) for v in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    nested = nested_prefixes(problem.domain, sizes, rng)
    test_params = disjoint_test_parameters(problem.domain, args.test_count,
                                           rng, nested[-1])
    t0 = time.perf_counter()
    full = build_snapshots(problem, nested[-1])
    snapshots_s = time.perf_counter() - t0
    grid1 = _parse_grid(args.grid_lambda1) if args.grid_lambda1 else None
    grid2 = _parse_grid(args.grid_lambda2) if args.grid_lambda2 else None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for size, params in zip(sizes, nested):
        snaps = SnapshotSet(states=full.states[:, :size], parameters=params,
                            problem_ref=problem.name)
        model, basis, _, _ = _train_pipeline(problem, snaps, r=args.r,
                                             grid1=grid1, grid2=grid2,
                                             snapshots_s=snapshots_s)
        _, er_avg, _, _, failed = _evaluate(problem, model, basis, test_params)
        rows.append([size, er_avg, model.lam[0], model.lam[1],
                     model.training_mse, failed])
        print(f"size {size:>5}: er_avg = {er_avg:.6e}")
    write_csv(out / "sweep.csv",
              ["size", "er_avg", "lambda1", "lambda2", "training_mse",
               "failed_samples"], rows)
    manifest = storage.base_manifest(problem, seeds={"seed": args.seed})
    manifest.update({"type": "sweep", "sizes": sizes,
                     "test_count": int(args.test_count),
                     "nested_parameters": nested[-1].tolist()})
    storage.write_json(out / "manifest.json", manifest)
    if _maybe_figures(args):
        from . import plots
        plots.save_sweep([row[0] for row in rows], [row[1] for row in rows],
                         out / "sweep.png")
    return 0


# --- compare-intrusive -------------------------------------------------------

def cmd_compare_intrusive(args):
    problem = _resolve_problem(args)
    rng = np.random.default_rng(args.seed)
    params = _training_params(problem, args, rng)
    snaps = build_snapshots(problem, params)
    basis = pod_basis(snaps, r=args.r)
    grid1 = _parse_grid(args.grid_lambda1) if args.grid_lambda1 else None
    grid2 = _parse_grid(args.grid_lambda2) if args.grid_lambda2 else None
    td = assemble_training(problem, basis, snaps)
    model = train_from_data(td, grid1=grid1, grid2=grid2,
                            basis_ref=f"pod:r={basis.r}")
    intrusive = intrusive_rom(problem, basis)
    test_params = disjoint_test_parameters(problem.domain, args.test_count,
                                           rng, params)
    truths, _ = _fom_truths(problem, test_params)
    V = basis.V
    rows = []
    errs_o, errs_i = [], []
    for mu, x in zip(test_params, truths):
        rep_o = rom_solve(model, mu)
        rep_i = rom_solve(intrusive, mu)
        norm_x = float(np.linalg.norm(x))
        e_o = float(np.linalg.norm(x - V @ rep_o.xhat) / norm_x) \
            if rep_o.converged and norm_x else float("nan")
        e_i = float(np.linalg.norm(x - V @ rep_i.xhat) / norm_x) \
            if rep_i.converged and norm_x else float("nan")
        rows.append(list(mu) + [e_o, e_i, rep_o.converged, rep_i.converged])
        if np.isfinite(e_o):
            errs_o.append(e_o)
        if np.isfinite(e_i):
            errs_i.append(e_i)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    d = problem.d
    header = [f"mu_{j + 1}" for j in range(d)] + \
        ["rel_error_opinf", "rel_error_intrusive", "converged_opinf",
         "converged_intrusive"]
    write_csv(out / "comparison.csv", header, rows)
    manifest = storage.base_manifest(problem, seeds={"seed": args.seed})
    manifest.update({"type": "compare-intrusive", "r": int(args.r),
                     "er_avg_opinf": float(np.mean(errs_o)),
                     "er_avg_intrusive": float(np.mean(errs_i))})
    storage.write_json(out / "manifest.json", manifest)
    if _maybe_figures(args):
        from . import plots
        plots.save_comparison(test_params, [row[d] for row in rows],
                              [row[d + 1] for row in rows],
                              ("inferred", "intrusive"), out / "comparison.png")
    print(f"er_avg inferred  = {np.mean(errs_o):.6e}")
    print(f"er_avg intrusive = {np.mean(errs_i):.6e}")
    return 0


# --- parser ------------------------------------------------------------------

def _add_problem_args(p):
    p.add_argument("--problem", help="problem definition JSON file")
    p.add_argument("--family", choices=sorted(FAMILY_BUILDERS),
                   help="built-in benchmark family")
    p.add_argument("--n", type=int, help="matrix order override")


def _add_sampling_args(p):
    p.add_argument("--train-count", type=int, help="training sample count")
    p.add_argument("--train-sampling", choices=("log", "grid", "random"),
                   help="training distribution (default per family)")
    p.add_argument("--train-params",
                   help="explicit parameters: 'v1;v2;...' (components comma-separated)")


def _add_grid_args(p):
    p.add_argument("--grid-lambda1", help="comma-separated lambda1 grid")
    p.add_argument("--grid-lambda2", help="comma-separated lambda2 grid")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="romeq",
        description="Reduced-order surrogate models for parameter-dependent "
                    "Lyapunov and Riccati equations")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("snapshots", help="solve the full-order model over a training set")
    _add_problem_args(p)
    _add_sampling_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_snapshots)

    p = sub.add_parser("train", help="build a basis and learn reduced operators")
    p.add_argument("--snapshots", required=True, help="snapshot archive directory")
    p.add_argument("--r", type=int, help="basis rank")
    p.add_argument("--energy", type=float, help="energy truncation tolerance")
    _add_grid_args(p)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a seeded test set")
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--test-count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reference", action="store_true",
                   help="also time full-order solves per test parameter")
    p.add_argument("--allow-overlap", action="store_true",
                   help="do not enforce test/training disjointness")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="full pipeline on a benchmark family")
    p.add_argument("--family", required=True, choices=sorted(FAMILY_BUILDERS))
    p.add_argument("--n", type=int)
    p.add_argument("--r", help="comma-separated ranks (default per family)")
    _add_sampling_args(p)
    p.add_argument("--test-count", type=int)
    _add_grid_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("sweep", help="error versus nested training-set size")
    _add_problem_args(p)
    p.add_argument("--sizes", required=True, help="ascending comma-separated sizes")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--test-count", type=int, default=100)
    _add_grid_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare-intrusive",
                       help="inferred versus projected operators on a shared test set")
    _add_problem_args(p)
    _add_sampling_args(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--test-count", type=int, default=100)
    _add_grid_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare_intrusive)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
