"""Command-line front end: experiment runs, spectra/response plots, verification.

Exit codes: 0 success, 1 usage or input error, 2 verification violation,
3 numeric failure. All randomness derives from --seed through splitmix
sub-streams, so every subcommand is deterministic in single-job mode.
"""

from __future__ import annotations

import argparse
import csv
import multiprocessing
import sys
from pathlib import Path

import numpy as np

from .convolution import (
    FilterTensor,
    WeightStack,
    filter_response,
    gcn_as_mimo_stack,
    mimo_gc,
    mimo_gc_oracle,
    mimo_gc_pairwise,
    mimo_gc_vectorized_oracle,
    sca_repeated_gcn,
    weight_stack_from_filter,
)
from .graph import generate_erdos_renyi, laplacian, load_edge_list
from .lmgc import Variant
from .seeding import derive_seed
from .spectral import eigendecompose_symmetric
from .svgplot import line_plot_svg
from .train import (
    DEFAULT_LR_GRID,
    METHODS,
    REFERENCE_INSTANCE_SEED,
    ExperimentConfig,
    run_universality_experiment,
)
from .verify import (
    independence_trial,
    injectivity_trial,
    multiset_counterexample_outputs,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _run_trial(args):
    method, config = args
    return run_universality_experiment(method, config)


def cmd_universality(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    methods = list(METHODS) if args.method == "all" else [args.method]
    lrs = [args.lr] if args.lr is not None else list(DEFAULT_LR_GRID)
    instance = (
        args.instance_seed if args.instance_seed is not None else REFERENCE_INSTANCE_SEED
    )
    jobs = []
    run_ids = []
    for method in methods:
        for lr in lrs:
            for s in range(args.seeds):
                config = ExperimentConfig(
                    steps=args.steps,
                    lr=lr,
                    seed=instance,
                    run=derive_seed(args.seed, s),
                )
                jobs.append((method, config))
                run_ids.append(s)
    if args.jobs > 1:
        with multiprocessing.Pool(args.jobs) as pool:
            results = pool.map(_run_trial, jobs)
    else:
        results = [_run_trial(j) for j in jobs]

    rows = [
        (r.method, r.lr, s, r.steps, f"{r.min_mse:.6e}", f"{r.wall_seconds:.2f}")
        for r, s in zip(results, run_ids)
    ]
    _write_csv(out / "results.csv", ["method", "lr", "seed", "steps", "min_mse", "wall_seconds"], rows)

    best = {}
    for r in results:
        if r.diverged:
            continue
        key = r.method
        if key not in best or r.min_mse < best[key].min_mse:
            best[key] = r
    ranked = sorted(best.values(), key=lambda r: r.min_mse)
    with open(out / "summary.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{'method':<8} {'lr':>8} {'min_mse':>14}\n")
        for r in ranked:
            fh.write(f"{r.method:<8} {r.lr:>8} {r.min_mse:>14.3e}\n")
    failed = [r for r in results if r.diverged]
    if len(failed) == len(results):
        print("all trials diverged", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _response_series(stack: WeightStack, basis, pairs):
    return [filter_response(stack, basis, p, q).response for p, q in pairs]


def cmd_spectra(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.graph_file:
        g = load_edge_list(args.graph_file)
    else:
        n, p = int(args.er[0]), float(args.er[1])
        g = generate_erdos_renyi(n, p, derive_seed(args.seed, 0))
    basis = eigendecompose_symmetric(laplacian(g))
    lam = basis.eigenvalues
    mu = basis.adjacency_eigenvalues()
    n = basis.n

    _write_csv(
        out / "spectrum.csv",
        ["index", "eigenvalue"],
        [(k, f"{lam[k]:.12g}") for k in range(n)],
    )

    rng = np.random.default_rng(derive_seed(args.seed, 1))

    def dump(name, title, series, labels):
        _write_csv(
            out / f"{name}.csv",
            ["eigenvalue"] + labels,
            [
                tuple([f"{lam[k]:.12g}"] + [f"{s[k]:.12g}" for s in series])
                for k in range(n)
            ],
        )
        (out / f"{name}.svg").write_text(
            line_plot_svg(lam, series, title=title, labels=labels), encoding="utf-8"
        )

    random_series = [rng.standard_normal(n) for _ in range(3)]
    dump("random_filter", "Random spectral filters", random_series, ["r1", "r2", "r3"])

    cheb_series = []
    cheb_labels = []
    for degree in (2, 8, 16):
        coeffs = rng.standard_normal(degree + 1)
        cheb_series.append(np.polynomial.chebyshev.chebval(mu, coeffs))
        cheb_labels.append(f"K={degree}")
    dump("chebyshev_filter", "Chebyshev polynomial filters", cheb_series, cheb_labels)

    gcn_series = [w * mu for w in (4.0, 0.1, -1.0)]
    dump("gcn_filter", "First-order filters w*mu", gcn_series, ["w=4", "w=0.1", "w=-1"])

    rep_series = []
    rep_labels = []
    for depth in (2, 4, 16):
        w = rng.standard_normal(depth)
        rep_series.append(sca_repeated_gcn(w, basis).response)
        rep_labels.append(f"k={depth}")
    dump("repeated_gcn", "Repeated first-order filters", rep_series, rep_labels)
    return EXIT_OK


def _equivalence_suite(trials: int, seed: int):
    rows = []
    violations = 0
    worst = 0.0
    for t in range(trials):
        rng = np.random.default_rng(derive_seed(seed, t))
        n = int(rng.integers(4, 21))
        d = int(rng.integers(1, 9))
        c = int(rng.integers(1, 9))
        g = generate_erdos_renyi(n, 0.4, derive_seed(seed, t, 1))
        basis = eigendecompose_symmetric(laplacian(g))
        theta = FilterTensor(rng.standard_normal((n, c, d)), basis.basis_id)
        x = rng.standard_normal((n, d))
        ref = mimo_gc(theta, x, basis)
        stack = weight_stack_from_filter(theta, basis)
        diffs = [
            np.max(np.abs(ref - mimo_gc_oracle(theta, x, basis))),
            np.max(np.abs(ref - mimo_gc_pairwise(stack, x, basis))),
            np.max(np.abs(ref - mimo_gc_vectorized_oracle(theta, x, basis))),
        ]
        gap = float(max(diffs))
        worst = max(worst, gap)
        ok = gap <= 1e-9
        if not ok:
            violations += 1
        rows.append((t, n, d, c, f"{gap:.3e}", int(not ok)))
    return rows, violations, worst


def cmd_verify(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "equivalence":
        rows, violations, worst = _equivalence_suite(args.pairs, args.seed)
        _write_csv(
            out / "results.csv",
            ["trial", "n", "d", "c", "max_abs_diff", "violation"],
            rows,
        )
        print(f"equivalence: {len(rows)} trials, {violations} violations, worst {worst:.3e}")
        return EXIT_VIOLATION if violations else EXIT_OK

    if args.kind == "injectivity":
        report = injectivity_trial(args.pairs, args.k, args.d, args.c, args.seed)
        counter_a, counter_b = multiset_counterexample_outputs(
            Variant.GATV2_SOFTMAX, args.seed
        )
        counter_collides = np.max(np.abs(counter_a - counter_b)) <= 1e-12
        _write_csv(
            out / "results.csv",
            ["trial_kind", "K", "d", "c", "pairs", "violations", "min_separation"],
            [
                (
                    report.kind,
                    report.k,
                    report.d,
                    report.c,
                    report.trials,
                    report.violations,
                    f"{report.min_separation:.3e}",
                )
            ],
        )
        print(
            f"injectivity: {report.trials} pairs, {report.violations} violations, "
            f"softmax counterexample collides: {counter_collides}"
        )
        if report.violations or not counter_collides:
            return EXIT_VIOLATION
        return EXIT_OK

    # independence
    if args.k <= 1:
        print("independence requires more than one computational graph (K > 1)", file=sys.stderr)
        return EXIT_USAGE
    report = independence_trial(args.pairs, args.k, args.d, args.c, args.seed)
    _write_csv(
        out / "results.csv",
        ["trial_kind", "K", "d", "c", "pairs", "violations", "min_separation"],
        [
            (
                report.kind,
                report.k,
                report.d,
                report.c,
                report.trials,
                report.violations,
                f"{report.min_separation:.3e}",
            )
        ],
    )
    print(f"independence: {report.trials} pairs, {report.violations} violations")
    return EXIT_VIOLATION if report.violations else EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="gclab", description=__doc__)
    parser.add_argument("--seed", type=int, default=0, help="master RNG seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p_uni = sub.add_parser("universality", help="single-layer target-fitting runs")
    p_uni.add_argument("--method", choices=list(METHODS) + ["all"], default="all")
    p_uni.add_argument("--lr", type=float, default=None, help="single rate; default runs the grid")
    p_uni.add_argument("--steps", type=int, default=40000)
    p_uni.add_argument("--seeds", type=int, default=3, help="number of repeated runs (initializations)")
    p_uni.add_argument(
        "--instance-seed",
        type=int,
        default=None,
        help="seed of the fixed (graph, X, Y) instance; defaults to the reference instance",
    )
    p_uni.add_argument("--jobs", type=int, default=1)
    p_uni.add_argument("--out", required=True)

    p_spec = sub.add_parser("spectra", help="eigenvalue and filter-response tables/plots")
    group = p_spec.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph-file", default=None)
    group.add_argument("--er", nargs=2, metavar=("N", "P"), default=None)
    p_spec.add_argument("--out", required=True)

    p_ver = sub.add_parser("verify", help="randomized property suites")
    p_ver.add_argument("--kind", choices=["injectivity", "independence", "equivalence"], required=True)
    p_ver.add_argument("--pairs", type=int, default=1000)
    p_ver.add_argument("--k", type=int, default=None)
    p_ver.add_argument("--d", type=int, default=4)
    p_ver.add_argument("--c", type=int, default=4)
    p_ver.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    if getattr(args, "k", None) is None and getattr(args, "command", "") == "verify":
        args.k = 2 if args.kind == "independence" else 1
    try:
        if args.command == "universality":
            return cmd_universality(args)
        if args.command == "spectra":
            return cmd_spectra(args)
        return cmd_verify(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
