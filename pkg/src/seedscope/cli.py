"""Command-line surface.

Subcommands: ``bounds`` (closed-form thresholds), ``ks`` (two-sample
test, classical or trimmed), ``alpha`` (bootstrap alpha_hat), ``metrics``
(per-model table), ``synth`` (generate a pool file), ``sweep``
(ensemble-size experiment).  Every output embeds a RunManifest; repeated
runs with the same arguments are byte-identical.  All I/O is local files
and stdout.

Exit codes: 0 success/accept, 3 test rejected, 1 usage error, 2 data
error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .alpha import AlphaConfig, estimate_alpha
from .bounds import (
    corollary_bound,
    l1_bound,
    L1BoundInputs,
    one_sample_threshold,
    theorem1_epsilon,
    two_sample_threshold,
)
from .ecdf import ecdf_from_values, sup_distance
from .manifest import RunManifest, canonical_json, write_output
from .metrics import metrics_report
from .pool import PoolError, clip_pool, load_pool, make_split, pool_manifest, save_pool
from .synth import SynthSpec, ensemble_sweep, generate_pool, paper_cnn_analogue, table1_summary
from .trimming import robust_test

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_REJECT = 3


class _Parser(argparse.ArgumentParser):
    # usage failures exit 1, not argparse's default 2 (2 is reserved for data)
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_grid(text: str) -> np.ndarray:
    if ":" in text:
        start, stop, count = text.split(":")
        return np.linspace(float(start), float(stop), int(count))
    return np.array([float(x) for x in text.split(",")])


def _reference_ids(args, pool) -> list[str]:
    if args.reference_file:
        ids = [
            line.strip()
            for line in Path(args.reference_file).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
    elif args.reference_ids:
        ids = [x for x in args.reference_ids.split(",") if x]
    else:
        ids = [i for i in pool.model_ids if i != getattr(args, "candidate", None)]
    known = set(pool.model_ids)
    missing = [i for i in ids if i not in known]
    if missing:
        raise KeyError(f"unknown reference ids: {missing}")
    return ids


def _load(args):
    pool = load_pool(args.pool)
    if args.s_max is not None:
        pool = clip_pool(pool, args.s_max)
    return pool


def _emit(payload, manifest, args, filename) -> str:
    out_path = Path(args.out) / filename if args.out else None
    text = write_output(payload, manifest, out_path)
    sys.stdout.write(text)
    return text


def _write_csv(path: Path, header: str, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(float(x)) if isinstance(x, float) else str(x) for x in row) + "\n")


def cmd_bounds(args) -> int:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    if args.mode == "two-sample":
        value = two_sample_threshold(args.N, args.eps_a)
        payload = {"mode": args.mode, "N": args.N, "epsilon_a": args.eps_a, "delta_a": value}
    elif args.mode == "one-sample":
        value = one_sample_threshold(args.N, args.eps_a)
        payload = {"mode": args.mode, "N": args.N, "epsilon": args.eps_a, "delta": value}
    elif args.mode == "theorem1":
        raw = theorem1_epsilon(args.M, args.N, args.delta_b, clamp=False)
        payload = {
            "mode": args.mode,
            "M": args.M,
            "N": args.N,
            "delta_b": args.delta_b,
            "epsilon_b": min(raw, 1.0),
            "epsilon_b_raw": raw,
        }
    elif args.mode == "corollary":
        raw = corollary_bound(args.M, args.N, args.delta_a, args.delta_b, floor=False)
        payload = {
            "mode": args.mode,
            "M": args.M,
            "N": args.N,
            "delta_a": args.delta_a,
            "delta_b": args.delta_b,
            "coverage": max(raw, 0.0),
            "coverage_raw": raw,
        }
    else:  # l1
        nu, eps = l1_bound(
            L1BoundInputs(args.alpha, args.gamma, args.delta_b, args.delta_c, args.support_len),
            args.N,
            args.M,
        )
        payload = {
            "mode": args.mode,
            "nu": nu,
            "epsilon": eps,
            "alpha": args.alpha,
            "gamma": args.gamma,
            "delta_b": args.delta_b,
            "delta_c": args.delta_c,
            "support_len": args.support_len,
            "N": args.N,
            "M": args.M,
        }
    _emit(payload, RunManifest.create("bounds", params), args, "bounds.json")
    return EXIT_OK


def cmd_ks(args) -> int:
    pool = _load(args)
    candidate_id = args.candidate
    if candidate_id not in pool.model_ids:
        raise KeyError(f"unknown candidate id {candidate_id!r}")
    reference_ids = _reference_ids(args, pool)
    split = make_split(pool.n_test, args.split, args.seed)
    n = split.candidate_indices.size
    ref_matrix = pool.gap_matrix(reference_ids)
    reference = ecdf_from_values(ref_matrix[:, split.reference_indices].ravel())
    candidate = ecdf_from_values(pool.model(candidate_id).gaps[split.candidate_indices])
    if args.alpha is None:
        statistic = sup_distance(candidate, reference)
        threshold = two_sample_threshold(n, args.eps_a)
        accept = statistic <= threshold
        detail = {"test": "classical"}
    else:
        result = robust_test(candidate, reference, args.alpha, args.eps_a, n)
        statistic, threshold, accept = result.statistic, result.threshold, result.accept
        detail = {
            "test": "trimmed",
            "alpha": args.alpha,
            "witness": result.witness,
            "degenerate_reference": result.degenerate_reference,
        }
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    payload = {
        "candidate": candidate_id,
        "reference_ids": reference_ids,
        "statistic": statistic,
        "delta_a": two_sample_threshold(n, args.eps_a),
        "threshold": threshold,
        "accept": bool(accept),
        "N": n,
        "epsilon_a": args.eps_a,
        "split": args.split,
        "seed": args.seed,
        **detail,
    }
    _emit(payload, RunManifest.create("ks", params, [args.pool]), args, "ks.json")
    return EXIT_OK if accept else EXIT_REJECT


def cmd_alpha(args) -> int:
    pool = _load(args)
    if args.candidate not in pool.model_ids:
        raise KeyError(f"unknown candidate id {args.candidate!r}")
    reference_ids = _reference_ids(args, pool)
    cfg = AlphaConfig(
        alpha_grid=_parse_grid(args.alpha_grid),
        n_bootstrap=args.bootstrap,
        epsilon_a=args.eps_a,
        rng_seed=args.seed,
        resample_size=args.resample_size,
    )
    est = estimate_alpha(pool, reference_ids, args.candidate, cfg)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    payload = est.to_payload()
    payload["reference_ids"] = reference_ids
    _emit(payload, RunManifest.create("alpha", params, [args.pool]), args, "alpha.json")
    return EXIT_OK


def cmd_metrics(args) -> int:
    pool = _load(args)
    ensemble_ids = (
        [x for x in args.ensemble_ids.split(",") if x] if args.ensemble_ids else None
    )
    records = metrics_report(pool, ensemble_ids, n_bins=args.bins)
    n = pool.n_test
    rows = [
        {
            "model_id": r.model_id,
            "accuracy": r.accuracy,
            "churn_vs_ensemble": r.churn_vs_ensemble,
            "churn_vs_ensemble_frac": r.churn_vs_ensemble / n,
            "avg_pairwise_churn": r.avg_pairwise_churn,
            "avg_pairwise_churn_frac": r.avg_pairwise_churn / n,
            "ece": r.ece,
        }
        for r in records
    ]
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    manifest = RunManifest.create("metrics", params, [args.pool])
    _emit({"bins": args.bins, "models": rows}, manifest, args, "metrics.json")
    if args.out:
        csv_path = Path(args.out) / "metrics.csv"
        _write_csv(
            csv_path,
            "model_id,accuracy,churn_vs_ensemble,avg_pairwise_churn,ece",
            [
                (r.model_id, r.accuracy, r.churn_vs_ensemble, r.avg_pairwise_churn, r.ece)
                for r in records
            ],
        )
        with open(csv_path.with_suffix(".csv.manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(canonical_json(manifest.to_dict()))
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.preset:
        if args.preset != "paper-cnn-analogue":
            raise KeyError(f"unknown preset {args.preset!r}")
        spec = paper_cnn_analogue(rng_seed=args.seed)
    else:
        spec = SynthSpec(
            n_models=args.n_models,
            n_test=args.n_test,
            family=args.family,
            mean_gap=args.mean_gap,
            mean_jitter=args.mean_jitter,
            noise_scale=args.noise_scale,
            scale_jitter=args.scale_jitter,
            point_spread=args.point_spread,
            label_rule=args.label_rule,
            rng_seed=args.seed,
        )
    pool = generate_pool(spec)
    out_dir = Path(args.out) if args.out else Path(".")
    pool_path = out_dir / "pool.csv"
    out_dir.mkdir(parents=True, exist_ok=True)
    save_pool(pool, pool_path)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    manifest = RunManifest.create("synth", params)
    payload = {"pool_path": str(pool_path), "pool": pool_manifest(pool), "spec": spec.__dict__}
    text = write_output(payload, manifest, out_dir / "pool_manifest.json")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    pool = _load(args)
    cfg = AlphaConfig(
        alpha_grid=_parse_grid(args.alpha_grid),
        n_bootstrap=args.bootstrap,
        epsilon_a=args.eps_a,
        rng_seed=args.seed,
        resample_size=args.resample_size,
    )
    sizes = [int(x) for x in args.sizes.split(",") if x]
    split = None
    if args.split != "full":
        split = make_split(pool.n_test, args.split, args.seed)
    result = ensemble_sweep(
        pool, sizes, args.reps, cfg, split, member_replacement=args.member_replacement
    )
    summary = table1_summary(result, alpha_cut=args.alpha_cut)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "out")}
    manifest = RunManifest.create("sweep", params, [args.pool])
    payload = {
        "sizes": list(result.sizes),
        "repetitions": result.repetitions,
        "delta_a": result.delta_a,
        "resample_size": result.resample_size,
        "B": result.n_bootstrap,
        "member_replacement": result.member_replacement,
        "split_mode": result.split_mode,
        "summary": summary,
    }
    _emit(payload, manifest, args, "sweep_summary.json")
    if args.out:
        csv_path = Path(args.out) / "sweep.csv"
        _write_csv(csv_path, "size,rep,metric,value", result.tidy_rows())
        with open(csv_path.with_suffix(".csv.manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(canonical_json(manifest.to_dict()))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="seedscope", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="closed-form DKW thresholds and bounds")
    group = b.add_mutually_exclusive_group(required=True)
    for mode in ("two-sample", "one-sample", "theorem1", "corollary", "l1"):
        group.add_argument(
            f"--{mode}", dest="mode", action="store_const", const=mode
        )
    b.add_argument("-N", type=int, default=1, help="sample size")
    b.add_argument("-M", type=int, default=1, help="number of models")
    b.add_argument("--eps-a", "--eps", dest="eps_a", type=float, default=0.05)
    b.add_argument("--delta-a", type=float, default=0.05)
    b.add_argument("--delta-b", type=float, default=0.05)
    b.add_argument("--delta-c", type=float, default=0.05)
    b.add_argument("--alpha", type=float, default=0.0)
    b.add_argument("--gamma", type=float, default=0.0)
    b.add_argument("--support-len", type=float, default=2 * 25.0)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bounds)

    def common(p, candidate=True):
        p.add_argument("--pool", required=True)
        if candidate:
            p.add_argument("--candidate", required=True)
            p.add_argument("--reference-ids", default=None)
            p.add_argument("--reference-file", default=None)
        p.add_argument("--eps-a", "--eps", dest="eps_a", type=float, default=0.01)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--s-max", type=float, default=None)
        p.add_argument("--out", default=None)

    k = sub.add_parser("ks", help="two-sample test of a candidate against a reference pool")
    common(k)
    k.add_argument("--split", choices=("disjoint", "bootstrap"), default="bootstrap")
    k.add_argument("--alpha", type=float, default=None, help="run the trimmed test at this level")
    k.set_defaults(func=cmd_ks)

    a = sub.add_parser("alpha", help="bootstrap alpha_hat estimate")
    common(a)
    a.add_argument("--alpha-grid", default="0:0.25:51")
    a.add_argument("--bootstrap", "-B", type=int, default=100)
    a.add_argument("--resample-size", type=int, default=None)
    a.set_defaults(func=cmd_alpha)

    m = sub.add_parser("metrics", help="accuracy / churn / ECE table")
    common(m, candidate=False)
    m.add_argument("--ensemble-ids", default=None)
    m.add_argument("--bins", type=int, default=15)
    m.set_defaults(func=cmd_metrics)

    s = sub.add_parser("synth", help="generate a synthetic pool file")
    s.add_argument("--preset", default=None)
    s.add_argument("--n-models", type=int, default=50)
    s.add_argument("--n-test", type=int, default=1000)
    s.add_argument("--family", default="gaussian-mixture-per-seed")
    s.add_argument("--mean-gap", type=float, default=1.1)
    s.add_argument("--mean-jitter", type=float, default=0.5)
    s.add_argument("--noise-scale", type=float, default=0.5)
    s.add_argument("--scale-jitter", type=float, default=0.1)
    s.add_argument("--point-spread", type=float, default=0.6)
    s.add_argument("--label-rule", default="balanced")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_synth)

    w = sub.add_parser("sweep", help="ensemble-size sweep against a first-half reference")
    common(w, candidate=False)
    w.add_argument("--sizes", default="3,5,10,30")
    w.add_argument("--reps", type=int, default=100)
    w.add_argument("--alpha-grid", default="0:0.25:51")
    w.add_argument("--bootstrap", "-B", type=int, default=100)
    w.add_argument("--resample-size", type=int, default=None)
    w.add_argument("--alpha-cut", type=float, default=0.05)
    w.add_argument("--split", choices=("full", "disjoint", "bootstrap"), default="full")
    w.add_argument("--member-replacement", action="store_true")
    w.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PoolError as exc:
        sys.stderr.write(f"seedscope: data error: {exc}\n")
        return EXIT_DATA
    except FileNotFoundError as exc:
        sys.stderr.write(f"seedscope: data error: {exc}\n")
        return EXIT_DATA
    except KeyError as exc:
        sys.stderr.write(f"seedscope: error: {exc.args[0] if exc.args else exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write(f"seedscope: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
