"""Command-line front end: ``orbithom {generate,cluster,homogeneity,mean,select,protocol}``.

Exit codes: 0 success, 1 a computation guard was exceeded, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .clustering import DataError, GeneratorConfig, KINDS, KMeansConfig, ensemble
from .experiment import (
    PROFILES,
    SWEEPS,
    DataSpec,
    ExperimentConfig,
    read_key_values,
    report_csv,
    run_protocol,
    run_select,
    stability_csv,
    write_selection,
)
from .frechet import GuardExceeded, exact_mean_set, mean_partition
from .homogeneity import alpha_homogeneity
from .partitions import PartitionError, read_partition, to_csv, write_partition
from .sample import EnsembleSample

log = logging.getLogger("orbithom")

EXIT_GUARD = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


# --- argument helpers ----------------------------------------------------

def _number_list(text: str) -> list[float]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(float(part) if any(c in part for c in ".eE") else int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _add_data_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("dataset")
    g.add_argument("--data", metavar="CSV", help="read points from a CSV file instead of generating")
    g.add_argument("--header", action="store_true", help="skip the first CSV row")
    g.add_argument("--drop-col", type=int, metavar="IDX", help="drop this CSV column (e.g. a class label)")
    g.add_argument("--standardize", action="store_true", help="z-score every CSV column")
    g.add_argument("--kind", choices=sorted(KINDS), default=None, help="synthetic dataset (default G4)")
    g.add_argument("--sigma", type=float, default=None, help="noise level / UD scale factor (default 0.1)")
    g.add_argument("--m-c", type=int, default=None, help="points per component")
    g.add_argument("--config", metavar="FILE", help="key = value file with kind, sigma, m_c, seed")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="DIR", help="output directory (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _generator_config(args, m_c_default: int = 50) -> GeneratorConfig:
    values = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise InputError(f"{path}: no such file")
        values = read_key_values(path)
    try:
        kind = args.kind or values.get("kind", "G4")
        sigma = args.sigma if args.sigma is not None else float(values.get("sigma", 0.1))
        m_c = args.m_c if args.m_c is not None else int(values.get("m_c", m_c_default))
        seed = int(values.get("seed", args.seed))
    except ValueError as exc:
        raise InputError(f"bad generator setting: {exc}") from None
    return GeneratorConfig(kind, sigma, m_c, seed)


def _data_spec(args, m_c_default: int = 50) -> DataSpec:
    if args.data:
        if not Path(args.data).is_file():
            raise InputError(f"{args.data}: no such file")
        return DataSpec(path=args.data, header=args.header, drop_col=args.drop_col,
                        standardize=args.standardize)
    return DataSpec(generator=_generator_config(args, m_c_default))


def _emit(text: str, out: str | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    (path / name).write_text(text)


def _read_sample(paths, n_clusters: int | None) -> EnsembleSample:
    files = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(p for p in path.iterdir() if p.suffix in (".csv", ".txt")))
        elif path.is_file():
            files.append(path)
        else:
            raise InputError(f"{path}: no such file or directory")
    if not files:
        raise InputError("no partition files given")
    parts = [read_partition(f, n_clusters) for f in files]
    if n_clusters is None:
        # label files may omit trailing empty clusters; pad to the common maximum
        k = max(p.n_clusters for p in parts)
        parts = [p if p.n_clusters == k or not p.is_hard else read_partition(f, k)
                 for p, f in zip(parts, files)]
    return EnsembleSample(parts)


# --- subcommands ---------------------------------------------------------

def cmd_generate(args) -> None:
    data = _data_spec(args).load()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in data.points:
        writer.writerow(repr(float(v)) for v in row)
    _emit(buf.getvalue(), args.out, f"{data.name}.csv")


def cmd_cluster(args) -> None:
    data = _data_spec(args).load()
    sample = ensemble(data, KMeansConfig(args.k, args.max_iter, args.seed, n_init=args.n_init), args.n)
    if args.out is None:
        for X in sample:
            sys.stdout.write(",".join(str(int(v) + 1) for v in X.labels) + "\n")
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    width = len(str(args.n - 1))
    for r, X in enumerate(sample):
        write_partition(X, out / f"run_{r:0{width}d}.csv")


def _homogeneity_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "alpha", "h", "in_best_ball"])
    outliers = set(report.outliers)
    for i, (a, h) in enumerate(zip(report.alphas, report.h)):
        w.writerow([i, repr(float(a)), repr(float(h)), int(i not in outliers)])
    return buf.getvalue()


def cmd_homogeneity(args) -> None:
    if args.partitions:
        sample = _read_sample(args.partitions, args.n_clusters)
    else:
        data = _data_spec(args).load()
        sample = ensemble(data, KMeansConfig(args.k, args.max_iter, args.seed, n_init=args.n_init), args.n)
    report = alpha_homogeneity(sample)
    if args.format == "csv":
        _emit(_homogeneity_csv(report), args.out, "homogeneity.csv")
    else:
        _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out, "homogeneity.json")


def cmd_mean(args) -> None:
    sample = _read_sample(args.partitions, args.n_clusters)
    if args.exact:
        result = exact_mean_set(sample, max_tuples=args.max_tuples)
        payload = result.to_dict()
        mean = result.minimizers[0]
    else:
        result = mean_partition(sample, args.init, args.tol, args.max_iter)
        payload = result.to_dict()
        mean = result.mean
    if args.format == "csv":
        _emit(to_csv(mean), args.out, "mean.csv")
    else:
        _emit(json.dumps(payload, indent=2) + "\n", args.out, "mean.json")
        if args.out:
            _emit(to_csv(mean), args.out, "mean.csv")


def _profile_values(args) -> dict:
    prof = PROFILES[args.profile]
    return {
        "trials": args.trials if args.trials is not None else prof["trials"],
        "n": args.n if args.n is not None else prof["n"],
        "m_c": prof["m_c"],
    }


def cmd_select(args) -> None:
    prof = _profile_values(args)
    data = _data_spec(args, prof["m_c"]).load()
    result = run_select(data, args.ks, prof["n"], args.seed, args.max_iter, args.n_init, args.jobs)
    if args.out:
        write_selection(result, args.out)
    elif args.format == "csv":
        sys.stdout.write(stability_csv(result))
    else:
        sys.stdout.write(json.dumps(result.to_dict(), indent=2) + "\n")
    log.info("selected number of clusters: %d", result.profile.selected)


def cmd_protocol(args) -> None:
    prof = _profile_values(args)
    spec = _data_spec(args, prof["m_c"])
    values = args.values
    if values is None:
        values = list(range(2, 11)) if args.sweep == "k" else None
    if values is None:
        raise InputError(f"--values is required for a {args.sweep} sweep")
    try:
        config = ExperimentConfig(spec, args.sweep, tuple(values), args.k, prof["n"], prof["trials"],
                                  args.seed, args.max_iter, args.n_init)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = run_protocol(config, n_jobs=args.jobs, out_dir=args.out)
    if args.out is None:
        if args.format == "csv":
            sys.stdout.write(report_csv(report))
        else:
            sys.stdout.write(json.dumps(report.to_dict(), indent=2) + "\n")


# --- parser --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbithom", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset as CSV")
    _add_data_args(p)
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    def kmeans_args(p, n_default=100):
        p.add_argument("-k", type=int, default=4, help="number of clusters")
        p.add_argument("-n", type=int, default=n_default, help="ensemble size")
        p.add_argument("--max-iter", type=int, default=100)
        p.add_argument("--n-init", type=int, default=1, help="Forgy restarts per run, best inertia kept")

    p = sub.add_parser("cluster", help="run a k-means ensemble and export label vectors")
    _add_data_args(p)
    _add_common(p)
    kmeans_args(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("homogeneity", help="alpha-homogeneity of partition files or a fresh ensemble")
    p.add_argument("partitions", nargs="*", help="partition files or directories")
    p.add_argument("--n-clusters", type=int, help="row count for label-vector files")
    _add_data_args(p)
    _add_common(p)
    kmeans_args(p)
    p.set_defaults(func=cmd_homogeneity)

    p = sub.add_parser("mean", help="mean partition of partition files")
    p.add_argument("partitions", nargs="+", help="partition files or directories")
    p.add_argument("--n-clusters", type=int)
    p.add_argument("--init", choices=("medoid", "all"), default="medoid")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--exact", action="store_true", help="exhaustive mean set (tiny samples)")
    p.add_argument("--max-tuples", type=int, default=10**6)
    _add_common(p)
    p.set_defaults(func=cmd_mean)

    def protocol_args(p):
        p.add_argument("--profile", choices=sorted(PROFILES), default="desk")
        p.add_argument("--trials", type=int, help="override the profile's trial count")
        p.add_argument("-n", type=int, help="override the profile's ensemble size")
        p.add_argument("--max-iter", type=int, default=100)
        p.add_argument("--n-init", type=int, default=1)
        p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("select", help="choose k by maximal alpha-homogeneity")
    p.add_argument("--ks", type=_number_list, default=list(range(2, 11)), help="e.g. 2..10")
    _add_data_args(p)
    _add_common(p)
    protocol_args(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("protocol", help="generic protocol with a parameter sweep")
    p.add_argument("--sweep", choices=SWEEPS, default="k")
    p.add_argument("--values", type=_number_list, help="sweep values, e.g. 2..10 or 0.05,0.3")
    p.add_argument("-k", type=int, default=4, help="k when not sweeping k")
    _add_data_args(p)
    _add_common(p)
    protocol_args(p)
    p.set_defaults(func=cmd_protocol)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except (GuardExceeded, OverflowError) as exc:
        print(f"orbithom: guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InputError, PartitionError, DataError, FileNotFoundError, ValueError) as exc:
        print(f"orbithom: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
