"""The generic k-means homogeneity protocol, parameter sweeps and report files.

One trial draws a dataset, builds an ensemble of ``n`` k-means partitions
and records its alpha-homogeneity.  Each sweep value is run for ``trials``
trials.  Seeds of every dataset and ensemble are derived from the base seed
and the (sweep index, trial) position, so reports are reproducible whatever
the number of worker processes.
"""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from .clustering import Dataset, GeneratorConfig, KMeansConfig, ensemble, generate, load_csv
from .homogeneity import StabilityProfile, alpha_homogeneity, select_clusters

PROFILES = {
    "desk": {"trials": 20, "n": 50, "m_c": 25},
    "paper": {"trials": 100, "n": 100, "m_c": 50},
}
SWEEPS = ("k", "sigma", "m_c")

REPORT_COLUMNS = ("sweep", "value", "mean_h_star", "std_h_star", "trials", "n")
STABILITY_COLUMNS = ("k", "h_star", "instability", "frechet_medoid", "selected")


def derive_seed(seed: int, *key: int) -> int:
    """64-bit seed for position ``key`` under ``seed``."""
    seq = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=key)
    return int(seq.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class DataSpec:
    """Either a generator configuration or a CSV file with read options."""

    generator: GeneratorConfig | None = None
    path: str | None = None
    header: bool = False
    drop_col: int | None = None
    standardize: bool = False

    def __post_init__(self):
        if (self.generator is None) == (self.path is None):
            raise ValueError("give exactly one of a generator config or a CSV path")

    def load(self, seed: int | None = None, **overrides) -> Dataset:
        if self.path is not None:
            if overrides:
                raise ValueError(f"cannot vary {sorted(overrides)} for a CSV dataset")
            return load_csv(self.path, self.header, self.drop_col, self.standardize)
        config = self.generator
        if seed is not None:
            overrides["seed"] = seed
        return generate(replace(config, **overrides))

    def to_dict(self) -> dict:
        if self.path is not None:
            return {"path": self.path, "header": self.header, "drop_col": self.drop_col,
                    "standardize": self.standardize}
        return {"generator": asdict(self.generator)}


@dataclass(frozen=True)
class ExperimentConfig:
    data: DataSpec
    sweep: str = "k"
    values: tuple = (2, 3, 4, 5, 6, 7, 8, 9, 10)
    k: int = 4
    n: int = 100
    trials: int = 100
    seed: int = 0
    max_iter: int = 100
    n_init: int = 1

    def __post_init__(self):
        if self.sweep not in SWEEPS:
            raise ValueError(f"sweep must be one of {SWEEPS}, got {self.sweep!r}")
        values = tuple(self.values)
        if not values:
            raise ValueError("sweep values must be non-empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        if self.sweep in ("k", "m_c"):
            if any(int(v) != v or v < 1 for v in values):
                raise ValueError(f"{self.sweep} values must be positive integers")
            values = tuple(int(v) for v in values)
        else:
            values = tuple(float(v) for v in values)
        object.__setattr__(self, "values", values)
        if self.trials < 1 or self.n < 1:
            raise ValueError("trials and n must be at least 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["data"] = self.data.to_dict()
        d["values"] = list(self.values)
        return d


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)
    runtime: float = 0.0
    status: str = "ok"
    error: str | None = None

    def mean_h_star(self, value) -> float:
        for row in self.rows:
            if row["value"] == value:
                return row["mean_h_star"]
        raise KeyError(value)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "error": self.error,
            "runtime_seconds": self.runtime,
            "config": self.config.to_dict(),
            "rows": self.rows,
            "raw_h_star": {_fmt(v): hs for v, hs in self.raw.items()},
        }


def run_trial(config: ExperimentConfig, index: int, trial: int) -> float:
    value = config.values[index]
    k = value if config.sweep == "k" else config.k
    overrides = {} if config.sweep == "k" else {config.sweep: value}
    data_seed = derive_seed(config.seed, 0, trial) if config.data.generator is not None else None
    data = config.data.load(data_seed, **overrides)
    km = KMeansConfig(k, config.max_iter, derive_seed(config.seed, 1, index, trial), n_init=config.n_init)
    return alpha_homogeneity(ensemble(data, km, config.n)).h_star


def run_protocol(config: ExperimentConfig, n_jobs: int = 1, out_dir=None) -> ExperimentReport:
    """Run every sweep value for ``config.trials`` trials.

    With ``out_dir`` the report files are rewritten after every sweep value,
    and on failure once more with the completed rows and a failure marker.
    """
    report = ExperimentReport(config)
    start = time.perf_counter()
    parallel = Parallel(n_jobs=n_jobs)
    try:
        for index, value in enumerate(config.values):
            hs = parallel(delayed(run_trial)(config, index, t) for t in range(config.trials))
            hs = [float(h) for h in hs]
            report.raw[value] = hs
            report.rows.append({
                "sweep": config.sweep,
                "value": value,
                "mean_h_star": float(np.mean(hs)),
                "std_h_star": float(np.std(hs)),
                "trials": config.trials,
                "n": config.n,
            })
            if out_dir is not None:
                report.runtime = time.perf_counter() - start
                write_report(report, out_dir)
    except Exception as exc:
        report.status = "failed"
        report.error = f"{type(exc).__name__}: {exc}"
        if out_dir is not None:
            write_report(report, out_dir)
        raise
    report.runtime = time.perf_counter() - start
    if out_dir is not None:
        write_report(report, out_dir)
    return report


@dataclass
class SelectionResult:
    profile: StabilityProfile
    cluster_sizes: dict

    def to_dict(self) -> dict:
        d = self.profile.to_dict()
        d["normalized_cluster_sizes"] = {str(k): v for k, v in self.cluster_sizes.items()}
        return d


def normalized_cluster_sizes(sample) -> list[float]:
    """Cluster sizes over ``m``, sorted largest first, averaged over the sample."""
    sizes = np.sort(sample.stack().sum(axis=2), axis=1)[:, ::-1] / sample.n_points
    return [float(v) for v in sizes.mean(axis=0)]


def run_select(data: Dataset, ks, n: int, seed: int, max_iter: int = 100, n_init: int = 1,
               n_jobs: int = 1) -> SelectionResult:
    """Build one ensemble per ``k`` on ``data`` and score them."""
    ks = sorted(int(k) for k in ks)
    configs = [KMeansConfig(k, max_iter, derive_seed(seed, 1, k), n_init=n_init) for k in ks]
    samples = Parallel(n_jobs=n_jobs)(delayed(ensemble)(data, c, n) for c in configs)
    by_k = dict(zip(ks, samples))
    profile = select_clusters(by_k)
    return SelectionResult(profile, {ks[-1]: normalized_cluster_sizes(by_k[ks[-1]])})


# --- files ---------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float) and math.isfinite(value):
        return repr(value)
    return str(value)


def _csv_text(columns, rows, note: str | None = None) -> str:
    buf = io.StringIO()
    buf.write("# columns: " + ",".join(columns) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(_fmt(row[c]) for c in columns)
    if note:
        buf.write(f"# {note}\n")
    return buf.getvalue()


def report_csv(report: ExperimentReport) -> str:
    note = f"FAILED: {report.error}" if report.status != "ok" else None
    return _csv_text(REPORT_COLUMNS, report.rows, note)


def stability_csv(result: SelectionResult) -> str:
    p = result.profile
    rows = [dict(r, selected=r["k"] == p.selected) for r in p.rows()]
    return _csv_text(STABILITY_COLUMNS, rows)


def cluster_sizes_csv(result: SelectionResult) -> str:
    rows = []
    for k, sizes in result.cluster_sizes.items():
        rows += [{"k": k, "rank": r + 1, "size": s} for r, s in enumerate(sizes)]
    return _csv_text(("k", "rank", "size"), rows)


def line_chart_svg(xs, ys, xlabel: str, ylabel: str = "mean h*", width: int = 480, height: int = 320) -> str:
    """Tiny dependency-free SVG polyline chart with y fixed to [0, 1]."""
    pad = 48
    xs = [float(x) for x in xs]
    lo, hi = min(xs), max(xs)
    span = hi - lo or 1.0

    def px(x):
        return pad + (x - lo) / span * (width - 2 * pad)

    def py(y):
        return height - pad - y * (height - 2 * pad)

    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
    ]
    for y in (0.0, 0.5, 1.0):
        parts.append(f'<text x="{pad - 6}" y="{py(y) + 4:.2f}" font-size="11" text-anchor="end">{y:g}</text>')
    for x in xs:
        parts.append(f'<text x="{px(x):.2f}" y="{height - pad + 16}" font-size="11" text-anchor="middle">{x:g}</text>')
    parts += [
        f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="2"/>',
        *(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="steelblue"/>' for x, y in zip(xs, ys)),
        f'<text x="{width / 2:.0f}" y="{height - 8}" font-size="12" text-anchor="middle">{xlabel}</text>',
        f'<text x="14" y="{height / 2:.0f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 14 {height / 2:.0f})">{ylabel}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def write_report(report: ExperimentReport, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    (out / "report.csv").write_text(report_csv(report))
    if report.rows:
        xs = [r["value"] for r in report.rows]
        ys = [r["mean_h_star"] for r in report.rows]
        (out / "report.svg").write_text(line_chart_svg(xs, ys, report.config.sweep))


def write_selection(result: SelectionResult, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "stability.json").write_text(json.dumps(result.to_dict(), indent=2) + "\n")
    (out / "stability.csv").write_text(stability_csv(result))
    (out / "cluster_sizes.csv").write_text(cluster_sizes_csv(result))
    p = result.profile
    (out / "stability.svg").write_text(line_chart_svg(p.ks, p.h_star_k, "k", "h*"))


def read_key_values(path) -> dict:
    """Parse a plain ``key = value`` file (``#`` comments allowed)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string("[config]\n" + Path(path).read_text())
    return dict(parser["config"])
