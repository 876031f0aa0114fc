"""Evaluation reports: aggregation, JSON/CSV/Markdown serialization."""

from __future__ import annotations

import dataclasses
import json
import typing
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import stats
from .bench import DEFAULT_BENCH_N, DEFAULT_WARMUP, TimingResult, time_generation
from .errors import MetricError
from .generators import ByteSample, RandomSource, source_bytes
from .stats import (
    AcfSeries,
    ChiSquaredResult,
    EntropyResult,
    LagCorrMatrix,
    Pmf,
    PredictabilityResult,
    RunsResult,
    SpectralSeries,
)

SCHEMA_VERSION = "1"
FORMATS = frozenset({"json", "csv", "md"})

DISPLAY_NAMES = {"emn": "EMN", "osrandom": "SystemRandom", "mt": "MersenneTwister"}

METRIC_ROWS = (
    "Chi-Squared Statistic",
    "Chi-Squared p-value",
    "Entropy",
    "Predictability",
    "High-Frequency Time (seconds)",
    "Runs Test (Observed/Expected)",
)


@dataclass(frozen=True)
class AnalysisParams:
    sample_bytes: int = stats.DEFAULT_SAMPLE_BYTES
    max_lag: int = stats.DEFAULT_MAX_LAG
    heatmap_k: int = stats.DEFAULT_HEATMAP_K
    n_fft: int = stats.DEFAULT_N_FFT
    bench_n: int = DEFAULT_BENCH_N
    bench_warmup: int = DEFAULT_WARMUP
    reps: int = 1


@dataclass(frozen=True)
class Plots:
    pmf: Pmf
    acf: AcfSeries
    psd: SpectralSeries
    heatmap: LagCorrMatrix


@dataclass(frozen=True)
class EvaluationReport:
    generator: str
    seed: str
    seed_origin: str
    sample_bytes: int
    params: AnalysisParams
    chi: ChiSquaredResult
    entropy: EntropyResult
    predictability: PredictabilityResult
    runs: RunsResult
    timing: TimingResult | None
    plots: Plots
    tool_version: str = __version__
    schema_version: str = SCHEMA_VERSION
    created_at: str = field(default="", compare=False)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EvaluationReport":
        return _load(cls, data)

    def to_json(self, canonical: bool = False, include_timing: bool = True) -> str:
        """Serialize to JSON.

        The canonical form drops ``created_at`` and sorts keys so reports
        built from the same sample compare byte-for-byte.
        """
        data = self.to_dict()
        if canonical:
            data.pop("created_at")
        if not include_timing:
            data.pop("timing")
        return json.dumps(data, sort_keys=canonical, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EvaluationReport":
        data = json.loads(text)
        data.setdefault("created_at", "")
        data.setdefault("timing", None)
        return cls.from_dict(data)


def _tuplify(value):
    if isinstance(value, list):
        return tuple(_tuplify(v) for v in value)
    return value


def _load(cls, data: dict):
    hints = typing.get_type_hints(cls)
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        value = data[f.name]
        hint = hints[f.name]
        target = next(
            (t for t in typing.get_args(hint) or (hint,) if dataclasses.is_dataclass(t)),
            None,
        )
        if target is not None and isinstance(value, dict):
            kwargs[f.name] = _load(target, value)
        else:
            kwargs[f.name] = _tuplify(value)
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# Building


def _run_metric(name: str, fn, *args):
    try:
        return fn(*args)
    except Exception as exc:
        raise MetricError(name, exc) from exc


def build_report(
    sample: ByteSample,
    timing: TimingResult | None,
    params: AnalysisParams = AnalysisParams(),
) -> EvaluationReport:
    """Run every metric once on ``sample`` and collect the results."""
    plots = Plots(
        pmf=_run_metric("pmf", stats.pmf, sample),
        acf=_run_metric("autocorrelation", stats.autocorrelation, sample, params.max_lag),
        psd=_run_metric("power_spectrum", stats.power_spectrum, sample, params.n_fft),
        heatmap=_run_metric(
            "lag_correlation_matrix", stats.lag_correlation_matrix, sample, params.heatmap_k
        ),
    )
    return EvaluationReport(
        generator=sample.generator,
        seed=sample.seed,
        seed_origin=sample.seed_origin,
        sample_bytes=len(sample),
        params=params,
        chi=_run_metric("chi_squared", stats.chi_squared_test, sample),
        entropy=_run_metric("entropy", stats.shannon_entropy, sample),
        predictability=_run_metric("predictability", stats.predictability, sample),
        runs=_run_metric("runs", stats.runs_test, sample),
        timing=timing,
        plots=plots,
        created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )


def evaluate_source(
    src: RandomSource,
    params: AnalysisParams = AnalysisParams(),
    timing_src: RandomSource | None = None,
) -> EvaluationReport:
    """Sample ``src``, time ``timing_src`` (if given) and build the report.

    Timing uses a separate instance so the sampled stream is not shifted by
    the benchmark draws.
    """
    sample = source_bytes(src, params.sample_bytes)
    timing = None
    if timing_src is not None:
        timing = time_generation(timing_src, params.bench_n, params.bench_warmup, params.reps)
    return build_report(sample, timing, params)


# ---------------------------------------------------------------------------
# Output


def _num(value) -> str:
    if isinstance(value, int):
        return str(value)
    # shortest repr that round-trips to the same double
    return repr(float(value))


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_num(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_outputs(report: EvaluationReport, out_dir, formats=("json", "csv")) -> list[Path]:
    """Write the report files for one generator and return their paths."""
    formats = set(formats)
    unknown = formats - FORMATS
    if unknown:
        raise ValueError(f"unknown output format(s): {', '.join(sorted(unknown))}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    gen = report.generator
    written = []

    if "json" in formats:
        path = out / f"{gen}.report.json"
        path.write_text(report.to_json(), encoding="utf-8", newline="\n")
        written.append(path)

    if "csv" in formats:
        p = report.plots
        path = out / f"{gen}.pmf.csv"
        _write_csv(path, ["byte", "probability"], enumerate(p.pmf.probabilities))
        written.append(path)

        path = out / f"{gen}.acf.csv"
        _write_csv(path, ["lag", "correlation"], zip(p.acf.lags, p.acf.values))
        written.append(path)

        path = out / f"{gen}.psd.csv"
        _write_csv(path, ["frequency", "power"], zip(p.psd.frequencies, p.psd.power))
        written.append(path)

        path = out / f"{gen}.heatmap.csv"
        header = ["lag"] + [str(lag) for lag in p.heatmap.lags]
        _write_csv(
            path, header, ((lag, *row) for lag, row in zip(p.heatmap.lags, p.heatmap.matrix))
        )
        written.append(path)

    if "md" in formats:
        path = out / f"{gen}.report.md"
        path.write_text(render_comparison([report]), encoding="utf-8", newline="\n")
        written.append(path)

    return written


def _metric_cells(report: EvaluationReport) -> list[str]:
    t = report.timing
    r = report.runs
    return [
        f"{report.chi.statistic:.4f}",
        f"{report.chi.p_value:.4f}",
        f"{report.entropy.bits:.4f}",
        f"{report.predictability.r:.4f}",
        "n/a" if t is None else f"{t.wall_seconds:.4f}",
        f"{r.observed} / {r.expected:.2f} (z={r.z_score:+.2f})",
    ]


def render_comparison(reports: list[EvaluationReport]) -> str:
    """Markdown table with one column per generator and one row per metric."""
    names = [DISPLAY_NAMES.get(r.generator, r.generator) for r in reports]
    cells = [_metric_cells(r) for r in reports]
    lines = [
        "| Metric | " + " | ".join(names) + " |",
        "|---|" + "---|" * len(reports),
    ]
    for i, label in enumerate(METRIC_ROWS):
        lines.append(f"| **{label}** | " + " | ".join(c[i] for c in cells) + " |")
    sizes = sorted({r.sample_bytes for r in reports})
    lines += [
        "",
        f"Sample size: {', '.join(str(s) for s in sizes)} bytes.",
        "Expected runs use the Wald-Wolfowitz formula 2*n0*n1/n + 1; "
        "z is the standardized deviation of the observed count.",
    ]
    if any(r.timing is not None for r in reports):
        t = next(r.timing for r in reports if r.timing is not None)
        lines.append(
            f"Time is the median of {t.reps} run(s) of {t.n_values} 256-bit generations."
        )
    return "\n".join(lines) + "\n"


def write_comparison(reports: list[EvaluationReport], out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "comparison.md"
    path.write_text(render_comparison(reports), encoding="utf-8", newline="\n")
    return path


def render_summary(report: EvaluationReport) -> str:
    """Short plain-text summary for terminal output."""
    cells = _metric_cells(report)
    width = max(len(label) for label in METRIC_ROWS)
    name = DISPLAY_NAMES.get(report.generator, report.generator)
    lines = [f"{name}  ({report.sample_bytes} bytes, seed {report.seed})"]
    lines += [f"  {label:<{width}}  {cell}" for label, cell in zip(METRIC_ROWS, cells)]
    return "\n".join(lines)
