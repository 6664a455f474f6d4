"""
End-to-end analysis of a batch of signal files.

normalize -> downsample at the first acf minimum -> partition -> symbolize
-> order estimates (consistent and spectral) -> D-Markov model -> metrics.

Every artifact is rendered to text by the same helpers the individual CLI
subcommands use, so running the subcommands in sequence reproduces the
pipeline output byte for byte.
"""
from __future__ import annotations

import csv
import fnmatch
import glob
import io
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import metrics, order_est, partition, pfsa, sigprep
from .errors import ConfigError, SymbolicMarkovError

CONFIG_VERSION = 1
DEPTH_SOURCES = ("spectral", "consistent", "manual")
METRICS_HEADER = ("source_file", "label", "depth", "d_M", "discrepancy")
DEFAULT_D_MAX = 4


@dataclass(frozen=True)
class PipelineConfig:
    inputs: tuple = ()
    output_dir: str = "out"
    alphabet_size: int = 3
    partition_method: str = "maxentropy"
    global_partition: bool = False
    max_lag: int | None = None
    gamma: float = 0.5
    beta: float = 0.2
    k_max: int | None = None
    i_max: int | None = None
    epsilon: float = 0.05
    d_max: int = DEFAULT_D_MAX
    depth_source: str = "spectral"
    depth_override: int | None = None
    labels: dict = field(default_factory=dict)
    jobs: int = 1
    fail_fast: bool = False
    config_version: int = CONFIG_VERSION

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        self.validate()

    def validate(self) -> None:
        if self.config_version != CONFIG_VERSION:
            raise ConfigError(f"unsupported config_version {self.config_version}")
        if self.alphabet_size < 2:
            raise ConfigError("alphabet_size must be >= 2")
        try:
            partition.Method(self.partition_method)
        except ValueError:
            raise ConfigError(f"unknown partition_method {self.partition_method!r}") from None
        self.order_params()
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        if self.d_max < 1:
            raise ConfigError("d_max must be >= 1")
        if self.depth_source not in DEPTH_SOURCES:
            raise ConfigError(f"depth_source must be one of {DEPTH_SOURCES}")
        if self.depth_source == "manual" and self.depth_override is None:
            raise ConfigError("depth_source 'manual' needs depth_override")
        if self.depth_override is not None and self.depth_override < 1:
            raise ConfigError("depth_override must be >= 1")
        if self.max_lag is not None and self.max_lag < 1:
            raise ConfigError("max_lag must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def order_params(self) -> order_est.OrderParams:
        return order_est.OrderParams(self.gamma, self.beta, self.k_max, self.i_max)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["inputs"] = list(self.inputs)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        return cls.from_dict(json.loads(text))


# --- text renderers shared with the CLI -----------------------------------

def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def order_report(seq, params, epsilon: float, d_max: int) -> dict:
    """Both order estimators side by side."""
    est = order_est.estimate_order(seq, params)
    one_step = pfsa.build_model(seq, 1)
    spec = order_est.spectral_depth_details(one_step.transition, epsilon, d_max)
    return {"consistent": est.to_dict(), "spectral": spec.to_dict()}, est


def choose_depth(report: dict, source: str, override: int | None, d_max: int) -> int:
    if override is not None:
        return int(override)
    if source == "spectral":
        return int(report["spectral"]["depth"])
    if source == "consistent":
        k = report["consistent"]["order"]
        # an order-0 chain still needs one state symbol; unfound memory uses the cap
        return d_max if k is None else max(1, min(int(k), d_max))
    raise ConfigError("manual depth source needs an explicit depth")


def metrics_row(model, source_file: str, label: str) -> list:
    return [source_file, label, model.depth,
            repr(metrics.model_complexity(model)),
            repr(metrics.info_gain_discrepancy(model))]


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --- per-file processing --------------------------------------------------

def label_for(path: str, labels: dict) -> str:
    for pattern, lab in labels.items():
        if fnmatch.fnmatch(path, pattern) or fnmatch.fnmatch(Path(path).name, pattern):
            return lab
    return ""


def expand_inputs(patterns) -> list[str]:
    found = set()
    for pat in patterns:
        hits = glob.glob(pat)
        if not hits and Path(pat).is_file():
            hits = [pat]
        found.update(hits)
    return sorted(found)


def _stage_preprocess(path: str, cfg: PipelineConfig):
    sig = sigprep.read_signal(path, label=label_for(path, cfg.labels))
    return sigprep.preprocess(sig, cfg.max_lag)


def _stage_model(path: str, pre, spec, cfg: PipelineConfig) -> dict:
    label = label_for(path, cfg.labels)
    seq = partition.symbolize(spec, pre.signal)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report, est = order_report(seq, cfg.order_params(), cfg.epsilon, cfg.d_max)
    depth = choose_depth(report, cfg.depth_source, cfg.depth_override, cfg.d_max)
    model = pfsa.build_model(seq, depth)
    diag = {"source_file": path, "label": label, **pre.diagnostics()}
    return {
        "diagnostics.json": dumps(diag),
        "preprocessed.csv": sigprep.format_signal(pre.signal),
        "partition.json": spec.to_json(),
        "symbols.sym": partition.format_symbols(seq),
        "order.json": dumps(report),
        "order_curve.csv": est.curve_csv(),
        "model.json": model.to_json(),
        "_metrics_row": metrics_row(model, path, label),
        "_residual": model.stationary_residual(),
    }


def _process_one(args):
    path, cfg, spec = args
    try:
        pre = _stage_preprocess(path, cfg)
        if spec is None:
            spec = partition.fit(pre.signal, cfg.alphabet_size, cfg.partition_method)
        return path, _stage_model(path, pre, spec, cfg), None
    except (SymbolicMarkovError, OSError, ValueError) as exc:
        return path, None, f"{type(exc).__name__}: {exc}"


def _process_global(args):
    path, cfg, pre, spec = args
    try:
        return path, _stage_model(path, pre, spec, cfg), None
    except (SymbolicMarkovError, OSError, ValueError) as exc:
        return path, None, f"{type(exc).__name__}: {exc}"


def _map(fn, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


@dataclass
class PipelineReport:
    outputs: dict
    metrics_csv: str
    errors: dict
    output_dir: Path | None = None
    global_partition: str | None = None

    @property
    def ok(self) -> bool:
        return not self.errors and bool(self.outputs)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1


def _artifact_dirs(paths) -> dict:
    """Per-input output directory names: the file stem, suffixed on clashes."""
    out, seen = {}, {}
    for p in paths:
        stem = Path(p).stem or "input"
        n = seen.get(stem, 0)
        seen[stem] = n + 1
        out[p] = stem if n == 0 else f"{stem}-{n}"
    return out


def run_pipeline(cfg: PipelineConfig, write: bool = True) -> PipelineReport:
    paths = expand_inputs(cfg.inputs)
    if not paths:
        return PipelineReport({}, render_csv(METRICS_HEADER, []), {"<inputs>": "no inputs"})
    errors: dict = {}
    global_json = None
    if cfg.global_partition:
        pres = {}
        for p in paths:
            try:
                pres[p] = _stage_preprocess(p, cfg)
            except (SymbolicMarkovError, OSError, ValueError) as exc:
                errors[p] = f"{type(exc).__name__}: {exc}"
                if cfg.fail_fast:
                    raise
        if pres:
            spec = global_spec(cfg, [pres[p].signal for p in sorted(pres)])
            global_json = spec.to_json()
            results = _map(_process_global, [(p, cfg, pres[p], spec) for p in sorted(pres)],
                           cfg.jobs)
        else:
            results = []
    else:
        results = _map(_process_one, [(p, cfg, None) for p in paths], cfg.jobs)

    outputs = {}
    for path, arts, err in results:
        if err is not None:
            errors[path] = err
            if cfg.fail_fast:
                raise SymbolicMarkovError(f"{path}: {err}")
        else:
            outputs[path] = arts
    rows = [outputs[p]["_metrics_row"] for p in sorted(outputs)]
    report = PipelineReport(outputs, render_csv(METRICS_HEADER, rows), errors,
                            global_partition=global_json)
    if write:
        _write(report, cfg, paths)
    return report


def global_spec(cfg: PipelineConfig, signals) -> partition.PartitionSpec:
    joined = np.concatenate([s.samples for s in signals])
    return partition.fit(joined, cfg.alphabet_size, cfg.partition_method)


def _write(report: PipelineReport, cfg: PipelineConfig, paths) -> None:
    root = Path(cfg.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    names = _artifact_dirs(paths)
    for path in sorted(report.outputs):
        d = root / names[path]
        d.mkdir(parents=True, exist_ok=True)
        for fname, text in report.outputs[path].items():
            if not fname.startswith("_"):
                (d / fname).write_bytes(text.encode())
    (root / "metrics.csv").write_bytes(report.metrics_csv.encode())
    if report.global_partition is not None:
        (root / "partition.json").write_bytes(report.global_partition.encode())
    summary = {
        "config": cfg.to_dict(),
        "files": [{"source_file": p, "output": names[p],
                   "status": "ok" if p in report.outputs else "error",
                   "error": report.errors.get(p)} for p in paths],
        "n_ok": len(report.outputs),
        "n_errors": len(report.errors),
    }
    (root / "report.json").write_bytes(dumps(summary).encode())
    report.output_dir = root
