"""Command-line interface. Exit codes: 0 success, 1 data error, 2 usage."""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import partition, pfsa, pipeline, sigprep, synth
from .errors import ConfigError, SymbolicMarkovError

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_bytes(text.encode())
    else:
        sys.stdout.write(text)


def _add_out(p):
    p.add_argument("--out", help="write to this file instead of stdout")


def _add_order_flags(p):
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--i-max", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--d-max", type=int, default=pipeline.DEFAULT_D_MAX,
                   help="cap on the spectral depth")


def cmd_preprocess(a):
    sig = sigprep.read_signal(a.input)
    pre = sigprep.preprocess(sig, a.max_lag)
    if a.diagnostics:
        Path(a.diagnostics).write_bytes(pipeline.dumps(
            {"source_file": a.input, "label": a.label, **pre.diagnostics()}).encode())
    _emit(sigprep.format_signal(pre.signal), a.out)


def cmd_partition(a):
    import numpy as np

    sigs = [sigprep.read_signal(p).samples for p in a.inputs]
    spec = partition.fit(np.concatenate(sigs), a.alphabet_size, a.method)
    _emit(spec.to_json(), a.out)


def cmd_symbolize(a):
    spec = partition.PartitionSpec.from_json(Path(a.partition).read_text())
    seq = partition.symbolize(spec, sigprep.read_signal(a.input))
    _emit(partition.format_symbols(seq), a.out)


def _order_params(a):
    from .order_est import OrderParams

    return OrderParams(a.gamma, a.beta, a.k_max, a.i_max)


def cmd_order(a):
    seq = partition.read_symbols(a.input)
    params = _order_params(a)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report, est = pipeline.order_report(seq, params, a.epsilon, a.d_max)
    if a.curve_out:
        Path(a.curve_out).write_bytes(est.curve_csv().encode())
    _emit(pipeline.dumps(report), a.out)


def cmd_fit(a):
    seq = partition.read_symbols(a.input)
    if a.depth is not None:
        depth = a.depth
    elif a.order_json:
        report = json.loads(Path(a.order_json).read_text())
        depth = pipeline.choose_depth(report, a.depth_source, None, a.d_max)
    else:
        raise ConfigError("fit needs --depth or --order-json")
    _emit(pfsa.build_model(seq, depth).to_json(), a.out)


def cmd_metrics(a):
    sources = a.source or []
    labels = a.label or []
    if len(sources) > len(a.models) or len(labels) > len(a.models):
        raise ConfigError("more --source/--label values than models")
    rows = []
    for i, path in enumerate(a.models):
        model = pfsa.DMarkovModel.from_json(Path(path).read_text())
        src = sources[i] if i < len(sources) else path
        lab = labels[i] if i < len(labels) else ""
        rows.append(pipeline.metrics_row(model, src, lab))
    _emit(pipeline.render_csv(pipeline.METRICS_HEADER, rows), a.out)


def cmd_simulate(a):
    if a.kind == "chain":
        if not a.spec:
            raise ConfigError("simulate chain needs --spec")
        spec = synth.ChainSpec.from_json(Path(a.spec).read_text())
        seq = synth.simulate_chain(spec, a.n, seed=a.seed)
        _emit(partition.format_symbols(seq), a.out)
        return
    gen = synth.surrogate_stable if a.kind == "stable" else synth.surrogate_unstable
    sig = gen(a.n, seed=0 if a.seed is None else a.seed)
    _emit(sigprep.format_signal(sig), a.out)


def _pipeline_config(a) -> pipeline.PipelineConfig:
    d = {}
    if a.config:
        d = json.loads(Path(a.config).read_text())
    overrides = {
        "inputs": a.inputs or None,
        "output_dir": a.out_dir,
        "jobs": a.jobs,
        "depth_source": a.depth_source,
        "depth_override": a.depth,
        "alphabet_size": a.alphabet_size,
        "partition_method": a.method,
    }
    for k, v in overrides.items():
        if v is not None:
            d[k] = v
    if a.global_partition:
        d["global_partition"] = True
    if a.fail_fast:
        d["fail_fast"] = True
    if a.label:
        labels = dict(d.get("labels", {}))
        for item in a.label:
            pat, sep, lab = item.partition("=")
            if not sep:
                raise ConfigError("--label expects PATTERN=LABEL")
            labels[pat] = lab
        d["labels"] = labels
    return pipeline.PipelineConfig.from_dict(d)


def cmd_pipeline(a):
    cfg = _pipeline_config(a)
    report = pipeline.run_pipeline(cfg)
    for path, err in sorted(report.errors.items()):
        print(f"error: {path}: {err}", file=sys.stderr)
    if not report.outputs and not report.errors:
        print("error: no inputs", file=sys.stderr)
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symbolic-markov",
                                 description="Symbolic Markov modeling of time series")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="normalize and decorrelate a signal")
    p.add_argument("input")
    p.add_argument("--max-lag", type=int, default=None)
    p.add_argument("--diagnostics", help="write lag diagnostics JSON here")
    p.add_argument("--label", default="")
    _add_out(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("partition", help="fit a partition to one or more signals")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--alphabet-size", type=int, default=3)
    p.add_argument("--method", choices=[m.value for m in partition.Method],
                   default="maxentropy")
    _add_out(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("symbolize", help="map a signal to symbols")
    p.add_argument("input")
    p.add_argument("--partition", required=True)
    _add_out(p)
    p.set_defaults(func=cmd_symbolize)

    p = sub.add_parser("order", help="estimate the memory of a symbol file")
    p.add_argument("input")
    _add_order_flags(p)
    p.add_argument("--curve-out", help="write the delta-hat curve CSV here")
    _add_out(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("fit", help="fit a D-Markov machine")
    p.add_argument("input")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--order-json", help="order report to take the depth from")
    p.add_argument("--depth-source", choices=["spectral", "consistent"], default="spectral")
    p.add_argument("--d-max", type=int, default=pipeline.DEFAULT_D_MAX)
    _add_out(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("metrics", help="d_M and discrepancy per model as CSV")
    p.add_argument("models", nargs="+")
    p.add_argument("--source", action="append", help="source_file column, per model")
    p.add_argument("--label", action="append", help="label column, per model")
    _add_out(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="generate synthetic data")
    p.add_argument("kind", choices=["chain", "stable", "unstable"])
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--spec", help="ChainSpec JSON (for 'chain')")
    _add_out(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pipeline", help="run the full analysis over many files")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--config")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--depth-source", choices=list(pipeline.DEPTH_SOURCES), default=None)
    p.add_argument("--depth", type=int, default=None, help="manual depth override")
    p.add_argument("--alphabet-size", type=int, default=None)
    p.add_argument("--method", choices=[m.value for m in partition.Method], default=None)
    p.add_argument("--global-partition", action="store_true")
    p.add_argument("--fail-fast", action="store_true")
    p.add_argument("--label", action="append", metavar="PATTERN=LABEL")
    p.set_defaults(func=cmd_pipeline)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        rc = args.func(args)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SymbolicMarkovError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK if rc is None else rc


if __name__ == "__main__":
    sys.exit(main())
