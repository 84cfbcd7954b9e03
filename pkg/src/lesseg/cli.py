"""Command-line front end: ``segment``, ``distmat``, ``synth``, ``bench``."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from .events import annotate_signal, write_annotation_csv
from .graph import DegenerateSignalError
from .harness import BENCH_KINDS, bench_scaling, class_separation, distance_matrix
from .pipeline import METRICS, RunConfig, less
from .scattering import NORMALIZE_MODES, ScatterError
from .signal_io import (
    SignalError,
    load_signal,
    load_synth_spec,
    synth_from_spec,
    write_csv,
    write_wav,
)

log = logging.getLogger("lesseg")

# errors that become "exit 1 with a diagnostic" rather than a traceback
_USER_ERRORS = (OSError, SignalError, ScatterError, DegenerateSignalError, ValueError, np.linalg.LinAlgError)

_DEFAULT_SIZES = {
    "scatter-vs-t": [2**e for e in range(12, 17)],
    "scatter-vs-D": [1, 2, 4, 8],
    "spectral-vs-n": [100, 200, 400, 800],
}

_CHOICES = {"normalize_mode": NORMALIZE_MODES, "metric": METRICS}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON run configuration; flags override its values")
    for f in dataclasses.fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        kind = {"int": int, "float": float, "str": str}[str(f.type)]
        # SUPPRESS keeps unset flags out of the namespace so file values survive
        p.add_argument(flag, dest=f.name, type=kind, choices=_CHOICES.get(f.name), default=argparse.SUPPRESS)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base = RunConfig.from_json(args.config).to_dict() if getattr(args, "config", None) else {}
    names = {f.name for f in dataclasses.fields(RunConfig)}
    base.update({k: v for k, v in vars(args).items() if k in names})
    return RunConfig.from_dict(base)


def _summary(tokens) -> str:
    shown = " ".join(map(str, tokens[:40]))
    return shown + (" ..." if len(tokens) > 40 else "")


def cmd_segment(args) -> int:
    cfg = config_from_args(args)
    ts = load_signal(args.input, cfg.sample_rate_hz)
    result = less(ts, cfg)
    events = result.events
    out = Path(args.output)
    annotation_path = Path(args.annotation) if args.annotation else out.with_suffix(".annotation.csv")
    out.write_text(events.to_json() + "\n", encoding="utf-8")
    write_annotation_csv(annotate_signal(events, ts.length), annotation_path)
    print(f"l={len(events)} distinct={len(set(events.tokens))} frames={events.n_frames}")
    print(f"tokens: {_summary(events.tokens)}")
    return 0


def _read_collection(source: Path, sample_rate_hz: float):
    """Files of a directory (sorted), or a manifest CSV ``path[,label]``."""
    if source.is_dir():
        paths = sorted(p for p in source.iterdir() if p.suffix.lower() in (".wav", ".csv"))
        labels = None
    else:
        paths, labels = [], []
        with source.open(newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if not row or not row[0].strip() or row[0].strip().lower() == "path":
                    continue
                p = Path(row[0].strip())
                paths.append(p if p.is_absolute() else source.parent / p)
                labels.append(row[1].strip() if len(row) > 1 and row[1].strip() else None)
        if labels and any(lab is None for lab in labels):
            raise ValueError(f"{source}: manifest rows must either all carry labels or none")
        labels = labels if labels and labels[0] is not None else None
    if len(paths) < 2:
        raise ValueError(f"{source}: need at least 2 input files, found {len(paths)}")
    return [load_signal(p, sample_rate_hz) for p in paths], paths, labels


def cmd_distmat(args) -> int:
    cfg = config_from_args(args)
    metric = cfg.metric
    collection, paths, labels = _read_collection(Path(args.input), cfg.sample_rate_hz)
    names = labels if labels is not None else [p.stem for p in paths]
    dm = distance_matrix(collection, metric, cfg, labels=names)
    dm.to_csv(args.output)
    if args.heatmap:
        dm.to_pgm(args.heatmap)
    off = dm.values[np.triu_indices(len(names), k=1)]
    print(f"metric={metric} n={len(names)} mean={off.mean():.6g} min={off.min():.6g} max={off.max():.6g}")
    if labels is not None:
        sep = class_separation(dm)
        ratio = "inf" if sep.infinite else f"{sep.ratio:.6g}"
        print(f"within_mean={sep.within_mean:.6g} between_mean={sep.between_mean:.6g} ratio={ratio}")
    return 0


def cmd_synth(args) -> int:
    ts = synth_from_spec(load_synth_spec(args.spec))
    out = Path(args.output)
    suffix = out.suffix.lower()
    if suffix == ".wav":
        write_wav(ts, out)
    elif suffix == ".csv":
        write_csv(ts, out)
    else:
        raise SignalError(f"{out}: output must end in .wav or .csv")
    print(f"wrote {out} t={ts.length} D={ts.dim} rate={ts.sample_rate_hz:g}")
    return 0


def cmd_bench(args) -> int:
    if args.kind not in BENCH_KINDS:
        raise ValueError(f"unknown benchmark {args.kind!r}; valid kinds: {', '.join(BENCH_KINDS)}")
    sizes = args.sizes or _DEFAULT_SIZES[args.kind]
    report = bench_scaling(args.kind, sizes, repeats=args.repeats)
    report.to_csv(args.output)
    for size, sec in zip(report.sizes, report.seconds):
        print(f"{size:>8d}  {sec:.4g} s")
    print(f"log-log slope {report.slope:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lesseg", description="Wavelet-scattering event segmentation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment one signal into an event sequence")
    p.add_argument("input", type=Path)
    p.add_argument("-o", "--output", required=True, help="event-sequence JSON path")
    p.add_argument("--annotation", help="per-sample token CSV (default: <output>.annotation.csv)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("distmat", help="pairwise distance matrix over a collection")
    p.add_argument("input", type=Path, help="directory of signals or manifest CSV (path[,label])")
    p.add_argument("-o", "--output", required=True, help="distance matrix CSV path")
    p.add_argument("--heatmap", help="optional PGM heatmap path")
    _add_config_flags(p)
    p.set_defaults(func=cmd_distmat)

    p = sub.add_parser("synth", help="generate a synthetic signal from a JSON spec")
    p.add_argument("spec", type=Path)
    p.add_argument("-o", "--output", required=True, help=".wav or .csv path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="runtime scaling benchmark")
    p.add_argument("kind", help=f"one of {', '.join(BENCH_KINDS)}")
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("-o", "--output", required=True, help="CSV report path")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
