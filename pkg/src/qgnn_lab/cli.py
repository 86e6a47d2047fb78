"""``qgnn-lab <experiment> --config FILE [--seed N] [--out DIR] [--threads K]``."""
from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import logging
import os
import platform
import sys
import time

import numpy as np

from ._util import atomic_write_text, rng_for
from .config import (EXPERIMENTS, ConfigError, RunConfig, config_dict, emit_config, load_config,
                     parse_config)
from .experiments import (run_dynamics_learning, run_ghz_preparation, run_graph_isomorphism,
                          run_spectral_clustering)
from .experiments.common import ExperimentResult, jsonable
from .hamiltonians import IsingParams

log = logging.getLogger("qgnn_lab")

_GRAPH = 0  # stream id for random graph specs


def execute(rc: RunConfig) -> ExperimentResult:
    s = rc.settings
    if rc.experiment == "isomorphism":
        return run_graph_isomorphism(s, rc.seed, rc.threads)
    g = s.graph.build(rng_for(rc.seed, _GRAPH))
    if rc.experiment == "dynamics":
        hidden = IsingParams.uniform(g, s.hidden_j, s.hidden_q)
        return run_dynamics_learning(g, hidden, s, rc.seed, rc.threads)
    if rc.experiment == "ghz":
        return run_ghz_preparation(g, s.depth, s, rc.seed, rc.threads)
    if rc.experiment == "cluster":
        return run_spectral_clustering(g, s, rc.seed, rc.threads)
    raise ConfigError(f"unsupported experiment {rc.experiment!r}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_outputs(rc: RunConfig, result: ExperimentResult, elapsed: float) -> str:
    """Write result.json plus CSVs into ``rc.out``; returns the result path."""
    os.makedirs(rc.out, exist_ok=True)
    files = []
    if result.trace is not None:
        buf = io.StringIO()
        result.trace.write_csv(buf)
        atomic_write_text(os.path.join(rc.out, "trace.csv"), buf.getvalue())
        files.append("trace.csv")
    for name, (header, rows) in result.tables.items():
        atomic_write_text(os.path.join(rc.out, name), _csv(header, rows))
        files.append(name)
    record = {
        "experiment": result.experiment,
        "seed": rc.seed,
        "config": config_dict(rc),
        "metrics": result.metrics,
        "details": result.details,
        "files": files,
        # everything run-specific lives here so determinism checks can drop it
        "meta": {
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "host": platform.node(),
            "python": platform.python_version(),
            "numpy": np.__version__,
            "elapsed_s": elapsed,
        },
    }
    path = os.path.join(rc.out, "result.json")
    atomic_write_text(path, json.dumps(jsonable(record), indent=2, sort_keys=True) + "\n")
    return path


def summary_line(result: ExperimentResult, path: str) -> str:
    keys = {
        "dynamics": ("final_infidelity", "max_param_error"),
        "ghz": ("final_loss", "fidelity"),
        "cluster": ("final_loss",),
        "isomorphism": ("train_accuracy", "val_accuracy", "test_accuracy"),
    }[result.experiment]
    parts = [f"{k}={result.metrics[k]:.6g}" for k in keys]
    return f"{result.experiment}: {' '.join(parts)} -> {path}"


def run(rc: RunConfig) -> int:
    log.info("running %s (seed %d) into %s", rc.experiment, rc.seed, rc.out)
    t0 = time.perf_counter()
    try:
        result = execute(rc)
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"qgnn-lab: {rc.experiment} failed: {exc}", file=sys.stderr)
        return 1
    path = write_outputs(rc, result, time.perf_counter() - t0)
    print(summary_line(result, path))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgnn-lab", description=__doc__.strip("`"))
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", help="YAML run configuration (defaults fill missing keys)")
    p.add_argument("--seed", type=int, help="master seed (overrides the file)")
    p.add_argument("--out", help="output directory (overrides the file)")
    p.add_argument("--threads", type=int, help="worker threads, 0 = all cores")
    p.add_argument("--print-config", action="store_true",
                   help="print the effective configuration and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    overrides = dict(experiment=args.experiment, seed=args.seed, out=args.out,
                     threads=args.threads)
    try:
        rc = load_config(args.config, **overrides) if args.config else parse_config("", **overrides)
    except OSError as exc:
        parser.print_usage(sys.stderr)
        print(f"qgnn-lab: cannot read config: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"qgnn-lab: config error: {exc}", file=sys.stderr)
        return 2
    if args.print_config:
        sys.stdout.write(emit_config(rc))
        return 0
    return run(rc)


if __name__ == "__main__":
    sys.exit(main())
