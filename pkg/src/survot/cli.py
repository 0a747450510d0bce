"""Command-line front end.

Subcommands:

* test       - run one hypothesis test on a CSV file, print a JSON record
* sweep      - run a scenario/size/method grid from a config file and write
               rejection rates as CSV rows (resumable per cell)
* transform  - write the synthetic dataset and the per-event trace for a CSV
* simulate   - draw one scenario dataset and write it as CSV

Exit codes: 0 success, 1 input/validation problems, 2 unexpected errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys

from . import __version__
from .data import CensoredDataset, DataError, TwoSampleDataset, load_csv
from .permutation import DOM_DATA, DOM_TRANSFORM, substream
from .procedures import DEFAULT_ALPHA, DEFAULT_B, METHODS, run_method
from .scenarios import FAMILIES, PRESETS, ScenarioSpec, sample_scenario
from .statistics import ConvergenceError
from .transport import opt_transform


def derive_seed(master: int, *parts) -> int:
    """Stable 63-bit seed from the master seed and arbitrary labels."""
    text = "|".join([str(int(master))] + [str(p) for p in parts])
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="survot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"survot {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run one test on a CSV file")
    p_test.add_argument("csv", help="input CSV with columns x,z,delta")
    p_test.add_argument("--method", required=True, choices=METHODS)
    p_test.add_argument("--B", type=int, default=DEFAULT_B)
    p_test.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p_test.add_argument("--seed", type=int, default=0)
    p_test.add_argument("--out", help="append the JSON record to this JSON-lines file")

    p_sweep = sub.add_parser("sweep", help="run a scenario sweep from a config file")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", help="override the output path from the config")

    p_tr = sub.add_parser("transform", help="write the synthetic dataset for a CSV")
    p_tr.add_argument("csv")
    p_tr.add_argument("--seed", type=int, default=0)
    p_tr.add_argument("--out-data", required=True, help="synthetic dataset CSV (y,t)")
    p_tr.add_argument("--out-trace", required=True, help="per-event trace CSV")

    p_sim = sub.add_parser("simulate", help="draw one scenario dataset as CSV")
    p_sim.add_argument("--scenario", required=True, help="family tag, e.g. type1-5 or power-3")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--lam", type=float)
    p_sim.add_argument("--a", type=float)
    p_sim.add_argument("--b", type=float)
    p_sim.add_argument("--observed", type=int, choices=(75, 50, 25),
                       help="use the preset censoring parameters for this observed percentage")
    p_sim.add_argument("--out", required=True)
    return parser


def _cmd_test(args) -> int:
    dataset = load_csv(args.csv)
    report = run_method(args.method, dataset, B=args.B, alpha=args.alpha, seed=args.seed)
    line = report.to_json()
    print(line)
    if args.out:
        with open(args.out, "a") as fh:
            fh.write(line + "\n")
    return 0


class ConfigError(ValueError):
    pass


def _parse_scenario_token(token: str, lineno: int) -> ScenarioSpec | tuple:
    """family[:param=value...] -> (family, params dict)."""
    parts = token.split(":")
    family = parts[0].strip()
    if family not in FAMILIES:
        raise ConfigError(f"line {lineno}: unknown scenario {family!r}")
    params = {}
    for piece in parts[1:]:
        if "=" not in piece:
            raise ConfigError(f"line {lineno}: bad scenario parameter {piece!r}")
        key, _, value = piece.partition("=")
        key = key.strip()
        if key not in ("lam", "a", "b"):
            raise ConfigError(f"line {lineno}: unknown scenario parameter {key!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad number {value!r}") from None
    return family, params


def parse_config(path) -> dict:
    """Flat key=value config; '#' starts a comment; keys must not repeat."""
    known = {"scenarios", "n_grid", "replicates", "methods", "B", "alpha", "seed", "out"}
    raw: dict[str, tuple[str, int]] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"line {lineno}: expected key=value, got {stripped!r}")
            key, _, value = stripped.partition("=")
            key = key.strip()
            if key not in known:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            if key in raw:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            raw[key] = (value.strip(), lineno)

    def need(key):
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")
        return raw[key]

    scenarios = []
    value, lineno = need("scenarios")
    for token in value.split(","):
        token = token.strip()
        if token:
            scenarios.append(_parse_scenario_token(token, lineno))
    if not scenarios:
        raise ConfigError(f"line {lineno}: empty scenario list")

    value, lineno = need("n_grid")
    try:
        n_grid = [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"line {lineno}: bad n_grid {value!r}") from None
    if not n_grid:
        raise ConfigError(f"line {lineno}: empty n_grid")

    value, lineno = need("methods")
    methods = [m.strip() for m in value.split(",") if m.strip()]
    if not methods:
        raise ConfigError(f"line {lineno}: empty methods list")
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"line {lineno}: unknown method {m!r}")

    def intval(key, default):
        if key not in raw:
            return default
        value, lineno = raw[key]
        try:
            parsed = int(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad integer for {key}: {value!r}") from None
        if parsed < 1:
            raise ConfigError(f"line {lineno}: {key} must be positive")
        return parsed

    replicates = intval("replicates", 100)
    B = intval("B", DEFAULT_B)

    alpha = DEFAULT_ALPHA
    if "alpha" in raw:
        value, lineno = raw["alpha"]
        try:
            alpha = float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad alpha {value!r}") from None
        if not 0.0 < alpha < 1.0:
            raise ConfigError(f"line {lineno}: alpha must lie in (0, 1)")

    seed = intval("seed", 0) if "seed" in raw else 0
    out = raw.get("out", ("sweep_results.csv", 0))[0]
    return {
        "scenarios": scenarios,
        "n_grid": n_grid,
        "replicates": replicates,
        "methods": methods,
        "B": B,
        "alpha": alpha,
        "seed": seed,
        "out": out,
    }


SWEEP_HEADER = ("scenario", "n", "method", "rejection_rate", "replicates", "seed")


def _scenario_label(family: str, params: dict) -> str:
    if not params:
        return family
    inner = ":".join(f"{k}={params[k]:.10g}" for k in sorted(params))
    return f"{family}:{inner}"


def _completed_cells(path) -> set[tuple]:
    done = set()
    if not os.path.exists(path):
        return done
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            done.add((row["scenario"], int(row["n"]), row["method"]))
    return done


def run_sweep(config: dict, out_path: str | None = None) -> list[dict]:
    """Run every (scenario, n, method) cell; append one CSV row per cell.

    Cell seeds are derived from the master seed and the cell labels, so any
    execution order (or a resumed run) produces identical numbers.
    """
    out = out_path or config["out"]
    done = _completed_cells(out)
    new_file = not os.path.exists(out)
    results = []
    with open(out, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(SWEEP_HEADER)
            fh.flush()
        for family, params in config["scenarios"]:
            label = _scenario_label(family, params)
            for n in config["n_grid"]:
                spec = ScenarioSpec(family, n, **params)
                for method in config["methods"]:
                    if (label, n, method) in done:
                        continue
                    cell_seed = derive_seed(config["seed"], label, n, method)
                    rejections = 0
                    for rep in range(config["replicates"]):
                        rep_seed = derive_seed(config["seed"], label, n, method, rep)
                        data = sample_scenario(spec, substream(rep_seed, DOM_DATA))
                        report = run_method(
                            method, data, B=config["B"], alpha=config["alpha"], seed=rep_seed
                        )
                        rejections += int(report.rejected)
                    rate = rejections / config["replicates"]
                    row = {
                        "scenario": label,
                        "n": n,
                        "method": method,
                        "rejection_rate": rate,
                        "replicates": config["replicates"],
                        "seed": cell_seed,
                    }
                    writer.writerow([row[k] for k in SWEEP_HEADER])
                    fh.flush()
                    results.append(row)
    return results


def _cmd_sweep(args) -> int:
    config = parse_config(args.config)
    rows = run_sweep(config, args.out)
    for row in rows:
        print(
            f"{row['scenario']} n={row['n']} {row['method']}: "
            f"rate={row['rejection_rate']:.4f} ({row['replicates']} reps)"
        )
    return 0


def _cmd_transform(args) -> int:
    dataset = load_csv(args.csv)
    synthetic, trace = opt_transform(dataset, substream(args.seed, DOM_TRANSFORM))
    synthetic.save_csv(args.out_data)
    trace.save_csv(args.out_trace)
    print(f"wrote {synthetic.n} rows to {args.out_data}, {trace.n_events} events to {args.out_trace}")
    return 0


def _cmd_simulate(args) -> int:
    params = {}
    if args.observed is not None:
        params.update(PRESETS.get((args.scenario, args.observed), {}))
    for key in ("lam", "a", "b"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    try:
        spec = ScenarioSpec(args.scenario, args.n, **params)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    sample = sample_scenario(spec, substream(args.seed, DOM_DATA))
    if isinstance(sample, TwoSampleDataset):
        from .data import merge_two_sample

        sample = merge_two_sample(sample)
    assert isinstance(sample, CensoredDataset)
    sample.save_csv(args.out)
    print(f"wrote {sample.n} rows to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "test": _cmd_test,
        "sweep": _cmd_sweep,
        "transform": _cmd_transform,
        "simulate": _cmd_simulate,
    }
    try:
        return handlers[args.command](args)
    except (FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ConfigError, ConvergenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # unexpected, not an input problem
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
