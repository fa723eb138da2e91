"""Command-line front end: list, generate, validate, inspect.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import difflib
import json
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import container, pipeline, validation
from .configs import DatasetConfig, NameParseError, config_for, config_from_dict, enumerate_configs
from .distortion import AnalogFilterSpec

log = logging.getLogger("qdsim")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    try:
        return max(1, int(os.environ.get("QDS_THREADS", "1")))
    except ValueError:
        raise UsageError("QDS_THREADS must be an integer") from None


def resolve_config(args) -> DatasetConfig:
    if getattr(args, "config", None):
        try:
            cfg = config_from_dict(json.loads(Path(args.config).read_text()))
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except (KeyError, ValueError) as exc:
            raise UsageError(f"invalid config file {args.config}: {exc}") from None
    elif getattr(args, "name", None):
        try:
            cfg = config_for(args.name)
        except NameParseError as exc:
            near = difflib.get_close_matches(args.name, [c.canonical_name for c in enumerate_configs()], n=5)
            hint = f"; did you mean: {', '.join(near)}" if near else ""
            raise UsageError(f"{exc}{hint}") from None
        if cfg.custom:
            near = difflib.get_close_matches(args.name, [c.canonical_name for c in enumerate_configs()], n=5)
            raise UsageError(f"{args.name!r} is not one of the 52 registered datasets"
                             + (f"; did you mean: {', '.join(near)}" if near else ""))
    else:
        raise UsageError("one of --name or --config is required")
    return apply_overrides(cfg, args)


def apply_overrides(cfg: DatasetConfig, args) -> DatasetConfig:
    kw = {}
    for flag, key in (("k", "K"), ("num_ex", "num_examples"), ("seed", "master_seed")):
        v = getattr(args, flag, None)
        if v is not None:
            if v < (0 if key == "master_seed" else 1):
                raise UsageError(f"--{flag.replace('_', '-')} out of range: {v}")
            kw[key] = v
    if getattr(args, "m", None) is not None:
        kw["num_steps"] = args.m
    if getattr(args, "full", False):
        kw.update(keep_h1=True, keep_ui=True)
    try:
        cfg = cfg.with_overrides(**kw)
        if getattr(args, "no_distortion_override", False) and cfg.name.distorted:
            cfg = replace(cfg, name=replace(cfg.name, distorted=False), filter_spec=None)
        if cfg.filter_spec is not None:
            spec = cfg.filter_spec
            spec = AnalogFilterSpec(
                args.filter_order if getattr(args, "filter_order", None) is not None else spec.order,
                args.filter_ripple if getattr(args, "filter_ripple", None) is not None else spec.passband_ripple_db,
                args.filter_cutoff if getattr(args, "filter_cutoff", None) is not None else spec.cutoff_rad_per_s,
            )
            cfg = replace(cfg, filter_spec=spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def cmd_list(args) -> int:
    rows = []
    for c in enumerate_configs():
        rows.append((c.canonical_name, str(c.category.id), f"{c.category.nqubits}",
                     c.pulse_shape, ",".join(c.profiles), "yes" if c.name.distorted else "no"))
    head = ("name", "category", "qubits", "waveform", "noise", "distortion")
    widths = [max(len(r[i]) for r in rows + [head]) for i in range(len(head))]
    print("  ".join(h.ljust(w) for h, w in zip(head, widths)))
    for r in rows:
        print("  ".join(x.ljust(w) for x, w in zip(r, widths)))
    return EXIT_OK


def generate_dataset(cfg: DatasetConfig, out: Path, threads: int = 1, progress: bool = False) -> Path:
    target = Path(out) / cfg.canonical_name
    target.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    entries = []
    for i in range(cfg.num_examples):
        t1 = time.perf_counter()
        meta, arrays = pipeline.generate_example(cfg, i, threads=threads)
        fname = f"example_{i:05d}.qds"
        chk = container.write_example(target / fname, meta, arrays)
        elapsed = time.perf_counter() - t1
        entries.append({"file": fname, "checksum": f"{chk:016x}", "elapsed_time": elapsed})
        if progress:
            log.info("%s: example %d/%d written (%.2fs)", cfg.canonical_name, i + 1, cfg.num_examples, elapsed)
    manifest = {
        "name": cfg.canonical_name,
        "config": cfg.to_dict(),
        "examples": entries,
        "elapsed_time": time.perf_counter() - t0,
        "elapsed_time_units": "seconds (wall clock)",
        "threads": threads,
    }
    (target / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return target


def cmd_generate(args) -> int:
    cfg = resolve_config(args)
    target = generate_dataset(cfg, Path(args.out), _threads(args), progress=True)
    print(target)
    return EXIT_OK


def cmd_validate(args) -> int:
    mode = args.mode
    if mode == "files":
        if not args.dir:
            raise UsageError("--dir is required for files mode")
        if not Path(args.dir).is_dir():
            raise OSError(f"no such directory: {args.dir}")
        report = validation.run_files(Path(args.dir))
    elif mode == "psd":
        report = validation.run_psd(args.k or 2000, args.m or 1024, 1.0, args.seed or 0)
    else:
        cfg = resolve_config(args)
        if mode == "oracle":
            report = validation.run_oracle(cfg, args.num_ex or 2, args.substeps, threads=_threads(args))
        else:
            report = validation.run_distortion(cfg, args.num_ex or 5)
    text = report.to_json()
    if args.report:
        Path(args.report).write_text(text)
    print(text)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_inspect(args) -> int:
    meta, arrays = container.read_example(args.file)
    print(f"file: {args.file}")
    print(f"name: {meta.get('name')}  example: {meta.get('example_index')}")
    print("simulation_parameters:")
    for k, v in meta.get("simulation_parameters", {}).items():
        if isinstance(v, (dict, list)):
            v = v.get("labels", "...") if isinstance(v, dict) else f"[{len(v)} item(s)]"
        print(f"  {k}: {v}")
    print("arrays:")
    for name, a in arrays.items():
        print(f"  {name}: {a.dtype.name} {a.shape}")
    if "V_O" in arrays:
        v = arrays["V_O"]
        dev = np.linalg.norm(v - np.eye(v.shape[-1]), axis=(-2, -1))
        print(f"V_O deviation ||V_O - I||_F: max {dev.max():.3e}")
    if args.csv_expectations:
        with open(args.csv_expectations, "w", newline="") as fh:
            w = csv.writer(fh)
            states = meta["ordering"]["states"]
            obs = meta["ordering"]["observables"]
            w.writerow(["state", "observable", "E_O"])
            for i, val in enumerate(arrays["E_O"]):
                w.writerow([states[i // len(obs)], obs[i % len(obs)], repr(float(val))])
    if args.csv_waveforms:
        with open(args.csv_waveforms, "w", newline="") as fh:
            w = csv.writer(fh)
            n = arrays["pulses"].shape[1]
            w.writerow(["t"] + [f"pulse_{a}" for a in range(n)] + [f"distorted_{a}" for a in range(n)])
            for j, t in enumerate(arrays["time_range"]):
                w.writerow([repr(float(t))] + [repr(float(x)) for x in arrays["pulses"][j]]
                           + [repr(float(x)) for x in arrays["distorted_pulses"][j]])
    return EXIT_OK


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--name", help="canonical dataset name, e.g. G_1q_X_Z_N1")
    p.add_argument("--config", help="JSON config file (same schema as the metadata 'config' block)")
    p.add_argument("--num-ex", type=int, dest="num_ex")
    p.add_argument("--k", type=int, help="noise realisations per example")
    p.add_argument("--m", type=int, help="time steps (power of two)")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="worker threads (default: $QDS_THREADS or 1)")
    p.add_argument("--full", action="store_true", help="retain H1 and UI (large)")
    p.add_argument("--no-distortion-override", action="store_true", dest="no_distortion_override",
                   help="force distortion off")
    p.add_argument("--filter-order", type=int)
    p.add_argument("--filter-ripple", type=float, help="passband ripple in dB")
    p.add_argument("--filter-cutoff", type=float, help="cutoff in rad/s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdsim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list the 52 registered datasets").set_defaults(func=cmd_list)

    g = sub.add_parser("generate", help="generate a dataset directory")
    _add_run_flags(g)
    g.add_argument("--out", default="datasets")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("validate", help="run a validation check")
    _add_run_flags(v)
    v.add_argument("--mode", choices=["oracle", "psd", "distortion", "files"], default="oracle")
    v.add_argument("--dir", help="dataset directory (files mode)")
    v.add_argument("--substeps", type=int, default=64)
    v.add_argument("--report", help="write the JSON report here")
    v.set_defaults(func=cmd_validate)

    i = sub.add_parser("inspect", help="summarise one example file")
    i.add_argument("file")
    i.add_argument("--csv-expectations")
    i.add_argument("--csv-waveforms")
    i.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except container.ContainerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
