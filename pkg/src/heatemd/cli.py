"""Command-line front end.

Exit status: 0 ok, 1 usage error, 2 unreadable/invalid input file, 3 numeric
domain error. Failures print one JSON line ``{"error": ..., "message": ...}``
on stderr. Every successful run emits a JSON manifest (resolved config,
versions, timings) to stderr or to ``--manifest``.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .classical_emd import SiftConfig, decompose_classical
from .errors import DomainError, EstimationError, HeatEMDError, InsufficientExtremaError, SignalFormatError
from .experiments import (
    TARGET_TONE_A,
    ModeMixConfig,
    mode_mixing_experiment,
    noise_robustness,
    pm_sweep,
)
from .heat_solver import BoundaryCondition
from .hilbert_spectrum import hh_spectrum
from .io import (
    atomic_write_text,
    columns_csv_text,
    decomposition_csv_text,
    dump_json,
    fmt,
    read_columns_csv,
    read_signal_csv,
    signal_csv_text,
    signal_from_rows,
)
from .classical_emd import Decomposition
from .pde_emd import PdeParams, decompose_pde, mean_curve
from .pde_params import (
    a_default,
    a_from_autocorrelation,
    a_from_zero_crossings,
    cutoff_frequency,
    cutoff_frequency_closed_form,
    cutoff_grid,
    solve_T,
)
from .signal_core import CosineComponent, Signal, add_white_noise, synth_cosine_sum, synth_mode_mixing

EXIT_USAGE, EXIT_INPUT, EXIT_DOMAIN = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _tone(text: str) -> CosineComponent:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError("tone must be AMPLITUDE:FREQ[:PHASE]")
    try:
        return CosineComponent(*(float(p) for p in parts))
    except (ValueError, DomainError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (recorded in the manifest)")
    p.add_argument("--manifest", type=Path, help="write the run manifest here instead of stderr")


def _add_pde_flags(p: argparse.ArgumentParser, T_default: float = 10.0) -> None:
    p.add_argument("--a", type=float, help="diffusivity in s^2 (default: zero-crossing estimate)")
    p.add_argument("--T", type=float, default=T_default, help="pseudo-time of each evolution")
    p.add_argument("--N", type=int, default=100, help="sifting passes per IMF")
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--bc", choices=["periodic", "fixed", "reflective"], default="periodic")
    p.add_argument("--time-steps", type=int, default=1000, help="Crank-Nicolson steps (non-periodic bc)")
    p.add_argument("--early-exit", action="store_true", help="stop sifting once the IMF test passes")


def _add_classical_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sd-threshold", type=float, default=0.2)
    p.add_argument("--max-sift", type=int, default=100)
    p.add_argument("--imf-mean-tol", type=float, default=0.05)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heatemd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"heatemd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="write a synthetic signal CSV")
    p.add_argument("--mode-mix", action="store_true", help="concatenated two-tone signal")
    p.add_argument("--f1", type=float, default=10.0)
    p.add_argument("--f2", type=float, default=20.0)
    p.add_argument("--switch", type=float, default=0.5, help="switch time in seconds")
    p.add_argument("--tone", type=_tone, action="append", default=[], help="AMPLITUDE:FREQ[:PHASE], repeatable")
    p.add_argument("--offset", type=float, default=0.0)
    p.add_argument("--fs", type=float, default=1000.0)
    p.add_argument("--dur", type=float, default=1.0)
    p.add_argument("--noise", type=float, default=0.0, help="white-noise standard deviation")
    p.add_argument("--output", "-o", type=Path)
    _add_common(p)

    p = sub.add_parser("decompose", help="decompose a signal CSV into IMFs")
    p.add_argument("--input", "-i", type=Path, required=True)
    p.add_argument("--output", "-o", type=Path)
    p.add_argument("--method", choices=["classical", "forward-pde"], default="forward-pde")
    p.add_argument("--max-imfs", type=int, default=10)
    _add_pde_flags(p)
    _add_classical_flags(p)
    _add_common(p)

    p = sub.add_parser("mean-curve", help="heat-evolve a signal CSV")
    p.add_argument("--input", "-i", type=Path, required=True)
    p.add_argument("--output", "-o", type=Path)
    _add_pde_flags(p)
    _add_common(p)

    p = sub.add_parser("params", help="diffusivity and cutoff solvers")
    p.add_argument("--fs", type=float, help="print the safe default a = 1/(4 pi^2 fs^2)")
    p.add_argument("--estimate", choices=["zcr", "acf"], help="estimate a from --input")
    p.add_argument("--input", "-i", type=Path)
    p.add_argument("--cutoff", action="store_true", help="solve for the cutoff ratio f0")
    p.add_argument("--solve-T", action="store_true", help="solve (1-e^-T)^N = 1-delta for T")
    p.add_argument("--closed-form", action="store_true", help="closed-form cutoff with amplitude ratio --alpha")
    p.add_argument("--grid", action="store_true", help="f0 over --N-values x --T-values (CSV)")
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--N-values", type=_ints, default=[1, 10, 50, 100, 200])
    p.add_argument("--T-values", type=_floats, default=[1, 2, 5, 10, 20])
    p.add_argument("--json", action="store_true", help="print results as JSON")
    _add_common(p)

    p = sub.add_parser("spectrum", help="Hilbert-Huang spectrum grid")
    p.add_argument("--input", "-i", type=Path, required=True, help="decomposition CSV, or a t,value signal CSV")
    p.add_argument("--output", "-o", type=Path)
    p.add_argument("--method", choices=["classical", "forward-pde"], default="forward-pde",
                   help="used only when --input is a plain signal")
    p.add_argument("--time-bins", type=int, default=100)
    p.add_argument("--freq-bins", type=int, default=100)
    p.add_argument("--freq-max", type=float, help="default: Nyquist")
    p.add_argument("--max-imfs", type=int, default=10)
    _add_pde_flags(p)
    _add_classical_flags(p)
    _add_common(p)

    p = sub.add_parser("sweep", help="PM over an (alpha, f) grid")
    p.add_argument("--method", choices=["classical", "forward-pde"], default="forward-pde")
    p.add_argument("--alpha-values", type=_floats, help="default: 9 log-spaced values in [0.01, 100]")
    p.add_argument("--f-values", type=_floats, help="default: 19 values 0.05..0.95")
    p.add_argument("--fs", type=float, default=100.0)
    p.add_argument("--dur", type=float, default=10.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output", "-o", type=Path)
    _add_pde_flags(p)
    _add_classical_flags(p)
    _add_common(p)

    p = sub.add_parser("modemix", help="mode-mixing comparison report (JSON)")
    p.add_argument("--f1", type=float, default=10.0)
    p.add_argument("--f2", type=float, default=20.0)
    p.add_argument("--switch", type=float, default=0.5)
    p.add_argument("--fs", type=float, default=1000.0)
    p.add_argument("--dur", type=float, default=1.0)
    p.add_argument("--max-imfs", type=int, default=10)
    p.add_argument("--output", "-o", type=Path)
    _add_pde_flags(p)
    _add_classical_flags(p)
    _add_common(p)

    p = sub.add_parser("noise", help="PM versus noise level, per method (CSV)")
    p.add_argument("--sigmas", type=_floats, default=[0.0, 0.05, 0.1, 0.2])
    p.add_argument("--n-seeds", type=int, default=10, help="seeds used: --seed .. --seed+n-1")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--f", type=float, default=0.4)
    p.add_argument("--fs", type=float, default=100.0)
    p.add_argument("--dur", type=float, default=10.0)
    p.add_argument("--output", "-o", type=Path)
    _add_pde_flags(p)
    _add_classical_flags(p)
    _add_common(p)
    return parser


def _pde_params(args, a=None) -> PdeParams:
    return PdeParams(
        a=args.a if a is None else a,
        T=args.T,
        N=args.N,
        delta=args.delta,
        bc=BoundaryCondition.parse(args.bc),
        time_steps=args.time_steps,
        imf_early_exit=args.early_exit,
    )


def _sift_config(args) -> SiftConfig:
    return SiftConfig(args.sd_threshold, args.max_sift, args.imf_mean_tol)


def _params_dict(obj) -> dict:
    if isinstance(obj, PdeParams):
        return {"a": obj.a, "T": obj.T, "N": obj.N, "delta": obj.delta, "bc": obj.bc.value,
                "time_steps": obj.time_steps, "imf_early_exit": obj.imf_early_exit}
    return {"sd_threshold": obj.sd_threshold, "max_sift_iterations": obj.max_sift_iterations,
            "imf_mean_tolerance": obj.imf_mean_tolerance}


def _run_decomposition(args, signal: Signal) -> tuple[Decomposition, dict]:
    if args.method == "classical":
        cfg = _sift_config(args)
        return decompose_classical(signal, cfg, args.max_imfs), _params_dict(cfg)
    params = _pde_params(args)
    return decompose_pde(signal, params, args.max_imfs), _params_dict(params)


def _decomposition_sidecar(dec: Decomposition, config: dict) -> dict:
    return {
        "method": dec.method,
        "config": config,
        "n_imfs": len(dec.imfs),
        "iterations_per_imf": list(dec.iterations_per_imf),
        "stage_info": list(dec.stage_info),
        "sample_rate": dec.residual.sample_rate,
    }


def _emit(outputs: dict, path: Path | None, text: str, sidecar: dict | None = None) -> None:
    """Write ``text`` to ``path`` (atomically) or stdout, plus an optional JSON sidecar."""
    if path is None:
        sys.stdout.write(text)
        if sidecar is not None:
            sys.stdout.write(dump_json(sidecar))
        return
    atomic_write_text(path, text)
    outputs["files"].append(str(path))
    if sidecar is not None:
        side = path.with_name(path.name + ".json")
        atomic_write_text(side, dump_json(sidecar))
        outputs["files"].append(str(side))


def _read_decomposition(path: Path) -> Decomposition:
    try:
        header, data = read_columns_csv(path)
    except (OSError, ValueError, IndexError) as exc:
        raise SignalFormatError(f"cannot parse {path}: {exc}") from exc
    if len(header) < 3 or header[0] != "t" or header[-1] != "residual":
        raise SignalFormatError("expected columns t,imf1,...,imfK,residual")
    base = signal_from_rows(data[:, 0], data[:, -1])
    imfs = tuple(base.with_samples(data[:, k]) for k in range(1, data.shape[1] - 1))
    return Decomposition(imfs, base, "file", tuple(0 for _ in imfs))


def cmd_synth(args, out):
    if args.mode_mix:
        sig = synth_mode_mixing(args.f1, args.f2, args.switch, args.fs, args.dur)
    else:
        sig = synth_cosine_sum(args.tone, args.offset, args.fs, args.dur)
    if args.noise:
        sig = add_white_noise(sig, args.noise, args.seed)
    out["result"] = {"samples": len(sig), "sample_rate": sig.sample_rate}
    _emit(out, args.output, signal_csv_text(sig))


def cmd_decompose(args, out):
    sig = read_signal_csv(args.input)
    dec, cfg = _run_decomposition(args, sig)
    sidecar = _decomposition_sidecar(dec, cfg)
    out["result"] = sidecar
    _emit(out, args.output, decomposition_csv_text(dec), sidecar if args.output else None)


def cmd_mean_curve(args, out):
    sig = read_signal_csv(args.input)
    a = args.a if args.a is not None else a_from_zero_crossings(sig)
    params = _pde_params(args, a=a)
    curve = sig.with_samples(mean_curve(sig, params))
    out["result"] = {"a": a, "a_source": "flag" if args.a is not None else "zero_crossings"}
    _emit(out, args.output, signal_csv_text(curve))


def cmd_params(args, out):
    res: dict = {}
    if args.fs is not None:
        res["a_default"] = a_default(args.fs)
    if args.estimate:
        if args.input is None:
            raise UsageError("--estimate needs --input")
        sig = read_signal_csv(args.input)
        fn = a_from_zero_crossings if args.estimate == "zcr" else a_from_autocorrelation
        res["a_estimate"] = fn(sig)
        res["estimator"] = args.estimate
    if args.cutoff:
        res["f0"] = cutoff_frequency(args.N, args.T, args.delta)
    if args.solve_T:
        res["T_solution"] = solve_T(args.N, args.delta)
    if args.closed_form:
        res["f0_closed_form"] = cutoff_frequency_closed_form(args.N, math.exp(-args.T), args.delta, args.alpha)
    if args.grid:
        grid = cutoff_grid(args.N_values, args.T_values, args.delta)
        rows = ["N\\T," + ",".join(fmt(t) for t in args.T_values)]
        rows += [f"{n}," + ",".join(fmt(v) for v in row) for n, row in zip(args.N_values, grid)]
        res["grid_csv"] = "\n".join(rows) + "\n"
    if not res:
        raise UsageError("params: give at least one of --fs, --estimate, --cutoff, --solve-T, --closed-form, --grid")
    out["result"] = {k: v for k, v in res.items() if k != "grid_csv"}
    if args.json:
        sys.stdout.write(dump_json(res))
        return
    for key, value in res.items():
        if key == "grid_csv":
            sys.stdout.write(value)
        elif isinstance(value, float):
            sys.stdout.write(f"{key} {fmt(value)}\n")
        else:
            sys.stdout.write(f"{key} {value}\n")


def cmd_spectrum(args, out):
    with open(args.input, encoding="utf-8") as fh:
        first = fh.readline().strip()
    if first.replace(" ", "") == "t,value":
        dec, _ = _run_decomposition(args, read_signal_csv(args.input))
    else:
        dec = _read_decomposition(args.input)
    hs = hh_spectrum(dec, args.time_bins, args.freq_bins, args.freq_max)
    header = ["t/f"] + [fmt(f) for f in hs.freq_bins]
    lines = [",".join(header)]
    for t, row in zip(hs.time_bins, hs.amplitude):
        lines.append(",".join([fmt(t)] + [fmt(v) for v in row]))
    sidecar = hs.summary()
    sidecar["time_edges"] = [float(v) for v in hs.time_edges]
    sidecar["freq_edges"] = [float(v) for v in hs.freq_edges]
    out["result"] = hs.summary()
    _emit(out, args.output, "\n".join(lines) + "\n", sidecar if args.output else None)


def cmd_sweep(args, out):
    alphas = args.alpha_values or list(np.logspace(-2, 2, 9))
    fvals = args.f_values or list(np.round(np.linspace(0.05, 0.95, 19), 10))
    method = args.method.replace("-", "_")
    params = _pde_params(args) if method == "forward_pde" else _sift_config(args)
    grid = pm_sweep(method, alphas, fvals, params, args.fs, args.dur, args.workers)
    lines = ["alpha\\f," + ",".join(fmt(f) for f in grid.f_values)]
    for a, row in zip(grid.alpha_values, grid.pm):
        lines.append(",".join([fmt(a)] + [fmt(v) for v in row]))
    meta = {
        "method": method,
        "config": _params_dict(params),
        "alpha_values": [float(a) for a in grid.alpha_values],
        "f_values": [float(f) for f in grid.f_values],
        "failed_cells": int(grid.failed.sum()),
        "sample_rate": args.fs,
        "duration": args.dur,
    }
    out["result"] = meta
    _emit(out, args.output, "\n".join(lines) + "\n", meta if args.output else None)


def cmd_modemix(args, out):
    cfg = ModeMixConfig(args.f1, args.f2, args.switch, args.fs, args.dur)
    report = mode_mixing_experiment(cfg, _sift_config(args), _pde_params(args), args.max_imfs)
    data = report.to_dict()
    out["result"] = {"separated": data["separated"]}
    _emit(out, args.output, dump_json(data))


def cmd_noise(args, out):
    seeds = list(range(args.seed, args.seed + args.n_seeds))
    pde = _pde_params(args, a=args.a if args.a is not None else TARGET_TONE_A)
    table = noise_robustness(
        sigma_values=args.sigmas, seeds=seeds, alpha=args.alpha, f=args.f,
        sample_rate=args.fs, duration=args.dur,
        params={"classical": _sift_config(args), "forward_pde": pde},
    )
    methods = list(table.pm)
    header = ["sigma"] + [f"{m}_mean" for m in methods]
    header += [f"{m}_seed{s}" for m in methods for s in seeds]
    cols = [table.sigma_values] + [table.mean_pm(m) for m in methods]
    cols += [table.pm[m][:, j] for m in methods for j in range(len(seeds))]
    out["result"] = {"seeds": seeds, "forward_pde_a": pde.a}
    _emit(out, args.output, columns_csv_text(header, cols))


COMMANDS = {
    "synth": cmd_synth,
    "decompose": cmd_decompose,
    "mean-curve": cmd_mean_curve,
    "params": cmd_params,
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "modemix": cmd_modemix,
    "noise": cmd_noise,
}


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "exit": code, "message": message}) + "\n")
    return code


def _jsonable(value):
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, CosineComponent):
        return [value.amplitude, value.frequency, value.phase]
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    return value


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    out = {"files": []}
    started = time.perf_counter()
    try:
        COMMANDS[args.command](args, out)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc))
    except (SignalFormatError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
        return _fail(EXIT_INPUT, "input", str(exc))
    except (DomainError, EstimationError, InsufficientExtremaError, HeatEMDError) as exc:
        return _fail(EXIT_DOMAIN, "domain", str(exc))
    manifest = {
        "command": args.command,
        "config": {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in ("manifest",)},
        "outputs": out["files"],
        "result": out.get("result"),
        "versions": {
            "heatemd": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "timings": {"elapsed_s": time.perf_counter() - started},
    }
    text = json.dumps(manifest, sort_keys=True, default=str)
    if args.manifest:
        atomic_write_text(args.manifest, text + "\n")
    else:
        sys.stderr.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
