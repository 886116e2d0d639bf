"""Batch command-line front end.

Subcommands: validate, extend, verify, counterexample, luzin, sample.
Exit codes: 0 success, 2 jet rejected by validation, 3 verification failed,
1 usage or I/O problems.  All outputs are byte-deterministic for a fixed
config and input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import counterexample as cx
from . import extension as ext_mod
from . import luzin as luzin_mod
from .jets import JetFormatError, Tolerances, load_jet, validate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REJECTED = 2
EXIT_VERIFY_FAILED = 3


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    tol: float | None = None
    samples: int = 64
    window: tuple[float, float] | None = None
    levels: int = 11
    eps: float = 0.1
    force: bool = False
    seed: int | None = None


def _tolerances(cfg: RunConfig) -> Tolerances:
    if cfg.tol is None:
        return Tolerances()
    return Tolerances(modulus=cfg.tol, horizontality=cfg.tol)


def _parse_window(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("window must be 'lo,hi'") from exc
    if not (lo < hi):
        raise argparse.ArgumentTypeError("window needs lo < hi")
    return (lo, hi)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hwhitney",
        description="Validate, extend and audit C1 horizontal curve jets in H^n.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="input JSON file")
        p.add_argument("--output", help="output path or prefix")
        p.add_argument("--tol", type=float, help="override validation tolerances")
        p.add_argument("--samples", type=int, default=64, help="samples per interval/segment")
        p.add_argument("--seed", type=int, help="seed for randomized sweeps")

    p = sub.add_parser("validate", help="check jet extendability, print the modulus report")
    add_common(p)

    p = sub.add_parser("extend", help="build the extension, write manifest + CSV")
    add_common(p)
    p.add_argument("--window", type=_parse_window, help="materialization window lo,hi")
    p.add_argument("--force", action="store_true", help="build even if validation rejects")

    p = sub.add_parser("verify", help="re-verify a stored extension manifest")
    add_common(p)

    p = sub.add_parser("counterexample", help="emit the blow-up rate table as CSV")
    p.add_argument("--levels", type=int, default=11, help="truncation depth")
    p.add_argument("--output", help="CSV path (default: stdout)")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("luzin", help="C1 approximation of a piecewise curve off small measure")
    add_common(p)
    p.add_argument("--eps", type=float, required=True, help="measure removal budget")
    p.add_argument("--cells", type=int, default=512, help="selection grid resolution")

    p = sub.add_parser("sample", help="evaluate a stored extension on a uniform grid")
    add_common(p)
    p.add_argument("--window", type=_parse_window, help="subrange of the stored window")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input=getattr(args, "input", None),
        output=getattr(args, "output", None),
        tol=getattr(args, "tol", None),
        samples=getattr(args, "samples", 64),
        window=getattr(args, "window", None),
        levels=getattr(args, "levels", 11),
        eps=getattr(args, "eps", 0.1),
        force=getattr(args, "force", False),
        seed=getattr(args, "seed", None),
    )


def _print_report(rep) -> None:
    print(f"samples per interval: {rep.samples_per_interval}")
    print(f"big M: {rep.big_m!r}")
    print(f"horizontality defect: {rep.horizontality!r}")
    print("scale, whitney, area, conclusive")
    for t, w, a, ok in zip(rep.scales, rep.whitney, rep.area, rep.conclusive):
        wtxt = "n/a" if math.isnan(w) else repr(float(w))
        atxt = "n/a" if math.isnan(a) else repr(float(a))
        print(f"{float(t)!r}, {wtxt}, {atxt}, {'yes' if ok else 'no'}")


def _cmd_validate(cfg: RunConfig) -> int:
    jet = load_jet(cfg.input)
    verdict = validate(jet, _tolerances(cfg), samples_per_interval=cfg.samples)
    _print_report(verdict.report)
    for note in verdict.notes:
        print(f"note: {note}")
    if verdict.extendable:
        print("verdict: extendable")
    else:
        print(f"verdict: rejected, failing condition(s): {', '.join(verdict.failing)}")
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            json.dump(verdict.to_dict(), fh, indent=2)
            fh.write("\n")
    return EXIT_OK if verdict.extendable else EXIT_REJECTED


def _output_pair(cfg: RunConfig, default_stem: str) -> tuple[Path, Path]:
    base = Path(cfg.output) if cfg.output else Path(default_stem)
    if base.suffix == ".json":
        base = base.with_suffix("")
    return base.with_suffix(".json"), base.with_suffix(".csv")


def _extension_grid(ext, samples: int) -> np.ndarray:
    lo, hi = ext.window
    grid = set(np.linspace(lo, hi, max(2, samples)))
    grid.update(p for p in ext.seam_points())
    return np.array(sorted(grid))


def _cmd_extend(cfg: RunConfig) -> int:
    jet = load_jet(cfg.input)
    tol = _tolerances(cfg)
    try:
        ext = ext_mod.extend(
            jet,
            window=cfg.window,
            force=cfg.force,
            tolerances=tol,
            samples_per_interval=cfg.samples,
        )
    except ext_mod.ExtensionRefused as exc:
        print(str(exc))
        return EXIT_REJECTED
    report = ext_mod.verify(ext)
    manifest_path, csv_path = _output_pair(cfg, "extension")
    ext_mod.save_manifest(ext, report, manifest_path)
    sampled = ext.sample(_extension_grid(ext, max(cfg.samples * 8, 256)))
    ext_mod.write_csv(sampled, csv_path)
    print(f"manifest: {manifest_path}")
    print(f"csv: {csv_path}")
    offender = report.worst_offender(tol)
    if offender is None:
        print("verification: all residuals within tolerance")
        return EXIT_OK
    print(f"verification FAILED: {offender}")
    return EXIT_VERIFY_FAILED


def _cmd_verify(cfg: RunConfig) -> int:
    ext = ext_mod.load_manifest(cfg.input)
    tol = _tolerances(cfg)
    report = ext_mod.verify(ext)
    for key, val in report.to_dict().items():
        print(f"{key}: {val!r}")
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    offender = report.worst_offender(tol)
    if offender is None:
        print("verification: all residuals within tolerance")
        return EXIT_OK
    print(f"verification FAILED: {offender}")
    return EXIT_VERIFY_FAILED


def _cmd_counterexample(cfg: RunConfig) -> int:
    rows = cx.ratio_table(cfg.levels)
    header = (
        "level,gapLength,areaRatio,areaRatioClosedForm,"
        "whitneyScale,whitneyMeasured,whitneyBound"
    )
    lines = [header]
    for row in rows:
        lines.append(
            ",".join(
                [
                    str(row["level"]),
                    repr(row["gapLength"]),
                    repr(row["areaRatio"]),
                    repr(row["areaRatioClosedForm"]),
                    repr(row["whitneyScale"]),
                    repr(row["whitneyMeasured"]),
                    repr(row["whitneyBound"]),
                ]
            )
        )
    text = "\n".join(lines) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_luzin(cfg: RunConfig, cells: int) -> int:
    curve = luzin_mod.load_curve(cfg.input)
    try:
        result = luzin_mod.approximate(
            curve, cfg.eps, cells=cells, tolerances=_tolerances(cfg)
        )
    except luzin_mod.BudgetError as exc:
        print(str(exc))
        return EXIT_USAGE
    except ext_mod.ExtensionRefused as exc:
        # Contradicts the approximation guarantee at this resolution; surface it.
        print(f"restricted jet failed validation: {exc}")
        return EXIT_VERIFY_FAILED
    manifest_path, csv_path = _output_pair(cfg, "luzin")
    payload = result.to_json_dict()
    payload["extension"] = ext_mod.to_manifest_dict(result.extension, result.report)
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    sampled = result.extension.sample(_extension_grid(result.extension, max(cfg.samples * 8, 256)))
    ext_mod.write_csv(sampled, csv_path)
    print(f"kept measure: {result.kept.measure()!r}")
    print(f"removed: {result.measure_removed!r} (budget {cfg.eps!r})")
    print(f"rung: {result.rung} (window {1.0 / result.window_param!r}, threshold {result.threshold!r})")
    print(f"manifest: {manifest_path}")
    print(f"csv: {csv_path}")
    offender = result.report.worst_offender(_tolerances(cfg))
    if offender is None:
        return EXIT_OK
    print(f"verification FAILED: {offender}")
    return EXIT_VERIFY_FAILED


def _cmd_sample(cfg: RunConfig) -> int:
    ext = ext_mod.load_manifest(cfg.input)
    lo, hi = cfg.window if cfg.window else ext.window
    if lo < ext.window[0] or hi > ext.window[1]:
        print(f"requested window [{lo}, {hi}] outside stored window {ext.window}")
        return EXIT_USAGE
    grid = np.linspace(lo, hi, max(2, cfg.samples))
    sampled = ext.sample(grid)
    out = Path(cfg.output) if cfg.output else Path("samples.csv")
    ext_mod.write_csv(sampled, out)
    print(f"csv: {out}")
    return EXIT_OK


def run(cfg: RunConfig, cells: int = 512) -> int:
    try:
        if cfg.command == "validate":
            return _cmd_validate(cfg)
        if cfg.command == "extend":
            return _cmd_extend(cfg)
        if cfg.command == "verify":
            return _cmd_verify(cfg)
        if cfg.command == "counterexample":
            return _cmd_counterexample(cfg)
        if cfg.command == "luzin":
            return _cmd_luzin(cfg, cells)
        if cfg.command == "sample":
            return _cmd_sample(cfg)
        print(f"unknown command {cfg.command!r}")
        return EXIT_USAGE
    except (JetFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}")
        return EXIT_USAGE


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = config_from_args(args)
    cells = getattr(args, "cells", 512)
    code = run(cfg, cells=cells)
    if argv is None:  # pragma: no cover - direct console entry
        sys.exit(code)
    return code
