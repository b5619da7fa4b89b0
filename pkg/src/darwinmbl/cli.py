"""Command-line orchestration: run a protocol, write its table and manifest.

Usage: ``darwin-mbl <protocol> --config <path> [--threads N] [--seed S]
[--overwrite]``.  The results table is comma-separated text with
``#``-prefixed metadata lines and one header row; numbers carry 12
significant digits in locale-independent formatting, so identical config and
seed produce byte-identical tables.  The manifest is JSON and records config,
seed derivation, code version, wall time and failure counts.

Exit codes: 0 ok, 1 validation, 2 runtime, 3 partial results.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    NoCrossingError,
    PointParams,
    SweepRecord,
    collapse_search,
    curve_from_sweeps,
    estimate_crossing,
    run_sweep,
)
from .config import ConfigError, ExperimentConfig, parse_config, serialize_config
from .qinfo import FragmentPolicy

THREADS_ENV = "DARWIN_MBL_THREADS"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_PARTIAL = 3


def _fmt(value) -> str:
    """Locale-independent table cell: 12 significant digits for floats."""
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return format(v, ".12g")


def _policy(config: ExperimentConfig) -> FragmentPolicy:
    return FragmentPolicy(
        mode=config.fragment_mode,
        exact_limit=config.fragment_exact_limit,
        sample_cap=config.fragment_sample_cap,
    )


def _sweep(config, points, observables, threads) -> list[SweepRecord]:
    return run_sweep(
        points,
        n_realizations=config.n_realizations,
        master_seed=config.master_seed,
        observables=observables,
        policy=_policy(config),
        krylov_tol=config.krylov_tol,
        n_workers=threads,
    )


def _lr_rows(records: list[SweepRecord], axes) -> list[list]:
    rows = []
    for rec in records:
        mean, stderr, n_ok = rec.lr_stats()
        rows.append(
            list(axes(rec.point))
            + [mean, stderr if n_ok > 1 else None, n_ok, rec.n_requested - n_ok]
        )
    return rows


def _run_redundancy_curve(config, threads):
    L = config.L[0]
    points = [
        PointParams(L=L, h=h, eps=config.eps[0], lam=config.lam[0], t=config.t)
        for h in config.h
    ]
    records = _sweep(config, points, ("r", "LR"), threads)
    header = ["h", "l", "f", "mi_mean", "mi_stderr", "mi_over_HS", "HS", "LR"]
    rows = []
    for rec in records:
        mi_mean, mi_stderr, mi_rescaled = rec.mi_curve_stats()
        hs_mean, _, _ = rec.hs_stats()
        lr_curve = float(np.abs(1.0 - mi_rescaled[: L - 1]).sum())
        for l in range(1, L + 1):
            rows.append(
                [
                    rec.point.h,
                    l,
                    l / L,
                    mi_mean[l - 1],
                    mi_stderr[l - 1],
                    mi_rescaled[l - 1],
                    hs_mean,
                    lr_curve,
                ]
            )
    return header, rows, [], records


def _run_lr_sweep(config, threads):
    points = [
        PointParams(L=L, h=h, eps=config.eps[0], lam=config.lam[0], t=config.t)
        for L in config.L
        for h in config.h
    ]
    records = _sweep(config, points, ("r", "LR"), threads)
    header = ["L", "h", "LR_mean", "LR_stderr", "N_ok", "N_failed"]
    return header, _lr_rows(records, lambda p: (p.L, p.h)), [], records


def _run_ee_sweep(config, threads):
    points = [
        PointParams(L=L, h=h, eps=config.eps[0], lam=config.lam[0], t=config.t)
        for L in config.L
        for h in config.h
    ]
    records = _sweep(config, points, ("SE",), threads)
    header = [
        "L",
        "h",
        "SE_mean",
        "SE_stderr",
        "SE_per_site_mean",
        "SE_per_site_stderr",
        "N_ok",
        "N_failed",
    ]
    rows = []
    for rec in records:
        se_mean, se_err, n_ok = rec.se_stats()
        pl_mean, pl_err, _ = rec.se_per_site_stats()
        rows.append(
            [
                rec.point.L,
                rec.point.h,
                se_mean,
                se_err if n_ok > 1 else None,
                pl_mean,
                pl_err if n_ok > 1 else None,
                n_ok,
                rec.n_requested - n_ok,
            ]
        )
    return header, rows, [], records


def _run_collapse(config, threads):
    wants_lr = config.observable == "LR"
    points = [
        PointParams(L=L, h=h, eps=config.eps[0], lam=config.lam[0], t=config.t)
        for L in config.L
        for h in config.h
    ]
    records = _sweep(config, points, ("r", "LR") if wants_lr else ("SE",), threads)
    curves = {}
    for L in config.L:
        group = [rec for rec in records if rec.point.L == L]
        curve = curve_from_sweeps(group, config.observable)
        curves[L] = (curve.h, curve.mean)
    hc_grid = np.round(
        np.arange(config.hc_min, config.hc_max + 1e-9, config.hc_step), 10
    )
    nu_grid = np.round(
        np.arange(config.nu_min, config.nu_max + 1e-9, config.nu_step), 10
    )
    best = collapse_search(curves, hc_grid, nu_grid)
    header = ["L", "h", "x", "y"]
    rows = []
    for L in config.L:
        h_sorted = np.asarray(sorted(config.h))
        x, y = best.points[L]
        # points were sorted by x inside collapse(); re-derive per-h pairing
        x_of_h = np.sign(h_sorted - best.h_c) * L * np.abs(h_sorted - best.h_c) ** best.nu
        y_of_h = np.interp(x_of_h, x, y)
        for h, xi, yi in zip(h_sorted, x_of_h, y_of_h):
            rows.append([L, h, xi, yi])
    meta = [
        f"h_c = {_fmt(best.h_c)}",
        f"nu = {_fmt(best.nu)}",
        f"quality = {_fmt(best.quality)}",
        f"collapse_observable = {config.observable}",
    ]
    return header, rows, meta, records


def _run_mobility_edge(config, threads):
    points = [
        PointParams(L=L, h=h, eps=eps, lam=config.lam[0], t=config.t)
        for L in config.L
        for eps in config.eps
        for h in config.h
    ]
    records = _sweep(config, points, ("SE", "r", "LR"), threads)
    header = [
        "L",
        "eps",
        "h",
        "LR_mean",
        "LR_stderr",
        "SE_mean",
        "SE_stderr",
        "SE_per_site_mean",
        "N_ok",
        "N_failed",
    ]
    rows = []
    for rec in records:
        lr_mean, lr_err, n_ok = rec.lr_stats()
        se_mean, se_err, _ = rec.se_stats()
        pl_mean, _, _ = rec.se_per_site_stats()
        rows.append(
            [
                rec.point.L,
                rec.point.eps,
                rec.point.h,
                lr_mean,
                lr_err if n_ok > 1 else None,
                se_mean,
                se_err,
                pl_mean,
                n_ok,
                rec.n_requested - n_ok,
            ]
        )
    small, large = sorted(config.L)
    meta = []
    for eps in config.eps:
        for observable in ("LR", "SE_per_site"):
            group_s = [
                r for r in records if r.point.L == small and r.point.eps == eps
            ]
            group_l = [
                r for r in records if r.point.L == large and r.point.eps == eps
            ]
            try:
                est = estimate_crossing(
                    curve_from_sweeps(group_s, observable),
                    curve_from_sweeps(group_l, observable),
                    n_bootstrap=config.n_bootstrap,
                    seed=config.master_seed,
                )
                meta.append(
                    f"crossing observable={observable} eps={_fmt(eps)} "
                    f"h_c={_fmt(est.h_c)} ci_low={_fmt(est.ci_low)} "
                    f"ci_high={_fmt(est.ci_high)} n_boot={est.n_bootstrap}"
                )
            except NoCrossingError:
                meta.append(
                    f"crossing observable={observable} eps={_fmt(eps)} h_c=none"
                )
    return header, rows, meta, records


def _run_lambda_sweep(config, threads):
    points = [
        PointParams(
            L=L, h=h, eps=eps, lam=lam, t=config.t, fresh_fields=config.fresh_fields
        )
        for L in config.L
        for eps in config.eps
        for lam in config.lam
        for h in config.h
    ]
    records = _sweep(config, points, ("r", "LR"), threads)
    header = ["L", "eps", "lambda", "h", "LR_mean", "LR_stderr", "N_ok", "N_failed"]
    meta = [f"fresh_fields = {'true' if config.fresh_fields else 'false'}"]
    return header, _lr_rows(records, lambda p: (p.L, p.eps, p.lam, p.h)), meta, records


def _run_fixed_initial(config, threads):
    points = [
        PointParams(
            L=L,
            h=h,
            eps=config.init_eps,
            lam=lam,
            t=config.t,
            init_h=config.init_h,
            init_eps=config.init_eps,
        )
        for L in config.L
        for lam in config.lam
        for h in config.h
    ]
    records = _sweep(config, points, ("r", "LR"), threads)
    header = ["L", "lambda", "h", "LR_mean", "LR_stderr", "N_ok", "N_failed"]
    meta = [
        f"init_h = {_fmt(config.init_h)}",
        f"init_eps = {_fmt(config.init_eps)}",
    ]
    return header, _lr_rows(records, lambda p: (p.L, p.lam, p.h)), meta, records


_RUNNERS = {
    "redundancy-curve": _run_redundancy_curve,
    "lr-sweep": _run_lr_sweep,
    "ee-sweep": _run_ee_sweep,
    "collapse": _run_collapse,
    "mobility-edge": _run_mobility_edge,
    "lambda-sweep": _run_lambda_sweep,
    "fixed-initial-sweep": _run_fixed_initial,
}


def _write_table(path: Path, config, header, rows, meta_lines):
    lines = [f"# darwin-mbl {__version__}"]
    for line in serialize_config(config).splitlines():
        lines.append(f"# {line}")
    lines.extend(f"# {line}" for line in meta_lines)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_manifest(path: Path, config, records, wall_time, outputs, partial):
    grid = []
    total_hard = 0
    for rec in records:
        total_hard += rec.n_hard_failures
        grid.append(
            {
                "point": asdict(rec.point),
                "n_realizations": rec.n_requested,
                "realization_range": [0, rec.n_requested],
                "seed_of_first_realization": int(rec.seeds[0]),
                "n_degenerate_system_entropy": rec.n_degenerate,
                "hard_failures": [
                    {"index": i, "seed": int(s), "message": m}
                    for i, s, m in rec.hard_failures
                ],
            }
        )
    manifest = {
        "tool": "darwin-mbl",
        "code_version": __version__,
        "config": serialize_config(config),
        "master_seed": config.master_seed,
        "seed_derivation": "sha256(master_seed \\x1f point_key \\x1f index)[:8] big-endian",
        "wall_time_s": wall_time,
        "outputs": [str(p) for p in outputs],
        "grid": grid,
        "n_hard_failures": total_hard,
        "status": "PARTIAL" if partial else "OK",
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")


def run(config: ExperimentConfig, threads: int = 1, overwrite: bool = False) -> int:
    """Execute one protocol; returns the process exit code."""
    out_dir = Path(config.output_dir)
    table_path = out_dir / f"{config.protocol}.csv"
    manifest_path = out_dir / f"{config.protocol}.manifest.json"
    if not overwrite:
        for path in (table_path, manifest_path):
            if path.exists():
                print(
                    f"error: {path} exists; pass --overwrite to replace it",
                    file=sys.stderr,
                )
                return EXIT_VALIDATION
    start = time.perf_counter()
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        header, rows, meta, records = _RUNNERS[config.protocol](config, threads)
        wall = time.perf_counter() - start
        partial = any(rec.n_hard_failures for rec in records)
        if partial:
            meta = list(meta) + ["PARTIAL"]
        _write_table(table_path, config, header, rows, meta)
        _write_manifest(
            manifest_path, config, records, wall, [table_path, manifest_path], partial
        )
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_PARTIAL if partial else EXIT_OK


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="darwin-mbl",
        description="Dephasing qubit in a disordered Heisenberg ring: "
        "protocol runner producing CSV tables and JSON manifests.",
    )
    parser.add_argument("protocol", help="protocol name (must match the config)")
    parser.add_argument("--config", required=True, help="path to the config file")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"worker processes (default: ${THREADS_ENV} or 1)",
    )
    parser.add_argument(
        "--seed", type=int, default=None, help="override the master seed"
    )
    parser.add_argument(
        "--overwrite", action="store_true", help="replace existing output files"
    )
    args = parser.parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        config = parse_config(text)
    except ConfigError as exc:
        for issue in exc.errors:
            print(f"config error: {issue}", file=sys.stderr)
        return EXIT_VALIDATION
    if config.protocol != args.protocol:
        print(
            f"config error: protocol mismatch: command line says {args.protocol!r}, "
            f"config says {config.protocol!r}",
            file=sys.stderr,
        )
        return EXIT_VALIDATION
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    threads = args.threads if args.threads is not None else _default_threads()
    return run(config, threads=threads, overwrite=args.overwrite)


if __name__ == "__main__":
    sys.exit(main())
