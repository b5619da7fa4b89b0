"""Disorder-ensemble sweeps, curve crossings and finite-size scaling collapse.

Every realization is a pure function of (grid point, seed); per-realization
seeds derive from the master seed through a stable hash, and aggregation
walks realizations in index order, so ensembles are bit-reproducible across
machines, execution order and worker counts.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .basis import build_sector_basis, default_sector, embed_full
from .dynamics import decoherence_factor, propagate_krylov, propagate_lambda0
from .operators import build_env_hamiltonian, build_hse, draw_fields
from .qinfo import (
    DegenerateSystemEntropyError,
    FragmentPolicy,
    lack_of_redundancy,
)
from .spectral import diagonalize, halfchain_entropy, select_eigenstate

DEFAULT_OBSERVABLES = ("SE", "r", "LR")


class NoCrossingError(ValueError):
    """The two curves do not cross inside the sampled disorder range."""


class InsufficientOverlapError(ValueError):
    """Collapsed x-ranges of different sizes do not overlap."""


class RealizationError(RuntimeError):
    """A realization failed; carries the grid point and seed for provenance."""


@dataclass(frozen=True)
class PointParams:
    """One grid point of a sweep.

    For the fixed-initial-state protocol, ``init_h``/``init_eps`` pin the
    eigenstate preparation while ``h`` is the evolution disorder (fields drawn
    fresh).  ``fresh_fields`` makes the evolution redraw fields at the same
    strength instead of reusing the preparation realization.
    """

    L: int
    h: float
    eps: float = 0.5
    lam: float = 0.0
    t: float = math.pi / 4
    init_h: float | None = None
    init_eps: float | None = None
    fresh_fields: bool = False


def point_key(point: PointParams) -> str:
    """Stable textual identity of a grid point, used for seed derivation.

    Fixed-initial points omit the evolution axes (h, lam): the initial state
    is prepared once per realization index and shared by the whole evolution
    grid, which also makes the lam = 0 invariance under the evolution
    disorder exact at the ensemble level.
    """
    if point.init_h is not None:
        return "|".join(
            [
                f"L={point.L}",
                f"t={point.t:.12g}",
                f"init_h={point.init_h:.12g}",
                f"init_eps={point.init_eps:.12g}",
                "fixed-initial",
            ]
        )
    parts = [
        f"L={point.L}",
        f"h={point.h:.12g}",
        f"eps={point.eps:.12g}",
        f"lam={point.lam:.12g}",
        f"t={point.t:.12g}",
    ]
    if point.fresh_fields:
        parts.append("fresh")
    return "|".join(parts)


def derive_seed(master_seed: int, *parts) -> int:
    """Platform-independent 64-bit seed from the master seed and labels."""
    text = "\x1f".join([str(int(master_seed))] + [str(p) for p in parts])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class RealizationRecord:
    point: PointParams
    index: int
    seed: int
    n_up: int
    epsilon_achieved: float | None = None
    se: float | None = None
    r_abs: float | None = None
    system_entropy: float | None = None
    lr: float | None = None
    mi_mean: np.ndarray | None = None
    mi_stderr: np.ndarray | None = None
    error: str | None = None  # "degenerate-system-entropy" for flagged revivals


def run_realization(
    point: PointParams,
    seed: int,
    index: int = 0,
    observables=DEFAULT_OBSERVABLES,
    policy: FragmentPolicy = FragmentPolicy(),
    krylov_tol: float = 1e-8,
) -> RealizationRecord:
    """Draw fields, target an eigenstate, evolve, measure.

    Deterministic given (point, seed).  A vanishing system entropy is flagged
    on the record (the half-chain entropy is still reported); solver failures
    raise ``RealizationError`` with full provenance.
    """
    L = point.L
    n_up = default_sector(L)
    want_se = "SE" in observables
    want_lr = "LR" in observables
    want_r = want_lr or "r" in observables
    try:
        fixed_initial = point.init_h is not None
        if fixed_initial or point.fresh_fields:
            prep_h = point.init_h if fixed_initial else point.h
            prep_eps = point.init_eps if fixed_initial else point.eps
            prep_fields = draw_fields(L, prep_h, derive_seed(seed, "init"))
            evol_fields = draw_fields(L, point.h, derive_seed(seed, "evol"))
        else:
            prep_eps = point.eps
            prep_fields = draw_fields(L, point.h, seed)
            evol_fields = prep_fields
        basis = build_sector_basis(L, n_up)
        spectrum = diagonalize(build_env_hamiltonian(L, prep_fields, n_up))
        selection = select_eigenstate(spectrum, prep_eps)
        se = halfchain_entropy(selection.state, basis) if want_se else None

        if not want_r:
            return RealizationRecord(
                point=point,
                index=index,
                seed=seed,
                n_up=n_up,
                epsilon_achieved=selection.epsilon_achieved,
                se=se,
            )

        xi_full = embed_full(selection.state, basis)
        if point.lam == 0.0:
            branches = propagate_lambda0(xi_full, point.t)
        else:
            branches = propagate_krylov(
                xi_full,
                point.lam,
                build_env_hamiltonian(L, evol_fields),
                build_hse(L),
                point.t,
                tol=krylov_tol,
            )
        deco = decoherence_factor(branches)
        record = RealizationRecord(
            point=point,
            index=index,
            seed=seed,
            n_up=n_up,
            epsilon_achieved=selection.epsilon_achieved,
            se=se,
            r_abs=abs(deco.factor),
            system_entropy=deco.system_entropy,
        )
        if not want_lr:
            return record
        try:
            curve = lack_of_redundancy(
                branches, policy=policy, sample_seed=derive_seed(seed, "fragments")
            )
        except DegenerateSystemEntropyError:
            return replace(record, error="degenerate-system-entropy")
        return replace(
            record,
            lr=curve.lack_of_redundancy,
            mi_mean=curve.mi_mean,
            mi_stderr=curve.mi_stderr,
        )
    except Exception as exc:
        raise RealizationError(
            f"realization failed at {point_key(point)} seed={seed}: {exc!r}"
        ) from exc


@dataclass(frozen=True)
class SweepRecord:
    """Ensemble statistics of one grid point."""

    point: PointParams
    master_seed: int
    n_requested: int
    seeds: np.ndarray
    se: np.ndarray  # nan where unavailable
    r_abs: np.ndarray
    system_entropy: np.ndarray
    lr: np.ndarray
    mi_mean: np.ndarray | None  # (N, L), nan rows where unavailable
    mi_rescaled: np.ndarray | None
    n_degenerate: int
    hard_failures: tuple[tuple[int, int, str], ...]  # (index, seed, message)

    @property
    def n_hard_failures(self) -> int:
        return len(self.hard_failures)

    def _stats(self, values: np.ndarray) -> tuple[float, float, int]:
        good = values[np.isfinite(values)]
        if good.size == 0:
            return math.nan, math.nan, 0
        mean = float(good.mean())
        stderr = (
            float(good.std(ddof=1) / math.sqrt(good.size)) if good.size > 1 else math.nan
        )
        return mean, stderr, int(good.size)

    def lr_stats(self) -> tuple[float, float, int]:
        return self._stats(self.lr)

    def se_stats(self) -> tuple[float, float, int]:
        return self._stats(self.se)

    def se_per_site_stats(self) -> tuple[float, float, int]:
        return self._stats(self.se / self.point.L)

    def r_stats(self) -> tuple[float, float, int]:
        return self._stats(self.r_abs)

    def hs_stats(self) -> tuple[float, float, int]:
        return self._stats(self.system_entropy)

    def mi_curve_stats(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-size ensemble mean/stderr of MI (nats) and of rescaled MI."""
        ok = ~np.isnan(self.mi_mean).any(axis=1)
        mi = self.mi_mean[ok]
        mean = mi.mean(axis=0)
        stderr = (
            mi.std(axis=0, ddof=1) / math.sqrt(mi.shape[0])
            if mi.shape[0] > 1
            else np.full(mi.shape[1], math.nan)
        )
        rescaled = self.mi_rescaled[ok].mean(axis=0)
        return mean, stderr, rescaled

    def values(self, observable: str) -> np.ndarray:
        if observable == "LR":
            return self.lr
        if observable == "SE":
            return self.se
        if observable == "SE_per_site":
            return self.se / self.point.L
        if observable == "r":
            return self.r_abs
        raise ValueError(f"unknown observable {observable!r}")


def _realization_task(args):
    point, index, seed, observables, policy, krylov_tol = args
    try:
        return run_realization(
            point,
            seed,
            index=index,
            observables=observables,
            policy=policy,
            krylov_tol=krylov_tol,
        )
    except RealizationError as exc:
        return (index, seed, str(exc))


def run_sweep(
    points: list[PointParams],
    n_realizations: int,
    master_seed: int,
    observables=DEFAULT_OBSERVABLES,
    policy: FragmentPolicy = FragmentPolicy(),
    krylov_tol: float = 1e-8,
    n_workers: int = 1,
) -> list[SweepRecord]:
    """Run the disorder ensemble on every grid point.

    Realizations are independent work units; with ``n_workers > 1`` they run
    in a process pool.  Results are aggregated in realization-index order, so
    means are identical for any worker count.
    """
    if n_realizations < 1:
        raise ValueError(f"need at least one realization, got {n_realizations}")
    tasks = []
    for point in points:
        key = point_key(point)
        for index in range(n_realizations):
            tasks.append(
                (
                    point,
                    index,
                    derive_seed(master_seed, key, index),
                    tuple(observables),
                    policy,
                    krylov_tol,
                )
            )
    if n_workers <= 1:
        outcomes = [_realization_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            chunk = max(1, len(tasks) // (n_workers * 8))
            outcomes = list(pool.map(_realization_task, tasks, chunksize=chunk))

    records: list[SweepRecord] = []
    cursor = 0
    for point in points:
        group = outcomes[cursor : cursor + n_realizations]
        cursor += n_realizations
        records.append(
            _aggregate(point, master_seed, n_realizations, group, observables)
        )
    return records


def _aggregate(
    point: PointParams,
    master_seed: int,
    n: int,
    outcomes: list,
    observables,
) -> SweepRecord:
    L = point.L
    seeds = np.zeros(n, dtype=np.uint64)
    se = np.full(n, np.nan)
    r_abs = np.full(n, np.nan)
    hs = np.full(n, np.nan)
    lr = np.full(n, np.nan)
    want_lr = "LR" in observables
    mi = np.full((n, L), np.nan) if want_lr else None
    mi_rescaled = np.full((n, L), np.nan) if want_lr else None
    n_degenerate = 0
    failures = []
    for outcome in outcomes:
        if isinstance(outcome, tuple):
            index, seed, message = outcome
            seeds[index] = seed
            failures.append((index, seed, message))
            continue
        rec = outcome
        seeds[rec.index] = rec.seed
        if rec.se is not None:
            se[rec.index] = rec.se
        if rec.r_abs is not None:
            r_abs[rec.index] = rec.r_abs
            hs[rec.index] = rec.system_entropy
        if rec.error == "degenerate-system-entropy":
            n_degenerate += 1
        elif rec.lr is not None:
            lr[rec.index] = rec.lr
            mi[rec.index] = rec.mi_mean
            mi_rescaled[rec.index] = rec.mi_mean / rec.system_entropy
    return SweepRecord(
        point=point,
        master_seed=master_seed,
        n_requested=n,
        seeds=seeds,
        se=se,
        r_abs=r_abs,
        system_entropy=hs,
        lr=lr,
        mi_mean=mi,
        mi_rescaled=mi_rescaled,
        n_degenerate=n_degenerate,
        hard_failures=tuple(sorted(failures)),
    )


def run_fixed_initial_state_sweep(
    L: int,
    evolution_h,
    lam_values,
    n_realizations: int,
    master_seed: int,
    init_h: float = 5.0,
    init_eps: float = 0.5,
    t: float = math.pi,
    observables=("r", "LR"),
    policy: FragmentPolicy = FragmentPolicy(),
    krylov_tol: float = 1e-8,
    n_workers: int = 1,
) -> list[SweepRecord]:
    """Sweep the evolution disorder while the initial eigenstate stays fixed.

    Each realization prepares the eigenstate from its own field draw at
    ``init_h``/``init_eps`` and then evolves under freshly drawn fields of
    strength h (the grid value).  The companion protocol where preparation
    and evolution share one realization is plain ``run_sweep`` over
    ``PointParams`` without ``init_h``.
    """
    points = [
        PointParams(
            L=L, h=h, eps=init_eps, lam=lam, t=t, init_h=init_h, init_eps=init_eps
        )
        for lam in lam_values
        for h in evolution_h
    ]
    return run_sweep(
        points,
        n_realizations=n_realizations,
        master_seed=master_seed,
        observables=observables,
        policy=policy,
        krylov_tol=krylov_tol,
        n_workers=n_workers,
    )


@dataclass(frozen=True)
class DisorderCurve:
    """One observable versus disorder strength at fixed size."""

    L: int
    h: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    samples: tuple[np.ndarray, ...] | None = None  # finite per-h realizations


def curve_from_sweeps(records: list[SweepRecord], observable: str) -> DisorderCurve:
    """Collect one observable across sweep records of equal L, sorted by h."""
    sizes = {rec.point.L for rec in records}
    if len(sizes) != 1:
        raise ValueError(f"records span several sizes {sorted(sizes)}")
    ordered = sorted(records, key=lambda rec: rec.point.h)
    h = np.array([rec.point.h for rec in ordered])
    samples = []
    means = []
    errs = []
    for rec in ordered:
        vals = rec.values(observable)
        good = vals[np.isfinite(vals)]
        samples.append(good)
        means.append(good.mean() if good.size else math.nan)
        errs.append(
            good.std(ddof=1) / math.sqrt(good.size) if good.size > 1 else math.nan
        )
    return DisorderCurve(
        L=sizes.pop(),
        h=h,
        mean=np.array(means),
        stderr=np.array(errs),
        samples=tuple(samples),
    )


@dataclass(frozen=True)
class CrossingEstimate:
    h_c: float
    ci_low: float | None
    ci_high: float | None
    n_bootstrap: int


def _first_crossing(h: np.ndarray, diff: np.ndarray) -> float:
    """Leftmost sign change of a piecewise-linear difference curve."""
    if np.all(np.abs(diff) < 1e-15):
        raise NoCrossingError("curves coincide over the sampled range")
    for i in range(diff.size - 1):
        a, b = diff[i], diff[i + 1]
        if a == 0.0:
            return float(h[i])
        if a * b < 0.0:
            return float(h[i] + (h[i + 1] - h[i]) * a / (a - b))
    if diff[-1] == 0.0:
        return float(h[-1])
    raise NoCrossingError("no sign change inside the sampled disorder range")


def estimate_crossing(
    curve_small: DisorderCurve,
    curve_large: DisorderCurve,
    n_bootstrap: int = 200,
    seed: int = 0,
) -> CrossingEstimate:
    """Crossing point of two finite-size curves, with a bootstrap interval.

    The difference (large - small) is interpolated piecewise-linearly on the
    union of grid points inside the overlapping h range; the leftmost sign
    change is the estimate.  The interval resamples realizations per grid
    point (percentiles 2.5/97.5 over crossings that exist); curves carrying
    only means skip the bootstrap.
    """
    if curve_large.L <= curve_small.L:
        raise ValueError("curve_large must belong to the larger size")
    lo = max(curve_small.h.min(), curve_large.h.min())
    hi = min(curve_small.h.max(), curve_large.h.max())
    if lo >= hi:
        raise NoCrossingError("curves do not share a disorder range")
    grid = np.unique(np.concatenate([curve_small.h, curve_large.h]))
    grid = grid[(grid >= lo) & (grid <= hi)]

    def crossing(mean_s: np.ndarray, mean_l: np.ndarray) -> float:
        ys = np.interp(grid, curve_small.h, mean_s)
        yl = np.interp(grid, curve_large.h, mean_l)
        return _first_crossing(grid, yl - ys)

    h_c = crossing(curve_small.mean, curve_large.mean)
    if curve_small.samples is None or curve_large.samples is None or n_bootstrap < 1:
        return CrossingEstimate(h_c=h_c, ci_low=None, ci_high=None, n_bootstrap=0)
    rng = np.random.Generator(np.random.PCG64(derive_seed(seed, "bootstrap")))
    found = []
    for _ in range(n_bootstrap):
        resampled = []
        for curve in (curve_small, curve_large):
            means = np.empty(curve.h.size)
            for i, vals in enumerate(curve.samples):
                if vals.size == 0:
                    means[i] = math.nan
                else:
                    means[i] = vals[rng.integers(0, vals.size, vals.size)].mean()
            resampled.append(means)
        try:
            found.append(crossing(resampled[0], resampled[1]))
        except NoCrossingError:
            continue
    if not found:
        return CrossingEstimate(h_c=h_c, ci_low=None, ci_high=None, n_bootstrap=0)
    lo_ci, hi_ci = np.percentile(found, [2.5, 97.5])
    return CrossingEstimate(
        h_c=h_c, ci_low=float(lo_ci), ci_high=float(hi_ci), n_bootstrap=len(found)
    )


@dataclass(frozen=True)
class ScalingCollapse:
    h_c: float
    nu: float
    quality: float
    points: dict[int, tuple[np.ndarray, np.ndarray]]  # L -> (x, y)


def collapse(
    curves: dict[int, tuple[np.ndarray, np.ndarray]], h_c: float, nu: float
) -> ScalingCollapse:
    """Rescale curves to x = sign(h - h_c) * L * |h - h_c|^nu and score them.

    Quality sums, over each size, the squared deviation of its points from
    the piecewise-linear interpolant through all other sizes' points; points
    outside the others' x-range are skipped.
    """
    if len(curves) < 2:
        raise InsufficientOverlapError("collapse needs at least two sizes")
    if nu <= 0:
        raise ValueError(f"exponent must be positive, got nu={nu}")
    mapped: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for L, (h, y) in sorted(curves.items()):
        h = np.asarray(h, dtype=float)
        y = np.asarray(y, dtype=float)
        x = np.sign(h - h_c) * L * np.abs(h - h_c) ** nu
        order = np.argsort(x)
        mapped[L] = (x[order], y[order])
    total = 0.0
    used = 0
    for L, (x, y) in mapped.items():
        xo = np.concatenate([mapped[Lo][0] for Lo in mapped if Lo != L])
        yo = np.concatenate([mapped[Lo][1] for Lo in mapped if Lo != L])
        order = np.argsort(xo)
        xo, yo = xo[order], yo[order]
        inside = (x >= xo[0]) & (x <= xo[-1])
        if not inside.any():
            continue
        dev = y[inside] - np.interp(x[inside], xo, yo)
        total += float((dev**2).sum())
        used += int(inside.sum())
    if used == 0:
        raise InsufficientOverlapError("collapsed x-ranges of the sizes are disjoint")
    return ScalingCollapse(h_c=float(h_c), nu=float(nu), quality=total, points=mapped)


def collapse_search(
    curves: dict[int, tuple[np.ndarray, np.ndarray]],
    hc_grid: np.ndarray | None = None,
    nu_grid: np.ndarray | None = None,
) -> ScalingCollapse:
    """Exhaustive grid search of the collapse cost over (h_c, nu)."""
    if hc_grid is None:
        hc_grid = np.round(np.arange(1.5, 5.5 + 1e-9, 0.05), 10)
    if nu_grid is None:
        nu_grid = np.round(np.arange(0.3, 2.0 + 1e-9, 0.05), 10)
    best: ScalingCollapse | None = None
    for hc in hc_grid:
        for nu in nu_grid:
            try:
                candidate = collapse(curves, float(hc), float(nu))
            except InsufficientOverlapError:
                continue
            if best is None or candidate.quality < best.quality:
                best = candidate
    if best is None:
        raise InsufficientOverlapError("no (h_c, nu) grid point yields an overlap")
    return best
