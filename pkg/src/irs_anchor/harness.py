"""Overhead formulas, NMSE metric, seeded Monte Carlo trials and sweeps."""
from __future__ import annotations

import csv
import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baseline import run_benchmark
from .errors import ConfigError, EstimationError
from .model import (NoiseModel, PathLossModel, SystemGeometry, db_to_linear,
                    draw_channels)
from .phase1 import LOS, TWO_ANCHOR, run_phase1
from .phase2 import run_phase2
from .pilots import make_grouping, plan_benchmark, plan_phase1, plan_phase2

log = logging.getLogger(__name__)

PROPOSED_GENERAL = "proposed-general"
PROPOSED_LOS = "proposed-los"
BENCHMARK = "benchmark"
SCHEMES = (PROPOSED_GENERAL, PROPOSED_LOS, BENCHMARK)
# Fixed per-scheme stream ids so that reordering the scheme list changes nothing.
_SCHEME_STREAM = {PROPOSED_GENERAL: 0, PROPOSED_LOS: 1, BENCHMARK: 2}

AXES = ("m", "k", "p")
CSV_HEADER = ["axis_value", "scheme", "overhead_slots", "nmse_mean", "nmse_stderr",
              "trials_ok", "trials_failed", "seed"]


def training_overhead(M, N, K, scheme):
    """Pilot slots needed before data transmission (one on-line block)."""
    if min(M, N, K) < 1:
        raise ValueError("M, N and K must be >= 1")
    online = K + max(K, math.ceil(K * N / M))
    if scheme == PROPOSED_GENERAL:
        return 2 * (N + 1) + online
    if scheme == PROPOSED_LOS:
        return (N + 1) + online
    if scheme == BENCHMARK:
        return K * (N + 1)
    raise ValueError(f"unknown scheme {scheme!r}")


def benchmark_overhead_nk(N, K):
    """The N*K count often quoted for per-user training (ignores the direct path)."""
    return N * K


def normalized_mse(estimates, truth):
    """Pooled squared error of direct and cascaded channels over their energy.

    Returns ``(nmse, per_user_nmse)``.
    """
    dH = estimates.H_bsu_hat - truth.cascaded_bsu
    dh = estimates.h_bu_hat - truth.h_bu
    if dH.shape != truth.cascaded_bsu.shape or dh.shape != truth.h_bu.shape:
        raise ValueError("estimate and truth dimensions differ")
    err_k = np.sum(np.abs(dH) ** 2, axis=(1, 2)) + np.sum(np.abs(dh) ** 2, axis=1)
    ref_k = (np.sum(np.abs(truth.cascaded_bsu) ** 2, axis=(1, 2))
             + np.sum(np.abs(truth.h_bu) ** 2, axis=1))
    if not ref_k.sum() > 0:
        raise ZeroDivisionError("true channels have zero energy")
    with np.errstate(divide="ignore", invalid="ignore"):
        per_user = err_k / ref_k
    return float(err_k.sum() / ref_k.sum()), per_user.tolist()


@dataclass
class ExperimentConfig:
    M: int = 16
    N: int = 16
    K: int = 4
    p_online_dbm: float = 20.0
    p_offline_dbm: float = 40.0
    noise_power_dbm: float = -105.0
    trials: int = 100
    master_seed: int = 0
    schemes: tuple = SCHEMES
    sweep_axis: str | None = None
    sweep_grid: tuple = ()
    # Coherence-block lengths are recorded only; one on-line block is simulated.
    T_bs: int = 10000
    T_su: int = 1000
    geometry: SystemGeometry | None = None
    pathloss: PathLossModel = field(default_factory=PathLossModel)
    theta: float | None = None
    noise_off: bool = False
    genie_direct: bool = False
    shared_noise: bool = False
    strict_reference_row: bool = False
    max_failure_rate: float = 0.05

    def __post_init__(self):
        for name in ("M", "N", "K", "trials", "T_bs", "T_su"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown or not self.schemes:
            raise ConfigError(f"unknown or empty scheme list: {sorted(unknown)}")
        if self.sweep_axis is not None:
            if self.sweep_axis not in AXES:
                raise ConfigError(f"sweep axis must be one of {AXES}")
            if not self.sweep_grid or list(self.sweep_grid) != sorted(self.sweep_grid):
                raise ConfigError("sweep grid must be nonempty and sorted")
        if self.geometry is None:
            self.geometry = SystemGeometry.for_elements(self.N)
        elif self.geometry.n_elements != self.N:
            raise ConfigError(
                f"IRS grid {self.geometry.irs_rows}x{self.geometry.irs_cols} "
                f"does not have N={self.N} elements")

    @property
    def noise_enabled(self):
        return not self.noise_off and math.isfinite(self.noise_power_dbm)

    def at(self, axis, value):
        """Copy of the config with one sweep coordinate set."""
        if axis == "m":
            return dataclasses.replace(self, M=int(value))
        if axis == "k":
            return dataclasses.replace(self, K=int(value))
        if axis == "p":
            return dataclasses.replace(self, p_online_dbm=float(value))
        raise ConfigError(f"unknown sweep axis {axis!r}")


@dataclass
class TrialResult:
    scheme: str
    overhead_slots: int
    nmse: float
    per_user_nmse: list
    flags: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.flags


def channel_rng(master_seed, trial_index):
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial_index, 0)))


def noise_rng(master_seed, trial_index, scheme, shared_noise=False):
    stream = 0 if shared_noise else _SCHEME_STREAM[scheme]
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(trial_index, 1, stream)))


def _run_scheme(config, scheme, channels, noise):
    p_on = float(db_to_linear(config.p_online_dbm))
    p_off = float(db_to_linear(config.p_offline_dbm))
    if scheme == BENCHMARK:
        est = run_benchmark(channels, p_on, noise, plan_benchmark(config.N, config.K))
        return est, est.slots_used
    mode = LOS if scheme == PROPOSED_LOS else TWO_ANCHOR
    p1 = run_phase1(channels, plan_phase1(config.N, mode), p_off, noise, mode,
                    strict_reference_row=config.strict_reference_row)
    plan2 = plan_phase2(config.M, config.N, config.K,
                        make_grouping(config.K, config.M, config.N), theta=config.theta)
    est = run_phase2(channels, p1, plan2, p_on, noise, genie_direct=config.genie_direct)
    return est, p1.slots_used + est.slots_used


def run_trial(config: ExperimentConfig, trial_index):
    """Run every configured scheme on one shared channel draw."""
    channels = draw_channels(config.M, config.K, config.geometry, config.pathloss,
                             channel_rng(config.master_seed, trial_index))
    results = []
    for scheme in config.schemes:
        noise = None
        if config.noise_enabled:
            rng = noise_rng(config.master_seed, trial_index, scheme, config.shared_noise)
            noise = NoiseModel(config.noise_power_dbm, rng=rng)
        expected = training_overhead(config.M, config.N, config.K, scheme)
        try:
            est, used = _run_scheme(config, scheme, channels, noise)
        except EstimationError as exc:
            log.debug("trial %d scheme %s failed: %s", trial_index, scheme, exc)
            results.append(TrialResult(scheme, expected, math.nan, [], [str(exc)]))
            continue
        if used != expected:
            raise AssertionError(f"{scheme}: used {used} slots, formula gives {expected}")
        nmse, per_user = normalized_mse(est, channels)
        results.append(TrialResult(scheme, used, nmse, per_user))
    return results


def _trial_job(args):
    config, index = args
    return index, run_trial(config, index)


def run_point(config: ExperimentConfig, workers=1):
    """All trials of one configuration, ordered by trial index."""
    jobs = [(config, i) for i in range(config.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_trial_job, jobs))
    else:
        done = [_trial_job(j) for j in jobs]
    done.sort(key=lambda item: item[0])
    return [results for _, results in done]


def aggregate(trials, schemes):
    """Per-scheme mean/stderr of NMSE over successful trials."""
    rows = {}
    for scheme in schemes:
        res = [r for t in trials for r in t if r.scheme == scheme]
        vals = [r.nmse for r in res if r.ok]
        n_ok = len(vals)
        # fsum is exactly rounded, so the result does not depend on trial order
        mean = math.fsum(vals) / n_ok if n_ok else math.nan
        var = math.fsum((v - mean) ** 2 for v in vals) / (n_ok - 1) if n_ok > 1 else 0.0
        rows[scheme] = {
            "overhead_slots": res[0].overhead_slots,
            "nmse_mean": mean,
            "nmse_stderr": math.sqrt(var / n_ok) if n_ok > 1 else 0.0,
            "trials_ok": n_ok,
            "trials_failed": len(res) - n_ok,
        }
    return rows


def _format_axis(axis, value):
    return str(int(value)) if axis in ("m", "k") else repr(float(value))


def run_sweep(config: ExperimentConfig, axis=None, grid=None, out=None, workers=1):
    """Sweep one axis (or run the single configured point) and emit rows.

    Without an axis the configured point is reported with the on-line power as
    its axis value. Rows are also written to ``out`` as CSV when given.
    """
    axis = axis or config.sweep_axis
    grid = list(grid if grid is not None else config.sweep_grid)
    points = [(v, config.at(axis, v)) for v in grid] if axis else [(config.p_online_dbm, config)]
    label_axis = axis or "p"
    rows = []
    for value, cfg in points:
        agg = aggregate(run_point(cfg, workers), cfg.schemes)
        for scheme in cfg.schemes:
            rows.append({"axis_value": _format_axis(label_axis, value), "scheme": scheme,
                         **agg[scheme], "seed": cfg.master_seed})
    if out is not None:
        write_csv(rows, out)
    return rows


def write_csv(rows, path):
    path = Path(path)
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for r in rows:
                writer.writerow([r["axis_value"], r["scheme"], r["overhead_slots"],
                                 repr(r["nmse_mean"]), repr(r["nmse_stderr"]),
                                 r["trials_ok"], r["trials_failed"], r["seed"]])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def failure_rate(rows):
    total = sum(r["trials_ok"] + r["trials_failed"] for r in rows)
    return sum(r["trials_failed"] for r in rows) / total if total else 0.0
