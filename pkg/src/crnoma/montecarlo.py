"""Seeded Monte Carlo estimation of per-user outage and per-hop SIDNR CDFs.

Trials are split into fixed ranges and each range regenerates its own channel
draws from the counter-based stream, so results depend only on (seed, trials).
Workers return integer counts, which are summed.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analytic
from .channel import draw_block, secondary_transmit_power
from .config import OMA, SystemConfig, ensure_valid
from .sidnr import hop1_coefficients, hop2_coefficients, sidnr_hop1, sidnr_hop2, user_threshold

CHUNK = 1 << 16
WORKERS_ENV = "CRNOMA_WORKERS"

PER_LAYER = "per-layer"
JOINT_SIC = "joint-sic"


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


@dataclass(frozen=True)
class OutageResult:
    user: int
    rho: float
    empirical_op: float
    trials: int
    ci_halfwidth: float
    hop1_cdf: float
    hop2_cdf: float
    analytic_op: float | None = None
    mode: str = PER_LAYER
    joint_sic_op: float | None = None


@dataclass(frozen=True)
class TrialOutcome:
    outage: tuple[bool, ...]
    gamma_hop1: tuple[float, ...]
    gamma_hop2: tuple[float, ...]
    joint_outage: tuple[bool, ...]


@dataclass
class _Block:
    gamma1: np.ndarray       # (n, B) relay SIDNR for layer j
    gamma2: np.ndarray       # (n, B) user j SIDNR for its own layer
    joint_fail: np.ndarray   # (n, B) any SIC stage for layers <= j failed


def simulate_block(config: SystemConfig, rho: float | None, seed: int, start: int, count: int,
                   joint_sic: bool = False) -> _Block:
    pbar_s, pbar_r, snr = config.operating_point(rho)
    real = draw_block(config, snr, seed, start, count)
    tau = config.pathloss
    p_s = secondary_transmit_power(pbar_s, config.i_itc, real.y, config.d_sd, tau)
    p_r = secondary_transmit_power(pbar_r, config.i_itc, real.v, config.d_rd, tau)
    B = config.num_users
    psi = [user_threshold(config, j) for j in range(1, B + 1)]

    g1 = np.empty((count, B))
    g2 = np.empty((count, B))
    for j in range(1, B + 1):
        g1[:, j - 1] = sidnr_hop1(hop1_coefficients(config, j, real.zeta), p_s, config.p_t, real.x, real.z)
        g2[:, j - 1] = sidnr_hop2(
            hop2_coefficients(config, j, j, real.zeta), p_r, config.p_t, real.q[:, j - 1], real.w[:, j - 1]
        )

    fail1 = g1 < np.asarray(psi)
    fail2 = g2 < np.asarray(psi)
    if joint_sic and config.mode != OMA:
        joint = np.empty((count, B), dtype=bool)
        relay_prefix = np.logical_or.accumulate(fail1, axis=1)
        for b in range(1, B + 1):
            user_fail = fail2[:, b - 1].copy()
            for i in range(1, b):
                gi = sidnr_hop2(
                    hop2_coefficients(config, b, i, real.zeta), p_r, config.p_t, real.q[:, b - 1], real.w[:, b - 1]
                )
                user_fail |= gi < psi[i - 1]
            joint[:, b - 1] = relay_prefix[:, b - 1] | user_fail
    else:
        joint = fail1 | fail2
    return _Block(g1, g2, joint)


def run_trial(config: SystemConfig, rho: float | None, trial_id: int, seed: int = 0) -> TrialOutcome:
    """One trial, reproducible from (seed, trial_id) alone."""
    blk = simulate_block(config, rho, seed, trial_id, 1, joint_sic=True)
    psi = np.array([user_threshold(config, j) for j in range(1, config.num_users + 1)])
    outage = np.minimum(blk.gamma1[0], blk.gamma2[0]) < psi
    return TrialOutcome(
        outage=tuple(bool(o) for o in outage),
        gamma_hop1=tuple(float(g) for g in blk.gamma1[0]),
        gamma_hop2=tuple(float(g) for g in blk.gamma2[0]),
        joint_outage=tuple(bool(o) for o in blk.joint_fail[0]),
    )


def _chunks(trials: int, chunk: int = CHUNK) -> list[tuple[int, int]]:
    return [(s, min(chunk, trials - s)) for s in range(0, trials, chunk)]


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def ci_halfwidth(p: float, n: int) -> float:
    """3-sigma normal-approximation half width of a binomial proportion."""
    return 3.0 * math.sqrt(p * (1.0 - p) / n)


def estimate_outage(
    config: SystemConfig,
    rho: float | None,
    trials: int,
    seed: int = 0,
    *,
    workers: int | None = None,
    joint_sic: bool = False,
    with_analytic: bool = True,
) -> list[OutageResult]:
    """Empirical outage of every user at one operating point (index 0 is U_1)."""
    if trials < 1:
        raise ValueError("need at least one trial")
    ensure_valid(config)
    B = config.num_users
    psi = np.array([user_threshold(config, j) for j in range(1, B + 1)])

    def count(span: tuple[int, int]) -> np.ndarray:
        start, n = span
        blk = simulate_block(config, rho, seed, start, n, joint_sic=joint_sic)
        f1 = blk.gamma1 < psi
        f2 = blk.gamma2 < psi
        return np.stack([(f1 | f2).sum(0), f1.sum(0), f2.sum(0), blk.joint_fail.sum(0)]).astype(np.int64)

    parts = _map(count, _chunks(trials), workers or default_workers())
    totals = np.sum(parts, axis=0)
    _, _, snr = config.operating_point(rho)

    results = []
    for j in range(1, B + 1):
        p_hat = totals[0, j - 1] / trials
        results.append(
            OutageResult(
                user=j,
                rho=snr,
                empirical_op=float(p_hat),
                trials=trials,
                ci_halfwidth=ci_halfwidth(float(p_hat), trials),
                hop1_cdf=float(totals[1, j - 1] / trials),
                hop2_cdf=float(totals[2, j - 1] / trials),
                analytic_op=analytic.outage_probability(config, j, rho) if with_analytic else None,
                mode=JOINT_SIC if joint_sic else PER_LAYER,
                joint_sic_op=float(totals[3, j - 1] / trials) if joint_sic else None,
            )
        )
    return results


def empirical_cdf(
    config: SystemConfig,
    hop: int,
    user: int,
    rho: float | None,
    psi_grid,
    trials: int,
    seed: int = 0,
    *,
    workers: int | None = None,
) -> np.ndarray:
    """Fraction of trials with hop SIDNR below each grid point, from one shared sample set."""
    if hop not in (1, 2):
        raise ValueError(f"hop must be 1 or 2, got {hop!r}")
    ensure_valid(config)
    grid = np.asarray(psi_grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise ValueError("psi grid must be sorted ascending")

    def count(span: tuple[int, int]) -> np.ndarray:
        start, n = span
        blk = simulate_block(config, rho, seed, start, n)
        gamma = np.sort((blk.gamma1 if hop == 1 else blk.gamma2)[:, user - 1])
        return np.searchsorted(gamma, grid, side="left").astype(np.int64)

    parts = _map(count, _chunks(trials), workers or default_workers())
    return np.sum(parts, axis=0) / trials
