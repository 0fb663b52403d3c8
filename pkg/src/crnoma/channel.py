"""Rayleigh block-fading draws with MMSE CSI-error split and the underlay power cap.

Randomness is counter based: one Philox key per seed, and trial ``t`` owns the
``W`` 64-bit words starting at word ``t * W`` (W depends on the user count). Any
trial range can therefore be regenerated in isolation, and the result of a run
does not depend on how trials are split across workers.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import SystemConfig, effective_error_variance

# floor on the estimated-channel variance when zeta -> 1
SIGMA2_FLOOR = 1e-6


def words_per_trial(num_users: int) -> int:
    """Uniforms reserved per trial: x, y, z, v, q_1..q_B, w_1..w_B, padded to a multiple of 4."""
    return -(-(4 + 2 * num_users) // 4) * 4


def _philox_key(seed: int) -> np.ndarray:
    return np.random.SeedSequence(int(seed)).generate_state(2, np.uint64)


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def generator(self, width: int = 8) -> np.random.Generator:
        """Generator positioned at the first word of this stream, streams being ``width`` words apart."""
        if width % 4:
            raise ValueError("stream width must be a multiple of 4")
        bg = np.random.Philox(key=_philox_key(self.seed))
        # Philox emits 4 words per counter step
        bg.advance(self.stream_id * (width // 4))
        return np.random.Generator(bg)


def trial_uniforms(seed: int, start: int, count: int, width: int) -> np.ndarray:
    """Uniforms in [0, 1) for trials ``start .. start+count-1``, shape (count, width)."""
    return RngStream(seed, start).generator(width).random((count, width))


def _exp_from_uniform(u: np.ndarray, mean: float) -> np.ndarray:
    # 1 - u lies in (0, 1], so the log is finite
    return -mean * np.log1p(-u)


def sample_power_gain(mean: float, stream: RngStream, size: int | None = None):
    """Exponential power gain |h|^2 of a CN(0, mean) coefficient."""
    if not mean > 0:
        raise ValueError(f"mean gain must be positive, got {mean!r}")
    u = stream.generator().random(size)
    out = _exp_from_uniform(np.asarray(u), mean)
    return float(out) if size is None else out


@dataclass(frozen=True)
class ChannelRealization:
    """Power gains for one or more trials.

    ``x`` (S-R) and ``q`` (R-U_b) are estimated-channel gains; ``y`` (S-D),
    ``z`` (T-R), ``v`` (R-D) and ``w`` (T-U_b) are total-channel gains.
    Scalars for a single trial; arrays of shape (n,) / (n, B) for a block.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    v: np.ndarray
    q: np.ndarray
    w: np.ndarray
    zeta: float
    sigma2_h: float
    clamped: bool = False

    def __len__(self) -> int:
        return int(np.size(self.x))


def estimation_variances(config: SystemConfig, rho: float) -> tuple[float, float, bool]:
    """(zeta, estimated-channel variance, clamped flag) at transmit SNR ``rho``."""
    zeta = effective_error_variance(config.csi_theta, config.csi_kappa, rho)
    sigma2_h = 1.0 - zeta
    clamped = sigma2_h < SIGMA2_FLOOR
    return zeta, max(sigma2_h, SIGMA2_FLOOR), clamped


def draw_block(config: SystemConfig, rho: float, seed: int, start: int, count: int) -> ChannelRealization:
    B = config.num_users
    zeta, sigma2_h, clamped = estimation_variances(config, rho)
    u = trial_uniforms(seed, start, count, words_per_trial(B))
    return ChannelRealization(
        x=_exp_from_uniform(u[:, 0], sigma2_h),
        y=_exp_from_uniform(u[:, 1], 1.0),
        z=_exp_from_uniform(u[:, 2], 1.0),
        v=_exp_from_uniform(u[:, 3], 1.0),
        q=_exp_from_uniform(u[:, 4:4 + B], sigma2_h),
        w=_exp_from_uniform(u[:, 4 + B:4 + 2 * B], 1.0),
        zeta=zeta,
        sigma2_h=sigma2_h,
        clamped=clamped,
    )


def draw_realization(config: SystemConfig, rho: float, stream: RngStream) -> ChannelRealization:
    """Single-trial realization; identical to row ``stream_id`` of any block containing it."""
    blk = draw_block(config, rho, stream.seed, stream.stream_id, 1)
    return ChannelRealization(
        x=float(blk.x[0]),
        y=float(blk.y[0]),
        z=float(blk.z[0]),
        v=float(blk.v[0]),
        q=blk.q[0].copy(),
        w=blk.w[0].copy(),
        zeta=blk.zeta,
        sigma2_h=blk.sigma2_h,
        clamped=blk.clamped,
    )


def secondary_transmit_power(pbar, i_itc: float, gain_to_d, d_to_d: float, tau: float):
    """Underlay power: min(pbar, I_ITC * d^tau / |h_jD|^2); pbar when the gain is 0."""
    gain = np.asarray(gain_to_d, dtype=float)
    if math.isinf(i_itc):
        out = np.full(gain.shape, float(pbar))
    else:
        budget = i_itc * d_to_d ** tau
        safe = np.where(gain > 0, gain, 1.0)
        with np.errstate(over="ignore"):
            out = np.where(gain > 0, np.minimum(pbar, budget / safe), float(pbar))
    return float(out) if out.ndim == 0 else out


def dump_realizations(config: SystemConfig, rho: float, seed: int, count: int, path: str | Path) -> None:
    """Debug dump: one CSV row per trial."""
    blk = draw_block(config, rho, seed, 0, count)
    B = config.num_users
    header = ["trial", "x", "y", "z", "v"] + [f"q{b}" for b in range(1, B + 1)] + [f"w{b}" for b in range(1, B + 1)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t in range(count):
            writer.writerow(
                [t] + [repr(float(g)) for g in (blk.x[t], blk.y[t], blk.z[t], blk.v[t], *blk.q[t], *blk.w[t])]
            )
