"""Interference/distortion coefficients and instantaneous SIDNRs of both hops."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import OMA, SystemConfig


@dataclass(frozen=True)
class HopCoefficients:
    """Constants of one SIDNR ``weight*P*g / (a_lin*P*g + c_lin*P + d_int*P_T*g_T + dist_factor*noise)``.

    ``a_lin`` is omega + omega_tilde + phi^2. ``d_int`` already carries the
    primary-link path loss, so it multiplies the raw primary power P_T.
    """

    weight: float
    a_lin: float
    c_lin: float
    d_int: float
    omega: float
    omega_tilde: float
    noise: float
    dist_factor: float

    @property
    def ceiling(self) -> float:
        """Supremum of the SIDNR; any threshold at or above it is never met."""
        return self.weight / self.a_lin if self.a_lin > 0 else math.inf


def _check_index(j: int, B: int, what: str = "user index") -> None:
    if not 1 <= j <= B:
        raise IndexError(f"{what} {j} outside 1..{B}")


def _layer_sums(pa: tuple[float, ...], residue: tuple[float, ...], j: int) -> tuple[float, float]:
    # uncancelled weaker layers j+1..B, and imperfectly cancelled stronger layers 1..j-1
    omega = math.fsum(pa[j:])
    omega_tilde = math.fsum(e * a for e, a in zip(residue[: j - 1], pa[: j - 1]))
    return omega, omega_tilde


def hop1_coefficients(config: SystemConfig, j: int, zeta_sr: float) -> HopCoefficients:
    """Coefficients for the relay decoding layer ``j`` (j = B gives the last-layer form)."""
    _check_index(j, config.num_users)
    tau = config.pathloss
    phi2 = config.hi_source ** 2
    if config.mode == OMA:
        weight, omega, omega_tilde = 1.0, 0.0, 0.0
    else:
        weight = config.alpha[j - 1]
        omega, omega_tilde = _layer_sums(config.alpha, config.sic_residue, j)
    return HopCoefficients(
        weight=weight,
        a_lin=omega + omega_tilde + phi2,
        c_lin=zeta_sr + zeta_sr * phi2,
        d_int=config.d_sr ** tau * config.d_tr ** (-tau) * (1.0 + config.hi_primary ** 2),
        omega=omega,
        omega_tilde=omega_tilde,
        noise=config.noise_relay,
        dist_factor=config.d_sr ** tau,
    )


def hop2_coefficients(config: SystemConfig, b: int, j: int, zeta_b: float) -> HopCoefficients:
    """Coefficients for user ``b`` decoding layer ``j`` (j <= b).

    The uncancelled-layer sum runs over n = j+1..B, not j+1..b: every user
    receives the whole superposition, so for b = 1 the weaker layers still
    interfere.
    """
    B = config.num_users
    _check_index(b, B, "receiver index")
    _check_index(j, b, "layer index")
    tau = config.pathloss
    phi2 = config.hi_user[b - 1] ** 2
    if config.mode == OMA:
        weight, omega, omega_tilde = 1.0, 0.0, 0.0
    else:
        weight = config.beta[j - 1]
        omega, omega_tilde = _layer_sums(config.beta, config.sic_residue, j)
    d_rb = config.d_rb[b - 1]
    return HopCoefficients(
        weight=weight,
        a_lin=omega + omega_tilde + phi2,
        c_lin=zeta_b + zeta_b * phi2,
        d_int=d_rb ** tau * config.d_tb[b - 1] ** (-tau) * (1.0 + config.hi_primary ** 2),
        omega=omega,
        omega_tilde=omega_tilde,
        noise=config.noise_user[b - 1],
        dist_factor=d_rb ** tau,
    )


def _sidnr(coeffs: HopCoefficients, p, p_t: float, gain, gain_t):
    p = np.asarray(p, dtype=float)
    gain = np.asarray(gain, dtype=float)
    signal = p * gain
    denom = (
        coeffs.a_lin * signal
        + coeffs.c_lin * p
        + coeffs.d_int * p_t * np.asarray(gain_t, dtype=float)
        + coeffs.dist_factor * coeffs.noise
    )
    num = coeffs.weight * signal
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(num > 0, num / np.where(denom > 0, denom, 1.0), 0.0)
    out = np.where((num > 0) & (denom <= 0), np.inf, out)
    return float(out) if out.ndim == 0 else out


def sidnr_hop1(coeffs: HopCoefficients, p_s, p_t: float, x, z):
    """SIDNR at the relay. ``x`` = |h_SR|^2 (estimated), ``z`` = |h_TR|^2."""
    return _sidnr(coeffs, p_s, p_t, x, z)


def sidnr_hop2(coeffs: HopCoefficients, p_r, p_t: float, q_b, w_b):
    """SIDNR at user b. ``q_b`` = |h_Rb|^2 (estimated), ``w_b`` = |h_Tb|^2."""
    return _sidnr(coeffs, p_r, p_t, q_b, w_b)


def achievable_rate(gamma_hop1, gamma_hop2):
    """Dual-hop DF rate in bit/s/Hz, with the half-duplex pre-log 1/2."""
    return 0.5 * np.log2(1.0 + np.minimum(gamma_hop1, gamma_hop2))


def threshold_psi(rate: float) -> float:
    """SIDNR threshold 2^(2R) - 1 for a two-slot rate target."""
    if rate < 0:
        raise ValueError("rate threshold must be >= 0")
    return 2.0 ** (2.0 * rate) - 1.0


def oma_threshold(num_users: int, rate: float) -> float:
    # 2B slots per frame, so each user needs B times the NOMA rate under a 1/2 pre-log
    return 2.0 ** (2.0 * num_users * rate) - 1.0


def user_threshold(config: SystemConfig, j: int) -> float:
    rate = config.rate_thresholds[j - 1]
    if config.mode == OMA:
        return oma_threshold(config.num_users, rate)
    return threshold_psi(rate)


def oma_sidnr_and_threshold(config: SystemConfig, j: int, realization, powers) -> tuple:
    """End-to-end OMA SIDNR of user ``j`` and its threshold.

    ``powers`` is (P_S, P_R). The user gets full power, there is no
    inter-user interference, and HI/CSI/primary terms stay in place.
    """
    oma = config.replace(mode=OMA)
    p_s, p_r = powers
    zeta = realization.zeta
    g1 = sidnr_hop1(hop1_coefficients(oma, j, zeta), p_s, oma.p_t, realization.x, realization.z)
    q = np.asarray(realization.q)[..., j - 1]
    w = np.asarray(realization.w)[..., j - 1]
    g2 = sidnr_hop2(hop2_coefficients(oma, j, j, zeta), p_r, oma.p_t, q, w)
    return np.minimum(g1, g2), oma_threshold(config.num_users, config.rate_thresholds[j - 1])
