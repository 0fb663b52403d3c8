"""Closed-form per-hop SIDNR CDFs and end-to-end outage probability.

Each hop SIDNR has the form ``w*P*G / (A*P*G + C*P + D*P_T*G_T + d*s2)`` where
P = min(Pbar, I_ITC * d_jD^tau / G_D). Its CDF splits on whether the power cap
binds (G_D > Lambda = I_ITC d_jD^tau / Pbar):

    Delta   = P[G < G_T*K_d + M_d + L,       G_D < Lambda]
    Upsilon = P[G < G_T*G_D*K_u + G_D*M_u + L, G_D > Lambda]

with G ~ Exp(lam_gain), G_D ~ Exp(lam_itc_link), G_T ~ Exp(lam_interf). The same
machinery covers the relay hop (X, Y, Z) and the user hop (Q, V, W); for the
second hop Delta/Upsilon are the Theta/Phi terms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import estimation_variances
from .config import SystemConfig, ensure_valid
from .sidnr import HopCoefficients, hop1_coefficients, hop2_coefficients, threshold_psi, user_threshold
from .special import exp_times_Ei

# psi this close (relative) to the SIDNR ceiling counts as beyond it
BOUNDARY_RTOL = 1e-12


@dataclass(frozen=True)
class AnalyticCoefficients:
    """Branch constants of one hop CDF at one threshold.

    ``k_delta, m_delta`` belong to the uncapped branch (power = Pbar);
    ``k_upsilon, m_upsilon`` to the ITC-capped branch; ``lam_itc`` is the
    branch split Lambda; ``mu``, ``xi`` feed the Ei term.
    """

    psi: float
    valid: bool
    k_delta: float = 0.0
    m_delta: float = 0.0
    k_upsilon: float = 0.0
    m_upsilon: float = 0.0
    l: float = 0.0
    lam_itc: float = math.inf
    lam_gain: float = 1.0
    lam_itc_link: float = 1.0
    lam_interf: float = 1.0

    @property
    def mu(self) -> float:
        return self.lam_interf + self.lam_gain * self.lam_itc * self.k_upsilon

    @property
    def xi(self) -> float:
        return self.m_upsilon / self.k_upsilon + self.lam_itc_link / (self.lam_gain * self.k_upsilon)


def build_coefficients(
    coeffs: HopCoefficients,
    psi: float,
    pbar: float,
    p_t: float,
    i_itc: float,
    d_to_d: float,
    tau: float,
    lam_gain: float = 1.0,
    lam_itc_link: float = 1.0,
    lam_interf: float = 1.0,
) -> AnalyticCoefficients:
    rates = dict(lam_gain=lam_gain, lam_itc_link=lam_itc_link, lam_interf=lam_interf)
    margin = coeffs.weight - coeffs.a_lin * psi
    if psi >= coeffs.ceiling * (1.0 - BOUNDARY_RTOL) or margin <= 0:
        return AnalyticCoefficients(psi=psi, valid=False, **rates)

    interf = coeffs.d_int * p_t * psi / margin
    noise = coeffs.dist_factor * coeffs.noise * psi / margin
    budget = i_itc * d_to_d ** tau

    def per_power(power: float) -> tuple[float, float]:
        if power == 0:
            return math.inf, math.inf
        if math.isinf(power):
            return 0.0, 0.0
        return interf / power, noise / power

    k_d, m_d = per_power(pbar)
    k_u, m_u = per_power(budget)
    if pbar == 0:
        lam = math.inf
    else:
        lam = budget / pbar
    return AnalyticCoefficients(
        psi=psi,
        valid=True,
        k_delta=k_d,
        m_delta=m_d,
        k_upsilon=k_u,
        m_upsilon=m_u,
        l=coeffs.c_lin * psi / margin,
        lam_itc=lam,
        **rates,
    )


def _uncapped_success(ac: AnalyticCoefficients) -> float:
    # P[G >= G_T*K + M + L] with G_T integrated out
    if math.isinf(ac.k_delta) or math.isinf(ac.m_delta):
        return 0.0
    return ac.lam_interf * math.exp(-ac.lam_gain * (ac.m_delta + ac.l)) / (ac.lam_interf + ac.lam_gain * ac.k_delta)


def _ei_term(ac: AnalyticCoefficients) -> float:
    """Second line of the closed form: the (negative) Ei contribution of the capped branch."""
    lam = ac.lam_itc
    if math.isinf(lam):
        return 0.0
    if math.isinf(ac.k_upsilon) or math.isinf(ac.m_upsilon):
        # zero power budget: the capped branch never succeeds
        return 0.0
    lx, ly, lz = ac.lam_gain, ac.lam_itc_link, ac.lam_interf
    expo = -lam * (ly + lx * ac.m_upsilon) - lx * ac.l
    if ac.k_upsilon == 0:
        # no primary interference: the z-integral is trivial
        return -ly * math.exp(expo) / (ly + lx * ac.m_upsilon)
    return ly * lz / (lx * ac.k_upsilon) * math.exp(expo) * exp_times_Ei(ac.mu * ac.xi)


def appendix_terms(ac: AnalyticCoefficients, branch: str) -> float:
    """Delta/Theta (uncapped branch) or Upsilon/Phi (capped branch) probability."""
    branch = branch.lower()
    if not ac.valid:
        # beyond the ceiling every realization is an outage; split by branch probability
        p_uncapped = -math.expm1(-ac.lam_itc_link * ac.lam_itc) if not math.isinf(ac.lam_itc) else 1.0
        return p_uncapped if branch in ("delta", "theta") else 1.0 - p_uncapped
    if branch in ("delta", "theta"):
        if math.isinf(ac.lam_itc):
            p_uncapped = 1.0
        else:
            p_uncapped = -math.expm1(-ac.lam_itc_link * ac.lam_itc)
        return p_uncapped * (1.0 - _uncapped_success(ac))
    if branch in ("upsilon", "phi"):
        if math.isinf(ac.lam_itc):
            return 0.0
        return math.exp(-ac.lam_itc_link * ac.lam_itc) + _ei_term(ac)
    raise ValueError(f"unknown branch {branch!r}")


def hop_cdf(ac: AnalyticCoefficients) -> float:
    """Closed-form P[SIDNR < psi]."""
    if not ac.valid:
        return 1.0
    if ac.psi <= 0:
        return 0.0
    if math.isinf(ac.lam_itc):
        p_uncapped = 1.0
    else:
        p_uncapped = -math.expm1(-ac.lam_itc_link * ac.lam_itc)
    f = 1.0 - _uncapped_success(ac) * p_uncapped + _ei_term(ac)
    return min(1.0, max(0.0, f))


# --- config-level evaluators ------------------------------------------------


def _hop1_analytic(config: SystemConfig, j: int, rho: float | None, psi: float | None) -> AnalyticCoefficients:
    pbar_s, _, snr = config.operating_point(rho)
    zeta, sigma2_h, _ = estimation_variances(config, snr)
    if psi is None:
        psi = user_threshold(config, j)
    return build_coefficients(
        hop1_coefficients(config, j, zeta),
        psi,
        pbar_s,
        config.p_t,
        config.i_itc,
        config.d_sd,
        config.pathloss,
        lam_gain=1.0 / sigma2_h,
    )


def _hop2_analytic(config: SystemConfig, b: int, j: int, rho: float | None, psi: float | None) -> AnalyticCoefficients:
    _, pbar_r, snr = config.operating_point(rho)
    zeta, sigma2_h, _ = estimation_variances(config, snr)
    if psi is None:
        psi = user_threshold(config, j)
    return build_coefficients(
        hop2_coefficients(config, b, j, zeta),
        psi,
        pbar_r,
        config.p_t,
        config.i_itc,
        config.d_rd,
        config.pathloss,
        lam_gain=1.0 / sigma2_h,
    )


def analytic_coefficients(
    config: SystemConfig, hop: int, j: int, rho: float | None = None, psi: float | None = None, b: int | None = None
) -> AnalyticCoefficients:
    """Coefficients for hop 1 (relay decodes layer j) or hop 2 (user b, default j, decodes layer j)."""
    ensure_valid(config)
    if hop == 1:
        return _hop1_analytic(config, j, rho, psi)
    if hop == 2:
        return _hop2_analytic(config, j if b is None else b, j, rho, psi)
    raise ValueError(f"hop must be 1 or 2, got {hop!r}")


def cdf_gamma_R_j(config: SystemConfig, j: int, rho: float | None = None, psi: float | None = None) -> float:
    return hop_cdf(analytic_coefficients(config, 1, j, rho, psi))


def cdf_gamma_b_j(config: SystemConfig, b: int, j: int, rho: float | None = None, psi: float | None = None) -> float:
    return hop_cdf(analytic_coefficients(config, 2, j, rho, psi, b=b))


def cdf_gamma_R_B(config: SystemConfig, rho: float | None = None, psi: float | None = None) -> float:
    return cdf_gamma_R_j(config, config.num_users, rho, psi)


def cdf_gamma_B(config: SystemConfig, rho: float | None = None, psi: float | None = None) -> float:
    B = config.num_users
    return cdf_gamma_b_j(config, B, B, rho, psi)


def compose_outage(f_hop1: float, f_hop2: float) -> float:
    """Dual-hop outage from independent hop CDFs: F1 + F2 - F1*F2."""
    return f_hop1 + f_hop2 - f_hop1 * f_hop2


def hop_cdfs(config: SystemConfig, j: int, rho: float | None = None) -> tuple[float, float]:
    """(relay CDF, user CDF) at user j's threshold; the second hop is U_j decoding its own layer."""
    return cdf_gamma_R_j(config, j, rho), cdf_gamma_b_j(config, j, j, rho)


def is_boundary(config: SystemConfig, j: int, rho: float | None = None) -> bool:
    """True when user j's threshold is at or above a hop's SIDNR ceiling (outage certain)."""
    return not (
        analytic_coefficients(config, 1, j, rho).valid and analytic_coefficients(config, 2, j, rho).valid
    )


def outage_probability(config: SystemConfig, j: int, rho: float | None = None) -> float:
    f1, f2 = hop_cdfs(config, j, rho)
    return compose_outage(f1, f2)


def max_tolerable_sic(pa: tuple[float, float], phi: float, psi: float) -> float:
    """Largest SIC residue that keeps user 2's threshold below its ceiling."""
    strong, weak = pa
    return max(0.0, (weak - phi ** 2) / (strong * psi))


__all__ = [
    "AnalyticCoefficients",
    "analytic_coefficients",
    "appendix_terms",
    "build_coefficients",
    "cdf_gamma_B",
    "cdf_gamma_R_B",
    "cdf_gamma_R_j",
    "cdf_gamma_b_j",
    "compose_outage",
    "hop_cdf",
    "hop_cdfs",
    "is_boundary",
    "max_tolerable_sic",
    "outage_probability",
    "threshold_psi",
]
