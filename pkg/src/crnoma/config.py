"""System parameterization for the two-hop underlay CR-NOMA downlink.

All powers and noise variances are linear and noise-normalized. User indices
are 1-based throughout the package (U_1 is the strongest-PA, weakest user).
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

NOMA = "noma"
OMA = "oma"

_SUM_TOL = 1e-9

# fields holding one value per secondary user
_PER_USER = ("alpha", "beta", "hi_user", "noise_user", "d_rb", "d_tb", "rate_thresholds")

# config-file keys that may be given in dB (key + "_db")
_DB_FIELDS = ("pbar_s", "pbar_r", "p_t", "i_itc", "noise_relay")


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    if value == 0:
        return -math.inf
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class SystemConfig:
    """Complete parameter set of the network.

    ``sic_residue`` has one entry per cancelled layer (B - 1 entries): 0 is
    perfect SIC, 1 is no cancellation at all. ``csi_theta = 0`` means perfect
    CSI. ``i_itc`` may be ``math.inf`` (no interference constraint at D).
    """

    num_users: int = 2
    alpha: tuple[float, ...] = (0.8, 0.2)
    beta: tuple[float, ...] = (0.8, 0.2)
    sic_residue: tuple[float, ...] = (0.0,)
    hi_source: float = 0.0
    hi_user: tuple[float, ...] = (0.0, 0.0)
    hi_primary: float = 0.0
    csi_theta: float = 0.0
    csi_kappa: float = 0.0
    pbar_s: float = 100.0
    pbar_r: float = 100.0
    p_t: float = 0.0
    i_itc: float = math.inf
    noise_relay: float = 1.0
    noise_user: tuple[float, ...] = (1.0, 1.0)
    d_sr: float = 1.0
    d_sd: float = 3.0
    d_rd: float = 3.0
    d_tr: float = 3.0
    d_rb: tuple[float, ...] = (1.0, 1.0)
    d_tb: tuple[float, ...] = (3.0, 3.0)
    pathloss: float = 3.0
    rate_thresholds: tuple[float, ...] = (1.0, 1.5)
    mode: str = NOMA

    def __post_init__(self) -> None:
        # normalize list input (e.g. from JSON) to tuples so the config stays hashable
        for name in (*_PER_USER, "sic_residue"):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                object.__setattr__(self, name, tuple(float(v) for v in value))

    def replace(self, **changes: Any) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def at_snr(self, rho: float) -> "SystemConfig":
        """Config with P_S = P_R = rho (transmit SNR against unit noise)."""
        return self.replace(pbar_s=float(rho), pbar_r=float(rho))

    def operating_point(self, rho: float | None = None) -> tuple[float, float, float]:
        """(P_S max, P_R max, transmit SNR); ``rho`` overrides both maxima when given."""
        if rho is None:
            return self.pbar_s, self.pbar_r, self.pbar_s
        return float(rho), float(rho), float(rho)

    def with_impairments(
        self,
        phi: float | None = None,
        sic: float | None = None,
        theta: float | None = None,
        kappa: float | None = None,
    ) -> "SystemConfig":
        """Set every HI level / every SIC residue / the CSI-error law at once."""
        changes: dict[str, Any] = {}
        if phi is not None:
            changes.update(hi_source=phi, hi_primary=phi, hi_user=(phi,) * self.num_users)
        if sic is not None:
            changes["sic_residue"] = (sic,) * (self.num_users - 1)
        if theta is not None:
            changes["csi_theta"] = theta
        if kappa is not None:
            changes["csi_kappa"] = kappa
        return self.replace(**changes)

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        for name in (*_PER_USER, "sic_residue"):
            out[name] = list(out[name])
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SystemConfig":
        data = dict(data)
        for name in _DB_FIELDS:
            key = name + "_db"
            if key in data:
                if name in data:
                    raise ValueError(f"both {name!r} and {key!r} given")
                data[name] = db_to_linear(_as_float(data.pop(key)))
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config fields: {', '.join(unknown)}")
        for name in ("i_itc",):
            if name in data:
                data[name] = _as_float(data[name])
        return cls(**data)


def _as_float(value: Any) -> float:
    if isinstance(value, str):
        return float(value.strip().lower().replace("infinity", "inf"))
    return float(value)


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[tuple[str, str], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok

    def fields(self) -> set[str]:
        return {name for name, _ in self.errors}

    def __str__(self) -> str:
        if self.ok:
            return "pass"
        return "; ".join(f"{name}: {msg}" for name, msg in self.errors)


class ConfigError(ValueError):
    def __init__(self, report: ValidationReport):
        super().__init__(f"invalid SystemConfig: {report}")
        self.report = report


def _strictly_decreasing(values: tuple[float, ...]) -> bool:
    return all(a > b for a, b in zip(values, values[1:]))


def validate(config: SystemConfig) -> ValidationReport:
    errors: list[tuple[str, str]] = []

    def bad(name: str, msg: str) -> None:
        errors.append((name, msg))

    B = config.num_users
    if not isinstance(B, int) or B < 2:
        bad("num_users", "need at least 2 users")
        return ValidationReport(tuple(errors))

    for name in _PER_USER:
        if len(getattr(config, name)) != B:
            bad(name, f"expected {B} entries")
    if len(config.sic_residue) != B - 1:
        bad("sic_residue", f"expected {B - 1} entries (one per cancelled layer)")
    if errors:
        return ValidationReport(tuple(errors))

    for name in ("alpha", "beta"):
        pa = getattr(config, name)
        if abs(math.fsum(pa) - 1.0) > _SUM_TOL:
            bad(name, f"PA factors must sum to 1 (got {math.fsum(pa)!r})")
        if not _strictly_decreasing(pa):
            bad(name, "PA factors must be strictly decreasing")
        if pa[-1] <= 0:
            bad(name, "PA factors must be positive")

    if any(not 0.0 <= e <= 1.0 for e in config.sic_residue):
        bad("sic_residue", "residue factors must lie in [0, 1]")

    for name in ("hi_source", "hi_primary"):
        if not getattr(config, name) >= 0:
            bad(name, "HI level must be >= 0")
    if any(not p >= 0 for p in config.hi_user):
        bad("hi_user", "HI level must be >= 0")

    if not config.csi_theta >= 0:
        bad("csi_theta", "must be >= 0 (0 means perfect CSI)")
    if not config.csi_kappa >= 0:
        bad("csi_kappa", "must be >= 0")

    for name in ("pbar_s", "pbar_r", "p_t", "i_itc"):
        if not getattr(config, name) >= 0:
            bad(name, "power must be >= 0")
    for name in ("pbar_s", "pbar_r", "p_t"):
        if math.isinf(getattr(config, name)):
            bad(name, "power must be finite")

    if not config.noise_relay > 0 or math.isinf(config.noise_relay):
        bad("noise_relay", "noise variance must be positive and finite")
    if any(not n > 0 or math.isinf(n) for n in config.noise_user):
        bad("noise_user", "noise variance must be positive and finite")

    for name in ("d_sr", "d_sd", "d_rd", "d_tr"):
        d = getattr(config, name)
        if not d > 0 or math.isinf(d):
            bad(name, "distance must be positive and finite")
    for name in ("d_rb", "d_tb"):
        if any(not d > 0 or math.isinf(d) for d in getattr(config, name)):
            bad(name, "distance must be positive and finite")

    if not config.pathloss >= 2:
        bad("pathloss", "path-loss exponent must be >= 2")
    if any(not r >= 0 for r in config.rate_thresholds):
        bad("rate_thresholds", "rate thresholds must be >= 0")
    if config.mode not in (NOMA, OMA):
        bad("mode", f"mode must be {NOMA!r} or {OMA!r}")

    return ValidationReport(tuple(errors))


def ensure_valid(config: SystemConfig) -> SystemConfig:
    report = validate(config)
    if not report:
        raise ConfigError(report)
    return config


def effective_error_variance(theta: float, kappa: float, rho: float) -> float:
    """Channel-estimation error variance theta * rho**(-kappa)."""
    if not rho > 0:
        raise ValueError(f"transmit SNR must be positive, got {rho!r}")
    return theta * rho ** (-kappa)


# --- serialization --------------------------------------------------------


def dump_config(config: SystemConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n", encoding="utf-8")


def load_config(path: str | Path) -> SystemConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from exc
    data.pop("_comment", None)
    return ensure_valid(SystemConfig.from_dict(data))


# --- presets --------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    config: SystemConfig
    description: str = ""
    # series label -> keyword overrides applied on top of ``config``
    series: dict[str, dict[str, Any]] = field(default_factory=dict)


# Two users, alpha = beta = (0.8, 0.2), R = (1, 1.5) bit/s/Hz, d_SR = d_Rb = 1,
# every primary/ITC link at distance 3, tau = 3, P_S = P_R.
BASELINE = SystemConfig()

PRESETS: dict[str, ScenarioPreset] = {
    "baseline": ScenarioPreset(
        "baseline",
        BASELINE,
        "two-user reference network, ideal transceivers, no primary interference",
    ),
    "fig2": ScenarioPreset(
        "fig2",
        BASELINE.replace(i_itc=db_to_linear(20.0)),
        "NOMA vs OMA with I_ITC = 20 dB (and the unconstrained case), ideal HI/SIC/CSI",
        series={
            "itc20": {},
            "itc20_pt10": {"p_t": db_to_linear(10.0)},
            "itc20_pt25": {"p_t": db_to_linear(25.0)},
            "noitc": {"i_itc": math.inf},
            "noitc_pt10": {"i_itc": math.inf, "p_t": db_to_linear(10.0)},
            "noitc_pt25": {"i_itc": math.inf, "p_t": db_to_linear(25.0)},
            "oma_itc20": {"mode": OMA},
            "oma_noitc": {"mode": OMA, "i_itc": math.inf},
        },
    ),
    "fig3": ScenarioPreset(
        "fig3",
        BASELINE.replace(p_t=db_to_linear(10.0)),
        "HI and SIC imperfections, P_T = 10 dB, no ITC, perfect CSI",
        series={
            "perfect": {},
            "sic0.005": {"sic": 0.005},
            "sic0.03": {"sic": 0.03},
            "phi0.1": {"phi": 0.1},
            "phi0.15": {"phi": 0.15},
        },
    ),
    "fig4": ScenarioPreset(
        "fig4",
        BASELINE.replace(p_t=db_to_linear(10.0)),
        "CSI-error regimes, P_T = 10 dB, no ITC, ideal HI and SIC",
        series={
            "perfect": {},
            "theta0.001": {"theta": 0.001, "kappa": 0.0},
            "theta0.01": {"theta": 0.01, "kappa": 0.0},
            "theta0.1": {"theta": 0.1, "kappa": 0.0},
            "theta10_kappa1.5": {"theta": 10.0, "kappa": 1.5},
            "oma_perfect": {"mode": OMA},
            "oma_theta0.01": {"mode": OMA, "theta": 0.01, "kappa": 0.0},
        },
    ),
}


def apply_overrides(config: SystemConfig, overrides: dict[str, Any]) -> SystemConfig:
    """Apply series overrides; ``phi``/``sic``/``theta``/``kappa`` are shorthands."""
    overrides = dict(overrides)
    shorthand = {k: overrides.pop(k) for k in ("phi", "sic", "theta", "kappa") if k in overrides}
    if shorthand:
        config = config.with_impairments(**shorthand)
    return config.replace(**overrides) if overrides else config


def get_preset(name: str) -> ScenarioPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
