"""Parameter sweeps over a scenario, with CSV and plot-script output."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import analytic
from .channel import estimation_variances
from .config import (
    SystemConfig,
    apply_overrides,
    db_to_linear,
    ensure_valid,
    get_preset,
    load_config,
)
from .montecarlo import default_workers, estimate_outage

AXES = ("transmit_snr_db", "p_t_db", "i_itc_db", "phi", "epsilon", "theta", "kappa")
MODES = ("analytic", "montecarlo", "both")
CSV_HEADER = ["axis", "user", "mode", "op", "ci", "flags"]
MIN_MC_TRIALS = 1000


@dataclass(frozen=True)
class SweepSpec:
    base: str = "baseline"
    axis: str = "transmit_snr_db"
    values: tuple[float, ...] = ()
    modes: str = "analytic"
    trials: int = 1_000_000
    seed: int = 0
    out: str | None = None
    snr_db: float = 30.0
    series: tuple[str, ...] | None = None
    joint_sic: bool = False

    def validate(self) -> None:
        if self.axis not in AXES:
            raise ValueError(f"invalid axis {self.axis!r}; choose from {', '.join(AXES)}")
        if not self.values:
            raise ValueError("sweep axis has no values")
        if any(math.isnan(v) for v in self.values):
            raise ValueError("sweep values must be numbers")
        if self.axis not in ("i_itc_db", "p_t_db") and any(math.isinf(v) for v in self.values):
            raise ValueError(f"axis {self.axis!r} needs finite values")
        if self.modes not in MODES:
            raise ValueError(f"invalid mode {self.modes!r}; choose from {', '.join(MODES)}")
        if self.modes != "analytic" and self.trials < MIN_MC_TRIALS:
            raise ValueError(f"Monte Carlo needs at least {MIN_MC_TRIALS} trials")


@dataclass(frozen=True)
class Row:
    axis: float
    user: int
    mode: str
    op: float
    ci: float | None = None
    flags: tuple[str, ...] = field(default_factory=tuple)

    @property
    def series(self) -> str:
        for flag in self.flags:
            if flag.startswith("series="):
                return flag[len("series="):]
        return ""


def apply_axis(config: SystemConfig, axis: str, value: float, snr_db: float) -> tuple[SystemConfig, float]:
    """Config and linear transmit SNR at one sweep point."""
    rho = db_to_linear(snr_db)
    if axis == "transmit_snr_db":
        rho = db_to_linear(value)
    elif axis == "p_t_db":
        config = config.replace(p_t=db_to_linear(value))
    elif axis == "i_itc_db":
        config = config.replace(i_itc=db_to_linear(value))
    elif axis == "phi":
        config = config.with_impairments(phi=value)
    elif axis == "epsilon":
        config = config.with_impairments(sic=value)
    elif axis == "theta":
        config = config.with_impairments(theta=value)
    elif axis == "kappa":
        config = config.with_impairments(kappa=value)
    else:
        raise ValueError(f"invalid axis {axis!r}")
    return config, rho


def _resolve_base(spec: SweepSpec) -> list[tuple[str, SystemConfig]]:
    path = Path(spec.base)
    if path.suffix == ".json" or path.exists():
        if spec.series:
            raise ValueError("series selection needs a preset, not a config file")
        return [("", load_config(path))]
    preset = get_preset(spec.base)
    if not preset.series:
        return [("", preset.config)]
    labels = spec.series or tuple(preset.series)
    unknown = [s for s in labels if s not in preset.series]
    if unknown:
        raise ValueError(f"unknown series for {preset.name}: {', '.join(unknown)}")
    return [(s, ensure_valid(apply_overrides(preset.config, preset.series[s]))) for s in labels]


def _evaluate_point(spec: SweepSpec, label: str, config: SystemConfig, value: float, workers: int) -> list[Row]:
    config, rho = apply_axis(config, spec.axis, value, spec.snr_db)
    ensure_valid(config)
    base_flags = (f"series={label}",) if label else ()
    _, _, clamped = estimation_variances(config, rho)
    if clamped:
        base_flags += ("clamped",)
    rows: list[Row] = []
    mc = None
    if spec.modes in ("montecarlo", "both"):
        mc = estimate_outage(
            config, rho, spec.trials, spec.seed, workers=workers, joint_sic=spec.joint_sic, with_analytic=False
        )
    for j in range(1, config.num_users + 1):
        if spec.modes in ("analytic", "both"):
            flags = base_flags + (("boundary",) if analytic.is_boundary(config, j, rho) else ())
            rows.append(Row(value, j, "analytic", analytic.outage_probability(config, j, rho), None, flags))
        if mc is not None:
            res = mc[j - 1]
            rows.append(Row(value, j, "montecarlo", res.empirical_op, res.ci_halfwidth, base_flags))
            if spec.joint_sic:
                rows.append(Row(value, j, "montecarlo-joint", res.joint_sic_op, None, base_flags))
    return rows


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[Row]:
    """Rows ordered by series, then axis value, then user, then mode."""
    spec.validate()
    bases = _resolve_base(spec)
    points = [(label, cfg, v) for label, cfg in bases for v in spec.values]
    workers = workers or default_workers()
    if workers <= 1 or len(points) == 1:
        chunks = [_evaluate_point(spec, label, cfg, v, workers) for label, cfg, v in points]
    else:
        # one point per worker; each point's own trials run serially
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda p: _evaluate_point(spec, p[0], p[1], p[2], 1), points))
    return [row for chunk in chunks for row in chunk]


# --- output -----------------------------------------------------------------


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def rows_to_csv(rows: list[Row]) -> str:
    if not rows:
        raise ValueError("nothing to write: empty result table")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([_fmt(r.axis), r.user, r.mode, _fmt(r.op), _fmt(r.ci), ";".join(r.flags)])
    return buf.getvalue()


def emit_csv(rows: list[Row], path: str | Path) -> None:
    text = rows_to_csv(rows)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc.strerror or exc}") from exc


def read_csv(path: str | Path) -> list[Row]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            Row(
                axis=float(rec["axis"]),
                user=int(rec["user"]),
                mode=rec["mode"],
                op=float(rec["op"]),
                ci=float(rec["ci"]) if rec["ci"] else None,
                flags=tuple(f for f in rec["flags"].split(";") if f),
            )
            for rec in reader
        ]


def series_of(rows: list[Row]) -> dict[str, list[tuple[float, float]]]:
    """Curves keyed '<series> U<j> <mode>' in first-seen order."""
    curves: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        key = " ".join(p for p in (r.series, f"U{r.user}", r.mode) if p)
        curves.setdefault(key, []).append((r.axis, r.op))
    return curves


_PLOT_TEMPLATE = '''"""Outage probability curves; run with python to produce {png}."""
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

AXIS_LABEL = {axis!r}
CURVES = {curves}

fig, ax = plt.subplots(figsize=(7, 5))
for name, points in CURVES.items():
    xs = [p[0] for p in points]
    ys = [max(p[1], 1e-6) for p in points]
    style = "o" if "montecarlo" in name else "-"
    ax.semilogy(xs, ys, style, label=name)
ax.set_xlabel(AXIS_LABEL)
ax.set_ylabel("outage probability")
ax.set_ylim(1e-4, 1.5)
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize=7)
fig.savefig(os.path.join(os.path.dirname(os.path.abspath(__file__)), {png!r}), dpi=150, bbox_inches="tight")
'''


def emit_plot_script(rows: list[Row], path: str | Path, axis: str = "transmit_snr_db") -> None:
    if not rows:
        raise ValueError("nothing to plot: empty result table")
    path = Path(path)
    curves = series_of(rows)
    body = "{\n" + "".join(f"    {k!r}: {v!r},\n" for k, v in curves.items()) + "}"
    text = _PLOT_TEMPLATE.format(axis=axis, curves=body, png=path.with_suffix(".png").name)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write plot script to {path}: {exc.strerror or exc}") from exc
