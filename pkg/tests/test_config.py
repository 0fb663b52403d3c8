import json
import math

import pytest

from crnoma.config import (
    BASELINE,
    PRESETS,
    ConfigError,
    SystemConfig,
    apply_overrides,
    dump_config,
    effective_error_variance,
    ensure_valid,
    load_config,
    validate,
)


def test_baseline_preset_validates():
    report = validate(BASELINE)
    assert report.ok
    assert str(report) == "pass"


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_every_preset_and_series_validates(name):
    preset = PRESETS[name]
    assert validate(preset.config).ok
    for overrides in preset.series.values():
        assert validate(apply_overrides(preset.config, overrides)).ok


def test_equal_pa_factors_violate_ordering():
    report = validate(BASELINE.replace(alpha=(0.5, 0.5)))
    assert not report.ok
    assert report.fields() == {"alpha"}
    assert "decreasing" in str(report)


def test_pa_sum_must_be_one():
    report = validate(BASELINE.replace(alpha=(0.8, 0.3)))
    assert not report.ok
    assert "sum to 1" in str(report)


@pytest.mark.parametrize(
    "changes, field",
    [
        ({"hi_source": -0.1}, "hi_source"),
        ({"d_sd": 0.0}, "d_sd"),
        ({"pathloss": 1.5}, "pathloss"),
        ({"sic_residue": (1.5,)}, "sic_residue"),
        ({"sic_residue": (0.0, 0.0)}, "sic_residue"),
        ({"csi_kappa": -1.0}, "csi_kappa"),
        ({"p_t": -1.0}, "p_t"),
        ({"mode": "fdma"}, "mode"),
        ({"num_users": 1}, "num_users"),
        ({"beta": (0.2, 0.8)}, "beta"),
    ],
)
def test_invariant_violations_name_the_field(changes, field):
    report = validate(BASELINE.replace(**changes))
    assert field in report.fields()


def test_ensure_valid_raises_with_report():
    with pytest.raises(ConfigError) as info:
        ensure_valid(BASELINE.replace(alpha=(0.5, 0.5)))
    assert "alpha" in info.value.report.fields()


def test_three_user_config():
    cfg = SystemConfig(
        num_users=3,
        alpha=(0.6, 0.3, 0.1),
        beta=(0.6, 0.3, 0.1),
        sic_residue=(0.01, 0.02),
        hi_user=(0.0, 0.0, 0.0),
        noise_user=(1.0, 1.0, 1.0),
        d_rb=(1.0, 1.0, 1.0),
        d_tb=(3.0, 3.0, 3.0),
        rate_thresholds=(0.5, 0.5, 0.5),
    )
    assert validate(cfg).ok


@pytest.mark.parametrize(
    "theta, kappa, rho, expected",
    [(0.01, 0.0, 1000.0, 0.01), (10.0, 1.5, 1e4, 1e-5), (0.001, 0.0, 10.0, 0.001)],
)
def test_effective_error_variance(theta, kappa, rho, expected):
    assert effective_error_variance(theta, kappa, rho) == pytest.approx(expected, rel=1e-12)


def test_error_variance_rejects_nonpositive_snr():
    with pytest.raises(ValueError):
        effective_error_variance(0.1, 1.0, 0.0)


def test_error_variance_monotone():
    rhos = [10 ** (k / 4) for k in range(-4, 24)]
    falling = [effective_error_variance(2.0, 1.2, r) for r in rhos]
    assert all(a >= b for a, b in zip(falling, falling[1:]))
    flat = {effective_error_variance(0.3, 0.0, r) for r in rhos}
    assert flat == {0.3}


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_round_trip_is_bit_exact(tmp_path, name):
    cfg = PRESETS[name].config.with_impairments(phi=0.1 / 3, sic=1 / 7, theta=math.pi / 100, kappa=1.5)
    path = tmp_path / "cfg.json"
    dump_config(cfg, path)
    assert load_config(path) == cfg


def test_db_fields_are_converted(tmp_path):
    data = BASELINE.to_dict()
    for key in ("pbar_s", "p_t", "i_itc"):
        del data[key]
    data.update(pbar_s_db=20.0, p_t_db=10.0, i_itc_db="inf")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    cfg = load_config(path)
    assert cfg.pbar_s == pytest.approx(100.0)
    assert cfg.p_t == pytest.approx(10.0)
    assert math.isinf(cfg.i_itc)


def test_unknown_field_rejected():
    with pytest.raises(ValueError, match="unknown"):
        SystemConfig.from_dict({"alpah": [0.8, 0.2]})


def test_config_is_immutable_and_hashable():
    with pytest.raises(Exception):
        BASELINE.alpha = (0.7, 0.3)
    assert hash(BASELINE) == hash(SystemConfig())
