"""Outage analysis of cooperative underlay CR-NOMA with hardware, CSI and SIC impairments."""
from .analytic import outage_probability
from .config import BASELINE, PRESETS, SystemConfig, validate
from .montecarlo import estimate_outage

__version__ = "0.1.0"

__all__ = ["BASELINE", "PRESETS", "SystemConfig", "estimate_outage", "outage_probability", "validate"]
