"""Link-level simulator for a synchronous DSSS W-CDMA downlink."""

from .config import SimulationConfig, load_config, parse_config
from .metrics import BerRecord, StoppingRule, run_point
from .modem import Scheme
from .sweep import run_sweep

__all__ = [
    "BerRecord",
    "Scheme",
    "SimulationConfig",
    "StoppingRule",
    "load_config",
    "parse_config",
    "run_point",
    "run_sweep",
]

__version__ = "0.1.0"
