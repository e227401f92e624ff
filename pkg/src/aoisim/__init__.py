"""Frame-level simulator for freshness-aware downlink scheduling at an edge cache."""

from .model import SystemConfig, load_config, current_khat
from .simulator import MetricsReport, RunConfig, run
from .policies import build_policy

__version__ = "0.1.0"

__all__ = [
    "SystemConfig", "load_config", "current_khat",
    "MetricsReport", "RunConfig", "run", "build_policy",
    "__version__",
]
