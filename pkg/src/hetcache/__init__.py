"""Analytical and simulated performance of a cached satellite-terrestrial network."""

from .content import ContentCatalog, SizeDistribution, zipf_popularity
from .exceptions import (
    ConfigParseError,
    EmptyWindow,
    HetCacheError,
    NotIrreducible,
    SolverDiverged,
    ValidationError,
    ZeroGoodput,
)
from .metrics import METRIC_COLUMNS, MetricsReport
from .model import NetworkAnalyzer, NetworkSimulator, analyze
from .params import SystemParams, load_config

__all__ = [
    "ConfigParseError",
    "ContentCatalog",
    "EmptyWindow",
    "HetCacheError",
    "METRIC_COLUMNS",
    "MetricsReport",
    "NetworkAnalyzer",
    "NetworkSimulator",
    "NotIrreducible",
    "SizeDistribution",
    "SolverDiverged",
    "SystemParams",
    "ValidationError",
    "ZeroGoodput",
    "analyze",
    "load_config",
    "zipf_popularity",
]
