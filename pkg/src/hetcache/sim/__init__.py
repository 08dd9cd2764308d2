"""Discrete-event simulator of the network."""

from .devices import DeviceCaches
from .empirical import Aggregate, aggregate, empirical_metrics
from .engine import SimStats, run_replication
from .policies import POLICIES, BoundedCache, apply_cache_policy, slot_cache
from .topology import Topology, draw_topology, poisson_disc

__all__ = [
    "Aggregate",
    "BoundedCache",
    "DeviceCaches",
    "POLICIES",
    "SimStats",
    "Topology",
    "aggregate",
    "apply_cache_policy",
    "draw_topology",
    "empirical_metrics",
    "poisson_disc",
    "run_replication",
    "slot_cache",
]
