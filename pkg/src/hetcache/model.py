"""Estimator-style front end of the analytical model.

``NetworkAnalyzer`` follows the scikit-learn estimator conventions:
configuration lives in constructor parameters, ``fit`` does the work and
fitted results are stored in trailing-underscore attributes.  Nested keys of
the ``params`` object are addressable as ``params__<key>`` so that
``set_params``/``clone``/``ParameterGrid`` drive parameter sweeps.
"""

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import metrics
from .caching import availability_profile
from .links import service_rates
from .params import SystemParams, coerce_value
from .ractmc import build_generator
from .sim import aggregate, empirical_metrics, run_replication
from .sim.policies import check_policy
from .solver import solve_on_reachable


class NestedParamsMixin:
    """get_params/set_params that expose SystemParams fields as ``params__key``."""

    def get_params(self, deep=True):
        out = super().get_params(deep=False)
        if deep and out.get("params") is not None:
            for key, value in out["params"].to_dict().items():
                out[f"params__{key}"] = value
        return out

    def set_params(self, **kwargs):
        nested = {}
        for key in list(kwargs):
            if key.startswith("params__"):
                name = key[len("params__"):]
                nested[name] = coerce_value(name, kwargs.pop(key))
        if kwargs:
            super().set_params(**kwargs)
        if nested:
            base = self.params if self.params is not None else SystemParams()
            self.params = base.replace(**nested)
        return self


class NetworkAnalyzer(NestedParamsMixin, BaseEstimator):
    """Solve the cache chains and the channel CTMC and evaluate all metrics.

    Parameters
    ----------
    params : SystemParams, optional
        Network configuration; table defaults when omitted.

    Attributes
    ----------
    catalog_, availability_, rates_ : fitted inputs of the channel chain
    model_ : RAModel
    stationary_ : StationaryDistribution over ``model_.states``
    report_ : MetricsReport
    """

    def __init__(self, params=None):
        self.params = params

    def _resolved(self):
        return self.params if self.params is not None else SystemParams()

    def fit(self, X=None, y=None):
        p = self._resolved()
        p.validate()
        catalog = p.catalog()
        dist = p.size_distribution()
        self.catalog_ = catalog
        self.rates_ = service_rates(p.link_budget(), dist)
        self.availability_ = availability_profile(
            catalog, dist, p.cache_dev_mbit, p.ttl_rate, p.sat_slots, p.bs_slots, p.solver_tol
        )
        self.model_ = build_generator(p, catalog, self.availability_, self.rates_)
        self.stationary_ = solve_on_reachable(self.model_.matrix, p.solver_tol)
        self.report_ = metrics.evaluate(
            self.stationary_.probabilities, self.model_, catalog, self.availability_, p,
            self.rates_,
        )
        return self

    def report(self):
        check_is_fitted(self, "report_")
        return self.report_

    @property
    def n_states_(self):
        check_is_fitted(self, "model_")
        return len(self.model_.states)

    @property
    def residual_(self):
        check_is_fitted(self, "stationary_")
        return self.stationary_.residual

    def state_probability(self, state):
        check_is_fitted(self, "stationary_")
        return float(self.stationary_.probabilities[self.model_.index[state]])


class NetworkSimulator(NestedParamsMixin, BaseEstimator):
    """Independent replications of the event-driven simulator.

    Parameters
    ----------
    params : SystemParams, optional
        ``seed``, ``replications`` and ``horizon`` are read from here.
    policy : {"pac", "lru", "fifo", "random"}
    relay_updates : {"requests", "deliveries"}
        What changes the satellite/BS caches (see ``sim.engine``).

    Attributes
    ----------
    seeds_ : list of int
    stats_ : list of SimStats
    reports_ : list of MetricsReport
    aggregate_ : Aggregate with means and 95% CI half-widths
    """

    def __init__(self, params=None, policy="pac", relay_updates="requests"):
        self.params = params
        self.policy = policy
        self.relay_updates = relay_updates

    def fit(self, X=None, y=None):
        p = self.params if self.params is not None else SystemParams()
        p.validate()
        policy = check_policy(self.policy)
        catalog = p.catalog()
        self.seeds_ = [p.seed + i for i in range(p.replications)]
        self.stats_ = [
            run_replication(p, catalog, policy, s, p.horizon, relay_updates=self.relay_updates)
            for s in self.seeds_
        ]
        self.reports_ = [empirical_metrics(st, p) for st in self.stats_]
        self.aggregate_ = aggregate(self.reports_)
        return self


def analyze(params=None):
    """Fit a NetworkAnalyzer on ``params`` and return it."""
    return NetworkAnalyzer(params).fit()


def analyze_many(params_list):
    return [analyze(p) for p in params_list]


__all__ = ["NetworkAnalyzer", "NetworkSimulator", "analyze", "analyze_many"]
