"""Empirical counterparts of the analytical metrics."""

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from ..exceptions import EmptyWindow
from ..metrics import METRIC_COLUMNS, MetricsReport
from ..ractmc import BS, BS_U, D2D


def empirical_metrics(stats, params):
    """MetricsReport estimated from one replication's counters.

    Rates are counts over the window, throughputs are delivered bits over
    the window, powers are consumed energy over the window.  Dropped
    services were charged for the time they actually ran.
    """
    w = stats.window
    if not w > 0:
        raise EmptyWindow("observation window has zero length")
    flags = []
    if stats.requests == 0:
        flags.append("no_requests")
    lam = stats.admitted / w
    n_bs = stats.admitted[BS] + stats.admitted[BS_U]
    if n_bs > 0:
        p_bs = float(stats.dropped[BS] + stats.dropped[BS_U]) / n_bs
    else:
        p_bs = 0.0
        flags.append("zero_bs_arrivals")
    if stats.admitted[D2D] > 0:
        p_d = float(stats.dropped[D2D]) / stats.admitted[D2D]
    else:
        p_d = 0.0
        flags.append("zero_d2d_arrivals")
    p_local = stats.local_hits / stats.requests if stats.requests else 0.0
    th = stats.bits / w
    g_local = stats.local_bits / w
    g_hu = g_local + float(th.sum())
    power = stats.energy / w
    p_overall = float(power.sum())
    if g_hu > 0:
        epb = p_overall / g_hu
    else:
        epb = 0.0
        flags.append("zero_goodput")
    return MetricsReport(lam.astype(float), p_bs, p_d, p_local, th, g_local, g_hu, power,
                         p_overall, epb, flags)


@dataclass
class Aggregate:
    """Mean and two-sided 95% t-interval half-width per metric column."""

    n: int
    mean: dict
    half_width: dict

    def interval(self, column):
        m, h = self.mean[column], self.half_width[column]
        return m - h, m + h

    def as_row(self):
        row = {}
        for c in METRIC_COLUMNS:
            row[c] = self.mean[c]
        for c in METRIC_COLUMNS:
            row[f"{c}_ci95"] = self.half_width[c]
        return row


def aggregate(reports, confidence=0.95):
    """Sample mean and t-based CI half-width across replications."""
    if not reports:
        raise ValueError("no reports to aggregate")
    rows = [r.as_row() for r in reports]
    n = len(rows)
    mean, half = {}, {}
    q = sps.t.ppf(0.5 + confidence / 2, n - 1) if n > 1 else np.nan
    for c in METRIC_COLUMNS:
        x = np.array([row[c] for row in rows], dtype=float)
        mean[c] = float(x.mean())
        half[c] = float(q * x.std(ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
    return Aggregate(n, mean, half)
