"""Goodput, drop, power and energy-per-bit metrics of the channel chain."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ZeroGoodput
from .ractmc import BS, BS_U, D2D, FAMILIES, SAT, SAT_U, idle_counts


@dataclass
class MetricsReport:
    """All rates in requests/s, throughputs in bits/s, powers in W, epb in J/bit."""

    lambda_eff: np.ndarray          # (sat, sat_u, bs, bs_u, d2d)
    p_drop_bs: float
    p_drop_d2d: float
    p_local: float
    throughput: np.ndarray          # (sat, sat_u, bs, bs_u, d2d)
    g_local: float
    g_hu: float
    power: np.ndarray               # (P_BS, P_BS(u), P_D2D, P_local)
    p_overall: float
    epb: float
    flags: list = field(default_factory=list)

    POWER_NAMES = ("power_bs", "power_bs_u", "power_d2d", "power_local")

    def as_row(self):
        """Flat name -> value mapping in a fixed column order."""
        row = {f"lambda_eff_{n}": float(v) for n, v in zip(FAMILIES, self.lambda_eff)}
        row.update(p_drop_bs=self.p_drop_bs, p_drop_d2d=self.p_drop_d2d, p_local=self.p_local)
        row.update({f"th_{n}": float(v) for n, v in zip(FAMILIES, self.throughput)})
        row.update(g_local=self.g_local, g_hu=self.g_hu)
        row.update({n: float(v) for n, v in zip(self.POWER_NAMES, self.power)})
        row.update(p_overall=self.p_overall, epb=self.epb)
        row["flags"] = ";".join(self.flags)
        return row


METRIC_COLUMNS = tuple(
    [f"lambda_eff_{n}" for n in FAMILIES]
    + ["p_drop_bs", "p_drop_d2d", "p_local"]
    + [f"th_{n}" for n in FAMILIES]
    + ["g_local", "g_hu", "power_bs", "power_bs_u", "power_d2d", "power_local", "p_overall",
       "epb"]
)


def effective_rates(pi, gamma):
    """pi-weighted routed arrival rate per family, shape (5,)."""
    return np.asarray(pi) @ np.asarray(gamma)


def drop_utilization(pi, states, params):
    """Mass of states in which a PU arrival on a BS-mode frequency drops an HU."""
    u = 0.0
    for p, s in zip(pi, states):
        _, idle_ter = idle_counts(s, params)
        if idle_ter == 0 and s.i_pu_ter_nf1 != params.n_freq_ter - 1:
            u += p
    return u


def drop_probabilities(pi, states, lambda_eff, params, flags=None):
    """(p_drop_bs, p_drop_d2d); zero with a flag when the denominator vanishes."""
    flags = [] if flags is None else flags
    n_ter = params.n_freq_ter
    forced_bs = params.lambda_pu * (n_ter - 1) / n_ter * drop_utilization(pi, states, params)
    den_bs = lambda_eff[BS] + lambda_eff[BS_U]
    if den_bs > 0:
        p_bs = forced_bs / den_bs
    else:
        p_bs = 0.0
        flags.append("zero_bs_arrivals")
    active = sum(p * s.i_hu_d_f1 for p, s in zip(pi, states) if s.i_pu_ter_f1 == 0)
    forced_d = params.lambda_pu / n_ter * active
    if lambda_eff[D2D] > 0:
        p_d = forced_d / lambda_eff[D2D]
    else:
        p_d = 0.0
        flags.append("zero_d2d_arrivals")
    return p_bs, p_d


def local_hit_probability(catalog, p_loc):
    total = catalog.request_rate.sum()
    if total <= 0:
        # request mix still follows popularity when the rate vanishes
        return float(catalog.popularity @ p_loc)
    return float(catalog.request_rate @ p_loc / total)


def goodput(lambda_eff, p_drop_bs, p_drop_d2d, p_local, params, rates):
    """(throughput per family, local goodput, total goodput) in bits/s."""
    s = rates.mean_size_bits
    th = np.array([
        lambda_eff[SAT] * s,
        lambda_eff[SAT_U] * s,
        lambda_eff[BS] * (1.0 - p_drop_bs) * s,
        lambda_eff[BS_U] * (1.0 - p_drop_bs) * s,
        lambda_eff[D2D] * (1.0 - p_drop_d2d) * s,
    ])
    g_local = params.lambda_hu * p_local * s
    return th, g_local, g_local + th.sum()


def power_components(lambda_eff, p_drop_bs, p_drop_d2d, p_local, params, rates):
    """(P_BS, P_BS(u), P_D2D, P_local) in watts; the satellite is not charged."""
    p_bs, p_dev = params.p_bs_ch, params.p_dev_tx
    s = rates.mean_size_bits
    rx_energy = p_bs / params.theta_bs * s / rates.c_bs_u
    le_bs, le_bsu, le_d = lambda_eff[BS], lambda_eff[BS_U], lambda_eff[D2D]
    power_bs = (le_bs * (1 - p_drop_bs) * p_bs / rates.mu_hu_bs
                + le_bs * p_drop_bs * p_bs / (2 * rates.mu_hu_bs))
    # a drop before the BS starts transmitting costs no transmission energy
    tx_before_drop = max(0.0, rates.delta_bs_u / 2 - s / rates.c_bs_u)
    power_bsu = (le_bsu * (1 - p_drop_bs) * (p_bs / rates.mu_hu_bs + rx_energy)
                 + le_bsu * p_drop_bs * (p_bs * tx_before_drop + rx_energy))
    power_d2d = (le_d * (1 - p_drop_d2d) * p_dev / rates.mu_hu_d2d
                 + le_d * p_drop_d2d * p_dev / (2 * rates.mu_hu_d2d))
    power_local = params.lambda_hu * p_local * p_dev / params.theta_loc / rates.mu_hu_d2d
    return np.array([power_bs, power_bsu, power_d2d, power_local])


def energy_per_bit(p_overall, g_hu):
    if not g_hu > 0:
        raise ZeroGoodput("goodput is zero; energy per bit undefined")
    return p_overall / g_hu


def evaluate(pi, model, catalog, availability, params, rates):
    """Full metrics report from a stationary distribution of ``model``."""
    pi = np.asarray(pi)
    flags = []
    lam = effective_rates(pi, model.gamma)
    p_bs, p_d = drop_probabilities(pi, model.states, lam, params, flags)
    p_loc = local_hit_probability(catalog, availability.p_loc)
    th, g_local, g_hu = goodput(lam, p_bs, p_d, p_loc, params, rates)
    power = power_components(lam, p_bs, p_d, p_loc, params, rates)
    p_overall = float(power.sum())
    try:
        epb = energy_per_bit(p_overall, g_hu)
    except ZeroGoodput:
        epb = 0.0
        flags.append("zero_goodput")
    return MetricsReport(lam, p_bs, p_d, p_loc, th, g_local, g_hu, power, p_overall, epb, flags)
