"""Resource-allocation CTMC over channel occupancy states.

A state counts satellite frequencies serving HUs directly or via the
universal source, PU/HU occupancy of the BS-mode terrestrial frequencies,
PU occupancy of the D2D frequency f1 and the number of concurrent D2D links
on f1.  Transitions come from PU arrivals/departures (with preemption) and
HU requests/departures routed by cache availability and mode weights.
"""

import math
from dataclasses import dataclass
from itertools import product
from typing import NamedTuple

import numpy as np

from .solver import RateMatrix

FAMILIES = ("sat", "sat_u", "bs", "bs_u", "d2d")
SAT, SAT_U, BS, BS_U, D2D = range(5)


class ChannelState(NamedTuple):
    i_hu_sat: int
    i_hu_sat_u: int
    i_pu_ter_nf1: int
    i_hu_bs: int
    i_hu_bs_u: int
    i_pu_ter_f1: int
    i_hu_d_f1: int


@dataclass(frozen=True)
class ModeWeights:
    r_sat: float
    r_bs: float
    r_dev: float

    def __post_init__(self):
        for v in (self.r_sat, self.r_bs, self.r_dev):
            if not 0.0 <= v <= 1.0:
                raise ValueError("mode weights must lie in [0, 1]")
        if abs(self.r_sat + self.r_bs + self.r_dev - 1.0) > 1e-9:
            raise ValueError("mode weights must sum to 1")

    @classmethod
    def from_params(cls, params):
        return cls(params.r_sat, params.r_bs, params.r_dev)


@dataclass(frozen=True)
class D2DGeometry:
    hu_density: float
    cell_radius: float
    interference_radius: float
    d_max: int

    @classmethod
    def from_params(cls, params):
        return cls(params.hu_density, params.r_bs_cell, params.r_int, params.effective_d_max)

    @property
    def neighbours(self):
        return math.floor(self.hu_density * math.pi * self.interference_radius**2)


def is_valid_state(s, params, d_max=None):
    d_max = params.effective_d_max if d_max is None else d_max
    if min(s) < 0:
        return False
    return (
        s.i_hu_sat + s.i_hu_sat_u <= params.n_freq_sat
        and s.i_pu_ter_nf1 + s.i_hu_bs + s.i_hu_bs_u <= params.n_freq_ter - 1
        and s.i_pu_ter_f1 in (0, 1)
        and s.i_hu_d_f1 <= d_max
        and not (s.i_pu_ter_f1 == 1 and s.i_hu_d_f1 > 0)
    )


def enumerate_states(params):
    """All valid channel states in lexicographic order."""
    n_sat, n_ter = params.n_freq_sat, params.n_freq_ter - 1
    d_max = params.effective_d_max
    states = []
    for hs, hsu in product(range(n_sat + 1), repeat=2):
        if hs + hsu > n_sat:
            continue
        for pu, hb, hbu in product(range(n_ter + 1), repeat=3):
            if pu + hb + hbu > n_ter:
                continue
            for pf1 in (0, 1):
                for d in range(d_max + 1 if pf1 == 0 else 1):
                    states.append(ChannelState(hs, hsu, pu, hb, hbu, pf1, d))
    return states


def idle_counts(state, params):
    """(idle satellite frequencies, idle BS-mode terrestrial frequencies)."""
    idle_sat = params.n_freq_sat - state.i_hu_sat - state.i_hu_sat_u
    idle_ter = (params.n_freq_ter - 1) - state.i_pu_ter_nf1 - state.i_hu_bs - state.i_hu_bs_u
    return idle_sat, idle_ter


# -------------------------------------------------------------- D2D overlay


def receiver_clearance(d, geometry):
    cell = math.pi * geometry.cell_radius**2
    return max(0.0, cell - d * math.pi * geometry.interference_radius**2) / cell


def transmitter_clearance(d, geometry):
    cell = math.pi * geometry.cell_radius**2
    return max(0.0, cell - d * math.pi * (2 * geometry.interference_radius) ** 2) / cell


def content_in_range(p_loc, geometry):
    """P(at least one of the neighbours in range caches the content)."""
    return 1.0 - (1.0 - np.asarray(p_loc, dtype=float)) ** geometry.neighbours


def d2d_probabilities(state, geometry, p_loc):
    """Per-content D2D availability for every content in ``state``."""
    d = state.i_hu_d_f1
    if not 0 <= d < geometry.d_max:
        return np.zeros(len(p_loc))
    gate = receiver_clearance(d, geometry) * transmitter_clearance(d, geometry)
    return gate * content_in_range(p_loc, geometry)


def p_d2d(content_index, state, geometry, p_loc):
    return float(d2d_probabilities(state, geometry, p_loc)[content_index])


# ------------------------------------------------------------- mode weights


def aggregate_weights(state, weights, geometry, params):
    """Aggregate satellite, BS and D2D weights of a state."""
    idle_sat, idle_ter = idle_counts(state, params)
    d = state.i_hu_d_f1
    f1_usable = (0 < d < geometry.d_max) or (d == 0 and state.i_pu_ter_f1 == 0)
    return (
        weights.r_sat * idle_sat,
        weights.r_bs * idle_ter,
        weights.r_dev * (1.0 if f1_usable else 0.0),
    )


def _share(num, den):
    return num / den if den > 0 else 0.0


# -------------------------------------------------------------- transitions


def pu_transitions(state, params, rates):
    """Outgoing transitions caused by PU arrivals and departures.

    Returns a list of (label, destination, rate) with strictly positive rates.
    """
    out = []
    lam = params.lambda_pu
    n_ter = params.n_freq_ter
    _, idle_ter = idle_counts(state, params)
    non_pu = (n_ter - 1) - state.i_pu_ter_nf1
    arrive_nf1 = (n_ter - 1) * lam / n_ter
    if idle_ter > 0:
        out.append(("s1", state._replace(i_pu_ter_nf1=state.i_pu_ter_nf1 + 1), arrive_nf1))
    elif non_pu > 0:
        if state.i_hu_bs > 0:
            out.append(("s2", state._replace(i_pu_ter_nf1=state.i_pu_ter_nf1 + 1,
                                             i_hu_bs=state.i_hu_bs - 1),
                        arrive_nf1 * state.i_hu_bs / non_pu))
        if state.i_hu_bs_u > 0:
            out.append(("s3", state._replace(i_pu_ter_nf1=state.i_pu_ter_nf1 + 1,
                                             i_hu_bs_u=state.i_hu_bs_u - 1),
                        arrive_nf1 * state.i_hu_bs_u / non_pu))
    if state.i_pu_ter_f1 == 0 and state.i_hu_d_f1 == 0:
        out.append(("s4", state._replace(i_pu_ter_f1=1), lam / n_ter))
    if state.i_hu_d_f1 > 0:
        out.append(("s5", state._replace(i_pu_ter_f1=1, i_hu_d_f1=0), lam / n_ter))
    if state.i_pu_ter_nf1 > 0:
        out.append(("s6", state._replace(i_pu_ter_nf1=state.i_pu_ter_nf1 - 1),
                    state.i_pu_ter_nf1 * rates.mu_pu_ter))
    if state.i_pu_ter_f1 > 0:
        out.append(("s7", state._replace(i_pu_ter_f1=0), state.i_pu_ter_f1 * rates.mu_pu_ter))
    return [t for t in out if t[2] > 0]


def hu_arrival_rates(state, catalog, availability, weights, geometry, params):
    """Per-content request rates routed to each family, shape (N, 5).

    Columns follow FAMILIES.  Each availability event of a request that
    misses the local cache is routed to at most one family.
    """
    lam = catalog.request_rate
    a = lam * (1.0 - availability.p_loc)
    ps, pb = availability.p_sat, availability.p_bs
    pd = d2d_probabilities(state, geometry, availability.p_loc)
    qs, qb, qd = 1.0 - ps, 1.0 - pb, 1.0 - pd

    idle_sat, idle_ter = idle_counts(state, params)
    rs, rb, rd = aggregate_weights(state, weights, geometry, params)
    d = state.i_hu_d_f1
    sat_ok = idle_sat > 0 and weights.r_sat > 0
    bs_ok = idle_ter > 0 and weights.r_bs > 0
    d2d_blocked = weights.r_dev == 0 or d == geometry.d_max or state.i_pu_ter_f1 == 1
    f1_ok = weights.r_dev > 0 and ((0 < d < geometry.d_max) or (d == 0 and state.i_pu_ter_f1 == 0))

    s_sb, b_sb = _share(rs, rs + rb), _share(rb, rs + rb)
    s_sd, d_sd = _share(rs, rs + rd), _share(rd, rs + rd)
    b_bd, d_bd = _share(rb, rb + rd), _share(rd, rb + rd)
    total = rs + rb + rd
    s_all, b_all, d_all = _share(rs, total), _share(rb, total), _share(rd, total)

    out = np.zeros((lam.size, 5))
    if params.universal_source:
        # universal source via the satellite
        out[:, SAT_U] = a * (
            qs * qb * qd * s_sb
            + qs * pb * qd * float((idle_ter == 0 or weights.r_bs == 0) and sat_ok)
            + qs * qb * pd * s_sb * float(d2d_blocked)
            + qs * pb * pd * float(rb + rd == 0 and sat_ok)
        )
        # universal source via the BS
        out[:, BS_U] = a * (
            qs * qb * qd * b_sb
            + ps * qb * qd * float((idle_sat == 0 or weights.r_sat == 0) and bs_ok)
            + qs * qb * pd * b_sb * float(d2d_blocked)
            + ps * qb * pd * float(rs + rd == 0 and bs_ok)
        )
    # satellite cache
    out[:, SAT] = a * (
        ps * qb * qd * float(sat_ok) + ps * pb * qd * s_sb + ps * qb * pd * s_sd + ps * pb * pd * s_all
    )
    # BS cache
    out[:, BS] = a * (
        qs * pb * qd * float(bs_ok) + ps * pb * qd * b_sb + qs * pb * pd * b_bd + ps * pb * pd * b_all
    )
    # neighbouring device
    out[:, D2D] = a * (
        qs * qb * pd * float(f1_ok) + ps * qb * pd * d_sd + qs * pb * pd * d_bd + ps * pb * pd * d_all
    )
    return out


_ARRIVAL_FIELD = {SAT: "i_hu_sat", SAT_U: "i_hu_sat_u", BS: "i_hu_bs", BS_U: "i_hu_bs_u",
                  D2D: "i_hu_d_f1"}
_ARRIVAL_LABEL = {SAT: "h3", SAT_U: "h1", BS: "h4", BS_U: "h2", D2D: "h5"}


def hu_transitions(state, catalog, availability, weights, geometry, rates, params):
    """Outgoing HU arrival and departure transitions of ``state``.

    Returns (transitions, per-content arrival table) where transitions is a
    list of (label, destination, rate).
    """
    table = hu_arrival_rates(state, catalog, availability, weights, geometry, params)
    gamma = table.sum(axis=0)
    out = []
    for fam in (SAT_U, BS_U, SAT, BS, D2D):
        if gamma[fam] > 0:
            fld = _ARRIVAL_FIELD[fam]
            out.append((_ARRIVAL_LABEL[fam], state._replace(**{fld: getattr(state, fld) + 1}),
                        float(gamma[fam])))
    departures = (
        ("h6", "i_hu_sat_u", rates.mu_hu_sat_u),
        ("h7", "i_hu_bs_u", rates.mu_hu_bs_u),
        ("h8", "i_hu_sat", rates.mu_hu_sat),
        ("h9", "i_hu_bs", rates.mu_hu_bs),
        ("h10", "i_hu_d_f1", rates.mu_hu_d2d),
    )
    for label, fld, mu in departures:
        k = getattr(state, fld)
        if k > 0:
            out.append((label, state._replace(**{fld: k - 1}), k * mu))
    return out, table


@dataclass(frozen=True)
class RAModel:
    """Channel chain plus the per-state routed arrival rates used by metrics."""

    states: list
    index: dict
    matrix: RateMatrix
    gamma: np.ndarray            # (S, 5) aggregate arrival rate per family
    gamma_content: np.ndarray    # (S, N, 5) per-content rates
    d2d_table: np.ndarray        # (S, N) D2D availability per content
    labels: tuple                # label of each stored transition


def build_generator(params, catalog, availability, rates):
    """Assemble the channel CTMC from PU and HU transitions of every state."""
    states = enumerate_states(params)
    index = {s: k for k, s in enumerate(states)}
    weights = ModeWeights.from_params(params)
    geometry = D2DGeometry.from_params(params)
    n = catalog.n_contents
    gamma_content = np.zeros((len(states), n, 5))
    d2d = np.zeros((len(states), n))
    rows, cols, vals, labels = [], [], [], []
    for k, s in enumerate(states):
        hu, table = hu_transitions(s, catalog, availability, weights, geometry, rates, params)
        gamma_content[k] = table
        d2d[k] = d2d_probabilities(s, geometry, availability.p_loc)
        for label, dest, rate in pu_transitions(s, params, rates) + hu:
            rows.append(k)
            cols.append(index[dest])
            vals.append(rate)
            labels.append(label)
    matrix = RateMatrix(len(states), np.array(rows), np.array(cols), np.array(vals))
    return RAModel(states, index, matrix, gamma_content.sum(axis=1), gamma_content, d2d,
                   tuple(labels))
