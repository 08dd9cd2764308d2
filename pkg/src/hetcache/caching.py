"""Markov chains of the device, satellite and BS caches under PAC eviction.

The device cache holds at most two contents subject to a size budget and
expires contents at a TTL rate.  The satellite and BS caches always hold a
fixed number of distinct contents; a request for an uncached content replaces
a resident with probability inversely proportional to its popularity.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.special import comb

from .content import ContentCatalog, size_cdf_one, size_cdf_sum2
from .solver import DEFAULT_TOL, RateMatrix, solve_on_reachable


# ---------------------------------------------------------------- device cache


def local_states(n):
    """State labels of the device cache chain: (), (i,), (i, j) with i < j."""
    return [()] + [(i,) for i in range(n)] + list(combinations(range(n), 2))


def build_local_chain(catalog, dist, cache_capacity, ttl_rate):
    """Generator of the device cache chain over 1 + N + N(N-1)/2 states."""
    if not cache_capacity > 0:
        raise ValueError("cache_capacity must be positive")
    if not ttl_rate > 0:
        raise ValueError("ttl_rate must be positive")
    n = catalog.n_contents
    lam = catalog.request_rate
    pop = catalog.popularity
    fit1 = size_cdf_one(cache_capacity, dist)
    fit2 = size_cdf_sum2(cache_capacity, dist)
    states = local_states(n)
    index = {s: k for k, s in enumerate(states)}

    tr = []
    for i in range(n):
        single = index[(i,)]
        tr.append((0, single, lam[i] * fit1))
        tr.append((single, 0, ttl_rate))
        for j in range(n):
            if j != i:
                tr.append((single, index[tuple(sorted((i, j)))], lam[j] * fit2))
    for i, j in combinations(range(n), 2):
        pair = index[(i, j)]
        tr.append((pair, index[(i,)], ttl_rate))
        tr.append((pair, index[(j,)], ttl_rate))
        evict_i = pop[j] / (pop[i] + pop[j])
        evict_j = pop[i] / (pop[i] + pop[j])
        for t in range(n):
            if t == i or t == j:
                continue
            tr.append((pair, index[tuple(sorted((t, j)))], lam[t] * evict_i * fit2))
            tr.append((pair, index[tuple(sorted((i, t)))], lam[t] * evict_j * fit2))
    return RateMatrix.from_transitions(len(states), tr)


# ----------------------------------------------------------- fixed-size caches


def _colex_rank(subsets):
    """Rank of each sorted k-subset row in the combinatorial number system."""
    k = subsets.shape[1]
    return sum(comb(subsets[:, j], j + 1, exact=False).astype(np.int64) for j in range(k))


def fixed_states(n, slot_count):
    """All slot_count-subsets of range(n) as rows, ordered by colex rank."""
    rows = np.array(list(combinations(range(n), slot_count)), dtype=np.int64)
    order = np.argsort(_colex_rank(rows), kind="stable")
    return rows[order]


def build_fixed_chain(catalog, slot_count):
    """Generator of a cache that always holds ``slot_count`` distinct contents.

    From subset A a request for c_t outside A replaces c_e in A at rate
    lambda_t * x_e / sum(x), where x_e is the product of the popularities of
    the other residents.
    """
    n = catalog.n_contents
    if not n > slot_count:
        raise ValueError("catalog must be larger than the cache")
    states = fixed_states(n, slot_count)
    m = states.shape[0]
    pop = catalog.popularity
    lam = catalog.request_rate

    # x_e / sum_theta x_theta == (1 / p_e) / sum_theta (1 / p_theta)
    inv = 1.0 / pop[states]
    evict_share = inv / inv.sum(axis=1, keepdims=True)

    member = np.zeros((m, n), dtype=bool)
    member[np.arange(m)[:, None], states] = True

    rows, cols, rates = [], [], []
    src_all = np.arange(m)
    for t in range(n):
        outside = ~member[:, t]
        src = src_all[outside]
        base = states[outside]
        for e in range(slot_count):
            new = base.copy()
            new[:, e] = t
            new.sort(axis=1)
            rows.append(src)
            cols.append(_colex_rank(new))
            rates.append(lam[t] * evict_share[outside, e])
    return RateMatrix(m, np.concatenate(rows), np.concatenate(cols), np.concatenate(rates))


# ---------------------------------------------------------------- availability


@dataclass(frozen=True)
class AvailabilityProfile:
    """Per-content probability of being cached at each unit."""

    p_loc: np.ndarray
    p_sat: np.ndarray
    p_bs: np.ndarray


def local_availability(pi, n):
    """p_loc[i] = P(single i) + sum_j P(pair {i, j})."""
    pi = np.asarray(pi)
    p = pi[1 : n + 1].copy()
    pairs = np.array(list(combinations(range(n), 2)), dtype=np.int64).reshape(-1, 2)
    pair_mass = pi[n + 1 :]
    np.add.at(p, pairs[:, 0], pair_mass)
    np.add.at(p, pairs[:, 1], pair_mass)
    return p


def fixed_availability(pi, n, slot_count):
    states = fixed_states(n, slot_count)
    p = np.zeros(n)
    np.add.at(p, states.ravel(), np.repeat(np.asarray(pi), slot_count))
    return p


def availability(local, sat, bs, solver=solve_on_reachable, n_contents=None, sat_slots=None,
                 bs_slots=None):
    """Solve the three cache chains and map stationary mass to per-content hits.

    ``local``, ``sat`` and ``bs`` are RateMatrix objects from the builders
    above; ``solver`` maps a RateMatrix to a StationaryDistribution.  Slot
    counts are inferred from the chain sizes unless that is ambiguous
    (C(n, k) == C(n, n - k)), in which case they must be given.
    """
    n = n_contents
    if n is None:
        # 1 + n + n(n-1)/2 states
        n = int(round((-1 + np.sqrt(1 + 8 * (local.n_states - 1))) / 2))
    sat_k = _slots_from_size(n, sat.n_states) if sat_slots is None else sat_slots
    bs_k = _slots_from_size(n, bs.n_states) if bs_slots is None else bs_slots
    return AvailabilityProfile(
        p_loc=local_availability(solver(local).probabilities, n),
        p_sat=fixed_availability(solver(sat).probabilities, n, sat_k),
        p_bs=fixed_availability(solver(bs).probabilities, n, bs_k),
    )


def _slots_from_size(n, n_states):
    ks = [k for k in range(1, n) if comb(n, k, exact=True) == n_states]
    if not ks:
        raise ValueError("state count is not a binomial coefficient of the catalog size")
    if len(ks) > 1:
        raise ValueError(f"slot count is ambiguous between {ks}; pass it explicitly")
    return ks[0]


@lru_cache(maxsize=32)
def _fixed_profile(n, s, slot_count, tol):
    # stationary law does not depend on the total request rate
    catalog = ContentCatalog(n, s, 1.0)
    pi = solve_on_reachable(build_fixed_chain(catalog, slot_count), tol)
    return fixed_availability(pi.probabilities, n, slot_count)


def fixed_availability_cached(n, s, slot_count, tol=DEFAULT_TOL):
    out = _fixed_profile(int(n), float(s), int(slot_count), float(tol)).copy()
    out.setflags(write=False)
    return out


def availability_profile(catalog, dist, cache_capacity, ttl_rate, sat_slots, bs_slots,
                         tol=DEFAULT_TOL):
    """Availability for a catalog; the fixed-cache solves are memoized."""
    n = catalog.n_contents
    pi_loc = solve_on_reachable(build_local_chain(catalog, dist, cache_capacity, ttl_rate), tol)
    return AvailabilityProfile(
        p_loc=local_availability(pi_loc.probabilities, n),
        p_sat=fixed_availability_cached(n, catalog.zipf_s, sat_slots, tol),
        p_bs=fixed_availability_cached(n, catalog.zipf_s, bs_slots, tol),
    )
