"""Device caches of the whole cell, simulated together.

Each device cache evolves under its own Poisson copy of the catalog request
stream (rates lambda_ci), exactly the driving process of the analytic
device-cache chain, with exponential TTL expiry and a size budget.  These
processes do not depend on channel activity, so all of them are advanced
up front, one request round at a time across every device, and the stored
history answers "does device d hold content c at time t" later.
"""

import numpy as np
from numba import njit

from .policies import check_policy

_EMPTY = -1
_POLICY_CODE = {"pac": 0, "lru": 1, "fifo": 2, "random": 3}


@njit(cache=True)
def _evolve(times, horizon, cum_pop, inv_pop, capacity, k, mean_size, ttl_mean, policy, rng,
            hist_content, hist_expiry):
    """Advance every device cache through its request events.

    Every event consumes the same random draws whatever the policy, so runs
    with different policies see identical request streams.
    """
    n, m = times.shape
    n_contents = cum_pop.size
    cont = np.empty(k, np.int64)
    size = np.empty(k)
    expiry = np.empty(k)
    inserted = np.empty(k)
    used = np.empty(k)
    keys = np.empty(k)
    order = np.empty(k, np.int64)
    for d in range(n):
        cont[:] = -1
        size[:] = 0.0
        expiry[:] = 0.0
        inserted[:] = 0.0
        used[:] = 0.0
        for r in range(m):
            t = times[d, r]
            if t > horizon:
                break
            c = np.searchsorted(cum_pop, rng.random(), side="right")
            if c >= n_contents:
                c = n_contents - 1
            s = rng.exponential(mean_size)
            ttl = rng.exponential(ttl_mean)
            u = rng.random()
            for j in range(k):
                keys[j] = rng.random()

            hit = -1
            n_occ = 0
            load = 0.0
            for j in range(k):
                if cont[j] >= 0 and expiry[j] <= t:
                    cont[j] = -1
                if cont[j] == c:
                    hit = j
                if cont[j] >= 0:
                    n_occ += 1
                    load += size[j]
            target = -1
            if hit >= 0:
                used[hit] = t
            elif s <= capacity:
                if n_occ < k and load + s <= capacity:
                    for j in range(k):
                        if cont[j] < 0:
                            target = j
                            break
                elif policy == 0:
                    if n_occ == k:
                        total = 0.0
                        for j in range(k):
                            total += inv_pop[cont[j]]
                        acc = 0.0
                        victim = k - 1
                        for j in range(k):
                            acc += inv_pop[cont[j]] / total
                            if u <= acc:
                                victim = j
                                break
                        if load - size[victim] + s <= capacity:
                            target = victim
                else:
                    for j in range(k):
                        if cont[j] < 0:
                            keys[j] = -np.inf
                        elif policy == 1:
                            keys[j] = used[j]
                        elif policy == 2:
                            keys[j] = inserted[j]
                    order[:] = np.argsort(keys, kind="mergesort")
                    for j in range(k):
                        slot = order[j]
                        if cont[slot] >= 0:
                            cont[slot] = -1
                            n_occ -= 1
                            load -= size[slot]
                        if n_occ < k and load + s <= capacity:
                            break
                    target = order[0]
            if target >= 0:
                cont[target] = c
                size[target] = s
                expiry[target] = t + ttl
                inserted[target] = t
                used[target] = t
            for j in range(k):
                hist_content[d, r + 1, j] = cont[j]
                hist_expiry[d, r + 1, j] = expiry[j] if cont[j] >= 0 else 0.0


class DeviceCaches:
    """Cache contents of ``n_devices`` devices over ``[0, horizon]``.

    Parameters
    ----------
    n_devices : int
    popularity : array of N probabilities
    request_rate : float
        Total request rate driving every device cache (lambda_HU).
    capacity : float
        Cache budget in megabits.
    slots : int
        Maximum number of stored contents.
    mean_size : float
        Mean content size in megabits.
    ttl_mean : float
        Mean TTL in seconds.
    policy : {"pac", "lru", "fifo", "random"}
    rng : numpy.random.Generator
    horizon : float
    """

    def __init__(self, n_devices, popularity, request_rate, capacity, slots, mean_size,
                 ttl_mean, policy, rng, horizon):
        self.n = int(n_devices)
        self.k = int(slots)
        self.horizon = float(horizon)
        self.policy = check_policy(policy)
        self.popularity = np.asarray(popularity, dtype=float)
        self._run(request_rate, capacity, mean_size, ttl_mean, rng)

    # ------------------------------------------------------------ evolution
    def _event_times(self, rate, rng):
        if rate <= 0 or self.n == 0:
            return np.empty((self.n, 0))
        mean = rate * self.horizon
        m = int(np.ceil(mean + 8.0 * np.sqrt(mean) + 20))
        times = np.cumsum(rng.exponential(1.0 / rate, (self.n, m)), axis=1)
        while self.n and times[:, -1].min() <= self.horizon:
            more = times[:, -1:] + np.cumsum(rng.exponential(1.0 / rate, (self.n, m)), axis=1)
            times = np.hstack([times, more])
        return times

    def _run(self, rate, capacity, mean_size, ttl_mean, rng):
        n, k = self.n, self.k
        times = self._event_times(rate, rng)
        m = times.shape[1]
        # flattened, row-offset copy of the event times for vectorized lookup
        self._stride = 2.0 * self.horizon + 2.0
        capped = np.minimum(times, 1.5 * self.horizon + 1.0)
        self._flat = (capped + self._stride * np.arange(n)[:, None]).ravel()
        self._m = m
        self.hist_content = np.full((n, m + 1, k), _EMPTY, dtype=np.int16)
        self.hist_expiry = np.zeros((n, m + 1, k), dtype=np.float32)
        cum = np.cumsum(self.popularity)
        cum[-1] = 1.0
        _evolve(times, self.horizon, cum, 1.0 / self.popularity, float(capacity), k,
                float(mean_size), float(ttl_mean), _POLICY_CODE[self.policy], rng,
                self.hist_content, self.hist_expiry)

    # --------------------------------------------------------------- lookup
    def _rounds(self, devices, t):
        devices = np.asarray(devices, dtype=np.int64)
        if self._m == 0:
            return devices, np.zeros(devices.size, dtype=np.int64)
        q = t + self._stride * devices
        pos = np.searchsorted(self._flat, q, side="right")
        return devices, pos - devices * self._m

    def holds(self, devices, content, t):
        """Boolean array: device holds ``content`` unexpired at time ``t``."""
        devices, r = self._rounds(devices, t)
        cont = self.hist_content[devices, r]
        exp = self.hist_expiry[devices, r]
        return ((cont == content) & (exp > t)).any(axis=1)

    def contents_at(self, device, t):
        devices, r = self._rounds([device], t)
        cont = self.hist_content[devices[0], r[0]]
        exp = self.hist_expiry[devices[0], r[0]]
        return sorted(int(c) for c, e in zip(cont, exp) if c >= 0 and e > t)

    def occupancy(self, t):
        """Per-device stored contents at ``t`` as an (n, N) indicator matrix."""
        out = np.zeros((self.n, self.popularity.size), dtype=bool)
        devices, r = self._rounds(np.arange(self.n), t)
        cont = self.hist_content[devices, r]
        live = (cont >= 0) & (self.hist_expiry[devices, r] > t)
        d_idx, s_idx = np.nonzero(live)
        out[d_idx, cont[d_idx, s_idx]] = True
        return out
