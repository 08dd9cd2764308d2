"""Event-driven simulation of one replication of the network."""

import heapq
import itertools
from dataclasses import dataclass, field

import numpy as np

from ..links import service_rates
from ..ractmc import BS, BS_U, D2D, SAT, SAT_U
from .devices import DeviceCaches
from .policies import apply_cache_policy, check_policy, slot_cache
from .topology import draw_topology

ENERGY_BS, ENERGY_BS_U, ENERGY_D2D, ENERGY_LOCAL = range(4)

_HU_REQUEST, _SERVICE_END, _PU_ARRIVAL, _PU_END = range(4)
_PU = "pu"

# "requests": satellite and BS caches see every HU request, the stream that
# drives their analytic chains.  "deliveries": they change only when they
# serve a content (recency) or relay one from the universal source.
RELAY_UPDATES = ("requests", "deliveries")


@dataclass
class SimStats:
    """Counters collected over the observation window ``[warmup, horizon]``.

    Family-indexed arrays follow (sat, sat_u, bs, bs_u, d2d); energies are
    joules for (BS, BS universal, D2D, local).
    """

    seed: int
    policy: str
    horizon: float
    warmup: float
    n_devices: int = 0
    requests: int = 0
    local_hits: int = 0
    blocked_busy: int = 0
    blocked_unavailable: int = 0
    pu_arrivals: int = 0
    pu_lost: int = 0
    relocations: int = 0
    admitted: np.ndarray = field(default_factory=lambda: np.zeros(5, dtype=np.int64))
    completed: np.ndarray = field(default_factory=lambda: np.zeros(5, dtype=np.int64))
    dropped: np.ndarray = field(default_factory=lambda: np.zeros(5, dtype=np.int64))
    bits: np.ndarray = field(default_factory=lambda: np.zeros(5))
    local_bits: float = 0.0
    energy: np.ndarray = field(default_factory=lambda: np.zeros(4))
    max_d2d: int = 0

    @property
    def window(self):
        return self.horizon - self.warmup

    def fingerprint(self):
        """Tuple of every counter, for replay comparisons."""
        return (
            self.requests, self.local_hits, self.blocked_busy, self.blocked_unavailable,
            self.pu_arrivals, self.pu_lost, self.relocations, tuple(self.admitted),
            tuple(self.completed), tuple(self.dropped), tuple(self.bits), self.local_bits,
            tuple(self.energy), self.max_d2d,
        )


class _Service:
    __slots__ = ("sid", "fam", "freq", "start", "end", "leg1_end", "bits", "content", "rx", "tx")

    def __init__(self, sid, fam, freq, start, end, leg1_end, bits, content, rx, tx):
        self.sid = sid
        self.fam = fam
        self.freq = freq
        self.start = start
        self.end = end
        self.leg1_end = leg1_end
        self.bits = bits
        self.content = content
        self.rx = rx
        self.tx = tx


def _streams(seed):
    children = np.random.SeedSequence(seed).spawn(6)
    return [np.random.default_rng(c) for c in children]


class Replication:
    """State and event handlers of a single simulated run.

    Random streams are split by purpose (topology, device caches, requests,
    PU traffic, mode/frequency choices, relay caches) so that runs with
    different cache policies share their traffic and geometry.
    """

    def __init__(self, params, catalog, policy, seed, horizon=None, topology=None,
                 device_caches=None, relay_updates="requests"):
        if relay_updates not in RELAY_UPDATES:
            raise ValueError(f"relay_updates must be one of {RELAY_UPDATES}")
        self.relay_updates = relay_updates
        self.p = params
        self.catalog = catalog
        self.policy = check_policy(policy)
        self.seed = int(seed)
        self.horizon = float(params.horizon if horizon is None else horizon)
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        self.warmup = params.warmup_fraction * self.horizon
        (topo_rng, dev_rng, self.req_rng, self.pu_rng, self.choice_rng,
         self.relay_rng) = _streams(self.seed)

        self.topology = topology if topology is not None else draw_topology(params, topo_rng)
        n = self.topology.n_devices
        self.devices = device_caches if device_caches is not None else DeviceCaches(
            n, catalog.popularity, catalog.request_rate_total, params.cache_dev_mbit,
            params.n_local_slots, params.mean_size_mbit, params.ttl_mean_sec, self.policy,
            dev_rng, self.horizon,
        )
        pop = catalog.popularity
        self.sat_cache = slot_cache(
            params.sat_slots, self.relay_rng.choice(pop.size, params.sat_slots, replace=False, p=pop))
        self.bs_cache = slot_cache(
            params.bs_slots, self.relay_rng.choice(pop.size, params.bs_slots, replace=False, p=pop))

        self.rates = service_rates(params.link_budget(), params.size_distribution())
        self.d_max = params.effective_d_max
        self.sat = [None] * params.n_freq_sat
        self.ter = [None] * (params.n_freq_ter - 1)     # non-f1 terrestrial frequencies
        self.pu_f1 = False
        self.d2d = {}
        self.services = {}
        self.stats = SimStats(self.seed, self.policy, self.horizon, self.warmup, n_devices=n)
        self._heap = []
        self._seq = itertools.count()
        self._sid = itertools.count()
        self._pop_cum = np.cumsum(pop)
        self._pop_cum[-1] = 1.0

    # ------------------------------------------------------------- plumbing
    def _push(self, t, kind, payload=None):
        heapq.heappush(self._heap, (t, next(self._seq), kind, payload))

    def _in_window(self, t):
        return self.warmup <= t <= self.horizon

    def _overlap(self, a, b):
        return max(0.0, min(b, self.horizon) - max(a, self.warmup))

    def run(self):
        lam_hu, lam_pu = self.catalog.request_rate_total, self.p.lambda_pu
        if lam_hu > 0:
            self._push(self.req_rng.exponential(1.0 / lam_hu), _HU_REQUEST)
        if lam_pu > 0:
            self._push(self.pu_rng.exponential(1.0 / lam_pu), _PU_ARRIVAL)
        handlers = {_HU_REQUEST: self._on_request, _SERVICE_END: self._on_service_end,
                    _PU_ARRIVAL: self._on_pu_arrival, _PU_END: self._on_pu_end}
        while self._heap:
            t, _, kind, payload = heapq.heappop(self._heap)
            if t > self.horizon:
                break
            handlers[kind](t, payload)
        for svc in list(self.services.values()):
            self._charge(svc, self.horizon)
        return self.stats

    # --------------------------------------------------------------- energy
    def _charge(self, svc, t_end):
        p_bs, p_dev = self.p.p_bs_ch, self.p.p_dev_tx
        e = self.stats.energy
        if svc.fam == BS:
            e[ENERGY_BS] += p_bs * self._overlap(svc.start, t_end)
        elif svc.fam == BS_U:
            rx_end = min(t_end, svc.leg1_end)
            e[ENERGY_BS_U] += p_bs / self.p.theta_bs * self._overlap(svc.start, rx_end)
            if t_end > svc.leg1_end:
                e[ENERGY_BS_U] += p_bs * self._overlap(svc.leg1_end, t_end)
        elif svc.fam == D2D:
            e[ENERGY_D2D] += p_dev * self._overlap(svc.start, t_end)

    # ------------------------------------------------------------- requests
    def _on_request(self, t, _):
        st = self.stats
        self._push(t + self.req_rng.exponential(1.0 / self.catalog.request_rate_total),
                   _HU_REQUEST)
        n = self.topology.n_devices
        requester = int(self.req_rng.integers(n)) if n else -1
        content = int(np.searchsorted(self._pop_cum, self.req_rng.random(), side="right"))
        content = min(content, self._pop_cum.size - 1)
        bits = self.req_rng.exponential(self.rates.mean_size_bits)
        counted = self._in_window(t)
        if counted:
            st.requests += 1

        self._route(t, requester, content, bits, counted)
        if self.relay_updates == "requests":
            # the unit caches see the request after it has been routed
            self._offer(self.sat_cache, content, t)
            self._offer(self.bs_cache, content, t)

    def _route(self, t, requester, content, bits, counted):
        st = self.stats
        if requester >= 0 and self.devices.holds([requester], content, t)[0]:
            if counted:
                st.local_hits += 1
                st.local_bits += bits
                st.energy[ENERGY_LOCAL] += (self.p.p_dev_tx / self.p.theta_loc
                                            * bits / self.rates.c_hu_d2d)
            return

        idle_sat = [i for i, s in enumerate(self.sat) if s is None]
        idle_ter = [i for i, s in enumerate(self.ter) if s is None]
        r_sat = self.p.r_sat * len(idle_sat)
        r_bs = self.p.r_bs * len(idle_ter)
        f1_usable = not self.pu_f1 and len(self.d2d) < self.d_max
        r_dev = self.p.r_dev * float(f1_usable)

        in_sat = content in self.sat_cache
        in_bs = content in self.bs_cache
        holder = self._d2d_holder(requester, content, t) if r_dev > 0 else None

        options = []
        if in_sat and r_sat > 0:
            options.append((SAT, r_sat))
        if in_bs and r_bs > 0:
            options.append((BS, r_bs))
        if holder is not None:
            options.append((D2D, r_dev))
        if not options and self.p.universal_source:
            if r_sat > 0:
                options.append((SAT_U, r_sat))
            if r_bs > 0:
                options.append((BS_U, r_bs))
        if not options:
            if counted:
                anywhere = in_sat or in_bs or self._in_range(requester, content, t)
                if anywhere or self.p.universal_source:
                    st.blocked_busy += 1
                else:
                    st.blocked_unavailable += 1
            return

        fams = [f for f, _ in options]
        w = np.array([x for _, x in options])
        fam = fams[0] if len(fams) == 1 else fams[
            int(self.choice_rng.choice(len(fams), p=w / w.sum()))]
        self._admit(t, fam, content, bits, requester, holder, idle_sat, idle_ter)

    def _in_range(self, requester, content, t):
        if requester < 0:
            return False
        nb = self.topology.neighbours[requester]
        return bool(nb.size) and bool(self.devices.holds(nb, content, t).any())

    def _d2d_holder(self, requester, content, t):
        """Nearest in-range holder admissible under the interference rules."""
        if requester < 0:
            return None
        nb = self.topology.neighbours[requester]
        if not nb.size:
            return None
        cands = nb[self.devices.holds(nb, content, t)]
        if not cands.size:
            return None
        r_int = self.p.r_int
        dist = self.topology.distance
        for svc in self.d2d.values():
            if dist(requester, svc.tx) <= r_int:
                return None
        for h in cands:
            if all(dist(int(h), svc.rx) > r_int for svc in self.d2d.values()):
                return int(h)
        return None

    def _admit(self, t, fam, content, bits, requester, holder, idle_sat, idle_ter):
        rt = self.rates
        leg1_end = t
        tx = -1
        if fam in (SAT, SAT_U):
            freq = idle_sat[int(self.choice_rng.integers(len(idle_sat)))]
            if fam == SAT:
                dur = bits / rt.c_hu_sat
                if self.relay_updates == "deliveries":
                    self.sat_cache.touch(content, t)
            else:
                leg1_end = t + bits / rt.c_sat_u
                dur = bits / rt.c_sat_u + bits / rt.c_hu_sat
        elif fam in (BS, BS_U):
            freq = idle_ter[int(self.choice_rng.integers(len(idle_ter)))]
            if fam == BS:
                dur = bits / rt.c_hu_bs
                if self.relay_updates == "deliveries":
                    self.bs_cache.touch(content, t)
            else:
                leg1_end = t + bits / rt.c_bs_u
                dur = bits / rt.c_bs_u + bits / rt.c_hu_bs
        else:
            freq = 0
            tx = holder
            dur = bits / rt.c_hu_d2d
        sid = next(self._sid)
        svc = _Service(sid, fam, freq, t, t + dur, leg1_end, bits, content, requester, tx)
        self.services[sid] = svc
        if fam in (SAT, SAT_U):
            self.sat[freq] = sid
        elif fam in (BS, BS_U):
            self.ter[freq] = sid
        else:
            self.d2d[sid] = svc
            self.stats.max_d2d = max(self.stats.max_d2d, len(self.d2d))
        if self._in_window(t):
            self.stats.admitted[fam] += 1
        self._push(svc.end, _SERVICE_END, sid)

    def _release(self, svc):
        if svc.fam in (SAT, SAT_U):
            self.sat[svc.freq] = None
        elif svc.fam in (BS, BS_U):
            self.ter[svc.freq] = None
        else:
            del self.d2d[svc.sid]

    def _on_service_end(self, t, sid):
        svc = self.services.pop(sid, None)
        if svc is None:        # dropped earlier
            return
        self._release(svc)
        self._charge(svc, t)
        if self._in_window(t):
            self.stats.completed[svc.fam] += 1
            self.stats.bits[svc.fam] += svc.bits
        if svc.fam in (SAT_U, BS_U) and self.relay_updates == "deliveries":
            self._offer(self.sat_cache if svc.fam == SAT_U else self.bs_cache, svc.content, t)

    def _offer(self, cache, content, t):
        if content in cache:
            cache.touch(content, t)
        else:
            apply_cache_policy(self.policy, cache, content, 1.0, self.catalog.popularity,
                               self.relay_rng, now=t)

    def _drop(self, svc, t):
        self.services.pop(svc.sid)
        self._release(svc)
        self._charge(svc, t)
        if self._in_window(t):
            self.stats.dropped[svc.fam] += 1

    # ------------------------------------------------------------------ PUs
    def _on_pu_arrival(self, t, _):
        st = self.stats
        self._push(t + self.pu_rng.exponential(1.0 / self.p.lambda_pu), _PU_ARRIVAL)
        if self._in_window(t):
            st.pu_arrivals += 1
        n_ter = self.p.n_freq_ter
        on_f1 = self.pu_rng.random() < 1.0 / n_ter
        hold = self.pu_rng.exponential(1.0 / self.rates.mu_pu_ter)
        if on_f1:
            if self.pu_f1:
                if self._in_window(t):
                    st.pu_lost += 1
                return
            self.pu_f1 = True
            for svc in list(self.d2d.values()):
                self._drop(svc, t)
            self._push(t + hold, _PU_END, 0)
            return
        free_of_pu = [i for i, s in enumerate(self.ter) if s != _PU]
        if not free_of_pu:
            if self._in_window(t):
                st.pu_lost += 1
            return
        f = free_of_pu[int(self.pu_rng.integers(len(free_of_pu)))]
        sid = self.ter[f]
        self.ter[f] = _PU
        if sid is not None:
            svc = self.services[sid]
            idle = [i for i, s in enumerate(self.ter) if s is None]
            if idle:
                # the service keeps its remaining duration on the new frequency
                g = idle[int(self.choice_rng.integers(len(idle)))]
                svc.freq = g
                self.ter[g] = sid
                if self._in_window(t):
                    st.relocations += 1
            else:
                self.ter[f] = sid
                self._drop(svc, t)
                self.ter[f] = _PU
        self._push(t + hold, _PU_END, f + 1)

    def _on_pu_end(self, t, slot):
        if slot == 0:
            self.pu_f1 = False
        else:
            self.ter[slot - 1] = None


def run_replication(params, catalog=None, policy="pac", seed=0, horizon=None, topology=None,
                    device_caches=None, relay_updates="requests"):
    """Simulate one replication and return its SimStats.

    Deterministic in (params, policy, seed, horizon).
    """
    catalog = params.catalog() if catalog is None else catalog
    return Replication(params, catalog, policy, seed, horizon, topology, device_caches,
                       relay_updates).run()
