"""Replacement policies for the simulated caches.

``BoundedCache`` is a small size- and count-bounded store used for the
satellite and BS caches (unit sizes, slot counted) and for single-cache
experiments.  ``apply_cache_policy`` admits a new content under one of the
four policies.
"""

from dataclasses import dataclass

import numpy as np

POLICIES = ("pac", "lru", "fifo", "random")


def check_policy(policy):
    key = str(policy).lower()
    if key not in POLICIES:
        raise ValueError(f"unknown cache policy {policy!r}; expected one of {POLICIES}")
    return key


@dataclass
class Entry:
    size: float
    inserted: float
    last_used: float


class BoundedCache:
    """At most ``max_items`` contents whose sizes sum to at most ``capacity``."""

    def __init__(self, capacity, max_items):
        if not capacity > 0:
            raise ValueError("capacity must be positive")
        if max_items < 1:
            raise ValueError("max_items must be at least 1")
        self.capacity = capacity
        self.max_items = max_items
        self.entries = {}

    def __contains__(self, content):
        return content in self.entries

    def __len__(self):
        return len(self.entries)

    @property
    def used(self):
        return sum(e.size for e in self.entries.values())

    def contents(self):
        return sorted(self.entries)

    def fits(self, size, without=()):
        kept = [c for c in self.entries if c not in without]
        used = sum(self.entries[c].size for c in kept)
        return len(kept) < self.max_items and used + size <= self.capacity

    def insert(self, content, size, now):
        self.entries[content] = Entry(size, now, now)

    def evict(self, content):
        del self.entries[content]

    def touch(self, content, now):
        """Record a request hit (recency bookkeeping for LRU)."""
        if content in self.entries:
            self.entries[content].last_used = now


def _eviction_order(policy, cache, rng):
    names = list(cache.entries)
    if policy == "lru":
        return sorted(names, key=lambda c: (cache.entries[c].last_used, c))
    if policy == "fifo":
        return sorted(names, key=lambda c: (cache.entries[c].inserted, c))
    order = rng.permutation(len(names))
    return [names[i] for i in order]


def pac_victim(residents, popularity, u):
    """Resident to evict: probability proportional to 1/popularity.

    With two residents i, j this evicts i with probability p_j/(p_i+p_j).
    ``u`` is a uniform draw in [0, 1).
    """
    w = np.array([1.0 / popularity[c] for c in residents])
    cum = np.cumsum(w) / w.sum()
    k = int(np.searchsorted(cum, u, side="left"))
    return residents[min(k, len(residents) - 1)]


def apply_cache_policy(policy, cache, new_content, size, popularity, rng, now=0.0):
    """Offer ``new_content`` of ``size`` to ``cache``; return True if stored.

    PAC stores the content if it fits; a full cache evicts one resident with
    probability proportional to 1/popularity, and only when the survivors
    plus the new content fit.  LRU, FIFO and RANDOM evict in their order
    until the new content fits.  A content larger than the whole cache is
    never stored.
    """
    policy = check_policy(policy)
    if new_content in cache:
        raise ValueError("content already cached")
    if size > cache.capacity:
        return False
    if cache.fits(size):
        cache.insert(new_content, size, now)
        return True
    if policy == "pac":
        u = rng.random()
        if len(cache) < cache.max_items:
            return False
        residents = sorted(cache.entries)
        victim = pac_victim(residents, popularity, u)
        if not cache.fits(size, without=(victim,)):
            return False
        cache.evict(victim)
        cache.insert(new_content, size, now)
        return True
    evicted = []
    for victim in _eviction_order(policy, cache, rng):
        evicted.append(victim)
        if cache.fits(size, without=evicted):
            break
    for victim in evicted:
        cache.evict(victim)
    cache.insert(new_content, size, now)
    return True


def slot_cache(slots, initial=()):
    """Fixed-slot cache of unit-size contents (satellite/BS)."""
    cache = BoundedCache(float(slots), slots)
    for c in initial:
        cache.insert(int(c), 1.0, 0.0)
    return cache
