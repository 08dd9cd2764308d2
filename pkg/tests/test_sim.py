import numpy as np
import pytest
from scipy import stats as sps

from hetcache import SystemParams
from hetcache.exceptions import EmptyWindow
from hetcache.metrics import METRIC_COLUMNS
from hetcache.ractmc import BS, D2D, SAT, SAT_U
from hetcache.sim import (DeviceCaches, SimStats, Topology, aggregate, draw_topology,
                          empirical_metrics, poisson_disc, run_replication)

SHORT = SystemParams(horizon=200.0)


@pytest.fixture(scope="module")
def short_run():
    return run_replication(SHORT, seed=3)


def test_replay_is_deterministic(short_run):
    again = run_replication(SHORT, seed=3)
    assert again.fingerprint() == short_run.fingerprint()
    assert run_replication(SHORT, seed=4).fingerprint() != short_run.fingerprint()


def test_request_accounting(short_run):
    s = short_run
    assert s.requests == s.local_hits + s.blocked_busy + s.blocked_unavailable + s.admitted.sum()
    assert s.requests > 0 and s.local_hits > 0
    assert np.all(s.completed + s.dropped <= s.admitted + 10)
    assert s.max_d2d <= SHORT.d_max


def test_no_pu_traffic_no_drops():
    s = run_replication(SystemParams(horizon=200.0, lambda_pu=0.0), seed=1)
    assert s.dropped.sum() == 0 and s.pu_arrivals == 0


def test_universal_source_off_blocks_uncached_content():
    s = run_replication(SystemParams(horizon=200.0, universal_source=False), seed=2)
    assert s.admitted[SAT_U] == 0 and s.admitted[3] == 0
    assert s.blocked_unavailable > 0


def test_overlay_off_single_d2d_link():
    s = run_replication(SystemParams(horizon=300.0, overlay=False, lambda_hu=12.0), seed=0)
    assert s.max_d2d <= 1


class AllContentsAt:
    """Device cache stand-in: ``holder`` stores every content."""

    def __init__(self, holder):
        self.holder = holder

    def holds(self, devices, content, t):
        return np.asarray(devices) == self.holder


def test_single_holder_serves_everything_by_d2d():
    p = SystemParams(horizon=2000.0, lambda_pu=0.0, lambda_hu=0.05, r_sat=0.0, r_bs=0.0,
                     r_dev=1.0)
    topo = Topology(np.array([[0.0, 0.0], [10.0, 0.0]]), 300.0, 60.0)
    s = run_replication(p, seed=5, topology=topo, device_caches=AllContentsAt(1))
    assert s.blocked_unavailable == 0
    assert s.admitted[D2D] > 0
    assert s.admitted.sum() == s.admitted[D2D]
    assert s.local_hits > 0
    assert s.local_hits + s.admitted[D2D] + s.blocked_busy == s.requests


def test_relay_update_modes():
    s = run_replication(SHORT, seed=3, relay_updates="deliveries")
    assert s.requests > 0
    with pytest.raises(ValueError):
        run_replication(SHORT, seed=3, relay_updates="never")


def test_policies_share_traffic():
    a = run_replication(SHORT, seed=9, policy="pac")
    b = run_replication(SHORT, seed=9, policy="random")
    assert a.requests == b.requests
    assert a.pu_arrivals == b.pu_arrivals


def test_empirical_metrics_single_bs_service():
    p = SystemParams()
    st = SimStats(0, "pac", horizon=110.0, warmup=10.0, requests=1)
    bits, cap = 25e6, p.link_budget().hu_bs
    st.admitted[BS] = 1
    st.completed[BS] = 1
    st.bits[BS] = bits
    st.energy[0] = p.p_bs_ch * bits / cap
    r = empirical_metrics(st, p)
    assert r.throughput[BS] == pytest.approx(bits / 100.0)
    assert r.power[0] == pytest.approx(p.p_bs_ch * bits / cap / 100.0)
    assert r.epb == pytest.approx(r.p_overall / r.g_hu)
    assert "zero_d2d_arrivals" in r.flags


def test_empirical_metrics_edge_cases():
    p = SystemParams()
    r = empirical_metrics(SimStats(0, "pac", horizon=10.0, warmup=0.0), p)
    assert r.g_hu == 0.0 and {"no_requests", "zero_goodput"} <= set(r.flags)
    with pytest.raises(EmptyWindow):
        empirical_metrics(SimStats(0, "pac", horizon=10.0, warmup=10.0), p)


def test_aggregate_t_interval(short_run):
    reps = [empirical_metrics(run_replication(SHORT, seed=s), SHORT) for s in range(3)]
    agg = aggregate(reps)
    x = np.array([r.g_hu for r in reps])
    half = sps.t.ppf(0.975, 2) * x.std(ddof=1) / np.sqrt(3)
    assert agg.mean["g_hu"] == pytest.approx(x.mean())
    assert agg.half_width["g_hu"] == pytest.approx(half)
    row = agg.as_row()
    assert all(c in row and f"{c}_ci95" in row for c in METRIC_COLUMNS)
    lo, hi = agg.interval("g_hu")
    assert lo <= agg.mean["g_hu"] <= hi
    with pytest.raises(ValueError):
        aggregate([])


def test_device_cache_history_queries():
    pop = np.array([0.5, 0.3, 0.2])
    dc = DeviceCaches(4, pop, 1.0, 50.0, 2, 25.0, 30.0, "lru", np.random.default_rng(0), 100.0)
    occ = dc.occupancy(50.0)
    assert occ.shape == (4, 3)
    assert np.all(occ.sum(axis=1) <= 2)
    for d in range(4):
        held = dc.contents_at(d, 50.0)
        assert held == sorted(np.flatnonzero(occ[d]).tolist())
        for c in range(3):
            assert dc.holds([d], c, 50.0)[0] == (c in held)
    assert not dc.occupancy(0.0).any()


def test_device_cache_streams_identical_across_policies():
    pop = np.array([0.5, 0.3, 0.2])
    a = DeviceCaches(3, pop, 2.0, 50.0, 2, 25.0, 30.0, "pac", np.random.default_rng(4), 50.0)
    b = DeviceCaches(3, pop, 2.0, 50.0, 2, 25.0, 30.0, "fifo", np.random.default_rng(4), 50.0)
    assert np.array_equal(a._flat, b._flat)


def test_topology_neighbours():
    rng = np.random.default_rng(0)
    topo = draw_topology(SystemParams(), rng)
    assert abs(topo.n_devices - 0.0018 * np.pi * 300**2) < 5 * np.sqrt(509)
    for d, nb in enumerate(topo.neighbours[:50]):
        dists = [topo.distance(d, int(o)) for o in nb]
        assert all(x <= 60.0 for x in dists) and d not in nb
        assert dists == sorted(dists)
        for o in nb:
            assert d in topo.neighbours[int(o)]


def test_poisson_disc_stays_inside():
    pts = poisson_disc(0.01, 50.0, np.random.default_rng(2))
    assert np.all(np.hypot(pts[:, 0], pts[:, 1]) <= 50.0)
    assert poisson_disc(0.0, 50.0, np.random.default_rng(2)).shape == (0, 2)


def test_satellite_direct_service_happens():
    s = run_replication(SystemParams(horizon=300.0, r_sat=1.0, r_bs=0.0, r_dev=0.0), seed=1)
    assert s.admitted[SAT] > 0
    assert s.admitted[BS] == 0 and s.admitted[D2D] == 0
