import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetcache.caching import build_local_chain
from hetcache.content import ContentCatalog, SizeDistribution
from hetcache.exceptions import NotIrreducible, SolverDiverged
from hetcache.solver import (RateMatrix, check_irreducible, reachable_class, solve_on_reachable,
                             solve_stationary)
from scipy.sparse.csgraph import connected_components


def two_state(a=2.0, b=1.0):
    return RateMatrix.from_transitions(2, [(0, 1, a), (1, 0, b)])


@pytest.mark.parametrize("method", ["dense", "power"])
def test_two_state_closed_form(method):
    pi = solve_stationary(two_state(), method=method)
    assert pi.probabilities == pytest.approx([1 / 3, 2 / 3], abs=1e-10)
    assert pi.residual <= 1e-10


def test_birth_death_matches_product_form():
    lam, mu, n = 1.3, 2.0, 12
    tr = [(k, k + 1, lam) for k in range(n - 1)] + [(k + 1, k, mu) for k in range(n - 1)]
    pi = solve_stationary(RateMatrix.from_transitions(n, tr)).probabilities
    ref = (lam / mu) ** np.arange(n)
    assert pi == pytest.approx(ref / ref.sum(), abs=1e-12)


def test_single_state_is_trivial():
    pi = solve_stationary(RateMatrix.from_transitions(1, []))
    assert pi.probabilities.tolist() == [1.0]


def test_reducible_chain_raises():
    m = RateMatrix.from_transitions(3, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0)])
    assert not check_irreducible(m)
    with pytest.raises(NotIrreducible):
        solve_stationary(m)


def test_solve_on_reachable_zeroes_transient_states():
    # state 2 leads into {0, 1} and is never entered
    m = RateMatrix.from_transitions(3, [(0, 1, 2.0), (1, 0, 1.0), (2, 0, 5.0)])
    assert reachable_class(m).tolist() == [0, 1]
    pi = solve_on_reachable(m)
    assert pi.probabilities == pytest.approx([1 / 3, 2 / 3, 0.0], abs=1e-12)


def test_reachable_set_that_is_not_closed_class_raises():
    m = RateMatrix.from_transitions(3, [(0, 1, 1.0), (1, 2, 1.0)])
    with pytest.raises(NotIrreducible):
        reachable_class(m)


def test_power_iteration_cap_raises():
    # a long birth-death path mixes far slower than 25 uniformized steps
    n = 200
    tr = [(k, k + 1, 1.0) for k in range(n - 1)] + [(k + 1, k, 1.1) for k in range(n - 1)]
    with pytest.raises(SolverDiverged):
        solve_stationary(RateMatrix.from_transitions(n, tr), method="power", max_iter=25)


def test_rate_matrix_validation():
    with pytest.raises(ValueError):
        RateMatrix.from_transitions(2, [(0, 0, 1.0)])
    with pytest.raises(ValueError):
        RateMatrix.from_transitions(2, [(0, 1, -1.0)])
    with pytest.raises(ValueError):
        RateMatrix.from_transitions(2, [(0, 2, 1.0)])


def test_duplicate_transitions_are_summed():
    m = RateMatrix.from_transitions(2, [(0, 1, 1.0), (0, 1, 1.0), (1, 0, 1.0)])
    assert m.generator().toarray()[0].tolist() == [-2.0, 2.0]


def test_local_chain_irreducibility_matches_graph_search():
    cat = ContentCatalog(3, 1.2, 2.4)
    m = build_local_chain(cat, SizeDistribution(25.0), 50.0, 1 / 600)
    n_comp, _ = connected_components(m.offdiagonal(), directed=True, connection="strong")
    assert check_irreducible(m) == (n_comp == 1) is True


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 60), st.integers(0, 2**32 - 1))
def test_power_and_dense_agree(n, seed):
    rng = np.random.default_rng(seed)
    tr = [(i, (i + 1) % n, rng.uniform(0.1, 5)) for i in range(n)]
    tr += [(int(a), int(b), rng.uniform(0.01, 5)) for a, b in rng.integers(0, n, (3 * n, 2))
           if a != b]
    m = RateMatrix.from_transitions(n, tr)
    dense = solve_stationary(m, method="dense").probabilities
    power = solve_stationary(m, method="power").probabilities
    assert np.max(np.abs(dense - power)) < 1e-8
    assert dense.sum() == pytest.approx(1.0)
