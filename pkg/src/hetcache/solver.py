"""Stationary distributions of finite continuous-time Markov chains.

Chains are described by a :class:`RateMatrix` of labelled off-diagonal
transitions; the diagonal is implied as the negative row sum.  Small chains
are solved directly, large ones by power iteration on the uniformized chain.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .exceptions import NotIrreducible, SolverDiverged

DEFAULT_TOL = 1e-10
DENSE_LIMIT = 2000
MAX_ITER = 10**6
UNIFORMIZATION_FACTOR = 1.05


@dataclass(frozen=True)
class RateMatrix:
    """Sparse CTMC generator given as (source, destination, rate) triples.

    Duplicate (source, destination) pairs are summed.
    """

    n_states: int
    rows: np.ndarray
    cols: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.int64)
        cols = np.asarray(self.cols, dtype=np.int64)
        rates = np.asarray(self.rates, dtype=float)
        if not (rows.shape == cols.shape == rates.shape):
            raise ValueError("rows, cols and rates must have equal length")
        if self.n_states < 1:
            raise ValueError("n_states must be positive")
        if rates.size:
            if np.any(rates < 0) or not np.all(np.isfinite(rates)):
                raise ValueError("transition rates must be finite and nonnegative")
            if np.any(rows == cols):
                raise ValueError("self-loop transitions are not allowed")
            if rows.min() < 0 or cols.min() < 0 or max(rows.max(), cols.max()) >= self.n_states:
                raise ValueError("transition index out of range")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "rates", rates)

    @classmethod
    def from_transitions(cls, n_states, transitions):
        transitions = list(transitions)
        if not transitions:
            empty = np.zeros(0)
            return cls(n_states, empty, empty, empty)
        src, dst, rate = zip(*transitions)
        return cls(n_states, np.array(src), np.array(dst), np.array(rate, dtype=float))

    def offdiagonal(self):
        """Off-diagonal rates as CSR, zero-rate entries dropped."""
        keep = self.rates > 0
        m = sp.csr_matrix(
            (self.rates[keep], (self.rows[keep], self.cols[keep])),
            shape=(self.n_states, self.n_states),
        )
        m.sum_duplicates()
        return m

    def generator(self):
        """Full generator Q (CSR) with the implied diagonal."""
        off = self.offdiagonal()
        out = np.asarray(off.sum(axis=1)).ravel()
        return (off - sp.diags(out)).tocsr()

    def exit_rates(self):
        return np.asarray(self.offdiagonal().sum(axis=1)).ravel()

    def scaled(self, factor):
        return RateMatrix(self.n_states, self.rows, self.cols, self.rates * factor)

    def restrict(self, states):
        """Sub-chain on ``states`` (sorted index array); edges leaving it are dropped."""
        states = np.asarray(states, dtype=np.int64)
        index = np.full(self.n_states, -1, dtype=np.int64)
        index[states] = np.arange(states.size)
        keep = (index[self.rows] >= 0) & (index[self.cols] >= 0)
        return RateMatrix(
            int(states.size), index[self.rows[keep]], index[self.cols[keep]], self.rates[keep]
        )


@dataclass(frozen=True)
class StationaryDistribution:
    probabilities: np.ndarray
    residual: float
    method: str
    iterations: int = 0

    def __len__(self):
        return self.probabilities.size

    def __getitem__(self, item):
        return self.probabilities[item]


def check_irreducible(matrix):
    """True iff the directed transition graph is strongly connected."""
    if matrix.n_states == 1:
        return True
    n_comp, _ = connected_components(matrix.offdiagonal(), directed=True, connection="strong")
    return n_comp == 1


def reachable_class(matrix, root=0):
    """Sorted indices of states reachable from ``root``.

    Raises NotIrreducible unless the reachable set is closed and strongly
    connected, i.e. it is the unique recurrent class seen from ``root``.
    """
    off = matrix.offdiagonal()
    order = breadth_first_order(off, root, directed=True, return_predecessors=False)
    states = np.sort(order)
    if states.size > 1:
        sub = off[states][:, states]
        n_comp, _ = connected_components(sub, directed=True, connection="strong")
        if n_comp != 1:
            raise NotIrreducible(
                f"states reachable from {root} do not form a single communicating class"
            )
    return states


def _residual(pi, Q):
    return float(np.max(np.abs(Q.T @ pi))) if pi.size else 0.0


def _clean(pi):
    pi = np.where(pi < 0, 0.0, pi)
    return pi / pi.sum()


def _solve_dense(Q):
    n = Q.shape[0]
    A = Q.T.toarray()
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    return np.linalg.solve(A, b)


def _solve_power(Q, tol, max_iter, check_every=25):
    n = Q.shape[0]
    diag = -Q.diagonal()
    lam = UNIFORMIZATION_FACTOR * diag.max()
    # pi P = pi + pi Q / lam
    PT = (sp.identity(n, format="csr") + Q / lam).T.tocsr()
    pi = np.full(n, 1.0 / n)
    QT = Q.T.tocsr()
    it = 0
    while it < max_iter:
        for _ in range(check_every):
            pi = PT @ pi
        it += check_every
        pi /= pi.sum()
        if np.max(np.abs(QT @ pi)) <= tol:
            return pi, it
    raise SolverDiverged(
        f"power iteration did not reach residual {tol:g} within {max_iter} iterations"
    )


def solve_stationary(matrix, tolerance=DEFAULT_TOL, max_iter=MAX_ITER, method="auto"):
    """Solve pi Q = 0, sum(pi) = 1 for an irreducible chain.

    Parameters
    ----------
    matrix : RateMatrix
    tolerance : float
        Bound on the infinity norm of ``pi Q``.
    max_iter : int
        Iteration cap for the power method.
    method : {"auto", "dense", "power"}
        ``auto`` uses a dense direct solve up to 2000 states.

    Returns
    -------
    StationaryDistribution
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    n = matrix.n_states
    if n == 1:
        return StationaryDistribution(np.ones(1), 0.0, "trivial")
    if not check_irreducible(matrix):
        raise NotIrreducible("transition graph is not strongly connected")
    Q = matrix.generator()
    if method == "auto":
        method = "dense" if n <= DENSE_LIMIT else "power"
    iterations = 0
    if method == "dense":
        try:
            pi = _clean(_solve_dense(Q))
        except np.linalg.LinAlgError:
            # numerically singular under extreme rate spread
            pi, iterations = _solve_power(Q, tolerance, max_iter)
            method = "power"
        res = _residual(pi, Q)
        if res > tolerance and method == "dense":
            # one step of iterative refinement on the normalized system
            try:
                pi = _clean(pi + _solve_dense_correction(Q, pi))
            except np.linalg.LinAlgError:
                pass
            res = _residual(pi, Q)
    elif method == "power":
        pi, iterations = _solve_power(Q, tolerance, max_iter)
        pi = _clean(pi)
        res = _residual(pi, Q)
    else:
        raise ValueError(f"unknown method {method!r}")
    if res > tolerance:
        raise SolverDiverged(f"residual {res:.3e} above tolerance {tolerance:g}")
    return StationaryDistribution(pi, res, method, iterations)


def _solve_dense_correction(Q, pi):
    n = Q.shape[0]
    A = Q.T.toarray()
    r = -(A @ pi)
    A[-1, :] = 1.0
    r[-1] = 1.0 - pi.sum()
    return np.linalg.solve(A, r)


def solve_on_reachable(matrix, tolerance=DEFAULT_TOL, root=0, **kwargs):
    """Stationary distribution of the recurrent class containing ``root``.

    States outside the class get probability zero.  Used for chains whose
    parameters make part of the state space transient (no PU traffic, a
    disabled mode).
    """
    states = reachable_class(matrix, root)
    sub = solve_stationary(matrix.restrict(states), tolerance, **kwargs)
    pi = np.zeros(matrix.n_states)
    pi[states] = sub.probabilities
    res = _residual(pi, matrix.generator())
    return StationaryDistribution(pi, res, sub.method, sub.iterations)
