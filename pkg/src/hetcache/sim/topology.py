"""Static PPP placement of devices in the BS cell."""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree


@dataclass
class Topology:
    """Device positions (m) and the neighbours of each device within ``r_int``.

    ``neighbours[d]`` lists the other devices within the interference radius,
    nearest first.
    """

    positions: np.ndarray
    radius: float
    r_int: float
    neighbours: list = field(default_factory=list)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        if not self.neighbours:
            self.neighbours = _neighbour_lists(self.positions, self.r_int)

    @property
    def n_devices(self):
        return self.positions.shape[0]

    def distance(self, a, b):
        return float(np.hypot(*(self.positions[a] - self.positions[b])))


def _neighbour_lists(pos, r):
    if len(pos) == 0:
        return []
    tree = cKDTree(pos)
    out = []
    for d, idx in enumerate(tree.query_ball_point(pos, r)):
        idx = np.array([i for i in idx if i != d], dtype=np.int64)
        if idx.size:
            dist = np.hypot(*(pos[idx] - pos[d]).T)
            idx = idx[np.argsort(dist, kind="stable")]
        out.append(idx)
    return out


def poisson_disc(density, radius, rng):
    """PPP of intensity ``density`` (per m^2) on a disc of ``radius`` m."""
    n = rng.poisson(density * np.pi * radius**2)
    rho = radius * np.sqrt(rng.random(n))
    phi = 2.0 * np.pi * rng.random(n)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi)])


def draw_topology(params, rng):
    pos = poisson_disc(params.hu_density, params.r_bs_cell, rng)
    return Topology(pos, params.r_bs_cell, params.r_int)
