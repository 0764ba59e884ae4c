"""3D graphs with radius-cutoff adjacency, sorted neighbor tables, and rigid transforms.

A graph holds integer atom species, Cartesian positions in angstrom, and a
symmetric directed edge set built from a distance cutoff.  Neighbor tables cache
each node's distance-sorted neighbor list together with its nearest and second
nearest neighbors, which downstream angle computations use as reference nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DuplicatePositions, EmptyGraph, InvalidRotation

EPS_POS = 1e-8  # minimum allowed separation between two nodes, in angstrom

# brute-force all-pairs construction below this node count; cell lists above
_CELL_LIST_THRESHOLD = 256


@dataclass(frozen=True)
class Graph3D:
    """Immutable 3D graph: species, positions, cutoff, and a symmetric edge set."""

    species: tuple
    positions: np.ndarray  # (n, 3) float64, read-only
    cutoff: float
    edges: frozenset  # ordered pairs (i, j), i != j, symmetric

    def __post_init__(self):
        pos = np.ascontiguousarray(np.asarray(self.positions, dtype=np.float64))
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "species", tuple(self.species))

    @property
    def n(self):
        return len(self.species)

    @property
    def num_directed_edges(self):
        return len(self.edges)

    def degree(self, i):
        return sum(1 for (a, _) in self.edges if a == i)

    def neighbors(self, i):
        return sorted(j for (a, j) in self.edges if a == i)

    def is_connected(self):
        """BFS connectivity over the undirected edge set."""
        if self.n == 0:
            return False
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return bool(seen.all())


@dataclass(frozen=True)
class SE3Transform:
    """Proper rigid motion: rotation (det +1, orthogonal) plus translation."""

    rotation: np.ndarray  # (3, 3)
    translation: np.ndarray  # (3,)

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=np.float64)
        t = np.asarray(self.translation, dtype=np.float64)
        if rot.shape != (3, 3) or t.shape != (3,):
            raise InvalidRotation("rotation must be 3x3 and translation length 3")
        if not np.allclose(rot.T @ rot, np.eye(3), atol=1e-12):
            raise InvalidRotation("rotation matrix is not orthogonal")
        if abs(np.linalg.det(rot) - 1.0) > 1e-12:
            raise InvalidRotation("rotation matrix must have determinant +1")
        rot = np.ascontiguousarray(rot)
        t = np.ascontiguousarray(t)
        rot.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))


@dataclass(frozen=True)
class NeighborTable:
    """Per-node neighbor lists sorted by distance, with cached references.

    ``neighbors[i]`` is a tuple of ``(k, d_ik)`` pairs sorted ascending by
    distance, ties broken by smaller node index.  ``first[i]`` / ``second[i]``
    are the nearest / second-nearest neighbor indices, or ``None`` for nodes of
    degree 0 / degree <= 1.
    """

    neighbors: tuple = field(repr=False)
    first: tuple
    second: tuple

    def degree(self, i):
        return len(self.neighbors[i])

    def distance(self, i, j):
        for k, d in self.neighbors[i]:
            if k == j:
                return d
        raise KeyError(f"({i}, {j}) is not an edge")


def _pairwise_within_cutoff(positions, cutoff):
    """Brute-force O(n^2) pair search. Returns list of (i, j) with i < j."""
    n = len(positions)
    pairs = []
    for i in range(n):
        d = np.linalg.norm(positions[i + 1 :] - positions[i], axis=1)
        for off in np.nonzero(d <= cutoff)[0]:
            pairs.append((i, i + 1 + int(off)))
    return pairs


def _cell_list_pairs(positions, cutoff):
    """Cell-list pair search, O(n k) expected for bounded density."""
    cells = {}
    keys = np.floor(positions / cutoff).astype(np.int64)
    for idx, key in enumerate(map(tuple, keys)):
        cells.setdefault(key, []).append(idx)
    offsets = [
        (a, b, c) for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1)
    ]
    pairs = []
    for key, members in cells.items():
        members_arr = np.array(members)
        for off in offsets:
            other = cells.get((key[0] + off[0], key[1] + off[1], key[2] + off[2]))
            if other is None:
                continue
            for i in members:
                cand = [j for j in other if j > i]
                if not cand:
                    continue
                cand = np.array(cand)
                d = np.linalg.norm(positions[cand] - positions[i], axis=1)
                for j in cand[d <= cutoff]:
                    pairs.append((i, int(j)))
    return pairs


def build_radius_graph(species, positions, cutoff):
    """Build a Graph3D whose edges are exactly the pairs within ``cutoff``.

    Raises EmptyGraph for zero nodes and DuplicatePositions when two nodes are
    closer than EPS_POS.
    """
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    species = tuple(int(z) for z in species)
    n = len(species)
    if n == 0:
        raise EmptyGraph("graph must contain at least one node")
    if positions.shape[0] != n:
        raise ValueError("species and positions lengths differ")
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")

    if n < _CELL_LIST_THRESHOLD:
        pairs = _pairwise_within_cutoff(positions, cutoff)
    else:
        pairs = _cell_list_pairs(positions, cutoff)

    edges = set()
    for i, j in pairs:
        if np.linalg.norm(positions[i] - positions[j]) < EPS_POS:
            raise DuplicatePositions(f"nodes {i} and {j} are closer than {EPS_POS} A")
        edges.add((i, j))
        edges.add((j, i))
    return Graph3D(species, positions, float(cutoff), frozenset(edges))


def build_neighbor_table(g: Graph3D) -> NeighborTable:
    """Sorted neighbor lists plus nearest/second-nearest references per node."""
    lists = [[] for _ in range(g.n)]
    for i, j in g.edges:
        d = float(np.linalg.norm(g.positions[j] - g.positions[i]))
        lists[i].append((j, d))
    neighbors, first, second = [], [], []
    for entries in lists:
        entries.sort(key=lambda kd: (kd[1], kd[0]))
        neighbors.append(tuple(entries))
        first.append(entries[0][0] if len(entries) >= 1 else None)
        second.append(entries[1][0] if len(entries) >= 2 else None)
    return NeighborTable(tuple(neighbors), tuple(first), tuple(second))


def apply_se3(g: Graph3D, t: SE3Transform) -> Graph3D:
    """Rigidly transform all positions; species and edges are untouched."""
    new_pos = g.positions @ t.rotation.T + t.translation
    return Graph3D(g.species, new_pos, g.cutoff, g.edges)


def random_rotation(rng) -> np.ndarray:
    """Uniform random rotation matrix from a normalized random quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def random_se3(seed, translation_scale=10.0) -> SE3Transform:
    """Deterministic-per-seed uniform rotation and bounded translation."""
    rng = np.random.default_rng(seed)
    rot = random_rotation(rng)
    # re-orthonormalize so the quaternion round-off stays below the 1e-12 gate
    u, _, vt = np.linalg.svd(rot)
    rot = u @ vt
    if np.linalg.det(rot) < 0:
        u[:, -1] *= -1
        rot = u @ vt
    t = rng.uniform(-translation_scale, translation_scale, size=3)
    return SE3Transform(rot, t)
