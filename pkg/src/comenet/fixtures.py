"""Deterministic molecular and synthetic graph fixtures used by tests and the CLI."""

from __future__ import annotations

import numpy as np

from .graphs import Graph3D, build_radius_graph

CC_BOND = 1.54  # angstrom
CC_ANGLE = np.deg2rad(111.7)


def butane_skeleton(dihedral_deg, bond=CC_BOND, angle=CC_ANGLE, cutoff=2.0):
    """Four-carbon chain C0-C1-C2-C3 with a prescribed central dihedral.

    All bond lengths and bond angles are identical across conformers, so with
    rotation angles disabled their tuple sets coincide; only the central-bond
    rotation angle distinguishes them.
    """
    tau = np.deg2rad(dihedral_deg)
    p1 = np.zeros(3)
    p2 = np.array([0.0, 0.0, bond])
    # C0 in the xz half-plane x > 0, at the bond angle from the C1->C2 axis
    p0 = p1 + bond * np.array([np.sin(angle), 0.0, np.cos(angle)])
    # C3 off C2 at the bond angle from C2->C1, rotated by tau about the
    # C1->C2 axis so that dihedral(C0, C1, C2, C3) = tau
    base = np.array([np.sin(angle), 0.0, -np.cos(angle)])
    ct, st = np.cos(tau), np.sin(tau)
    rot = np.array([[ct, -st, 0.0], [st, ct, 0.0], [0.0, 0.0, 1.0]])
    p3 = p2 + bond * (rot @ base)
    positions = np.stack([p0, p1, p2, p3])
    return build_radius_graph([6, 6, 6, 6], positions, cutoff)


def water_molecule(cutoff=2.0):
    """Bent 3-atom molecule: O at origin, two H at 0.9572 A, 104.5 degrees."""
    r = 0.9572
    half = np.deg2rad(104.5) / 2.0
    positions = np.array(
        [
            [0.0, 0.0, 0.0],
            [r * np.sin(half), 0.0, r * np.cos(half)],
            [-r * np.sin(half), 0.0, r * np.cos(half)],
        ]
    )
    return build_radius_graph([8, 1, 1], positions, cutoff)


def chain_graph(n, spacing=1.5, jitter=0.3, seed=0, cutoff=None):
    """A path of n nodes, slightly bent so dihedrals are non-degenerate."""
    rng = np.random.default_rng(seed)
    positions = np.zeros((n, 3))
    direction = np.array([0.0, 0.0, 1.0])
    for i in range(1, n):
        step = direction + jitter * rng.normal(size=3)
        step /= np.linalg.norm(step)
        positions[i] = positions[i - 1] + spacing * step
    if cutoff is None:
        cutoff = spacing * 1.05
    # path edges only: make sure non-adjacent nodes are farther than the cutoff
    g = build_radius_graph([6] * n, positions, cutoff)
    return g


def mirror_graph(g: Graph3D) -> Graph3D:
    """Reflect through the yz-plane; distances (hence edges) are preserved."""
    pos = g.positions.copy()
    pos[:, 0] *= -1.0
    return Graph3D(g.species, pos, g.cutoff, g.edges)


def _box_side(n, cutoff, target_degree):
    """Box side so a uniform point sees ~target_degree neighbors within cutoff."""
    volume = n * (4.0 / 3.0) * np.pi * cutoff**3 / target_degree
    return volume ** (1.0 / 3.0)


def random_box_graph(n, target_degree, seed, cutoff=1.5, max_resample=3):
    """Uniform points in a density-calibrated box; resamples toward the target."""
    side = _box_side(n, cutoff, target_degree)
    key = tuple(seed) if isinstance(seed, tuple) else (seed,)
    for attempt in range(max_resample + 1):
        rng = np.random.default_rng(key + (attempt,))
        positions = rng.uniform(0.0, side, size=(n, 3))
        g = build_radius_graph([6] * n, positions, cutoff)
        achieved = g.num_directed_edges / n
        if achieved == 0:
            side *= 0.8
            continue
        side *= (achieved / target_degree) ** (1.0 / 3.0)
        if abs(achieved - target_degree) <= 0.2 * target_degree:
            return g
    return g


def random_connected_graph(n, target_degree, seed, cutoff=1.5, max_tries=50):
    """Connected random-box graph with every node of degree >= 1."""
    for attempt in range(max_tries):
        g = random_box_graph(n, target_degree, (seed, 7919, attempt), cutoff)
        degrees = [g.degree(i) for i in range(n)]
        if min(degrees) >= 1 and g.is_connected():
            return g
        # densify: a smaller box raises the degree and connects stragglers
        target_degree = min(target_degree * 1.3, n - 1)
    raise RuntimeError(f"could not sample a connected graph for seed {seed}")


def lattice_graph(n_side, spacing=1.0, cutoff=None, jitter=0.0, seed=0):
    """Cubic lattice of n_side^3 nodes; cutoff defaults to nearest neighbors only."""
    if cutoff is None:
        cutoff = spacing * 1.05
    grid = np.arange(n_side) * spacing
    xs, ys, zs = np.meshgrid(grid, grid, grid, indexing="ij")
    positions = np.stack([xs.ravel(), ys.ravel(), zs.ravel()], axis=1)
    if jitter:
        rng = np.random.default_rng(seed)
        positions = positions + jitter * rng.normal(size=positions.shape)
    return build_radius_graph([6] * len(positions), positions, cutoff)
