"""Shared independent oracles used across the test modules.

These deliberately avoid the library's internal code paths: dihedrals via
explicit plane normals, reference selection recomputed from scratch per edge,
angles via their own arithmetic.  Tests compare library output against them.
"""

import math

import numpy as np
import pytest

from comenet.fixtures import random_connected_graph


def oracle_dihedral(a, b, c, d):
    """Signed dihedral via explicit plane normals (right-hand rule about b->c)."""
    a, b, c, d = (np.asarray(p, dtype=np.float64) for p in (a, b, c, d))
    axis = c - b
    n1 = np.cross(b - a, axis)  # normal of plane(a, b, c)
    n2 = np.cross(axis, d - c)  # normal of plane(b, c, d)
    m1 = np.cross(n1, axis / np.linalg.norm(axis))
    # sign fixed so the convention matches a right-hand rotation about b->c
    ang = math.atan2(-float(np.dot(m1, n2)), float(np.dot(n1, n2)))
    if ang <= -math.pi:
        ang += 2 * math.pi
    return ang


def oracle_angle(u, v):
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(np.dot(u, v)))


def naive_edge_tuples(g):
    """O(n k^2) recomputation of every directed-edge tuple from scratch.

    References are re-derived per edge by sorting that node's neighbors by
    (distance, index); angles come from the plane-normal oracle.  Returns a
    dict keyed by (i, j) of (d, theta, phi, tau, phi_degenerate, tau_degenerate).
    """
    p = g.positions
    neighbors = {i: [] for i in range(g.n)}
    for i, j in g.edges:
        neighbors[i].append(j)

    def sorted_nbrs(i):
        return sorted(neighbors[i], key=lambda k: (np.linalg.norm(p[k] - p[i]), k))

    def excl(i, j):
        cand = [k for k in sorted_nbrs(i) if k != j]
        return cand[0] if cand else None

    out = {}
    for i, j in g.edges:
        nbrs = sorted_nbrs(i)
        f_i = nbrs[0]
        s_i = nbrs[1] if len(nbrs) > 1 else None
        fi_ex, fj_ex = excl(i, j), excl(j, i)
        d = float(np.linalg.norm(p[j] - p[i]))
        theta = oracle_angle(p[f_i] - p[i], p[j] - p[i])

        def plane_ok(ref, base, axis_from, axis_to):
            """Perpendicular part of ref-base w.r.t. the axis exceeds 1e-10."""
            axis = p[axis_to] - p[axis_from]
            perp = np.linalg.norm(np.cross(p[ref] - p[base], axis))
            return perp / np.linalg.norm(axis) >= 1e-10

        phi, phi_deg = 0.0, True
        if s_i is not None and plane_ok(s_i, i, i, f_i) and plane_ok(j, i, i, f_i):
            phi = oracle_dihedral(p[s_i], p[i], p[f_i], p[j])
            phi_deg = False
        tau, tau_deg = 0.0, True
        if (
            fi_ex is not None
            and fj_ex is not None
            and plane_ok(fi_ex, i, i, j)
            and plane_ok(fj_ex, j, i, j)
        ):
            tau = oracle_dihedral(p[fi_ex], p[i], p[j], p[fj_ex])
            tau_deg = False
        out[(i, j)] = (d, theta, phi, tau, phi_deg, tau_deg)
    return out


@pytest.fixture
def medium_random_graph():
    return random_connected_graph(20, 5, seed=3)
