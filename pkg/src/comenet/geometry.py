"""Per-edge geometric descriptors (d, theta, phi, tau) over 1-hop neighborhoods.

Every directed edge (i, j) gets a 4-tuple: the distance d, the polar angle
theta between i->f_i and i->j (f_i being i's nearest neighbor), the signed
azimuthal dihedral phi about the axis i->f_i between the half-planes through
s_i (second nearest) and j, and the signed rotation dihedral tau about the
axis i->j between the half-planes through f_{i\\j} and f_{j\\i} (each
endpoint's nearest neighbor excluding the other endpoint).

Sign convention: dihedral(a, b, c, d) is the right-hand-rule angle about the
axis b->c carrying the half-plane through a onto the half-plane through d.
Angles are radians; theta in [0, pi], phi and tau in (-pi, pi].  When a
reference node is missing (degree-1 endpoints) or a defining plane collapses,
the angle is the sentinel 0 and the corresponding reference is marked
degenerate (None) so downstream consumers can skip it.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .errors import CollinearReference, EmptyGraph, ZeroVector
from .graphs import Graph3D, NeighborTable, build_neighbor_table

EPS_VEC = 1e-10  # cross-product norms below this give meaningless plane normals

DEGENERATE = None  # sentinel for a missing/collapsed reference node


@dataclass(frozen=True)
class EdgeRefs:
    """Reference-node provenance for one edge; None marks a degenerate slot."""

    f_i: int | None
    s_i: int | None
    f_i_excl: int | None  # i's nearest neighbor excluding j
    f_j_excl: int | None  # j's nearest neighbor excluding i


@dataclass(frozen=True)
class EdgeTuple:
    i: int
    j: int
    d: float
    theta: float
    phi: float
    tau: float
    refs: EdgeRefs
    phi_degenerate: bool = False
    tau_degenerate: bool = False

    @property
    def flags(self):
        out = []
        if self.phi_degenerate:
            out.append("phi_degenerate")
        if self.tau_degenerate:
            out.append("tau_degenerate")
        return ";".join(out)


@dataclass(frozen=True)
class TupleSet:
    """All directed-edge tuples of one graph, sorted by (i, j)."""

    tuples: tuple
    graph_hash: str

    def __len__(self):
        return len(self.tuples)

    def by_edge(self):
        return {(t.i, t.j): t for t in self.tuples}


def topology_hash(n, edges):
    """Content digest of the graph topology (node count + directed edge set)."""
    h = hashlib.sha256()
    h.update(str(n).encode())
    for i, j in sorted(edges):
        h.update(f"{i},{j};".encode())
    return h.hexdigest()


def _wrap_signed(angle):
    """Map atan2 output into (-pi, pi]."""
    if angle <= -np.pi:
        return angle + 2 * np.pi
    return angle


def angle_between(u, v):
    """Unsigned angle between two vectors via atan2(|u x v|, u.v), in [0, pi]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if np.linalg.norm(u) < EPS_VEC or np.linalg.norm(v) < EPS_VEC:
        raise ZeroVector("cannot measure an angle against a near-zero vector")
    return float(np.arctan2(np.linalg.norm(np.cross(u, v)), np.dot(u, v)))


def dihedral(a, b, c, d):
    """Signed dihedral about the axis b->c, from half-plane of a to half-plane of d.

    Right-hand rule about b->c; result in (-pi, pi].  Raises CollinearReference
    when either defining plane collapses.
    """
    a, b, c, d = (np.asarray(p, dtype=np.float64) for p in (a, b, c, d))
    axis = c - b
    axis_norm = np.linalg.norm(axis)
    if axis_norm < EPS_VEC:
        raise ZeroVector("dihedral axis has near-zero length")
    n = axis / axis_norm
    va = (a - b) - np.dot(a - b, n) * n
    vd = (d - c) - np.dot(d - c, n) * n
    if np.linalg.norm(va) < EPS_VEC or np.linalg.norm(vd) < EPS_VEC:
        raise CollinearReference("a defining plane of the dihedral is degenerate")
    x = np.dot(va, vd)
    y = np.dot(np.cross(n, va), vd)
    return _wrap_signed(float(np.arctan2(y, x)))


def reference_nodes_excluding(nt: NeighborTable, i, j):
    """Nearest neighbor of i excluding j: f_i when f_i != j, else s_i.

    Returns DEGENERATE (None) when no candidate remains.
    """
    f_i = nt.first[i]
    if f_i is not None and f_i != j:
        return f_i
    return nt.second[i]  # may be None


def edge_tuple(g: Graph3D, nt: NeighborTable, i, j) -> EdgeTuple:
    """Compute the (d, theta, phi, tau) tuple for the directed edge (i, j)."""
    if (i, j) not in g.edges:
        raise KeyError(f"({i}, {j}) is not an edge of the graph")
    p = g.positions
    f_i, s_i = nt.first[i], nt.second[i]
    fi_ex = reference_nodes_excluding(nt, i, j)
    fj_ex = reference_nodes_excluding(nt, j, i)

    d = float(np.linalg.norm(p[j] - p[i]))
    theta = angle_between(p[f_i] - p[i], p[j] - p[i])

    phi, phi_deg = 0.0, True
    if s_i is not None:
        try:
            phi = dihedral(p[s_i], p[i], p[f_i], p[j])
            phi_deg = False
        except CollinearReference:
            pass
    tau, tau_deg = 0.0, True
    if fi_ex is not None and fj_ex is not None:
        try:
            tau = dihedral(p[fi_ex], p[i], p[j], p[fj_ex])
            tau_deg = False
        except CollinearReference:
            pass

    refs = EdgeRefs(f_i, s_i, fi_ex, fj_ex)
    return EdgeTuple(i, j, d, theta, phi, tau, refs, phi_deg, tau_deg)


def _vector_dihedral(pa, pb, pc, pd):
    """Vectorized signed dihedrals; returns (angles, degenerate_mask)."""
    axis = pc - pb
    n = axis / np.maximum(np.linalg.norm(axis, axis=1, keepdims=True), 1e-300)
    va = (pa - pb) - np.sum((pa - pb) * n, axis=1, keepdims=True) * n
    vd = (pd - pc) - np.sum((pd - pc) * n, axis=1, keepdims=True) * n
    na = np.linalg.norm(va, axis=1)
    nd = np.linalg.norm(vd, axis=1)
    degenerate = (
        (np.linalg.norm(axis, axis=1) < EPS_VEC) | (na < EPS_VEC) | (nd < EPS_VEC)
    )
    x = np.sum(va * vd, axis=1)
    y = np.sum(np.cross(n, va) * vd, axis=1)
    ang = np.arctan2(y, x)
    ang[ang <= -np.pi] += 2 * np.pi
    ang[degenerate] = 0.0
    return ang, degenerate


def _edge_arrays(g: Graph3D, nt: NeighborTable):
    """Sorted directed edges and their reference indices (-1 where absent)."""
    edges = np.array(sorted(g.edges), dtype=np.int64).reshape(-1, 2)
    I, J = edges[:, 0], edges[:, 1]
    first = np.array([-1 if f is None else f for f in nt.first], dtype=np.int64)
    second = np.array([-1 if s is None else s for s in nt.second], dtype=np.int64)
    F, S = first[I], second[I]
    FI_EX = np.where(F != J, F, S)
    FJ, SJ = first[J], second[J]
    FJ_EX = np.where(FJ != I, FJ, SJ)
    return I, J, F, S, FI_EX, FJ_EX


def transform(g: Graph3D, nt: NeighborTable | None = None) -> TupleSet:
    """Compute the full tuple set for every directed edge, vectorized over edges."""
    if g.n == 0:
        raise EmptyGraph("cannot featurize an empty graph")
    if nt is None:
        nt = build_neighbor_table(g)
    if not g.edges:
        return TupleSet((), topology_hash(g.n, g.edges))

    p = g.positions
    I, J, F, S, FI_EX, FJ_EX = _edge_arrays(g, nt)

    rij = p[J] - p[I]
    d = np.linalg.norm(rij, axis=1)
    rif = p[F] - p[I]
    theta = np.arctan2(np.linalg.norm(np.cross(rif, rij), axis=1),
                       np.sum(rif * rij, axis=1))

    phi, phi_bad = _vector_dihedral(p[np.maximum(S, 0)], p[I], p[F], p[J])
    phi_deg = (S < 0) | phi_bad
    phi[phi_deg] = 0.0

    tau, tau_bad = _vector_dihedral(
        p[np.maximum(FI_EX, 0)], p[I], p[J], p[np.maximum(FJ_EX, 0)]
    )
    tau_deg = (FI_EX < 0) | (FJ_EX < 0) | tau_bad
    tau[tau_deg] = 0.0

    tuples = []
    for k in range(len(I)):
        refs = EdgeRefs(
            int(F[k]),
            None if S[k] < 0 else int(S[k]),
            None if FI_EX[k] < 0 else int(FI_EX[k]),
            None if FJ_EX[k] < 0 else int(FJ_EX[k]),
        )
        tuples.append(
            EdgeTuple(
                int(I[k]), int(J[k]), float(d[k]), float(theta[k]),
                float(phi[k]), float(tau[k]), refs,
                bool(phi_deg[k]), bool(tau_deg[k]),
            )
        )
    return TupleSet(tuple(tuples), topology_hash(g.n, g.edges))


def geometry_pass(g: Graph3D, nt: NeighborTable | None = None):
    """Raw (d, theta, phi, tau) arrays without per-edge object wrapping.

    Same arithmetic as :func:`transform`; used by the benchmark harness where
    object construction overhead would drown out the angle arithmetic.
    """
    if nt is None:
        nt = build_neighbor_table(g)
    p = g.positions
    I, J, F, S, FI_EX, FJ_EX = _edge_arrays(g, nt)
    rij = p[J] - p[I]
    d = np.linalg.norm(rij, axis=1)
    rif = p[F] - p[I]
    theta = np.arctan2(np.linalg.norm(np.cross(rif, rij), axis=1),
                       np.sum(rif * rij, axis=1))
    phi, _ = _vector_dihedral(p[np.maximum(S, 0)], p[I], p[F], p[J])
    tau, _ = _vector_dihedral(
        p[np.maximum(FI_EX, 0)], p[I], p[J], p[np.maximum(FJ_EX, 0)]
    )
    return d, theta, phi, tau


# ---------------------------------------------------------------------------
# tuple export / import


def tuples_to_csv(ts: TupleSet, path):
    """CSV export: header i,j,d,theta,phi,tau,flags with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "d", "theta", "phi", "tau", "flags"])
        for t in ts.tuples:
            writer.writerow(
                [t.i, t.j, f"{t.d:.17g}", f"{t.theta:.17g}",
                 f"{t.phi:.17g}", f"{t.tau:.17g}", t.flags]
            )


def tuples_to_json(ts: TupleSet, path):
    records = []
    for t in ts.tuples:
        records.append(
            {
                "i": t.i, "j": t.j, "d": t.d, "theta": t.theta,
                "phi": t.phi, "tau": t.tau,
                "flags": t.flags,
                "refs": {
                    "f_i": t.refs.f_i, "s_i": t.refs.s_i,
                    "f_i_excl": t.refs.f_i_excl, "f_j_excl": t.refs.f_j_excl,
                },
            }
        )
    with open(path, "w") as fh:
        json.dump(records, fh, indent=1)


def _rebuild_refs(rows, n):
    """Recover f_i / s_i / exclusion references from per-edge distances alone."""
    per_node = {}
    for i, j, d, *_ in rows:
        per_node.setdefault(i, []).append((d, j))
    first, second = [None] * n, [None] * n
    for i, entries in per_node.items():
        entries.sort()
        first[i] = entries[0][1]
        if len(entries) > 1:
            second[i] = entries[1][1]
    excl = {}
    for i, entries in per_node.items():
        for _, j in entries:
            cand = [(d, k) for d, k in entries if k != j]
            excl[(i, j)] = cand[0][1] if cand else None
    return first, second, excl


def tuples_from_rows(rows, n):
    """Build a TupleSet from raw (i, j, d, theta, phi, tau, flags) rows."""
    first, second, excl = _rebuild_refs(rows, n)
    tuples = []
    edges = {(i, j) for i, j, *_ in rows}
    for i, j, d, theta, phi, tau, flags in sorted(rows):
        refs = EdgeRefs(first[i], second[i], excl.get((i, j)), excl.get((j, i)))
        tuples.append(
            EdgeTuple(
                i, j, d, theta, phi, tau, refs,
                "phi_degenerate" in flags, "tau_degenerate" in flags,
            )
        )
    return TupleSet(tuple(tuples), topology_hash(n, edges))


def tuples_from_csv(path, n=None):
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                (int(rec["i"]), int(rec["j"]), float(rec["d"]),
                 float(rec["theta"]), float(rec["phi"]), float(rec["tau"]),
                 rec.get("flags", ""))
            )
    if n is None:
        n = 1 + max(max(i, j) for i, j, *_ in rows)
    return tuples_from_rows(rows, n)


def tuples_from_json(path, n=None):
    with open(path) as fh:
        records = json.load(fh)
    rows = [
        (r["i"], r["j"], r["d"], r["theta"], r["phi"], r["tau"], r.get("flags", ""))
        for r in records
    ]
    if n is None:
        n = 1 + max(max(r["i"], r["j"]) for r in records)
    return tuples_from_rows(rows, n)
