"""Constructive inversion of the tuple featurization back to coordinates.

Given the per-edge (d, theta, phi, tau) tuples of a connected graph, nodes are
re-placed one by one: a seed triple fixes the gauge (center at the origin, its
nearest neighbor on +z, second nearest in the xz half-plane with x > 0), then
every remaining node is positioned from one placed neighbor using either

* CASE1 - the spherical coordinates (d, theta, phi) in the local frame spanned
  by the neighbor's own two reference nodes, when both are already placed; or
* CASE2 - (d, theta, tau) along a placed chain j - i - c - ref, when only the
  axis partner c is available and a rotation-angle tuple on edge (i, c)
  references j.

The rebuilt coordinates agree with the source up to a global proper rigid
motion; alignment quality is measured with a Kabsch superposition.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateChain,
    DegenerateFrame,
    DisconnectedGraph,
    InconsistentTuples,
    LengthMismatch,
    TopologyMismatch,
)
from .geometry import TupleSet, transform
from .graphs import Graph3D

_AXIAL_SIN_EPS = 1e-9  # below this sin(theta), the azimuth is immaterial


class PlacementCase(enum.Enum):
    SEED = "SEED"
    CASE1 = "CASE1"
    CASE2 = "CASE2"
    SKIPPED_DEGENERATE = "SKIPPED_DEGENERATE"


class Verdict(enum.Enum):
    EQUIVALENT = "EQUIVALENT"
    DISTINCT = "DISTINCT"


@dataclass(frozen=True)
class ReconstructionResult:
    positions: np.ndarray  # (n, 3); skipped nodes hold NaN rows
    placement_case: tuple  # per-node PlacementCase
    order: tuple  # node placement sequence
    rmsd: float | None = None  # filled by round_trip / align against a source
    warning: str | None = None

    @property
    def placed_mask(self):
        return np.array(
            [c is not PlacementCase.SKIPPED_DEGENERATE for c in self.placement_case]
        )


@dataclass(frozen=True)
class AlignmentReport:
    rotation: np.ndarray
    translation: np.ndarray
    rmsd: float
    reflection_used: bool


def _local_frame(p_i, p_axis, p_ref):
    """Orthonormal (u, ex, ey): u along i->axis, ex toward ref's perpendicular part."""
    u = p_axis - p_i
    nu = np.linalg.norm(u)
    if nu < 1e-12:
        raise DegenerateFrame("axis endpoints coincide")
    u = u / nu
    w = p_ref - p_i
    ex = w - np.dot(w, u) * u
    nx = np.linalg.norm(ex)
    if nx < 1e-10:
        raise DegenerateFrame("reference node is collinear with the axis")
    ex = ex / nx
    return u, ex, np.cross(u, ex)


def place_case1(p_i, p_f, p_s, d, theta, phi):
    """Invert (d, theta, phi): axis i->f, azimuth measured from s's half-plane.

    phi follows the right-hand rule about i->f carrying the s half-plane onto
    the target half-plane, matching the forward dihedral convention.
    """
    u, ex, ey = _local_frame(p_i, p_f, p_s)
    return p_i + d * (
        np.cos(theta) * u + np.sin(theta) * (np.cos(phi) * ex + np.sin(phi) * ey)
    )


def place_case2(p_i, p_c, p_ref, d, theta, tau):
    """Invert (d, theta, tau): axis i->c, chain reference ref attached at c.

    tau is the rotation-angle dihedral about i->c from the half-plane through
    the new node onto the half-plane through ref, so the new node sits at
    azimuth -tau relative to ref.
    """
    u = p_c - p_i
    nu = np.linalg.norm(u)
    if nu < 1e-12:
        raise DegenerateChain("axis endpoints coincide")
    u = u / nu
    w = p_ref - p_c
    ex = w - np.dot(w, u) * u
    nx = np.linalg.norm(ex)
    if nx < 1e-10:
        raise DegenerateChain("chain reference is collinear with the axis")
    ex = ex / nx
    ey = np.cross(u, ex)
    return p_i + d * (
        np.cos(theta) * u + np.sin(theta) * (np.cos(tau) * ex - np.sin(tau) * ey)
    )


def _place_axial(p_i, p_axis, d, theta):
    """theta ~ 0 or pi: the target lies on the axis line; no azimuth needed."""
    u = p_axis - p_i
    u = u / np.linalg.norm(u)
    return p_i + d * np.cos(theta) * u


def align(p1, p2, allow_reflection=False) -> AlignmentReport:
    """Optimal rigid superposition of p1 onto p2 (Kabsch), proper by default."""
    p1 = np.asarray(p1, dtype=np.float64).reshape(-1, 3)
    p2 = np.asarray(p2, dtype=np.float64).reshape(-1, 3)
    if p1.shape != p2.shape or len(p1) < 1:
        raise LengthMismatch("point sets must have equal nonzero lengths")
    c1, c2 = p1.mean(axis=0), p2.mean(axis=0)
    a, b = p1 - c1, p2 - c2
    h = a.T @ b
    u, _, vt = np.linalg.svd(h)
    det = np.linalg.det(vt.T @ u.T)
    reflection_used = False
    corr = np.eye(3)
    if det < 0 and not allow_reflection:
        corr[2, 2] = -1.0
    elif det < 0 and allow_reflection:
        reflection_used = True
    rot = vt.T @ corr @ u.T
    translation = c2 - rot @ c1
    rmsd = float(np.sqrt(np.mean(np.sum((a @ rot.T - b) ** 2, axis=1))))
    return AlignmentReport(rot, translation, rmsd, reflection_used)


def _adjacency(ts: TupleSet):
    adj = {}
    for t in ts.tuples:
        adj.setdefault(t.i, set()).add(t.j)
        adj.setdefault(t.j, set()).add(t.i)
    return adj


def _check_connected(adj, nodes):
    start = min(nodes)
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if seen != set(nodes):
        raise DisconnectedGraph("tuple topology is not connected")


def reconstruct(ts: TupleSet, n=None, tolerance=1e-6) -> ReconstructionResult:
    """Rebuild coordinates from a complete tuple set of a connected graph."""
    if len(ts) == 0:
        raise DisconnectedGraph("tuple set is empty")
    by_edge = ts.by_edge()
    nodes = sorted({t.i for t in ts.tuples} | {t.j for t in ts.tuples})
    if n is None:
        n = max(nodes) + 1
    adj = _adjacency(ts)
    if set(nodes) != set(range(n)):
        raise DisconnectedGraph("tuple topology leaves isolated nodes")
    _check_connected(adj, nodes)

    pos = np.full((n, 3), np.nan)
    case = [PlacementCase.SKIPPED_DEGENERATE] * n
    order = []
    placed = set()
    warning = None

    def mark(node, p, tag):
        for k in sorted(adj[node] & placed):
            t = by_edge.get((node, k)) or by_edge.get((k, node))
            if t is not None and abs(np.linalg.norm(p - pos[k]) - t.d) > tolerance:
                raise InconsistentTuples(
                    f"placing node {node} breaks distance to node {k} "
                    f"beyond {tolerance}"
                )
        pos[node] = p
        case[node] = tag
        order.append(node)
        placed.add(node)

    # --- seed ---------------------------------------------------------------
    seed = next((i for i in nodes if len(adj[i]) >= 2), None)
    if seed is None:
        # two-node graph (or single edge): gauge-fix along +z, vacuous beyond
        i = nodes[0]
        j = min(adj[i])
        t = by_edge[(i, j)]
        mark(i, np.zeros(3), PlacementCase.SEED)
        mark(j, np.array([0.0, 0.0, t.d]), PlacementCase.SEED)
        warning = "graph too small for angular constraints; trivial placement"
    else:
        i = seed
        t_ref = next(t for t in ts.tuples if t.i == i)
        f, s = t_ref.refs.f_i, t_ref.refs.s_i
        t_if, t_is = by_edge[(i, f)], by_edge[(i, s)]
        mark(i, np.zeros(3), PlacementCase.SEED)
        mark(f, np.array([0.0, 0.0, t_if.d]), PlacementCase.SEED)
        th = t_is.theta  # angle at i between i->f and i->s
        mark(
            s,
            t_is.d * np.array([np.sin(th), 0.0, np.cos(th)]),
            PlacementCase.SEED,
        )

    # --- inductive placement ------------------------------------------------
    # A node j is fixed by three tuple-borne quantities: the distance d_ij to
    # a placed neighbor i, the polar angle of j about a placed axis i->w (a
    # theta tuple whose vertex reference is w, or whose target is j with axis
    # partner w), and j's azimuth about that axis relative to placed geometry.
    # Azimuth sources, tried in order:
    #   CASE1(a) - phi of edge (i, j) itself, when both of i's references are
    #              placed (the textbook spherical-coordinate inversion);
    #   CASE1(b) - phi of a sibling edge (i, c) with c placed, when j is i's
    #              second reference and so spans phi's starting half-plane;
    #   CASE2    - the rotation angle of edge (i, w) whose i-side exclusion
    #              reference is j, anchored at w's placed reference.
    def _polar_angle(i, j, w, t_ij):
        if t_ij.refs.f_i == w:
            return t_ij.theta
        t_iw = by_edge.get((i, w))
        if t_iw is not None and t_iw.refs.f_i == j:
            return t_iw.theta
        return None

    def _try_axis(j, i, w, t_ij):
        theta = _polar_angle(i, j, w, t_ij)
        if theta is None:
            return False
        if abs(np.sin(theta)) < _AXIAL_SIN_EPS:
            mark(j, _place_axial(pos[i], pos[w], t_ij.d, theta),
                 PlacementCase.CASE1)
            return True

        if t_ij.refs.f_i == w:
            s = t_ij.refs.s_i
            # CASE1(a): j at azimuth +phi from i's second reference
            if (not t_ij.phi_degenerate and s is not None and s != j
                    and s in placed):
                try:
                    p = place_case1(pos[i], pos[w], pos[s], t_ij.d, theta,
                                    t_ij.phi)
                except DegenerateFrame:
                    p = None
                if p is not None:
                    mark(j, p, PlacementCase.CASE1)
                    return True
            # CASE1(b): j is the second reference of i, so any sibling edge
            # (i, c) measures phi *from* j's half-plane: j sits at -phi from c
            if s == j:
                for c in sorted(adj[i] & placed):
                    if c in (j, w):
                        continue
                    t_ic = by_edge[(i, c)]
                    if t_ic.phi_degenerate:
                        continue
                    try:
                        p = place_case1(pos[i], pos[w], pos[c], t_ij.d, theta,
                                        -t_ic.phi)
                    except DegenerateFrame:
                        continue
                    mark(j, p, PlacementCase.CASE1)
                    return True

        # CASE2: rotation angle of edge (i, w) whose i-side reference is j
        t_iw, t_wi = by_edge.get((i, w)), by_edge.get((w, i))
        for t_rot in (t_iw, t_wi):
            if t_rot is None or t_rot.tau_degenerate:
                continue
            if t_rot is t_iw:
                ref_j, ref_w = t_rot.refs.f_i_excl, t_rot.refs.f_j_excl
            else:
                ref_j, ref_w = t_rot.refs.f_j_excl, t_rot.refs.f_i_excl
            if ref_j != j or ref_w is None or ref_w == j or ref_w not in placed:
                continue
            try:
                p = place_case2(pos[i], pos[w], pos[ref_w], t_ij.d, theta,
                                t_rot.tau)
            except DegenerateChain:
                continue
            mark(j, p, PlacementCase.CASE2)
            return True
        return False

    def try_place(j):
        for i in sorted(adj[j] & placed):
            t_ij = by_edge[(i, j)]
            for w in sorted(adj[i] & placed):
                if w != j and _try_axis(j, i, w, t_ij):
                    return True
        return False

    remaining = [v for v in nodes if v not in placed]
    progress = True
    while remaining and progress:
        progress = False
        still = []
        for j in remaining:
            if (adj[j] & placed) and try_place(j):
                progress = True
            else:
                still.append(j)
        remaining = still

    if remaining and warning is None:
        warning = f"{len(remaining)} node(s) skipped: no non-degenerate placement"

    return ReconstructionResult(pos, tuple(case), tuple(order), None, warning)


def round_trip(g: Graph3D, allow_reflection=False):
    """transform -> reconstruct -> align against the source graph.

    Returns the reconstruction result with its rmsd filled in (over the placed
    nodes) together with the alignment report.
    """
    ts = transform(g)
    result = reconstruct(ts, n=g.n)
    mask = result.placed_mask
    report = align(result.positions[mask], g.positions[mask], allow_reflection)
    if not mask.all():
        # an incomplete placement must not masquerade as a perfect round trip
        report = replace(report, rmsd=float("inf"))
    return replace(result, rmsd=report.rmsd), report


def discriminate(g1: Graph3D, g2: Graph3D, use_tau=True, tolerance=1e-6) -> Verdict:
    """Compare tuple sets of two same-topology graphs field by field."""
    if g1.species != g2.species or g1.edges != g2.edges:
        raise TopologyMismatch("graphs differ in species or topology")
    t1, t2 = transform(g1), transform(g2)
    for a, b in zip(t1.tuples, t2.tuples):
        fields = [(a.d, b.d), (a.theta, b.theta), (a.phi, b.phi)]
        if use_tau:
            fields.append((a.tau, b.tau))
        for x, y in fields:
            delta = abs(x - y)
            # signed angles wrap at +-pi; compare on the circle
            delta = min(delta, abs(delta - 2 * np.pi))
            if delta > tolerance:
                return Verdict.DISTINCT
    return Verdict.EQUIVALENT
