import math

import numpy as np
import pytest
from scipy.optimize import minimize

from comenet.errors import DisconnectedGraph, InconsistentTuples, TopologyMismatch
from comenet.fixtures import (
    butane_skeleton,
    chain_graph,
    mirror_graph,
    random_connected_graph,
    water_molecule,
)
from comenet.geometry import angle_between, dihedral, transform, tuples_from_rows
from comenet.graphs import apply_se3, build_radius_graph, random_se3
from comenet.reconstruct import (
    PlacementCase,
    Verdict,
    align,
    discriminate,
    place_case1,
    place_case2,
    reconstruct,
    round_trip,
)


class TestPlaceCase1:
    def test_axis_aligned_frame(self):
        # f on +z, s defining +x: (d=1, theta=pi/2, phi=0) lands on (1, 0, 0)
        p_i = np.zeros(3)
        p_f = np.array([0.0, 0.0, 1.0])
        p_s = np.array([1.0, 0.0, 1.0])
        p_j = place_case1(p_i, p_f, p_s, 1.0, math.pi / 2, 0.0)
        assert np.allclose(p_j, [1.0, 0.0, 0.0], atol=1e-12)

    def test_forward_inverse_fixed_point(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            p_i, p_f, p_s = rng.normal(size=(3, 3)) * 2.0
            if np.linalg.norm(np.cross(p_f - p_i, p_s - p_i)) < 1e-3:
                continue
            d = rng.uniform(0.5, 2.0)
            theta = rng.uniform(0.1, math.pi - 0.1)
            phi = rng.uniform(-math.pi + 1e-6, math.pi)
            p_j = place_case1(p_i, p_f, p_s, d, theta, phi)
            assert np.linalg.norm(p_j - p_i) == pytest.approx(d, abs=1e-9)
            assert angle_between(p_f - p_i, p_j - p_i) == pytest.approx(
                theta, abs=1e-9
            )
            assert dihedral(p_s, p_i, p_f, p_j) == pytest.approx(phi, abs=1e-9)


class TestPlaceCase2:
    def test_cis_coplanar(self):
        p_i = np.zeros(3)
        p_c = np.array([0.0, 0.0, 1.0])
        p_ref = np.array([1.0, 0.0, 1.5])
        p_j = place_case2(p_i, p_c, p_ref, 1.0, 2.0, 0.0)
        # tau = 0: j lies in the plane of the chain, same side as ref
        assert abs(p_j[1]) < 1e-12
        assert p_j[0] > 0

    def test_trans_coplanar(self):
        p_i = np.zeros(3)
        p_c = np.array([0.0, 0.0, 1.0])
        p_ref = np.array([1.0, 0.0, 1.5])
        p_j = place_case2(p_i, p_c, p_ref, 1.0, 2.0, math.pi)
        assert abs(p_j[1]) < 1e-12
        assert p_j[0] < 0

    def test_forward_inverse_fixed_point(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            p_i, p_c, p_ref = rng.normal(size=(3, 3)) * 2.0
            if np.linalg.norm(np.cross(p_c - p_i, p_ref - p_i)) < 1e-3:
                continue
            d = rng.uniform(0.5, 2.0)
            theta = rng.uniform(0.1, math.pi - 0.1)
            tau = rng.uniform(-math.pi + 1e-6, math.pi)
            p_j = place_case2(p_i, p_c, p_ref, d, theta, tau)
            assert np.linalg.norm(p_j - p_i) == pytest.approx(d, abs=1e-9)
            assert angle_between(p_c - p_i, p_j - p_i) == pytest.approx(
                theta, abs=1e-9
            )
            # the rotation-angle convention: half-plane of j carried onto ref
            assert dihedral(p_j, p_i, p_c, p_ref) == pytest.approx(tau, abs=1e-9)


class TestAlign:
    def test_exact_se3_copy(self):
        rng = np.random.default_rng(2)
        p1 = rng.normal(size=(12, 3))
        t = random_se3(3)
        p2 = p1 @ t.rotation.T + t.translation
        report = align(p1, p2)
        assert report.rmsd < 1e-10
        assert not report.reflection_used

    def test_chiral_mirror_not_se3_reachable(self):
        p1 = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)
        p2 = p1.copy()
        p2[:, 0] *= -1
        assert align(p1, p2, allow_reflection=False).rmsd > 0.1
        report = align(p1, p2, allow_reflection=True)
        assert report.rmsd < 1e-10
        assert report.reflection_used

    def test_matches_quaternion_optimizer_oracle(self):
        rng = np.random.default_rng(4)
        p1 = rng.normal(size=(20, 3))
        p2 = rng.normal(size=(20, 3))
        kabsch = align(p1, p2).rmsd

        a = p1 - p1.mean(axis=0)
        b = p2 - p2.mean(axis=0)

        def rmsd_of_quat(q):
            q = q / np.linalg.norm(q)
            w, x, y, z = q
            rot = np.array(
                [
                    [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                    [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                    [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
                ]
            )
            return np.sqrt(np.mean(np.sum((a @ rot.T - b) ** 2, axis=1)))

        best = min(
            minimize(rmsd_of_quat, rng.normal(size=4), method="Nelder-Mead",
                     options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 5000}).fun
            for _ in range(5)
        )
        assert kabsch == pytest.approx(best, abs=1e-8)

    def test_length_mismatch(self):
        from comenet.errors import LengthMismatch

        with pytest.raises(LengthMismatch):
            align(np.zeros((3, 3)), np.zeros((4, 3)))


class TestReconstruct:
    def test_equilateral_triangle(self):
        pos = [[0, 0, 0], [1, 0, 0], [0.5, math.sqrt(3) / 2, 0]]
        g = build_radius_graph([6] * 3, pos, 1.5)
        result, report = round_trip(g)
        assert report.rmsd < 1e-10

    def test_chain_of_four_uses_case2_only(self):
        g = chain_graph(4)
        result, report = round_trip(g)
        assert report.rmsd < 1e-8
        non_seed = [c for c in result.placement_case if c is not PlacementCase.SEED]
        assert non_seed == [PlacementCase.CASE2]

    def test_case1_appears_on_dense_graphs(self):
        g = random_connected_graph(24, 6, seed=5)
        result, report = round_trip(g)
        assert report.rmsd < 1e-6
        assert PlacementCase.CASE1 in result.placement_case

    def test_placement_order_respects_connectivity(self):
        g = random_connected_graph(30, 5, seed=6)
        result, _ = round_trip(g)
        adj = {i: set(g.neighbors(i)) for i in range(g.n)}
        placed = set(result.order[:3])
        for node in result.order[3:]:
            assert adj[node] & placed
            placed.add(node)

    def test_two_node_graph_trivial_with_warning(self):
        g = build_radius_graph([1, 1], [[0, 0, 0], [1, 0, 0]], 1.5)
        result, report = round_trip(g)
        assert report.rmsd < 1e-12
        assert result.warning is not None

    def test_water_molecule(self):
        _, report = round_trip(water_molecule())
        assert report.rmsd < 1e-10

    def test_butane_conformers(self):
        for ang in (0.0, 60.0, 180.0, 300.0):
            _, report = round_trip(butane_skeleton(ang))
            assert report.rmsd < 1e-10

    def test_random_graphs_round_trip(self):
        for seed in range(20):
            g = random_connected_graph(4 + 3 * seed, 2 + seed % 7, seed=seed)
            _, report = round_trip(g)
            assert report.rmsd < 1e-6, f"seed {seed}"

    def test_disconnected_rejected(self):
        pos = [[0, 0, 0], [1, 0, 0], [10, 0, 0], [11, 0, 0]]
        g = build_radius_graph([6] * 4, pos, 1.5)
        with pytest.raises(DisconnectedGraph):
            reconstruct(transform(g), n=4)

    def test_inconsistent_tuples_detected(self):
        g = random_connected_graph(12, 4, seed=7)
        ts = transform(g)
        rows = [
            (t.i, t.j, t.d, t.theta, t.phi, t.tau, t.flags) for t in ts.tuples
        ]
        # corrupt one non-seed edge distance in one direction only
        i, j, d, theta, phi, tau, flags = rows[-1]
        rows[-1] = (i, j, d + 0.5, theta, phi, tau, flags)
        with pytest.raises(InconsistentTuples):
            reconstruct(tuples_from_rows(rows, g.n), n=g.n)


class TestDiscriminate:
    def test_se3_equivalent(self):
        g = random_connected_graph(15, 4, seed=8)
        moved = apply_se3(g, random_se3(9))
        assert discriminate(g, moved, use_tau=True) is Verdict.EQUIVALENT
        assert discriminate(g, moved, use_tau=False) is Verdict.EQUIVALENT

    def test_butane_conformers_distinct_with_tau(self):
        anti, gauche = butane_skeleton(180.0), butane_skeleton(60.0)
        assert discriminate(anti, gauche, use_tau=True) is Verdict.DISTINCT

    def test_butane_conformers_equivalent_without_tau(self):
        anti, gauche = butane_skeleton(180.0), butane_skeleton(60.0)
        assert discriminate(anti, gauche, use_tau=False) is Verdict.EQUIVALENT

    def test_chiral_mirror_distinct(self):
        g = butane_skeleton(60.0)  # gauche conformer is chiral
        assert discriminate(g, mirror_graph(g), use_tau=True) is Verdict.DISTINCT

    def test_equivalent_pairs_reconstruct_to_same_shape(self):
        g = random_connected_graph(15, 4, seed=10)
        moved = apply_se3(g, random_se3(11))
        assert discriminate(g, moved, use_tau=True) is Verdict.EQUIVALENT
        r1 = reconstruct(transform(g), n=g.n)
        r2 = reconstruct(transform(moved), n=g.n)
        assert align(r1.positions, r2.positions).rmsd < 1e-6

    def test_topology_mismatch(self):
        g1 = random_connected_graph(10, 3, seed=12)
        g2 = random_connected_graph(10, 3, seed=13)
        if g1.edges != g2.edges:
            with pytest.raises(TopologyMismatch):
                discriminate(g1, g2)
