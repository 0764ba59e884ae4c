import numpy as np
import pytest

from comenet.bench import (
    BenchScenario,
    build_scenario_graph,
    comenet_count,
    comenet_index_arrays,
    comenet_kernel,
    dmp_baseline_count,
    dmp_index_arrays,
    dmp_kernel,
    fit_exponent,
    measure_scenario,
    run_scaling,
    torsion_count_comparison,
)
from comenet.fixtures import chain_graph, random_box_graph, random_connected_graph
from comenet.geometry import transform
from comenet.graphs import build_radius_graph


def enumerate_triplets(g):
    """Brute-force directed 2-hop triplet enumeration oracle."""
    count = 0
    for i in range(g.n):
        nbrs = g.neighbors(i)
        for k in nbrs:
            for j in nbrs:
                if k != j:
                    count += 1
    return count


class TestCounts:
    def test_star_graph(self):
        # center at the origin, six leaves on the +-axes: leaves are mutually
        # farther apart than the cutoff, so only center-leaf edges exist
        k = 6
        axes = np.array(
            [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
        )
        pos = np.vstack([np.zeros(3), 5.0 * axes])
        g = build_radius_graph([6] * (k + 1), pos, 5.2)
        assert g.degree(0) == k and g.degree(1) == 1
        assert dmp_baseline_count(g) == k * (k - 1)
        assert dmp_baseline_count(g) == enumerate_triplets(g)

    def test_chain_counts(self):
        n = 12
        g = chain_graph(n)
        assert comenet_count(g) == 2 * (n - 1)
        assert dmp_baseline_count(g) == 2 * (n - 2)

    def test_complete_graph_count(self):
        rng = np.random.default_rng(0)
        pos = rng.normal(size=(7, 3))
        g = build_radius_graph([6] * 7, pos, 100.0)
        assert comenet_count(g) == 7 * 6

    def test_random_graph_matches_enumeration(self):
        for seed in range(3):
            g = random_box_graph(40, 5, seed=seed)
            assert dmp_baseline_count(g) == enumerate_triplets(g)

    def test_comenet_count_matches_transform(self):
        g = random_connected_graph(25, 5, seed=1)
        assert comenet_count(g) == len(transform(g).tuples)

    def test_count_gap_identity(self):
        # sum deg(deg-1) >= sum deg - n when min degree >= 2
        g = random_connected_graph(30, 5, seed=2)
        if min(g.degree(i) for i in range(g.n)) >= 2:
            assert dmp_baseline_count(g) >= comenet_count(g) - g.n


class TestTorsionCounts:
    def test_paper_example(self):
        assert torsion_count_comparison(3, 3) == (7, 9)

    def test_trivial_cases(self):
        assert torsion_count_comparison(1, 1) == (3, 1)
        assert torsion_count_comparison(10, 10) == (21, 100)

    def test_invalid(self):
        with pytest.raises(ValueError):
            torsion_count_comparison(0, 3)


class TestKernels:
    def test_kernel_shapes(self):
        g = random_box_graph(60, 5, seed=3)
        p1, a1 = comenet_index_arrays(g)
        d, theta, phi, tau = comenet_kernel(p1, a1)
        assert len(d) == comenet_count(g)
        p2, a2 = dmp_index_arrays(g)
        d2, ang, tor = dmp_kernel(p2, a2)
        assert len(d2) == dmp_baseline_count(g)

    def test_comenet_kernel_matches_transform(self):
        g = random_connected_graph(25, 5, seed=4)
        p, arrays = comenet_index_arrays(g)
        d, theta, phi, tau = comenet_kernel(p, arrays)
        ts = transform(g)
        for k, t in enumerate(ts.tuples):
            assert d[k] == pytest.approx(t.d, abs=1e-12)
            assert theta[k] == pytest.approx(t.theta, abs=1e-12)
            if not t.phi_degenerate:
                assert phi[k] == pytest.approx(t.phi, abs=1e-12)
            if not t.tau_degenerate:
                assert tau[k] == pytest.approx(t.tau, abs=1e-12)


class TestScenarios:
    def test_scenario_validation(self):
        with pytest.raises(ValueError):
            BenchScenario("random-box", 3, 4.0)
        with pytest.raises(ValueError):
            BenchScenario("random-box", 100, 1.0)

    def test_generator_calibration(self):
        g = build_scenario_graph(BenchScenario("random-box", 2000, 8.0, seed=0))
        achieved = g.num_directed_edges / g.n
        assert abs(achieved - 8.0) <= 0.2 * 8.0

    def test_unknown_generator(self):
        with pytest.raises(ValueError):
            build_scenario_graph(BenchScenario("hexagonal", 100, 4.0))

    def test_counts_deterministic_across_runs(self):
        scn = BenchScenario("random-box", 500, 4.0, seed=5)
        m1 = measure_scenario(scn, timed=False)
        m2 = measure_scenario(scn, timed=False)
        assert m1.count_1hop == m2.count_1hop
        assert m1.count_2hop == m2.count_2hop


class TestExponentFits:
    def test_exact_power_law(self):
        xs = [1.0, 2.0, 4.0, 8.0]
        fit = fit_exponent(xs, [x**2 for x in xs])
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        lo, hi = fit.ci95
        assert lo <= 2.0 <= hi

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            fit_exponent([1.0], [1.0])

    def test_run_scaling_count_exponents(self):
        scenarios = [
            BenchScenario("random-box", 1000, k, seed=6)
            for k in (4.0, 6.0, 8.0, 12.0)
        ]
        report = run_scaling(scenarios, timed=False)
        fits = report.fits["count_vs_k@n=1000"]
        assert fits["comenet"].slope == pytest.approx(1.0, abs=0.05)
        assert fits["dmp"].slope == pytest.approx(2.0, abs=0.15)
