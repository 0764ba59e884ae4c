"""Complexity benchmarks: 1-hop tuple featurization versus a 2-hop baseline.

Counts are exact: the 1-hop method computes one tuple per directed edge
(m = n * mean degree) while directional 2-hop message passing computes one
angle set per directed triplet (sum over nodes of deg * (deg - 1)).  Timings
measure only the vectorized geometry kernels on precomputed index arrays, so
the comparison reflects arithmetic rather than bookkeeping.  The 2-hop kernel
computes real distances, angles, and torsions per triplet, not a stub.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import CalibrationFailure
from .fixtures import chain_graph, lattice_graph, random_box_graph
from .geometry import _edge_arrays, _vector_dihedral
from .graphs import Graph3D, build_neighbor_table

SCOPE_NOTE = (
    "Featurization-only timing: measures the geometric transformation kernels, "
    "not network training; validates the count/complexity claim, not absolute "
    "epoch speedups."
)


def dmp_baseline_count(g: Graph3D) -> int:
    """Directed 2-hop triplets (k, i, j), k != j both neighbors of i."""
    degrees = np.zeros(g.n, dtype=np.int64)
    for i, _ in g.edges:
        degrees[i] += 1
    return int(np.sum(degrees * (degrees - 1)))


def comenet_count(g: Graph3D) -> int:
    """Directed edge count m: one tuple per directed edge."""
    return g.num_directed_edges


def torsion_count_comparison(n1, n2):
    """Torsion angles to join two regions: (ours, pairwise baseline)."""
    if n1 < 1 or n2 < 1:
        raise ValueError("region sizes must be >= 1")
    return (n1 + n2 + 1, n1 * n2)


# ---------------------------------------------------------------------------
# kernels


def comenet_index_arrays(g: Graph3D):
    nt = build_neighbor_table(g)
    return g.positions, _edge_arrays(g, nt)


def comenet_kernel(p, arrays):
    """(d, theta, phi, tau) for all directed edges; pure arithmetic."""
    I, J, F, S, FI_EX, FJ_EX = arrays
    rij = p[J] - p[I]
    d = np.linalg.norm(rij, axis=1)
    rif = p[F] - p[I]
    theta = np.arctan2(
        np.linalg.norm(np.cross(rif, rij), axis=1), np.sum(rif * rij, axis=1)
    )
    phi, _ = _vector_dihedral(p[np.maximum(S, 0)], p[I], p[F], p[J])
    tau, _ = _vector_dihedral(
        p[np.maximum(FI_EX, 0)], p[I], p[J], p[np.maximum(FJ_EX, 0)]
    )
    return d, theta, phi, tau


def dmp_index_arrays(g: Graph3D):
    """Directed triplet indices (k, i, j) plus a torsion reference per triplet."""
    nt = build_neighbor_table(g)
    first = np.array([-1 if f is None else f for f in nt.first], dtype=np.int64)
    ks, is_, js = [], [], []
    for i in range(g.n):
        nbrs = np.array([k for k, _ in nt.neighbors[i]], dtype=np.int64)
        deg = len(nbrs)
        if deg < 2:
            continue
        kk, jj = np.meshgrid(nbrs, nbrs, indexing="ij")
        mask = kk != jj
        ks.append(kk[mask])
        is_.append(np.full(mask.sum(), i, dtype=np.int64))
        js.append(jj[mask])
    if not ks:
        empty = np.empty(0, dtype=np.int64)
        return g.positions, (empty, empty, empty, empty)
    K = np.concatenate(ks)
    I = np.concatenate(is_)
    J = np.concatenate(js)
    REF = first[J]  # nearest neighbor of j anchors the per-triplet torsion
    REF = np.where(REF >= 0, REF, J)
    return g.positions, (K, I, J, REF)


def dmp_kernel(p, arrays):
    """Distance, angle, and torsion per directed 2-hop triplet."""
    K, I, J, REF = arrays
    rij = p[J] - p[I]
    rik = p[K] - p[I]
    d = np.linalg.norm(rij, axis=1)
    angle = np.arctan2(
        np.linalg.norm(np.cross(rik, rij), axis=1), np.sum(rik * rij, axis=1)
    )
    torsion, _ = _vector_dihedral(p[K], p[I], p[J], p[REF])
    return d, angle, torsion


# ---------------------------------------------------------------------------
# scenarios and the report


@dataclass(frozen=True)
class BenchScenario:
    generator: str  # random-box | chain | lattice
    n: int
    target_degree: float
    seed: int = 0
    repetitions: int = 5

    def __post_init__(self):
        if self.n < 4 or self.target_degree < 2:
            raise ValueError("need n >= 4 and target degree >= 2")


@dataclass(frozen=True)
class ScenarioMeasurement:
    scenario: BenchScenario
    achieved_degree: float
    count_1hop: int
    count_2hop: int
    time_1hop: float  # median seconds
    time_2hop: float
    samples_1hop: tuple = ()
    samples_2hop: tuple = ()

    @property
    def time_ratio(self):
        return self.time_2hop / self.time_1hop


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    stderr: float

    @property
    def ci95(self):
        return (self.slope - 1.96 * self.stderr, self.slope + 1.96 * self.stderr)


@dataclass(frozen=True)
class BenchReport:
    note: str
    measurements: tuple
    fits: dict = field(default_factory=dict)
    torsion_example: tuple = (3, 3, 7, 9)


def build_scenario_graph(scn: BenchScenario) -> Graph3D:
    if scn.generator == "random-box":
        g = random_box_graph(scn.n, scn.target_degree, scn.seed)
        achieved = g.num_directed_edges / g.n
        if abs(achieved - scn.target_degree) > 0.2 * scn.target_degree:
            raise CalibrationFailure(
                f"achieved degree {achieved:.2f} misses target "
                f"{scn.target_degree} by more than 20%"
            )
        return g
    if scn.generator == "chain":
        return chain_graph(scn.n, seed=scn.seed)
    if scn.generator == "lattice":
        side = max(2, round(scn.n ** (1.0 / 3.0)))
        cutoffs = {6: 1.05, 18: 1.45, 26: 1.75}
        cutoff = cutoffs.get(int(scn.target_degree), 1.05)
        return lattice_graph(side, cutoff=cutoff)
    raise ValueError(f"unknown generator {scn.generator!r}")


def _median_time(fn, repetitions):
    fn()  # warm-up, excluded
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples)), tuple(samples)


def measure_scenario(scn: BenchScenario, timed=True) -> ScenarioMeasurement:
    g = build_scenario_graph(scn)
    p1, arrays1 = comenet_index_arrays(g)
    p2, arrays2 = dmp_index_arrays(g)
    c1, c2 = comenet_count(g), dmp_baseline_count(g)
    if timed:
        t1, s1 = _median_time(lambda: comenet_kernel(p1, arrays1), scn.repetitions)
        t2, s2 = _median_time(lambda: dmp_kernel(p2, arrays2), scn.repetitions)
    else:
        t1 = t2 = float("nan")
        s1 = s2 = ()
    return ScenarioMeasurement(
        scn, g.num_directed_edges / g.n, c1, c2, t1, t2, s1, s2
    )


def fit_exponent(xs, ys) -> ExponentFit:
    """Least-squares slope of log y vs log x, with its standard error."""
    xs = np.log(np.asarray(xs, dtype=np.float64))
    ys = np.log(np.asarray(ys, dtype=np.float64))
    if len(xs) < 2:
        raise ValueError("need at least two points to fit an exponent")
    A = np.stack([xs, np.ones_like(xs)], axis=1)
    coef, residuals, *_ = np.linalg.lstsq(A, ys, rcond=None)
    slope = float(coef[0])
    dof = len(xs) - 2
    if dof > 0 and len(residuals):
        sigma2 = float(residuals[0]) / dof
    else:
        sigma2 = 0.0
    sxx = float(np.sum((xs - xs.mean()) ** 2))
    stderr = float(np.sqrt(sigma2 / sxx)) if sxx > 0 else float("inf")
    return ExponentFit(slope, stderr)


def run_scaling(scenarios, timed=True) -> BenchReport:
    """Measure all scenarios and fit count exponents for each sweep direction.

    Scenarios sharing a target degree form the n-sweep; scenarios sharing n
    form the k-sweep.  Count exponents are deterministic; time medians are
    machine-dependent and reported for the trend only.
    """
    measurements = tuple(measure_scenario(s, timed=timed) for s in scenarios)
    fits = {}

    by_degree = {}
    by_n = {}
    for m in measurements:
        by_degree.setdefault(m.scenario.target_degree, []).append(m)
        by_n.setdefault(m.scenario.n, []).append(m)

    for deg, group in by_degree.items():
        if len(group) >= 4:
            ns = [m.scenario.n for m in group]
            fits[f"count_vs_n@k={deg}"] = {
                "comenet": fit_exponent(ns, [m.count_1hop for m in group]),
                "dmp": fit_exponent(ns, [m.count_2hop for m in group]),
            }
    for n, group in by_n.items():
        if len(group) >= 4:
            ks = [m.achieved_degree for m in group]
            fits[f"count_vs_k@n={n}"] = {
                "comenet": fit_exponent(ks, [m.count_1hop for m in group]),
                "dmp": fit_exponent(ks, [m.count_2hop for m in group]),
            }
    return BenchReport(SCOPE_NOTE, measurements, fits)
