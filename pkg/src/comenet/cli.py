"""Command-line interface.

Exit codes: 0 success, 1 check failure, 2 usage error, 3 IO/parse error.
All angle-valued flags take degrees; everything internal is radians.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor

import click
import numpy as np

from . import bench as bench_mod
from . import report as report_mod
from .basis import BasisConfig, bessel_roots, sbf, tbf
from .errors import ComenetError, InconsistentTuples, XYZParseError
from .fixtures import butane_skeleton, mirror_graph, random_connected_graph
from .geometry import (
    transform,
    tuples_from_csv,
    tuples_from_json,
    tuples_to_csv,
    tuples_to_json,
)
from .graphs import build_radius_graph, random_se3, apply_se3
from .mpnet import MiniNetConfig, forward
from .reconstruct import PlacementCase, Verdict, align, discriminate, reconstruct, round_trip
from .xyzio import read_xyz, write_xyz

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _fail_io(message):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_IO)


def _load_graph(path, cutoff):
    try:
        species, positions = read_xyz(path)
    except (OSError, XYZParseError) as exc:
        _fail_io(f"{path}: {exc}")
    return build_radius_graph(species, positions, cutoff)


@click.group(context_settings={"auto_envvar_prefix": "COMENET"})
@click.option("--cutoff", type=float, default=5.0, show_default=True,
              help="Radius-graph cutoff in angstrom.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tolerance", type=float, default=1e-6, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("--quiet", is_flag=True)
@click.pass_context
def main(ctx, cutoff, seed, tolerance, fmt, quiet):
    """Complete geometric featurization of 3D molecular graphs."""
    if cutoff <= 0:
        raise click.UsageError("--cutoff must be positive")
    if tolerance <= 0:
        raise click.UsageError("--tolerance must be positive")
    ctx.obj = {
        "cutoff": cutoff, "seed": seed, "tolerance": tolerance,
        "format": fmt, "quiet": quiet,
    }


def _echo(ctx, message):
    if not ctx.obj["quiet"]:
        click.echo(message)


@main.command()
@click.argument("input_xyz", type=click.Path())
@click.option("--output", "-o", default=None, help="Output path (default: stem + .csv/.json).")
@click.option("--basis", is_flag=True, help="Also emit per-edge TBF/SBF vectors as JSON.")
@click.option("--num-radial", type=int, default=12, show_default=True)
@click.option("--num-spherical", type=int, default=3, show_default=True)
@click.option("--roots-csv", default=None,
              help="Also export the Bessel-root table to this CSV path.")
@click.pass_context
def featurize(ctx, input_xyz, output, basis, num_radial, num_spherical, roots_csv):
    """Compute per-edge (d, theta, phi, tau) tuples for an XYZ file."""
    g = _load_graph(input_xyz, ctx.obj["cutoff"])
    try:
        ts = transform(g)
    except ComenetError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CHECK_FAILED)
    fmt = ctx.obj["format"]
    if output is None:
        stem = input_xyz.rsplit(".", 1)[0]
        output = f"{stem}.tuples.{fmt}"
    if fmt == "csv":
        tuples_to_csv(ts, output)
    else:
        tuples_to_json(ts, output)
    degenerate = sum(1 for t in ts.tuples if t.phi_degenerate or t.tau_degenerate)
    if basis:
        cfg = BasisConfig(ctx.obj["cutoff"], num_radial, num_spherical)
        records = []
        for t in ts.tuples:
            records.append(
                {
                    "i": t.i, "j": t.j,
                    "tbf": list(tbf(t.d, t.theta, t.phi, cfg)),
                    "sbf": list(sbf(t.d, t.tau, cfg)),
                }
            )
        basis_path = output.rsplit(".", 1)[0] + ".basis.json"
        with open(basis_path, "w") as fh:
            json.dump(records, fh)
        _echo(ctx, f"basis features written to {basis_path}")
    if roots_csv:
        roots = bessel_roots(num_spherical, num_radial)
        with open(roots_csv, "w") as fh:
            fh.write("l,n,root\n")
            for l, row in enumerate(roots):
                for n, r in enumerate(row, start=1):
                    fh.write(f"{l},{n},{r:.17g}\n")
    _echo(
        ctx,
        f"n={g.n} m={len(ts)} degenerate_edges={degenerate} -> {output}",
    )


@main.command("reconstruct")
@click.argument("tuples_file", type=click.Path())
@click.argument("reference_xyz", type=click.Path())
@click.option("--output-xyz", "-o", default="reconstructed.xyz", show_default=True)
@click.option("--report-json", default="reconstruction.json", show_default=True)
@click.pass_context
def reconstruct_cmd(ctx, tuples_file, reference_xyz, output_xyz, report_json):
    """Rebuild coordinates from a tuple file and align against a reference XYZ."""
    try:
        species, ref_positions = read_xyz(reference_xyz)
    except (OSError, XYZParseError) as exc:
        _fail_io(f"{reference_xyz}: {exc}")
    try:
        if tuples_file.endswith(".json"):
            ts = tuples_from_json(tuples_file, n=len(species))
        else:
            ts = tuples_from_csv(tuples_file, n=len(species))
    except (OSError, ValueError, KeyError) as exc:
        _fail_io(f"{tuples_file}: {exc}")
    try:
        result = reconstruct(ts, n=len(species), tolerance=ctx.obj["tolerance"])
    except InconsistentTuples as exc:
        click.echo(f"InconsistentTuples: {exc}", err=True)
        sys.exit(EXIT_CHECK_FAILED)
    except ComenetError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CHECK_FAILED)
    mask = result.placed_mask
    report = align(result.positions[mask], ref_positions[mask], False)
    aligned = result.positions.copy()
    aligned[mask] = result.positions[mask] @ report.rotation.T + report.translation
    write_xyz(output_xyz, species, np.nan_to_num(aligned), comment="reconstructed")
    payload = {
        "rmsd": report.rmsd,
        "placed": int(mask.sum()),
        "total": len(species),
        "cases": {str(i): c.value for i, c in enumerate(result.placement_case)},
        "warning": result.warning,
    }
    with open(report_json, "w") as fh:
        json.dump(payload, fh, indent=1)
    _echo(ctx, f"rmsd={report.rmsd:.3e} -> {output_xyz}, {report_json}")
    sys.exit(EXIT_OK if report.rmsd < max(ctx.obj["tolerance"], 1e-6) else EXIT_CHECK_FAILED)


@main.command()
@click.argument("input_xyz", required=False, type=click.Path())
@click.option("--random", "random_spec", nargs=3, type=int, default=None,
              help="Generate a random graph: N TARGET_DEGREE SEED.")
@click.option("--transforms", type=int, default=10, show_default=True,
              help="Number of random rigid transforms to test.")
@click.option("--mirror", is_flag=True, help="Also test the mirrored graph.")
@click.pass_context
def invariance(ctx, input_xyz, random_spec, transforms, mirror):
    """Run the rigid-invariance and round-trip checks; PASS/FAIL."""
    if input_xyz is None and not random_spec:
        raise click.UsageError("provide an XYZ file or --random N K SEED")
    if input_xyz is not None:
        g = _load_graph(input_xyz, ctx.obj["cutoff"])
    else:
        n, k, seed = random_spec
        g = random_connected_graph(n, k, seed)

    base = transform(g)
    max_dev = 0.0
    for t_idx in range(transforms):
        moved = transform(apply_se3(g, random_se3((ctx.obj["seed"], t_idx))))
        for a, b in zip(base.tuples, moved.tuples):
            for x, y in ((a.d, b.d), (a.theta, b.theta), (a.phi, b.phi), (a.tau, b.tau)):
                delta = abs(x - y)
                max_dev = max(max_dev, min(delta, abs(2 * np.pi - delta)))
    result, report = round_trip(g)
    ok = max_dev < 1e-9 and report.rmsd < 1e-6
    _echo(ctx, f"max tuple deviation: {max_dev:.3e}")
    _echo(ctx, f"round-trip rmsd:     {report.rmsd:.3e}")
    if mirror:
        verdict = discriminate(g, mirror_graph(g), use_tau=True,
                               tolerance=ctx.obj["tolerance"])
        _echo(ctx, f"mirror: {verdict.value}")
    _echo(ctx, "PASS" if ok else "FAIL")
    sys.exit(EXIT_OK if ok else EXIT_CHECK_FAILED)


@main.command()
@click.option("--angles", multiple=True, type=float,
              help="Conformer rotation angles in degrees (default 0 60 180 300).")
@click.option("--no-tau", is_flag=True, help="Disable rotation angles in the comparison.")
@click.pass_context
def conformers(ctx, angles, no_tau):
    """Discrimination matrix over butane-skeleton conformers."""
    angle_list = list(angles) if angles else [0.0, 60.0, 180.0, 300.0]
    graphs = [butane_skeleton(a) for a in angle_list]
    use_tau = not no_tau
    header = "        " + "".join(f"{a:>10.0f}" for a in angle_list)
    _echo(ctx, f"use_tau={use_tau}")
    _echo(ctx, header)
    for a, ga in zip(angle_list, graphs):
        row = [f"{a:>7.0f} "]
        for gb in graphs:
            verdict = discriminate(ga, gb, use_tau=use_tau,
                                   tolerance=ctx.obj["tolerance"])
            row.append(f"{verdict.value:>10}")
        _echo(ctx, "".join(row))
    sys.exit(EXIT_OK)


@main.command()
@click.argument("input_xyz", type=click.Path())
@click.option("--layers", type=int, default=4, show_default=True)
@click.option("--hidden", type=int, default=64, show_default=True)
@click.option("--no-tau", is_flag=True)
@click.pass_context
def predict(ctx, input_xyz, layers, hidden, no_tau):
    """Scalar prediction of the fixed-weight reference network."""
    g = _load_graph(input_xyz, ctx.obj["cutoff"])
    cfg = MiniNetConfig(
        BasisConfig(ctx.obj["cutoff"]), num_layers=layers, hidden=hidden,
        seed=ctx.obj["seed"], use_tau=not no_tau,
    )
    value = forward(g, cfg)
    click.echo(f"{value:.17g}")
    sys.exit(EXIT_OK)


@main.command("bench")
@click.option("--n", "ns", multiple=True, type=int, default=(10000,),
              show_default=True)
@click.option("--k", "ks", multiple=True, type=float, default=(4.0, 8.0, 16.0),
              show_default=True)
@click.option("--generator", default="random-box", show_default=True,
              type=click.Choice(["random-box", "chain", "lattice"]))
@click.option("--reps", type=int, default=7, show_default=True)
@click.option("--no-time", is_flag=True, help="Counts only (deterministic).")
@click.option("--parallel-counts", is_flag=True,
              help="Parallelize the deterministic count measurements.")
@click.option("--out", default="bench_report", show_default=True,
              help="Output prefix for JSON/CSV/PNG.")
@click.pass_context
def bench_cmd(ctx, ns, ks, generator, reps, no_time, parallel_counts, out):
    """Scaling benchmark of 1-hop tuples versus the 2-hop baseline."""
    scenarios = [
        bench_mod.BenchScenario(generator, n, k, seed=ctx.obj["seed"],
                                repetitions=reps)
        for n in ns for k in ks
    ]
    if parallel_counts and no_time:
        with ThreadPoolExecutor() as pool:
            measurements = tuple(
                pool.map(lambda s: bench_mod.measure_scenario(s, timed=False),
                         scenarios)
            )
        rep = bench_mod.BenchReport(bench_mod.SCOPE_NOTE, measurements)
    else:
        rep = bench_mod.run_scaling(scenarios, timed=not no_time)
    report_mod.write_json(rep, f"{out}.json")
    report_mod.write_csv(rep, f"{out}.csv")
    report_mod.plot_scaling(rep, f"{out}.png")
    _echo(ctx, report_mod.render_table(rep))
    _echo(ctx, f"artifacts: {out}.json {out}.csv {out}.png")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
