"""Command-line interface.

Subcommands: ``gen`` (instance files), ``run`` (continuous greedy sweeps
producing trajectory CSVs plus a manifest), ``compare`` (pareto CSV of
final utility vs time), ``verify`` (surrogate bias margins, CI gate),
``round`` (swap rounding of a trajectory) and ``opt`` (brute-force
optimum).  Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

import json
import os
import sys
import time

import click
import numpy as np

from . import dataio
from .estimators import EstimatorConfig
from .matroids import Matroid
from .oracle import bias_checks_to_tsv, brute_force_opt, verify_bias
from .rngs import SeedStreams
from .rounding import ConvexDecomposition, swap_round
from .scg import SCGConfig, Trajectory, estimate_utility, run_scg

MANIFEST_VERSION = 1

ESTIMATOR_FAMILY_ORDER = {"SAMP": 0, "POLY": 1, "EXACT": 2}


def _default_outdir():
    return os.environ.get("SUBMAX_OUTPUT_DIR", ".")


@click.group()
def main():
    """Stochastic submodular maximization toolkit."""


# ---------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------


@main.group()
def gen():
    """Generate instance files."""


def _partition_matroid_for_nodes(groups, caps, n):
    return Matroid.partition(groups, caps, n=n)


def _echo_instance(instance, path):
    obj = instance.objective
    click.echo(
        f"wrote {path}: family={instance.family} n={obj.n} "
        f"|z|={obj.num_realizations} matroid={instance.matroid!r}"
    )


@gen.command("im")
@click.option("--zkc", "source", flag_value="zkc", help="bundled karate-club graph")
@click.option("--bipartite", "source", flag_value="bipartite",
              help="synthetic bipartite power-law graph")
@click.option("--nodes", type=int, default=400, show_default=True,
              help="node count for --bipartite")
@click.option("--powerlaw/--no-powerlaw", default=True,
              help="power-law right-side degrees (the only generator)")
@click.option("--exponent", type=float, default=2.0, show_default=True)
@click.option("--p", "edge_prob", type=float, default=0.5, show_default=True,
              help="independent-cascade edge probability")
@click.option("--cascades", type=int, default=20, show_default=True)
@click.option("--partitions", "m", type=int, default=2, show_default=True)
@click.option("--k", type=int, default=3, show_default=True,
              help="per-block cardinality cap")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def gen_im(source, nodes, powerlaw, exponent, edge_prob, cascades, m, k,
           seed, output):
    """Influence-maximization instance from cascade traces."""
    if source is None:
        raise click.UsageError("choose one of --zkc or --bipartite")
    if cascades < 1:
        raise click.UsageError("--cascades must be >= 1")
    if not 0.0 <= edge_prob <= 1.0:
        raise click.UsageError("--p must lie in [0, 1]")
    if source == "zkc":
        graph = dataio.zkc_graph()
        if m == 1:
            matroid = Matroid.uniform(graph.num_nodes, k)
        elif m == 2:
            factions = dataio.zkc_factions()
            blocks = [
                [i for i, f in enumerate(factions) if f == 0],
                [i for i, f in enumerate(factions) if f == 1],
            ]
            matroid = _partition_matroid_for_nodes(
                blocks, [k, k], graph.num_nodes
            )
        else:
            raise click.UsageError(
                "--partitions for --zkc must be 1 (uniform) or 2 (factions)"
            )
        name = "zkc"
    else:
        if nodes % 2 or nodes < 2 * max(m, 1) or nodes < 4:
            raise click.UsageError(
                f"--nodes {nodes} too small for {m} seed partitions "
                "(must be even and hold one element per partition)"
            )
        if not powerlaw:
            raise click.UsageError("only the power-law generator is available")
        graph = dataio.gen_bipartite_powerlaw(
            nodes, exponent=exponent, seed=seed
        )
        left, right = graph.parts
        blocks = [list(chunk) for chunk in np.array_split(np.array(left), m)]
        blocks.append(list(right))  # seeds never come from the right side
        caps = [k] * m + [0]
        matroid = _partition_matroid_for_nodes(blocks, caps, graph.num_nodes)
        name = "bipartite-powerlaw"
    traces = dataio.gen_ic_cascades(graph, edge_prob, cascades, seed=seed)
    objective = dataio.InfluenceObjective(graph.num_nodes, traces)
    instance = dataio.Instance(
        objective,
        matroid,
        meta={
            "name": name,
            "edges": len(graph.edges),
            "p": edge_prob,
            "seed": seed,
        },
    )
    output = output or os.path.join(_default_outdir(), f"im_{name}.json")
    dataio.save_instance(instance, output)
    _echo_instance(instance, output)


@gen.command("sm")
@click.option("--tokens", type=int, default=8, show_default=True)
@click.option("--partitions", "m", type=int, default=2, show_default=True)
@click.option("--realizations", type=int, default=10, show_default=True)
@click.option("--k", type=int, default=2, show_default=True)
@click.option("--matroid-kind", type=click.Choice(["uniform", "partition"]),
              default="uniform", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def gen_sm(tokens, m, realizations, k, matroid_kind, seed, output):
    """Synthetic summarization instance."""
    rng = np.random.default_rng(seed)
    objective = dataio.gen_sm_objective(tokens, m, realizations, rng)
    if matroid_kind == "uniform":
        matroid = Matroid.uniform(tokens, k)
    else:
        matroid = Matroid.partition(
            objective.partitions, [k] * len(objective.partitions), n=tokens
        )
    instance = dataio.Instance(objective, matroid, meta={"seed": seed})
    output = output or os.path.join(_default_outdir(), "sm_synthetic.json")
    dataio.save_instance(instance, output)
    _echo_instance(instance, output)


@gen.command("fl")
@click.option("--ratings", type=click.Path(exists=True), default=None,
              help="user,item,rating file (comma or tab separated)")
@click.option("--facilities", type=int, default=8, show_default=True,
              help="synthetic facility count (when no --ratings)")
@click.option("--customers", type=int, default=10, show_default=True)
@click.option("--partitions", "m", type=int, default=1, show_default=True)
@click.option("--k", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def gen_fl(ratings, facilities, customers, m, k, seed, output):
    """Facility-location instance from ratings or synthetic weights."""
    if ratings:
        objective, _, _ = dataio.load_ratings(ratings)
    else:
        rng = np.random.default_rng(seed)
        objective = dataio.gen_fl_objective(facilities, customers, rng)
    n = objective.n
    if m <= 1:
        matroid = Matroid.uniform(n, k)
    else:
        blocks = [list(c) for c in np.array_split(np.arange(n), m)]
        matroid = Matroid.partition(blocks, [k] * len(blocks), n=n)
    instance = dataio.Instance(objective, matroid, meta={"seed": seed})
    output = output or os.path.join(_default_outdir(), "fl_instance.json")
    dataio.save_instance(instance, output)
    _echo_instance(instance, output)


@gen.command("cn")
@click.option("--nodes", type=int, default=4, show_default=True)
@click.option("--catalogue", type=int, default=2, show_default=True)
@click.option("--requests", type=int, default=6, show_default=True)
@click.option("--load", type=float, default=0.7, show_default=True,
              help="worst empty-cache edge load (must be < 1)")
@click.option("--cache-size", type=int, default=1, show_default=True,
              help="per-node cache capacity")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def gen_cn(nodes, catalogue, requests, load, cache_size, seed, output):
    """Synthetic cache-network instance on a line topology."""
    if not 0.0 < load < 1.0:
        raise click.UsageError("--load must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    objective = dataio.gen_cn_objective(nodes, catalogue, requests, load, rng)
    blocks = [
        [objective.variable(v, i) for i in range(catalogue)]
        for v in range(nodes)
    ]
    matroid = Matroid.partition(blocks, [cache_size] * nodes, n=objective.n)
    instance = dataio.Instance(objective, matroid, meta={"seed": seed})
    output = output or os.path.join(_default_outdir(), "cn_instance.json")
    dataio.save_instance(instance, output)
    _echo_instance(instance, output)


# ---------------------------------------------------------------------
# run
# ---------------------------------------------------------------------


@main.command("run")
@click.option("-i", "--instance", "instance_path",
              type=click.Path(exists=True), required=True)
@click.option("-e", "--estimator", "estimators", multiple=True,
              required=True, help="SAMP:N, POLY:L or EXACT (repeatable)")
@click.option("-T", "--iterations", type=int, default=50, show_default=True)
@click.option("--seed", "seeds", multiple=True, type=int,
              help="master seed (repeatable; default 0)")
@click.option("--sampling-seed", type=int, default=None,
              help="override the Bernoulli sample stream only")
@click.option("--utility-every", type=int, default=None,
              help="utility reporting cadence (default: auto)")
@click.option("--utility-draws", type=int, default=64, show_default=True)
@click.option("-o", "--outdir", type=click.Path(), default=None)
def cmd_run(instance_path, estimators, iterations, seeds, sampling_seed,
            utility_every, utility_draws, outdir):
    """Run one SCG sweep; one trajectory CSV per (estimator, seed)."""
    try:
        configs = [EstimatorConfig.parse(e) for e in estimators]
    except ValueError as exc:
        raise click.UsageError(str(exc))
    if iterations < 1:
        raise click.UsageError("-T must be >= 1")
    seeds = list(seeds) or [0]
    outdir = outdir or _default_outdir()
    os.makedirs(outdir, exist_ok=True)
    instance = dataio.load_instance(instance_path)

    runs = []
    sweep_start = time.perf_counter()
    for est in configs:
        for seed in seeds:
            tag = f"{est.label}{est.param if est.kind != 'exact' else ''}"
            csv_name = f"traj_{tag}_seed{seed}.csv"
            csv_path = os.path.join(outdir, csv_name)
            record = {
                "estimator": est.label,
                "param": est.param,
                "seed": seed,
                "csv": csv_name,
                "status": "ok",
                "error": None,
                "wall_ms_total": None,
            }
            try:
                config = SCGConfig(
                    iterations=iterations,
                    estimator=est,
                    seed=seed,
                    utility_every=utility_every,
                    utility_draws=utility_draws,
                    sampling_seed=sampling_seed,
                )
                trajectory = run_scg(
                    instance.objective, instance.matroid, config
                )
                trajectory.to_csv(csv_path)
                record["wall_ms_total"] = trajectory.rows[-1].wall_ms
                click.echo(
                    f"{est}: seed {seed}: done in "
                    f"{record['wall_ms_total']:.1f} ms -> {csv_name}"
                )
            except Exception as exc:  # noqa: BLE001 - recorded per run
                record["status"] = "failed"
                record["error"] = str(exc)
                record["csv"] = None
                click.echo(f"{est}: seed {seed}: FAILED: {exc}", err=True)
            runs.append(record)
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "instance": os.path.abspath(instance_path),
        "iterations": iterations,
        "seeds": seeds,
        "report_seed": seeds[0],
        "utility_draws": utility_draws,
        "runs": runs,
        "total_wall_ms": (time.perf_counter() - sweep_start) * 1e3,
    }
    manifest_path = os.path.join(outdir, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    click.echo(f"manifest -> {manifest_path}")
    if all(r["status"] == "failed" for r in runs):
        sys.exit(1)


# ---------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------


PARETO_COLUMNS = ("estimator", "param", "utility", "total_wall_ms")


@main.command("compare")
@click.option("-m", "--manifest", "manifest_path",
              type=click.Path(exists=True), required=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def cmd_compare(manifest_path, output):
    """Pareto CSV: final utility vs total time per estimator."""
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    instance = dataio.load_instance(manifest["instance"])
    outdir = os.path.dirname(os.path.abspath(manifest_path))
    rows = []
    for record in manifest["runs"]:
        if record["status"] != "ok":
            click.echo(
                f"skipping failed run {record['estimator']}:{record['param']}"
                f" seed {record['seed']}: {record['error']}", err=True,
            )
            continue
        csv_path = os.path.join(outdir, record["csv"])
        if not os.path.exists(csv_path):
            click.echo(f"missing trajectory {csv_path}", err=True)
            continue
        trajectory = Trajectory.from_csv(csv_path, n=instance.n)
        report_rng = SeedStreams(manifest["report_seed"]).generator("reporting")
        utility = estimate_utility(
            instance.objective,
            trajectory.vertex_counts / trajectory.iterations,
            report_rng,
            manifest.get("utility_draws", 64),
        )
        rows.append(
            (
                record["estimator"],
                record["param"],
                utility,
                record["wall_ms_total"],
            )
        )
    rows.sort(key=lambda r: (ESTIMATOR_FAMILY_ORDER.get(r[0], 99), r[1]))
    lines = [",".join(PARETO_COLUMNS)]
    for est, param, utility, wall in rows:
        lines.append(f"{est},{param},{utility!r},{wall!r}")
    text = "\n".join(lines) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
        click.echo(f"pareto -> {output}")
    else:
        click.echo(text, nl=False)


# ---------------------------------------------------------------------
# verify / round / opt
# ---------------------------------------------------------------------


@main.command("verify")
@click.option("-i", "--instance", "instance_path",
              type=click.Path(exists=True), required=True)
@click.option("-L", "--degree", "degrees", multiple=True, type=int,
              default=(1, 2, 3), show_default=True)
@click.option("--points", type=int, default=20, show_default=True,
              help="random fractional points per realization")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def cmd_verify(instance_path, degrees, points, seed, output):
    """Surrogate bias margins (TSV); nonzero exit on any violation."""
    instance = dataio.load_instance(instance_path)
    rng = np.random.default_rng(seed)
    checks = verify_bias(
        instance.objective, sorted(degrees), num_points=points, rng=rng
    )
    text = bias_checks_to_tsv(checks)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
        click.echo(f"margins -> {output}")
    else:
        click.echo(text, nl=False)
    worst = min(
        min(c.binary_margin for c in checks),
        min(c.gradient_margin for c in checks),
    )
    click.echo(f"worst margin: {worst!r}")
    if not all(c.ok for c in checks):
        sys.exit(1)


@main.command("round")
@click.option("-t", "--trajectory", "trajectory_path",
              type=click.Path(exists=True), required=True)
@click.option("-i", "--instance", "instance_path",
              type=click.Path(exists=True), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def cmd_round(trajectory_path, instance_path, seed, output):
    """Swap-round a trajectory into an independent set (JSON indices)."""
    instance = dataio.load_instance(instance_path)
    trajectory = Trajectory.from_csv(trajectory_path, n=instance.n)
    decomposition = ConvexDecomposition.from_trajectory(trajectory)
    rng = SeedStreams(seed).generator("rounding")
    chosen = swap_round(instance.matroid, decomposition, rng)
    text = json.dumps(sorted(chosen)) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command("opt")
@click.option("-i", "--instance", "instance_path",
              type=click.Path(exists=True), required=True)
@click.option("-o", "--output", type=click.Path(), default=None)
def cmd_opt(instance_path, output):
    """Brute-force discrete optimum (small instances only)."""
    instance = dataio.load_instance(instance_path)
    report = brute_force_opt(instance.objective, instance.matroid)
    text = json.dumps(report.to_json_dict(), indent=2) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
