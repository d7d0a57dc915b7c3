"""Command-line interface.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
3 capacity exceeded.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import sys

import click
import numpy as np

from . import adiabatic, classical, experiments, gauge, graph, solutions
from .errors import CapacityError, GraphParseError, NumericalError

log = logging.getLogger("adiabatic_mixing")

EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_CAPACITY = 3


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _load_graph(graph_path, n, m, seed) -> graph.Graph:
    if graph_path is not None:
        return graph.read_graph(graph_path)
    if n is None or m is None:
        raise click.UsageError("give a graph file or both --n and --m")
    return graph.generate_random_graph(n, m, seed)


def graph_options(f):
    f = click.option("--seed", type=int, default=0, show_default=True, help="Seed for a generated graph.")(f)
    f = click.option("--m", "m", type=int, default=None, help="Edge count of a generated graph.")(f)
    f = click.option("--n", "n", type=int, default=None, help="Vertex count of a generated graph.")(f)
    f = click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="Edge-list file ('n m' header, then 'u v' lines).")(f)
    return f


out_option = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout).")
format_option = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)


@click.group()
@click.option("-v", "--verbose", count=True, help="Increase log verbosity.")
def cli(verbose):
    """Non-abelian adiabatic mixing on independent-set ground manifolds."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--m", "m", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@out_option
def gen(n, m, seed, out):
    """Generate a uniformly random graph with n vertices and m edges."""
    try:
        g = graph.generate_random_graph(n, m, seed)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None
    _emit(f"# seed {seed}\n" + graph.serialize_graph(g), out)


@cli.command("enumerate")
@graph_options
@out_option
@format_option
@click.option("--edges-out", type=click.Path(dir_okay=False), default=None, help="Also write median-graph edges as CSV.")
def enumerate_cmd(graph_path, n, m, seed, out, fmt, edges_out):
    """List all independent sets in canonical order."""
    g = _load_graph(graph_path, n, m, seed)
    b = solutions.enumerate_independent_sets(g)
    if edges_out:
        _emit(solutions.median_csv(solutions.median_adjacency(b)), edges_out)
    if fmt == "csv":
        _emit(solutions.basis_csv(b), out)
    else:
        _emit(_json({"n": g.n, "m": g.m, "Ns": b.size, "histogram": b.cardinality_histogram.tolist(),
                     "solutions": b.solutions}), out)


def _propagated(g, theta, t, loops):
    b = solutions.enumerate_independent_sets(g)
    A = gauge.build_gauge_matrix(b, solutions.median_adjacency(b), theta)
    psi = gauge.basis_state(b)
    if t is None:
        for _ in range(loops):
            psi = gauge.holonomy_apply(A, psi)
    else:
        psi = gauge.diffuse(A, psi, t)
    return b, psi


def _state_report(g, b, psi, theta, fmt, out, extra):
    d, c = gauge.trivial_probability(psi, b)
    if fmt == "csv":
        _emit(gauge.probabilities_csv(psi, b), out)
        return
    summary = {
        "n": g.n, "m": g.m, "theta": theta, "Ns": b.size, "dn": d, "cn": c,
        "S": gauge.entropy(psi),
        "Sbar": gauge.normalized_entropy(psi, b.size) if b.size > 1 else 0.0,
        "cardinality_probability": gauge.cardinality_probability(psi, b).tolist(),
        "cardinality_fraction": (b.cardinality_histogram / b.size).tolist(),
        **extra,
    }
    _emit(_json(summary), out)


@cli.command()
@graph_options
@click.option("--theta", type=float, default=math.pi / 2, show_default=True, help="Loop tilt angle (radians).")
@click.option("--loops", type=click.IntRange(min=1), default=1, show_default=True)
@out_option
@format_option
def holonomy(graph_path, n, m, seed, theta, loops, out, fmt):
    """Apply the loop holonomy to the empty-set state."""
    g = _load_graph(graph_path, n, m, seed)
    b, psi = _propagated(g, theta, None, loops)
    _state_report(g, b, psi, theta, fmt, out, {"loops": loops})


@cli.command()
@graph_options
@click.option("--theta", type=float, default=math.pi / 2, show_default=True)
@click.option("--t", "t", type=float, required=True, help="Dimensionless diffusion time.")
@out_option
@format_option
def diffuse(graph_path, n, m, seed, theta, t, out, fmt):
    """Median-graph diffusion exp(itA) from the empty set."""
    g = _load_graph(graph_path, n, m, seed)
    b, psi = _propagated(g, theta, t, 0)
    _state_report(g, b, psi, theta, fmt, out, {"t": t})


@cli.command("adiabatic-check")
@graph_options
@click.option("--theta", type=float, default=math.pi / 2, show_default=True)
@click.option("--delta", type=float, default=1.0, show_default=True, help="Coupling energy.")
@click.option("--T", "times", type=float, multiple=True, default=(25.0, 50.0, 100.0, 200.0, 400.0), show_default=True,
              help="Total loop time; repeat for a convergence study.")
@click.option("--steps", type=int, default=None, help="Integrator steps (default max(1000, 40*T*delta)).")
@out_option
def adiabatic_check(graph_path, n, m, seed, theta, delta, times, steps, out):
    """Compare full state-vector evolution with the holonomy prediction."""
    g = _load_graph(graph_path, n, m, seed)
    if g.n > adiabatic.DEFAULT_MAX_QUBITS:
        raise CapacityError(f"n={g.n} exceeds full-simulation limit {adiabatic.DEFAULT_MAX_QUBITS}")
    b = solutions.enumerate_independent_sets(g)
    A = gauge.build_gauge_matrix(b, solutions.median_adjacency(b), theta)
    pred = gauge.holonomy_apply(A, gauge.basis_state(b))
    rows = adiabatic.convergence_study(g, b, pred, theta, times, delta=delta, steps=steps)
    _emit(adiabatic.convergence_csv(rows), out)


@cli.command()
@graph_options
@click.option("--trials", type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option("--pick", type=click.IntRange(min=2), default=2, show_default=True, help="Vertices set to 1 per random guess.")
@out_option
def baseline(graph_path, n, m, seed, trials, pick, out):
    """Classical baselines: 2-SAT non-trivial solution and random picking."""
    g = _load_graph(graph_path, n, m, seed)
    found = classical.find_nontrivial_classical(g)
    report = {
        "n": g.n, "m": g.m, "trials": trials, "pick": pick,
        "nontrivial": None if found is None else graph.vertices_of(found),
        "two_sat_solution": classical.solve_2sat(classical.graph_to_clauses(g)),
    }
    if g.n >= pick:
        report["empirical_failure"] = classical.random_pick_baseline(g, pick, trials, seed)
    if pick == 2 and g.n >= 2:
        report["exact_failure"] = 2 * g.m / (g.n * (g.n - 1))
    _emit(_json(report), out)


def _case_command(kind, default_theta, default_min, default_max):
    @click.option("--n", "n_single", type=int, default=None, help="Single vertex count (overrides the range).")
    @click.option("--n-min", type=int, default=default_min, show_default=True)
    @click.option("--n-max", type=int, default=default_max, show_default=True)
    @click.option("--instances", type=click.IntRange(min=1), default=200, show_default=True)
    @click.option("--theta", type=float, default=default_theta, show_default=True)
    @click.option("--seed", type=int, default=0, show_default=True, help="Master seed.")
    @click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
    @click.option("--log-first", is_flag=True, help="Average logarithms instead of raw values.")
    @click.option("--timing", is_flag=True, help="Fill the walltime_ms column (breaks byte reproducibility).")
    @click.option("--fit-out", type=click.Path(dir_okay=False), default=None, help="Write fit summary JSON here.")
    @out_option
    @format_option
    def command(n_single, n_min, n_max, instances, theta, seed, workers, log_first, timing, fit_out, out, fmt):
        n_values = [n_single] if n_single is not None else list(range(n_min, n_max + 1))
        if not n_values:
            raise click.UsageError("empty n range")
        try:
            res = experiments.run_case(kind, n_values, instances, theta, seed, workers=workers, log_first=log_first)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from None
        for r in res.failures:
            log.warning("n=%d instance %d failed: %s", r.n, r.index, r.error)
        fits = {
            "Ns": res.fit_ns.to_dict() if res.fit_ns else None,
            "cn": res.fit_cn.to_dict() if res.fit_cn else None,
            "summary": res.summary,
            "failures": len(res.failures),
            "log_first": log_first,
        }
        if fit_out:
            _emit(_json(fits), fit_out)
        if fmt == "csv":
            _emit(experiments.records_csv(res.records, timing=timing), out)
        else:
            recs = []
            for r in res.records:
                d = {k: getattr(r, k) for k in ("n", "m", "index", "seed", "theta", "Ns", "dn", "cn", "max_card",
                                                  "predicted_k", "error")}
                d["sbar"] = list(r.sbar)
                if timing:
                    d["walltime_ms"] = r.walltime_ms
                recs.append(d)
            _emit(_json({"records": recs, "fits": fits}), out)

    return command


cli.command("case1", help="Scaling study with m = n (default theta = pi/2).")(
    _case_command("case1", math.pi / 2, 8, 18)
)
cli.command("case2", help="Scaling study with m = floor(n^2/4) (default theta = 1.2).")(
    _case_command("case2", 1.2, 8, 32)
)


@cli.command("entropy-trace")
@graph_options
@click.option("--theta", type=float, default=math.pi / 2, show_default=True)
@click.option("--t-max", type=float, default=10 * math.pi, show_default=True)
@click.option("--samples", type=click.IntRange(min=2), default=501, show_default=True)
@out_option
def entropy_trace(graph_path, n, m, seed, theta, t_max, samples, out):
    """Entropy of the diffusing state over time, as t,S,Sbar CSV."""
    g = _load_graph(graph_path, n, m, seed)
    ts, S, Sbar = experiments.entropy_trace(g, theta, t_max, samples)
    _emit(experiments.entropy_csv(ts, S, Sbar), out)


@cli.command()
@click.argument("table", type=click.Path(exists=True, dir_okay=False))
@click.option("--x", "xcol", default="x", show_default=True, help="Abscissa column.")
@click.option("--y", "ycol", default="y", show_default=True, help="Ordinate column.")
@click.option("--transform", type=click.Choice(["none", "log", "log2"]), default="none", show_default=True,
              help="Applied to y before fitting.")
@out_option
def fit(table, xcol, ycol, transform, out):
    """Least-squares line through two columns of a CSV file."""
    with open(table, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    try:
        xs = np.array([float(r[xcol]) for r in rows])
        ys = np.array([float(r[ycol]) for r in rows])
    except KeyError as exc:
        raise click.UsageError(f"missing column {exc}") from None
    if transform == "log":
        ys = np.log(ys)
    elif transform == "log2":
        ys = np.log2(ys)
    try:
        res = experiments.fit_linear(xs, ys)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    _emit(_json({"slope": res.slope, "intercept": res.intercept, "stderr": res.stderr, "points": res.points,
                 "intercept_stderr": res.intercept_stderr, "residual_variance": res.residual_variance}), out)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="adiabatic-mixing", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except CapacityError as exc:
        click.echo(f"capacity exceeded: {exc}", err=True)
        return EXIT_CAPACITY
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        return EXIT_NUMERICAL
    except (GraphParseError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
