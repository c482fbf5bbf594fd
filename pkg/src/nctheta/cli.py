"""Command-line front end: single-invariant computation, canned experiments,
and the random-subspace survey.  JSON goes to stdout, logs to stderr.

Solver selection and tolerance can be overridden through the environment
variables NCTHETA_SOLVER and NCTHETA_SOLVER_TOL.
"""

from __future__ import annotations

import json
import logging
import math
import sys
import time

import click
import numpy as np

from .classical import graph_from_json, parse_graph6
from .conic import ConeId, theta_minus, theta_perp, theta_plus
from .experiments import EXPERIMENTS, run_random_survey
from .ncgraph import from_classical
from .operator_core import subspace_from_json

log = logging.getLogger("nctheta")

QUANTITIES = ("theta", "theta-minus", "theta-plus")


def _load_subspace(path: str):
    """Load an operator subspace from a file: subspace JSON
    ({"ambient_dim", "basis"}), adjacency JSON ({"n", "edges"}), or a bare
    graph6 string.  Classical graphs are lifted to their edge-dyad span."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise click.ClickException(
                f"{path}: invalid JSON at line {exc.lineno}, col {exc.colno}: "
                f"{exc.msg}")
        if "basis" in obj:
            return subspace_from_json(obj)
        if "n" in obj:
            return from_classical(graph_from_json(obj))
        raise click.ClickException(
            f"{path}: JSON must contain 'basis' (subspace) or 'n'/'edges' "
            "(classical graph)")
    try:
        return from_classical(parse_graph6(stripped.splitlines()[0]))
    except ValueError as exc:
        raise click.ClickException(f"{path}: not a graph6 string: {exc}")


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, default=_json_default)
    sys.stdout.write("\n")


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    raise TypeError(f"not JSON serializable: {type(x)}")


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="debug logging to stderr")
def main(verbose: bool) -> None:
    """Non-commutative graph invariants for zero-error coding."""
    logging.basicConfig(stream=sys.stderr,
                        level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.option("--graph", "graph_file", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="subspace JSON, adjacency JSON, or graph6 file")
@click.option("--quantity", required=True, type=click.Choice(QUANTITIES))
@click.option("--cone", type=click.Choice(ConeId.ALL), default=None,
              help="required for theta-minus / theta-plus")
def compute(graph_file: str, quantity: str, cone: str) -> None:
    """Compute one invariant of a non-commutative graph."""
    s = _load_subspace(graph_file)
    if quantity == "theta":
        if cone is not None:
            raise click.ClickException("--cone applies only to theta-minus "
                                       "and theta-plus")
        fn = lambda: theta_perp(s)
    else:
        if cone is None:
            raise click.ClickException(f"{quantity} requires --cone")
        fn = (lambda: theta_minus(s, cone)) if quantity == "theta-minus" \
            else (lambda: theta_plus(s, cone))
    t0 = time.time()
    res = fn()
    _emit({"quantity": quantity,
           "cone": cone,
           "value": "inf" if res.is_infinite else res.value,
           "status": res.status,
           "gap": res.gap,
           "runtime_ms": round(1000 * (time.time() - t0), 1)})
    if res.status == "UNKNOWN":
        sys.exit(2)


def _parse_param(kv: str):
    if "=" not in kv:
        raise click.ClickException(f"--param expects k=v, got {kv!r}")
    k, v = kv.split("=", 1)
    try:
        return k, int(v)
    except ValueError:
        try:
            return k, float(v)
        except ValueError:
            return k, v


@main.command()
@click.option("--experiment", required=True,
              type=click.Choice(sorted(EXPERIMENTS)))
@click.option("--param", "params", multiple=True,
              help="experiment parameter override, k=v (repeatable)")
def paper(experiment: str, params) -> None:
    """Run a canned experiment and print its JSON report."""
    kwargs = dict(_parse_param(p) for p in params)
    try:
        report = EXPERIMENTS[experiment](**kwargs)
    except TypeError as exc:
        raise click.ClickException(f"bad parameters for {experiment}: {exc}")
    _emit(report.to_json())


@main.command("random")
@click.option("--dim", required=True, type=int)
@click.option("--subspace-dim", required=True, type=int)
@click.option("--count", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--jobs", type=int, default=1, show_default=True,
              help="parallel solver processes")
def random_cmd(dim: int, subspace_dim: int, count: int, seed: int,
               jobs: int) -> None:
    """Survey random trace-free dagger-closed subspaces."""
    report = run_random_survey(dim=dim, subspace_dim=subspace_dim,
                               count=count, seed=seed, jobs=jobs)
    _emit(report.to_json())


if __name__ == "__main__":
    main()
