"""Figure CLI: ``submax-plot trajectory|pareto --manifest ... --out ...``."""

import os
import sys

import click

from .figures import FigureSpec, SchemaError, render


@click.group()
def main():
    """Render figures from optimizer CSV logs (SVG or PNG)."""


def _run(spec):
    try:
        render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"figure -> {spec.output}")


@main.command("trajectory")
@click.option("--manifest", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def trajectory(manifest, out):
    """Utility vs wall time, one marked curve per run."""
    _run(FigureSpec("trajectory", manifest, out))


@main.command("pareto")
@click.option("--manifest", type=click.Path(exists=True), default=None,
              help="sweep manifest; reads pareto.csv next to it")
@click.option("--pareto", "pareto_csv", type=click.Path(exists=True),
              default=None, help="explicit pareto CSV path")
@click.option("--out", type=click.Path(), required=True)
def pareto(manifest, pareto_csv, out):
    """Final utility vs total time, one line per estimator family."""
    if pareto_csv is None:
        if manifest is None:
            raise click.UsageError("provide --pareto or --manifest")
        candidate = os.path.join(
            os.path.dirname(os.path.abspath(manifest)), "pareto.csv"
        )
        if not os.path.exists(candidate):
            click.echo(
                f"error: no pareto CSV at {candidate}; generate it first "
                "(submax compare) or pass --pareto", err=True,
            )
            sys.exit(1)
        pareto_csv = candidate
    _run(FigureSpec("pareto", pareto_csv, out))


if __name__ == "__main__":
    main()
