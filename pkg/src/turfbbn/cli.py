"""Command-line entry points.

Exit codes: 0 success, 1 input or data error, 2 internal error. Every
command is a thin composition of library calls, and all randomness is
seeded through flags so outputs are reproducible byte for byte.
"""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import click

from .errors import TurfBbnError
from .infer import good_state_event
from .learn import (
    SearchConfig,
    all_edge_strengths,
    fit_cpts,
    parse_constraints,
    tabu_search,
)
from .netdoc import deserialize_network_with_strengths, serialize_network, to_dot
from .pipeline import (
    DEFAULT_DROPPED,
    RESPONSE_VARIABLES,
    default_fishery_spec,
    discretize,
    drop_variables,
    ingest_ma_csv,
    ingest_sizes_csv,
    pair_metrics,
)
from .report import (
    render_network_figure,
    render_reverse_figure,
    render_scenario_figure,
    reverse_report_text,
    reverse_report_tsv,
    scenario_report_text,
    scenario_report_tsv,
)
from .scenarios import load_scenarios, run_reverse_scenarios, run_scenarios
from .standin import StandInConfig, write_standin_csvs


@click.group()
def cli() -> None:
    """Learn, query, and serve a fishery pressure network."""


def _packaged_constraints() -> tuple:
    path = resources.files("turfbbn").joinpath("data/fishery.constraints")
    with resources.as_file(path) as p:
        return parse_constraints(Path(p).read_text(encoding="utf-8"))


@cli.command()
@click.argument("ma_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("sizes_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--constraints", "constraints_path",
              type=click.Path(exists=True, dir_okay=False), default=None,
              help="Edge constraint file; defaults to the packaged fishery set.")
@click.option("--no-constraints", is_flag=True,
              help="Search without any edge constraints.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              default="network.json", show_default=True)
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False), default=None,
              help="DOT output path (default: next to --out).")
@click.option("--figure", "figure_path", type=click.Path(dir_okay=False),
              default=None, help="Structure figure path (default: next to --out).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--alpha", type=float, default=1.0, show_default=True,
              help="CPT smoothing pseudo-count.")
@click.option("--mls", type=float, default=65.0, show_default=True,
              help="Minimum landing size in mm.")
@click.option("--test-mode", type=click.Choice(["rank_sum", "signed_rank"]),
              default="rank_sum", show_default=True,
              help="Rank test for the MA/OA comparison.")
@click.option("--keep-all", is_flag=True,
              help="Keep every discretized variable instead of the shipped drops.")
def learn(ma_csv: str, sizes_csv: str, constraints_path: str | None,
          no_constraints: bool, out_path: str, dot_path: str | None,
          figure_path: str | None, seed: int, alpha: float, mls: float,
          test_mode: str, keep_all: bool) -> None:
    """Ingest field CSVs, learn the structure, fit CPTs, write the network."""
    records = ingest_ma_csv(ma_csv)
    samples = ingest_sizes_csv(sizes_csv)
    metrics = pair_metrics(records, samples, mls=mls, mode=test_mode)
    spec = default_fishery_spec(records)
    dataset = discretize(records, metrics, spec)
    if not keep_all:
        dataset = drop_variables(dataset, DEFAULT_DROPPED)

    if no_constraints:
        required, forbidden = frozenset(), frozenset()
    elif constraints_path is not None:
        required, forbidden = parse_constraints(
            Path(constraints_path).read_text(encoding="utf-8"))
    else:
        required, forbidden = _packaged_constraints()

    config = SearchConfig(seed=seed, required_edges=required,
                          forbidden_edges=forbidden)
    result = tabu_search(dataset, config)
    network = fit_cpts(dataset, result.dag, alpha=alpha)
    strengths = all_edge_strengths(dataset, result.dag)

    out = Path(out_path)
    out.write_text(serialize_network(network, edge_strengths=strengths),
                   encoding="utf-8")
    dot = Path(dot_path) if dot_path else out.with_suffix(".dot")
    responses = tuple(n for n in RESPONSE_VARIABLES
                      if any(v.name == n for v in dataset.variables))
    dot.write_text(to_dot(result.dag, edge_strengths=strengths,
                          response_variables=responses), encoding="utf-8")
    figure = Path(figure_path) if figure_path else out.with_suffix(".png")
    render_network_figure(network, figure, edge_strengths=strengths,
                          response_variables=responses)

    click.echo(f"rows: {dataset.row_count}  variables: {len(dataset.variables)}")
    click.echo(f"score: {result.total_score:.6f}")
    for (parent, child) in sorted(result.dag.edges):
        click.echo(f"edge: {parent} -> {child}  strength {strengths[(parent, child)]:.4f}")
    click.echo(f"wrote {out}, {dot}, {figure}")


@cli.command()
@click.argument("network_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", type=click.Path(file_okay=False), default=".",
              show_default=True)
@click.option("--reverse/--no-reverse", "with_reverse", default=True,
              show_default=True,
              help="Also run the reverse driver analysis for the good state.")
@click.option("--e-hat-threshold", type=float, default=0.59, show_default=True)
@click.option("--illegal-threshold", type=float, default=0.31, show_default=True)
@click.pass_context
def scenarios(ctx: click.Context, network_file: str, scenario_file: str,
              out_dir: str, with_reverse: bool, e_hat_threshold: float,
              illegal_threshold: float) -> None:
    """Run a scenario file against a network; write tables and figures."""
    network, _ = deserialize_network_with_strengths(
        Path(network_file).read_text(encoding="utf-8"))
    scenario_list = load_scenarios(scenario_file)
    report = run_scenarios(network, scenario_list)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scenario_report.tsv").write_text(scenario_report_tsv(report),
                                             encoding="utf-8")
    text = scenario_report_text(report)
    (out / "scenario_report.txt").write_text(text, encoding="utf-8")
    if any(r.sampled is not None for r in report.rows):
        render_scenario_figure(report, out / "scenario_report.png")
    click.echo(text, nl=False)

    failed = report.has_errors
    if with_reverse:
        event = good_state_event(network, e_hat_threshold, illegal_threshold)
        drivers = [v.name for v in network.dag.variables
                   if v.name not in event.constraints]
        reverse = run_reverse_scenarios(network, drivers, event)
        (out / "reverse_report.tsv").write_text(reverse_report_tsv(reverse),
                                                encoding="utf-8")
        (out / "reverse_report.txt").write_text(reverse_report_text(reverse),
                                                encoding="utf-8")
        if any(r.error is None for r in reverse.rows):
            render_reverse_figure(reverse, out / "reverse_report.png")
        failed = failed or reverse.has_errors
    if failed:
        click.echo("some rows failed; see the error column", err=True)
        ctx.exit(1)


@cli.command()
@click.argument("network_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--samples", type=int, default=2000, show_default=True,
              help="Default sample count for /query.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Default seed for /query.")
def serve(network_file: str, port: int, host: str, samples: int, seed: int) -> None:
    """Serve the network over HTTP for the explorer UI."""
    import uvicorn

    from .service import load_app

    app = load_app(network_file, default_samples=samples, default_seed=seed)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@cli.command("export-dot")
@click.argument("network_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Write here instead of stdout.")
def export_dot(network_file: str, out_path: str | None) -> None:
    """Emit the network structure as DOT with strength-scaled edges."""
    network, strengths = deserialize_network_with_strengths(
        Path(network_file).read_text(encoding="utf-8"))
    responses = tuple(n for n in RESPONSE_VARIABLES
                      if any(v.name == n for v in network.dag.variables))
    text = to_dot(network.dag, edge_strengths=strengths,
                  response_variables=responses)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@cli.command("synth-data")
@click.option("--ma-csv", type=click.Path(dir_okay=False), default="ma.csv",
              show_default=True)
@click.option("--sizes-csv", type=click.Path(dir_okay=False), default="sizes.csv",
              show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--coves", type=int, default=13, show_default=True)
@click.option("--areas", type=int, default=24, show_default=True)
def synth_data(ma_csv: str, sizes_csv: str, seed: int, coves: int, areas: int) -> None:
    """Write a synthetic stand-in for the two field CSVs."""
    config = StandInConfig(n_coves=coves, n_areas=areas, seed=seed)
    write_standin_csvs(ma_csv, sizes_csv, config)
    click.echo(f"wrote {ma_csv} and {sizes_csv}")


def main(argv: list[str] | None = None) -> int:
    """Entry point translating every failure into the documented exit codes."""
    try:
        # with standalone_mode off, click returns ctx.exit codes instead of raising
        code = cli.main(args=argv, standalone_mode=False)
        return code if isinstance(code, int) else 0
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except (TurfBbnError, OSError, ValueError) as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 1
    except Exception as exc:  # anything else is a bug in this package
        click.echo(f"internal error: {type(exc).__name__}: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
