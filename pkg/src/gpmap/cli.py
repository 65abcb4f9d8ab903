"""Command-line interface of the gpmap workbench.

Exit codes: 0 on success, 1 for runtime errors (integrity, existing
outputs, non-viable ranks), 2 for usage errors (bad flags, bad letters,
configurations outside the supported envelope).
"""

import json
import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import numpy as np
import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from .analysis.clusters import export_cluster_graph, find_clusters, resolve_mode
from .analysis.density import (
    compressed_depth,
    density_curve,
    density_curves,
    distance_count_matrix,
    epistasis_sign,
    mean_curve,
)
from .analysis.information import (
    compressed_baseline,
    functional_information,
    no_epistasis_baseline,
)
from .analysis.neighbors import most_fragile, most_robust, robustness_all, robustness_distribution
from .analysis.rotations import rotation_classes
from .base import ConfigurationError, DomainError, GpmapError, OutputExistsError
from .census import run_census
from .config import RunOptions, Settings, resolve_options
from .emitters import (
    baselines_csv,
    clusters_csv,
    clusters_json,
    curves_csv,
    curves_json,
    distribution_csv,
    epistasis_csv,
    fmt,
    graph_dot,
    graph_json,
    info_document,
    robustness_csv,
    robustness_json,
)
from .genome import Genome
from .manifest import ManifestRecorder
from .metrics import CensusMetrics, export_textfile
from .oracles import run_oracles
from .phenotype import classify
from .storage import CensusResult, census_paths, read_census, read_meta
from .vm import trace as trace_execution

app = typer.Typer(
    name="gpmap",
    help="Complete genotype-phenotype maps of a minimal self-replicator VM.",
    no_args_is_help=True,
    add_completion=False,
)

console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger("gpmap.cli")


# ============================================================================
# SHARED OPTIONS
# ============================================================================

LengthOption = typer.Option(None, "--length", "-L", help="Sequence length L")
IsaOption = typer.Option(None, "--isa", help="ISA identifier (default-v1, skew-v1)")
PadOption = typer.Option(None, "--pad-nops", help="Extra no-op symbols appended to the alphabet")
StepLimitOption = typer.Option(None, "--step-limit", help="Step limit T (default 4L^2+64)")
OffspringCapOption = typer.Option(None, "--offspring-cap", help="Offspring cap M (default 4)")
ChainDepthOption = typer.Option(None, "--chain-depth", help="Reproduction chain depth G")
ChainWidthOption = typer.Option(None, "--chain-width", help="Genotypes explored per walk B")
ShardsOption = typer.Option(None, "--shards", help="Shard count (default 64 per thread)")
ThreadsOption = typer.Option(None, "--threads", help="Worker processes (env GPMAP_THREADS)")
OutOption = typer.Option(None, "--out", "-o", help="Output path or prefix")
ForceOption = typer.Option(None, "--force/--no-force", help="Overwrite existing outputs")
FormatOption = typer.Option(None, "--format", help="Output format: csv, json or dot")
ConfigOption = typer.Option(None, "--config", help="YAML/JSON config file or run manifest")
CensusArgument = typer.Argument(
    None, help="Census path prefix (or the 'census' key of --config)", show_default=False
)


@app.callback()
def main(
    log_level: str | None = typer.Option(None, "--log-level", help="Logging level"),
    env_file: Path | None = typer.Option(None, "--env-file", help="Environment file"),
) -> None:
    """Complete genotype-phenotype maps of a minimal self-replicator VM."""
    with _errors():
        settings = Settings.from_env(env_file)
    level = (log_level or settings.log_level).upper()
    root = logging.getLogger("gpmap")
    root.handlers.clear()
    root.addHandler(
        RichHandler(console=err_console, show_time=False, show_path=False, markup=False)
    )
    root.setLevel(getattr(logging, level, logging.INFO))
    root.propagate = False


@contextmanager
def _errors() -> Iterator[None]:
    """Translate library errors into exit codes."""
    try:
        yield
    except ConfigurationError as e:
        err_console.print(f"[red]Usage error:[/red] {e}", markup=True, highlight=False)
        raise typer.Exit(code=2) from e
    except GpmapError as e:
        err_console.print(f"[red]Error:[/red] {e}", markup=True, highlight=False)
        raise typer.Exit(code=1) from e
    except OSError as e:
        err_console.print(f"[red]I/O error:[/red] {e}", markup=True, highlight=False)
        raise typer.Exit(code=1) from e


def _options(config_file: Path | None, **flags: Any) -> tuple[RunOptions, Settings]:
    settings = Settings.from_env()
    return resolve_options(flags, config_file, settings), settings


def _census_prefix(options: RunOptions) -> Path:
    if options.census is None:
        raise typer.BadParameter("a census path prefix is required", param_hint="CENSUS_PREFIX")
    return options.census


def _emit(text: str, options: RunOptions) -> None:
    out = options.out
    if out is None:
        typer.echo(text, nl=False)
        return
    if out.exists() and not options.force:
        raise OutputExistsError(f"Output already exists: {out} (use --force to replace)")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def _recorder(
    subcommand: str, options: RunOptions, census_prefix: Path | None, isa_id: str | None
) -> ManifestRecorder | None:
    if options.out is None:
        return None
    inputs = [census_paths(census_prefix)["meta"]] if census_prefix is not None else []
    return ManifestRecorder(subcommand, options.to_dict(), inputs=inputs, isa_id=isa_id)


def _emit_recorded(text: str, options: RunOptions, recorder: ManifestRecorder | None) -> None:
    _emit(text, options)
    if recorder is not None and options.out is not None:
        recorder.write(options.out, outputs=[options.out])


def _format(options: RunOptions, allowed: tuple[str, ...], default: str) -> str:
    chosen = options.format or default
    if chosen not in allowed:
        raise typer.BadParameter(
            f"'{chosen}' is not available here; choose one of {', '.join(allowed)}",
            param_hint="--format",
        )
    return chosen


def _resolve_rank(census: CensusResult, rank: int | None, letters: str | None) -> int | None:
    if letters is None:
        return rank
    try:
        genome = Genome.from_letters(letters, census.alphabet_size)
    except DomainError as e:
        raise typer.BadParameter(str(e), param_hint="--genome") from e
    if genome.length != census.length:
        raise typer.BadParameter(
            f"Genome has length {genome.length}, census has length {census.length}",
            param_hint="--genome",
        )
    return genome.rank


# ============================================================================
# COMMANDS
# ============================================================================


@app.command()
def census(
    length: int | None = LengthOption,
    isa: str | None = IsaOption,
    pad_nops: int | None = PadOption,
    step_limit: int | None = StepLimitOption,
    offspring_cap: int | None = OffspringCapOption,
    chain_depth: int | None = ChainDepthOption,
    chain_width: int | None = ChainWidthOption,
    shards: int | None = ShardsOption,
    threads: int | None = ThreadsOption,
    out: Path | None = OutOption,
    force: bool | None = ForceOption,
    bitmap: bool | None = typer.Option(
        None, "--bitmap/--no-bitmap", help="Write the full-space bitmap (default: when D^L <= 2^32)"
    ),
    metrics_file: Path | None = typer.Option(
        None, "--metrics-file", help="Write Prometheus textfile metrics here"
    ),
    config: Path | None = ConfigOption,
) -> None:
    """Classify every sequence of length L and write the census files."""
    with _errors():
        options, settings = _options(
            config,
            length=length,
            isa=isa,
            pad_nops=pad_nops,
            step_limit=step_limit,
            offspring_cap=offspring_cap,
            chain_depth=chain_depth,
            chain_width=chain_width,
            shards=shards,
            threads=threads,
            out=out,
            force=force,
            bitmap=bitmap,
        )
        if options.out is None:
            raise typer.BadParameter("an output prefix is required", param_hint="--out")
        census_config = options.census_config(settings.shards_per_worker)
        resolved = options.model_copy(
            update={
                "shards": census_config.shard_count,
                "step_limit": census_config.limits.step_limit,
                "offspring_cap": census_config.limits.offspring_cap,
                "chain_depth": census_config.budgets.max_depth,
                "chain_width": census_config.budgets.max_genotypes,
            }
        )
        recorder = ManifestRecorder("census", resolved.to_dict(), isa_id=census_config.isa.id)
        metrics = CensusMetrics()

        result = run_census(census_config, metrics=metrics)

        paths = census_paths(options.out)
        recorder.write(options.out, outputs=[paths["meta"], paths["viable"], paths["bitmap"]])
        if metrics_file is not None:
            export_textfile(
                metrics,
                metrics_file,
                labels={"isa": census_config.isa.id, "length": str(census_config.length)},
            )

        info = functional_information(result.viable_count, result.length, result.alphabet_size)
        information = fmt(info.value) if info.value is not None else "undefined"
        typer.echo(
            f"L={result.length} D={result.alphabet_size} total={result.total} "
            f"viable={result.viable_count} self_replicators={result.self_replicator_count} "
            f"I={information} mers"
        )


@app.command()
def info(
    census_prefix: Path | None = CensusArgument,
    format: str | None = typer.Option(None, "--format", help="Output format: text or json"),
    meta_only: bool | None = typer.Option(
        None, "--meta-only/--full", help="Summarise from metadata alone (no payload needed)"
    ),
    config: Path | None = ConfigOption,
) -> None:
    """Summarise a census: counts, information, rotation classes, clusters."""
    with _errors():
        options, _ = _options(config, census=census_prefix, format=format, meta_only=meta_only)
        prefix = _census_prefix(options)
        chosen = _format(options, ("text", "json"), "text")
        if options.meta_only:
            meta = read_meta(prefix)
            information = functional_information(meta.viable_count, meta.L, meta.D)
            document = info_document(
                information, self_replicator_count=meta.self_replicator_count
            )
        else:
            loaded = read_census(prefix)
            information = functional_information(
                loaded.viable_count, loaded.length, loaded.alphabet_size
            )
            values = robustness_all(loaded)
            clusterings = {
                mode: find_clusters(loaded, mode, robustness=values)
                for mode in ("raw-sequences", "collapsed-rotations")
            }
            document = info_document(
                information,
                rotation_class_count=rotation_classes(loaded).class_count,
                cluster_counts={mode: c.count for mode, c in clusterings.items()},
                largest_fractions={mode: c.largest_fraction for mode, c in clusterings.items()},
                self_replicator_count=loaded.self_replicator_count,
            )

        if chosen == "json":
            typer.echo(json.dumps(document, indent=2))
            return
        table = Table(title=f"Census {prefix}", show_header=False)
        table.add_column("field")
        table.add_column("value")
        for key, value in document.items():
            table.add_row(key, json.dumps(value) if isinstance(value, dict) else str(value))
        console.print(table)


@app.command()
def clusters(
    census_prefix: Path | None = CensusArgument,
    mode: str | None = typer.Option(
        None, "--mode", help="raw-sequences|collapsed-rotations (default raw-sequences)"
    ),
    component: int | None = typer.Option(
        None, "--component", help="Export the graph of this component id"
    ),
    format: str | None = FormatOption,
    out: Path | None = OutOption,
    force: bool | None = ForceOption,
    config: Path | None = ConfigOption,
) -> None:
    """Connected clusters of viable genomes, or one cluster as a graph."""
    with _errors():
        options, _ = _options(
            config,
            census=census_prefix,
            mode=mode,
            component=component,
            format=format,
            out=out,
            force=force,
        )
        prefix = _census_prefix(options)
        loaded = read_census(prefix)
        values = robustness_all(loaded)
        clustering = find_clusters(
            loaded, resolve_mode(options.mode or "raw-sequences"), robustness=values
        )
        recorder = _recorder("clusters", options, prefix, loaded.isa_id)

        selected = options.component
        if selected is not None or options.format == "dot":
            chosen = _format(options, ("json", "dot"), "json")
            if selected is None:
                if not clustering.components:
                    raise DomainError("The census has no viable genome to export")
                selected = clustering.components[0].id
            graph = export_cluster_graph(selected, clustering, loaded, robustness=values)
            text = graph_dot(graph) if chosen == "dot" else graph_json(graph)
        else:
            chosen = _format(options, ("json", "csv"), "json")
            text = clusters_json(clustering) if chosen == "json" else clusters_csv(clustering)

        _emit_recorded(text, options, recorder)
        logger.info(
            f"{clustering.count} clusters; largest holds {fmt(clustering.largest_fraction)} "
            f"of {clustering.vertex_count} vertices"
        )


@app.command()
def robustness(
    census_prefix: Path | None = CensusArgument,
    rank: int | None = typer.Option(None, "--rank", help="Only this viable rank"),
    genome: str | None = typer.Option(None, "--genome", help="Only this genome (letters)"),
    distribution: bool | None = typer.Option(
        None,
        "--distribution/--table",
        help="Histogram of robustness values instead of the table",
    ),
    format: str | None = FormatOption,
    out: Path | None = OutOption,
    force: bool | None = ForceOption,
    config: Path | None = ConfigOption,
) -> None:
    """Viable one-mutant neighbour counts per genome."""
    with _errors():
        options, _ = _options(
            config,
            census=census_prefix,
            rank=rank,
            genome=genome,
            distribution=distribution,
            format=format,
            out=out,
            force=force,
        )
        prefix = _census_prefix(options)
        loaded = read_census(prefix)
        recorder = _recorder("robustness", options, prefix, loaded.isa_id)

        if options.distribution:
            _format(options, ("csv",), "csv")
            text = distribution_csv(robustness_distribution(loaded))
        else:
            chosen = _format(options, ("csv", "json"), "csv")
            ranks_given = options.rank or []
            if len(ranks_given) > 1:
                raise typer.BadParameter("give at most one rank", param_hint="--rank")
            selected = _resolve_rank(
                loaded, ranks_given[0] if ranks_given else None, options.genome
            )
            values = robustness_all(loaded)
            matrix = distance_count_matrix(loaded)
            indices = np.arange(loaded.viable_count)
            if selected is not None:
                indices = np.array([loaded.require_viable(selected)])
            depths = [compressed_depth(matrix[i].tolist()) for i in indices.tolist()]
            ranks = loaded.viable_ranks[indices]
            symbols = loaded.symbols[indices]
            emit = robustness_csv if chosen == "csv" else robustness_json
            text = emit(ranks, symbols, values[indices], depths)

        _emit_recorded(text, options, recorder)


@app.command()
def curves(
    census_prefix: Path | None = CensusArgument,
    rank: list[int] | None = typer.Option(None, "--rank", help="Viable rank (repeatable)"),
    genome: str | None = typer.Option(None, "--genome", help="Viable genome (letters)"),
    most_robust_flag: bool | None = typer.Option(
        None, "--most-robust/--no-most-robust", help="Most robust genome"
    ),
    most_fragile_flag: bool | None = typer.Option(
        None, "--most-fragile/--no-most-fragile", help="Most fragile genome"
    ),
    all_flag: bool | None = typer.Option(None, "--all/--no-all", help="Every viable genome"),
    mean: bool | None = typer.Option(None, "--mean/--no-mean", help="Append the mean curve"),
    epistasis: bool | None = typer.Option(
        None,
        "--epistasis/--no-epistasis",
        help="Emit epistasis signs against the no-epistasis line",
    ),
    method: str | None = typer.Option(
        None, "--method", help="Distance counting: auto|pairwise|bitmap (default auto)"
    ),
    format: str | None = FormatOption,
    out: Path | None = OutOption,
    force: bool | None = ForceOption,
    config: Path | None = ConfigOption,
) -> None:
    """Density curves rho(n) and phi(n) around viable genomes."""
    with _errors():
        options, _ = _options(
            config,
            census=census_prefix,
            rank=rank or None,
            genome=genome,
            most_robust=most_robust_flag,
            most_fragile=most_fragile_flag,
            all=all_flag,
            mean=mean,
            epistasis=epistasis,
            method=method,
            format=format,
            out=out,
            force=force,
        )
        prefix = _census_prefix(options)
        loaded = read_census(prefix)
        recorder = _recorder("curves", options, prefix, loaded.isa_id)

        selected: list[int] = list(options.rank or [])
        from_letters = _resolve_rank(loaded, None, options.genome)
        if from_letters is not None:
            selected.append(from_letters)
        if options.most_robust or options.most_fragile:
            values = robustness_all(loaded)
            for wanted, pick in (
                (options.most_robust, most_robust),
                (options.most_fragile, most_fragile),
            ):
                found = pick(loaded, values) if wanted else None
                if found is not None:
                    selected.append(found[0])

        if options.all:
            chosen_curves = density_curves(loaded)
        else:
            method_name = options.method or "auto"
            chosen_curves = [density_curve(r, loaded, method_name) for r in selected]
        if not chosen_curves and not options.mean:
            raise typer.BadParameter(
                "select genomes with --rank, --genome, --most-robust, --most-fragile, --all or --mean"
            )
        average = mean_curve(loaded) if options.mean else None

        if options.epistasis:
            _format(options, ("csv",), "csv")
            info = functional_information(loaded.viable_count, loaded.length, loaded.alphabet_size)
            if info.value is None:
                raise DomainError("Information is undefined for an empty viable set")
            line = no_epistasis_baseline(loaded.length, info.value)
            signs = [epistasis_sign(curve, line) for curve in chosen_curves]
            text = epistasis_csv(chosen_curves, line, signs)
        else:
            chosen = _format(options, ("csv", "json"), "csv")
            text = (
                curves_csv(chosen_curves, average)
                if chosen == "csv"
                else curves_json(chosen_curves, average)
            )

        _emit_recorded(text, options, recorder)


@app.command()
def baselines(
    census_prefix: Path | None = CensusArgument,
    length: int | None = LengthOption,
    alphabet: int | None = typer.Option(None, "--alphabet", "-D", help="Alphabet size D"),
    information: float | None = typer.Option(
        None, "--info", help="Functional information I_L in mers"
    ),
    out: Path | None = OutOption,
    force: bool | None = ForceOption,
    config: Path | None = ConfigOption,
) -> None:
    """Perfect-compression and no-epistasis reference curves."""
    with _errors():
        options, _ = _options(
            config,
            census=census_prefix,
            length=length,
            alphabet=alphabet,
            info=information,
            out=out,
            force=force,
        )
        shape_length, shape_alphabet, value = options.length, options.alphabet, options.info
        isa_id = None
        if options.census is not None:
            meta = read_meta(options.census)
            shape_length = shape_length or meta.L
            shape_alphabet = shape_alphabet or meta.D
            isa_id = meta.isa_id
            if value is None:
                value = functional_information(meta.viable_count, meta.L, meta.D).value
        if shape_length is None or shape_alphabet is None:
            raise typer.BadParameter("give a census or both --length and --alphabet")
        floor = compressed_baseline(shape_length, shape_alphabet)
        line = no_epistasis_baseline(shape_length, value) if value is not None else None
        recorder = _recorder("baselines", options, options.census, isa_id)
        _emit_recorded(baselines_csv(floor, line), options, recorder)


@app.command()
def trace(
    letters: str = typer.Argument(..., help="Genome as letters, a = symbol 0"),
    isa: str | None = IsaOption,
    pad_nops: int | None = PadOption,
    step_limit: int | None = StepLimitOption,
    offspring_cap: int | None = OffspringCapOption,
    chain_depth: int | None = ChainDepthOption,
    chain_width: int | None = ChainWidthOption,
    config: Path | None = ConfigOption,
) -> None:
    """Execute one genome step by step and classify it."""
    with _errors():
        options, _ = _options(
            config,
            isa=isa,
            pad_nops=pad_nops,
            step_limit=step_limit,
            offspring_cap=offspring_cap,
            chain_depth=chain_depth,
            chain_width=chain_width,
        )
        isa_spec = options.isa_spec()
        limits = options.execution_limits(len(letters))
        budgets = options.chain_budgets()
        try:
            genome = Genome.from_letters(letters, isa_spec.alphabet_size)
        except DomainError as e:
            raise typer.BadParameter(str(e), param_hint="LETTERS") from e

        recorded = trace_execution(genome, isa_spec, limits)
        for row in recorded.rows:
            typer.echo(row.format())
        for index, child in enumerate(recorded.outcome.offspring):
            typer.echo(f"offspring {index}: {child.letters}")
        phenotype = classify(genome, isa_spec, limits, budgets)
        outcome = recorded.outcome
        if outcome.reason == "StepLimit":
            typer.echo(f"StepLimit; {phenotype.kind}")
        else:
            typer.echo(f"{outcome.reason} step {outcome.steps_used}; {phenotype.kind}")


@app.command()
def verify(
    census_prefix: Path | None = CensusArgument,
    naive: bool | None = typer.Option(
        None, "--naive/--skip-naive", help="Recompute the viable set by a plain loop (default on)"
    ),
    config: Path | None = ConfigOption,
) -> None:
    """Cross-check a census against brute-force oracles."""
    with _errors():
        options, _ = _options(config, census=census_prefix, naive=naive)
        prefix = _census_prefix(options)
        loaded = read_census(prefix)
        checks = run_oracles(loaded, naive=options.naive is not False)
        table = Table(title=f"Oracle checks for {prefix}")
        table.add_column("check")
        table.add_column("result")
        table.add_column("detail")
        for check in checks:
            status = "skipped" if check.skipped else ("ok" if check.passed else "MISMATCH")
            table.add_row(check.name, status, check.detail)
        console.print(table)
        if not all(check.passed for check in checks):
            raise typer.Exit(code=1)


@app.command()
def version() -> None:
    """Print the gpmap-workbench version."""
    typer.echo(__version__)


if __name__ == "__main__":
    app()
