"""CLI entrypoint for simplehom."""

import functools
import json
import platform
import sys
from typing import Any, Callable, Dict, Optional, Tuple

import click
import numpy as np
import sympy
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .config import RunConfig, Settings, build_run_config, load_settings
from .covers import homology_report
from .cyclotomic import embed
from .exceptions import (
    BudgetExceededError,
    ConfigurationError,
    InvalidParameterError,
    SimplehomError,
    WordSyntaxError,
    format_exception_chain,
)
from .hquot import find_psi_N, finite_image
from .logging import get_logger, setup_logging
from .pantsrep import (
    PantsRep,
    compare_printed_lambda,
    eval_word,
    order_witness,
    pants_rep,
    trace_identity,
    trace_sweep,
)
from .schottky import gamma1_fixed_points, schottky_certificate
from .suite import run_suite
from .words import parse_word


console = Console()
err_console = Console(stderr=True)
logger = get_logger(__name__)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2
EXIT_BUDGET = 3

USAGE_ERRORS = (WordSyntaxError, InvalidParameterError, ConfigurationError)


class SimplehomGroup(click.Group):
    """Click group whose usage errors exit with status 1."""

    def make_context(self, *args: Any, **kwargs: Any) -> click.Context:
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_USAGE
            raise


def exit_code_for(error: SimplehomError) -> int:
    if isinstance(error, USAGE_ERRORS):
        return EXIT_USAGE
    if isinstance(error, BudgetExceededError):
        return EXIT_BUDGET
    return EXIT_VERIFICATION


def handle_errors(func: Callable) -> Callable:
    """Map library errors onto exit codes and print them to stderr."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except SimplehomError as e:
            code = exit_code_for(e)
            if isinstance(e, WordSyntaxError):
                err_console.print(f"[red]Error: {e.message} (position {e.position})[/red]")
            else:
                err_console.print(f"[red]Error: {format_exception_chain(e)}[/red]")
            if isinstance(e, BudgetExceededError):
                err_console.print(f"[yellow]Partial count: {e.partial_count}[/yellow]")
            logger.error(f"{type(e).__name__}: {e.message}", extra={"context": e.context})
            sys.exit(code)

    return wrapper


def common_options(func: Callable) -> Callable:
    """Options shared by every command that builds a representation."""
    options = [
        click.option("--p", "p", type=int, default=None, help="Odd prime p >= 5"),
        click.option("--j", "j", type=int, default=None, help="Embedding index for numerics"),
        click.option("--config", "config_file", type=click.Path(dir_okay=False), default=None,
                     help="YAML or JSON configuration file"),
        click.option("--format", "output_format", type=click.Choice(["json", "text"]), default=None,
                     help="Report format"),
        click.option("--seed", type=int, default=None, help="Seed for randomized checks"),
        click.option("--debug", is_flag=True, help="Enable debug logging"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _setup(debug: bool, config_file: Optional[str]) -> Settings:
    """Load application settings and setup logging."""
    settings = load_settings(config_file=config_file)
    if debug:
        settings = settings.model_copy(
            update={"debug": True, "logging": settings.logging.model_copy(update={"level": "DEBUG"})}
        )
    setup_logging(settings=settings)
    return settings


def _metadata(run: RunConfig, rep: PantsRep) -> Dict[str, object]:
    return {
        "config": run.model_dump(),
        "representation": rep.metadata(),
        "versions": {
            "simplehom": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "sympy": sympy.__version__,
        },
    }


def _emit(run: RunConfig, rep: PantsRep, title: str, result: Dict[str, object]) -> None:
    payload = {"schema": SCHEMA_VERSION, "command": title, "result": result, "metadata": _metadata(run, rep)}
    if run.format == "json":
        click.echo(json.dumps(payload, sort_keys=True, indent=2))
        return
    table = Table(title=title, show_header=True)
    table.add_column("Field", style="cyan")
    table.add_column("Value", style="magenta")
    for key in sorted(result):
        value = result[key]
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        table.add_row(key, str(value))
    console.print(table)
    console.print(f"[blue]p = {rep.p}, j = {rep.j}, simplehom {__version__}[/blue]")


def _prepare(
    p: Optional[int],
    j: Optional[int],
    config_file: Optional[str],
    output_format: Optional[str],
    seed: Optional[int],
    debug: bool,
    **extra: Any,
) -> Tuple[Settings, RunConfig, PantsRep]:
    settings = _setup(debug, config_file)
    run = build_run_config(settings, p=p, j=j, format=output_format, seed=seed, **extra)
    return settings, run, pants_rep(run.p, run.j)


@click.group(cls=SimplehomGroup)
def main() -> None:
    """Simple-loop homology of finite covers from quantum representations."""
    pass


@main.command()
@click.option("--word", "-w", required=True, help="Word in a, b, A, B (uppercase = inverse)")
@common_options
@handle_errors
def trace(word: str, **options: Any) -> None:
    """Exact trace of the image of a word."""
    _, run, rep = _prepare(**options, word=word)
    w = parse_word(word)
    value = eval_word(rep, w).trace()
    numeric = embed(value, rep.j)  # type: ignore[arg-type]
    _emit(run, rep, "trace", {
        "word": str(w),
        "trace": value.to_json(),  # type: ignore[union-attr]
        "numeric": [numeric.real, numeric.imag],
        "abs": abs(numeric),
    })


@main.command()
@click.option("--word", "-w", required=True, help="Word in a, b, A, B (uppercase = inverse)")
@common_options
@handle_errors
def order(word: str, **options: Any) -> None:
    """Projective order of the image of a word."""
    _, run, rep = _prepare(**options, word=word)
    w = parse_word(word)
    _emit(run, rep, "order", {"word": str(w), **order_witness(rep, w)})


@main.command()
@click.option("--k", "k", type=int, required=True, help="Level: reduce modulo h^(k+1)")
@click.option("--permutations", is_flag=True, help="Include the generator permutations")
@common_options
@handle_errors
def image(k: int, permutations: bool, **options: Any) -> None:
    """Enumerate the finite image G_k."""
    _, run, rep = _prepare(**options, k=k)
    img = finite_image(rep, k, run.bfs_cap)
    result = img.to_json()
    result["p_group"] = img.is_p_group()
    if not permutations:
        result.pop("permutations")
    _emit(run, rep, "image", result)


@main.command()
@click.option("--k", "k", type=int, default=None, help="Level of the cover")
@click.option("--auto-N", "auto_n", is_flag=True, help="Use the level N located by psi")
@common_options
@handle_errors
def cover(k: Optional[int], auto_n: bool, **options: Any) -> None:
    """Homology of the level-k cover against its simple-loop subgroup."""
    if (k is None) == (not auto_n):
        raise click.UsageError("give exactly one of --k and --auto-N")
    settings, run, rep = _prepare(**options, k=k)
    psi = find_psi_N(rep)
    level = psi.N if auto_n else k
    report = homology_report(
        rep,
        level,
        psi,
        cap=run.bfs_cap,
        max_degree=settings.search.max_cover_degree,
        transform_limit=settings.search.snf_transform_limit,
    )
    _emit(run, rep, "cover", {**report.to_json(), "psi": psi.to_json()})


@main.command()
@common_options
@handle_errors
def schottky(**options: Any) -> None:
    """Ping-pong certificate for a free subgroup."""
    settings, run, rep = _prepare(**options)
    cert = schottky_certificate(
        rep,
        max_power=settings.search.schottky_max_power,
        samples=settings.search.schottky_samples,
    )
    _, z0 = gamma1_fixed_points(rep)
    _emit(run, rep, "schottky", {**cert.to_json(), "gamma1_fixed_points": ["infinity", [z0.real, z0.imag]]})


@main.command("rep")
@click.option("--primes", default="5,7,11,13,17,19,23", help="Comma-separated primes for the trace sweep")
@common_options
@handle_errors
def rep_command(primes: str, **options: Any) -> None:
    """Conventions of the representation: third boundary loop, trace identity, printed lambda."""
    _, run, pants = _prepare(**options)
    try:
        sweep_primes = [int(x) for x in primes.split(",") if x.strip()]
    except ValueError:
        raise click.UsageError(f"invalid prime list: {primes}")
    identity = trace_identity(pants)
    _emit(run, pants, "rep", {
        "gamma3": pants.gamma3.to_json(),
        "trace_identity": identity.holds,
        "trace": identity.computed.to_json(),
        "printed_lambda_mismatches": [list(pos) for pos in compare_printed_lambda(pants)],
        "trace_sweep": trace_sweep(sweep_primes),
    })


@main.command()
@click.option("--suite", "suite_name", type=click.Choice(["all", "fast"]), default="fast",
              help="fast keeps every search at desk-scale budgets")
@common_options
@handle_errors
def verify(suite_name: str, **options: Any) -> None:
    """Run the verification suite."""
    settings, run, rep = _prepare(**options)
    if run.seed != settings.suite.seed:
        settings = settings.model_copy(
            update={"suite": settings.suite.model_copy(update={"seed": run.seed})}
        )
    report = run_suite(settings, p=run.p, j=run.j, suite=suite_name)
    if run.format == "json":
        _emit(run, rep, "verify", report.to_json())
    else:
        table = Table(title=f"verify --suite {suite_name}", show_header=True)
        table.add_column("#", style="cyan")
        table.add_column("Check", style="magenta")
        table.add_column("Result")
        for r in report.results:
            status = "[green]pass[/green]" if r.passed else f"[red]fail[/red] {r.error}"
            table.add_row(str(r.criterion), r.name, status)
        console.print(table)
        passed = sum(r.passed for r in report.results)
        console.print(Panel(
            f"Passed: {passed}/{len(report.results)}\np = {run.p}, j = {run.j}, seed = {run.seed}",
            title="Verification Summary",
        ))
    if not report.passed:
        sys.exit(EXIT_VERIFICATION)


@main.command()
def version() -> None:
    """Show version information."""
    console.print(f"simplehom version {__version__}")


def run() -> None:
    main()


if __name__ == "__main__":
    run()
