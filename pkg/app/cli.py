import logging
import re
import sys
from typing import Callable, List, Optional, Sequence, Union

import click
from pydantic import ValidationError

from app.exceptions import InvariantViolationError, PreconditionError, SetMapError
from app.models.map_store import MapStore
from app.models.schemas import ConvergenceReport
from app.services.expression_parser import ConstExprParser
from app.services.map_analyzer import MapAnalyzer
from app.services.map_metrics import MapMetricCalculator, parse_metric, parse_ns
from app.services.plotter import MapPlotter
from config import get_config

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PRECONDITION = 2
EXIT_INVARIANT = 3

INDEX_VARIABLE = re.compile(r'\bn\b')


def parse_tolerance(text: str) -> Union[float, Callable[[int], float]]:
    """A constant, or a constant expression in n such as `2/n`"""
    consts = ConstExprParser()
    if INDEX_VARIABLE.search(text):
        consts.parse(INDEX_VARIABLE.sub('(1)', text))
        return lambda n: consts.parse(INDEX_VARIABLE.sub(f'({n})', text))
    return consts.parse(text)


def _positive_tolerance(text: str) -> float:
    value = ConstExprParser().parse(text)
    if not value > 0:
        raise click.BadParameter(f'tolerance must be positive, got {value}')
    return value


def _echo_report(report: ConvergenceReport):
    click.echo(f"{'n':>4}  {'lo':>20}  {'hi':>20}  {'tol':>12}")
    for row in report.rows:
        click.echo(f"{row.n:>4}  {row.distance.lo:>20.12g}  {row.distance.hi:>20.12g}  {row.tol:>12.6g}")
    click.echo(f"verdict: {report.verdict.describe()}")


@click.group(name='setmaps')
def setmaps():
    """Minimal usco / cusco maps: classification, convexification and distances."""
    if not logging.getLogger().handlers:
        logging.basicConfig(level=get_config().CLI_LOG_LEVEL, stream=sys.stderr)


@setmaps.command()
@click.argument('source')
def classify(source):
    """Print the usco / cusco flags of a map and the failing breakpoints."""
    report = MapAnalyzer().classify(MapStore().load(source))
    click.echo(report.flags_line())
    for w in report.witnesses:
        click.echo(f"witness x={w.breakpoint!r} {w.rule}: {w.reason}")


@setmaps.command()
@click.argument('source')
@click.option('-o', '--output', required=True, type=click.Path(dir_okay=False), help='Map file to write')
def phi(source, output):
    """Write the fiberwise convex hull of a minimal usco map."""
    store = MapStore()
    store.save(MapAnalyzer().phi(store.load(source)), output)


@setmaps.command(name='phi-inv')
@click.argument('source')
@click.option('-o', '--output', required=True, type=click.Path(dir_okay=False), help='Map file to write')
def phi_inv(source, output):
    """Write the minimal usco map inside a minimal cusco map."""
    store = MapStore()
    store.save(MapAnalyzer().phi_inverse(store.load(source)), output)


@setmaps.command()
@click.argument('first')
@click.argument('second')
@click.option('--metric', required=True, help='point:x1,x2,... | uc:u,v | uniform | graph')
@click.option('--tol', default=None, help='Bracket width (default from config)')
def dist(first, second, metric, tol):
    """Print a bracket around the distance of two maps."""
    store = MapStore()
    tol = _positive_tolerance(tol) if tol is not None else get_config().DEFAULT_TOL
    bracket = MapMetricCalculator().distance(store.load(first), store.load(second), parse_metric(metric), tol)
    click.echo(str(bracket))


@setmaps.command()
@click.argument('family')
@click.argument('limit')
@click.option('--metric', required=True, help='point:x1,x2,... | uc:u,v | uniform | graph')
@click.option('--n', 'ns', default='1..20', show_default=True, help='Index list, e.g. 1..50 or 2,4,8')
@click.option('--tol', default=None, help='Tolerance, a constant or an expression in n such as 2/n')
def converge(family, limit, metric, ns, tol):
    """Print the distance table of a family against a limit map and a verdict."""
    store = MapStore()
    tolerance = parse_tolerance(tol) if tol is not None else get_config().DEFAULT_TOL
    report = MapMetricCalculator().converge(store.corpus.family(family), store.load(limit),
                                            parse_metric(metric), parse_ns(ns), tolerance)
    _echo_report(report)


@setmaps.group()
def corpus():
    """Built-in example maps."""


@corpus.command(name='list')
def corpus_list():
    for name, description in MapStore().corpus.names():
        click.echo(f"{name:<14} {description}")


@corpus.command(name='get')
@click.argument('name')
@click.option('--n', type=int, default=None, help='Family index')
@click.option('-o', '--output', type=click.Path(dir_okay=False), default=None)
def corpus_get(name, n, output):
    """Print (or write) the map file of a corpus map."""
    store = MapStore()
    F = store.corpus.build(name, n)
    if output:
        store.save(F, output)
    else:
        click.echo(store.corpus.export_example(name, n), nl=False)


@setmaps.command()
@click.argument('source')
@click.option('-o', '--output', required=True, type=click.Path(dir_okay=False), help='SVG file to write')
@click.option('--y-range', default=None, help='lo,hi (default: data range padded by 0.5)')
def plot(source, output, y_range):
    """Render a map as SVG."""
    bounds = None
    if y_range is not None:
        parts = y_range.split(',')
        if len(parts) != 2:
            raise click.BadParameter('expected lo,hi', param_hint='--y-range')
        consts = ConstExprParser()
        bounds = tuple(consts.parse(p) for p in parts)
        if not bounds[0] < bounds[1]:
            raise click.BadParameter('needs lo < hi', param_hint='--y-range')
    MapPlotter().render(MapStore().load(source), output, bounds)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return its exit code"""
    args: List[str] = list(sys.argv[1:] if argv is None else argv)
    try:
        result = setmaps.main(args=args, prog_name='setmaps', standalone_mode=False)
        return result if isinstance(result, int) else EXIT_OK
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo('Aborted', err=True)
        return EXIT_USAGE
    except PreconditionError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_PRECONDITION
    except InvariantViolationError as e:
        click.echo(f"internal error: {e}", err=True)
        return EXIT_INVARIANT
    except (SetMapError, ValidationError, ValueError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(run())
