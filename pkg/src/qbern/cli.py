import os
import sys
import json
import logging
import textwrap
from functools import wraps

import click
from pydantic import ValidationError

from .algebra import format_rational, parse_rational
from .approx import ExperimentConfig, approximate, emit_csv, emit_json, get_function
from .bernoulli import bernoulli_numbers, q_bernoulli, q_bernoulli_umbral
from .bernstein import (
    basis_poly, from_power_matrix, operator_apply, pmf, to_power_matrix
)
from .env import QbernSettings, load_qbern_env
from .errors import QBernError
from .qcore import as_q
from .schemas import (
    SCHEMAS, BasisRecord, BernoulliRecord, IdentityCatalogue, IdentityListing,
    MatrixRecord, OperatorRecord, PmfRecord, QBernoulliRecord, StirlingRecord,
    StirlingTableRecord, VerifySummary
)
from .stirling import q_stirling2, stirling2, stirling_table
from .verify import (
    REGISTRY, all_certified, apply_mutation, mutation_catalogue, run_identity,
    run_suite, summary_table, write_reports
)


def tqs(s):
    # Normalize triple-quoted strings
    s = textwrap.dedent(s)
    s = s.replace('\r\n', '\n').replace('\r', '\n')
    lines = [line.strip() for line in s.split('\n')]
    lines = [line for line in lines if line]
    s = ' '.join(lines)
    return textwrap.fill(s, width=80) + "\n"


class RationalType(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        try:
            return parse_rational(value)
        except QBernError as e:
            self.fail(str(e), param, ctx)


class QType(click.ParamType):
    name = "q"

    def convert(self, value, param, ctx):
        try:
            return as_q(value)
        except QBernError as e:
            self.fail(f"{e}. Pass q as 'p/q' with 0 < q <= 1, e.g. '1/2'.", param, ctx)


RATIONAL = RationalType()
Q = QType()


def usage_errors(f):
    """Report library errors on bad input as usage errors (exit code 2)."""
    @wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ValidationError as e:
            err = e.errors()[0]
            loc = ".".join(str(part) for part in err['loc'])
            message = f"{loc}: {err['msg']}" if loc else err['msg']
            raise click.UsageError(message) from e
        except QBernError as e:
            raise click.UsageError(str(e).strip().splitlines()[0]) from e
    return wrapper


def emit(ctx, record, text):
    if ctx.obj['json']:
        click.echo(record.model_dump_json(indent=2))
    else:
        click.echo(text)


def list_identities(ctx):
    catalogue = mutation_catalogue()
    if ctx.obj['json']:
        listing = IdentityCatalogue([
            IdentityListing(
                name=spec.id, statement=spec.description,
                mutations=[key for key, m in catalogue.items() if m.target == spec.id]
            )
            for spec in REGISTRY.values()
        ])
        click.echo(listing.model_dump_json(indent=2))
        return
    for spec in REGISTRY.values():
        click.echo(f"{spec.id}: {spec.description}")
    click.echo()
    for key, m in catalogue.items():
        click.echo(f"{key}: {m.description}")


@click.group(help=tqs("""
    Exact q-calculus with q-Bernstein polynomials. Rational arguments are
    given as 'p/q' or as integers and q must satisfy 0 < q <= 1. Results
    are printed as exact normalized fractions.
"""))
@click.option(
    '-c', '--config', type=str, default='qbern.env',
    help=tqs("""
        Path to the environment file containing the qbern configuration.
        Defaults to 'qbern.env'.
    """),
)
@click.option(
    '-i', '--ignore', is_flag=True, default=False,
    help=tqs("""
        Ignore any environment variables and config files.
    """),
)
@click.option(
    '--json', 'json_output', is_flag=True, default=False,
    help="Print every result as JSON instead of text.",
)
@click.option(
    '-v', '--verbose', is_flag=True, default=False,
    help="Print out qbern logs while running. Defaults to False."
)
@click.pass_context
def qbern(ctx, config, ignore, json_output, verbose):
    """Main entry-point for the qbern command line interface."""
    if verbose:
        logging.basicConfig(level=logging.INFO)
    if os.path.exists(config) and not ignore:
        load_qbern_env(config)
    settings = QbernSettings.model_construct() if ignore else QbernSettings()
    ctx.obj = {'json': json_output, 'settings': settings}


@qbern.command(help=tqs("""
    Evaluate the q-Bernstein basis polynomial B_{k,n}(x, q) at X, or print
    it in the power basis when X is omitted or --poly is set.
"""))
@click.argument('k', type=int)
@click.argument('n', type=int)
@click.argument('q', type=Q)
@click.argument('x', type=RATIONAL, required=False)
@click.option('--poly', is_flag=True, default=False, help="Print the polynomial.")
@click.pass_context
@usage_errors
def basis(ctx, k, n, q, x, poly):
    p = basis_poly(k, n, q)
    if poly or x is None:
        record = BasisRecord(k=k, n=n, q=q, coefficients=p.to_list(), text=str(p))
        emit(ctx, record, str(p))
    else:
        value = p(x)
        emit(ctx, BasisRecord(k=k, n=n, q=q, x=x, value=value), format_rational(value))


@qbern.command(help=tqs("""
    Print the matrix that maps q-Bernstein coefficients of degree N to
    power-basis coefficients, or its inverse with --inverse.
"""))
@click.argument('n', type=int)
@click.argument('q', type=Q)
@click.option('--inverse', is_flag=True, default=False, help="Print the inverse matrix.")
@click.pass_context
@usage_errors
def matrix(ctx, n, q, inverse):
    if n < 0:
        raise click.BadParameter("N must be >= 0, e.g. 'qbern matrix 2 1/2'", param_hint='N')
    m = from_power_matrix(n, q) if inverse else to_power_matrix(n, q)
    emit(ctx, MatrixRecord(n=n, q=q, inverse=inverse, entries=m.to_list()), m.to_table())


@qbern.command(help=tqs("""
    Apply the q-Bernstein operator of order N to FUNCTION and evaluate at
    X, exactly. FUNCTION is a built-in with an exact evaluator
    ('abs-shift', 'runge', 'one', 'identity') or 'poly:c0,c1,...'.
"""))
@click.argument('function', type=str)
@click.argument('n', type=int)
@click.argument('q', type=Q)
@click.argument('x', type=RATIONAL)
@click.pass_context
@usage_errors
def operator(ctx, function, n, q, x):
    value = operator_apply(get_function(function), n, q, x)
    emit(
        ctx, OperatorRecord(function=function, n=n, q=q, x=x, value=value),
        format_rational(value)
    )


@qbern.command(help=tqs("""
    Second-kind Stirling number S(N, K), or the q-Stirling number S(N, K : q)
    with --q. With --table the triangle up to N is printed.
"""))
@click.argument('n', type=int)
@click.argument('k', type=int)
@click.option('--q', 'q', type=Q, default=None, help="The q parameter.")
@click.option('--table', is_flag=True, default=False, help="Print the triangle up to N.")
@click.pass_context
@usage_errors
def stirling(ctx, n, k, q, table):
    if table:
        t = stirling_table(n, q)
        emit(ctx, StirlingTableRecord(max_n=n, q=q, rows=t.to_rows()), t.to_text())
        return
    value = stirling2(n, k) if q is None else q_stirling2(n, k, q)
    emit(ctx, StirlingRecord(n=n, k=k, q=q, value=value), format_rational(value))


@qbern.command(help=tqs("""
    Bernoulli numbers of order ORDER, B_0 up to B_MAX_M.
"""))
@click.argument('order', type=int)
@click.argument('max_m', type=int)
@click.pass_context
@usage_errors
def bernoulli(ctx, order, max_m):
    t = bernoulli_numbers(order, max_m)
    values = [format_rational(v) for v in t.values]
    emit(
        ctx, BernoulliRecord(order=order, values=values),
        "\n".join(f"{m:>3}  {v}" for m, v in enumerate(values))
    )


@qbern.command(help=tqs("""
    The q-Bernoulli polynomial of order K and index N at X. With --umbral
    the powers x^j are replaced by the q-shifted factorials (1-x)_q^j.
"""))
@click.argument('n', type=int)
@click.argument('k', type=int)
@click.argument('x', type=RATIONAL)
@click.argument('q', type=Q)
@click.option('--umbral', is_flag=True, default=False, help="Use the umbral evaluation.")
@click.pass_context
@usage_errors
def qbernoulli(ctx, n, k, x, q, umbral):
    value = q_bernoulli_umbral(n, k, x, q) if umbral else q_bernoulli(n, k, x, q)
    emit(
        ctx, QBernoulliRecord(n=n, k=k, x=x, q=q, umbral=umbral, value=value),
        format_rational(value)
    )


@qbern.command(name="pmf", help=tqs("""
    Probability of K successes in N trials of the q-binomial distribution
    with parameter X. With --at-least the probability of K or more
    successes is printed (q = 1 gives the classical binomial law).
"""))
@click.argument('n', type=int)
@click.argument('k', type=int)
@click.argument('x', type=RATIONAL)
@click.argument('q', type=Q)
@click.option('--at-least', is_flag=True, default=False, help="Sum the upper tail from K.")
@click.pass_context
@usage_errors
def pmf_command(ctx, n, k, x, q, at_least):
    ks = range(k, n + 1) if at_least else [k]
    value = sum((pmf(n, j, x, q) for j in ks), parse_rational(0))
    emit(
        ctx, PmfRecord(n=n, k=k, x=x, q=q, at_least=at_least, value=value),
        format_rational(value)
    )


@qbern.command(help=tqs("""
    Certify the registered identities by exact comparison at enough q
    samples to exceed each identity's degree bound in q. Exits with code 1
    if any identity fails.
"""))
@click.option('-f', '--filter', 'prefix', type=str, default=None,
              help="Only run identities whose id starts with this prefix.")
@click.option('-s', '--seed', type=int, default=None,
              help="Seed for random fixtures. Read from QBERN_SEED if not provided.")
@click.option('-o', '--out', type=str, default=None,
              help=tqs("""
                  Write the reports as JSON lines to this file. Read from
                  QBERN_VERIFY_OUT if not provided.
              """))
@click.option('-w', '--workers', type=click.IntRange(min=1), default=None,
              help="Worker processes. Read from QBERN_WORKERS if not provided.")
@click.option('-m', '--mutation', type=str, default=None,
              help="Run one entry of the mutation catalogue instead of the suite.")
@click.option('-l', '--list', 'list_ids', is_flag=True, default=False,
              help="List the registered identities and mutations and exit.")
@click.pass_context
@usage_errors
def verify(ctx, prefix, seed, out, workers, mutation, list_ids):
    settings = ctx.obj['settings']
    if list_ids:
        list_identities(ctx)
        return
    seed = settings.seed if seed is None else seed
    out = out or settings.verify_out
    if mutation:
        reports = [run_identity(apply_mutation(mutation), seed)]
    else:
        reports = run_suite(prefix, seed, workers or settings.workers)
    if out:
        write_reports(reports, out)
    ok = all_certified(reports)
    if ctx.obj['json']:
        click.echo(VerifySummary(reports=reports, all_certified=ok).model_dump_json(indent=2))
    else:
        click.echo(summary_table(reports))
    if not ok:
        sys.exit(1)


@qbern.command(help=tqs("""
    Run a floating-point approximation experiment with the q-Bernstein
    operator and report sup and mean errors on a uniform grid. The
    experiment is read from CONFIG_FILE (JSON) or built from the options.
"""))
@click.argument('config_file', type=click.Path(exists=True, dir_okay=False), required=False)
@click.option('--function', 'function', type=str, default='runge',
              help="Target function. Defaults to 'runge'.")
@click.option('--degrees', type=str, default='4,8,16,32,64',
              help="Comma separated operator orders. Defaults to '4,8,16,32,64'.")
@click.option('--schedule', 'q_schedule',
              type=click.Choice(['fixed', 'one-minus-inverse', 'custom']),
              default='one-minus-inverse', help="Rule that assigns q to each order.")
@click.option('--q', 'q', type=str, default=None, help="q for the fixed schedule.")
@click.option('--q-values', type=str, default=None,
              help="Comma separated q per order for the custom schedule.")
@click.option('--grid-size', type=int, default=None,
              help="Evaluation points. Read from QBERN_GRID_SIZE if not provided.")
@click.option('--csv', 'csv_file', type=str, default=None, help="Write the table as CSV.")
@click.option('--json-file', type=str, default=None, help="Write the table as JSON.")
@click.pass_context
@usage_errors
def approx(ctx, config_file, function, degrees, q_schedule, q, q_values,
           grid_size, csv_file, json_file):
    if config_file:
        with open(config_file) as f:
            cfg = ExperimentConfig.model_validate_json(f.read())
    else:
        try:
            degree_list = [int(d) for d in degrees.split(',') if d.strip()]
        except ValueError:
            raise click.BadParameter(
                "Degrees must be integers, e.g. '4,8,16'", param_hint='--degrees'
            ) from None
        cfg = ExperimentConfig(
            function=function, degrees=degree_list, q_schedule=q_schedule, q=q,
            q_values=[v for v in (q_values or '').split(',') if v.strip()],
            grid_size=grid_size or ctx.obj['settings'].grid_size
        )
    table = approximate(cfg)
    if csv_file:
        emit_csv(table, csv_file)
    if json_file:
        emit_json(table, json_file)
    text = "\n".join(
        [f"{'n':>5}  {'q':>20}  {'sup_error':>24}  {'mean_error':>24}"] +
        [f"{r.n:>5}  {r.q:>20.17g}  {r.sup_error:>24.17g}  {r.mean_error:>24.17g}"
         for r in table.rows]
    )
    emit(ctx, table, text)


@qbern.command(help=tqs(f"""
    Print the JSON Schema that the --json output of a command follows.
    NAME is one of: {', '.join(SCHEMAS)}.
"""))
@click.argument('name', type=click.Choice(list(SCHEMAS)))
def schema(name):
    click.echo(json.dumps(SCHEMAS[name].model_json_schema(), indent=2))
