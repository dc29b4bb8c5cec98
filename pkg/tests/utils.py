import os
import csv
import json
from fractions import Fraction

from click.testing import CliRunner
from hypothesis import strategies as st

import qbern
from qbern.cli import qbern as qbern_cli

REPORTS_FILE = "tests/verify_reports.jsonl"
SEED_REPORTS_PATTERN = "tests/verify_reports_seed_{seed}.jsonl"
APPROX_CONFIG_FILE = "tests/approx_runge.json"
APPROX_CSV_FILE = "tests/approx_runge.csv"
APPROX_JSON_FILE = "tests/approx_runge_table.json"

# rationals used where a test needs a handful of fixed q values
Q_SAMPLES = [Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(3, 4), Fraction(1)]


def seed_reports_file(seed):
    return SEED_REPORTS_PATTERN.format(seed=seed)


def delete_file(path):
    try:
        os.remove(path)
    except OSError:
        pass


def q_values(max_denominator=12, allow_one=True):
    """Hypothesis strategy for q in (0, 1] with small denominators."""
    qs = st.fractions(
        min_value=Fraction(1, max_denominator), max_value=1,
        max_denominator=max_denominator
    )
    if not allow_one:
        qs = qs.filter(lambda q: q != 1)
    return qs


def unit_rationals(max_denominator=12):
    return st.fractions(min_value=0, max_value=1, max_denominator=max_denominator)


def small_polys(max_degree=4):
    coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
    return st.lists(coeffs, min_size=0, max_size=max_degree + 1).map(
        lambda cs: qbern.Poly(tuple(cs))
    )


def invoke(*args):
    """Run the qbern CLI in-process and return the click result."""
    runner = CliRunner()
    return runner.invoke(qbern_cli, ['--ignore', *args])


def invoke_json(*args):
    result = invoke('--json', *args)
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


def read_jsonl(path):
    with open(path) as f:
        return [json.loads(line) for line in f if line.strip()]


def read_csv_rows(path):
    with open(path, newline='') as f:
        return list(csv.DictReader(f))


def write_approx_config(path=APPROX_CONFIG_FILE):
    with open(path, 'w') as f:
        json.dump({
            'function': 'runge',
            'degrees': [64, 4, 16, 8, 32],
            'q_schedule': 'one-minus-inverse',
            'grid_size': 101
        }, f)
    return path
