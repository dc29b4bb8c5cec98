import pytest
from click.testing import CliRunner

from qbern.cli import qbern as qbern_cli
from qbern.schemas import SCHEMAS, VerifySummary
from qbern.verify import mutation_catalogue

from utils import *

CLI_REPORTS_FILE = "tests/cli_verify.jsonl"


@pytest.mark.dependency(name="cli_help", scope='session')
def test_cli_help():
    result = invoke('--help')
    assert result.exit_code == 0
    for command in ['basis', 'matrix', 'operator', 'stirling', 'bernoulli',
                    'qbernoulli', 'pmf', 'verify', 'approx', 'schema']:
        assert command in result.output


text_output_data = {
    'basis-poly': (['basis', '0', '2', '1/2', '--poly'], "1 - 3/2 x + 1/2 x^2"),
    'basis-default-poly': (['basis', '2', '2', '1/2'], "x^2"),
    'basis-value': (['basis', '1', '2', '1/2', '1/2'], "3/8"),
    'operator': (['operator', 'identity', '3', '1/2', '1/3'], "1/3"),
    'operator-poly': (['operator', 'poly:0,0,1', '2', '1', '1/2'], "3/8"),
    'stirling': (['stirling', '4', '2'], "7"),
    'q-stirling': (['stirling', '3', '2', '--q', '1/2'], "5/2"),
    'qbernoulli': (['qbernoulli', '1', '1', '2/3', '1/2'], "1/6"),
    'qbernoulli-umbral': (['qbernoulli', '1', '1', '2/3', '1/2', '--umbral'], "-1/6"),
    'pmf': (['pmf', '2', '2', '1/2', '1/2'], "1/4"),
    'bit-error': (['pmf', '3', '2', '1/1000', '1', '--at-least'], "1499/500000000"),
}


@pytest.mark.dependency(depends=["cli_help"], scope='session')
@pytest.mark.parametrize("args, expected", text_output_data.values(), ids=text_output_data.keys())
def test_cli_text_output(args, expected):
    result = invoke(*args)
    assert result.exit_code == 0, result.output
    assert result.output.strip() == expected


@pytest.mark.dependency(depends=["cli_help"], scope='session')
def test_cli_matrix():
    result = invoke('matrix', '2', '1/2')
    assert result.exit_code == 0
    assert len(result.output.strip().splitlines()) == 3
    record = invoke_json('matrix', '2', '1/2')
    assert record['entries'] == [["1", "0", "0"], ["-3/2", "3/2", "0"], ["1/2", "-3/2", "1"]]
    inverse = invoke_json('matrix', '2', '1/2', '--inverse')
    assert inverse['inverse'] is True
    assert inverse['entries'][1] == ["1", "2/3", "0"]


@pytest.mark.dependency(depends=["cli_help"], scope='session')
def test_cli_bernoulli():
    result = invoke('bernoulli', '1', '4')
    assert result.exit_code == 0
    assert result.output.splitlines()[4].split() == ['4', '-1/30']
    record = invoke_json('bernoulli', '2', '2')
    assert record == {'order': 2, 'values': ['1', '-1', '5/6']}


@pytest.mark.dependency(depends=["cli_help"], scope='session')
def test_cli_stirling_table():
    result = invoke('stirling', '4', '0', '--table')
    assert result.exit_code == 0
    assert len(result.output.strip().splitlines()) == 5
    record = invoke_json('stirling', '3', '0', '--table', '--q', '1/2')
    table = SCHEMAS['stirling-table'].model_validate(record)
    assert table.max_n == 3
    assert table.q == "1/2"
    assert table.rows[3] == ["0", "1", "5/2", "1"]
    classical = invoke_json('stirling', '4', '0', '--table')
    assert classical['q'] is None
    assert classical['rows'][4] == ["0", "1", "7", "6", "1"]


usage_error_data = {
    'q-too-large': ['basis', '0', '2', '3/2'],
    'q-zero': ['basis', '0', '2', '0'],
    'malformed-x': ['basis', '0', '2', '1/2', '0.5'],
    'negative-matrix': ['matrix', '-1', '1/2'],
    'no-exact-evaluator': ['operator', 'exp', '3', '1/2', '1/2'],
    'unknown-function': ['operator', 'gamma', '3', '1/2', '1/2'],
    'x-outside': ['pmf', '3', '1', '3/2', '1/2'],
    'bernoulli-order': ['bernoulli', '0', '4'],
    'unknown-mutation': ['verify', '--mutation', 'thm99:negate-rhs'],
    'bad-degrees': ['approx', '--degrees', '4,a'],
    'fixed-without-q': ['approx', '--schedule', 'fixed', '--degrees', '4'],
    'unknown-schema': ['schema', 'nothing'],
}


@pytest.mark.dependency(depends=["cli_help"], scope='session')
@pytest.mark.parametrize("args", usage_error_data.values(), ids=usage_error_data.keys())
def test_cli_usage_errors(args):
    result = invoke(*args)
    assert result.exit_code == 2, result.output
    assert "Error" in result.output


@pytest.mark.dependency(depends=["cli_help"], scope='session')
def test_cli_q_hint():
    result = invoke('basis', '0', '2', '3/2')
    assert "0 < q <= 1" in result.output


json_output_data = {
    'basis': ['basis', '0', '2', '1/2', '1/2'],
    'matrix': ['matrix', '3', '2/3'],
    'operator': ['operator', 'runge', '4', '3/4', '1/2'],
    'stirling': ['stirling', '5', '3'],
    'bernoulli': ['bernoulli', '1', '6'],
    'qbernoulli': ['qbernoulli', '3', '2', '1/3', '1/2'],
    'pmf': ['pmf', '4', '1', '1/3', '2/3'],
    'stirling-table': ['stirling', '3', '0', '--table'],
    'identity-list': ['verify', '--list'],
}


@pytest.mark.dependency(depends=["cli_help"], scope='session')
@pytest.mark.parametrize("name, args", json_output_data.items(), ids=json_output_data.keys())
def test_cli_json_matches_schema(name, args):
    record = invoke_json(*args)
    SCHEMAS[name].model_validate(record)


@pytest.mark.dependency(depends=["cli_help"], scope='session')
def test_cli_pmf_json_marks_tail_sums():
    point = invoke_json('pmf', '3', '2', '1/1000', '1')
    tail = invoke_json('pmf', '3', '2', '1/1000', '1', '--at-least')
    assert point['at_least'] is False
    assert point['value'] == "2997/1000000000"
    assert tail['at_least'] is True
    assert tail['value'] == "1499/500000000"
    SCHEMAS['pmf'].model_validate(tail)


@pytest.mark.dependency(depends=["cli_help"], scope='session')
def test_cli_schema():
    result = invoke('schema', 'identity-report')
    assert result.exit_code == 0
    schema = json.loads(result.output)
    assert 'status' in schema['properties']


@pytest.mark.dependency(
    name="cli_verify", depends=["cli_help", "verify_suite"], scope='session'
)
def test_cli_verify():
    result = invoke('verify', '--filter', 'thm9', '--workers', '1', '--out', CLI_REPORTS_FILE)
    assert result.exit_code == 0, result.output
    assert "thm9-moments" in result.output
    assert "1 certified, 0 failed" in result.output
    assert [r['id'] for r in read_jsonl(CLI_REPORTS_FILE)] == ["thm9-moments"]


@pytest.mark.dependency(depends=["cli_verify"], scope='session')
def test_cli_verify_json():
    summary = VerifySummary.model_validate(
        invoke_json('verify', '--filter', 'cor4', '--workers', '1')
    )
    assert summary.all_certified
    assert [r.id for r in summary.reports] == ["cor4-stirling-powers"]


@pytest.mark.dependency(depends=["cli_verify"], scope='session')
def test_cli_verify_mutation_fails():
    result = invoke('verify', '--mutation', 'thm9-moments:unnormalised')
    assert result.exit_code == 1
    assert "0 certified, 1 failed" in result.output


@pytest.mark.dependency(depends=["cli_verify"], scope='session')
def test_cli_verify_list():
    result = invoke('verify', '--list')
    assert result.exit_code == 0
    assert "thm10-closed-form: " in result.output
    assert "thm5-recurrence:drop-q-power: " in result.output


@pytest.mark.dependency(depends=["cli_verify"], scope='session')
def test_cli_config_file(tmp_path):
    out = tmp_path / "env_reports.jsonl"
    env_file = tmp_path / "qbern.env"
    env_file.write_text(f"QBERN_VERIFY_OUT={out}\nQBERN_WORKERS=1\n")
    try:
        result = CliRunner().invoke(
            qbern_cli, ['-c', str(env_file), 'verify', '--filter', 'gauss-symmetry']
        )
        assert result.exit_code == 0, result.output
        assert [r['id'] for r in read_jsonl(out)] == ["gauss-symmetry"]
    finally:
        os.environ.pop("QBERN_VERIFY_OUT", None)
        os.environ.pop("QBERN_WORKERS", None)


@pytest.mark.dependency(depends=["cli_verify"], scope='session')
def test_cli_verify_list_json():
    listing = invoke_json('verify', '--list')
    assert [entry['name'] for entry in listing] == list(qbern.REGISTRY)
    by_name = {entry['name']: entry for entry in listing}
    assert by_name['thm10-closed-form']['statement'] == qbern.REGISTRY['thm10-closed-form'].description
    for name, entry in by_name.items():
        assert f"{name}:negate-rhs" in entry['mutations']
    assert "thm5-recurrence:drop-q-power" in by_name['thm5-recurrence']['mutations']
    assert sum(len(entry['mutations']) for entry in listing) == len(mutation_catalogue())


module_commands_data = {
    'algebra': [
        ['basis', '0', '2', '1/2', '--poly'],
        ['matrix', '2', '1/2', '--inverse'],
    ],
    'qcore': [
        ['pmf', '4', '2', '1/3', '1/2'],
        ['stirling', '4', '2', '--q', '1/2'],
    ],
    'bernstein': [
        ['basis', '1', '3', '1/2', '1/3'],
        ['matrix', '3', '1/2'],
        ['operator', 'runge', '4', '1/2', '1/3'],
        ['pmf', '3', '2', '1/1000', '1', '--at-least'],
    ],
    'stirling': [
        ['stirling', '5', '2'],
        ['stirling', '4', '0', '--table'],
    ],
    'bernoulli': [
        ['bernoulli', '2', '4'],
        ['qbernoulli', '2', '1', '1/3', '1/2', '--umbral'],
    ],
    'verify': [
        ['verify', '--list'],
        ['verify', '--filter', 'gauss-symmetry', '--workers', '1'],
    ],
    'approx': [
        ['approx', '--degrees', '4,8', '--grid-size', '11'],
    ],
}


@pytest.mark.dependency(depends=["cli_help"], scope='session')
def test_cli_command_tree():
    assert set(qbern_cli.commands) == {
        'basis', 'matrix', 'operator', 'stirling', 'bernoulli', 'qbernoulli',
        'pmf', 'verify', 'approx', 'schema'
    }
    used = {args[0] for calls in module_commands_data.values() for args in calls}
    assert used == set(qbern_cli.commands) - {'schema'}


@pytest.mark.dependency(depends=["cli_help"], scope='session')
@pytest.mark.parametrize("module, calls", module_commands_data.items(), ids=module_commands_data.keys())
def test_cli_reaches_module(module, calls):
    for args in calls:
        assert args[0] in qbern_cli.commands
        result = invoke(*args)
        assert result.exit_code == 0, f"{module}: {args}: {result.output}"
        assert result.output.strip()
        invoke_json(*args)
