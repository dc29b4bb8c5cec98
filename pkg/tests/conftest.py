from utils import *
import glob

from qbern.verify import read_reports, summary_table


def pytest_configure(config):
    """
    Delete any stale reports and experiment outputs before running tests.
    """
    for f in [REPORTS_FILE, APPROX_CONFIG_FILE, APPROX_CSV_FILE, APPROX_JSON_FILE]:
        delete_file(f)
    stale = glob.glob("tests/cli_*.jsonl") + glob.glob("tests/cli_*.csv")
    for f in stale + glob.glob(seed_reports_file("*")):
        delete_file(f)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if exitstatus == 0 and os.path.exists(REPORTS_FILE):
        terminalreporter.ensure_newline()
        terminalreporter.section("Identity certification", sep='-', blue=True, bold=True)
        terminalreporter.line(summary_table(read_reports(REPORTS_FILE)))


def pytest_addoption(parser):
    parser.addoption(
        "--seed", nargs="*", type=int, default=[0],
        help="Seed(s) for the random fixtures of the verification suite."
    )
    parser.addoption(
        "--workers", type=int, default=None,
        help="Worker processes for the verification suite. Defaults to QBERN_WORKERS."
    )


def pytest_generate_tests(metafunc):
    if "seed" in metafunc.fixturenames:
        metafunc.parametrize("seed", metafunc.config.getoption("seed"))


def pytest_collection_modifyitems(config, items):
    order = ["unit", "test_a_", "test_b_", "test_c_", "test_d_"]

    def sort_key(item):
        for i, prefix in enumerate(order):
            if prefix in item.nodeid:
                return i
        return len(order)

    items.sort(key=sort_key)
