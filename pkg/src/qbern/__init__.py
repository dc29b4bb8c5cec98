from qbern.algebra import *
from qbern.qcore import *
from qbern.bernstein import *
from qbern.stirling import *
from qbern.bernoulli import *
from qbern.verify import run_identity, run_suite, get_identity, REGISTRY
from qbern.approx import ExperimentConfig, ErrorTable, approximate, emit_csv
from qbern.errors import *
from qbern.logger import setup_logging
from qbern.env import load_qbern_env, QbernSettings

logger = setup_logging()
