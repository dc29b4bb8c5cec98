import pytest
import qbern
from qbern.verify import read_reports, write_reports

from utils import *


def _without_timing(reports):
    return [r.model_dump(exclude={'wall_time'}) for r in reports]


@pytest.mark.dependency(name="verify_suite", scope='session')
def test_verify_suite(request):
    workers = request.config.getoption("workers")
    seeds = request.config.getoption("seed")
    for seed in seeds:
        reports = qbern.run_suite(seed=seed, workers=workers)
        assert [r.id for r in reports] == sorted(qbern.REGISTRY)
        failed = [r.id for r in reports if r.status != 'certified']
        assert not failed, f"Failed identities for seed {seed}: {failed}"
        for r in reports:
            assert r.q_samples > r.q_degree_bound
        write_reports(reports, seed_reports_file(seed))
        if seed == seeds[0]:
            write_reports(reports, REPORTS_FILE)
    assert os.path.exists(REPORTS_FILE)


@pytest.mark.dependency(depends=["verify_suite"], scope='session')
def test_reports_file_per_seed(request):
    ids = sorted(qbern.REGISTRY)
    for seed in request.config.getoption("seed"):
        reports = read_reports(seed_reports_file(seed))
        assert [r.id for r in reports] == ids
        assert all(r.status == 'certified' for r in reports)


@pytest.mark.dependency(depends=["verify_suite"], scope='session')
def test_reports_file():
    reports = read_reports(REPORTS_FILE)
    assert len(reports) == len(qbern.REGISTRY)
    by_id = {r.id: r for r in reports}
    assert by_id["partition-of-unity"].params[-1] == {'n': 12}
    assert len(by_id["bernoulli-recurrence"].params) == 20
    assert len(by_id["thm10-closed-form"].params) == 21
    assert by_id["pmf-normalisation"].params[-1] == {'n': 20}
    assert by_id["genfun-coefficient"].params[-1] == {'n': 10, 'k': 10}
    assert by_id["gauss-pascal-lower"].params[-1] == {'n': 15, 'k': 15}


@pytest.mark.dependency(depends=["verify_suite"], scope='session')
def test_suite_is_deterministic():
    first = qbern.run_suite(filter="thm", workers=2)
    second = qbern.run_suite(filter="thm", workers=1)
    assert _without_timing(first) == _without_timing(second)


@pytest.mark.dependency(depends=["verify_suite"], scope='session')
def test_suite_filters():
    assert qbern.run_suite(filter="zzz", workers=1) == []
    cor4 = qbern.run_suite(filter="cor4", workers=1)
    assert [r.id for r in cor4] == ["cor4-stirling-powers"]
