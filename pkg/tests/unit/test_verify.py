from fractions import Fraction as F

import pytest

from qbern.errors import UnknownIdentity
from qbern.verify import (
    REGISTRY, all_certified, apply_mutation, get_identity, mutation_catalogue,
    q_sample_sequence, read_reports, run_identity, run_suite, summary_table,
    write_reports
)

REQUIRED_IDS = [
    "partition-of-unity", "thm5-recurrence", "thm9-moments", "thm10-closed-form",
    "cor4-stirling-powers", "prop1-explicit-form", "thm2-delta-form",
    "bernoulli-recurrence", "pmf-normalisation",
]


@pytest.mark.unit
def test_q_sample_sequence():
    assert q_sample_sequence(6) == [F(1, 2), F(1, 3), F(2, 3), F(1, 5), F(2, 5), F(3, 5)]
    assert q_sample_sequence(0) == []
    samples = q_sample_sequence(300)
    assert len(set(samples)) == 300
    assert all(0 < q < 1 for q in samples)


@pytest.mark.unit
@pytest.mark.parametrize("identity_id", REQUIRED_IDS)
def test_required_identities_are_registered(identity_id):
    assert get_identity(identity_id).id == identity_id


@pytest.mark.unit
@pytest.mark.parametrize("prefix", ["cor4", "thm9", "thm10"])
def test_prefix_selects_one_identity(prefix):
    assert len([i for i in REGISTRY if i.startswith(prefix)]) == 1


@pytest.mark.unit
def test_unknown_identity():
    with pytest.raises(UnknownIdentity) as excinfo:
        get_identity("thm99")
    assert "verify --list" in str(excinfo.value)
    with pytest.raises(UnknownIdentity):
        run_identity("thm99")
    with pytest.raises(UnknownIdentity):
        apply_mutation("thm99:negate-rhs")


@pytest.mark.unit
def test_param_grid():
    grid = get_identity("partition-of-unity").param_grid()
    assert grid == [{'n': n} for n in range(13)]
    pascal = get_identity("gauss-pascal-lower").param_grid()
    assert all(p['k'] <= p['n'] for p in pascal)
    assert len(pascal) == 136
    assert pascal[-1] == {'n': 15, 'k': 15}
    assert get_identity("pmf-normalisation").param_grid()[-1] == {'n': 20}
    assert get_identity("genfun-coefficient").param_grid()[-1] == {'n': 10, 'k': 10}


@pytest.mark.unit
def test_partition_of_unity_is_certified():
    report = run_identity("partition-of-unity")
    assert report.status == 'certified'
    assert report.counterexample is None
    assert len(report.params) == 13
    # n = 12 carries the largest bound, 12 choose 2 + 12
    assert report.q_degree_bound == 78
    assert report.q_samples == 79


@pytest.mark.unit
def test_reports_are_deterministic(seed):
    first = run_identity("jackson-product-rule", seed)
    second = run_identity("jackson-product-rule", seed)
    assert first.status == 'certified'
    assert first.model_dump(exclude={'wall_time'}) == second.model_dump(exclude={'wall_time'})


@pytest.mark.unit
def test_run_suite_filter():
    assert run_suite(filter="no-such-identity", workers=1) == []
    reports = run_suite(filter="gauss", workers=1)
    assert [r.id for r in reports] == ["gauss-pascal-lower", "gauss-pascal-upper", "gauss-symmetry"]
    assert all_certified(reports)


@pytest.mark.unit
def test_reports_round_trip(tmp_path):
    reports = run_suite(filter="stirling", workers=1)
    path = tmp_path / "reports.jsonl"
    write_reports(reports, path)
    assert read_reports(path) == reports
    table = summary_table(reports)
    assert "stirling-recurrence" in table
    assert table.splitlines()[-1] == "1 certified, 0 failed"


@pytest.mark.unit
def test_mutation_catalogue():
    catalogue = mutation_catalogue()
    assert list(catalogue) == sorted(catalogue)
    for identity_id in REGISTRY:
        assert f"{identity_id}:negate-rhs" in catalogue
    assert "thm5-recurrence:drop-q-power" in catalogue
    assert "thm10-closed-form:plain-powers" in catalogue


@pytest.mark.unit
def test_apply_mutation_truncates_ranges():
    spec = apply_mutation("thm9-moments:unnormalised", max_span=2)
    assert spec.id == "thm9-moments:unnormalised"
    assert spec.param_ranges == {'n': (0, 2), 'i': (0, 2)}
    assert "mutated" in spec.description
    assert get_identity("thm9-moments").param_ranges == {'n': (0, 8), 'i': (0, 8)}


@pytest.mark.unit
@pytest.mark.parametrize("key", list(mutation_catalogue()))
def test_mutation_is_detected(key):
    report = run_identity(apply_mutation(key))
    assert report.status == 'failed'
    assert report.counterexample is not None
    assert report.counterexample.lhs != report.counterexample.rhs
