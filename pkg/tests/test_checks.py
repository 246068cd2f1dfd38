import pytest
from scripts import view_results
from tinydb import TinyDB

from symplectic_restrictions.check import Check, CheckBaseOutput, CheckConfig, CheckInstance, golden_records
from symplectic_restrictions.checks.basis import CheckInstanceBasis, CheckInstanceOutputBasis
from symplectic_restrictions.errors import VerificationMismatch
from symplectic_restrictions.germ import parse_germ
from symplectic_restrictions.paths import CHECKS_DIR, GERMS_DIR
from symplectic_restrictions.tinydb_helpers import check_data
from symplectic_restrictions.tinydb_helpers.check_data import get_executed_checks

SUITES = sorted(CHECKS_DIR.glob("*.yaml"))


@pytest.fixture
def ledger(tmp_path, monkeypatch):
    path = tmp_path / "tinydb.json"
    monkeypatch.setattr("symplectic_restrictions.check.TINYDB_PATH", path)
    monkeypatch.setattr(check_data, "TINYDB_PATH", path)
    return path


def load_check(name: str) -> Check:
    config = CheckConfig.load(CHECKS_DIR / name)
    assert config is not None
    return Check.load_class(config.run_config.module_name, config.run_config.class_name, config)


def test_config_load_failures(tmp_path):
    assert CheckConfig.load(tmp_path / "missing.yaml") is None
    broken = tmp_path / "broken.yaml"
    broken.write_text("run_config:\n  module_name: basis\ncheck_instances:\n  - name: x\n", encoding="utf-8")
    assert CheckConfig.load(broken) is None
    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("just text\n", encoding="utf-8")
    assert CheckConfig.load(scalar) is None


def test_instances_keep_suite_parameters():
    check = load_check("01_basis.yaml")
    assert all(isinstance(i, CheckInstanceBasis) for i in check.instances)
    assert [i.variant for i in check.instances if i.germ == "W8"] == ["closed", "all"]
    assert check.num_instances("W9", set()) == 2
    assert check.num_instances("Cusp", set()) == 0


@pytest.mark.parametrize("germ_name", ["W8", "W9"])
@pytest.mark.parametrize("suite", SUITES, ids=lambda p: p.stem)
def test_suite_passes(suite, germ_name, request):
    check = load_check(suite.name)
    germ = request.getfixturevalue(germ_name.lower())
    outputs = check.execute(None, germ, set(), save=False)
    assert outputs
    for output in outputs:
        assert output.passed, output.mismatches
        assert output.germ == germ_name


def test_outputs_are_recorded(ledger, w8):
    check = load_check("01_basis.yaml")
    outputs = check.execute(None, w8, set())
    docs = TinyDB(ledger).all()
    assert len(docs) == len(outputs) == 2
    restored = CheckBaseOutput.load_class(docs[0]["module_name"], docs[0]["class_name"], docs[0])
    assert isinstance(restored, CheckInstanceOutputBasis)
    assert restored.check_instance.variant == "closed"
    assert restored.passed

    keys = get_executed_checks()
    assert ("CheckInstanceOutputBasis", "W8", "W8 closed 2-forms") in keys
    assert check.num_instances("W8", keys) == 0
    assert check.execute(None, w8, keys) == []


def test_latest_failure_is_not_resumed(ledger, w8):
    check = load_check("01_basis.yaml")
    output = check.execute(None, w8, set())[0]
    failed = output.model_copy(update={"passed": False, "execution_date": output.execution_date.add(minutes=1)})
    failed.save_to_db()
    key = ("CheckInstanceOutputBasis", "W8", "W8 closed 2-forms")
    assert key not in get_executed_checks()
    assert key in get_executed_checks(passed_only=False)


def test_wrong_field_is_reported():
    text = (GERMS_DIR / "W8.germ").read_text(encoding="utf-8").replace("field X1 x3*E", "field X1 x2*E")
    germ = parse_germ(text, "wrong-field")
    output = load_check("03_actions.yaml").execute(None, germ, set(), save=False)[0]
    assert not output.passed
    assert any("X1" in m and "expected x3*E" in m for m in output.mismatches)


def test_non_tangent_field_aborts_the_instance():
    text = (GERMS_DIR / "W8.germ").read_text(encoding="utf-8").replace("field X1 x3*E", "field X1 (1, 0, 0)")
    germ = parse_germ(text, "non-tangent")
    output = load_check("03_actions.yaml").execute(None, germ, set(), save=False)[0]
    assert not output.passed
    assert output.summary == "check aborted"
    assert output.mismatches[0].startswith("TangencyError")


def test_ledger_view(ledger, monkeypatch, capsys, w8):
    check = load_check("01_basis.yaml")
    first = check.execute(None, w8, set())[0]
    first.model_copy(update={"passed": False, "execution_date": first.execution_date.subtract(days=1)}).save_to_db()
    results = view_results.latest_results(TinyDB(ledger).all())
    assert list(results) == ["basis (W8)"]
    assert all(output.passed for output in results["basis (W8)"].values())
    assert view_results.germ_totals(results) == {"W8": (2, 2)}

    monkeypatch.setattr(view_results, "TINYDB_PATH", ledger)
    view_results.main(["-v", "2"])
    out = capsys.readouterr().out
    assert "W8 closed 2-forms: PASS" in out
    assert "W8 (2 checks): 2/2" in out


def test_golden_table_without_rows_for_the_germ():
    instance = CheckInstance(name="cusp basis", germ="Cusp", golden="basis.csv")
    with pytest.raises(VerificationMismatch, match="no rows for germ Cusp"):
        golden_records(instance, "Cusp")
    assert golden_records(instance, "W8")


def test_uncovered_germ_fails_the_instance():
    config = CheckConfig.load(CHECKS_DIR / "06_geometry.yaml")
    config.check_instances = [CheckInstance(name="renamed", germ="W8x", golden="geometry.csv")]
    check = Check.load_class(config.run_config.module_name, config.run_config.class_name, config)
    germ = parse_germ((GERMS_DIR / "W8.germ").read_text(encoding="utf-8").replace("germ W8", "germ W8x"), "renamed")
    output = check.execute(None, germ, set(), save=False)[0]
    assert not output.passed
    assert output.summary == "check aborted"
    assert output.mismatches[0].startswith("VerificationMismatch")
