import pytest

from engines.config import Settings
from engines.errors import InternalConsistencyError
from orchestration.verify import SUITES, run_suite


@pytest.mark.parametrize(
    "suite",
    [
        "semigroup",
        "context",
        "symbols",
        "multiplicativity",
        "lambda",
        "membership",
        "kernel-limit",
        "julia",
        "blaschke",
        "jointspec",
    ],
)
def test_suite_passes(suite):
    (result,) = run_suite(suite, Settings(grid_n=1025))
    failed = [name for name, ok, _ in result.checks if not ok]
    assert result.checks
    assert failed == []


def test_run_suite_all_covers_every_suite(monkeypatch):
    seen = []
    monkeypatch.setattr(
        "orchestration.verify.SUITES",
        {name: (lambda s, r, name=name: seen.append(name)) for name in SUITES},
    )
    results = run_suite("all", Settings())
    assert [r.suite for r in results] == list(SUITES)
    assert seen == list(SUITES)


def test_suite_result_json():
    (result,) = run_suite("julia", Settings())
    data = result.to_json()
    assert data["suite"] == "julia"
    assert data["passed"] is True
    assert {"name", "ok", "detail"} <= set(data["checks"][0])


def test_a_raising_suite_is_reported_and_the_rest_still_run(monkeypatch):
    def broken(settings, r):
        r.check("first check", True)
        raise InternalConsistencyError("phi∘sigma differs from rho(eta, 2b)")

    def fine(settings, r):
        r.check("only check", True)

    monkeypatch.setattr("orchestration.verify.SUITES", {"broken": broken, "fine": fine})
    first, second = run_suite("all", Settings())
    assert not first.passed
    name, ok, detail = first.checks[-1]
    assert not ok
    assert "InternalConsistencyError" in name
    assert "phi∘sigma" in detail
    assert second.passed
