"""The built-in invariant suite must stay green."""

from mollowscan.checks import run_checks


def test_all_invariants_pass():
    results = run_checks()
    failures = [(name, detail) for name, ok, detail in results if not ok]
    assert not failures, f"invariant checks failed: {failures}"
    assert len(results) >= 7
