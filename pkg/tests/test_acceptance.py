"""Acceptance criteria 1-13, one verdict line per criterion."""
import pytest

from herglotz_flow.suite import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = run_criterion(number)
    with capsys.disabled():
        print(f"\n{result.summary()}")
    failed = [r.to_json() for r in result.rows if not r.informational and not r.passed]
    assert result.passed, failed
