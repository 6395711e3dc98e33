"""One test per acceptance criterion; each prints a PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for just the summary lines.
"""
import pytest

from dbr.suite import CRITERIA

RESULTS = {}


@pytest.mark.parametrize("key", list(CRITERIA))
def test_criterion(key):
    res = CRITERIA[key]()
    RESULTS[key] = res
    print(res.line())
    for c in res.checks:
        print(f"    {'ok ' if c.passed else 'BAD'} {c.name}: residual={c.residual} tolerance={c.tolerance}")
    assert res.passed, f"{key} failed checks: {res.failed_checks()}"


if __name__ == "__main__":
    for key, fn in CRITERIA.items():
        print(fn().line())
