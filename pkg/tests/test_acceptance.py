"""Acceptance gate: one test and one PASS/FAIL line per criterion.

Run directly (``python tests/test_acceptance.py``) to print the table, or
through pytest, where the lines are repeated in the terminal summary.
"""
import sys

import pytest

from siegel_poincare.verification import CHECKS

RESULTS = {}


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number):
    result = CHECKS[number]()
    RESULTS[number] = result
    print(result.line())
    assert result.passed, result.detail


def main() -> int:
    ok = True
    for number in sorted(CHECKS):
        result = CHECKS[number]()
        print(result.line(), flush=True)
        ok &= result.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
