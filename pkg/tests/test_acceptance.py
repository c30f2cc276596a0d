"""One test per acceptance criterion; each prints a PASS/FAIL line with its evidence."""

import json

import pytest

from conftest import ACCEPTANCE_LINES
from confsym.report import run_check
from confsym.ring import Signature

BOTH = [Signature(3, 0), Signature(4, 0)]
THREE = [Signature(3, 0)]

CRITERIA = {
    1: BOTH,
    2: BOTH,
    3: BOTH,
    4: BOTH,
    5: BOTH,
    6: BOTH,
    7: BOTH,
    8: BOTH,
    9: THREE,
    10: BOTH,
    11: THREE,
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = run_check(number, CRITERIA[number])
    line = result.line()
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    print(json.dumps(result.detail, sort_keys=True, default=str))
    assert result.passed, json.dumps(result.detail, sort_keys=True, default=str)
