"""The ten acceptance criteria.  One PASS/FAIL line per criterion is
collected and printed in an "acceptance criteria" section at the end of the
run."""

import pytest
from conftest import ACCEPTANCE_LINES

from thermal_ir import acceptance

IDS = [f"{num:02d}-{name.replace(' ', '_')}" for num, name, *_ in acceptance.CRITERIA]


@pytest.mark.parametrize("number", [num for num, *_ in acceptance.CRITERIA], ids=IDS)
def test_criterion(number, request):
    result = acceptance.run_criterion(number)
    request.config.stash[ACCEPTANCE_LINES].append(result.line())
    assert result.passed, result.line()


def test_criteria_are_complete():
    assert [num for num, *_ in acceptance.CRITERIA] == list(range(1, 11))
