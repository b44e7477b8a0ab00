"""One check per acceptance criterion, each printing a PASS/FAIL line."""
import pytest

from octahedral.acceptance import CHECKS


@pytest.mark.parametrize("number", sorted(CHECKS))
def test_criterion(number, capsys):
    result = CHECKS[number]()
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
