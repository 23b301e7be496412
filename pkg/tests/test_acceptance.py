"""The ten acceptance criteria, each at exact tolerance.

Every outcome line is printed, and the whole list is repeated in the
terminal summary (see conftest.py).
"""
import pytest

from rgk.acceptance import CHECKS, Config

RESULTS = {}


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__ for c in CHECKS])
def test_criterion(check):
    out = check(Config())
    RESULTS[out.number] = out
    print(out.line())
    assert out.passed, out.line()


def test_ten_distinct_checks():
    assert len(CHECKS) == 10 and len({c.__name__ for c in CHECKS}) == 10
