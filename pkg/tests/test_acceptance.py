"""The twelve acceptance criteria at their stated sizes and tolerances.

Each test prints one PASS/FAIL line; the lines are also collected into the
pytest terminal summary.  Runtime limits are part of the criteria and are
enforced inside the checks.
"""
import pytest

from fareystat import checks

from conftest import ACCEPTANCE_LINES

PROFILE = checks.PROFILES["default"]


@pytest.mark.parametrize("check", checks.ALL_CHECKS, ids=lambda f: f.__name__)
def test_criterion(check):
    rep = check(PROFILE)
    ACCEPTANCE_LINES.append(rep.line())
    print(rep.line())
    assert rep.passed, rep.to_dict()


if __name__ == "__main__":
    for fn in checks.ALL_CHECKS:
        print(fn(PROFILE).line())
