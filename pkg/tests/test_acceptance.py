"""The nine acceptance criteria, each at its stated tolerance.

Every test records a ``[PASS]``/``[FAIL]`` line that is printed in the
terminal summary of the run.
"""
import pytest

from hetring import verify

CRITERIA = [
    (1, "lucas_counts"),
    (2, "network_censuses"),
    (3, "closed_form_eigenvalues"),
    (4, "theorem_agreement"),
    (5, "root_structure"),
    (6, "stability_threshold"),
    (7, "unstable_cycle_fit"),
    (8, "oracle_equivalence"),
    (9, "equivariance"),
]


@pytest.mark.parametrize("number,name", CRITERIA, ids=[f"{n}-{name}" for n, name in CRITERIA])
def test_criterion(number, name, acceptance_log):
    res = getattr(verify, name)()
    assert res.number == number
    acceptance_log.append(res.line())
    print(res.line())
    for line in res.details:
        print("   ", line)
    assert res.passed, "\n".join(res.details)
