import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothpell import oracle


def naive(case, bound, x_limit):
    c, odd = oracle.POLYNOMIALS[case]
    out = []
    for x in range(1, x_limit + 1):
        n = x * x + c
        if n < 2 or (odd and x % 2 == 0):
            continue
        for p in range(2, bound):
            while n % p == 0:
                n //= p
        if n == 1:
            out.append(x)
    return out


@pytest.mark.parametrize(
    "case, B, x_limit, expected",
    [("x2+1", 10, 100, [1, 2, 3, 7]), ("x2-2", 10, 50, [2, 3, 4, 10]), ("x2+4odd", 3, 100, [])],
)
def test_brute_force_examples(case, B, x_limit, expected):
    assert oracle.brute_force(case, B, x_limit) == expected


@given(st.sampled_from(sorted(oracle.POLYNOMIALS)), st.integers(3, 60), st.integers(0, 3000))
@settings(max_examples=60, deadline=None)
def test_sieve_agrees_with_naive_trial_division(case, B, x_limit):
    assert oracle.brute_force(case, B, x_limit) == naive(case, B, x_limit)


@pytest.mark.parametrize("d, z, N, y1", [(5, 1, -1, None), (13, 5, -1, None), (2, 2, -1, 1)])
def test_grh_free_check_examples(d, z, N, y1):
    assert oracle.grh_free_check(d, z, N, y1)


def test_grh_free_check_catches_a_missed_smaller_solution():
    # pretend the first solution of x^2 - 13 y^2 = -1 had y = 6485 (it is 5)
    assert not oracle.grh_free_check(13, 10**5, -1, 6485)


def test_convergent_solutions():
    assert oracle.convergent_solutions(5, -1, 10**3) == [(2, 1), (38, 17), (682, 305)]
    assert oracle.convergent_solutions(5, 4, 10) is None


def test_cross_validate_empty():
    rep = oracle.cross_validate([], "x2+1", 10, 0)
    assert rep.ok and rep.mismatches == 0


def test_cross_validate_reports_differences():
    rep = oracle.cross_validate([1, 2, 4], "x2+1", 10, 100)
    assert rep.missing == [3, 7] and rep.extra == [4]
    assert "mismatches: 3" in rep.to_text()
    assert '"mismatches": 3' in rep.to_json()
