import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothpell.errors import InvalidRadicand, PeriodCapExceeded
from smoothpell.quadfield import (
    ModQuad,
    QuadInt,
    cf_expand,
    convergents_up_to,
    fundamental_unit,
    pell_fundamental,
    quad_mul_mod,
    regulator,
)

from conftest import squarefree_nonsquare, sympy_pell

sqfree = st.integers(min_value=2, max_value=20000).filter(squarefree_nonsquare)


@pytest.mark.parametrize(
    "d, a0, period",
    [(2, 1, [2]), (7, 2, [1, 1, 1, 4]), (13, 3, [1, 1, 1, 1, 6])],
)
def test_cf_expand_examples(d, a0, period):
    cf = cf_expand(d)
    assert (cf.a0, cf.period, cf.l) == (a0, period, len(period))


@given(sqfree)
@settings(max_examples=200)
def test_cf_expansion_invariants(d):
    cf = cf_expand(d)
    assert cf.pq_seq[0] == (0, 1) and cf.pq_seq[-1][1] == 1
    assert all(Q > 0 for _, Q in cf.pq_seq)
    assert cf.period[-1] == 2 * cf.a0
    assert cf.period[:-1] == cf.period[:-1][::-1]
    assert cf.p**2 - d * cf.q**2 == (-1) ** cf.l


def test_cf_period_cap_carries_partial_quotients():
    with pytest.raises(PeriodCapExceeded) as info:
        cf_expand(94, step_cap=3)
    assert info.value.partial == [1, 2, 3]


@pytest.mark.parametrize("d, expected", [(2, (1, 1, -1)), (5, (2, 1, -1)), (7, (8, 3, 1))])
def test_pell_fundamental_examples(d, expected):
    assert pell_fundamental(d) == expected


@given(sqfree)
@settings(max_examples=100)
def test_pell_fundamental_matches_sympy(d):
    x, y, N = pell_fundamental(d)
    ref = sympy_pell(d, -1) or sympy_pell(d, 1)
    assert (x, y) == tuple(ref)
    assert x * x - d * y * y == N


@pytest.mark.parametrize(
    "d, unit, norm",
    [(5, QuadInt(1, 1, 2, 5), -1), (2, QuadInt(1, 1, 1, 2), -1), (21, QuadInt(5, 1, 2, 21), 1)],
)
def test_fundamental_unit_examples(d, unit, norm):
    eta = fundamental_unit(d)
    assert eta == unit and eta.norm() == norm


def test_quadint_rejects_non_integers():
    with pytest.raises(ValueError):
        QuadInt(1, 1, 2, 3)
    with pytest.raises(InvalidRadicand):
        QuadInt(1, 1, 1, 1)
    assert QuadInt(4, 2, 2, 5) == QuadInt(2, 1, 1, 5)


@given(sqfree, st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50))
def test_norm_is_multiplicative(d, a, b, c, e):
    x, y = QuadInt(a, b, 1, d), QuadInt(c, e, 1, d)
    assert (x * y).norm() == x.norm() * y.norm()


@pytest.mark.parametrize("d, value", [(2, "0.881373587019543025232609"), (5, "0.481211825059603447497758")])
def test_regulator_closed_forms(d, value):
    reg = regulator(d, precision_bits=80)
    with mpmath.workprec(200):
        assert abs(reg.value - mpmath.mpf(value)) < mpmath.mpf(10) ** -22
    assert reg.abs_error_bound == mpmath.ldexp(1, -80)


def test_regulator_largest_lehmer_radicand():
    # frozen from sympy's exact fundamental solution (1782 digits), 50 digits
    d = 304250263527210
    reg = regulator(d)
    with mpmath.workprec(200):
        ref = mpmath.mpf("4103.1056130972321017074738268693868480693260323362")
        assert abs(reg.value - ref) < mpmath.mpf(10) ** -45
    assert reg.method == "bsgs"


@given(sqfree)
@settings(max_examples=60, deadline=None)
def test_regulator_is_log_of_exact_unit(d):
    reg = regulator(d)
    eta = fundamental_unit(d)
    with mpmath.workprec(reg.precision_bits + 40):
        assert abs(reg.value - eta.log(reg.precision_bits + 40)) <= reg.abs_error_bound
    assert reg.value > 0


@pytest.mark.parametrize("d", [1, 4, 0, 12])
def test_invalid_radicands(d):
    with pytest.raises(InvalidRadicand):
        regulator(d)


@pytest.mark.parametrize(
    "d, z, expected",
    [(2, 3, [(1, 1, -1), (3, 2, 1)]), (7, 4, [(2, 1, -3), (3, 1, 2), (5, 2, -3), (8, 3, 1)]), (5, 1, [])],
)
def test_convergents(d, z, expected):
    assert list(convergents_up_to(d, z)) == expected


@pytest.mark.parametrize(
    "x, y, m, expected",
    [
        (ModQuad(1, 1, 2), ModQuad(1, 1, 2), 5, ModQuad(3, 2, 2)),
        (ModQuad(2, 1, 5), ModQuad(2, -1, 5), 7, ModQuad(6, 0, 5)),
        (ModQuad(38, 17, 5), ModQuad(2, 1, 5), 10, ModQuad(1, 2, 5)),
    ],
)
def test_quad_mul_mod(x, y, m, expected):
    assert quad_mul_mod(x, y, m) == expected


def test_quad_mul_mod_radicand_mismatch():
    with pytest.raises(ValueError):
        quad_mul_mod(ModQuad(1, 1, 2), ModQuad(1, 1, 3), 7)


def test_log_is_cancellation_safe():
    # (2 - sqrt 5)^9 is about 2.3e-6; its log must not lose digits
    tiny = QuadInt(219602, -98209, 1, 5)
    assert float(tiny.log(80)) == pytest.approx(-9 * math.log(2 + math.sqrt(5)), rel=1e-14)
