import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothpell import pellsolve as ps
from smoothpell.compactrep import CompactRep
from smoothpell.errors import ClassificationError
from smoothpell.quadfield import QuadInt, fundamental_unit

from conftest import squarefree_nonsquare, sympy_pell

sqfree = st.integers(min_value=2, max_value=5000).filter(squarefree_nonsquare)


def family(case, d):
    return ps.solvable(ps.CASES[case], d, ps.unit_data(d))


def test_allowed_primes():
    assert len(ps.allowed_primes(ps.CASES["x2+1"], 200)) == 22
    odd4 = ps.allowed_primes(ps.CASES["x2+4odd"], 200)
    assert len(odd4) == 21 and all(p % 4 == 1 for p in odd4)
    assert ps.allowed_primes(ps.CASES["x2+2"], 50) == [2, 3, 11, 17, 19, 41, 43]
    assert len(ps.allowed_primes(ps.CASES["x2-1"], 42)) == 13
    with pytest.raises(ValueError):
        ps.allowed_primes(ps.CASES["x2+1"], 2)


@pytest.mark.parametrize("d, u, v, n", [(5, 1, 1, 6), (21, 5, 1, 3), (3, 2, 1, 1), (13, 3, 1, 6), (2, 1, 1, 2), (10, 3, 1, 2)])
def test_table_one_examples(d, u, v, n):
    assert ps.unit_power_index(d, u, v) == n


def test_table_one_rejects_impossible_residues():
    with pytest.raises(ClassificationError):
        ps.unit_power_index(17, 1, 1)  # d = 1 mod 8 cannot have v odd


@given(sqfree)
@settings(max_examples=150, deadline=None)
def test_table_one_gives_fundamental_solution(d):
    ud = ps.unit_data(d)
    x1, y1 = sympy_pell(d, 1)
    assert fundamental_unit(d) ** ud.n == QuadInt(x1, y1, 1, d)


@pytest.mark.parametrize(
    "case, d, first",
    [("x2-4odd", 21, (5, 1)), ("x2-2", 7, (3, 1)), ("x2+1", 13, (18, 5)), ("x2+2", 3, (1, 1)), ("x2+1", 5, (2, 1))],
)
def test_family_first_members(case, d, first):
    fam = family(case, d)
    assert fam.member_exact(fam.indices(1)[0]) == first


def test_unsolvable_cases():
    assert family("x2+2", 7) is None
    assert family("x2+1", 3) is None
    assert family("x2+4odd", 21) is None  # eta_21 has norm +1
    assert family("x2-4odd", 13) is None or family("x2-4odd", 13).modulus == 6


@given(sqfree, st.sampled_from(sorted(ps.CASES)))
@settings(max_examples=200, deadline=None)
def test_family_members_solve_their_equation(d, name):
    case = ps.CASES[name]
    fam = family(name, d)
    if fam is None:
        return
    for k in fam.indices(4):
        X, Y = fam.member_exact(k)
        assert X * X - d * Y * Y == case.pell_norm
        if case.odd_only:
            assert X % 2 == 1


@given(sqfree, st.sampled_from(["x2+1", "x2-1", "x2+2", "x2-2"]))
@settings(max_examples=150, deadline=None)
def test_solvability_matches_sympy(d, name):
    case = ps.CASES[name]
    fam = family(name, d)
    ref = sympy_pell(d, case.pell_norm)
    assert (fam is not None) == (ref is not None)
    if fam is not None and case.pell_norm != 1:
        X, Y = fam.member_exact(fam.indices(1)[0])
        assert Y == abs(ref[1]) or d == 2


def test_minus_four_index_set():
    fam = family("x2+4odd", 5)
    assert fam.indices(6) == [1, 5, 7, 11, 13, 17]
    with pytest.raises(ValueError):
        fam.exponent_of(3)


@pytest.mark.parametrize(
    "name, d, ok",
    [("x2-2", 7, True), ("x2+2", 11, True), ("x2-2", 35, False), ("x2+2", 7, False), ("x2-2", 2 * 7 * 17, True)],
)
def test_yokoi_residue_filter(name, d, ok):
    assert ps.yokoi_residue_filter(ps.CASES[name], d) is ok


@pytest.mark.parametrize("name, d, ok", [("x2-2", 7, True), ("x2+2", 11, True), ("x2+2", 3, True), ("x2-2", 3, False)])
def test_yokoi_unit_criterion(name, d, ok):
    rep = ps.unit_data(d).eta
    assert ps.yokoi_unit_criterion(ps.CASES[name], d, rep) is ok


def test_half_period():
    assert ps.half_period_test(7) == 2
    assert ps.half_period_test(3) == -2
    assert ps.half_period_test(6) == -2
    assert ps.half_period_test(13) is None


def test_nu_squared_over_two_is_the_unit():
    for d in (3, 6, 7, 11, 14, 23, 1022):
        ud = ps.unit_data(d)
        nu = ps.nu_generator(d, ud)
        if nu is None:
            continue
        from smoothpell.compactrep import expand_exact

        v = expand_exact(nu)
        w = v * v
        assert QuadInt(w.a // 2, w.b // 2, w.s, d) == expand_exact(ud.eta)


def test_d2_families():
    plus = family("x2-2", 2)
    minus = family("x2+2", 2)
    assert [plus.member_exact(k) for k in plus.indices(3)] == [(2, 1), (10, 7), (58, 41)]
    assert [minus.member_exact(k) for k in minus.indices(3)] == [(4, 3), (24, 17), (140, 99)]
