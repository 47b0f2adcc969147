import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothpell import pellsolve as ps
from smoothpell import sequences as sq
from smoothpell.compactrep import expand_exact

from conftest import squarefree_nonsquare


def family(case, d):
    return ps.solvable(ps.CASES[case], d, ps.unit_data(d))


@pytest.mark.parametrize("kind, B, n", [("lucas", 200, 200), ("lehmer", 200, 100), ("lucas", 100, 100), ("lehmer", 42, 21)])
def test_index_bound(kind, B, n):
    assert sq.index_bound(kind, B) == n


@pytest.mark.parametrize(
    "case, d, k, m, expected",
    [
        ("x2+1", 5, 3, 100, (38, 17)),
        ("x2+1", 5, 9, 10**6, (219602, 98209)),
        ("x2-2", 7, 1, 1000, (45, 17)),
    ],
)
def test_term_mod_examples(case, d, k, m, expected):
    assert sq.term_mod(family(case, d), k, m) == expected


def test_y_scan_examples():
    f5 = family("x2+1", 5)
    scan = list(sq.y_scan_mod(f5, 7, 5))
    assert [k for k, _ in scan] == [1, 3, 5]
    assert scan == [(k, sq.term_mod(f5, k, 7)[1]) for k in (1, 3, 5)]
    assert list(sq.y_scan_mod(family("x2+1", 2), 5, 3)) == [(1, 1), (3, 0)]
    assert list(sq.y_scan_mod(family("x2-4odd", 21), 100, 2)) == [(1, 1), (2, 5)]


@given(
    st.integers(2, 1000).filter(squarefree_nonsquare),
    st.sampled_from(sorted(ps.CASES)),
    st.integers(2, 10**12),
)
@settings(max_examples=200, deadline=None)
def test_cursor_matches_exact_members(d, name, m):
    fam = family(name, d)
    if fam is None:
        return
    ks = fam.indices(20)
    cur = sq.FamilyTermCursor(fam, m)
    for i, k in enumerate(ks):
        if i:
            cur.advance()
        X, Y = fam.member_exact(k)
        assert cur.k == k
        assert cur.current() == (X % m, Y % m)


@given(st.integers(2, 1000).filter(squarefree_nonsquare))
@settings(max_examples=100, deadline=None)
def test_nu_family_is_odd_powers_over_powers_of_two(d):
    for name in ("x2+2", "x2-2"):
        fam = family(name, d)
        if fam is None or d == 2:
            continue
        nu = expand_exact(fam.nu)
        for k in fam.indices(5):
            p = nu ** (2 * k + 1)
            assert fam.member_exact(k) == (p.a // 2**k, p.b // 2**k)
            assert p.a % 2**k == 0 and p.b % 2**k == 0


@given(st.integers(2, 1000).filter(squarefree_nonsquare), st.sampled_from(sorted(ps.CASES)))
@settings(max_examples=100, deadline=None)
def test_first_member_divides_later_members(d, name):
    fam = family(name, d)
    if fam is None or not fam.first_divides:
        return
    ys = [fam.member_exact(k)[1] for k in fam.indices(12)]
    assert all(y % ys[0] == 0 for y in ys)
