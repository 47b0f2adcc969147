import math

import pytest

from smoothpell import pellsolve as ps
from smoothpell import smoothness as sm
from smoothpell.compactrep import CompactRep
from smoothpell.errors import ReconstructionError, ValuationOverflow
from smoothpell.quadfield import QuadInt
from sympy import primerange

PRIMES_200 = list(primerange(2, 200))


def family(case, d):
    return ps.solvable(ps.CASES[case], d, ps.unit_data(d))


def test_valuation_probe_examples():
    f5 = family("x2+1", 5)
    assert sm.valuation_probe(sm.MemberSource(f5, 9), 17, 3) == 1
    assert sm.valuation_probe(sm.MemberSource(f5, 9), 7, 3) == 0
    assert sm.valuation_probe(sm.MemberSource(f5, 1), 13, 3) == 0
    with pytest.raises(ValuationOverflow):
        sm.valuation_probe(sm.MemberSource(f5, 9), 17, 1)


def test_smooth_test_examples():
    f5 = family("x2+1", 5)
    v = sm.smooth_test(sm.MemberSource(f5, 9), PRIMES_200)
    assert v.smooth and v.factorization == {17: 1, 53: 1, 109: 1}
    assert abs(v.gap) < 1e-9
    v1 = sm.smooth_test(sm.MemberSource(f5, 1), PRIMES_200)
    assert v1.smooth and v1.factorization == {}
    v13 = sm.smooth_test(sm.MemberSource(family("x2+1", 13), 1), PRIMES_200)
    assert v13.smooth and v13.factorization == {5: 1}


def test_not_smooth_gap_is_large():
    f5 = family("x2+1", 5)
    v = sm.smooth_test(sm.MemberSource(f5, 9), [p for p in PRIMES_200 if p != 109])
    assert not v.smooth and v.gap > math.log(2) / 2
    assert v.gap == pytest.approx(math.log(109))


def test_compact_source():
    rep = CompactRep.from_quadint(QuadInt(219602, 98209, 1, 5))
    v = sm.smooth_test(sm.CompactYSource(rep), PRIMES_200)
    assert v.smooth and v.value() == 98209


def test_high_valuations_are_refined():
    class Fixed:
        y = 2**70 * 3**40 * 199

        def residue(self, m):
            return self.y % m

        def size_log(self):
            return math.log(self.y)

    v = sm.smooth_test(Fixed(), PRIMES_200, batch_bits=64)
    assert v.smooth and v.factorization == {2: 70, 3: 40, 199: 1}


@pytest.mark.parametrize("n, B, expected", [(50, 10, {2: 1, 5: 2}), (98209, 200, {17: 1, 53: 1, 109: 1}), (101, 100, None), (1, 3, {})])
def test_trial_factor(n, B, expected):
    assert sm.trial_factor_smooth(n, B) == expected


@pytest.mark.parametrize("d, y, N, x", [(5, 98209, -1, 219602), (2, 1, -1, 1), (21, 1, 4, 5), (5, {17: 1, 53: 1, 109: 1}, -1, 219602)])
def test_reconstruct(d, y, N, x):
    assert sm.reconstruct_x(d, y, N) == x


def test_reconstruct_rejects_non_squares():
    with pytest.raises(ReconstructionError):
        sm.reconstruct_x(5, 3, -1)


def test_scan_matches_exact_members():
    for case, d, B in [("x2+1", 5, 200), ("x2-4odd", 5, 100), ("x2-2", 2, 200), ("x2-1", 6, 42)]:
        fam = family(case, d)
        primes = ps.allowed_primes(ps.CASES[case], B)
        count = 40
        got = [(k, v.value()) for k, v in sm.scan_family(fam, primes, count)]
        want = []
        for k in fam.indices(count):
            Y = fam.member_exact(k)[1]
            if sm.trial_factor_smooth(Y, B) is not None:
                want.append((k, Y))
            elif k == fam.indices(1)[0] and fam.first_divides:
                break
        assert got == want
