"""From a polynomial x^2 + c to families of Pell-type solutions.

Each supported polynomial f reduces ``f(x) = d*y^2`` (d squarefree) to
``x^2 - d*y^2 = N``.  For a given d this module decides whether that equation
is solvable and, if so, describes all its solutions as

    coeff * nu * eta^e,   e in an arithmetic index set,

where ``eta`` is the fundamental unit (as a compact representation) and ``nu``
is an optional extra generator (the smallest solution of x^2 - d y^2 = +-2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import mpmath
from sympy import primerange

from . import compactrep as cr
from . import infrastructure as infra
from .compactrep import CompactRep
from .errors import ClassificationError, ConsistencyError, PerronViolation
from .quadfield import QuadInt, Regulator, cf_expand, regulator


@dataclass(frozen=True)
class PolynomialCase:
    name: str
    c: int  # f(x) = x^2 + c
    pell_norm: int
    prime_rule: Callable[[int], bool] = field(compare=False, repr=False)
    odd_only: bool = False
    note: str = ""

    def f(self, x: int) -> int:
        return x * x + self.c

    def admits(self, p: int) -> bool:
        return self.prime_rule(p)


CASES: dict[str, PolynomialCase] = {
    "x2-1": PolynomialCase("x2-1", -1, 1, lambda p: True, note="all primes"),
    "x2+1": PolynomialCase("x2+1", 1, -1, lambda p: p == 2 or p % 4 == 1, note="2 and p = 1 mod 4"),
    "x2+2": PolynomialCase("x2+2", 2, -2, lambda p: p == 2 or p % 8 in (1, 3), note="2 and p = 1, 3 mod 8"),
    "x2-2": PolynomialCase("x2-2", -2, 2, lambda p: p == 2 or p % 8 in (1, 7), note="2 and p = 1, 7 mod 8"),
    "x2+4odd": PolynomialCase("x2+4odd", 4, -4, lambda p: p % 4 == 1, odd_only=True, note="p = 1 mod 4, x odd"),
    "x2-4odd": PolynomialCase("x2-4odd", -4, 4, lambda p: p != 2, odd_only=True, note="odd primes, x odd"),
}


def get_case(name: str) -> PolynomialCase:
    try:
        return CASES[name]
    except KeyError:
        raise ValueError(f"unknown case {name!r}; choose from {sorted(CASES)}") from None


def allowed_primes(case: PolynomialCase, bound: int) -> list[int]:
    """Primes p < bound that may divide d for this polynomial."""
    if bound < 3:
        raise ValueError("bound must be at least 3")
    return [p for p in primerange(2, bound) if case.admits(p)]


def prefilter(case: PolynomialCase, d: int) -> bool:
    """Congruence conditions on d that need no unit computation."""
    if case.odd_only:
        return d % 8 == 5
    if abs(case.pell_norm) == 2:
        return d % 4 in (2, 3) and yokoi_residue_filter(case, d)
    return True


def odd_prime_factors(d: int) -> list[int]:
    out = []
    n = d
    while n % 2 == 0:
        n //= 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 2
    if n > 1:
        out.append(n)
    return out


def yokoi_residue_filter(case: PolynomialCase, d: int) -> bool:
    """Necessary condition on the odd primes of d for x^2 - d y^2 = +-2."""
    if case.pell_norm == 2:
        ok = (1, 7)
    elif case.pell_norm == -2:
        ok = (1, 3)
    else:
        raise ValueError("residue filter applies to the +-2 cases only")
    return all(p % 8 in ok for p in odd_prime_factors(d))


# --- the fundamental unit and Table 1 ----------------------------------------


@dataclass(frozen=True)
class UnitData:
    d: int
    reg: Regulator
    eta: CompactRep
    norm: int
    u16: int  # eta = (u + v sqrt d)/2 if d = 1 mod 4, else u + v sqrt d
    v16: int
    n: int  # eta^n is the fundamental solution of x^2 - d y^2 = 1

    @property
    def integral(self) -> bool:
        """True iff eta lies in Z[sqrt d]."""
        return self.d % 4 != 1 or self.v16 % 2 == 0


def unit_residues(rep: CompactRep) -> tuple[int, int]:
    """(u, v) mod 16 in the Table 1 convention."""
    x, y = cr.eval_basis_mod(rep, 32)
    if rep.sigma == 2:
        u, v = cr.from_basis(x, y, 2)
        return u % 16, v % 16
    return x % 16, y % 16


def unit_power_index(d: int, u: int, v: int) -> int:
    """Exponent n with eta^n the fundamental solution of x^2 - d y^2 = 1.

    ``u`` and ``v`` are residues modulo 16 (or exact values) of eta written as
    (u + v sqrt d)/2 for d = 1 mod 4 and as u + v sqrt d otherwise.
    """
    u, v = u % 16, v % 16
    r4 = d % 4
    if r4 == 3:
        return 1
    if r4 == 2:
        return 1 if v % 2 == 0 else 2
    if r4 != 1:
        raise ClassificationError(f"d={d} is not squarefree")
    if v % 2 == 0:
        return 1 if v % 4 == 0 else 2
    plus_minus_v = {v % 8, (-v) % 8}
    plus_minus_3v = {(3 * v) % 8, (-3 * v) % 8}
    r16 = d % 16
    if r16 == 5:
        if u % 8 in plus_minus_3v:
            return 3
        if u % 8 in plus_minus_v:
            return 6
    elif r16 == 13:
        if u % 8 in plus_minus_v:
            return 3
        if u % 8 in plus_minus_3v:
            return 6
    raise ClassificationError(f"no Table 1 row for d={d}, u={u}, v={v} (mod 16)")


def unit_data(d: int, ceiling: int = infra.DEFAULT_CEILING, precision_bits: int | None = None) -> UnitData:
    reg = regulator(d, precision_bits, ceiling)
    eta = cr.build_compact(d, reg)
    norm = int(eta.norm())
    u, v = unit_residues(eta)
    n = unit_power_index(d, u, v)
    expect_norm = -1 if n in (2, 6) else 1
    if norm != expect_norm:
        raise ClassificationError(f"Table 1 gives n={n} for d={d} but the unit has norm {norm}")
    return UnitData(d, reg, eta, norm, u, v, n)


# --- equation families -----------------------------------------------------------


@dataclass(frozen=True)
class EquationFamily:
    """All solutions ``coeff * nu * eta^e`` of x^2 - d y^2 = N.

    Exponents e run over ``e >= start`` with ``e % modulus in residues``; the
    reported power index of a member is ``e // power_divisor``.
    """

    d: int
    N: int
    eta: CompactRep
    descriptor: str
    unit_power_index: int
    modulus: int
    residues: frozenset[int]
    start: int
    power_divisor: int = 1
    coeff: int = 1
    nu: CompactRep | None = None
    kind: str = "lucas"
    first_divides: bool = True

    def exponents(self) -> Iterator[int]:
        e = self.start
        while True:
            if e % self.modulus in self.residues:
                yield e
            e += 1

    def indices(self, count: int) -> list[int]:
        out = []
        for e in self.exponents():
            if len(out) == count:
                break
            out.append(e // self.power_divisor)
        return out

    def exponent_of(self, k: int) -> int:
        e = k * self.power_divisor
        if e < self.start or e % self.modulus not in self.residues:
            raise ValueError(f"index {k} is not in the family's index set")
        return e

    def member_exact(self, k: int) -> tuple[int, int]:
        """Exact (X, Y) of the member with power index k (small cases only)."""
        e = self.exponent_of(k)
        val = cr.expand_exact(self.eta) ** e
        if self.nu is not None:
            val = cr.expand_exact(self.nu) * val
        u, v = val.halves()
        X2, Y2 = self.coeff * u, self.coeff * v
        if X2 % 2 or Y2 % 2:
            raise ConsistencyError("family member is not in Z[sqrt d]")
        return X2 // 2, Y2 // 2

    def member_log(self, k: int, prec: int = 128) -> mpmath.mpf:
        e = self.exponent_of(k)
        with mpmath.workprec(prec):
            total = e * self.eta.target_log + mpmath.log(self.coeff)
            if self.nu is not None:
                total += self.nu.target_log
            return total


def p2_ideal(d: int) -> tuple[int, int]:
    """The reduced representative of the prime ideal above 2 (d = 2, 3 mod 4)."""
    s = math.isqrt(d)
    return infra.normalize(s, d % 2, 2), 2


def half_period_test(d: int, step_cap: int = 10**6) -> int | None:
    """Norm (+2 or -2) solvable according to the mid-period Q of sqrt(d), else None."""
    cf = cf_expand(d, step_cap)
    q_mid = cf.half_period_q()
    if q_mid != 2:
        return None
    return 2 if (cf.l // 2) % 2 == 0 else -2


def nu_generator(d: int, ud: UnitData) -> CompactRep | None:
    """Compact representation of the smallest solution of x^2 - d y^2 = +-2, if any."""
    if d == 2:
        return CompactRep.from_quadint(QuadInt(2, 1, 1, 2))
    target = (float(ud.reg.value) + math.log(2)) / 2
    return cr.compact_generator(d, target, p2_ideal(d), ud.reg.precision_bits)


def yokoi_unit_criterion(case: PolynomialCase, d: int, rep: CompactRep) -> bool:
    """Solvability of x^2 - d y^2 = +-2 read off the rational part of eta mod d."""
    if d % 4 not in (2, 3):
        raise ValueError("criterion needs d = 2, 3 mod 4")
    t, _, _ = cr.eval_mod(rep, d)
    if case.pell_norm == 2:
        return t % d == 1 % d
    if case.pell_norm == -2:
        return t % d == (-1) % d
    raise ValueError("criterion applies to the +-2 cases only")


def _two_family(case: PolynomialCase, d: int, ud: UnitData) -> EquationFamily | None:
    N = case.pell_norm
    if d == 2:
        # eta = 1 + sqrt 2 has norm -1; both +2 and -2 are solvable
        if N == 2:
            nu = CompactRep.from_quadint(QuadInt(2, 1, 1, 2))
            return EquationFamily(d, N, ud.eta, "(2+sqrt2) eta^(2k)", ud.n, 2, frozenset({0}), 0, 2, 1, nu, "lehmer")
        nu = CompactRep.from_quadint(QuadInt(4, 3, 1, 2))
        return EquationFamily(
            d, N, ud.eta, "(4+3sqrt2) eta^(2k)", ud.n, 2, frozenset({0}), 0, 2, 1, nu, "lucas", first_divides=False
        )
    nu = nu_generator(d, ud)
    if nu is not None and ud.norm == -1:
        raise PerronViolation(f"d={d}: both x^2-dy^2=-1 and x^2-dy^2=+-2 are solvable")
    verdict = None if nu is None else int(nu.norm())
    if verdict is not None and abs(verdict) != 2:
        raise ConsistencyError(f"generator of the ideal above 2 has norm {verdict} for d={d}")
    cross = yokoi_unit_criterion(case, d, ud.eta)
    if cross != (verdict == N):
        raise ConsistencyError(f"Yokoi criterion disagrees with the half-period test for d={d}")
    if verdict != N:
        return None
    return EquationFamily(d, N, ud.eta, "nu^(2k+1)/2^k", ud.n, 1, frozenset({0}), 0, 1, 1, nu, "lehmer")


def solvable(case: PolynomialCase, d: int, ud: UnitData) -> EquationFamily | None:
    """The family of solutions of x^2 - d y^2 = N for this case, or None."""
    N = case.pell_norm
    if not prefilter(case, d):
        return None
    if N == 1:
        n = ud.n
        return EquationFamily(d, N, ud.eta, f"eta^({n}k)", n, n, frozenset({0}), n, n)
    if N == -1:
        if ud.norm != -1:
            return None
        n1 = 1 if ud.integral else 3
        return EquationFamily(d, N, ud.eta, f"eta^({n1}k), k odd", ud.n, 2 * n1, frozenset({n1}), n1, n1)
    if N in (4, -4):
        if ud.integral:
            return None
        if N == -4:
            if ud.norm != -1:
                return None
            return EquationFamily(d, N, ud.eta, "2 eta^k, k = +-1 mod 6", ud.n, 6, frozenset({1, 5}), 1, 1, 2)
        if ud.norm == 1:
            return EquationFamily(d, N, ud.eta, "2 eta^k, k != 0 mod 3", ud.n, 3, frozenset({1, 2}), 1, 1, 2)
        return EquationFamily(d, N, ud.eta, "2 eta^(2j), j != 0 mod 3", ud.n, 6, frozenset({2, 4}), 2, 2, 2)
    if N in (2, -2):
        return _two_family(case, d, ud)
    raise ValueError(f"unsupported norm {N}")
