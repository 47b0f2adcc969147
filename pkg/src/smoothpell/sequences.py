"""Members of an equation family as terms of Lucas or Lehmer sequences.

Only residues are ever computed: a member ``coeff * nu * eta^e`` is evaluated
in the maximal order modulo ``2m`` and then halved, so no huge integer is
formed.
"""

from __future__ import annotations

import math
from typing import Iterator

from . import compactrep as cr
from .pellsolve import EquationFamily


def index_bound(kind: str, bound: int) -> int:
    """Number of members whose Y must be checked for B-smoothness."""
    if kind == "lucas":
        return bound
    if kind == "lehmer":
        return math.ceil(bound / 2)
    raise ValueError(f"unknown sequence kind {kind!r}")


def family_bound(family: EquationFamily, bound: int) -> int:
    return index_bound(family.kind, bound)


def _base_mod(family: EquationFamily, M: int):
    d, sigma = family.d, family.eta.sigma
    eta = cr.eval_basis_mod(family.eta, M)
    base = (family.coeff % M, 0)
    if family.nu is not None:
        base = cr.basis_mul(base, cr.eval_basis_mod(family.nu, M), d, sigma, M)
    return eta, base


def _halve(pt, family: EquationFamily, m: int) -> tuple[int, int]:
    M = 2 * m
    u, v = cr.from_basis(pt[0], pt[1], family.eta.sigma)
    u, v = u % M, v % M
    if u % 2 or v % 2:
        raise ValueError("member is not in Z[sqrt d]")
    return u // 2, v // 2


def term_mod(family: EquationFamily, k: int, m: int) -> tuple[int, int]:
    """(X mod m, Y mod m) of the member with power index k."""
    if m < 1:
        raise ValueError("modulus must be positive")
    e = family.exponent_of(k)
    M = 2 * m
    eta, base = _base_mod(family, M)
    pt = cr.basis_mul(base, cr.basis_pow(eta, e, family.d, family.eta.sigma, M), family.d, family.eta.sigma, M)
    return _halve(pt, family, m)


class FamilyTermCursor:
    """Walk the members of a family in order, one multiplication per step."""

    def __init__(self, family: EquationFamily, m: int):
        self.family = family
        self.m = m
        M = self.M = 2 * m
        d, sigma = family.d, family.eta.sigma
        self._eta, base = _base_mod(family, M)
        self._exps = family.exponents()
        self._e = next(self._exps)
        self._pt = cr.basis_mul(base, cr.basis_pow(self._eta, self._e, d, sigma, M), d, sigma, M)
        self._steps: dict[int, tuple[int, int]] = {}

    @property
    def k(self) -> int:
        return self._e // self.family.power_divisor

    def current(self) -> tuple[int, int]:
        return _halve(self._pt, self.family, self.m)

    def advance(self) -> None:
        e = next(self._exps)
        gap = e - self._e
        step = self._steps.get(gap)
        fam = self.family
        if step is None:
            step = self._steps[gap] = cr.basis_pow(self._eta, gap, fam.d, fam.eta.sigma, self.M)
        self._pt = cr.basis_mul(self._pt, step, fam.d, fam.eta.sigma, self.M)
        self._e = e


def y_scan_mod(family: EquationFamily, m: int, k_max: int) -> Iterator[tuple[int, int]]:
    """Yield (k, Y_k mod m) for every member with power index k <= k_max."""
    cur = FamilyTermCursor(family, m)
    while cur.k <= k_max:
        yield cur.k, cur.current()[1]
        cur.advance()
