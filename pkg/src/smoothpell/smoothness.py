"""Deciding B-smoothness of Y without ever writing Y down.

The valuation of each allowed prime p in Y is read off ``Y mod p^e``; the
product of those prime powers is compared with ``ln Y`` (known to high
precision from the regulator).  Any leftover cofactor is at least 2, so a gap
below ``ln 2 / 2`` means Y is exactly the smooth part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Protocol

import mpmath

from . import compactrep as cr
from .compactrep import CompactRep
from .errors import ReconstructionError, SmoothConfirmationError, ValuationOverflow
from .pellsolve import EquationFamily
from .sequences import FamilyTermCursor, term_mod

TOLERANCE = math.log(2) / 2
FIRST_ROUND_LOG = 44.0  # p^e just below 2^64 in the first round
DEFAULT_BATCH_BITS = 4096
CONFIRM_PRIME = (1 << 64) - 59  # a fresh 64-bit prime


class TermSource(Protocol):
    def residue(self, m: int) -> int: ...

    def size_log(self) -> mpmath.mpf: ...


@dataclass
class SmoothVerdict:
    smooth: bool
    factorization: dict[int, int]
    smooth_part_log: float
    size_log: float

    @property
    def gap(self) -> float:
        return self.size_log - self.smooth_part_log

    def value(self) -> int:
        out = 1
        for p, e in self.factorization.items():
            out *= p**e
        return out


def member_size_log(family: EquationFamily, k: int, prec: int = 160) -> mpmath.mpf:
    """ln Y for the member with power index k."""
    with mpmath.workprec(prec):
        L = family.member_log(k, prec)
        y = (mpmath.exp(L) - family.N * mpmath.exp(-L)) / (2 * mpmath.sqrt(family.d))
        return mpmath.log(y)


def rough_size_log(family: EquationFamily, k: int, base_logs) -> float | None:
    """Float estimate of ln Y, or None when the conjugate term is not negligible."""
    eta_log, offset, half_disc = base_logs
    L = family.exponent_of(k) * eta_log + offset
    if L < 20:
        return None
    return L - half_disc


@dataclass
class MemberSource:
    family: EquationFamily
    k: int

    def residue(self, m: int) -> int:
        return term_mod(self.family, self.k, m)[1]

    def size_log(self) -> mpmath.mpf:
        return member_size_log(self.family, self.k)


@dataclass
class CompactYSource:
    """Y where the compact representation has value X + Y sqrt d."""

    rep: CompactRep
    _log: mpmath.mpf | None = field(default=None, repr=False)

    def residue(self, m: int) -> int:
        A, B, den = cr.eval_mod(self.rep, m)
        if den:
            raise ValueError("value is not in Z[sqrt d]")
        return B

    def size_log(self) -> mpmath.mpf:
        with mpmath.workprec(160):
            L = cr.log_value(self.rep, 160)
            N = self.rep.norm()
            y = (mpmath.exp(L) - mpmath.mpf(N.numerator) / N.denominator * mpmath.exp(-L)) / (
                2 * mpmath.sqrt(self.rep.d)
            )
            return mpmath.log(abs(y))


def _vp(r: int, p: int) -> int:
    v = 0
    while r % p == 0:
        r //= p
        v += 1
    return v


def first_round_exponents(primes: Iterable[int]) -> dict[int, int]:
    return {p: max(1, int(FIRST_ROUND_LOG / math.log(p))) for p in primes}


def batch_primes(primes: list[int], exps: dict[int, int], limit_bits: int = DEFAULT_BATCH_BITS) -> list[list[int]]:
    batches: list[list[int]] = [[]]
    bits = 0.0
    for p in primes:
        b = exps[p] * math.log2(p)
        if batches[-1] and bits + b > limit_bits:
            batches.append([])
            bits = 0.0
        batches[-1].append(p)
        bits += b
    return batches


def _valuations(r: int, primes: list[int], exps: dict[int, int]) -> tuple[dict[int, int], list[int]]:
    """Valuations below the cap, and primes whose cap was reached."""
    vals, pending = {}, []
    for p in primes:
        if r % p:
            continue
        pe = p ** exps[p]
        rp = r % pe
        if rp == 0:
            pending.append(p)
        else:
            vals[p] = _vp(rp, p)
    return vals, pending


def valuation_probe(source: TermSource, q: int, e_cap: int) -> int:
    """Exact valuation of q in the source's Y, provided it is below ``e_cap``."""
    qe = q**e_cap
    r = source.residue(qe)
    if r == 0:
        raise ValuationOverflow(q, e_cap)
    return _vp(r, q)


def _finish(vals: dict[int, int], pending: list[int], source: TermSource, size_log) -> SmoothVerdict:
    slog = float(size_log)
    for p in pending:
        cap = int(slog / math.log(p)) + 2
        vals[p] = valuation_probe(source, p, cap)
    fac = {p: v for p, v in sorted(vals.items()) if v}
    part = sum(v * math.log(p) for p, v in fac.items())
    # fsum-free comparison is fine: the gap is either < 1e-9 or >= ln 2
    verdict = SmoothVerdict(abs(slog - part) < TOLERANCE, fac, part, slog)
    if verdict.smooth:
        y = verdict.value()
        if source.residue(CONFIRM_PRIME) != y % CONFIRM_PRIME:
            raise SmoothConfirmationError(f"smooth part {y} disagrees with Y modulo a fresh prime")
    return verdict


def smooth_test(
    source: TermSource, primes: list[int], size_log=None, batch_bits: int = DEFAULT_BATCH_BITS
) -> SmoothVerdict:
    """Decide whether Y is composed only of ``primes``."""
    if size_log is None:
        size_log = source.size_log()
    exps = first_round_exponents(primes)
    vals: dict[int, int] = {}
    pending: list[int] = []
    for batch in batch_primes(primes, exps, batch_bits):
        M = math.prod(p ** exps[p] for p in batch)
        v, pe = _valuations(source.residue(M), batch, exps)
        vals.update(v)
        pending += pe
    return _finish(vals, pending, source, size_log)


def scan_family(
    family: EquationFamily, primes: list[int], count: int, batch_bits: int = DEFAULT_BATCH_BITS
) -> list[tuple[int, SmoothVerdict]]:
    """Smooth members among the first ``count`` members of a family.

    With ``family.first_divides`` set, Y of the first member divides every
    later Y, so a non-smooth first member ends the scan at once.
    """
    exps = first_round_exponents(primes)
    batches = batch_primes(primes, exps, batch_bits)
    base_logs = (
        float(family.eta.target_log),
        math.log(family.coeff) + (float(family.nu.target_log) if family.nu is not None else 0.0),
        math.log(2 * math.sqrt(family.d)),
    )
    cursors = [FamilyTermCursor(family, math.prod(p ** exps[p] for p in b)) for b in batches]
    found = []
    for i in range(count):
        if i:
            for c in cursors:
                c.advance()
        k = cursors[0].k
        vals: dict[int, int] = {}
        pending: list[int] = []
        for c, b in zip(cursors, batches):
            v, pe = _valuations(c.current()[1], b, exps)
            vals.update(v)
            pending += pe
        part = sum(v * math.log(p) for p, v in vals.items())
        rough = rough_size_log(family, k, base_logs)
        if not pending and rough is not None and part < rough - 1.0:
            if i == 0 and family.first_divides:
                break
            continue
        size_log = member_size_log(family, k)
        if not pending and part < float(size_log) - TOLERANCE:
            if i == 0 and family.first_divides:
                break
            continue
        verdict = _finish(vals, pending, MemberSource(family, k), size_log)
        if verdict.smooth:
            found.append((k, verdict))
        elif i == 0 and family.first_divides:
            break
    return found


def trial_factor_smooth(n: int, bound: int) -> dict[int, int] | None:
    """Factorization of n by trial division over primes below ``bound``, or None."""
    if n < 1:
        raise ValueError("n must be positive")
    fac: dict[int, int] = {}
    p = 2
    while p < bound and n > 1:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            fac[p] = e
        p += 1 if p == 2 else 2
    return fac if n == 1 else None


def reconstruct_x(d: int, y: int | dict[int, int], N: int) -> int:
    """The x >= 0 with x^2 - d y^2 = N; y may be given by its factorization."""
    if isinstance(y, dict):
        y = math.prod(p**e for p, e in y.items())
    t = d * y * y + N
    if t < 0:
        raise ReconstructionError(f"d*y^2 + N is negative for d={d}, y={y}")
    x = math.isqrt(t)
    if x * x != t:
        raise ReconstructionError(f"d*y^2 + N is not a square for d={d}, y={y}, N={N}")
    return x
