"""Arithmetic in real quadratic fields: continued fractions, Pell solutions,
fundamental units and regulators."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Iterator, NamedTuple

import mpmath

from . import infrastructure as infra
from .errors import CorruptRegulator, InvalidRadicand, PeriodCapExceeded

DEFAULT_STEP_CAP = 10**6


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 1 if p == 2 else 2
    return True


def check_radicand(d: int, squarefree: bool = True) -> None:
    if d < 2 or isqrt(d) ** 2 == d:
        raise InvalidRadicand(f"invalid radicand {d}")
    if squarefree and d < 10**12 and not is_squarefree(d):
        raise InvalidRadicand(f"radicand {d} is not squarefree")


@dataclass(frozen=True)
class QuadInt:
    """The algebraic integer ``(a + b*sqrt(d))/s`` with ``s`` in {1, 2}."""

    a: int
    b: int
    s: int
    d: int

    def __post_init__(self):
        if self.s not in (1, 2):
            raise ValueError("denominator must be 1 or 2")
        if self.d < 2:
            raise InvalidRadicand(f"invalid radicand {self.d}")
        if self.s == 2:
            if self.a % 2 == 0 and self.b % 2 == 0:
                object.__setattr__(self, "a", self.a // 2)
                object.__setattr__(self, "b", self.b // 2)
                object.__setattr__(self, "s", 1)
            elif self.d % 4 != 1 or (self.a - self.b) % 2:
                raise ValueError(f"({self.a} + {self.b}*sqrt({self.d}))/2 is not integral")

    @classmethod
    def from_halves(cls, u: int, v: int, d: int) -> "QuadInt":
        """Build ``(u + v sqrt d)/2``."""
        return cls(u, v, 2, d)

    def halves(self) -> tuple[int, int]:
        """``(u, v)`` with value ``(u + v sqrt d)/2``."""
        return (self.a, self.b) if self.s == 2 else (2 * self.a, 2 * self.b)

    def norm(self) -> int:
        return (self.a * self.a - self.d * self.b * self.b) // (self.s * self.s)

    def conjugate(self) -> "QuadInt":
        return QuadInt(self.a, -self.b, self.s, self.d)

    def in_order_z_sqrt_d(self) -> bool:
        return self.s == 1

    def __mul__(self, other: "QuadInt") -> "QuadInt":
        if not isinstance(other, QuadInt):
            return NotImplemented
        if other.d != self.d:
            raise ValueError("mismatched radicands")
        u1, v1 = self.halves()
        u2, v2 = other.halves()
        # (u1 + v1 r)/2 * (u2 + v2 r)/2 = ((u1u2 + d v1v2)/2 + (u1v2 + u2v1)/2 r)/2
        return QuadInt((u1 * u2 + self.d * v1 * v2) // 2, (u1 * v2 + u2 * v1) // 2, 2, self.d)

    def __pow__(self, n: int) -> "QuadInt":
        if n < 0:
            raise ValueError("negative powers not supported")
        result = QuadInt(1, 0, 1, self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def log(self, prec: int = 53) -> mpmath.mpf:
        """Natural log of |value|, accurate even when the value is tiny."""
        with mpmath.workprec(prec + 20):
            a, b = mpmath.mpf(self.a), mpmath.mpf(self.b)
            r = mpmath.sqrt(self.d)
            if (self.a >= 0) == (self.b >= 0):
                return mpmath.log(abs(a + b * r) / self.s)
            n = abs(mpmath.mpf(self.a * self.a - self.d * self.b * self.b))
            return mpmath.log(n / abs(a - b * r) / self.s)

    def __float__(self) -> float:
        return float(self.a + self.b * mpmath.sqrt(self.d)) / self.s

    def __str__(self) -> str:
        core = f"{self.a} {'+' if self.b >= 0 else '-'} {abs(self.b)}*sqrt({self.d})"
        return f"({core})/2" if self.s == 2 else core


@dataclass(frozen=True)
class CFExpansion:
    d: int
    a0: int
    period: list[int]
    pq_seq: list[tuple[int, int]]
    p: int  # p_{l-1}
    q: int  # q_{l-1}

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.period)

    def half_period_q(self) -> int | None:
        """Q at the middle of an even period, else None."""
        if self.l % 2:
            return None
        return self.pq_seq[self.l // 2][1]


def cf_expand(d: int, step_cap: int = DEFAULT_STEP_CAP) -> CFExpansion:
    """Continued fraction expansion of sqrt(d) over one full period.

    Raises :class:`PeriodCapExceeded` (carrying the partial quotients) if the
    period is longer than ``step_cap``.
    """
    check_radicand(d, squarefree=False)
    a0 = isqrt(d)
    P, Q, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    period: list[int] = []
    pq = [(0, 1)]
    while True:
        P = a * Q - P
        Q = (d - P * P) // Q
        a = (a0 + P) // Q
        period.append(a)
        pq.append((P, Q))
        if Q == 1:
            return CFExpansion(d, a0, period, pq, p, q)
        if len(period) >= step_cap:
            raise PeriodCapExceeded(d, step_cap, partial=period)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev


def pell_fundamental(d: int, step_cap: int = DEFAULT_STEP_CAP) -> tuple[int, int, int]:
    """Minimal ``(x1, y1, N)`` with ``x1^2 - d*y1^2 = N`` and ``N = -1`` iff the period is odd."""
    cf = cf_expand(d, step_cap)
    return cf.p, cf.q, -1 if cf.l % 2 else 1


def fundamental_unit(d: int, step_cap: int = DEFAULT_STEP_CAP) -> QuadInt:
    """Fundamental unit of the maximal order, by walking the whole principal cycle."""
    check_radicand(d)
    s = isqrt(d)
    O, _ = infra.unit_ideal(d)
    cur, gen = O, infra.ONE
    for _ in range(step_cap):
        P1, Q1 = infra.rho(d, s, *cur)
        gen = infra.qmul(gen, (P1, 1, cur[1]), d)
        cur = (P1, Q1)
        if cur == O:
            A, B, C = gen
            if 2 % C:
                raise CorruptRegulator(f"non-integral unit for d={d}")
            return QuadInt(2 * A // C, 2 * B // C, 2, d)
    raise PeriodCapExceeded(d, step_cap)


def default_precision(d: int, doublings: int = 64) -> int:
    return 64 + d.bit_length() + 2 * max(1, doublings).bit_length()


def chain_log(terms, d: int, prec: int) -> mpmath.mpf:
    """ln of prod ((a_j + b_j sqrt d)/(2 d_j))^(2^(k-j)), computed term by term."""
    k = len(terms)
    with mpmath.workprec(prec + 2 * k + 64):
        r = mpmath.sqrt(d)
        total = mpmath.mpf(0)
        for j, (a, b, dj) in enumerate(terms, start=1):
            if (a >= 0) == (b >= 0):
                la = mpmath.log(abs(a + b * r) / 2)
            else:
                la = mpmath.log(abs(mpmath.mpf(a * a - d * b * b)) / abs(a - b * r) / 2)
            total += mpmath.ldexp(la - mpmath.log(dj), k - j)
        return +total


@dataclass(frozen=True)
class Regulator:
    d: int
    value: mpmath.mpf
    abs_error_bound: mpmath.mpf
    method: str = "cf"
    precision_bits: int = 0
    chain: tuple = field(default=(), compare=False, repr=False)

    def __float__(self) -> float:
        return float(self.value)


def regulator(d: int, precision_bits: int | None = None, ceiling: int = infra.DEFAULT_CEILING) -> Regulator:
    """Regulator of Q(sqrt d) to ``precision_bits`` bits.

    A float estimate (continued fraction walk or baby-step giant-step) steers a
    squaring chain to the fundamental unit; the high precision value is the
    exact log of that chain, so the error bound does not depend on the float
    estimate.  Raises :class:`RegulatorMethodExhausted` above ``ceiling``.
    """
    check_radicand(d)
    est, method = infra.regulator_estimate(d, ceiling)
    found = infra.power_product_chain(d, est)
    if found is None:
        raise CorruptRegulator(f"no unit found at distance {est} for d={d}")
    terms, _ = found
    if precision_bits is None:
        precision_bits = default_precision(d, len(terms))
    value = chain_log(terms, d, precision_bits)
    return Regulator(
        d=d,
        value=value,
        abs_error_bound=mpmath.ldexp(1, -precision_bits),
        method=method,
        precision_bits=precision_bits,
        chain=tuple(terms),
    )


def convergents_up_to(d: int, z: int) -> Iterator[tuple[int, int, int]]:
    """Convergents p/q of sqrt(d) with q < z, with their values p^2 - d q^2."""
    check_radicand(d, squarefree=False)
    a0 = isqrt(d)
    P, Q, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while q < z:
        yield p, q, p * p - d * q * q
        P = a * Q - P
        Q = (d - P * P) // Q
        a = (a0 + P) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev


class ModQuad(NamedTuple):
    """Residues of ``a + b sqrt(d)`` modulo some m."""

    a: int
    b: int
    d: int


def quad_mul_mod(x: ModQuad, y: ModQuad, m: int) -> ModQuad:
    if x.d != y.d:
        raise ValueError(f"mismatched radicands {x.d} and {y.d}")
    d = x.d
    return ModQuad((x.a * y.a + d * x.b * y.b) % m, (x.a * y.b + x.b * y.a) % m, d)

