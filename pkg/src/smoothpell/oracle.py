"""Independent checks that share no arithmetic with the Pell pipeline.

* :func:`brute_force` sieves x^2 + c over a range of x with numpy and confirms
  every survivor by plain trial division.
* :func:`convergent_solutions` lists the solutions of x^2 - d y^2 = N with small y
  by walking the convergents of sqrt(d) directly.
* :func:`cross_validate` compares a pipeline result set against the sieve.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

# name -> (c, odd x only); deliberately not imported from the pipeline
POLYNOMIALS = {
    "x2-1": (-1, False),
    "x2+1": (1, False),
    "x2+2": (2, False),
    "x2-2": (-2, False),
    "x2+4odd": (4, True),
    "x2-4odd": (-4, True),
    "x2+4": (4, False),
    "x2-4": (-4, False),
}

MAX_SIEVE_X = 3 * 10**9  # keeps x^2 + c inside int64


def _primes_below(n: int) -> list[int]:
    if n < 3:
        return []
    sieve = np.ones(n, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n - 1) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


def _trial_smooth(n: int, primes: list[int]) -> bool:
    for p in primes:
        while n % p == 0:
            n //= p
        if n == 1:
            return True
    return n == 1


def _roots_mod_prime_power(c: int, p: int, pe: int, prev: list[int], prev_mod: int) -> list[int]:
    """Roots of r^2 + c = 0 mod pe, lifted from the roots mod prev_mod."""
    return [
        r + t * prev_mod
        for r in prev
        for t in range(pe // prev_mod)
        if ((r + t * prev_mod) ** 2 + c) % pe == 0
    ]


def brute_force(case: str, bound: int, x_limit: int) -> list[int]:
    """All 1 <= x <= x_limit with x^2 + c >= 2 and every prime factor below ``bound``."""
    c, odd_only = POLYNOMIALS[case]
    if x_limit > MAX_SIEVE_X:
        raise ValueError(f"x_limit above {MAX_SIEVE_X} overflows the int64 sieve")
    if x_limit < 1:
        return []
    primes = _primes_below(bound)
    x = np.arange(1, x_limit + 1, dtype=np.int64)
    rem = np.abs(x * x + c)
    fmax = int(rem.max())
    for p in primes:
        roots, mod = [0], 1
        pe = p
        while pe <= fmax:
            roots = _roots_mod_prime_power(c, p, pe, roots, mod)
            if not roots:
                break
            for r in roots:
                start = (r - 1) % pe
                rem[start::pe] //= p
            mod, pe = pe, pe * p
    f = x * x + c
    keep = (rem == 1) & (f >= 2)
    if odd_only:
        keep &= (x % 2) == 1
    out = []
    for xv in x[keep].tolist():
        if _trial_smooth(xv * xv + c, primes):
            out.append(xv)
    return out


def convergent_solutions(d: int, N: int, z: int) -> list[tuple[int, int]] | None:
    """Solutions (p, q) of p^2 - d q^2 = N among the convergents with q < z.

    Returns None when |N| >= sqrt(d), where convergents need not catch every
    primitive solution and the check does not apply.
    """
    if N * N >= d:
        return None
    a0 = math.isqrt(d)
    P, Q, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    found = []
    while q < z:
        if p * p - d * q * q == N:
            found.append((p, q))
        P = a * Q - P
        Q = (d - P * P) // Q
        a = (a0 + P) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return found


def grh_free_check(d: int, z: int, N: int, y1: int | None = None) -> bool:
    """True iff no convergent with q < z solves p^2 - d q^2 = N with q smaller
    than the claimed first solution ``y1`` (default: z itself)."""
    sols = convergent_solutions(d, N, z)
    if sols is None:
        return True
    limit = z if y1 is None else y1
    return all(q >= limit for _, q in sols)


@dataclass
class OracleReport:
    case: str
    bound: int
    x_limit: int
    oracle_count: int
    pipeline_count: int
    missing: list[int] = field(default_factory=list)  # found by the sieve only
    extra: list[int] = field(default_factory=list)  # found by the pipeline only

    @property
    def mismatches(self) -> int:
        return len(self.missing) + len(self.extra)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def to_json(self) -> str:
        data = asdict(self)
        data["mismatches"] = self.mismatches
        return json.dumps(data, indent=2)

    def to_text(self) -> str:
        lines = [
            f"case {self.case}, B={self.bound}, x <= {self.x_limit}",
            f"  sieve: {self.oracle_count}  pipeline: {self.pipeline_count}  mismatches: {self.mismatches}",
        ]
        if self.missing:
            lines.append(f"  missed by pipeline: {self.missing[:20]}")
        if self.extra:
            lines.append(f"  not confirmed by sieve: {self.extra[:20]}")
        return "\n".join(lines)


def cross_validate(results, case: str, bound: int, x_limit: int) -> OracleReport:
    """Compare pipeline solutions (restricted to x <= x_limit) with the sieve.

    ``results`` is anything with an ``xs()`` method or an iterable of x.
    """
    pipeline_xs = results.xs() if hasattr(results, "xs") else results
    mine = sorted({int(x) for x in pipeline_xs if int(x) <= x_limit})
    truth = brute_force(case, bound, x_limit)
    ts, ms = set(truth), set(mine)
    return OracleReport(
        case, bound, x_limit, len(truth), len(mine), sorted(ts - ms), sorted(ms - ts)
    )
