"""Compact representations of large quadratic integers.

A compact representation stores ``beta = prod_j (alpha_j / d_j)^(2^(k-j))``
with ``alpha_j = (a_j + b_j sqrt d)/2``.  Every prefix product
``beta_j = beta_{j-1}^2 * alpha_j / d_j`` produced by :func:`build_compact` is
an algebraic integer, which is what makes evaluation modulo an arbitrary m
possible: each division by ``d_j`` is an exact division carried out with one
extra factor ``d_j`` of modulus headroom.

Size bound: every stored ``|a_j|``, ``|b_j|`` and ``d_j`` is at most
``SIZE_BOUND_FACTOR * d**SIZE_BOUND_EXPONENT``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import IO

import mpmath

from . import infrastructure as infra
from .errors import ConsistencyError, CorruptRegulator, DigitCapExceeded, PrecisionError
from .quadfield import QuadInt, Regulator, chain_log

SIZE_BOUND_EXPONENT = 2
SIZE_BOUND_FACTOR = 64
DEFAULT_DIGIT_CAP = 10**6


@dataclass(frozen=True)
class CompactRep:
    d: int
    terms: tuple[tuple[int, int, int], ...]
    target_log: mpmath.mpf | None = None

    @property
    def k(self) -> int:
        return len(self.terms)

    @property
    def sigma(self) -> int:
        return infra.sigma_of(self.d)

    def size_ok(self) -> bool:
        bound = SIZE_BOUND_FACTOR * self.d**SIZE_BOUND_EXPONENT
        return all(abs(a) <= bound and abs(b) <= bound and 0 < dj <= bound for a, b, dj in self.terms)

    def norm(self) -> Fraction:
        """Norm of the represented number, folded prefix by prefix."""
        n = Fraction(1)
        for a, b, dj in self.terms:
            n = n * n * Fraction(a * a - self.d * b * b, 4 * dj * dj)
        return n

    @classmethod
    def from_quadint(cls, q: QuadInt) -> "CompactRep":
        u, v = q.halves()
        return cls(q.d, ((u, v, 1),), q.log(64) if (u or v) else None)


def build_compact(d: int, reg: Regulator) -> CompactRep:
    """Compact representation of the fundamental unit of Q(sqrt d)."""
    if reg.d != d:
        raise ValueError("regulator belongs to another radicand")
    if reg.precision_bits < 32:
        raise PrecisionError(f"regulator precision {reg.precision_bits} bits is too low")
    terms = reg.chain
    if not terms:
        found = infra.power_product_chain(d, float(reg.value))
        if found is None:
            raise CorruptRegulator(f"regulator {reg.value} does not lead to a unit for d={d}")
        terms = tuple(found[0])
    rep = CompactRep(d, tuple(terms), reg.value)
    if not rep.size_ok():
        raise ConsistencyError(f"compact representation for d={d} violates the size bound")
    n = rep.norm()
    if abs(n) != 1:
        raise CorruptRegulator(f"chain for d={d} has norm {n}, not a unit")
    return rep


def compact_generator(d: int, target: float, goal, precision_bits: int = 128) -> CompactRep | None:
    """Compact representation of the generator of the reduced ideal ``goal``
    lying near ``target`` on the principal cycle, or None if it is not there."""
    found = infra.power_product_chain(d, target, goal)
    if found is None:
        return None
    terms = tuple(found[0])
    rep = CompactRep(d, terms, chain_log(terms, d, precision_bits))
    if not rep.size_ok():
        raise ConsistencyError(f"compact representation for d={d} violates the size bound")
    return rep


# --- arithmetic in the maximal order, basis {1, omega} --------------------------


def to_basis(u: int, v: int, sigma: int) -> tuple[int, int]:
    """(u + v sqrt d)/2 -> (x, y) with value x + y*omega."""
    if sigma == 2:
        return (u - v) // 2, v
    return u // 2, v // 2


def from_basis(x: int, y: int, sigma: int) -> tuple[int, int]:
    """(x, y) -> (u, v) with x + y*omega = (u + v sqrt d)/2."""
    if sigma == 2:
        return 2 * x + y, y
    return 2 * x, 2 * y


def basis_mul(p, q, d: int, sigma: int, m: int | None = None):
    x1, y1 = p
    x2, y2 = q
    if sigma == 2:
        c = (d - 1) // 4
        x, y = x1 * x2 + c * y1 * y2, x1 * y2 + x2 * y1 + y1 * y2
    else:
        x, y = x1 * x2 + d * y1 * y2, x1 * y2 + x2 * y1
    if m is not None:
        return x % m, y % m
    return x, y


def basis_pow(p, e: int, d: int, sigma: int, m: int | None = None):
    result = (1 % m, 0) if m else (1, 0)
    base = p
    while e:
        if e & 1:
            result = basis_mul(result, base, d, sigma, m)
        e >>= 1
        if e:
            base = basis_mul(base, base, d, sigma, m)
    return result


def _fold(rep: CompactRep, m: int | None):
    """Evaluate the prefix products; returns basis coordinates mod m (exact if m is None)."""
    d, sigma = rep.d, rep.sigma
    mods = [m] * rep.k
    if m is not None:
        for j in range(rep.k - 2, -1, -1):
            mods[j] = mods[j + 1] * rep.terms[j + 1][2]
    beta = None
    for j, (a, b, dj) in enumerate(rep.terms):
        if (a - b) % 2 or (sigma == 1 and a % 2):
            raise ValueError(f"term {j + 1} is not an algebraic integer")
        alpha = to_basis(a, b, sigma)
        work = mods[j] * dj if m is not None else None
        x = alpha if beta is None else basis_mul(basis_mul(beta, beta, d, sigma, work), alpha, d, sigma, work)
        if x[0] % dj or x[1] % dj:
            raise ConsistencyError(f"prefix {j + 1} of the compact representation is not integral")
        beta = (x[0] // dj, x[1] // dj)
        if m is not None:
            beta = (beta[0] % mods[j], beta[1] % mods[j])
    return beta


def eval_basis_mod(rep: CompactRep, m: int) -> tuple[int, int]:
    """Coordinates (x, y) of the represented value x + y*omega, reduced mod m."""
    if m < 1:
        raise ValueError("modulus must be positive")
    return _fold(rep, m)


def eval_mod(rep: CompactRep, m: int) -> tuple[int, int, dict[int, int]]:
    """Residues ``(A, B, vals)`` with value ``(A + B sqrt d) / prod p^vals[p]``.

    Denominators coprime to m are inverted; a remaining factor 2 (value not in
    Z[sqrt d] and m even) is reported in ``vals`` instead.
    """
    if m < 2:
        raise ValueError("modulus must be at least 2")
    x, y = eval_basis_mod(rep, 2 * m)
    u, v = from_basis(x, y, rep.sigma)
    u, v = u % (2 * m), v % (2 * m)
    if u % 2 == 0 and v % 2 == 0:
        return (u // 2) % m, (v // 2) % m, {}
    if m % 2:
        inv2 = pow(2, -1, m)
        return u * inv2 % m, v * inv2 % m, {}
    return u % m, v % m, {2: 1}


def expand_exact(rep: CompactRep, digit_cap: int = DEFAULT_DIGIT_CAP) -> QuadInt:
    if rep.terms:
        est = float(log_value(rep, 64)) / math.log(10) + math.log10(4 * rep.d)
        if est > digit_cap:
            raise DigitCapExceeded(f"expansion would need about {est:.0f} digits (cap {digit_cap})")
    x, y = _fold(rep, None)
    u, v = from_basis(x, y, rep.sigma)
    return QuadInt.from_halves(u, v, rep.d)


def log_value(rep: CompactRep, precision_bits: int = 128) -> mpmath.mpf:
    return chain_log(rep.terms, rep.d, precision_bits)


def dumps(rep: CompactRep) -> str:
    lines = [f"{rep.d} {rep.k}"]
    lines += [f"{a} {b} {dj}" for a, b, dj in rep.terms]
    return "\n".join(lines) + "\n"


def loads(text: str) -> CompactRep:
    rows = [ln.split() for ln in text.strip().splitlines()]
    if not rows or len(rows[0]) != 2:
        raise ValueError("missing 'd k' header")
    d, k = int(rows[0][0]), int(rows[0][1])
    if len(rows) != k + 1 or any(len(r) != 3 for r in rows[1:]):
        raise ValueError(f"expected {k} term lines of three integers")
    terms = tuple((int(a), int(b), int(dj)) for a, b, dj in rows[1:])
    return CompactRep(d, terms)


def dump(rep: CompactRep, fp: IO[str]) -> None:
    fp.write(dumps(rep))


def load(fp: IO[str]) -> CompactRep:
    return loads(fp.read())
