"""Infrastructure of the maximal order of Q(sqrt d).

A primitive ideal is stored as a pair ``(P, Q)`` meaning the Z-module
``[Q/sigma, (P + sqrt d)/sigma]`` where ``sigma = 2`` if ``d = 1 (mod 4)`` and
``1`` otherwise.  Reduced ideals are kept in the canonical window
``sqrt(d) - Q < P < sqrt(d)`` so that ``(P, Q)`` is a dictionary key.

Relative generators are exact elements of Q(sqrt d) stored as triples
``(A, B, C)`` with value ``(A + B sqrt d)/C``, ``C > 0``.  Distances are
floats; every decision taken on a float distance is re-checked on exact
ideals (the final ideal of a chain must equal the goal ideal exactly).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from math import gcd, isqrt

import numpy as np
from numba import njit

from .errors import CorruptRegulator, InvalidRadicand, RegulatorMethodExhausted

INT64_WALK_LIMIT = 1 << 62
DEFAULT_CEILING = 10**21


def sigma_of(d: int) -> int:
    return 2 if d % 4 == 1 else 1


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


# --- exact elements (A + B sqrt d)/C -------------------------------------------

ONE = (1, 0, 1)


def qnormalize(A: int, B: int, C: int) -> tuple[int, int, int]:
    if C < 0:
        A, B, C = -A, -B, -C
    g = gcd(gcd(A, B), C)
    if g > 1:
        A, B, C = A // g, B // g, C // g
    return A, B, C


def qmul(x, y, d: int):
    A1, B1, C1 = x
    A2, B2, C2 = y
    return qnormalize(A1 * A2 + d * B1 * B2, A1 * B2 + A2 * B1, C1 * C2)


def qinv(x, d: int):
    A, B, C = x
    n = A * A - d * B * B
    return qnormalize(C * A, -C * B, n)


def qsign(x, d: int) -> int:
    """Sign of the real number (A + B sqrt d)/C."""
    A, B, _ = x
    if A >= 0 and B >= 0:
        return 1 if (A or B) else 0
    if A <= 0 and B <= 0:
        return -1
    # opposite signs: compare A^2 with d B^2
    if A * A > d * B * B:
        return 1 if A > 0 else -1
    return 1 if B > 0 else -1


# --- the cycle of reduced principal ideals ----------------------------------------


def unit_ideal(d: int) -> tuple[int, int]:
    s = isqrt(d)
    sigma = sigma_of(d)
    return (normalize(s, sigma - 1, sigma), sigma), sigma


def normalize(s: int, P: int, Q: int) -> int:
    """Representative of P modulo Q in the window (sqrt d - Q, sqrt d)."""
    return s - ((s - P) % Q)


def is_reduced(s: int, P: int, Q: int) -> bool:
    P = normalize(s, P, Q)
    return P > 0 and P + s >= Q


def rho(d: int, s: int, P: int, Q: int) -> tuple[int, int]:
    """One continued fraction step on a reduced ideal."""
    P1 = ((P + s) // Q) * Q - P
    return P1, (d - P1 * P1) // Q


def rho_inverse(d: int, s: int, P: int, Q: int) -> tuple[int, int]:
    Qp = (d - P * P) // Q
    return s - ((s + P) % Qp), Qp


def step_log(sqrt_d: float, P1: int, Q: int) -> float:
    """ln of (P1 + sqrt d)/Q for a forward step landing on numerator P1."""
    return math.log((P1 + sqrt_d) / Q)


def reduce_ideal(d: int, s: int, sqrt_d: float, P: int, Q: int, want_gen: bool = True):
    """Reduce the ideal ``(P, Q)``.

    Returns ``(P', Q', gen, log_gen)`` with ``(P', Q') = gen * (P, Q)`` as
    ideals (``gen`` is ``None`` when not requested).
    """
    gen = ONE
    lg = 0.0
    while True:
        P = normalize(s, P, Q)
        if P > 0 and P + s >= Q:
            return P, Q, (gen if want_gen else None), lg
        P1 = (-P) % Q
        if 2 * P1 > Q:
            P1 -= Q
        Q1 = (d - P1 * P1) // Q
        if P1 >= 0:
            lg += math.log((P1 + sqrt_d) / Q)
        else:
            lg += math.log(abs(Q1) / (sqrt_d - P1))
        if want_gen:
            gen = qmul(gen, (P1, 1, Q), d)
        P, Q = P1, abs(Q1)


def compose(d: int, sigma: int, I1, I2):
    """Multiply primitive ideals: returns ``(e, P3, Q3)`` with I1*I2 = e*(P3, Q3)."""
    P1, Q1 = I1
    P2, Q2 = I2
    disc = 4 * d // (sigma * sigma)
    a1, b1 = Q1 // sigma, 2 * P1 // sigma
    a2, b2 = Q2 // sigma, 2 * P2 // sigma
    beta = (b1 + b2) // 2
    g1, u1, v1 = xgcd(a1, a2)
    e, x, w = xgcd(g1, beta)
    u, v = x * u1, x * v1
    a3 = a1 * a2 // (e * e)
    B = (u * a1 * b2 + v * a2 * b1 + w * ((b1 * b2 + disc) // 2)) // e
    b3 = B % (2 * a3)
    return e, sigma * b3 // 2, sigma * a3


def ideal_norm(sigma: int, I) -> int:
    return I[1] // sigma


# --- baby steps ---------------------------------------------------------------


@njit(cache=True)
def _walk_int64(d, s, sqrt_d, P, Q, dist0, n, P_stop, Q_stop):
    Ps = np.empty(n + 1, np.int64)
    Qs = np.empty(n + 1, np.int64)
    ds = np.empty(n + 1, np.float64)
    Ps[0] = P
    Qs[0] = Q
    ds[0] = dist0
    total = dist0
    comp = 0.0
    for i in range(1, n + 1):
        P1 = ((P + s) // Q) * Q - P
        Q1 = (d - P1 * P1) // Q
        y = math.log((P1 + sqrt_d) / Q) - comp
        t = total + y
        comp = (t - total) - y
        total = t
        P = P1
        Q = Q1
        Ps[i] = P
        Qs[i] = Q
        ds[i] = total
        if P == P_stop and Q == Q_stop:
            return Ps[: i + 1], Qs[: i + 1], ds[: i + 1], True
    return Ps, Qs, ds, False


def _walk_py(d, s, sqrt_d, P, Q, dist0, n, P_stop, Q_stop):
    Ps, Qs, ds = [P], [Q], [dist0]
    total, comp = dist0, 0.0
    log = math.log
    for _ in range(n):
        P1 = ((P + s) // Q) * Q - P
        Q1 = (d - P1 * P1) // Q
        y = log((P1 + sqrt_d) / Q) - comp
        t = total + y
        comp = (t - total) - y
        total = t
        P, Q = P1, Q1
        Ps.append(P)
        Qs.append(Q)
        ds.append(total)
        if P == P_stop and Q == Q_stop:
            return Ps, Qs, ds, True
    return Ps, Qs, ds, False


def walk(d: int, n: int, start=None, dist0: float = 0.0, stop=None):
    """Walk ``n`` forward steps from ``start`` (default: the unit ideal).

    Returns lists ``(Ps, Qs, dists, closed)``; the walk stops early when it
    reaches ``stop`` (default: the unit ideal).
    """
    s = isqrt(d)
    sqrt_d = math.sqrt(d)
    O, _ = unit_ideal(d)
    P, Q = start if start is not None else O
    Ps_, Qs_ = stop if stop is not None else O
    if d < INT64_WALK_LIMIT:
        Ps, Qs, ds, closed = _walk_int64(d, s, sqrt_d, P, Q, dist0, n, Ps_, Qs_)
        return Ps.tolist(), Qs.tolist(), ds.tolist(), bool(closed)
    return _walk_py(d, s, sqrt_d, P, Q, dist0, n, Ps_, Qs_)


def regulator_estimate(
    d: int, ceiling: int = DEFAULT_CEILING, baby_start: int = 2048
) -> tuple[float, str]:
    """Float approximation of the regulator and the method that produced it.

    Baby steps walk the principal cycle from the unit ideal; if the cycle
    closes the regulator is the plain continued fraction sum.  Otherwise giant
    steps compose a fixed baby ideal with itself until a giant ideal lands in
    the baby table; the first non-trivial hit differs from it by exactly one
    regulator because giant increments never exceed the table's reach.  The
    table grows fourfold per phase.
    """
    if d < 2 or isqrt(d) ** 2 == d:
        raise InvalidRadicand(f"invalid radicand {d}")
    if d > ceiling:
        raise RegulatorMethodExhausted(d, ceiling)
    s = isqrt(d)
    sqrt_d = math.sqrt(d)
    O, sigma = unit_ideal(d)
    fast = d < INT64_WALK_LIMIT
    giant_ratio = 512 if fast else 64
    Ps, Qs, ds = [O[0]], [O[1]], [0.0]
    table = {O: 0}
    target = baby_start
    margin = math.log(4 * sqrt_d) + 3.0
    while True:
        need = target - (len(Ps) - 1)
        if need > 0:
            nP, nQ, nd, closed = walk(d, need, (Ps[-1], Qs[-1]), ds[-1])
            base = len(Ps) - 1
            for i in range(1, len(nP)):
                key = (nP[i], nQ[i])
                if key not in table:
                    table[key] = base + i
            Ps.extend(nP[1:])
            Qs.extend(nQ[1:])
            ds.extend(nd[1:])
            if closed:
                return ds[-1], "cf"
        reach = ds[-1]
        if reach < 2 * margin + 4:
            target *= 4
            continue
        gi = bisect_right(ds, reach - margin) - 1
        g = (Ps[gi], Qs[gi])
        dg = ds[gi]
        G, dG = g, dg
        for _ in range(max(16, target // giant_ratio)):
            e, P3, Q3 = compose(d, sigma, G, g)
            P3, Q3, _, lg = reduce_ideal(d, s, sqrt_d, P3, Q3, want_gen=False)
            step = dg - math.log(e) + lg
            if not 0.0 < step <= reach:
                raise CorruptRegulator(f"giant step {step} outside (0, {reach}] for d={d}")
            dG += step
            G = (P3, Q3)
            idx = table.get(G)
            if idx is not None and dG - ds[idx] > 0.5:
                return dG - ds[idx], "bsgs"
        target *= 4


# --- power-product chains (compact representations) ---------------------------


def _neighbourhood(d, s, sqrt_d, cur, dist, radius):
    """Ideals within ``radius`` steps of ``cur``: list of (ideal, dist, multiplier)."""
    out = [(cur, dist, ONE)]
    I, dd, mul = cur, dist, ONE
    for _ in range(radius):
        P1, Q1 = rho(d, s, *I)
        psi = (P1, 1, I[1])
        dd += step_log(sqrt_d, P1, I[1])
        mul = qmul(mul, psi, d)
        I = (P1, Q1)
        out.append((I, dd, mul))
    I, dd, mul = cur, dist, ONE
    for _ in range(radius):
        Pp, Qp = rho_inverse(d, s, *I)
        psi = (I[0], 1, Qp)
        dd -= step_log(sqrt_d, I[0], Qp)
        mul = qmul(mul, qinv(psi, d), d)
        I = (Pp, Qp)
        out.append((I, dd, mul))
    return out


def _closest_below(d, s, sqrt_d, cur, dist, t, mul):
    """Move along the cycle to the last ideal whose distance is <= t."""
    while dist > t:
        Pp, Qp = rho_inverse(d, s, *cur)
        dist -= step_log(sqrt_d, cur[0], Qp)
        mul = qmul(mul, qinv((cur[0], 1, Qp), d), d)
        cur = (Pp, Qp)
    while True:
        P1, Q1 = rho(d, s, *cur)
        nd = dist + step_log(sqrt_d, P1, cur[1])
        if nd > t:
            return cur, dist, mul
        mul = qmul(mul, (P1, 1, cur[1]), d)
        cur, dist = (P1, Q1), nd


def _as_term(x, d: int, scale: int):
    """Integral (a, b) with (a + b sqrt d)/2 = scale * x, sign-normalised to be positive."""
    A, B, C = x
    num_a, num_b = 2 * A * scale, 2 * B * scale
    if num_a % C or num_b % C:
        raise CorruptRegulator(f"non-integral chain term for d={d}")
    a, b = num_a // C, num_b // C
    if qsign((a, b, 1), d) < 0:
        a, b = -a, -b
    return a, b


def power_product_chain(d: int, target: float, goal=None, radius: int = 4):
    """Terms of a compact representation of the generator of ``goal``.

    Finds the reduced principal ideal ``goal`` (default: the unit ideal, whose
    generator at distance ``target = R`` is the fundamental unit) near
    distance ``target`` by repeated squaring.  Returns ``(terms, dist)`` with
    ``terms = [(a_j, b_j, d_j)]`` such that the product of
    ``((a_j + b_j sqrt d)/(2 d_j))^(2^(k-j))`` generates ``goal``, or ``None``
    when ``goal`` is not found near ``target`` (it is then not principal, or the
    target is wrong).
    """
    s = isqrt(d)
    sqrt_d = math.sqrt(d)
    O, sigma = unit_ideal(d)
    if goal is None:
        goal = O
    k = 0
    while math.ldexp(target, -k) > 2.0:
        k += 1
    t0 = math.ldexp(target, -k)

    if k == 0:
        best = None
        cur, dist, mul = O, 0.0, ONE
        while dist <= target + 1.5:
            if cur == goal and dist > 0.05 and (best is None or abs(dist - target) < abs(best[1] - target)):
                best = (mul, dist)
            P1, Q1 = rho(d, s, *cur)
            dist += step_log(sqrt_d, P1, cur[1])
            mul = qmul(mul, (P1, 1, cur[1]), d)
            cur = (P1, Q1)
        if best is None:
            return None
        a, b = _as_term(best[0], d, 1)
        return [(a, b, 1)], best[1]

    cur, dist, beta = _closest_below(d, s, sqrt_d, O, 0.0, t0, ONE)
    a, b = _as_term(beta, d, 1)
    terms = [(a, b, 1)]
    for j in range(1, k + 1):
        t = math.ldexp(target, j - k)
        L = ideal_norm(sigma, cur)
        e, P3, Q3 = compose(d, sigma, cur, cur)
        P3, Q3, gen, lg = reduce_ideal(d, s, sqrt_d, P3, Q3)
        mu = qmul(gen, (1, 0, e), d)
        nd = 2 * dist - math.log(e) + lg
        cur, dist, mu = _closest_below(d, s, sqrt_d, (P3, Q3), nd, t, mu)
        if j == k:
            hits = [h for h in _neighbourhood(d, s, sqrt_d, cur, dist, radius) if h[0] == goal]
            if not hits:
                return None
            cur, dist, extra = min(hits, key=lambda h: abs(h[1] - t))
            mu = qmul(mu, extra, d)
        a, b = _as_term(mu, d, L * L)
        terms.append((a, b, L * L))
    return terms, dist
