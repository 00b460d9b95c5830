"""Univariate polynomials over a :class:`~ellrc.field.GF`.

A polynomial is a tuple of element encodings, lowest degree first, with no
trailing zeros (the zero polynomial is ``()``).
"""

from __future__ import annotations

import numpy as np

from .exceptions import DivisionByZero
from .field import GF

Poly = tuple

ZERO: Poly = ()
ONE: Poly = (1,)
X: Poly = (0, 1)


def norm(a) -> Poly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def const(c: int) -> Poly:
    return (c,) if c else ()


def deg(a: Poly) -> int:
    return len(a) - 1 if a else -1


def add(F: GF, a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = F.add(out[i], c)
    return norm(out)


def neg(F: GF, a: Poly) -> Poly:
    return tuple(F.neg(c) for c in a)


def sub(F: GF, a: Poly, b: Poly) -> Poly:
    return add(F, a, neg(F, b))


def scale(F: GF, a: Poly, c: int) -> Poly:
    if c == 0:
        return ()
    return norm(F.mul(x, c) for x in a)


def mul(F: GF, a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    if F.prime:
        p = F.p
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return norm(c % p for c in out)
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = F.add(out[i + j], F.mul(ai, bj))
    return norm(out)


def power(F: GF, a: Poly, n: int) -> Poly:
    result, base = ONE, a
    while n:
        if n & 1:
            result = mul(F, result, base)
        base = mul(F, base, base)
        n >>= 1
    return result


def divmod_(F: GF, a: Poly, b: Poly):
    if not b:
        raise DivisionByZero("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    inv_lead = F.inv(b[-1])
    qt = [0] * max(0, len(a) - db)
    while len(a) - 1 >= db and a:
        c = F.mul(a[-1], inv_lead)
        shift = len(a) - 1 - db
        qt[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, bi))
        a = list(norm(a))
    return norm(qt), norm(a)


def monic(F: GF, a: Poly) -> Poly:
    if not a:
        return a
    return scale(F, a, F.inv(a[-1]))


def gcd(F: GF, a: Poly, b: Poly) -> Poly:
    a, b = norm(a), norm(b)
    while b:
        a, b = b, divmod_(F, a, b)[1]
    return monic(F, a)


def evaluate(F: GF, a: Poly, x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def derivative(F: GF, a: Poly) -> Poly:
    return norm(F.mul(c, i % F.p) for i, c in enumerate(a) if i > 0)


def shift(F: GF, a: Poly, x0: int) -> Poly:
    """Coefficients of a(t + x0) in t (Taylor shift)."""
    out: Poly = ()
    for c in reversed(a):
        out = add(F, mul(F, out, (x0, 1)), const(c))
    return out


def root_multiplicity(F: GF, a: Poly, x0: int) -> int:
    """Order of vanishing of ``a`` at ``x0`` (a must be nonzero)."""
    if not a:
        raise DivisionByZero("zero polynomial has infinite multiplicity")
    s = shift(F, a, x0)
    k = 0
    while k < len(s) and s[k] == 0:
        k += 1
    return k


def strip_root(F: GF, a: Poly, x0: int, k: int) -> Poly:
    """a / (x - x0)^k, assuming exact divisibility."""
    for _ in range(k):
        a, r = divmod_(F, a, (F.neg(x0), 1))
        if r:
            raise ValueError("not divisible")
    return a


def roots(F: GF, a: Poly) -> list[int]:
    """Distinct roots in F, by exhaustive evaluation (desk scale)."""
    if not a:
        raise DivisionByZero("zero polynomial")
    xs = np.arange(F.q, dtype=np.int64)
    return [int(x) for x in np.nonzero(evaluate_many(F, a, xs) == 0)[0]]


def evaluate_many(F: GF, a: Poly, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    acc = np.zeros_like(xs)
    for c in reversed(a):
        acc = F.vadd(F.vmul(acc, xs), c)
    return acc


def from_roots(F: GF, rs) -> Poly:
    out = ONE
    for r in rs:
        out = mul(F, out, (F.neg(r), 1))
    return out


def compose(F: GF, a: Poly, b: Poly) -> Poly:
    out: Poly = ()
    for c in reversed(a):
        out = add(F, mul(F, out, b), const(c))
    return out
