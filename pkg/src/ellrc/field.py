"""Arithmetic in GF(p) and GF(p^h).

Elements are encoded as non-negative integers: the polynomial-basis
coefficient vector ``(c_0, ..., c_{h-1})`` maps to ``sum(c_i * p**i)``.
That encoding is the canonical element order and the on-disk format.

Two layers are provided:

* :class:`GF` exposes fast integer-level operations (``F.add(a, b)`` on
  encodings) and numpy-vectorized variants (``F.vmul``) used by the curve
  and linear-algebra code.
* :class:`FieldElement` is the immutable value type with operator
  overloading for user-facing code.
"""

from __future__ import annotations

import random
from functools import cached_property

import numpy as np

from .exceptions import DivisionByZero, EnumerationTooLarge, InvalidParameters, SpecMismatch

DEFAULT_ENUMERATION_LIMIT = 10**6
_TABLE_LIMIT = 1 << 22


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    i = 5
    while i * i <= n:
        if n % i == 0 or n % (i + 2) == 0:
            return False
        i += 6
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization (n is small everywhere we call this)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# --- polynomials over GF(p) as coefficient lists (low to high) -------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = list(a)
    inv_lead = pow(m[-1], -1, p)
    dm = len(m) - 1
    while len(_trim(a)) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
    return a


def _pmulmod(a, b, m, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _pmod(out, m, p)


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowmod(base, e, m, p):
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def is_irreducible(poly, p: int) -> bool:
    """Ben-Or test: ``poly`` (monic, low-to-high) has no factor of degree <= h/2."""
    f = _trim([c % p for c in poly])
    h = len(f) - 1
    if h < 1:
        return False
    if h == 1:
        return True
    xp = [0, 1]
    for _ in range(h // 2):
        xp = _ppowmod(xp, p, f, p)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % p
        g = _pgcd(f, _trim(diff), p)
        if len(g) > 1:
            return False
    return True


def find_irreducible(p: int, h: int, seed: int = 0) -> tuple[int, ...]:
    """Monic irreducible polynomial of degree ``h`` over GF(p), low-to-high.

    Deterministic for a fixed seed; ``h == 1`` always returns ``x``.
    """
    if not is_prime(p):
        raise InvalidParameters(f"p={p} is not prime")
    if h < 1:
        raise InvalidParameters("extension degree must be >= 1")
    if h == 1:
        return (0, 1)
    rng = random.Random(seed)
    while True:
        cand = [rng.randrange(p) for _ in range(h)] + [1]
        if cand[0] != 0 and is_irreducible(cand, p):
            return tuple(cand)


class GF:
    """The finite field GF(p^h) (the serialized "field spec").

    >>> F = GF(7)
    >>> F.add(3, 5)
    1
    """

    def __init__(self, p: int, h: int = 1, modulus=None, seed: int = 0):
        if not is_prime(p):
            raise InvalidParameters(f"p={p} is not prime")
        if p < 5:
            raise InvalidParameters("characteristic must be >= 5")
        if h < 1:
            raise InvalidParameters("extension degree must be >= 1")
        if modulus is None:
            modulus = find_irreducible(p, h, seed)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != h + 1 or modulus[-1] != 1:
            raise InvalidParameters("modulus must be monic of degree h")
        if h > 1 and not is_irreducible(modulus, p):
            raise InvalidParameters(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.h = h
        self.modulus = modulus
        self.q = p**h
        self.prime = h == 1

    # identity -------------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.h, self.modulus) == (other.p, other.h, other.modulus)

    def __hash__(self):
        return hash((self.p, self.h, self.modulus))

    def __repr__(self):
        if self.prime:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.h}, modulus={list(self.modulus)})"

    def to_dict(self):
        return {"p": self.p, "h": self.h, "modulus": list(self.modulus)}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["p"]), int(d["h"]), d["modulus"])

    # conversions ------------------------------------------------------------
    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise SpecMismatch(f"{value!r} does not belong to {self!r}")
            return value
        return FieldElement(self, self.embed(value))

    def embed(self, value) -> int:
        """Encoding of ``value``: an int is read as an element of the prime
        subfield (``n * 1``); a list/tuple as polynomial-basis coefficients."""
        if isinstance(value, FieldElement):
            return self(value).value
        if isinstance(value, (list, tuple)):
            return self.from_coeffs(value)
        return int(value) % self.p

    def decode(self, encoding: int) -> "FieldElement":
        encoding = int(encoding)
        if not 0 <= encoding < self.q:
            raise InvalidParameters(f"encoding {encoding} out of range for {self!r}")
        return FieldElement(self, encoding)

    def to_coeffs(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.h):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def from_coeffs(self, coeffs) -> int:
        coeffs = [int(c) % self.p for c in coeffs]
        if len(coeffs) > self.h:
            coeffs = _pmod(coeffs, list(self.modulus), self.p)
        v = 0
        for c in reversed(coeffs):
            v = v * self.p + c
        return v

    @property
    def zero(self):
        return FieldElement(self, 0)

    @property
    def one(self):
        return FieldElement(self, 1)

    def enumerate(self, limit: int = DEFAULT_ENUMERATION_LIMIT):
        """All q elements in canonical (encoding) order."""
        if self.q > limit:
            raise EnumerationTooLarge(f"q={self.q} exceeds enumeration limit {limit}")
        return [FieldElement(self, v) for v in range(self.q)]

    def random(self, rng: random.Random, nonzero: bool = False) -> "FieldElement":
        lo = 1 if nonzero else 0
        return FieldElement(self, rng.randrange(lo, self.q))

    # log tables for extension fields ----------------------------------------
    @cached_property
    def _tables(self):
        if self.q > _TABLE_LIMIT:
            return None
        order = self.q - 1
        primes = list(factorize(order))
        m = list(self.modulus)
        for g in range(2, self.q):
            gc = list(self.to_coeffs(g))
            if all(_ppowmod(gc, order // r, m, self.p) != [1] for r in primes):
                break
        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.zeros(self.q, dtype=np.int64)
        cur = [1]
        gc = list(self.to_coeffs(g))
        for i in range(order):
            v = self.from_coeffs(cur)
            exp[i] = v
            log[v] = i
            cur = _pmulmod(cur, gc, m, self.p)
        exp[order:] = exp[:order]
        return exp, log

    # scalar integer-level ops ---------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.prime:
            return (a + b) % self.p
        p, out, scale = self.p, 0, 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * scale
            scale *= p
        return out

    def neg(self, a: int) -> int:
        if self.prime:
            return -a % self.p
        p, out, scale = self.p, 0, 1
        while a:
            a, ra = divmod(a, p)
            out += (-ra % p) * scale
            scale *= p
        return out

    def sub(self, a: int, b: int) -> int:
        if self.prime:
            return (a - b) % self.p
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.prime:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        t = self._tables
        if t is not None:
            exp, log = t
            return int(exp[log[a] + log[b]])
        return self.from_coeffs(_pmulmod(list(self.to_coeffs(a)), list(self.to_coeffs(b)),
                                         list(self.modulus), self.p))

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"zero has no inverse in {self!r}")
        if self.prime:
            return pow(a, -1, self.p)
        t = self._tables
        if t is not None:
            exp, log = t
            return int(exp[(self.q - 1 - log[a]) % (self.q - 1)])
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if self.prime:
            return pow(a, n, self.p)
        if a == 0:
            return 1 if n == 0 else 0
        t = self._tables
        if t is not None:
            exp, log = t
            return int(exp[(int(log[a]) * n) % (self.q - 1)])
        result, base = 1, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def is_square(self, a: int) -> bool:
        return a == 0 or self.pow(a, (self.q - 1) // 2) == 1

    @cached_property
    def _nonresidue(self):
        for z in range(2, self.q):
            if not self.is_square(z):
                return z
        raise AssertionError("no quadratic non-residue")  # unreachable for odd q

    def sqrt(self, a: int):
        """A square root of ``a`` (Tonelli-Shanks), or None for non-squares."""
        if a == 0:
            return 0
        if not self.is_square(a):
            return None
        q = self.q
        if q % 4 == 3:
            return self.pow(a, (q + 1) // 4)
        s, e = q - 1, 0
        while s % 2 == 0:
            s //= 2
            e += 1
        z = self.pow(self._nonresidue, s)
        x = self.pow(a, (s + 1) // 2)
        b = self.pow(a, s)
        while b != 1:
            k, t = 0, b
            while t != 1:
                t = self.mul(t, t)
                k += 1
            g = z
            for _ in range(e - k - 1):
                g = self.mul(g, g)
            x = self.mul(x, g)
            z = self.mul(g, g)
            b = self.mul(b, z)
            e = k
        return x

    # vectorized ops on int64 arrays of encodings ----------------------------------
    def _digits(self, a):
        out = []
        for _ in range(self.h):
            out.append(a % self.p)
            a = a // self.p
        return out

    def _undigits(self, ds):
        out = np.zeros_like(ds[0])
        for d in reversed(ds):
            out = out * self.p + d
        return out

    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.prime:
            return (a + b) % self.p
        return self._undigits([(x + y) % self.p for x, y in zip(self._digits(a), self._digits(b))])

    def vneg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.prime:
            return (-a) % self.p
        return self._undigits([(-x) % self.p for x in self._digits(a)])

    def vsub(self, a, b):
        if self.prime:
            return (np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)) % self.p
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.prime:
            return (a * b) % self.p
        exp, log = self._require_tables()
        out = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def vinv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("zero has no inverse")
        if self.prime:
            return np.vectorize(lambda v: pow(int(v), -1, self.p), otypes=[np.int64])(a) if a.ndim else \
                np.int64(pow(int(a), -1, self.p))
        exp, log = self._require_tables()
        return exp[(self.q - 1 - log[a]) % (self.q - 1)]

    def vpow(self, a, n: int):
        a = np.asarray(a, dtype=np.int64)
        result = np.ones_like(a)
        base = a.copy()
        while n:
            if n & 1:
                result = self.vmul(result, base)
            base = self.vmul(base, base)
            n >>= 1
        return result

    def _require_tables(self):
        t = self._tables
        if t is None:
            raise EnumerationTooLarge(f"vectorized arithmetic needs q <= {_TABLE_LIMIT}")
        return t


class FieldElement:
    """Immutable element of a :class:`GF`.

    Integers on either side of an operator are read as prime-subfield
    elements, so ``2 * a`` and ``a + 1`` work.
    """

    __slots__ = ("field", "value")

    def __init__(self, field: GF, value: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", int(value))

    def __setattr__(self, key, value):
        raise AttributeError("FieldElement is immutable")

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.field.to_coeffs(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise SpecMismatch(f"cannot combine elements of {self.field!r} and {other.field!r}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.p
        return NotImplemented

    def _wrap(self, v):
        return FieldElement(self.field, v)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(o, self.value))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, n: int):
        return self._wrap(self.field.pow(self.value, int(n)))

    def inv(self):
        return self._wrap(self.field.inv(self.value))

    def sqrt(self):
        r = self.field.sqrt(self.value)
        return None if r is None else self._wrap(r)

    def is_zero(self) -> bool:
        return self.value == 0

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.p
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        if self.field.prime:
            return f"{self.value} (mod {self.field.p})"
        return f"{list(self.coeffs)} in {self.field!r}"


def field_arith(a: FieldElement, b: FieldElement | None, kind: str, n: int | None = None) -> FieldElement:
    """Dispatch form of the element operators (``kind`` in add, sub, mul, div,
    pow, inv, neg)."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    if kind == "pow":
        return a ** n
    if kind == "inv":
        return a.inv()
    if kind == "neg":
        return -a
    raise InvalidParameters(f"unknown field operation {kind!r}")
