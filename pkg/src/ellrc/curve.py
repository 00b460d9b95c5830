"""Long-Weierstrass elliptic curves over GF(q).

Points carry integer coordinate encodings; the curve knows its field and
does all arithmetic. ``CurvePoint.INF`` is the point at infinity.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .exceptions import (
    EnumerationTooLarge,
    InvalidParameters,
    PointNotOnCurve,
    SearchFailed,
    SingularCurve,
    TorsionNotRational,
)
from .field import DEFAULT_ENUMERATION_LIMIT, GF, FieldElement, factorize, is_prime


class CurvePoint:
    """Either the point at infinity or an affine point ``(x, y)`` (encodings)."""

    __slots__ = ("x", "y")

    def __init__(self, x: int | None, y: int | None):
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __setattr__(self, key, value):
        raise AttributeError("CurvePoint is immutable")

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __eq__(self, other):
        return isinstance(other, CurvePoint) and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (-1, -1) if self.x is None else (self.x, self.y)

    def __repr__(self):
        return "INF" if self.x is None else f"({self.x}, {self.y})"

    def to_json(self):
        return "inf" if self.x is None else {"x": self.x, "y": self.y}

    @classmethod
    def from_json(cls, d):
        if d == "inf":
            return INF
        return cls(int(d["x"]), int(d["y"]))


INF = CurvePoint(None, None)
CurvePoint.INF = INF


class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over ``field``.

    Coefficients may be given as ints (prime-subfield constants), coefficient
    lists, or FieldElements; they are stored as encodings.
    """

    def __init__(self, field: GF, a1=0, a2=0, a3=0, a4=0, a6=0, check: bool = True):
        self.field = field
        self.a = tuple(field.embed(c) for c in (a1, a2, a3, a4, a6))
        self.a1, self.a2, self.a3, self.a4, self.a6 = self.a
        if check and self.discriminant().is_zero():
            raise SingularCurve(f"discriminant vanishes for coefficients {self.a}")

    @classmethod
    def from_encodings(cls, field: GF, coeffs, check: bool = True):
        c = cls.__new__(cls)
        c.field = field
        c.a = tuple(int(v) for v in coeffs)
        c.a1, c.a2, c.a3, c.a4, c.a6 = c.a
        if check and c.discriminant().is_zero():
            raise SingularCurve(f"discriminant vanishes for coefficients {c.a}")
        return c

    def __eq__(self, other):
        return isinstance(other, WeierstrassCurve) and self.field == other.field and self.a == other.a

    def __hash__(self):
        return hash((self.field, self.a))

    def __repr__(self):
        return f"WeierstrassCurve({self.field!r}, a={list(self.a)})"

    def to_dict(self):
        d = {"field": self.field.to_dict()}
        d.update({k: v for k, v in zip(("a1", "a2", "a3", "a4", "a6"), self.a)})
        return d

    @classmethod
    def from_dict(cls, d):
        F = GF.from_dict(d["field"])
        return cls.from_encodings(F, [d[k] for k in ("a1", "a2", "a3", "a4", "a6")])

    # invariants -------------------------------------------------------------
    def b_invariants(self):
        F = self.field
        a1, a2, a3, a4, a6 = (F.decode(v) for v in self.a)
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def discriminant(self) -> FieldElement:
        b2, b4, b6, b8 = self.b_invariants()
        return -(b2 * b2 * b8) - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def j_invariant(self) -> FieldElement:
        b2, b4, _, _ = self.b_invariants()
        c4 = b2 * b2 - 24 * b4
        return c4 * c4 * c4 / self.discriminant()

    # points -------------------------------------------------------------------
    def point(self, x, y) -> CurvePoint:
        P = CurvePoint(self.field.embed(x), self.field.embed(y))
        if not self.contains(P):
            raise PointNotOnCurve(f"{P} is not on {self}")
        return P

    def rhs(self, x: int) -> int:
        F = self.field
        return F.add(F.mul(F.add(F.mul(F.add(x, self.a2), x), self.a4), x), self.a6)

    def contains(self, P: CurvePoint) -> bool:
        if P.x is None:
            return True
        F = self.field
        x, y = P.x, P.y
        lhs = F.mul(y, F.add(y, F.add(F.mul(self.a1, x), self.a3)))
        return lhs == self.rhs(x)

    def _check(self, P):
        if not isinstance(P, CurvePoint) or not self.contains(P):
            raise PointNotOnCurve(f"{P!r} is not on {self}")

    def lift_x(self, x: int) -> list[int]:
        """All y with (x, y) on the curve, ascending."""
        F = self.field
        s = F.add(F.mul(self.a1, x), self.a3)
        disc = F.add(F.mul(s, s), F.mul(4 % F.p, self.rhs(x)))
        r = F.sqrt(disc)
        if r is None:
            return []
        inv2 = F.inv(2)
        ys = {F.mul(F.sub(r, s), inv2), F.mul(F.sub(F.neg(r), s), inv2)}
        return sorted(ys)

    def neg(self, P: CurvePoint) -> CurvePoint:
        if P.x is None:
            return INF
        F = self.field
        return CurvePoint(P.x, F.sub(F.neg(P.y), F.add(F.mul(self.a1, P.x), self.a3)))

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        if P.x is None:
            return Q
        if Q.x is None:
            return P
        F = self.field
        a1, a2, a3, a4, a6 = self.a
        if F.prime:
            p = F.p
            x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
            if x1 == x2:
                den = (y1 + y2 + a1 * x2 + a3) % p
                if den == 0:
                    return INF
                den = (2 * y1 + a1 * x1 + a3) % p
                inv = pow(den, -1, p)
                lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * inv % p
                nu = (-x1 * x1 * x1 + a4 * x1 + 2 * a6 - a3 * y1) * inv % p
            else:
                inv = pow(x2 - x1, -1, p)
                lam = (y2 - y1) * inv % p
                nu = (y1 * x2 - y2 * x1) * inv % p
            x3 = (lam * lam + a1 * lam - a2 - x1 - x2) % p
            y3 = (-(lam + a1) * x3 - nu - a3) % p
            return CurvePoint(x3, y3)
        x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
        if x1 == x2:
            if F.add(F.add(y1, y2), F.add(F.mul(a1, x2), a3)) == 0:
                return INF
            den = F.add(F.add(F.mul(2, y1), F.mul(a1, x1)), a3)
            num = F.sub(F.add(F.add(F.mul(3, F.mul(x1, x1)), F.mul(F.mul(2, a2), x1)), a4), F.mul(a1, y1))
            lam = F.div(num, den)
            num2 = F.sub(F.add(F.add(F.neg(F.mul(x1, F.mul(x1, x1))), F.mul(a4, x1)), F.mul(2, a6)), F.mul(a3, y1))
            nu = F.div(num2, den)
        else:
            dx = F.sub(x2, x1)
            lam = F.div(F.sub(y2, y1), dx)
            nu = F.div(F.sub(F.mul(y1, x2), F.mul(y2, x1)), dx)
        x3 = F.sub(F.sub(F.sub(F.add(F.mul(lam, lam), F.mul(a1, lam)), a2), x1), x2)
        y3 = F.sub(F.sub(F.neg(F.mul(F.add(lam, a1), x3)), nu), a3)
        return CurvePoint(x3, y3)

    def sub(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        return self.add(P, self.neg(Q))

    def mul(self, n: int, P: CurvePoint) -> CurvePoint:
        if n < 0:
            return self.mul(-n, self.neg(P))
        R, B = INF, P
        while n:
            if n & 1:
                R = self.add(R, B)
            B = self.add(B, B)
            n >>= 1
        return R

    def point_op(self, P: CurvePoint, Q: CurvePoint | None, kind: str, n: int | None = None) -> CurvePoint:
        """Checked dispatch form of the group law (``kind`` in add, neg, sub,
        scalar_mul)."""
        self._check(P)
        if Q is not None:
            self._check(Q)
        if kind == "add":
            return self.add(P, Q)
        if kind == "neg":
            return self.neg(P)
        if kind == "sub":
            return self.sub(P, Q)
        if kind == "scalar_mul":
            return self.mul(int(n), P)
        raise InvalidParameters(f"unknown point operation {kind!r}")

    def sum(self, points) -> CurvePoint:
        acc = INF
        for P in points:
            acc = self.add(acc, P)
        return acc

    # enumeration and structure ----------------------------------------------------------
    def points(self, limit: int = DEFAULT_ENUMERATION_LIMIT) -> list[CurvePoint]:
        """All rational points: INF first, then affine points sorted by (x, y)."""
        if self.field.q > limit:
            raise EnumerationTooLarge(f"q={self.field.q} exceeds enumeration limit {limit}")
        return self._points

    @cached_property
    def _points(self):
        pts = [INF]
        for x in range(self.field.q):
            for y in self.lift_x(x):
                pts.append(CurvePoint(x, y))
        return pts

    @cached_property
    def order(self) -> int:
        """#E(F_q), by exhaustive sweep."""
        return len(self._points)

    def random_point(self, rng: random.Random) -> CurvePoint:
        return rng.choice(self._points)

    def order_of(self, P: CurvePoint, multiple: int | None = None) -> int:
        """Exact order of P, given a known multiple of it (default #E)."""
        n = multiple if multiple is not None else self.order
        for r in factorize(n):
            while n % r == 0 and self.mul(n // r, P).is_infinity:
                n //= r
        return n

    def multiples(self, P: CurvePoint) -> list[CurvePoint]:
        """[INF, P, 2P, ...] up to the order of P."""
        out = [INF]
        Q = P
        while not Q.is_infinity:
            out.append(Q)
            Q = self.add(Q, P)
        return out

    def subgroup(self, gens) -> list[CurvePoint]:
        """The subgroup generated by ``gens``, sorted canonically."""
        elems = {INF}
        for g in gens:
            cyc = self.multiples(g)
            elems = {self.add(e, c) for e in elems for c in cyc}
        return sorted(elems)

    def group_structure(self) -> "GroupStructure":
        return self._group_structure

    @cached_property
    def _group_structure(self):
        N = self.order
        pts = self._points
        orders = {}
        exponent = 1
        for P in pts[1:]:
            o = self.order_of(P)
            orders[P] = o
            exponent = exponent * o // math.gcd(exponent, o)
            if exponent == N:
                break
        b = exponent
        a = N // b
        gen_b = next(P for P in pts[1:] if (orders.get(P) or self.order_of(P)) == b)
        if a == 1:
            return GroupStructure(1, b, INF, gen_b)
        cyc_b = set(self.multiples(gen_b))
        for R in pts[1:]:
            if self.mul(a, R).is_infinity and self.order_of(R, a) == a:
                cyc_a = self.multiples(R)
                if all(c not in cyc_b for c in cyc_a[1:]):
                    return GroupStructure(a, b, R, gen_b)
        raise AssertionError("no complement found")  # unreachable for abelian groups

    def torsion_basis(self, m: int) -> "TorsionBasis":
        if m < 1:
            raise InvalidParameters("m must be positive")
        if math.gcd(m, self.field.p) != 1:
            raise TorsionNotRational(f"gcd(m={m}, q={self.field.q}) != 1")
        gs = self.group_structure()
        if gs.a % m or gs.b % m:
            raise TorsionNotRational(f"E[{m}] is not rational: group is Z/{gs.a} x Z/{gs.b}")
        P1 = self.mul(gs.a // m, gs.gen_a)
        P2 = self.mul(gs.b // m, gs.gen_b)
        return TorsionBasis.build(self, m, P1, P2)

    def odd_subgroups(self, max_order: int) -> list[list[CurvePoint]]:
        """All subgroups of odd order <= max_order (the trivial group included)."""
        small = []
        for P in self._points[1:]:
            o = self.order_of(P)
            if o % 2 == 1 and o <= max_order:
                small.append(P)
        found = {frozenset([INF])}
        frontier = list(found)
        while frontier:
            nxt = []
            for H in frontier:
                for P in small:
                    if P in H:
                        continue
                    G = frozenset(self.subgroup(list(H) + [P]))
                    if len(G) <= max_order and G not in found:
                        found.add(G)
                        nxt.append(G)
            frontier = nxt
        return sorted((sorted(G) for G in found), key=lambda g: (len(g), [p.sort_key() for p in g]))

    def hasse_ok(self) -> bool:
        q = self.field.q
        return (self.order - q - 1) ** 2 <= 4 * q


@dataclass(frozen=True)
class GroupStructure:
    """E(F_q) = Z/a x Z/b with a | b, generated by gen_a and gen_b."""

    a: int
    b: int
    gen_a: CurvePoint
    gen_b: CurvePoint


@dataclass
class TorsionBasis:
    """Basis (P1, P2) of E[m] with the discrete-log table onto (Z/m)^2."""

    curve: WeierstrassCurve
    m: int
    P1: CurvePoint
    P2: CurvePoint
    dlog: dict = dc_field(repr=False)
    table: dict = dc_field(repr=False)

    @classmethod
    def build(cls, curve: WeierstrassCurve, m: int, P1: CurvePoint, P2: CurvePoint) -> "TorsionBasis":
        mult1 = curve.multiples(P1)
        mult2 = curve.multiples(P2)
        if len(mult1) != m or len(mult2) != m:
            raise TorsionNotRational(f"basis points do not have order {m}")
        dlog, table = {}, {}
        for i in range(m):
            for j in range(m):
                R = curve.add(mult1[i], mult2[j])
                if R in dlog:
                    raise TorsionNotRational("basis points are dependent")
                dlog[R] = (i, j)
                table[(i, j)] = R
        return cls(curve, m, P1, P2, dlog, table)

    def point(self, i: int, j: int) -> CurvePoint:
        return self.table[(i % self.m, j % self.m)]

    @property
    def points(self) -> list[CurvePoint]:
        """All m^2 points of E[m], in (i, j) lexicographic order."""
        return [self.table[(i, j)] for i in range(self.m) for j in range(self.m)]

    def to_dict(self):
        return {"m": self.m, "P1": self.P1.to_json(), "P2": self.P2.to_json()}

    @classmethod
    def from_dict(cls, curve, d):
        return cls.build(curve, int(d["m"]), CurvePoint.from_json(d["P1"]), CurvePoint.from_json(d["P2"]))


# --- search -------------------------------------------------------------------------------

def _chi_table(F: GF) -> np.ndarray:
    xs = np.arange(F.q, dtype=np.int64)
    sq = np.unique(F.vmul(xs, xs))
    chi = -np.ones(F.q, dtype=np.int64)
    chi[sq] = 1
    chi[0] = 0
    return chi


def _counts_for_a4(F: GF, a4: int, chi: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """#E for y^2 = x^3 + a4 x + a6 for every a6 (indexed by encoding)."""
    f = F.vadd(F.vmul(F.vmul(xs, xs), xs), F.vmul(np.full_like(xs, a4), xs))
    cnt = np.bincount(f, minlength=F.q)
    if F.prime:
        # S(a6) = sum_v cnt[v] chi[v + a6], a cyclic correlation
        fa = np.fft.rfft(cnt[::-1].astype(np.float64))
        fb = np.fft.rfft(chi.astype(np.float64))
        corr = np.fft.irfft(fa * fb, n=F.q)
        # corr[k] = sum_v cnt[v] chi[(k + v - (q-1)) mod q]
        S = np.rint(np.roll(corr, -(F.q - 1))).astype(np.int64)
    else:
        S = np.zeros(F.q, dtype=np.int64)
        for v in np.nonzero(cnt)[0]:
            S += cnt[v] * chi[F.vadd(np.full_like(xs, v), xs)]
    return F.q + 1 + S


def _field_candidates(p_range, h_range, m):
    out = []
    for p in range(max(5, p_range[0]), p_range[1] + 1):
        if not is_prime(p):
            continue
        for h in range(h_range[0], h_range[1] + 1):
            q = p**h
            if (q - 1) % m == 0:
                out.append((q, p, h))
    out.sort()
    return out


@dataclass
class SearchResult:
    field: GF
    curve: WeierstrassCurve
    basis: TorsionBasis
    stats: dict


def search_curve(p_range=(5, 250), h_range=(1, 1), m: int = 5, mode=None, seed: int = 0,
                 min_points: int = 0, q_max: int | None = None, budget: int | None = None) -> SearchResult:
    """First short-Weierstrass curve (canonical order) whose rational points
    contain the full m-torsion and number at least ``min_points``.

    Fields are scanned by increasing q (only q = 1 mod m can work); curves
    y^2 = x^3 + a4 x + a6 by increasing (a4, a6). A nonzero ``seed`` rotates
    the starting a4 inside each field. ``mode`` may be ``("group_contains", v, w)``,
    which is the same condition for m = v*w with gcd(v, w) = 1.
    """
    if mode is not None and mode[0] == "group_contains":
        v, w = int(mode[1]), int(mode[2])
        if math.gcd(v, w) != 1:
            raise InvalidParameters("v and w must be coprime")
        m = v * w
    if m < 3 or m % 2 == 0:
        raise InvalidParameters(f"m={m}: only odd m >= 3 is supported")
    stats = {"fields_scanned": 0, "curves_scanned": 0, "count_hits": 0}
    for q, p, h in _field_candidates(p_range, h_range, m):
        if q_max is not None and q > q_max:
            break
        if q + 1 + 2 * math.isqrt(q) + 2 < max(min_points, m * m):
            continue
        F = GF(p, h)
        stats["fields_scanned"] += 1
        chi = _chi_table(F)
        xs = np.arange(F.q, dtype=np.int64)
        start = random.Random(seed).randrange(F.q) if seed else 0
        for step in range(F.q):
            a4 = (start + step) % F.q
            counts = _counts_for_a4(F, a4, chi, xs)
            stats["curves_scanned"] += F.q
            good = np.nonzero((counts % (m * m) == 0) & (counts >= min_points))[0]
            for a6 in good:
                a6 = int(a6)
                try:
                    E = WeierstrassCurve.from_encodings(F, (0, 0, 0, a4, a6))
                except SingularCurve:
                    continue
                stats["count_hits"] += 1
                if budget is not None and stats["count_hits"] > budget:
                    raise SearchFailed("search budget exhausted", stats)
                if _has_full_torsion(E, m):
                    return SearchResult(F, E, E.torsion_basis(m), stats)
    raise SearchFailed(f"no curve with rational E[{m}] found", stats)


def _has_full_torsion(E: WeierstrassCurve, m: int) -> bool:
    """E[m] rational iff every point is killed by #E/m (exponent divides #E/m)."""
    N = E.order
    if N % (m * m):
        return False
    k = N // m
    return all(E.mul(k, P).is_infinity for P in E.points()[1:])
