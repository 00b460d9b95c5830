"""Rational functions and divisors on an elliptic curve.

A function is stored as ``(a(x) + b(x) y) / c(x)`` with ``c`` monic and
``gcd(a, b, c) = 1``; for x-only denominators that form is unique, so two
functions are equal exactly when their triples are.

Local behaviour at a rational point is read off truncated power series in a
uniformizer: ``x - x0`` at ordinary points, ``y - y0`` at points of order 2.
"""

from __future__ import annotations

import numpy as np

from . import poly as P_
from .curve import INF, CurvePoint, WeierstrassCurve
from .exceptions import DivisionByZero, InvalidParameters, NonRationalSupport, SpecMismatch, UnsupportedSubgroupOrder
from .field import FieldElement


class _Pole:
    """Marker returned by :func:`evaluate` where the function has a pole."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Pole"

    def __bool__(self):
        return False


Pole = _Pole()


class CurveFunction:
    def __init__(self, curve: WeierstrassCurve, a=(), b=(), c=(1,), _normalized: bool = False):
        self.curve = curve
        if _normalized:
            self.a, self.b, self.c = a, b, c
        else:
            self.a, self.b, self.c = _normalize(curve, P_.norm(a), P_.norm(b), P_.norm(c))

    # constructors ------------------------------------------------------------
    @classmethod
    def const(cls, curve, value) -> "CurveFunction":
        return cls(curve, P_.const(curve.field.embed(value)))

    @classmethod
    def x(cls, curve) -> "CurveFunction":
        return cls(curve, P_.X)

    @classmethod
    def y(cls, curve) -> "CurveFunction":
        return cls(curve, (), P_.ONE)

    @classmethod
    def monomial(cls, curve, i: int, j: int) -> "CurveFunction":
        """x^i y^j with j in {0, 1}."""
        xi = (0,) * i + (1,)
        return cls(curve, xi if j == 0 else (), xi if j == 1 else (), _normalized=False)

    # identity -------------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, CurveFunction):
            return self.curve == other.curve and (self.a, self.b, self.c) == (other.a, other.b, other.c)
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.c))

    def __repr__(self):
        return f"CurveFunction(a={list(self.a)}, b={list(self.b)}, c={list(self.c)})"

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def is_constant(self) -> bool:
        return not self.b and len(self.a) <= 1 and self.c == (1,)

    def to_dict(self):
        return {"a": list(self.a), "b": list(self.b), "c": list(self.c)}

    @classmethod
    def from_dict(cls, curve, d):
        return cls(curve, tuple(d["a"]), tuple(d["b"]), tuple(d["c"]))

    # arithmetic ----------------------------------------------------------------
    def _same(self, g):
        if not isinstance(g, CurveFunction):
            return CurveFunction.const(self.curve, g)
        if g.curve != self.curve:
            raise SpecMismatch("functions live on different curves")
        return g

    def __add__(self, g):
        g = self._same(g)
        F = self.curve.field
        a = P_.add(F, P_.mul(F, self.a, g.c), P_.mul(F, g.a, self.c))
        b = P_.add(F, P_.mul(F, self.b, g.c), P_.mul(F, g.b, self.c))
        return CurveFunction(self.curve, a, b, P_.mul(F, self.c, g.c))

    __radd__ = __add__

    def __neg__(self):
        F = self.curve.field
        return CurveFunction(self.curve, P_.neg(F, self.a), P_.neg(F, self.b), self.c, _normalized=True)

    def __sub__(self, g):
        return self + (-self._same(g))

    def __rsub__(self, g):
        return self._same(g) - self

    def __mul__(self, g):
        g = self._same(g)
        a, b = _mul_num(self.curve, (self.a, self.b), (g.a, g.b))
        return CurveFunction(self.curve, a, b, P_.mul(self.curve.field, self.c, g.c))

    __rmul__ = __mul__

    def conj(self) -> "CurveFunction":
        """Image under the negation map (x, y) -> (x, -y - a1 x - a3)."""
        a, b = _conj(self.curve, self.a, self.b)
        return CurveFunction(self.curve, a, b, self.c, _normalized=True)

    def numerator_norm(self):
        return _norm_poly(self.curve, self.a, self.b)

    def inverse(self) -> "CurveFunction":
        if self.is_zero():
            raise DivisionByZero("the zero function has no inverse")
        F = self.curve.field
        ca, cb = _conj(self.curve, self.a, self.b)
        N = _norm_poly(self.curve, self.a, self.b)
        return CurveFunction(self.curve, P_.mul(F, ca, self.c), P_.mul(F, cb, self.c), N)

    def __truediv__(self, g):
        return self * self._same(g).inverse()

    def __rtruediv__(self, g):
        return self._same(g) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CurveFunction.const(self.curve, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # local data ----------------------------------------------------------------
    def pole_order_at_infinity(self) -> int:
        """-v_inf(f)."""
        if self.is_zero():
            raise DivisionByZero("zero function")
        return _num_pole_order(self.a, self.b) - 2 * P_.deg(self.c)

    def weighted_degree(self) -> int:
        """Pole order at infinity of the numerator a + b y."""
        return _num_pole_order(self.a, self.b)


def _num_pole_order(a, b) -> int:
    da = 2 * P_.deg(a) if a else -1
    db = 2 * P_.deg(b) + 3 if b else -1
    return max(da, db)


def _normalize(curve, a, b, c):
    F = curve.field
    if not c:
        raise DivisionByZero("zero denominator")
    if not a and not b:
        return (), (), (1,)
    g = P_.gcd(F, P_.gcd(F, a, b), c)
    if len(g) > 1:
        a = P_.divmod_(F, a, g)[0]
        b = P_.divmod_(F, b, g)[0]
        c = P_.divmod_(F, c, g)[0]
    lead = c[-1]
    if lead != 1:
        inv = F.inv(lead)
        a, b, c = P_.scale(F, a, inv), P_.scale(F, b, inv), P_.scale(F, c, inv)
    return a, b, c


def _s_poly(curve):
    return P_.norm((curve.a3, curve.a1))


def _r_poly(curve):
    return P_.norm((curve.a6, curve.a4, curve.a2, 1))


def _mul_num(curve, u, v):
    F = curve.field
    (a1, b1), (a2, b2) = u, v
    bb = P_.mul(F, b1, b2)
    a = P_.add(F, P_.mul(F, a1, a2), P_.mul(F, bb, _r_poly(curve)))
    b = P_.sub(F, P_.add(F, P_.mul(F, a1, b2), P_.mul(F, a2, b1)), P_.mul(F, bb, _s_poly(curve)))
    return a, b


def _conj(curve, a, b):
    F = curve.field
    return P_.sub(F, a, P_.mul(F, b, _s_poly(curve))), P_.neg(F, b)


def _norm_poly(curve, a, b):
    F = curve.field
    s, R = _s_poly(curve), _r_poly(curve)
    return P_.sub(F, P_.sub(F, P_.mul(F, a, a), P_.mul(F, P_.mul(F, a, b), s)), P_.mul(F, P_.mul(F, b, b), R))


# --- truncated power series --------------------------------------------------------

def _smul(F, u, v, prec):
    out = [0] * prec
    for i, ui in enumerate(u[:prec]):
        if ui:
            for j in range(min(len(v), prec - i)):
                if v[j]:
                    out[i + j] = F.add(out[i + j], F.mul(ui, v[j]))
    return out


def _sadd(F, u, v):
    n = max(len(u), len(v))
    u = list(u) + [0] * (n - len(u))
    v = list(v) + [0] * (n - len(v))
    return [F.add(x, y) for x, y in zip(u, v)]


def _poly_at_series(F, a, xs, prec):
    """a(x(t)) truncated to ``prec`` terms."""
    acc = [0] * prec
    for c in reversed(a):
        acc = _smul(F, acc, xs, prec)
        acc[0] = F.add(acc[0], c)
    return acc


def is_two_torsion(curve, P: CurvePoint) -> bool:
    F = curve.field
    return F.add(F.add(F.mul(2, P.y), F.mul(curve.a1, P.x)), curve.a3) == 0


def local_expansion(curve: WeierstrassCurve, P: CurvePoint, prec: int):
    """Series (x(t), y(t)) to ``prec`` terms in a uniformizer t at affine P."""
    F = curve.field
    x0, y0 = P.x, P.y
    a1 = curve.a1
    Rs = list(P_.shift(F, _r_poly(curve), x0)) + [0] * 4
    s0 = F.add(F.mul(a1, x0), curve.a3)
    if not is_two_torsion(curve, P):
        xs = [x0, 1] + [0] * max(0, prec - 2)
        c = [y0] + [0] * (prec - 1)
        den_inv = F.inv(F.add(F.mul(2, y0), s0))
        for k in range(1, prec):
            acc = Rs[k] if k < len(Rs) else 0
            for i in range(1, k):
                acc = F.sub(acc, F.mul(c[i], c[k - i]))
            acc = F.sub(acc, F.mul(a1, c[k - 1]))
            c[k] = F.mul(acc, den_inv)
        return xs[:prec], c[:prec]
    # points of order 2: t = y - y0, solve for u = x - x0
    R1, R2 = Rs[1], Rs[2]
    L = F.sub(F.mul(a1, y0), R1)
    L_inv = F.inv(L)
    d = [0] * prec
    u2 = [0] * prec
    u3 = [0] * prec
    for k in range(1, prec):
        u2[k] = 0
        for i in range(1, k):
            u2[k] = F.add(u2[k], F.mul(d[i], d[k - i]))
        u3[k] = 0
        for i in range(1, k - 1):
            u3[k] = F.add(u3[k], F.mul(d[i], u2[k - i]))
        rhs = 1 if k == 2 else 0
        rhs = F.add(rhs, F.mul(a1, d[k - 1]))
        rhs = F.sub(rhs, F.mul(R2, u2[k]))
        rhs = F.sub(rhs, u3[k])
        d[k] = F.neg(F.mul(rhs, L_inv))
    xs = [x0] + d[1:]
    ys = [y0, 1] + [0] * max(0, prec - 2)
    return xs[:prec], ys[:prec]


def _series_of(curve, a, b, xs, ys, prec):
    F = curve.field
    sa = _poly_at_series(F, a, xs, prec) if a else [0] * prec
    if not b:
        return sa
    sb = _poly_at_series(F, b, xs, prec)
    return _sadd(F, sa, _smul(F, sb, ys, prec))


def _order(series):
    for i, c in enumerate(series):
        if c:
            return i
    return None


def _local_data(f: CurveFunction, P: CurvePoint):
    """(v_P(f), leading coefficient) at affine P."""
    prec = max(f.weighted_degree(), 2 * P_.deg(f.c)) + 2
    xs, ys = local_expansion(f.curve, P, prec)
    num = _series_of(f.curve, f.a, f.b, xs, ys, prec)
    den = _series_of(f.curve, f.c, (), xs, ys, prec)
    on, od = _order(num), _order(den)
    if on is None or od is None:
        raise AssertionError("series precision too low")  # bound above is exact
    F = f.curve.field
    return on - od, F.div(num[on], den[od])


def valuation(f: CurveFunction, P: CurvePoint) -> int:
    if f.is_zero():
        raise DivisionByZero("valuation of the zero function")
    if P.is_infinity:
        return -f.pole_order_at_infinity()
    return _local_data(f, P)[0]


def evaluate_enc(f: CurveFunction, P: CurvePoint):
    """Value of f at P as an encoding, or None at a pole."""
    F = f.curve.field
    if P.is_infinity:
        if f.is_zero():
            return 0
        v = -f.pole_order_at_infinity()
        if v < 0:
            return None
        if v > 0:
            return 0
        return F.div(f.a[-1], f.c[-1])
    cv = P_.evaluate(F, f.c, P.x)
    nv = F.add(P_.evaluate(F, f.a, P.x), F.mul(P_.evaluate(F, f.b, P.x), P.y))
    if cv:
        return F.div(nv, cv)
    if nv:
        return None
    if f.is_zero():
        return 0
    v, lead = _local_data(f, P)
    if v < 0:
        return None
    return 0 if v > 0 else lead


def evaluate(f: CurveFunction, P: CurvePoint):
    """f(P) as a FieldElement, or ``Pole``."""
    v = evaluate_enc(f, P)
    return Pole if v is None else f.curve.field.decode(v)


def evaluate_points(f: CurveFunction, points) -> np.ndarray:
    """Values at many affine points; -1 marks a pole."""
    F = f.curve.field
    pts = list(points)
    xs = np.array([p.x if p.x is not None else 0 for p in pts], dtype=np.int64)
    ys = np.array([p.y if p.y is not None else 0 for p in pts], dtype=np.int64)
    cv = P_.evaluate_many(F, f.c, xs)
    nv = F.vadd(P_.evaluate_many(F, f.a, xs), F.vmul(P_.evaluate_many(F, f.b, xs), ys))
    out = np.full(len(pts), -1, dtype=np.int64)
    ok = (cv != 0) & (xs >= 0)
    if ok.any():
        out[ok] = F.vmul(nv[ok], F.vinv(cv[ok]))
    for i in np.nonzero(~ok)[0]:
        v = evaluate_enc(f, pts[i])
        out[i] = -1 if v is None else v
    for i, p in enumerate(pts):
        if p.is_infinity:
            v = evaluate_enc(f, p)
            out[i] = -1 if v is None else v
    return out


# --- divisors ------------------------------------------------------------------------------

class Divisor:
    """Finite formal sum of rational points with integer multiplicities."""

    def __init__(self, mults=None):
        self.mults = {P: int(n) for P, n in dict(mults or {}).items() if int(n) != 0}

    @classmethod
    def point(cls, P: CurvePoint, n: int = 1) -> "Divisor":
        return cls({P: n})

    def __add__(self, other):
        out = dict(self.mults)
        for P, n in other.mults.items():
            out[P] = out.get(P, 0) + n
        return Divisor(out)

    def __neg__(self):
        return Divisor({P: -n for P, n in self.mults.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.mults == other.mults

    def __hash__(self):
        return hash(frozenset(self.mults.items()))

    def __getitem__(self, P):
        return self.mults.get(P, 0)

    def __repr__(self):
        terms = " + ".join(f"{n}*{P}" for P, n in sorted(self.mults.items(), key=lambda t: t[0].sort_key()))
        return f"Divisor({terms or '0'})"

    @property
    def degree(self) -> int:
        return sum(self.mults.values())

    @property
    def support(self):
        return sorted(self.mults)

    def positive_part(self) -> "Divisor":
        return Divisor({P: n for P, n in self.mults.items() if n > 0})

    def negative_part(self) -> "Divisor":
        return Divisor({P: -n for P, n in self.mults.items() if n < 0})

    def is_effective(self) -> bool:
        return all(n >= 0 for n in self.mults.values())

    def __ge__(self, other):
        return (self - other).is_effective()

    def to_json(self):
        return [[P.to_json(), n] for P, n in sorted(self.mults.items(), key=lambda t: t[0].sort_key())]


def _affine_zero_divisor(curve, a, b, c=None):
    """Zero divisor of a + b y (or of c when a, b are None) at rational points."""
    F = curve.field
    if a is None:
        N = c
    else:
        N = _norm_poly(curve, a, b)
    out = {}
    for x0 in P_.roots(F, N):
        for y0 in curve.lift_x(x0):
            Q = CurvePoint(x0, y0)
            f = CurveFunction(curve, a, b) if a is not None else CurveFunction(curve, c)
            v = _local_data(f, Q)[0]
            if v:
                out[Q] = v
    return out


def divisor_of(f: CurveFunction) -> Divisor:
    """div(f), restricted to functions whose zeros and poles are all rational."""
    if f.is_zero():
        raise DivisionByZero("divisor of the zero function")
    curve = f.curve
    num = _affine_zero_divisor(curve, f.a, f.b) if f.weighted_degree() > 0 else {}
    den = _affine_zero_divisor(curve, None, None, f.c) if len(f.c) > 1 else {}
    if sum(num.values()) != f.weighted_degree():
        raise NonRationalSupport("numerator has zeros at non-rational points")
    if sum(den.values()) != 2 * P_.deg(f.c):
        raise NonRationalSupport("denominator has zeros at non-rational points")
    D = Divisor(num) - Divisor(den)
    D = D + Divisor.point(INF, -f.pole_order_at_infinity())
    if D.degree != 0:
        raise NonRationalSupport("divisor degree is not zero")
    return D


def abel_sum(curve: WeierstrassCurve, D: Divisor) -> CurvePoint:
    acc = INF
    for P, n in D.mults.items():
        acc = curve.add(acc, curve.mul(n, P))
    return acc


def is_principal(curve: WeierstrassCurve, D: Divisor) -> bool:
    return D.degree == 0 and abel_sum(curve, D).is_infinity


# --- Riemann-Roch bases --------------------------------------------------------------

def rr_monomials(n: int) -> list[tuple[int, int]]:
    """Exponents (i, j) with 2i + 3j <= n, j in {0, 1}, by increasing pole order."""
    out = [(i, j) for j in (0, 1) for i in range(n // 2 + 1) if 2 * i + 3 * j <= n]
    return sorted(out, key=lambda e: 2 * e[0] + 3 * e[1])


def rr_basis_infinity(curve: WeierstrassCurve, n: int) -> list[CurveFunction]:
    """Basis of L(n*INF): the monomials x^i y^j ordered by pole order."""
    if n < 1:
        raise InvalidParameters("n must be >= 1")
    return [CurveFunction.monomial(curve, i, j) for i, j in rr_monomials(n)]


def subgroup_denominator(curve: WeierstrassCurve, G) -> tuple:
    """h(x) = prod over {P, -P} in G minus INF of (x - x_P)."""
    F = curve.field
    xs = sorted({P.x for P in G if not P.is_infinity})
    return P_.from_roots(F, xs)


def rr_basis_subgroup(curve: WeierstrassCurve, G) -> list[CurveFunction]:
    """Basis of L(D_G) for a subgroup G of odd order, D_G = sum of its points."""
    G = list(G)
    m = len(G)
    if m % 2 == 0:
        raise UnsupportedSubgroupOrder(f"|G| = {m} is even")
    if INF not in G:
        raise InvalidParameters("G must contain the identity")
    if m == 1:
        return [CurveFunction.const(curve, 1)]
    h = subgroup_denominator(curve, G)
    F = curve.field
    out = []
    for i, j in rr_monomials(m):
        xi = (0,) * i + (1,)
        out.append(CurveFunction(curve, xi if j == 0 else (), xi if j == 1 else (), h))
    return out


def func_arith(f: CurveFunction, g, kind: str, n: int | None = None) -> CurveFunction:
    if kind == "add":
        return f + g
    if kind == "sub":
        return f - g
    if kind == "mul":
        return f * g
    if kind == "div":
        return f / g
    if kind == "pow":
        return f ** int(n)
    raise InvalidParameters(f"unknown function operation {kind!r}")


# --- principality oracle (linear algebra, no group law) ----------------------------------------------

def _vanishing_function(curve: WeierstrassCurve, A: Divisor) -> CurveFunction:
    """The (unique up to scalar) g in L((deg A + 1) INF) vanishing on the
    effective affine divisor A with its multiplicities."""
    from . import gfla

    F = curve.field
    K = A.degree + 1
    basis = rr_basis_infinity(curve, K)
    rows = []
    for Q, n in sorted(A.mults.items(), key=lambda t: t[0].sort_key()):
        prec = n
        xs, ys = local_expansion(curve, Q, prec)
        cols = [_series_of(curve, e.a, e.b, xs, ys, prec) for e in basis]
        for k in range(prec):
            rows.append([col[k] for col in cols])
    if rows:
        null = gfla.nullspace(F, np.array(rows, dtype=np.int64))
    else:
        null = np.eye(K, dtype=np.int64)
    if null.shape[0] != 1:
        raise AssertionError(f"vanishing space has dimension {null.shape[0]}, expected 1")
    g = CurveFunction.const(curve, 0)
    for coef, e in zip(null[0], basis):
        if coef:
            g = g + e * int(coef)
    return g


def _residual_point(curve: WeierstrassCurve, A: Divisor) -> CurvePoint:
    g = _vanishing_function(curve, A)
    K = A.degree + 1
    Z = divisor_of(g) - A + Divisor.point(INF, K)
    if Z.degree != 1 or not Z.is_effective() or len(Z.mults) != 1:
        raise AssertionError(f"unexpected residual divisor {Z}")
    return Z.support[0]


def is_principal_linear(curve: WeierstrassCurve, D: Divisor) -> bool:
    """Principality decided by Riemann-Roch linear algebra alone.

    With D = A+ - A- + k INF (A+/- affine, effective), let g+ span the
    functions in L((deg A+ + 1) INF) vanishing on A+; its divisor is
    A+ + Z+ - (deg A+ + 1) INF for one point Z+. Define Z- likewise.
    D is principal iff deg D = 0 and Z+ = Z-.
    """
    if D.degree != 0:
        return False
    affine = Divisor({P: n for P, n in D.mults.items() if not P.is_infinity})
    return _residual_point(curve, affine.positive_part()) == _residual_point(curve, affine.negative_part())
