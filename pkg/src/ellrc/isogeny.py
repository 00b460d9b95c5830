"""Separable isogenies with odd rational kernel, via Velu's formulas.

For a kernel G of odd order, pick one point Q from each pair {Q, -Q} in
G minus the identity and set

    gx_Q = 3 x_Q^2 + 2 a2 x_Q + a4 - a1 y_Q,   gy_Q = -2 y_Q - a1 x_Q - a3,
    v_Q  = 2 gx_Q - a1 gy_Q,                   u_Q  = gy_Q^2,
    v = sum v_Q,   w = sum (u_Q + x_Q v_Q).

The codomain keeps a1, a2, a3 and has A4 = a4 - 5v, A6 = a6 - b2 v - 7w.
"""

from __future__ import annotations

import numpy as np

from . import poly as P_
from .curve import INF, CurvePoint, WeierstrassCurve
from .exceptions import CurveMismatch, InvalidParameters, PointNotOnCurve, TorsionNotRational, UnsupportedSubgroupOrder
from .functions import CurveFunction


class QuotientIsogeny:
    """phi: domain -> codomain = domain / kernel."""

    def __init__(self, domain: WeierstrassCurve, kernel, codomain: WeierstrassCurve, terms):
        self.domain = domain
        self.codomain = codomain
        self.kernel = sorted(kernel)
        self._kernel_set = frozenset(self.kernel)
        self.terms = terms  # per representative: (xQ, yQ, gxQ, gyQ, vQ, uQ)

    @property
    def degree(self) -> int:
        return len(self.kernel)

    def __repr__(self):
        return f"QuotientIsogeny(degree={self.degree}, codomain={self.codomain!r})"

    # point maps ----------------------------------------------------------------------
    def push(self, P: CurvePoint) -> CurvePoint:
        if P.is_infinity or P in self._kernel_set:
            return INF
        E = self.domain
        F = E.field
        a1, a3 = E.a1, E.a3
        x, y = P.x, P.y
        X, Y = x, y
        t = F.add(F.add(F.mul(2, y), F.mul(a1, x)), a3)
        for xQ, yQ, gxQ, gyQ, vQ, uQ in self.terms:
            d = F.sub(x, xQ)
            di = F.inv(d)
            di2 = F.mul(di, di)
            di3 = F.mul(di2, di)
            X = F.add(X, F.add(F.mul(vQ, di), F.mul(uQ, di2)))
            term = F.mul(F.mul(uQ, t), di3)
            term = F.add(term, F.mul(F.mul(vQ, F.add(F.mul(a1, d), F.sub(y, yQ))), di2))
            term = F.add(term, F.mul(F.sub(F.mul(a1, uQ), F.mul(gxQ, gyQ)), di2))
            Y = F.sub(Y, term)
        return CurvePoint(X, Y)

    def push_many(self, points) -> list[CurvePoint]:
        """Vectorized :meth:`push` over a list of points."""
        pts = list(points)
        if not pts:
            return []
        E = self.domain
        F = E.field
        in_ker = np.array([P.is_infinity or P in self._kernel_set for P in pts])
        x = np.array([0 if P.is_infinity else P.x for P in pts], dtype=np.int64)
        y = np.array([0 if P.is_infinity else P.y for P in pts], dtype=np.int64)
        X, Y = x.copy(), y.copy()
        a1, a3 = E.a1, E.a3
        t = F.vadd(F.vmul(y, 2), F.vadd(F.vmul(np.full_like(x, a1), x), a3))
        for xQ, yQ, gxQ, gyQ, vQ, uQ in self.terms:
            d = F.vsub(x, xQ)
            d = np.where(in_ker, 1, d)
            di = F.vinv(d)
            di = np.where(in_ker, 0, di)
            di2 = F.vmul(di, di)
            di3 = F.vmul(di2, di)
            X = F.vadd(X, F.vadd(F.vmul(di, vQ), F.vmul(di2, uQ)))
            term = F.vmul(F.vmul(t, uQ), di3)
            inner = F.vadd(F.vmul(d, a1), F.vsub(y, yQ))
            term = F.vadd(term, F.vmul(F.vmul(inner, vQ), di2))
            term = F.vadd(term, F.vmul(di2, F.sub(F.mul(a1, uQ), F.mul(gxQ, gyQ))))
            Y = F.vsub(Y, term)
        return [INF if k else CurvePoint(int(a), int(b)) for k, a, b in zip(in_ker, X, Y)]

    # rational maps -----------------------------------------------------------------------
    @property
    def maps(self) -> tuple[CurveFunction, CurveFunction]:
        if not hasattr(self, "_maps"):
            self._maps = _velu_maps(self.domain, self.terms)
        return self._maps

    def to_dict(self):
        X, Y = self.maps
        return {
            "domain": self.domain.to_dict(),
            "codomain": self.codomain.to_dict(),
            "kernel": [P.to_json() for P in self.kernel],
            "maps": {"X": X.to_dict(), "Y": Y.to_dict()},
        }


def _representatives(E: WeierstrassCurve, G):
    seen, reps = set(), []
    for Q in sorted(G):
        if Q.is_infinity or Q in seen:
            continue
        seen.add(Q)
        seen.add(E.neg(Q))
        reps.append(Q)
    return reps


def quotient_by(curve: WeierstrassCurve, G) -> QuotientIsogeny:
    """Velu quotient of ``curve`` by the odd-order subgroup ``G``."""
    G = sorted(set(G))
    m = len(G)
    if m % 2 == 0:
        raise UnsupportedSubgroupOrder(f"|G| = {m} is even")
    if INF not in G:
        raise InvalidParameters("G must contain the identity")
    for P in G:
        if not curve.contains(P):
            raise PointNotOnCurve(f"{P} is not on the domain curve")
    Gs = set(G)
    for P in G:
        for Q in G:
            if curve.add(P, Q) not in Gs:
                raise InvalidParameters("G is not closed under addition")
    F = curve.field
    a1, a2, a3, a4, a6 = curve.a
    terms = []
    v = w = 0
    for Q in _representatives(curve, G):
        xQ, yQ = Q.x, Q.y
        gx = F.sub(F.add(F.add(F.mul(3, F.mul(xQ, xQ)), F.mul(F.mul(2, a2), xQ)), a4), F.mul(a1, yQ))
        gy = F.sub(F.sub(F.neg(F.mul(2, yQ)), F.mul(a1, xQ)), a3)
        vQ = F.sub(F.mul(2, gx), F.mul(a1, gy))
        uQ = F.mul(gy, gy)
        v = F.add(v, vQ)
        w = F.add(w, F.add(uQ, F.mul(xQ, vQ)))
        terms.append((xQ, yQ, gx, gy, vQ, uQ))
    b2 = F.add(F.mul(a1, a1), F.mul(4, a2))
    A4 = F.sub(a4, F.mul(5, v))
    A6 = F.sub(F.sub(a6, F.mul(b2, v)), F.mul(7, w))
    codomain = WeierstrassCurve.from_encodings(F, (a1, a2, a3, A4, A6))
    return QuotientIsogeny(curve, G, codomain, terms)


def push_point(iso: QuotientIsogeny, P: CurvePoint) -> CurvePoint:
    if not iso.domain.contains(P):
        raise PointNotOnCurve(f"{P} is not on the domain curve")
    return iso.push(P)


def _merge(F, fracs):
    """Sum of fractions (num, den) with pairwise coprime dens, no reduction."""
    if not fracs:
        return (), (1,)
    while len(fracs) > 1:
        nxt = []
        for i in range(0, len(fracs) - 1, 2):
            (n1, d1), (n2, d2) = fracs[i], fracs[i + 1]
            nxt.append((P_.add(F, P_.mul(F, n1, d2), P_.mul(F, n2, d1)), P_.mul(F, d1, d2)))
        if len(fracs) % 2:
            nxt.append(fracs[-1])
        fracs = nxt
    return fracs[0]


def _velu_maps(E: WeierstrassCurve, terms):
    F = E.field
    a1, a3 = E.a1, E.a3
    if not terms:
        return CurveFunction.x(E), CurveFunction.y(E)
    xfr, yb, ya = [], [], []
    for xQ, yQ, gx, gy, vQ, uQ in terms:
        lin = (F.neg(xQ), 1)
        l2 = P_.mul(F, lin, lin)
        l3 = P_.mul(F, l2, lin)
        # X: v/(x-xQ) + u/(x-xQ)^2
        xfr.append((P_.add(F, P_.scale(F, lin, vQ), P_.const(uQ)), l2))
        # y-coefficient of Y - y: -(2u/(x-xQ)^3 + v/(x-xQ)^2)
        yb.append((P_.neg(F, P_.add(F, P_.const(F.mul(2, uQ)), P_.scale(F, lin, vQ))), l3))
        # remaining part: -(u(a1 x + a3)/(x-xQ)^3 + (v(a1 (x-xQ) - yQ) + a1 u - gx gy)/(x-xQ)^2)
        s = P_.norm((a3, a1))
        part2 = P_.add(F, P_.scale(F, lin, F.mul(vQ, a1)), P_.const(F.sub(F.sub(F.mul(a1, uQ), F.mul(gx, gy)), F.mul(vQ, yQ))))
        num = P_.add(F, P_.scale(F, s, uQ), P_.mul(F, part2, lin))
        ya.append((P_.neg(F, num), l3))
    nx, dx = _merge(F, xfr)
    X = CurveFunction(E, P_.add(F, P_.mul(F, P_.X, dx), nx), (), dx)
    nb, d3 = _merge(F, yb)
    na, d3b = _merge(F, ya)
    assert d3 == d3b
    Y = CurveFunction(E, na, P_.add(F, d3, nb), d3)
    return X, Y


def pullback_function(iso: QuotientIsogeny, h: CurveFunction) -> CurveFunction:
    """h o phi as a function on the domain."""
    if h.curve != iso.codomain:
        raise CurveMismatch("function does not live on the codomain")
    E = iso.domain
    F = E.field
    X, Y = iso.maps
    # X = NX / DX is a pure x-function
    NX, DX = X.a, X.c

    def homog(p):
        d = P_.deg(p)
        if d < 0:
            return CurveFunction.const(E, 0)
        num = ()
        for i, c in enumerate(p):
            if c:
                term = P_.mul(F, P_.power(F, NX, i), P_.power(F, DX, d - i))
                num = P_.add(F, num, P_.scale(F, term, c))
        return CurveFunction(E, num, (), P_.power(F, DX, d))

    A, B, C = homog(h.a), homog(h.b), homog(h.c)
    return (A + B * Y) / C


def compose(iso2: QuotientIsogeny, iso1: QuotientIsogeny) -> QuotientIsogeny:
    """iso2 o iso1, realized as the Velu quotient by the composite kernel."""
    if iso1.codomain != iso2.domain:
        raise CurveMismatch("codomain of the first map is not the domain of the second")
    E = iso1.domain
    K2 = set(iso2.kernel)
    pts = E.points()
    images = iso1.push_many(pts)
    kernel = [P for P, Q in zip(pts, images) if Q in K2]
    if len(kernel) != iso1.degree * iso2.degree:
        raise TorsionNotRational("composite kernel is not fully rational")
    out = quotient_by(E, kernel)
    if out.codomain != iso2.codomain:
        raise AssertionError("composite codomain differs from the normalized quotient")
    return out


def identity_isogeny(curve: WeierstrassCurve) -> QuotientIsogeny:
    return quotient_by(curve, [INF])
