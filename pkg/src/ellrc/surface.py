"""Elliptic surfaces over the affine line, with polynomial Weierstrass coefficients.

The base parameter is ``s``; a fiber over ``gamma`` is the curve with the
coefficients evaluated at ``gamma``.  The point at infinity of the base is the
pole of the base divisor and never used as a fiber.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import poly as P_
from .curve import INF, CurvePoint, TorsionBasis, WeierstrassCurve
from .exceptions import (InvalidParameters, NoGoodPoints, PointNotOnCurve, SectionPoleAtGamma,
                         SingularCurve, SingularFiber, UnsupportedSurfaceMode)
from .field import GF
from .functions import CurveFunction

MODES = ("constant", "config_sections")
_NAMES = ("a1", "a2", "a3", "a4", "a6")


def _as_poly(F: GF, c) -> tuple:
    if isinstance(c, (list, tuple)):
        return P_.norm(F.embed(v) for v in c)
    return P_.const(F.embed(c))


def _rational(F: GF, r):
    """(num, den) from an int, a coefficient list or a pair of lists."""
    if isinstance(r, dict):
        return _as_poly(F, r["num"]), _as_poly(F, r.get("den", [1]))
    return _as_poly(F, r), P_.ONE


@dataclass(frozen=True)
class SectionPoint:
    """A section s -> (x(s), y(s)) with rational coordinates, or the zero section."""

    x: tuple | None = None  # (num, den)
    y: tuple | None = None
    constant: CurvePoint | None = None

    @property
    def is_infinity(self) -> bool:
        return self.x is None and self.constant is None

    @classmethod
    def infinity(cls) -> "SectionPoint":
        return cls()

    @classmethod
    def from_point(cls, P: CurvePoint) -> "SectionPoint":
        if P.is_infinity:
            return cls()
        return cls(x=((P.x,) if P.x else (), P_.ONE), y=((P.y,) if P.y else (), P_.ONE), constant=P)

    @classmethod
    def from_config(cls, F: GF, d) -> "SectionPoint":
        if d in ("inf", None):
            return cls()
        return cls(x=_rational(F, d["x"]), y=_rational(F, d["y"]))

    def to_dict(self):
        if self.is_infinity:
            return "inf"
        return {"x": {"num": list(self.x[0]), "den": list(self.x[1])},
                "y": {"num": list(self.y[0]), "den": list(self.y[1])}}


@dataclass(frozen=True)
class FiberSpec:
    gamma: int
    curve: WeierstrassCurve


@dataclass(frozen=True)
class BaseFunctionSpace:
    """Polynomials in s of degree <= delta, i.e. L(delta * infinity) on the line."""

    delta: int

    @property
    def dimension(self) -> int:
        return self.delta + 1

    @property
    def basis(self) -> list[tuple]:
        return [(0,) * u + (1,) for u in range(self.delta + 1)]

    def evaluate(self, F: GF, gamma: int) -> np.ndarray:
        """Values (1, gamma, ..., gamma^delta)."""
        out = np.ones(self.delta + 1, dtype=np.int64)
        for u in range(1, self.delta + 1):
            out[u] = F.mul(int(out[u - 1]), gamma)
        return out


@dataclass
class SurfaceSpec:
    field: GF
    coeffs: tuple  # five polynomials in s
    mode: str = "constant"
    # m plus two sections generating E[m] over F_q(s); without them each
    # fiber uses its own torsion basis
    torsion: tuple | None = None
    _cache: dict = dc_field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise UnsupportedSurfaceMode(f"unknown mode {self.mode!r}")
        self.coeffs = tuple(P_.norm(c) for c in self.coeffs)
        if self.mode == "constant" and any(P_.deg(c) > 0 for c in self.coeffs):
            raise InvalidParameters("constant mode needs constant coefficients")
        if not self.discriminant():
            raise SingularCurve("discriminant is identically zero")
        if self.torsion is not None:
            m, S1, S2 = self.torsion
            for S in (S1, S2):
                if not section_on_surface(self, S):
                    raise PointNotOnCurve("torsion section does not satisfy the surface equation")

    @classmethod
    def constant(cls, curve: WeierstrassCurve) -> "SurfaceSpec":
        return cls(curve.field, tuple(P_.const(a) for a in curve.a), "constant")

    @classmethod
    def from_config(cls, d) -> "SurfaceSpec":
        F = GF.from_dict(d["field"])
        coeffs = tuple(_as_poly(F, d.get(k, 0)) for k in _NAMES)
        torsion = None
        if "torsion" in d:
            t = d["torsion"]
            torsion = (int(t["m"]), SectionPoint.from_config(F, t["P1"]), SectionPoint.from_config(F, t["P2"]))
        return cls(F, coeffs, d.get("mode", "constant"), torsion)

    def to_dict(self):
        d = {"field": self.field.to_dict(), "mode": self.mode}
        d.update({k: list(c) for k, c in zip(_NAMES, self.coeffs)})
        if self.torsion is not None:
            m, S1, S2 = self.torsion
            d["torsion"] = {"m": m, "P1": S1.to_dict(), "P2": S2.to_dict()}
        return d

    @property
    def is_constant(self) -> bool:
        return self.mode == "constant"

    def discriminant(self) -> tuple:
        """Delta(s) as a polynomial in s."""
        if "disc" not in self._cache:
            F = self.field
            a1, a2, a3, a4, a6 = self.coeffs
            mul = lambda *ps: _pmul_all(F, ps)
            add = lambda *ps: _padd_all(F, ps)
            k = lambda c, p: P_.scale(F, p, F.embed(c))
            b2 = add(mul(a1, a1), k(4, a2))
            b4 = add(k(2, a4), mul(a1, a3))
            b6 = add(mul(a3, a3), k(4, a6))
            b8 = add(mul(a1, a1, a6), k(4, mul(a2, a6)), k(-1, mul(a1, a3, a4)), mul(a2, a3, a3), k(-1, mul(a4, a4)))
            self._cache["disc"] = add(k(-1, mul(b2, b2, b8)), k(-8, mul(b4, b4, b4)), k(-27, mul(b6, b6)),
                                      k(9, mul(b2, b4, b6)))
        return self._cache["disc"]

    def curve_at(self, gamma: int) -> WeierstrassCurve:
        F = self.field
        return WeierstrassCurve.from_encodings(F, [P_.evaluate(F, c, gamma) for c in self.coeffs], check=False)


def _pmul_all(F, ps):
    out = P_.ONE
    for p in ps:
        out = P_.mul(F, out, p)
    return out


def _padd_all(F, ps):
    out = P_.ZERO
    for p in ps:
        out = P_.add(F, out, p)
    return out


def section_on_surface(surface: SurfaceSpec, S: SectionPoint) -> bool:
    """Check the Weierstrass equation identically in s, after clearing denominators."""
    if S.is_infinity:
        return True
    F = surface.field
    a1, a2, a3, a4, a6 = surface.coeffs
    (xn, xd), (yn, yd) = S.x, S.y
    m = lambda *ps: _pmul_all(F, ps)
    xd2, xd3, yd2 = m(xd, xd), m(xd, xd, xd), m(yd, yd)
    lhs = _padd_all(F, [m(yn, yn, xd3), m(a1, xn, yn, xd2, yd), m(a3, yn, xd3, yd)])
    rhs = _padd_all(F, [m(xn, xn, xn, yd2), m(a2, xn, xn, xd, yd2), m(a4, xn, xd2, yd2), m(a6, xd3, yd2)])
    return lhs == rhs


def specialize(surface: SurfaceSpec, gamma: int) -> FiberSpec:
    F = surface.field
    gamma = int(gamma)
    if not 0 <= gamma < F.q:
        raise InvalidParameters(f"base point {gamma} is not a field encoding")
    if P_.evaluate(F, surface.discriminant(), gamma) == 0:
        raise SingularFiber(f"fiber over s={gamma} is singular")
    return FiberSpec(gamma, surface.curve_at(gamma))


def good_points(surface: SurfaceSpec, extra_zero_avoid=(), coefficient_dens=()) -> list[int]:
    """Affine base points with smooth fiber where no supplied function vanishes.

    ``extra_zero_avoid`` are separating functions (polynomials, or (num, den)
    pairs whose zeros and poles are both removed); ``coefficient_dens`` are
    denominators of coefficient functions whose roots are poles.
    """
    F = surface.field
    xs = np.arange(F.q, dtype=np.int64)
    keep = P_.evaluate_many(F, surface.discriminant(), xs) != 0
    M = P_.deg(surface.discriminant())
    for item in extra_zero_avoid:
        parts = item if isinstance(item, tuple) and item and isinstance(item[0], tuple) else (item,)
        for p in parts:
            p = P_.norm(p)
            if not p:
                raise InvalidParameters("separating function is identically zero")
            keep &= P_.evaluate_many(F, p, xs) != 0
            M += P_.deg(p)
    for d in coefficient_dens:
        d = P_.norm(d)
        keep &= P_.evaluate_many(F, d, xs) != 0
        M += P_.deg(d)
    C = [int(g) for g in np.nonzero(keep)[0]]
    if not C:
        raise NoGoodPoints("no good base points", bad_bound=M)
    return C


def specialize_section(surface: SurfaceSpec, S: SectionPoint, gamma: int) -> CurvePoint:
    fiber = specialize(surface, gamma)
    if S.is_infinity:
        return INF
    if surface.is_constant and S.constant is not None:
        return S.constant
    F = surface.field
    vals = []
    for num, den in (S.x, S.y):
        d = P_.evaluate(F, den, fiber.gamma)
        if d == 0:
            raise SectionPoleAtGamma(f"section has a pole at s={fiber.gamma}")
        vals.append(F.div(P_.evaluate(F, num, fiber.gamma), d))
    P = CurvePoint(*vals)
    if not fiber.curve.contains(P):
        raise PointNotOnCurve(f"section does not specialize onto the fiber over s={fiber.gamma}")
    return P


def fiber_torsion_basis(surface: SurfaceSpec, gamma: int, m: int) -> TorsionBasis:
    """Torsion basis on the fiber: specialized sections, or the curve's own basis."""
    fiber = specialize(surface, gamma)
    if surface.torsion is None:
        return fiber.curve.torsion_basis(m)
    tm, S1, S2 = surface.torsion
    if tm != m:
        raise InvalidParameters(f"configured sections have order {tm}, not {m}")
    # build() rejects a non-injective specialization (dependent or wrong-order images)
    return TorsionBasis.build(fiber.curve, m, specialize_section(surface, S1, gamma),
                              specialize_section(surface, S2, gamma))


def base_rr_space(delta: int) -> BaseFunctionSpace:
    if delta < 0:
        raise InvalidParameters("delta must be >= 0")
    return BaseFunctionSpace(delta)


@dataclass
class SurfaceFunction:
    """sum over (i, j) of b_ij(s) x^i y^j, with b_ij polynomials in s."""

    surface: SurfaceSpec
    terms: dict  # (i, j) -> poly in s

    def restrict(self, gamma: int) -> CurveFunction:
        F = self.surface.field
        E = specialize(self.surface, gamma).curve
        out = CurveFunction.const(E, 0)
        for (i, j), b in self.terms.items():
            c = P_.evaluate(F, b, gamma)
            if c:
                out = out + CurveFunction.monomial(E, i, j) * CurveFunction.const(E, c)
        return out

    def evaluate(self, gamma: int, S: SectionPoint) -> int:
        """Coefficients at gamma first, then the monomials at the specialized point."""
        F = self.surface.field
        P = specialize_section(self.surface, S, gamma)
        acc = 0
        for (i, j), b in self.terms.items():
            term = F.mul(P_.evaluate(F, b, gamma), F.mul(F.pow(P.x, i), F.pow(P.y, j)))
            acc = F.add(acc, term)
        return acc


def twisted_family(curve: WeierstrassCurve, u, m: int) -> SurfaceSpec:
    """Nonconstant surface y^2 = x^3 + a4 u^4 x + a6 u^6 with torsion sections.

    The substitution (x, y) -> (u^2 x, u^3 y) carries a torsion basis of the
    short Weierstrass ``curve`` to sections of the family; fibers with u = 0
    are singular.
    """
    F = curve.field
    a1, a2, a3, a4, a6 = curve.a
    if a1 or a2 or a3:
        raise InvalidParameters("twisted_family needs a short Weierstrass curve")
    u = _as_poly(F, u)
    u2, u3 = P_.power(F, u, 2), P_.power(F, u, 3)
    coeffs = ((), (), (), P_.scale(F, P_.power(F, u, 4), a4), P_.scale(F, P_.power(F, u, 6), a6))
    B = curve.torsion_basis(m)
    secs = [SectionPoint(x=(P_.scale(F, u2, P.x), P_.ONE), y=(P_.scale(F, u3, P.y), P_.ONE)) for P in (B.P1, B.P2)]
    return SurfaceSpec(F, coeffs, "config_sections", (m, secs[0], secs[1]))
