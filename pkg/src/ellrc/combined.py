"""Two-level hierarchy with availability (2, 2) from E[m] = E[v] x E[w].

With torsion generators p_v1, p_v2 (order v) and p_w1, p_w2 (order w), a
coordinate p lies in two middle sets, its H_w1- and H_w2-cosets
(H_wi = E[v] x <p_wi>), and inside them in two lower sets, its G_v1- and
G_v2-cosets.  Coordinates are flattened in (i, b1, b2, a1, a2) order for the
point p_i + a1 p_v1 + a2 p_v2 + b1 p_w1 + b2 p_w2.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass

import numpy as np

from . import gfla
from .curve import CurvePoint, WeierstrassCurve
from .exceptions import (InsufficientPoints, InvalidParameters, PrimitiveSearchFailed, TorsionNotRational,
                         UnsupportedSurfaceMode)
from .functions import evaluate_points, rr_basis_infinity, rr_basis_subgroup
from .hierarchical import _search, lift_rows, max_fiber_multiplicity
from .isogeny import QuotientIsogeny, compose, quotient_by
from .lrc import LinearCode, RecoveryLevel, RecoveryStructure
from .surface import SurfaceSpec, specialize


@dataclass
class TorsionDecomposition:
    curve: WeierstrassCurve
    v: int
    w: int
    p_v: tuple
    p_w: tuple
    G_v: tuple  # (G_v1, G_v2)
    G_w: tuple
    E_v: list  # E[v]
    H_w: tuple  # (H_w1, H_w2)

    @property
    def m(self) -> int:
        return self.v * self.w


def decomposition(curve: WeierstrassCurve, v: int, w: int, basis=None) -> TorsionDecomposition:
    if v < 3 or w < 3 or v % 2 == 0 or w % 2 == 0 or math.gcd(v, w) != 1:
        raise InvalidParameters("v and w must be odd, coprime and > 1")
    m = v * w
    basis = basis or curve.torsion_basis(m)
    if basis.m != m:
        raise InvalidParameters(f"torsion basis has order {basis.m}, not {m}")
    P1, P2 = basis.P1, basis.P2
    p_v = (curve.mul(w, P1), curve.mul(w, P2))
    p_w = (curve.mul(v, P1), curve.mul(v, P2))
    G_v = tuple(sorted(curve.multiples(P)) for P in p_v)
    G_w = tuple(sorted(curve.multiples(P)) for P in p_w)
    E_v = curve.subgroup(p_v)
    H_w = tuple(curve.subgroup(list(p_v) + [P]) for P in p_w)
    if len(E_v) != v * v or any(len(H) != v * v * w for H in H_w):
        raise TorsionNotRational("generators are not independent")
    return TorsionDecomposition(curve, v, w, p_v, p_w, G_v, G_w, E_v, H_w)


@dataclass
class QuotientDiagram:
    dec: TorsionDecomposition
    phi_v: tuple  # E -> E_v,i
    psi_vi: tuple  # E_v,i -> E_v
    psi_v: QuotientIsogeny  # E -> E_v
    phi_w: tuple  # E_v -> E_w,i
    psi_w: QuotientIsogeny  # E_v -> E_m
    psi_m: QuotientIsogeny  # E -> E_m

    @property
    def curves(self) -> dict:
        return {"E_v1": self.phi_v[0].codomain, "E_v2": self.phi_v[1].codomain, "E_v": self.psi_v.codomain,
                "E_w1": self.phi_w[0].codomain, "E_w2": self.phi_w[1].codomain, "E_m": self.psi_m.codomain}

    @property
    def isogenies(self) -> dict:
        return {"phi_v1": self.phi_v[0], "phi_v2": self.phi_v[1], "psi_v1": self.psi_vi[0],
                "psi_v2": self.psi_vi[1], "psi_v": self.psi_v, "phi_w1": self.phi_w[0],
                "phi_w2": self.phi_w[1], "psi_w": self.psi_w, "psi_m": self.psi_m}

    def to_dict(self):
        return {name: E.to_dict() for name, E in self.curves.items()}


def build_diagram(curve: WeierstrassCurve, dec: TorsionDecomposition) -> QuotientDiagram:
    E = curve
    pts = E.points()
    phi_v = tuple(quotient_by(E, G) for G in dec.G_v)
    psi_v = quotient_by(E, dec.E_v)
    psi_vi = []
    for i in range(2):
        other = dec.G_v[1 - i]
        psi_vi.append(quotient_by(phi_v[i].codomain, sorted(set(phi_v[i].push_many(other)))))
        # E/E[v] reached through E_v,i is the same normalized quotient
        if compose(psi_vi[i], phi_v[i]).codomain != psi_v.codomain:
            raise AssertionError("square does not close on E_v")
        if psi_vi[i].push_many(phi_v[i].push_many(pts)) != psi_v.push_many(pts):
            raise AssertionError("square does not commute pointwise")
    Ev = psi_v.codomain
    phi_w = tuple(quotient_by(Ev, sorted(set(psi_v.push_many(G)))) for G in dec.G_w)
    for i in range(2):
        if set(compose(phi_w[i], psi_v).kernel) != set(dec.H_w[i]):
            raise AssertionError("E_w,i is not the quotient by H_w,i")
    Ew = sorted(set(psi_v.push_many(E.subgroup(dec.p_w))))
    psi_w = quotient_by(Ev, Ew)
    psi_m = compose(psi_w, psi_v)
    if len(psi_m.kernel) != dec.m**2:
        raise TorsionNotRational("kernel of psi_m is not E[m]")
    return QuotientDiagram(dec, phi_v, tuple(psi_vi), psi_v, phi_w, psi_w, psi_m)


@dataclass
class ComboEvaluation:
    S: list
    anchors: list
    points: list
    shape: tuple  # (ell, w, w, v, v)

    @property
    def ell(self) -> int:
        return len(self.S)

    def index(self) -> np.ndarray:
        return np.arange(len(self.points)).reshape(self.shape)


def choose_evaluation(diagram: QuotientDiagram, ell: int, seed: int = 0) -> ComboEvaluation:
    if ell < 1:
        raise InvalidParameters("ell must be >= 1")
    dec = diagram.dec
    E = dec.curve
    pts = E.points()
    rep = {}
    for P, Q in zip(pts, diagram.psi_m.push_many(pts)):
        if not Q.is_infinity:
            rep.setdefault(Q, P)
    cands = sorted(rep)
    if len(cands) < ell:
        raise InsufficientPoints(f"only {len(cands)} points of E_m have rational fibers, need {ell}")
    S = sorted(random.Random(seed).sample(cands, ell))
    v, w = dec.v, dec.w
    out = []
    for Q in S:
        p = rep[Q]
        for b1 in range(w):
            for b2 in range(w):
                pb = E.add(E.add(p, E.mul(b1, dec.p_w[0])), E.mul(b2, dec.p_w[1]))
                for a1 in range(v):
                    for a2 in range(v):
                        out.append(E.add(E.add(pb, E.mul(a1, dec.p_v[0])), E.mul(a2, dec.p_v[1])))
    return ComboEvaluation(S, [rep[Q] for Q in S], out, (ell, w, w, v, v))


@dataclass
class FunctionQuadruple:
    values: dict  # name -> values on T
    coeffs: dict
    certificate: dict

    def to_dict(self):
        return {"values": {k: v.tolist() for k, v in self.values.items()},
                "coeffs": {k: v.tolist() for k, v in self.coeffs.items()}, "certificate": self.certificate}


def search_quadruple(diagram: QuotientDiagram, ev: ComboEvaluation, seed: int = 0,
                     budget: int = 200_000) -> FunctionQuadruple:
    dec = diagram.dec
    F = dec.curve.field
    v, w, ell = dec.v, dec.w, ev.ell
    idx = ev.index()
    margin = ell * max(math.comb(v, 2), math.comb(w, 2))
    feas = {"q": F.q, "ell": ell, "margin": margin, "q_over_margin": F.q / margin}
    rng = np.random.default_rng(seed)
    psi_v_T = diagram.psi_v.push_many(ev.points)
    # (name, domain map image of T, kernel image, representative selection with the separated axis last)
    specs = [
        ("f1", diagram.phi_v[0].push_many(ev.points), diagram.phi_v[0].push_many(dec.G_v[1]),
         idx[:, :, :, 0, :]),
        ("f2", diagram.phi_v[1].push_many(ev.points), diagram.phi_v[1].push_many(dec.G_v[0]),
         idx[:, :, :, :, 0]),
        ("g1", diagram.phi_w[0].push_many(psi_v_T), diagram.phi_w[0].push_many(diagram.psi_v.push_many(dec.G_w[1])),
         idx[:, 0, :, 0, 0]),
        ("g2", diagram.phi_w[1].push_many(psi_v_T), diagram.phi_w[1].push_many(diagram.psi_v.push_many(dec.G_w[0])),
         idx[:, :, 0, 0, 0]),
    ]
    # constancy: the pullback is invariant under the kernel of the map it comes through
    constant_axes = {"f1": (3,), "f2": (4,), "g1": (1, 3, 4), "g2": (2, 3, 4)}
    values, coeffs, cert = {}, {}, {"seed": seed, "feasibility": feas}
    for name, image, kernel_img, sel in specs:
        curve = _curve_of(diagram, name)
        B = np.array([evaluate_points(f, image) for f in rr_basis_subgroup(curve, sorted(set(kernel_img)))])
        size = sel.shape[-1]
        c, vals, tries = _search(F, B, sel.size // size, size, rng, budget, select=sel.ravel())
        if c is None:
            raise PrimitiveSearchFailed(f"no separating {name} within {budget} candidates", feasibility=feas)
        cube = vals.reshape(ev.shape)
        for ax in constant_axes[name]:
            if not (cube == np.take(cube, [0], axis=ax)).all():
                raise AssertionError(f"{name} is not constant along the kernel directions")
        values[name], coeffs[name] = vals, c
        cert[name] = {"candidates": int(tries), "separates": True,
                      "distinct_per_group": size, "max_multiplicity_on_T_fibers": max_fiber_multiplicity(vals, ell)}
    return FunctionQuadruple(values, coeffs, cert)


def _curve_of(diagram: QuotientDiagram, name: str) -> WeierstrassCurve:
    return {"f1": diagram.phi_v[0].codomain, "f2": diagram.phi_v[1].codomain,
            "g1": diagram.phi_w[0].codomain, "g2": diagram.phi_w[1].codomain}[name]


def _powers(F, x: np.ndarray, top: int) -> list:
    out = [np.ones_like(x)]
    for _ in range(top):
        out.append(F.vmul(out[-1], x))
    return out


def combo_rows(F, hv, quad: FunctionQuadruple, v: int, w: int) -> np.ndarray:
    P = {k: _powers(F, quad.values[k], max(v, w) - 2) for k in quad.values}
    rows = []
    for h in hv:
        for a1 in range(v - 1):
            for a2 in range(v - 1):
                fa = F.vmul(F.vmul(h, P["f1"][a1]), P["f2"][a2])
                for b1 in range(w - 1):
                    for b2 in range(w - 1):
                        rows.append(F.vmul(F.vmul(fa, P["g1"][b1]), P["g2"][b2]))
    return np.array(rows, dtype=np.int64)


def _combo_levels(ev: ComboEvaluation, offset: int = 0) -> list[RecoveryLevel]:
    idx = ev.index() + offset
    ell, w, _, v, _ = ev.shape
    # H_w1-coset: b1, a1, a2 vary; H_w2-coset: b2, a1, a2 vary
    h1 = [idx[i, :, b2].ravel() for i in range(ell) for b2 in range(w)]
    h2 = [idx[i, b1].ravel() for i in range(ell) for b1 in range(w)]
    g1 = [idx[i, b1, b2, :, a2] for i in range(ell) for b1 in range(w) for b2 in range(w) for a2 in range(v)]
    g2 = [idx[i, b1, b2, a1, :] for i in range(ell) for b1 in range(w) for b2 in range(w) for a1 in range(v)]
    n1 = v * v * w
    return [
        RecoveryLevel("H_w_coset", h1 + h2, rho=8, availability=2, strict=False,
                      params={"n1": n1, "k1": (v - 1) ** 2 * (w - 1), "d1_floor": 8, "overlap": v * v}),
        RecoveryLevel("G_v_coset", g1 + g2, rho=2, availability=2, strict=True,
                      params={"n2": v, "k2": v - 1, "d2": 2}),
    ]


@dataclass
class ComboBuild:
    code: LinearCode
    structure: RecoveryStructure
    diagram: QuotientDiagram
    evaluation: ComboEvaluation
    quadruple: FunctionQuadruple
    t: int

    def __iter__(self):
        return iter((self.code, self.structure))


def build_combo_code_curve(diagram: QuotientDiagram, ev: ComboEvaluation, quad: FunctionQuadruple, t: int) -> ComboBuild:
    dec = diagram.dec
    v, w, ell = dec.v, dec.w, ev.ell
    if not 0 < t <= ell:
        raise InvalidParameters(f"need 0 < t <= ell = {ell}, got t = {t}")
    floor = 16 * (ell - t)
    if floor <= 0:
        warnings.warn("distance floor is vacuous at t = ell; it will not be asserted", stacklevel=2)
    F = dec.curve.field
    Em = diagram.psi_m.codomain
    image = diagram.psi_m.push_many(ev.points)
    basis = rr_basis_infinity(Em, t)
    hv = np.array([evaluate_points(h, image) for h in basis])
    G = combo_rows(F, hv, quad, v, w)
    k_claim = t * (v - 1) ** 2 * (w - 1) ** 2
    k = gfla.rank(F, G)
    if k != k_claim:
        raise InvalidParameters(f"rank {k} differs from t (v-1)^2 (w-1)^2 = {k_claim}")
    n = ell * dec.m**2
    meta = {
        "construction": "combined", "v": v, "w": w, "m": dec.m, "ell": ell, "t": t,
        "diagram": diagram.to_dict(), "S": [P.to_json() for P in ev.S],
        "h_pole_orders": [h.pole_order_at_infinity() for h in basis],
        "claimed": {"n": n, "k": k_claim, "n1": v * v * w, "k1": (v - 1) ** 2 * (w - 1), "d1_floor": 8,
                    "n2": v, "k2": v - 1, "d2": 2, "d_floor": floor if floor > 0 else None,
                    "middle_overlap": v * v},
        "certificate": quad.certificate,
    }
    code = LinearCode(F, G, [(P.x, P.y) for P in ev.points], meta)
    return ComboBuild(code, RecoveryStructure(n, _combo_levels(ev)), diagram, ev, quad, t)


def build_combo_code_surface(surface: SurfaceSpec, curve_build: ComboBuild, fibers, delta: int) -> ComboBuild:
    if not surface.is_constant:
        raise UnsupportedSurfaceMode("the quotient-diagram lift is implemented for constant surfaces")
    fibers = [int(g) for g in fibers]
    Nc = len(fibers)
    if not 0 <= delta < Nc:
        raise InvalidParameters(f"need 0 <= delta < |C'| = {Nc}")
    E = curve_build.diagram.dec.curve
    for g in fibers:
        if specialize(surface, g).curve != E:
            raise InvalidParameters(f"fiber over s={g} is not the diagram's curve")
    F = surface.field
    base = curve_build.code
    G = lift_rows(F, base.generator, fibers, delta)
    k = gfla.rank(F, G)
    if k != (delta + 1) * base.k:
        raise InvalidParameters(f"rank {k} differs from (delta + 1) k = {(delta + 1) * base.k}")
    n1 = base.n
    claimed = dict(base.metadata["claimed"])
    fiber_floor = claimed["d_floor"]
    levels = [RecoveryLevel("fiber", [range(i * n1, (i + 1) * n1) for i in range(Nc)], rho=fiber_floor or 2,
                            params={"n": n1, "k": base.k, "d_floor": fiber_floor})]
    inner = [_combo_levels(curve_build.evaluation, i * n1) for i in range(Nc)]
    for j in range(2):
        L0 = inner[0][j]
        levels.append(RecoveryLevel(L0.name, [J for blk in inner for J in blk[j].sets], L0.rho,
                                    L0.availability, L0.strict, L0.params))
    meta = dict(base.metadata)
    meta.update({
        "construction": "combined_surface", "fibers": fibers, "delta": delta, "mode": surface.mode,
        "claimed": {**claimed, "n": Nc * n1, "k": (delta + 1) * base.k, "fiber_d_floor": fiber_floor,
                    "d_floor": (Nc - delta) * fiber_floor if fiber_floor else None},
    })
    labels = [(g,) + lb for g in fibers for lb in base.labels]
    code = LinearCode(F, G, labels, meta)
    return ComboBuild(code, RecoveryStructure(Nc * n1, levels), curve_build.diagram, curve_build.evaluation,
                      curve_build.quadruple, curve_build.t)
