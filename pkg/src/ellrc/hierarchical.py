"""Hierarchical codes from the quotient chain E -> E/G1 -> E/E[m].

Coordinates are the points of l full E[m]-cosets.  Inside each coset the
middle code lives in span{g^j f^h}; g is pulled back from E/G1 and so is
constant on G1-cosets, which leaves the single-parity-check lower codes
span{f^h} on each G1-coset.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import gfla
from .curve import INF, CurvePoint, TorsionBasis, WeierstrassCurve
from .exceptions import (InsufficientPoints, InvalidParameters, PrimitiveSearchFailed, TorsionNotRational,
                         UnsupportedSurfaceMode)
from .functions import CurveFunction, evaluate_points, rr_basis_infinity, rr_basis_subgroup
from .isogeny import QuotientIsogeny, compose, pullback_function, quotient_by
from .lrc import LinearCode, RecoveryLevel, RecoveryStructure
from .surface import SurfaceSpec, base_rr_space, good_points, specialize

BATCH = 4096


@dataclass
class QuotientChain:
    curve: WeierstrassCurve
    basis: TorsionBasis
    G1: list
    G2: list  # on E1
    phi1: QuotientIsogeny
    phi2: QuotientIsogeny
    psi: QuotientIsogeny

    @property
    def m(self) -> int:
        return self.basis.m

    def to_dict(self):
        return {"curve": self.curve.to_dict(), "basis": self.basis.to_dict(),
                "E1": self.phi1.codomain.to_dict(), "E2": self.psi.codomain.to_dict()}


def build_chain(curve: WeierstrassCurve, basis: TorsionBasis | None = None, m: int | None = None) -> QuotientChain:
    if basis is None:
        if m is None:
            raise InvalidParameters("give a torsion basis or m")
        basis = curve.torsion_basis(m)
    m = basis.m
    if m % 2 == 0:
        raise InvalidParameters("m must be odd")
    G1 = curve.multiples(basis.P1)
    phi1 = quotient_by(curve, G1)
    m2bar = phi1.push(basis.P2)
    E1 = phi1.codomain
    G2 = E1.multiples(m2bar)
    if len(G2) != m:
        raise TorsionNotRational(f"image of the second basis point has order {len(G2)}, not {m}")
    phi2 = quotient_by(E1, G2)
    psi = compose(phi2, phi1)
    kernel = set(psi.kernel)
    if kernel != set(basis.points):
        raise TorsionNotRational("kernel of the composite is not E[m]")
    return QuotientChain(curve, basis, sorted(G1), sorted(G2), phi1, phi2, psi)


@dataclass
class Evaluation:
    """T as l psi-fibers p_i + b*m2 + a*m1, flattened in (i, b, a) order."""

    S: list  # points of E2
    anchors: list  # p_i on E
    points: list

    @property
    def ell(self) -> int:
        return len(self.S)


def choose_evaluation(chain: QuotientChain, ell: int, seed: int = 0) -> Evaluation:
    if ell < 1:
        raise InvalidParameters("ell must be >= 1")
    E = chain.curve
    pts = E.points()
    images = chain.psi.push_many(pts)
    fiber_rep = {}
    for P, Q in zip(pts, images):
        if not Q.is_infinity:
            fiber_rep.setdefault(Q, P)
    candidates = sorted(fiber_rep)
    if len(candidates) < ell:
        raise InsufficientPoints(f"only {len(candidates)} points of E2 have rational fibers, need {ell}")
    S = sorted(random.Random(seed).sample(candidates, ell))
    m = chain.m
    out, anchors = [], []
    for Q in S:
        p = fiber_rep[Q]
        anchors.append(p)
        for b in range(m):
            for a in range(m):
                out.append(E.add(p, chain.basis.point(a, b)))
    return Evaluation(S, anchors, out)


def separation_feasibility(q: int, m: int, ell: int) -> dict:
    lhs = q**m - 1
    rhs = ell * q ** (m - 1) * math.comb(m * m, 2)
    return {"q": q, "m": m, "ell": ell, "holds": lhs > rhs, "lhs": str(lhs), "rhs": str(rhs)}


def _separates(values: np.ndarray, groups: int, size: int) -> np.ndarray:
    """Rows of ``values`` (batch x groups*size) injective on every group."""
    v = np.sort(values.reshape(values.shape[0], groups, size), axis=2)
    return ~(v[:, :, 1:] == v[:, :, :-1]).any(axis=(1, 2))


def _search(F, B: np.ndarray, groups: int, size: int, rng: np.random.Generator, budget: int, select=None):
    """Random combinations of the rows of B whose values separate each group."""
    tried = 0
    while tried < budget:
        nb = min(BATCH, budget - tried)
        coef = rng.integers(0, F.q, size=(nb, B.shape[0]), dtype=np.int64)
        vals = gfla.matmul(F, coef, B)
        probe = vals if select is None else vals[:, select]
        ok = np.nonzero(_separates(probe, groups, size))[0]
        tried += nb
        if ok.size:
            i = int(ok[0])
            return coef[i], vals[i], tried - nb + i + 1
    return None, None, tried


@dataclass
class PrimitivePair:
    f_coeffs: np.ndarray
    g_coeffs: np.ndarray
    f_values: np.ndarray  # on T
    g_values: np.ndarray
    certificate: dict
    _chain: QuotientChain = dc_field(repr=False, default=None)

    def f_function(self) -> CurveFunction:
        basis = rr_basis_subgroup(self._chain.curve, self._chain.G1)
        return _combine(self._chain.curve, basis, self.f_coeffs)

    def g_function(self) -> CurveFunction:
        """phi1-pullback of the chosen function on E1."""
        E1 = self._chain.phi1.codomain
        g1 = _combine(E1, rr_basis_subgroup(E1, self._chain.G2), self.g_coeffs)
        return pullback_function(self._chain.phi1, g1)

    def to_dict(self):
        return {"f_coeffs": self.f_coeffs.tolist(), "g_coeffs": self.g_coeffs.tolist(),
                "f_values": self.f_values.tolist(), "g_values": self.g_values.tolist(),
                "certificate": self.certificate}


def _combine(curve, basis, coeffs) -> CurveFunction:
    out = CurveFunction.const(curve, 0)
    for c, b in zip(coeffs, basis):
        if c:
            out = out + b * CurveFunction.const(curve, int(c))
    return out


def max_fiber_multiplicity(values: np.ndarray, groups: int) -> int:
    worst = 0
    for row in values.reshape(groups, -1):
        worst = max(worst, int(np.unique(row, return_counts=True)[1].max()))
    return worst


def search_primitives(chain: QuotientChain, ev: Evaluation, seed: int = 0, budget: int = 4_000_000) -> PrimitivePair:
    """f in L(D_G1) injective on each psi-fiber; g from L(D_G2bar) on E1 taking
    m distinct values on the G1-cosets of each psi-fiber."""
    if budget < 1:
        raise InvalidParameters("budget must be >= 1")
    E, m, ell = chain.curve, chain.m, ev.ell
    F = E.field
    feas = separation_feasibility(F.q, m, ell)
    rng = np.random.default_rng(seed)
    Bf = np.array([evaluate_points(f, ev.points) for f in rr_basis_subgroup(E, chain.G1)])
    f_c, f_v, f_tries = _search(F, Bf, ell, m * m, rng, budget)
    if f_c is None:
        raise PrimitiveSearchFailed(f"no separating f within {budget} candidates", feasibility=feas)
    E1 = chain.phi1.codomain
    img = chain.phi1.push_many(ev.points)
    Bg = np.array([evaluate_points(g, img) for g in rr_basis_subgroup(E1, chain.G2)])
    block_heads = np.arange(0, len(ev.points), m)  # a = 0 member of each G1-coset
    g_c, g_v, g_tries = _search(F, Bg, ell, m, rng, budget, select=block_heads)
    if g_c is None:
        raise PrimitiveSearchFailed(f"no separating g within {budget} candidates", feasibility=feas)
    blocks = g_v.reshape(-1, m)
    if not (blocks == blocks[:, :1]).all():
        raise AssertionError("pullback from E1 is not constant on G1-cosets")
    cert = {
        "f_candidates": int(f_tries), "g_candidates": int(g_tries), "seed": seed,
        "f_injective_on_psi_fibers": True, "g_distinct_on_cosets": True,
        "deg_psi_f": max_fiber_multiplicity(f_v, ell), "deg_psi_g": max_fiber_multiplicity(g_v, ell),
        "feasibility": feas,
    }
    return PrimitivePair(f_c, g_c, f_v, g_v, cert, chain)


def h_values(chain: QuotientChain, ev: Evaluation, t: int) -> tuple[np.ndarray, list[int]]:
    """psi-pullbacks of the monomial basis of L(t * INF) on E2, evaluated on T."""
    E2 = chain.psi.codomain
    basis = rr_basis_infinity(E2, t)
    image = chain.psi.push_many(ev.points)
    return np.array([evaluate_points(h, image) for h in basis]), [h.pole_order_at_infinity() for h in basis]


def curve_rows(F, hv: np.ndarray, f: np.ndarray, g: np.ndarray, r: int) -> np.ndarray:
    """Rows h_i g^j f^h in (i, j, h) order."""
    fp = [np.ones_like(f)]
    gp = [np.ones_like(g)]
    for _ in range(r - 1):
        fp.append(F.vmul(fp[-1], f))
        gp.append(F.vmul(gp[-1], g))
    rows = [F.vmul(F.vmul(h, gp[j]), fp[e]) for h in hv for j in range(r) for e in range(r)]
    return np.array(rows, dtype=np.int64)


@dataclass
class HierarchicalBuild:
    code: LinearCode
    structure: RecoveryStructure
    chain: QuotientChain
    evaluation: Evaluation
    primitives: PrimitivePair
    t: int

    def __iter__(self):
        return iter((self.code, self.structure))

    @property
    def floors(self) -> dict:
        return self.code.metadata["claimed"]


def _levels(m: int, ell: int, offset: int = 0) -> list[RecoveryLevel]:
    n1 = m * m
    fibers = [range(offset + i * n1, offset + (i + 1) * n1) for i in range(ell)]
    cosets = [range(offset + s * m, offset + (s + 1) * m) for s in range(ell * m)]
    return [
        RecoveryLevel("psi_fiber", fibers, rho=m + 2, params={"n1": n1, "k1": (m - 1) ** 2, "d1_floor": m + 2}),
        RecoveryLevel("G1_coset", cosets, rho=2, params={"n2": m, "k2": m - 1, "d2": 2}),
    ]


def build_hier_code_curve(chain: QuotientChain, ev: Evaluation, primitives: PrimitivePair, t: int) -> HierarchicalBuild:
    m, ell = chain.m, ev.ell
    if not 0 < t <= ell - m + 1:
        raise InvalidParameters(f"need 0 < t <= ell - m + 1 = {ell - m + 1}, got t = {t}")
    F = chain.curve.field
    r = m - 1
    hv, poles = h_values(chain, ev, t)
    G = curve_rows(F, hv, primitives.f_values, primitives.g_values, r)
    k = gfla.rank(F, G)
    if k != t * r * r:
        raise InvalidParameters(f"rank {k} differs from t r^2 = {t * r * r}")
    n = ell * m * m
    meta = {
        "construction": "hierarchical", "m": m, "ell": ell, "t": t, "r": r,
        "chain": chain.to_dict(), "S": [P.to_json() for P in ev.S], "h_pole_orders": poles,
        "claimed": {"n": n, "k": t * r * r, "n1": m * m, "k1": r * r, "d1_floor": m + 2,
                    "n2": m, "k2": r, "d2": 2, "d_floor": m * m * (ell - t - m + 1) + 2 * m},
        "certificate": primitives.certificate,
    }
    code = LinearCode(F, G, [(P.x, P.y) for P in ev.points], meta)
    return HierarchicalBuild(code, RecoveryStructure(n, _levels(m, ell)), chain, ev, primitives, t)


def surface_fibers(surface: SurfaceSpec, count: int) -> list[int]:
    C = good_points(surface)
    if len(C) < count:
        raise InsufficientPoints(f"only {len(C)} good fibers")
    return C[:count]


def lift_rows(F, curve_G: np.ndarray, fibers, delta: int) -> np.ndarray:
    """Rows b_u(s) * row, u = 0..delta, over the fibers side by side."""
    base = base_rr_space(delta)
    blocks = []
    for gamma in fibers:
        b = base.evaluate(F, gamma)
        blocks.append(np.concatenate([F.vmul(curve_G, int(bu)) for bu in b], axis=0))
    return np.concatenate(blocks, axis=1)


def build_hier_code_surface(surface: SurfaceSpec, curve_build: HierarchicalBuild, fibers, delta: int) -> HierarchicalBuild:
    if not surface.is_constant:
        raise UnsupportedSurfaceMode("the quotient-chain lift is implemented for constant surfaces")
    fibers = [int(g) for g in fibers]
    Nc = len(fibers)
    if not 0 <= delta < Nc:
        raise InvalidParameters(f"need 0 <= delta < |C'| = {Nc}")
    chain = curve_build.chain
    for g in fibers:
        if specialize(surface, g).curve != chain.curve:
            raise InvalidParameters(f"fiber over s={g} is not the chain's curve")
    F = surface.field
    base_code = curve_build.code
    G = lift_rows(F, base_code.generator, fibers, delta)
    k = gfla.rank(F, G)
    claimed = dict(base_code.metadata["claimed"])
    if k != (delta + 1) * base_code.k:
        raise InvalidParameters(f"rank {k} differs from (delta + 1) k = {(delta + 1) * base_code.k}")
    n1 = base_code.n
    m, ell = chain.m, curve_build.evaluation.ell
    levels = [RecoveryLevel("fiber", [range(i * n1, (i + 1) * n1) for i in range(Nc)], rho=claimed["d_floor"],
                            params={"n": n1, "k": base_code.k, "d_floor": claimed["d_floor"]})]
    inner = [_levels(m, ell, i * n1) for i in range(Nc)]
    for j in range(2):
        L0 = inner[0][j]
        levels.append(RecoveryLevel(L0.name, [J for blk in inner for J in blk[j].sets], L0.rho, params=L0.params))
    meta = dict(base_code.metadata)
    meta.update({
        "construction": "hierarchical_surface", "fibers": fibers, "delta": delta, "mode": surface.mode,
        "claimed": {**claimed, "n": Nc * n1, "k": (delta + 1) * base_code.k,
                    "fiber_d_floor": claimed["d_floor"], "d_floor": (Nc - delta) * claimed["d_floor"]},
    })
    labels = [(g,) + lb for g in fibers for lb in base_code.labels]
    code = LinearCode(F, G, labels, meta)
    return HierarchicalBuild(code, RecoveryStructure(Nc * n1, levels), chain, curve_build.evaluation,
                             curve_build.primitives, curve_build.t)


# --- fast repair paths -------------------------------------------------------------------------

def lagrange_weights(F, nodes, target) -> np.ndarray:
    """w with P(target) = sum w_i P(nodes_i) for deg P < len(nodes)."""
    w = []
    for i, xi in enumerate(nodes):
        num = den = 1
        for j, xj in enumerate(nodes):
            if j != i:
                num = F.mul(num, F.sub(target, xj))
                den = F.mul(den, F.sub(xi, xj))
        w.append(F.div(num, den))
    return np.array(w, dtype=np.int64)


def repair_lower(build: HierarchicalBuild, i: int, word) -> np.ndarray:
    """Coordinate i from the rest of its G1-coset, interpolating in f."""
    F = build.code.field
    m = build.chain.m
    n_curve = len(build.evaluation.points)
    j = i % n_curve
    start = i - (j % m)
    known = [c for c in range(start, start + m) if c != i]
    fv = build.primitives.f_values
    w = lagrange_weights(F, [int(fv[c % n_curve]) for c in known], int(fv[j]))
    return gfla.matmul(F, np.asarray(word)[..., known], w.reshape(-1, 1))[..., 0]


def repair_middle(build: HierarchicalBuild, erased, word) -> np.ndarray:
    """Erased coordinates of one psi-fiber, solving in the (g, f) product basis."""
    from .lrc import repair_matrix

    F = build.code.field
    m = build.chain.m
    n1 = m * m
    n_curve = len(build.evaluation.points)
    erased = sorted(erased)
    start = erased[0] - (erased[0] % n_curve) % n1
    J = list(range(start, start + n1))
    if not set(erased) <= set(J):
        raise InvalidParameters("erasures span more than one psi-fiber")
    local = [c % n_curve for c in J]
    B = curve_rows(F, np.ones((1, n1), dtype=np.int64), build.primitives.f_values[local],
                   build.primitives.g_values[local], m - 1)
    pos_e = [J.index(c) for c in erased]
    res = repair_matrix(F, B, [p for p in range(n1) if p not in pos_e], pos_e)
    if res is None:
        raise InvalidParameters("too many erasures in the psi-fiber")
    info, W = res
    return gfla.matmul(F, np.asarray(word)[..., [J[p] for p in info]], W)
