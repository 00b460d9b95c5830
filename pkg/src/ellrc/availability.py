"""Availability codes from m-torsion grids on the fibers of an elliptic surface.

Each good fiber contributes the m^2 - 1 nonzero points of its m-torsion.  A
coordinate p0 lies on m + 1 lines of the grid (Z/m)^2; the line through the
origin is dropped and the other m lines are its recovery sets.  The m points of
such a line sum to zero in the group, which is what makes interpolation in the
monomials x^i y^j (2i + 3j <= m - 1) well posed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gfla
from .curve import CurvePoint, TorsionBasis, WeierstrassCurve
from .exceptions import AbelViolation, InvalidParameters, TorsionNotRational
from .field import is_prime
from .functions import CurveFunction, evaluate_points, rr_monomials
from .lrc import LinearCode, RecoveryLevel, RecoveryStructure
from .surface import SurfaceSpec, base_rr_space, fiber_torsion_basis, specialize


@dataclass
class TorsionGrid:
    gamma: int
    curve: WeierstrassCurve
    basis: TorsionBasis
    coords: list  # grid coordinates (i, j), origin excluded, lexicographic

    @property
    def m(self) -> int:
        return self.basis.m

    @property
    def points(self) -> list[CurvePoint]:
        return [self.basis.point(i, j) for i, j in self.coords]


@dataclass(frozen=True)
class LineRecoverySet:
    gamma: int
    anchor: tuple
    direction: tuple
    members: tuple  # grid coordinates, in parameter order t = 0..m-1 from the anchor


def build_grid(surface: SurfaceSpec, gamma: int, m: int) -> TorsionGrid:
    fiber = specialize(surface, gamma)
    B = fiber_torsion_basis(surface, gamma, m)
    coords = [(i, j) for i in range(m) for j in range(m) if (i, j) != (0, 0)]
    return TorsionGrid(fiber.gamma, fiber.curve, B, coords)


def directions(m: int) -> list[tuple]:
    """Slopes 0..m-1, then the vertical direction."""
    return [(1, s) for s in range(m)] + [(0, 1)]


def all_lines_through(grid: TorsionGrid, p0) -> list[LineRecoverySet]:
    m = grid.m
    if isinstance(p0, CurvePoint):
        if p0 not in grid.basis.dlog:
            raise InvalidParameters(f"{p0} is not an m-torsion point of the fiber")
        p0 = grid.basis.dlog[p0]
    p0 = (p0[0] % m, p0[1] % m)
    if p0 == (0, 0):
        raise InvalidParameters("the origin is not a grid coordinate")
    out = []
    for a, b in directions(m):
        members = tuple(((p0[0] + t * a) % m, (p0[1] + t * b) % m) for t in range(m))
        out.append(LineRecoverySet(grid.gamma, p0, (a, b), members))
    return out


def lines_through(grid: TorsionGrid, p0) -> list[LineRecoverySet]:
    """The m lines through p0 that miss the origin."""
    return [L for L in all_lines_through(grid, p0) if (0, 0) not in L.members]


@dataclass
class AvailabilityBuild:
    code: LinearCode
    structure: RecoveryStructure
    grids: list
    monomials: list
    lines: dict  # coordinate -> list of LineRecoverySet

    def __iter__(self):
        return iter((self.code, self.structure))


def build_avail_code(surface: SurfaceSpec, fibers, m: int, delta: int) -> AvailabilityBuild:
    fibers = [int(g) for g in fibers]
    N = len(fibers)
    if len(set(fibers)) != N:
        raise InvalidParameters("fibers must be distinct")
    if m < 3 or not is_prime(m):
        raise InvalidParameters("m must be an odd prime")
    if not 0 < delta < N:
        raise InvalidParameters(f"need 0 < delta < N = {N}, got delta = {delta}")
    F = surface.field
    r = m - 1
    mons = rr_monomials(r)
    base = base_rr_space(delta)
    grids, blocks, labels = [], [], []
    for gamma in fibers:
        try:
            grid = build_grid(surface, gamma, m)
        except TorsionNotRational as exc:
            raise TorsionNotRational(f"fiber over s={gamma}: {exc}") from exc
        pts = grid.points
        vals = np.array([evaluate_points(CurveFunction.monomial(grid.curve, i, j), pts) for i, j in mons])
        b = base.evaluate(F, grid.gamma)
        # row (u, monomial): b_u(gamma) * x^i y^j(P)
        blocks.append(np.concatenate([F.vmul(vals, int(bu)) for bu in b], axis=0))
        grids.append(grid)
        labels.extend((grid.gamma, P.x, P.y) for P in pts)
    G = np.concatenate(blocks, axis=1)
    k_expected = (delta + 1) * r
    rank = gfla.rank(F, G)
    if rank != k_expected:
        raise AbelViolation(f"rank {rank} differs from (delta + 1) r = {k_expected}")

    index = {}
    for gi, grid in enumerate(grids):
        for t, c in enumerate(grid.coords):
            index[(gi, c)] = gi * (m * m - 1) + t
    uniq, lines = {}, {}
    for gi, grid in enumerate(grids):
        for c in grid.coords:
            i = index[(gi, c)]
            lines[i] = lines_through(grid, c)
            for L in lines[i]:
                key = tuple(sorted(index[(gi, p)] for p in L.members))
                uniq.setdefault(key, None)
    level = RecoveryLevel("line", list(uniq), rho=2, availability=m, strict=True,
                          params={"r": r, "rho": 2, "t": m, "set_size": m})
    n = N * (m * m - 1)
    metadata = {
        "construction": "availability",
        "m": m, "N": N, "delta": delta, "r": r, "t": m, "fibers": fibers, "mode": surface.mode,
        "claimed": {"n": n, "k": k_expected, "d_floor": (N - delta) * (m * m - m)},
        # the lower bound is proved under delta > 1; recorded rather than assumed
        "delta_within_hypothesis": delta > 1,
        "torsion_bases": [g.basis.to_dict() for g in grids],
    }
    code = LinearCode(F, G, labels, metadata)
    return AvailabilityBuild(code, RecoveryStructure(n, [level]), grids, mons, lines)


def interpolation_weights(curve: WeierstrassCurve, known, target: CurvePoint, monomials) -> np.ndarray:
    """w with f(target) = sum w_p f(known_p) for every f in span(monomials)."""
    F = curve.field
    funcs = [CurveFunction.monomial(curve, i, j) for i, j in monomials]
    A = np.array([evaluate_points(f, known) for f in funcs])  # r x r
    if gfla.rank(F, A) < len(funcs):
        raise AbelViolation("interpolation system is singular on a recovery line")
    e = np.array([evaluate_points(f, [target])[0] for f in funcs])
    return gfla.solve(F, A, e)


def repair_weights(build: AvailabilityBuild, i: int, line: LineRecoverySet):
    """(known coordinate indices, weights) repairing coordinate i from ``line``."""
    m = build.grids[0].m
    gi = i // (m * m - 1)
    grid = build.grids[gi]
    c = grid.coords[i % (m * m - 1)]
    if c not in line.members:
        raise InvalidParameters("coordinate is not on the recovery line")
    others = [p for p in line.members if p != c]
    w = interpolation_weights(grid.curve, [grid.basis.point(*p) for p in others], grid.basis.point(*c),
                              build.monomials)
    known = [gi * (m * m - 1) + grid.coords.index(p) for p in others]
    return known, w


def repair_symbol(build: AvailabilityBuild, i: int, line: LineRecoverySet, word) -> int:
    """Value of coordinate i from the other members of ``line`` in ``word``."""
    known, w = repair_weights(build, i, line)
    word = np.asarray(word, dtype=np.int64)
    vals = word[..., known]
    if (vals < 0).any():
        raise InvalidParameters("a line member other than the target is erased")
    out = gfla.matmul(build.code.field, vals, w.reshape(-1, 1))[..., 0]
    return int(out) if out.ndim == 0 else out
