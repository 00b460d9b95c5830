"""Config-driven builds, verification and repair simulation.

A run configuration is a mapping (usually loaded from YAML):

    kind: avail | hier | combo
    seed: 0
    curve: {search: {...}} | {artifact: path} | explicit curve dict
    surface: optional surface dict (avail only; default is the constant surface)
    m, fibers, delta                   # avail
    m, ell, t, budget, retries         # hier
    v, w, ell, t, budget, retries      # combo
    lift: {fibers: 3, delta: 1}        # optional surface lift for hier / combo
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import availability, combined, hierarchical, lrc
from .curve import TorsionBasis, WeierstrassCurve, search_curve
from .exceptions import InvalidParameters, PrimitiveSearchFailed, TorsionNotRational, VerificationFailed
from .serialize import digest, read_json
from .surface import SurfaceSpec, good_points

KINDS = ("avail", "hier", "combo")
DEFAULT_Q_MAX = 5000

# closed-form parameter claims, keyed by construction
FORMULAS = {
    "availability": {"n": "N*(m^2-1)", "k": "(delta+1)*(m-1)", "d_floor": "(N-delta)*(m^2-m)"},
    "hierarchical": {"n": "ell*m^2", "k": "t*(m-1)^2", "n1": "m^2", "k1": "(m-1)^2", "d1_floor": "m+2",
                     "n2": "m", "k2": "m-1", "d2": "2", "d_floor": "m^2*(ell-t-m+1)+2m"},
    "hierarchical_surface": {"n": "|C'|*ell*m^2", "k": "(delta+1)*t*(m-1)^2",
                             "d_floor": "(|C'|-delta)*(m^2*(ell-t-m+1)+2m)"},
    "combined": {"n": "ell*v^2*w^2", "k": "t*(v-1)^2*(w-1)^2", "n1": "v^2*w", "k1": "(v-1)^2*(w-1)",
                 "d1_floor": "8", "n2": "v", "k2": "v-1", "d2": "2", "d_floor": "16*(ell-t)"},
    "combined_surface": {"n": "|C'|*ell*v^2*w^2", "k": "(delta+1)*t*(v-1)^2*(w-1)^2",
                         "d_floor": "(|C'|-delta)*16*(ell-t)"},
}


@dataclass
class CurveChoice:
    curve: WeierstrassCurve
    basis: TorsionBasis
    provenance: dict

    def to_dict(self):
        return {"curve": self.curve.to_dict(), "basis": self.basis.to_dict(), "provenance": self.provenance}


def search_artifact(result) -> dict:
    return {"field": result.field.to_dict(), "curve": result.curve.to_dict(), "order": result.curve.order,
            "basis": result.basis.to_dict(), "stats": result.stats}


def resolve_curve(spec, m: int, min_points: int = 0, seed: int = 0) -> CurveChoice:
    spec = dict(spec or {})
    if "artifact" in spec:
        spec = read_json(spec["artifact"])
    if "curve" in spec and isinstance(spec["curve"], dict):
        E = WeierstrassCurve.from_dict(spec["curve"])
        basis = TorsionBasis.from_dict(E, spec["basis"]) if spec.get("basis", {}).get("m") == m else E.torsion_basis(m)
        return CurveChoice(E, basis, {"source": "given"})
    if "field" in spec:
        E = WeierstrassCurve.from_dict(spec)
        return CurveChoice(E, E.torsion_basis(m), {"source": "given"})
    s = dict(spec.get("search", {}))
    q_max = int(s.get("q_max", DEFAULT_Q_MAX))
    res = search_curve(p_range=(int(s.get("p_min", 5)), q_max), m=m, seed=int(s.get("seed", seed)),
                       min_points=int(s.get("min_points", min_points)), q_max=q_max, budget=s.get("budget"))
    return CurveChoice(res.curve, res.basis, {"source": "search", "stats": res.stats,
                                               "min_points": int(s.get("min_points", min_points))})


@dataclass
class BuildResult:
    kind: str
    config: dict
    build: object
    curve_build: object
    curve: CurveChoice

    @property
    def code(self) -> lrc.LinearCode:
        return self.build.code

    @property
    def structure(self) -> lrc.RecoveryStructure:
        return self.build.structure

    def certificates(self) -> dict:
        if self.kind == "hier":
            return self.build.primitives.to_dict()
        if self.kind == "combo":
            return self.build.quadruple.to_dict()
        return {"torsion_bases": self.code.metadata.get("torsion_bases")}

    def report(self) -> lrc.CodeReport:
        meta = self.code.metadata
        claimed = meta["claimed"]
        formulas = FORMULAS[meta["construction"]]
        params = {name: {"value": claimed.get(name), "formula": formulas.get(name, "construction")}
                  for name in sorted(set(formulas) | {"n", "k", "d_floor"}) if name in claimed}
        return lrc.CodeReport(
            n=self.code.n, k=self.code.k,
            distance={"exact": None, "sampled": None, "claimed_floor": claimed.get("d_floor")},
            bounds=applicable_bounds(self.code, self.structure),
            recovery={"audit": self.structure.audit()},
            provenance={"kind": self.kind, "construction": meta["construction"], "seed": self.config.get("seed", 0),
                        "config_digest": digest(self.config), "parameters": params,
                        "curve": self.curve.to_dict()},
        )


def _int(cfg, key, default):
    v = cfg.get(key, default)
    if not isinstance(v, int) or isinstance(v, bool):
        raise InvalidParameters(f"{key} must be an integer")
    return v


def build_from_config(cfg: dict) -> BuildResult:
    cfg = dict(cfg)
    kind = cfg.get("kind")
    if kind not in KINDS:
        raise InvalidParameters(f"kind must be one of {KINDS}")
    seed = _int(cfg, "seed", 0)
    if kind == "avail":
        return _build_avail(cfg, seed)
    if kind == "hier":
        return _build_hier(cfg, seed)
    return _build_combo(cfg, seed)


def _build_avail(cfg, seed):
    m, delta = _int(cfg, "m", 5), _int(cfg, "delta", 1)
    if "surface" in cfg:
        surface = SurfaceSpec.from_config(cfg["surface"])
        choice = CurveChoice(surface.curve_at(good_points(surface)[0]), None, {"source": "surface"})
    else:
        choice = resolve_curve(cfg.get("curve"), m, seed=seed)
        surface = SurfaceSpec.constant(choice.curve)
    fibers = cfg.get("fibers", 4)
    if isinstance(fibers, int):
        fibers = _torsion_fibers(surface, m, fibers)
    build = availability.build_avail_code(surface, fibers, m, delta)
    if choice.basis is None:
        choice = CurveChoice(build.grids[0].curve, build.grids[0].basis, choice.provenance)
    return BuildResult("avail", cfg, build, build, choice)


def _torsion_fibers(surface: SurfaceSpec, m: int, count: int) -> list[int]:
    out = []
    for g in good_points(surface):
        try:
            availability.build_grid(surface, g, m)
        except TorsionNotRational:
            continue
        out.append(g)
        if len(out) == count:
            return out
    raise InvalidParameters(f"only {len(out)} good fibers carry rational {m}-torsion")


def _retrying(search, seed: int, retries: int):
    """Call search(eval_seed) for eval_seed = seed, seed+1, ... until it succeeds."""
    last = None
    for attempt in range(retries + 1):
        try:
            return search(seed + attempt), attempt
        except PrimitiveSearchFailed as exc:
            last = exc
    raise last


def _lift(cfg, surface_curve, curve_build, builder):
    lift = cfg.get("lift")
    if not lift:
        return curve_build
    surface = SurfaceSpec.constant(surface_curve)
    fibers = lift.get("fibers", 3)
    if isinstance(fibers, int):
        fibers = hierarchical.surface_fibers(surface, fibers)
    return builder(surface, curve_build, fibers, int(lift.get("delta", 1)))


def _build_hier(cfg, seed):
    m, ell, t = _int(cfg, "m", 5), _int(cfg, "ell", 7), _int(cfg, "t", 2)
    budget, retries = _int(cfg, "budget", 4_000_000), _int(cfg, "retries", 3)
    choice = resolve_curve(cfg.get("curve"), m, min_points=m * m * (ell + 1), seed=seed)
    chain = hierarchical.build_chain(choice.curve, choice.basis)

    def attempt(s):
        ev = hierarchical.choose_evaluation(chain, ell, s)
        return ev, hierarchical.search_primitives(chain, ev, s, budget)

    (ev, prim), tries = _retrying(attempt, seed, retries)
    prim.certificate["evaluation_retries"] = tries
    curve_build = hierarchical.build_hier_code_curve(chain, ev, prim, t)
    build = _lift(cfg, choice.curve, curve_build, hierarchical.build_hier_code_surface)
    return BuildResult("hier", cfg, build, curve_build, choice)


def _build_combo(cfg, seed):
    v, w, ell, t = _int(cfg, "v", 3), _int(cfg, "w", 5), _int(cfg, "ell", 5), _int(cfg, "t", 1)
    budget, retries = _int(cfg, "budget", 200_000), _int(cfg, "retries", 3)
    m = v * w
    choice = resolve_curve(cfg.get("curve"), m, min_points=m * m * (ell + 1), seed=seed)
    dec = combined.decomposition(choice.curve, v, w, choice.basis)
    diagram = combined.build_diagram(choice.curve, dec)

    def attempt(s):
        ev = combined.choose_evaluation(diagram, ell, s)
        return ev, combined.search_quadruple(diagram, ev, s, budget)

    (ev, quad), tries = _retrying(attempt, seed, retries)
    quad.certificate["evaluation_retries"] = tries
    curve_build = combined.build_combo_code_curve(diagram, ev, quad, t)
    build = _lift(cfg, choice.curve, curve_build, combined.build_combo_code_surface)
    return BuildResult("combo", cfg, build, curve_build, choice)


# --- bounds and verification -------------------------------------------------------------------

def applicable_bounds(code: lrc.LinearCode, rs: lrc.RecoveryStructure) -> dict:
    meta = code.metadata
    c = meta["claimed"]
    n, k = code.n, code.k
    kind = meta["construction"]
    if kind == "availability":
        return lrc.singleton_bounds(n, k, r=meta["r"], rho=2, t=meta["t"])
    if kind.startswith("hierarchical"):
        return lrc.singleton_bounds(n, k, r=c["k2"], rho=2, k1=c["k1"], d1=c["d1_floor"], k2=c["k2"], d2=c["d2"])
    return lrc.singleton_bounds(n, k, r=c["k2"], rho=2, t=2, k1=c["k1"], d1=c["d1_floor"], k2=c["k2"], d2=c["d2"])


def _level_floor(L: lrc.RecoveryLevel):
    p = L.params
    return p.get("d2", p.get("d1_floor", p.get("d_floor", L.rho)))


def level_distances(code: lrc.LinearCode, L: lrc.RecoveryLevel, exact_limit: int, samples: int, seed: int) -> dict:
    """Distance of every punctured code of a level (identical codes computed once)."""
    F = code.field
    seen = {}
    floor = _level_floor(L)
    results = []
    for J in L.sets:
        sub = lrc.puncture(code, J)
        key = sub.rref().tobytes() + bytes(str(sub.rref().shape), "ascii")
        if key not in seen:
            if lrc.projective_count(F.q, sub.k) <= exact_limit:
                seen[key] = lrc.min_distance(sub, "exact", limit=exact_limit, floor=floor)
            else:
                seen[key] = lrc.min_distance(sub, "sampled", trials=samples, seed=seed, floor=floor)
        results.append((len(J), sub.k, seen[key]))
    exact = [d["d"] for _, _, d in results if d["mode"] == "exact"]
    sampled = [d["min_weight"] for _, _, d in results if d["mode"] == "sampled"]
    out = {"name": L.name, "codes": len(results), "distinct_codes": len(seen), "floor": floor,
           "lengths": sorted({n for n, _, _ in results}), "dimensions": sorted({k for _, k, _ in results}),
           "exact_distances": sorted(set(exact)), "sampled_min_weight": min(sampled) if sampled else None,
           "passed": all(d.get("passed", True) for d in seen.values())}
    if exact:
        n_, k_ = results[0][0], results[0][1]
        b = lrc.singleton_bounds(n_, k_, r=max(1, n_ - (L.rho - 1)), rho=L.rho)
        out["bounds"] = b
        out["bounds_ok"] = all(d <= min(b.values()) for d in exact)
        out["passed"] = out["passed"] and out["bounds_ok"]
    return out


def verify(code: lrc.LinearCode, rs: lrc.RecoveryStructure, trials: int = 100, seed: int = 0,
           exact_limit: int = lrc.DEFAULT_EXACT_LIMIT, samples: int = 10**4, levels=None,
           max_coords: int | None = None, raise_on_failure: bool = True) -> dict:
    report = {"trials": trials, "seed": seed, "exact_limit": exact_limit, "samples": samples}
    report["recovery"] = lrc.verify_recovery(code, rs, trials, seed, levels=levels, max_coords=max_coords)
    claimed = code.metadata.get("claimed", {})
    floor = claimed.get("d_floor")
    if lrc.projective_count(code.field.q, code.k) <= exact_limit:
        full = lrc.min_distance(code, "exact", limit=exact_limit, floor=floor)
    else:
        full = lrc.min_distance(code, "sampled", trials=samples, seed=seed, floor=floor)
    report["distance"] = {"exact": full if full["mode"] == "exact" else None,
                          "sampled": full if full["mode"] == "sampled" else None, "claimed_floor": floor}
    report["levels"] = [level_distances(code, L, exact_limit, samples, seed + 1 + j) for j, L in enumerate(rs.levels)]
    report["bounds"] = applicable_bounds(code, rs) if "construction" in code.metadata else {}
    report["passed"] = bool(full.get("passed", True)) and all(L["passed"] for L in report["levels"])
    if raise_on_failure and not report["passed"]:
        bad = [L["name"] for L in report["levels"] if not L["passed"]]
        raise VerificationFailed("distance floor or bound check failed", witness={"levels": bad, "full": full})
    return report


# --- repair simulation ---------------------------------------------------------------------------

ERASURE_MODELS = ("single", "per-lower-set-burst", "per-middle-set-burst", "random")


def _erasures(model: str, rs: lrc.RecoveryStructure, n: int, rng, p: float):
    inner = rs.levels[-1]
    if model == "single":
        return [int(rng.integers(n))]
    if model == "per-lower-set-burst":
        return list(inner.sets[int(rng.integers(len(inner.sets)))])
    if model == "per-middle-set-burst":
        if len(rs.levels) < 2:
            raise InvalidParameters("structure has no middle level")
        L = rs.levels[-2]
        J = L.sets[int(rng.integers(len(L.sets)))]
        return sorted(rng.choice(J, size=min(len(J), L.rho - 1), replace=False).tolist())
    if model == "random":
        return np.nonzero(rng.random(n) < p)[0].tolist()
    raise InvalidParameters(f"erasure model must be one of {ERASURE_MODELS}")


def repair_sim(code: lrc.LinearCode, rs: lrc.RecoveryStructure, model: str = "single", trials: int = 100,
               seed: int = 0, p: float = 0.0) -> dict:
    if not 0.0 <= p <= 1.0:
        raise InvalidParameters("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    cache = {}
    totals = Counter()
    reads = Counter()
    success = erased_total = 0
    usable = Counter()
    inner = len(rs.levels) - 1
    members = rs.membership(inner)
    for _ in range(trials):
        msg = rng.integers(0, code.field.q, size=code.k, dtype=np.int64)
        word = lrc.encode(code, msg)
        er = _erasures(model, rs, code.n, rng, p)
        erased_total += len(er)
        received = word.copy()
        received[er] = -1
        if model == "single":
            i = er[0]
            usable[len(members[i])] += 1
        fixed, stats = lrc.staged_repair(code, rs, received, cache)
        for name, s in stats.items():
            totals[name] += s["repaired"]
            reads[name] += s["reads"]
        if np.array_equal(fixed, word):
            success += 1
        elif (fixed >= 0).all():
            raise VerificationFailed("repair produced a wrong codeword", witness={"message": msg.tolist(), "erased": er})
    names = [L.name for L in rs.levels] + ["global"]
    return {
        "model": model, "trials": trials, "seed": seed, "p": p,
        "success_rate": success / trials if trials else 1.0,
        "erased_symbols": erased_total,
        "levels": {nm: {"repaired": totals[nm], "reads": reads[nm],
                        "reads_per_symbol": reads[nm] / totals[nm] if totals[nm] else None} for nm in names},
        "availability_histogram": {str(k): v for k, v in sorted(usable.items())},
    }
