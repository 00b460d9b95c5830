"""Linear codes over GF(q), recovery structures and LRC distance bounds."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import gfla
from .exceptions import (EnumerationTooLarge, InvalidParameters, NoCodewords, UnderdeterminedErasure,
                         VerificationFailed)
from .field import GF

SCHEMA_VERSION = 1
DEFAULT_EXACT_LIMIT = 10**7
_CHUNK = 1 << 18


class LinearCode:
    """Row space of a full-rank k x n generator, with one label per coordinate."""

    def __init__(self, field: GF, generator, labels=None, metadata=None, check: bool = True):
        G = np.asarray(generator, dtype=np.int64)
        if G.ndim != 2:
            raise InvalidParameters("generator must be a 2-d matrix")
        self.field = field
        self.generator = G
        self.generator.setflags(write=False)
        n = G.shape[1]
        self.labels = [tuple(lb) for lb in labels] if labels is not None else [(i,) for i in range(n)]
        self.metadata = dict(metadata or {})
        if len(self.labels) != n:
            raise InvalidParameters(f"{len(self.labels)} labels for {n} coordinates")
        if check:
            if G.size and (G.min() < 0 or G.max() >= field.q):
                raise InvalidParameters("generator entries are not field encodings")
            if len(set(self.labels)) != n:
                raise InvalidParameters("coordinate labels are not distinct")
            if G.shape[0] and gfla.rank(field, G) != G.shape[0]:
                raise InvalidParameters("generator does not have full row rank")

    @property
    def n(self) -> int:
        return self.generator.shape[1]

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    def __repr__(self):
        return f"LinearCode(q={self.field.q}, n={self.n}, k={self.k})"

    def encode(self, message) -> np.ndarray:
        return encode(self, message)

    def rref(self) -> np.ndarray:
        if not hasattr(self, "_rref"):
            self._rref = gfla.rref(self.field, self.generator)[0][: self.k]
        return self._rref

    def same_code(self, other: "LinearCode") -> bool:
        return self.field == other.field and self.k == other.k and np.array_equal(self.rref(), other.rref())

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "field": self.field.to_dict(),
            "k": self.k,
            "n": self.n,
            "rows": self.generator.tolist(),
            "labels": [list(lb) for lb in self.labels],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d) -> "LinearCode":
        F = GF.from_dict(d["field"])
        rows = np.array(d["rows"], dtype=np.int64).reshape(int(d["k"]), int(d["n"]))
        return cls(F, rows, [tuple(lb) for lb in d["labels"]], d.get("metadata"))


def encode(code: LinearCode, message) -> np.ndarray:
    msg = np.asarray(message, dtype=np.int64)
    if msg.shape[-1] != code.k:
        raise InvalidParameters(f"message length {msg.shape[-1]} != k = {code.k}")
    if msg.size and (msg.min() < 0 or msg.max() >= code.field.q):
        raise InvalidParameters("message entries are not field encodings")
    return gfla.matmul(code.field, msg, code.generator)


def puncture(code: LinearCode, coords) -> LinearCode:
    coords = sorted(set(int(c) for c in coords))
    if not coords:
        raise InvalidParameters("cannot puncture to an empty coordinate set")
    if coords[0] < 0 or coords[-1] >= code.n:
        raise InvalidParameters("coordinate out of range")
    B = gfla.row_basis(code.field, code.generator[:, coords])
    return LinearCode(code.field, B, [code.labels[c] for c in coords],
                      {"punctured_from": code.n, "coords": coords}, check=False)


def erasure_decode(code: LinearCode, received, erased=None) -> np.ndarray:
    """Message whose codeword agrees with ``received`` off the erasures.

    Erasures are marked by negative entries or given as an index list.
    """
    r = np.asarray(received, dtype=np.int64)
    if r.shape != (code.n,):
        raise InvalidParameters(f"received word must have length {code.n}")
    mask = r < 0
    if erased is not None:
        mask[list(erased)] = True
    known = np.nonzero(~mask)[0]
    GK = code.generator[:, known]
    if gfla.rank(code.field, GK) < code.k:
        raise UnderdeterminedErasure(f"{int(mask.sum())} erasures leave rank below k = {code.k}")
    msg = gfla.solve(code.field, GK.T, r[known])
    if msg is None or not np.array_equal(gfla.matmul(code.field, msg, GK), r[known]):
        raise InvalidParameters("received word is not consistent with any codeword")
    return msg


# --- distance --------------------------------------------------------------------------------

def projective_count(q: int, k: int) -> int:
    return (q**k - 1) // (q - 1)


def exact_min_distance(F: GF, G) -> int:
    """Minimum weight over all nonzero codewords, one per projective class.

    Codewords with leading row ``lead`` are G[lead] plus any combination of the
    later rows; the last two free digits are broadcast, the others looped.
    """
    G = np.asarray(G, dtype=np.int64)
    k, n = G.shape
    if k == 0:
        raise NoCodewords("zero-dimensional code")
    elems = np.arange(F.q, dtype=np.int64)[:, None]
    table = [F.vmul(elems, row[None, :]) for row in G]  # table[c][a] = a * G[c]
    best = n
    for lead in range(k):
        free = list(range(lead + 1, k))
        outer, inner = free[:-2], free[-2:]
        for digits in itertools.product(range(F.q), repeat=len(outer)):
            base = G[lead]
            for c, a in zip(outer, digits):
                base = F.vadd(base, table[c][a])
            words = base[None, :]
            for c in inner:
                words = F.vadd(words[:, None, :], table[c][None, :, :]).reshape(-1, n)
            best = min(best, int(np.count_nonzero(words, axis=1).min()))
            if best == 1:
                return best
    return best


def sample_weights(F: GF, G, trials: int, seed: int) -> np.ndarray:
    """Weights of ``trials`` codewords for uniform nonzero messages."""
    G = np.asarray(G, dtype=np.int64)
    k = G.shape[0]
    if k == 0:
        raise NoCodewords("zero-dimensional code")
    rng = np.random.default_rng(seed)
    msgs = rng.integers(0, F.q, size=(trials, k), dtype=np.int64)
    zero = ~msgs.any(axis=1)
    while zero.any():
        msgs[zero] = rng.integers(0, F.q, size=(int(zero.sum()), k), dtype=np.int64)
        zero = ~msgs.any(axis=1)
    out = np.empty(trials, dtype=np.int64)
    step = max(1, _CHUNK // max(1, G.shape[1]))
    for s in range(0, trials, step):
        out[s:s + step] = np.count_nonzero(gfla.matmul(F, msgs[s:s + step], G), axis=1)
    return out


def min_distance(code: LinearCode, mode: str = "exact", limit: int = DEFAULT_EXACT_LIMIT,
                 trials: int = 10**4, seed: int = 0, floor: int | None = None) -> dict:
    """Exact distance, or a sampled floor check against ``floor``."""
    if code.k == 0:
        raise NoCodewords("zero-dimensional code")
    if mode == "exact":
        count = projective_count(code.field.q, code.k)
        if count > limit:
            raise EnumerationTooLarge(f"{count} projective codewords exceed the limit {limit}; use sampled mode")
        d = exact_min_distance(code.field, code.generator)
        out = {"mode": "exact", "d": d, "enumerated": count}
        if floor is not None:
            out.update(floor=floor, passed=d >= floor)
        return out
    if mode == "sampled":
        w = sample_weights(code.field, code.generator, trials, seed)
        out = {"mode": "sampled", "min_weight": int(w.min()), "mean_weight": float(w.mean()),
               "trials": trials, "seed": seed}
        if floor is not None:
            below = int((w < floor).sum())
            out.update(floor=floor, below_floor=below, passed=below == 0)
        return out
    raise InvalidParameters(f"unknown distance mode {mode!r}")


# --- recovery structures -------------------------------------------------------------------

@dataclass
class RecoveryLevel:
    """One hierarchy level: recovery sets with a distance floor ``rho``.

    ``availability`` is the number of sets per coordinate; ``strict`` asks for
    pairwise intersections equal to the coordinate itself.
    """

    name: str
    sets: list
    rho: int
    availability: int = 1
    strict: bool = True
    params: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.sets = [tuple(sorted(int(i) for i in J)) for J in self.sets]

    @property
    def r(self) -> int:
        return max(len(J) for J in self.sets) - (self.rho - 1)

    def to_dict(self):
        return {"name": self.name, "rho": self.rho, "availability": self.availability, "strict": self.strict,
                "params": self.params, "sets": [list(J) for J in self.sets]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["name"], d["sets"], int(d["rho"]), int(d["availability"]), bool(d["strict"]),
                   d.get("params", {}))


@dataclass
class RecoveryStructure:
    """Levels ordered from the outermost (largest sets) to the innermost."""

    n: int
    levels: list

    def membership(self, level: int) -> list[list[int]]:
        out = [[] for _ in range(self.n)]
        for sid, J in enumerate(self.levels[level].sets):
            for i in J:
                out[i].append(sid)
        return out

    def sets_for(self, level: int, i: int) -> list[tuple]:
        L = self.levels[level]
        return [L.sets[s] for s in self.membership(level)[i]]

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "n": self.n, "levels": [L.to_dict() for L in self.levels]}

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["n"]), [RecoveryLevel.from_dict(L) for L in d["levels"]])

    def audit(self) -> dict:
        """Availability counts, pairwise intersections and nesting, per level."""
        report = {"levels": [], "nesting": True}
        members = [self.membership(j) for j in range(len(self.levels))]
        for j, L in enumerate(self.levels):
            counts = {len(ms) for ms in members[j]}
            max_overlap = 1
            strict_ok = True
            for i, ms in enumerate(members[j]):
                for a, b in itertools.combinations(ms, 2):
                    inter = set(L.sets[a]) & set(L.sets[b])
                    max_overlap = max(max_overlap, len(inter))
                    if inter != {i}:
                        strict_ok = False
            entry = {
                "name": L.name,
                "sets": len(L.sets),
                "availability": sorted(counts),
                "availability_ok": counts == {L.availability},
                "max_pairwise_overlap": max_overlap,
                "strict_checked": L.strict,
                "strict_ok": strict_ok if L.strict else None,
            }
            report["levels"].append(entry)
        for j in range(1, len(self.levels)):
            outer, inner = self.levels[j - 1], self.levels[j]
            for i in range(self.n):
                for s in members[j][i]:
                    child = set(inner.sets[s])
                    for t in members[j - 1][i]:
                        if not child <= set(outer.sets[t]):
                            report["nesting"] = False
        report["passed"] = report["nesting"] and all(
            e["availability_ok"] and e["strict_ok"] is not False for e in report["levels"])
        return report


def repair_matrix(F: GF, B: np.ndarray, known, erased):
    """(info, W) with c[erased] = c[info] @ W for every c in the row space of
    the full-rank ``B``, or None when the known columns do not determine it."""
    known = list(known)
    _, piv = gfla.rref(F, B[:, known])
    if len(piv) < B.shape[0]:
        return None
    info = [known[c] for c in piv]
    return info, gfla.matmul(F, gfla.inverse(F, B[:, info]), B[:, list(erased)])


def verify_recovery(code: LinearCode, rs: RecoveryStructure, trials: int = 100, seed: int = 0,
                    levels=None, patterns: int = 1, max_coords: int | None = None) -> dict:
    """Local repair of every coordinate through every recovery set.

    For each (coordinate, set) pair, ``patterns`` erasure patterns of size
    rho - 1 containing the coordinate are drawn; each is decoded from the
    remaining symbols of the set, for all ``trials`` codewords at once.
    """
    F = code.field
    if rs.n != code.n:
        raise InvalidParameters("structure and code lengths differ")
    audit = rs.audit()
    if not audit["passed"]:
        raise VerificationFailed("recovery structure audit failed", witness={"audit": audit})
    rng = np.random.default_rng(seed)
    msgs = rng.integers(0, F.q, size=(trials, code.k), dtype=np.int64)
    words = encode(code, msgs)
    chosen = range(len(rs.levels)) if levels is None else levels
    out = {"trials": trials, "seed": seed, "audit": audit, "levels": []}
    for j in chosen:
        L = rs.levels[j]
        coords = None
        if max_coords is not None and max_coords < code.n:
            coords = set(rng.choice(code.n, size=max_coords, replace=False).tolist())
        repairs = reads = 0
        for sid, J in enumerate(L.sets):
            B = gfla.row_basis(F, code.generator[:, J])
            for pos, i in enumerate(J):
                if coords is not None and i not in coords:
                    continue
                others = [p for p in range(len(J)) if p != pos]
                for _ in range(patterns):
                    extra = rng.choice(others, size=min(len(others), L.rho - 2), replace=False).tolist()
                    erased = [pos] + sorted(extra)
                    known = [p for p in range(len(J)) if p not in erased]
                    res = repair_matrix(F, B, known, erased)
                    witness = {"level": L.name, "set": sid, "coordinate": i,
                               "erased": [J[p] for p in erased]}
                    if res is None:
                        witness["codeword"] = words[0].tolist()
                        raise VerificationFailed("known symbols do not determine the erasures", witness=witness)
                    info, W = res
                    cols = np.asarray(J)
                    got = gfla.matmul(F, words[:, cols[info]], W)
                    bad = np.nonzero((got != words[:, cols[erased]]).any(axis=1))[0]
                    if bad.size:
                        witness["message"] = msgs[bad[0]].tolist()
                        witness["codeword"] = words[bad[0]].tolist()
                        raise VerificationFailed("local repair returned a wrong value", witness=witness)
                    repairs += trials
                    reads += trials * len(info)
        out["levels"].append({"name": L.name, "rho": L.rho, "repairs": repairs, "failures": 0,
                              "reads_per_repair": reads / repairs if repairs else 0.0})
    out["passed"] = True
    return out


def staged_repair(code: LinearCode, rs: RecoveryStructure, word, cache: dict | None = None):
    """Fill erasures (negative entries) level by level, innermost first.

    A set is used once its erasures are determined by its other symbols; what
    is left after all levels goes to the global decoder.  Returns the repaired
    word (erasures kept where impossible) and per-level statistics.
    """
    F = code.field
    w = np.array(word, dtype=np.int64)
    cache = {} if cache is None else cache
    stats = {L.name: {"repaired": 0, "reads": 0} for L in rs.levels}
    stats["global"] = {"repaired": 0, "reads": 0}
    progress = True
    while progress and (w < 0).any():
        progress = False
        for j in range(len(rs.levels) - 1, -1, -1):
            L = rs.levels[j]
            for sid, J in enumerate(L.sets):
                vals = w[list(J)]
                erased = [p for p in range(len(J)) if vals[p] < 0]
                if not erased or len(erased) == len(J):
                    continue
                key = (j, sid)
                if key not in cache:
                    cache[key] = gfla.row_basis(F, code.generator[:, list(J)])
                known = [p for p in range(len(J)) if vals[p] >= 0]
                res = repair_matrix(F, cache[key], known, erased)
                if res is None:
                    continue
                info, W = res
                w[[J[p] for p in erased]] = gfla.matmul(F, vals[info].reshape(1, -1), W)[0]
                stats[L.name]["repaired"] += len(erased)
                stats[L.name]["reads"] += len(info)
                progress = True
            if progress:
                break
    left = np.nonzero(w < 0)[0]
    if left.size:
        try:
            msg = erasure_decode(code, w)
        except UnderdeterminedErasure:
            return w, stats
        full = encode(code, msg)
        stats["global"]["repaired"] += int(left.size)
        stats["global"]["reads"] += int((w >= 0).sum())
        w = full
    return w, stats


# --- bounds ----------------------------------------------------------------------------------

def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def singleton_bounds(n: int, k: int, r=None, rho=None, t=None, k1=None, d1=None, k2=None, d2=None) -> dict:
    """Singleton-type upper bounds on d for whichever parameter groups are given."""
    def positive(**kw):
        for name, v in kw.items():
            if not isinstance(v, (int, np.integer)) or v <= 0:
                raise InvalidParameters(f"{name} must be a positive integer, got {v!r}")

    positive(n=n, k=k)
    if k > n:
        raise InvalidParameters("k exceeds n")
    out = {"singleton": n - k + 1}
    if r is not None and rho is not None:
        positive(r=r, rho=rho)
        if rho < 2:
            raise InvalidParameters("rho must be >= 2")
        out["classic"] = n - k + 1 - (_ceil_div(k, r) - 1) * (rho - 1)
    if r is not None and t is not None:
        positive(r=r, t=t)
        out["availability_1"] = n - k + 2 - _ceil_div(t * (k - 1) + 1, t * (r - 1) + 1)
        out["availability_2"] = n - sum((k - 1) // r**i for i in range(t + 1))
    if None not in (k1, d1, k2, d2):
        positive(k1=k1, d1=d1, k2=k2, d2=d2)
        out["hierarchical"] = (n - k + 1 - (_ceil_div(k, k1) - 1) * (d1 - d2)
                               - (_ceil_div(k, k2) - 1) * (d2 - 1))
    if len(out) == 1 and (r, rho, t, k1) != (None,) * 4:
        raise InvalidParameters("incomplete parameter group")
    return out


@dataclass
class CodeReport:
    n: int
    k: int
    distance: dict  # keys: exact, sampled, claimed_floor (kept apart)
    bounds: dict
    recovery: dict
    provenance: dict

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "n": self.n, "k": self.k, "distance": self.distance,
                "bounds": self.bounds, "recovery": self.recovery, "provenance": self.provenance}
