import numpy as np
import pytest

from ellrc import lrc
from ellrc.exceptions import InvalidParameters
from ellrc.hierarchical import build_hier_code_curve, repair_lower, repair_middle


@pytest.fixture(scope="module")
def hb(hier_result):
    return hier_result.build


def test_chain_kernels(hb):
    chain = hb.chain
    B = chain.basis
    assert chain.phi1.push(B.P1).is_infinity
    assert len(chain.G1) == 5 and set(chain.G1) == set(chain.curve.multiples(B.P1))
    E1 = chain.phi1.codomain
    assert E1.order_of(chain.phi1.push(B.P2)) == 5
    assert set(chain.psi.kernel) == set(B.points)
    assert chain.psi.codomain.order == chain.curve.order


def test_evaluation_layout(hb):
    ev, chain = hb.evaluation, hb.chain
    assert len(ev.points) == 7 * 25 and len(set(ev.points)) == 175
    images = chain.psi.push_many(ev.points)
    for i, Q in enumerate(ev.S):
        assert set(images[25 * i: 25 * (i + 1)]) == {Q}
    # each consecutive block of 5 is a G1-coset
    G1 = set(chain.G1)
    for s in range(0, 175, 5):
        p = ev.points[s]
        assert {chain.curve.sub(P, p) for P in ev.points[s: s + 5]} == G1


def test_primitive_properties(hb):
    f = hb.primitives.f_values.reshape(7, 25)
    g = hb.primitives.g_values.reshape(7, 25)
    for i in range(7):
        assert len(set(f[i])) == 25
        vals, counts = np.unique(g[i], return_counts=True)
        assert len(vals) == 5 and (counts == 5).all()
        assert (g[i].reshape(5, 5) == g[i].reshape(5, 5)[:, :1]).all()
    cert = hb.primitives.certificate
    assert cert["f_injective_on_psi_fibers"] and cert["g_distinct_on_cosets"]


def test_dimensions(hier_result):
    code = hier_result.code
    assert (code.n, code.k) == (175, 32)
    c = code.metadata["claimed"]
    assert (c["k1"], c["d1_floor"], c["k2"], c["d2"], c["d_floor"]) == (16, 7, 4, 2, 35)


def test_lower_codes_exact(hier_result):
    code = hier_result.code
    for J in hier_result.structure.levels[1].sets[:10]:
        sub = lrc.puncture(code, J)
        assert sub.k == 4 and lrc.min_distance(sub)["d"] == 2


def test_middle_code_sampled(hier_result):
    sub = lrc.puncture(hier_result.code, hier_result.structure.levels[0].sets[0])
    assert sub.k == 16
    res = lrc.min_distance(sub, "sampled", trials=3000, seed=0, floor=7)
    assert res["passed"]


def test_full_code_sampled(hier_result):
    res = lrc.min_distance(hier_result.code, "sampled", trials=3000, seed=1, floor=35)
    assert res["passed"]


def test_lower_set_burst_uses_middle_level(hier_result):
    code, rs = hier_result.code, hier_result.structure
    word = code.encode(np.arange(32) % code.field.q)
    rec = word.copy()
    rec[10:15] = -1
    rec[3] = -1
    fixed, stats = lrc.staged_repair(code, rs, rec)
    assert (fixed == word).all()
    assert stats["G1_coset"]["repaired"] == 1 and stats["psi_fiber"]["repaired"] == 5
    assert stats["global"]["repaired"] == 0


def test_fast_repair_paths(hb):
    rng = np.random.default_rng(2)
    code = hb.code
    for _ in range(30):
        word = code.encode(rng.integers(0, code.field.q, code.k))
        i = int(rng.integers(code.n))
        assert int(repair_lower(hb, i, word)) == word[i]
        start = 25 * int(rng.integers(7))
        erased = sorted(rng.choice(np.arange(start, start + 25), size=6, replace=False).tolist())
        assert (repair_middle(hb, erased, word).ravel() == word[erased]).all()


def test_t_out_of_range(hb):
    for t in (0, 4):
        with pytest.raises(InvalidParameters):
            build_hier_code_curve(hb.chain, hb.evaluation, hb.primitives, t)


def test_surface_lift(hier_surface_result, hier_result):
    code, rs = hier_surface_result.code, hier_surface_result.structure
    assert (code.n, code.k) == (525, 64)
    assert code.metadata["claimed"]["d_floor"] == 70
    assert [L.name for L in rs.levels] == ["fiber", "psi_fiber", "G1_coset"]
    assert rs.audit()["passed"]
    for J in rs.levels[0].sets:
        assert lrc.puncture(code, J).same_code(hier_result.code)
    assert lrc.min_distance(code, "sampled", trials=1000, seed=0, floor=70)["passed"]
    assert lrc.verify_recovery(code, rs, trials=10, seed=0)["passed"]
