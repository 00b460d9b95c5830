import itertools
import warnings

import numpy as np
import pytest

from ellrc import lrc
from ellrc.combined import build_combo_code_curve, decomposition
from ellrc.exceptions import InvalidParameters


@pytest.fixture(scope="module")
def cb(combo_result):
    return combo_result.build


def test_decomposition(cb):
    dec = cb.diagram.dec
    E = dec.curve
    assert (dec.v, dec.w, dec.m) == (3, 5, 15)
    assert len(dec.E_v) == 9 and all(len(H) == 45 for H in dec.H_w)
    for P in dec.p_v:
        assert E.order_of(P) == 3
    for P in dec.p_w:
        assert E.order_of(P) == 5
    assert set(dec.H_w[0]) & set(dec.H_w[1]) == set(dec.E_v)


def test_decomposition_rejects_bad_factors(cb):
    E = cb.diagram.dec.curve
    for v, w in [(3, 3), (2, 5), (3, 9)]:
        with pytest.raises(InvalidParameters):
            decomposition(E, v, w)


def test_diagram_degrees(cb):
    d = cb.diagram
    assert set(d.psi_v.kernel) == set(d.dec.E_v)
    assert len(d.psi_v.kernel) == 9
    assert len(d.psi_m.kernel) == 225
    E = d.dec.curve
    for name, C in d.curves.items():
        assert C.order == E.order, name


def test_dimensions(combo_result):
    code = combo_result.code
    assert (code.n, code.k) == (1125, 64)
    c = code.metadata["claimed"]
    assert (c["k1"], c["d1_floor"], c["k2"], c["d2"], c["d_floor"], c["middle_overlap"]) == (16, 8, 2, 2, 64, 9)


def test_structure_audit(combo_result):
    rs = combo_result.structure
    audit = rs.audit()
    assert audit["nesting"]
    middle, lower = rs.levels
    assert len(middle.sets) == 2 * 5 * 5 and len(lower.sets) == 2 * 5 * 25 * 3
    # every coordinate is in exactly two sets per level
    for L in (middle, lower):
        count = np.zeros(1125, dtype=int)
        for S in L.sets:
            count[list(S)] += 1
        assert (count == 2).all()
    # lower sets are disjoint or meet in one point; middle sets meet in 9
    for A, B in itertools.combinations(lower.sets[:60], 2):
        assert len(set(A) & set(B)) <= 1
    overlaps = {len(set(A) & set(B)) for A, B in itertools.combinations(middle.sets[:10], 2)}
    assert overlaps <= {0, 9}


def test_lower_codes_exact(combo_result):
    code = combo_result.code
    for J in combo_result.structure.levels[1].sets[::97]:
        sub = lrc.puncture(code, J)
        assert (sub.n, sub.k) == (3, 2) and lrc.min_distance(sub)["d"] == 2


def test_middle_code_sampled(combo_result):
    for J in combo_result.structure.levels[0].sets[::17]:
        sub = lrc.puncture(combo_result.code, J)
        assert sub.k == 16
        assert lrc.min_distance(sub, "sampled", trials=1000, seed=0, floor=8)["passed"]


def test_full_code_sampled(combo_result):
    assert lrc.min_distance(combo_result.code, "sampled", trials=1000, seed=0, floor=64)["passed"]


def test_recovery(combo_result):
    rep = lrc.verify_recovery(combo_result.code, combo_result.structure, trials=10, seed=0)
    assert rep["passed"]


def test_quadruple_certificate(cb):
    cert = cb.quadruple.certificate
    for name in ("f1", "f2", "g1", "g2"):
        assert cert[name]["separates"]


def test_t_equal_ell_warns(cb):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = build_combo_code_curve(cb.diagram, cb.evaluation, cb.quadruple, 5)
    assert any("vacuous" in str(w.message) for w in caught)
    assert out.code.metadata["claimed"]["d_floor"] is None
    with pytest.raises(InvalidParameters):
        build_combo_code_curve(cb.diagram, cb.evaluation, cb.quadruple, 6)


def test_surface_lift(combo_surface_result, combo_result):
    code, rs = combo_surface_result.code, combo_surface_result.structure
    assert (code.n, code.k) == (3375, 128)
    assert code.metadata["claimed"]["d_floor"] == 128
    for J in rs.levels[0].sets:
        assert lrc.puncture(code, J).same_code(combo_result.code)
    assert lrc.min_distance(code, "sampled", trials=300, seed=0, floor=128)["passed"]
