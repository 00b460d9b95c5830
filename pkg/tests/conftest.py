import itertools

import numpy as np
import pytest

from ellrc import workflow
from ellrc.curve import WeierstrassCurve, search_curve
from ellrc.field import GF

HIER_CONFIG = {"kind": "hier", "m": 5, "ell": 7, "t": 2, "seed": 0}
COMBO_CONFIG = {"kind": "combo", "v": 3, "w": 5, "ell": 5, "t": 1, "seed": 0}
AVAIL_CONFIG = {"kind": "avail", "m": 5, "fibers": 4, "delta": 1, "seed": 0}


def brute_points(curve):
    """Affine solutions by a double loop over the field, plus infinity."""
    F = curve.field
    a1, a2, a3, a4, a6 = curve.a
    count = 1
    pts = []
    for x in range(F.q):
        for y in range(F.q):
            lhs = F.add(F.mul(y, y), F.add(F.mul(F.mul(a1, x), y), F.mul(a3, y)))
            x2 = F.mul(x, x)
            rhs = F.add(F.add(F.mul(x2, x), F.mul(a2, x2)), F.add(F.mul(a4, x), a6))
            if lhs == rhs:
                pts.append((x, y))
                count += 1
    return count, pts


def brute_min_distance(F, G):
    """Minimum weight over all q^k - 1 nonzero messages (tiny codes only)."""
    k, n = G.shape
    best = n
    for msg in itertools.product(range(F.q), repeat=k):
        if not any(msg):
            continue
        word = np.zeros(n, dtype=np.int64)
        for c, row in zip(msg, G):
            word = F.vadd(word, F.vmul(row, c))
        best = min(best, int(np.count_nonzero(word)))
    return best


@pytest.fixture(scope="session")
def gf7():
    return GF(7)


@pytest.fixture(scope="session")
def e5_gf5():
    return WeierstrassCurve(GF(5), a6=1)


@pytest.fixture(scope="session")
def e7():
    return WeierstrassCurve(GF(7), a6=1)


@pytest.fixture(scope="session")
def found5():
    return search_curve(m=5, p_range=(5, 250))


@pytest.fixture(scope="session")
def found5_large():
    return search_curve(m=5, min_points=200, p_range=(5, 5000))


@pytest.fixture(scope="session")
def avail_result():
    return workflow.build_from_config(AVAIL_CONFIG)


@pytest.fixture(scope="session")
def hier_surface_result():
    return workflow.build_from_config({**HIER_CONFIG, "lift": {"fibers": 3, "delta": 1}})


@pytest.fixture(scope="session")
def hier_result(hier_surface_result):
    # the lifted build carries the curve-level build it was made from
    r = hier_surface_result
    return workflow.BuildResult("hier", HIER_CONFIG, r.curve_build, r.curve_build, r.curve)


@pytest.fixture(scope="session")
def combo_surface_result():
    return workflow.build_from_config({**COMBO_CONFIG, "lift": {"fibers": 3, "delta": 1}})


@pytest.fixture(scope="session")
def combo_result(combo_surface_result):
    r = combo_surface_result
    return workflow.BuildResult("combo", COMBO_CONFIG, r.curve_build, r.curve_build, r.curve)


def isogeny_exhaustive_check(E, G):
    """Homomorphism, kernel, fiber-size and point-count checks for E -> E/G."""
    from collections import Counter

    from ellrc.isogeny import quotient_by

    phi = quotient_by(E, G)
    pts = E.points()
    img = dict(zip(pts, phi.push_many(pts)))
    E2 = phi.codomain
    hom = all(img[E.add(P, Q)] == E2.add(img[P], img[Q]) for P in pts for Q in pts)
    kernel = {P for P in pts if img[P].is_infinity} == set(G)
    on_curve = all(E2.contains(R) for R in img.values())
    fibers = set(Counter(img.values()).values()) == {len(G)}
    return {"homomorphism": hom, "kernel": kernel, "on_codomain": on_curve, "fiber_sizes": fibers,
            "equal_counts": E2.order == E.order}
