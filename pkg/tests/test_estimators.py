import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ellrc.estimators import AvailabilityLRC, CombinedLRC, HierarchicalLRC


@pytest.fixture(scope="module")
def fitted():
    return AvailabilityLRC(m=5, fibers=4, delta=1).fit()


def test_params_and_clone():
    est = HierarchicalLRC(ell=7, t=2, seed=3)
    params = est.get_params()
    assert params["ell"] == 7 and params["seed"] == 3 and params["lift"] is None
    twin = clone(est)
    assert twin.get_params() == params and twin is not est
    assert CombinedLRC().set_params(t=2).t == 2


def test_unfitted_use_raises():
    est = AvailabilityLRC()
    for call in (lambda: est.transform([[0] * 8]), lambda: est.inverse_transform([[0] * 96]), est.report):
        with pytest.raises(NotFittedError):
            call()


def test_round_trip(fitted):
    rng = np.random.default_rng(0)
    X = rng.integers(0, fitted.field_.q, (20, fitted.n_features_in_))
    C = fitted.transform(X)
    assert C.shape == (20, 96)
    assert (fitted.inverse_transform(C) == X).all()
    erased = C.copy()
    erased[:, :10] = -1
    assert (fitted.inverse_transform(erased) == X).all()


def test_repair_fills_single_erasures(fitted):
    rng = np.random.default_rng(1)
    C = fitted.transform(rng.integers(0, fitted.field_.q, (5, 8)))
    E = C.copy()
    E[np.arange(5), rng.integers(0, 96, 5)] = -1
    assert (fitted.repair(E) == C).all()


def test_input_validation(fitted):
    with pytest.raises(ValueError):
        fitted.transform(np.zeros((2, 7), dtype=int))
    with pytest.raises(ValueError):
        fitted.transform(np.full((1, 8), fitted.field_.q))
    with pytest.raises(ValueError):
        fitted.transform(np.full((1, 8), -1))
    with pytest.raises(ValueError):
        fitted.transform([[0.5] * 8])


def test_report_and_feature_names(fitted):
    rep = fitted.report()
    assert rep["n"] == 96 and rep["k"] == 8 and rep["distance"]["claimed_floor"] == 60
    names = fitted.get_feature_names_out()
    assert len(names) == 96 and names[0] == "c0"
