"""scikit-learn style wrappers around the three code families.

``fit`` builds the code (X is ignored), ``transform`` encodes messages
(n_samples x k field encodings) into codewords, ``inverse_transform`` erasure
decodes words back to messages (-1 marks an erased symbol) and ``repair``
fills erasures with the staged local procedure.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import lrc, workflow


class _CodeEstimator(TransformerMixin, BaseEstimator):
    kind = None

    def _config(self) -> dict:
        raise NotImplementedError

    def fit(self, X=None, y=None):
        cfg = self._config()
        cfg = {k: v for k, v in cfg.items() if v is not None}
        res = workflow.build_from_config({"kind": self.kind, **cfg})
        self.build_ = res
        self.code_ = res.code
        self.structure_ = res.structure
        self.field_ = res.code.field
        self.n_features_in_ = res.code.k
        self.n_ = res.code.n
        return self

    def _check(self, X, width, allow_erasure=False):
        X = check_array(X, dtype=None)
        if X.dtype.kind not in "iu":
            if X.dtype.kind != "f" or not np.array_equal(X, np.round(X)):
                raise ValueError("entries must be integer field encodings")
        X = X.astype(np.int64)
        if X.shape[1] != width:
            raise ValueError(f"expected {width} columns, got {X.shape[1]}")
        low = -1 if allow_erasure else 0
        if X.size and (X.min() < low or X.max() >= self.field_.q):
            raise ValueError(f"entries must be field encodings in [0, {self.field_.q})")
        return X

    def transform(self, X):
        check_is_fitted(self, "code_")
        X = self._check(X, self.code_.k)
        return lrc.encode(self.code_, X)

    def inverse_transform(self, X):
        check_is_fitted(self, "code_")
        X = self._check(X, self.code_.n, allow_erasure=True)
        return np.array([lrc.erasure_decode(self.code_, row) for row in X], dtype=np.int64).reshape(-1, self.code_.k)

    def repair(self, X):
        """Fill erasures locally where possible; rows stay partially erased otherwise."""
        check_is_fitted(self, "code_")
        X = self._check(X, self.code_.n, allow_erasure=True)
        cache = {}
        return np.array([lrc.staged_repair(self.code_, self.structure_, row, cache)[0] for row in X],
                        dtype=np.int64).reshape(-1, self.code_.n)

    def report(self) -> dict:
        check_is_fitted(self, "code_")
        return self.build_.report().to_dict()

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "code_")
        return np.array([f"c{i}" for i in range(self.code_.n)], dtype=object)


class AvailabilityLRC(_CodeEstimator):
    """Codes with m recovery sets per symbol from m-torsion on N fibers."""

    kind = "avail"

    def __init__(self, m=5, fibers=4, delta=1, curve=None, surface=None, seed=0):
        self.m = m
        self.fibers = fibers
        self.delta = delta
        self.curve = curve
        self.surface = surface
        self.seed = seed

    def _config(self):
        return {"m": self.m, "fibers": self.fibers, "delta": self.delta, "curve": self.curve,
                "surface": self.surface, "seed": self.seed}


class HierarchicalLRC(_CodeEstimator):
    """Three-level codes from the chain E -> E/G1 -> E/E[m]; ``lift`` adds a surface level."""

    kind = "hier"

    def __init__(self, m=5, ell=7, t=2, curve=None, lift=None, seed=0, budget=4_000_000, retries=3):
        self.m = m
        self.ell = ell
        self.t = t
        self.curve = curve
        self.lift = lift
        self.seed = seed
        self.budget = budget
        self.retries = retries

    def _config(self):
        return {"m": self.m, "ell": self.ell, "t": self.t, "curve": self.curve, "lift": self.lift,
                "seed": self.seed, "budget": self.budget, "retries": self.retries}


class CombinedLRC(_CodeEstimator):
    """Hierarchical codes with availability 2 at both levels, m = v*w."""

    kind = "combo"

    def __init__(self, v=3, w=5, ell=5, t=1, curve=None, lift=None, seed=0, budget=200_000, retries=3):
        self.v = v
        self.w = w
        self.ell = ell
        self.t = t
        self.curve = curve
        self.lift = lift
        self.seed = seed
        self.budget = budget
        self.retries = retries

    def _config(self):
        return {"v": self.v, "w": self.w, "ell": self.ell, "t": self.t, "curve": self.curve, "lift": self.lift,
                "seed": self.seed, "budget": self.budget, "retries": self.retries}
