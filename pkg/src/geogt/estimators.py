"""scikit-learn style wrappers around the decoders.

``fit`` takes the ``(items, tests)`` incidence matrix; ``predict`` maps each
row of test outcomes to a 0/1 indicator row over the items.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .setsystem import (
    DEFAULT_BUDGET,
    EXACTLY,
    SetSystem,
    decode_by_signature,
    decode_disjunct,
    run_tests,
    verify_disjunct,
    verify_separable,
)


class _Decoder(BaseEstimator):
    def fit(self, X, y=None):
        X = check_array(X, dtype=None, ensure_min_features=0)
        self.system_ = SetSystem.from_matrix(np.asarray(X, dtype=bool).tolist())
        self.n_items_ = self.system_.m
        self.n_features_in_ = self.system_.n
        self.verdict_ = self._verify() if self.verify else None
        return self

    def outcomes(self, defectives) -> np.ndarray:
        """Test outcomes for a list of defective index sets, as a bool matrix."""
        check_is_fitted(self, "system_")
        return np.array([run_tests(self.system_, d) for d in defectives], dtype=bool).reshape(
            len(defectives), self.system_.n
        )

    def predict(self, outcomes) -> np.ndarray:
        check_is_fitted(self, "system_")
        O = check_array(outcomes, dtype=None, ensure_min_features=0)
        if O.shape[1] != self.system_.n:
            raise ValueError(f"expected {self.system_.n} test outcomes per row, got {O.shape[1]}")
        out = np.zeros((O.shape[0], self.system_.m), dtype=np.int8)
        for r, row in enumerate(np.asarray(O, dtype=bool)):
            out[r, list(self._decode(row.tolist()))] = 1
        return out


class DisjunctDecoder(_Decoder):
    """Discard decoder. Exact when the fitted system is ``t``-disjunct.

    With ``verify=True``, ``fit`` runs the exact disjunctness check and keeps
    the verdict in ``verdict_``.
    """

    def __init__(self, t: int = 1, verify: bool = False, budget: int = DEFAULT_BUDGET):
        self.t = t
        self.verify = verify
        self.budget = budget

    def _verify(self):
        return verify_disjunct(self.system_, self.t, budget=self.budget)

    def _decode(self, row):
        return decode_disjunct(self.system_, row, self.t)


class SignatureDecoder(_Decoder):
    """Signature-matching decoder over sets of size ``t`` (``mode="exactly"``)
    or at most ``t`` (``mode="at_most"``)."""

    def __init__(self, t: int = 1, mode: str = EXACTLY, include_empty: bool = True,
                 verify: bool = False, budget: int = DEFAULT_BUDGET):
        self.t = t
        self.mode = mode
        self.include_empty = include_empty
        self.verify = verify
        self.budget = budget

    def _verify(self):
        return verify_separable(self.system_, self.t, self.mode,
                                include_empty=self.include_empty, budget=self.budget)

    def _decode(self, row):
        return decode_by_signature(self.system_, row, self.t, self.mode,
                                   include_empty=self.include_empty, budget=self.budget)
