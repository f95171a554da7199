from itertools import combinations

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from geogt.constructions import grid_lines, single_defective_grid
from geogt.estimators import DisjunctDecoder, SignatureDecoder
from geogt.geometry import incidence_matrix
from geogt.setsystem import AmbiguousDecode, CardinalityMismatch


@pytest.fixture(scope="module")
def X33():
    return incidence_matrix(grid_lines(3, 3))


def test_disjunct_decoder_recovers_pairs(X33):
    est = DisjunctDecoder(t=2, verify=True).fit(X33)
    assert est.verdict_.holds
    D = list(combinations(range(27), 2))
    pred = est.predict(est.outcomes(D))
    want = np.zeros((len(D), 27), dtype=np.int8)
    for r, d in enumerate(D):
        want[r, list(d)] = 1
    np.testing.assert_array_equal(pred, want)


def test_signature_decoder_at_most(X33):
    est = SignatureDecoder(t=2, mode="at_most").fit(X33)
    pred = est.predict(est.outcomes([[], [3], [4, 20]]))
    assert [list(np.flatnonzero(r)) for r in pred] == [[], [3], [4, 20]]


def test_verify_reports_failure():
    est = SignatureDecoder(t=2, verify=True).fit(incidence_matrix(grid_lines(2, 2)))
    assert not est.verdict_.holds
    with pytest.raises(AmbiguousDecode):
        est.predict(np.ones((1, 4)))


def test_disjunct_decoder_wrong_t():
    est = DisjunctDecoder(t=1).fit(incidence_matrix(single_defective_grid(3)))
    with pytest.raises(CardinalityMismatch):
        est.predict(est.outcomes([[0, 4]]))


def test_unfitted_and_shape_checks(X33):
    with pytest.raises(NotFittedError):
        DisjunctDecoder().predict(np.zeros((1, 27)))
    est = DisjunctDecoder(t=2).fit(X33)
    with pytest.raises(ValueError):
        est.predict(np.zeros((1, 5)))


def test_clone_and_params():
    est = SignatureDecoder(t=3, mode="exactly", include_empty=False)
    c = clone(est)
    assert c.get_params() == est.get_params()
    assert c.get_params()["t"] == 3
