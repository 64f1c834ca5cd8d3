from fractions import Fraction as F

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from indefinite_theta import IndefiniteThetaSeries, InvalidConfigError, SignWeightTransformer

import oracles
from conftest import CONES_A, CONES_B, GRAM3


def test_params_and_clone():
    t = SignWeightTransformer(gram=GRAM3, cones=CONES_A, audit_samples=200)
    assert t.get_params()["audit_samples"] == 200
    c = clone(t)
    assert c.get_params() == t.get_params() and not hasattr(c, "reference_weight_")
    t.set_params(reference=-1)
    assert t.reference == -1


def test_transform_matches_oracle():
    t = SignWeightTransformer(gram=GRAM3, cones=CONES_B, reference=-1)
    rng = np.random.default_rng(0)
    X = rng.integers(-6, 7, size=(200, 3))
    out = t.fit_transform(X)
    assert out.shape == (200, 1) and out.dtype == np.int64
    want = [oracles.w(GRAM3, CONES_B, tuple(int(v) for v in x)) + 1 for x in X]
    assert out[:, 0].tolist() == want
    assert t.get_feature_names_out().tolist() == ["phi"]


def test_floats_are_taken_exactly():
    t = SignWeightTransformer(gram=GRAM3, cones=CONES_A, audit_samples=200).fit()
    # 0.5 is exact in binary, so the two rows must agree
    a = t.transform(np.array([[2.0, 0.5, 1.0]]))
    b = t.transform([[F(2), F(1, 2), F(1)]])
    assert a.tolist() == b.tolist()
    with pytest.raises(ValueError):
        t.transform([[np.nan, 0, 0]])
    with pytest.raises(ValueError):
        t.transform([[1, 0]])


def test_not_fitted():
    with pytest.raises(NotFittedError):
        SignWeightTransformer(gram=GRAM3, cones=CONES_A).transform([[1, 0, 0]])
    with pytest.raises(NotFittedError):
        IndefiniteThetaSeries(gram=GRAM3, cones=CONES_A).predict([1j])


def test_invalid_needs_reference():
    with pytest.raises(InvalidConfigError):
        SignWeightTransformer(gram=GRAM3, cones=CONES_B).fit()
    t = SignWeightTransformer(gram=GRAM3, cones=CONES_B, allow_invalid=True, audit_samples=0).fit()
    assert not t.incidence_report_.overall


def test_in_pipeline():
    pipe = make_pipeline(SignWeightTransformer(gram=GRAM3, cones=CONES_A, audit_samples=200),
                         FunctionTransformer(np.abs))
    assert pipe.fit_transform([[2, 1, 0], [0, 0, 1]]).shape == (2, 1)


def test_series_predict():
    est = IndefiniteThetaSeries(gram=GRAM3, cones=CONES_A).fit()
    v = est.predict([1j, 2j])
    assert abs(v[0] - 0.0864348) < 1e-6
    # single nonzero shell family: 2 sum exp(-pi k^2 v)
    assert abs(v[1] - 2 * sum(np.exp(-2 * np.pi * k * k) for k in range(1, 5))) < 1e-12
    assert (est.tail_bounds([1j]) < 1e-12).all()
    assert est.completeness_


def test_series_refuses_invalid_without_reference():
    with pytest.raises(InvalidConfigError):
        IndefiniteThetaSeries(gram=GRAM3, cones=CONES_B, M=2).fit()
