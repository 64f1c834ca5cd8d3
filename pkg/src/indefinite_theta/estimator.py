"""scikit-learn style wrappers.

``SignWeightTransformer`` maps vectors to their theta weight ``Phi``;
``IndefiniteThetaSeries`` fits the q-expansion and predicts values at
points of the upper half plane.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import rational_rows, tau_array
from .incidence import ConeConfig, check_all
from .quadform import Lattice, QuadraticSpace, build_majorant
from .signwalk import InvalidConfigError, reference_weight, w_from_signs, sign_vector
from .theta import theta_coefficients, theta_evaluate


def _config(gram, cones) -> ConeConfig:
    if gram is None or cones is None:
        raise ValueError("gram and cones are required")
    return ConeConfig(QuadraticSpace(gram), cones)


class SignWeightTransformer(TransformerMixin, BaseEstimator):
    """Exact ``Phi(x) = w(x) - w_C`` as a single integer feature.

    ``fit`` ignores ``X`` apart from its width; the reference weight comes
    from the configuration (audited) or from ``reference``.
    """

    def __init__(self, gram=None, cones=None, reference=None, allow_invalid=False,
                 audit_samples=1000, seed=0):
        self.gram = gram
        self.cones = cones
        self.reference = reference
        self.allow_invalid = allow_invalid
        self.audit_samples = audit_samples
        self.seed = seed

    def fit(self, X=None, y=None):
        config = _config(self.gram, self.cones)
        self.incidence_report_ = check_all(config)
        if self.reference is not None:
            wc = int(self.reference)
        else:
            if not self.incidence_report_.overall and not self.allow_invalid:
                raise InvalidConfigError("invalid configuration: give reference= or allow_invalid=True")
            wc = reference_weight(config, self.audit_samples, self.seed, allow_invalid=self.allow_invalid).w_c
        self.config_ = config
        self.reference_weight_ = wc
        self.n_features_in_ = config.space.dim
        if X is not None:
            rational_rows(X, self.n_features_in_)
        return self

    def transform(self, X):
        check_is_fitted(self, "reference_weight_")
        rows = rational_rows(X, self.n_features_in_)
        out = [w_from_signs(sign_vector(self.config_, x)) - self.reference_weight_ for x in rows]
        return np.array(out, dtype=np.int64).reshape(-1, 1)

    def get_feature_names_out(self, input_features=None):
        return np.array(["phi"], dtype=object)


class IndefiniteThetaSeries(BaseEstimator):
    """q-expansion ``sum c(m) q^m`` up to ``M``; ``predict`` evaluates it."""

    def __init__(self, gram=None, cones=None, basis=None, mu=None, M=13, B=None, reference=None):
        self.gram = gram
        self.cones = cones
        self.basis = basis
        self.mu = mu
        self.M = M
        self.B = B
        self.reference = reference

    def fit(self, X=None, y=None):
        config = _config(self.gram, self.cones)
        self.lattice_ = Lattice(config.space, self.basis, self.mu)
        self.expansion_ = theta_coefficients(config, self.lattice_, self.M, self.B, self.reference)
        self.coefficients_ = self.expansion_.nonzero()
        self.completeness_ = self.expansion_.completeness
        self.config_ = config
        return self

    def predict(self, taus):
        check_is_fitted(self, "expansion_")
        return np.array([theta_evaluate(self.expansion_, t)[0] for t in tau_array(taus)])

    def tail_bounds(self, taus):
        """Certified truncation error at each ``tau`` (``inf`` when unavailable)."""
        check_is_fitted(self, "expansion_")
        maj = build_majorant(self.config_.space)
        return np.array([theta_evaluate(self.expansion_, t, self.lattice_, maj)[1] for t in tau_array(taus)])
