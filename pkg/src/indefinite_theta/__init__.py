"""Exact incidence checks and theta series for cyclic cone configurations
in quadratic spaces of signature (n, 2)."""

__version__ = "0.1.0"

from .quadform import (DegenerateFormError, Lattice, MajorantForm, QuadraticSpace, SignatureError,
                       build_majorant, certify_signature, congruence_diagonalize, inner_product)
from .incidence import (ConeConfig, IncidenceReport, Verdict, check_all, check_I1, check_I2, check_I3,
                        check_no_three_nulls, random_loop_config, random_valid_config)
from .signwalk import (InvalidConfigError, NotRegularError, ReferenceWeight, evaluate_w, path_constancy_check,
                       phi, reference_weight, sign_vector, wall_lemma_audit, winding_audit, winding_count)
from .cones import ConvergenceCertificate, SignComponent, classify_component, compute_r_inf, enumerate_components
from .theta import (QExpansion, divergence_witness_scan, tail_bound, theta_coefficients, theta_evaluate,
                    theta_partial_sum)
from .completion import (E2, DegeneratePlaneError, E2_quadrature, PlaneFrame, completed_doubling,
                         completed_theta_partial, plane_frame, project_to_plane)
from .estimator import IndefiniteThetaSeries, SignWeightTransformer

__all__ = [
    "ConeConfig", "ConvergenceCertificate", "DegenerateFormError", "DegeneratePlaneError", "E2",
    "E2_quadrature", "IncidenceReport", "IndefiniteThetaSeries", "InvalidConfigError", "Lattice",
    "MajorantForm", "NotRegularError", "PlaneFrame", "QExpansion", "QuadraticSpace", "ReferenceWeight",
    "SignComponent", "SignWeightTransformer", "SignatureError", "Verdict", "build_majorant",
    "certify_signature", "check_I1", "check_I2", "check_I3", "check_all", "check_no_three_nulls",
    "classify_component", "completed_doubling", "completed_theta_partial", "compute_r_inf",
    "congruence_diagonalize", "divergence_witness_scan", "enumerate_components", "evaluate_w",
    "inner_product", "path_constancy_check", "phi", "plane_frame", "project_to_plane",
    "random_loop_config", "random_valid_config", "reference_weight", "sign_vector", "tail_bound",
    "theta_coefficients", "theta_evaluate", "theta_partial_sum", "wall_lemma_audit", "winding_audit",
    "winding_count",
]
