from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indefinite_theta import (ConeConfig, InvalidConfigError, NotRegularError, QuadraticSpace, check_all,
                              evaluate_w, path_constancy_check, phi, random_loop_config, random_valid_config,
                              reference_weight, sign_vector, wall_lemma_audit, winding_audit, winding_count)
from indefinite_theta.signwalk import (PathLeavesNegativeConeError, audit_constancy, is_regular,
                                       sample_negative_vectors, w_values, wall_vectors)

import oracles
from conftest import CONES_A, CONES_B, GRAM3


def test_sign_vector_and_w_examples(config_a, config_b):
    assert sign_vector(config_a, (2, 1, 0)) == (-1, -1, 1)
    assert is_regular(config_a, (2, 1, 0))
    assert evaluate_w(config_a, (2, 1, 0)) == -1
    assert sign_vector(config_b, (2, 1, 0)) == (-1, -1, -1)
    assert evaluate_w(config_b, (2, 1, 0)) == 3


def test_zero_sign_convention(config_a):
    # on the wall of C_1 the two products through C_1 vanish
    assert sign_vector(config_a, (0, 1, 0))[0] == 0
    assert not is_regular(config_a, (0, 1, 0))
    assert evaluate_w(config_a, (0, 1, 0)) == oracles.w(GRAM3, CONES_A, (0, 1, 0))


def test_reference_weight_config_a(config_a):
    ref = reference_weight(config_a, audit_samples=2000)
    assert ref.w_c == -1 and ref.audited and ref.audit_samples == 2000
    assert evaluate_w(config_a, ref.witness) == -1


def test_reference_refuses_invalid(config_b):
    with pytest.raises(InvalidConfigError):
        reference_weight(config_b)
    ref = reference_weight(config_b, allow_invalid=True)
    assert not ref.audited


def test_phi_with_explicit_reference(config_b):
    assert phi(config_b, (2, -1, 0), -1) == 0
    assert phi(config_b, (2, 1, 0), -1) == 4


def test_winding_example(config_a):
    assert winding_count(config_a, (2, 1, 0)) == 1
    with pytest.raises(NotRegularError):
        winding_count(config_a, (0, 1, 0))


def test_path_examples(config_a, config_b):
    ok = path_constancy_check(config_a, [(2, 1, 0), (1, 2, 0)], steps=1000)
    assert ok.constant and ok.w_values == [-1]
    bad = path_constancy_check(config_b, [(2, 1, 0), (2, -1, 0)], steps=1000)
    assert not bad.constant
    assert bad.w_values[0] == 3 and -1 in bad.w_values
    assert bad.first_violation is not None
    with pytest.raises(PathLeavesNegativeConeError):
        path_constancy_check(config_a, [(2, 1, 0), (0, 0, 1)])


def test_path_across_walls_is_constant(config_a):
    v = path_constancy_check(config_a, [(2, 1, 0), (-1, 2, 0), (-2, -1, 0), (1, -2, 0), (2, 1, 0)], steps=50)
    assert v.constant
    assert {c["wall"] for c in v.crossings} == {1, 2, 3}
    assert all(c["neighbor_product"] == -1 for c in v.crossings)


def test_vectorized_w_matches_exact(config_a, config_b):
    rng = np.random.default_rng(3)
    pts = rng.integers(-30, 31, size=(300, 3))
    for cfg, cones in ((config_a, CONES_A), (config_b, CONES_B)):
        fast = w_values(cfg, pts)
        assert list(fast) == [oracles.w(GRAM3, cones, tuple(int(v) for v in p)) for p in pts]


def test_negative_sampler(space4):
    x = sample_negative_vectors(space4, 500, np.random.default_rng(0))
    g = np.diag([-1, -1, 1, 1])
    assert x.shape == (500, 4)
    assert (np.einsum("ij,jk,ik->i", x, g, x) < 0).all()


def test_constancy_audit_on_invalid(config_b):
    vals = audit_constancy(config_b, 2000, seed=1)
    assert set(vals.tolist()) == {3, -1}


coord = st.fractions(min_value=-20, max_value=20, max_denominator=7)


@settings(max_examples=200, deadline=None)
@given(st.tuples(coord, coord, coord))
def test_w_property_against_oracle(x):
    cfg = ConeConfig(QuadraticSpace(GRAM3), CONES_B)
    assert evaluate_w(cfg, x) == oracles.w(GRAM3, CONES_B, x)


@settings(max_examples=200, deadline=None)
@given(st.tuples(coord, coord, coord))
def test_phi_vanishes_on_negative_vectors_config_a(x):
    cfg = ConeConfig(QuadraticSpace(GRAM3), CONES_A)
    if oracles.ip(GRAM3, x, x) < 0:
        assert phi(cfg, x, -1) == 0
    # evenness
    assert evaluate_w(cfg, x) == evaluate_w(cfg, tuple(-v for v in x))


@pytest.mark.parametrize("N", [3, 5, 8])
def test_planar_reference_is_n_minus_four(space4, N):
    cfg = random_valid_config(space4, N, "planar", seed=N)
    assert reference_weight(cfg).w_c == N - 4


@pytest.mark.parametrize("mode", ["planar", "perturbed"])
def test_wall_lemma_on_valid(space4, mode):
    cfg = random_valid_config(space4, 5, mode, seed=2)
    res = wall_lemma_audit(cfg, per_wall=200, seed=0)
    assert all(r["exceptions"] == 0 and r["samples"] == 200 for r in res.values())


def test_wall_vectors_lie_on_wall(config_a):
    for v in wall_vectors(config_a, 2, 50, seed=4):
        assert oracles.ip(GRAM3, v, CONES_A[2]) == 0
        assert oracles.ip(GRAM3, v, v) < 0


def test_wall_lemma_fails_where_i3_fails(config_b):
    res = wall_lemma_audit(config_b, per_wall=50)
    assert res[1]["exceptions"] == 50 and res[2]["exceptions"] == 50 and res[3]["exceptions"] == 0


def test_winding_identity_both_orientations(space4, config_a):
    for cfg in (config_a, random_valid_config(space4, 8, "perturbed", seed=5)):
        for c in (cfg, cfg.reversed()):
            assert winding_audit(c, 500, seed=1)["mismatches"] == 0


def test_winding_identity_holds_without_validity(space3):
    # w = N - 4r is a counting identity; it does not need (I.3)
    cfg = random_loop_config(space3, 6, seed=11)
    assert winding_audit(cfg, 300)["mismatches"] == 0


def test_reference_on_generated_invalid_is_nonconstant(space3):
    for seed in range(40):
        cfg = random_loop_config(space3, 5, seed)
        if not check_all(cfg).holds("I.3"):
            vals = set(audit_constancy(cfg, 3000, seed).tolist())
            assert len(vals) > 1
            return
    pytest.fail("no (I.3)-failing loop generated")


def test_fraction_inputs_are_exact(config_a):
    # a point a hair off the wall of C_3 keeps its exact side
    x = (F(-3, 5) + F(1, 10 ** 12), F(4, 5), 0)
    assert sign_vector(config_a, x)[2] == oracles.sgn(oracles.ip(GRAM3, x, CONES_A[2]))
