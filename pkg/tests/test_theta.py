import math
from fractions import Fraction as F

import numpy as np
import pytest

from indefinite_theta import (ConeConfig, InvalidConfigError, Lattice, build_majorant, divergence_witness_scan,
                              random_valid_config, reference_weight, theta_coefficients, theta_evaluate,
                              theta_partial_sum)
from indefinite_theta.theta import (CERTIFIED, HEURISTIC, QExpansion, _coefficients, box_cloud,
                                    enumerate_cloud, enumerate_lattice_points, q_power, tail_bound)

import oracles
from conftest import CONES_A, GRAM3

SUPPORT_A = {F(1, 2): 2, F(2): 2, F(9, 2): 2, F(8): 2, F(25, 2): 2}
SUPPORT_A_HALF = {F(1, 8): 2, F(9, 8): 2, F(25, 8): 2, F(49, 8): 2, F(81, 8): 2}


@pytest.mark.parametrize("bound,count", [(1, 7), (2, 19), (3, 27), (F(1, 2), 1)])
def test_ball_counts(z3, space3, bound, count):
    assert len(enumerate_cloud(z3, build_majorant(space3), bound)) == count


def test_ball_matches_box_filter(space4):
    lat = Lattice(space4, basis=[[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 2]])
    maj = build_majorant(space4)
    ball = {tuple(x) for x, _, m in enumerate_lattice_points(lat, maj, 7)}
    box = box_cloud(lat, maj, 6)
    ref = {lat.to_ambient(box.coords(i)) for i in range(len(box)) if box.maj(i) <= 7}
    assert ball == ref


def test_coset_ball(space3):
    lat = Lattice(space3, mu=(0, 0, F(1, 2)))
    pts = list(enumerate_lattice_points(lat, build_majorant(space3), F(1, 4)))
    assert sorted(tuple(p[0]) for p in pts) == [(0, 0, F(-1, 2)), (0, 0, F(1, 2))]


def test_config_a_coefficients(config_a, z3):
    exp = theta_coefficients(config_a, z3, 13)
    assert exp.nonzero() == SUPPORT_A
    assert exp.completeness == CERTIFIED
    assert exp.nonzero() == oracles.box_coefficients(GRAM3, CONES_A, -1, 8, 13)


def test_config_a_half_coset(config_a, space3):
    lat = Lattice(space3, mu=(0, 0, F(1, 2)))
    with pytest.warns(UserWarning, match="dual lattice"):
        exp = theta_coefficients(config_a, lat, 13)
    assert exp.nonzero() == SUPPORT_A_HALF
    assert exp.nonzero() == oracles.box_coefficients(GRAM3, CONES_A, -1, 8, 13, mu=(0, 0, F(1, 2)))


def test_origin_term(config_a, z3):
    exp = theta_coefficients(config_a, z3, 2, include_origin=True)
    assert exp.coeffs[F(0)] == 1      # Phi(0) = -w_C


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_generated_against_box_oracle(space4, seed):
    cfg = random_valid_config(space4, 5, "perturbed", seed)
    wc = reference_weight(cfg).w_c
    lat = Lattice(space4)
    got, _ = _coefficients(cfg, lat, build_majorant(space4), 3, 9, wc)
    assert got == oracles.box_coefficients(space4.gram, cfg.vectors, wc, 3, 3, ball=9)
    # evenness from x -> -x and vanishing for m <= 0
    assert all(c % 2 == 0 for c in got.values())
    assert all(m > 0 for m in got)


def test_generated_certified_and_vanishing(space4):
    cfg = random_valid_config(space4, 5, "perturbed", 1)
    exp = theta_coefficients(cfg, Lattice(space4), 4)
    assert exp.completeness == CERTIFIED
    assert exp.nonzero() == {F(1, 2): -8, F(2): -8, F(7, 2): -16, F(4): -16}
    assert exp.r_inf * float(exp.bound) >= 8


def test_too_small_ball_is_not_certified(space4):
    cfg = random_valid_config(space4, 5, "perturbed", 1)
    exp = theta_coefficients(cfg, Lattice(space4), 4, B=2)
    assert exp.completeness == HEURISTIC
    assert exp.bound == 4 and exp.notes


def test_invalid_needs_reference(config_b, z3):
    with pytest.raises(InvalidConfigError):
        theta_coefficients(config_b, z3, 2)


def test_evaluate_config_a(config_a, z3, space3):
    exp = theta_coefficients(config_a, z3, 13)
    value, tail = theta_evaluate(exp, 1j, z3, build_majorant(space3))
    exact = 2 * sum(math.exp(-math.pi * k * k) for k in range(1, 40))
    assert value == pytest.approx(exact, abs=1e-12)
    assert abs(value - 0.0864348112133) < 1e-12
    assert abs(theta_evaluate(exp, 0.5j)[0]) > abs(value)
    assert tail is not None and tail < 1e-10


def test_empty_expansion():
    e = QExpansion({}, F(1), F(1), CERTIFIED, "", 3, -1)
    assert theta_evaluate(e, 1j)[0] == 0
    with pytest.raises(ValueError):
        theta_evaluate(e, -1j)


def test_q_power_convention():
    # q = exp(2 pi i tau): |q| < 1 in the upper half plane
    assert abs(q_power(0.3 + 1j, 1)) == pytest.approx(math.exp(-2 * math.pi))
    assert q_power(0.25 + 0j + 1e-300j, 1) == pytest.approx(1j)


def test_partial_sums_within_tail_bound(space4):
    cfg = random_valid_config(space4, 5, "perturbed", 1)
    lat = Lattice(space4)
    maj = build_majorant(space4)
    s1 = theta_partial_sum(cfg, lat, 1j, 8)
    s2 = theta_partial_sum(cfg, lat, 1j, 16)
    rate = min(0.2014567070288023, s1["empirical_support_bound"])
    assert abs(s2["value"] - s1["value"]) < tail_bound(lat, maj, 8, 1.0, rate, cfg.N)


def test_tail_bound_dominates_explicit_shell(space4):
    lat = Lattice(space4)
    maj = build_majorant(space4)
    shell = enumerate_cloud(lat, maj, 60, lower=4)
    t = shell.maj_num.astype(float) / shell.maj_den
    direct = 2 * 5 * float(np.exp(-math.pi * 0.2 * t / 2).sum())
    assert tail_bound(lat, maj, 4, 1.0, 0.2, 5) >= direct


def test_scan_config_a_empty(config_a, z3):
    assert divergence_witness_scan(config_a, z3, 12) == []


def test_scan_config_b(config_b, z3):
    wit = divergence_witness_scan(config_b, z3, 5, reference=-1)
    hit = [w for w in wit if w["x"] == (2, 1, 0)]
    assert hit and hit[0]["norm"] == -5 and hit[0]["phi"] == 4
    assert all(w["norm"] < 0 and w["phi"] != 0 for w in wit)
    assert divergence_witness_scan(config_b, z3, 0, reference=-1) == []


def test_scan_agrees_with_oracle(config_b, z3):
    wit = {w["x"] for w in divergence_witness_scan(config_b, z3, 3, reference=-1)}
    ref = set()
    for a in range(-3, 4):
        for b in range(-3, 4):
            for c in range(-3, 4):
                x = (a, b, c)
                if oracles.ip(GRAM3, x, x) < 0 and oracles.w(GRAM3, config_b.vectors, x) != -1:
                    ref.add(x)
    assert wit == ref


def test_scan_requires_i1_i2(space3):
    cfg = ConeConfig(space3, [(0, 0, 1), (1, 0, 0), (0, 1, 0)])
    with pytest.raises(InvalidConfigError):
        divergence_witness_scan(cfg, None, 2, reference=0)


def test_expansion_json(config_a, z3):
    j = theta_coefficients(config_a, z3, 13).to_json()
    assert j["coeffs"] == [[1, 2, 2], [2, 1, 2], [9, 2, 2], [8, 1, 2], [25, 2, 2]]
    assert j["completeness"] == "certified"
    assert j["r_inf"] == "inf"
