from dataclasses import replace
from fractions import Fraction
import json
import math

import numpy as np
import pytest

from jjgates.designer import (
    PRINTED_XOR_MU,
    PRINTED_XOR_NU,
    DesignSolution,
    design_closed_form,
    design_constraints,
    design_numeric,
    gamma_for,
    p_coefficient,
    p_coefficient_minus_variant,
    printed_xor_design,
    select_design,
    timing_residuals,
    verify_design,
)
from jjgates.diagonalizer import PropagatorForm, solve_angles
from jjgates.errors import DegenerateParametersError, DesignError, ParameterError
from jjgates.report import dumps


@pytest.fixture(scope="module")
def xor_design():
    return design_numeric(math.pi / 2, 1)


def test_gamma_is_exact_rational():
    assert gamma_for(1) == Fraction(3, 2)
    assert gamma_for(2) == Fraction(5, 4)
    assert gamma_for(-1) == Fraction(1, 2)
    with pytest.raises(ParameterError):
        gamma_for(0)


def test_lambda_zero_rejected():
    with pytest.raises(ParameterError):
        design_numeric(0.0, 1)
    with pytest.raises(ParameterError):
        design_closed_form(2 * math.pi, 1)


def test_numeric_xor_design(xor_design):
    d = xor_design
    assert d.certified and d.method == "numeric"
    assert d.mu == pytest.approx(1.377961158827728, abs=1e-8)
    assert d.nu == pytest.approx(-0.2946278254943948, abs=1e-8)
    # same coupling magnitude as the printed example
    assert abs(d.nu) == pytest.approx(PRINTED_XOR_NU, abs=1e-10)
    assert d.gamma == Fraction(3, 2)


@pytest.mark.parametrize("lam", [math.pi / 2, math.pi / 3])
@pytest.mark.parametrize("m", [1, 2])
def test_numeric_designs_certify(lam, m):
    d = design_numeric(lam, m)
    rep = verify_design(d)
    assert 1 - rep.fidelity < 1e-9
    assert rep.details["certified"]
    assert rep.details["lambda_mismatch_mod_2pi"] < 1e-9
    r_k, r_l = timing_residuals(d)
    assert abs(r_k) < 1e-9 and abs(r_l) < 1e-9
    assert d.omega_k_prime / d.omega_l_prime == pytest.approx(float(d.gamma), rel=1e-10)


def test_m2_timing():
    d = design_numeric(math.pi / 2, 2)
    assert d.t_p == pytest.approx(5 * math.pi / abs(d.omega_k_prime), rel=1e-12)


def test_negative_m():
    d = design_numeric(math.pi / 2, -1)
    assert d.gamma == Fraction(1, 2)
    assert d.certified
    assert verify_design(d).details["propagator_form"] == PropagatorForm.PLUS.value


def test_perturbed_time_fails(xor_design):
    bad = replace(xor_design, t_p=xor_design.t_p * 1.01)
    rep = verify_design(bad)
    assert rep.fidelity < 1 - 1e-4
    assert not rep.details["certified"]


def test_degenerate_design_surfaces():
    d = replace(design_numeric(math.pi / 2, 1), nu=0.0)
    with pytest.raises(DegenerateParametersError):
        verify_design(d)


def test_numeric_reseeded_converges_to_same_root(xor_design):
    again = design_numeric(math.pi / 2, 1, starts=np.array([[xor_design.mu + 0.01, xor_design.nu - 0.01]]))
    assert again.mu == pytest.approx(xor_design.mu, abs=1e-6)
    assert again.nu == pytest.approx(xor_design.nu, abs=1e-6)


def test_numeric_failure_summary():
    with pytest.raises(DesignError, match="starts"):
        # zero coupling: singular everywhere
        design_numeric(math.pi / 2, 1, starts=np.array([[1.0, 0.0]]))


def test_closed_form_is_advisory():
    # the quadratic's roots are simulated, never trusted; none of them certify here
    cands = design_closed_form(math.pi / 2, 1)
    assert len(cands) == 2
    assert all(c.method == "closed_form" for c in cands)
    assert not any(c.certified for c in cands)
    assert {c.root_index for c in cands} == {0, 1}
    with pytest.raises(DesignError):
        select_design(cands)


def test_closed_form_small_angle_cross_check():
    lam = 0.01
    assert p_coefficient(lam) == pytest.approx(math.tan(lam / 4) / 2, rel=1e-4)
    cands = design_closed_form(lam, 1)
    numeric = design_numeric(lam, 1)
    assert numeric.certified
    # the small closed-form root sits at 1/gamma, the numeric one at gamma: opposite orientation
    small = min(cands, key=lambda c: c.mu)
    assert small.mu == pytest.approx(1 / 1.5, abs=1e-5)
    assert numeric.mu == pytest.approx(1.5, abs=1e-4)


def test_select_prefers_weak_coupling(xor_design):
    strong = replace(xor_design, nu=-2.0)
    assert select_design([strong, xor_design]) is xor_design


def test_constraint_flags():
    assert design_constraints(PRINTED_XOR_MU, PRINTED_XOR_NU, math.pi / 2, 1.5)[0]
    assert not design_constraints(0.1, 0.1, math.pi / 2, 1.5)[0]


def test_printed_example_values():
    d = printed_xor_design()
    assert d.mu == pytest.approx(0.78870, abs=1e-5)
    assert d.nu == pytest.approx(0.29463, abs=1e-5)
    sol = solve_angles(d.spin_params)
    # the printed ratio holds with the labels exchanged
    assert sol.omega_l_prime / sol.omega_k_prime == pytest.approx(1.5, rel=1e-12)
    assert abs(sol.omega_l_prime) == pytest.approx(math.sqrt(26 - 5 * math.sqrt(2)) / 4, rel=1e-12)
    rep = verify_design(d)
    assert rep.fidelity > 1 - 1e-9
    assert not rep.details["timing_ok"]
    assert rep.details["propagator_form"] == PropagatorForm.NEITHER.value


def test_p_variant_reproduces_printed_example_only_at_quarter_turn():
    lam = math.pi / 2
    p = p_coefficient_minus_variant(lam)
    assert p == pytest.approx(math.tan(math.pi / 8), rel=1e-12)
    assert PRINTED_XOR_NU == pytest.approx(p * (1.5 - PRINTED_XOR_MU), rel=1e-12)
    assert p_coefficient(lam) != pytest.approx(p)


def test_design_round_trip(xor_design):
    data = json.loads(dumps(xor_design))
    assert data["gamma"] == {"num": 3, "den": 2}
    back = DesignSolution.from_dict(data)
    assert back == xor_design
    data["gamma"] = {"num": 5, "den": 4}
    with pytest.raises(ParameterError):
        DesignSolution.from_dict(data)
