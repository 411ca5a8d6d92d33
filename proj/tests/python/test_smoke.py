import math

import pytest

import eyewit


def test_fock_click_probability():
    eye = eyewit.DetectorModel()
    assert eyewit.click_prob_fock(0, eye) == 0.0
    assert eyewit.click_prob_fock(6, eye) == 0.0
    assert 0.0 < eyewit.click_prob_fock(100, eye) < 1.0


def test_vacuum_displacement_is_coherent():
    alpha = 1.3
    amp = eyewit.displaced_fock_amplitude(2, 0, alpha)
    expected = math.exp(-alpha**2 / 2) * alpha**2 / math.sqrt(2)
    assert amp.real == pytest.approx(expected, rel=1e-12)
    assert abs(amp.imag) < 1e-15


def test_g2_crossing_for_eye():
    points = eyewit.superposition_g2_scan([5.0, 10.0])
    assert all(g2 < 1.0 for _, _, _, g2 in points)
    crossing = eyewit.find_g2_crossing(10.0, 15.0)
    assert 13.1 < crossing < 13.5


def test_conditional_state():
    s = eyewit.conditional_state()
    assert s["p_click_given_herald"] == pytest.approx(0.0111, abs=2e-4)
    assert 0.9 < s["fidelity_plus"] < 1.0


def test_plan_and_critical_value():
    cell = eyewit.chain_cell()
    plan = eyewit.Plan(cell, a=40.0, epsilon=0.1)
    chi0 = plan.critical_chi0(20000, strategy=eyewit.ClassicalStrategy.projected)
    assert 0.0 < plan.p_stop(20000, chi0) < 1.0
    assert plan.p_stop(20000, chi0 - 0.01) <= plan.p_stop(20000, chi0)


def test_errors_carry_codes():
    with pytest.raises(eyewit.EyewitError) as info:
        eyewit.DetectorModel(theta=0)
    assert info.value.code == "validation_error"


def test_cli_version():
    code, out, _ = eyewit.run_cli(["--version"])
    assert code == 0
    assert eyewit.__version__ in out


def test_minimize_quadratic():
    x, value, evaluations, exhausted = eyewit.minimize(
        lambda v: (v[0] - 0.3) ** 2 + (v[1] + 0.2) ** 2, [(-1.0, 1.0, 5), (-1.0, 1.0, 5)], budget=500
    )
    assert not exhausted
    assert evaluations <= 500
    assert x[0] == pytest.approx(0.3, abs=1e-2)
    assert value < 1e-4
