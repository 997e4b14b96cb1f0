"""Smoke tests for the python bindings."""

import math

import pytest

import omqfi


def make_spec_i(g0=1.0, eps=0.5, omega_g=1.0):
    s = omqfi.CouplingSpec()
    s.g_form = omqfi.GForm.SineModulated
    s.g0 = g0
    s.epsilon = eps
    s.omega_g = omega_g
    s.theta = omqfi.Theta.G0
    return s


def test_coupling_eval():
    s = make_spec_i()
    assert omqfi.eval_G(s, 0.0) == pytest.approx(1.0)
    assert omqfi.eval_G(s, math.pi / 2) == pytest.approx(1.5)


def test_r_T_reference_point():
    r = omqfi.r_T_from_temperature(200e-9, 2 * math.pi * 100.0)
    assert r == pytest.approx(2.56, abs=0.01)


def test_reference_table():
    rep = omqfi.table1()
    assert rep.pass_
    assert rep.max_rel_deviation <= 0.01
    labels = [row.label for row in rep.rows]
    assert labels == ["r_T", "I_g0_res", "I_d1_res", "I_d2_res_app"]


def test_qfi_closed_forms_match_table():
    r_T = omqfi.r_T_from_temperature(200e-9, 2 * math.pi * 100.0)
    probe = omqfi.ProbeState(1000.0, r_T)
    val = omqfi.qfi_g0_res(100.0, 0.5, 2 * math.pi, probe).value
    assert val == pytest.approx(3.02e25, rel=0.01)
    val = omqfi.qfi_d1_res(100.0, 1.0, 2 * math.pi, probe).value
    assert val == pytest.approx(1.58e12, rel=0.01)


def test_mechanics_solution_invariants():
    s = omqfi.CouplingSpec()
    s.d2_form = omqfi.DriveForm.CosModulated
    s.d2 = 0.02
    s.omega_d2 = 2.0
    sol = omqfi.solve_mechanics(s, 10.0)
    assert sol.grid[0] == 0.0
    assert sol.p11[0] == 1.0
    for k in range(0, len(sol.grid), 200):
        wronskian = sol.p11[k] * sol.ip22_dot[k] - sol.p11_dot[k] * sol.ip22[k]
        assert wronskian == pytest.approx(1.0, abs=1e-8)
        assert abs(sol.alpha[k]) ** 2 - abs(sol.beta[k]) ** 2 == pytest.approx(
            1.0, abs=1e-8
        )


def test_pipeline_matches_closed_form():
    spec = make_spec_i(1.0, 0.5, 0.8)
    probe_val = omqfi.qfi_pipeline(spec, 10.0, 1.0, 0.0).value
    closed = omqfi.qfi_g0_general(1.0, 0.5, 0.8, 10.0, omqfi.ProbeState(1.0, 0.0)).value
    assert probe_val == pytest.approx(closed, rel=1e-6)


def test_cramer_rao():
    assert omqfi.cramer_rao(4.0, 1) == pytest.approx(0.5)
    assert omqfi.cramer_rao(0.0, 1) is None


def test_oracle_small_instance():
    spec = make_spec_i(0.1, 0.3, 1.0)
    q = omqfi.qfi_oracle(spec, 1.0, 0.3, 2.0, 14, 18)
    qa = omqfi.qfi_g0_res(0.1, 0.3, 2.0, omqfi.ProbeState(1.0, 0.3)).value
    assert q == pytest.approx(qa, rel=1e-3)


def test_compute_F_trivial_zero():
    spec = make_spec_i()
    f = omqfi.compute_F(spec, 0.0)
    assert f.f_na2 == 0.0 and f.f_nabp == 0.0
