"""Optimizer tests: analytic optima, determinism, bracket handling."""

import math

import pytest

import weakrev as wr
from weakrev import BracketError, NumericalError, find_critical_p, maximize_over_r


def test_quadratic_peak_found():
    res = maximize_over_r(lambda r: 1.0 - (r - 0.3) ** 2)
    assert res.r_opt == pytest.approx(0.3, abs=1e-7)
    assert res.value_opt == pytest.approx(1.0, abs=1e-12)


def test_constant_objective_prefers_zero():
    res = maximize_over_r(lambda r: 0.75)
    assert res.r_opt == 0.0
    assert res.value_opt == 0.75


def test_boundary_maximum_at_high_r():
    # Monotone objective: the best point is the last grid node, just
    # under the open endpoint at r = 1.
    res = maximize_over_r(lambda r: r)
    assert res.r_opt == pytest.approx(1.0, abs=1e-6)
    assert res.r_opt < 1.0


def test_non_finite_objective_raises():
    with pytest.raises(NumericalError):
        maximize_over_r(lambda r: math.inf if r > 0.5 else r)
    with pytest.raises(NumericalError):
        maximize_over_r(lambda r: float("nan"))


def test_bad_tolerance_raises():
    with pytest.raises(NumericalError):
        maximize_over_r(lambda r: r, tolerance=0.0)


def test_refinement_never_loses_to_grid():
    for shift in (0.0, 0.1234567, 0.87):
        res = maximize_over_r(lambda r, m=shift: -((r - m) ** 2))
        assert res.value_opt >= -((0.0 - shift) ** 2) - 1e-12
        assert res.value_opt >= -1e-13


def test_deterministic_across_calls():
    calls = []
    for _ in range(2):
        res = maximize_over_r(lambda r: math.sin(3.0 * r) + 0.2 * r)
        calls.append((res.r_opt, res.value_opt, res.evaluations))
    assert calls[0] == calls[1]
    assert calls[0][2] > wr.optimize.GRID_POINTS


def test_transmissivity_callback_reported():
    res = maximize_over_r(lambda r: 1.0 - (r - 0.5) ** 2,
                          transmissivity=lambda r: 1.0 - 0.5 * r)
    assert res.transmissivity_at_opt == pytest.approx(1.0 - 0.5 * res.r_opt, abs=1e-12)
    assert maximize_over_r(lambda r: r).transmissivity_at_opt is None


def test_protocol_fidelity_matches_brute_grid():
    # Cross-check the two-stage optimizer against a dense scan on the same
    # objective the acceptance sweeps use.
    def objective(r):
        return wr.fidelity_is_closed(4, 0.5, 0.4, r)

    res = maximize_over_r(objective)
    best = max(objective(k / 99999.0 * (1.0 - 1e-9)) for k in range(100000))
    assert res.value_opt >= best - 1e-6
    assert res.value_opt >= objective(0.0) - 1e-12


def test_critical_p_bisection_against_closed_form():
    # The correlation amplitude of the balanced four-qubit state without
    # weak protection dies at 1/sqrt(7); bisection on the raw curve must
    # land there.
    gp = wr.GhzParams(theta=math.pi / 2, n=4)

    def curve(p):
        return wr.mw_global_entanglement(gp, wr.ProtocolParams(s=0.0, p=p, r=0.0)).c_n

    res = find_critical_p(curve, threshold=0.0, p_lo=0.05, p_hi=0.95, width=1e-10)
    assert res.p_critical == pytest.approx(1.0 / math.sqrt(7.0), abs=1e-9)
    assert res.bracket_width <= 1e-10


def test_critical_p_requires_downward_bracket():
    with pytest.raises(BracketError):
        find_critical_p(lambda p: 1.0, threshold=0.0, p_lo=0.1, p_hi=0.9)
    with pytest.raises(BracketError):
        find_critical_p(lambda p: -p, threshold=0.0, p_lo=0.1, p_hi=0.9)
    with pytest.raises(BracketError):
        find_critical_p(lambda p: 1.0 - p, threshold=0.0, p_lo=0.9, p_hi=0.1)
    with pytest.raises(NumericalError):
        find_critical_p(lambda p: 1.0 - p, threshold=0.0, p_lo=0.1, p_hi=0.9, width=0.0)


def test_critical_p_linear_crossing_exact():
    res = find_critical_p(lambda p: 0.5 - p, threshold=0.0, p_lo=0.0, p_hi=1.0, width=1e-12)
    assert res.p_critical == pytest.approx(0.5, abs=1e-11)


def test_critical_p_handles_float_resolution_floor():
    # Asking for a bracket below float spacing must still terminate.
    res = find_critical_p(lambda p: 0.5 - p, threshold=0.0, p_lo=0.0, p_hi=1.0, width=1e-18)
    assert res.p_critical == pytest.approx(0.5, abs=1e-12)


def test_teleportation_curve_crossing_is_a_true_sign_change():
    # The unprotected teleportation average dips under the classical limit
    # mid-range and climbs back to exactly 2/3 at p = 1, so the bracketed
    # bisection isolates the interior downward crossing.
    def curve(p):
        return wr.fidelity_tel_closed(3, 0.0, p, 0.0)

    assert curve(1.0) == 2.0 / 3.0
    res = find_critical_p(curve, threshold=2.0 / 3.0, p_lo=0.0, p_hi=1.0, width=1e-9)
    assert 0.0 < res.p_critical < 0.9
    assert curve(res.p_critical - 1e-6) > 2.0 / 3.0 > curve(res.p_critical + 1e-6)
