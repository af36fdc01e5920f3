import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_monotone
from fhslab import functionals as fn
from fhslab import verification as vf
from fhslab.params import make_params
from fhslab.profiles import Grid, RadialProfile, candidate_extremal, from_function, layer_cake_decompose, tent


# -- decay ---------------------------------------------------------------------------------------

@pytest.mark.parametrize("k", [0.2, 1.0, 2.0, 3.5])
def test_pure_power_exact(grid, k):
    u = from_function(lambda r: np.maximum(r, 1e-3) ** (-k), grid, 3, k)
    assert vf.fit_decay_exponent(u, (1e2, 1e4)) == pytest.approx(k, rel=1e-9)


def test_decay_window_validation(U3):
    with pytest.raises(vf.VerificationError):
        vf.fit_decay_exponent(U3, (1e2, 5e3))
    u = tent(Grid(), 3, 10.0)
    with pytest.raises(vf.VerificationError):
        vf.fit_decay_exponent(u, (1e2, 1e4))


def test_decay_check_extremal(U3, p3):
    rep = vf.decay_check(U3, p3)
    assert rep.passed
    assert rep.measured["exponent"] == pytest.approx(2.0, rel=0.02)
    assert rep.refinement_delta < rep.tolerance / 2
    assert not rep.notes


# -- gamma sweep ---------------------------------------------------------------------------------

def test_threshold_value(p3):
    assert p3.gamma_threshold == pytest.approx(1.2, abs=1e-15)


@pytest.fixture(scope="module")
def sweep(U3, p3):
    return vf.gamma_sweep(U3, p3, [1.0, 2.0])


def test_gamma_sweep_below_and_above(sweep):
    assert sweep.passed
    below = sweep.measured["gamma=1"]
    assert below["growth_exponent"] == pytest.approx(0.5, rel=0.1)
    assert below["full_seminorm"] == math.inf
    above = sweep.measured["gamma=2"]
    assert above["growth_per_decade"] < 0.01
    assert math.isfinite(above["full_seminorm"])


def test_gamma_sweep_rows_csv(sweep):
    rows = list(csv.reader(io.StringIO(sweep.rows_csv())))
    assert rows[0] == ["parameter", "measured", "target", "margin"]
    assert len(rows) == 3
    assert float(rows[1][2]) == pytest.approx(0.5)


def test_finiteness_monotone_in_gamma(U3, p3):
    # no finite full seminorm below a divergent one
    gammas = [0.8, 1.0, 1.15, 1.19, 1.21, 1.3, 1.6, 2.0]
    finite = [math.isfinite(fn.seminorm_power(U3, p3.s, g)) for g in gammas]
    assert finite == sorted(finite)
    assert finite.index(True) == gammas.index(1.21)


def test_gamma_sweep_rejects_bad_gamma(U3, p3):
    with pytest.raises(vf.VerificationError):
        vf.gamma_sweep(U3, p3, [2.5])


# -- dyadic layers -------------------------------------------------------------------------------

@pytest.mark.parametrize("gamma,target", [(2.0, -2.0), (1.5, -0.75)])
def test_dyadic_slope(U3, p3, gamma, target):
    rep = vf.dyadic_layer_check(U3, gamma, p3)
    assert rep.passed
    assert rep.measured["slope"] == pytest.approx(target, abs=0.1)
    assert rep.measured["sup_bound_holds"]
    assert math.isfinite(rep.measured["sum_energies"])
    if gamma == 2.0:
        assert rep.measured["slope"] <= -1.9


def test_dyadic_slope_at_threshold(U3, p3):
    rep = vf.dyadic_layer_check(U3, p3.gamma_threshold, p3)
    assert abs(rep.measured["slope"]) <= 0.1


def test_layer_sup_bound_exact(U3):
    dec = layer_cake_decompose(vf.dyadic_resample(U3))
    for layer, h in zip(dec.layers, dec.base_heights):
        assert float(layer.values.max()) <= h


def test_dyadic_needs_layers(U3, p3):
    with pytest.raises(vf.VerificationError):
        vf.dyadic_layer_check(U3, 2.0, p3, K=5)
    with pytest.raises(vf.VerificationError):
        vf.dyadic_layer_check(U3, 1.0, p3)


# -- interpolation scaling -------------------------------------------------------------------------

def test_interpolation_exponent():
    P = make_params(3, 2.0, 0.5, 0.0)
    u = tent(Grid(), 3, 1.0)
    rep = vf.interpolation_scaling_check(u, 0.6, 0.3, 1.5, P)
    assert rep.measured["radius_exponent"] == pytest.approx(0.53, abs=1e-12)
    assert all(q > 0 and math.isfinite(q) for q in rep.measured["Q"])
    assert rep.measured["spread"] < 0.1
    assert rep.passed


def test_interpolation_rejects_noncompact(U3, p3):
    with pytest.raises(vf.VerificationError):
        vf.interpolation_scaling_check(U3, 0.6, 0.3, 1.5, p3)


# -- cutoff bound --------------------------------------------------------------------------------------

def test_cutoff_transfer_and_far_field():
    rep = vf.cutoff_bound_check(vf.Bump(radius=2.0), 1.5, 0.5, 3)
    assert rep.passed
    assert rep.measured["sup_ratio"] <= 1.0 + 1e-3
    assert rep.measured["far_slope"] == pytest.approx(-(3 + 1.5 * 0.5), rel=0.05)


def test_cutoff_constant_skipped():
    rep = vf.cutoff_bound_check(vf.Bump(radius=math.inf), 1.5, 0.5, 3)
    assert rep.verdict == "informational"
    assert rep.notes


# -- Hardy chain -----------------------------------------------------------------------------------

def test_hardy_chain_extremal():
    P = make_params(3, 2.0, 0.5, 0.5)
    u = candidate_extremal(make_params(3, 2.0, 0.5, 0.0))
    rep = vf.hardy_chain_check(u, P)
    assert rep.passed
    assert rep.measured["margin"] > 0


def test_hardy_prefactor_at_evaluation_only():
    P = make_params(3, 2.0, 0.5, 1.0)
    u = candidate_extremal(make_params(3, 2.0, 0.5, 0.0))
    lhs, rhs, pref = vf.hardy_chain_sides(u, P)
    assert pref == 1.0
    assert lhs == pytest.approx(rhs, rel=1e-12)


@given(seed=st.integers(0, 10**6), alpha=st.floats(0.0, 0.95))
def test_hardy_never_violated(seed, alpha):
    P = make_params(3, 2.0, 0.5, alpha)
    u = random_monotone(np.random.default_rng(seed), Grid(1e-3, 1e4, 256), 3, P.decay_exp, P)
    rep = vf.hardy_chain_check(u, P)
    assert rep.verdict in ("pass", "informational")


def test_hardy_rejects_non_monotone(p3, grid):
    u = RadialProfile(grid, np.linspace(0, 1, grid.M + 1), 2.0, 3)
    with pytest.raises(vf.VerificationError):
        vf.hardy_chain_check(u, p3)


# -- summability -------------------------------------------------------------------------------------

def test_summability_exponent(p3):
    assert vf.summability_exponent(p3, 1.2) == pytest.approx(2.0, abs=1e-12)


def test_summability_identity_exact(p3):
    u = candidate_extremal(p3, Grid(1e-3, 1e4, 128))
    rep = vf.summability_scale_check(u, p3, scalings=((1.0, 1.0),))
    assert rep.measured["ratios"][0] == rep.measured["base_ratio"]
    assert rep.passed


def test_summability_range(U3, p3):
    with pytest.raises(vf.VerificationError):
        vf.summability_scale_check(U3, p3, r=3.5)


# -- Besov ---------------------------------------------------------------------------------------------

def test_besov_exponents(p3):
    theta, sigma = vf.besov_exponents(p3)
    assert theta == pytest.approx(p3.p / p3.pstar)
    assert sigma == pytest.approx(p3.s * p3.p / (p3.p - theta))
    P = make_params(3, 1.5, 0.5, 0.0)
    theta, sigma = vf.besov_exponents(P)
    assert sigma == pytest.approx(2 * 0.5 / (2 - theta))


def test_besov_constant_zero(grid):
    P = make_params(3, 2.0, 0.5, 0.0)
    u = RadialProfile(grid, np.full(grid.M + 1, 1.0), 0.0, 3, "linear", P)
    rep = vf.besov_regularity_check(u, P, per_decade=2)
    assert rep.measured["sup"] == 0
    assert rep.passed


def test_besov_extremal_bounded(U3, p3):
    rep = vf.besov_regularity_check(U3, p3, per_decade=4)
    assert rep.passed
    assert rep.measured["growth"] < 10


# -- reports and registry --------------------------------------------------------------------------------

def test_verdict_rule():
    assert vf._verdict(True, 0.0, 0.1) == "pass"
    assert vf._verdict(True, 0.06, 0.1) == "fail"
    assert vf._verdict(False, 0.0, 0.1) == "fail"


def test_run_checks_skips_on_non_monotone(p3, grid):
    u = RadialProfile(grid, np.linspace(0, 1, grid.M + 1) * 0 + np.r_[np.ones(10), 2 * np.ones(grid.M - 9)],
                      2.0, 3)
    reps = vf.run_checks(u, p3, ["monotonicity", "decay", "hardy_chain"])
    assert [r.verdict for r in reps] == ["fail", "informational", "informational"]
    with pytest.raises(vf.VerificationError):
        vf.run_checks(u, p3, ["nonsense"])


def test_reports_deterministic(U3, p3):
    a = vf.run_checks(U3, p3, ["monotonicity", "decay", "dyadic_layers", "hardy_chain"])
    b = vf.run_checks(U3, p3, ["monotonicity", "decay", "dyadic_layers", "hardy_chain"])
    assert [r.to_json() for r in a] == [r.to_json() for r in b]
    assert all(r.passed for r in a)


def test_refinement_trend():
    # measured quantities move toward their targets over successive grid refinements
    from oracles import extremal_seminorm_p2

    P = make_params(1, 2.0, 0.4, 0.0)
    spreads, errs = [], []
    for M in (129, 257, 513):
        u = candidate_extremal(P, Grid(1e-3, 1e4, M))
        spreads.append(vf.ratio_spread(vf.extremal_ratio(u, P)[1]))
        errs.append(abs(fn.seminorm_power(u, 0.4, 2.0) / extremal_seminorm_p2(1, 0.4) - 1))
    assert spreads[0] > spreads[1] > spreads[2]
    assert errs[0] > errs[1] > errs[2]
