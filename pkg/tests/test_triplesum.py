"""Triple counts, band integrals, main term, and the bound chains."""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pstriples.kernel import make_kernel, theta, transform_bound
from pstriples.params import Coefficients, ParameterError, derive_parameters
from pstriples.primes import sieve_primes, ps_primes_in
from pstriples.triplesum import (
    big_gamma_direct,
    box_integral_B,
    decompose,
    far_tail_majorant,
    find_triples,
    gamma2_majorant,
    gamma_piece,
    integral_J,
    middle_band_sweep,
    phi_bound,
    piece3_truncation,
    tail_bound_gamma3,
    threshold_vacuous,
    triple_sum_bruteforce,
    triple_threshold,
)

SQRT2 = math.sqrt(2)

TABLE = sieve_primes(10000)


def _instance(q0, gamma, lam0, eps_user):
    params = derive_parameters(q0, gamma, lam0, epsilon_user=eps_user)
    pset = ps_primes_in(params.lambda0 * params.X, params.X, gamma, TABLE)
    return params, pset


def _kernel_for(params):
    return make_kernel(
        params.epsilon_effective, max(1, math.floor(params.log_X))
    )


# ---------------------------------------------------------------------------
# direct count


def test_small_set_contains_2_3_5():
    # q0=3, lambda0=0.15: window (1.62, 10.81] holds the floor-power
    # primes {2, 3, 5, 7}; with l=(1,1,-1) the form vanishes at (2,3,5).
    params, pset = _instance(3, 0.9, 0.15, 0.5)
    assert all(p in pset.primes for p in (2, 3, 5))
    c = Coefficients(1.0, 1.0, -1.0, 0.0)
    recs = find_triples(params, c, pset, 0.5, max_results=50)
    hit = [r for r in recs if (r.p1, r.p2, r.p3) == (2, 3, 5)]
    assert len(hit) == 1
    assert hit[0].form_value == 0.0
    # the weight carries (p1 p2 p3)^(1-gamma): the sum-side factors
    # p^(1-gamma) log p force it on the direct side as well
    expected = 30 ** 0.1 * math.log(2) * math.log(3) * math.log(5)
    assert hit[0].weight == pytest.approx(expected, rel=1e-12)
    forms = [abs(r.form_value) for r in recs]
    assert forms == sorted(forms)
    assert all(f < 0.5 for f in forms)


def test_direct_matches_inline_loop_oracle():
    # plain triple loop, written out independently of the sweep
    params, pset = _instance(3, 0.9, 0.15, 0.5)
    c = Coefficients(1.0, 1.0, -1.0, 0.0)
    kern = make_kernel(0.5, 2)
    total = 0.0
    found = 0
    for p1 in pset.primes:
        for p2 in pset.primes:
            for p3 in pset.primes:
                form = 1.0 * p1 + 1.0 * p2 - 1.0 * p3
                if abs(form) < 0.5:
                    found += 1
                    w = (float(p1 * p2 * p3)) ** 0.1
                    w *= math.log(p1) * math.log(p2) * math.log(p3)
                    total += w * theta(kern, form)
    res = big_gamma_direct(params, c, kern, pset, 0.5)
    assert res.triples_found == found == 4
    assert res.value == pytest.approx(total, rel=1e-13)


@pytest.mark.parametrize(
    "q0,coeffs,eps",
    [
        (20, Coefficients(1.0, 1.0, -2.0, 0.0), 2.0),
        (30, Coefficients(1.0, SQRT2, -2.0, 0.0), 5.0),
        (45, Coefficients(1.0, SQRT2, -2.0, 0.3), 1.0),
        (45, Coefficients(2.0, -1.0, -1.0, 0.0), 3.0),
    ],
)
def test_sweep_equals_bruteforce(q0, coeffs, eps):
    params, pset = _instance(q0, 0.9, 0.5, eps)
    assert 3 < pset.count <= 200
    kern = make_kernel(eps, max(1, math.floor(params.log_X)))
    fast = big_gamma_direct(params, coeffs, kern, pset, eps)
    slow = triple_sum_bruteforce(params, coeffs, kern, pset, eps)
    assert fast.triples_found == slow.triples_found
    assert abs(fast.value - slow.value) <= 1e-10 * max(1.0, abs(slow.value))


@settings(max_examples=25, deadline=None)
@given(
    eps=st.floats(0.1, 5.0),
    eta=st.floats(-3.0, 3.0),
)
def test_sweep_equals_bruteforce_property(eps, eta):
    params, pset = _instance(12, 0.9, 0.5, 2.0)
    c = Coefficients(1.0, 1.0, -2.0, eta)
    kern = make_kernel(eps, 3)
    fast = big_gamma_direct(params, c, kern, pset, eps)
    slow = triple_sum_bruteforce(params, c, kern, pset, eps)
    # window populations may disagree when a form lands within rounding
    # of the search width (theta vanishes there, so totals still agree);
    # the weighted total is the contract
    assert abs(fast.value - slow.value) <= 1e-10 * max(1.0, abs(slow.value))


def test_empty_set_flagged():
    # q0=2, lambda0=0.9: the window (4.04, 4.49] holds no primes at all
    params, pset = _instance(2, 0.9, 0.9, 0.5)
    assert pset.count == 0
    c = Coefficients(1.0, 1.0, -1.0, 0.0)
    kern = make_kernel(0.5, 1)
    res = big_gamma_direct(params, c, kern, pset, 0.5)
    assert res.value == 0.0
    assert res.triples_found == 0
    assert res.empty_set


def test_unreachable_shift_gives_zero():
    # eta far beyond the window's reach: no form can come near zero
    params, pset = _instance(25, 0.9, 0.5, 1.0)
    assert pset.count > 3
    c = Coefficients(1.0, 1.0, -2.0, 1.0e6)
    kern = make_kernel(1.0, 4)
    res = big_gamma_direct(params, c, kern, pset, 1.0)
    assert res.value == 0.0
    assert res.triples_found == 0
    assert not res.empty_set


def test_guards_reject_mismatches():
    params, pset = _instance(12, 0.9, 0.5, 2.0)
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    with pytest.raises(ParameterError, match="kernel width"):
        big_gamma_direct(params, c, make_kernel(1.0, 3), pset, 2.0)
    other, _ = _instance(20, 0.9, 0.5, 2.0)
    with pytest.raises(ParameterError, match="window"):
        big_gamma_direct(other, c, make_kernel(2.0, 3), pset, 2.0)
    wrong_gamma = ps_primes_in(
        params.lambda0 * params.X, params.X, 0.91, TABLE
    )
    with pytest.raises(ParameterError, match="gamma"):
        big_gamma_direct(params, c, make_kernel(2.0, 3), wrong_gamma, 2.0)


# ---------------------------------------------------------------------------
# explicit triples


def test_find_triples_degenerate_set():
    # window (2.02, 4.49] holds a single prime: degenerate by convention
    params, pset = _instance(2, 0.9, 0.45, 0.5)
    assert pset.count < 3
    c = Coefficients(1.0, 1.0, -1.0, 0.0)
    assert find_triples(params, c, pset, 0.5) == []


def test_find_triples_re_verified_and_sorted():
    params, pset = _instance(70, 0.98, 0.5, 0.05)
    assert pset.count > 100
    c = Coefficients(1.0, SQRT2, -2.0, 0.0)
    recs = find_triples(params, c, pset, 0.05, max_results=500)
    assert recs
    forms = [abs(r.form_value) for r in recs]
    assert forms == sorted(forms)
    g = params.gamma.value
    for r in recs:
        assert abs(r.form_value) < 0.05
        assert r.weight > 0.0
        # the admissibility width at these scales dwarfs any search
        # width: the tenth log power dominates
        assert r.threshold_value > 1.0
        assert r.within_threshold
        assert r.threshold_value == pytest.approx(
            triple_threshold(g, max(r.p1, r.p2, r.p3)), rel=1e-12
        )


def test_triple_threshold_formula():
    thr = triple_threshold(0.98, 9929)
    lp = mp.log(9929)
    expected = float(mp.e ** ((37 - 38 * mp.mpf("0.98")) / 26 * lp) * lp**10)
    assert thr == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ParameterError):
        triple_threshold(0.98, 1)


def test_threshold_vacuous_at_desk_scale():
    # formula width exceeds the attainable |form| by many orders here
    params, _ = _instance(70, 0.98, 0.5, 0.05)
    c = Coefficients(1.0, SQRT2, -2.0, 0.0)
    assert threshold_vacuous(params, c)
    reach = (1 + SQRT2 + 2) * params.X
    assert params.epsilon > reach


# ---------------------------------------------------------------------------
# band integrals and closure


def test_decomposition_closes_on_feasible_instance():
    # l=(1,1,-2) with eps=2: the only admissible forms are the exact
    # zeros p1+p2 = 2*p3 (the diagonal), so the direct side is a clean
    # reference for the three band integrals
    params, pset = _instance(12, 0.9, 0.5, 2.0)
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    res = decompose(params, c, pset)
    assert res.triples_found == pset.count == 9
    assert res.direct_value == pytest.approx(5541.591755455742, rel=1e-12)
    assert res.closure_error is not None
    assert res.closure_error <= 0.01
    assert res.closure_error <= 1e-8
    # symmetric-grid band: imaginary residue at grid noise
    assert abs(res.gamma1.imag) <= 1e-8 * abs(res.gamma1)
    assert res.gamma2.imag == 0.0
    assert res.gamma3.imag == 0.0
    # the truncated far band is genuinely nonempty on this instance
    assert not res.truncation_empty
    assert res.piece3_cut > params.H_effective
    assert res.gamma3.real != 0.0


def test_decomposition_closes_with_shift():
    params, pset = _instance(12, 0.9, 0.5, 2.0)
    c = Coefficients(1.0, 1.0, -2.0, 0.3)
    res = decompose(params, c, pset)
    assert res.direct_value and res.direct_value > 0.0
    assert res.closure_error <= 1e-5
    # conjugate symmetry pairs t with -t for any real shift: the main
    # band stays real up to grid noise
    assert abs(res.gamma1.imag) <= 1e-8 * abs(res.gamma1)


def test_gamma_piece_matches_decompose():
    params, pset = _instance(12, 0.9, 0.5, 2.0)
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    kern = _kernel_for(params)
    res = decompose(params, c, pset, kernel=kern)
    assert gamma_piece(1, params, c, kern, pset) == res.gamma1
    assert gamma_piece(2, params, c, kern, pset) == res.gamma2
    assert gamma_piece(3, params, c, kern, pset) == res.gamma3
    with pytest.raises(ParameterError, match="piece"):
        gamma_piece(4, params, c, kern, pset)


def test_decompose_deterministic():
    params, pset = _instance(12, 0.9, 0.5, 2.0)
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    a = decompose(params, c, pset, with_direct=False)
    b = decompose(params, c, pset, with_direct=False)
    assert a.gamma_total == b.gamma_total
    assert a.middle.t_integrals == b.middle.t_integrals


def test_truncation_point_formula():
    params, _ = _instance(12, 0.9, 0.5, 2.0)
    kern = make_kernel(2.0, 5)
    t_cut = piece3_truncation(params, kern)
    g = params.gamma.value
    tol = 1e-12 * params.X ** (3 - 3 * g)
    log_c = mp.log(4 * 5 / (mp.pi * 2.0))
    expected = float(
        mp.e ** ((5 * log_c - mp.log(mp.pi) - mp.log(tol)) / 6)
    )
    assert t_cut == pytest.approx(expected, rel=1e-12)
    # at the cut the transform bound sits exactly at the tolerance
    assert transform_bound(kern, t_cut) == pytest.approx(tol, rel=1e-9)


# ---------------------------------------------------------------------------
# middle band majorant


def test_middle_band_stats_without_kernel():
    params, pset = _instance(12, 0.9, 0.5, 2.0)
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    with_k = middle_band_sweep(params, c, pset, _kernel_for(params))
    without = middle_band_sweep(params, c, pset)
    assert without.half_integral is None and without.gamma2 is None
    assert with_k.t_integrals == without.t_integrals
    assert with_k.sup_small_pair == without.sup_small_pair
    assert with_k.cross_integral == without.cross_integral
    assert with_k.gamma2 is not None


def test_majorant_chain_holds():
    params, pset = _instance(12, 0.9, 0.5, 2.0)
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    band = middle_band_sweep(params, c, pset, _kernel_for(params))
    maj = gamma2_majorant(params, c, pset, band=band)
    g2 = abs(band.gamma2)
    assert g2 <= maj.bound_cross <= maj.bound_squares <= maj.bound_factored
    assert maj.value == maj.bound_squares
    assert maj.sup_small_pair > 0.0
    assert all(t > 0.0 for t in maj.t_integrals)
    assert maj.sup_shape_ratio > 0.0
    assert all(r > 0.0 for r in maj.t_shape_ratios)
    fresh = gamma2_majorant(params, c, pset)
    assert fresh.bound_squares == maj.bound_squares


# ---------------------------------------------------------------------------
# main term


def test_main_band_interval_integral_comparisons():
    params, pset = _instance(8, 0.9, 0.5, 1.0)
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    kern = _kernel_for(params)
    j = integral_J(params, c, kern)
    box = box_integral_B(params, c, kern)
    phi = phi_bound(params, kern, c)
    assert box.feasible and box.converged
    assert j > 0.0 and box.value > 0.0
    assert abs(j - box.value) <= phi.value


def test_main_band_vanishes_for_huge_shift():
    params, _ = _instance(8, 0.9, 0.5, 1.0)
    kern = _kernel_for(params)
    j0 = integral_J(params, Coefficients(1.0, 1.0, -2.0, 0.0), kern)
    jh = integral_J(params, Coefficients(1.0, 1.0, -2.0, 1.0e6), kern)
    assert abs(jh) <= 1e-6 * abs(j0)


def test_main_band_scales_like_x_squared():
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    ratios = []
    for q0 in (8, 17, 36):
        params = derive_parameters(q0, 0.9, 0.5, epsilon_user=1.0)
        kern = _kernel_for(params)
        ratios.append(integral_J(params, c, kern) / params.X**2)
    assert max(ratios) / min(ratios) <= 1.01


def test_box_integral_monte_carlo_oracle():
    # 1e7-sample Monte-Carlo of the triple integral, fixed seed
    params = derive_parameters(8, 0.9, 0.5, epsilon_user=1.0)
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    kern = make_kernel(1.0, 4)
    box = box_integral_B(params, c, kern)
    rng = np.random.default_rng(20260822)
    lo, hi = 0.5 * params.X, params.X
    n, chunk = 10_000_000, 2_500_000
    total = total_sq = 0.0
    for _ in range(n // chunk):
        y = rng.uniform(lo, hi, size=(3, chunk))
        vals = theta(kern, y[0] + y[1] - 2.0 * y[2])
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
    g3 = params.gamma.value ** 3
    vol = (hi - lo) ** 3
    mean = total / n
    mc = g3 * vol * mean
    sigma = g3 * vol * math.sqrt((total_sq / n - mean * mean) / n)
    assert abs(box.value - mc) <= 3.0 * sigma


def test_box_ratio_stable_across_scales():
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    ratios = []
    for q0 in (8, 17, 36):
        params = derive_parameters(q0, 0.9, 0.5, epsilon_user=1.0)
        box = box_integral_B(params, c, make_kernel(1.0, 4))
        assert box.converged
        ratios.append(box.ratio_eps_x2)
    assert max(ratios) <= 2.0 * min(ratios)


def test_box_infeasible_is_zero():
    params = derive_parameters(8, 0.9, 0.5, epsilon_user=1.0)
    c = Coefficients(1.0, 1.0, -2.0, 1.0e6)
    box = box_integral_B(params, c, make_kernel(1.0, 4))
    assert not box.feasible
    assert box.value == 0.0 and box.converged


def test_box_mass_bound():
    # inner interval carries at most the full theta mass 7*eps/4 < 2*eps
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    for q0, eps in ((8, 1.0), (12, 2.0)):
        params = derive_parameters(q0, 0.9, 0.5, epsilon_user=eps)
        box = box_integral_B(params, c, make_kernel(eps, 4))
        g = params.gamma.value
        cap = 2 * eps * g**3 * ((1 - params.lambda0) * params.X) ** 2 / 2.0
        assert box.value <= cap


# ---------------------------------------------------------------------------
# remainder and far tail


def test_phi_bound_shape_and_monotonicity():
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    kern = make_kernel(1.0, 4)
    for q0 in (8, 17, 36):
        params = derive_parameters(q0, 0.9, 0.5, epsilon_user=1.0)
        phi = phi_bound(params, kern, c)
        assert phi.value >= 0.0
        assert 0.0 < phi.shape_ratio < 0.1
    # the plateau arm only bites once gamma*(1-lambda0)*X drops under
    # 1/(pi*Delta); compare two points in that regime
    lo = phi_bound(
        derive_parameters(8, 0.9, 0.95, epsilon_user=1.0), kern, c
    )
    hi = phi_bound(
        derive_parameters(8, 0.9, 0.995, epsilon_user=1.0), kern, c
    )
    assert hi.value < lo.value


def test_tail_bound_closed_form():
    # q0=587 puts X within 0.3% of 1e6; k = floor(log X) = 13 and the
    # base collapses to 4k/(pi log^2 X) independent of the width
    params = derive_parameters(587, 0.98, 0.5, epsilon_user=1.0)
    assert math.floor(params.log_X) == 13
    tb = tail_bound_gamma3(params, make_kernel(1.0, 13))
    assert tb.k == 13
    assert tb.base == pytest.approx(
        4 * 13 / (math.pi * params.log_X**2), rel=1e-12
    )
    assert tb.base < 1.0 and tb.below_one
    lx = mp.mpf(13) / 6 * mp.log(587)
    expected = float(
        mp.e ** ((3 - 3 * mp.mpf("0.98")) * lx) / 13 * (52 / (mp.pi * lx**2)) ** 13
    )
    assert tb.value == pytest.approx(expected, rel=1e-10)


def test_tail_bound_degenerate_and_monotone():
    params = derive_parameters(587, 0.98, 0.5, epsilon_user=1.0)
    k1 = tail_bound_gamma3(params, make_kernel(1.0, 1))
    assert math.isfinite(k1.value) and k1.value > 0.0
    k13 = tail_bound_gamma3(params, make_kernel(1.0, 13))
    k14 = tail_bound_gamma3(params, make_kernel(1.0, 14))
    assert k14.value < k13.value


def test_far_tail_majorant_covers_truncated_band():
    # nonempty truncated far band: quadrature against the sup-based
    # envelope, which holds where the scale-shape bound cannot
    params, pset = _instance(12, 0.9, 0.5, 2.0)
    c = Coefficients(1.0, 1.0, -2.0, 0.0)
    kern = _kernel_for(params)
    g3 = gamma_piece(3, params, c, kern, pset)
    env = far_tail_majorant(params, c, kern, pset)
    assert abs(g3) > 0.0
    assert abs(g3) <= env
