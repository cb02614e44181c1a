import math
import statistics

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from oracles import (
    cdf_by_counting,
    ci_ple_by_search,
    circular_spread_deg,
    column,
    geometric_mean,
    rms_ds_two_moment,
)
from pointdata.core import LinkState, LobeSpreadSet, NonPositiveSpread, EmptyLobeSet, ThresholdPolicy
from pointdata.stats import (
    AllTapsBelowThreshold,
    AngularPowerSample,
    DegenerateSpectrum,
    DistanceBelowReference,
    EmptyInput,
    NonPositiveFrequency,
    PowerDelayProfile,
    TooFewPoints,
    UnknownParameter,
    angular_spread_3gpp,
    cross_pol_discrimination,
    empirical_cdf,
    fit_ci_ple,
    fit_dataset_ple,
    fspl_1m,
    group_summary,
    mean_lobe_spread,
    rms_delay_spread,
    summaries_to_text,
)

NO_THRESHOLD = ThresholdPolicy(rel_below_peak_db=1000.0)


# -- free-space anchor ------------------------------------------------------

@pytest.mark.parametrize("f,expected", [(6.75, 49.03), (16.95, 57.03)])
def test_fspl_1m_hand_values(f, expected):
    assert fspl_1m(f) == pytest.approx(expected, abs=0.05)


def test_fspl_1m_unit_argument():
    assert fspl_1m(299_792_458 / (4 * math.pi) / 1e9) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("f", [0.0, -6.75])
def test_fspl_1m_rejects_nonpositive(f):
    with pytest.raises(NonPositiveFrequency):
        fspl_1m(f)


# -- CI fit -----------------------------------------------------------------

@pytest.mark.parametrize("freq,loc,expected", [
    (6.75, LinkState.LOS, 1.34), (6.75, LinkState.NLOS, 2.72),
    (16.95, LinkState.LOS, 1.32), (16.95, LinkState.NLOS, 3.05),
])
def test_ci_fit_table_values(inh, table_text, freq, loc, expected):
    fit = fit_dataset_ple(inh, freq, loc)
    assert fit.ple == pytest.approx(expected, abs=0.02)
    d = column(table_text, "tr_sep_m", freq, loc.value)
    pl = column(table_text, "omni_pl_vv_db", freq, loc.value)
    oracle = ci_ple_by_search(list(zip(d, pl)), fspl_1m(freq))
    assert fit.ple == pytest.approx(oracle, abs=1e-6)
    assert fit.n_points == (7 if loc is LinkState.LOS else 13)


def test_ci_fit_free_space_law():
    d = [1.5, 3.0, 10.0, 42.0, 97.0]
    fit = fit_ci_ple([(x, fspl_1m(28.0) + 20 * math.log10(x)) for x in d], 28.0)
    assert fit.ple == pytest.approx(2.0, rel=1e-12)
    assert fit.sigma_sf_db == pytest.approx(0.0, abs=1e-12)


def test_ci_fit_sigma_is_population_std():
    pts = [(10.0, 80.0), (20.0, 95.0), (40.0, 99.0)]
    fit = fit_ci_ple(pts, 6.75)
    resid = [pl - fit.predict(d) for d, pl in pts]
    assert fit.sigma_sf_db == pytest.approx(statistics.pstdev(resid), rel=1e-12)


def test_ci_fit_errors():
    with pytest.raises(TooFewPoints):
        fit_ci_ple([(10.0, 80.0)], 6.75)
    with pytest.raises(DistanceBelowReference):
        fit_ci_ple([(0.5, 40.0), (10.0, 80.0)], 6.75)
    with pytest.raises(DistanceBelowReference):
        fit_ci_ple([(1.0, 50.0), (1.0, 52.0)], 6.75)


distances = st.lists(st.floats(1.0, 1000.0), min_size=2, max_size=25)


@given(d=distances, n=st.floats(0.5, 6.0), f=st.floats(0.5, 100.0))
def test_ci_fit_recovers_exponent(d, n, f):
    assume(max(d) > 1.01)
    pts = [(x, fspl_1m(f) + 10 * n * math.log10(x)) for x in d]
    fit = fit_ci_ple(pts, f)
    assert fit.ple == pytest.approx(n, rel=1e-12)
    assert fit.sigma_sf_db == pytest.approx(0.0, abs=1e-9)


@given(d=distances, noise=st.lists(st.floats(-20, 20), min_size=25, max_size=25),
       n=st.floats(1.0, 4.0))
def test_ci_residuals_orthogonal_to_regressor(d, noise, n):
    assume(max(d) > 1.5)
    f = 6.75
    pts = [(x, fspl_1m(f) + 10 * n * math.log10(x) + e) for x, e in zip(d, noise)]
    fit = fit_ci_ple(pts, f)
    b = np.array([10 * math.log10(x) for x, _ in pts])
    a = np.array([pl for _, pl in pts]) - fit.fspl_1m_db
    assert abs(np.dot(a - fit.ple * b, b)) <= 1e-9 * np.dot(np.abs(a), np.abs(b))


# -- delay spread -----------------------------------------------------------

def test_rms_ds_single_tap():
    assert rms_delay_spread(PowerDelayProfile((12.0,), (3.0,))) == 0.0


def test_rms_ds_two_equal_taps():
    assert rms_delay_spread(PowerDelayProfile((0.0, 100.0), (1.0, 1.0))) == pytest.approx(50.0)


def test_rms_ds_hand_moments():
    taps = [(0.0, 1.0), (50.0, 0.5), (200.0, 0.1)]
    pdp = PowerDelayProfile.from_taps(taps)
    assert rms_ds_two_moment(taps) == pytest.approx(49.90224819584785, rel=1e-15)
    assert rms_delay_spread(pdp, NO_THRESHOLD) == pytest.approx(49.90224819584785, rel=1e-12)


def test_rms_ds_relative_threshold():
    # -30 dB tap drops under the default 25 dB window
    pdp = PowerDelayProfile((0.0, 10.0, 500.0), (1.0, 1.0, 1e-3))
    assert rms_delay_spread(pdp) == pytest.approx(5.0)
    assert rms_delay_spread(pdp, NO_THRESHOLD) > 5.0


def test_rms_ds_noise_threshold_wins():
    # noise at -20 dB: noise + 5 = -15 dB beats peak - 25 = -25 dB
    pdp = PowerDelayProfile((0.0, 10.0, 20.0), (1.0, 10 ** -1.6, 10 ** -1.2), noise_floor_mw=1e-2)
    assert pdp.threshold_db(ThresholdPolicy()) == pytest.approx(-15.0)
    assert rms_delay_spread(pdp) == pytest.approx(rms_ds_two_moment([(0, 1.0), (20, 10 ** -1.2)]))


def test_rms_ds_tap_at_threshold_is_kept():
    pdp = PowerDelayProfile((0.0, 100.0), (1.0, 10 ** -2.5))
    assert pdp.threshold_db(ThresholdPolicy()) == pytest.approx(-25.0)
    policy = ThresholdPolicy(rel_below_peak_db=-10 * math.log10(10 ** -2.5))
    assert rms_delay_spread(pdp, policy) > 0.0


def test_rms_ds_all_below_threshold():
    pdp = PowerDelayProfile((0.0, 5.0), (1.0, 0.5), noise_floor_mw=10.0)
    with pytest.raises(AllTapsBelowThreshold):
        rms_delay_spread(pdp)


@pytest.mark.parametrize("delays,powers", [((5.0, 5.0), (1, 1)), ((-1.0,), (1,)),
                                           ((0.0, 1.0), (1, 0)), ((), ())])
def test_pdp_invariants(delays, powers):
    with pytest.raises(ValueError):
        PowerDelayProfile(delays, powers)


taps = st.lists(st.tuples(st.floats(0, 1000), st.floats(1e-3, 1e3)), min_size=1, max_size=20,
                unique_by=lambda t: round(t[0], 3))


def _pdp(taps, shift=0.0, scale=1.0):
    taps = sorted((round(t, 3) + shift, p * scale) for t, p in taps)
    return PowerDelayProfile.from_taps(taps)


@given(taps=taps, shift=st.floats(0, 1e4), scale=st.floats(1e-6, 1e6))
def test_rms_ds_shift_and_scale_invariance(taps, shift, scale):
    base = rms_delay_spread(_pdp(taps), NO_THRESHOLD)
    assert rms_delay_spread(_pdp(taps, shift=shift), NO_THRESHOLD) == pytest.approx(base, rel=1e-6, abs=1e-6)
    assert rms_delay_spread(_pdp(taps, scale=scale), NO_THRESHOLD) == pytest.approx(base, rel=1e-9, abs=1e-9)


@given(taps=taps)
def test_rms_ds_matches_exact_moments(taps):
    pdp = _pdp(taps)
    exact = rms_ds_two_moment(zip(pdp.delays_ns, pdp.powers_mw))
    assert rms_delay_spread(pdp, NO_THRESHOLD) == pytest.approx(exact, rel=1e-9, abs=1e-6)


# -- angular spread ---------------------------------------------------------

def test_as_single_direction():
    assert angular_spread_3gpp(AngularPowerSample((42.0,), (1.0,))) == 0.0
    assert angular_spread_3gpp(AngularPowerSample((10.0, 10.0), (1.0, 3.0))) == pytest.approx(0.0, abs=1e-6)


def test_as_two_masses_at_30_degrees():
    expected = math.degrees(math.sqrt(-2 * math.log(math.cos(math.radians(30)))))
    assert expected == pytest.approx(30.7312, abs=1e-4)
    value = angular_spread_3gpp(AngularPowerSample((30.0, -30.0), (1.0, 1.0)))
    assert value == pytest.approx(expected, rel=1e-12)


def test_as_opposed_masses_degenerate():
    with pytest.raises(DegenerateSpectrum):
        angular_spread_3gpp(AngularPowerSample((0.0, 180.0), (1.0, 1.0)))


angles = st.lists(st.tuples(st.floats(-180, 180), st.floats(1e-2, 1e2)), min_size=1, max_size=30)


@given(samples=angles, rot=st.floats(-720, 720), scale=st.floats(1e-4, 1e4))
def test_as_rotation_and_scale_invariance(samples, rot, scale):
    pas = AngularPowerSample.from_samples(samples)
    try:
        base = angular_spread_3gpp(pas)
    except DegenerateSpectrum:
        return
    assume(base < 150)
    rotated = AngularPowerSample.from_samples([(a + rot, p * scale) for a, p in samples])
    assert angular_spread_3gpp(rotated) == pytest.approx(base, rel=1e-6, abs=1e-5)
    assert base == pytest.approx(circular_spread_deg(*zip(*samples)), rel=1e-6, abs=1e-5)


def test_as_grows_with_separation():
    seps = np.linspace(0.5, 179.0, 200)
    values = [angular_spread_3gpp(AngularPowerSample((s / 2, -s / 2), (1.0, 1.0))) for s in seps]
    assert all(b > a for a, b in zip(values, values[1:]))


# -- mean lobe spread -------------------------------------------------------

@pytest.mark.parametrize("lobes,expected", [([13.0], 13.0), ([10.0, 40.0], 20.0), ([5.0] * 3, 5.0)])
def test_mean_lobe_examples(lobes, expected):
    assert mean_lobe_spread(lobes) == pytest.approx(expected, rel=1e-12)
    assert mean_lobe_spread(LobeSpreadSet(tuple(lobes))) == pytest.approx(geometric_mean(lobes), rel=1e-12)


def test_mean_lobe_errors():
    with pytest.raises(EmptyLobeSet):
        mean_lobe_spread([])
    with pytest.raises(NonPositiveSpread):
        mean_lobe_spread([3.0, -1.0])


lobes = st.lists(st.floats(0.1, 120.0), min_size=1, max_size=12)


@given(lobes=lobes, c=st.floats(1e-3, 1e3), seed=st.randoms())
def test_mean_lobe_homogeneous_and_symmetric(lobes, c, seed):
    base = mean_lobe_spread(lobes)
    assert mean_lobe_spread([c * x for x in lobes]) == pytest.approx(c * base, rel=1e-12)
    shuffled = list(lobes)
    seed.shuffle(shuffled)
    assert mean_lobe_spread(shuffled) == pytest.approx(base, rel=1e-12)
    assert base == pytest.approx(geometric_mean(lobes), rel=1e-9)


# -- CDF --------------------------------------------------------------------

def test_cdf_examples():
    assert empirical_cdf([5]) == [(5.0, 1.0)]
    assert empirical_cdf([3, 1, 2]) == [(1.0, 1 / 3), (2.0, 2 / 3), (3.0, 1.0)]
    assert empirical_cdf([2, 1, 2]) == [(1.0, 1 / 3), (2.0, 1.0)]
    with pytest.raises(EmptyInput):
        empirical_cdf([])
    with pytest.raises(ValueError):
        empirical_cdf([1.0, math.nan])


def test_cdf_table_ds_column(inh):
    values = [r.omni_ds_ns for r in inh.select(6.75, LinkState.LOS)]
    assert sorted(values) == sorted([21.4, 47.5, 100.0, 69.6, 58.0, 9.1, 20.8])
    cdf = empirical_cdf(values)
    assert len(cdf) == 7
    assert cdf[3] == (47.5, 4 / 7)


@given(st.lists(st.floats(-1e6, 1e6).map(lambda x: round(x, 1)), min_size=1, max_size=50))
def test_cdf_matches_counting(values):
    cdf = empirical_cdf(values)
    ref = cdf_by_counting(values)
    assert [v for v, _ in cdf] == [v for v, _ in ref]
    assert [p for _, p in cdf] == pytest.approx([p for _, p in ref])
    assert all(b[0] > a[0] and b[1] > a[1] for a, b in zip(cdf, cdf[1:]))
    assert cdf[-1][1] == 1.0


# -- summaries --------------------------------------------------------------

def test_summary_ds_los(inh, table_text):
    (g,) = [g for g in group_summary(inh, "omni_ds_ns")
            if g.frequency_ghz == 6.75 and g.link_state is LinkState.LOS]
    raw = column(table_text, "omni_ds_ns", 6.75, "LOS")
    assert g.count == 7
    assert g.arithmetic_mean == pytest.approx(statistics.fmean(raw), rel=1e-12)
    assert g.arithmetic_mean == pytest.approx(46.6, abs=0.05)
    assert g.log_mean == pytest.approx(statistics.geometric_mean(raw), rel=1e-12)
    assert g.log_mean == pytest.approx(36.0, abs=0.05)
    assert g.median == 47.5
    assert g.std == pytest.approx(statistics.pstdev(raw), rel=1e-12)
    assert g.log_std == pytest.approx(statistics.pstdev([math.log10(x) for x in raw]), rel=1e-12)


def test_summary_asa_16_95_los(inh):
    (g,) = [g for g in group_summary(inh, "omni_asa_deg")
            if g.frequency_ghz == 16.95 and g.link_state is LinkState.LOS]
    vals = [8.6, 7.1, 72.2, 7.2, 7.3, 6.9, 63.6]
    assert g.count == 7
    assert g.log_mean == pytest.approx(statistics.geometric_mean(vals), rel=1e-12)
    assert g.log_std == pytest.approx(statistics.pstdev([math.log10(v) for v in vals]), rel=1e-12)


def test_summary_counts_present_values(inh):
    groups = group_summary(inh, "omni_pl_vh_db")
    counts = {(g.frequency_ghz, g.link_state.value): (g.count, g.n_missing) for g in groups}
    assert counts == {(6.75, "LOS"): (7, 0), (6.75, "NLOS"): (10, 3),
                      (16.95, "LOS"): (7, 0), (16.95, "NLOS"): (12, 1)}
    for g in group_summary(inh, "omni_pl_vv_db"):
        assert g.count + g.n_missing == len(inh.select(g.frequency_ghz, g.link_state))


def test_summary_grouping_options(inh):
    (everything,) = group_summary(inh, "omni_ds_ns", groupby=())
    assert everything.count == 40 and everything.frequency_ghz is None
    assert [g.frequency_ghz for g in group_summary(inh, "tr_sep_m", groupby=("freq",))] == [6.75, 16.95]
    with pytest.raises(UnknownParameter):
        group_summary(inh, "bogus")
    with pytest.raises(ValueError):
        group_summary(inh, "omni_ds_ns", groupby=("env",))


def test_summary_skips_nonpositive_in_log_stats():
    from pointdata.stats import summarize
    s = summarize([-2.0, 0.0, 10.0, 1000.0], "xpd_db")
    assert s.n_nonpositive == 2
    assert s.log_mean == pytest.approx(100.0)
    assert s.arithmetic_mean == pytest.approx(252.0)


def test_summary_text_rows(inh):
    text = summaries_to_text(group_summary(inh, "omni_ds_ns"))
    lines = text.splitlines()
    assert lines[0].startswith("parameter,frequency_ghz,link_state,count")
    assert len(lines) == 5


# -- cross-pol --------------------------------------------------------------

def _rec(inh, f, tx, rx):
    return next(r for r in inh if (r.frequency_ghz, r.tx_id, r.rx_id) == (f, tx, rx))


def test_xpd_values(inh):
    assert cross_pol_discrimination(_rec(inh, 6.75, "TX1", "RX1")) == pytest.approx(21.1)
    assert cross_pol_discrimination(_rec(inh, 6.75, "TX4", "RX1")) == pytest.approx(2.5)
    assert cross_pol_discrimination(_rec(inh, 6.75, "TX2", "RX5")) is None
    (g,) = group_summary(inh, "xpd_db", groupby=())
    assert g.count == 36 and g.n_missing == 4
