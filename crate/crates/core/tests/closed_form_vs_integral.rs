//! The closed-form model against the numerical integral.

use std::f64::consts::PI;
use std::sync::OnceLock;

use isrs_qot::quadrature::{GaussLegendre, Rule};
use isrs_qot::{
    eta_plan_integral, eta_spm_closed, eta_spm_integral, eta_total_closed, eta_xpm_closed_single,
    eta_xpm_integral, link_function, step4_xpm_integrand, step5_frequency_integral_check, t_factor,
    ChannelPlan, ChannelSpec, ClosedFormConstants, FiberParams, NliResult, QuadratureSpec,
    Step5Mode,
};

fn plan(n: usize, spacing: f64, baud: f64, watt: f64) -> ChannelPlan {
    let specs: Vec<_> = (0..n)
        .map(|i| ChannelSpec {
            abs_freq: 191.3e12 + i as f64 * spacing,
            bandwidth: baud,
            launch_power: watt,
        })
        .collect();
    ChannelPlan::from_specs(&specs).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn c_band() -> &'static (ChannelPlan, Vec<NliResult>, Vec<NliResult>) {
    static CELL: OnceLock<(ChannelPlan, Vec<NliResult>, Vec<NliResult>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let p = plan(48, 100e9, 64e9, 1e-3);
        let fiber = FiberParams::ssmf(100.0).unwrap();
        let integral = eta_plan_integral(&p, &fiber, &QuadratureSpec::default()).unwrap();
        let closed = p
            .channels()
            .iter()
            .map(|c| eta_total_closed(c, &p, &fiber).unwrap())
            .collect();
        (p, integral, closed)
    })
}

#[test]
fn total_eta_tracks_integral_on_c_band() {
    let (_, integral, closed) = c_band();
    for (i, (a, b)) in closed.iter().zip(integral).enumerate() {
        let e = rel(a.eta_total, b.eta_total);
        assert!(e < 0.15, "channel {i}: {e}");
        if (4..44).contains(&i) {
            assert!(e < 0.10, "central channel {i}: {e}");
        }
    }
}

#[test]
fn spm_tracks_integral_on_central_channels() {
    let (_, integral, closed) = c_band();
    for i in 4..44 {
        let e = rel(closed[i].eta_spm, integral[i].eta_spm);
        assert!(e < 0.10, "channel {i}: {e}");
    }
}

#[test]
fn xpm_pairs_track_integral() {
    let (_, integral, closed) = c_band();
    let xpm = |r: &NliResult, k: usize| {
        r.eta_xpm_by_interferer
            .iter()
            .find(|(j, _)| *j == k)
            .unwrap()
            .1
    };
    // adjacent pair
    assert!(rel(xpm(&closed[20], 21), xpm(&integral[20], 21)) < 0.15);
    // pairs at least 1 THz apart
    for (i, k) in [(10, 25), (0, 47), (47, 5), (30, 12)] {
        let e = rel(xpm(&closed[i], k), xpm(&integral[i], k));
        assert!(e < 0.10, "pair ({i}, {k}): {e}");
    }
}

#[test]
fn raman_tilt_raises_eta_at_low_frequencies() {
    // without dispersion slope the only asymmetry comes from the Raman tilt
    let p = plan(16, 100e9, 64e9, 10e-3);
    let fiber = FiberParams::ssmf(100.0)
        .unwrap()
        .to_builder()
        .beta3_si(0.0)
        .build()
        .unwrap();
    let q = QuadratureSpec::default();
    let (lo, hi) = (p.channels()[1], p.channels()[14]);
    let closed = |c| eta_total_closed(c, &p, &fiber).unwrap().eta_total;
    let integral = |c| {
        isrs_qot::eta_total_integral(c, &p, &fiber, &q)
            .unwrap()
            .eta_total
    };
    assert!(closed(&lo) > closed(&hi));
    assert!(integral(&lo) > integral(&hi));
}

#[test]
fn xpm_scales_with_squared_power_ratio() {
    let base = plan(4, 100e9, 64e9, 1e-3);
    let fiber = FiberParams::ssmf(100.0)
        .unwrap()
        .to_builder()
        .cr_si(0.0)
        .build()
        .unwrap();
    let boosted = base.with_launch_powers(&[1e-3, 3e-3, 1e-3, 1e-3]).unwrap();
    let q = QuadratureSpec::default();
    let (coi, k) = (0, 1);
    let c0 =
        eta_xpm_closed_single(&base.channels()[coi], &base.channels()[k], &base, &fiber).unwrap();
    let c1 = eta_xpm_closed_single(
        &boosted.channels()[coi],
        &boosted.channels()[k],
        &boosted,
        &fiber,
    )
    .unwrap();
    assert!(rel(c1 / c0, 9.0) < 1e-12);
    let i0 = eta_xpm_integral(
        &base.channels()[coi],
        &base.channels()[k],
        &base,
        &fiber,
        &q,
    )
    .unwrap();
    let i1 = eta_xpm_integral(
        &boosted.channels()[coi],
        &boosted.channels()[k],
        &boosted,
        &fiber,
        &q,
    )
    .unwrap();
    assert!(rel(i1 / i0, 9.0) < 1e-9);
}

#[test]
fn spm_of_single_channel_tracks_integral() {
    let p = plan(1, 100e9, 64e9, 1e-3);
    let fiber = FiberParams::ssmf(100.0).unwrap();
    let c = p.channels()[0];
    let a = eta_spm_closed(&c, &p, &fiber).unwrap();
    let b = eta_spm_integral(&c, &p, &fiber, &QuadratureSpec::default()).unwrap();
    assert!(rel(a, b) < 0.10, "{a} vs {b}");
}

#[test]
fn longitudinal_factor_matches_long_span_link_function() {
    // ten loss lengths make the span effectively infinite
    let base = FiberParams::ssmf(100.0).unwrap();
    let fiber = base
        .to_builder()
        .length_si(10.0 / base.alpha())
        .build()
        .unwrap();
    let p = plan(48, 100e9, 64e9, 1e-3);
    let q = QuadratureSpec::default();
    let a = fiber.alpha() + fiber.alpha_bar();
    let (lo, hi) = p.band_edges();
    for (f1, f2, fi) in [
        (0.3e12, -0.2e12, 0.05e12),
        (lo + 1e11, hi - 2e11, 0.0),
        (1.0e12, 1.1e12, 1.05e12),
        (-2.0e12, -1.9e12, -2.2e12),
        (0.0, 0.0, 0.0),
    ] {
        let f3 = f1 + f2 - fi;
        let constants = ClosedFormConstants {
            t: t_factor(f3, &p, &fiber),
            a,
            phi: -4.0 * PI * PI * (fiber.beta2() + PI * fiber.beta3() * (f1 + f2)),
        };
        let closed = step4_xpm_integrand(f1 - fi, f2 - fi, &constants, &fiber);
        let numeric = link_function(f1, f2, fi, &p, &fiber, &q).unwrap();
        assert!(
            rel(closed, numeric) < 0.02,
            "({f1}, {f2}, {fi}): {closed} vs {numeric}"
        );
    }
}

/// Gauss–Legendre rule on `[lo, hi]` graded toward zero when it lies inside.
fn axis(lo: f64, hi: f64, min_width: f64) -> Rule {
    let gl = GaussLegendre::new(16);
    let mut r = Rule::default();
    if lo < 0.0 && hi > 0.0 {
        r.push_graded(lo, hi, 0.0, min_width, 0.3, &gl);
    } else {
        r.push_uniform(lo, hi, 8, &gl);
    }
    r
}

#[test]
fn spm_frequency_integral_matches_hexagon_quadrature() {
    let b = 40e9;
    let p = plan(1, 100e9, b, 1e-3);
    let fiber = FiberParams::ssmf(100.0).unwrap();
    let c = ClosedFormConstants::spm(&p.channels()[0], &p, &fiber);
    let analytic = step5_frequency_integral_check(&c, b, Step5Mode::SpmAsinh, &fiber).unwrap();
    let half = 0.5 * b;
    let outer = axis(-half, half, 1e-6 * b);
    let numeric: f64 = outer
        .iter()
        .map(|(u, wu)| {
            let (lo, hi) = ((-half - u).max(-half), (half - u).min(half));
            wu * axis(lo, hi, 1e-6 * b).integrate(|v| step4_xpm_integrand(u, v, &c, &fiber))
        })
        .sum();
    assert!(rel(analytic, numeric) < 0.05, "{analytic} vs {numeric}");
}

#[test]
fn xpm_frequency_integral_matches_strip_quadrature() {
    let b = 40e9;
    let fiber = FiberParams::ssmf(100.0).unwrap();
    let p = plan(3, 150e9, b, 1e-3);
    let (coi, k) = (p.channels()[0], p.channels()[2]);
    let c = ClosedFormConstants::xpm(&coi, &k, &p, &fiber).unwrap();
    let delta = k.center_freq - coi.center_freq;
    let analytic =
        step5_frequency_integral_check(&c, b, Step5Mode::XpmAtan { separation: delta }, &fiber)
            .unwrap();
    let numeric =
        axis(-0.5 * b, 0.5 * b, 1e-6 * b).integrate(|v| step4_xpm_integrand(delta, v, &c, &fiber));
    assert!(rel(analytic, numeric) < 1e-8, "{analytic} vs {numeric}");
}
