//! Invariants checked over random inputs.

use isrs_qot::{
    compare_tables, eta_total_closed, fmt_sig6, ChannelPlan, ChannelSpec, FiberParams, GsnrTable,
    QotError, SplitMix64,
};
use proptest::prelude::*;

fn fiber_strategy() -> impl Strategy<Value = FiberParams> {
    (
        0.15f64..0.3,
        prop_oneof![-30.0f64..-1.0, 1.0f64..30.0],
        -0.2f64..0.2,
        0.5f64..2.0,
        0.0f64..0.06,
        60.0f64..150.0,
    )
        .prop_map(|(a, b2, b3, g, cr, l)| {
            FiberParams::builder()
                .alpha_db_per_km(a)
                .beta2_ps2_per_km(b2)
                .beta3_ps3_per_km(b3)
                .gamma_per_w_km(g)
                .cr_per_w_km_thz(cr)
                .length_km(l)
                .build()
                .unwrap()
        })
}

/// Non-overlapping channels with random gaps, widths and powers, shuffled.
fn plan_strategy() -> impl Strategy<Value = Vec<ChannelSpec>> {
    prop::collection::vec((10e9f64..100e9, 0.0f64..50e9, 0.05f64..5.0), 1..24)
        .prop_map(|raw| {
            let mut f = 190e12;
            raw.into_iter()
                .map(|(bw, gap, mw)| {
                    f += 0.5 * bw;
                    let s = ChannelSpec {
                        abs_freq: f,
                        bandwidth: bw,
                        launch_power: mw * 1e-3,
                    };
                    f += 0.5 * bw + gap;
                    s
                })
                .collect::<Vec<_>>()
        })
        .prop_shuffle()
}

fn table_strategy() -> impl Strategy<Value = (GsnrTable, GsnrTable)> {
    (1usize..5, 1usize..8).prop_flat_map(|(spans, channels)| {
        let t = prop::collection::vec(prop::collection::vec(5.0f64..35.0, channels), spans)
            .prop_map(|gsnr_db| GsnrTable { gsnr_db });
        (t.clone(), t)
    })
}

proptest! {
    #[test]
    fn plans_are_sorted_indexed_and_centered(specs in plan_strategy()) {
        let plan = ChannelPlan::from_specs(&specs).unwrap();
        let ch = plan.channels();
        prop_assert_eq!(ch.len(), specs.len());
        prop_assert!(ch.iter().enumerate().all(|(i, c)| c.index == i));
        prop_assert!(ch.windows(2).all(|w| w[0].center_freq < w[1].center_freq));
        let (lo, hi) = plan.band_edges();
        prop_assert!((lo + hi).abs() < 1e-6 * (hi - lo));
        let total: f64 = specs.iter().map(|s| s.launch_power).sum();
        prop_assert!((plan.total_power() - total).abs() <= 1e-12 * total);
        for c in ch {
            let abs = plan.absolute_freq(c);
            prop_assert!(specs.iter().any(|s| (s.abs_freq - abs).abs() < 1.0));
        }
    }

    #[test]
    fn overlapping_channels_are_rejected(specs in plan_strategy(), pick in any::<prop::sample::Index>()) {
        prop_assume!(specs.len() >= 2);
        let mut specs = specs;
        let i = pick.index(specs.len());
        let j = (i + 1) % specs.len();
        specs[j].abs_freq = specs[i].abs_freq + 0.25 * specs[i].bandwidth.min(specs[j].bandwidth);
        let overlap = matches!(ChannelPlan::from_specs(&specs), Err(QotError::ChannelOverlap { .. }));
        prop_assert!(overlap);
    }

    #[test]
    fn closed_form_eta_is_non_negative_and_scales(fiber in fiber_strategy(), specs in plan_strategy()) {
        let plan = ChannelPlan::from_specs(&specs).unwrap();
        let doubled = fiber.to_builder().gamma_si(2.0 * fiber.gamma()).build().unwrap();
        for c in plan.channels() {
            let r = eta_total_closed(c, &plan, &fiber).unwrap();
            prop_assert!(r.eta_spm > 0.0 && r.eta_total.is_finite());
            prop_assert!(r.eta_xpm_by_interferer.iter().all(|(_, e)| *e >= 0.0));
            let r2 = eta_total_closed(c, &plan, &doubled).unwrap();
            prop_assert!((r2.eta_total / r.eta_total - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_xpm_is_quadratic_in_interferer_power(
        fiber in fiber_strategy(),
        specs in plan_strategy(),
        scale in 0.1f64..10.0,
    ) {
        prop_assume!(specs.len() >= 2);
        // without Raman the total power does not enter
        let fiber = fiber.to_builder().cr_si(0.0).build().unwrap();
        let plan = ChannelPlan::from_specs(&specs).unwrap();
        let mut powers = plan.launch_powers();
        powers[1] *= scale;
        let boosted = plan.with_launch_powers(&powers).unwrap();
        let coi = 0;
        let a = eta_total_closed(&plan.channels()[coi], &plan, &fiber).unwrap();
        let b = eta_total_closed(&boosted.channels()[coi], &boosted, &fiber).unwrap();
        let xa = a.eta_xpm_by_interferer.iter().find(|(k, _)| *k == 1).unwrap().1;
        let xb = b.eta_xpm_by_interferer.iter().find(|(k, _)| *k == 1).unwrap().1;
        prop_assert!((xb / xa / (scale * scale) - 1.0).abs() < 1e-12);
        prop_assert_eq!(a.eta_spm, b.eta_spm);
    }

    #[test]
    fn comparison_is_symmetric_and_ordered((a, b) in table_strategy()) {
        let ab = compare_tables(&a, &b).unwrap();
        let ba = compare_tables(&b, &a).unwrap();
        prop_assert_eq!(&ab, &ba);
        prop_assert!(0.0 <= ab.mae_db && ab.mae_db <= ab.max_ae_db + 1e-12);
        let worst = ab.per_channel_abs_err[ab.worst_span_index - 1][ab.worst_channel_index];
        prop_assert_eq!(worst, ab.max_ae_db);
        let self_cmp = compare_tables(&a, &a).unwrap();
        prop_assert_eq!(self_cmp.max_ae_db, 0.0);
    }

    #[test]
    fn sig6_round_trips(x in prop_oneof![-1e6f64..1e6, -1e-3f64..1e-3]) {
        let s = fmt_sig6(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-6 * x.abs() + f64::MIN_POSITIVE, "{} -> {}", x, s);
    }

    #[test]
    fn sampled_indices_are_distinct_and_in_range(seed in any::<u64>(), n in 1usize..200, frac in 0.0f64..=1.0) {
        let k = ((n as f64) * frac) as usize;
        let mut rng = SplitMix64::new(seed);
        let mut idx = rng.sample_indices(n, k);
        prop_assert_eq!(idx.len(), k);
        prop_assert!(idx.iter().all(|&i| i < n));
        idx.sort_unstable();
        idx.dedup();
        prop_assert_eq!(idx.len(), k);
        prop_assert_eq!(SplitMix64::new(seed).sample_indices(n, k), SplitMix64::new(seed).sample_indices(n, k));
    }
}
