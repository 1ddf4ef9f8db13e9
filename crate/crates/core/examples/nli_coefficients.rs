//! Per-channel NLI coefficients of a 48-channel C-band plan on one 100 km
//! SSMF span, from the integral model and the closed form.

use std::time::Instant;

use isrs_qot::{ChannelPlan, ChannelSpec, FiberParams, ModelRegistry, QuadratureSpec};

fn main() -> isrs_qot::Result<()> {
    let specs: Vec<ChannelSpec> = (0..48)
        .map(|i| ChannelSpec {
            abs_freq: 191.4e12 + i as f64 * 100e9,
            bandwidth: 64e9,
            launch_power: 1e-3,
        })
        .collect();
    let plan = ChannelPlan::from_specs(&specs)?;
    let fiber = FiberParams::ssmf(100.0)?;
    let registry = ModelRegistry::with_defaults(QuadratureSpec::default());

    let t = Instant::now();
    let closed = registry
        .lookup("closed_form")?
        .evaluate_plan(&plan, &fiber)?;
    let t_closed = t.elapsed();
    let t = Instant::now();
    let integral = registry.lookup("integral")?.evaluate_plan(&plan, &fiber)?;
    let t_integral = t.elapsed();

    println!("channel  freq_thz  eta_integral  eta_closed  rel_diff");
    for ((c, a), b) in plan.channels().iter().zip(&integral).zip(&closed) {
        println!(
            "{:7}  {:8.3}  {:12.4e}  {:10.4e}  {:+8.4}",
            c.index,
            plan.absolute_freq(c) / 1e12,
            a.eta_total,
            b.eta_total,
            (b.eta_total - a.eta_total) / a.eta_total
        );
    }
    println!("closed form: {t_closed:?}, integral: {t_integral:?}");
    Ok(())
}
