//! Power profile of the outermost C+L channels along a 100 km span: the
//! Raman tilt pumps the L band at the expense of the C band.

use isrs_qot::{
    exact_power_profile, normalized_power_profile, tilt_coordinate, ChannelPlan, ChannelSpec,
    FiberParams,
};

fn main() -> isrs_qot::Result<()> {
    let specs: Vec<ChannelSpec> = (0..96)
        .map(|i| ChannelSpec {
            abs_freq: 186.1e12 + i as f64 * 100e9,
            bandwidth: 64e9,
            launch_power: 1.5e-3,
        })
        .collect();
    let plan = ChannelPlan::from_specs(&specs)?;
    let fiber = FiberParams::ssmf(100.0)?;
    let lo = plan.channels()[0].center_freq;
    let hi = plan.channels()[plan.len() - 1].center_freq;

    println!("z_km  x_per_thz  gain_lowest_db  gain_highest_db  exact_lowest_db");
    for km in (0..=100).step_by(10) {
        let z = km as f64 * 1e3;
        let loss = (-fiber.alpha() * z).exp();
        let db = |rho: f64| 10.0 * (rho / loss).log10();
        println!(
            "{km:4}  {:9.4}  {:14.3}  {:15.3}  {:15.3}",
            tilt_coordinate(&plan, &fiber, z)? * 1e12,
            db(normalized_power_profile(&plan, &fiber, z, lo)?),
            db(normalized_power_profile(&plan, &fiber, z, hi)?),
            db(exact_power_profile(&plan, &fiber, z, lo)?)
        );
    }
    Ok(())
}
