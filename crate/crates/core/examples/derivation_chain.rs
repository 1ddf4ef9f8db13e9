//! Walks from the numerical longitudinal integral to the closed form on one
//! C-band channel, printing each approximation next to the quantity it
//! replaces.

use std::f64::consts::PI;

use isrs_qot::closed_form::{step4_xpm_integrand, ClosedFormConstants};
use isrs_qot::{
    eta_spm_closed, eta_spm_integral, eta_xpm_closed_single, eta_xpm_integral, isrs_gain_factor,
    link_function, step5_frequency_integral_check, t_factor, tilt_coordinate, ChannelPlan,
    ChannelSpec, FiberParams, QuadratureSpec, Step5Mode,
};

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
    let q = QuadratureSpec::default();

    println!("1. tilt factor against its first-order expansion at the band edge");
    let x = tilt_coordinate(&plan, &fiber, fiber.length())?;
    let (f_lo, _) = plan.band_edges();
    println!(
        "   exp(-x f)/N = {:.6}   1 - x f = {:.6}",
        isrs_gain_factor(x, f_lo, plan.total_bandwidth()),
        1.0 - x * f_lo
    );

    println!(
        "2. longitudinal factor: infinite-span rational form against the numerical span integral"
    );
    let long = fiber.to_builder().length_si(10.0 / fiber.alpha()).build()?;
    for (f1, f2, fi) in [
        (0.3e12, -0.2e12, 0.05e12),
        (1.0e12, 1.1e12, 1.05e12),
        (-2.0e12, 2.0e12, 0.0),
    ] {
        let c = ClosedFormConstants {
            t: t_factor(f1 + f2 - fi, &plan, &long),
            a: long.alpha() + long.alpha_bar(),
            phi: -4.0 * PI * PI * (long.beta2() + PI * long.beta3() * (f1 + f2)),
        };
        let rational = step4_xpm_integrand(f1 - fi, f2 - fi, &c, &long);
        let numeric = link_function(f1, f2, fi, &plan, &long, &q)?;
        println!("   ({f1:+.1e}, {f2:+.1e}, {fi:+.1e}): {rational:.5e} vs {numeric:.5e}");
    }

    let coi = plan.channels()[24];
    let k = plan.channels()[30];
    println!(
        "3. SPM of channel {}: hexagon-as-disc closed form against the integral",
        coi.index
    );
    let spm_c = ClosedFormConstants::spm(&coi, &plan, &fiber);
    let disc = step5_frequency_integral_check(&spm_c, coi.bandwidth, Step5Mode::SpmAsinh, &fiber)?;
    println!("   frequency integral (disc) = {disc:.5e} m^2 Hz^2");
    println!(
        "   eta_spm closed = {:.5e}   integral = {:.5e}  1/W^2",
        eta_spm_closed(&coi, &plan, &fiber)?,
        eta_spm_integral(&coi, &plan, &fiber, &q)?
    );

    println!(
        "4. XPM from channel {}: strip closed form against the integral",
        k.index
    );
    println!(
        "   eta_xpm closed = {:.5e}   integral = {:.5e}  1/W^2",
        eta_xpm_closed_single(&coi, &k, &plan, &fiber)?,
        eta_xpm_integral(&coi, &k, &plan, &fiber, &q)?
    );
    Ok(())
}
