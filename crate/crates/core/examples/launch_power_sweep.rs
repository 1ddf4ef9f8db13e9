//! GSNR against launch power on a C-band link: ASE dominates at low power,
//! NLI at high power. Ends with the optimizer's choice.

use isrs_qot::link::LinkConfig;
use isrs_qot::units::dbm_to_watt;
use isrs_qot::{
    optimize_uniform_launch_power, simulate_link, ChannelPlan, ChannelSpec, ClosedFormModel,
    FiberParams, NliModelHandle, SpanConfig,
};

fn plan(dbm: f64) -> isrs_qot::Result<ChannelPlan> {
    let specs: Vec<ChannelSpec> = (0..48)
        .map(|i| ChannelSpec {
            abs_freq: 191.4e12 + i as f64 * 100e9,
            bandwidth: 64e9,
            launch_power: dbm_to_watt(dbm),
        })
        .collect();
    ChannelPlan::from_specs(&specs)
}

fn main() -> isrs_qot::Result<()> {
    let model = NliModelHandle::new("closed_form", ClosedFormModel);
    let span = SpanConfig::new(FiberParams::ssmf(100.0)?);
    let link = LinkConfig::uniform(span, 10, &[5], 0.0)?;
    let best =
        optimize_uniform_launch_power(&plan(0.0)?, &span, &model, &[(191.0e12, 196.5e12)])?[0];

    println!("launch_dbm  mean_gsnr_db  center_ase_dbm  center_nli_dbm");
    for step in 0..=16 {
        let dbm = -4.0 + 0.5 * step as f64;
        let p = plan(dbm)?;
        let last = simulate_link(&link, &p, &model)?.last().clone();
        let mean =
            last.channels.iter().map(|r| r.gsnr_db).sum::<f64>() / last.channels.len() as f64;
        let c = &last.channels[24];
        println!(
            "{dbm:10.1}  {mean:12.3}  {:14.2}  {:14.2}",
            10.0 * (c.ase_power * 1e3).log10(),
            10.0 * (c.nli_power * 1e3).log10()
        );
    }
    println!("optimizer (0.25 dB grid): {best:.2} dBm");
    Ok(())
}
