//! C+L transmission (96 channels, 9.6 THz): the Raman tilt moves power from
//! C to L, and the optimizer picks a launch power per band. Prints the
//! end-of-link GSNR per band for both models.

use isrs_qot::{generate_scenario, run, ModelRegistry, QuadratureSpec, ScenarioKind};

fn main() -> isrs_qot::Result<()> {
    let cfg = generate_scenario(ScenarioKind::ClBand96, 0);
    let out = run(
        &cfg,
        &ModelRegistry::with_defaults(QuadratureSpec::default()),
        None,
    )?;
    for (band, dbm) in cfg.bands.iter().zip(&out.launch_dbm) {
        println!("band {}: launch {dbm:.2} dBm", band.name);
    }
    for (name, report) in &out.reports {
        println!("{name}:");
        for band in &cfg.bands {
            let (lo, hi) = band.range_hz();
            let gsnr: Vec<f64> = out
                .plan
                .channels()
                .iter()
                .zip(&report.last().channels)
                .filter(|(c, _)| (lo..=hi).contains(&out.plan.absolute_freq(c)))
                .map(|(_, r)| r.gsnr_db)
                .collect();
            let min = gsnr.iter().copied().fold(f64::INFINITY, f64::min);
            let max = gsnr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mean = gsnr.iter().sum::<f64>() / gsnr.len() as f64;
            println!(
                "  {}: min {min:.2} dB, mean {mean:.2} dB, max {max:.2} dB",
                band.name
            );
        }
    }
    for (name, m) in &out.metrics {
        println!("{name} vs {}: {m}", cfg.models[0]);
    }
    Ok(())
}
