//! The built-in 48-channel C-band scenario: optimized launch power, ten
//! spans with a WSS after span 5, both models, GSNR per span.

use isrs_qot::{generate_scenario, run, ModelRegistry, QuadratureSpec, ScenarioKind};

fn main() -> isrs_qot::Result<()> {
    let cfg = generate_scenario(ScenarioKind::CBand48, 0);
    let out = run(
        &cfg,
        &ModelRegistry::with_defaults(QuadratureSpec::default()),
        None,
    )?;
    println!("launch power: {:.2} dBm per channel", out.launch_dbm[0]);

    let (lo, mid, hi) = (0, out.plan.len() / 2, out.plan.len() - 1);
    println!("span  model         gsnr_db[{lo}]  gsnr_db[{mid}]  gsnr_db[{hi}]");
    for span in 0..cfg.link.spans {
        for (name, report) in &out.reports {
            let ch = &report.per_span[span].channels;
            println!(
                "{:4}  {name:12}  {:11.3}  {:12.3}  {:12.3}",
                span + 1,
                ch[lo].gsnr_db,
                ch[mid].gsnr_db,
                ch[hi].gsnr_db
            );
        }
    }
    for (name, m) in &out.metrics {
        println!("{name} vs {}: {m}", cfg.models[0]);
    }
    Ok(())
}
