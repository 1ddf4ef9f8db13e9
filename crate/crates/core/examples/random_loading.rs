//! Partially loaded C+L spectrum: 60 of 96 slots chosen at random per seed.
//! Compares the closed form against the integral for a few seeds.

use isrs_qot::{generate_scenario, run, ModelRegistry, QuadratureSpec, ScenarioKind};

fn main() -> isrs_qot::Result<()> {
    let registry = ModelRegistry::with_defaults(QuadratureSpec::default());
    println!("seed  channels  launch_c  launch_l  mae_db   max_ae_db");
    for seed in 0..4 {
        let cfg = generate_scenario(ScenarioKind::Random60, seed);
        let out = run(&cfg, &registry, None)?;
        let (_, m) = &out.metrics[0];
        println!(
            "{seed:4}  {:8}  {:8.2}  {:8.2}  {:.5}  {:.5}",
            out.plan.len(),
            out.launch_dbm[0],
            out.launch_dbm[1],
            m.mae_db,
            m.max_ae_db
        );
    }
    Ok(())
}
