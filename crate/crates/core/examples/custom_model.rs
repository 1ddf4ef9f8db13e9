//! Plugging a user model into the registry. The model here is the closed
//! form with Raman scattering switched off, which shows how much of the
//! NLI tilt across a wide band comes from ISRS.

use isrs_qot::{
    eta_total_closed, generate_scenario, run, Channel, ChannelPlan, FiberParams, ModelRegistry,
    ModelTag, NliModel, NliModelHandle, NliResult, QuadratureSpec, ScenarioKind,
};

struct NoRaman;

impl NliModel for NoRaman {
    fn evaluate(
        &self,
        coi: &Channel,
        plan: &ChannelPlan,
        fiber: &FiberParams,
    ) -> isrs_qot::Result<NliResult> {
        let fiber = fiber.to_builder().cr_si(0.0).build()?;
        let mut r = eta_total_closed(coi, plan, &fiber)?;
        r.model_tag = ModelTag::Custom("no_raman".into());
        Ok(r)
    }
}

fn main() -> isrs_qot::Result<()> {
    let mut registry = ModelRegistry::with_defaults(QuadratureSpec::default());
    registry.register(NliModelHandle::new("no_raman", NoRaman))?;

    let mut cfg = generate_scenario(ScenarioKind::ClBand96, 0);
    cfg.models = vec!["closed_form".into(), "no_raman".into()];
    let out = run(&cfg, &registry, None)?;

    println!("freq_thz  gsnr_isrs_db  gsnr_no_raman_db");
    let (a, b) = (&out.reports[0].1, &out.reports[1].1);
    for (i, c) in out.plan.channels().iter().enumerate().step_by(8) {
        println!(
            "{:8.2}  {:12.3}  {:16.3}",
            out.plan.absolute_freq(c) / 1e12,
            a.last().channels[i].gsnr_db,
            b.last().channels[i].gsnr_db
        );
    }
    println!("no_raman vs closed_form: {}", out.metrics[0].1);
    Ok(())
}
