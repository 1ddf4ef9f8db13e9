//! Closed-form SPM and XPM coefficients of the ISRS GN model, and the
//! intermediate integrands used to check them.
//!
//! In the limit `exp(-αL) ≪ 1`, with the Raman tilt expanded to first order
//! as `e^{-αζ}·(1 − P_tot·C_r·f·(1 − e^{-ᾱζ})/ᾱ)`, the longitudinal integral
//! has the rational modulus
//!
//! ```text
//! (T + ψ²) / ((α² + ψ²)(A² + ψ²)),   T = (A − P_tot·C_r·f)²,  A = α + ᾱ
//! ```
//!
//! with `ψ = φ·f₁·f₂`. Integrating that over the SPM hexagon (replaced by the
//! disc of equal area) gives asinh terms, over the XPM strip atan terms.

use std::f64::consts::PI;

use crate::error::{QotError, Result};
use crate::fiber::{phase_mismatch_spm, phase_mismatch_xpm, FiberParams};
use crate::model::{ModelTag, NliResult, ValidityWarning};
use crate::spectrum::{Channel, ChannelPlan};

/// Residual span power `exp(-αL)` above which the infinite-span limit is flagged.
pub const SHORT_SPAN_RESIDUAL: f64 = 0.05;

/// Constants of the rational longitudinal integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormConstants {
    /// `(α + ᾱ − P_tot·C_r·f)²`, 1/m².
    pub t: f64,
    /// `α + ᾱ`, 1/m.
    pub a: f64,
    /// Phase rate: the integrand phase is `ψ = phi·f₁·f₂`, in s²/m.
    pub phi: f64,
}

impl ClosedFormConstants {
    /// Constants for the SPM integrand of `coi`, with `f₁, f₂` the offsets
    /// of the two pumps from the channel center.
    pub fn spm(coi: &Channel, plan: &ChannelPlan, fiber: &FiberParams) -> Self {
        Self {
            t: t_factor(coi.center_freq, plan, fiber),
            a: fiber.alpha() + fiber.alpha_bar(),
            phi: 8.0 / 3.0 * phase_mismatch_spm(coi.center_freq, fiber),
        }
    }

    /// Constants for the XPM integrand of `coi` under `interferer`, with
    /// `f₁ = f_k − f_i` and `f₂` the offset inside the channel of interest.
    pub fn xpm(
        coi: &Channel,
        interferer: &Channel,
        plan: &ChannelPlan,
        fiber: &FiberParams,
    ) -> Result<Self> {
        let delta = interferer.center_freq - coi.center_freq;
        let phi_ik = phase_mismatch_xpm(coi.center_freq, interferer.center_freq, fiber)?;
        Ok(Self {
            t: t_factor(interferer.center_freq, plan, fiber),
            a: fiber.alpha() + fiber.alpha_bar(),
            phi: 2.0 * phi_ik / delta,
        })
    }

    fn validate(&self, alpha: f64) -> Result<()> {
        if !(self.t >= 0.0) {
            return Err(QotError::invalid("t", "must be non-negative"));
        }
        if !(self.a > alpha) {
            return Err(QotError::invalid("a", "must exceed alpha"));
        }
        Ok(())
    }
}

/// `(α + ᾱ − P_tot·C_r·f)²` in 1/m².
pub fn t_factor(f: f64, plan: &ChannelPlan, fiber: &FiberParams) -> f64 {
    let d = fiber.alpha() + fiber.alpha_bar() - plan.total_power() * fiber.cr() * f;
    d * d
}

/// `asinh(u)/u`, equal to 1 at zero.
pub fn asinhc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.asinh() / u
    }
}

/// `atan(u)/u`, equal to 1 at zero.
pub fn atanc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 3.0
    } else {
        u.atan() / u
    }
}

/// Partial-fraction weights of the two Lorentzians, divided by `a²`:
/// `(T − α²)/(α²(A² − α²))` and `(A² − T)/(A²(A² − α²))`.
fn lorentz_weights(t: f64, alpha: f64, a: f64) -> [(f64, f64); 2] {
    let (a2, al2) = (a * a, alpha * alpha);
    let denom = a2 - al2;
    [
        (alpha, (t - al2) / (al2 * denom)),
        (a, (a2 - t) / (a2 * denom)),
    ]
}

/// SPM coefficient `η_SPM`, 1/W².
pub fn eta_spm_closed(coi: &Channel, plan: &ChannelPlan, fiber: &FiberParams) -> Result<f64> {
    plan.check_member(coi)?;
    let phi = phase_mismatch_spm(coi.center_freq, fiber);
    if phi == 0.0 {
        return Err(QotError::ZeroDispersion);
    }
    let c = ClosedFormConstants::spm(coi, plan, fiber);
    let gamma = fiber.gamma();
    let b = coi.bandwidth;
    let bracket: f64 = lorentz_weights(c.t, fiber.alpha(), c.a)
        .iter()
        .map(|&(a, w)| w * asinhc(phi.abs() * b * b / (PI * a)))
        .sum();
    Ok(4.0 / 9.0 * gamma * gamma * bracket)
}

/// XPM coefficient imposed on `coi` by one interferer, 1/W².
pub fn eta_xpm_closed_single(
    coi: &Channel,
    interferer: &Channel,
    plan: &ChannelPlan,
    fiber: &FiberParams,
) -> Result<f64> {
    plan.check_member(coi)?;
    plan.check_member(interferer)?;
    if interferer.index == coi.index {
        return Err(QotError::SelfInterference(coi.index));
    }
    if !(coi.launch_power > 0.0) {
        return Err(QotError::invalid(
            "launch_power",
            format!("channel of interest {} carries no power", coi.index),
        ));
    }
    if interferer.launch_power == 0.0 {
        return Ok(0.0);
    }
    let phi = phase_mismatch_xpm(coi.center_freq, interferer.center_freq, fiber)?;
    if phi == 0.0 {
        return Err(QotError::ZeroDispersion);
    }
    let t = t_factor(interferer.center_freq, plan, fiber);
    let a = fiber.alpha() + fiber.alpha_bar();
    let (bi, bk) = (coi.bandwidth, interferer.bandwidth);
    let bracket: f64 = lorentz_weights(t, fiber.alpha(), a)
        .iter()
        .map(|&(a, w)| w * atanc(phi.abs() * bi / a))
        .sum();
    let ratio = interferer.launch_power / coi.launch_power;
    let gamma = fiber.gamma();
    Ok(32.0 / 27.0 * ratio * ratio * gamma * gamma * bi / bk * bracket)
}

/// SPM plus XPM from every other channel, with validity warnings attached.
pub fn eta_total_closed(
    coi: &Channel,
    plan: &ChannelPlan,
    fiber: &FiberParams,
) -> Result<NliResult> {
    let spm = eta_spm_closed(coi, plan, fiber)?;
    let mut xpm = Vec::with_capacity(plan.len().saturating_sub(1));
    let mut warnings = Vec::new();
    let residual = (-fiber.alpha() * fiber.length()).exp();
    if residual > SHORT_SPAN_RESIDUAL {
        warnings.push(ValidityWarning::ShortSpan { residual });
    }
    for k in plan.channels().iter().filter(|k| k.index != coi.index) {
        let separation = (k.center_freq - coi.center_freq).abs();
        if separation < k.bandwidth && k.launch_power > 0.0 {
            warnings.push(ValidityWarning::CloseInterferer {
                channel: coi.index,
                interferer: k.index,
                separation_hz: separation,
                bandwidth_hz: k.bandwidth,
            });
        }
        xpm.push((k.index, eta_xpm_closed_single(coi, k, plan, fiber)?));
    }
    let mut r = NliResult::new(coi.index, spm, xpm, ModelTag::ClosedForm);
    r.warnings = warnings;
    Ok(r)
}

/// Modulus squared of the infinite-span longitudinal integral at `(f₁, f₂)`,
/// `(T + ψ²)/((α² + ψ²)(A² + ψ²))` with `ψ = φ·f₁·f₂`, in m².
pub fn step4_xpm_integrand(
    f1: f64,
    f2: f64,
    constants: &ClosedFormConstants,
    fiber: &FiberParams,
) -> f64 {
    let psi = constants.phi * f1 * f2;
    let p2 = psi * psi;
    let alpha = fiber.alpha();
    (constants.t + p2) / ((alpha * alpha + p2) * (constants.a * constants.a + p2))
}

/// Integration domain for [`step5_frequency_integral_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step5Mode {
    /// `f₁, f₂ ∈ [−B/2, B/2]` with `|f₁ + f₂| ≤ B/2`, replaced by the disc of
    /// equal area `3B²/4`.
    SpmAsinh,
    /// `f₁` fixed at `separation`, `f₂ ∈ [−B/2, B/2]`.
    XpmAtan { separation: f64 },
}

/// Analytic frequency integral of [`step4_xpm_integrand`] over the domain
/// selected by `mode`, in m²·Hz² (SPM) or m²·Hz (XPM).
pub fn step5_frequency_integral_check(
    constants: &ClosedFormConstants,
    b_i: f64,
    mode: Step5Mode,
    fiber: &FiberParams,
) -> Result<f64> {
    if !(b_i > 0.0) {
        return Err(QotError::invalid("b_i", "must be positive"));
    }
    constants.validate(fiber.alpha())?;
    let phi = constants.phi.abs();
    let weights = lorentz_weights(constants.t, fiber.alpha(), constants.a);
    Ok(match mode {
        Step5Mode::SpmAsinh => {
            let area = 0.75 * b_i * b_i;
            weights
                .iter()
                .map(|&(a, w)| w * area * asinhc(3.0 * phi * b_i * b_i / (8.0 * PI * a)))
                .sum()
        }
        Step5Mode::XpmAtan { separation } => weights
            .iter()
            .map(|&(a, w)| w * b_i * atanc(phi * separation.abs() * b_i / (2.0 * a)))
            .sum(),
    })
}
