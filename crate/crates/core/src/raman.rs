//! ISRS-tilted power evolution along a span under the linearised
//! (triangular) Raman gain.
//!
//! The tilt coordinate `x(z) = P_tot·C_r·L_eff(z)` has units of 1/Hz, so the
//! local tilt is `exp(-x·f)` for a relative frequency `f` in Hz.

use crate::error::{QotError, Result};
use crate::fiber::{effective_length, FiberParams};
use crate::spectrum::ChannelPlan;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanState {
    /// Tilt coordinate, 1/Hz.
    pub x: f64,
    /// Position along the span, m.
    pub z: f64,
    /// Bandwidth the uniform-spectrum normalizer is taken over, Hz.
    pub total_bandwidth: f64,
}

fn check_position(fiber: &FiberParams, z: f64) -> Result<()> {
    if !(0.0..=fiber.length()).contains(&z) {
        return Err(QotError::OutOfRange {
            what: "z",
            value: z,
            lo: 0.0,
            hi: fiber.length(),
        });
    }
    Ok(())
}

pub fn tilt_coordinate(plan: &ChannelPlan, fiber: &FiberParams, z: f64) -> Result<f64> {
    check_position(fiber, z)?;
    Ok(plan.total_power() * fiber.cr() * effective_length(fiber.alpha(), z))
}

pub fn raman_state(plan: &ChannelPlan, fiber: &FiberParams, z: f64) -> Result<RamanState> {
    Ok(RamanState {
        x: tilt_coordinate(plan, fiber, z)?,
        z,
        total_bandwidth: plan.total_bandwidth(),
    })
}

/// `sinh(u)/u`, exact at zero.
pub fn sinhc(u: f64) -> f64 {
    if u.abs() < 1e-6 {
        1.0 + u * u / 6.0
    } else {
        u.sinh() / u
    }
}

/// Band average of `exp(-x·ν)` over `ν ∈ [-B/2, B/2]`, i.e. `(2/(x·B))·sinh(x·B/2)`.
pub fn uniform_spectrum_normalizer(x: f64, b_tot: f64) -> f64 {
    sinhc(0.5 * x * b_tot)
}

/// Occupancy-aware counterpart of [`uniform_spectrum_normalizer`]: the
/// power-weighted average of `exp(-x·ν)` over the channels actually present.
pub fn exact_normalizer(x: f64, plan: &ChannelPlan) -> f64 {
    let p_tot = plan.total_power();
    plan.channels()
        .iter()
        .map(|c| c.launch_power / p_tot * (-x * c.center_freq).exp() * sinhc(0.5 * x * c.bandwidth))
        .sum()
}

/// Loss-stripped tilt factor `exp(-x·f) / normalizer`. Equals 1 when `x = 0`
/// and expands as `1 - x·f + O(x²)`.
pub fn isrs_gain_factor(x: f64, f: f64, b_tot: f64) -> f64 {
    (-x * f).exp() / uniform_spectrum_normalizer(x, b_tot)
}

fn check_in_band(plan: &ChannelPlan, f: f64) -> Result<()> {
    let (lo, hi) = plan.band_edges();
    let slack = 1e-9 * plan.total_bandwidth();
    if f < lo - slack || f > hi + slack {
        return Err(QotError::OutOfRange {
            what: "f",
            value: f,
            lo,
            hi,
        });
    }
    Ok(())
}

/// Normalized signal power `ρ(z, f)` with the uniform-spectrum normalizer.
pub fn normalized_power_profile(
    plan: &ChannelPlan,
    fiber: &FiberParams,
    z: f64,
    f: f64,
) -> Result<f64> {
    check_in_band(plan, f)?;
    let x = tilt_coordinate(plan, fiber, z)?;
    Ok((-fiber.alpha() * z).exp() * isrs_gain_factor(x, f, plan.total_bandwidth()))
}

/// Normalized signal power with the occupancy-aware normalizer.
pub fn exact_power_profile(plan: &ChannelPlan, fiber: &FiberParams, z: f64, f: f64) -> Result<f64> {
    check_in_band(plan, f)?;
    let x = tilt_coordinate(plan, fiber, z)?;
    Ok((-fiber.alpha() * z).exp() * (-x * f).exp() / exact_normalizer(x, plan))
}
