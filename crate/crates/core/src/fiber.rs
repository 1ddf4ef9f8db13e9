//! Per-span fiber physics and the elementary quantities derived from it.

use std::f64::consts::PI;

use crate::error::{QotError, Result};
use crate::units;

/// Fiber parameters in SI units.
///
/// Constructed through [`FiberBuilder`], which validates the physical
/// invariants; the value is immutable afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams {
    alpha: f64,
    alpha_bar: f64,
    beta2: f64,
    beta3: f64,
    gamma: f64,
    cr: f64,
    length: f64,
}

impl FiberParams {
    /// Builder preloaded with standard single-mode fiber values and a 100 km span.
    pub fn builder() -> FiberBuilder {
        FiberBuilder::default()
    }

    /// Default SSMF with the given span length in km.
    pub fn ssmf(length_km: f64) -> Result<Self> {
        Self::builder().length_km(length_km).build()
    }

    /// Builder initialised from this fiber, for deriving variants.
    pub fn to_builder(&self) -> FiberBuilder {
        FiberBuilder {
            alpha: self.alpha,
            alpha_bar: Some(self.alpha_bar),
            beta2: self.beta2,
            beta3: self.beta3,
            gamma: self.gamma,
            cr: self.cr,
            length: self.length,
        }
    }

    /// Power attenuation, 1/m.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// Attenuation used for the ISRS tilt inside the closed form, 1/m.
    pub fn alpha_bar(&self) -> f64 {
        self.alpha_bar
    }
    /// Group-velocity dispersion, s²/m.
    pub fn beta2(&self) -> f64 {
        self.beta2
    }
    /// Dispersion slope, s³/m.
    pub fn beta3(&self) -> f64 {
        self.beta3
    }
    /// Nonlinear coefficient, 1/(W·m).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    /// Raman gain slope, 1/(W·m·Hz).
    pub fn cr(&self) -> f64 {
        self.cr
    }
    /// Span length, m.
    pub fn length(&self) -> f64 {
        self.length
    }
    /// Effective length of the whole span, m.
    pub fn span_effective_length(&self) -> f64 {
        effective_length(self.alpha, self.length)
    }
}

/// Builder for [`FiberParams`]. Setters take engineering units unless the
/// name says otherwise; values are stored in SI.
#[derive(Debug, Clone, Copy)]
pub struct FiberBuilder {
    alpha: f64,
    alpha_bar: Option<f64>,
    beta2: f64,
    beta3: f64,
    gamma: f64,
    cr: f64,
    length: f64,
}

impl Default for FiberBuilder {
    fn default() -> Self {
        Self {
            alpha: 0.2 * std::f64::consts::LN_10 / (10.0 * units::KM),
            alpha_bar: None,
            beta2: units::ps2_per_km(-21.7),
            beta3: units::ps3_per_km(0.14),
            gamma: units::per_w_km(1.3),
            cr: units::per_w_km_thz(0.028),
            length: 100.0 * units::KM,
        }
    }
}

impl FiberBuilder {
    pub fn alpha_db_per_km(mut self, v: f64) -> Self {
        self.alpha = v * std::f64::consts::LN_10 / (10.0 * units::KM);
        self
    }
    /// Unset means "equal to alpha".
    pub fn alpha_bar_db_per_km(mut self, v: f64) -> Self {
        self.alpha_bar = Some(v * std::f64::consts::LN_10 / (10.0 * units::KM));
        self
    }
    pub fn beta2_ps2_per_km(mut self, v: f64) -> Self {
        self.beta2 = units::ps2_per_km(v);
        self
    }
    pub fn beta3_ps3_per_km(mut self, v: f64) -> Self {
        self.beta3 = units::ps3_per_km(v);
        self
    }
    pub fn gamma_per_w_km(mut self, v: f64) -> Self {
        self.gamma = units::per_w_km(v);
        self
    }
    pub fn cr_per_w_km_thz(mut self, v: f64) -> Self {
        self.cr = units::per_w_km_thz(v);
        self
    }
    pub fn length_km(mut self, v: f64) -> Self {
        self.length = v * units::KM;
        self
    }

    pub fn alpha_si(mut self, v: f64) -> Self {
        self.alpha = v;
        self
    }
    pub fn alpha_bar_si(mut self, v: f64) -> Self {
        self.alpha_bar = Some(v);
        self
    }
    pub fn beta2_si(mut self, v: f64) -> Self {
        self.beta2 = v;
        self
    }
    pub fn beta3_si(mut self, v: f64) -> Self {
        self.beta3 = v;
        self
    }
    pub fn gamma_si(mut self, v: f64) -> Self {
        self.gamma = v;
        self
    }
    pub fn cr_si(mut self, v: f64) -> Self {
        self.cr = v;
        self
    }
    pub fn length_si(mut self, v: f64) -> Self {
        self.length = v;
        self
    }

    pub fn build(self) -> Result<FiberParams> {
        let alpha_bar = self.alpha_bar.unwrap_or(self.alpha);
        let positive = [
            ("alpha", self.alpha),
            ("alpha_bar", alpha_bar),
            ("length", self.length),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(QotError::invalid(
                    name,
                    format!("{v} must be positive and finite"),
                ));
            }
        }
        for (name, v) in [("gamma", self.gamma), ("cr", self.cr)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(QotError::invalid(
                    name,
                    format!("{v} must be non-negative and finite"),
                ));
            }
        }
        for (name, v) in [("beta2", self.beta2), ("beta3", self.beta3)] {
            if !v.is_finite() {
                return Err(QotError::invalid(name, "must be finite"));
            }
        }
        Ok(FiberParams {
            alpha: self.alpha,
            alpha_bar,
            beta2: self.beta2,
            beta3: self.beta3,
            gamma: self.gamma,
            cr: self.cr,
            length: self.length,
        })
    }
}

/// `(1 - exp(-alpha·z)) / alpha`, the nonlinear effective length up to `z`.
pub fn effective_length(alpha: f64, z: f64) -> f64 {
    debug_assert!(alpha > 0.0 && z >= 0.0);
    -(-alpha * z).exp_m1() / alpha
}

/// SPM phase-mismatch factor `3/2·π²·(β₂ + 2π·β₃·f_i)` entering the asinh
/// arguments of the closed form. Sign follows the local dispersion.
pub fn phase_mismatch_spm(f_i: f64, fiber: &FiberParams) -> f64 {
    1.5 * PI * PI * (fiber.beta2 + 2.0 * PI * fiber.beta3 * f_i)
}

/// XPM phase-mismatch factor `2π²·(f_k − f_i)·(β₂ + π·β₃·(f_i + f_k))`.
pub fn phase_mismatch_xpm(f_i: f64, f_k: f64, fiber: &FiberParams) -> Result<f64> {
    if f_i == f_k {
        return Err(QotError::invalid(
            "f_k",
            "an interferer at the channel-of-interest frequency is an SPM term",
        ));
    }
    Ok(2.0 * PI * PI * (f_k - f_i) * (fiber.beta2 + PI * fiber.beta3 * (f_i + f_k)))
}
