//! Numerical evaluation of the ISRS GN model for one fiber span.
//!
//! For a channel of interest `i` the NLI coefficient splits into an SPM term
//! (all three pump frequencies inside channel `i`) and one XPM term per
//! interferer `k` (two of the frequencies inside `k`). Each term is a 2D
//! frequency integral of the squared link function
//!
//! ```text
//! |∫_0^L e^{-αζ} e^{-x(ζ)·f₃} / N(x(ζ)) · e^{jφζ} dζ|²,   f₃ = f₁ + f₂ − f_i
//! φ = −4π²(f₁ − f_i)(f₂ − f_i)[β₂ + πβ₃(f₁ + f₂)]
//! ```
//!
//! where `N` is the occupancy-aware Raman normalizer. Prefactors follow from
//! `P_NLI = η·P_i³`: `16/27·γ²/B_i²` for SPM and `32/27·γ²·(P_k/P_i)²/B_k²`
//! for XPM, with the rectangle selector keeping `f₃` inside the pumped
//! channel.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};
use crate::fiber::{effective_length, FiberParams};
use crate::model::{ModelTag, NliResult};
use crate::quadrature::{exp_neg, filon_integrate, GaussLegendre, Rule};
use crate::raman::exact_normalizer;
use crate::spectrum::{Channel, ChannelPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridStrategy {
    Uniform,
    HyperbolicRefined,
}

/// Discretization of the integral model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Sub-intervals of the span for the longitudinal integral (rounded up to even).
    pub zeta_points: usize,
    /// Nodes per frequency axis. With grading, each geometric panel gets
    /// `f_grid_points / 16` Gauss–Legendre nodes.
    pub f_grid_points: usize,
    pub grid_strategy: GridStrategy,
    /// Accepted relative change between a longitudinal grid and its refinement.
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            zeta_points: 128,
            f_grid_points: 128,
            grid_strategy: GridStrategy::HyperbolicRefined,
            rel_tol: 1e-4,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.zeta_points < 16 {
            return Err(QotError::invalid("zeta_points", "at least 16 required"));
        }
        if self.f_grid_points < 32 {
            return Err(QotError::invalid("f_grid_points", "at least 32 required"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 0.1) {
            return Err(QotError::invalid("rel_tol", "must lie in (0, 0.1)"));
        }
        Ok(())
    }

    fn intervals(&self) -> usize {
        self.zeta_points + self.zeta_points % 2
    }
}

const MAX_ZETA_DOUBLINGS: usize = 6;
const GRADING_RATIO: f64 = 0.3;
const FOUR_PI2: f64 = 4.0 * PI * PI;

/// Longitudinal samples of the ISRS envelope for one span.
struct SpanKernel {
    length: f64,
    alpha: f64,
    xs: Vec<f64>,
    inv_norm: Vec<f64>,
}

impl SpanKernel {
    fn new(plan: &ChannelPlan, fiber: &FiberParams, intervals: usize) -> Self {
        let h = fiber.length() / intervals as f64;
        let scale = plan.total_power() * fiber.cr();
        let xs: Vec<f64> = (0..=intervals)
            .map(|j| scale * effective_length(fiber.alpha(), j as f64 * h))
            .collect();
        let inv_norm = xs
            .iter()
            .map(|&x| 1.0 / exact_normalizer(x, plan))
            .collect();
        Self {
            length: fiber.length(),
            alpha: fiber.alpha(),
            xs,
            inv_norm,
        }
    }

    /// `e^{-x_j f} / N(x_j)` for every node.
    fn fill_samples(&self, f: f64, out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.xs
                .iter()
                .zip(&self.inv_norm)
                .map(|(x, n)| n * (-x * f).exp()),
        );
    }

    /// Multiplies base samples by `e^{-x_j·δ}` for a small offset `δ`.
    fn shift_samples(&self, base: &[f64], delta: f64, out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.xs
                .iter()
                .zip(base)
                .map(|(x, b)| b * exp_neg(x * delta)),
        );
    }

    fn integral(&self, psi: f64, samples: &[f64]) -> Complex64 {
        filon_integrate(Complex64::new(-self.alpha, psi), self.length, samples)
    }

    fn envelope(&self, f: f64) -> f64 {
        let mut g = Vec::with_capacity(self.xs.len());
        self.fill_samples(f, &mut g);
        self.integral(0.0, &g).re
    }
}

fn converged_kernel(
    plan: &ChannelPlan,
    fiber: &FiberParams,
    quad: &QuadratureSpec,
) -> Result<SpanKernel> {
    let (lo, hi) = plan.band_edges();
    let mut intervals = quad.intervals();
    let mut coarse = SpanKernel::new(plan, fiber, intervals);
    for _ in 0..MAX_ZETA_DOUBLINGS {
        let fine = SpanKernel::new(plan, fiber, 2 * intervals);
        let converged = [lo, 0.0, hi].iter().all(|&f| {
            let (a, b) = (coarse.envelope(f), fine.envelope(f));
            (a - b).abs() <= quad.rel_tol * b.abs()
        });
        if converged {
            return Ok(coarse);
        }
        coarse = fine;
        intervals *= 2;
    }
    Err(QotError::QuadratureNonConvergence(format!(
        "span envelope unresolved with {intervals} longitudinal intervals"
    )))
}

/// Phase rate `φ/ζ` of the four-wave-mixing product `(f₁, f₂) → f_i`.
pub fn phase_rate(f1: f64, f2: f64, f_i: f64, fiber: &FiberParams) -> f64 {
    -FOUR_PI2 * (f1 - f_i) * (f2 - f_i) * (fiber.beta2() + PI * fiber.beta3() * (f1 + f2))
}

fn check_in_band(plan: &ChannelPlan, what: &'static str, f: f64) -> Result<()> {
    let (lo, hi) = plan.band_edges();
    let slack = 1e-9 * plan.total_bandwidth();
    if f < lo - slack || f > hi + slack {
        return Err(QotError::OutOfRange {
            what,
            value: f,
            lo,
            hi,
        });
    }
    Ok(())
}

/// Squared modulus of the span's longitudinal integral for the product
/// `(f₁, f₂) → f_i`, refined until two successive grids agree within `rel_tol`.
pub fn link_function(
    f1: f64,
    f2: f64,
    f_i: f64,
    plan: &ChannelPlan,
    fiber: &FiberParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    quad.validate()?;
    let f3 = f1 + f2 - f_i;
    check_in_band(plan, "f1", f1)?;
    check_in_band(plan, "f2", f2)?;
    check_in_band(plan, "f_i", f_i)?;
    check_in_band(plan, "f1 + f2 - f_i", f3)?;
    let psi = phase_rate(f1, f2, f_i, fiber);
    let floor = 1e-12 / fiber.alpha();

    let mut intervals = quad.intervals();
    let mut g = Vec::new();
    let eval = |intervals: usize, g: &mut Vec<f64>| {
        let k = SpanKernel::new(plan, fiber, intervals);
        k.fill_samples(f3, g);
        k.integral(psi, g)
    };
    let mut prev = eval(intervals, &mut g);
    for _ in 0..MAX_ZETA_DOUBLINGS {
        intervals *= 2;
        let cur = eval(intervals, &mut g);
        if (cur - prev).norm() <= quad.rel_tol * cur.norm() + floor {
            return Ok(cur.norm_sqr());
        }
        prev = cur;
    }
    Err(QotError::QuadratureNonConvergence(format!(
        "link function unresolved with {intervals} longitudinal intervals"
    )))
}

/// Frequency-axis rules derived from a [`QuadratureSpec`].
struct FrequencyRules {
    strategy: GridStrategy,
    panel: GaussLegendre,
    uniform_panels: usize,
    strip: GaussLegendre,
}

impl FrequencyRules {
    fn new(quad: &QuadratureSpec) -> Self {
        let (panel, uniform_panels, strip) = match quad.grid_strategy {
            GridStrategy::Uniform => (
                GaussLegendre::new(8),
                (quad.f_grid_points / 8).max(1),
                GaussLegendre::new(8),
            ),
            GridStrategy::HyperbolicRefined => (
                GaussLegendre::new((quad.f_grid_points / 16).max(4)),
                1,
                GaussLegendre::new((quad.f_grid_points / 8).max(8)),
            ),
        };
        Self {
            strategy: quad.grid_strategy,
            panel,
            uniform_panels,
            strip,
        }
    }

    /// Axis on which the integrand peaks at `center` with width `ridge`.
    fn ridge_axis(&self, lo: f64, hi: f64, center: f64, ridge: f64, out: &mut Rule) {
        out.clear();
        match self.strategy {
            GridStrategy::Uniform => out.push_uniform(lo, hi, self.uniform_panels, &self.panel),
            GridStrategy::HyperbolicRefined => {
                out.push_graded(lo, hi, center, 0.5 * ridge, GRADING_RATIO, &self.panel)
            }
        }
    }

    /// Axis along which the integrand is smooth.
    fn smooth_axis(&self, lo: f64, hi: f64, out: &mut Rule) {
        out.clear();
        match self.strategy {
            GridStrategy::Uniform => out.push_uniform(lo, hi, self.uniform_panels, &self.panel),
            GridStrategy::HyperbolicRefined => self.strip.push_mapped(lo, hi, out),
        }
    }
}

fn check_coi(coi: &Channel, plan: &ChannelPlan) -> Result<()> {
    plan.check_member(coi)?;
    if !(coi.launch_power > 0.0) {
        return Err(QotError::invalid(
            "launch_power",
            format!("channel of interest {} carries no power", coi.index),
        ));
    }
    Ok(())
}

fn spm_with_kernel(
    coi: &Channel,
    fiber: &FiberParams,
    quad: &QuadratureSpec,
    kernel: &SpanKernel,
) -> f64 {
    let gamma = fiber.gamma();
    if gamma == 0.0 {
        return 0.0;
    }
    let b = coi.bandwidth;
    let fi = coi.center_freq;
    let (beta2, beta3) = (fiber.beta2(), fiber.beta3());
    let c_max = FOUR_PI2 * (beta2.abs() + PI * beta3.abs() * (2.0 * fi.abs() + b));
    let alpha = fiber.alpha();
    let rules = FrequencyRules::new(quad);

    let mut outer = Rule::default();
    rules.ridge_axis(
        -0.5 * b,
        0.5 * b,
        0.0,
        alpha / (c_max * 0.5 * b),
        &mut outer,
    );
    let mut inner = Rule::default();
    let (mut base, mut g) = (Vec::new(), Vec::new());
    let mut total = 0.0;
    for (v, wv) in outer.iter() {
        // f₁ = f_i + w, f₂ = f_i + v, f₃ = f_i + w + v must stay inside the channel
        let lo = (-0.5 * b).max(-0.5 * b - v);
        let hi = (0.5 * b).min(0.5 * b - v);
        if hi <= lo {
            continue;
        }
        rules.ridge_axis(lo, hi, 0.0, alpha / (c_max * v.abs()), &mut inner);
        kernel.fill_samples(fi + v, &mut base);
        let mut acc = 0.0;
        for (w, ww) in inner.iter() {
            kernel.shift_samples(&base, w, &mut g);
            let psi = -FOUR_PI2 * w * v * (beta2 + PI * beta3 * (2.0 * fi + w + v));
            acc += ww * kernel.integral(psi, &g).norm_sqr();
        }
        total += wv * acc;
    }
    16.0 / 27.0 * gamma * gamma / (b * b) * total
}

fn xpm_with_kernel(
    coi: &Channel,
    interferer: &Channel,
    fiber: &FiberParams,
    quad: &QuadratureSpec,
    kernel: &SpanKernel,
) -> f64 {
    let gamma = fiber.gamma();
    if gamma == 0.0 || interferer.launch_power == 0.0 {
        return 0.0;
    }
    let (bi, bk) = (coi.bandwidth, interferer.bandwidth);
    let (fi, fk) = (coi.center_freq, interferer.center_freq);
    let delta = fk - fi;
    let (beta2, beta3) = (fiber.beta2(), fiber.beta3());
    let c_max = FOUR_PI2 * (beta2.abs() + PI * beta3.abs() * (fi.abs() + fk.abs() + bi + bk));
    let ridge = fiber.alpha() / (c_max * (delta.abs() + 0.5 * bk));
    let rules = FrequencyRules::new(quad);

    let mut outer = Rule::default();
    rules.ridge_axis(-0.5 * bi, 0.5 * bi, 0.0, ridge, &mut outer);
    let mut inner = Rule::default();
    let (mut base, mut g) = (Vec::new(), Vec::new());
    let mut total = 0.0;
    for (v, wv) in outer.iter() {
        // f₁ = f_k + w (pump in k), f₂ = f_i + v (COI), f₃ = f_k + w + v inside k
        let lo = (-0.5 * bk).max(-0.5 * bk - v);
        let hi = (0.5 * bk).min(0.5 * bk - v);
        if hi <= lo {
            continue;
        }
        rules.smooth_axis(lo, hi, &mut inner);
        kernel.fill_samples(fk + v, &mut base);
        let mut acc = 0.0;
        for (w, ww) in inner.iter() {
            kernel.shift_samples(&base, w, &mut g);
            let psi = -FOUR_PI2 * (delta + w) * v * (beta2 + PI * beta3 * (fi + fk + w + v));
            acc += ww * kernel.integral(psi, &g).norm_sqr();
        }
        total += wv * acc;
    }
    let ratio = interferer.launch_power / coi.launch_power;
    32.0 / 27.0 * gamma * gamma * ratio * ratio / (bk * bk) * total
}

fn total_with_kernel(
    coi: &Channel,
    plan: &ChannelPlan,
    fiber: &FiberParams,
    quad: &QuadratureSpec,
    kernel: &SpanKernel,
) -> NliResult {
    let spm = spm_with_kernel(coi, fiber, quad, kernel);
    let xpm = plan
        .channels()
        .iter()
        .filter(|k| k.index != coi.index)
        .map(|k| (k.index, xpm_with_kernel(coi, k, fiber, quad, kernel)))
        .collect();
    NliResult::new(coi.index, spm, xpm, ModelTag::Integral)
}

/// SPM coefficient of `coi`, 1/W².
pub fn eta_spm_integral(
    coi: &Channel,
    plan: &ChannelPlan,
    fiber: &FiberParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    quad.validate()?;
    check_coi(coi, plan)?;
    if fiber.gamma() == 0.0 {
        return Ok(0.0);
    }
    let kernel = converged_kernel(plan, fiber, quad)?;
    Ok(spm_with_kernel(coi, fiber, quad, &kernel))
}

/// XPM coefficient imposed on `coi` by `interferer`, 1/W².
pub fn eta_xpm_integral(
    coi: &Channel,
    interferer: &Channel,
    plan: &ChannelPlan,
    fiber: &FiberParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    quad.validate()?;
    check_coi(coi, plan)?;
    plan.check_member(interferer)?;
    if interferer.index == coi.index {
        return Err(QotError::SelfInterference(coi.index));
    }
    if fiber.gamma() == 0.0 {
        return Ok(0.0);
    }
    let kernel = converged_kernel(plan, fiber, quad)?;
    Ok(xpm_with_kernel(coi, interferer, fiber, quad, &kernel))
}

/// SPM plus XPM from every other channel of the plan.
pub fn eta_total_integral(
    coi: &Channel,
    plan: &ChannelPlan,
    fiber: &FiberParams,
    quad: &QuadratureSpec,
) -> Result<NliResult> {
    quad.validate()?;
    check_coi(coi, plan)?;
    let kernel = converged_kernel(plan, fiber, quad)?;
    Ok(total_with_kernel(coi, plan, fiber, quad, &kernel))
}

/// [`eta_total_integral`] for every channel, sharing the longitudinal grid.
pub fn eta_plan_integral(
    plan: &ChannelPlan,
    fiber: &FiberParams,
    quad: &QuadratureSpec,
) -> Result<Vec<NliResult>> {
    quad.validate()?;
    for c in plan.channels() {
        check_coi(c, plan)?;
    }
    let kernel = converged_kernel(plan, fiber, quad)?;
    Ok(plan
        .channels()
        .par_iter()
        .map(|c| total_with_kernel(c, plan, fiber, quad, &kernel))
        .collect())
}
