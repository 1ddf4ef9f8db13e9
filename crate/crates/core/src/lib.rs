//! Quality-of-transmission estimation for multi-band optical links with
//! inter-channel stimulated Raman scattering (ISRS).
//!
//! The crate computes per-channel nonlinear interference (NLI) coefficients
//! with either a numerical ISRS GN integral or its closed-form
//! approximation, propagates signal, ASE and NLI powers through a chain of
//! amplified spans, and reports the generalized SNR (GSNR) per channel.
//!
//! All quantities are SI: Hz, W, m, s. Frequencies inside a
//! [`ChannelPlan`] are offsets from the center of the occupied band.

// `!(x > 0.0)` is the validation idiom throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod error;
pub mod fiber;
pub mod integral;
pub mod link;
pub mod model;
pub mod quadrature;
pub mod raman;
pub mod scenario;
pub mod spectrum;
pub mod units;

pub use closed_form::{
    eta_spm_closed, eta_total_closed, eta_xpm_closed_single, step4_xpm_integrand,
    step5_frequency_integral_check, t_factor, ClosedFormConstants, Step5Mode,
};
pub use error::{QotError, Result};
pub use fiber::{
    effective_length, phase_mismatch_spm, phase_mismatch_xpm, FiberBuilder, FiberParams,
};
pub use integral::{
    eta_plan_integral, eta_spm_integral, eta_total_integral, eta_xpm_integral, link_function,
    GridStrategy, QuadratureSpec,
};
pub use link::{
    ase_power, band_membership, gsnr_db, optimize_launch_power_partial,
    optimize_uniform_launch_power, propagate_span, simulate_link, ChannelRecord, ChannelState,
    LinkConfig, LinkReport, SpanConfig, SpanSnapshot,
};
pub use model::{
    ClosedFormModel, IntegralModel, ModelRegistry, ModelTag, NliModel, NliModelHandle, NliResult,
    ValidityWarning,
};
pub use raman::{
    exact_normalizer, exact_power_profile, isrs_gain_factor, normalized_power_profile, raman_state,
    sinhc, tilt_coordinate, uniform_spectrum_normalizer, RamanState,
};
pub use scenario::{
    compare, compare_tables, fmt_sig6, generate_scenario, run, ComparisonMetrics, GsnrTable,
    Launch, RunOutput, ScenarioConfig, ScenarioKind, SplitMix64,
};
pub use spectrum::{Channel, ChannelPlan, ChannelSpec};
