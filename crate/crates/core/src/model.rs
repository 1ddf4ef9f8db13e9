//! Per-channel NLI results and the registry of NLI models.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::closed_form;
use crate::error::{QotError, Result};
use crate::fiber::FiberParams;
use crate::integral::{self, QuadratureSpec};
use crate::spectrum::{Channel, ChannelPlan};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModelTag {
    Integral,
    ClosedForm,
    Custom(String),
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelTag::Integral => f.write_str("integral"),
            ModelTag::ClosedForm => f.write_str("closed_form"),
            ModelTag::Custom(name) => f.write_str(name),
        }
    }
}

/// A closed-form model used outside the regime its approximations assume.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidityWarning {
    /// `exp(-αL)` is not small against 1.
    ShortSpan { residual: f64 },
    /// Interferer closer than one interferer bandwidth.
    CloseInterferer {
        channel: usize,
        interferer: usize,
        separation_hz: f64,
        bandwidth_hz: f64,
    },
}

impl fmt::Display for ValidityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidityWarning::ShortSpan { residual } => {
                write!(f, "warning kind=short_span exp_neg_alpha_l={residual:.4}")
            }
            ValidityWarning::CloseInterferer {
                channel,
                interferer,
                separation_hz,
                bandwidth_hz,
            } => write!(
                f,
                "warning kind=close_interferer channel={channel} interferer={interferer} \
                 separation_ghz={:.3} bandwidth_ghz={:.3}",
                separation_hz / 1e9,
                bandwidth_hz / 1e9
            ),
        }
    }
}

/// NLI coefficients of one channel, normalized so that `P_NLI = η·P_i³`.
#[derive(Debug, Clone, PartialEq)]
pub struct NliResult {
    pub channel_index: usize,
    /// 1/W²
    pub eta_spm: f64,
    /// (interferer index, 1/W²), ascending interferer index.
    pub eta_xpm_by_interferer: Vec<(usize, f64)>,
    /// 1/W²
    pub eta_total: f64,
    pub model_tag: ModelTag,
    pub warnings: Vec<ValidityWarning>,
}

impl NliResult {
    /// Sums the XPM terms in index order onto the SPM term.
    pub fn new(
        channel_index: usize,
        eta_spm: f64,
        eta_xpm_by_interferer: Vec<(usize, f64)>,
        model_tag: ModelTag,
    ) -> Self {
        let eta_total = eta_spm + eta_xpm_by_interferer.iter().map(|(_, e)| e).sum::<f64>();
        Self {
            channel_index,
            eta_spm,
            eta_xpm_by_interferer,
            eta_total,
            model_tag,
            warnings: Vec::new(),
        }
    }

    pub fn eta_xpm(&self) -> f64 {
        self.eta_xpm_by_interferer.iter().map(|(_, e)| e).sum()
    }
}

/// Something that maps a channel of a plan on a fiber span to NLI coefficients.
pub trait NliModel: Send + Sync {
    fn evaluate(&self, coi: &Channel, plan: &ChannelPlan, fiber: &FiberParams)
        -> Result<NliResult>;

    /// All channels of the plan, in channel order. Channels may be evaluated
    /// concurrently; the result does not depend on the thread count.
    fn evaluate_plan(&self, plan: &ChannelPlan, fiber: &FiberParams) -> Result<Vec<NliResult>> {
        plan.channels()
            .par_iter()
            .map(|c| self.evaluate(c, plan, fiber))
            .collect()
    }
}

/// A named NLI model.
#[derive(Clone)]
pub struct NliModelHandle {
    name: String,
    evaluator: Arc<dyn NliModel>,
}

impl NliModelHandle {
    pub fn new(name: impl Into<String>, evaluator: impl NliModel + 'static) -> Self {
        Self {
            name: name.into(),
            evaluator: Arc::new(evaluator),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn evaluate(
        &self,
        coi: &Channel,
        plan: &ChannelPlan,
        fiber: &FiberParams,
    ) -> Result<NliResult> {
        self.evaluator.evaluate(coi, plan, fiber)
    }

    pub fn evaluate_plan(&self, plan: &ChannelPlan, fiber: &FiberParams) -> Result<Vec<NliResult>> {
        self.evaluator.evaluate_plan(plan, fiber)
    }
}

impl fmt::Debug for NliModelHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NliModelHandle")
            .field("name", &self.name)
            .finish()
    }
}

/// Closed-form SPM/XPM coefficients.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedFormModel;

impl NliModel for ClosedFormModel {
    fn evaluate(
        &self,
        coi: &Channel,
        plan: &ChannelPlan,
        fiber: &FiberParams,
    ) -> Result<NliResult> {
        closed_form::eta_total_closed(coi, plan, fiber)
    }
}

/// Numerical integration of the ISRS GN integrals.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntegralModel {
    pub quadrature: QuadratureSpec,
}

impl NliModel for IntegralModel {
    fn evaluate(
        &self,
        coi: &Channel,
        plan: &ChannelPlan,
        fiber: &FiberParams,
    ) -> Result<NliResult> {
        integral::eta_total_integral(coi, plan, fiber, &self.quadrature)
    }

    fn evaluate_plan(&self, plan: &ChannelPlan, fiber: &FiberParams) -> Result<Vec<NliResult>> {
        integral::eta_plan_integral(plan, fiber, &self.quadrature)
    }
}

/// Name-to-model lookup. Fill it once, then share it read-only.
#[derive(Debug, Clone, Default)]
pub struct ModelRegistry {
    models: BTreeMap<String, NliModelHandle>,
}

impl ModelRegistry {
    /// Empty registry.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry holding `closed_form` and `integral` (with the given quadrature).
    pub fn with_defaults(quadrature: QuadratureSpec) -> Self {
        let mut r = Self::empty();
        r.register(NliModelHandle::new("closed_form", ClosedFormModel))
            .expect("fresh registry");
        r.register(NliModelHandle::new(
            "integral",
            IntegralModel { quadrature },
        ))
        .expect("fresh registry");
        r
    }

    pub fn register(&mut self, handle: NliModelHandle) -> Result<()> {
        if self.models.contains_key(handle.name()) {
            return Err(QotError::DuplicateModel(handle.name().to_owned()));
        }
        self.models.insert(handle.name().to_owned(), handle);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Result<NliModelHandle> {
        self.models
            .get(name)
            .cloned()
            .ok_or_else(|| QotError::UnknownModel(name.to_owned()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }
}
