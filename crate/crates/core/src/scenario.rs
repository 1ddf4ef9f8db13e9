//! Scenario configuration, deterministic scenario generation, link runs with
//! CSV output, and model-to-model GSNR comparison.
//!
//! Configurations are TOML documents; unknown keys are rejected. See the
//! crate README for the full schema.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};
use crate::fiber::FiberParams;
use crate::integral::QuadratureSpec;
use crate::link::{
    optimize_launch_power_partial, simulate_link, LinkConfig, LinkReport, SpanConfig,
};
use crate::model::{ModelRegistry, ValidityWarning};
use crate::spectrum::{ChannelPlan, ChannelSpec};
use crate::units::{dbm_to_watt, watt_to_dbm, GHZ, THZ};

/// Header of every per-model GSNR table.
pub const CSV_HEADER: [&str; 7] = [
    "span",
    "channel",
    "freq_thz",
    "signal_dbm",
    "ase_dbm",
    "nli_dbm",
    "gsnr_db",
];

/// Header of the comparison table.
pub const COMPARISON_HEADER: [&str; 8] = [
    "reference",
    "model",
    "span",
    "channel",
    "freq_thz",
    "gsnr_reference_db",
    "gsnr_db",
    "abs_err_db",
];

/// The three built-in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// 48 channels at 100 GHz from 191.4 to 196.1 THz.
    CBand48,
    /// The C band plus 48 L-band channels from 186.1 to 190.8 THz.
    ClBand96,
    /// 32 random C-band slots and 28 random L-band slots.
    Random60,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 3] = [
        ScenarioKind::CBand48,
        ScenarioKind::ClBand96,
        ScenarioKind::Random60,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::CBand48 => "c_band_48",
            ScenarioKind::ClBand96 => "cl_band_96",
            ScenarioKind::Random60 => "random_60",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = QotError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| QotError::Config(format!("unknown scenario kind `{s}`")))
    }
}

/// Launch power of a band: fixed, or left to the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LaunchRepr", into = "LaunchRepr")]
pub enum Launch {
    Optimize,
    Dbm(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LaunchRepr {
    Dbm(f64),
    Token(String),
}

impl TryFrom<LaunchRepr> for Launch {
    type Error = String;

    fn try_from(r: LaunchRepr) -> std::result::Result<Self, String> {
        match r {
            LaunchRepr::Dbm(v) if v.is_finite() => Ok(Launch::Dbm(v)),
            LaunchRepr::Dbm(v) => Err(format!("launch power {v} dBm is not finite")),
            LaunchRepr::Token(t) if t == "optimize" => Ok(Launch::Optimize),
            LaunchRepr::Token(t) => Err(format!(
                "launch must be a dBm value or \"optimize\", got \"{t}\""
            )),
        }
    }
}

impl From<Launch> for LaunchRepr {
    fn from(l: Launch) -> Self {
        match l {
            Launch::Optimize => LaunchRepr::Token("optimize".into()),
            Launch::Dbm(v) => LaunchRepr::Dbm(v),
        }
    }
}

/// A regular grid of channel slots sharing one launch power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSpec {
    pub name: String,
    pub start_thz: f64,
    pub stop_thz: f64,
    #[serde(default = "default_spacing")]
    pub spacing_ghz: f64,
    #[serde(default = "default_symbol_rate")]
    pub symbol_rate_gbd: f64,
    #[serde(default = "default_launch")]
    pub launch: Launch,
    /// Keep only this many slots, chosen by the seeded shuffle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub select: Option<usize>,
}

fn default_spacing() -> f64 {
    100.0
}

fn default_symbol_rate() -> f64 {
    64.0
}

fn default_launch() -> Launch {
    Launch::Optimize
}

impl BandSpec {
    fn slot_count(&self) -> Result<usize> {
        let bad = |reason: String| QotError::Config(format!("band `{}`: {reason}", self.name));
        if !(self.spacing_ghz > 0.0) || !(self.symbol_rate_gbd > 0.0) {
            return Err(bad("spacing and symbol rate must be positive".into()));
        }
        if !(self.stop_thz >= self.start_thz)
            || !self.start_thz.is_finite()
            || !self.stop_thz.is_finite()
        {
            return Err(bad("stop_thz must not be below start_thz".into()));
        }
        let steps = (self.stop_thz - self.start_thz) * THZ / (self.spacing_ghz * GHZ);
        if (steps - steps.round()).abs() > 1e-6 {
            return Err(bad(
                "start-to-stop width is not a multiple of the spacing".into()
            ));
        }
        Ok(steps.round() as usize + 1)
    }

    /// Absolute slot center frequencies, Hz.
    pub fn slots(&self) -> Result<Vec<f64>> {
        let n = self.slot_count()?;
        Ok((0..n)
            .map(|i| self.start_thz * THZ + i as f64 * self.spacing_ghz * GHZ)
            .collect())
    }

    /// `[start − spacing/2, stop + spacing/2]` in Hz.
    pub fn range_hz(&self) -> (f64, f64) {
        let half = 0.5 * self.spacing_ghz * GHZ;
        (self.start_thz * THZ - half, self.stop_thz * THZ + half)
    }
}

/// Span chain: `spans` identical spans, a WSS after each listed span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSpec {
    pub spans: usize,
    /// 1-based span numbers followed by a WSS.
    pub wss_after: Vec<usize>,
    pub gain_db: f64,
    pub nf_db: f64,
    pub lumped_loss_db: f64,
    pub wss_loss_db: f64,
    pub coherence_epsilon: f64,
}

impl Default for LinkSpec {
    fn default() -> Self {
        Self {
            spans: 10,
            wss_after: vec![5],
            gain_db: 20.5,
            nf_db: 4.5,
            lumped_loss_db: 0.5,
            wss_loss_db: 0.0,
            coherence_epsilon: 0.0,
        }
    }
}

/// Fiber parameters in engineering units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiberSpec {
    pub length_km: f64,
    pub alpha_db_per_km: f64,
    pub alpha_bar_db_per_km: f64,
    pub beta2_ps2_per_km: f64,
    pub beta3_ps3_per_km: f64,
    pub gamma_per_w_km: f64,
    pub cr_per_w_km_thz: f64,
}

impl Default for FiberSpec {
    fn default() -> Self {
        Self {
            length_km: 100.0,
            alpha_db_per_km: 0.2,
            alpha_bar_db_per_km: 0.2,
            beta2_ps2_per_km: -21.7,
            beta3_ps3_per_km: 0.14,
            gamma_per_w_km: 1.3,
            cr_per_w_km_thz: 0.028,
        }
    }
}

impl FiberSpec {
    pub fn to_params(&self) -> Result<FiberParams> {
        FiberParams::builder()
            .length_km(self.length_km)
            .alpha_db_per_km(self.alpha_db_per_km)
            .alpha_bar_db_per_km(self.alpha_bar_db_per_km)
            .beta2_ps2_per_km(self.beta2_ps2_per_km)
            .beta3_ps3_per_km(self.beta3_ps3_per_km)
            .gamma_per_w_km(self.gamma_per_w_km)
            .cr_per_w_km_thz(self.cr_per_w_km_thz)
            .build()
    }
}

/// A complete, self-contained experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Models to run; comparisons are made against the first.
    #[serde(default = "default_models")]
    pub models: Vec<String>,
    /// Model used by the launch-power optimizer.
    #[serde(default = "default_optimize_model")]
    pub optimize_model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub bands: Vec<BandSpec>,
    #[serde(default)]
    pub link: LinkSpec,
    #[serde(default)]
    pub fiber: FiberSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

fn default_models() -> Vec<String> {
    vec!["closed_form".into(), "integral".into()]
}

fn default_optimize_model() -> String {
    "closed_form".into()
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text)
            .map_err(|e| QotError::Config(e.to_string().trim_end().replace('\n', " ")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| QotError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| QotError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks everything that can be checked without running a model.
    pub fn validate(&self, registry: &ModelRegistry) -> Result<()> {
        if self.bands.is_empty() {
            return Err(QotError::Config(
                "at least one [[bands]] entry required".into(),
            ));
        }
        if self.models.is_empty() {
            return Err(QotError::Config(
                "`models` must name at least one model".into(),
            ));
        }
        for (i, m) in self.models.iter().enumerate() {
            registry.lookup(m)?;
            if self.models[..i].contains(m) {
                return Err(QotError::Config(format!("model `{m}` listed twice")));
            }
        }
        if self.bands.iter().any(|b| b.launch == Launch::Optimize) {
            registry.lookup(&self.optimize_model)?;
        }
        self.quadrature.validate()?;
        self.fiber.to_params()?;
        self.link_config()?;
        Ok(())
    }

    pub fn fiber_params(&self) -> Result<FiberParams> {
        self.fiber.to_params()
    }

    pub fn span_config(&self) -> Result<SpanConfig> {
        Ok(SpanConfig {
            fiber: self.fiber_params()?,
            amp_gain_db: self.link.gain_db,
            amp_nf_db: self.link.nf_db,
            lumped_loss_db: self.link.lumped_loss_db,
            wss: false,
            wss_loss_db: self.link.wss_loss_db,
        })
    }

    pub fn link_config(&self) -> Result<LinkConfig> {
        LinkConfig::uniform(
            self.span_config()?,
            self.link.spans,
            &self.link.wss_after,
            self.link.coherence_epsilon,
        )
    }

    /// Selected slots of every band (absolute Hz, ascending), in band order.
    pub fn band_slots(&self) -> Result<Vec<Vec<f64>>> {
        let mut rng = SplitMix64::new(self.seed);
        self.bands
            .iter()
            .map(|b| {
                let slots = b.slots()?;
                match b.select {
                    None => Ok(slots),
                    Some(k) if k == 0 || k > slots.len() => Err(QotError::Config(format!(
                        "band `{}`: select = {k} with {} slots",
                        b.name,
                        slots.len()
                    ))),
                    Some(k) => {
                        let mut picked = rng.sample_indices(slots.len(), k);
                        picked.sort_unstable();
                        Ok(picked.into_iter().map(|i| slots[i]).collect())
                    }
                }
            })
            .collect()
    }

    /// Channel plan with every channel of band `b` at `band_dbm[b]`.
    pub fn build_plan(&self, band_dbm: &[f64]) -> Result<ChannelPlan> {
        if band_dbm.len() != self.bands.len() {
            return Err(QotError::ShapeMismatch(format!(
                "{} band powers for {} bands",
                band_dbm.len(),
                self.bands.len()
            )));
        }
        let mut specs = Vec::new();
        for ((band, slots), &dbm) in self.bands.iter().zip(self.band_slots()?).zip(band_dbm) {
            specs.extend(slots.into_iter().map(|f| ChannelSpec {
                abs_freq: f,
                bandwidth: band.symbol_rate_gbd * GHZ,
                launch_power: dbm_to_watt(dbm),
            }));
        }
        ChannelPlan::from_specs(&specs)
    }

    /// Per-band launch powers (dBm), running the optimizer for bands set to `optimize`.
    pub fn resolve_launch(&self, registry: &ModelRegistry) -> Result<Vec<f64>> {
        let start: Vec<f64> = self
            .bands
            .iter()
            .map(|b| match b.launch {
                Launch::Dbm(v) => v,
                Launch::Optimize => 0.0,
            })
            .collect();
        let free: Vec<bool> = self
            .bands
            .iter()
            .map(|b| b.launch == Launch::Optimize)
            .collect();
        if !free.contains(&true) {
            return Ok(start);
        }
        let plan = self.build_plan(&start)?;
        let ranges: Vec<(f64, f64)> = self.bands.iter().map(BandSpec::range_hz).collect();
        let model = registry.lookup(&self.optimize_model)?;
        optimize_launch_power_partial(&plan, &self.span_config()?, &model, &ranges, &start, &free)
    }
}

/// The built-in experiment `kind`. Only `random_60` depends on `seed`.
pub fn generate_scenario(kind: ScenarioKind, seed: u64) -> ScenarioConfig {
    let band = |name: &str, start: f64, stop: f64, select: Option<usize>| BandSpec {
        name: name.into(),
        start_thz: start,
        stop_thz: stop,
        spacing_ghz: default_spacing(),
        symbol_rate_gbd: default_symbol_rate(),
        launch: Launch::Optimize,
        select,
    };
    let bands = match kind {
        ScenarioKind::CBand48 => vec![band("C", 191.4, 196.1, None)],
        ScenarioKind::ClBand96 => {
            vec![band("C", 191.4, 196.1, None), band("L", 186.1, 190.8, None)]
        }
        ScenarioKind::Random60 => vec![
            band("C", 191.4, 196.1, Some(32)),
            band("L", 186.1, 190.8, Some(28)),
        ],
    };
    ScenarioConfig {
        name: kind.as_str().into(),
        seed,
        models: default_models(),
        optimize_model: default_optimize_model(),
        output_dir: None,
        bands,
        link: LinkSpec::default(),
        fiber: FiberSpec::default(),
        quadrature: QuadratureSpec::default(),
    }
}

/// SplitMix64: `state += 0x9E3779B97F4A7C15`, then the xor-shift-multiply
/// finalizer with `0xBF58476D1CE4E5B9`, `0x94D049BB133111EB` and shifts
/// 30, 27, 31.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// First `k` entries of a Fisher–Yates shuffle of `0..n` (swap `i` with
    /// `next % (i + 1)` for `i = n−1 … 1`).
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            idx.swap(i, j);
        }
        idx.truncate(k);
        idx
    }
}

/// GSNR difference statistics between two runs of the same scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMetrics {
    pub mae_db: f64,
    pub max_ae_db: f64,
    /// `|gsnr_a − gsnr_b|` indexed `[span][channel]`.
    pub per_channel_abs_err: Vec<Vec<f64>>,
    /// Channel and 1-based span of the first maximum in span-major order.
    pub worst_channel_index: usize,
    pub worst_span_index: usize,
}

impl fmt::Display for ComparisonMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "mae_db={} max_ae_db={} worst_span={} worst_channel={}",
            fmt_sig6(self.mae_db),
            fmt_sig6(self.max_ae_db),
            self.worst_span_index,
            self.worst_channel_index
        )
    }
}

/// GSNR values indexed `[span][channel]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GsnrTable {
    pub gsnr_db: Vec<Vec<f64>>,
}

impl GsnrTable {
    pub fn from_report(report: &LinkReport) -> Self {
        Self {
            gsnr_db: report
                .per_span
                .iter()
                .map(|s| s.channels.iter().map(|c| c.gsnr_db).collect())
                .collect(),
        }
    }

    /// Reads a table written by [`write_report_csv`].
    pub fn read_csv(path: &Path) -> Result<Self> {
        let io = |e: csv::Error| QotError::Io(format!("{}: {e}", path.display()));
        let mut rdr = csv::Reader::from_path(path).map_err(io)?;
        let header = rdr.headers().map_err(io)?.clone();
        if header.iter().ne(CSV_HEADER) {
            return Err(QotError::Config(format!(
                "{}: unexpected header",
                path.display()
            )));
        }
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(io)?;
            let field = |i: usize| -> Result<&str> {
                rec.get(i)
                    .ok_or_else(|| QotError::Config(format!("{}: short row", path.display())))
            };
            let parse_err =
                |what: &str| QotError::Config(format!("{}: bad {what} field", path.display()));
            let span: usize = field(0)?.parse().map_err(|_| parse_err("span"))?;
            let channel: usize = field(1)?.parse().map_err(|_| parse_err("channel"))?;
            let gsnr: f64 = field(6)?.parse().map_err(|_| parse_err("gsnr_db"))?;
            if span == rows.len() + 1 {
                rows.push(Vec::new());
            }
            if span != rows.len() || channel != rows[span - 1].len() {
                return Err(QotError::Config(format!(
                    "{}: rows must be span-major with consecutive indices",
                    path.display()
                )));
            }
            rows[span - 1].push(gsnr);
        }
        Ok(Self { gsnr_db: rows })
    }
}

/// MAE and MaxAE of the GSNR over all spans and channels.
pub fn compare(a: &LinkReport, b: &LinkReport) -> Result<ComparisonMetrics> {
    compare_tables(&GsnrTable::from_report(a), &GsnrTable::from_report(b))
}

pub fn compare_tables(a: &GsnrTable, b: &GsnrTable) -> Result<ComparisonMetrics> {
    let shape = |t: &GsnrTable| t.gsnr_db.iter().map(Vec::len).collect::<Vec<_>>();
    if shape(a) != shape(b) || a.gsnr_db.is_empty() || a.gsnr_db[0].is_empty() {
        return Err(QotError::ShapeMismatch(format!(
            "{} vs {} spans, or channel counts differ",
            a.gsnr_db.len(),
            b.gsnr_db.len()
        )));
    }
    let errs: Vec<Vec<f64>> = a
        .gsnr_db
        .iter()
        .zip(&b.gsnr_db)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()).collect())
        .collect();
    let (mut sum, mut count, mut max, mut worst) = (0.0, 0usize, -1.0, (0, 0));
    for (s, row) in errs.iter().enumerate() {
        for (c, &e) in row.iter().enumerate() {
            sum += e;
            count += 1;
            if e > max {
                max = e;
                worst = (s, c);
            }
        }
    }
    Ok(ComparisonMetrics {
        mae_db: sum / count as f64,
        max_ae_db: max,
        per_channel_abs_err: errs,
        worst_channel_index: worst.1,
        worst_span_index: worst.0 + 1,
    })
}

/// Six significant digits in positional notation, e.g. `191.400`,
/// `-3.50000`, `0.0123457`. Zero prints as `0.00000`.
pub fn fmt_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let decimals = |v: f64| (5 - v.abs().log10().floor() as i64).clamp(0, 17) as usize;
    let d = decimals(x);
    let s = format!("{x:.d$}");
    // rounding may carry into a new leading digit (9.999995 → 10.00000)
    let rounded: f64 = s.parse().expect("formatted float parses");
    let d2 = decimals(rounded);
    if d2 < d {
        format!("{x:.d2$}")
    } else {
        s
    }
}

/// Writes one GSNR table, span-major.
pub fn write_report_csv(path: &Path, report: &LinkReport, plan: &ChannelPlan) -> Result<()> {
    let mut w = csv_writer(path)?;
    write_row(&mut w, path, CSV_HEADER.iter().map(|s| s.to_string()))?;
    for snap in &report.per_span {
        for (rec, ch) in snap.channels.iter().zip(plan.channels()) {
            write_row(
                &mut w,
                path,
                [
                    snap.span.to_string(),
                    rec.channel_index.to_string(),
                    fmt_sig6(plan.absolute_freq(ch) / THZ),
                    fmt_sig6(watt_to_dbm(rec.signal_power)),
                    fmt_sig6(watt_to_dbm(rec.ase_power)),
                    fmt_sig6(watt_to_dbm(rec.nli_power)),
                    fmt_sig6(rec.gsnr_db),
                ],
            )?;
        }
    }
    flush(w, path)
}

fn write_comparison_csv(
    path: &Path,
    runs: &[(String, LinkReport)],
    plan: &ChannelPlan,
) -> Result<()> {
    let mut w = csv_writer(path)?;
    write_row(
        &mut w,
        path,
        COMPARISON_HEADER.iter().map(|s| s.to_string()),
    )?;
    let (ref_name, reference) = &runs[0];
    for (name, report) in &runs[1..] {
        for (sr, so) in reference.per_span.iter().zip(&report.per_span) {
            for ((a, b), ch) in sr.channels.iter().zip(&so.channels).zip(plan.channels()) {
                write_row(
                    &mut w,
                    path,
                    [
                        ref_name.clone(),
                        name.clone(),
                        sr.span.to_string(),
                        a.channel_index.to_string(),
                        fmt_sig6(plan.absolute_freq(ch) / THZ),
                        fmt_sig6(a.gsnr_db),
                        fmt_sig6(b.gsnr_db),
                        fmt_sig6((a.gsnr_db - b.gsnr_db).abs()),
                    ],
                )?;
            }
        }
    }
    flush(w, path)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| QotError::Io(format!("{}: {e}", path.display())))
}

fn write_row<I: IntoIterator<Item = String>>(
    w: &mut csv::Writer<fs::File>,
    path: &Path,
    row: I,
) -> Result<()> {
    w.write_record(row)
        .map_err(|e| QotError::Io(format!("{}: {e}", path.display())))
}

fn flush(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush()
        .map_err(|e| QotError::Io(format!("{}: {e}", path.display())))
}

/// Everything a scenario run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub launch_dbm: Vec<f64>,
    pub plan: ChannelPlan,
    /// `(model name, report)` in the configured order.
    pub reports: Vec<(String, LinkReport)>,
    /// Each later model against the first.
    pub metrics: Vec<(String, ComparisonMetrics)>,
    /// Distinct warnings over all models.
    pub warnings: Vec<ValidityWarning>,
    pub files: Vec<PathBuf>,
}

/// Resolves launch powers, runs every model over the link and, when
/// `out_dir` is given, writes `gsnr_<model>.csv` per model plus
/// `comparison.csv` when more than one model ran.
pub fn run(
    config: &ScenarioConfig,
    registry: &ModelRegistry,
    out_dir: Option<&Path>,
) -> Result<RunOutput> {
    config.validate(registry)?;
    let launch_dbm = config.resolve_launch(registry)?;
    let plan = config.build_plan(&launch_dbm)?;
    let link = config.link_config()?;

    let mut reports = Vec::with_capacity(config.models.len());
    let mut warnings: Vec<ValidityWarning> = Vec::new();
    for name in &config.models {
        let report = simulate_link(&link, &plan, &registry.lookup(name)?)?;
        for w in &report.warnings {
            if !warnings.contains(w) {
                warnings.push(w.clone());
            }
        }
        reports.push((name.clone(), report));
    }
    let metrics = reports[1..]
        .iter()
        .map(|(name, r)| Ok((name.clone(), compare(&reports[0].1, r)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut files = Vec::new();
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| QotError::Io(format!("{}: {e}", dir.display())))?;
        for (name, report) in &reports {
            let path = dir.join(format!("gsnr_{name}.csv"));
            write_report_csv(&path, report, &plan)?;
            files.push(path);
        }
        if reports.len() > 1 {
            let path = dir.join("comparison.csv");
            write_comparison_csv(&path, &reports, &plan)?;
            files.push(path);
        }
    }
    Ok(RunOutput {
        launch_dbm,
        plan,
        reports,
        metrics,
        warnings,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_sequence() {
        // published first outputs for seed 0
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(r.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut r = SplitMix64::new(42);
        let mut all = r.sample_indices(48, 48);
        all.sort_unstable();
        assert_eq!(all, (0..48).collect::<Vec<_>>());
    }

    #[test]
    fn sig6_formatting() {
        let cases = [
            (191.4, "191.400"),
            (-3.5, "-3.50000"),
            (0.0, "0.00000"),
            (0.0123456789, "0.0123457"),
            (9.999995, "10.0000"),
            (-0.0999999999, "-0.100000"),
            (123456.7, "123457"),
            (1e7, "10000000"),
            (f64::NEG_INFINITY, "-inf"),
            (23.97940008672, "23.9794"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_sig6(x), s, "{x}");
        }
    }

    #[test]
    fn scenario_kinds_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.as_str().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!("d_band".parse::<ScenarioKind>().is_err());
    }

    #[test]
    fn toml_round_trip_and_strictness() {
        for k in ScenarioKind::ALL {
            let cfg = generate_scenario(k, 7);
            let text = cfg.to_toml().unwrap();
            assert_eq!(ScenarioConfig::from_toml(&text).unwrap(), cfg);
        }
        let typo = "name = \"x\"\n[[bands]]\nname = \"C\"\nstart_thz = 191.4\nstop_thz = 191.6\nspacng_ghz = 100\n";
        assert!(matches!(
            ScenarioConfig::from_toml(typo),
            Err(QotError::Config(_))
        ));
        let bad_launch = "name = \"x\"\n[[bands]]\nname = \"C\"\nstart_thz = 191.4\nstop_thz = 191.6\nlaunch = \"max\"\n";
        assert!(ScenarioConfig::from_toml(bad_launch).is_err());
        let ok = "name = \"x\"\n[[bands]]\nname = \"C\"\nstart_thz = 191.4\nstop_thz = 191.6\nlaunch = -1.5\n";
        let cfg = ScenarioConfig::from_toml(ok).unwrap();
        assert_eq!(cfg.bands[0].launch, Launch::Dbm(-1.5));
        assert_eq!(cfg.link, LinkSpec::default());
    }

    #[test]
    fn plans_match_the_experiments() {
        let c = generate_scenario(ScenarioKind::CBand48, 0)
            .build_plan(&[0.0])
            .unwrap();
        assert_eq!(c.len(), 48);
        let f = |p: &ChannelPlan, i: usize| p.absolute_freq(&p.channels()[i]);
        assert!((f(&c, 0) - 191.4e12).abs() < 1.0);
        assert!((f(&c, 47) - 196.1e12).abs() < 1.0);

        let cl = generate_scenario(ScenarioKind::ClBand96, 0)
            .build_plan(&[0.0, 0.0])
            .unwrap();
        assert_eq!(cl.len(), 96);
        assert!(cl
            .channels()
            .iter()
            .all(|ch| !(190.85e12..191.35e12).contains(&cl.absolute_freq(ch))));

        let r = |seed| {
            generate_scenario(ScenarioKind::Random60, seed)
                .build_plan(&[0.0, 0.0])
                .unwrap()
        };
        let (a, b, d) = (r(1), r(1), r(2));
        assert_eq!(a, b);
        assert_ne!(a, d);
        for p in [&a, &d] {
            let in_c = p
                .channels()
                .iter()
                .filter(|ch| p.absolute_freq(ch) > 191e12)
                .count();
            assert_eq!((in_c, p.len() - in_c), (32, 28));
        }
    }

    #[test]
    fn comparison_arithmetic() {
        let t = |v: [[f64; 2]; 2]| GsnrTable {
            gsnr_db: v.iter().map(|r| r.to_vec()).collect(),
        };
        let a = t([[10.0, 11.0], [12.0, 13.0]]);
        let m = compare_tables(&a, &a).unwrap();
        assert_eq!((m.mae_db, m.max_ae_db), (0.0, 0.0));

        let shifted = t([[10.5, 11.5], [12.5, 13.5]]);
        let m = compare_tables(&a, &shifted).unwrap();
        assert_eq!((m.mae_db, m.max_ae_db), (0.5, 0.5));

        let b = t([[10.1, 11.3], [12.0, 13.2]]);
        let m = compare_tables(&a, &b).unwrap();
        assert!((m.mae_db - 0.15).abs() < 1e-12);
        assert!((m.max_ae_db - 0.3).abs() < 1e-12);
        assert_eq!((m.worst_span_index, m.worst_channel_index), (1, 1));
        assert_eq!(compare_tables(&b, &a).unwrap().mae_db, m.mae_db);

        let short = GsnrTable {
            gsnr_db: vec![vec![1.0, 2.0]],
        };
        assert!(matches!(
            compare_tables(&a, &short),
            Err(QotError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn unknown_model_rejected() {
        let mut cfg = generate_scenario(ScenarioKind::CBand48, 0);
        cfg.models = vec!["llm_gn".into()];
        let reg = ModelRegistry::with_defaults(QuadratureSpec::default());
        assert_eq!(
            cfg.validate(&reg),
            Err(QotError::UnknownModel("llm_gn".into()))
        );
    }
}
