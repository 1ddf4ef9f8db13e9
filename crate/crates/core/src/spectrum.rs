//! WDM spectral occupancy.
//!
//! Center frequencies are stored relative to the middle of the occupied band
//! (lowest lower edge to highest upper edge); the absolute frequency of that
//! middle point is carried alongside for photon-energy calculations.

use crate::error::{QotError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    /// Position of the channel in its plan, ascending in frequency.
    pub index: usize,
    /// Center frequency relative to the band center, Hz.
    pub center_freq: f64,
    /// Occupied bandwidth (symbol rate for Nyquist shaping), Hz.
    pub bandwidth: f64,
    /// Launch power, W.
    pub launch_power: f64,
}

/// A channel as specified by a user, with an absolute center frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub abs_freq: f64,
    pub bandwidth: f64,
    pub launch_power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPlan {
    channels: Vec<Channel>,
    total_power: f64,
    total_bandwidth: f64,
    absolute_ref_freq: f64,
}

// Touching channels (bandwidth == spacing) must not count as overlapping.
const OVERLAP_SLACK: f64 = 1e-9;

impl ChannelPlan {
    /// Builds a plan from absolute channel frequencies. Channels are sorted
    /// by frequency and re-indexed.
    pub fn from_specs(specs: &[ChannelSpec]) -> Result<Self> {
        if specs.is_empty() {
            return Err(QotError::invalid(
                "channels",
                "a plan needs at least one channel",
            ));
        }
        for s in specs {
            if !(s.abs_freq > 0.0 && s.abs_freq.is_finite()) {
                return Err(QotError::invalid("abs_freq", format!("{} Hz", s.abs_freq)));
            }
        }
        let lo = specs
            .iter()
            .map(|s| s.abs_freq - 0.5 * s.bandwidth)
            .fold(f64::INFINITY, f64::min);
        let hi = specs
            .iter()
            .map(|s| s.abs_freq + 0.5 * s.bandwidth)
            .fold(f64::NEG_INFINITY, f64::max);
        let reference = 0.5 * (lo + hi);
        let channels = specs
            .iter()
            .map(|s| Channel {
                index: 0,
                center_freq: s.abs_freq - reference,
                bandwidth: s.bandwidth,
                launch_power: s.launch_power,
            })
            .collect();
        Self::new(channels, reference)
    }

    /// Builds a plan from channels whose frequencies are already relative to
    /// `absolute_ref_freq`. Indices are reassigned in ascending frequency order.
    pub fn new(mut channels: Vec<Channel>, absolute_ref_freq: f64) -> Result<Self> {
        if channels.is_empty() {
            return Err(QotError::invalid(
                "channels",
                "a plan needs at least one channel",
            ));
        }
        for ch in &channels {
            if !(ch.bandwidth > 0.0 && ch.bandwidth.is_finite()) {
                return Err(QotError::invalid(
                    "bandwidth",
                    format!("{} Hz", ch.bandwidth),
                ));
            }
            if !(ch.launch_power >= 0.0 && ch.launch_power.is_finite()) {
                return Err(QotError::invalid(
                    "launch_power",
                    format!("{} W", ch.launch_power),
                ));
            }
            if !ch.center_freq.is_finite() {
                return Err(QotError::invalid("center_freq", "must be finite"));
            }
        }
        channels.sort_by(|a, b| a.center_freq.total_cmp(&b.center_freq));
        for (i, ch) in channels.iter_mut().enumerate() {
            ch.index = i;
        }
        for pair in channels.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let needed = 0.5 * (a.bandwidth + b.bandwidth);
            if b.center_freq - a.center_freq < needed * (1.0 - OVERLAP_SLACK) {
                return Err(QotError::ChannelOverlap {
                    first: a.index,
                    second: b.index,
                });
            }
        }
        let total_power: f64 = channels.iter().map(|c| c.launch_power).sum();
        if !(total_power > 0.0) {
            return Err(QotError::invalid(
                "launch_power",
                "total launch power must be positive",
            ));
        }
        let first = channels[0];
        let last = channels[channels.len() - 1];
        let total_bandwidth =
            (last.center_freq + 0.5 * last.bandwidth) - (first.center_freq - 0.5 * first.bandwidth);
        Ok(Self {
            channels,
            total_power,
            total_bandwidth,
            absolute_ref_freq,
        })
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn channel(&self, index: usize) -> Result<&Channel> {
        self.channels
            .get(index)
            .ok_or(QotError::UnknownChannel(index))
    }

    /// Sum of launch powers, W.
    pub fn total_power(&self) -> f64 {
        self.total_power
    }

    /// Lowest lower edge to highest upper edge, Hz.
    pub fn total_bandwidth(&self) -> f64 {
        self.total_bandwidth
    }

    /// Absolute optical frequency that relative frequency 0 maps to, Hz.
    pub fn absolute_ref_freq(&self) -> f64 {
        self.absolute_ref_freq
    }

    pub fn absolute_freq(&self, ch: &Channel) -> f64 {
        self.absolute_ref_freq + ch.center_freq
    }

    /// Lower and upper edge of the occupied band, relative Hz.
    pub fn band_edges(&self) -> (f64, f64) {
        (-0.5 * self.total_bandwidth, 0.5 * self.total_bandwidth)
    }

    pub fn launch_powers(&self) -> Vec<f64> {
        self.channels.iter().map(|c| c.launch_power).collect()
    }

    /// Same plan with new per-channel launch powers; all invariants re-checked.
    pub fn with_launch_powers(&self, powers: &[f64]) -> Result<Self> {
        if powers.len() != self.channels.len() {
            return Err(QotError::ShapeMismatch(format!(
                "{} powers for {} channels",
                powers.len(),
                self.channels.len()
            )));
        }
        let channels = self
            .channels
            .iter()
            .zip(powers)
            .map(|(c, &p)| Channel {
                launch_power: p,
                ..*c
            })
            .collect();
        Self::new(channels, self.absolute_ref_freq)
    }

    /// Ensures `ch` is the channel stored at its index.
    pub(crate) fn check_member(&self, ch: &Channel) -> Result<()> {
        match self.channels.get(ch.index) {
            Some(c) if c == ch => Ok(()),
            _ => Err(QotError::UnknownChannel(ch.index)),
        }
    }
}
