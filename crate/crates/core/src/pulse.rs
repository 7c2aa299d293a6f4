//! Laser pulse descriptions.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Envelopes are truncated at this many standard deviations either side.
pub const ENVELOPE_HALF_WIDTHS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseMode {
    Impulsive,
    Finite,
}

/// One interaction with the sample.
///
/// `area` is the time integral of the field envelope (dipole units absorbed,
/// hbar = 1). `wavevector` names the `k_j` this pulse carries; sign patterns
/// are indexed by it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseEvent {
    pub arrival: f64,
    pub mode: PulseMode,
    pub area: f64,
    /// Gaussian standard deviation; ignored for impulsive pulses.
    #[serde(default)]
    pub width: f64,
    #[serde(default)]
    pub carrier: f64,
    pub wavevector: usize,
}

impl PulseEvent {
    pub fn impulsive(arrival: f64, area: f64, wavevector: usize) -> Self {
        Self {
            arrival,
            mode: PulseMode::Impulsive,
            area,
            width: 0.0,
            carrier: 0.0,
            wavevector,
        }
    }

    pub fn gaussian(arrival: f64, area: f64, width: f64, carrier: f64, wavevector: usize) -> Self {
        Self {
            arrival,
            mode: PulseMode::Finite,
            area,
            width,
            carrier,
            wavevector,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.arrival.is_finite() || !self.area.is_finite() || !self.carrier.is_finite() {
            return Err(Error::InvalidParameter {
                name: "pulse",
                reason: "arrival, area and carrier must be finite".into(),
            });
        }
        if self.mode == PulseMode::Finite && !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::InvalidParameter {
                name: "pulse.width",
                reason: format!("must be positive for finite pulses, got {}", self.width),
            });
        }
        Ok(())
    }

    /// Normalized Gaussian envelope times the area, `A g(t)`.
    pub fn envelope(&self, t: f64) -> f64 {
        let (start, end) = self.support();
        if t < start || t > end {
            return 0.0;
        }
        let x = (t - self.arrival) / self.width;
        self.area / (self.width * (2.0 * PI).sqrt()) * (-0.5 * x * x).exp()
    }

    /// Real field `A g(t) cos(w (t - arrival) - phase)`.
    pub fn real_field(&self, t: f64, phase: f64) -> f64 {
        self.envelope(t) * (self.carrier * (t - self.arrival) - phase).cos()
    }

    /// Analytic-signal component for a `+k` (`sign = 1`) or `-k` (`sign = -1`)
    /// slot: `A g(t) exp(-i sign w (t - arrival))`.
    pub fn analytic_field(&self, t: f64, sign: i8) -> C64 {
        let phase = -(sign as f64) * self.carrier * (t - self.arrival);
        C64::from_polar(self.envelope(t), phase)
    }

    /// Interval outside which the envelope is taken as zero.
    pub fn support(&self) -> (f64, f64) {
        match self.mode {
            PulseMode::Impulsive => (self.arrival, self.arrival),
            PulseMode::Finite => (
                self.arrival - ENVELOPE_HALF_WIDTHS * self.width,
                self.arrival + ENVELOPE_HALF_WIDTHS * self.width,
            ),
        }
    }
}

/// Checks that arrival times are strictly increasing.
pub fn check_ordered(pulses: &[PulseEvent]) -> Result<()> {
    for p in pulses {
        p.validate()?;
    }
    if pulses.windows(2).any(|w| w[1].arrival <= w[0].arrival) {
        return Err(Error::UnorderedPulses);
    }
    Ok(())
}
