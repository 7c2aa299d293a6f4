//! Polarization over grids of inter-pulse delays.
//!
//! Pulse 1 arrives at time zero, pulse 2 after `t1`, pulse 3 after a further
//! `t2`, and detection follows `t3` later. Lower orders keep the same
//! timeline and drop pulses: order 2 uses pulses 1 and 3, order 1 pulse 3
//! alone.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::DephasingModel;
use crate::error::{Error, Result};
use crate::model::ExcitonModel;
use crate::operator::DensityMatrix;
use crate::par::{self, Execution};
use crate::pulse::PulseEvent;
use crate::response::{polarization_convolved, select_phase_matched, ResponseSample, SignPattern};
use crate::witness::SignalMode;

/// `count` points `start, start + step, ..`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformAxis {
    pub start: f64,
    #[serde(default)]
    pub step: f64,
    #[serde(default = "one")]
    pub count: usize,
}

fn one() -> usize {
    1
}

impl UniformAxis {
    pub fn single(value: f64) -> Self {
        Self {
            start: value,
            step: 0.0,
            count: 1,
        }
    }

    pub fn validate(&self, name: &'static str) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParameter {
                name,
                reason: "count must be at least 1".into(),
            });
        }
        if !(self.start >= 0.0 && self.start.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("start must be a non-negative delay, got {}", self.start),
            });
        }
        if self.count > 1 && !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                reason: format!("step must be positive, got {}", self.step),
            });
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.start + k as f64 * self.step).collect()
    }
}

/// Which pulses of the three-pulse template take part at each order.
pub fn pulse_slots(order: usize) -> Result<&'static [usize]> {
    match order {
        1 => Ok(&[2]),
        2 => Ok(&[0, 2]),
        3 => Ok(&[0, 1, 2]),
        other => Err(Error::InvalidOrder(other)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRequest {
    pub model: ExcitonModel,
    pub noise: DephasingModel,
    pub input: DensityMatrix,
    /// Shapes of pulses 1, 2 and 3; arrival times are set by the grid.
    pub pulses: [PulseEvent; 3],
    pub order: usize,
    /// One sign per participating pulse.
    pub pattern: SignPattern,
    pub t1: UniformAxis,
    pub t2: UniformAxis,
    pub t3: UniformAxis,
    pub mode: SignalMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub value: C64,
    pub order: usize,
}

impl From<ScanRow> for ResponseSample {
    fn from(r: ScanRow) -> Self {
        ResponseSample {
            t1: r.t1,
            t2: r.t2,
            t3: r.t3,
            value: r.value,
        }
    }
}

impl ScanRequest {
    pub fn validate(&self) -> Result<()> {
        let slots = pulse_slots(self.order)?;
        self.pattern.check_arity(slots.len())?;
        self.t1.validate("t1")?;
        self.t2.validate("t2")?;
        self.t3.validate("t3")?;
        for p in &self.pulses {
            p.validate()?;
        }
        Ok(())
    }

    /// Grid points in row order: `t1` outermost, `t3` innermost.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let (a, b, c) = (self.t1.values(), self.t2.values(), self.t3.values());
        let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
        for &t1 in &a {
            for &t2 in &b {
                for &t3 in &c {
                    out.push((t1, t2, t3));
                }
            }
        }
        out
    }

    /// The pulse sequence and detection time for one grid point.
    pub fn sequence(&self, t1: f64, t2: f64, t3: f64) -> Result<(Vec<PulseEvent>, f64)> {
        let arrivals = [0.0, t1, t1 + t2];
        let slots = pulse_slots(self.order)?;
        let pulses: Vec<PulseEvent> = slots
            .iter()
            .map(|&k| PulseEvent {
                arrival: arrivals[k],
                ..self.pulses[k]
            })
            .collect();
        let detection = pulses.last().map_or(0.0, |p| p.arrival) + t3;
        Ok((pulses, detection))
    }

    /// Polarization at one grid point.
    pub fn evaluate(&self, t1: f64, t2: f64, t3: f64) -> Result<C64> {
        let (pulses, detection) = self.sequence(t1, t2, t3)?;
        match self.mode {
            SignalMode::Impulsive => {
                // Straight from the delays, so coincident pulses (a zero
                // delay) are allowed here.
                let delays = match self.order {
                    1 => vec![t3],
                    2 => vec![t1 + t2, t3],
                    _ => vec![t1, t2, t3],
                };
                let areas: f64 = pulses.iter().map(|p| p.area).product();
                Ok(select_phase_matched(
                    &self.pattern,
                    &delays,
                    &self.model,
                    &self.noise,
                    &self.input,
                )? * areas)
            }
            SignalMode::Convolved { step } => polarization_convolved(
                &pulses,
                detection,
                &self.pattern,
                &self.model,
                &self.noise,
                &self.input,
                step,
            ),
        }
    }
}

/// Evaluates the request on every grid point, rows in grid order.
pub fn delay_scan(request: &ScanRequest, exec: Execution) -> Result<Vec<ScanRow>> {
    request.validate()?;
    let points = request.points();
    par::try_map(exec, &points, |&(t1, t2, t3)| {
        request.evaluate(t1, t2, t3).map(|value| ScanRow {
            t1,
            t2,
            t3,
            value,
            order: request.order,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_dimer, eigenstate, DimerParams};

    fn request(order: usize, pattern: &str) -> ScanRequest {
        let model = build_dimer(&DimerParams::new(10.0, 9.0, 0.5).with_dipoles(1.0, 0.3)).unwrap();
        ScanRequest {
            input: eigenstate(&model, "g").unwrap(),
            noise: DephasingModel::uniform(4, 0.1).unwrap(),
            model,
            pulses: [
                PulseEvent::impulsive(0.0, 0.5, 1),
                PulseEvent::impulsive(0.0, 0.8, 2),
                PulseEvent::impulsive(0.0, 1.0, 3),
            ],
            order,
            pattern: pattern.parse().unwrap(),
            t1: UniformAxis { start: 0.2, step: 0.3, count: 3 },
            t2: UniformAxis { start: 0.0, step: 0.5, count: 2 },
            t3: UniformAxis { start: 0.1, step: 0.25, count: 4 },
            mode: SignalMode::Impulsive,
        }
    }

    #[test]
    fn single_point_matches_direct_call() {
        let mut r = request(3, "-++");
        r.t1 = UniformAxis::single(0.4);
        r.t2 = UniformAxis::single(0.6);
        r.t3 = UniformAxis::single(0.9);
        let rows = delay_scan(&r, Execution::Sequential).unwrap();
        assert_eq!(rows.len(), 1);
        let direct = select_phase_matched(&r.pattern, &[0.4, 0.6, 0.9], &r.model, &r.noise, &r.input)
            .unwrap()
            * 0.4;
        assert!((rows[0].value - direct).norm() < 1e-14);
        let pulses = r.sequence(0.4, 0.6, 0.9).unwrap().0;
        let via_arrivals =
            crate::response::polarization_impulsive(&pulses, 1.9, &r.pattern, &r.model, &r.noise, &r.input)
                .unwrap();
        assert!((rows[0].value - via_arrivals).norm() < 1e-13);
    }

    #[test]
    fn rows_follow_grid_order() {
        let rows = delay_scan(&request(3, "+-+"), Execution::Parallel).unwrap();
        assert_eq!(rows.len(), 24);
        assert_eq!((rows[0].t1, rows[0].t2, rows[0].t3), (0.2, 0.0, 0.1));
        assert_eq!((rows[1].t1, rows[1].t2, rows[1].t3), (0.2, 0.0, 0.35));
        assert_eq!((rows[4].t1, rows[4].t2), (0.2, 0.5));
        assert_eq!(rows[8].t1, 0.5);
        let seq = delay_scan(&request(3, "+-+"), Execution::Sequential).unwrap();
        assert_eq!(rows, seq);
    }

    #[test]
    fn second_order_scan_vanishes_on_dimer() {
        for p in ["++", "+-", "-+", "--"] {
            let rows = delay_scan(&request(2, p), Execution::Parallel).unwrap();
            assert!(rows.iter().all(|r| r.value.norm() <= 1e-12 && r.order == 2));
        }
    }

    #[test]
    fn zero_dipole_scan_is_zero() {
        let mut r = request(3, "-++");
        r.model = r.model.with_scaled_dipole(0.0);
        let rows = delay_scan(&r, Execution::Sequential).unwrap();
        assert!(rows.iter().all(|r| r.value == C64::new(0.0, 0.0)));
    }

    #[test]
    fn lower_orders_drop_pulses() {
        let r = request(2, "+-");
        let (pulses, det) = r.sequence(0.3, 0.4, 0.5).unwrap();
        assert_eq!(pulses.len(), 2);
        assert_eq!((pulses[0].wavevector, pulses[1].wavevector), (1, 3));
        assert!((pulses[1].arrival - 0.7).abs() < 1e-15);
        assert!((det - 1.2).abs() < 1e-15);
        let r = request(1, "+");
        let (pulses, det) = r.sequence(0.3, 0.4, 0.5).unwrap();
        assert_eq!(pulses.len(), 1);
        assert!((det - pulses[0].arrival - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bad_axes_and_patterns_are_rejected() {
        let mut r = request(3, "-++");
        r.t2.count = 0;
        assert!(delay_scan(&r, Execution::Sequential).is_err());
        let r = request(2, "-++");
        assert!(matches!(
            delay_scan(&r, Execution::Sequential),
            Err(Error::PatternArity { expected: 2, found: 3 })
        ));
    }
}
