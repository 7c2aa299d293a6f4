//! Invasiveness witness: main experiment, control experiments and the
//! classical bounds they imply.
//!
//! Pulses 1, 2 and 3 play the roles of the state preparation, the
//! measurement-like operation O and the read-out. The upper branch applies
//! all three pulses, the lower branch omits pulse 2, and the witness quantity
//! is the difference of the detected intensities.
//!
//! Two points are not fixed by the physics and are explicit options here:
//!
//! * [`Detection::FixedDirection`] detects every branch in the direction
//!   `s1 k1 + s2 k2 + s3 k3` of the full sequence. A branch that lacks one of
//!   the pulses has no component in that direction, so its signal is zero.
//!   [`Detection::PerBranch`] detects each branch in the direction of the
//!   pulses it actually contains, which gives control values
//!   `d_j = |P2_j|^2 - |P1_j|^2`.
//! * A [`InputState::Mixture`] is an ensemble of eigenstates: intensities are
//!   averaged over its members. A density matrix input is evaluated as one
//!   coherent state.

use num_complex::Complex64 as C64;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::dynamics::{free_propagate, DephasingModel};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::model::{gibbs_populations, ClassicalMixture, ExcitonModel};
use crate::operator::{DensityMatrix, LiouvilleVector, Operator, DEFAULT_TOLERANCE};
use crate::par::{self, Execution};
use crate::pulse::{check_ordered, PulseEvent, PulseMode};
use crate::response::{polarization_convolved_op, polarization_impulsive_op, SignPattern};

/// Default slack on the classical bounds.
pub const DEFAULT_WITNESS_TOLERANCE: f64 = 1e-9;

/// Largest condition number accepted by [`solve_controls`].
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub enum InputState {
    Density(DensityMatrix),
    Eigenstate(String),
    Mixture(ClassicalMixture),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalMode {
    /// Delta pulses: area times the phase-matched response.
    Impulsive,
    /// Finite pulses convolved with the response at the given quadrature step.
    Convolved { step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    #[default]
    FixedDirection,
    PerBranch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub model: ExcitonModel,
    pub noise: DephasingModel,
    /// Pulses 1, 2 and 3 in arrival order.
    pub pulses: Vec<PulseEvent>,
    pub detection_time: f64,
    /// Three signs for the full sequence.
    pub pattern: SignPattern,
    /// State at the arrival of pulse 1 (or at the start of its envelope in
    /// convolved mode).
    pub input: InputState,
    pub mode: SignalMode,
    /// Use `|S|^2` with unit areas at the arrival times instead of `|P|^2`.
    pub semi_impulsive: bool,
    pub detection: Detection,
    /// Replace pulse 1 by the identity, so the input enters the protocol as is.
    pub skip_first_pulse: bool,
}

impl ExperimentSpec {
    fn validate(&self) -> Result<()> {
        if self.pulses.len() != 3 {
            return Err(Error::InvalidParameter {
                name: "pulses",
                reason: format!("the protocol needs exactly 3 pulses, got {}", self.pulses.len()),
            });
        }
        check_ordered(&self.pulses)?;
        self.pattern.check_arity(3)?;
        let last = self.pulses[2].arrival;
        if self.detection_time < last {
            return Err(Error::DetectionBeforePulse {
                detection: self.detection_time,
                last_pulse: last,
            });
        }
        if self.noise.dim() != self.model.dim() {
            return Err(Error::DimensionMismatch {
                left: self.model.dim(),
                right: self.noise.dim(),
            });
        }
        Ok(())
    }

    /// Ensemble members `(weight, state)` of the input.
    fn members(&self) -> Result<Vec<(f64, Operator)>> {
        let dim = self.model.dim();
        let check = |d: usize| {
            if d != dim {
                Err(Error::DimensionMismatch { left: dim, right: d })
            } else {
                Ok(())
            }
        };
        match &self.input {
            InputState::Density(rho) => {
                check(rho.dim())?;
                Ok(vec![(1.0, rho.operator().clone())])
            }
            InputState::Eigenstate(label) => {
                let k = self.model.index_of(label)?;
                Ok(vec![(1.0, Operator::projector(dim, k))])
            }
            InputState::Mixture(m) => {
                check(m.dim())?;
                Ok(m.populations()
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p > 0.0)
                    .map(|(k, &p)| (p, Operator::projector(dim, k)))
                    .collect())
            }
        }
    }

    /// Polarization of one branch for one input state.
    fn branch_polarization(&self, applied: &[usize], rho: &Operator) -> Result<C64> {
        let pattern = match self.detection {
            Detection::FixedDirection if applied.len() < 3 => return Ok(C64::new(0.0, 0.0)),
            Detection::FixedDirection => self.pattern.clone(),
            Detection::PerBranch => self.pattern.restrict(applied)?,
        };
        let first_arrival = self.pulses[0].arrival;
        let impulsive = self.semi_impulsive || self.mode == SignalMode::Impulsive;
        if impulsive {
            let pulses: Vec<PulseEvent> = applied
                .iter()
                .map(|&k| {
                    let p = &self.pulses[k];
                    let area = if self.semi_impulsive { 1.0 } else { p.area };
                    PulseEvent::impulsive(p.arrival, area, p.wavevector)
                })
                .collect();
            let lead = pulses[0].arrival - first_arrival;
            let start = free_propagate(&LiouvilleVector::new(rho.clone()), lead, &self.model, &self.noise)?;
            return polarization_impulsive_op(
                &pulses,
                self.detection_time,
                &pattern,
                &self.model,
                &self.noise,
                start.operator(),
            );
        }
        let SignalMode::Convolved { step } = self.mode else {
            unreachable!("impulsive handled above")
        };
        let pulses: Vec<PulseEvent> = applied.iter().map(|&k| self.pulses[k]).collect();
        let input_time = if applied[0] == 0 && self.pulses[0].mode == PulseMode::Finite {
            self.pulses[0].support().0
        } else {
            first_arrival
        };
        polarization_convolved_op(
            &pulses,
            self.detection_time,
            &pattern,
            &self.model,
            &self.noise,
            rho,
            input_time,
            step,
        )
    }

    /// Detected intensity of one branch, averaged over ensemble members.
    fn intensity(&self, applied: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for (weight, rho) in self.members()? {
            total += weight * self.branch_polarization(applied, &rho)?.norm_sqr();
        }
        Ok(total)
    }

    fn branches(&self) -> (Vec<usize>, Vec<usize>) {
        if self.skip_first_pulse {
            (vec![1, 2], vec![2])
        } else {
            (vec![0, 1, 2], vec![0, 2])
        }
    }
}

/// `d = I(with pulse 2) - I(without pulse 2)`.
pub fn run_main_experiment(spec: &ExperimentSpec) -> Result<f64> {
    spec.validate()?;
    let (upper, lower) = spec.branches();
    Ok(spec.intensity(&upper)? - spec.intensity(&lower)?)
}

/// Control run: pulse 1 is skipped and the input must be classical.
///
/// A density matrix input is accepted when its exciton-basis coherences are
/// below the default tolerance and is then treated as the mixture of its
/// populations.
pub fn run_control_experiment(spec: &ExperimentSpec) -> Result<f64> {
    let input = match &spec.input {
        InputState::Density(rho) => {
            InputState::Mixture(ClassicalMixture::from_density(rho, DEFAULT_TOLERANCE)?)
        }
        other => other.clone(),
    };
    let control = ExperimentSpec {
        input,
        skip_first_pulse: true,
        ..spec.clone()
    };
    run_main_experiment(&control)
}

/// Per-level control values recovered from mixture observations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlSolution {
    #[serde(serialize_with = "serialize_pairs")]
    pub controls: Vec<(String, f64)>,
    /// `|P d - m|` at the solution.
    pub residual: f64,
    pub condition: f64,
}

/// Least-squares solve of `sum_j p_j d_j = m` over the observations.
pub fn solve_controls(
    observations: &[(ClassicalMixture, f64)],
    labels: &[String],
) -> Result<ControlSolution> {
    let n = labels.len();
    if observations.len() < n || n == 0 {
        return Err(Error::InsufficientObservations {
            needed: n.max(1),
            found: observations.len(),
        });
    }
    if let Some((m, _)) = observations.iter().find(|(m, _)| m.dim() != n) {
        return Err(Error::DimensionMismatch {
            left: n,
            right: m.dim(),
        });
    }
    let a: Vec<Vec<f64>> = observations.iter().map(|(m, _)| m.populations().to_vec()).collect();
    let b: Vec<f64> = observations.iter().map(|(_, d)| *d).collect();
    let (x, condition) = least_squares(&a, &b).ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let residual = a
        .iter()
        .zip(&b)
        .map(|(row, m)| {
            let r: f64 = row.iter().zip(&x).map(|(p, d)| p * d).sum::<f64>() - m;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok(ControlSolution {
        controls: labels.iter().cloned().zip(x).collect(),
        residual,
        condition,
    })
}

/// How the report was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportNotes {
    /// `"intensity"` for `|P|^2`, `"semi_impulsive"` for `|S|^2`.
    pub observable: String,
    pub pattern: SignPattern,
    pub detection: Detection,
    pub mode: SignalMode,
    /// Each interaction vertex carries `-i` (hbar = 1); moduli are unaffected.
    pub prefactor: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub d_rho: f64,
    /// Control values in basis order.
    #[serde(serialize_with = "serialize_pairs")]
    pub controls: Vec<(String, f64)>,
    pub lower: f64,
    pub upper: f64,
    pub violated: bool,
    pub margin: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<ReportNotes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control_solve: Option<ControlSolveInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlSolveInfo {
    pub betas: Vec<f64>,
    pub observations: Vec<f64>,
    pub residual: f64,
    pub condition: f64,
}

fn serialize_pairs<S: Serializer>(pairs: &[(String, f64)], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(pairs.len()))?;
    for (k, v) in pairs {
        map.serialize_entry(k, v)?;
    }
    map.end()
}

/// Compares `d_rho` with the interval spanned by the controls.
pub fn evaluate_witness(d_rho: f64, controls: &[(String, f64)], tol: f64) -> Result<WitnessReport> {
    if controls.is_empty() {
        return Err(Error::EmptyControls);
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            reason: format!("must be non-negative, got {tol}"),
        });
    }
    let lower = controls.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let upper = controls.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(WitnessReport {
        d_rho,
        controls: controls.to_vec(),
        lower,
        upper,
        violated: d_rho < lower - tol || d_rho > upper + tol,
        margin: (lower - d_rho).max(d_rho - upper).max(0.0),
        tolerance: tol,
        notes: None,
        control_solve: None,
    })
}

/// Source of the classical bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControlSource {
    /// One control run per exciton eigenstate.
    Eigenstates,
    /// Control runs on Gibbs states, per-level values solved for.
    Gibbs { betas: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub experiment: ExperimentSpec,
    pub controls: ControlSource,
    pub tolerance: f64,
}

/// Main experiment, all control runs and the comparison.
pub fn run_protocol(config: &ProtocolConfig, exec: Execution) -> Result<WitnessReport> {
    let spec = &config.experiment;
    let d_rho = run_main_experiment(spec)?;
    let labels = spec.model.labels().to_vec();
    let control_spec = |input: InputState| ExperimentSpec {
        input,
        ..spec.clone()
    };
    let (controls, info) = match &config.controls {
        ControlSource::Eigenstates => {
            let values = par::try_map(exec, &labels, |label| {
                run_control_experiment(&control_spec(InputState::Eigenstate(label.clone())))
            })?;
            (labels.iter().cloned().zip(values).collect::<Vec<_>>(), None)
        }
        ControlSource::Gibbs { betas } => {
            let mixtures = betas
                .iter()
                .map(|&b| gibbs_populations(&spec.model, b))
                .collect::<Result<Vec<_>>>()?;
            let observed = par::try_map(exec, &mixtures, |m| {
                run_control_experiment(&control_spec(InputState::Mixture(m.clone())))
            })?;
            let pairs: Vec<(ClassicalMixture, f64)> =
                mixtures.into_iter().zip(observed.iter().copied()).collect();
            let solution = solve_controls(&pairs, &labels)?;
            let info = ControlSolveInfo {
                betas: betas.clone(),
                observations: observed,
                residual: solution.residual,
                condition: solution.condition,
            };
            (solution.controls, Some(info))
        }
    };
    let mut report = evaluate_witness(d_rho, &controls, config.tolerance)?;
    report.notes = Some(ReportNotes {
        observable: if spec.semi_impulsive { "semi_impulsive" } else { "intensity" }.into(),
        pattern: spec.pattern.clone(),
        detection: spec.detection,
        mode: spec.mode,
        prefactor: "-i per interaction vertex, hbar = 1".into(),
    });
    report.control_solve = info;
    Ok(report)
}
