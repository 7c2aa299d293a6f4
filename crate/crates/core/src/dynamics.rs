//! Free evolution with dephasing, impulsive interaction vertices and a
//! non-perturbative master-equation integrator.
//!
//! Between pulses the state evolves under the diagonal master equation
//!
//! ```text
//! d sigma_ij / dt = -i (e_i - e_j) sigma_ij - gamma_ij sigma_ij
//! ```
//!
//! in the exciton basis, which has the closed-form solution used by
//! [`free_propagate`]. With a zero-diagonal rate matrix populations are left
//! untouched (pure dephasing).

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::ExcitonModel;
use crate::operator::{DensityMatrix, LiouvilleVector, Operator, DEFAULT_TOLERANCE};
use crate::pulse::PulseEvent;

const I: C64 = C64::new(0.0, 1.0);

/// Trace drift above which [`nonperturbative_evolve`] gives up.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-8;

/// Element-wise relaxation rates `gamma_ij` in the exciton basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingModel {
    rates: Vec<Vec<f64>>,
    population_decay: bool,
}

impl DephasingModel {
    pub fn none(dim: usize) -> Self {
        Self {
            rates: vec![vec![0.0; dim]; dim],
            population_decay: false,
        }
    }

    /// Same rate on every coherence, populations untouched.
    pub fn uniform(dim: usize, gamma: f64) -> Result<Self> {
        check_rate(gamma)?;
        let rates = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 0.0 } else { gamma }).collect())
            .collect();
        Ok(Self {
            rates,
            population_decay: false,
        })
    }

    /// Same rate on every element, populations included. Not trace preserving.
    pub fn uniform_with_population_decay(dim: usize, gamma: f64) -> Result<Self> {
        check_rate(gamma)?;
        Ok(Self {
            rates: vec![vec![gamma; dim]; dim],
            population_decay: true,
        })
    }

    /// Full rate matrix. A non-zero diagonal requires `population_decay`.
    pub fn from_matrix(rates: Vec<Vec<f64>>, population_decay: bool) -> Result<Self> {
        let n = rates.len();
        if rates.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: "rate matrix must be square".into(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                check_rate(rates[i][j])?;
                if rates[i][j] != rates[j][i] {
                    return Err(Error::InvalidParameter {
                        name: "gamma",
                        reason: "rate matrix must be symmetric".into(),
                    });
                }
            }
            if rates[i][i] != 0.0 && !population_decay {
                return Err(Error::InvalidParameter {
                    name: "gamma",
                    reason: "diagonal rates need population decay enabled".into(),
                });
            }
        }
        Ok(Self {
            rates,
            population_decay,
        })
    }

    pub fn dim(&self) -> usize {
        self.rates.len()
    }

    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.rates[i][j]
    }

    pub fn rates(&self) -> &[Vec<f64>] {
        &self.rates
    }

    pub fn population_decay(&self) -> bool {
        self.population_decay
    }

    pub fn preserves_trace(&self) -> bool {
        (0..self.dim()).all(|i| self.rates[i][i] == 0.0)
    }

    fn check_dim(&self, model: &ExcitonModel) -> Result<()> {
        if self.dim() != model.dim() {
            return Err(Error::DimensionMismatch {
                left: model.dim(),
                right: self.dim(),
            });
        }
        Ok(())
    }
}

fn check_rate(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("rates must be non-negative, got {gamma}"),
        });
    }
    Ok(())
}

/// Element-wise factors `exp(-i (e_i - e_j) dt - gamma_ij dt)`.
pub(crate) fn propagation_factors(
    model: &ExcitonModel,
    noise: &DephasingModel,
    dt: f64,
) -> Array2<C64> {
    let e = model.energies();
    let n = e.len();
    Array2::from_shape_fn((n, n), |(i, j)| {
        C64::new(-noise.rate(i, j) * dt, -(e[i] - e[j]) * dt).exp()
    })
}

pub(crate) fn propagate_with(state: &Operator, factors: &Array2<C64>) -> Operator {
    Operator::from_array(state.entries() * factors)
}

/// Closed-form free evolution over `dt` in the exciton basis.
pub fn free_propagate(
    state: &LiouvilleVector,
    dt: f64,
    model: &ExcitonModel,
    noise: &DephasingModel,
) -> Result<LiouvilleVector> {
    if !(dt >= 0.0) {
        return Err(Error::NegativeTime(dt));
    }
    noise.check_dim(model)?;
    if state.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            left: model.dim(),
            right: state.dim(),
        });
    }
    let factors = propagation_factors(model, noise, dt);
    Ok(LiouvilleVector::new(propagate_with(state.operator(), &factors)))
}

/// One perturbative vertex, `-i [mu, state]`.
pub fn apply_impulsive_interaction(
    state: &LiouvilleVector,
    model: &ExcitonModel,
) -> Result<LiouvilleVector> {
    let comm = model.mu().commutator(state.operator())?;
    Ok(LiouvilleVector::new(comm.scale(-I)))
}

/// Real-valued field `E(t)` with a support window; zero outside it.
#[derive(Clone)]
pub struct FieldProfile {
    field: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    t_min: f64,
    t_max: f64,
}

impl fmt::Debug for FieldProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldProfile")
            .field("t_min", &self.t_min)
            .field("t_max", &self.t_max)
            .finish_non_exhaustive()
    }
}

impl FieldProfile {
    pub fn new(field: impl Fn(f64) -> f64 + Send + Sync + 'static, t_min: f64, t_max: f64) -> Self {
        Self {
            field: Arc::new(field),
            t_min,
            t_max,
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0, 0.0, 0.0)
    }

    /// Sum of Gaussian pulses, each scaled by `scale` and carrying the
    /// optical phase `phases[j]` (`A g(t) cos(w (t - t_j) - phase_j)`).
    pub fn from_pulses(pulses: &[PulseEvent], scale: f64, phases: &[f64]) -> Self {
        let pulses: Vec<PulseEvent> = pulses.to_vec();
        let phases: Vec<f64> = (0..pulses.len())
            .map(|k| phases.get(k).copied().unwrap_or(0.0))
            .collect();
        let t_min = pulses
            .iter()
            .map(|p| p.support().0)
            .fold(f64::INFINITY, f64::min);
        let t_max = pulses
            .iter()
            .map(|p| p.support().1)
            .fold(f64::NEG_INFINITY, f64::max);
        Self::new(
            move |t| {
                scale
                    * pulses
                        .iter()
                        .zip(&phases)
                        .map(|(p, &phi)| p.real_field(t, phi))
                        .sum::<f64>()
            },
            t_min,
            t_max,
        )
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < self.t_min || t > self.t_max {
            0.0
        } else {
            (self.field)(t)
        }
    }

    pub fn window(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }
}

/// Time grid for [`nonperturbative_evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub step: f64,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, step: f64) -> Self {
        Self {
            t_start,
            t_end,
            step,
        }
    }

    /// Fifty steps per period of the fastest transition.
    pub fn default_step(model: &ExcitonModel) -> f64 {
        2.0 * PI / model.max_transition_frequency() / 50.0
    }

    fn steps(&self) -> Result<(usize, f64)> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "step",
                reason: format!("must be positive, got {}", self.step),
            });
        }
        let span = self.t_end - self.t_start;
        if !(span >= 0.0) {
            return Err(Error::NegativeTime(span));
        }
        // Shrink the step slightly so the grid lands on t_end.
        let n = (span / self.step).ceil().max(1.0) as usize;
        Ok((n, span / n as f64))
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Fourth-order Runge-Kutta integration of
/// `d sigma/dt = -i [H0 + mu E(t), sigma] - gamma o sigma`.
///
/// The step is shrunk so the grid ends exactly at `t_end`. A trace drift
/// (for trace preserving noise) or a Frobenius norm above one by more than
/// [`TRACE_DRIFT_LIMIT`] is reported as a step-size error.
pub fn nonperturbative_evolve(
    rho0: &DensityMatrix,
    field: &FieldProfile,
    model: &ExcitonModel,
    noise: &DephasingModel,
    grid: TimeGrid,
) -> Result<Trajectory> {
    noise.check_dim(model)?;
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            left: model.dim(),
            right: rho0.dim(),
        });
    }
    let (n, h) = grid.steps()?;
    let n_dim = model.dim();
    let h0 = model.h0().entries().clone();
    let mu = model.mu().entries().clone();
    let gamma = Array2::from_shape_fn((n_dim, n_dim), |(i, j)| C64::new(noise.rate(i, j), 0.0));
    let check_trace = noise.preserves_trace();

    let rhs = |t: f64, sigma: &Array2<C64>| -> Array2<C64> {
        let e = field.value(t);
        let h = &h0 + &mu.mapv(|z| z * e);
        let comm = h.dot(sigma) - sigma.dot(&h);
        comm.mapv(|z| -I * z) - &gamma * sigma
    };

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut sigma = rho0.operator().entries().clone();
    let tol = rho0.tolerance().max(DEFAULT_TOLERANCE);
    times.push(grid.t_start);
    states.push(rho0.clone());
    for k in 0..n {
        let t = grid.t_start + k as f64 * h;
        let k1 = rhs(t, &sigma);
        let k2 = rhs(t + 0.5 * h, &(&sigma + &k1.mapv(|z| z * (0.5 * h))));
        let k3 = rhs(t + 0.5 * h, &(&sigma + &k2.mapv(|z| z * (0.5 * h))));
        let k4 = rhs(t + h, &(&sigma + &k3.mapv(|z| z * h)));
        sigma = &sigma + &((&k1 + &k2.mapv(|z| 2.0 * z) + k3.mapv(|z| 2.0 * z) + k4).mapv(|z| z * (h / 6.0)));
        // RK4 keeps the trace exactly even when unstable, so the norm is
        // watched as well: no density matrix has Frobenius norm above 1.
        let mut drift = (sigma.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).max(0.0);
        if check_trace {
            drift = drift.max((sigma.diag().sum() - C64::new(1.0, 0.0)).norm());
        }
        if drift > TRACE_DRIFT_LIMIT || !drift.is_finite() {
            return Err(Error::StepSize { drift });
        }
        times.push(grid.t_start + (k + 1) as f64 * h);
        states.push(DensityMatrix::assume_valid(Operator::from_array(sigma.clone()), tol));
    }
    Ok(Trajectory { times, states })
}
