//! Shared oracles for the integration and acceptance tests.

#![allow(dead_code)]

use num_complex::Complex64 as C64;

use nlwitness_core::dynamics::{nonperturbative_evolve, DephasingModel, FieldProfile, TimeGrid};
use nlwitness_core::linalg::least_squares;
use nlwitness_core::model::ExcitonModel;
use nlwitness_core::operator::{expectation, DensityMatrix};
use nlwitness_core::pulse::PulseEvent;

/// Phases per pulse in the phase cycle.
pub const PHASES: usize = 4;

/// `<mu>(t_detect)` from direct integration with real fields
/// `lambda A g(t) cos(w (t - a) - phi)`.
pub fn oracle_dipole(
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho0: &DensityMatrix,
    pulses: &[PulseEvent],
    phases: &[f64],
    lambda: f64,
    detection: f64,
    step: f64,
) -> f64 {
    let field = FieldProfile::from_pulses(pulses, lambda, phases);
    let t0 = field.window().0;
    let traj = nonperturbative_evolve(rho0, &field, model, noise, TimeGrid::new(t0, detection, step))
        .expect("oracle integration");
    expectation(model.mu(), traj.last().operator()).unwrap().re
}

/// Component of the oracle signal carrying `exp(i sum s_j phi_j)`.
pub fn phase_cycled(
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho0: &DensityMatrix,
    pulses: &[PulseEvent],
    signs: &[i8],
    lambda: f64,
    detection: f64,
    step: f64,
) -> C64 {
    let n = pulses.len();
    let total = PHASES.pow(n as u32);
    let runs: Vec<usize> = (0..total).collect();
    let terms = nlwitness_core::par::map(nlwitness_core::par::Execution::Parallel, &runs, |&code| {
        let mut phases = vec![0.0; n];
        let mut c = code;
        for p in phases.iter_mut() {
            *p = 2.0 * std::f64::consts::PI * (c % PHASES) as f64 / PHASES as f64;
            c /= PHASES;
        }
        let value = oracle_dipole(model, noise, rho0, pulses, &phases, lambda, detection, step);
        let weight: f64 = phases.iter().zip(signs).map(|(p, &s)| s as f64 * p).sum();
        C64::from_polar(value, -weight)
    });
    terms.iter().sum::<C64>() / total as f64
}

/// Coefficient of `lambda^3` from an odd polynomial fit (degree 7) of
/// complex samples.
pub fn cubic_coefficient(lambdas: &[f64], values: &[C64]) -> C64 {
    let rows: Vec<Vec<f64>> = lambdas
        .iter()
        .map(|&l| vec![l, l.powi(3), l.powi(5), l.powi(7)])
        .collect();
    let re: Vec<f64> = values.iter().map(|v| v.re).collect();
    let im: Vec<f64> = values.iter().map(|v| v.im).collect();
    let (a, _) = least_squares(&rows, &re).unwrap();
    let (b, _) = least_squares(&rows, &im).unwrap();
    C64::new(a[1], b[1])
}

/// Third-order oracle polarization in the same normalization as the
/// perturbative pipeline: each real field holds half of each analytic
/// component, hence the factor 2^3.
pub fn oracle_third_order(
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho0: &DensityMatrix,
    pulses: &[PulseEvent],
    signs: &[i8],
    detection: f64,
    step: f64,
) -> C64 {
    let lambdas = [0.02, 0.04, 0.06, 0.08];
    let values: Vec<C64> = lambdas
        .iter()
        .map(|&l| phase_cycled(model, noise, rho0, pulses, signs, l, detection, step))
        .collect();
    cubic_coefficient(&lambdas, &values) * 8.0
}

/// Phase-matched response built from explicit matrices: vertex `k` applies
/// `-i [mu_s, .]` where `mu_+` keeps the entries that raise the energy,
/// then the coherence `(i, j)` evolves as `exp(-i (e_i - e_j) t - g_ij t)`.
pub fn brute_phase_matched(
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho: &[Vec<C64>],
    signs: &[i8],
    delays: &[f64],
) -> C64 {
    let e = model.energies();
    let n = e.len();
    let mu = model.mu();
    let mut x: Vec<Vec<C64>> = rho.to_vec();
    for (&s, &t) in signs.iter().zip(delays) {
        let part = |i: usize, j: usize| {
            let keep = if s > 0 { e[i] > e[j] } else { e[i] < e[j] };
            if keep {
                mu.get(i, j)
            } else {
                C64::new(0.0, 0.0)
            }
        };
        let mut next = vec![vec![C64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += part(i, k) * x[k][j] - x[i][k] * part(k, j);
                }
                let phase = C64::new(-noise.rate(i, j) * t, -(e[i] - e[j]) * t);
                next[i][j] = C64::new(0.0, -1.0) * acc * phase.exp();
            }
        }
        x = next;
    }
    let mut out = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            out += mu.get(i, k) * x[k][i];
        }
    }
    out
}

pub fn dense(rho: &DensityMatrix) -> Vec<Vec<C64>> {
    let n = rho.dim();
    (0..n)
        .map(|i| (0..n).map(|j| rho.operator().get(i, j)).collect())
        .collect()
}
