//! Exciton Hamiltonians, dipole operators and classical input states.
//!
//! Models are always stored in their exciton (energy eigen-) basis, so the
//! Hamiltonian is diagonal and free evolution reduces to element-wise phases.
//! The electronic dimer uses the basis order `(g, beta, alpha, f)`, which is
//! ascending in energy.
//!
//! The dipole operator of a site `s` is `mu_s (a_s + a_s^dag)` with hard-core
//! excitations, so it couples the ground state to the single-exciton manifold
//! and the single-exciton manifold to the two-exciton manifold only.

use std::f64::consts::FRAC_PI_4;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{validate_density, DensityMatrix, Operator, DEFAULT_TOLERANCE};

/// Site parameters of an electronically coupled dimer (hbar = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimerParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub j_coupling: f64,
    #[serde(default = "unit")]
    pub mu_a: f64,
    #[serde(default = "unit")]
    pub mu_b: f64,
}

fn unit() -> f64 {
    1.0
}

impl DimerParams {
    pub fn new(omega_a: f64, omega_b: f64, j_coupling: f64) -> Self {
        Self {
            omega_a,
            omega_b,
            j_coupling,
            mu_a: 1.0,
            mu_b: 1.0,
        }
    }

    pub fn with_dipoles(mut self, mu_a: f64, mu_b: f64) -> Self {
        self.mu_a = mu_a;
        self.mu_b = mu_b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("omega_a", self.omega_a), ("omega_b", self.omega_b)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {value}"),
                });
            }
        }
        for (name, value) in [
            ("j_coupling", self.j_coupling),
            ("mu_a", self.mu_a),
            ("mu_b", self.mu_b),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite".into(),
                });
            }
        }
        if self.omega_a == self.omega_b && self.j_coupling == 0.0 {
            return Err(Error::DegenerateModel);
        }
        Ok(())
    }
}

/// Closed-form single- and two-exciton spectrum of a dimer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimerSpectrum {
    pub omega_bar: f64,
    pub delta: f64,
    /// Mixing angle `arctan(J / delta) / 2`, in `(-pi/4, pi/4]`.
    pub theta: f64,
    pub omega_alpha: f64,
    pub omega_beta: f64,
    pub omega_f: f64,
}

/// Closed-form diagonalization of the dimer Hamiltonian.
///
/// `alpha` is always the upper single exciton, so the splitting is taken as
/// `|delta sec(2 theta)|`. At `delta = 0` the mixing angle is continued to
/// `pi/4` and the splitting becomes `|J|`.
pub fn diagonalize_dimer(params: &DimerParams) -> Result<DimerSpectrum> {
    params.validate()?;
    let omega_bar = 0.5 * (params.omega_a + params.omega_b);
    let delta = 0.5 * (params.omega_a - params.omega_b);
    let j = params.j_coupling;
    let (theta, half_split) = if delta == 0.0 {
        (FRAC_PI_4, j.abs())
    } else {
        let theta = 0.5 * (j / delta).atan();
        (theta, (delta / (2.0 * theta).cos()).abs())
    };
    Ok(DimerSpectrum {
        omega_bar,
        delta,
        theta,
        omega_alpha: omega_bar + half_split,
        omega_beta: omega_bar - half_split,
        omega_f: params.omega_a + params.omega_b,
    })
}

/// Excitation-number parity of a basis level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Hamiltonian, dipole operator and labels in the exciton basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitonModel {
    energies: Vec<f64>,
    h0: Operator,
    mu: Operator,
    mu_raising: Operator,
    mu_lowering: Operator,
    labels: Vec<String>,
    manifolds: Option<Vec<usize>>,
}

impl ExcitonModel {
    /// Builds a model from exciton energies and a Hermitian dipole operator.
    ///
    /// `manifolds` optionally tags each level with its excitation number; when
    /// present, `mu` may only couple levels of opposite parity. The dipole may
    /// not couple degenerate levels (including permanent dipoles), since such
    /// terms carry no optical frequency and cannot be phase matched.
    pub fn new(
        energies: Vec<f64>,
        mu: Operator,
        labels: Vec<String>,
        manifolds: Option<Vec<usize>>,
    ) -> Result<Self> {
        let dim = energies.len();
        if mu.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: mu.dim(),
            });
        }
        if labels.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: labels.len(),
            });
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "energies",
                reason: "must be finite".into(),
            });
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::InvalidParameter {
                    name: "labels",
                    reason: format!("duplicate label `{label}`"),
                });
            }
        }
        let herm = mu.hermiticity_deviation();
        if herm > DEFAULT_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: format!("not Hermitian (deviation {herm:e})"),
            });
        }
        let scale = energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
        let degenerate = |i: usize, j: usize| (energies[i] - energies[j]).abs() <= 1e-12 * scale;
        let mut raising = Array2::<C64>::zeros((dim, dim));
        let mut lowering = Array2::<C64>::zeros((dim, dim));
        for i in 0..dim {
            for j in 0..dim {
                let z = mu.get(i, j);
                if z == C64::new(0.0, 0.0) {
                    continue;
                }
                if degenerate(i, j) {
                    return Err(Error::InvalidParameter {
                        name: "mu",
                        reason: format!("couples degenerate levels {i} and {j}"),
                    });
                }
                if energies[i] > energies[j] {
                    raising[[i, j]] = z;
                } else {
                    lowering[[i, j]] = z;
                }
            }
        }
        if let Some(tags) = &manifolds {
            if tags.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: tags.len(),
                });
            }
            for i in 0..dim {
                for j in 0..dim {
                    if mu.get(i, j).norm() > 0.0 && tags[i] % 2 == tags[j] % 2 {
                        return Err(Error::InvalidParameter {
                            name: "mu",
                            reason: format!("couples levels {i} and {j} of equal parity"),
                        });
                    }
                }
            }
        }
        Ok(Self {
            h0: Operator::diagonal(&energies),
            energies,
            mu,
            mu_raising: Operator::from_array(raising),
            mu_lowering: Operator::from_array(lowering),
            labels,
            manifolds,
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn h0(&self) -> &Operator {
        &self.h0
    }

    pub fn mu(&self) -> &Operator {
        &self.mu
    }

    /// Part of `mu` that raises the energy of the state it acts on from the left.
    pub fn mu_raising(&self) -> &Operator {
        &self.mu_raising
    }

    pub fn mu_lowering(&self) -> &Operator {
        &self.mu_lowering
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn manifolds(&self) -> Option<&[usize]> {
        self.manifolds.as_deref()
    }

    pub fn parity(&self) -> Option<Vec<Parity>> {
        self.manifolds.as_ref().map(|tags| {
            tags.iter()
                .map(|m| if m % 2 == 0 { Parity::Even } else { Parity::Odd })
                .collect()
        })
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Largest transition frequency `|e_i - e_j|`.
    pub fn max_transition_frequency(&self) -> f64 {
        let lo = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    /// Same model with the dipole operator multiplied by `factor`.
    pub fn with_scaled_dipole(&self, factor: f64) -> Self {
        let f = C64::new(factor, 0.0);
        Self {
            mu: self.mu.scale(f),
            mu_raising: self.mu_raising.scale(f),
            mu_lowering: self.mu_lowering.scale(f),
            ..self.clone()
        }
    }
}

/// Four-level dimer model in the `(g, beta, alpha, f)` exciton basis.
pub fn build_dimer(params: &DimerParams) -> Result<ExcitonModel> {
    let spectrum = diagonalize_dimer(params)?;
    // Rotation angle of the upper exciton in the (A, B) plane. It equals the
    // mixing angle when omega_a > omega_b and keeps alpha on top otherwise.
    let phi = 0.5 * params.j_coupling.atan2(0.5 * (params.omega_a - params.omega_b));
    let (s, c) = phi.sin_cos();
    let (ma, mb) = (params.mu_a, params.mu_b);
    // <alpha|mu|g>, <beta|mu|g>, <f|mu|alpha>, <f|mu|beta> with
    // alpha = c|A> + s|B>, beta = -s|A> + c|B>, f = |AB>.
    let alpha_g = c * ma + s * mb;
    let beta_g = -s * ma + c * mb;
    let f_alpha = c * mb + s * ma;
    let f_beta = -s * mb + c * ma;
    let (g, b, a, f) = (0, 1, 2, 3);
    let mut mu = [[0.0; 4]; 4];
    for (i, j, v) in [
        (a, g, alpha_g),
        (b, g, beta_g),
        (f, a, f_alpha),
        (f, b, f_beta),
    ] {
        mu[i][j] = v;
        mu[j][i] = v;
    }
    let mu = Operator::from_real(&mu.iter().map(|r| r.to_vec()).collect::<Vec<_>>())?;
    ExcitonModel::new(
        vec![0.0, spectrum.omega_beta, spectrum.omega_alpha, spectrum.omega_f],
        mu,
        ["g", "beta", "alpha", "f"].map(String::from).to_vec(),
        Some(vec![0, 1, 1, 2]),
    )
}

/// Site-basis Hamiltonian of a dimer over `(g, A, B, AB)`.
pub fn dimer_site_hamiltonian(params: &DimerParams) -> Vec<Vec<f64>> {
    let DimerParams {
        omega_a,
        omega_b,
        j_coupling,
        ..
    } = *params;
    vec![
        vec![0.0, 0.0, 0.0, 0.0],
        vec![0.0, omega_a, j_coupling, 0.0],
        vec![0.0, j_coupling, omega_b, 0.0],
        vec![0.0, 0.0, 0.0, omega_a + omega_b],
    ]
}

/// General `n`-site aggregate: ground state, single-exciton manifold and
/// optionally the hard-core two-exciton manifold.
///
/// `couplings` must be symmetric with a zero diagonal. Levels are ordered
/// `g`, single excitons `e1..en` and two-exciton states `f1..fm`, each
/// manifold ascending in energy.
pub fn build_general(
    site_energies: &[f64],
    couplings: &[Vec<f64>],
    dipoles: &[f64],
    two_exciton: bool,
) -> Result<ExcitonModel> {
    let n = site_energies.len();
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "site_energies",
            reason: "need at least one site".into(),
        });
    }
    if couplings.len() != n || couplings.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParameter {
            name: "couplings",
            reason: format!("must be {n}x{n}"),
        });
    }
    if dipoles.len() != n {
        return Err(Error::InvalidParameter {
            name: "dipoles",
            reason: format!("must have {n} entries"),
        });
    }
    if site_energies.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "site_energies",
            reason: "must be positive and finite".into(),
        });
    }
    let mut deviation: f64 = 0.0;
    for i in 0..n {
        if couplings[i][i] != 0.0 {
            return Err(Error::InvalidParameter {
                name: "couplings",
                reason: "diagonal must be zero (site energies are given separately)".into(),
            });
        }
        for j in 0..n {
            deviation = deviation.max((couplings[i][j] - couplings[j][i]).abs());
        }
    }
    if deviation > 0.0 {
        return Err(Error::NonSymmetricCouplings { deviation });
    }

    // Single-exciton block.
    let h1: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { site_energies[i] } else { couplings[i][j] })
                .collect()
        })
        .collect();
    let (e1, v1) = linalg::symmetric_eigen(&h1);

    // Two-exciton block over site pairs (s < t).
    let pairs: Vec<(usize, usize)> = if two_exciton {
        (0..n)
            .flat_map(|s| (s + 1..n).map(move |t| (s, t)))
            .collect()
    } else {
        Vec::new()
    };
    let pair_index = |a: usize, b: usize| {
        let key = (a.min(b), a.max(b));
        pairs.iter().position(|&p| p == key)
    };
    let m = pairs.len();
    let mut h2 = vec![vec![0.0; m]; m];
    for (p, &(s, t)) in pairs.iter().enumerate() {
        h2[p][p] = site_energies[s] + site_energies[t];
        // Hop either excitation to an unoccupied site.
        for (moving, staying) in [(s, t), (t, s)] {
            for u in 0..n {
                if u == staying || u == moving {
                    continue;
                }
                if let Some(q) = pair_index(u, staying) {
                    h2[q][p] += couplings[u][moving];
                }
            }
        }
    }
    let (e2, v2) = if m > 0 {
        linalg::symmetric_eigen(&h2)
    } else {
        (Vec::new(), Vec::new())
    };

    let dim = 1 + n + m;
    let mut mu = vec![vec![0.0; dim]; dim];
    // <e_k|mu|g> = sum_s v1[s][k] d_s
    for k in 0..n {
        let val: f64 = (0..n).map(|s| v1[s][k] * dipoles[s]).sum();
        mu[1 + k][0] = val;
        mu[0][1 + k] = val;
    }
    // <f_l|mu|e_k> = sum_{(s,t)} v2[(s,t)][l] (d_t v1[s][k] + d_s v1[t][k])
    for l in 0..m {
        for k in 0..n {
            let val: f64 = pairs
                .iter()
                .enumerate()
                .map(|(p, &(s, t))| v2[p][l] * (dipoles[t] * v1[s][k] + dipoles[s] * v1[t][k]))
                .sum();
            mu[1 + n + l][1 + k] = val;
            mu[1 + k][1 + n + l] = val;
        }
    }

    let mut energies = vec![0.0];
    energies.extend(&e1);
    energies.extend(&e2);
    let mut labels = vec!["g".to_string()];
    labels.extend((1..=n).map(|k| format!("e{k}")));
    labels.extend((1..=m).map(|l| format!("f{l}")));
    let mut manifolds = vec![0];
    manifolds.extend(std::iter::repeat(1).take(n));
    manifolds.extend(std::iter::repeat(2).take(m));
    ExcitonModel::new(energies, Operator::from_real(&mu)?, labels, Some(manifolds))
}

/// Populations over exciton eigenstates; a state diagonal in the exciton basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMixture {
    populations: Vec<f64>,
}

impl ClassicalMixture {
    pub fn new(populations: Vec<f64>) -> Result<Self> {
        if populations.is_empty() {
            return Err(Error::InvalidParameter {
                name: "populations",
                reason: "empty".into(),
            });
        }
        if populations.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "populations",
                reason: "must be non-negative and finite".into(),
            });
        }
        let total: f64 = populations.iter().sum();
        if (total - 1.0).abs() > DEFAULT_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "populations",
                reason: format!("must sum to 1, got {total}"),
            });
        }
        Ok(Self { populations })
    }

    /// Reads the populations of a state that is diagonal in the exciton basis.
    pub fn from_density(rho: &DensityMatrix, tol: f64) -> Result<Self> {
        let coherence = rho.operator().max_off_diagonal();
        if coherence > tol {
            return Err(Error::InputNotClassical { coherence });
        }
        let pops = rho.populations().iter().map(|p| p.max(0.0)).collect::<Vec<_>>();
        let total: f64 = pops.iter().sum();
        Self::new(pops.iter().map(|p| p / total).collect())
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn dim(&self) -> usize {
        self.populations.len()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::assume_valid(Operator::diagonal(&self.populations), DEFAULT_TOLERANCE)
    }
}

/// Thermal populations `exp(-beta e) / Z` over the exciton levels.
pub fn gibbs_populations(model: &ExcitonModel, beta: f64) -> Result<ClassicalMixture> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("must be non-negative, got {beta}"),
        });
    }
    let e_min = model.energies().iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = model
        .energies()
        .iter()
        .map(|&e| {
            let gap = e - e_min;
            if gap == 0.0 {
                1.0
            } else {
                (-beta * gap).exp()
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    ClassicalMixture::new(weights.iter().map(|w| w / z).collect())
}

pub fn gibbs_state(model: &ExcitonModel, beta: f64) -> Result<DensityMatrix> {
    Ok(gibbs_populations(model, beta)?.to_density())
}

/// Projector onto the exciton eigenstate with the given label.
pub fn eigenstate(model: &ExcitonModel, label: &str) -> Result<DensityMatrix> {
    let index = model.index_of(label)?;
    validate_density(&Operator::projector(model.dim(), index), DEFAULT_TOLERANCE)
}
