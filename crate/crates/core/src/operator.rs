//! Dense complex operators on small Hilbert spaces and validated quantum states.
//!
//! Everything here is an immutable value: every operation allocates and
//! returns a new operator. Dimensions are tiny (at most a few dozen), so no
//! attempt is made to avoid those allocations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{Array2, Zip};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Default tolerance for Hermiticity, trace and positivity checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Square complex matrix with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    entries: Array2<C64>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim(), self.dim())?;
        for row in self.entries.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:+.4e}{:+.4e}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

impl Operator {
    pub fn new(entries: Array2<C64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { entries })
    }

    /// Internal constructor for results of arithmetic on valid operators.
    pub(crate) fn from_array(entries: Array2<C64>) -> Self {
        debug_assert_eq!(entries.nrows(), entries.ncols());
        Self { entries }
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        Self::new(Array2::from_shape_fn((n, n), |(i, j)| C64::new(rows[i][j], 0.0)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_array(Array2::zeros((dim, dim)))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_array(Array2::from_diag_elem(dim, C64::new(1.0, 0.0)))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_array(Array2::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    /// `|row><col|` in a `dim`-dimensional space.
    pub fn ket_bra(dim: usize, row: usize, col: usize) -> Self {
        let mut entries = Array2::zeros((dim, dim));
        entries[[row, col]] = C64::new(1.0, 0.0);
        Self::from_array(entries)
    }

    pub fn projector(dim: usize, index: usize) -> Self {
        Self::ket_bra(dim, index, index)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[[row, col]]
    }

    pub fn trace(&self) -> C64 {
        self.entries.diag().sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_array(self.entries.t().mapv(|z| z.conj()))
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_array(self.entries.mapv(|z| z * factor))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self::from_array(self.entries.dot(&other.entries)))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        let ab = self.entries.dot(&other.entries);
        let ba = other.entries.dot(&self.entries);
        Ok(Self::from_array(ab - ba))
    }

    /// Element-wise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self::from_array(&self.entries * &other.entries))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry of `|a - a^dag|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        Zip::from(&self.entries)
            .and(&self.entries.t())
            .for_each(|a, b| worst = worst.max((a - b.conj()).norm()));
        worst
    }

    /// Largest off-diagonal entry modulus.
    pub fn max_off_diagonal(&self) -> f64 {
        self.entries
            .indexed_iter()
            .filter(|((i, j), _)| i != j)
            .fold(0.0, |m, (_, z)| m.max(z.norm()))
    }

    pub fn diagonal_values(&self) -> Vec<C64> {
        self.entries.diag().to_vec()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

fn check_dims(a: &Operator, b: &Operator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `ab - ba`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.commutator(b)
}

/// `tr(obs * rho)`.
pub fn expectation(obs: &Operator, rho: &Operator) -> Result<C64> {
    check_dims(obs, rho)?;
    // tr(AB) = sum_ij A_ij B_ji, no need to form the product.
    let mut acc = C64::new(0.0, 0.0);
    Zip::from(obs.entries())
        .and(&rho.entries().t())
        .for_each(|a, b| acc += a * b);
    Ok(acc)
}

pub fn adjoint(a: &Operator) -> Operator {
    a.adjoint()
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn add(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator::from_array(&self.entries + &rhs.entries)
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn sub(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator::from_array(&self.entries - &rhs.entries)
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;

    fn mul(self, rhs: &'a Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator::from_array(self.entries.dot(&rhs.entries))
    }
}

impl Neg for &Operator {
    type Output = Operator;

    fn neg(self) -> Operator {
        Operator::from_array(self.entries.mapv(|z| -z))
    }
}

/// Hermitian, unit-trace, positive semidefinite state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
    tolerance: f64,
}

impl DensityMatrix {
    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Populations (real diagonal) in the stored basis.
    pub fn populations(&self) -> Vec<f64> {
        self.op.diagonal_values().iter().map(|z| z.re).collect()
    }

    /// Skips validation; callers guarantee the state properties hold.
    pub(crate) fn assume_valid(op: Operator, tolerance: f64) -> Self {
        Self { op, tolerance }
    }
}

/// Checks Hermiticity, unit trace and positivity, in that order.
pub fn validate_density(rho: &Operator, tol: f64) -> Result<DensityMatrix> {
    let deviation = rho.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let trace = rho.trace();
    if (trace - C64::new(1.0, 0.0)).norm() > tol {
        return Err(Error::TraceNotOne { trace: trace.re });
    }
    let (eigenvalues, _) = linalg::hermitian_eigen(rho);
    let min_eigenvalue = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -tol {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix {
        op: rho.clone(),
        tolerance: tol,
    })
}

/// Perturbative intermediate: an arbitrary finite operator in Liouville space.
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleVector {
    op: Operator,
}

impl LiouvilleVector {
    pub fn new(op: Operator) -> Self {
        Self { op }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

impl From<DensityMatrix> for LiouvilleVector {
    fn from(rho: DensityMatrix) -> Self {
        Self { op: rho.op }
    }
}

impl From<&DensityMatrix> for LiouvilleVector {
    fn from(rho: &DensityMatrix) -> Self {
        Self {
            op: rho.op.clone(),
        }
    }
}
