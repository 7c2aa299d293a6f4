//! Two-dimensional Fourier transform of response samples over `(t1, t3)`.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use super::ResponseSample;
use crate::error::{Error, Result};

/// Spectrum on ascending angular-frequency axes; `values[[i, j]]` belongs to
/// `(omega1[i], omega3[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2d {
    pub omega1: Vec<f64>,
    pub omega3: Vec<f64>,
    pub values: Array2<C64>,
}

impl Spectrum2d {
    /// Indices and value of the largest-modulus bin.
    pub fn peak(&self) -> (usize, usize, C64) {
        let mut best = (0, 0, C64::new(0.0, 0.0));
        for ((i, j), v) in self.values.indexed_iter() {
            if v.norm() > best.2.norm() {
                best = (i, j, *v);
            }
        }
        best
    }
}

/// Sorted distinct values and their uniform spacing.
fn uniform_axis(mut values: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    values.sort_by(f64::total_cmp);
    values.dedup();
    if values.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "each time axis needs at least two points".into(),
        });
    }
    let step = values[1] - values[0];
    let tol = 1e-9 * step.abs().max(values.last().unwrap().abs());
    if values
        .windows(2)
        .any(|w| ((w[1] - w[0]) - step).abs() > tol)
    {
        return Err(Error::NonUniformGrid);
    }
    Ok((values, step))
}

/// Angular frequencies `2 pi k / (n dt)` for `k = -n/2 .. n - n/2`.
fn frequency_axis(n: usize, dt: f64) -> Vec<f64> {
    let half = n as isize / 2;
    (0..n as isize)
        .map(|k| 2.0 * std::f64::consts::PI * (k - half) as f64 / (n as f64 * dt))
        .collect()
}

/// Index of the FFT bin that lands at position `i` of the shifted axis.
fn unshift(i: usize, n: usize) -> usize {
    (i + n - n / 2) % n
}

/// Discrete approximation of `sum s(t1, t3) exp(-i w1 t1 - i w3 t3) dt1 dt3`.
///
/// Samples must cover a full uniform `(t1, t3)` grid at a single `t2`. A
/// coherence oscillating as `exp(-i w t)` shows up at `-w`.
pub fn spectrum_2d(samples: &[ResponseSample]) -> Result<Spectrum2d> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "empty".into(),
        });
    }
    let t2 = samples[0].t2;
    if samples.iter().any(|s| s.t2 != t2) {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "all samples must share one t2".into(),
        });
    }
    let (t1s, dt1) = uniform_axis(samples.iter().map(|s| s.t1).collect())?;
    let (t3s, dt3) = uniform_axis(samples.iter().map(|s| s.t3).collect())?;
    let (n1, n3) = (t1s.len(), t3s.len());
    if samples.len() != n1 * n3 {
        return Err(Error::NonUniformGrid);
    }
    let locate = |axis: &[f64], step: f64, t: f64| ((t - axis[0]) / step).round() as usize;
    let mut grid = Array2::<C64>::zeros((n1, n3));
    let mut seen = Array2::<bool>::from_elem((n1, n3), false);
    for s in samples {
        let (i, j) = (locate(&t1s, dt1, s.t1), locate(&t3s, dt3, s.t3));
        if seen[[i, j]] {
            return Err(Error::NonUniformGrid);
        }
        seen[[i, j]] = true;
        grid[[i, j]] = s.value;
    }

    let mut planner = FftPlanner::<f64>::new();
    let fft1 = planner.plan_fft_forward(n1);
    let fft3 = planner.plan_fft_forward(n3);
    for mut row in grid.rows_mut() {
        let mut buf = row.to_vec();
        fft3.process(&mut buf);
        row.assign(&ndarray::Array1::from(buf));
    }
    for mut col in grid.columns_mut() {
        let mut buf = col.to_vec();
        fft1.process(&mut buf);
        col.assign(&ndarray::Array1::from(buf));
    }

    let omega1 = frequency_axis(n1, dt1);
    let omega3 = frequency_axis(n3, dt3);
    let scale = dt1 * dt3;
    let values = Array2::from_shape_fn((n1, n3), |(i, j)| {
        // Grids need not start at zero: restore the origin phase.
        let origin = C64::new(0.0, -(omega1[i] * t1s[0] + omega3[j] * t3s[0])).exp();
        grid[[unshift(i, n1), unshift(j, n3)]] * origin * scale
    });
    Ok(Spectrum2d {
        omega1,
        omega3,
        values,
    })
}
