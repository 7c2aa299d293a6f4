//! Perturbative response functions, phase-matched components, polarizations
//! and 2D spectra.
//!
//! Response functions are built by sequential construction: an interaction
//! vertex `-i [mu, .]`, damped free propagation over the following delay,
//! and so on, closed by `tr(mu .)`. This is the Heisenberg-picture nested
//! commutator generalized to dissipative evolution. Each vertex carries the
//! prefactor `-i` (hbar = 1); only moduli enter the witness quantities.

mod pathways;
mod polarization;
mod spectrum;

pub use pathways::{
    enumerate_pathways, side_terms, surviving_pathways, PathwayTerm, Side, Sign, SignPattern,
};
pub use polarization::{
    polarization_convolved, polarization_convolved_from, polarization_impulsive,
    QUADRATURE_TOLERANCE,
};
pub use spectrum::{spectrum_2d, Spectrum2d};

pub(crate) use polarization::{polarization_convolved_op, polarization_impulsive_op};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{propagate_with, propagation_factors, DephasingModel};
use crate::error::{Error, Result};
use crate::model::ExcitonModel;
use crate::operator::{expectation, DensityMatrix, Operator};

use pathways::check_order;

const I: C64 = C64::new(0.0, 1.0);

/// Complex response or polarization value at a delay tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseSample {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub value: C64,
}

/// What a single interaction vertex does.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Vertex {
    /// Full commutator with `mu`.
    Full,
    /// Commutator with the raising (`+`) or lowering (`-`) part of `mu`.
    Component(Sign),
    /// One side of the commutator with one component.
    Term(Side, Sign),
}

fn component(model: &ExcitonModel, sign: Sign) -> &Operator {
    match sign {
        Sign::Plus => model.mu_raising(),
        Sign::Minus => model.mu_lowering(),
    }
}

pub(crate) fn apply_vertex(x: &Operator, vertex: Vertex, model: &ExcitonModel) -> Operator {
    match vertex {
        Vertex::Full => (&(model.mu() * x) - &(x * model.mu())).scale(-I),
        Vertex::Component(s) => {
            let c = component(model, s);
            (&(c * x) - &(x * c)).scale(-I)
        }
        Vertex::Term(Side::Ket, s) => (component(model, s) * x).scale(-I),
        Vertex::Term(Side::Bra, s) => (x * component(model, s)).scale(I),
    }
}

pub(crate) fn check_inputs(
    delays: &[f64],
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &Operator,
) -> Result<()> {
    check_order(delays.len())?;
    if let Some(&t) = delays.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::NegativeTime(t));
    }
    for dim in [noise.dim(), rho_in.dim()] {
        if dim != model.dim() {
            return Err(Error::DimensionMismatch {
                left: model.dim(),
                right: dim,
            });
        }
    }
    Ok(())
}

/// Vertex, propagate, vertex, propagate, ..., then `tr(mu .)`.
pub(crate) fn evaluate_chain(
    rho_in: &Operator,
    vertices: &[Vertex],
    delays: &[f64],
    model: &ExcitonModel,
    noise: &DephasingModel,
) -> C64 {
    let mut x = rho_in.clone();
    for (&vertex, &dt) in vertices.iter().zip(delays) {
        x = apply_vertex(&x, vertex, model);
        x = propagate_with(&x, &propagation_factors(model, noise, dt));
    }
    expectation(model.mu(), &x).expect("dimensions checked by caller")
}

/// Full order-`n` response `S(t1, .., tn)` for `delays = [t1, .., tn]`.
pub fn response_function(
    delays: &[f64],
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &DensityMatrix,
) -> Result<C64> {
    response_function_op(delays, model, noise, rho_in.operator())
}

pub(crate) fn response_function_op(
    delays: &[f64],
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &Operator,
) -> Result<C64> {
    check_inputs(delays, model, noise, rho_in)?;
    let vertices = vec![Vertex::Full; delays.len()];
    Ok(evaluate_chain(rho_in, &vertices, delays, model, noise))
}

/// Sum of the pathway terms whose phase signature equals `pattern`.
///
/// Because the signature of a term is its raising/lowering sequence, this
/// equals a single chain in which vertex `k` uses only the `pattern[k]` part
/// of `mu`.
pub fn select_phase_matched(
    pattern: &SignPattern,
    delays: &[f64],
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &DensityMatrix,
) -> Result<C64> {
    select_phase_matched_op(pattern, delays, model, noise, rho_in.operator())
}

pub(crate) fn select_phase_matched_op(
    pattern: &SignPattern,
    delays: &[f64],
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &Operator,
) -> Result<C64> {
    check_inputs(delays, model, noise, rho_in)?;
    pattern.check_arity(delays.len())?;
    let vertices: Vec<Vertex> = pattern.signs().iter().map(|&s| Vertex::Component(s)).collect();
    Ok(evaluate_chain(rho_in, &vertices, delays, model, noise))
}

/// Contribution of one pathway term.
pub fn pathway_contribution(
    term: &PathwayTerm,
    delays: &[f64],
    model: &ExcitonModel,
    noise: &DephasingModel,
    rho_in: &DensityMatrix,
) -> Result<C64> {
    check_inputs(delays, model, noise, rho_in.operator())?;
    if term.order() != delays.len() {
        return Err(Error::PatternArity {
            expected: delays.len(),
            found: term.order(),
        });
    }
    let vertices: Vec<Vertex> = term
        .sides
        .iter()
        .zip(&term.components)
        .map(|(&side, &sign)| Vertex::Term(side, sign))
        .collect();
    Ok(evaluate_chain(rho_in.operator(), &vertices, delays, model, noise))
}
