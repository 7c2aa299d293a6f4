//! Perturbative nonlinear optical response of small exciton systems and an
//! invasiveness witness built from phase-matched polarizations.
//!
//! Units have `hbar = 1`; energies are angular frequencies. States and
//! operators are dense matrices in the exciton (energy eigen) basis.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod operator;
pub mod par;
pub mod pulse;
pub mod response;
pub mod scan;
pub mod witness;

pub use error::{Error, Result};
pub use num_complex::Complex64;
