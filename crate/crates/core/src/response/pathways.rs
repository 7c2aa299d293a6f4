//! Expansion of nested commutators into Liouville-space pathways.
//!
//! Each vertex `-i [mu, x]` splits into a ket-side term `-i mu x` and a
//! bra-side term `+i x mu`, and `mu` splits into its raising and lowering
//! parts. A raising component (absorption on the ket, emission on the bra)
//! pairs with the `+k` field component and a lowering component with `-k`,
//! so the phase signature of a term is simply its component sequence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ExcitonModel;
use crate::operator::Operator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Signs `(s1, .., sn)` selecting the `k_s = s1 k1 + .. + sn kn` component.
///
/// Written as a string of `+`/`-` characters, e.g. `"-++"` for the rephasing
/// component `-k1 + k2 + k3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SignPattern(Vec<Sign>);

impl SignPattern {
    pub fn new(signs: Vec<Sign>) -> Result<Self> {
        if signs.is_empty() || signs.len() > 3 {
            return Err(Error::InvalidOrder(signs.len()));
        }
        Ok(Self(signs))
    }

    pub fn rephasing() -> Self {
        Self(vec![Sign::Minus, Sign::Plus, Sign::Plus])
    }

    pub fn non_rephasing() -> Self {
        Self(vec![Sign::Plus, Sign::Minus, Sign::Plus])
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// All `2^n` patterns of a given order.
    pub fn all(order: usize) -> Result<Vec<Self>> {
        check_order(order)?;
        Ok((0..1usize << order)
            .map(|bits| {
                Self(
                    (0..order)
                        .map(|k| {
                            if bits >> (order - 1 - k) & 1 == 1 {
                                Sign::Plus
                            } else {
                                Sign::Minus
                            }
                        })
                        .collect(),
                )
            })
            .collect())
    }

    /// Keeps only the listed slots, in order.
    pub fn restrict(&self, slots: &[usize]) -> Result<Self> {
        Self::new(slots.iter().map(|&k| self.0[k]).collect())
    }

    pub(crate) fn check_arity(&self, order: usize) -> Result<()> {
        if self.order() != order {
            return Err(Error::PatternArity {
                expected: order,
                found: self.order(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(Error::InvalidParameter {
                    name: "pattern",
                    reason: format!("unexpected character `{other}`, use `+` or `-`"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(signs)
    }
}

impl TryFrom<String> for SignPattern {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<SignPattern> for String {
    fn from(p: SignPattern) -> String {
        p.to_string()
    }
}

/// Which side of the density matrix an interaction acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Ket,
    Bra,
}

/// One summand of the expanded nested commutators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathwayTerm {
    pub sides: Vec<Side>,
    pub components: Vec<Sign>,
}

impl PathwayTerm {
    pub fn order(&self) -> usize {
        self.sides.len()
    }

    /// `(-1)^(number of bra-side interactions)`.
    pub fn sign(&self) -> i8 {
        if self.sides.iter().filter(|s| **s == Side::Bra).count() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn phase_signature(&self) -> SignPattern {
        SignPattern(self.components.clone())
    }
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidOrder(order));
    }
    Ok(())
}

/// The `2^n` ket/bra side sequences of an order-`n` nested commutator.
pub fn side_terms(order: usize) -> Result<Vec<Vec<Side>>> {
    check_order(order)?;
    Ok((0..1usize << order)
        .map(|bits| {
            (0..order)
                .map(|k| {
                    if bits >> (order - 1 - k) & 1 == 1 {
                        Side::Bra
                    } else {
                        Side::Ket
                    }
                })
                .collect()
        })
        .collect())
}

/// Every side sequence combined with every raising/lowering split (`4^n`
/// terms). Summing all of them reproduces the full response.
pub fn enumerate_pathways(order: usize) -> Result<Vec<PathwayTerm>> {
    let sides = side_terms(order)?;
    let patterns = SignPattern::all(order)?;
    Ok(sides
        .iter()
        .flat_map(|s| {
            patterns.iter().map(move |p| PathwayTerm {
                sides: s.clone(),
                components: p.0.clone(),
            })
        })
        .collect())
}

type Support = Vec<Vec<bool>>;

fn support_of(op: &Operator) -> Support {
    let n = op.dim();
    (0..n)
        .map(|i| (0..n).map(|j| op.get(i, j).norm() > 0.0).collect())
        .collect()
}

fn act_on_support(x: &Support, component: &Support, side: Side) -> Support {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match side {
                    Side::Ket => (0..n).any(|k| component[i][k] && x[k][j]),
                    Side::Bra => (0..n).any(|k| x[i][k] && component[k][j]),
                })
                .collect()
        })
        .collect()
}

/// Pathways that are not identically zero for this model and input state.
///
/// Terms are dropped when the raising/lowering sequence leaves the reachable
/// matrix elements, or when the final element has no dipole partner in the
/// trace. Free evolution never changes which elements are non-zero.
pub fn surviving_pathways(
    order: usize,
    model: &ExcitonModel,
    rho_in: &Operator,
) -> Result<Vec<PathwayTerm>> {
    if rho_in.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            left: model.dim(),
            right: rho_in.dim(),
        });
    }
    let raising = support_of(model.mu_raising());
    let lowering = support_of(model.mu_lowering());
    let mu = support_of(model.mu());
    let start = support_of(rho_in);
    let n = model.dim();
    Ok(enumerate_pathways(order)?
        .into_iter()
        .filter(|term| {
            let mut x = start.clone();
            for (side, comp) in term.sides.iter().zip(&term.components) {
                let c = match comp {
                    Sign::Plus => &raising,
                    Sign::Minus => &lowering,
                };
                x = act_on_support(&x, c, *side);
            }
            (0..n).any(|i| (0..n).any(|j| x[i][j] && mu[j][i]))
        })
        .collect())
}
