//! Backend-agnostic operator values.
//!
//! Generator sets and closure bases hold either exact symbolic Pauli
//! combinations or dense complex matrices; the two sides never mix inside
//! one computation except through an explicit `to_dense` bridge.

use crate::dense::{dense_commutator, dense_tensor, DenseOperator};
use crate::error::{CoreError, Result};
use crate::pauli::{combination_commutator, PauliCombination};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendTag {
    Symbolic,
    Dense,
}

impl std::fmt::Display for BackendTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BackendTag::Symbolic => write!(f, "symbolic"),
            BackendTag::Dense => write!(f, "dense"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Pauli(PauliCombination),
    Dense(DenseOperator),
}

impl From<PauliCombination> for Operator {
    fn from(c: PauliCombination) -> Self {
        Operator::Pauli(c)
    }
}

impl From<DenseOperator> for Operator {
    fn from(m: DenseOperator) -> Self {
        Operator::Dense(m)
    }
}

impl Operator {
    pub fn backend(&self) -> BackendTag {
        match self {
            Operator::Pauli(_) => BackendTag::Symbolic,
            Operator::Dense(_) => BackendTag::Dense,
        }
    }

    /// Hilbert-space dimension the operator acts on.
    pub fn space_dim(&self) -> usize {
        match self {
            Operator::Pauli(c) => 1usize << c.qubit_count(),
            Operator::Dense(m) => m.dim(),
        }
    }

    pub fn as_pauli(&self) -> Option<&PauliCombination> {
        match self {
            Operator::Pauli(c) => Some(c),
            Operator::Dense(_) => None,
        }
    }

    pub fn as_dense(&self) -> Option<&DenseOperator> {
        match self {
            Operator::Dense(m) => Some(m),
            Operator::Pauli(_) => None,
        }
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        match (self, other) {
            (Operator::Pauli(a), Operator::Pauli(b)) => {
                Ok(Operator::Pauli(combination_commutator(a, b)?))
            }
            (Operator::Dense(a), Operator::Dense(b)) => {
                Ok(Operator::Dense(dense_commutator(a, b)?))
            }
            _ => Err(CoreError::BackendMismatch),
        }
    }

    pub fn hs_inner(&self, other: &Operator) -> Result<f64> {
        match (self, other) {
            (Operator::Pauli(a), Operator::Pauli(b)) => a.hs_inner(b),
            (Operator::Dense(a), Operator::Dense(b)) => a.hs_inner(b),
            _ => Err(CoreError::BackendMismatch),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Operator::Pauli(c) => c.norm(),
            Operator::Dense(m) => m.norm(),
        }
    }

    pub fn scale(&self, c: f64) -> Operator {
        match self {
            Operator::Pauli(a) => Operator::Pauli(a.scale(c)),
            Operator::Dense(m) => Operator::Dense(m.scale_real(c)),
        }
    }

    pub fn add_scaled(&mut self, c: f64, other: &Operator) -> Result<()> {
        match (self, other) {
            (Operator::Pauli(a), Operator::Pauli(b)) => a.add_scaled(c, b),
            (Operator::Dense(a), Operator::Dense(b)) => {
                if a.dim() != b.dim() {
                    return Err(CoreError::DimensionMismatch(a.dim(), b.dim()));
                }
                a.add_scaled_real(c, b);
                Ok(())
            }
            _ => Err(CoreError::BackendMismatch),
        }
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        match self {
            Operator::Pauli(c) => c.to_dense(),
            Operator::Dense(m) => Ok(m.clone()),
        }
    }

    /// Tensor with a Hermitian operator appended after this operator's
    /// factors; symbolic operands stay symbolic through a Pauli-basis
    /// expansion of `h`.
    pub fn tensor_with_hermitian(&self, h: &DenseOperator) -> Result<Operator> {
        match self {
            Operator::Pauli(c) => Ok(Operator::Pauli(c.tensor_with_hermitian(h)?)),
            Operator::Dense(m) => {
                h.require_hermitian()?;
                Ok(Operator::Dense(dense_tensor(m, h)))
            }
        }
    }

    /// Tensor with the identity on `added_qubits` extra qubits.
    pub fn tensor_identity(&self, added_qubits: u32) -> Result<Operator> {
        let dim = 1usize << added_qubits;
        self.tensor_with_hermitian(&DenseOperator::identity(dim))
    }

    /// Validate the dynamical-generator contract: traceless, anti-Hermitian,
    /// and non-zero.
    pub fn require_generator(&self) -> Result<()> {
        match self {
            Operator::Pauli(c) => {
                if c.is_zero() {
                    return Err(CoreError::ZeroOperator);
                }
                let id = c.identity_coefficient();
                if id.abs() > 1e-12 * c.norm().max(1.0) {
                    return Err(CoreError::NotTraceless(
                        id.abs() * (c.qubit_count() as f64).exp2(),
                    ));
                }
                Ok(())
            }
            Operator::Dense(m) => {
                if m.norm() < crate::policy::ZERO_FLOOR {
                    return Err(CoreError::ZeroOperator);
                }
                m.require_anti_hermitian()?;
                m.require_traceless()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliTerm;

    fn ix() -> Operator {
        Operator::Pauli(PauliCombination::single("X".parse::<PauliTerm>().unwrap(), 1.0))
    }

    #[test]
    fn mixed_backends_are_rejected() {
        let dense = Operator::Dense(crate::dense::random_anti_hermitian(2, 1));
        assert!(matches!(ix().commutator(&dense), Err(CoreError::BackendMismatch)));
        assert!(matches!(ix().hs_inner(&dense), Err(CoreError::BackendMismatch)));
    }

    #[test]
    fn symbolic_and_dense_inner_products_agree() {
        let a = ix();
        let d = Operator::Dense(a.to_dense().unwrap());
        assert!((a.hs_inner(&a).unwrap() - d.hs_inner(&d).unwrap()).abs() < 1e-12);
        assert_eq!(a.hs_inner(&a).unwrap(), 2.0);
    }

    #[test]
    fn generator_validation() {
        assert!(ix().require_generator().is_ok());
        let id = Operator::Pauli(PauliCombination::single(PauliTerm::identity(1), 1.0));
        assert!(matches!(id.require_generator(), Err(CoreError::NotTraceless(_))));
        let zero = Operator::Pauli(PauliCombination::zero(1));
        assert!(matches!(zero.require_generator(), Err(CoreError::ZeroOperator)));
    }
}
