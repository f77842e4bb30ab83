//! Dynamical Lie algebra toolkit: compute Lie closures of generator sets,
//! split them into commutator subalgebra and center, apply generator-set
//! modifications, and numerically certify the resulting direct-power
//! structure.

pub mod closure;
pub mod constructions;
pub mod dense;
pub mod error;
pub mod io;
pub mod numeric;
pub mod operator;
pub mod pauli;
pub mod policy;
pub mod rewrite;
pub mod sweeps;
pub mod verify;

pub use closure::{analyze, ClosureAnalysis, ClosureCaps, ClosureReport, LieBasis, Provenance};
pub use constructions::{
    detect_cyclic, extend_naive, extend_subset, qaoa_generators, tensor_q, CyclicityReport,
    GeneratorSpec, Graph, QaoaFamily,
};
pub use dense::{DenseOperator, SpectrumStyle};
pub use error::{CoreError, Result};
pub use numeric::{ExtendOutcome, OrthoBasis, PowerSpanReport, SpectralDecomposition};
pub use operator::{BackendTag, Operator};
pub use pauli::{PauliCombination, PauliTerm};
pub use policy::TolerancePolicy;
pub use rewrite::{right_nested_rewrite, CommutatorTree};
pub use verify::{
    projector_containment_check, verify_direct_power, verify_theorem, DirectPowerEvidence,
    TheoremAux, TheoremId, TheoremVerdict,
};
