//! Generator-set factories: ancilla extensions by Hermitian operators,
//! cardinality-preserving tensor modifications, QAOA graph families, and
//! the stable-extension (cyclicity) search.

use crate::dense::{sign_unambiguous, square_scalar_check, DenseOperator};
use crate::error::{CoreError, Result};
use crate::numeric::{hermitian_eig, proportional};
use crate::operator::{BackendTag, Operator};
use crate::pauli::{PauliCombination, PauliTerm};
use crate::policy::{TolerancePolicy, ZERO_FLOOR};

/// A validated dynamical generating set.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    qubit_count: u32,
    generators: Vec<Operator>,
    family_tag: String,
}

impl GeneratorSpec {
    /// Validates linear independence, tracelessness and anti-Hermiticity of
    /// every generator on construction.
    pub fn new(
        qubit_count: u32,
        generators: Vec<Operator>,
        family_tag: impl Into<String>,
        policy: &TolerancePolicy,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(CoreError::EmptyGenerators);
        }
        let backend = generators[0].backend();
        let dim = 1usize << qubit_count;
        for g in &generators {
            if g.backend() != backend {
                return Err(CoreError::BackendMismatch);
            }
            if g.space_dim() != dim {
                return Err(CoreError::DimensionMismatch(g.space_dim(), dim));
            }
            g.require_generator()?;
        }
        crate::numeric::OrthoBasis::from_independent(&generators, *policy)?;
        Ok(Self {
            qubit_count,
            generators,
            family_tag: family_tag.into(),
        })
    }

    pub fn qubit_count(&self) -> u32 {
        self.qubit_count
    }

    pub fn generators(&self) -> &[Operator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn family_tag(&self) -> &str {
        &self.family_tag
    }

    pub fn backend(&self) -> BackendTag {
        self.generators[0].backend()
    }
}

fn ancilla_qubits(chi: &DenseOperator) -> Result<u32> {
    let dim = chi.dim();
    if !dim.is_power_of_two() {
        return Err(CoreError::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros())
}

fn distinct_eigenvalue_count(chi: &DenseOperator, policy: &TolerancePolicy) -> Result<usize> {
    Ok(hermitian_eig(chi, policy)?.distinct_count())
}

/// `A'_q = {A_i ⊗ χ^j : i ∈ [L], 0 ≤ j ≤ q-1}` with `χ^0 = I` on the
/// ancilla space. `q = K` is the full direct-power construction; `q = 1`
/// merely embeds the original set on the enlarged space.
pub fn extend_naive(
    spec: &GeneratorSpec,
    chi: &DenseOperator,
    q_powers: usize,
    policy: &TolerancePolicy,
) -> Result<GeneratorSpec> {
    chi.require_hermitian()?;
    let m = ancilla_qubits(chi)?;
    let k = distinct_eigenvalue_count(chi, policy)?;
    if k < 2 {
        return Err(CoreError::InvalidSpectrum(format!(
            "χ has only {k} distinct eigenvalue(s); the construction needs K >= 2"
        )));
    }
    if q_powers == 0 || q_powers > k {
        return Err(CoreError::InvalidSpectrum(format!(
            "q = {q_powers} outside 1..=K = {k}: higher powers of χ are linearly dependent"
        )));
    }
    let mut generators = Vec::with_capacity(q_powers * spec.len());
    for j in 0..q_powers {
        let chi_j = chi.pow(j as u32)?;
        for g in spec.generators() {
            generators.push(g.tensor_with_hermitian(&chi_j)?);
        }
    }
    GeneratorSpec::new(
        spec.qubit_count() + m,
        generators,
        format!("{}+naive(q={q_powers},K={k})", spec.family_tag()),
        policy,
    )
}

/// `A_S = {A_i ⊗ I : i ∈ [L]} ∪ {A_i ⊗ χ : i ∈ S}` for a non-empty subset
/// `S` given as 0-based generator indices.
pub fn extend_subset(
    spec: &GeneratorSpec,
    chi: &DenseOperator,
    subset: &[usize],
    policy: &TolerancePolicy,
) -> Result<GeneratorSpec> {
    if subset.is_empty() {
        return Err(CoreError::InvalidSubset("empty subset".into()));
    }
    let mut indices = subset.to_vec();
    indices.sort_unstable();
    indices.dedup();
    if indices.len() != subset.len() {
        return Err(CoreError::InvalidSubset("duplicate indices".into()));
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= spec.len()) {
        return Err(CoreError::InvalidSubset(format!(
            "index {bad} out of range for {} generators",
            spec.len()
        )));
    }
    chi.require_hermitian()?;
    let m = ancilla_qubits(chi)?;
    let k = distinct_eigenvalue_count(chi, policy)?;
    if k < 2 {
        return Err(CoreError::InvalidSpectrum(
            "χ proportional to the identity makes A_i ⊗ χ dependent".into(),
        ));
    }
    let mut generators = Vec::with_capacity(spec.len() + indices.len());
    for g in spec.generators() {
        generators.push(g.tensor_identity(m)?);
    }
    for &i in &indices {
        generators.push(spec.generators()[i].tensor_with_hermitian(chi)?);
    }
    GeneratorSpec::new(
        spec.qubit_count() + m,
        generators,
        format!("{}+subset({:?},K={k})", spec.family_tag(), indices),
        policy,
    )
}

/// `A_Q = {A_1 ⊗ Q, .., A_L ⊗ Q}` for a sign-unambiguous Hermitian `Q`.
/// Cardinality is preserved. Pass `override_sign_check` for negative
/// testing only.
pub fn tensor_q(
    spec: &GeneratorSpec,
    q_op: &DenseOperator,
    override_sign_check: bool,
    policy: &TolerancePolicy,
) -> Result<GeneratorSpec> {
    if q_op.norm() < ZERO_FLOOR {
        return Err(CoreError::ZeroOperator);
    }
    q_op.require_hermitian()?;
    let m = ancilla_qubits(q_op)?;
    if !override_sign_check && !sign_unambiguous(q_op, policy)? {
        let eig = hermitian_eig(q_op, policy)?;
        let (a, b) = offending_pair(&eig.eigenvalues, policy)
            .unwrap_or((eig.eigenvalues[0], -eig.eigenvalues[0]));
        return Err(CoreError::SignAmbiguous(a, b));
    }
    let mut generators = Vec::with_capacity(spec.len());
    for g in spec.generators() {
        generators.push(g.tensor_with_hermitian(q_op)?);
    }
    GeneratorSpec::new(
        spec.qubit_count() + m,
        generators,
        format!("{}+tensorQ", spec.family_tag()),
        policy,
    )
}

fn offending_pair(eigenvalues: &[f64], policy: &TolerancePolicy) -> Option<(f64, f64)> {
    let radius = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let tol = policy.eig_group_threshold * radius;
    for (i, &a) in eigenvalues.iter().enumerate() {
        for &b in &eigenvalues[i + 1..] {
            if a.abs() > tol && b.abs() > tol && (a + b).abs() < tol {
                return Some((a, b));
            }
        }
    }
    None
}

/// Simple undirected graph with 1-indexed vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    pub vertices: u32,
    pub edges: Vec<(u32, u32)>,
}

impl Graph {
    pub fn new(vertices: u32, edges: Vec<(u32, u32)>) -> Result<Self> {
        if vertices < 2 {
            return Err(CoreError::InvalidGraph(format!(
                "need at least 2 vertices, got {vertices}"
            )));
        }
        if edges.is_empty() {
            return Err(CoreError::InvalidGraph(
                "empty edge set: the coupling generator would vanish".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(u, v) in &edges {
            if u == 0 || v == 0 || u > vertices || v > vertices {
                return Err(CoreError::InvalidGraph(format!(
                    "edge ({u},{v}) outside 1..={vertices}"
                )));
            }
            if u == v {
                return Err(CoreError::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(CoreError::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn cycle(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(CoreError::InvalidGraph("cycle needs >= 3 vertices".into()));
        }
        let edges = (1..=n).map(|v| (v, v % n + 1)).collect();
        Self::new(n, edges)
    }

    pub fn complete(n: u32) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in (u + 1)..=n {
                edges.push((u, v));
            }
        }
        Self::new(n, edges)
    }

    pub fn path(n: u32) -> Result<Self> {
        let edges = (1..n).map(|v| (v, v + 1)).collect();
        Self::new(n, edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaoaFamily {
    MaxCut,
    SnEquivariant,
}

fn vertex_sum(n: u32, letter: char) -> Result<PauliCombination> {
    let mut c = PauliCombination::zero(n);
    for j in 0..n {
        let s: String = (0..n).map(|k| if k == j { letter } else { 'I' }).collect();
        c.add_term(s.parse::<PauliTerm>()?, 1.0);
    }
    Ok(c)
}

fn edge_sum(graph: &Graph) -> Result<PauliCombination> {
    let n = graph.vertices;
    let mut c = PauliCombination::zero(n);
    for &(u, v) in &graph.edges {
        let s: String = (1..=n)
            .map(|k| if k == u || k == v { 'Z' } else { 'I' })
            .collect();
        c.add_term(s.parse::<PauliTerm>()?, 1.0);
    }
    Ok(c)
}

/// QAOA generator families: `M_G = {Σ iX_j, Σ iZ_jZ_k}` over the graph's
/// edges, and `S_G` which adds `Σ iY_j`.
pub fn qaoa_generators(
    graph: &Graph,
    family: QaoaFamily,
    policy: &TolerancePolicy,
) -> Result<GeneratorSpec> {
    let n = graph.vertices;
    let transverse = Operator::Pauli(vertex_sum(n, 'X')?);
    let coupling = Operator::Pauli(edge_sum(graph)?);
    let (generators, tag) = match family {
        QaoaFamily::MaxCut => (vec![transverse, coupling], "maxcut"),
        QaoaFamily::SnEquivariant => (
            vec![transverse, Operator::Pauli(vertex_sum(n, 'Y')?), coupling],
            "sn-equivariant",
        ),
    };
    GeneratorSpec::new(
        n,
        generators,
        format!("{tag}(n={n},|E|={})", graph.edges.len()),
        policy,
    )
}

/// A found stable extension for one noncommuting pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableExtension {
    /// Appended generator indices, in application order.
    pub extension: Vec<usize>,
    pub length: usize,
}

/// Outcome of the cyclicity search. Absence of an extension within the
/// search cap is inconclusive, never a negative classification.
#[derive(Debug, Clone)]
pub struct CyclicityReport {
    pub noncommuting_pairs: Vec<(usize, usize)>,
    /// Parallel to `noncommuting_pairs`; `None` marks an inconclusive pair.
    pub extensions: Vec<Option<StableExtension>>,
    /// `lcm` of the found extension lengths; absent when any pair is
    /// inconclusive or the condition is vacuous.
    pub common_cycle_length: Option<u64>,
    pub search_depth_cap: usize,
}

impl CyclicityReport {
    /// All noncommuting pairs found a stable extension.
    pub fn conclusive_cyclic(&self) -> bool {
        !self.extensions.is_empty() && self.extensions.iter().all(Option::is_some)
    }

    /// No noncommuting pairs: the cyclicity condition holds vacuously.
    pub fn vacuously_cyclic(&self) -> bool {
        self.noncommuting_pairs.is_empty()
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    a / gcd(a, b) * b
}

/// Breadth-first search for stable extensions of every noncommuting pair
/// `(A_i, A_j)`: sequences are enumerated shortest first, lexicographically
/// by generator index, and tested for `val(start ∘ ext) ∝ val(start)`.
pub fn detect_cyclic(
    spec: &GeneratorSpec,
    max_extension_length: usize,
    policy: &TolerancePolicy,
) -> Result<CyclicityReport> {
    let gens = spec.generators();
    let mut pairs = Vec::new();
    let mut bases = Vec::new();
    for i in 0..gens.len() {
        for j in (i + 1)..gens.len() {
            // val((A_i, A_j)) = [A_j, A_i].
            let base = gens[j].commutator(&gens[i])?;
            if base.norm() > ZERO_FLOOR * gens[i].norm().max(1.0) * gens[j].norm().max(1.0) {
                pairs.push((i, j));
                bases.push(base);
            }
        }
    }

    let mut extensions: Vec<Option<StableExtension>> = vec![None; pairs.len()];
    for (p, base) in bases.iter().enumerate() {
        let scale = 1.0 / base.norm();
        let mut layer: Vec<(Operator, Vec<usize>)> = vec![(base.scale(scale), Vec::new())];
        'depth: for _length in 1..=max_extension_length {
            let mut next = Vec::with_capacity(layer.len() * gens.len());
            for (value, seq) in &layer {
                for (k, g) in gens.iter().enumerate() {
                    let extended = g.commutator(value)?;
                    if extended.norm() < ZERO_FLOOR {
                        continue;
                    }
                    let mut eseq = seq.clone();
                    eseq.push(k);
                    if proportional(&extended, base, policy)? {
                        extensions[p] = Some(StableExtension {
                            length: eseq.len(),
                            extension: eseq,
                        });
                        break 'depth;
                    }
                    let n = extended.norm();
                    next.push((extended.scale(1.0 / n), eseq));
                }
            }
            if next.is_empty() {
                break;
            }
            layer = next;
        }
    }

    let common_cycle_length = if !pairs.is_empty() && extensions.iter().all(Option::is_some) {
        Some(
            extensions
                .iter()
                .map(|e| e.as_ref().unwrap().length as u64)
                .fold(1u64, lcm),
        )
    } else {
        None
    };
    Ok(CyclicityReport {
        noncommuting_pairs: pairs,
        extensions,
        common_cycle_length,
        search_depth_cap: max_extension_length,
    })
}

/// Scalar square test dispatching on the backend. A single Pauli term
/// squares to `-(coeff)^2 I` exactly; anything else goes through the dense
/// oracle.
pub fn square_scalar(op: &Operator) -> Result<Option<f64>> {
    match op {
        Operator::Pauli(c) => {
            if let Some((_, coeff)) = c.as_single_term() {
                Ok(Some(-(coeff * coeff)))
            } else {
                square_scalar_check(&c.to_dense()?)
            }
        }
        Operator::Dense(m) => square_scalar_check(m),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourLambdaCheck {
    pub holds: bool,
    pub lambda: f64,
    pub relative_residual: f64,
}

/// Verify `[A,[A,[A,B]]] = 4 λ_A [A,B]` for an `A` with scalar square
/// `A² = λ_A I`, `λ_A < 0`. Vacuously true when `[A,B] = 0`. The residual
/// is compared against the policy's proportionality threshold.
pub fn verify_4lambda_identity(
    a: &Operator,
    b: &Operator,
    policy: &TolerancePolicy,
) -> Result<FourLambdaCheck> {
    let lambda = match square_scalar(a)? {
        Some(l) => l,
        None => return Err(CoreError::SquareNotScalar),
    };
    if lambda >= 0.0 {
        return Err(CoreError::HypothesisViolated(format!(
            "square scalar λ = {lambda} is not negative"
        )));
    }
    let ab = a.commutator(b)?;
    let ab_norm = ab.norm();
    if ab_norm < ZERO_FLOOR {
        return Ok(FourLambdaCheck {
            holds: true,
            lambda,
            relative_residual: 0.0,
        });
    }
    let mut triple = a.commutator(&a.commutator(&ab)?)?;
    triple.add_scaled(-4.0 * lambda, &ab)?;
    let relative_residual = triple.norm() / ab_norm;
    Ok(FourLambdaCheck {
        holds: relative_residual < policy.proportionality_threshold.max(1e-14),
        lambda,
        relative_residual,
    })
}
