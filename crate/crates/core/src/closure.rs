//! Lie closure computation and reductive decomposition.
//!
//! `lie_closure` runs the right-nested frontier schedule: each round
//! commutates every generator against the operators discovered in the
//! previous round, so every provenance record is a right-nested generator
//! sequence by construction. `all_pairs_closure_oracle` is the deliberately
//! wasteful cross-check that commutates all pairs of current basis elements.
//!
//! Alongside the orthonormal basis, the engine keeps two parallel records:
//!
//! * witnesses: the raw (normalized) values of the right-nested commutators
//!   that extended the basis, which is what later rounds commutate against;
//! * a commutator-subalgebra accumulator fed with *every* evaluated proper
//!   candidate, accepted or not. Rejected candidates matter: for
//!   `{iX, iY, iZ}` every round-two bracket is rejected as dependent, yet
//!   their span is the whole commutator subalgebra.

use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::numeric::{ExtendOutcome, OrthoBasis};
use crate::operator::{BackendTag, Operator};
use crate::policy::{TolerancePolicy, ZERO_FLOOR};

/// Where a basis element came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Orthonormalized while seeding generator `index`.
    Generator(usize),
    /// Right-nested generator sequence, innermost first:
    /// `[k1, .., kl]` stands for `[A_kl, [.., [A_k2, A_k1]..]]`.
    Sequence(Vec<usize>),
    /// Oracle bookkeeping: bracket of two earlier basis positions.
    Bracket(usize, usize),
    /// Solved for as a span combination (center elements, intersections).
    Combination,
}

impl Provenance {
    pub fn is_proper_sequence(&self) -> bool {
        matches!(self, Provenance::Sequence(s) if s.len() >= 2)
    }
}

/// Orthonormal basis of a computed algebra (or subspace of one), with
/// per-element provenance.
#[derive(Debug, Clone)]
pub struct LieBasis {
    elements: Vec<Operator>,
    provenance: Vec<Provenance>,
    backend: BackendTag,
    capped: bool,
    policy: TolerancePolicy,
    gg_elements: Vec<Operator>,
    gg_provenance: Vec<Provenance>,
}

impl LieBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn backend(&self) -> BackendTag {
        self.backend
    }

    pub fn capped(&self) -> bool {
        self.capped
    }

    pub fn policy(&self) -> &TolerancePolicy {
        &self.policy
    }

    /// Orthonormal view usable for span queries.
    pub fn as_ortho(&self) -> OrthoBasis {
        let mut basis = OrthoBasis::new(self.policy);
        for e in &self.elements {
            basis
                .extend(e)
                .expect("re-seeding an orthonormal basis cannot fail");
        }
        basis
    }

    /// Relative residual of `op` against this basis's span.
    pub fn relative_residual(&self, op: &Operator) -> Result<f64> {
        self.as_ortho().relative_residual(op)
    }

    pub fn spans(&self, op: &Operator) -> Result<bool> {
        Ok(self.relative_residual(op)? <= self.policy.rank_threshold)
    }

    fn from_parts(
        elements: Vec<Operator>,
        provenance: Vec<Provenance>,
        backend: BackendTag,
        policy: TolerancePolicy,
    ) -> Self {
        Self {
            elements,
            provenance,
            backend,
            capped: false,
            policy,
            gg_elements: Vec::new(),
            gg_provenance: Vec::new(),
        }
    }
}

/// Growth caps for the closure loop. `max_dim = None` means the ambient
/// bound `4^n - 1` (`d^2 - 1` for dense operators on dimension `d`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosureCaps {
    pub max_dim: Option<usize>,
    pub max_rounds: usize,
}

impl Default for ClosureCaps {
    fn default() -> Self {
        Self {
            max_dim: None,
            max_rounds: 64,
        }
    }
}

fn ambient_dim(op: &Operator) -> usize {
    let d = op.space_dim();
    d * d - 1
}

fn validate_generators(generators: &[Operator]) -> Result<BackendTag> {
    if generators.is_empty() {
        return Err(CoreError::EmptyGenerators);
    }
    let backend = generators[0].backend();
    let dim = generators[0].space_dim();
    for g in generators {
        if g.backend() != backend {
            return Err(CoreError::BackendMismatch);
        }
        if g.space_dim() != dim {
            return Err(CoreError::DimensionMismatch(g.space_dim(), dim));
        }
        g.require_generator()?;
    }
    Ok(backend)
}

/// Compute the Lie closure of a generator set by the right-nested frontier
/// schedule. Deterministic for a fixed input order: candidates within a
/// round are evaluated in (generator index, frontier index) order.
pub fn lie_closure(
    generators: &[Operator],
    caps: &ClosureCaps,
    policy: &TolerancePolicy,
) -> Result<LieBasis> {
    let backend = validate_generators(generators)?;
    let policy = policy.validated()?;
    let max_dim = caps.max_dim.unwrap_or_else(|| ambient_dim(&generators[0]));

    let mut basis = OrthoBasis::new(policy);
    let mut provenance = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        match basis.extend(g)? {
            ExtendOutcome::Extended { .. } => provenance.push(Provenance::Generator(i)),
            _ => return Err(CoreError::DependentGenerators),
        }
    }
    if basis.dim() > max_dim {
        return Err(CoreError::MalformedInput(format!(
            "max_dim {max_dim} below generator count {}",
            basis.dim()
        )));
    }

    let mut gg = OrthoBasis::new(policy);
    let mut gg_provenance = Vec::new();

    // Frontier of (normalized right-nested value, innermost-first sequence).
    let mut frontier: Vec<(Operator, Vec<usize>)> = generators
        .iter()
        .enumerate()
        .map(|(i, g)| (g.scale(1.0 / g.norm()), vec![i]))
        .collect();

    let mut capped = false;
    let mut rounds = 0usize;
    while !frontier.is_empty() && !capped {
        if rounds == caps.max_rounds {
            capped = true;
            break;
        }
        rounds += 1;
        let mut next_frontier = Vec::new();
        'candidates: for (i, g) in generators.iter().enumerate() {
            for (w, seq) in &frontier {
                let candidate = g.commutator(w)?;
                if candidate.norm() < ZERO_FLOOR {
                    continue;
                }
                let mut extended_seq = seq.clone();
                extended_seq.push(i);

                if gg.extend(&candidate)?.is_extended() {
                    gg_provenance.push(Provenance::Sequence(extended_seq.clone()));
                }

                if basis.dim() == max_dim {
                    if basis.relative_residual(&candidate)? > policy.rank_threshold {
                        capped = true;
                        break 'candidates;
                    }
                    continue;
                }
                if basis.extend(&candidate)?.is_extended() {
                    provenance.push(Provenance::Sequence(extended_seq.clone()));
                    next_frontier.push((candidate.scale(1.0 / candidate.norm()), extended_seq));
                }
            }
        }
        frontier = next_frontier;
    }

    Ok(LieBasis {
        elements: basis.into_elements(),
        provenance,
        backend,
        capped,
        policy,
        gg_elements: gg.into_elements(),
        gg_provenance,
    })
}

/// Brute-force closure: commutate every pair of current basis elements
/// until nothing new appears. Exists to validate the frontier schedule.
pub fn all_pairs_closure_oracle(
    generators: &[Operator],
    caps: &ClosureCaps,
    policy: &TolerancePolicy,
) -> Result<LieBasis> {
    let backend = validate_generators(generators)?;
    let policy = policy.validated()?;
    let max_dim = caps.max_dim.unwrap_or_else(|| ambient_dim(&generators[0]));

    let mut basis = OrthoBasis::new(policy);
    let mut provenance = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        match basis.extend(g)? {
            ExtendOutcome::Extended { .. } => provenance.push(Provenance::Generator(i)),
            _ => return Err(CoreError::DependentGenerators),
        }
    }
    if basis.dim() > max_dim {
        return Err(CoreError::MalformedInput(format!(
            "max_dim {max_dim} below generator count {}",
            basis.dim()
        )));
    }

    let mut gg = OrthoBasis::new(policy);
    let mut gg_provenance = Vec::new();
    let mut capped = false;

    // Every pair (s, t) with s < t is evaluated exactly once; a pair
    // rejected against a smaller span stays dependent as the span grows.
    let mut t = 0usize;
    while t < basis.dim() {
        for s in 0..t {
            let candidate = basis.elements()[s].commutator(&basis.elements()[t])?;
            if candidate.norm() < ZERO_FLOOR {
                continue;
            }
            if gg.extend(&candidate)?.is_extended() {
                gg_provenance.push(Provenance::Bracket(s, t));
            }
            if basis.dim() == max_dim {
                if basis.relative_residual(&candidate)? > policy.rank_threshold {
                    capped = true;
                }
                continue;
            }
            if basis.extend(&candidate)?.is_extended() {
                provenance.push(Provenance::Bracket(s, t));
            }
        }
        t += 1;
    }

    Ok(LieBasis {
        elements: basis.into_elements(),
        provenance,
        backend,
        capped,
        policy,
        gg_elements: gg.into_elements(),
        gg_provenance,
    })
}

/// Basis of the commutator subalgebra `[g, g]`.
///
/// Two routes are computed and required to agree: the span of all pairwise
/// commutators of basis elements, and the span accumulated from the
/// closure's proper right-nested candidates. The returned basis is the
/// accumulator, whose elements carry proper sequence provenance.
pub fn commutator_subalgebra(basis: &LieBasis, _generators: &[Operator]) -> Result<LieBasis> {
    if basis.capped() {
        return Err(CoreError::CappedBasis);
    }
    let policy = basis.policy;

    let mut pairwise = OrthoBasis::new(policy);
    for t in 0..basis.dim() {
        for s in 0..t {
            let c = basis.elements[s].commutator(&basis.elements[t])?;
            pairwise.extend(&c)?;
        }
    }

    let accumulated = &basis.gg_elements;
    if pairwise.dim() != accumulated.len() {
        return Err(CoreError::MalformedInput(format!(
            "commutator subalgebra routes disagree: pairwise dim {} vs right-nested dim {}",
            pairwise.dim(),
            accumulated.len()
        )));
    }
    let acc_basis = OrthoBasis::from_independent(accumulated, policy)?;
    for e in pairwise.elements() {
        if !acc_basis.contains(e)? {
            return Err(CoreError::MalformedInput(
                "pairwise commutator escapes the right-nested span".into(),
            ));
        }
    }
    for e in accumulated {
        if !pairwise.contains(e)? {
            return Err(CoreError::MalformedInput(
                "right-nested value escapes the pairwise span".into(),
            ));
        }
    }

    Ok(LieBasis::from_parts(
        accumulated.clone(),
        basis.gg_provenance.clone(),
        basis.backend,
        policy,
    ))
}

/// Orthonormal basis of the center `Z(g)`: the null space of the adjoint
/// action of the generators on the closure, expressed in basis coordinates.
/// Commuting with the generators suffices by bilinearity and Jacobi,
/// and is verified against the full basis downstream.
pub fn center(basis: &LieBasis, generators: &[Operator], policy: &TolerancePolicy) -> Result<LieBasis> {
    if basis.capped() {
        return Err(CoreError::CappedBasis);
    }
    let policy = policy.validated()?;
    let dim = basis.dim();
    let ortho = basis.as_ortho();

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(generators.len() * dim);
    for g in generators {
        let mut coord_cols: Vec<Vec<f64>> = Vec::with_capacity(dim);
        for e in &basis.elements {
            let bracket = e.commutator(g)?;
            let (coords, residual) = ortho.project(&bracket)?;
            let scale = bracket.norm().max(1.0);
            if residual.norm() > 1e-8 * scale {
                return Err(CoreError::MalformedInput(format!(
                    "bracket of a basis element escapes the closure (residual {:.3e})",
                    residual.norm()
                )));
            }
            coord_cols.push(coords);
        }
        for s in 0..dim {
            rows.push((0..dim).map(|t| coord_cols[t][s]).collect());
        }
    }

    let null = crate::numeric::real_nullspace_basis(&rows, dim, &policy);
    let mut elements = Vec::with_capacity(null.len());
    for v in &null {
        let mut op = basis.elements[0].scale(0.0);
        for (t, coeff) in v.iter().enumerate() {
            op.add_scaled(*coeff, &basis.elements[t])?;
        }
        elements.push(op);
    }
    let provenance = vec![Provenance::Combination; elements.len()];
    Ok(LieBasis::from_parts(
        elements,
        provenance,
        basis.backend,
        policy,
    ))
}

/// Dimensions and decomposition diagnostics of an analyzed generator set.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport {
    pub dim_g: usize,
    pub dim_gg: usize,
    pub dim_center: usize,
    pub generator_count: usize,
    pub dim_span_a_cap_gg: usize,
    /// Residual of projecting the closure onto `[g,g] ⊕ Z(g)`.
    pub reductive_residual: f64,
    /// Residual of projecting the closure onto `span(A) + [g,g]`.
    pub span_decomposition_residual: f64,
    pub lemma7_identity_holds: bool,
    pub capped: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Full analysis bundle: closure, commutator subalgebra, center and report.
#[derive(Debug, Clone)]
pub struct ClosureAnalysis {
    pub generators: Vec<Operator>,
    pub basis: LieBasis,
    pub gg: LieBasis,
    pub center: LieBasis,
    pub report: ClosureReport,
}

/// Run the whole pipeline and evaluate every `ClosureReport` field.
pub fn analyze(
    generators: &[Operator],
    caps: &ClosureCaps,
    policy: &TolerancePolicy,
) -> Result<ClosureAnalysis> {
    let mut warnings = Vec::new();
    if generators.len() == 1 {
        warnings.push("single-generator set: a dynamical generating set normally has L >= 2".into());
    }
    let basis = lie_closure(generators, caps, policy)?;
    if basis.capped() {
        let report = ClosureReport {
            dim_g: basis.dim(),
            dim_gg: 0,
            dim_center: 0,
            generator_count: generators.len(),
            dim_span_a_cap_gg: 0,
            reductive_residual: f64::NAN,
            span_decomposition_residual: f64::NAN,
            lemma7_identity_holds: false,
            capped: true,
            warnings,
        };
        let empty = LieBasis::from_parts(Vec::new(), Vec::new(), basis.backend(), *basis.policy());
        return Ok(ClosureAnalysis {
            generators: generators.to_vec(),
            gg: empty.clone(),
            center: empty,
            basis,
            report,
        });
    }

    let gg = commutator_subalgebra(&basis, generators)?;
    let z = center(&basis, generators, policy)?;

    // dim(span A ∩ [g,g]) = L + dim gg - dim(span A + gg).
    let mut sum_space = OrthoBasis::new(*basis.policy());
    for e in gg.elements() {
        sum_space.extend(e)?;
    }
    let mut accepted = 0usize;
    for g in generators {
        if sum_space.extend(g)?.is_extended() {
            accepted += 1;
        }
    }
    let dim_span_a_cap_gg = generators.len() - accepted;

    // Reductive decomposition residual: project the closure onto [g,g] ⊕ Z.
    let mut reductive = OrthoBasis::new(*basis.policy());
    for e in gg.elements().iter().chain(z.elements().iter()) {
        reductive.extend(e)?;
    }
    let mut reductive_residual = 0.0f64;
    for e in basis.elements() {
        let (_, r) = reductive.project(e)?;
        reductive_residual = reductive_residual.max(r.norm());
    }

    // Every element decomposes as a span(A) part plus a [g,g] part.
    let mut span_a_plus_gg = OrthoBasis::new(*basis.policy());
    for op in generators.iter().chain(gg.elements().iter()) {
        span_a_plus_gg.extend(op)?;
    }
    let mut span_decomposition_residual = 0.0f64;
    for e in basis.elements() {
        let (_, r) = span_a_plus_gg.project(e)?;
        span_decomposition_residual = span_decomposition_residual.max(r.norm());
    }

    let report = ClosureReport {
        dim_g: basis.dim(),
        dim_gg: gg.dim(),
        dim_center: z.dim(),
        generator_count: generators.len(),
        dim_span_a_cap_gg,
        reductive_residual,
        span_decomposition_residual,
        lemma7_identity_holds: z.dim() + dim_span_a_cap_gg == generators.len(),
        capped: false,
        warnings,
    };
    Ok(ClosureAnalysis {
        generators: generators.to_vec(),
        basis,
        gg,
        center: z,
        report,
    })
}

/// Evaluate the right-nested value of an innermost-first sequence on
/// concrete operators: `[A_kl, [.., [A_k2, A_k1]..]]`.
pub fn sequence_value(seq: &[usize], generators: &[Operator]) -> Result<Operator> {
    if seq.is_empty() {
        return Err(CoreError::MalformedTree("empty sequence".into()));
    }
    let lookup = |k: usize| -> Result<&Operator> {
        generators
            .get(k)
            .ok_or_else(|| CoreError::MalformedTree(format!("generator index {k} out of range")))
    };
    let mut acc = lookup(seq[0])?.clone();
    for &k in &seq[1..] {
        acc = lookup(k)?.commutator(&acc)?;
    }
    Ok(acc)
}
