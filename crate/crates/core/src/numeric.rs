//! Real-span linear algebra over operators plus Hermitian eigendecomposition.
//!
//! Every rank, span, and projector computation in the library routes through
//! this module, so determinism matters: given identical inputs and policy,
//! the same candidates are accepted in the same order.

use num_complex::Complex64;

use crate::dense::DenseOperator;
use crate::error::{CoreError, Result};
use crate::operator::Operator;
use crate::policy::{TolerancePolicy, ZERO_FLOOR};

/// Hilbert-Schmidt inner product `Re tr(a† b)` of two operators.
pub fn hs_inner(a: &Operator, b: &Operator) -> Result<f64> {
    a.hs_inner(b)
}

/// `u ∝ v` (proportional with non-zero factor) under the policy's
/// proportionality threshold. Zero operators are never proportional.
pub fn proportional(u: &Operator, v: &Operator, policy: &TolerancePolicy) -> Result<bool> {
    let nu = u.norm();
    let nv = v.norm();
    if nu < ZERO_FLOOR || nv < ZERO_FLOOR {
        return Ok(false);
    }
    let overlap = u.hs_inner(v)?.abs() / (nu * nv);
    Ok(overlap > 1.0 - policy.proportionality_threshold)
}

/// Result of offering a candidate to an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendOutcome {
    /// Candidate carried new direction; the normalized residual was appended.
    /// `coefficients[k]` is the overlap with the pre-existing element `k`.
    Extended { coefficients: Vec<f64> },
    /// Candidate lies in the span; `coefficients` express it in the basis.
    Rejected { coefficients: Vec<f64> },
    /// Candidate norm was below the absolute zero floor.
    RejectedTrivially,
}

impl ExtendOutcome {
    pub fn is_extended(&self) -> bool {
        matches!(self, ExtendOutcome::Extended { .. })
    }
}

/// Orthonormal operator basis built by modified Gram-Schmidt with one
/// re-orthogonalization pass.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    elements: Vec<Operator>,
    policy: TolerancePolicy,
}

impl OrthoBasis {
    pub fn new(policy: TolerancePolicy) -> Self {
        Self {
            elements: Vec::new(),
            policy,
        }
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }

    pub fn policy(&self) -> &TolerancePolicy {
        &self.policy
    }

    pub fn into_elements(self) -> Vec<Operator> {
        self.elements
    }

    /// Project `op` onto the span; returns the expansion coefficients and
    /// the residual operator.
    pub fn project(&self, op: &Operator) -> Result<(Vec<f64>, Operator)> {
        let mut residual = op.clone();
        let mut coefficients = vec![0.0; self.elements.len()];
        for _pass in 0..2 {
            for (k, e) in self.elements.iter().enumerate() {
                let c = e.hs_inner(&residual)?;
                residual.add_scaled(-c, e)?;
                coefficients[k] += c;
            }
        }
        Ok((coefficients, residual))
    }

    /// Residual norm of `op` against the span, relative to `|op|`.
    pub fn relative_residual(&self, op: &Operator) -> Result<f64> {
        let norm = op.norm();
        if norm < ZERO_FLOOR {
            return Ok(0.0);
        }
        let (_, residual) = self.project(op)?;
        Ok(residual.norm() / norm)
    }

    pub fn contains(&self, op: &Operator) -> Result<bool> {
        Ok(self.relative_residual(op)? <= self.policy.rank_threshold)
    }

    /// Offer a candidate: extend with the normalized residual when it rises
    /// above `rank_threshold * |candidate|`, otherwise report the rejection
    /// with the expansion coefficients.
    pub fn extend(&mut self, candidate: &Operator) -> Result<ExtendOutcome> {
        let norm = candidate.norm();
        if norm < ZERO_FLOOR {
            return Ok(ExtendOutcome::RejectedTrivially);
        }
        let (coefficients, residual) = self.project(candidate)?;
        let r = residual.norm();
        if r > self.policy.rank_threshold * norm {
            self.elements.push(residual.scale(1.0 / r));
            Ok(ExtendOutcome::Extended { coefficients })
        } else {
            Ok(ExtendOutcome::Rejected { coefficients })
        }
    }

    /// Seed a basis from a list of operators, requiring them to be linearly
    /// independent.
    pub fn from_independent(ops: &[Operator], policy: TolerancePolicy) -> Result<Self> {
        let mut basis = Self::new(policy);
        for op in ops {
            match basis.extend(op)? {
                ExtendOutcome::Extended { .. } => {}
                _ => return Err(CoreError::DependentGenerators),
            }
        }
        Ok(basis)
    }
}

/// Spectral decomposition of a Hermitian operator into distinct eigenvalues
/// and orthogonal eigenspace projectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<DenseOperator>,
    pub multiplicities: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn distinct_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Distinct eigenvalues with zeros (under the grouping tolerance)
    /// filtered out, paired with their projectors.
    pub fn nonzero_pairs(&self, policy: &TolerancePolicy) -> Vec<(f64, &DenseOperator)> {
        let tol = policy.eig_group_threshold * self.spectral_radius().max(1e-300);
        self.eigenvalues
            .iter()
            .zip(self.projectors.iter())
            .filter(|(v, _)| v.abs() > tol)
            .map(|(v, p)| (*v, p))
            .collect()
    }

    pub fn reconstruct(&self) -> DenseOperator {
        let dim = self.projectors.first().map(|p| p.dim()).unwrap_or(0);
        let mut out = DenseOperator::zeros(dim);
        for (v, p) in self.eigenvalues.iter().zip(self.projectors.iter()) {
            out.add_scaled_real(*v, p);
        }
        out
    }

    /// Check the projector algebra and the reconstruction residual.
    pub fn validate(&self, h: &DenseOperator, tol: f64) -> Result<()> {
        let scale = h.norm().max(1.0);
        for (i, p) in self.projectors.iter().enumerate() {
            let idem = p.matmul(p)?.sub(p)?.norm();
            if idem > tol {
                return Err(CoreError::MalformedInput(format!(
                    "projector {i} not idempotent (residual {idem:.3e})"
                )));
            }
            for (j, q) in self.projectors.iter().enumerate().skip(i + 1) {
                let cross = p.matmul(q)?.norm();
                if cross > tol {
                    return Err(CoreError::MalformedInput(format!(
                        "projectors {i},{j} not orthogonal (residual {cross:.3e})"
                    )));
                }
            }
        }
        let rec = self.reconstruct().sub(h)?.norm();
        if rec > tol * scale {
            return Err(CoreError::MalformedInput(format!(
                "spectral reconstruction residual {rec:.3e}"
            )));
        }
        Ok(())
    }
}

/// Raw cyclic-Jacobi eigendecomposition of a Hermitian matrix.
///
/// Returns the unsorted diagonal and the accumulated unitary whose columns
/// are eigenvectors. Each rotation factors the 2x2 pivot block through a
/// phase that makes it real symmetric, then applies the classic symmetric
/// Jacobi angle.
fn jacobi(h: &DenseOperator) -> Result<(Vec<f64>, DenseOperator)> {
    let d = h.dim();
    let mut a = h.add(&h.adjoint())?.scale_real(0.5);
    let mut v = DenseOperator::identity(d);
    let scale = a.norm().max(1e-300);
    let target = 1e-15 * scale;

    for _sweep in 0..120 {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= target {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= target / (d as f64) {
                    continue;
                }
                let phase = apq / g;
                let phase_conj = phase.conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..d {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * phase_conj * akq;
                    a[(k, q)] = s * akp + c * phase_conj * akq;
                    a[(p, k)] = a[(k, p)].conj();
                    a[(q, k)] = a[(k, q)].conj();
                }
                a[(p, p)] = Complex64::new(app - t * g, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * g, 0.0);
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;

                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * phase_conj * vkq;
                    v[(k, q)] = s * vkp + c * phase_conj * vkq;
                }
            }
        }
    }
    let values = (0..d).map(|i| a[(i, i)].re).collect();
    Ok((values, v))
}

/// Eigendecompose a Hermitian operator, merging eigenvalues that agree
/// within `eig_group_threshold * spectral radius` into one eigenspace.
pub fn hermitian_eig(h: &DenseOperator, policy: &TolerancePolicy) -> Result<SpectralDecomposition> {
    h.require_hermitian()?;
    let d = h.dim();
    let (values, vectors) = jacobi(h)?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());

    let radius = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = policy.eig_group_threshold * radius.max(1e-300);

    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut multiplicities = Vec::new();
    let mut idx = 0;
    while idx < d {
        let mut members = vec![order[idx]];
        let mut last = values[order[idx]];
        let mut next = idx + 1;
        while next < d && values[order[next]] - last <= tol {
            last = values[order[next]];
            members.push(order[next]);
            next += 1;
        }
        let mean = members.iter().map(|&k| values[k]).sum::<f64>() / members.len() as f64;
        let mut projector = DenseOperator::zeros(d);
        for &k in &members {
            for i in 0..d {
                for j in 0..d {
                    projector[(i, j)] += vectors[(i, k)] * vectors[(j, k)].conj();
                }
            }
        }
        eigenvalues.push(mean);
        multiplicities.push(members.len());
        projectors.push(projector);
        idx = next;
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
        multiplicities,
    })
}

/// Outcome of the generalized Vandermonde span test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSpanReport {
    /// Whether `span{χ^(ℓ+jM) : 0 ≤ j ≤ K-1}` equals the projector span.
    pub spans: bool,
    pub det_magnitude: f64,
    /// Singular-value condition estimate of the transfer matrix.
    pub condition: f64,
}

/// Test invertibility of the matrix with entries `λ_i^(ℓ+jM)` built from the
/// distinct eigenvalues of a spectral decomposition. Invertibility is judged
/// on the smallest-to-largest singular value ratio against `rank_threshold`.
pub fn power_span_check(
    decomp: &SpectralDecomposition,
    offset: u32,
    stride: u32,
    policy: &TolerancePolicy,
) -> Result<PowerSpanReport> {
    let k = decomp.distinct_count();
    let radius = decomp.spectral_radius().max(1e-300);
    let zero_tol = policy.eig_group_threshold * radius;
    if offset > 0 && decomp.eigenvalues.iter().any(|v| v.abs() <= zero_tol) {
        return Err(CoreError::StructurallySingular);
    }

    let mut m = DenseOperator::zeros(k);
    for (col, lambda) in decomp.eigenvalues.iter().enumerate() {
        for row in 0..k {
            let exponent = offset + stride * row as u32;
            m[(row, col)] = Complex64::new(lambda.powi(exponent as i32), 0.0);
        }
    }
    let gram = m.adjoint().matmul(&m)?;
    let (eigs, _) = jacobi(&gram)?;
    let singulars: Vec<f64> = eigs.iter().map(|v| v.max(0.0).sqrt()).collect();
    let smax = singulars.iter().fold(0.0f64, |acc, v| acc.max(*v));
    let smin = singulars.iter().fold(f64::INFINITY, |acc, v| acc.min(*v));
    let det_magnitude: f64 = singulars.iter().product();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let spans = smax > 0.0 && smin > policy.rank_threshold * smax;
    Ok(PowerSpanReport {
        spans,
        det_magnitude,
        condition,
    })
}

/// Orthonormal basis of the null space of a real matrix given by rows,
/// computed as the orthogonal complement of the row space.
pub fn real_nullspace_basis(rows: &[Vec<f64>], dim: usize, policy: &TolerancePolicy) -> Vec<Vec<f64>> {
    let mut row_space: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        debug_assert_eq!(row.len(), dim);
        if let Some(v) = orthogonal_residual(row, &row_space, policy) {
            row_space.push(v);
        }
    }
    let mut null_basis = Vec::new();
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        let mut against: Vec<&[f64]> = Vec::with_capacity(row_space.len() + null_basis.len());
        against.extend(row_space.iter().map(|v| v.as_slice()));
        against.extend(null_basis.iter().map(|v: &Vec<f64>| v.as_slice()));
        if let Some(v) = orthogonal_residual_slices(&e, &against, policy) {
            null_basis.push(v);
        }
    }
    null_basis
}

fn orthogonal_residual(row: &[f64], basis: &[Vec<f64>], policy: &TolerancePolicy) -> Option<Vec<f64>> {
    let refs: Vec<&[f64]> = basis.iter().map(|v| v.as_slice()).collect();
    orthogonal_residual_slices(row, &refs, policy)
}

fn orthogonal_residual_slices(
    row: &[f64],
    basis: &[&[f64]],
    policy: &TolerancePolicy,
) -> Option<Vec<f64>> {
    let norm0 = real_norm(row);
    if norm0 < ZERO_FLOOR {
        return None;
    }
    let mut v = row.to_vec();
    for _pass in 0..2 {
        for b in basis {
            let c = real_dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi -= c * bi;
            }
        }
    }
    let r = real_norm(&v);
    if r > policy.rank_threshold * norm0 {
        for vi in v.iter_mut() {
            *vi /= r;
        }
        Some(v)
    } else {
        None
    }
}

fn real_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn real_norm(a: &[f64]) -> f64 {
    real_dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{pauli_x, random_anti_hermitian, DenseOperator};
    use crate::pauli::{PauliCombination, PauliTerm};
    use num_complex::Complex64;
    use rand::seq::SliceRandom;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_op(s: &str, c: f64) -> Operator {
        Operator::Pauli(PauliCombination::single(s.parse::<PauliTerm>().unwrap(), c))
    }

    #[test]
    fn hs_inner_examples() {
        let i2 = Operator::Dense(DenseOperator::identity(2));
        assert_eq!(hs_inner(&i2, &i2).unwrap(), 2.0);
        assert_eq!(hs_inner(&pauli_op("X", 1.0), &pauli_op("Z", 1.0)).unwrap(), 0.0);
        assert_eq!(hs_inner(&pauli_op("X", 1.0), &pauli_op("X", 1.0)).unwrap(), 2.0);
    }

    #[test]
    fn extend_examples() {
        let policy = TolerancePolicy::default();
        let mut basis = OrthoBasis::new(policy);
        assert!(basis.extend(&pauli_op("X", 1.0)).unwrap().is_extended());
        // basis now holds iX/sqrt(2)

        match basis.clone().extend(&pauli_op("X", 1.0)).unwrap() {
            ExtendOutcome::Rejected { coefficients } => {
                assert!((coefficients[0] - 2.0_f64.sqrt()).abs() < 1e-12);
            }
            other => panic!("expected rejection, got {other:?}"),
        }

        let mut b2 = basis.clone();
        assert!(b2.extend(&pauli_op("Z", 1.0)).unwrap().is_extended());
        let expected = pauli_op("Z", 1.0 / 2.0_f64.sqrt());
        let mut diff = b2.elements()[1].clone();
        diff.add_scaled(-1.0, &expected).unwrap();
        assert!(diff.norm() < 1e-12);

        // i(X+Z) against {iX/sqrt 2}: residual is proportional to iZ.
        let mut b3 = basis.clone();
        let xz = Operator::Pauli(PauliCombination::parse(&[("X", 1.0), ("Z", 1.0)]).unwrap());
        assert!(b3.extend(&xz).unwrap().is_extended());
        let resid = &b3.elements()[1];
        assert!(proportional(resid, &pauli_op("Z", 1.0), &policy).unwrap());
    }

    #[test]
    fn zero_candidate_is_trivially_rejected() {
        let mut basis = OrthoBasis::new(TolerancePolicy::default());
        let zero = Operator::Pauli(PauliCombination::zero(1));
        assert_eq!(basis.extend(&zero).unwrap(), ExtendOutcome::RejectedTrivially);
    }

    #[test]
    fn rank_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut ops: Vec<Operator> = (0..6)
                .map(|k| Operator::Dense(random_anti_hermitian(4, 100 + k)))
                .collect();
            // Plant dependencies.
            let dep1 = {
                let mut v = ops[0].clone();
                v.add_scaled(-2.5, &ops[1]).unwrap();
                v
            };
            ops.push(dep1);
            let baseline = {
                let mut basis = OrthoBasis::new(TolerancePolicy::default());
                for op in &ops {
                    basis.extend(op).unwrap();
                }
                basis.dim()
            };
            for _ in 0..5 {
                ops.shuffle(&mut rng);
                let mut basis = OrthoBasis::new(TolerancePolicy::default());
                for op in &ops {
                    basis.extend(op).unwrap();
                }
                assert_eq!(basis.dim(), baseline);
            }
        }
    }

    #[test]
    fn eig_diagonal_and_pauli_x() {
        let policy = TolerancePolicy::default();
        let d = hermitian_eig(&DenseOperator::diagonal(&[1.0, 2.0]), &policy).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0]);
        assert_eq!(d.multiplicities, vec![1, 1]);
        assert_eq!(d.projectors[0][(0, 0)], Complex64::ONE);
        assert_eq!(d.projectors[1][(1, 1)], Complex64::ONE);

        let d = hermitian_eig(&pauli_x(), &policy).unwrap();
        assert_eq!(d.eigenvalues.len(), 2);
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-12);
        // Π± = (I ± X)/2.
        let plus = DenseOperator::identity(2).add(&pauli_x()).unwrap().scale_real(0.5);
        assert!(d.projectors[1].sub(&plus).unwrap().norm() < 1e-12);
        d.validate(&pauli_x(), 1e-12).unwrap();
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let policy = TolerancePolicy::default();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for dim in [8usize, 16, 64] {
            let mut h = DenseOperator::zeros(dim);
            for i in 0..dim {
                for j in 0..dim {
                    h[(i, j)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                }
            }
            let h = h.add(&h.adjoint()).unwrap().scale_real(0.5);
            let h = h.scale_real(1.0 / h.norm());
            let d = hermitian_eig(&h, &policy).unwrap();
            assert!(d.reconstruct().sub(&h).unwrap().norm() < 1e-10);
            d.validate(&h, 1e-10).unwrap();
        }
    }

    #[test]
    fn eig_groups_degenerate_eigenvalues() {
        let policy = TolerancePolicy::default();
        let h = DenseOperator::diagonal(&[1.0, 1.0, 2.0, 3.0]);
        let d = hermitian_eig(&h, &policy).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(d.multiplicities, vec![2, 1, 1]);
        d.validate(&h, 1e-12).unwrap();
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let policy = TolerancePolicy::default();
        let mut bad = DenseOperator::zeros(2);
        bad[(0, 1)] = Complex64::ONE;
        assert!(matches!(hermitian_eig(&bad, &policy), Err(CoreError::NotHermitian(_))));
    }

    #[test]
    fn power_span_examples() {
        let policy = TolerancePolicy::default();
        let d12 = hermitian_eig(&DenseOperator::diagonal(&[1.0, 2.0]), &policy).unwrap();
        assert!(power_span_check(&d12, 0, 1, &policy).unwrap().spans);

        // λ² = 1 for both eigenvalues of Z: the sign-ambiguous spectrum collapses.
        let dz = hermitian_eig(&pauli_x(), &policy).unwrap();
        let report = power_span_check(&dz, 1, 2, &policy).unwrap();
        assert!(!report.spans);
        assert!(report.det_magnitude < 1e-10);

        let report = power_span_check(&d12, 1, 2, &policy).unwrap();
        assert!(report.spans);
        // |det| of [[1,2],[1,8]] is 6.
        assert!((report.det_magnitude - 6.0).abs() < 1e-9);
    }

    #[test]
    fn power_span_zero_eigenvalue_with_offset_is_structural() {
        let policy = TolerancePolicy::default();
        let d = hermitian_eig(&DenseOperator::diagonal(&[0.0, 2.0]), &policy).unwrap();
        assert!(matches!(
            power_span_check(&d, 1, 1, &policy),
            Err(CoreError::StructurallySingular)
        ));
        // Offset zero is fine: χ^0 = I participates regardless.
        assert!(power_span_check(&d, 0, 1, &policy).unwrap().spans);
    }

    #[test]
    fn power_span_full_rank_for_small_distinct_spectra() {
        let policy = TolerancePolicy::default();
        for k in 2..=5usize {
            let spectrum: Vec<f64> = (0..k).map(|i| 1.0 + i as f64).collect();
            let padded = crate::dense::build_hermitian_with_spectrum(
                &spectrum,
                crate::dense::SpectrumStyle::Diagonal,
                false,
                &policy,
            )
            .unwrap();
            let d = hermitian_eig(&padded, &policy).unwrap();
            assert_eq!(d.distinct_count(), k);
            assert!(power_span_check(&d, 0, 1, &policy).unwrap().spans);
        }
    }

    #[test]
    fn nullspace_of_simple_system() {
        let policy = TolerancePolicy::default();
        // x + y = 0 in R^3: null space is spanned by (1,-1,0)/sqrt2 and (0,0,1).
        let rows = vec![vec![1.0, 1.0, 0.0]];
        let basis = real_nullspace_basis(&rows, 3, &policy);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!((v[0] + v[1]).abs() < 1e-12);
        }
    }
}
