//! Dense complex-matrix backend.
//!
//! This is the oracle side of the library: a plain row-major complex matrix
//! with just enough linear algebra to cross-check the symbolic Pauli path,
//! plus the constructors for Hermitian operators with prescribed spectra.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::policy::TolerancePolicy;

/// Hard cap on the total qubit count of any dense materialization.
pub const DENSE_QUBIT_CAP: u32 = 10;

/// A `dim x dim` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        m
    }

    /// Build from row-major complex entries. `entries.len()` must be a square.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(CoreError::DimensionMismatch(entries.len(), dim * dim));
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(CoreError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self += c * other`, in place.
    pub fn add_scaled_real(&mut self, c: f64, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.entries.iter_mut().zip(other.entries.iter()) {
            *a += c * b;
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        out.add_scaled_real(1.0, other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        out.add_scaled_real(-1.0, other);
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix power with non-negative integer exponent.
    pub fn pow(&self, exponent: u32) -> Result<Self> {
        let mut out = Self::identity(self.dim);
        for _ in 0..exponent {
            out = out.matmul(self)?;
        }
        Ok(out)
    }

    /// Hilbert-Schmidt inner product `Re tr(a† b)`.
    pub fn hs_inner(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        let mut acc = 0.0;
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            acc += (a.conj() * b).re;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn anti_hermiticity_residual(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += (self[(i, j)] + self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol * self.norm().max(1.0)
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.anti_hermiticity_residual() <= tol * self.norm().max(1.0)
    }

    pub fn require_hermitian(&self) -> Result<()> {
        let r = self.hermiticity_residual();
        if r > 1e-10 * self.norm().max(1.0) {
            return Err(CoreError::NotHermitian(r));
        }
        Ok(())
    }

    pub fn require_anti_hermitian(&self) -> Result<()> {
        let r = self.anti_hermiticity_residual();
        if r > 1e-10 * self.norm().max(1.0) {
            return Err(CoreError::NotAntiHermitian(r));
        }
        Ok(())
    }

    pub fn require_traceless(&self) -> Result<()> {
        let t = self.trace().norm();
        if t > 1e-10 * self.norm().max(1.0) {
            return Err(CoreError::NotTraceless(t));
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for DenseOperator {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseOperator {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Exact matrix commutator `[a, b] = ab - ba`.
pub fn dense_commutator(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    ab.sub(&ba)
}

/// Kronecker product, `dim = dim(a) * dim(b)`; `b` indexes the faster axis.
pub fn dense_tensor(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
    let (da, db) = (a.dim(), b.dim());
    let mut out = DenseOperator::zeros(da * db);
    for i1 in 0..da {
        for j1 in 0..da {
            let f = a[(i1, j1)];
            if f == Complex64::ZERO {
                continue;
            }
            for i2 in 0..db {
                for j2 in 0..db {
                    out[(i1 * db + i2, j1 * db + j2)] = f * b[(i2, j2)];
                }
            }
        }
    }
    out
}

/// How to realize a prescribed spectrum as a concrete matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumStyle {
    Diagonal,
    /// Conjugate the diagonal form by a seeded random unitary, for
    /// basis-independence testing of spectrum-level claims.
    RandomConjugated { seed: u64 },
}

/// Build a Hermitian operator on `ceil(log2 K')` qubits whose distinct
/// eigenvalues are exactly `spectrum`. When the spectrum does not fill the
/// power-of-two dimension, the final eigenvalue is repeated, which preserves
/// the distinct-eigenvalue count.
pub fn build_hermitian_with_spectrum(
    spectrum: &[f64],
    style: SpectrumStyle,
    require_sign_unambiguous: bool,
    policy: &TolerancePolicy,
) -> Result<DenseOperator> {
    if spectrum.is_empty() {
        return Err(CoreError::InvalidSpectrum("empty spectrum".into()));
    }
    if spectrum.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::InvalidSpectrum("non-finite eigenvalue".into()));
    }
    let radius = spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let tol = policy.eig_group_threshold * radius;
    for i in 0..spectrum.len() {
        for j in (i + 1)..spectrum.len() {
            if (spectrum[i] - spectrum[j]).abs() < tol {
                return Err(CoreError::InvalidSpectrum(format!(
                    "eigenvalues {} and {} coincide within the grouping threshold",
                    spectrum[i], spectrum[j]
                )));
            }
            if require_sign_unambiguous
                && spectrum[i].abs() > tol
                && spectrum[j].abs() > tol
                && (spectrum[i] + spectrum[j]).abs() < tol
            {
                return Err(CoreError::SignAmbiguous(spectrum[i], spectrum[j]));
            }
        }
    }

    let k = spectrum.len();
    let dim = k.next_power_of_two();
    let mut padded = spectrum.to_vec();
    padded.resize(dim, *spectrum.last().unwrap());
    let diag = DenseOperator::diagonal(&padded);
    match style {
        SpectrumStyle::Diagonal => Ok(diag),
        SpectrumStyle::RandomConjugated { seed } => {
            let u = random_unitary(dim, seed);
            u.matmul(&diag)?.matmul(&u.adjoint())
        }
    }
}

/// True iff the non-zero spectrum of Hermitian `q` contains no pair
/// `λ, λ'` with `λ = -λ'`. Zero eigenvalues are exempt.
pub fn sign_unambiguous(q: &DenseOperator, policy: &TolerancePolicy) -> Result<bool> {
    q.require_hermitian()?;
    let decomp = crate::numeric::hermitian_eig(q, policy)?;
    let radius = decomp
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let tol = policy.eig_group_threshold * radius;
    let nonzero: Vec<f64> = decomp
        .eigenvalues
        .iter()
        .copied()
        .filter(|v| v.abs() > tol)
        .collect();
    for i in 0..nonzero.len() {
        for j in (i + 1)..nonzero.len() {
            if (nonzero[i] + nonzero[j]).abs() < tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// If `a² = λ I` within tolerance, return `λ = tr(a²)/d`; otherwise `None`.
pub fn square_scalar_check(a: &DenseOperator) -> Result<Option<f64>> {
    let sq = a.matmul(a)?;
    let lambda = sq.trace() / a.dim() as f64;
    let mut residual = sq.clone();
    let mut ident = DenseOperator::identity(a.dim());
    ident = ident.scale(lambda);
    residual = residual.sub(&ident)?;
    let tol = 1e-10 * sq.norm().max(1.0);
    if residual.norm() < tol && lambda.im.abs() < tol {
        Ok(Some(lambda.re))
    } else {
        Ok(None)
    }
}

/// Haar-ish random unitary: seeded complex Gaussian matrix orthonormalized
/// column by column.
pub fn random_unitary(dim: usize, seed: u64) -> DenseOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng)))
            .collect();
        // Two Gram-Schmidt passes keep the columns unitary to machine precision.
        for _ in 0..2 {
            for c in &cols {
                let dot: Complex64 = c.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c.iter()) {
                    *vi -= dot * ci;
                }
            }
        }
        let norm = v.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        for e in v.iter_mut() {
            *e /= norm;
        }
        cols.push(v);
    }
    let mut u = DenseOperator::zeros(dim);
    for (j, c) in cols.iter().enumerate() {
        for (i, e) in c.iter().enumerate() {
            u[(i, j)] = *e;
        }
    }
    u
}

/// Seeded random traceless anti-Hermitian matrix, unit HS norm.
pub fn random_anti_hermitian(dim: usize, seed: u64) -> DenseOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = DenseOperator::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = Complex64::new(gaussian(&mut rng), gaussian(&mut rng));
        }
    }
    let mut a = g.sub(&g.adjoint()).unwrap().scale_real(0.5);
    let shift = a.trace() / dim as f64;
    for i in 0..dim {
        a[(i, i)] -= shift;
    }
    let n = a.norm();
    a.scale_real(1.0 / n)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; avoids pulling in rand_distr for one distribution.
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn pauli_x() -> DenseOperator {
    DenseOperator::from_entries(
        2,
        vec![
            Complex64::ZERO,
            Complex64::ONE,
            Complex64::ONE,
            Complex64::ZERO,
        ],
    )
    .unwrap()
}

pub fn pauli_y() -> DenseOperator {
    DenseOperator::from_entries(
        2,
        vec![
            Complex64::ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::ZERO,
        ],
    )
    .unwrap()
}

pub fn pauli_z() -> DenseOperator {
    DenseOperator::from_entries(
        2,
        vec![
            Complex64::ONE,
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::new(-1.0, 0.0),
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i_times(m: &DenseOperator) -> DenseOperator {
        m.scale(Complex64::new(0.0, 1.0))
    }

    #[test]
    fn commutator_of_ix_iz_is_2iy() {
        let a = i_times(&pauli_x());
        let b = i_times(&pauli_z());
        let c = dense_commutator(&a, &b).unwrap();
        let expected = i_times(&pauli_y()).scale_real(2.0);
        assert!(c.sub(&expected).unwrap().norm() < 1e-14);
    }

    #[test]
    fn commutator_with_self_vanishes() {
        let a = random_anti_hermitian(4, 7);
        assert!(dense_commutator(&a, &a).unwrap().norm() < 1e-14);
    }

    #[test]
    fn diagonal_matrices_commute() {
        let a = DenseOperator::diagonal(&[1.0, -3.0, 2.5, 0.25]);
        let b = DenseOperator::diagonal(&[0.5, 4.0, -1.0, 9.0]);
        assert!(dense_commutator(&a, &b).unwrap().norm() == 0.0);
    }

    #[test]
    fn tensor_of_identities() {
        let i2 = DenseOperator::identity(2);
        let i4 = dense_tensor(&i2, &i2);
        assert!(i4.sub(&DenseOperator::identity(4)).unwrap().norm() == 0.0);
    }

    #[test]
    fn tensor_block_structure() {
        let chi = DenseOperator::diagonal(&[1.0, 2.0]);
        let m = dense_tensor(&i_times(&pauli_x()), &chi);
        // iX ⊗ diag(1,2): nonzero blocks are the off-diagonal 2x2 diagonals.
        assert_eq!(m[(0, 2)], Complex64::new(0.0, 1.0));
        assert_eq!(m[(1, 3)], Complex64::new(0.0, 2.0));
        assert_eq!(m[(2, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(m[(3, 1)], Complex64::new(0.0, 2.0));
        assert_eq!(m[(0, 0)], Complex64::ZERO);
    }

    #[test]
    fn hs_norm_is_multiplicative_under_tensor() {
        for seed in 0..8u64 {
            let a = random_anti_hermitian(2, seed);
            let b = random_anti_hermitian(2, seed + 100);
            let t = dense_tensor(&a, &b);
            assert!((t.norm() - a.norm() * b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_builder_diagonal_and_padded() {
        let policy = TolerancePolicy::default();
        let two = build_hermitian_with_spectrum(&[1.0, 2.0], SpectrumStyle::Diagonal, false, &policy)
            .unwrap();
        assert_eq!(two.dim(), 2);
        assert_eq!(two[(0, 0)].re, 1.0);
        assert_eq!(two[(1, 1)].re, 2.0);

        let three =
            build_hermitian_with_spectrum(&[1.0, 2.0, 3.0], SpectrumStyle::Diagonal, false, &policy)
                .unwrap();
        assert_eq!(three.dim(), 4);
        assert_eq!(three[(3, 3)].re, 3.0);
    }

    #[test]
    fn spectrum_builder_rejects_duplicates_and_sign_pairs() {
        let policy = TolerancePolicy::default();
        assert!(matches!(
            build_hermitian_with_spectrum(&[1.0, 1.0], SpectrumStyle::Diagonal, false, &policy),
            Err(CoreError::InvalidSpectrum(_))
        ));
        assert!(matches!(
            build_hermitian_with_spectrum(&[1.0, -1.0], SpectrumStyle::Diagonal, true, &policy),
            Err(CoreError::SignAmbiguous(_, _))
        ));
        // Without the flag the sign-ambiguous spectrum is allowed.
        assert!(
            build_hermitian_with_spectrum(&[1.0, -1.0], SpectrumStyle::Diagonal, false, &policy)
                .is_ok()
        );
    }

    #[test]
    fn sign_unambiguous_cases() {
        let policy = TolerancePolicy::default();
        assert!(sign_unambiguous(&DenseOperator::diagonal(&[1.0, 2.0]), &policy).unwrap());
        assert!(!sign_unambiguous(&pauli_z(), &policy).unwrap());
        assert!(sign_unambiguous(&DenseOperator::diagonal(&[0.0, 1.0, 2.0, 2.0]), &policy).unwrap());
    }

    #[test]
    fn sign_unambiguous_is_conjugation_invariant() {
        let policy = TolerancePolicy::default();
        for (spectrum, expected) in [(vec![1.0, 2.0, 3.0], true), (vec![1.0, -1.0, 2.0], false)] {
            let diag = build_hermitian_with_spectrum(&spectrum, SpectrumStyle::Diagonal, false, &policy)
                .unwrap();
            let conj = build_hermitian_with_spectrum(
                &spectrum,
                SpectrumStyle::RandomConjugated { seed: 11 },
                false,
                &policy,
            )
            .unwrap();
            assert_eq!(sign_unambiguous(&diag, &policy).unwrap(), expected);
            assert_eq!(sign_unambiguous(&conj, &policy).unwrap(), expected);
        }
    }

    #[test]
    fn square_scalar_cases() {
        let ix = i_times(&pauli_x());
        assert_eq!(square_scalar_check(&ix).unwrap(), Some(-1.0));

        let izz = i_times(&dense_tensor(&pauli_z(), &pauli_z()));
        assert_eq!(square_scalar_check(&izz).unwrap(), Some(-1.0));

        let x1 = dense_tensor(&pauli_x(), &DenseOperator::identity(2));
        let x2 = dense_tensor(&DenseOperator::identity(2), &pauli_x());
        let sum = i_times(&x1.add(&x2).unwrap());
        assert_eq!(square_scalar_check(&sum).unwrap(), None);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary(8, 3);
        let prod = u.adjoint().matmul(&u).unwrap();
        assert!(prod.sub(&DenseOperator::identity(8)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn random_anti_hermitian_is_valid_generator() {
        let a = random_anti_hermitian(4, 5);
        a.require_anti_hermitian().unwrap();
        a.require_traceless().unwrap();
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }
}
