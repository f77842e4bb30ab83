//! Exact symbolic backend: anti-Hermitian operators stored as real
//! combinations of `i * (n-qubit Pauli string)`.
//!
//! Pauli strings are kept in symplectic form as a pair of bit masks (X part,
//! Z part) with `Y = iXZ` on qubits where both bits are set. Commutators
//! reduce to mask arithmetic, so the closure engine stays exact: the only
//! floating point is in the real coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use smallvec::{smallvec, SmallVec};

use crate::dense::{dense_tensor, DenseOperator, DENSE_QUBIT_CAP};
use crate::error::{CoreError, Result};
use crate::policy::COEFF_FLOOR;

type Mask = SmallVec<[u64; 2]>;

fn mask_chunks(qubits: u32) -> usize {
    ((qubits as usize + 63) / 64).max(1)
}

fn empty_mask(qubits: u32) -> Mask {
    smallvec![0u64; mask_chunks(qubits)]
}

fn mask_bit(mask: &Mask, bit: u32) -> bool {
    mask[(bit / 64) as usize] >> (bit % 64) & 1 != 0
}

fn set_mask_bit(mask: &mut Mask, bit: u32) {
    mask[(bit / 64) as usize] |= 1u64 << (bit % 64);
}

fn and_popcount(a: &Mask, b: &Mask) -> u32 {
    a.iter().zip(b.iter()).map(|(x, y)| (x & y).count_ones()).sum()
}

fn xor_masks(a: &Mask, b: &Mask) -> Mask {
    a.iter().zip(b.iter()).map(|(x, y)| x ^ y).collect()
}

/// One n-qubit Pauli string in symplectic (X-mask, Z-mask) form.
///
/// Qubit `j` (0-based) owns bit `j` of each mask; a set X bit alone is `X`,
/// a set Z bit alone is `Z`, both set is `Y`. The identity string (both
/// masks zero) is only ever produced inside combination arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliTerm {
    qubit_count: u32,
    x_mask: Mask,
    z_mask: Mask,
}

impl PauliTerm {
    pub fn identity(qubit_count: u32) -> Self {
        Self {
            qubit_count,
            x_mask: empty_mask(qubit_count),
            z_mask: empty_mask(qubit_count),
        }
    }

    pub fn from_masks(qubit_count: u32, x_mask: Mask, z_mask: Mask) -> Result<Self> {
        let chunks = mask_chunks(qubit_count);
        if x_mask.len() != chunks || z_mask.len() != chunks {
            return Err(CoreError::MalformedInput("mask chunk count mismatch".into()));
        }
        Ok(Self {
            qubit_count,
            x_mask,
            z_mask,
        })
    }

    pub fn qubit_count(&self) -> u32 {
        self.qubit_count
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask.iter().all(|c| *c == 0) && self.z_mask.iter().all(|c| *c == 0)
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> u32 {
        self.x_mask
            .iter()
            .zip(self.z_mask.iter())
            .map(|(x, z)| (x | z).count_ones())
            .sum()
    }

    /// Letter on qubit `j`: one of `'I' 'X' 'Y' 'Z'`.
    pub fn letter(&self, qubit: u32) -> char {
        match (mask_bit(&self.x_mask, qubit), mask_bit(&self.z_mask, qubit)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    /// Append the factors of `other` after this term's qubits.
    pub fn tensor(&self, other: &PauliTerm) -> PauliTerm {
        let total = self.qubit_count + other.qubit_count;
        let mut x_mask = empty_mask(total);
        let mut z_mask = empty_mask(total);
        for q in 0..self.qubit_count {
            if mask_bit(&self.x_mask, q) {
                set_mask_bit(&mut x_mask, q);
            }
            if mask_bit(&self.z_mask, q) {
                set_mask_bit(&mut z_mask, q);
            }
        }
        for q in 0..other.qubit_count {
            if mask_bit(&other.x_mask, q) {
                set_mask_bit(&mut x_mask, self.qubit_count + q);
            }
            if mask_bit(&other.z_mask, q) {
                set_mask_bit(&mut z_mask, self.qubit_count + q);
            }
        }
        PauliTerm {
            qubit_count: total,
            x_mask,
            z_mask,
        }
    }

    /// Dense matrix of the bare Hermitian string (no `i` prefactor).
    pub fn to_dense(&self) -> DenseOperator {
        let mut m = DenseOperator::identity(1);
        for q in 0..self.qubit_count {
            let f = match self.letter(q) {
                'I' => DenseOperator::identity(2),
                'X' => crate::dense::pauli_x(),
                'Y' => crate::dense::pauli_y(),
                'Z' => crate::dense::pauli_z(),
                _ => unreachable!(),
            };
            m = dense_tensor(&m, &f);
        }
        m
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.qubit_count != other.qubit_count {
            return Err(CoreError::QubitCountMismatch(
                self.qubit_count,
                other.qubit_count,
            ));
        }
        Ok(())
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.qubit_count {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliTerm {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(CoreError::InvalidPauliString("empty string".into()));
        }
        let qubit_count = s.chars().count() as u32;
        let mut x_mask = empty_mask(qubit_count);
        let mut z_mask = empty_mask(qubit_count);
        for (j, c) in s.chars().enumerate() {
            let j = j as u32;
            match c {
                'I' => {}
                'X' => set_mask_bit(&mut x_mask, j),
                'Y' => {
                    set_mask_bit(&mut x_mask, j);
                    set_mask_bit(&mut z_mask, j);
                }
                'Z' => set_mask_bit(&mut z_mask, j),
                other => {
                    return Err(CoreError::InvalidPauliString(format!(
                        "unexpected character '{other}' in \"{s}\""
                    )))
                }
            }
        }
        Ok(PauliTerm {
            qubit_count,
            x_mask,
            z_mask,
        })
    }
}

/// Whether the two strings anticommute: the symplectic form
/// `|x1∧z2| + |z1∧x2|` is odd.
pub fn anticommutes(p: &PauliTerm, q: &PauliTerm) -> Result<bool> {
    p.check_compatible(q)?;
    let parity = and_popcount(&p.x_mask, &q.z_mask) + and_popcount(&p.z_mask, &q.x_mask);
    Ok(parity % 2 == 1)
}

/// Commutator of two unit anti-Hermitian strings: `[iP, iQ]`.
///
/// Returns `None` when the strings commute, otherwise `(c, R)` such that
/// `[iP, iQ] = c * (iR)` with `c = ±2`. Writing `P Q = i^e R` with
/// `R` the Hermitian string on the XOR'd masks, the exponent is
/// `e = |x1∧z1| + |x2∧z2| - |x3∧z3| + 2|z1∧x2| (mod 4)`, which is odd
/// exactly when the strings anticommute; the sign is `-2` for `e = 1` and
/// `+2` for `e = 3`.
pub fn pauli_commutator(p: &PauliTerm, q: &PauliTerm) -> Result<Option<(f64, PauliTerm)>> {
    if !anticommutes(p, q)? {
        return Ok(None);
    }
    let x_mask = xor_masks(&p.x_mask, &q.x_mask);
    let z_mask = xor_masks(&p.z_mask, &q.z_mask);
    let e = (and_popcount(&p.x_mask, &p.z_mask)
        + and_popcount(&q.x_mask, &q.z_mask)
        + 2 * and_popcount(&p.z_mask, &q.x_mask)
        + 4 * x_mask.len() as u32 * 64
        - and_popcount(&x_mask, &z_mask))
        % 4;
    debug_assert!(e % 2 == 1, "phase bookkeeping produced a Hermitian commutator");
    let coeff = match e {
        1 => -2.0,
        3 => 2.0,
        _ => {
            return Err(CoreError::MalformedInput(
                "phase bookkeeping violated anti-Hermiticity".into(),
            ))
        }
    };
    let result = PauliTerm {
        qubit_count: p.qubit_count,
        x_mask,
        z_mask,
    };
    Ok(Some((coeff, result)))
}

/// Real combination `i * Σ coeff * P` over canonical Pauli strings.
///
/// Terms live in a `BTreeMap` so iteration order (and with it every rank
/// decision downstream) is deterministic. Coefficients below the pruning
/// floor are dropped on insertion.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCombination {
    qubit_count: u32,
    terms: BTreeMap<PauliTerm, f64>,
}

impl PauliCombination {
    pub fn zero(qubit_count: u32) -> Self {
        Self {
            qubit_count,
            terms: BTreeMap::new(),
        }
    }

    pub fn single(term: PauliTerm, coeff: f64) -> Self {
        let mut c = Self::zero(term.qubit_count());
        c.add_term(term, coeff);
        c
    }

    pub fn from_terms(qubit_count: u32, terms: impl IntoIterator<Item = (PauliTerm, f64)>) -> Result<Self> {
        let mut c = Self::zero(qubit_count);
        for (t, v) in terms {
            if t.qubit_count() != qubit_count {
                return Err(CoreError::QubitCountMismatch(t.qubit_count(), qubit_count));
            }
            c.add_term(t, v);
        }
        Ok(c)
    }

    /// Parse from `(string, coeff)` pairs, e.g. `("XIZ", 0.5)`.
    pub fn parse(pairs: &[(&str, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(CoreError::MalformedInput("empty pauli sum".into()));
        }
        let first: PauliTerm = pairs[0].0.parse()?;
        let n = first.qubit_count();
        let mut c = Self::zero(n);
        for (s, v) in pairs {
            let t: PauliTerm = s.parse()?;
            if t.qubit_count() != n {
                return Err(CoreError::QubitCountMismatch(t.qubit_count(), n));
            }
            c.add_term(t, *v);
        }
        Ok(c)
    }

    pub fn qubit_count(&self) -> u32 {
        self.qubit_count
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliTerm, f64)> {
        self.terms.iter().map(|(t, c)| (t, *c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, term: PauliTerm, coeff: f64) {
        debug_assert_eq!(term.qubit_count(), self.qubit_count);
        use std::collections::btree_map::Entry;
        match self.terms.entry(term) {
            Entry::Vacant(slot) => {
                if coeff.abs() >= COEFF_FLOOR {
                    slot.insert(coeff);
                }
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().abs() < COEFF_FLOOR {
                    slot.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient on the identity string (must be zero for traceless elements).
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .get(&PauliTerm::identity(self.qubit_count))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::zero(self.qubit_count);
        for (t, v) in &self.terms {
            out.add_term(t.clone(), v * c);
        }
        out
    }

    /// `self += c * other`, pruning cancellations.
    pub fn add_scaled(&mut self, c: f64, other: &Self) -> Result<()> {
        if self.qubit_count != other.qubit_count {
            return Err(CoreError::QubitCountMismatch(self.qubit_count, other.qubit_count));
        }
        for (t, v) in &other.terms {
            self.add_term(t.clone(), c * v);
        }
        Ok(())
    }

    /// Hilbert-Schmidt inner product; Pauli strings are orthogonal with
    /// `tr(P†P) = 2^n`, so this is `2^n Σ a_P b_P`.
    pub fn hs_inner(&self, other: &Self) -> Result<f64> {
        if self.qubit_count != other.qubit_count {
            return Err(CoreError::QubitCountMismatch(self.qubit_count, other.qubit_count));
        }
        let scale = (self.qubit_count as f64).exp2();
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (&self.terms, &other.terms)
        } else {
            (&other.terms, &self.terms)
        };
        let mut acc = 0.0;
        for (t, v) in small {
            if let Some(w) = large.get(t) {
                acc += v * w;
            }
        }
        Ok(acc * scale)
    }

    pub fn norm(&self) -> f64 {
        let scale = (self.qubit_count as f64).exp2();
        (scale * self.terms.values().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn is_single_term(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn as_single_term(&self) -> Option<(&PauliTerm, f64)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(t, c)| (t, *c))
        } else {
            None
        }
    }

    /// Dense matrix of the full anti-Hermitian operator `i Σ c_P P`.
    pub fn to_dense(&self) -> Result<DenseOperator> {
        self.to_dense_with_cap(DENSE_QUBIT_CAP)
    }

    pub fn to_dense_with_cap(&self, cap: u32) -> Result<DenseOperator> {
        if self.qubit_count > cap {
            return Err(CoreError::DenseCapExceeded(self.qubit_count, cap));
        }
        let dim = 1usize << self.qubit_count;
        let mut out = DenseOperator::zeros(dim);
        for (t, c) in &self.terms {
            let m = t.to_dense().scale(Complex64::new(0.0, *c));
            out = out.add(&m)?;
        }
        Ok(out)
    }

    /// Tensor with another symbolic combination's worth of qubits, where
    /// `other` stands for a *Hermitian* Pauli sum (no `i` prefactor).
    fn tensor_expansion(&self, expansion: &[(PauliTerm, f64)], added_qubits: u32) -> Self {
        let mut out = Self::zero(self.qubit_count + added_qubits);
        for (p, a) in &self.terms {
            for (q, b) in expansion {
                out.add_term(p.tensor(q), a * b);
            }
        }
        out
    }

    /// Tensor with a Hermitian operator on `m` qubits: expands `h` in the
    /// Pauli basis (exact for Hermitian inputs) and distributes.
    pub fn tensor_with_hermitian(&self, h: &DenseOperator) -> Result<Self> {
        let expansion = expand_hermitian(h)?;
        let m = h.dim().trailing_zeros();
        Ok(self.tensor_expansion(&expansion, m))
    }

    /// Tensor with a single Pauli string (appended after this operator's qubits).
    pub fn tensor_with_term(&self, q: &PauliTerm) -> Self {
        self.tensor_expansion(std::slice::from_ref(&(q.clone(), 1.0)), q.qubit_count())
    }

    /// Serialized text form: list of `(string, coeff)` pairs in canonical order.
    pub fn to_pairs(&self) -> Vec<(String, f64)> {
        self.terms.iter().map(|(t, c)| (t.to_string(), *c)).collect()
    }
}

/// Bilinear expansion of `[a, b]` over the single-string commutator rule.
pub fn combination_commutator(a: &PauliCombination, b: &PauliCombination) -> Result<PauliCombination> {
    if a.qubit_count != b.qubit_count {
        return Err(CoreError::QubitCountMismatch(a.qubit_count, b.qubit_count));
    }
    let mut out = PauliCombination::zero(a.qubit_count);
    for (p, u) in &a.terms {
        for (q, v) in &b.terms {
            if let Some((c, r)) = pauli_commutator(p, q)? {
                out.add_term(r, c * u * v);
            }
        }
    }
    Ok(out)
}

/// Expand a Hermitian matrix on a power-of-two dimension in the Pauli
/// basis: `h = Σ coeff_P P` with real coefficients `tr(P h) / 2^m`.
///
/// The trace against each string is taken over its sparse action: with
/// `P = i^{|x∧z|} X^x Z^z`, column `r` maps to row `r ⊕ x` with sign
/// `(-1)^{<z,r>}`, so each coefficient costs `O(2^m)`.
pub fn expand_hermitian(h: &DenseOperator) -> Result<Vec<(PauliTerm, f64)>> {
    h.require_hermitian()?;
    let dim = h.dim();
    if !dim.is_power_of_two() {
        return Err(CoreError::NotPowerOfTwo(dim));
    }
    let m = dim.trailing_zeros();
    if m > DENSE_QUBIT_CAP {
        return Err(CoreError::DenseCapExceeded(m, DENSE_QUBIT_CAP));
    }
    // Qubit j is the slowest tensor factor, so its index bit is (m-1-j).
    let to_index_space = |mask: u64| -> usize {
        let mut idx = 0usize;
        for q in 0..m {
            if mask >> q & 1 != 0 {
                idx |= 1usize << (m - 1 - q);
            }
        }
        idx
    };
    let i_pow = [
        Complex64::ONE,
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let mut expansion = Vec::new();
    let mut residual_sq = 0.0;
    let chunks = mask_chunks(m);
    for code in 0..(1u64 << (2 * m)) {
        let x = code & ((1u64 << m) - 1);
        let z = code >> m;
        let x_idx = to_index_space(x);
        let z_idx = to_index_space(z);
        let phase = i_pow[((x & z).count_ones() % 4) as usize];
        let mut tr = Complex64::ZERO;
        for r in 0..dim {
            let sign = if (r & z_idx).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            tr += sign * h[(r, r ^ x_idx)];
        }
        tr = tr * phase / dim as f64;
        residual_sq += tr.im * tr.im;
        if tr.re.abs() >= COEFF_FLOOR {
            let mut x_mask: Mask = smallvec![0u64; chunks];
            let mut z_mask: Mask = smallvec![0u64; chunks];
            x_mask[0] = x;
            z_mask[0] = z;
            expansion.push((PauliTerm::from_masks(m, x_mask, z_mask)?, tr.re));
        }
    }
    if residual_sq.sqrt() * (dim as f64).sqrt() > 1e-10 * h.norm().max(1.0) {
        return Err(CoreError::NotHermitian(residual_sq.sqrt()));
    }
    Ok(expansion)
}

/// Anticommutation graph of a list of single Pauli terms: one vertex per
/// generator, an edge where the pair anticommutes, connectivity by BFS.
#[derive(Debug, Clone)]
pub struct AnticommutationGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub connected: bool,
}

pub fn anticommutation_graph(generators: &[PauliCombination]) -> Result<AnticommutationGraph> {
    let mut terms = Vec::with_capacity(generators.len());
    for (i, g) in generators.iter().enumerate() {
        match g.as_single_term() {
            Some((t, _)) => terms.push(t.clone()),
            None => return Err(CoreError::NotSingleTerm(i)),
        }
    }
    let n = terms.len();
    let mut edges = Vec::new();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if anticommutes(&terms[i], &terms[j])? {
                edges.push((i, j));
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    if n > 0 {
        seen[0] = true;
        queue.push_back(0);
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    let connected = seen.iter().all(|s| *s);
    Ok(AnticommutationGraph {
        vertex_count: n,
        edges,
        connected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::dense_commutator;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn term(s: &str) -> PauliTerm {
        s.parse().unwrap()
    }

    #[test]
    fn single_qubit_commutator_table() {
        let (c, r) = pauli_commutator(&term("X"), &term("Z")).unwrap().unwrap();
        assert_eq!((c, r.to_string().as_str()), (2.0, "Y"));

        let (c, r) = pauli_commutator(&term("Y"), &term("X")).unwrap().unwrap();
        assert_eq!((c, r.to_string().as_str()), (2.0, "Z"));

        let (c, r) = pauli_commutator(&term("X"), &term("Y")).unwrap().unwrap();
        assert_eq!((c, r.to_string().as_str()), (-2.0, "Z"));

        assert!(pauli_commutator(&term("X"), &term("X")).unwrap().is_none());
    }

    #[test]
    fn disjoint_support_commutes() {
        assert!(pauli_commutator(&term("XI"), &term("IZ")).unwrap().is_none());
    }

    #[test]
    fn two_qubit_sign_matches_dense() {
        // [iX⊗X, iZ⊗I] = +2 i(Y⊗X) under the Y = iXZ convention.
        let (c, r) = pauli_commutator(&term("XX"), &term("ZI")).unwrap().unwrap();
        assert_eq!((c, r.to_string().as_str()), (2.0, "YX"));

        let a = PauliCombination::single(term("XX"), 1.0);
        let b = PauliCombination::single(term("ZI"), 1.0);
        let symbolic = combination_commutator(&a, &b).unwrap().to_dense().unwrap();
        let dense = dense_commutator(&a.to_dense().unwrap(), &b.to_dense().unwrap()).unwrap();
        assert!(symbolic.sub(&dense).unwrap().norm() < 1e-12);
    }

    #[test]
    fn qubit_count_mismatch_is_an_error() {
        assert!(pauli_commutator(&term("X"), &term("XZ")).is_err());
        let a = PauliCombination::single(term("X"), 1.0);
        let b = PauliCombination::single(term("XZ"), 1.0);
        assert!(combination_commutator(&a, &b).is_err());
        assert!(a.hs_inner(&b).is_err());
    }

    #[test]
    fn combination_commutator_examples() {
        let a = PauliCombination::parse(&[("XI", 1.0), ("IX", 1.0)]).unwrap();
        let b = PauliCombination::parse(&[("ZZ", 1.0)]).unwrap();
        let got = combination_commutator(&a, &b).unwrap();
        let expected = PauliCombination::parse(&[("YZ", 2.0), ("ZY", 2.0)]).unwrap();
        let mut diff = got.clone();
        diff.add_scaled(-1.0, &expected).unwrap();
        assert!(diff.is_zero());

        // Antisymmetry in the degenerate form [a, a] = 0.
        assert!(combination_commutator(&a, &a).unwrap().is_zero());

        // Disjoint support.
        let x1 = PauliCombination::parse(&[("XI", 1.0)]).unwrap();
        let z2 = PauliCombination::parse(&[("IZ", 1.0)]).unwrap();
        assert!(combination_commutator(&x1, &z2).unwrap().is_zero());
    }

    #[test]
    fn tensor_with_hermitian_examples() {
        let ix = PauliCombination::single(term("X"), 1.0);

        // diag(1,2) = 1.5 I - 0.5 Z.
        let chi = DenseOperator::diagonal(&[1.0, 2.0]);
        let got = ix.tensor_with_hermitian(&chi).unwrap();
        let expected = PauliCombination::parse(&[("XI", 1.5), ("XZ", -0.5)]).unwrap();
        let mut diff = got.clone();
        diff.add_scaled(-1.0, &expected).unwrap();
        assert!(diff.norm() < 1e-12);

        // Identity tensor.
        let got = ix.tensor_with_hermitian(&DenseOperator::identity(2)).unwrap();
        let expected = PauliCombination::parse(&[("XI", 1.0)]).unwrap();
        let mut diff = got.clone();
        diff.add_scaled(-1.0, &expected).unwrap();
        assert!(diff.norm() < 1e-12);

        // Pauli ⊗ Pauli stays a single string.
        let izz = PauliCombination::single(term("ZZ"), 1.0);
        let got = izz.tensor_with_hermitian(&crate::dense::pauli_x()).unwrap();
        assert_eq!(got.to_pairs(), vec![("ZZX".to_string(), 1.0)]);
    }

    #[test]
    fn hermitian_expansion_reconstructs_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for m in 1..=3u32 {
            let dim = 1usize << m;
            let mut h = DenseOperator::zeros(dim);
            for i in 0..dim {
                for j in 0..dim {
                    h[(i, j)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                }
            }
            let h = h.add(&h.adjoint()).unwrap().scale_real(0.5);
            let expansion = expand_hermitian(&h).unwrap();
            let mut rebuilt = DenseOperator::zeros(dim);
            for (t, c) in &expansion {
                rebuilt.add_scaled_real(*c, &t.to_dense());
            }
            assert!(rebuilt.sub(&h).unwrap().norm() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn tensor_with_non_hermitian_fails() {
        let ix = PauliCombination::single(term("X"), 1.0);
        let mut bad = DenseOperator::zeros(2);
        bad[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(ix.tensor_with_hermitian(&bad).is_err());
    }

    #[test]
    fn to_dense_single_qubit() {
        let ix = PauliCombination::single(term("X"), 1.0).to_dense().unwrap();
        assert_eq!(ix[(0, 1)], Complex64::new(0.0, 1.0));
        assert_eq!(ix[(1, 0)], Complex64::new(0.0, 1.0));

        let ixz = PauliCombination::parse(&[("X", 1.0), ("Z", 1.0)])
            .unwrap()
            .to_dense()
            .unwrap();
        assert_eq!(ixz[(0, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(ixz[(0, 1)], Complex64::new(0.0, 1.0));
        assert_eq!(ixz[(1, 0)], Complex64::new(0.0, 1.0));
        assert_eq!(ixz[(1, 1)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn dense_cap_enforced() {
        let wide = PauliCombination::single(PauliTerm::identity(11), 1.0);
        assert!(matches!(
            wide.to_dense(),
            Err(CoreError::DenseCapExceeded(11, DENSE_QUBIT_CAP))
        ));
    }

    fn random_combination(rng: &mut ChaCha8Rng, qubits: u32, terms: usize) -> PauliCombination {
        let mut c = PauliCombination::zero(qubits);
        while c.term_count() < terms {
            let s: String = (0..qubits)
                .map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)])
                .collect();
            let t: PauliTerm = s.parse().unwrap();
            if t.is_identity() {
                continue;
            }
            c.add_term(t, rng.random_range(-2.0..2.0));
        }
        c
    }

    #[test]
    fn parseval_norm_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let c = random_combination(&mut rng, 3, 4);
            let dense_norm = c.to_dense().unwrap().norm();
            assert!((dense_norm - c.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn symbolic_commutator_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for qubits in 2..=4u32 {
            for _ in 0..8 {
                let a = random_combination(&mut rng, qubits, 3);
                let b = random_combination(&mut rng, qubits, 3);
                let symbolic = combination_commutator(&a, &b).unwrap().to_dense().unwrap();
                let dense =
                    dense_commutator(&a.to_dense().unwrap(), &b.to_dense().unwrap()).unwrap();
                assert!(symbolic.sub(&dense).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn jacobi_identity_on_random_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let n = rng.random_range(1..=4);
            let a = random_combination(&mut rng, n, 1);
            let b = random_combination(&mut rng, n, 1);
            let c = random_combination(&mut rng, n, 1);
            let mut total = combination_commutator(&a, &combination_commutator(&b, &c).unwrap()).unwrap();
            total
                .add_scaled(1.0, &combination_commutator(&b, &combination_commutator(&c, &a).unwrap()).unwrap())
                .unwrap();
            total
                .add_scaled(1.0, &combination_commutator(&c, &combination_commutator(&a, &b).unwrap()).unwrap())
                .unwrap();
            assert!(total.is_zero(), "Jacobi identity violated");
        }
    }

    #[test]
    fn single_term_squares_to_minus_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let n = rng.random_range(1..=3);
            let c = random_combination(&mut rng, n, 1);
            let (t, _) = c.as_single_term().unwrap();
            let ip = PauliCombination::single(t.clone(), 1.0).to_dense().unwrap();
            let sq = ip.matmul(&ip).unwrap();
            let dim = ip.dim();
            let minus_i = DenseOperator::identity(dim).scale_real(-1.0);
            assert!(sq.sub(&minus_i).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn anticommutation_graph_cases() {
        let g = anticommutation_graph(&[
            PauliCombination::single(term("X"), 1.0),
            PauliCombination::single(term("Z"), 1.0),
        ])
        .unwrap();
        assert_eq!(g.edges, vec![(0, 1)]);
        assert!(g.connected);

        let g = anticommutation_graph(&[
            PauliCombination::single(term("XI"), 1.0),
            PauliCombination::single(term("IX"), 1.0),
        ])
        .unwrap();
        assert!(g.edges.is_empty());
        assert!(!g.connected);

        let g = anticommutation_graph(&[
            PauliCombination::single(term("XI"), 1.0),
            PauliCombination::single(term("ZZ"), 1.0),
            PauliCombination::single(term("IX"), 1.0),
        ])
        .unwrap();
        assert_eq!(g.edges, vec![(0, 1), (1, 2)]);
        assert!(g.connected);

        let multi = PauliCombination::parse(&[("XI", 1.0), ("IZ", 0.5)]).unwrap();
        assert!(matches!(
            anticommutation_graph(&[multi]),
            Err(CoreError::NotSingleTerm(0))
        ));
    }

    fn string_pair() -> impl Strategy<Value = (String, String)> {
        (1usize..=6).prop_flat_map(|n| {
            let letters = proptest::sample::select(vec!['I', 'X', 'Y', 'Z']);
            let one = proptest::collection::vec(letters.clone(), n)
                .prop_map(|v| v.into_iter().collect::<String>());
            let two = proptest::collection::vec(letters, n)
                .prop_map(|v| v.into_iter().collect::<String>());
            (one, two)
        })
    }

    proptest! {
        #[test]
        fn commutator_antisymmetry((s1, s2) in string_pair()) {
            let p: PauliTerm = s1.parse().unwrap();
            let q: PauliTerm = s2.parse().unwrap();
            let pq = pauli_commutator(&p, &q).unwrap();
            let qp = pauli_commutator(&q, &p).unwrap();
            match (pq, qp) {
                (None, None) => {}
                (Some((c1, r1)), Some((c2, r2))) => {
                    prop_assert_eq!(r1, r2);
                    prop_assert_eq!(c1, -c2);
                }
                _ => prop_assert!(false, "antisymmetry broken"),
            }
        }

        #[test]
        fn text_round_trip(s in "[IXYZ]{1,80}") {
            let t: PauliTerm = s.parse().unwrap();
            prop_assert_eq!(t.to_string(), s);
        }
    }
}
