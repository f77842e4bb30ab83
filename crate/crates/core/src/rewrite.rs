//! Rewriting arbitrary nested commutators into right-nested form.
//!
//! A right-nested sequence is stored innermost first: `[k1, .., kl]` is the
//! value `[A_kl, [.., [A_k2, A_k1]..]]`. The rewriter peels the outermost
//! factor off the right operand with the Jacobi identity,
//! `[P, [A, Q]] = [A, [P, Q]] - [[A, P], Q]`, until both operands are plain
//! sequences. The output is a linear combination that evaluates to the same
//! operator as the input tree on any concrete assignment.

use std::collections::BTreeMap;

use crate::error::{CoreError, Result};
use crate::operator::Operator;
use crate::policy::COEFF_FLOOR;

/// A nested commutator expression over generator symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommutatorTree {
    Leaf(usize),
    Bracket(Box<CommutatorTree>, Box<CommutatorTree>),
}

impl CommutatorTree {
    pub fn leaf(index: usize) -> Self {
        CommutatorTree::Leaf(index)
    }

    pub fn bracket(left: CommutatorTree, right: CommutatorTree) -> Self {
        CommutatorTree::Bracket(Box::new(left), Box::new(right))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            CommutatorTree::Leaf(_) => 1,
            CommutatorTree::Bracket(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn max_symbol(&self) -> usize {
        match self {
            CommutatorTree::Leaf(i) => *i,
            CommutatorTree::Bracket(l, r) => l.max_symbol().max(r.max_symbol()),
        }
    }

    /// Evaluate the tree on a concrete operator assignment.
    pub fn evaluate(&self, assignment: &[Operator]) -> Result<Operator> {
        match self {
            CommutatorTree::Leaf(i) => assignment
                .get(*i)
                .cloned()
                .ok_or_else(|| CoreError::MalformedTree(format!("leaf symbol {i} out of range"))),
            CommutatorTree::Bracket(l, r) => {
                let lv = l.evaluate(assignment)?;
                let rv = r.evaluate(assignment)?;
                lv.commutator(&rv)
            }
        }
    }
}

/// A linear combination of right-nested sequences.
pub type RightNestedCombination = Vec<(f64, Vec<usize>)>;

/// Rewrite a commutator tree into a right-nested linear combination.
pub fn right_nested_rewrite(tree: &CommutatorTree) -> RightNestedCombination {
    let mut acc: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    collect(tree, &mut acc);
    acc.into_iter()
        .filter(|(_, c)| c.abs() >= COEFF_FLOOR)
        .map(|(seq, c)| (c, seq))
        .collect()
}

fn collect(tree: &CommutatorTree, acc: &mut BTreeMap<Vec<usize>, f64>) {
    match tree {
        CommutatorTree::Leaf(i) => add(acc, 1.0, vec![*i]),
        CommutatorTree::Bracket(l, r) => {
            let left = right_nested_rewrite(l);
            let right = right_nested_rewrite(r);
            for (a, s) in &left {
                for (b, t) in &right {
                    for (c, seq) in bracket_sequences(s, t) {
                        add(acc, a * b * c, seq);
                    }
                }
            }
        }
    }
}

fn add(acc: &mut BTreeMap<Vec<usize>, f64>, coeff: f64, seq: Vec<usize>) {
    *acc.entry(seq).or_insert(0.0) += coeff;
}

/// Express `[val(s), val(t)]` as a right-nested combination. The recursion
/// shortens `t` each step, peeling its outermost generator `a`:
/// `[P, [A_a, Q']] = [A_a, [P, Q']] - [[A_a, P], Q']`.
fn bracket_sequences(s: &[usize], t: &[usize]) -> Vec<(f64, Vec<usize>)> {
    if s.len() == 1 {
        // [A_i, val(t)] = val(t ∘ i).
        let mut seq = t.to_vec();
        seq.push(s[0]);
        return vec![(1.0, seq)];
    }
    if t.len() == 1 {
        // [val(s), A_j] = -val(s ∘ j).
        let mut seq = s.to_vec();
        seq.push(t[0]);
        return vec![(-1.0, seq)];
    }
    let (a, t_rest) = t.split_last().unwrap();
    let mut out = Vec::new();
    for (c, mut seq) in bracket_sequences(s, t_rest) {
        seq.push(*a);
        out.push((c, seq));
    }
    let mut s_ext = s.to_vec();
    s_ext.push(*a);
    for (c, seq) in bracket_sequences(&s_ext, t_rest) {
        out.push((-c, seq));
    }
    out
}

/// Seeded random commutator tree with the given leaf count, for
/// evaluation-equivalence sweeps.
pub fn random_tree(rng: &mut impl rand::Rng, leaves: usize, symbols: usize) -> CommutatorTree {
    if leaves <= 1 {
        return CommutatorTree::leaf(rng.random_range(0..symbols));
    }
    let left = rng.random_range(1..leaves);
    CommutatorTree::bracket(
        random_tree(rng, left, symbols),
        random_tree(rng, leaves - left, symbols),
    )
}

/// Evaluate a right-nested combination on a concrete assignment.
pub fn evaluate_combination(
    combination: &RightNestedCombination,
    assignment: &[Operator],
) -> Result<Operator> {
    if assignment.is_empty() {
        return Err(CoreError::MalformedTree("empty assignment".into()));
    }
    let mut out = assignment[0].scale(0.0);
    for (coeff, seq) in combination {
        let value = crate::closure::sequence_value(seq, assignment)?;
        out.add_scaled(*coeff, &value)?;
    }
    Ok(out)
}
