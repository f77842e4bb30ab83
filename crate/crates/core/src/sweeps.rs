//! Seeded random generator-set samplers for theorem sweeps. The seed fully
//! determines every sampled input, so verdicts are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constructions::GeneratorSpec;
use crate::error::Result;
use crate::operator::Operator;
use crate::pauli::{anticommutation_graph, PauliCombination, PauliTerm};
use crate::policy::TolerancePolicy;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_term(rng: &mut ChaCha8Rng, qubits: u32) -> PauliTerm {
    loop {
        let s: String = (0..qubits)
            .map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)])
            .collect();
        let t: PauliTerm = s.parse().expect("generated string is valid");
        if !t.is_identity() {
            return t;
        }
    }
}

/// Random set of distinct single Pauli terms, `i*P` each.
pub fn random_pauli_term_spec(
    rng: &mut ChaCha8Rng,
    generator_range: std::ops::RangeInclusive<usize>,
    qubit_range: std::ops::RangeInclusive<u32>,
    policy: &TolerancePolicy,
) -> Result<GeneratorSpec> {
    loop {
        let l = rng.random_range(generator_range.clone());
        let n = rng.random_range(qubit_range.clone());
        let mut terms: Vec<PauliTerm> = Vec::new();
        let mut tries = 0;
        while terms.len() < l && tries < 200 {
            tries += 1;
            let t = random_term(rng, n);
            if !terms.contains(&t) {
                terms.push(t);
            }
        }
        if terms.len() < l {
            continue;
        }
        let generators: Vec<Operator> = terms
            .into_iter()
            .map(|t| Operator::Pauli(PauliCombination::single(t, 1.0)))
            .collect();
        if let Ok(spec) = GeneratorSpec::new(n, generators, "random-pauli-terms", policy) {
            return Ok(spec);
        }
    }
}

/// Random single-term Pauli set whose anticommutation graph is connected.
pub fn random_connected_pauli_spec(
    rng: &mut ChaCha8Rng,
    generator_range: std::ops::RangeInclusive<usize>,
    qubit_range: std::ops::RangeInclusive<u32>,
    policy: &TolerancePolicy,
) -> Result<GeneratorSpec> {
    loop {
        let spec = random_pauli_term_spec(rng, generator_range.clone(), qubit_range.clone(), policy)?;
        let combos: Vec<PauliCombination> = spec
            .generators()
            .iter()
            .map(|g| g.as_pauli().cloned().expect("sampler emits symbolic operators"))
            .collect();
        if anticommutation_graph(&combos)?.connected {
            return Ok(spec);
        }
    }
}

/// Random two-generator set of small Pauli combinations on at most two
/// qubits, exercising all Table-1 membership cases over a sweep.
pub fn random_two_generator_spec(
    rng: &mut ChaCha8Rng,
    policy: &TolerancePolicy,
) -> Result<GeneratorSpec> {
    loop {
        let n = rng.random_range(1..=2u32);
        let mut generators = Vec::with_capacity(2);
        for _ in 0..2 {
            let terms = rng.random_range(1..=3usize);
            let mut c = PauliCombination::zero(n);
            for _ in 0..terms {
                let coeff = [1.0, -1.0, 0.5, 2.0][rng.random_range(0..4)];
                c.add_term(random_term(rng, n), coeff);
            }
            if c.is_zero() {
                break;
            }
            generators.push(Operator::Pauli(c));
        }
        if generators.len() < 2 {
            continue;
        }
        if let Ok(spec) = GeneratorSpec::new(n, generators, "random-two-generator", policy) {
            return Ok(spec);
        }
    }
}

/// Random Pauli sets with one- or two-term combinations, for the closure
/// strategy-equivalence sweep.
pub fn random_mixed_pauli_spec(
    rng: &mut ChaCha8Rng,
    generator_range: std::ops::RangeInclusive<usize>,
    qubit_range: std::ops::RangeInclusive<u32>,
    policy: &TolerancePolicy,
) -> Result<GeneratorSpec> {
    loop {
        let l = rng.random_range(generator_range.clone());
        let n = rng.random_range(qubit_range.clone());
        let mut generators = Vec::with_capacity(l);
        for _ in 0..l {
            let terms = rng.random_range(1..=2usize);
            let mut c = PauliCombination::zero(n);
            for _ in 0..terms {
                let coeff = [1.0, -1.0, 0.5][rng.random_range(0..3)];
                c.add_term(random_term(rng, n), coeff);
            }
            if !c.is_zero() {
                generators.push(Operator::Pauli(c));
            }
        }
        if generators.len() < l {
            continue;
        }
        if let Ok(spec) = GeneratorSpec::new(n, generators, "random-mixed-pauli", policy) {
            return Ok(spec);
        }
    }
}

/// Random pair of distinct single Pauli terms on a shared register.
pub fn random_pauli_pair(rng: &mut ChaCha8Rng, qubit_range: std::ops::RangeInclusive<u32>) -> (Operator, Operator) {
    let n = rng.random_range(qubit_range);
    let a = random_term(rng, n);
    let b = loop {
        let b = random_term(rng, n);
        if b != a {
            break b;
        }
    };
    (
        Operator::Pauli(PauliCombination::single(a, 1.0)),
        Operator::Pauli(PauliCombination::single(b, 1.0)),
    )
}

/// Named base sets used by the command-line harness.
pub fn builtin_base(name: &str, policy: &TolerancePolicy) -> Result<GeneratorSpec> {
    match name {
        "pauli-xz" => GeneratorSpec::new(
            1,
            vec![
                Operator::Pauli(PauliCombination::parse(&[("X", 1.0)])?),
                Operator::Pauli(PauliCombination::parse(&[("Z", 1.0)])?),
            ],
            "pauli-xz",
            policy,
        ),
        // {iX₁, i(Z₁+Z₂)}: dim_g 4, dim_gg 3, center 1.
        "x1-z1z2" => GeneratorSpec::new(
            2,
            vec![
                Operator::Pauli(PauliCombination::parse(&[("XI", 1.0)])?),
                Operator::Pauli(PauliCombination::parse(&[("ZI", 1.0), ("IZ", 1.0)])?),
            ],
            "x1-z1z2",
            policy,
        ),
        other => Err(crate::error::CoreError::MalformedInput(format!(
            "unknown builtin base '{other}' (expected pauli-xz or x1-z1z2)"
        ))),
    }
}
