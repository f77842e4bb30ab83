//! Spec-file and graph-file JSON schemas.
//!
//! Coefficients are serialized as decimal strings with 17 significant
//! digits, which round-trips every f64 bit-exactly; plain JSON numbers are
//! also accepted on input.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::constructions::{GeneratorSpec, Graph};
use crate::dense::DenseOperator;
use crate::error::{CoreError, Result};
use crate::operator::Operator;
use crate::pauli::{PauliCombination, PauliTerm};
use crate::policy::TolerancePolicy;

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn format_coeff(v: f64) -> String {
    format!("{v:.16e}")
}

/// An f64 stored as a decimal string on disk; numbers are accepted too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coeff(pub f64);

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_coeff(self.0))
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(Coeff(v)),
            Raw::Text(s) => s
                .trim()
                .parse::<f64>()
                .map(Coeff)
                .map_err(|e| D::Error::custom(format!("bad coefficient '{s}': {e}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PauliSumTerm {
    pub string: String,
    pub coeff: Coeff,
}

/// One complex entry as an `[re, im]` pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexEntry(pub Coeff, pub Coeff);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorEntry {
    PauliSum(Vec<PauliSumTerm>),
    Dense(Vec<Vec<ComplexEntry>>),
}

/// On-disk description of a generator set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecFile {
    pub qubits: u32,
    pub generators: Vec<GeneratorEntry>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub meta: serde_json::Map<String, serde_json::Value>,
}

impl SpecFile {
    pub fn from_spec(spec: &GeneratorSpec) -> Self {
        let generators = spec
            .generators()
            .iter()
            .map(|g| match g {
                Operator::Pauli(c) => GeneratorEntry::PauliSum(
                    c.to_pairs()
                        .into_iter()
                        .map(|(string, v)| PauliSumTerm {
                            string,
                            coeff: Coeff(v),
                        })
                        .collect(),
                ),
                Operator::Dense(m) => {
                    let d = m.dim();
                    let rows = (0..d)
                        .map(|i| {
                            (0..d)
                                .map(|j| ComplexEntry(Coeff(m[(i, j)].re), Coeff(m[(i, j)].im)))
                                .collect()
                        })
                        .collect();
                    GeneratorEntry::Dense(rows)
                }
            })
            .collect();
        let mut meta = serde_json::Map::new();
        meta.insert(
            "family".into(),
            serde_json::Value::String(spec.family_tag().to_string()),
        );
        SpecFile {
            qubits: spec.qubit_count(),
            generators,
            meta,
        }
    }

    /// Validate and convert into a `GeneratorSpec`. Mixed symbolic and
    /// dense entries in one file are rejected.
    pub fn to_spec(&self, policy: &TolerancePolicy) -> Result<GeneratorSpec> {
        if self.qubits == 0 {
            return Err(CoreError::MalformedInput("qubits must be positive".into()));
        }
        if self.generators.is_empty() {
            return Err(CoreError::EmptyGenerators);
        }
        let any_pauli = self
            .generators
            .iter()
            .any(|g| matches!(g, GeneratorEntry::PauliSum(_)));
        let any_dense = self
            .generators
            .iter()
            .any(|g| matches!(g, GeneratorEntry::Dense(_)));
        if any_pauli && any_dense {
            return Err(CoreError::MalformedInput(
                "mixed pauli_sum and dense generators in one spec".into(),
            ));
        }
        let dim = 1usize << self.qubits;
        let mut generators = Vec::with_capacity(self.generators.len());
        for entry in &self.generators {
            match entry {
                GeneratorEntry::PauliSum(terms) => {
                    if terms.is_empty() {
                        return Err(CoreError::MalformedInput("empty pauli_sum".into()));
                    }
                    let mut combo = PauliCombination::zero(self.qubits);
                    for t in terms {
                        let term: PauliTerm = t.string.parse()?;
                        if term.qubit_count() != self.qubits {
                            return Err(CoreError::QubitCountMismatch(
                                term.qubit_count(),
                                self.qubits,
                            ));
                        }
                        combo.add_term(term, t.coeff.0);
                    }
                    generators.push(Operator::Pauli(combo));
                }
                GeneratorEntry::Dense(rows) => {
                    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                        return Err(CoreError::MalformedInput(format!(
                            "dense generator must be {dim}x{dim} for {} qubits",
                            self.qubits
                        )));
                    }
                    let mut entries = Vec::with_capacity(dim * dim);
                    for row in rows {
                        for ComplexEntry(re, im) in row {
                            entries.push(Complex64::new(re.0, im.0));
                        }
                    }
                    generators.push(Operator::Dense(DenseOperator::from_entries(dim, entries)?));
                }
            }
        }
        let family = self
            .meta
            .get("family")
            .and_then(|v| v.as_str())
            .unwrap_or("spec-file")
            .to_string();
        GeneratorSpec::new(self.qubits, generators, family, policy)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec file serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CoreError::MalformedInput(e.to_string()))
    }
}

/// On-disk graph: 1-indexed vertices, undirected edge list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: u32,
    pub edges: Vec<(u32, u32)>,
}

impl GraphFile {
    pub fn to_graph(&self) -> Result<Graph> {
        Graph::new(self.vertices, self.edges.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CoreError::MalformedInput(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serialization cannot fail")
    }
}
