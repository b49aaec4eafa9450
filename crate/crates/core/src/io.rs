//! JSON file formats. Parse failures report a line and column; validation
//! failures report the path of the offending field.

use serde::{Deserialize, Serialize};

use crate::anneal::{LinearTermsPath, PathFamily};
use crate::builders::{ClassicalHamiltonian, ClassicalTerm, GibbsPath, InterpolatedCircuitPath, ReversibleCircuit};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, LocalTerm};
use crate::protocol::SatInstance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub support: Vec<usize>,
    /// Row-major.
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalJson {
    pub n: usize,
    pub classical_terms: Vec<ClassicalTerm>,
    #[serde(default)]
    pub max_degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathJson {
    Gibbs {
        n: usize,
        classical_terms: Vec<ClassicalTerm>,
        beta_final: f64,
    },
    LinearTerms {
        n: usize,
        terms_start: Vec<TermJson>,
        terms_end: Vec<TermJson>,
    },
    ClockInterp {
        circuit: ReversibleCircuit,
        #[serde(default)]
        include_measurement: bool,
    },
}

/// A loaded path. Clock interpolation paths are not stoquastic and may only
/// be given to the dense oracle.
pub enum LoadedPath {
    Gibbs(GibbsPath),
    LinearTerms(LinearTermsPath),
    ClockInterp(InterpolatedCircuitPath),
}

impl LoadedPath {
    pub fn as_path(&self) -> &dyn PathFamily {
        match self {
            LoadedPath::Gibbs(p) => p,
            LoadedPath::LinearTerms(p) => p,
            LoadedPath::ClockInterp(p) => p,
        }
    }

    pub fn oracle_only(&self) -> bool {
        matches!(self, LoadedPath::ClockInterp(_))
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::invalid(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

fn prefixed(prefix: &str, e: Error) -> Error {
    match e {
        Error::Invalid { at, msg } => Error::invalid(format!("{prefix}.{at}"), msg),
        other => other,
    }
}

pub fn terms_from_json(field: &str, terms: &[TermJson]) -> Result<Vec<LocalTerm>> {
    terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            LocalTerm::from_rows(t.support.clone(), &t.matrix).map_err(|e| prefixed(&format!("{field}[{i}]"), e))
        })
        .collect()
}

pub fn terms_to_json(terms: &[LocalTerm]) -> Vec<TermJson> {
    terms
        .iter()
        .map(|t| TermJson {
            support: t.support().to_vec(),
            matrix: t.rows(),
        })
        .collect()
}

pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian> {
    let j: HamiltonianJson = parse(text)?;
    Hamiltonian::new(j.n, terms_from_json("terms", &j.terms)?)
}

pub fn hamiltonian_json(h: &Hamiltonian) -> HamiltonianJson {
    HamiltonianJson {
        n: h.n(),
        terms: terms_to_json(h.terms()),
        epsilon: None,
    }
}

/// A Hamiltonian file with a required `epsilon` field.
pub fn parse_sat_instance(text: &str) -> Result<SatInstance> {
    let j: HamiltonianJson = parse(text)?;
    let eps = j.epsilon.ok_or_else(|| Error::invalid("epsilon", "missing promise gap"))?;
    SatInstance::new(j.n, terms_from_json("terms", &j.terms)?, eps)
}

pub fn sat_instance_json(inst: &SatInstance) -> HamiltonianJson {
    HamiltonianJson {
        epsilon: Some(inst.epsilon()),
        ..hamiltonian_json(inst.hamiltonian())
    }
}

pub fn parse_classical(text: &str) -> Result<ClassicalHamiltonian> {
    let j: ClassicalJson = parse(text)?;
    ClassicalHamiltonian::new(j.n, j.classical_terms, j.max_degree)
}

pub fn parse_circuit(text: &str) -> Result<ReversibleCircuit> {
    let c: ReversibleCircuit = parse(text)?;
    c.validate()?;
    Ok(c)
}

pub fn parse_path(text: &str) -> Result<LoadedPath> {
    Ok(match parse::<PathJson>(text)? {
        PathJson::Gibbs {
            n,
            classical_terms,
            beta_final,
        } => {
            if !beta_final.is_finite() {
                return Err(Error::invalid("beta_final", "not finite"));
            }
            LoadedPath::Gibbs(GibbsPath {
                classical: ClassicalHamiltonian::new(n, classical_terms, None)?,
                beta_final,
            })
        }
        PathJson::LinearTerms {
            n,
            terms_start,
            terms_end,
        } => LoadedPath::LinearTerms(LinearTermsPath::new(
            n,
            terms_from_json("terms_start", &terms_start)?,
            terms_from_json("terms_end", &terms_end)?,
        )?),
        PathJson::ClockInterp {
            circuit,
            include_measurement,
        } => LoadedPath::ClockInterp(InterpolatedCircuitPath::new(circuit, include_measurement)?),
    })
}

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(path.display().to_string(), e.to_string()))
}
