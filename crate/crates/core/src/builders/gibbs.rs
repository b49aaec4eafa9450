//! Coherent Gibbs states of classical Hamiltonians.
//!
//! For a diagonal `H_cl` and inverse temperature `β`, the terms
//! `Γ_j - X_j` with `Γ_j(x) = exp(β (H_cl(x) - H_cl(x ⊕ e_j)) / 2)` are
//! stoquastic, positive semidefinite, and all annihilate the state with
//! amplitudes `∝ exp(-β H_cl(x) / 2)`.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::anneal::PathFamily;
use crate::basis::BasisString;
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, LocalTerm};

/// Largest support a single `Γ_j - X_j` term may have.
pub const GIBBS_MAX_LOCALITY: usize = 6;

/// One diagonal term: `values[l]` is its energy on local assignment `l` of
/// `support` (support[0] is the low bit of `l`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTerm {
    pub support: Vec<usize>,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalHamiltonian {
    n: usize,
    terms: Vec<ClassicalTerm>,
}

impl ClassicalHamiltonian {
    /// Validates supports and values. `max_degree`, when given, bounds the
    /// number of terms touching any qubit.
    pub fn new(n: usize, terms: Vec<ClassicalTerm>, max_degree: Option<usize>) -> Result<Self> {
        if n == 0 || n > crate::basis::MAX_QUBITS {
            return Err(Error::invalid("n", format!("must be in 1..={}", crate::basis::MAX_QUBITS)));
        }
        let mut degree = vec![0usize; n];
        for (a, t) in terms.iter().enumerate() {
            let at = |f: &str| format!("classical_terms[{a}].{f}");
            if t.support.is_empty() || t.support.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(at("support"), "must be non-empty and strictly increasing"));
            }
            if let Some(&q) = t.support.iter().find(|&&q| q >= n) {
                return Err(Error::invalid(at("support"), format!("qubit {q} out of range for n = {n}")));
            }
            if t.support.len() > GIBBS_MAX_LOCALITY {
                return Err(Error::Locality {
                    size: t.support.len(),
                    max: GIBBS_MAX_LOCALITY,
                });
            }
            if t.values.len() != 1 << t.support.len() {
                return Err(Error::invalid(
                    at("values"),
                    format!("expected {} values, got {}", 1 << t.support.len(), t.values.len()),
                ));
            }
            if let Some(i) = t.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("classical_terms[{a}].values[{i}]"), "not finite"));
            }
            for &q in &t.support {
                degree[q] += 1;
            }
        }
        if let Some(max) = max_degree {
            if let Some(q) = degree.iter().position(|&d| d > max) {
                return Err(Error::invalid(
                    "classical_terms",
                    format!("qubit {q} is touched by {} terms, above the bound {max}", degree[q]),
                ));
            }
        }
        Ok(ClassicalHamiltonian { n, terms })
    }

    /// `Σ Z_i Z_{i+1}` on an open chain, with `Z = diag(1, -1)`.
    pub fn ising_chain(n: usize, coupling: f64) -> Result<Self> {
        let terms = (0..n.saturating_sub(1))
            .map(|i| ClassicalTerm {
                support: vec![i, i + 1],
                values: vec![coupling, -coupling, -coupling, coupling],
            })
            .collect();
        Self::new(n, terms, None)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[ClassicalTerm] {
        &self.terms
    }

    pub fn energy(&self, x: BasisString) -> f64 {
        self.terms.iter().map(|t| t.values[x.gather(&t.support)]).sum()
    }

    /// Exact `exp(-β H) / Z` over all strings.
    pub fn gibbs_distribution(&self, beta: f64) -> Vec<f64> {
        let e: Vec<f64> = BasisString::all(self.n).map(|x| self.energy(x)).collect();
        let emin = e.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = e.iter().map(|&v| (-beta * (v - emin)).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|v| v / z).collect()
    }
}

/// A Gibbs-derived Hamiltonian and the coherent state it is built for.
#[derive(Clone, Debug)]
pub struct GibbsInstance {
    pub hamiltonian: Hamiltonian,
    pub classical: ClassicalHamiltonian,
    pub beta: f64,
}

impl GibbsInstance {
    /// Normalized amplitudes `exp(-β H_cl(x)/2)` over all strings.
    pub fn coherent_amplitudes(&self) -> Vec<f64> {
        self.classical
            .gibbs_distribution(self.beta)
            .into_iter()
            .map(f64::sqrt)
            .collect()
    }
}

/// One `Γ_j - X_j` term per qubit. Qubits outside every classical term get
/// `I - X`.
pub fn gibbs_sff(hc: &ClassicalHamiltonian, beta: f64) -> Result<GibbsInstance> {
    if !beta.is_finite() {
        return Err(Error::Parameter(format!("inverse temperature must be finite, got {beta}")));
    }
    let terms = (0..hc.n)
        .map(|j| gibbs_term(hc, beta, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(GibbsInstance {
        hamiltonian: Hamiltonian::new(hc.n, terms)?,
        classical: hc.clone(),
        beta,
    })
}

fn gibbs_term(hc: &ClassicalHamiltonian, beta: f64, j: usize) -> Result<LocalTerm> {
    let touching: Vec<&ClassicalTerm> = hc.terms.iter().filter(|t| t.support.contains(&j)).collect();
    let support: Vec<usize> = touching
        .iter()
        .flat_map(|t| t.support.iter().copied())
        .chain(std::iter::once(j))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if support.len() > GIBBS_MAX_LOCALITY {
        return Err(Error::Locality {
            size: support.len(),
            max: GIBBS_MAX_LOCALITY,
        });
    }
    let pos = support.iter().position(|&q| q == j).expect("j is in its own support");
    let dim = 1usize << support.len();
    let base = BasisString::from_raw(0, hc.n);
    // Only terms containing j change under the flip, so the local energy
    // difference is all that matters.
    let local_energy = |l: usize| -> f64 {
        let x = base.scatter(&support, l);
        touching.iter().map(|t| t.values[x.gather(&t.support)]).sum()
    };
    let mut m = DMatrix::zeros(dim, dim);
    for l in 0..dim {
        let flipped = l ^ (1 << pos);
        m[(l, l)] = (beta * (local_energy(l) - local_energy(flipped)) / 2.0).exp();
        m[(flipped, l)] = -1.0;
    }
    LocalTerm::new(support, m)
}

/// `s ↦ gibbs_sff(H_cl, s · β_final)`.
#[derive(Clone, Debug)]
pub struct GibbsPath {
    pub classical: ClassicalHamiltonian,
    pub beta_final: f64,
}

impl PathFamily for GibbsPath {
    fn n(&self) -> usize {
        self.classical.n()
    }

    fn terms_at(&self, s: f64) -> Result<Vec<LocalTerm>> {
        Ok(gibbs_sff(&self.classical, s * self.beta_final)?.hamiltonian.terms().to_vec())
    }
}
