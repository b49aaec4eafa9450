//! Dense exact diagonalization for small registers.
//!
//! This is the ground truth every stochastic routine is checked against:
//! ground energies, gaps, non-negative ground bases, frustration-freeness
//! and unsat-values, all by a full symmetric eigensolve of the `2^n × 2^n`
//! matrix.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::basis::BasisString;
use crate::error::{Error, Result};
use crate::hamiltonian::{apply_to_basis, Hamiltonian};
use crate::projector::decompose;
use crate::protocol::SatInstance;

/// Hard cap on dense eigensolves.
pub const MAX_DENSE_QUBITS: usize = 14;
/// Amplitudes at or below this are outside the support of a state.
pub const TAU_SUPP: f64 = 1e-10;
/// Connectivity threshold when splitting a numerical ground projector.
const GROUND_BLOCK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub lambda_min: f64,
    /// Distance from `lambda_min` to the first eigenvalue outside the ground
    /// cluster; 0 when the whole spectrum is degenerate.
    pub gap: f64,
    pub ground_degeneracy: usize,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
    pub report: SpectrumReport,
}

impl Spectrum {
    /// Orthonormal columns spanning the ground space.
    pub fn ground_vectors(&self) -> DMatrix<f64> {
        self.eigenvectors
            .columns(0, self.report.ground_degeneracy)
            .into_owned()
    }

    pub fn ground_projector(&self) -> DMatrix<f64> {
        let v = self.ground_vectors();
        &v * v.transpose()
    }
}

pub fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::Capacity {
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

/// The full matrix of `h`, assembled column by column from sparse rows.
pub fn dense_matrix(h: &Hamiltonian) -> Result<DMatrix<f64>> {
    check_capacity(h.n())?;
    let dim = 1usize << h.n();
    let mut m = DMatrix::zeros(dim, dim);
    for x in BasisString::all(h.n()) {
        for (y, v) in apply_to_basis(h, x).entries {
            m[(y.value() as usize, x.value() as usize)] = v;
        }
    }
    Ok(m)
}

/// Eigen-decomposition of a symmetric matrix with eigenpairs sorted
/// ascending.
pub fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

fn report_from(values: &[f64]) -> SpectrumReport {
    let lambda_min = values[0];
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let tau_degen = 1e-8 * scale;
    let q = values
        .iter()
        .take_while(|&&v| v <= lambda_min + tau_degen)
        .count();
    let gap = values.get(q).map_or(0.0, |v| v - lambda_min);
    SpectrumReport {
        lambda_min,
        gap,
        ground_degeneracy: q,
    }
}

pub fn dense_spectrum(h: &Hamiltonian) -> Result<Spectrum> {
    let (eigenvalues, eigenvectors) = sorted_eigen(dense_matrix(h)?);
    let report = report_from(&eigenvalues);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        report,
    })
}

/// Ascending eigenvalues only.
pub fn dense_eigenvalues(h: &Hamiltonian) -> Result<Vec<f64>> {
    let mut v: Vec<f64> = dense_matrix(h)?.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Errors with [`Error::NotPsd`] naming the first term whose smallest
/// eigenvalue is below `-tol`.
pub fn check_terms_psd(h: &Hamiltonian, tol: f64) -> Result<()> {
    for (a, t) in h.terms().iter().enumerate() {
        let min = t.eigenvalues()[0];
        if min < -tol {
            return Err(Error::NotPsd {
                term: a,
                min_eigenvalue: min,
            });
        }
    }
    Ok(())
}

/// With PSD terms, `h` is frustration-free iff its smallest eigenvalue is
/// (numerically) zero.
pub fn is_frustration_free(h: &Hamiltonian, tol: f64) -> Result<bool> {
    check_terms_psd(h, tol)?;
    let values = dense_eigenvalues(h)?;
    Ok(values[0] <= tol)
}

/// A normalized state with non-negative amplitudes; only its support
/// (amplitudes above [`TAU_SUPP`]) is stored.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonNegativeState {
    pub n: usize,
    pub amplitudes: BTreeMap<BasisString, f64>,
}

impl NonNegativeState {
    /// Builds from a dense vector, dropping entries at or below
    /// [`TAU_SUPP`] and renormalizing.
    pub fn from_dense(n: usize, v: &[f64]) -> Result<Self> {
        let mut amplitudes = BTreeMap::new();
        for (i, &a) in v.iter().enumerate() {
            if a < -1e-8 {
                return Err(Error::Invariant(format!(
                    "amplitude {a:.3e} at index {i} is negative"
                )));
            }
            if a > TAU_SUPP {
                amplitudes.insert(BasisString::from_raw(i as u64, n), a);
            }
        }
        let norm = amplitudes.values().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Invariant("state has empty support".into()));
        }
        for a in amplitudes.values_mut() {
            *a /= norm;
        }
        Ok(NonNegativeState { n, amplitudes })
    }

    pub fn amplitude(&self, x: BasisString) -> f64 {
        self.amplitudes.get(&x).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = BasisString> + '_ {
        self.amplitudes.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn contains(&self, x: BasisString) -> bool {
        self.amplitudes.contains_key(&x)
    }

    pub fn to_dense(&self) -> DVector<f64> {
        let mut v = DVector::zeros(1 << self.n);
        for (x, a) in &self.amplitudes {
            v[x.value() as usize] = *a;
        }
        v
    }

    /// `π(x) = ⟨x|ψ⟩²` over all `2^n` strings.
    pub fn distribution(&self) -> Vec<f64> {
        self.to_dense().iter().map(|a| a * a).collect()
    }

    /// Largest amplitude, ties broken towards the smaller string.
    pub fn argmax(&self) -> BasisString {
        let best = self.amplitudes.values().copied().fold(0.0f64, f64::max);
        *self
            .amplitudes
            .iter()
            .find(|(_, &a)| a >= best - 1e-12)
            .expect("non-empty support")
            .0
    }

    pub fn overlap(&self, other: &NonNegativeState) -> f64 {
        self.amplitudes
            .iter()
            .map(|(x, a)| a * other.amplitude(*x))
            .sum()
    }
}

/// Orthonormal non-negative ground states with pairwise disjoint supports.
///
/// The ground projector is split into rank-one blocks; each block's state is
/// then read off the projector column of its heaviest string, which keeps
/// small amplitudes accurate to working precision. States are ordered by
/// their smallest support string.
pub fn nonnegative_ground_basis(h: &Hamiltonian) -> Result<Vec<NonNegativeState>> {
    let spec = dense_spectrum(h)?;
    ground_basis_from(&spec, h.n())
}

pub fn ground_basis_from(spec: &Spectrum, n: usize) -> Result<Vec<NonNegativeState>> {
    let p = spec.ground_projector();
    let blocks = decompose(&p, GROUND_BLOCK_TOL)?;
    if blocks.len() != spec.report.ground_degeneracy {
        return Err(Error::Invariant(format!(
            "ground projector split into {} blocks but degeneracy is {}",
            blocks.len(),
            spec.report.ground_degeneracy
        )));
    }
    let mut states = blocks
        .iter()
        .map(|b| {
            let heavy = b
                .indices
                .iter()
                .copied()
                .max_by(|&x, &y| p[(x, x)].total_cmp(&p[(y, y)]))
                .expect("non-empty block");
            let scale = p[(heavy, heavy)].sqrt();
            let col: Vec<f64> = (0..p.nrows()).map(|i| (p[(i, heavy)] / scale).max(0.0)).collect();
            NonNegativeState::from_dense(n, &col)
        })
        .collect::<Result<Vec<_>>>()?;
    states.sort_by_key(|s| s.support().next());
    Ok(states)
}

/// The unique non-negative ground state; errors on degenerate ground spaces.
pub fn unique_ground_state(h: &Hamiltonian) -> Result<(NonNegativeState, SpectrumReport)> {
    let spec = dense_spectrum(h)?;
    if spec.report.ground_degeneracy != 1 {
        return Err(Error::Invariant(format!(
            "ground space is {}-fold degenerate",
            spec.report.ground_degeneracy
        )));
    }
    let mut states = ground_basis_from(&spec, h.n())?;
    Ok((states.remove(0), spec.report))
}

/// Smallest eigenvalue of `Σ_a H_a` over the constraint system.
pub fn unsat_value(c: &SatInstance) -> Result<f64> {
    Ok(dense_eigenvalues(c.hamiltonian())?[0])
}

/// Largest principal angle (radians) between the column spans of two
/// matrices with orthonormal columns of equal count.
pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let overlap = a.transpose() * b;
    let svd = overlap.svd(false, false);
    let smallest = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    smallest.clamp(0.0, 1.0).acos()
}
