//! k-local Hamiltonians as sums of small dense real symmetric terms.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::{BasisString, MAX_QUBITS};
use crate::error::{Error, Result};

/// Symmetry tolerance for term matrices.
pub const TAU_HERM: f64 = 1e-9;
/// Entries at or below this magnitude count as zero.
pub const TAU_ZERO: f64 = 1e-9;
/// Largest support a single term may have.
pub const MAX_LOCALITY: usize = 12;

/// A Hermitian (real symmetric) operator acting on a few qubits.
///
/// Row/column `i` of `matrix` is the local basis state whose bit `b` is the
/// value of qubit `support[b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTerm {
    support: Vec<usize>,
    matrix: DMatrix<f64>,
}

impl LocalTerm {
    pub fn new(support: Vec<usize>, matrix: DMatrix<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::invalid("support", "empty support"));
        }
        if support.len() > MAX_LOCALITY {
            return Err(Error::Locality {
                size: support.len(),
                max: MAX_LOCALITY,
            });
        }
        for (i, w) in support.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(Error::invalid(
                    format!("support[{}]", i + 1),
                    format!("indices must be strictly increasing ({} then {})", w[0], w[1]),
                ));
            }
        }
        let dim = 1usize << support.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::invalid(
                "matrix",
                format!(
                    "expected {dim}x{dim} for {} qubits, got {}x{}",
                    support.len(),
                    matrix.nrows(),
                    matrix.ncols()
                ),
            ));
        }
        check_symmetric(&matrix)?;
        Ok(LocalTerm { support, matrix })
    }

    /// Builds a term from row-major nested rows.
    pub fn from_rows(support: Vec<usize>, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::invalid(
                    format!("matrix[{r}]"),
                    format!("row has {} entries, expected {dim}", row.len()),
                ));
            }
        }
        let m = DMatrix::from_fn(dim, dim, |r, c| rows[r][c]);
        Self::new(support, m)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn locality(&self) -> usize {
        self.support.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Operator norm, the largest eigenvalue magnitude.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }

    /// Ascending eigenvalues of the local matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.matrix[(r, c)]).collect())
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|r| (0..d).all(|c| r == c || self.matrix[(r, c)].abs() <= TAU_ZERO))
    }
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let v = m[(r, c)];
            if !v.is_finite() {
                return Err(Error::invalid(format!("matrix[{r}][{c}]"), "non-finite entry"));
            }
            if c > r && (v - m[(c, r)]).abs() > TAU_HERM {
                return Err(Error::invalid(
                    format!("matrix[{r}][{c}]"),
                    format!("not symmetric: {v} vs {} at [{c}][{r}]", m[(c, r)]),
                ));
            }
        }
    }
    Ok(())
}

/// Spectral norm of a real symmetric matrix.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// `‖H_a‖` of a single term. Symmetry is a construction invariant of
/// [`LocalTerm`], so this cannot fail.
pub fn term_norm(t: &LocalTerm) -> f64 {
    t.norm()
}

/// `H = Σ_a H_a` on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n: usize,
    terms: Vec<LocalTerm>,
}

impl Hamiltonian {
    pub fn new(n: usize, terms: Vec<LocalTerm>) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::invalid("n", format!("qubit count {n} outside 1..={MAX_QUBITS}")));
        }
        if terms.is_empty() {
            return Err(Error::invalid("terms", "a Hamiltonian needs at least one term"));
        }
        for (a, t) in terms.iter().enumerate() {
            if let Some(&q) = t.support.iter().find(|&&q| q >= n) {
                return Err(Error::invalid(
                    format!("terms[{a}].support"),
                    format!("qubit {q} out of range for n = {n}"),
                ));
            }
        }
        Ok(Hamiltonian { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_locality(&self) -> usize {
        self.terms.iter().map(LocalTerm::locality).max().unwrap_or(0)
    }

    /// `Σ_a ‖H_a‖`.
    pub fn norm_sum(&self) -> f64 {
        self.terms.iter().map(LocalTerm::norm).sum()
    }

    pub fn check_string(&self, x: BasisString) -> Result<()> {
        if x.n() != self.n {
            return Err(Error::invalid(
                "basis string",
                format!("{x} has {} qubits, Hamiltonian has {}", x.n(), self.n),
            ));
        }
        Ok(())
    }

    /// `⟨x|H|x⟩`.
    pub fn diagonal(&self, x: BasisString) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let l = x.gather(&t.support);
                t.matrix[(l, l)]
            })
            .sum()
    }
}

/// Nonzero entries `⟨y|H|x⟩` of one column of `H`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SparseRow {
    pub entries: BTreeMap<BasisString, f64>,
}

impl SparseRow {
    pub fn get(&self, y: BasisString) -> f64 {
        self.entries.get(&y).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `⟨y|H|x⟩` for every `y`, summed over terms. Only entries with magnitude
/// above [`TAU_ZERO`] are kept.
pub fn apply_to_basis(h: &Hamiltonian, x: BasisString) -> SparseRow {
    let mut acc: BTreeMap<BasisString, f64> = BTreeMap::new();
    for t in &h.terms {
        let col = x.gather(&t.support);
        for row in 0..t.dim() {
            let v = t.matrix[(row, col)];
            if v != 0.0 {
                *acc.entry(x.scatter(&t.support, row)).or_insert(0.0) += v;
            }
        }
    }
    acc.retain(|_, v| v.abs() > TAU_ZERO);
    SparseRow { entries: acc }
}

/// Pairs `(y, a)` with `y ≠ x` and `⟨y|H_a|x⟩ < -TAU_ZERO`: the moves a
/// ground-state walk can make out of `x`. Sorted by `y`, then `a`.
pub fn negative_neighbors(h: &Hamiltonian, x: BasisString) -> Vec<(BasisString, usize)> {
    let mut out = Vec::new();
    for (a, t) in h.terms.iter().enumerate() {
        let col = x.gather(&t.support);
        for row in 0..t.dim() {
            if row != col && t.matrix[(row, col)] < -TAU_ZERO {
                out.push((x.scatter(&t.support, row), a));
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Offender {
    pub term: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StoquasticReport {
    pub stoquastic: bool,
    pub offenders: Vec<Offender>,
}

/// Checks that every off-diagonal entry of every term is `≤ tol`.
pub fn is_stoquastic(h: &Hamiltonian, tol: f64) -> StoquasticReport {
    stoquastic_terms(h.terms(), tol)
}

pub fn stoquastic_terms(terms: &[LocalTerm], tol: f64) -> StoquasticReport {
    let mut offenders = Vec::new();
    for (a, t) in terms.iter().enumerate() {
        let d = t.dim();
        for r in 0..d {
            for c in (r + 1)..d {
                let v = t.matrix[(r, c)];
                if v > tol {
                    offenders.push(Offender {
                        term: a,
                        row: r,
                        col: c,
                        value: v,
                    });
                }
            }
        }
    }
    StoquasticReport {
        stoquastic: offenders.is_empty(),
        offenders,
    }
}

/// Errors with the first offending entry unless `h` is stoquastic.
pub fn require_stoquastic(h: &Hamiltonian, what: &str) -> Result<()> {
    match is_stoquastic(h, TAU_ZERO).offenders.first() {
        None => Ok(()),
        Some(o) => Err(Error::NotStoquastic {
            what: what.to_string(),
            term: o.term,
            row: o.row,
            col: o.col,
            value: o.value,
        }),
    }
}

/// Common single-qubit matrices, as dense 2×2 arrays.
pub mod ops {
    use nalgebra::DMatrix;

    pub fn identity(dim: usize) -> DMatrix<f64> {
        DMatrix::identity(dim, dim)
    }

    pub fn pauli_x() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    pub fn pauli_z() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }

    /// `I - X`, the projector-like penalty whose kernel is `|+⟩`.
    pub fn one_minus_x() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
    }

    /// `I - |+⟩⟨+|`.
    pub fn not_plus() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5])
    }

    pub fn diag(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(values))
    }
}
