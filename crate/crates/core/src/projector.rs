//! Kernel projectors of stoquastic terms and their rank-one block structure.
//!
//! The zero-eigenspace projector `Π_a` of a stoquastic PSD term is
//! entrywise non-negative, and every non-negative projector splits into
//! disjoint rank-one blocks `|ψ_b⟩⟨ψ_b|` with `ψ_b ≥ 0`. Two strings in the
//! same block satisfy `ψ(y)/ψ(x) = sqrt(Π_yy / Π_xx)` for any non-negative
//! `ψ` fixed by `Π`; the walk uses that to compute amplitude ratios of a
//! global ground state from purely local data.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::basis::BasisString;
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, LocalTerm, TAU_ZERO};

/// Tolerance for idempotence and block reconstruction checks.
pub const TAU_PROJ: f64 = 1e-7;

/// One rank-one block `|ψ_b⟩⟨ψ_b|` of a non-negative projector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block {
    /// Basis indices in the block, increasing.
    pub indices: Vec<usize>,
    /// `⟨i|ψ_b⟩` for each entry of `indices`; strictly positive, unit norm.
    pub amplitudes: Vec<f64>,
}

impl Block {
    pub fn outer(&self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        for (i, &x) in self.indices.iter().enumerate() {
            for (j, &y) in self.indices.iter().enumerate() {
                m[(x, y)] = self.amplitudes[i] * self.amplitudes[j];
            }
        }
        m
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Splits a non-negative projector into rank-one non-negative blocks.
///
/// Blocks are the connected components of the relation `p[x][y] > tol`.
/// Each block's amplitudes are `sqrt(p[x][x])`, normalized. Reconstruction,
/// non-negativity and the rank-one shape of every block are checked at
/// `max(tol, TAU_PROJ)`. Blocks come out ordered by smallest index.
pub fn decompose(p: &DMatrix<f64>, tol: f64) -> Result<Vec<Block>> {
    let d = p.nrows();
    if p.ncols() != d {
        return Err(Error::invalid("projector", "matrix is not square"));
    }
    let check = tol.max(TAU_PROJ);
    let mut uf = UnionFind::new(d);
    for x in 0..d {
        for y in (x + 1)..d {
            let v = p[(x, y)];
            if v < -check {
                return Err(Error::Invariant(format!(
                    "projector entry ({x}, {y}) = {v:.3e} is negative"
                )));
            }
            if v > tol {
                uf.union(x, y);
            }
        }
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); d];
    for x in 0..d {
        if p[(x, x)] > tol {
            let r = uf.find(x);
            members[r].push(x);
        }
    }

    let mut blocks = Vec::new();
    let mut covered = vec![false; d];
    for indices in members.into_iter().filter(|m| !m.is_empty()) {
        let raw: Vec<f64> = indices.iter().map(|&x| p[(x, x)].max(0.0).sqrt()).collect();
        let trace: f64 = indices.iter().map(|&x| p[(x, x)]).sum();
        if (trace - 1.0).abs() > check * indices.len() as f64 {
            return Err(Error::Invariant(format!(
                "block starting at {} has trace {trace:.9}, not 1",
                indices[0]
            )));
        }
        for (i, &x) in indices.iter().enumerate() {
            for (j, &y) in indices.iter().enumerate() {
                let resid = (p[(x, y)] - raw[i] * raw[j]).abs();
                if resid > check {
                    return Err(Error::Invariant(format!(
                        "block starting at {} is not rank one: residual {resid:.3e} at ({x}, {y})",
                        indices[0]
                    )));
                }
            }
        }
        let norm = raw.iter().map(|a| a * a).sum::<f64>().sqrt();
        for &x in &indices {
            covered[x] = true;
        }
        blocks.push(Block {
            amplitudes: raw.iter().map(|a| a / norm).collect(),
            indices,
        });
    }
    blocks.sort_by_key(|b| b.indices[0]);

    // Everything outside the blocks must vanish.
    for x in 0..d {
        for y in 0..d {
            if !(covered[x] && covered[y]) && p[(x, y)].abs() > check {
                return Err(Error::Invariant(format!(
                    "entry ({x}, {y}) = {:.3e} lies outside every block",
                    p[(x, y)]
                )));
            }
        }
    }
    Ok(blocks)
}

/// The support-independent part of a kernel projector, shared through the
/// cache by every term with the same local matrix.
#[derive(Debug, PartialEq)]
pub struct LocalProjector {
    matrix: DMatrix<f64>,
    blocks: Vec<Block>,
    block_of: Vec<Option<usize>>,
}

impl LocalProjector {
    fn from_matrix(matrix: DMatrix<f64>, tol: f64) -> Result<Self> {
        let blocks = decompose(&matrix, tol)?;
        let mut block_of = vec![None; matrix.nrows()];
        for (b, blk) in blocks.iter().enumerate() {
            for &x in &blk.indices {
                block_of[x] = Some(b);
            }
        }
        Ok(LocalProjector {
            matrix,
            blocks,
            block_of,
        })
    }
}

/// `Π_a`: projector onto the zero eigenspace of one term.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelProjector {
    support: Vec<usize>,
    local: Arc<LocalProjector>,
}

impl KernelProjector {
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.local.matrix
    }

    pub fn blocks(&self) -> &[Block] {
        &self.local.blocks
    }

    pub fn rank(&self) -> usize {
        self.local.blocks.len()
    }

    pub fn dim(&self) -> usize {
        self.local.matrix.nrows()
    }

    /// Local block index containing local basis state `l`.
    pub fn block_of(&self, l: usize) -> Option<usize> {
        self.local.block_of[l]
    }

    /// Full-space diagonal entry `⟨x|Π_a|x⟩`.
    #[inline]
    pub fn diag(&self, x: BasisString) -> f64 {
        let l = x.gather(&self.support);
        self.local.matrix[(l, l)]
    }

    /// `Σ_b |ψ_b⟩⟨ψ_b|`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = self.dim();
        self.blocks()
            .iter()
            .fold(DMatrix::zeros(d, d), |acc, b| acc + b.outer(d))
    }

    /// True when every entry is 0, 1/2 or 1 after rounding at `1e-9`.
    pub fn is_half_integral(&self) -> bool {
        self.local
            .matrix
            .iter()
            .all(|&v| [0.0, 0.5, 1.0].iter().any(|t| (v - t).abs() <= 1e-9))
    }

    /// Strings `y` with `⟨x|Π_a|y⟩ > TAU_ZERO`, together with that entry;
    /// includes `x` itself when `x` is good for this term.
    pub fn block_neighbors(&self, x: BasisString) -> impl Iterator<Item = (BasisString, f64)> + '_ {
        let lx = x.gather(&self.support);
        let m = &self.local.matrix;
        (0..self.dim())
            .filter(move |&ly| m[(lx, ly)] > TAU_ZERO)
            .map(move |ly| (x.scatter(&self.support, ly), m[(lx, ly)]))
    }
}

/// `sqrt(⟨y|Π|y⟩ / ⟨x|Π|x⟩)`: equals `⟨y|ψ⟩/⟨x|ψ⟩` for any non-negative
/// `ψ` fixed by `Π` when `x` and `y` share a block.
pub fn amplitude_ratio(p: &KernelProjector, x: BasisString, y: BasisString) -> Result<f64> {
    if !x.agrees_outside(y, &p.support) {
        return Err(Error::Domain { x, y });
    }
    let px = p.diag(x);
    if px <= TAU_ZERO {
        return Err(Error::BadString { x, weight: px });
    }
    Ok((p.diag(y).max(0.0) / px).sqrt())
}

/// Projector onto the eigenvalue-0 space of a stoquastic PSD term.
pub fn kernel_projector(t: &LocalTerm, tol: f64) -> Result<KernelProjector> {
    Ok(KernelProjector {
        support: t.support().to_vec(),
        local: Arc::new(local_kernel(t.matrix(), tol)?),
    })
}

fn local_kernel(m: &DMatrix<f64>, tol: f64) -> Result<LocalProjector> {
    let eig = m.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::NotPsd {
            term: 0,
            min_eigenvalue: min,
        });
    }
    let d = m.nrows();
    let mut p = DMatrix::zeros(d, d);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= tol {
            let v = eig.eigenvectors.column(i);
            p += &v * v.transpose();
        }
    }
    let worst = p.iter().copied().fold(0.0f64, f64::min);
    if worst < -tol {
        return Err(Error::Invariant(format!(
            "kernel projector has negative entry {worst:.3e}; input is not stoquastic"
        )));
    }
    let idem = (&p * &p - &p).abs().max();
    if idem > TAU_PROJ {
        return Err(Error::Invariant(format!("kernel projector not idempotent ({idem:.3e})")));
    }
    LocalProjector::from_matrix(p, tol)
}

/// Kernel projectors keyed by the exact bits of the local matrix. Terms
/// that differ only in support share one decomposition.
#[derive(Default)]
pub struct ProjectorCache {
    entries: HashMap<Vec<u64>, Arc<LocalProjector>>,
}

impl ProjectorCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get_or_build(&mut self, t: &LocalTerm, tol: f64) -> Result<KernelProjector> {
        let key: Vec<u64> = t.matrix().iter().map(|v| v.to_bits()).collect();
        let local = match self.entries.get(&key) {
            Some(l) => l.clone(),
            None => {
                let l = Arc::new(local_kernel(t.matrix(), tol)?);
                self.entries.insert(key, l.clone());
                l
            }
        };
        Ok(KernelProjector {
            support: t.support().to_vec(),
            local,
        })
    }
}

/// Good or bad, per the diagonal projector entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Classification {
    Good,
    /// `⟨x|Π_a|x⟩ ≤ TAU_ZERO` for `constraint` (the first such index).
    Bad { constraint: usize },
}

impl Classification {
    pub fn is_good(self) -> bool {
        matches!(self, Classification::Good)
    }
}

/// The kernel projectors of all terms of a Hamiltonian, in term order.
/// Immutable once built, so walkers can share it freely.
#[derive(Clone, Debug)]
pub struct ProjectorSet {
    n: usize,
    projectors: Vec<KernelProjector>,
}

impl ProjectorSet {
    pub fn build(h: &Hamiltonian, tol: f64) -> Result<Self> {
        Self::build_with(h, tol, &mut ProjectorCache::new())
    }

    pub fn build_with(h: &Hamiltonian, tol: f64, cache: &mut ProjectorCache) -> Result<Self> {
        let projectors = h
            .terms()
            .iter()
            .enumerate()
            .map(|(a, t)| {
                cache.get_or_build(t, tol).map_err(|e| match e {
                    Error::NotPsd { min_eigenvalue, .. } => Error::NotPsd {
                        term: a,
                        min_eigenvalue,
                    },
                    Error::Invariant(msg) => Error::Invariant(format!("term {a}: {msg}")),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjectorSet { n: h.n(), projectors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn get(&self, a: usize) -> &KernelProjector {
        &self.projectors[a]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, KernelProjector> {
        self.projectors.iter()
    }

    /// Good iff `⟨x|Π_a|x⟩ > TAU_ZERO` for every `a`.
    pub fn classify(&self, x: BasisString) -> Classification {
        match self.projectors.iter().position(|p| p.diag(x) <= TAU_ZERO) {
            None => Classification::Good,
            Some(a) => Classification::Bad { constraint: a },
        }
    }
}
