//! The ground-state random walk of a stoquastic frustration-free Hamiltonian.
//!
//! For a non-negative ground state `ψ` and `G = I - βH`, the walk on
//! `S(ψ)` moves `x → y` with probability `ψ(y)/ψ(x) · ⟨y|G|x⟩` and has
//! stationary distribution `π(x) = ψ(x)²`. The amplitude ratio is never read
//! from `ψ`: it comes from the kernel projector of any term with a negative
//! `⟨y|H_a|x⟩`, so a step costs `O(M 2^k)` regardless of `n`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::BasisString;
use crate::error::{Error, Result};
use crate::hamiltonian::{apply_to_basis, negative_neighbors, require_stoquastic, Hamiltonian};
use crate::oracle::{self, NonNegativeState};
use crate::projector::{amplitude_ratio, Classification, ProjectorSet};
use crate::rng::{sample_weighted, stream};

/// Allowed deviation of a transition row's sum from 1.
pub const TAU_WALK: f64 = 1e-7;
/// Allowed disagreement between ratios derived from different terms.
pub const RATIO_AGREEMENT: f64 = 1e-7;

/// `β = 1 / Σ_a ‖H_a‖`, which keeps `G = I - βH` entrywise non-negative.
pub fn choose_beta(h: &Hamiltonian) -> Result<f64> {
    let s = h.norm_sum();
    if s <= 0.0 {
        return Err(Error::Parameter("zero Hamiltonian has no walk scale".into()));
    }
    Ok(1.0 / s)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WalkConfig {
    pub beta: f64,
    pub seed: u64,
    pub max_steps: usize,
}

impl WalkConfig {
    /// Config with `β` from [`choose_beta`].
    pub fn new(h: &Hamiltonian, seed: u64, max_steps: usize) -> Result<Self> {
        Ok(WalkConfig {
            beta: choose_beta(h)?,
            seed,
            max_steps,
        })
    }

    /// Config with an explicit `β`, rejected if it could make `G` negative.
    pub fn with_beta(h: &Hamiltonian, beta: f64, seed: u64, max_steps: usize) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
        }
        if beta * h.norm_sum() > 1.0 + 1e-12 {
            return Err(Error::Parameter(format!(
                "beta {beta} exceeds 1/Σ‖H_a‖ = {}",
                1.0 / h.norm_sum()
            )));
        }
        Ok(WalkConfig {
            beta,
            seed,
            max_steps,
        })
    }
}

/// `P_{x→y}` for one source string, sorted by `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransitionRow {
    pub from: BasisString,
    pub moves: Vec<(BasisString, f64)>,
}

impl TransitionRow {
    pub fn prob(&self, y: BasisString) -> f64 {
        self.moves
            .binary_search_by_key(&y, |&(s, _)| s)
            .map_or(0.0, |i| self.moves[i].1)
    }

    pub fn sum(&self) -> f64 {
        self.moves.iter().map(|(_, p)| p).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BasisString {
        sample_weighted(&self.moves, rng)
    }
}

fn not_in_support(x: BasisString, reason: impl Into<String>) -> Error {
    Error::NotInSupport {
        x,
        reason: reason.into(),
    }
}

/// One row of the walk's transition matrix, computed from local data only.
///
/// Fails with [`Error::NotInSupport`] when `x` cannot lie in the support of
/// a non-negative ground state: a term's projector vanishes on `x`, two
/// terms imply different amplitude ratios, or the row does not sum to one.
pub fn transition_row(
    h: &Hamiltonian,
    projs: &ProjectorSet,
    x: BasisString,
    beta: f64,
) -> Result<TransitionRow> {
    if let Classification::Bad { constraint } = projs.classify(x) {
        return Err(not_in_support(
            x,
            format!("kernel projector of term {constraint} vanishes on it"),
        ));
    }
    let row = apply_to_basis(h, x);
    let mut moves = vec![(x, 1.0 - beta * h.diagonal(x))];

    let neighbors = negative_neighbors(h, x);
    let mut i = 0;
    while i < neighbors.len() {
        let y = neighbors[i].0;
        let mut j = i;
        let mut ratio = None;
        while j < neighbors.len() && neighbors[j].0 == y {
            let a = neighbors[j].1;
            let r = amplitude_ratio(projs.get(a), x, y)
                .map_err(|e| not_in_support(x, format!("term {a}: {e}")))?;
            match ratio {
                None => ratio = Some(r),
                Some(r0) if (r - r0).abs() > RATIO_AGREEMENT => {
                    return Err(not_in_support(
                        x,
                        format!("terms disagree on ratio to {y}: {r0} vs {r} (term {a})"),
                    ));
                }
                Some(_) => {}
            }
            j += 1;
        }
        let g = -beta * row.get(y);
        moves.push((y, ratio.expect("at least one term") * g));
        i = j;
    }
    moves.sort_by_key(|&(y, _)| y);

    let out = TransitionRow { from: x, moves };
    let s = out.sum();
    if (s - 1.0).abs() > TAU_WALK {
        return Err(not_in_support(x, format!("row sums to {s}")));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkTranscript {
    pub seed: u64,
    pub trajectory: Vec<BasisString>,
    pub step_count: usize,
}

/// A walk over a fixed Hamiltonian that memoizes the rows it visits.
pub struct Walker<'a> {
    h: &'a Hamiltonian,
    projs: &'a ProjectorSet,
    beta: f64,
    rows: HashMap<BasisString, TransitionRow>,
}

impl<'a> Walker<'a> {
    pub fn new(h: &'a Hamiltonian, projs: &'a ProjectorSet, beta: f64) -> Result<Self> {
        require_stoquastic(h, "walk Hamiltonian")?;
        if projs.len() != h.len() || projs.n() != h.n() {
            return Err(Error::Parameter("projector set does not match Hamiltonian".into()));
        }
        Ok(Walker {
            h,
            projs,
            beta,
            rows: HashMap::new(),
        })
    }

    /// Skips the stoquasticity check; for callers that already ran it.
    pub(crate) fn trusted(h: &'a Hamiltonian, projs: &'a ProjectorSet, beta: f64) -> Self {
        Walker {
            h,
            projs,
            beta,
            rows: HashMap::new(),
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn row(&mut self, x: BasisString) -> Result<&TransitionRow> {
        if !self.rows.contains_key(&x) {
            let r = transition_row(self.h, self.projs, x, self.beta)?;
            self.rows.insert(x, r);
        }
        Ok(&self.rows[&x])
    }

    pub fn step<R: Rng + ?Sized>(&mut self, x: BasisString, rng: &mut R) -> Result<BasisString> {
        Ok(self.row(x)?.sample(rng))
    }

    /// Endpoint after `steps` moves; errors carry the failing step index.
    pub fn run_to_end<R: Rng + ?Sized>(
        &mut self,
        x0: BasisString,
        steps: usize,
        rng: &mut R,
    ) -> Result<BasisString> {
        let mut x = x0;
        for s in 0..steps {
            x = self.step(x, rng).map_err(|e| Error::WalkFailed {
                step: s,
                source: Box::new(e),
            })?;
        }
        Ok(x)
    }

    pub fn trajectory<R: Rng + ?Sized>(
        &mut self,
        x0: BasisString,
        steps: usize,
        rng: &mut R,
    ) -> Result<Vec<BasisString>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(x0);
        let mut x = x0;
        for s in 0..steps {
            x = self.step(x, rng).map_err(|e| Error::WalkFailed {
                step: s,
                source: Box::new(e),
            })?;
            out.push(x);
        }
        Ok(out)
    }
}

/// A single seeded trajectory of `config.max_steps` steps from `x0`.
pub fn run_walk(
    h: &Hamiltonian,
    projs: &ProjectorSet,
    x0: BasisString,
    config: &WalkConfig,
) -> Result<WalkTranscript> {
    h.check_string(x0)?;
    let mut walker = Walker::new(h, projs, config.beta)?;
    let mut rng = stream(config.seed, 0);
    let trajectory = walker.trajectory(x0, config.max_steps, &mut rng)?;
    Ok(WalkTranscript {
        seed: config.seed,
        step_count: trajectory.len() - 1,
        trajectory,
    })
}

/// Endpoint counts over `trials` independent trajectories; trajectory `i`
/// uses stream `(seed, i)`.
pub fn endpoint_histogram(
    h: &Hamiltonian,
    projs: &ProjectorSet,
    x0: BasisString,
    config: &WalkConfig,
    trials: u64,
) -> Result<BTreeMap<BasisString, u64>> {
    h.check_string(x0)?;
    Walker::new(h, projs, config.beta)?;
    (0..trials)
        .into_par_iter()
        .try_fold(
            || (None::<Walker>, BTreeMap::new()),
            |(walker, mut hist), i| {
                let mut w = match walker {
                    Some(w) => w,
                    None => Walker::new(h, projs, config.beta)?,
                };
                let mut rng = stream(config.seed, i);
                let end = w.run_to_end(x0, config.max_steps, &mut rng)?;
                *hist.entry(end).or_insert(0u64) += 1;
                Ok::<_, Error>((Some(w), hist))
            },
        )
        .map(|r| r.map(|(_, hist)| hist))
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })
}

/// The walk's transition matrix restricted to `support` (rows are sources).
/// Errors if some row leaks probability outside `support`.
pub fn dense_transition_matrix(
    h: &Hamiltonian,
    projs: &ProjectorSet,
    beta: f64,
    support: &[BasisString],
) -> Result<DMatrix<f64>> {
    let index: HashMap<BasisString, usize> = support.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut p = DMatrix::zeros(support.len(), support.len());
    for (i, &x) in support.iter().enumerate() {
        for (y, prob) in transition_row(h, projs, x, beta)?.moves {
            match index.get(&y) {
                Some(&j) => p[(i, j)] = prob,
                None if prob > crate::hamiltonian::TAU_ZERO => {
                    return Err(Error::Invariant(format!(
                        "row {x} moves to {y} outside the support with probability {prob}"
                    )));
                }
                None => {}
            }
        }
    }
    Ok(p)
}

/// Result of comparing the walk's spectral gap with `βΔ` on one ground
/// block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapCheck {
    pub support_size: usize,
    pub walk_gap: f64,
    pub beta_delta: f64,
}

/// Builds the full transition matrix on each non-negative ground state's
/// support and checks `1 - λ₂(P) ≥ βΔ`.
///
/// The walk is reversible with respect to `π = ψ²`, so
/// `sqrt(π_x/π_y) P_xy` is symmetric; that symmetry is asserted and the
/// symmetric form is diagonalized.
pub fn walk_gap_check(h: &Hamiltonian, projs: &ProjectorSet, beta: f64) -> Result<Vec<GapCheck>> {
    if h.n() > 10 {
        return Err(Error::Capacity { n: h.n(), max: 10 });
    }
    let spec = oracle::dense_spectrum(h)?;
    let states = oracle::ground_basis_from(&spec, h.n())?;
    let beta_delta = beta * spec.report.gap;
    states
        .iter()
        .map(|psi| {
            let walk_gap = block_walk_gap(h, projs, beta, psi)?;
            if walk_gap < beta_delta - 1e-9 {
                return Err(Error::Invariant(format!(
                    "walk gap {walk_gap} below βΔ = {beta_delta}"
                )));
            }
            Ok(GapCheck {
                support_size: psi.support_len(),
                walk_gap,
                beta_delta,
            })
        })
        .collect()
}

fn block_walk_gap(h: &Hamiltonian, projs: &ProjectorSet, beta: f64, psi: &NonNegativeState) -> Result<f64> {
    let support: Vec<BasisString> = psi.support().collect();
    if support.len() == 1 {
        return Ok(1.0);
    }
    let p = dense_transition_matrix(h, projs, beta, &support)?;
    let amp: Vec<f64> = support.iter().map(|&x| psi.amplitude(x)).collect();
    let k = support.len();
    let s = DMatrix::from_fn(k, k, |i, j| amp[i] / amp[j] * p[(i, j)]);
    let asym = (&s - s.transpose()).abs().max();
    if asym > 1e-7 {
        return Err(Error::Invariant(format!(
            "walk is not reversible w.r.t. ψ²: asymmetry {asym:.3e}"
        )));
    }
    let sym = (&s + s.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(1.0 - ev[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{ops, LocalTerm};

    fn bs(s: &str) -> BasisString {
        s.parse().unwrap()
    }

    fn one_minus_x() -> Hamiltonian {
        Hamiltonian::new(1, vec![LocalTerm::new(vec![0], ops::one_minus_x()).unwrap()]).unwrap()
    }

    #[test]
    fn beta_examples() {
        assert!((choose_beta(&one_minus_x()).unwrap() - 0.5).abs() < 1e-12);
        let two = Hamiltonian::new(
            2,
            vec![
                LocalTerm::new(vec![0], ops::one_minus_x()).unwrap(),
                LocalTerm::new(vec![1], ops::one_minus_x()).unwrap(),
            ],
        )
        .unwrap();
        assert!((choose_beta(&two).unwrap() - 0.25).abs() < 1e-12);
        let d = Hamiltonian::new(1, vec![LocalTerm::new(vec![0], ops::diag(&[0.0, 2.0])).unwrap()]).unwrap();
        assert!((choose_beta(&d).unwrap() - 0.5).abs() < 1e-12);
        let z = Hamiltonian::new(1, vec![LocalTerm::new(vec![0], DMatrix::zeros(2, 2)).unwrap()]).unwrap();
        assert!(choose_beta(&z).is_err());
    }

    #[test]
    fn row_of_one_minus_x() {
        let h = one_minus_x();
        let ps = ProjectorSet::build(&h, 1e-9).unwrap();
        let row = transition_row(&h, &ps, bs("0"), 0.5).unwrap();
        assert_eq!(row.moves.len(), 2);
        assert!((row.prob(bs("0")) - 0.5).abs() < 1e-12);
        assert!((row.prob(bs("1")) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn row_outside_support_is_rejected() {
        // flip on qubit 0, qubit 1 pinned to |1⟩: every ground string has qubit 1 set
        let h = Hamiltonian::new(
            2,
            vec![
                LocalTerm::new(vec![0], ops::one_minus_x()).unwrap(),
                LocalTerm::new(vec![1], ops::diag(&[1.0, 0.0])).unwrap(),
            ],
        )
        .unwrap();
        let ps = ProjectorSet::build(&h, 1e-9).unwrap();
        let beta = choose_beta(&h).unwrap();
        assert!(matches!(
            transition_row(&h, &ps, bs("00"), beta),
            Err(Error::NotInSupport { .. })
        ));
        let row = transition_row(&h, &ps, bs("10"), beta).unwrap();
        assert!((row.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_steps_and_determinism() {
        let h = one_minus_x();
        let ps = ProjectorSet::build(&h, 1e-9).unwrap();
        let cfg = WalkConfig::new(&h, 11, 0).unwrap();
        assert_eq!(run_walk(&h, &ps, bs("1"), &cfg).unwrap().trajectory, vec![bs("1")]);
        let cfg = WalkConfig::new(&h, 11, 10).unwrap();
        let a = run_walk(&h, &ps, bs("0"), &cfg).unwrap();
        let b = run_walk(&h, &ps, bs("0"), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trajectory.len(), 11);
        assert_eq!(a.step_count, 10);
    }

    #[test]
    fn gap_check_one_minus_x() {
        let h = one_minus_x();
        let ps = ProjectorSet::build(&h, 1e-9).unwrap();
        let checks = walk_gap_check(&h, &ps, 0.5).unwrap();
        assert_eq!(checks.len(), 1);
        assert!((checks[0].walk_gap - 1.0).abs() < 1e-12);
        assert!((checks[0].beta_delta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gap_check_degenerate_blocks() {
        let h = Hamiltonian::new(1, vec![LocalTerm::new(vec![0], DMatrix::zeros(2, 2)).unwrap()]).unwrap();
        let ps = ProjectorSet::build(&h, 1e-9).unwrap();
        let checks = walk_gap_check(&h, &ps, 0.5).unwrap();
        assert_eq!(checks.len(), 2);
        assert!(checks.iter().all(|c| c.support_size == 1 && c.walk_gap == 1.0));
    }

    #[test]
    fn beta_validation() {
        let h = one_minus_x();
        assert!(WalkConfig::with_beta(&h, 0.6, 0, 1).is_err());
        assert!(WalkConfig::with_beta(&h, 0.0, 0, 1).is_err());
        assert!(WalkConfig::with_beta(&h, 0.5, 0, 1).is_ok());
    }

    #[test]
    fn refuses_non_stoquastic() {
        let h = Hamiltonian::new(1, vec![LocalTerm::new(vec![0], ops::pauli_x()).unwrap()]).unwrap();
        let ps = ProjectorSet::build(&Hamiltonian::new(1, vec![LocalTerm::new(vec![0], ops::one_minus_x()).unwrap()]).unwrap(), 1e-9).unwrap();
        assert!(matches!(Walker::new(&h, &ps, 0.5), Err(Error::NotStoquastic { .. })));
    }
}
