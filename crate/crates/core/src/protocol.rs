//! The Merlin-Arthur verifier for stoquastic k-SAT.
//!
//! Merlin sends one string `w`. Arthur walks `L` steps from it, each step
//! picking a constraint `a` uniformly and moving inside the block of `Π_a`
//! containing the current string. He rejects on reaching a bad string, and
//! otherwise accepts iff the product of the recorded amplitude ratios is at
//! most one.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::BasisString;
use crate::error::{Error, Result};
use crate::hamiltonian::{require_stoquastic, Hamiltonian, LocalTerm, TAU_ZERO};
use crate::oracle;
use crate::projector::{Classification, ProjectorSet};
use crate::rng::{sample_weighted, stream};

/// Upper limit on the number of verifier steps.
pub const MAX_VERIFIER_STEPS: f64 = 1e12;
/// Accept iff `Σ ln r_j` is at most this.
pub const LOG_PRODUCT_TOL: f64 = 1e-9;
/// Allowed deviation of a per-constraint row sum from 1.
pub const TAU_PROB: f64 = 1e-9;

/// A constraint system `{H_a}` with its promise gap `ε`.
#[derive(Clone, Debug)]
pub struct SatInstance {
    hamiltonian: Hamiltonian,
    epsilon: f64,
}

impl SatInstance {
    /// Constraints must be positive semidefinite and stoquastic; `ε > 0`.
    pub fn new(n: usize, constraints: Vec<LocalTerm>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
        }
        let hamiltonian = Hamiltonian::new(n, constraints)?;
        for (a, t) in hamiltonian.terms().iter().enumerate() {
            let min = t.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
            if min < -1e-9 {
                return Err(Error::NotPsd {
                    term: a,
                    min_eigenvalue: min,
                });
            }
        }
        require_stoquastic(&hamiltonian, "constraint system")?;
        Ok(SatInstance { hamiltonian, epsilon })
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn constraints(&self) -> &[LocalTerm] {
        self.hamiltonian.terms()
    }

    pub fn n(&self) -> usize {
        self.hamiltonian.n()
    }

    /// Number of constraints `M`.
    pub fn m(&self) -> usize {
        self.hamiltonian.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Same constraints with a different promise gap.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
        }
        Ok(SatInstance {
            hamiltonian: self.hamiltonian.clone(),
            epsilon,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct VerifierParams {
    pub beta: f64,
    pub l: u64,
    pub precision_delta: f64,
}

/// `L = ⌈(n/2 · ln 2 + ln 3) / (-ln(1 - εβ/M))⌉`, or 1 when `εβ/M ≥ 1`.
pub fn verifier_steps(n: usize, m: usize, epsilon: f64, beta: f64) -> Result<u64> {
    let x = epsilon * beta / m as f64;
    if x >= 1.0 {
        return Ok(1);
    }
    if !(x > 0.0) {
        return Err(Error::Parameter(format!("εβ/M must be positive, got {x}")));
    }
    let l = (n as f64 / 2.0 * std::f64::consts::LN_2 + 3f64.ln()) / -(-x).ln_1p();
    if !l.is_finite() || l > MAX_VERIFIER_STEPS {
        return Err(Error::Parameter(format!(
            "promise gap {epsilon:e} needs {l:.3e} verifier steps, above the cap {MAX_VERIFIER_STEPS:e}"
        )));
    }
    Ok((l.ceil() as u64).max(1))
}

/// `β = 1/max_a ‖H_a‖`, `L` from [`verifier_steps`], `δ = 1/(100 L)`.
pub fn choose_params(inst: &SatInstance) -> Result<VerifierParams> {
    let worst = inst.constraints().iter().map(LocalTerm::norm).fold(0.0, f64::max);
    if worst <= 0.0 {
        return Err(Error::Parameter("every constraint is zero".into()));
    }
    let beta = 1.0 / worst;
    let l = verifier_steps(inst.n(), inst.m(), inst.epsilon(), beta)?;
    Ok(VerifierParams {
        beta,
        l,
        precision_delta: 1.0 / (100.0 * l as f64),
    })
}

/// `min(1, 2^{n/2} (1 - εβ/M)^L)`.
pub fn acceptance_bound_for(n: usize, m: usize, epsilon: f64, beta: f64, l: u64) -> f64 {
    let base = (1.0 - epsilon * beta / m as f64).max(0.0);
    let v = (n as f64 / 2.0 * std::f64::consts::LN_2).exp() * base.powf(l as f64);
    v.clamp(0.0, 1.0)
}

pub fn acceptance_bound(inst: &SatInstance, params: &VerifierParams) -> f64 {
    acceptance_bound_for(inst.n(), inst.m(), inst.epsilon(), params.beta, params.l)
}

/// The string of largest amplitude in the first non-negative ground state,
/// provided the system is satisfiable.
pub fn honest_prover(inst: &SatInstance) -> Result<BasisString> {
    let h = inst.hamiltonian();
    let spec = oracle::dense_spectrum(h)?;
    let tol = 1e-8 * h.norm_sum().max(1.0);
    if spec.report.lambda_min > tol {
        return Err(Error::NotSatisfiable(format!(
            "lowest eigenvalue {:.3e} is positive",
            spec.report.lambda_min
        )));
    }
    let states = oracle::ground_basis_from(&spec, h.n())?;
    Ok(states[0].argmax())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    /// Step at which a bad string (or a malformed witness) was found.
    NoBadString {
        step: u64,
        constraint: Option<usize>,
    },
    NoProductTest {
        log_product: f64,
    },
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        matches!(self, Verdict::Yes)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictTranscript {
    pub witness: BasisString,
    pub seed: u64,
    pub trajectory: Vec<BasisString>,
    /// Constraint chosen at each step.
    pub constraints: Vec<usize>,
    /// `r_j = sqrt(Π_yy/Π_xx)`, from the exact formula.
    pub r: Vec<f64>,
    pub log_product: f64,
    #[serde(flatten)]
    pub verdict: Verdict,
}

/// One move out of `x` under a single constraint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Move {
    pub to: BasisString,
    pub prob: f64,
    pub r: f64,
}

/// The verifier's state: the instance's projectors and its parameters.
pub struct Verifier<'a> {
    inst: &'a SatInstance,
    projs: ProjectorSet,
    params: VerifierParams,
}

impl<'a> Verifier<'a> {
    pub fn new(inst: &'a SatInstance, params: VerifierParams) -> Result<Self> {
        if !(params.beta > 0.0 && params.beta.is_finite()) {
            return Err(Error::Parameter(format!("invalid beta {}", params.beta)));
        }
        for (a, t) in inst.constraints().iter().enumerate() {
            if params.beta * t.norm() > 1.0 + 1e-12 {
                return Err(Error::Parameter(format!(
                    "β = {} too large for constraint {a} with norm {}",
                    params.beta,
                    t.norm()
                )));
            }
        }
        Ok(Verifier {
            inst,
            projs: ProjectorSet::build(inst.hamiltonian(), TAU_ZERO)?,
            params,
        })
    }

    pub fn params(&self) -> &VerifierParams {
        &self.params
    }

    pub fn projectors(&self) -> &ProjectorSet {
        &self.projs
    }

    pub fn instance(&self) -> &SatInstance {
        self.inst
    }

    /// `P^a_{x→y} = sqrt(Π_yy/Π_xx) ⟨y|G_a|x⟩` over `N_a(x)`, which
    /// includes `x`. `x` must be good for `a`.
    pub fn moves(&self, a: usize, x: BasisString) -> Result<Vec<Move>> {
        let p = self.projs.get(a);
        let t = &self.inst.constraints()[a];
        let px = p.diag(x);
        if px <= TAU_ZERO {
            return Err(Error::BadString { x, weight: px });
        }
        let col = x.gather(t.support());
        let out: Vec<Move> = p
            .block_neighbors(x)
            .map(|(y, _)| {
                let row = y.gather(t.support());
                let g = (row == col) as u8 as f64 - self.params.beta * t.matrix()[(row, col)];
                let r = (p.diag(y) / px).sqrt();
                Move {
                    to: y,
                    prob: (r * g).max(0.0),
                    r,
                }
            })
            .collect();
        let s: f64 = out.iter().map(|m| m.prob).sum();
        if (s - 1.0).abs() > TAU_PROB {
            return Err(Error::Invariant(format!(
                "constraint {a} row at {x} sums to {s}"
            )));
        }
        Ok(out)
    }

    /// One verifier run on stream `(seed, index)`.
    pub fn run(&self, w: BasisString, seed: u64, index: u64) -> Result<VerdictTranscript> {
        let mut rng = stream(seed, index);
        let mut t = VerdictTranscript {
            witness: w,
            seed,
            trajectory: vec![w],
            constraints: Vec::new(),
            r: Vec::new(),
            log_product: 0.0,
            verdict: Verdict::Yes,
        };
        if w.n() != self.inst.n() {
            t.verdict = Verdict::NoBadString {
                step: 0,
                constraint: None,
            };
            return Ok(t);
        }
        let m = self.inst.m();
        let mut x = w;
        for j in 0..=self.params.l {
            if let Classification::Bad { constraint } = self.projs.classify(x) {
                t.verdict = Verdict::NoBadString {
                    step: j,
                    constraint: Some(constraint),
                };
                return Ok(t);
            }
            if j == self.params.l {
                break;
            }
            let a = rng.random_range(0..m);
            let moves = self.moves(a, x)?;
            let pick = sample_weighted(&moves.iter().map(|mv| (*mv, mv.prob)).collect::<Vec<_>>(), &mut rng);
            x = pick.to;
            t.constraints.push(a);
            t.r.push(pick.r);
            t.log_product += pick.r.ln();
            t.trajectory.push(x);
        }
        if t.log_product > LOG_PRODUCT_TOL {
            t.verdict = Verdict::NoProductTest {
                log_product: t.log_product,
            };
        }
        Ok(t)
    }
}

/// One protocol run with stream `(seed, 0)`.
pub fn verify(inst: &SatInstance, w: BasisString, params: &VerifierParams, seed: u64) -> Result<VerdictTranscript> {
    Verifier::new(inst, *params)?.run(w, seed, 0)
}

/// Counts over a batch of runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct BatchStats {
    pub runs: u64,
    pub accepted: u64,
    pub rejected_bad: u64,
    pub rejected_product: u64,
    pub min_log_product: f64,
    pub max_log_product: f64,
}

impl BatchStats {
    pub fn accept_rate(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.accepted as f64 / self.runs as f64
        }
    }

    fn single(v: &Verdict, log_product: f64) -> Self {
        BatchStats {
            runs: 1,
            accepted: v.accepted() as u64,
            rejected_bad: matches!(v, Verdict::NoBadString { .. }) as u64,
            rejected_product: matches!(v, Verdict::NoProductTest { .. }) as u64,
            min_log_product: log_product,
            max_log_product: log_product,
        }
    }

    fn merge(self, o: Self) -> Self {
        if self.runs == 0 {
            return o;
        }
        if o.runs == 0 {
            return self;
        }
        BatchStats {
            runs: self.runs + o.runs,
            accepted: self.accepted + o.accepted,
            rejected_bad: self.rejected_bad + o.rejected_bad,
            rejected_product: self.rejected_product + o.rejected_product,
            min_log_product: self.min_log_product.min(o.min_log_product),
            max_log_product: self.max_log_product.max(o.max_log_product),
        }
    }
}

/// Runs `0..runs`, run `i` on stream `(seed, i)`; `inspect` sees every
/// transcript and may veto it with an error.
pub fn verify_batch<F>(verifier: &Verifier, w: BasisString, seed: u64, runs: u64, inspect: F) -> Result<BatchStats>
where
    F: Fn(&VerdictTranscript) -> Result<()> + Sync,
{
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let t = verifier.run(w, seed, i)?;
            inspect(&t)?;
            Ok(BatchStats::single(&t.verdict, t.log_product))
        })
        .try_reduce(BatchStats::default, |a, b| Ok(a.merge(b)))
}

/// Row perturbations used to probe the verifier's sensitivity to sampling
/// precision. Each changes a row by at most `δ` in L1 norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Perturbation {
    None,
    /// Mix towards the uniform distribution on `N_a(x)`.
    TowardUniform(f64),
    /// Move mass onto one neighbor, preferring a bad one.
    TowardBad(f64),
}

fn perturb(moves: &mut [Move], p: Perturbation, projs: &ProjectorSet) {
    let k = moves.len();
    if k < 2 {
        return;
    }
    match p {
        Perturbation::None => {}
        Perturbation::TowardUniform(delta) => {
            let u = 1.0 / k as f64;
            let d: f64 = moves.iter().map(|m| (m.prob - u).abs()).sum();
            if d > 0.0 {
                let t = (delta / d).min(1.0);
                for m in moves.iter_mut() {
                    m.prob = (1.0 - t) * m.prob + t * u;
                }
            }
        }
        Perturbation::TowardBad(delta) => {
            let target = moves
                .iter()
                .position(|m| !projs.classify(m.to).is_good())
                .unwrap_or_else(|| {
                    (0..k)
                        .min_by(|&i, &j| moves[i].prob.total_cmp(&moves[j].prob))
                        .expect("non-empty")
                });
            let others: f64 = moves.iter().enumerate().filter(|(i, _)| *i != target).map(|(_, m)| m.prob).sum();
            let shift = (delta / 2.0).min(others);
            if shift > 0.0 {
                for (i, m) in moves.iter_mut().enumerate() {
                    if i == target {
                        m.prob += shift;
                    } else {
                        m.prob -= shift * m.prob / others;
                    }
                }
            }
        }
    }
}

/// Exact acceptance probability from `w`, by dynamic programming over
/// (string, accumulated log-ratio) with rows optionally perturbed.
pub fn exact_acceptance(verifier: &Verifier, w: BasisString, perturbation: Perturbation) -> Result<f64> {
    // Log-ratios are keyed on a 1e-12 grid so equal products merge.
    const SCALE: f64 = 1e12;
    let m = verifier.inst.m();
    let mut states: HashMap<(BasisString, i64), f64> = HashMap::new();
    states.insert((w, 0), 1.0);
    let mut accepted = 0.0;
    for j in 0..=verifier.params.l {
        let mut next: HashMap<(BasisString, i64), f64> = HashMap::new();
        for ((x, key), prob) in states {
            if !verifier.projs.classify(x).is_good() {
                continue;
            }
            if j == verifier.params.l {
                if key as f64 / SCALE <= LOG_PRODUCT_TOL {
                    accepted += prob;
                }
                continue;
            }
            for a in 0..m {
                let mut moves = verifier.moves(a, x)?;
                perturb(&mut moves, perturbation, &verifier.projs);
                for mv in moves {
                    if mv.prob <= 0.0 {
                        continue;
                    }
                    let k = key + (mv.r.ln() * SCALE).round() as i64;
                    *next.entry((mv.to, k)).or_insert(0.0) += prob * mv.prob / m as f64;
                }
            }
        }
        states = next;
    }
    Ok(accepted)
}

/// Why a single term is not `I - Π` with `Π` a projector whose entries
/// are exactly 0, 1/2 or 1; `None` if it is.
pub fn half_integral_violation(t: &LocalTerm) -> Option<String> {
    let d = t.dim();
    let pi = nalgebra::DMatrix::identity(d, d) - t.matrix();
    if let Some(v) = pi.iter().find(|v| ![0.0, 0.5, 1.0].iter().any(|w| (*v - w).abs() <= 1e-9)) {
        return Some(format!("projector entry {v} is not 0, 1/2 or 1"));
    }
    if (&pi * &pi - &pi).abs().max() > 1e-9 {
        return Some("I - H is not a projector".into());
    }
    None
}

/// Checks every constraint with [`half_integral_violation`].
pub fn check_half_integral(inst: &SatInstance) -> Result<()> {
    for (a, t) in inst.constraints().iter().enumerate() {
        if let Some(reason) = half_integral_violation(t) {
            return Err(Error::InstanceClass { constraint: a, reason });
        }
    }
    Ok(())
}

/// Graph edges out of `x`: one `(a, y)` per constraint whose projector has
/// `⟨x|Π_a|y⟩ = 1/2`. The same `y` may appear under several `a`.
pub fn graph_edges(projs: &ProjectorSet, x: BasisString) -> Vec<(usize, BasisString)> {
    projs
        .iter()
        .enumerate()
        .flat_map(|(a, p)| {
            p.block_neighbors(x)
                .filter(move |&(y, v)| y != x && (v - 0.5).abs() <= 1e-9)
                .map(move |(y, _)| (a, y))
        })
        .collect()
}

/// The verifier specialized to `{0, ½, 1}` projectors with `β = 1`: each
/// edge is taken with probability `1/(2M)`, and the walk rejects at the
/// first bad vertex.
pub struct GraphWalk<'a> {
    inst: &'a SatInstance,
    projs: ProjectorSet,
}

impl<'a> GraphWalk<'a> {
    pub fn new(inst: &'a SatInstance) -> Result<Self> {
        check_half_integral(inst)?;
        Ok(GraphWalk {
            inst,
            projs: ProjectorSet::build(inst.hamiltonian(), TAU_ZERO)?,
        })
    }

    pub fn projectors(&self) -> &ProjectorSet {
        &self.projs
    }

    pub fn run(&self, w: BasisString, l: u64, seed: u64, index: u64) -> VerdictTranscript {
        let mut rng = stream(seed, index);
        let mut t = VerdictTranscript {
            witness: w,
            seed,
            trajectory: vec![w],
            constraints: Vec::new(),
            r: Vec::new(),
            log_product: 0.0,
            verdict: Verdict::Yes,
        };
        if w.n() != self.inst.n() {
            t.verdict = Verdict::NoBadString {
                step: 0,
                constraint: None,
            };
            return t;
        }
        let two_m = 2 * self.inst.m();
        let mut x = w;
        for j in 0..=l {
            if let Classification::Bad { constraint } = self.projs.classify(x) {
                t.verdict = Verdict::NoBadString {
                    step: j,
                    constraint: Some(constraint),
                };
                return t;
            }
            if j == l {
                break;
            }
            let edges = graph_edges(&self.projs, x);
            let slot = rng.random_range(0..two_m);
            if let Some(&(a, y)) = edges.get(slot) {
                t.constraints.push(a);
                x = y;
            }
            t.r.push(1.0);
            t.trajectory.push(x);
        }
        t
    }
}

/// One graph-walk run with stream `(seed, 0)`.
pub fn simplified_walk(inst: &SatInstance, w: BasisString, l: u64, seed: u64) -> Result<VerdictTranscript> {
    Ok(GraphWalk::new(inst)?.run(w, l, seed, 0))
}

pub fn graph_batch(walk: &GraphWalk, w: BasisString, l: u64, seed: u64, runs: u64) -> BatchStats {
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let t = walk.run(w, l, seed, i);
            BatchStats::single(&t.verdict, 0.0)
        })
        .reduce(BatchStats::default, BatchStats::merge)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Census {
    AllGood { component: Vec<BasisString> },
    FoundBad { vertex: BasisString },
    CapExceeded { visited: usize },
}

/// Breadth-first search of `w`'s component in the `{0, ½, 1}` graph,
/// neighbors in increasing order, stopping at the first bad vertex or once
/// more than `cap` vertices are discovered.
pub fn good_component_census(inst: &SatInstance, w: BasisString, cap: usize) -> Result<Census> {
    check_half_integral(inst)?;
    inst.hamiltonian().check_string(w)?;
    let projs = ProjectorSet::build(inst.hamiltonian(), TAU_ZERO)?;
    if !projs.classify(w).is_good() {
        return Ok(Census::FoundBad { vertex: w });
    }
    let mut seen = BTreeSet::from([w]);
    let mut queue = VecDeque::from([w]);
    while let Some(x) = queue.pop_front() {
        let nbrs: BTreeSet<BasisString> = graph_edges(&projs, x).into_iter().map(|(_, y)| y).collect();
        for y in nbrs {
            if seen.contains(&y) {
                continue;
            }
            if !projs.classify(y).is_good() {
                return Ok(Census::FoundBad { vertex: y });
            }
            seen.insert(y);
            if seen.len() > cap {
                return Ok(Census::CapExceeded { visited: seen.len() });
            }
            queue.push_back(y);
        }
    }
    Ok(Census::AllGood {
        component: seen.into_iter().collect(),
    })
}

/// Experimental walk for stoquastic Hamiltonians that need not be
/// frustration-free: like the verifier's walk, but a step whose chosen
/// constraint vanishes on the current string stays put instead of
/// rejecting. Nothing is claimed about its stationary distribution.
pub fn modified_walk(inst: &SatInstance, x0: BasisString, beta: f64, steps: u64, seed: u64) -> Result<Vec<BasisString>> {
    inst.hamiltonian().check_string(x0)?;
    let params = VerifierParams {
        beta,
        l: steps,
        precision_delta: 0.0,
    };
    let v = Verifier::new(inst, params)?;
    let mut rng = stream(seed, 0);
    let mut x = x0;
    let mut out = vec![x];
    for _ in 0..steps {
        let a = rng.random_range(0..inst.m());
        if v.projs.get(a).diag(x) > TAU_ZERO {
            let moves = v.moves(a, x)?;
            x = sample_weighted(&moves.iter().map(|m| (m.to, m.prob)).collect::<Vec<_>>(), &mut rng);
        }
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::ops;

    fn bs(s: &str) -> BasisString {
        s.parse().unwrap()
    }

    fn plus_only() -> SatInstance {
        SatInstance::new(1, vec![LocalTerm::new(vec![0], ops::not_plus()).unwrap()], 0.1).unwrap()
    }

    pub(crate) fn no_instance() -> SatInstance {
        SatInstance::new(
            1,
            vec![
                LocalTerm::new(vec![0], ops::not_plus()).unwrap(),
                LocalTerm::new(vec![0], ops::diag(&[1.0, 0.0])).unwrap(),
            ],
            1.0 - std::f64::consts::FRAC_1_SQRT_2,
        )
        .unwrap()
    }

    #[test]
    fn params_examples() {
        assert_eq!(verifier_steps(1, 2, 0.29, 1.0).unwrap(), 10);
        assert_eq!(verifier_steps(1, 1, 1.0, 1.0).unwrap(), 1);
        assert!(verifier_steps(60, 1, 1e-12, 1.0).is_err());
        let p = choose_params(&no_instance()).unwrap();
        assert_eq!(p.beta, 1.0);
        assert!(acceptance_bound(&no_instance(), &p) <= 1.0 / 3.0);
    }

    #[test]
    fn bound_edge_cases() {
        assert_eq!(acceptance_bound_for(2, 1, 0.0, 1.0, 5), 1.0);
        assert_eq!(acceptance_bound_for(2, 1, 0.5, 1.0, 0), 1.0);
        assert_eq!(acceptance_bound_for(0, 1, 0.5, 1.0, 0), 1.0);
        assert_eq!(acceptance_bound_for(1, 1, 1.0, 1.0, 1), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let bad = LocalTerm::new(vec![0], ops::diag(&[-1.0, 0.0])).unwrap();
        assert!(matches!(SatInstance::new(1, vec![bad], 0.1), Err(Error::NotPsd { term: 0, .. })));
        let ok = LocalTerm::new(vec![0], ops::one_minus_x()).unwrap();
        assert!(SatInstance::new(1, vec![ok], 0.0).is_err());
    }

    #[test]
    fn prover_examples() {
        assert_eq!(honest_prover(&plus_only()).unwrap(), bs("0"));
        assert!(matches!(honest_prover(&no_instance()), Err(Error::NotSatisfiable(_))));
    }

    #[test]
    fn yes_instance_always_accepts() {
        let inst = plus_only();
        let p = choose_params(&inst).unwrap();
        for seed in 0..50 {
            let t = verify(&inst, bs("0"), &p, seed).unwrap();
            assert_eq!(t.verdict, Verdict::Yes);
            assert!(t.r.iter().all(|&r| r == 1.0));
            assert_eq!(t.trajectory.len() as u64, p.l + 1);
        }
    }

    #[test]
    fn malformed_witness_rejected_at_step_zero() {
        let inst = plus_only();
        let p = choose_params(&inst).unwrap();
        let t = verify(&inst, bs("01"), &p, 0).unwrap();
        assert_eq!(
            t.verdict,
            Verdict::NoBadString {
                step: 0,
                constraint: None
            }
        );
    }

    #[test]
    fn census_examples() {
        assert_eq!(
            good_component_census(&plus_only(), bs("0"), 10).unwrap(),
            Census::AllGood {
                component: vec![bs("0"), bs("1")]
            }
        );
        assert_eq!(
            good_component_census(&no_instance(), bs("1"), 10).unwrap(),
            Census::FoundBad { vertex: bs("0") }
        );
    }

    #[test]
    fn census_cap() {
        // I - |+⟩⟨+| on each of 5 qubits: one 32-vertex all-good component
        let terms = (0..5).map(|q| LocalTerm::new(vec![q], ops::not_plus()).unwrap()).collect();
        let inst = SatInstance::new(5, terms, 0.1).unwrap();
        assert!(matches!(
            good_component_census(&inst, BasisString::zeros(5).unwrap(), 10).unwrap(),
            Census::CapExceeded { .. }
        ));
    }

    #[test]
    fn graph_walk_rejects_other_classes() {
        let inst = SatInstance::new(1, vec![LocalTerm::new(vec![0], ops::diag(&[0.3, 0.0])).unwrap()], 0.1).unwrap();
        assert!(matches!(GraphWalk::new(&inst), Err(Error::InstanceClass { .. })));
    }

    #[test]
    fn classical_sat_never_moves() {
        // diagonal projectors: x0 ∨ x1 and ¬x0
        let c1 = LocalTerm::new(vec![0, 1], ops::diag(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        let c2 = LocalTerm::new(vec![0], ops::diag(&[0.0, 1.0])).unwrap();
        let inst = SatInstance::new(2, vec![c1, c2], 0.1).unwrap();
        let t = simplified_walk(&inst, bs("10"), 20, 3).unwrap();
        assert!(t.trajectory.iter().all(|&x| x == bs("10")));
        assert!(t.verdict.accepted());
        let t = simplified_walk(&inst, bs("11"), 20, 3).unwrap();
        assert!(!t.verdict.accepted());
    }

    #[test]
    fn exact_acceptance_of_yes_instance_is_one() {
        let inst = plus_only();
        let v = Verifier::new(&inst, choose_params(&inst).unwrap()).unwrap();
        assert!((exact_acceptance(&v, bs("0"), Perturbation::None).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn modified_walk_stays_on_vanishing_terms() {
        let inst = no_instance();
        let path = modified_walk(&inst, bs("1"), 1.0, 50, 9).unwrap();
        assert_eq!(path.len(), 51);
    }
}
