//! Classical simulation of adiabatic evolution along a stoquastic
//! frustration-free path `H(s)`.
//!
//! The path is cut into stages `H^{(j)} = H(j/T)`; each stage runs `L` steps
//! of the ground-state walk from the previous stage's endpoint. The
//! algorithm never looks at a ground state. Oracle mode overlays
//! diagnostics that check the warm-start chain the analysis relies on.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::BasisString;
use crate::error::{Error, Result};
use crate::hamiltonian::{require_stoquastic, spectral_norm, stoquastic_terms, Hamiltonian, LocalTerm, TAU_ZERO};
use crate::oracle::{self, NonNegativeState};
use crate::projector::ProjectorSet;
use crate::rng::stream;
use crate::stats::fidelity;
use crate::walk::{dense_transition_matrix, Walker};

/// Points in the `s` grid used for slope, gap and norm scans.
pub const GRID_POINTS: usize = 128;
/// Central finite-difference step for the slope estimate.
pub const FD_STEP: f64 = 1e-4;
/// Balance factor used for the warm-start diagnostics.
pub const BALANCE_T: f64 = 16.0;
/// Largest `n` for which schedule quantities are estimated densely.
pub const MAX_ORACLE_PATH_QUBITS: usize = 10;
/// Upper limit on `T` and `L`.
pub const MAX_COUNT: f64 = 1e12;

/// A path `s ↦ H(s)` on `[0, 1]` whose term supports do not depend on `s`.
pub trait PathFamily: Send + Sync {
    fn n(&self) -> usize;

    fn terms_at(&self, s: f64) -> Result<Vec<LocalTerm>>;

    /// Declared bound on `‖dH/ds‖`, if the path carries one.
    fn declared_slope(&self) -> Option<f64> {
        None
    }

    fn hamiltonian_at(&self, s: f64) -> Result<Hamiltonian> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Parameter(format!("path parameter {s} outside [0, 1]")));
        }
        Hamiltonian::new(self.n(), self.terms_at(s)?)
    }
}

/// `H(s) = H` for every `s`.
#[derive(Clone, Debug)]
pub struct ConstantPath(pub Hamiltonian);

impl PathFamily for ConstantPath {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn terms_at(&self, _s: f64) -> Result<Vec<LocalTerm>> {
        Ok(self.0.terms().to_vec())
    }

    fn declared_slope(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Termwise `(1 - s) A_a + s B_a`. Stoquasticity of both endpoints carries
/// over to every `s` since off-diagonal signs are preserved by convex
/// combination.
#[derive(Clone, Debug)]
pub struct LinearTermsPath {
    n: usize,
    start: Vec<LocalTerm>,
    end: Vec<LocalTerm>,
}

impl LinearTermsPath {
    pub fn new(n: usize, start: Vec<LocalTerm>, end: Vec<LocalTerm>) -> Result<Self> {
        if start.len() != end.len() {
            return Err(Error::invalid(
                "terms_end",
                format!("expected {} terms, got {}", start.len(), end.len()),
            ));
        }
        for (a, (s, e)) in start.iter().zip(&end).enumerate() {
            if s.support() != e.support() {
                return Err(Error::invalid(
                    format!("terms_end[{a}].support"),
                    "must match the start term's support",
                ));
            }
        }
        Hamiltonian::new(n, start.clone())?;
        Hamiltonian::new(n, end.clone())?;
        for (what, terms) in [("path start", &start), ("path end", &end)] {
            if let Some(o) = stoquastic_terms(terms, TAU_ZERO).offenders.first() {
                return Err(Error::NotStoquastic {
                    what: what.into(),
                    term: o.term,
                    row: o.row,
                    col: o.col,
                    value: o.value,
                });
            }
        }
        Ok(LinearTermsPath { n, start, end })
    }
}

impl PathFamily for LinearTermsPath {
    fn n(&self) -> usize {
        self.n
    }

    fn terms_at(&self, s: f64) -> Result<Vec<LocalTerm>> {
        self.start
            .iter()
            .zip(&self.end)
            .map(|(a, b)| LocalTerm::new(a.support().to_vec(), a.matrix() * (1.0 - s) + b.matrix() * s))
            .collect()
    }
}

/// `i / (points - 1)` for `i = 0..points`.
pub fn grid(points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

fn check_oracle_path(path: &dyn PathFamily) -> Result<()> {
    if path.n() > MAX_ORACLE_PATH_QUBITS {
        return Err(Error::Capacity {
            n: path.n(),
            max: MAX_ORACLE_PATH_QUBITS,
        });
    }
    Ok(())
}

/// `max_s ‖dH/ds‖` by central differences with step `h` on a grid
/// (one-sided at the endpoints).
pub fn estimate_slope(path: &dyn PathFamily, points: usize, h: f64) -> Result<f64> {
    check_oracle_path(path)?;
    grid(points)
        .into_par_iter()
        .map(|s| {
            let (a, b) = ((s - h).max(0.0), (s + h).min(1.0));
            let d = (oracle::dense_matrix(&path.hamiltonian_at(b)?)? - oracle::dense_matrix(&path.hamiltonian_at(a)?)?)
                / (b - a);
            Ok(spectral_norm(&d))
        })
        .try_reduce(|| 0.0, |x, y| Ok(x.max(y)))
}

/// Minimum spectral gap over the grid. Every grid point must be
/// frustration-free with a unique ground state.
pub fn estimate_gap(path: &dyn PathFamily, points: usize) -> Result<f64> {
    check_oracle_path(path)?;
    grid(points)
        .into_par_iter()
        .map(|s| {
            let h = path.hamiltonian_at(s)?;
            let spec = oracle::dense_spectrum(&h)?;
            let r = spec.report;
            if r.lambda_min.abs() > 1e-8 * h.norm_sum().max(1.0) {
                return Err(Error::Invariant(format!(
                    "H({s}) is frustrated: lowest eigenvalue {:.3e}",
                    r.lambda_min
                )));
            }
            if r.ground_degeneracy != 1 {
                return Err(Error::Invariant(format!(
                    "H({s}) has a {}-fold degenerate ground space",
                    r.ground_degeneracy
                )));
            }
            Ok(r.gap)
        })
        .try_reduce(|| f64::INFINITY, |x, y| Ok(x.min(y)))
}

/// `1 / max_s Σ_a ‖H_a(s)‖` over the grid.
pub fn path_beta(path: &dyn PathFamily, points: usize) -> Result<f64> {
    let worst = grid(points)
        .into_par_iter()
        .map(|s| Ok(path.hamiltonian_at(s)?.norm_sum()))
        .try_reduce(|| 0.0, |x: f64, y| Ok(x.max(y)))?;
    if worst <= 0.0 {
        return Err(Error::Parameter("path is identically zero".into()));
    }
    Ok(1.0 / worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScheduleParams {
    /// Number of path steps; stages run for `j = 0..=t`.
    pub t: u64,
    /// Walk steps per stage.
    pub l: u64,
    pub beta: f64,
    pub delta: f64,
    pub delta_mix: f64,
    pub gap: f64,
    pub slope: f64,
}

fn checked_count(v: f64, what: &str) -> Result<u64> {
    if !v.is_finite() || v > MAX_COUNT {
        return Err(Error::Parameter(format!("{what} = {v:.3e} exceeds the cap {MAX_COUNT:e}")));
    }
    Ok((v.ceil() as u64).max(1))
}

/// `T = ⌈4J² / (Δ² δ)⌉`, at least 1.
pub fn stage_count(slope: f64, gap: f64, delta: f64) -> Result<u64> {
    if !(gap > 0.0) {
        return Err(Error::Parameter(format!("gap must be positive, got {gap}")));
    }
    checked_count(4.0 * slope * slope / (gap * gap * delta), "T")
}

/// Smallest `L ≥ 1` with `2^{n+1} (1 - βΔ)^L ≤ δ_mix`.
pub fn walk_length(n: usize, beta: f64, gap: f64, delta_mix: f64) -> Result<u64> {
    let x = beta * gap;
    let target = delta_mix.ln() - (n as f64 + 1.0) * std::f64::consts::LN_2;
    if x >= 1.0 || target >= 0.0 {
        return Ok(1);
    }
    if !(x > 0.0) {
        return Err(Error::Parameter(format!("βΔ must be positive, got {x}")));
    }
    checked_count(target / (-x).ln_1p(), "L")
}

/// Schedule from the failure budget `delta`. Missing `gap` or `slope` is
/// estimated densely, which requires a small `n`.
pub fn derive_schedule(
    path: &dyn PathFamily,
    delta: f64,
    gap: Option<f64>,
    slope: Option<f64>,
) -> Result<ScheduleParams> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    let need_oracle = |what: &str| {
        if path.n() > MAX_ORACLE_PATH_QUBITS {
            Err(Error::Parameter(format!(
                "{what} must be supplied for paths on more than {MAX_ORACLE_PATH_QUBITS} qubits"
            )))
        } else {
            Ok(())
        }
    };
    let slope = match slope.or(path.declared_slope()) {
        Some(j) => j,
        None => {
            need_oracle("the slope bound J")?;
            estimate_slope(path, GRID_POINTS, FD_STEP)?
        }
    };
    let gap = match gap {
        Some(g) => g,
        None => {
            need_oracle("the gap Δ")?;
            estimate_gap(path, GRID_POINTS)?
        }
    };
    let beta = path_beta(path, GRID_POINTS)?;
    let t = stage_count(slope, gap, delta)?;
    let delta_mix = delta / (10.0 * (t as f64 + 1.0));
    let l = walk_length(path.n(), beta, gap, delta_mix)?;
    Ok(ScheduleParams {
        t,
        l,
        beta,
        delta,
        delta_mix,
        gap,
        slope,
    })
}

/// Membership in `M_t(π, ρ)`: both positive at `x` and the ratio within
/// `[1/t, t]`.
pub fn t_balanced(pi: &[f64], rho: &[f64], t: f64, x: usize) -> bool {
    let (p, r) = (pi[x], rho[x]);
    p > 0.0 && r > 0.0 && p / r >= 1.0 / t && p / r <= t
}

/// `(π(M_t), 1 - 2δ/(1 - 2/√t))` with `δ = 1 - F(π, ρ)`; errors if the
/// first is below the second.
pub fn balanced_mass_bound(pi: &[f64], rho: &[f64], t: f64) -> Result<(f64, f64)> {
    if !(t >= 4.0) {
        return Err(Error::Parameter(format!("balance factor must be at least 4, got {t}")));
    }
    let mass: f64 = (0..pi.len())
        .filter(|&x| t_balanced(pi, rho, t, x))
        .map(|x| pi[x])
        .sum();
    let delta = (1.0 - fidelity(pi, rho)).max(0.0);
    let denom = 1.0 - 2.0 / t.sqrt();
    let bound = if delta == 0.0 {
        1.0
    } else if denom <= 0.0 {
        f64::NEG_INFINITY
    } else {
        1.0 - 2.0 * delta / denom
    };
    if mass < bound - 1e-12 {
        return Err(Error::Invariant(format!(
            "balanced mass {mass} below the bound {bound}"
        )));
    }
    Ok((mass, bound))
}

/// Stage `j` of `t`: its Hamiltonian and projectors, checked against `β`.
pub fn stage(path: &dyn PathFamily, j: u64, t: u64, beta: f64) -> Result<(Hamiltonian, ProjectorSet)> {
    let s = j as f64 / t as f64;
    let h = path.hamiltonian_at(s)?;
    require_stoquastic(&h, &format!("H({s})"))?;
    if beta * h.norm_sum() > 1.0 + 1e-9 {
        return Err(Error::Parameter(format!(
            "β = {beta} too large for H({s}) with Σ‖H_a‖ = {}",
            h.norm_sum()
        )));
    }
    let projs = ProjectorSet::build(&h, TAU_ZERO)?;
    Ok((h, projs))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageRecord {
    pub j: u64,
    /// `⟨ψ^{(j+1)}|ψ^{(j)}⟩`; absent at the last stage.
    pub overlap: Option<f64>,
    /// `F(π^{(j)}, π^{(j+1)})`.
    pub fidelity: Option<f64>,
    pub overlap_bound: f64,
    /// Amplitude `⟨x^{(j)}|ψ^{(j)}⟩` of the stage's start.
    pub start_amplitude: f64,
    pub warm_start_ok: bool,
    /// `x^{(j+1)} ∈ M_16(π^{(j)}, π^{(j+1)})`; absent at the last stage.
    pub t_balanced_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnealDiagnostics {
    pub records: Vec<StageRecord>,
}

impl AnnealDiagnostics {
    pub fn all_warm(&self) -> bool {
        self.records.iter().all(|r| r.warm_start_ok)
    }

    pub fn overlaps_ok(&self) -> bool {
        self.records
            .iter()
            .all(|r| r.overlap.is_none_or(|o| o >= r.overlap_bound - 1e-12))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnealOutcome {
    pub final_x: BasisString,
    /// `x^{(0)}, …, x^{(T+1)}`.
    pub endpoints: Vec<BasisString>,
    pub diagnostics: Option<AnnealDiagnostics>,
}

fn stage_failure(stage: u64, x: BasisString, e: Error) -> Error {
    match e {
        Error::NotInSupport { x, reason } => Error::AnnealFailed {
            stage: stage as usize,
            x,
            reason,
        },
        other => Error::AnnealFailed {
            stage: stage as usize,
            x,
            reason: other.to_string(),
        },
    }
}

fn run_stage<R: rand::Rng + ?Sized>(
    walker: &mut Walker,
    j: u64,
    x: BasisString,
    steps: u64,
    rng: &mut R,
) -> Result<BasisString> {
    let mut cur = x;
    for _ in 0..steps {
        cur = walker.step(cur, rng).map_err(|e| stage_failure(j, cur, e))?;
    }
    Ok(cur)
}

fn ground(path: &dyn PathFamily, j: u64, t: u64) -> Result<NonNegativeState> {
    Ok(oracle::unique_ground_state(&path.hamiltonian_at(j as f64 / t as f64)?)?.0)
}

/// One annealing run from `x0` using stream `(seed, 0)`.
///
/// With `oracle` set the start must satisfy `⟨x0|ψ^{(0)}⟩ ≥ 2^{-n}` and every
/// stage is recorded; otherwise nothing but the walk is computed.
pub fn anneal(
    path: &dyn PathFamily,
    schedule: &ScheduleParams,
    x0: BasisString,
    seed: u64,
    oracle: bool,
) -> Result<AnnealOutcome> {
    anneal_indexed(path, schedule, x0, seed, 0, oracle)
}

fn anneal_indexed(
    path: &dyn PathFamily,
    schedule: &ScheduleParams,
    x0: BasisString,
    seed: u64,
    index: u64,
    oracle: bool,
) -> Result<AnnealOutcome> {
    let n = path.n();
    if x0.n() != n {
        return Err(Error::Parameter(format!("start string has {} qubits, path has {n}", x0.n())));
    }
    let t = schedule.t;
    let mut rng = stream(seed, index);
    let mut endpoints = vec![x0];
    let mut records = Vec::new();
    let bound = 1.0 - (schedule.slope / (t as f64 * schedule.gap)).powi(2);

    let mut psi = if oracle {
        check_oracle_path(path)?;
        let psi0 = ground(path, 0, t)?;
        let a = psi0.amplitude(x0);
        if a < (-(n as f64) * std::f64::consts::LN_2).exp() {
            return Err(Error::Parameter(format!(
                "start {x0} has amplitude {a:.3e} < 2^-{n} in the initial ground state"
            )));
        }
        Some(psi0)
    } else {
        None
    };

    let mut x = x0;
    for j in 0..=t {
        let (h, projs) = stage(path, j, t, schedule.beta)?;
        let mut walker = Walker::new(&h, &projs, schedule.beta)?;
        let next = run_stage(&mut walker, j, x, schedule.l, &mut rng)?;
        if let Some(cur) = psi.take() {
            let start_amplitude = cur.amplitude(x);
            let warm = start_amplitude >= (-(n as f64 + 2.0) * std::f64::consts::LN_2).exp();
            let (overlap, fid, balanced, nxt) = if j < t {
                let nxt = ground(path, j + 1, t)?;
                let (p, q) = (cur.distribution(), nxt.distribution());
                (
                    Some(cur.overlap(&nxt)),
                    Some(fidelity(&p, &q)),
                    Some(t_balanced(&p, &q, BALANCE_T, next.value() as usize)),
                    Some(nxt),
                )
            } else {
                (None, None, None, None)
            };
            records.push(StageRecord {
                j,
                overlap,
                fidelity: fid,
                overlap_bound: bound,
                start_amplitude,
                warm_start_ok: warm,
                t_balanced_ok: balanced,
            });
            psi = nxt;
        }
        x = next;
        endpoints.push(x);
    }
    Ok(AnnealOutcome {
        final_x: x,
        endpoints,
        diagnostics: oracle.then_some(AnnealDiagnostics { records }),
    })
}

/// Final-string counts over `runs` independent anneals; run `i` uses
/// stream `(seed, i)`. Stage data is built once and shared.
pub fn anneal_batch(
    path: &dyn PathFamily,
    schedule: &ScheduleParams,
    x0: BasisString,
    seed: u64,
    runs: u64,
) -> Result<BTreeMap<BasisString, u64>> {
    if schedule.t > 1 << 16 {
        return Err(Error::Parameter(format!(
            "batch mode keeps every stage in memory; T = {} is above {}",
            schedule.t,
            1u64 << 16
        )));
    }
    let stages: Vec<(Hamiltonian, ProjectorSet)> = (0..=schedule.t)
        .into_par_iter()
        .map(|j| stage(path, j, schedule.t, schedule.beta))
        .collect::<Result<_>>()?;
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i);
            let mut x = x0;
            for (j, (h, projs)) in stages.iter().enumerate() {
                let mut walker = Walker::trusted(h, projs, schedule.beta);
                x = run_stage(&mut walker, j as u64, x, schedule.l, &mut rng)?;
            }
            Ok(x)
        })
        .try_fold(BTreeMap::new, |mut hist, x: Result<BasisString>| {
            *hist.entry(x?).or_insert(0u64) += 1;
            Ok::<_, Error>(hist)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapReport {
    pub overlaps: Vec<f64>,
    pub fidelities: Vec<f64>,
    pub bound: f64,
}

/// Per-stage overlaps and fidelities between consecutive ground states,
/// with the bound `1 - J²/(T²Δ²)`. Errors if an overlap is below the bound
/// or differs from the fidelity by more than `1e-7`.
pub fn overlap_and_fidelity(path: &dyn PathFamily, t: u64, gap: f64, slope: f64) -> Result<OverlapReport> {
    check_oracle_path(path)?;
    let bound = 1.0 - (slope / (t as f64 * gap)).powi(2);
    let states: Vec<NonNegativeState> = (0..=t).into_par_iter().map(|j| ground(path, j, t)).collect::<Result<_>>()?;
    let mut overlaps = Vec::with_capacity(t as usize);
    let mut fidelities = Vec::with_capacity(t as usize);
    for (j, w) in states.windows(2).enumerate() {
        let o = w[0].overlap(&w[1]);
        let f = fidelity(&w[0].distribution(), &w[1].distribution());
        if o < bound - 1e-12 {
            return Err(Error::Invariant(format!("stage {j}: overlap {o} below bound {bound}")));
        }
        if (o - f).abs() > 1e-7 {
            return Err(Error::Invariant(format!("stage {j}: overlap {o} differs from fidelity {f}")));
        }
        overlaps.push(o);
        fidelities.push(f);
    }
    Ok(OverlapReport {
        overlaps,
        fidelities,
        bound,
    })
}

/// `P^L` for a dense stochastic matrix, by repeated squaring.
pub fn matrix_power(p: &DMatrix<f64>, mut l: u64) -> DMatrix<f64> {
    let mut base = p.clone();
    let mut acc = DMatrix::identity(p.nrows(), p.ncols());
    while l > 0 {
        if l & 1 == 1 {
            acc = &acc * &base;
        }
        l >>= 1;
        if l > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Exact distribution of `x^{(T+1)}` over all `2^n` strings, obtained by
/// pushing the start distribution through every stage's `P^L`.
///
/// Mass that would leave a stage's support is reported as an error: it is
/// exactly the failure event of the algorithm.
pub fn exact_final_distribution(path: &dyn PathFamily, schedule: &ScheduleParams, x0: BasisString) -> Result<Vec<f64>> {
    check_oracle_path(path)?;
    let n = path.n();
    let dim = 1usize << n;
    let mut p = vec![0.0; dim];
    p[x0.value() as usize] = 1.0;
    for j in 0..=schedule.t {
        let (h, projs) = stage(path, j, schedule.t, schedule.beta)?;
        let support: Vec<BasisString> = BasisString::all(n).filter(|&x| p[x.value() as usize] > 0.0).collect();
        let (psi, _) = oracle::unique_ground_state(&h)?;
        // Start mass outside the stage's support is the failure event.
        let lost: f64 = support.iter().filter(|x| !psi.contains(**x)).map(|x| p[x.value() as usize]).sum();
        if lost > 1e-12 {
            return Err(Error::AnnealFailed {
                stage: j as usize,
                x: *support.iter().find(|x| !psi.contains(**x)).expect("lost mass has a string"),
                reason: format!("probability {lost:.3e} starts outside the stage support"),
            });
        }
        let full: Vec<BasisString> = psi.support().collect();
        let pm = matrix_power(&dense_transition_matrix(&h, &projs, schedule.beta, &full)?, schedule.l);
        let mut next = vec![0.0; dim];
        for (i, x) in full.iter().enumerate() {
            let w = p[x.value() as usize];
            if w == 0.0 {
                continue;
            }
            for (k, y) in full.iter().enumerate() {
                next[y.value() as usize] += w * pm[(i, k)];
            }
        }
        p = next;
    }
    Ok(p)
}
