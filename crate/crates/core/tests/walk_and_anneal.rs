use stoqwalk::anneal::{
    anneal, anneal_batch, derive_schedule, estimate_gap, overlap_and_fidelity, ConstantPath, ScheduleParams,
};
use stoqwalk::builders::{gibbs_sff, ClassicalHamiltonian, ClassicalTerm, GibbsPath};
use stoqwalk::hamiltonian::{ops, TAU_ZERO};
use stoqwalk::oracle::{nonnegative_ground_basis, unique_ground_state};
use stoqwalk::stats::{binomial_sigma, empirical, tv_distance};
use stoqwalk::walk::{endpoint_histogram, transition_row, walk_gap_check, WalkConfig};
use stoqwalk::{BasisString, Error, Hamiltonian, LocalTerm, ProjectorSet};

fn bs(s: &str) -> BasisString {
    s.parse().unwrap()
}

fn z_path() -> GibbsPath {
    GibbsPath {
        classical: ClassicalHamiltonian::new(
            1,
            vec![ClassicalTerm {
                support: vec![0],
                values: vec![1.0, -1.0],
            }],
            None,
        )
        .unwrap(),
        beta_final: 1.0,
    }
}

#[test]
fn gibbs_z_row_matches_oracle_ratio() {
    let g = gibbs_sff(&z_path().classical, 1.0).unwrap();
    let h = &g.hamiltonian;
    let projs = ProjectorSet::build(h, TAU_ZERO).unwrap();
    let beta = 0.25;
    let (psi, _) = unique_ground_state(h).unwrap();
    let row = transition_row(h, &projs, bs("0"), beta).unwrap();
    let ratio = psi.amplitude(bs("1")) / psi.amplitude(bs("0"));
    assert!((ratio - std::f64::consts::E).abs() < 1e-9);
    // P(0 → 1) = ratio · β · |H_10|
    assert!((row.prob(bs("1")) - ratio * beta).abs() < 1e-9);
    assert!((row.sum() - 1.0).abs() < 1e-12);
}

#[test]
fn strings_outside_the_support_are_refused() {
    // (I - X) on qubit 0 only where qubit 1 is 0; |1⟩⟨1| penalty on qubit 1.
    // The ground state is |+⟩|0⟩, so strings with qubit 1 set lie outside.
    let mut flip = ops::diag(&[1.0, 0.0, 1.0, 0.0]);
    flip[(0, 1)] = -1.0;
    flip[(1, 0)] = -1.0;
    flip[(1, 1)] = 1.0;
    flip[(2, 2)] = 0.0;
    let h = Hamiltonian::new(
        2,
        vec![
            LocalTerm::new(vec![0, 1], flip).unwrap(),
            LocalTerm::new(vec![1], ops::diag(&[0.0, 1.0])).unwrap(),
        ],
    )
    .unwrap();
    let projs = ProjectorSet::build(&h, TAU_ZERO).unwrap();
    assert!(transition_row(&h, &projs, bs("00"), 0.25).is_ok());
    assert!(matches!(
        transition_row(&h, &projs, bs("10"), 0.25),
        Err(Error::NotInSupport { .. })
    ));
}

#[test]
fn ising_walk_samples_the_ground_distribution() {
    let hc = ClassicalHamiltonian::ising_chain(4, 1.0).unwrap();
    let g = gibbs_sff(&hc, 1.0).unwrap();
    let h = &g.hamiltonian;
    let projs = ProjectorSet::build(h, TAU_ZERO).unwrap();
    let cfg = WalkConfig::new(h, 17, 10_000).unwrap();
    let hist = endpoint_histogram(h, &projs, bs("0000"), &cfg, 100_000).unwrap();
    let (psi, _) = unique_ground_state(h).unwrap();
    let tv = tv_distance(&empirical(&hist, 4), &psi.distribution());
    assert!(tv <= 0.05, "TV {tv}");
}

#[test]
fn two_qubit_gibbs_gap_inequality() {
    let hc = ClassicalHamiltonian::ising_chain(2, 0.8).unwrap();
    let g = gibbs_sff(&hc, 1.3).unwrap();
    let projs = ProjectorSet::build(&g.hamiltonian, TAU_ZERO).unwrap();
    let beta = stoqwalk::walk::choose_beta(&g.hamiltonian).unwrap();
    let checks = walk_gap_check(&g.hamiltonian, &projs, beta).unwrap();
    assert_eq!(checks.len(), 1);
    assert!(checks[0].walk_gap >= checks[0].beta_delta - 1e-9);
}

#[test]
fn degenerate_ground_space_is_checked_per_block() {
    let h = Hamiltonian::new(1, vec![LocalTerm::new(vec![0], ops::diag(&[0.0, 0.0])).unwrap()]).unwrap();
    assert_eq!(nonnegative_ground_basis(&h).unwrap().len(), 2);
    let projs = ProjectorSet::build(&h, TAU_ZERO).unwrap();
    let checks = walk_gap_check(&h, &projs, 1.0).unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c.support_size == 1 && c.walk_gap == 1.0));
}

#[test]
fn constant_path_ends_uniform() {
    let h = Hamiltonian::new(1, vec![LocalTerm::new(vec![0], ops::one_minus_x()).unwrap()]).unwrap();
    let path = ConstantPath(h);
    let schedule = derive_schedule(&path, 0.1, None, None).unwrap();
    let runs = 10_000;
    let hist = anneal_batch(&path, &schedule, bs("0"), 3, runs).unwrap();
    let p = *hist.get(&bs("1")).unwrap_or(&0) as f64 / runs as f64;
    assert!((p - 0.5).abs() <= 3.0 * binomial_sigma(0.5, runs));
    let rep = overlap_and_fidelity(&path, 4, 2.0, 0.0).unwrap();
    assert!(rep.overlaps.iter().all(|&o| (o - 1.0).abs() < 1e-12));
    assert!(rep.bound <= 1.0);
}

#[test]
fn one_qubit_gibbs_anneal() {
    let path = z_path();
    let schedule = derive_schedule(&path, 0.05, None, None).unwrap();
    let hist = anneal_batch(&path, &schedule, bs("0"), 11, 100_000).unwrap();
    let e = std::f64::consts::E;
    let want = [1.0 / e / (1.0 / e + e), e / (1.0 / e + e)];
    let tv = tv_distance(&empirical(&hist, 1), &want);
    assert!(tv <= 0.05, "TV {tv}");
}

#[test]
fn oracle_mode_records_every_stage() {
    let path = z_path();
    let schedule = derive_schedule(&path, 0.2, None, None).unwrap();
    let out = anneal(&path, &schedule, bs("0"), 5, true).unwrap();
    let d = out.diagnostics.unwrap();
    assert_eq!(d.records.len() as u64, schedule.t + 1);
    assert!(d.all_warm());
    assert!(d.overlaps_ok());
    assert_eq!(out.endpoints.len() as u64, schedule.t + 2);
}

#[test]
fn overlaps_meet_the_bound_on_small_gibbs_paths() {
    let two = GibbsPath {
        classical: ClassicalHamiltonian::ising_chain(2, 1.0).unwrap(),
        beta_final: 1.0,
    };
    for (path, t) in [(z_path(), 16), (two, 8)] {
        let s = derive_schedule(&path, 0.5, None, None).unwrap();
        let rep = overlap_and_fidelity(&path, t, s.gap, s.slope).unwrap();
        assert_eq!(rep.overlaps.len() as u64, t);
    }
}

#[test]
fn schedule_uses_the_oracle_gap() {
    let path = GibbsPath {
        classical: ClassicalHamiltonian::ising_chain(2, 1.0).unwrap(),
        beta_final: 1.0,
    };
    let g32 = estimate_gap(&path, 32).unwrap();
    let s = derive_schedule(&path, 0.2, Some(g32), None).unwrap();
    assert_eq!(s.gap, g32);
    assert!(s.t >= 1 && s.l >= 1);
}

#[test]
fn start_must_be_heavy_in_oracle_mode() {
    // The s = 0 state is uniform, so every start passes; a path that begins
    // at a classical state does not.
    let start = vec![LocalTerm::new(vec![0], ops::diag(&[0.0, 1.0])).unwrap()];
    let end = vec![LocalTerm::new(vec![0], ops::diag(&[0.0, 1.0])).unwrap()];
    let path = stoqwalk::anneal::LinearTermsPath::new(1, start, end).unwrap();
    let schedule = ScheduleParams {
        t: 2,
        l: 1,
        beta: 1.0,
        delta: 0.1,
        delta_mix: 0.01,
        gap: 1.0,
        slope: 0.0,
    };
    assert!(anneal(&path, &schedule, bs("0"), 1, true).is_ok());
    assert!(anneal(&path, &schedule, bs("1"), 1, true).is_err());
}
