use stoqwalk::builders::{gibbs_sff, ClassicalHamiltonian, ClassicalTerm};
use stoqwalk::fixtures;
use stoqwalk::oracle::{nonnegative_ground_basis, unsat_value};
use stoqwalk::protocol::{
    acceptance_bound, choose_params, exact_acceptance, honest_prover, simplified_walk, verify, verify_batch, Census,
    Perturbation, Verdict, Verifier,
};
use stoqwalk::stats::binomial_sigma;
use stoqwalk::{BasisString, SatInstance};

fn bs(s: &str) -> BasisString {
    s.parse().unwrap()
}

fn gibbs_z() -> SatInstance {
    let hc = ClassicalHamiltonian::new(
        1,
        vec![ClassicalTerm {
            support: vec![0],
            values: vec![1.0, -1.0],
        }],
        None,
    )
    .unwrap();
    let g = gibbs_sff(&hc, 1.0).unwrap();
    SatInstance::new(1, g.hamiltonian.terms().to_vec(), 0.1).unwrap()
}

#[test]
fn no_instance_closed_form() {
    // [[1.5, -0.5], [-0.5, 0.5]] has eigenvalues 1 ± 1/√2.
    let inst = fixtures::plus_zero_conflict();
    assert!((unsat_value(&inst).unwrap() - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
    assert!((unsat_value(&fixtures::classical_contradiction()).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn no_instance_parameters_and_soundness() {
    let inst = fixtures::plus_zero_conflict();
    let p = choose_params(&inst).unwrap();
    assert_eq!((p.beta, p.l), (1.0, 10));
    let bound = acceptance_bound(&inst, &p);
    assert!(bound <= 1.0 / 3.0);
    let runs = 10_000;
    let v = Verifier::new(&inst, p).unwrap();
    let stats = verify_batch(&v, bs("1"), 21, runs, |_| Ok(())).unwrap();
    assert!(stats.accept_rate() <= bound + 3.0 * binomial_sigma(bound, runs));
    // Exact value agrees with the sampled one.
    let exact = exact_acceptance(&v, bs("1"), Perturbation::None).unwrap();
    assert!((exact - stats.accept_rate()).abs() <= 4.0 * binomial_sigma(exact, runs));
    assert!(exact <= bound);
}

#[test]
fn gibbs_prover_picks_the_heavier_string() {
    assert_eq!(honest_prover(&gibbs_z()).unwrap(), bs("1"));
}

#[test]
fn compiled_prover_picks_a_history_string() {
    let inst = fixtures::compiled(&fixtures::copy_circuit()).unwrap();
    let w = honest_prover(&inst).unwrap();
    let psi = &nonnegative_ground_basis(inst.hamiltonian()).unwrap()[0];
    assert!(psi.contains(w));
    assert_eq!(psi.argmax(), w);
}

#[test]
fn sub_maximal_witness_never_meets_bad_strings() {
    let inst = gibbs_z();
    let p = choose_params(&inst).unwrap();
    let v = Verifier::new(&inst, p).unwrap();
    let stats = verify_batch(&v, bs("0"), 4, 2000, |t| {
        assert!(!matches!(t.verdict, Verdict::NoBadString { .. }));
        Ok(())
    })
    .unwrap();
    // From the lighter string the product test fires whenever the walk ends at 1.
    assert!(stats.rejected_product > 0);
    assert_eq!(stats.rejected_bad, 0);
}

#[test]
fn transcripts_replay_and_telescope() {
    let inst = gibbs_z();
    let p = choose_params(&inst).unwrap();
    let a = verify(&inst, bs("1"), &p, 99).unwrap();
    let b = verify(&inst, bs("1"), &p, 99).unwrap();
    assert_eq!(a, b);
    let prod: f64 = a.r.iter().product();
    let e = std::f64::consts::E;
    let want = if a.trajectory.last() == Some(&bs("1")) { 1.0 } else { 1.0 / e };
    assert!((prod - want).abs() < 1e-9);
}

#[test]
fn compiled_rejecting_circuit_is_sound() {
    let inst = fixtures::compiled(&fixtures::reject_circuit()).unwrap();
    assert!(inst.epsilon() > 0.0);
    let p = choose_params(&inst).unwrap();
    let bound = acceptance_bound(&inst, &p).min(1.0 / 3.0);
    let v = Verifier::new(&inst, p).unwrap();
    let runs = 10_000;
    for w in BasisString::all(inst.n()) {
        let rate = verify_batch(&v, w, 5, runs, |_| Ok(())).unwrap().accept_rate();
        assert!(rate <= bound + 3.0 * binomial_sigma(bound, runs), "{w}: {rate}");
    }
}

#[test]
fn graph_walk_stays_in_an_all_good_component() {
    let inst = fixtures::compiled(&fixtures::copy_circuit()).unwrap();
    let w = honest_prover(&inst).unwrap();
    assert!(matches!(
        stoqwalk::protocol::good_component_census(&inst, w, 1 << 10).unwrap(),
        Census::AllGood { .. }
    ));
    for seed in 0..200 {
        assert!(simplified_walk(&inst, w, 50, seed).unwrap().verdict.accepted());
    }
}

#[test]
fn perturbations_shift_acceptance_by_at_most_l_delta() {
    let inst = fixtures::plus_zero_conflict();
    let v = Verifier::new(&inst, choose_params(&inst).unwrap()).unwrap();
    let base = exact_acceptance(&v, bs("1"), Perturbation::None).unwrap();
    for d in [1e-3, 1e-2] {
        for p in [Perturbation::TowardUniform(d), Perturbation::TowardBad(d)] {
            let acc = exact_acceptance(&v, bs("1"), p).unwrap();
            assert!((acc - base).abs() <= 10.0 * d);
        }
    }
    // Pushing mass toward the bad string can only lower acceptance here.
    assert!(exact_acceptance(&v, bs("1"), Perturbation::TowardBad(1e-2)).unwrap() <= base + 1e-15);
}
