//! Random and named instances for tests, benchmarks and examples.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::builders::{
    circuit_to_6sat, gibbs_sff, Ancilla, AncillaState, ClassicalHamiltonian, ClassicalTerm, Gate, GateKind,
    GibbsInstance, Measurement, ReversibleCircuit,
};
use crate::error::Result;
use crate::hamiltonian::{ops, LocalTerm};
use crate::oracle::unsat_value;
use crate::protocol::SatInstance;

/// Generalized Laplacian on `members` with kernel vector `v`: off-diagonal
/// `-w_xy`, diagonal `Σ_y w_xy v_y / v_x`. Weights form a random connected
/// graph, so `v` spans the kernel on the block.
fn laplacian_block<R: Rng + ?Sized>(m: &mut DMatrix<f64>, members: &[usize], v: &[f64], rng: &mut R) {
    let k = members.len();
    let mut w = DMatrix::<f64>::zeros(k, k);
    for i in 1..k {
        let j = rng.random_range(0..i);
        let x = rng.random_range(0.1..1.0);
        w[(i, j)] = x;
        w[(j, i)] = x;
    }
    for i in 0..k {
        for j in 0..i {
            if w[(i, j)] == 0.0 && rng.random_bool(0.5) {
                let x = rng.random_range(0.1..1.0);
                w[(i, j)] = x;
                w[(j, i)] = x;
            }
        }
    }
    for i in 0..k {
        let mut d = 0.0;
        for j in 0..k {
            if i != j {
                m[(members[i], members[j])] = -w[(i, j)];
                d += w[(i, j)] * v[j];
            }
        }
        m[(members[i], members[i])] = d / v[i];
    }
}

/// A random stoquastic positive semidefinite `k`-local term on qubits
/// `0..k`. The local basis is split into blocks; each block is either a
/// generalized Laplacian with a positive kernel vector or a strictly
/// positive one with no kernel. Half the time the term is instead
/// `I - Σ_b v_b v_bᵀ` for non-negative unit vectors with disjoint supports.
pub fn random_stoquastic_psd_term<R: Rng + ?Sized>(k: usize, rng: &mut R) -> LocalTerm {
    let d = 1usize << k;
    let mut idx: Vec<usize> = (0..d).collect();
    idx.shuffle(rng);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut rest = &idx[..];
    while !rest.is_empty() {
        let size = rng.random_range(1..=rest.len().min(4));
        blocks.push(rest[..size].to_vec());
        rest = &rest[size..];
    }
    let mut m = DMatrix::zeros(d, d);
    if rng.random_bool(0.5) {
        m = DMatrix::identity(d, d);
        for b in &blocks {
            if rng.random_bool(0.3) {
                continue;
            }
            let v = DVector::from_fn(b.len(), |_, _| rng.random_range(0.05..1.0)).normalize();
            for (i, &x) in b.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    m[(x, y)] -= v[i] * v[j];
                }
            }
        }
    } else {
        let scale = rng.random_range(0.2..2.0);
        for b in &blocks {
            let v: Vec<f64> = (0..b.len()).map(|_| rng.random_range(0.05..1.0)).collect();
            laplacian_block(&mut m, b, &v, rng);
            if rng.random_bool(0.3) {
                let shift = rng.random_range(0.1..1.0);
                for &x in b {
                    m[(x, x)] += shift;
                }
            }
        }
        m *= scale;
    }
    let m = (&m + m.transpose()) * 0.5;
    LocalTerm::new((0..k).collect(), m).expect("valid by construction")
}

/// Random open-chain classical Hamiltonian with nearest-neighbour couplings
/// and fields in `[-1, 1]`.
pub fn random_classical_chain<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ClassicalHamiltonian {
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push(ClassicalTerm {
            support: vec![i],
            values: vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
        });
        if i + 1 < n {
            terms.push(ClassicalTerm {
                support: vec![i, i + 1],
                values: (0..4).map(|_| rng.random_range(-1.0..1.0)).collect(),
            });
        }
    }
    ClassicalHamiltonian::new(n, terms, None).expect("valid by construction")
}

/// Gibbs-built SFF instance on a random chain with `β ∈ [0.2, 1.5]`.
pub fn random_gibbs_instance<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GibbsInstance {
    let beta = rng.random_range(0.2..1.5);
    gibbs_sff(&random_classical_chain(n, rng), beta).expect("chain terms are 3-local")
}

fn term(support: Vec<usize>, m: DMatrix<f64>) -> LocalTerm {
    LocalTerm::new(support, m).expect("valid fixture")
}

/// `|ψ⁻⟩⟨ψ⁻|` for the singlet `(|01⟩ - |10⟩)/√2`.
pub fn singlet_projector() -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4, 4);
    m[(1, 1)] = 0.5;
    m[(2, 2)] = 0.5;
    m[(1, 2)] = -0.5;
    m[(2, 1)] = -0.5;
    m
}

/// `I - |+⟩⟨+|` on one qubit.
pub fn plus_instance() -> SatInstance {
    SatInstance::new(1, vec![term(vec![0], ops::not_plus())], 0.1).expect("valid fixture")
}

/// Singlet projectors on neighbouring pairs of an `n`-qubit chain. The
/// ground space is the symmetric subspace.
pub fn symmetric_chain(n: usize) -> SatInstance {
    let terms = (0..n - 1).map(|i| term(vec![i, i + 1], singlet_projector())).collect();
    SatInstance::new(n, terms, 0.1).expect("valid fixture")
}

/// Classical 2-SAT `(x0 ∨ x1) ∧ ¬x0` as diagonal projectors.
pub fn classical_two_sat() -> SatInstance {
    let c1 = term(vec![0, 1], ops::diag(&[1.0, 0.0, 0.0, 0.0]));
    let c2 = term(vec![0], ops::diag(&[0.0, 1.0]));
    SatInstance::new(2, vec![c1, c2], 0.1).expect("valid fixture")
}

fn with_oracle_epsilon(n: usize, terms: Vec<LocalTerm>) -> SatInstance {
    let probe = SatInstance::new(n, terms, 1.0).expect("valid fixture");
    let eps = unsat_value(&probe).expect("small fixture");
    probe.with_epsilon(eps).expect("unsatisfiable fixture")
}

/// `I - |+⟩⟨+|` and `|0⟩⟨0|` on one qubit; unsat value `1 - 1/√2`.
pub fn plus_zero_conflict() -> SatInstance {
    with_oracle_epsilon(1, vec![term(vec![0], ops::not_plus()), term(vec![0], ops::diag(&[1.0, 0.0]))])
}

/// `I - |+⟩⟨+|` on both qubits plus a penalty on `|11⟩`.
pub fn plus_pair_conflict() -> SatInstance {
    with_oracle_epsilon(
        2,
        vec![
            term(vec![0], ops::not_plus()),
            term(vec![1], ops::not_plus()),
            term(vec![0, 1], ops::diag(&[0.0, 0.0, 0.0, 1.0])),
        ],
    )
}

/// `x0 ∧ ¬x0`.
pub fn classical_contradiction() -> SatInstance {
    with_oracle_epsilon(1, vec![term(vec![0], ops::diag(&[1.0, 0.0])), term(vec![0], ops::diag(&[0.0, 1.0]))])
}

fn gate(kind: GateKind, targets: &[usize]) -> Gate {
    Gate {
        kind,
        targets: targets.to_vec(),
    }
}

fn zero(qubit: usize) -> Ancilla {
    Ancilla {
        qubit,
        state: AncillaState::Zero,
    }
}

fn accept_one(qubit: usize) -> Option<Measurement> {
    Some(Measurement {
        qubit,
        accept_state: true,
    })
}

/// Copies witness qubit 1 onto ancilla 0 and accepts on 1; only witness
/// `1` is accepted.
pub fn copy_circuit() -> ReversibleCircuit {
    ReversibleCircuit {
        data_qubits: 2,
        ancillas: vec![zero(0)],
        witness_qubits: vec![1],
        gates: vec![gate(GateKind::Cnot, &[1, 0])],
        measure: accept_one(0),
    }
}

/// Ancilla 0 is never written, so no witness is accepted.
pub fn reject_circuit() -> ReversibleCircuit {
    ReversibleCircuit {
        data_qubits: 2,
        ancillas: vec![zero(0)],
        witness_qubits: vec![1],
        gates: vec![gate(GateKind::Cnot, &[0, 1])],
        measure: accept_one(0),
    }
}

/// Toffoli onto ancilla 0 from witnesses 1 and 2; only `11` is accepted.
pub fn and_circuit() -> ReversibleCircuit {
    ReversibleCircuit {
        data_qubits: 3,
        ancillas: vec![zero(0)],
        witness_qubits: vec![1, 2],
        gates: vec![gate(GateKind::Toffoli, &[1, 2, 0])],
        measure: accept_one(0),
    }
}

/// Copies a `|+⟩` ancilla and accepts on 1: accepts with probability 1/2
/// for every witness, so never with certainty.
pub fn coin_circuit() -> ReversibleCircuit {
    ReversibleCircuit {
        data_qubits: 3,
        ancillas: vec![
            zero(0),
            Ancilla {
                qubit: 1,
                state: AncillaState::Plus,
            },
        ],
        witness_qubits: vec![2],
        gates: vec![gate(GateKind::Cnot, &[1, 0])],
        measure: accept_one(0),
    }
}

/// `gates` identity gates on one `|0⟩` ancilla, accepting on 0.
pub fn identity_circuit(gates: usize) -> ReversibleCircuit {
    ReversibleCircuit {
        data_qubits: 1,
        ancillas: vec![zero(0)],
        witness_qubits: vec![],
        gates: (0..gates).map(|_| gate(GateKind::Id, &[0])).collect(),
        measure: Some(Measurement {
            qubit: 0,
            accept_state: false,
        }),
    }
}

/// Compiles a circuit. The promise gap is the oracle unsat value when
/// positive, else `1/(L+1)³`.
pub fn compiled(c: &ReversibleCircuit) -> Result<SatInstance> {
    let l = c.gate_count() as f64;
    let (inst, _) = circuit_to_6sat(c, (l + 1.0).powi(-3))?;
    let v = unsat_value(&inst)?;
    if v > 1e-9 {
        inst.with_epsilon(v)
    } else {
        Ok(inst)
    }
}

/// The yes-instances used by the completeness checks.
pub fn yes_instances() -> Vec<(&'static str, SatInstance)> {
    let gibbs = |hc: ClassicalHamiltonian, beta: f64| {
        let g = gibbs_sff(&hc, beta).expect("valid fixture");
        SatInstance::new(g.hamiltonian.n(), g.hamiltonian.terms().to_vec(), 0.1).expect("valid fixture")
    };
    let mut rng = crate::rng::stream(7, 0);
    vec![
        ("plus", plus_instance()),
        ("symmetric-chain-3", symmetric_chain(3)),
        ("gibbs-ising-3", gibbs(ClassicalHamiltonian::ising_chain(3, 1.0).expect("valid"), 0.8)),
        ("gibbs-random-4", gibbs(random_classical_chain(4, &mut rng), 1.0)),
        ("compiled-copy", compiled(&copy_circuit()).expect("valid fixture")),
    ]
}

/// The no-instances used by the soundness checks, each with its oracle
/// unsat value as promise gap.
pub fn no_instances() -> Vec<(&'static str, SatInstance)> {
    vec![
        ("plus-zero", plus_zero_conflict()),
        ("plus-pair", plus_pair_conflict()),
        ("compiled-reject", compiled(&reject_circuit()).expect("valid fixture")),
    ]
}
