//! `stoqwalk`: command-line front end.
//!
//! Every subcommand prints a JSON run report (or writes it to `--report`).
//! Exit status is 0 on success, 1 on domain errors and 2 on usage errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use stoqwalk::anneal::{anneal, anneal_batch, derive_schedule};
use stoqwalk::builders::{circuit_to_6sat, gibbs_sff};
use stoqwalk::hamiltonian::{is_stoquastic, TAU_ZERO};
use stoqwalk::io;
use stoqwalk::oracle;
use stoqwalk::projector::ProjectorSet;
use stoqwalk::protocol::{
    acceptance_bound, choose_params, good_component_census, half_integral_violation, honest_prover, modified_walk, verify_batch, Verifier,
    VerifierParams,
};
use stoqwalk::stats::empirical;
use stoqwalk::walk::{endpoint_histogram, run_walk, WalkConfig};
use stoqwalk::{BasisString, Hamiltonian, SatInstance};

#[derive(Parser)]
#[command(name = "stoqwalk", version, about = "Random walks on stoquastic frustration-free Hamiltonians")]
struct Cli {
    /// Write the run report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-term stoquasticity, positivity and projector class.
    Check {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Dense spectrum summary (small n only).
    Oracle {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Run the ground-state walk.
    Walk(WalkArgs),
    /// Simulate adiabatic evolution along a path.
    Anneal(AnnealArgs),
    /// Run the Merlin-Arthur verifier on a witness.
    Verify(VerifyArgs),
    /// Honest prover: print a witness (small n only).
    Prove {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Compile a reversible circuit into a stoquastic 6-SAT instance.
    Compile {
        #[arg(long)]
        circuit: PathBuf,
        /// Promise gap to record; defaults to the oracle unsat value when
        /// positive, else 1/(L+1)^3.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Write the instance JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the coherent-Gibbs Hamiltonian of a classical Hamiltonian.
    Gibbs {
        #[arg(long)]
        classical: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Explore a witness's component in the {0, 1/2, 1} graph.
    Graph {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        witness: String,
        #[arg(long, default_value_t = 1 << 20)]
        cap: usize,
    },
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    start: String,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// CSV of endpoint counts: bitstring,count,frequency.
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Override β (defaults to 1/Σ‖H_a‖).
    #[arg(long)]
    beta: Option<f64>,
    /// Experimental walk for Hamiltonians that need not be frustration-free.
    /// Makes no correctness claims.
    #[arg(long)]
    modified: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Args)]
struct AnnealArgs {
    #[arg(long)]
    path: PathBuf,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    #[arg(long, value_enum, default_value = "off")]
    oracle: Switch,
    /// Start string; defaults to all zeros.
    #[arg(long)]
    start: Option<String>,
    /// Override the stage count T.
    #[arg(long)]
    stages: Option<u64>,
    /// Override the walk length L per stage.
    #[arg(long)]
    steps: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    witness: String,
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// `auto` or a JSON file with beta, l and precision_delta.
    #[arg(long, default_value = "auto")]
    params: String,
    /// One transcript JSON per line.
    #[arg(long)]
    transcripts: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunReport {
    subcommand: &'static str,
    input_digest: String,
    seeds: Vec<u64>,
    parameters: Value,
    results: Value,
    wall_time_s: f64,
}

/// Inputs read so far, hashed in order for the report digest.
#[derive(Default)]
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn digest(self) -> String {
        self.hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn seed_or_fresh(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand_seed();
        eprintln!("no --seed given; using seed {s}");
        s
    })
}

fn rand_seed() -> u64 {
    use std::hash::{BuildHasher, Hasher};
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u128(
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0),
    );
    h.finish()
}

fn bits(s: &str, n: usize) -> Result<BasisString> {
    let x: BasisString = s.parse()?;
    if x.n() != n {
        bail!("bit string {s} has {} qubits, the instance has {n}", x.n());
    }
    Ok(x)
}

fn write_out(path: &Option<PathBuf>, value: &impl Serialize) -> Result<Option<Value>> {
    match path {
        Some(p) => {
            fs::write(p, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", p.display()))?;
            Ok(None)
        }
        None => Ok(Some(serde_json::to_value(value)?)),
    }
}

struct Outcome {
    seeds: Vec<u64>,
    parameters: Value,
    results: Value,
    /// Domain failure detected after producing a report.
    failed: bool,
}

fn check(h: &Hamiltonian) -> Outcome {
    let terms: Vec<Value> = h
        .terms()
        .iter()
        .enumerate()
        .map(|(a, t)| {
            let single = Hamiltonian::new(h.n(), vec![t.clone()]).expect("term of a valid Hamiltonian");
            let stoq = is_stoquastic(&single, TAU_ZERO).stoquastic;
            let min_eig = t.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
            let half = stoq && min_eig >= -1e-9 && half_integral_violation(t).is_none();
            json!({
                "term": a,
                "support": t.support(),
                "stoquastic": stoq,
                "psd": min_eig >= -1e-9,
                "min_eigenvalue": min_eig,
                "norm": t.norm(),
                "half_integral_projector": half,
            })
        })
        .collect();
    let rep = is_stoquastic(h, TAU_ZERO);
    Outcome {
        seeds: vec![],
        parameters: json!({ "n": h.n(), "terms": h.len() }),
        results: json!({
            "stoquastic": rep.stoquastic,
            "offenders": rep.offenders.iter().map(|o| json!({"term": o.term, "row": o.row, "col": o.col, "value": o.value})).collect::<Vec<_>>(),
            "terms": terms,
        }),
        failed: !rep.stoquastic,
    }
}

fn oracle_report(h: &Hamiltonian) -> Result<Outcome> {
    let spec = oracle::dense_spectrum(h)?;
    let ff = spec.report.lambda_min.abs() <= 1e-8 * h.norm_sum().max(1.0);
    let ground = if is_stoquastic(h, TAU_ZERO).stoquastic {
        let states = oracle::ground_basis_from(&spec, h.n())?;
        json!(states
            .iter()
            .map(|s| json!({ "support_size": s.support_len(), "argmax": s.argmax() }))
            .collect::<Vec<_>>())
    } else {
        Value::Null
    };
    Ok(Outcome {
        seeds: vec![],
        parameters: json!({ "n": h.n() }),
        results: json!({
            "lambda_min": spec.report.lambda_min,
            "gap": spec.report.gap,
            "ground_degeneracy": spec.report.ground_degeneracy,
            "frustration_free": ff,
            "ground_states": ground,
        }),
        failed: false,
    })
}

fn walk(inputs: &mut Inputs, a: WalkArgs) -> Result<Outcome> {
    let h = io::parse_hamiltonian(&inputs.read(&a.instance)?)?;
    let x0 = bits(&a.start, h.n())?;
    let seed = seed_or_fresh(a.seed);
    if a.modified {
        let inst = SatInstance::new(h.n(), h.terms().to_vec(), 1.0)?;
        let beta = match a.beta {
            Some(b) => b,
            None => 1.0 / inst.constraints().iter().map(|t| t.norm()).fold(0.0, f64::max),
        };
        let traj = modified_walk(&inst, x0, beta, a.steps as u64, seed)?;
        return Ok(Outcome {
            seeds: vec![seed],
            parameters: json!({ "start": x0, "steps": a.steps, "beta": beta, "modified": true }),
            results: json!({ "experimental": true, "trajectory": traj }),
            failed: false,
        });
    }
    let projs = ProjectorSet::build(&h, TAU_ZERO)?;
    let cfg = match a.beta {
        Some(b) => WalkConfig::with_beta(&h, b, seed, a.steps)?,
        None => WalkConfig::new(&h, seed, a.steps)?,
    };
    let parameters = json!({ "start": x0, "steps": a.steps, "beta": cfg.beta, "trials": a.trials });
    if a.trials <= 1 && a.histogram.is_none() {
        let t = run_walk(&h, &projs, x0, &cfg)?;
        return Ok(Outcome {
            seeds: vec![seed],
            parameters,
            results: serde_json::to_value(&t)?,
            failed: false,
        });
    }
    let hist = endpoint_histogram(&h, &projs, x0, &cfg, a.trials.max(1))?;
    let total: u64 = hist.values().sum();
    if let Some(p) = &a.histogram {
        let mut f = fs::File::create(p).with_context(|| format!("writing {}", p.display()))?;
        writeln!(f, "bitstring,count,frequency")?;
        for (x, c) in &hist {
            writeln!(f, "{x},{c},{}", *c as f64 / total as f64)?;
        }
    }
    let counts: serde_json::Map<String, Value> = hist.iter().map(|(x, c)| (x.to_string(), json!(c))).collect();
    Ok(Outcome {
        seeds: vec![seed],
        parameters,
        results: json!({ "endpoint_counts": counts }),
        failed: false,
    })
}

fn anneal_cmd(inputs: &mut Inputs, a: AnnealArgs) -> Result<Outcome> {
    let loaded = io::parse_path(&inputs.read(&a.path)?)?;
    if loaded.oracle_only() {
        bail!("clock interpolation paths are not stoquastic and can only be inspected with the oracle");
    }
    let path = loaded.as_path();
    let seed = seed_or_fresh(a.seed);
    let mut schedule = derive_schedule(path, a.delta, None, None)?;
    if let Some(t) = a.stages {
        schedule.t = t.max(1);
    }
    if let Some(l) = a.steps {
        schedule.l = l.max(1);
    }
    let x0 = match &a.start {
        Some(s) => bits(s, path.n())?,
        None => BasisString::zeros(path.n())?,
    };
    let parameters = json!({ "delta": a.delta, "runs": a.runs, "start": x0, "schedule": schedule });
    let oracle_on = matches!(a.oracle, Switch::On);
    if a.runs <= 1 || oracle_on {
        let out = anneal(path, &schedule, x0, seed, oracle_on)?;
        let failed = out.diagnostics.as_ref().is_some_and(|d| !d.all_warm() || !d.overlaps_ok());
        return Ok(Outcome {
            seeds: vec![seed],
            parameters,
            results: json!({ "final": out.final_x, "endpoints": out.endpoints, "diagnostics": out.diagnostics }),
            failed,
        });
    }
    let hist = anneal_batch(path, &schedule, x0, seed, a.runs)?;
    let dist = empirical(&hist, path.n());
    let counts: serde_json::Map<String, Value> = hist.iter().map(|(x, c)| (x.to_string(), json!(c))).collect();
    Ok(Outcome {
        seeds: vec![seed],
        parameters,
        results: json!({ "final_counts": counts, "final_distribution": dist }),
        failed: false,
    })
}

fn verify_cmd(inputs: &mut Inputs, a: VerifyArgs) -> Result<Outcome> {
    let inst = io::parse_sat_instance(&inputs.read(&a.instance)?)?;
    let w: BasisString = a.witness.parse()?;
    let params = if a.params == "auto" {
        choose_params(&inst)?
    } else {
        serde_json::from_str::<VerifierParams>(&inputs.read(Path::new(&a.params))?).context("reading verifier params")?
    };
    let seed = seed_or_fresh(a.seed);
    let v = Verifier::new(&inst, params)?;
    let stats = match &a.transcripts {
        Some(p) => {
            // Transcripts are written in run order, so the batch runs serially.
            let mut f = std::io::BufWriter::new(fs::File::create(p).with_context(|| format!("writing {}", p.display()))?);
            let mut total = None;
            for i in 0..a.seeds {
                let t = v.run(w, seed, i)?;
                serde_json::to_writer(&mut f, &t)?;
                writeln!(f)?;
                total = Some(match total {
                    None => count(&t),
                    Some(c) => add(c, count(&t)),
                });
            }
            total.unwrap_or_default()
        }
        None => {
            let s = verify_batch(&v, w, seed, a.seeds, |_| Ok(()))?;
            [s.runs, s.accepted, s.rejected_bad, s.rejected_product]
        }
    };
    let rate = if stats[0] == 0 { 0.0 } else { stats[1] as f64 / stats[0] as f64 };
    Ok(Outcome {
        seeds: vec![seed],
        parameters: json!({ "witness": a.witness, "runs": a.seeds, "params": params, "epsilon": inst.epsilon() }),
        results: json!({
            "runs": stats[0],
            "accepted": stats[1],
            "rejected_bad_string": stats[2],
            "rejected_product_test": stats[3],
            "accept_rate": rate,
            "soundness_bound": acceptance_bound(&inst, &params).min(1.0 / 3.0),
        }),
        failed: false,
    })
}

fn count(t: &stoqwalk::VerdictTranscript) -> [u64; 4] {
    use stoqwalk::Verdict::*;
    match t.verdict {
        Yes => [1, 1, 0, 0],
        NoBadString { .. } => [1, 0, 1, 0],
        NoProductTest { .. } => [1, 0, 0, 1],
    }
}

fn add(a: [u64; 4], b: [u64; 4]) -> [u64; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn dispatch(cli: Cli, inputs: &mut Inputs) -> Result<(&'static str, Outcome)> {
    Ok(match cli.command {
        Command::Check { instance } => ("check", check(&io::parse_hamiltonian(&inputs.read(&instance)?)?)),
        Command::Oracle { instance } => ("oracle", oracle_report(&io::parse_hamiltonian(&inputs.read(&instance)?)?)?),
        Command::Walk(a) => ("walk", walk(inputs, a)?),
        Command::Anneal(a) => ("anneal", anneal_cmd(inputs, a)?),
        Command::Verify(a) => ("verify", verify_cmd(inputs, a)?),
        Command::Prove { instance } => {
            let inst = io::parse_sat_instance(&inputs.read(&instance)?)?;
            let w = honest_prover(&inst)?;
            println!("{w}");
            (
                "prove",
                Outcome {
                    seeds: vec![],
                    parameters: json!({ "n": inst.n() }),
                    results: json!({ "witness": w }),
                    failed: false,
                },
            )
        }
        Command::Compile { circuit, epsilon, out } => {
            let c = io::parse_circuit(&inputs.read(&circuit)?)?;
            let l = c.gate_count() as f64;
            let (inst, layout) = circuit_to_6sat(&c, epsilon.unwrap_or((l + 1.0).powi(-3)))?;
            let unsat = if layout.n() <= oracle::MAX_DENSE_QUBITS {
                Some(oracle::unsat_value(&inst)?)
            } else {
                None
            };
            let inst = match (epsilon, unsat) {
                (None, Some(v)) if v > 1e-9 => inst.with_epsilon(v)?,
                _ => inst,
            };
            let inst_json = io::sat_instance_json(&inst);
            let embedded = write_out(&out, &inst_json)?;
            (
                "compile",
                Outcome {
                    seeds: vec![],
                    parameters: json!({ "epsilon": inst.epsilon() }),
                    results: json!({
                        "layout": { "n": layout.n(), "data_qubits": layout.data, "gates": layout.gates,
                                    "clock_qubits": (0..=layout.gates).map(|j| layout.clock(j)).collect::<Vec<_>>() },
                        "constraints": inst.m(),
                        "max_locality": inst.hamiltonian().max_locality(),
                        "unsat_value": unsat,
                        "certain_witnesses": c
                            .certain_witnesses()
                            .into_iter()
                            .map(|w| format!("{w:0width$b}", width = c.witness_qubits.len()))
                            .collect::<Vec<_>>(),
                        "instance": embedded,
                    }),
                    failed: false,
                },
            )
        }
        Command::Gibbs { classical, beta, out } => {
            let hc = io::parse_classical(&inputs.read(&classical)?)?;
            let g = gibbs_sff(&hc, beta)?;
            let h_json = io::hamiltonian_json(&g.hamiltonian);
            let embedded = write_out(&out, &h_json)?;
            (
                "gibbs",
                Outcome {
                    seeds: vec![],
                    parameters: json!({ "beta": beta }),
                    results: json!({ "terms": g.hamiltonian.len(), "max_locality": g.hamiltonian.max_locality(), "hamiltonian": embedded }),
                    failed: false,
                },
            )
        }
        Command::Graph { instance, witness, cap } => {
            let inst = io::parse_sat_instance(&inputs.read(&instance)?)?;
            let w = bits(&witness, inst.n())?;
            let census = good_component_census(&inst, w, cap)?;
            (
                "graph",
                Outcome {
                    seeds: vec![],
                    parameters: json!({ "witness": w, "cap": cap }),
                    results: serde_json::to_value(&census)?,
                    failed: false,
                },
            )
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let report_path = cli.report.clone();
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let (subcommand, outcome) = match dispatch(cli, &mut inputs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let report = RunReport {
        subcommand,
        input_digest: inputs.digest(),
        seeds: outcome.seeds,
        parameters: outcome.parameters,
        results: outcome.results,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    let written = match &report_path {
        Some(p) => fs::write(p, &text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(Into::into),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if outcome.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
