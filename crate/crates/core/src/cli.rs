//! The `gterm` command line.
//!
//! Exit status: 0 on success (or "satisfied" with `--exit-status`), 10 for
//! "not satisfied" with `--exit-status`, 1 for a failed verification, 2 for
//! input errors, 3 for exceeded budgets, 4 when no complete method applies.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{checked_pow, Budget, TermCircuit, TupleIter, DEFAULT_TUPLE_BUDGET};
use crate::construct::{self, Scope};
use crate::counterexample::{
    self, CertificateReport, CrossCheck, DEFAULT_INDEX_CAP, DEFAULT_TABLE_CAP,
};
use crate::decide::{self, DecideOptions, GTermInstance, MethodChoice};
use crate::error::{Error, Result};
use crate::io;
use crate::perm::{PermGroup, Permutation, DEFAULT_GROUP_CAP};

pub const EXIT_NOT_SATISFIED: i32 = 10;

/// Parsed command line: the subcommand plus budgets and output settings.
#[derive(Debug, Parser)]
#[command(
    name = "gterm",
    version,
    about = "Decide and construct G-invariant terms of finite algebras"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Cap on tuples generated by one subpower closure.
    #[arg(long, global = true, default_value_t = DEFAULT_TUPLE_BUDGET, value_parser = positive)]
    pub budget_tuples: usize,
    /// Cap on operation applications per closure; unlimited by default
    /// (the counterexample cross-check then caps table evaluations).
    #[arg(long, global = true)]
    pub budget_work: Option<u64>,
    /// Cap on the order of enumerated permutation groups.
    #[arg(long, global = true, default_value_t = DEFAULT_GROUP_CAP, value_parser = positive)]
    pub budget_group: usize,
    /// Cap on operation table entries for generated algebras.
    #[arg(long, global = true, default_value_t = DEFAULT_TABLE_CAP, value_parser = positive)]
    pub budget_table: usize,
    /// Emit JSON reports (the default).
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Emit a short human-readable summary instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Exit with 10 when the decided condition does not hold.
    #[arg(long, global = true)]
    pub exit_status: bool,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
pub struct Instance {
    /// Algebra JSON file.
    #[arg(long)]
    pub algebra: PathBuf,
    /// Group JSON file; its degree is the term arity.
    #[arg(long)]
    pub group: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the algebra has a G-term.
    Decide {
        #[command(flatten)]
        instance: Instance,
        /// auto, regular, product, brute or exhaustive-local.
        #[arg(long, default_value = "auto")]
        method: MethodChoice,
        /// Write a verified witness circuit here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Decide whether some term is G-invariant on a finite tuple set.
    Local {
        #[command(flatten)]
        instance: Instance,
        /// Tuples JSON file.
        #[arg(long)]
        tuples: PathBuf,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Construct a witness circuit, globally or on a tuple set.
    Witness {
        #[command(flatten)]
        instance: Instance,
        #[arg(long)]
        tuples: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build and verify a locally symmetric algebra without a global G-term.
    Counterexample {
        #[arg(long)]
        group: PathBuf,
        /// Group element with one fixpoint, in 1-based cycle notation.
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        k: usize,
        /// Directory for `algebra.json` and `metadata.json`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random k-element tuple sets checked for local symmetry.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Also run the exhaustive-local decision when |A|^n is at most this.
        #[arg(long, default_value_t = 0)]
        cross_check: usize,
    },
    /// Compare cyclic loop conditions of two permutations.
    Compare {
        #[arg(long)]
        pi: String,
        #[arg(long, required_unless_present = "decompose")]
        rho: Option<String>,
        /// Degree; defaults to the largest point mentioned.
        #[arg(long)]
        degree: Option<usize>,
        /// Print the prime orbit decomposition of `pi`.
        #[arg(long)]
        decompose: bool,
    },
    /// Structural information about a permutation group.
    Group {
        #[arg(long)]
        group: PathBuf,
    },
}

/// A finished command: its JSON report, a text summary and the decision, if any.
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub satisfied: Option<bool>,
    pub failed: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn load_instance(inst: &Instance, cfg: &RunConfig) -> Result<GTermInstance> {
    let alg = io::read_algebra(&inst.algebra)?;
    let group = io::read_group(&inst.group)?.with_cap(cfg.budget_group);
    GTermInstance::new(alg, group)
}

fn write_circuit(path: &Path, circuit: &TermCircuit) -> Result<()> {
    io::write_json(path, circuit)
}

fn closure_budget(cfg: &RunConfig) -> Budget {
    Budget {
        tuples: cfg.budget_tuples,
        combinations: cfg.budget_work.unwrap_or(u64::MAX),
    }
}

fn decide_options(cfg: &RunConfig, want_witness: bool) -> DecideOptions {
    DecideOptions {
        tuple_budget: cfg.budget_tuples,
        work_budget: cfg.budget_work.unwrap_or(u64::MAX),
        want_witness,
        ..DecideOptions::default()
    }
}

fn cmd_decide(
    cfg: &RunConfig,
    instance: &Instance,
    method: MethodChoice,
    witness: Option<&Path>,
) -> Result<Outcome> {
    let inst = load_instance(instance, cfg)?;
    let report = decide::decide(&inst, method, &decide_options(cfg, witness.is_some()))?;
    if let (Some(path), Some(circuit)) = (witness, &report.witness) {
        decide::verify_witness_global(&inst, circuit)?;
        write_circuit(path, circuit)?;
    }
    Ok(Outcome {
        summary: format!("satisfied: {} (method {})", report.satisfied, report.method),
        satisfied: Some(report.satisfied),
        report: to_value(&report),
        failed: false,
    })
}

fn cmd_local(
    cfg: &RunConfig,
    instance: &Instance,
    tuples: &Path,
    witness: Option<&Path>,
) -> Result<Outcome> {
    let inst = load_instance(instance, cfg)?;
    let tuples = io::read_tuples(tuples)?;
    let outcome = decide::check_local(&inst, &tuples, true, closure_budget(cfg))?;
    let circuit = outcome.witness.as_ref().map(|w| &w.circuit);
    if let Some(c) = circuit {
        decide::verify_witness(&inst, c, &tuples)?;
        if let Some(path) = witness {
            write_circuit(path, c)?;
        }
    }
    Ok(Outcome {
        summary: if outcome.satisfied {
            format!("satisfied on {} tuples", tuples.len())
        } else {
            format!("unsatisfiable on {} tuples", tuples.len())
        },
        satisfied: Some(outcome.satisfied),
        report: json!({
            "satisfied": outcome.satisfied,
            "tuples": tuples.len(),
            "witness": circuit,
            "stats": {
                "generated_tuples": outcome.stats.generated,
                "closure_iterations": outcome.stats.rounds,
            },
        }),
        failed: false,
    })
}

fn cmd_witness(
    cfg: &RunConfig,
    instance: &Instance,
    tuples: Option<&Path>,
    out: &Path,
) -> Result<Outcome> {
    let inst = load_instance(instance, cfg)?;
    let scope = match tuples {
        Some(p) => Scope::Tuples(io::read_tuples(p)?),
        None => Scope::Global,
    };
    let (method, circuit) = if inst.group().is_regular()? {
        (
            "regular",
            construct::witness_regular(&inst, &scope, cfg.budget_tuples)?,
        )
    } else {
        match &scope {
            Scope::Global => (
                "exhaustive",
                construct::witness_exhaustive(&inst, cfg.budget_tuples)?,
            ),
            Scope::Tuples(t) => {
                let outcome = decide::check_local(&inst, t, true, closure_budget(cfg))?;
                ("local", outcome.witness.ok_or(Error::NoWitness)?.circuit)
            }
        }
    };
    construct::verify_invariance(inst.alg(), inst.group(), &circuit, &scope)?;
    write_circuit(out, &circuit)?;
    Ok(Outcome {
        summary: format!(
            "{method} witness with {} nodes written to {}",
            circuit.len(),
            out.display()
        ),
        satisfied: Some(true),
        report: json!({
            "method": method,
            "scope": if tuples.is_some() { "tuples" } else { "global" },
            "nodes": circuit.len(),
            "depth": circuit.depth(),
            "out": out.display().to_string(),
        }),
        failed: false,
    })
}

#[derive(Serialize)]
struct LocalSymmetry {
    sets_checked: usize,
    exhaustive_singletons: bool,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct CounterexampleReport {
    universe_size: usize,
    degree: usize,
    p: usize,
    k: usize,
    alpha_effective: String,
    fixpoint: usize,
    idempotent: bool,
    size_bounds: bool,
    certificate: CertificateReport,
    local_symmetry: LocalSymmetry,
    cross_check: Option<CrossCheck>,
    passed: bool,
}

/// Singletons are listed exhaustively below this many tuples.
const EXHAUSTIVE_SINGLETONS: usize = 100_000;

#[allow(clippy::too_many_arguments)]
fn cmd_counterexample(
    cfg: &RunConfig,
    group: &Path,
    alpha: &str,
    k: usize,
    out: Option<&Path>,
    samples: usize,
    cross_check: usize,
) -> Result<Outcome> {
    let group = io::read_group(group)?.with_cap(cfg.budget_group);
    let alpha = Permutation::parse_cycles(alpha, group.degree())?;
    let spec = counterexample::build_spec(&group, &alpha, k)?;
    let calg = counterexample::build_algebra(&spec, cfg.budget_table)?;
    let cert = counterexample::build_certificate(&calg, DEFAULT_INDEX_CAP)?;
    let certificate = counterexample::verify_certificate(&calg, &cert);

    let n = spec.degree();
    let size = spec.universe_size();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sets = counterexample::sample_tuple_sets(&calg, samples, &mut rng);
    let dim = checked_pow(size, n).unwrap_or(usize::MAX);
    let exhaustive_singletons = k == 1 && dim <= EXHAUSTIVE_SINGLETONS;
    if exhaustive_singletons {
        sets.extend(TupleIter::new(size, n).map(|t| vec![t]));
    }
    let failures: Vec<String> = sets
        .iter()
        .filter_map(|f| {
            counterexample::verify_local_symmetric(&calg, f)
                .err()
                .map(|e| format!("{f:?}: {e}"))
        })
        .take(10)
        .collect();
    let cross = if cross_check > 0 {
        let budget = Budget {
            tuples: cfg.budget_tuples,
            combinations: cfg.budget_work.unwrap_or(u64::MAX),
        };
        Some(counterexample::cross_check_small(
            &calg,
            budget,
            cross_check,
        )?)
    } else {
        None
    };
    let cross_ok = cross.as_ref().is_none_or(|c| {
        c.trivial_group_satisfied && c.alpha_group_satisfied && c.no_global_term != Some(false)
    });
    let size_bounds = (k + 1) * n < size && size < (k + 2) * n;
    let idempotent = calg.alg().is_idempotent();

    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        io::write_json(
            &dir.join("algebra.json"),
            &io::AlgebraFile::from(calg.alg()),
        )?;
        io::write_json(
            &dir.join("metadata.json"),
            &counterexample::metadata(&calg, &cert),
        )?;
    }
    let passed = certificate.passed && failures.is_empty() && idempotent && size_bounds && cross_ok;
    let report = CounterexampleReport {
        universe_size: size,
        degree: n,
        p: spec.p(),
        k,
        alpha_effective: spec.alpha().to_string(),
        fixpoint: spec.fixpoint() + 1,
        idempotent,
        size_bounds,
        certificate,
        local_symmetry: LocalSymmetry {
            sets_checked: sets.len(),
            exhaustive_singletons,
            failures,
        },
        cross_check: cross,
        passed,
    };
    Ok(Outcome {
        summary: format!(
            "{size}-element algebra; checks {}",
            if passed { "passed" } else { "FAILED" }
        ),
        satisfied: None,
        report: to_value(&report),
        failed: !passed,
    })
}

/// Largest point number mentioned in cycle notation.
fn max_point(text: &str) -> usize {
    text.split(|c: char| !c.is_ascii_digit())
        .filter_map(|s| s.parse::<usize>().ok())
        .max()
        .unwrap_or(1)
}

fn cmd_compare(
    pi: &str,
    rho: Option<&str>,
    degree: Option<usize>,
    decompose: bool,
) -> Result<Outcome> {
    let degree = degree.unwrap_or_else(|| max_point(pi).max(rho.map_or(1, max_point)));
    let p = Permutation::parse_cycles(pi, degree)?;
    let mut report = serde_json::Map::new();
    let mut summary = Vec::new();
    let mut satisfied = None;
    if let Some(rho) = rho {
        let r = Permutation::parse_cycles(rho, degree)?;
        let cmp = decide::compare_cyclic_explained(&p, &r);
        summary.push(format!("{p} >= {r}: {}", cmp.holds));
        for o in cmp.orbits.iter().filter(|o| o.matched_by.is_none()) {
            let pts: Vec<usize> = o.orbit.iter().map(|x| x + 1).collect();
            summary.push(format!(
                "  orbit {pts:?} of length {} is unmatched",
                o.length
            ));
        }
        satisfied = Some(cmp.holds);
        let orbits: Vec<Value> = cmp
            .orbits
            .iter()
            .map(|o| {
                json!({
                    "orbit": o.orbit.iter().map(|x| x + 1).collect::<Vec<_>>(),
                    "length": o.length,
                    "radical": o.radical,
                    "matched_by": o.matched_by,
                })
            })
            .collect();
        report.insert("holds".into(), json!(cmp.holds));
        report.insert("orbits".into(), json!(orbits));
    }
    if decompose {
        let d = decide::prime_orbit_decomposition(&p);
        let profiles: Vec<Value> = d
            .profiles
            .iter()
            .map(|r| json!({"permutation": r.to_string(), "orbit_lengths": r.cycle_lengths()}))
            .collect();
        summary.push(if d.trivial {
            format!("{p} has a fixpoint; its condition is trivial")
        } else {
            format!(
                "{p} is the join of {}",
                d.profiles
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        });
        report.insert(
            "decomposition".into(),
            json!({"trivial": d.trivial, "profiles": profiles}),
        );
    }
    Ok(Outcome {
        report: Value::Object(report),
        summary: summary.join("\n"),
        satisfied,
        failed: false,
    })
}

fn one_based(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    sets.iter()
        .map(|s| s.iter().map(|x| x + 1).collect())
        .collect()
}

fn cmd_group(cfg: &RunConfig, path: &Path) -> Result<Outcome> {
    let group: PermGroup = io::read_group(path)?.with_cap(cfg.budget_group);
    let order = group.order()?;
    let orbits = group.orbits();
    let regular = group.is_regular()?;
    let decomposition = decide::regular_product_decomposition(&group)?;
    let nilpotent = if regular {
        match construct::reduce_nilpotent(&group) {
            Ok(_) => Some(true),
            Err(Error::NotNilpotent) => Some(false),
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let report = json!({
        "degree": group.degree(),
        "generators": io::GroupFile::from(&group).generators,
        "order": order,
        "orbits": one_based(&orbits.orbits),
        "fixpoints": orbits.fixpoints.iter().map(|x| x + 1).collect::<Vec<_>>(),
        "transitive": group.is_transitive(),
        "regular": regular,
        "product_of_regular": decomposition.as_deref().map(one_based),
        "nilpotent": nilpotent,
    });
    Ok(Outcome {
        summary: format!(
            "order {order}, {} orbits, regular: {regular}, product of regular: {}",
            orbits.orbits.len(),
            decomposition.is_some()
        ),
        report,
        satisfied: None,
        failed: false,
    })
}

fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match &cfg.command {
        Command::Decide {
            instance,
            method,
            witness,
        } => cmd_decide(cfg, instance, *method, witness.as_deref()),
        Command::Local {
            instance,
            tuples,
            witness,
        } => cmd_local(cfg, instance, tuples, witness.as_deref()),
        Command::Witness {
            instance,
            tuples,
            out,
        } => cmd_witness(cfg, instance, tuples.as_deref(), out),
        Command::Counterexample {
            group,
            alpha,
            k,
            out,
            samples,
            cross_check,
        } => cmd_counterexample(
            cfg,
            group,
            alpha,
            *k,
            out.as_deref(),
            *samples,
            *cross_check,
        ),
        Command::Compare {
            pi,
            rho,
            degree,
            decompose,
        } => cmd_compare(pi, rho.as_deref(), *degree, *decompose),
        Command::Group { group } => cmd_group(cfg, group),
    }
}

/// Caps rayon's worker count from `GTERM_THREADS`; later calls are no-ops.
pub fn init_threads() {
    if let Some(n) = std::env::var("GTERM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

/// Runs a parsed command, writing the report to `out` and errors to `err`;
/// returns the exit status.
pub fn run_config(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cfg) {
        Ok(outcome) => {
            let text = if cfg.text {
                outcome.summary.clone()
            } else {
                serde_json::to_string_pretty(&outcome.report).expect("serializable")
            };
            let _ = writeln!(out, "{text}");
            if let Some(path) = &cfg.report {
                if let Err(e) = io::write_json(path, &outcome.report) {
                    let _ = writeln!(err, "error: {e}");
                    return e.exit_code();
                }
            }
            if outcome.failed {
                1
            } else if cfg.exit_status && outcome.satisfied == Some(false) {
                EXIT_NOT_SATISFIED
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run_config(&cfg, out, err),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(err, "{}", e.render());
            code
        }
    }
}
