//! `tfsm` — the command-line front end for the timed-FSM device toolkit.
//!
//! Subcommands cover the whole workflow: `validate` a model document,
//! `mutate` it into a set of attack and traditional mutants, `derive` a
//! distinguishing test suite, `run` a suite in-process or against a TCP
//! device, `serve` emulated devices, `score` mutation results, `fingerprint`
//! a remote device by fault injection, and `report` the pipeline end to end.
//!
//! Exit codes: 0 success, 1 usage, 2 parse/validate failure, 3 transport
//! failure, 4 verdict failure (tests failed, device suspect).

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use tfsm_attack::{gen_attacks, gen_traditional, AttackKind, MutantSet};
use tfsm_core::Output;
use tfsm_model::{
    canonical_json, load_bundled, parse_model, parse_suite, serialize_suite, ParsedModel, Suite,
    VerdictRowDoc, VerdictsDoc, BUNDLED_MODELS, SCHEMA,
};
use tfsm_testgen::{derive_suite, execute_test, mutation_score, SearchConfig, TestOutcome};
use tfsm_wire::{
    fingerprint as run_fingerprint, serve, Client, Observation, RunOutcome, ServeOptions,
    FingerprintError, WireError,
};

// ------------------------------------------------------------ arguments

#[derive(Parser)]
#[command(
    name = "tfsm",
    version,
    about = "Model IoT devices as timed state machines: mutate, test, fingerprint"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Mutant-generation flags shared by `mutate`, `derive`, and `report`.
#[derive(Args)]
struct GenArgs {
    /// Attack kinds to generate: "all", "none", or codes like "A1,A4,inc"
    #[arg(long, default_value = "all")]
    attacks: String,
    /// Also generate N random traditional mutants
    #[arg(long, default_value_t = 0, value_name = "N")]
    traditional: usize,
    /// Seed for traditional mutants (default: $TFSM_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a model (bundled name or file path)
    Validate {
        model: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Generate a mutant set for a model
    Mutate {
        model: String,
        #[command(flatten)]
        gen: GenArgs,
        /// Write the mutant-set document here (canonical JSON)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Generate mutants and derive a distinguishing test suite
    Derive {
        model: String,
        #[command(flatten)]
        gen: GenArgs,
        /// Write the suite document here (canonical JSON)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the generated mutant set here
        #[arg(long)]
        mutants_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run a suite against a model in-process, or a device over TCP
    Run {
        model: String,
        /// Suite document to execute
        #[arg(long)]
        suite: PathBuf,
        /// Run against this device instead of in-process (host:port)
        #[arg(long)]
        addr: Option<String>,
        /// Write the verdicts document here (canonical JSON)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Emulate one or more devices over TCP until killed
    Serve {
        /// Models to serve (bundled names or file paths)
        #[arg(required = true)]
        models: Vec<String>,
        /// Address to listen on; use port 0 to pick a free port
        #[arg(long)]
        addr: String,
        /// Honour MUTATE requests (required for fingerprinting)
        #[arg(long)]
        allow_mutate: bool,
    },
    /// Compute a mutation score from kill counts
    Score {
        #[arg(long)]
        killed: usize,
        #[arg(long)]
        total: usize,
        /// Mutants excluded from the denominator as equivalent
        #[arg(long, default_value_t = 0)]
        equivalent: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check whether a remote device still runs the reference machine
    Fingerprint {
        model: String,
        /// Device address (host:port); the server must allow MUTATE
        #[arg(long)]
        addr: String,
        /// Suite document to replay
        #[arg(long)]
        suite: PathBuf,
        /// Mutant-set document to inject
        #[arg(long)]
        mutants: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the whole pipeline and summarize it
    Report {
        model: String,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

// ---------------------------------------------------------- exit plumbing

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }
    fn data(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
    fn transport(message: impl Into<String>) -> Failure {
        Failure { code: 3, message: message.into() }
    }
}

fn wire_failure(e: WireError) -> Failure {
    Failure::transport(e.to_string())
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap would exit 2 on usage errors; this tool reserves 2 for
            // data problems, so usage maps to 1. --help/--version stay 0.
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<i32, Failure> {
    match cmd {
        Cmd::Validate { model, format } => cmd_validate(&model, format),
        Cmd::Mutate { model, gen, out, format } => cmd_mutate(&model, &gen, out.as_deref(), format),
        Cmd::Derive { model, gen, out, mutants_out, format } => {
            cmd_derive(&model, &gen, out.as_deref(), mutants_out.as_deref(), format)
        }
        Cmd::Run { model, suite, addr, out, format } => {
            cmd_run(&model, &suite, addr.as_deref(), out.as_deref(), format)
        }
        Cmd::Serve { models, addr, allow_mutate } => cmd_serve(&models, &addr, allow_mutate),
        Cmd::Score { killed, total, equivalent, format } => {
            cmd_score(killed, total, equivalent, format)
        }
        Cmd::Fingerprint { model, addr, suite, mutants, format } => {
            cmd_fingerprint(&model, &addr, &suite, &mutants, format)
        }
        Cmd::Report { model, gen, format } => cmd_report(&model, &gen, format),
    }
}

// ------------------------------------------------------------- loading

fn load_model(arg: &str) -> Result<ParsedModel, Failure> {
    if BUNDLED_MODELS.contains(&arg) {
        return load_bundled(arg).map_err(|e| Failure::data(e.to_string()));
    }
    let text = fs::read_to_string(arg).map_err(|e| Failure::data(format!("{arg}: {e}")))?;
    parse_model(&text).map_err(|e| Failure::data(format!("{arg}: {e}")))
}

fn load_suite(path: &Path) -> Result<Suite, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    parse_suite(&text).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn load_mutants(path: &Path) -> Result<MutantSet, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    let set: MutantSet = serde_json::from_str(&text)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    if set.schema != SCHEMA {
        return Err(Failure::data(format!(
            "{}: unsupported schema {:?} (expected {SCHEMA:?})",
            path.display(),
            set.schema
        )));
    }
    Ok(set)
}

fn parse_attacks(spec: &str) -> Result<Vec<AttackKind>, Failure> {
    match spec {
        "all" => Ok(AttackKind::ATTACKS.to_vec()),
        "none" => Ok(Vec::new()),
        list => list
            .split(',')
            .map(|token| match AttackKind::from_code(token.trim()) {
                Some(AttackKind::Traditional) => Err(Failure::usage(
                    "\"traditional\" is not an attack kind; use --traditional N",
                )),
                Some(kind) => Ok(kind),
                None => Err(Failure::usage(format!(
                    "unknown attack kind {token:?} (expected A1, A2, A3, A4, A5, or inc)"
                ))),
            })
            .collect(),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("TFSM_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::usage(format!("TFSM_SEED must be an unsigned integer, got {v:?}"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(Failure::usage(format!("TFSM_SEED: {e}"))),
    }
}

/// Generate the requested mutants; attack warnings stay inside the set.
fn generate(pm: &ParsedModel, gen: &GenArgs) -> Result<MutantSet, Failure> {
    let kinds = parse_attacks(&gen.attacks)?;
    let mut set = if kinds.is_empty() {
        MutantSet::new(&pm.machine.id)
    } else {
        let profile = pm.profile.as_ref().ok_or_else(|| {
            Failure::data(format!(
                "model {} declares no attack profile; pass --attacks none to skip attack mutants",
                pm.machine.id
            ))
        })?;
        gen_attacks(&pm.machine, profile, &kinds).map_err(|e| Failure::data(e.to_string()))?
    };
    if gen.traditional > 0 {
        let seed = resolve_seed(gen.seed)?;
        let extra = gen_traditional(&pm.machine, gen.traditional, seed)
            .map_err(|e| Failure::data(e.to_string()))?;
        set.seed = extra.seed;
        set.warnings.extend(extra.warnings);
        set.mutants.extend(extra.mutants);
    }
    Ok(set)
}

fn print_warnings(set: &MutantSet) {
    for w in &set.warnings {
        eprintln!("warning: {w}");
    }
}

// ------------------------------------------------------------ rendering

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("1 {word}")
    } else {
        format!("{n} {word}s")
    }
}

/// Per-kind counts in taxonomy order, zero entries dropped.
fn kind_counts(set: &MutantSet) -> Vec<(AttackKind, usize)> {
    AttackKind::ATTACKS
        .into_iter()
        .chain([AttackKind::Traditional])
        .map(|k| (k, set.mutants.iter().filter(|m| m.kind == k).count()))
        .filter(|(_, n)| *n > 0)
        .collect()
}

fn mutant_summary(set: &MutantSet) -> String {
    let counts = kind_counts(set);
    let head = format!("{}: {}", set.model, plural(set.mutants.len(), "mutant"));
    if counts.is_empty() {
        return head;
    }
    let parts: Vec<String> = counts.iter().map(|(k, n)| format!("{k} {n}")).collect();
    format!("{head} ({})", parts.join(", "))
}

fn outputs_str(outputs: &[Output]) -> String {
    let parts: Vec<String> = outputs.iter().map(|o| o.to_string()).collect();
    parts.join(" ")
}

/// Write a document to a file, or to stdout when the format asks for JSON.
/// Returns whether stdout already carried the document.
fn emit_doc(out: Option<&Path>, format: Format, doc: &str) -> Result<bool, Failure> {
    match out {
        Some(path) => {
            fs::write(path, doc).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
            Ok(false)
        }
        None if format == Format::Json => {
            print!("{doc}");
            Ok(true)
        }
        None => Ok(false),
    }
}

// ------------------------------------------------------------- commands

fn cmd_validate(model: &str, format: Format) -> Result<i32, Failure> {
    let pm = load_model(model)?;
    let m = &pm.machine;
    match format {
        Format::Text => println!(
            "{}: valid (states {}, transitions {}, inputs {}, outputs {}, variables {})",
            m.id,
            m.states.len(),
            m.transitions.len(),
            m.inputs.len(),
            m.outputs.len(),
            m.variables.len()
        ),
        Format::Json => print!(
            "{}",
            canonical_json(&serde_json::json!({
                "id": m.id,
                "valid": true,
                "states": m.states.len(),
                "transitions": m.transitions.len(),
                "inputs": m.inputs.len(),
                "outputs": m.outputs.len(),
                "variables": m.variables.len(),
            }))
        ),
    }
    Ok(0)
}

fn cmd_mutate(
    model: &str,
    gen: &GenArgs,
    out: Option<&Path>,
    format: Format,
) -> Result<i32, Failure> {
    let pm = load_model(model)?;
    let set = generate(&pm, gen)?;
    print_warnings(&set);
    let doc = canonical_json(&set);
    let on_stdout = emit_doc(out, format, &doc)?;
    if format == Format::Text && !on_stdout {
        println!("{}", mutant_summary(&set));
    }
    Ok(0)
}

fn cmd_derive(
    model: &str,
    gen: &GenArgs,
    out: Option<&Path>,
    mutants_out: Option<&Path>,
    format: Format,
) -> Result<i32, Failure> {
    let pm = load_model(model)?;
    let set = generate(&pm, gen)?;
    print_warnings(&set);
    let derived = derive_suite(&pm.machine, &set, &SearchConfig::default())
        .map_err(|e| Failure::data(e.to_string()))?;
    let suite = Suite {
        suite_id: format!("{}-suite", pm.machine.id),
        model: pm.machine.id.clone(),
        tests: derived.tests,
    };

    if let Some(path) = mutants_out {
        fs::write(path, canonical_json(&set))
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    }
    let on_stdout = emit_doc(out, format, &serialize_suite(&suite))?;

    if format == Format::Text && !on_stdout {
        let total = set.mutants.len();
        let killed = derived.matrix.killed_count();
        let score = mutation_score(killed, total, 0).map_err(|e| Failure::data(e.to_string()))?;
        let mut line = format!(
            "{}: {}, {}, killed {killed}/{total}, score {}%",
            pm.machine.id,
            plural(total, "mutant"),
            plural(suite.tests.len(), "test"),
            score.percent()
        );
        if !derived.alive.is_empty() {
            line.push_str(&format!(", alive: {}", derived.alive.join(" ")));
        }
        println!("{line}");
    }
    Ok(0)
}

fn to_run_outcome(outcome: TestOutcome) -> RunOutcome {
    match outcome {
        TestOutcome::Pass => RunOutcome::Pass,
        TestOutcome::Kill { divergence_index } => RunOutcome::Kill { divergence_index },
    }
}

fn verdict_row(test: &str, target: &str, outcome: &RunOutcome, observed: &[Output]) -> VerdictRowDoc {
    let (kind, divergence_index, detail) = match outcome {
        RunOutcome::Pass => ("pass", None, None),
        RunOutcome::Kill { divergence_index } => ("kill", Some(*divergence_index), None),
        RunOutcome::Transport { detail } => ("transport_error", None, Some(detail.clone())),
    };
    VerdictRowDoc {
        test: test.to_string(),
        target: target.to_string(),
        outcome: kind.to_string(),
        divergence_index,
        observed: observed.iter().map(|o| o.to_string()).collect(),
        detail,
    }
}

fn cmd_run(
    model: &str,
    suite_path: &Path,
    addr: Option<&str>,
    out: Option<&Path>,
    format: Format,
) -> Result<i32, Failure> {
    let pm = load_model(model)?;
    let suite = load_suite(suite_path)?;
    if suite.model != pm.machine.id {
        eprintln!(
            "warning: suite {} expects model {}, running against {}",
            suite.suite_id, suite.model, pm.machine.id
        );
    }

    let (target, rows): (String, Vec<(String, RunOutcome, Vec<Output>)>) = match addr {
        None => {
            let mut rows = Vec::with_capacity(suite.tests.len());
            for t in &suite.tests {
                let ex = execute_test(&pm.machine, t)
                    .map_err(|e| Failure::data(format!("test {}: {e}", t.id)))?;
                rows.push((t.id.clone(), to_run_outcome(ex.outcome), ex.observed));
            }
            (pm.machine.id.clone(), rows)
        }
        Some(addr) => {
            let mut client = Client::connect(addr, &pm.machine.id).map_err(wire_failure)?;
            let rows = client.run_suite(&suite.tests).map_err(wire_failure)?;
            let _ = client.end();
            (
                addr.to_string(),
                rows.into_iter().map(|r| (r.test, r.outcome, r.observed)).collect(),
            )
        }
    };

    let doc = VerdictsDoc {
        schema: SCHEMA.to_string(),
        suite_id: suite.suite_id.clone(),
        rows: rows
            .iter()
            .map(|(test, outcome, observed)| verdict_row(test, &target, outcome, observed))
            .collect(),
    };
    let on_stdout = emit_doc(out, format, &canonical_json(&doc))?;

    let passed = rows.iter().filter(|(_, o, _)| *o == RunOutcome::Pass).count();
    let transports = rows
        .iter()
        .filter(|(_, o, _)| matches!(o, RunOutcome::Transport { .. }))
        .count();
    let killed = rows.len() - passed - transports;

    if format == Format::Text && !on_stdout {
        for (test, outcome, observed) in &rows {
            match outcome {
                RunOutcome::Pass => println!("{test}: pass"),
                RunOutcome::Kill { divergence_index } => println!(
                    "{test}: kill at step {divergence_index} (observed {})",
                    outputs_str(observed)
                ),
                RunOutcome::Transport { detail } => {
                    println!("{test}: transport error ({detail})")
                }
            }
        }
        let mut summary = format!("{}: {passed} passed", plural(rows.len(), "test"));
        if killed > 0 {
            summary.push_str(&format!(", {killed} killed"));
        }
        if transports > 0 {
            summary.push_str(&format!(", {transports} transport errors"));
        }
        println!("{summary}");
    }

    Ok(if transports > 0 {
        3
    } else if killed > 0 {
        4
    } else {
        0
    })
}

fn cmd_serve(models: &[String], addr: &str, allow_mutate: bool) -> Result<i32, Failure> {
    let mut machines = Vec::with_capacity(models.len());
    let mut ids = BTreeSet::new();
    for arg in models {
        let pm = load_model(arg)?;
        if !ids.insert(pm.machine.id.clone()) {
            return Err(Failure::data(format!("duplicate model id {:?}", pm.machine.id)));
        }
        machines.push(pm.machine);
    }
    let handle = serve(addr, machines, ServeOptions { allow_mutate })
        .map_err(|e| Failure::transport(format!("{addr}: {e}")))?;
    println!("listening on {}", handle.addr());
    std::io::stdout()
        .flush()
        .map_err(|e| Failure::transport(e.to_string()))?;
    // Serve until the process is killed.
    loop {
        std::thread::sleep(std::time::Duration::from_secs(3600));
    }
}

fn cmd_score(killed: usize, total: usize, equivalent: usize, format: Format) -> Result<i32, Failure> {
    let score =
        mutation_score(killed, total, equivalent).map_err(|e| Failure::data(e.to_string()))?;
    match format {
        Format::Text => println!(
            "score {}% (killed {killed} of {total}, {equivalent} equivalent)",
            score.percent()
        ),
        Format::Json => print!(
            "{}",
            canonical_json(&serde_json::json!({
                "killed": killed,
                "total": total,
                "equivalent": equivalent,
                "percent": score.percent(),
            }))
        ),
    }
    Ok(0)
}

fn observation_json(o: &Observation) -> serde_json::Value {
    let mut v = serde_json::json!({
        "observed": o.observed.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
    });
    match &o.outcome {
        RunOutcome::Pass => v["outcome"] = "pass".into(),
        RunOutcome::Kill { divergence_index } => {
            v["outcome"] = "kill".into();
            v["divergence_index"] = (*divergence_index).into();
        }
        RunOutcome::Transport { detail } => {
            v["outcome"] = "transport_error".into();
            v["detail"] = detail.clone().into();
        }
    }
    v
}

fn observation_str(o: &Observation) -> String {
    match &o.outcome {
        RunOutcome::Pass => format!("pass [{}]", outputs_str(&o.observed)),
        RunOutcome::Kill { divergence_index } => {
            format!("kill@{divergence_index} [{}]", outputs_str(&o.observed))
        }
        RunOutcome::Transport { detail } => format!("transport ({detail})"),
    }
}

fn cmd_fingerprint(
    model: &str,
    addr: &str,
    suite_path: &Path,
    mutants_path: &Path,
    format: Format,
) -> Result<i32, Failure> {
    let pm = load_model(model)?;
    let suite = load_suite(suite_path)?;
    let set = load_mutants(mutants_path)?;
    if set.model != pm.machine.id {
        return Err(Failure::data(format!(
            "mutant set targets model {:?}, fingerprinting {:?}",
            set.model, pm.machine.id
        )));
    }

    let report = run_fingerprint(addr, &pm.machine, &suite.tests, &set.mutants).map_err(
        |e| match e {
            FingerprintError::Wire(w) => wire_failure(w),
            other => Failure::data(other.to_string()),
        },
    )?;

    let phase1_passed = report.phase1.iter().filter(|r| r.passed()).count();
    let mismatches: Vec<&tfsm_wire::FingerprintRow> =
        report.rows.iter().filter(|r| !r.matches).collect();

    match format {
        Format::Text => {
            println!("phase 1: passed {phase1_passed}/{}", report.phase1.len());
            if report.phase1_consistent {
                println!(
                    "phase 2: injected {}, compared {}, mismatched {}",
                    set.mutants.len(),
                    report.rows.len(),
                    mismatches.len()
                );
            } else {
                println!("phase 2: skipped");
            }
            for row in &mismatches {
                println!(
                    "mismatch {}/{}: expected {}, device {}",
                    row.mutant,
                    row.test,
                    observation_str(&row.expected),
                    observation_str(&row.observed)
                );
            }
            println!("verdict: {}", report.verdict());
        }
        Format::Json => print!(
            "{}",
            canonical_json(&serde_json::json!({
                "model": report.model,
                "phase1_passed": phase1_passed,
                "phase1_total": report.phase1.len(),
                "phase1_consistent": report.phase1_consistent,
                "comparisons": report.rows.len(),
                "mismatches": mismatches.iter().map(|row| serde_json::json!({
                    "mutant": row.mutant,
                    "test": row.test,
                    "expected": observation_json(&row.expected),
                    "observed": observation_json(&row.observed),
                })).collect::<Vec<_>>(),
                "consistent": report.consistent,
                "verdict": report.verdict(),
            }))
        ),
    }
    Ok(if report.consistent { 0 } else { 4 })
}

fn kind_label(kind: AttackKind) -> &'static str {
    match kind {
        AttackKind::BatteryDrain => "battery drain",
        AttackKind::SleepDeprivation => "sleep deprivation",
        AttackKind::DataFalsification => "data falsification",
        AttackKind::Replay => "replay",
        AttackKind::Mitm => "man-in-the-middle",
        AttackKind::IncreasedTimeout => "increased timeout",
        AttackKind::Traditional => "traditional",
    }
}

fn cmd_report(model: &str, gen: &GenArgs, format: Format) -> Result<i32, Failure> {
    let pm = load_model(model)?;
    let set = generate(&pm, gen)?;
    let derived = derive_suite(&pm.machine, &set, &SearchConfig::default())
        .map_err(|e| Failure::data(e.to_string()))?;
    let total = set.mutants.len();
    let killed = derived.matrix.killed_count();
    let score = mutation_score(killed, total, 0).map_err(|e| Failure::data(e.to_string()))?;
    let counts = kind_counts(&set);
    let m = &pm.machine;

    match format {
        Format::Text => {
            println!(
                "model: {} (states {}, transitions {}, inputs {}, outputs {}, variables {})",
                m.id,
                m.states.len(),
                m.transitions.len(),
                m.inputs.len(),
                m.outputs.len(),
                m.variables.len()
            );
            let marks: String = (1..=set.warnings.len()).map(|i| format!("[{i}]")).collect();
            if marks.is_empty() {
                println!("mutants: {total}");
            } else {
                println!("mutants: {total} {marks}");
            }
            for (kind, n) in &counts {
                println!("  {kind} {}: {n}", kind_label(*kind));
            }
            println!("suite: {}", plural(derived.tests.len(), "test"));
            println!("score: killed {killed}/{total} = {}%", score.percent());
            if !derived.alive.is_empty() {
                println!("alive: {}", derived.alive.join(" "));
            }
            if !set.warnings.is_empty() {
                println!("notes:");
                for (ix, w) in set.warnings.iter().enumerate() {
                    println!("  [{}] {w}", ix + 1);
                }
            }
        }
        Format::Json => {
            let kinds: serde_json::Map<String, serde_json::Value> = counts
                .iter()
                .map(|(k, n)| (k.to_string(), serde_json::json!(n)))
                .collect();
            print!(
                "{}",
                canonical_json(&serde_json::json!({
                    "model": m.id,
                    "states": m.states.len(),
                    "transitions": m.transitions.len(),
                    "mutants": total,
                    "kinds": kinds,
                    "tests": derived.tests.len(),
                    "killed": killed,
                    "alive": derived.alive,
                    "score": score.percent(),
                    "warnings": set.warnings,
                }))
            );
        }
    }
    Ok(0)
}
