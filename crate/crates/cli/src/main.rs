// SPDX-License-Identifier: Apache-2.0

//! `actlat` command line front end.

use std::collections::BTreeMap;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use actlat::acceptance::{wf_structural_rules, Suite, DEFAULT_SEED};
use actlat::frames::{
    check_gentzen, check_nuclear, check_star_gentzen, dual_algebra, embedding_check, macneille,
    quasimorphism_check, verify_transfer, FrameError, FrameFile, GentzenFrame, GentzenKind,
    ResiduatedFrame,
};
use actlat::io::{cyclic_to_file, from_json, load, to_json, wf_to_file, IoError, LoadedProof};
use actlat::models::{
    by_name, eval, library, refute_quasieq, refute_sequent, soundness_audit, validate_algebra,
    AuditItem, FiniteActionLattice, ModelError, ModelFile, Valuation, DEFAULT_VALUATION_BUDGET,
};
use actlat::proof::{check_lazy_local, check_wf, height, lazy_cyclic, ProofError, DEFAULT_OMEGA_FUEL};
use actlat::progress::{check_cyclic, ProgressVerdict, StarAssignment};
use actlat::rules::{
    classify, lookup, parse_rule_file, q_a_of, q_of, structural_library, Quasiequation, Rule,
    RuleError, RuleKind, RuleSet,
};
use actlat::search::{prove, refute, RefuteOutcome, SearchConfig, SearchOutcome, UnknownReason};
use actlat::syntax::{parse_formula, parse_sequent};
use actlat::translate::{fold_to_cyclic, nwf_to_wf, project_proof, wf_to_nwf, Fuel, DEFAULT_FUEL};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "actlat", version, about = "Cyclic and ω-proofs for action lattices")]
struct Cli {
    /// Print a machine-readable JSON report instead of text
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a formula, sequent, quasiequation or proof file
    Fmt { input: String },
    /// Check a proof file (wellfounded or cyclic, by its "system" field)
    Check {
        file: PathBuf,
        #[command(flatten)]
        rules: RulesArg,
        #[arg(long, default_value_t = DEFAULT_OMEGA_FUEL)]
        omega_fuel: usize,
    },
    /// Translate between the cyclic and the wellfounded system
    Translate {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        #[arg(long, default_value_t = DEFAULT_OMEGA_FUEL)]
        omega_fuel: usize,
        #[command(flatten)]
        rules: RulesArg,
    },
    /// Project a cyclic proof along a star assignment such as `0:2,1:0`
    Project {
        input: PathBuf,
        output: PathBuf,
        #[arg(long)]
        assign: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        #[command(flatten)]
        rules: RulesArg,
    },
    /// Search for a cut-free cyclic proof
    Prove {
        sequent: String,
        #[command(flatten)]
        rules: RulesArg,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[arg(long)]
        with_cut: bool,
        /// Write the proof here instead of stdout
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Look for a countermodel in the model library or a model directory
    Refute {
        sequent: String,
        #[command(flatten)]
        rules: RulesArg,
        /// Directory of model files, or comma-separated library names
        #[arg(long)]
        models: Option<String>,
        #[arg(long, default_value_t = DEFAULT_VALUATION_BUDGET)]
        budget: u64,
    },
    /// Structural rules
    #[command(subcommand)]
    Rules(RulesCmd),
    /// Finite models
    #[command(subcommand)]
    Models(ModelsCmd),
    /// Residuated frames
    #[command(subcommand)]
    Frames(FramesCmd),
    /// Acceptance corpus
    #[command(subcommand)]
    Corpus(CorpusCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Wf,
    Nwf,
}

#[derive(Args, Clone, Default)]
struct RulesArg {
    /// Rule file, or comma-separated names from the structural library
    #[arg(long)]
    rules: Option<String>,
}

#[derive(Subcommand)]
enum RulesCmd {
    /// Structural, linear and analytic verdicts
    Classify {
        names: Vec<String>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// The quasiequation of a structural rule
    Quasieq {
        name: String,
        #[arg(long)]
        file: Option<PathBuf>,
        /// Use the analytic form
        #[arg(long)]
        analytic: bool,
    },
}

#[derive(Subcommand)]
enum ModelsCmd {
    /// Check every action lattice law
    Validate { model: String },
    /// Evaluate a formula under `--val a=x,b=y`
    Eval {
        model: String,
        formula: String,
        #[arg(long, default_value = "")]
        val: String,
    },
    /// Check a sequent under every valuation
    CheckSeq {
        model: String,
        sequent: String,
        #[arg(long, default_value_t = DEFAULT_VALUATION_BUDGET)]
        budget: u64,
    },
    /// Check a quasiequation under every valuation
    CheckQe {
        model: String,
        quasieq: String,
        #[arg(long, default_value_t = DEFAULT_VALUATION_BUDGET)]
        budget: u64,
    },
    /// Check the conclusions of proof files in every admissible model
    Audit {
        files: Vec<PathBuf>,
        #[arg(long)]
        models: Option<String>,
        #[command(flatten)]
        rules: RulesArg,
        #[arg(long, default_value_t = DEFAULT_OMEGA_FUEL)]
        omega_fuel: usize,
        #[arg(long, default_value_t = DEFAULT_VALUATION_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand)]
enum FramesCmd {
    /// The dual algebra of a frame, as a model file
    Dual {
        input: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Gentzen frame conditions, quasimorphism and embedding
    GentzenCheck { input: String },
    /// Compare a quasiequation on a frame and on its dual algebra
    Transfer {
        input: String,
        /// Quasiequations in `(l <= r & ...) => l <= r` form
        #[arg(long = "qe")]
        qes: Vec<String>,
        /// Structural rules whose analytic quasiequations are tested
        #[arg(long)]
        rules: Option<String>,
        #[arg(long, default_value_t = DEFAULT_VALUATION_BUDGET)]
        budget: u64,
    },
    /// The MacNeille completion of a model
    Macneille { model: String },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Run the acceptance suite
    Run {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Comma-separated criterion numbers
        #[arg(long)]
        only: Option<String>,
    },
}

// ---------------------------------------------------------------------------
// Reports and exit codes
// ---------------------------------------------------------------------------

const OK: u8 = 0;
const FAIL: u8 = 1;
const RESOURCE: u8 = 2;
const USAGE: u8 = 3;

struct Report {
    code: u8,
    text: String,
    json: Value,
}

impl Report {
    fn new(code: u8, text: impl Into<String>, json: Value) -> Report {
        Report {
            code,
            text: text.into(),
            json,
        }
    }
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

type Out = Result<Report, CliError>;

fn err(code: u8, message: impl ToString) -> CliError {
    CliError {
        code,
        message: message.to_string(),
    }
}

impl From<ProofError> for CliError {
    fn from(e: ProofError) -> CliError {
        err(if e.is_resource() { RESOURCE } else { FAIL }, e)
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> CliError {
        match e {
            IoError::Proof(p) => p.into(),
            IoError::Rule(RuleError::MatchCap(_)) => err(RESOURCE, e),
            e => err(USAGE, e),
        }
    }
}

impl From<RuleError> for CliError {
    fn from(e: RuleError) -> CliError {
        match e {
            RuleError::MatchCap(_) => err(RESOURCE, e),
            e => err(USAGE, e),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> CliError {
        match e {
            ModelError::Budget { .. } => err(RESOURCE, e),
            e => err(USAGE, e),
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> CliError {
        match e {
            FrameError::Budget { .. } | FrameError::TooManyClosedSets(_) => err(RESOURCE, e),
            FrameError::Model(m) => m.into(),
            e => err(USAGE, e),
        }
    }
}

fn color_on() -> bool {
    std::env::var("ACTLAT_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

fn paint(word: &str, good: bool) -> String {
    if color_on() {
        format!("\x1b[{}m{word}\x1b[0m", if good { 32 } else { 31 })
    } else {
        word.to_string()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let json = cli.json;
    match run(cli.command, json) {
        Ok(r) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&r.json).expect("json value"));
            } else if !r.text.is_empty() {
                println!("{}", r.text.trim_end());
            }
            ExitCode::from(r.code)
        }
        Err(e) => {
            if json {
                println!("{}", json!({"error": e.message, "exit": e.code}));
            } else {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}

fn run(cmd: Command, json: bool) -> Out {
    match cmd {
        Command::Fmt { input } => fmt_cmd(&input),
        Command::Check {
            file,
            rules,
            omega_fuel,
        } => check_cmd(&file, &rules, omega_fuel),
        Command::Translate {
            input,
            output,
            to,
            fuel,
            omega_fuel,
            rules,
        } => translate_cmd(&input, &output, to, fuel, omega_fuel, &rules),
        Command::Project {
            input,
            output,
            assign,
            fuel,
            rules,
        } => project_cmd(&input, &output, &assign, fuel, &rules),
        Command::Prove {
            sequent,
            rules,
            depth,
            with_cut,
            out,
        } => prove_cmd(&sequent, &rules, depth, with_cut, out.as_deref()),
        Command::Refute {
            sequent,
            rules,
            models,
            budget,
        } => refute_cmd(&sequent, &rules, models.as_deref(), budget),
        Command::Rules(c) => rules_cmd(c),
        Command::Models(c) => models_cmd(c),
        Command::Frames(c) => frames_cmd(c),
        Command::Corpus(CorpusCmd::Run { seed, only }) => corpus_cmd(seed, only.as_deref(), json),
    }
}

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| err(USAGE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| err(USAGE, format!("{}: {e}", path.display())))
}

fn user_rules(path: &Path) -> Result<Vec<Rule>, CliError> {
    Ok(parse_rule_file(&read(path)?)?)
}

fn rule_set(arg: &RulesArg) -> Result<RuleSet, CliError> {
    let Some(source) = arg.rules.as_deref() else {
        return Ok(RuleSet::builtin());
    };
    let path = Path::new(source);
    if path.is_file() {
        let mut rs = RuleSet::builtin();
        for r in user_rules(path)? {
            rs.add(r);
        }
        return Ok(rs);
    }
    let names: Vec<&str> = source.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    Ok(RuleSet::with_structural(&names)?)
}

fn seq(text: &str) -> Result<actlat::Sequent, CliError> {
    parse_sequent(text).map_err(|e| err(USAGE, e))
}

fn model(source: &str) -> Result<FiniteActionLattice, CliError> {
    let path = Path::new(source);
    if path.is_file() {
        let f: ModelFile = serde_json::from_str(&read(path)?).map_err(|e| err(USAGE, e))?;
        return Ok(f.to_model()?);
    }
    Ok(by_name(source)?)
}

/// Library models by name, every model file of a directory (read in
/// parallel), or the whole library.
fn models(source: Option<&str>) -> Result<Vec<FiniteActionLattice>, CliError> {
    let Some(source) = source else {
        return Ok(library());
    };
    let dir = Path::new(source);
    if dir.is_dir() {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| err(USAGE, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        return std::thread::scope(|sc| {
            let hs: Vec<_> = paths
                .iter()
                .map(|p| sc.spawn(move || model(&p.to_string_lossy())))
                .collect();
            hs.into_iter().map(|h| h.join().expect("model reader")).collect()
        });
    }
    source.split(',').map(|n| model(n.trim())).collect()
}

/// A Gentzen frame from a model or frame file, or the frame `W_A` of a
/// library model.
enum FrameInput {
    Gentzen(GentzenFrame),
    Plain(ResiduatedFrame),
}

impl FrameInput {
    fn frame(&self) -> &ResiduatedFrame {
        match self {
            FrameInput::Gentzen(g) => &g.frame,
            FrameInput::Plain(f) => f,
        }
    }

    fn zero(&self) -> Option<usize> {
        match self {
            FrameInput::Gentzen(g) => Some(g.in_wp[g.algebra.zero]),
            FrameInput::Plain(_) => None,
        }
    }
}

fn frame_input(source: &str) -> Result<FrameInput, CliError> {
    let path = Path::new(source);
    if path.is_file() {
        let text = read(path)?;
        let v: Value = serde_json::from_str(&text).map_err(|e| err(USAGE, e))?;
        if v.get("wp").is_some() {
            let f: FrameFile = serde_json::from_value(v).map_err(|e| err(USAGE, e))?;
            return Ok(match f.to_gentzen()? {
                Some(g) => FrameInput::Gentzen(g),
                None => FrameInput::Plain(f.to_frame()?),
            });
        }
    }
    Ok(FrameInput::Gentzen(GentzenFrame::of_model(&model(source)?)))
}

fn load_proof(path: &Path, rules: &RulesArg) -> Result<LoadedProof, CliError> {
    let f = from_json(&read(path)?)?;
    Ok(load(&f, &rule_set(rules)?)?)
}

fn valuation_text(a: &FiniteActionLattice, v: &Valuation) -> String {
    v.iter()
        .map(|(k, &x)| format!("{k}={}", a.names[x]))
        .collect::<Vec<_>>()
        .join(", ")
}

fn valuation_json(a: &FiniteActionLattice, v: &Valuation) -> Value {
    json!(v
        .iter()
        .map(|(k, &x)| (k.clone(), a.names[x].clone()))
        .collect::<BTreeMap<_, _>>())
}

/// Analytic quasiequations of the non-cut structural rules among `names`.
fn quasieqs_of(rs: &RuleSet, names: &[String]) -> Result<Vec<Quasiequation>, CliError> {
    let mut out = Vec::new();
    for n in names {
        let r = rs.require(n)?;
        if r.kind == RuleKind::Structural && r.name != "Cut" {
            out.push(q_a_of(&r).or_else(|_| q_of(&r))?);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Proof commands
// ---------------------------------------------------------------------------

fn fmt_cmd(input: &str) -> Out {
    let path = Path::new(input);
    if path.is_file() {
        let text = to_json(&from_json(&read(path)?)?);
        return Ok(Report::new(OK, text.clone(), json!({"kind": "proof", "text": text})));
    }
    let (kind, text) = if input.contains("=>") {
        let q = Quasiequation::parse(input).map_err(|e| err(USAGE, e))?;
        ("quasiequation", q.to_string())
    } else if input.contains("|-") {
        ("sequent", seq(input)?.to_string())
    } else {
        ("formula", parse_formula(input).map_err(|e| err(USAGE, e))?.to_string())
    };
    Ok(Report::new(OK, text.clone(), json!({"kind": kind, "text": text})))
}

fn check_cmd(file: &Path, rules: &RulesArg, omega_fuel: usize) -> Out {
    match load_proof(file, rules) {
        Ok(LoadedProof::Cyclic(p)) => check_cyclic_report(&p),
        Ok(LoadedProof::Wf(p)) => {
            let r = match check_wf(&p, omega_fuel) {
                Ok(r) => r,
                Err(e) => return rejected_local(e),
            };
            let h = height(&p, omega_fuel)?;
            let bound = if h.approx { " (bound at the ω-fuel)" } else { "" };
            let text = format!(
                "{}: wellfounded proof of {}, {} nodes checked, {} ω-nodes, height {}{bound}",
                paint("accepted", true),
                p.sequent(),
                r.nodes_checked,
                r.omega_nodes,
                h.ordinal
            );
            Ok(Report::new(
                OK,
                text,
                json!({
                    "system": "womega",
                    "verdict": "accepted",
                    "conclusion": p.sequent().to_string(),
                    "nodes_checked": r.nodes_checked,
                    "omega_nodes": r.omega_nodes,
                    "height": h.ordinal.to_string(),
                    "height_is_bound": h.approx,
                    "rules": r.rules_used,
                }),
            ))
        }
        Err(CliError { code: FAIL, message }) => Ok(Report::new(
            FAIL,
            format!("{}: {message}", paint("rejected", false)),
            json!({"verdict": "rejected", "reason": message}),
        )),
        Err(e) => Err(e),
    }
}

fn rejected_local(e: ProofError) -> Out {
    if e.is_resource() {
        return Err(e.into());
    }
    Ok(Report::new(
        FAIL,
        format!("{}: {e}", paint("rejected", false)),
        json!({"verdict": "rejected", "reason": e.to_string()}),
    ))
}

fn check_cyclic_report(p: &actlat::proof::CyclicProof) -> Out {
    let r = match check_cyclic(p) {
        Ok(r) => r,
        Err(e) => return rejected_local(e),
    };
    let concl = p.conclusion()?.to_string();
    Ok(match &r.verdict {
        ProgressVerdict::Accepted { closure_size } => Report::new(
            OK,
            format!(
                "{}: cyclic proof of {concl}, {} nodes, {closure_size} trace relations",
                paint("accepted", true),
                r.nodes
            ),
            json!({
                "system": "cyclic",
                "verdict": "accepted",
                "conclusion": concl,
                "nodes": r.nodes,
                "closure_size": closure_size,
                "rules": r.rules_used,
            }),
        ),
        ProgressVerdict::Rejected(c) => Report::new(
            FAIL,
            format!("{}: no progressing thread on {c}", paint("rejected", false)),
            json!({
                "system": "cyclic",
                "verdict": "rejected",
                "conclusion": concl,
                "cycle": c.cycle,
                "slots": c.slots,
                "stem": c.stem,
                "star_positions": c.positions,
            }),
        ),
    })
}

fn require_accepted(p: &actlat::proof::CyclicProof) -> Result<(), CliError> {
    match check_cyclic(p)?.verdict {
        ProgressVerdict::Accepted { .. } => Ok(()),
        ProgressVerdict::Rejected(c) => Err(err(FAIL, format!("input is rejected: {c}"))),
    }
}

fn translate_cmd(
    input: &Path,
    output: &Path,
    to: Target,
    fuel: usize,
    omega_fuel: usize,
    rules: &RulesArg,
) -> Out {
    let fuel = Fuel {
        nodes: fuel,
        ..Fuel::default()
    };
    match (to, load_proof(input, rules)?) {
        (Target::Wf, LoadedProof::Cyclic(p)) => {
            require_accepted(&p)?;
            let wf = nwf_to_wf(&p, fuel)?;
            let r = check_wf(&wf, omega_fuel)?;
            write(output, &to_json(&wf_to_file(&wf, Some((&p, fuel)))?))?;
            Ok(Report::new(
                OK,
                format!(
                    "wrote {}: wellfounded proof of {}, {} nodes checked at ω-fuel {omega_fuel}",
                    output.display(),
                    wf.sequent(),
                    r.nodes_checked
                ),
                json!({"output": output, "system": "womega", "nodes_checked": r.nodes_checked}),
            ))
        }
        (Target::Nwf, LoadedProof::Wf(p)) => {
            let lazy = wf_to_nwf(&p)?;
            let checked = check_lazy_local(&lazy, 6, omega_fuel)?;
            let folded = fold_to_cyclic(&lazy, fuel.nodes).map_err(|e| {
                err(
                    RESOURCE,
                    format!("the translation is not regular and has no cyclic file form ({e}); {checked} nodes checked to depth 6"),
                )
            })?;
            let r = check_cyclic(&folded)?;
            write(output, &to_json(&cyclic_to_file(&folded)))?;
            Ok(Report::new(
                if r.verdict.is_accepted() { OK } else { FAIL },
                format!("wrote {}: cyclic proof with {} nodes", output.display(), r.nodes),
                json!({"output": output, "system": "cyclic", "nodes": r.nodes, "accepted": r.verdict.is_accepted()}),
            ))
        }
        (Target::Wf, LoadedProof::Wf(_)) => Err(err(USAGE, "input is already wellfounded")),
        (Target::Nwf, LoadedProof::Cyclic(_)) => Err(err(USAGE, "input is already cyclic")),
    }
}

fn assignment(text: &str) -> Result<StarAssignment, CliError> {
    let mut f = StarAssignment::empty();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, n) = part
            .split_once(':')
            .ok_or_else(|| err(USAGE, format!("`{part}` is not pos:n")))?;
        let k = k.trim().parse().map_err(|_| err(USAGE, format!("bad position `{k}`")))?;
        let n = n.trim().parse().map_err(|_| err(USAGE, format!("bad power `{n}`")))?;
        f.0.insert(k, n);
    }
    Ok(f)
}

fn project_cmd(input: &Path, output: &Path, assign: &str, fuel: usize, rules: &RulesArg) -> Out {
    let f = assignment(assign)?;
    let LoadedProof::Cyclic(p) = load_proof(input, rules)? else {
        return Err(err(USAGE, "projection takes a cyclic proof"));
    };
    if !f.is_valid_for(p.conclusion()?) {
        return Err(err(USAGE, format!("{f} does not assign stars of {}", p.conclusion()?)));
    }
    require_accepted(&p)?;
    let projected = project_proof(&lazy_cyclic(&Arc::new(p)), &f)?;
    let folded = fold_to_cyclic(&projected, fuel)?;
    let report = check_cyclic_report(&folded)?;
    write(output, &to_json(&cyclic_to_file(&folded)))?;
    Ok(Report::new(
        report.code,
        format!("wrote {}\n{}", output.display(), report.text),
        json!({"output": output, "check": report.json}),
    ))
}

fn prove_cmd(sequent: &str, rules: &RulesArg, depth: usize, with_cut: bool, out: Option<&Path>) -> Out {
    let goal = seq(sequent)?;
    let rs = rule_set(rules)?;
    let cfg = SearchConfig {
        depth,
        with_cut,
        ..SearchConfig::default()
    };
    let r = prove(&goal, &rs, &cfg).map_err(|e| err(USAGE, e))?;
    match r.outcome {
        SearchOutcome::Found(p) => {
            let file = to_json(&cyclic_to_file(&p));
            let text = match out {
                Some(path) => {
                    write(path, &file)?;
                    format!("found: {} nodes, wrote {}", p.nodes.len(), path.display())
                }
                None => file.clone(),
            };
            let proof: Value = serde_json::from_str(&file).expect("proof json");
            Ok(Report::new(
                OK,
                text,
                json!({"outcome": "found", "visits": r.visits, "proof": proof}),
            ))
        }
        SearchOutcome::Unknown(reason) => {
            let (code, why) = match reason {
                UnknownReason::Budget => (RESOURCE, "budget"),
                UnknownReason::Exhausted => (FAIL, "exhausted"),
                UnknownReason::Rejected => (FAIL, "rejected"),
            };
            Ok(Report::new(
                code,
                format!("unknown ({why}, {} visits)", r.visits),
                json!({"outcome": "unknown", "reason": why, "visits": r.visits}),
            ))
        }
    }
}

fn refute_cmd(sequent: &str, rules: &RulesArg, source: Option<&str>, budget: u64) -> Out {
    let goal = seq(sequent)?;
    let rs = rule_set(rules)?;
    let ms = models(source)?;
    match refute(&goal, &rs, &ms, budget).map_err(|e| err(USAGE, e))? {
        RefuteOutcome::Refuted { model, valuation } => {
            let a = ms.iter().find(|m| m.name == model).expect("refuting model");
            Ok(Report::new(
                FAIL,
                format!("{} in {model}: {}", paint("refuted", false), valuation_text(a, &valuation)),
                json!({"outcome": "refuted", "model": model, "valuation": valuation_json(a, &valuation)}),
            ))
        }
        RefuteOutcome::Unknown => Ok(Report::new(
            OK,
            format!("unknown: valid in {} models", ms.len()),
            json!({"outcome": "unknown", "models": ms.iter().map(|m| &m.name).collect::<Vec<_>>()}),
        )),
    }
}

// ---------------------------------------------------------------------------
// Rules, models, frames
// ---------------------------------------------------------------------------

fn named_rules(names: &[String], file: Option<&Path>) -> Result<Vec<Rule>, CliError> {
    let mut pool = match file {
        Some(f) => user_rules(f)?,
        None => Vec::new(),
    };
    if names.is_empty() {
        return Ok(if file.is_some() { pool } else { structural_library() });
    }
    let mut out = Vec::new();
    for n in names {
        if let Some(i) = pool.iter().position(|r| &r.name == n) {
            out.push(pool.swap_remove(i));
        } else {
            out.push(lookup(n).ok_or_else(|| err(USAGE, format!("unknown rule `{n}`")))?);
        }
    }
    Ok(out)
}

fn rules_cmd(c: RulesCmd) -> Out {
    match c {
        RulesCmd::Classify { names, file } => {
            let rs = named_rules(&names, file.as_deref())?;
            let mut lines = Vec::new();
            let mut js = Vec::new();
            for r in &rs {
                let c = classify(r);
                lines.push(format!("{}: {c}", r.name));
                js.push(json!({
                    "rule": r.name,
                    "structural": c.structural,
                    "linear": c.linear,
                    "analytic": c.analytic,
                }));
            }
            Ok(Report::new(OK, lines.join("\n"), json!(js)))
        }
        RulesCmd::Quasieq {
            name,
            file,
            analytic,
        } => {
            let r = named_rules(std::slice::from_ref(&name), file.as_deref())?.remove(0);
            let q = if analytic { q_a_of(&r)? } else { q_of(&r)? };
            Ok(Report::new(
                OK,
                q.to_string(),
                json!({"rule": r.name, "analytic": analytic, "quasiequation": q.to_string()}),
            ))
        }
    }
}

fn models_cmd(c: ModelsCmd) -> Out {
    match c {
        ModelsCmd::Validate { model: m } => {
            let a = model(&m)?;
            let v = validate_algebra(&a);
            let laws: Vec<Value> = v
                .violations
                .iter()
                .map(|l| json!({"law": l.law, "witness": l.witness}))
                .collect();
            Ok(Report::new(
                if v.is_valid() { OK } else { FAIL },
                format!("{} ({} elements): {v}", a.name, a.size()),
                json!({"model": a.name, "valid": v.is_valid(), "violations": laws}),
            ))
        }
        ModelsCmd::Eval {
            model: m,
            formula,
            val,
        } => {
            let a = model(&m)?;
            let f = parse_formula(&formula).map_err(|e| err(USAGE, e))?;
            let mut v = Valuation::new();
            for part in val.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (k, x) = part
                    .split_once('=')
                    .ok_or_else(|| err(USAGE, format!("`{part}` is not var=element")))?;
                let x = x.trim();
                let e = a
                    .element(x)
                    .or_else(|| x.parse().ok().filter(|&i| i < a.size()))
                    .ok_or_else(|| err(USAGE, format!("no element `{x}` in {}", a.name)))?;
                v.insert(k.trim().to_string(), e);
            }
            let r = eval(&a, &v, &f)?;
            Ok(Report::new(
                OK,
                a.names[r].clone(),
                json!({"model": a.name, "formula": f.to_string(), "value": a.names[r]}),
            ))
        }
        ModelsCmd::CheckSeq {
            model: m,
            sequent,
            budget,
        } => {
            let a = model(&m)?;
            let s = seq(&sequent)?;
            Ok(holds_report(&a, &s.to_string(), refute_sequent(&a, &s, budget)?))
        }
        ModelsCmd::CheckQe {
            model: m,
            quasieq,
            budget,
        } => {
            let a = model(&m)?;
            let q = Quasiequation::parse(&quasieq).map_err(|e| err(USAGE, e))?;
            Ok(holds_report(&a, &q.to_string(), refute_quasieq(&a, &q, budget)?))
        }
        ModelsCmd::Audit {
            files,
            models: source,
            rules,
            omega_fuel,
            budget,
        } => audit_cmd(&files, source.as_deref(), &rules, omega_fuel, budget),
    }
}

fn holds_report(a: &FiniteActionLattice, what: &str, r: Option<Valuation>) -> Report {
    match r {
        None => Report::new(
            OK,
            format!("{} in {}: {what}", paint("holds", true), a.name),
            json!({"model": a.name, "holds": true}),
        ),
        Some(v) => Report::new(
            FAIL,
            format!("{} in {}: {what} at {}", paint("fails", false), a.name, valuation_text(a, &v)),
            json!({"model": a.name, "holds": false, "valuation": valuation_json(a, &v)}),
        ),
    }
}

fn audit_cmd(
    files: &[PathBuf],
    source: Option<&str>,
    rules: &RulesArg,
    omega_fuel: usize,
    budget: u64,
) -> Out {
    let rs = rule_set(rules)?;
    let ms = models(source)?;
    let loaded: Vec<Result<AuditItem, CliError>> = std::thread::scope(|sc| {
        let hs: Vec<_> = files
            .iter()
            .map(|f| {
                let rs = &rs;
                sc.spawn(move || -> Result<AuditItem, CliError> {
                    let fail = |e: CliError| err(e.code, format!("{}: {}", f.display(), e.message));
                    let p = load(&from_json(&read(f)?)?, rs).map_err(|e| fail(e.into()))?;
                    let (sequent, used) = match &p {
                        LoadedProof::Cyclic(c) => {
                            require_accepted(c).map_err(fail)?;
                            (c.conclusion()?.clone(), c.rules_used().into_iter().collect())
                        }
                        LoadedProof::Wf(w) => {
                            check_wf(w, omega_fuel).map_err(|e| fail(e.into()))?;
                            (w.sequent().clone(), wf_structural_rules(w, omega_fuel))
                        }
                    };
                    Ok(AuditItem {
                        sequent,
                        quasieqs: quasieqs_of(rs, &used)?,
                    })
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("audit reader")).collect()
    });
    let items = loaded.into_iter().collect::<Result<Vec<_>, _>>()?;
    let r = soundness_audit(&items, &ms, budget)?;
    let mut text = format!(
        "{}: {} pairs checked, {} skipped, {} over budget",
        if r.passed() { paint("sound", true) } else { paint("violations", false) },
        r.checked,
        r.skipped,
        r.over_budget
    );
    let mut vs = Vec::new();
    for v in &r.violations {
        let a = ms.iter().find(|m| m.name == v.model).expect("audited model");
        text.push_str(&format!("\n{} fails in {} at {}", v.sequent, v.model, valuation_text(a, &v.valuation)));
        vs.push(json!({"sequent": v.sequent.to_string(), "model": v.model, "valuation": valuation_json(a, &v.valuation)}));
    }
    let code = if !r.passed() {
        FAIL
    } else if r.over_budget > 0 {
        RESOURCE
    } else {
        OK
    };
    Ok(Report::new(
        code,
        text,
        json!({"checked": r.checked, "skipped": r.skipped, "over_budget": r.over_budget, "violations": vs}),
    ))
}

fn frames_cmd(c: FramesCmd) -> Out {
    match c {
        FramesCmd::Dual { input, out } => {
            let fi = frame_input(&input)?;
            let d = dual_algebra(fi.frame(), fi.zero())?;
            let v = validate_algebra(&d.algebra);
            let file = serde_json::to_string_pretty(&ModelFile::from_model(&d.algebra)).expect("model json");
            let summary = format!("{} closed sets, {v}", d.sets.len());
            let text = match &out {
                Some(p) => {
                    write(p, &file)?;
                    format!("wrote {}: {summary}", p.display())
                }
                None => file.clone(),
            };
            Ok(Report::new(
                if v.is_valid() { OK } else { FAIL },
                text,
                json!({"closed_sets": d.sets.len(), "valid": v.is_valid(), "algebra": serde_json::from_str::<Value>(&file).expect("model json")}),
            ))
        }
        FramesCmd::GentzenCheck { input } => {
            let FrameInput::Gentzen(g) = frame_input(&input)? else {
                return Err(err(USAGE, "a Gentzen frame needs an algebra"));
            };
            let d = dual_algebra(&g.frame, Some(g.in_wp[g.algebra.zero]))?;
            let emb = embedding_check(&g, &d);
            let checks = [
                ("nuclear", check_nuclear(&g.frame)),
                ("gentzen", check_gentzen(&g, GentzenKind::WithCut)),
                ("star-gentzen", check_star_gentzen(&g)),
                ("quasimorphism", quasimorphism_check(&g, &d)),
                ("embedding", emb.report.clone()),
            ];
            let ok = checks.iter().all(|(_, r)| r.passed()) && emb.injective;
            let mut text = Vec::new();
            let mut js = serde_json::Map::new();
            for (name, r) in &checks {
                text.push(format!("{name}: {}", r.to_string().trim_end()));
                js.insert(name.to_string(), json!({"passed": r.passed(), "checks": r.checks}));
            }
            text.push(format!("injective: {}, surjective: {}", emb.injective, emb.surjective));
            js.insert("injective".into(), json!(emb.injective));
            js.insert("surjective".into(), json!(emb.surjective));
            Ok(Report::new(if ok { OK } else { FAIL }, text.join("\n"), Value::Object(js)))
        }
        FramesCmd::Transfer {
            input,
            qes,
            rules,
            budget,
        } => {
            let fi = frame_input(&input)?;
            let mut qs = Vec::new();
            for q in &qes {
                qs.push(Quasiequation::parse(q).map_err(|e| err(USAGE, e))?);
            }
            if let Some(names) = rules {
                let names: Vec<String> = names.split(',').map(|s| s.trim().to_string()).collect();
                qs.extend(quasieqs_of(&RuleSet::with_structural(&names.iter().map(String::as_str).collect::<Vec<_>>())?, &names)?);
            }
            if qs.is_empty() {
                return Err(err(USAGE, "give --qe or --rules"));
            }
            let d = dual_algebra(fi.frame(), fi.zero())?;
            let mut ok = true;
            let mut text = Vec::new();
            let mut js = Vec::new();
            for q in &qs {
                let t = verify_transfer(fi.frame(), &d, q, budget)?;
                ok &= t.agrees();
                let verdict = if t.agrees() { paint("agree", true) } else { paint("disagree", false) };
                text.push(format!("{verdict}: {q} (frame {}, dual {})", t.frame_side, t.dual_side));
                js.push(json!({"quasiequation": q.to_string(), "frame": t.frame_side, "dual": t.dual_side}));
            }
            Ok(Report::new(if ok { OK } else { FAIL }, text.join("\n"), json!(js)))
        }
        FramesCmd::Macneille { model: m } => {
            let a = model(&m)?;
            let mc = macneille(&a)?;
            let iso = mc.is_isomorphism() && mc.facts.passed();
            Ok(Report::new(
                if iso { OK } else { FAIL },
                format!(
                    "{}: {} closed sets, isomorphism {}, frame facts {}",
                    a.name,
                    mc.dual.sets.len(),
                    mc.is_isomorphism(),
                    mc.facts.to_string().trim_end()
                ),
                json!({"model": a.name, "closed_sets": mc.dual.sets.len(), "isomorphism": mc.is_isomorphism(), "facts": mc.facts.passed()}),
            ))
        }
    }
}

fn corpus_cmd(seed: u64, only: Option<&str>, json_mode: bool) -> Out {
    let ids: Vec<usize> = match only {
        None => (1..=10).collect(),
        Some(s) => s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .ok()
                    .filter(|i| (1..=10).contains(i))
                    .ok_or_else(|| err(USAGE, format!("bad criterion `{x}`")))
            })
            .collect::<Result<_, _>>()?,
    };
    let suite = Suite::new(seed);
    let mut js = Vec::new();
    let mut ok = true;
    if !json_mode {
        println!("seed {seed}");
    }
    for id in ids {
        let r = suite.run(id);
        ok &= r.passed;
        if !json_mode {
            let line = r.to_string();
            let tag = if r.passed { "[PASS]" } else { "[FAIL]" };
            println!("{}", line.replacen(tag, &paint(tag, r.passed), 1));
        }
        js.push(json!({
            "id": r.id,
            "name": r.name,
            "passed": r.passed,
            "detail": r.detail,
            "seconds": r.elapsed.as_secs_f64(),
        }));
    }
    Ok(Report::new(
        if ok { OK } else { FAIL },
        "",
        json!({"seed": seed, "criteria": js}),
    ))
}
