use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use opacity::io::{self, canonical};
use opacity::oracles::{self, SatResult};
use opacity::reductions::{
    cso_to_lbo, gen_cnf_cso, gen_dag_cso_unary, gen_dag_weak_lbo, gen_union_universality_cso, lbo_to_iso,
    po_determinize,
};
use opacity::verify::{self, select_algorithm};
use opacity::{batch, Algorithm, Automaton, Config, CsoInstance, Verdict};

#[derive(Parser)]
#[command(name = "opacity", version, about = "Opacity verification for partially observed automata")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Output::Text, global = true)]
    output: Output,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Notion {
    Cso,
    Iso,
    Ifso,
    Lbo,
    LboWeak,
}

impl Notion {
    fn name(self) -> &'static str {
        match self {
            Notion::Cso => "cso",
            Notion::Iso => "iso",
            Notion::Ifso => "ifso",
            Notion::Lbo => "lbo",
            Notion::LboWeak => "lbo-weak",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide an opacity property for one or more instance files.
    Verify {
        #[arg(long, value_enum, default_value_t = Notion::Cso)]
        notion: Notion,
        /// Only meaningful for current-state opacity.
        #[arg(long, default_value_t = Algorithm::Auto)]
        algorithm: Algorithm,
        /// Print the violating observation and a run producing it.
        #[arg(long)]
        witness: bool,
        /// Maximum number of observer states before giving up.
        #[arg(long, default_value_t = opacity::observer::DEFAULT_OBSERVER_CAP, value_parser = clap::value_parser!(usize))]
        observer_cap: usize,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Build an instance from a formula, graph, automata or another instance.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        /// Observable event driving the initial chain of `po-det`.
        #[arg(long, default_value = "0")]
        chain_event: String,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Report structural properties of an automaton or instance.
    Classify { file: PathBuf },
    /// Brute-force reference checks.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Cnf,
    DagWeakLbo,
    DagUnaryCso,
    Union,
    PoDet,
    Cso2lbo,
    Lbo2iso,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    /// Exhaustive satisfiability of a DIMACS formula.
    Sat,
    /// Reachability of `t` from `s` in a DAG file.
    DagReach,
    /// Current-state opacity by run enumeration (acyclic only).
    EnumCso,
    /// Projected languages of the secret and non-secret states (acyclic only).
    Languages,
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn fail(context: &Path, e: impl std::fmt::Display) -> String {
    format!("{}: {e}", context.display())
}

struct Report {
    file: PathBuf,
    notion: Notion,
    algorithm: Option<Algorithm>,
    verdict: Verdict,
    classification: Value,
    elapsed_ms: f64,
}

impl Report {
    fn to_json(&self) -> Value {
        json!({
            "file": self.file.display().to_string(),
            "notion": self.notion.name(),
            "algorithm": self.algorithm.map(|a| a.as_str()),
            "holds": self.verdict.holds,
            "verdict": if self.verdict.holds { "holds" } else { "violated" },
            "witness": self.verdict.witness,
            "classification": self.classification,
            "timing": { "elapsed_ms": self.elapsed_ms },
        })
    }
}

fn word(w: &[String]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.join(" ")
    }
}

fn classification(a: &Automaton) -> Value {
    serde_json::to_value(a.classify()).expect("serializable")
}

fn verify_file(
    path: &Path,
    notion: Notion,
    algorithm: Algorithm,
    config: &Config,
) -> Result<(Report, Vec<String>), String> {
    let text = read(path)?;
    let mut warnings = Vec::new();
    let start = Instant::now();
    let (verdict, chosen, classification) = match notion {
        Notion::Cso => {
            let inst = io::read_cso(&text).map_err(|e| fail(path, e))?.instance;
            if inst.overlapping() {
                warnings.push(format!("{}: secret and non-secret states overlap", path.display()));
            }
            let chosen = match algorithm {
                Algorithm::Auto => select_algorithm(inst.automaton()),
                other => other,
            };
            let v = verify::verify_cso(&inst, chosen, config).map_err(|e| fail(path, e))?;
            (v, Some(chosen), classification(inst.automaton()))
        }
        Notion::Iso => {
            let inst = io::read_iso(&text).map_err(|e| fail(path, e))?.instance;
            let v = verify::verify_iso(&inst, config).map_err(|e| fail(path, e))?;
            (v, None, classification(inst.automaton()))
        }
        Notion::Ifso => {
            let inst = io::read_ifso(&text).map_err(|e| fail(path, e))?.instance;
            let v = verify::verify_ifso(&inst, config).map_err(|e| fail(path, e))?;
            (v, None, classification(inst.automaton()))
        }
        Notion::Lbo | Notion::LboWeak => {
            let inst = io::read_lbo(&text).map_err(|e| fail(path, e))?.instance;
            let v = if notion == Notion::Lbo {
                verify::verify_lbo(&inst, config).map_err(|e| fail(path, e))?
            } else {
                verify::verify_lbo_weak(&inst)
            };
            let c = json!({
                "secret": classification(inst.secret_automaton()),
                "nonsecret": classification(inst.nonsecret_automaton()),
            });
            (v, None, c)
        }
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = Report { file: path.to_path_buf(), notion, algorithm: chosen, verdict, classification, elapsed_ms };
    Ok((report, warnings))
}

fn cmd_verify(
    output: Output,
    notion: Notion,
    algorithm: Algorithm,
    witness: bool,
    observer_cap: usize,
    files: &[PathBuf],
) -> Result<ExitCode, String> {
    if notion != Notion::Cso && algorithm != Algorithm::Auto {
        return Err(format!("--algorithm {algorithm} applies only to --notion cso"));
    }
    if observer_cap == 0 {
        return Err("--observer-cap must be positive".into());
    }
    let config = Config { observer_cap };
    let results = batch::map(files, |f| verify_file(f, notion, algorithm, &config));
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok((report, warnings)) => {
                for w in warnings {
                    eprintln!("warning: {w}");
                }
                reports.push(report);
            }
            Err(e) => errors.push(e),
        }
    }
    match output {
        Output::Json => {
            let values: Vec<Value> = reports.iter().map(Report::to_json).collect();
            if files.len() == 1 && values.len() == 1 {
                print!("{}", canonical(&values[0]));
            } else if !values.is_empty() {
                print!("{}", canonical(&values));
            }
        }
        Output::Text => {
            for r in &reports {
                let prefix = if files.len() > 1 { format!("{}: ", r.file.display()) } else { String::new() };
                let state = if r.verdict.holds { "holds" } else { "violated" };
                println!("{prefix}{} {state}", r.notion.name());
                if let (true, Some(w)) = (witness, &r.verdict.witness) {
                    println!("{prefix}observation: {}", word(&w.observation));
                    println!("{prefix}run: {}", word(&w.run));
                }
            }
        }
    }
    if let Some(e) = errors.first() {
        for e in &errors[1..] {
            eprintln!("error: {e}");
        }
        return Err(e.clone());
    }
    Ok(if reports.iter().all(|r| r.verdict.holds) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_gen(kind: GenKind, chain_event: &str, inputs: &[PathBuf]) -> Result<String, String> {
    let single = || -> Result<(&Path, String), String> {
        match inputs {
            [one] => Ok((one.as_path(), read(one)?)),
            _ => Err("exactly one input file is required".into()),
        }
    };
    Ok(match kind {
        GenKind::Cnf => {
            let (path, text) = single()?;
            let formula = io::parse_dimacs(&text).map_err(|e| fail(path, e))?;
            let meta = json!({
                "generator": "cnf",
                "variables": formula.variable_count(),
                "clauses": formula.clauses().len(),
            });
            io::write_cso(&gen_cnf_cso(&formula), Some(&meta))
        }
        GenKind::DagWeakLbo | GenKind::DagUnaryCso => {
            let (path, text) = single()?;
            let dag = io::read_dag(&text).map_err(|e| fail(path, e))?;
            if kind == GenKind::DagWeakLbo {
                let meta = json!({
                    "generator": "dag-weak-lbo",
                    "s": format!("v{}", dag.source()),
                    "t": format!("v{}", dag.target()),
                    "extra_state": "t'",
                });
                io::write_lbo(&gen_dag_weak_lbo(&dag), Some(&meta))
            } else {
                let meta = json!({
                    "generator": "dag-unary-cso",
                    "s": format!("v{}", dag.source()),
                    "t": format!("v{}", dag.target()),
                });
                io::write_cso(&gen_dag_cso_unary(&dag), Some(&meta))
            }
        }
        GenKind::Union => {
            let mut dfas = Vec::new();
            for path in inputs {
                dfas.extend(io::read_automata(&read(path)?).map_err(|e| fail(path, e))?);
            }
            let out = gen_union_universality_cso(&dfas).map_err(|e| e.to_string())?;
            let meta = json!({
                "generator": "union",
                "chain_event": out.chain_event,
                "component_initials": out.component_initials,
                "copied_initials": out.copied_initials,
                "completed": out.completed,
            });
            io::write_cso(&out.instance, Some(&meta))
        }
        GenKind::PoDet => {
            let (path, text) = single()?;
            let inst = io::read_cso(&text).map_err(|e| fail(path, e))?.instance;
            let out = po_determinize(inst.automaton(), chain_event).map_err(|e| fail(path, e))?;
            let meta = json!({
                "generator": "po-det",
                "chain_event": chain_event,
                "encoding_event": out.encoding_event,
                "encoding": out.encoding,
                "initial_chain": out.initial_chain,
            });
            // original states keep their indices
            let det = CsoInstance::new(out.automaton, inst.secret().clone(), inst.nonsecret().clone())
                .map_err(|e| fail(path, e))?;
            io::write_cso(&det, Some(&meta))
        }
        GenKind::Cso2lbo => {
            let (path, text) = single()?;
            let inst = io::read_cso(&text).map_err(|e| fail(path, e))?.instance;
            io::write_lbo(&cso_to_lbo(&inst), Some(&json!({ "generator": "cso2lbo" })))
        }
        GenKind::Lbo2iso => {
            let (path, text) = single()?;
            let inst = io::read_lbo(&text).map_err(|e| fail(path, e))?.instance;
            let out = lbo_to_iso(&inst);
            if out.trimmed {
                eprintln!("warning: {}: inputs were trimmed", path.display());
            }
            let meta = json!({
                "generator": "lbo2iso",
                "marker_event": out.marker_event,
                "secret_sink": out.secret_sink,
                "nonsecret_sink": out.nonsecret_sink,
                "trimmed": out.trimmed,
            });
            io::write_iso(&out.instance, Some(&meta))
        }
    })
}

fn cmd_classify(output: Output, path: &Path) -> Result<(), String> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| fail(path, e))?;
    let has = |k: &str| value.get(k).is_some();
    let report = if has("secret_automaton") {
        let inst = io::read_lbo(&text).map_err(|e| fail(path, e))?.instance;
        json!({
            "secret": classification(inst.secret_automaton()),
            "nonsecret": classification(inst.nonsecret_automaton()),
        })
    } else if has("automaton") {
        let a = if has("secret_initial") {
            io::read_iso(&text).map_err(|e| fail(path, e))?.instance.automaton().clone()
        } else if has("secret_pairs") {
            io::read_ifso(&text).map_err(|e| fail(path, e))?.instance.automaton().clone()
        } else {
            io::read_cso(&text).map_err(|e| fail(path, e))?.instance.automaton().clone()
        };
        classification(&a)
    } else {
        classification(&io::read_automaton(&text).map_err(|e| fail(path, e))?)
    };
    match output {
        Output::Json => print!("{}", canonical(&report)),
        Output::Text => print_fields(&report, ""),
    }
    Ok(())
}

fn print_fields(value: &Value, prefix: &str) {
    if let Value::Object(map) = value {
        for (k, v) in map {
            match v {
                Value::Object(_) => print_fields(v, &format!("{prefix}{k}.")),
                _ => println!("{prefix}{k}: {v}"),
            }
        }
    }
}

fn cmd_oracle(output: Output, kind: OracleKind, path: &Path) -> Result<ExitCode, String> {
    let text = read(path)?;
    let (value, code) = match kind {
        OracleKind::Sat => {
            let formula = io::parse_dimacs(&text).map_err(|e| fail(path, e))?;
            match oracles::brute_sat(&formula).map_err(|e| fail(path, e))? {
                SatResult::Sat(x) => (json!({ "result": "sat", "assignment": x }), 0),
                SatResult::Unsat => (json!({ "result": "unsat" }), 0),
            }
        }
        OracleKind::DagReach => {
            let dag = io::read_dag(&text).map_err(|e| fail(path, e))?;
            (json!({ "reachable": oracles::dag_reachable(&dag) }), 0)
        }
        OracleKind::EnumCso => {
            let inst = io::read_cso(&text).map_err(|e| fail(path, e))?.instance;
            let v = oracles::enum_cso_acyclic(&inst).map_err(|e| fail(path, e))?;
            let code = if v.holds { 0 } else { 1 };
            (json!({ "holds": v.holds, "witness": v.witness }), code)
        }
        OracleKind::Languages => {
            let inst = io::read_cso(&text).map_err(|e| fail(path, e))?.instance;
            let a = inst.automaton();
            let secret = oracles::enum_languages_projected(a, inst.secret()).map_err(|e| fail(path, e))?;
            let nonsecret = oracles::enum_languages_projected(a, inst.nonsecret()).map_err(|e| fail(path, e))?;
            (json!({ "secret": secret, "nonsecret": nonsecret }), 0)
        }
    };
    match output {
        Output::Json => print!("{}", canonical(&value)),
        Output::Text => print_fields(&value, ""),
    }
    Ok(ExitCode::from(code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify { notion, algorithm, witness, observer_cap, files } => {
            cmd_verify(cli.output, *notion, *algorithm, *witness, *observer_cap, files)
        }
        Command::Gen { kind, chain_event, inputs } => cmd_gen(*kind, chain_event, inputs).map(|s| {
            print!("{s}");
            ExitCode::SUCCESS
        }),
        Command::Classify { file } => cmd_classify(cli.output, file).map(|_| ExitCode::SUCCESS),
        Command::Oracle { kind, file } => cmd_oracle(cli.output, *kind, file),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
