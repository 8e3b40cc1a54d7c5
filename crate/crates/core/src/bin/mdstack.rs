use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::json;

use mdstack::abelian::GroupElement;
use mdstack::gradedring::{smoothness, SingularityVerdict};
use mdstack::io::{self, Report};
use mdstack::stack::{self, overall, Diagnostic, Equivalence, Verdict};
use mdstack::toric;
use mdstack::Error;

/// Exit code for usage, parse and build errors.
const INPUT_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "mdstack",
    version,
    about = "Cox-data calculus for Mori dream quotient stacks"
)]
struct Cli {
    /// Emit a JSON report instead of a document.
    #[arg(long, global = true)]
    json: bool,
    /// Run the command on every `.mds` file in DIR.
    #[arg(long, global = true, value_name = "DIR")]
    batch: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Homogeneity, units, smoothness and finite generation checks.
    Validate { file: Option<PathBuf> },
    /// Adjoin an r-th root of a section.
    RootDivisor {
        file: Option<PathBuf>,
        #[arg(long)]
        section: String,
        #[arg(long)]
        order: BigInt,
        /// Eliminate simple root relations afterwards.
        #[arg(long)]
        simplify: bool,
    },
    /// Adjoin an r-th root of a line bundle given by its degree, e.g. "(1, 0)".
    RootBundle {
        file: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        degree: String,
        #[arg(long)]
        order: BigInt,
    },
    /// Split off the gerbe part: a rigid stack plus line-bundle roots.
    Rigidify { file: Option<PathBuf> },
    /// Rebuild a stack from a document with [stack] and [roots] sections.
    Reconstruct { file: Option<PathBuf> },
    /// Whether the Cox ring is a polynomial ring.
    IsToric { file: Option<PathBuf> },
    /// The toric stack cut out by dropping all relations.
    Ambient { file: Option<PathBuf> },
    /// Cox data of the stacky fan in a [fan] section.
    FromFan {
        file: Option<PathBuf>,
        /// Ignore multiplicities.
        #[arg(long)]
        canonical: bool,
    },
    /// Singular locus analysis.
    Smooth { file: Option<PathBuf> },
    /// Canonical form; with a second file, compare the two.
    Fingerprint {
        file: Option<PathBuf>,
        other: Option<PathBuf>,
    },
    /// Everything known about a stack, as JSON.
    Report { file: Option<PathBuf> },
}

impl Command {
    fn file(&self) -> Option<&PathBuf> {
        match self {
            Command::Validate { file }
            | Command::RootDivisor { file, .. }
            | Command::RootBundle { file, .. }
            | Command::Rigidify { file }
            | Command::Reconstruct { file }
            | Command::IsToric { file }
            | Command::Ambient { file }
            | Command::FromFan { file, .. }
            | Command::Smooth { file }
            | Command::Fingerprint { file, .. }
            | Command::Report { file } => file.as_ref(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::RootDivisor { .. } => "root-divisor",
            Command::RootBundle { .. } => "root-bundle",
            Command::Rigidify { .. } => "rigidify",
            Command::Reconstruct { .. } => "reconstruct",
            Command::IsToric { .. } => "is-toric",
            Command::Ambient { .. } => "ambient",
            Command::FromFan { .. } => "from-fan",
            Command::Smooth { .. } => "smooth",
            Command::Fingerprint { .. } => "fingerprint",
            Command::Report { .. } => "report",
        }
    }
}

struct Outcome {
    code: u8,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn input_error(path: &Path, e: &Error) -> Self {
        let sep = if matches!(e, Error::Syntax { .. }) {
            ":"
        } else {
            ": "
        };
        Self {
            code: INPUT_ERROR,
            stdout: String::new(),
            stderr: format!("{}{sep}{e}\n", path.display()),
        }
    }
}

fn verdict_code(v: Verdict) -> u8 {
    v.exit_code() as u8
}

fn load(path: &Path) -> Result<io::Document, Error> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Document(format!("cannot read: {e}")))?;
    io::parse_document(&text)
}

fn parse_degree(text: &str) -> Result<GroupElement, Error> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
    if inner.trim().is_empty() {
        return Ok(GroupElement(vec![]));
    }
    inner
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Document(format!("bad degree coordinate `{}`", c.trim())))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(GroupElement)
}

fn diagnostics_text(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| format!("{}: {} ({})\n", d.check, d.verdict, d.detail))
        .collect()
}

fn run(command: &Command, path: &Path, json: bool) -> Outcome {
    match execute(command, path, json) {
        Ok(o) => o,
        Err(e) => Outcome::input_error(path, &e),
    }
}

fn execute(command: &Command, path: &Path, json: bool) -> Result<Outcome, Error> {
    let doc = load(path)?;
    let mut report = Report::new(command.name(), vec![path.display().to_string()]);
    let mut stderr = String::new();
    let text: String;
    match command {
        Command::Validate { .. } => {
            if doc.stack.is_none() && doc.fan.is_some() {
                let fan = io::build_fan(&doc)?;
                report.diagnostics = toric::validate_fan(&fan);
                report.output = io::fan_to_json(&fan);
                text = format!(
                    "fan of dimension {}\n{}",
                    fan.dim,
                    diagnostics_text(&report.diagnostics)
                );
            } else {
                let x = io::build_unchecked(&doc)?;
                report.diagnostics = stack::validate(&x);
                report.output = io::stack_to_json(&x);
                text = format!(
                    "stack: {}\ngrading: {}\n{}",
                    x.name,
                    x.grading().canonical().group,
                    diagnostics_text(&report.diagnostics)
                );
            }
            report.verdict = overall(&report.diagnostics);
        }
        Command::RootDivisor {
            section,
            order,
            simplify,
            ..
        } => {
            let x = io::build(&doc)?;
            let s = x.cox.parse_polynomial(section)?;
            let mut y = stack::divisor_root(&x, &s, order)?;
            if *simplify {
                y = stack::simplify(&y);
            }
            report.output = io::stack_to_json(&y);
            text = io::stack_to_text(&y);
        }
        Command::RootBundle { degree, order, .. } => {
            let x = io::build(&doc)?;
            let y = stack::line_bundle_root(&x, &parse_degree(degree)?, order)?;
            report.output = io::stack_to_json(&y);
            text = io::stack_to_text(&y);
        }
        Command::Rigidify { .. } => {
            let x = io::build(&doc)?;
            let f = stack::rigidify(&x)?;
            let eff = stack::effective_degree_subgroup(&x);
            report.output = io::factorization_to_json(&f);
            report.output["stabilizer"] = json!(eff.stabilizer.to_string());
            text = io::factorization_to_text(&f);
        }
        Command::Reconstruct { .. } => {
            let f = io::build_factorization(&doc)?;
            let y = stack::reconstruct(&f)?;
            report.output = io::stack_to_json(&y);
            text = io::stack_to_text(&y);
        }
        Command::IsToric { .. } => {
            let x = io::build(&doc)?;
            let t = stack::is_toric(&x);
            report.verdict = if t { Verdict::Pass } else { Verdict::Fail };
            report.output = json!({ "is_toric": t });
            text = format!("{t}\n");
        }
        Command::Ambient { .. } => {
            let x = io::build(&doc)?;
            let (y, warning) = stack::ambient_toric(&x);
            report.output = json!({ "ambient": io::stack_to_json(&y), "warning": warning });
            if let Some(w) = &warning {
                stderr.push_str(&format!("warning: {w}\n"));
            }
            text = io::stack_to_text(&y);
        }
        Command::FromFan { canonical, .. } => {
            let fan = io::build_fan(&doc)?;
            report.diagnostics = toric::validate_fan(&fan);
            report.verdict = overall(&report.diagnostics);
            if report.verdict == Verdict::Fail {
                report.output = io::fan_to_json(&fan);
                text = diagnostics_text(&report.diagnostics);
            } else {
                let y = if *canonical {
                    toric::canonical_from_fan(&fan)?
                } else {
                    toric::fan_to_stack(&fan)?
                };
                report.output = json!({
                    "stack": io::stack_to_json(&y),
                    "smooth_fan": toric::is_smooth_fan(&fan),
                    "snc_invariant_divisors": toric::snc_invariant_divisors(&fan),
                });
                text = io::stack_to_text(&y);
            }
        }
        Command::Smooth { .. } => {
            let x = io::build(&doc)?;
            let s = smoothness(&x.cox);
            report.verdict = match s.verdict {
                SingularityVerdict::Smooth | SingularityVerdict::SmoothOnComplement => {
                    Verdict::Pass
                }
                SingularityVerdict::Singular => Verdict::Fail,
                SingularityVerdict::Unknown => Verdict::Unknown,
            };
            let strata: Vec<String> = s
                .strata
                .iter()
                .map(|st| format!("{{{}}}", st.join(", ")))
                .collect();
            text = format!(
                "verdict: {}\nstrata: {}\n{}\n",
                json!(s.verdict).as_str().unwrap_or(""),
                strata.join(" "),
                s.explanation
            );
            report.output = json!(s);
        }
        Command::Fingerprint { other, .. } => {
            let x = io::build(&doc)?;
            let fx = stack::graded_fingerprint(&x);
            match other {
                None => {
                    text = fx.to_string();
                    report.output = json!({ "fingerprint": text });
                }
                Some(o) => {
                    let y = io::build(&load(o)?)?;
                    let eq = fx.compare(&stack::graded_fingerprint(&y));
                    report.inputs.push(o.display().to_string());
                    report.verdict = match eq {
                        Equivalence::Equal => Verdict::Pass,
                        Equivalence::NotEqual => Verdict::Fail,
                        Equivalence::Unknown => Verdict::Unknown,
                    };
                    report.output = json!({ "equivalence": eq });
                    text = format!("{}\n", json!(eq).as_str().unwrap_or(""));
                }
            }
        }
        Command::Report { .. } if doc.stack.is_none() && doc.fan.is_some() => {
            let fan = io::build_fan(&doc)?;
            report.diagnostics = toric::validate_fan(&fan);
            report.verdict = overall(&report.diagnostics);
            let mut out =
                json!({ "fan": io::fan_to_json(&fan), "smooth": toric::is_smooth_fan(&fan) });
            if report.verdict == Verdict::Pass {
                out["stack"] = io::stack_to_json(&toric::fan_to_stack(&fan)?);
            }
            report.output = out;
            return Ok(Outcome {
                code: verdict_code(report.verdict),
                stdout: report.to_json() + "\n",
                stderr,
            });
        }
        Command::Report { .. } => {
            let x = io::build_unchecked(&doc)?;
            report.diagnostics = stack::validate(&x);
            report.verdict = overall(&report.diagnostics);
            let eff = stack::effective_degree_subgroup(&x);
            let mut out = json!({
                "stack": io::stack_to_json(&x),
                "is_toric": stack::is_toric(&x),
                "effective_degrees": eff.group.to_string(),
                "generic_stabilizer": eff.stabilizer.to_string(),
                "fingerprint": stack::graded_fingerprint(&x).to_string(),
            });
            if let Ok(f) = stack::rigidify(&x) {
                out["rigidification"] = io::factorization_to_json(&f);
            }
            report.output = out;
            return Ok(Outcome {
                code: verdict_code(report.verdict),
                stdout: report.to_json() + "\n",
                stderr,
            });
        }
    }
    let stdout = if json { report.to_json() + "\n" } else { text };
    Ok(Outcome {
        code: verdict_code(report.verdict),
        stdout,
        stderr,
    })
}

/// Worst outcome first: input errors, then failures, then unknowns.
fn severity(code: u8) -> u8 {
    match code {
        INPUT_ERROR => 3,
        1 => 2,
        2 => 1,
        _ => 0,
    }
}

fn batch(
    command: &Command,
    dir: &Path,
    json: bool,
) -> Result<Vec<(PathBuf, Outcome)>, std::io::Error> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "mds"))
        .collect();
    files.sort();
    Ok(std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| s.spawn(move || run(command, f, json)))
            .collect();
        files
            .iter()
            .cloned()
            .zip(
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked")),
            )
            .collect()
    }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT_ERROR } else { 0 });
        }
    };
    if let Some(dir) = &cli.batch {
        let results = match batch(&cli.command, dir, cli.json) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("{}: {e}", dir.display());
                return ExitCode::from(INPUT_ERROR);
            }
        };
        let mut worst = 0u8;
        for (path, o) in &results {
            if !cli.json {
                println!("== {} (exit {})", path.display(), o.code);
            }
            print!("{}", o.stdout);
            eprint!("{}", o.stderr);
            if severity(o.code) > severity(worst) {
                worst = o.code;
            }
        }
        return ExitCode::from(worst);
    }
    let Some(file) = cli.command.file() else {
        eprintln!("error: an input file or --batch DIR is required");
        return ExitCode::from(INPUT_ERROR);
    };
    let o = run(&cli.command, file, cli.json);
    print!("{}", o.stdout);
    eprint!("{}", o.stderr);
    ExitCode::from(o.code)
}
