//! `qes`: solve, verify, sample and scan quasi-exactly solvable radial problems.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 no solution, 3 verification failure.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qes_core::bethe::SolverConfig;
use qes_core::document::{parse_documents, SolutionDocument};
use qes_core::families::{solve_family, Case, Family, FamilyProblem, FamilySolve};
use qes_core::oracle::{verify_solution, Level, VerificationReport};
use qes_core::wavefunction;
use qes_core::QesError;

#[derive(Parser)]
#[command(name = "qes", version, about = "Quasi-exactly solvable states of singular inverse-power potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one family problem and emit one document per branch.
    Solve(SolveArgs),
    /// Re-run the full verification on saved documents.
    Verify(VerifyArgs),
    /// Sample a saved wavefunction on a log-spaced grid.
    Sample(SampleArgs),
    /// Sweep one coupling and tabulate every branch.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Quartic,
    Sextic,
    Octic,
    Decatic,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Harmonic,
    Coulombic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long = "case", value_enum, default_value = "harmonic")]
    case: CaseArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    ell: i32,
    /// Free coupling, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Solve for omega so that the derived angular momentum equals --ell.
    #[arg(long)]
    match_ell: bool,
    #[arg(long, env = "QES_SEED", default_value_t = 12345)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    starts: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    path: PathBuf,
    /// Emit the reports as JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SampleArgs {
    path: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    rmin: f64,
    #[arg(long, default_value_t = 10.0)]
    rmax: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Which document of a list to sample.
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_name = "NAME=START:STOP:STEPS", value_parser = parse_sweep)]
    sweep: Sweep,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone)]
struct Sweep {
    name: String,
    values: Vec<f64>,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value for `{k}`: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let (name, range) = s.split_once('=').ok_or_else(|| format!("expected NAME=START:STOP:STEPS, got `{s}`"))?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected START:STOP:STEPS, got `{range}`"));
    }
    let start: f64 = parts[0].parse().map_err(|e| format!("START: {e}"))?;
    let stop: f64 = parts[1].parse().map_err(|e| format!("STOP: {e}"))?;
    let steps: usize = parts[2].parse().map_err(|e| format!("STEPS: {e}"))?;
    if steps == 0 {
        return Err("STEPS must be at least 1".into());
    }
    let values = (0..steps)
        .map(|i| if steps == 1 { start } else { start + (stop - start) * i as f64 / (steps - 1) as f64 })
        .collect();
    Ok(Sweep { name: name.trim().to_string(), values })
}

/// Failure carrying its exit code.
struct Fail(u8, String);

impl From<QesError> for Fail {
    fn from(e: QesError) -> Self {
        let code = match e {
            QesError::NoSolutionFound { .. } => 2,
            _ => 1,
        };
        Fail(code, e.to_string())
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail(1, e.to_string())
    }
}

impl From<csv::Error> for Fail {
    fn from(e: csv::Error) -> Self {
        Fail(1, e.to_string())
    }
}

impl ProblemArgs {
    fn problem(&self) -> FamilyProblem {
        let family = match self.family {
            FamilyArg::Quartic => Family::Quartic,
            FamilyArg::Sextic => Family::Sextic,
            FamilyArg::Octic => Family::Octic,
            FamilyArg::Decatic => Family::Decatic,
        };
        let case = match self.case {
            CaseArg::Harmonic => Case::Harmonic,
            CaseArg::Coulombic => Case::Coulombic,
        };
        let mut p = FamilyProblem::new(family, case, self.n, self.ell);
        p.match_ell = self.match_ell;
        for (k, v) in &self.params {
            p.free.insert(k.clone(), *v);
        }
        p
    }

    fn config(&self) -> SolverConfig {
        SolverConfig { seed: self.seed, starts: self.starts, ..SolverConfig::default() }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn root_text(z: &qes_core::document::ComplexValue) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Fail> {
    let problem = args.problem.problem();
    problem.validate()?;
    let FamilySolve { solutions, skipped } = solve_family(&problem, &args.problem.config())?;
    for s in &skipped {
        eprintln!("skipped branch {:?}: {}", s.roots, s.error);
    }
    let docs: Vec<SolutionDocument> = solutions
        .iter()
        .map(|s| SolutionDocument::new(s, Some(verify_solution(s, Level::Fast))))
        .collect();
    let text = match args.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&docs).map_err(|e| Fail(1, e.to_string()))?),
        Format::Csv => solve_csv(&docs)?,
    };
    emit(&args.out, &text)?;
    if docs.is_empty() {
        return Err(Fail(2, "no branch satisfies the constraints".into()));
    }
    let passing = docs.iter().filter(|d| d.verification.as_ref().is_some_and(|v| v.passed)).count();
    if passing == 0 {
        return Err(Fail(3, "branches found but none passed verification".into()));
    }
    Ok(())
}

fn solve_csv(docs: &[SolutionDocument]) -> Result<String, Fail> {
    let names: BTreeSet<&String> = docs.iter().flat_map(|d| d.derived.keys()).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["branch".to_string(), "energy".into(), "passed".into(), "roots".into()];
    header.extend(names.iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for (i, d) in docs.iter().enumerate() {
        let roots: Vec<String> = d
            .roots
            .iter()
            .map(|z| root_text(&qes_core::document::ComplexValue { re: z.re, im: z.im }))
            .collect();
        let mut row = vec![
            i.to_string(),
            d.energy.to_string(),
            d.verification.as_ref().is_some_and(|v| v.passed).to_string(),
            roots.join(";"),
        ];
        row.extend(names.iter().map(|k| d.derived.get(*k).map(|v| v.to_string()).unwrap_or_default()));
        w.write_record(&row)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Fail(1, e.to_string()))?).map_err(|e| Fail(1, e.to_string()))
}

fn load(path: &Path) -> Result<Vec<SolutionDocument>, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail(1, format!("{}: {e}", path.display())))?;
    parse_documents(&text).map_err(|e| Fail(1, format!("{}: {e}", path.display())))
}

fn print_report(out: &mut impl Write, i: usize, rep: &VerificationReport) -> io::Result<()> {
    writeln!(out, "document {i}: {}", if rep.passed { "PASS" } else { "FAIL" })?;
    for c in &rep.checks {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        writeln!(out, "  {mark} {:<22} value {:<24e} tolerance {:e}", c.name, c.value, c.tolerance)?;
    }
    for n in &rep.notes {
        writeln!(out, "  note: {n}")?;
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Fail> {
    let docs = load(&args.path)?;
    let mut reports = Vec::new();
    for (i, d) in docs.iter().enumerate() {
        let sol = d.to_solution().map_err(|e| Fail(1, format!("document {i}: {e}")))?;
        reports.push(verify_solution(&sol, Level::Full));
    }
    let mut out = io::stdout().lock();
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&reports).map_err(|e| Fail(1, e.to_string()))?)?;
    } else {
        for (i, r) in reports.iter().enumerate() {
            print_report(&mut out, i, r)?;
        }
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        let failed: Vec<String> = reports
            .iter()
            .flat_map(|r| r.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()))
            .collect();
        Err(Fail(3, format!("verification failed: {}", failed.join(", "))))
    }
}

fn cmd_sample(args: &SampleArgs) -> Result<(), Fail> {
    if args.format != Format::Csv {
        return Err(Fail(1, "sample supports --format csv only".into()));
    }
    if !(args.rmin > 0.0 && args.rmax > args.rmin && args.points >= 2) {
        return Err(Fail(1, "need 0 < rmin < rmax and points >= 2".into()));
    }
    let docs = load(&args.path)?;
    let doc = docs.get(args.index).ok_or_else(|| Fail(1, format!("no document at index {}", args.index)))?;
    let wf = &doc.waveform;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["r", "log_abs_psi", "sign", "psi1_over_psi"])?;
    let ratio = args.rmax / args.rmin;
    for i in 0..args.points {
        let r = if i + 1 == args.points {
            args.rmax
        } else {
            args.rmin * ratio.powf(i as f64 / (args.points - 1) as f64)
        };
        let (l, s) = wavefunction::eval_log_psi(wf, r)?;
        let d1 = wavefunction::eval_psi_log_derivatives(wf, r).map(|x| x.0).unwrap_or(f64::NAN);
        w.write_record([r.to_string(), l.to_string(), s.to_string(), d1.to_string()])?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| Fail(1, e.to_string()))?).map_err(|e| Fail(1, e.to_string()))?;
    emit(&args.out, &text)
}

fn cmd_scan(args: &ScanArgs) -> Result<(), Fail> {
    let base = args.problem.problem();
    let cfg = args.problem.config();
    struct Row {
        value: f64,
        branch: String,
        energy: String,
        derived: BTreeMap<String, f64>,
        passed: bool,
        error: String,
    }
    let name = args.sweep.name.as_str();
    if !(base.free_names().contains(&name) || base.match_ell && name == "omega_guess") {
        return Err(Fail(1, format!("`{name}` is not a free coupling of this problem")));
    }
    let mut rows = Vec::new();
    for &value in &args.sweep.values {
        let mut p = base.clone();
        p.free.insert(args.sweep.name.clone(), value);
        let fail = |error: String| Row {
            value,
            branch: String::new(),
            energy: String::new(),
            derived: BTreeMap::new(),
            passed: false,
            error,
        };
        if let Err(e) = p.validate() {
            rows.push(fail(format!("{}: {e}", e.kind())));
            continue;
        }
        match solve_family(&p, &cfg) {
            Err(e) => rows.push(fail(format!("{}: {e}", e.kind()))),
            Ok(out) => {
                for (i, s) in out.solutions.iter().enumerate() {
                    let rep = verify_solution(s, Level::Fast);
                    rows.push(Row {
                        value,
                        branch: i.to_string(),
                        energy: s.energy.to_string(),
                        derived: s.derived.clone(),
                        passed: rep.passed,
                        error: String::new(),
                    });
                }
                for s in &out.skipped {
                    rows.push(fail(format!("{}: {}", s.error.kind(), s.error)));
                }
            }
        }
    }
    let names: BTreeSet<String> = rows.iter().flat_map(|r| r.derived.keys().cloned()).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![args.sweep.name.clone(), "branch".into(), "energy".into()];
    header.extend(names.iter().cloned());
    header.extend(["passed".to_string(), "error".to_string()]);
    w.write_record(&header)?;
    for r in &rows {
        let mut rec = vec![r.value.to_string(), r.branch.clone(), r.energy.clone()];
        rec.extend(names.iter().map(|k| r.derived.get(k).map(|v| v.to_string()).unwrap_or_default()));
        rec.extend([r.passed.to_string(), r.error.clone()]);
        w.write_record(&rec)?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| Fail(1, e.to_string()))?).map_err(|e| Fail(1, e.to_string()))?;
    emit(&args.out, &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
