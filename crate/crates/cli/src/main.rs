use std::path::PathBuf;
use std::process::ExitCode;

use biharmonic::acceptance;
use biharmonic::extraction::FitModel;
use biharmonic::report::{ratio_table_csv, report_json, reports_csv, run_case, sweep_json, CaseReport, CaseSpec, Verdict};
use biharmonic::sweep::{parse_real, run_sweep, SweepConfig};
use biharmonic::{OriginData, Problem};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Radial solutions of Δ²u = u^alpha: integrate from origin data and check
/// the growth law at infinity.
#[derive(Parser, Debug)]
#[command(name = "biharmonic", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    case: CaseArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every case of a sweep config (flat `key = value` lines).
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance criteria and print one line per criterion.
    Acceptance,
}

#[derive(Args, Debug)]
struct CaseArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Exponent; fractions like -1/3 are accepted.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    u0: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    lap0: String,
    #[arg(long)]
    rmax: Option<String>,
    #[arg(long)]
    rel_tol: Option<String>,
    #[arg(long)]
    abs_tol: Option<String>,
    #[arg(long, value_enum)]
    fit: Option<Fit>,
    /// Cross-check against the Picard oracle on [0, 5].
    #[arg(long)]
    oracle: bool,
    /// Exit 1 when the estimate misses its band.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the (r, u/f) table as CSV.
    #[arg(long)]
    ratio_table: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Fit {
    Last,
    Invlog,
    Power,
    Aitken,
}

impl From<Fit> for FitModel {
    fn from(f: Fit) -> Self {
        match f {
            Fit::Last => FitModel::LastValue,
            Fit::Invlog => FitModel::InverseLogFit,
            Fit::Power => FitModel::PowerCorrectionFit,
            Fit::Aitken => FitModel::AitkenAccel,
        }
    }
}

const USAGE: u8 = 2;

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(USAGE)
}

fn real(name: &str, s: &str) -> Result<f64, String> {
    parse_real(s).ok_or_else(|| format!("--{name}: `{s}` is not a number"))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_single(a: &CaseArgs) -> ExitCode {
    let (Some(n), Some(alpha)) = (a.n, a.alpha.as_deref()) else {
        return usage("--n and --alpha are required (or use `sweep` / `acceptance`)");
    };
    let parsed = (|| -> Result<CaseSpec<f64>, String> {
        let problem = Problem::new(n, real("alpha", alpha)?).map_err(|e| e.to_string())?;
        let origin = OriginData::new(real("u0", &a.u0)?, real("lap0", &a.lap0)?).map_err(|e| e.to_string())?;
        let opt = |name: &str, v: &Option<String>| v.as_deref().map(|s| real(name, s)).transpose();
        let mut spec = CaseSpec::new(problem, origin);
        spec.rmax = opt("rmax", &a.rmax)?;
        spec.rel_tol = opt("rel-tol", &a.rel_tol)?;
        spec.abs_tol = opt("abs-tol", &a.abs_tol)?;
        spec.fit = a.fit.map(Into::into);
        spec.oracle = a.oracle;
        Ok(spec)
    })();
    let spec = match parsed {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let (report, ratios) = match run_case(&spec) {
        Ok(run) => (run.report, run.ratios),
        Err(e) => (CaseReport::refused(spec.problem, spec.origin, &e), Vec::new()),
    };
    let report = &report;
    let text = match a.format {
        Format::Json => report_json(report) + "\n",
        Format::Csv => match reports_csv(std::slice::from_ref(report)) {
            Ok(t) => t,
            Err(e) => return usage(e),
        },
    };
    if let Err(e) = emit(&a.out, &text) {
        return usage(e);
    }
    if let (Some(p), false) = (&a.ratio_table, ratios.is_empty()) {
        if let Err(e) = std::fs::write(p, ratio_table_csv(&ratios)) {
            return usage(format!("{}: {e}", p.display()));
        }
    }
    for note in &report.notes {
        eprintln!("note: {note}");
    }
    let code = match report.verdict {
        Verdict::VerificationFailed if !a.verify => 0,
        v => v.exit_code(),
    };
    ExitCode::from(code as u8)
}

fn run_sweep_cmd(config: &PathBuf, jobs: usize, format: Format, out: &Option<PathBuf>) -> ExitCode {
    let text = match std::fs::read_to_string(config) {
        Ok(t) => t,
        Err(e) => return usage(format!("{}: {e}", config.display())),
    };
    let cfg = match SweepConfig::<f64>::parse(&text) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if jobs == 0 {
        return usage("--jobs must be at least 1");
    }
    let reports = match run_sweep(&cfg, jobs) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let body = match format {
        Format::Json => sweep_json(&reports) + "\n",
        Format::Csv => match reports_csv(&reports) {
            Ok(t) => t,
            Err(e) => return usage(e),
        },
    };
    if let Err(e) = emit(out, &body) {
        return usage(e);
    }
    let failed = reports.iter().filter(|r| r.verdict != Verdict::Verified).count();
    if failed > 0 {
        eprintln!("{failed} of {} cases failed", reports.len());
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Some(Command::Sweep { config, jobs, format, out }) => run_sweep_cmd(config, *jobs, *format, out),
        Some(Command::Acceptance) => {
            let results = acceptance::run_all();
            for r in &results {
                println!("{}", r.line());
            }
            if results.iter().all(|r| r.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        None => run_single(&cli.case),
    }
}
