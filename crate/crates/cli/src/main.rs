use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qswitch::entanglement::{bell_fidelity, concurrence, BellState};
use qswitch::matquant::DensityMatrix;
use qswitch::protocol::{check_table1, run_protocol, GCurve, GForm, ProtocolParams, Table1Row};
use qswitch::sweep::{format_sig17, run_sweep, spearman, write_csv, Horizon, SweepConfig};
use qswitch::switch::Sign;
use serde::{Serialize, Serializer};

mod exit {
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const EMPTY_BRANCH: u8 = 3;
    pub const IO: u8 = 4;
}

const CHECK_TOL: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    EmptyBranch(qswitch::Error),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error("{0}")]
    Simulation(qswitch::Error),
    #[error("{0}")]
    ChecksFailed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::EmptyBranch(_) => exit::EMPTY_BRANCH,
            CliError::Io { .. } => exit::IO,
            CliError::Simulation(_) | CliError::ChecksFailed(_) => exit::CHECK_FAILED,
        }
    }
}

impl From<qswitch::Error> for CliError {
    fn from(e: qswitch::Error) -> Self {
        match e {
            qswitch::Error::EmptyBranch { .. } => CliError::EmptyBranch(e),
            qswitch::Error::InvalidConfig(_) | qswitch::Error::Precondition(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Simulation(other),
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

#[derive(Parser, Debug)]
#[command(name = "qswitch", version, about = "Entanglement generation through a quantum switch")]
struct Cli {
    /// Output format for standard output.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Initial {
    #[value(name = "00")]
    Zero0,
    #[value(name = "01")]
    Zero1,
    #[value(name = "10")]
    One0,
    #[value(name = "11")]
    One1,
}

impl Initial {
    fn bits(self) -> &'static str {
        match self {
            Initial::Zero0 => "00",
            Initial::Zero1 => "01",
            Initial::One0 => "10",
            Initial::One1 => "11",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

/// Checks `run` can evaluate on the post-selected state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Check {
    /// Concurrence equals 1.
    MaximalEntanglement,
    /// Fidelity 1 with (|00>+|11>)/sqrt2.
    PhiPlus,
    /// Fidelity 1 with (|00>-|11>)/sqrt2.
    PhiMinus,
    /// Fidelity 1 with (|01>+|10>)/sqrt2.
    PsiPlus,
    /// Fidelity 1 with (|01>-|10>)/sqrt2.
    PsiMinus,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::MaximalEntanglement => "maximal-entanglement",
            Check::PhiPlus => "phi-plus",
            Check::PhiMinus => "phi-minus",
            Check::PsiPlus => "psi-plus",
            Check::PsiMinus => "psi-minus",
        }
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x = finite(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("{s} must be positive"))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the protocol once and post-select the control.
    Run {
        #[arg(long, default_value_t = 0.5, value_parser = finite, allow_hyphen_values = true)]
        omega_z: f64,
        #[arg(long, default_value_t = 1.0, value_parser = finite, allow_hyphen_values = true)]
        chi_ma: f64,
        #[arg(long, default_value_t = 1.0, value_parser = finite, allow_hyphen_values = true)]
        chi_nb: f64,
        /// Total switch time; each channel runs for t/2.
        #[arg(long, default_value_t = 2.0, value_parser = finite, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum, default_value = "00")]
        initial: Initial,
        #[arg(long, value_enum, default_value_t = SignArg::Minus)]
        sign: SignArg,
        /// Pass/fail checks on the post-selected state (repeatable).
        #[arg(long = "check", value_enum)]
        checks: Vec<Check>,
    },
    /// Closed-form success probability against the simulator (R = 1, |00>).
    Gcurve {
        #[arg(long, default_value_t = 0.5, value_parser = finite, allow_hyphen_values = true)]
        omega_z: f64,
        #[arg(long, default_value_t = 1.0, value_parser = finite, allow_hyphen_values = true)]
        chi_ma: f64,
        #[arg(long, default_value_t = 40.0, value_parser = positive)]
        t_max: f64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
        points: u32,
        /// Evaluate the expression in its as-printed form instead of the corrected one.
        #[arg(long)]
        as_printed: bool,
        /// Also write the closed-form discrepancy report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Verify the four rows of the maximal-entanglement condition table.
    Table1 {
        /// Force this coupling ratio on every row instead of the row's own.
        #[arg(long, value_parser = finite, allow_hyphen_values = true)]
        ratio: Option<f64>,
        #[arg(long, default_value_t = 0.5, value_parser = finite, allow_hyphen_values = true)]
        omega_z: f64,
        #[arg(long, default_value_t = 1.0, value_parser = finite, allow_hyphen_values = true)]
        chi: f64,
        #[arg(long, default_value_t = 2.0, value_parser = finite, allow_hyphen_values = true)]
        t: f64,
    },
    /// Sweep the (R, K) plane and write the results as CSV.
    Sweep {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(2..))]
        grid_n: u32,
        #[arg(long, default_value_t = 0.5, value_parser = finite, allow_hyphen_values = true)]
        omega_z: f64,
        /// Fixed time horizon; by default 8*pi/min(|omega_z|, Theta) per point.
        #[arg(long, value_parser = positive)]
        t_max: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        workers: Option<u32>,
    },
}

/// `f64` serialized with 17 significant digits.
#[derive(Clone, Copy, Debug)]
struct Sig17(f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let n: serde_json::Number = format_sig17(self.0)
            .parse()
            .map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

impl std::fmt::Display for Sig17 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(&format_sig17(self.0))
    }
}

#[derive(Serialize)]
struct Params {
    omega_z: Sig17,
    chi_ma: Sig17,
    chi_nb: Sig17,
    t: Sig17,
}

impl From<&ProtocolParams> for Params {
    fn from(p: &ProtocolParams) -> Self {
        Self {
            omega_z: Sig17(p.omega_z),
            chi_ma: Sig17(p.chi_ma),
            chi_nb: Sig17(p.chi_nb),
            t: Sig17(p.t),
        }
    }
}

#[derive(Serialize)]
struct CheckResult {
    name: &'static str,
    value: Sig17,
    passed: bool,
}

#[derive(Serialize)]
struct RunReport {
    params: Params,
    initial: &'static str,
    sign: &'static str,
    probability: Sig17,
    /// Row-major entries of the normalized reduced state.
    reduced_state_re: Vec<Sig17>,
    reduced_state_im: Vec<Sig17>,
    concurrence: Sig17,
    checks: Vec<CheckResult>,
}

fn emit_json(value: &impl Serialize) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| CliError::Io {
            context: "writing JSON".into(),
            source: e.into(),
        })?;
    writeln!(out).map_err(io_err("writing to stdout"))
}

fn cmd_run(
    format: Format,
    params: ProtocolParams,
    initial: Initial,
    sign: SignArg,
    checks: &[Check],
) -> Result<(), CliError> {
    let rho = DensityMatrix::from_bits(initial.bits())?;
    let outcome = run_protocol(&params, &rho, sign.into())?;
    let state = &outcome.reduced_state;
    let c = concurrence(state)?.value;
    let mut results = Vec::new();
    for &check in checks {
        let (value, passed) = match check {
            Check::MaximalEntanglement => (c, c >= 1.0 - CHECK_TOL),
            bell => {
                let target = match bell {
                    Check::PhiPlus => BellState::PhiPlus,
                    Check::PhiMinus => BellState::PhiMinus,
                    Check::PsiPlus => BellState::PsiPlus,
                    _ => BellState::PsiMinus,
                };
                let f = bell_fidelity(state, &target.ket())?;
                (f, (f - 1.0).abs() <= CHECK_TOL)
            }
        };
        results.push(CheckResult {
            name: check.name(),
            value: Sig17(value),
            passed,
        });
    }
    let entries = state.matrix().entries_row_major();
    let report = RunReport {
        params: (&params).into(),
        initial: initial.bits(),
        sign: Sign::from(sign).as_str(),
        probability: Sig17(outcome.probability),
        reduced_state_re: entries.iter().map(|z| Sig17(z.re)).collect(),
        reduced_state_im: entries.iter().map(|z| Sig17(z.im)).collect(),
        concurrence: Sig17(c),
        checks: results,
    };
    match format {
        Format::Json => emit_json(&report)?,
        Format::Text => {
            let p = &report.params;
            println!(
                "omega_z = {}, chi_ma = {}, chi_nb = {}, t = {}, initial |{}>, sign {}",
                p.omega_z, p.chi_ma, p.chi_nb, p.t, report.initial, report.sign
            );
            println!("probability  {}", report.probability);
            println!("concurrence  {}", report.concurrence);
            println!("reduced state (re, im), row-major:");
            for row in 0..4 {
                let cells: Vec<String> = (0..4)
                    .map(|col| {
                        let k = 4 * row + col;
                        format!("({}, {})", report.reduced_state_re[k], report.reduced_state_im[k])
                    })
                    .collect();
                println!("  {}", cells.join("  "));
            }
            for r in &report.checks {
                println!("check {} [{}] {}", r.name, if r.passed { "PASS" } else { "FAIL" }, r.value);
            }
        }
    }
    let failed: Vec<&str> = report.checks.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(format!("failed checks: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct GRow {
    t: Sig17,
    g: Sig17,
    p_sim: Sig17,
    abs_diff: Sig17,
}

#[derive(Serialize)]
struct GReport {
    omega_z: Sig17,
    chi_ma: Sig17,
    form: &'static str,
    max_abs_diff: Sig17,
    rows: Vec<GRow>,
}

fn cmd_gcurve(
    format: Format,
    omega_z: f64,
    chi_ma: f64,
    t_max: f64,
    points: usize,
    form: GForm,
    report_path: Option<PathBuf>,
) -> Result<(), CliError> {
    let curve = GCurve::compute(omega_z, chi_ma, t_max, points)?;
    if let Some(path) = report_path {
        std::fs::write(&path, curve.discrepancy_report())
            .map_err(io_err(format!("writing {}", path.display())))?;
    }
    let rows: Vec<GRow> = curve
        .points
        .iter()
        .map(|p| {
            let g = match form {
                GForm::AsPrinted => p.as_printed,
                GForm::Corrected => p.corrected,
            };
            GRow {
                t: Sig17(p.t),
                g: Sig17(g),
                p_sim: Sig17(p.simulated),
                abs_diff: Sig17((g - p.simulated).abs()),
            }
        })
        .collect();
    let report = GReport {
        omega_z: Sig17(omega_z),
        chi_ma: Sig17(chi_ma),
        form: match form {
            GForm::AsPrinted => "as-printed",
            GForm::Corrected => "corrected",
        },
        max_abs_diff: Sig17(curve.max_abs_diff(form)),
        rows,
    };
    match format {
        Format::Json => emit_json(&report),
        Format::Text => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            let w = io_err("writing to stdout");
            (|| {
                writeln!(out, "# form {}, max abs_diff {}", report.form, report.max_abs_diff)?;
                writeln!(out, "{:>24} {:>24} {:>24} {:>24}", "t", "G", "P_sim", "abs_diff")?;
                for r in &report.rows {
                    writeln!(out, "{:>24} {:>24} {:>24} {:>24}", r.t, r.g, r.p_sim, r.abs_diff)?;
                }
                out.flush()
            })()
            .map_err(w)
        }
    }
}

#[derive(Serialize)]
struct RowResult {
    row: String,
    initial: &'static str,
    ratio: Sig17,
    passed: bool,
    probability: Option<Sig17>,
    concurrence: Option<Sig17>,
    phi: Option<Sig17>,
    failures: Vec<String>,
}

fn cmd_table1(format: Format, ratio: Option<f64>, omega_z: f64, chi: f64, t: f64) -> Result<(), CliError> {
    let mut results = Vec::new();
    let mut lines = Vec::new();
    for row in Table1Row::ALL {
        let params = match ratio {
            Some(r) => ProtocolParams::new(omega_z, chi, chi / r, t),
            None => row.params(omega_z, chi, t),
        };
        match check_table1(&row, &params) {
            Ok(report) => {
                lines.push(report.summary());
                results.push(RowResult {
                    row: row.label.to_string(),
                    initial: row.initial,
                    ratio: Sig17(row.ratio),
                    passed: report.passed(),
                    probability: Some(Sig17(report.probability)),
                    concurrence: Some(Sig17(report.concurrence)),
                    phi: report.phase.map(Sig17),
                    failures: report.failures,
                });
            }
            Err(e @ (qswitch::Error::Precondition(_) | qswitch::Error::EmptyBranch { .. })) => {
                lines.push(format!("row {} [FAIL] {e}", row.label));
                results.push(RowResult {
                    row: row.label.to_string(),
                    initial: row.initial,
                    ratio: Sig17(row.ratio),
                    passed: false,
                    probability: None,
                    concurrence: None,
                    phi: None,
                    failures: vec![e.to_string()],
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    match format {
        Format::Json => emit_json(&results)?,
        Format::Text => {
            for l in &lines {
                println!("{l}");
            }
            println!("{passed}/{} rows pass", results.len());
        }
    }
    if passed == results.len() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(format!("{} of {} rows failed", results.len() - passed, results.len())))
    }
}

#[derive(Serialize)]
struct SweepSummary {
    out: String,
    rows: usize,
    degenerate: usize,
    stripe_r: Option<Sig17>,
    stripe_min_concurrence: Option<Sig17>,
    spearman_p_c: Sig17,
}

fn cmd_sweep(format: Format, out: PathBuf, config: SweepConfig) -> Result<(), CliError> {
    config.validate()?;
    // Open before the sweep so an unwritable path fails fast.
    let file = File::create(&out).map_err(io_err(format!("creating {}", out.display())))?;
    let records = run_sweep(&config)?;
    write_csv(&records, BufWriter::new(file)).map_err(io_err(format!("writing {}", out.display())))?;

    let stripe_r = config
        .r_values()
        .into_iter()
        .min_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()));
    let stripe_min = stripe_r.map(|r0| {
        records
            .iter()
            .filter(|r| r.r == r0)
            .map(|r| r.concurrence_at_t_star)
            .fold(f64::MAX, f64::min)
    });
    let p: Vec<f64> = records.iter().map(|r| r.p_star).collect();
    let c: Vec<f64> = records.iter().map(|r| r.concurrence_at_t_star).collect();
    let summary = SweepSummary {
        out: out.display().to_string(),
        rows: records.len(),
        degenerate: records.iter().filter(|r| r.t_star.is_none()).count(),
        stripe_r: stripe_r.map(Sig17),
        stripe_min_concurrence: stripe_min.map(Sig17),
        spearman_p_c: Sig17(spearman(&p, &c)),
    };
    match format {
        Format::Json => emit_json(&summary),
        Format::Text => {
            println!("wrote {} rows to {}", summary.rows, summary.out);
            if summary.degenerate > 0 {
                println!("degenerate points: {}", summary.degenerate);
            }
            if let (Some(r), Some(c)) = (summary.stripe_r, summary.stripe_min_concurrence) {
                println!("min concurrence at R = {r}: {c}");
            }
            println!("spearman(p_star, concurrence) = {}", summary.spearman_p_c);
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let format = cli.format;
    match cli.command {
        Command::Run {
            omega_z,
            chi_ma,
            chi_nb,
            t,
            initial,
            sign,
            checks,
        } => cmd_run(format, ProtocolParams::new(omega_z, chi_ma, chi_nb, t), initial, sign, &checks),
        Command::Gcurve {
            omega_z,
            chi_ma,
            t_max,
            points,
            as_printed,
            report,
        } => {
            let form = if as_printed { GForm::AsPrinted } else { GForm::Corrected };
            cmd_gcurve(format, omega_z, chi_ma, t_max, points as usize, form, report)
        }
        Command::Table1 { ratio, omega_z, chi, t } => cmd_table1(format, ratio, omega_z, chi, t),
        Command::Sweep {
            out,
            grid_n,
            omega_z,
            t_max,
            workers,
        } => {
            let config = SweepConfig {
                omega_z,
                grid_n: grid_n as usize,
                horizon: t_max.map_or(Horizon::default(), Horizon::Fixed),
                workers: workers.map(|w| w as usize),
                ..SweepConfig::default()
            };
            cmd_sweep(format, out, config)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
