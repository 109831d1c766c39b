//! Command line front end.
//!
//! Exit codes: 0 on success, 1 when a checked property fails, 2 for input
//! errors. The worker thread count follows `RAYON_NUM_THREADS`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::aberg::{self, AbergConfig};
use crate::clocknet::{self, Rule, ScenarioFile};
use crate::error::{Error, Result};
use crate::io::{self, fmt12, MatrixFile};
use crate::monotone::{builtin, MonotoneFunction, TableFunction, TableSpec};
use crate::qmat::{embed_local_observables, Observable, SubsystemLayout};
use crate::skew::skew_info;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "skew-info", version, about = "Skew information asymmetry toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct FunctionArgs {
    /// `WY`, `SLD`, `WYD`, or a path to a JSON table `{name, f0, samples}`
    #[arg(long = "f", default_value = "WY")]
    pub f: String,
    /// WYD parameter in (0, 1)
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl FunctionArgs {
    pub fn resolve(&self) -> Result<MonotoneFunction> {
        if self.f.ends_with(".json") || Path::new(&self.f).is_file() {
            let spec: TableSpec = serde_json::from_str(&io::read_to_string(Path::new(&self.f))?)?;
            return MonotoneFunction::from_table(TableFunction::new(spec)?);
        }
        builtin(&self.f, self.alpha)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Skew information of a state file with respect to an observable file
    Skew {
        state: PathBuf,
        observable: PathBuf,
        #[command(flatten)]
        f: FunctionArgs,
        /// Also write the JSON record here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-qubit superadditivity gap against the ladder width M, as CSV
    Fig1 {
        #[arg(long, default_value_t = 1)]
        m_min: usize,
        #[arg(long, default_value_t = 50)]
        m_max: usize,
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized property suites, JSON report
    Verify {
        /// axioms, monotonicity, convexity, additivity, weak-superadditivity,
        /// aberg, clocks or all
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = verify::DEFAULT_COUNT)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluates a clock request scenario
    Clock {
        scenario: PathBuf,
        /// naive, conservative or scaled:<c>; overrides the file's rule
        #[arg(long)]
        rule: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense simulation of the catalytic protocol with a Hadamard target
    AbergRun {
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Target unitary as a matrix file instead of the Hadamard gate
        #[arg(long)]
        unitary: Option<PathBuf>,
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum of marginals against the global value for growing N
    Multipartite {
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 48)]
        n_max: usize,
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Skew {
            state,
            observable,
            f,
            out,
        } => cmd_skew(&state, &observable, &f.resolve()?, out.as_deref(), stdout),
        Command::Fig1 { m_min, m_max, f, out } => cmd_fig1(m_min, m_max, &f.resolve()?, out.as_deref(), stdout),
        Command::Verify {
            suite,
            seed,
            count,
            out,
        } => cmd_verify(&suite, seed, count, out.as_deref(), stdout),
        Command::Clock { scenario, rule, out } => cmd_clock(&scenario, rule.as_deref(), out.as_deref(), stdout),
        Command::AbergRun { m, n, unitary, f, out } => {
            let u = match unitary {
                Some(path) => io::parse_matrix(&io::read_to_string(&path)?)?,
                None => aberg::hadamard(),
            };
            cmd_aberg_run(u, n, m, &f.resolve()?, out.as_deref(), stdout)
        }
        Command::Multipartite { m, n_max, f, out } => {
            let report = aberg::multipartite_violation(&aberg::hadamard(), m, &f.resolve()?, n_max)?;
            emit_json(&report, out.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SkewRecord {
    f_id: String,
    value: f64,
    rank: usize,
}

pub fn cmd_skew(
    state: &Path,
    observable: &Path,
    f: &MonotoneFunction,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let rho = io::parse_density(&io::read_to_string(state)?)?;
    let h = io::parse_observable(&io::read_to_string(observable)?)?;
    let result = skew_info(&rho, &h, f)?;
    writeln!(stdout, "{}", fmt12(result.value))?;
    let record = SkewRecord {
        f_id: result.f_id,
        value: result.value,
        rank: result.rank,
    };
    writeln!(stdout, "{}", serde_json::to_string(&record)?)?;
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(&record)? + "\n")?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_fig1(
    m_min: usize,
    m_max: usize,
    f: &MonotoneFunction,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    if m_min < 1 || m_min > m_max {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= m_min <= m_max, got {m_min}..{m_max}"
        )));
    }
    let rows = aberg::fig1_sweep(m_min..=m_max, f)?;
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            io::write_fig1_csv(&mut w, &rows)?;
            w.flush()?;
        }
        None => io::write_fig1_csv(&mut *stdout, &rows)?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(suite: &str, seed: u64, count: usize, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let report = verify::run(suite, seed, count)?;
    emit_json(&report, out, stdout)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_PROPERTY })
}

pub fn cmd_clock(scenario: &Path, rule: Option<&str>, out: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let file = ScenarioFile::parse(&io::read_to_string(scenario)?)?;
    let rule = match rule {
        Some(r) => r.parse()?,
        None => file.rule()?.unwrap_or(Rule::Conservative),
    };
    let record = clocknet::evaluate_decision(&file.scenario()?, rule)?;
    emit_json(&record, out, stdout)?;
    // an unsound conservative request would contradict weak superadditivity
    Ok(if rule == Rule::Conservative && !record.sound {
        EXIT_PROPERTY
    } else {
        EXIT_OK
    })
}

#[derive(Debug, Serialize)]
struct AbergRecord {
    d: usize,
    n: usize,
    m: usize,
    f_id: String,
    global: f64,
    locals: Vec<f64>,
    gap: f64,
    catalytic_max_diff: f64,
    reduced_channel_max_diff: f64,
    system: MatrixFile,
}

pub fn cmd_aberg_run(
    u: crate::qmat::CMatrix,
    n: usize,
    m: usize,
    f: &MonotoneFunction,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let cfg = AbergConfig::new(u.clone(), n, m, 0)?;
    let run = aberg::run_protocol(&cfg)?;
    let d = cfg.d();
    let h_list = vec![Observable::number(d); n];
    let layout = SubsystemLayout::uniform(d, n)?;
    let global = skew_info(&run.system, &embed_local_observables(&h_list, &layout)?, f)?.value;
    let locals = run
        .marginals
        .iter()
        .map(|r| Ok(skew_info(r, &h_list[0], f)?.value))
        .collect::<Result<Vec<_>>>()?;
    let catalytic_max_diff = run
        .steps
        .iter()
        .map(|s| s.ancilla_moments.max_abs_diff(&run.initial_moments))
        .fold(0.0, f64::max);
    let predicted = aberg::reduced_channel(&u, &run.initial_moments)?.ground_output()?;
    let reduced_channel_max_diff = run
        .marginals
        .iter()
        .map(|r| crate::qmat::max_abs(&(r.matrix() - predicted.matrix())))
        .fold(0.0, f64::max);
    let record = AbergRecord {
        d,
        n,
        m,
        f_id: f.id().to_string(),
        gap: global - locals.iter().sum::<f64>(),
        global,
        locals,
        catalytic_max_diff,
        reduced_channel_max_diff,
        system: MatrixFile::from_matrix(run.system.matrix()),
    };
    emit_json(&record, out, stdout)?;
    Ok(EXIT_OK)
}
