//! `fracsis` command line tool.
//!
//! Exit codes: 0 on success, 1 for invalid input or IO failures, 2 when the
//! numerics fail (overflow, non-convergence).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracsis::coeffs::{self, RecursionForm};
use fracsis::model::population_nt;
use fracsis::Method;
use fracsis_harness::config::{read_raw, resolve, Format, RawConfig};
use fracsis_harness::emit::{self, c0_summary_text, table1_text};
use fracsis_harness::runs::{self, C0_ALPHAS, TABLE1_ALPHAS};
use fracsis_harness::{HarnessError, Result};

#[derive(Parser, Debug)]
#[command(
    name = "fracsis",
    version,
    about = "Fractional SIS model: series solutions, PECE and L1 schemes"
)]
struct Cli {
    /// Suppress the summary printed to stdout.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a coefficient table as CSV (`k,value`).
    Coeffs(CoeffsArgs),
    /// Run a single method and write its trajectory.
    Solve {
        #[arg(long)]
        method: Method,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Run every configured method and report pairwise max-norm distances.
    Compare {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Series vs PECE vs L1 on the c-nonzero preset for alpha 0.99, 0.7, 0.3.
    Table1(SuiteArgs),
    /// Series, PECE and L1 on the c-zero preset for alpha 0.99, 0.7, 0.5.
    #[command(name = "c0-suite")]
    C0Suite(SuiteArgs),
    /// Total population N(t) = N0 E_alpha((lambda - mu) t^alpha) as CSV (`t,N`).
    Population {
        #[arg(long, default_value_t = 1.0)]
        n0: f64,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Kind {
    /// alpha-Euler numbers (c != 0 series).
    Euler,
    /// A-coefficients (c = 0 series).
    A,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Form {
    Beta,
    GammaRatio,
}

#[derive(Args, Debug)]
struct CoeffsArgs {
    #[arg(long, value_enum, default_value_t = Kind::Euler)]
    kind: Kind,
    #[arg(long)]
    alpha: f64,
    /// Highest index K.
    #[arg(long, default_value_t = fracsis_harness::config::DEFAULT_TERMS)]
    terms: usize,
    /// First A-coefficient (A-tables only); defaults to 1/2.
    #[arg(long)]
    a0: Option<f64>,
    #[arg(long, value_enum, default_value_t = Form::Beta)]
    form: Form,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma separated subset of csv,json,svg.
    #[arg(long, value_delimiter = ',')]
    formats: Option<Vec<String>>,
}

/// Flags mirroring the config keys; they override `--config`.
#[derive(Args, Debug, Default)]
struct ConfigArgs {
    /// TOML config or a manifest.json from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// c-nonzero or c-zero.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, alias = "I0")]
    i0: Option<f64>,
    /// Final time.
    #[arg(long = "T", alias = "t-final")]
    t_final: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Comma separated subset of series,pece,l1,classical.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Highest series index.
    #[arg(long)]
    terms: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma separated subset of csv,json,svg.
    #[arg(long, value_delimiter = ',')]
    formats: Option<Vec<String>>,
}

impl ConfigArgs {
    fn raw(self) -> Result<RawConfig> {
        let base = match &self.config {
            Some(path) => read_raw(path)?,
            None => RawConfig::default(),
        };
        Ok(base.merged(RawConfig {
            preset: self.preset,
            beta: self.beta,
            gamma: self.gamma,
            mu: self.mu,
            lambda: self.lambda,
            alpha: self.alpha,
            i0: self.i0,
            t_final: self.t_final,
            dt: self.dt,
            methods: self.methods,
            terms: self.terms,
            out: self.out,
            formats: self.formats,
        }))
    }
}

fn formats(list: Option<Vec<String>>) -> Result<BTreeSet<Format>> {
    match list {
        Some(items) => items.iter().map(|s| s.parse()).collect(),
        None => Ok([Format::Csv, Format::Json].into_iter().collect()),
    }
}

fn report_written(quiet: bool, files: &[PathBuf]) {
    if !quiet {
        for f in files {
            println!("wrote {}", f.display());
        }
    }
}

fn warn_divergence(out: &runs::RunOutput) {
    if let Some(tr) = out.trajectory(Method::Series) {
        if let Some(t) = tr.first_divergence() {
            eprintln!(
                "warning: series did not converge from t = {t} on; values there are partial sums"
            );
        }
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
            }
            std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Coeffs(a) => {
            let form = match a.form {
                Form::Beta => RecursionForm::Beta,
                Form::GammaRatio => RecursionForm::GammaRatio,
            };
            let table = match (a.kind, a.a0) {
                (Kind::Euler, None) => coeffs::euler_alpha_with(a.alpha, a.terms, form)?,
                (Kind::Euler, Some(_)) => {
                    return Err(HarnessError::Validation(
                        "--a0 applies to A-tables only".into(),
                    ))
                }
                (Kind::A, None) => coeffs::a_coeffs_with(a.alpha, a.terms, form)?,
                (Kind::A, Some(a0)) => coeffs::a_coeffs_from_initial(a.alpha, a0, a.terms)?,
            };
            let mut s = String::from("k,value\n");
            for (k, v) in table.values().iter().enumerate() {
                let _ = writeln!(s, "{k},{v:.16e}");
            }
            write_or_print(a.out.as_deref(), &s)
        }
        Command::Solve { method, cfg } => {
            let mut raw = cfg.raw()?;
            raw.methods = Some(vec![method.name().to_string()]);
            let cfg = resolve(raw)?;
            let out = runs::run_config(&cfg)?;
            warn_divergence(&out);
            report_written(quiet, &emit::emit(&out, "solve")?);
            Ok(())
        }
        Command::Compare { cfg } => {
            let cfg = resolve(cfg.raw()?)?;
            let out = runs::run_config(&cfg)?;
            warn_divergence(&out);
            if !quiet {
                for p in &out.report.pairs {
                    println!("{:>9} vs {:<9} {:.3e}", p.a.name(), p.b.name(), p.linf);
                }
            }
            report_written(quiet, &emit::emit(&out, "compare")?);
            Ok(())
        }
        Command::Table1(a) => {
            let outputs = runs::run_table1(&TABLE1_ALPHAS)?;
            let dir = a.out.unwrap_or_else(|| PathBuf::from("fracsis-out/table1"));
            let files = emit::emit_table1(&outputs, &dir, &formats(a.formats)?)?;
            if !quiet {
                print!("{}", table1_text(&outputs));
            }
            report_written(quiet, &files);
            Ok(())
        }
        Command::C0Suite(a) => {
            let suite = runs::run_c0_suite(&C0_ALPHAS)?;
            let dir = a
                .out
                .unwrap_or_else(|| PathBuf::from("fracsis-out/c0-suite"));
            let files = emit::emit_c0(&suite, &dir, &formats(a.formats)?)?;
            if !quiet {
                print!("{}", c0_summary_text(&suite));
            }
            report_written(quiet, &files);
            Ok(())
        }
        Command::Population { n0, cfg } => {
            let mut raw = cfg.raw()?;
            // every method is valid for N(t); avoid validating series hypotheses
            raw.methods = Some(vec![Method::Classical.name().to_string()]);
            let out_dir = raw.out.clone();
            let cfg = resolve(raw)?;
            let mut s = String::from("t,N\n");
            for t in cfg.grid.nodes() {
                let _ = writeln!(s, "{t:.16e},{:.16e}", population_nt(&cfg.params, n0, t)?);
            }
            let path = out_dir.map(|d| d.join(format!("population_alpha{}.csv", cfg.params.alpha)));
            write_or_print(path.as_deref(), &s)?;
            if let (Some(p), false) = (path, quiet) {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
