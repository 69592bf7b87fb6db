//! `isopar`: runs the verification suites and prints a JSON report.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 on
//! usage or construction errors. The report is well-formed JSON in all three
//! cases.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isopar::clifford::{ComplexTag, Construction};
use isopar::polyfam::{FamilyDescriptor, FamilyKind};
use isopar::report::SuiteReport;
use isopar::suite::{self, SuiteOutput};
use isopar::Error;

const SEED_ENV: &str = "ISOPAR_SEED";

const AFTER_HELP: &str = "\
CSV side files (--csv PREFIX writes PREFIX_<name>.csv, floats with 17 significant digits):
  alpha-scan  PREFIX_alpha.csv       index, t, alpha, omega, l
  riccati     PREFIX_trajectory.csv  t, mu1..mun, Q1..Qn, H
  spectrum    PREFIX_recurrence.csv  t, Q0..Q6, rhobar0..rhobar6

Environment:
  ISOPAR_SEED  overrides --seed when set";

#[derive(Parser, Debug)]
#[command(name = "isopar", version, about = "Numerical verification suites for isoparametric polynomials", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Prefix for CSV side files.
    #[arg(long, global = true)]
    csv: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cartan–Münzner and transnormal residuals.
    VerifyCm {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Higher Laplacians and power-sum identities of the Hessian.
    VerifyHidden {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Orders to check.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        k: Vec<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The alpha invariant and Omega_F under a complex structure.
    AlphaScan {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long = "J", value_enum, default_value = "block")]
        j: JArg,
        /// Levels of F on the sphere.
        #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
        level: Vec<f64>,
    },
    /// Riccati evolution of principal curvatures.
    Riccati {
        /// One value (space form), two (rank-one structure) or n values.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        kappa: Vec<f64>,
        /// Multiplicity of the second Jacobi eigenvalue (1, 3 or 7).
        #[arg(long)]
        mult: Option<usize>,
        /// Initial principal curvatures.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        mu0: Vec<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Shape spectra on a level and the power-sum recurrences.
    Spectrum {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        level: f64,
    },
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Clifford order (fkm) or algebra dimension (cartan).
    #[arg(long)]
    m: Option<usize>,
    /// Half the ambient dimension (fkm) or number of extra quaternion blocks (ot).
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Args, Debug)]
struct SamplingArgs {
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Cartan,
    Fkm,
    Ot,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum JArg {
    Block,
    RightI,
    LeftI,
}

impl From<JArg> for ComplexTag {
    fn from(j: JArg) -> Self {
        match j {
            JArg::Block => ComplexTag::BlockStandard,
            JArg::RightI => ComplexTag::RightMultI,
            JArg::LeftI => ComplexTag::LeftMultI,
        }
    }
}

fn usage(detail: String) -> Error {
    Error::Construction(detail)
}

impl FamilyArgs {
    fn descriptor(&self) -> Result<FamilyDescriptor, Error> {
        match self.family {
            FamilyArg::Cartan => Ok(FamilyDescriptor {
                family: FamilyKind::Cartan,
                m: self.m.ok_or_else(|| usage("--family cartan needs --m".into()))?,
                r: None,
                construction: None,
            }),
            FamilyArg::Fkm => Ok(FamilyDescriptor {
                family: FamilyKind::Fkm,
                m: self.m.ok_or_else(|| usage("--family fkm needs --m".into()))?,
                r: Some(self.r.ok_or_else(|| usage("--family fkm needs --r".into()))?),
                construction: Some(Construction::StandardBlock),
            }),
            FamilyArg::Ot => {
                if self.m.is_some_and(|m| m != 3) {
                    return Err(usage("--family ot has m = 3".into()));
                }
                Ok(FamilyDescriptor {
                    family: FamilyKind::Fkm,
                    m: 3,
                    r: Some(self.r.unwrap_or(1)),
                    construction: Some(Construction::OzekiTakeuchi),
                })
            }
        }
    }
}

fn effective_seed(flag: u64) -> Result<u64, Error> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))),
        Err(_) => Ok(flag),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::VerifyCm { .. } => "verify-cm",
        Command::VerifyHidden { .. } => "verify-hidden",
        Command::AlphaScan { .. } => "alpha-scan",
        Command::Riccati { .. } => "riccati",
        Command::Spectrum { .. } => "spectrum",
    }
}

fn run(command: &Command) -> Result<SuiteOutput, Error> {
    match command {
        Command::VerifyCm { family, sampling, tol } => {
            suite::cmd_verify_cm(&family.descriptor()?, sampling.samples, effective_seed(sampling.seed)?, *tol)
        }
        Command::VerifyHidden {
            family,
            sampling,
            k,
            tol,
        } => suite::cmd_verify_hidden(
            &family.descriptor()?,
            k,
            sampling.samples,
            effective_seed(sampling.seed)?,
            *tol,
        ),
        Command::AlphaScan {
            family,
            sampling,
            j,
            level,
        } => suite::cmd_alpha_scan(
            &family.descriptor()?,
            (*j).into(),
            level,
            sampling.samples,
            effective_seed(sampling.seed)?,
        ),
        Command::Riccati {
            kappa,
            mult,
            mu0,
            t0,
            t1,
            steps,
        } => suite::cmd_riccati(kappa, *mult, mu0, *t0, *t1, *steps),
        Command::Spectrum {
            family,
            sampling,
            level,
        } => suite::cmd_spectrum(&family.descriptor()?, *level, sampling.samples, effective_seed(sampling.seed)?),
    }
}

fn error_report(command: &str, err: &Error) -> SuiteReport {
    let mut report = SuiteReport::new(command, 0, 0);
    report.fail_with(err);
    report
}

fn emit(report: &SuiteReport, out: Option<&PathBuf>) -> std::io::Result<()> {
    let mut json = serde_json::to_string_pretty(report).expect("reports serialize");
    json.push('\n');
    match out {
        Some(path) => fs::write(path, json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            let report = error_report("usage", &usage(e.kind().to_string()));
            let _ = emit(&report, None);
            return ExitCode::from(2);
        }
    };
    let name = command_name(&cli.command);
    let output = match run(&cli.command) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("isopar {name}: {e}");
            let _ = emit(&error_report(name, &e), cli.out.as_ref());
            return ExitCode::from(2);
        }
    };
    let mut report = output.report;
    if let Some(prefix) = &cli.csv {
        for file in &output.csv {
            let path = format!("{prefix}_{}", file.suffix);
            if let Err(e) = fs::write(&path, &file.content) {
                eprintln!("isopar {name}: cannot write {path}: {e}");
                report.fail_with(&usage(format!("cannot write {path}: {e}")));
            }
        }
    }
    if let Some(err) = &report.error {
        eprintln!("isopar {name}: {err}");
    }
    if let Err(e) = emit(&report, cli.out.as_ref()) {
        eprintln!("isopar {name}: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code() as u8)
}
