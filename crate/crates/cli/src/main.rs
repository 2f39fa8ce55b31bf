use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qbernoulli::arith::rational::parse_rational;
use qbernoulli::bernoulli::BetaKind;
use qbernoulli::output::{
    amn_csv, beta_csv, exit_code, suite_csv, to_json, volkenborn_csv, Format,
    EXIT_ASSERTION_FAILED, EXIT_CONFIG, EXIT_OK,
};
use qbernoulli::suite::{
    cmd_amn, cmd_beta, cmd_volkenborn, run_suites, Integrand, RunConfig, Suite,
};
use qbernoulli::{Error, Result};

/// q-Bernoulli numbers, Volkenborn integrals and p-adic convolution identities.
#[derive(Parser)]
#[command(name = "qbern", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tables of classical, Carlitz and modified q-Bernoulli numbers.
    Beta {
        #[arg(long, default_value = "modified")]
        kind: String,
        #[command(flatten)]
        common: Common,
    },
    /// Riemann sums of a function on Z_p, level by level.
    Volkenborn {
        /// bracket^N for [x]_q^N, or character(L) for q^(L x).
        #[arg(long = "fn", default_value = "bracket^1")]
        function: String,
        #[command(flatten)]
        common: Common,
    },
    /// A_{m,n} by Riemann sums and in closed form.
    Amn {
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification suites.
    Verify {
        /// Comma-separated suite names; all when omitted.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 5)]
    p: u64,
    #[arg(long, default_value = "6")]
    q: String,
    #[arg(long, default_value_t = 8)]
    precision: u32,
    #[arg(long, default_value_t = 4)]
    level: u32,
    #[arg(long, default_value_t = 3)]
    max_m: u32,
    #[arg(long, default_value_t = 3)]
    max_n: u32,
    #[arg(long, default_value = "1/2")]
    real_q: String,
    #[arg(long, default_value_t = 200)]
    terms: u32,
    #[arg(long, default_value = "1/1000000000000")]
    tol: String,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self, suites: &[String]) -> Result<(RunConfig, Format)> {
        let suites = if suites.is_empty() {
            Suite::ALL.to_vec()
        } else {
            suites
                .iter()
                .map(|s| s.trim().parse())
                .collect::<Result<Vec<Suite>>>()?
        };
        let config = RunConfig {
            p: self.p,
            q: parse_rational(&self.q)?,
            precision: self.precision,
            level: self.level,
            max_m: self.max_m,
            max_n: self.max_n,
            real_q: parse_rational(&self.real_q)?,
            terms: self.terms,
            tolerance: parse_rational(&self.tol)?,
            suites,
            ..RunConfig::default()
        };
        Ok((config, self.format.parse()?))
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Beta { kind, common } => {
            let kind: BetaKind = kind.parse()?;
            let (config, format) = common.config(&[])?;
            let rows = cmd_beta(&config, kind, config.max_n as usize)?;
            common.emit(&match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => beta_csv(&rows)?,
            })?;
            Ok(EXIT_OK)
        }
        Command::Volkenborn { function, common } => {
            let f: Integrand = function.parse()?;
            let (config, format) = common.config(&[])?;
            let out = cmd_volkenborn(&config, f)?;
            common.emit(&match format {
                Format::Json => to_json(&out)?,
                Format::Csv => volkenborn_csv(&out)?,
            })?;
            Ok(EXIT_OK)
        }
        Command::Amn { common } => {
            let (config, format) = common.config(&[])?;
            let rows = cmd_amn(&config)?;
            common.emit(&match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => amn_csv(&rows)?,
            })?;
            Ok(if rows.iter().all(|r| r.agrees && r.valuation_ok) {
                EXIT_OK
            } else {
                EXIT_ASSERTION_FAILED
            })
        }
        Command::Verify { suite, common } => {
            let (config, format) = common.config(&suite)?;
            let result = run_suites(&config)?;
            common.emit(&match format {
                Format::Json => to_json(&result)?,
                Format::Csv => suite_csv(&result)?,
            })?;
            let s = &result.summary;
            eprintln!(
                "pass {} fail {} informative {}",
                s.pass, s.fail, s.informative
            );
            Ok(if result.all_passed() {
                EXIT_OK
            } else {
                EXIT_ASSERTION_FAILED
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_CONFIG as u8
            } else {
                EXIT_OK as u8
            });
        }
    };
    let code = match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("qbern: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
