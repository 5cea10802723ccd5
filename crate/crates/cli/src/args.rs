//! Command-line parsing and the process-level driver.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use invariant_curvature::families::FamilyKind;
use invariant_curvature::verify::{Budget, DEFAULT_TOL};

use crate::config::{RunConfig, Source, Task};
use crate::source::{parse_list, parse_matrix, parse_triple, rows_of, to_map};
use crate::{invalid, run, suites, CliError, Result, RunReport};

#[derive(Debug, Parser)]
#[command(
    name = "invcurv",
    version,
    about = "Curvature checks for left-invariant metrics on SO(3) and SO(4)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum sectional curvature of a metric.
    Check {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Minimum of κ'''(0) over commuting pairs for the path (I − tΨ)⁻¹.
    Infinitesimal {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Minimum curvature at each time of a path (I − tΨ)⁻¹.
    Path {
        #[command(flatten)]
        source: SourceArgs,
        /// Comma-separated times; default {0.1, …, 0.9}·min(1, t_max).
        #[arg(long)]
        t_grid: Option<String>,
        /// Also write a t,min_value,verdict table to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Path scans through random members of the known nonnegatively curved families.
    Family {
        /// product, torus or s3-action; all three when omitted.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a named reproduction suite.
    Reproduce {
        #[arg(long, required_unless_present = "list")]
        suite: Option<String>,
        /// List the available suites and exit.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a JSON configuration (the `config` object of a report).
    Run {
        config: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, env = "INVCURV_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = Budget::default().samples)]
    pub samples: usize,
    #[arg(long, default_value_t = Budget::default().restarts)]
    pub restarts: usize,
    #[arg(long, default_value_t = Budget::default().iters)]
    pub iters: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the JSON report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record wall time in the report (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Φ as `diag:…` or 9/36 row-major entries.
    #[arg(long, group = "src")]
    pub phi: Option<String>,
    /// Ψ as `diag:…` or 9/36 row-major entries.
    #[arg(long, group = "src")]
    pub psi: Option<String>,
    /// JSON file with Φ as a list of rows.
    #[arg(long, group = "src")]
    pub phi_file: Option<PathBuf>,
    /// JSON file with Ψ as a list of rows.
    #[arg(long, group = "src")]
    pub psi_file: Option<PathBuf>,
    /// product, torus, s3-action, torus-psi or s3-action-psi.
    #[arg(long, group = "src")]
    pub family: Option<String>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Three comma-separated eigenvalues.
    #[arg(long)]
    pub lambda: Option<String>,
    /// torus: τ₁₁,τ₁₂,τ₂₂; torus-psi: a₁,a₂,a₃.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// 3x3 factor metrics of the product family.
    #[arg(long)]
    pub phi1: Option<String>,
    #[arg(long)]
    pub phi2: Option<String>,
}

fn need<T: Copy>(v: Option<T>, name: &str, family: &str) -> Result<T> {
    v.ok_or_else(|| invalid(format!("family {family} needs --{name}")))
}

fn need_str<'a>(v: &'a Option<String>, name: &str, family: &str) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| invalid(format!("family {family} needs --{name}")))
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(&text)?;
    Ok(rows_of(&to_map(&rows)?))
}

impl SourceArgs {
    pub fn to_source(&self) -> Result<Source> {
        if let Some(s) = &self.phi {
            return Ok(Source::Phi {
                matrix: parse_matrix(s)?,
            });
        }
        if let Some(s) = &self.psi {
            return Ok(Source::Psi {
                matrix: parse_matrix(s)?,
            });
        }
        if let Some(p) = &self.phi_file {
            return Ok(Source::Phi { matrix: read_rows(p)? });
        }
        if let Some(p) = &self.psi_file {
            return Ok(Source::Psi { matrix: read_rows(p)? });
        }
        let Some(family) = self.family.as_deref() else {
            return Err(invalid(
                "no source: give --phi, --psi, --phi-file, --psi-file or --family",
            ));
        };
        Ok(match family {
            "product" => Source::Product {
                phi1: parse_matrix(need_str(&self.phi1, "phi1", family)?)?,
                phi2: parse_matrix(need_str(&self.phi2, "phi2", family)?)?,
            },
            "torus" => Source::Torus {
                c: need(self.c, "c", family)?,
                d: need(self.d, "d", family)?,
                tau: parse_triple(need_str(&self.tau, "tau", family)?)?,
            },
            "s3-action" => Source::S3Action {
                a: need(self.a, "a", family)?,
                b: need(self.b, "b", family)?,
                lambda: parse_triple(need_str(&self.lambda, "lambda", family)?)?,
            },
            "torus-psi" => Source::TorusPsi {
                c: need(self.c, "c", family)?,
                d: need(self.d, "d", family)?,
                tau: parse_triple(need_str(&self.tau, "tau", family)?)?,
            },
            "s3-action-psi" => Source::S3ActionPsi {
                alpha: need(self.alpha, "alpha", family)?,
                beta: need(self.beta, "beta", family)?,
                lambda: parse_triple(need_str(&self.lambda, "lambda", family)?)?,
            },
            other => return Err(invalid(format!("unknown family {other:?}"))),
        })
    }
}

impl CommonArgs {
    fn config(&self, task: Task) -> RunConfig {
        RunConfig {
            task,
            seed: self.seed,
            budget: Budget {
                samples: self.samples,
                restarts: self.restarts,
                iters: self.iters,
            },
            tol: self.tol,
        }
    }
}

fn family_kind(name: &str) -> Result<FamilyKind> {
    FamilyKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| invalid(format!("unknown family kind {name:?}")))
}

enum Plan<'a> {
    List,
    Run {
        config: RunConfig,
        output: &'a OutputArgs,
        csv: Option<&'a PathBuf>,
    },
}

fn plan(cli: &Cli) -> Result<Plan<'_>> {
    Ok(match &cli.command {
        Command::Check { source, common } => Plan::Run {
            config: common.config(Task::Check {
                source: source.to_source()?,
            }),
            output: &common.output,
            csv: None,
        },
        Command::Infinitesimal { source, common } => Plan::Run {
            config: common.config(Task::Infinitesimal {
                source: source.to_source()?,
            }),
            output: &common.output,
            csv: None,
        },
        Command::Path {
            source,
            t_grid,
            csv,
            common,
        } => Plan::Run {
            config: common.config(Task::Path {
                source: source.to_source()?,
                t_grid: t_grid.as_deref().map(parse_list).transpose()?,
            }),
            output: &common.output,
            csv: csv.as_ref(),
        },
        Command::Family { kind, draws, common } => Plan::Run {
            config: common.config(Task::Family {
                kind: kind.as_deref().map(family_kind).transpose()?,
                draws: *draws,
            }),
            output: &common.output,
            csv: None,
        },
        Command::Reproduce { list: true, .. } => Plan::List,
        Command::Reproduce { suite, common, .. } => Plan::Run {
            config: common.config(Task::Reproduce {
                suite: suite.clone().unwrap_or_default(),
            }),
            output: &common.output,
            csv: None,
        },
        Command::Run { config, output } => {
            let text = std::fs::read_to_string(config).map_err(|e| CliError::Io {
                path: config.display().to_string(),
                source: e,
            })?;
            Plan::Run {
                config: serde_json::from_str(&text)?,
                output,
                csv: None,
            }
        }
    })
}

fn execute(config: &RunConfig, threads: Option<usize>) -> Result<RunReport> {
    match threads {
        None => run(config),
        Some(0) => Err(invalid("--threads must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| invalid(format!("thread pool: {e}")))?
            .install(|| run(config)),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn drive(cli: &Cli) -> Result<i32> {
    let (config, output, csv) = match plan(cli)? {
        Plan::List => {
            for s in &suites::SUITES {
                println!("{}\t[{}]\t{}", s.name, s.tolerance, s.description);
            }
            return Ok(0);
        }
        Plan::Run { config, output, csv } => (config, output, csv),
    };
    let start = Instant::now();
    let mut report = execute(&config, output.threads)?;
    if output.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    let json = report.to_json()?;
    match &output.output {
        Some(path) => write_file(path, json.as_bytes())?,
        None => print!("{json}"),
    }
    if let Some(path) = csv {
        let mut buf = Vec::new();
        report.write_csv(&mut buf)?;
        write_file(path, &buf)?;
    }
    Ok(report.exit_code())
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match drive(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("invcurv: error: {e}");
            2
        }
    }
}
