use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qbss::config::{ConfigMap, Scenario};
use qbss::liouvillian::Superoperator;
use qbss::sweep::{execute_sweep, format_number, manifest_path, run_point, SweepRow, SweepSpec, SweepStatus, CSV_HEADER};
use qbss::verify::{verify, Verdict, VerifyOptions};
use qbss::Error;

/// Directory used for sweep output when no output path is configured.
const OUTPUT_DIR_ENV: &str = "QBSS_OUTPUT_DIR";

const EXIT_FAILURE: u8 = 1;
const EXIT_PARTIAL: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "qbss", version, about = "Steady-state ergotropy of a star-network quantum battery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Config file (`key = value` lines).
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set mu=2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Source {
    fn load(&self) -> Result<ConfigMap, Error> {
        let mut map = match &self.config {
            Some(p) => ConfigMap::from_file(p).map_err(|e| match e {
                Error::Io(io) => Error::InvalidConfig(format!("{}: {io}", p.display())),
                other => other,
            })?,
            None => ConfigMap::default(),
        };
        for o in &self.overrides {
            map.set_pair(o)?;
        }
        Ok(map)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and print its CSV row.
    Point {
        #[command(flatten)]
        source: Source,
        /// Also print the battery state and solver diagnostics.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Run a parameter sweep and write CSV.
    Sweep {
        /// Sweep spec file (same grammar as config files).
        spec: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Start from a built-in sweep (fig2, fig4, fig5, fig6, fig7).
        #[arg(long)]
        preset: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write a plot-ready companion file.
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Worker threads; defaults to all cores.
        #[arg(short, long)]
        jobs: Option<usize>,
        /// Record per-point wall time (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Compare the solver against long-time integration.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random initial states.
        #[arg(long, default_value_t = 5)]
        states: usize,
        #[arg(long, default_value_t = 1e-5)]
        tolerance: f64,
    },
    /// Write the superoperator matrix as text.
    DumpLiouvillian {
        #[command(flatten)]
        source: Source,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { EXIT_CONFIG } else { EXIT_FAILURE })
        }
    }
}

fn scenario(map: &ConfigMap) -> Result<qbss::model::SystemConfig, Error> {
    let (s, warnings) = Scenario::from_map(map)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    s.to_config()
}

fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Point { source, verbose } => {
            let cfg = scenario(&source.load()?)?;
            let p = run_point(&cfg)?;
            println!("{CSV_HEADER}");
            // no axis or family for a single point
            let row = SweepRow::from_point(0.0, None, &p, true).to_csv();
            println!(",{}", row.split_once(',').map_or("", |r| r.1));
            if verbose {
                eprintln!("kernel_dim = {}", p.kernel_dim);
                eprintln!("sigma_min = {:e}", p.sigma_min);
                eprintln!("sigma_next = {:e}", p.sigma_next);
                if let Some(b) = &p.battery {
                    let m = b.rho_battery.matrix();
                    eprintln!("rho_battery = [[{}, {}], [{}, {}]]", m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
                    eprintln!("energy = {}", b.energy);
                    eprintln!("passive_energy = {}", b.passive_energy);
                    eprintln!("e_max = {}", b.e_max);
                }
            }
            Ok(0)
        }
        Command::Sweep { spec, overrides, preset, output, plot, jobs, timing } => {
            let mut map = match &spec {
                Some(p) => ConfigMap::from_file(p)?,
                None => ConfigMap::default(),
            };
            for o in &overrides {
                map.set_pair(o)?;
            }
            if let Some(p) = &preset {
                map.set("preset", p)?;
            }
            let output_configured = map.contains("output") || output.is_some();
            let (mut sweep, warnings) = SweepSpec::from_map(&map)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            if let Some(o) = output {
                sweep.output_path = o;
            } else if !output_configured {
                if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
                    sweep.output_path = PathBuf::from(dir).join(&sweep.output_path);
                }
            }
            if plot.is_some() {
                sweep.plot_path = plot;
            }
            sweep.timing |= timing;
            let outcome = execute_sweep(&sweep, jobs)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for s in &outcome.summary {
                let fam = s.family_value.map_or("-".to_string(), format_number);
                eprintln!(
                    "family {fam}: {}/{} points with W, increases {:.3}, decreases {}, W in [{}, {}]",
                    s.defined, s.points, s.increase_fraction, s.decreases, format_number(s.w_min), format_number(s.w_max)
                );
            }
            eprintln!("wrote {}", sweep.output_path.display());
            match outcome.status() {
                SweepStatus::Complete => Ok(0),
                SweepStatus::Partial => {
                    eprintln!(
                        "{} points failed; see {}",
                        outcome.failures.len(),
                        manifest_path(&sweep.output_path).display()
                    );
                    Ok(EXIT_PARTIAL)
                }
                SweepStatus::Failed => {
                    eprintln!("every point failed; see {}", manifest_path(&sweep.output_path).display());
                    Ok(EXIT_FAILURE)
                }
            }
        }
        Command::Verify { source, seed, states, tolerance } => {
            let cfg = scenario(&source.load()?)?;
            if cfg.n_qubits > 3 {
                eprintln!("warning: integration above three qubits is slow");
            }
            let opts = VerifyOptions { initial_states: states.max(1), seed, tolerance, ..VerifyOptions::default() };
            let report = verify(&cfg, &opts)?;
            println!("{report}");
            Ok(match report.verdict {
                Verdict::Match => 0,
                Verdict::Mismatch => EXIT_MISMATCH,
                Verdict::Inconclusive => EXIT_FAILURE,
            })
        }
        Command::DumpLiouvillian { source, output } => {
            let cfg = scenario(&source.load()?)?;
            let l = Superoperator::build(&cfg)?;
            match output {
                Some(p) => {
                    let mut w = std::io::BufWriter::new(std::fs::File::create(p)?);
                    l.write_dump(&mut w)?;
                    std::io::Write::flush(&mut w)?;
                }
                None => l.write_dump(std::io::stdout().lock())?,
            }
            Ok(0)
        }
    }
}
