use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qfield_core::hierarchy::KernelGrid;
use qfield_core::lattice::{Field, Lattice1p1, LatticeBackground, RetardedGreen, SourceField};
use qfield_core::scalar::WaveBackground;
use qfield_core::verify::export::{emit_spectrum, field_slab_csv, kernel_triplets_csv};
use qfield_core::verify::suites::standard_bump;
use qfield_core::verify::{run_suite, RunConfig};
use qfield_core::yangmills::casimir_contraction_audit;
use qfield_core::Error;

#[derive(Parser)]
#[command(name = "qfield", version, about = "Checks exact classical field solutions against numerical oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite: elliptic, scalar, green, oracle, yangmills, cumulants or all.
    Verify {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// key=value override, repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Run the suites of `all` concurrently.
        #[arg(long)]
        parallel: bool,
        /// Print the JSON report instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Write `n,omega_n,A_n` for the mass tower.
    Spectrum {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the dense retarded kernel on a small lattice as `i1,i2,value`.
    Kernel {
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the response to a smooth source as `t,x,value`.
    Slab {
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the SU(2) contact-term audit as JSON.
    Audit {
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn verify(
    suite: &str,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    params: &[String],
    parallel: bool,
    json: bool,
) -> Result<bool, Error> {
    let mut c = RunConfig::for_suite(suite)?;
    if let Some(path) = config {
        c.apply_file(&path)?;
        c.set("suite", suite)?;
    }
    for p in params {
        c.apply_override(p)?;
    }
    if out.is_some() {
        c.out_dir = out;
    }
    c.parallel = parallel;
    let report = run_suite(&c)?;
    if json {
        println!("{}", report.to_json()?);
    } else {
        print!("{}", report.to_text());
    }
    for f in report.failures() {
        eprintln!("failed check: {}/{}", f.suite, f.name);
    }
    Ok(report.passed)
}

fn small_background(mu: f64, lambda: f64, n: usize) -> Result<(WaveBackground, Lattice1p1), Error> {
    let bg = WaveBackground::rest(mu, lambda)?;
    let dx = bg.time_period() / n as f64;
    Ok((bg, Lattice1p1::new(n, n, 0.5 * dx, dx)?))
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Verify { suite, config, out, params, parallel, json } => {
            verify(&suite, config, out, &params, parallel, json)
        }
        Command::Spectrum { n_max, mass, out } => {
            if !(mass > 0.0) {
                return Err(Error::Parameter(format!("mass must be positive, got {mass}")));
            }
            emit_spectrum(n_max, mass, &out)?;
            Ok(true)
        }
        Command::Kernel { mu, lambda, n, out } => {
            let (bg, lat) = small_background(mu, lambda, n)?;
            let grid = KernelGrid::assemble(&RetardedGreen::new(&LatticeBackground::sampled(&bg, &lat)?))?;
            std::fs::write(out, kernel_triplets_csv(&grid))?;
            Ok(true)
        }
        Command::Slab { mu, lambda, out } => {
            let bg = WaveBackground::rest(mu, lambda)?;
            let lat = Lattice1p1::default_for(&bg);
            let green = RetardedGreen::new(&LatticeBackground::sampled(&bg, &lat)?);
            let j: SourceField = standard_bump(&lat)?;
            let field: Field = green.respond(&j.values())?;
            std::fs::write(out, field_slab_csv(&field, &lat)?)?;
            Ok(true)
        }
        Command::Audit { g, out } => {
            if !(g > 0.0) {
                return Err(Error::Parameter(format!("g must be positive, got {g}")));
            }
            std::fs::write(out, serde_json::to_string_pretty(&casimir_contraction_audit(g))?)?;
            Ok(true)
        }
    }
}

fn exit_code(outcome: &Result<bool, Error>) -> u8 {
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Error::Usage(_) | Error::Parameter(_) | Error::Configuration(_)) => 2,
        Err(_) => 1,
    }
}

fn main() -> ExitCode {
    let outcome = run(Cli::parse());
    if let Err(e) = &outcome {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_code(&outcome))
}
