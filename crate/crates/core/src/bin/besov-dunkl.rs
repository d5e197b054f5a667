use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use besov_dunkl::besov::{equivalence_report, parse_q, BesovParams, Ceilings, Lattices};
use besov_dunkl::catalog::lookup;
use besov_dunkl::io::{function_from_csv, function_from_json, function_to_csv, function_to_json, spectrum_to_csv, spectrum_to_json};
use besov_dunkl::smoothness::ScaleSet;
use besov_dunkl::transform::forward_default;
use besov_dunkl::translation::{convolve, translate_angular, AngularRule};
use besov_dunkl::verify::{run_verify, Suite, VerifyProfile};
use besov_dunkl::{AlphaParameter, Error, QuadGrid, Result, SampledFunction};

#[derive(Parser)]
#[command(name = "besov-dunkl", version, about = "Dunkl harmonic analysis and Besov-Dunkl seminorms on the real line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites against a tolerance profile.
    Verify {
        /// TOML profile; the bundled default when omitted.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Restrict to these suites (S1..S6); repeatable.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dunkl transform of a function.
    Transform {
        #[command(flatten)]
        common: Common,
    },
    /// Dunkl translation `tau_x f` sampled on the grid.
    Translate {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
    },
    /// Dunkl convolution `f *_alpha g`.
    Convolve {
        #[command(flatten)]
        common: Common,
        /// Second factor (catalog name or file).
        #[arg(long)]
        with: String,
    },
    /// BD, KD and ED seminorms with per-scale tables.
    Seminorm {
        #[command(flatten)]
        common: Common,
        /// Also write the per-scale plot data (`x,w,k,e`) here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// Catalog name or a path to a JSON or CSV sample file.
    #[arg(long, default_value = "gaussian")]
    function: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// A number or `inf`.
    #[arg(long, default_value = "2")]
    q: String,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 2048)]
    grid_points: usize,
    #[arg(long, default_value_t = 20.0)]
    domain_radius: f64,
    #[arg(long, default_value_t = 128)]
    theta_nodes: usize,
    /// BD lattice as `lo:hi:count` (exponents of 2).
    #[arg(long, default_value = "-6:4:17", allow_hyphen_values = true)]
    scales: String,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn grid(&self) -> Result<Arc<QuadGrid>> {
        QuadGrid::shared(AlphaParameter::new(self.alpha)?, self.domain_radius, self.grid_points)
    }

    fn rule(&self) -> Result<Arc<AngularRule>> {
        Ok(Arc::new(AngularRule::new(AlphaParameter::new(self.alpha)?, self.theta_nodes)?))
    }

    fn load(&self, name: &str) -> Result<SampledFunction> {
        let grid = self.grid()?;
        if let Ok(entry) = lookup(name) {
            return entry.sample(&grid);
        }
        let path = Path::new(name);
        if !path.exists() {
            return Err(Error::Usage(format!("`{name}` is neither a catalog function nor a file")));
        }
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            let f = function_from_json(&text)?;
            if f.grid().as_ref() != grid.as_ref() {
                return Err(Error::GridMismatch(format!("{name} is not sampled on the requested grid")));
            }
            Ok(f)
        } else {
            function_from_csv(&text, &grid)
        }
    }

    fn lattices(&self) -> Result<Lattices> {
        let parts: Vec<&str> = self.scales.split(':').collect();
        let bad = || Error::Usage(format!("--scales expects lo:hi:count, got `{}`", self.scales));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        Ok(Lattices { bd: ScaleSet::log_spaced(lo, hi, count)?, theta_nodes: self.theta_nodes, ..Lattices::default() })
    }

    fn emit(&self, text: &str) -> Result<()> {
        write_out(self.out.as_deref(), text)
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn function_out(c: &Common, f: &SampledFunction) -> Result<()> {
    c.emit(&match c.output {
        Output::Json => function_to_json(f)?,
        Output::Csv => function_to_csv(f)?,
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { profile, suites, out } => {
            let profile = match profile {
                Some(p) => VerifyProfile::from_toml(&std::fs::read_to_string(p)?)?,
                None => VerifyProfile::default_profile(),
            };
            let suites = suites.iter().map(|s| Suite::parse(s)).collect::<Result<Vec<_>>>()?;
            let report = run_verify(&profile, &suites)?;
            write_out(out.as_deref(), &report.to_json()?)?;
            if report.pass {
                return Ok(ExitCode::SUCCESS);
            }
            eprintln!("failing checks:");
            for id in &report.failing {
                eprintln!("  {id}");
            }
            Ok(ExitCode::from(1))
        }
        Command::Transform { common } => {
            let s = forward_default(&common.load(&common.function)?)?;
            common.emit(&match common.output {
                Output::Json => spectrum_to_json(&s)?,
                Output::Csv => spectrum_to_csv(&s)?,
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Translate { common, x } => {
            let f = common.load(&common.function)?;
            function_out(&common, &translate_angular(&f, x, &common.rule()?)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Convolve { common, with } => {
            let f = common.load(&common.function)?;
            let g = common.load(&with)?;
            function_out(&common, &convolve(&f, &g, &common.rule()?)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Seminorm { common, plot } => {
            let params = BesovParams::new(common.p, parse_q(&common.q)?, common.beta, common.alpha)
                .map_err(|e| Error::Usage(e.to_string()))?;
            let f = common.load(&common.function)?;
            let report = equivalence_report(&f, &params, &common.lattices()?, &Ceilings::default())?;
            common.emit(&match common.output {
                Output::Json => report.to_json()?,
                Output::Csv => report.to_csv(),
            })?;
            if let Some(p) = plot {
                std::fs::write(p, report.to_csv())?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
