use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nanoramsey::commands::{self, Observable, SurfaceAxes, DEFAULT_GRID_DT};
use nanoramsey::error::{AppError, Result, EXIT_FAILURE, EXIT_OK, EXIT_VALIDATION};
use nanoramsey::output::{to_json, Meta};
use nanoramsey::sweep::SweepSpec;
use nanoramsey::RunConfig;

const DESK_SCALE: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/desk_scale.toml"));

#[derive(Parser)]
#[command(name = "nanoramsey", version, about = "Free-flight spin-interferometry calculations for a released nanodiamond")]
struct Cli {
    /// TOML configuration file (flat SI keys).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for sweeps and surfaces.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Seed for sampled quantities; overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Args)]
struct Range {
    /// Configuration key to vary.
    #[arg(long)]
    param: String,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    stop: Option<f64>,
    #[arg(long, default_value_t = 11)]
    count: usize,
    /// Log spacing between start and stop.
    #[arg(long)]
    log: bool,
    /// Explicit comma-separated values instead of a range.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Vec<f64>,
}

impl Range {
    fn spec(&self) -> Result<SweepSpec> {
        if !self.values.is_empty() {
            return SweepSpec::explicit(&self.param, self.values.clone());
        }
        let (Some(a), Some(b)) = (self.start, self.stop) else {
            return Err(AppError::Argument("give --values or both --start and --stop".into()));
        };
        if self.log {
            SweepSpec::log(&self.param, a, b, self.count)
        } else {
            SweepSpec::linear(&self.param, a, b, self.count)
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Phase, P0 and maximum separation against theta or t3.
    Fringe {
        #[command(flatten)]
        range: Range,
    },
    /// Decoherence visibility over separation and internal temperature.
    Visibility {
        #[arg(long, default_value_t = 1e-8)]
        dx_min: f64,
        #[arg(long, default_value_t = 1e-6)]
        dx_max: f64,
        #[arg(long, default_value_t = 50)]
        dx_count: usize,
        #[arg(long, default_value_t = 10.0)]
        tint_min: f64,
        #[arg(long, default_value_t = 2000.0)]
        tint_max: f64,
        #[arg(long, default_value_t = 50)]
        tint_count: usize,
        /// s; defaults to t3
        #[arg(long)]
        flight_time: Option<f64>,
    },
    /// Grid-oracle certification of the closed forms (desk-scale config by default).
    Certify {
        /// Largest grid time step in natural units.
        #[arg(long, default_value_t = DEFAULT_GRID_DT)]
        dt: f64,
    },
    /// Feasibility budget with discrepancy notes.
    Budget,
    /// Dicke-sector phases for several NV centres.
    Dicke {
        /// Number of pseudo-spins; `n_nv` from the config when absent.
        #[arg(long)]
        l: Option<u32>,
    },
    /// General sweep with selectable outputs.
    Sweep {
        #[command(flatten)]
        range: Range,
        /// Comma-separated outputs, e.g. phi_g,p0,delta_x_max.
        #[arg(long, value_delimiter = ',', default_value = "phi_g,p0,delta_x_max")]
        outputs: Vec<String>,
    },
    /// |psi|^2 of both arms from the grid at the given times (s).
    DumpSnapshots {
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID_DT)]
        dt: f64,
    },
}

fn load(cli: &Cli, bundled: Option<&str>) -> Result<RunConfig> {
    match (&cli.config, bundled) {
        (Some(path), _) => RunConfig::load(path),
        (None, Some(text)) => RunConfig::from_toml_str(text),
        (None, None) => Err(AppError::Argument("--config is required for this command".into())),
    }
}

/// Rendered output and whether the command's own checks passed.
fn run(cli: &Cli) -> Result<(String, bool)> {
    let name = match &cli.command {
        Command::Fringe { .. } => "fringe",
        Command::Visibility { .. } => "visibility",
        Command::Certify { .. } => "certify",
        Command::Budget => "budget",
        Command::Dicke { .. } => "dicke",
        Command::Sweep { .. } => "sweep",
        Command::DumpSnapshots { .. } => "dump-snapshots",
    };
    let cfg = load(cli, matches!(cli.command, Command::Certify { .. }).then_some(DESK_SCALE))?;
    let seed = cfg.seed_with(cli.seed);
    let meta = Meta::new(name, cfg.hash(), seed);
    let table_out = |t: &nanoramsey::output::Table| -> Result<String> {
        match cli.format {
            Format::Json => to_json(&meta, t),
            _ => t.to_csv(),
        }
    };
    Ok(match &cli.command {
        Command::Fringe { range } => (table_out(&commands::fringe_table(&cfg, &range.spec()?, cli.workers)?)?, true),
        Command::Sweep { range, outputs } => {
            let outputs = outputs.iter().map(|o| Observable::parse(o)).collect::<Result<Vec<_>>>()?;
            let t = commands::sweep_table(&cfg, &range.spec()?, &outputs, cli.workers, seed)?;
            (table_out(&t)?, true)
        }
        Command::Visibility { dx_min, dx_max, dx_count, tint_min, tint_max, tint_count, flight_time } => {
            let axes = SurfaceAxes {
                dx_min: *dx_min,
                dx_max: *dx_max,
                dx_count: *dx_count,
                t_int_min: *tint_min,
                t_int_max: *tint_max,
                t_int_count: *tint_count,
                flight_time: *flight_time,
            };
            let s = commands::visibility_for(&cfg, &axes, cli.workers)?;
            let text = match cli.format {
                Format::Json => to_json(&meta, &s)?,
                _ => commands::surface_table(&s).to_csv()?,
            };
            (text, true)
        }
        Command::Certify { dt } => {
            let r = commands::certify(&cfg, *dt)?;
            let text = match cli.format {
                Format::Json => to_json(&meta, &r)?,
                Format::Text => commands::certify_text(&r),
                Format::Csv => commands::certify_table(&r).to_csv()?,
            };
            (text, r.pass())
        }
        Command::Budget => {
            let r = commands::budget(&cfg)?;
            let text = match cli.format {
                Format::Json => to_json(&meta, &r)?,
                Format::Text => commands::budget_text(&r),
                Format::Csv => commands::budget_table(&r).to_csv()?,
            };
            (text, r.all_pass())
        }
        Command::Dicke { l } => (table_out(&commands::dicke_table(&cfg, *l)?)?, true),
        Command::DumpSnapshots { times, dt } => (table_out(&commands::snapshot_table(&cfg, times, *dt)?)?, true),
    })
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(&cli).and_then(|(text, pass)| emit(&cli, &text).map(|_| pass)) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("nanoramsey: checks failed");
            EXIT_FAILURE
        }
        Err(e) => {
            eprintln!("nanoramsey: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
