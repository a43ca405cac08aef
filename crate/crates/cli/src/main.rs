mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{ImageFormat, Overlays, RenderJob, ScanFormat};
use error::CliError;

/// Newton maps of p·exp(q): classification, basin rendering, parameter scans
/// and channel-diagram audits.
#[derive(Parser, Debug)]
#[command(name = "newton-atlas", version)]
struct Cli {
    /// Seed for every stochastic sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted, except for images).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Iteration budget (defaults: 5000 when q is constant, 50000 otherwise).
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Ppm,
    Png,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Degrees, fixed points, critical points, petals and postcritical evidence.
    Classify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Basin image with a JSON sidecar next to it.
    Render {
        #[arg(long)]
        map: PathBuf,
        /// Center and size as cx,cy,w,h.
        #[arg(long, default_value = "0,0,6,6", allow_hyphen_values = true)]
        viewport: String,
        /// Resolution as WxH.
        #[arg(long, default_value = "800x800")]
        res: String,
        /// Comma-separated layers among rays, critical, fixed.
        #[arg(long, default_value = "")]
        overlay: String,
        #[arg(long, value_enum, default_value = "ppm")]
        format: Format,
    },
    /// Parameter scan of an affine family as a CSV atlas.
    Scan {
        #[arg(long)]
        family: PathBuf,
        /// Parameter region as cx,cy,w,h.
        #[arg(long, default_value = "1,0,4,2", allow_hyphen_values = true)]
        viewport: String,
        #[arg(long, default_value = "100x50")]
        res: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Also write a PPM flag map.
        #[arg(long)]
        flag_map: Option<PathBuf>,
    },
    /// Compares a marked polynomial Newton map with a parabolic one.
    Audit {
        #[arg(long)]
        pcf: PathBuf,
        /// Marked rays as basin:ray pairs, e.g. 1:0.
        #[arg(long)]
        mark: String,
        #[arg(long)]
        pcm: PathBuf,
    },
    /// Fixed internal rays of every basin as JSON polylines.
    Channels {
        #[arg(long)]
        map: PathBuf,
    },
    /// Clipped areas of the immediate basin of one root.
    Area {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long, default_value = "5,10,20,40")]
        radii: String,
        /// Grid side.
        #[arg(long, default_value_t = 800)]
        res: usize,
    },
    /// Normalizes two maps and tests them for affine conjugacy.
    Conjugacy {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        other: PathBuf,
    },
    /// Runs a built-in verification suite (or `all`).
    Verify { suite: String },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("NEWTON_ATLAS_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "NEWTON_ATLAS_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failed(e.to_string()))
}

fn expect_format(format: Format, allowed: &[Format], command: &str) -> Result<(), CliError> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{command} does not write {format:?} output"
        )))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let out = cli.out.as_deref();
    match cli.command {
        Command::Classify { map, format } => {
            expect_format(format, &[Format::Json], "classify")?;
            commands::cmd_classify(&map, cli.budget, out)
        }
        Command::Render {
            map,
            viewport,
            res,
            overlay,
            format,
        } => {
            expect_format(format, &[Format::Ppm, Format::Png], "render")?;
            let format = if format == Format::Png {
                ImageFormat::Png
            } else {
                ImageFormat::Ppm
            };
            let default_out = if format == ImageFormat::Png {
                "basins.png"
            } else {
                "basins.ppm"
            };
            let job = RenderJob {
                spec: config::load_spec(&map)?,
                viewport: config::parse_viewport(&viewport)?,
                resolution: config::parse_resolution(&res)?,
                budget: cli.budget,
                overlays: Overlays::parse(&overlay)?,
                format,
                out: cli
                    .out
                    .clone()
                    .unwrap_or_else(|| PathBuf::from(default_out)),
            };
            commands::cmd_render(&job)
        }
        Command::Scan {
            family,
            viewport,
            res,
            format,
            flag_map,
        } => {
            expect_format(format, &[Format::Csv, Format::Json], "scan")?;
            let format = if format == Format::Json {
                ScanFormat::Json
            } else {
                ScanFormat::Csv
            };
            commands::cmd_scan(
                &family,
                config::parse_viewport(&viewport)?,
                config::parse_resolution(&res)?,
                cli.budget,
                format,
                out,
                flag_map.as_deref(),
            )
        }
        Command::Audit { pcf, mark, pcm } => {
            commands::cmd_audit(&pcf, &mark, &pcm, cli.budget, out)
        }
        Command::Channels { map } => commands::cmd_channels(&map, out),
        Command::Area {
            map,
            root,
            radii,
            res,
        } => commands::cmd_area(
            &map,
            root,
            &config::parse_list(&radii, "--radii")?,
            res,
            out,
        ),
        Command::Conjugacy { map, other } => commands::cmd_conjugacy(&map, &other, out),
        Command::Verify { suite } => commands::cmd_verify(&suite, cli.seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("newton-atlas: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
