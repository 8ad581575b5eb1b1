use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phasechain::chain::DEFAULT_THRESHOLD;
use phasechain::phase::DEFAULT_EPS;
use phasechain::pipeline::{self, EvalOptions, PipelineConfig, SynthOptions};
use phasechain::{Error, Execution, ExitClass, WindowKind};

#[derive(Debug, Parser)]
#[command(
    name = "phasechain",
    version,
    about = "Trajectory extraction from frame sequences by phase correlation and dynamic chain codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate shifts, fold them into a chain code and write the trajectory.
    Run {
        /// Directory of frames or a glob pattern such as 'seq/*.png'.
        #[arg(long)]
        frames: PathBuf,
        /// Horizontal shift (pixels) separating forward motion from turns.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: u32,
        #[arg(long, default_value = "none", value_parser = parse_window)]
        window: WindowKind,
        /// Integer block-mean reduction applied on load.
        #[arg(long, default_value_t = 1)]
        downscale: usize,
        /// Read negative horizontal shifts as left turns.
        #[arg(long)]
        invert_turn_sign: bool,
        /// Cross-power magnitude below which a frequency cell is dropped.
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
        /// Estimate shifts on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
    /// Generate a synthetic frame sequence with ground truth.
    Synth {
        /// Moves separated by whitespace: F, L, R, L(k), R(k).
        #[arg(long)]
        script: String,
        #[arg(long, default_value = "256x256", value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare a run against ground truth and write metrics.json.
    Eval {
        #[arg(long)]
        predicted: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_window(s: &str) -> Result<WindowKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    let dim = |v: &str| {
        v.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad dimension '{v}' in '{s}'"))
    };
    Ok((dim(w)?, dim(h)?))
}

fn execute(command: Command) -> phasechain::Result<()> {
    match command {
        Command::Run {
            frames,
            threshold,
            window,
            downscale,
            invert_turn_sign,
            eps,
            out,
            sequential,
        } => {
            let config = PipelineConfig {
                input: frames,
                threshold,
                window,
                downscale,
                invert_turn_sign,
                eps,
                output: out,
            };
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let report = pipeline::run(&config, exec)?;
            let turns = report
                .chain
                .iter()
                .filter(|r| matches!(r.mscc, 0 | 2))
                .count();
            println!(
                "{} frames, {} pairs, {} turns; chain {}",
                report.manifest.frame_count,
                report.shifts.len(),
                turns,
                phasechain::chain::heading_string(&report.chain)
            );
            println!("wrote {}", config.output.display());
        }
        Command::Synth {
            script,
            size: (width, height),
            seed,
            noise_sigma,
            out,
        } => {
            let report = pipeline::synth(&SynthOptions {
                script,
                width,
                height,
                seed,
                noise_sigma,
                output: out.clone(),
            })?;
            println!("script: {}", report.script);
            println!(
                "wrote {} frames to {} and truth files to {}",
                report.frame_count,
                report.frames_dir.display(),
                out.display()
            );
        }
        Command::Eval {
            predicted,
            truth,
            out,
        } => {
            let metrics = pipeline::eval(&EvalOptions {
                predicted,
                truth,
                output: out,
            })?;
            print!("{}", pipeline::summary(&metrics));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitClass::Usage as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(e.exit_class() as u8)
        }
    }
}
