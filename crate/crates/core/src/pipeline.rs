//! End-to-end orchestration behind the `run`, `synth` and `eval` commands.

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::chain::{
    fold_chain, ChainConfig, ChainRecord, DEFAULT_THRESHOLD, RECOMMENDED_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::frame::WindowKind;
use crate::ingest::{encode_pgm16, load_sequence, IngestOptions};
use crate::io::{chain_csv, commit_files, read_chain_csv, read_json, shifts_csv, to_json};
use crate::phase::{CorrelationConfig, PhaseCorrelator, ShiftEstimate, DEFAULT_EPS};
use crate::synth::{script_to_frames, textured_base, DriveScript};
use crate::trajectory::{
    chain_to_points, compare, normalize, render_svg, SvgOptions, Track, TrajectoryFile,
    TrajectoryMetrics,
};

pub const SHIFTS_FILE: &str = "shifts.csv";
pub const CHAIN_FILE: &str = "chain.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.json";
pub const SVG_FILE: &str = "trajectory.svg";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const METRICS_FILE: &str = "metrics.json";
pub const TRUTH_SHIFTS_FILE: &str = "truth_shifts.csv";
pub const TRUTH_CHAIN_FILE: &str = "truth_chain.csv";
pub const TRUTH_TRAJECTORY_FILE: &str = "truth_trajectory.json";
pub const FRAMES_DIR: &str = "frames";

/// Every tunable of a `run`, echoed verbatim into the run manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub threshold: u32,
    pub window: WindowKind,
    pub downscale: usize,
    pub invert_turn_sign: bool,
    pub eps: f64,
    pub output: PathBuf,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            threshold: DEFAULT_THRESHOLD,
            window: WindowKind::None,
            downscale: 1,
            invert_turn_sign: false,
            eps: DEFAULT_EPS,
            output: output.into(),
        }
    }

    pub fn chain_config(&self) -> ChainConfig {
        ChainConfig {
            threshold: self.threshold,
            invert_turn_sign: self.invert_turn_sign,
        }
    }

    pub fn correlation_config(&self) -> CorrelationConfig {
        CorrelationConfig {
            window: self.window,
            eps: self.eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.chain_config().validate()?;
        self.correlation_config().validate()?;
        if self.downscale == 0 {
            return Err(Error::InvalidConfig(
                "downscale factor must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: PipelineConfig,
    pub frame_count: usize,
    pub frame_width: usize,
    pub frame_height: usize,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub shifts: Vec<ShiftEstimate>,
    pub chain: Vec<ChainRecord>,
    pub manifest: RunManifest,
}

pub fn run(config: &PipelineConfig, exec: Execution) -> Result<RunReport> {
    config.validate()?;
    if !RECOMMENDED_THRESHOLD.contains(&config.threshold) {
        warn!(
            "threshold {} lies outside the usual {}..={} band",
            config.threshold,
            RECOMMENDED_THRESHOLD.start(),
            RECOMMENDED_THRESHOLD.end()
        );
    }

    let frames = load_sequence(
        &config.input,
        &IngestOptions {
            downscale: config.downscale,
            exec,
        },
    )?;
    let (w, h) = (frames[0].width(), frames[0].height());
    info!("loaded {} frames of {w}x{h}", frames.len());

    let chain_config = config.chain_config();
    chain_config.validate_for_width(w)?;
    let correlator = PhaseCorrelator::new(w, h, config.correlation_config())?;
    let shifts = correlator.estimate_sequence(&frames, exec)?;
    let chain = fold_chain(&shifts, &chain_config)?;

    let polyline = normalize(&chain_to_points(&chain));
    let trajectory = TrajectoryFile::new(&chain, &polyline);
    let svg = render_svg(&polyline, &SvgOptions::default());

    let outputs = [
        SHIFTS_FILE,
        CHAIN_FILE,
        TRAJECTORY_FILE,
        SVG_FILE,
        MANIFEST_FILE,
    ];
    let manifest = RunManifest {
        config: config.clone(),
        frame_count: frames.len(),
        frame_width: w,
        frame_height: h,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
    };
    commit_files(
        &config.output,
        &[
            (SHIFTS_FILE, shifts_csv(&shifts).into_bytes()),
            (CHAIN_FILE, chain_csv(&chain).into_bytes()),
            (TRAJECTORY_FILE, to_json(&trajectory).into_bytes()),
            (SVG_FILE, svg.into_bytes()),
            (MANIFEST_FILE, to_json(&manifest).into_bytes()),
        ],
    )?;
    Ok(RunReport {
        shifts,
        chain,
        manifest,
    })
}

/// Reruns exactly what a previous manifest describes.
pub fn rerun_from_manifest(path: &Path, exec: Execution) -> Result<RunReport> {
    let manifest: RunManifest = read_json(path)?;
    run(&manifest.config, exec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub script: String,
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub noise_sigma: f64,
    pub output: PathBuf,
}

impl SynthOptions {
    pub fn new(script: impl Into<String>, output: impl Into<PathBuf>) -> Self {
        Self {
            script: script.into(),
            width: 256,
            height: 256,
            seed: 0,
            noise_sigma: 0.0,
            output: output.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthReport {
    pub script: DriveScript,
    pub frame_count: usize,
    pub frames_dir: PathBuf,
    pub truth_shifts: Vec<ShiftEstimate>,
    pub truth_chain: Vec<ChainRecord>,
}

/// Writes `frames/frame_NNNNN.pgm` plus the truth files under the output
/// directory.
pub fn synth(options: &SynthOptions) -> Result<SynthReport> {
    let mut script = DriveScript::parse(&options.script, options.seed)?;
    script.noise_sigma = options.noise_sigma;
    script.validate(options.width, options.height)?;

    let base = textured_base(options.width, options.height, options.seed)?;
    let seq = script_to_frames(&script, &base)?;

    let frames_dir = options.output.join(FRAMES_DIR);
    if frames_dir.is_dir() {
        // stale frames from an earlier, longer script would be ingested too
        for entry in fs::read_dir(&frames_dir).map_err(|e| Error::io(&frames_dir, e))? {
            let path = entry.map_err(|e| Error::io(&frames_dir, e))?.path();
            let stale = path
                .file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("frame_") && n.ends_with(".pgm"));
            if stale {
                fs::remove_file(&path).map_err(|e| Error::io(&path, e))?;
            }
        }
    }
    let names: Vec<String> = (0..seq.frames.len())
        .map(|i| format!("frame_{i:05}.pgm"))
        .collect();
    let frame_files: Vec<(&str, Vec<u8>)> = names
        .iter()
        .zip(&seq.frames)
        .map(|(n, f)| (n.as_str(), encode_pgm16(f)))
        .collect();
    commit_files(&frames_dir, &frame_files)?;

    let truth_poly = normalize(&chain_to_points(&seq.truth_chain));
    commit_files(
        &options.output,
        &[
            (
                TRUTH_SHIFTS_FILE,
                shifts_csv(&seq.truth_shifts).into_bytes(),
            ),
            (TRUTH_CHAIN_FILE, chain_csv(&seq.truth_chain).into_bytes()),
            (
                TRUTH_TRAJECTORY_FILE,
                to_json(&TrajectoryFile::new(&seq.truth_chain, &truth_poly)).into_bytes(),
            ),
        ],
    )?;
    Ok(SynthReport {
        frame_count: seq.frames.len(),
        frames_dir,
        truth_shifts: seq.truth_shifts,
        truth_chain: seq.truth_chain,
        script,
    })
}

fn first_existing(dir: &Path, names: &[&str]) -> Option<PathBuf> {
    names.iter().map(|n| dir.join(n)).find(|p| p.is_file())
}

/// Chain records plus trajectory from a run or synth output directory.
/// `prefer_truth` picks which naming to try first.
pub fn load_track(dir: &Path, prefer_truth: bool) -> Result<Track> {
    let (chains, trajs) = if prefer_truth {
        (
            [TRUTH_CHAIN_FILE, CHAIN_FILE],
            [TRUTH_TRAJECTORY_FILE, TRAJECTORY_FILE],
        )
    } else {
        (
            [CHAIN_FILE, TRUTH_CHAIN_FILE],
            [TRAJECTORY_FILE, TRUTH_TRAJECTORY_FILE],
        )
    };
    let chain_path = first_existing(dir, &chains).ok_or_else(|| Error::Format {
        path: dir.to_path_buf(),
        line: 0,
        reason: format!("no {} or {} found", chains[0], chains[1]),
    })?;
    let records = read_chain_csv(&chain_path)?;
    let polyline = match first_existing(dir, &trajs) {
        Some(p) => {
            let file: TrajectoryFile = read_json(&p)?;
            file.polyline().map_err(|_| Error::Format {
                path: p.clone(),
                line: 0,
                reason: "trajectory has no points".into(),
            })?
        }
        None => normalize(&chain_to_points(&records)),
    };
    Ok(Track { records, polyline })
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub predicted: PathBuf,
    pub truth: PathBuf,
    pub output: PathBuf,
}

pub fn eval(options: &EvalOptions) -> Result<TrajectoryMetrics> {
    let predicted = load_track(&options.predicted, false)?;
    let truth = load_track(&options.truth, true)?;
    let metrics = compare(&predicted, &truth)?;
    commit_files(
        &options.output,
        &[(METRICS_FILE, to_json(&metrics).into_bytes())],
    )?;
    Ok(metrics)
}

pub fn summary(metrics: &TrajectoryMetrics) -> String {
    let mut s = format!(
        "chain accuracy:        {:.4} over {} pairs\n\
         endpoint error:        {:.6}\n\
         heading edit distance: {}\n",
        metrics.chain_accuracy,
        metrics.compared,
        metrics.endpoint_error,
        metrics.heading_edit_distance
    );
    if metrics.length_mismatch {
        s.push_str("warning: predicted and truth chains differ in length; accuracy covers the overlap only\n");
    }
    s
}
