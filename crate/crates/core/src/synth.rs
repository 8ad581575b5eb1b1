//! Synthetic frame sequences with known shifts and chain codes.
//!
//! Frames are circular shifts of a random texture, for which phase
//! correlation is exact. Drive scripts turn a list of moves into per-pair
//! shifts and the chain code those moves should produce.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::chain::ChainRecord;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::phase::ShiftEstimate;

pub const MIN_SYNTH_DIM: usize = 32;
pub const DEFAULT_FORWARD_DX_BOUND: u32 = 8;
pub const DEFAULT_TURN_DX: u32 = 80;
/// Vertical jitter added to every synthetic pair, in pixels.
pub const DY_JITTER: i64 = 2;

const MOTION_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;

const LEVELS: f64 = 65535.0;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Circular box blur along rows then columns.
fn box_blur(values: &[f64], w: usize, h: usize, radius: usize) -> Vec<f64> {
    let norm = 1.0 / (2 * radius + 1) as f64;
    let r = radius as i64;
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &values[y * w..(y + 1) * w];
        for x in 0..w {
            let s: f64 = (-r..=r)
                .map(|k| row[(x as i64 + k).rem_euclid(w as i64) as usize])
                .sum();
            tmp[y * w + x] = s * norm;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let s: f64 = (-r..=r)
                .map(|k| tmp[(y as i64 + k).rem_euclid(h as i64) as usize * w + x])
                .sum();
            out[y * w + x] = s * norm;
        }
    }
    out
}

fn rescale_unit(values: &mut [f64]) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    for v in values.iter_mut() {
        *v = (*v - lo) / span;
    }
}

/// Smooth random texture in `[0, 1]`, quantized to 16-bit levels so it
/// survives a PGM round trip unchanged.
///
/// A blurred noise field carries the large-scale structure; a white-noise
/// component keeps every frequency populated.
pub fn textured_base(width: usize, height: usize, seed: u64) -> Result<Frame> {
    if width < MIN_SYNTH_DIM || height < MIN_SYNTH_DIM {
        return Err(Error::InvalidFrame(format!(
            "synthetic textures need at least {MIN_SYNTH_DIM}x{MIN_SYNTH_DIM}, got {width}x{height}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = width * height;
    let white: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let coarse: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();

    let radius = (width.min(height) / 32).max(2);
    let mut smooth = box_blur(
        &box_blur(&coarse, width, height, radius),
        width,
        height,
        radius,
    );
    rescale_unit(&mut smooth);

    let mut pixels: Vec<f64> = smooth
        .iter()
        .zip(&white)
        .map(|(s, w)| 0.75 * s + 0.25 * w)
        .collect();
    rescale_unit(&mut pixels);
    for v in pixels.iter_mut() {
        *v = (*v * LEVELS).round() / LEVELS;
    }
    Frame::new(width, height, pixels, 0)
}

/// Adds clipped Gaussian noise; `sigma == 0` returns the frame untouched.
pub fn add_noise(frame: &Frame, sigma: f64, rng: &mut impl Rng) -> Result<Frame> {
    if !(0.0..=0.5).contains(&sigma) {
        return Err(Error::InvalidConfig(format!(
            "noise sigma {sigma} outside [0, 0.5]"
        )));
    }
    if sigma == 0.0 {
        return Ok(frame.clone());
    }
    let normal = Normal::new(0.0, sigma).expect("sigma validated above");
    let pixels = frame
        .pixels()
        .iter()
        .map(|&v| (v + normal.sample(rng)).clamp(0.0, 1.0))
        .collect();
    Frame::new(frame.width(), frame.height(), pixels, frame.index())
}

fn check_shift(base: &Frame, dx: i64, dy: i64) -> Result<()> {
    let (w, h) = (base.width() as i64, base.height() as i64);
    if 2 * dx.abs() >= w || 2 * dy.abs() >= h {
        return Err(Error::InvalidShift {
            dx,
            dy,
            width: base.width(),
            height: base.height(),
        });
    }
    Ok(())
}

/// `shifts.len() + 1` frames; frame `i + 1` is the noise-free frame `i`
/// circularly shifted by `shifts[i]`, and every emitted frame gets its own
/// independent noise draw.
pub fn shifted_sequence(
    base: &Frame,
    shifts: &[(i64, i64)],
    noise_sigma: f64,
    seed: u64,
) -> Result<Vec<Frame>> {
    for &(dx, dy) in shifts {
        check_shift(base, dx, dy)?;
    }
    let mut rng = rng_for(seed, NOISE_STREAM);
    let mut clean = base.clone().with_index(0);
    let mut frames = Vec::with_capacity(shifts.len() + 1);
    frames.push(add_noise(&clean, noise_sigma, &mut rng)?);
    for (i, &(dx, dy)) in shifts.iter().enumerate() {
        clean = clean.circshift(dx, dy).with_index(i + 1);
        frames.push(add_noise(&clean, noise_sigma, &mut rng)?);
    }
    Ok(frames)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Forward,
    /// Left turn spanning this many frame pairs.
    Left(u32),
    Right(u32),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Forward => f.write_str("F"),
            Move::Left(k) => write!(f, "L({k})"),
            Move::Right(k) => write!(f, "R({k})"),
        }
    }
}

impl FromStr for Move {
    type Err = Error;

    fn from_str(token: &str) -> Result<Self> {
        let fail = |reason: &str| Error::ScriptParse {
            token: token.to_string(),
            reason: reason.to_string(),
        };
        let (head, rest) = token.split_at(token.chars().next().map_or(0, char::len_utf8));
        let k = if rest.is_empty() {
            1
        } else {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| fail("expected F, L, R, L(k) or R(k)"))?;
            let k: u32 = inner
                .parse()
                .map_err(|_| fail("excursion length must be a positive integer"))?;
            if k == 0 {
                return Err(fail("excursion length must be at least 1"));
            }
            k
        };
        match head {
            "F" if rest.is_empty() => Ok(Move::Forward),
            "F" => Err(fail("F takes no length")),
            "L" => Ok(Move::Left(k)),
            "R" => Ok(Move::Right(k)),
            _ => Err(fail("expected F, L, R, L(k) or R(k)")),
        }
    }
}

/// Number of frame pairs a move spans.
fn pairs(m: &Move) -> usize {
    match *m {
        Move::Forward => 1,
        Move::Left(k) | Move::Right(k) => k as usize,
    }
}

/// Whitespace-separated moves.
pub fn parse_moves(text: &str) -> Result<Vec<Move>> {
    text.split_whitespace().map(str::parse).collect()
}

pub fn format_moves(moves: &[Move]) -> String {
    moves
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveScript {
    pub moves: Vec<Move>,
    pub forward_dx_bound: u32,
    pub turn_dx: u32,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl DriveScript {
    pub fn new(moves: Vec<Move>, seed: u64) -> Self {
        Self {
            moves,
            forward_dx_bound: DEFAULT_FORWARD_DX_BOUND,
            turn_dx: DEFAULT_TURN_DX,
            noise_sigma: 0.0,
            seed,
        }
    }

    pub fn parse(text: &str, seed: u64) -> Result<Self> {
        Ok(Self::new(parse_moves(text)?, seed))
    }

    pub fn pair_count(&self) -> usize {
        self.moves.iter().map(pairs).sum()
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        if self.moves.is_empty() {
            return Err(Error::EmptySequence);
        }
        if self.turn_dx <= self.forward_dx_bound {
            return Err(Error::InvalidConfig(format!(
                "turn dx {} must exceed the forward bound {}",
                self.turn_dx, self.forward_dx_bound
            )));
        }
        let has_turns = self.moves.iter().any(|m| *m != Move::Forward);
        if has_turns && 2 * self.turn_dx as usize >= width {
            return Err(Error::InvalidConfig(format!(
                "turn dx {} must be below half the frame width {width}",
                self.turn_dx
            )));
        }
        if 2 * self.forward_dx_bound as usize >= width {
            return Err(Error::InvalidConfig(format!(
                "forward dx bound {} must be below half the frame width {width}",
                self.forward_dx_bound
            )));
        }
        if 2 * DY_JITTER as usize >= height {
            return Err(Error::InvalidConfig(format!(
                "frame height {height} too small"
            )));
        }
        if !(0.0..=0.5).contains(&self.noise_sigma) {
            return Err(Error::InvalidConfig(format!(
                "noise sigma {} outside [0, 0.5]",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DriveScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_moves(&self.moves))
    }
}

/// Per-pair shifts for a script: forward pairs jitter within the forward
/// bound, turn pairs carry `+turn_dx` (left) or `-turn_dx` (right).
pub fn script_shifts(script: &DriveScript) -> Vec<(i64, i64)> {
    let mut rng = rng_for(script.seed, MOTION_STREAM);
    let bound = i64::from(script.forward_dx_bound);
    let turn = i64::from(script.turn_dx);
    let mut out = Vec::with_capacity(script.pair_count());
    for m in &script.moves {
        for _ in 0..pairs(m) {
            let dy = rng.random_range(-DY_JITTER..=DY_JITTER);
            let dx = match m {
                Move::Forward => rng.random_range(-bound..=bound),
                Move::Left(_) => turn,
                Move::Right(_) => -turn,
            };
            out.push((dx, dy));
        }
    }
    out
}

/// Expected chain records for a script, derived from the move symbols alone.
///
/// This intentionally does not reuse the chain-code state machine: headings
/// come from explicit lookup tables and turn grouping from the move list.
pub fn truth_chain(moves: &[Move]) -> Vec<ChainRecord> {
    // indexed by heading: where a left / right quarter turn leads
    const AFTER_LEFT: [u8; 4] = [3, 0, 1, 2];
    const AFTER_RIGHT: [u8; 4] = [1, 2, 3, 0];

    #[derive(Clone, Copy, PartialEq)]
    enum Kind {
        Straight,
        Left,
        Right,
    }
    let kinds: Vec<Kind> = moves
        .iter()
        .flat_map(|m| {
            let kind = match m {
                Move::Forward => Kind::Straight,
                Move::Left(_) => Kind::Left,
                Move::Right(_) => Kind::Right,
            };
            std::iter::repeat_n(kind, pairs(m))
        })
        .collect();

    let mut heading = 1u8;
    let mut out = Vec::with_capacity(kinds.len());
    for (i, &kind) in kinds.iter().enumerate() {
        // a turn pair starts a new turn only if the pair before it was straight
        // (the forced first pair always counts as straight)
        let prev_straight = i <= 1 || kinds[i - 1] == Kind::Straight;
        let (mscc, iscc) = if i == 0 {
            (1, 1)
        } else {
            match kind {
                Kind::Straight => (1, heading),
                Kind::Left if prev_straight => (0, AFTER_LEFT[heading as usize]),
                Kind::Right if prev_straight => (2, AFTER_RIGHT[heading as usize]),
                _ => (3, heading),
            }
        };
        heading = iscc;
        out.push(ChainRecord {
            pair_index: i,
            mscc,
            iscc,
            dx: 0,
        });
    }
    out
}

/// Frames plus ground truth for one scripted drive.
#[derive(Debug, Clone)]
pub struct SyntheticSequence {
    pub frames: Vec<Frame>,
    pub truth_shifts: Vec<ShiftEstimate>,
    pub truth_chain: Vec<ChainRecord>,
}

pub fn script_to_frames(script: &DriveScript, base: &Frame) -> Result<SyntheticSequence> {
    script.validate(base.width(), base.height())?;
    let shifts = script_shifts(script);
    let frames = shifted_sequence(base, &shifts, script.noise_sigma, script.seed)?;
    let truth_shifts = shifts
        .iter()
        .enumerate()
        .map(|(i, &(dx, dy))| ShiftEstimate {
            pair_index: i,
            dx,
            dy,
            peak_response: 1.0,
        })
        .collect();
    let mut truth_chain = truth_chain(&script.moves);
    for (r, &(dx, _)) in truth_chain.iter_mut().zip(&shifts) {
        r.dx = dx;
    }
    Ok(SyntheticSequence {
        frames,
        truth_shifts,
        truth_chain,
    })
}
