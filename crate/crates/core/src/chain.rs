//! Dynamic chain code over a sequence of horizontal shifts.
//!
//! Two codes are tracked per frame pair. The heading code (ISCC) is an
//! absolute 4-connectivity direction: 0 left/west, 1 forward/north,
//! 2 right/east, 3 reverse/south. The movement code (MSCC) is relative:
//! 0 left turn, 1 forward, 2 right turn, 3 no change.
//!
//! A run of above-threshold shifts counts as one 90 degree turn. Detection
//! re-arms only after a shift falls back inside the forward band.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::ShiftEstimate;

pub const DEFAULT_THRESHOLD: u32 = 30;

/// Threshold band observed to work on real footage.
pub const RECOMMENDED_THRESHOLD: std::ops::RangeInclusive<u32> = 12..=60;

pub const ISCC_LEFT: u8 = 0;
pub const ISCC_FORWARD: u8 = 1;
pub const ISCC_RIGHT: u8 = 2;
pub const ISCC_REVERSE: u8 = 3;

pub const MSCC_LEFT: u8 = 0;
pub const MSCC_FORWARD: u8 = 1;
pub const MSCC_RIGHT: u8 = 2;
pub const MSCC_NO_CHANGE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotionClass {
    Forward,
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub threshold: u32,
    /// Swap the Left/Right reading of the shift sign.
    pub invert_turn_sign: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            invert_turn_sign: false,
        }
    }
}

impl ChainConfig {
    pub fn new(threshold: u32, invert_turn_sign: bool) -> Result<Self> {
        let config = Self {
            threshold,
            invert_turn_sign,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.threshold == 0 {
            return Err(Error::InvalidConfig("threshold must be at least 1".into()));
        }
        Ok(())
    }

    /// Shifts are bounded by half the frame width, so larger thresholds
    /// could never fire.
    pub fn validate_for_width(&self, width: usize) -> Result<()> {
        self.validate()?;
        if self.threshold as usize >= width / 2 {
            return Err(Error::InvalidConfig(format!(
                "threshold {} must be below half the frame width ({})",
                self.threshold,
                width / 2
            )));
        }
        Ok(())
    }

    pub fn is_recommended(&self) -> bool {
        RECOMMENDED_THRESHOLD.contains(&self.threshold)
    }
}

/// Positive `dx` (content sweeping right) reads as a left turn unless inverted.
pub fn classify_motion(dx: i64, config: &ChainConfig) -> MotionClass {
    let t = i64::from(config.threshold);
    let class = if dx >= t {
        MotionClass::Left
    } else if dx <= -t {
        MotionClass::Right
    } else {
        MotionClass::Forward
    };
    match (class, config.invert_turn_sign) {
        (MotionClass::Left, true) => MotionClass::Right,
        (MotionClass::Right, true) => MotionClass::Left,
        (c, _) => c,
    }
}

/// Counterclockwise quarter turn: 1 -> 0 -> 3 -> 2 -> 1.
pub fn rotate_left(iscc: u8) -> u8 {
    debug_assert!(iscc < 4);
    (iscc + 3) % 4
}

/// Clockwise quarter turn, the inverse of [`rotate_left`].
pub fn rotate_right(iscc: u8) -> u8 {
    debug_assert!(iscc < 4);
    (iscc + 1) % 4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainState {
    pub iscc: u8,
    pub in_turn: bool,
}

impl Default for ChainState {
    fn default() -> Self {
        Self {
            iscc: ISCC_FORWARD,
            in_turn: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub pair_index: usize,
    pub mscc: u8,
    pub iscc: u8,
    pub dx: i64,
}

/// One transition of the chain-code state machine.
pub fn step(
    state: ChainState,
    dx: i64,
    pair_index: usize,
    config: &ChainConfig,
) -> (ChainState, ChainRecord) {
    let class = classify_motion(dx, config);
    let (next, mscc) = match (state.in_turn, class) {
        (false, MotionClass::Forward) => (state, MSCC_FORWARD),
        (false, MotionClass::Left) => (
            ChainState {
                iscc: rotate_left(state.iscc),
                in_turn: true,
            },
            MSCC_LEFT,
        ),
        (false, MotionClass::Right) => (
            ChainState {
                iscc: rotate_right(state.iscc),
                in_turn: true,
            },
            MSCC_RIGHT,
        ),
        (true, MotionClass::Forward) => (
            ChainState {
                in_turn: false,
                ..state
            },
            MSCC_FORWARD,
        ),
        (true, _) => (state, MSCC_NO_CHANGE),
    };
    let record = ChainRecord {
        pair_index,
        mscc,
        iscc: next.iscc,
        dx,
    };
    (next, record)
}

/// Folds horizontal shifts into chain records.
///
/// The first pair is always recorded as forward with heading 1, whatever its
/// measured shift.
pub fn fold_dx(dxs: &[(usize, i64)], config: &ChainConfig) -> Result<Vec<ChainRecord>> {
    let (&(first_index, first_dx), rest) = dxs.split_first().ok_or(Error::EmptySequence)?;
    let mut state = ChainState::default();
    let mut out = Vec::with_capacity(dxs.len());
    out.push(ChainRecord {
        pair_index: first_index,
        mscc: MSCC_FORWARD,
        iscc: state.iscc,
        dx: first_dx,
    });
    for &(pair_index, dx) in rest {
        let (next, record) = step(state, dx, pair_index, config);
        state = next;
        out.push(record);
    }
    Ok(out)
}

pub fn fold_chain(shifts: &[ShiftEstimate], config: &ChainConfig) -> Result<Vec<ChainRecord>> {
    let dxs: Vec<(usize, i64)> = shifts.iter().map(|s| (s.pair_index, s.dx)).collect();
    fold_dx(&dxs, config)
}

/// Heading codes as a digit string, e.g. `"1100"`.
pub fn heading_string(records: &[ChainRecord]) -> String {
    records.iter().map(|r| char::from(b'0' + r.iscc)).collect()
}
