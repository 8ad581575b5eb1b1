//! Grayscale frames and the preprocessing applied before frequency analysis.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest accepted frame edge, in pixels.
pub const MIN_DIM: usize = 8;

/// A single grayscale image with luminance in `[0, 1]`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
    index: usize,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>, index: usize) -> Result<Self> {
        if width < MIN_DIM || height < MIN_DIM {
            return Err(Error::InvalidFrame(format!(
                "{width}x{height} is smaller than {MIN_DIM}x{MIN_DIM}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "{} pixels supplied for a {width}x{height} frame",
                pixels.len()
            )));
        }
        if let Some(bad) = pixels
            .iter()
            .position(|v| !v.is_finite() || *v < 0.0 || *v > 1.0)
        {
            return Err(Error::InvalidFrame(format!(
                "pixel {bad} has luminance {} outside [0, 1]",
                pixels[bad]
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            index,
        })
    }

    /// Builds a frame by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        index: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels, index)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    /// Replaces pixel values with `f(value)`, clamped back into `[0, 1]`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Frame {
        Frame {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&v| f(v).clamp(0.0, 1.0)).collect(),
            index: self.index,
        }
    }

    /// Circular shift: content moves by `(dx, dy)`, so
    /// `out(x, y) = self((x - dx) mod W, (y - dy) mod H)`.
    pub fn circshift(&self, dx: i64, dy: i64) -> Frame {
        let (w, h) = (self.width as i64, self.height as i64);
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for y in 0..h {
            let sy = (y - dy).rem_euclid(h) as usize;
            let row = &self.pixels[sy * self.width..(sy + 1) * self.width];
            for x in 0..w {
                pixels.push(row[(x - dx).rem_euclid(w) as usize]);
            }
        }
        Frame {
            width: self.width,
            height: self.height,
            pixels,
            index: self.index,
        }
    }

    /// Unchecked constructor for values already known to satisfy the invariants.
    pub(crate) fn from_parts(width: usize, height: usize, pixels: Vec<f64>, index: usize) -> Self {
        debug_assert_eq!(pixels.len(), width * height);
        Self {
            width,
            height,
            pixels,
            index,
        }
    }
}

/// BT.601 luminance of an RGB triplet whose channels lie in `[0, 255]`.
pub fn luminance(r: f64, g: f64, b: f64) -> f64 {
    ((0.299 * r + 0.587 * g + 0.114 * b) / 255.0).clamp(0.0, 1.0)
}

/// Converts interleaved RGB samples (channels in `[0, 255]`) into a frame.
pub fn to_grayscale(width: usize, height: usize, rgb: &[[f64; 3]], index: usize) -> Result<Frame> {
    let pixels = rgb.iter().map(|&[r, g, b]| luminance(r, g, b)).collect();
    Frame::new(width, height, pixels, index)
}

/// Block-mean reduction by an integer factor.
pub fn downscale(frame: &Frame, factor: usize) -> Result<Frame> {
    if factor == 0 || frame.width < MIN_DIM * factor || frame.height < MIN_DIM * factor {
        return Err(Error::DownscaleTooAggressive {
            width: frame.width,
            height: frame.height,
            factor,
        });
    }
    if factor == 1 {
        return Ok(frame.clone());
    }
    let (w, h) = (frame.width / factor, frame.height / factor);
    let area = (factor * factor) as f64;
    let mut pixels = Vec::with_capacity(w * h);
    for by in 0..h {
        for bx in 0..w {
            let mut sum = 0.0;
            for y in by * factor..(by + 1) * factor {
                let row = &frame.pixels[y * frame.width..(y + 1) * frame.width];
                sum += row[bx * factor..(bx + 1) * factor].iter().sum::<f64>();
            }
            pixels.push((sum / area).clamp(0.0, 1.0));
        }
    }
    Ok(Frame::from_parts(w, h, pixels, frame.index))
}

/// Apodization applied to a frame before its transform.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    None,
    Hann,
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowKind::None => "none",
            WindowKind::Hann => "hann",
        })
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(WindowKind::None),
            "hann" => Ok(WindowKind::Hann),
            other => Err(Error::InvalidConfig(format!(
                "unknown window '{other}' (expected none or hann)"
            ))),
        }
    }
}

/// Symmetric Hann weights `0.5 - 0.5 cos(2 pi i / (n - 1))`.
pub fn hann_weights(n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![1.0; n];
    }
    let denom = (n - 1) as f64;
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / denom).cos())
        .collect()
}

pub fn apply_window(frame: &Frame, kind: WindowKind) -> Frame {
    match kind {
        WindowKind::None => frame.clone(),
        WindowKind::Hann => {
            let wx = hann_weights(frame.width);
            let wy = hann_weights(frame.height);
            let mut pixels = Vec::with_capacity(frame.pixels.len());
            for (y, row) in frame.pixels.chunks_exact(frame.width).enumerate() {
                pixels.extend(
                    row.iter()
                        .zip(&wx)
                        .map(|(v, w)| (v * w * wy[y]).clamp(0.0, 1.0)),
                );
            }
            Frame::from_parts(frame.width, frame.height, pixels, frame.index)
        }
    }
}
