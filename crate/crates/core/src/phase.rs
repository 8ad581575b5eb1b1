//! Integer translation between frames by phase correlation.
//!
//! Pipeline per frame pair: optional window, forward 2D DFT of both frames,
//! unit-magnitude cross-power spectrum, inverse DFT to a real correlation
//! surface, argmax of the surface mapped to a signed shift.
//!
//! Sign convention: if `b` is `a` with its content moved by `(dx, dy)`
//! (`b(x, y) = a(x - dx, y - dy)`, circularly), the estimate is `(dx, dy)`.
//! Scene content sweeping right between frames gives a positive `dx`.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fft::Fft2d;
use crate::frame::{apply_window, Frame, WindowKind};

pub const DEFAULT_EPS: f64 = 1e-12;

/// Largest imaginary residue tolerated when taking the real part of the
/// inverse transform.
pub const IMAG_TOLERANCE: f64 = 1e-6;

/// Surfaces whose max and min differ by no more than this carry no peak.
const DEGENERATE_SPREAD: f64 = 1e-9;

/// Frames are transformed in batches of this many to bound spectrum memory.
const SEQUENCE_CHUNK: usize = 32;

/// Complex 2D DFT coefficients, row-major, same dimensions as the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    width: usize,
    height: usize,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(width: usize, height: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "{} coefficients for a {width}x{height} spectrum",
                values.len()
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Coefficient at horizontal frequency `u`, vertical frequency `v`.
    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        self.values[v * self.width + u]
    }
}

/// Real correlation responses, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl Surface {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "{} responses for a {width}x{height} surface",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericInstability {
                residue: f64::NAN,
                tolerance: IMAG_TOLERANCE,
            });
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

/// Signed shift between frame `pair_index` and `pair_index + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftEstimate {
    pub pair_index: usize,
    pub dx: i64,
    pub dy: i64,
    pub peak_response: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationConfig {
    pub window: WindowKind,
    pub eps: f64,
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        Self {
            window: WindowKind::None,
            eps: DEFAULT_EPS,
        }
    }
}

impl CorrelationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "eps must be a positive finite number, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

/// Unscaled forward 2D DFT; the DC term equals the pixel sum.
pub fn forward_transform(frame: &Frame) -> Spectrum {
    forward_with(&Fft2d::new(frame.width(), frame.height()), frame)
}

fn forward_with(plan: &Fft2d, frame: &Frame) -> Spectrum {
    let mut values: Vec<Complex64> = frame
        .pixels()
        .iter()
        .map(|&p| Complex64::new(p, 0.0))
        .collect();
    plan.forward(&mut values);
    Spectrum {
        width: frame.width(),
        height: frame.height(),
        values,
    }
}

/// Unit-magnitude cross-power spectrum `conj(A) * B / max(|conj(A) * B|, eps)`.
///
/// The conjugate sits on the reference spectrum so that the inverse transform
/// peaks at the displacement of `moved` relative to `reference`. Cells whose
/// product magnitude falls below `eps` come out as zero.
pub fn cross_power_spectrum(reference: &Spectrum, moved: &Spectrum, eps: f64) -> Result<Spectrum> {
    if reference.width != moved.width || reference.height != moved.height {
        return Err(Error::SpectrumMismatch {
            a_w: reference.width,
            a_h: reference.height,
            b_w: moved.width,
            b_h: moved.height,
        });
    }
    let values = reference
        .values
        .iter()
        .zip(&moved.values)
        .map(|(a, b)| {
            let p = a.conj() * b;
            let mag = p.norm();
            if mag >= eps {
                p / mag
            } else {
                Complex64::default()
            }
        })
        .collect();
    Ok(Spectrum {
        width: reference.width,
        height: reference.height,
        values,
    })
}

/// Real part of the `1/(W H)`-scaled inverse DFT of a cross-power spectrum.
pub fn correlation_surface(cross_power: &Spectrum) -> Result<Surface> {
    correlation_with(
        &Fft2d::new(cross_power.width, cross_power.height),
        cross_power.clone(),
    )
}

fn correlation_with(plan: &Fft2d, cross_power: Spectrum) -> Result<Surface> {
    let Spectrum {
        width,
        height,
        mut values,
    } = cross_power;
    plan.inverse(&mut values);
    let scale = 1.0 / (width * height) as f64;
    let residue = values
        .iter()
        .map(|c| (c.im * scale).abs())
        .fold(0.0, f64::max);
    if residue.is_nan() || residue >= IMAG_TOLERANCE {
        return Err(Error::NumericInstability {
            residue,
            tolerance: IMAG_TOLERANCE,
        });
    }
    Surface::new(width, height, values.iter().map(|c| c.re * scale).collect())
}

/// Argmax of the surface as a wraparound-resolved signed shift.
///
/// Ties go to the smallest row-major index. Peaks at or beyond half a
/// dimension map to negative offsets.
pub fn peak_shift(surface: &Surface, pair_index: usize) -> Result<ShiftEstimate> {
    let (mut best, mut best_at) = (f64::NEG_INFINITY, 0usize);
    let mut lowest = f64::INFINITY;
    for (i, &v) in surface.values.iter().enumerate() {
        if v > best {
            best = v;
            best_at = i;
        }
        lowest = lowest.min(v);
    }
    if best - lowest <= DEGENERATE_SPREAD {
        return Err(Error::DegenerateSurface {
            peak_response: best,
        });
    }
    let (w, h) = (surface.width, surface.height);
    let (px, py) = (best_at % w, best_at / w);
    Ok(ShiftEstimate {
        pair_index,
        dx: wrap(px, w),
        dy: wrap(py, h),
        peak_response: best,
    })
}

fn wrap(p: usize, n: usize) -> i64 {
    if p < n / 2 {
        p as i64
    } else {
        p as i64 - n as i64
    }
}

fn check_same_dims(a: &Frame, b: &Frame) -> Result<()> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::SpectrumMismatch {
            a_w: a.width(),
            a_h: a.height(),
            b_w: b.width(),
            b_h: b.height(),
        });
    }
    Ok(())
}

/// Shift of `b` relative to `a`, tagged with `a`'s index.
pub fn estimate_shift(a: &Frame, b: &Frame, config: &CorrelationConfig) -> Result<ShiftEstimate> {
    check_same_dims(a, b)?;
    PhaseCorrelator::new(a.width(), a.height(), *config)?.estimate(a, b)
}

/// Reusable transform plans for one frame size.
#[derive(Debug, Clone)]
pub struct PhaseCorrelator {
    plan: Fft2d,
    config: CorrelationConfig,
}

impl PhaseCorrelator {
    pub fn new(width: usize, height: usize, config: CorrelationConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            plan: Fft2d::new(width, height),
            config,
        })
    }

    pub fn config(&self) -> &CorrelationConfig {
        &self.config
    }

    fn check_dims(&self, frame: &Frame) -> Result<()> {
        let (w, h) = self.plan.dims();
        if frame.width() != w || frame.height() != h {
            return Err(Error::SpectrumMismatch {
                a_w: w,
                a_h: h,
                b_w: frame.width(),
                b_h: frame.height(),
            });
        }
        Ok(())
    }

    /// Windowed forward spectrum of one frame.
    pub fn spectrum(&self, frame: &Frame) -> Result<Spectrum> {
        self.check_dims(frame)?;
        Ok(match self.config.window {
            WindowKind::None => forward_with(&self.plan, frame),
            kind => forward_with(&self.plan, &apply_window(frame, kind)),
        })
    }

    pub fn surface(&self, a: &Spectrum, b: &Spectrum) -> Result<Surface> {
        let r = cross_power_spectrum(a, b, self.config.eps)?;
        correlation_with(&self.plan, r)
    }

    pub fn estimate(&self, a: &Frame, b: &Frame) -> Result<ShiftEstimate> {
        let (sa, sb) = (self.spectrum(a)?, self.spectrum(b)?);
        peak_shift(&self.surface(&sa, &sb)?, a.index())
    }

    /// Shift estimates for every consecutive pair, ordered by pair index.
    ///
    /// Each frame is transformed once. The first failing pair (lowest index)
    /// determines the returned error.
    pub fn estimate_sequence(
        &self,
        frames: &[Frame],
        exec: Execution,
    ) -> Result<Vec<ShiftEstimate>> {
        if frames.len() < 2 {
            return Err(Error::SequenceTooShort {
                needed: 2,
                found: frames.len(),
            });
        }
        let mut out = Vec::with_capacity(frames.len() - 1);
        let mut start = 0;
        while start + 1 < frames.len() {
            let end = (start + SEQUENCE_CHUNK + 1).min(frames.len());
            let chunk = &frames[start..end];
            let spectra = exec
                .map(chunk, |f| self.spectrum(f))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let estimates = exec.map_range(chunk.len() - 1, |i| {
                peak_shift(&self.surface(&spectra[i], &spectra[i + 1])?, start + i)
            });
            for e in estimates {
                out.push(e?);
            }
            start = end - 1;
        }
        Ok(out)
    }
}

/// Estimates many independent pairs; results keep the input order.
pub fn estimate_batch(
    pairs: &[(Frame, Frame)],
    config: &CorrelationConfig,
    exec: Execution,
) -> Vec<Result<ShiftEstimate>> {
    exec.map(pairs, |(a, b)| estimate_shift(a, b, config))
}

/// Convenience wrapper: a fresh correlator sized to the first frame.
pub fn estimate_sequence(
    frames: &[Frame],
    config: &CorrelationConfig,
    exec: Execution,
) -> Result<Vec<ShiftEstimate>> {
    let first = frames.first().ok_or(Error::SequenceTooShort {
        needed: 2,
        found: 0,
    })?;
    PhaseCorrelator::new(first.width(), first.height(), *config)?.estimate_sequence(frames, exec)
}
