//! Test-only reference implementations, independent of the FFT path.

#![allow(dead_code)]

use std::f64::consts::PI;

use phasechain::Frame;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

/// Direct double-sum 2D DFT with kernel `exp(sign * 2 pi i (ux/W + vy/H))`.
pub fn direct_dft(data: &[Complex64], w: usize, h: usize, sign: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); w * h];
    for v in 0..h {
        for u in 0..w {
            let mut acc = Complex64::default();
            for y in 0..h {
                for x in 0..w {
                    let phase = sign
                        * 2.0
                        * PI
                        * (((u * x) % w) as f64 / w as f64 + ((v * y) % h) as f64 / h as f64);
                    acc += data[y * w + x] * Complex64::from_polar(1.0, phase);
                }
            }
            out[v * w + u] = acc;
        }
    }
    out
}

pub fn frame_to_complex(f: &Frame) -> Vec<Complex64> {
    f.pixels().iter().map(|&p| Complex64::new(p, 0.0)).collect()
}

/// Reference correlation surface: direct DFTs, eps-guarded normalized
/// `conj(A) B`, direct scaled inverse, real part.
pub fn reference_surface(a: &Frame, b: &Frame, eps: f64) -> Vec<f64> {
    let (w, h) = (a.width(), a.height());
    let fa = direct_dft(&frame_to_complex(a), w, h, -1.0);
    let fb = direct_dft(&frame_to_complex(b), w, h, -1.0);
    let r: Vec<Complex64> = fa
        .iter()
        .zip(&fb)
        .map(|(x, y)| {
            let p = x.conj() * y;
            if p.norm() >= eps {
                p / p.norm()
            } else {
                Complex64::default()
            }
        })
        .collect();
    let n = (w * h) as f64;
    direct_dft(&r, w, h, 1.0).iter().map(|c| c.re / n).collect()
}

/// Argmax (first wins) mapped to signed offsets.
pub fn reference_peak(surface: &[f64], w: usize, h: usize) -> (i64, i64) {
    let mut best = 0;
    for (i, &v) in surface.iter().enumerate() {
        if v > surface[best] {
            best = i;
        }
    }
    let signed = |p: usize, n: usize| {
        if p < n / 2 {
            p as i64
        } else {
            p as i64 - n as i64
        }
    };
    (signed(best % w, w), signed(best / w, h))
}

pub fn random_frame(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Frame {
    Frame::from_fn(w, h, 0, |_, _| rng.random::<f64>()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
