//! Loading ordered frame sequences from PGM/PNG files.

use std::io::Write;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageReader};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::frame::{downscale, luminance, Frame};

const EXTENSIONS: [&str; 3] = ["pgm", "pnm", "png"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    pub downscale: usize,
    pub exec: Execution,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            downscale: 1,
            exec: Execution::Parallel,
        }
    }
}

fn has_image_extension(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| EXTENSIONS.iter().any(|x| e.eq_ignore_ascii_case(x)))
}

fn failure(path: &Path, reason: impl ToString) -> Error {
    Error::IngestFailure {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

/// Image files named by a directory or a glob pattern, in lexicographic
/// filename order.
pub fn list_frames(source: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = if source.is_dir() {
        std::fs::read_dir(source)
            .map_err(|e| failure(source, e))?
            .map(|entry| entry.map(|e| e.path()).map_err(|e| failure(source, e)))
            .collect::<Result<Vec<_>>>()?
    } else {
        let pattern = source
            .to_str()
            .ok_or_else(|| failure(source, "path is not valid UTF-8"))?;
        if !pattern.contains(['*', '?', '[']) {
            let reason = if source.exists() {
                "not a directory or glob pattern"
            } else {
                "no such directory"
            };
            return Err(failure(source, reason));
        }
        glob::glob(pattern)
            .map_err(|e| failure(source, e))?
            .map(|p| p.map_err(|e| failure(e.path(), e.error())))
            .collect::<Result<Vec<_>>>()?
    };
    paths.retain(|p| p.is_file() && has_image_extension(p));
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()).then_with(|| a.cmp(b)));
    Ok(paths)
}

/// Decodes one image into a frame. Grayscale samples are scaled by their
/// bit depth; color is reduced to BT.601 luminance.
pub fn load_frame(path: &Path, index: usize) -> Result<Frame> {
    let img = ImageReader::open(path)
        .map_err(|e| failure(path, e))?
        .with_guessed_format()
        .map_err(|e| failure(path, e))?
        .decode()
        .map_err(|e| failure(path, e))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels: Vec<f64> = match &img {
        DynamicImage::ImageLuma8(g) => g.as_raw().iter().map(|&v| f64::from(v) / 255.0).collect(),
        DynamicImage::ImageLuma16(g) => {
            g.as_raw().iter().map(|&v| f64::from(v) / 65535.0).collect()
        }
        DynamicImage::ImageLumaA8(g) => g.pixels().map(|p| f64::from(p.0[0]) / 255.0).collect(),
        DynamicImage::ImageLumaA16(g) => g.pixels().map(|p| f64::from(p.0[0]) / 65535.0).collect(),
        DynamicImage::ImageRgb8(_) | DynamicImage::ImageRgba8(_) => img
            .to_rgb8()
            .pixels()
            .map(|p| luminance(p.0[0].into(), p.0[1].into(), p.0[2].into()))
            .collect(),
        _ => img
            .to_rgb16()
            .pixels()
            .map(|p| {
                let [r, g, b] = p.0.map(|c| f64::from(c) / 257.0);
                luminance(r, g, b)
            })
            .collect(),
    };
    Frame::new(w, h, pixels, index).map_err(|e| failure(path, e))
}

/// Loads, converts and downscales every frame matched by `source`.
pub fn load_sequence(source: &Path, options: &IngestOptions) -> Result<Vec<Frame>> {
    let paths = list_frames(source)?;
    if paths.len() < 2 {
        return Err(Error::SequenceTooShort {
            needed: 2,
            found: paths.len(),
        });
    }
    let indexed: Vec<(usize, &PathBuf)> = paths.iter().enumerate().collect();
    let loaded = options.exec.map(&indexed, |&(i, p)| {
        let raw = load_frame(p, i)?;
        // keep the raw size for the consistency check
        let dims = (raw.width(), raw.height());
        let frame = downscale(&raw, options.downscale)?;
        Ok((dims, frame))
    });

    let mut frames = Vec::with_capacity(loaded.len());
    let mut expected = None;
    for (result, path) in loaded.into_iter().zip(&paths) {
        let ((w, h), frame): ((usize, usize), Frame) = result?;
        let (ew, eh) = *expected.get_or_insert((w, h));
        if (w, h) != (ew, eh) {
            return Err(Error::InconsistentDimensions {
                path: path.clone(),
                expected_w: ew,
                expected_h: eh,
                found_w: w,
                found_h: h,
            });
        }
        frames.push(frame);
    }
    Ok(frames)
}

/// Binary 16-bit PGM (P5, maxval 65535, big-endian samples).
pub fn encode_pgm16(frame: &Frame) -> Vec<u8> {
    let header = format!("P5\n{} {}\n65535\n", frame.width(), frame.height());
    let mut out = Vec::with_capacity(header.len() + 2 * frame.pixels().len());
    out.extend_from_slice(header.as_bytes());
    for &v in frame.pixels() {
        let q = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    out
}

pub fn write_pgm16(frame: &Frame, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode_pgm16(frame))
        .map_err(|e| Error::io(path, e))
}
