//! Chain codes to 2D polylines, unit-square normalization, comparison
//! against ground truth and SVG rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chain::{heading_string, ChainRecord, MSCC_FORWARD};
use crate::error::{Error, Result};

pub type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Point>,
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> Point {
        self.points[0]
    }

    pub fn end(&self) -> Point {
        *self.points.last().expect("polyline has at least one point")
    }
}

/// Unit grid step for a heading code.
pub fn heading_vector(iscc: u8) -> Point {
    match iscc {
        0 => (-1.0, 0.0),
        1 => (0.0, 1.0),
        2 => (1.0, 0.0),
        3 => (0.0, -1.0),
        _ => panic!("heading code {iscc} outside 0..=3"),
    }
}

/// Forward records advance one unit along the current heading; turn and
/// no-change records add no point.
pub fn chain_to_points(records: &[ChainRecord]) -> Polyline {
    let mut points = Vec::with_capacity(records.len() + 1);
    let mut at = (0.0, 0.0);
    points.push(at);
    for r in records.iter().filter(|r| r.mscc == MSCC_FORWARD) {
        let (vx, vy) = heading_vector(r.iscc);
        at = (at.0 + vx, at.1 + vy);
        points.push(at);
    }
    Polyline { points }
}

/// Translates to the origin and divides both axes by
/// `max(extent_x, extent_y, 1)`, keeping the aspect ratio.
pub fn normalize(poly: &Polyline) -> Polyline {
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &poly.points {
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }
    let scale = (max_x - min_x).max(max_y - min_y).max(1.0);
    Polyline {
        points: poly
            .points
            .iter()
            .map(|&(x, y)| ((x - min_x) / scale, (y - min_y) / scale))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetrics {
    /// Fraction of compared positions whose `(mscc, iscc)` match.
    pub chain_accuracy: f64,
    /// Distance between the endpoints of the two normalized polylines.
    pub endpoint_error: f64,
    /// Levenshtein distance between the heading digit strings.
    pub heading_edit_distance: usize,
    /// Set when the chain sequences differ in length; accuracy then covers
    /// only the common prefix.
    pub length_mismatch: bool,
    pub compared: usize,
}

/// A chain-code sequence together with its trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub records: Vec<ChainRecord>,
    pub polyline: Polyline,
}

impl Track {
    pub fn from_records(records: Vec<ChainRecord>) -> Self {
        let polyline = normalize(&chain_to_points(&records));
        Self { records, polyline }
    }
}

pub fn compare(predicted: &Track, truth: &Track) -> Result<TrajectoryMetrics> {
    if predicted.records.is_empty() && truth.records.is_empty() {
        return Err(Error::ComparisonUndefined(
            "both chain sequences are empty".into(),
        ));
    }
    if predicted.records.is_empty() || truth.records.is_empty() {
        return Err(Error::ComparisonUndefined(
            "one chain sequence is empty, no positions overlap".into(),
        ));
    }
    if predicted.polyline.is_empty() || truth.polyline.is_empty() {
        return Err(Error::ComparisonUndefined("empty polyline".into()));
    }
    let compared = predicted.records.len().min(truth.records.len());
    let matches = predicted
        .records
        .iter()
        .zip(&truth.records)
        .filter(|(p, t)| p.mscc == t.mscc && p.iscc == t.iscc)
        .count();
    let (px, py) = normalize(&predicted.polyline).end();
    let (tx, ty) = normalize(&truth.polyline).end();
    Ok(TrajectoryMetrics {
        chain_accuracy: matches as f64 / compared as f64,
        endpoint_error: (px - tx).hypot(py - ty),
        heading_edit_distance: strsim::levenshtein(
            &heading_string(&predicted.records),
            &heading_string(&truth.records),
        ),
        length_mismatch: predicted.records.len() != truth.records.len(),
        compared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    pub stroke_width: f64,
    pub canvas_px: u32,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            stroke_width: 2.0,
            canvas_px: 512,
        }
    }
}

const SNAP: f64 = 1e-12;

/// Drops repeated points and interior points of straight runs.
fn vertices(points: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if let Some(&last) = out.last() {
            if (p.0 - last.0).abs() < SNAP && (p.1 - last.1).abs() < SNAP {
                continue;
            }
        }
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let (ux, uy) = (b.0 - a.0, b.1 - a.1);
            let (vx, vy) = (p.0 - b.0, p.1 - b.1);
            if (ux * vy - uy * vx).abs() < SNAP && ux * vx + uy * vy > 0.0 {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

/// Renders a normalized polyline with forward pointing up the page.
pub fn render_svg(poly: &Polyline, options: &SvgOptions) -> String {
    let canvas = f64::from(options.canvas_px);
    let margin = (canvas * 0.05).round();
    let span = canvas - 2.0 * margin;
    let to_px = |(x, y): Point| (margin + x * span, canvas - margin - y * span);

    let verts = vertices(&poly.points);
    let closed = verts.len() >= 4 && {
        let (f, l) = (verts[0], verts[verts.len() - 1]);
        (f.0 - l.0).abs() < SNAP && (f.1 - l.1).abs() < SNAP
    };

    let mut d = String::new();
    let drawn = if closed {
        &verts[..verts.len() - 1]
    } else {
        &verts[..]
    };
    for (i, &p) in drawn.iter().enumerate() {
        let (x, y) = to_px(p);
        let cmd = if i == 0 { 'M' } else { 'L' };
        if i > 0 {
            d.push(' ');
        }
        let _ = write!(d, "{cmd} {x:.3} {y:.3}");
    }
    if closed {
        d.push_str(" Z");
    }

    let (sx, sy) = to_px(poly.start());
    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{c}\" height=\"{c}\" viewBox=\"0 0 {c} {c}\">",
        c = options.canvas_px
    );
    let _ = writeln!(
        svg,
        "  <rect x=\"0\" y=\"0\" width=\"{c}\" height=\"{c}\" fill=\"white\"/>",
        c = options.canvas_px
    );
    let _ = writeln!(
        svg,
        "  <path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"{:.3}\" stroke-linejoin=\"round\" stroke-linecap=\"round\"/>",
        options.stroke_width
    );
    let _ = writeln!(
        svg,
        "  <circle cx=\"{sx:.3}\" cy=\"{sy:.3}\" r=\"{:.3}\" fill=\"red\"/>",
        options.stroke_width * 2.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// On-disk trajectory: normalized points plus the heading string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub points: Vec<[f64; 2]>,
    pub chain: String,
}

impl TrajectoryFile {
    pub fn new(records: &[ChainRecord], normalized: &Polyline) -> Self {
        Self {
            points: normalized.points.iter().map(|&(x, y)| [x, y]).collect(),
            chain: heading_string(records),
        }
    }

    pub fn polyline(&self) -> Result<Polyline> {
        Polyline::new(self.points.iter().map(|&[x, y]| (x, y)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{fold_dx, ChainConfig};
    use proptest::prelude::*;

    fn rec(mscc: u8, iscc: u8) -> ChainRecord {
        ChainRecord {
            pair_index: 0,
            mscc,
            iscc,
            dx: 0,
        }
    }

    fn records(codes: &[(u8, u8)]) -> Vec<ChainRecord> {
        codes
            .iter()
            .enumerate()
            .map(|(i, &(m, h))| ChainRecord {
                pair_index: i,
                mscc: m,
                iscc: h,
                dx: 0,
            })
            .collect()
    }

    #[test]
    fn straight_line() {
        let p = chain_to_points(&[rec(1, 1); 5]);
        assert_eq!(p.points.len(), 6);
        assert_eq!(p.end(), (0.0, 5.0));
    }

    #[test]
    fn forward_left_forward() {
        let p = chain_to_points(&records(&[(1, 1), (0, 0), (1, 0)]));
        assert_eq!(p.points, vec![(0.0, 0.0), (0.0, 1.0), (-1.0, 1.0)]);
    }

    #[test]
    fn empty_records_give_origin() {
        assert_eq!(chain_to_points(&[]).points, vec![(0.0, 0.0)]);
    }

    #[test]
    fn normalize_examples() {
        let line = Polyline::new(vec![(0.0, 0.0), (0.0, 10.0)]).unwrap();
        assert_eq!(normalize(&line).points, vec![(0.0, 0.0), (0.0, 1.0)]);

        let single = Polyline::new(vec![(3.0, -2.0)]).unwrap();
        assert_eq!(normalize(&single).points, vec![(0.0, 0.0)]);

        let l = Polyline::new(vec![(0.0, 0.0), (0.0, 4.0), (-2.0, 4.0)]).unwrap();
        assert_eq!(
            normalize(&l).points,
            vec![(0.5, 0.0), (0.5, 1.0), (0.0, 1.0)]
        );
    }

    #[test]
    fn compare_identical() {
        let t = Track::from_records(records(&[(1, 1), (0, 0), (3, 0), (1, 0)]));
        let m = compare(&t, &t).unwrap();
        assert_eq!(m.chain_accuracy, 1.0);
        assert_eq!(m.endpoint_error, 0.0);
        assert_eq!(m.heading_edit_distance, 0);
        assert!(!m.length_mismatch);
    }

    #[test]
    fn compare_one_wrong_of_ten() {
        let truth = Track::from_records(vec![rec(1, 1); 10]);
        let mut p = vec![rec(1, 1); 10];
        p[6] = rec(3, 1);
        let m = compare(&Track::from_records(p), &truth).unwrap();
        assert!((m.chain_accuracy - 0.9).abs() < 1e-15);
    }

    #[test]
    fn compare_heading_edit_distance() {
        let p = Track::from_records(records(&[(1, 1), (1, 1), (0, 0), (1, 0)]));
        let t = Track::from_records(records(&[(1, 1), (0, 0), (1, 0), (1, 0)]));
        assert_eq!(heading_string(&p.records), "1100");
        assert_eq!(heading_string(&t.records), "1000");
        assert_eq!(compare(&p, &t).unwrap().heading_edit_distance, 1);
    }

    #[test]
    fn compare_overlap_and_empty() {
        let t = Track::from_records(vec![rec(1, 1); 10]);
        let p = Track::from_records(vec![rec(1, 1); 9]);
        let m = compare(&p, &t).unwrap();
        assert!(m.length_mismatch);
        assert_eq!(m.compared, 9);
        assert_eq!(m.chain_accuracy, 1.0);

        let e = Track::from_records(vec![]);
        assert!(matches!(
            compare(&e, &e),
            Err(Error::ComparisonUndefined(_))
        ));
        assert!(matches!(
            compare(&e, &t),
            Err(Error::ComparisonUndefined(_))
        ));
    }

    #[test]
    fn svg_single_point() {
        let svg = render_svg(
            &Polyline::new(vec![(0.0, 0.0)]).unwrap(),
            &SvgOptions::default(),
        );
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("d=\"M 26.000 486.000\""));
        assert!(!svg.contains(" L "));
        assert!(svg.contains("<circle"));
    }

    #[test]
    fn svg_straight_line_is_one_vertical_segment() {
        let poly = normalize(&chain_to_points(&[rec(1, 1); 7]));
        let svg = render_svg(&poly, &SvgOptions::default());
        assert!(svg.contains("d=\"M 26.000 486.000 L 26.000 26.000\""));
    }

    #[test]
    fn svg_closed_rectangle_golden() {
        let cfg = ChainConfig::default();
        let dx: Vec<(usize, i64)> = [0, 0, 80, 0, 0, 80, 0, 0, 80, 0, 0, 80]
            .into_iter()
            .enumerate()
            .collect();
        let poly = normalize(&chain_to_points(&fold_dx(&dx, &cfg).unwrap()));
        let svg = render_svg(&poly, &SvgOptions::default());
        let golden = concat!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n",
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"512\" height=\"512\" viewBox=\"0 0 512 512\">\n",
            "  <rect x=\"0\" y=\"0\" width=\"512\" height=\"512\" fill=\"white\"/>\n",
            "  <path d=\"M 486.000 486.000 L 486.000 26.000 L 26.000 26.000 L 26.000 486.000 Z\" fill=\"none\" stroke=\"black\" stroke-width=\"2.000\" stroke-linejoin=\"round\" stroke-linecap=\"round\"/>\n",
            "  <circle cx=\"486.000\" cy=\"486.000\" r=\"4.000\" fill=\"red\"/>\n",
            "</svg>\n",
        );
        assert_eq!(svg, golden);
    }

    fn chain_strategy() -> impl Strategy<Value = Vec<ChainRecord>> {
        prop::collection::vec(-100i64..100, 1..80).prop_map(|dxs| {
            let seq: Vec<(usize, i64)> = dxs.into_iter().enumerate().collect();
            fold_dx(&seq, &ChainConfig::default()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn point_count_matches_forward_records(recs in chain_strategy()) {
            let p = chain_to_points(&recs);
            let forwards = recs.iter().filter(|r| r.mscc == MSCC_FORWARD).count();
            prop_assert_eq!(p.points.len(), forwards + 1);
            for w in p.points.windows(2) {
                let step = (w[1].0 - w[0].0).abs() + (w[1].1 - w[0].1).abs();
                prop_assert_eq!(step, 1.0);
            }
        }

        #[test]
        fn normalize_is_idempotent_and_bounded(recs in chain_strategy()) {
            let n = normalize(&chain_to_points(&recs));
            prop_assert_eq!(&normalize(&n), &n);
            for &(x, y) in &n.points {
                prop_assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
            }
        }

        #[test]
        fn render_is_deterministic(recs in chain_strategy()) {
            let n = normalize(&chain_to_points(&recs));
            prop_assert_eq!(render_svg(&n, &SvgOptions::default()), render_svg(&n.clone(), &SvgOptions::default()));
        }
    }
}
