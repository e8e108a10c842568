//! Target-aware attention over the whole frame.
//!
//! Each distinct template in the pool is correlated with the full frame at
//! three footprints around the current target size. Every correlation map
//! `F` is gated as `F * sigmoid(k F)` and the gated maps are averaged,
//! rectified, weighted by a coordinate prior around the point proposal and
//! max-normalized into `[0, 1]`.

use crate::error::{Error, Result};
use crate::features::{correlate_region, FramePlanes, Kernel, Peak, ResponseMap, TemplateFeature};
use crate::geom::BBox;
use crate::memory::TemplateMemory;
use crate::par::Exec;
use crate::sequence::Frame;

pub const DEFAULT_GATE_K: f64 = 4.0;
pub const ATTENTION_SCALES: [f64; 3] = [0.9, 1.0, 1.1];
pub const DEFAULT_RADIUS_MULT: f64 = 2.0;

/// Row-major grid at frame resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn filled(width: usize, height: usize, v: f64) -> Self {
        Grid {
            width,
            height,
            values: vec![v; width * height],
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Row-major first maximum as `(x, y, value)`.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, &v) in self.values.iter().enumerate() {
            if v > best.1 {
                best = (i, v);
            }
        }
        (best.0 % self.width, best.0 / self.width, best.1)
    }

    /// Mean over pixels whose centers fall inside `bbox`; 0 when none do.
    pub fn mean_inside(&self, bbox: &BBox) -> f64 {
        let Some((x0, y0, x1, y1)) = pixel_span(bbox, self.width, self.height) else {
            return 0.0;
        };
        let mut sum = 0.0;
        for y in y0..y1 {
            sum += self.values[y * self.width + x0..y * self.width + x1].iter().sum::<f64>();
        }
        sum / ((x1 - x0) * (y1 - y0)) as f64
    }
}

/// Half-open pixel index span of pixels whose centers lie inside `bbox`.
fn pixel_span(bbox: &BBox, width: usize, height: usize) -> Option<(usize, usize, usize, usize)> {
    let lo = |v: f64, n: usize| ((v - 0.5).ceil().max(0.0) as usize).min(n);
    let hi = |v: f64, n: usize| ((v - 0.5).ceil().max(0.0) as usize).min(n);
    let (x0, x1) = (lo(bbox.x, width), hi(bbox.right(), width));
    let (y0, y1) = (lo(bbox.y, height), hi(bbox.bottom(), height));
    (x1 > x0 && y1 > y0).then_some((x0, y0, x1, y1))
}

/// Binary mask: 1 on pixels whose centers lie inside `bbox`.
pub fn box_mask(width: usize, height: usize, bbox: Option<&BBox>) -> Grid {
    let mut g = Grid::filled(width, height, 0.0);
    if let Some((x0, y0, x1, y1)) = bbox.and_then(|b| pixel_span(b, width, height)) {
        for y in y0..y1 {
            g.values[y * width + x0..y * width + x1].iter_mut().for_each(|v| *v = 1.0);
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams {
    pub gate_k: f64,
    pub scales: Vec<f64>,
    /// Prior radius as a multiple of the larger target side.
    pub radius_mult: f64,
    /// Sampling stride of the correlation grid; values are replicated within
    /// each stride block.
    pub stride: usize,
    pub use_prior: bool,
}

impl Default for AttentionParams {
    fn default() -> Self {
        AttentionParams {
            gate_k: DEFAULT_GATE_K,
            scales: ATTENTION_SCALES.to_vec(),
            radius_mult: DEFAULT_RADIUS_MULT,
            stride: 2,
            use_prior: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionMap {
    pub values: Grid,
    pub point_proposal: Option<(f64, f64)>,
    pub radius: f64,
    /// No template produced positive evidence anywhere.
    pub degenerate: bool,
}

impl AttentionMap {
    pub fn inside(&self, bbox: &BBox) -> f64 {
        self.values.mean_inside(bbox)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalCandidate {
    pub bbox: BBox,
    pub attention_score: f64,
    pub rank: usize,
}

#[inline]
pub fn gate(f: f64, k: f64) -> f64 {
    f / (1.0 + (-k * f).exp())
}

/// Full-frame correlation of `kernel`, one placement centered on every
/// `stride`-th pixel, replicated back to frame resolution.
fn full_frame_ncc(planes: &FramePlanes, kernel: &Kernel, stride: usize) -> (Grid, bool) {
    let (w, h) = (planes.width, planes.height);
    let (hx, hy) = (kernel.width / 2, kernel.height / 2);
    let map = correlate_region(
        planes,
        kernel,
        -(hx as isize),
        -(hy as isize),
        w + kernel.width - 1,
        h + kernel.height - 1,
        stride,
        1.0,
    );
    (expand(&map, w, h), map.flat)
}

fn expand(map: &ResponseMap, w: usize, h: usize) -> Grid {
    let s = map.stride;
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        let row = (y / s).min(map.rows - 1);
        for x in 0..w {
            values.push(map.get(row, (x / s).min(map.cols - 1)));
        }
    }
    Grid {
        width: w,
        height: h,
        values,
    }
}

/// `F * sigmoid(k F)` of the full-frame map of `feat` at its source footprint
/// times `scale`. Returns the grid and whether it is degenerate.
pub fn gated_correlation(frame: &Frame, feat: &TemplateFeature, scale: f64, gate_k: f64) -> (Grid, bool) {
    let planes = FramePlanes::new(frame);
    let (kw, kh) = Kernel::footprint(&feat.source_box, scale);
    gated_full_frame(&planes, &Kernel::from_feature(feat, kw, kh), gate_k, 1)
}

fn gated_full_frame(planes: &FramePlanes, kernel: &Kernel, gate_k: f64, stride: usize) -> (Grid, bool) {
    if kernel.degenerate {
        return (Grid::filled(planes.width, planes.height, 0.0), true);
    }
    let (mut g, flat) = full_frame_ncc(planes, kernel, stride);
    g.values.iter_mut().for_each(|v| *v = gate(*v, gate_k));
    (g, flat)
}

/// Relative-coordinate prior weight of pixel position `(px, py)`.
pub fn prior_weight(px: f64, py: f64, point: (f64, f64), radius: f64) -> f64 {
    let xm = ((px - point.0) / radius).clamp(-1.0, 1.0);
    let ym = ((py - point.1) / radius).clamp(-1.0, 1.0);
    (1.0 - (xm * xm + ym * ym) / 2.0).max(0.0)
}

/// Prior over pixel centers; uniform 1 when there is no point.
pub fn coord_prior(width: usize, height: usize, point: Option<(f64, f64)>, radius: f64) -> Grid {
    let Some(p) = point else {
        return Grid::filled(width, height, 1.0);
    };
    let radius = radius.max(f64::MIN_POSITIVE);
    let mut values = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            values.push(prior_weight(x as f64 + 0.5, y as f64 + 0.5, p, radius));
        }
    }
    Grid { width, height, values }
}

pub(crate) fn distinct_templates(mem: &TemplateMemory) -> Vec<&TemplateFeature> {
    let mut out: Vec<&TemplateFeature> = Vec::new();
    for f in mem.all() {
        if !f.is_degenerate() && !out.iter().any(|g| g.norm == f.norm) {
            out.push(f);
        }
    }
    out
}

pub fn attention_map(
    planes: &FramePlanes,
    mem: &TemplateMemory,
    point: Option<(f64, f64)>,
    target_size: (f64, f64),
    params: &AttentionParams,
) -> AttentionMap {
    let (w, h) = (planes.width, planes.height);
    let radius = params.radius_mult * target_size.0.max(target_size.1);
    let proposal = point.filter(|_| params.use_prior);
    let templates = distinct_templates(mem);
    let zero = || AttentionMap {
        values: Grid::filled(w, h, 0.0),
        point_proposal: proposal,
        radius,
        degenerate: true,
    };
    if templates.is_empty() {
        return zero();
    }

    let jobs: Vec<(&TemplateFeature, f64)> = templates
        .iter()
        .flat_map(|t| params.scales.iter().map(move |&s| (*t, s)))
        .collect();
    let grids = Exec::default().map(&jobs, |(t, s)| {
        let kw = (target_size.0 * s).round().max(2.0) as usize;
        let kh = (target_size.1 * s).round().max(2.0) as usize;
        gated_full_frame(planes, &Kernel::from_feature(t, kw, kh), params.gate_k, params.stride).0
    });
    let mut acc = vec![0.0; w * h];
    for g in &grids {
        acc.iter_mut().zip(&g.values).for_each(|(a, v)| *a += v);
    }
    let inv = 1.0 / grids.len() as f64;
    let prior = coord_prior(w, h, proposal, radius);
    for (a, p) in acc.iter_mut().zip(&prior.values) {
        *a = (*a * inv).max(0.0) * p;
    }
    let max = acc.iter().copied().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return zero();
    }
    acc.iter_mut().for_each(|a| *a /= max);
    AttentionMap {
        values: Grid {
            width: w,
            height: h,
            values: acc,
        },
        point_proposal: proposal,
        radius,
        degenerate: false,
    }
}

/// Boxes of `current_size` centered on the top `n` attention peaks, at
/// least half the larger side apart.
pub fn global_candidates(map: &AttentionMap, current_size: (f64, f64), n: usize) -> Vec<GlobalCandidate> {
    if map.degenerate {
        return Vec::new();
    }
    let g = &map.values;
    let as_response = ResponseMap {
        origin: (0.5, 0.5),
        stride: 1,
        cols: g.width,
        rows: g.height,
        values: g.values.clone(),
        scale: 1.0,
        flat: false,
    };
    let min_sep = current_size.0.max(current_size.1) / 2.0;
    crate::features::top_peaks(&as_response, n, min_sep)
        .into_iter()
        .enumerate()
        .map(|(i, Peak { x, y, score, .. })| GlobalCandidate {
            bbox: BBox::from_center(x, y, current_size.0, current_size.1),
            attention_score: score,
            rank: i + 1,
        })
        .collect()
}

pub fn attention_mae(pred: &AttentionMap, truth_mask: &Grid) -> Result<f64> {
    let p = &pred.values;
    if p.width != truth_mask.width || p.height != truth_mask.height {
        return Err(Error::Structure(format!(
            "attention map is {}x{}, mask is {}x{}",
            p.width, p.height, truth_mask.width, truth_mask.height
        )));
    }
    let total: f64 = p.values.iter().zip(&truth_mask.values).map(|(a, b)| (a - b).abs()).sum();
    Ok(total / p.values.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::extract_from_planes;
    use crate::rng::XorShift64Star;

    fn smooth_noise(rng: &mut XorShift64Star, w: usize, h: usize) -> Vec<f32> {
        let raw: Vec<f64> = (0..w * h).map(|_| rng.next_f64()).collect();
        let mut out = vec![0.0f32; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut s = 0.0;
                let mut n = 0.0;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (xx, yy) = (x as i64 + dx, y as i64 + dy);
                        if xx >= 0 && yy >= 0 && (xx as usize) < w && (yy as usize) < h {
                            s += raw[yy as usize * w + xx as usize];
                            n += 1.0;
                        }
                    }
                }
                out[y * w + x] = (0.2 + 0.6 * s / n) as f32;
            }
        }
        out
    }

    /// Background gradient with `patch` pasted at each of `spots`.
    fn scene(patch: &[f32], pw: usize, spots: &[(usize, usize)]) -> Frame {
        let (w, h) = (96, 96);
        let mut px: Vec<f32> = (0..w * h).map(|i| 0.3 + 0.2 * (i % w) as f32 / w as f32).collect();
        for &(sx, sy) in spots {
            for y in 0..pw {
                for x in 0..pw {
                    px[(sy + y) * w + sx + x] = patch[y * pw + x];
                }
            }
        }
        Frame::new(w, h, px, 0).unwrap()
    }

    fn params(stride: usize) -> AttentionParams {
        AttentionParams {
            stride,
            ..AttentionParams::default()
        }
    }

    #[test]
    fn gate_values() {
        assert_eq!(gate(0.0, 4.0), 0.0);
        assert!((gate(1.0, 4.0) - 0.982_013_790_037_908_5).abs() < 1e-12);
        assert!(gate(0.8, 4.0) > gate(0.5, 4.0));
        assert!(gate(-0.5, 4.0) < 0.0);
    }

    #[test]
    fn gated_zero_on_flat_frame() {
        let mut rng = XorShift64Star::new(1);
        let patch = smooth_noise(&mut rng, 16, 16);
        let f = scene(&patch, 16, &[(40, 40)]);
        let feat = extract_from_planes(&FramePlanes::new(&f), &BBox::new(40.0, 40.0, 16.0, 16.0), 32).unwrap();
        let (g, flat) = gated_correlation(&Frame::filled(96, 96, 0.5, 0), &feat, 1.0, 4.0);
        assert!(flat);
        assert!(g.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn prior_examples() {
        let p = (40.0, 30.0);
        assert_eq!(prior_weight(40.0, 30.0, p, 10.0), 1.0);
        assert!((prior_weight(50.0, 30.0, p, 10.0) - 0.5).abs() < 1e-12);
        assert_eq!(prior_weight(90.0, -40.0, p, 10.0), 0.0);
        let u = coord_prior(40, 40, None, 5.0);
        assert!(u.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn prior_monotone_in_distance() {
        let p = (48.0, 48.0);
        let mut last = 2.0;
        for d in 0..40 {
            let w = prior_weight(48.0 + d as f64, 48.0 + 0.5 * d as f64, p, 20.0);
            assert!(w <= last);
            last = w;
        }
    }

    fn memory_for(f: &Frame, b: BBox) -> TemplateMemory {
        let feat = extract_from_planes(&FramePlanes::new(f), &b, 32).unwrap();
        let mut m = TemplateMemory::new(feat.clone(), 5, 5);
        m.stm_update(feat);
        m
    }

    #[test]
    fn peak_on_sole_copy() {
        let mut rng = XorShift64Star::new(7);
        let patch = smooth_noise(&mut rng, 16, 16);
        let f = scene(&patch, 16, &[(50, 20)]);
        let mem = memory_for(&f, BBox::new(50.0, 20.0, 16.0, 16.0));
        let a = attention_map(&FramePlanes::new(&f), &mem, None, (16.0, 16.0), &params(1));
        assert!(!a.degenerate);
        assert!((a.values.max() - 1.0).abs() < 1e-12);
        let (x, y, _) = a.values.argmax();
        let (cx, cy) = (x as f64 + 0.5, y as f64 + 0.5);
        assert!((cx - 58.0).abs() <= 1.0 && (cy - 28.0).abs() <= 1.0, "peak at {cx},{cy}");
    }

    #[test]
    fn prior_prefers_proposed_copy() {
        let mut rng = XorShift64Star::new(8);
        let patch = smooth_noise(&mut rng, 16, 16);
        let f = scene(&patch, 16, &[(10, 40), (66, 40)]);
        let mem = memory_for(&f, BBox::new(10.0, 40.0, 16.0, 16.0));
        let p = AttentionParams {
            radius_mult: 1.5,
            ..params(1)
        };
        let a = attention_map(&FramePlanes::new(&f), &mem, Some((18.0, 48.0)), (16.0, 16.0), &p);
        assert!(a.values.at(17, 47) > a.values.at(73, 47));
        assert!(a.values.argmax().0 < 48);
    }

    #[test]
    fn far_pixels_are_zero_under_prior() {
        let mut rng = XorShift64Star::new(9);
        let patch = smooth_noise(&mut rng, 16, 16);
        let f = scene(&patch, 16, &[(40, 40)]);
        let mem = memory_for(&f, BBox::new(40.0, 40.0, 16.0, 16.0));
        let point = (48.0, 48.0);
        let a = attention_map(&FramePlanes::new(&f), &mem, Some(point), (16.0, 16.0), &params(2));
        let r = a.radius;
        for y in 0..96 {
            for x in 0..96 {
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                if (px - point.0).abs() >= r && (py - point.1).abs() >= r {
                    assert_eq!(a.values.at(x, y), 0.0);
                }
            }
        }
    }

    #[test]
    fn uniform_frame_is_degenerate() {
        let mut rng = XorShift64Star::new(3);
        let patch = smooth_noise(&mut rng, 16, 16);
        let f = scene(&patch, 16, &[(40, 40)]);
        let mem = memory_for(&f, BBox::new(40.0, 40.0, 16.0, 16.0));
        let flat = Frame::filled(96, 96, 0.5, 0);
        let a = attention_map(&FramePlanes::new(&flat), &mem, None, (16.0, 16.0), &params(1));
        assert!(a.degenerate);
        assert!(a.values.values.iter().all(|&v| v == 0.0));
        assert!(global_candidates(&a, (16.0, 16.0), 2).is_empty());
    }

    #[test]
    fn duplicate_templates_do_not_move_the_map() {
        let mut rng = XorShift64Star::new(4);
        let patch = smooth_noise(&mut rng, 16, 16);
        let f = scene(&patch, 16, &[(30, 30)]);
        let b = BBox::new(30.0, 30.0, 16.0, 16.0);
        let mut mem = memory_for(&f, b);
        let other = extract_from_planes(&FramePlanes::new(&f), &BBox::new(50.0, 10.0, 16.0, 16.0), 32).unwrap();
        mem.stm_update(other);
        let planes = FramePlanes::new(&f);
        let before = attention_map(&planes, &mem, None, (16.0, 16.0), &params(2));
        mem.stm_update(mem.initial().clone());
        let after = attention_map(&planes, &mem, None, (16.0, 16.0), &params(2));
        for (a, b) in before.values.values.iter().zip(&after.values.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn affine_intensity_invariance() {
        let mut rng = XorShift64Star::new(5);
        let patch = smooth_noise(&mut rng, 16, 16);
        let f = scene(&patch, 16, &[(30, 50)]);
        let mem = memory_for(&f, BBox::new(30.0, 50.0, 16.0, 16.0));
        let g = f.map(|v| 0.5 * v + 0.2);
        let p = params(2);
        let a = attention_map(&FramePlanes::new(&f), &mem, Some((38.0, 58.0)), (16.0, 16.0), &p);
        let b = attention_map(&FramePlanes::new(&g), &mem, Some((38.0, 58.0)), (16.0, 16.0), &p);
        for (x, y) in a.values.values.iter().zip(&b.values.values) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    fn synthetic_map(values: Vec<f64>, w: usize) -> AttentionMap {
        let h = values.len() / w;
        AttentionMap {
            values: Grid { width: w, height: h, values },
            point_proposal: None,
            radius: 1.0,
            degenerate: false,
        }
    }

    #[test]
    fn candidates_from_peaks() {
        let mut v = vec![0.0; 40 * 40];
        v[10 * 40 + 12] = 1.0;
        let m = synthetic_map(v.clone(), 40);
        let c = global_candidates(&m, (8.0, 6.0), 2);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].bbox, BBox::from_center(12.5, 10.5, 8.0, 6.0));
        assert_eq!(c[0].rank, 1);

        v[30 * 40 + 5] = 1.0;
        let c = global_candidates(&synthetic_map(v, 40), (8.0, 6.0), 2);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].bbox.center(), (12.5, 10.5));
        assert_eq!(c[1].bbox.center(), (5.5, 30.5));
    }

    #[test]
    fn mae_examples() {
        let truth = Grid {
            width: 4,
            height: 1,
            values: vec![1.0, 0.0, 0.0, 0.0],
        };
        let same = synthetic_map(truth.values.clone(), 4);
        assert_eq!(attention_mae(&same, &truth).unwrap(), 0.0);
        assert_eq!(attention_mae(&synthetic_map(vec![0.0; 4], 4), &truth).unwrap(), 0.25);
        assert_eq!(attention_mae(&synthetic_map(vec![0.5; 4], 4), &truth).unwrap(), 0.5);
        let wrong = Grid::filled(2, 2, 0.0);
        assert!(matches!(attention_mae(&same, &wrong), Err(Error::Structure(_))));
    }

    #[test]
    fn mask_and_inside() {
        let m = box_mask(10, 10, Some(&BBox::new(2.0, 3.0, 4.0, 2.0)));
        assert_eq!(m.values.iter().sum::<f64>(), 8.0);
        assert_eq!(m.mean_inside(&BBox::new(2.0, 3.0, 4.0, 2.0)), 1.0);
        assert_eq!(m.mean_inside(&BBox::new(-20.0, 3.0, 4.0, 2.0)), 0.0);
        assert_eq!(box_mask(10, 10, None).values.iter().sum::<f64>(), 0.0);
    }
}
