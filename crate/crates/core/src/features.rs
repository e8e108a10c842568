//! Patch descriptors and normalized cross-correlation.
//!
//! Every frame is viewed through three planes: intensity and its horizontal
//! and vertical central differences (replicate padding at the border). A
//! [`TemplateFeature`] resamples the three planes under a box to `T x T` and
//! normalizes each channel to zero mean and unit L2 norm. Correlation scores
//! are the channel mean of per-channel NCC and always lie in `[-1, 1]`.

use crate::error::{Error, Result};
use crate::geom::BBox;
use crate::sequence::Frame;

pub const DEFAULT_TEMPLATE_SIZE: usize = 32;
pub const CHANNELS: usize = 3;
/// Per-pixel variance below which a channel counts as flat.
pub const FLAT_VARIANCE: f64 = 1e-12;

/// Intensity, d/dx and d/dy planes of one frame.
#[derive(Debug, Clone)]
pub struct FramePlanes {
    pub width: usize,
    pub height: usize,
    pub index: usize,
    pub planes: [Vec<f64>; CHANNELS],
}

impl FramePlanes {
    pub fn new(frame: &Frame) -> Self {
        let (w, h) = (frame.width, frame.height);
        let intensity: Vec<f64> = frame.pixels.iter().map(|&v| f64::from(v)).collect();
        let mut dx = vec![0.0; w * h];
        let mut dy = vec![0.0; w * h];
        for y in 0..h {
            let (up, down) = (y.saturating_sub(1), (y + 1).min(h - 1));
            for x in 0..w {
                let (left, right) = (x.saturating_sub(1), (x + 1).min(w - 1));
                dx[y * w + x] = (intensity[y * w + right] - intensity[y * w + left]) / 2.0;
                dy[y * w + x] = (intensity[down * w + x] - intensity[up * w + x]) / 2.0;
            }
        }
        FramePlanes {
            width: w,
            height: h,
            index: frame.index,
            planes: [intensity, dx, dy],
        }
    }

    #[inline]
    fn clamped(&self, c: usize, x: isize, y: isize) -> f64 {
        let xi = x.clamp(0, self.width as isize - 1) as usize;
        let yi = y.clamp(0, self.height as isize - 1) as usize;
        self.planes[c][yi * self.width + xi]
    }

    /// Bilinear sample at index coordinates (pixel `i` has its center at `i`).
    pub fn bilinear(&self, c: usize, fx: f64, fy: f64) -> f64 {
        let (x0, y0) = (fx.floor(), fy.floor());
        let (ax, ay) = (fx - x0, fy - y0);
        let (xi, yi) = (x0 as isize, y0 as isize);
        let top = self.clamped(c, xi, yi) * (1.0 - ax) + self.clamped(c, xi + 1, yi) * ax;
        let bottom = self.clamped(c, xi, yi + 1) * (1.0 - ax) + self.clamped(c, xi + 1, yi + 1) * ax;
        top * (1.0 - ay) + bottom * ay
    }

    /// Replicate-padded crop of all channels; `(x0, y0)` may be negative.
    fn crop(&self, x0: isize, y0: isize, w: usize, h: usize) -> Crop {
        let planes = std::array::from_fn(|c| {
            let mut out = Vec::with_capacity(w * h);
            for y in 0..h as isize {
                for x in 0..w as isize {
                    out.push(self.clamped(c, x0 + x, y0 + y));
                }
            }
            out
        });
        Crop { width: w, height: h, planes }
    }
}

struct Crop {
    width: usize,
    height: usize,
    planes: [Vec<f64>; CHANNELS],
}

/// Normalizes in place to zero mean and unit L2 norm; returns `false` when flat.
fn normalize(values: &mut [f64]) -> bool {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter_mut().for_each(|v| *v -= mean);
    let ss: f64 = values.iter().map(|v| v * v).sum();
    if ss / n < FLAT_VARIANCE {
        values.iter_mut().for_each(|v| *v = 0.0);
        return false;
    }
    let inv = 1.0 / ss.sqrt();
    values.iter_mut().for_each(|v| *v *= inv);
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemplateFeature {
    pub size: usize,
    /// Raw resampled channels, each `size * size`, row-major.
    pub channels: [Vec<f64>; CHANNELS],
    /// Channel-major concatenation of the normalized channels.
    pub norm: Vec<f64>,
    pub flat: [bool; CHANNELS],
    pub source_frame: usize,
    pub source_box: BBox,
}

impl TemplateFeature {
    /// A feature is degenerate when any of its channels is flat.
    pub fn is_degenerate(&self) -> bool {
        self.flat.iter().any(|&f| f)
    }

    pub fn channel_norm(&self, c: usize) -> &[f64] {
        let n = self.size * self.size;
        &self.norm[c * n..(c + 1) * n]
    }

    /// Channel-averaged inner product of the normalized descriptors.
    pub fn similarity(&self, other: &TemplateFeature) -> f64 {
        debug_assert_eq!(self.norm.len(), other.norm.len());
        dot(&self.norm, &other.norm) / CHANNELS as f64
    }
}

pub fn extract_feature(frame: &Frame, bbox: &BBox, size: usize) -> Result<TemplateFeature> {
    extract_from_planes(&FramePlanes::new(frame), bbox, size)
}

pub fn extract_from_planes(planes: &FramePlanes, bbox: &BBox, size: usize) -> Result<TemplateFeature> {
    if !bbox.is_valid() || bbox.clip_to(planes.width as f64, planes.height as f64).is_none() {
        return Err(Error::Extraction(format!(
            "box {bbox:?} does not overlap the {}x{} frame",
            planes.width, planes.height
        )));
    }
    let (sx, sy) = (bbox.w / size as f64, bbox.h / size as f64);
    let channels: [Vec<f64>; CHANNELS] = std::array::from_fn(|c| {
        let mut out = Vec::with_capacity(size * size);
        for j in 0..size {
            let fy = bbox.y + (j as f64 + 0.5) * sy - 0.5;
            for i in 0..size {
                let fx = bbox.x + (i as f64 + 0.5) * sx - 0.5;
                out.push(planes.bilinear(c, fx, fy));
            }
        }
        out
    });
    let mut norm = Vec::with_capacity(CHANNELS * size * size);
    let mut flat = [false; CHANNELS];
    for (c, ch) in channels.iter().enumerate() {
        let mut v = ch.clone();
        flat[c] = !normalize(&mut v);
        norm.extend(v);
    }
    Ok(TemplateFeature {
        size,
        channels,
        norm,
        flat,
        source_frame: planes.index,
        source_box: *bbox,
    })
}

/// A template resampled to a pixel footprint, ready for sliding correlation.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub width: usize,
    pub height: usize,
    pub channels: [Vec<f64>; CHANNELS],
    pub degenerate: bool,
}

impl Kernel {
    pub fn from_feature(feature: &TemplateFeature, width: usize, height: usize) -> Kernel {
        let (width, height) = (width.max(2), height.max(2));
        let t = feature.size;
        let mut degenerate = feature.is_degenerate();
        let channels = std::array::from_fn(|c| {
            let src = feature.channel_norm(c);
            let at = |x: isize, y: isize| {
                let xi = x.clamp(0, t as isize - 1) as usize;
                let yi = y.clamp(0, t as isize - 1) as usize;
                src[yi * t + xi]
            };
            let mut out = Vec::with_capacity(width * height);
            for j in 0..height {
                let fy = (j as f64 + 0.5) * t as f64 / height as f64 - 0.5;
                let (y0, ay) = (fy.floor(), fy - fy.floor());
                for i in 0..width {
                    let fx = (i as f64 + 0.5) * t as f64 / width as f64 - 0.5;
                    let (x0, ax) = (fx.floor(), fx - fx.floor());
                    let (xi, yi) = (x0 as isize, y0 as isize);
                    let top = at(xi, yi) * (1.0 - ax) + at(xi + 1, yi) * ax;
                    let bottom = at(xi, yi + 1) * (1.0 - ax) + at(xi + 1, yi + 1) * ax;
                    out.push(top * (1.0 - ay) + bottom * ay);
                }
            }
            if !normalize(&mut out) {
                degenerate = true;
            }
            out
        });
        Kernel {
            width,
            height,
            channels,
            degenerate,
        }
    }

    /// Footprint of `feature`'s source box scaled by `scale`, rounded to pixels.
    pub fn footprint(bbox: &BBox, scale: f64) -> (usize, usize) {
        (
            (bbox.w * scale).round().max(2.0) as usize,
            (bbox.h * scale).round().max(2.0) as usize,
        )
    }
}

/// Dense correlation scores over a grid of template placements.
///
/// Cell `(row, col)` is the placement whose center sits at
/// `origin + stride * (col, row)` in frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMap {
    pub origin: (f64, f64),
    pub stride: usize,
    pub cols: usize,
    pub rows: usize,
    pub values: Vec<f64>,
    pub scale: f64,
    /// No placement carried information (degenerate template or all-flat windows).
    pub flat: bool,
}

impl ResponseMap {
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin.0 + (col * self.stride) as f64,
            self.origin.1 + (row * self.stride) as f64,
        )
    }

    /// Row-major first maximum.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.values.iter().enumerate() {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, v)| (i / self.cols, i % self.cols, v))
    }

    /// Parabolic sub-cell offset of a peak, each axis within `[-0.5, 0.5]` cells.
    pub fn subcell_offset(&self, row: usize, col: usize) -> (f64, f64) {
        let fit = |l: f64, c: f64, r: f64| {
            let denom = l - 2.0 * c + r;
            if denom < -1e-12 {
                (0.5 * (l - r) / denom).clamp(-0.5, 0.5)
            } else {
                0.0
            }
        };
        let c = self.get(row, col);
        let ox = if col > 0 && col + 1 < self.cols {
            fit(self.get(row, col - 1), c, self.get(row, col + 1))
        } else {
            0.0
        };
        let oy = if row > 0 && row + 1 < self.rows {
            fit(self.get(row - 1, col), c, self.get(row + 1, col))
        } else {
            0.0
        };
        (ox * self.stride as f64, oy * self.stride as f64)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = k * 4;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in chunks * 4..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// Summed-area tables of a channel and its square, taken about the crop mean.
struct Integral {
    stride: usize,
    sum: Vec<f64>,
    sq: Vec<f64>,
}

impl Integral {
    fn new(values: &[f64], w: usize, h: usize) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let stride = w + 1;
        let mut sum = vec![0.0; stride * (h + 1)];
        let mut sq = vec![0.0; stride * (h + 1)];
        for y in 0..h {
            let (mut rs, mut rq) = (0.0, 0.0);
            for x in 0..w {
                let v = values[y * w + x] - mean;
                rs += v;
                rq += v * v;
                sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + rs;
                sq[(y + 1) * stride + x + 1] = sq[y * stride + x + 1] + rq;
            }
        }
        Integral { stride, sum, sq }
    }

    /// Centered sum of squares of the window at `(x, y)` of size `w x h`.
    #[inline]
    fn window_ss(&self, x: usize, y: usize, w: usize, h: usize) -> f64 {
        let s = self.stride;
        let rect = |t: &[f64]| t[(y + h) * s + x + w] - t[y * s + x + w] - t[(y + h) * s + x] + t[y * s + x];
        let n = (w * h) as f64;
        let s1 = rect(&self.sum);
        (rect(&self.sq) - s1 * s1 / n).max(0.0)
    }
}

/// Correlates `kernel` over every placement whose top-left lies on the
/// integer grid `x0 + stride*i`, `y0 + stride*j` inside a `w x h` region.
pub fn correlate_region(
    planes: &FramePlanes,
    kernel: &Kernel,
    x0: isize,
    y0: isize,
    w: usize,
    h: usize,
    stride: usize,
    scale: f64,
) -> ResponseMap {
    let (kw, kh) = (kernel.width, kernel.height);
    let (w, h) = (w.max(kw), h.max(kh));
    let stride = stride.max(1);
    let cols = (w - kw) / stride + 1;
    let rows = (h - kh) / stride + 1;
    let origin = (x0 as f64 + kw as f64 / 2.0, y0 as f64 + kh as f64 / 2.0);
    if kernel.degenerate {
        return ResponseMap {
            origin,
            stride,
            cols,
            rows,
            values: vec![0.0; cols * rows],
            scale,
            flat: true,
        };
    }
    let crop = planes.crop(x0, y0, w, h);
    let integrals: Vec<Integral> = crop
        .planes
        .iter()
        .map(|p| Integral::new(p, crop.width, crop.height))
        .collect();
    // Column phases of each plane: phase p holds columns p, p + stride, ...
    // so every kernel tap reads a contiguous run of placements.
    let pw = crop.width.div_ceil(stride);
    let phases: Vec<Vec<Vec<f64>>> = crop
        .planes
        .iter()
        .map(|plane| {
            (0..stride)
                .map(|p| {
                    let mut out = vec![0.0; crop.height * pw];
                    for y in 0..crop.height {
                        for (j, x) in (p..crop.width).step_by(stride).enumerate() {
                            out[y * pw + j] = plane[y * crop.width + x];
                        }
                    }
                    out
                })
                .collect()
        })
        .collect();
    let n = (kw * kh) as f64;
    let mut values = vec![0.0; cols * rows];
    let mut informative = false;
    let mut num = vec![0.0; cols];
    let mut total = vec![0.0; cols];
    for row in 0..rows {
        let v = row * stride;
        total.iter_mut().for_each(|t| *t = 0.0);
        for c in 0..CHANNELS {
            num.iter_mut().for_each(|t| *t = 0.0);
            let k = &kernel.channels[c];
            for ky in 0..kh {
                let base = (v + ky) * pw;
                for kx in 0..kw {
                    let wgt = k[ky * kw + kx];
                    let start = base + kx / stride;
                    let src = &phases[c][kx % stride][start..start + cols];
                    num.iter_mut().zip(src).for_each(|(acc, x)| *acc += wgt * x);
                }
            }
            for col in 0..cols {
                let ss = integrals[c].window_ss(col * stride, v, kw, kh);
                if ss / n < FLAT_VARIANCE {
                    continue;
                }
                total[col] += num[col] / ss.sqrt();
                informative = true;
            }
        }
        for col in 0..cols {
            values[row * cols + col] = (total[col] / CHANNELS as f64).clamp(-1.0, 1.0);
        }
    }
    ResponseMap {
        origin,
        stride,
        cols,
        rows,
        values,
        scale,
        flat: !informative,
    }
}

/// Integer placement region covering `region`, at least one kernel in size.
pub fn placement_region(region: &BBox, kw: usize, kh: usize) -> (isize, isize, usize, usize) {
    let x0 = region.x.floor();
    let y0 = region.y.floor();
    let w = ((region.right().ceil() - x0) as usize).max(kw);
    let h = ((region.bottom().ceil() - y0) as usize).max(kh);
    (x0 as isize, y0 as isize, w, h)
}

/// Dense NCC of `feature`, resized to its source footprint times `scale`,
/// against every placement inside `region`.
pub fn ncc_map(frame: &Frame, feature: &TemplateFeature, region: &BBox, scale: f64) -> Result<ResponseMap> {
    let planes = FramePlanes::new(frame);
    ncc_map_planes(&planes, feature, region, scale)
}

pub fn ncc_map_planes(
    planes: &FramePlanes,
    feature: &TemplateFeature,
    region: &BBox,
    scale: f64,
) -> Result<ResponseMap> {
    if !(0.5..=2.0).contains(&scale) {
        return Err(Error::Extraction(format!("probe scale {scale} outside [0.5, 2.0]")));
    }
    if region.clip_to(planes.width as f64, planes.height as f64).is_none() {
        return Err(Error::Extraction(format!("region {region:?} does not overlap the frame")));
    }
    let (kw, kh) = Kernel::footprint(&feature.source_box, scale);
    let kernel = Kernel::from_feature(feature, kw, kh);
    let (x0, y0, w, h) = placement_region(region, kw, kh);
    Ok(correlate_region(planes, &kernel, x0, y0, w, h, 1, scale))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub x: f64,
    pub y: f64,
    pub score: f64,
    pub row: usize,
    pub col: usize,
}

/// Greedy non-maximum suppression over strictly positive cells.
///
/// Peaks come out in descending score, ties in row-major order, and are
/// pairwise at least `min_sep` pixels apart.
pub fn top_peaks(map: &ResponseMap, n: usize, min_sep: f64) -> Vec<Peak> {
    let mut order: Vec<usize> = (0..map.values.len())
        .filter(|&i| map.values[i] > 0.0)
        .collect();
    order.sort_by(|&a, &b| map.values[b].total_cmp(&map.values[a]).then(a.cmp(&b)));
    let mut peaks: Vec<Peak> = Vec::new();
    for i in order {
        if peaks.len() >= n {
            break;
        }
        let (row, col) = (i / map.cols, i % map.cols);
        let (x, y) = map.center(row, col);
        if peaks.iter().all(|p| (p.x - x).hypot(p.y - y) >= min_sep) {
            peaks.push(Peak {
                x,
                y,
                score: map.values[i],
                row,
                col,
            });
        }
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::XorShift64Star;

    fn noise_frame(w: usize, h: usize, seed: u64) -> Frame {
        let mut rng = XorShift64Star::new(seed);
        let px = (0..w * h).map(|_| rng.next_f64() as f32).collect();
        Frame::new(w, h, px, 0).unwrap()
    }

    fn map_from(values: Vec<f64>, cols: usize) -> ResponseMap {
        ResponseMap {
            origin: (0.0, 0.0),
            stride: 1,
            cols,
            rows: values.len() / cols,
            values,
            scale: 1.0,
            flat: false,
        }
    }

    #[test]
    fn constant_patch_is_degenerate() {
        let f = Frame::filled(64, 64, 0.4, 0);
        let feat = extract_feature(&f, &BBox::new(10.0, 10.0, 20.0, 20.0), 32).unwrap();
        assert!(feat.is_degenerate());
        assert!(feat.flat.iter().all(|&x| x));
        assert!(feat.norm.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn extraction_is_deterministic_and_normalized() {
        let f = noise_frame(64, 64, 3);
        let b = BBox::new(7.3, 12.8, 21.0, 17.5);
        let a = extract_feature(&f, &b, 32).unwrap();
        assert_eq!(a, extract_feature(&f, &b, 32).unwrap());
        assert!(!a.is_degenerate());
        for c in 0..CHANNELS {
            let ch = a.channel_norm(c);
            let mean = ch.iter().sum::<f64>() / ch.len() as f64;
            let norm = ch.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(mean.abs() < 1e-9);
            assert!((norm - 1.0).abs() < 1e-9);
        }
        assert!((a.similarity(&a) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ramp_has_constant_positive_dx() {
        let px = (0..64 * 64).map(|k| (k % 64) as f32 / 64.0).collect();
        let f = Frame::new(64, 64, px, 0).unwrap();
        let feat = extract_feature(&f, &BBox::new(10.0, 10.0, 32.0, 32.0), 32).unwrap();
        let dx = &feat.channels[1];
        assert!(dx.iter().all(|&v| (v - 1.0 / 64.0).abs() < 1e-9));
        assert!(feat.channels[2].iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn zero_overlap_is_an_error() {
        let f = noise_frame(64, 64, 1);
        assert!(matches!(
            extract_feature(&f, &BBox::new(64.0, 0.0, 10.0, 10.0), 32),
            Err(Error::Extraction(_))
        ));
    }

    #[test]
    fn self_match_peaks_at_one() {
        let f = noise_frame(96, 80, 5);
        let b = BBox::new(40.0, 30.0, 32.0, 32.0);
        let feat = extract_feature(&f, &b, 32).unwrap();
        let m = ncc_map(&f, &feat, &BBox::new(20.0, 10.0, 70.0, 66.0), 1.0).unwrap();
        let (row, col, v) = m.argmax().unwrap();
        assert!((v - 1.0).abs() < 1e-6, "peak {v}");
        assert_eq!(m.center(row, col), b.center());
    }

    #[test]
    fn negated_copy_scores_minus_one() {
        let f = noise_frame(96, 96, 9);
        let b = BBox::new(10.0, 10.0, 32.0, 32.0);
        let feat = extract_feature(&f, &b, 32).unwrap();
        let neg = f.map(|v| 1.0 - v);
        let m = ncc_map(&neg, &feat, &BBox::new(0.0, 0.0, 96.0, 96.0), 1.0).unwrap();
        let (row, col, v) = m
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| (i / m.cols, i % m.cols, v))
            .min_by(|a, b| a.2.total_cmp(&b.2))
            .unwrap();
        assert!((v + 1.0).abs() < 1e-6, "min {v}");
        assert_eq!(m.center(row, col), b.center());
    }

    #[test]
    fn flat_template_gives_flagged_zero_map() {
        let flat = Frame::filled(64, 64, 0.5, 0);
        let feat = extract_feature(&flat, &BBox::new(0.0, 0.0, 32.0, 32.0), 32).unwrap();
        let m = ncc_map(&noise_frame(64, 64, 2), &feat, &BBox::new(0.0, 0.0, 64.0, 64.0), 1.0).unwrap();
        assert!(m.flat);
        assert!(m.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn flat_windows_score_zero() {
        let feat = extract_feature(&noise_frame(64, 64, 2), &BBox::new(0.0, 0.0, 32.0, 32.0), 32).unwrap();
        let m = ncc_map(&Frame::filled(64, 64, 0.3, 0), &feat, &BBox::new(0.0, 0.0, 64.0, 64.0), 1.0).unwrap();
        assert!(m.flat);
        assert!(m.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scale_out_of_range_rejected() {
        let f = noise_frame(64, 64, 2);
        let feat = extract_feature(&f, &BBox::new(0.0, 0.0, 16.0, 16.0), 32).unwrap();
        assert!(ncc_map(&f, &feat, &BBox::new(0.0, 0.0, 64.0, 64.0), 2.5).is_err());
    }

    #[test]
    fn peaks_single_cell() {
        let mut v = vec![0.0; 25];
        v[12] = 0.7;
        let p = top_peaks(&map_from(v, 5), 3, 1.0);
        assert_eq!(p.len(), 1);
        assert_eq!((p[0].row, p[0].col, p[0].score), (2, 2, 0.7));
    }

    #[test]
    fn peaks_tie_is_row_major() {
        let mut v = vec![0.0; 25];
        v[20] = 0.9;
        v[4] = 0.9;
        let p = top_peaks(&map_from(v, 5), 2, 1.0);
        assert_eq!((p[0].row, p[0].col), (0, 4));
        assert_eq!((p[1].row, p[1].col), (4, 0));
    }

    #[test]
    fn peaks_exhaustion() {
        let mut v = vec![-0.2; 25];
        v[0] = 0.5;
        v[24] = 0.4;
        assert_eq!(top_peaks(&map_from(v, 5), 3, 1.0).len(), 2);
    }

    #[test]
    fn subcell_offset_recovers_parabola_vertex() {
        // samples of 1 - (x - 2.3)^2 at x = 0..5
        let v: Vec<f64> = (0..5).map(|x| 1.0 - (x as f64 - 2.3).powi(2)).collect();
        let m = map_from(v, 5);
        let (ox, oy) = m.subcell_offset(0, 2);
        assert!((ox - 0.3).abs() < 1e-12);
        assert_eq!(oy, 0.0);
    }
}
