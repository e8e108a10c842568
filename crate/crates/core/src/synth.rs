//! Seeded synthetic tracking sequences.
//!
//! A frozen smoothed-noise texture moves over a low-frequency background on
//! a sinusoidal path with bounded random-walk jitter. Each scenario kind adds
//! one challenge: a pop-up occluder, an excursion outside the frame, look-alike
//! distractors orbiting the target, or a monotone scale drift. Generation is a
//! pure function of the [`ScenarioSpec`]; all randomness comes from
//! [`XorShift64Star`] and every intensity is quantized to `k / 255`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geom::BBox;
use crate::par::Exec;
use crate::rng::XorShift64Star;
use crate::sequence::{dequantize, quantize, Frame, SequenceDataset, MIN_FRAME_SIDE};

pub const MIN_TARGET_SIDE: f64 = 8.0;
pub const NOISE_AMPLITUDE: f64 = 0.02;
/// Occluders are background-level noise redrawn every frame, so they carry
/// no stable appearance and no edge against the background.
pub const OCCLUDER_AMPLITUDE: f64 = 0.15;
pub const DEFAULT_LENGTH: usize = 50;
pub const DEFAULT_FRAME_SIZE: (usize, usize) = (96, 96);
pub const DEFAULT_TARGET_SIZE: (f64, f64) = (16.0, 16.0);
/// Weight of the target texture inside a distractor texture.
pub const DISTRACTOR_MIX: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioKind {
    Plain,
    Occlusion,
    OutOfView,
    Distractor,
    ScaleChange,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::Plain,
        ScenarioKind::Occlusion,
        ScenarioKind::OutOfView,
        ScenarioKind::Distractor,
        ScenarioKind::ScaleChange,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Plain => "plain",
            ScenarioKind::Occlusion => "occlusion",
            ScenarioKind::OutOfView => "out_of_view",
            ScenarioKind::Distractor => "distractor",
            ScenarioKind::ScaleChange => "scale_change",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Validation(format!("unknown scenario kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub length: usize,
    pub frame_size: (usize, usize),
    pub target_size: (f64, f64),
    pub num_distractors: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, seed: u64) -> Self {
        ScenarioSpec {
            kind,
            length: DEFAULT_LENGTH,
            frame_size: DEFAULT_FRAME_SIZE,
            target_size: DEFAULT_TARGET_SIZE,
            num_distractors: usize::from(kind == ScenarioKind::Distractor),
            seed,
        }
    }

    pub fn name(&self) -> String {
        format!("{}-{:04}", self.kind, self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        let (fw, fh) = self.frame_size;
        let (tw, th) = self.target_size;
        if self.length < 10 {
            return Err(Error::Validation(format!("length {} < 10", self.length)));
        }
        if fw < MIN_FRAME_SIDE || fh < MIN_FRAME_SIDE {
            return Err(Error::Validation(format!("frame {fw}x{fh} below {MIN_FRAME_SIDE} px")));
        }
        if !(tw >= MIN_TARGET_SIDE && th >= MIN_TARGET_SIDE) {
            return Err(Error::Validation(format!("target {tw}x{th} below {MIN_TARGET_SIDE} px")));
        }
        let grow = if self.kind == ScenarioKind::ScaleChange { MAX_SCALE } else { 1.0 };
        if tw * grow * 2.0 > fw as f64 || th * grow * 2.0 > fh as f64 {
            return Err(Error::Validation(format!(
                "target {tw}x{th} does not fit the {fw}x{fh} frame with room to move"
            )));
        }
        Ok(())
    }
}

/// Per-frame facts about the scene beyond the target box.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioMeta {
    /// `distractors[t]` holds each distractor's box at frame `t`.
    pub distractors: Vec<Vec<BBox>>,
    pub occluder: Vec<Option<BBox>>,
    pub scale: Vec<f64>,
    /// Frame ranges `[start, end)` of the occlusion or out-of-view episode.
    pub episodes: Vec<(usize, usize)>,
}

/// Largest scale factor a scale-change scenario can reach.
const MAX_SCALE: f64 = 1.7;

struct Texture {
    w: usize,
    h: usize,
    v: Vec<f64>,
}

impl Texture {
    /// Blurred uniform noise rescaled to mean 0.5 and standard deviation 0.15.
    fn noise(rng: &mut XorShift64Star, w: usize, h: usize) -> Texture {
        let mut v: Vec<f64> = (0..w * h).map(|_| rng.next_f64()).collect();
        for _ in 0..2 {
            v = box_blur(&v, w, h);
        }
        let mut t = Texture { w, h, v };
        t.standardize();
        t
    }

    fn standardize(&mut self) {
        let n = self.v.len() as f64;
        let mean = self.v.iter().sum::<f64>() / n;
        let sd = (self.v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt().max(1e-9);
        self.v.iter_mut().for_each(|x| *x = (0.5 + 0.15 * (*x - mean) / sd).clamp(0.05, 0.95));
    }

    fn mix(&self, other: &Texture, weight: f64) -> Texture {
        let mut t = Texture {
            w: self.w,
            h: self.h,
            v: self.v.iter().zip(&other.v).map(|(a, b)| weight * a + (1.0 - weight) * b).collect(),
        };
        t.standardize();
        t
    }

    fn sample(&self, u: f64, v: f64) -> f64 {
        let at = |x: isize, y: isize| {
            let xi = x.clamp(0, self.w as isize - 1) as usize;
            let yi = y.clamp(0, self.h as isize - 1) as usize;
            self.v[yi * self.w + xi]
        };
        let (x0, y0) = (u.floor(), v.floor());
        let (ax, ay) = (u - x0, v - y0);
        let (xi, yi) = (x0 as isize, y0 as isize);
        let top = at(xi, yi) * (1.0 - ax) + at(xi + 1, yi) * ax;
        let bottom = at(xi, yi + 1) * (1.0 - ax) + at(xi + 1, yi + 1) * ax;
        top * (1.0 - ay) + bottom * ay
    }
}

fn box_blur(v: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for y in 0..h {
        for x in 0..w {
            let (mut s, mut n) = (0.0, 0.0);
            for yy in y.saturating_sub(1)..(y + 2).min(h) {
                for xx in x.saturating_sub(1)..(x + 2).min(w) {
                    s += v[yy * w + xx];
                    n += 1.0;
                }
            }
            out[y * w + x] = s / n;
        }
    }
    out
}

/// Paints `tex` stretched over `bbox` onto pixels whose centers it covers.
fn paint(canvas: &mut [f64], fw: usize, fh: usize, bbox: &BBox, tex: &Texture) {
    let x0 = ((bbox.x - 0.5).ceil().max(0.0)) as usize;
    let y0 = ((bbox.y - 0.5).ceil().max(0.0)) as usize;
    let x1 = ((bbox.right() - 0.5).ceil().max(0.0) as usize).min(fw);
    let y1 = ((bbox.bottom() - 0.5).ceil().max(0.0) as usize).min(fh);
    for y in y0..y1 {
        let v = (y as f64 + 0.5 - bbox.y) / bbox.h * tex.h as f64 - 0.5;
        for x in x0..x1 {
            let u = (x as f64 + 0.5 - bbox.x) / bbox.w * tex.w as f64 - 0.5;
            canvas[y * fw + x] = tex.sample(u, v);
        }
    }
}

/// Replaces `bbox` with the background plus fresh uniform noise.
fn fill_noise(canvas: &mut [f64], background: &[f64], fw: usize, fh: usize, bbox: &BBox, rng: &mut XorShift64Star) {
    let x0 = ((bbox.x - 0.5).ceil().max(0.0)) as usize;
    let y0 = ((bbox.y - 0.5).ceil().max(0.0)) as usize;
    let x1 = ((bbox.right() - 0.5).ceil().max(0.0) as usize).min(fw);
    let y1 = ((bbox.bottom() - 0.5).ceil().max(0.0) as usize).min(fh);
    for y in y0..y1 {
        for x in x0..x1 {
            canvas[y * fw + x] = background[y * fw + x] + rng.uniform(-OCCLUDER_AMPLITUDE, OCCLUDER_AMPLITUDE);
        }
    }
}

/// Smooth periodic path with mean-reverting jitter, kept inside `[lo, hi]`.
struct Path {
    base: f64,
    amp: f64,
    period: f64,
    phase: f64,
}

impl Path {
    fn random(rng: &mut XorShift64Star, lo: f64, hi: f64, max_speed: f64) -> Path {
        let span = (hi - lo).max(0.0);
        let amp = rng.uniform(0.25, 0.45) * span;
        let base = rng.uniform(lo + amp, hi - amp);
        // peak speed amp * TAU / period stays below max_speed
        let min_period = (TAU * amp / max_speed).max(8.0);
        Path {
            base,
            amp,
            period: rng.uniform(min_period, min_period * 1.6),
            phase: rng.uniform(0.0, TAU),
        }
    }

    fn at(&self, t: f64) -> f64 {
        self.base + self.amp * (TAU * t / self.period + self.phase).sin()
    }
}

fn jitter_track(rng: &mut XorShift64Star, n: usize, cap: f64) -> Vec<f64> {
    let mut j = 0.0;
    (0..n)
        .map(|_| {
            let prev = j;
            j = 0.7 * j + rng.uniform(-0.5, 0.5) * cap;
            // a single step never exceeds the cap
            j = prev + (j - prev).clamp(-cap, cap);
            j
        })
        .collect()
}

pub fn generate(spec: &ScenarioSpec) -> Result<SequenceDataset> {
    generate_with_meta(spec).map(|(d, _)| d)
}

pub fn generate_with_meta(spec: &ScenarioSpec) -> Result<(SequenceDataset, ScenarioMeta)> {
    spec.validate()?;
    let mut spec = spec.clone();
    if spec.kind == ScenarioKind::Distractor {
        spec.num_distractors = spec.num_distractors.max(1);
    }
    let mut rng = XorShift64Star::new(spec.seed);
    let (fw, fh) = spec.frame_size;
    let (fwf, fhf) = (fw as f64, fh as f64);
    let (tw, th) = spec.target_size;
    let n = spec.length;

    // background: a few low-frequency plane waves around mid gray
    let waves: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.uniform(0.01, 0.03),
                rng.uniform(-0.5, 0.5) / fwf,
                rng.uniform(-0.5, 0.5) / fhf,
                rng.uniform(0.0, TAU),
            )
        })
        .collect();
    let mut background = vec![0.0; fw * fh];
    for y in 0..fh {
        for x in 0..fw {
            background[y * fw + x] = 0.5
                + waves
                    .iter()
                    .map(|&(a, kx, ky, ph)| a * (TAU * (kx * x as f64 + ky * y as f64) + ph).cos())
                    .sum::<f64>();
        }
    }

    let tex = Texture::noise(&mut rng, tw.round() as usize, th.round() as usize);

    // scale schedule
    let scale: Vec<f64> = if spec.kind == ScenarioKind::ScaleChange {
        let ratio = rng.uniform(1.5, MAX_SCALE);
        let grow = rng.next_f64() < 0.5;
        (0..n)
            .map(|t| {
                let a = t as f64 / (n - 1) as f64;
                if grow {
                    1.0 + (ratio - 1.0) * a
                } else {
                    ratio + (1.0 - ratio) * a
                }
            })
            .collect()
    } else {
        vec![1.0; n]
    };
    let max_scale = scale.iter().copied().fold(1.0, f64::max);
    let (half_w, half_h) = (tw * max_scale / 2.0, th * max_scale / 2.0);
    let margin = 2.0;
    let (xlo, xhi) = (half_w + margin, fwf - half_w - margin);
    let (ylo, yhi) = (half_h + margin, fhf - half_h - margin);

    let max_speed = 0.25 * tw.min(th);
    let px = Path::random(&mut rng, xlo, xhi, max_speed);
    let py = Path::random(&mut rng, ylo, yhi, max_speed);
    let jx = jitter_track(&mut rng, n, 0.1 * tw);
    let jy = jitter_track(&mut rng, n, 0.1 * tw);
    let mut centers: Vec<(f64, f64)> = (0..n)
        .map(|t| {
            let t_f = t as f64;
            (
                (px.at(t_f) + jx[t]).clamp(xlo, xhi),
                (py.at(t_f) + jy[t]).clamp(ylo, yhi),
            )
        })
        .collect();

    let mut meta = ScenarioMeta {
        distractors: vec![Vec::new(); n],
        occluder: vec![None; n],
        scale: scale.clone(),
        episodes: Vec::new(),
    };

    if spec.kind == ScenarioKind::OutOfView {
        let (start, end) = out_of_view_excursion(&mut rng, &mut centers, (fwf, fhf), (tw, th), (xlo, xhi, ylo, yhi));
        meta.episodes.push((start, end));
    }

    let truth: Vec<BBox> = centers
        .iter()
        .zip(&scale)
        .map(|(&(cx, cy), &s)| BBox::from_center(cx, cy, tw * s, th * s))
        .collect();
    let present: Vec<bool> = centers
        .iter()
        .map(|&(cx, cy)| cx >= 0.0 && cx < fwf && cy >= 0.0 && cy < fhf)
        .collect();

    if spec.kind == ScenarioKind::Occlusion {
        let len = (8 + rng.below(5) as usize).min(n / 2);
        let start = 2 + rng.below(n.saturating_sub(len + 4).max(1) as u64) as usize;
        let end = (start + len).min(n);
        let hull = truth[start..end]
            .iter()
            .skip(1)
            .fold(truth[start], |acc, b| acc.enclosing(b));
        let occ = BBox::new(hull.x - 2.0, hull.y - 2.0, hull.w + 4.0, hull.h + 4.0);
        (start..end).for_each(|t| meta.occluder[t] = Some(occ));
        meta.episodes.push((start, end));
    }

    let distractor_tex: Vec<Texture> = (0..spec.num_distractors)
        .map(|_| tex.mix(&Texture::noise(&mut rng, tex.w, tex.h), DISTRACTOR_MIX))
        .collect();
    for _ in 0..spec.num_distractors {
        let radius = rng.uniform(1.5, 2.5) * tw.max(th);
        let omega = rng.uniform(0.6, 1.0) * max_speed / radius * if rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
        let phase = rng.uniform(0.0, TAU);
        for t in 0..n {
            let a = omega * t as f64 + phase;
            let (cx, cy) = (px.at(t as f64), py.at(t as f64));
            let dx = (cx + radius * a.cos()).clamp(xlo, xhi);
            let dy = (cy + radius * a.sin()).clamp(ylo, yhi);
            meta.distractors[t].push(BBox::from_center(dx, dy, tw * scale[t], th * scale[t]));
        }
    }

    let frames: Vec<Frame> = (0..n)
        .map(|t| {
            let mut canvas = background.clone();
            for (b, dt) in meta.distractors[t].iter().zip(&distractor_tex) {
                paint(&mut canvas, fw, fh, b, dt);
            }
            paint(&mut canvas, fw, fh, &truth[t], &tex);
            if let Some(o) = &meta.occluder[t] {
                fill_noise(&mut canvas, &background, fw, fh, o, &mut rng);
            }
            let pixels = canvas
                .iter()
                .map(|&v| {
                    let noisy = v + rng.uniform(-NOISE_AMPLITUDE, NOISE_AMPLITUDE);
                    dequantize(quantize(noisy.clamp(0.0, 1.0) as f32))
                })
                .collect();
            Frame {
                width: fw,
                height: fh,
                pixels,
                index: t,
            }
        })
        .collect();

    let dataset = SequenceDataset::new(spec.name(), frames, truth, present)?;
    Ok((dataset, meta))
}

/// Rewrites `centers` so the target leaves through the nearest side, slides
/// along it outside the frame and re-enters elsewhere on the same side.
/// Returns the `[start, end)` range of frames with the center outside.
fn out_of_view_excursion(
    rng: &mut XorShift64Star,
    centers: &mut [(f64, f64)],
    frame: (f64, f64),
    target: (f64, f64),
    bounds: (f64, f64, f64, f64),
) -> (usize, usize) {
    let n = centers.len();
    let (xlo, xhi, ylo, yhi) = bounds;
    let out_len = 4 + rng.below(5) as usize;
    let shift_frac = rng.uniform(0.3, 0.45) * if rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
    let exit_frac = rng.uniform(0.15, 0.4);

    let exit_at = ((n as f64 * exit_frac) as usize).max(1);
    let from = centers[exit_at - 1];
    // nearest side: 0 left, 1 right, 2 top, 3 bottom
    let depths = [from.0, frame.0 - from.0, from.1, frame.1 - from.1];
    let side = (0..4).min_by(|&a, &b| depths[a].total_cmp(&depths[b])).unwrap_or(0);
    let span = if side < 2 { target.0 } else { target.1 };
    let travel = depths[side] + span;
    let budget = n.saturating_sub(exit_at + out_len + 2).max(2) as f64;
    let speed = (0.4 * span).max(2.0 * travel / budget);
    let ramp = (travel / speed).ceil().max(1.0) as usize;

    let outside = |c: (f64, f64)| match side {
        0 => (-span, c.1),
        1 => (frame.0 + span, c.1),
        2 => (c.0, -span),
        _ => (c.0, frame.1 + span),
    };
    let back_to = match side {
        0 | 1 => (from.0, (from.1 + shift_frac * frame.1).clamp(ylo, yhi)),
        _ => ((from.0 + shift_frac * frame.0).clamp(xlo, xhi), from.1),
    };
    let (exit_point, entry_point) = (outside(from), outside(back_to));
    let lerp = |a: (f64, f64), b: (f64, f64), s: f64| (a.0 + (b.0 - a.0) * s, a.1 + (b.1 - a.1) * s);

    let mut path = Vec::new();
    path.extend((1..=ramp).map(|k| lerp(from, exit_point, k as f64 / ramp as f64)));
    path.extend((1..=out_len).map(|k| lerp(exit_point, entry_point, k as f64 / (out_len + 1) as f64)));
    path.extend((1..=ramp).map(|k| lerp(entry_point, back_to, k as f64 / ramp as f64)));
    let back_at = (exit_at + path.len()).min(n);
    for (t, c) in (exit_at..back_at).zip(&path) {
        centers[t] = *c;
    }
    if back_at < n {
        let offset = (back_to.0 - centers[back_at].0, back_to.1 - centers[back_at].1);
        for c in centers.iter_mut().skip(back_at) {
            *c = ((c.0 + offset.0).clamp(xlo, xhi), (c.1 + offset.1).clamp(ylo, yhi));
        }
    }
    let outside_frame = |t: &usize| {
        let (cx, cy) = centers[*t];
        !(cx >= 0.0 && cx < frame.0 && cy >= 0.0 && cy < frame.1)
    };
    let first = (exit_at..back_at).find(outside_frame);
    let last = (exit_at..back_at).rev().find(outside_frame);
    match (first, last) {
        (Some(a), Some(b)) => (a, b + 1),
        _ => (exit_at, exit_at),
    }
}

/// Base seed and size of the reference suite used for training and the
/// suite-level checks: 8 sequences of each of the 5 kinds.
pub const DEFAULT_SUITE_SEED: u64 = 1000;
pub const DEFAULT_SUITE_PER_KIND: usize = 8;

pub fn default_suite() -> Vec<SequenceDataset> {
    generate_suite(DEFAULT_SUITE_SEED, DEFAULT_SUITE_PER_KIND)
}

/// `per_kind` sequences of every kind, seeds `base_seed + i`, kinds in
/// [`ScenarioKind::ALL`] order.
pub fn generate_suite(base_seed: u64, per_kind: usize) -> Vec<SequenceDataset> {
    generate_suite_with(base_seed, per_kind, &ScenarioKind::ALL, Exec::default())
}

pub fn suite_specs(base_seed: u64, per_kind: usize, kinds: &[ScenarioKind]) -> Vec<ScenarioSpec> {
    kinds
        .iter()
        .flat_map(|&k| (0..per_kind).map(move |i| ScenarioSpec::new(k, base_seed + i as u64)))
        .collect()
}

pub fn generate_suite_with(
    base_seed: u64,
    per_kind: usize,
    kinds: &[ScenarioKind],
    exec: Exec,
) -> Vec<SequenceDataset> {
    let specs = suite_specs(base_seed, per_kind, kinds);
    exec.map(&specs, |s| generate(s).expect("default scenario specs are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::encode_pgm;

    #[test]
    fn deterministic_bytes() {
        let spec = ScenarioSpec::new(ScenarioKind::Distractor, 11);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        for (fa, fb) in a.frames.iter().zip(&b.frames) {
            assert_eq!(encode_pgm(fa), encode_pgm(fb));
        }
    }

    #[test]
    fn plain_is_always_present() {
        let d = generate(&ScenarioSpec::new(ScenarioKind::Plain, 3)).unwrap();
        assert!(d.present.iter().all(|&p| p));
    }

    #[test]
    fn out_of_view_has_absent_frames() {
        for seed in 0..10 {
            let mut spec = ScenarioSpec::new(ScenarioKind::OutOfView, seed);
            spec.length = 100;
            let (d, meta) = generate_with_meta(&spec).unwrap();
            assert!(d.present.iter().any(|&p| !p), "seed {seed}");
            let (a, b) = meta.episodes[0];
            assert!(b > a);
            for t in a..b {
                let (cx, cy) = d.truth[t].center();
                assert!(cx < 0.0 || cy < 0.0 || cx >= 96.0 || cy >= 96.0);
                assert!(!d.present[t]);
            }
        }
    }

    #[test]
    fn occlusion_covers_target_long_enough() {
        for seed in 0..10 {
            let (d, meta) = generate_with_meta(&ScenarioSpec::new(ScenarioKind::Occlusion, seed)).unwrap();
            let covered = (0..d.len())
                .filter(|&t| {
                    meta.occluder[t].is_some_and(|o| o.intersection_area(&d.truth[t]) >= 0.7 * d.truth[t].area())
                })
                .count();
            assert!(covered >= 5, "seed {seed}: {covered} covered frames");
        }
    }

    #[test]
    fn scale_change_ratio() {
        for seed in 0..10 {
            let d = generate(&ScenarioSpec::new(ScenarioKind::ScaleChange, seed)).unwrap();
            let widths: Vec<f64> = d.truth.iter().map(|b| b.w).collect();
            let inc = widths.windows(2).all(|w| w[1] >= w[0]);
            let dec = widths.windows(2).all(|w| w[1] <= w[0]);
            assert!(inc || dec);
            let (lo, hi) = widths.iter().fold((f64::MAX, 0.0f64), |(l, h), &w| (l.min(w), h.max(w)));
            assert!(hi / lo >= 1.5 - 1e-9);
        }
    }

    #[test]
    fn distractor_kind_forces_a_distractor() {
        let mut spec = ScenarioSpec::new(ScenarioKind::Distractor, 1);
        spec.num_distractors = 0;
        let (_, meta) = generate_with_meta(&spec).unwrap();
        assert!(meta.distractors.iter().all(|d| d.len() == 1));
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut s = ScenarioSpec::new(ScenarioKind::Plain, 0);
        s.length = 9;
        assert!(matches!(generate(&s), Err(Error::Validation(_))));
        let mut s = ScenarioSpec::new(ScenarioKind::Plain, 0);
        s.target_size = (6.0, 16.0);
        assert!(generate(&s).is_err());
        let mut s = ScenarioSpec::new(ScenarioKind::Plain, 0);
        s.target_size = (90.0, 90.0);
        assert!(generate(&s).is_err());
    }

    #[test]
    fn suite_shape_and_truth_consistency() {
        let suite = generate_suite(7, 2);
        assert_eq!(suite.len(), 10);
        assert_eq!(suite, generate_suite(7, 2));
        for d in &suite {
            let (w, h) = d.frame_size();
            for (b, &p) in d.truth.iter().zip(&d.present) {
                assert!(b.w >= MIN_TARGET_SIDE && b.h >= MIN_TARGET_SIDE);
                if p {
                    assert!(b.clip_to(w as f64, h as f64).is_some());
                }
            }
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.name().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!("fog".parse::<ScenarioKind>().is_err());
    }
}
