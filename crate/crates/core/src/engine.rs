//! Multi-trajectory beam tracker.
//!
//! Trajectory 1 is a plain local tracker. Its response `r` drives redirection
//! of the other trajectories: at `r <= delta1` Trajectory 2 restarts its
//! local search at the best global attention candidate, at `r <= delta2`
//! Trajectory 3 restarts at the second one. All trajectories share one
//! template memory that learns only from Trajectory 1.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attention::{self, AttentionMap, AttentionParams, GlobalCandidate};
use crate::error::{Error, Result};
use crate::features::{correlate_region, extract_from_planes, placement_region, FramePlanes, Kernel};
use crate::geom::BBox;
use crate::memory::TemplateMemory;
use crate::par::Exec;
use crate::sequence::{Frame, SequenceDataset};
use crate::synth::MIN_TARGET_SIDE;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub delta1: f64,
    pub delta2: f64,
    pub beam: usize,
    pub search_scale: f64,
    pub scales: Vec<f64>,
    pub scale_penalty: f64,
    pub ltm_capacity: usize,
    pub stm_capacity: usize,
    pub gate_k: f64,
    pub radius_mult: f64,
    pub template_size: usize,
    pub attention_stride: usize,
    pub use_prior: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            delta1: 0.5,
            delta2: 0.6,
            beam: 3,
            search_scale: 4.0,
            scales: vec![0.95, 1.0, 1.05],
            scale_penalty: 0.97,
            ltm_capacity: crate::memory::DEFAULT_LTM_CAPACITY,
            stm_capacity: crate::memory::DEFAULT_STM_CAPACITY,
            gate_k: attention::DEFAULT_GATE_K,
            radius_mult: attention::DEFAULT_RADIUS_MULT,
            template_size: crate::features::DEFAULT_TEMPLATE_SIZE,
            attention_stride: 2,
            use_prior: true,
        }
    }
}

impl TrackerConfig {
    pub fn for_variant(variant: Variant) -> Self {
        let mut cfg = TrackerConfig::default();
        cfg.apply_variant(variant);
        cfg
    }

    pub fn apply_variant(&mut self, variant: Variant) {
        self.beam = variant.beam();
    }

    /// Each threshold must lie in `(0, 1)`. Their order is not enforced so
    /// that `delta1` can be swept across a fixed `delta2`.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        for (name, d) in [("delta1", self.delta1), ("delta2", self.delta2)] {
            if !(d > 0.0 && d < 1.0) {
                return bad(format!("{name} = {d} must lie in (0, 1)"));
            }
        }
        if !(1..=3).contains(&self.beam) {
            return bad(format!("beam = {} must be 1, 2 or 3", self.beam));
        }
        if !(self.search_scale >= 2.0) {
            return bad(format!("search_scale = {} must be at least 2", self.search_scale));
        }
        if self.scales.is_empty() || self.scales.iter().any(|s| !(0.5..=2.0).contains(s)) {
            return bad(format!("scales {:?} must be non-empty and within [0.5, 2]", self.scales));
        }
        if !(self.scale_penalty > 0.0 && self.scale_penalty <= 1.0) {
            return bad(format!("scale_penalty = {} must lie in (0, 1]", self.scale_penalty));
        }
        if self.ltm_capacity < 1 || self.stm_capacity < 1 {
            return bad("memory capacities must be at least 1".into());
        }
        if !(self.gate_k > 0.0) || !(self.radius_mult > 0.0) {
            return bad("gate_k and radius_mult must be positive".into());
        }
        if self.template_size < 4 {
            return bad(format!("template_size = {} must be at least 4", self.template_size));
        }
        if self.attention_stride < 1 {
            return bad("attention_stride must be at least 1".into());
        }
        Ok(())
    }

    pub fn attention_params(&self) -> AttentionParams {
        AttentionParams {
            gate_k: self.gate_k,
            scales: attention::ATTENTION_SCALES.to_vec(),
            radius_mult: self.radius_mult,
            stride: self.attention_stride,
            use_prior: self.use_prior,
        }
    }
}

/// Ablation variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Baseline,
    Gs,
    Bs2t,
    Bs3t,
    Bs3tTsn,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Baseline,
        Variant::Gs,
        Variant::Bs2t,
        Variant::Bs3t,
        Variant::Bs3tTsn,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Baseline => "baseline",
            Variant::Gs => "gs",
            Variant::Bs2t => "bs2t",
            Variant::Bs3t => "bs3t",
            Variant::Bs3tTsn => "bs3t_tsn",
        }
    }

    pub fn beam(&self) -> usize {
        match self {
            Variant::Baseline => 1,
            Variant::Gs | Variant::Bs2t => 2,
            Variant::Bs3t | Variant::Bs3tTsn => 3,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Local,
    #[serde(rename = "global_1")]
    Global1,
    #[serde(rename = "global_2")]
    Global2,
}

impl Source {
    pub const ALL: [Source; 3] = [Source::Local, Source::Global1, Source::Global2];

    pub fn name(&self) -> &'static str {
        match self {
            Source::Local => "local",
            Source::Global1 => "global_1",
            Source::Global2 => "global_2",
        }
    }

    pub fn index(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    #[serde(rename = "box")]
    pub bbox: BBox,
    pub response: f64,
    pub source: Source,
    pub attention_inside: f64,
    pub frame: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub id: usize,
    pub records: Vec<FrameRecord>,
}

impl Trajectory {
    pub fn boxes(&self) -> Vec<BBox> {
        self.records.iter().map(|r| r.bbox).collect()
    }

    pub fn mean_response(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| r.response).sum::<f64>() / self.records.len() as f64
    }

    /// `(box, score)` rows with the response as score.
    pub fn results(&self) -> Vec<(BBox, f64)> {
        self.records.iter().map(|r| (r.bbox, r.response)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalResult {
    pub bbox: BBox,
    pub response: f64,
    pub scale: f64,
}

/// Local search on a frame; see [`local_search_planes`].
pub fn local_search(frame: &Frame, prev: &BBox, mem: &TemplateMemory, cfg: &TrackerConfig) -> LocalResult {
    local_search_planes(&FramePlanes::new(frame), prev, mem, cfg)
}

/// Correlates every distinct memory template at every probe scale over a
/// window of `search_scale` times `prev` centered on `prev`, and recenters on
/// the best penalized peak. Coasts with `r = 0` when nothing is informative.
pub fn local_search_planes(
    planes: &FramePlanes,
    prev: &BBox,
    mem: &TemplateMemory,
    cfg: &TrackerConfig,
) -> LocalResult {
    let coast = LocalResult {
        bbox: *prev,
        response: 0.0,
        scale: 1.0,
    };
    let (fw, fh) = (planes.width as f64, planes.height as f64);
    let (cx, cy) = prev.center();
    let window = BBox::from_center(
        cx.clamp(0.0, fw),
        cy.clamp(0.0, fh),
        prev.w * cfg.search_scale,
        prev.h * cfg.search_scale,
    );
    // Placements stay inside the frame so padded borders never win.
    let window = window.clip_to(fw, fh).unwrap_or(window);
    let templates = attention::distinct_templates(mem);
    let jobs: Vec<(usize, f64)> = (0..templates.len())
        .flat_map(|t| cfg.scales.iter().map(move |&s| (t, s)))
        .collect();
    let maps = Exec::default().map(&jobs, |&(t, s)| {
        let (kw, kh) = Kernel::footprint(prev, s);
        let kernel = Kernel::from_feature(templates[t], kw, kh);
        let (x0, y0, w, h) = placement_region(&window, kw, kh);
        correlate_region(planes, &kernel, x0, y0, w, h, 1, s)
    });

    let mut best: Option<(usize, usize, usize, f64)> = None;
    for (i, map) in maps.iter().enumerate() {
        if map.flat {
            continue;
        }
        let Some((row, col, v)) = map.argmax() else { continue };
        let penalized = if map.scale != 1.0 && v > 0.0 { v * cfg.scale_penalty } else { v };
        if best.is_none_or(|b| penalized > b.3) {
            best = Some((i, row, col, penalized));
        }
    }
    let Some((i, row, col, r)) = best else {
        return coast;
    };
    let map = &maps[i];
    let (px, py) = map.center(row, col);
    let (ox, oy) = map.subcell_offset(row, col);
    let w = (prev.w * map.scale).clamp(MIN_TARGET_SIDE, fw);
    let h = (prev.h * map.scale).clamp(MIN_TARGET_SIDE, fh);
    LocalResult {
        bbox: BBox::from_center(px + ox, py + oy, w, h),
        response: r,
        scale: map.scale,
    }
}

/// Which source each trajectory takes for a Trajectory-1 response `r`.
pub fn plan_sources(r: f64, cfg: &TrackerConfig, num_candidates: usize) -> Vec<Source> {
    (0..cfg.beam)
        .map(|k| match k {
            1 if r <= cfg.delta1 && num_candidates >= 1 => Source::Global1,
            2 if r <= cfg.delta2 && num_candidates >= 2 => Source::Global2,
            _ => Source::Local,
        })
        .collect()
}

/// Memoizes local searches by their starting box within one frame.
struct FrameSearch<'a> {
    planes: &'a FramePlanes,
    mem: &'a TemplateMemory,
    cfg: &'a TrackerConfig,
    cache: HashMap<[u64; 4], LocalResult>,
}

impl<'a> FrameSearch<'a> {
    fn new(planes: &'a FramePlanes, mem: &'a TemplateMemory, cfg: &'a TrackerConfig) -> Self {
        FrameSearch {
            planes,
            mem,
            cfg,
            cache: HashMap::new(),
        }
    }

    fn search(&mut self, from: &BBox) -> LocalResult {
        let key = [from.x.to_bits(), from.y.to_bits(), from.w.to_bits(), from.h.to_bits()];
        let (planes, mem, cfg) = (self.planes, self.mem, self.cfg);
        *self
            .cache
            .entry(key)
            .or_insert_with(|| local_search_planes(planes, from, mem, cfg))
    }
}

/// Memory seeded from the frame-0 box: slot 0 plus one STM copy.
pub fn initial_memory(frame0: &Frame, init: &BBox, cfg: &TrackerConfig) -> Result<TemplateMemory> {
    let planes = FramePlanes::new(frame0);
    let feat = extract_from_planes(&planes, init, cfg.template_size)
        .map_err(|e| Error::Initialization(format!("initial template: {e}")))?;
    if feat.is_degenerate() {
        return Err(Error::Initialization("initial template is flat".into()));
    }
    let mut mem = TemplateMemory::new(feat.clone(), cfg.ltm_capacity, cfg.stm_capacity);
    mem.stm_update(feat);
    Ok(mem)
}

/// Boxes with less than this fraction of their area inside the frame are not
/// sampled into memory: replicate padding would dominate the template.
pub const MIN_VISIBLE_FRACTION: f64 = 0.75;

fn visible_fraction(bbox: &BBox, width: usize, height: usize) -> f64 {
    bbox.clip_to(width as f64, height as f64)
        .map_or(0.0, |c| c.area() / bbox.area())
}

/// STM always learns the new box; LTM tries to admit it when `r > delta2`.
fn update_memory(mem: &mut TemplateMemory, planes: &FramePlanes, bbox: &BBox, r: f64, cfg: &TrackerConfig) {
    if visible_fraction(bbox, planes.width, planes.height) < MIN_VISIBLE_FRACTION {
        return;
    }
    let Ok(feat) = extract_from_planes(planes, bbox, cfg.template_size) else {
        return;
    };
    if r > cfg.delta2 {
        mem.ltm_admit(feat.clone());
    }
    mem.stm_update(feat);
}

fn frame0_truth(dataset: &SequenceDataset) -> Result<BBox> {
    if dataset.len() < 2 {
        return Err(Error::Initialization(format!("{}: need at least 2 frames", dataset.name)));
    }
    if !dataset.present[0] {
        return Err(Error::Initialization(format!("{}: target absent in frame 0", dataset.name)));
    }
    Ok(dataset.truth[0])
}

/// Beam tracker state after the frames seen so far.
pub struct Tracker {
    cfg: TrackerConfig,
    memory: TemplateMemory,
    prev: Vec<BBox>,
    trajectories: Vec<Trajectory>,
}

impl Tracker {
    pub fn new(frame0: &Frame, init: BBox, cfg: TrackerConfig) -> Result<Self> {
        cfg.validate()?;
        if !init.is_valid() {
            return Err(Error::Initialization(format!("invalid initial box {init:?}")));
        }
        let memory = initial_memory(frame0, &init, &cfg)?;
        let beam = cfg.beam;
        Ok(Tracker {
            cfg,
            memory,
            prev: vec![init; beam],
            trajectories: (1..=beam).map(|id| Trajectory { id, records: Vec::new() }).collect(),
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    pub fn memory(&self) -> &TemplateMemory {
        &self.memory
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn into_parts(self) -> (Vec<Trajectory>, TemplateMemory) {
        (self.trajectories, self.memory)
    }

    /// Processes one frame and returns its attention map.
    pub fn step(&mut self, frame: &Frame) -> AttentionMap {
        let cfg = &self.cfg;
        let planes = FramePlanes::new(frame);
        let lead = self.prev[0];
        let mut search = FrameSearch::new(&planes, &self.memory, cfg);
        let first = search.search(&lead);
        let map = attention::attention_map(
            &planes,
            &self.memory,
            Some(lead.center()),
            (lead.w, lead.h),
            &cfg.attention_params(),
        );
        let candidates: Vec<GlobalCandidate> = attention::global_candidates(&map, (lead.w, lead.h), 2);
        let seeded = |search: &mut FrameSearch, rank: usize| search.search(&candidates[rank - 1].bbox);

        let mut results: Vec<(LocalResult, Source)> = Vec::with_capacity(cfg.beam);
        for (k, source) in plan_sources(first.response, cfg, candidates.len()).into_iter().enumerate() {
            let res = match source {
                Source::Local if k == 0 => first,
                Source::Local => search.search(&self.prev[k]),
                Source::Global1 => seeded(&mut search, 1),
                Source::Global2 => seeded(&mut search, 2),
            };
            results.push((res, source));
        }
        for (k, (res, source)) in results.iter().enumerate() {
            self.prev[k] = res.bbox;
            self.trajectories[k].records.push(FrameRecord {
                bbox: res.bbox,
                response: res.response,
                source: *source,
                attention_inside: map.inside(&res.bbox),
                frame: frame.index,
            });
        }
        let (lead_res, _) = results[0];
        update_memory(&mut self.memory, &planes, &lead_res.bbox, lead_res.response, &self.cfg);
        map
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectories: Vec<Trajectory>,
    /// Per processed frame; empty unless requested.
    pub attention: Vec<AttentionMap>,
    pub memory: TemplateMemory,
}

/// Tracks frames `1..T` from the frame-0 truth, keeping every attention map.
pub fn run_sequence(dataset: &SequenceDataset, cfg: &TrackerConfig) -> Result<RunOutput> {
    run_sequence_with(dataset, cfg, true)
}

pub fn run_sequence_with(dataset: &SequenceDataset, cfg: &TrackerConfig, keep_attention: bool) -> Result<RunOutput> {
    let init = frame0_truth(dataset)?;
    let mut tracker = Tracker::new(&dataset.frames[0], init, cfg.clone())?;
    let mut attention = Vec::new();
    for frame in &dataset.frames[1..] {
        let map = tracker.step(frame);
        if keep_attention {
            attention.push(map);
        }
    }
    let (trajectories, memory) = tracker.into_parts();
    Ok(RunOutput {
        trajectories,
        attention,
        memory,
    })
}

/// Runs many sequences with the same config, in input order.
pub fn run_suite(suite: &[SequenceDataset], cfg: &TrackerConfig, exec: Exec) -> Result<Vec<RunOutput>> {
    exec.map(suite, |d| run_sequence_with(d, cfg, false)).into_iter().collect()
}

/// Plain greedy local tracker: local search from the previous box, the same
/// memory updates, no redirection.
pub fn greedy_track(dataset: &SequenceDataset, cfg: &TrackerConfig) -> Result<Trajectory> {
    let init = frame0_truth(dataset)?;
    cfg.validate()?;
    let mut mem = initial_memory(&dataset.frames[0], &init, cfg)?;
    let params = cfg.attention_params();
    let mut prev = init;
    let mut records = Vec::with_capacity(dataset.len() - 1);
    for frame in &dataset.frames[1..] {
        let planes = FramePlanes::new(frame);
        let res = local_search_planes(&planes, &prev, &mem, cfg);
        let map = attention::attention_map(&planes, &mem, Some(prev.center()), (prev.w, prev.h), &params);
        records.push(FrameRecord {
            bbox: res.bbox,
            response: res.response,
            source: Source::Local,
            attention_inside: map.inside(&res.bbox),
            frame: frame.index,
        });
        update_memory(&mut mem, &planes, &res.bbox, res.response, cfg);
        prev = res.bbox;
    }
    Ok(Trajectory { id: 1, records })
}

/// Index of the highest mean response; ties go to the lowest index.
pub fn select_by_response(trajectories: &[Trajectory]) -> usize {
    let mut best = 0;
    for (i, t) in trajectories.iter().enumerate().skip(1) {
        if t.mean_response() > trajectories[best].mean_response() {
            best = i;
        }
    }
    best
}

/// Final trajectory index for the response-selected variants. The TSN
/// variant is resolved by [`crate::tsn::select`].
///
/// GS reports the globally switched trajectory alone: the two-trajectory
/// run without the local baseline to fall back on.
pub fn final_index(variant: Variant, trajectories: &[Trajectory]) -> usize {
    match variant {
        Variant::Baseline => 0,
        Variant::Gs => 1.min(trajectories.len() - 1),
        Variant::Bs2t => select_by_response(&trajectories[..trajectories.len().min(2)]),
        Variant::Bs3t | Variant::Bs3tTsn => select_by_response(trajectories),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::extract_feature;
    use crate::synth::{generate, ScenarioKind, ScenarioSpec};

    fn textured(w: usize, h: usize, seed: u64) -> Frame {
        let mut rng = crate::rng::XorShift64Star::new(seed);
        let raw: Vec<f64> = (0..w * h).map(|_| rng.next_f64()).collect();
        let pixels = (0..w * h)
            .map(|i| {
                let (x, y) = (i % w, i / w);
                let mut s = 0.0;
                let mut n = 0.0;
                for yy in y.saturating_sub(1)..(y + 2).min(h) {
                    for xx in x.saturating_sub(1)..(x + 2).min(w) {
                        s += raw[yy * w + xx];
                        n += 1.0;
                    }
                }
                (s / n) as f32
            })
            .collect();
        Frame::new(w, h, pixels, 0).unwrap()
    }

    fn single_mem(frame: &Frame, b: &BBox) -> TemplateMemory {
        let f = extract_feature(frame, b, 32).unwrap();
        TemplateMemory::new(f, 5, 5)
    }

    #[test]
    fn self_match_gives_unit_response() {
        // box at template resolution, so the kernel is the template itself
        let frame = textured(96, 96, 5);
        let b = BBox::new(30.0, 34.0, 32.0, 32.0);
        let mem = single_mem(&frame, &b);
        let res = local_search(&frame, &b, &mem, &TrackerConfig::default());
        assert!((res.response - 1.0).abs() < 1e-6, "{}", res.response);
        assert!((res.bbox.x - b.x).abs() < 0.5 && (res.bbox.y - b.y).abs() < 0.5);
        assert_eq!(res.scale, 1.0);
    }

    #[test]
    fn flat_frame_coasts() {
        let frame = textured(64, 64, 5);
        let b = BBox::new(20.0, 24.0, 16.0, 16.0);
        let mem = single_mem(&frame, &b);
        let flat = Frame::filled(64, 64, 0.5, 1);
        let res = local_search(&flat, &b, &mem, &TrackerConfig::default());
        assert_eq!(res.response, 0.0);
        assert_eq!(res.bbox, b);
    }

    #[test]
    fn window_outside_frame_is_clamped() {
        let frame = textured(64, 64, 9);
        let b = BBox::new(40.0, 40.0, 16.0, 16.0);
        let mem = single_mem(&frame, &b);
        let far = BBox::new(200.0, 200.0, 16.0, 16.0);
        let res = local_search(&frame, &far, &mem, &TrackerConfig::default());
        assert!(res.response.is_finite());
    }

    #[test]
    fn finds_shifted_target() {
        let frame = textured(64, 64, 3);
        let b = BBox::new(20.0, 20.0, 16.0, 16.0);
        let mem = single_mem(&frame, &b);
        let prev = b.translate(-6.0, 5.0);
        let res = local_search(&frame, &prev, &mem, &TrackerConfig::default());
        assert!(crate::geom::iou(&res.bbox, &b) > 0.9, "{:?}", res.bbox);
    }

    #[test]
    fn redirection_rule() {
        let cfg = TrackerConfig::default();
        use Source::*;
        assert_eq!(plan_sources(0.7, &cfg, 2), vec![Local, Local, Local]);
        assert_eq!(plan_sources(0.55, &cfg, 2), vec![Local, Local, Global2]);
        assert_eq!(plan_sources(0.30, &cfg, 2), vec![Local, Global1, Global2]);
        assert_eq!(plan_sources(0.30, &cfg, 1), vec![Local, Global1, Local]);
        assert_eq!(plan_sources(0.5, &cfg, 2), vec![Local, Global1, Global2]);
        assert_eq!(plan_sources(0.6, &cfg, 2), vec![Local, Local, Global2]);
    }

    #[test]
    fn config_validation() {
        assert!(TrackerConfig::default().validate().is_ok());
        let mut c = TrackerConfig::default();
        c.beam = 4;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = TrackerConfig::default();
        c.delta1 = 1.0;
        assert!(c.validate().is_err());
        let mut c = TrackerConfig::default();
        c.search_scale = 1.5;
        assert!(c.validate().is_err());
        assert_eq!(TrackerConfig::for_variant(Variant::Gs).beam, 2);
    }

    #[test]
    fn absent_first_frame_fails() {
        let mut d = generate(&ScenarioSpec::new(ScenarioKind::Plain, 1)).unwrap();
        d.present[0] = false;
        assert!(matches!(run_sequence(&d, &TrackerConfig::default()), Err(Error::Initialization(_))));
    }

    #[test]
    fn run_shapes_and_determinism() {
        let mut spec = ScenarioSpec::new(ScenarioKind::Occlusion, 2);
        spec.length = 20;
        let d = generate(&spec).unwrap();
        let cfg = TrackerConfig::default();
        let a = run_sequence(&d, &cfg).unwrap();
        let b = run_sequence(&d, &cfg).unwrap();
        assert_eq!(a.trajectories, b.trajectories);
        assert_eq!(a.trajectories.len(), 3);
        assert_eq!(a.attention.len(), 19);
        for t in &a.trajectories {
            assert_eq!(t.records.len(), 19);
            assert!(t.records.iter().enumerate().all(|(i, r)| r.frame == i + 1));
        }
        // tags follow the thresholds of Trajectory 1's response
        let lead = &a.trajectories[0].records;
        for (k, t) in a.trajectories.iter().enumerate().skip(1) {
            for (rec, l) in t.records.iter().zip(lead) {
                match rec.source {
                    Source::Global1 => assert!(k == 1 && l.response <= cfg.delta1),
                    Source::Global2 => assert!(k == 2 && l.response <= cfg.delta2),
                    Source::Local => {}
                }
            }
        }
    }

    #[test]
    fn response_selection() {
        let t = |id, r| Trajectory {
            id,
            records: vec![FrameRecord {
                bbox: BBox::new(0.0, 0.0, 8.0, 8.0),
                response: r,
                source: Source::Local,
                attention_inside: 0.0,
                frame: 1,
            }],
        };
        assert_eq!(select_by_response(&[t(1, 0.2), t(2, 0.8), t(3, 0.5)]), 1);
        assert_eq!(select_by_response(&[t(1, 0.5), t(2, 0.5)]), 0);
        assert_eq!(final_index(Variant::Bs2t, &[t(1, 0.2), t(2, 0.1), t(3, 0.9)]), 0);
        assert_eq!(final_index(Variant::Bs3t, &[t(1, 0.2), t(2, 0.1), t(3, 0.9)]), 2);
    }

    #[test]
    fn variant_names() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("bs4t".parse::<Variant>().is_err());
    }
}
