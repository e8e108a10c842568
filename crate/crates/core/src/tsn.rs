//! Trajectory selection: per-frame feature encoding, windowed aggregation,
//! a ridge regressor onto mean GIoU, and argmax selection.

use std::fmt::Write as _;
use std::path::Path;

use crate::engine::{Source, Trajectory};
use crate::error::{Error, Result};
use crate::features::{extract_from_planes, FramePlanes, TemplateFeature};
use crate::geom::{giou, iou, BBox};
use crate::linalg::Matrix;
use crate::sequence::{write_atomic, SequenceDataset};

pub const LAYOUT_VERSION: &str = "mttrack-tsn/1";
pub const FRAME_DIM: usize = 11;
pub const AGGREGATE_DIM: usize = 2 * FRAME_DIM;
pub const DEFAULT_WINDOW: usize = 12;
pub const DEFAULT_REG: f64 = 1e-3;

const SOLVE_TOL: f64 = 1e-12;

pub const FEATURE_NAMES: [&str; FRAME_DIM] = [
    "response",
    "attention_inside",
    "initial_similarity",
    "smoothness",
    "cx",
    "cy",
    "w",
    "h",
    "source_local",
    "source_global_1",
    "source_global_2",
];

/// One per-frame feature vector, laid out as [`FEATURE_NAMES`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsnFeatures(pub [f64; FRAME_DIM]);

/// Encodes every record of `traj`. `init` is the frame-0 box the first
/// record's smoothness is measured against.
pub fn encode(
    traj: &Trajectory,
    dataset: &SequenceDataset,
    initial: &TemplateFeature,
    init: BBox,
) -> Vec<TsnFeatures> {
    let (fw, fh) = dataset.frame_size();
    let (fw, fh) = (fw as f64, fh as f64);
    let geo = |v: f64| v.clamp(-1.0, 2.0);
    let mut prev = init;
    traj.records
        .iter()
        .map(|r| {
            let b = r.bbox;
            let sim = dataset
                .frames
                .get(r.frame)
                .and_then(|f| extract_from_planes(&FramePlanes::new(f), &b, initial.size).ok())
                .filter(|f| !f.is_degenerate())
                .map_or(0.0, |f| f.similarity(initial));
            let (cx, cy) = b.center();
            let mut v = [0.0; FRAME_DIM];
            v[0] = r.response;
            v[1] = r.attention_inside;
            v[2] = sim;
            v[3] = iou(&b, &prev);
            v[4] = geo(cx / fw);
            v[5] = geo(cy / fh);
            v[6] = geo(b.w / fw);
            v[7] = geo(b.h / fh);
            v[8..].copy_from_slice(&r.source.one_hot());
            prev = b;
            TsnFeatures(v)
        })
        .collect()
}

/// Non-overlapping windows (the last may be short), each reduced to its
/// per-component mean followed by its per-component minimum.
pub fn window_aggregate(features: &[TsnFeatures], window: usize) -> Vec<Vec<f64>> {
    let window = window.max(1);
    features
        .chunks(window)
        .map(|chunk| {
            let n = chunk.len() as f64;
            let mut mean = [0.0; FRAME_DIM];
            let mut min = [f64::INFINITY; FRAME_DIM];
            for f in chunk {
                for (i, &v) in f.0.iter().enumerate() {
                    mean[i] += v / n;
                    min[i] = min[i].min(v);
                }
            }
            mean.iter().chain(min.iter()).copied().collect()
        })
        .collect()
}

/// Mean GIoU against truth over the present frames of each window; `None`
/// for windows without a present frame.
pub fn window_targets(traj: &Trajectory, dataset: &SequenceDataset, window: usize) -> Vec<Option<f64>> {
    traj.records
        .chunks(window.max(1))
        .map(|chunk| {
            let g: Vec<f64> = chunk
                .iter()
                .filter(|r| dataset.present.get(r.frame).copied().unwrap_or(false))
                .map(|r| giou(&r.bbox, &dataset.truth[r.frame]))
                .collect();
            (!g.is_empty()).then(|| g.iter().sum::<f64>() / g.len() as f64)
        })
        .collect()
}

/// Mean GIoU over the present frames of a whole trajectory.
pub fn true_quality(traj: &Trajectory, dataset: &SequenceDataset) -> f64 {
    let g: Vec<f64> = traj
        .records
        .iter()
        .filter(|r| dataset.present.get(r.frame).copied().unwrap_or(false))
        .map(|r| giou(&r.bbox, &dataset.truth[r.frame]))
        .collect();
    if g.is_empty() {
        0.0
    } else {
        g.iter().sum::<f64>() / g.len() as f64
    }
}

/// Windows and window targets for every trajectory of one run.
#[derive(Debug, Clone)]
pub struct RunSamples {
    pub windows: Vec<Vec<Vec<f64>>>,
    pub targets: Vec<Vec<Option<f64>>>,
    pub quality: Vec<f64>,
}

impl RunSamples {
    pub fn new(
        trajectories: &[Trajectory],
        dataset: &SequenceDataset,
        initial: &TemplateFeature,
        window: usize,
    ) -> Self {
        let init = dataset.truth[0];
        RunSamples {
            windows: trajectories
                .iter()
                .map(|t| window_aggregate(&encode(t, dataset, initial, init), window))
                .collect(),
            targets: trajectories.iter().map(|t| window_targets(t, dataset, window)).collect(),
            quality: trajectories.iter().map(|t| true_quality(t, dataset)).collect(),
        }
    }

    /// Labelled `(window, target)` pairs over all trajectories.
    pub fn labelled(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.windows.iter().zip(&self.targets).flat_map(|(ws, ts)| {
            ws.iter()
                .zip(ts)
                .filter_map(|(w, t)| t.map(|t| (w.as_slice(), t)))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsnModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl TsnModel {
    pub fn intercept_only(c: f64) -> Self {
        TsnModel {
            weights: vec![0.0; AGGREGATE_DIM],
            intercept: c,
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    /// Mean prediction over the windows; the intercept when there are none.
    pub fn score(&self, windows: &[Vec<f64>]) -> f64 {
        if windows.is_empty() {
            return self.intercept;
        }
        windows.iter().map(|w| self.predict(w)).sum::<f64>() / windows.len() as f64
    }

    pub fn scores(&self, run: &RunSamples) -> Vec<f64> {
        run.windows.iter().map(|w| self.score(w)).collect()
    }

    pub fn select(&self, run: &RunSamples) -> usize {
        select(&self.scores(run))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{LAYOUT_VERSION} dim={}\n", self.weights.len());
        for w in self.weights.iter().chain(std::iter::once(&self.intercept)) {
            let _ = writeln!(s, "{w:e}");
        }
        s
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(path, 1, "empty model file"))?;
        let expected = format!("{LAYOUT_VERSION} dim={AGGREGATE_DIM}");
        if header.trim() != expected {
            return Err(Error::Layout {
                expected,
                found: header.trim().to_string(),
            });
        }
        let mut values = Vec::with_capacity(AGGREGATE_DIM + 1);
        for (i, line) in lines {
            let v: f64 = line
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, i + 1, format!("bad coefficient {:?}", line.trim())))?;
            if !v.is_finite() {
                return Err(Error::parse(path, i + 1, "non-finite coefficient"));
            }
            values.push(v);
        }
        if values.len() != AGGREGATE_DIM + 1 {
            return Err(Error::parse(
                path,
                text.lines().count(),
                format!("expected {} values, found {}", AGGREGATE_DIM + 1, values.len()),
            ));
        }
        let intercept = values.pop().unwrap_or_default();
        Ok(TsnModel {
            weights: values,
            intercept,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_text().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, path)
    }
}

/// Ridge regression by normal equations; the intercept is not penalized.
pub fn train(samples: &[(Vec<f64>, f64)], reg: f64) -> Result<TsnModel> {
    let dim = samples.first().map_or(0, |s| s.0.len());
    if dim == 0 || samples.len() < dim + 1 {
        return Err(Error::Solver(format!(
            "need at least {} samples of dimension {dim}, got {}",
            dim + 1,
            samples.len()
        )));
    }
    if samples.iter().any(|(x, _)| x.len() != dim) {
        return Err(Error::Solver("samples have inconsistent dimensions".into()));
    }
    if !(reg >= 0.0 && reg.is_finite()) {
        return Err(Error::Solver(format!("ridge coefficient {reg} must be finite and >= 0")));
    }
    let n = dim + 1;
    let mut a = Matrix::zeros(n);
    let mut b = vec![0.0; n];
    let mut row = vec![0.0; n];
    for (x, y) in samples {
        row[..dim].copy_from_slice(x);
        row[dim] = 1.0;
        for i in 0..n {
            b[i] += row[i] * y;
            for j in i..n {
                a.data[i * n + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            a.data[i * n + j] = a.data[j * n + i];
        }
    }
    for i in 0..dim {
        a.data[i * n + i] += reg;
    }
    let mut sol = a.solve(&b, SOLVE_TOL).ok_or_else(|| {
        Error::Solver(format!(
            "normal equations are rank deficient at reg = {reg}; use a ridge coefficient > 0"
        ))
    })?;
    let intercept = sol.pop().unwrap_or_default();
    Ok(TsnModel {
        weights: sol,
        intercept,
    })
}

/// Trains on every labelled window of `runs`.
pub fn train_on_runs<'a>(runs: impl IntoIterator<Item = &'a RunSamples>, reg: f64) -> Result<TsnModel> {
    let samples: Vec<(Vec<f64>, f64)> = runs
        .into_iter()
        .flat_map(|r| r.labelled().map(|(x, y)| (x.to_vec(), y)))
        .collect();
    train(&samples, reg)
}

/// Argmax with ties going to the lowest index.
pub fn select(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// The selection an all-knowing scorer would make: highest true mean GIoU.
pub fn select_oracle(run: &RunSamples) -> usize {
    select(&run.quality)
}

/// Selection for each run by a model trained on the other folds; run `i`
/// belongs to fold `i % folds`.
pub fn cross_fit_select(runs: &[RunSamples], folds: usize, reg: f64) -> Result<Vec<usize>> {
    let folds = folds.max(2);
    let mut out = vec![0; runs.len()];
    for k in 0..folds {
        let train_runs = runs.iter().enumerate().filter(|(i, _)| i % folds != k).map(|(_, r)| r);
        let model = train_on_runs(train_runs, reg)?;
        for (i, r) in runs.iter().enumerate().filter(|(i, _)| i % folds == k) {
            out[i] = model.select(r);
        }
    }
    Ok(out)
}

/// Pearson correlation; 0 when either side has no variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n == 0 {
        return 0.0;
    }
    let ma = a[..n].iter().sum::<f64>() / n as f64;
    let mb = b[..n].iter().sum::<f64>() / n as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (da, db) = (a[i] - ma, b[i] - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

impl Source {
    pub(crate) fn one_hot(self) -> [f64; 3] {
        let mut v = [0.0; 3];
        v[self.index()] = 1.0;
        v
    }
}
