//! Tracking benchmark metrics: precision and success curves, AO, SR@0.5,
//! precision/recall/F1 over a confidence sweep, TPR/TNR and MaxGM.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{center_error, iou, BBox};
use crate::sequence::SequenceDataset;

pub const PRECISION_POINTS: usize = 51;
pub const SUCCESS_POINTS: usize = 21;
pub const DEFAULT_PRESENCE_THRESHOLD: f64 = 0.25;
pub const MAX_GM_GRID: usize = 1001;
const SWEEP_POINTS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Fraction of present frames with center error at most `i` pixels.
    pub precision_curve: Vec<f64>,
    /// Fraction of present frames with IoU at least `i / 20`.
    pub success_curve: Vec<f64>,
    pub precision_at_20: f64,
    pub success_auc: f64,
    pub ao: f64,
    pub sr_050: f64,
    pub pr_rc_f1: Vec<PrPoint>,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tpr: f64,
    pub tnr: f64,
    pub max_gm: f64,
    pub presence_threshold: f64,
    pub frames: usize,
    pub includes_frame0: bool,
}

fn ratio(num: usize, den: usize) -> f64 {
    // an empty population is vacuously perfect
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

struct Counts {
    tp: usize,
    fp: usize,
    fn_: usize,
    tn: usize,
    present: usize,
    absent: usize,
}

fn count(frames: &[(f64, f64, bool)], threshold: f64) -> Counts {
    let mut c = Counts {
        tp: 0,
        fp: 0,
        fn_: 0,
        tn: 0,
        present: 0,
        absent: 0,
    };
    for &(overlap, score, present) in frames {
        let reported = score >= threshold;
        if present {
            c.present += 1;
        } else {
            c.absent += 1;
        }
        match (present, reported) {
            (true, true) if overlap > 0.5 => c.tp += 1,
            (_, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    c
}

fn pr_point(frames: &[(f64, f64, bool)], threshold: f64) -> PrPoint {
    let c = count(frames, threshold);
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    PrPoint {
        threshold,
        precision,
        recall,
        f1: f1(precision, recall),
    }
}

/// Trapezoid area under the success curve on its uniform IoU grid.
pub fn auc(curve: &[f64]) -> f64 {
    if curve.len() < 2 {
        return curve.first().copied().unwrap_or(0.0);
    }
    let n = curve.len();
    let interior: f64 = curve[1..n - 1].iter().sum();
    (interior + 0.5 * (curve[0] + curve[n - 1])) / (n - 1) as f64
}

/// Scores `pred` against the dataset. `pred` covers frames `1..T` or `0..T`.
pub fn evaluate(pred: &[(BBox, f64)], dataset: &SequenceDataset, presence_threshold: f64) -> Result<EvalReport> {
    let t = dataset.len();
    let first = if pred.len() + 1 == t {
        1
    } else if pred.len() == t {
        0
    } else {
        return Err(Error::Structure(format!(
            "{}: {} predictions for {} frames (expected {} or {})",
            dataset.name,
            pred.len(),
            t,
            t.saturating_sub(1),
            t
        )));
    };

    let mut overlaps = Vec::new();
    let mut errors = Vec::new();
    let mut frames = Vec::with_capacity(pred.len());
    for (k, (b, score)) in pred.iter().enumerate() {
        let i = first + k;
        let present = dataset.present[i];
        let o = if present { iou(b, &dataset.truth[i]) } else { 0.0 };
        if present {
            overlaps.push(o);
            errors.push(center_error(b, &dataset.truth[i]));
        }
        frames.push((o, *score, present));
    }

    let n = overlaps.len();
    let precision_curve: Vec<f64> = (0..PRECISION_POINTS)
        .map(|px| ratio(errors.iter().filter(|&&e| e <= px as f64).count(), n))
        .collect();
    let success_curve: Vec<f64> = (0..SUCCESS_POINTS)
        .map(|i| {
            let th = i as f64 / (SUCCESS_POINTS - 1) as f64;
            ratio(overlaps.iter().filter(|&&o| o >= th).count(), n)
        })
        .collect();
    let ao = if n == 0 { 1.0 } else { overlaps.iter().sum::<f64>() / n as f64 };
    let sr_050 = ratio(overlaps.iter().filter(|&&o| o > 0.5).count(), n);

    let at = pr_point(&frames, presence_threshold);
    let c = count(&frames, presence_threshold);
    let tpr = ratio(c.tp, c.present);
    let tnr = ratio(c.tn, c.absent);
    Ok(EvalReport {
        precision_at_20: precision_curve[20],
        success_auc: auc(&success_curve),
        precision_curve,
        success_curve,
        ao,
        sr_050,
        pr_rc_f1: (0..SWEEP_POINTS)
            .map(|i| pr_point(&frames, i as f64 / (SWEEP_POINTS - 1) as f64))
            .collect(),
        precision: at.precision,
        recall: at.recall,
        f1: at.f1,
        tpr,
        tnr,
        max_gm: max_gm(tpr, tnr),
        presence_threshold,
        frames: pred.len(),
        includes_frame0: first == 0,
    })
}

/// `max over p in [0, 1]` of `sqrt(((1-p) tpr) ((1-p) tnr + p))` on a
/// 1001-point grid.
pub fn max_gm(tpr: f64, tnr: f64) -> f64 {
    (0..MAX_GM_GRID)
        .map(|i| {
            let p = i as f64 / (MAX_GM_GRID - 1) as f64;
            (((1.0 - p) * tpr) * ((1.0 - p) * tnr + p)).max(0.0).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Field-wise mean of per-sequence reports; MaxGM is recomputed from the
/// mean TPR and TNR.
pub fn mean_report(reports: &[EvalReport]) -> Option<EvalReport> {
    let first = reports.first()?;
    let n = reports.len() as f64;
    let mean = |f: &dyn Fn(&EvalReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let mean_vec = |f: &dyn Fn(&EvalReport) -> &Vec<f64>| {
        (0..f(first).len())
            .map(|i| reports.iter().map(|r| f(r)[i]).sum::<f64>() / n)
            .collect::<Vec<f64>>()
    };
    let tpr = mean(&|r| r.tpr);
    let tnr = mean(&|r| r.tnr);
    Some(EvalReport {
        precision_curve: mean_vec(&|r| &r.precision_curve),
        success_curve: mean_vec(&|r| &r.success_curve),
        precision_at_20: mean(&|r| r.precision_at_20),
        success_auc: mean(&|r| r.success_auc),
        ao: mean(&|r| r.ao),
        sr_050: mean(&|r| r.sr_050),
        pr_rc_f1: (0..first.pr_rc_f1.len())
            .map(|i| PrPoint {
                threshold: first.pr_rc_f1[i].threshold,
                precision: mean(&|r| r.pr_rc_f1[i].precision),
                recall: mean(&|r| r.pr_rc_f1[i].recall),
                f1: mean(&|r| r.pr_rc_f1[i].f1),
            })
            .collect(),
        precision: mean(&|r| r.precision),
        recall: mean(&|r| r.recall),
        f1: mean(&|r| r.f1),
        tpr,
        tnr,
        max_gm: max_gm(tpr, tnr),
        presence_threshold: first.presence_threshold,
        frames: reports.iter().map(|r| r.frames).sum(),
        includes_frame0: reports.iter().all(|r| r.includes_frame0),
    })
}

/// Rows of `px_threshold,precision,iou_threshold,success`; the success
/// columns are blank past the 21 IoU thresholds.
pub fn curves_csv(report: &EvalReport) -> String {
    let mut out = String::from("px_threshold,precision,iou_threshold,success\n");
    let sn = report.success_curve.len();
    for (i, p) in report.precision_curve.iter().enumerate() {
        if i < sn {
            let th = i as f64 / (sn - 1).max(1) as f64;
            out.push_str(&format!("{i},{p:.6},{th:.2},{:.6}\n", report.success_curve[i]));
        } else {
            out.push_str(&format!("{i},{p:.6},,\n"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub name: String,
    pub ao: f64,
    pub sr_050: f64,
    pub success_auc: f64,
}

/// `first - second` for every ordered pair of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub first: String,
    pub second: String,
    pub ao: f64,
    pub sr_050: f64,
    pub success_auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    pub deltas: Vec<DeltaRow>,
}

/// Sorts runs by success AUC, best first (stable for ties), with pairwise
/// deltas in that order.
pub fn compare_runs(reports: &[(String, EvalReport)]) -> Result<Comparison> {
    if reports.len() < 2 {
        return Err(Error::Structure(format!("need at least 2 reports, got {}", reports.len())));
    }
    let mut rows: Vec<CompareRow> = reports
        .iter()
        .map(|(name, r)| CompareRow {
            name: name.clone(),
            ao: r.ao,
            sr_050: r.sr_050,
            success_auc: r.success_auc,
        })
        .collect();
    rows.sort_by(|a, b| b.success_auc.total_cmp(&a.success_auc));
    let mut deltas = Vec::new();
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            deltas.push(DeltaRow {
                first: a.name.clone(),
                second: b.name.clone(),
                ao: a.ao - b.ao,
                sr_050: a.sr_050 - b.sr_050,
                success_auc: a.success_auc - b.success_auc,
            });
        }
    }
    Ok(Comparison { rows, deltas })
}

impl Comparison {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,ao,sr_050,success_auc\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:.6},{:.6},{:.6}\n", r.name, r.ao, r.sr_050, r.success_auc));
        }
        out
    }

    pub fn deltas_csv(&self) -> String {
        let mut out = String::from("first,second,ao,sr_050,success_auc\n");
        for d in &self.deltas {
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{:.6}\n",
                d.first, d.second, d.ao, d.sr_050, d.success_auc
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("comparison serializes")
    }
}
