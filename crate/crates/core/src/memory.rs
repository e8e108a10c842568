//! Dynamic template pool: a long-term module whose admissions grow the
//! Gram determinant of its templates, and a short-term FIFO whose spread is
//! summarised by a bounded diversity statistic.

use std::collections::VecDeque;

use crate::features::TemplateFeature;
use crate::linalg::Matrix;

pub const DEFAULT_LTM_CAPACITY: usize = 5;
pub const DEFAULT_STM_CAPACITY: usize = 5;
/// Minimum determinant gain for a replacement to count as an increase.
pub const ADMISSION_MARGIN: f64 = 1e-12;

/// Anything the pool can hold: it must expose a pairwise similarity and say
/// whether it carries usable appearance.
pub trait Descriptor: Clone {
    fn similarity(&self, other: &Self) -> f64;
    fn is_degenerate(&self) -> bool;
}

impl Descriptor for TemplateFeature {
    fn similarity(&self, other: &Self) -> f64 {
        TemplateFeature::similarity(self, other)
    }

    fn is_degenerate(&self) -> bool {
        TemplateFeature::is_degenerate(self)
    }
}

/// Plain vector descriptor with the Euclidean inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDescriptor(pub Vec<f64>);

impl Descriptor for RawDescriptor {
    fn similarity(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    fn is_degenerate(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

pub fn gram_matrix<D: Descriptor>(features: &[D]) -> Matrix {
    let n = features.len();
    let mut g = Matrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let s = features[i].similarity(&features[j]);
            g.set(i, j, s);
            g.set(j, i, s);
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Admission {
    /// Filled a free slot.
    Filled { slot: usize },
    /// Replaced the slot whose swap gave the largest determinant.
    Replaced { slot: usize, det_before: f64, det_after: f64 },
    /// No replacement increased the determinant.
    Rejected { best_det: f64, det: f64 },
    /// Candidate has no usable appearance.
    Degenerate,
}

impl Admission {
    pub fn admitted(&self) -> bool {
        matches!(self, Admission::Filled { .. } | Admission::Replaced { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diversity {
    Measured(f64),
    /// Fewer than two templates; diversity is 1 by convention.
    TooFew,
}

impl Diversity {
    pub fn value(&self) -> f64 {
        match self {
            Diversity::Measured(v) => *v,
            Diversity::TooFew => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TemplateMemory<D: Descriptor = TemplateFeature> {
    ltm: Vec<D>,
    ltm_capacity: usize,
    stm: VecDeque<D>,
    stm_capacity: usize,
    gram: Matrix,
}

impl<D: Descriptor> TemplateMemory<D> {
    /// Slot 0 holds `initial` for the memory's whole lifetime.
    pub fn new(initial: D, ltm_capacity: usize, stm_capacity: usize) -> Self {
        let ltm = vec![initial];
        let gram = gram_matrix(&ltm);
        TemplateMemory {
            ltm,
            ltm_capacity: ltm_capacity.max(1),
            stm: VecDeque::with_capacity(stm_capacity),
            stm_capacity: stm_capacity.max(1),
            gram,
        }
    }

    pub fn ltm(&self) -> &[D] {
        &self.ltm
    }

    pub fn stm(&self) -> impl ExactSizeIterator<Item = &D> + '_ {
        self.stm.iter()
    }

    pub fn initial(&self) -> &D {
        &self.ltm[0]
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn ltm_determinant(&self) -> f64 {
        self.gram.determinant()
    }

    /// Long-term templates followed by short-term ones, oldest first.
    pub fn all(&self) -> impl Iterator<Item = &D> + '_ {
        self.ltm.iter().chain(self.stm.iter())
    }

    pub fn ltm_admit(&mut self, cand: D) -> Admission {
        if cand.is_degenerate() {
            return Admission::Degenerate;
        }
        let sims: Vec<f64> = self.ltm.iter().map(|f| cand.similarity(f)).collect();
        let self_sim = cand.similarity(&cand);
        if self.ltm.len() < self.ltm_capacity {
            let n = self.ltm.len();
            let mut g = Matrix::zeros(n + 1);
            for i in 0..n {
                for j in 0..n {
                    g.set(i, j, self.gram.get(i, j));
                }
                g.set(i, n, sims[i]);
                g.set(n, i, sims[i]);
            }
            g.set(n, n, self_sim);
            self.gram = g;
            self.ltm.push(cand);
            return Admission::Filled { slot: n };
        }

        let det = self.gram.determinant();
        let mut best: Option<(usize, f64, Matrix)> = None;
        for slot in 1..self.ltm.len() {
            let mut g = self.gram.clone();
            for k in 0..self.ltm.len() {
                let s = if k == slot { self_sim } else { sims[k] };
                g.set(slot, k, s);
                g.set(k, slot, s);
            }
            let d = g.determinant();
            if best.as_ref().is_none_or(|(_, bd, _)| d > *bd) {
                best = Some((slot, d, g));
            }
        }
        match best {
            Some((slot, d, g)) if d > det + ADMISSION_MARGIN => {
                self.ltm[slot] = cand;
                self.gram = g;
                Admission::Replaced {
                    slot,
                    det_before: det,
                    det_after: d,
                }
            }
            other => Admission::Rejected {
                best_det: other.map_or(f64::NEG_INFINITY, |(_, d, _)| d),
                det,
            },
        }
    }

    pub fn stm_update(&mut self, feat: D) {
        if self.stm.len() == self.stm_capacity {
            self.stm.pop_front();
        }
        self.stm.push_back(feat);
    }

    pub fn stm_diversity(&self) -> Diversity {
        let n = self.stm.len();
        if n < 2 {
            return Diversity::TooFew;
        }
        let items: Vec<D> = self.stm.iter().cloned().collect();
        let g = gram_matrix(&items);
        let g_max = g.data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if g_max <= 0.0 {
            return Diversity::Measured(1.0);
        }
        let off: f64 = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| g.get(i, j)).sum();
        let nf = n as f64;
        Diversity::Measured((1.0 - 2.0 / (nf * (nf + 1.0) * g_max) * off).clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::XorShift64Star;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> RawDescriptor {
        RawDescriptor(xs.to_vec())
    }

    fn unit(rng: &mut XorShift64Star, dim: usize) -> RawDescriptor {
        let mut x: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        x.iter_mut().for_each(|a| *a /= n);
        RawDescriptor(x)
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])]);
        assert_eq!(g.data, vec![1.0, 0.0, 0.0, 1.0]);
        let g = gram_matrix(&[v(&[1.0, 0.0]), v(&[1.0, 0.0])]);
        assert_eq!(g.data, vec![1.0; 4]);
        let g = gram_matrix(&[v(&[1.0, 0.0]), v(&[0.6, 0.8])]);
        assert!((g.get(0, 1) - 0.6).abs() < 1e-15 && (g.get(1, 0) - 0.6).abs() < 1e-15);
        assert!((g.determinant() - 0.64).abs() < 1e-9);
    }

    fn full_pair() -> TemplateMemory<RawDescriptor> {
        let mut m = TemplateMemory::new(v(&[1.0, 0.0]), 2, 3);
        assert_eq!(m.ltm_admit(v(&[0.6, 0.8])), Admission::Filled { slot: 1 });
        m
    }

    #[test]
    fn admit_replaces_when_volume_grows() {
        let mut m = full_pair();
        let a = m.ltm_admit(v(&[0.0, 1.0]));
        match a {
            Admission::Replaced { slot, det_before, det_after } => {
                assert_eq!(slot, 1);
                assert!((det_before - 0.64).abs() < 1e-9);
                assert!((det_after - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(m.ltm()[1], v(&[0.0, 1.0]));
    }

    #[test]
    fn admit_rejects_duplicate_of_protected_slot() {
        let mut m = full_pair();
        match m.ltm_admit(v(&[1.0, 0.0])) {
            Admission::Rejected { best_det, det } => {
                assert!(best_det.abs() < 1e-9);
                assert!((det - 0.64).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(m.ltm(), &[v(&[1.0, 0.0]), v(&[0.6, 0.8])]);
    }

    #[test]
    fn degenerate_candidate_has_own_reason() {
        let mut m = full_pair();
        assert_eq!(m.ltm_admit(v(&[0.0, 0.0])), Admission::Degenerate);
    }

    #[test]
    fn stm_fifo() {
        let mut m = TemplateMemory::new(v(&[1.0]), 1, 2);
        m.stm_update(v(&[1.0]));
        assert_eq!(m.stm().len(), 1);
        m.stm_update(v(&[2.0]));
        m.stm_update(v(&[3.0]));
        let q: Vec<_> = m.stm().cloned().collect();
        assert_eq!(q, vec![v(&[2.0]), v(&[3.0])]);
    }

    #[test]
    fn stm_age_order() {
        let mut m = TemplateMemory::new(v(&[1.0]), 1, 5);
        for x in [1.0, 2.0, 3.0] {
            m.stm_update(v(&[x]));
        }
        let q: Vec<_> = m.stm().cloned().collect();
        assert_eq!(q, vec![v(&[1.0]), v(&[2.0]), v(&[3.0])]);
    }

    #[test]
    fn diversity_examples() {
        let mut m = TemplateMemory::new(v(&[1.0, 0.0]), 1, 5);
        assert_eq!(m.stm_diversity(), Diversity::TooFew);
        assert_eq!(m.stm_diversity().value(), 1.0);
        m.stm_update(v(&[1.0, 0.0]));
        m.stm_update(v(&[1.0, 0.0]));
        assert!((m.stm_diversity().value() - 2.0 / 3.0).abs() < 1e-9);
        m.stm_update(v(&[1.0, 0.0]));
        assert!((m.stm_diversity().value() - 0.5).abs() < 1e-9);

        let mut o = TemplateMemory::new(v(&[1.0, 0.0]), 1, 5);
        o.stm_update(v(&[1.0, 0.0]));
        o.stm_update(v(&[0.0, 1.0]));
        assert!((o.stm_diversity().value() - 1.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn cache_and_slot_zero_survive_any_sequence(seed in any::<u64>(), steps in 1usize..40) {
            let mut rng = XorShift64Star::new(seed);
            let initial = unit(&mut rng, 6);
            let mut m = TemplateMemory::new(initial.clone(), 4, 3);
            let mut last_full_det: Option<f64> = None;
            for _ in 0..steps {
                let c = unit(&mut rng, 6);
                m.stm_update(c.clone());
                m.ltm_admit(c);
                let fresh = gram_matrix(m.ltm());
                for (a, b) in fresh.data.iter().zip(&m.gram().data) {
                    prop_assert!((a - b).abs() < 1e-12);
                }
                prop_assert!(m.gram().is_symmetric(0.0));
                prop_assert_eq!(&m.ltm()[0], &initial);
                for i in 0..m.ltm().len() {
                    prop_assert!((m.gram().get(i, i) - 1.0).abs() < 1e-9);
                }
                let g = m.stm_diversity().value();
                prop_assert!((0.0..=1.0).contains(&g));
                if m.ltm().len() == 4 {
                    let d = m.ltm_determinant();
                    if let Some(prev) = last_full_det {
                        prop_assert!(d >= prev - 1e-12);
                    }
                    last_full_det = Some(d);
                }
            }
        }
    }
}
