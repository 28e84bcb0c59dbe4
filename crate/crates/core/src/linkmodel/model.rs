use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FeatureConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Architecture {
    /// σ(w·x + b)
    Linear,
    /// σ(w1·tanh(W0 x + b0) + b1)
    OneHidden { width: usize },
}

impl Default for Architecture {
    fn default() -> Self {
        Architecture::OneHidden { width: 16 }
    }
}

/// Per-feature affine standardization. Dimensions with zero spread are only
/// centred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn identity(dim: usize) -> Self {
        Self { mean: vec![0.0; dim], std: vec![1.0; dim] }
    }

    pub fn fit(rows: &[Vec<f64>], dim: usize) -> Self {
        if rows.is_empty() {
            return Self::identity(dim);
        }
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for r in rows {
            for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
        Self { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(x, (m, s))| if *s > 0.0 { (x - m) / s } else { x - m })
            .collect()
    }
}

/// One training pair after standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub x: Vec<f64>,
    /// 1 when the candidate is the gold parent.
    pub y: f64,
    /// 1 when UOI and candidate share a gold thread.
    pub y_thread: f64,
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Binary cross-entropy of `sigmoid(z)` against `y`, computed stably.
fn bce_with_logit(z: f64, y: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p() - y * z
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerModel {
    pub architecture: Architecture,
    pub dim: usize,
    /// Flat parameter vector; see `ScorerModel::layout`.
    pub params: Vec<f64>,
    pub standardizer: Standardizer,
    pub aux_head: bool,
    pub features: FeatureConfig,
    pub seed: u64,
}

/// Offsets into the flat parameter vector.
#[derive(Debug, Clone, Copy)]
struct Layout {
    hidden: usize,
    w0: usize,
    b0: usize,
    w1: usize,
    b1: usize,
    wt: usize,
    bt: usize,
    len: usize,
}

impl ScorerModel {
    /// A model with seeded random hidden weights (linear models start at
    /// zero).
    pub fn new(architecture: Architecture, features: FeatureConfig, aux_head: bool, seed: u64) -> Self {
        let dim = features.dim();
        let mut m = Self {
            architecture,
            dim,
            params: Vec::new(),
            standardizer: Standardizer::identity(dim),
            aux_head,
            features,
            seed,
        };
        let l = m.layout();
        m.params = vec![0.0; l.len];
        if let Architecture::OneHidden { width } = architecture {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r0 = (6.0 / (dim + width) as f64).sqrt();
            let r1 = (6.0 / (width + 1) as f64).sqrt();
            for p in &mut m.params[l.w0..l.b0] {
                *p = rng.gen_range(-r0..r0);
            }
            for p in &mut m.params[l.w1..l.b1] {
                *p = rng.gen_range(-r1..r1);
            }
            if aux_head {
                for p in &mut m.params[l.wt..l.bt] {
                    *p = rng.gen_range(-r1..r1);
                }
            }
        }
        m
    }

    fn layout(&self) -> Layout {
        let d = self.dim;
        let (hidden, w0, b0, w1) = match self.architecture {
            Architecture::Linear => (d, 0, 0, 0),
            Architecture::OneHidden { width } => (width, 0, width * d, width * d + width),
        };
        let b1 = w1 + hidden;
        let wt = b1 + 1;
        let (bt, len) = if self.aux_head { (wt + hidden, wt + hidden + 1) } else { (wt, wt) };
        Layout { hidden, w0, b0, w1, b1, wt, bt, len }
    }

    pub fn param_count(&self) -> usize {
        self.layout().len
    }

    /// Hidden representation: `tanh(W0 x + b0)`, or `x` itself for linear.
    fn hidden(&self, params: &[f64], l: &Layout, x: &[f64]) -> Vec<f64> {
        match self.architecture {
            Architecture::Linear => x.to_vec(),
            Architecture::OneHidden { .. } => (0..l.hidden)
                .map(|k| {
                    let row = &params[l.w0 + k * self.dim..l.w0 + (k + 1) * self.dim];
                    let a: f64 = row.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + params[l.b0 + k];
                    a.tanh()
                })
                .collect(),
        }
    }

    fn logits(&self, params: &[f64], l: &Layout, h: &[f64]) -> (f64, Option<f64>) {
        let z = params[l.w1..l.b1].iter().zip(h).map(|(w, h)| w * h).sum::<f64>() + params[l.b1];
        let zt =
            self.aux_head.then(|| params[l.wt..l.bt].iter().zip(h).map(|(w, h)| w * h).sum::<f64>() + params[l.bt]);
        (z, zt)
    }

    /// Link probability for an already standardized input.
    pub fn score_standardized(&self, x: &[f64]) -> f64 {
        let l = self.layout();
        let h = self.hidden(&self.params, &l, x);
        sigmoid(self.logits(&self.params, &l, &h).0)
    }

    /// Link probability for a raw feature vector.
    pub fn score(&self, raw: &[f64]) -> f64 {
        self.score_standardized(&self.standardizer.apply(raw))
    }

    /// Same-thread probability from the auxiliary head, if present.
    pub fn thread_score(&self, raw: &[f64]) -> Option<f64> {
        let l = self.layout();
        let h = self.hidden(&self.params, &l, &self.standardizer.apply(raw));
        self.logits(&self.params, &l, &h).1.map(sigmoid)
    }

    /// Mean link BCE plus `alpha` times mean thread BCE over `batch`, and its
    /// gradient with respect to `params`. With `alpha == 0` the thread term
    /// is not evaluated at all.
    pub fn loss_and_grad(&self, params: &[f64], batch: &[Example], alpha: f64) -> (f64, Vec<f64>) {
        let l = self.layout();
        let mut grad = vec![0.0; l.len];
        if batch.is_empty() {
            return (0.0, grad);
        }
        let use_aux = self.aux_head && alpha > 0.0;
        let scale = 1.0 / batch.len() as f64;
        let mut loss = 0.0;
        for ex in batch {
            let h = self.hidden(params, &l, &ex.x);
            let (z, zt) = self.logits(params, &l, &h);
            loss += bce_with_logit(z, ex.y);
            let g = (sigmoid(z) - ex.y) * scale;
            let mut dh: Vec<f64> = params[l.w1..l.b1].iter().map(|w| g * w).collect();
            for (k, hk) in h.iter().enumerate() {
                grad[l.w1 + k] += g * hk;
            }
            grad[l.b1] += g;
            if use_aux {
                let zt = zt.expect("aux head present");
                loss += alpha * bce_with_logit(zt, ex.y_thread);
                let gt = alpha * (sigmoid(zt) - ex.y_thread) * scale;
                for (k, hk) in h.iter().enumerate() {
                    grad[l.wt + k] += gt * hk;
                    dh[k] += gt * params[l.wt + k];
                }
                grad[l.bt] += gt;
            }
            if let Architecture::OneHidden { .. } = self.architecture {
                for k in 0..l.hidden {
                    let da = dh[k] * (1.0 - h[k] * h[k]);
                    let row = l.w0 + k * self.dim;
                    for (c, xc) in ex.x.iter().enumerate() {
                        grad[row + c] += da * xc;
                    }
                    grad[l.b0 + k] += da;
                }
            }
        }
        (loss * scale, grad)
    }
}

/// Adam optimizer state.
#[derive(Debug, Clone)]
pub(crate) struct Adam {
    lr: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    pub fn new(lr: f64, n: usize) -> Self {
        Self { lr, m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.t);
        let c2 = 1.0 - Self::BETA2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = Self::BETA1 * self.m[i] + (1.0 - Self::BETA1) * grad[i];
            self.v[i] = Self::BETA2 * self.v[i] + (1.0 - Self::BETA2) * grad[i] * grad[i];
            params[i] -= self.lr * (self.m[i] / c1) / ((self.v[i] / c2).sqrt() + Self::EPS);
        }
    }
}
