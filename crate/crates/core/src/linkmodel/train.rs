use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::Adam;
use super::{
    predict_links, Architecture, Example, FeatureConfig, LinkModelError, SceneFeatures, ScorerModel, Standardizer,
    DEFAULT_POOL_SIZE,
};
use crate::annotation::{links_to_partition, GoldLinks};
use crate::screenplay::Scene;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub architecture: Architecture,
    pub epochs: usize,
    pub learning_rate: f64,
    pub negatives_per_positive: usize,
    /// Weight of the same-thread auxiliary loss; 0 disables the head.
    pub alpha: f64,
    pub batch_size: usize,
    pub pool_size: usize,
    pub seed: u64,
    pub features: FeatureConfig,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            architecture: Architecture::default(),
            epochs: 10,
            learning_rate: 1e-3,
            negatives_per_positive: 5,
            alpha: 0.1,
            batch_size: 32,
            pool_size: DEFAULT_POOL_SIZE,
            seed: 0,
            features: FeatureConfig::default(),
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), LinkModelError> {
        let bad = |m: &str| Err(LinkModelError::InvalidConfig(m.to_string()));
        if self.epochs < 1 {
            return bad("epochs must be at least 1");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive and finite");
        }
        if self.negatives_per_positive < 1 {
            return bad("negatives_per_positive must be at least 1");
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad("alpha must be non-negative and finite");
        }
        if self.batch_size < 1 {
            return bad("batch_size must be at least 1");
        }
        if self.pool_size < 2 {
            return bad("pool_size must be at least 2");
        }
        if let Architecture::OneHidden { width: 0 } = self.architecture {
            return bad("hidden width must be at least 1");
        }
        Ok(())
    }
}

/// A pair before standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawExample {
    pub x: Vec<f64>,
    pub y: f64,
    pub y_thread: f64,
}

/// Positive and sampled negative pairs of one annotated scene.
///
/// Negatives for UOI `u_i` are drawn without replacement from the utterances
/// before it plus the self candidate when `u_i` does not start a thread.
pub fn scene_examples(
    links: &GoldLinks,
    scene: &Scene,
    cfg: &TrainingConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<RawExample>, LinkModelError> {
    let sf = SceneFeatures::new(scene, &cfg.features);
    if sf.is_empty() {
        return Ok(Vec::new());
    }
    if links.is_empty() {
        return Err(LinkModelError::NoPositives { scene_id: scene.scene_id.clone() });
    }
    let mismatch = || LinkModelError::LinksMismatch { scene_id: scene.scene_id.clone() };
    if links.len() != sf.len() {
        return Err(mismatch());
    }
    let partition = links_to_partition(links).map_err(|_| mismatch())?;
    let thread_of = |k: usize| &partition.assignment[&sf.utterances[k].utt_id];
    let mut out = Vec::new();
    for i in 0..sf.len() {
        let parent_id = links.parent.get(&sf.utterances[i].utt_id).ok_or_else(mismatch)?;
        let p = sf.index_of(parent_id).filter(|&p| p <= i).ok_or_else(mismatch)?;
        let mut push = |j: usize, y: f64| {
            let y_thread = if thread_of(i) == thread_of(j) { 1.0 } else { 0.0 };
            out.push(RawExample { x: sf.pair(i, j).to_vec(), y, y_thread });
        };
        push(p, 1.0);
        let support: Vec<usize> = (0..=i).filter(|&j| j != p).collect();
        for &j in support.choose_multiple(rng, cfg.negatives_per_positive) {
            push(j, 0.0);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_link_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub model: ScorerModel,
    pub best_epoch: usize,
    pub epochs: Vec<EpochLog>,
    pub examples: usize,
}

/// Percentage of dev utterances whose predicted parent is the gold parent.
pub fn dev_link_accuracy(model: &ScorerModel, dev: &[(GoldLinks, Scene)], pool_size: usize) -> f64 {
    let (mut correct, mut total) = (0usize, 0usize);
    for (gold, scene) in dev {
        let pred = predict_links(model, scene, pool_size);
        for (utt, parent) in &pred.parent {
            total += 1;
            correct += usize::from(gold.parent.get(utt) == Some(parent));
        }
    }
    if total == 0 {
        100.0
    } else {
        100.0 * correct as f64 / total as f64
    }
}

/// Trains a scorer on annotated scenes. After each epoch the model is scored
/// on `dev`, and the earliest epoch with the best dev link accuracy is kept;
/// without dev scenes the last epoch is kept.
pub fn train(
    train_set: &[(GoldLinks, Scene)],
    dev: &[(GoldLinks, Scene)],
    cfg: &TrainingConfig,
) -> Result<TrainOutcome, LinkModelError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut raw = Vec::new();
    for (links, scene) in train_set {
        raw.extend(scene_examples(links, scene, cfg, &mut rng)?);
    }
    if raw.is_empty() {
        return Err(LinkModelError::EmptyDataset);
    }
    let eval = |m: &ScorerModel| (!dev.is_empty()).then(|| dev_link_accuracy(m, dev, cfg.pool_size));
    fit(raw, cfg, &mut rng, eval)
}

/// Optimizes a fresh model on raw pairs. `eval` scores a checkpoint after
/// every epoch; higher is better.
pub fn fit<F>(
    raw: Vec<RawExample>,
    cfg: &TrainingConfig,
    rng: &mut ChaCha8Rng,
    eval: F,
) -> Result<TrainOutcome, LinkModelError>
where
    F: Fn(&ScorerModel) -> Option<f64>,
{
    cfg.validate()?;
    if raw.is_empty() {
        return Err(LinkModelError::EmptyDataset);
    }
    let mut model = ScorerModel::new(cfg.architecture, cfg.features.clone(), cfg.alpha > 0.0, cfg.seed);
    let rows: Vec<Vec<f64>> = raw.iter().map(|r| r.x.clone()).collect();
    if rows.iter().any(|r| r.len() != model.dim) {
        return Err(LinkModelError::InvalidConfig(format!("examples must have {} features", model.dim)));
    }
    model.standardizer = Standardizer::fit(&rows, model.dim);
    let mut examples: Vec<Example> =
        raw.into_iter().map(|r| Example { x: model.standardizer.apply(&r.x), y: r.y, y_thread: r.y_thread }).collect();
    let n_examples = examples.len();

    let mut adam = Adam::new(cfg.learning_rate, model.params.len());
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut log = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        examples.shuffle(rng);
        let mut loss_sum = 0.0;
        for batch in examples.chunks(cfg.batch_size) {
            let (loss, grad) = model.loss_and_grad(&model.params, batch, cfg.alpha);
            loss_sum += loss * batch.len() as f64;
            adam.step(&mut model.params, &grad);
        }
        let score = eval(&model);
        log.push(EpochLog { epoch, train_loss: loss_sum / n_examples as f64, dev_link_accuracy: score });
        let better = match (&best, score) {
            (None, _) => true,
            (Some((b, _, _)), Some(s)) => s > *b,
            (Some(_), None) => true,
        };
        if better {
            best = Some((score.unwrap_or(f64::NEG_INFINITY), epoch, model.params.clone()));
        }
    }
    let (_, best_epoch, params) = best.expect("at least one epoch");
    model.params = params;
    Ok(TrainOutcome { model, best_epoch, epochs: log, examples: n_examples })
}

/// Mean link BCE (no auxiliary term) of `model` over raw pairs.
pub fn link_bce(model: &ScorerModel, raw: &[RawExample]) -> f64 {
    let examples: Vec<Example> =
        raw.iter().map(|r| Example { x: model.standardizer.apply(&r.x), y: r.y, y_thread: r.y_thread }).collect();
    model.loss_and_grad(&model.params, &examples, 0.0).0
}
