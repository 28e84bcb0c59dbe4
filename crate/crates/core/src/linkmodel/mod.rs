//! Featurized reply-to scorer: pair features, a small sigmoid scoring head,
//! its training loop, and argmax prediction over candidate pools.

mod features;
mod model;
mod predict;
mod tokenize;
mod train;

pub use features::{extract_features, FeatureConfig, FeatureVector, SceneFeatures};
pub use model::{Architecture, Example, ScorerModel, Standardizer};
pub use predict::{candidate_pool, predict_links, predict_previous_baseline, DEFAULT_POOL_SIZE};
pub use tokenize::{Tokenizer, UNKNOWN_PIECE};
pub use train::{
    dev_link_accuracy, fit, link_bce, scene_examples, train, EpochLog, RawExample, TrainOutcome, TrainingConfig,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinkModelError {
    #[error("{uoi} and {candidate} are not in the same scene")]
    ScenesMismatch { uoi: String, candidate: String },
    #[error("candidate {candidate} comes after {uoi}")]
    CandidateAfterUoi { uoi: String, candidate: String },
    #[error("utterance {0} is not part of the scene")]
    UnknownUtterance(String),
    #[error("no training scenes with utterances")]
    EmptyDataset,
    #[error("scene {scene_id} has utterances but no gold links")]
    NoPositives { scene_id: String },
    #[error("gold links of scene {scene_id} do not form a causal forest over its utterances")]
    LinksMismatch { scene_id: String },
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
}
