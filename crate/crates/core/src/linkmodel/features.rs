use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{LinkModelError, Tokenizer};
use crate::screenplay::{Scene, Utterance};

/// Settings that change what a feature vector contains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct FeatureConfig {
    pub tokenizer: Tokenizer,
    /// Also compute the per-utterance features (f1 to f3) for the candidate.
    #[serde(default)]
    pub duplicate_for_candidate: bool,
}

impl FeatureConfig {
    pub fn dim(&self) -> usize {
        if self.duplicate_for_candidate {
            FeatureVector::BASE_DIM + 3
        } else {
            FeatureVector::BASE_DIM
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Other speakers heard since the UOI speaker last spoke.
    pub speakers_spoken_after: u32,
    /// Utterances since the UOI speaker last spoke.
    pub utterances_since_speaker_last_spoke: u32,
    pub next_same_speaker: bool,
    pub common_tokens: u32,
    pub distance: u32,
    /// Some utterance strictly between the pair is by either pair speaker.
    pub intervening_same_speakers: bool,
    pub same_turn: bool,
    pub same_speaker: bool,
    pub is_self: bool,
    /// f1 to f3 of the candidate, when configured.
    pub candidate: Option<[u32; 3]>,
}

impl FeatureVector {
    pub const BASE_DIM: usize = 9;

    pub fn to_vec(&self) -> Vec<f64> {
        let b = |x: bool| if x { 1.0 } else { 0.0 };
        let mut v = vec![
            self.speakers_spoken_after as f64,
            self.utterances_since_speaker_last_spoke as f64,
            b(self.next_same_speaker),
            self.common_tokens as f64,
            self.distance as f64,
            b(self.intervening_same_speakers),
            b(self.same_turn),
            b(self.same_speaker),
            b(self.is_self),
        ];
        if let Some(c) = self.candidate {
            v.extend(c.iter().map(|&x| x as f64));
        }
        v
    }
}

/// Per-scene precomputation so that every pair costs O(distance).
#[derive(Debug, Clone)]
pub struct SceneFeatures<'a> {
    pub utterances: Vec<&'a Utterance>,
    index: HashMap<&'a str, usize>,
    per_utterance: Vec<[u32; 3]>,
    tokens: Vec<HashSet<String>>,
    duplicate: bool,
}

impl<'a> SceneFeatures<'a> {
    pub fn new(scene: &'a Scene, cfg: &FeatureConfig) -> Self {
        let utterances: Vec<&Utterance> = scene.utterances().collect();
        let index = utterances.iter().enumerate().map(|(i, u)| (u.utt_id.as_str(), i)).collect();
        let mut last_spoke: HashMap<&str, usize> = HashMap::new();
        let mut per_utterance = Vec::with_capacity(utterances.len());
        for (i, u) in utterances.iter().enumerate() {
            let speaker = u.speaker.as_str();
            let (since, from) = match last_spoke.get(speaker) {
                Some(&k) => (i - k, k + 1),
                None => (i + 1, 0),
            };
            let others: HashSet<&str> =
                utterances[from..i].iter().map(|v| v.speaker.as_str()).filter(|&s| s != speaker).collect();
            let next_same = utterances.get(i + 1).is_some_and(|v| v.speaker == u.speaker);
            per_utterance.push([others.len() as u32, since as u32, next_same as u32]);
            last_spoke.insert(speaker, i);
        }
        let tokens = utterances.iter().map(|u| cfg.tokenizer.token_set(&u.text)).collect();
        Self { utterances, index, per_utterance, tokens, duplicate: cfg.duplicate_for_candidate }
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn index_of(&self, utt_id: &str) -> Option<usize> {
        self.index.get(utt_id).copied()
    }

    /// Features for UOI `i` and candidate `j`, indices into the scene's
    /// utterances with `j <= i`.
    pub fn pair(&self, i: usize, j: usize) -> FeatureVector {
        debug_assert!(j <= i);
        let (ui, uj) = (self.utterances[i], self.utterances[j]);
        let [f1, f2, f3] = self.per_utterance[i];
        let intervening =
            self.utterances[j + 1..i.max(j + 1)].iter().any(|u| u.speaker == ui.speaker || u.speaker == uj.speaker);
        FeatureVector {
            speakers_spoken_after: f1,
            utterances_since_speaker_last_spoke: f2,
            next_same_speaker: f3 == 1,
            common_tokens: self.tokens[i].intersection(&self.tokens[j]).count() as u32,
            distance: (i - j) as u32,
            intervening_same_speakers: intervening,
            same_turn: ui.turn_id == uj.turn_id,
            same_speaker: ui.speaker == uj.speaker,
            is_self: i == j,
            candidate: self.duplicate.then(|| self.per_utterance[j]),
        }
    }
}

/// Features of one (UOI, candidate) pair of `scene`.
pub fn extract_features(
    uoi: &Utterance,
    candidate: &Utterance,
    scene: &Scene,
    cfg: &FeatureConfig,
) -> Result<FeatureVector, LinkModelError> {
    if uoi.scene_id != candidate.scene_id || uoi.scene_id != scene.scene_id {
        return Err(LinkModelError::ScenesMismatch { uoi: uoi.utt_id.clone(), candidate: candidate.utt_id.clone() });
    }
    let sf = SceneFeatures::new(scene, cfg);
    let find = |u: &Utterance| sf.index_of(&u.utt_id).ok_or_else(|| LinkModelError::UnknownUtterance(u.utt_id.clone()));
    let (i, j) = (find(uoi)?, find(candidate)?);
    if j > i {
        return Err(LinkModelError::CandidateAfterUoi { uoi: uoi.utt_id.clone(), candidate: candidate.utt_id.clone() });
    }
    Ok(sf.pair(i, j))
}
