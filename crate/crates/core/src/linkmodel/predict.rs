use super::{SceneFeatures, ScorerModel};
use crate::annotation::GoldLinks;
use crate::screenplay::Scene;

pub const DEFAULT_POOL_SIZE: usize = 6;

/// Indices of the candidate pool for UOI `i`: itself, then up to `c - 1`
/// preceding utterances, nearest first.
pub fn candidate_pool(i: usize, c: usize) -> impl Iterator<Item = usize> {
    (i.saturating_sub(c.saturating_sub(1))..=i).rev()
}

/// Picks, for every utterance, the highest-scoring candidate of its pool.
/// Ties go to the nearer candidate, which makes self win any tie it is in.
pub fn predict_links(model: &ScorerModel, scene: &Scene, pool_size: usize) -> GoldLinks {
    let sf = SceneFeatures::new(scene, &model.features);
    let mut links = GoldLinks::new(scene.scene_id.clone());
    for i in 0..sf.len() {
        let mut best = (i, f64::NEG_INFINITY);
        for j in candidate_pool(i, pool_size) {
            let s = model.score(&sf.pair(i, j).to_vec());
            if s > best.1 {
                best = (j, s);
            }
        }
        links.parent.insert(sf.utterances[i].utt_id.clone(), sf.utterances[best.0].utt_id.clone());
    }
    links
}

/// Links every utterance to the one right before it.
pub fn predict_previous_baseline(scene: &Scene) -> GoldLinks {
    let mut links = GoldLinks::new(scene.scene_id.clone());
    let mut prev: Option<&str> = None;
    for u in scene.utterances() {
        links.parent.insert(u.utt_id.clone(), prev.unwrap_or(&u.utt_id).to_string());
        prev = Some(&u.utt_id);
    }
    links
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::links_to_partition;
    use crate::linkmodel::{Architecture, FeatureConfig};
    use crate::screenplay::Utterance;
    use crate::threading::validate_links;

    fn scene(n: usize) -> Scene {
        let mut s = Scene::new("S1", "INT. X");
        for k in 0..n {
            s.push_utterance(Utterance {
                utt_id: format!("D{}.1", k + 1),
                speaker: ["A", "B", "C"][k % 3].into(),
                turn_id: format!("L{}", k + 1),
                line_id: format!("D{}", k + 1),
                scene_id: "S1".into(),
                text: format!("word{} shared", k % 4),
                position: k,
            });
        }
        s
    }

    fn linear_with(weights: &[(usize, f64)]) -> ScorerModel {
        let mut m = ScorerModel::new(Architecture::Linear, FeatureConfig::default(), false, 0);
        for &(i, w) in weights {
            m.params[i] = w;
        }
        m
    }

    #[test]
    fn pool_is_clipped() {
        assert_eq!(candidate_pool(0, 6).collect::<Vec<_>>(), vec![0]);
        assert_eq!(candidate_pool(7, 6).collect::<Vec<_>>(), vec![7, 6, 5, 4, 3, 2]);
        assert_eq!(candidate_pool(3, 2).collect::<Vec<_>>(), vec![3, 2]);
    }

    #[test]
    fn previous_baseline_is_one_chain() {
        let s = scene(5);
        let p = links_to_partition(&predict_previous_baseline(&s)).unwrap();
        assert_eq!(p.thread_count(), 1);
        let one = links_to_partition(&predict_previous_baseline(&scene(1))).unwrap();
        assert_eq!(one.thread_count(), 1);
    }

    #[test]
    fn self_weight_forces_singletons() {
        let s = scene(8);
        let links = predict_links(&linear_with(&[(8, 5.0)]), &s, 6);
        assert!(links.parent.iter().all(|(c, p)| c == p));
    }

    #[test]
    fn zero_model_ties_resolve_to_self() {
        let s = scene(4);
        let links = predict_links(&linear_with(&[]), &s, 6);
        assert!(links.parent.iter().all(|(c, p)| c == p));
    }

    #[test]
    fn pool_of_two_reproduces_previous() {
        let s = scene(9);
        let m = linear_with(&[(8, -5.0)]);
        assert_eq!(predict_links(&m, &s, 2), predict_previous_baseline(&s));
    }

    #[test]
    fn predictions_are_valid_forests() {
        let s = scene(12);
        let m = linear_with(&[(3, 1.0), (4, -0.3), (7, 0.5)]);
        assert!(validate_links(&predict_links(&m, &s, 6), &s).is_empty());
    }
}
