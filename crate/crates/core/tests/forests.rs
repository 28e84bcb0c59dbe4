mod support;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scriptthread_core::annotation::{links_to_partition, partition_to_links_previousstyle, read_links, write_links};
use scriptthread_core::metrics::{evaluate, EvalUnit, Metric};
use scriptthread_core::threading::{thread_stats, validate_links};
use support::*;

proptest! {
    #[test]
    fn previous_style_round_trip(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links = random_forest(&mut rng, n);
        let p = links_to_partition(&links).unwrap();
        let prev = partition_to_links_previousstyle(&p);
        prop_assert_eq!(links_to_partition(&prev).unwrap(), p);
        // Previous-style links are a fixed point.
        prop_assert_eq!(partition_to_links_previousstyle(&links_to_partition(&prev).unwrap()), prev);
    }

    #[test]
    fn thread_starts_are_the_self_links(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scene = random_scene(&mut rng, "S1", n);
        let links = random_forest(&mut rng, n);
        prop_assert!(validate_links(&links, &scene).is_empty());
        let stats = thread_stats(&links_to_partition(&links).unwrap(), &scene);
        let starts: Vec<&String> = stats.threads.iter().map(|t| &t.start_utt_id).collect();
        let roots: Vec<&String> = links.parent.iter().filter(|(c, p)| c == p).map(|(c, _)| c).collect();
        prop_assert_eq!(starts, roots);
        prop_assert_eq!(stats.utterance_count(), n);
    }

    #[test]
    fn links_jsonl_round_trip(seed in any::<u64>(), scenes in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let all: Vec<_> = (0..scenes)
            .map(|k| {
                let mut l = random_forest(&mut rng, k + 3);
                l.scene_id = format!("S{}", k + 1);
                l
            })
            .collect();
        let mut buf = Vec::new();
        write_links(&mut buf, &all).unwrap();
        prop_assert_eq!(read_links(buf.as_slice()).unwrap(), all);
    }

    #[test]
    fn evaluating_gold_against_itself_is_perfect(seed in any::<u64>(), scenes in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let units: Vec<EvalUnit> = (0..scenes)
            .map(|k| {
                let l = random_forest(&mut rng, k + 2);
                EvalUnit::from_links(l.clone(), l).unwrap()
            })
            .collect();
        let r = evaluate(&units, Some(100), seed).unwrap();
        for m in Metric::ALL {
            let v = r.get(m);
            prop_assert_eq!((v.point, v.lo, v.hi), (100.0, Some(100.0), Some(100.0)));
        }
    }
}

#[test]
fn a_cycle_is_rejected() {
    let mut links = scriptthread_core::annotation::GoldLinks::new("S1");
    links.parent.insert("a".into(), "b".into());
    links.parent.insert("b".into(), "a".into());
    assert!(links_to_partition(&links).is_err());
}
