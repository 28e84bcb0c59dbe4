//! Independent reference implementations and data generators shared by the
//! integration tests. The oracles work item by item or pair by pair and do
//! not use the library's contingency table.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use scriptthread_core::annotation::{GoldLinks, ThreadPartition};
use scriptthread_core::screenplay::{Scene, Utterance};

/// Partition over items `u0..u{n-1}` from a label per item.
pub fn partition(labels: &[usize]) -> ThreadPartition {
    ThreadPartition::from_clusters("S", labels.iter().enumerate().map(|(i, &l)| (format!("u{i}"), l)))
}

fn clusters(labels: &[usize]) -> Vec<BTreeSet<usize>> {
    let mut by_label: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_label.entry(l).or_default().insert(i);
    }
    let mut out: Vec<BTreeSet<usize>> = by_label.into_values().collect();
    out.sort();
    out
}

pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    clusters(a) == clusters(b)
}

/// Adjusted Rand index in percent from counts over all unordered pairs.
pub fn ari_pairs(pred: &[usize], gold: &[usize]) -> f64 {
    let n = gold.len();
    let (mut n11, mut n10, mut n01, mut n00) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in i + 1..n {
            match (gold[i] == gold[j], pred[i] == pred[j]) {
                (true, true) => n11 += 1.0,
                (true, false) => n10 += 1.0,
                (false, true) => n01 += 1.0,
                (false, false) => n00 += 1.0,
            }
        }
    }
    let denom = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
    if denom == 0.0 {
        return if same_partition(pred, gold) { 100.0 } else { 0.0 };
    }
    100.0 * 2.0 * (n00 * n11 - n01 * n10) / denom
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts.map(|c| c as f64 / n).map(|p| -p * p.ln()).sum()
}

/// `100 * (1 - VI / ln n)` with VI = 2 H(X,Y) - H(X) - H(Y).
pub fn one_minus_vi_entropy(pred: &[usize], gold: &[usize]) -> f64 {
    let n = gold.len();
    if n < 2 {
        return 100.0;
    }
    let nf = n as f64;
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut px: HashMap<usize, usize> = HashMap::new();
    let mut py: HashMap<usize, usize> = HashMap::new();
    for i in 0..n {
        *joint.entry((gold[i], pred[i])).or_default() += 1;
        *px.entry(gold[i]).or_default() += 1;
        *py.entry(pred[i]).or_default() += 1;
    }
    let vi = 2.0 * entropy(joint.into_values(), nf) - entropy(px.into_values(), nf) - entropy(py.into_values(), nf);
    100.0 * (1.0 - vi / nf.ln())
}

/// Size-weighted best F of each gold cluster, from explicit sets.
pub fn shen_sets(pred: &[usize], gold: &[usize]) -> f64 {
    let n = gold.len() as f64;
    let (g, p) = (clusters(gold), clusters(pred));
    let mut total = 0.0;
    for gi in &g {
        let mut best: f64 = 0.0;
        for pj in &p {
            let overlap = gi.intersection(pj).count() as f64;
            if overlap == 0.0 {
                continue;
            }
            let (prec, rec) = (overlap / pj.len() as f64, overlap / gi.len() as f64);
            best = best.max(2.0 * prec * rec / (prec + rec));
        }
        total += gi.len() as f64 / n * best;
    }
    100.0 * total
}

/// Best one-to-one overlap by trying every injective pairing.
pub fn one_to_one_exhaustive(pred: &[usize], gold: &[usize]) -> f64 {
    let (g, p) = (clusters(gold), clusters(pred));
    fn go(g: &[BTreeSet<usize>], p: &[BTreeSet<usize>], k: usize, used: &mut Vec<bool>) -> usize {
        if k == g.len() {
            return 0;
        }
        let mut best = go(g, p, k + 1, used);
        for j in 0..p.len() {
            if !used[j] {
                used[j] = true;
                best = best.max(g[k].intersection(&p[j]).count() + go(g, p, k + 1, used));
                used[j] = false;
            }
        }
        best
    }
    let mut used = vec![false; p.len()];
    100.0 * go(&g, &p, 0, &mut used) as f64 / gold.len() as f64
}

/// F1 over clusters reproduced exactly.
pub fn exact_match_sets(pred: &[usize], gold: &[usize]) -> f64 {
    let (g, p) = (clusters(gold), clusters(pred));
    let matched = p.iter().filter(|c| g.contains(c)).count() as f64;
    let (prec, rec) = (matched / p.len() as f64, matched / g.len() as f64);
    if prec + rec == 0.0 {
        0.0
    } else {
        100.0 * 2.0 * prec * rec / (prec + rec)
    }
}

pub fn random_labels<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let k = rng.gen_range(1..=n);
    (0..n).map(|_| rng.gen_range(0..k)).collect()
}

/// Random causal forest: each utterance links to itself or an earlier one.
pub fn random_forest<R: Rng>(rng: &mut R, n: usize) -> GoldLinks {
    let mut links = GoldLinks::new("S1");
    for i in 0..n {
        let p = rng.gen_range(0..=i);
        links.parent.insert(format!("D{}.1", i + 1), format!("D{}.1", p + 1));
    }
    links
}

/// A scene of `speakers.len()` one-sentence lines, each its own turn.
pub fn scene_with(id: &str, speakers: &[&str], texts: &[&str]) -> Scene {
    let mut s = Scene::new(id, "INT. ROOM - DAY");
    for (k, sp) in speakers.iter().enumerate() {
        s.push_utterance(Utterance {
            utt_id: format!("D{}.1", k + 1),
            speaker: sp.to_string(),
            turn_id: format!("L{}", k + 1),
            line_id: format!("D{}", k + 1),
            scene_id: id.into(),
            text: texts.get(k).copied().unwrap_or("okay").to_string(),
            position: k,
        });
    }
    s
}

/// A random scene whose utterance ids line up with `random_forest`.
pub fn random_scene<R: Rng>(rng: &mut R, id: &str, n: usize) -> Scene {
    const WHO: [&str; 4] = ["ANN", "BOB", "CAL", "DEE"];
    const WORDS: [&str; 6] = ["the", "car", "school", "bowtie", "mom", "sure"];
    let speakers: Vec<&str> = (0..n).map(|_| WHO[rng.gen_range(0..WHO.len())]).collect();
    let texts: Vec<String> = (0..n)
        .map(|_| (0..rng.gen_range(1..5)).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect::<Vec<_>>().join(" "))
        .collect();
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    scene_with(id, &speakers, &refs)
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Largest relative gap between analytic and central-difference gradients
/// at random parameters. Entries whose gradient is below 1e-8 in magnitude
/// are compared on an absolute scale instead.
pub fn gradient_gap(m: &scriptthread_core::linkmodel::ScorerModel, alpha: f64, seed: u64) -> f64 {
    use rand::SeedableRng;
    use scriptthread_core::linkmodel::Example;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<f64> = (0..m.param_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let batch: Vec<Example> = (0..7)
        .map(|_| Example {
            x: (0..m.dim).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            y: rng.gen_range(0..2) as f64,
            y_thread: rng.gen_range(0..2) as f64,
        })
        .collect();
    let (_, grad) = m.loss_and_grad(&params, &batch, alpha);
    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..params.len() {
        let mut p = params.clone();
        p[i] += eps;
        let up = m.loss_and_grad(&p, &batch, alpha).0;
        p[i] -= 2.0 * eps;
        let down = m.loss_and_grad(&p, &batch, alpha).0;
        let numeric = (up - down) / (2.0 * eps);
        let abs = (numeric - grad[i]).abs();
        worst = worst.max(abs / numeric.abs().max(grad[i].abs()).max(1e-8));
    }
    worst
}

/// One scene per title; rows are (speaker, parent index), each a separate line.
pub fn threaded_title(slug: &str, rows: &[(&str, usize)]) -> scriptthread_core::analytics::TitleThreads {
    let id = format!("{slug}-S1");
    let mut scene = Scene::new(id.clone(), "INT. X");
    let mut links = GoldLinks::new(id.clone());
    for (k, (speaker, parent)) in rows.iter().enumerate() {
        scene.push_utterance(Utterance {
            utt_id: format!("D{}.1", k + 1),
            speaker: speaker.to_string(),
            turn_id: format!("L{}", k + 1),
            line_id: format!("D{}", k + 1),
            scene_id: id.clone(),
            text: "x".into(),
            position: k,
        });
        links.parent.insert(format!("D{}.1", k + 1), format!("D{}.1", parent + 1));
    }
    let partition = scriptthread_core::annotation::links_to_partition(&links).unwrap();
    scriptthread_core::analytics::TitleThreads { title_slug: slug.into(), scenes: vec![(scene, partition)] }
}

pub const TOY_METADATA: &str = "\
title_slug,year,character,gender
alpha,1985,ANN,1
alpha,1985,BOB,2
alpha,1985,CAL,2
beta,1987,ANN,woman
beta,1987,BOB,man
gamma,1992,BOB,2
gamma,1992,CAL,2
gamma,1992,DEE,1
";

pub fn toy_corpus() -> (
    Vec<scriptthread_core::analytics::TitleThreads>,
    indexmap::IndexMap<String, scriptthread_core::analytics::TitleMetadata>,
) {
    // alpha: ANN starts {1,2,3}, BOB starts {4,5}; mean 2.5
    let alpha = threaded_title("alpha", &[("ANN", 0), ("BOB", 0), ("ANN", 1), ("BOB", 3), ("CAL", 3)]);
    // beta: ANN starts {1,2} and {3,4}; mean 2.0
    let beta = threaded_title("beta", &[("ANN", 0), ("BOB", 0), ("ANN", 2), ("ANN", 2)]);
    // gamma: BOB starts {1,2,3}, DEE starts {4,5,6}; mean 3.0
    let gamma = threaded_title("gamma", &[("BOB", 0), ("BOB", 0), ("CAL", 1), ("DEE", 3), ("BOB", 3), ("DEE", 4)]);
    (vec![alpha, beta, gamma], scriptthread_core::analytics::ingest_metadata(TOY_METADATA.as_bytes()).unwrap())
}

/// A 2011 title in which 32.7% of threads are started by women and 30.8% of
/// dialogue lines are spoken by women.
pub fn worked_example(
) -> (scriptthread_core::analytics::TitleThreads, indexmap::IndexMap<String, scriptthread_core::analytics::TitleMetadata>)
{
    let mut rows: Vec<(&str, usize)> = Vec::new();
    for k in 0..1000 {
        let start = rows.len();
        rows.push((if k < 327 { "WOMAN" } else { "MAN" }, start));
        if k < 289 {
            rows.push(("WOMAN", start));
        }
        if k < 711 {
            rows.push(("MAN", start));
        }
    }
    let meta = "title_slug,year,character,gender\nworked,2011,WOMAN,1\nworked,2011,MAN,2\n";
    (threaded_title("worked", &rows), scriptthread_core::analytics::ingest_metadata(meta.as_bytes()).unwrap())
}
