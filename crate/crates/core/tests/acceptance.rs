//! Acceptance checks, one PASS / FAIL / NOT RUN line per criterion.
//!
//! Criteria that need the released corpus read it from the directory named by
//! `SCRIPTTHREAD_DATA`:
//!
//! ```text
//! annotations/{train,dev,test}/   annotation tables (.tsv or .csv)
//! screenplays/                    screenplay text files (<slug>.txt)
//! splits/{train,dev,test}.txt     title slugs, one per line
//! ```

mod support;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scriptthread_core::analytics::{floor_claiming, thread_length_by_era, BootstrapSettings, Provenance};
use scriptthread_core::annotation::{
    links_to_partition, partition_to_links_previousstyle, postprocess, read_annotations, GoldLinks, LineReference,
    ReaderConfig,
};
use scriptthread_core::linkmodel::{
    predict_links, predict_previous_baseline, train, Architecture, FeatureConfig, ScorerModel, TrainingConfig,
};
use scriptthread_core::metrics::{
    ari, bootstrap_ci, evaluate, exact_match_f1, micro_average, one_minus_vi, one_to_one, shen_f1, EvalUnit, Metric,
    SceneScores,
};
use scriptthread_core::screenplay::{parse_screenplay, RawDocument, Scene, SourceKind};
use scriptthread_core::threading::validate_links;
use support::*;

enum Outcome {
    Pass(String),
    Fail(String),
    NotRun(String),
}

struct Report {
    failed: bool,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, outcome: Outcome) {
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                self.failed = true;
                ("FAIL", d)
            }
            Outcome::NotRun(d) => ("NOT RUN", d),
        };
        println!("criterion {id:<3} {name:<40} {tag:<8} {detail}");
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn data_root() -> Option<PathBuf> {
    std::env::var_os("SCRIPTTHREAD_DATA").map(PathBuf::from).filter(|p| p.is_dir())
}

// ---- criterion 1 ----

fn metric_oracles() -> Outcome {
    const TOL: f64 = 1e-9;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0f64; 5];
    for _ in 0..1000 {
        let n = rng.gen_range(2..=8);
        let (p, g) = (random_labels(&mut rng, n), random_labels(&mut rng, n));
        let (pp, gp) = (partition(&p), partition(&g));
        let got = [
            ari(&pp, &gp).unwrap(),
            one_minus_vi(&pp, &gp).unwrap(),
            shen_f1(&pp, &gp).unwrap(),
            one_to_one(&pp, &gp).unwrap(),
            exact_match_f1(&pp, &gp).unwrap(),
        ];
        let want = [
            ari_pairs(&p, &g),
            one_minus_vi_entropy(&p, &g),
            shen_sets(&p, &g),
            one_to_one_exhaustive(&p, &g),
            exact_match_sets(&p, &g),
        ];
        for k in 0..5 {
            worst[k] = worst[k].max((got[k] - want[k]).abs());
        }
    }
    let elapsed = start.elapsed();
    let max = worst.iter().copied().fold(0.0, f64::max);
    check(
        max <= TOL && elapsed < Duration::from_secs(10),
        format!("max |diff| {max:.1e} (tol 1e-9), 1000 pairs in {:.2}s (limit 10s)", elapsed.as_secs_f64()),
    )
}

// ---- dataset helpers ----

fn annotation_split(root: &Path, split: &str) -> Result<Vec<(GoldLinks, Scene)>, String> {
    let dir = root.join("annotations").join(split);
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tsv" || x == "csv"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for f in files {
        let cfg = if f.extension().is_some_and(|x| x == "csv") { ReaderConfig::csv() } else { ReaderConfig::default() };
        let title = f.file_stem().unwrap().to_string_lossy().into_owned();
        let file = fs::File::open(&f).map_err(|e| format!("{}: {e}", f.display()))?;
        let table = read_annotations(file, &title, &cfg).map_err(|e| format!("{}: {e}", f.display()))?;
        let pp = postprocess(&table, LineReference::Last).map_err(|e| format!("{}: {e}", f.display()))?;
        out.extend(pp.scenes.into_iter().map(|g| (g.links, g.scene)));
    }
    Ok(out)
}

fn units_for(pairs: &[(GoldLinks, Scene)], predict: impl Fn(&Scene) -> GoldLinks) -> Vec<EvalUnit> {
    pairs.iter().map(|(gold, scene)| EvalUnit::from_links(predict(scene), gold.clone()).unwrap()).collect()
}

// ---- criterion 2 ----

fn baseline_reproduction() -> Outcome {
    let Some(root) = data_root() else {
        return Outcome::NotRun("dataset absent (set SCRIPTTHREAD_DATA); replaced by criterion 5".into());
    };
    let test = match annotation_split(&root, "test") {
        Ok(t) => t,
        Err(e) => return Outcome::Fail(e),
    };
    let r = evaluate(&units_for(&test, predict_previous_baseline), None, 0).unwrap();
    let targets = [
        (Metric::LinkAccuracy, 90.26, 0.05),
        (Metric::Ari, 46.69, 0.5),
        (Metric::OneMinusVi, 85.29, 0.5),
        (Metric::ShenF1, 54.80, 0.5),
        (Metric::OneToOne, 51.89, 0.5),
        (Metric::ExactMatchF1, 14.95, 0.5),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, want, tol) in targets {
        let got = r.get(m).point;
        ok &= (got - want).abs() <= tol;
        parts.push(format!("{m} {got:.2} (want {want:.2}±{tol})"));
    }
    check(ok, parts.join(", "))
}

// ---- criterion 3 ----

fn corpus_statistics() -> Outcome {
    let Some(root) = data_root() else {
        return Outcome::NotRun("dataset and split manifest absent (set SCRIPTTHREAD_DATA)".into());
    };
    // (titles, dialogue lines, turns, action lines)
    let targets =
        [("train", [563, 11672, 5988, 8756]), ("dev", [127, 2639, 1298, 2059]), ("test", [141, 2743, 1475, 1980])];
    let mut ok = true;
    let mut parts = Vec::new();
    for (split, want) in targets {
        let list = root.join("splits").join(format!("{split}.txt"));
        let Ok(text) = fs::read_to_string(&list) else {
            return Outcome::Fail(format!("missing {}", list.display()));
        };
        let mut got = [0usize; 4];
        for slug in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let path = root.join("screenplays").join(format!("{slug}.txt"));
            let parsed = fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|t| RawDocument::new(slug, SourceKind::Movie, t).map_err(|e| e.to_string()))
                .and_then(|d| parse_screenplay(&d).map_err(|e| e.to_string()));
            let Ok(p) = parsed else {
                return Outcome::Fail(format!("cannot parse {}", path.display()));
            };
            let r = p.report();
            got[0] += 1;
            got[1] += r.dialogue_lines;
            got[2] += r.turns;
            got[3] += r.action_lines;
        }
        ok &= got == want;
        parts.push(format!("{split} {got:?} (want {want:?})"));
    }
    check(ok, parts.join("; "))
}

// ---- criterion 4 ----

fn featurized_sanity() -> Outcome {
    let Some(root) = data_root() else {
        return Outcome::NotRun("dataset absent (set SCRIPTTHREAD_DATA)".into());
    };
    let load = |s| annotation_split(&root, s);
    let (train_set, dev, test) = match (load("train"), load("dev"), load("test")) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return Outcome::Fail(e),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let cfg = TrainingConfig::default();
    let outcome = pool.install(|| train(&train_set, &dev, &cfg));
    let elapsed = start.elapsed();
    let model = match outcome {
        Ok(o) => o.model,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let acc =
        evaluate(&units_for(&test, |s| predict_links(&model, s, cfg.pool_size)), None, 0).unwrap().link_accuracy.point;
    check(
        (acc - 89.75).abs() <= 3.0 && elapsed < Duration::from_secs(600),
        format!("test link accuracy {acc:.2} (want 89.75±3.0), trained in {:.1}s (limit 600s)", elapsed.as_secs_f64()),
    )
}

// ---- criterion 5 ----

fn forest_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=40);
        let links = random_forest(&mut rng, n);
        let p = links_to_partition(&links).unwrap();
        let prev = partition_to_links_previousstyle(&p);
        let p2 = links_to_partition(&prev).unwrap();
        if p2 != p || partition_to_links_previousstyle(&p2) != prev {
            bad += 1;
        }
    }
    check(bad == 0, format!("{bad}/1000 forests changed"))
}

fn valid_predictions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    for k in 0..1000u64 {
        let n = rng.gen_range(1..=40);
        let scene = random_scene(&mut rng, "S1", n);
        let arch = if k % 2 == 0 { Architecture::Linear } else { Architecture::OneHidden { width: 8 } };
        let mut m = ScorerModel::new(arch, FeatureConfig::default(), k % 3 == 0, k);
        for p in &mut m.params {
            *p = rng.gen_range(-3.0..3.0);
        }
        let pool = rng.gen_range(2..=10);
        let links = predict_links(&m, &scene, pool);
        if !validate_links(&links, &scene).is_empty() || links_to_partition(&links).is_err() {
            bad += 1;
        }
    }
    check(bad == 0, format!("{bad}/1000 random scenes gave invalid links"))
}

fn gradient_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for (seed, arch) in [(1, Architecture::Linear), (2, Architecture::OneHidden { width: 16 })] {
        for (aux, alpha) in [(false, 0.0), (true, 0.1)] {
            let m = ScorerModel::new(arch, FeatureConfig::default(), aux, seed);
            worst = worst.max(gradient_gap(&m, alpha, seed + 100));
        }
    }
    check(worst < 1e-6, format!("max relative gap {worst:.1e} (tol 1e-6)"))
}

fn deterministic_training() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let data: Vec<(GoldLinks, Scene)> = (0..30)
        .map(|k| {
            let n = rng.gen_range(3..20);
            let id = format!("S{}", k + 1);
            let scene = random_scene(&mut rng, &id, n);
            let mut links = random_forest(&mut rng, n);
            links.scene_id = id;
            (links, scene)
        })
        .collect();
    let cfg = TrainingConfig { epochs: 5, seed: 42, ..TrainingConfig::default() };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let out = pool.install(|| train(&data[..24], &data[24..], &cfg)).unwrap();
        serde_json::to_string(&out.model).unwrap()
    };
    let (a, b, c) = (run(1), run(1), run(4));
    check(a == b && b == c, format!("model files identical across runs and pool sizes: {}", a == b && b == c))
}

/// Scenes of 2 to 20 utterances with each link correct with probability
/// 0.9; the true utterance-weighted link accuracy is 90.
fn bootstrap_coverage() -> Outcome {
    const TRIALS: usize = 1000;
    const SCENES: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut covered = 0;
    for trial in 0..TRIALS {
        let scores: Vec<SceneScores> = (0..SCENES)
            .map(|_| {
                let n = rng.gen_range(2..=20);
                let correct = (0..n).filter(|_| rng.gen_bool(0.9)).count();
                let mut values = [0.0; 6];
                values[0] = 100.0 * correct as f64 / n as f64;
                SceneScores { n, values }
            })
            .collect();
        let ci = bootstrap_ci(&scores, |s| micro_average(s, Metric::LinkAccuracy), 1000, trial as u64).unwrap();
        if ci.lo <= 90.0 && 90.0 <= ci.hi {
            covered += 1;
        }
    }
    let pct = 100.0 * covered as f64 / TRIALS as f64;
    check((pct - 95.0).abs() <= 3.0, format!("coverage {pct:.1}% over {TRIALS} trials (want 95±3)"))
}

// ---- criterion 6 ----

fn analytics_arithmetic() -> Outcome {
    let bs = BootstrapSettings { resamples: 200, seed: 1 };
    let (corpus, meta) = toy_corpus();
    let era = thread_length_by_era(&corpus, &meta, 5, Provenance::Gold, bs).unwrap();
    let floor = floor_claiming(&corpus, &meta, 1980, Provenance::Gold, bs).unwrap();
    let era_got: Vec<(i32, f64, usize)> =
        era.buckets.iter().map(|b| (b.start_year, b.mean_thread_length, b.n_movies)).collect();
    let era_ok = era_got == [(1985, 2.25, 2), (1990, 3.0, 1)];
    let third = 100.0 * 2.0 / 6.0;
    let floor_got: Vec<(i32, f64, f64, f64)> =
        floor.records.iter().map(|r| (r.year, r.pct_threads_started_by_women, r.pct_lines_by_women, r.delta)).collect();
    let floor_ok =
        floor_got == [(1985, 50.0, 40.0, 10.0), (1987, 100.0, 75.0, 25.0), (1992, 50.0, third, 50.0 - third)];
    let (t, wmeta) = worked_example();
    let worked = floor_claiming(&[t], &wmeta, 1980, Provenance::Gold, bs).unwrap();
    let r = &worked.records[0];
    let worked_ok = r.year == 2011
        && (r.pct_threads_started_by_women - 32.7).abs() < 1e-9
        && (r.pct_lines_by_women - 30.8).abs() < 1e-9
        && (r.delta - 1.9).abs() < 1e-9;
    check(
        era_ok && floor_ok && worked_ok,
        format!(
            "toy era {era_ok}, toy floor {floor_ok}, worked example {:.1} - {:.1} = {:+.1}",
            r.pct_threads_started_by_women, r.pct_lines_by_women, r.delta
        ),
    )
}

fn main() -> ExitCode {
    let mut report = Report { failed: false };
    report.line("1", "metric oracle equivalence", metric_oracles());
    report.line("2", "baseline reproduction", baseline_reproduction());
    report.line("3", "corpus statistics", corpus_statistics());
    report.line("4", "featurized model sanity", featurized_sanity());
    report.line("5a", "links/partition round trip", forest_round_trip());
    report.line("5b", "predictions are valid forests", valid_predictions());
    report.line("5c", "gradient check", gradient_check());
    report.line("5d", "bitwise-deterministic training", deterministic_training());
    report.line("5e", "bootstrap CI coverage", bootstrap_coverage());
    report.line("6", "analytics arithmetic", analytics_arithmetic());
    if report.failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
