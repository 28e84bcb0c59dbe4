use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use scriptthread_core::analytics::{
    floor_claiming, ingest_metadata, thread_length_by_era, write_era_csv, write_floor_csv, BootstrapSettings,
    Provenance, TitleThreads,
};
use scriptthread_core::annotation::{links_to_partition, write_links, GoldLinks, LineReference};
use scriptthread_core::linkmodel::{
    predict_links, predict_previous_baseline, train, Architecture, FeatureConfig, ScorerModel, Tokenizer,
    TrainingConfig,
};
use scriptthread_core::metrics::{
    agreement, report_from_scores, score_scene, EvalUnit, MetricsReport, SceneScores, MIN_RESAMPLES,
};
use scriptthread_core::screenplay::{parse_screenplay, write_canonical, ParseReport, RawDocument, Scene, SourceKind};
use scriptthread_core::threading::{thread_stats, ThreadStats};

use crate::load::{expand, gold_pairs, load_annotation_links, load_gold_corpus, load_links, load_scenes, title_of};
use crate::manifest::{Run, SkippedScene};
use crate::{
    AgreementArgs, AnalyzeArgs, Cli, Command, EvaluateArgs, Format, GlobalArgs, Kind, ParseArgs, PredictArgs,
    TrainArgs, UsageError,
};

pub fn run(cli: &Cli) -> Result<()> {
    if cli.global.jobs > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs).build_global().ok();
    }
    let mut run = Run::new(&cli.global.out)?;
    let name = match &cli.command {
        Command::Parse(_) => "parse",
        Command::Train(_) => "train",
        Command::Predict(_) => "predict",
        Command::Evaluate(_) => "evaluate",
        Command::Agreement(_) => "agreement",
        Command::Analyze(_) => "analyze",
    };
    let g = &cli.global;
    let result = match &cli.command {
        Command::Parse(a) => cmd_parse(a, g, &mut run),
        Command::Train(a) => cmd_train(a, g, &mut run),
        Command::Predict(a) => cmd_predict(a, g, &mut run),
        Command::Evaluate(a) => cmd_evaluate(a, g, &mut run),
        Command::Agreement(a) => cmd_agreement(a, g, &mut run),
        Command::Analyze(a) => cmd_analyze(a, g, &mut run),
    };
    let result = result.and_then(|()| {
        let config = serde_json::to_value(cli)?;
        // where the output went is not part of the configuration
        let mut config = config;
        if let Some(g) = config.get_mut("global").and_then(|g| g.as_object_mut()) {
            g.remove("out");
            g.remove("config");
        }
        Ok(config)
    });
    match result {
        Ok(config) => run.finish(name, &config),
        Err(e) => {
            run.abort();
            Err(e)
        }
    }
}

fn resamples_opt(resamples: usize, units: usize) -> Result<Option<usize>> {
    if resamples > 0 && resamples < MIN_RESAMPLES {
        return Err(UsageError(format!("--resamples must be 0 or at least {MIN_RESAMPLES}")).into());
    }
    Ok((resamples > 0 && units >= 2).then_some(resamples))
}

// ---------------------------------------------------------------- parse

#[derive(Debug, Serialize)]
struct FileReport {
    path: String,
    title: String,
    report: ParseReport,
    warnings: Vec<serde_json::Value>,
}

#[derive(Debug, Default, Serialize)]
struct SplitTotals {
    titles: usize,
    scenes: usize,
    dialogue_lines: usize,
    turns: usize,
    action_lines: usize,
    utterances: usize,
    missing_titles: Vec<String>,
}

impl SplitTotals {
    fn add(&mut self, r: &ParseReport) {
        self.titles += 1;
        self.scenes += r.scenes;
        self.dialogue_lines += r.dialogue_lines;
        self.turns += r.turns;
        self.action_lines += r.action_lines;
        self.utterances += r.utterances;
    }
}

#[derive(Debug, Serialize)]
struct CorpusReport {
    files: Vec<FileReport>,
    total: SplitTotals,
    splits: BTreeMap<String, SplitTotals>,
}

fn read_splits(dir: &Path) -> Result<BTreeMap<String, Vec<String>>> {
    let mut out = BTreeMap::new();
    for split in ["train", "dev", "test"] {
        let path = dir.join(format!("{split}.txt"));
        if !path.exists() {
            continue;
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let slugs = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from);
        out.insert(split.to_string(), slugs.collect());
    }
    if out.is_empty() {
        bail!(UsageError(format!("no train/dev/test lists in {}", dir.display())));
    }
    Ok(out)
}

fn cmd_parse(a: &ParseArgs, _g: &GlobalArgs, run: &mut Run) -> Result<()> {
    let files = expand(&a.inputs, &["txt"])?;
    if files.is_empty() {
        bail!(UsageError("no screenplay files found".into()));
    }
    let kind = match a.kind {
        Kind::Movie => SourceKind::Movie,
        Kind::TvPilot => SourceKind::TvPilot,
    };
    for f in &files {
        run.input(f)?;
    }
    let parsed: Vec<_> = files
        .par_iter()
        .map(|f| -> Result<_> {
            let text = fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
            let doc = RawDocument::new(title_of(f), kind, text).with_context(|| format!("loading {}", f.display()))?;
            let parsed = parse_screenplay(&doc).with_context(|| format!("parsing {}", f.display()))?;
            Ok((f.clone(), parsed))
        })
        .collect::<Result<_>>()?;
    let mut parsed = parsed;
    parsed.sort_by(|x, y| x.1.title_slug.cmp(&y.1.title_slug));
    for w in parsed.windows(2) {
        if w[0].1.title_slug == w[1].1.title_slug {
            bail!("two inputs map to title {}", w[0].1.title_slug);
        }
    }
    let mut report = CorpusReport { files: Vec::new(), total: SplitTotals::default(), splits: BTreeMap::new() };
    for (path, p) in &parsed {
        run.write(&format!("canonical/{}.jsonl", p.title_slug), |w| Ok(write_canonical(w, &p.scenes, &p.title_slug)?))?;
        let r = p.report();
        report.total.add(&r);
        report.files.push(FileReport {
            path: path.display().to_string(),
            title: p.title_slug.clone(),
            report: r,
            warnings: p.warnings.iter().map(|w| serde_json::json!(format!("{w:?}"))).collect(),
        });
    }
    if let Some(dir) = &a.splits {
        let by_title: HashMap<&str, &ParseReport> =
            report.files.iter().map(|f| (f.title.as_str(), &f.report)).collect();
        for (split, slugs) in read_splits(dir)? {
            let mut totals = SplitTotals::default();
            for s in slugs {
                match by_title.get(s.as_str()) {
                    Some(r) => totals.add(r),
                    None => totals.missing_titles.push(s),
                }
            }
            report.splits.insert(split, totals);
        }
    }
    for f in &report.files {
        let r = &f.report;
        println!(
            "{}: {} scenes, {} turns, {} dialogue lines, {} action lines, {} utterances",
            f.title, r.scenes, r.turns, r.dialogue_lines, r.action_lines, r.utterances
        );
    }
    run.write_json("parse_report.json", &report)?;
    Ok(())
}

// ---------------------------------------------------------------- train

fn training_config(a: &TrainArgs, g: &GlobalArgs) -> Result<TrainingConfig> {
    let tokenizer = match &a.vocab {
        Some(p) => {
            Tokenizer::wordpiece_from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
        }
        None => Tokenizer::Word,
    };
    let cfg = TrainingConfig {
        architecture: if a.hidden == 0 { Architecture::Linear } else { Architecture::OneHidden { width: a.hidden } },
        epochs: a.epochs,
        learning_rate: a.learning_rate,
        negatives_per_positive: a.negatives,
        alpha: a.alpha,
        batch_size: a.batch_size,
        pool_size: a.pool_size,
        seed: g.seed,
        features: FeatureConfig { tokenizer, duplicate_for_candidate: a.duplicate_candidate_features },
    };
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(cfg)
}

fn cmd_train(a: &TrainArgs, g: &GlobalArgs, run: &mut Run) -> Result<()> {
    let cfg = training_config(a, g)?;
    println!(
        "epochs={} lr={} negatives={} pool_size={} alpha={} batch_size={} seed={}",
        cfg.epochs, cfg.learning_rate, cfg.negatives_per_positive, cfg.pool_size, cfg.alpha, cfg.batch_size, cfg.seed
    );
    let line_ref: LineReference = a.line_reference.into();
    let train_files = expand(&a.train, &["tsv", "csv"])?;
    let dev_files = expand(&a.dev, &["tsv", "csv"])?;
    for f in train_files.iter().chain(&dev_files).chain(&a.vocab) {
        run.input(f)?;
    }
    let train_set = gold_pairs(&load_gold_corpus(&train_files, line_ref)?);
    let dev_set = gold_pairs(&load_gold_corpus(&dev_files, line_ref)?);
    let outcome = train(&train_set, &dev_set, &cfg)?;
    for e in &outcome.epochs {
        match e.dev_link_accuracy {
            Some(acc) => println!("epoch {:>2}  loss {:.4}  dev link accuracy {:.2}", e.epoch, e.train_loss, acc),
            None => println!("epoch {:>2}  loss {:.4}", e.epoch, e.train_loss),
        }
    }
    println!("kept epoch {}", outcome.best_epoch);
    run.write_json("model.json", &outcome.model)?;
    #[derive(Serialize)]
    struct Log<'a> {
        config: &'a TrainingConfig,
        examples: usize,
        best_epoch: usize,
        epochs: &'a [scriptthread_core::linkmodel::EpochLog],
    }
    run.write_json(
        "training_log.json",
        &Log { config: &cfg, examples: outcome.examples, best_epoch: outcome.best_epoch, epochs: &outcome.epochs },
    )?;
    Ok(())
}

// ---------------------------------------------------------------- predict

fn cmd_predict(a: &PredictArgs, _g: &GlobalArgs, run: &mut Run) -> Result<()> {
    if a.pool_size < 2 {
        bail!(UsageError("--pool-size must be at least 2".into()));
    }
    let model: Option<ScorerModel> = match &a.model {
        Some(p) => {
            run.input(p)?;
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(serde_json::from_str(&text).with_context(|| format!("{} is not a model file", p.display()))?)
        }
        None => None,
    };
    let files = expand(&a.inputs, &["jsonl", "tsv", "csv"])?;
    if files.is_empty() {
        bail!(UsageError("no input files found".into()));
    }
    let mut titles: BTreeMap<String, Vec<Scene>> = BTreeMap::new();
    for f in &files {
        run.input(f)?;
        for (title, scenes) in load_scenes(f, a.line_reference.into())? {
            if titles.insert(title.clone(), scenes).is_some() {
                bail!("title {title} appears in more than one input");
            }
        }
    }
    for (title, scenes) in &titles {
        let links: Vec<GoldLinks> = scenes
            .par_iter()
            .map(|s| match &model {
                Some(m) => predict_links(m, s, a.pool_size),
                None => predict_previous_baseline(s),
            })
            .collect();
        run.write(&format!("predictions/{title}.jsonl"), |w| Ok(write_links(w, &links)?))?;
        println!("{title}: {} scenes", links.len());
    }
    Ok(())
}

// ---------------------------------------------------------------- evaluate

#[derive(Debug, Serialize)]
struct SceneRow<'a> {
    title: &'a str,
    scene_id: &'a str,
    #[serde(flatten)]
    scores: &'a SceneScores,
}

fn write_report(run: &mut Run, stem: &str, report: &MetricsReport, format: Format) -> Result<()> {
    match format {
        Format::Json => run.write_json(&format!("{stem}.json"), report)?,
        Format::Csv => run.write(&format!("{stem}.csv"), |w| Ok(report.write_csv(w)?))?,
    };
    Ok(())
}

fn cmd_evaluate(a: &EvaluateArgs, g: &GlobalArgs, run: &mut Run) -> Result<()> {
    let line_ref: LineReference = a.line_reference.into();
    let gold_files = expand(&a.gold, &["tsv", "csv"])?;
    let pred_files = expand(&a.pred, &["jsonl"])?;
    for f in gold_files.iter().chain(&pred_files) {
        run.input(f)?;
    }
    let gold = load_gold_corpus(&gold_files, line_ref)?;
    let mut preds: HashMap<String, PathBuf> = HashMap::new();
    for p in &pred_files {
        preds.insert(title_of(p), p.clone());
    }

    let mut units: Vec<(String, String, EvalUnit)> = Vec::new();
    for pp in &gold {
        let pred_links: HashMap<String, GoldLinks> = match preds.get(&pp.title) {
            Some(p) => load_links(p)?.into_iter().map(|l| (l.scene_id.clone(), l)).collect(),
            None => HashMap::new(),
        };
        for gs in &pp.scenes {
            let skip =
                |reason: String| SkippedScene { title: pp.title.clone(), scene_id: gs.scene.scene_id.clone(), reason };
            let Some(pl) = pred_links.get(&gs.scene.scene_id) else {
                let s = skip("no prediction for scene".into());
                if a.skip_invalid {
                    run.skipped.push(s);
                    continue;
                }
                bail!("{}/{}: {}", s.title, s.scene_id, s.reason);
            };
            match EvalUnit::from_links(pl.clone(), gs.links.clone()) {
                Ok(u) => units.push((pp.title.clone(), gs.scene.scene_id.clone(), u)),
                Err(e) if a.skip_invalid => run.skipped.push(skip(e.to_string())),
                Err(e) => return Err(anyhow!(e).context(format!("{}/{}", pp.title, gs.scene.scene_id))),
            }
        }
    }
    let mut scores = Vec::with_capacity(units.len());
    let mut kept = Vec::with_capacity(units.len());
    for (title, scene_id, u) in &units {
        match score_scene(u) {
            Ok(s) => {
                scores.push(s);
                kept.push((title.as_str(), scene_id.as_str()));
            }
            Err(e) if a.skip_invalid => run.skipped.push(SkippedScene {
                title: title.clone(),
                scene_id: scene_id.clone(),
                reason: e.to_string(),
            }),
            Err(e) => return Err(anyhow!(e).context(format!("{title}/{scene_id}"))),
        }
    }
    if scores.is_empty() {
        bail!("no scenes to evaluate");
    }
    let report = report_from_scores(&scores, resamples_opt(a.resamples, scores.len())?, g.seed)?;
    print!("{}", report.to_table());
    write_report(run, "metrics", &report, g.format)?;
    run.write("per_scene.jsonl", |w| {
        for ((title, scene_id), s) in kept.iter().zip(&scores) {
            serde_json::to_writer(&mut *w, &SceneRow { title, scene_id, scores: s })?;
            writeln!(w)?;
        }
        Ok(())
    })?;
    Ok(())
}

// ---------------------------------------------------------------- agreement

fn cmd_agreement(a: &AgreementArgs, g: &GlobalArgs, run: &mut Run) -> Result<()> {
    let line_ref: LineReference = a.line_reference.into();
    run.input(&a.a)?;
    run.input(&a.b)?;
    let la = load_annotation_links(&a.a, line_ref)?;
    let lb: HashMap<String, GoldLinks> =
        load_annotation_links(&a.b, line_ref)?.into_iter().map(|l| (l.scene_id.clone(), l)).collect();
    if la.len() != lb.len() {
        bail!("annotations cover {} and {} scenes", la.len(), lb.len());
    }
    let mut units = Vec::new();
    for gold in la {
        let pred =
            lb.get(&gold.scene_id).ok_or_else(|| anyhow!("scene {} missing from {}", gold.scene_id, a.b.display()))?;
        units.push(EvalUnit::from_links(pred.clone(), gold)?);
    }
    let report = agreement(&units, resamples_opt(a.resamples, units.len())?, g.seed)?;
    println!("A as reference:");
    print!("{}", report.a_as_gold.to_table());
    println!("B as reference:");
    print!("{}", report.b_as_gold.to_table());
    println!("shen_f1 (both directions) {:.2}", report.shen_f1_mean);
    match g.format {
        Format::Json => {
            run.write_json("agreement.json", &report)?;
        }
        Format::Csv => {
            write_report(run, "agreement_a_as_gold", &report.a_as_gold, Format::Csv)?;
            write_report(run, "agreement_b_as_gold", &report.b_as_gold, Format::Csv)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- analyze

#[derive(Debug, Serialize)]
struct StatsRow<'a> {
    title: &'a str,
    #[serde(flatten)]
    stats: &'a ThreadStats,
}

fn cmd_analyze(a: &AnalyzeArgs, g: &GlobalArgs, run: &mut Run) -> Result<()> {
    if a.bucket_width < 1 {
        bail!(UsageError("--bucket-width must be positive".into()));
    }
    let line_ref: LineReference = a.line_reference.into();
    let files = expand(&a.corpus, &["jsonl", "tsv", "csv"])?;
    run.input(&a.metadata)?;
    for f in &files {
        run.input(f)?;
    }
    let meta =
        ingest_metadata(fs::File::open(&a.metadata).with_context(|| format!("opening {}", a.metadata.display()))?)?;

    let provenance = match &a.links {
        Some(_) => Provenance::Predicted { model: a.model_name.clone().unwrap_or_else(|| "unspecified".into()) },
        None => Provenance::Gold,
    };
    let mut corpus: Vec<TitleThreads> = Vec::new();
    for f in &files {
        match &a.links {
            Some(dir) => {
                for (title, scenes) in load_scenes(f, line_ref)? {
                    let path = dir.join(format!("{title}.jsonl"));
                    run.input(&path)?;
                    let links: HashMap<String, GoldLinks> =
                        load_links(&path)?.into_iter().map(|l| (l.scene_id.clone(), l)).collect();
                    let mut pairs = Vec::new();
                    for s in scenes {
                        let l = links
                            .get(&s.scene_id)
                            .ok_or_else(|| anyhow!("{title}/{}: no predicted links", s.scene_id))?;
                        let p = links_to_partition(l).with_context(|| format!("{title}/{}", s.scene_id))?;
                        pairs.push((s, p));
                    }
                    corpus.push(TitleThreads { title_slug: title, scenes: pairs });
                }
            }
            None => {
                if f.extension().is_some_and(|e| e == "jsonl") {
                    bail!(UsageError(format!("{} has no thread labels; pass --links", f.display())));
                }
                for pp in load_gold_corpus(std::slice::from_ref(f), line_ref)? {
                    let pairs = pp.scenes.into_iter().map(|gs| (gs.scene, gs.partition)).collect();
                    corpus.push(TitleThreads { title_slug: pp.title, scenes: pairs });
                }
            }
        }
    }
    corpus.sort_by(|x, y| x.title_slug.cmp(&y.title_slug));
    if corpus.is_empty() {
        bail!(UsageError("no corpus files found".into()));
    }
    if a.resamples < MIN_RESAMPLES {
        bail!(UsageError(format!("--resamples must be at least {MIN_RESAMPLES}")));
    }
    let bs = BootstrapSettings { resamples: a.resamples, seed: g.seed };
    let era = thread_length_by_era(&corpus, &meta, a.bucket_width, provenance.clone(), bs)?;
    let floor = floor_claiming(&corpus, &meta, a.min_year, provenance, bs)?;
    for b in &era.buckets {
        println!(
            "{}  mean thread length {:.2} [{:.2}, {:.2}]  movies {}",
            b.start_year, b.mean_thread_length, b.lo, b.hi, b.n_movies
        );
    }
    for r in &floor.records {
        println!(
            "{}  started {:.1}%  lines {:.1}%  delta {:+.1} [{:+.1}, {:+.1}]",
            r.year, r.pct_threads_started_by_women, r.pct_lines_by_women, r.delta, r.lo, r.hi
        );
    }
    for w in &floor.warnings {
        eprintln!("warning: {w:?}");
    }
    run.write_json("era.json", &era)?;
    run.write_json("floor.json", &floor)?;
    run.write("era.csv", |w| Ok(write_era_csv(w, &era.buckets)?))?;
    run.write("floor.csv", |w| Ok(write_floor_csv(w, &floor.records)?))?;
    run.write("thread_stats.jsonl", |w| {
        for t in &corpus {
            for (scene, partition) in &t.scenes {
                let stats = thread_stats(partition, scene);
                serde_json::to_writer(&mut *w, &StatsRow { title: &t.title_slug, stats: &stats })?;
                writeln!(w)?;
            }
        }
        Ok(())
    })?;
    Ok(())
}
