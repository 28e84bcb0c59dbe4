//! Reading the pipeline's file formats from disk.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use scriptthread_core::annotation::{
    postprocess, read_annotations, read_links, GoldLinks, GoldScene, LineReference, PostProcessed, ReaderConfig,
};
use scriptthread_core::screenplay::{is_valid_slug, read_canonical, slugify, Scene};

/// Title slug from a file name: the stem, slugified when needed.
pub fn title_of(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    if is_valid_slug(&stem) {
        stem
    } else {
        slugify(&stem)
    }
}

fn has_ext(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

/// Expands directories into their files with the given extensions, sorted.
pub fn expand(paths: &[PathBuf], exts: &[&str]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && exts.iter().any(|x| has_ext(f, x)))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Reads and post-processes an annotation table (`.csv` is comma separated,
/// anything else tab separated).
pub fn load_gold(path: &Path, line_reference: LineReference) -> Result<PostProcessed> {
    let mut cfg = if has_ext(path, "csv") { ReaderConfig::csv() } else { ReaderConfig::default() };
    cfg.line_reference = line_reference;
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let table = read_annotations(BufReader::new(file), &title_of(path), &cfg)
        .with_context(|| format!("reading annotations {}", path.display()))?;
    postprocess(&table, line_reference).with_context(|| format!("post-processing {}", path.display()))
}

/// Scenes of a title from canonical JSONL or from an annotation table.
pub fn load_scenes(path: &Path, line_reference: LineReference) -> Result<Vec<(String, Vec<Scene>)>> {
    if has_ext(path, "jsonl") {
        let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let docs = read_canonical(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
        Ok(docs.into_iter().map(|d| (d.title, d.scenes)).collect())
    } else {
        let pp = load_gold(path, line_reference)?;
        Ok(vec![(pp.title, pp.scenes.into_iter().map(|g| g.scene).collect())])
    }
}

pub fn load_links(path: &Path) -> Result<Vec<GoldLinks>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_links(BufReader::new(file)).with_context(|| format!("reading links {}", path.display()))
}

/// Links for an annotation: from a links JSONL file, or derived from a gold
/// table.
pub fn load_annotation_links(path: &Path, line_reference: LineReference) -> Result<Vec<GoldLinks>> {
    if has_ext(path, "jsonl") {
        load_links(path)
    } else {
        Ok(load_gold(path, line_reference)?.scenes.into_iter().map(|g| g.links).collect())
    }
}

/// Gold scenes of several tables, rejecting duplicate titles.
pub fn load_gold_corpus(paths: &[PathBuf], line_reference: LineReference) -> Result<Vec<PostProcessed>> {
    let mut out: Vec<PostProcessed> = Vec::new();
    for p in paths {
        let pp = load_gold(p, line_reference)?;
        if out.iter().any(|o| o.title == pp.title) {
            bail!("title {} appears in more than one input", pp.title);
        }
        out.push(pp);
    }
    out.sort_by(|a, b| a.title.cmp(&b.title));
    Ok(out)
}

pub fn gold_pairs(corpus: &[PostProcessed]) -> Vec<(GoldLinks, Scene)> {
    corpus.iter().flat_map(|pp| pp.scenes.iter().map(|g: &GoldScene| (g.links.clone(), g.scene.clone()))).collect()
}
