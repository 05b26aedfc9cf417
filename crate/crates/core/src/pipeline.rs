//! Ensemble-level operations: generation, corruption, analysis and
//! comparison of image directories.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alphabet::{analyze_alphabet, random_grid, GlyphSet, Letter, PairCounts};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::eval::{compare_features, extract_features, FAMILIES};
use crate::features::FeatureVector;
use crate::flag::{analyze_flag, render_roles, PatternSpec, TILES};
use crate::image::GrayImage;
use crate::io::{load_any, load_ensemble, write_png, write_text, Ensemble};
use crate::manifest::{
    image_file_name, EnsembleManifest, ImageRecord, ModelId, TruthValue, MANIFEST_FILE,
};
use crate::report::{ComparisonReport, ContextReport};
use crate::rng::{split_rng, RngStream};
use crate::stats::{pca_fit, pca_project};
use crate::voronoi::{
    analyze_voronoi, generate_voronoi_regions, ImplicitContextStats, MIN_PCA_TRAIN, VORONOI_CLASSES,
};

/// Stream family for per-image class draws, kept apart from the image
/// streams so an image can be regenerated from its seed and class alone.
const CLASS_STREAM_SEED_MIX: u64 = 0x9e37_79b9_7f4a_7c15;
/// Stream id used to choose which images a corruption run touches.
const SELECTION_STREAM: u64 = u64::MAX;

/// Built-in or overridden glyphs and flag patterns.
#[derive(Clone, Debug, Default)]
pub struct Assets {
    pub glyphs: GlyphSet,
    pub patterns: PatternSpec,
}

impl Assets {
    pub fn from_config(config: &Config) -> Result<Assets> {
        Ok(Assets {
            glyphs: config.glyphs()?,
            patterns: config.patterns()?,
        })
    }
}

/// Class labels of a model, in class-mix order; empty for single-class models.
pub fn model_classes(model: ModelId) -> Vec<u32> {
    match model {
        ModelId::Voronoi => VORONOI_CLASSES.iter().map(|&c| c as u32).collect(),
        ModelId::Flag => (0..8).collect(),
        ModelId::Alphabet | ModelId::External => Vec::new(),
    }
}

/// Validated class weights; `None` means uniform.
pub fn class_mix(model: ModelId, mix: Option<&[f64]>) -> Result<Vec<f64>> {
    let classes = model_classes(model);
    match mix {
        None => Ok(vec![1.0; classes.len()]),
        Some(_) if classes.is_empty() => Err(Error::invalid(format!(
            "{model} has a single class; drop --class-mix"
        ))),
        Some(w) => {
            if w.len() != classes.len() {
                return Err(Error::invalid(format!(
                    "{model} class mix needs {} weights, got {}",
                    classes.len(),
                    w.len()
                )));
            }
            if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) || w.iter().sum::<f64>() <= 0.0 {
                return Err(Error::invalid(
                    "class weights must be non-negative with a positive sum",
                ));
            }
            Ok(w.to_vec())
        }
    }
}

fn draw_class(model: ModelId, global_seed: u64, index: u64, weights: &[f64]) -> Option<u32> {
    let classes = model_classes(model);
    if classes.is_empty() {
        return None;
    }
    let mut rng = RngStream::new(global_seed ^ CLASS_STREAM_SEED_MIX, index);
    let total: f64 = weights.iter().sum();
    let mut u = rng.uniform() * total;
    for (c, &w) in classes.iter().zip(weights) {
        if u < w {
            return Some(*c);
        }
        u -= w;
    }
    classes
        .iter()
        .zip(weights)
        .rev()
        .find(|(_, &w)| w > 0.0)
        .map(|(&c, _)| c)
}

fn list<T: Copy + Into<f64>>(xs: &[T]) -> TruthValue {
    TruthValue::List(xs.iter().map(|&x| x.into()).collect())
}

/// Renders image `index` of an ensemble and its manifest record.
pub fn generate_image(
    model: ModelId,
    assets: &Assets,
    global_seed: u64,
    index: u64,
    class: Option<u32>,
) -> Result<(GrayImage, ImageRecord)> {
    let mut rng = split_rng(global_seed, index);
    let mut record = ImageRecord::new(image_file_name(index as usize), Some(index), class);
    let image = match model {
        ModelId::Alphabet => {
            let grid = random_grid(&mut rng);
            let cells: Vec<f64> = grid
                .cells
                .iter()
                .flatten()
                .map(|l| l.index() as f64)
                .collect();
            record.truth.insert("grid".into(), TruthValue::List(cells));
            let counts = grid.counts();
            record.truth.insert(
                "letter_counts".into(),
                TruthValue::List(counts.iter().map(|&c| c as f64).collect()),
            );
            grid.render(&assets.glyphs)
        }
        ModelId::Voronoi => {
            let c = class.ok_or_else(|| Error::invalid("voronoi image needs a class"))? as usize;
            let (img, truth) = generate_voronoi_regions(&mut rng, c, c)?;
            record.truth.insert(
                "regions".into(),
                TruthValue::Number(truth.region_count() as f64),
            );
            record.truth.insert(
                "areas".into(),
                TruthValue::List(truth.areas.iter().map(|&a| a as f64).collect()),
            );
            record
                .truth
                .insert("intensities".into(), list(&truth.intensities));
            img
        }
        ModelId::Flag => {
            let c = class.ok_or_else(|| Error::invalid("flag image needs a class"))? as usize;
            let roles = *assets.patterns.mask(c)?;
            let fg: Vec<f64> = roles.foreground().into_iter().map(|i| i as f64).collect();
            record
                .truth
                .insert("foreground_tiles".into(), TruthValue::List(fg));
            render_roles(&mut rng, &roles)
        }
        ModelId::External => return Err(Error::invalid("external ensembles cannot be generated")),
    };
    Ok((image, record))
}

/// Generates `count` images into `dir` (in parallel) plus the manifest.
pub fn generate_ensemble(
    model: ModelId,
    count: usize,
    seed: u64,
    mix: Option<&[f64]>,
    assets: &Assets,
    dir: &Path,
) -> Result<EnsembleManifest> {
    if !model.is_scm() {
        return Err(Error::invalid("external ensembles cannot be generated"));
    }
    let weights = class_mix(model, mix)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let records = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let class = draw_class(model, seed, i, &weights);
            let (image, record) = generate_image(model, assets, seed, i, class)?;
            write_png(&dir.join(&record.file), &image)?;
            Ok(record)
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = EnsembleManifest::new(model, seed, records);
    write_text(&dir.join(MANIFEST_FILE), &manifest.to_json()?)?;
    Ok(manifest)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corruption {
    /// Alphabet: one Y of an X-Y pair becomes X.
    PairBreak,
    /// Voronoi: eight extra regions, landing between classes.
    RegionCount,
    /// Flag: one foreground tile moves to an allowed background position.
    TileMove,
    /// Flag: one allowed tile changes role.
    TileFlip,
    /// Flag: one forbidden tile becomes foreground.
    ForbiddenTile,
}

impl Corruption {
    pub const ALL: [Corruption; 5] = [
        Corruption::PairBreak,
        Corruption::RegionCount,
        Corruption::TileMove,
        Corruption::TileFlip,
        Corruption::ForbiddenTile,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Corruption::PairBreak => "pair-break",
            Corruption::RegionCount => "region-count",
            Corruption::TileMove => "tile-move",
            Corruption::TileFlip => "tile-flip",
            Corruption::ForbiddenTile => "forbidden-tile",
        }
    }

    pub fn model(self) -> ModelId {
        match self {
            Corruption::PairBreak => ModelId::Alphabet,
            Corruption::RegionCount => ModelId::Voronoi,
            _ => ModelId::Flag,
        }
    }
}

impl fmt::Display for Corruption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Corruption {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Corruption::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown error kind {s:?}")))
    }
}

/// Regenerates one image from its record and injects `kind`.
/// Returns the image and a short description of the change.
pub fn corrupt_image(
    kind: Corruption,
    assets: &Assets,
    global_seed: u64,
    record: &ImageRecord,
    rng: &mut RngStream,
) -> Result<(GrayImage, String)> {
    let stream = record
        .seed
        .ok_or_else(|| Error::invalid(format!("{} has no generation seed", record.file)))?;
    let mut gen_rng = split_rng(global_seed, stream);
    match kind {
        Corruption::PairBreak => {
            let mut grid = random_grid(&mut gen_rng);
            let pairs: Vec<(usize, usize)> = (0..64)
                .map(|k| (k / 8, k % 8))
                .filter(|&(r, c)| {
                    c < 7 && grid.get(r, c) == Letter::X && grid.get(r, c + 1) == Letter::Y
                })
                .collect();
            debug_assert_eq!(pairs.len(), PairCounts::PRESCRIBED.xy);
            let (r, c) = pairs[rng.below(pairs.len())];
            grid.set(r, c + 1, Letter::X);
            Ok((
                grid.render(&assets.glyphs),
                format!("pair-break at ({r},{})", c + 1),
            ))
        }
        Corruption::RegionCount => {
            let class = record
                .class
                .ok_or_else(|| Error::invalid(format!("{} has no class", record.file)))?
                as usize;
            let (img, _) = generate_voronoi_regions(&mut gen_rng, class, class + 8)?;
            Ok((img, format!("region-count {class}->{}", class + 8)))
        }
        Corruption::TileMove | Corruption::TileFlip | Corruption::ForbiddenTile => {
            let class = record
                .class
                .ok_or_else(|| Error::invalid(format!("{} has no class", record.file)))?
                as usize;
            let p = &assets.patterns;
            let mut roles = *p.mask(class)?;
            let allowed_bg: Vec<usize> = (0..TILES * TILES)
                .filter(|&i| !roles.at(i) && !p.is_forbidden(i))
                .collect();
            let note = match kind {
                Corruption::TileMove => {
                    let fg = roles.foreground();
                    let from = fg[rng.below(fg.len())];
                    let to = allowed_bg[rng.below(allowed_bg.len())];
                    roles.set(from / TILES, from % TILES, false);
                    roles.set(to / TILES, to % TILES, true);
                    format!("tile-move {from}->{to}")
                }
                Corruption::TileFlip => {
                    let allowed: Vec<usize> =
                        (0..TILES * TILES).filter(|&i| !p.is_forbidden(i)).collect();
                    let t = allowed[rng.below(allowed.len())];
                    roles.set(t / TILES, t % TILES, !roles.at(t));
                    format!("tile-flip {t}")
                }
                _ => {
                    let t = p.forbidden[rng.below(p.forbidden.len())];
                    roles.set(t / TILES, t % TILES, true);
                    format!("forbidden-tile {t}")
                }
            };
            Ok((render_roles(&mut gen_rng, &roles), note))
        }
    }
}

/// Writes a copy of the ensemble at `input` to `output` in which exactly
/// `round(rate · N)` images, chosen by `seed`, carry one injected error.
/// Untouched images are copied byte for byte.
pub fn corrupt_ensemble(
    input: &Path,
    kind: Corruption,
    rate: f64,
    seed: u64,
    assets: &Assets,
    output: &Path,
) -> Result<EnsembleManifest> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::invalid(format!("rate {rate} not in [0, 1]")));
    }
    let ens = load_ensemble(input)?;
    let manifest = ens.manifest();
    if manifest.model_id != kind.model() {
        return Err(Error::invalid(format!(
            "{kind} applies to {} ensembles, input is {}",
            kind.model(),
            manifest.model_id
        )));
    }
    let n = manifest.records.len();
    let m = (rate * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    RngStream::new(seed, SELECTION_STREAM).shuffle(&mut order);
    let mut chosen = vec![false; n];
    for &i in &order[..m] {
        chosen[i] = true;
    }
    fs::create_dir_all(output).map_err(|e| Error::io(output, e))?;
    let global_seed = manifest.global_seed;
    let records = manifest
        .records
        .par_iter()
        .enumerate()
        .map(|(i, record)| {
            let mut record = record.clone();
            let dest = output.join(&record.file);
            if chosen[i] {
                let mut rng = RngStream::new(seed, i as u64);
                let (img, note) = corrupt_image(kind, assets, global_seed, &record, &mut rng)?;
                write_png(&dest, &img)?;
                record.corruption = Some(note);
            } else {
                let src = input.join(&record.file);
                fs::copy(&src, &dest).map_err(|e| Error::io(&src, e))?;
            }
            Ok(record)
        })
        .collect::<Result<Vec<_>>>()?;
    let out = EnsembleManifest {
        records,
        ..manifest.clone()
    };
    write_text(&output.join(MANIFEST_FILE), &out.to_json()?)?;
    Ok(out)
}

enum Outcome {
    Analyzed(crate::report::ImageResult, Extra),
    Excluded(String),
}

enum Extra {
    Alphabet(PairCounts, usize),
    Voronoi(String, usize, ImplicitContextStats),
    Flag(Option<usize>, usize),
}

fn analyze_one(
    model: ModelId,
    image: &GrayImage,
    file: &str,
    config: &Config,
    assets: &Assets,
) -> Result<Outcome> {
    Ok(match model {
        ModelId::Alphabet => {
            let a = analyze_alphabet(image, &assets.glyphs, &config.alphabet)?;
            match &a.pairs {
                None => Outcome::Excluded(format!("{} unrecognized tiles", a.unrecognized)),
                Some(p) => Outcome::Analyzed(
                    a.to_result(file),
                    Extra::Alphabet(p.counts, p.violations.len()),
                ),
            }
        }
        ModelId::Voronoi => match analyze_voronoi(image, &config.voronoi) {
            Ok(a) => Outcome::Analyzed(
                a.to_result(file, &config.voronoi),
                Extra::Voronoi(a.class.bin(), a.region_count, a.context),
            ),
            Err(Error::Degenerate(msg)) => Outcome::Excluded(msg),
            Err(e) => return Err(e),
        },
        ModelId::Flag => {
            let a = analyze_flag(image, &assets.patterns, &config.flag)?;
            let matched = (a.pattern.rmae <= config.flag.rmae_threshold).then_some(a.pattern.class);
            Outcome::Analyzed(
                a.to_result(file, &config.flag),
                Extra::Flag(matched, a.pattern.forbidden_violations.len()),
            )
        }
        ModelId::External => return Err(Error::invalid("choose an SCM model to analyze with")),
    })
}

/// Runs the model's analyzer chain on every image of `ens`.
///
/// Manifest-backed ensembles must match `model`; bare image directories
/// can be analyzed as any model. Truth in the manifest is never read.
pub fn analyze_ensemble(
    ens: &Ensemble,
    model: ModelId,
    config: &Config,
    assets: &Assets,
    run_config: serde_json::Value,
) -> Result<ContextReport> {
    let found = ens.manifest().model_id;
    if !model.is_scm() || (found != model && found != ModelId::External) {
        return Err(Error::invalid(format!(
            "cannot analyze a {found} ensemble as {model}"
        )));
    }
    let outcomes = (0..ens.len())
        .into_par_iter()
        .map(|i| {
            let image = ens.image(i)?;
            analyze_one(
                model,
                &image,
                &ens.manifest().records[i].file,
                config,
                assets,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ContextReport::new(model, run_config);
    let mut contexts = Vec::new();
    for (record, outcome) in ens.manifest().records.iter().zip(outcomes) {
        match outcome {
            Outcome::Excluded(reason) => {
                report.excluded.insert(record.file.clone(), reason);
            }
            Outcome::Analyzed(result, extra) => {
                match extra {
                    Extra::Alphabet(counts, violations) => {
                        for (name, n) in counts.named() {
                            report.bump(&format!("pair.{name}"), n.to_string());
                        }
                        report.bump("pair_violations", violations.to_string());
                    }
                    Extra::Voronoi(bin, count, ctx) => {
                        report.bump("region_class", bin);
                        report.bump("region_count", count.to_string());
                        contexts.push(ctx);
                    }
                    Extra::Flag(class, forbidden) => {
                        report.bump(
                            "class",
                            class.map_or("unmatched".to_string(), |c| c.to_string()),
                        );
                        report.bump("forbidden_violations", forbidden.to_string());
                    }
                }
                report.images.push(result);
            }
        }
    }
    if !contexts.is_empty() {
        for (j, name) in ImplicitContextStats::NAMES.iter().enumerate() {
            let mean = contexts.iter().map(|c| c.to_vec()[j]).sum::<f64>() / contexts.len() as f64;
            report
                .aggregates
                .insert(format!("implicit.{name}.mean"), mean);
        }
    }
    if contexts.len() >= MIN_PCA_TRAIN {
        let rows: Vec<Vec<f64>> = contexts.iter().map(|c| c.to_vec()).collect();
        if let Ok(model) = pca_fit(&rows, 2) {
            let pts = rows
                .iter()
                .map(|r| pca_project(&model, r).map(|p| [p[0], p[1]]))
                .collect::<Result<Vec<_>>>()?;
            report.points.insert("implicit_context_pc".into(), pts);
        }
    }
    report.finalize();
    Ok(report)
}

fn features_of(ens: &Ensemble, config: &Config) -> Result<Vec<FeatureVector>> {
    (0..ens.len())
        .into_par_iter()
        .map(|i| extract_features(&ens.image(i)?, &config.eval.tissues, &config.eval.glcm))
        .collect()
}

fn undefined_families(f: &FeatureVector) -> String {
    let missing: Vec<&str> = FAMILIES
        .iter()
        .copied()
        .filter(|fam| !f.select(fam).is_complete())
        .collect();
    format!("undefined features: {}", missing.join(", "))
}

/// Feature-based comparison of a training and a generated directory.
/// Training classes come from the manifest or labels file when every
/// training image has one.
pub fn compare_dirs(
    train_dir: &Path,
    gen_dir: &Path,
    config: &Config,
    seed: u64,
    run_config: serde_json::Value,
) -> Result<ComparisonReport> {
    let train = load_any(train_dir)?;
    let gen = load_any(gen_dir)?;
    if train.len() < 2 || gen.len() < 2 {
        return Err(Error::Insufficient(format!(
            "need at least 2 images on each side, got {} and {}",
            train.len(),
            gen.len()
        )));
    }
    let tf = features_of(&train, config)?;
    let gf = features_of(&gen, config)?;
    let mut excluded = BTreeMap::new();
    for (side, ens, feats) in [("train", &train, &tf), ("gen", &gen, &gf)] {
        for (record, f) in ens.manifest().records.iter().zip(feats.iter()) {
            if !f.is_complete() {
                log::warn!("{side}/{}: {}", record.file, undefined_families(f));
                excluded.insert(format!("{side}/{}", record.file), undefined_families(f));
            }
        }
    }
    let labels: Option<Vec<u32>> = train.manifest().records.iter().map(|r| r.class).collect();
    let mut rng = RngStream::new(seed, 0);
    let comparison = compare_features(&tf, labels.as_deref(), &gf, &config.eval, &mut rng)?;
    Ok(ComparisonReport::new(
        run_config,
        train.len(),
        gen.len(),
        excluded,
        comparison,
    ))
}
