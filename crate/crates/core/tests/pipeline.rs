use std::fs;
use std::path::Path;

use scmkit::config::Config;
use scmkit::io::load_ensemble;
use scmkit::manifest::ModelId;
use scmkit::pipeline::{analyze_ensemble, corrupt_ensemble, generate_ensemble, Assets, Corruption};
use serde_json::json;

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn generation_is_byte_deterministic() {
    let assets = Assets::default();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for model in [ModelId::Alphabet, ModelId::Voronoi, ModelId::Flag] {
        let (da, db) = (a.path().join(model.as_str()), b.path().join(model.as_str()));
        generate_ensemble(model, 6, 11, None, &assets, &da).unwrap();
        generate_ensemble(model, 6, 11, None, &assets, &db).unwrap();
        assert_eq!(dir_bytes(&da), dir_bytes(&db), "{model}");
    }
}

#[test]
fn prefix_of_larger_ensemble_matches() {
    let assets = Assets::default();
    let t = tempfile::tempdir().unwrap();
    let small = generate_ensemble(ModelId::Flag, 3, 5, None, &assets, &t.path().join("s")).unwrap();
    let big = generate_ensemble(ModelId::Flag, 8, 5, None, &assets, &t.path().join("b")).unwrap();
    assert_eq!(small.records[..], big.records[..3]);
    for r in &small.records {
        assert_eq!(
            fs::read(t.path().join("s").join(&r.file)).unwrap(),
            fs::read(t.path().join("b").join(&r.file)).unwrap()
        );
    }
}

const STOCHASTIC: [&str; 4] = ["letter_chi2", "texture", "intensity_fg", "intensity_bg"];

#[test]
fn clean_ensembles_pass_every_check() {
    let assets = Assets::default();
    let config = Config::default();
    let t = tempfile::tempdir().unwrap();
    for model in [ModelId::Alphabet, ModelId::Voronoi, ModelId::Flag] {
        let d = t.path().join(model.as_str());
        generate_ensemble(model, 12, 3, None, &assets, &d).unwrap();
        let ens = load_ensemble(&d).unwrap();
        let report = analyze_ensemble(&ens, model, &config, &assets, json!({})).unwrap();
        assert!(report.excluded.is_empty(), "{model}: {:?}", report.excluded);
        assert_eq!(report.images.len(), 12);
        // Structural checks are exact; GOF and texture checks reject at their level alpha.
        for r in &report.images {
            for (name, check) in &r.checks {
                if !STOCHASTIC.contains(&name.as_str()) {
                    assert!(check.pass, "{model} {} {name}", r.file);
                }
            }
        }
    }
}

#[test]
fn zero_rate_corruption_copies_the_ensemble() {
    let assets = Assets::default();
    let t = tempfile::tempdir().unwrap();
    let src = t.path().join("src");
    let dst = t.path().join("dst");
    generate_ensemble(ModelId::Alphabet, 5, 2, None, &assets, &src).unwrap();
    corrupt_ensemble(&src, Corruption::PairBreak, 0.0, 9, &assets, &dst).unwrap();
    assert_eq!(dir_bytes(&src), dir_bytes(&dst));
}

#[test]
fn corruption_marks_exactly_the_requested_count() {
    let assets = Assets::default();
    let config = Config::default();
    let t = tempfile::tempdir().unwrap();
    let src = t.path().join("src");
    generate_ensemble(ModelId::Flag, 20, 4, None, &assets, &src).unwrap();
    for kind in [
        Corruption::TileMove,
        Corruption::TileFlip,
        Corruption::ForbiddenTile,
    ] {
        let dst = t.path().join(kind.as_str());
        let m = corrupt_ensemble(&src, kind, 0.25, 1, &assets, &dst).unwrap();
        let marked: Vec<_> = m
            .records
            .iter()
            .filter(|r| r.corruption.is_some())
            .map(|r| r.file.clone())
            .collect();
        assert_eq!(marked.len(), 5);
        let report = analyze_ensemble(
            &load_ensemble(&dst).unwrap(),
            ModelId::Flag,
            &config,
            &assets,
            json!({}),
        )
        .unwrap();
        for r in &report.images {
            if marked.contains(&r.file) {
                assert_eq!(r.passed("pattern_exact"), Some(false), "{kind} {}", r.file);
                if kind == Corruption::ForbiddenTile {
                    assert_eq!(r.passed("forbidden"), Some(false));
                }
                if kind == Corruption::TileMove {
                    assert_eq!(r.passed("pattern_match"), Some(false));
                }
            }
        }
    }
}

#[test]
fn corruption_rejects_wrong_model() {
    let assets = Assets::default();
    let t = tempfile::tempdir().unwrap();
    let src = t.path().join("src");
    generate_ensemble(ModelId::Flag, 2, 4, None, &assets, &src).unwrap();
    assert!(corrupt_ensemble(
        &src,
        Corruption::PairBreak,
        0.5,
        1,
        &assets,
        &t.path().join("d")
    )
    .is_err());
    assert!(corrupt_ensemble(
        &src,
        Corruption::TileFlip,
        1.5,
        1,
        &assets,
        &t.path().join("d")
    )
    .is_err());
}

#[test]
fn class_mix_is_validated() {
    let assets = Assets::default();
    let t = tempfile::tempdir().unwrap();
    let d = t.path().join("x");
    assert!(generate_ensemble(ModelId::Alphabet, 2, 1, Some(&[1.0]), &assets, &d).is_err());
    assert!(generate_ensemble(ModelId::Voronoi, 2, 1, Some(&[1.0, 1.0]), &assets, &d).is_err());
    let m = generate_ensemble(
        ModelId::Voronoi,
        10,
        1,
        Some(&[0.0, 0.0, 1.0, 0.0]),
        &assets,
        &d,
    )
    .unwrap();
    assert!(m.records.iter().all(|r| r.class == Some(48)));
}

#[test]
fn empty_ensemble_is_allowed() {
    let assets = Assets::default();
    let t = tempfile::tempdir().unwrap();
    let m = generate_ensemble(ModelId::Voronoi, 0, 1, None, &assets, t.path()).unwrap();
    assert!(m.records.is_empty());
    let r = analyze_ensemble(
        &load_ensemble(t.path()).unwrap(),
        ModelId::Voronoi,
        &Config::default(),
        &Assets::default(),
        json!({}),
    )
    .unwrap();
    assert!(r.images.is_empty());
}
