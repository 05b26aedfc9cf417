use super::*;
use crate::image::GrayImage;
use crate::rng::split_rng;

fn phantom_features(seed: u64, n: usize, mix: &[f64]) -> (Vec<FeatureVector>, Vec<u32>) {
    let cfg = EvalConfig::default();
    let mut feats = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let mut rng = split_rng(seed, i as u64);
        let class = sample_class(&mut rng, mix);
        let img = generate_phantom(&mut rng, class, 96).unwrap();
        let f = extract_features(&img, &cfg.tissues, &cfg.glcm).unwrap();
        assert!(f.is_complete(), "{f:?}");
        feats.push(f);
        labels.push(class as u32);
    }
    (feats, labels)
}

#[test]
fn segmentation_cases() {
    let cfg = TissueConfig::default();
    let m = segment_tissues(&GrayImage::filled(64, 64, 80), &cfg).unwrap();
    assert_eq!(m.get(FAT).unwrap().count(), 64 * 64);
    assert_eq!(m.get(GLANDULAR).unwrap().count(), 0);
    assert_eq!(m.get(LIGAMENT).unwrap().count(), 0);

    let img = GrayImage::from_fn(64, 64, |r, c| ((r * 64 + c) % 256) as u8);
    let m = segment_tissues(&img, &cfg).unwrap();
    let mut seen = 0;
    for r in 0..64 {
        for c in 0..64 {
            let hits = m.masks.iter().filter(|(_, mk)| mk.get(r, c)).count();
            assert!(hits <= 1);
            seen += hits;
            let v = img.get(r, c);
            if v < 40 || (121..140).contains(&v) || (201..215).contains(&v) {
                assert_eq!(hits, 0);
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn overlapping_intervals_rejected() {
    let mut cfg = TissueConfig::default();
    cfg.tissues[1].lo = 100;
    assert!(cfg.validate().is_err());
    assert!(segment_tissues(&GrayImage::new(64, 64), &cfg).is_err());
}

#[test]
fn fg_ratio_cases() {
    let cfg = TissueConfig::default();
    let half = GrayImage::from_fn(64, 64, |r, _| if r < 32 { 80 } else { 170 });
    assert_eq!(
        fg_ratio(&segment_tissues(&half, &cfg).unwrap()).unwrap(),
        1.0
    );
    // 3000 fat pixels, 1000 glandular
    let img = GrayImage::from_fn(100, 100, |r, c| {
        let i = r * 100 + c;
        if i < 3000 {
            80
        } else if i < 4000 {
            170
        } else {
            0
        }
    });
    assert_eq!(
        fg_ratio(&segment_tissues(&img, &cfg).unwrap()).unwrap(),
        3.0
    );
    assert!(fg_ratio(&segment_tissues(&GrayImage::filled(64, 64, 80), &cfg).unwrap()).is_err());
}

#[test]
fn features_are_stable() {
    let cfg = EvalConfig::default();
    let img = generate_phantom(&mut split_rng(1, 1), 2, 96).unwrap();
    let a = extract_features(&img, &cfg.tissues, &cfg.glcm).unwrap();
    let b = extract_features(&img, &cfg.tissues, &cfg.glcm).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 5 + 9 + 6 + 1);
    let flat = extract_features(&GrayImage::filled(64, 64, 80), &cfg.tissues, &cfg.glcm).unwrap();
    assert_eq!(flat.len(), a.len());
    assert!(!flat.is_complete());
}

#[test]
fn phantom_classes_are_ordered_by_ratio() {
    let cfg = TissueConfig::default();
    let mut medians = Vec::new();
    for class in 0..4 {
        let mut r: Vec<f64> = (0..9)
            .map(|i| {
                let img =
                    generate_phantom(&mut split_rng(50 + class as u64, i), class, 96).unwrap();
                fg_ratio(&segment_tissues(&img, &cfg).unwrap()).unwrap()
            })
            .collect();
        r.sort_by(f64::total_cmp);
        medians.push(r[4]);
    }
    assert!(medians.windows(2).all(|w| w[0] > w[1]), "{medians:?}");
}

#[test]
fn pair_similarity_contract() {
    let (train, _) = phantom_features(3, 120, &PHANTOM_TRAIN_MIX);
    let rows: Vec<Vec<f64>> = train.iter().map(|f| f.values().unwrap()).collect();
    let mut rng = split_rng(0, 0);
    assert!(pair_similarity_distributions(&rows, &rows, 50, 10, &mut rng).is_err());
    assert!(pair_similarity_distributions(&rows[..1], &rows, 500, 10, &mut rng).is_err());
    let same = pair_similarity_distributions(&rows, &rows, 4000, 10, &mut rng).unwrap();
    assert_eq!(same.train_train.len(), 4000);
    assert!(same.ks < 0.06, "{}", same.ks);

    let negated: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| -x).collect())
        .collect();
    let flip = pair_similarity_distributions(&rows, &negated, 4000, 10, &mut rng).unwrap();
    assert!(flip.ks > 0.1, "{}", flip.ks);
}

#[test]
fn tt_pairs_never_self_pair() {
    // two orthogonal points: a self pair would give similarity 1
    let rows = vec![
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![-1.0, 0.0],
        vec![0.0, -1.0],
    ];
    let p = pair_similarity_distributions(&rows, &rows, 1000, 2, &mut split_rng(2, 0)).unwrap();
    assert!(p.train_train.iter().all(|&s| s < 0.999));
}

#[test]
fn thresholds_split_classes() {
    let ratios = [10.0, 11.0, 12.0, 3.0, 3.5, 1.0, 1.2, 0.4, 0.5];
    let labels = [0, 0, 0, 1, 1, 2, 2, 3, 3];
    let t = FgThresholds::fit(&ratios, &labels, 0.025).unwrap();
    assert_eq!(t.classes, vec![3, 2, 1, 0]);
    for (&r, &l) in ratios.iter().zip(&labels) {
        assert_eq!(t.classify(r), l);
    }
}

#[test]
fn class_metrics_self_and_missing_class() {
    let (train, labels) = phantom_features(4, 240, &[0.25, 0.25, 0.25, 0.25]);
    let rows: Vec<Vec<f64>> = train.iter().map(|f| f.values().unwrap()).collect();
    let ratios: Vec<f64> = train.iter().map(|f| f.get("fg_ratio").unwrap()).collect();
    let m = class_metrics(&rows, &labels, &ratios, &rows, &ratios, 5, 0.025).unwrap();
    for c in 0..4 {
        assert!(m.coverage[&c] >= 0.98, "{:?}", m.coverage);
        assert!((m.density[&c] - 1.0).abs() <= 0.1, "{:?}", m.density);
    }
    assert!((m.prevalence.values().sum::<f64>() - 1.0).abs() < 1e-12);

    let keep: Vec<usize> = (0..rows.len()).filter(|&i| labels[i] != 3).collect();
    let g: Vec<Vec<f64>> = keep.iter().map(|&i| rows[i].clone()).collect();
    let gr: Vec<f64> = keep.iter().map(|&i| ratios[i]).collect();
    let m = class_metrics(&rows, &labels, &ratios, &g, &gr, 5, 0.025).unwrap();
    assert!(m.coverage[&3] < 0.05);

    // removing generated points never raises coverage
    let mut prev = f64::INFINITY;
    for n in [240, 180, 120, 60, 10] {
        let m = class_metrics(&rows, &labels, &ratios, &rows[..n], &ratios[..n], 5, 0.025).unwrap();
        let total: f64 = m.coverage.values().sum();
        assert!(total <= prev + 1e-12);
        prev = total;
    }
}

#[test]
fn compare_null_and_halved() {
    let (train, labels) = phantom_features(5, 200, &PHANTOM_TRAIN_MIX);
    let (resample, _) = phantom_features(6, 200, &PHANTOM_TRAIN_MIX);
    let cfg = EvalConfig {
        pairs: 4000,
        ..EvalConfig::default()
    };
    let c = compare_features(&train, Some(&labels), &resample, &cfg, &mut split_rng(1, 0)).unwrap();
    assert_eq!(c.families.len(), 4);
    assert!(c.overall_ks.unwrap() < 0.08, "{c:?}");

    let halved: Vec<FeatureVector> = (0..200)
        .map(|i| {
            let mut rng = split_rng(6, i as u64);
            let class = sample_class(&mut rng, &PHANTOM_TRAIN_MIX);
            let img = generate_phantom(&mut rng, class, 96)
                .unwrap()
                .map(|v| v / 2);
            extract_features(&img, &cfg.tissues, &cfg.glcm).unwrap()
        })
        .collect();
    let c = compare_features(&train, Some(&labels), &halved, &cfg, &mut split_rng(1, 0)).unwrap();
    assert_eq!(c.families[0].family, "texture");
    assert!(c.families[0].ks.unwrap() > 0.1, "{:?}", c.families);
    // halving pushes glandular tissue into the fat interval
    assert_eq!(c.families[1].gen_images, 0);
    assert_eq!(c.families[1].ks, None);
    assert_eq!(c.overall_ks, None);
}
