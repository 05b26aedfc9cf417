use super::*;
use crate::imgproc::SauvolaParams;
use crate::rng::split_rng;
use crate::stats::spearman_rho;

fn cfg() -> VoronoiConfig {
    VoronoiConfig::default()
}

#[test]
fn levels_span_range() {
    let v = intensity_levels();
    assert_eq!(v[0], 1);
    assert_eq!(v[127], 254);
    assert!(v.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn generated_truth_invariants() {
    let levels = intensity_levels();
    for (i, &class) in VORONOI_CLASSES.iter().enumerate() {
        let (img, truth) = generate_voronoi(&mut split_rng(11, i as u64), class).unwrap();
        assert_eq!(truth.region_count(), class);
        let mut distinct = truth.intensities.clone();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct.len(), class);
        assert!(truth.intensities.iter().all(|v| levels.contains(v)));
        for &p in img.pixels() {
            assert!(p == 0 || levels.contains(&p));
        }
        // ordinal ranks with index tie-break match exactly
        let mut by_area: Vec<usize> = (0..class).collect();
        by_area.sort_by_key(|&j| (truth.areas[j], j));
        let mut by_int: Vec<usize> = (0..class).collect();
        by_int.sort_by_key(|&j| truth.intensities[j]);
        assert_eq!(by_area, by_int);
        let a: Vec<f64> = truth.areas.iter().map(|&x| x as f64).collect();
        let b: Vec<f64> = truth.intensities.iter().map(|&x| x as f64).collect();
        assert!(spearman_rho(&a, &b).unwrap().unwrap() > 0.999);
    }
}

#[test]
fn deterministic() {
    let a = generate_voronoi(&mut split_rng(4, 4), 32).unwrap();
    let b = generate_voronoi(&mut split_rng(4, 4), 32).unwrap();
    assert_eq!(a, b);
}

#[test]
fn invalid_class() {
    assert!(generate_voronoi(&mut split_rng(0, 0), 20).is_err());
}

#[test]
fn seeds_respect_min_distance() {
    let (_, t) = generate_voronoi(&mut split_rng(2, 0), 64).unwrap();
    for i in 0..t.seeds.len() {
        for j in 0..i {
            let d = ((t.seeds[i].0 - t.seeds[j].0).powi(2) + (t.seeds[i].1 - t.seeds[j].1).powi(2))
                .sqrt();
            assert!(d >= MIN_SEED_DISTANCE);
        }
    }
}

#[test]
fn round_trip_small_ensemble() {
    let mut ok_count = 0;
    let mut ok_rho = 0;
    let n = 40;
    for i in 0..n {
        let class = VORONOI_CLASSES[i % 4];
        let (img, _) = generate_voronoi(&mut split_rng(21, i as u64), class).unwrap();
        let r = extract_regions(&img, cfg().sauvola, 5).unwrap();
        if r.count().abs_diff(class) <= 1 {
            ok_count += 1;
        }
        let area: usize = r.areas.iter().sum();
        assert!(area as f64 >= 0.9 * 65536.0);
        if check_rank_correlation(&r.areas, &r.mean_intensities).unwrap() >= 0.99 {
            ok_rho += 1;
        }
    }
    assert_eq!(ok_count, n);
    assert!(ok_rho >= n - 1, "{ok_rho}");
}

#[test]
fn uniform_image_is_one_region() {
    let img = GrayImage::filled(256, 256, 120);
    let r = extract_regions(&img, SauvolaParams::default(), 5).unwrap();
    assert_eq!(r.count(), 1);
    let s = implicit_context_of(&r);
    assert_eq!(s.junction_count, 0.0);
    assert_eq!(s.area_mean, 65536.0);
    assert_eq!(s.area_std, 0.0);
}

#[test]
fn region_count_classes() {
    assert_eq!(classify_region_count(16, 1), RegionClass::Class(16));
    assert_eq!(classify_region_count(17, 1), RegionClass::Class(16));
    assert_eq!(classify_region_count(40, 1), RegionClass::OffClass(40));
    assert_eq!(classify_region_count(80, 1), RegionClass::OffClass(80));
    assert_eq!(RegionClass::OffClass(80).bin(), "off:80");
}

#[test]
fn rank_correlation_cases() {
    assert_eq!(check_rank_correlation(&[10, 20], &[5.0, 9.0]).unwrap(), 1.0);
    assert!(check_rank_correlation(&[10], &[5.0]).is_err());
    let mut rng = split_rng(8, 0);
    let mut total = 0.0;
    let trials = 2000;
    for _ in 0..trials {
        let areas: Vec<usize> = (0..32).map(|i| 100 + i * 7).collect();
        let mut ints: Vec<f64> = (0..32).map(|i| i as f64).collect();
        rng.shuffle(&mut ints);
        total += check_rank_correlation(&areas, &ints).unwrap();
    }
    assert!((total / trials as f64).abs() < 0.02);
}

#[test]
fn junctions_grow_with_class() {
    let med = |class: usize| {
        let mut js: Vec<f64> = (0..9)
            .map(|i| {
                let (img, _) = generate_voronoi(&mut split_rng(99, i), class).unwrap();
                implicit_context(&img, &cfg()).unwrap().junction_count
            })
            .collect();
        js.sort_by(f64::total_cmp);
        js[4]
    };
    assert!(med(64) > med(16));
}

#[test]
fn mean_area_definition() {
    let (img, _) = generate_voronoi(&mut split_rng(5, 1), 48).unwrap();
    let r = extract_regions(&img, cfg().sauvola, 5).unwrap();
    let s = implicit_context_of(&r);
    let non_edge: usize = r.labels.labels().iter().filter(|&&l| l > 0).count();
    assert!((s.area_mean - non_edge as f64 / r.count() as f64).abs() < 1e-9);
}

#[test]
fn pca_null_and_shift() {
    let stats = |seed: u64, n: u64, halve: bool| -> Vec<ImplicitContextStats> {
        (0..n)
            .map(|i| {
                let class = VORONOI_CLASSES[(i % 4) as usize];
                let c = if halve { class / 2 } else { class };
                let (img, _) = generate_voronoi_regions(&mut split_rng(seed, i), class, c).unwrap();
                implicit_context(&img, &cfg()).unwrap()
            })
            .collect()
    };
    let train = stats(1, 120, false);
    assert!(implicit_context_pca(&train[..40], &train).is_err());
    let same = implicit_context_pca(&train, &train).unwrap();
    assert!(same.ks.iter().all(|&k| k < 0.05));
    let halved = implicit_context_pca(&train, &stats(2, 120, true)).unwrap();
    assert!(halved.ks[0] > 0.3, "{:?}", halved.ks);
}

#[test]
fn analysis_result_checks() {
    let (img, _) = generate_voronoi(&mut split_rng(6, 0), 16).unwrap();
    let a = analyze_voronoi(&img, &cfg()).unwrap();
    let r = a.to_result("x.png", &cfg());
    assert!(r.all_passed());
}
