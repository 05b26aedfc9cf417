use super::*;
use crate::rng::split_rng;

fn patterns() -> PatternSpec {
    PatternSpec::default()
}

#[test]
fn shipped_patterns_are_valid() {
    let p = patterns();
    p.validate().unwrap();
    assert_eq!(p.masks.len(), 8);
    assert_eq!(p.forbidden.len(), 24);
    for m in &p.masks {
        assert_eq!(m.count(), 80);
        assert_eq!(256 - m.count(), 176);
    }
    let again = PatternSpec::from_json(&p.to_json()).unwrap();
    assert_eq!(again, p);
}

#[test]
fn invalid_specs_rejected() {
    let p = patterns();
    let mut bad = p.clone();
    bad.masks[2] = bad.masks[1];
    assert!(bad.validate().is_err());
    let mut bad = p.clone();
    let f = bad.forbidden[0];
    let i = bad.masks[0].foreground()[0];
    bad.masks[0].set(i / 16, i % 16, false);
    bad.masks[0].set(f / 16, f % 16, true);
    assert!(bad.validate().is_err());
    let mut bad = p.clone();
    let v = bad.masks[0].get(0, 0);
    bad.masks[0].set(0, 0, !v);
    assert!(bad.validate().is_err());
    assert!(PatternSpec::from_json("{}").is_err());
}

#[test]
fn supports_and_round_trip() {
    let p = patterns();
    for class in 0..8 {
        let (img, truth) = generate_flag(&mut split_rng(3, class as u64), class, &p).unwrap();
        assert_eq!(truth.roles, p.masks[class]);
        let mut fg_px = 0;
        for r in 0..256 {
            for c in 0..256 {
                let v = img.get(r, c);
                if truth.roles.get(r / 16, c / 16) {
                    fg_px += 1;
                    assert!((96..=248).contains(&v));
                } else {
                    assert!((8..=200).contains(&v));
                }
            }
        }
        assert_eq!(fg_px, 80 * 256);
        let map = infer_foreground(&img, FOREGROUND_BOUNDARY).unwrap();
        assert_eq!(map, truth.roles);
        let m = classify_pattern(&map, &p);
        assert_eq!((m.class, m.rmae), (class, 0.0));
        assert!(m.forbidden_violations.is_empty());
    }
}

#[test]
fn deterministic() {
    let p = patterns();
    let a = generate_flag(&mut split_rng(1, 2), 5, &p).unwrap();
    let b = generate_flag(&mut split_rng(1, 2), 5, &p).unwrap();
    assert_eq!(a, b);
    assert!(generate_flag(&mut split_rng(1, 2), 8, &p).is_err());
}

#[test]
fn foreground_mean() {
    let p = patterns();
    let mut sum = 0.0;
    let mut n = 0.0;
    for i in 0..100 {
        let (img, truth) = generate_flag(&mut split_rng(8, i), (i % 8) as usize, &p).unwrap();
        for r in 0..256 {
            for c in 0..256 {
                if truth.roles.get(r / 16, c / 16) {
                    sum += img.get(r, c) as f64;
                    n += 1.0;
                }
            }
        }
    }
    let oracle = 152.0 * 4.0 / 6.0 + 96.0;
    assert!((sum / n - oracle).abs() < 0.5, "{}", sum / n);
    assert!((FOREGROUND_LAW.mean() - oracle).abs() < 1e-12);
}

#[test]
fn boundary_rule() {
    assert_eq!(
        infer_foreground(&GrayImage::filled(256, 256, 60), 148.0)
            .unwrap()
            .count(),
        0
    );
    assert_eq!(
        infer_foreground(&GrayImage::filled(256, 256, 149), 148.0)
            .unwrap()
            .count(),
        256
    );
    assert_eq!(
        infer_foreground(&GrayImage::filled(256, 256, 148), 148.0)
            .unwrap()
            .count(),
        0
    );
}

#[test]
fn classify_cases() {
    let p = patterns();
    let mut map = p.masks[3];
    let from = map.foreground()[0];
    let to = (0..256)
        .find(|&i| !map.at(i) && !p.is_forbidden(i))
        .unwrap();
    map.set(from / 16, from % 16, false);
    map.set(to / 16, to % 16, true);
    let m = classify_pattern(&map, &p);
    assert_eq!(m.class, 3);
    assert_eq!(m.rmae, 2.0 / 256.0);

    let mut map = p.masks[3];
    let f = p.forbidden[5];
    map.set(f / 16, f % 16, true);
    let m = classify_pattern(&map, &p);
    assert_eq!(m.class, 3);
    assert_eq!(m.forbidden_violations, vec![f]);
}

/// Direct numerical integration of the Beta density, independent of the
/// incomplete-beta routine.
fn beta_mass_oracle(a: f64, b: f64, x0: f64, x1: f64) -> f64 {
    let ln_norm = statrs::function::gamma::ln_gamma(a + b)
        - statrs::function::gamma::ln_gamma(a)
        - statrs::function::gamma::ln_gamma(b);
    let pdf = |x: f64| (ln_norm + (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln()).exp();
    let x0 = x0.clamp(0.0, 1.0);
    let x1 = x1.clamp(0.0, 1.0);
    let n = 2000;
    let h = (x1 - x0) / n as f64;
    if h == 0.0 {
        return 0.0;
    }
    let f = |x: f64| if x <= 0.0 || x >= 1.0 { 0.0 } else { pdf(x) };
    let mut s = f(x0) + f(x1);
    for i in 1..n {
        s += f(x0 + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn lattice_probabilities_match_integration() {
    for law in [FOREGROUND_LAW, BACKGROUND_LAW] {
        let probs = law.lattice_probabilities();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (k, &p) in probs.iter().enumerate() {
            let v = law.lo as f64 + k as f64;
            let a = (v - 0.5 - law.offset) / law.scale;
            let b = (v + 0.5 - law.offset) / law.scale;
            let oracle = beta_mass_oracle(law.alpha, law.beta, a, b);
            assert!((p - oracle).abs() < 1e-9, "{v}: {p} vs {oracle}");
        }
        let (idx, mass) = law.equal_probability_bins(16);
        assert_eq!(idx.len(), probs.len());
        assert!(idx.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
        assert!(
            mass.iter().all(|&m| (m - 1.0 / 16.0).abs() < 0.02),
            "{mass:?}"
        );
    }
}

#[test]
fn expected_counts_sum_to_pixels() {
    let (_, mass) = FOREGROUND_LAW.equal_probability_bins(16);
    let total: f64 = mass.iter().map(|m| m * 20480.0).sum();
    assert!((total - 20480.0).abs() < 1e-6);
}

#[test]
fn texture_of_iid_and_blurred() {
    let p = patterns();
    let mut rejected = 0;
    let mut tiles = 0;
    for i in 0..20 {
        let (img, _) = generate_flag(&mut split_rng(12, i), 0, &p).unwrap();
        let t = check_tile_texture(&img, 0.05).unwrap();
        tiles += t.tiles.len();
        rejected += t.tiles.iter().filter(|m| !m.as_ref().unwrap().pass).count();
        if i < 3 {
            let blurred = box_blur_tiles(&img);
            assert!(check_tile_texture(&blurred, 0.05).unwrap().pass_fraction < 0.05);
        }
    }
    let rate = rejected as f64 / tiles as f64;
    assert!((rate - 0.05).abs() < 0.015, "{rate}");
    let flat = check_tile_texture(&GrayImage::filled(256, 256, 7), 0.05).unwrap();
    assert_eq!(flat.pass_fraction, 0.0);
    assert!(flat.tiles.iter().all(Option::is_none));
}

pub(crate) fn box_blur_tiles(img: &GrayImage) -> GrayImage {
    GrayImage::from_fn(256, 256, |r, c| {
        let (tr, tc) = (r / 16 * 16, c / 16 * 16);
        let mut s = 0u32;
        let mut n = 0u32;
        for rr in r.saturating_sub(1).max(tr)..=(r + 1).min(tr + 15) {
            for cc in c.saturating_sub(1).max(tc)..=(c + 1).min(tc + 15) {
                s += img.get(rr, cc) as u32;
                n += 1;
            }
        }
        ((s as f64 / n as f64).round()) as u8
    })
}

#[test]
fn gof_calibration_and_power() {
    let p = patterns();
    let n = 200;
    let mut fg_pass = 0;
    let mut bg_pass = 0;
    let mut uniform_fail = 0;
    for i in 0..n {
        let mut rng = split_rng(31, i);
        let (img, truth) = generate_flag(&mut rng, (i % 8) as usize, &p).unwrap();
        let (fg, bg) = check_intensity_gof(&img, &truth.roles, 16, 0.05).unwrap();
        fg_pass += fg.pass as usize;
        bg_pass += bg.pass as usize;
        if i < 50 {
            let uni = GrayImage::from_fn(256, 256, |r, c| {
                if truth.roles.get(r / 16, c / 16) {
                    96 + rng.below(153) as u8
                } else {
                    img.get(r, c)
                }
            });
            let (fg, _) = check_intensity_gof(&uni, &truth.roles, 16, 0.05).unwrap();
            uniform_fail += (!fg.pass) as usize;
        }
    }
    let (f, b) = (fg_pass as f64 / n as f64, bg_pass as f64 / n as f64);
    assert!(
        (f - 0.95).abs() < 0.05 && (b - 0.95).abs() < 0.05,
        "{f} {b}"
    );
    assert_eq!(uniform_fail, 50);
    assert!(check_intensity_gof(&GrayImage::new(256, 256), &TileMap::default(), 16, 0.05).is_err());
}

#[test]
fn analysis_of_generated_image_passes_shape_checks() {
    let p = patterns();
    let (img, _) = generate_flag(&mut split_rng(2, 2), 6, &p).unwrap();
    let a = analyze_flag(&img, &p, &FlagConfig::default()).unwrap();
    let r = a.to_result("x.png", &FlagConfig::default());
    assert_eq!(r.passed("pattern_match"), Some(true));
    assert_eq!(r.passed("forbidden"), Some(true));
    assert_eq!(r.statistic("pattern_exact"), Some(0.0));
}
