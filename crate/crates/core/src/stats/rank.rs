use crate::error::{Error, Result};

/// 1-based ranks with ties receiving the average of the ranks they span.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // positions i..j share rank (i+1 + j)/2
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Spearman rank correlation with average-rank tie handling.
///
/// Returns `Ok(None)` when either input is constant: the coefficient is
/// undefined and callers must flag rather than pass such cases.
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Insufficient(
            "spearman_rho needs at least two pairs".into(),
        ));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_and_reversed() {
        let x = [10.0, 20.0, 35.0, 50.0];
        let y = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman_rho(&x, &y).unwrap(), Some(1.0));
        let yr: Vec<f64> = y.iter().rev().copied().collect();
        assert_eq!(spearman_rho(&x, &yr).unwrap(), Some(-1.0));
    }

    #[test]
    fn one_adjacent_swap() {
        let r = spearman_rho(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 3.0, 4.0])
            .unwrap()
            .unwrap();
        assert!((r - 0.8).abs() < 1e-12);
    }

    #[test]
    fn ties_average() {
        assert_eq!(
            average_ranks(&[3.0, 1.0, 3.0, 2.0]),
            vec![3.5, 1.0, 3.5, 2.0]
        );
    }

    #[test]
    fn undefined_and_errors() {
        assert_eq!(
            spearman_rho(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(),
            None
        );
        assert!(spearman_rho(&[1.0], &[1.0]).is_err());
        assert!(spearman_rho(&[1.0, 2.0], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn monotone_invariance(pairs in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..30)) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let base = spearman_rho(&x, &y).unwrap();
            let tx: Vec<f64> = x.iter().map(|v| (v / 50.0).exp() * 3.0 - 7.0).collect();
            let ty: Vec<f64> = y.iter().map(|v| v * v * v).collect();
            let moved = spearman_rho(&tx, &ty).unwrap();
            match (base, moved) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-12),
                (None, None) => {}
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }
}
