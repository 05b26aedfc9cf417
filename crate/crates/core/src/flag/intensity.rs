use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::{beta_variate, chi2_gof, GofResult};

/// `round(scale·X + offset)` clamped to `[lo, hi]` with `X ~ Beta(alpha, beta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntensityLaw {
    pub alpha: f64,
    pub beta: f64,
    pub scale: f64,
    pub offset: f64,
    pub lo: u8,
    pub hi: u8,
}

pub const FOREGROUND_LAW: IntensityLaw = IntensityLaw {
    alpha: 4.0,
    beta: 2.0,
    scale: 152.0,
    offset: 96.0,
    lo: 96,
    hi: 248,
};

pub const BACKGROUND_LAW: IntensityLaw = IntensityLaw {
    alpha: 2.0,
    beta: 4.0,
    scale: 192.0,
    offset: 8.0,
    lo: 8,
    hi: 200,
};

impl IntensityLaw {
    pub fn sample(&self, rng: &mut RngStream) -> u8 {
        let x = beta_variate(rng, self.alpha, self.beta).expect("law parameters are positive");
        (self.scale * x + self.offset)
            .round()
            .clamp(self.lo as f64, self.hi as f64) as u8
    }

    /// Mean before rounding.
    pub fn mean(&self) -> f64 {
        self.scale * self.alpha / (self.alpha + self.beta) + self.offset
    }

    fn cdf(&self, v: f64) -> f64 {
        let x = (v - self.offset) / self.scale;
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            beta_reg(self.alpha, self.beta, x)
        }
    }

    /// Probability of each integer in `lo..=hi`; the clamp folds all tail
    /// mass into the two end values.
    pub fn lattice_probabilities(&self) -> Vec<f64> {
        let (lo, hi) = (self.lo as usize, self.hi as usize);
        (lo..=hi)
            .map(|v| {
                let upper = if v == hi {
                    1.0
                } else {
                    self.cdf(v as f64 + 0.5)
                };
                let lower = if v == lo {
                    0.0
                } else {
                    self.cdf(v as f64 - 0.5)
                };
                upper - lower
            })
            .collect()
    }

    /// Contiguous groups of lattice values of roughly equal probability: a
    /// value joins bin `⌊bins·(mass below + half its own mass)⌋`. Returns the
    /// bin index of every lattice value and the probability of each bin
    /// (bins that received no value are dropped).
    pub fn equal_probability_bins(&self, bins: usize) -> (Vec<usize>, Vec<f64>) {
        let probs = self.lattice_probabilities();
        let mut below = 0.0;
        let raw: Vec<usize> = probs
            .iter()
            .map(|&p| {
                let b = ((bins as f64) * (below + p / 2.0)).floor() as usize;
                below += p;
                b.min(bins - 1)
            })
            .collect();
        let mut dense = Vec::with_capacity(raw.len());
        let mut mass: Vec<f64> = Vec::new();
        let mut last = None;
        for (&b, &p) in raw.iter().zip(&probs) {
            if last != Some(b) {
                mass.push(0.0);
                last = Some(b);
            }
            *mass.last_mut().unwrap() += p;
            dense.push(mass.len() - 1);
        }
        (dense, mass)
    }

    /// Pearson test of `values` against the law on `bins` equal-probability
    /// bins; values outside `[lo, hi]` count toward the nearest end bin.
    pub fn goodness_of_fit(&self, values: &[u8], bins: usize, alpha: f64) -> Result<GofResult> {
        if bins < 2 {
            return Err(Error::invalid(format!("need at least 2 bins, got {bins}")));
        }
        if values.is_empty() {
            return Err(Error::Insufficient("no pixels to test".into()));
        }
        let (index, mass) = self.equal_probability_bins(bins);
        let mut observed = vec![0.0; mass.len()];
        for &v in values {
            let k = v.clamp(self.lo, self.hi) - self.lo;
            observed[index[k as usize]] += 1.0;
        }
        let n = values.len() as f64;
        let expected: Vec<f64> = mass.iter().map(|m| m * n).collect();
        chi2_gof(&observed, &expected, alpha)
    }
}
