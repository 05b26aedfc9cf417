//! Statistical kernels shared by every analyzer.

mod beta;
mod gof;
mod ks;
mod moran;
mod pca;
mod rank;
mod similarity;

pub use beta::{beta_variate, gamma_variate};
pub use gof::{chi2_cdf, chi2_critical, chi2_gof, GofResult};
pub use ks::ks_two_sample;
pub use moran::{morans_i, normal_two_sided_bound, Adjacency, MoransResult};
pub use pca::{pca_fit, pca_project, PcaModel};
pub use rank::{average_ranks, spearman_rho};
pub use similarity::{cosine_similarity, coverage_density, CoverageDensity, DEFAULT_K_NEIGHBORS};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation; 0 for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}
