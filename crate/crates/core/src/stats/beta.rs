use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Gamma(shape, 1) variate by Marsaglia and Tsang's squeeze method.
pub fn gamma_variate(rng: &mut RngStream, shape: f64) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::invalid(format!(
            "gamma shape {shape} must be positive"
        )));
    }
    if shape < 1.0 {
        // Boost: G(a) = G(a+1) · U^(1/a).
        let g = gamma_variate(rng, shape + 1.0)?;
        let u = 1.0 - rng.uniform();
        return Ok(g * u.powf(1.0 / shape));
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = rng.standard_normal();
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = rng.uniform();
        if u < 1.0 - 0.0331 * x * x * x * x {
            return Ok(d * v);
        }
        if u > 0.0 && u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
            return Ok(d * v);
        }
    }
}

/// Beta(alpha, beta) variate as X/(X+Y) with X ~ Gamma(alpha), Y ~ Gamma(beta).
pub fn beta_variate(rng: &mut RngStream, alpha: f64, beta: f64) -> Result<f64> {
    let x = gamma_variate(rng, alpha)?;
    let y = gamma_variate(rng, beta)?;
    Ok(x / (x + y))
}
