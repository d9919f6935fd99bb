use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Distribution of exogenous noise terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseSpec {
    Beta { a: f64, b: f64 },
    Gaussian { sigma: f64 },
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::Beta { a: 2.0, b: 5.0 }
    }
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::Beta { a, b } if a > 0.0 && b > 0.0 => Ok(()),
            NoiseSpec::Gaussian { sigma } if sigma > 0.0 => Ok(()),
            other => Err(Error::InvalidShape(format!("{other:?}"))),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseSpec::Beta { a, b } => sample_beta(a, b, rng).expect("validated shape"),
            NoiseSpec::Gaussian { sigma } => sigma * rng.sample::<f64, _>(StandardNormal),
        }
    }
}

/// Gamma(shape, 1) by Marsaglia and Tsang's squeeze/accept-reject method.
/// Shapes below one are boosted: `G(a) = G(a + 1) * U^(1/a)`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(Error::InvalidShape(format!("gamma shape {shape}")));
    }
    if shape < 1.0 {
        let u: f64 = rng.random();
        return Ok(sample_gamma(shape + 1.0, rng)? * u.powf(1.0 / shape));
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return Ok(d * v);
        }
    }
}

/// Beta(a, b) as `G_a / (G_a + G_b)`.
pub fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidShape(format!("Beta({a}, {b})")));
    }
    loop {
        let ga = sample_gamma(a, rng)?;
        let gb = sample_gamma(b, rng)?;
        let x = ga / (ga + gb);
        // both gammas can underflow for tiny shapes; redraw rather than return 0 or 1
        if x > 0.0 && x < 1.0 {
            return Ok(x);
        }
    }
}
