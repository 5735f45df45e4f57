//! Gamma sampling by the Marsaglia–Tsang squeeze method.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::NoiseError;

/// One draw from `Gamma(shape, scale)`; `shape > 0`, `scale > 0`.
///
/// Shapes below one use the boost `G(a) = G(a + 1)·U^{1/a}`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> f64 {
    debug_assert!(shape > 0.0 && scale > 0.0);
    if shape < 1.0 {
        let u: f64 = rng.random();
        return sample_gamma(shape + 1.0, scale, rng) * u.powf(shape.recip());
    }
    let d = shape - 1.0 / 3.0;
    let c = (9.0 * d).sqrt().recip();
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v * scale;
        }
    }
}

/// `(shape, scale)` of the ranging model: mean `d`, standard deviation `sigma_d`.
pub fn distance_gamma_params(d: f64, sigma_d: f64) -> (f64, f64) {
    (d * d / (sigma_d * sigma_d), sigma_d * sigma_d / d)
}

/// Measured distance for true distance `d`: Gamma distributed with mean `d` and
/// standard deviation `sigma_d`. `sigma_d = 0` returns `d` exactly.
pub fn sample_gamma_distance<R: Rng + ?Sized>(
    d: f64,
    sigma_d: f64,
    rng: &mut R,
) -> Result<f64, NoiseError> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(NoiseError::ZeroDistance(d));
    }
    if !(sigma_d >= 0.0) || !sigma_d.is_finite() {
        return Err(NoiseError::InvalidSigma(sigma_d));
    }
    if sigma_d == 0.0 {
        return Ok(d);
    }
    let (shape, scale) = distance_gamma_params(d, sigma_d);
    Ok(sample_gamma(shape, scale, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{Purpose, RngStream};

    #[test]
    fn degenerate_and_invalid() {
        let mut rng = RngStream::new(1, 0, 0, Purpose::Test).rng();
        assert_eq!(sample_gamma_distance(10.0, 0.0, &mut rng).unwrap(), 10.0);
        assert!(matches!(
            sample_gamma_distance(0.0, 1.0, &mut rng),
            Err(NoiseError::ZeroDistance(_))
        ));
        assert!(sample_gamma_distance(1.0, -1.0, &mut rng).is_err());
    }

    #[test]
    fn parameter_identities() {
        for &(d, s) in &[(10.0, 1.0), (0.3, 2.5), (42.0, 0.01)] {
            let (a, b) = distance_gamma_params(d, s);
            assert!((a * b - d).abs() < 1e-12 * d);
            assert!((a * b * b - s * s).abs() < 1e-12 * s * s);
        }
    }

    fn moments(d: f64, s: f64, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = RngStream::new(seed, 0, 0, Purpose::Test).rng();
        let xs: Vec<f64> = (0..n)
            .map(|_| sample_gamma_distance(d, s, &mut rng).unwrap())
            .collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (mean, var.sqrt())
    }

    #[test]
    fn moments_at_ten_meters() {
        let (mean, std) = moments(10.0, 1.0, 1_000_000, 5);
        assert!((mean - 10.0).abs() < 0.01, "{mean}");
        assert!((std - 1.0).abs() < 0.01, "{std}");
    }

    #[test]
    fn moments_with_small_shape() {
        // shape = 0.25 exercises the boost branch
        let (mean, std) = moments(1.0, 2.0, 400_000, 9);
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
        assert!((std - 2.0).abs() < 0.04, "{std}");
    }
}
