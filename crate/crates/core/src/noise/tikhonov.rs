//! Tikhonov (von Mises) angle errors and calibration of the concentration from a
//! central 90% bounding angle.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::NoiseError;

/// Central probability mass the bounding angle encloses.
pub const CENTRAL_MASS: f64 = 0.9;

/// Largest reachable bounding angle in degrees: the uniform law puts 90% of its
/// mass within ±162°.
pub const MAX_EPSILON_DEG: f64 = CENTRAL_MASS * 180.0;

const RHO_LO: f64 = 1e-9;
const RHO_HI: f64 = 1e9;
const SIMPSON_TOL: f64 = 1e-9;

/// Draws `θ + δ` with `δ ~ Tikhonov(ρ)`, `δ ∈ (−π, π]`.
///
/// An infinite `rho` returns `theta` unchanged.
pub fn sample_tikhonov_angle<R: Rng + ?Sized>(theta: f64, rho: f64, rng: &mut R) -> f64 {
    theta + sample_offset(rho, rng)
}

/// Zero-mean von Mises draw by the Best–Fisher wrapped-Cauchy envelope.
pub fn sample_offset<R: Rng + ?Sized>(rho: f64, rng: &mut R) -> f64 {
    debug_assert!(rho >= 0.0);
    if rho.is_infinite() {
        return 0.0;
    }
    if rho < 1e-9 {
        let u: f64 = rng.random();
        return wrap_pi(PI - 2.0 * PI * u);
    }
    if rho > 1e6 {
        // The envelope constants cancel catastrophically here; the law is normal
        // with variance 1/ρ to well below sampling resolution.
        let z: f64 = StandardNormal.sample(rng);
        return wrap_pi(z / rho.sqrt());
    }
    let tau = 1.0 + (1.0 + 4.0 * rho * rho).sqrt();
    let r0 = (tau - (2.0 * tau).sqrt()) / (2.0 * rho);
    let r = (1.0 + r0 * r0) / (2.0 * r0);
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let u3: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = rho * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let delta = f.clamp(-1.0, 1.0).acos();
            return wrap_pi(if u3 < 0.5 { -delta } else { delta });
        }
    }
}

/// Maps an angle into `(−π, π]`.
pub fn wrap_pi(a: f64) -> f64 {
    let w = a - 2.0 * PI * ((a + PI) / (2.0 * PI)).floor();
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Exponentially scaled modified Bessel function `e^{−x}·I₀(x)` for `x ≥ 0`.
pub fn bessel_i0e(x: f64) -> f64 {
    let x = x.abs();
    if x <= 15.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= q / (k * k);
            sum += term;
            k += 1.0;
        }
        sum * (-x).exp()
    } else {
        let mut c = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            let kf = k as f64;
            let next = c * (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
            if next.abs() >= c.abs() || next.abs() < 1e-17 {
                break;
            }
            c = next;
            sum += c;
        }
        sum / (2.0 * PI * x).sqrt()
    }
}

/// Tikhonov density of the offset, `exp(ρ cos φ) / (2π I₀(ρ))`.
pub fn tikhonov_pdf(phi: f64, rho: f64) -> f64 {
    (rho * (phi.cos() - 1.0)).exp() / (2.0 * PI * bessel_i0e(rho))
}

/// Probability that `|δ| ≤ eps` (radians) for concentration `rho`.
pub fn central_mass(eps: f64, rho: f64) -> f64 {
    let f = |phi: f64| (rho * (phi.cos() - 1.0)).exp();
    let integral = adaptive_simpson(&f, 0.0, eps, SIMPSON_TOL);
    2.0 * integral / (2.0 * PI * bessel_i0e(rho))
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Concentration whose central ±`epsilon_deg` interval holds 90% of the mass.
pub fn calibrate_rho(epsilon_deg: f64) -> Result<f64, NoiseError> {
    if !(epsilon_deg > 0.0 && epsilon_deg < MAX_EPSILON_DEG) {
        return Err(NoiseError::OutOfRange(epsilon_deg));
    }
    let eps = epsilon_deg.to_radians();
    let g = |rho: f64| central_mass(eps, rho) - CENTRAL_MASS;
    if g(RHO_LO) >= 0.0 {
        return Ok(RHO_LO);
    }
    if g(RHO_HI) < 0.0 {
        return Err(NoiseError::OutOfRange(epsilon_deg));
    }
    let (mut lo, mut hi) = (RHO_LO.ln(), RHO_HI.ln());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid.exp()) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{Purpose, RngStream};

    #[test]
    fn i0e_against_reference_values() {
        // e^{-x} I0(x) reference values
        let cases = [
            (0.0, 1.0),
            (1.0, 0.465_759_607_593_640_4),
            (10.0, 0.127_833_337_163_428_6),
            (15.0, 0.103_899_531_448_822_7),
            (20.0, 0.089_780_311_884_826),
            (100.0, 0.039_944_379_299_096_68),
        ];
        for (x, want) in cases {
            let got = bessel_i0e(x);
            assert!((got - want).abs() < 1e-12 * want.max(1e-3), "x={x}: {got} vs {want}");
        }
        // the two branches meet at 15
        let a = bessel_i0e(15.0 - 1e-9);
        let b = bessel_i0e(15.0 + 1e-9);
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn pdf_integrates_to_one() {
        for rho in [0.0, 0.5, 3.0, 27.0, 400.0] {
            let total = adaptive_simpson(&|p| tikhonov_pdf(p, rho), -PI, PI, 1e-12);
            assert!((total - 1.0).abs() < 1e-8, "rho={rho}: {total}");
        }
    }

    #[test]
    fn wrap() {
        assert_eq!(wrap_pi(0.3), 0.3);
        assert!((wrap_pi(PI) - PI).abs() < 1e-15);
        assert!((wrap_pi(-PI) - PI).abs() < 1e-15);
        assert!((wrap_pi(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn out_of_range() {
        for e in [0.0, -1.0, 162.0, 170.0, f64::NAN] {
            assert!(calibrate_rho(e).is_err(), "{e}");
        }
        assert!(calibrate_rho(161.999).unwrap() < 1e-3);
    }

    #[test]
    fn concentration_limit() {
        let mut rng = RngStream::new(3, 0, 0, Purpose::Test).rng();
        for _ in 0..10_000 {
            assert!((sample_tikhonov_angle(1.0, 1e8, &mut rng) - 1.0).abs() < 1e-3);
        }
        assert_eq!(sample_tikhonov_angle(1.0, f64::INFINITY, &mut rng), 1.0);
    }
}
