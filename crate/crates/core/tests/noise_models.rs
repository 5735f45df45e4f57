use std::f64::consts::PI;

use qdsmds::noise::{
    calibrate_rho, sample_gamma_distance, sample_offset, sample_tikhonov_angle, NoiseParams,
    Purpose, RngStream,
};

fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    RngStream::new(seed, 0, 0, Purpose::Test).rng()
}

/// Composite Simpson on an unnormalized density, normalized by its own integral
/// over the circle. Shares no code with the library quadrature or Bessel function.
fn oracle_mass(eps: f64, rho: f64) -> f64 {
    let f = |x: f64| (rho * (x.cos() - 1.0)).exp();
    let simpson = |a: f64, b: f64, n: usize| {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    simpson(-eps, eps, 20_000) / simpson(-PI, PI, 200_000)
}

#[test]
fn calibrated_mass_matches_oracle() {
    for eps in [10.0, 20.0, 30.0, 40.0, 50.0, 120.0] {
        let rho = calibrate_rho(eps).unwrap();
        let mass = oracle_mass(f64::to_radians(eps), rho);
        assert!((mass - 0.9).abs() < 1e-5, "eps={eps} rho={rho} mass={mass}");
    }
}

#[test]
fn calibration_is_monotone() {
    let rhos: Vec<f64> = [10.0, 20.0, 30.0, 40.0, 50.0]
        .iter()
        .map(|&e| calibrate_rho(e).unwrap())
        .collect();
    assert!(rhos.windows(2).all(|w| w[0] > w[1]), "{rhos:?}");
}

#[test]
fn calibration_boundary() {
    assert!(calibrate_rho(161.9).unwrap() < calibrate_rho(150.0).unwrap());
    assert!(calibrate_rho(161.99).unwrap() < 1e-2);
}

#[test]
fn uniform_passes_ks() {
    let mut r = rng(11);
    let n = 100_000;
    let mut xs: Vec<f64> = (0..n).map(|_| sample_offset(0.0, &mut r)).collect();
    assert!(xs.iter().all(|&x| x > -PI && x <= PI));
    xs.sort_by(f64::total_cmp);
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = (x + PI) / (2.0 * PI);
            (cdf - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - cdf).abs())
        })
        .fold(0.0, f64::max);
    // 1% critical value of the one-sample KS statistic
    let crit = 1.628 / (n as f64).sqrt();
    assert!(d < crit, "D={d} crit={crit}");
}

#[test]
fn circular_mean() {
    let mut r = rng(12);
    let rho = calibrate_rho(30.0).unwrap();
    let (mut s, mut c) = (0.0, 0.0);
    for _ in 0..1_000_000 {
        let a = sample_tikhonov_angle(0.5, rho, &mut r);
        s += a.sin();
        c += a.cos();
    }
    let mean = s.atan2(c);
    assert!((mean - 0.5).abs() < 0.005, "{mean}");
}

fn empirical_bound(eps: f64, seed: u64) -> f64 {
    let rho = calibrate_rho(eps).unwrap();
    let mut r = rng(seed);
    let mut a: Vec<f64> = (0..1_000_000)
        .map(|_| sample_offset(rho, &mut r).abs())
        .collect();
    let k = (0.9 * a.len() as f64) as usize;
    let (_, q, _) = a.select_nth_unstable_by(k, f64::total_cmp);
    q.to_degrees()
}

#[test]
fn empirical_bounding_angle() {
    for (i, eps) in [10.0, 30.0, 50.0].into_iter().enumerate() {
        let got = empirical_bound(eps, 20 + i as u64);
        assert!((got - eps).abs() < 0.5, "eps={eps}: {got}");
    }
}

#[test]
fn gamma_grid_moments() {
    let ds = [0.5, 2.0, 10.0, 25.0, 40.0];
    let sigmas = [0.1, 0.5, 1.0, 3.0];
    for (g, (&d, &s)) in ds
        .iter()
        .flat_map(|d| sigmas.iter().map(move |s| (d, s)))
        .enumerate()
    {
        let mut r = rng(100 + g as u64);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let x = sample_gamma_distance(d, s, &mut r).unwrap();
            sum += x;
            sq += x * x;
        }
        let mean = sum / n as f64;
        let std = ((sq - n as f64 * mean * mean) / (n - 1) as f64).sqrt();
        assert!((mean - d).abs() < 0.01 * d, "d={d} s={s}: mean {mean}");
        assert!((std - s).abs() < 0.01 * s, "d={d} s={s}: std {std}");
    }
}

#[test]
fn noise_params() {
    let p = NoiseParams::new(1.0, 10.0).unwrap();
    assert!((p.rho - calibrate_rho(10.0).unwrap()).abs() <= 1e-6 * p.rho);
    assert!(NoiseParams::new(-1.0, 10.0).is_err());
    assert!(NoiseParams::new(1.0, 170.0).is_err());
    assert!(NoiseParams::new(0.0, 0.0).unwrap().rho.is_infinite());
}
