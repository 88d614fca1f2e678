//! Shared fixture generators for the integration suites.

#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wcrisk_core::portfolio::MomentMatrixPair;
use wcrisk_core::spectra::Spectrum;
use wcrisk_core::worstcase::MomentPair;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random admissible step spectrum with at least one strict increase, so the
/// worst-case multiplier is positive.
pub fn random_step_spectrum(rng: &mut ChaCha8Rng) -> Spectrum {
    let pieces = rng.gen_range(2..=6);
    let mut interior: Vec<f64> = (0..pieces - 1)
        .map(|_| rng.gen_range(0.05..0.95))
        .collect();
    interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
    interior.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    let mut breakpoints = vec![0.0];
    breakpoints.extend(interior);
    breakpoints.push(1.0);

    let mut values = Vec::with_capacity(breakpoints.len() - 1);
    let mut level: f64 = rng.gen_range(0.0..0.5);
    for _ in 0..breakpoints.len() - 1 {
        values.push(level);
        level += rng.gen_range(0.3..1.5);
    }
    let integral: f64 = values
        .iter()
        .enumerate()
        .map(|(i, v)| v * (breakpoints[i + 1] - breakpoints[i]))
        .sum();
    for v in values.iter_mut() {
        *v /= integral;
    }
    Spectrum::piecewise(breakpoints, values).expect("generated spectrum is admissible")
}

/// Random spectrum of any supported kind.
pub fn random_spectrum(rng: &mut ChaCha8Rng) -> Spectrum {
    match rng.gen_range(0..4) {
        0 => Spectrum::cvar(rng.gen_range(0.02..1.0)).unwrap(),
        1 => Spectrum::exponential(rng.gen_range(0.2..4.0)).unwrap(),
        2 => Spectrum::power(rng.gen_range(0.3..4.0)).unwrap(),
        _ => random_step_spectrum(rng),
    }
}

pub fn random_moment_pair(rng: &mut ChaCha8Rng, sigma_min: f64) -> MomentPair {
    MomentPair::new(
        rng.gen_range(-2.0..3.0),
        rng.gen_range(sigma_min..2.5),
    )
    .unwrap()
}

/// Random well-conditioned moment data for `n` assets: means in a plausible
/// return range and a positive definite covariance built from a random
/// factor.
pub fn random_moment_matrix(rng: &mut ChaCha8Rng, n: usize) -> MomentMatrixPair {
    let mean: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.15)).collect();
    let mut a = vec![vec![0.0; n]; n];
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            *v = rng.gen_range(-0.2..0.2);
        }
    }
    let mut cov = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            cov[i][j] = (0..n).map(|k| a[k][i] * a[k][j]).sum();
        }
    }
    for (i, row) in cov.iter_mut().enumerate() {
        row[i] += rng.gen_range(0.005..0.02);
    }
    MomentMatrixPair::new(mean, cov).expect("factor covariance is PSD")
}

/// Brute-force minimum of `objective` over the 2- or 3-asset simplex at the
/// given mesh.
pub fn grid_min_simplex(n: usize, mesh: f64, objective: impl Fn(&[f64]) -> f64) -> f64 {
    let steps = (1.0 / mesh).round() as usize;
    let mut best = f64::INFINITY;
    match n {
        2 => {
            for i in 0..=steps {
                let x1 = i as f64 * mesh;
                let v = objective(&[x1, 1.0 - x1]);
                if v < best {
                    best = v;
                }
            }
        }
        3 => {
            for i in 0..=steps {
                let x1 = i as f64 * mesh;
                for j in 0..=(steps - i) {
                    let x2 = j as f64 * mesh;
                    let v = objective(&[x1, x2, 1.0 - x1 - x2]);
                    if v < best {
                        best = v;
                    }
                }
            }
        }
        _ => panic!("grid oracle supports 2 or 3 assets"),
    }
    best
}
