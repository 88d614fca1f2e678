//! The `verify` subcommand: drives the oracle against the closed forms and
//! prints one TSV line per check (suite, check, status, bracket columns).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wcrisk_core::oracle::{max_cvar_lp, random_search_lower_bound, SupportGrid};
use wcrisk_core::portfolio::{schur_certificate, MomentMatrixPair};
use wcrisk_core::worstcase::{
    dual_certificate, extremal_distribution, wc_var_cvar, wcsrm, MomentPair,
};
use wcrisk_core::Spectrum;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    All,
    Sandwich,
    Lp,
    Schur,
}

pub fn run(suite: Suite) -> Result<(), CliError> {
    let mut failures = 0usize;
    if matches!(suite, Suite::All | Suite::Sandwich) {
        failures += sandwich()?;
    }
    if matches!(suite, Suite::All | Suite::Lp) {
        failures += lp()?;
    }
    if matches!(suite, Suite::All | Suite::Schur) {
        failures += schur()?;
    }
    if failures > 0 {
        return Err(CliError::certificate(format!("{failures} check(s) failed")));
    }
    Ok(())
}

fn line(suite: &str, check: &str, ok: bool, detail: &str) -> usize {
    println!(
        "{suite}\t{check}\t{}\t{detail}",
        if ok { "pass" } else { "FAIL" }
    );
    usize::from(!ok)
}

/// Closed form against its own two certificates on fixed fixtures.
fn sandwich() -> Result<usize, CliError> {
    let spectra = vec![
        ("cvar_0.05", Spectrum::cvar(0.05).unwrap()),
        ("cvar_0.25", Spectrum::cvar(0.25).unwrap()),
        ("cvar_0.5", Spectrum::cvar(0.5).unwrap()),
        (
            "step_3",
            Spectrum::piecewise(vec![0.0, 0.3, 0.8, 1.0], vec![0.2, 0.9, 2.45]).unwrap(),
        ),
    ];
    let moments = [(0.0, 1.0), (1.0, 2.0), (-0.5, 0.3)];
    let mut failures = 0;
    for (name, spec) in &spectra {
        for &(mu, sigma) in &moments {
            let m = MomentPair::new(mu, sigma).unwrap();
            let closed = wcsrm(&m, spec).map_err(CliError::internal)?.value;
            let lower = extremal_distribution(&m, spec, 1)
                .and_then(|d| d.spectral_risk(spec).map_err(Into::into))
                .map_err(CliError::internal)?;
            let upper = dual_certificate(&m, spec)
                .map_err(CliError::internal)?
                .bound(&m);
            let ok = (closed - lower).abs() <= 1e-6 && (upper - closed).abs() <= 1e-6;
            failures += line(
                "sandwich",
                &format!("{name}@({mu},{sigma})"),
                ok,
                &format!(
                    "lower={lower:.12}\tclosed={closed:.12}\tupper={upper:.12}\twidth={:.3e}",
                    upper - lower
                ),
            );
        }
    }
    Ok(failures)
}

/// Brute-force moment LP brackets the closed form and tightens under grid
/// refinement.
fn lp() -> Result<usize, CliError> {
    let m = MomentPair::new(0.0, 1.0).unwrap();
    let mut failures = 0;
    for eps in [0.1, 0.5] {
        let exact = wc_var_cvar(&m, eps).unwrap();
        let spec = Spectrum::cvar(eps).unwrap();
        let mut widths = Vec::new();
        for n in [400usize, 1600] {
            let grid = SupportGrid::uniform(-8.0, 8.0, n).map_err(CliError::internal)?;
            let lower =
                random_search_lower_bound(&m, &spec, 100, &grid).map_err(CliError::internal)?;
            let upper = max_cvar_lp(&m, eps, &grid).map_err(CliError::internal)?;
            let ok = lower <= exact + 1e-9 && exact <= upper + 1e-9;
            widths.push(upper - lower);
            failures += line(
                "lp",
                &format!("cvar_{eps}@{n}pts"),
                ok,
                &format!(
                    "lower={lower:.12}\texact={exact:.12}\tupper={upper:.12}\twidth={:.3e}",
                    upper - lower
                ),
            );
        }
        failures += line(
            "lp",
            &format!("cvar_{eps}_refinement"),
            widths[1] <= widths[0] + 1e-12,
            &format!("width400={:.3e}\twidth1600={:.3e}", widths[0], widths[1]),
        );
    }
    Ok(failures)
}

/// Bordered-matrix certificates on seeded random instances.
fn schur() -> Result<usize, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c40_12);
    let mut failures = 0;
    let mut worst_eig: f64 = 0.0;
    let mut worst_match: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let mut a = vec![vec![0.0; n]; n];
        for row in a.iter_mut() {
            for v in row.iter_mut() {
                *v = rng.gen_range(-0.3..0.3);
            }
        }
        let mut cov = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                cov[i][j] = (0..n).map(|k| a[k][i] * a[k][j]).sum();
            }
            cov[i][i] += 0.01;
        }
        let mean: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.1..0.2)).collect();
        let mm = MomentMatrixPair::new(mean, cov).map_err(CliError::internal)?;
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = x.iter().sum();
        for v in x.iter_mut() {
            *v /= total;
        }
        let kappa = rng.gen_range(0.5..5.0);
        let cert = schur_certificate(&x, &mm, kappa).map_err(CliError::internal)?;
        worst_eig = worst_eig.max(cert.matrix_min_eig.abs());
        worst_match = worst_match.max(cert.objective_match);
    }
    failures += line(
        "schur",
        "100_random_instances",
        worst_eig <= 1e-8 && worst_match <= 1e-9,
        &format!("max_abs_min_eig={worst_eig:.3e}\tmax_objective_mismatch={worst_match:.3e}"),
    );
    Ok(failures)
}
