//! Independent numerical attack on the closed forms: direct maximization of
//! tail risk over discretized moment-feasible distributions, feasible-point
//! lower-bound search, and adaptive quadrature. Nothing here reuses the
//! closed-form path it is checking.

use crate::lp::{LpError, Problem};
use crate::measures::{EmpiricalDistribution, MeasuresError};
use crate::quad;
use crate::spectra::{SpectraError, Spectrum};
use crate::worstcase::{self, MomentPair, WorstCaseError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use crate::quad::QuadError;

/// Fixed seed so the random search is reproducible run to run.
const SEARCH_SEED: u64 = 0x5eed_cafe_f00d_0001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("support grid needs at least 3 strictly increasing finite points")]
    MalformedGrid,
    #[error(
        "support grid [{lo}, {hi}] does not span [mu - 6 sigma, mu + 6 sigma] = [{need_lo}, {need_hi}]"
    )]
    GridTooNarrow {
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },
    #[error("moment constraints are unsatisfiable on the support grid")]
    InfeasibleGrid,
    #[error("tail probability {epsilon} outside (0, 1]")]
    EpsilonOutOfDomain { epsilon: f64 },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Measures(#[from] MeasuresError),
    #[error(transparent)]
    WorstCase(#[from] WorstCaseError),
}

/// Candidate atom locations for the discretized moment problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportGrid {
    points: Vec<f64>,
}

impl SupportGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, OracleError> {
        if points.len() < 3
            || points.iter().any(|p| !p.is_finite())
            || points.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(OracleError::MalformedGrid);
        }
        Ok(SupportGrid { points })
    }

    /// Uniform grid of `n` points on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self, OracleError> {
        if n < 3 || !(hi > lo) {
            return Err(OracleError::MalformedGrid);
        }
        let step = (hi - lo) / (n - 1) as f64;
        SupportGrid::new((0..n).map(|i| lo + step * i as f64).collect())
    }

    /// Uniform grid spanning `mu +- 8 sigma` (extremal two-point atoms stay
    /// inside `+-7 sigma` for tail probabilities down to 0.02).
    pub fn spanning(m: &MomentPair, n: usize) -> Result<Self, OracleError> {
        let half = if m.std > 0.0 { 8.0 * m.std } else { 1.0 };
        SupportGrid::uniform(m.mean - half, m.mean + half, n)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn min(&self) -> f64 {
        self.points[0]
    }

    pub fn max(&self) -> f64 {
        *self.points.last().unwrap()
    }

    fn check_span(&self, m: &MomentPair) -> Result<(), OracleError> {
        let need_lo = m.mean - 6.0 * m.std;
        let need_hi = m.mean + 6.0 * m.std;
        if self.min() > need_lo || self.max() < need_hi {
            return Err(OracleError::GridTooNarrow {
                lo: self.min(),
                hi: self.max(),
                need_lo,
                need_hi,
            });
        }
        Ok(())
    }
}

/// Largest `E[(Z - q)^+]` over probability vectors on the grid whose first
/// two moments match `m` — a dense LP with three equality rows — lifted to a
/// certified upper bound over ALL moment-feasible distributions.
///
/// The lift recovers the LP's dual quadratic `y0 + y1 z + y2 z^2` from the
/// optimal support (reduced costs vanish there, a small Vandermonde solve),
/// then raises `y0` by the exact worst violation of the majorization
/// `quadratic >= (z - q)^+` off the grid; the two linear pieces make that
/// violation a pair of vertex evaluations. Without the lift, restricting
/// support to the grid can undershoot the true supremum; with it the result
/// dominates every feasible distribution, on or off the grid. If no
/// certifiable dual exists (degenerate support, `y2 <= 0`) the raw LP value
/// is returned.
fn max_excess_lp(m: &MomentPair, q: f64, grid: &SupportGrid) -> Result<f64, OracleError> {
    let n = grid.points.len();
    let cost: Vec<f64> = grid.points.iter().map(|&z| (z - q).max(0.0)).collect();
    let mut p = Problem::with_nonneg(cost.iter().map(|c| -c).collect());
    p.push_eq(vec![1.0; n], 1.0);
    p.push_eq(grid.points.clone(), m.mean);
    let m2 = m.mean * m.mean + m.std * m.std;
    p.push_eq(grid.points.iter().map(|z| z * z).collect(), m2);
    let sol = match p.solve() {
        Ok(s) => s,
        Err(LpError::Infeasible { .. }) => return Err(OracleError::InfeasibleGrid),
        Err(e) => return Err(OracleError::Lp(e)),
    };
    let raw = -sol.objective;

    let mut support: Vec<(f64, f64, f64)> = sol
        .x
        .iter()
        .zip(&grid.points)
        .zip(&cost)
        .filter(|((p, _), _)| **p > 1e-9)
        .map(|((p, z), c)| (*p, *z, *c))
        .collect();
    support.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    support.truncate(3);
    support.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());

    let dual = recover_dual_quadratic(&support, q);
    match dual {
        Some([y0, y1, y2]) if y2 > 1e-12 => {
            let deficit = majorization_deficit([y0, y1, y2], q);
            Ok((y0 + deficit) + m.mean * y1 + m2 * y2)
        }
        _ => Ok(raw),
    }
}

/// Dual quadratic through the support's tangency conditions.
fn recover_dual_quadratic(support: &[(f64, f64, f64)], q: f64) -> Option<[f64; 3]> {
    use nalgebra::{Matrix3, Vector3};
    let (a, b) = match support {
        [(_, z0, c0), (_, z1, c1), (_, z2, c2)] => (
            Matrix3::new(1.0, *z0, z0 * z0, 1.0, *z1, z1 * z1, 1.0, *z2, z2 * z2),
            Vector3::new(*c0, *c1, *c2),
        ),
        [(_, z0, c0), (_, z1, c1)] => {
            // One degree of freedom left: pin the slope at the atom that
            // sits on the kinked side, matching the piece it touches.
            let (slope_at, slope) = if *z1 > q { (*z1, 1.0) } else { (*z0, 0.0) };
            (
                Matrix3::new(1.0, *z0, z0 * z0, 1.0, *z1, z1 * z1, 0.0, 1.0, 2.0 * slope_at),
                Vector3::new(*c0, *c1, slope),
            )
        }
        _ => return None,
    };
    let y = a.lu().solve(&b)?;
    Some([y[0], y[1], y[2]])
}

/// Exact worst violation of `y0 + y1 z + y2 z^2 >= (z - q)^+` over the whole
/// line (`y2 > 0`): the difference is convex-quadratic on each side of the
/// kink, so only two vertices and the kink itself matter.
fn majorization_deficit(y: [f64; 3], q: f64) -> f64 {
    let [y0, y1, y2] = y;
    let quad = |z: f64| y0 + y1 * z + y2 * z * z;
    let left_vertex = -y1 / (2.0 * y2);
    let left_min = quad(left_vertex.min(q));
    let right_vertex = (1.0 - y1) / (2.0 * y2);
    let rv = right_vertex.max(q);
    let right_min = quad(rv) - (rv - q);
    (-(left_min.min(right_min))).max(0.0)
}

/// Upper bound on the worst-case tail average by brute force:
///
/// `min over q in the grid of  q + (1/eps) max_p E[(Z - q)^+]`
///
/// with the inner maximum taken over moment-feasible probability vectors on
/// the grid. Converges to the closed form from above as both grids refine.
pub fn max_cvar_lp(m: &MomentPair, epsilon: f64, grid: &SupportGrid) -> Result<f64, OracleError> {
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 1.0 {
        return Err(OracleError::EpsilonOutOfDomain { epsilon });
    }
    grid.check_span(m)?;
    let mut best = f64::INFINITY;
    for &q in &grid.points {
        let value = q + max_excess_lp(m, q, grid)? / epsilon;
        if value < best {
            best = value;
        }
    }
    Ok(best)
}

/// Exact two-point distribution with the given moments: atom split chosen by
/// the lower-tail probability `p_low`.
pub fn two_point(m: &MomentPair, p_low: f64) -> EmpiricalDistribution {
    let p_high = 1.0 - p_low;
    let lo = m.mean - m.std * (p_high / p_low).sqrt();
    let hi = m.mean + m.std * (p_low / p_high).sqrt();
    EmpiricalDistribution::new(vec![lo, hi], vec![p_low, p_high])
        .expect("two-point construction is moment-exact")
}

/// Three-point distribution on the given atoms with exact moment matching,
/// if a non-negative probability vector exists.
pub fn three_point(m: &MomentPair, atoms: [f64; 3]) -> Option<EmpiricalDistribution> {
    let [a, b, c] = atoms;
    let m2 = m.mean * m.mean + m.std * m.std;
    let pa = (m2 - m.mean * (b + c) + b * c) / ((a - b) * (a - c));
    let pb = (m2 - m.mean * (a + c) + a * c) / ((b - a) * (b - c));
    let pc = (m2 - m.mean * (a + b) + a * b) / ((c - a) * (c - b));
    let floor = 1e-12;
    if pa < floor || pb < floor || pc < floor {
        return None;
    }
    let total = pa + pb + pc;
    EmpiricalDistribution::new(vec![a, b, c], vec![pa / total, pb / total, pc / total]).ok()
}

/// Lower bound on the worst-case spectral risk: the best spectral risk seen
/// over `trials` random moment-feasible two- and three-point distributions
/// with atoms restricted to the grid span. For step spectra the constructive
/// maximizer is injected as one extra trial, which makes the bound tight.
/// Deterministically seeded.
pub fn random_search_lower_bound(
    m: &MomentPair,
    spectrum: &Spectrum,
    trials: usize,
    grid: &SupportGrid,
) -> Result<f64, OracleError> {
    spectrum.validate().map_err(SpectraError::from)?;
    grid.check_span(m)?;
    if m.std == 0.0 {
        return Ok(EmpiricalDistribution::dirac(m.mean).spectral_risk(spectrum)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
    let mut best = f64::NEG_INFINITY;
    let (lo, hi) = (grid.min(), grid.max());
    let mut consider = |d: &EmpiricalDistribution| -> Result<(), OracleError> {
        let rho = d.spectral_risk(spectrum)?;
        if rho > best {
            best = rho;
        }
        Ok(())
    };

    match worstcase::extremal_distribution(m, spectrum, 1) {
        Ok(d) if spectrum.step_form().is_some() => consider(&d)?,
        _ => {}
    }

    let mut produced = 0;
    let mut attempts = 0;
    while produced < trials && attempts < 50 * trials.max(1) {
        attempts += 1;
        let d = if rng.gen_bool(0.5) {
            let p_low: f64 = rng.gen_range(0.02..0.98);
            let d = two_point(m, p_low);
            if d.atoms()[0] < lo || *d.atoms().last().unwrap() > hi {
                continue;
            }
            d
        } else {
            let a = rng.gen_range(lo..m.mean);
            let c = rng.gen_range(m.mean..hi);
            if c - a < 1e-9 {
                continue;
            }
            let b = rng.gen_range(a..c);
            match three_point(m, [a, b, c]) {
                Some(d) => d,
                None => continue,
            }
        };
        produced += 1;
        consider(&d)?;
    }
    Ok(best)
}

/// Adaptive Simpson integration of `f` over `[0, 1]` to relative tolerance
/// `tol`, judged against the refinement-doubling estimate.
pub fn quadrature<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<f64, OracleError> {
    Ok(quad::adaptive_simpson(f, 0.0, 1.0, tol)?)
}
