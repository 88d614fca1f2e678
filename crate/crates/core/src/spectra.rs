//! Risk spectra: non-decreasing probability densities on `[0, 1)` that
//! weight loss quantiles.
//!
//! A spectrum `phi` is admissible when it is non-negative, non-decreasing
//! and integrates to one; every spectrum here is additionally bounded, so
//! the risk values it induces stay finite for square-integrable losses.
//! The quantity driving all the worst-case closed forms is the squared
//! L2 norm `∫ phi(p)^2 dp`, which equals `1/epsilon` for the tail-average
//! (CVaR) spectrum and `1` exactly for the uniform spectrum.

use crate::quad::{self, QuadError};
use thiserror::Error;

/// Tolerance on `∫ phi - 1` for piecewise-constant densities. User input is
/// floating point, so exactness at 1e-12 is the practical substitute for
/// exact arithmetic.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Relative tolerance for the quadrature fallback in [`Spectrum::l2_norm_sq`].
const L2_QUAD_TOL: f64 = 1e-10;

/// Default step count for [`Spectrum::discretize`] when a caller has no
/// better resolution in mind.
pub const DEFAULT_STEP_RESOLUTION: usize = 1000;

/// An admissibility invariant that failed validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdmissibilityViolation {
    #[error("density is not non-decreasing: values[{index}] = {left} > values[{}] = {right}", index + 1)]
    NotNonDecreasing { index: usize, left: f64, right: f64 },
    #[error("density integrates to {integral}, not 1")]
    NotNormalized { integral: f64 },
    #[error("density is unbounded or has a parameter outside its domain: {reason}")]
    Unbounded { reason: String },
    #[error("malformed spectrum: {reason}")]
    Malformed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("inadmissible spectrum: {0}")]
    Inadmissible(#[from] AdmissibilityViolation),
    #[error("probability {p} outside the density domain [0, 1)")]
    ProbabilityOutOfDomain { p: f64 },
    #[error("spectrum set must be non-empty")]
    EmptySpectrumSet,
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// An admissible risk spectrum.
///
/// `CVaR { epsilon }` is the tail indicator `1_{[1-eps, 1)} / eps`;
/// `Exponential { k }` is `k e^{kp} / (e^k - 1)`; `Power { gamma }` is
/// `(gamma+1) p^gamma`; `PiecewiseConstant` holds steps that are
/// right-continuous (each value applies on `[b_i, b_{i+1})`), matching the
/// right-open tail indicator of `CVaR`.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    CVaR {
        epsilon: f64,
    },
    Exponential {
        k: f64,
    },
    Power {
        gamma: f64,
    },
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Spectrum {
    /// Tail-average spectrum with tail probability `epsilon` in `(0, 1]`.
    pub fn cvar(epsilon: f64) -> Result<Self, SpectraError> {
        let s = Spectrum::CVaR { epsilon };
        s.validate()?;
        Ok(s)
    }

    /// The uniform density, i.e. the risk-neutral spectrum.
    pub fn uniform() -> Self {
        Spectrum::CVaR { epsilon: 1.0 }
    }

    pub fn exponential(k: f64) -> Result<Self, SpectraError> {
        let s = Spectrum::Exponential { k };
        s.validate()?;
        Ok(s)
    }

    pub fn power(gamma: f64) -> Result<Self, SpectraError> {
        let s = Spectrum::Power { gamma };
        s.validate()?;
        Ok(s)
    }

    pub fn piecewise(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, SpectraError> {
        let s = Spectrum::PiecewiseConstant {
            breakpoints,
            values,
        };
        s.validate()?;
        Ok(s)
    }

    /// Check the three admissibility invariants (non-decreasing, unit
    /// integral, bounded). Never panics; the report names the violated
    /// invariant.
    pub fn validate(&self) -> Result<(), AdmissibilityViolation> {
        match self {
            Spectrum::CVaR { epsilon } => {
                if !epsilon.is_finite() || *epsilon <= 0.0 {
                    return Err(AdmissibilityViolation::Unbounded {
                        reason: format!("cvar epsilon must lie in (0, 1], got {epsilon}"),
                    });
                }
                if *epsilon > 1.0 {
                    return Err(AdmissibilityViolation::Malformed {
                        reason: format!("cvar epsilon must lie in (0, 1], got {epsilon}"),
                    });
                }
                Ok(())
            }
            Spectrum::Exponential { k } => {
                if !k.is_finite() || *k <= 0.0 {
                    return Err(AdmissibilityViolation::Malformed {
                        reason: format!("exponential rate must be positive and finite, got {k}"),
                    });
                }
                Ok(())
            }
            Spectrum::Power { gamma } => {
                if !gamma.is_finite() || *gamma <= 0.0 {
                    return Err(AdmissibilityViolation::Malformed {
                        reason: format!("power exponent must be positive and finite, got {gamma}"),
                    });
                }
                Ok(())
            }
            Spectrum::PiecewiseConstant {
                breakpoints,
                values,
            } => validate_piecewise(breakpoints, values),
        }
    }

    /// Density value `phi(p)` for `p` in `[0, 1)`. Piecewise steps are
    /// right-continuous: the value of the interval containing `p` applies.
    pub fn density_at(&self, p: f64) -> Result<f64, SpectraError> {
        self.validate()?;
        if !(0.0..1.0).contains(&p) {
            return Err(SpectraError::ProbabilityOutOfDomain { p });
        }
        Ok(self.density_unchecked(p))
    }

    fn density_unchecked(&self, p: f64) -> f64 {
        match self {
            Spectrum::CVaR { epsilon } => {
                if p >= 1.0 - epsilon {
                    1.0 / epsilon
                } else {
                    0.0
                }
            }
            Spectrum::Exponential { k } => k * (k * (p - 1.0)).exp() / (-(-k).exp_m1()),
            Spectrum::Power { gamma } => (gamma + 1.0) * p.powf(*gamma),
            Spectrum::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let i = match breakpoints[1..breakpoints.len() - 1]
                    .iter()
                    .position(|&b| p < b)
                {
                    Some(i) => i,
                    None => values.len() - 1,
                };
                values[i]
            }
        }
    }

    /// Antiderivative `Phi(p) = ∫_0^p phi`, in closed form for every kind.
    /// The top is pinned: `Phi(1)` returns exactly 1 (admissibility already
    /// bounds the true mass within 1e-12), so quantile-integral sums
    /// telescope without endpoint round-off.
    pub fn cumulative(&self, p: f64) -> f64 {
        if p >= 1.0 {
            return 1.0;
        }
        let p = p.clamp(0.0, 1.0);
        match self {
            Spectrum::CVaR { epsilon } => ((p - (1.0 - epsilon)) / epsilon).clamp(0.0, 1.0),
            Spectrum::Exponential { k } => {
                // (e^{kp} - 1) / (e^k - 1), rescaled by e^{-k} to stay finite
                // for large rates.
                ((k * (p - 1.0)).exp() - (-k).exp()) / (-(-k).exp_m1())
            }
            Spectrum::Power { gamma } => p.powf(gamma + 1.0),
            Spectrum::PiecewiseConstant {
                breakpoints,
                values,
            } => {
                let mut acc = 0.0;
                for (i, v) in values.iter().enumerate() {
                    let lo = breakpoints[i];
                    let hi = breakpoints[i + 1];
                    if p <= lo {
                        break;
                    }
                    acc += v * (p.min(hi) - lo);
                }
                acc
            }
        }
    }

    /// `∫_0^1 phi(p)^2 dp`, the skewness-against-uniform quantity behind all
    /// the worst-case closed forms. Exact for `CVaR` and piecewise-constant
    /// spectra; adaptive quadrature to relative error 1e-10 otherwise.
    /// Always at least 1 for admissible spectra, with equality only at the
    /// uniform density.
    pub fn l2_norm_sq(&self) -> Result<f64, SpectraError> {
        self.validate()?;
        match self {
            Spectrum::CVaR { epsilon } => Ok(1.0 / epsilon),
            Spectrum::PiecewiseConstant {
                breakpoints,
                values,
            } => Ok(values
                .iter()
                .enumerate()
                .map(|(i, v)| v * v * (breakpoints[i + 1] - breakpoints[i]))
                .sum()),
            _ => {
                let f = |p: f64| {
                    let d = self.density_unchecked(p.min(1.0));
                    d * d
                };
                Ok(quad::adaptive_simpson(f, 0.0, 1.0, L2_QUAD_TOL)?)
            }
        }
    }

    /// Piecewise-step view: breakpoints and values for the kinds whose
    /// density is a finite step function (`CVaR` and `PiecewiseConstant`).
    /// `None` for the analytic kinds, which must be discretized first.
    pub fn step_form(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            Spectrum::CVaR { epsilon } => {
                if *epsilon >= 1.0 {
                    Some((vec![0.0, 1.0], vec![1.0]))
                } else {
                    Some((vec![0.0, 1.0 - epsilon, 1.0], vec![0.0, 1.0 / epsilon]))
                }
            }
            Spectrum::PiecewiseConstant {
                breakpoints,
                values,
            } => Some((breakpoints.clone(), values.clone())),
            _ => None,
        }
    }

    /// Step approximation with `steps` equal-width intervals, each carrying
    /// the average density of the interval. The result is admissible (the
    /// averages of a non-decreasing density are non-decreasing and the
    /// total mass telescopes to one) and converges to `self` as `steps`
    /// grows. This is the entry point for running the step-only minimization
    /// representation against an analytic spectrum;
    /// [`DEFAULT_STEP_RESOLUTION`] is a sensible default.
    pub fn discretize(&self, steps: usize) -> Result<Spectrum, SpectraError> {
        self.validate()?;
        if steps == 0 {
            return Err(SpectraError::Inadmissible(
                AdmissibilityViolation::Malformed {
                    reason: "step approximation needs at least one step".into(),
                },
            ));
        }
        let n = steps as f64;
        let breakpoints: Vec<f64> = (0..=steps)
            .map(|i| if i == steps { 1.0 } else { i as f64 / n })
            .collect();
        let values: Vec<f64> = (0..steps)
            .map(|i| n * (self.cumulative(breakpoints[i + 1]) - self.cumulative(breakpoints[i])))
            .collect();
        Ok(Spectrum::PiecewiseConstant {
            breakpoints,
            values,
        })
    }

    /// The density's supremum; finite for every admissible spectrum here.
    pub fn sup_density(&self) -> Result<f64, SpectraError> {
        self.validate()?;
        Ok(match self {
            Spectrum::CVaR { epsilon } => 1.0 / epsilon,
            Spectrum::Exponential { k } => k / (-(-k).exp_m1()),
            Spectrum::Power { gamma } => gamma + 1.0,
            Spectrum::PiecewiseConstant { values, .. } => {
                values.iter().cloned().fold(0.0, f64::max)
            }
        })
    }
}

fn validate_piecewise(breakpoints: &[f64], values: &[f64]) -> Result<(), AdmissibilityViolation> {
    if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
        return Err(AdmissibilityViolation::Malformed {
            reason: format!(
                "expected m+1 breakpoints for m values, got {} and {}",
                breakpoints.len(),
                values.len()
            ),
        });
    }
    if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
        return Err(AdmissibilityViolation::Malformed {
            reason: "breakpoints must start at 0 and end at 1".into(),
        });
    }
    if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(AdmissibilityViolation::Malformed {
            reason: "breakpoints must be strictly increasing".into(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AdmissibilityViolation::Unbounded {
            reason: "step values must be finite".into(),
        });
    }
    if let Some(v) = values.iter().find(|v| **v < 0.0) {
        return Err(AdmissibilityViolation::Malformed {
            reason: format!("step values must be non-negative, got {v}"),
        });
    }
    for (i, w) in values.windows(2).enumerate() {
        if w[0] > w[1] {
            return Err(AdmissibilityViolation::NotNonDecreasing {
                index: i,
                left: w[0],
                right: w[1],
            });
        }
    }
    let integral: f64 = values
        .iter()
        .enumerate()
        .map(|(i, v)| v * (breakpoints[i + 1] - breakpoints[i]))
        .sum();
    if (integral - 1.0).abs() > NORMALIZATION_TOL {
        return Err(AdmissibilityViolation::NotNormalized { integral });
    }
    Ok(())
}

/// A finite set of admissible spectra. The supremum over the set realizes a
/// coherent, law-invariant risk measure; restricting to finite sets keeps
/// the supremum a finite maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSet {
    members: Vec<Spectrum>,
}

impl SpectrumSet {
    pub fn new(members: Vec<Spectrum>) -> Result<Self, SpectraError> {
        if members.is_empty() {
            return Err(SpectraError::EmptySpectrumSet);
        }
        for m in &members {
            m.validate()?;
        }
        Ok(SpectrumSet { members })
    }

    pub fn singleton(spectrum: Spectrum) -> Result<Self, SpectraError> {
        SpectrumSet::new(vec![spectrum])
    }

    pub fn members(&self) -> &[Spectrum] {
        &self.members
    }

    /// Largest `∫ phi^2` over the members together with the index of the
    /// attaining member (lowest index on ties).
    pub fn sup_l2_norm_sq(&self) -> Result<(f64, usize), SpectraError> {
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = 0;
        for (i, m) in self.members.iter().enumerate() {
            let v = m.l2_norm_sq()?;
            if v > best {
                best = v;
                best_idx = i;
            }
        }
        Ok((best, best_idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_accepts_cvar_step_form() {
        // A two-step density written out by hand is just CVaR(0.5).
        let s = Spectrum::PiecewiseConstant {
            breakpoints: vec![0.0, 0.5, 1.0],
            values: vec![0.0, 2.0],
        };
        assert!(s.validate().is_ok());
    }

    #[test]
    fn validate_rejects_decreasing_step() {
        let s = Spectrum::PiecewiseConstant {
            breakpoints: vec![0.0, 0.5, 1.0],
            values: vec![2.0, 0.0],
        };
        assert!(matches!(
            s.validate(),
            Err(AdmissibilityViolation::NotNonDecreasing { .. })
        ));
    }

    #[test]
    fn validate_rejects_wrong_mass() {
        let s = Spectrum::PiecewiseConstant {
            breakpoints: vec![0.0, 1.0],
            values: vec![0.9],
        };
        match s.validate() {
            Err(AdmissibilityViolation::NotNormalized { integral }) => {
                assert!((integral - 0.9).abs() <= 1e-15)
            }
            other => panic!("expected normalization violation, got {other:?}"),
        }
    }

    #[test]
    fn cvar_l2_is_inverse_epsilon() {
        for &eps in &[0.01, 0.05, 0.1, 0.5, 1.0] {
            let s = Spectrum::cvar(eps).unwrap();
            assert_eq!(s.l2_norm_sq().unwrap() * eps, 1.0);
        }
    }

    #[test]
    fn uniform_l2_is_one() {
        let s = Spectrum::piecewise(vec![0.0, 1.0], vec![1.0]).unwrap();
        assert_eq!(s.l2_norm_sq().unwrap(), 1.0);
    }

    #[test]
    fn exponential_l2_matches_analytic() {
        // ∫ phi^2 = k (e^k + 1) / (2 (e^k - 1)); for k = 1 this is about 1.08198.
        let s = Spectrum::exponential(1.0).unwrap();
        let e = std::f64::consts::E;
        let expected = (e + 1.0) / (2.0 * (e - 1.0));
        let got = s.l2_norm_sq().unwrap();
        assert!(((got - expected) / expected).abs() <= 1e-10, "got {got}");
        assert!((got - 1.08198).abs() <= 1e-5);
    }

    #[test]
    fn power_l2_matches_analytic() {
        for &gamma in &[0.3, 1.0, 2.0, 5.5] {
            let s = Spectrum::power(gamma).unwrap();
            let expected = (gamma + 1.0) * (gamma + 1.0) / (2.0 * gamma + 1.0);
            let got = s.l2_norm_sq().unwrap();
            assert!(
                ((got - expected) / expected).abs() <= 1e-8,
                "gamma={gamma} got={got} expected={expected}"
            );
        }
    }

    #[test]
    fn density_at_cvar_kink() {
        let s = Spectrum::cvar(0.05).unwrap();
        assert_eq!(s.density_at(0.9).unwrap(), 0.0);
        assert_eq!(s.density_at(0.97).unwrap(), 20.0);
    }

    #[test]
    fn density_right_continuous_at_breakpoint() {
        let s = Spectrum::piecewise(vec![0.0, 0.5, 1.0], vec![0.0, 2.0]).unwrap();
        assert_eq!(s.density_at(0.5).unwrap(), 2.0);
        assert_eq!(s.density_at(0.499999).unwrap(), 0.0);
    }

    #[test]
    fn density_domain_is_half_open() {
        let s = Spectrum::uniform();
        assert!(s.density_at(1.0).is_err());
        assert!(s.density_at(-1e-9).is_err());
        assert_eq!(s.density_at(0.0).unwrap(), 1.0);
    }

    #[test]
    fn sup_l2_picks_max_with_lowest_index_ties() {
        let set = SpectrumSet::new(vec![
            Spectrum::cvar(0.05).unwrap(),
            Spectrum::cvar(0.10).unwrap(),
        ])
        .unwrap();
        let (v, i) = set.sup_l2_norm_sq().unwrap();
        assert_eq!(v, 20.0);
        assert_eq!(i, 0);

        let uniform_only = SpectrumSet::singleton(Spectrum::uniform()).unwrap();
        assert_eq!(uniform_only.sup_l2_norm_sq().unwrap(), (1.0, 0));

        // Quadrature confirms the exponential norm stays below 2.
        let set = SpectrumSet::new(vec![
            Spectrum::exponential(1.0).unwrap(),
            Spectrum::cvar(0.5).unwrap(),
        ])
        .unwrap();
        let (v, i) = set.sup_l2_norm_sq().unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(i, 1);

        let tie = SpectrumSet::new(vec![
            Spectrum::cvar(0.25).unwrap(),
            Spectrum::cvar(0.25).unwrap(),
        ])
        .unwrap();
        assert_eq!(tie.sup_l2_norm_sq().unwrap().1, 0);
    }

    #[test]
    fn cumulative_reaches_one() {
        let specs = [
            Spectrum::cvar(0.3).unwrap(),
            Spectrum::exponential(2.5).unwrap(),
            Spectrum::power(1.7).unwrap(),
            Spectrum::piecewise(vec![0.0, 0.25, 0.75, 1.0], vec![0.2, 0.8, 2.2]).unwrap(),
        ];
        for s in &specs {
            assert!((s.cumulative(1.0) - 1.0).abs() <= 1e-12, "{s:?}");
            assert_eq!(s.cumulative(0.0), 0.0);
        }
    }

    #[test]
    fn discretize_is_admissible_and_converges() {
        let s = Spectrum::exponential(1.0).unwrap();
        let d = s.discretize(1000).unwrap();
        assert!(d.validate().is_ok());
        let (l2_d, l2_s) = (d.l2_norm_sq().unwrap(), s.l2_norm_sq().unwrap());
        assert!((l2_d - l2_s).abs() <= 1e-5, "{l2_d} vs {l2_s}");
    }

    #[test]
    fn empty_set_rejected() {
        assert!(matches!(
            SpectrumSet::new(vec![]),
            Err(SpectraError::EmptySpectrumSet)
        ));
    }
}
