//! Nominal risk on finite discrete loss distributions: quantiles, tail
//! averages and spectral risk, evaluated both from the quantile-integral
//! definition and from the quantile-variable minimization representation.

use crate::spectra::{SpectraError, Spectrum};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasuresError {
    #[error("distribution must have at least one atom")]
    EmptyDistribution,
    #[error("atoms and probabilities differ in length ({atoms} vs {probs})")]
    LengthMismatch { atoms: usize, probs: usize },
    #[error("probability at index {index} is {value}; every atom needs positive mass")]
    NonPositiveProbability { index: usize, value: f64 },
    #[error("probabilities sum to {total}, not 1")]
    NotNormalized { total: f64 },
    #[error("atom at index {index} is not finite")]
    NonFiniteAtom { index: usize },
    #[error("probability level {alpha} outside (0, 1)")]
    AlphaOutOfDomain { alpha: f64 },
    #[error("quantile candidate grid must be strictly increasing inside (0, 1)")]
    BadCandidateGrid,
    #[error("quantile candidate values must be non-decreasing")]
    CandidateNotMonotone,
    #[error(
        "candidate grid does not match the spectrum's interior breakpoints \
         (expected {expected} points, got {got})"
    )]
    CandidateGridMismatch { expected: usize, got: usize },
    #[error("operation needs a step spectrum; discretize analytic kinds first")]
    NotStepSpectrum,
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// A finite loss distribution: sorted atoms with positive probabilities.
/// Construction sorts by atom and merges exact ties so the generalized
/// inverse cdf is unambiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    atoms: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self, MeasuresError> {
        if atoms.is_empty() {
            return Err(MeasuresError::EmptyDistribution);
        }
        if atoms.len() != probs.len() {
            return Err(MeasuresError::LengthMismatch {
                atoms: atoms.len(),
                probs: probs.len(),
            });
        }
        if let Some(i) = atoms.iter().position(|a| !a.is_finite()) {
            return Err(MeasuresError::NonFiniteAtom { index: i });
        }
        if let Some((i, &v)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p > 0.0) || !p.is_finite())
        {
            return Err(MeasuresError::NonPositiveProbability { index: i, value: v });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(MeasuresError::NotNormalized { total });
        }

        let mut pairs: Vec<(f64, f64)> = atoms.into_iter().zip(probs).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged_atoms = Vec::with_capacity(pairs.len());
        let mut merged_probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (a, p) in pairs {
            if merged_atoms.last() == Some(&a) {
                *merged_probs.last_mut().unwrap() += p;
            } else {
                merged_atoms.push(a);
                merged_probs.push(p);
            }
        }
        let mut cumulative = Vec::with_capacity(merged_probs.len());
        let mut acc = 0.0;
        for p in &merged_probs {
            acc += p;
            cumulative.push(acc);
        }
        // Pin the top of the cdf; the sum was already checked to 1e-12.
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(EmpiricalDistribution {
            atoms: merged_atoms,
            probs: merged_probs,
            cumulative,
        })
    }

    /// Point mass at `value`.
    pub fn dirac(value: f64) -> Self {
        EmpiricalDistribution::new(vec![value], vec![1.0]).expect("dirac is always valid")
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().zip(&self.probs).map(|(a, p)| a * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.atoms
            .iter()
            .zip(&self.probs)
            .map(|(a, p)| p * (a - m) * (a - m))
            .sum()
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Generalized inverse cdf `F^{-1}(alpha) = inf { q : F(q) >= alpha }`
    /// for `alpha` in `(0, 1)`.
    pub fn quantile(&self, alpha: f64) -> Result<f64, MeasuresError> {
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(MeasuresError::AlphaOutOfDomain { alpha });
        }
        let i = self
            .cumulative
            .iter()
            .position(|&c| c >= alpha)
            .unwrap_or(self.atoms.len() - 1);
        Ok(self.atoms[i])
    }

    /// `E[(Z - q)^+]`.
    pub fn expected_excess(&self, q: f64) -> f64 {
        self.atoms
            .iter()
            .zip(&self.probs)
            .map(|(a, p)| p * (a - q).max(0.0))
            .sum()
    }

    /// Spectral risk `∫ phi(alpha) F^{-1}(alpha) d alpha`.
    ///
    /// The quantile function is a step function over the cumulative
    /// probabilities, so the integral reduces to atom values weighted by
    /// increments of the spectrum's antiderivative. That is exact for the
    /// step spectra and exceeds the 1e-9 contract for the analytic kinds,
    /// whose antiderivatives are closed-form. Reduces to the mean for the
    /// uniform spectrum and to the tail average for the CVaR spectrum.
    pub fn spectral_risk(&self, spectrum: &Spectrum) -> Result<f64, MeasuresError> {
        spectrum.validate().map_err(SpectraError::from)?;
        let mut acc = 0.0;
        let mut lo = 0.0;
        for (a, &c) in self.atoms.iter().zip(&self.cumulative) {
            let hi = c.min(1.0);
            acc += a * (spectrum.cumulative(hi) - spectrum.cumulative(lo));
            lo = hi;
        }
        Ok(acc)
    }
}

/// Candidate quantile function sampled on the jump grid of a step spectrum:
/// the minimization representation only reads `q` where the density jumps,
/// and a non-decreasing optimal candidate always exists.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileCandidate {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl QuantileCandidate {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self, MeasuresError> {
        if grid.len() != values.len() {
            return Err(MeasuresError::LengthMismatch {
                atoms: grid.len(),
                probs: values.len(),
            });
        }
        if grid.iter().any(|g| !(0.0 < *g && *g < 1.0)) || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MeasuresError::BadCandidateGrid);
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(MeasuresError::CandidateNotMonotone);
        }
        Ok(QuantileCandidate { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Interior breakpoints of a step spectrum with the density jump at each.
/// Zero jumps are kept so candidate grids are stable across spectra that
/// share breakpoints.
fn jump_points(spectrum: &Spectrum) -> Result<(f64, Vec<(f64, f64)>), MeasuresError> {
    let (breakpoints, values) = spectrum.step_form().ok_or(MeasuresError::NotStepSpectrum)?;
    let phi0 = values[0];
    let jumps = (1..values.len())
        .map(|i| (breakpoints[i], values[i] - values[i - 1]))
        .collect();
    Ok((phi0, jumps))
}

/// Objective of the minimization representation at the candidate `cand`:
///
/// `phi(0) E[Z] + sum_j jump_j [ (1 - b_j) q_j + E[(Z - q_j)^+] ]`
///
/// where the sum runs over the spectrum's density jumps. The candidate grid
/// must coincide with the spectrum's interior breakpoints. The value is
/// always at least the spectral risk, with equality at a true quantile
/// candidate.
pub fn acerbi_value(
    dist: &EmpiricalDistribution,
    spectrum: &Spectrum,
    cand: &QuantileCandidate,
) -> Result<f64, MeasuresError> {
    spectrum.validate().map_err(SpectraError::from)?;
    let (phi0, jumps) = jump_points(spectrum)?;
    if cand.grid.len() != jumps.len()
        || cand
            .grid
            .iter()
            .zip(&jumps)
            .any(|(g, (b, _))| (g - b).abs() > 1e-15)
    {
        return Err(MeasuresError::CandidateGridMismatch {
            expected: jumps.len(),
            got: cand.grid.len(),
        });
    }
    let mut acc = phi0 * dist.mean();
    for ((b, jump), q) in jumps.iter().zip(&cand.values) {
        if *jump == 0.0 {
            continue;
        }
        acc += jump * ((1.0 - b) * q + dist.expected_excess(*q));
    }
    Ok(acc)
}

/// Minimize the representation objective over candidates whose value at each
/// jump ranges over the atom set. The per-jump terms are independent and
/// piecewise linear in `q` with kinks only at atoms, so scanning atoms is
/// exact; ties take the smallest atom, which is the generalized inverse cdf
/// and keeps the candidate non-decreasing. The minimum equals the spectral
/// risk.
pub fn acerbi_minimize(
    dist: &EmpiricalDistribution,
    spectrum: &Spectrum,
) -> Result<(f64, QuantileCandidate), MeasuresError> {
    spectrum.validate().map_err(SpectraError::from)?;
    let (phi0, jumps) = jump_points(spectrum)?;
    let mut value = phi0 * dist.mean();
    let mut grid = Vec::with_capacity(jumps.len());
    let mut values = Vec::with_capacity(jumps.len());
    for (b, jump) in &jumps {
        let mut best_q = dist.atoms()[0];
        let mut best = f64::INFINITY;
        for &q in dist.atoms() {
            let term = (1.0 - b) * q + dist.expected_excess(q);
            if term < best {
                best = term;
                best_q = q;
            }
        }
        value += jump * best;
        grid.push(*b);
        values.push(best_q);
    }
    let cand = QuantileCandidate::new(grid, values)?;
    Ok((value, cand))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(atoms: &[f64], probs: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::new(atoms.to_vec(), probs.to_vec()).unwrap()
    }

    /// Brute-force scan of the cdf, independent of the quantile routine.
    fn quantile_by_scan(d: &EmpiricalDistribution, alpha: f64) -> f64 {
        let mut candidates: Vec<f64> = d.atoms().to_vec();
        candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for &q in &candidates {
            let cdf: f64 = d
                .atoms()
                .iter()
                .zip(d.probs())
                .filter(|(a, _)| **a <= q)
                .map(|(_, p)| p)
                .sum();
            if cdf >= alpha {
                return q;
            }
        }
        *candidates.last().unwrap()
    }

    /// Direct tail average: mean of the top `eps` probability mass.
    fn cvar_by_tail_sum(d: &EmpiricalDistribution, eps: f64) -> f64 {
        let mut remaining = eps;
        let mut acc = 0.0;
        for (a, p) in d.atoms().iter().zip(d.probs()).rev() {
            let take = p.min(remaining);
            acc += a * take;
            remaining -= take;
            if remaining <= 0.0 {
                break;
            }
        }
        acc / eps
    }

    #[test]
    fn quantile_examples() {
        let thirds = dist(&[1.0, 2.0, 3.0], &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        assert_eq!(thirds.quantile(0.5).unwrap(), 2.0);

        let degenerate = dist(&[5.0], &[1.0]);
        assert_eq!(degenerate.quantile(0.99).unwrap(), 5.0);

        // inf convention: F(0) = 0.9 already reaches alpha = 0.9.
        let skewed = dist(&[0.0, 10.0], &[0.9, 0.1]);
        assert_eq!(skewed.quantile(0.9).unwrap(), 0.0);
        assert_eq!(
            skewed.quantile(0.9).unwrap(),
            quantile_by_scan(&skewed, 0.9)
        );
    }

    #[test]
    fn quantile_rejects_bad_alpha() {
        let d = dist(&[1.0], &[1.0]);
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
    }

    #[test]
    fn atoms_sorted_and_ties_merged() {
        let d = dist(&[3.0, 1.0, 3.0], &[0.25, 0.5, 0.25]);
        assert_eq!(d.atoms(), &[1.0, 3.0]);
        assert_eq!(d.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn spectral_risk_constant_and_uniform() {
        let c = dist(&[7.25], &[1.0]);
        assert_eq!(c.spectral_risk(&Spectrum::cvar(0.3).unwrap()).unwrap(), 7.25);

        let d = dist(&[-1.0, 0.5, 4.0], &[0.2, 0.5, 0.3]);
        let risk = d.spectral_risk(&Spectrum::uniform()).unwrap();
        assert!((risk - d.mean()).abs() <= 1e-15);
    }

    #[test]
    fn spectral_risk_cvar_tail() {
        let d = dist(&[0.0, 10.0], &[0.95, 0.05]);
        let risk = d.spectral_risk(&Spectrum::cvar(0.05).unwrap()).unwrap();
        assert!((risk - 10.0).abs() <= 1e-12);
        assert!((risk - cvar_by_tail_sum(&d, 0.05)).abs() <= 1e-12);
    }

    #[test]
    fn spectral_risk_matches_tail_average_on_grid() {
        let d = dist(&[-2.0, -0.5, 0.1, 1.4, 3.0], &[0.1, 0.2, 0.35, 0.25, 0.1]);
        let mut eps: f64 = 0.01;
        while eps < 1.0 + 1e-9 {
            let spec = Spectrum::cvar(eps.min(1.0)).unwrap();
            let a = d.spectral_risk(&spec).unwrap();
            let b = cvar_by_tail_sum(&d, eps.min(1.0));
            assert!((a - b).abs() <= 1e-10, "eps={eps} {a} vs {b}");
            eps += 0.01;
        }
    }

    #[test]
    fn acerbi_value_at_true_quantile_equals_spectral_risk() {
        let d = dist(&[-1.0, 0.0, 2.0, 5.0], &[0.4, 0.3, 0.2, 0.1]);
        let spec = Spectrum::piecewise(vec![0.0, 0.5, 0.75, 1.0], vec![0.4, 1.2, 2.0]).unwrap();
        let grid = vec![0.5, 0.75];
        let values: Vec<f64> = grid.iter().map(|&b| d.quantile(b).unwrap()).collect();
        let cand = QuantileCandidate::new(grid, values).unwrap();
        let v = acerbi_value(&d, &spec, &cand).unwrap();
        let rho = d.spectral_risk(&spec).unwrap();
        assert!((v - rho).abs() <= 1e-12, "{v} vs {rho}");
    }

    #[test]
    fn acerbi_value_uniform_is_mean() {
        let d = dist(&[1.0, 4.0], &[0.5, 0.5]);
        let cand = QuantileCandidate::new(vec![], vec![]).unwrap();
        let v = acerbi_value(&d, &Spectrum::uniform(), &cand).unwrap();
        assert_eq!(v, d.mean());
    }

    #[test]
    fn acerbi_perturbed_candidate_is_strictly_worse() {
        let d = dist(&[0.0, 1.0], &[0.5, 0.5]);
        let spec = Spectrum::cvar(0.5).unwrap();
        let rho = d.spectral_risk(&spec).unwrap();
        let cand = QuantileCandidate::new(vec![0.5], vec![2.0]).unwrap();
        let v = acerbi_value(&d, &spec, &cand).unwrap();
        assert!(v > rho + 1e-9, "{v} should exceed {rho}");
    }

    #[test]
    fn acerbi_minimize_examples() {
        // Exhaustive-search account: both atoms minimize, the smaller is kept.
        let d = dist(&[0.0, 10.0], &[0.95, 0.05]);
        let spec = Spectrum::cvar(0.05).unwrap();
        let (v, cand) = acerbi_minimize(&d, &spec).unwrap();
        assert!((v - 10.0).abs() <= 1e-12);
        assert_eq!(cand.grid(), &[0.95]);
        assert_eq!(cand.values(), &[0.0]);

        let degenerate = dist(&[3.5], &[1.0]);
        let (v, cand) = acerbi_minimize(&degenerate, &spec).unwrap();
        assert!((v - 3.5).abs() <= 1e-12);
        assert_eq!(cand.values(), &[3.5]);

        let two = dist(&[-1.0, 3.0], &[0.5, 0.5]);
        let spec = Spectrum::cvar(0.5).unwrap();
        let (v, _) = acerbi_minimize(&two, &spec).unwrap();
        assert!((v - two.spectral_risk(&spec).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn acerbi_rejects_analytic_spectra() {
        let d = dist(&[0.0, 1.0], &[0.5, 0.5]);
        let spec = Spectrum::exponential(1.0).unwrap();
        assert!(matches!(
            acerbi_minimize(&d, &spec),
            Err(MeasuresError::NotStepSpectrum)
        ));
        // The documented route: discretize first.
        let stepped = spec.discretize(1000).unwrap();
        let (v, _) = acerbi_minimize(&d, &stepped).unwrap();
        let rho = d.spectral_risk(&spec).unwrap();
        assert!((v - rho).abs() <= 1e-3, "{v} vs {rho}");
    }

    #[test]
    fn spectral_risk_dominates_mean() {
        let d = dist(&[-3.0, -1.0, 0.5, 2.0], &[0.15, 0.35, 0.3, 0.2]);
        for spec in [
            Spectrum::cvar(0.2).unwrap(),
            Spectrum::exponential(3.0).unwrap(),
            Spectrum::power(2.0).unwrap(),
            Spectrum::piecewise(vec![0.0, 0.6, 1.0], vec![0.5, 1.75]).unwrap(),
        ] {
            let rho = d.spectral_risk(&spec).unwrap();
            assert!(rho >= d.mean() - 1e-12, "{spec:?}");
        }
    }
}
