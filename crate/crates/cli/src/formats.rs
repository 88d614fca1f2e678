//! File schemas: spectrum descriptors, distributions, problem files and the
//! returns CSV, plus conversions into the core types.

use serde::{Deserialize, Serialize};
use std::path::Path;
use wcrisk_core::portfolio::{MomentMatrixPair, Polytope};
use wcrisk_core::{EmpiricalDistribution, Spectrum, SpectrumSet};

use crate::CliError;

/// Structured spectrum descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpectrumFile {
    Cvar { epsilon: f64 },
    Exponential { k: f64 },
    Power { gamma: f64 },
    Piecewise { breakpoints: Vec<f64>, values: Vec<f64> },
    Uniform,
}

impl SpectrumFile {
    pub fn into_spectrum(self) -> Result<Spectrum, CliError> {
        let spec = match self {
            SpectrumFile::Cvar { epsilon } => Spectrum::CVaR { epsilon },
            SpectrumFile::Exponential { k } => Spectrum::Exponential { k },
            SpectrumFile::Power { gamma } => Spectrum::Power { gamma },
            SpectrumFile::Piecewise {
                breakpoints,
                values,
            } => Spectrum::PiecewiseConstant {
                breakpoints,
                values,
            },
            SpectrumFile::Uniform => Spectrum::uniform(),
        };
        spec.validate()
            .map_err(|v| CliError::malformed(format!("inadmissible spectrum: {v}")))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumSetFile {
    pub members: Vec<SpectrumFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub atoms: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentsFile {
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
}

impl MomentsFile {
    pub fn into_pair(self) -> Result<MomentMatrixPair, CliError> {
        MomentMatrixPair::new(self.mu, self.sigma)
            .map_err(|e| CliError::malformed(format!("bad moments: {e}")))
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConstraintsFile {
    #[serde(default)]
    pub a: Vec<Vec<f64>>,
    #[serde(default)]
    pub b: Vec<f64>,
    #[serde(default)]
    pub e: Vec<Vec<f64>>,
    #[serde(default)]
    pub f: Vec<f64>,
    /// Per-coordinate `[lower, upper]`; `null` entries mean unbounded.
    #[serde(default)]
    pub bounds: Vec<(Option<f64>, Option<f64>)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UncertaintyFile {
    pub vertices: Vec<MomentsFile>,
}

/// A complete robust portfolio problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assets: Option<Vec<String>>,
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub constraints: ConstraintsFile,
    pub spectra: Vec<SpectrumFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<UncertaintyFile>,
}

pub struct LoadedProblem {
    pub polytope: Polytope,
    pub moments: MomentMatrixPair,
    pub set: SpectrumSet,
    pub vertices: Option<Vec<MomentMatrixPair>>,
}

impl ProblemFile {
    pub fn load(self) -> Result<LoadedProblem, CliError> {
        let n = self.mu.len();
        if self.sigma.len() != n {
            return Err(CliError::malformed(format!(
                "sigma has {} rows for {n} assets",
                self.sigma.len()
            )));
        }
        if let Some(names) = &self.assets {
            if names.len() != n {
                return Err(CliError::malformed(format!(
                    "{} asset names for {n} assets",
                    names.len()
                )));
            }
        }
        let moments = MomentMatrixPair::new(self.mu, self.sigma)
            .map_err(|e| CliError::malformed(format!("bad moments: {e}")))?;

        let c = self.constraints;
        if c.a.len() != c.b.len() || c.e.len() != c.f.len() {
            return Err(CliError::malformed(
                "constraint matrices and right-hand sides differ in length".into(),
            ));
        }
        let (mut lower, mut upper) = (vec![None; n], vec![None; n]);
        if !c.bounds.is_empty() {
            if c.bounds.len() != n {
                return Err(CliError::malformed(format!(
                    "{} bound pairs for {n} assets",
                    c.bounds.len()
                )));
            }
            for (i, (lo, hi)) in c.bounds.iter().enumerate() {
                lower[i] = *lo;
                upper[i] = *hi;
            }
        }
        let ineq = c.a.into_iter().zip(c.b).collect();
        let eq = c.e.into_iter().zip(c.f).collect();
        let polytope = Polytope::new(n, ineq, eq, lower, upper).map_err(CliError::from_portfolio)?;

        let members = self
            .spectra
            .into_iter()
            .map(|s| s.into_spectrum())
            .collect::<Result<Vec<_>, _>>()?;
        let set = SpectrumSet::new(members)
            .map_err(|e| CliError::malformed(format!("bad spectrum set: {e}")))?;

        let vertices = match self.uncertainty {
            None => None,
            Some(u) => Some(
                u.vertices
                    .into_iter()
                    .map(|m| m.into_pair())
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };
        Ok(LoadedProblem {
            polytope,
            moments,
            set,
            vertices,
        })
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

pub fn parse_distribution(path: &Path) -> Result<EmpiricalDistribution, CliError> {
    let file: DistributionFile = read_json(path)?;
    EmpiricalDistribution::new(file.atoms, file.probs)
        .map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

/// Spectrum argument: `cvar:EPS`, `exp:K`, `power:GAMMA`, `uniform`, or a
/// path to a descriptor file.
pub fn parse_spectrum_arg(arg: &str) -> Result<Spectrum, CliError> {
    let shorthand = |v: &str, make: fn(f64) -> Result<Spectrum, wcrisk_core::SpectraError>| {
        let x: f64 = v
            .parse()
            .map_err(|_| CliError::malformed(format!("bad number in spectrum shorthand: {v}")))?;
        make(x).map_err(|e| CliError::malformed(format!("inadmissible spectrum: {e}")))
    };
    if arg == "uniform" {
        return Ok(Spectrum::uniform());
    }
    if let Some(v) = arg.strip_prefix("cvar:") {
        return shorthand(v, Spectrum::cvar);
    }
    if let Some(v) = arg.strip_prefix("exp:") {
        return shorthand(v, Spectrum::exponential);
    }
    if let Some(v) = arg.strip_prefix("power:") {
        return shorthand(v, Spectrum::power);
    }
    let file: SpectrumFile = read_json(Path::new(arg))?;
    file.into_spectrum()
}

/// Observations of asset returns: a header of asset names and one row per
/// period.
#[derive(Debug, Clone)]
pub struct ReturnsTable {
    pub assets: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ReturnsTable {
    pub fn from_csv(path: &Path) -> Result<Self, CliError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))?;
        let assets: Vec<String> = reader
            .headers()
            .map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))?
            .iter()
            .map(|s| s.to_string())
            .collect();
        if assets.is_empty() {
            return Err(CliError::malformed(format!(
                "{}: header row with at least one asset name required",
                path.display()
            )));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))?;
            if record.len() != assets.len() {
                return Err(CliError::malformed(format!(
                    "{}: row {} has {} cells, expected {}",
                    path.display(),
                    i + 2,
                    record.len(),
                    assets.len()
                )));
            }
            let mut row = Vec::with_capacity(assets.len());
            for (j, cell) in record.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| {
                    CliError::malformed(format!(
                        "{}: row {}, column {} ({}): non-numeric cell {cell:?}",
                        path.display(),
                        i + 2,
                        j + 1,
                        assets[j]
                    ))
                })?;
                row.push(v);
            }
            rows.push(row);
        }
        if rows.len() < 2 {
            return Err(CliError::malformed(format!(
                "{}: need at least 2 observations, got {}",
                path.display(),
                rows.len()
            )));
        }
        Ok(ReturnsTable { assets, rows })
    }

    /// Sample mean per column and unbiased (T-1) sample covariance.
    pub fn estimate_moments(&self) -> Result<MomentMatrixPair, CliError> {
        let t = self.rows.len();
        let n = self.assets.len();
        let mut mean = vec![0.0; n];
        for row in &self.rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= t as f64;
        }
        let mut cov = vec![vec![0.0; n]; n];
        for row in &self.rows {
            for i in 0..n {
                let di = row[i] - mean[i];
                for j in i..n {
                    cov[i][j] += di * (row[j] - mean[j]);
                }
            }
        }
        let denom = (t - 1) as f64;
        for i in 0..n {
            for j in i..n {
                cov[i][j] /= denom;
                cov[j][i] = cov[i][j];
            }
        }
        MomentMatrixPair::new(mean, cov)
            .map_err(|e| CliError::malformed(format!("estimated moments rejected: {e}")))
    }
}
