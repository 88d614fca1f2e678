//! Robust portfolio selection over a bounded polytope of allocations.
//!
//! The multivariate worst-case problem projects onto the univariate closed
//! form: for an allocation `x` the loss `-R^T x` has worst-case risk
//! `-mu^T x + kappa sqrt(x^T Sigma x)` with `kappa` the spectral multiplier.
//! The sign convention is fixed once, here: risk is measured on the negated
//! return, and the reduced objective is exactly `-mu^T x + kappa ||x||_Sigma`.
//!
//! Minimization uses the conditional-gradient method with the dense LP as
//! linear-minimization oracle (away steps keep the convergence linear on
//! desk-scale instances); polytopic moment uncertainty goes through Kelley
//! cutting planes on the pointwise maximum; the matrix formulation of the
//! moment ball is certified eigenvalue-by-eigenvalue without an SDP solver.

use crate::lp::{LpError, Problem};
use crate::spectra::{SpectraError, SpectrumSet};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PortfolioError {
    #[error("allocation must be non-zero")]
    ZeroAllocation,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("covariance is not symmetric (max asymmetry {max_asym:.3e})")]
    NotSymmetric { max_asym: f64 },
    #[error("covariance is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("polytope is unbounded along coordinate {coord}")]
    UnboundedPolytope { coord: usize },
    #[error("polytope is empty")]
    InfeasiblePolytope,
    #[error("polytope contains the zero allocation")]
    ContainsOrigin,
    #[error("no moment vertices supplied")]
    EmptyVertexSet,
    #[error("allocation has zero variance in every supplied direction")]
    DegenerateDirection,
    #[error("solver did not reach gap {tol:.3e} within {iterations} iterations (gap {gap:.3e})")]
    DidNotConverge {
        tol: f64,
        gap: f64,
        iterations: usize,
    },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Mean vector and covariance matrix of the joint return distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrixPair {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl MomentMatrixPair {
    /// Validates symmetry to 1e-10 and positive semidefiniteness; eigenvalues
    /// in `[-1e-10, 0)` are clamped to zero, anything lower is rejected.
    pub fn new(mean: Vec<f64>, cov_rows: Vec<Vec<f64>>) -> Result<Self, PortfolioError> {
        let n = mean.len();
        if cov_rows.len() != n || cov_rows.iter().any(|r| r.len() != n) {
            return Err(PortfolioError::DimensionMismatch {
                expected: n,
                got: cov_rows.len(),
            });
        }
        let cov = DMatrix::from_fn(n, n, |i, j| cov_rows[i][j]);
        Self::from_nalgebra(DVector::from_vec(mean), cov)
    }

    pub fn from_nalgebra(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self, PortfolioError> {
        let n = mean.len();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(PortfolioError::DimensionMismatch {
                expected: n,
                got: cov.nrows(),
            });
        }
        let mut max_asym: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                max_asym = max_asym.max((cov[(i, j)] - cov[(j, i)]).abs());
            }
        }
        if max_asym > 1e-10 {
            return Err(PortfolioError::NotSymmetric { max_asym });
        }
        let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (cov[(i, j)] + cov[(j, i)]));
        let eig = sym.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(PortfolioError::NotPsd { min_eig });
        }
        let cov = if min_eig < 0.0 {
            // Clamp round-off negatives to zero and rebuild.
            let clamped = DVector::from_iterator(n, eig.eigenvalues.iter().map(|&l| l.max(0.0)));
            &eig.eigenvectors * DMatrix::from_diagonal(&clamped) * eig.eigenvectors.transpose()
        } else {
            cov
        };
        Ok(MomentMatrixPair { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }
}

/// Bounded polytope of admissible allocations, `A x <= b`, `E x = f` plus
/// per-coordinate box bounds. Construction verifies boundedness by
/// maximizing each coordinate in both directions with the LP routine and
/// rejects any polytope containing the zero allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    ineq: Vec<(Vec<f64>, f64)>,
    eq: Vec<(Vec<f64>, f64)>,
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
}

impl Polytope {
    pub fn new(
        dim: usize,
        ineq: Vec<(Vec<f64>, f64)>,
        eq: Vec<(Vec<f64>, f64)>,
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
    ) -> Result<Self, PortfolioError> {
        if lower.len() != dim || upper.len() != dim {
            return Err(PortfolioError::DimensionMismatch {
                expected: dim,
                got: lower.len().max(upper.len()),
            });
        }
        for (row, _) in ineq.iter().chain(eq.iter()) {
            if row.len() != dim {
                return Err(PortfolioError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        let p = Polytope {
            dim,
            ineq,
            eq,
            lower,
            upper,
        };
        p.check_bounded()?;
        if p.contains_origin() {
            return Err(PortfolioError::ContainsOrigin);
        }
        Ok(p)
    }

    /// The standard allocation simplex `x >= 0`, `1^T x = 1`.
    pub fn simplex(dim: usize) -> Result<Self, PortfolioError> {
        Polytope::new(
            dim,
            vec![],
            vec![(vec![1.0; dim], 1.0)],
            vec![Some(0.0); dim],
            vec![None; dim],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn lp_problem(&self, objective: Vec<f64>) -> Problem {
        let mut p = Problem::new(objective);
        p.lower = self.lower.clone();
        p.upper = self.upper.clone();
        for (row, rhs) in &self.ineq {
            p.push_le(row.clone(), *rhs);
        }
        for (row, rhs) in &self.eq {
            p.push_eq(row.clone(), *rhs);
        }
        p
    }

    /// Vertex minimizing `c^T x`; the linear-minimization oracle.
    pub fn minimize_linear(&self, c: &[f64]) -> Result<Vec<f64>, PortfolioError> {
        match self.lp_problem(c.to_vec()).solve() {
            Ok(s) => Ok(s.x),
            Err(LpError::Infeasible { .. }) => Err(PortfolioError::InfeasiblePolytope),
            Err(e) => Err(PortfolioError::Lp(e)),
        }
    }

    fn check_bounded(&self) -> Result<(), PortfolioError> {
        for coord in 0..self.dim {
            for sign in [1.0, -1.0] {
                let mut c = vec![0.0; self.dim];
                c[coord] = sign;
                match self.lp_problem(c).solve() {
                    Ok(_) => {}
                    Err(LpError::Unbounded) => {
                        return Err(PortfolioError::UnboundedPolytope { coord })
                    }
                    Err(LpError::Infeasible { .. }) => {
                        return Err(PortfolioError::InfeasiblePolytope)
                    }
                    Err(e) => return Err(PortfolioError::Lp(e)),
                }
            }
        }
        Ok(())
    }

    fn contains_origin(&self) -> bool {
        self.ineq.iter().all(|(_, b)| *b >= 0.0)
            && self.eq.iter().all(|(_, f)| *f == 0.0)
            && self.lower.iter().all(|l| l.map_or(true, |l| l <= 0.0))
            && self.upper.iter().all(|u| u.map_or(true, |u| u >= 0.0))
    }

    /// Feasibility of `x` within `tol` on every constraint.
    pub fn feasible(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let dot = |row: &[f64]| -> f64 { row.iter().zip(x).map(|(a, b)| a * b).sum() };
        self.ineq.iter().all(|(row, b)| dot(row) <= b + tol)
            && self.eq.iter().all(|(row, f)| (dot(row) - f).abs() <= tol)
            && self
                .lower
                .iter()
                .zip(x)
                .all(|(l, xi)| l.map_or(true, |l| *xi >= l - tol))
            && self
                .upper
                .iter()
                .zip(x)
                .all(|(u, xi)| u.map_or(true, |u| *xi <= u + tol))
    }
}

/// Output of the robust solvers: allocation, objective, certified gap.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub kappa: f64,
    /// Certified optimality gap (conditional-gradient or cutting-plane).
    pub gap: f64,
    pub iterations: usize,
}

/// Project the multivariate moments onto the allocation direction:
/// `(mu^T x, sqrt(x^T Sigma x))`. The caller owns the loss negation.
pub fn reduce(
    x: &[f64],
    mm: &MomentMatrixPair,
) -> Result<crate::worstcase::MomentPair, PortfolioError> {
    let xv = allocation_vector(x, mm.dim())?;
    let mean = mm.mean.dot(&xv);
    let var = (&mm.cov * &xv).dot(&xv).max(0.0);
    Ok(crate::worstcase::MomentPair {
        mean,
        std: var.sqrt(),
    })
}

fn allocation_vector(x: &[f64], dim: usize) -> Result<DVector<f64>, PortfolioError> {
    if x.len() != dim {
        return Err(PortfolioError::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(PortfolioError::ZeroAllocation);
    }
    Ok(DVector::from_column_slice(x))
}

/// Worst-case risk of the portfolio loss `-R^T x`:
/// `-mu^T x + kappa sqrt(x^T Sigma x)` with `kappa` from the set's largest
/// squared spectrum norm.
pub fn robust_objective(
    x: &[f64],
    mm: &MomentMatrixPair,
    set: &SpectrumSet,
) -> Result<f64, PortfolioError> {
    let kappa = kappa_of(set)?;
    let m = reduce(x, mm)?;
    Ok(-m.mean + kappa * m.std)
}

fn kappa_of(set: &SpectrumSet) -> Result<f64, PortfolioError> {
    let (l2, _) = set.sup_l2_norm_sq()?;
    Ok((l2 - 1.0).max(0.0).sqrt())
}

struct ReducedObjective {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    kappa: f64,
}

impl ReducedObjective {
    /// Applies the diagonal jitter when the covariance is singular, so the
    /// square root stays differentiable on the feasible set.
    fn new(mm: &MomentMatrixPair, kappa: f64) -> Self {
        let n = mm.dim();
        let eig_min = mm
            .cov
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let trace: f64 = (0..n).map(|i| mm.cov[(i, i)]).sum();
        let jitter = 1e-12 * trace / n as f64;
        let cov = if eig_min < jitter && jitter > 0.0 {
            log::warn!(
                "covariance is singular (min eigenvalue {eig_min:.3e}); \
                 applying diagonal jitter {jitter:.3e}"
            );
            &mm.cov + DMatrix::identity(n, n) * jitter
        } else {
            mm.cov.clone()
        };
        ReducedObjective {
            mean: mm.mean.clone(),
            cov,
            kappa,
        }
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let var = (&self.cov * x).dot(x).max(0.0);
        -self.mean.dot(x) + self.kappa * var.sqrt()
    }

    /// Subgradient; at the kink (vanishing variance) the sqrt term
    /// contributes zero, a valid selection there.
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let sx = &self.cov * x;
        let sd = sx.dot(x).max(0.0).sqrt();
        if sd < 1e-12 {
            -&self.mean
        } else {
            -&self.mean + sx * (self.kappa / sd)
        }
    }

    /// Exact line search on the segment `x + gamma d`, `gamma` in
    /// `[0, gamma_max]`: bisection on the directional derivative to 1e-12.
    fn line_search(&self, x: &DVector<f64>, d: &DVector<f64>, gamma_max: f64) -> f64 {
        let mu_d = self.mean.dot(d);
        let sx = &self.cov * x;
        let sd = &self.cov * d;
        let xx = sx.dot(x).max(0.0);
        let xd = sx.dot(d);
        let dd = sd.dot(d).max(0.0);
        let deriv = |g: f64| -> f64 {
            let q = (xx + 2.0 * g * xd + g * g * dd).max(0.0);
            let s = q.sqrt();
            if s < 1e-12 {
                -mu_d
            } else {
                -mu_d + self.kappa * (xd + g * dd) / s
            }
        };
        if deriv(0.0) >= 0.0 {
            return 0.0;
        }
        if deriv(gamma_max) <= 0.0 {
            return gamma_max;
        }
        let (mut lo, mut hi) = (0.0, gamma_max);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if deriv(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

const MAX_CG_ITERATIONS: usize = 2_000_000;
const WEIGHT_FLOOR: f64 = 1e-14;

/// Minimize the reduced worst-case objective over the polytope by the
/// conditional-gradient method with away steps. Terminates when the
/// Frank-Wolfe duality gap `grad^T (x - s)` drops to `tol`; the reported
/// gap certifies suboptimality of the returned allocation.
pub fn solve(
    polytope: &Polytope,
    mm: &MomentMatrixPair,
    set: &SpectrumSet,
    tol: f64,
) -> Result<RobustSolution, PortfolioError> {
    if polytope.dim() != mm.dim() {
        return Err(PortfolioError::DimensionMismatch {
            expected: polytope.dim(),
            got: mm.dim(),
        });
    }
    let kappa = kappa_of(set)?;
    let objective = ReducedObjective::new(mm, kappa);

    let start = polytope.minimize_linear(&vec![0.0; polytope.dim()])?;
    let mut vertices: Vec<DVector<f64>> = vec![DVector::from_column_slice(&start)];
    let mut weights: Vec<f64> = vec![1.0];
    let mut x = vertices[0].clone();
    let mut gap = f64::INFINITY;

    for iteration in 0..MAX_CG_ITERATIONS {
        let grad = objective.gradient(&x);
        let s = polytope.minimize_linear(grad.as_slice())?;
        let s = DVector::from_column_slice(&s);
        gap = grad.dot(&(&x - &s));
        if gap <= tol {
            let x_slice = x.as_slice().to_vec();
            let final_obj = robust_objective(&x_slice, mm, set).unwrap_or_else(|_| objective.value(&x));
            return Ok(RobustSolution {
                x: x_slice,
                objective: final_obj,
                kappa,
                gap: gap.max(0.0),
                iterations: iteration,
            });
        }

        // Away vertex: the active vertex the gradient most wants to leave.
        let (away_idx, _) = weights
            .iter()
            .enumerate()
            .map(|(i, _)| (i, grad.dot(&vertices[i])))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let away_gap = grad.dot(&vertices[away_idx]) - grad.dot(&x);

        let use_away = away_gap > gap && weights[away_idx] < 1.0 - 1e-12;
        if use_away {
            let alpha = weights[away_idx];
            let gamma_max = alpha / (1.0 - alpha);
            let d = &x - &vertices[away_idx];
            let gamma = objective.line_search(&x, &d, gamma_max);
            if gamma > 0.0 {
                for w in weights.iter_mut() {
                    *w *= 1.0 + gamma;
                }
                weights[away_idx] -= gamma;
                prune_and_rebuild(&mut vertices, &mut weights, &mut x);
                continue;
            }
            // Stalled away step: fall through to a regular step.
        }

        let d = &s - &x;
        let gamma = objective.line_search(&x, &d, 1.0);
        if gamma == 0.0 {
            // No descent left along the oracle direction; the gap estimate
            // is already certified, so report it.
            break;
        }
        for w in weights.iter_mut() {
            *w *= 1.0 - gamma;
        }
        match vertices
            .iter()
            .position(|v| same_vertex(v, &s))
        {
            Some(i) => weights[i] += gamma,
            None => {
                vertices.push(s);
                weights.push(gamma);
            }
        }
        prune_and_rebuild(&mut vertices, &mut weights, &mut x);
    }

    Err(PortfolioError::DidNotConverge {
        tol,
        gap,
        iterations: MAX_CG_ITERATIONS,
    })
}

fn same_vertex(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    a.iter()
        .zip(b.iter())
        .all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + x.abs()))
}

fn prune_and_rebuild(
    vertices: &mut Vec<DVector<f64>>,
    weights: &mut Vec<f64>,
    x: &mut DVector<f64>,
) {
    let mut i = 0;
    while i < weights.len() {
        if weights[i] <= WEIGHT_FLOOR {
            weights.swap_remove(i);
            vertices.swap_remove(i);
        } else {
            i += 1;
        }
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let mut acc = DVector::zeros(x.len());
    for (v, w) in vertices.iter().zip(weights.iter()) {
        acc += v * *w;
    }
    *x = acc;
}

const MAX_KELLEY_ITERATIONS: usize = 5_000;

/// Minimize the worst case over a polytopic moment set
/// `max_k [ -mu_k^T x + kappa sqrt(x^T Sigma_k x) ]` by Kelley cutting
/// planes: a master LP over `(x, t)` accumulates first-order cuts of every
/// vertex function at each trial allocation. The inner maximum is taken
/// over the supplied vertices. Stops when the incumbent value and the
/// master lower bound agree to `tol`.
pub fn solve_polytopic(
    polytope: &Polytope,
    moment_vertices: &[MomentMatrixPair],
    set: &SpectrumSet,
    tol: f64,
) -> Result<RobustSolution, PortfolioError> {
    if moment_vertices.is_empty() {
        return Err(PortfolioError::EmptyVertexSet);
    }
    for mv in moment_vertices {
        if mv.dim() != polytope.dim() {
            return Err(PortfolioError::DimensionMismatch {
                expected: polytope.dim(),
                got: mv.dim(),
            });
        }
    }
    let kappa = kappa_of(set)?;
    let pieces: Vec<ReducedObjective> = moment_vertices
        .iter()
        .map(|mv| ReducedObjective::new(mv, kappa))
        .collect();
    let n = polytope.dim();

    let eval_max = |x: &DVector<f64>| -> (f64, usize) {
        pieces
            .iter()
            .enumerate()
            .map(|(k, p)| (p.value(x), k))
            .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .map(|(v, k)| (v, k))
            .unwrap()
    };

    // Master LP template: variables (x, t), minimize t, t free.
    let mut master = {
        let mut obj = vec![0.0; n + 1];
        obj[n] = 1.0;
        let mut p = Problem::new(obj);
        p.lower = {
            let mut l = polytope.lower.clone();
            l.push(None);
            l
        };
        p.upper = {
            let mut u = polytope.upper.clone();
            u.push(None);
            u
        };
        for (row, rhs) in &polytope.ineq {
            let mut r = row.clone();
            r.push(0.0);
            p.push_le(r, *rhs);
        }
        for (row, rhs) in &polytope.eq {
            let mut r = row.clone();
            r.push(0.0);
            p.push_eq(r, *rhs);
        }
        p
    };

    let n_base_rows = polytope.ineq.len() + polytope.eq.len();
    let add_cuts = |master: &mut Problem, x: &DVector<f64>| {
        // t >= f_k(x0) + g_k(x0)^T (x - x0)  =>  g_k^T x - t <= g_k^T x0 - f_k(x0)
        for piece in &pieces {
            let g = piece.gradient(x);
            let f = piece.value(x);
            let mut row: Vec<f64> = g.iter().cloned().collect();
            row.push(-1.0);
            let rhs = g.dot(x) - f;
            // Identical moment vertices generate identical cuts; duplicates
            // only degrade the master numerically.
            let duplicate = master.rows[n_base_rows..].iter().any(|r| {
                (r.rhs - rhs).abs() <= 1e-14
                    && r.coeffs
                        .iter()
                        .zip(&row)
                        .all(|(a, b)| (a - b).abs() <= 1e-14)
            });
            if !duplicate {
                master.push_le(row, rhs);
            }
        }
    };

    let start = DVector::from_column_slice(&polytope.minimize_linear(&vec![0.0; n])?);
    let (mut upper, _) = eval_max(&start);
    let mut best_x = start.clone();
    add_cuts(&mut master, &start);

    for iteration in 1..=MAX_KELLEY_ITERATIONS {
        let sol = match master.solve() {
            Ok(s) => s,
            Err(LpError::Infeasible { .. }) => return Err(PortfolioError::InfeasiblePolytope),
            Err(e) => return Err(PortfolioError::Lp(e)),
        };
        let lower = sol.objective;
        let x = DVector::from_column_slice(&sol.x[..n]);
        let (fx, _) = eval_max(&x);
        if fx < upper {
            upper = fx;
            best_x = x.clone();
        }
        let gap = (upper - lower).max(0.0);
        if gap <= tol {
            return Ok(RobustSolution {
                x: best_x.as_slice().to_vec(),
                objective: upper,
                kappa,
                gap,
                iterations: iteration,
            });
        }
        add_cuts(&mut master, &x);
    }
    Err(PortfolioError::DidNotConverge {
        tol,
        gap: f64::INFINITY,
        iterations: MAX_KELLEY_ITERATIONS,
    })
}

/// Witness that the matrix form of the moment ball agrees with the reduced
/// objective at the inner maximizer, without an SDP solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurCertificate {
    /// Inner maximizer `r* = mu - kappa Sigma x / sqrt(x^T Sigma x)`.
    pub r_star: Vec<f64>,
    /// Minimum eigenvalue of the bordered block matrix at `r*`; zero up to
    /// rounding because `r*` saturates the ellipsoidal mean constraint.
    pub matrix_min_eig: f64,
    /// `| -r*^T x - (-mu^T x + kappa sqrt(x^T Sigma x)) |`.
    pub objective_match: f64,
}

/// Build the bordered matrix `[[Sigma, r - mu], [(r - mu)^T, kappa^2]]` at
/// the inner maximizer of `max_r -r^T x` over the moment ball and report its
/// minimum eigenvalue together with the objective agreement.
pub fn schur_certificate(
    x: &[f64],
    mm: &MomentMatrixPair,
    kappa: f64,
) -> Result<SchurCertificate, PortfolioError> {
    let n = mm.dim();
    let xv = allocation_vector(x, n)?;
    let sx = &mm.cov * &xv;
    let sd = sx.dot(&xv).max(0.0).sqrt();
    if sd <= 0.0 || kappa <= 0.0 {
        return Err(PortfolioError::DegenerateDirection);
    }
    let r_star = &mm.mean - &sx * (kappa / sd);
    let diff = &r_star - &mm.mean;

    let mut block = DMatrix::zeros(n + 1, n + 1);
    block.view_mut((0, 0), (n, n)).copy_from(&mm.cov);
    for i in 0..n {
        block[(i, n)] = diff[i];
        block[(n, i)] = diff[i];
    }
    block[(n, n)] = kappa * kappa;
    let min_eig = block
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);

    let reduced = -mm.mean.dot(&xv) + kappa * sd;
    let inner = -r_star.dot(&xv);
    Ok(SchurCertificate {
        r_star: r_star.as_slice().to_vec(),
        matrix_min_eig: min_eig,
        objective_match: (inner - reduced).abs(),
    })
}

/// One point of the robust efficient frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    pub epsilon: f64,
    pub kappa: f64,
    pub x: Vec<f64>,
    pub objective: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// Sweep the tail probability: solve at `kappa = sqrt((1 - eps)/eps)` for
/// each grid point. Objectives are non-increasing in `eps`.
pub fn frontier(
    polytope: &Polytope,
    mm: &MomentMatrixPair,
    epsilon_grid: &[f64],
    tol: f64,
) -> Result<Vec<FrontierPoint>, PortfolioError> {
    let mut points = Vec::with_capacity(epsilon_grid.len());
    for &eps in epsilon_grid {
        let spectrum = crate::spectra::Spectrum::cvar(eps)?;
        let set = SpectrumSet::singleton(spectrum)?;
        let sol = solve(polytope, mm, &set, tol)?;
        points.push(FrontierPoint {
            epsilon: eps,
            kappa: sol.kappa,
            x: sol.x,
            objective: sol.objective,
            gap: sol.gap,
            iterations: sol.iterations,
        });
    }
    Ok(points)
}
