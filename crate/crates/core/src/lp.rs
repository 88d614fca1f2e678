//! Dense two-phase primal simplex for desk-scale linear programs.
//!
//! Minimizes `c^T x` subject to `<=` / `=` rows and per-variable bounds.
//! Bland's rule is used for both the entering and leaving choices, so the
//! method cannot cycle; determinism matters more than pivot counts at the
//! problem sizes this workspace needs (a handful of constraints, up to a
//! few thousand variables in the moment-problem oracle).

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOp {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub op: RowOp,
    pub rhs: f64,
}

/// A linear program in the original variable space.
#[derive(Debug, Clone)]
pub struct Problem {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// Per-variable lower bounds; `None` means unbounded below.
    pub lower: Vec<Option<f64>>,
    /// Per-variable upper bounds; `None` means unbounded above.
    pub upper: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("problem is infeasible (phase-1 residual {residual:.3e})")]
    Infeasible { residual: f64 },
    #[error("objective is unbounded below on the feasible set")]
    Unbounded,
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("row or bound dimension does not match variable count")]
    DimensionMismatch,
    #[error("variable {index} has lower bound {lower} above upper bound {upper}")]
    EmptyBound { index: usize, lower: f64, upper: f64 },
}

const PIVOT_TOL: f64 = 1e-9;
const REDUCED_COST_TOL: f64 = 1e-9;
/// A column with no leaving row only proves unboundedness if its reduced
/// cost is solidly negative; anything closer to zero is tableau round-off
/// on degenerate problems and the column is dropped instead.
const UNBOUNDED_TOL: f64 = 1e-7;
const MAX_PIVOTS: usize = 200_000;

impl Problem {
    /// Fresh problem over free variables with objective `c`.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Problem {
            objective,
            rows: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    /// Fresh problem with all variables bounded below by zero.
    pub fn with_nonneg(objective: Vec<f64>) -> Self {
        let n = objective.len();
        let mut p = Problem::new(objective);
        p.lower = vec![Some(0.0); n];
        p
    }

    pub fn push_le(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.rows.push(Row {
            coeffs,
            op: RowOp::Le,
            rhs,
        });
    }

    pub fn push_eq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.rows.push(Row {
            coeffs,
            op: RowOp::Eq,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, index: usize, lower: Option<f64>, upper: Option<f64>) {
        self.lower[index] = lower;
        self.upper[index] = upper;
    }

    pub fn solve(&self) -> Result<Solution, LpError> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::DimensionMismatch);
        }
        for row in &self.rows {
            if row.coeffs.len() != n {
                return Err(LpError::DimensionMismatch);
            }
        }

        // Map each original variable to non-negative standard-form variables:
        // x = shift + sum of signed y terms.
        let mut terms: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut shifts: Vec<f64> = Vec::with_capacity(n);
        let mut bound_rows: Vec<(usize, f64)> = Vec::new(); // y_k <= cap
        let mut ny = 0;
        for j in 0..n {
            match (self.lower[j], self.upper[j]) {
                (Some(l), up) => {
                    if let Some(u) = up {
                        if u < l {
                            return Err(LpError::EmptyBound {
                                index: j,
                                lower: l,
                                upper: u,
                            });
                        }
                        bound_rows.push((ny, u - l));
                    }
                    terms.push(vec![(ny, 1.0)]);
                    shifts.push(l);
                    ny += 1;
                }
                (None, Some(u)) => {
                    // x = u - y
                    terms.push(vec![(ny, -1.0)]);
                    shifts.push(u);
                    ny += 1;
                }
                (None, None) => {
                    terms.push(vec![(ny, 1.0), (ny + 1, -1.0)]);
                    shifts.push(0.0);
                    ny += 2;
                }
            }
        }

        let m = self.rows.len() + bound_rows.len();
        let n_slack = self
            .rows
            .iter()
            .filter(|r| r.op == RowOp::Le)
            .count()
            + bound_rows.len();
        let total = ny + n_slack + m; // structural + slacks + artificials
        let art_start = ny + n_slack;

        let mut a = vec![vec![0.0; total]; m];
        let mut b = vec![0.0; m];
        let mut slack_cursor = ny;
        let mut r = 0;
        for row in &self.rows {
            let mut rhs = row.rhs;
            for (j, &cj) in row.coeffs.iter().enumerate() {
                if cj == 0.0 {
                    continue;
                }
                rhs -= cj * shifts[j];
                for &(y, s) in &terms[j] {
                    a[r][y] += cj * s;
                }
            }
            if row.op == RowOp::Le {
                a[r][slack_cursor] = 1.0;
                slack_cursor += 1;
            }
            b[r] = rhs;
            r += 1;
        }
        for &(y, cap) in &bound_rows {
            a[r][y] = 1.0;
            a[r][slack_cursor] = 1.0;
            slack_cursor += 1;
            b[r] = cap;
            r += 1;
        }

        // Phase-1 starting basis wants b >= 0.
        for i in 0..m {
            if b[i] < 0.0 {
                for v in a[i].iter_mut() {
                    *v = -*v;
                }
                b[i] = -b[i];
            }
            a[i][art_start + i] = 1.0;
        }

        // Objective in y space.
        let mut cost = vec![0.0; total];
        let mut obj_shift = 0.0;
        for (j, &cj) in self.objective.iter().enumerate() {
            obj_shift += cj * shifts[j];
            for &(y, s) in &terms[j] {
                cost[y] += cj * s;
            }
        }

        let mut tab = Tableau {
            a,
            b,
            basis: (0..m).map(|i| art_start + i).collect(),
            red1: vec![0.0; total],
            red2: cost.clone(),
            z1: 0.0,
            z2: 0.0,
            art_start,
            pivots: 0,
            banned: vec![false; total],
        };
        // Phase-1 reduced costs: c_art = 1 on an artificial basis.
        for j in 0..total {
            let mut s = 0.0;
            for i in 0..m {
                s += tab.a[i][j];
            }
            tab.red1[j] = if j >= art_start { 1.0 } else { 0.0 } - s;
        }
        // Artificial columns start in the basis, so their reduced cost is 0.
        for i in 0..m {
            tab.red1[art_start + i] = 0.0;
        }
        tab.z1 = tab.b.iter().sum();

        let feas_tol = 1e-7 * (1.0 + tab.b.iter().cloned().fold(0.0, f64::max));
        tab.run(Phase::One)?;
        if tab.z1 > feas_tol {
            return Err(LpError::Infeasible { residual: tab.z1 });
        }
        tab.evict_artificials();
        tab.run(Phase::Two)?;

        // Recover x.
        let mut y = vec![0.0; total];
        for (i, &bv) in tab.basis.iter().enumerate() {
            y[bv] = tab.b[i];
        }
        let mut x = vec![0.0; n];
        for j in 0..n {
            let mut v = shifts[j];
            for &(k, s) in &terms[j] {
                v += s * y[k];
            }
            x[j] = v;
        }
        let objective: f64 = self
            .objective
            .iter()
            .zip(&x)
            .map(|(c, v)| c * v)
            .sum();
        let _ = obj_shift;
        Ok(Solution { x, objective })
    }
}

enum Phase {
    One,
    Two,
}

struct Tableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    red1: Vec<f64>,
    red2: Vec<f64>,
    z1: f64,
    z2: f64,
    art_start: usize,
    pivots: usize,
    banned: Vec<bool>,
}

impl Tableau {
    fn run(&mut self, phase: Phase) -> Result<(), LpError> {
        for b in self.banned.iter_mut() {
            *b = false;
        }
        loop {
            let red: &Vec<f64> = match phase {
                Phase::One => &self.red1,
                Phase::Two => &self.red2,
            };
            // Bland: lowest-index improving column. Artificials may never
            // re-enter once phase 1 is done.
            let limit = match phase {
                Phase::One => red.len(),
                Phase::Two => self.art_start,
            };
            let entering =
                (0..limit).find(|&j| !self.banned[j] && red[j] < -REDUCED_COST_TOL);
            let entering = match entering {
                Some(j) => j,
                None => return Ok(()),
            };
            match self.ratio_test(entering) {
                Some(leaving) => self.pivot(leaving, entering)?,
                None => {
                    // Phase-1 objectives are bounded below by zero, so a
                    // missing leaving row there is always round-off.
                    let noise = matches!(phase, Phase::One)
                        || red[entering] >= -UNBOUNDED_TOL;
                    if noise {
                        self.banned[entering] = true;
                    } else {
                        return Err(LpError::Unbounded);
                    }
                }
            }
        }
    }

    fn ratio_test(&self, col: usize) -> Option<usize> {
        let mut best: Option<(f64, usize, usize)> = None; // (ratio, basis var, row)
        for i in 0..self.b.len() {
            let coef = self.a[i][col];
            if coef > PIVOT_TOL {
                let ratio = self.b[i] / coef;
                let key = (ratio, self.basis[i]);
                match best {
                    None => best = Some((key.0, key.1, i)),
                    Some((r, bv, _)) => {
                        if ratio < r - PIVOT_TOL || (ratio < r + PIVOT_TOL && key.1 < bv) {
                            best = Some((key.0, key.1, i));
                        }
                    }
                }
            }
        }
        best.map(|(_, _, i)| i)
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<(), LpError> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(LpError::IterationLimit);
        }
        let piv = self.a[row][col];
        let inv = 1.0 / piv;
        for v in self.a[row].iter_mut() {
            *v *= inv;
        }
        self.b[row] *= inv;
        for i in 0..self.b.len() {
            if i == row {
                continue;
            }
            let f = self.a[i][col];
            if f != 0.0 {
                let (pr, cr) = split_rows(&mut self.a, row, i);
                for (dst, src) in cr.iter_mut().zip(pr.iter()) {
                    *dst -= f * src;
                }
                self.b[i] -= f * self.b[row];
            }
        }
        let f1 = self.red1[col];
        if f1 != 0.0 {
            for (dst, src) in self.red1.iter_mut().zip(self.a[row].iter()) {
                *dst -= f1 * src;
            }
            self.z1 += f1 * self.b[row];
        }
        let f2 = self.red2[col];
        if f2 != 0.0 {
            for (dst, src) in self.red2.iter_mut().zip(self.a[row].iter()) {
                *dst -= f2 * src;
            }
            self.z2 += f2 * self.b[row];
        }
        self.basis[row] = col;
        Ok(())
    }

    /// After phase 1, pivot surviving artificials out of the basis where
    /// possible; rows that admit no pivot are redundant and stay put with
    /// the artificial frozen at zero.
    fn evict_artificials(&mut self) {
        for row in 0..self.b.len() {
            if self.basis[row] < self.art_start {
                continue;
            }
            if let Some(col) = (0..self.art_start).find(|&j| self.a[row][j].abs() > PIVOT_TOL) {
                // Degenerate pivot: b[row] is zero after a successful phase 1.
                let _ = self.pivot(row, col);
            }
        }
    }
}

/// Borrow the pivot row immutably and another row mutably.
fn split_rows(a: &mut [Vec<f64>], pivot: usize, other: usize) -> (&[f64], &mut [f64]) {
    debug_assert_ne!(pivot, other);
    if pivot < other {
        let (lo, hi) = a.split_at_mut(other);
        (&lo[pivot], &mut hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(pivot);
        (&hi[0], &mut lo[other])
    }
}
