//! Adaptive Simpson quadrature used by the spectrum norms and the oracle.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not converge to relative tolerance {tol} within depth {max_depth}")]
    NonConvergence { tol: f64, max_depth: u32 },
}

const MAX_DEPTH: u32 = 60;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrate `f` over `[a, b]` to relative tolerance `rel_tol`, judged
/// against the refinement-doubling (Richardson) estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<f64, QuadError> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    // Coarse magnitude estimate sets the absolute tolerance scale.
    let scale = whole.abs().max(1e-12);
    let abs_tol = rel_tol * scale;
    recurse(&f, a, b, fa, fm, fb, whole, abs_tol, MAX_DEPTH).ok_or(QuadError::NonConvergence {
        tol: rel_tol,
        max_depth: MAX_DEPTH,
    })
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * abs_tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = recurse(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1)?;
    Some(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_exact() {
        let v = adaptive_simpson(|_| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn linear_is_exact() {
        let v = adaptive_simpson(|p| p, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn smooth_exponential() {
        let v = adaptive_simpson(|p| p.exp(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() <= 1e-10);
    }

    #[test]
    fn step_function_converges() {
        // Step of height 20 on [0.95, 1): slow but convergent splitting.
        let v = adaptive_simpson(|p| if p >= 0.95 { 400.0 } else { 0.0 }, 0.0, 1.0, 1e-9).unwrap();
        assert!((v - 20.0).abs() <= 20.0 * 1e-7, "got {v}");
    }
}
