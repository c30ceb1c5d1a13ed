//! Dense linear solves with residual certification.
//!
//! Every solve in the crate goes through [`solve_checked`], which factors the
//! system with LU, applies one round of iterative refinement if needed, and
//! refuses to return an answer whose infinity-norm residual exceeds the
//! caller's tolerance. Problem sizes here are at most a few hundred states,
//! where a dense factorization is the simplest correct choice.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

fn residual_inf(a: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let r = a * x - b;
    r.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Solve `a * x = b`, guaranteeing `||a*x - b||_inf <= tol`.
pub fn solve_checked(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64, context: &str) -> Result<DVector<f64>> {
    let lu = a.clone().lu();
    let mut x = lu
        .solve(b)
        .ok_or_else(|| Error::numerical(format!("{context}: singular system")))?;
    let mut res = residual_inf(a, &x, b);
    // One refinement pass recovers the last digits when accumulation is unlucky.
    if res > tol {
        let r = b - a * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
            res = residual_inf(a, &x, b);
        }
    }
    if res > tol {
        return Err(Error::numerical(format!(
            "{context}: residual {res:.3e} exceeds tolerance {tol:.1e}"
        )));
    }
    Ok(x)
}
