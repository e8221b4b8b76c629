use crate::scalar::GaussianRational;
use crate::solver::{DerivationSpace, LeibnizSystem};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

/// Outcome of the floating-point cross-check of an exact solve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FloatCheck {
    /// Dimension from the exact nullspace.
    pub exact_dim: usize,
    /// Nullity estimated by partial-pivoting elimination in complex f64.
    pub float_nullity: usize,
    /// Largest relative residual of any exact basis matrix substituted into
    /// the floating-point system.
    pub max_residual: f64,
    /// True when the nullities agree and every residual is below `tolerance`.
    pub agrees: bool,
    /// Residual tolerance used for the verdict.
    pub tolerance: f64,
}

/// Relative residual threshold for accepting the exact basis numerically.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

fn to_c64(v: &GaussianRational) -> Complex64 {
    Complex64::new(
        v.re().to_f64().unwrap_or(f64::NAN),
        v.im().to_f64().unwrap_or(f64::NAN),
    )
}

/// Rank of a complex matrix by Gaussian elimination with partial pivoting,
/// using a scale-aware zero threshold.
fn float_rank(mut m: Vec<Vec<Complex64>>, rows: usize, cols: usize) -> usize {
    let max_entry = m.iter().flatten().map(|z| z.norm()).fold(0.0f64, f64::max);
    let tol = f64::EPSILON * (rows.max(cols) as f64) * max_entry.max(1.0);
    let mut rank = 0usize;
    for col in 0..cols {
        if rank >= rows {
            break;
        }
        let (best_row, best_mag) = (rank..rows)
            .map(|r| (r, m[r][col].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if best_mag <= tol {
            continue;
        }
        m.swap(rank, best_row);
        let pivot = m[rank][col];
        let (upper, lower) = m.split_at_mut(rank + 1);
        let pivot_row = &upper[rank];
        for row in lower.iter_mut() {
            let factor = row[col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            for (cell, p) in row.iter_mut().zip(pivot_row).skip(col) {
                *cell -= factor * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Runs the floating-point route over the same assembled system and compares
/// it with the exact solution.
pub fn float_check(system: &LeibnizSystem, space: &DerivationSpace) -> FloatCheck {
    let exact = system.matrix();
    let rows = exact.n_rows();
    let cols = exact.n_cols();
    let numeric: Vec<Vec<Complex64>> = (0..rows)
        .map(|r| exact.row(r).iter().map(to_c64).collect())
        .collect();

    let matrix_scale = numeric
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);

    let rank = float_rank(numeric.clone(), rows, cols);
    let float_nullity = cols - rank;

    let n = system.n();
    let mut max_residual = 0.0f64;
    for basis_matrix in space.basis() {
        let mut v = vec![Complex64::new(0.0, 0.0); cols];
        let mut v_scale = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                let z = to_c64(&basis_matrix[(p, q)]);
                v_scale = v_scale.max(z.norm());
                v[p * n + q] = z;
            }
        }
        for row in &numeric {
            let dot: Complex64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            let rel = dot.norm() / (matrix_scale.max(1.0) * v_scale.max(1.0));
            max_residual = max_residual.max(rel);
        }
    }

    let agrees = float_nullity == space.dim() && max_residual <= RESIDUAL_TOLERANCE;
    FloatCheck {
        exact_dim: space.dim(),
        float_nullity,
        max_residual,
        agrees,
        tolerance: RESIDUAL_TOLERANCE,
    }
}
