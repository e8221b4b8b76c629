use crate::algebra::EvolutionAlgebra;
use crate::matrix::Matrix;
use crate::scalar::{GaussianRational, Scalar};

/// The linear system whose solutions are exactly the derivation matrices.
///
/// Unknowns are the n² entries `d[p][q]` in row-major order (column index
/// `p·n + q`). Applying the Leibniz rule `d(uv) = d(u)v + u·d(v)` to basis
/// pairs of an evolution algebra yields, for each pair `i < j` and
/// coordinate `k`, the off-diagonal equation
///
/// > `a[j][k]·d[i][j] + a[i][k]·d[j][i] = 0`
///
/// and for each basis index `i` and coordinate `k` the diagonal equation
///
/// > `Σₚ a[i][p]·d[p][k] − 2·a[i][k]·d[i][i] = 0`.
///
/// Rows are emitted pairs-first in lexicographic `(i, j, k)` order, then the
/// diagonal block in `(i, k)` order; overlapping unknown references within
/// one equation accumulate additively.
#[derive(Clone, Debug)]
pub struct LeibnizSystem {
    n: usize,
    matrix: Matrix<GaussianRational>,
}

/// The space of derivations of one algebra: a canonical basis of n×n
/// matrices (each basis vector of the system nullspace, reshaped row-major).
#[derive(Clone, Debug)]
pub struct DerivationSpace {
    n: usize,
    basis: Vec<Matrix<GaussianRational>>,
}

/// Builds the Leibniz constraint system for an algebra.
pub fn assemble(algebra: &EvolutionAlgebra) -> LeibnizSystem {
    let n = algebra.dim();
    let a = algebra.structure();
    let n_pair_rows = n * (n * (n - 1) / 2);
    let mut matrix: Matrix<GaussianRational> = Matrix::zeros(n_pair_rows + n * n, n * n);
    let mut row = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let col_ij = i * n + j;
                let col_ji = j * n + i;
                matrix[(row, col_ij)] = matrix[(row, col_ij)].add(&a[(j, k)]);
                matrix[(row, col_ji)] = matrix[(row, col_ji)].add(&a[(i, k)]);
                row += 1;
            }
        }
    }
    let two = GaussianRational::from_int(2);
    for i in 0..n {
        for k in 0..n {
            for p in 0..n {
                let col = p * n + k;
                matrix[(row, col)] = matrix[(row, col)].add(&a[(i, p)]);
            }
            let col_ii = i * n + i;
            let correction = two.mul(&a[(i, k)]).neg();
            matrix[(row, col_ii)] = matrix[(row, col_ii)].add(&correction);
            row += 1;
        }
    }
    debug_assert_eq!(row, matrix.n_rows());
    LeibnizSystem { n, matrix }
}

impl LeibnizSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix<GaussianRational> {
        &self.matrix
    }

    /// Solves the system exactly; the canonical nullspace basis reshapes into
    /// the derivation basis.
    pub fn nullspace(&self) -> DerivationSpace {
        let n = self.n;
        let basis = self
            .matrix
            .nullspace()
            .into_iter()
            .map(|flat| Matrix::from_fn(n, n, |p, q| flat[p * n + q].clone()))
            .collect();
        DerivationSpace { n, basis }
    }
}

impl DerivationSpace {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix<GaussianRational>] {
        &self.basis
    }

    /// Checks that a matrix lies in the span of the basis by rank comparison.
    pub fn contains(&self, d: &Matrix<GaussianRational>) -> bool {
        if d.n_rows() != self.n || d.n_cols() != self.n {
            return false;
        }
        let flat = |m: &Matrix<GaussianRational>| -> Vec<GaussianRational> {
            let mut v = Vec::with_capacity(self.n * self.n);
            for r in 0..self.n {
                v.extend_from_slice(m.row(r));
            }
            v
        };
        let mut rows: Vec<Vec<GaussianRational>> = self.basis.iter().map(&flat).collect();
        let base_rank = Matrix::from_rows(rows.clone()).map_or(0, |m| m.rank());
        rows.push(flat(d));
        let extended_rank = Matrix::from_rows(rows).map(|m| m.rank()).unwrap_or(0);
        base_rank == extended_rank
    }
}

/// Convenience: assemble and solve in one step.
pub fn derivations(algebra: &EvolutionAlgebra) -> DerivationSpace {
    assemble(algebra).nullspace()
}
