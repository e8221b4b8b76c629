use crate::error::{EvoderError, Result};
use crate::scalar::Scalar;
use std::ops::{Index, IndexMut};

/// Dense row-major matrix over an exact scalar field.
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Row-reduced echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref<S> {
    pub reduced: Matrix<S>,
    pub pivot_cols: Vec<usize>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        for r in &rows {
            if r.len() != n_cols {
                return Err(EvoderError::DimensionMismatch {
                    expected: n_cols,
                    got: r.len(),
                });
            }
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    /// Converts entries into another scalar type.
    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(EvoderError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: rhs.rows * rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scale(&S::one().neg()))
    }

    pub fn scale(&self, k: &S) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.mul(k)).collect(),
        }
    }

    pub fn mul_mat(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(EvoderError::DimensionMismatch {
                expected: self.cols,
                got: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let term = a.mul(&rhs[(k, j)]);
                    out[(i, j)] = out[(i, j)].add(&term);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if self.cols != v.len() {
            return Err(EvoderError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, x)| acc.add(&a.mul(x)))
            })
            .collect())
    }

    /// Appends one extra column on the right.
    pub fn augment_col(&self, col: &[S]) -> Result<Self> {
        if col.len() != self.rows {
            return Err(EvoderError::DimensionMismatch {
                expected: self.rows,
                got: col.len(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + 1, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                col[r].clone()
            }
        }))
    }

    /// Exact Gauss–Jordan reduction to row-reduced echelon form.
    pub fn rref(&self) -> Rref<S> {
        let mut m = self.clone();
        let mut pivot_cols = Vec::new();
        let mut lead_row = 0usize;
        for col in 0..m.cols {
            if lead_row >= m.rows {
                break;
            }
            let Some(pivot_row) = (lead_row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(lead_row, pivot_row);
            let inv = m[(lead_row, col)]
                .inv()
                .expect("nonzero pivot must be invertible");
            for c in col..m.cols {
                m[(lead_row, c)] = m[(lead_row, c)].mul(&inv);
            }
            for r in 0..m.rows {
                if r == lead_row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in col..m.cols {
                    let delta = factor.mul(&m[(lead_row, c)]);
                    m[(r, c)] = m[(r, c)].sub(&delta);
                }
            }
            pivot_cols.push(col);
            lead_row += 1;
        }
        Rref {
            reduced: m,
            pivot_cols,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivot_cols.len()
    }

    /// Canonical basis of the right nullspace, one vector per free column in
    /// ascending order; each vector carries 1 in its free coordinate.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let Rref {
            reduced,
            pivot_cols,
        } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivot_cols {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![S::zero(); self.cols];
            v[free] = S::one();
            for (row, &p) in pivot_cols.iter().enumerate() {
                v[p] = reduced[(row, free)].neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Canonical basis of the left kernel: vectors c with c·A = 0.
    pub fn left_kernel(&self) -> Vec<Vec<S>> {
        self.transpose().nullspace()
    }

    /// Conjugates a square matrix by the permutation taking position `p` to
    /// original index `perm[p]`: the result holds `self[perm[p]][perm[q]]`
    /// at `(p, q)`.
    pub fn permute_conjugate(&self, perm: &[usize]) -> Result<Self> {
        if !self.is_square() {
            return Err(EvoderError::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        if perm.len() != self.rows || !is_permutation(perm) {
            return Err(EvoderError::InvalidParameter(format!(
                "not a permutation of 0..{}: {:?}",
                self.rows, perm
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols, |p, q| {
            self[(perm[p], perm[q])].clone()
        }))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// True iff `perm` is a permutation of `0..perm.len()`.
pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

/// Inverse permutation: `inv[perm[p]] = p`.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; perm.len()];
    for (p, &q) in perm.iter().enumerate() {
        inv[q] = p;
    }
    inv
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational;

    fn m(rows: Vec<Vec<i64>>) -> Matrix<GaussianRational> {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(GaussianRational::from_int).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(m(vec![vec![1, 0], vec![0, 1]]).rank(), 2);
        assert_eq!(m(vec![vec![1, 2], vec![2, 4]]).rank(), 1);
        assert_eq!(m(vec![vec![0, 0], vec![0, 0]]).rank(), 0);
        assert_eq!(
            m(vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, -1, 0]]).rank(),
            2
        );
    }

    #[test]
    fn nullspace_canonical_basis() {
        // x + 2y = 0 ⇒ basis vector (-2, 1).
        let basis = m(vec![vec![1, 2]]).nullspace();
        assert_eq!(
            basis,
            vec![vec![
                GaussianRational::from_int(-2),
                GaussianRational::from_int(1)
            ]]
        );
        // Zero map: identity basis.
        let basis = m(vec![vec![0, 0], vec![0, 0]]).nullspace();
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0][0], GaussianRational::from_int(1));
        assert_eq!(basis[1][1], GaussianRational::from_int(1));
    }

    #[test]
    fn left_kernel_detects_row_dependence() {
        // Row 3 = -row 1.
        let a = m(vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, -1, 0]]);
        let kernel = a.left_kernel();
        assert_eq!(kernel.len(), 1);
        let c = &kernel[0];
        // c·A = 0.
        let combo = a.transpose().mul_vec(c).unwrap();
        assert!(combo.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn conjugation_by_permutation_relabels_indices() {
        let a = m(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        let p = a.permute_conjugate(&[1, 2, 0]).unwrap();
        assert_eq!(p[(0, 0)], GaussianRational::from_int(5));
        assert_eq!(p[(0, 1)], GaussianRational::from_int(6));
        assert_eq!(p[(2, 2)], GaussianRational::from_int(1));
        // Conjugating by the inverse permutation restores the original.
        let back = p
            .permute_conjugate(&invert_permutation(&[1, 2, 0]))
            .unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn multiplication_shapes_and_values() {
        let a = m(vec![vec![1, 2], vec![3, 4]]);
        let b = m(vec![vec![0, 1], vec![1, 0]]);
        let ab = a.mul_mat(&b).unwrap();
        assert_eq!(ab, m(vec![vec![2, 1], vec![4, 3]]));
        assert!(a.mul_mat(&m(vec![vec![1, 2, 3]])).is_err());
    }
}
