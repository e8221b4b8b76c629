use crate::error::{EvoderError, Result};
use crate::matrix::Matrix;
use crate::scalar::{GaussianRational, Scalar};
use serde::{Deserialize, Serialize};

/// Finite-dimensional evolution algebra over ℚ(i), presented by its
/// structure matrix: basis products satisfy `eᵢeⱼ = 0` for `i ≠ j` and
/// `eᵢeᵢ = Σⱼ A[i][j]·eⱼ` (row `i` lists the coordinates of `eᵢeᵢ`).
#[derive(Clone, PartialEq, Debug)]
pub struct EvolutionAlgebra {
    a: Matrix<GaussianRational>,
}

/// Expression of the unique dependent row of a rank-(n−1) structure matrix
/// as a combination of the remaining rows.
///
/// `perm` reorders the rows so that the first n−1 permuted rows are
/// independent and the last is the dependent one; `coeffs[j]` is the
/// coefficient of permuted row `j` in that combination:
/// `A[perm[n−1]] = Σⱼ coeffs[j] · A[perm[j]]`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct BVector {
    pub perm: Vec<usize>,
    pub coeffs: Vec<GaussianRational>,
}

impl EvolutionAlgebra {
    pub fn new(a: Matrix<GaussianRational>) -> Result<Self> {
        if a.n_rows() == 0 {
            return Err(EvoderError::EmptyMatrix);
        }
        if !a.is_square() {
            return Err(EvoderError::NonSquare {
                n: a.n_rows(),
                row: 0,
                len: a.n_cols(),
            });
        }
        Ok(Self { a })
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Result<Self> {
        let n = rows.len();
        for (idx, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(EvoderError::NonSquare {
                    n,
                    row: idx,
                    len: r.len(),
                });
            }
        }
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn dim(&self) -> usize {
        self.a.n_rows()
    }

    pub fn structure(&self) -> &Matrix<GaussianRational> {
        &self.a
    }

    /// Rank of the structure matrix = dimension of the product ideal E·E.
    pub fn rank(&self) -> usize {
        self.a.rank()
    }

    /// Product of two elements in coordinates.
    pub fn multiply(
        &self,
        x: &[GaussianRational],
        y: &[GaussianRational],
    ) -> Result<Vec<GaussianRational>> {
        multiply_in(&self.a, x, y)
    }

    /// Checks the Leibniz rule `d(uv) = d(u)v + u·d(v)` on all basis pairs,
    /// with products computed through [`multiply_in`]. `d` acts by rows:
    /// `d(eₚ) = Σ_q d[p][q]·e_q`.
    pub fn is_derivation(&self, d: &Matrix<GaussianRational>) -> Result<bool> {
        is_derivation_in(&self.a, d)
    }

    /// Expresses the dependent row of a rank-(n−1) structure matrix through
    /// the independent ones. Rows are scanned top to bottom, keeping each row
    /// that increases the rank; the single skipped row is the dependent one
    /// and is moved to the last position of `perm` (the kept rows stay in
    /// ascending order).
    pub fn normalize_dependent_row(&self) -> Result<BVector> {
        let n = self.dim();
        let rank = self.rank();
        if rank != n - 1 {
            return Err(EvoderError::RankMismatch {
                expected: n - 1,
                got: rank,
            });
        }
        let mut kept: Vec<usize> = Vec::new();
        let mut dependent: Option<usize> = None;
        let mut current: Vec<Vec<GaussianRational>> = Vec::new();
        for r in 0..n {
            let mut candidate = current.clone();
            candidate.push(self.a.row(r).to_vec());
            let m = Matrix::from_rows(candidate.clone())?;
            if m.rank() == current.len() + 1 {
                kept.push(r);
                current = candidate;
            } else {
                debug_assert!(dependent.is_none());
                dependent = Some(r);
            }
        }
        let z = dependent.expect("rank n-1 forces exactly one dependent row");
        let kernel = self.a.left_kernel();
        debug_assert_eq!(kernel.len(), 1);
        let c = &kernel[0];
        let cz_inv = c[z]
            .inv()
            .expect("dependent row has nonzero kernel coordinate");
        let mut perm = kept;
        perm.push(z);
        let coeffs = perm[..n - 1]
            .iter()
            .map(|&p| c[p].mul(&cz_inv).neg())
            .collect();
        Ok(BVector { perm, coeffs })
    }
}

/// Product of two coordinate vectors in the evolution algebra presented by
/// structure matrix `a` (entries in any scalar field):
/// `(x·y)ₖ = Σₚ xₚ·yₚ·a[p][k]`.
pub fn multiply_in<S: Scalar>(a: &Matrix<S>, x: &[S], y: &[S]) -> Result<Vec<S>> {
    let n = a.n_rows();
    if x.len() != n {
        return Err(EvoderError::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if y.len() != n {
        return Err(EvoderError::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let mut out = vec![S::zero(); n];
    for p in 0..n {
        let w = x[p].mul(&y[p]);
        if w.is_zero() {
            continue;
        }
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = slot.add(&w.mul(&a[(p, k)]));
        }
    }
    Ok(out)
}

/// Image of a coordinate vector under the linear map whose rows are basis
/// images: `result_q = Σₚ v[p]·d[p][q]`.
pub fn apply_linear<S: Scalar>(d: &Matrix<S>, v: &[S]) -> Result<Vec<S>> {
    if v.len() != d.n_rows() {
        return Err(EvoderError::DimensionMismatch {
            expected: d.n_rows(),
            got: v.len(),
        });
    }
    let mut out = vec![S::zero(); d.n_cols()];
    for (p, vp) in v.iter().enumerate() {
        if vp.is_zero() {
            continue;
        }
        for (q, slot) in out.iter_mut().enumerate() {
            *slot = slot.add(&vp.mul(&d[(p, q)]));
        }
    }
    Ok(out)
}

fn unit<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n];
    v[i] = S::one();
    v
}

/// Leibniz check over any scalar field; see [`EvolutionAlgebra::is_derivation`].
pub fn is_derivation_in<S: Scalar>(a: &Matrix<S>, d: &Matrix<S>) -> Result<bool> {
    let n = a.n_rows();
    if d.n_rows() != n || d.n_cols() != n {
        return Err(EvoderError::DimensionMismatch {
            expected: n,
            got: d.n_rows().max(d.n_cols()),
        });
    }
    for i in 0..n {
        for j in i..n {
            let ei = unit::<S>(n, i);
            let ej = unit::<S>(n, j);
            let product = multiply_in(a, &ei, &ej)?;
            let lhs = apply_linear(d, &product)?;
            let term1 = multiply_in(a, d.row(i), &ej)?;
            let term2 = multiply_in(a, &ei, d.row(j))?;
            for k in 0..n {
                let rhs = term1[k].add(&term2[k]);
                if lhs[k] != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Commutator `x·y − y·x` of two square matrices.
pub fn lie_bracket<S: Scalar>(x: &Matrix<S>, y: &Matrix<S>) -> Result<Matrix<S>> {
    let xy = x.mul_mat(y)?;
    let yx = y.mul_mat(x)?;
    xy.sub(&yx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as G;

    fn alg(rows: Vec<Vec<i64>>) -> EvolutionAlgebra {
        EvolutionAlgebra::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(G::from_int).collect())
                .collect(),
        )
        .unwrap()
    }

    fn mat(rows: Vec<Vec<i64>>) -> Matrix<G> {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(G::from_int).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn multiply_uses_rows_as_squares() {
        let e = alg(vec![vec![1, 2], vec![0, 3]]);
        // e₁·e₁ = e₁ + 2e₂.
        let p = e
            .multiply(&[G::one(), G::zero()], &[G::one(), G::zero()])
            .unwrap();
        assert_eq!(p, vec![G::from_int(1), G::from_int(2)]);
        // Distinct basis vectors multiply to zero.
        let p = e
            .multiply(&[G::one(), G::zero()], &[G::zero(), G::one()])
            .unwrap();
        assert!(p.iter().all(|v| v.is_zero()));
        // Bilinearity over mixed vectors: (e₁+e₂)² = e₁² + e₂².
        let ones = vec![G::one(), G::one()];
        let p = e.multiply(&ones, &ones).unwrap();
        assert_eq!(p, vec![G::from_int(1), G::from_int(5)]);
    }

    #[test]
    fn rank_counts_product_ideal_dimension() {
        assert_eq!(
            alg(vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, -1, 0]]).rank(),
            2
        );
        assert_eq!(alg(vec![vec![1, 0], vec![0, 1]]).rank(), 2);
        assert_eq!(alg(vec![vec![0]]).rank(), 0);
    }

    #[test]
    fn normalize_identity_permutation_case() {
        let e = alg(vec![vec![0, 1, 0], vec![1, 0, 1], vec![0, -1, 0]]);
        let b = e.normalize_dependent_row().unwrap();
        assert_eq!(b.perm, vec![0, 1, 2]);
        assert_eq!(b.coeffs, vec![G::from_int(-1), G::from_int(0)]);
    }

    #[test]
    fn normalize_moves_dependent_row_last() {
        let e = alg(vec![vec![1, 1, 0], vec![2, 2, 0], vec![0, 0, 1]]);
        let b = e.normalize_dependent_row().unwrap();
        assert_eq!(b.perm, vec![0, 2, 1]);
        assert_eq!(b.coeffs, vec![G::from_int(2), G::from_int(0)]);
        // Reconstruction: row perm[2] = Σ coeffs[j]·row perm[j].
        let a = e.structure();
        for k in 0..3 {
            let mut acc = G::zero();
            for j in 0..2 {
                acc = acc.add(&b.coeffs[j].mul(&a[(b.perm[j], k)]));
            }
            assert_eq!(acc, a[(b.perm[2], k)]);
        }
    }

    #[test]
    fn normalize_requires_rank_deficiency_one() {
        assert!(matches!(
            alg(vec![vec![1, 0], vec![0, 1]]).normalize_dependent_row(),
            Err(EvoderError::RankMismatch {
                expected: 1,
                got: 2
            })
        ));
    }

    #[test]
    fn derivation_check_on_known_instance() {
        // Structure [[1,0],[0,0]]: diag(0,1) is a derivation, identity is not.
        let e = alg(vec![vec![1, 0], vec![0, 0]]);
        assert!(e.is_derivation(&mat(vec![vec![0, 0], vec![0, 1]])).unwrap());
        assert!(!e.is_derivation(&mat(vec![vec![1, 0], vec![0, 1]])).unwrap());
        // The zero map is always a derivation.
        assert!(e.is_derivation(&Matrix::zeros(2, 2)).unwrap());
    }

    #[test]
    fn bracket_convention() {
        // [E₁₂, E₂₁] = diag(1, −1).
        let e12 = mat(vec![vec![0, 1], vec![0, 0]]);
        let e21 = mat(vec![vec![0, 0], vec![1, 0]]);
        let b = lie_bracket(&e12, &e21).unwrap();
        assert_eq!(b, mat(vec![vec![1, 0], vec![0, -1]]));
    }
}
