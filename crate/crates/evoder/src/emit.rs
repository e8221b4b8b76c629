use crate::algebra::{is_derivation_in, EvolutionAlgebra};
use crate::classify::{to_input_coordinates, validate_against, ClassificationResult, Tag};
use crate::error::{EvoderError, Result};
use crate::matrix::Matrix;
use crate::scalar::{pow2, GaussianRational, QuadExtScalar, Rational, Scalar};
use serde::{Deserialize, Serialize};

/// A finite generating set for the derivation space of a classified algebra,
/// written in the input basis. Entries live in the Gaussian rationals or in a
/// quadratic extension of them by one square root.
#[derive(Clone, Debug)]
pub struct ClosedFormFamily {
    pub generators: Vec<Matrix<QuadExtScalar>>,
    pub free_parameter_description: String,
    /// When the family is a pair of generators indexed by the two square
    /// roots of this radicand, the radicand; `None` otherwise.
    pub pair_radicand: Option<GaussianRational>,
}

/// Outcome of checking an emitted family against the exact solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Per generator: does it satisfy the derivation identity exactly?
    pub generator_is_derivation: Vec<bool>,
    pub all_generators_derive: bool,
    /// Dimension of the span of the rationalized generators.
    pub rationalized_span_dim: usize,
    /// Dimension computed by the nullspace solver.
    pub solver_dim: usize,
    /// Whether the two spans coincide.
    pub span_matches: bool,
}

fn qe(g: GaussianRational) -> QuadExtScalar {
    QuadExtScalar::from_gaussian(g)
}

fn g_int(v: i64) -> GaussianRational {
    GaussianRational::from_int(v)
}

/// 2^e as an exact Gaussian rational, for any sign of e.
fn g_pow2(e: i64) -> GaussianRational {
    let mag = pow2(e.unsigned_abs() as u32);
    if e >= 0 {
        GaussianRational::from_rational(mag)
    } else {
        GaussianRational::from_rational(Rational::new(1.into(), 1.into()) / mag)
    }
}

/// 2^e − 1 as an exact Gaussian rational (e ≥ 1).
fn g_pow2_minus_one(e: i64) -> GaussianRational {
    g_pow2(e).sub(&g_int(1))
}

/// Solves M·y = rhs for square nonsingular M.
fn solve_square(
    m: &Matrix<GaussianRational>,
    rhs: &[GaussianRational],
) -> Result<Vec<GaussianRational>> {
    let k = m.n_rows();
    if k == 0 {
        return Ok(Vec::new());
    }
    let reduced = m.augment_col(rhs)?.rref();
    if reduced.pivot_cols.len() != k || reduced.pivot_cols.iter().enumerate().any(|(i, &c)| c != i)
    {
        return Err(EvoderError::RankMismatch {
            expected: k,
            got: reduced.pivot_cols.iter().filter(|&&c| c < k).count(),
        });
    }
    Ok((0..k).map(|i| reduced.reduced[(i, k)].clone()).collect())
}

/// Canonical square root of −b: exact in the Gaussian rationals when
/// possible, otherwise a formal radical.
fn sqrt_minus_b(b: &GaussianRational) -> QuadExtScalar {
    QuadExtScalar::sqrt_of(b.neg())
}

/// Generator for the one-feeding-row pattern: the free scalar d[1][n] is set
/// to 1, corners d[n][1] = −b, diagonal d[1][1] = delta/(2^(n−s) − 1) with
/// doubling steps 2^(p−s) down the tail, and d[n][n] = d[1][1].
fn feeding_row_generator(
    n: usize,
    s: usize,
    b: &GaussianRational,
    delta: &QuadExtScalar,
) -> Result<Matrix<QuadExtScalar>> {
    let mut d = Matrix::zeros(n, n);
    let d11 = delta.checked_div(&qe(g_pow2_minus_one((n - s) as i64)))?;
    d[(0, 0)] = d11.clone();
    for p1 in s + 1..=n - 1 {
        d[(p1 - 1, p1 - 1)] = d11.checked_mul(&qe(g_pow2((p1 - s) as i64)))?;
    }
    d[(n - 1, n - 1)] = d11;
    d[(0, n - 1)] = qe(g_int(1));
    d[(n - 1, 0)] = qe(b.neg());
    Ok(d)
}

/// Generator for the two-corner-row pattern: d[1][n] = 1, d[n][1] = −b,
/// d[1][1] = delta/(2^(m−k+1) − 1), halving steps 2^(p−k)(1 − 2^(m−k)) on
/// rows 2..k, doubling steps 2^(p−k) on rows k+1..m, zero diagonal after m,
/// and d[n][n] = d[1][1].
fn two_corner_generator(
    n: usize,
    k: usize,
    m: usize,
    b: &GaussianRational,
    delta: &QuadExtScalar,
) -> Result<Matrix<QuadExtScalar>> {
    let mut d = Matrix::zeros(n, n);
    let d11 = delta.checked_div(&qe(g_pow2_minus_one((m - k + 1) as i64)))?;
    d[(0, 0)] = d11.clone();
    let deficit = g_int(1).sub(&g_pow2((m - k) as i64));
    for p1 in 2..=k {
        let scale = g_pow2(p1 as i64 - k as i64).mul(&deficit);
        d[(p1 - 1, p1 - 1)] = d11.checked_mul(&qe(scale))?;
    }
    for p1 in k + 1..=m {
        d[(p1 - 1, p1 - 1)] = d11.checked_mul(&qe(g_pow2((p1 - k) as i64)))?;
    }
    d[(n - 1, n - 1)] = d11;
    d[(0, n - 1)] = qe(g_int(1));
    d[(n - 1, 0)] = qe(b.neg());
    Ok(d)
}

/// Generator for the corners-on-row-1 pattern: d[1][n] = 1, d[n][1] = −b,
/// d[1][1] = delta, halving steps d[p][p] = delta/2^(n−1−p) on the chain
/// tail, and d[n][n] = delta.
fn corner_row_generator(
    n: usize,
    s: usize,
    b: &GaussianRational,
    delta: &QuadExtScalar,
) -> Result<Matrix<QuadExtScalar>> {
    let mut d = Matrix::zeros(n, n);
    d[(0, 0)] = delta.clone();
    for p1 in s + 1..=n - 1 {
        d[(p1 - 1, p1 - 1)] = delta.checked_mul(&qe(g_pow2(p1 as i64 - (n as i64 - 1))))?;
    }
    d[(n - 1, n - 1)] = delta.clone();
    d[(0, n - 1)] = qe(g_int(1));
    d[(n - 1, 0)] = qe(b.neg());
    Ok(d)
}

/// Builds the closed-form derivation family for a classified algebra, in the
/// input basis. The classification is re-validated first; a stale or foreign
/// result yields `PatternMismatch`.
///
/// Families without derivations (`NonsingularZero`, `RankN1TwoNonzeroB`,
/// `GenericRankDeficient`) emit no generators. Free parameters are fixed to
/// 1; patterns whose derivations exist only for the two square roots of −b
/// emit one generator per root.
pub fn emit_closed_forms(
    res: &ClassificationResult,
    e: &EvolutionAlgebra,
) -> Result<ClosedFormFamily> {
    validate_against(res, e)?;
    let n = e.dim();
    let canon = e.structure().permute_conjugate(&res.perm)?;
    let missing = |what: &str| {
        EvoderError::PatternMismatch(format!("{:?} classification lacks {what}", res.tag))
    };

    let (canonical_gens, description, pair_radicand): (Vec<Matrix<QuadExtScalar>>, String, _) =
        match res.tag {
            Tag::NonsingularZero | Tag::RankN1TwoNonzeroB | Tag::GenericRankDeficient => (
                Vec::new(),
                "none (the derivation space of this class has no closed-form generators)"
                    .to_string(),
                None,
            ),
            Tag::FormA1 => {
                let s = res.params.s.ok_or_else(|| missing("s"))?;
                let b = res.params.b.clone().ok_or_else(|| missing("b"))?;
                let root = sqrt_minus_b(&b);
                let gens = vec![
                    feeding_row_generator(n, s, &b, &root)?,
                    feeding_row_generator(n, s, &b, &root.neg())?,
                ];
                (
                    gens,
                    "d[1][n] scaled to 1; one generator per square root of -b".to_string(),
                    Some(b.neg()),
                )
            }
            Tag::FormA2 => {
                let k = res.params.k.ok_or_else(|| missing("k"))?;
                let m = res.params.m.ok_or_else(|| missing("m"))?;
                let b = res.params.b.clone().ok_or_else(|| missing("b"))?;
                let root = sqrt_minus_b(&b);
                let gens = vec![
                    two_corner_generator(n, k, m, &b, &root)?,
                    two_corner_generator(n, k, m, &b, &root.neg())?,
                ];
                (
                    gens,
                    "d[1][n] scaled to 1; one generator per square root of -b".to_string(),
                    Some(b.neg()),
                )
            }
            Tag::FormA3 => {
                let s = res.params.s.ok_or_else(|| missing("s"))?;
                let b = res.params.b.clone().ok_or_else(|| missing("b"))?;
                let root = sqrt_minus_b(&b);
                let gens = vec![
                    corner_row_generator(n, s, &b, &root)?,
                    corner_row_generator(n, s, &b, &root.neg())?,
                ];
                (
                    gens,
                    "d[1][n] scaled to 1; one generator per square root of -b".to_string(),
                    Some(b.neg()),
                )
            }
            Tag::FormA4 => {
                let witness = res
                    .params
                    .witness
                    .clone()
                    .ok_or_else(|| missing("witness"))?;
                let mut d = Matrix::zeros(n, n);
                for (i, w) in witness.iter().enumerate() {
                    d[(i, n - 1)] = qe(w.clone());
                }
                (
                    vec![d],
                    "scale of the kernel witness in the last column".to_string(),
                    None,
                )
            }
            Tag::FormA5 => {
                let k = res.params.k.ok_or_else(|| missing("k"))?;
                if k + 1 == n {
                    // Invertible principal block: one generator, supported on
                    // the last column with d[n][n] = 1.
                    let block = Matrix::from_fn(n - 1, n - 1, |r, c| canon[(r, c)].clone());
                    let rhs: Vec<GaussianRational> =
                        (0..n - 1).map(|r| canon[(r, n - 1)].neg()).collect();
                    let y = solve_square(&block, &rhs)?;
                    let mut d = Matrix::zeros(n, n);
                    for (i, v) in y.into_iter().enumerate() {
                        d[(i, n - 1)] = qe(v);
                    }
                    d[(n - 1, n - 1)] = qe(g_int(1));
                    (vec![d], "d[n][n] scaled to 1".to_string(), None)
                } else {
                    // Block plus chain: one generator with d[n][n] = 1 and
                    // one with d[k+1][n] = 1.
                    let mut d = Matrix::zeros(n, n);
                    d[(n - 1, n - 1)] = qe(g_int(1));
                    for p1 in k + 1..=n - 1 {
                        d[(p1 - 1, p1 - 1)] = qe(g_pow2(p1 as i64 - n as i64));
                    }
                    for i1 in k + 1..=n.saturating_sub(2) {
                        // Chain feed: d[i+1][n] from row i's superdiagonal
                        // and last-column entries.
                        let ratio = canon[(i1 - 1, n - 1)].checked_div(&canon[(i1 - 1, i1)])?;
                        let weight = g_pow2(-((n as i64) - (i1 as i64) - 1)).sub(&g_int(1));
                        d[(i1, n - 1)] = qe(ratio.mul(&weight));
                    }
                    if k > 0 {
                        let block = Matrix::from_fn(k, k, |r, c| canon[(r, c)].clone());
                        let rhs: Vec<GaussianRational> =
                            (0..k).map(|r| canon[(r, n - 1)].neg()).collect();
                        let y = solve_square(&block, &rhs)?;
                        for (i, v) in y.into_iter().enumerate() {
                            d[(i, n - 1)] = qe(v);
                        }
                    }
                    let mut d2 = Matrix::zeros(n, n);
                    d2[(k, n - 1)] = qe(g_int(1));
                    (
                        vec![d, d2],
                        "d[n][n] scaled to 1 (first generator); d[k+1][n] scaled to 1 (second)"
                            .to_string(),
                        None,
                    )
                }
            }
            Tag::TriangularEk => {
                let k = res.params.k.ok_or_else(|| missing("k"))?;
                let mut gens = Vec::with_capacity((n - k) * (n - k));
                for p in k..n {
                    for q in k..n {
                        let mut d = Matrix::zeros(n, n);
                        d[(p, q)] = qe(g_int(1));
                        gens.push(d);
                    }
                }
                (
                    gens,
                    "the (n-k)^2 entries of the trailing block".to_string(),
                    None,
                )
            }
        };

    let generators = canonical_gens
        .into_iter()
        .map(|g| to_input_coordinates(&g, &res.perm))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClosedFormFamily {
        generators,
        free_parameter_description: description,
        pair_radicand,
    })
}

/// Converts a matrix over the quadratic extension to Gaussian rationals,
/// failing if any entry still carries a radical.
fn degenerate_matrix(m: &Matrix<QuadExtScalar>) -> Result<Matrix<GaussianRational>> {
    let mut out = Matrix::zeros(m.n_rows(), m.n_cols());
    for r in 0..m.n_rows() {
        for c in 0..m.n_cols() {
            match m[(r, c)].as_gaussian() {
                Some(g) => out[(r, c)] = g.clone(),
                None => {
                    return Err(EvoderError::PatternMismatch(
                        "rationalized generator still carries a radical".to_string(),
                    ))
                }
            }
        }
    }
    Ok(out)
}

/// Replaces a conjugate generator pair g(+root), g(−root) by the rational
/// combinations g₊ + g₋ and (g₊ − g₋)/root; passes rational generators
/// through unchanged.
pub fn rationalize_family(fam: &ClosedFormFamily) -> Result<Vec<Matrix<GaussianRational>>> {
    match (&fam.pair_radicand, fam.generators.as_slice()) {
        (Some(radicand), [plus, minus]) => {
            let root = QuadExtScalar::sqrt_of(radicand.clone());
            let inv_root = root.checked_inv()?;
            let sum = plus.add(minus)?;
            let diff = plus.sub(minus)?.scale(&inv_root);
            Ok(vec![degenerate_matrix(&sum)?, degenerate_matrix(&diff)?])
        }
        (Some(_), _) => Err(EvoderError::PatternMismatch(
            "a paired family must have exactly two generators".to_string(),
        )),
        (None, gens) => gens.iter().map(degenerate_matrix).collect(),
    }
}

/// Checks an emitted family against the algebra and the solver:
/// (a) every generator satisfies the derivation identity exactly, and
/// (b) the rationalized generators span exactly the solver's nullspace.
pub fn verify_closed_forms(
    e: &EvolutionAlgebra,
    fam: &ClosedFormFamily,
    space: &crate::solver::DerivationSpace,
) -> Result<VerifyReport> {
    let aq: Matrix<QuadExtScalar> = e.structure().map(|g| qe(g.clone()));
    let mut generator_is_derivation = Vec::with_capacity(fam.generators.len());
    for g in &fam.generators {
        generator_is_derivation.push(is_derivation_in(&aq, g)?);
    }
    let all_generators_derive = generator_is_derivation.iter().all(|&ok| ok);

    let rationalized = rationalize_family(fam)?;
    let n = e.dim();
    let flat = |m: &Matrix<GaussianRational>| -> Vec<GaussianRational> {
        (0..n).flat_map(|r| m.row(r).to_vec()).collect()
    };
    let gen_rows: Vec<Vec<GaussianRational>> = rationalized.iter().map(&flat).collect();
    let span_dim = if gen_rows.is_empty() {
        0
    } else {
        Matrix::from_rows(gen_rows.clone())?.rank()
    };
    let mut joint_rows = gen_rows;
    joint_rows.extend(space.basis().iter().map(&flat));
    let joint_dim = if joint_rows.is_empty() {
        0
    } else {
        Matrix::from_rows(joint_rows)?.rank()
    };
    let solver_dim = space.dim();
    let span_matches = span_dim == solver_dim && joint_dim == solver_dim;

    Ok(VerifyReport {
        generator_is_derivation,
        all_generators_derive,
        rationalized_span_dim: span_dim,
        solver_dim,
        span_matches,
    })
}
