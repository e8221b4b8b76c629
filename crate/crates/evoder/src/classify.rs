use crate::algebra::EvolutionAlgebra;
use crate::error::{EvoderError, Result};
use crate::matrix::{invert_permutation, Matrix};
use crate::scalar::{GaussianRational, Scalar};
use serde::{Deserialize, Serialize};

/// Hard cap on the permutation search dimension unless `EVODER_MAX_N`
/// overrides it.
pub const DEFAULT_MAX_N: usize = 8;

/// Current permutation-search cap: `EVODER_MAX_N` when set and parseable,
/// otherwise [`DEFAULT_MAX_N`].
pub fn permutation_cap() -> usize {
    std::env::var("EVODER_MAX_N")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_N)
}

/// The structural situations the classifier can recognize.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Tag {
    /// Nonsingular structure matrix; the derivation space is zero.
    NonsingularZero,
    /// Rank n−1 with the dependent row combining ≥ 2 independent rows; the
    /// derivation space is zero.
    RankN1TwoNonzeroB,
    /// Rank n−1, dependent row proportional to row 1; row 1 maps into a
    /// single middle coordinate, one corner row.
    FormA1,
    /// Rank n−1, dependent row proportional to row 1; row 1 maps into a
    /// single middle coordinate, two corner rows.
    FormA2,
    /// Rank n−1, dependent row proportional to row 1; row 1 itself carries
    /// the two corner entries.
    FormA3,
    /// Rank n−1 with a zero row and the remaining principal block singular.
    FormA4,
    /// Rank n−1 with a zero row, a leading invertible block, and a
    /// superdiagonal chain feeding the last coordinate.
    FormA5,
    /// Upper-triangular family: k rows with nonzero diagonal supported on
    /// columns i..k, all later rows zero.
    TriangularEk,
    /// No recognized pattern.
    GenericRankDeficient,
}

impl Tag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tag::NonsingularZero => "NonsingularZero",
            Tag::RankN1TwoNonzeroB => "RankN1TwoNonzeroB",
            Tag::FormA1 => "FormA1",
            Tag::FormA2 => "FormA2",
            Tag::FormA3 => "FormA3",
            Tag::FormA4 => "FormA4",
            Tag::FormA5 => "FormA5",
            Tag::TriangularEk => "TriangularEk",
            Tag::GenericRankDeficient => "GenericRankDeficient",
        }
    }
}

/// Case-dependent parameters of a classification.
///
/// The index parameters `s`, `k`, `m` are 1-based, matching the row/column
/// numbering used in the canonical pattern descriptions; `witness` is the
/// kernel vector of the leading principal block (FormA4); `b` is the
/// proportionality factor row n = b·row 1 (FormA1–A3); `b_coeffs` lists the
/// dependent-row combination coefficients (RankN1TwoNonzeroB).
#[derive(Clone, PartialEq, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CaseParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<GaussianRational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<GaussianRational>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_coeffs: Option<Vec<GaussianRational>>,
}

/// Result of classifying one algebra.
///
/// `perm` is one-line notation over 0-based input indices: `perm[p]` is the
/// input basis index placed at position `p` of the canonical pattern, so the
/// canonical matrix is `C[p][q] = A[perm[p]][perm[q]]`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub tag: Tag,
    pub perm: Vec<usize>,
    pub params: CaseParams,
}

/// Constraint on one cell of the canonical pattern.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Req {
    Zero,
    NonZero,
    Free,
}

/// Cell requirements of the triangular family with block size `k`:
/// rows 1..k are supported on columns p..k with a nonzero diagonal, rows
/// after k are zero. Positions are 0-based here and in all `*_req` helpers;
/// the doc comments use the 1-based numbering of the pattern displays.
pub(crate) fn ek_req(k: usize, p: usize, q: usize) -> Req {
    if p >= k {
        return Req::Zero;
    }
    if q < p || q >= k {
        Req::Zero
    } else if q == p {
        Req::NonZero
    } else {
        Req::Free
    }
}

/// Pattern with one feeding row: row 1 hits only column s+1; rows 2..s form
/// a free block in columns 2..s; rows s+1..n−2 are a superdiagonal chain;
/// row n−1 carries nonzero corners in columns 1 and n; row n repeats row 1's
/// shape (it is b·row 1).
pub(crate) fn a1_req(n: usize, s: usize, p: usize, q: usize) -> Req {
    let (p1, q1) = (p + 1, q + 1);
    if p1 == 1 || p1 == n {
        return if q1 == s + 1 { Req::NonZero } else { Req::Zero };
    }
    if p1 == n - 1 {
        return if q1 == 1 || q1 == n {
            Req::NonZero
        } else {
            Req::Zero
        };
    }
    if (2..=s).contains(&p1) {
        return if (2..=s).contains(&q1) {
            Req::Free
        } else {
            Req::Zero
        };
    }
    // s+1 ≤ p ≤ n−2: chain row.
    if q1 == p1 + 1 {
        Req::NonZero
    } else {
        Req::Zero
    }
}

/// Pattern with two corner rows k and m (2 ≤ k < m ≤ n−1): row 1 hits only
/// column k+1; rows 2..k−1 and k+1..m−1 are superdiagonal chains; rows k and
/// m carry nonzero corners in columns 1 and n; rows m+1..n−1 form a free
/// block in columns m+1..n−1; row n repeats row 1's shape.
pub(crate) fn a2_req(n: usize, k: usize, m: usize, p: usize, q: usize) -> Req {
    let (p1, q1) = (p + 1, q + 1);
    if p1 == 1 || p1 == n {
        return if q1 == k + 1 { Req::NonZero } else { Req::Zero };
    }
    if p1 == k || p1 == m {
        return if q1 == 1 || q1 == n {
            Req::NonZero
        } else {
            Req::Zero
        };
    }
    if (2..k).contains(&p1) || (k + 1..m).contains(&p1) {
        return if q1 == p1 + 1 {
            Req::NonZero
        } else {
            Req::Zero
        };
    }
    // m+1 ≤ p ≤ n−1: free block.
    if (m + 1..=n - 1).contains(&q1) {
        Req::Free
    } else {
        Req::Zero
    }
}

/// Pattern whose first row carries the corners: rows 1, n−1 and n have
/// nonzero corners in columns 1 and n only; rows 2..s are free on columns
/// 1..s and n; rows s+1..n−2 are a superdiagonal chain.
pub(crate) fn a3_req(n: usize, s: usize, p: usize, q: usize) -> Req {
    let (p1, q1) = (p + 1, q + 1);
    if p1 == 1 || p1 == n || p1 == n - 1 {
        return if q1 == 1 || q1 == n {
            Req::NonZero
        } else {
            Req::Zero
        };
    }
    if (2..=s).contains(&p1) {
        return if q1 <= s || q1 == n {
            Req::Free
        } else {
            Req::Zero
        };
    }
    if q1 == p1 + 1 {
        Req::NonZero
    } else {
        Req::Zero
    }
}

/// Block-plus-chain pattern with zero last row (0 ≤ k ≤ n−2): rows 1..k are
/// free on columns 1..k and n; rows k+1..n−2 have a nonzero superdiagonal
/// entry and a free last column; row n−1 hits only column n; row n is zero.
pub(crate) fn a5_req(n: usize, k: usize, p: usize, q: usize) -> Req {
    let (p1, q1) = (p + 1, q + 1);
    if p1 == n {
        return Req::Zero;
    }
    if p1 == n - 1 {
        return if q1 == n { Req::NonZero } else { Req::Zero };
    }
    if p1 <= k {
        return if q1 <= k || q1 == n {
            Req::Free
        } else {
            Req::Zero
        };
    }
    // k+1 ≤ p ≤ n−2.
    if q1 == p1 + 1 {
        Req::NonZero
    } else if q1 == n {
        Req::Free
    } else {
        Req::Zero
    }
}

/// Checks one already-determined cell of a partial assignment.
fn cell_ok(
    a: &Matrix<GaussianRational>,
    assigned: &[usize],
    req: &dyn Fn(usize, usize) -> Req,
    p: usize,
    q: usize,
) -> bool {
    let value_zero = a[(assigned[p], assigned[q])].is_zero();
    match req(p, q) {
        Req::Zero => value_zero,
        Req::NonZero => !value_zero,
        Req::Free => true,
    }
}

/// Backtracking search for the lexicographically smallest permutation whose
/// conjugated matrix satisfies the cell requirements and the optional
/// whole-matrix post-filter. `fixed[p] = Some(r)` pins input row `r` to
/// position `p`. Positions are filled left to right with ascending
/// candidates, so the first complete assignment is the lex-min match.
pub(crate) fn search_permutation(
    a: &Matrix<GaussianRational>,
    fixed: &[Option<usize>],
    req: &dyn Fn(usize, usize) -> Req,
    post: &dyn Fn(&[usize]) -> bool,
) -> Option<Vec<usize>> {
    let n = a.n_rows();
    // Per input row, the position that pins it (if any); a free position must
    // not consume a row reserved for a later pinned position.
    let mut pinned_at = vec![None; n];
    for (p, f) in fixed.iter().enumerate() {
        if let Some(r) = *f {
            if r >= n || pinned_at[r].is_some() {
                return None;
            }
            pinned_at[r] = Some(p);
        }
    }

    let mut assigned: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];

    fn step(
        a: &Matrix<GaussianRational>,
        fixed: &[Option<usize>],
        pinned_at: &[Option<usize>],
        req: &dyn Fn(usize, usize) -> Req,
        post: &dyn Fn(&[usize]) -> bool,
        assigned: &mut Vec<usize>,
        used: &mut [bool],
    ) -> Option<Vec<usize>> {
        let n = a.n_rows();
        let t = assigned.len();
        if t == n {
            return post(assigned).then(|| assigned.clone());
        }
        let candidates: Vec<usize> = match fixed[t] {
            Some(r) => {
                if used[r] {
                    return None;
                }
                vec![r]
            }
            None => (0..n)
                .filter(|&r| !used[r] && pinned_at[r].is_none_or(|p| p <= t))
                .collect(),
        };
        for r in candidates {
            assigned.push(r);
            used[r] = true;
            let consistent =
                (0..=t).all(|q| cell_ok(a, assigned, req, t, q) && cell_ok(a, assigned, req, q, t));
            if consistent {
                if let Some(found) = step(a, fixed, pinned_at, req, post, assigned, used) {
                    return Some(found);
                }
            }
            used[r] = false;
            assigned.pop();
        }
        None
    }

    step(a, fixed, &pinned_at, req, post, &mut assigned, &mut used)
}

fn identity_perm(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Ascending order with row `z` moved to the last position.
fn z_last_perm(n: usize, z: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).filter(|&r| r != z).collect();
    perm.push(z);
    perm
}

/// Scales a nonzero vector so its first nonzero coordinate is 1.
fn normalize_leading(v: &[GaussianRational]) -> Vec<GaussianRational> {
    let lead = v.iter().find(|x| !x.is_zero());
    match lead.and_then(|l| l.inv()) {
        Some(inv) => v.iter().map(|x| x.mul(&inv)).collect(),
        None => v.to_vec(),
    }
}

/// Decides which canonical situation the algebra occupies, searching basis
/// permutations for the structural patterns.
///
/// Decision order: the triangular family is tested first at any rank (its
/// block size is forced to the number of nonzero rows, which must equal the
/// rank). Then: full rank → `NonsingularZero`; rank n−1 → the dependent-row
/// analysis below; lower rank → `GenericRankDeficient`.
///
/// At rank n−1 the dependent row is expressed through the others. With ≥ 2
/// combination coefficients the tag is `RankN1TwoNonzeroB`. With exactly one,
/// the two involved rows are tried as (row 1, row n) in both orders against
/// the proportional-row patterns, most constrained first (two corner rows,
/// then one corner row feeding a middle column, then corners on row 1), each
/// over ascending parameters. With none (a zero row), the block-chain
/// patterns are tried for ascending k, then the singular-principal-block
/// pattern, then the invertible-principal-block fallback.
pub fn classify(e: &EvolutionAlgebra) -> Result<ClassificationResult> {
    let n = e.dim();
    let cap = permutation_cap();
    if n > cap {
        return Err(EvoderError::ExplicitLimit { n, max: cap });
    }
    let a = e.structure();
    let rank = e.rank();

    // Triangular family, independent of rank.
    let k_tri = (0..n)
        .filter(|&r| a.row(r).iter().any(|v| !v.is_zero()))
        .count();
    if rank == k_tri {
        let req = |p: usize, q: usize| ek_req(k_tri, p, q);
        if let Some(perm) = search_permutation(a, &vec![None; n], &req, &|_| true) {
            return Ok(ClassificationResult {
                tag: Tag::TriangularEk,
                perm,
                params: CaseParams {
                    k: Some(k_tri),
                    ..CaseParams::default()
                },
            });
        }
    }

    if rank == n {
        return Ok(ClassificationResult {
            tag: Tag::NonsingularZero,
            perm: identity_perm(n),
            params: CaseParams::default(),
        });
    }

    if rank + 1 == n {
        return classify_rank_deficient_one(e);
    }

    Ok(ClassificationResult {
        tag: Tag::GenericRankDeficient,
        perm: identity_perm(n),
        params: CaseParams::default(),
    })
}

fn classify_rank_deficient_one(e: &EvolutionAlgebra) -> Result<ClassificationResult> {
    let n = e.dim();
    let a = e.structure();
    let bvec = e.normalize_dependent_row()?;
    let z = bvec.perm[n - 1];
    let nonzero: Vec<usize> = (0..n - 1).filter(|&j| !bvec.coeffs[j].is_zero()).collect();

    match nonzero.len() {
        0 => classify_zero_row(e, z),
        1 => {
            let h = bvec.perm[nonzero[0]];
            let beta = bvec.coeffs[nonzero[0]].clone();
            classify_proportional(a, n, h, z, &beta)
        }
        _ => Ok(ClassificationResult {
            tag: Tag::RankN1TwoNonzeroB,
            perm: bvec.perm.clone(),
            params: CaseParams {
                b_coeffs: Some(bvec.coeffs),
                ..CaseParams::default()
            },
        }),
    }
}

/// Rank n−1, dependent row z = β·row h with β ≠ 0. Tries both orientations
/// (head feeding, tail dependent) for each pattern.
fn classify_proportional(
    a: &Matrix<GaussianRational>,
    n: usize,
    h: usize,
    z: usize,
    beta: &GaussianRational,
) -> Result<ClassificationResult> {
    let lo = h.min(z);
    let hi = h.max(z);
    // (head, tail) candidates; row tail = b·row head.
    let branches = [(lo, hi), (hi, lo)];
    let b_of = |head: usize| -> GaussianRational {
        if head == h {
            beta.clone()
        } else {
            beta.inv().expect("nonzero combination coefficient")
        }
    };
    let fixed_for = |head: usize, tail: usize| -> Vec<Option<usize>> {
        let mut f = vec![None; n];
        f[0] = Some(head);
        f[n - 1] = Some(tail);
        f
    };

    // Two corner rows; parameters ascending.
    if n >= 4 {
        for k in 2..=n - 2 {
            for m in k + 1..=n - 1 {
                for &(head, tail) in &branches {
                    let req = |p: usize, q: usize| a2_req(n, k, m, p, q);
                    if let Some(perm) =
                        search_permutation(a, &fixed_for(head, tail), &req, &|_| true)
                    {
                        return Ok(ClassificationResult {
                            tag: Tag::FormA2,
                            perm,
                            params: CaseParams {
                                k: Some(k),
                                m: Some(m),
                                b: Some(b_of(head)),
                                ..CaseParams::default()
                            },
                        });
                    }
                }
            }
        }
    }

    // One corner row, row 1 feeding a middle column.
    for s in 1..=n.saturating_sub(2) {
        for &(head, tail) in &branches {
            let req = |p: usize, q: usize| a1_req(n, s, p, q);
            if let Some(perm) = search_permutation(a, &fixed_for(head, tail), &req, &|_| true) {
                return Ok(ClassificationResult {
                    tag: Tag::FormA1,
                    perm,
                    params: CaseParams {
                        s: Some(s),
                        b: Some(b_of(head)),
                        ..CaseParams::default()
                    },
                });
            }
        }
    }

    // Corners on row 1; the free rows 2..s must use their column-1 and
    // column-n entries in pairs (both zero or both nonzero).
    for s in 1..=n.saturating_sub(2) {
        for &(head, tail) in &branches {
            let req = |p: usize, q: usize| a3_req(n, s, p, q);
            let post = |assigned: &[usize]| -> bool {
                (2..=s).all(|p1| {
                    let r = assigned[p1 - 1];
                    a[(r, assigned[0])].is_zero() == a[(r, assigned[n - 1])].is_zero()
                })
            };
            if let Some(perm) = search_permutation(a, &fixed_for(head, tail), &req, &post) {
                return Ok(ClassificationResult {
                    tag: Tag::FormA3,
                    perm,
                    params: CaseParams {
                        s: Some(s),
                        b: Some(b_of(head)),
                        ..CaseParams::default()
                    },
                });
            }
        }
    }

    Ok(ClassificationResult {
        tag: Tag::GenericRankDeficient,
        perm: identity_perm(n),
        params: CaseParams::default(),
    })
}

/// Rank n−1 with the dependent row z identically zero.
fn classify_zero_row(e: &EvolutionAlgebra, z: usize) -> Result<ClassificationResult> {
    let n = e.dim();
    let a = e.structure();

    // Block-plus-chain patterns, smallest block first.
    let mut fixed = vec![None; n];
    fixed[n - 1] = Some(z);
    for k in 0..=n.saturating_sub(2) {
        let req = |p: usize, q: usize| a5_req(n, k, p, q);
        if let Some(perm) = search_permutation(a, &fixed, &req, &|_| true) {
            return Ok(ClassificationResult {
                tag: Tag::FormA5,
                perm,
                params: CaseParams {
                    k: Some(k),
                    ..CaseParams::default()
                },
            });
        }
    }

    // Principal block (rows and columns other than z).
    let perm = z_last_perm(n, z);
    let canon = a.permute_conjugate(&perm)?;
    let block = Matrix::from_fn(n - 1, n - 1, |r, c| canon[(r, c)].clone());
    if block.rank() < n - 1 {
        let kernel = block.nullspace();
        debug_assert_eq!(kernel.len(), 1);
        let witness = normalize_leading(&kernel[0]);
        return Ok(ClassificationResult {
            tag: Tag::FormA4,
            perm,
            params: CaseParams {
                witness: Some(witness),
                ..CaseParams::default()
            },
        });
    }

    // Invertible principal block: the k = n−1 member of the block-chain
    // family (no chain, no constraint beyond the zero row).
    Ok(ClassificationResult {
        tag: Tag::FormA5,
        perm,
        params: CaseParams {
            k: Some(n - 1),
            ..CaseParams::default()
        },
    })
}

/// Re-checks that a classification's permutation and parameters actually
/// match the algebra; used before emitting closed forms.
pub fn validate_against(res: &ClassificationResult, e: &EvolutionAlgebra) -> Result<()> {
    let n = e.dim();
    let a = e.structure();
    if res.perm.len() != n {
        return Err(EvoderError::PatternMismatch(format!(
            "permutation length {} does not match dimension {n}",
            res.perm.len()
        )));
    }
    let canon = a.permute_conjugate(&res.perm)?;
    let check_cells = |req: &dyn Fn(usize, usize) -> Req| -> Result<()> {
        for p in 0..n {
            for q in 0..n {
                let zero = canon[(p, q)].is_zero();
                let ok = match req(p, q) {
                    Req::Zero => zero,
                    Req::NonZero => !zero,
                    Req::Free => true,
                };
                if !ok {
                    return Err(EvoderError::PatternMismatch(format!(
                        "cell ({p}, {q}) violates the {:?} pattern",
                        res.tag
                    )));
                }
            }
        }
        Ok(())
    };
    let missing = |what: &str| {
        EvoderError::PatternMismatch(format!("{:?} classification lacks {what}", res.tag))
    };
    match res.tag {
        Tag::NonsingularZero => {
            if e.rank() != n {
                return Err(EvoderError::PatternMismatch(
                    "structure matrix is singular".to_string(),
                ));
            }
        }
        Tag::RankN1TwoNonzeroB | Tag::GenericRankDeficient => {}
        Tag::TriangularEk => {
            let k = res.params.k.ok_or_else(|| missing("k"))?;
            check_cells(&|p, q| ek_req(k, p, q))?;
        }
        Tag::FormA1 => {
            let s = res.params.s.ok_or_else(|| missing("s"))?;
            check_cells(&|p, q| a1_req(n, s, p, q))?;
        }
        Tag::FormA2 => {
            let k = res.params.k.ok_or_else(|| missing("k"))?;
            let m = res.params.m.ok_or_else(|| missing("m"))?;
            check_cells(&|p, q| a2_req(n, k, m, p, q))?;
        }
        Tag::FormA3 => {
            let s = res.params.s.ok_or_else(|| missing("s"))?;
            check_cells(&|p, q| a3_req(n, s, p, q))?;
        }
        Tag::FormA4 => {
            let witness = res
                .params
                .witness
                .as_ref()
                .ok_or_else(|| missing("witness"))?;
            if witness.len() != n - 1 || witness.iter().all(|v| v.is_zero()) {
                return Err(EvoderError::PatternMismatch(
                    "witness must be a nonzero vector of length n-1".to_string(),
                ));
            }
            for q in 0..n {
                if !canon[(n - 1, q)].is_zero() {
                    return Err(EvoderError::PatternMismatch(
                        "last canonical row must be zero".to_string(),
                    ));
                }
            }
            let block = Matrix::from_fn(n - 1, n - 1, |r, c| canon[(r, c)].clone());
            let image = block.mul_vec(witness)?;
            if image.iter().any(|v| !v.is_zero()) {
                return Err(EvoderError::PatternMismatch(
                    "witness is not in the kernel of the principal block".to_string(),
                ));
            }
        }
        Tag::FormA5 => {
            let k = res.params.k.ok_or_else(|| missing("k"))?;
            if k + 1 == n {
                for q in 0..n {
                    if !canon[(n - 1, q)].is_zero() {
                        return Err(EvoderError::PatternMismatch(
                            "last canonical row must be zero".to_string(),
                        ));
                    }
                }
                let block = Matrix::from_fn(n - 1, n - 1, |r, c| canon[(r, c)].clone());
                if block.rank() != n - 1 {
                    return Err(EvoderError::PatternMismatch(
                        "principal block must be invertible".to_string(),
                    ));
                }
            } else {
                check_cells(&|p, q| a5_req(n, k, p, q))?;
            }
        }
    }
    Ok(())
}

/// Conjugates a canonical-coordinates matrix back to input coordinates:
/// entry (p, q) of the canonical matrix lands at (perm[p], perm[q]).
pub fn to_input_coordinates<S: Scalar>(canonical: &Matrix<S>, perm: &[usize]) -> Result<Matrix<S>> {
    canonical.permute_conjugate(&invert_permutation(perm))
}
