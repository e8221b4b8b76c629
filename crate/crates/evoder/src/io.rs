use crate::algebra::EvolutionAlgebra;
use crate::classify::{classify, ClassificationResult};
use crate::emit::{emit_closed_forms, verify_closed_forms, ClosedFormFamily, VerifyReport};
use crate::error::{EvoderError, Result};
use crate::float::{float_check, FloatCheck};
use crate::matrix::Matrix;
use crate::scalar::{format_gaussian, parse_gaussian_at, GaussianRational, QuadExtScalar};
use crate::solver::{assemble, LeibnizSystem};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

/// On-disk matrix format: a square grid of scalar strings.
///
/// Entries use the exact scalar grammar (`"1"`, `"-2/3"`, `"1/2+1/3i"`,
/// `"-1i"`), never native floats, so files round-trip losslessly. Unknown
/// extra fields are ignored when reading, which lets generated files carry
/// provenance fields alongside the matrix.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<String>>,
}

/// Output of the instance generator: a matrix file plus the provenance
/// needed to regenerate it.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GenOutput {
    pub n: usize,
    pub entries: Vec<Vec<String>>,
    /// Identity of the deterministic generator.
    pub generator: String,
    pub case: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

/// Closed-form family rendered as strings for reports.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FamilyJson {
    /// Each generator as an n×n grid of scalar strings.
    pub generators: Vec<Vec<Vec<String>>>,
    pub free_parameter_description: String,
    /// Radicand of the paired square-root generators, when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_radicand: Option<String>,
}

/// Machine-readable result of analyzing one matrix file.
///
/// Analysis fields are present when the corresponding stage ran; a failed
/// stage leaves its fields absent and records the failure in `error`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content_sha256: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation_dim: Option<usize>,
    /// Basis matrices as grids of exact scalar strings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation_basis: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_forms: Option<FamilyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerifyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub float_check: Option<FloatCheck>,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// How much of the analysis pipeline a report should cover.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Analysis {
    /// Structure matrix rank only.
    Rank,
    /// Rank plus the full derivation space.
    Derivations,
    /// Rank plus the canonical-form classification.
    Classify,
    /// Everything: solve, classify, emit closed forms, verify both routes.
    Verify,
    /// Solve plus the floating-point cross-check.
    FloatCheck,
}

/// Aggregate counts across a batch run.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BatchSummary {
    pub files: usize,
    pub errors: usize,
    /// Classification tag → number of files.
    pub tag_counts: BTreeMap<String, usize>,
    /// Derivation dimension → number of files.
    pub dim_histogram: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchOutput {
    pub reports: Vec<Report>,
    pub summary: BatchSummary,
}

/// Converts a parsed matrix file into an algebra, validating shape and
/// scalars.
pub fn file_to_algebra(file: &MatrixFile) -> Result<EvolutionAlgebra> {
    let n = file.n;
    if n == 0 {
        return Err(EvoderError::EmptyMatrix);
    }
    if file.entries.len() < n {
        return Err(EvoderError::NonSquare {
            n,
            row: file.entries.len(),
            len: 0,
        });
    }
    if file.entries.len() > n {
        return Err(EvoderError::NonSquare {
            n,
            row: n,
            len: file.entries[n].len(),
        });
    }
    let mut rows: Vec<Vec<GaussianRational>> = Vec::with_capacity(n);
    for (r, row) in file.entries.iter().enumerate() {
        if row.len() != n {
            return Err(EvoderError::NonSquare {
                n,
                row: r,
                len: row.len(),
            });
        }
        let mut out = Vec::with_capacity(n);
        for (c, cell) in row.iter().enumerate() {
            out.push(parse_gaussian_at(cell, r, c)?);
        }
        rows.push(out);
    }
    EvolutionAlgebra::from_rows(rows)
}

/// Parses the JSON matrix format into an algebra.
pub fn parse_matrix_file(text: &str) -> Result<EvolutionAlgebra> {
    let file: MatrixFile = serde_json::from_str(text)?;
    file_to_algebra(&file)
}

/// Renders an algebra back into the file format.
pub fn algebra_to_file(e: &EvolutionAlgebra) -> MatrixFile {
    MatrixFile {
        n: e.dim(),
        entries: matrix_strings(e.structure()),
    }
}

/// Formats a matrix as a grid of exact scalar strings.
pub fn matrix_strings(m: &Matrix<GaussianRational>) -> Vec<Vec<String>> {
    (0..m.n_rows())
        .map(|r| {
            (0..m.n_cols())
                .map(|c| format_gaussian(&m[(r, c)]))
                .collect()
        })
        .collect()
}

fn format_quadext(v: &QuadExtScalar) -> String {
    match v.as_gaussian() {
        Some(g) => format_gaussian(g),
        None => format!(
            "({})+({})*sqrt({})",
            format_gaussian(v.base()),
            format_gaussian(v.radical_coeff()),
            format_gaussian(v.radicand())
        ),
    }
}

fn quadext_matrix_strings(m: &Matrix<QuadExtScalar>) -> Vec<Vec<String>> {
    (0..m.n_rows())
        .map(|r| {
            (0..m.n_cols())
                .map(|c| format_quadext(&m[(r, c)]))
                .collect()
        })
        .collect()
}

/// Renders a closed-form family for inclusion in a report.
pub fn family_to_json(fam: &ClosedFormFamily) -> FamilyJson {
    FamilyJson {
        generators: fam.generators.iter().map(quadext_matrix_strings).collect(),
        free_parameter_description: fam.free_parameter_description.clone(),
        pair_radicand: fam.pair_radicand.as_ref().map(format_gaussian),
    }
}

/// Reads a file's bytes, returning the content and its SHA-256 hex digest.
pub fn read_with_digest(path: &Path) -> Result<(String, String)> {
    let bytes = std::fs::read(path).map_err(|source| EvoderError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|e| {
        EvoderError::InvalidParameter(format!("{} is not valid UTF-8: {e}", path.display()))
    })?;
    Ok((text, digest))
}

/// Runs the analysis pipeline over one already-parsed algebra.
///
/// Stage failures (for example the classifier's size cap) are recorded in
/// the `error` slot while earlier stages' results are kept.
pub fn analyze_algebra(
    label: &str,
    digest: Option<String>,
    e: &EvolutionAlgebra,
    level: Analysis,
) -> Report {
    let start = Instant::now();
    let mut report = Report {
        path: label.to_string(),
        content_sha256: digest,
        n: Some(e.dim()),
        rank: Some(e.rank()),
        derivation_dim: None,
        derivation_basis: None,
        classification: None,
        closed_forms: None,
        verification: None,
        float_check: None,
        elapsed_ms: 0.0,
        error: None,
    };
    let mut solved: Option<(LeibnizSystem, crate::solver::DerivationSpace)> = None;
    if matches!(
        level,
        Analysis::Derivations | Analysis::Verify | Analysis::FloatCheck
    ) {
        let system = assemble(e);
        let space = system.nullspace();
        report.derivation_dim = Some(space.dim());
        report.derivation_basis = Some(space.basis().iter().map(matrix_strings).collect());
        solved = Some((system, space));
    }
    if matches!(level, Analysis::Classify | Analysis::Verify) {
        match classify(e) {
            Ok(res) => {
                if level == Analysis::Verify {
                    match emit_closed_forms(&res, e) {
                        Ok(fam) => {
                            report.closed_forms = Some(family_to_json(&fam));
                            let space = &solved.as_ref().expect("solved at verify level").1;
                            match verify_closed_forms(e, &fam, space) {
                                Ok(v) => report.verification = Some(v),
                                Err(err) => report.error = Some(err.to_string()),
                            }
                        }
                        Err(err) => report.error = Some(err.to_string()),
                    }
                }
                report.classification = Some(res);
            }
            Err(err) => report.error = Some(err.to_string()),
        }
    }
    if level == Analysis::FloatCheck {
        let (system, space) = solved.as_ref().expect("solved at float-check level");
        report.float_check = Some(float_check(system, space));
    }
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

/// Reads, parses, and analyzes one matrix file; failures land in the error
/// slot rather than aborting.
pub fn analyze_file(path: &Path, level: Analysis) -> Report {
    let start = Instant::now();
    let label = path.display().to_string();
    let (text, digest) = match read_with_digest(path) {
        Ok(v) => v,
        Err(err) => {
            return Report {
                path: label,
                content_sha256: None,
                n: None,
                rank: None,
                derivation_dim: None,
                derivation_basis: None,
                classification: None,
                closed_forms: None,
                verification: None,
                float_check: None,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                error: Some(err.to_string()),
            }
        }
    };
    match parse_matrix_file(&text) {
        Ok(e) => {
            let mut report = analyze_algebra(&label, Some(digest), &e, level);
            report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            report
        }
        Err(err) => Report {
            path: label,
            content_sha256: Some(digest),
            n: None,
            rank: None,
            derivation_dim: None,
            derivation_basis: None,
            classification: None,
            closed_forms: None,
            verification: None,
            float_check: None,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            error: Some(err.to_string()),
        },
    }
}

/// Analyzes every regular file in a directory, sorted by filename.
///
/// Per-file failures are embedded in that file's report slot and never
/// abort the batch; the summary counts files, errors, classification tags,
/// and derivation dimensions.
pub fn run_batch(dir: &Path) -> Result<BatchOutput> {
    let read_dir = std::fs::read_dir(dir).map_err(|source| EvoderError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths: Vec<std::path::PathBuf> = Vec::new();
    for entry in read_dir {
        let entry = entry.map_err(|source| EvoderError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let path = entry.path();
        if path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    let mut reports = Vec::with_capacity(paths.len());
    let mut summary = BatchSummary::default();
    for path in &paths {
        let report = analyze_file(path, Analysis::Verify);
        summary.files += 1;
        if report.error.is_some() {
            summary.errors += 1;
        }
        if let Some(res) = &report.classification {
            *summary
                .tag_counts
                .entry(res.tag.as_str().to_string())
                .or_insert(0) += 1;
        }
        if let Some(dim) = report.derivation_dim {
            *summary.dim_histogram.entry(dim).or_insert(0) += 1;
        }
        reports.push(report);
    }
    Ok(BatchOutput { reports, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_instance, GenCase};
    use crate::scalar::{parse_gaussian, Scalar};

    #[test]
    fn parses_identity_example() {
        let e = parse_matrix_file(r#"{"n":2,"entries":[["1","0"],["0","1"]]}"#).unwrap();
        assert_eq!(e.dim(), 2);
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn parses_gaussian_scalars() {
        let e = parse_matrix_file(r#"{"n":2,"entries":[["1/2+1/3i","0"],["0","-1i"]]}"#).unwrap();
        let expected = parse_gaussian("1/2+1/3i").unwrap();
        assert_eq!(e.structure()[(0, 0)], expected);
        assert_eq!(e.structure()[(1, 1)], GaussianRational::i().neg());
    }

    #[test]
    fn rejects_non_square() {
        let err = parse_matrix_file(r#"{"n":2,"entries":[["1","0"]]}"#).unwrap_err();
        assert!(matches!(
            err,
            EvoderError::NonSquare {
                n: 2,
                row: 1,
                len: 0
            }
        ));
        let err = parse_matrix_file(r#"{"n":2,"entries":[["1","0"],["0"]]}"#).unwrap_err();
        assert!(matches!(
            err,
            EvoderError::NonSquare {
                n: 2,
                row: 1,
                len: 1
            }
        ));
        let err = parse_matrix_file(r#"{"n":1,"entries":[["1"],["0"]]}"#).unwrap_err();
        assert!(matches!(
            err,
            EvoderError::NonSquare {
                n: 1,
                row: 1,
                len: 1
            }
        ));
    }

    #[test]
    fn rejects_empty_and_malformed() {
        assert!(matches!(
            parse_matrix_file(r#"{"n":0,"entries":[]}"#),
            Err(EvoderError::EmptyMatrix)
        ));
        assert!(matches!(
            parse_matrix_file(r#"{"n":1,"entries":[["1..2"]]}"#),
            Err(EvoderError::MalformedScalar { .. })
        ));
        assert!(matches!(
            parse_matrix_file("not json"),
            Err(EvoderError::Json(_))
        ));
    }

    #[test]
    fn round_trips_generated_matrices() {
        for seed in 0..6u64 {
            let e = gen_instance(GenCase::RandomRank, 4, seed, None).unwrap();
            let file = algebra_to_file(&e);
            let text = serde_json::to_string(&file).unwrap();
            let back = parse_matrix_file(&text).unwrap();
            assert_eq!(back.structure(), e.structure());
        }
    }

    #[test]
    fn gen_output_parses_as_matrix_file() {
        let e = gen_instance(GenCase::A5, 4, 9, Some(1)).unwrap();
        let out = GenOutput {
            n: e.dim(),
            entries: algebra_to_file(&e).entries,
            generator: crate::gen::GENERATOR_ID.to_string(),
            case: "a5".to_string(),
            seed: 9,
            k: Some(1),
        };
        let text = serde_json::to_string(&out).unwrap();
        // Extra provenance fields must not break matrix parsing.
        let back = parse_matrix_file(&text).unwrap();
        assert_eq!(back.structure(), e.structure());
    }

    #[test]
    fn report_round_trips_and_basis_reparses() {
        let e = gen_instance(GenCase::A5, 4, 3, Some(1)).unwrap();
        let report = analyze_algebra("mem", None, &e, Analysis::Verify);
        assert_eq!(report.derivation_dim, Some(2));
        assert!(report.error.is_none(), "{:?}", report.error);
        let text = serde_json::to_string(&report).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back.derivation_dim, report.derivation_dim);
        assert_eq!(back.classification, report.classification);
        let basis = back.derivation_basis.unwrap();
        let space = crate::solver::derivations(&e);
        for (grid, expect) in basis.iter().zip(space.basis()) {
            for (r, row) in grid.iter().enumerate() {
                for (c, cell) in row.iter().enumerate() {
                    assert_eq!(parse_gaussian(cell).unwrap(), expect[(r, c)]);
                }
            }
        }
    }

    #[test]
    fn batch_over_directory() {
        let dir = tempfile::tempdir().unwrap();
        let good = gen_instance(GenCase::Nonsingular, 3, 1, None).unwrap();
        std::fs::write(
            dir.path().join("a_good.json"),
            serde_json::to_string(&algebra_to_file(&good)).unwrap(),
        )
        .unwrap();
        std::fs::write(dir.path().join("b_bad.json"), "{broken").unwrap();
        let out = run_batch(dir.path()).unwrap();
        assert_eq!(out.summary.files, 2);
        assert_eq!(out.summary.errors, 1);
        assert_eq!(out.reports.len(), 2);
        assert!(out.reports[0].path.ends_with("a_good.json"));
        assert!(out.reports[0].error.is_none());
        assert_eq!(out.reports[0].derivation_dim, Some(0));
        assert_eq!(out.summary.tag_counts.get("NonsingularZero"), Some(&1));
        assert_eq!(out.summary.dim_histogram.get(&0), Some(&1));
        assert!(out.reports[1].error.is_some());
    }

    #[test]
    fn batch_over_empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_batch(dir.path()).unwrap();
        assert_eq!(out.summary.files, 0);
        assert!(out.reports.is_empty());
    }

    #[test]
    fn analyze_file_records_digest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(&path, r#"{"n":1,"entries":[["0"]]}"#).unwrap();
        let report = analyze_file(&path, Analysis::Derivations);
        assert_eq!(report.n, Some(1));
        assert_eq!(report.derivation_dim, Some(1));
        let digest = report.content_sha256.unwrap();
        assert_eq!(digest.len(), 64);
        assert!(digest.chars().all(|c| c.is_ascii_hexdigit()));
    }

    #[test]
    fn missing_file_is_an_error_slot() {
        let report = analyze_file(Path::new("/nonexistent/x.json"), Analysis::Rank);
        assert!(report.error.unwrap().contains("I/O error"));
    }
}
