//! Alignment of several embedding spaces into one unified space.
//!
//! Alternates two steps until the average normalized residual stops
//! changing by at least `tau`: solve an orthogonal Procrustes problem per
//! space against the current target, then replace the target by the
//! average of the transformed spaces.

mod procrustes;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::kv;

pub use procrustes::{orthogonality_defect, procrustes_solve};

pub const UNIFIED_DOMAIN: &str = "unified";

#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    pub domain_id: String,
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentConfig {
    pub tau: f64,
    pub max_iterations: usize,
    /// Length-normalize target rows after each averaging step.
    pub renormalize_target: bool,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        Self {
            tau: 0.001,
            max_iterations: 100,
            renormalize_target: true,
        }
    }
}

impl AlignmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidConfig(format!("tau must be finite and > 0, got {}", self.tau)));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct UnifiedSpace {
    pub target: EmbeddingSpace,
    pub transforms: Vec<TransformMatrix>,
    pub residual_history: Vec<f64>,
    pub n_w: HashMap<String, usize>,
    pub converged: bool,
}

impl UnifiedSpace {
    pub fn transform(&self, domain_id: &str) -> Option<&TransformMatrix> {
        self.transforms.iter().find(|t| t.domain_id == domain_id)
    }

    pub fn iterations(&self) -> usize {
        self.residual_history.len()
    }
}

fn check_dims(spaces: &[EmbeddingSpace]) -> Result<usize> {
    let d = spaces.first().map_or(0, EmbeddingSpace::dim);
    if let Some(s) = spaces.iter().find(|s| s.dim() != d) {
        return Err(Error::ShapeMismatch(format!(
            "space '{}' has dimension {}, expected {d}",
            s.domain_id(),
            s.dim()
        )));
    }
    Ok(d)
}

/// Averages the transformed spaces word by word over the union vocabulary.
/// Words keep first-appearance order across `spaces`. Returns the target and
/// the number of spaces containing each word.
pub fn update_target(
    spaces: &[EmbeddingSpace],
    transforms: &[TransformMatrix],
    renormalize: bool,
) -> Result<(EmbeddingSpace, HashMap<String, usize>)> {
    if spaces.len() != transforms.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} spaces but {} transforms",
            spaces.len(),
            transforms.len()
        )));
    }
    let d = check_dims(spaces)?;
    let mapped: Vec<DMatrix<f64>> = spaces
        .iter()
        .zip(transforms)
        .map(|(s, t)| s.matrix() * &t.matrix)
        .collect();

    let mut order: Vec<String> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    for s in spaces {
        for w in s.vocab() {
            if !slot.contains_key(w) {
                slot.insert(w.clone(), order.len());
                order.push(w.clone());
            }
        }
    }
    let mut sums = DMatrix::<f64>::zeros(order.len(), d);
    let mut n = vec![0usize; order.len()];
    for (s, m) in spaces.iter().zip(&mapped) {
        for (i, w) in s.vocab().iter().enumerate() {
            let j = slot[w];
            let mut row = sums.row_mut(j);
            row += m.row(i);
            n[j] += 1;
        }
    }
    for (j, mut row) in sums.row_iter_mut().enumerate() {
        row /= n[j] as f64;
        if renormalize {
            let norm = row.norm();
            // Opposite vectors can cancel exactly; such rows stay zero.
            if norm > 0.0 {
                row /= norm;
            }
        }
    }
    let n_w = order.iter().cloned().zip(n).collect();
    Ok((EmbeddingSpace::new(UNIFIED_DOMAIN, order, sums)?, n_w))
}

/// Row pairs `(row in space, row in target)` for the words both contain.
fn shared_rows(space: &EmbeddingSpace, target: &EmbeddingSpace) -> Vec<(usize, usize)> {
    space
        .vocab()
        .iter()
        .enumerate()
        .filter_map(|(i, w)| target.index_of(w).map(|j| (i, j)))
        .collect()
}

fn gather(m: &DMatrix<f64>, rows: impl ExactSizeIterator<Item = usize>) -> DMatrix<f64> {
    let n = rows.len();
    let mut out = DMatrix::zeros(n, m.ncols());
    for (k, i) in rows.enumerate() {
        out.set_row(k, &m.row(i));
    }
    out
}

/// Average over spaces of `||S_i M_i - Y||_F / sqrt(|S_i| d)`, where only
/// rows whose word is in `target` take part and `|S_i|` counts them.
pub fn residual_error(spaces: &[EmbeddingSpace], transforms: &[TransformMatrix], target: &EmbeddingSpace) -> f64 {
    let d = target.dim() as f64;
    let total: f64 = spaces
        .iter()
        .zip(transforms)
        .map(|(s, t)| {
            let pairs = shared_rows(s, target);
            if pairs.is_empty() {
                return 0.0;
            }
            let mapped = s.matrix() * &t.matrix;
            let ss: f64 = pairs
                .iter()
                .map(|&(i, j)| (mapped.row(i) - target.matrix().row(j)).norm_squared())
                .sum();
            ss.sqrt() / (pairs.len() as f64 * d).sqrt()
        })
        .sum();
    total / spaces.len() as f64
}

fn solve_against(space: &EmbeddingSpace, target: &EmbeddingSpace) -> Result<TransformMatrix> {
    let pairs = shared_rows(space, target);
    if pairs.len() < 2 {
        return Err(Error::InsufficientOverlap {
            domain: space.domain_id().to_string(),
            shared: pairs.len(),
        });
    }
    let x = gather(space.matrix(), pairs.iter().map(|p| p.0));
    let y = gather(target.matrix(), pairs.iter().map(|p| p.1));
    Ok(TransformMatrix {
        domain_id: space.domain_id().to_string(),
        matrix: procrustes_solve(&x, &y)?,
    })
}

/// Aligns `spaces` (already normalized) into a unified space. The first
/// space is the reference that seeds the target.
///
/// Running out of iterations is not an error: the result has
/// `converged == false` and a warning is logged.
pub fn align_spaces(spaces: &[EmbeddingSpace], config: &AlignmentConfig) -> Result<UnifiedSpace> {
    config.validate()?;
    if spaces.len() < 2 {
        return Err(Error::TooFewDomains(spaces.len()));
    }
    let d = check_dims(spaces)?;

    let union: std::collections::HashSet<&str> =
        spaces.iter().flat_map(|s| s.vocab().iter().map(String::as_str)).collect();
    for s in spaces {
        let shared = s.vocab().iter().filter(|w| union.contains(w.as_str())).count();
        if shared < d {
            log::warn!(
                "space '{}' shares {shared} words with the union vocabulary, fewer than d = {d}",
                s.domain_id()
            );
        }
    }

    let mut target = spaces[0].clone().with_domain_id(UNIFIED_DOMAIN);
    let mut transforms = Vec::new();
    let mut n_w = HashMap::new();
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;

    for _ in 0..config.max_iterations {
        transforms = spaces
            .par_iter()
            .map(|s| solve_against(s, &target))
            .collect::<Result<Vec<_>>>()?;
        (target, n_w) = update_target(spaces, &transforms, config.renormalize_target)?;
        let err = residual_error(spaces, &transforms, &target);
        log::debug!("alignment iteration {}: residual {err}", history.len() + 1);
        let prev = history.last().copied();
        history.push(err);
        if prev.is_some_and(|p| (err - p).abs() < config.tau) {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!(
            "alignment did not converge within {} iterations (last residual {:?})",
            config.max_iterations,
            history.last()
        );
    }
    Ok(UnifiedSpace {
        target,
        transforms,
        residual_history: history,
        n_w,
        converged,
    })
}

pub fn transform_file_name(domain_id: &str) -> String {
    format!("transform_{domain_id}.mat")
}

pub fn matrix_to_text(m: &DMatrix<f64>) -> String {
    let mut s = String::new();
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

pub fn matrix_from_text(text: &str, context: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(str::parse).collect::<Result<Vec<f64>, _>>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::parse(context, e.to_string()))?;
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::parse(context, "transform matrix is not square"));
    }
    Ok(DMatrix::from_row_iterator(d, d, rows.into_iter().flatten()))
}

impl UnifiedSpace {
    /// Writes `target.vec`, one `transform_<domain>.mat` per domain,
    /// `residuals.csv`, `coverage.csv` and a `meta.txt` sidecar.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.target.write(&dir.join("target.vec"))?;
        for t in &self.transforms {
            let p = dir.join(transform_file_name(&t.domain_id));
            fs::write(&p, matrix_to_text(&t.matrix)).map_err(|e| Error::io(&p, e))?;
        }
        let mut csv = String::from("iteration,error\n");
        for (i, e) in self.residual_history.iter().enumerate() {
            let _ = writeln!(csv, "{},{e}", i + 1);
        }
        let p = dir.join("residuals.csv");
        fs::write(&p, csv).map_err(|e| Error::io(&p, e))?;

        let mut coverage = String::from("word,n_w\n");
        for w in self.target.vocab() {
            let _ = writeln!(coverage, "{w},{}", self.n_w.get(w).copied().unwrap_or(0));
        }
        let p = dir.join("coverage.csv");
        fs::write(&p, coverage).map_err(|e| Error::io(&p, e))?;

        let domains: Vec<&str> = self.transforms.iter().map(|t| t.domain_id.as_str()).collect();
        let meta = kv::render([
            ("domains", domains.join(",")),
            ("converged", self.converged.to_string()),
            ("iterations", self.iterations().to_string()),
            ("final_residual", self.residual_history.last().map_or(String::new(), f64::to_string)),
        ]);
        let p = dir.join("meta.txt");
        fs::write(&p, meta).map_err(|e| Error::io(&p, e))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let meta = kv::read(&dir.join("meta.txt"))?;
        let ctx = dir.display().to_string();
        let domains: Vec<String> = meta
            .get("domains")
            .ok_or_else(|| Error::parse(&ctx, "meta.txt lacks 'domains'"))?
            .split(',')
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect();
        let converged = meta.get("converged").is_some_and(|v| v == "true");
        let target = EmbeddingSpace::read(&dir.join("target.vec"), UNIFIED_DOMAIN)?;
        let mut transforms = Vec::with_capacity(domains.len());
        for domain_id in domains {
            let p = dir.join(transform_file_name(&domain_id));
            let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            let matrix = matrix_from_text(&text, &p.display().to_string())?;
            transforms.push(TransformMatrix { domain_id, matrix });
        }
        let mut residual_history = Vec::new();
        let mut rdr = csv::Reader::from_path(dir.join("residuals.csv"))?;
        for rec in rdr.records() {
            let rec = rec?;
            let e: f64 = rec
                .get(1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(&ctx, "bad residuals.csv row"))?;
            residual_history.push(e);
        }
        let mut n_w = HashMap::new();
        let mut rdr = csv::Reader::from_path(dir.join("coverage.csv"))?;
        for rec in rdr.records() {
            let rec = rec?;
            let n: usize = rec
                .get(1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::parse(&ctx, "bad coverage.csv row"))?;
            n_w.insert(rec[0].to_string(), n);
        }
        Ok(UnifiedSpace {
            target,
            transforms,
            residual_history,
            n_w,
            converged,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(id: &str, rows: &[(&str, &[f64])]) -> EmbeddingSpace {
        EmbeddingSpace::from_rows(id, rows.iter().map(|(w, r)| (w.to_string(), r.to_vec())).collect()).unwrap()
    }

    fn identity(id: &str, d: usize) -> TransformMatrix {
        TransformMatrix {
            domain_id: id.into(),
            matrix: DMatrix::identity(d, d),
        }
    }

    #[test]
    fn averaging_identical_vectors() {
        let v: &[f64] = &[0.6, 0.8];
        let s = [space("a", &[("w", v)]), space("b", &[("w", v)])];
        let (y, n) = update_target(&s, &[identity("a", 2), identity("b", 2)], true).unwrap();
        assert!((y.vector("w").unwrap() - nalgebra::RowDVector::from_row_slice(v)).amax() < 1e-15);
        assert_eq!(n["w"], 2);
    }

    #[test]
    fn singleton_word_keeps_its_vector() {
        let s = [
            space("a", &[("w", &[0.6, 0.8]), ("x", &[1.0, 0.0])]),
            space("b", &[("x", &[1.0, 0.0])]),
        ];
        let (y, n) = update_target(&s, &[identity("a", 2), identity("b", 2)], true).unwrap();
        assert_eq!(y.vector("w").unwrap().as_slice(), [0.6, 0.8]);
        assert_eq!(n["w"], 1);
    }

    #[test]
    fn averaging_then_normalizing() {
        let s = [space("a", &[("w", &[1.0, 0.0])]), space("b", &[("w", &[0.0, 1.0])])];
        let t = [identity("a", 2), identity("b", 2)];
        let (raw, _) = update_target(&s, &t, false).unwrap();
        assert_eq!(raw.vector("w").unwrap().as_slice(), [0.5, 0.5]);
        let (y, _) = update_target(&s, &t, true).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((y.vector("w").unwrap() - nalgebra::RowDVector::from_row_slice(&[h, h])).amax() < 1e-15);
    }

    #[test]
    fn residual_zero_when_aligned() {
        let s = [space("a", &[("w", &[1.0, 0.0]), ("x", &[0.0, 1.0])])];
        let y = s[0].clone();
        assert_eq!(residual_error(&s, &[identity("a", 2)], &y), 0.0);
    }

    #[test]
    fn residual_hand_example() {
        // d = 1; space 1 has four words, each off by 1 (Frobenius norm 2).
        let words = ["a", "b", "c", "e"];
        let y = space("y", &words.map(|w| (w, &[0.0][..])));
        let s1 = space("s1", &words.map(|w| (w, &[1.0][..])));
        let s2 = space("s2", &words.map(|w| (w, &[0.0][..])));
        let t = [identity("s1", 1), identity("s2", 1)];
        let r = residual_error(&[s1.clone(), s2.clone()], &t, &y);
        assert!((r - 0.5).abs() < 1e-15);

        let s1c = space("s1", &words.map(|w| (w, &[3.0][..])));
        let r3 = residual_error(&[s1c, s2], &t, &y);
        assert!((r3 - 3.0 * r).abs() < 1e-15);
    }

    #[test]
    fn residual_ignores_rows_missing_from_target() {
        let y = space("y", &[("a", &[0.0])]);
        let s = space("s", &[("a", &[2.0]), ("zz", &[100.0])]);
        assert!((residual_error(&[s], &[identity("s", 1)], &y) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let inf = AlignmentConfig { tau: f64::INFINITY, ..Default::default() };
        assert!(matches!(inf.validate(), Err(Error::InvalidConfig(_))));
        assert!(AlignmentConfig { tau: 0.0, ..Default::default() }.validate().is_err());
        assert!(AlignmentConfig { max_iterations: 0, ..Default::default() }.validate().is_err());
        let s = space("a", &[("w", &[1.0, 0.0]), ("x", &[0.0, 1.0])]);
        assert!(align_spaces(&[s.clone(), s], &inf).is_err());
    }

    #[test]
    fn too_few_spaces_and_disjoint_vocab() {
        let a = space("a", &[("w", &[1.0, 0.0]), ("x", &[0.0, 1.0])]);
        assert!(matches!(align_spaces(std::slice::from_ref(&a), &Default::default()), Err(Error::TooFewDomains(1))));
        let b = space("b", &[("p", &[1.0, 0.0]), ("q", &[0.0, 1.0])]);
        let err = align_spaces(&[a, b], &Default::default()).unwrap_err();
        assert!(err.to_string().contains("'b'"), "{err}");
    }

    #[test]
    fn identical_spaces_converge_immediately() {
        let a = space("a", &[("w", &[1.0, 0.0]), ("x", &[0.0, 1.0]), ("y", &[0.6, -0.8])]);
        let u = align_spaces(&[a.clone(), a.clone().with_domain_id("b")], &Default::default()).unwrap();
        assert!(u.converged);
        assert_eq!(u.iterations(), 2);
        assert!(*u.residual_history.last().unwrap() < 1e-9);
        for t in &u.transforms {
            assert!((&t.matrix - DMatrix::<f64>::identity(2, 2)).amax() < 1e-8);
        }
    }

    #[test]
    fn non_convergence_is_flagged() {
        let a = space("a", &[("w", &[1.0, 0.0]), ("x", &[0.0, 1.0]), ("y", &[0.6, -0.8])]);
        let b = space("b", &[("w", &[0.0, 1.0]), ("x", &[1.0, 0.0]), ("y", &[0.6, 0.8])]);
        let cfg = AlignmentConfig { max_iterations: 1, ..Default::default() };
        let u = align_spaces(&[a, b], &cfg).unwrap();
        assert!(!u.converged);
        assert_eq!(u.iterations(), 1);
    }

    #[test]
    fn write_and_read_back() {
        let a = space("a", &[("w", &[1.0, 0.0]), ("x", &[0.0, 1.0]), ("y", &[0.6, -0.8])]);
        let b = space("b", &[("w", &[0.0, 1.0]), ("x", &[1.0, 0.0]), ("z", &[0.6, 0.8])]);
        let u = align_spaces(&[a, b], &Default::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        u.write(dir.path()).unwrap();
        let back = UnifiedSpace::read(dir.path()).unwrap();
        assert_eq!(back.target, u.target);
        assert_eq!(back.transforms, u.transforms);
        assert_eq!(back.residual_history, u.residual_history);
        assert_eq!(back.n_w, u.n_w);
        assert_eq!(back.converged, u.converged);
        let mat = fs::read_to_string(dir.path().join("transform_a.mat")).unwrap();
        assert_eq!(mat.lines().count(), 2);
    }
}
