//! Per-domain word embedding spaces: skip-gram training, normalization and
//! the plain-text vector format.

mod noise;
mod sgns;
mod vocab;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, RowDVector};

use crate::error::{Error, Result};

pub use noise::NoiseDistribution;
pub use sgns::{sigmoid, train_sgns, Trained, TrainingConfig};
pub use vocab::{build_vocab, Vocab};

/// A vocabulary with one `d`-dimensional row vector per word.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    domain_id: String,
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    matrix: DMatrix<f64>,
}

impl EmbeddingSpace {
    /// `matrix` has one row per vocabulary entry.
    pub fn new(domain_id: &str, vocab: Vec<String>, matrix: DMatrix<f64>) -> Result<Self> {
        if vocab.len() != matrix.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "{} words but {} rows",
                vocab.len(),
                matrix.nrows()
            )));
        }
        let mut index = HashMap::with_capacity(vocab.len());
        for (i, w) in vocab.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::parse("embedding space", format!("duplicate word '{w}'")));
            }
        }
        if let Some(i) = matrix.row_iter().position(|r| r.iter().any(|x| !x.is_finite())) {
            return Err(Error::parse("embedding space", format!("non-finite entry for '{}'", vocab[i])));
        }
        Ok(Self {
            domain_id: domain_id.to_string(),
            vocab,
            index,
            matrix,
        })
    }

    pub fn from_rows(domain_id: &str, rows: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.1.len());
        if let Some((w, r)) = rows.iter().find(|r| r.1.len() != d) {
            return Err(Error::ShapeMismatch(format!("row '{w}' has {} columns, expected {d}", r.len())));
        }
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.1.iter().copied()).collect();
        let matrix = DMatrix::from_row_slice(rows.len(), d, &flat);
        Self::new(domain_id, rows.into_iter().map(|r| r.0).collect(), matrix)
    }

    pub fn domain_id(&self) -> &str {
        &self.domain_id
    }

    pub fn with_domain_id(mut self, domain_id: &str) -> Self {
        self.domain_id = domain_id.to_string();
        self
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn contains(&self, w: &str) -> bool {
        self.index.contains_key(w)
    }

    pub fn index_of(&self, w: &str) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn row(&self, i: usize) -> RowDVector<f64> {
        self.matrix.row(i).into_owned()
    }

    pub fn vector(&self, w: &str) -> Option<RowDVector<f64>> {
        self.index_of(w).map(|i| self.row(i))
    }

    /// Returns a copy of this space with every row multiplied by `m`
    /// (`d x d`).
    pub fn transformed(&self, m: &DMatrix<f64>) -> Self {
        Self {
            domain_id: self.domain_id.clone(),
            vocab: self.vocab.clone(),
            index: self.index.clone(),
            matrix: &self.matrix * m,
        }
    }

    /// Writes the text format: a `<vocab_size> <d>` header, then one line
    /// per word with `d` space-separated reals.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.len(), self.dim());
        for (i, w) in self.vocab.iter().enumerate() {
            s.push_str(w);
            for x in self.matrix.row(i).iter() {
                let _ = write!(s, " {x}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(domain_id: &str, text: &str) -> Result<Self> {
        let ctx = format!("embeddings for '{domain_id}'");
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::parse(&ctx, "missing header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| Error::parse(&ctx, format!("bad header '{header}'")))?;
        let [n, d] = dims[..] else {
            return Err(Error::parse(&ctx, format!("bad header '{header}'")));
        };
        let mut rows = Vec::with_capacity(n);
        for (lineno, line) in lines.enumerate() {
            let mut parts = line.split_whitespace();
            let word = parts.next().unwrap_or_default().to_string();
            let values: Vec<f64> = parts
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| Error::parse(&ctx, format!("line {}: bad number", lineno + 2)))?;
            if values.len() != d {
                return Err(Error::parse(
                    &ctx,
                    format!("line {}: expected {d} values, got {}", lineno + 2, values.len()),
                ));
            }
            rows.push((word, values));
        }
        if rows.len() != n {
            return Err(Error::parse(&ctx, format!("header says {n} words, found {}", rows.len())));
        }
        if n == 0 {
            return Self::new(domain_id, Vec::new(), DMatrix::zeros(0, d));
        }
        Self::from_rows(domain_id, rows)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path, domain_id: &str) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(domain_id, &text)
    }
}

fn unit_rows(matrix: &mut DMatrix<f64>, vocab: &[String]) -> Result<()> {
    for (i, mut row) in matrix.row_iter_mut().enumerate() {
        let norm = row.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNormRow(vocab[i].clone()));
        }
        row /= norm;
    }
    Ok(())
}

/// Length-normalizes every row, subtracts the per-dimension mean, then
/// length-normalizes again.
pub fn normalize_space(space: &EmbeddingSpace) -> Result<EmbeddingSpace> {
    let mut m = space.matrix.clone();
    unit_rows(&mut m, &space.vocab)?;
    let mean = m.row_mean();
    for mut row in m.row_iter_mut() {
        row -= &mean;
    }
    // Centered rows below this norm are rounding residue of a zero vector.
    for (i, row) in m.row_iter().enumerate() {
        if row.norm() < 1e-12 {
            return Err(Error::ZeroNormRow(space.vocab[i].clone()));
        }
    }
    unit_rows(&mut m, &space.vocab)?;
    Ok(EmbeddingSpace {
        matrix: m,
        ..space.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(rows: &[(&str, &[f64])]) -> EmbeddingSpace {
        EmbeddingSpace::from_rows("t", rows.iter().map(|(w, r)| (w.to_string(), r.to_vec())).collect()).unwrap()
    }

    #[test]
    fn one_row_space_collapses() {
        let err = normalize_space(&space(&[("a", &[3.0, 4.0])])).unwrap_err();
        assert!(err.to_string().contains("zero-norm row"));
    }

    #[test]
    fn symmetric_pair_unchanged() {
        let s = normalize_space(&space(&[("a", &[1.0, 0.0]), ("b", &[-1.0, 0.0])])).unwrap();
        assert_eq!(s.row(0).as_slice(), [1.0, 0.0]);
        assert_eq!(s.row(1).as_slice(), [-1.0, 0.0]);
    }

    #[test]
    fn zero_row_named() {
        let err = normalize_space(&space(&[("a", &[1.0, 0.0]), ("zz", &[0.0, 0.0])])).unwrap_err();
        assert!(err.to_string().contains("zz"));
    }

    #[test]
    fn rows_unit_after_normalization() {
        let s = normalize_space(&space(&[
            ("a", &[1.0, 2.0, 0.5]),
            ("b", &[-0.3, 0.1, 4.0]),
            ("c", &[2.0, -1.0, 1.0]),
        ]))
        .unwrap();
        for r in s.matrix().row_iter() {
            assert!((r.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let s = space(&[("a", &[0.1, 1.0 / 3.0]), ("b", &[-2.5e-17, 7.0])]);
        let back = EmbeddingSpace::from_text("t", &s.to_text()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn reader_accepts_foreign_whitespace() {
        let s = EmbeddingSpace::from_text("x", "2 2\nfoo\t1 2 \n\nbar 3   4\n").unwrap();
        assert_eq!(s.vocab(), ["foo", "bar"]);
        assert_eq!(s.row(1).as_slice(), [3.0, 4.0]);
    }

    #[test]
    fn reader_rejects_bad_shapes() {
        assert!(EmbeddingSpace::from_text("x", "2 2\nfoo 1 2\n").is_err());
        assert!(EmbeddingSpace::from_text("x", "1 2\nfoo 1\n").is_err());
        assert!(EmbeddingSpace::from_text("x", "1 2\nfoo 1 nan\n").is_err());
        assert!(EmbeddingSpace::from_text("x", "2 1\nfoo 1\nfoo 2\n").is_err());
    }
}
