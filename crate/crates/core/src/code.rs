//! Linear codes over prime fields and their brute-force oracles.
//!
//! A [`LinearCode`] is held as a full-rank generator matrix. The parity-check
//! matrix is derived from it on first use. Minimum distance and nearest
//! codeword are computed by enumerating all `q^k` codewords, and both refuse
//! to run when `q^k` exceeds [`enumeration_threshold`].

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldError};
use crate::matrix::Matrix;
use crate::ratio::{frac, Rational};

/// Default cap on the number of codewords an oracle may enumerate.
pub const DEFAULT_ENUMERATION_THRESHOLD: u64 = 1 << 24;

/// Codeword tables larger than this many symbols are not cached.
const TABLE_LIMIT: u128 = 1 << 24;

static ENUMERATION_THRESHOLD: AtomicU64 = AtomicU64::new(DEFAULT_ENUMERATION_THRESHOLD);

/// Current process-wide cap on enumerated codewords.
pub fn enumeration_threshold() -> u64 {
    ENUMERATION_THRESHOLD.load(Ordering::Relaxed)
}

/// Sets the process-wide cap on enumerated codewords. Zero is clamped to one.
pub fn set_enumeration_threshold(threshold: u64) {
    ENUMERATION_THRESHOLD.store(threshold.max(1), Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("generator has no rows")]
    EmptyGenerator,
    #[error("generator rows have differing lengths")]
    RaggedRows,
    #[error("symbol {value} is not a residue of GF({q})")]
    SymbolOutOfRange { value: u64, q: u32 },
    #[error("generator rows are linearly dependent: {rows} rows but rank {rank}")]
    RankDeficient { rows: usize, rank: usize },
    #[error("block length {n} exceeds the field size {q}")]
    TooLong { n: usize, q: u32 },
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("refusing to enumerate {q}^{k} codewords (threshold {threshold})")]
    TooLargeToEnumerate { q: u32, k: usize, threshold: u64 },
    #[error("projection onto an empty index set")]
    EmptyProjection,
    #[error("index set must be strictly increasing and inside [0, {n})")]
    InvalidIndexSet { n: usize },
}

/// A word of `Σ^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    field: Field,
    symbols: Vec<u32>,
}

impl Word {
    pub fn new(field: Field, symbols: Vec<u32>) -> Result<Self, CodeError> {
        if let Some(&bad) = symbols.iter().find(|&&s| !field.contains(s as u64)) {
            return Err(CodeError::SymbolOutOfRange {
                value: bad as u64,
                q: field.modulus(),
            });
        }
        Ok(Word { field, symbols })
    }

    pub(crate) fn new_unchecked(field: Field, symbols: Vec<u32>) -> Self {
        debug_assert!(symbols.iter().all(|&s| s < field.modulus()));
        Word { field, symbols }
    }

    pub fn from_values(field: Field, values: &[u64]) -> Result<Self, CodeError> {
        let mut symbols = Vec::with_capacity(values.len());
        for &v in values {
            if !field.contains(v) {
                return Err(CodeError::SymbolOutOfRange {
                    value: v,
                    q: field.modulus(),
                });
            }
            symbols.push(v as u32);
        }
        Ok(Word { field, symbols })
    }

    pub fn zeros(field: Field, n: usize) -> Self {
        Word {
            field,
            symbols: vec![0; n],
        }
    }

    /// The word that is 1 at `index` and 0 elsewhere.
    pub fn unit(field: Field, n: usize, index: usize) -> Self {
        let mut w = Word::zeros(field, n);
        w.symbols[index] = 1;
        w
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<u32> {
        self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.symbols.iter().filter(|&&s| s != 0).count()
    }
}

/// Hamming and relative distance between two words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distance {
    pub hamming: usize,
    pub relative: Rational,
}

pub fn distance(x: &Word, y: &Word) -> Result<Distance, CodeError> {
    if x.len() != y.len() {
        return Err(CodeError::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.field != y.field {
        return Err(FieldError::FieldMismatch {
            left: x.field.modulus(),
            right: y.field.modulus(),
        }
        .into());
    }
    let hamming = hamming(&x.symbols, &y.symbols);
    let relative = if x.is_empty() {
        frac(0, 1)
    } else {
        frac(hamming as u64, x.len() as u64)
    };
    Ok(Distance { hamming, relative })
}

#[inline]
pub(crate) fn hamming(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Closest codeword to a word, with the message that encodes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nearest {
    pub message: Vec<u32>,
    pub codeword: Word,
    pub hamming: usize,
    pub delta: Rational,
}

/// Rows dropped while building a code from a spanning set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankDeficiency {
    pub rows: usize,
    pub rank: usize,
}

/// An `[n, k, d]` linear code over a prime field.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Field,
    n: usize,
    generator: Arc<Matrix>,
    parity_check: OnceLock<Arc<Matrix>>,
    table: OnceLock<Option<Arc<Vec<u32>>>>,
    d_known: Option<usize>,
}

fn rows_to_matrix(field: Field, rows: &[Vec<u64>]) -> Result<Matrix, CodeError> {
    let Some(first) = rows.first() else {
        return Err(CodeError::EmptyGenerator);
    };
    let n = first.len();
    if n == 0 {
        return Err(CodeError::InvalidParameters("block length 0".into()));
    }
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        if row.len() != n {
            return Err(CodeError::RaggedRows);
        }
        out.push(Word::from_values(field, row)?.into_symbols());
    }
    Ok(Matrix::from_rows(&out))
}

impl LinearCode {
    /// Builds a code from a full-rank generator. Dependent rows are an error.
    pub fn from_generator(field: Field, rows: &[Vec<u64>]) -> Result<Self, CodeError> {
        match Self::from_spanning_rows(field, rows)? {
            (_, Some(def)) => Err(CodeError::RankDeficient {
                rows: def.rows,
                rank: def.rank,
            }),
            (code, None) => Ok(code),
        }
    }

    /// Builds a code from rows that span it, keeping the first maximal
    /// independent subset of rows (in order) as the generator.
    pub fn from_spanning_rows(
        field: Field,
        rows: &[Vec<u64>],
    ) -> Result<(Self, Option<RankDeficiency>), CodeError> {
        let m = rows_to_matrix(field, rows)?;
        Self::from_spanning_matrix(field, m)
    }

    fn from_spanning_matrix(
        field: Field,
        m: Matrix,
    ) -> Result<(Self, Option<RankDeficiency>), CodeError> {
        let kept = m.independent_rows(&field);
        if kept.is_empty() {
            return Err(CodeError::InvalidParameters(
                "rows span only the zero code".into(),
            ));
        }
        let deficiency = (kept.len() < m.rows()).then(|| RankDeficiency {
            rows: m.rows(),
            rank: kept.len(),
        });
        let generator = if deficiency.is_some() {
            m.select_rows(&kept)
        } else {
            m
        };
        Ok((Self::from_full_rank(field, generator), deficiency))
    }

    /// Caller guarantees `generator` has full row rank and at least one row.
    pub(crate) fn from_full_rank(field: Field, generator: Matrix) -> Self {
        LinearCode {
            field,
            n: generator.cols(),
            generator: Arc::new(generator),
            parity_check: OnceLock::new(),
            table: OnceLock::new(),
            d_known: None,
        }
    }

    /// Reed–Solomon code evaluating polynomials of degree `< k` at the points
    /// `0, 1, ..., n-1`. Row `i` of the generator is `(p^i)_p`.
    pub fn reed_solomon(field: Field, n: usize, k: usize) -> Result<Self, CodeError> {
        if n as u64 > field.modulus() as u64 {
            return Err(CodeError::TooLong {
                n,
                q: field.modulus(),
            });
        }
        if k == 0 || k > n {
            return Err(CodeError::InvalidParameters(format!(
                "need 1 <= k <= n, got n={n}, k={k}"
            )));
        }
        let mut g = Matrix::zeros(k, n);
        for i in 0..k {
            for p in 0..n {
                g.set(i, p, field.pow(p as u32, i as u64));
            }
        }
        Ok(Self::from_full_rank(field, g).with_known_distance(n - k + 1))
    }

    /// The `[n, 1, n]` repetition code.
    pub fn repetition(field: Field, n: usize) -> Result<Self, CodeError> {
        if n == 0 {
            return Err(CodeError::InvalidParameters("block length 0".into()));
        }
        Ok(Self::from_full_rank(field, Matrix::from_flat(1, n, vec![1; n])).with_known_distance(n))
    }

    /// The whole space `Σ^n`, an `[n, n, 1]` code.
    pub fn full(field: Field, n: usize) -> Result<Self, CodeError> {
        if n == 0 {
            return Err(CodeError::InvalidParameters("block length 0".into()));
        }
        Ok(Self::from_full_rank(field, Matrix::identity(n)).with_known_distance(1))
    }

    /// Records a minimum distance without checking it; see
    /// [`LinearCode::verify_known_distance`].
    pub fn with_known_distance(mut self, d: usize) -> Self {
        self.d_known = Some(d);
        self
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn known_distance(&self) -> Option<usize> {
        self.d_known
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    /// `(n - k) × n` matrix `H` with `H · Gᵀ = 0`.
    pub fn parity_check(&self) -> &Matrix {
        self.parity_check
            .get_or_init(|| Arc::new(self.generator.null_space(&self.field)))
    }

    /// `q^k`, saturating.
    pub fn codeword_count(&self) -> u128 {
        (self.field.modulus() as u128)
            .checked_pow(self.k() as u32)
            .unwrap_or(u128::MAX)
    }

    fn check_enumerable(&self) -> Result<(), CodeError> {
        let threshold = enumeration_threshold();
        if self.codeword_count() > threshold as u128 {
            return Err(CodeError::TooLargeToEnumerate {
                q: self.field.modulus(),
                k: self.k(),
                threshold,
            });
        }
        Ok(())
    }

    fn check_len(&self, len: usize) -> Result<(), CodeError> {
        if len != self.n {
            return Err(CodeError::LengthMismatch {
                expected: self.n,
                got: len,
            });
        }
        Ok(())
    }

    fn check_field(&self, w: &Word) -> Result<(), CodeError> {
        if w.field != self.field {
            return Err(FieldError::FieldMismatch {
                left: self.field.modulus(),
                right: w.field.modulus(),
            }
            .into());
        }
        Ok(())
    }

    /// `x · G`.
    pub fn encode(&self, message: &[u32]) -> Result<Word, CodeError> {
        if message.len() != self.k() {
            return Err(CodeError::LengthMismatch {
                expected: self.k(),
                got: message.len(),
            });
        }
        if let Some(&bad) = message.iter().find(|&&s| s >= self.field.modulus()) {
            return Err(CodeError::SymbolOutOfRange {
                value: bad as u64,
                q: self.field.modulus(),
            });
        }
        Ok(Word::new_unchecked(
            self.field,
            self.generator.left_mul_vec(&self.field, message),
        ))
    }

    pub fn is_codeword(&self, w: &Word) -> Result<bool, CodeError> {
        self.check_len(w.len())?;
        self.check_field(w)?;
        Ok(self.contains_symbols(&w.symbols))
    }

    /// Parity-check membership on raw residues; the length must be `n`.
    pub(crate) fn contains_symbols(&self, symbols: &[u32]) -> bool {
        let h = self.parity_check();
        (0..h.rows()).all(|r| {
            h.row(r)
                .iter()
                .zip(symbols)
                .fold(0u32, |acc, (&a, &b)| self.field.mul_add(acc, a, b))
                == 0
        })
    }

    /// Visits every codeword in lexicographic order of its message
    /// (first message symbol most significant).
    fn for_each_codeword<F>(&self, mut visit: F)
    where
        F: FnMut(&[u32], &[u32]) -> ControlFlow<()>,
    {
        let k = self.k();
        let q = self.field.modulus();
        let mut message = vec![0u32; k];
        let mut codeword = vec![0u32; self.n];
        loop {
            if visit(&message, &codeword).is_break() {
                return;
            }
            // Odometer step: bumping digit j by one (with wrap) adds row j.
            let mut j = k;
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                let row = self.generator.row(j);
                for (c, &g) in codeword.iter_mut().zip(row) {
                    *c = self.field.add(*c, g);
                }
                message[j] += 1;
                if message[j] < q {
                    break;
                }
                message[j] = 0;
            }
        }
    }

    fn table(&self) -> Option<&Arc<Vec<u32>>> {
        self.table
            .get_or_init(|| {
                let count = self.codeword_count();
                if count > enumeration_threshold() as u128
                    || count.saturating_mul(self.n as u128) > TABLE_LIMIT
                {
                    return None;
                }
                let mut all = Vec::with_capacity(count as usize * self.n);
                self.for_each_codeword(|_, c| {
                    all.extend_from_slice(c);
                    ControlFlow::Continue(())
                });
                Some(Arc::new(all))
            })
            .as_ref()
    }

    /// Message with lexicographic index `idx`.
    fn message_at(&self, mut idx: usize) -> Vec<u32> {
        let q = self.field.modulus() as usize;
        let mut m = vec![0u32; self.k()];
        for slot in m.iter_mut().rev() {
            *slot = (idx % q) as u32;
            idx /= q;
        }
        m
    }

    /// Brute-force minimum distance (minimum nonzero weight).
    pub fn min_distance(&self) -> Result<usize, CodeError> {
        self.check_enumerable()?;
        let mut best = usize::MAX;
        if let Some(table) = self.table() {
            for c in table.chunks_exact(self.n).skip(1) {
                let w = c.iter().filter(|&&s| s != 0).count();
                best = best.min(w);
            }
        } else {
            let mut first = true;
            self.for_each_codeword(|_, c| {
                if first {
                    first = false;
                    return ControlFlow::Continue(());
                }
                best = best.min(c.iter().filter(|&&s| s != 0).count());
                if best == 1 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
        }
        Ok(best)
    }

    /// Checks `d_known` against brute force. `None` if no distance is recorded.
    pub fn verify_known_distance(&self) -> Result<Option<bool>, CodeError> {
        match self.d_known {
            None => Ok(None),
            Some(d) => Ok(Some(self.min_distance()? == d)),
        }
    }

    /// Index (lexicographic message order) and Hamming distance of the closest
    /// codeword; ties go to the smallest index.
    pub(crate) fn nearest_index(&self, symbols: &[u32]) -> Result<(usize, usize), CodeError> {
        self.check_len(symbols.len())?;
        self.check_enumerable()?;
        let mut best = (0usize, usize::MAX);
        if let Some(table) = self.table() {
            for (idx, c) in table.chunks_exact(self.n).enumerate() {
                let d = hamming(c, symbols);
                if d < best.1 {
                    best = (idx, d);
                    if d == 0 {
                        break;
                    }
                }
            }
        } else {
            let mut idx = 0usize;
            self.for_each_codeword(|_, c| {
                let d = hamming(c, symbols);
                if d < best.1 {
                    best = (idx, d);
                }
                idx += 1;
                if best.1 == 0 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
        }
        Ok(best)
    }

    /// Hamming distance from `symbols` to the code. Codewords get 0 even
    /// when the code is too large to enumerate.
    pub(crate) fn distance_to_code(&self, symbols: &[u32]) -> Result<usize, CodeError> {
        match self.nearest_index(symbols) {
            Ok((_, d)) => Ok(d),
            Err(e @ CodeError::TooLargeToEnumerate { .. }) => {
                if self.contains_symbols(symbols) {
                    Ok(0)
                } else {
                    Err(e)
                }
            }
            Err(e) => Err(e),
        }
    }

    /// Relative distance `δ_C(w)`.
    pub fn relative_distance_to_code(&self, w: &Word) -> Result<Rational, CodeError> {
        self.check_field(w)?;
        let d = self.distance_to_code(&w.symbols)?;
        Ok(frac(d as u64, self.n as u64))
    }

    /// Closest codeword by brute force; ties go to the lexicographically
    /// smallest message.
    pub fn nearest_codeword(&self, w: &Word) -> Result<Nearest, CodeError> {
        self.check_field(w)?;
        let (idx, d) = self.nearest_index(&w.symbols)?;
        let message = self.message_at(idx);
        let codeword = self.encode(&message)?;
        Ok(Nearest {
            message,
            codeword,
            hamming: d,
            delta: frac(d as u64, self.n as u64),
        })
    }

    fn check_index_set(&self, indices: &[usize]) -> Result<(), CodeError> {
        if indices.is_empty() {
            return Err(CodeError::EmptyProjection);
        }
        let increasing = indices.windows(2).all(|w| w[0] < w[1]);
        if !increasing || *indices.last().unwrap() >= self.n {
            return Err(CodeError::InvalidIndexSet { n: self.n });
        }
        Ok(())
    }

    /// The code `{c|_I : c ∈ C}` for a strictly increasing index set `I`
    /// (0-based). When the projection is injective the generator keeps all
    /// rows, so messages encode consistently in both codes.
    pub fn project(&self, indices: &[usize]) -> Result<LinearCode, CodeError> {
        self.check_index_set(indices)?;
        let projected = self.generator.select_columns(indices);
        let (code, _) = Self::from_spanning_matrix(self.field, projected)?;
        if let Some(d) = self.d_known {
            if indices.len() + d > self.n {
                debug_assert_eq!(code.k(), self.k(), "projection on >= n-d+1 points is injective");
            }
        }
        Ok(code)
    }

    /// Whether `c ↦ c|_I` is injective on codewords.
    pub fn projection_is_injective(&self, indices: &[usize]) -> Result<bool, CodeError> {
        self.check_index_set(indices)?;
        Ok(self.generator.select_columns(indices).rank(&self.field) == self.k())
    }

    pub fn to_spec_file(&self) -> CodeSpecFile {
        CodeSpecFile {
            field: self.field.modulus() as u64,
            kind: CodeKind::Generator,
            n: self.n,
            k: self.k(),
            generator: Some(
                self.generator
                    .to_rows()
                    .into_iter()
                    .map(|r| r.into_iter().map(u64::from).collect())
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    ReedSolomon,
    Generator,
}

/// On-disk description of a code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpecFile {
    pub field: u64,
    pub kind: CodeKind,
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Vec<Vec<u64>>>,
}

impl CodeSpecFile {
    pub fn build(&self) -> Result<LinearCode, CodeError> {
        let field = Field::new(self.field)?;
        match self.kind {
            CodeKind::ReedSolomon => LinearCode::reed_solomon(field, self.n, self.k),
            CodeKind::Generator => {
                let rows = self.generator.as_deref().ok_or_else(|| {
                    CodeError::InvalidParameters("generator code without rows".into())
                })?;
                let code = LinearCode::from_generator(field, rows)?;
                if code.n() != self.n || code.k() != self.k {
                    return Err(CodeError::InvalidParameters(format!(
                        "declared [{}, {}] but generator gives [{}, {}]",
                        self.n,
                        self.k,
                        code.n(),
                        code.k()
                    )));
                }
                Ok(code)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn generator_construction() {
        let rep = LinearCode::from_generator(gf(2), &[vec![1, 1, 1]]).unwrap();
        assert_eq!((rep.n(), rep.k()), (3, 1));
        let full = LinearCode::from_generator(gf(2), &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!((full.n(), full.k()), (2, 2));
        assert_eq!(
            LinearCode::from_generator(gf(2), &[vec![1, 1], vec![1, 1]]).unwrap_err(),
            CodeError::RankDeficient { rows: 2, rank: 1 }
        );
        let (code, def) = LinearCode::from_spanning_rows(gf(2), &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(code.k(), 1);
        assert_eq!(def, Some(RankDeficiency { rows: 2, rank: 1 }));
        assert_eq!(
            LinearCode::from_generator(gf(2), &[vec![1, 2]]).unwrap_err(),
            CodeError::SymbolOutOfRange { value: 2, q: 2 }
        );
        assert_eq!(
            LinearCode::from_generator(gf(2), &[vec![1, 0], vec![1]]).unwrap_err(),
            CodeError::RaggedRows
        );
        assert_eq!(
            LinearCode::from_generator(gf(2), &[]).unwrap_err(),
            CodeError::EmptyGenerator
        );
    }

    #[test]
    fn parity_check_annihilates_generator() {
        let rs = LinearCode::reed_solomon(gf(11), 9, 4).unwrap();
        let h = rs.parity_check();
        assert_eq!(h.rows(), 5);
        assert!(h.mul(&rs.field(), &rs.generator().transpose()).is_zero());
    }

    #[test]
    fn reed_solomon_parameters() {
        let rs = LinearCode::reed_solomon(gf(31), 31, 1).unwrap();
        assert_eq!((rs.n(), rs.k(), rs.known_distance()), (31, 1, Some(31)));
        let rs = LinearCode::reed_solomon(gf(7), 7, 2).unwrap();
        assert_eq!(rs.min_distance().unwrap(), 6);
        assert_eq!(
            LinearCode::reed_solomon(gf(5), 6, 2).unwrap_err(),
            CodeError::TooLong { n: 6, q: 5 }
        );
        assert!(LinearCode::reed_solomon(gf(5), 4, 0).is_err());
        assert!(LinearCode::reed_solomon(gf(5), 4, 5).is_err());
        assert!(matches!(Field::new(8), Err(FieldError::NotPrime(8))));
    }

    #[test]
    fn encoding() {
        let rep = LinearCode::repetition(gf(2), 3).unwrap();
        assert_eq!(rep.encode(&[1]).unwrap().symbols(), &[1, 1, 1]);
        let rs = LinearCode::reed_solomon(gf(7), 7, 2).unwrap();
        assert_eq!(rs.encode(&[1, 1]).unwrap().symbols(), &[1, 2, 3, 4, 5, 6, 0]);
        assert_eq!(rs.encode(&[0, 0]).unwrap().weight(), 0);
        assert_eq!(
            rs.encode(&[1]).unwrap_err(),
            CodeError::LengthMismatch { expected: 2, got: 1 }
        );
    }

    #[test]
    fn membership() {
        let rep = LinearCode::repetition(gf(2), 3).unwrap();
        let f = rep.field();
        assert!(rep.is_codeword(&Word::zeros(f, 3)).unwrap());
        assert!(rep.is_codeword(&rep.encode(&[1]).unwrap()).unwrap());
        assert!(!rep.is_codeword(&Word::unit(f, 3, 0)).unwrap());
        assert!(rep.is_codeword(&Word::zeros(f, 2)).is_err());
        let full = LinearCode::full(f, 3).unwrap();
        assert!(full.is_codeword(&Word::unit(f, 3, 1)).unwrap());
    }

    #[test]
    fn distances() {
        let f = gf(2);
        let a = Word::from_values(f, &[1, 1, 1]).unwrap();
        let z = Word::zeros(f, 3);
        let e = Word::unit(f, 3, 0);
        assert_eq!(distance(&a, &a).unwrap().hamming, 0);
        assert_eq!(distance(&a, &z).unwrap().relative, frac(1, 1));
        assert_eq!(distance(&e, &z).unwrap().relative, frac(1, 3));
        assert!(distance(&e, &Word::zeros(f, 2)).is_err());
    }

    #[test]
    fn min_distances() {
        assert_eq!(LinearCode::repetition(gf(2), 3).unwrap().min_distance().unwrap(), 3);
        assert_eq!(LinearCode::full(gf(2), 3).unwrap().min_distance().unwrap(), 1);
    }

    #[test]
    fn nearest() {
        let rep = LinearCode::repetition(gf(2), 3).unwrap();
        let f = rep.field();
        let n = rep.nearest_codeword(&Word::unit(f, 3, 0)).unwrap();
        assert_eq!(n.codeword.symbols(), &[0, 0, 0]);
        assert_eq!(n.delta, frac(1, 3));
        let n = rep
            .nearest_codeword(&Word::from_values(f, &[1, 1, 0]).unwrap())
            .unwrap();
        assert_eq!(n.codeword.symbols(), &[1, 1, 1]);
        assert_eq!(n.delta, frac(1, 3));
        let c = rep.encode(&[1]).unwrap();
        assert_eq!(rep.nearest_codeword(&c).unwrap().delta, frac(0, 1));
    }

    #[test]
    fn nearest_tie_break_prefers_smallest_message() {
        // [2,1,2] repetition: [1,0] is at distance 1 from both codewords.
        let rep = LinearCode::repetition(gf(2), 2).unwrap();
        let n = rep
            .nearest_codeword(&Word::from_values(rep.field(), &[1, 0]).unwrap())
            .unwrap();
        assert_eq!(n.message, vec![0]);
    }

    #[test]
    fn threshold_refusal() {
        let rs = LinearCode::reed_solomon(gf(65521), 20, 3).unwrap();
        let w = Word::zeros(rs.field(), 20);
        assert!(matches!(
            rs.nearest_codeword(&w),
            Err(CodeError::TooLargeToEnumerate { q: 65521, k: 3, .. })
        ));
        assert!(rs.min_distance().is_err());
        // Membership still decides codewords without enumerating.
        assert_eq!(rs.relative_distance_to_code(&w).unwrap(), frac(0, 1));
        assert!(rs.relative_distance_to_code(&Word::unit(rs.field(), 20, 0)).is_err());
    }

    #[test]
    fn streaming_and_table_agree() {
        // 13^5 * 13 symbols > TABLE_LIMIT forces the streaming path.
        let rs = LinearCode::reed_solomon(gf(13), 13, 6).unwrap();
        assert!(rs.table().is_none());
        let small = LinearCode::reed_solomon(gf(13), 13, 2).unwrap();
        assert!(small.table().is_some());
        let w = Word::from_values(rs.field(), &[1, 5, 2, 0, 0, 3, 9, 9, 1, 0, 4, 4, 12]).unwrap();
        let a = rs.nearest_codeword(&w).unwrap();
        assert!(rs.is_codeword(&a.codeword).unwrap());
        assert_eq!(distance(&a.codeword, &w).unwrap().hamming, a.hamming);
    }

    #[test]
    fn projections() {
        let rep = LinearCode::repetition(gf(2), 3).unwrap();
        let p = rep.project(&[1, 2]).unwrap();
        assert_eq!((p.n(), p.k()), (2, 1));
        assert_eq!(p.min_distance().unwrap(), 2);
        let same = rep.project(&[0, 1, 2]).unwrap();
        assert_eq!(same.generator(), rep.generator());
        assert_eq!(rep.project(&[]).unwrap_err(), CodeError::EmptyProjection);
        assert!(rep.project(&[2, 1]).is_err());
        assert!(rep.project(&[3]).is_err());

        let rs = LinearCode::reed_solomon(gf(7), 7, 2).unwrap();
        let p = rs.project(&[0, 1]).unwrap();
        assert_eq!((p.n(), p.k()), (2, 2));
        assert!(rs.projection_is_injective(&[0, 1]).unwrap());
        assert!(!rs.projection_is_injective(&[0]).unwrap());
    }

    #[test]
    fn spec_file_round_trip() {
        let json = r#"{"field": 7, "kind": "reed_solomon", "n": 7, "k": 2}"#;
        let spec: CodeSpecFile = serde_json::from_str(json).unwrap();
        let code = spec.build().unwrap();
        assert_eq!(code.known_distance(), Some(6));
        let back = code.to_spec_file().build().unwrap();
        assert_eq!(back.generator(), code.generator());
    }
}
