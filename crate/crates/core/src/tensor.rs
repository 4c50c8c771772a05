//! Tensor product codes `C_1 ⊗ ⋯ ⊗ C_m` and multi-dimensional words.
//!
//! Words of shape `(n_1, ..., n_m)` are stored row-major with axis 0 the
//! slowest-varying, and all coordinates are 0-based. A word belongs to the
//! product code iff each of its axis-parallel lines along axis `b` is a
//! codeword of the factor `C_b`. The flattened generator of the product is the
//! Kronecker product `G_1 ⊗ G_2 ⊗ ⋯ ⊗ G_m`, which uses the same row-major
//! order, so flattened words and flattened codewords line up.

use thiserror::Error;

use crate::code::{CodeError, LinearCode, Word};
use crate::field::{Field, FieldError};
use crate::matrix::Matrix;

/// Flattened generators larger than this many entries are refused.
pub const FLATTEN_LIMIT: u128 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error("{got} symbols do not fill shape {shape:?}")]
    SymbolCount { shape: Vec<usize>, got: usize },
    #[error("axis {axis} out of range for a {arity}-dimensional word")]
    AxisOutOfRange { axis: usize, arity: usize },
    #[error("coordinate {index} out of range on axis {axis} (length {len})")]
    IndexOutOfRange { axis: usize, index: usize, len: usize },
    #[error("tensor product needs at least one factor")]
    NoFactors,
    #[error("partial word is not a codeword of the projected product code")]
    NotACodeword,
    #[error("index set on axis {axis} is too small to determine a unique extension")]
    Underdetermined { axis: usize },
    #[error("flattened product code is too large to build ({entries} generator entries)")]
    TooLarge { entries: u128 },
}

impl From<FieldError> for TensorError {
    fn from(e: FieldError) -> Self {
        TensorError::Code(e.into())
    }
}

fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for b in (0..shape.len().saturating_sub(1)).rev() {
        strides[b] = strides[b + 1] * shape[b + 1];
    }
    strides
}

/// Calls `visit(base, stride)` once per line along `axis`; the line's symbols
/// sit at `base + t * stride` for `t < shape[axis]`.
fn for_each_line(shape: &[usize], axis: usize, mut visit: impl FnMut(usize, usize)) {
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let block = shape[axis] * stride;
    for o in 0..outer {
        for inner in 0..stride {
            visit(o * block + inner, stride);
        }
    }
}

/// A word of `Σ^{n_1 × ⋯ × n_m}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TensorWord {
    field: Field,
    shape: Vec<usize>,
    symbols: Vec<u32>,
}

impl TensorWord {
    pub fn new(field: Field, shape: Vec<usize>, symbols: Vec<u32>) -> Result<Self, TensorError> {
        let expected: usize = shape.iter().product();
        if expected != symbols.len() {
            return Err(TensorError::SymbolCount {
                shape,
                got: symbols.len(),
            });
        }
        let word = Word::new(field, symbols)?;
        Ok(TensorWord {
            field,
            shape,
            symbols: word.into_symbols(),
        })
    }

    pub fn zeros(field: Field, shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        TensorWord {
            field,
            shape,
            symbols: vec![0; len],
        }
    }

    pub fn from_word(word: Word, shape: Vec<usize>) -> Result<Self, TensorError> {
        let field = word.field();
        Self::new(field, shape, word.into_symbols())
    }

    pub fn to_word(&self) -> Word {
        Word::new_unchecked(self.field, self.symbols.clone())
    }

    pub fn into_word(self) -> Word {
        Word::new_unchecked(self.field, self.symbols)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn arity(&self) -> usize {
        self.shape.len()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Row-major offset of a coordinate tuple.
    pub fn offset(&self, coords: &[usize]) -> Result<usize, TensorError> {
        if coords.len() != self.shape.len() {
            return Err(TensorError::ShapeMismatch {
                expected: self.shape.clone(),
                got: coords.to_vec(),
            });
        }
        let mut off = 0;
        for (axis, (&c, &len)) in coords.iter().zip(&self.shape).enumerate() {
            if c >= len {
                return Err(TensorError::IndexOutOfRange {
                    axis,
                    index: c,
                    len,
                });
            }
            off = off * len + c;
        }
        Ok(off)
    }

    pub fn get(&self, coords: &[usize]) -> Result<u32, TensorError> {
        Ok(self.symbols[self.offset(coords)?])
    }

    pub fn set(&mut self, coords: &[usize], value: u32) -> Result<(), TensorError> {
        if !self.field.contains(value as u64) {
            return Err(CodeError::SymbolOutOfRange {
                value: value as u64,
                q: self.field.modulus(),
            }
            .into());
        }
        let off = self.offset(coords)?;
        self.symbols[off] = value;
        Ok(())
    }

    /// `r_{b,i}`: the `(m-1)`-dimensional word with coordinate `axis` fixed to
    /// `index`. For a 1-dimensional word this is a single symbol (shape `[]`).
    pub fn axis_slice(&self, axis: usize, index: usize) -> Result<TensorWord, TensorError> {
        if axis >= self.shape.len() {
            return Err(TensorError::AxisOutOfRange {
                axis,
                arity: self.shape.len(),
            });
        }
        if index >= self.shape[axis] {
            return Err(TensorError::IndexOutOfRange {
                axis,
                index,
                len: self.shape[axis],
            });
        }
        let stride: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let block = self.shape[axis] * stride;
        let mut symbols = Vec::with_capacity(outer * stride);
        for o in 0..outer {
            let start = o * block + index * stride;
            symbols.extend_from_slice(&self.symbols[start..start + stride]);
        }
        let mut shape = self.shape.clone();
        shape.remove(axis);
        Ok(TensorWord {
            field: self.field,
            shape,
            symbols,
        })
    }

    /// Restriction to `I_1 × ⋯ × I_m` (each index set 0-based and strictly
    /// increasing).
    pub fn restrict(&self, index_sets: &[Vec<usize>]) -> Result<TensorWord, TensorError> {
        if index_sets.len() != self.shape.len() {
            return Err(TensorError::ShapeMismatch {
                expected: self.shape.clone(),
                got: index_sets.iter().map(Vec::len).collect(),
            });
        }
        for (axis, set) in index_sets.iter().enumerate() {
            if set.is_empty() {
                return Err(CodeError::EmptyProjection.into());
            }
            if !set.windows(2).all(|w| w[0] < w[1]) || *set.last().unwrap() >= self.shape[axis] {
                return Err(CodeError::InvalidIndexSet {
                    n: self.shape[axis],
                }
                .into());
            }
        }
        let new_shape: Vec<usize> = index_sets.iter().map(Vec::len).collect();
        let total: usize = new_shape.iter().product();
        let strides = row_major_strides(&self.shape);
        let mut symbols = Vec::with_capacity(total);
        let mut counter = vec![0usize; new_shape.len()];
        for _ in 0..total {
            let off: usize = counter
                .iter()
                .enumerate()
                .map(|(axis, &c)| index_sets[axis][c] * strides[axis])
                .sum();
            symbols.push(self.symbols[off]);
            for axis in (0..counter.len()).rev() {
                counter[axis] += 1;
                if counter[axis] < new_shape[axis] {
                    break;
                }
                counter[axis] = 0;
            }
        }
        Ok(TensorWord {
            field: self.field,
            shape: new_shape,
            symbols,
        })
    }
}

/// The product code `C_1 ⊗ ⋯ ⊗ C_m`; axis `b` of its words is governed by
/// `factors[b]`.
#[derive(Debug, Clone)]
pub struct TensorCode {
    factors: Vec<LinearCode>,
}

impl TensorCode {
    pub fn new(factors: Vec<LinearCode>) -> Result<Self, TensorError> {
        let Some(first) = factors.first() else {
            return Err(TensorError::NoFactors);
        };
        let field = first.field();
        if let Some(other) = factors.iter().find(|c| c.field() != field) {
            return Err(FieldError::FieldMismatch {
                left: field.modulus(),
                right: other.field().modulus(),
            }
            .into());
        }
        Ok(TensorCode { factors })
    }

    /// `C^m`.
    pub fn power(code: &LinearCode, m: usize) -> Result<Self, TensorError> {
        if m == 0 {
            return Err(TensorError::NoFactors);
        }
        Self::new(vec![code.clone(); m])
    }

    pub fn factors(&self) -> &[LinearCode] {
        &self.factors
    }

    pub fn arity(&self) -> usize {
        self.factors.len()
    }

    pub fn field(&self) -> Field {
        self.factors[0].field()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(LinearCode::n).collect()
    }

    pub fn message_shape(&self) -> Vec<usize> {
        self.factors.iter().map(LinearCode::k).collect()
    }

    /// `Π n_b`, or `None` on overflow.
    pub fn block_length(&self) -> Option<usize> {
        self.factors.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.n()))
    }

    /// `Π k_b`, or `None` on overflow.
    pub fn dimension(&self) -> Option<usize> {
        self.factors.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.k()))
    }

    /// `Π d_b` when every factor has a recorded distance.
    pub fn distance(&self) -> Option<usize> {
        self.factors
            .iter()
            .try_fold(1usize, |acc, c| acc.checked_mul(c.known_distance()?))
    }

    /// The code on the remaining axes after dropping `axis`; `None` for a
    /// single factor.
    pub fn without_axis(&self, axis: usize) -> Option<TensorCode> {
        if self.factors.len() < 2 || axis >= self.factors.len() {
            return None;
        }
        let mut factors = self.factors.clone();
        factors.remove(axis);
        Some(TensorCode { factors })
    }

    fn check_shape(&self, shape: &[usize]) -> Result<(), TensorError> {
        let expected = self.shape();
        if shape != expected.as_slice() {
            return Err(TensorError::ShapeMismatch {
                expected,
                got: shape.to_vec(),
            });
        }
        Ok(())
    }

    /// Applies `G_b` along every axis of a message tensor of shape
    /// `(k_1, ..., k_m)`.
    pub fn encode(&self, message: &TensorWord) -> Result<TensorWord, TensorError> {
        let expected = self.message_shape();
        if message.shape() != expected.as_slice() {
            return Err(TensorError::ShapeMismatch {
                expected,
                got: message.shape().to_vec(),
            });
        }
        let field = self.field();
        let mut shape = message.shape.clone();
        let mut data = message.symbols.clone();
        for (axis, code) in self.factors.iter().enumerate() {
            let mut next_shape = shape.clone();
            next_shape[axis] = code.n();
            let mut next = vec![0u32; next_shape.iter().product()];
            let next_stride: usize = next_shape[axis + 1..].iter().product();
            let mut line = vec![0u32; code.k()];
            for_each_line(&shape, axis, |base, stride| {
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + t * stride];
                }
                let encoded = code.generator().left_mul_vec(&field, &line);
                // Same (outer, inner) position in the widened tensor.
                let o = base / (shape[axis] * stride);
                let inner = base % stride;
                let nbase = o * code.n() * next_stride + inner;
                for (t, &v) in encoded.iter().enumerate() {
                    next[nbase + t * next_stride] = v;
                }
            });
            shape = next_shape;
            data = next;
        }
        Ok(TensorWord {
            field,
            shape,
            symbols: data,
        })
    }

    /// Axis-parallel membership: every line along axis `b` lies in `C_b`.
    pub fn contains(&self, word: &TensorWord) -> Result<bool, TensorError> {
        self.check_shape(word.shape())?;
        if word.field() != self.field() {
            return Err(FieldError::FieldMismatch {
                left: self.field().modulus(),
                right: word.field().modulus(),
            }
            .into());
        }
        Ok(self.contains_flat(&word.symbols))
    }

    /// Axis-parallel membership of a flattened word of length `Π n_b`.
    pub(crate) fn contains_flat(&self, symbols: &[u32]) -> bool {
        let shape = self.shape();
        for (axis, code) in self.factors.iter().enumerate() {
            let mut line = vec![0u32; code.n()];
            let mut ok = true;
            for_each_line(&shape, axis, |base, stride| {
                if !ok {
                    return;
                }
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = symbols[base + t * stride];
                }
                ok = code.contains_symbols(&line);
            });
            if !ok {
                return false;
            }
        }
        true
    }

    /// The flattened code with generator `G_1 ⊗ ⋯ ⊗ G_m`.
    pub fn to_linear_code(&self) -> Result<LinearCode, TensorError> {
        let entries = self
            .factors
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul((c.k() * c.n()) as u128));
        if entries > FLATTEN_LIMIT {
            return Err(TensorError::TooLarge { entries });
        }
        let field = self.field();
        let mut g: Matrix = self.factors[0].generator().clone();
        for c in &self.factors[1..] {
            g = g.kron(&field, c.generator());
        }
        // A Kronecker product of full-rank matrices has full rank.
        let code = LinearCode::from_full_rank(field, g);
        Ok(match self.distance() {
            Some(d) => code.with_known_distance(d),
            None => code,
        })
    }

    /// `C'_1 ⊗ ⋯ ⊗ C'_m` with `C'_b` the projection of `C_b` onto `I_b`.
    pub fn project(&self, index_sets: &[Vec<usize>]) -> Result<TensorCode, TensorError> {
        if index_sets.len() != self.arity() {
            return Err(TensorError::ShapeMismatch {
                expected: self.shape(),
                got: index_sets.iter().map(Vec::len).collect(),
            });
        }
        let factors = self
            .factors
            .iter()
            .zip(index_sets)
            .map(|(c, set)| c.project(set))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TensorCode { factors })
    }

    /// Extends a codeword of the projected product on `I_1 × ⋯ × I_m` to the
    /// unique codeword of the full product agreeing with it there.
    ///
    /// Each axis is handled in turn: every line along that axis is solved for
    /// its message against the projected factor generator and re-encoded at
    /// full length.
    pub fn extend(
        &self,
        index_sets: &[Vec<usize>],
        partial: &TensorWord,
    ) -> Result<TensorWord, TensorError> {
        let projected_shape: Vec<usize> = index_sets.iter().map(Vec::len).collect();
        if index_sets.len() != self.arity() || partial.shape() != projected_shape.as_slice() {
            return Err(TensorError::ShapeMismatch {
                expected: projected_shape,
                got: partial.shape().to_vec(),
            });
        }
        let field = self.field();
        let mut projected = Vec::with_capacity(self.arity());
        for (axis, (code, set)) in self.factors.iter().zip(index_sets).enumerate() {
            // Validates the index set as a side effect.
            let injective = code.projection_is_injective(set)?;
            let too_few = code
                .known_distance()
                .is_some_and(|d| set.len() + d < code.n() + 1);
            if too_few || !injective {
                return Err(TensorError::Underdetermined { axis });
            }
            projected.push(code.generator().select_columns(set));
        }

        let mut shape = projected_shape;
        let mut data = partial.symbols.clone();
        for (axis, code) in self.factors.iter().enumerate() {
            let mut next_shape = shape.clone();
            next_shape[axis] = code.n();
            let mut next = vec![0u32; next_shape.iter().product()];
            let next_stride: usize = next_shape[axis + 1..].iter().product();
            let mut line = vec![0u32; shape[axis]];
            let mut failed = false;
            for_each_line(&shape, axis, |base, stride| {
                if failed {
                    return;
                }
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + t * stride];
                }
                let Some((message, _)) = projected[axis].solve_left(&field, &line) else {
                    failed = true;
                    return;
                };
                let full = code.generator().left_mul_vec(&field, &message);
                let o = base / (shape[axis] * stride);
                let inner = base % stride;
                let nbase = o * code.n() * next_stride + inner;
                for (t, &v) in full.iter().enumerate() {
                    next[nbase + t * next_stride] = v;
                }
            });
            if failed {
                return Err(TensorError::NotACodeword);
            }
            shape = next_shape;
            data = next;
        }
        let full = TensorWord {
            field,
            shape,
            symbols: data,
        };
        if full.restrict(index_sets)? != *partial {
            return Err(TensorError::NotACodeword);
        }
        Ok(full)
    }
}

/// `C_1 ⊗ C_2` as the code of `n_2 × n_1` matrices `M_2ᵀ X M_1`, flattened
/// row-major (rows are codewords of `C_1`, columns codewords of `C_2`). Its
/// generator is `M_2 ⊗ M_1`.
pub fn tensor_product(c1: &LinearCode, c2: &LinearCode) -> Result<LinearCode, TensorError> {
    TensorCode::new(vec![c2.clone(), c1.clone()])?.to_linear_code()
}
