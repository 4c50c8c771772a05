//! Ordered bipartite graphs and Tanner product codes.
//!
//! An `(n, m, t)`-ordered graph has left vertices `0..n` and `m` right
//! vertices, each with an ordered list of `t` left neighbours. The Tanner
//! product `TPC(G, C_small)` is the set of words whose view at every right
//! vertex is a codeword of `C_small`.
//!
//! Graphs are materialised as flat adjacency arrays up to
//! [`graph_budget`] entries. Larger ones keep a computed form (product rule
//! or composition of two smaller graphs) and answer [`OrderedGraph::neighbor`]
//! on demand.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeError, LinearCode, Word};
use crate::ratio::{frac, Rational};

/// Default cap on materialised adjacency entries.
pub const DEFAULT_GRAPH_BUDGET: u64 = 1 << 26;

static GRAPH_BUDGET: AtomicU64 = AtomicU64::new(DEFAULT_GRAPH_BUDGET);

pub fn graph_budget() -> u64 {
    GRAPH_BUDGET.load(Ordering::Relaxed)
}

pub fn set_graph_budget(entries: u64) {
    GRAPH_BUDGET.store(entries, Ordering::Relaxed);
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no right vertices")]
    NoRightVertices,
    #[error("neighbour lists have differing lengths")]
    RaggedLists,
    #[error("neighbour {entry} of right vertex {list} is outside [0, {n_left})")]
    EntryOutOfRange {
        list: usize,
        entry: usize,
        n_left: usize,
    },
    #[error("cannot compose: inner graph has {inner_left} left vertices but outer degree is {outer_degree}")]
    DegreeMismatch {
        outer_degree: usize,
        inner_left: usize,
    },
    #[error("graph is too large: {0}")]
    TooLarge(String),
    #[error("invalid graph parameters: {0}")]
    InvalidParameters(String),
    #[error("small code has length {code_len} but the graph has right degree {degree}")]
    CodeLengthMismatch { code_len: usize, degree: usize },
    #[error("graph is not left-regular")]
    NotLeftRegular,
    #[error("expansion bound does not apply: |S| = {s} exceeds |L|/4 with |L| = {left}")]
    Inapplicable { s: usize, left: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone)]
enum Adjacency {
    Explicit(Arc<[u32]>),
    /// `G^n_m`.
    Product { n: usize, m: usize },
    Composed {
        outer: Arc<OrderedGraph>,
        inner: Arc<OrderedGraph>,
    },
}

/// An `(n_left, m_right, degree)`-ordered bipartite graph.
#[derive(Debug, Clone)]
pub struct OrderedGraph {
    n_left: usize,
    m_right: usize,
    degree: usize,
    adjacency: Adjacency,
}

fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

impl OrderedGraph {
    /// Validated explicit graph from 0-based neighbour lists.
    pub fn new(n_left: usize, lists: &[Vec<usize>]) -> Result<Self, GraphError> {
        let Some(first) = lists.first() else {
            return Err(GraphError::NoRightVertices);
        };
        let degree = first.len();
        if n_left > u32::MAX as usize {
            return Err(GraphError::TooLarge(format!("{n_left} left vertices")));
        }
        let mut flat = Vec::with_capacity(lists.len() * degree);
        for (j, list) in lists.iter().enumerate() {
            if list.len() != degree {
                return Err(GraphError::RaggedLists);
            }
            for &entry in list {
                if entry >= n_left {
                    return Err(GraphError::EntryOutOfRange {
                        list: j,
                        entry,
                        n_left,
                    });
                }
                flat.push(entry as u32);
            }
        }
        Ok(OrderedGraph {
            n_left,
            m_right: lists.len(),
            degree,
            adjacency: Adjacency::Explicit(flat.into()),
        })
    }

    /// `G^n_m`: left vertices are the points of `[n]^m` in row-major order;
    /// right vertex `b * n + i` is the hyperplane `{x : x_b = i}`, listed in
    /// row-major order of the remaining coordinates.
    pub fn product(n: usize, m: usize) -> Result<Self, GraphError> {
        if n == 0 || m == 0 {
            return Err(GraphError::InvalidParameters(format!(
                "product graph needs n, m >= 1 (got n={n}, m={m})"
            )));
        }
        let n_left =
            checked_pow(n, m).ok_or_else(|| GraphError::TooLarge(format!("{n}^{m} left vertices")))?;
        let degree = n_left / n;
        let m_right = m
            .checked_mul(n)
            .ok_or_else(|| GraphError::TooLarge(format!("{m}*{n} right vertices")))?;
        let graph = OrderedGraph {
            n_left,
            m_right,
            degree,
            adjacency: Adjacency::Product { n, m },
        };
        Ok(graph.materialize_within_budget())
    }

    /// `G^n_{m,m'}`: `G^n_m` for `m' = m - 1`, else `G^n_m © G^n_{m-1,m'}`.
    pub fn iterated(n: usize, m: usize, m_inner: usize) -> Result<Self, GraphError> {
        if m_inner == 0 || m_inner >= m {
            return Err(GraphError::InvalidParameters(format!(
                "iterated graph needs 1 <= m' < m (got m={m}, m'={m_inner})"
            )));
        }
        let outer = Self::product(n, m)?;
        if m_inner == m - 1 {
            return Ok(outer);
        }
        outer.compose(&Self::iterated(n, m - 1, m_inner)?)
    }

    /// `H^n_t`: `G^n_{4,2}` for `t = 2`, else `G^{n^{2^{t-2}}}_{4,2} © H^n_{t-1}`.
    pub fn square_test(n: usize, t: usize) -> Result<Self, GraphError> {
        if t < 2 {
            return Err(GraphError::InvalidParameters(format!(
                "square test graph needs t >= 2 (got {t})"
            )));
        }
        if t == 2 {
            return Self::iterated(n, 4, 2);
        }
        let exp = 1usize
            .checked_shl(t as u32 - 2)
            .filter(|&e| e > 0)
            .ok_or_else(|| GraphError::TooLarge(format!("2^{} exponent", t - 2)))?;
        let big_n = checked_pow(n, exp)
            .ok_or_else(|| GraphError::TooLarge(format!("{n}^(2^{}) block length", t - 2)))?;
        Self::iterated(big_n, 4, 2)?.compose(&Self::square_test(n, t - 1)?)
    }

    /// `G © G'`: right vertex `(j, j')` sits at `j * G'.m_right + j'` and its
    /// `i`-th neighbour is `ℓ_{j, ℓ'_{j', i}}`.
    pub fn compose(&self, inner: &OrderedGraph) -> Result<Self, GraphError> {
        if inner.n_left != self.degree {
            return Err(GraphError::DegreeMismatch {
                outer_degree: self.degree,
                inner_left: inner.n_left,
            });
        }
        let m_right = self
            .m_right
            .checked_mul(inner.m_right)
            .ok_or_else(|| GraphError::TooLarge("composed right vertex count".into()))?;
        let graph = OrderedGraph {
            n_left: self.n_left,
            m_right,
            degree: inner.degree,
            adjacency: Adjacency::Composed {
                outer: Arc::new(self.clone()),
                inner: Arc::new(inner.clone()),
            },
        };
        Ok(graph.materialize_within_budget())
    }

    fn entries(&self) -> Option<usize> {
        self.m_right.checked_mul(self.degree)
    }

    fn materialize_within_budget(self) -> Self {
        let fits = self
            .entries()
            .is_some_and(|e| (e as u64) <= graph_budget())
            && self.n_left <= u32::MAX as usize;
        if !fits || matches!(self.adjacency, Adjacency::Explicit(_)) {
            return self;
        }
        let mut flat = Vec::with_capacity(self.m_right * self.degree);
        for j in 0..self.m_right {
            for i in 0..self.degree {
                flat.push(self.neighbor(j, i) as u32);
            }
        }
        OrderedGraph {
            adjacency: Adjacency::Explicit(flat.into()),
            ..self
        }
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn m_right(&self) -> usize {
        self.m_right
    }

    /// Uniform right degree `t`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_materialized(&self) -> bool {
        matches!(self.adjacency, Adjacency::Explicit(_))
    }

    /// `ℓ_{j,i}`. Panics if `j` or `i` is out of range.
    pub fn neighbor(&self, j: usize, i: usize) -> usize {
        assert!(j < self.m_right && i < self.degree, "vertex index out of range");
        match &self.adjacency {
            Adjacency::Explicit(flat) => flat[j * self.degree + i] as usize,
            Adjacency::Product { n, m } => {
                let (b, coord) = (j / n, j % n);
                // Remaining m-1 coordinates of `i` in row-major order; insert
                // `coord` at axis `b`.
                let low_span = checked_pow(*n, m - 1 - b).expect("fits: n^m does");
                let high = i / low_span;
                let low = i % low_span;
                (high * n + coord) * low_span + low
            }
            Adjacency::Composed { outer, inner } => {
                let (jo, ji) = (j / inner.m_right, j % inner.m_right);
                outer.neighbor(jo, inner.neighbor(ji, i))
            }
        }
    }

    /// `ℓ_j` as a vector.
    pub fn list(&self, j: usize) -> Vec<usize> {
        (0..self.degree).map(|i| self.neighbor(j, i)).collect()
    }

    pub fn lists(&self) -> Vec<Vec<usize>> {
        (0..self.m_right).map(|j| self.list(j)).collect()
    }

    /// Writes `w|_{ℓ_j}` into `out`.
    pub(crate) fn view_into(&self, symbols: &[u32], j: usize, out: &mut Vec<u32>) {
        out.clear();
        match &self.adjacency {
            Adjacency::Explicit(flat) => {
                let row = &flat[j * self.degree..(j + 1) * self.degree];
                out.extend(row.iter().map(|&u| symbols[u as usize]));
            }
            _ => out.extend((0..self.degree).map(|i| symbols[self.neighbor(j, i)])),
        }
    }

    /// `w|_{ℓ_j} = ⟨w_{ℓ_{j,1}}, ..., w_{ℓ_{j,t}}⟩`.
    pub fn view(&self, word: &Word, j: usize) -> Result<Word, GraphError> {
        self.check_word(word)?;
        let mut out = Vec::with_capacity(self.degree);
        self.view_into(word.symbols(), j, &mut out);
        Ok(Word::new_unchecked(word.field(), out))
    }

    pub(crate) fn check_word(&self, word: &Word) -> Result<(), GraphError> {
        if word.len() != self.n_left {
            return Err(CodeError::LengthMismatch {
                expected: self.n_left,
                got: word.len(),
            }
            .into());
        }
        Ok(())
    }

    /// Number of occurrences of each left vertex across all lists.
    pub fn left_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n_left];
        for j in 0..self.m_right {
            for i in 0..self.degree {
                deg[self.neighbor(j, i)] += 1;
            }
        }
        deg
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            n: self.n_left,
            m: self.m_right,
            t: self.degree,
            lists: self.lists(),
        }
    }
}

/// On-disk form of an explicit graph (0-based neighbour indices).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub lists: Vec<Vec<usize>>,
}

impl GraphFile {
    pub fn build(&self) -> Result<OrderedGraph, GraphError> {
        let g = OrderedGraph::new(self.n, &self.lists)?;
        if g.m_right() != self.m || g.degree() != self.t {
            return Err(GraphError::InvalidParameters(format!(
                "declared ({}, {}, {}) but lists give ({}, {}, {})",
                self.n,
                self.m,
                self.t,
                g.n_left(),
                g.m_right(),
                g.degree()
            )));
        }
        Ok(g)
    }
}

/// `TPC(G, C_small)`.
#[derive(Debug, Clone)]
pub struct TannerCode {
    graph: Arc<OrderedGraph>,
    small: LinearCode,
}

impl TannerCode {
    pub fn new(graph: Arc<OrderedGraph>, small: LinearCode) -> Result<Self, GraphError> {
        if small.n() != graph.degree() {
            return Err(GraphError::CodeLengthMismatch {
                code_len: small.n(),
                degree: graph.degree(),
            });
        }
        Ok(TannerCode { graph, small })
    }

    pub fn graph(&self) -> &OrderedGraph {
        &self.graph
    }

    pub fn small(&self) -> &LinearCode {
        &self.small
    }

    /// Whether every view of `w` is a codeword of the small code.
    pub fn contains(&self, w: &Word) -> Result<bool, GraphError> {
        self.graph.check_word(w)?;
        if w.field() != self.small.field() {
            return Err(CodeError::from(crate::field::FieldError::FieldMismatch {
                left: self.small.field().modulus(),
                right: w.field().modulus(),
            })
            .into());
        }
        let mut view = Vec::with_capacity(self.graph.degree());
        for j in 0..self.graph.m_right() {
            self.graph.view_into(w.symbols(), j, &mut view);
            if !self.small.contains_symbols(&view) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Outcome of one expansion check `|Γ(S ∪ T)| ≥ (d_L/8)|S| + (d_R/8)|T|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionCheck {
    /// Edges with exactly one endpoint in `S ∪ T`.
    pub gamma: usize,
    pub bound: Rational,
    pub holds: bool,
}

impl ExpansionCheck {
    /// `gamma - bound`.
    pub fn slack(&self) -> Rational {
        frac(self.gamma as u64, 1) - &self.bound
    }
}

/// Uniform left degree of `graph`, if it has one.
pub fn left_regular_degree(graph: &OrderedGraph) -> Result<usize, GraphError> {
    let deg = graph.left_degrees();
    let d = deg[0];
    if deg.iter().any(|&x| x != d) {
        return Err(GraphError::NotLeftRegular);
    }
    Ok(d)
}

/// Counts boundary edges of `S ∪ T` for `S ⊆ L` and `T ⊆ R` given as
/// membership masks, and compares with the 1/8 expansion bound. Requires
/// `|S| ≤ |L|/4`.
pub fn check_expansion(
    graph: &OrderedGraph,
    left_degree: usize,
    in_s: &[bool],
    in_t: &[bool],
) -> Result<ExpansionCheck, GraphError> {
    assert_eq!(in_s.len(), graph.n_left(), "left mask has wrong length");
    assert_eq!(in_t.len(), graph.m_right(), "right mask has wrong length");
    let s = in_s.iter().filter(|&&b| b).count();
    let t = in_t.iter().filter(|&&b| b).count();
    if 4 * s > graph.n_left() {
        return Err(GraphError::Inapplicable {
            s,
            left: graph.n_left(),
        });
    }
    let mut gamma = 0usize;
    for (j, &right_in) in in_t.iter().enumerate() {
        for i in 0..graph.degree() {
            if in_s[graph.neighbor(j, i)] != right_in {
                gamma += 1;
            }
        }
    }
    let bound = frac((left_degree * s + graph.degree() * t) as u64, 8);
    let holds = frac(gamma as u64, 1) >= bound;
    Ok(ExpansionCheck {
        gamma,
        bound,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn explicit_graphs() {
        let g = OrderedGraph::new(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!((g.n_left(), g.m_right(), g.degree()), (3, 2, 2));
        let g = OrderedGraph::new(2, &[vec![0, 1]]).unwrap();
        assert_eq!((g.n_left(), g.m_right(), g.degree()), (2, 1, 2));
        assert_eq!(
            OrderedGraph::new(2, &[vec![0, 2]]).unwrap_err(),
            GraphError::EntryOutOfRange {
                list: 0,
                entry: 2,
                n_left: 2
            }
        );
        assert_eq!(
            OrderedGraph::new(3, &[vec![0, 1], vec![2]]).unwrap_err(),
            GraphError::RaggedLists
        );
        assert_eq!(
            OrderedGraph::new(3, &[]).unwrap_err(),
            GraphError::NoRightVertices
        );
    }

    #[test]
    fn tanner_membership() {
        let f = Field::new(2).unwrap();
        let g = Arc::new(OrderedGraph::new(3, &[vec![0, 1], vec![1, 2]]).unwrap());
        let tpc = TannerCode::new(g, LinearCode::repetition(f, 2).unwrap()).unwrap();
        assert!(tpc.contains(&Word::zeros(f, 3)).unwrap());
        assert!(tpc.contains(&Word::from_values(f, &[1, 1, 1]).unwrap()).unwrap());
        assert!(!tpc.contains(&Word::from_values(f, &[1, 1, 0]).unwrap()).unwrap());
        assert!(tpc.contains(&Word::zeros(f, 4)).is_err());
        let g3 = Arc::new(OrderedGraph::new(3, &[vec![0, 1, 2]]).unwrap());
        assert!(TannerCode::new(g3, LinearCode::repetition(f, 2).unwrap()).is_err());
    }

    #[test]
    fn composition_by_substitution() {
        let g = OrderedGraph::new(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        let inner = OrderedGraph::new(2, &[vec![1, 0]]).unwrap();
        let c = g.compose(&inner).unwrap();
        assert_eq!(c.lists(), vec![vec![1, 0], vec![2, 1]]);
        let id = OrderedGraph::new(2, &[vec![0, 1]]).unwrap();
        assert_eq!(g.compose(&id).unwrap().lists(), g.lists());
        let bad = OrderedGraph::new(3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(
            g.compose(&bad).unwrap_err(),
            GraphError::DegreeMismatch {
                outer_degree: 2,
                inner_left: 3
            }
        );
    }

    #[test]
    fn product_graph_shapes() {
        let g = OrderedGraph::product(2, 2).unwrap();
        assert_eq!((g.n_left(), g.m_right(), g.degree()), (4, 4, 2));
        assert_eq!(g.list(0), vec![0, 1]);
        assert_eq!(g.list(2), vec![0, 2]);
        let g = OrderedGraph::product(2, 3).unwrap();
        assert_eq!((g.n_left(), g.m_right(), g.degree()), (8, 6, 4));
        assert!(g.left_degrees().iter().all(|&d| d == 3));
        assert!(OrderedGraph::product(0, 2).is_err());
        assert!(matches!(
            OrderedGraph::product(1000, 1000),
            Err(GraphError::TooLarge(_))
        ));
    }

    #[test]
    fn product_lists_follow_reference_loop() {
        for (n, m) in [(2, 3), (3, 3), (3, 2), (2, 4)] {
            let g = OrderedGraph::product(n, m).unwrap();
            let points: Vec<Vec<usize>> = (0..g.n_left())
                .map(|mut p| {
                    let mut c = vec![0; m];
                    for slot in c.iter_mut().rev() {
                        *slot = p % n;
                        p /= n;
                    }
                    c
                })
                .collect();
            for b in 0..m {
                for i in 0..n {
                    let expected: Vec<usize> = points
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c[b] == i)
                        .map(|(idx, _)| idx)
                        .collect();
                    assert_eq!(g.list(b * n + i), expected);
                }
            }
        }
    }

    #[test]
    fn family_sizes() {
        let g = OrderedGraph::iterated(2, 3, 2).unwrap();
        assert_eq!((g.n_left(), g.m_right(), g.degree()), (8, 6, 4));
        let g = OrderedGraph::iterated(2, 4, 2).unwrap();
        assert_eq!((g.n_left(), g.m_right(), g.degree()), (16, 48, 4));
        let h = OrderedGraph::square_test(2, 2).unwrap();
        assert_eq!(h.lists(), g.lists());
        let h3 = OrderedGraph::square_test(2, 3).unwrap();
        assert_eq!((h3.n_left(), h3.degree()), (256, 4));
        assert!(OrderedGraph::iterated(2, 3, 3).is_err());
        assert!(OrderedGraph::square_test(2, 1).is_err());
    }

    #[test]
    fn lazy_graphs_agree_with_materialized() {
        let eager = OrderedGraph::iterated(3, 4, 2).unwrap();
        assert!(eager.is_materialized());
        set_graph_budget(0);
        let lazy = OrderedGraph::iterated(3, 4, 2).unwrap();
        set_graph_budget(DEFAULT_GRAPH_BUDGET);
        assert!(!lazy.is_materialized());
        assert_eq!(lazy.lists(), eager.lists());
    }

    #[test]
    fn expansion_examples() {
        let g = OrderedGraph::product(2, 3).unwrap();
        let dl = left_regular_degree(&g).unwrap();
        assert_eq!(dl, 3);
        let empty = check_expansion(&g, dl, &[false; 8], &[false; 6]).unwrap();
        assert_eq!((empty.gamma, empty.holds), (0, true));
        assert_eq!(empty.bound, frac(0, 1));
        let mut s = [false; 8];
        s[0] = true;
        let one = check_expansion(&g, dl, &s, &[false; 6]).unwrap();
        assert_eq!(one.gamma, 3);
        assert_eq!(one.bound, frac(3, 8));
        assert!(one.holds);
        let mut big = [false; 8];
        big[..3].iter_mut().for_each(|b| *b = true);
        assert!(matches!(
            check_expansion(&g, dl, &big, &[false; 6]),
            Err(GraphError::Inapplicable { s: 3, left: 8 })
        ));
    }
}
