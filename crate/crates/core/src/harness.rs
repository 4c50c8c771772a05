//! Experiment plumbing: instance and corpus specs, seeded word corpora,
//! robustness sweeps, the composition identity check, expansion checks and
//! query accounting for the `H^n_t` testers.
//!
//! Everything that consumes randomness draws from a single `ChaCha8Rng`
//! seeded from the config, and results are emitted in corpus order, so a
//! fixed config produces byte-identical reports.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::code::{CodeError, CodeSpecFile, LinearCode, Word};
use crate::field::Field;
use crate::ratio::{ceil_to_biguint, frac, to_decimal, to_fraction_string, Rational};
use crate::tanner::{check_expansion, left_regular_degree, GraphError, GraphFile, OrderedGraph};
use crate::tensor::{TensorError, TensorWord};
use crate::tester::{
    Delta, Hypotheses, ReportOptions, ReportRecord, RobustnessReport, TestInstance, TesterError,
    WordSource, DECIMAL_DIGITS,
};

/// Largest number of words an enumerated corpus may contain.
pub const MAX_ENUMERATED_WORDS: u64 = 1 << 20;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("bad spec {spec:?}: {reason}")]
    Spec { spec: String, reason: String },
    #[error("corpus: {0}")]
    Corpus(String),
    #[error("{0}")]
    TooLarge(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Tester(#[from] TesterError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

fn spec_err(spec: &str, reason: impl Into<String>) -> HarnessError {
    HarnessError::Spec {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

/// Splits `name:key=value,key=value`.
fn parse_keyed(spec: &str) -> Option<(&str, Vec<(&str, &str)>)> {
    let (name, rest) = spec.split_once(':')?;
    let mut pairs = Vec::new();
    for part in rest.split(',').filter(|p| !p.is_empty()) {
        pairs.push(part.split_once('=')?);
    }
    Some((name, pairs))
}

fn take<T: FromStr>(spec: &str, pairs: &[(&str, &str)], key: &str) -> Result<T, HarnessError> {
    let (_, v) = pairs
        .iter()
        .find(|(k, _)| *k == key)
        .ok_or_else(|| spec_err(spec, format!("missing {key}=")))?;
    v.parse()
        .map_err(|_| spec_err(spec, format!("{key}={v} is not a number")))
}

fn check_keys(spec: &str, pairs: &[(&str, &str)], allowed: &[&str]) -> Result<(), HarnessError> {
    for (k, _) in pairs {
        if !allowed.contains(k) {
            return Err(spec_err(spec, format!("unknown key {k}")));
        }
    }
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| HarnessError::Json {
        path: path.to_string(),
        source,
    })
}

/// A code given as `rs:q=,n=,k=`, `rep:q=,n=`, `full:q=,n=`, or a path to a
/// JSON code file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum CodeSpec {
    ReedSolomon { q: u64, n: usize, k: usize },
    Repetition { q: u64, n: usize },
    Full { q: u64, n: usize },
    File(String),
}

impl CodeSpec {
    pub fn parse(spec: &str) -> Result<Self, HarnessError> {
        let Some((name, pairs)) = parse_keyed(spec) else {
            if Path::new(spec).extension().is_some_and(|e| e == "json") || Path::new(spec).exists() {
                return Ok(CodeSpec::File(spec.to_string()));
            }
            return Err(spec_err(spec, "expected rs:, rep:, full: or a JSON file"));
        };
        match name {
            "rs" => {
                check_keys(spec, &pairs, &["q", "n", "k"])?;
                Ok(CodeSpec::ReedSolomon {
                    q: take(spec, &pairs, "q")?,
                    n: take(spec, &pairs, "n")?,
                    k: take(spec, &pairs, "k")?,
                })
            }
            "rep" => {
                check_keys(spec, &pairs, &["q", "n"])?;
                Ok(CodeSpec::Repetition {
                    q: take(spec, &pairs, "q")?,
                    n: take(spec, &pairs, "n")?,
                })
            }
            "full" => {
                check_keys(spec, &pairs, &["q", "n"])?;
                Ok(CodeSpec::Full {
                    q: take(spec, &pairs, "q")?,
                    n: take(spec, &pairs, "n")?,
                })
            }
            _ => Err(spec_err(spec, format!("unknown code kind {name}"))),
        }
    }

    pub fn build(&self) -> Result<LinearCode, HarnessError> {
        Ok(match *self {
            CodeSpec::ReedSolomon { q, n, k } => LinearCode::reed_solomon(Field::new(q).map_err(CodeError::from)?, n, k)?,
            CodeSpec::Repetition { q, n } => LinearCode::repetition(Field::new(q).map_err(CodeError::from)?, n)?,
            CodeSpec::Full { q, n } => LinearCode::full(Field::new(q).map_err(CodeError::from)?, n)?,
            CodeSpec::File(ref path) => read_json::<CodeSpecFile>(path)?.build()?,
        })
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::ReedSolomon { q, n, k } => write!(f, "rs:q={q},n={n},k={k}"),
            CodeSpec::Repetition { q, n } => write!(f, "rep:q={q},n={n}"),
            CodeSpec::Full { q, n } => write!(f, "full:q={q},n={n}"),
            CodeSpec::File(p) => f.write_str(p),
        }
    }
}

impl From<CodeSpec> for String {
    fn from(c: CodeSpec) -> String {
        c.to_string()
    }
}

/// A graph given as `product:n=,m=`, `iterated:n=,m=,mp=`, `square:n=,t=`,
/// or a path to a JSON graph file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(into = "String")]
pub enum GraphSpec {
    Product { n: usize, m: usize },
    Iterated { n: usize, m: usize, m_inner: usize },
    Square { n: usize, t: usize },
    File(String),
}

impl GraphSpec {
    pub fn parse(spec: &str) -> Result<Self, HarnessError> {
        let Some((name, pairs)) = parse_keyed(spec) else {
            if Path::new(spec).extension().is_some_and(|e| e == "json") || Path::new(spec).exists() {
                return Ok(GraphSpec::File(spec.to_string()));
            }
            return Err(spec_err(spec, "expected product:, iterated:, square: or a JSON file"));
        };
        match name {
            "product" => {
                check_keys(spec, &pairs, &["n", "m"])?;
                Ok(GraphSpec::Product {
                    n: take(spec, &pairs, "n")?,
                    m: take(spec, &pairs, "m")?,
                })
            }
            "iterated" => {
                check_keys(spec, &pairs, &["n", "m", "mp"])?;
                Ok(GraphSpec::Iterated {
                    n: take(spec, &pairs, "n")?,
                    m: take(spec, &pairs, "m")?,
                    m_inner: take(spec, &pairs, "mp")?,
                })
            }
            "square" => {
                check_keys(spec, &pairs, &["n", "t"])?;
                Ok(GraphSpec::Square {
                    n: take(spec, &pairs, "n")?,
                    t: take(spec, &pairs, "t")?,
                })
            }
            _ => Err(spec_err(spec, format!("unknown graph family {name}"))),
        }
    }

    pub fn build_graph(&self) -> Result<OrderedGraph, HarnessError> {
        Ok(match *self {
            GraphSpec::Product { n, m } => OrderedGraph::product(n, m)?,
            GraphSpec::Iterated { n, m, m_inner } => OrderedGraph::iterated(n, m, m_inner)?,
            GraphSpec::Square { n, t } => OrderedGraph::square_test(n, t)?,
            GraphSpec::File(ref path) => read_json::<GraphFile>(path)?.build()?,
        })
    }

    fn family_n(&self) -> Option<usize> {
        match *self {
            GraphSpec::Product { n, .. } | GraphSpec::Iterated { n, .. } | GraphSpec::Square { n, .. } => Some(n),
            GraphSpec::File(_) => None,
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Product { n, m } => write!(f, "product:n={n},m={m}"),
            GraphSpec::Iterated { n, m, m_inner } => write!(f, "iterated:n={n},m={m},mp={m_inner}"),
            GraphSpec::Square { n, t } => write!(f, "square:n={n},t={t}"),
            GraphSpec::File(p) => f.write_str(p),
        }
    }
}

impl From<GraphSpec> for String {
    fn from(g: GraphSpec) -> String {
        g.to_string()
    }
}

/// What the tester runs on. For graph families `small` is the base code `C`
/// and the small and tested codes are its tensor powers. For graph files
/// `small` is the literal small code and `code`, if given, the tested code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceSpec {
    pub graph: GraphSpec,
    pub small: CodeSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeSpec>,
}

impl InstanceSpec {
    pub fn new(graph: GraphSpec, small: CodeSpec) -> Self {
        InstanceSpec {
            graph,
            small,
            code: None,
        }
    }

    pub fn build(&self) -> Result<TestInstance, HarnessError> {
        let small = self.small.build()?;
        if let Some(n) = self.graph.family_n() {
            if small.n() != n {
                return Err(spec_err(
                    &self.small.to_string(),
                    format!("base code has length {} but the graph family uses n={n}", small.n()),
                ));
            }
            if self.code.is_some() {
                return Err(spec_err(
                    &self.graph.to_string(),
                    "graph families derive the tested code; drop --code",
                ));
            }
        }
        Ok(match self.graph {
            GraphSpec::Product { m, .. } => TestInstance::m_product(&small, m)?,
            GraphSpec::Iterated { m, m_inner, .. } => TestInstance::iterated(&small, m, m_inner)?,
            GraphSpec::Square { t, .. } => TestInstance::square(&small, t)?,
            GraphSpec::File(ref path) => {
                let graph = Arc::new(self.graph.build_graph()?);
                let inst = TestInstance::new(path.clone(), graph, small)?;
                match &self.code {
                    Some(c) => inst.with_full_code(c.build()?)?,
                    None => inst,
                }
            }
        })
    }
}

/// One kind of corpus word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    /// Uniformly random word.
    Uniform,
    /// Random codeword of the tested code.
    Codeword,
    /// Random codeword plus a random error of exactly this weight.
    CodewordPlusWeight(usize),
    /// Random codeword with one random axis-parallel slice replaced by
    /// uniform symbols.
    PlantedSlice,
    /// Random word of exactly this weight.
    LowWeight(usize),
    /// Every word (enumerated).
    Exhaustive,
    /// Every word supported on the first `b` coordinates (enumerated).
    Prefix(usize),
    /// Every word of weight at most `w` (enumerated).
    WeightAtMost(usize),
}

impl CorpusKind {
    fn is_enumerated(&self) -> bool {
        matches!(self, CorpusKind::Exhaustive | CorpusKind::Prefix(_) | CorpusKind::WeightAtMost(_))
    }
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusKind::Uniform => f.write_str("uniform"),
            CorpusKind::Codeword => f.write_str("codeword"),
            CorpusKind::CodewordPlusWeight(w) => write!(f, "codeword_plus_weight_w:{w}"),
            CorpusKind::PlantedSlice => f.write_str("planted_slice"),
            CorpusKind::LowWeight(w) => write!(f, "low_weight:{w}"),
            CorpusKind::Exhaustive => f.write_str("exhaustive"),
            CorpusKind::Prefix(b) => write!(f, "prefix:{b}"),
            CorpusKind::WeightAtMost(w) => write!(f, "weight_at_most:{w}"),
        }
    }
}

/// Random kinds used round-robin for `count` words, followed by every
/// enumerated kind in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusSpec {
    #[serde(serialize_with = "serialize_kinds")]
    pub kinds: Vec<CorpusKind>,
    pub count: usize,
}

fn serialize_kinds<S: serde::Serializer>(kinds: &[CorpusKind], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(kinds.iter().map(|k| k.to_string()))
}

/// The kinds behind `mixed`.
pub const MIXED: &[CorpusKind] = &[
    CorpusKind::Uniform,
    CorpusKind::Codeword,
    CorpusKind::CodewordPlusWeight(1),
    CorpusKind::CodewordPlusWeight(3),
    CorpusKind::PlantedSlice,
    CorpusKind::LowWeight(2),
];

impl CorpusSpec {
    /// Parses a comma-separated kind list; `mixed` expands to [`MIXED`].
    pub fn parse(spec: &str, count: usize) -> Result<Self, HarnessError> {
        let mut kinds = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, arg) = match part.split_once(':') {
                Some((n, a)) => (n, Some(a)),
                None => (part, None),
            };
            let num = |default: Option<usize>| -> Result<usize, HarnessError> {
                match arg {
                    Some(a) => a
                        .parse()
                        .map_err(|_| spec_err(spec, format!("{name} takes a number, got {a}"))),
                    None => default.ok_or_else(|| spec_err(spec, format!("{name} needs :<number>"))),
                }
            };
            let no_arg = |k: CorpusKind| -> Result<CorpusKind, HarnessError> {
                match arg {
                    None => Ok(k),
                    Some(_) => Err(spec_err(spec, format!("{name} takes no parameter"))),
                }
            };
            match name {
                "mixed" => {
                    no_arg(CorpusKind::Uniform)?;
                    kinds.extend_from_slice(MIXED);
                }
                "uniform" => kinds.push(no_arg(CorpusKind::Uniform)?),
                "codeword" => kinds.push(no_arg(CorpusKind::Codeword)?),
                "codeword_plus_weight_w" => kinds.push(CorpusKind::CodewordPlusWeight(num(Some(1))?)),
                "planted_slice" => kinds.push(no_arg(CorpusKind::PlantedSlice)?),
                "low_weight" => kinds.push(CorpusKind::LowWeight(num(Some(1))?)),
                "exhaustive" => kinds.push(no_arg(CorpusKind::Exhaustive)?),
                "prefix" => kinds.push(CorpusKind::Prefix(num(None)?)),
                "weight_at_most" => kinds.push(CorpusKind::WeightAtMost(num(None)?)),
                _ => return Err(spec_err(spec, format!("unknown corpus kind {name}"))),
            }
        }
        if kinds.is_empty() {
            return Err(spec_err(spec, "empty corpus"));
        }
        Ok(CorpusSpec { kinds, count })
    }

    fn random_kinds(&self) -> Vec<CorpusKind> {
        self.kinds.iter().copied().filter(|k| !k.is_enumerated()).collect()
    }
}

fn random_codeword(inst: &TestInstance, rng: &mut ChaCha8Rng) -> Result<Vec<u32>, HarnessError> {
    let q = inst.small().field().modulus();
    if let Some(tensor) = inst.tensor() {
        let shape = tensor.message_shape();
        let len: usize = shape.iter().product();
        let msg: Vec<u32> = (0..len).map(|_| rng.gen_range(0..q)).collect();
        let msg = TensorWord::new(tensor.field(), shape, msg)?;
        return Ok(tensor.encode(&msg)?.into_word().into_symbols());
    }
    if let Some(full) = inst.full() {
        let msg: Vec<u32> = (0..full.k()).map(|_| rng.gen_range(0..q)).collect();
        return Ok(full.encode(&msg)?.into_symbols());
    }
    Err(HarnessError::Corpus(
        "codeword-based words need the tested code (use a graph family or --code)".into(),
    ))
}

fn add_error(symbols: &mut [u32], field: Field, weight: usize, rng: &mut ChaCha8Rng) -> Result<(), HarnessError> {
    if weight > symbols.len() {
        return Err(HarnessError::Corpus(format!(
            "error weight {weight} exceeds length {}",
            symbols.len()
        )));
    }
    let q = field.modulus();
    for pos in sample(rng, symbols.len(), weight).into_iter() {
        let shift = rng.gen_range(1..q);
        symbols[pos] = field.add(symbols[pos], shift);
    }
    Ok(())
}

fn random_word(
    inst: &TestInstance,
    kind: CorpusKind,
    index: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(WordSource, Word), HarnessError> {
    let field = inst.small().field();
    let q = field.modulus();
    let len = inst.graph().n_left();
    let mut source = WordSource::named(kind.to_string(), index);
    let symbols = match kind {
        CorpusKind::Uniform => (0..len).map(|_| rng.gen_range(0..q)).collect(),
        CorpusKind::Codeword => random_codeword(inst, rng)?,
        CorpusKind::CodewordPlusWeight(w) => {
            let mut c = random_codeword(inst, rng)?;
            add_error(&mut c, field, w, rng)?;
            source.weight = Some(w);
            c
        }
        CorpusKind::LowWeight(w) => {
            let mut c = vec![0; len];
            add_error(&mut c, field, w, rng)?;
            source.weight = Some(w);
            c
        }
        CorpusKind::PlantedSlice => {
            let tensor = inst.tensor().ok_or_else(|| {
                HarnessError::Corpus("planted_slice needs a tensor-code instance".into())
            })?;
            let mut c = random_codeword(inst, rng)?;
            let shape = tensor.shape();
            let axis = rng.gen_range(0..shape.len());
            let slice = rng.gen_range(0..shape[axis]);
            let stride: usize = shape[axis + 1..].iter().product();
            for (offset, v) in c.iter_mut().enumerate() {
                if offset / stride % shape[axis] == slice {
                    *v = rng.gen_range(0..q);
                }
            }
            source.axis = Some(axis);
            source.slice = Some(slice);
            c
        }
        _ => unreachable!("enumerated kinds are not sampled"),
    };
    Ok((source, Word::new(field, symbols)?))
}

/// Calls `visit` on every vector in `[0, q)^len` in lexicographic order.
fn for_each_vector(len: usize, q: u32, mut visit: impl FnMut(&[u32])) {
    let mut v = vec![0u32; len];
    loop {
        visit(&v);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < q {
                break;
            }
            v[i] = 0;
        }
    }
}

fn enumerated_count(kind: CorpusKind, len: usize, q: u32) -> Option<u64> {
    let q = q as u64;
    match kind {
        CorpusKind::Exhaustive => q.checked_pow(u32::try_from(len).ok()?),
        CorpusKind::Prefix(b) => q.checked_pow(u32::try_from(b.min(len)).ok()?),
        CorpusKind::WeightAtMost(w) => {
            let mut total = 0u64;
            let mut binom = 1u64;
            for i in 0..=w.min(len) {
                if i > 0 {
                    binom = binom.checked_mul((len - i + 1) as u64)? / i as u64;
                }
                total = total.checked_add(binom.checked_mul((q - 1).checked_pow(i as u32)?)?)?;
            }
            Some(total)
        }
        _ => Some(0),
    }
}

fn enumerate_words(
    kind: CorpusKind,
    len: usize,
    field: Field,
    out: &mut Vec<(WordSource, Word)>,
) -> Result<(), HarnessError> {
    let q = field.modulus();
    let count = enumerated_count(kind, len, q).unwrap_or(u64::MAX);
    if count > MAX_ENUMERATED_WORDS {
        return Err(HarnessError::TooLarge(format!(
            "{kind} would enumerate {count} words (limit {MAX_ENUMERATED_WORDS})"
        )));
    }
    let name = kind.to_string();
    let push = |symbols: Vec<u32>, weight: Option<usize>, out: &mut Vec<(WordSource, Word)>| {
        let mut source = WordSource::named(name.clone(), out.len());
        source.weight = weight;
        out.push((source, Word::new_unchecked(field, symbols)));
    };
    match kind {
        CorpusKind::Exhaustive => for_each_vector(len, q, |v| push(v.to_vec(), None, out)),
        CorpusKind::Prefix(b) => {
            let b = b.min(len);
            for_each_vector(b, q, |v| {
                let mut s = v.to_vec();
                s.resize(len, 0);
                push(s, None, out);
            })
        }
        CorpusKind::WeightAtMost(w) => {
            // Supports in lexicographic order, then nonzero values.
            for weight in 0..=w.min(len) {
                let mut support: Vec<usize> = (0..weight).collect();
                loop {
                    for_each_vector(weight, q - 1, |vals| {
                        let mut s = vec![0u32; len];
                        for (&p, &v) in support.iter().zip(vals) {
                            s[p] = v + 1;
                        }
                        push(s, Some(weight), out);
                    });
                    // Next combination.
                    let mut i = weight;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        if support[i] < len - weight + i {
                            support[i] += 1;
                            for t in i + 1..weight {
                                support[t] = support[t - 1] + 1;
                            }
                            i = usize::MAX;
                            break;
                        }
                    }
                    if i != usize::MAX {
                        break;
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(())
}

/// Builds the corpus for `inst`: `spec.count` seeded random words, then all
/// enumerated words. Sources are indexed in corpus order.
pub fn generate_corpus(
    inst: &TestInstance,
    spec: &CorpusSpec,
    seed: u64,
) -> Result<Vec<(WordSource, Word)>, HarnessError> {
    let random = spec.random_kinds();
    if random.is_empty() && spec.count > 0 && spec.kinds.iter().all(|k| k.is_enumerated()) {
        // Enumerated-only corpora ignore the count.
    } else if random.is_empty() && spec.count > 0 {
        return Err(HarnessError::Corpus("no random kinds to draw from".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    if !random.is_empty() {
        for i in 0..spec.count {
            out.push(random_word(inst, random[i % random.len()], i, &mut rng)?);
        }
    }
    for kind in spec.kinds.iter().copied().filter(CorpusKind::is_enumerated) {
        let start = out.len();
        enumerate_words(kind, inst.graph().n_left(), inst.small().field(), &mut out)?;
        for (offset, (source, _)) in out[start..].iter_mut().enumerate() {
            source.index = start + offset;
        }
    }
    Ok(out)
}

/// Parses a word given as comma-separated symbols.
pub fn parse_word_list(text: &str, field: Field) -> Result<Word, HarnessError> {
    let values: Result<Vec<u64>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect();
    let values = values.map_err(|_| spec_err(text, "expected comma-separated integers"))?;
    Ok(Word::from_values(field, &values)?)
}

/// Parses a word file: a JSON array of symbols, or an object with a
/// `symbols` array (the shape, if present, is ignored).
pub fn parse_word_json(text: &str, field: Field) -> Result<Word, HarnessError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|source| HarnessError::Json {
        path: "word".into(),
        source,
    })?;
    let arr = match &value {
        serde_json::Value::Array(_) => &value,
        serde_json::Value::Object(o) => o
            .get("symbols")
            .ok_or_else(|| spec_err("word", "object without a symbols array"))?,
        _ => return Err(spec_err("word", "expected an array or an object with symbols")),
    };
    let values: Vec<u64> = serde_json::from_value(arr.clone()).map_err(|source| HarnessError::Json {
        path: "word".into(),
        source,
    })?;
    Ok(Word::from_values(field, &values)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Sampled { samples: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    pub corpus: CorpusSpec,
    pub seed: u64,
    pub mode: Mode,
    /// Overrides the guaranteed constant of the instance.
    #[serde(serialize_with = "serialize_opt_rational")]
    pub alpha: Option<Rational>,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub tau: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration_threshold: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_budget: Option<u64>,
    pub include_views: bool,
}

fn serialize_opt_rational<S: serde::Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&to_fraction_string(r)),
        None => s.serialize_none(),
    }
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSpec, corpus: CorpusSpec, seed: u64) -> Self {
        ExperimentConfig {
            instance,
            corpus,
            seed,
            mode: Mode::Exact,
            alpha: None,
            tau: None,
            enumeration_threshold: None,
            graph_budget: None,
            include_views: false,
        }
    }

    fn apply_budgets(&self) -> Result<(), HarnessError> {
        if let Some(t) = self.enumeration_threshold {
            if t == 0 {
                return Err(spec_err("threshold", "must be positive"));
            }
            crate::code::set_enumeration_threshold(t);
        }
        if let Some(b) = self.graph_budget {
            if b == 0 {
                return Err(spec_err("graph budget", "must be positive"));
            }
            crate::tanner::set_graph_budget(b);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub words: usize,
    /// Words with `holds == false`.
    pub violations: usize,
    /// Words where δ was only bounded and the bounds did not decide.
    pub undecided: usize,
    pub min_ratio: Option<String>,
    pub min_ratio_decimal: Option<String>,
    pub min_ratio_index: Option<usize>,
    pub max_rho: String,
    /// Set when an oracle error stopped the sweep; reports before it are kept.
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub config: ExperimentConfig,
    pub instance: String,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub alpha: Option<Rational>,
    pub hypotheses: Option<Hypotheses>,
    pub reports: Vec<ReportRecord>,
    pub summary: SweepSummary,
    #[serde(skip)]
    pub raw: Vec<RobustnessReport>,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Nonzero violations or an aborted sweep.
    pub fn failed(&self) -> bool {
        self.summary.violations > 0 || self.summary.aborted.is_some()
    }
}

/// Evaluates every corpus word in parallel and collects reports in corpus
/// order.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport, HarnessError> {
    config.apply_budgets()?;
    let inst = config.instance.build()?;
    let corpus = generate_corpus(&inst, &config.corpus, config.seed)?;
    let alpha = config.alpha.clone().or_else(|| inst.guaranteed_alpha());
    let options = ReportOptions {
        alpha: alpha.clone(),
        tau: config.tau.clone(),
        include_views: config.include_views,
    };
    let results: Vec<Result<RobustnessReport, TesterError>> = corpus
        .par_iter()
        .map(|(source, w)| match config.mode {
            Mode::Exact => inst.report(w, source.clone(), &options),
            Mode::Sampled { samples } => {
                let seed = config.seed ^ (source.index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                inst.report_sampled(w, source.clone(), &options, seed, samples)
            }
        })
        .collect();
    let mut raw = Vec::with_capacity(results.len());
    let mut aborted = None;
    for r in results {
        match r {
            Ok(rep) => raw.push(rep),
            Err(e) => {
                aborted = Some(e.to_string());
                break;
            }
        }
    }
    let summary = summarize(&raw, aborted);
    Ok(SweepReport {
        config: config.clone(),
        instance: inst.label().to_string(),
        alpha,
        hypotheses: inst.hypotheses(),
        reports: raw.iter().map(RobustnessReport::record).collect(),
        summary,
        raw,
    })
}

fn summarize(reports: &[RobustnessReport], aborted: Option<String>) -> SweepSummary {
    let mut min: Option<(Rational, usize)> = None;
    let mut max_rho = Rational::zero();
    let mut violations = 0;
    let mut undecided = 0;
    for r in reports {
        match r.holds {
            Some(false) => violations += 1,
            None if r.alpha.is_some() => undecided += 1,
            _ => {}
        }
        if let Some(ratio) = &r.ratio {
            if min.as_ref().is_none_or(|(m, _)| ratio < m) {
                min = Some((ratio.clone(), r.source.index));
            }
        }
        if r.rho > max_rho {
            max_rho = r.rho.clone();
        }
    }
    SweepSummary {
        words: reports.len(),
        violations,
        undecided,
        min_ratio: min.as_ref().map(|(m, _)| to_fraction_string(m)),
        min_ratio_decimal: min.as_ref().map(|(m, _)| to_decimal(m, DECIMAL_DIGITS)),
        min_ratio_index: min.map(|(_, i)| i),
        max_rho: to_fraction_string(&max_rho),
        aborted,
    }
}

/// Config for checking the composition identity on `outer © inner`.
///
/// Both graphs are families over the same base code `C`: the outer family
/// tests `C^m` with small code `C^a`, the inner one must test `C^a` with
/// small code `C^b`, and the composed instance tests `C^m` with `C^b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComposeConfig {
    pub outer: GraphSpec,
    pub inner: GraphSpec,
    pub base: CodeSpec,
    pub corpus: CorpusSpec,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComposeEntry {
    pub word_source: WordSource,
    /// Expected robustness on the composed graph.
    pub composed: String,
    /// `E_j ρ^{inner}(w|ℓ_j)`, computed view by view.
    pub nested: String,
    pub equal: bool,
    /// `ρ^{outer}(w)`.
    pub outer: String,
    pub delta: Option<String>,
    /// `ρ_composed(w) ≥ c_2 · ρ_outer(w)` with the measured `c_2`.
    pub ordering_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComposeSummary {
    pub words: usize,
    pub mismatches: usize,
    pub ordering_violations: usize,
    /// Measured `min ρ_outer / δ_C` over words with `δ_C > 0`.
    pub c1: Option<String>,
    /// Measured `min ρ_inner(x) / δ_{C_a}(x)` over outer views with `δ > 0`.
    pub c2: Option<String>,
    pub c_composed: Option<String>,
    pub c1_times_c2: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComposeReport {
    pub config: ComposeConfig,
    pub composed_instance: String,
    pub entries: Vec<ComposeEntry>,
    pub summary: ComposeSummary,
}

impl ComposeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn failed(&self) -> bool {
        self.summary.mismatches > 0 || self.summary.ordering_violations > 0
    }
}

fn min_update(slot: &mut Option<Rational>, value: Rational) {
    if slot.as_ref().is_none_or(|m| &value < m) {
        *slot = Some(value);
    }
}

pub fn run_compose_check(config: &ComposeConfig) -> Result<ComposeReport, HarnessError> {
    let outer = InstanceSpec::new(config.outer.clone(), config.base.clone()).build()?;
    let inner = InstanceSpec::new(config.inner.clone(), config.base.clone()).build()?;
    if inner.graph().n_left() != outer.graph().degree() {
        return Err(spec_err(
            &config.inner.to_string(),
            format!(
                "inner graph has {} left vertices but the outer degree is {}",
                inner.graph().n_left(),
                outer.graph().degree()
            ),
        ));
    }
    let inner_tests = inner.full().map(LinearCode::generator);
    if inner_tests != Some(outer.small().generator()) {
        return Err(spec_err(
            &config.inner.to_string(),
            "the inner instance must test the outer small code",
        ));
    }
    let composed_graph = Arc::new(outer.graph().compose(inner.graph())?);
    let mut composed = TestInstance::new(
        format!("{} © {}", config.outer, config.inner),
        composed_graph,
        inner.small().clone(),
    )?;
    if let Some(full) = outer.full() {
        composed = composed.with_full_code(full.clone())?;
    }
    let corpus = generate_corpus(&outer, &config.corpus, config.seed)?;

    struct Row {
        composed: Rational,
        nested: Rational,
        outer: Rational,
        delta: Option<Rational>,
        view_ratios: Option<Rational>,
    }
    let rows: Vec<Result<Row, HarnessError>> = corpus
        .par_iter()
        .map(|(_, w)| {
            let composed_rho = composed.expected_robustness(w)?;
            let m = outer.graph().m_right();
            let mut sum = Rational::zero();
            let mut min_view_ratio: Option<Rational> = None;
            for j in 0..m {
                let view = outer.graph().view(w, j)?;
                let rho_inner = inner.expected_robustness(&view)?;
                if let Some(full) = inner.full() {
                    let d = full.relative_distance_to_code(&view)?;
                    if !d.is_zero() {
                        min_update(&mut min_view_ratio, &rho_inner / d);
                    }
                }
                sum += rho_inner;
            }
            let nested = sum / frac(m as u64, 1);
            let outer_rho = outer.expected_robustness(w)?;
            let delta = match outer.delta(w, &outer_rho)? {
                Delta::Exact(d) => Some(d),
                Delta::Bounds { .. } => None,
            };
            Ok(Row {
                composed: composed_rho,
                nested,
                outer: outer_rho,
                delta,
                view_ratios: min_view_ratio,
            })
        })
        .collect();
    let rows: Vec<Row> = rows.into_iter().collect::<Result<_, _>>()?;

    let mut c1 = None;
    let mut c2 = None;
    let mut c_comp = None;
    for row in &rows {
        if let Some(r) = &row.view_ratios {
            min_update(&mut c2, r.clone());
        }
        if let Some(d) = row.delta.as_ref().filter(|d| !d.is_zero()) {
            min_update(&mut c1, &row.outer / d);
            min_update(&mut c_comp, &row.composed / d);
        }
    }
    let c2_value = c2.clone().unwrap_or_else(Rational::one);
    let mut entries = Vec::with_capacity(rows.len());
    let mut mismatches = 0;
    let mut ordering_violations = 0;
    for ((source, _), row) in corpus.iter().zip(&rows) {
        let equal = row.composed == row.nested;
        let ordering_holds = row.composed >= &c2_value * &row.outer;
        mismatches += usize::from(!equal);
        ordering_violations += usize::from(!ordering_holds);
        entries.push(ComposeEntry {
            word_source: source.clone(),
            composed: to_fraction_string(&row.composed),
            nested: to_fraction_string(&row.nested),
            equal,
            outer: to_fraction_string(&row.outer),
            delta: row.delta.as_ref().map(to_fraction_string),
            ordering_holds,
        });
    }
    let s = |r: &Option<Rational>| r.as_ref().map(to_fraction_string);
    let product = match (&c1, &c2) {
        (Some(a), Some(b)) => Some(a * b),
        _ => None,
    };
    Ok(ComposeReport {
        config: config.clone(),
        composed_instance: composed.label().to_string(),
        summary: ComposeSummary {
            words: entries.len(),
            mismatches,
            ordering_violations,
            c1: s(&c1),
            c2: s(&c2),
            c_composed: s(&c_comp),
            c1_times_c2: s(&product),
        },
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ExpansionMode {
    /// Every `S` with `|S| ≤ |L|/4` against every `T ⊆ R`.
    Exhaustive,
    /// Seeded random pairs: `|S|` uniform in `0..=|L|/4`, `T` a fair coin
    /// per right vertex.
    Sampled { pairs: usize, seed: u64 },
}

/// Largest number of pairs the exhaustive expansion check will visit.
pub const MAX_EXPANSION_PAIRS: u128 = 1 << 26;

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport {
    pub graph: String,
    pub mode: ExpansionMode,
    pub left_degree: usize,
    pub right_degree: usize,
    pub pairs: u64,
    pub violations: u64,
    pub worst_slack: String,
    pub worst_s: Vec<usize>,
    pub worst_t: Vec<usize>,
}

impl ExpansionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn binomial_sum(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut b = 1u128;
    for i in 0..=k.min(n) {
        if i > 0 {
            b = match b.checked_mul((n - i + 1) as u128) {
                Some(v) => v / i as u128,
                None => return u128::MAX,
            };
        }
        total = total.saturating_add(b);
    }
    total
}

pub fn run_expansion_check(graph_spec: &GraphSpec, mode: ExpansionMode) -> Result<ExpansionReport, HarnessError> {
    let graph = graph_spec.build_graph()?;
    let left_degree = left_regular_degree(&graph)?;
    let n_left = graph.n_left();
    let m_right = graph.m_right();
    let max_s = n_left / 4;

    let mut pairs = 0u64;
    let mut violations = 0u64;
    let mut worst: Option<(Rational, Vec<bool>, Vec<bool>)> = None;
    let mut visit = |in_s: &[bool], in_t: &[bool]| -> Result<(), HarnessError> {
        let check = check_expansion(&graph, left_degree, in_s, in_t)?;
        pairs += 1;
        violations += u64::from(!check.holds);
        let slack = check.slack();
        if worst.as_ref().is_none_or(|(w, _, _)| &slack < w) {
            worst = Some((slack, in_s.to_vec(), in_t.to_vec()));
        }
        Ok(())
    };

    match mode {
        ExpansionMode::Exhaustive => {
            let t_count = 1u128.checked_shl(m_right as u32).filter(|_| m_right < 64);
            let total = t_count.map(|t| t.saturating_mul(binomial_sum(n_left, max_s)));
            if total.is_none_or(|t| t > MAX_EXPANSION_PAIRS) {
                return Err(HarnessError::TooLarge(format!(
                    "exhaustive expansion check on {graph_spec} exceeds {MAX_EXPANSION_PAIRS} pairs; use sampled mode"
                )));
            }
            let t_sets = t_count.expect("checked") as u64;
            let mut in_s = vec![false; n_left];
            let mut in_t = vec![false; m_right];
            for size in 0..=max_s {
                let mut support: Vec<usize> = (0..size).collect();
                loop {
                    in_s.iter_mut().for_each(|b| *b = false);
                    for &i in &support {
                        in_s[i] = true;
                    }
                    for mask in 0..t_sets {
                        for (j, b) in in_t.iter_mut().enumerate() {
                            *b = mask >> j & 1 == 1;
                        }
                        visit(&in_s, &in_t)?;
                    }
                    let mut i = size;
                    let mut advanced = false;
                    while i > 0 {
                        i -= 1;
                        if support[i] < n_left - size + i {
                            support[i] += 1;
                            for t in i + 1..size {
                                support[t] = support[t - 1] + 1;
                            }
                            advanced = true;
                            break;
                        }
                    }
                    if !advanced {
                        break;
                    }
                }
            }
        }
        ExpansionMode::Sampled { pairs: count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut in_s = vec![false; n_left];
            let mut in_t = vec![false; m_right];
            for _ in 0..count {
                let size = rng.gen_range(0..=max_s);
                in_s.iter_mut().for_each(|b| *b = false);
                for i in sample(&mut rng, n_left, size).into_iter() {
                    in_s[i] = true;
                }
                for b in in_t.iter_mut() {
                    *b = rng.gen_bool(0.5);
                }
                visit(&in_s, &in_t)?;
            }
        }
    }

    let (slack, s, t) = worst.expect("at least the empty pair is checked");
    let members = |mask: &[bool]| mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
    Ok(ExpansionReport {
        graph: graph_spec.to_string(),
        mode,
        left_degree,
        right_degree: graph.degree(),
        pairs,
        violations,
        worst_slack: to_fraction_string(&slack),
        worst_s: members(&s),
        worst_t: members(&t),
    })
}

/// Query complexity of the amplified `H^n_t` tester for `C^{2^t}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryAccount {
    pub n: usize,
    pub t: usize,
    /// `2^t`, the number of tensor factors.
    pub m: u64,
    #[serde(serialize_with = "serialize_rational")]
    pub alpha0: Rational,
    /// Queries of one run: `n²`.
    pub queries: u64,
    /// Repetitions `⌈α0^{-t}⌉`.
    #[serde(serialize_with = "serialize_biguint")]
    pub repetitions: BigUint,
    #[serde(serialize_with = "serialize_biguint")]
    pub total_queries: BigUint,
    /// `log2 N = 2^t · log2 n`.
    pub log2_block_length: f64,
    /// `N = n^{2^t}` when it has at most 4096 bits.
    #[serde(serialize_with = "serialize_opt_biguint")]
    pub block_length: Option<BigUint>,
    /// `e` with `total = (log2 N)^e`.
    pub polylog_exponent: Option<f64>,
    /// Whether the built `H^n_t` has right degree `n²` (`None` when too
    /// large to build).
    pub degree_matches: Option<bool>,
}

fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_fraction_string(r))
}

fn serialize_biguint<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn serialize_opt_biguint<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&v.to_string()),
        None => s.serialize_none(),
    }
}

fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top: BigUint = v >> shift;
    top.to_f64().expect("64 bits").log2() + shift as f64
}

pub fn query_account(n: usize, t: usize, alpha0: &Rational) -> Result<QueryAccount, HarnessError> {
    if t < 2 {
        return Err(spec_err("t", "query accounting needs t >= 2"));
    }
    if n < 2 {
        return Err(spec_err("n", "query accounting needs n >= 2"));
    }
    if alpha0 <= &Rational::zero() || alpha0 > &Rational::one() {
        return Err(spec_err(&to_fraction_string(alpha0), "alpha0 must lie in (0, 1]"));
    }
    if t > 62 {
        return Err(HarnessError::TooLarge(format!("t={t} is beyond accounting range")));
    }
    let m = 1u64 << t;
    let queries = (n as u64) * (n as u64);
    let inv = num_traits::pow(alpha0.recip(), t);
    let repetitions = ceil_to_biguint(&inv);
    let total_queries = &repetitions * BigUint::from(queries);
    let log2_block_length = m as f64 * (n as f64).log2();
    let block_length = (log2_block_length <= 4096.0).then(|| num_traits::pow(BigUint::from(n), m as usize));
    let polylog_exponent = (log2_block_length > 1.0)
        .then(|| log2_big(&total_queries) / log2_block_length.log2());
    let degree_matches = if log2_block_length < 40.0 {
        Some(OrderedGraph::square_test(n, t)?.degree() as u64 == queries)
    } else {
        None
    };
    Ok(QueryAccount {
        n,
        t,
        m,
        alpha0: alpha0.clone(),
        queries,
        repetitions,
        total_queries,
        log2_block_length,
        block_length,
        polylog_exponent,
        degree_matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::inverse_power_of_two;

    fn rep_instance(n: usize, m: usize) -> InstanceSpec {
        InstanceSpec::new(GraphSpec::Product { n, m }, CodeSpec::Repetition { q: 2, n })
    }

    #[test]
    fn spec_parsing_round_trips() {
        for s in ["rs:q=7,n=7,k=2", "rep:q=2,n=3", "full:q=3,n=2"] {
            assert_eq!(CodeSpec::parse(s).unwrap().to_string(), s);
        }
        for s in ["product:n=2,m=3", "iterated:n=2,m=4,mp=2", "square:n=2,t=2"] {
            assert_eq!(GraphSpec::parse(s).unwrap().to_string(), s);
        }
        assert!(CodeSpec::parse("rs:q=7,n=7").is_err());
        assert!(CodeSpec::parse("rs:q=7,n=7,k=2,z=1").is_err());
        assert!(GraphSpec::parse("cube:n=2").is_err());
        assert!(CorpusSpec::parse("uniform,bogus", 3).is_err());
        let c = CorpusSpec::parse("mixed", 10).unwrap();
        assert_eq!(c.kinds, MIXED);
    }

    #[test]
    fn enumerated_corpora() {
        let inst = rep_instance(2, 2).build().unwrap();
        let all = generate_corpus(&inst, &CorpusSpec::parse("exhaustive", 0).unwrap(), 0).unwrap();
        assert_eq!(all.len(), 16);
        let low = generate_corpus(&inst, &CorpusSpec::parse("weight_at_most:2", 0).unwrap(), 0).unwrap();
        assert_eq!(low.len(), 1 + 4 + 6);
        assert!(low.iter().all(|(_, w)| w.weight() <= 2));
        let inst = rep_instance(2, 4).build().unwrap();
        let pre = generate_corpus(&inst, &CorpusSpec::parse("prefix:8", 0).unwrap(), 0).unwrap();
        assert_eq!(pre.len(), 256);
        assert!(pre.iter().all(|(_, w)| w.symbols()[8..].iter().all(|&s| s == 0)));
    }

    #[test]
    fn random_corpus_kinds() {
        let spec = InstanceSpec::new(GraphSpec::Product { n: 5, m: 2 }, CodeSpec::ReedSolomon { q: 5, n: 5, k: 2 });
        let inst = spec.build().unwrap();
        let corpus = generate_corpus(&inst, &CorpusSpec::parse("codeword,codeword_plus_weight_w:2,planted_slice", 30).unwrap(), 3).unwrap();
        let full = inst.full().unwrap();
        for (src, w) in &corpus {
            match src.kind.as_str() {
                "codeword" => assert!(full.is_codeword(w).unwrap()),
                "codeword_plus_weight_w:2" => {
                    let d = full.nearest_codeword(w).unwrap().hamming;
                    assert!(d <= 2);
                }
                _ => assert!(src.axis.is_some() && src.slice.is_some()),
            }
        }
        let again = generate_corpus(&inst, &CorpusSpec::parse("codeword,codeword_plus_weight_w:2,planted_slice", 30).unwrap(), 3).unwrap();
        assert_eq!(corpus, again);
    }

    #[test]
    fn planted_slice_changes_only_one_slice() {
        let spec = InstanceSpec::new(GraphSpec::Product { n: 3, m: 3 }, CodeSpec::Repetition { q: 3, n: 3 });
        let inst = spec.build().unwrap();
        let corpus = generate_corpus(&inst, &CorpusSpec::parse("planted_slice", 20).unwrap(), 11).unwrap();
        for (src, w) in corpus {
            let tw = TensorWord::from_word(w, vec![3, 3, 3]).unwrap();
            let (axis, slice) = (src.axis.unwrap(), src.slice.unwrap());
            // Off the planted slice the word is a constant (a repetition codeword).
            let mut values = std::collections::BTreeSet::new();
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        let coords = [a, b, c];
                        if coords[axis] != slice {
                            values.insert(tw.get(&coords).unwrap());
                        }
                    }
                }
            }
            assert_eq!(values.len(), 1);
        }
    }

    #[test]
    fn codeword_sweep_is_all_zero() {
        let mut cfg = ExperimentConfig::new(rep_instance(3, 3), CorpusSpec::parse("codeword", 12).unwrap(), 5);
        cfg.alpha = Some(inverse_power_of_two(16));
        let rep = run_sweep(&cfg).unwrap();
        assert_eq!(rep.summary.words, 12);
        assert_eq!(rep.summary.violations, 0);
        assert!(rep.reports.iter().all(|r| r.rho == "0/1" && r.delta.as_deref() == Some("0/1")));
    }

    #[test]
    fn exhaustive_sweep_finds_two_codewords() {
        let cfg = ExperimentConfig::new(rep_instance(2, 2), CorpusSpec::parse("exhaustive", 0).unwrap(), 0);
        let rep = run_sweep(&cfg).unwrap();
        assert_eq!(rep.reports.len(), 16);
        let zero = rep.reports.iter().filter(|r| r.rho == "0/1").count();
        assert_eq!(zero, 2);
    }

    #[test]
    fn sweep_is_deterministic() {
        let cfg = ExperimentConfig::new(rep_instance(3, 2), CorpusSpec::parse("mixed", 24).unwrap(), 99);
        assert_eq!(run_sweep(&cfg).unwrap().to_json(), run_sweep(&cfg).unwrap().to_json());
        let mut sampled = cfg.clone();
        sampled.mode = Mode::Sampled { samples: 50 };
        assert_eq!(run_sweep(&sampled).unwrap().to_json(), run_sweep(&sampled).unwrap().to_json());
    }

    #[test]
    fn compose_identity_small() {
        let cfg = ComposeConfig {
            outer: GraphSpec::Product { n: 2, m: 4 },
            inner: GraphSpec::Product { n: 2, m: 3 },
            base: CodeSpec::Repetition { q: 2, n: 2 },
            corpus: CorpusSpec::parse("uniform,codeword", 20).unwrap(),
            seed: 1,
        };
        let rep = run_compose_check(&cfg).unwrap();
        assert_eq!(rep.summary.mismatches, 0);
        assert_eq!(rep.summary.ordering_violations, 0);
        let bad = ComposeConfig {
            inner: GraphSpec::Product { n: 2, m: 2 },
            ..cfg
        };
        assert!(run_compose_check(&bad).is_err());
    }

    #[test]
    fn expansion_modes() {
        let rep = run_expansion_check(&GraphSpec::Product { n: 2, m: 3 }, ExpansionMode::Exhaustive).unwrap();
        assert_eq!(rep.pairs, 37 * 64);
        assert_eq!(rep.violations, 0);
        let rep = run_expansion_check(
            &GraphSpec::Product { n: 3, m: 3 },
            ExpansionMode::Sampled { pairs: 500, seed: 4 },
        )
        .unwrap();
        assert_eq!(rep.pairs, 500);
        assert_eq!(rep.violations, 0);
        assert!(run_expansion_check(&GraphSpec::Product { n: 4, m: 4 }, ExpansionMode::Exhaustive).is_err());
    }

    #[test]
    fn query_account_example() {
        let qa = query_account(2, 2, &inverse_power_of_two(32)).unwrap();
        assert_eq!(qa.queries, 4);
        assert_eq!(qa.repetitions, BigUint::one() << 64usize);
        assert_eq!(qa.block_length, Some(BigUint::from(16u32)));
        assert_eq!(qa.degree_matches, Some(true));
        for n in [2, 3, 5] {
            let qa = query_account(n, 2, &inverse_power_of_two(32)).unwrap();
            assert_eq!(qa.queries, (n * n) as u64);
            assert_eq!(qa.block_length, Some(BigUint::from(n.pow(4))));
        }
        assert!(query_account(2, 1, &inverse_power_of_two(32)).is_err());
    }

    #[test]
    fn word_parsing() {
        let f = Field::new(2).unwrap();
        assert_eq!(parse_word_list("0,1,1", f).unwrap().symbols(), &[0, 1, 1]);
        assert_eq!(parse_word_json("[1,0]", f).unwrap().symbols(), &[1, 0]);
        assert_eq!(parse_word_json(r#"{"shape":[2],"symbols":[0,1]}"#, f).unwrap().symbols(), &[0, 1]);
        assert!(parse_word_list("0,x", f).is_err());
        assert!(parse_word_json("[2]", f).is_err());
    }
}
