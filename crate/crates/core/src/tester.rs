//! The natural tester of a Tanner product code and exact measurements of its
//! robustness.
//!
//! A [`TestInstance`] pairs an ordered graph `G` with a small code. On a word
//! `r` the tester picks a right vertex `j` uniformly and accepts iff the view
//! `r|_{ℓ_j}` is a small-code codeword. Everything here is computed exactly:
//!
//! * view robustness `ρ(r, j) = δ_{C_small}(r|_{ℓ_j})`,
//! * expected robustness `ρ(r) = E_j ρ(r, j)`,
//! * the τ-soundness-error `Pr_j[ρ(r, j) > τ]`,
//! * `δ_C(r)` against the full code when it can be enumerated.
//!
//! The m-product tester for `C^m` is the instance on `G^n_m` with small code
//! `C^{m-1}`.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::code::{CodeError, LinearCode, Word};
use crate::ratio::{ceil_to_biguint, frac, inverse_power_of_two, to_decimal, to_fraction_string, Rational};
use crate::tanner::{GraphError, OrderedGraph};
use crate::tensor::{TensorCode, TensorError};

/// Largest repetition count [`TestInstance::amplified_rejection`] will expand.
pub const MAX_AMPLIFICATION: u64 = 1 << 24;

/// Views per instance above which the census is computed in parallel.
const PARALLEL_VIEWS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TesterError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid test instance: {0}")]
    InvalidInstance(String),
    #[error("alpha must be positive")]
    NonPositiveAlpha,
    #[error("amplification would repeat the test {0} times")]
    AmplificationTooLarge(String),
}

/// Which construction an instance came from, with the base code `C` it is
/// built over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `(G^n_m, C^{m-1})`.
    Product { m: usize },
    /// `(G^n_{m,m'}, C^{m'})`.
    Iterated { m: usize, m_inner: usize },
    /// `(H^n_t, C^2)`.
    Square { t: usize },
}

impl Family {
    /// Number of tensor factors of the tested code.
    pub fn tensor_power(&self) -> usize {
        match *self {
            Family::Product { m } | Family::Iterated { m, .. } => m,
            Family::Square { t } => 1 << t,
        }
    }

    /// Number of tensor factors of the small code.
    pub fn small_power(&self) -> usize {
        match *self {
            Family::Product { m } => m - 1,
            Family::Iterated { m_inner, .. } => m_inner,
            Family::Square { .. } => 2,
        }
    }
}

/// Which distance hypotheses of the robustness results a base code `[n,k,d]`
/// satisfies at a given tensor power `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    /// `((d-1)/n)^m ≥ 7/8` (m-product tester robustness).
    pub product_tester: bool,
    /// `(d/n)^{m-1} ≥ 7/8` (self-improvement of the distance bound).
    pub self_improvement: bool,
    /// `((d-1)/n)^4 ≥ 7/8` (robustness of `(G^n_{4,2}, C^2)`).
    pub four_two: bool,
    /// `d - 1 ≥ (1 - 1/(10m)) n` (robustness of `(H^n_t, C^2)`, `m = 2^t`).
    pub square: bool,
    /// `d/n ≥ 1 - 1/(7m)` (polylogarithmic testability of `C^m`, `m = 2^t`).
    pub polylog: bool,
}

impl Hypotheses {
    pub fn evaluate(n: usize, d: usize, m: usize) -> Self {
        let seven_eighths = frac(7, 8);
        let n64 = n as u64;
        let d64 = d as u64;
        let dm1 = frac(d64.saturating_sub(1), n64);
        let dn = frac(d64, n64);
        let pow = |r: &Rational, e: usize| num_traits::pow(r.clone(), e);
        let m64 = m as u64;
        Hypotheses {
            product_tester: pow(&dm1, m) >= seven_eighths,
            self_improvement: pow(&dn, m - 1) >= seven_eighths,
            four_two: pow(&dm1, 4) >= seven_eighths,
            square: frac(d64.saturating_sub(1), 1)
                >= (Rational::one() - frac(1, 10 * m64)) * frac(n64, 1),
            polylog: dn >= Rational::one() - frac(1, 7 * m64),
        }
    }
}

/// A graph, a small code, and optionally the full code the tester is meant
/// to test.
#[derive(Debug, Clone)]
pub struct TestInstance {
    label: String,
    graph: Arc<OrderedGraph>,
    small: LinearCode,
    full: Option<LinearCode>,
    tensor: Option<TensorCode>,
    base: Option<(LinearCode, Family)>,
    uniform_coverage: bool,
}

fn coverage_is_uniform(graph: &OrderedGraph) -> bool {
    let deg = graph.left_degrees();
    deg.iter().all(|&d| d == deg[0] && d > 0)
}

impl TestInstance {
    pub fn new(
        label: impl Into<String>,
        graph: Arc<OrderedGraph>,
        small: LinearCode,
    ) -> Result<Self, TesterError> {
        if small.n() != graph.degree() {
            return Err(GraphError::CodeLengthMismatch {
                code_len: small.n(),
                degree: graph.degree(),
            }
            .into());
        }
        let uniform_coverage = coverage_is_uniform(&graph);
        Ok(TestInstance {
            label: label.into(),
            graph,
            small,
            full: None,
            tensor: None,
            base: None,
            uniform_coverage,
        })
    }

    /// Attaches the code `δ_C` is measured against.
    pub fn with_full_code(mut self, full: LinearCode) -> Result<Self, TesterError> {
        if full.n() != self.graph.n_left() {
            return Err(TesterError::InvalidInstance(format!(
                "full code has length {} but the graph has {} left vertices",
                full.n(),
                self.graph.n_left()
            )));
        }
        if full.field() != self.small.field() {
            return Err(TesterError::InvalidInstance(
                "full and small codes are over different fields".into(),
            ));
        }
        self.full = Some(full);
        Ok(self)
    }

    fn from_family(base: &LinearCode, family: Family, graph: OrderedGraph) -> Result<Self, TesterError> {
        let small = TensorCode::power(base, family.small_power())?.to_linear_code()?;
        let tensor = TensorCode::power(base, family.tensor_power())?;
        let label = match family {
            Family::Product { m } => format!("product:n={},m={m}", base.n()),
            Family::Iterated { m, m_inner } => format!("iterated:n={},m={m},mp={m_inner}", base.n()),
            Family::Square { t } => format!("square:n={},t={t}", base.n()),
        };
        let mut inst = TestInstance::new(label, Arc::new(graph), small)?;
        // The flattened full code is optional: without it δ is reported as bounds.
        if let Ok(full) = tensor.to_linear_code() {
            inst = inst.with_full_code(full)?;
        }
        inst.tensor = Some(tensor);
        inst.base = Some((base.clone(), family));
        Ok(inst)
    }

    /// The m-product tester: `(G^n_m, C^{m-1})` testing `C^m`, `m ≥ 2`.
    pub fn m_product(base: &LinearCode, m: usize) -> Result<Self, TesterError> {
        if m < 2 {
            return Err(TesterError::InvalidInstance("m-product tester needs m >= 2".into()));
        }
        Self::from_family(base, Family::Product { m }, OrderedGraph::product(base.n(), m)?)
    }

    /// `(G^n_{m,m'}, C^{m'})` testing `C^m`.
    pub fn iterated(base: &LinearCode, m: usize, m_inner: usize) -> Result<Self, TesterError> {
        let graph = OrderedGraph::iterated(base.n(), m, m_inner)?;
        Self::from_family(base, Family::Iterated { m, m_inner }, graph)
    }

    /// `(H^n_t, C^2)` testing `C^{2^t}`.
    pub fn square(base: &LinearCode, t: usize) -> Result<Self, TesterError> {
        let graph = OrderedGraph::square_test(base.n(), t)?;
        Self::from_family(base, Family::Square { t }, graph)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn graph(&self) -> &OrderedGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> Arc<OrderedGraph> {
        Arc::clone(&self.graph)
    }

    pub fn small(&self) -> &LinearCode {
        &self.small
    }

    pub fn full(&self) -> Option<&LinearCode> {
        self.full.as_ref()
    }

    /// The tested code as a tensor product, for family instances.
    pub fn tensor(&self) -> Option<&TensorCode> {
        self.tensor.as_ref()
    }

    pub fn base(&self) -> Option<(&LinearCode, Family)> {
        self.base.as_ref().map(|(c, f)| (c, *f))
    }

    /// Distance hypotheses of the base code, when it and its distance are known.
    pub fn hypotheses(&self) -> Option<Hypotheses> {
        let (code, family) = self.base.as_ref()?;
        let d = code.known_distance()?;
        Some(Hypotheses::evaluate(code.n(), d, family.tensor_power()))
    }

    /// The robustness constant the theory guarantees for this instance, when
    /// its hypothesis holds: `2^-16` for the m-product tester with `m ≥ 3`,
    /// `2^-32` for `G^n_{4,2}`, `2^{-32t}` for `H^n_t`. The 2-product tester
    /// has no guarantee.
    pub fn guaranteed_alpha(&self) -> Option<Rational> {
        let (_, family) = self.base.as_ref()?;
        let h = self.hypotheses()?;
        match *family {
            Family::Product { m } if m >= 3 && h.product_tester => Some(inverse_power_of_two(16)),
            Family::Iterated { m: 4, m_inner: 2 } if h.four_two => Some(inverse_power_of_two(32)),
            Family::Square { t: 2 } if h.four_two => Some(inverse_power_of_two(32)),
            Family::Square { t } if h.square => Some(inverse_power_of_two(32 * t as u32)),
            _ => None,
        }
    }

    fn check_word(&self, w: &Word) -> Result<(), TesterError> {
        self.graph.check_word(w)?;
        if w.field() != self.small.field() {
            return Err(CodeError::from(crate::field::FieldError::FieldMismatch {
                left: self.small.field().modulus(),
                right: w.field().modulus(),
            })
            .into());
        }
        Ok(())
    }

    /// `ρ(w, j)`, the relative distance of the view at `j` from the small code.
    pub fn view_robustness(&self, w: &Word, j: usize) -> Result<Rational, TesterError> {
        self.check_word(w)?;
        if j >= self.graph.m_right() {
            return Err(TesterError::InvalidInstance(format!(
                "right vertex {j} out of range ({} views)",
                self.graph.m_right()
            )));
        }
        let mut view = Vec::with_capacity(self.graph.degree());
        self.graph.view_into(w.symbols(), j, &mut view);
        let d = self.small.distance_to_code(&view)?;
        Ok(frac(d as u64, self.small.n() as u64))
    }

    /// Distances of every view from the small code, in right-vertex order.
    pub fn census(&self, w: &Word) -> Result<ViewCensus, TesterError> {
        self.check_word(w)?;
        let m = self.graph.m_right();
        let degree = self.graph.degree();
        let one = |j: usize, buf: &mut Vec<u32>| -> Result<usize, CodeError> {
            self.graph.view_into(w.symbols(), j, buf);
            self.small.distance_to_code(buf)
        };
        let distances: Vec<usize> = if m > PARALLEL_VIEWS {
            (0..m)
                .into_par_iter()
                .map_init(|| Vec::with_capacity(degree), |buf, j| one(j, buf))
                .collect::<Result<_, _>>()?
        } else {
            let mut buf = Vec::with_capacity(degree);
            (0..m).map(|j| one(j, &mut buf)).collect::<Result<_, _>>()?
        };
        Ok(ViewCensus { distances, degree })
    }

    /// `ρ(w)` over the uniform distribution on right vertices.
    pub fn expected_robustness(&self, w: &Word) -> Result<Rational, TesterError> {
        Ok(self.census(w)?.rho())
    }

    /// Seeded Monte Carlo estimate of `ρ(w)` from `samples` uniform views.
    pub fn sampled_robustness(&self, w: &Word, seed: u64, samples: usize) -> Result<Estimate, TesterError> {
        self.check_word(w)?;
        if samples == 0 {
            return Err(TesterError::InvalidInstance("need at least one sample".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut buf = Vec::with_capacity(self.graph.degree());
        let mut total = 0u64;
        let mut total_sq = 0u128;
        for _ in 0..samples {
            let j = rng.gen_range(0..self.graph.m_right());
            self.graph.view_into(w.symbols(), j, &mut buf);
            let d = self.small.distance_to_code(&buf)? as u64;
            total += d;
            total_sq += (d as u128) * (d as u128);
        }
        let t = self.graph.degree() as f64;
        let s = samples as f64;
        let mean_f = total as f64 / s / t;
        let var = if samples > 1 {
            ((total_sq as f64 / (t * t)) - s * mean_f * mean_f) / (s - 1.0)
        } else {
            0.0
        };
        Ok(Estimate {
            mean: frac(total, samples as u64 * self.graph.degree() as u64),
            std_error: (var.max(0.0) / s).sqrt(),
            samples,
            seed,
        })
    }

    /// `Pr_j[ρ(w, j) > τ]`.
    pub fn tau_soundness_error(&self, w: &Word, tau: &Rational) -> Result<Rational, TesterError> {
        Ok(self.census(w)?.tau_soundness_error(tau))
    }

    /// `δ_C(w)` when the full code is attached and enumerable, otherwise
    /// bounds. The lower bound is `ρ(w)` when every left vertex is covered
    /// equally often (then `ρ(w) ≤ δ(w, c)` for every codeword `c`), else 0.
    pub fn delta(&self, w: &Word, rho: &Rational) -> Result<Delta, TesterError> {
        self.check_word(w)?;
        let bounds = || Delta::Bounds {
            lower: if self.uniform_coverage {
                rho.clone()
            } else {
                Rational::zero()
            },
            upper: Rational::one(),
        };
        let Some(full) = &self.full else {
            return Ok(bounds());
        };
        match full.relative_distance_to_code(w) {
            Ok(d) => Ok(Delta::Exact(d)),
            Err(CodeError::TooLargeToEnumerate { .. }) => Ok(bounds()),
            Err(e) => Err(e.into()),
        }
    }

    /// Checks `ρ(w) ≥ α·δ_C(w)`.
    pub fn certify_robustness(&self, w: &Word, alpha: &Rational) -> Result<Certification, TesterError> {
        let census = self.census(w)?;
        let rho = census.rho();
        let delta = self.delta(w, &rho)?;
        let holds = delta.compare(|d| rho >= alpha * d);
        Ok(Certification { rho, delta, holds })
    }

    /// Repeats the tester `c = ⌈1/α⌉` times and rejects if any run rejects.
    /// Checks the rejection probability against `δ_C(w)/2`.
    pub fn amplified_rejection(&self, w: &Word, alpha: &Rational) -> Result<Amplification, TesterError> {
        if alpha <= &Rational::zero() {
            return Err(TesterError::NonPositiveAlpha);
        }
        let c_big = ceil_to_biguint(&alpha.recip());
        let c = u64::try_from(&c_big)
            .ok()
            .filter(|&c| c <= MAX_AMPLIFICATION)
            .ok_or_else(|| TesterError::AmplificationTooLarge(c_big.to_string()))?;
        let census = self.census(w)?;
        let p = census.reject_fraction();
        let accept_all = num_traits::pow(Rational::one() - &p, c as usize);
        let reject_prob = Rational::one() - accept_all;
        let delta = self.delta(w, &census.rho())?;
        let two = frac(2, 1);
        let holds = delta.compare(|d| reject_prob >= d / &two);
        Ok(Amplification {
            repetitions: c,
            single_reject: p,
            reject_prob,
            delta,
            holds,
        })
    }

    /// Full report for one word.
    pub fn report(
        &self,
        w: &Word,
        source: WordSource,
        options: &ReportOptions,
    ) -> Result<RobustnessReport, TesterError> {
        let census = self.census(w)?;
        let rho = census.rho();
        let delta = self.delta(w, &rho)?;
        let ratio = match &delta {
            Delta::Exact(d) if !d.is_zero() => Some(&rho / d),
            _ => None,
        };
        let holds = options
            .alpha
            .as_ref()
            .and_then(|a| delta.compare(|d| rho >= a * d));
        let epsilon = options.tau.as_ref().map(|t| census.tau_soundness_error(t));
        let per_view = options.include_views.then(|| census.per_view());
        Ok(RobustnessReport {
            instance: self.label.clone(),
            source,
            rho,
            delta,
            ratio,
            alpha: options.alpha.clone(),
            holds,
            tau: options.tau.clone(),
            epsilon,
            per_view,
            estimate: None,
        })
    }

    /// Like [`report`](Self::report) but with `ρ` estimated from `samples`
    /// seeded views. δ bounds then use 0 as the lower end, since the
    /// estimate is not a certified lower bound.
    pub fn report_sampled(
        &self,
        w: &Word,
        source: WordSource,
        options: &ReportOptions,
        seed: u64,
        samples: usize,
    ) -> Result<RobustnessReport, TesterError> {
        let est = self.sampled_robustness(w, seed, samples)?;
        let delta = match self.delta(w, &Rational::zero())? {
            exact @ Delta::Exact(_) => exact,
            Delta::Bounds { upper, .. } => Delta::Bounds {
                lower: Rational::zero(),
                upper,
            },
        };
        let rho = est.mean;
        let ratio = match &delta {
            Delta::Exact(d) if !d.is_zero() => Some(&rho / d),
            _ => None,
        };
        let holds = options
            .alpha
            .as_ref()
            .and_then(|a| delta.compare(|d| rho >= a * d));
        Ok(RobustnessReport {
            instance: self.label.clone(),
            source,
            rho,
            delta,
            ratio,
            alpha: options.alpha.clone(),
            holds,
            tau: None,
            epsilon: None,
            per_view: None,
            estimate: Some(EstimateInfo {
                samples,
                seed,
                std_error: est.std_error,
            }),
        })
    }
}

/// Hamming distances of all views from the small code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewCensus {
    pub distances: Vec<usize>,
    pub degree: usize,
}

impl ViewCensus {
    /// Mean view robustness, summed in right-vertex order.
    pub fn rho(&self) -> Rational {
        let total: u64 = self.distances.iter().map(|&d| d as u64).sum();
        frac(total, (self.distances.len() * self.degree) as u64)
    }

    pub fn per_view(&self) -> Vec<Rational> {
        self.distances
            .iter()
            .map(|&d| frac(d as u64, self.degree as u64))
            .collect()
    }

    /// Fraction of views strictly farther than `tau` from the small code.
    pub fn tau_soundness_error(&self, tau: &Rational) -> Rational {
        let far = self
            .per_view()
            .iter()
            .filter(|r| *r > tau)
            .count();
        frac(far as u64, self.distances.len() as u64)
    }

    /// Fraction of views that reject (distance > 0).
    pub fn reject_fraction(&self) -> Rational {
        let rejecting = self.distances.iter().filter(|&&d| d > 0).count();
        frac(rejecting as u64, self.distances.len() as u64)
    }
}

/// `δ_C(w)`: exact, or an interval when the full code cannot be enumerated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Delta {
    Exact(Rational),
    Bounds { lower: Rational, upper: Rational },
}

impl Delta {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Delta::Exact(d) => Some(d),
            Delta::Bounds { .. } => None,
        }
    }

    /// Evaluates a predicate that is monotone decreasing in δ: exact when δ
    /// is known, decided from the bounds when both ends agree, else `None`.
    fn compare(&self, pred: impl Fn(&Rational) -> bool) -> Option<bool> {
        match self {
            Delta::Exact(d) => Some(pred(d)),
            Delta::Bounds { lower, upper } => {
                if pred(upper) {
                    Some(true)
                } else if !pred(lower) {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub mean: Rational,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certification {
    pub rho: Rational,
    pub delta: Delta,
    /// `None` when δ is only bounded and the bounds do not decide.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amplification {
    pub repetitions: u64,
    /// Probability that a single run rejects.
    pub single_reject: Rational,
    /// `1 - (1 - p)^c`.
    pub reject_prob: Rational,
    pub delta: Delta,
    pub holds: Option<bool>,
}

/// Where a tested word came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordSource {
    pub kind: String,
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slice: Option<usize>,
}

impl WordSource {
    pub fn named(kind: impl Into<String>, index: usize) -> Self {
        WordSource {
            kind: kind.into(),
            index,
            weight: None,
            axis: None,
            slice: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    pub alpha: Option<Rational>,
    pub tau: Option<Rational>,
    pub include_views: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub instance: String,
    pub source: WordSource,
    pub rho: Rational,
    pub delta: Delta,
    /// `ρ/δ`, absent when δ is zero or not exact.
    pub ratio: Option<Rational>,
    pub alpha: Option<Rational>,
    pub holds: Option<bool>,
    pub tau: Option<Rational>,
    pub epsilon: Option<Rational>,
    pub per_view: Option<Vec<Rational>>,
    /// Set when `rho` is a sampled estimate rather than the exact mean.
    pub estimate: Option<EstimateInfo>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateInfo {
    pub samples: usize,
    pub seed: u64,
    pub std_error: f64,
}

/// Decimal renderings carry this many significant digits.
pub const DECIMAL_DIGITS: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct ReportRecord {
    pub instance: String,
    pub word_source: WordSource,
    pub rho: String,
    pub rho_decimal: String,
    pub delta: Option<String>,
    pub delta_decimal: Option<String>,
    pub delta_exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_bounds: Option<[String; 2]>,
    pub ratio: Option<String>,
    pub ratio_decimal: Option<String>,
    pub alpha: Option<String>,
    pub holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub views: Option<Vec<(usize, String)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateInfo>,
}

impl RobustnessReport {
    pub fn record(&self) -> ReportRecord {
        let s = to_fraction_string;
        let dec = |r: &Rational| to_decimal(r, DECIMAL_DIGITS);
        let (delta, delta_bounds) = match &self.delta {
            Delta::Exact(d) => (Some(d), None),
            Delta::Bounds { lower, upper } => (None, Some([s(lower), s(upper)])),
        };
        ReportRecord {
            instance: self.instance.clone(),
            word_source: self.source.clone(),
            rho: s(&self.rho),
            rho_decimal: dec(&self.rho),
            delta: delta.map(s),
            delta_decimal: delta.map(dec),
            delta_exact: delta.is_some(),
            delta_bounds,
            ratio: self.ratio.as_ref().map(s),
            ratio_decimal: self.ratio.as_ref().map(dec),
            alpha: self.alpha.as_ref().map(s),
            holds: self.holds,
            tau: self.tau.as_ref().map(s),
            epsilon: self.epsilon.as_ref().map(s),
            views: self
                .per_view
                .as_ref()
                .map(|v| v.iter().enumerate().map(|(j, r)| (j, s(r))).collect()),
            estimate: self.estimate,
        }
    }
}

/// `wt(i) = Σ_j [i ∈ ℓ_j] · p_j / q_j` under the uniform test distribution
/// (`p_j = 1/m_right`, `q_j = t`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateWeights {
    pub weights: Vec<Rational>,
    pub min_weight: Rational,
    pub argmin: usize,
}

pub fn coordinate_weights(graph: &OrderedGraph) -> CoordinateWeights {
    let per_edge = (graph.m_right() * graph.degree()) as u64;
    let weights: Vec<Rational> = graph
        .left_degrees()
        .into_iter()
        .map(|c| frac(c as u64, per_edge))
        .collect();
    let (argmin, min_weight) = weights
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, w)| (i, w.clone()))
        .expect("graph has left vertices");
    CoordinateWeights {
        weights,
        min_weight,
        argmin,
    }
}

/// The unit word at the lightest coordinate: its robustness equals that
/// coordinate's weight (when the small code has distance ≥ 2) and is at most
/// its distance from the full code, so no tester can be more than 1-robust.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightWitness {
    pub coordinate: usize,
    pub weight: Rational,
    pub rho: Rational,
    pub delta: Delta,
}

pub fn weight_one_witness(instance: &TestInstance) -> Result<WeightWitness, TesterError> {
    let weights = coordinate_weights(instance.graph());
    let w = Word::unit(
        instance.small().field(),
        instance.graph().n_left(),
        weights.argmin,
    );
    let rho = instance.expected_robustness(&w)?;
    let delta = instance.delta(&w, &rho)?;
    Ok(WeightWitness {
        coordinate: weights.argmin,
        weight: weights.min_weight,
        rho,
        delta,
    })
}

/// Self-improvement check for the m-product tester over an `[n,k,d]` code:
/// when `(d/n)^{m-1} ≥ 7/8` and `δ ≤ 1/4`, expects `δ ≤ 8ρ`. `None` when the
/// hypotheses do not apply.
pub fn self_improvement_check(n: usize, d: usize, m: usize, rho: &Rational, delta: &Rational) -> Option<bool> {
    if !Hypotheses::evaluate(n, d, m).self_improvement || delta > &frac(1, 4) {
        return None;
    }
    Some(delta <= &(frac(8, 1) * rho))
}

/// Soundness-error bound for the m-product tester over an `[n,k,d]` code:
/// for every threshold τ with `τ + 2ε(τ) ≤ ((d-1)/n)^m / 12`, expects
/// `δ ≤ 16 (n/d)^{m-1} (τ + ε(τ))`. Thresholds are taken at 0 and at each
/// distinct view robustness, where `τ + ε(τ)` attains its local minima.
/// `None` when no threshold meets the hypothesis.
pub fn soundness_error_check(
    n: usize,
    d: usize,
    m: usize,
    census: &ViewCensus,
    delta: &Rational,
) -> Option<bool> {
    if d == 0 {
        return None;
    }
    let limit = num_traits::pow(frac(d.saturating_sub(1) as u64, n as u64), m) / frac(12, 1);
    let factor = frac(16, 1) * num_traits::pow(frac(n as u64, d as u64), m - 1);
    let mut taus = census.per_view();
    taus.push(Rational::zero());
    taus.sort();
    taus.dedup();
    let mut applicable = false;
    for tau in taus {
        let eps = census.tau_soundness_error(&tau);
        if &tau + frac(2, 1) * &eps > limit {
            continue;
        }
        applicable = true;
        if delta > &(&factor * (&tau + &eps)) {
            return Some(false);
        }
    }
    applicable.then_some(true)
}
