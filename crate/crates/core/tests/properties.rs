use std::sync::Arc;

use proptest::prelude::*;
use tensor_ltc::code::{LinearCode, Word};
use tensor_ltc::field::Field;
use tensor_ltc::ratio::{frac, parse_rational, to_f64, to_fraction_string, Rational};
use tensor_ltc::tanner::{OrderedGraph, TannerCode};
use tensor_ltc::tensor::{tensor_product, TensorCode, TensorWord};
use tensor_ltc::tester::{Delta, TestInstance};

const PRIMES: &[u64] = &[2, 3, 5, 7, 11, 13, 31, 257, 65521];

fn rs(q: u64, n: usize, k: usize) -> LinearCode {
    LinearCode::reed_solomon(Field::new(q).unwrap(), n, k).unwrap()
}

/// Small Reed-Solomon code over GF(q) for q in {3, 5}, with n ≤ q.
fn small_rs() -> impl Strategy<Value = LinearCode> {
    prop_oneof![Just(3u64), Just(5u64)].prop_flat_map(|q| {
        (2..=q as usize).prop_flat_map(move |n| (1..n).prop_map(move |k| rs(q, n, k)))
    })
}

fn symbols(q: u64, len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..q as u32, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(qi in 0..PRIMES.len(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = Field::new(PRIMES[qi]).unwrap();
        let (a, b, c) = (f.reduce(a as u64), f.reduce(b as u64), f.reduce(c as u64));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.sub(a, b), b), a);
        if b != 0 {
            prop_assert_eq!(f.mul(f.div(a, b).unwrap(), b), a);
        }
        prop_assert_eq!(f.pow(a, f.modulus() as u64), a);
    }

    #[test]
    fn encoding_is_linear(code in small_rs(), seed in any::<u64>()) {
        let q = code.field().modulus();
        let f = code.field();
        let x: Vec<u32> = (0..code.k()).map(|i| ((seed >> (i * 3)) % q as u64) as u32).collect();
        let y: Vec<u32> = (0..code.k()).map(|i| ((seed >> (i * 5 + 1)) % q as u64) as u32).collect();
        let sum: Vec<u32> = x.iter().zip(&y).map(|(&a, &b)| f.add(a, b)).collect();
        let ex = code.encode(&x).unwrap();
        let ey = code.encode(&y).unwrap();
        let expected: Vec<u32> = ex.symbols().iter().zip(ey.symbols()).map(|(&a, &b)| f.add(a, b)).collect();
        let encoded = code.encode(&sum).unwrap();
        prop_assert_eq!(encoded.symbols(), expected.as_slice());
        prop_assert!(code.is_codeword(&ex).unwrap());
    }

    #[test]
    fn nearest_codeword_is_nearest(code in small_rs(), word in symbols(5, 5), msg in symbols(5, 4)) {
        let q = code.field().modulus() as u64;
        let word: Vec<u64> = word.iter().take(code.n()).map(|&s| s as u64 % q).collect();
        let w = Word::from_values(code.field(), &word).unwrap();
        let nearest = code.nearest_codeword(&w).unwrap();
        prop_assert!(code.is_codeword(&nearest.codeword).unwrap());
        let msg: Vec<u32> = msg.iter().take(code.k()).map(|&s| s % q as u32).collect();
        let other = code.encode(&msg).unwrap();
        let d = tensor_ltc::code::distance(&w, &other).unwrap();
        prop_assert!(nearest.hamming <= d.hamming);
    }

    #[test]
    fn tensor_distance_is_product(a in small_rs(), b in small_rs()) {
        prop_assume!(a.field() == b.field());
        let t = TensorCode::new(vec![a.clone(), b.clone()]).unwrap();
        let flat = t.to_linear_code().unwrap();
        prop_assume!(flat.codeword_count() <= 1 << 16);
        let da = a.min_distance().unwrap();
        let db = b.min_distance().unwrap();
        prop_assert_eq!(flat.min_distance().unwrap(), da * db);
        prop_assert_eq!(flat.k(), a.k() * b.k());
    }

    #[test]
    fn matrix_view_of_tensor_product(a in small_rs(), b in small_rs(), seed in any::<u64>()) {
        prop_assume!(a.field() == b.field());
        let f = a.field();
        let q = f.modulus() as u64;
        // X is k2 x k1; M2ᵀ X M1 is n2 x n1 with rows in C1 and columns in C2.
        let x: Vec<Vec<u32>> = (0..b.k())
            .map(|r| (0..a.k()).map(|c| ((seed >> ((r * 4 + c) % 60)) % q) as u32).collect())
            .collect();
        let m1 = a.generator();
        let m2 = b.generator();
        let mut out = vec![0u32; b.n() * a.n()];
        for i in 0..b.n() {
            for j in 0..a.n() {
                let mut acc = 0;
                for r in 0..b.k() {
                    for c in 0..a.k() {
                        acc = f.add(acc, f.mul(f.mul(m2.get(r, i), x[r][c]), m1.get(c, j)));
                    }
                }
                out[i * a.n() + j] = acc;
            }
        }
        let code = tensor_product(&a, &b).unwrap();
        prop_assert!(code.is_codeword(&Word::new(f, out).unwrap()).unwrap());
    }

    #[test]
    fn tanner_membership_matches_tensor(code in small_rs(), m in 2usize..=3, seed in any::<u64>(), plant in any::<bool>()) {
        let tensor = TensorCode::power(&code, m).unwrap();
        let q = code.field().modulus();
        let len: usize = tensor.shape().iter().product();
        prop_assume!(len <= 125);
        let mut rng = seed;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng >> 33) % q as u64) as u32
        };
        let msg_shape = tensor.message_shape();
        let msg: Vec<u32> = (0..msg_shape.iter().product::<usize>()).map(|_| next()).collect();
        let mut word = tensor
            .encode(&TensorWord::new(code.field(), msg_shape, msg).unwrap())
            .unwrap()
            .into_word()
            .into_symbols();
        if plant {
            let pos = next() as usize % len;
            word[pos] = code.field().add(word[pos], 1);
        }
        let tw = TensorWord::new(code.field(), tensor.shape(), word).unwrap();
        let small = TensorCode::power(&code, m - 1).unwrap().to_linear_code().unwrap();
        let tpc = TannerCode::new(Arc::new(OrderedGraph::product(code.n(), m).unwrap()), small).unwrap();
        prop_assert_eq!(tpc.contains(&tw.to_word()).unwrap(), tensor.contains(&tw).unwrap());
    }

    #[test]
    fn codewords_have_zero_robustness(code in small_rs(), m in 2usize..=3, msg in symbols(5, 27)) {
        let inst = TestInstance::m_product(&code, m).unwrap();
        let tensor = inst.tensor().unwrap();
        let q = code.field().modulus();
        let shape = tensor.message_shape();
        let msg: Vec<u32> = msg.iter().take(shape.iter().product()).map(|&s| s % q).collect();
        prop_assume!(msg.len() == shape.iter().product::<usize>());
        let c = tensor.encode(&TensorWord::new(code.field(), shape, msg).unwrap()).unwrap().into_word();
        let rho = inst.expected_robustness(&c).unwrap();
        prop_assert_eq!(rho.clone(), frac(0, 1));
        prop_assert_eq!(inst.delta(&c, &rho).unwrap(), Delta::Exact(frac(0, 1)));
    }

    #[test]
    fn robustness_at_most_distance(code in small_rs(), m in 2usize..=3, word in symbols(5, 125)) {
        let inst = TestInstance::m_product(&code, m).unwrap();
        prop_assume!(inst.small().codeword_count() <= 1 << 16);
        let len = inst.graph().n_left();
        prop_assume!(word.len() >= len);
        let q = code.field().modulus();
        let w = Word::new(code.field(), word[..len].iter().map(|&s| s % q).collect()).unwrap();
        let rho = inst.expected_robustness(&w).unwrap();
        if let Delta::Exact(delta) = inst.delta(&w, &rho).unwrap() {
            prop_assert!(rho <= delta);
        }
    }

    #[test]
    fn composed_views_factor(j in 0usize..8, jp in 0usize..6, i in 0usize..4) {
        let outer = OrderedGraph::product(2, 4).unwrap();
        let inner = OrderedGraph::product(2, 3).unwrap();
        let composed = outer.compose(&inner).unwrap();
        let expected = outer.neighbor(j, inner.neighbor(jp, i));
        prop_assert_eq!(composed.neighbor(j * inner.m_right() + jp, i), expected);
    }

    #[test]
    fn sampled_estimate_tracks_exact(word in symbols(3, 27), seed in any::<u64>()) {
        let inst = TestInstance::m_product(&rs(3, 3, 1), 3).unwrap();
        let w = Word::new(Field::new(3).unwrap(), word).unwrap();
        let exact = to_f64(&inst.expected_robustness(&w).unwrap());
        let est = inst.sampled_robustness(&w, seed, 2000).unwrap();
        let se = est.std_error.max(1.0 / 2000.0);
        prop_assert!((to_f64(&est.mean) - exact).abs() <= 5.0 * se,
            "estimate {} vs exact {exact}, se {}", to_f64(&est.mean), est.std_error);
    }

    #[test]
    fn rational_strings_round_trip(p in 0u64..1_000_000, q in 1u64..1_000_000) {
        let r: Rational = frac(p, q);
        prop_assert_eq!(parse_rational(&to_fraction_string(&r)).unwrap(), r);
    }
}
