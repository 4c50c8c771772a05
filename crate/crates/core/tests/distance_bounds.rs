use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tensor_ltc::code::{LinearCode, Word};
use tensor_ltc::field::Field;
use tensor_ltc::ratio::frac;
use tensor_ltc::tester::{self_improvement_check, soundness_error_check, Delta, Hypotheses, TestInstance};

fn rs(q: u64, n: usize, k: usize) -> LinearCode {
    LinearCode::reed_solomon(Field::new(q).unwrap(), n, k).unwrap()
}

/// Words near a random codeword, so that δ is small enough for the
/// distance-bound checks to apply.
fn near_codewords(inst: &TestInstance, count: usize, seed: u64) -> Vec<Word> {
    let full = inst.full().unwrap();
    let q = full.field().modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let msg: Vec<u32> = (0..full.k()).map(|_| rng.gen_range(0..q)).collect();
            let mut s = full.encode(&msg).unwrap().into_symbols();
            for _ in 0..(i % 7) {
                let p = rng.gen_range(0..s.len());
                s[p] = rng.gen_range(0..q);
            }
            Word::new(full.field(), s).unwrap()
        })
        .collect()
}

#[test]
fn self_improvement_and_soundness_bounds_hold() {
    let code = rs(7, 7, 1);
    let inst = TestInstance::m_product(&code, 3).unwrap();
    assert!(inst.hypotheses().unwrap().self_improvement);
    let mut applied = (0, 0);
    for w in near_codewords(&inst, 150, 1) {
        let census = inst.census(&w).unwrap();
        let rho = census.rho();
        let Delta::Exact(delta) = inst.delta(&w, &rho).unwrap() else {
            panic!("delta should be exact");
        };
        if let Some(ok) = self_improvement_check(7, 7, 3, &rho, &delta) {
            assert!(ok, "self-improvement bound fails: rho={rho}, delta={delta}");
            applied.0 += 1;
        }
        if let Some(ok) = soundness_error_check(7, 7, 3, &census, &delta) {
            assert!(ok, "soundness-error bound fails: delta={delta}");
            applied.1 += 1;
        }
    }
    assert!(applied.0 > 0 && applied.1 > 0, "checks never applied: {applied:?}");
}

#[test]
fn hypotheses_are_recorded_separately() {
    let h = Hypotheses::evaluate(31, 31, 3);
    assert!(h.product_tester && h.self_improvement);
    let h = Hypotheses::evaluate(8, 8, 2);
    assert!(!h.product_tester, "(7/8)^2 < 7/8");
    assert!(h.self_improvement, "(8/8)^1 ≥ 7/8");
    let h = Hypotheses::evaluate(100, 100, 4);
    assert!(h.square && h.polylog && h.four_two);
}

#[test]
fn square_and_iterated_instances_measure_exactly() {
    let c = LinearCode::repetition(Field::new(2).unwrap(), 2).unwrap();
    for inst in [
        TestInstance::square(&c, 2).unwrap(),
        TestInstance::iterated(&c, 4, 2).unwrap(),
    ] {
        assert_eq!(inst.graph().degree(), 4);
        assert_eq!(inst.graph().n_left(), 16);
        assert_eq!(inst.guaranteed_alpha(), None);
        let w = Word::unit(Field::new(2).unwrap(), 16, 5);
        let rho = inst.expected_robustness(&w).unwrap();
        assert!(rho > frac(0, 1));
        assert_eq!(inst.delta(&w, &rho).unwrap(), Delta::Exact(frac(1, 16)));
    }
}

#[test]
fn tau_soundness_error_is_monotone() {
    let inst = TestInstance::m_product(&rs(5, 5, 2), 2).unwrap();
    for w in near_codewords(&inst, 30, 9) {
        let census = inst.census(&w).unwrap();
        let mut last = frac(1, 1);
        for t in 0..=5 {
            let eps = census.tau_soundness_error(&frac(t, 5));
            assert!(eps <= last);
            last = eps;
        }
        assert_eq!(last, frac(0, 1));
    }
}
