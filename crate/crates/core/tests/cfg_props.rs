mod common;

use std::collections::BTreeSet;

use hadamard_core::cfg::{
    build_l1_grammar, build_l2_grammar, cfg_to_circuit, circuit_to_cfg, intersect_bruteforce, AcyclicCfg, Production,
    Symbol,
};
use hadamard_core::circuit::{CircuitBuilder, Gate};
use hadamard_core::gen::{random_cfg, random_circuit};
use hadamard_core::poly::Word;
use hadamard_core::scalar::{Field, Scalar};
use hadamard_core::Caps;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::Rng;

/// Derivation trees of `w` from `sym`, by plain recursion over every split.
fn trees(g: &AcyclicCfg, sym: Symbol, w: &[u32]) -> BigUint {
    match sym {
        Symbol::T(t) => BigUint::from((w == [t]) as u8),
        Symbol::N(a) => g
            .productions()
            .iter()
            .filter(|p| p.lhs == a)
            .map(|p| match p.rhs.as_slice() {
                [] => BigUint::from(w.is_empty() as u8),
                [s] => trees(g, *s, w),
                [s, t] => (0..=w.len())
                    .map(|k| trees(g, *s, &w[..k]) * trees(g, *t, &w[k..]))
                    .sum(),
                _ => unreachable!(),
            })
            .sum(),
    }
}

fn check_counts(g: &AcyclicCfg, max_len: usize) {
    let c = cfg_to_circuit(g).unwrap();
    let f = c.expand(&Caps::default()).unwrap();
    for w in common::all_words(g.n_terminals(), max_len) {
        let count = g.count_derivations(&w);
        assert_eq!(count, trees(g, Symbol::N(g.start()), &w.0), "word {w:?}");
        let coeff = f.coeff(&w);
        assert_eq!(coeff, Field::Rationals.from_bigint(&count.into()), "word {w:?}");
    }
    let lang = g.language(max_len, &Caps::default()).unwrap();
    let support: BTreeSet<Word> = f.mon_set().into_iter().filter(|w| w.degree() <= max_len).collect();
    assert_eq!(lang, support);
}

fn triple_words(n: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for w in hadamard_core::poly::words_of_length(n, n) {
        let mut v = w.0.clone();
        v.extend(w.0.iter().rev());
        v.extend(&w.0);
        out.insert(Word(v));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn grammar_circuit_counts_derivations(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let g = random_cfg(rng.gen_range(1..=5), rng.gen_range(1..=2), &mut rng);
        check_counts(&g, 6);
    }

    #[test]
    fn monotone_round_trip_keeps_support(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=2);
        let c = random_circuit(&Field::Rationals, n, 10, 4, true, &mut rng);
        let caps = Caps::default();
        let g = circuit_to_cfg(&c).unwrap();
        let back = cfg_to_circuit(&g).unwrap().expand(&caps).unwrap();
        let orig = c.expand(&caps).unwrap();
        prop_assert!(orig.terms().values().all(|v| num_traits::Signed::is_positive(v.as_rational().unwrap())));
        prop_assert!(back.terms().values().all(|v| num_traits::Signed::is_positive(v.as_rational().unwrap())));
        for w in common::all_words(n, 6) {
            prop_assert_eq!(orig.coeff(&w).is_zero(), back.coeff(&w).is_zero(), "word {:?}", w);
        }
        prop_assert!(g.size() <= 4 * c.size().gates + c.n_vars() + 1);
    }
}

#[test]
fn two_part_grammars_intersect_in_triples() {
    let caps = Caps::default();
    for n in 1..=3 {
        let l1 = build_l1_grammar(n).unwrap();
        let l2 = build_l2_grammar(n).unwrap();
        let both = intersect_bruteforce(&l1, &l2, 3 * n, &caps).unwrap();
        assert_eq!(both, triple_words(n), "n = {n}");
        // Each word of the languages has exactly one derivation.
        for g in [&l1, &l2] {
            let lang = g.language(3 * n, &caps).unwrap();
            assert_eq!(lang.len(), n.pow(2 * n as u32));
            for w in lang.iter().take(200) {
                assert_eq!(g.count_derivations(w), BigUint::from(1u8));
            }
        }
    }
    for n in 1..=2 {
        check_counts(&build_l1_grammar(n).unwrap(), 6);
        check_counts(&build_l2_grammar(n).unwrap(), 6);
    }
}

#[test]
fn grammar_size_tracks_circuit_size() {
    let mut rng = common::rng(21);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let c = random_circuit(&Field::Rationals, 2, 12, 5, true, &mut rng);
        let g = circuit_to_cfg(&c).unwrap();
        let gates = c.size().gates as f64;
        worst = worst.max(g.size() as f64 / gates);
    }
    // A gate becomes one nonterminal with at most two productions of total
    // size four, plus the terminals.
    assert!(worst <= 7.0, "ratio {worst}");
    println!("grammar size / circuit gates: at most {worst:.2}");
}

#[test]
fn cyclic_grammars_are_rejected() {
    let names = vec!["S".to_string(), "A".to_string()];
    let prods = vec![
        Production {
            lhs: 0,
            rhs: vec![Symbol::N(1)],
        },
        Production {
            lhs: 1,
            rhs: vec![Symbol::N(0), Symbol::T(0)],
        },
    ];
    assert!(AcyclicCfg::new(names.clone(), 1, 0, prods).is_err());
    let long = vec![Production {
        lhs: 0,
        rhs: vec![Symbol::T(0), Symbol::T(0), Symbol::T(0)],
    }];
    assert!(AcyclicCfg::new(names, 1, 0, long).is_err());
}

#[test]
fn zero_constants_are_propagated_before_conversion() {
    let mut b = CircuitBuilder::new(1, Field::Rationals);
    let x = b.input(0).unwrap();
    let z = b.constant(Scalar::integer(0)).unwrap();
    let m = b.mul(x, z).unwrap();
    let s = b.add(m, x).unwrap();
    let c = b.finish(s).unwrap();
    let g = circuit_to_cfg(&c).unwrap();
    assert_eq!(
        g.language(3, &Caps::default()).unwrap(),
        BTreeSet::from([Word(vec![0])])
    );

    let c = hadamard_core::circuit::Circuit::from_gates(1, Field::Rationals, vec![Gate::Const(Scalar::integer(0))], 0)
        .unwrap();
    let g = circuit_to_cfg(&c).unwrap();
    assert!(g.language(3, &Caps::default()).unwrap().is_empty());
    assert!(cfg_to_circuit(&g).unwrap().expand(&Caps::default()).unwrap().is_zero());
}
