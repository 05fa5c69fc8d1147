mod common;

use hadamard_core::abp::{Abp, NodeId};
use hadamard_core::gen::{random_abp, random_circuit, AbpShape};
use hadamard_core::products::{hadamard_abp, hadamard_circuit_abp, hadamard_normalized, product_index};
use hadamard_core::scalar::Field;
use hadamard_core::Caps;
use proptest::prelude::*;
use rand::Rng;

fn pair(seed: u64) -> (Abp, Abp) {
    let mut rng = common::rng(seed);
    let field = common::test_fields()[rng.gen_range(0..2)].clone();
    let n = rng.gen_range(1..=3);
    let mut one = || {
        let d = rng.gen_range(1..=4);
        let w = rng.gen_range(1..=3);
        let shape = if rng.gen_bool(0.5) {
            AbpShape::affine(n, d, w)
        } else {
            AbpShape::homogeneous(n, d, w)
        };
        random_abp(&field, &shape, &mut rng)
    };
    (one(), one())
}

/// A pair of homogeneous programs of equal depth.
fn homogeneous_pair(seed: u64) -> (Abp, Abp) {
    let mut rng = common::rng(seed);
    let field = common::test_fields()[rng.gen_range(0..2)].clone();
    let n = rng.gen_range(1..=3);
    let d = rng.gen_range(1..=4);
    let p = random_abp(&field, &AbpShape::homogeneous(n, d, rng.gen_range(1..=3)), &mut rng);
    let q = random_abp(&field, &AbpShape::homogeneous(n, d, rng.gen_range(1..=3)), &mut rng);
    (p, q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn abp_product_matches_coefficientwise_product(seed in any::<u64>()) {
        let (p, q) = pair(seed);
        let out = hadamard_abp(&p, &q).unwrap();
        out.abp.validate().unwrap();
        let expect = common::naive_hadamard(&common::paths_expand(&p), &common::paths_expand(&q));
        prop_assert_eq!(common::paths_expand(&out.abp), expect);
        for deg in &out.report.degrees {
            let widths: Vec<usize> = deg.left_layers.iter().zip(&deg.right_layers).map(|(a, b)| a * b).collect();
            prop_assert_eq!(&deg.product_layers, &widths);
        }
        prop_assert!(out.report.nodes_after_prune <= out.report.nodes_before_prune);
    }

    #[test]
    fn intermediate_nodes_compute_products(seed in any::<u64>()) {
        let (p, q) = homogeneous_pair(seed);
        let raw = hadamard_normalized(&p.normalize_edges().unwrap(), &q.normalize_edges().unwrap()).unwrap();
        let mut rng = common::rng(seed ^ 0xabc);
        for _ in 0..4 {
            let i = rng.gen_range(0..=p.depth());
            let a = rng.gen_range(0..p.layers()[i]);
            let b = rng.gen_range(0..q.layers()[i]);
            let node = NodeId::new(i, product_index(a, b, q.layers()[i]));
            let h = common::paths_expand(&raw.between(raw.source(), node).unwrap());
            let f = common::paths_expand(&p.between(p.source(), NodeId::new(i, a)).unwrap());
            let g = common::paths_expand(&q.between(q.source(), NodeId::new(i, b)).unwrap());
            prop_assert_eq!(h, common::naive_hadamard(&f, &g));
        }
    }

    #[test]
    fn circuit_product_matches_coefficientwise_product(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let field = common::test_fields()[rng.gen_range(0..2)].clone();
        let n = rng.gen_range(1..=3);
        let c = random_circuit(&field, n, 8, 3, false, &mut rng);
        let shape = if rng.gen_bool(0.5) {
            AbpShape::affine(n, rng.gen_range(1..=3), 2)
        } else {
            AbpShape::homogeneous(n, rng.gen_range(1..=3), 2)
        };
        let p = random_abp(&field, &shape, &mut rng);
        let caps = Caps::default();
        let out = hadamard_circuit_abp(&c, &p).unwrap();
        out.circuit.validate().unwrap();
        let expect = common::naive_hadamard(&c.expand(&caps).unwrap(), &common::paths_expand(&p));
        prop_assert_eq!(out.circuit.expand(&caps).unwrap(), expect);

        // Every product gate computes the degree-l slice of its circuit gate
        // times the sub-program between its two nodes.
        for per in &out.per_degree {
            for (key, &gate) in per.gates.iter().take(40) {
                let slice = c.expand_gate(key.gate, &caps).unwrap().homogeneous_part(key.l);
                let sub = if per.degree == 0 {
                    // The empty path; the constant is applied at the output.
                    hadamard_core::poly::NcPoly::constant(n, field.one())
                } else {
                    let from = NodeId::new(key.i, key.a);
                    let to = NodeId::new(key.i + key.l, key.b);
                    common::paths_expand(&per.part.between(from, to).unwrap())
                };
                prop_assert_eq!(
                    out.circuit.expand_gate(gate, &caps).unwrap(),
                    common::naive_hadamard(&slice, &sub),
                    "gate {:?}", key
                );
            }
        }
    }
}

#[test]
fn mismatched_inputs_are_rejected() {
    let mut rng = common::rng(1);
    let p = random_abp(&Field::Rationals, &AbpShape::homogeneous(2, 2, 2), &mut rng);
    let q = random_abp(&Field::Rationals, &AbpShape::homogeneous(3, 2, 2), &mut rng);
    assert!(hadamard_abp(&p, &q).is_err());
    let r = random_abp(&Field::prime(5).unwrap(), &AbpShape::homogeneous(2, 2, 2), &mut rng);
    assert!(hadamard_abp(&p, &r).is_err());
}

#[test]
fn disjoint_degrees_give_zero() {
    let mut rng = common::rng(2);
    let p = random_abp(&Field::Rationals, &AbpShape::homogeneous(2, 2, 2), &mut rng);
    let q = random_abp(&Field::Rationals, &AbpShape::homogeneous(2, 3, 2), &mut rng);
    let out = hadamard_abp(&p, &q).unwrap();
    assert!(common::paths_expand(&out.abp).is_zero());
    assert!(out.report.degrees.is_empty());
}
