mod common;

use hadamard_core::circuit::Gate;
use hadamard_core::gen::{random_circuit, random_homogeneous_poly};
use hadamard_core::linalg::{basis_of_matrix_set, span_coordinates, Matrix};
use hadamard_core::poly::{CMonomial, CPoly, NcPoly, Word};
use hadamard_core::scalar::{Field, Scalar};
use hadamard_core::Caps;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::Rng;

fn field_of(which: usize) -> Field {
    [Field::Rationals, Field::prime(2).unwrap(), Field::prime(5).unwrap()][which].clone()
}

fn random_matrix(field: &Field, rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    let e = common::random_point(field, rows * cols, rng);
    Matrix::new(rows, cols, field.clone(), e).unwrap()
}

/// A product of `rows x r` and `r x cols` random matrices, so rank at most `r`.
fn low_rank(field: &Field, rows: usize, cols: usize, r: usize, rng: &mut impl Rng) -> Matrix {
    random_matrix(field, rows, r, rng)
        .matmul(&random_matrix(field, r, cols, rng))
        .unwrap()
}

fn random_nc(field: &Field, n: usize, rng: &mut impl Rng) -> NcPoly {
    let mut f = NcPoly::zero(n, field.clone());
    for d in 0..=3 {
        f = f.add(&random_homogeneous_poly(field, n, d, 4, rng)).unwrap();
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hadamard_rank_is_submultiplicative(seed in any::<u64>(), which in 0usize..3) {
        let field = field_of(which);
        let mut rng = common::rng(seed);
        let (rows, cols) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let a = low_rank(&field, rows, cols, rng.gen_range(1..=3), &mut rng);
        let b = low_rank(&field, rows, cols, rng.gen_range(1..=3), &mut rng);
        let h = a.hadamard(&b).unwrap();
        prop_assert!(h.rank() <= a.rank() * b.rank());
    }

    #[test]
    fn basis_spans_the_input(seed in any::<u64>(), which in 0usize..3) {
        let field = field_of(which);
        let mut rng = common::rng(seed);
        let (rows, cols) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let k = rng.gen_range(1..=6);
        let mut mats: Vec<Matrix> = (0..k).map(|_| random_matrix(&field, rows, cols, &mut rng)).collect();
        // Throw in a combination of earlier elements.
        let c = common::random_point(&field, 2, &mut rng);
        let combo = mats[0].scale(&c[0]).add(&mats[k - 1].scale(&c[1])).unwrap();
        mats.push(combo);
        let keep = basis_of_matrix_set(&mats).unwrap();
        let basis: Vec<Matrix> = keep.iter().map(|&i| mats[i].clone()).collect();
        prop_assert!(basis.len() <= k);
        for m in &mats {
            let coords = span_coordinates(&basis, m).unwrap();
            prop_assert!(coords.is_some());
            let coords = coords.unwrap();
            let mut acc = Matrix::zeros(rows, cols, field.clone());
            for (b, c) in basis.iter().zip(&coords) {
                acc = acc.add(&b.scale(c)).unwrap();
            }
            prop_assert_eq!(&acc, m);
        }
    }

    #[test]
    fn determinant_is_multiplicative(seed in any::<u64>(), which in 0usize..3) {
        let field = field_of(which);
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=5);
        let a = random_matrix(&field, n, n, &mut rng);
        let b = random_matrix(&field, n, n, &mut rng);
        let ab = a.matmul(&b).unwrap();
        prop_assert_eq!(ab.det().unwrap(), &a.det().unwrap() * &b.det().unwrap());
        prop_assert_eq!(a.det().unwrap().is_zero(), a.rank() < n);
    }

    #[test]
    fn determinant_matches_cofactor_expansion(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=5);
        let m = hadamard_core::gen::random_int_matrix(n, 9, &mut rng);
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| m.get(i, j).as_rational().unwrap().to_integer().to_i64().unwrap()).collect())
            .collect();
        prop_assert_eq!(m.det().unwrap(), Field::Rationals.from_bigint(&common::cofactor_det(&rows)));
    }

    #[test]
    fn hadamard_laws(seed in any::<u64>(), which in 0usize..3) {
        let field = field_of(which);
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=3);
        let (f, g, h) = (random_nc(&field, n, &mut rng), random_nc(&field, n, &mut rng), random_nc(&field, n, &mut rng));
        let fg = f.hadamard(&g).unwrap();
        prop_assert_eq!(&fg, &common::naive_hadamard(&f, &g));
        prop_assert_eq!(&fg, &g.hadamard(&f).unwrap());
        prop_assert_eq!(fg.hadamard(&h).unwrap(), f.hadamard(&g.hadamard(&h).unwrap()).unwrap());
        prop_assert_eq!(
            f.hadamard(&g.add(&h).unwrap()).unwrap(),
            fg.add(&f.hadamard(&h).unwrap()).unwrap()
        );
        let both: std::collections::BTreeSet<Word> = f.mon_set().intersection(&g.mon_set()).cloned().collect();
        prop_assert_eq!(fg.mon_set(), both);
        for k in 0..=3 {
            prop_assert_eq!(fg.homogeneous_part(k), f.homogeneous_part(k).hadamard(&g.homogeneous_part(k)).unwrap());
        }
    }

    #[test]
    fn self_product_at_ones_is_square_sum(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=3);
        let f = random_nc(&Field::Rationals, n, &mut rng);
        let g = random_nc(&Field::Rationals, n, &mut rng);
        let ones = vec![Scalar::integer(1); n];
        let ff = f.hadamard(&f).unwrap().eval(&ones).unwrap();
        prop_assert_eq!(&ff, &common::sum_of_squares(&f));
        prop_assert_eq!(ff.is_zero(), f.is_zero());
        let fg = f.hadamard(&g).unwrap().eval(&ones).unwrap();
        let gg = g.hadamard(&g).unwrap().eval(&ones).unwrap();
        prop_assert!((&fg * &fg).as_rational().unwrap() <= (&ff * &gg).as_rational().unwrap());
    }

    #[test]
    fn commutative_hadamard_cauchy_schwarz(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let n = 4;
        let random_cpoly = |rng: &mut rand_chacha::ChaCha8Rng| {
            let terms: Vec<(CMonomial, Scalar)> = (0..6)
                .map(|_| {
                    let m = CMonomial::from_support((0..n as u32).filter(|_| rng.gen_bool(0.5)));
                    (m, Scalar::integer(rng.gen_range(-5..=5)))
                })
                .collect();
            CPoly::from_terms(n, Field::Rationals, terms).unwrap()
        };
        let f = random_cpoly(&mut rng);
        let g = random_cpoly(&mut rng);
        let c = f.corr(&g).unwrap();
        prop_assert!(&c * &c <= f.norm_sq().unwrap() * g.norm_sq().unwrap());
        let h = f.hadamard(&g).unwrap();
        for (m, v) in h.terms() {
            prop_assert_eq!(v, &(&f.coeff(m) * &g.coeff(m)));
        }
    }

    #[test]
    fn circuits_expand_gate_by_gate(seed in any::<u64>(), which in 0usize..2) {
        let field = common::test_fields()[which].clone();
        let mut rng = common::rng(seed);
        let n = rng.gen_range(1..=3);
        let c = random_circuit(&field, n, 10, 5, false, &mut rng);
        let caps = Caps::default();
        let all = hadamard_core::circuit::expand_all(&c, &caps).unwrap();
        for (id, gate) in c.gates().iter().enumerate() {
            let want = match gate {
                Gate::Input(v) => NcPoly::var(n, field.clone(), *v),
                Gate::Const(k) => NcPoly::constant(n, k.clone()),
                Gate::Add(a, b) => all[*a].add(&all[*b]).unwrap(),
                Gate::Mul(a, b) => all[*a].mul(&all[*b]).unwrap(),
            };
            prop_assert_eq!(&all[id], &want);
            prop_assert!(all[id].degree().map_or(true, |d| d <= c.formal_degrees()[id]));
        }
        let pt = common::random_point(&field, n, &mut rng);
        prop_assert_eq!(c.evaluate(&pt).unwrap(), all[c.output()].eval(&pt).unwrap());
    }

    #[test]
    fn monotone_circuits_have_positive_coefficients(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let c = random_circuit(&Field::Rationals, 2, 10, 5, true, &mut rng);
        prop_assert!(c.is_monotone().unwrap());
        let f = c.expand(&Caps::default()).unwrap();
        prop_assert!(f.terms().values().all(|v| num_traits::Signed::is_positive(v.as_rational().unwrap())));
    }
}

#[test]
fn spec_examples() {
    let f = NcPoly::from_terms(
        2,
        Field::Rationals,
        [
            (Word(vec![0, 1]), Scalar::integer(2)),
            (Word(vec![1]), Scalar::integer(3)),
        ],
    )
    .unwrap();
    let g = NcPoly::from_terms(
        2,
        Field::Rationals,
        [
            (Word(vec![0, 1]), Scalar::integer(5)),
            (Word(vec![1, 0]), Scalar::integer(7)),
        ],
    )
    .unwrap();
    let h = f.hadamard(&g).unwrap();
    assert_eq!(h.len(), 1);
    assert_eq!(h.coeff(&Word(vec![0, 1])), Scalar::integer(10));

    let a = Matrix::from_integers(2, 2, &[1, 2, 3, 4]).unwrap();
    assert_eq!(a.det().unwrap(), Scalar::integer(-2));
    assert_eq!(a.rank(), 2);
    let f2 = Matrix::new(
        2,
        2,
        Field::prime(2).unwrap(),
        (0..4)
            .map(|v| Field::prime(2).unwrap().from_bigint(&[1, 1, 1, 1][v].into()))
            .collect(),
    )
    .unwrap();
    assert_eq!(f2.rank(), 1);
}
