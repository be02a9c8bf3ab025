use proptest::prelude::*;

use crsym::canonical_forms::{build_pair, d_pair, BlockSpec, Sign, SymbolSpec};
use crsym::catalog::standard_lambdas;
use crsym::exact_linalg::{float_rank, kernel, rref, ExactMatrix, GaussianRational as Q, MatrixSubspace};
use crsym::symbol_algebra::{assemble_symbol, involution_matrix};

fn scalar() -> impl Strategy<Value = Q> {
    (-3i64..=3, -2i64..=2, 1i64..=3).prop_map(|(re, im, den)| &Q::from_ints(re, im) * &Q::ratio(1, den))
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = ExactMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(scalar(), r * c).prop_map(move |v| ExactMatrix::from_vec(r, c, v).unwrap())
    })
}

/// Products of thin factors so that rank deficiency is common.
fn low_rank_matrix() -> impl Strategy<Value = ExactMatrix> {
    (1usize..=6, 1usize..=6, 0usize..=4).prop_flat_map(|(r, c, k)| {
        let k = k.min(r).min(c);
        (prop::collection::vec(scalar(), r * k), prop::collection::vec(scalar(), k * c)).prop_map(move |(a, b)| {
            if k == 0 {
                ExactMatrix::zeros(r, c)
            } else {
                &ExactMatrix::from_vec(r, k, a).unwrap() * &ExactMatrix::from_vec(k, c, b).unwrap()
            }
        })
    })
}

fn square(n: usize) -> impl Strategy<Value = ExactMatrix> {
    prop::collection::vec(scalar(), n * n).prop_map(move |v| ExactMatrix::from_vec(n, n, v).unwrap())
}

fn spec() -> impl Strategy<Value = SymbolSpec> {
    let block = (0..standard_lambdas().len(), 1usize..=2, any::<bool>()).prop_map(|(l, m, plus)| {
        BlockSpec::new(standard_lambdas()[l].clone(), m, if plus { Sign::Plus } else { Sign::Minus })
    });
    prop::collection::vec(block, 1..=3).prop_filter_map("zero operator", |b| SymbolSpec::new(b).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity(m in low_rank_matrix()) {
        prop_assert_eq!(m.rank() + kernel(&m).dim(), m.cols());
    }

    #[test]
    fn kernel_vectors_are_annihilated(m in low_rank_matrix()) {
        for v in kernel(&m).basis() {
            prop_assert!((&m * v).is_zero());
        }
    }

    #[test]
    fn rref_is_idempotent(m in matrix(5, 6)) {
        let once = rref(&m);
        let twice = rref(&once.reduced);
        prop_assert_eq!(&once.reduced, &twice.reduced);
        prop_assert_eq!(once.pivots, twice.pivots);
    }

    #[test]
    fn span_ignores_generator_choice(gens in prop::collection::vec(square(2), 1..4), c in scalar()) {
        let base = MatrixSubspace::span((2, 2), &gens).unwrap();
        let mut mixed = gens.clone();
        if mixed.len() > 1 {
            mixed[0] = &mixed[0] + &mixed[1].scale(&c);
        }
        mixed.reverse();
        mixed.push(gens[0].scale(&c));
        prop_assert_eq!(base, MatrixSubspace::span((2, 2), &mixed).unwrap());
    }

    #[test]
    fn sum_and_intersection_dimensions(u in prop::collection::vec(square(2), 1..3), v in prop::collection::vec(square(2), 1..3)) {
        let u = MatrixSubspace::span((2, 2), &u).unwrap();
        let v = MatrixSubspace::span((2, 2), &v).unwrap();
        let sum = u.sum(&v).unwrap();
        let cap = u.intersection(&v).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), u.dim() + v.dim());
        prop_assert!(cap.is_subspace_of(&u) && cap.is_subspace_of(&v));
    }

    #[test]
    fn float_rank_agrees_with_exact(m in low_rank_matrix()) {
        prop_assert_eq!(float_rank(&m, 1e-9), m.rank());
    }

    #[test]
    fn involution_is_an_involution(m in square(4)) {
        prop_assert_eq!(involution_matrix(&involution_matrix(&m)), m);
    }

    #[test]
    fn d_pair_is_symmetric(s in spec()) {
        for i in 0..s.blocks.len() {
            for j in 0..s.blocks.len() {
                prop_assert_eq!(d_pair(&s, i, j), d_pair(&s, j, i));
            }
        }
    }

    #[test]
    fn canonical_pairs_are_valid_and_csp(s in spec()) {
        let pair = build_pair(&s).unwrap();
        prop_assert!(crsym::canonical_forms::validate(&pair.h, &pair.a).is_ok());
        let sym = assemble_symbol(&s).unwrap();
        for b in sym.g0().basis() {
            prop_assert!(sym.space.weight(b).is_some());
        }
    }

    #[test]
    fn spec_json_round_trips(s in spec()) {
        prop_assert_eq!(SymbolSpec::from_json(&s.to_json()).unwrap(), s);
    }
}
