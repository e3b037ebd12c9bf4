mod common;

use std::collections::BTreeMap;

use common::*;
use painted_operad::formal::{build_b, check_comm, extract_lalgebra, glue};
use painted_operad::lalgebra::{
    evaluate_tree_correlator, evaluate_with, random_commuting, random_generic, relation_defect, tensor, verify,
    verify_linear_relations, EvalOptions, LAlgebra, SpecialSlot,
};
use painted_operad::linalg::Mat;
use painted_operad::rational::q;
use painted_operad::series::{monomials, VectorFieldSeries};
use painted_operad::trees::{enumerate_trees, GoodFamily, Label, PaintedSet};
use painted_operad::{Error, Q};
use proptest::prelude::*;

/// A fully symmetric L-algebra with two `T` and two `F` directions, read off
/// a glued solution `B2(θ + B1(t)h)` with `B2` the Jacobian of a vector field.
fn glued_lalgebra(seed: u64, order: u32) -> LAlgebra {
    let diag = matrix_series(&["t1", "t2"], 2, order, &[(&[1, 0], Mat::unit(2, 0, 0)), (&[0, 1], Mat::unit(2, 1, 1))]);
    let a = t0_family(seed, 2, order + 1);
    let a2 = VectorFieldSeries::new(vec!["f1".into(), "f2".into()], a.components).unwrap();
    let b = glue(&diag, &a2, &[q(1), q(1)]).unwrap();
    extract_lalgebra(&b).unwrap()
}

fn random_vec(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| small(rng, 3)).collect()
}

fn random_inputs(l: &LAlgebra, s: PaintedSet, seed: u64) -> BTreeMap<Label, Vec<Q>> {
    let mut r = rng(seed);
    s.labels().skip(1).map(|lab| (lab, random_vec(&mut r, if lab.is_white() { l.dim_f() } else { l.dim_t() }))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn defect_matches_ordered_oracle(seed in any::<u64>(), dt in 0usize..=2, df in 1usize..=2, order in 2usize..=4) {
        let l = random_generic(seed, dt, df, order);
        let n = l.num_indices();
        for e in monomials(n, 0, order as u32 - 2) {
            let args: Vec<usize> = e.iter().enumerate().flat_map(|(a, &k)| std::iter::repeat(a).take(k as usize)).collect();
            for i in 0..n {
                for k in 0..n {
                    prop_assert_eq!(relation_defect(&l, &e, i, k), ordered_defect(&l, &args, i, k));
                }
            }
        }
    }

    #[test]
    fn verify_agrees_with_check_comm(seed in any::<u64>(), commuting in any::<bool>()) {
        let l = if commuting { random_commuting(seed, 1, 2, 4) } else { random_generic(seed, 1, 2, 4) };
        prop_assert_eq!(verify(&l).passes(), check_comm(&build_b(&l)).passes());
        if commuting {
            prop_assert!(verify(&l).passes());
        }
    }

    #[test]
    fn tensor_of_valid_is_valid(s1 in any::<u64>(), s2 in any::<u64>(), order in 2usize..=3) {
        let a = random_commuting(s1, 1, 2, order);
        let b = random_commuting(s2, 1, 1, order);
        let t = tensor(&a, &b).unwrap();
        prop_assert_eq!((t.dim_t(), t.dim_f()), (1, 2));
        prop_assert!(verify(&t).passes());
    }

    #[test]
    fn unit_is_neutral_for_tensor(seed in any::<u64>(), dt in 0usize..=1, df in 1usize..=3) {
        let l = random_commuting(seed, dt, df, 3);
        let u = LAlgebra::unit(1, 3).unwrap();
        prop_assert_eq!(tensor(&l, &u).unwrap(), l.clone());
        prop_assert_eq!(tensor(&u, &l).unwrap(), l);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let l = random_generic(seed, 1, 2, 3);
        let text = serde_json::to_string(&l.to_json()).unwrap();
        let back = LAlgebra::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, l);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn glued_family_is_fully_symmetric(seed in any::<u64>()) {
        let l = glued_lalgebra(seed, 4);
        let report = verify(&l);
        prop_assert!(report.passes());
        prop_assert!(report.fully_symmetric());
    }

    #[test]
    fn glued_family_kills_linear_relations(seed in any::<u64>()) {
        let l = glued_lalgebra(seed, 4);
        for (w, b) in [(4u32, 0u32), (3, 1), (2, 2), (5, 0)] {
            let s = PaintedSet::new(w, b).unwrap();
            let report = verify_linear_relations(&l, s, s.top_degree()).unwrap();
            prop_assert!(report.passes(), "{s}: {:?}", report.violations.first());
        }
    }

    #[test]
    fn evaluation_ignores_slot_and_cut_order(seed in any::<u64>(), input_seed in any::<u64>()) {
        let l = glued_lalgebra(seed, 4);
        for (w, b) in [(4u32, 1u32), (5, 0), (3, 2)] {
            let s = PaintedSet::new(w, b).unwrap();
            let inputs = random_inputs(&l, s, input_seed);
            for g in enumerate_trees(s, None) {
                let reference = evaluate_tree_correlator(&l, &g, &inputs).unwrap();
                let last = EvalOptions { special: SpecialSlot::Last, ..Default::default() };
                prop_assert_eq!(&evaluate_with(&l, &g, &inputs, &last).unwrap(), &reference);
                let mut edges: Vec<_> = g.partitions().collect();
                edges.reverse();
                let opts = EvalOptions { cut_order: Some(edges), special: SpecialSlot::First };
                match evaluate_with(&l, &g, &inputs, &opts) {
                    Ok(v) => prop_assert_eq!(&v, &reference),
                    Err(Error::Precondition(_)) => {}
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }
        }
    }

    #[test]
    fn one_vertex_evaluation_is_symmetric(seed in any::<u64>(), input_seed in any::<u64>()) {
        let l = glued_lalgebra(seed, 4);
        let s = PaintedSet::new(4, 2).unwrap();
        let g = GoodFamily::empty(s);
        let inputs = random_inputs(&l, s, input_seed);
        let reference = evaluate_tree_correlator(&l, &g, &inputs).unwrap();
        let mut swapped = inputs.clone();
        swapped.insert(Label::white(2), inputs[&Label::white(4)].clone());
        swapped.insert(Label::white(4), inputs[&Label::white(2)].clone());
        swapped.insert(Label::black(1), inputs[&Label::black(2)].clone());
        swapped.insert(Label::black(2), inputs[&Label::black(1)].clone());
        prop_assert_eq!(evaluate_tree_correlator(&l, &g, &swapped).unwrap(), reference);
    }
}

#[test]
fn corrupted_symmetric_family_breaks_linear_relations() {
    let mut l = glued_lalgebra(7, 4);
    let exp = l.exponent_of(&[2, 3]);
    let bumped = l.get(&exp).add(&Mat::unit(2, 0, 1));
    l.set(exp, bumped).unwrap();
    let s = PaintedSet::new(5, 0).unwrap();
    assert!(!verify_linear_relations(&l, s, 1).unwrap().passes());
}

#[test]
fn arity_above_order_is_rejected() {
    let l = random_commuting(1, 0, 1, 2);
    let s = PaintedSet::new(5, 0).unwrap();
    let inputs = random_inputs(&l, s, 0);
    let err = evaluate_tree_correlator(&l, &GoodFamily::empty(s), &inputs).unwrap_err();
    assert!(matches!(err, Error::Arity { arity: 3, order: 2 }));
}

#[test]
fn random_inputs_are_reproducible() {
    let l = random_commuting(1, 1, 2, 3);
    let s = PaintedSet::new(3, 1).unwrap();
    assert_eq!(random_inputs(&l, s, 9), random_inputs(&l, s, 9));
}
