mod common;

use common::*;
use num_traits::Zero;
use painted_operad::cohomology::{basis_for, multiply, GradedClass};
use painted_operad::functors::fstar_edge_class;
use painted_operad::homology::{cap, check_pairings, counit_left, coproduct, kronecker, HomologyClass};
use painted_operad::trees::{enumerate_stable_partitions, EdgeSplit, GoodFamily, PaintedSet};
use painted_operad::Q;
use proptest::prelude::*;
use proptest::sample::Index;

fn sets() -> Vec<PaintedSet> {
    painted_sets(4, 6)
}

fn class_of(s: PaintedSet, pick: &Index) -> GradedClass {
    let b = basis_for(s).unwrap();
    let all: Vec<GoodFamily> = (0..=b.top_degree()).flat_map(|d| b.basis_trees(d)).collect();
    GradedClass::monomial(pick.get(&all).clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pullback_is_multiplicative(set in any::<Index>(), edge in any::<Index>(), x in any::<Index>(), y in any::<Index>()) {
        let s = *set.get(&sets());
        let sigma = *edge.get(&enumerate_stable_partitions(s));
        let split = EdgeSplit::new(sigma).unwrap();
        let basis = basis_for(s).unwrap();
        let (x, y) = (class_of(s, &x), class_of(s, &y));
        let xy = multiply(&x, &y, &basis).unwrap();
        let lhs = fstar_edge_class(&split, &xy).unwrap();
        let rhs = fstar_edge_class(&split, &x).unwrap().mul(&fstar_edge_class(&split, &y).unwrap()).unwrap();
        prop_assert!(lhs.equals(&rhs).unwrap());
    }

    #[test]
    fn pullback_kills_relations(set in any::<Index>(), edge in any::<Index>(), rel in any::<Index>()) {
        let s = *set.get(&sets());
        let sigma = *edge.get(&enumerate_stable_partitions(s));
        let split = EdgeSplit::new(sigma).unwrap();
        let basis = basis_for(s).unwrap();
        let rels: Vec<GradedClass> = (1..=basis.top_degree()).flat_map(|d| basis.relations(d)).collect();
        let r = rel.get(&rels);
        prop_assert!(fstar_edge_class(&split, r).unwrap().normalize().unwrap().is_zero());
    }

    #[test]
    fn action_is_associative(set in any::<Index>(), x in any::<Index>(), y in any::<Index>(), h in any::<Index>()) {
        let s = *set.get(&sets());
        let basis = basis_for(s).unwrap();
        let (x, y) = (class_of(s, &x), class_of(s, &y));
        let h = HomologyClass::from_vector(class_of(s, &h));
        let xy = multiply(&x, &y, &basis).unwrap();
        let lhs = cap(&basis, &xy, &h).unwrap();
        let rhs = cap(&basis, &x, &cap(&basis, &y, &h).unwrap()).unwrap();
        prop_assert!(lhs.is_zero() && rhs.is_zero() || lhs == rhs);
    }

    #[test]
    fn product_is_commutative(set in any::<Index>(), x in any::<Index>(), y in any::<Index>()) {
        let s = *set.get(&sets());
        let basis = basis_for(s).unwrap();
        let (x, y) = (class_of(s, &x), class_of(s, &y));
        prop_assert_eq!(multiply(&x, &y, &basis).unwrap(), multiply(&y, &x, &basis).unwrap());
    }

    #[test]
    fn coproduct_is_dual_to_product(set in any::<Index>(), h in any::<Index>(), a in any::<Index>(), b in any::<Index>()) {
        let s = *set.get(&sets());
        let basis = basis_for(s).unwrap();
        let h = HomologyClass::from_vector(class_of(s, &h));
        let (a, b) = (class_of(s, &a), class_of(s, &b));
        let mut paired = Q::zero();
        for (left, right, c) in coproduct(&basis, &h).unwrap() {
            paired += c * kronecker(&basis, &left, &a).unwrap() * kronecker(&basis, &right, &b).unwrap();
        }
        let ab = multiply(&a, &b, &basis).unwrap();
        prop_assert_eq!(paired, kronecker(&basis, &h, &ab).unwrap());
    }
}

#[test]
fn counit_splits_coproduct() {
    for s in painted_sets(4, 6) {
        let basis = basis_for(s).unwrap();
        for d in 0..=basis.top_degree() {
            for g in basis.basis_trees(d) {
                let h = HomologyClass::of_tree(g).normal_form(&basis).unwrap();
                let terms = coproduct(&basis, &h).unwrap();
                assert_eq!(counit_left(&basis, &terms, d).unwrap(), h, "{s}, degree {d}");
            }
        }
    }
}

#[test]
fn poincare_pairing_is_perfect() {
    for s in painted_sets(3, 6) {
        check_pairings(&basis_for(s).unwrap()).unwrap();
    }
}
