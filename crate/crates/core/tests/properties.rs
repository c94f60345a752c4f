use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treecell::differential::{diff_tree, differential};
use treecell::enumerate::enumerate_family;
use treecell::hochschild::{hochschild_differential, random_homogeneous, AInfAlgebra};
use treecell::operad::{compose_trees, pi_inf, pi_inf_chain};
use treecell::polytope::{from_bracketing, to_bracketing};
use treecell::{ChainElement, Family, Tree};

fn pick(family: Family, n: usize, k: usize) -> Tree {
    let trees = enumerate_family(family, n).unwrap();
    trees[k % trees.len()].clone()
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Bipart), Just(Family::Stable), Just(Family::Ht)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_and_json_round_trip(f in family(), n in 1usize..=3, k in any::<usize>()) {
        let t = pick(f, n, k);
        prop_assert_eq!(Tree::parse_compact(&t.to_compact()).unwrap(), t.clone());
        prop_assert_eq!(Tree::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn differential_squares_to_zero_on_sums(f in family(), n in 1usize..=3, ks in proptest::collection::vec((any::<usize>(), -3i64..=3), 1..5)) {
        let mut x = ChainElement::zero(f);
        for (k, c) in ks {
            x.add_term(pick(f, n, k), c.into());
        }
        prop_assert!(differential(&differential(&x)).is_zero());
    }

    #[test]
    fn composition_is_a_derivation(f in family(), k1 in any::<usize>(), k2 in any::<usize>(), i in 1usize..=2) {
        let a = pick(f, 2, k1);
        let b = pick(f, 2, k2);
        prop_assert!(treecell::operad::check_derivation(f.parent(), &a, i, &b).unwrap());
    }

    #[test]
    fn projection_commutes_with_composition(k1 in any::<usize>(), k2 in any::<usize>(), i in 1usize..=2) {
        let a = pick(Family::Stable, 2, k1);
        let b = pick(Family::Stable, 2, k2);
        let lhs = pi_inf_chain(&compose_trees(Family::Stable, &a, i, &b).unwrap());
        let rhs = treecell::operad::compose(&pi_inf(&a), i, &pi_inf(&b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn projection_is_a_chain_map(n in 1usize..=3, k in any::<usize>()) {
        let t = pick(Family::Stable, n, k);
        prop_assert_eq!(pi_inf_chain(&diff_tree(Family::Stable, &t)), differential(&pi_inf(&t)));
    }

    #[test]
    fn bracketings_invert(cyclic in any::<bool>(), n in 2usize..=4, k in any::<usize>()) {
        let f = if cyclic { Family::Cyclo } else { Family::Pp };
        let trees: Vec<Tree> = enumerate_family(f, n).unwrap().into_iter()
            .filter(|t| cyclic || treecell::family::is_planar_labelled(t))
            .collect();
        let t = &trees[k % trees.len()];
        let b = to_bracketing(t, cyclic).unwrap();
        prop_assert_eq!(&from_bracketing(&b).unwrap(), t);
    }

    #[test]
    fn hochschild_differential_squares_to_zero(which in 0usize..3, arity in 0usize..=2, seed in any::<u64>()) {
        let mut a = [AInfAlgebra::dual_numbers(), AInfAlgebra::koszul_dga(), AInfAlgebra::massey_example()][which].clone();
        a.cap = 8;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_homogeneous(&a, arity, &mut rng);
        let dd = hochschild_differential(&a, &hochschild_differential(&a, &f).unwrap()).unwrap();
        prop_assert!(dd.is_zero());
    }
}
