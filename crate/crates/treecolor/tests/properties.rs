//! Property tests over randomly sampled trees, colorings, and assignments.

use proptest::prelude::*;

use treecolor::algebra::{
    all_colorings, colorings_matching, evaluate_cross, evaluate_klein_sharp, leaf_vector,
    signs_from_bits, Color, Coloring, LeafVector,
};
use treecolor::dynamics::State;
use treecolor::tree::{catalan_g_u64, tree_iter, Tree};

fn arb_tree(max_n: usize) -> impl Strategy<Value = Tree> {
    (1..=max_n).prop_flat_map(|n| {
        let count = catalan_g_u64(n).unwrap();
        (0..count).prop_map(move |r| Tree::unrank(n, r).unwrap())
    })
}

fn arb_tree_min2(max_n: usize) -> impl Strategy<Value = Tree> {
    (2..=max_n).prop_flat_map(|n| {
        let count = catalan_g_u64(n).unwrap();
        (0..count).prop_map(move |r| Tree::unrank(n, r).unwrap())
    })
}

fn arb_coloring(tree: &Tree) -> impl Strategy<Value = Coloring> {
    let internal = tree.internal_count() as u32;
    (0u32..3, 0u32..(1 << internal)).prop_map(move |(root, bits)| {
        Coloring::new(
            Color::from_index(root as usize),
            signs_from_bits(internal as usize, bits),
        )
    })
}

fn arb_leaves(n: usize) -> impl Strategy<Value = LeafVector> {
    proptest::collection::vec(0usize..3, n)
        .prop_map(|v| LeafVector(v.into_iter().map(Color::from_index).collect()))
}

proptest! {
    #[test]
    fn print_parse_round_trip(tree in arb_tree(12)) {
        prop_assert_eq!(Tree::parse(&tree.to_string()).unwrap(), tree);
    }

    #[test]
    fn json_round_trips(tree in arb_tree(10)) {
        let js = serde_json::to_string(&tree).unwrap();
        prop_assert_eq!(serde_json::from_str::<Tree>(&js).unwrap(), tree);
    }

    #[test]
    fn mirror_involution_preserves_reversed_leaves(tree in arb_tree(12)) {
        let m = tree.mirror();
        let mut rev = m.leaves();
        rev.reverse();
        prop_assert_eq!(rev, tree.leaves());
        prop_assert_eq!(m.mirror(), tree);
    }

    #[test]
    fn moves_preserve_leaf_sequence((tree, site_seed) in arb_tree_min2(10).prop_flat_map(|t| {
        let sites = t.sites().len().max(1);
        (Just(t), 0..sites)
    })) {
        let sites = tree.sites();
        prop_assume!(!sites.is_empty());
        let site = sites[site_seed % sites.len()];
        let d = tree.move_details(site).unwrap();
        prop_assert_eq!(d.result.leaves(), tree.leaves());
        prop_assert_eq!(d.result.apply_move(d.inverse_site()).unwrap(), tree);
    }

    #[test]
    fn cross_and_klein_sharpness_agree((tree, x) in arb_tree_min2(9).prop_flat_map(|t| {
        let n = t.leaf_count();
        (Just(t), arb_leaves(n))
    })) {
        let cv = evaluate_cross(&tree, &x);
        let (kv, sharp) = evaluate_klein_sharp(&tree, &x);
        prop_assert_eq!(sharp, !cv.is_zero());
        if let treecolor::SignedVec::Axis(_, axis) = cv {
            prop_assert_eq!(axis.klein(), kv);
        }
    }

    #[test]
    fn matching_inverts_propagation((tree, coloring) in arb_tree_min2(9).prop_flat_map(|t| {
        let c = arb_coloring(&t);
        (Just(t), c)
    })) {
        let x = leaf_vector(&tree, &coloring);
        let found = colorings_matching(&tree, &x, Some(coloring.root));
        prop_assert_eq!(found, vec![coloring]);
    }

    #[test]
    fn coloring_and_state_json_round_trip((tree, coloring) in arb_tree_min2(8).prop_flat_map(|t| {
        let c = arb_coloring(&t);
        (Just(t), c)
    })) {
        let js = serde_json::to_string(&coloring).unwrap();
        prop_assert_eq!(serde_json::from_str::<Coloring>(&js).unwrap(), coloring.clone());
        let state = State::new(tree, coloring.signs).unwrap();
        let js = serde_json::to_string(&state).unwrap();
        prop_assert_eq!(serde_json::from_str::<State>(&js).unwrap(), state);
    }
}

/// Any single vertex sign and any single edge color can be chosen freely:
/// some coloring realizes each.
#[test]
fn free_choice_of_vertex_sign_and_edge_color() {
    use treecolor::algebra::{edge_colors, Sign};
    for n in 2..=5 {
        for tree in tree_iter(n).unwrap() {
            let colorings: Vec<Coloring> = all_colorings(n - 1).collect();
            for w in 0..n - 1 {
                for sign in [Sign::Plus, Sign::Minus] {
                    assert!(
                        colorings.iter().any(|c| c.signs[w] == sign),
                        "no coloring of {tree} puts {sign} on vertex {w}"
                    );
                }
            }
            for edge in 0..2 * n - 1 {
                for color in Color::ALL {
                    assert!(
                        colorings
                            .iter()
                            .any(|c| edge_colors(&tree, c)[edge] == color),
                        "no coloring of {tree} puts {color} on edge {edge}"
                    );
                }
            }
        }
    }
}
