//! Exhaustive verification sweeps that check the sign machinery against
//! brute-force recolorings of raw edge assignments. The oracle routes here
//! deliberately avoid the propagation code paths they test.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{all_colorings, edge_colors, Color};
use crate::dynamics::apply_admissible;
use crate::tree::{tree_iter, vertex_triples, Tree};
use crate::triangulation::vertex_triangles;
use crate::{Error, Result};

/// Brute-force sweeps enumerate 3^(2n-1) edge assignments per tree.
pub const ORACLE_CAP: usize = 6;

/// All proper edge 3-colorings of a tree, found by enumerating every raw
/// assignment and testing propriety at each internal vertex directly.
fn brute_force_proper_colorings(t: &Tree) -> Vec<Vec<Color>> {
    let edges = 2 * t.leaf_count() - 1;
    let triples = vertex_triples(t);
    let mut out = Vec::new();
    for mut k in 0..3u64.pow(edges as u32) {
        let mut colors = Vec::with_capacity(edges);
        for _ in 0..edges {
            colors.push(Color::from_index((k % 3) as usize));
            k /= 3;
        }
        let proper = triples.iter().all(|&(p, l, r)| {
            colors[p] != colors[l] && colors[p] != colors[r] && colors[l] != colors[r]
        });
        if proper {
            out.push(colors);
        }
    }
    out
}

/// Does any proper coloring of `t` exist with the given leaf-edge and
/// root-edge colors fixed? Brute force over the free internal edges only.
fn proper_extension_exists(t: &Tree, fixed: &[Option<Color>]) -> bool {
    let triples = vertex_triples(t);
    let free: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i].is_none()).collect();
    let mut colors: Vec<Color> = fixed.iter().map(|c| c.unwrap_or(Color::I)).collect();
    let total = 3u64.pow(free.len() as u32);
    'outer: for mut k in 0..total {
        for &i in &free {
            colors[i] = Color::from_index((k % 3) as usize);
            k /= 3;
        }
        for &(p, l, r) in &triples {
            if colors[p] == colors[l] || colors[p] == colors[r] || colors[l] == colors[r] {
                continue 'outer;
            }
        }
        return true;
    }
    false
}

#[derive(Clone, Debug, Serialize)]
pub struct BijectionMismatch {
    pub tree: String,
    pub brute_force_count: usize,
    pub propagated_count: usize,
    pub sets_equal: bool,
}

/// Per tree: the brute-force proper colorings versus the image of
/// (root color, sign vector) propagation. They must be the same set of
/// size 3 * 2^(n-1).
#[derive(Clone, Debug, Serialize)]
pub struct ColoringBijectionReport {
    pub max_n: usize,
    pub trees_checked: u64,
    pub mismatches: Vec<BijectionMismatch>,
}

impl ColoringBijectionReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn verify_coloring_bijection(max_n: usize) -> Result<ColoringBijectionReport> {
    if !(2..=ORACLE_CAP).contains(&max_n) {
        return Err(Error::Cap {
            what: "coloring bijection leaf count",
            n: max_n,
            cap: ORACLE_CAP,
        });
    }
    let mut trees_checked = 0u64;
    let mut mismatches = Vec::new();
    for n in 2..=max_n {
        let trees: Vec<Tree> = tree_iter(n)?.collect();
        trees_checked += trees.len() as u64;
        let results: Vec<Option<BijectionMismatch>> = trees
            .par_iter()
            .map(|tree| {
                let mut brute = brute_force_proper_colorings(tree);
                brute.sort();
                let mut derived: Vec<Vec<Color>> = all_colorings(n - 1)
                    .map(|c| edge_colors(tree, &c))
                    .collect();
                derived.sort();
                derived.dedup();
                let expected = 3 * (1usize << (n - 1));
                let ok = brute == derived && brute.len() == expected;
                (!ok).then(|| BijectionMismatch {
                    tree: tree.to_string(),
                    brute_force_count: brute.len(),
                    propagated_count: derived.len(),
                    sets_equal: brute == derived,
                })
            })
            .collect();
        mismatches.extend(results.into_iter().flatten());
    }
    Ok(ColoringBijectionReport {
        max_n,
        trees_checked,
        mismatches,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityMismatch {
    pub tree: String,
    pub signs: String,
    pub site: usize,
    pub rule_admissible: bool,
    pub oracle_admissible: bool,
}

/// Per (tree, sign vector, site): the equal-signs rule versus the oracle
/// "the flip admits a proper recoloring with identical leaf colors and
/// root color", plus the sign-update law after admissible flips.
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityRuleReport {
    pub max_n: usize,
    pub checks: u64,
    pub rule_mismatches: Vec<AdmissibilityMismatch>,
    pub sign_update_violations: u64,
}

impl AdmissibilityRuleReport {
    pub fn holds(&self) -> bool {
        self.rule_mismatches.is_empty() && self.sign_update_violations == 0
    }
}

pub fn verify_admissibility_rule(max_n: usize) -> Result<AdmissibilityRuleReport> {
    if !(3..=ORACLE_CAP).contains(&max_n) {
        return Err(Error::Cap {
            what: "admissibility rule leaf count",
            n: max_n,
            cap: ORACLE_CAP,
        });
    }
    let mut checks = 0u64;
    let mut rule_mismatches = Vec::new();
    let mut sign_update_violations = 0u64;
    for n in 3..=max_n {
        for tree in tree_iter(n)? {
            let details: Vec<_> = tree
                .sites()
                .iter()
                .map(|&s| tree.move_details(s).unwrap())
                .collect();
            let old_triangles = vertex_triangles(&tree);
            let old_infos = crate::tree::edge_list(&tree);
            let old_leaf_node = |label: u32| {
                old_infos
                    .iter()
                    .find(|e| e.kind == crate::tree::EdgeKind::Leaf(label))
                    .unwrap()
                    .node_index
            };
            for c in all_colorings(n - 1) {
                if c.root != Color::K {
                    continue; // dynamics fix the root color to K
                }
                let colors = edge_colors(&tree, &c);
                let st = crate::dynamics::State::new(tree.clone(), c.signs.clone())?;
                for d in &details {
                    checks += 1;
                    let rule = c.signs[d.parent_index] == c.signs[d.child_index];

                    // oracle: fix leaf and root edges of the flipped tree to
                    // the current colors, brute-force the internal edges
                    let flipped = &d.result;
                    let mut fixed: Vec<Option<Color>> = vec![None; 2 * n - 1];
                    for info in crate::tree::edge_list(flipped) {
                        match info.kind {
                            crate::tree::EdgeKind::Root => {
                                fixed[info.node_index] = Some(Color::K);
                            }
                            crate::tree::EdgeKind::Leaf(label) => {
                                fixed[info.node_index] = Some(colors[old_leaf_node(label)]);
                            }
                            crate::tree::EdgeKind::Internal(_) => {}
                        }
                    }
                    let oracle = proper_extension_exists(flipped, &fixed);
                    if rule != oracle {
                        rule_mismatches.push(AdmissibilityMismatch {
                            tree: tree.to_string(),
                            signs: st.signs_string(),
                            site: d.child_index,
                            rule_admissible: rule,
                            oracle_admissible: oracle,
                        });
                        continue;
                    }
                    if !rule {
                        continue;
                    }

                    // sign-update law: participants flip, all other vertices
                    // (identified by their unchanged triangles) carry over
                    let st2 = apply_admissible(&st, crate::tree::MoveSite(d.child_index))?;
                    let common = c.signs[d.parent_index];
                    let new_triangles = vertex_triangles(&st2.tree);
                    let mut ok = true;
                    for (w2, tri) in new_triangles.iter().enumerate() {
                        match old_triangles.iter().position(|t| t == tri) {
                            Some(w1) => {
                                if st2.signs[w2] != c.signs[w1] {
                                    ok = false;
                                }
                            }
                            None => {
                                if st2.signs[w2] != common.flip() {
                                    ok = false;
                                }
                            }
                        }
                    }
                    if new_triangles
                        .iter()
                        .filter(|tr| !old_triangles.contains(tr))
                        .count()
                        != 2
                    {
                        ok = false;
                    }
                    if !ok {
                        sign_update_violations += 1;
                    }
                }
            }
        }
    }
    Ok(AdmissibilityRuleReport {
        max_n,
        checks,
        rule_mismatches,
        sign_update_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bijection_holds_small() {
        let report = verify_coloring_bijection(4).unwrap();
        assert!(report.holds());
        assert_eq!(report.trees_checked, 1 + 2 + 5);
        assert!(verify_coloring_bijection(12).is_err());
    }

    #[test]
    fn admissibility_rule_holds_small() {
        let report = verify_admissibility_rule(5).unwrap();
        assert!(report.holds(), "{report:?}");
        // n=3: 2 trees * 4 sign vectors * 1 site; n=4: 5 * 8 * 2;
        // n=5: 14 * 16 * 3
        assert_eq!(report.checks, 8 + 80 + 672);
    }

    #[test]
    fn brute_force_oracle_counts() {
        for n in 2..=4 {
            for tree in tree_iter(n).unwrap() {
                assert_eq!(
                    brute_force_proper_colorings(&tree).len(),
                    3 * (1 << (n - 1))
                );
            }
        }
    }
}
