//! The rotation graph: vertices are all trees with n leaves, edges are
//! single transplantations.

use std::collections::HashMap;

use serde::Serialize;

use crate::tree::{catalan_g_u64, tree_iter, MoveSite, Tree};
use crate::{Error, Result};

/// Structure-only queries (build, distance, girth) are capped here.
pub const GAMMA_CAP: usize = 12;

#[derive(Clone, Debug)]
pub struct RotationGraph {
    pub n: usize,
    pub trees: Vec<Tree>,
    /// Per vertex: (site, neighbor rank), sites ascending.
    pub adj: Vec<Vec<(MoveSite, u32)>>,
}

impl RotationGraph {
    pub fn vertex_count(&self) -> usize {
        self.trees.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Every vertex has degree n-2.
    pub fn is_regular(&self) -> bool {
        let d = self.n.saturating_sub(2);
        self.adj.iter().all(|a| a.len() == d)
    }

    pub fn rank_of(&self, t: &Tree) -> Option<u32> {
        let r = t.rank();
        (r < self.trees.len() as u64).then_some(r as u32)
    }

    /// BFS distances from one vertex (u32::MAX if unreachable).
    pub fn bfs_distances(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        dist[src as usize] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &self.adj[v as usize] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(|&d| d != u32::MAX)
    }
}

/// Build the full rotation graph with deterministic adjacency order.
pub fn build_gamma(n: usize) -> Result<RotationGraph> {
    if !(2..=GAMMA_CAP).contains(&n) {
        return Err(Error::Cap {
            what: "rotation graph leaf count",
            n,
            cap: GAMMA_CAP,
        });
    }
    let trees: Vec<Tree> = tree_iter(n)?.collect();
    let rank: HashMap<u64, u32> = trees
        .iter()
        .enumerate()
        .map(|(i, t)| (t.shape_code(), i as u32))
        .collect();
    let adj = trees
        .iter()
        .map(|t| {
            t.sites()
                .into_iter()
                .map(|s| {
                    let moved = t.apply_move(s).expect("site valid");
                    (s, rank[&moved.shape_code()])
                })
                .collect()
        })
        .collect();
    Ok(RotationGraph { n, trees, adj })
}

/// BFS distance between two trees in the rotation graph.
pub fn rotation_distance(l: &Tree, r: &Tree) -> Result<usize> {
    let n = l.leaf_count();
    if r.leaf_count() != n {
        return Err(Error::LeafMismatch {
            left: n,
            right: r.leaf_count(),
        });
    }
    if !l.is_standard() || !r.is_standard() {
        return Err(Error::NonStandard("rotation_distance"));
    }
    if l == r {
        return Ok(0);
    }
    // frontier BFS over shape codes; avoids materializing the whole graph
    let target = r.shape_code();
    let mut seen: std::collections::HashSet<u64> = [l.shape_code()].into_iter().collect();
    let mut frontier = vec![l.clone()];
    let mut dist = 0usize;
    let total = catalan_g_u64(n).unwrap_or(u64::MAX);
    while !frontier.is_empty() {
        dist += 1;
        let mut next = Vec::new();
        for t in frontier {
            for s in t.sites() {
                let moved = t.apply_move(s).expect("site valid");
                let code = moved.shape_code();
                if code == target {
                    return Ok(dist);
                }
                if seen.insert(code) {
                    next.push(moved);
                }
            }
        }
        frontier = next;
        if seen.len() as u64 > total {
            break;
        }
    }
    unreachable!("rotation graphs are connected")
}

/// Counts of short cycles and the girth they imply.
#[derive(Clone, Debug, Serialize)]
pub struct GirthReport {
    pub n: usize,
    pub vertices: usize,
    pub edges: usize,
    pub regular_degree: usize,
    pub triangle_count: u64,
    pub four_cycle_count: u64,
    pub five_cycle_count: u64,
    /// None would mean no cycle of length <= 5 exists; rotation graphs with
    /// n >= 4 always have pentagons.
    pub girth: Option<usize>,
}

/// Count simple k-cycles: each counted once (canonical smallest start,
/// both directions collapsed).
fn count_cycles(adj: &[Vec<u32>], k: usize) -> u64 {
    fn dfs(
        adj: &[Vec<u32>],
        start: u32,
        cur: u32,
        depth: usize,
        k: usize,
        visited: &mut Vec<u32>,
        count: &mut u64,
    ) {
        for &w in &adj[cur as usize] {
            if w == start && depth == k {
                *count += 1;
            } else if w > start && depth < k && !visited.contains(&w) {
                visited.push(w);
                dfs(adj, start, w, depth + 1, k, visited, count);
                visited.pop();
            }
        }
    }
    let mut count = 0u64;
    for start in 0..adj.len() as u32 {
        let mut visited = vec![start];
        dfs(adj, start, start, 1, k, &mut visited, &mut count);
    }
    count / 2
}

/// Girth and 4-/5-cycle counts of the rotation graph.
pub fn girth_report(n: usize) -> Result<GirthReport> {
    if !(4..=GAMMA_CAP).contains(&n) {
        return Err(Error::Cap {
            what: "girth report leaf count",
            n,
            cap: GAMMA_CAP,
        });
    }
    let gamma = build_gamma(n)?;
    let adj: Vec<Vec<u32>> = gamma
        .adj
        .iter()
        .map(|a| a.iter().map(|&(_, w)| w).collect())
        .collect();
    let triangle_count = count_cycles(&adj, 3);
    let four_cycle_count = count_cycles(&adj, 4);
    let five_cycle_count = count_cycles(&adj, 5);
    let girth = if triangle_count > 0 {
        Some(3)
    } else if four_cycle_count > 0 {
        Some(4)
    } else if five_cycle_count > 0 {
        Some(5)
    } else {
        None
    };
    Ok(GirthReport {
        n,
        vertices: gamma.vertex_count(),
        edges: gamma.edge_count(),
        regular_degree: n - 2,
        triangle_count,
        four_cycle_count,
        five_cycle_count,
        girth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma3_is_a_single_edge() {
        let g = build_gamma(3).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn gamma4_is_the_pentagon() {
        let g = build_gamma(4).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 5);
        assert!(g.is_regular());
        assert!(g.is_connected());
        let report = girth_report(4).unwrap();
        assert_eq!(report.girth, Some(5));
        assert_eq!(report.triangle_count, 0);
        assert_eq!(report.four_cycle_count, 0);
        assert_eq!(report.five_cycle_count, 1);
    }

    #[test]
    fn gamma5_structure() {
        let g = build_gamma(5).unwrap();
        assert_eq!(g.vertex_count(), 14);
        assert_eq!(g.edge_count(), 21);
        assert!(g.is_regular());
        let report = girth_report(5).unwrap();
        assert_eq!(report.girth, Some(4));
        assert_eq!(report.triangle_count, 0);
        assert_eq!(report.four_cycle_count, 3);
        assert_eq!(report.five_cycle_count, 6);
    }

    #[test]
    fn gamma_counts_match_catalan_and_regularity() {
        for n in 2..=10 {
            let g = build_gamma(n).unwrap();
            assert_eq!(g.vertex_count() as u64, catalan_g_u64(n).unwrap());
            assert!(g.is_regular());
            assert!(g.is_connected());
            assert_eq!(g.edge_count(), g.vertex_count() * (n - 2) / 2);
        }
    }

    #[test]
    fn distance_examples() {
        let lc = Tree::left_comb(4);
        let rc = Tree::right_comb(4);
        assert_eq!(rotation_distance(&lc, &lc).unwrap(), 0);
        assert_eq!(rotation_distance(&lc, &rc).unwrap(), 2);
        assert_eq!(
            rotation_distance(&Tree::left_comb(3), &Tree::right_comb(3)).unwrap(),
            1
        );
    }

    #[test]
    fn distance_agrees_with_graph_bfs() {
        for n in 3..=6 {
            let g = build_gamma(n).unwrap();
            for a in 0..g.vertex_count() {
                let dist = g.bfs_distances(a as u32);
                for (b, &d) in dist.iter().enumerate() {
                    assert_eq!(
                        rotation_distance(&g.trees[a], &g.trees[b]).unwrap(),
                        d as usize
                    );
                }
            }
        }
    }

    #[test]
    fn caps_enforced() {
        assert!(build_gamma(40).is_err());
        assert!(girth_report(3).is_err());
    }
}
