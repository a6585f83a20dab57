//! Tying two trees into a cubic planar map, Tait 3-edge-colorings, and the
//! correspondence between map colorings and sharp solutions.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    all_leaf_vectors, colorings_matching, evaluate_cross, sharp_solutions, Color, LeafVector,
    SignedVec,
};
use crate::tree::{edge_list, vertex_triples, EdgeKind, Tree};
use crate::{Error, Result};

/// Ordered-pair sweeps over all trees cost |trees|^2 * 3^n; capped here.
pub const SIGN_THEOREM_CAP: usize = 7;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum TreeSide {
    L,
    R,
}

/// What a tied-map edge came from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeLabel {
    /// The glued root edges.
    Root,
    /// The glued pair of leaf edges for x_i.
    Leaf(u32),
    /// An internal edge of one tree, identified by its move site.
    Internal(TreeSide, usize),
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Root => write!(f, "root"),
            EdgeLabel::Leaf(i) => write!(f, "leaf:{i}"),
            EdgeLabel::Internal(TreeSide::L, s) => write!(f, "L:{s}"),
            EdgeLabel::Internal(TreeSide::R, s) => write!(f, "R:{s}"),
        }
    }
}

impl Serialize for EdgeLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// An undirected 3-regular multigraph with a rotation system.
#[derive(Clone, Debug, Serialize)]
pub struct CubicMap {
    pub vertex_count: usize,
    /// Edge endpoints by edge id.
    pub edges: Vec<(usize, usize)>,
    /// Cyclic order of incident edge ids at each vertex.
    pub rotation: Vec<[usize; 3]>,
}

impl CubicMap {
    /// Incident edge ids per vertex, in rotation order.
    pub fn incidence(&self, v: usize) -> [usize; 3] {
        self.rotation[v]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Checks 3-regularity and rotation consistency.
    pub fn validate(&self) -> Result<()> {
        let mut degree = vec![0usize; self.vertex_count];
        for &(a, b) in &self.edges {
            if a >= self.vertex_count || b >= self.vertex_count {
                return Err(Error::NotCubic("edge endpoint out of range".into()));
            }
            degree[a] += 1;
            degree[b] += 1;
        }
        if let Some(v) = degree.iter().position(|&d| d != 3) {
            return Err(Error::NotCubic(format!(
                "vertex {v} has degree {}",
                degree[v]
            )));
        }
        for (v, rot) in self.rotation.iter().enumerate() {
            let mut ids = *rot;
            ids.sort_unstable();
            let mut expected: Vec<usize> = self
                .edges
                .iter()
                .enumerate()
                .flat_map(|(id, &(a, b))| {
                    let mut hits = Vec::new();
                    if a == v {
                        hits.push(id);
                    }
                    if b == v {
                        hits.push(id);
                    }
                    hits
                })
                .collect();
            expected.sort_unstable();
            if ids.to_vec() != expected {
                return Err(Error::NotCubic(format!(
                    "rotation at vertex {v} does not list its incident edges"
                )));
            }
        }
        Ok(())
    }

    /// Bridge edges (an edge is a bridge if removing it disconnects its
    /// component). Parallel edges are never bridges.
    pub fn bridges(&self) -> Vec<usize> {
        let n = self.vertex_count;
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n]; // (neighbor, edge id)
        for (id, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, id));
            adj[b].push((a, id));
        }
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut bridges = Vec::new();
        let mut timer = 0usize;
        // iterative DFS: (vertex, parent edge id, adjacency cursor)
        for start in 0..n {
            if disc[start] != usize::MAX {
                continue;
            }
            let mut stack: Vec<(usize, usize, usize)> = vec![(start, usize::MAX, 0)];
            disc[start] = timer;
            low[start] = timer;
            timer += 1;
            while let Some(&mut (v, pe, ref mut cursor)) = stack.last_mut() {
                if *cursor < adj[v].len() {
                    let (w, id) = adj[v][*cursor];
                    *cursor += 1;
                    if id == pe {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, id, 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&mut (u, _, _)) = stack.last_mut() {
                        low[u] = low[u].min(low[v]);
                        if low[v] > disc[u] {
                            bridges.push(pe);
                        }
                    }
                }
            }
        }
        bridges.sort_unstable();
        bridges
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    pub fn is_bridgeless(&self) -> bool {
        self.bridges().is_empty()
    }
}

/// The cubic map obtained by gluing T(L) and the mirrored T(R) leaf to
/// leaf and root to root.
#[derive(Clone, Debug)]
pub struct TiedMap {
    pub n: usize,
    pub left: String,
    pub right: String,
    pub graph: CubicMap,
    pub labels: Vec<EdgeLabel>,
}

// JSON shape: vertex list (side + internal index), edge list with labels,
// rotation as cyclic half-edge orders.
impl Serialize for TiedMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let vertices: Vec<serde_json::Value> = (0..self.graph.vertex_count)
            .map(|v| {
                let (side, index) = if v < self.n - 1 {
                    ("L", v)
                } else {
                    ("R", v - (self.n - 1))
                };
                serde_json::json!({ "id": v, "side": side, "index": index })
            })
            .collect();
        let edges: Vec<serde_json::Value> = self
            .graph
            .edges
            .iter()
            .zip(&self.labels)
            .enumerate()
            .map(|(id, (&(a, b), label))| {
                serde_json::json!({ "id": id, "ends": [a, b], "label": label })
            })
            .collect();
        let mut st = s.serialize_struct("TiedMap", 6)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("left", &self.left)?;
        st.serialize_field("right", &self.right)?;
        st.serialize_field("vertices", &vertices)?;
        st.serialize_field("edges", &edges)?;
        st.serialize_field("rotation", &self.graph.rotation)?;
        st.end()
    }
}

/// Glue leaf edge i of `l` to leaf edge i of `r` and the root edges
/// together. Vertices are the internal vertices of both trees; the result
/// is cubic with 2(n-1) vertices and 3(n-1) edges.
pub fn tie(l: &Tree, r: &Tree) -> Result<TiedMap> {
    let n = l.leaf_count();
    if r.leaf_count() != n {
        return Err(Error::LeafMismatch {
            left: n,
            right: r.leaf_count(),
        });
    }
    if n < 2 {
        return Err(Error::LeafMismatch { left: n, right: n });
    }
    let offset = n - 1;
    let vertex_count = 2 * (n - 1);

    // Edge ids: root = 0, leaves = 1..=n, then L internals, then R internals.
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(3 * (n - 1));
    let mut labels: Vec<EdgeLabel> = Vec::with_capacity(3 * (n - 1));
    edges.push((0, offset));
    labels.push(EdgeLabel::Root);

    let l_edges = edge_list(l);
    let r_edges = edge_list(r);
    let leaf_parent = |infos: &[crate::tree::EdgeInfo], label: u32| -> usize {
        infos
            .iter()
            .find(|e| e.kind == EdgeKind::Leaf(label))
            .and_then(|e| e.parent_internal)
            .expect("leaf has an internal parent when n >= 2")
    };
    for i in 1..=n as u32 {
        edges.push((leaf_parent(&l_edges, i), offset + leaf_parent(&r_edges, i)));
        labels.push(EdgeLabel::Leaf(i));
    }
    for (side, infos, base) in [(TreeSide::L, &l_edges, 0), (TreeSide::R, &r_edges, offset)] {
        let mut sites: Vec<(usize, usize)> = infos
            .iter()
            .filter_map(|e| match e.kind {
                EdgeKind::Internal(site) => Some((site, e.parent_internal.unwrap())),
                _ => None,
            })
            .collect();
        sites.sort_unstable();
        for (site, parent) in sites {
            edges.push((base + parent, base + site));
            labels.push(EdgeLabel::Internal(side, site));
        }
    }

    // node preorder index -> tied edge id, per side
    let node_edge = |infos: &[crate::tree::EdgeInfo], side: TreeSide| -> Vec<usize> {
        let mut map = vec![0usize; infos.len()];
        for info in infos {
            map[info.node_index] = match info.kind {
                EdgeKind::Root => 0,
                EdgeKind::Leaf(i) => i as usize,
                EdgeKind::Internal(site) => edges
                    .iter()
                    .zip(&labels)
                    .position(|(_, lab)| *lab == EdgeLabel::Internal(side, site))
                    .expect("internal edge registered"),
            };
        }
        map
    };
    let l_node_edge = node_edge(&l_edges, TreeSide::L);
    let r_node_edge = node_edge(&r_edges, TreeSide::R);

    // Rotation: (parent, left, right) on the L side, (parent, right, left)
    // on the mirrored R side.
    let mut rotation = vec![[0usize; 3]; vertex_count];
    for (v, &(p, lc, rc)) in vertex_triples(l).iter().enumerate() {
        rotation[v] = [l_node_edge[p], l_node_edge[lc], l_node_edge[rc]];
    }
    for (v, &(p, lc, rc)) in vertex_triples(r).iter().enumerate() {
        rotation[offset + v] = [r_node_edge[p], r_node_edge[rc], r_node_edge[lc]];
    }

    let graph = CubicMap {
        vertex_count,
        edges,
        rotation,
    };
    debug_assert!(graph.validate().is_ok());
    Ok(TiedMap {
        n,
        left: l.to_string(),
        right: r.to_string(),
        graph,
        labels,
    })
}

/// A proper 3-edge-coloring of a cubic map, indexed by edge id.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TaitColoring(pub Vec<Color>);

impl fmt::Display for TaitColoring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{}", c.as_char())?;
        }
        Ok(())
    }
}

impl Serialize for TaitColoring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Backtracking enumeration of proper 3-edge-colorings; deterministic
/// (most-constrained edge first, ties by id, colors I < J < K). `limit`
/// bounds the number returned; None enumerates all.
pub fn tait_colorings(map: &CubicMap, limit: Option<usize>) -> Result<Vec<TaitColoring>> {
    map.validate()?;
    let m = map.edge_count();
    let mut colors: Vec<Option<Color>> = vec![None; m];
    let mut out = Vec::new();
    fn feasible(map: &CubicMap, colors: &[Option<Color>], edge: usize, c: Color) -> bool {
        let (a, b) = map.edges[edge];
        for v in [a, b] {
            for &other in &map.incidence(v) {
                if other != edge && colors[other] == Some(c) {
                    return false;
                }
            }
        }
        true
    }
    fn pick(map: &CubicMap, colors: &[Option<Color>]) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None; // (colored neighbor count, id)
        for e in 0..colors.len() {
            if colors[e].is_some() {
                continue;
            }
            let (a, b) = map.edges[e];
            let mut score = 0;
            for v in [a, b] {
                for &other in &map.incidence(v) {
                    if other != e && colors[other].is_some() {
                        score += 1;
                    }
                }
            }
            match best {
                Some((s, id)) if (score, std::cmp::Reverse(e)) <= (s, std::cmp::Reverse(id)) => {}
                _ => best = Some((score, e)),
            }
        }
        best.map(|(_, id)| id)
    }
    fn rec(
        map: &CubicMap,
        colors: &mut Vec<Option<Color>>,
        out: &mut Vec<TaitColoring>,
        limit: Option<usize>,
    ) {
        if limit.is_some_and(|l| out.len() >= l) {
            return;
        }
        let Some(edge) = pick(map, colors) else {
            out.push(TaitColoring(colors.iter().map(|c| c.unwrap()).collect()));
            return;
        };
        for c in Color::ALL {
            if feasible(map, colors, edge, c) {
                colors[edge] = Some(c);
                rec(map, colors, out, limit);
                colors[edge] = None;
            }
        }
    }
    rec(map, &mut colors, &mut out, limit);
    Ok(out)
}

/// A bridged cubic graph (two doubled-edge triangles joined by a bridge);
/// the classical parity obstruction makes it Tait-uncolorable.
pub fn bridged_cubic_control() -> CubicMap {
    let edges = vec![
        (0, 1),
        (0, 1),
        (0, 2),
        (1, 2),
        (3, 4),
        (3, 4),
        (3, 5),
        (4, 5),
        (2, 5), // the bridge
    ];
    let rotation = vec![
        [0, 1, 2],
        [0, 1, 3],
        [2, 3, 8],
        [4, 5, 6],
        [4, 5, 7],
        [6, 7, 8],
    ];
    CubicMap {
        vertex_count: 6,
        edges,
        rotation,
    }
}

/// Restrict a Tait coloring of a tied map to its leaf edges x_1..x_n.
pub fn leaf_restriction(map: &TiedMap, coloring: &TaitColoring) -> LeafVector {
    let mut out = vec![Color::I; map.n];
    for (id, label) in map.labels.iter().enumerate() {
        if let EdgeLabel::Leaf(i) = label {
            out[*i as usize - 1] = coloring.0[id];
        }
    }
    LeafVector(out)
}

/// One sharp solution together with a Tait coloring restricting to it.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionWitness {
    pub solution: LeafVector,
    pub coloring: TaitColoring,
}

/// Checks that Tait colorings of tie(l, r) and sharp solutions of L = R
/// are two views of the same set.
#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceReport {
    pub n: usize,
    pub left: String,
    pub right: String,
    pub tait_coloring_count: usize,
    pub sharp_solution_count: usize,
    /// Every coloring restricts to a sharp solution.
    pub restrictions_sharp: bool,
    /// Every sharp solution is some coloring's restriction.
    pub surjective: bool,
    /// |Tait colorings| equals the matching-count sum over solutions and
    /// root colors.
    pub count_formula_holds: bool,
    pub witnesses: Vec<SolutionWitness>,
}

impl CorrespondenceReport {
    pub fn holds(&self) -> bool {
        self.restrictions_sharp && self.surjective && self.count_formula_holds
    }
}

/// Exhaustively verify the coloring <-> sharp-solution correspondence for
/// one tree pair.
pub fn coloring_correspondence(l: &Tree, r: &Tree) -> Result<CorrespondenceReport> {
    let map = tie(l, r)?;
    let colorings = tait_colorings(&map.graph, None)?;
    let solutions = sharp_solutions(l, r);

    let restrictions: Vec<LeafVector> = colorings
        .iter()
        .map(|c| leaf_restriction(&map, c))
        .collect();
    let restrictions_sharp = restrictions.iter().all(|x| solutions.contains(x));
    let mut witnesses = Vec::new();
    let mut surjective = true;
    for sol in &solutions {
        match restrictions.iter().position(|x| x == sol) {
            Some(i) => witnesses.push(SolutionWitness {
                solution: sol.clone(),
                coloring: colorings[i].clone(),
            }),
            None => surjective = false,
        }
    }

    // |TaitColorings| = sum over sharp x, root colors rho of
    // |matching(l, x, rho)| * |matching(r, x, rho)|
    let mut expected = 0usize;
    for x in all_leaf_vectors(map.n) {
        for root in Color::ALL {
            expected += colorings_matching(l, &x, Some(root)).len()
                * colorings_matching(r, &x, Some(root)).len();
        }
    }
    let count_formula_holds = expected == colorings.len();

    Ok(CorrespondenceReport {
        n: map.n,
        left: map.left.clone(),
        right: map.right.clone(),
        tait_coloring_count: colorings.len(),
        sharp_solution_count: solutions.len(),
        restrictions_sharp,
        surjective,
        count_formula_holds,
        witnesses,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SignViolation {
    pub left: String,
    pub right: String,
    pub assignment: LeafVector,
    pub left_value: SignedVec,
    pub right_value: SignedVec,
}

/// Sweep result for "both sides nonzero implies equal with + sign".
#[derive(Clone, Debug, Serialize)]
pub struct SignTheoremReport {
    pub n: usize,
    pub tree_count: usize,
    pub ordered_pairs: u64,
    pub assignments_per_pair: u64,
    pub checks_both_nonzero: u64,
    pub violations: Vec<SignViolation>,
}

impl SignTheoremReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For all ordered tree pairs with n leaves and all 3^n assignments:
/// whenever both cross evaluations are nonzero they are equal, sign
/// included.
pub fn verify_sign_theorem(n: usize) -> Result<SignTheoremReport> {
    if !(2..=SIGN_THEOREM_CAP).contains(&n) {
        return Err(Error::Cap {
            what: "sign theorem leaf count",
            n,
            cap: SIGN_THEOREM_CAP,
        });
    }
    let trees: Vec<Tree> = crate::tree::tree_iter(n)?.collect();
    let assignments: Vec<LeafVector> = all_leaf_vectors(n).collect();
    let tables: Vec<Vec<SignedVec>> = trees
        .par_iter()
        .map(|t| assignments.iter().map(|x| evaluate_cross(t, x)).collect())
        .collect();

    let results: Vec<(u64, Vec<SignViolation>)> = (0..trees.len())
        .into_par_iter()
        .map(|a| {
            let mut checks = 0u64;
            let mut violations = Vec::new();
            for b in 0..trees.len() {
                for (k, (&va, &vb)) in tables[a].iter().zip(&tables[b]).enumerate() {
                    if !va.is_zero() && !vb.is_zero() {
                        checks += 1;
                        if va != vb {
                            violations.push(SignViolation {
                                left: trees[a].to_string(),
                                right: trees[b].to_string(),
                                assignment: assignments[k].clone(),
                                left_value: va,
                                right_value: vb,
                            });
                        }
                    }
                }
            }
            (checks, violations)
        })
        .collect();

    let mut checks_both_nonzero = 0u64;
    let mut violations = Vec::new();
    for (c, mut v) in results {
        checks_both_nonzero += c;
        violations.append(&mut v);
    }
    Ok(SignTheoremReport {
        n,
        tree_count: trees.len(),
        ordered_pairs: (trees.len() as u64) * (trees.len() as u64),
        assignments_per_pair: assignments.len() as u64,
        checks_both_nonzero,
        violations,
    })
}
