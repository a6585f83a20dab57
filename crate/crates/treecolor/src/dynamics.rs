//! Admissible transplantation dynamics on (tree, sign vector) states with
//! the root color fixed to K: path searches, the constructive comb paths
//! with lazy sign assignment, connectivity and frozen-coloring sweeps, and
//! factorization over shared diagonals.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::algebra::{
    frozen_coloring, leaf_vector, parse_signs, sign_bits, signs_from_bits, Color, Coloring,
    LeafVector, Sign,
};
use crate::gamma::build_gamma;
use crate::tree::{tree_iter, MoveSite, Tree};
use crate::triangulation::{diagonal_site, site_diagonal, vertex_triangles, Chord, Triangulation};
use crate::{Error, Result};

/// Full state-graph work (components, searches) is capped here.
pub const STATE_CAP: usize = 10;

/// Geodesic-admissibility sweeps are quadratic in trees; capped lower.
pub const GEODESIC_CAP: usize = 7;

/// Frozen-vector collision search streams whole tree generations.
pub const FROZEN_STREAM_CAP: usize = 16;

/// A tree with one sign per internal vertex; the root edge color is fixed
/// to K for all dynamics (color relabeling symmetry makes this harmless).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct State {
    pub tree: Tree,
    pub signs: Vec<Sign>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    tree: String,
    signs: String,
    root: String,
}

impl From<State> for StateRepr {
    fn from(s: State) -> StateRepr {
        StateRepr {
            tree: s.tree.to_string(),
            signs: s.signs.iter().map(|x| x.as_char()).collect(),
            root: "K".to_string(),
        }
    }
}

impl TryFrom<StateRepr> for State {
    type Error = Error;
    fn try_from(r: StateRepr) -> Result<State> {
        if r.root != "K" {
            return Err(Error::BadColor(r.root.chars().next().unwrap_or('?')));
        }
        State::new(Tree::parse(&r.tree)?, parse_signs(&r.signs)?)
    }
}

impl State {
    pub fn new(tree: Tree, signs: Vec<Sign>) -> Result<State> {
        if signs.len() != tree.internal_count() {
            return Err(Error::SignLength {
                expected: tree.internal_count(),
                got: signs.len(),
            });
        }
        if !tree.is_standard() {
            return Err(Error::NonStandard("State::new"));
        }
        Ok(State { tree, signs })
    }

    pub fn coloring(&self) -> Coloring {
        Coloring::new(Color::K, self.signs.clone())
    }

    pub fn leaf_vector(&self) -> LeafVector {
        leaf_vector(&self.tree, &self.coloring())
    }

    pub fn signs_string(&self) -> String {
        self.signs.iter().map(|s| s.as_char()).collect()
    }
}

impl std::fmt::Display for State {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.tree, self.signs_string())
    }
}

/// A transplantation is admissible when its two participating vertices
/// carry equal signs.
pub fn is_admissible(st: &State, site: MoveSite) -> Result<bool> {
    let d = st.tree.move_details(site)?;
    Ok(st.signs[d.parent_index] == st.signs[d.child_index])
}

/// Apply an admissible transplantation: rotate the tree, carry signs over
/// by subtree identity, and flip the two participating signs. Leaf colors
/// and the root color are preserved.
pub fn apply_admissible(st: &State, site: MoveSite) -> Result<State> {
    let d = st.tree.move_details(site)?;
    if st.signs[d.parent_index] != st.signs[d.child_index] {
        return Err(Error::Inadmissible { site: site.0 });
    }
    let perm = d.sign_permutation(st.signs.len());
    let mut signs = vec![Sign::Plus; st.signs.len()];
    for (old, &new) in perm.iter().enumerate() {
        signs[new] = st.signs[old];
    }
    let (pu, pv) = d.participants_after();
    signs[pu] = signs[pu].flip();
    signs[pv] = signs[pv].flip();
    State::new(d.result, signs)
}

/// Sites admissible in this state, ascending.
pub fn admissible_sites(st: &State) -> Vec<MoveSite> {
    st.tree
        .sites()
        .into_iter()
        .filter(|&s| is_admissible(st, s).unwrap_or(false))
        .collect()
}

/// A start state plus a sequence of admissible moves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdmissiblePath {
    pub start: State,
    pub moves: Vec<MoveSite>,
}

impl AdmissiblePath {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Every state along the path, start included.
    pub fn states(&self) -> Vec<State> {
        let mut out = vec![self.start.clone()];
        for &m in &self.moves {
            let next = apply_admissible(out.last().unwrap(), m).expect("path is admissible");
            out.push(next);
        }
        out
    }

    pub fn end(&self) -> State {
        self.states().pop().unwrap()
    }

    /// Replay the path, checking admissibility of every step and invariance
    /// of the leaf vector (the root color is fixed by construction).
    pub fn validate(&self) -> Result<()> {
        let reference = self.start.leaf_vector();
        let mut cur = self.start.clone();
        for &m in &self.moves {
            if !is_admissible(&cur, m)? {
                return Err(Error::Inadmissible { site: m.0 });
            }
            cur = apply_admissible(&cur, m)?;
            if cur.leaf_vector() != reference {
                return Err(Error::PathInvariantBroken);
            }
        }
        Ok(())
    }
}

impl Serialize for AdmissiblePath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            start: &'a State,
            moves: &'a [MoveSite],
            states: Vec<State>,
        }
        Repr {
            start: &self.start,
            moves: &self.moves,
            states: self.states(),
        }
        .serialize(s)
    }
}

// ---------------------------------------------------------------------------
// Packed state space
// ---------------------------------------------------------------------------

struct MoveRec {
    site: MoveSite,
    u: u8,
    v: u8,
    neighbor: u32,
    perm: Box<[u8]>,
    pu: u8,
    pv: u8,
}

/// All (tree, sign vector) states for one leaf count, with per-tree move
/// tables for fast admissibility checks and transitions. State ids pack
/// the tree rank and the sign bits (Minus = 1, + = 0, vertex 0 at bit 0).
pub struct StateSpace {
    pub n: usize,
    sign_len: usize,
    trees: Vec<Tree>,
    moves: Vec<Vec<MoveRec>>,
}

impl StateSpace {
    pub fn build(n: usize) -> Result<StateSpace> {
        if !(2..=STATE_CAP).contains(&n) {
            return Err(Error::Cap {
                what: "state space leaf count",
                n,
                cap: STATE_CAP,
            });
        }
        let trees: Vec<Tree> = tree_iter(n)?.collect();
        let rank: HashMap<u64, u32> = trees
            .iter()
            .enumerate()
            .map(|(i, t)| (t.shape_code(), i as u32))
            .collect();
        let moves = trees
            .iter()
            .map(|t| {
                t.sites()
                    .into_iter()
                    .map(|site| {
                        let d = t.move_details(site).expect("site valid");
                        let perm: Box<[u8]> = d
                            .sign_permutation(n - 1)
                            .into_iter()
                            .map(|x| x as u8)
                            .collect();
                        let (pu, pv) = d.participants_after();
                        MoveRec {
                            site,
                            u: d.parent_index as u8,
                            v: d.child_index as u8,
                            neighbor: rank[&d.result.shape_code()],
                            perm,
                            pu: pu as u8,
                            pv: pv as u8,
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(StateSpace {
            n,
            sign_len: n - 1,
            trees,
            moves,
        })
    }

    pub fn tree_count(&self) -> usize {
        self.trees.len()
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn sign_vectors(&self) -> u32 {
        1 << self.sign_len
    }

    pub fn state_count(&self) -> u64 {
        (self.trees.len() as u64) << self.sign_len
    }

    pub fn pack(&self, rank: u32, bits: u32) -> u64 {
        ((rank as u64) << self.sign_len) | bits as u64
    }

    pub fn unpack(&self, id: u64) -> (u32, u32) {
        (
            (id >> self.sign_len) as u32,
            (id & ((1u64 << self.sign_len) - 1)) as u32,
        )
    }

    pub fn state(&self, rank: u32, bits: u32) -> State {
        State {
            tree: self.trees[rank as usize].clone(),
            signs: signs_from_bits(self.sign_len, bits),
        }
    }

    pub fn locate(&self, st: &State) -> Result<(u32, u32)> {
        if st.tree.leaf_count() != self.n {
            return Err(Error::LeafMismatch {
                left: self.n,
                right: st.tree.leaf_count(),
            });
        }
        Ok((st.tree.rank() as u32, sign_bits(&st.signs)))
    }

    fn site_moves(&self, rank: u32) -> &[MoveRec] {
        &self.moves[rank as usize]
    }

    /// Admissible transitions out of a state, sites ascending.
    pub fn neighbors(&self, rank: u32, bits: u32) -> Vec<(MoveSite, u32, u32)> {
        let mut out = Vec::new();
        for rec in self.site_moves(rank) {
            if (bits >> rec.u) & 1 == (bits >> rec.v) & 1 {
                let mut nb = 0u32;
                for (old, &new) in rec.perm.iter().enumerate() {
                    nb |= ((bits >> old) & 1) << new;
                }
                nb ^= (1 << rec.pu) | (1 << rec.pv);
                out.push((rec.site, rec.neighbor, nb));
            }
        }
        out
    }
}

/// Connected components of the undirected admissible-state graph.
pub struct StateComponents {
    pub component_of: Vec<u32>,
    pub component_count: usize,
}

pub fn state_components(space: &StateSpace) -> StateComponents {
    let total = space.state_count() as usize;
    let mut parent: Vec<u32> = (0..total as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    for rank in 0..space.tree_count() as u32 {
        for bits in 0..space.sign_vectors() {
            let id = space.pack(rank, bits) as u32;
            for (_, nr, nb) in space.neighbors(rank, bits) {
                let nid = space.pack(nr, nb) as u32;
                let a = find(&mut parent, id);
                let b = find(&mut parent, nid);
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
    }
    let mut component_of = vec![0u32; total];
    let mut label: HashMap<u32, u32> = HashMap::new();
    for id in 0..total as u32 {
        let root = find(&mut parent, id);
        let next = label.len() as u32;
        let lab = *label.entry(root).or_insert(next);
        component_of[id as usize] = lab;
    }
    StateComponents {
        component_count: label.len(),
        component_of,
    }
}

/// Shortest admissible path from a state to any state of the target tree,
/// by BFS with ascending-site tie-breaking.
pub fn admissible_path(start: &State, target: &Tree) -> Result<Option<AdmissiblePath>> {
    let space = StateSpace::build(start.tree.leaf_count())?;
    admissible_path_in(&space, start, target)
}

pub fn admissible_path_in(
    space: &StateSpace,
    start: &State,
    target: &Tree,
) -> Result<Option<AdmissiblePath>> {
    if target.leaf_count() != space.n {
        return Err(Error::LeafMismatch {
            left: space.n,
            right: target.leaf_count(),
        });
    }
    if !target.is_standard() {
        return Err(Error::NonStandard("admissible_path target"));
    }
    let (start_rank, start_bits) = space.locate(start)?;
    let target_rank = target.rank() as u32;
    let moves = bfs_to_rank(space, start_rank, start_bits, target_rank);
    Ok(moves.map(|moves| AdmissiblePath {
        start: start.clone(),
        moves,
    }))
}

fn bfs_to_rank(
    space: &StateSpace,
    start_rank: u32,
    start_bits: u32,
    target_rank: u32,
) -> Option<Vec<MoveSite>> {
    if start_rank == target_rank {
        return Some(Vec::new());
    }
    let start_id = space.pack(start_rank, start_bits);
    let mut prev: HashMap<u64, (u64, MoveSite)> = HashMap::new();
    let mut queue = VecDeque::from([start_id]);
    prev.insert(start_id, (start_id, MoveSite(0)));
    while let Some(id) = queue.pop_front() {
        let (rank, bits) = space.unpack(id);
        for (site, nr, nb) in space.neighbors(rank, bits) {
            let nid = space.pack(nr, nb);
            if prev.contains_key(&nid) {
                continue;
            }
            prev.insert(nid, (id, site));
            if nr == target_rank {
                // reconstruct
                let mut moves = vec![site];
                let mut cur = id;
                while cur != start_id {
                    let (p, s) = prev[&cur];
                    moves.push(s);
                    cur = p;
                }
                moves.reverse();
                return Some(moves);
            }
            queue.push_back(nid);
        }
    }
    None
}

/// Search over sign vectors in canonical order (+ = 0 bits ascending) for
/// one that admits a path from `l` to `r`; the first hit is the witness.
pub fn admissible_path_search(l: &Tree, r: &Tree) -> Result<Option<AdmissiblePath>> {
    let space = StateSpace::build(l.leaf_count())?;
    admissible_path_search_in(&space, l, r)
}

pub fn admissible_path_search_in(
    space: &StateSpace,
    l: &Tree,
    r: &Tree,
) -> Result<Option<AdmissiblePath>> {
    if r.leaf_count() != l.leaf_count() {
        return Err(Error::LeafMismatch {
            left: l.leaf_count(),
            right: r.leaf_count(),
        });
    }
    if !l.is_standard() || !r.is_standard() {
        return Err(Error::NonStandard("admissible_path_search"));
    }
    let l_rank = l.rank() as u32;
    let r_rank = r.rank() as u32;
    for bits in 0..space.sign_vectors() {
        if let Some(moves) = bfs_to_rank(space, l_rank, bits, r_rank) {
            return Ok(Some(AdmissiblePath {
                start: space.state(l_rank, bits),
                moves,
            }));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Constructive comb paths with lazy sign assignment
// ---------------------------------------------------------------------------

/// Internal-vertex identities survive rotations, so signs assigned mid-path
/// can be read back to the start state: a vertex's sign flips only when it
/// participates in a move.
enum IdTree {
    Leaf,
    Node(usize, Box<IdTree>, Box<IdTree>),
}

impl IdTree {
    fn from_tree(t: &Tree) -> IdTree {
        fn build(t: &Tree, ctr: &mut usize) -> IdTree {
            match t {
                Tree::Leaf(_) => IdTree::Leaf,
                Tree::Node(l, r) => {
                    let id = *ctr;
                    *ctr += 1;
                    let lt = build(l, ctr);
                    let rt = build(r, ctr);
                    IdTree::Node(id, Box::new(lt), Box::new(rt))
                }
            }
        }
        build(t, &mut 0)
    }

    fn internals(&self) -> usize {
        match self {
            IdTree::Leaf => 0,
            IdTree::Node(_, l, r) => 1 + l.internals() + r.internals(),
        }
    }
}

struct LazyColoring {
    current: Vec<Option<Sign>>,
    start: Vec<Option<Sign>>,
}

impl LazyColoring {
    fn new(n_internal: usize) -> Self {
        LazyColoring {
            current: vec![None; n_internal],
            start: vec![None; n_internal],
        }
    }

    /// Color the participants of a move (u, v): an uncolored vertex copies
    /// its colored partner's sign, or + when both are uncolored; then both
    /// flip. A vertex first colored here has never flipped, so its start
    /// sign equals the assigned sign.
    fn step(&mut self, u: usize, v: usize) -> Result<()> {
        match (self.current[u], self.current[v]) {
            (None, None) => {
                self.current[u] = Some(Sign::Plus);
                self.current[v] = Some(Sign::Plus);
                self.start[u] = Some(Sign::Plus);
                self.start[v] = Some(Sign::Plus);
            }
            (Some(s), None) => {
                self.current[v] = Some(s);
                self.start[v] = Some(s);
            }
            (None, Some(s)) => {
                self.current[u] = Some(s);
                self.start[u] = Some(s);
            }
            (Some(a), Some(b)) => {
                if a != b {
                    return Err(Error::LazyColoringClash);
                }
            }
        }
        self.current[u] = Some(self.current[u].unwrap().flip());
        self.current[v] = Some(self.current[v].unwrap().flip());
        Ok(())
    }

    fn start_signs(&self) -> Vec<Sign> {
        self.start.iter().map(|s| s.unwrap_or(Sign::Plus)).collect()
    }
}

/// The constructive path to the left comb: repeatedly transplant the
/// leftmost movable sub-trees to the left (rotate at the root's right edge
/// until the right child is a leaf, then recurse into the left subtree),
/// assigning signs lazily.
pub fn comb_path(t: &Tree) -> Result<AdmissiblePath> {
    comb_path_directed(t, true)
}

/// Mirror variant: the constructive path to the right comb.
pub fn mirror_comb_path(t: &Tree) -> Result<AdmissiblePath> {
    comb_path_directed(t, false)
}

fn comb_path_directed(t: &Tree, to_left: bool) -> Result<AdmissiblePath> {
    if !t.is_standard() {
        return Err(Error::NonStandard("comb_path"));
    }
    let n_internal = t.internal_count();
    let mut coloring = LazyColoring::new(n_internal);
    let mut moves = Vec::new();

    // Processes the subtree whose root sits at internal preorder index
    // `base` in the current full tree; subtree indices stay contiguous.
    fn process(
        t: IdTree,
        base: usize,
        to_left: bool,
        coloring: &mut LazyColoring,
        moves: &mut Vec<MoveSite>,
    ) -> Result<IdTree> {
        let mut cur = t;
        loop {
            match cur {
                IdTree::Leaf => return Ok(cur),
                IdTree::Node(uid, l, r) => {
                    if to_left {
                        match *r {
                            IdTree::Node(vid, b, c) => {
                                // (A (B C)) -> ((A B) C)
                                moves.push(MoveSite(base + l.internals() + 1));
                                coloring.step(uid, vid)?;
                                cur = IdTree::Node(uid, Box::new(IdTree::Node(vid, l, b)), c);
                            }
                            leaf @ IdTree::Leaf => {
                                let done = process(*l, base + 1, to_left, coloring, moves)?;
                                return Ok(IdTree::Node(uid, Box::new(done), Box::new(leaf)));
                            }
                        }
                    } else {
                        match *l {
                            IdTree::Node(vid, a, b) => {
                                // ((A B) C) -> (A (B C))
                                moves.push(MoveSite(base + 1));
                                coloring.step(uid, vid)?;
                                cur = IdTree::Node(uid, a, Box::new(IdTree::Node(vid, b, r)));
                            }
                            leaf @ IdTree::Leaf => {
                                let done = process(*r, base + 1, to_left, coloring, moves)?;
                                return Ok(IdTree::Node(uid, Box::new(leaf), Box::new(done)));
                            }
                        }
                    }
                }
            }
        }
    }

    process(IdTree::from_tree(t), 0, to_left, &mut coloring, &mut moves)?;
    let path = AdmissiblePath {
        start: State::new(t.clone(), coloring.start_signs())?,
        moves,
    };
    debug_assert!(path.validate().is_ok());
    Ok(path)
}

/// The constructive path to the block tree (fan from polygon vertex k):
/// rotate the polygon so the fan apex lands on the root side, run the comb
/// algorithm there, and pull every flip and sign back.
pub fn block_comb_path(t: &Tree, k: usize) -> Result<AdmissiblePath> {
    let n = t.leaf_count();
    if k > n || n < 2 {
        return Err(Error::InvalidBlock { n, k });
    }
    if k == 0 {
        return comb_path(t);
    }
    if k == n {
        return mirror_comb_path(t);
    }
    let m = n + 1;
    let fwd = |v: usize| (v + m - k) % m;
    let back = |v: usize| (v + k) % m;

    let tri = Triangulation::from_tree(t);
    let rotated = tri.rotated(k);
    let t_rot = rotated.to_tree()?;
    let rot_path = comb_path(&t_rot)?;

    // Pull start signs back through the triangle correspondence.
    let sort3 = |mut a: [usize; 3]| {
        a.sort_unstable();
        (a[0], a[1], a[2])
    };
    let rot_index: HashMap<(usize, usize, usize), usize> = vertex_triangles(&t_rot)
        .into_iter()
        .enumerate()
        .map(|(i, (a, b, c))| ((a, b, c), i))
        .collect();
    let signs: Vec<Sign> = vertex_triangles(t)
        .into_iter()
        .map(|(a, b, c)| {
            let key = sort3([fwd(a), fwd(b), fwd(c)]);
            rot_path.start.signs[rot_index[&key]]
        })
        .collect();

    // Pull each flipped diagonal back.
    let mut moves = Vec::with_capacity(rot_path.moves.len());
    let mut cur_rot = t_rot;
    let mut cur = t.clone();
    for &site_rot in &rot_path.moves {
        let d_rot = site_diagonal(&cur_rot, site_rot)?;
        let (x, y) = (back(d_rot.0), back(d_rot.1));
        let d = (x.min(y), x.max(y));
        let site = diagonal_site(&cur, d).ok_or_else(|| {
            Error::InvalidDiagonals(format!("pulled-back diagonal ({},{}) missing", d.0, d.1))
        })?;
        moves.push(site);
        cur_rot = cur_rot.apply_move(site_rot)?;
        cur = cur.apply_move(site)?;
    }
    let path = AdmissiblePath {
        start: State::new(t.clone(), signs)?,
        moves,
    };
    debug_assert!(path.validate().is_ok());
    Ok(path)
}

// ---------------------------------------------------------------------------
// Conjecture and geodesic sweeps
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct UnsatisfiedPair {
    pub left: String,
    pub right: String,
}

/// Per-n conjecture sweep: every ordered tree pair should share a state
/// component. Any unsatisfied pair is a reportable research finding.
#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub n: usize,
    pub tree_count: usize,
    pub state_count: u64,
    pub component_count: usize,
    pub ordered_pairs: u64,
    pub satisfied_pairs: u64,
    pub unsatisfied: Vec<UnsatisfiedPair>,
}

impl ConjectureReport {
    pub fn all_satisfied(&self) -> bool {
        self.unsatisfied.is_empty()
    }
}

pub fn verify_conjecture(n: usize) -> Result<ConjectureReport> {
    let space = StateSpace::build(n)?;
    let comps = state_components(&space);
    Ok(conjecture_report(&space, &comps))
}

pub fn conjecture_report(space: &StateSpace, comps: &StateComponents) -> ConjectureReport {
    let t = space.tree_count();
    let words = t.div_ceil(64);
    // per component: bitset of tree ranks present
    let mut present = vec![0u64; comps.component_count * words];
    for rank in 0..t as u32 {
        for bits in 0..space.sign_vectors() {
            let id = space.pack(rank, bits) as usize;
            let comp = comps.component_of[id] as usize;
            present[comp * words + (rank as usize) / 64] |= 1u64 << (rank % 64);
        }
    }
    let mut satisfied = 0u64;
    let mut unsatisfied = Vec::new();
    for a in 0..t {
        for b in 0..t {
            let hit = (0..comps.component_count).any(|c| {
                let row = &present[c * words..(c + 1) * words];
                (row[a / 64] >> (a % 64)) & 1 == 1 && (row[b / 64] >> (b % 64)) & 1 == 1
            });
            if hit {
                satisfied += 1;
            } else {
                unsatisfied.push(UnsatisfiedPair {
                    left: space.trees()[a].to_string(),
                    right: space.trees()[b].to_string(),
                });
            }
        }
    }
    ConjectureReport {
        n: space.n,
        tree_count: t,
        state_count: space.state_count(),
        component_count: comps.component_count,
        ordered_pairs: (t as u64) * (t as u64),
        satisfied_pairs: satisfied,
        unsatisfied,
    }
}

/// On-demand witness for one ordered pair: the canonical (smallest sign
/// bits) start state of `l` sharing a component with `r`, and a shortest
/// path from it.
pub fn pair_witness(
    space: &StateSpace,
    comps: &StateComponents,
    l: &Tree,
    r: &Tree,
) -> Result<Option<AdmissiblePath>> {
    let l_rank = l.rank() as u32;
    let r_rank = r.rank() as u32;
    for bits in 0..space.sign_vectors() {
        let comp = comps.component_of[space.pack(l_rank, bits) as usize];
        let shared = (0..space.sign_vectors())
            .any(|b2| comps.component_of[space.pack(r_rank, b2) as usize] == comp);
        if shared {
            let moves =
                bfs_to_rank(space, l_rank, bits, r_rank).expect("component is shared, path exists");
            return Ok(Some(AdmissiblePath {
                start: space.state(l_rank, bits),
                moves,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicException {
    pub left: String,
    pub right: String,
    pub rotation_distance: usize,
    /// Length of the shortest admissible path over all sign vectors;
    /// None when no admissible path exists at all.
    pub min_admissible: Option<usize>,
}

/// Whether, for every ordered pair, some sign vector makes some shortest
/// rotation path admissible. Holds for n <= 5; the exceptions list is the
/// content at n >= 6.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicReport {
    pub n: usize,
    pub ordered_pairs: u64,
    pub geodesic_pairs: u64,
    pub all_geodesic: bool,
    pub exceptions: Vec<GeodesicException>,
}

pub fn geodesic_admissibility_report(n: usize) -> Result<GeodesicReport> {
    if !(2..=GEODESIC_CAP).contains(&n) {
        return Err(Error::Cap {
            what: "geodesic report leaf count",
            n,
            cap: GEODESIC_CAP,
        });
    }
    let space = StateSpace::build(n)?;
    let gamma = build_gamma(n)?;
    debug_assert_eq!(gamma.trees, space.trees());
    let t = space.tree_count();
    let mut geodesic_pairs = 0u64;
    let mut exceptions = Vec::new();
    for a in 0..t as u32 {
        let dist = gamma.bfs_distances(a);
        // multi-source BFS over all states of tree a
        let mut sdist = vec![u32::MAX; space.state_count() as usize];
        let mut queue = VecDeque::new();
        for bits in 0..space.sign_vectors() {
            let id = space.pack(a, bits) as usize;
            sdist[id] = 0;
            queue.push_back(id as u64);
        }
        let mut best = vec![u32::MAX; t];
        best[a as usize] = 0;
        while let Some(id) = queue.pop_front() {
            let (rank, bits) = space.unpack(id);
            let d = sdist[id as usize];
            for (_, nr, nb) in space.neighbors(rank, bits) {
                let nid = space.pack(nr, nb);
                if sdist[nid as usize] == u32::MAX {
                    sdist[nid as usize] = d + 1;
                    best[nr as usize] = best[nr as usize].min(d + 1);
                    queue.push_back(nid);
                }
            }
        }
        for b in 0..t {
            let rd = dist[b];
            if best[b] == rd {
                geodesic_pairs += 1;
            } else {
                exceptions.push(GeodesicException {
                    left: space.trees()[a as usize].to_string(),
                    right: space.trees()[b].to_string(),
                    rotation_distance: rd as usize,
                    min_admissible: (best[b] != u32::MAX).then_some(best[b] as usize),
                });
            }
        }
    }
    Ok(GeodesicReport {
        n,
        ordered_pairs: (t as u64) * (t as u64),
        geodesic_pairs,
        all_geodesic: exceptions.is_empty(),
        exceptions,
    })
}

// ---------------------------------------------------------------------------
// Frozen colorings
// ---------------------------------------------------------------------------

/// The frozen state of a tree: alternating signs, root color K.
pub fn frozen_state(t: &Tree) -> Result<State> {
    State::new(t.clone(), frozen_coloring(t).signs)
}

#[derive(Clone, Debug, Serialize)]
pub struct FrozenReport {
    pub max_n: usize,
    pub trees_checked: u64,
    /// Trees whose frozen coloring admits a move (expected none).
    pub offenders: Vec<String>,
}

impl FrozenReport {
    pub fn all_isolated(&self) -> bool {
        self.offenders.is_empty()
    }
}

/// Check that frozen colorings admit no transplantation, for every tree
/// with 2..=max_n leaves.
pub fn verify_frozen(max_n: usize) -> Result<FrozenReport> {
    if !(2..=STATE_CAP).contains(&max_n) {
        return Err(Error::Cap {
            what: "frozen sweep leaf count",
            n: max_n,
            cap: STATE_CAP,
        });
    }
    let mut trees_checked = 0u64;
    let mut offenders = Vec::new();
    for n in 2..=max_n {
        for tree in tree_iter(n)? {
            trees_checked += 1;
            let st = frozen_state(&tree)?;
            if !admissible_sites(&st).is_empty() {
                offenders.push(tree.to_string());
            }
        }
    }
    Ok(FrozenReport {
        max_n,
        trees_checked,
        offenders,
    })
}

/// Two distinct trees sharing a frozen leaf vector: a sharp solution of
/// L = R on which neither side admits any transplantation.
#[derive(Clone, Debug, Serialize)]
pub struct FrozenWitness {
    pub n: usize,
    pub left: String,
    pub right: String,
    pub leaf_vector: LeafVector,
    pub left_admissible_moves: usize,
    pub right_admissible_moves: usize,
}

/// Smallest n <= max_n with two distinct trees whose frozen leaf vectors
/// coincide, searching tree generations in canonical order.
pub fn frozen_witness_search(max_n: usize) -> Result<Option<FrozenWitness>> {
    for n in 2..=max_n {
        if n > FROZEN_STREAM_CAP {
            return Err(Error::Cap {
                what: "frozen witness stream leaf count",
                n,
                cap: FROZEN_STREAM_CAP,
            });
        }
        let mut seen: HashMap<u64, u64> = HashMap::new();
        for (rank, tree) in tree_iter(n)?.enumerate() {
            let vector = leaf_vector(&tree, &frozen_coloring(&tree));
            let key = vector.pack();
            if let Some(&first_rank) = seen.get(&key) {
                let first = Tree::unrank(n, first_rank)?;
                let left_moves = admissible_sites(&frozen_state(&first)?).len();
                let right_moves = admissible_sites(&frozen_state(&tree)?).len();
                return Ok(Some(FrozenWitness {
                    n,
                    left: first.to_string(),
                    right: tree.to_string(),
                    leaf_vector: vector,
                    left_admissible_moves: left_moves,
                    right_admissible_moves: right_moves,
                }));
            }
            seen.insert(key, rank as u64);
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Factorization over shared diagonals
// ---------------------------------------------------------------------------

/// A solved region problem: witness sign bits plus the move list.
type RegionSolution = Option<(u32, Vec<MoveSite>)>;

/// Reusable scratch for factorized searches: state spaces per region size
/// and solved region pair problems.
#[derive(Default)]
pub struct RegionCache {
    spaces: HashMap<usize, StateSpace>,
    solutions: HashMap<(usize, u64, u64), RegionSolution>,
}

impl RegionCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn space(&mut self, m: usize) -> Result<&StateSpace> {
        if let std::collections::hash_map::Entry::Vacant(e) = self.spaces.entry(m) {
            e.insert(StateSpace::build(m)?);
        }
        Ok(&self.spaces[&m])
    }

    fn solve(&mut self, l: &Tree, r: &Tree) -> Result<RegionSolution> {
        let m = l.leaf_count();
        let key = (m, l.rank(), r.rank());
        if let Some(hit) = self.solutions.get(&key) {
            return Ok(hit.clone());
        }
        let space = self.space(m)?;
        let sol =
            admissible_path_search_in(space, l, r)?.map(|p| (sign_bits(&p.start.signs), p.moves));
        self.solutions.insert(key, sol.clone());
        Ok(sol)
    }
}

/// One factorization region: the part of the polygon delimited by a root
/// chord and the maximal shared chords directly inside it.
struct Region {
    /// Global polygon vertices on the region boundary, ascending; the
    /// region root side is (verts[0], verts[m]).
    verts: Vec<usize>,
}

impl Region {
    fn leaf_count(&self) -> usize {
        self.verts.len() - 1
    }
}

fn decompose_regions(n: usize, shared: &[Chord]) -> Vec<Region> {
    // laminar parenting: the parent of a chord is its minimal enclosing
    // shared chord, or the implicit root side (0, n)
    let encloses =
        |outer: Chord, inner: Chord| outer != inner && outer.0 <= inner.0 && inner.1 <= outer.1;
    let parent_of = |c: Chord| -> Option<Chord> {
        shared
            .iter()
            .copied()
            .filter(|&p| encloses(p, c))
            .min_by_key(|&(a, b)| b - a)
    };
    let mut roots: Vec<Chord> = vec![(0, n)];
    roots.extend_from_slice(shared);
    roots
        .iter()
        .map(|&(a, b)| {
            let mut children: Vec<Chord> = shared
                .iter()
                .copied()
                .filter(|&c| {
                    c != (a, b)
                        && c.0 >= a
                        && c.1 <= b
                        && match parent_of(c) {
                            Some(p) => p == (a, b),
                            None => (a, b) == (0, n),
                        }
                })
                .collect();
            children.sort_unstable();
            let mut verts = vec![a];
            let mut cur = a;
            while cur < b {
                cur = match children.iter().find(|&&(s, _)| s == cur) {
                    Some(&(_, e)) => e,
                    None => cur + 1,
                };
                verts.push(cur);
            }
            Region { verts }
        })
        .collect()
}

/// Extract one tree's triangulation restricted to a region, relabeled to
/// the region polygon.
fn region_tree(tri: &Triangulation, region: &Region) -> Result<Tree> {
    let m = region.leaf_count();
    let pos: HashMap<usize, usize> = region
        .verts
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut diagonals = std::collections::BTreeSet::new();
    for &(x, y) in &tri.diagonals {
        if let (Some(&px), Some(&py)) = (pos.get(&x), pos.get(&y)) {
            let (a, b) = (px.min(py), px.max(py));
            // sides and the region root are boundary, not diagonals
            if b > a + 1 && !(a == 0 && b == m) {
                diagonals.insert((a, b));
            }
        }
    }
    Triangulation::new(m, diagonals)?.to_tree()
}

/// Find an admissible path that never flips a diagonal shared between the
/// two triangulations, solving each region independently and concatenating.
pub fn factorized_path(l: &Tree, r: &Tree) -> Result<Option<AdmissiblePath>> {
    let mut cache = RegionCache::new();
    factorized_path_cached(l, r, &mut cache)
}

pub fn factorized_path_cached(
    l: &Tree,
    r: &Tree,
    cache: &mut RegionCache,
) -> Result<Option<AdmissiblePath>> {
    let n = l.leaf_count();
    if r.leaf_count() != n {
        return Err(Error::LeafMismatch {
            left: n,
            right: r.leaf_count(),
        });
    }
    if !l.is_standard() || !r.is_standard() {
        return Err(Error::NonStandard("factorized_path"));
    }
    let tri_l = Triangulation::from_tree(l);
    let tri_r = Triangulation::from_tree(r);
    let shared = tri_l.shared_diagonals(&tri_r);
    let regions = decompose_regions(n, &shared);

    // Solve every region first; any failure aborts the whole search.
    let mut solved = Vec::new();
    for region in &regions {
        let lt = region_tree(&tri_l, region)?;
        let rt = region_tree(&tri_r, region)?;
        if lt == rt {
            solved.push((lt, None));
            continue;
        }
        match cache.solve(&lt, &rt)? {
            Some(sol) => solved.push((lt, Some(sol))),
            None => return Ok(None),
        }
    }

    // Assemble global start signs from the per-region sign vectors via the
    // triangle correspondence.
    let global_index: HashMap<(usize, usize, usize), usize> = vertex_triangles(l)
        .into_iter()
        .enumerate()
        .map(|(i, tri)| (tri, i))
        .collect();
    let mut signs = vec![Sign::Plus; n - 1];
    for (region, (lt, sol)) in regions.iter().zip(&solved) {
        let bits = sol.as_ref().map_or(0, |(b, _)| *b);
        let local_signs = signs_from_bits(lt.internal_count(), bits);
        for (w, (a, b, c)) in vertex_triangles(lt).into_iter().enumerate() {
            let key = (region.verts[a], region.verts[b], region.verts[c]);
            signs[global_index[&key]] = local_signs[w];
        }
    }

    // Replay region moves on the global tree, region by region.
    let mut moves = Vec::new();
    let mut global_cur = l.clone();
    for (region, (lt, sol)) in regions.iter().zip(&solved) {
        let Some((_, region_moves)) = sol else {
            continue;
        };
        let mut region_cur = lt.clone();
        for &site_r in region_moves {
            let d_r = site_diagonal(&region_cur, site_r)?;
            let d = (region.verts[d_r.0], region.verts[d_r.1]);
            debug_assert!(!shared.contains(&d), "shared diagonals are never flipped");
            let site = diagonal_site(&global_cur, d).ok_or_else(|| {
                Error::InvalidDiagonals(format!("region diagonal ({},{}) missing", d.0, d.1))
            })?;
            moves.push(site);
            region_cur = region_cur.apply_move(site_r)?;
            global_cur = global_cur.apply_move(site)?;
        }
    }
    debug_assert_eq!(&global_cur, r);

    let path = AdmissiblePath {
        start: State::new(l.clone(), signs)?,
        moves,
    };
    debug_assert!(path.validate().is_ok());
    Ok(Some(path))
}

/// Leaf counts of the factorization regions (for decomposition checks).
pub fn region_leaf_counts(l: &Tree, r: &Tree) -> Vec<usize> {
    let tri_l = Triangulation::from_tree(l);
    let tri_r = Triangulation::from_tree(r);
    let shared = tri_l.shared_diagonals(&tri_r);
    decompose_regions(l.leaf_count(), &shared)
        .iter()
        .map(Region::leaf_count)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    fn state(tree: &str, signs: &str) -> State {
        State::new(t(tree), parse_signs(signs).unwrap()).unwrap()
    }

    #[test]
    fn admissibility_is_equal_signs() {
        let st = state("((x1x2)x3)", "++");
        assert!(is_admissible(&st, MoveSite(1)).unwrap());
        let st = state("((x1x2)x3)", "+-");
        assert!(!is_admissible(&st, MoveSite(1)).unwrap());
    }

    #[test]
    fn apply_admissible_left_comb3() {
        let st = state("((x1x2)x3)", "++");
        assert_eq!(st.leaf_vector(), "JKJ".parse().unwrap());
        let next = apply_admissible(&st, MoveSite(1)).unwrap();
        assert_eq!(next.tree, t("(x1(x2x3))"));
        assert_eq!(next.signs_string(), "--");
        assert_eq!(next.leaf_vector(), "JKJ".parse().unwrap());
        assert!(apply_admissible(&state("((x1x2)x3)", "+-"), MoveSite(1)).is_err());
    }

    #[test]
    fn admissible_steps_reverse() {
        for n in 3..=6 {
            let space = StateSpace::build(n).unwrap();
            for rank in 0..space.tree_count() as u32 {
                for bits in 0..space.sign_vectors() {
                    let st = space.state(rank, bits);
                    for site in admissible_sites(&st) {
                        let fwd = apply_admissible(&st, site).unwrap();
                        let d = st.tree.move_details(site).unwrap();
                        let back = apply_admissible(&fwd, d.inverse_site()).unwrap();
                        assert_eq!(back, st);
                    }
                }
            }
        }
    }

    #[test]
    fn state_space_neighbors_match_tree_level_dynamics() {
        for n in 3..=6 {
            let space = StateSpace::build(n).unwrap();
            for rank in 0..space.tree_count() as u32 {
                for bits in 0..space.sign_vectors() {
                    let st = space.state(rank, bits);
                    let fast: Vec<State> = space
                        .neighbors(rank, bits)
                        .into_iter()
                        .map(|(_, nr, nb)| space.state(nr, nb))
                        .collect();
                    let slow: Vec<State> = admissible_sites(&st)
                        .into_iter()
                        .map(|s| apply_admissible(&st, s).unwrap())
                        .collect();
                    assert_eq!(fast, slow);
                }
            }
        }
    }

    #[test]
    fn path_search_examples() {
        // l = r: empty path
        let p = admissible_path(&state("((x1x2)x3)", "++"), &t("((x1x2)x3)")).unwrap();
        assert_eq!(p.unwrap().len(), 0);
        // right comb -> left comb with ++ is one move
        let p = admissible_path_search(&t("(x1(x2x3))"), &t("((x1x2)x3)"))
            .unwrap()
            .unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.start.signs_string(), "++");
        p.validate().unwrap();
        // frozen start reaches nothing
        let frozen = frozen_state(&t("((x1x2)x3)")).unwrap();
        let p = admissible_path(&frozen, &t("(x1(x2x3))")).unwrap();
        assert!(p.is_none());
    }

    #[test]
    fn comb_path_right_comb4_trace() {
        let path = comb_path(&Tree::right_comb(4)).unwrap();
        assert_eq!(path.len(), 2);
        let states = path.states();
        let trees: Vec<String> = states.iter().map(|s| s.tree.to_string()).collect();
        assert_eq!(
            trees,
            vec!["(x1(x2(x3x4)))", "((x1x2)(x3x4))", "(((x1x2)x3)x4)"]
        );
        path.validate().unwrap();
    }

    #[test]
    fn comb_path_on_comb_is_empty() {
        for n in 2..=7 {
            assert_eq!(comb_path(&Tree::left_comb(n)).unwrap().len(), 0);
            assert_eq!(mirror_comb_path(&Tree::right_comb(n)).unwrap().len(), 0);
        }
    }

    #[test]
    fn comb_paths_valid_small() {
        for n in 2..=7 {
            for tree in tree_iter(n).unwrap() {
                let path = comb_path(&tree).unwrap();
                path.validate().unwrap();
                assert_eq!(path.end().tree, Tree::left_comb(n));
                let path = mirror_comb_path(&tree).unwrap();
                path.validate().unwrap();
                assert_eq!(path.end().tree, Tree::right_comb(n));
            }
        }
    }

    #[test]
    fn mirror_comb_from_left_comb4() {
        let path = mirror_comb_path(&Tree::left_comb(4)).unwrap();
        assert_eq!(path.len(), 2);
        assert_eq!(path.end().tree, Tree::right_comb(4));
    }

    #[test]
    fn block_paths_reach_fans() {
        for n in 3..=7 {
            for tree in tree_iter(n).unwrap() {
                for k in 0..=n {
                    let path = block_comb_path(&tree, k).unwrap();
                    path.validate().unwrap();
                    assert_eq!(
                        path.end().tree,
                        crate::triangulation::block_tree(n, k).unwrap()
                    );
                }
            }
        }
        assert!(block_comb_path(&Tree::left_comb(4), 9).is_err());
    }

    #[test]
    fn conjecture_small() {
        let r3 = verify_conjecture(3).unwrap();
        assert!(r3.all_satisfied());
        assert_eq!(r3.ordered_pairs, 4);
        assert_eq!(r3.component_count, 6);
        let r4 = verify_conjecture(4).unwrap();
        assert!(r4.all_satisfied());
        assert_eq!(r4.ordered_pairs, 25);
        assert_eq!(r4.component_count, 20);
        let r5 = verify_conjecture(5).unwrap();
        assert!(r5.all_satisfied());
        assert_eq!(r5.component_count, 68);
    }

    #[test]
    fn pair_witness_found_and_valid() {
        let space = StateSpace::build(4).unwrap();
        let comps = state_components(&space);
        let w = pair_witness(&space, &comps, &Tree::left_comb(4), &Tree::right_comb(4))
            .unwrap()
            .unwrap();
        w.validate().unwrap();
        assert_eq!(w.end().tree, Tree::right_comb(4));
    }

    #[test]
    fn geodesics_all_admissible_up_to_5() {
        for n in 3..=5 {
            let report = geodesic_admissibility_report(n).unwrap();
            assert!(report.all_geodesic, "n={n}: {:?}", report.exceptions.len());
        }
    }

    #[test]
    fn geodesics_fail_at_6() {
        let report = geodesic_admissibility_report(6).unwrap();
        assert!(!report.all_geodesic);
        assert_eq!(report.exceptions.len(), 42);
        for e in &report.exceptions {
            assert_eq!(e.rotation_distance, 5);
            assert_eq!(e.min_admissible, Some(6));
        }
    }

    #[test]
    fn frozen_isolated_small() {
        let report = verify_frozen(7).unwrap();
        assert!(report.all_isolated());
        assert_eq!(report.trees_checked, 1 + 2 + 5 + 14 + 42 + 132);
    }

    #[test]
    fn frozen_witness_at_n5() {
        assert!(frozen_witness_search(3).unwrap().is_none());
        assert!(frozen_witness_search(4).unwrap().is_none());
        let w = frozen_witness_search(24).unwrap().unwrap();
        assert_eq!(w.n, 5);
        assert_ne!(w.left, w.right);
        assert_eq!(w.left_admissible_moves, 0);
        assert_eq!(w.right_admissible_moves, 0);
        let lt = t(&w.left);
        let rt = t(&w.right);
        let lv = leaf_vector(&lt, &frozen_coloring(&lt));
        let rv = leaf_vector(&rt, &frozen_coloring(&rt));
        assert_eq!(lv, rv);
        assert_eq!(lv, w.leaf_vector);
    }

    #[test]
    fn factorized_equal_trees_is_empty() {
        for n in 2..=6 {
            for tree in tree_iter(n).unwrap() {
                let p = factorized_path(&tree, &tree).unwrap().unwrap();
                assert!(p.is_empty());
            }
        }
    }

    #[test]
    fn factorized_agrees_with_search_n5() {
        let trees: Vec<Tree> = tree_iter(5).unwrap().collect();
        let mut cache = RegionCache::new();
        for l in &trees {
            for r in &trees {
                let tri_l = Triangulation::from_tree(l);
                let tri_r = Triangulation::from_tree(r);
                let shared = tri_l.shared_diagonals(&tri_r);
                if shared.is_empty() {
                    continue;
                }
                let fp = factorized_path_cached(l, r, &mut cache).unwrap();
                let direct = admissible_path_search(l, r).unwrap();
                assert_eq!(fp.is_some(), direct.is_some(), "{l} vs {r}");
                if let Some(p) = fp {
                    p.validate().unwrap();
                    assert_eq!(&p.end().tree, r);
                    // shared diagonals survive in every intermediate tree
                    for st in p.states() {
                        let tri = Triangulation::from_tree(&st.tree);
                        for d in &shared {
                            assert!(tri.diagonals.contains(d));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn region_sizes_sum() {
        let trees: Vec<Tree> = tree_iter(6).unwrap().collect();
        for l in &trees {
            for r in &trees {
                let shared = Triangulation::from_tree(l)
                    .shared_diagonals(&Triangulation::from_tree(r))
                    .len();
                let sizes = region_leaf_counts(l, r);
                assert_eq!(sizes.iter().sum::<usize>(), 6 + shared);
                if shared > 0 {
                    assert!(sizes.iter().all(|&m| m < 6));
                }
            }
        }
    }

    #[test]
    fn path_json_format() {
        let p = admissible_path_search(&t("(x1(x2x3))"), &t("((x1x2)x3)"))
            .unwrap()
            .unwrap();
        let js = serde_json::to_value(&p).unwrap();
        assert_eq!(js["start"]["tree"], "(x1(x2x3))");
        assert_eq!(js["start"]["signs"], "++");
        assert_eq!(js["start"]["root"], "K");
        assert_eq!(js["moves"].as_array().unwrap().len(), 1);
        assert_eq!(js["states"].as_array().unwrap().len(), 2);
    }
}
