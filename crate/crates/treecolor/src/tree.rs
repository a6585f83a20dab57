//! Full binary trees over ordered leaves: bracket notation, Catalan
//! enumeration with rank/unrank, mirror, and rotation moves.

use std::fmt;

use num_bigint::BigUint;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Materialized enumeration is capped here; `tree_iter` streams further.
pub const MAX_ENUM_LEAVES: usize = 14;

/// Streaming enumeration cap (shape codes must fit in a `u64`).
pub const MAX_STREAM_LEAVES: usize = 26;

/// A full binary tree. Leaves carry variable labels; a tree in standard
/// form has labels 1..=n in left-to-right order. `mirror` is the only
/// constructor that produces non-standard label orders.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Tree {
    Leaf(u32),
    Node(Box<Tree>, Box<Tree>),
}

/// One rotation locus: the internal edge above the internal vertex with
/// this preorder index (counting internal vertices only, root = 0).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MoveSite(pub usize);

impl fmt::Display for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "site({})", self.0)
    }
}

/// Everything a rotation does besides producing the new tree: which internal
/// vertices participate and how internal preorder indices are permuted.
#[derive(Clone, Debug)]
pub struct MoveDetails {
    /// Internal preorder index of the parent vertex u.
    pub parent_index: usize,
    /// Internal preorder index of the child vertex v (equals the site).
    pub child_index: usize,
    /// Whether v is the right child of u.
    pub child_is_right: bool,
    /// Internal vertex count of the pivot subtree A in (A(BC)) <-> ((AB)C).
    pub pivot_internals: usize,
    /// The rotated tree.
    pub result: Tree,
}

impl MoveDetails {
    /// Index map for internal vertices: `perm[old] = new`. Identity outside
    /// the rotated subtree; inside, the pivot block shifts by one.
    pub fn sign_permutation(&self, total_internals: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..total_internals).collect();
        let p = self.parent_index;
        let a = self.pivot_internals;
        if self.child_is_right {
            // (A(BC)) -> ((AB)C): v moves to p+1, A shifts up by one
            perm[p + a + 1] = p + 1;
            for i in 0..a {
                perm[p + 1 + i] = p + 2 + i;
            }
        } else {
            // ((AB)C) -> (A(BC)): v moves past A, A shifts down by one
            perm[p + 1] = p + a + 1;
            for i in 0..a {
                perm[p + 2 + i] = p + 1 + i;
            }
        }
        perm
    }

    /// New internal indices of the two participating vertices after the move.
    pub fn participants_after(&self) -> (usize, usize) {
        let p = self.parent_index;
        if self.child_is_right {
            (p, p + 1)
        } else {
            (p, p + self.pivot_internals + 1)
        }
    }

    /// The site that undoes this move on `result`.
    pub fn inverse_site(&self) -> MoveSite {
        let (_, v) = self.participants_after();
        MoveSite(v)
    }
}

impl Tree {
    pub fn leaf(label: u32) -> Tree {
        Tree::Leaf(label)
    }

    pub fn node(left: Tree, right: Tree) -> Tree {
        Tree::Node(Box::new(left), Box::new(right))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn internal_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node(l, r) => 1 + l.internal_count() + r.internal_count(),
        }
    }

    /// Leaf labels in left-to-right order.
    pub fn leaves(&self) -> Vec<u32> {
        fn walk(t: &Tree, out: &mut Vec<u32>) {
            match t {
                Tree::Leaf(x) => out.push(*x),
                Tree::Node(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Labels are exactly 1..=n left to right.
    pub fn is_standard(&self) -> bool {
        self.leaves()
            .iter()
            .enumerate()
            .all(|(i, &x)| x as usize == i + 1)
    }

    /// (...((x1 x2) x3)... xn)
    pub fn left_comb(n: usize) -> Tree {
        assert!(n >= 1);
        let mut t = Tree::Leaf(1);
        for i in 2..=n {
            t = Tree::node(t, Tree::Leaf(i as u32));
        }
        t
    }

    /// (x1 (x2 (... (x_{n-1} xn)...)))
    pub fn right_comb(n: usize) -> Tree {
        assert!(n >= 1);
        let mut t = Tree::Leaf(n as u32);
        for i in (1..n).rev() {
            t = Tree::node(Tree::Leaf(i as u32), t);
        }
        t
    }

    /// Mirror image: children swapped at every internal node, labels kept,
    /// so [(xy)z]* = z(yx). An involution.
    pub fn mirror(&self) -> Tree {
        match self {
            Tree::Leaf(x) => Tree::Leaf(*x),
            Tree::Node(l, r) => Tree::node(r.mirror(), l.mirror()),
        }
    }

    /// Shape code: preorder bits packed into a u64, earliest symbol in the
    /// highest position, leaf = 1 and internal = 0, so that ascending codes
    /// are ascending canonical (lexicographic) order.
    pub fn shape_code(&self) -> u64 {
        fn walk(t: &Tree, code: &mut u64, pos: &mut u32) {
            match t {
                Tree::Leaf(_) => {
                    *code |= 1 << *pos;
                    *pos = pos.wrapping_sub(1);
                }
                Tree::Node(l, r) => {
                    *pos = pos.wrapping_sub(1);
                    walk(l, code, pos);
                    walk(r, code, pos);
                }
            }
        }
        let len = 2 * self.leaf_count() - 1;
        assert!(len <= 63, "tree too large for shape code");
        let mut code = 0u64;
        let mut pos = (len - 1) as u32;
        walk(self, &mut code, &mut pos);
        code
    }

    /// All rotation loci: one per non-root internal vertex, ascending.
    pub fn sites(&self) -> Vec<MoveSite> {
        (1..self.internal_count()).map(MoveSite).collect()
    }

    /// Rotate at `site`: (A(BC)) -> ((AB)C) when the site vertex is a right
    /// child, ((AB)C) -> (A(BC)) when a left child. Leaf order is preserved.
    pub fn apply_move(&self, site: MoveSite) -> Result<Tree> {
        Ok(self.move_details(site)?.result)
    }

    /// Like `apply_move` but also reports participants and the index map.
    pub fn move_details(&self, site: MoveSite) -> Result<MoveDetails> {
        let total = self.internal_count();
        if site.0 == 0 || site.0 >= total {
            return Err(Error::InvalidSite {
                site: site.0,
                internal: total,
            });
        }
        // (parent index, child is right, pivot internals)
        struct Found(usize, bool, usize);
        fn rec(t: &Tree, my_idx: usize, site: usize, found: &mut Option<Found>) -> Tree {
            let (l, r) = match t {
                Tree::Node(l, r) => (l.as_ref(), r.as_ref()),
                Tree::Leaf(_) => unreachable!("site resolution never enters a leaf"),
            };
            let il = l.internal_count();
            let left_idx = my_idx + 1;
            let right_idx = my_idx + 1 + il;
            if il > 0 && left_idx == site {
                // ((A B) C) -> (A (B C))
                let (a, b) = match l {
                    Tree::Node(a, b) => (a.as_ref().clone(), b.as_ref().clone()),
                    Tree::Leaf(_) => unreachable!(),
                };
                *found = Some(Found(my_idx, false, a.internal_count()));
                return Tree::node(a, Tree::node(b, r.clone()));
            }
            if !matches!(r, Tree::Leaf(_)) && right_idx == site {
                // (A (B C)) -> ((A B) C)
                let (b, c) = match r {
                    Tree::Node(b, c) => (b.as_ref().clone(), c.as_ref().clone()),
                    Tree::Leaf(_) => unreachable!(),
                };
                *found = Some(Found(my_idx, true, l.internal_count()));
                return Tree::node(Tree::node(l.clone(), b), c);
            }
            if site <= my_idx + il {
                let nl = rec(l, my_idx + 1, site, found);
                Tree::node(nl, r.clone())
            } else {
                let nr = rec(r, right_idx, site, found);
                Tree::node(l.clone(), nr)
            }
        }
        let mut found = None;
        let result = rec(self, 0, site.0, &mut found);
        let Found(parent_index, child_is_right, pivot_internals) =
            found.ok_or(Error::InvalidSite {
                site: site.0,
                internal: total,
            })?;
        Ok(MoveDetails {
            parent_index,
            child_index: site.0,
            child_is_right,
            pivot_internals,
            result,
        })
    }

    /// Rank in canonical order among standard trees with the same leaf count.
    pub fn rank(&self) -> u64 {
        let n = self.leaf_count();
        let len = 2 * n - 1;
        let table = CompletionTable::new(n);
        let mut rank = 0u64;
        let mut h: i64 = 0;
        let mut pos = 0usize;
        fn walk(t: &Tree, f: &mut impl FnMut(bool)) {
            match t {
                Tree::Leaf(_) => f(false),
                Tree::Node(l, r) => {
                    f(true);
                    walk(l, f);
                    walk(r, f);
                }
            }
        }
        walk(self, &mut |internal| {
            let remaining = len - pos;
            if !internal {
                // trees placing an internal vertex here come first
                rank += table.completions(remaining - 1, h + 1);
                h -= 1;
            } else {
                h += 1;
            }
            pos += 1;
        });
        rank
    }

    /// Inverse of `rank` for standard trees with n leaves.
    pub fn unrank(n: usize, rank: u64) -> Result<Tree> {
        if n == 0 {
            return Err(Error::Cap {
                what: "leaf count",
                n: 0,
                cap: MAX_STREAM_LEAVES,
            });
        }
        let total = catalan_g_u64(n).ok_or(Error::Cap {
            what: "unrank leaf count",
            n,
            cap: MAX_STREAM_LEAVES,
        })?;
        assert!(rank < total, "rank {rank} out of range for n={n}");
        Ok(Tree::unrank_with(&CompletionTable::new(n), n, rank))
    }

    fn unrank_with(table: &CompletionTable, n: usize, mut rank: u64) -> Tree {
        let len = 2 * n - 1;
        let mut bits = Vec::with_capacity(len);
        let mut h: i64 = 0;
        for pos in 0..len {
            let remaining = len - pos;
            let with_internal = table.completions(remaining - 1, h + 1);
            if rank < with_internal {
                bits.push(true);
                h += 1;
            } else {
                rank -= with_internal;
                bits.push(false);
                h -= 1;
            }
        }
        let mut next_leaf = 1u32;
        let mut it = bits.into_iter();
        fn build(it: &mut impl Iterator<Item = bool>, next_leaf: &mut u32) -> Tree {
            if it.next().expect("exhausted encoding") {
                let l = build(it, next_leaf);
                let r = build(it, next_leaf);
                Tree::node(l, r)
            } else {
                let t = Tree::Leaf(*next_leaf);
                *next_leaf += 1;
                t
            }
        }
        build(&mut it, &mut next_leaf)
    }

    /// Parse bracket notation, e.g. `((x1x2)x3)`. Whitespace is ignored.
    /// Labels must be exactly x1..xn in left-to-right order.
    pub fn parse(text: &str) -> Result<Tree> {
        let tree = Parser::new(text).parse_full()?;
        let leaves = tree.leaves();
        for (i, &x) in leaves.iter().enumerate() {
            if x as usize != i + 1 {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!(
                        "variables must be x1..x{} in order; found x{} at position {}",
                        leaves.len(),
                        x,
                        i + 1
                    ),
                });
            }
        }
        Ok(tree)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf(x) => write!(f, "x{x}"),
            Tree::Node(l, r) => write!(f, "({l}{r})"),
        }
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// Tree <-> nested JSON arrays: [[1,2],3] for ((x1x2)x3).
impl Serialize for Tree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Tree::Leaf(x) => s.serialize_u32(*x),
            Tree::Node(l, r) => {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element(l.as_ref())?;
                seq.serialize_element(r.as_ref())?;
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Tree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Tree, D::Error> {
        struct TreeVisitor;
        impl<'de> Visitor<'de> for TreeVisitor {
            type Value = Tree;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a leaf label or a two-element array")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Tree, E> {
                if v == 0 || v > u32::MAX as u64 {
                    return Err(E::custom("leaf label out of range"));
                }
                Ok(Tree::Leaf(v as u32))
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Tree, A::Error> {
                let l: Tree = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::custom("expected two children"))?;
                let r: Tree = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::custom("expected two children"))?;
                if seq.next_element::<Tree>()?.is_some() {
                    return Err(de::Error::custom("node must have exactly two children"));
                }
                Ok(Tree::node(l, r))
            }
        }
        d.deserialize_any(TreeVisitor)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn parse_full(&mut self) -> Result<Tree> {
        let t = self.parse_expr()?;
        if let Some(c) = self.peek() {
            return Err(self.err(format!("unexpected trailing input '{}'", c as char)));
        }
        Ok(t)
    }

    fn parse_expr(&mut self) -> Result<Tree> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let l = self.parse_expr()?;
                let r = self.parse_expr()?;
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(Tree::node(l, r))
                    }
                    Some(b'x') | Some(b'(') => {
                        Err(self.err("a node has exactly two children; expected ')'"))
                    }
                    Some(c) => Err(self.err(format!("expected ')', found '{}'", c as char))),
                    None => Err(self.err("expected ')', found end of input")),
                }
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.pos == start {
                    return Err(self.err("expected a variable index after 'x'"));
                }
                let digits = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                let label: u32 = digits
                    .parse()
                    .map_err(|_| self.err(format!("variable index '{digits}' out of range")))?;
                if label == 0 {
                    return Err(self.err("variable indices start at x1"));
                }
                Ok(Tree::Leaf(label))
            }
            Some(c) => Err(self.err(format!("expected '(' or 'x', found '{}'", c as char))),
            None => Err(self.err("expected '(' or 'x', found end of input")),
        }
    }
}

/// What the edge above a node is, in the tied-map labeling scheme.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeKind {
    /// The dangling edge above the root vertex.
    Root,
    /// The edge above leaf x_i.
    Leaf(u32),
    /// The edge above the non-root internal vertex with this internal
    /// preorder index (the same index `MoveSite` uses).
    Internal(usize),
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeKind::Root => write!(f, "root"),
            EdgeKind::Leaf(i) => write!(f, "leaf:{i}"),
            EdgeKind::Internal(i) => write!(f, "internal:{i}"),
        }
    }
}

/// One tree edge, identified by the node below it.
#[derive(Clone, Copy, Debug)]
pub struct EdgeInfo {
    /// Preorder index (over all nodes) of the node below this edge.
    pub node_index: usize,
    /// Internal preorder index of the vertex above, if any (none for root).
    pub parent_internal: Option<usize>,
    pub kind: EdgeKind,
}

/// Edges in node-preorder order: index 0 is the root edge.
pub fn edge_list(t: &Tree) -> Vec<EdgeInfo> {
    fn walk(
        t: &Tree,
        parent_internal: Option<usize>,
        node_ctr: &mut usize,
        internal_ctr: &mut usize,
        out: &mut Vec<EdgeInfo>,
    ) {
        let node_index = *node_ctr;
        *node_ctr += 1;
        match t {
            Tree::Leaf(x) => out.push(EdgeInfo {
                node_index,
                parent_internal,
                kind: EdgeKind::Leaf(*x),
            }),
            Tree::Node(l, r) => {
                let my_internal = *internal_ctr;
                *internal_ctr += 1;
                out.push(EdgeInfo {
                    node_index,
                    parent_internal,
                    kind: if parent_internal.is_none() {
                        EdgeKind::Root
                    } else {
                        EdgeKind::Internal(my_internal)
                    },
                });
                walk(l, Some(my_internal), node_ctr, internal_ctr, out);
                walk(r, Some(my_internal), node_ctr, internal_ctr, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(t, None, &mut 0, &mut 0, &mut out);
    out
}

/// Per internal vertex (internal preorder order): node-preorder indices of
/// its three incident edges (parent edge, left child edge, right child edge).
pub fn vertex_triples(t: &Tree) -> Vec<(usize, usize, usize)> {
    fn walk(t: &Tree, node_ctr: &mut usize, out: &mut Vec<(usize, usize, usize)>) {
        let my_node = *node_ctr;
        *node_ctr += 1;
        if let Tree::Node(l, r) = t {
            let slot = out.len();
            out.push((my_node, 0, 0));
            let left_node = *node_ctr;
            walk(l, node_ctr, out);
            let right_node = *node_ctr;
            walk(r, node_ctr, out);
            out[slot].1 = left_node;
            out[slot].2 = right_node;
        }
    }
    let mut out = Vec::new();
    walk(t, &mut 0, &mut out);
    out
}

/// Suffix-count table for ranking: `completions(m, h)` is the number of
/// preorder bit suffixes of length m starting at stack height h that stay
/// non-negative until ending at -1.
struct CompletionTable {
    max_len: usize,
    table: Vec<u64>, // [m * (max_h + 1) + h]
    max_h: usize,
}

impl CompletionTable {
    fn new(n: usize) -> Self {
        let max_len = 2 * n - 1;
        let max_h = n + 1;
        let mut table = vec![0u64; (max_len + 1) * (max_h + 1)];
        for m in 1..=max_len {
            for h in 0..=max_h {
                let up = if h < max_h {
                    table[(m - 1) * (max_h + 1) + h + 1]
                } else {
                    0
                };
                let down = if h == 0 {
                    u64::from(m == 1)
                } else {
                    table[(m - 1) * (max_h + 1) + h - 1]
                };
                table[m * (max_h + 1) + h] = up + down;
            }
        }
        CompletionTable {
            max_len,
            table,
            max_h,
        }
    }

    fn completions(&self, m: usize, h: i64) -> u64 {
        if h < 0 || h as usize > self.max_h || m > self.max_len {
            return 0;
        }
        if m == 0 {
            return 0;
        }
        self.table[m * (self.max_h + 1) + h as usize]
    }
}

/// Number of trees over n ordered leaves: (2n-2)! / ((n-1)! n!).
pub fn catalan_g(n: usize) -> BigUint {
    assert!(n >= 1);
    // binomial(2n-2, n-1) / n
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    let k = n - 1;
    for i in 0..k {
        num *= BigUint::from(2 * k - i);
        den *= BigUint::from(i + 1);
    }
    num / den / BigUint::from(n)
}

/// `catalan_g` when it fits a u64 (n <= 33).
pub fn catalan_g_u64(n: usize) -> Option<u64> {
    if n == 0 || n > 33 {
        return None;
    }
    let big = catalan_g(n);
    let digits = big.to_u64_digits();
    match digits.len() {
        0 => Some(0),
        1 => Some(digits[0]),
        _ => None,
    }
}

/// All standard trees with n leaves in canonical order.
pub fn enumerate_trees(n: usize) -> Result<Vec<Tree>> {
    if n == 0 || n > MAX_ENUM_LEAVES {
        return Err(Error::Cap {
            what: "enumerate_trees leaf count",
            n,
            cap: MAX_ENUM_LEAVES,
        });
    }
    Ok(tree_iter(n)?.collect())
}

/// Streaming canonical-order enumeration.
pub fn tree_iter(n: usize) -> Result<impl Iterator<Item = Tree>> {
    if n == 0 || n > MAX_STREAM_LEAVES {
        return Err(Error::Cap {
            what: "tree_iter leaf count",
            n,
            cap: MAX_STREAM_LEAVES,
        });
    }
    let count = catalan_g_u64(n).expect("within stream cap");
    let table = CompletionTable::new(n);
    Ok((0..count).map(move |r| Tree::unrank_with(&table, n, r)))
}
