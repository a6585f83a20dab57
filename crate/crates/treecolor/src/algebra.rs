//! The color and sign algebra: Klein four-group, signed cross product,
//! proper edge colorings in (root color, vertex signs) form, and sharp
//! solution enumeration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::tree::Tree;
use crate::{Error, Result};

/// Klein four-group element. E is the identity; every element is
/// self-inverse; the product of two distinct non-identity elements is
/// the third.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum KleinElem {
    E,
    I,
    J,
    K,
}

/// An edge color: a Klein element that is never E. Doubles as a cross
/// product axis (I, J, K for i, j, k).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Color {
    I,
    J,
    K,
}

/// Orientation of an internal vertex: Plus iff its (left, right, parent)
/// colors form a cyclic triple (I,J,K), (J,K,I) or (K,I,J).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

/// A signed basis vector or zero; the value algebra of cross evaluation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SignedVec {
    Zero,
    Axis(Sign, Color),
}

impl KleinElem {
    pub fn as_char(self) -> char {
        match self {
            KleinElem::E => 'E',
            KleinElem::I => 'I',
            KleinElem::J => 'J',
            KleinElem::K => 'K',
        }
    }

    pub const ALL: [KleinElem; 4] = [KleinElem::E, KleinElem::I, KleinElem::J, KleinElem::K];
}

impl fmt::Display for KleinElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl Color {
    pub const ALL: [Color; 3] = [Color::I, Color::J, Color::K];

    pub fn index(self) -> usize {
        match self {
            Color::I => 0,
            Color::J => 1,
            Color::K => 2,
        }
    }

    pub fn from_index(i: usize) -> Color {
        Color::ALL[i % 3]
    }

    /// Cyclic successor: I -> J -> K -> I.
    pub fn next(self) -> Color {
        Color::from_index(self.index() + 1)
    }

    /// Cyclic predecessor.
    pub fn prev(self) -> Color {
        Color::from_index(self.index() + 2)
    }

    pub fn klein(self) -> KleinElem {
        match self {
            Color::I => KleinElem::I,
            Color::J => KleinElem::J,
            Color::K => KleinElem::K,
        }
    }

    /// The color distinct from two distinct colors.
    pub fn third(a: Color, b: Color) -> Option<Color> {
        if a == b {
            return None;
        }
        Some(Color::from_index(3 - a.index() - b.index()))
    }

    pub fn as_char(self) -> char {
        match self {
            Color::I => 'I',
            Color::J => 'J',
            Color::K => 'K',
        }
    }

    pub fn from_char(c: char) -> Result<Color> {
        match c {
            'I' | 'i' => Ok(Color::I),
            'J' | 'j' => Ok(Color::J),
            'K' | 'k' => Ok(Color::K),
            other => Err(Error::BadColor(other)),
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Color {
    type Err = Error;
    fn from_str(s: &str) -> Result<Color> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Color::from_char(c),
            _ => Err(Error::BadColor(s.chars().next().unwrap_or('?'))),
        }
    }
}

impl Serialize for Color {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_char(self.as_char())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Color, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_char(c: char) -> Result<Sign> {
        match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            other => Err(Error::BadSign(other)),
        }
    }

    fn mul(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl SignedVec {
    pub fn is_zero(self) -> bool {
        self == SignedVec::Zero
    }
}

impl fmt::Display for SignedVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignedVec::Zero => write!(f, "0"),
            SignedVec::Axis(s, a) => {
                write!(f, "{}{}", s.as_char(), a.as_char().to_ascii_lowercase())
            }
        }
    }
}

impl Serialize for SignedVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Klein four-group multiplication: EE=E, EI=I, II=JJ=KK=E, IJ=K, ...
pub fn klein_mul(a: KleinElem, b: KleinElem) -> KleinElem {
    use KleinElem::*;
    match (a, b) {
        (E, x) | (x, E) => x,
        (x, y) if x == y => E,
        (I, J) | (J, I) => K,
        (J, K) | (K, J) => I,
        (K, I) | (I, K) => J,
        _ => unreachable!(),
    }
}

/// Signed basis cross product: ii = 0, ij = k, ji = -k and circular
/// permutations; zero absorbs.
pub fn cross_mul(u: SignedVec, v: SignedVec) -> SignedVec {
    let (su, au) = match u {
        SignedVec::Zero => return SignedVec::Zero,
        SignedVec::Axis(s, a) => (s, a),
    };
    let (sv, av) = match v {
        SignedVec::Zero => return SignedVec::Zero,
        SignedVec::Axis(s, a) => (s, a),
    };
    if au == av {
        return SignedVec::Zero;
    }
    let axis = Color::third(au, av).expect("distinct axes");
    // cyclic order gives +, anticyclic gives -
    let orient = if au.next() == av {
        Sign::Plus
    } else {
        Sign::Minus
    };
    SignedVec::Axis(su.mul(sv).mul(orient), axis)
}

/// Colors assigned to x_1..x_n.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LeafVector(pub Vec<Color>);

impl LeafVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Base-3 packing for table keys (I=0, J=1, K=2, leftmost leaf most
    /// significant). Requires n <= 40.
    pub fn pack(&self) -> u64 {
        assert!(self.len() <= 40);
        self.0
            .iter()
            .fold(0u64, |acc, c| acc * 3 + c.index() as u64)
    }

    pub fn unpack(n: usize, mut key: u64) -> LeafVector {
        let mut colors = vec![Color::I; n];
        for i in (0..n).rev() {
            colors[i] = Color::from_index((key % 3) as usize);
            key /= 3;
        }
        LeafVector(colors)
    }

    /// Relabel every color by the cyclic map I->J->K->I, iterated `k` times.
    pub fn cycled(&self, k: usize) -> LeafVector {
        LeafVector(
            self.0
                .iter()
                .map(|c| Color::from_index(c.index() + k))
                .collect(),
        )
    }
}

impl fmt::Display for LeafVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{}", c.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for LeafVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<LeafVector> {
        s.chars()
            .map(Color::from_char)
            .collect::<Result<Vec<_>>>()
            .map(LeafVector)
    }
}

impl Serialize for LeafVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LeafVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<LeafVector, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All leaf vectors of length n in lexicographic order (I < J < K).
pub fn all_leaf_vectors(n: usize) -> impl Iterator<Item = LeafVector> {
    assert!(n <= 40, "leaf vector sweep too large");
    let count = 3u64.pow(n as u32);
    (0..count).map(move |k| LeafVector::unpack(n, k))
}

/// A proper edge 3-coloring in canonical form: the root edge color plus one
/// sign per internal vertex (internal preorder order). Propagation derives
/// the full edge map on demand.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "ColoringRepr", into = "ColoringRepr")]
pub struct Coloring {
    pub root: Color,
    pub signs: Vec<Sign>,
}

#[derive(Serialize, Deserialize)]
struct ColoringRepr {
    root: String,
    signs: String,
}

impl From<Coloring> for ColoringRepr {
    fn from(c: Coloring) -> ColoringRepr {
        ColoringRepr {
            root: c.root.to_string(),
            signs: c.signs_string(),
        }
    }
}

impl TryFrom<ColoringRepr> for Coloring {
    type Error = Error;
    fn try_from(r: ColoringRepr) -> Result<Coloring> {
        Ok(Coloring {
            root: r.root.parse()?,
            signs: parse_signs(&r.signs)?,
        })
    }
}

pub fn parse_signs(s: &str) -> Result<Vec<Sign>> {
    s.chars().map(Sign::from_char).collect()
}

impl Coloring {
    pub fn new(root: Color, signs: Vec<Sign>) -> Coloring {
        Coloring { root, signs }
    }

    pub fn signs_string(&self) -> String {
        self.signs.iter().map(|s| s.as_char()).collect()
    }

    /// Signs packed as bits, Minus = 1, internal index 0 at bit 0, so that
    /// ascending bit values are the canonical sign order (+ = 0 first).
    pub fn sign_bits(&self) -> u32 {
        sign_bits(&self.signs)
    }
}

pub fn sign_bits(signs: &[Sign]) -> u32 {
    assert!(signs.len() <= 32);
    signs.iter().enumerate().fold(0u32, |acc, (i, s)| match s {
        Sign::Plus => acc,
        Sign::Minus => acc | (1 << i),
    })
}

pub fn signs_from_bits(len: usize, bits: u32) -> Vec<Sign> {
    (0..len)
        .map(|i| {
            if bits & (1 << i) == 0 {
                Sign::Plus
            } else {
                Sign::Minus
            }
        })
        .collect()
}

/// All colorings of a tree with m internal vertices, canonical order:
/// root I < J < K outermost, then sign vectors by ascending bits.
pub fn all_colorings(internal: usize) -> impl Iterator<Item = Coloring> {
    assert!(internal <= 24, "coloring sweep too large");
    Color::ALL.into_iter().flat_map(move |root| {
        (0..(1u32 << internal))
            .map(move |bits| Coloring::new(root, signs_from_bits(internal, bits)))
    })
}

/// Fold the signed cross product over the bracket structure. The result is
/// zero exactly when the assignment is not sharp for this tree.
pub fn evaluate_cross(t: &Tree, x: &LeafVector) -> SignedVec {
    fn eval(t: &Tree, x: &LeafVector) -> SignedVec {
        match t {
            Tree::Leaf(label) => SignedVec::Axis(Sign::Plus, x.0[*label as usize - 1]),
            Tree::Node(l, r) => cross_mul(eval(l, x), eval(r, x)),
        }
    }
    assert_eq!(t.leaf_count(), x.len(), "leaf vector length mismatch");
    eval(t, x)
}

/// Fold the Klein product; sharp iff no intermediate value is E.
pub fn evaluate_klein_sharp(t: &Tree, x: &LeafVector) -> (KleinElem, bool) {
    fn eval(t: &Tree, x: &LeafVector, sharp: &mut bool) -> KleinElem {
        match t {
            Tree::Leaf(label) => x.0[*label as usize - 1].klein(),
            Tree::Node(l, r) => {
                let v = klein_mul(eval(l, x, sharp), eval(r, x, sharp));
                if v == KleinElem::E {
                    *sharp = false;
                }
                v
            }
        }
    }
    assert_eq!(t.leaf_count(), x.len(), "leaf vector length mismatch");
    let mut sharp = true;
    let v = eval(t, x, &mut sharp);
    (v, sharp)
}

/// Top-down propagation: every edge's color, indexed by the preorder index
/// (over all nodes) of the node below the edge. Index 0 is the root edge.
/// The result is always a proper coloring.
pub fn edge_colors(t: &Tree, c: &Coloring) -> Vec<Color> {
    assert_eq!(
        t.internal_count(),
        c.signs.len(),
        "sign vector length mismatch"
    );
    let mut out = vec![Color::I; 2 * t.leaf_count() - 1];
    fn walk(
        t: &Tree,
        parent: Color,
        c: &Coloring,
        node_ctr: &mut usize,
        internal_ctr: &mut usize,
        out: &mut Vec<Color>,
    ) {
        let my_node = *node_ctr;
        *node_ctr += 1;
        out[my_node] = parent;
        if let Tree::Node(l, r) = t {
            let sign = c.signs[*internal_ctr];
            *internal_ctr += 1;
            let (lc, rc) = match sign {
                Sign::Plus => (parent.next(), parent.prev()),
                Sign::Minus => (parent.prev(), parent.next()),
            };
            walk(l, lc, c, node_ctr, internal_ctr, out);
            walk(r, rc, c, node_ctr, internal_ctr, out);
        }
    }
    walk(t, c.root, c, &mut 0, &mut 0, &mut out);
    out
}

/// Restriction of `edge_colors` to leaf edges, ordered by leaf label.
pub fn leaf_vector(t: &Tree, c: &Coloring) -> LeafVector {
    let colors = edge_colors(t, c);
    let mut out = vec![Color::I; t.leaf_count()];
    fn walk(t: &Tree, colors: &[Color], node_ctr: &mut usize, out: &mut Vec<Color>) {
        let my_node = *node_ctr;
        *node_ctr += 1;
        match t {
            Tree::Leaf(label) => out[*label as usize - 1] = colors[my_node],
            Tree::Node(l, r) => {
                walk(l, colors, node_ctr, out);
                walk(r, colors, node_ctr, out);
            }
        }
    }
    walk(t, &colors, &mut 0, &mut out);
    LeafVector(out)
}

/// All colorings whose leaf vector is `x` (and whose root matches, if
/// given). There is at most one: leaf colors force every internal edge
/// bottom-up, so the list is empty exactly when `x` is not sharp on `t`.
pub fn colorings_matching(t: &Tree, x: &LeafVector, root: Option<Color>) -> Vec<Coloring> {
    assert_eq!(t.leaf_count(), x.len(), "leaf vector length mismatch");
    fn up(t: &Tree, x: &LeafVector, signs: &mut Vec<Option<Sign>>) -> Option<Color> {
        match t {
            Tree::Leaf(label) => Some(x.0[*label as usize - 1]),
            Tree::Node(l, r) => {
                let slot = signs.len();
                signs.push(None);
                let lc = up(l, x, signs)?;
                let rc = up(r, x, signs)?;
                let parent = Color::third(lc, rc)?;
                signs[slot] = Some(if lc == parent.next() {
                    Sign::Plus
                } else {
                    Sign::Minus
                });
                Some(parent)
            }
        }
    }
    let mut signs = Vec::with_capacity(t.internal_count());
    let Some(found_root) = up(t, x, &mut signs) else {
        return Vec::new();
    };
    if signs.iter().any(Option::is_none) {
        return Vec::new();
    }
    if let Some(want) = root {
        if want != found_root {
            return Vec::new();
        }
    }
    vec![Coloring::new(
        found_root,
        signs.into_iter().map(Option::unwrap).collect(),
    )]
}

/// The coloring with alternating signs by depth parity (root vertex +)
/// and root edge K. Under it no transplantation is admissible.
pub fn frozen_coloring(t: &Tree) -> Coloring {
    fn walk(t: &Tree, depth: usize, signs: &mut Vec<Sign>) {
        if let Tree::Node(l, r) = t {
            signs.push(if depth.is_multiple_of(2) {
                Sign::Plus
            } else {
                Sign::Minus
            });
            walk(l, depth + 1, signs);
            walk(r, depth + 1, signs);
        }
    }
    let mut signs = Vec::with_capacity(t.internal_count());
    walk(t, 0, &mut signs);
    Coloring::new(Color::K, signs)
}

/// All assignments making both sides of L = R nonzero and equal under the
/// cross product, in lexicographic order.
pub fn sharp_solutions(l: &Tree, r: &Tree) -> Vec<LeafVector> {
    assert_eq!(l.leaf_count(), r.leaf_count(), "leaf count mismatch");
    all_leaf_vectors(l.leaf_count())
        .filter(|x| {
            let lv = evaluate_cross(l, x);
            let rv = evaluate_cross(r, x);
            !lv.is_zero() && lv == rv
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::tree_iter;
    use KleinElem as KE;

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    fn lv(s: &str) -> LeafVector {
        s.parse().unwrap()
    }

    fn coloring(root: char, signs: &str) -> Coloring {
        Coloring::new(Color::from_char(root).unwrap(), parse_signs(signs).unwrap())
    }

    #[test]
    fn klein_table_rules() {
        assert_eq!(klein_mul(KE::E, KE::E), KE::E);
        assert_eq!(klein_mul(KE::E, KE::I), KE::I);
        assert_eq!(klein_mul(KE::E, KE::J), KE::J);
        assert_eq!(klein_mul(KE::E, KE::K), KE::K);
        assert_eq!(klein_mul(KE::I, KE::I), KE::E);
        assert_eq!(klein_mul(KE::J, KE::J), KE::E);
        assert_eq!(klein_mul(KE::K, KE::K), KE::E);
        assert_eq!(klein_mul(KE::I, KE::J), KE::K);
    }

    #[test]
    fn klein_group_axioms_exhaustive() {
        for a in KE::ALL {
            assert_eq!(klein_mul(KE::E, a), a);
            assert_eq!(klein_mul(a, a), KE::E);
            for b in KE::ALL {
                assert_eq!(klein_mul(a, b), klein_mul(b, a));
                for c in KE::ALL {
                    assert_eq!(klein_mul(klein_mul(a, b), c), klein_mul(a, klein_mul(b, c)));
                }
            }
        }
    }

    fn axis(s: Sign, c: Color) -> SignedVec {
        SignedVec::Axis(s, c)
    }

    #[test]
    fn cross_table_rules() {
        use Color::*;
        use Sign::*;
        assert_eq!(cross_mul(axis(Plus, I), axis(Plus, J)), axis(Plus, K));
        assert_eq!(cross_mul(axis(Plus, J), axis(Plus, I)), axis(Minus, K));
        assert_eq!(cross_mul(axis(Plus, I), axis(Plus, I)), SignedVec::Zero);
        assert_eq!(cross_mul(axis(Plus, J), axis(Plus, K)), axis(Plus, I));
        assert_eq!(cross_mul(axis(Plus, K), axis(Plus, I)), axis(Plus, J));
        assert_eq!(cross_mul(SignedVec::Zero, axis(Plus, I)), SignedVec::Zero);
    }

    #[test]
    fn cross_antisymmetry_and_jacobi_exhaustive() {
        use Sign::*;
        let mut basis = vec![SignedVec::Zero];
        for s in [Plus, Minus] {
            for c in Color::ALL {
                basis.push(axis(s, c));
            }
        }
        let neg = |v: SignedVec| match v {
            SignedVec::Zero => SignedVec::Zero,
            SignedVec::Axis(s, a) => SignedVec::Axis(s.flip(), a),
        };
        for &u in &basis {
            assert_eq!(cross_mul(u, u), SignedVec::Zero);
            for &v in &basis {
                assert_eq!(cross_mul(u, v), neg(cross_mul(v, u)));
                // Jacobi on signed basis vectors: each term is a pure axis or
                // zero, and the three terms cancel pairwise for basis input
                for &w in &basis {
                    let t1 = cross_mul(u, cross_mul(v, w));
                    let t2 = cross_mul(v, cross_mul(w, u));
                    let t3 = cross_mul(w, cross_mul(u, v));
                    // sum is zero: on basis vectors either all three are zero
                    // or two cancel and one is zero
                    let mut terms: Vec<SignedVec> =
                        [t1, t2, t3].into_iter().filter(|v| !v.is_zero()).collect();
                    terms.sort_by_key(|v| match v {
                        SignedVec::Zero => (0, 0),
                        SignedVec::Axis(s, a) => (a.index() as u8 + 1, *s as u8),
                    });
                    match terms.len() {
                        0 => {}
                        2 => assert_eq!(terms[0], neg(terms[1]), "{u} {v} {w}"),
                        _ => panic!("Jacobi violated on {u} x ({v} x {w})"),
                    }
                }
            }
        }
    }

    #[test]
    fn evaluate_cross_table_chains() {
        assert_eq!(
            evaluate_cross(&t("((x1x2)x3)"), &lv("IJI")),
            axis(Sign::Plus, Color::J)
        );
        assert_eq!(
            evaluate_cross(&t("((x1x2)x3)"), &lv("IIJ")),
            SignedVec::Zero
        );
        assert_eq!(
            evaluate_cross(&t("(x1(x2x3))"), &lv("JIJ")),
            axis(Sign::Plus, Color::I)
        );
    }

    #[test]
    fn evaluate_klein_examples() {
        let (v, sharp) = evaluate_klein_sharp(&t("((x1x2)x3)"), &lv("IJI"));
        assert_eq!((v, sharp), (KE::J, true));
        let (_, sharp) = evaluate_klein_sharp(&t("((x1x2)x3)"), &lv("IIJ"));
        assert!(!sharp);
    }

    #[test]
    fn sharpness_equivalent_to_nonzero_cross() {
        for n in 2..=6 {
            for tree in tree_iter(n).unwrap() {
                for x in all_leaf_vectors(n) {
                    let cv = evaluate_cross(&tree, &x);
                    let (kv, sharp) = evaluate_klein_sharp(&tree, &x);
                    assert_eq!(sharp, !cv.is_zero());
                    if let SignedVec::Axis(_, a) = cv {
                        assert_eq!(a.klein(), kv, "cross axis equals Klein value");
                    }
                }
            }
        }
    }

    #[test]
    fn propagation_left_comb3_examples() {
        let tree = t("((x1x2)x3)");
        let ec = edge_colors(&tree, &coloring('K', "++"));
        // preorder nodes: root, (x1x2), x1, x2, x3
        assert_eq!(ec[1], Color::I, "inner edge");
        assert_eq!(leaf_vector(&tree, &coloring('K', "++")), lv("JKJ"));
        assert_eq!(leaf_vector(&tree, &coloring('K', "+-")), lv("KJJ"));
    }

    #[test]
    fn propagation_always_proper() {
        for n in 2..=5 {
            for tree in tree_iter(n).unwrap() {
                let triples = crate::tree::vertex_triples(&tree);
                for c in all_colorings(n - 1) {
                    let ec = edge_colors(&tree, &c);
                    for &(p, l, r) in &triples {
                        assert!(ec[p] != ec[l] && ec[p] != ec[r] && ec[l] != ec[r]);
                    }
                }
            }
        }
    }

    #[test]
    fn colorings_count_is_3_times_2_pow() {
        // tiny brute-force oracle over all edge colorings, n <= 4
        for n in 2..=4 {
            for tree in tree_iter(n).unwrap() {
                let edges = 2 * n - 1;
                let triples = crate::tree::vertex_triples(&tree);
                let mut proper = Vec::new();
                for mut k in 0..3u32.pow(edges as u32) {
                    let mut colors = Vec::with_capacity(edges);
                    for _ in 0..edges {
                        colors.push(Color::from_index((k % 3) as usize));
                        k /= 3;
                    }
                    if triples.iter().all(|&(p, l, r)| {
                        colors[p] != colors[l] && colors[p] != colors[r] && colors[l] != colors[r]
                    }) {
                        proper.push(colors);
                    }
                }
                assert_eq!(proper.len(), 3 * (1 << (n - 1)));
                let mut derived: Vec<Vec<Color>> = all_colorings(n - 1)
                    .map(|c| edge_colors(&tree, &c))
                    .collect();
                derived.sort();
                derived.dedup();
                proper.sort();
                assert_eq!(derived, proper, "propagation image = brute force set");
            }
        }
    }

    #[test]
    fn matching_inverts_propagation() {
        let tree = t("((x1x2)x3)");
        let found = colorings_matching(&tree, &lv("JKJ"), Some(Color::K));
        assert_eq!(found, vec![coloring('K', "++")]);
        assert!(colorings_matching(&tree, &lv("IIJ"), None).is_empty());
        for n in 2..=5 {
            for tree in tree_iter(n).unwrap() {
                for c in all_colorings(n - 1) {
                    let x = leaf_vector(&tree, &c);
                    let found = colorings_matching(&tree, &x, Some(c.root));
                    assert_eq!(found, vec![c.clone()], "unique inverse");
                }
            }
        }
    }

    #[test]
    fn frozen_coloring_examples() {
        let lc = frozen_coloring(&t("((x1x2)x3)"));
        assert_eq!(lc, coloring('K', "+-"));
        assert_eq!(leaf_vector(&t("((x1x2)x3)"), &lc), lv("KJJ"));
        let rc = frozen_coloring(&t("(x1(x2x3))"));
        assert_eq!(rc, coloring('K', "+-"));
        assert_eq!(leaf_vector(&t("(x1(x2x3))"), &rc), lv("IIK"));
    }

    #[test]
    fn sharp_solutions_n3() {
        let sols = sharp_solutions(&t("((x1x2)x3)"), &t("(x1(x2x3))"));
        assert!(sols.contains(&lv("JIJ")));
        assert!(!sols.contains(&lv("IIJ")));
        assert_eq!(sols.len() % 3, 0, "cyclic relabeling acts freely");
        let sorted = {
            let mut s = sols.clone();
            s.sort();
            s
        };
        assert_eq!(sols, sorted, "deterministic lexicographic order");
    }

    #[test]
    fn sharp_solution_count_divisible_by_3() {
        for n in 2..=5 {
            let trees: Vec<Tree> = tree_iter(n).unwrap().collect();
            for l in &trees {
                for r in &trees {
                    let sols = sharp_solutions(l, r);
                    assert_eq!(sols.len() % 3, 0, "{l} = {r}");
                    for x in &sols {
                        assert!(sols.contains(&x.cycled(1)));
                    }
                }
            }
        }
    }

    #[test]
    fn cyclic_relabeling_commutes_with_propagation() {
        // root fixed to K is justified by this symmetry
        for n in 2..=5 {
            for tree in tree_iter(n).unwrap() {
                for c in all_colorings(n - 1) {
                    let shifted = Coloring::new(c.root.next(), c.signs.clone());
                    let a: Vec<Color> = edge_colors(&tree, &c).iter().map(|x| x.next()).collect();
                    let b = edge_colors(&tree, &shifted);
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn coloring_json_shape() {
        let c = coloring('K', "+-");
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"root":"K","signs":"+-"}"#
        );
        let back: Coloring = serde_json::from_str(r#"{"root":"K","signs":"+-"}"#).unwrap();
        assert_eq!(back, c);
    }
}
