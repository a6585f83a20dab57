//! Polygon triangulations: the (n+1)-gon view of trees, diagonal flips,
//! fan triangulations, and polygon rotation.
//!
//! Polygon vertices are 0..=n. Side k (k = 1..n) joins k-1 and k and
//! carries x_k; the root side joins 0 and n. A subtree spanning leaves
//! i..j corresponds to the chord (i-1, j); internal tree edges are the
//! n-2 diagonals, and each internal vertex is a triangle.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::tree::{MoveSite, Tree};
use crate::{Error, Result};

/// A chord of the polygon, endpoints sorted ascending.
pub type Chord = (usize, usize);

/// A maximal set of pairwise non-crossing diagonals of the (n+1)-gon.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Triangulation {
    /// Leaf count of the corresponding tree; the polygon has n+1 vertices.
    pub n: usize,
    /// The n-2 diagonals, sorted.
    pub diagonals: BTreeSet<Chord>,
}

fn crossing(a: Chord, b: Chord) -> bool {
    let (p, q) = a;
    let (r, s) = b;
    (p < r && r < q && q < s) || (r < p && p < s && s < q)
}

impl Triangulation {
    /// Validates the diagonal set: count, range, and non-crossing.
    pub fn new(n: usize, diagonals: BTreeSet<Chord>) -> Result<Triangulation> {
        if n < 2 {
            return Err(Error::InvalidDiagonals(
                "polygon needs at least 3 sides".into(),
            ));
        }
        if diagonals.len() != n - 2 {
            return Err(Error::InvalidDiagonals(format!(
                "expected {} diagonals, got {}",
                n - 2,
                diagonals.len()
            )));
        }
        for &(a, b) in &diagonals {
            let ok = b > a + 1 && b <= n && !(a == 0 && b == n);
            if !ok {
                return Err(Error::InvalidDiagonals(format!(
                    "({a},{b}) is not a diagonal"
                )));
            }
        }
        let ds: Vec<Chord> = diagonals.iter().copied().collect();
        for i in 0..ds.len() {
            for j in i + 1..ds.len() {
                if crossing(ds[i], ds[j]) {
                    return Err(Error::InvalidDiagonals(format!(
                        "({},{}) crosses ({},{})",
                        ds[i].0, ds[i].1, ds[j].0, ds[j].1
                    )));
                }
            }
        }
        Ok(Triangulation { n, diagonals })
    }

    pub fn from_tree(t: &Tree) -> Triangulation {
        let n = t.leaf_count();
        let mut diagonals = BTreeSet::new();
        for (idx, &(a, _, b)) in vertex_triangles(t).iter().enumerate() {
            if idx > 0 {
                diagonals.insert((a, b));
            }
        }
        Triangulation { n, diagonals }
    }

    /// True if (a,b) is a polygon side, the root side, or a diagonal.
    fn present(&self, a: usize, b: usize) -> bool {
        b == a + 1 || (a == 0 && b == self.n) || self.diagonals.contains(&(a, b))
    }

    /// Rebuild the tree. Fails if the diagonal set does not triangulate.
    pub fn to_tree(&self) -> Result<Tree> {
        fn build(tr: &Triangulation, a: usize, b: usize) -> Result<Tree> {
            if b == a + 1 {
                return Ok(Tree::Leaf(b as u32));
            }
            let apexes: Vec<usize> = (a + 1..b)
                .filter(|&m| tr.present(a, m) && tr.present(m, b))
                .collect();
            match apexes.as_slice() {
                [m] => Ok(Tree::node(build(tr, a, *m)?, build(tr, *m, b)?)),
                [] => Err(Error::InvalidDiagonals(format!(
                    "no triangle on chord ({a},{b})"
                ))),
                _ => Err(Error::InvalidDiagonals(format!(
                    "ambiguous triangles on chord ({a},{b})"
                ))),
            }
        }
        build(self, 0, self.n)
    }

    /// All n-1 triangles, each as an ascending vertex triple.
    pub fn triangles(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for m in a + 1..=self.n {
                if !self.present(a, m) {
                    continue;
                }
                for b in m + 1..=self.n {
                    if self.present(m, b) && self.present(a, b) {
                        // interior check: (a,b) spans exactly the union
                        // of (a,m),(m,b) with nothing crossing handled by
                        // maximality; every edge triple that closes up is
                        // a face here because diagonals are non-crossing
                        out.push((a, m, b));
                    }
                }
            }
        }
        out
    }

    /// Flip a diagonal inside its quadrangle. Returns the new triangulation
    /// and the newly created diagonal.
    pub fn flip(&self, d: Chord) -> Result<(Triangulation, Chord)> {
        if !self.diagonals.contains(&d) {
            return Err(Error::InvalidDiagonals(format!(
                "({},{}) is not a diagonal of this triangulation",
                d.0, d.1
            )));
        }
        let incident: Vec<(usize, usize, usize)> = self
            .triangles()
            .into_iter()
            .filter(|&(a, m, b)| (a, m) == d || (m, b) == d || (a, b) == d)
            .collect();
        debug_assert_eq!(incident.len(), 2, "a diagonal bounds exactly two triangles");
        let apex = |t: (usize, usize, usize)| -> usize {
            let (a, m, b) = t;
            if (a, m) == d {
                b
            } else if (m, b) == d {
                a
            } else {
                m
            }
        };
        let c1 = apex(incident[0]);
        let c2 = apex(incident[1]);
        let new_d = (c1.min(c2), c1.max(c2));
        let mut diagonals = self.diagonals.clone();
        diagonals.remove(&d);
        diagonals.insert(new_d);
        Ok((
            Triangulation {
                n: self.n,
                diagonals,
            },
            new_d,
        ))
    }

    /// Relabel polygon vertices so that vertex k becomes vertex 0.
    pub fn rotated(&self, k: usize) -> Triangulation {
        let m = self.n + 1;
        let map = |v: usize| (v + m - k % m) % m;
        let diagonals = self
            .diagonals
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (map(a), map(b));
                (x.min(y), x.max(y))
            })
            .collect();
        Triangulation {
            n: self.n,
            diagonals,
        }
    }

    /// Diagonals shared with another triangulation of the same polygon.
    pub fn shared_diagonals(&self, other: &Triangulation) -> Vec<Chord> {
        self.diagonals
            .intersection(&other.diagonals)
            .copied()
            .collect()
    }
}

/// Per internal vertex (internal preorder order): its triangle as polygon
/// vertices (span start - 1, split point, span end).
pub fn vertex_triangles(t: &Tree) -> Vec<(usize, usize, usize)> {
    fn walk(t: &Tree, start: usize, out: &mut Vec<(usize, usize, usize)>) -> usize {
        match t {
            Tree::Leaf(_) => start + 1,
            Tree::Node(l, r) => {
                let slot = out.len();
                out.push((0, 0, 0));
                let mid = walk(l, start, out);
                let end = walk(r, mid, out);
                out[slot] = (start, mid, end);
                end
            }
        }
    }
    let mut out = Vec::with_capacity(t.internal_count());
    walk(t, 0, &mut out);
    out
}

/// The diagonal that `site` flips: the chord of the site's child vertex.
pub fn site_diagonal(t: &Tree, site: MoveSite) -> Result<Chord> {
    let tri = vertex_triangles(t);
    if site.0 == 0 || site.0 >= tri.len() {
        return Err(Error::InvalidSite {
            site: site.0,
            internal: tri.len(),
        });
    }
    let (a, _, b) = tri[site.0];
    Ok((a, b))
}

/// Inverse of `site_diagonal`.
pub fn diagonal_site(t: &Tree, d: Chord) -> Option<MoveSite> {
    vertex_triangles(t)
        .iter()
        .enumerate()
        .skip(1)
        .find(|&(_, &(a, _, b))| (a, b) == d)
        .map(|(i, _)| MoveSite(i))
}

/// The fan triangulation with all diagonals incident to `apex`.
pub fn fan_triangulation(n: usize, apex: usize) -> Triangulation {
    assert!(apex <= n);
    let mut diagonals = BTreeSet::new();
    for v in 0..=n {
        let (a, b) = (apex.min(v), apex.max(v));
        if b > a + 1 && b <= n && !(a == 0 && b == n) {
            diagonals.insert((a, b));
        }
    }
    Triangulation { n, diagonals }
}

/// The block tree with a rightmost-bracketed block on x1..xk times a
/// leftmost-bracketed block on x_{k+1}..xn: the fan from polygon vertex k.
/// k = 0 gives the left comb, k = n the right comb.
pub fn block_tree(n: usize, k: usize) -> Result<Tree> {
    if k > n || n < 2 {
        return Err(Error::InvalidBlock { n, k });
    }
    fan_triangulation(n, k).to_tree()
}
