//! Combinatorics of Tait edge 3-colorings on tied binary trees.
//!
//! Trees with n ordered leaves are bracketed products; gluing two of them
//! leaf to leaf and root to root yields a cubic planar bridgeless map
//! whose proper 3-edge-colorings correspond to sharp solutions of L = R
//! under the vector cross product (equivalently Klein four-group products
//! that never hit the identity). Rotating brackets walks the rotation
//! graph, and a rotation is admissible for a coloring when its two
//! participating vertices carry equal signs; admissible walks preserve
//! the coloring properness, leaf colors, and root color.
//!
//! The crate provides the tree/bracket layer ([`tree`],
//! [`triangulation`]), the color and sign algebra ([`algebra`]), tied-map
//! construction and Tait coloring search ([`tying`]), the rotation graph
//! ([`gamma`]), admissible dynamics with constructive and exhaustive
//! searches ([`dynamics`]), brute-force cross-checks ([`verify`]), and
//! DOT exports ([`dot`]). Everything is deterministic: enumeration
//! orders, search tie-breaking, and report layouts are pinned so repeated
//! runs are byte-identical.

pub mod algebra;
pub mod dot;
pub mod dynamics;
pub mod gamma;
pub mod tree;
pub mod triangulation;
pub mod tying;
pub mod verify;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("{what} {n} exceeds the supported cap {cap}")]
    Cap {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error(
        "invalid move site {site} (tree has {internal} internal vertices; sites are 1..{internal})"
    )]
    InvalidSite { site: usize, internal: usize },

    #[error("invalid diagonal set: {0}")]
    InvalidDiagonals(String),

    #[error("invalid block parameter k={k} for n={n}")]
    InvalidBlock { n: usize, k: usize },

    #[error("leaf count mismatch: {left} vs {right} (need matching counts, n >= 2)")]
    LeafMismatch { left: usize, right: usize },

    #[error("{0} requires standard trees (labels x1..xn in order)")]
    NonStandard(&'static str),

    #[error("'{0}' is not a color (expected I, J, or K)")]
    BadColor(char),

    #[error("'{0}' is not a sign (expected + or -)")]
    BadSign(char),

    #[error("sign vector length {got} does not match {expected} internal vertices")]
    SignLength { expected: usize, got: usize },

    #[error("move at site {site} is not admissible (participant signs differ)")]
    Inadmissible { site: usize },

    #[error("lazy coloring clash: both participants already colored with opposite signs")]
    LazyColoringClash,

    #[error("path broke the leaf-vector invariant")]
    PathInvariantBroken,

    #[error("not a cubic map: {0}")]
    NotCubic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use algebra::{
    all_colorings, all_leaf_vectors, colorings_matching, cross_mul, edge_colors, evaluate_cross,
    evaluate_klein_sharp, frozen_coloring, klein_mul, leaf_vector, sharp_solutions, Color,
    Coloring, KleinElem, LeafVector, Sign, SignedVec,
};
pub use dynamics::{
    admissible_path, admissible_path_search, admissible_sites, apply_admissible, block_comb_path,
    comb_path, factorized_path, frozen_state, frozen_witness_search, geodesic_admissibility_report,
    is_admissible, mirror_comb_path, pair_witness, state_components, verify_conjecture,
    verify_frozen, AdmissiblePath, ConjectureReport, FrozenReport, FrozenWitness, GeodesicReport,
    State, StateComponents, StateSpace,
};
pub use gamma::{build_gamma, girth_report, rotation_distance, GirthReport, RotationGraph};
pub use tree::{catalan_g, catalan_g_u64, enumerate_trees, tree_iter, MoveSite, Tree};
pub use triangulation::{block_tree, Triangulation};
pub use tying::{
    coloring_correspondence, tait_colorings, tie, verify_sign_theorem, CorrespondenceReport,
    CubicMap, SignTheoremReport, TaitColoring, TiedMap,
};
pub use verify::{
    verify_admissibility_rule, verify_coloring_bijection, AdmissibilityRuleReport,
    ColoringBijectionReport,
};
