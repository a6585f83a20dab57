//! Graphviz DOT exports with deterministic vertex and edge order.

use std::fmt::Write;

use crate::algebra::Color;
use crate::dynamics::{StateComponents, StateSpace};
use crate::gamma::RotationGraph;
use crate::tying::{TaitColoring, TiedMap};

/// The rotation graph, vertices labeled by bracket strings.
pub fn gamma_dot(g: &RotationGraph) -> String {
    let mut out = String::new();
    writeln!(out, "graph gamma_{} {{", g.n).unwrap();
    writeln!(out, "  node [shape=box, fontname=\"monospace\"];").unwrap();
    for (i, tree) in g.trees.iter().enumerate() {
        writeln!(out, "  t{i} [label=\"{tree}\"];").unwrap();
    }
    for (i, adj) in g.adj.iter().enumerate() {
        for &(site, j) in adj {
            if (i as u32) < j {
                writeln!(out, "  t{i} -- t{j} [label=\"{site}\"];").unwrap();
            }
        }
    }
    writeln!(out, "}}").unwrap();
    out
}

/// The admissible state graph, nodes filled by connected component.
pub fn stategraph_dot(space: &StateSpace, comps: &StateComponents) -> String {
    let mut out = String::new();
    writeln!(out, "graph states_{} {{", space.n).unwrap();
    writeln!(
        out,
        "  node [shape=box, fontname=\"monospace\", style=filled, colorscheme=set312];"
    )
    .unwrap();
    for rank in 0..space.tree_count() as u32 {
        for bits in 0..space.sign_vectors() {
            let id = space.pack(rank, bits);
            let st = space.state(rank, bits);
            let comp = comps.component_of[id as usize];
            writeln!(
                out,
                "  s{id} [label=\"{}\\n{}\", fillcolor={}];",
                st.tree,
                st.signs_string(),
                comp % 12 + 1
            )
            .unwrap();
        }
    }
    for rank in 0..space.tree_count() as u32 {
        for bits in 0..space.sign_vectors() {
            let id = space.pack(rank, bits);
            for (site, nr, nb) in space.neighbors(rank, bits) {
                let nid = space.pack(nr, nb);
                if id < nid {
                    writeln!(out, "  s{id} -- s{nid} [label=\"{site}\"];").unwrap();
                }
            }
        }
    }
    writeln!(out, "}}").unwrap();
    out
}

fn dot_color(c: Color) -> &'static str {
    match c {
        Color::I => "red",
        Color::J => "green3",
        Color::K => "blue",
    }
}

/// A tied map; with a Tait coloring, edges carry its colors.
pub fn tiedmap_dot(map: &TiedMap, coloring: Option<&TaitColoring>) -> String {
    let n = map.n;
    let mut out = String::new();
    writeln!(out, "graph tied {{").unwrap();
    writeln!(out, "  node [shape=point];").unwrap();
    for v in 0..map.graph.vertex_count {
        let (side, idx) = if v < n - 1 {
            ("L", v)
        } else {
            ("R", v - (n - 1))
        };
        writeln!(out, "  v{v} [xlabel=\"{side}{idx}\"];").unwrap();
    }
    for (id, &(a, b)) in map.graph.edges.iter().enumerate() {
        let label = &map.labels[id];
        match coloring {
            Some(c) => writeln!(
                out,
                "  v{a} -- v{b} [label=\"{label}:{}\", color={}];",
                c.0[id].as_char(),
                dot_color(c.0[id])
            )
            .unwrap(),
            None => writeln!(out, "  v{a} -- v{b} [label=\"{label}\"];").unwrap(),
        }
    }
    writeln!(out, "}}").unwrap();
    out
}
