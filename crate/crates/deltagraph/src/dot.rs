//! Graphviz rendering of windows.

use std::fmt::Write as _;

use deltagraph_core::graph::TruncatedGraph;

fn quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// One node per vertex and one directed edge per edge, in index order.
///
/// The basepoint is drawn as a double circle labelled `*`; boundary vertices
/// are dashed. Edge labels are weight texts.
pub fn export_dot(g: &TruncatedGraph) -> String {
    let mut out = String::from("digraph delta {\n  node [shape=circle];\n");
    for v in 0..g.vertex_count() {
        let mut attrs = Vec::new();
        if v == g.basepoint() {
            attrs.push("label=\"*\"".to_string());
            attrs.push("peripheries=2".to_string());
            attrs.push(format!("tooltip={}", quoted(g.vertex_label(v))));
        } else {
            attrs.push(format!("label={}", quoted(g.vertex_label(v))));
        }
        if g.is_boundary(v) {
            attrs.push("style=dashed".to_string());
        }
        let _ = writeln!(out, "  v{v} [{}];", attrs.join(", "));
    }
    for e in g.edges() {
        let _ = writeln!(out, "  v{} -> v{} [label={}];", e.source, e.target, quoted(&e.weight.to_string()));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use deltagraph_core::builders::LatticeGraph;
    use deltagraph_core::graph::{ball, FiniteGraph};
    use deltagraph_core::weights::{Context, GeneratorContext};

    #[test]
    fn single_vertex() {
        let g = FiniteGraph::new(1.0, Context::empty(), vec!["o".into()], Vec::new(), 0).unwrap();
        let dot = export_dot(&TruncatedGraph::complete(g));
        assert_eq!(dot, "digraph delta {\n  node [shape=circle];\n  v0 [label=\"*\", peripheries=2, tooltip=\"o\"];\n}\n");
    }

    #[test]
    fn chain_radius_one() {
        let ctx = GeneratorContext::new([("q", 2.0)]).unwrap().into_shared();
        let g = LatticeGraph::single_chain(&ctx, "q").unwrap();
        let dot = export_dot(&ball(&g, 1).unwrap());
        assert_eq!(dot.matches("[label=").count(), 3 + 4);
        let mut labels: Vec<&str> = dot.lines().filter(|l| l.contains("->")).map(|l| l.split('"').nth(1).unwrap()).collect();
        labels.sort();
        assert_eq!(labels, ["q", "q", "q^-1", "q^-1"]);
        assert_eq!(dot.matches("style=dashed").count(), 2);
        assert_eq!(dot, export_dot(&ball(&g, 1).unwrap()));
    }
}
