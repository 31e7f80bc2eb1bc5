use std::fmt::Write;

use super::{BroadcastNetwork, Partition};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering. Each hyperedge becomes a point node `he_<id>` with an
/// arc from the tail and arcs to every head. Partition classes become
/// clusters; families become labelled (non-cluster) subgraphs since they may
/// overlap.
pub fn export_dot(net: &BroadcastNetwork, p: Option<&Partition>) -> String {
    let mut s = String::new();
    s.push_str("digraph network {\n  compound=true;\n  node [shape=circle];\n");
    match p.filter(|p| p.len() == net.num_vertices()) {
        Some(p) => {
            for (c, members) in p.classes().iter().enumerate() {
                let _ = writeln!(s, "  subgraph cluster_p{c} {{\n    label=\"P{}\";\n    style=dashed;", c + 1);
                for &v in members {
                    let _ = writeln!(s, "    {};", quote(&net.vertices()[v]));
                }
                s.push_str("  }\n");
            }
        }
        None => {
            for v in net.vertices() {
                let _ = writeln!(s, "  {};", quote(v));
            }
        }
    }
    for f in net.families() {
        let _ = writeln!(s, "  subgraph {} {{\n    label={};", quote(&format!("family_{}", f.id)), quote(&f.id));
        for m in &f.members {
            let _ = writeln!(s, "    {} [xlabel={}];", quote(m), quote(&f.id));
        }
        s.push_str("  }\n");
    }
    for e in net.edges() {
        let he = quote(&format!("he_{}", e.id));
        let _ = writeln!(s, "  {he} [shape=point, xlabel={}];", quote(&format!("{} x{}", e.id, e.avg_uses)));
        let _ = writeln!(s, "  {} -> {he} [arrowhead=none];", quote(&e.tail));
        for h in &e.heads {
            let _ = writeln!(s, "  {he} -> {};", quote(h));
        }
    }
    s.push_str("}\n");
    s
}
