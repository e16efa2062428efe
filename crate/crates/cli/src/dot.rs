//! Hasse diagrams in Graphviz DOT.

use finspace::poset::Poset;
use finspace::reduction::DismantlingTrace;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' | '\\' => {
                out.push('\\');
                out.push(ch);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out.push('"');
    out
}

/// One node per element and one edge per cover, drawn upward from the
/// covered element. With a trace, removed elements are grayed and labelled
/// with the step that removed them and where they went.
pub fn emit_dot(name: &str, p: &Poset, trace: Option<&DismantlingTrace>) -> String {
    let mut removed_by: Vec<Option<(usize, usize)>> = vec![None; p.len()];
    if let Some(t) = trace {
        for (k, step) in t.steps.iter().enumerate() {
            for &(x, target) in &step.targets {
                if step.removed.contains(x) {
                    removed_by[x] = Some((k + 1, target));
                }
            }
        }
    }
    let mut out = format!(
        "digraph {} {{\n  rankdir=BT;\n  node [shape=ellipse];\n",
        quote(name)
    );
    for x in 0..p.len() {
        match removed_by[x] {
            Some((step, target)) => out.push_str(&format!(
                "  n{x} [label={}, style=\"filled,dashed\", fillcolor=gray85, fontcolor=gray40, xlabel={}];\n",
                quote(p.label(x)),
                quote(&format!("{step}: → {}", p.label(target)))
            )),
            None => out.push_str(&format!("  n{x} [label={}];\n", quote(p.label(x)))),
        }
    }
    for &(a, b) in p.covers() {
        out.push_str(&format!("  n{a} -> n{b};\n"));
    }
    out.push_str("}\n");
    out
}
