//! DOT emission for branching-system automata: one node per state labeled
//! with its identifier, edges labeled 0/1. Output is deterministic because
//! states are canonically numbered and edges are emitted 0 before 1.

use crate::treeset::TreeAutomaton;

pub fn to_dot(t: &TreeAutomaton) -> String {
    let mut out = String::from("digraph branching_system {\n");
    out.push_str("  rankdir=TB;\n");
    for q in t.states() {
        out.push_str(&format!("  q{q} [shape=circle label=\"q{q}\"];\n"));
    }
    for q in t.states() {
        for bit in 0u8..2 {
            if let Some(c) = t.child(q, bit) {
                out.push_str(&format!("  q{q} -> q{c} [label=\"{bit}\"];\n"));
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_interval_dot() {
        let dot = to_dot(&TreeAutomaton::full());
        assert_eq!(
            dot,
            "digraph branching_system {\n  rankdir=TB;\n  q0 [shape=circle label=\"q0\"];\n  q0 -> q0 [label=\"0\"];\n  q0 -> q0 [label=\"1\"];\n}\n"
        );
    }

    #[test]
    fn empty_dot_has_no_nodes() {
        let dot = to_dot(&TreeAutomaton::empty());
        assert_eq!(dot, "digraph branching_system {\n  rankdir=TB;\n}\n");
    }
}
