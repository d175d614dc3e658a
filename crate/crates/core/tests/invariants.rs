//! Cross-module invariants: automaton cross-sections against the structural
//! oracle, cross-section algebra of union and intersection, and the
//! fixpoint behaviour of the finite derivative.

use cbtree::{
    brute_derivative, brute_member, build, parse_description, truncate, BinaryWord, DyadicInterval,
    SetDescription, TreeAutomaton,
};

fn module_corpus() -> Vec<SetDescription> {
    [
        "(full)",
        "(empty)",
        "(point 0/2^0)",
        "(point 1/2^1)",
        "(point 5/2^4)",
        "(escale)",
        "(avoid 11)",
        "(avoid 00)",
        "(rational 1 3)",
        "(interval 1/2^2 3/2^2)",
        "(union (interval 0/2^0 1/2^2) (point 1/2^1))",
        "(intersect (escale) (interval 0/2^0 1/2^2))",
    ]
    .iter()
    .map(|s| parse_description(s).unwrap())
    .collect()
}

/// Walks the oracle-present tree, asserting that node membership in the
/// automaton agrees with the interval-arithmetic decision everywhere. Words
/// below an absent node are absent on both sides by prefix monotonicity.
fn assert_sound_to_depth(desc: &SetDescription, t: &TreeAutomaton, depth: usize) {
    let mut frontier = vec![BinaryWord::empty()];
    for _ in 0..=depth {
        let mut next = Vec::new();
        for w in frontier {
            let by_tree = t.member_node(&w);
            let by_oracle = brute_member(desc, &DyadicInterval::from_word(&w));
            assert_eq!(by_tree, by_oracle, "{desc}: membership of {w} differs");
            if by_tree && w.len() < depth {
                next.push(w.child(0));
                next.push(w.child(1));
            }
        }
        frontier = next;
    }
}

#[test]
fn branch_sets_are_sound_to_depth_14() {
    for desc in module_corpus() {
        let t = build(&desc).unwrap();
        assert_sound_to_depth(&desc, &t, 14);
    }
}

#[test]
fn union_commutes_with_cross_sections() {
    let corpus = module_corpus();
    for a in &corpus {
        for b in &corpus {
            let ta = build(a).unwrap();
            let tb = build(b).unwrap();
            let joined = ta.union(&tb);
            for depth in [0, 3, 8, 12] {
                let mut expected: Vec<_> = ta
                    .nodes_at_depth(depth)
                    .indices()
                    .iter()
                    .cloned()
                    .chain(tb.nodes_at_depth(depth).indices().iter().cloned())
                    .collect();
                expected.sort();
                expected.dedup();
                assert_eq!(
                    joined.nodes_at_depth(depth).indices(),
                    &expected[..],
                    "union of {a} and {b} at depth {depth}"
                );
            }
        }
    }
}

#[test]
fn intersection_cross_sections_shrink_and_resolve() {
    // node-wise products may overapproximate at touching points, but six
    // extra levels resolve every corpus pair
    let pairs = [
        ("(interval 0/2^0 1/2^1)", "(interval 1/2^1 1/2^0)"),
        ("(escale)", "(interval 0/2^0 1/2^2)"),
        ("(avoid 11)", "(avoid 00)"),
        ("(avoid 11)", "(interval 1/2^2 3/2^2)"),
        ("(point 0/2^0)", "(point 1/2^0)"),
        ("(avoid 101)", "(escale)"),
    ];
    for (sa, sb) in pairs {
        let a = parse_description(sa).unwrap();
        let b = parse_description(sb).unwrap();
        let ta = build(&a).unwrap();
        let tb = build(&b).unwrap();
        let meet = ta.intersect(&tb);
        for depth in [2, 6, 12] {
            let section = meet.nodes_at_depth(depth);
            let sa_section = ta.nodes_at_depth(depth);
            let sb_section = tb.nodes_at_depth(depth);
            // containment at the same depth
            for index in section.indices() {
                assert!(sa_section.contains_index(index), "{sa} & {sb} at {depth}");
                assert!(sb_section.contains_index(index), "{sa} & {sb} at {depth}");
            }
            // equality against the deep joint cross-section projected up
            let deep_a = ta.nodes_at_depth(depth + 6);
            let deep_b = tb.nodes_at_depth(depth + 6);
            let mut projected: Vec<_> = deep_a
                .indices()
                .iter()
                .filter(|i| deep_b.contains_index(i))
                .map(|i| i.clone() >> 6)
                .collect();
            projected.sort();
            projected.dedup();
            assert_eq!(
                section.indices(),
                &projected[..],
                "{sa} & {sb}: deep cross-sections disagree at depth {depth}"
            );
        }
    }
}

#[test]
fn derivative_is_shrinking_and_fixes_fixpoints() {
    for desc in module_corpus() {
        let t = build(&desc).unwrap();
        let f = truncate(&t, 10);
        let d = brute_derivative(&f);
        assert!(d.nodes().is_subset(f.nodes()), "{desc}: derivative grew");
    }
    // the two finite-depth fixpoints
    let full = truncate(&TreeAutomaton::full(), 6);
    assert_eq!(brute_derivative(&full), full);
    let empty = truncate(&TreeAutomaton::empty(), 6);
    assert_eq!(brute_derivative(&empty), empty);
}

#[test]
fn rebuilding_a_description_is_byte_stable() {
    for desc in module_corpus() {
        let first = build(&desc).unwrap();
        let second = build(&desc).unwrap();
        assert_eq!(first, second);
        let rendered: SetDescription = parse_description(&desc.to_string()).unwrap();
        assert_eq!(build(&rendered).unwrap(), first);
    }
}
