//! Independent brute-force reference implementations at bounded depth.
//!
//! Nothing here touches the automaton construction paths it is used to check:
//! membership is decided structurally on descriptions with exact rational
//! arithmetic, and the finite-tree derivative works on explicit node sets.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dyadic::{BinaryWord, DyadicInterval, UltimatelyPeriodic};
use crate::treeset::{SetDescription, TreeAutomaton};

/// Depth band eaten by one truncated derivative pass. Corpus automata keep
/// every forced path to a split strictly shorter than this, so any split
/// relevant to a node at depth `k` is visible by depth `k + SAFE_BAND_MARGIN`
/// even one level into the band. Asserted against the corpus by the
/// acceptance suite, not assumed.
pub const SAFE_BAND_MARGIN: usize = 4;

/// An explicit truncation of a branching system: a prefix-closed set of words
/// of length at most `depth`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteTree {
    depth: usize,
    nodes: BTreeSet<BinaryWord>,
}

impl FiniteTree {
    pub fn new(depth: usize, nodes: BTreeSet<BinaryWord>) -> Self {
        debug_assert!(nodes.iter().all(|w| w.len() <= depth));
        debug_assert!(
            nodes
                .iter()
                .all(|w| w.parent().is_none_or(|p| nodes.contains(&p))),
            "node set must be prefix-closed"
        );
        FiniteTree { depth, nodes }
    }

    pub fn empty(depth: usize) -> Self {
        FiniteTree {
            depth,
            nodes: BTreeSet::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn nodes(&self) -> &BTreeSet<BinaryWord> {
        &self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, w: &BinaryWord) -> bool {
        self.nodes.contains(w)
    }

    /// All nodes of length at most `limit`.
    pub fn restricted_to(&self, limit: usize) -> BTreeSet<BinaryWord> {
        self.nodes
            .iter()
            .filter(|w| w.len() <= limit)
            .cloned()
            .collect()
    }
}

/// All words of length at most `depth` accepted by the automaton.
pub fn truncate(t: &TreeAutomaton, depth: usize) -> FiniteTree {
    let mut nodes = BTreeSet::new();
    if t.is_empty() {
        return FiniteTree::empty(depth);
    }
    let mut frontier: Vec<(BinaryWord, usize)> = vec![(BinaryWord::empty(), 0)];
    nodes.insert(BinaryWord::empty());
    for _ in 0..depth {
        let mut next = Vec::new();
        for (word, q) in frontier {
            for b in 0u8..2 {
                if let Some(c) = t.child(q, b) {
                    let w = word.child(b);
                    nodes.insert(w.clone());
                    next.push((w, c));
                }
            }
        }
        frontier = next;
    }
    FiniteTree { depth, nodes }
}

/// One finite-depth derivative pass. A node below the maximal depth is
/// condemned when its subtree within the tree contains no node with two
/// children; maximal-depth nodes carry no evidence either way and survive
/// with their parent. Prefix closure is then restored, and childless nodes
/// strictly above the boundary band disappear — childlessness within
/// `SAFE_BAND_MARGIN` of the maximal depth may be a truncation artifact and
/// is tolerated.
pub fn brute_derivative(f: &FiniteTree) -> FiniteTree {
    let nodes = &f.nodes;
    let mut by_depth: Vec<Vec<&BinaryWord>> = vec![Vec::new(); f.depth + 1];
    for w in nodes {
        by_depth[w.len()].push(w);
    }
    // has_split: the subtree of w within f, including w, has a 2-child node
    let mut has_split: BTreeSet<&BinaryWord> = BTreeSet::new();
    for level in (0..=f.depth).rev() {
        for &w in &by_depth[level] {
            let c0 = w.child(0);
            let c1 = w.child(1);
            let own_split = nodes.contains(&c0) && nodes.contains(&c1);
            let inherited = has_split.contains(&c0) || has_split.contains(&c1);
            if own_split || inherited {
                has_split.insert(w);
            }
        }
    }
    // top-down: survive iff the parent survives and the node is either at
    // the horizon or has a split below
    let mut kept: BTreeSet<BinaryWord> = BTreeSet::new();
    for level_nodes in &by_depth {
        for &w in level_nodes {
            let parent_ok = w.parent().is_none_or(|p| kept.contains(&p));
            if !parent_ok {
                continue;
            }
            if w.len() == f.depth || has_split.contains(w) {
                kept.insert(w.clone());
            }
        }
    }
    // cascade down to the band edge inclusive: a band-edge node's children
    // still see their nearest split within the horizon (forced distances are
    // strictly below the margin), so their condemnations are sound
    let cascade_limit = f.depth.saturating_sub(SAFE_BAND_MARGIN);
    loop {
        let doomed: Vec<BinaryWord> = kept
            .iter()
            .filter(|w| {
                w.len() <= cascade_limit
                    && w.len() < f.depth
                    && !kept.contains(&w.child(0))
                    && !kept.contains(&w.child(1))
            })
            .cloned()
            .collect();
        if doomed.is_empty() {
            break;
        }
        for w in doomed {
            kept.remove(&w);
        }
    }
    FiniteTree {
        depth: f.depth,
        nodes: kept,
    }
}

// ---------------- exact structural membership ----------------

/// Safety automaton used only by the oracle: a total-enough partial DFA whose
/// every state has at least one outgoing edge and an infinite continuation.
struct OracleDfa {
    states: Vec<[Option<usize>; 2]>,
}

impl OracleDfa {
    /// Words whose every odd-position digit is 0.
    fn even_positions_only() -> Self {
        OracleDfa {
            states: vec![[Some(1), None], [Some(0), Some(0)]],
        }
    }

    /// Words avoiding `pattern` as a factor. States are the proper prefixes
    /// of the pattern, transitions computed from the definition (the longest
    /// suffix of `state + bit` that is a prefix of the pattern) by direct
    /// string comparison — independent of the automaton-side construction.
    fn avoiding(pattern: &BinaryWord) -> Self {
        let m = pattern.len();
        let bits: Vec<u8> = pattern.bits().collect();
        let longest_prefix_suffix = |word: &[u8]| -> usize {
            (0..=word.len().min(m))
                .rev()
                .find(|&k| word[word.len() - k..] == bits[..k])
                .expect("k = 0 always matches")
        };
        let states = (0..m)
            .map(|s| {
                let mut row = [None, None];
                for b in 0u8..2 {
                    let mut word = bits[..s].to_vec();
                    word.push(b);
                    let next = longest_prefix_suffix(&word);
                    if next < m {
                        row[b as usize] = Some(next);
                    }
                }
                row
            })
            .collect();
        OracleDfa { states }
    }

    fn step(&self, q: usize, b: u8) -> Option<usize> {
        self.states[q][b as usize]
    }

    /// The lexicographically least infinite run from `q`: prefer 0.
    fn min_tail(&self, q: usize) -> UltimatelyPeriodic {
        let mut digits = Vec::new();
        let mut visited: Vec<(usize, usize)> = Vec::new();
        let mut state = q;
        loop {
            if let Some(&(_, pos)) = visited.iter().find(|&&(s, _)| s == state) {
                let pre = BinaryWord::from_bits(digits[..pos].iter().copied());
                let per = BinaryWord::from_bits(digits[pos..].iter().copied());
                return UltimatelyPeriodic::new(pre, per);
            }
            visited.push((state, digits.len()));
            let (b, next) = if let Some(c) = self.step(state, 0) {
                (0u8, c)
            } else {
                (
                    1u8,
                    self.step(state, 1).expect("oracle DFA states have a child"),
                )
            };
            digits.push(b);
            state = next;
        }
    }

    /// The lexicographically least word of the language that is `>=` the
    /// given eventually periodic bound, or `None` when the whole language
    /// lies below it.
    fn lex_least_at_least(&self, bound: &UltimatelyPeriodic) -> Option<UltimatelyPeriodic> {
        let per_len = bound.period().len();
        let pre_len = bound.preperiod().len();
        let mut digits: Vec<u8> = Vec::new();
        let mut path: Vec<usize> = vec![0];
        // latest position where we could deviate upward and survive
        let mut fallback: Option<(usize, usize)> = None;
        let mut seen_phases: BTreeSet<(usize, usize)> = BTreeSet::new();
        loop {
            let i = digits.len();
            let q = *path.last().expect("path never empties");
            if i >= pre_len {
                let phase = (i - pre_len) % per_len;
                if !seen_phases.insert((q, phase)) {
                    // the bound itself runs forever: it is in the language
                    return Some(bound.clone());
                }
            }
            let b = bound.digit(i);
            if b == 0 && self.step(q, 1).is_some() {
                fallback = Some((i, q));
            }
            match self.step(q, b) {
                Some(next) => {
                    digits.push(b);
                    path.push(next);
                }
                None => {
                    // must leave the bound upward at the latest possible spot
                    let (j, qj) = fallback?;
                    let up = self.step(qj, 1).expect("fallback recorded a live 1-edge");
                    let mut pre = BinaryWord::from_bits(digits[..j].iter().copied());
                    pre.push(1);
                    let tail = self.min_tail(up);
                    let pre = pre.concat(tail.preperiod());
                    return Some(UltimatelyPeriodic::new(pre, tail.period().clone()));
                }
            }
        }
    }

    /// Least value of the language's value set that is `>= c`.
    fn min_value_at_least(&self, c: &BigRational) -> Option<BigRational> {
        let bound = UltimatelyPeriodic::least_expansion_of(c);
        self.lex_least_at_least(&bound).map(|w| w.value())
    }
}

/// Least point of the described closed set that is `>= c`, computed
/// structurally with exact rational arithmetic; `None` when the set has no
/// point above `c`.
///
/// Intersections iterate the children's minima to a common fixpoint; the
/// iteration is monotone and exact but capped, so descriptions must keep
/// their intersections convergent (interval clips and finite combinations
/// are; the cap is generous).
pub fn min_point_at_least(desc: &SetDescription, c: &BigRational) -> Option<BigRational> {
    let one = BigRational::one();
    match desc {
        SetDescription::Empty => None,
        SetDescription::Full => (c <= &one).then(|| c.clone().max(BigRational::zero())),
        SetDescription::Point(x) => {
            let v = x.to_rational();
            (&v >= c).then_some(v)
        }
        SetDescription::Interval(lo, hi) => {
            let lo = lo.to_rational();
            let hi = hi.to_rational();
            let candidate = lo.max(c.clone());
            (candidate <= hi).then_some(candidate)
        }
        SetDescription::Rational(p, q) => {
            let v = BigRational::new((*p).into(), (*q).into());
            (&v >= c).then_some(v)
        }
        SetDescription::EScale => OracleDfa::even_positions_only().min_value_at_least(c),
        SetDescription::Avoid(pattern) => OracleDfa::avoiding(pattern).min_value_at_least(c),
        SetDescription::Union(items) => items.iter().filter_map(|d| min_point_at_least(d, c)).min(),
        SetDescription::Intersect(items) => {
            const ITERATION_CAP: usize = 256;
            let mut current = c.clone();
            for _ in 0..ITERATION_CAP {
                let minima: Option<Vec<BigRational>> = items
                    .iter()
                    .map(|d| min_point_at_least(d, &current))
                    .collect();
                let minima = minima?;
                let max = minima.iter().max().expect("validated nonempty").clone();
                if minima.iter().all(|m| *m == max) {
                    return Some(max);
                }
                current = max;
            }
            panic!("intersection minimum did not converge; keep corpus intersections simple");
        }
    }
}

/// Exact decision whether the described closed set meets the closed interval,
/// with no automaton involved.
pub fn brute_member(desc: &SetDescription, iv: &DyadicInterval) -> bool {
    match min_point_at_least(desc, &iv.lower_rational()) {
        Some(m) => m <= iv.upper_rational(),
        None => false,
    }
}

/// Iterated truncated derivative. Each pass costs one band of reliability,
/// so after a changing pass the tree is re-truncated `SAFE_BAND_MARGIN`
/// shallower before the next one; iteration stops at an unchanged pass, an
/// empty tree, or an exhausted depth. Returns the final tree and the number
/// of changing passes.
fn iterate_truncated_derivative(t: &TreeAutomaton, depth: usize) -> (FiniteTree, usize) {
    let mut f = truncate(t, depth);
    let mut passes = 0;
    loop {
        let next = brute_derivative(&f);
        if next == f {
            return (f, passes);
        }
        passes += 1;
        if next.is_empty() {
            return (next, passes);
        }
        if next.depth() < SAFE_BAND_MARGIN {
            return (next, passes);
        }
        let shallower = next.depth() - SAFE_BAND_MARGIN;
        f = FiniteTree::new(shallower, next.restricted_to(shallower));
    }
}

/// The oracle's side of the classify cross-check: does the iterated
/// truncated derivative empty out? A bounded estimate, exact for sets whose
/// rank fits in the available depth.
pub fn truncated_verdict_is_countable(t: &TreeAutomaton, depth: usize) -> bool {
    iterate_truncated_derivative(t, depth).0.is_empty()
}

/// Number of changing truncated derivative passes; for sets of small rank
/// this equals the pruning rank.
pub fn truncated_rank(t: &TreeAutomaton, depth: usize) -> usize {
    iterate_truncated_derivative(t, depth).1
}

/// The iterated truncated derivative, packaged for callers that need the
/// surviving tree as well: `(final tree, changing passes)`.
pub fn truncated_kernel_estimate(t: &TreeAutomaton, depth: usize) -> (FiniteTree, usize) {
    iterate_truncated_derivative(t, depth)
}

/// Wraps a finite tree as an automaton by closing every maximal-depth node
/// into a full cylinder (both children looping). An over-approximation of
/// whatever infinite tree the finite one was truncated from; used only to
/// report depth-truncated kernels.
pub fn cylinder_extension(f: &FiniteTree) -> TreeAutomaton {
    if f.is_empty() {
        return TreeAutomaton::empty();
    }
    let words: Vec<&BinaryWord> = f.nodes().iter().collect();
    let id_of = |w: &BinaryWord| words.binary_search(&w).expect("node present");
    let raw: Vec<[Option<usize>; 2]> = words
        .iter()
        .map(|w| {
            if w.len() == f.depth() {
                let own = id_of(w);
                return [Some(own), Some(own)];
            }
            let mut row = [None, None];
            for b in 0u8..2 {
                let child = w.child(b);
                if f.contains(&child) {
                    row[b as usize] = Some(id_of(&child));
                }
            }
            row
        })
        .collect();
    let root = id_of(&BinaryWord::empty());
    TreeAutomaton::from_raw_trimmed(&raw, root)
}

/// The deepest forced run before a split, over states that can reach a split
/// at all. This is the quantity [`SAFE_BAND_MARGIN`] bounds on the corpus.
pub fn max_forced_distance_to_split(t: &TreeAutomaton) -> usize {
    let mut worst = 0;
    for q in t.states() {
        let mut distance = 0;
        let mut state = q;
        let mut seen = vec![false; t.state_count()];
        loop {
            if t.is_split(state) {
                worst = worst.max(distance);
                break;
            }
            if seen[state] {
                break; // a forced cycle never reaches a split
            }
            seen[state] = true;
            let next = t.children(state).into_iter().flatten().next();
            match next {
                Some(c) => {
                    state = c;
                    distance += 1;
                }
                None => break,
            }
        }
    }
    worst
}
