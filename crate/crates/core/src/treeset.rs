//! Finite presentations of infinite dyadic branching systems.
//!
//! A [`TreeAutomaton`] is a deterministic automaton over `{0, 1}` with partial
//! transitions. Its infinite runs from the root are the branches of an
//! infinite binary tree; reading a branch as a binary expansion yields a point
//! of `[0, 1]`, and the set of all branch values is a closed set `M`.
//!
//! Builders follow the closed-interval node convention: a word `w` is a node
//! iff the closed interval `[a*2^-n, (a+1)*2^-n]` it denotes intersects `M`.
//! Consequently the branch language of a built automaton carries *every*
//! binary expansion of every point of `M`; dyadic points of `M` appear in two
//! sibling subtrees.

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::dyadic::{BinaryWord, DyadicInterval, DyadicRational, UltimatelyPeriodic};
use crate::error::Error;

/// A trimmed deterministic automaton presenting a closed subset of `[0, 1]`.
///
/// State 0 is the root; an automaton with no states presents the empty set.
/// Invariants maintained by every constructor: all states are reachable from
/// the root, every state has at least one child, and states are numbered
/// breadth-first from the root with the 0-child explored before the 1-child.
#[derive(Clone, PartialEq, Eq)]
pub struct TreeAutomaton {
    states: Vec<[Option<usize>; 2]>,
}

impl TreeAutomaton {
    /// The empty set.
    pub fn empty() -> Self {
        TreeAutomaton { states: Vec::new() }
    }

    /// The whole unit interval: one state with both children looping.
    pub fn full() -> Self {
        TreeAutomaton {
            states: vec![[Some(0), Some(0)]],
        }
    }

    /// Builds an automaton from raw transitions with state 0 as root,
    /// validating reachability and the no-dead-end invariant, then
    /// renumbering canonically.
    pub fn from_parts(states: Vec<[Option<usize>; 2]>) -> Result<Self, Error> {
        if states.is_empty() {
            return Ok(Self::empty());
        }
        for (q, children) in states.iter().enumerate() {
            if children[0].is_none() && children[1].is_none() {
                return Err(Error::InvalidAutomaton(format!(
                    "state {q} has no children"
                )));
            }
            for c in children.iter().flatten() {
                if *c >= states.len() {
                    return Err(Error::InvalidAutomaton(format!(
                        "state {q} points at missing state {c}"
                    )));
                }
            }
        }
        let automaton = canonicalize(&states, 0);
        if automaton.state_count() != states.len() {
            return Err(Error::InvalidAutomaton("unreachable states".into()));
        }
        Ok(automaton)
    }

    /// Crate-internal: trim and canonicalize raw transitions.
    pub(crate) fn from_raw_trimmed(states: &[[Option<usize>; 2]], root: usize) -> Self {
        if states.is_empty() {
            return Self::empty();
        }
        trim_raw(states, root)
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn child(&self, state: usize, bit: u8) -> Option<usize> {
        self.states[state][bit as usize]
    }

    pub fn children(&self, state: usize) -> [Option<usize>; 2] {
        self.states[state]
    }

    /// A state splits when both children exist.
    pub fn is_split(&self, state: usize) -> bool {
        self.states[state][0].is_some() && self.states[state][1].is_some()
    }

    pub fn states(&self) -> impl Iterator<Item = usize> {
        0..self.states.len()
    }

    /// Runs the word from the root; `None` when the path exits the automaton.
    pub fn state_on_path(&self, w: &BinaryWord) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        let mut q = 0;
        for b in w.bits() {
            q = self.child(q, b)?;
        }
        Some(q)
    }

    /// Node membership: true iff following `w` from the root stays inside the
    /// automaton, equivalently iff the closed interval of `w` intersects `M`.
    pub fn member_node(&self, w: &BinaryWord) -> bool {
        self.state_on_path(w).is_some()
    }

    /// The depth-`n` cross-section: exactly the depth-`n` nodes, as sorted
    /// interval indices.
    pub fn nodes_at_depth(&self, n: usize) -> NodeSet {
        let mut frontier: Vec<(BigUint, usize)> = Vec::new();
        if !self.is_empty() {
            frontier.push((BigUint::zero(), 0));
        }
        for _ in 0..n {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for (index, q) in frontier {
                let doubled: BigUint = index << 1;
                if let Some(c) = self.child(q, 0) {
                    next.push((doubled.clone(), c));
                }
                if let Some(c) = self.child(q, 1) {
                    next.push((doubled + BigUint::one(), c));
                }
            }
            frontier = next;
        }
        // Determinism of the automaton makes indices unique; BFS in index
        // order keeps them sorted.
        NodeSet {
            depth: n,
            indices: frontier.into_iter().map(|(i, _)| i).collect(),
        }
    }

    /// Branch-set union via the merged product; result trimmed and canonical.
    pub fn union(&self, other: &Self) -> Self {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let mut ids: BTreeMap<(Option<usize>, Option<usize>), usize> = BTreeMap::new();
        let mut states: Vec<[Option<usize>; 2]> = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert((Some(0), Some(0)), 0);
        states.push([None, None]);
        queue.push_back((Some(0), Some(0)));
        while let Some(pair) = queue.pop_front() {
            let q = ids[&pair];
            for bit in 0u8..2 {
                let left = pair.0.and_then(|s| self.child(s, bit));
                let right = pair.1.and_then(|s| other.child(s, bit));
                if left.is_none() && right.is_none() {
                    continue;
                }
                let next = (left, right);
                let id = *ids.entry(next).or_insert_with(|| {
                    states.push([None, None]);
                    queue.push_back(next);
                    states.len() - 1
                });
                states[q][bit as usize] = Some(id);
            }
        }
        trim_raw(&states, 0)
    }

    /// Branch-set intersection via the synchronous product. Trimming removes
    /// product nodes whose subtree dies, which is what keeps dyadic touching
    /// points honest.
    pub fn intersect(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::empty();
        }
        let mut ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut states: Vec<[Option<usize>; 2]> = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert((0, 0), 0);
        states.push([None, None]);
        queue.push_back((0, 0));
        while let Some(pair) = queue.pop_front() {
            let q = ids[&pair];
            for bit in 0u8..2 {
                let (Some(left), Some(right)) = (self.child(pair.0, bit), other.child(pair.1, bit))
                else {
                    continue;
                };
                let next = (left, right);
                let id = *ids.entry(next).or_insert_with(|| {
                    states.push([None, None]);
                    queue.push_back(next);
                    states.len() - 1
                });
                states[q][bit as usize] = Some(id);
            }
        }
        trim_raw(&states, 0)
    }

    /// The largest subautomaton in which every state is reachable and has at
    /// least one child. Branch set unchanged; idempotent.
    pub fn trim(&self) -> Self {
        if self.is_empty() {
            return Self::empty();
        }
        trim_raw(&self.states, 0)
    }

    /// Does the all-zeros continuation from `state` run forever?
    pub fn accepts_zero_tail(&self, state: usize) -> bool {
        self.accepts_constant_tail(state, 0)
    }

    /// Does the all-ones continuation from `state` run forever?
    pub fn accepts_one_tail(&self, state: usize) -> bool {
        self.accepts_constant_tail(state, 1)
    }

    fn accepts_constant_tail(&self, state: usize, bit: u8) -> bool {
        let mut seen = vec![false; self.state_count()];
        let mut q = state;
        loop {
            if seen[q] {
                return true;
            }
            seen[q] = true;
            match self.child(q, bit) {
                Some(next) => q = next,
                None => return false,
            }
        }
    }

    /// Point membership in the branch-value set: some expansion of `x` labels
    /// an infinite run. Both expansions of a dyadic point are tried.
    pub fn contains_point(&self, x: &DyadicRational) -> bool {
        if self.is_empty() {
            return false;
        }
        let digits = x.digits();
        if x.is_one() {
            return self.accepts_one_tail(0);
        }
        // canonical expansion: digits then 0^omega
        if let Some(q) = self.state_on_path(&digits) {
            if self.accepts_zero_tail(q) {
                return true;
            }
        }
        // lower expansion of a positive dyadic: digits[..n-1] 0 1^omega
        if !x.is_zero() {
            let mut low = digits.prefix(digits.len() - 1);
            low.push(0);
            if let Some(q) = self.state_on_path(&low) {
                if self.accepts_one_tail(q) {
                    return true;
                }
            }
        }
        false
    }

    /// When the subtree below `state` never splits, returns the unique
    /// (eventually periodic) continuation; `None` when a split is below.
    pub fn forced_chain(&self, state: usize) -> Option<UltimatelyPeriodic> {
        let mut digits = Vec::new();
        let mut visited: Vec<(usize, usize)> = Vec::new(); // (state, position)
        let mut q = state;
        loop {
            if let Some(&(_, pos)) = visited.iter().find(|&&(s, _)| s == q) {
                let pre = BinaryWord::from_bits(digits[..pos].iter().copied());
                let per = BinaryWord::from_bits(digits[pos..].iter().copied());
                return Some(UltimatelyPeriodic::new(pre, per));
            }
            if self.is_split(q) {
                return None;
            }
            visited.push((q, digits.len()));
            let (bit, next) = match self.children(q) {
                [Some(c), None] => (0u8, c),
                [None, Some(c)] => (1u8, c),
                _ => unreachable!("trimmed automaton state with no children"),
            };
            digits.push(bit);
            q = next;
        }
    }

    /// True when `x` lies in the branch-value set and some punctured right
    /// neighbourhood `(x, x + eps)` misses it, i.e. `x` is the left endpoint
    /// of a maximal complementary interval (or `x = 1`'s degenerate analogue,
    /// which is reported as false).
    pub fn right_isolated(&self, x: &DyadicRational) -> bool {
        if self.is_empty() || x.is_one() || !self.contains_point(x) {
            return false;
        }
        // Walk the upper expansion digits..0^k; if the path dies or some
        // state's subtree is exactly the 0^omega chain, nothing of M lives
        // strictly to the right of x at that scale.
        let digits = x.digits();
        let Some(mut q) = self.state_on_path(&digits) else {
            return true;
        };
        let mut seen = vec![false; self.state_count()];
        loop {
            if let Some(chain) = self.forced_chain(q) {
                return chain.eventually_zero();
            }
            if seen[q] {
                return false;
            }
            seen[q] = true;
            match self.child(q, 0) {
                Some(next) => q = next,
                None => return true,
            }
        }
    }
}

impl fmt::Debug for TreeAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TreeAutomaton[")?;
        for (q, ch) in self.states.iter().enumerate() {
            if q > 0 {
                write!(f, " ")?;
            }
            let show = |c: Option<usize>| c.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
            write!(f, "{q}:({},{})", show(ch[0]), show(ch[1]))?;
        }
        write!(f, "]")
    }
}

/// A finite cross-section: the depth-`n` nodes of a tree, sorted by index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NodeSet {
    depth: usize,
    indices: Vec<BigUint>,
}

impl NodeSet {
    pub fn new(depth: usize, mut indices: Vec<BigUint>) -> Self {
        indices.sort();
        indices.dedup();
        NodeSet { depth, indices }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[BigUint] {
        &self.indices
    }

    pub fn intervals(&self) -> Vec<DyadicInterval> {
        self.indices
            .iter()
            .map(|i| DyadicInterval::new(self.depth, i.clone()).expect("index in range"))
            .collect()
    }

    pub fn contains_index(&self, index: &BigUint) -> bool {
        self.indices.binary_search(index).is_ok()
    }
}

/// Abstract syntax for the closed sets this crate can present exactly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SetDescription {
    Empty,
    Full,
    Point(DyadicRational),
    Interval(DyadicRational, DyadicRational),
    /// A single rational `p/q` in `[0, 1]`; its binary expansion is
    /// eventually periodic, hence regular.
    Rational(u64, u64),
    /// The closure of the even-position scale: binary expansions whose every
    /// odd-position digit is 0, together with the second expansions of its
    /// dyadic points.
    EScale,
    /// Points admitting an expansion that avoids the pattern as a factor.
    Avoid(BinaryWord),
    Union(Vec<SetDescription>),
    Intersect(Vec<SetDescription>),
}

impl SetDescription {
    pub fn validate(&self) -> Result<(), Error> {
        match self {
            SetDescription::Empty | SetDescription::Full | SetDescription::EScale => Ok(()),
            SetDescription::Point(_) => Ok(()),
            SetDescription::Interval(lo, hi) => {
                if lo > hi {
                    Err(Error::MalformedDescription(format!(
                        "interval bounds out of order: {lo} > {hi}"
                    )))
                } else {
                    Ok(())
                }
            }
            SetDescription::Rational(p, q) => {
                if *q == 0 || p > q {
                    Err(Error::MalformedDescription(format!(
                        "rational {p}/{q} is not in [0,1]"
                    )))
                } else {
                    Ok(())
                }
            }
            SetDescription::Avoid(pattern) => {
                if pattern.is_empty() {
                    Err(Error::MalformedDescription("avoid pattern is empty".into()))
                } else {
                    Ok(())
                }
            }
            SetDescription::Union(items) | SetDescription::Intersect(items) => {
                if items.is_empty() {
                    return Err(Error::MalformedDescription(
                        "union/intersect needs at least one operand".into(),
                    ));
                }
                items.iter().try_for_each(SetDescription::validate)
            }
        }
    }
}

impl fmt::Display for SetDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDescription::Empty => write!(f, "(empty)"),
            SetDescription::Full => write!(f, "(full)"),
            SetDescription::Point(x) => write!(f, "(point {x})"),
            SetDescription::Interval(lo, hi) => write!(f, "(interval {lo} {hi})"),
            SetDescription::Rational(p, q) => write!(f, "(rational {p} {q})"),
            SetDescription::EScale => write!(f, "(escale)"),
            SetDescription::Avoid(p) => write!(f, "(avoid {p})"),
            SetDescription::Union(items) => {
                write!(f, "(union")?;
                for item in items {
                    write!(f, " {item}")?;
                }
                write!(f, ")")
            }
            SetDescription::Intersect(items) => {
                write!(f, "(intersect")?;
                for item in items {
                    write!(f, " {item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Builds the branching system of a description: the trimmed canonical
/// automaton whose branch values form the closure of the described set and
/// whose nodes are exactly the intervals meeting it.
pub fn build(desc: &SetDescription) -> Result<TreeAutomaton, Error> {
    desc.validate()?;
    Ok(build_unchecked(desc))
}

fn build_unchecked(desc: &SetDescription) -> TreeAutomaton {
    match desc {
        SetDescription::Empty => TreeAutomaton::empty(),
        SetDescription::Full => TreeAutomaton::full(),
        SetDescription::Point(x) => point_automaton(x),
        SetDescription::Interval(lo, hi) => {
            if lo == hi {
                point_automaton(lo)
            } else {
                at_least_automaton(lo).intersect(&at_most_automaton(hi))
            }
        }
        SetDescription::Rational(p, q) => rational_automaton(*p, *q),
        SetDescription::EScale => escale_automaton(),
        SetDescription::Avoid(pattern) => avoid_automaton(pattern),
        SetDescription::Union(items) => items
            .iter()
            .map(build_unchecked)
            .fold(TreeAutomaton::empty(), |acc, t| acc.union(&t)),
        SetDescription::Intersect(items) => {
            let mut result: Option<TreeAutomaton> = None;
            for item in items {
                let t = build_unchecked(item);
                result = Some(match result {
                    None => t,
                    Some(acc) => acc.intersect(&t),
                });
            }
            result.expect("validated nonempty")
        }
    }
}

// ---------------- primitive builders ----------------

/// Both expansions of a single dyadic point.
fn point_automaton(x: &DyadicRational) -> TreeAutomaton {
    if x.is_zero() {
        return TreeAutomaton {
            states: vec![[Some(0), None]],
        };
    }
    if x.is_one() {
        return TreeAutomaton {
            states: vec![[None, Some(0)]],
        };
    }
    let digits = x.digits();
    let n = digits.len();
    // chain along d_1 .. d_{n-1}, then a split into the 0^omega and 1^omega tails
    let mut states: Vec<[Option<usize>; 2]> = Vec::with_capacity(n + 2);
    for (i, b) in digits.bits().enumerate().take(n - 1) {
        let mut row = [None, None];
        row[b as usize] = Some(i + 1);
        states.push(row);
    }
    let zero_tail = n + 1;
    let one_tail = n;
    // the split state: final digit is 1, so child 1 is the canonical tail
    states.push([Some(one_tail), Some(zero_tail)]);
    states.push([None, Some(one_tail)]); // 1^omega
    states.push([Some(zero_tail), None]); // 0^omega
    canonicalize(&states, 0)
}

/// Branches with value `>= lo`: every expansion of every point of `[lo, 1]`.
fn at_least_automaton(lo: &DyadicRational) -> TreeAutomaton {
    if lo.is_zero() {
        return TreeAutomaton::full();
    }
    if lo.is_one() {
        return point_automaton(lo);
    }
    let digits = lo.digits();
    let n = digits.len();
    // states 0..n-1 compare against the canonical digits of lo; state n is
    // free (prefix already above lo), state n+1 is the 1^omega tail reaching
    // lo from below.
    let free = n;
    let low_tail = n + 1;
    let mut states: Vec<[Option<usize>; 2]> = Vec::with_capacity(n + 2);
    for (i, b) in digits.bits().enumerate() {
        let on_match = if i + 1 == n { free } else { i + 1 };
        let mut row = [None, None];
        row[b as usize] = Some(on_match);
        if b == 0 {
            row[1] = Some(free);
        } else if i + 1 == n {
            // dipping below the final 1 forces the all-ones tail
            row[0] = Some(low_tail);
        }
        states.push(row);
    }
    states.push([Some(free), Some(free)]);
    states.push([None, Some(low_tail)]);
    canonicalize(&states, 0)
}

/// Branches with value `<= hi`: every expansion of every point of `[0, hi]`.
fn at_most_automaton(hi: &DyadicRational) -> TreeAutomaton {
    if hi.is_one() {
        return TreeAutomaton::full();
    }
    if hi.is_zero() {
        return point_automaton(hi);
    }
    let digits = hi.digits();
    let n = digits.len();
    let free = n;
    let zero_tail = n + 1;
    let mut states: Vec<[Option<usize>; 2]> = Vec::with_capacity(n + 2);
    for (i, b) in digits.bits().enumerate() {
        let on_match = if i + 1 == n { zero_tail } else { i + 1 };
        let mut row = [None, None];
        row[b as usize] = Some(on_match);
        if b == 1 {
            row[0] = Some(free);
        }
        states.push(row);
    }
    states.push([Some(free), Some(free)]);
    states.push([Some(zero_tail), None]);
    canonicalize(&states, 0)
}

/// The single point `p/q` through its eventually periodic expansion, states
/// keyed by long-division remainders.
fn rational_automaton(p: u64, q: u64) -> TreeAutomaton {
    let g = p.gcd(&q);
    let (p, q) = (p / g, q / g);
    if q.is_power_of_two() {
        let exponent = q.trailing_zeros();
        return point_automaton(
            &DyadicRational::from_u64(p, exponent).expect("reduced p/q in [0,1]"),
        );
    }
    // q has an odd factor, so the expansion never terminates and the point is
    // not dyadic: exactly one expansion.
    let mut ids: BTreeMap<u64, usize> = BTreeMap::new();
    let mut states: Vec<[Option<usize>; 2]> = Vec::new();
    let mut rem = p;
    ids.insert(rem, 0);
    states.push([None, None]);
    loop {
        let q_id = ids[&rem];
        let doubled = 2u128 * u128::from(rem);
        let (digit, next_rem) = if doubled >= u128::from(q) {
            (1u8, (doubled - u128::from(q)) as u64)
        } else {
            (0u8, doubled as u64)
        };
        if let Some(&id) = ids.get(&next_rem) {
            states[q_id][digit as usize] = Some(id);
            break;
        }
        states.push([None, None]);
        let id = states.len() - 1;
        ids.insert(next_rem, id);
        states[q_id][digit as usize] = Some(id);
        rem = next_rem;
    }
    canonicalize(&states, 0)
}

/// The closure of the even-position scale. Branches are the expansions with
/// every odd-position digit 0, plus the `.. 0 1^omega` second expansions of
/// the dyadic points among them (a tail of ones entering at an odd position
/// whose preceding even-position digit is 0).
fn escale_automaton() -> TreeAutomaton {
    // 0: odd position, tail not available (root, or after an even 1)
    // 1: even position
    // 2: odd position, preceding even digit was 0 (tail available)
    // 3: the 1^omega tail
    let states = vec![
        [Some(1), None],
        [Some(2), Some(0)],
        [Some(1), Some(3)],
        [None, Some(3)],
    ];
    canonicalize(&states, 0)
}

/// Points having at least one expansion that avoids `pattern` as a factor.
/// The factor-free subshift automaton is closed under second expansions of
/// the dyadic points it captures.
fn avoid_automaton(pattern: &BinaryWord) -> TreeAutomaton {
    let subshift = subshift_states(pattern);
    twin_close(&subshift)
}

/// Partial DFA of words with no occurrence of `pattern`, states = length of
/// the longest suffix that is a proper prefix of the pattern.
fn subshift_states(pattern: &BinaryWord) -> Vec<[Option<usize>; 2]> {
    let m = pattern.len();
    // failure function of the pattern
    let mut fail = vec![0usize; m];
    for i in 1..m {
        let mut k = fail[i - 1];
        while k > 0 && pattern.bit(i) != pattern.bit(k) {
            k = fail[k - 1];
        }
        if pattern.bit(i) == pattern.bit(k) {
            k += 1;
        }
        fail[i] = k;
    }
    let step = |mut s: usize, b: u8| -> usize {
        while s > 0 && pattern.bit(s) != b {
            s = fail[s - 1];
        }
        if pattern.bit(s) == b {
            s + 1
        } else {
            0
        }
    };
    (0..m)
        .map(|s| {
            let mut row = [None, None];
            for b in 0u8..2 {
                let next = step(s, b);
                if next < m {
                    row[b as usize] = Some(next);
                }
            }
            row
        })
        .collect()
}

/// Closes a branch language under the second expansions of its dyadic values:
/// whenever `u 1 0^omega` is a branch, `u 0 1^omega` becomes one too, and
/// conversely. Implemented as an NFA union with two fresh constant tails
/// followed by the subset construction.
fn twin_close(raw: &[[Option<usize>; 2]]) -> TreeAutomaton {
    if raw.is_empty() {
        return TreeAutomaton::empty();
    }
    let n = raw.len();
    let accepts_tail = |start: usize, bit: u8| -> bool {
        let mut seen = vec![false; n];
        let mut q = start;
        loop {
            if seen[q] {
                return true;
            }
            seen[q] = true;
            match raw[q][bit as usize] {
                Some(next) => q = next,
                None => return false,
            }
        }
    };
    // NFA states: 0..n originals, n = the 0^omega tail, n+1 = the 1^omega tail.
    let zero_tail = n;
    let one_tail = n + 1;
    let moves = |q: usize, b: u8| -> Vec<usize> {
        let mut out = Vec::new();
        if q == zero_tail {
            if b == 0 {
                out.push(zero_tail);
            }
            return out;
        }
        if q == one_tail {
            if b == 1 {
                out.push(one_tail);
            }
            return out;
        }
        if let Some(next) = raw[q][b as usize] {
            out.push(next);
        }
        match b {
            // reading 0 where 1 would have started a vanishing tail of zeros
            0 => {
                if let Some(up) = raw[q][1] {
                    if accepts_tail(up, 0) {
                        out.push(one_tail);
                    }
                }
            }
            // reading 1 where 0 would have started a vanishing tail of ones
            _ => {
                if let Some(down) = raw[q][0] {
                    if accepts_tail(down, 1) {
                        out.push(zero_tail);
                    }
                }
            }
        }
        out
    };
    // subset construction
    let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut states: Vec<[Option<usize>; 2]> = Vec::new();
    let mut queue = VecDeque::new();
    let start = vec![0usize];
    ids.insert(start.clone(), 0);
    states.push([None, None]);
    queue.push_back(start);
    while let Some(subset) = queue.pop_front() {
        let q = ids[&subset];
        for b in 0u8..2 {
            let mut next: Vec<usize> = subset.iter().flat_map(|&s| moves(s, b)).collect();
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                continue;
            }
            let id = *ids.entry(next.clone()).or_insert_with(|| {
                states.push([None, None]);
                queue.push_back(next);
                states.len() - 1
            });
            states[q][b as usize] = Some(id);
        }
    }
    trim_raw(&states, 0)
}

// ---------------- canonical form ----------------

/// Removes dead ends (cascading) and unreachable states, then renumbers.
fn trim_raw(states: &[[Option<usize>; 2]], root: usize) -> TreeAutomaton {
    if states.is_empty() {
        return TreeAutomaton::empty();
    }
    let mut alive = vec![true; states.len()];
    loop {
        let mut changed = false;
        for q in 0..states.len() {
            if !alive[q] {
                continue;
            }
            let has_child = states[q].iter().flatten().any(|&c| alive[c]);
            if !has_child {
                alive[q] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !alive[root] {
        return TreeAutomaton::empty();
    }
    let filtered: Vec<[Option<usize>; 2]> = states
        .iter()
        .map(|row| {
            let mut out = [None, None];
            for b in 0..2 {
                if let Some(c) = row[b] {
                    if alive[c] {
                        out[b] = Some(c);
                    }
                }
            }
            out
        })
        .collect();
    canonicalize(&filtered, root)
}

/// Breadth-first renumbering from the root, 0-child before 1-child;
/// unreachable states are dropped. Input must have no live dead ends.
fn canonicalize(states: &[[Option<usize>; 2]], root: usize) -> TreeAutomaton {
    let mut order: Vec<usize> = Vec::with_capacity(states.len());
    let mut id_of: Vec<Option<usize>> = vec![None; states.len()];
    id_of[root] = Some(0);
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let q = order[head];
        head += 1;
        for c in states[q].into_iter().flatten() {
            if id_of[c].is_none() {
                id_of[c] = Some(order.len());
                order.push(c);
            }
        }
    }
    let renumbered: Vec<[Option<usize>; 2]> = order
        .iter()
        .map(|&q| states[q].map(|child| child.map(|c| id_of[c].expect("child reachable"))))
        .collect();
    debug_assert!(
        renumbered.iter().all(|row| row.iter().any(Option::is_some)),
        "canonicalize expects trimmed input"
    );
    TreeAutomaton { states: renumbered }
}
