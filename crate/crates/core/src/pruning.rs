//! Iterated pruning of branches that stop splitting, its fixpoint (the
//! perfect kernel), the countable/continuum classification, and the
//! constructive witnesses on both sides of the dichotomy.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use crate::dyadic::{BinaryWord, DyadicInterval, UltimatelyPeriodic};
use crate::error::Error;
use crate::treeset::TreeAutomaton;

/// Cut-node depth explored by [`classify`].
pub const DEFAULT_BRANCH_BUDGET: usize = 14;

/// States from which a state with two children is reachable (in zero or more
/// steps).
fn reaches_split(t: &TreeAutomaton) -> Vec<bool> {
    let n = t.state_count();
    let mut good = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for q in t.states() {
        if t.is_split(q) {
            good[q] = true;
            queue.push_back(q);
        }
    }
    // backward closure over the reversed edge relation
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in t.states() {
        for c in t.children(q).into_iter().flatten() {
            parents[c].push(q);
        }
    }
    while let Some(q) = queue.pop_front() {
        for &p in &parents[q] {
            if !good[p] {
                good[p] = true;
                queue.push_back(p);
            }
        }
    }
    good
}

/// One pruning pass: keeps exactly the states from which a splitting state is
/// reachable, then trims. The branches of the result are the branches of `t`
/// that split at least once more below every node.
pub fn prune_once(t: &TreeAutomaton) -> TreeAutomaton {
    if t.is_empty() {
        return TreeAutomaton::empty();
    }
    let good = reaches_split(t);
    if !good[0] {
        return TreeAutomaton::empty();
    }
    let raw: Vec<[Option<usize>; 2]> = t
        .states()
        .map(|q| {
            let mut row = [None, None];
            if good[q] {
                for (slot, child) in row.iter_mut().zip(t.children(q)) {
                    if let Some(c) = child {
                        if good[c] {
                            *slot = Some(c);
                        }
                    }
                }
            }
            row
        })
        .collect();
    TreeAutomaton::from_raw_trimmed(&raw, 0)
}

/// Iterates [`prune_once`] to its fixpoint. Returns the fixpoint (empty, or a
/// perfect tree in which every state reaches a split) and the number of
/// passes that changed the automaton. The rank is at most the state count of
/// the input because every productive pass deletes at least one state.
pub fn perfect_kernel(t: &TreeAutomaton) -> (TreeAutomaton, usize) {
    let mut current = t.trim();
    let mut rank = 0;
    loop {
        let next = prune_once(&current);
        if next == current {
            return (current, rank);
        }
        current = next;
        rank += 1;
    }
}

/// A branch severed by some pruning pass: the node where it was cut and the
/// unique non-splitting continuation below the cut.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrunedBranch {
    /// The node at which the branch was severed.
    pub cut: BinaryWord,
    /// The eventually periodic continuation below the cut.
    pub tail: UltimatelyPeriodic,
    /// 1-based pruning pass during which the cut happened.
    pub stage: usize,
}

impl PrunedBranch {
    /// Does this branch pass through the given node?
    pub fn covers(&self, w: &BinaryWord) -> bool {
        if w.len() <= self.cut.len() {
            return w.is_prefix_of(&self.cut);
        }
        if !self.cut.is_prefix_of(w) {
            return false;
        }
        (self.cut.len()..w.len()).all(|i| w.bit(i) == self.tail.digit(i - self.cut.len()))
    }
}

/// Enumerates, without duplicates, every branch cut by any pruning stage at a
/// node of depth at most `budget`. Distinct branches have distinct cut nodes:
/// within a stage the cuts are minimal failing nodes of disjoint subtrees,
/// and later stages only cut nodes that survived all earlier ones.
pub fn pruned_branches(t: &TreeAutomaton, budget: usize) -> Vec<PrunedBranch> {
    let mut out = Vec::new();
    let mut current = t.trim();
    let mut stage = 1;
    while !current.is_empty() {
        let good = reaches_split(&current);
        if !good[0] {
            // no split anywhere: the whole remaining tree is one branch, cut
            // at the root
            let tail = current.forced_chain(0).expect("no splits below the root");
            out.push(PrunedBranch {
                cut: BinaryWord::empty(),
                tail,
                stage,
            });
            break;
        }
        // Walk only nodes whose state can still reach a cut edge; this keeps
        // the walk linear on kernel-like regions.
        let cut_sources: Vec<bool> = current
            .states()
            .map(|q| good[q] && current.children(q).into_iter().flatten().any(|c| !good[c]))
            .collect();
        let relevant = reaches_any(&current, &cut_sources);
        let mut frontier: Vec<(BinaryWord, usize)> = vec![(BinaryWord::empty(), 0)];
        for _depth in 0..=budget.saturating_sub(1) {
            let mut next = Vec::new();
            for (word, q) in frontier {
                if !relevant[q] {
                    continue;
                }
                for b in 0u8..2 {
                    if let Some(c) = current.child(q, b) {
                        let child_word = word.child(b);
                        if !good[c] {
                            let tail = current.forced_chain(c).expect("cut subtrees never split");
                            out.push(PrunedBranch {
                                cut: child_word,
                                tail,
                                stage,
                            });
                        } else if child_word.len() <= budget.saturating_sub(1) {
                            next.push((child_word, c));
                        }
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        let next = prune_once(&current);
        if next == current {
            break;
        }
        current = next;
        stage += 1;
    }
    out
}

fn reaches_any(t: &TreeAutomaton, targets: &[bool]) -> Vec<bool> {
    let n = t.state_count();
    let mut hit = targets.to_vec();
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in t.states() {
        for c in t.children(q).into_iter().flatten() {
            parents[c].push(q);
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&q| hit[q]).collect();
    while let Some(q) = queue.pop_front() {
        for &p in &parents[q] {
            if !hit[p] {
                hit[p] = true;
                queue.push_back(p);
            }
        }
    }
    hit
}

/// The dichotomy verdict.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Countable,
    Continuum,
}

/// Classification of a branching system: the verdict, the number of pruning
/// passes, the kernel (empty exactly in the countable case), and the pruned
/// branches enumerated up to the budget.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    pub rank: usize,
    pub kernel: TreeAutomaton,
    pub pruned: Vec<PrunedBranch>,
    pub budget: usize,
}

impl Classification {
    /// The one-line text rendering used by the command line driver.
    pub fn render(&self) -> String {
        match self.verdict {
            Verdict::Countable => format!(
                "verdict=countable rank={} branches={}",
                self.rank,
                self.pruned.len()
            ),
            Verdict::Continuum => format!(
                "verdict=continuum rank={} kernel_states={}",
                self.rank,
                self.kernel.state_count()
            ),
        }
    }
}

pub fn classify(t: &TreeAutomaton) -> Classification {
    classify_with_budget(t, DEFAULT_BRANCH_BUDGET)
}

pub fn classify_with_budget(t: &TreeAutomaton, budget: usize) -> Classification {
    let trimmed = t.trim();
    let (kernel, rank) = perfect_kernel(&trimmed);
    let verdict = if kernel.is_empty() {
        Verdict::Countable
    } else {
        Verdict::Continuum
    };
    let pruned = pruned_branches(&trimmed, budget);
    Classification {
        verdict,
        rank,
        kernel,
        pruned,
        budget,
    }
}

/// Follows the kernel from the root, consuming one bit of `w` at every
/// splitting state and taking the forced child elsewhere; forced steps after
/// the last consumed bit are still taken, so the walk always stops at a
/// splitting state. Returns the node word of the reached state.
pub fn kernel_injection_path(kernel: &TreeAutomaton, w: &BinaryWord) -> Result<BinaryWord, Error> {
    if kernel.is_empty() {
        return Err(Error::EmptyKernel);
    }
    let mut q = 0;
    let mut path = BinaryWord::empty();
    let mut remaining = w.bits().peekable();
    let mut forced_run = 0usize;
    loop {
        if kernel.is_split(q) {
            forced_run = 0;
            match remaining.next() {
                Some(b) => {
                    path.push(b);
                    q = kernel.child(q, b).expect("split state has both children");
                }
                None => return Ok(path),
            }
        } else {
            forced_run += 1;
            debug_assert!(
                forced_run <= kernel.state_count(),
                "a perfect kernel reaches a split within |Q| forced steps"
            );
            let (b, c) = match kernel.children(q) {
                [Some(c), None] => (0u8, c),
                [None, Some(c)] => (1u8, c),
                _ => unreachable!("trimmed state with no children"),
            };
            path.push(b);
            q = c;
        }
    }
}

/// The interval of the node reached by [`kernel_injection_path`]. Distinct
/// words of equal length land in intervals with disjoint interiors, all
/// meeting the presented set, and extending the word refines the interval —
/// so infinite words induce an injection of Cantor space into the set.
pub fn kernel_injection(kernel: &TreeAutomaton, w: &BinaryWord) -> Result<DyadicInterval, Error> {
    Ok(DyadicInterval::from_word(&kernel_injection_path(
        kernel, w,
    )?))
}

/// The left inverse of the injection: projects a kernel path to the
/// subsequence of bits read at splitting states.
pub fn cantor_surjection(kernel: &TreeAutomaton, w: &BinaryWord) -> Result<BinaryWord, Error> {
    if kernel.is_empty() {
        return Err(Error::EmptyKernel);
    }
    let mut q = 0;
    let mut out = BinaryWord::empty();
    for b in w.bits() {
        if kernel.is_split(q) {
            out.push(b);
        }
        q = kernel
            .child(q, b)
            .ok_or_else(|| Error::NotAPath(w.to_string()))?;
    }
    Ok(out)
}

/// For every kernel state, the shortest in-kernel word reaching a splitting
/// state; ties broken toward 0. Every entry is shorter than the state count.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KernelWitness {
    pub split_schedule: BTreeMap<usize, BinaryWord>,
}

pub fn split_schedule(kernel: &TreeAutomaton) -> Result<KernelWitness, Error> {
    if kernel.is_empty() {
        return Err(Error::EmptyKernel);
    }
    let mut schedule = BTreeMap::new();
    for q in kernel.states() {
        // BFS preferring the 0-child keeps the witness deterministic.
        let mut seen = vec![false; kernel.state_count()];
        let mut queue = VecDeque::new();
        seen[q] = true;
        queue.push_back((q, BinaryWord::empty()));
        'search: while let Some((s, word)) = queue.pop_front() {
            if kernel.is_split(s) {
                schedule.insert(q, word);
                break 'search;
            }
            for b in 0u8..2 {
                if let Some(c) = kernel.child(s, b) {
                    if !seen[c] {
                        seen[c] = true;
                        queue.push_back((c, word.child(b)));
                    }
                }
            }
        }
    }
    Ok(KernelWitness {
        split_schedule: schedule,
    })
}
