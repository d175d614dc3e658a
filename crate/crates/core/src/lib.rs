//! Closed subsets of the unit interval, presented exactly.
//!
//! A closed set `M` in `[0, 1]` is presented as a finite automaton whose
//! infinite branches are the binary expansions of the points of `M` — a
//! regular dyadic branching system. On such presentations the crate makes the
//! classical structure theory executable:
//!
//! - iterated pruning of branches that stop splitting, reaching the perfect
//!   kernel in finitely many steps (the Cantor–Bendixson derivative on the
//!   tree, with the number of productive steps as the rank);
//! - the countable/continuum dichotomy with constructive witnesses on both
//!   sides: an injective cut-node assignment enumerating the pruned branches,
//!   and an injection of Cantor space into the kernel inverted by a
//!   subsequence projection;
//! - countable order scales: density/endpoint checks, the back-and-forth
//!   partial isomorphism, the order-preserving overlay of one scale over
//!   another with an explicit left/right rule at gap points, and the
//!   decomposition of the closure of a countable set into its kernel part,
//!   gap endpoints, and densely ordered remainder;
//! - independent brute-force oracles at bounded depth for cross-checking the
//!   automaton algorithms.
//!
//! All arithmetic is exact: dyadic rationals with arbitrary-precision
//! numerators, exact rationals for eventually periodic expansions, and no
//! floating point anywhere.

pub mod dot;
pub mod dyadic;
pub mod error;
pub mod oracle;
pub mod order;
pub mod pruning;
pub mod sexpr;
pub mod treeset;

// exact rational values appear in public signatures
pub use num_rational::BigRational;

pub use dot::to_dot;
pub use dyadic::{
    even_scale_map, in_even_scale, BinaryWord, DyadicInterval, DyadicRational, UltimatelyPeriodic,
};
pub use error::Error;
pub use oracle::{brute_derivative, brute_member, truncate, FiniteTree, SAFE_BAND_MARGIN};
pub use order::{
    back_and_forth, closure_construct, eta_check, overlay, subtract_countable,
    ClosureDecomposition, CountableOrder, EtaVerdict, ExcludedSet, OverlayImage, OverlayRule,
};
pub use pruning::{
    cantor_surjection, classify, classify_with_budget, kernel_injection, kernel_injection_path,
    perfect_kernel, prune_once, pruned_branches, split_schedule, Classification, KernelWitness,
    PrunedBranch, Verdict, DEFAULT_BRANCH_BUDGET,
};
pub use sexpr::parse_description;
pub use treeset::{build, NodeSet, SetDescription, TreeAutomaton};
