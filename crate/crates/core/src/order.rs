//! Countable linear orders and the order-scale machinery: density/endpoint
//! checks, the back-and-forth partial isomorphism, the overlay of one scale
//! over another with an explicit left/right rule at gap points, the
//! decomposition of the closure of a countable set, and node membership after
//! removing a countable exclusion set.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use crate::dyadic::{even_scale_map, BinaryWord, DyadicRational, UltimatelyPeriodic};
use crate::error::Error;
use crate::pruning::perfect_kernel;
use crate::treeset::TreeAutomaton;

/// How many enumerated elements a closure decomposition classifies.
pub const DECOMPOSITION_PREFIX: usize = 24;

/// How many excluded elements a node query scans before concluding that a
/// single-branch value is not excluded.
pub const EXCLUSION_SCAN: usize = 1024;

/// Which of the built-in scales an order is, when any; lets the overlay use
/// the exact direct formulas instead of the generic approximation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum OrderKind {
    /// Breadth-first dyadic rationals in (0, 1): the full scale.
    DyadicMidpoints,
    /// The image of the dyadic scale under the even-position embedding.
    EvenScale,
    Other,
}

/// An enumerated countable suborder of the unit interval. Enumeration is a
/// stateless function of the 1-based index; comparison is the value order.
/// Finite orders return `None` past their size.
#[derive(Clone)]
pub struct CountableOrder {
    name: String,
    kind: OrderKind,
    enumerate: Arc<dyn Fn(usize) -> Option<DyadicRational> + Send + Sync>,
    /// Exact branching-system presentation of the closure, when one exists.
    regular: Option<TreeAutomaton>,
}

impl std::fmt::Debug for CountableOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CountableOrder({})", self.name)
    }
}

fn breadth_first_dyadic(i: usize) -> DyadicRational {
    // index 1, 2, 3, ... lists 1/2; 1/4, 3/4; 1/8, 3/8, 5/8, 7/8; ...
    let level = usize::BITS - i.leading_zeros(); // floor(log2 i) + 1
    let offset = i - (1usize << (level - 1));
    DyadicRational::from_u64((2 * offset + 1) as u64, level).expect("odd/2^level is in (0,1)")
}

impl CountableOrder {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The 1-based enumeration.
    pub fn element(&self, index: usize) -> Option<DyadicRational> {
        assert!(index >= 1, "enumeration indices start at 1");
        (self.enumerate)(index)
    }

    /// The first `n` elements (fewer when the order is finite), with the
    /// injectivity of the enumeration asserted on the prefix.
    pub fn prefix(&self, n: usize) -> Vec<DyadicRational> {
        let mut out = Vec::with_capacity(n);
        for i in 1..=n {
            match self.element(i) {
                Some(x) => out.push(x),
                None => break,
            }
        }
        let mut sorted = out.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(
            sorted.len(),
            out.len(),
            "enumeration of {} is not injective",
            self.name
        );
        out
    }

    pub fn regular_presentation(&self) -> Option<&TreeAutomaton> {
        self.regular.as_ref()
    }

    /// The scale of all dyadic rationals strictly between 0 and 1, in
    /// breadth-first enumeration order. Its closure is the whole interval.
    pub fn dyadic_scale() -> Self {
        CountableOrder {
            name: "D".into(),
            kind: OrderKind::DyadicMidpoints,
            enumerate: Arc::new(|i| Some(breadth_first_dyadic(i))),
            regular: Some(TreeAutomaton::full()),
        }
    }

    /// The even-position scale: the dyadic scale pushed through
    /// [`even_scale_map`]. Its closure is presented by the escale automaton.
    pub fn even_scale() -> Self {
        let escale = crate::treeset::build(&crate::treeset::SetDescription::EScale)
            .expect("escale is well-formed");
        CountableOrder {
            name: "E".into(),
            kind: OrderKind::EvenScale,
            enumerate: Arc::new(|i| Some(even_scale_map(&breadth_first_dyadic(i)))),
            regular: Some(escale),
        }
    }

    /// The order type of the natural numbers, realized as `1 - 2^-n`.
    pub fn omega() -> Self {
        // the closure adds the limit point 1; every point keeps both of its
        // expansions: 1^n 0^omega and 1^(n-1) 0 1^omega, plus 1^omega
        let closure = TreeAutomaton::from_parts(vec![
            [Some(4), Some(1)], // root: a leading 0 forces the 1/2-from-below tail
            [Some(2), Some(1)], // inside the run of ones
            [Some(3), Some(4)], // after the first 0: settle on a point or climb to the next
            [Some(3), None],    // 0^omega
            [None, Some(4)],    // 1^omega
        ])
        .expect("five live states");
        CountableOrder {
            name: "omega".into(),
            kind: OrderKind::Other,
            enumerate: Arc::new(|i| {
                let i = u32::try_from(i).ok()?;
                DyadicRational::from_u64((1u64 << i) - 1, i).ok()
            }),
            regular: Some(closure),
        }
    }

    /// An explicit finite order.
    pub fn finite(elements: Vec<DyadicRational>) -> Result<Self, Error> {
        if elements.is_empty() {
            return Err(Error::MalformedDescription(
                "finite order needs elements".into(),
            ));
        }
        let mut sorted = elements.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != elements.len() {
            return Err(Error::MalformedDescription(
                "finite order repeats an element".into(),
            ));
        }
        let closure = elements
            .iter()
            .map(|x| crate::treeset::SetDescription::Point(x.clone()))
            .fold(TreeAutomaton::empty(), |acc, d| {
                acc.union(&crate::treeset::build(&d).expect("points are well-formed"))
            });
        Ok(CountableOrder {
            name: format!("finite:{}", elements.len()),
            kind: OrderKind::Other,
            enumerate: Arc::new(move |i| elements.get(i - 1).cloned()),
            regular: Some(closure),
        })
    }

    /// An arbitrary enumeration, optionally with an exact presentation of its
    /// closure.
    pub fn from_enumeration(
        name: impl Into<String>,
        enumerate: impl Fn(usize) -> Option<DyadicRational> + Send + Sync + 'static,
        regular: Option<TreeAutomaton>,
    ) -> Self {
        CountableOrder {
            name: name.into(),
            kind: OrderKind::Other,
            enumerate: Arc::new(enumerate),
            regular,
        }
    }
}

/// Outcome of examining an enumerated order's prefix for the
/// dense-without-endpoints (type eta) shape. `ConsistentWithEta` is a
/// semidecision, never a proof.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EtaVerdict {
    ConsistentWithEta {
        depth_checked: usize,
    },
    EndpointFound {
        witness: DyadicRational,
        depth_checked: usize,
    },
    GapFound {
        lower: DyadicRational,
        upper: DyadicRational,
        depth_checked: usize,
    },
}

impl EtaVerdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, EtaVerdict::ConsistentWithEta { .. })
    }
}

/// An unfilled gap or a standing extremum only counts as a candidate once the
/// enumeration has had this many times its formation index to respond.
pub const ETA_FILL_HORIZON: usize = 4;

/// Examines the first `n` elements. A gap is an adjacent pair of the sorted
/// prefix with nothing enumerated between it although the enumeration ran to
/// at least [`ETA_FILL_HORIZON`] times the index at which the pair formed; an
/// endpoint is a minimum or maximum that has stood at least as long. When the
/// enumeration is exhausted within `n`, gaps and endpoints are definitive
/// rather than candidates. Gaps are checked first, in ascending order.
pub fn eta_check(order: &CountableOrder, n: usize) -> EtaVerdict {
    assert!(n >= 2, "eta_check needs at least two elements");
    let elements = order.prefix(n);
    assert!(!elements.is_empty(), "eta_check needs a nonempty order");
    let exhausted = elements.len() < n || order.element(n + 1).is_none();
    let m = elements.len();
    let mut sorted: Vec<(usize, &DyadicRational)> = elements.iter().enumerate().collect();
    sorted.sort_by(|a, b| a.1.cmp(b.1));

    let overdue = |formed_by: usize| exhausted || ETA_FILL_HORIZON * formed_by <= m;
    // adjacent pairs of the sorted prefix with nothing between them
    for window in sorted.windows(2) {
        let (i, lower) = window[0];
        let (j, upper) = window[1];
        let formed_by = i.max(j) + 1; // 1-based index when the pair completed
        if overdue(formed_by) {
            return EtaVerdict::GapFound {
                lower: lower.clone(),
                upper: upper.clone(),
                depth_checked: m,
            };
        }
    }
    let (min_index, min_value) = sorted.first().expect("nonempty");
    if overdue(min_index + 1) {
        return EtaVerdict::EndpointFound {
            witness: (*min_value).clone(),
            depth_checked: m,
        };
    }
    let (max_index, max_value) = sorted.last().expect("nonempty");
    if overdue(max_index + 1) {
        return EtaVerdict::EndpointFound {
            witness: (*max_value).clone(),
            depth_checked: m,
        };
    }
    EtaVerdict::ConsistentWithEta { depth_checked: m }
}

/// Cantor's alternating construction: odd steps take the next unmatched
/// element of `a` and match it to the least-index compatible element of `b`,
/// even steps conversely. Returns `n` pairs forming a partial order
/// isomorphism, strictly monotone in both directions.
pub fn back_and_forth(
    a: &CountableOrder,
    b: &CountableOrder,
    n: usize,
) -> Result<Vec<(DyadicRational, DyadicRational)>, Error> {
    for (side, order) in [("left", a), ("right", b)] {
        let verdict = eta_check(order, n.max(2));
        if !verdict.is_consistent() {
            return Err(Error::NotEta {
                depth: n,
                witness: format!("{side} order {}: {verdict:?}", order.name()),
            });
        }
    }
    const SEARCH_LIMIT: usize = 50_000;
    let mut pairs: Vec<(DyadicRational, DyadicRational)> = Vec::with_capacity(n);
    let mut next_a = 1usize; // least index of a not yet inspected as a source
    let mut next_b = 1usize;
    for round in 1..=n {
        let forward = round % 2 == 1;
        let (source, target, cursor) = if forward {
            (a, b, &mut next_a)
        } else {
            (b, a, &mut next_b)
        };
        // the next unmatched element of the source, in enumeration order
        let x = loop {
            let candidate = source.element(*cursor).ok_or(Error::NotEta {
                depth: n,
                witness: format!("order {} ran out of elements", source.name()),
            })?;
            *cursor += 1;
            let already = pairs.iter().any(|(pa, pb)| {
                if forward {
                    *pa == candidate
                } else {
                    *pb == candidate
                }
            });
            if !already {
                break candidate;
            }
        };
        // least-index compatible partner
        let mut partner = None;
        for j in 1..=SEARCH_LIMIT {
            let Some(y) = target.element(j) else { break };
            let taken = pairs
                .iter()
                .any(|(pa, pb)| if forward { *pb == y } else { *pa == y });
            if taken {
                continue;
            }
            let compatible = pairs.iter().all(|(pa, pb)| {
                let (px, py) = if forward { (pa, pb) } else { (pb, pa) };
                (x < *px) == (y < *py)
            });
            if compatible {
                partner = Some(y);
                break;
            }
        }
        let y = partner.ok_or(Error::NotEta {
            depth: n,
            witness: format!("no compatible partner for {x} in {}", target.name()),
        })?;
        pairs.push(if forward { (x, y) } else { (y, x) });
    }
    Ok(pairs)
}

/// Which side to approach a point from when the overlay is ambiguous there.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OverlayRule {
    Left,
    Right,
}

/// The image of a point under an overlay: an exact scale point, an exact
/// eventually periodic limit, or a depth-bounded approximant.
#[derive(Clone, PartialEq, Debug)]
pub enum OverlayImage {
    Dyadic(DyadicRational),
    Periodic {
        expansion: UltimatelyPeriodic,
        value: BigRational,
    },
    Approximant {
        digits: BinaryWord,
    },
}

impl OverlayImage {
    fn periodic_from_rational(value: BigRational) -> Self {
        if let Some(d) = DyadicRational::from_rational(&value) {
            return OverlayImage::Dyadic(d);
        }
        let expansion = UltimatelyPeriodic::expansion_of(&value);
        OverlayImage::Periodic { expansion, value }
    }

    /// Text rendering used by the command line driver.
    pub fn render(&self) -> String {
        match self {
            OverlayImage::Dyadic(d) => format!("value={d}"),
            OverlayImage::Periodic { expansion, value } => format!(
                "pre={} per={} value={}",
                expansion.preperiod(),
                expansion.period(),
                value
            ),
            OverlayImage::Approximant { digits } => {
                format!("approx=0.{digits} depth={}", digits.len())
            }
        }
    }
}

/// Default digit depth for approximant overlay images.
pub const OVERLAY_APPROX_DEPTH: usize = 24;

/// Extends the order isomorphism of the dyadic scale onto `scale` to a point
/// of the unit interval. At a scale point the `Right` rule returns its image
/// (the right-approach limit); the `Left` rule returns the limit of images
/// over dyadic sequences increasing to the point. Endpoints take the one
/// available limit.
pub fn overlay(
    scale: &CountableOrder,
    x: &DyadicRational,
    rule: OverlayRule,
) -> Result<OverlayImage, Error> {
    match scale.kind {
        OrderKind::DyadicMidpoints => Ok(OverlayImage::Dyadic(x.clone())),
        OrderKind::EvenScale => Ok(even_scale_overlay(x, rule)),
        OrderKind::Other => generic_overlay(scale, x, rule),
    }
}

/// The direct formulas for the even-position scale: the right image of a
/// dyadic is its digit-spread, the left image appends the tail
/// `sum 4^-k = 1/3` at the right scale.
fn even_scale_overlay(x: &DyadicRational, rule: OverlayRule) -> OverlayImage {
    let third = BigRational::new(1.into(), 3.into());
    if x.is_one() {
        // only the increasing limit exists: sup of the scale closure
        return OverlayImage::periodic_from_rational(third);
    }
    if x.is_zero() {
        return OverlayImage::Dyadic(DyadicRational::zero());
    }
    match rule {
        OverlayRule::Right => OverlayImage::Dyadic(even_scale_map(x)),
        OverlayRule::Left => {
            // x = .d_1..d_n with d_n = 1; images of .d_1..d_{n-1}0 1^k
            // increase to the spread of x - 2^-n plus sum_{k>n} 4^-k
            let n = x.exponent();
            let truncated = DyadicRational::new(x.numerator() - num_bigint::BigUint::one(), n)
                .expect("x - 2^-n stays in range");
            let base = even_scale_map(&truncated).to_rational();
            let tail = third / BigRational::from_integer(num_bigint::BigInt::from(4u32).pow(n));
            OverlayImage::periodic_from_rational(base + tail)
        }
    }
}

/// Overlay over an arbitrary scale through the back-and-forth isomorphism
/// with the canonical dyadic enumeration; limits that the partial isomorphism
/// cannot pin down exactly come back as approximants.
fn generic_overlay(
    scale: &CountableOrder,
    x: &DyadicRational,
    rule: OverlayRule,
) -> Result<OverlayImage, Error> {
    const ROUNDS: usize = 256;
    let d = CountableOrder::dyadic_scale();
    let pairs = back_and_forth(&d, scale, ROUNDS)?;
    if x.is_zero() || x.is_one() {
        // the infimum / supremum over matched images, as an approximant
        let mut bound: Option<DyadicRational> = None;
        for (_, img) in &pairs {
            let better = match (&bound, x.is_zero()) {
                (None, _) => true,
                (Some(b), true) => img < b,
                (Some(b), false) => img > b,
            };
            if better {
                bound = Some(img.clone());
            }
        }
        let bound = bound.expect("rounds > 0");
        return Ok(OverlayImage::Approximant {
            digits: approximant_digits(&bound, OVERLAY_APPROX_DEPTH),
        });
    }
    if rule == OverlayRule::Right {
        if let Some((_, img)) = pairs.iter().find(|(da, _)| da == x) {
            return Ok(OverlayImage::Dyadic(img.clone()));
        }
    }
    // the best one-sided bound among matched dyadics
    let mut best: Option<&(DyadicRational, DyadicRational)> = None;
    for pair in &pairs {
        let on_side = match rule {
            OverlayRule::Left => pair.0 < *x,
            OverlayRule::Right => pair.0 > *x,
        };
        if !on_side {
            continue;
        }
        let closer = match (best, rule) {
            (None, _) => true,
            (Some(b), OverlayRule::Left) => pair.0 > b.0,
            (Some(b), OverlayRule::Right) => pair.0 < b.0,
        };
        if closer {
            best = Some(pair);
        }
    }
    let best = best.ok_or(Error::NotEta {
        depth: ROUNDS,
        witness: format!("no matched scale element beside {x}"),
    })?;
    Ok(OverlayImage::Approximant {
        digits: approximant_digits(&best.1, OVERLAY_APPROX_DEPTH),
    })
}

fn approximant_digits(x: &DyadicRational, depth: usize) -> BinaryWord {
    let expansion = UltimatelyPeriodic::expansion_of(&x.to_rational());
    expansion.prefix(depth)
}

/// The decomposition of the closure of a countable set: the branching
/// system, its perfect kernel, and the enumerated prefix split into the
/// points on kernel branches (`j`), the left endpoints of complementary
/// gaps among them (`j2`), and the densely ordered remainder (`j1`).
#[derive(Clone, Debug)]
pub struct ClosureDecomposition {
    pub tree: TreeAutomaton,
    pub kernel: TreeAutomaton,
    pub rank: usize,
    /// Enumerated points lying on kernel branches.
    pub j: Vec<DyadicRational>,
    /// `j` minus the gap endpoints: densely ordered when the kernel is
    /// nonempty.
    pub j1: Vec<DyadicRational>,
    /// Points of `j` that are left endpoints of maximal complementary
    /// intervals of the closure.
    pub j2: Vec<DyadicRational>,
    /// True when the tree is a depth-truncated stand-in rather than an exact
    /// presentation.
    pub truncated: bool,
}

impl ClosureDecomposition {
    pub fn kernel_is_empty(&self) -> bool {
        self.kernel.is_empty()
    }
}

/// Builds the branching system of the closure of `m1`, runs the pruning to
/// its fixpoint, and classifies the enumerated prefix. Orders without an
/// exact presentation are handled through depth truncation: the first
/// `2^depth` elements stand in for the set, and the kernel-emptiness verdicts
/// of the last two depths must agree.
pub fn closure_construct(m1: &CountableOrder, depth: usize) -> Result<ClosureDecomposition, Error> {
    if let Some(tree) = m1.regular_presentation() {
        let tree = tree.clone();
        let (kernel, rank) = perfect_kernel(&tree);
        let elements = m1.prefix(DECOMPOSITION_PREFIX);
        let mut j = Vec::new();
        let mut j1 = Vec::new();
        let mut j2 = Vec::new();
        for x in elements {
            if kernel.contains_point(&x) {
                if tree.right_isolated(&x) {
                    j2.push(x.clone());
                } else {
                    j1.push(x.clone());
                }
                j.push(x);
            }
        }
        return Ok(ClosureDecomposition {
            tree,
            kernel,
            rank,
            j,
            j1,
            j2,
            truncated: false,
        });
    }
    truncated_closure(m1, depth)
}

/// The honest semidecision for arbitrary enumerations: sample the first
/// `2^depth` elements, iterate the truncated derivative, and demand that the
/// kernel-emptiness verdicts of the last two depths agree. The reported tree
/// presents the sample exactly; a nonempty kernel is reported as the cylinder
/// closure of the surviving truncation.
fn truncated_closure(m1: &CountableOrder, depth: usize) -> Result<ClosureDecomposition, Error> {
    use crate::oracle::{cylinder_extension, truncated_kernel_estimate};
    if depth < 2 {
        return Err(Error::DepthTooSmall("need depth at least 2".into()));
    }
    let sample_size = (1usize << depth.min(12)).max(64);
    let elements = m1.prefix(sample_size);
    let finite = CountableOrder::finite(elements)
        .map_err(|_| Error::DepthTooSmall("enumeration produced no elements".into()))?;
    let tree = finite
        .regular_presentation()
        .expect("finite orders are regular")
        .clone();

    let (survivors_prev, _) = truncated_kernel_estimate(&tree, depth - 1);
    let (survivors, rank) = truncated_kernel_estimate(&tree, depth);
    if survivors_prev.is_empty() != survivors.is_empty() {
        return Err(Error::DepthTooSmall(format!(
            "kernel emptiness flips between depths {} and {}",
            depth - 1,
            depth
        )));
    }
    let kernel = cylinder_extension(&survivors);
    let mut j = Vec::new();
    let mut j1 = Vec::new();
    let mut j2 = Vec::new();
    if !kernel.is_empty() {
        for x in m1.prefix(DECOMPOSITION_PREFIX) {
            if kernel.contains_point(&x) {
                if kernel.right_isolated(&x) {
                    j2.push(x.clone());
                } else {
                    j1.push(x.clone());
                }
                j.push(x);
            }
        }
    }
    Ok(ClosureDecomposition {
        tree,
        kernel,
        rank,
        j,
        j1,
        j2,
        truncated: true,
    })
}

/// A closed base set minus a countable exclusion enumeration.
#[derive(Clone, Debug)]
pub struct ExcludedSet {
    pub base: TreeAutomaton,
    pub exclusions: CountableOrder,
}

impl ExcludedSet {
    pub fn new(base: TreeAutomaton, exclusions: CountableOrder) -> Self {
        ExcludedSet { base, exclusions }
    }
}

/// Node-level membership for the difference: true iff `w` is a node of the
/// base and its interval is not reduced to excluded points only. Decided
/// exactly when the subtree below `w` is a single eventually periodic branch
/// equal to an exclusion; otherwise true — removing countably many points
/// never empties a node whose subtree still splits.
pub fn subtract_countable(m: &ExcludedSet, w: &BinaryWord) -> bool {
    let Some(state) = m.base.state_on_path(w) else {
        return false;
    };
    let Some(chain) = m.base.forced_chain(state) else {
        return true;
    };
    // the single point below w, exactly
    let full_word_value = {
        let pre = w.concat(chain.preperiod());
        UltimatelyPeriodic::new(pre, chain.period().clone()).value()
    };
    for i in 1..=EXCLUSION_SCAN {
        match m.exclusions.element(i) {
            Some(x) => {
                if x.to_rational() == full_word_value {
                    return false;
                }
            }
            None => break,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pruning::{classify, kernel_injection_path, Verdict};
    use crate::treeset::{build, SetDescription};

    fn dy(n: u64, e: u32) -> DyadicRational {
        DyadicRational::from_u64(n, e).unwrap()
    }

    #[test]
    fn breadth_first_enumeration_order() {
        let d = CountableOrder::dyadic_scale();
        let first: Vec<String> = d.prefix(7).iter().map(|x| x.to_string()).collect();
        assert_eq!(
            first,
            vec!["1/2^1", "1/2^2", "3/2^2", "1/2^3", "3/2^3", "5/2^3", "7/2^3"]
        );
    }

    #[test]
    fn eta_check_on_the_dyadic_scale() {
        let d = CountableOrder::dyadic_scale();
        assert!(eta_check(&d, 100).is_consistent());
        let e = CountableOrder::even_scale();
        assert!(eta_check(&e, 100).is_consistent());
    }

    #[test]
    fn eta_check_finds_the_omega_gap() {
        let omega = CountableOrder::omega();
        match eta_check(&omega, 50) {
            EtaVerdict::GapFound { lower, upper, .. } => {
                assert_eq!(lower, dy(1, 1));
                assert_eq!(upper, dy(3, 2));
            }
            other => panic!("expected a gap, got {other:?}"),
        }
    }

    #[test]
    fn eta_check_on_finite_orders_is_definitive() {
        let two = CountableOrder::finite(vec![dy(1, 2), dy(1, 1)]).unwrap();
        match eta_check(&two, 2) {
            EtaVerdict::GapFound { lower, upper, .. } => {
                assert_eq!(lower, dy(1, 2));
                assert_eq!(upper, dy(1, 1));
            }
            other => panic!("expected a gap, got {other:?}"),
        }
        let one = CountableOrder::finite(vec![dy(1, 1)]).unwrap();
        assert!(matches!(
            eta_check(&one, 2),
            EtaVerdict::EndpointFound { .. }
        ));
    }

    #[test]
    fn back_and_forth_identity_on_shared_enumeration() {
        let d = CountableOrder::dyadic_scale();
        let pairs = back_and_forth(&d, &d, 3).unwrap();
        for (i, (a, b)) in pairs.iter().enumerate() {
            let expected = d.element(i + 1).unwrap();
            assert_eq!(*a, expected);
            assert_eq!(*b, expected);
        }
    }

    #[test]
    fn back_and_forth_first_step_is_unconstrained() {
        let d = CountableOrder::dyadic_scale();
        let e = CountableOrder::even_scale();
        let pairs = back_and_forth(&d, &e, 1).unwrap();
        assert_eq!(pairs[0].0, d.element(1).unwrap());
        assert_eq!(pairs[0].1, e.element(1).unwrap());
    }

    #[test]
    fn back_and_forth_is_monotone_and_total() {
        let d = CountableOrder::dyadic_scale();
        let e = CountableOrder::even_scale();
        let pairs = back_and_forth(&d, &e, 100).unwrap();
        assert_eq!(pairs.len(), 100);
        for (i, (a1, b1)) in pairs.iter().enumerate() {
            for (a2, b2) in &pairs[i + 1..] {
                assert_eq!(a1 < a2, b1 < b2);
                assert_eq!(a1 > a2, b1 > b2);
            }
        }
        // totality: the first ceil(n/2) elements of each side are matched
        for i in 1..=50 {
            let da = d.element(i).unwrap();
            let eb = e.element(i).unwrap();
            assert!(pairs.iter().any(|(a, _)| *a == da), "d[{i}] unmatched");
            assert!(pairs.iter().any(|(_, b)| *b == eb), "e[{i}] unmatched");
        }
    }

    #[test]
    fn back_and_forth_rejects_non_eta_orders() {
        let d = CountableOrder::dyadic_scale();
        let omega = CountableOrder::omega();
        assert!(matches!(
            back_and_forth(&d, &omega, 10),
            Err(Error::NotEta { .. })
        ));
    }

    #[test]
    fn overlay_right_and_left_at_one_half() {
        let e = CountableOrder::even_scale();
        let right = overlay(&e, &dy(1, 1), OverlayRule::Right).unwrap();
        assert_eq!(right, OverlayImage::Dyadic(dy(1, 2)));
        let left = overlay(&e, &dy(1, 1), OverlayRule::Left).unwrap();
        match left {
            OverlayImage::Periodic { expansion, value } => {
                assert_eq!(value, BigRational::new(1.into(), 12.into()));
                assert_eq!(expansion.preperiod().to_string(), "00");
                assert_eq!(expansion.period().to_string(), "01");
            }
            other => panic!("expected the periodic 1/12, got {other:?}"),
        }
    }

    #[test]
    fn overlay_over_the_full_scale_is_the_identity() {
        let d = CountableOrder::dyadic_scale();
        for rule in [OverlayRule::Left, OverlayRule::Right] {
            let img = overlay(&d, &dy(5, 3), rule).unwrap();
            assert_eq!(img, OverlayImage::Dyadic(dy(5, 3)));
        }
    }

    #[test]
    fn overlay_right_agrees_with_the_direct_map() {
        let e = CountableOrder::even_scale();
        let d = CountableOrder::dyadic_scale();
        for i in 1..=500 {
            let x = d.element(i).unwrap();
            let img = overlay(&e, &x, OverlayRule::Right).unwrap();
            assert_eq!(img, OverlayImage::Dyadic(even_scale_map(&x)));
        }
    }

    #[test]
    fn overlay_is_monotone_under_the_right_rule() {
        let e = CountableOrder::even_scale();
        let d = CountableOrder::dyadic_scale();
        let mut images: Vec<(DyadicRational, DyadicRational)> = (1..=200)
            .map(|i| {
                let x = d.element(i).unwrap();
                let OverlayImage::Dyadic(y) = overlay(&e, &x, OverlayRule::Right).unwrap() else {
                    panic!("scale points map to scale points")
                };
                (x, y)
            })
            .collect();
        images.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in images.windows(2) {
            assert!(pair[0].1 < pair[1].1);
        }
    }

    #[test]
    fn overlay_endpoints() {
        let e = CountableOrder::even_scale();
        assert_eq!(
            overlay(&e, &DyadicRational::zero(), OverlayRule::Left).unwrap(),
            OverlayImage::Dyadic(DyadicRational::zero())
        );
        for rule in [OverlayRule::Left, OverlayRule::Right] {
            match overlay(&e, &DyadicRational::one(), rule).unwrap() {
                OverlayImage::Periodic { value, .. } => {
                    assert_eq!(value, BigRational::new(1.into(), 3.into()));
                }
                other => panic!("expected the periodic 1/3, got {other:?}"),
            }
        }
        // the extension stays weakly monotone out to the endpoints
        let value_of = |img: &OverlayImage| match img {
            OverlayImage::Dyadic(d) => d.to_rational(),
            OverlayImage::Periodic { value, .. } => value.clone(),
            OverlayImage::Approximant { .. } => panic!("exact scale"),
        };
        let lo = value_of(&overlay(&e, &DyadicRational::zero(), OverlayRule::Right).unwrap());
        let hi = value_of(&overlay(&e, &DyadicRational::one(), OverlayRule::Right).unwrap());
        for i in 1..=50 {
            let x = CountableOrder::dyadic_scale().element(i).unwrap();
            let v = value_of(&overlay(&e, &x, OverlayRule::Right).unwrap());
            assert!(lo <= v && v <= hi);
        }
    }

    #[test]
    fn closure_of_the_dyadic_scale_is_everything() {
        let d = CountableOrder::dyadic_scale();
        let dec = closure_construct(&d, 8).unwrap();
        assert_eq!(dec.tree, TreeAutomaton::full());
        assert_eq!(dec.kernel, TreeAutomaton::full());
        assert_eq!(dec.rank, 0);
        assert_eq!(dec.j.len(), DECOMPOSITION_PREFIX);
        assert!(dec.j2.is_empty());
        assert_eq!(dec.j1, dec.j);
    }

    #[test]
    fn closure_of_a_finite_set_is_countable() {
        let m1 = CountableOrder::finite(vec![dy(1, 2), dy(1, 1)]).unwrap();
        let dec = closure_construct(&m1, 8).unwrap();
        assert!(dec.kernel_is_empty());
        assert_eq!(dec.rank, 1);
        assert!(dec.j.is_empty());
        assert!(dec.j1.is_empty());
        assert!(dec.j2.is_empty());
    }

    #[test]
    fn closure_of_the_even_scale() {
        let e = CountableOrder::even_scale();
        let dec = closure_construct(&e, 8).unwrap();
        assert_eq!(dec.tree, build(&SetDescription::EScale).unwrap());
        assert_eq!(dec.rank, 1);
        assert!(!dec.kernel_is_empty());
        // every scale point lies on a kernel branch and none is a left gap
        // endpoint (the scale approaches each of its points from the right)
        assert_eq!(dec.j.len(), DECOMPOSITION_PREFIX);
        assert!(dec.j2.is_empty());
        assert_eq!(dec.j1.len(), DECOMPOSITION_PREFIX);
    }

    #[test]
    fn closure_with_a_gap_endpoint_in_j2() {
        // dyadics of (0, 1/2) together with 1/2 and 3/4: the closure is
        // [0, 1/2] union {3/4}; the point 1/2 is on a kernel branch and has
        // the gap (1/2, 3/4) to its right; 3/4 is not on a kernel branch.
        let regular = build(&SetDescription::Union(vec![
            SetDescription::Interval(DyadicRational::zero(), dy(1, 1)),
            SetDescription::Point(dy(3, 2)),
        ]))
        .unwrap();
        let m1 = CountableOrder::from_enumeration(
            "halfline-plus-point",
            |i| match i {
                1 => Some(DyadicRational::from_u64(1, 1).unwrap()),
                2 => Some(DyadicRational::from_u64(3, 2).unwrap()),
                i => {
                    let x = breadth_first_dyadic(i - 2);
                    // squeeze the scale into (0, 1/2)
                    Some(DyadicRational::new(x.numerator().clone(), x.exponent() + 1).unwrap())
                }
            },
            Some(regular),
        );
        let dec = closure_construct(&m1, 8).unwrap();
        assert_eq!(dec.j2, vec![dy(1, 1)]);
        assert!(dec.j.contains(&dy(1, 1)));
        assert!(!dec.j.contains(&dy(3, 2)));
        assert_eq!(dec.j1.len(), dec.j.len() - 1);
    }

    #[test]
    fn truncated_closure_is_stable_for_tame_enumerations() {
        // the dyadic scale without its exact presentation: sampling plus the
        // finite derivative still reports a nonempty kernel consistently
        let anonymous = CountableOrder::from_enumeration(
            "anonymous-dyadics",
            |i| Some(breadth_first_dyadic(i)),
            None,
        );
        let dec = closure_construct(&anonymous, 8).unwrap();
        assert!(dec.truncated);
        assert!(!dec.kernel_is_empty());
    }

    #[test]
    fn truncated_closure_reports_instability() {
        // the 63 dyadic midpoints of levels 1..=6 look full at shallow depths
        // but thin out into chains deeper down; somewhere along the way two
        // consecutive depths must disagree about kernel emptiness
        let grid = CountableOrder::from_enumeration(
            "level-6-grid",
            |i| (i <= 63).then(|| breadth_first_dyadic(i)),
            None,
        );
        let flip =
            (3..=16).find(|&d| matches!(closure_construct(&grid, d), Err(Error::DepthTooSmall(_))));
        assert!(
            flip.is_some(),
            "no unstable depth found for the finite grid"
        );
    }

    #[test]
    fn subtract_countable_examples() {
        // removing every dyadic from the full interval empties no node
        let full = ExcludedSet::new(TreeAutomaton::full(), CountableOrder::dyadic_scale());
        assert!(subtract_countable(&full, &"0110".parse().unwrap()));

        // the lone branch of {0} is excluded by {0}
        let zero_base = build(&SetDescription::Point(DyadicRational::zero())).unwrap();
        let m = ExcludedSet::new(
            zero_base,
            CountableOrder::finite(vec![DyadicRational::zero()]).unwrap(),
        );
        assert!(!subtract_countable(&m, &BinaryWord::empty()));

        // a non-node stays a non-node
        assert!(!subtract_countable(&m, &"1".parse().unwrap()));
    }

    #[test]
    fn exclusions_leave_kernel_nodes_populated() {
        let avoid = build(&SetDescription::Avoid("11".parse().unwrap())).unwrap();
        let c = classify(&avoid);
        assert_eq!(c.verdict, Verdict::Continuum);
        let exclusions =
            CountableOrder::finite(CountableOrder::dyadic_scale().prefix(100)).unwrap();
        let m = ExcludedSet::new(avoid.clone(), exclusions);
        for n in 0u32..1024 {
            let w = BinaryWord::from_bits((0..10).map(|i| ((n >> (9 - i)) & 1) as u8));
            let path = kernel_injection_path(&c.kernel, &w).unwrap();
            assert!(subtract_countable(&m, &path));
        }
    }
}
