//! Exact arithmetic on dyadic rationals `a/2^n` in the unit interval, finite
//! binary words, dyadic interval nodes `[a*2^-n, (a+1)*2^-n]`, and the
//! order-preserving embedding of the dyadic scale into the even-position scale.
//!
//! Everything here is exact; there is no floating point anywhere in the crate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;

/// A dyadic rational `numerator / 2^exponent` confined to `[0, 1]`.
///
/// Invariants: the representation is normalized (`exponent == 0` or the
/// numerator is odd) and `numerator <= 2^exponent`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigUint,
    exponent: u32,
}

impl DyadicRational {
    /// Builds `numerator / 2^exponent`, normalizing the representation.
    pub fn new(numerator: BigUint, exponent: u32) -> Result<Self, Error> {
        let bound = BigUint::one() << exponent;
        if numerator > bound {
            return Err(Error::OutOfRange(format!("{numerator}/2^{exponent}")));
        }
        let mut n = numerator;
        let mut e = exponent;
        while e > 0 && !n.is_zero() && !n.bit(0) {
            n >>= 1;
            e -= 1;
        }
        if n.is_zero() {
            e = 0;
        }
        Ok(DyadicRational {
            numerator: n,
            exponent: e,
        })
    }

    pub fn from_u64(numerator: u64, exponent: u32) -> Result<Self, Error> {
        Self::new(BigUint::from(numerator), exponent)
    }

    pub fn zero() -> Self {
        DyadicRational {
            numerator: BigUint::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        DyadicRational {
            numerator: BigUint::one(),
            exponent: 0,
        }
    }

    pub fn half() -> Self {
        DyadicRational {
            numerator: BigUint::one(),
            exponent: 1,
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0 && self.numerator.is_one()
    }

    /// Fractional digits `d_1 .. d_n` of the finite expansion, 1-based, with
    /// `n = exponent`. The last digit is 1 unless the value is 0 or 1; the
    /// endpoints have an empty digit list.
    pub fn digits(&self) -> BinaryWord {
        let mut bits = Vec::with_capacity(self.exponent as usize);
        for i in 1..=self.exponent {
            bits.push(u8::from(self.numerator.bit((self.exponent - i) as u64)));
        }
        BinaryWord(bits)
    }

    /// Reassembles a value from fractional digits.
    pub fn from_digits(digits: &BinaryWord) -> Self {
        let mut n = BigUint::zero();
        for &b in &digits.0 {
            n = (n << 1) + BigUint::from(b);
        }
        DyadicRational::new(n, digits.len() as u32).expect("digits stay in [0,1]")
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator.clone()),
            BigInt::from(BigUint::one() << self.exponent),
        )
    }

    /// Converts back from an exact rational when it is dyadic and in `[0,1]`.
    pub fn from_rational(r: &BigRational) -> Option<Self> {
        if r < &BigRational::zero() || r > &BigRational::one() {
            return None;
        }
        let den = r.denom().magnitude().clone();
        let exponent = den.trailing_zeros().unwrap_or(0);
        if den != BigUint::one() << exponent {
            return None;
        }
        Some(
            DyadicRational::new(r.numer().magnitude().clone(), exponent.to_u32()?)
                .expect("checked range"),
        )
    }

    /// Exact midpoint of two dyadic rationals; always dyadic again.
    pub fn average(&self, other: &Self) -> Self {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        DyadicRational::new(a + b, e + 1).expect("average stays in [0,1]")
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for DyadicRational {
    type Err = Error;

    /// Parses the `a/2^n` grammar, e.g. `5/2^4`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::MalformedDescription(format!("expected a/2^n, got {s:?}"));
        let (num, den) = s.split_once('/').ok_or_else(bad)?;
        let exp = den.strip_prefix("2^").ok_or_else(bad)?;
        let numerator: BigUint = num.trim().parse().map_err(|_| bad())?;
        let exponent: u32 = exp.trim().parse().map_err(|_| bad())?;
        DyadicRational::new(numerator, exponent)
    }
}

/// A finite word over `{0, 1}`. The empty word denotes the root interval
/// `[0, 1]`; the word `d_1 .. d_n` denotes the depth-`n` node reached by
/// reading digits from the root.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BinaryWord(Vec<u8>);

impl BinaryWord {
    pub fn empty() -> Self {
        BinaryWord(Vec::new())
    }

    pub fn from_bits(bits: impl IntoIterator<Item = u8>) -> Self {
        let v: Vec<u8> = bits.into_iter().collect();
        debug_assert!(v.iter().all(|&b| b <= 1));
        BinaryWord(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn bits(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.0.push(bit);
    }

    pub fn child(&self, bit: u8) -> Self {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut w = self.clone();
        w.0.extend_from_slice(&other.0);
        w
    }

    pub fn prefix(&self, len: usize) -> Self {
        BinaryWord(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn parent(&self) -> Option<Self> {
        if self.is_empty() {
            None
        } else {
            Some(self.prefix(self.len() - 1))
        }
    }

    pub fn is_prefix_of(&self, other: &Self) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            // The empty word is printed as `e` so that output lines stay parseable.
            return write!(f, "e");
        }
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "e" {
            return Ok(BinaryWord::empty());
        }
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => {
                    return Err(Error::MalformedDescription(format!(
                        "expected a 0/1 word, got {s:?}"
                    )))
                }
            }
        }
        Ok(BinaryWord(bits))
    }
}

/// The closed interval `[index * 2^-level, (index + 1) * 2^-level]`, i.e. one
/// node of the dyadic branching system. Nodes at depth `n` are in bijection
/// with binary words of length `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicInterval {
    level: usize,
    index: BigUint,
}

impl DyadicInterval {
    pub fn new(level: usize, index: BigUint) -> Result<Self, Error> {
        if index >= (BigUint::one() << level) {
            return Err(Error::OutOfRange(format!(
                "node index {index} at level {level}"
            )));
        }
        Ok(DyadicInterval { level, index })
    }

    pub fn root() -> Self {
        DyadicInterval {
            level: 0,
            index: BigUint::zero(),
        }
    }

    /// The node addressed by a word: level `|w|`, index `sum w_i 2^(|w|-i)`.
    pub fn from_word(w: &BinaryWord) -> Self {
        let mut index = BigUint::zero();
        for b in w.bits() {
            index = (index << 1) + BigUint::from(b);
        }
        DyadicInterval {
            level: w.len(),
            index,
        }
    }

    /// Inverse of [`DyadicInterval::from_word`].
    pub fn to_word(&self) -> BinaryWord {
        let mut bits = Vec::with_capacity(self.level);
        for i in (0..self.level).rev() {
            bits.push(u8::from(self.index.bit(i as u64)));
        }
        BinaryWord(bits)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn index(&self) -> &BigUint {
        &self.index
    }

    pub fn lower(&self) -> DyadicRational {
        DyadicRational::new(self.index.clone(), self.level as u32).expect("index < 2^level")
    }

    pub fn upper(&self) -> DyadicRational {
        DyadicRational::new(&self.index + BigUint::one(), self.level as u32)
            .expect("index + 1 <= 2^level")
    }

    pub fn lower_rational(&self) -> BigRational {
        self.lower().to_rational()
    }

    pub fn upper_rational(&self) -> BigRational {
        self.upper().to_rational()
    }

    /// Closed-interval containment of a point.
    pub fn contains(&self, x: &DyadicRational) -> bool {
        *x >= self.lower() && *x <= self.upper()
    }

    /// Interiors are disjoint iff the closed intervals overlap in at most a point.
    pub fn interior_disjoint(&self, other: &Self) -> bool {
        self.upper() <= other.lower() || other.upper() <= self.lower()
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}/2^{}, {}/2^{}]",
            self.index,
            self.level,
            &self.index + BigUint::one(),
            self.level
        )
    }
}

impl fmt::Debug for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Maps `sum d_i 2^-i` to `sum d_i 2^-2i`: each fractional digit moves to the
/// even position twice as deep. Strictly order-preserving on `[0, 1]`; the
/// image of the interior lies in the even-position scale below `1/3`.
///
/// The endpoint `1` has no fractional expansion and is fixed by convention.
pub fn even_scale_map(x: &DyadicRational) -> DyadicRational {
    if x.is_one() {
        return DyadicRational::one();
    }
    let digits = x.digits();
    let mut n = BigUint::zero();
    let e = 2 * x.exponent();
    for (i, b) in digits.bits().enumerate() {
        if b == 1 {
            // digit at position i+1 lands at position 2(i+1)
            n.set_bit((e - 2 * (i as u32 + 1)) as u64, true);
        }
    }
    DyadicRational::new(n, e).expect("image stays in [0,1]")
}

/// True iff every odd-position digit of the finite expansion is 0.
pub fn in_even_scale(x: &DyadicRational) -> bool {
    x.digits().bits().step_by(2).all(|b| b == 0)
}

/// An eventually periodic infinite word `pre . per per per ...`; the finite
/// and exact witness format for non-splitting branches and overlay limits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UltimatelyPeriodic {
    pre: BinaryWord,
    per: BinaryWord,
}

impl UltimatelyPeriodic {
    pub fn new(pre: BinaryWord, per: BinaryWord) -> Self {
        assert!(!per.is_empty(), "period must be nonempty");
        UltimatelyPeriodic { pre, per }
    }

    pub fn constant(bit: u8) -> Self {
        UltimatelyPeriodic::new(BinaryWord::empty(), BinaryWord::from_bits([bit]))
    }

    pub fn preperiod(&self) -> &BinaryWord {
        &self.pre
    }

    pub fn period(&self) -> &BinaryWord {
        &self.per
    }

    pub fn digit(&self, i: usize) -> u8 {
        if i < self.pre.len() {
            self.pre.bit(i)
        } else {
            self.per.bit((i - self.pre.len()) % self.per.len())
        }
    }

    pub fn prefix(&self, len: usize) -> BinaryWord {
        BinaryWord::from_bits((0..len).map(|i| self.digit(i)))
    }

    /// Exact value `0.d_1 d_2 ...` as a rational.
    pub fn value(&self) -> BigRational {
        let mut pre_num = BigUint::zero();
        for b in self.pre.bits() {
            pre_num = (pre_num << 1) + BigUint::from(b);
        }
        let mut per_num = BigUint::zero();
        for b in self.per.bits() {
            per_num = (per_num << 1) + BigUint::from(b);
        }
        let pre_part = BigRational::new(
            BigInt::from(pre_num),
            BigInt::from(BigUint::one() << self.pre.len()),
        );
        let per_den = (BigUint::one() << self.per.len()) - BigUint::one();
        let per_part = BigRational::new(BigInt::from(per_num), BigInt::from(per_den))
            / BigRational::from_integer(BigInt::from(BigUint::one() << self.pre.len()));
        pre_part + per_part
    }

    /// Lexicographic comparison; sound because two eventually periodic words
    /// agreeing past both preperiods for a full common period agree forever.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        let horizon =
            self.pre.len().max(other.pre.len()) + self.per.len().lcm(&other.per.len()) + 1;
        for i in 0..horizon {
            match self.digit(i).cmp(&other.digit(i)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    /// The standard (greedy) binary expansion of a rational in `[0, 1]`.
    /// Dyadic inputs get their canonical expansion ending in `0^omega`; the
    /// value `1` becomes `1^omega`.
    pub fn expansion_of(r: &BigRational) -> Self {
        assert!(
            r >= &BigRational::zero() && r <= &BigRational::one(),
            "expansion_of needs a value in [0,1]"
        );
        if r == &BigRational::one() {
            return UltimatelyPeriodic::constant(1);
        }
        // Long division by tracking remainders; a repeated remainder closes
        // the period.
        let den = r.denom().magnitude().clone();
        let mut rem = r.numer().magnitude().clone();
        let mut seen: Vec<BigUint> = Vec::new();
        let mut digits: Vec<u8> = Vec::new();
        loop {
            if let Some(pos) = seen.iter().position(|s| *s == rem) {
                let pre = BinaryWord::from_bits(digits[..pos].iter().copied());
                let per = BinaryWord::from_bits(digits[pos..].iter().copied());
                return UltimatelyPeriodic::new(pre, per);
            }
            seen.push(rem.clone());
            rem <<= 1;
            if rem >= den {
                digits.push(1);
                rem -= &den;
            } else {
                digits.push(0);
            }
        }
    }

    /// The lexicographically least expansion of a rational in `[0, 1]`: the
    /// `pre 0 1^omega` form for positive dyadics, the unique expansion
    /// otherwise.
    pub fn least_expansion_of(r: &BigRational) -> Self {
        if let Some(d) = DyadicRational::from_rational(r) {
            if d.is_zero() {
                return UltimatelyPeriodic::constant(0);
            }
            let digits = d.digits();
            if digits.is_empty() {
                // the value 1
                return UltimatelyPeriodic::constant(1);
            }
            let mut pre = digits.prefix(digits.len() - 1);
            pre.push(0);
            return UltimatelyPeriodic::new(pre, BinaryWord::from_bits([1]));
        }
        Self::expansion_of(r)
    }

    /// True when the tail is constantly 0 from some point on.
    pub fn eventually_zero(&self) -> bool {
        self.per.bits().all(|b| b == 0)
    }
}

impl fmt::Display for UltimatelyPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})*", self.pre, self.per)
    }
}

impl fmt::Debug for UltimatelyPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dy(n: u64, e: u32) -> DyadicRational {
        DyadicRational::from_u64(n, e).unwrap()
    }

    #[test]
    fn word_to_interval_examples() {
        let root = DyadicInterval::from_word(&BinaryWord::empty());
        assert_eq!(root.level(), 0);
        assert!(root.index().is_zero());

        let one = DyadicInterval::from_word(&"1".parse().unwrap());
        assert_eq!(one.level(), 1);
        assert_eq!(*one.index(), BigUint::from(1u32));
        assert_eq!(one.lower(), dy(1, 1));
        assert_eq!(one.upper(), dy(1, 0));

        // "011" -> level 3, index 0*4 + 1*2 + 1 = 3, i.e. [3/8, 4/8]
        let iv = DyadicInterval::from_word(&"011".parse().unwrap());
        assert_eq!(iv.level(), 3);
        assert_eq!(*iv.index(), BigUint::from(3u32));
        assert_eq!(iv.lower(), dy(3, 3));
        assert_eq!(iv.upper(), dy(1, 1));
    }

    #[test]
    fn even_scale_map_examples() {
        assert_eq!(
            even_scale_map(&DyadicRational::zero()),
            DyadicRational::zero()
        );
        assert_eq!(even_scale_map(&dy(1, 1)), dy(1, 2));
        // 3/4 = 0.11 maps to 0.0101 = 5/16
        assert_eq!(even_scale_map(&dy(3, 2)), dy(5, 4));
    }

    #[test]
    fn in_even_scale_examples() {
        assert!(in_even_scale(&dy(1, 2)));
        assert!(!in_even_scale(&dy(1, 1)));
        assert!(in_even_scale(&dy(5, 4)));
        assert!(in_even_scale(&DyadicRational::zero()));
    }

    #[test]
    fn display_and_parse_round_trip() {
        for (n, e) in [(0u64, 0u32), (1, 0), (1, 1), (5, 4), (3, 2), (1023, 10)] {
            let x = dy(n, e);
            let back: DyadicRational = x.to_string().parse().unwrap();
            assert_eq!(x, back);
        }
        assert!("3/4".parse::<DyadicRational>().is_err());
        assert!("5/2^2".parse::<DyadicRational>().is_err(), "5/4 > 1");
    }

    #[test]
    fn normalization_is_canonical() {
        let a = DyadicRational::new(BigUint::from(6u32), 3).unwrap();
        let b = DyadicRational::new(BigUint::from(3u32), 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.numerator(), &BigUint::from(3u32));
        assert_eq!(a.exponent(), 2);
    }

    #[test]
    fn digits_round_trip() {
        let x = dy(5, 4);
        let d = x.digits();
        assert_eq!(d.to_string(), "0101");
        assert_eq!(DyadicRational::from_digits(&d), x);
    }

    #[test]
    fn ultimately_periodic_values() {
        // 0.(00)(01)* = 1/12
        let w = UltimatelyPeriodic::new("00".parse().unwrap(), "01".parse().unwrap());
        assert_eq!(w.value(), BigRational::new(1.into(), 12.into()));
        // 0.(01)* = 1/3
        let third = UltimatelyPeriodic::new(BinaryWord::empty(), "01".parse().unwrap());
        assert_eq!(third.value(), BigRational::new(1.into(), 3.into()));
        // round trip through expansion_of
        let r = BigRational::new(1.into(), 12.into());
        let e = UltimatelyPeriodic::expansion_of(&r);
        assert_eq!(e.value(), r);
        assert_eq!(e.preperiod().to_string(), "00");
        assert_eq!(e.period().to_string(), "01");
    }

    #[test]
    fn least_expansion_of_dyadics() {
        let half = BigRational::new(1.into(), 2.into());
        let w = UltimatelyPeriodic::least_expansion_of(&half);
        assert_eq!(w.preperiod().to_string(), "0");
        assert_eq!(w.period().to_string(), "1");
        assert_eq!(w.value(), half);
        assert_eq!(
            UltimatelyPeriodic::least_expansion_of(&BigRational::zero()),
            UltimatelyPeriodic::constant(0)
        );
    }

    #[test]
    fn lex_cmp_agrees_with_value_on_distinct_points() {
        let a = UltimatelyPeriodic::expansion_of(&BigRational::new(1.into(), 3.into()));
        let b = UltimatelyPeriodic::expansion_of(&BigRational::new(2.into(), 5.into()));
        assert_eq!(a.lex_cmp(&b), Ordering::Less);
        assert_eq!(b.lex_cmp(&a), Ordering::Greater);
        assert_eq!(a.lex_cmp(&a), Ordering::Equal);
    }

    proptest! {
        #[test]
        fn word_interval_round_trip(bits in proptest::collection::vec(0u8..2, 0..24)) {
            let w = BinaryWord::from_bits(bits);
            let iv = DyadicInterval::from_word(&w);
            prop_assert_eq!(iv.to_word(), w);
        }

        #[test]
        fn normalization_unique(raw in 0u64..u64::MAX, e in 0u32..16, shift in 0u32..4) {
            let n = raw % ((1u64 << e) + 1);
            let a = DyadicRational::from_u64(n, e).unwrap();
            let b = DyadicRational::from_u64(n << shift, e + shift).unwrap();
            prop_assert_eq!(a.numerator(), b.numerator());
            prop_assert_eq!(a.exponent(), b.exponent());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]
        #[test]
        fn even_scale_map_monotone(raw_a in 0u64..u64::MAX, raw_b in 0u64..u64::MAX, e in 1u32..15) {
            let bound = 1u64 << e;
            let a = raw_a % (bound + 1);
            let b = raw_b % (bound + 1);
            prop_assume!(a != b);
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            let x = DyadicRational::from_u64(x, e).unwrap();
            let y = DyadicRational::from_u64(y, e).unwrap();
            let fx = even_scale_map(&x);
            let fy = even_scale_map(&y);
            prop_assert!(fx < fy);
            prop_assert!(in_even_scale(&fx));
            prop_assert!(in_even_scale(&fy));
        }
    }
}
