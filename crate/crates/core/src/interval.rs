//! Finite unions of integer intervals with infinite endpoints.
//!
//! An [`IntervalSet`] lives on one axis, either all of ℤ or a ray `[start, +∞)`.
//! Values are kept in a unique normal form: intervals are nonempty, clipped to
//! the axis, ascending, and separated by at least one missing integer. Two sets
//! are equal exactly when their interval lists are identical.

use std::cmp::{max, min};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// The integers an axis ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum AxisDomain {
    Integers,
    /// `{start, start + 1, ...}`
    From(i64),
}

impl AxisDomain {
    /// ℕ starting at 0, used for ray axes.
    pub const NAT0: AxisDomain = AxisDomain::From(0);
    /// ℕ starting at 1, used for the Urysohn row axis.
    pub const NAT1: AxisDomain = AxisDomain::From(1);

    pub fn lower(self) -> Endpoint {
        match self {
            AxisDomain::Integers => Endpoint::NegInf,
            AxisDomain::From(s) => Endpoint::Int(s),
        }
    }

    pub fn contains(self, n: i64) -> bool {
        match self {
            AxisDomain::Integers => true,
            AxisDomain::From(s) => n >= s,
        }
    }
}

/// An interval endpoint. The derived order puts `NegInf` below every integer and
/// `PosInf` above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Endpoint {
    NegInf,
    Int(i64),
    PosInf,
}

impl Endpoint {
    fn succ(self) -> Endpoint {
        match self {
            Endpoint::Int(n) => Endpoint::Int(n.saturating_add(1)),
            e => e,
        }
    }

    fn pred(self) -> Endpoint {
        match self {
            Endpoint::Int(n) => Endpoint::Int(n.saturating_sub(1)),
            e => e,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Endpoint::Int(n) => Some(n),
            _ => None,
        }
    }
}

/// A closed interval `[lo, hi]`; `lo` is never `+∞` and `hi` never `-∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
}

impl Interval {
    pub fn new(lo: Endpoint, hi: Endpoint) -> Result<Self> {
        if lo == Endpoint::PosInf || hi == Endpoint::NegInf {
            return Err(Error::MalformedInterval(format!(
                "infinite endpoint on the wrong side: ({lo:?}, {hi:?})"
            )));
        }
        if lo > hi {
            return Err(Error::MalformedInterval(format!("lower end above upper end: ({lo:?}, {hi:?})")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= Endpoint::Int(n) && Endpoint::Int(n) <= self.hi
    }

    /// Some integer inside the interval.
    pub fn representative(&self) -> i64 {
        match (self.lo, self.hi) {
            (Endpoint::Int(l), _) => l,
            (_, Endpoint::Int(h)) => h,
            _ => 0,
        }
    }

    pub fn cardinality(&self) -> Option<u64> {
        match (self.lo, self.hi) {
            (Endpoint::Int(l), Endpoint::Int(h)) => Some((h - l) as u64 + 1),
            _ => None,
        }
    }
}

/// A normalized finite union of intervals on one axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntervalSet {
    domain: AxisDomain,
    intervals: Vec<Interval>,
}

/// Summary of an [`IntervalSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub is_empty: bool,
    /// `Some(n)` when the set is finite with `n` elements.
    pub cardinality: Option<u64>,
    pub is_cofinite: bool,
    pub has_plus_end: bool,
    pub has_minus_end: bool,
}

impl IntervalSet {
    /// Builds a normalized set from raw endpoint pairs; overlapping and adjacent
    /// pairs merge, and everything is clipped to the axis.
    pub fn new(domain: AxisDomain, raw: &[(Endpoint, Endpoint)]) -> Result<Self> {
        let mut ivs = Vec::with_capacity(raw.len());
        for &(lo, hi) in raw {
            ivs.push(Interval::new(lo, hi)?);
        }
        Ok(Self::normalize(domain, ivs))
    }

    /// Convenience constructor from finite pairs.
    pub fn from_pairs(domain: AxisDomain, raw: &[(i64, i64)]) -> Result<Self> {
        let raw: Vec<_> = raw.iter().map(|&(l, h)| (Endpoint::Int(l), Endpoint::Int(h))).collect();
        Self::new(domain, &raw)
    }

    pub fn empty(domain: AxisDomain) -> Self {
        IntervalSet { domain, intervals: Vec::new() }
    }

    pub fn full(domain: AxisDomain) -> Self {
        IntervalSet { domain, intervals: vec![Interval { lo: domain.lower(), hi: Endpoint::PosInf }] }
    }

    pub fn point(domain: AxisDomain, n: i64) -> Self {
        Self::normalize(domain, vec![Interval { lo: Endpoint::Int(n), hi: Endpoint::Int(n) }])
    }

    /// `[lo, hi]` clipped to the axis; empty when `lo > hi`.
    pub fn range(domain: AxisDomain, lo: Endpoint, hi: Endpoint) -> Self {
        match Interval::new(lo, hi) {
            Ok(iv) => Self::normalize(domain, vec![iv]),
            Err(_) => Self::empty(domain),
        }
    }

    pub fn at_least(domain: AxisDomain, n: i64) -> Self {
        Self::range(domain, Endpoint::Int(n), Endpoint::PosInf)
    }

    pub fn at_most(domain: AxisDomain, n: i64) -> Self {
        Self::range(domain, Endpoint::NegInf, Endpoint::Int(n))
    }

    pub(crate) fn normalize(domain: AxisDomain, mut ivs: Vec<Interval>) -> Self {
        let floor = domain.lower();
        ivs.retain_mut(|iv| {
            iv.lo = max(iv.lo, floor);
            iv.lo <= iv.hi
        });
        ivs.sort();
        let mut out: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi.succ() => last.hi = max(last.hi, iv.hi),
                _ => out.push(iv),
            }
        }
        IntervalSet { domain, intervals: out }
    }

    pub fn domain(&self) -> AxisDomain {
        self.domain
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        *self == Self::full(self.domain)
    }

    pub fn contains(&self, n: i64) -> bool {
        self.domain.contains(n) && self.intervals.iter().any(|iv| iv.contains(n))
    }

    fn check_axis(&self, other: &Self) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::AxisMismatch)
        }
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cursor = self.domain.lower();
        for iv in &self.intervals {
            if iv.lo > cursor {
                out.push(Interval { lo: cursor, hi: iv.lo.pred() });
            }
            match iv.hi {
                Endpoint::PosInf => return IntervalSet { domain: self.domain, intervals: out },
                hi => cursor = hi.succ(),
            }
        }
        out.push(Interval { lo: cursor, hi: Endpoint::PosInf });
        IntervalSet { domain: self.domain, intervals: out }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_axis(other)?;
        let all = self.intervals.iter().chain(&other.intervals).copied().collect();
        Ok(Self::normalize(self.domain, all))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_axis(other)?;
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = max(a[i].lo, b[j].lo);
            let hi = min(a[i].hi, b[j].hi);
            if lo <= hi {
                out.push(Interval { lo, hi });
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Ok(IntervalSet { domain: self.domain, intervals: out })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_axis(other)?;
        self.intersect(&other.complement())
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn meets(&self, other: &Self) -> Result<bool> {
        Ok(!self.intersect(other)?.is_empty())
    }

    pub fn cardinality(&self) -> Option<u64> {
        self.intervals.iter().try_fold(0u64, |acc, iv| iv.cardinality().map(|c| acc + c))
    }

    pub fn has_plus_end(&self) -> bool {
        self.intervals.last().is_some_and(|iv| iv.hi == Endpoint::PosInf)
    }

    pub fn has_minus_end(&self) -> bool {
        self.intervals.first().is_some_and(|iv| iv.lo == Endpoint::NegInf)
    }

    pub fn classify(&self) -> Classification {
        Classification {
            is_empty: self.is_empty(),
            cardinality: self.cardinality(),
            is_cofinite: self.complement().cardinality().is_some(),
            has_plus_end: self.has_plus_end(),
            has_minus_end: self.has_minus_end(),
        }
    }

    /// Finite points where membership can change: every finite `lo` and `hi + 1`.
    pub fn breakpoints(&self) -> impl Iterator<Item = i64> + '_ {
        self.intervals.iter().flat_map(|iv| {
            let lo = iv.lo.finite();
            let hi = iv.hi.finite().map(|h| h + 1);
            lo.into_iter().chain(hi)
        })
    }

    /// Largest absolute value of a finite endpoint, 0 if there is none.
    pub fn radius(&self) -> i64 {
        self.intervals
            .iter()
            .flat_map(|iv| [iv.lo.finite(), iv.hi.finite()])
            .flatten()
            .map(i64::abs)
            .max()
            .unwrap_or(0)
    }

    pub fn min(&self) -> Option<Endpoint> {
        self.intervals.first().map(|iv| iv.lo)
    }

    pub fn max(&self) -> Option<Endpoint> {
        self.intervals.last().map(|iv| iv.hi)
    }

    /// Elements in ascending order, `None` for infinite sets.
    pub fn elements(&self) -> Option<Vec<i64>> {
        self.cardinality()?;
        Some(
            self.intervals
                .iter()
                .flat_map(|iv| {
                    let (l, h) = (iv.lo.finite().unwrap(), iv.hi.finite().unwrap());
                    l..=h
                })
                .collect(),
        )
    }
}

/// Partitions an axis into maximal intervals on which no cut point falls
/// strictly inside; each cut starts a new cell.
pub(crate) fn elementary_cells(domain: AxisDomain, cuts: impl IntoIterator<Item = i64>) -> Vec<Interval> {
    let mut cuts: Vec<i64> = cuts.into_iter().filter(|&c| domain.contains(c)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut start = domain.lower();
    for c in cuts {
        if Endpoint::Int(c) > start {
            out.push(Interval { lo: start, hi: Endpoint::Int(c - 1) });
            start = Endpoint::Int(c);
        }
    }
    out.push(Interval { lo: start, hi: Endpoint::PosInf });
    out
}

/// Prints the selector syntax used by set literals: `1..3,5,7..`.
impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("{}");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match (iv.lo, iv.hi) {
                (Endpoint::Int(l), Endpoint::Int(h)) if l == h => write!(f, "{l}")?,
                (Endpoint::Int(l), Endpoint::Int(h)) => write!(f, "{l}..{h}")?,
                (Endpoint::Int(l), _) => write!(f, "{l}..")?,
                (_, Endpoint::Int(h)) => write!(f, "..{h}")?,
                _ => f.write_str("..")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use Endpoint::*;

    const Z: AxisDomain = AxisDomain::Integers;

    fn scan(s: &IntervalSet, window: i64) -> Vec<bool> {
        (-window..=window).map(|n| s.contains(n)).collect()
    }

    #[test]
    fn overlapping_pairs_merge() {
        let s = IntervalSet::from_pairs(Z, &[(1, 5), (4, 9)]).unwrap();
        assert_eq!(s.intervals(), &[Interval { lo: Int(1), hi: Int(9) }]);
    }

    #[test]
    fn naturals_clip_negative_part() {
        let s = IntervalSet::from_pairs(AxisDomain::NAT0, &[(-3, 2)]).unwrap();
        assert_eq!(s.intervals(), &[Interval { lo: Int(0), hi: Int(2) }]);
    }

    #[test]
    fn adjacent_pairs_merge() {
        let s = IntervalSet::from_pairs(Z, &[(1, 3), (4, 6)]).unwrap();
        // pointwise oracle over [-20, 20]
        let expected: Vec<bool> = (-20..=20).map(|n| (1..=6).contains(&n)).collect();
        assert_eq!(scan(&s, 20), expected);
        assert_eq!(s.intervals(), &[Interval { lo: Int(1), hi: Int(6) }]);
    }

    #[test]
    fn malformed_pairs_are_rejected() {
        assert!(matches!(IntervalSet::from_pairs(Z, &[(3, 1)]), Err(Error::MalformedInterval(_))));
        assert!(IntervalSet::new(Z, &[(PosInf, PosInf)]).is_err());
        assert!(IntervalSet::new(Z, &[(NegInf, NegInf)]).is_err());
    }

    #[test]
    fn complement_of_empty_is_everything() {
        let c = IntervalSet::empty(Z).complement();
        assert_eq!(c.intervals(), &[Interval { lo: NegInf, hi: PosInf }]);
    }

    #[test]
    fn intersection_against_scan() {
        let a = IntervalSet::new(Z, &[(Int(1), Int(5)), (Int(10), PosInf)]).unwrap();
        let b = IntervalSet::from_pairs(Z, &[(3, 12)]).unwrap();
        let c = a.intersect(&b).unwrap();
        let expected: Vec<bool> = (-100..=100).map(|n| a.contains(n) && b.contains(n)).collect();
        assert_eq!(scan(&c, 100), expected);
        assert_eq!(c, IntervalSet::from_pairs(Z, &[(3, 5), (10, 12)]).unwrap());
    }

    #[test]
    fn axis_mismatch() {
        let a = IntervalSet::full(Z);
        let b = IntervalSet::full(AxisDomain::NAT0);
        assert_eq!(a.union(&b), Err(Error::AxisMismatch));
    }

    #[test]
    fn classification_examples() {
        let ray = IntervalSet::at_least(Z, 0);
        let c = ray.classify();
        assert!(!c.is_empty && c.cardinality.is_none() && !c.is_cofinite);
        assert!(c.has_plus_end && !c.has_minus_end);

        let small = IntervalSet::from_pairs(Z, &[(2, 4)]).unwrap();
        assert_eq!(small.classify().cardinality, Some(3));
        assert!(small.contains(3) && !small.contains(5));

        let co = small.complement();
        assert!(co.classify().is_cofinite);
        let missing = (-50..=50).filter(|&n| !co.contains(n)).count();
        assert_eq!(missing, 3);
    }

    #[test]
    fn display_uses_selector_syntax() {
        let s = IntervalSet::new(Z, &[(NegInf, Int(-1)), (Int(2), Int(2)), (Int(4), Int(6)), (Int(9), PosInf)])
            .unwrap();
        assert_eq!(s.to_string(), "..-1,2,4..6,9..");
    }

    fn arb_domain() -> impl Strategy<Value = AxisDomain> {
        prop_oneof![Just(Z), (-3i64..3).prop_map(AxisDomain::From)]
    }

    fn arb_endpoint_pair() -> impl Strategy<Value = (Endpoint, Endpoint)> {
        (-15i64..15, 0i64..8, 0u8..6).prop_map(|(lo, len, kind)| match kind {
            0 => (NegInf, Int(lo + len)),
            1 => (Int(lo), PosInf),
            _ => (Int(lo), Int(lo + len)),
        })
    }

    fn arb_set(domain: AxisDomain) -> impl Strategy<Value = IntervalSet> {
        proptest::collection::vec(arb_endpoint_pair(), 0..5).prop_map(move |raw| IntervalSet::new(domain, &raw).unwrap())
    }

    fn arb_triple() -> impl Strategy<Value = (IntervalSet, IntervalSet, IntervalSet)> {
        arb_domain().prop_flat_map(|d| (arb_set(d), arb_set(d), arb_set(d)))
    }

    fn window(sets: &[&IntervalSet]) -> i64 {
        sets.iter().map(|s| s.radius()).max().unwrap_or(0) + 5
    }

    /// Sets agree on the scan window and on both end flags.
    fn same_semantics(a: &IntervalSet, b: &IntervalSet, w: i64) -> bool {
        scan(a, w) == scan(b, w) && a.has_plus_end() == b.has_plus_end() && a.has_minus_end() == b.has_minus_end()
    }

    proptest! {
        #[test]
        fn boolean_algebra_laws((a, b, c) in arb_triple()) {
            let w = window(&[&a, &b, &c]);
            prop_assert_eq!(a.union(&b).unwrap(), b.union(&a).unwrap());
            prop_assert_eq!(a.intersect(&b).unwrap(), b.intersect(&a).unwrap());
            let lhs = a.intersect(&b.union(&c).unwrap()).unwrap();
            let rhs = a.intersect(&b).unwrap().union(&a.intersect(&c).unwrap()).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            let dm_l = a.union(&b).unwrap().complement();
            let dm_r = a.complement().intersect(&b.complement()).unwrap();
            prop_assert_eq!(&dm_l, &dm_r);
            prop_assert_eq!(a.complement().complement(), a.clone());
            prop_assert!(a.difference(&a).unwrap().is_empty());
            let pointwise: Vec<bool> = (-w..=w).map(|n| a.contains(n) && (b.contains(n) || c.contains(n))).collect();
            prop_assert_eq!(scan(&lhs, w), pointwise);
        }

        #[test]
        fn normal_form_is_unique((a, b, _c) in arb_triple()) {
            let w = window(&[&a, &b]);
            let again = IntervalSet::normalize(a.domain(), a.intervals().to_vec());
            prop_assert_eq!(&again, &a);
            if same_semantics(&a, &b, w) {
                prop_assert_eq!(&a, &b);
            }
            // the same set written as a shuffled, split-up list normalizes identically
            let mut pieces: Vec<Interval> = Vec::new();
            for iv in a.intervals() {
                match (iv.lo, iv.hi) {
                    (Int(l), Int(h)) if h > l => {
                        pieces.push(Interval { lo: Int(l), hi: Int(l) });
                        pieces.push(Interval { lo: Int(l + 1), hi: Int(h) });
                    }
                    _ => pieces.push(*iv),
                }
            }
            pieces.reverse();
            prop_assert_eq!(IntervalSet::normalize(a.domain(), pieces), a);
        }
    }
}
