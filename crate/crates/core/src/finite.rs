//! Finite pretopological spaces given by minimal-vicinity tables.
//!
//! Every filter on a finite set is principal, so a filter is its kernel and
//! `↑K → x` holds exactly when `K ⊆ M(x)`. Subsets are bitmasks over the
//! declared point order, which caps spaces at 64 points; the exhaustive
//! checks are only practical far below that.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A subset of a finite space as a bitmask in declaration order.
pub type Subset = u64;

pub const MAX_POINTS: usize = 64;
pub const MAX_ENUMERATION: usize = 5;
/// Largest space for which cover methods quantify over every family of subsets.
pub const MAX_COVER_ENUMERATION: usize = 3;

pub fn full_mask(n: usize) -> Subset {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Indices of the set bits, ascending.
pub fn members(s: Subset) -> impl Iterator<Item = usize> {
    let mut rest = s;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(i)
    })
}

pub fn is_subset(a: Subset, b: Subset) -> bool {
    a & !b == 0
}

/// Every subset of `full`, ascending by mask value.
pub fn all_subsets(full: Subset) -> impl Iterator<Item = Subset> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == full { None } else { Some(((cur | !full).wrapping_add(1)) & full) };
        Some(cur)
    })
}

/// Result of a property check together with the least counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

impl<W> Verdict<W> {
    pub fn yes() -> Self {
        Verdict { holds: true, witness: None }
    }

    pub fn no(w: W) -> Self {
        Verdict { holds: false, witness: Some(w) }
    }

    pub fn from_witness(w: Option<W>) -> Self {
        match w {
            Some(w) => Self::no(w),
            None => Self::yes(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CompactMethod {
    Filter,
    Cover,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoverCompactMethod {
    FilterRefines,
    Cover,
    VicinitySeparation,
}

/// Counterexample to compactness at a set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CompactWitness {
    /// A meshing filter kernel whose adherence misses the set.
    Kernel(Subset),
    /// A cover no finite part of which contains a member of the filter.
    Cover(Vec<Subset>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePretop {
    names: Vec<String>,
    min_vic: Vec<Subset>,
}

impl FinitePretop {
    /// Validates a vicinity table: every point must lie in its own vicinity.
    pub fn new(names: Vec<String>, min_vic: Vec<Subset>) -> Result<Self> {
        if names.len() > MAX_POINTS {
            return Err(Error::SizeLimit(format!("{} points, at most {MAX_POINTS} supported", names.len())));
        }
        if names.is_empty() {
            return Err(Error::EmptySubspace);
        }
        assert_eq!(names.len(), min_vic.len(), "one vicinity per point");
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateName(n.clone()));
            }
        }
        let full = full_mask(names.len());
        for (x, &m) in min_vic.iter().enumerate() {
            if m & (1 << x) == 0 || !is_subset(m, full) {
                return Err(Error::AxiomViolation(names[x].clone()));
            }
        }
        Ok(FinitePretop { names, min_vic })
    }

    /// Builds a space from `(point, vicinity)` rows naming points directly.
    pub fn from_table(rows: &[(&str, &[&str])]) -> Result<Self> {
        let names: Vec<String> = rows.iter().map(|(p, _)| p.to_string()).collect();
        let mut vic = Vec::with_capacity(rows.len());
        for (_, m) in rows {
            let mut mask = 0;
            for q in *m {
                let i = names.iter().position(|n| n == q).ok_or_else(|| Error::UnknownPoint(q.to_string()))?;
                mask |= 1 << i;
            }
            vic.push(mask);
        }
        Self::new(names, vic)
    }

    pub fn discrete(n: usize) -> Self {
        let names = (1..=n).map(|i| i.to_string()).collect();
        FinitePretop { names, min_vic: (0..n).map(|x| 1 << x).collect() }
    }

    pub fn indiscrete(n: usize) -> Self {
        let names = (1..=n).map(|i| i.to_string()).collect();
        FinitePretop { names, min_vic: vec![full_mask(n); n] }
    }

    /// Same points, new vicinity table.
    pub fn with_vicinities(&self, min_vic: Vec<Subset>) -> Result<Self> {
        Self::new(self.names.clone(), min_vic)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn full(&self) -> Subset {
        full_mask(self.len())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vicinities(&self) -> &[Subset] {
        &self.min_vic
    }

    /// `M(x)`
    pub fn vicinity(&self, x: usize) -> Subset {
        self.min_vic[x]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn mask_of(&self, names: &[&str]) -> Result<Subset> {
        names.iter().try_fold(0, |acc, n| Ok(acc | 1 << self.index_of(n)?))
    }

    pub fn names_of(&self, s: Subset) -> Vec<&str> {
        members(s).map(|i| self.names[i].as_str()).collect()
    }

    /// `{a b c}` in point order.
    pub fn fmt_set(&self, s: Subset) -> String {
        format!("{{{}}}", self.names_of(s).join(" "))
    }

    /// `adh A = {x : M(x) ∩ A ≠ ∅}`
    pub fn adh(&self, a: Subset) -> Subset {
        self.min_vic.iter().enumerate().filter(|(_, &m)| m & a != 0).fold(0, |acc, (x, _)| acc | 1 << x)
    }

    /// `inh A = {x : M(x) ⊆ A}`
    pub fn inh(&self, a: Subset) -> Subset {
        self.min_vic.iter().enumerate().filter(|(_, &m)| is_subset(m, a)).fold(0, |acc, (x, _)| acc | 1 << x)
    }

    /// Adherence of the principal filter `↑kernel`.
    pub fn adh_filter(&self, kernel: Subset) -> Result<Subset> {
        if kernel == 0 {
            return Err(Error::EmptyKernel);
        }
        Ok(self.adh(kernel))
    }

    pub fn converges(&self, kernel: Subset, x: usize) -> bool {
        is_subset(kernel, self.min_vic[x])
    }

    /// Limits of `↑kernel`.
    pub fn limits(&self, kernel: Subset) -> Subset {
        (0..self.len()).filter(|&x| self.converges(kernel, x)).fold(0, |acc, x| acc | 1 << x)
    }

    /// Distinct points with meeting vicinities, least pair first.
    pub fn is_hausdorff(&self) -> Verdict<(usize, usize)> {
        let n = self.len();
        let w = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).find(|&(x, y)| self.min_vic[x] & self.min_vic[y] != 0);
        Verdict::from_witness(w)
    }

    /// Whether adherence is idempotent; witness is the least subset where it is not.
    pub fn is_topological(&self) -> Verdict<Subset> {
        let w = all_subsets(self.full()).find(|&a| {
            let once = self.adh(a);
            self.adh(once) != once
        });
        Verdict::from_witness(w)
    }

    /// Finite regularity: `adh M(x) = M(x)` for every point.
    pub fn is_regular(&self) -> Verdict<usize> {
        Verdict::from_witness((0..self.len()).find(|&x| self.adh(self.min_vic[x]) != self.min_vic[x]))
    }

    /// Whether every point of `of` (default: all points) has a family member
    /// containing its minimal vicinity; the witness is the first uncovered point.
    pub fn is_cover(&self, family: &[Subset], of: Option<Subset>) -> Verdict<usize> {
        let of = of.unwrap_or(self.full());
        let w = members(of).find(|&x| !family.iter().any(|&c| is_subset(self.min_vic[x], c)));
        Verdict::from_witness(w)
    }

    /// Covers of `a` to quantify over: every family of subsets for small spaces,
    /// otherwise the single minimal cover `{M(x) : x ∈ a}`, which every other
    /// cover refines pointwise and so is the hardest one to satisfy.
    fn covers_of(&self, a: Subset) -> Box<dyn Iterator<Item = Vec<Subset>> + '_> {
        let n = self.len();
        if n <= MAX_COVER_ENUMERATION {
            let subsets = 1u64 << n;
            let families = (1u64 << subsets) - 1;
            Box::new(all_subsets(families).filter_map(move |fam| {
                let family: Vec<Subset> = members(fam).map(|s| s as Subset).collect();
                self.is_cover(&family, Some(a)).holds.then_some(family)
            }))
        } else {
            Box::new(std::iter::once(members(a).map(|x| self.min_vic[x]).collect()))
        }
    }

    /// Whether `↑kernel` is compact at `a`.
    pub fn compact_at(&self, kernel: Subset, a: Subset, method: CompactMethod) -> Result<Verdict<CompactWitness>> {
        if kernel == 0 {
            return Err(Error::EmptyKernel);
        }
        if a == 0 {
            return Err(Error::EmptySubspace);
        }
        Ok(match method {
            CompactMethod::Filter => {
                let w = all_subsets(self.full()).find(|&k| k & kernel != 0 && self.adh(k) & a == 0);
                Verdict::from_witness(w.map(CompactWitness::Kernel))
            }
            CompactMethod::Cover => {
                // on a finite family the union of all members is the best finite choice
                let w = self.covers_of(a).find(|c| !is_subset(kernel, c.iter().fold(0, |u, &s| u | s)));
                Verdict::from_witness(w.map(CompactWitness::Cover))
            }
        })
    }

    /// `↑a` compact at `a`.
    pub fn is_compact_subset(&self, a: Subset) -> Result<bool> {
        Ok(self.compact_at(a, a, CompactMethod::Filter)?.holds)
    }

    pub fn is_cover_compact(&self, a: Subset, method: CoverCompactMethod) -> bool {
        let full = self.full();
        let avoiding = || all_subsets(full).filter(move |&k| k != 0 && self.adh(k) & a == 0);
        match method {
            CoverCompactMethod::FilterRefines => {
                avoiding().all(|k| all_subsets(full).any(|f| is_subset(k, f) && self.adh(f) & a == 0))
            }
            CoverCompactMethod::Cover => {
                let mut covers = self.covers_of(a);
                covers.all(|c| is_subset(a, self.inh(c.iter().fold(0, |u, &s| u | s))))
            }
            CoverCompactMethod::VicinitySeparation => avoiding().all(|k| {
                all_subsets(full).any(|v| is_subset(a, self.inh(v)) && all_subsets(full).any(|f| is_subset(k, f) && f & v == 0))
            }),
        }
    }

    /// Subspace on `a` with `M'(x) = M(x) ∩ a`.
    pub fn restrict(&self, a: Subset) -> Result<FinitePretop> {
        let a = a & self.full();
        if a == 0 {
            return Err(Error::EmptySubspace);
        }
        let keep: Vec<usize> = members(a).collect();
        let compress = |s: Subset| keep.iter().enumerate().filter(|(_, &x)| s & (1 << x) != 0).fold(0, |acc, (i, _)| acc | 1 << i);
        Ok(FinitePretop {
            names: keep.iter().map(|&x| self.names[x].clone()).collect(),
            min_vic: keep.iter().map(|&x| compress(self.min_vic[x])).collect(),
        })
    }

    /// `self ≤ other` (coarser): every vicinity of `self` contains the
    /// corresponding vicinity of `other`, so every limit in `other` is one in `self`.
    pub fn coarser_leq(&self, other: &FinitePretop) -> Result<bool> {
        if self.names != other.names {
            return Err(Error::PointSetMismatch);
        }
        Ok(self.min_vic.iter().zip(&other.min_vic).all(|(&m1, &m2)| is_subset(m2, m1)))
    }

    /// Whether every point's vicinity is transitive (`y ∈ M(x) ⇒ M(y) ⊆ M(x)`);
    /// equivalent to idempotent adherence and much cheaper.
    pub fn is_transitive(&self) -> bool {
        (0..self.len()).all(|x| members(self.min_vic[x]).all(|y| is_subset(self.min_vic[y], self.min_vic[x])))
    }
}

impl fmt::Display for FinitePretop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, n) in self.names.iter().enumerate() {
            if x > 0 {
                f.write_str(", ")?;
            }
            write!(f, "M({n})={}", self.fmt_set(self.min_vic[x]))?;
        }
        Ok(())
    }
}

/// A finite topology as its family of open sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTopology {
    names: Vec<String>,
    opens: Vec<Subset>,
}

impl FiniteTopology {
    pub fn new(names: Vec<String>, mut opens: Vec<Subset>) -> Result<Self> {
        if names.len() > MAX_POINTS {
            return Err(Error::SizeLimit(format!("{} points", names.len())));
        }
        let full = full_mask(names.len());
        opens.sort_unstable();
        opens.dedup();
        if let Some(&bad) = opens.iter().find(|&&u| !is_subset(u, full)) {
            return Err(Error::InvalidTopology(format!("open set {bad:#b} has unknown points")));
        }
        if opens.first() != Some(&0) {
            return Err(Error::InvalidTopology("the empty set is not open".into()));
        }
        if opens.last() != Some(&full) {
            return Err(Error::InvalidTopology("the whole space is not open".into()));
        }
        for &u in &opens {
            for &v in &opens {
                if opens.binary_search(&(u | v)).is_err() {
                    return Err(Error::InvalidTopology(format!("union of {u:#b} and {v:#b} is not open")));
                }
                if opens.binary_search(&(u & v)).is_err() {
                    return Err(Error::InvalidTopology(format!("intersection of {u:#b} and {v:#b} is not open")));
                }
            }
        }
        Ok(FiniteTopology { names, opens })
    }

    /// Open sets of a topological pretopology: the sets equal to their inherence.
    pub fn from_pretop(x: &FinitePretop) -> Result<Self> {
        if !x.is_transitive() {
            return Err(Error::InvalidTopology("adherence is not idempotent".into()));
        }
        let opens = all_subsets(x.full()).filter(|&u| x.inh(u) == u).collect();
        Self::new(x.names.clone(), opens)
    }

    pub fn discrete(n: usize) -> Self {
        let names = (1..=n).map(|i| i.to_string()).collect();
        FiniteTopology { names, opens: all_subsets(full_mask(n)).collect() }
    }

    pub fn indiscrete(n: usize) -> Self {
        let names = (1..=n).map(|i| i.to_string()).collect();
        FiniteTopology { names, opens: vec![0, full_mask(n)] }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn opens(&self) -> &[Subset] {
        &self.opens
    }

    pub fn full(&self) -> Subset {
        full_mask(self.names.len())
    }

    pub fn minimal_open(&self, x: usize) -> Subset {
        self.opens.iter().filter(|&&u| u & (1 << x) != 0).fold(self.full(), |acc, &u| acc & u)
    }

    pub fn closure(&self, a: Subset) -> Subset {
        let interior_of_complement = self.opens.iter().filter(|&&u| u & a == 0).fold(0, |acc, &u| acc | u);
        self.full() & !interior_of_complement
    }

    /// Open-neighborhood pretopology: `M(x)` is the minimal open set at `x`.
    pub fn to_pretop(&self) -> FinitePretop {
        FinitePretop {
            names: self.names.clone(),
            min_vic: (0..self.names.len()).map(|x| self.minimal_open(x)).collect(),
        }
    }
}

/// Number of pretopologies on `n` labelled points: `2^{n(n-1)}`.
pub fn pretop_count(n: usize) -> Result<u64> {
    if n == 0 || n > MAX_ENUMERATION {
        return Err(Error::SizeLimit(format!("enumeration needs 1 ≤ n ≤ {MAX_ENUMERATION}, got {n}")));
    }
    Ok(1u64 << (n * (n - 1)))
}

/// The pretopology with lexicographic index `idx`: bit `j` of `idx` decides the
/// `j`-th off-diagonal pair `(x, y)` in row-major order, meaning `y ∈ M(x)`.
pub fn pretop_by_index(n: usize, idx: u64) -> FinitePretop {
    let mut min_vic: Vec<Subset> = (0..n).map(|x| 1 << x).collect();
    let mut bit = 0;
    for (x, m) in min_vic.iter_mut().enumerate() {
        for y in (0..n).filter(|&y| y != x) {
            if idx >> bit & 1 == 1 {
                *m |= 1 << y;
            }
            bit += 1;
        }
    }
    FinitePretop { names: (1..=n).map(|i| i.to_string()).collect(), min_vic }
}

/// All pretopologies on `n` points, in index order.
pub fn enumerate_pretops(n: usize) -> Result<impl Iterator<Item = FinitePretop>> {
    let count = pretop_count(n)?;
    Ok((0..count).map(move |i| pretop_by_index(n, i)))
}

/// All topologies on `n` points (as topological pretopologies), in index order.
pub fn enumerate_topologies(n: usize) -> Result<impl Iterator<Item = FiniteTopology>> {
    Ok(enumerate_pretops(n)?.filter(FinitePretop::is_transitive).map(|p| FiniteTopology::from_pretop(&p).expect("transitive")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3() -> FinitePretop {
        FinitePretop::from_table(&[("1", &["1", "2"]), ("2", &["2", "3"]), ("3", &["3"])]).unwrap()
    }

    fn p3() -> FinitePretop {
        FinitePretop::from_table(&[("a", &["a", "b"]), ("b", &["b"]), ("c", &["b", "c"])]).unwrap()
    }

    fn s(x: &FinitePretop, names: &[&str]) -> Subset {
        x.mask_of(names).unwrap()
    }

    #[test]
    fn validation() {
        assert!(matches!(FinitePretop::from_table(&[("1", &["2"]), ("2", &["2"])]), Err(Error::AxiomViolation(p)) if p == "1"));
        assert!(matches!(FinitePretop::from_table(&[("1", &["1"]), ("1", &["1"])]), Err(Error::DuplicateName(_))));
    }

    #[test]
    fn subset_iteration() {
        assert_eq!(all_subsets(0b101).collect::<Vec<_>>(), vec![0, 1, 4, 5]);
        assert_eq!(all_subsets(0b111).count(), 8);
        assert_eq!(members(0b1010).collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn q3_adherence_is_not_idempotent() {
        let x = q3();
        assert_eq!(x.adh(s(&x, &["3"])), s(&x, &["2", "3"]));
        assert_eq!(x.adh(x.adh(s(&x, &["3"]))), x.full());
        assert_eq!(x.inh(s(&x, &["1", "2"])), s(&x, &["1"]));
        assert_eq!(x.inh(s(&x, &["2", "3"])), s(&x, &["2", "3"]));
        assert_eq!(x.is_topological(), Verdict::no(s(&x, &["3"])));
    }

    #[test]
    fn filter_adherence_and_convergence() {
        let x = q3();
        assert_eq!(x.adh_filter(s(&x, &["2"])).unwrap(), s(&x, &["1", "2"]));
        assert_eq!(x.adh_filter(0), Err(Error::EmptyKernel));
        assert!(x.converges(s(&x, &["2", "3"]), 1));
        let p = p3();
        assert_eq!(p.adh_filter(s(&p, &["b"])).unwrap(), p.full());
        assert!(!FinitePretop::discrete(2).converges(0b11, 0));
    }

    #[test]
    fn separation_properties() {
        assert!(FinitePretop::discrete(2).is_hausdorff().holds);
        assert_eq!(q3().is_hausdorff(), Verdict::no((0, 1)));
        assert!(p3().is_topological().holds);
        assert_eq!(q3().is_regular(), Verdict::no(1));
        assert_eq!(p3().is_regular(), Verdict::no(0));
    }

    #[test]
    fn covers() {
        let x = q3();
        assert!(x.is_cover(&[0b011, 0b110, 0b100], None).holds);
        // both 2 and 3 are uncovered; the least one is reported
        assert_eq!(x.is_cover(&[0b011], None), Verdict::no(1));
        assert_eq!(x.is_cover(&[0b011], Some(0b100)), Verdict::no(2));
    }

    #[test]
    fn compact_at_examples() {
        let x = q3();
        for m in [CompactMethod::Filter, CompactMethod::Cover] {
            assert!(!x.compact_at(0b001, 0b100, m).unwrap().holds);
            assert!(x.compact_at(0b001, 0b001, m).unwrap().holds);
            assert!(x.compact_at(0b111, 0b111, m).unwrap().holds);
        }
        assert_eq!(x.compact_at(0b001, 0b100, CompactMethod::Filter).unwrap().witness, Some(CompactWitness::Kernel(0b001)));
    }

    #[test]
    fn restriction() {
        let r = q3().restrict(0b110).unwrap();
        assert_eq!(r.to_string(), "M(2)={2 3}, M(3)={3}");
        assert_eq!(q3().restrict(0b111).unwrap(), q3());
        assert_eq!(q3().restrict(0), Err(Error::EmptySubspace));
    }

    #[test]
    fn coarser_order() {
        let x = q3();
        assert!(x.coarser_leq(&x).unwrap());
        assert!(x.coarser_leq(&FinitePretop::discrete(3)).unwrap());
        assert!(!FinitePretop::discrete(3).coarser_leq(&x).unwrap());
        assert_eq!(x.coarser_leq(&p3()), Err(Error::PointSetMismatch));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_pretops(1).unwrap().count(), 1);
        assert_eq!(enumerate_pretops(2).unwrap().count(), 4);
        assert_eq!(enumerate_pretops(3).unwrap().count(), 64);
        assert!(matches!(pretop_count(6), Err(Error::SizeLimit(_))));
        // topologies on labelled points: 1, 4, 29 (preorders)
        assert_eq!(enumerate_topologies(2).unwrap().count(), 4);
        assert_eq!(enumerate_topologies(3).unwrap().count(), 29);
    }

    #[test]
    fn transitivity_matches_idempotence() {
        for x in enumerate_pretops(3).unwrap() {
            assert_eq!(x.is_transitive(), x.is_topological().holds, "{x}");
        }
    }

    #[test]
    fn topology_round_trip() {
        let p = p3();
        let t = FiniteTopology::from_pretop(&p).unwrap();
        assert_eq!(t.to_pretop(), p);
        assert_eq!(t.closure(s(&p, &["a", "b"])), p.full());
        assert!(FiniteTopology::new(vec!["1".into(), "2".into()], vec![0, 1, 2]).is_err());
    }
}
