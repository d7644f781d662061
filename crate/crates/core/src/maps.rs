//! Maps between finite pretopological spaces: continuity in its several
//! equivalent forms, θ-variants, perfect maps, `f#` and strong irreducibility.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite::{all_subsets, is_subset, members, CompactMethod, CoverCompactMethod, FinitePretop, Subset};
use crate::regularization::{partial_regularization, theta_of_topology};
use crate::finite::FiniteTopology;

/// A total function between point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteMap {
    table: Vec<usize>,
    codomain: usize,
}

impl FiniteMap {
    pub fn new(table: Vec<usize>, codomain: usize) -> Result<Self> {
        if let Some(&bad) = table.iter().find(|&&y| y >= codomain) {
            return Err(Error::InvalidMap(format!("image index {bad} outside a codomain of {codomain} points")));
        }
        Ok(FiniteMap { table, codomain })
    }

    /// Builds a map from `(source, target)` name pairs; every source point must appear once.
    pub fn from_pairs(src: &FinitePretop, dst: &FinitePretop, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut table = vec![None; src.len()];
        for (a, b) in pairs {
            let i = src.index_of(a)?;
            if table[i].replace(dst.index_of(b)?).is_some() {
                return Err(Error::InvalidMap(format!("`{a}` is mapped twice")));
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, y)| y.ok_or_else(|| Error::InvalidMap(format!("`{}` has no image", src.names()[i]))))
            .collect::<Result<_>>()?;
        Self::new(table, dst.len())
    }

    pub fn identity(n: usize) -> Self {
        FiniteMap { table: (0..n).collect(), codomain: n }
    }

    pub fn constant(n: usize, codomain: usize, y: usize) -> Self {
        FiniteMap { table: vec![y; n], codomain }
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn domain_len(&self) -> usize {
        self.table.len()
    }

    pub fn codomain_len(&self) -> usize {
        self.codomain
    }

    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    /// `f[A]`
    pub fn image(&self, a: Subset) -> Subset {
        members(a).fold(0, |acc, x| acc | 1 << self.table[x])
    }

    /// `f⁻[B]`
    pub fn preimage(&self, b: Subset) -> Subset {
        self.table.iter().enumerate().filter(|(_, &y)| b & (1 << y) != 0).fold(0, |acc, (x, _)| acc | 1 << x)
    }

    pub fn fiber(&self, y: usize) -> Subset {
        self.preimage(1 << y)
    }

    pub fn is_surjective(&self) -> bool {
        (0..self.codomain).all(|y| self.fiber(y) != 0)
    }

    pub fn compose(&self, then: &FiniteMap) -> FiniteMap {
        FiniteMap { table: self.table.iter().map(|&y| then.table[y]).collect(), codomain: then.codomain }
    }

    fn check(&self, src: &FinitePretop, dst: &FinitePretop) -> Result<()> {
        if self.table.len() != src.len() || self.codomain != dst.len() {
            return Err(Error::InvalidMap("map does not match the given spaces".into()));
        }
        Ok(())
    }
}

/// Every map from `n` points to `m` points, with the first point's image
/// varying slowest.
pub fn all_maps(n: usize, m: usize) -> impl Iterator<Item = FiniteMap> {
    let total = (m as u64).pow(n as u32);
    (0..total).map(move |mut code| {
        let mut table = vec![0; n];
        for slot in table.iter_mut().rev() {
            *slot = (code % m as u64) as usize;
            code /= m as u64;
        }
        FiniteMap { table, codomain: m }
    })
}

/// Kernel of the image filter `f(↑K)`.
pub fn image_filter(f: &FiniteMap, kernel: Subset) -> Result<Subset> {
    if kernel == 0 {
        return Err(Error::EmptyKernel);
    }
    Ok(f.image(kernel))
}

/// Kernel of the preimage filter `f⁻(↑K)`.
pub fn preimage_filter(f: &FiniteMap, kernel: Subset) -> Result<Subset> {
    match f.preimage(kernel) {
        0 => Err(Error::EmptyPreimage),
        k => Ok(k),
    }
}

/// Adherence of `↑K` straight from the definition: the union of the limits
/// of every filter meshing with it.
pub fn adh_by_meshing(x: &FinitePretop, kernel: Subset) -> Subset {
    all_subsets(x.full()).filter(|&g| g & kernel != 0).fold(0, |acc, g| acc | x.limits(g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ContinuityMethod {
    Limit,
    AdhFilter,
    AdhSet,
    Inh,
    Vicinity,
}

impl ContinuityMethod {
    pub const ALL: [ContinuityMethod; 5] =
        [ContinuityMethod::Limit, ContinuityMethod::AdhFilter, ContinuityMethod::AdhSet, ContinuityMethod::Inh, ContinuityMethod::Vicinity];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ContinuityWitness {
    /// `↑kernel → point` but the image filter does not converge to the image point.
    Limit { kernel: Subset, point: usize },
    /// A source kernel or set whose adherence is not mapped into the image's adherence.
    Adherence(Subset),
    /// A target set whose inherence pulls back outside the inherence of its preimage.
    Inherence(Subset),
    /// `f[M(point)] ⊄ vicinity`, where `vicinity = M(f(point))`.
    Vicinity { point: usize, vicinity: Subset },
}

pub fn is_continuous(src: &FinitePretop, dst: &FinitePretop, f: &FiniteMap, method: ContinuityMethod) -> Result<crate::finite::Verdict<ContinuityWitness>> {
    use crate::finite::Verdict;
    f.check(src, dst)?;
    let kernels = || all_subsets(src.full()).filter(|&k| k != 0);
    let w = match method {
        ContinuityMethod::Limit => kernels().find_map(|k| {
            let image = f.image(k);
            members(src.limits(k)).find(|&x| !dst.converges(image, f.apply(x))).map(|point| ContinuityWitness::Limit { kernel: k, point })
        }),
        ContinuityMethod::AdhFilter => kernels()
            .find(|&k| !is_subset(f.image(adh_by_meshing(src, k)), adh_by_meshing(dst, f.image(k))))
            .map(ContinuityWitness::Adherence),
        ContinuityMethod::AdhSet => {
            all_subsets(src.full()).find(|&a| !is_subset(f.image(src.adh(a)), dst.adh(f.image(a)))).map(ContinuityWitness::Adherence)
        }
        ContinuityMethod::Inh => all_subsets(dst.full())
            .find(|&b| !is_subset(f.preimage(dst.inh(b)), src.inh(f.preimage(b))))
            .map(ContinuityWitness::Inherence),
        ContinuityMethod::Vicinity => (0..src.len()).find_map(|x| {
            let vicinity = dst.vicinity(f.apply(x));
            (!is_subset(f.image(src.vicinity(x)), vicinity)).then_some(ContinuityWitness::Vicinity { point: x, vicinity })
        }),
    };
    Ok(Verdict::from_witness(w))
}

/// Shorthand for the vicinity characterization.
pub fn continuous(src: &FinitePretop, dst: &FinitePretop, f: &FiniteMap) -> bool {
    f.table.len() == src.len() && (0..src.len()).all(|x| is_subset(f.image(src.vicinity(x)), dst.vicinity(f.apply(x))))
}

/// θ-continuity between finite topologies: continuity of the θ-convergences.
pub fn is_theta_continuous(src: &FiniteTopology, dst: &FiniteTopology, f: &FiniteMap) -> bool {
    continuous(&theta_of_topology(src).theta, &theta_of_topology(dst).theta, f)
}

/// Weak θ-continuity: continuity into the partial regularization of the target.
pub fn is_w_theta_continuous(src: &FinitePretop, dst: &FinitePretop, f: &FiniteMap) -> bool {
    continuous(src, &partial_regularization(dst), f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PerfectMethod {
    Definition,
    AdhInequality,
    AAndB,
}

impl PerfectMethod {
    pub const ALL: [PerfectMethod; 3] = [PerfectMethod::Definition, PerfectMethod::AdhInequality, PerfectMethod::AAndB];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PerfectWitness {
    /// `↑kernel → point` in the target, but the preimage filter is not compact
    /// at the fiber; `meshing` is a filter kernel whose adherence misses it.
    Convergent { kernel: Subset, point: usize, meshing: Subset },
    /// `f[adh K] ⊉ adh f[K]`.
    Adherence(Subset),
    /// The fiber over this point is not cover-compact.
    Fiber(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerfectReport {
    pub holds: bool,
    pub witness: Option<PerfectWitness>,
    /// `f[adh A] ⊇ adh f[A]` for every `A`; reported by the a-and-b method.
    pub condition_a: Option<bool>,
    /// Every fiber is cover-compact; reported by the a-and-b method.
    pub condition_b: Option<bool>,
}

fn adh_inequality_witness(src: &FinitePretop, dst: &FinitePretop, f: &FiniteMap) -> Option<Subset> {
    all_subsets(src.full()).find(|&a| !is_subset(dst.adh(f.image(a)), f.image(src.adh(a))))
}

/// Whether `f` is perfect. The definition method treats an empty preimage
/// filter as vacuously compact, since no filter meshes with it.
pub fn is_perfect(src: &FinitePretop, dst: &FinitePretop, f: &FiniteMap, method: PerfectMethod) -> Result<PerfectReport> {
    f.check(src, dst)?;
    let plain = |w: Option<PerfectWitness>| PerfectReport { holds: w.is_none(), witness: w, condition_a: None, condition_b: None };
    Ok(match method {
        PerfectMethod::Definition => {
            let w = all_subsets(dst.full()).filter(|&k| k != 0).find_map(|k| {
                let pre = f.preimage(k);
                if pre == 0 {
                    return None;
                }
                members(dst.limits(k)).find_map(|y| {
                    let fiber = f.fiber(y);
                    all_subsets(src.full())
                        .find(|&g| g & pre != 0 && src.adh(g) & fiber == 0)
                        .map(|g| PerfectWitness::Convergent { kernel: k, point: y, meshing: g })
                })
            });
            plain(w)
        }
        PerfectMethod::AdhInequality => plain(adh_inequality_witness(src, dst, f).map(PerfectWitness::Adherence)),
        PerfectMethod::AAndB => {
            let a = adh_inequality_witness(src, dst, f);
            let b = (0..dst.len()).find(|&y| {
                let fiber = f.fiber(y);
                fiber != 0 && !src.is_cover_compact(fiber, CoverCompactMethod::Cover)
            });
            PerfectReport {
                holds: a.is_none() && b.is_none(),
                witness: a.map(PerfectWitness::Adherence).or(b.map(PerfectWitness::Fiber)),
                condition_a: Some(a.is_none()),
                condition_b: Some(b.is_none()),
            }
        }
    })
}

/// `f#[A] = {y : f⁻(y) ⊆ A}`
pub fn f_sharp(f: &FiniteMap, a: Subset) -> Subset {
    (0..f.codomain).filter(|&y| is_subset(f.fiber(y), a)).fold(0, |acc, y| acc | 1 << y)
}

/// Strong irreducibility: whenever `U, V` have nonempty inherence and meet,
/// some nonempty fiber lies inside `U ∩ V`. The witness is the least failing
/// pair with `U ≤ V` as masks.
pub fn is_strongly_irreducible(src: &FinitePretop, f: &FiniteMap) -> crate::finite::Verdict<(Subset, Subset)> {
    let fibers: Vec<Subset> = (0..f.codomain).map(|y| f.fiber(y)).filter(|&s| s != 0).collect();
    let inherent: Vec<Subset> = all_subsets(src.full()).filter(|&u| src.inh(u) != 0).collect();
    let w = inherent.iter().enumerate().find_map(|(i, &u)| {
        inherent[i..]
            .iter()
            .find(|&&v| u & v != 0 && !fibers.iter().any(|&fib| is_subset(fib, u & v)))
            .map(|&v| (u, v))
    });
    crate::finite::Verdict::from_witness(w)
}

/// The filter-based compactness check used by the perfect-map definition,
/// exposed for the θ-quotient.
pub(crate) fn preimage_compact_at_fiber(src: &FinitePretop, f: &FiniteMap, kernel: Subset, y: usize) -> bool {
    let pre = f.preimage(kernel);
    let fiber = f.fiber(y);
    if pre == 0 {
        return true;
    }
    if fiber == 0 {
        return false;
    }
    src.compact_at(pre, fiber, CompactMethod::Filter).expect("nonempty arguments").holds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::Verdict;

    fn q3() -> FinitePretop {
        FinitePretop::from_table(&[("1", &["1", "2"]), ("2", &["2", "3"]), ("3", &["3"])]).unwrap()
    }

    fn s2() -> FinitePretop {
        FinitePretop::from_table(&[("a", &["a"]), ("b", &["a", "b"])]).unwrap()
    }

    #[test]
    fn filters_through_maps() {
        let c = FiniteMap::constant(3, 1, 0);
        assert_eq!(image_filter(&c, 0b001).unwrap(), 0b1);
        let f = FiniteMap::new(vec![0, 1], 2).unwrap();
        assert_eq!(preimage_filter(&f, 0b01).unwrap(), 0b01);
        assert_eq!(image_filter(&FiniteMap::identity(3), 0b101).unwrap(), 0b101);
        let g = FiniteMap::constant(2, 2, 0);
        assert_eq!(preimage_filter(&g, 0b10), Err(Error::EmptyPreimage));
    }

    #[test]
    fn continuity_examples() {
        let x = q3();
        let id = FiniteMap::identity(3);
        let r = partial_regularization(&x);
        for m in ContinuityMethod::ALL {
            assert!(is_continuous(&x, &x, &id, m).unwrap().holds);
            assert!(!is_continuous(&r, &x, &id, m).unwrap().holds, "{m:?}");
        }
        assert_eq!(
            is_continuous(&r, &x, &id, ContinuityMethod::Vicinity).unwrap(),
            Verdict::no(ContinuityWitness::Vicinity { point: 1, vicinity: 0b110 })
        );
        let d = FinitePretop::discrete(2);
        assert!(all_maps(2, 3).all(|f| continuous(&d, &x, &f)));
    }

    #[test]
    fn theta_variants() {
        let x = q3();
        let id = FiniteMap::identity(3);
        assert!(is_w_theta_continuous(&x, &x, &id));
        let d = FiniteTopology::discrete(2);
        assert!(all_maps(2, 2).all(|f| is_theta_continuous(&d, &d, &f)));
    }

    #[test]
    fn perfect_examples() {
        let d2 = FinitePretop::discrete(2);
        let f = FiniteMap::from_pairs(&d2, &s2(), &[("1", "a"), ("2", "b")]).unwrap();
        assert!(continuous(&d2, &s2(), &f));
        let rep = is_perfect(&d2, &s2(), &f, PerfectMethod::Definition).unwrap();
        assert_eq!(rep.witness, Some(PerfectWitness::Convergent { kernel: 0b01, point: 1, meshing: 0b01 }));
        for m in PerfectMethod::ALL {
            assert!(!is_perfect(&d2, &s2(), &f, m).unwrap().holds);
        }
        let point = FinitePretop::discrete(1);
        let c = FiniteMap::constant(3, 1, 0);
        for m in PerfectMethod::ALL {
            assert!(is_perfect(&q3(), &point, &c, m).unwrap().holds);
            assert!(is_perfect(&d2, &d2, &FiniteMap::new(vec![1, 0], 2).unwrap(), m).unwrap().holds);
        }
    }

    #[test]
    fn sharp_operator() {
        let f = FiniteMap::new(vec![0, 0, 1], 2).unwrap();
        assert_eq!(f_sharp(&f, 0b011), 0b01);
        assert_eq!(f_sharp(&f, 0b111), 0b11);
        assert_eq!(f_sharp(&f, 0b001), 0);
    }

    #[test]
    fn strong_irreducibility() {
        let d3 = FinitePretop::discrete(3);
        assert!(is_strongly_irreducible(&d3, &FiniteMap::identity(3)).holds);

        let check = |x: &FinitePretop, f: &FiniteMap| {
            let v = is_strongly_irreducible(x, f);
            let (u, w) = v.witness.expect("not strongly irreducible");
            assert!(x.inh(u) != 0 && x.inh(w) != 0 && u & w != 0);
            assert!((0..f.codomain_len()).all(|y| !is_subset(f.fiber(y), u & w)));
            // the pair used in the textbook-style example is also a counterexample
            assert!((0..f.codomain_len()).all(|y| !is_subset(f.fiber(y), 0b011 & 0b110)));
        };
        check(&d3, &FiniteMap::new(vec![0, 0, 1], 2).unwrap());
        check(&q3(), &FiniteMap::constant(3, 1, 0));
    }
}
