//! Constructions on finite spaces: θ-quotients, extensions with their strict
//! and simple modifications, the projective order, and the finite `X*`/`κX`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite::{all_subsets, is_subset, members, CoverCompactMethod, FinitePretop, Subset, Verdict};
use crate::maps::{continuous, f_sharp, is_strongly_irreducible, is_w_theta_continuous, FiniteMap};
use crate::regularization::{is_quasi_phc, PhcMethod};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub fibers_cover_compact: bool,
    pub source_compact: bool,
    pub source_hausdorff: bool,
    /// Table convergence, the compact-at definition and the vicinity lemma
    /// agree on every target kernel and point.
    pub lemma_agrees: bool,
    pub strongly_irreducible: bool,
    pub w_theta_continuous: bool,
    pub quotient_hausdorff: bool,
    pub quotient_quasi_phc: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaQuotient {
    pub space: FinitePretop,
    pub report: QuotientReport,
}

/// Minimal σ-vicinity of `y`: `f#` of the union of the vicinities over its fiber.
pub fn quotient_vicinity(x: &FinitePretop, f: &FiniteMap, y: usize) -> Subset {
    let over_fiber = members(f.fiber(y)).fold(0, |acc, p| acc | x.vicinity(p));
    f_sharp(f, over_fiber)
}

/// The θ-quotient convergence on `target_names` induced by the surjection `f`.
/// The hypotheses of the PHC theorem are evaluated and reported, not enforced.
pub fn theta_quotient(x: &FinitePretop, f: &FiniteMap, target_names: Vec<String>) -> Result<ThetaQuotient> {
    if f.domain_len() != x.len() || f.codomain_len() != target_names.len() {
        return Err(Error::InvalidMap("map does not match the given spaces".into()));
    }
    if let Some(y) = (0..f.codomain_len()).find(|&y| f.fiber(y) == 0) {
        return Err(Error::NotSurjective(target_names[y].clone()));
    }
    let vic = (0..f.codomain_len()).map(|y| quotient_vicinity(x, f, y)).collect();
    let space = FinitePretop::new(target_names, vic)?;
    let lemma_agrees = all_subsets(space.full()).filter(|&k| k != 0).all(|k| {
        (0..space.len()).all(|y| {
            let table = space.converges(k, y);
            let definition = crate::maps::preimage_compact_at_fiber(x, f, k, y);
            let fiber_vic = members(f.fiber(y)).fold(0, |acc, p| acc | x.vicinity(p));
            let lemma = is_subset(f.preimage(k), fiber_vic);
            table == definition && definition == lemma
        })
    });
    let report = QuotientReport {
        fibers_cover_compact: (0..space.len()).all(|y| x.is_cover_compact(f.fiber(y), CoverCompactMethod::Cover)),
        source_compact: all_subsets(x.full()).filter(|&k| k != 0).all(|k| x.adh(k) != 0),
        source_hausdorff: x.is_hausdorff().holds,
        lemma_agrees,
        strongly_irreducible: is_strongly_irreducible(x, f).holds,
        w_theta_continuous: is_w_theta_continuous(x, &space, f),
        quotient_hausdorff: space.is_hausdorff().holds,
        quotient_quasi_phc: is_quasi_phc(&space, PhcMethod::RpiCompact),
    };
    Ok(ThetaQuotient { space, report })
}

/// A space `Y` with a dense subset `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    space: FinitePretop,
    base: Subset,
}

impl Extension {
    pub fn new(space: FinitePretop, base: Subset) -> Result<Self> {
        let base = base & space.full();
        if base == 0 {
            return Err(Error::EmptySubspace);
        }
        if space.adh(base) != space.full() {
            return Err(Error::NotDense);
        }
        Ok(Extension { space, base })
    }

    pub fn space(&self) -> &FinitePretop {
        &self.space
    }

    pub fn base(&self) -> Subset {
        self.base
    }

    /// `X` with its subspace structure.
    pub fn base_space(&self) -> FinitePretop {
        self.space.restrict(self.base).expect("nonempty base")
    }

    /// `M_Y(p) ∩ X`
    pub fn trace(&self, p: usize) -> Subset {
        self.space.vicinity(p) & self.base
    }

    /// `o(A) = {p : M_Y(p) ∩ X ⊆ A}`
    pub fn o_set(&self, a: Subset) -> Subset {
        (0..self.space.len()).filter(|&p| is_subset(self.trace(p), a)).fold(0, |acc, p| acc | 1 << p)
    }

    /// `Y⁺`: `M₊(p) = {p} ∪ (M_Y(p) ∩ X)`.
    pub fn strict(&self) -> FinitePretop {
        let vic = (0..self.space.len()).map(|p| 1 << p | self.trace(p)).collect();
        self.space.with_vicinities(vic).expect("contains the point")
    }

    /// `Y#`: `M#(p) = o(M_Y(p) ∩ X)`.
    pub fn simple(&self) -> FinitePretop {
        let vic = (0..self.space.len()).map(|p| self.o_set(self.trace(p))).collect();
        self.space.with_vicinities(vic).expect("o of a trace contains its point")
    }

    pub fn with_space(&self, space: FinitePretop) -> Result<Extension> {
        Extension::new(space, self.base)
    }
}

/// Whether `smaller ≤ larger` in the projective order over a common base: some
/// continuous map `larger → smaller` fixes the base points (matched by name).
/// Candidates are tried in lexicographic order of the images of the non-base
/// points; the first continuous one is returned.
pub fn projectively_leq(smaller: &Extension, larger: &Extension) -> Result<Verdict<()>> {
    projective_witness(smaller, larger).map(|w| match w {
        Some(_) => Verdict::yes(),
        None => Verdict::no(()),
    })
}

pub fn projective_witness(smaller: &Extension, larger: &Extension) -> Result<Option<FiniteMap>> {
    let (z, y) = (smaller.space(), larger.space());
    let base_names = |e: &Extension| {
        let mut v: Vec<String> = members(e.base).map(|i| e.space.names()[i].clone()).collect();
        v.sort();
        v
    };
    if base_names(smaller) != base_names(larger) {
        return Err(Error::DifferentBase);
    }
    let mut table = vec![0usize; y.len()];
    let mut free = Vec::new();
    for (p, slot) in table.iter_mut().enumerate() {
        if larger.base & (1 << p) != 0 {
            *slot = z.index_of(&y.names()[p])?;
        } else {
            free.push(p);
        }
    }
    // the two bases must carry the same subspace structure
    let base_map = FiniteMap::new(table.clone(), z.len())?;
    for p in members(larger.base) {
        let img = base_map.image(y.vicinity(p) & larger.base);
        if img != z.vicinity(table[p]) & smaller.base {
            return Err(Error::DifferentBase);
        }
    }
    let total = (z.len() as u64).pow(free.len() as u32);
    for mut code in 0..total {
        for &p in free.iter().rev() {
            table[p] = (code % z.len() as u64) as usize;
            code /= z.len() as u64;
        }
        let f = FiniteMap::new(table.clone(), z.len())?;
        if continuous(y, z, &f) {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaFinite {
    pub star: FinitePretop,
    pub kappa: FinitePretop,
    /// Richardson regularity: `adh M(x) = M(x)` at every point.
    pub regular: Verdict<usize>,
    pub note: &'static str,
}

/// `X*` and `κX = (X*)⁺` for a finite space. A finite set carries no free
/// ultrafilters, so both constructions return `X`; the infinite analogue is
/// the end extension of a symbolic space.
pub fn star_and_kappa_finite(x: &FinitePretop) -> KappaFinite {
    let star = x.clone();
    let kappa = Extension::new(star.clone(), star.full()).expect("a space is dense in itself").strict();
    KappaFinite {
        star,
        kappa,
        regular: x.is_regular(),
        note: "finite spaces have no free ultrafilters: X* = X and kX = X; use end_extension for symbolic spaces",
    }
}

/// Kernel of `V(A)`, the filter of sets whose inherence contains `A`.
pub fn set_vicinity(x: &FinitePretop, a: Subset) -> Subset {
    members(a).fold(0, |acc, p| acc | x.vicinity(p))
}

/// Disjoint vicinity kernels of `a` and `b`, if they exist.
pub fn separate(x: &FinitePretop, a: Subset, b: Subset) -> Option<(Subset, Subset)> {
    let (u, v) = (set_vicinity(x, a), set_vicinity(x, b));
    (u & v == 0).then_some((u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> FinitePretop {
        FinitePretop::from_table(&[("a", &["a"]), ("b", &["a", "b"])]).unwrap()
    }

    fn xpq() -> FinitePretop {
        FinitePretop::from_table(&[("x", &["x"]), ("p", &["x", "p"]), ("q", &["x", "q"])]).unwrap()
    }

    #[test]
    fn quotient_of_discrete() {
        let x = FinitePretop::discrete(3);
        let f = FiniteMap::new(vec![0, 0, 1], 2).unwrap();
        let q = theta_quotient(&x, &f, vec!["p".into(), "q".into()]).unwrap();
        assert_eq!(q.space.vicinities(), &[0b01, 0b10]);
        assert!(q.report.lemma_agrees);
        let id = theta_quotient(&x, &FiniteMap::identity(3), x.names().to_vec()).unwrap();
        assert_eq!(id.space, x);
        let g = FiniteMap::new(vec![0, 0, 0], 2).unwrap();
        assert_eq!(theta_quotient(&x, &g, vec!["p".into(), "q".into()]), Err(Error::NotSurjective("q".into())));
    }

    #[test]
    fn extension_validation() {
        assert!(Extension::new(s2(), 0b01).is_ok());
        assert_eq!(Extension::new(FinitePretop::discrete(2), 0b01), Err(Error::NotDense));
        let e = Extension::new(s2(), 0b11).unwrap();
        assert_eq!(e.strict(), s2());
        assert_eq!(e.simple(), s2());
    }

    #[test]
    fn strict_and_simple() {
        let e = Extension::new(s2(), 0b01).unwrap();
        assert_eq!(e.strict(), s2());
        assert_eq!(e.o_set(0b01), 0b11);
        assert_eq!(e.simple().vicinity(0), 0b11);

        let e = Extension::new(xpq(), 0b001).unwrap();
        assert_eq!(e.strict(), xpq());
        assert_eq!(e.simple().vicinities(), &[0b111; 3]);
    }

    #[test]
    fn projective_order_on_s2() {
        let e = Extension::new(s2(), 0b01).unwrap();
        let plus = e.with_space(e.strict()).unwrap();
        let sharp = e.with_space(e.simple()).unwrap();
        assert!(projectively_leq(&sharp, &e).unwrap().holds);
        assert!(projectively_leq(&e, &plus).unwrap().holds);
        assert!(projectively_leq(&e, &e).unwrap().holds);
    }

    #[test]
    fn simple_extension_of_xpq_maps_onto_the_original() {
        // The constant map onto x is continuous from Y# (indiscrete) into Y and
        // fixes x, so Y ≤ Y# holds here.
        let e = Extension::new(xpq(), 0b001).unwrap();
        let sharp = e.with_space(e.simple()).unwrap();
        let w = projective_witness(&e, &sharp).unwrap().unwrap();
        assert_eq!(w.table(), &[0, 0, 0]);
    }

    #[test]
    fn different_bases() {
        let e = Extension::new(s2(), 0b01).unwrap();
        let f = Extension::new(s2(), 0b11).unwrap();
        assert_eq!(projectively_leq(&e, &f), Err(Error::DifferentBase));
    }

    #[test]
    fn kappa_of_finite_space() {
        let q3 = FinitePretop::from_table(&[("1", &["1", "2"]), ("2", &["2", "3"]), ("3", &["3"])]).unwrap();
        let k = star_and_kappa_finite(&q3);
        assert_eq!(k.kappa, q3);
        assert!(!k.regular.holds);
        assert!(star_and_kappa_finite(&FinitePretop::discrete(2)).regular.holds);
    }

    #[test]
    fn separation_in_discrete_space() {
        let d = FinitePretop::discrete(3);
        assert_eq!(separate(&d, 0b001, 0b110), Some((0b001, 0b110)));
        assert_eq!(separate(&s2(), 0b01, 0b10), None);
    }
}
