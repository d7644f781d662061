//! Partial regularization, the inherence tower of a filter, and the finite
//! H-closedness checks built on them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::finite::{all_subsets, is_subset, members, FinitePretop, FiniteTopology, Subset};

/// `rπ`: the vicinity of `x` becomes `adh M(x)`.
pub fn partial_regularization(x: &FinitePretop) -> FinitePretop {
    let vic = x.vicinities().iter().map(|&m| x.adh(m)).collect();
    x.with_vicinities(vic).expect("adherence is expansive")
}

/// Kernel of `F¹` for `F = ↑kernel`: the least set whose inherence holds the
/// kernel, i.e. the union of the minimal vicinities over the kernel.
pub fn tower_step(x: &FinitePretop, kernel: Subset) -> Subset {
    members(kernel).fold(0, |acc, p| acc | x.vicinity(p))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilterTower {
    /// Kernels of `F⁰ = F, F¹, F², ...` up to and including the first repeat.
    pub levels: Vec<Subset>,
    /// Least `n` with `Fⁿ = Fⁿ⁺¹`.
    pub stabilized_at: usize,
    /// Kernel of `F°`.
    pub limit: Subset,
    /// `F ∈ F ⇒ inh F ∈ F`.
    pub open: bool,
    /// `inh F ≠ ∅` for every member.
    pub inherent: bool,
}

pub fn filter_tower(x: &FinitePretop, kernel: Subset) -> Result<FilterTower> {
    if kernel == 0 {
        return Err(Error::EmptyKernel);
    }
    let mut levels = vec![kernel];
    loop {
        let last = *levels.last().unwrap();
        let next = tower_step(x, last);
        if next == last {
            break;
        }
        levels.push(next);
    }
    let stabilized_at = levels.len() - 1;
    Ok(FilterTower {
        limit: levels[stabilized_at],
        open: stabilized_at == 0,
        inherent: x.inh(kernel) != 0,
        levels,
        stabilized_at,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerLemmaReport {
    pub open: bool,
    pub adh_pi: Subset,
    pub adh_rpi: Subset,
    pub adh_pi_f1: Subset,
    /// `adh_π F = adh_rπ F`; only asserted for open filters.
    pub open_lemma: Option<bool>,
    /// `adh_rπ F = adh_π F¹`
    pub tower_lemma: bool,
    /// `adh_rπ Fⁿ = adh_π Fⁿ⁺¹` along the whole tower.
    pub shifted_lemma: bool,
}

pub fn tower_lemmas_check(x: &FinitePretop, kernel: Subset) -> Result<TowerLemmaReport> {
    let tower = filter_tower(x, kernel)?;
    let r = partial_regularization(x);
    let adh_pi = x.adh(kernel);
    let adh_rpi = r.adh(kernel);
    let adh_pi_f1 = x.adh(tower_step(x, kernel));
    let shifted_lemma = tower.levels.iter().all(|&k| r.adh(k) == x.adh(tower_step(x, k)));
    Ok(TowerLemmaReport {
        open: tower.open,
        adh_pi,
        adh_rpi,
        adh_pi_f1,
        open_lemma: tower.open.then_some(adh_pi == adh_rpi),
        tower_lemma: adh_rpi == adh_pi_f1,
        shifted_lemma,
    })
}

/// The open-neighbourhood pretopology of a topology and its partial
/// regularization, the θ-convergence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaPair {
    pub open_nbhd: FinitePretop,
    pub theta: FinitePretop,
}

pub fn theta_of_topology(t: &FiniteTopology) -> ThetaPair {
    let open_nbhd = t.to_pretop();
    let theta = partial_regularization(&open_nbhd);
    ThetaPair { open_nbhd, theta }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PhcMethod {
    RpiCompact,
    AdhCover,
    InherentFilter,
    TowerAdh,
}

impl PhcMethod {
    pub const ALL: [PhcMethod; 4] = [PhcMethod::RpiCompact, PhcMethod::AdhCover, PhcMethod::InherentFilter, PhcMethod::TowerAdh];
}

/// Least subfamily (by index mask) whose adherences cover the space.
pub fn adh_cover_subfamily(x: &FinitePretop, cover: &[Subset]) -> Option<Vec<Subset>> {
    let idx_full = (1u64 << cover.len()) - 1;
    all_subsets(idx_full).find(|&sub| members(sub).fold(0, |acc, i| acc | x.adh(cover[i])) == x.full()).map(|sub| members(sub).map(|i| cover[i]).collect())
}

/// Covers made of one chosen vicinity per point, in lexicographic order of
/// the choices. Every cover contains such a family, so these are the only
/// ones that matter for "finitely many members" conditions.
pub fn vicinity_choice_covers(x: &FinitePretop) -> impl Iterator<Item = Vec<Subset>> + '_ {
    let n = x.len();
    let full = x.full();
    let options: Vec<Vec<Subset>> =
        (0..n).map(|p| all_subsets(full & !x.vicinity(p)).map(|extra| x.vicinity(p) | extra).collect()).collect();
    let total: usize = options.iter().map(Vec::len).product();
    (0..total).map(move |mut code| {
        let mut family = Vec::with_capacity(n);
        for opts in options.iter().rev() {
            family.push(opts[code % opts.len()]);
            code /= opts.len();
        }
        family.reverse();
        family
    })
}

/// Quasi-PHC: the partial regularization is compact, checked by the chosen
/// characterization.
pub fn is_quasi_phc(x: &FinitePretop, method: PhcMethod) -> bool {
    let kernels = || all_subsets(x.full()).filter(|&k| k != 0);
    match method {
        PhcMethod::RpiCompact => {
            let r = partial_regularization(x);
            kernels().all(|k| r.adh(k) != 0)
        }
        PhcMethod::AdhCover => vicinity_choice_covers(x).all(|c| adh_cover_subfamily(x, &c).is_some()),
        PhcMethod::InherentFilter => kernels().filter(|&k| x.inh(k) != 0).all(|k| x.adh(k) != 0),
        PhcMethod::TowerAdh => kernels().all(|k| x.adh(tower_step(x, k)) != 0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PhcStatus {
    pub quasi_phc: bool,
    pub hausdorff: bool,
    pub phc: bool,
}

/// Quasi-PHC plus the Hausdorff flag. On finite spaces Hausdorff forces the
/// discrete structure, so PHC there only ever means "discrete".
pub fn phc_status(x: &FinitePretop, method: PhcMethod) -> PhcStatus {
    let quasi_phc = is_quasi_phc(x, method);
    let hausdorff = x.is_hausdorff().holds;
    PhcStatus { quasi_phc, hausdorff, phc: quasi_phc && hausdorff }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HsetMethod {
    OpenFilter,
    OpenUltrafilter,
    ThetaAdh,
}

impl HsetMethod {
    pub const ALL: [HsetMethod; 3] = [HsetMethod::OpenFilter, HsetMethod::OpenUltrafilter, HsetMethod::ThetaAdh];
}

/// Whether `a` is an H-set of the finite topology `t`.
pub fn hset_check_finite(t: &FiniteTopology, a: Subset, method: HsetMethod) -> Result<bool> {
    if a == 0 {
        return Err(Error::EmptySubspace);
    }
    let generators = || t.opens().iter().copied().filter(|&u| u != 0);
    Ok(match method {
        HsetMethod::OpenFilter => generators().filter(|&u| u & a != 0).all(|u| t.closure(u) & a != 0),
        HsetMethod::OpenUltrafilter => generators()
            .filter(|&u| !generators().any(|v| v != u && is_subset(v, u)))
            .filter(|&u| u & a != 0)
            .all(|u| t.closure(u) & a != 0),
        HsetMethod::ThetaAdh => {
            let theta = theta_of_topology(t).theta;
            all_subsets(t.full()).filter(|&k| k & a != 0).all(|k| theta.adh(k) & a != 0)
        }
    })
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

    #[test]
    fn regularization_examples() {
        let r = partial_regularization(&q3());
        assert_eq!(r.vicinities(), &[0b011, 0b111, 0b110]);
        assert_eq!(partial_regularization(&FinitePretop::discrete(2)), FinitePretop::discrete(2));
        assert_eq!(partial_regularization(&p3()).vicinities(), &[0b111; 3]);
        assert!(r.coarser_leq(&q3()).unwrap());
    }

    #[test]
    fn tower_examples() {
        let x = q3();
        let t = filter_tower(&x, 0b001).unwrap();
        assert_eq!(t.levels, vec![0b001, 0b011, 0b111]);
        assert_eq!(t.limit, 0b111);
        assert!(!t.open && !t.inherent);

        let t = filter_tower(&x, 0b110).unwrap();
        assert_eq!(t.levels, vec![0b110]);
        assert!(t.open && t.inherent);

        assert_eq!(filter_tower(&x, 0b111).unwrap().levels, vec![0b111]);
    }

    #[test]
    fn tower_lemma_examples() {
        let x = q3();
        let rep = tower_lemmas_check(&x, 0b001).unwrap();
        assert_eq!((rep.adh_rpi, rep.adh_pi_f1), (0b011, 0b011));
        assert!(rep.tower_lemma && rep.open_lemma.is_none());
        let rep = tower_lemmas_check(&x, 0b110).unwrap();
        assert_eq!((rep.adh_pi, rep.adh_rpi), (0b111, 0b111));
        assert_eq!(rep.open_lemma, Some(true));
    }

    #[test]
    fn theta_examples() {
        let t = FiniteTopology::from_pretop(&p3()).unwrap();
        assert_eq!(theta_of_topology(&t).theta.vicinity(0), 0b111);
        assert_eq!(theta_of_topology(&FiniteTopology::discrete(3)).theta, FinitePretop::discrete(3));
        assert_eq!(theta_of_topology(&FiniteTopology::indiscrete(2)).theta, FinitePretop::indiscrete(2));
    }

    #[test]
    fn adh_cover_search() {
        let x = q3();
        assert_eq!(adh_cover_subfamily(&x, &[0b011, 0b110, 0b100]), Some(vec![0b110]));
        for m in PhcMethod::ALL {
            assert!(is_quasi_phc(&x, m));
        }
        assert!(phc_status(&FinitePretop::discrete(2), PhcMethod::RpiCompact).phc);
        assert!(!phc_status(&x, PhcMethod::RpiCompact).phc);
    }

    #[test]
    fn hset_examples() {
        let t = FiniteTopology::from_pretop(&p3()).unwrap();
        for m in HsetMethod::ALL {
            assert!(hset_check_finite(&t, 0b100, m).unwrap());
            assert!(hset_check_finite(&t, t.full(), m).unwrap());
        }
    }
}
