//! The finite calculus against definitions written directly in terms of
//! filter convergence (filters on a finite set are the principal filters of
//! their kernels; `↑K → x` iff `K ⊆ M(x)`).

use hclosed_core::finite::{CompactMethod, CoverCompactMethod, FinitePretop, Subset};
use hclosed_core::maps::{continuous, is_perfect, FiniteMap, PerfectMethod};
use hclosed_core::regularization::partial_regularization;
use proptest::prelude::*;

fn kernels(n: usize) -> impl Iterator<Item = Subset> {
    1..(1u64 << n)
}

fn conv(x: &FinitePretop, k: Subset, p: usize) -> bool {
    k & !x.vicinity(p) == 0
}

fn lim(x: &FinitePretop, k: Subset) -> Subset {
    (0..x.len()).filter(|&p| conv(x, k, p)).fold(0, |m, p| m | 1 << p)
}

/// Limits of every filter meshing `↑a`.
fn adh_by_filters(x: &FinitePretop, a: Subset) -> Subset {
    kernels(x.len()).filter(|&g| g & a != 0).fold(0, |m, g| m | lim(x, g))
}

fn space(n: usize, raw: &[u64]) -> FinitePretop {
    let full = (1u64 << n) - 1;
    let vic = (0..n).map(|p| raw[p] & full | 1 << p).collect();
    FinitePretop::new((1..=n).map(|i| i.to_string()).collect(), vic).unwrap()
}

fn arb_space() -> impl Strategy<Value = FinitePretop> {
    (1usize..=5, prop::collection::vec(any::<u64>(), 5)).prop_map(|(n, raw)| space(n, &raw))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn adherence_is_filter_adherence(x in arb_space()) {
        for a in 0..(1u64 << x.len()) {
            prop_assert_eq!(x.adh(a), adh_by_filters(&x, a));
        }
    }

    #[test]
    fn hausdorff_is_unique_limits(x in arb_space()) {
        let unique = kernels(x.len()).all(|k| lim(&x, k).count_ones() <= 1);
        prop_assert_eq!(x.is_hausdorff().holds, unique);
    }

    #[test]
    fn regularization_is_adherence_of_vicinities(x in arb_space()) {
        // V_r(x) is generated by adh U over U ⊇ M(x); its kernel is their intersection
        let r = partial_regularization(&x);
        for p in 0..x.len() {
            let kernel = kernels(x.len())
                .filter(|&u| x.vicinity(p) & !u == 0)
                .fold(x.full(), |acc, u| acc & adh_by_filters(&x, u));
            prop_assert_eq!(r.vicinity(p), kernel);
        }
    }

    #[test]
    fn compact_at_is_the_definition(x in (1usize..=4, prop::collection::vec(any::<u64>(), 5)).prop_map(|(n, raw)| space(n, &raw))) {
        for f in kernels(x.len()) {
            for a in kernels(x.len()) {
                let def = kernels(x.len()).filter(|&g| g & f != 0).all(|g| adh_by_filters(&x, g) & a != 0);
                prop_assert_eq!(x.compact_at(f, a, CompactMethod::Filter).unwrap().holds, def);
                prop_assert_eq!(x.compact_at(f, a, CompactMethod::Cover).unwrap().holds, def);
            }
        }
    }

    #[test]
    fn continuity_is_limit_preservation(
        x in (1usize..=3, prop::collection::vec(any::<u64>(), 5)).prop_map(|(n, raw)| space(n, &raw)),
        y in (1usize..=3, prop::collection::vec(any::<u64>(), 5)).prop_map(|(n, raw)| space(n, &raw)),
        seed in any::<u64>(),
    ) {
        let table: Vec<usize> = (0..x.len()).map(|i| (seed >> (3 * i)) as usize % y.len()).collect();
        let f = FiniteMap::new(table, y.len()).unwrap();
        let def = kernels(x.len()).all(|k| {
            let image = f.image(k);
            (0..x.len()).filter(|&p| conv(&x, k, p)).all(|p| conv(&y, image, f.apply(p)))
        });
        prop_assert_eq!(continuous(&x, &y, &f), def);
        // perfect: preimages of convergent filters are compact at the fiber
        let perfect = kernels(y.len()).all(|k| {
            let pre = f.preimage(k);
            pre == 0 || (0..y.len()).filter(|&q| conv(&y, k, q)).all(|q| {
                kernels(x.len()).filter(|&g| g & pre != 0).all(|g| adh_by_filters(&x, g) & f.fiber(q) != 0)
            })
        });
        prop_assert_eq!(is_perfect(&x, &y, &f, PerfectMethod::Definition).unwrap().holds, perfect);
    }
}

fn q3() -> FinitePretop {
    FinitePretop::from_table(&[("1", &["1", "2"]), ("2", &["2", "3"]), ("3", &["3"])]).unwrap()
}

#[test]
fn cover_compact_sets_need_not_be_closed() {
    // every subset of a finite space is cover-compact, yet {3} is not adherence-closed in Q3
    let x = q3();
    let a = x.mask_of(&["3"]).unwrap();
    assert!(x.is_cover_compact(a, CoverCompactMethod::Cover));
    assert_eq!(x.fmt_set(x.adh(a)), "{2 3}");
}

#[test]
fn q3_worked_values() {
    let x = q3();
    let m = |names: &[&str]| x.mask_of(names).unwrap();
    assert_eq!(x.adh(m(&["3"])), m(&["2", "3"]));
    assert_eq!(x.adh(x.adh(m(&["3"]))), x.full());
    assert_eq!(x.inh(m(&["1", "2"])), m(&["1"]));
    assert_eq!(x.inh(m(&["2", "3"])), m(&["2", "3"]));
    let r = partial_regularization(&x);
    assert_eq!(r.vicinities(), &[m(&["1", "2"]), x.full(), m(&["2", "3"])]);
}
