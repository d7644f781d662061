//! The symbolic engine checked against finite truncations and against the
//! pointwise definitions of its operators.

use std::sync::Arc;

use hclosed_core::defset::{DefSet, GroundSchema, Point};
use hclosed_core::literal::parse_set;
use hclosed_core::symbolic::{builtin, discrete_ray, half_grid, urysohn, SymbolicPretop};
use proptest::prelude::*;

const WINDOW: i64 = 5;
const INNER: i64 = 3;

fn spaces() -> Vec<SymbolicPretop> {
    vec![urysohn().unwrap(), half_grid().unwrap(), discrete_ray(2).unwrap()]
}

/// Finite sets inside the inner window, picked by a bit pattern over its points.
fn finite_set(x: &SymbolicPretop, bits: u64) -> DefSet {
    let pts = x.carrier().points_within(INNER);
    let s = x.schema();
    pts.iter()
        .enumerate()
        .filter(|(i, _)| bits >> (i % 64) & 1 == 1)
        .fold(DefSet::empty(s), |acc, (_, &p)| acc.union(&DefSet::point(s, p).unwrap()).unwrap())
}

fn index_of(x: &SymbolicPretop, names: &[String], p: Point) -> usize {
    let n = x.schema().point_name(p);
    names.iter().position(|m| *m == n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adherence_of_finite_sets_matches_truncation(bits in any::<u64>(), which in 0usize..3) {
        let x = &spaces()[which];
        let t = x.truncate(WINDOW).unwrap();
        let s = finite_set(x, bits);
        let mask = s.points_within(WINDOW).into_iter().fold(0u64, |m, p| m | 1 << index_of(x, t.names(), p));
        let finite = t.adh(mask);
        let symbolic = x.adh(&s).unwrap();
        for p in x.carrier().points_within(WINDOW) {
            let i = index_of(x, t.names(), p);
            prop_assert_eq!(symbolic.contains(p).unwrap(), finite >> i & 1 == 1, "point {}", x.schema().point_name(p));
        }
        // a finite set has no adherent point outside the window
        prop_assert!(symbolic.is_finite());
    }
}

fn literal_sets(s: &Arc<GroundSchema>) -> Vec<DefSet> {
    let grid = s.grids.first().map(|g| g.name.clone());
    let mut lits = vec!["{}".to_string()];
    if let Some(g) = grid {
        lits.extend([
            format!("grid({g}; cols>0)"),
            format!("grid({g}; rows=4; cols!=0)"),
            format!("grid({g}; rows>2; cols=0)"),
            format!("grid({g}; cols<=0) | grid({g}; rows=1..3)"),
            format!("~grid({g}; cols=1..3)"),
        ]);
    }
    for r in &s.rays {
        lits.push(format!("ray({}; 0..4, >9)", r.name));
    }
    lits.iter().map(|l| parse_set(l, s).unwrap()).collect()
}

#[test]
fn inherence_is_dual_to_adherence() {
    for x in spaces() {
        for s in literal_sets(x.schema()) {
            let dual = x.adh(&s.complement()).unwrap().complement().intersect(x.carrier()).unwrap();
            assert_eq!(x.inh(&s).unwrap(), dual, "{s}");
            assert!(s.intersect(x.carrier()).unwrap().is_subset(&x.adh(&s).unwrap()).unwrap());
        }
    }
}

#[test]
fn adherence_examples() {
    let x = urysohn().unwrap();
    let s = x.schema().clone();
    let b = parse_set("grid(G; cols>0)", &s).unwrap();
    assert_eq!(x.adh(&b).unwrap(), parse_set("grid(G; cols>=0) | pinf", &s).unwrap());
    let row = parse_set("grid(G; rows=4; cols!=0)", &s).unwrap();
    assert_eq!(x.adh(&row).unwrap(), parse_set("grid(G; rows=4)", &s).unwrap());
    assert!(x.adh(&DefSet::empty(&s)).unwrap().is_empty());
}

#[test]
fn templates_shrink_and_regularization_coarsens() {
    for x in spaces() {
        let r = x.regularize().unwrap();
        for p in x.carrier().points_within(4) {
            for k in 0..10 {
                let t = x.template_at(p, k).unwrap();
                assert!(x.template_at(p, k + 1).unwrap().is_subset(&t).unwrap(), "{p:?} at {k}");
                assert!(t.is_subset(&r.template_at(p, k).unwrap()).unwrap(), "{p:?} at {k}");
                assert!(t.contains(p).unwrap());
            }
        }
    }
}

#[test]
fn truncation_sizes() {
    assert_eq!(urysohn().unwrap().truncate(5).unwrap().len(), 5 * 11 + 2);
    let d = discrete_ray(1).unwrap().truncate(3).unwrap();
    assert_eq!(d.len(), 4);
    assert!((0..4).all(|p| d.vicinity(p) == 1 << p));
    assert!(urysohn().unwrap().truncate(1).is_err());
}

#[test]
fn hausdorff_verdicts() {
    assert!(urysohn().unwrap().is_hausdorff().unwrap().holds);
    assert!(half_grid().unwrap().is_hausdorff().unwrap().holds);
    assert!(discrete_ray(2).unwrap().is_hausdorff().unwrap().holds);
    assert!(builtin("discrete_ray(3)").unwrap().is_hausdorff().unwrap().holds);
}
