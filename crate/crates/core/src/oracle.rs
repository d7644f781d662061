//! Brute-force batteries cross-checking the finite calculus against itself.
//!
//! Spaces with at most three points are enumerated exhaustively; four-point
//! instances are drawn from a seeded ChaCha stream. Every instance is checked
//! independently and the results are folded in instance order, so a report
//! depends only on the configuration, never on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::{projectively_leq, theta_quotient, Extension};
use crate::finite::{all_subsets, enumerate_pretops, is_subset, CompactMethod, CoverCompactMethod, FinitePretop, Subset};
use crate::interval::{AxisDomain, Endpoint, IntervalSet};
use crate::maps::{all_maps, continuous, f_sharp, is_continuous, is_perfect, ContinuityMethod, FiniteMap, PerfectMethod};
use crate::par::map_ordered;
use crate::regularization::{filter_tower, is_quasi_phc, partial_regularization, tower_lemmas_check, tower_step, PhcMethod};

pub const MAX_POINTS: usize = 4;
const EXHAUSTIVE_POINTS: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleConfig {
    pub max_points: usize,
    /// Suite names; empty means every suite.
    pub suites: Vec<String>,
    pub seed: u64,
    /// Instances drawn per suite at the sampled size.
    pub samples: usize,
    #[serde(skip)]
    pub workers: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_points: 3, suites: vec![], seed: 0, samples: 24, workers: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub property: &'static str,
    pub exhaustive_instances: u64,
    pub sampled_instances: u64,
    pub checks: u64,
    pub failures: u64,
    pub first_counterexample: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleSummary {
    pub config: OracleConfig,
    pub suites: Vec<SuiteReport>,
    pub all_pass: bool,
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failures: u64,
    first: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn merge(&mut self, o: Tally) {
        self.checks += o.checks;
        self.failures += o.failures;
        if self.first.is_none() {
            self.first = o.first;
        }
    }
}

enum Instance {
    Space(FinitePretop),
    Pair(FinitePretop, FinitePretop),
    Mapped(FinitePretop, FinitePretop, FiniteMap),
    Seed(u64),
}

struct Suite {
    name: &'static str,
    property: &'static str,
    shape: Shape,
    check: fn(&Instance) -> Tally,
}

#[derive(Clone, Copy)]
enum Shape {
    Spaces,
    /// All pairs exhaustively; sampled instances carry one random map each.
    Pairs,
    Seeds,
}

fn random_space(rng: &mut ChaCha8Rng, n: usize) -> FinitePretop {
    let full = (1u64 << n) - 1;
    let vic = (0..n).map(|p| (rng.gen::<u64>() & full) | 1 << p).collect();
    FinitePretop::new((1..=n).map(|i| i.to_string()).collect(), vic).expect("contains the point")
}

fn random_map(rng: &mut ChaCha8Rng, n: usize, m: usize) -> FiniteMap {
    FiniteMap::new((0..n).map(|_| rng.gen_range(0..m)).collect(), m).expect("in range")
}

fn spaces_up_to(n: usize) -> Vec<FinitePretop> {
    (1..=n).flat_map(|k| enumerate_pretops(k).expect("small").collect::<Vec<_>>()).collect()
}

fn instances(suite: &Suite, idx: usize, cfg: &OracleConfig) -> (Vec<Instance>, u64, u64) {
    let exhaustive_n = cfg.max_points.min(EXHAUSTIVE_POINTS);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (idx as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let sampled = cfg.max_points > EXHAUSTIVE_POINTS;
    let mut out: Vec<Instance> = Vec::new();
    match suite.shape {
        Shape::Spaces => {
            out.extend(spaces_up_to(exhaustive_n).into_iter().map(Instance::Space));
            let ex = out.len() as u64;
            if sampled {
                out.extend((0..cfg.samples).map(|_| Instance::Space(random_space(&mut rng, MAX_POINTS))));
            }
            let s = out.len() as u64 - ex;
            (out, ex, s)
        }
        Shape::Pairs => {
            let all = spaces_up_to(exhaustive_n);
            for a in &all {
                for b in &all {
                    out.push(Instance::Pair(a.clone(), b.clone()));
                }
            }
            let ex = out.len() as u64;
            if sampled {
                for _ in 0..cfg.samples {
                    let x = random_space(&mut rng, MAX_POINTS);
                    let m = rng.gen_range(1..=MAX_POINTS);
                    let y = random_space(&mut rng, m);
                    let f = random_map(&mut rng, MAX_POINTS, m);
                    out.push(Instance::Mapped(x, y, f));
                }
            }
            let s = out.len() as u64 - ex;
            (out, ex, s)
        }
        Shape::Seeds => {
            let n = cfg.samples.max(1) * 8;
            out.extend((0..n).map(|_| Instance::Seed(rng.gen())));
            (out, 0, n as u64)
        }
    }
}

/// Maps of an instance: all of them for a pair, the drawn one otherwise.
fn maps_of(inst: &Instance) -> (&FinitePretop, &FinitePretop, Vec<FiniteMap>) {
    match inst {
        Instance::Pair(x, y) => (x, y, all_maps(x.len(), y.len()).collect()),
        Instance::Mapped(x, y, f) => (x, y, vec![f.clone()]),
        _ => unreachable!("map suites get pairs"),
    }
}

fn space_of(inst: &Instance) -> &FinitePretop {
    match inst {
        Instance::Space(x) => x,
        _ => unreachable!("space suites get spaces"),
    }
}

fn nonempty(full: Subset) -> impl Iterator<Item = Subset> {
    all_subsets(full).filter(|&s| s != 0)
}

fn describe_map(x: &FinitePretop, y: &FinitePretop, f: &FiniteMap) -> String {
    let table: Vec<String> = (0..x.len()).map(|p| format!("{}->{}", x.names()[p], y.names()[f.apply(p)])).collect();
    format!("X: {x}; Y: {y}; f: {}", table.join(" "))
}

fn hausdorff_discrete(inst: &Instance) -> Tally {
    let x = space_of(inst);
    let mut t = Tally::default();
    let discrete = (0..x.len()).all(|p| x.vicinity(p) == 1 << p);
    t.check(x.is_hausdorff().holds == discrete, || format!("{x}"));
    t
}

fn adh_inh_duality(inst: &Instance) -> Tally {
    let x = space_of(inst);
    let full = x.full();
    let mut t = Tally::default();
    for a in all_subsets(full) {
        t.check(x.inh(a) == full & !x.adh(full & !a), || format!("{x}; A={}", x.fmt_set(a)));
        t.check(is_subset(a, x.adh(a)), || format!("{x}; adh not expansive at {}", x.fmt_set(a)));
        for b in all_subsets(full) {
            t.check(x.adh(a | b) == x.adh(a) | x.adh(b), || format!("{x}; A={} B={}", x.fmt_set(a), x.fmt_set(b)));
        }
    }
    t
}

fn compact_at_filter_cover(inst: &Instance) -> Tally {
    let x = space_of(inst);
    let mut t = Tally::default();
    for k in nonempty(x.full()) {
        for a in nonempty(x.full()) {
            let f = x.compact_at(k, a, CompactMethod::Filter).map(|v| v.holds);
            let c = x.compact_at(k, a, CompactMethod::Cover).map(|v| v.holds);
            t.check(f == c, || format!("{x}; K={} A={}", x.fmt_set(k), x.fmt_set(a)));
        }
    }
    t
}

fn cover_compact_3way(inst: &Instance) -> Tally {
    let x = space_of(inst);
    let mut t = Tally::default();
    for a in nonempty(x.full()) {
        let r = x.is_cover_compact(a, CoverCompactMethod::FilterRefines);
        let c = x.is_cover_compact(a, CoverCompactMethod::Cover);
        let v = x.is_cover_compact(a, CoverCompactMethod::VicinitySeparation);
        t.check(r == c && c == v, || format!("{x}; A={}", x.fmt_set(a)));
    }
    t
}

fn continuity_5way(inst: &Instance) -> Tally {
    let (x, y, maps) = maps_of(inst);
    let mut t = Tally::default();
    for f in &maps {
        let verdicts: Vec<bool> =
            ContinuityMethod::ALL.iter().map(|&m| is_continuous(x, y, f, m).map(|v| v.holds).unwrap_or(false)).collect();
        t.check(verdicts.iter().all(|&v| v == verdicts[0]), || format!("{} {verdicts:?}", describe_map(x, y, f)));
    }
    t
}

fn perfect_3way(inst: &Instance) -> Tally {
    let (x, y, maps) = maps_of(inst);
    let mut t = Tally::default();
    for f in &maps {
        let holds = |m| is_perfect(x, y, f, m).map(|r| r.holds).ok();
        let (d, a, ab) = (holds(PerfectMethod::Definition), holds(PerfectMethod::AdhInequality), holds(PerfectMethod::AAndB));
        t.check(d.is_some() && d == a, || format!("definition vs adh-inequality: {}", describe_map(x, y, f)));
        if continuous(x, y, f) {
            t.check(d == ab, || format!("definition vs (a)+(b): {}", describe_map(x, y, f)));
        }
    }
    t
}

fn continuity_composition(inst: &Instance) -> Tally {
    let (x, y, maps) = maps_of(inst);
    let mut t = Tally::default();
    let targets = spaces_up_to(2);
    for f in maps.iter().filter(|f| continuous(x, y, f)) {
        for z in &targets {
            for g in all_maps(y.len(), z.len()).filter(|g| continuous(y, z, g)) {
                let h = f.compose(&g);
                t.check(continuous(x, z, &h), || format!("{}; then into {z}", describe_map(x, y, f)));
            }
        }
    }
    t
}

fn f_sharp_adjunction(inst: &Instance) -> Tally {
    let (x, y, maps) = maps_of(inst);
    let mut t = Tally::default();
    for f in &maps {
        for a in all_subsets(x.full()) {
            t.check(is_subset(f.preimage(f_sharp(f, a)), a), || format!("{}; A={}", describe_map(x, y, f), x.fmt_set(a)));
        }
        for b in all_subsets(y.full()) {
            t.check(is_subset(b, f_sharp(f, f.preimage(b))), || format!("{}; B={}", describe_map(x, y, f), y.fmt_set(b)));
        }
    }
    t
}

fn open_filter_lemma(inst: &Instance) -> Tally {
    let x = space_of(inst);
    let mut t = Tally::default();
    for k in nonempty(x.full()) {
        let r = tower_lemmas_check(x, k);
        if let Ok(r) = &r {
            if let Some(ok) = r.open_lemma {
                t.check(ok, || format!("{x}; K={}", x.fmt_set(k)));
            }
        } else {
            t.check(false, || format!("{x}; K={}: {r:?}", x.fmt_set(k)));
        }
    }
    t
}

fn tower_lemma(inst: &Instance) -> Tally {
    let x = space_of(inst);
    let r = partial_regularization(x);
    let mut t = Tally::default();
    for k in nonempty(x.full()) {
        t.check(r.adh(k) == x.adh(tower_step(x, k)), || format!("{x}; K={}", x.fmt_set(k)));
        if let Ok(tower) = filter_tower(x, k) {
            for &level in &tower.levels {
                t.check(r.adh(level) == x.adh(tower_step(x, level)), || format!("{x}; K={} level {}", x.fmt_set(k), x.fmt_set(level)));
            }
        }
    }
    t
}

fn phc_4way(inst: &Instance) -> Tally {
    let x = space_of(inst);
    let mut t = Tally::default();
    let v: Vec<bool> = PhcMethod::ALL.iter().map(|&m| is_quasi_phc(x, m)).collect();
    t.check(v.iter().all(|&b| b == v[0]), || format!("{x} {v:?}"));
    t
}

fn theta_quotient_lemma(inst: &Instance) -> Tally {
    let x = space_of(inst);
    let mut t = Tally::default();
    for m in 1..=x.len() {
        for f in all_maps(x.len(), m).filter(FiniteMap::is_surjective) {
            let names = (1..=m).map(|i| format!("y{i}")).collect();
            let ok = theta_quotient(x, &f, names).map(|q| q.report.lemma_agrees).unwrap_or(false);
            t.check(ok, || describe_map(x, x, &f).replace("; Y: ", "; onto ").to_string());
        }
    }
    t
}

fn dense_bases(y: &FinitePretop) -> impl Iterator<Item = Extension> + '_ {
    nonempty(y.full()).filter_map(move |b| Extension::new(y.clone(), b).ok())
}

fn extension_order(inst: &Instance) -> Tally {
    let y = space_of(inst);
    let mut t = Tally::default();
    for e in dense_bases(y) {
        let leq = |small: Result<Extension>, large: Result<Extension>| match (small, large) {
            (Ok(s), Ok(l)) => projectively_leq(&s, &l).map(|v| v.holds).unwrap_or(false),
            _ => false,
        };
        let plus = e.with_space(e.strict());
        let sharp = e.with_space(e.simple());
        let base = y.fmt_set(e.base());
        t.check(leq(Ok(e.clone()), plus), || format!("Y <= Y+ fails: {y}; X={base}"));
        t.check(leq(sharp, Ok(e.clone())), || format!("Y# <= Y fails: {y}; X={base}"));
    }
    t
}

/// `(adh_{Y⁺}({p} ∪ U), oU ∪ adh_X U)` for `U ⊆ X`.
fn strict_adh_sides(e: &Extension, plus: &FinitePretop, p: usize, u: Subset) -> (Subset, Subset) {
    let lhs = plus.adh(1 << p | u);
    let rhs = e.o_set(u) | (e.space().adh(u) & e.base());
    (lhs, rhs)
}

fn strict_adh_identity(inst: &Instance) -> Tally {
    let y = space_of(inst);
    let mut t = Tally::default();
    for e in dense_bases(y) {
        let plus = e.strict();
        for p in 0..y.len() {
            for u in all_subsets(e.base()).filter(|&u| is_subset(e.trace(p), u)) {
                let (lhs, rhs) = strict_adh_sides(&e, &plus, p, u);
                t.check(lhs == rhs, || {
                    format!("{y}; X={}; p={}; U={}: {} vs {}", y.fmt_set(e.base()), y.names()[p], y.fmt_set(u), y.fmt_set(lhs), y.fmt_set(rhs))
                });
            }
        }
    }
    t
}

fn strict_adh_inclusion(inst: &Instance) -> Tally {
    let y = space_of(inst);
    let mut t = Tally::default();
    for e in dense_bases(y) {
        let plus = e.strict();
        let sharp = e.simple();
        let rplus = partial_regularization(&plus);
        for p in 0..y.len() {
            for u in all_subsets(e.base()) {
                let (lhs, rhs) = strict_adh_sides(&e, &plus, p, u);
                t.check(is_subset(rhs, lhs), || format!("{y}; X={}; p={}; U={}", y.fmt_set(e.base()), y.names()[p], y.fmt_set(u)));
            }
            t.check(is_subset(sharp.vicinity(p), rplus.vicinity(p)), || {
                format!("{y}; X={}; p={}: M_rY+ does not contain M_Y#", y.fmt_set(e.base()), y.names()[p])
            });
        }
    }
    t
}

fn random_interval_set(rng: &mut ChaCha8Rng, dom: AxisDomain) -> IntervalSet {
    let n = rng.gen_range(0..4);
    let mut raw = Vec::new();
    for _ in 0..n {
        let a = rng.gen_range(-12i64..12);
        let lo = if rng.gen_ratio(1, 6) { Endpoint::NegInf } else { Endpoint::Int(a) };
        let hi = if rng.gen_ratio(1, 6) { Endpoint::PosInf } else { Endpoint::Int(a + rng.gen_range(0..6)) };
        raw.push((lo, hi));
    }
    IntervalSet::new(dom, &raw).expect("well-formed")
}

fn interval_laws(inst: &Instance) -> Tally {
    let Instance::Seed(seed) = inst else { unreachable!("seeded suite") };
    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
    let dom = if rng.gen() { AxisDomain::Integers } else { AxisDomain::NAT0 };
    let (a, b, c) = (random_interval_set(&mut rng, dom), random_interval_set(&mut rng, dom), random_interval_set(&mut rng, dom));
    let mut t = Tally::default();
    let radius = a.radius().max(b.radius()).max(c.radius()) + 5;
    let u = |x: &IntervalSet, y: &IntervalSet| x.union(y).expect("same axis");
    let i = |x: &IntervalSet, y: &IntervalSet| x.intersect(y).expect("same axis");
    let show = || format!("A={a} B={b} C={c}");
    t.check(u(&a, &b) == u(&b, &a), show);
    t.check(i(&a, &u(&b, &c)) == u(&i(&a, &b), &i(&a, &c)), show);
    t.check(u(&a, &b).complement() == i(&a.complement(), &b.complement()), show);
    t.check(a.complement().complement() == a, show);
    t.check(a.difference(&a).expect("same axis").is_empty(), show);
    for n in -radius..=radius {
        let ok = u(&a, &b).contains(n) == (a.contains(n) || b.contains(n))
            && i(&a, &b).contains(n) == (a.contains(n) && b.contains(n))
            && a.complement().contains(n) == (dom.contains(n) && !a.contains(n));
        t.check(ok, || format!("{} at {n}", show()));
    }
    t
}

fn suites() -> Vec<Suite> {
    use Shape::*;
    vec![
        Suite { name: "hausdorff-discrete", property: "a finite pretopology is Hausdorff iff it is discrete", shape: Spaces, check: hausdorff_discrete },
        Suite { name: "adh-inh-duality", property: "inh A = X \\ adh(X \\ A); adh expansive and additive", shape: Spaces, check: adh_inh_duality },
        Suite { name: "compact-at-filter-cover", property: "compact-at by meshing filters = by covers", shape: Spaces, check: compact_at_filter_cover },
        Suite { name: "cover-compact-3way", property: "cover-compactness: refinement, covers, vicinity separation agree", shape: Spaces, check: cover_compact_3way },
        Suite { name: "continuity-5way", property: "continuity: limit, adh-filter, adh-set, inh, vicinity agree", shape: Pairs, check: continuity_5way },
        Suite { name: "perfect-3way", property: "perfect: definition = adh-inequality, and = (a)+(b) for continuous maps", shape: Pairs, check: perfect_3way },
        Suite { name: "continuity-composition", property: "composites of continuous maps are continuous", shape: Pairs, check: continuity_composition },
        Suite { name: "f-sharp-adjunction", property: "f^-[f#[A]] <= A and B <= f#[f^-[B]]", shape: Pairs, check: f_sharp_adjunction },
        Suite { name: "open-filter-lemma", property: "adh_pi F = adh_rpi F for open filters", shape: Spaces, check: open_filter_lemma },
        Suite { name: "tower-lemma", property: "adh_rpi F = adh_pi F1 along the filter tower", shape: Spaces, check: tower_lemma },
        Suite { name: "phc-4way", property: "quasi-PHC characterizations agree", shape: Spaces, check: phc_4way },
        Suite { name: "theta-quotient-lemma", property: "sigma-convergence = compact-at-fiber = vicinity containment", shape: Spaces, check: theta_quotient_lemma },
        Suite { name: "extension-order", property: "Y# <= Y <= Y+ in the projective order", shape: Spaces, check: extension_order },
        Suite { name: "strict-adh-identity", property: "adh_Y+({p} | U) = oU | adh_X U for U containing the trace of p", shape: Spaces, check: strict_adh_identity },
        Suite { name: "strict-adh-inclusion", property: "adh_Y+({p} | U) contains oU | adh_X U; M_rY+(p) contains M_Y#(p)", shape: Spaces, check: strict_adh_inclusion },
        Suite { name: "interval-laws", property: "Boolean laws of interval sets, checked pointwise", shape: Seeds, check: interval_laws },
    ]
}

pub fn suite_names() -> Vec<&'static str> {
    suites().iter().map(|s| s.name).collect()
}

pub fn run(cfg: &OracleConfig) -> Result<OracleSummary> {
    if cfg.max_points == 0 || cfg.max_points > MAX_POINTS {
        return Err(Error::SizeLimit(format!("max_points must be in 1..={MAX_POINTS}, got {}", cfg.max_points)));
    }
    let all = suites();
    if let Some(bad) = cfg.suites.iter().find(|s| !all.iter().any(|t| t.name == s.as_str())) {
        return Err(Error::SizeLimit(format!("unknown suite `{bad}`")));
    }
    let workers = cfg.workers.max(1);
    let mut reports = Vec::new();
    for (idx, suite) in all.iter().enumerate() {
        if !cfg.suites.is_empty() && !cfg.suites.iter().any(|s| s == suite.name) {
            continue;
        }
        let (items, exhaustive, sampled) = instances(suite, idx, cfg);
        let mut tally = Tally::default();
        for t in map_ordered(&items, workers, suite.check) {
            tally.merge(t);
        }
        reports.push(SuiteReport {
            name: suite.name,
            property: suite.property,
            exhaustive_instances: exhaustive,
            sampled_instances: sampled,
            checks: tally.checks,
            failures: tally.failures,
            first_counterexample: tally.first,
        });
    }
    let all_pass = reports.iter().all(SuiteReport::passed);
    Ok(OracleSummary { config: cfg.clone(), suites: reports, all_pass })
}

/// Number of Hausdorff pretopologies on `n` points.
pub fn hausdorff_count(n: usize) -> Result<u64> {
    Ok(enumerate_pretops(n)?.filter(|x| x.is_hausdorff().holds).count() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(suites: &[&str], max_points: usize) -> OracleConfig {
        OracleConfig { max_points, suites: suites.iter().map(|s| s.to_string()).collect(), seed: 7, samples: 4, workers: 1 }
    }

    #[test]
    fn hausdorff_only_discrete() {
        assert_eq!(hausdorff_count(3).unwrap(), 1);
        let r = run(&cfg(&["hausdorff-discrete"], 3)).unwrap();
        assert_eq!(r.suites[0].exhaustive_instances, 1 + 4 + 64);
        assert!(r.all_pass);
    }

    #[test]
    fn pair_counts() {
        let r = run(&cfg(&["continuity-5way"], 2)).unwrap();
        let s = &r.suites[0];
        assert_eq!(s.exhaustive_instances, 25);
        // maps between spaces of sizes a, b: b^a, summed over 5x5 space pairs
        let sizes = [1u32, 2, 2, 2, 2];
        let expected: u64 = sizes.iter().flat_map(|&a| sizes.iter().map(move |&b| (b as u64).pow(a))).sum();
        assert_eq!(s.checks, expected);
        assert!(s.passed());
    }

    #[test]
    fn determinism_across_workers() {
        let mut c = cfg(&["adh-inh-duality", "interval-laws", "phc-4way"], 4);
        let base = serde_json::to_string(&run(&c).unwrap()).unwrap();
        for w in [2, 4] {
            c.workers = w;
            assert_eq!(serde_json::to_string(&run(&c).unwrap()).unwrap(), base);
        }
    }

    #[test]
    fn limits() {
        assert!(matches!(run(&cfg(&[], 5)), Err(Error::SizeLimit(_))));
        assert!(matches!(run(&cfg(&["nope"], 2)), Err(Error::SizeLimit(_))));
    }
}
