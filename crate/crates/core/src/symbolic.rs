//! Pretopologies on countable schemas given by shrinking vicinity templates.
//!
//! Points are sorted into rules by constant-endpoint cells. Every point of a
//! rule gets the vicinity filter generated by `T(x, 0) ⊇ T(x, 1) ⊇ ...`, where
//! each `T(x, k)` is a union of boxes whose endpoints are linear in `k` and in
//! the coordinates of `x`. Operations reduce to [`crate::solver`] problems and
//! return new rule tables, so results stay exact inside the fragment and fail
//! with [`Error::FragmentEscape`] outside it.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::defset::{boxes, from_boxes, DefSet, GroundSchema, Point, Strand};
use crate::error::{Error, Result};
use crate::finite::{FinitePretop, Verdict, MAX_POINTS};
use crate::interval::{AxisDomain, Endpoint, Interval};
use crate::lin::{Lin, SymEnd, Var, NVARS};
use crate::solver::{self, Conj, Guard, Order, FULL};

pub type Bounds = Vec<(SymEnd, SymEnd)>;

/// One box of a template; bounds are written over `k` and the owner's
/// coordinates `p0`, `p1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PTerm {
    pub strand: Strand,
    pub bounds: Bounds,
}

pub(crate) fn role_map(k_to: Var, p_to: [Var; 2]) -> [Var; NVARS] {
    let mut m = Var::ALL;
    m[Var::K as usize] = k_to;
    m[Var::P0 as usize] = p_to[0];
    m[Var::P1 as usize] = p_to[1];
    m
}

pub(crate) fn place(b: &Bounds, map: &[Var; NVARS]) -> Bounds {
    b.iter().map(|(lo, hi)| (lo.map(|l| l.rename(map)), hi.map(|l| l.rename(map)))).collect()
}

pub(crate) fn const_bounds(b: &[Interval]) -> Bounds {
    b.iter().map(|iv| (SymEnd::from_endpoint(iv.lo), SymEnd::from_endpoint(iv.hi))).collect()
}

pub(crate) fn eval_bounds(b: &Bounds, k: i64, coords: &[i64]) -> Option<Vec<Interval>> {
    let mut vals = [0; NVARS];
    vals[Var::K as usize] = k;
    for (i, &c) in coords.iter().enumerate() {
        vals[Var::p(i) as usize] = c;
    }
    b.iter()
        .map(|(lo, hi)| {
            let (lo, hi) = (lo.eval(&vals), hi.eval(&vals));
            (lo <= hi).then_some(Interval { lo, hi })
        })
        .collect()
}

/// Conditions for two boxes on a common strand to share a point of its
/// domain.
pub(crate) fn meet_bounds(conj: &mut Conj, a: &Bounds, b: &Bounds, domains: &[AxisDomain]) {
    for i in 0..a.len() {
        let (la, ha) = &a[i];
        let (lb, hb) = &b[i];
        let dl = SymEnd::from_endpoint(domains[i].lower());
        conj.le(la, ha).le(la, hb).le(lb, ha).le(lb, hb).le(&dl, ha).le(&dl, hb);
    }
}

/// `coordinate i ∈ [lo, hi]` for a placed coordinate variable.
pub(crate) fn coord_within(conj: &mut Conj, x: Var, lo: &SymEnd, hi: &SymEnd) {
    let v = SymEnd::Lin(Lin::var(x));
    conj.le(lo, &v).le(&v, hi);
}

pub(crate) fn cell_conds(conj: &mut Conj, cell: &[Interval], vars: [Var; 2]) {
    for (i, iv) in cell.iter().enumerate() {
        conj.within(&Lin::var(vars[i]), *iv);
    }
}

const Y: [Var; 2] = [Var::Y0, Var::Y1];
const P: [Var; 2] = [Var::P0, Var::P1];

impl PTerm {
    pub fn atom(a: usize) -> Self {
        PTerm { strand: Strand::Atom(a), bounds: vec![] }
    }

    pub fn ray(r: usize, lo: SymEnd, hi: SymEnd) -> Self {
        PTerm { strand: Strand::Ray(r), bounds: vec![(lo, hi)] }
    }

    pub fn grid(g: usize, rows: (SymEnd, SymEnd), cols: (SymEnd, SymEnd)) -> Self {
        PTerm { strand: Strand::Grid(g), bounds: vec![rows, cols] }
    }

    /// The owner itself.
    pub fn own(strand: Strand) -> Self {
        let dims = match strand {
            Strand::Atom(_) => 0,
            Strand::Ray(_) => 1,
            Strand::Grid(_) => 2,
        };
        let bounds = (0..dims).map(|i| (SymEnd::Lin(Lin::coord(i, 0)), SymEnd::Lin(Lin::coord(i, 0)))).collect();
        PTerm { strand, bounds }
    }

    pub(crate) fn placed(&self, k_to: Var, p_to: [Var; 2]) -> Bounds {
        place(&self.bounds, &role_map(k_to, p_to))
    }

    pub fn eval(&self, k: i64, coords: &[i64]) -> Option<(Strand, Vec<Interval>)> {
        eval_bounds(&self.bounds, k, coords).map(|b| (self.strand, b))
    }

    pub fn fmt_with(&self, schema: &GroundSchema, names: &[&str; NVARS]) -> String {
        let name = schema.strand_name(self.strand);
        if self.bounds.is_empty() {
            return name.to_string();
        }
        let axes: Vec<String> = self
            .bounds
            .iter()
            .map(|(lo, hi)| {
                if lo == hi {
                    lo.fmt_with(names)
                } else {
                    let l = if *lo == SymEnd::NegInf { String::new() } else { lo.fmt_with(names) };
                    let h = if *hi == SymEnd::PosInf { String::new() } else { hi.fmt_with(names) };
                    format!("{l}..{h}")
                }
            })
            .collect();
        format!("{name}[{}]", axes.join("; "))
    }
}

pub(crate) fn dims(s: Strand) -> usize {
    match s {
        Strand::Atom(_) => 0,
        Strand::Ray(_) => 1,
        Strand::Grid(_) => 2,
    }
}

fn owner_names(s: Strand) -> [&'static str; NVARS] {
    match s {
        Strand::Grid(_) => ["j", "k", "y0", "y1", "r", "c"],
        _ => ["j", "k", "y0", "y1", "n", "p1"],
    }
}

/// Points of `strand` inside any of `cells`, sharing one template.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub strand: Strand,
    pub cells: Vec<Vec<Interval>>,
    pub template: Vec<PTerm>,
}

impl Rule {
    pub fn new(strand: Strand, cells: Vec<Vec<Interval>>, template: Vec<PTerm>) -> Self {
        Rule { strand, cells, template }
    }

    /// A rule covering every point of an atom.
    pub fn for_atom(a: usize, template: Vec<PTerm>) -> Self {
        Rule { strand: Strand::Atom(a), cells: vec![vec![]], template }
    }

    pub fn pattern(&self, schema: &Arc<GroundSchema>) -> DefSet {
        let items: Vec<_> = self.cells.iter().map(|c| (self.strand, c.clone())).collect();
        from_boxes(schema, &items)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicPretop {
    schema: Arc<GroundSchema>,
    carrier: DefSet,
    rules: Vec<Rule>,
    topological: bool,
}

pub(crate) fn iv(lo: Endpoint, hi: Endpoint) -> Interval {
    Interval { lo, hi }
}

pub(crate) fn int(n: i64) -> Endpoint {
    Endpoint::Int(n)
}

fn lin(l: Lin) -> SymEnd {
    SymEnd::Lin(l)
}

impl SymbolicPretop {
    pub fn new(schema: Arc<GroundSchema>, rules: Vec<Rule>, topological: bool) -> Result<Self> {
        let carrier = DefSet::full(&schema);
        Self::with_carrier(schema, carrier, rules, topological)
    }

    /// A subspace-style space whose points are only those of `carrier`.
    pub fn with_carrier(schema: Arc<GroundSchema>, carrier: DefSet, rules: Vec<Rule>, topological: bool) -> Result<Self> {
        schema.validate()?;
        if carrier.schema() != &schema {
            return Err(Error::SchemaMismatch);
        }
        if carrier.is_empty() {
            return Err(Error::EmptySubspace);
        }
        let x = SymbolicPretop { schema, carrier, rules, topological };
        x.validate()?;
        Ok(x)
    }

    fn strand_exists(&self, s: Strand) -> bool {
        match s {
            Strand::Atom(a) => a < self.schema.atoms.len(),
            Strand::Ray(r) => r < self.schema.rays.len(),
            Strand::Grid(g) => g < self.schema.grids.len(),
        }
    }

    fn validate(&self) -> Result<()> {
        for (i, r) in self.rules.iter().enumerate() {
            let d = dims(r.strand);
            let malformed = |why: &str| Err(Error::FragmentEscape(format!("rule {i}: {why}")));
            if !self.strand_exists(r.strand) {
                return Err(Error::UnknownPoint(format!("{:?}", r.strand)));
            }
            if r.cells.iter().any(|c| c.len() != d) {
                return malformed("cell dimension does not match its strand");
            }
            for t in &r.template {
                if !self.strand_exists(t.strand) {
                    return Err(Error::UnknownPoint(format!("{:?}", t.strand)));
                }
                if t.bounds.len() != dims(t.strand) {
                    return malformed("term dimension does not match its strand");
                }
                for (lo, hi) in &t.bounds {
                    for e in [lo, hi] {
                        if let Some(l) = e.lin() {
                            let stray = l.vars().any(|x| match x {
                                Var::K => false,
                                Var::P0 => d < 1,
                                Var::P1 => d < 2,
                                _ => true,
                            });
                            if stray {
                                return malformed("endpoint mentions a variable the owner does not have");
                            }
                        }
                    }
                    if lo.coef(Var::K) < 0 || hi.coef(Var::K) > 0 {
                        return Err(Error::NonMonotoneRule(i));
                    }
                }
            }
        }
        for s in self.schema.strands() {
            let want = DefSet::strand(&self.schema, s).intersect(&self.carrier)?;
            let mut seen = DefSet::empty(&self.schema);
            for r in self.rules.iter().filter(|r| r.strand == s) {
                for c in &r.cells {
                    let cell = from_boxes(&self.schema, &[(s, c.clone())]).intersect(&self.carrier)?;
                    if cell.meets(&seen)? {
                        return Err(Error::PatternOverlap(self.schema.strand_name(s).to_string()));
                    }
                    seen = seen.union(&cell)?;
                }
            }
            if seen != want {
                return Err(Error::PatternGap(self.schema.strand_name(s).to_string()));
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            for c in &r.cells {
                let mut covered = Vec::new();
                for t in r.template.iter().filter(|t| t.strand == r.strand) {
                    let mut conj = Conj::new();
                    cell_conds(&mut conj, c, Y);
                    for (a, (lo, hi)) in t.placed(Var::J, Y).iter().enumerate() {
                        coord_within(&mut conj, Y[a], lo, hi);
                    }
                    for sol in solver::solve(&conj, dims(r.strand), Order::JFirst)? {
                        covered.push((r.strand, self.const_box(&sol.y)?));
                    }
                }
                let cell = from_boxes(&self.schema, &[(r.strand, c.clone())]).intersect(&self.carrier)?;
                if !cell.is_subset(&from_boxes(&self.schema, &covered))? {
                    return Err(Error::SelfMembershipViolation(i));
                }
            }
        }
        Ok(())
    }

    fn const_box(&self, y: &Bounds) -> Result<Vec<Interval>> {
        y.iter()
            .map(|(lo, hi)| {
                solver::constant_bounds(lo, hi)
                    .ok_or_else(|| Error::FragmentEscape(format!("bound {} is not constant", lo.fmt_with(&crate::lin::TEMPLATE_NAMES))))
            })
            .collect()
    }

    pub fn schema(&self) -> &Arc<GroundSchema> {
        &self.schema
    }

    pub fn carrier(&self) -> &DefSet {
        &self.carrier
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn is_topological_flagged(&self) -> bool {
        self.topological
    }

    pub fn with_topological_flag(mut self, flag: bool) -> Self {
        self.topological = flag;
        self
    }

    pub(crate) fn check_set(&self, s: &DefSet) -> Result<DefSet> {
        if s.schema() != &self.schema {
            return Err(Error::SchemaMismatch);
        }
        s.intersect(&self.carrier)
    }

    /// Index of the rule governing `p`.
    pub fn rule_of(&self, p: Point) -> Result<usize> {
        self.schema.check_point(p)?;
        if !self.carrier.contains(p)? {
            return Err(Error::UnknownPoint(self.schema.point_name(p)));
        }
        let coords = p.coords();
        self.rules
            .iter()
            .position(|r| r.strand == p.strand() && r.cells.iter().any(|c| c.iter().zip(&coords).all(|(iv, &x)| iv.contains(x))))
            .ok_or_else(|| Error::UnknownPoint(self.schema.point_name(p)))
    }

    /// `T(p, k)` as a concrete definable set.
    pub fn template_at(&self, p: Point, k: i64) -> Result<DefSet> {
        let r = &self.rules[self.rule_of(p)?];
        let coords = p.coords();
        let items: Vec<_> = r.template.iter().filter_map(|t| t.eval(k, &coords)).collect();
        from_boxes(&self.schema, &items).intersect(&self.carrier)
    }

    /// Largest constant any rule mentions; truncations must reach past it.
    pub fn radius(&self) -> i64 {
        let mut r = self.carrier.radius();
        for rule in &self.rules {
            for c in &rule.cells {
                for iv in c {
                    for e in [iv.lo, iv.hi] {
                        if let Endpoint::Int(n) = e {
                            r = r.max(n.abs());
                        }
                    }
                }
            }
            for t in &rule.template {
                for (lo, hi) in &t.bounds {
                    for e in [lo, hi] {
                        if let Some(l) = e.lin() {
                            r = r.max(l.magnitude());
                        }
                    }
                }
            }
        }
        r
    }

    /// `adh S = {x : every T(x, k) meets S}`.
    pub fn adh(&self, s: &DefSet) -> Result<DefSet> {
        let s = self.check_set(s)?;
        let sb = boxes(&s);
        let mut out = Vec::new();
        for r in &self.rules {
            for c in &r.cells {
                for t in &r.template {
                    let tb = t.placed(Var::J, Y);
                    let domains = self.schema.axes(t.strand);
                    for (bs, bb) in sb.iter().filter(|(bs, _)| *bs == t.strand) {
                        let mut conj = Conj::new();
                        cell_conds(&mut conj, c, Y);
                        meet_bounds(&mut conj, &tb, &const_bounds(bb), &domains);
                        debug_assert_eq!(*bs, t.strand);
                        for sol in solver::solve(&conj, dims(r.strand), Order::JFirst)? {
                            out.push((r.strand, self.const_box(&sol.y)?));
                        }
                    }
                }
            }
        }
        from_boxes(&self.schema, &out).intersect(&self.carrier)
    }

    /// `inh S = {x : some T(x, k) ⊆ S}`.
    pub fn inh(&self, s: &DefSet) -> Result<DefSet> {
        let s = self.check_set(s)?;
        let outside = self.carrier.difference(&s)?;
        self.carrier.difference(&self.adh(&outside)?)
    }

    /// Groups guarded terms into rules on the sub-cells of `cell` where the
    /// set of active terms is constant.
    fn assemble(strand: Strand, cell: &[Interval], guarded: &[(Guard, PTerm)], into: &mut BTreeMap<(Strand, Vec<PTerm>), Vec<Vec<Interval>>>) {
        let d = cell.len();
        let mut pieces: Vec<Vec<Interval>> = Vec::with_capacity(d);
        for (i, civ) in cell.iter().enumerate() {
            let mut cuts: Vec<i64> = Vec::new();
            for (g, _) in guarded {
                if let Endpoint::Int(v) = g[i].lo {
                    cuts.push(v);
                }
                if let Endpoint::Int(v) = g[i].hi {
                    cuts.push(v + 1);
                }
            }
            pieces.push(split_interval(*civ, cuts));
        }
        let mut subcells: Vec<Vec<Interval>> = vec![vec![]];
        for axis in &pieces {
            subcells = subcells.into_iter().flat_map(|pre| axis.iter().map(move |iv| [pre.clone(), vec![*iv]].concat())).collect();
        }
        for sub in subcells {
            let mut terms: Vec<PTerm> = guarded
                .iter()
                .filter(|(g, _)| sub.iter().enumerate().all(|(i, s)| solver::meet(*s, g[i]).is_some()))
                .map(|(_, t)| t.clone())
                .collect();
            terms.sort();
            terms.dedup();
            into.entry((strand, terms)).or_default().push(sub);
        }
    }

    fn rebuild(&self, table: BTreeMap<(Strand, Vec<PTerm>), Vec<Vec<Interval>>>, carrier: DefSet, topological: bool) -> Result<SymbolicPretop> {
        let rules = table.into_iter().map(|((strand, template), cells)| Rule { strand, cells, template }).collect();
        SymbolicPretop::with_carrier(self.schema.clone(), carrier, rules, topological)
    }

    /// `rπ`: every template is replaced by its adherence.
    pub fn regularize(&self) -> Result<SymbolicPretop> {
        let mut table = BTreeMap::new();
        for r in &self.rules {
            for c in &r.cells {
                let mut guarded = Vec::new();
                for t in &r.template {
                    let tb = t.placed(Var::K, P);
                    let domains = self.schema.axes(t.strand);
                    for r2 in &self.rules {
                        for t2 in r2.template.iter().filter(|t2| t2.strand == t.strand) {
                            let t2b = t2.placed(Var::J, Y);
                            for c2 in &r2.cells {
                                let mut conj = Conj::new();
                                cell_conds(&mut conj, c, P);
                                cell_conds(&mut conj, c2, Y);
                                meet_bounds(&mut conj, &tb, &t2b, &domains);
                                for sol in solver::solve(&conj, dims(r2.strand), Order::JFirst)? {
                                    guarded.push((sol.guard, PTerm { strand: r2.strand, bounds: sol.y }));
                                }
                            }
                        }
                    }
                }
                Self::assemble(r.strand, c, &guarded, &mut table);
            }
        }
        self.rebuild(table, self.carrier.clone(), false)
    }

    /// θ-closure: adherence in the regularization, iterated.
    pub fn cl_theta(&self, s: &DefSet, iterations: usize) -> Result<DefSet> {
        if !self.topological {
            return Err(Error::InvalidTopology(
                "θ-closure needs the open-neighbourhood pretopology of a topological space".into(),
            ));
        }
        let r = self.regularize()?;
        let mut cur = self.check_set(s)?;
        for _ in 0..iterations {
            cur = r.adh(&cur)?;
        }
        Ok(cur)
    }

    /// The subspace on `a`: cells and templates are cut down to `a`.
    pub fn restrict(&self, a: &DefSet) -> Result<SymbolicPretop> {
        let a = self.check_set(a)?;
        if a.is_empty() {
            return Err(Error::EmptySubspace);
        }
        let ab = boxes(&a);
        let mut table = BTreeMap::new();
        for r in &self.rules {
            for c in &r.cells {
                let cell = from_boxes(&self.schema, &[(r.strand, c.clone())]).intersect(&a)?;
                for (_, c2) in boxes(&cell) {
                    let mut guarded = Vec::new();
                    for t in &r.template {
                        let tb = t.placed(Var::K, P);
                        for (_, bb) in ab.iter().filter(|(bs, _)| *bs == t.strand) {
                            let mut conj = Conj::new();
                            cell_conds(&mut conj, &c2, P);
                            cell_conds(&mut conj, bb, Y);
                            for (i, (lo, hi)) in tb.iter().enumerate() {
                                coord_within(&mut conj, Y[i], lo, hi);
                            }
                            for sol in solver::solve(&conj, dims(t.strand), Order::JFirst)? {
                                guarded.push((sol.guard, PTerm { strand: t.strand, bounds: sol.y }));
                            }
                        }
                    }
                    Self::assemble(r.strand, &c2, &guarded, &mut table);
                }
            }
        }
        self.rebuild(table, a, self.topological)
    }

    /// Distinct points always have disjoint vicinities. The witness is a pair
    /// of points all of whose vicinities meet.
    pub fn is_hausdorff(&self) -> Result<Verdict<(Point, Point)>> {
        for (i, r1) in self.rules.iter().enumerate() {
            for r2 in &self.rules[i..] {
                for c1 in &r1.cells {
                    for c2 in &r2.cells {
                        for t1 in &r1.template {
                            let b1 = t1.placed(Var::J, P);
                            for t2 in r2.template.iter().filter(|t| t.strand == t1.strand) {
                                let b2 = t2.placed(Var::J, Y);
                                let mut base = Conj::new();
                                cell_conds(&mut base, c1, P);
                                cell_conds(&mut base, c2, Y);
                                meet_bounds(&mut base, &b1, &b2, &self.schema.axes(t1.strand));
                                for conj in self.distinct_variants(r1.strand, r2.strand, &base) {
                                    let Some(res) = solver::eliminate(&conj, Order::JFirst) else { continue };
                                    let vars = [Var::P0, Var::P1, Var::Y0, Var::Y1];
                                    if let Some(vals) = solver::feasible(&res, &vars)? {
                                        let x = make_point(r1.strand, &vals[0..2]);
                                        let y = make_point(r2.strand, &vals[2..4]);
                                        if self.carrier.contains(x)? && self.carrier.contains(y)? {
                                            return Ok(Verdict::no((x, y)));
                                        }
                                        return Err(Error::FragmentEscape(
                                            "Hausdorff witness falls outside the carrier".into(),
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(Verdict::yes())
    }

    fn distinct_variants(&self, s1: Strand, s2: Strand, base: &Conj) -> Vec<Conj> {
        if s1 != s2 {
            return vec![base.clone()];
        }
        (0..dims(s1))
            .flat_map(|i| {
                let d = Lin::var(P[i]) - Lin::var(Y[i]);
                [d + 1, -d + 1].map(|l| {
                    let mut c = base.clone();
                    c.push(l);
                    c
                })
            })
            .collect()
    }

    /// The finite pretopology on the points with every coordinate in
    /// `[-window, window]`, using the templates at `k = window`.
    pub fn truncate(&self, window: i64) -> Result<FinitePretop> {
        let need = self.radius() + 2;
        if window < need {
            return Err(Error::WindowTooSmall(need));
        }
        let pts = self.carrier.points_within(window);
        if pts.len() > MAX_POINTS {
            return Err(Error::SizeLimit(format!("{} points in the window, at most {MAX_POINTS}", pts.len())));
        }
        let names = pts.iter().map(|&p| self.schema.point_name(p)).collect();
        let mut vic = Vec::with_capacity(pts.len());
        for &p in &pts {
            let t = self.template_at(p, window)?;
            let mut m = 0u64;
            for (j, &q) in pts.iter().enumerate() {
                if t.contains(q)? {
                    m |= 1 << j;
                }
            }
            vic.push(m);
        }
        FinitePretop::new(names, vic)
    }

    /// Lifts a finite pretopology: one atom per point.
    pub fn from_finite(x: &FinitePretop) -> Result<SymbolicPretop> {
        let mut schema = GroundSchema::new();
        for n in x.names() {
            schema = schema.with_atom(n);
        }
        let rules = (0..x.len())
            .map(|p| Rule::for_atom(p, crate::finite::members(x.vicinity(p)).map(PTerm::atom).collect()))
            .collect();
        SymbolicPretop::new(Arc::new(schema), rules, x.is_topological().holds)
    }

    /// Same structure over an extended schema (atoms, rays and grids appended
    /// after the existing ones).
    pub fn lift(&self, schema: &Arc<GroundSchema>, extra_rules: Vec<Rule>) -> Result<SymbolicPretop> {
        let carrier = lift_set(&self.carrier, schema)?.union(&extra_strands(&self.schema, schema))?;
        let mut rules = self.rules.clone();
        rules.extend(extra_rules);
        SymbolicPretop::with_carrier(schema.clone(), carrier, rules, self.topological)
    }

    pub fn describe(&self) -> Vec<String> {
        self.rules
            .iter()
            .map(|r| {
                let names = owner_names(r.strand);
                let terms: Vec<String> = r.template.iter().map(|t| t.fmt_with(&self.schema, &names)).collect();
                format!("{} -> {}", r.pattern(&self.schema), terms.join(" | "))
            })
            .collect()
    }
}

impl fmt::Display for SymbolicPretop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe().join("\n"))
    }
}

pub(crate) fn make_point(s: Strand, vals: &[i64]) -> Point {
    match s {
        Strand::Atom(a) => Point::Atom(a),
        Strand::Ray(r) => Point::Ray(r, vals[0]),
        Strand::Grid(g) => Point::Grid(g, vals[0], vals[1]),
    }
}

fn split_interval(civ: Interval, mut cuts: Vec<i64>) -> Vec<Interval> {
    cuts.sort_unstable();
    cuts.dedup();
    let mut out = Vec::new();
    let mut start = civ.lo;
    for c in cuts {
        if Endpoint::Int(c) > start && Endpoint::Int(c) <= civ.hi {
            out.push(iv(start, int(c - 1)));
            start = int(c);
        }
    }
    out.push(iv(start, civ.hi));
    out
}

/// Every strand of `big` that `small` lacks (appended atoms, rays, grids).
fn extra_strands(small: &GroundSchema, big: &Arc<GroundSchema>) -> DefSet {
    let mut items = Vec::new();
    for a in small.atoms.len()..big.atoms.len() {
        items.push((Strand::Atom(a), vec![]));
    }
    for r in small.rays.len()..big.rays.len() {
        items.push((Strand::Ray(r), vec![FULL]));
    }
    for g in small.grids.len()..big.grids.len() {
        items.push((Strand::Grid(g), vec![FULL, FULL]));
    }
    from_boxes(big, &items)
}

/// Re-homes a set onto a schema that extends its own by appending strands.
pub fn lift_set(s: &DefSet, big: &Arc<GroundSchema>) -> Result<DefSet> {
    let small = s.schema();
    let extends = big.atoms.starts_with(&small.atoms) && big.rays.starts_with(&small.rays) && big.grids.starts_with(&small.grids);
    if !extends {
        return Err(Error::SchemaMismatch);
    }
    Ok(from_boxes(big, &boxes(s)))
}

/// Named example spaces.
pub fn builtin(name: &str) -> Result<SymbolicPretop> {
    let name = name.trim();
    if let Some(arg) = name.strip_prefix("discrete_ray(").and_then(|r| r.strip_suffix(')')) {
        let c: usize = arg.trim().parse().map_err(|_| Error::UnknownBuiltin(name.to_string()))?;
        if c == 0 || c > 16 {
            return Err(Error::UnknownBuiltin(name.to_string()));
        }
        return discrete_ray(c);
    }
    match name {
        "urysohn" => urysohn(),
        "half_grid" => half_grid(),
        "discrete_ray" => discrete_ray(1),
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

pub const BUILTINS: [&str; 3] = ["urysohn", "half_grid", "discrete_ray(c)"];

fn row_term(g: usize, row: (SymEnd, SymEnd), cols: (SymEnd, SymEnd)) -> PTerm {
    PTerm::grid(g, row, cols)
}

/// Open neighbourhoods of the Urysohn space: grid `G` of rows `n ≥ 1` and
/// integer columns, plus `pinf` and `minf`. Points off column 0 are isolated;
/// `(n, 0)` is approached along its row in both directions; `pinf` and `minf`
/// are approached through late rows on their side of column 0.
pub fn urysohn() -> Result<SymbolicPretop> {
    let schema = Arc::new(
        GroundSchema::new()
            .with_grid("G", AxisDomain::NAT1, AxisDomain::Integers)
            .with_atom("pinf")
            .with_atom("minf"),
    );
    let g = Strand::Grid(0);
    let all_rows = iv(int(1), Endpoint::PosInf);
    let own_row = (lin(Lin::coord(0, 0)), lin(Lin::coord(0, 0)));
    let late_rows = (lin(Lin::k(1)), SymEnd::PosInf);
    let rules = vec![
        Rule::new(
            g,
            vec![vec![all_rows, iv(Endpoint::NegInf, int(-1))], vec![all_rows, iv(int(1), Endpoint::PosInf)]],
            vec![PTerm::own(g)],
        ),
        Rule::new(
            g,
            vec![vec![all_rows, iv(int(0), int(0))]],
            vec![
                PTerm::own(g),
                row_term(0, own_row, (lin(Lin::k(1)), SymEnd::PosInf)),
                row_term(0, own_row, (SymEnd::NegInf, lin(-Lin::k(1)))),
            ],
        ),
        Rule::for_atom(0, vec![PTerm::atom(0), row_term(0, late_rows, (SymEnd::int(1), SymEnd::PosInf))]),
        Rule::for_atom(1, vec![PTerm::atom(1), row_term(0, late_rows, (SymEnd::NegInf, SymEnd::int(-1)))]),
    ];
    SymbolicPretop::new(schema, rules, true)
}

/// The Urysohn grid cut down to columns `≥ 0`, with `pinf` only.
pub fn half_grid() -> Result<SymbolicPretop> {
    let schema = Arc::new(GroundSchema::new().with_grid("G", AxisDomain::NAT1, AxisDomain::NAT0).with_atom("pinf"));
    let g = Strand::Grid(0);
    let all_rows = iv(int(1), Endpoint::PosInf);
    let own_row = (lin(Lin::coord(0, 0)), lin(Lin::coord(0, 0)));
    let rules = vec![
        Rule::new(g, vec![vec![all_rows, iv(int(1), Endpoint::PosInf)]], vec![PTerm::own(g)]),
        Rule::new(
            g,
            vec![vec![all_rows, iv(int(0), int(0))]],
            vec![PTerm::own(g), row_term(0, own_row, (lin(Lin::k(1)), SymEnd::PosInf))],
        ),
        Rule::for_atom(
            0,
            vec![PTerm::atom(0), row_term(0, (lin(Lin::k(1)), SymEnd::PosInf), (SymEnd::int(1), SymEnd::PosInf))],
        ),
    ];
    SymbolicPretop::new(schema, rules, true)
}

/// `c` disjoint discrete copies of ℕ, named `R1..Rc`.
pub fn discrete_ray(c: usize) -> Result<SymbolicPretop> {
    let mut schema = GroundSchema::new();
    for i in 1..=c {
        schema = schema.with_ray(&format!("R{i}"), AxisDomain::NAT0);
    }
    let rules = (0..c).map(|r| Rule::new(Strand::Ray(r), vec![vec![FULL]], vec![PTerm::own(Strand::Ray(r))])).collect();
    let rules = fix_cells(&schema, rules);
    SymbolicPretop::new(Arc::new(schema), rules, true)
}

/// Clips cells to their strand's domain so patterns print canonically.
fn fix_cells(schema: &GroundSchema, rules: Vec<Rule>) -> Vec<Rule> {
    rules
        .into_iter()
        .map(|mut r| {
            let axes = schema.axes(r.strand);
            for c in r.cells.iter_mut() {
                for (ivl, d) in c.iter_mut().zip(&axes) {
                    ivl.lo = ivl.lo.max(d.lower());
                }
            }
            r
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::IntervalSet;

    fn grid_set(x: &SymbolicPretop, rows: IntervalSet, cols: IntervalSet) -> DefSet {
        DefSet::rect(x.schema(), 0, rows, cols).unwrap()
    }

    fn col0(x: &SymbolicPretop) -> DefSet {
        grid_set(x, IntervalSet::full(AxisDomain::NAT1), IntervalSet::point(AxisDomain::Integers, 0))
    }

    #[test]
    fn urysohn_builds() {
        let x = urysohn().unwrap();
        assert_eq!(x.rules().len(), 4);
        assert!(x.is_topological_flagged());
        assert_eq!(x.rule_of(Point::Grid(0, 3, 0)).unwrap(), 1);
        assert_eq!(x.rule_of(Point::Grid(0, 3, -2)).unwrap(), 0);
        let t = x.template_at(Point::Atom(0), 2).unwrap();
        assert!(t.contains(Point::Grid(0, 3, 1)).unwrap());
        assert!(!t.contains(Point::Grid(0, 2, 1)).unwrap());
        assert!(!t.contains(Point::Grid(0, 3, 0)).unwrap());
    }

    #[test]
    fn build_errors() {
        let schema = Arc::new(GroundSchema::new().with_ray("R", AxisDomain::NAT0));
        let r = Strand::Ray(0);
        let bad_mono = Rule::new(r, vec![vec![FULL]], vec![PTerm::own(r), PTerm::ray(0, lin(Lin::k(0)), lin(Lin::k(0)))]);
        assert_eq!(SymbolicPretop::new(schema.clone(), vec![bad_mono], false), Err(Error::NonMonotoneRule(0)));
        let gap = Rule::new(r, vec![vec![iv(int(1), Endpoint::PosInf)]], vec![PTerm::own(r)]);
        assert!(matches!(SymbolicPretop::new(schema.clone(), vec![gap], false), Err(Error::PatternGap(_))));
        let a = Rule::new(r, vec![vec![iv(int(0), int(5))]], vec![PTerm::own(r)]);
        let b = Rule::new(r, vec![vec![iv(int(5), Endpoint::PosInf)]], vec![PTerm::own(r)]);
        assert!(matches!(SymbolicPretop::new(schema.clone(), vec![a, b], false), Err(Error::PatternOverlap(_))));
        let no_self = Rule::new(r, vec![vec![FULL]], vec![PTerm::ray(0, lin(Lin::coord(0, 1)), SymEnd::PosInf)]);
        assert_eq!(SymbolicPretop::new(schema, vec![no_self], false), Err(Error::SelfMembershipViolation(0)));
        assert!(matches!(builtin("nonesuch"), Err(Error::UnknownBuiltin(_))));
        assert!(matches!(builtin("discrete_ray(0)"), Err(Error::UnknownBuiltin(_))));
    }

    #[test]
    fn adherence_and_inherence() {
        let x = urysohn().unwrap();
        let s = x.schema().clone();
        let b = grid_set(&x, IntervalSet::full(AxisDomain::NAT1), IntervalSet::at_least(AxisDomain::Integers, 1));
        let adh = x.adh(&b).unwrap();
        assert_eq!(adh, b.union(&col0(&x)).unwrap().union(&DefSet::atom(&s, 0)).unwrap());
        let inh = x.inh(&adh).unwrap();
        assert!(inh.is_subset(&adh).unwrap());
        assert!(inh.contains(Point::Atom(0)).unwrap());
        assert!(!inh.contains(Point::Grid(0, 2, 0)).unwrap());
    }

    #[test]
    fn regularization_of_urysohn() {
        let x = urysohn().unwrap();
        let r = x.regularize().unwrap();
        for k in 0..4 {
            let t = r.template_at(Point::Atom(0), k).unwrap();
            assert!(t.contains(Point::Grid(0, k + 1, 0)).unwrap());
            if k > 0 {
                assert!(!t.contains(Point::Grid(0, k, 0)).unwrap());
            }
            assert!(t.contains(Point::Grid(0, k + 1, 7)).unwrap());
            assert!(!t.contains(Point::Grid(0, k + 1, -1)).unwrap());
            assert!(t.contains(Point::Atom(0)).unwrap() && !t.contains(Point::Atom(1)).unwrap());
            // isolated points and column-0 points keep their templates
            for p in [Point::Grid(0, 2, 3), Point::Grid(0, 2, 0)] {
                assert_eq!(r.template_at(p, k).unwrap(), x.template_at(p, k).unwrap(), "{p:?}");
            }
        }
    }

    #[test]
    fn theta_closure() {
        let x = urysohn().unwrap();
        let s = x.schema().clone();
        let b = grid_set(&x, IntervalSet::full(AxisDomain::NAT1), IntervalSet::at_least(AxisDomain::Integers, 1));
        let once = x.cl_theta(&b, 1).unwrap();
        assert_eq!(once, b.union(&col0(&x)).unwrap().union(&DefSet::atom(&s, 0)).unwrap());
        let twice = x.cl_theta(&b, 2).unwrap();
        assert_eq!(twice, once.union(&DefSet::atom(&s, 1)).unwrap());
        let plain = SymbolicPretop::from_finite(&FinitePretop::from_table(&[("1", &["1", "2"]), ("2", &["2", "3"]), ("3", &["3"])]).unwrap()).unwrap();
        assert!(matches!(plain.cl_theta(&DefSet::full(plain.schema()), 1), Err(Error::InvalidTopology(_))));
    }

    #[test]
    fn hausdorff_checks() {
        assert!(urysohn().unwrap().is_hausdorff().unwrap().holds);
        assert!(half_grid().unwrap().is_hausdorff().unwrap().holds);
        // closed vicinities of pinf and minf share the tail of column 0
        let r = urysohn().unwrap().regularize().unwrap();
        assert_eq!(r.is_hausdorff().unwrap().witness, Some((Point::Atom(0), Point::Atom(1))));
        let s2 = SymbolicPretop::from_finite(&FinitePretop::from_table(&[("a", &["a"]), ("b", &["a", "b"])]).unwrap()).unwrap();
        let v = s2.is_hausdorff().unwrap();
        assert_eq!(v.witness, Some((Point::Atom(0), Point::Atom(1))));
    }

    #[test]
    fn truncation() {
        let x = urysohn().unwrap();
        let f = x.truncate(5).unwrap();
        assert_eq!(f.len(), 57);
        assert!(matches!(x.truncate(1), Err(Error::WindowTooSmall(_))));
        let d = discrete_ray(1).unwrap().truncate(3).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d, FinitePretop::new(vec!["R1[0]".into(), "R1[1]".into(), "R1[2]".into(), "R1[3]".into()], vec![1, 2, 4, 8]).unwrap());
    }

    #[test]
    fn restriction_to_column_zero() {
        let x = urysohn().unwrap();
        let s = x.schema().clone();
        let a = col0(&x).union(&DefSet::atom(&s, 0)).unwrap();
        let sub = x.restrict(&a).unwrap();
        for k in 0..3 {
            assert_eq!(sub.template_at(Point::Atom(0), k).unwrap(), DefSet::atom(&s, 0));
            assert_eq!(sub.template_at(Point::Grid(0, 4, 0), k).unwrap(), DefSet::point(&s, Point::Grid(0, 4, 0)).unwrap());
        }
        assert!(matches!(x.restrict(&DefSet::empty(&s)), Err(Error::EmptySubspace)));
    }

    #[test]
    fn describe_lists_rules() {
        let lines = urysohn().unwrap().describe();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[2], "atom(pinf) -> pinf | G[k+1..; 1..]");
    }
}
