//! Ends of a symbolic space and the compactness checks built on them.
//!
//! Free ultrafilters restrict to ultrafilters of the definable algebra, and
//! those are determined by their projections: on a ray, the plus or minus
//! end; on a grid, a pair of a fixed coordinate or an end per axis with at
//! least one end. A template term belongs to such a class exactly when its
//! interval on every end axis is unbounded on that side and its interval on
//! the fixed axis holds the fixed value. Compactness becomes convergence of
//! every end class, one fixed value at a time.

use std::fmt;

use serde::Serialize;

use crate::defset::{boxes, from_boxes, DefSet, GroundSchema, Point, Strand};
use crate::error::{Error, Result};
use crate::finite::Verdict;
use crate::interval::{AxisDomain, Endpoint, Interval, IntervalSet};
use crate::lin::{Lin, SymEnd, Var};
use crate::solver::{self, Conj, Order, Solution};
use crate::symbolic::{cell_conds, const_bounds, coord_within, dims, eval_bounds, Bounds, PTerm, SymbolicPretop};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AxisEnd {
    Fixed,
    Plus,
    Minus,
}

/// A family of ends on one strand; with a fixed axis it stands for one end
/// per value of that axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EndClass {
    pub strand: Strand,
    pub axes: Vec<AxisEnd>,
}

const Y: [Var; 2] = [Var::Y0, Var::Y1];
const P: [Var; 2] = [Var::P0, Var::P1];

/// Stand-in value domain for classes without a fixed axis.
fn unit_values() -> IntervalSet {
    IntervalSet::point(AxisDomain::Integers, 0)
}

impl EndClass {
    pub fn fixed_axis(&self) -> Option<usize> {
        self.axes.iter().position(|&a| a == AxisEnd::Fixed)
    }

    /// Every end class of the schema, rays first, then grids; per grid the
    /// fixed-row classes, then the fixed-column classes, then the corners.
    pub fn all(schema: &GroundSchema) -> Vec<EndClass> {
        use AxisEnd::*;
        let mut out = Vec::new();
        for (r, d) in schema.rays.iter().enumerate() {
            out.push(EndClass { strand: Strand::Ray(r), axes: vec![Plus] });
            if d.domain == AxisDomain::Integers {
                out.push(EndClass { strand: Strand::Ray(r), axes: vec![Minus] });
            }
        }
        for (g, d) in schema.grids.iter().enumerate() {
            let s = Strand::Grid(g);
            let row_ends: Vec<AxisEnd> = if d.rows == AxisDomain::Integers { vec![Plus, Minus] } else { vec![Plus] };
            let col_ends: Vec<AxisEnd> = if d.cols == AxisDomain::Integers { vec![Plus, Minus] } else { vec![Plus] };
            for &c in &col_ends {
                out.push(EndClass { strand: s, axes: vec![Fixed, c] });
            }
            for &r in &row_ends {
                out.push(EndClass { strand: s, axes: vec![r, Fixed] });
            }
            for &r in &row_ends {
                for &c in &col_ends {
                    out.push(EndClass { strand: s, axes: vec![r, c] });
                }
            }
        }
        out
    }

    /// Values of the fixed axis, or a one-element stand-in.
    pub fn value_domain(&self, schema: &GroundSchema) -> IntervalSet {
        match self.fixed_axis() {
            Some(i) => IntervalSet::full(schema.axes(self.strand)[i]),
            None => unit_values(),
        }
    }

    fn value_set(&self, schema: &GroundSchema, ivs: Vec<Interval>) -> IntervalSet {
        let dom = self.value_domain(schema);
        IntervalSet::normalize(dom.domain(), ivs).intersect(&dom).expect("same domain")
    }

    pub fn label(&self, schema: &GroundSchema, value: Option<i64>) -> String {
        let end = |a: AxisEnd, letter: &str| match a {
            AxisEnd::Plus => "+end".to_string(),
            AxisEnd::Minus => "-end".to_string(),
            AxisEnd::Fixed => value.map_or(letter.to_string(), |v| v.to_string()),
        };
        match self.strand {
            Strand::Grid(_) => {
                let body = format!("(row {}, col {})", end(self.axes[0], "a"), end(self.axes[1], "b"));
                if schema.grids.len() > 1 {
                    format!("{}{body}", schema.strand_name(self.strand))
                } else {
                    body
                }
            }
            _ => format!("{} {}", schema.strand_name(self.strand), end(self.axes[0], "a")),
        }
    }

    /// Adds the conditions for a placed term to belong to the end with fixed
    /// value `a`.
    fn term_conds(&self, conj: &mut Conj, b: &Bounds, a: &Lin) {
        for (i, ax) in self.axes.iter().enumerate() {
            let (lo, hi) = &b[i];
            match ax {
                AxisEnd::Plus if *hi != SymEnd::PosInf => {
                    conj.kill();
                }
                AxisEnd::Minus if *lo != SymEnd::NegInf => {
                    conj.kill();
                }
                AxisEnd::Fixed => {
                    let v = SymEnd::Lin(*a);
                    conj.le(lo, &v).le(&v, hi);
                }
                _ => {}
            }
        }
    }

    /// Fixed values `a` for which every member of the shrinking family
    /// `terms` (written over `k` only) belongs to the end.
    pub fn family_values(&self, schema: &GroundSchema, terms: &[PTerm]) -> Result<IntervalSet> {
        let param = self.fixed_axis().is_some();
        let mut ivs = Vec::new();
        for t in terms.iter().filter(|t| t.strand == self.strand) {
            let mut conj = Conj::new();
            self.term_conds(&mut conj, &t.placed(Var::J, P), &Lin::var(Var::Y0));
            for sol in solver::solve(&conj, usize::from(param), Order::JFirst)? {
                ivs.push(if param { const_interval(&sol.y[0])? } else { Interval { lo: Endpoint::Int(0), hi: Endpoint::Int(0) } });
            }
        }
        Ok(self.value_set(schema, ivs))
    }

    /// Fixed values for which the definable set belongs to the end.
    pub fn set_values(&self, s: &DefSet) -> Result<IntervalSet> {
        let terms: Vec<PTerm> =
            boxes(s).into_iter().map(|(strand, b)| PTerm { strand, bounds: const_bounds(&b) }).collect();
        self.family_values(s.schema(), &terms)
    }
}

fn const_interval(b: &(SymEnd, SymEnd)) -> Result<Interval> {
    solver::constant_bounds(&b.0, &b.1).ok_or_else(|| Error::FragmentEscape("non-constant value bound".into()))
}

/// Limits of the ends with fixed value in `values`: the points of `strand`
/// in the box `bounds`, written over `p0` (the fixed value).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitPiece {
    pub values: Interval,
    pub strand: Strand,
    pub bounds: Bounds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndReport {
    pub class: EndClass,
    pub label: String,
    /// Fixed values whose end lives on the carrier.
    pub in_space: IntervalSet,
    pub converging: IntervalSet,
    pub failing: IntervalSet,
    pub limits: Vec<LimitPiece>,
}

/// A non-converging end (or family of ends).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndWitness {
    pub class: EndClass,
    pub values: IntervalSet,
    pub label: String,
}

impl EndWitness {
    fn new(schema: &GroundSchema, class: &EndClass, values: IntervalSet) -> Self {
        let label = match (class.fixed_axis(), values.elements()) {
            (None, _) => class.label(schema, None),
            (Some(_), Some(v)) if v.len() == 1 => class.label(schema, Some(v[0])),
            (Some(i), _) => {
                let letter = if i == 0 { "a" } else { "b" };
                format!("{} for {letter} in {values}", class.label(schema, None))
            }
        };
        EndWitness { class: class.clone(), values, label }
    }
}

impl fmt::Display for EndWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CompactAtWitness {
    /// A point of the kernel whose principal ultrafilter has no limit in the set.
    Point(String),
    End(EndWitness),
}

impl fmt::Display for CompactAtWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompactAtWitness::Point(p) => write!(f, "point {p}"),
            CompactAtWitness::End(e) => write!(f, "end {e}"),
        }
    }
}

/// A filter on a symbolic space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymFilter {
    /// All supersets of a set.
    Principal(DefSet),
    /// Generated by a shrinking family of boxes written over `k`.
    Family(Vec<PTerm>),
    /// The trace of one end; `value` picks the fixed coordinate if any.
    End(EndClass, Option<i64>),
}

impl SymbolicPretop {
    /// Limits of every end in `class`.
    pub fn end_report(&self, class: &EndClass) -> Result<EndReport> {
        let schema = self.schema();
        let param = class.fixed_axis().is_some();
        let in_space = class.set_values(self.carrier())?;
        let mut limits = Vec::new();
        for r in self.rules() {
            for c in &r.cells {
                for t in r.template.iter().filter(|t| t.strand == class.strand) {
                    let mut conj = Conj::new();
                    cell_conds(&mut conj, c, Y);
                    class.term_conds(&mut conj, &t.placed(Var::J, Y), &Lin::var(Var::P0));
                    for Solution { guard, y } in solver::solve(&conj, dims(r.strand), Order::JFirst)? {
                        let values = if param { guard[0] } else { Interval { lo: Endpoint::Int(0), hi: Endpoint::Int(0) } };
                        limits.push(LimitPiece { values, strand: r.strand, bounds: y });
                    }
                }
            }
        }
        let converging = class.value_set(schema, limits.iter().map(|p| p.values).collect()).intersect(&in_space)?;
        let failing = in_space.difference(&converging)?;
        Ok(EndReport { label: class.label(schema, None), class: class.clone(), in_space, converging, failing, limits })
    }

    pub fn end_reports(&self) -> Result<Vec<EndReport>> {
        EndClass::all(self.schema()).iter().map(|c| self.end_report(c)).collect()
    }

    /// Limit set of the end of `class` with the given fixed value.
    pub fn end_limits(&self, class: &EndClass, value: Option<i64>) -> Result<DefSet> {
        let rep = self.end_report(class)?;
        let v = value.unwrap_or(0);
        let mut items = Vec::new();
        for piece in rep.limits.iter().filter(|p| p.values.contains(v)) {
            if let Some(b) = eval_bounds(&piece.bounds, 0, &[v]) {
                items.push((piece.strand, b));
            }
        }
        from_boxes(self.schema(), &items).intersect(self.carrier())
    }

    /// Whether the end of `class` with the given value converges.
    pub fn end_converges(&self, class: &EndClass, value: Option<i64>) -> Result<bool> {
        Ok(!self.end_limits(class, value)?.is_empty())
    }

    /// Compact: every end on the carrier converges.
    pub fn is_compact(&self) -> Result<Verdict<EndWitness>> {
        for rep in self.end_reports()? {
            if !rep.failing.is_empty() {
                return Ok(Verdict::no(EndWitness::new(self.schema(), &rep.class, rep.failing)));
            }
        }
        Ok(Verdict::yes())
    }

    /// Points whose principal ultrafilter has a limit in `a`.
    pub fn kernel_hull(&self, a: &DefSet) -> Result<DefSet> {
        let a = self.check_set(a)?;
        let ab = boxes(&a);
        let mut out = Vec::new();
        for r in self.rules() {
            for c in &r.cells {
                for (_, b) in ab.iter().filter(|(s, _)| *s == r.strand) {
                    let Some(cb) = c.iter().zip(b).map(|(x, y)| solver::meet(*x, *y)).collect::<Option<Vec<_>>>() else {
                        continue;
                    };
                    for t in &r.template {
                        let mut conj = Conj::new();
                        cell_conds(&mut conj, &cb, P);
                        for (i, (lo, hi)) in t.placed(Var::J, P).iter().enumerate() {
                            coord_within(&mut conj, Y[i], lo, hi);
                        }
                        for sol in solver::solve(&conj, dims(t.strand), Order::JFirst)? {
                            for bx in project(&sol)? {
                                out.push((t.strand, bx));
                            }
                        }
                    }
                }
            }
        }
        from_boxes(self.schema(), &out).intersect(self.carrier())
    }

    /// Limits of the principal ultrafilter at `q`: points every vicinity of
    /// which holds `q`.
    pub fn principal_limits(&self, q: Point) -> Result<DefSet> {
        self.schema().check_point(q)?;
        let coords = q.coords();
        let mut out = Vec::new();
        for r in self.rules() {
            for c in &r.cells {
                for t in r.template.iter().filter(|t| t.strand == q.strand()) {
                    let mut conj = Conj::new();
                    cell_conds(&mut conj, c, Y);
                    for (i, (lo, hi)) in t.placed(Var::J, Y).iter().enumerate() {
                        let v = SymEnd::int(coords[i]);
                        conj.le(lo, &v).le(&v, hi);
                    }
                    for sol in solver::solve(&conj, dims(r.strand), Order::JFirst)? {
                        let b = sol.y.iter().map(const_interval).collect::<Result<Vec<_>>>()?;
                        out.push((r.strand, b));
                    }
                }
            }
        }
        from_boxes(self.schema(), &out).intersect(self.carrier())
    }

    pub fn filter_kernel(&self, f: &SymFilter) -> Result<DefSet> {
        match f {
            SymFilter::Principal(s) => self.check_set(s),
            SymFilter::End(..) => Ok(DefSet::empty(self.schema())),
            SymFilter::Family(terms) => {
                check_family(terms)?;
                let mut out = Vec::new();
                for t in terms {
                    let mut conj = Conj::new();
                    for (i, (lo, hi)) in t.placed(Var::J, P).iter().enumerate() {
                        coord_within(&mut conj, Y[i], lo, hi);
                    }
                    for sol in solver::solve(&conj, dims(t.strand), Order::JFirst)? {
                        let b = sol.y.iter().map(const_interval).collect::<Result<Vec<_>>>()?;
                        out.push((t.strand, b));
                    }
                }
                from_boxes(self.schema(), &out).intersect(self.carrier())
            }
        }
    }

    /// `F` is compact at `A`: every ultrafilter finer than `F` has a limit in `A`.
    pub fn compact_at(&self, f: &SymFilter, a: &DefSet) -> Result<Verdict<CompactAtWitness>> {
        let a = self.check_set(a)?;
        let schema = self.schema().clone();
        let kernel = self.filter_kernel(f)?;
        let stray = kernel.difference(&self.kernel_hull(&a)?)?;
        if let Some(p) = least_point(&stray) {
            return Ok(Verdict::no(CompactAtWitness::Point(schema.point_name(p))));
        }
        let ab = boxes(&a);
        for class in EndClass::all(&schema) {
            let in_space = class.set_values(self.carrier())?;
            let in_filter = match f {
                SymFilter::Principal(s) => class.set_values(&s.intersect(self.carrier())?)?,
                SymFilter::Family(terms) => class.family_values(&schema, terms)?,
                SymFilter::End(e, v) if *e == class => match (class.fixed_axis(), v) {
                    (None, _) => unit_values(),
                    (Some(i), Some(v)) => IntervalSet::point(schema.axes(class.strand)[i], *v),
                    (Some(_), None) => {
                        return Err(Error::UnknownPoint(format!("{} needs a fixed value", class.label(&schema, None))))
                    }
                },
                SymFilter::End(..) => IntervalSet::empty(class.value_domain(&schema).domain()),
            }
            .intersect(&in_space)?;
            if in_filter.is_empty() {
                continue;
            }
            let rep = self.end_report(&class)?;
            let mut good = Vec::new();
            for piece in &rep.limits {
                for (_, b) in ab.iter().filter(|(s, _)| *s == piece.strand) {
                    let mut conj = Conj::new();
                    conj.within(&Lin::var(Var::P0), piece.values);
                    for (i, (lo, hi)) in piece.bounds.iter().enumerate() {
                        conj.le(lo, &SymEnd::from_endpoint(b[i].hi)).le(&SymEnd::from_endpoint(b[i].lo), hi);
                    }
                    for sol in solver::solve(&conj, 0, Order::JFirst)? {
                        good.push(if class.fixed_axis().is_some() { sol.guard[0] } else { piece.values });
                    }
                }
            }
            let failing = in_filter.difference(&class.value_set(&schema, good))?;
            if !failing.is_empty() {
                return Ok(Verdict::no(CompactAtWitness::End(EndWitness::new(&schema, &class, failing))));
            }
        }
        Ok(Verdict::yes())
    }
}

fn check_family(terms: &[PTerm]) -> Result<()> {
    for t in terms {
        for (lo, hi) in &t.bounds {
            for e in [lo, hi] {
                if e.lin().is_some_and(|l| l.vars().any(|x| x != Var::K)) {
                    return Err(Error::FragmentEscape("filter family may only mention k".into()));
                }
            }
            if lo.coef(Var::K) < 0 || hi.coef(Var::K) > 0 {
                return Err(Error::NonMonotoneRule(0));
            }
        }
    }
    Ok(())
}

/// Least point of a nonempty set in the point order.
pub fn least_point(s: &DefSet) -> Option<Point> {
    s.points_within(s.radius() + 1).into_iter().min()
}

const ENUMERATION_LIMIT: i64 = 4096;

/// `∪ { box(p) : p ∈ guard }` for a solution whose bounds depend on the
/// parameters.
fn project(sol: &Solution) -> Result<Vec<Vec<Interval>>> {
    let uses: Vec<Vec<usize>> = sol
        .y
        .iter()
        .map(|(lo, hi)| (0..2).filter(|&j| lo.coef(P[j]) != 0 || hi.coef(P[j]) != 0).collect())
        .collect();
    let used: Vec<usize> = (0..2).filter(|j| uses.iter().any(|u| u.contains(j))).collect();
    if used.is_empty() {
        return Ok(eval_bounds(&sol.y, 0, &[0, 0]).into_iter().collect());
    }
    let width = |iv: Interval| match (iv.lo, iv.hi) {
        (Endpoint::Int(a), Endpoint::Int(b)) => Some(b - a + 1),
        _ => None,
    };
    let size: Option<i64> = used.iter().map(|&j| width(sol.guard[j])).try_fold(1i64, |acc, w| w.map(|w| acc.saturating_mul(w)));
    if let Some(n) = size.filter(|&n| n <= ENUMERATION_LIMIT) {
        let mut out = Vec::with_capacity(n as usize);
        let range = |j: usize| -> Vec<i64> {
            if used.contains(&j) {
                let g = sol.guard[j];
                (g.lo.finite().unwrap()..=g.hi.finite().unwrap()).collect()
            } else {
                vec![0]
            }
        };
        for p0 in range(0) {
            for p1 in range(1) {
                out.extend(eval_bounds(&sol.y, 0, &[p0, p1]));
            }
        }
        return Ok(out);
    }
    let separable = uses.iter().all(|u| u.len() <= 1) && (uses.len() < 2 || uses[0].is_empty() || uses[0] != uses[1]);
    if !separable {
        return Err(Error::FragmentEscape("projection couples two coordinates".into()));
    }
    let mut b = Vec::with_capacity(sol.y.len());
    for (axis, (lo, hi)) in sol.y.iter().enumerate() {
        let Some(&j) = uses[axis].first() else {
            b.push(solver::constant_bounds(lo, hi).ok_or_else(|| Error::FragmentEscape("non-constant bound".into()))?);
            continue;
        };
        let g = sol.guard[j];
        let extreme = |e: &SymEnd, want_max: bool| -> Result<Endpoint> {
            let SymEnd::Lin(l) = e else { return Ok(e.eval(&[0; 6])) };
            let s = l.coef(P[j]);
            if s.abs() != 1 {
                return Err(Error::FragmentEscape("non-unit coefficient in projection".into()));
            }
            let at = if (s > 0) == want_max { g.hi } else { g.lo };
            Ok(match at {
                Endpoint::Int(v) => Endpoint::Int(l.c + s * v),
                _ if want_max => Endpoint::PosInf,
                _ => Endpoint::NegInf,
            })
        };
        b.push(Interval { lo: extreme(lo, false)?, hi: extreme(hi, true)? });
    }
    Ok(vec![b])
}
