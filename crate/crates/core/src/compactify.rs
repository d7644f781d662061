//! Maps between symbolic spaces and the extensions built from their ends.
//!
//! Maps are coordinate-affine on each strand. Continuity is checked in the
//! vicinity form `∀x ∀k' ∃k f[T(x, k)] ⊆ T'(f x, k')`, one image term at a
//! time: each image term has to fit inside a single target term. That is
//! exact for the spaces built here, whose templates never need two target
//! terms to cover one image term, and is a sufficient condition in general;
//! [`MapContinuity::exact`] records whether term images are exact as well.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::defset::{from_boxes, DefSet, GroundSchema, Point, Strand};
use crate::ends::{least_point, AxisEnd, EndClass};
use crate::error::{Error, Result};
use crate::finite::Verdict;
use crate::interval::{AxisDomain, Interval};
use crate::lin::{Lin, SymEnd, Var};
use crate::solver::{self, Conj, Guard, Order};
use crate::symbolic::{cell_conds, dims, make_point, place, role_map, Bounds, PTerm, Rule, SymbolicPretop};

/// `target axis = scale · source[from] + shift`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AffineCoord {
    pub from: usize,
    pub scale: i64,
    pub shift: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StrandMap {
    Const(Point),
    Affine { target: Strand, coords: Vec<AffineCoord> },
}

impl StrandMap {
    /// Identity on a strand of the given dimension.
    pub fn identity(s: Strand) -> Self {
        match s {
            Strand::Atom(a) => StrandMap::Const(Point::Atom(a)),
            _ => StrandMap::Affine { target: s, coords: (0..dims(s)).map(|i| AffineCoord { from: i, scale: 1, shift: 0 }).collect() },
        }
    }

    /// `n ↦ scale·n + shift` from a ray onto a ray.
    pub fn ray(target: usize, scale: i64, shift: i64) -> Self {
        StrandMap::Affine { target: Strand::Ray(target), coords: vec![AffineCoord { from: 0, scale, shift }] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymMap {
    source: Arc<GroundSchema>,
    target: Arc<GroundSchema>,
    pieces: BTreeMap<Strand, StrandMap>,
}

fn scale_end(e: &SymEnd, a: i64, b: i64) -> SymEnd {
    match (e, a.signum()) {
        (_, 0) => SymEnd::int(b),
        (SymEnd::Lin(l), _) => SymEnd::Lin(*l * a + b),
        (SymEnd::NegInf, 1) | (SymEnd::PosInf, -1) => SymEnd::NegInf,
        _ => SymEnd::PosInf,
    }
}

impl SymMap {
    pub fn new(source: Arc<GroundSchema>, target: Arc<GroundSchema>, pieces: Vec<(Strand, StrandMap)>) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (s, m) in pieces {
            if table.insert(s, m).is_some() {
                return Err(Error::InvalidMap(format!("strand `{}` mapped twice", source.strand_name(s))));
            }
        }
        for s in source.strands() {
            let m = table.get(&s).ok_or_else(|| Error::InvalidMap(format!("strand `{}` is not mapped", source.strand_name(s))))?;
            match m {
                StrandMap::Const(q) => target.check_point(*q)?,
                StrandMap::Affine { target: t, coords } => {
                    let ok = target.strands().contains(t)
                        && coords.len() == dims(*t)
                        && coords.iter().all(|c| c.from < dims(s));
                    if !ok {
                        return Err(Error::InvalidMap(format!("bad affine piece on `{}`", source.strand_name(s))));
                    }
                    // the image of the whole strand has to stay inside the target axes
                    let src_axes = source.axes(s);
                    let dst_axes = target.axes(*t);
                    for (i, c) in coords.iter().enumerate() {
                        let ok = match (src_axes[c.from], dst_axes[i]) {
                            (_, AxisDomain::Integers) => true,
                            (_, d) if c.scale == 0 => d.contains(c.shift),
                            (AxisDomain::From(a), AxisDomain::From(b)) => c.scale > 0 && c.scale * a + c.shift >= b,
                            (AxisDomain::Integers, AxisDomain::From(_)) => false,
                        };
                        if !ok {
                            return Err(Error::InvalidMap(format!("image of `{}` leaves the target axis", source.strand_name(s))));
                        }
                    }
                }
            }
        }
        if table.len() != source.strands().len() {
            return Err(Error::InvalidMap("pieces name strands outside the source".into()));
        }
        Ok(SymMap { source, target, pieces: table })
    }

    pub fn source(&self) -> &Arc<GroundSchema> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GroundSchema> {
        &self.target
    }

    pub fn piece(&self, s: Strand) -> &StrandMap {
        &self.pieces[&s]
    }

    pub fn apply(&self, p: Point) -> Result<Point> {
        self.source.check_point(p)?;
        Ok(match self.piece(p.strand()) {
            StrandMap::Const(q) => *q,
            StrandMap::Affine { target, coords } => {
                let c = p.coords();
                let vals: Vec<i64> = coords.iter().map(|a| a.scale * c[a.from] + a.shift).collect();
                make_point(*target, &vals)
            }
        })
    }

    /// Term images are exact (not hulls): every scale is in `{-1, 0, 1}`.
    pub fn is_exact(&self) -> bool {
        self.pieces.values().all(|m| match m {
            StrandMap::Const(_) => true,
            StrandMap::Affine { coords, .. } => coords.iter().all(|c| c.scale.abs() <= 1),
        })
    }

    /// Image of the owner of a rule on `s`, as expressions over `p0`, `p1`.
    fn owner_image(&self, s: Strand) -> (Strand, Vec<Lin>) {
        match self.piece(s) {
            StrandMap::Const(q) => (q.strand(), q.coords().into_iter().map(Lin::constant).collect()),
            StrandMap::Affine { target, coords } => {
                (*target, coords.iter().map(|c| Lin::var(Var::p(c.from)) * c.scale + c.shift).collect())
            }
        }
    }

    /// Box hull of the image of a term.
    fn term_image(&self, t: &PTerm) -> (Strand, Bounds) {
        match self.piece(t.strand) {
            StrandMap::Const(q) => {
                (q.strand(), q.coords().into_iter().map(|c| (SymEnd::int(c), SymEnd::int(c))).collect())
            }
            StrandMap::Affine { target, coords } => {
                let b = coords
                    .iter()
                    .map(|c| {
                        let (lo, hi) = &t.bounds[c.from];
                        let (a, b) = (scale_end(lo, c.scale, c.shift), scale_end(hi, c.scale, c.shift));
                        if c.scale < 0 {
                            (b, a)
                        } else {
                            (a, b)
                        }
                    })
                    .collect();
                (*target, b)
            }
        }
    }

    pub fn describe(&self) -> Vec<String> {
        self.pieces
            .iter()
            .map(|(s, m)| {
                let src = self.source.strand_name(*s);
                match m {
                    StrandMap::Const(q) => format!("{src} -> {}", self.target.point_name(*q)),
                    StrandMap::Affine { target, coords } => {
                        let names = ["n", "m"];
                        let parts: Vec<String> = coords.iter().map(|c| affine_text(names[c.from], c.scale, c.shift)).collect();
                        format!("{src} -> {}[{}]", self.target.strand_name(*target), parts.join("; "))
                    }
                }
            })
            .collect()
    }
}

fn affine_text(var: &str, scale: i64, shift: i64) -> String {
    let lead = match scale {
        0 => return shift.to_string(),
        1 => var.to_string(),
        -1 => format!("-{var}"),
        s => format!("{s}{var}"),
    };
    match shift {
        0 => lead,
        s if s > 0 => format!("{lead}+{s}"),
        s => format!("{lead}{s}"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapContinuity {
    pub holds: bool,
    /// A point where the vicinity condition fails.
    pub witness: Option<String>,
    /// Whether a failure is conclusive (term images are exact).
    pub exact: bool,
}

fn scratch() -> Arc<GroundSchema> {
    Arc::new(GroundSchema::new().with_grid("P", AxisDomain::Integers, AxisDomain::Integers))
}

fn guards_set(s: &Arc<GroundSchema>, gs: &[Guard]) -> DefSet {
    let items: Vec<_> = gs.iter().map(|g| (Strand::Grid(0), g.to_vec())).collect();
    from_boxes(s, &items)
}

/// First parameter value in `region` outside `covered`.
fn uncovered(region: &[Guard], covered: &[Guard]) -> Result<Option<[i64; 2]>> {
    let s = scratch();
    let diff = guards_set(&s, region).difference(&guards_set(&s, covered))?;
    Ok(least_point(&diff).map(|p| match p {
        Point::Grid(_, a, b) => [a, b],
        _ => unreachable!("scratch schema has one grid"),
    }))
}

/// Vicinity-form continuity of `f: x → y`.
pub fn map_continuity(x: &SymbolicPretop, y: &SymbolicPretop, f: &SymMap) -> Result<MapContinuity> {
    if f.source() != x.schema() || f.target() != y.schema() {
        return Err(Error::SchemaMismatch);
    }
    let exact = f.is_exact();
    let to_y = role_map(Var::J, [Var::Y0, Var::Y1]);
    for r in x.rules() {
        let (fs, fx) = f.owner_image(r.strand);
        for c in &r.cells {
            for r2 in y.rules().iter().filter(|r2| r2.strand == fs) {
                for c2 in &r2.cells {
                    let mut region = Conj::new();
                    cell_conds(&mut region, c, [Var::P0, Var::P1]);
                    for (i, e) in fx.iter().enumerate() {
                        region.within(e, c2[i]);
                    }
                    let region_guards: Vec<Guard> = solver::solve(&region, 0, Order::JFirst)?.into_iter().map(|s| s.guard).collect();
                    if region_guards.is_empty() {
                        continue;
                    }
                    for t in &r.template {
                        let (ts, img) = f.term_image(t);
                        let mut covered = Vec::new();
                        for t2 in r2.template.iter().filter(|t2| t2.strand == ts) {
                            let mut tb = place(&t2.bounds, &to_y);
                            for (i, e) in fx.iter().enumerate() {
                                let yv = Var::y(i);
                                tb = tb.iter().map(|(lo, hi)| (lo.map(|l| l.substitute(yv, e)), hi.map(|l| l.substitute(yv, e)))).collect();
                            }
                            let mut conj = region.clone();
                            for ((lo, hi), (lo2, hi2)) in img.iter().zip(&tb) {
                                conj.le(lo2, lo).le(hi, hi2);
                            }
                            covered.extend(solver::solve(&conj, 0, Order::KFirst)?.into_iter().map(|s| s.guard));
                        }
                        if let Some(p) = uncovered(&region_guards, &covered)? {
                            let pt = make_point(r.strand, &p);
                            return Ok(MapContinuity { holds: false, witness: Some(x.schema().point_name(pt)), exact });
                        }
                    }
                }
            }
        }
    }
    Ok(MapContinuity { holds: true, witness: None, exact })
}

/// A point added by an extension, together with the ends it absorbs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AddedPoint {
    pub atom: usize,
    pub name: String,
    pub ends: Vec<(EndClass, Option<i64>)>,
    pub label: String,
}

/// A space with extra atoms that absorb ends of the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndExtension {
    pub space: SymbolicPretop,
    pub base: Arc<GroundSchema>,
    pub added: Vec<AddedPoint>,
}

impl EndExtension {
    pub fn is_compact(&self) -> Result<bool> {
        Ok(self.space.is_compact()?.holds)
    }

    pub fn hausdorff(&self) -> Result<Verdict<(String, String)>> {
        let v = self.space.is_hausdorff()?;
        let s = self.space.schema();
        Ok(Verdict { holds: v.holds, witness: v.witness.map(|(a, b)| (s.point_name(a), s.point_name(b))) })
    }
}

/// Shrinking trace of one end, as a template term.
fn end_tail(class: &EndClass, value: Option<i64>) -> PTerm {
    let bounds = class
        .axes
        .iter()
        .map(|a| match a {
            AxisEnd::Fixed => {
                let v = value.expect("fixed classes carry a value");
                (SymEnd::int(v), SymEnd::int(v))
            }
            AxisEnd::Plus => (SymEnd::Lin(Lin::k(0)), SymEnd::PosInf),
            AxisEnd::Minus => (SymEnd::NegInf, SymEnd::Lin(-Lin::k(0))),
        })
        .collect();
    PTerm { strand: class.strand, bounds }
}

/// Every non-converging end, one `(class, value)` per end.
fn failing_ends(x: &SymbolicPretop) -> Result<Vec<(EndClass, Option<i64>, String)>> {
    let mut out = Vec::new();
    for rep in x.end_reports()? {
        if rep.failing.is_empty() {
            continue;
        }
        if rep.class.fixed_axis().is_none() {
            out.push((rep.class.clone(), None, rep.class.label(x.schema(), None)));
            continue;
        }
        let values = rep.failing.elements().ok_or_else(|| {
            Error::FragmentEscape(format!(
                "infinitely many non-converging ends in {} ({}); adding them would create a new end",
                rep.label, rep.failing
            ))
        })?;
        for v in values {
            out.push((rep.class.clone(), Some(v), rep.class.label(x.schema(), Some(v))));
        }
    }
    Ok(out)
}

fn fresh_name(schema: &GroundSchema, stem: &str, taken: &[String]) -> String {
    let mut name = stem.to_string();
    while schema.find(&name).is_some() || taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Ends absorbed by one added point: class, fixed value, label.
type EndGroup = Vec<(EndClass, Option<i64>, String)>;

fn extend(x: &SymbolicPretop, groups: Vec<(String, EndGroup)>) -> Result<EndExtension> {
    let base = x.schema().clone();
    let mut schema = (*base).clone();
    let mut rules = Vec::new();
    let mut added = Vec::new();
    for (name, ends) in groups {
        let atom = schema.atoms.len();
        schema = schema.with_atom(&name);
        let mut template = vec![PTerm::atom(atom)];
        template.extend(ends.iter().map(|(c, v, _)| end_tail(c, *v)));
        rules.push(Rule::for_atom(atom, template));
        let label = ends.iter().map(|e| e.2.clone()).collect::<Vec<_>>().join(", ");
        added.push(AddedPoint { atom, name, ends: ends.into_iter().map(|(c, v, _)| (c, v)).collect(), label });
    }
    let space = x.lift(&Arc::new(schema), rules)?.with_topological_flag(false);
    Ok(EndExtension { space, base, added })
}

/// One new point per non-converging end, approached along that end.
pub fn end_extension(x: &SymbolicPretop) -> Result<EndExtension> {
    let ends = failing_ends(x)?;
    let mut taken = Vec::new();
    let mut groups = Vec::new();
    for (i, e) in ends.into_iter().enumerate() {
        let name = fresh_name(x.schema(), &format!("w{}", i + 1), &taken);
        taken.push(name.clone());
        groups.push((name, vec![e]));
    }
    extend(x, groups)
}

/// A single new point approached along every non-converging end.
pub fn one_point_extension(x: &SymbolicPretop) -> Result<EndExtension> {
    let ends = failing_ends(x)?;
    if ends.is_empty() {
        return extend(x, vec![]);
    }
    let name = fresh_name(x.schema(), "inf", &[]);
    extend(x, vec![(name, ends)])
}

/// Where an end goes under a map: a point, or another end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ImageTrace {
    Principal(Point),
    End(EndClass, Option<i64>),
}

pub fn image_trace(f: &SymMap, class: &EndClass, value: Option<i64>) -> Result<ImageTrace> {
    match f.piece(class.strand) {
        StrandMap::Const(q) => Ok(ImageTrace::Principal(*q)),
        StrandMap::Affine { target, coords } => {
            let mut axes = Vec::with_capacity(coords.len());
            let mut fixed = Vec::with_capacity(coords.len());
            for c in coords {
                let (ax, v) = match (class.axes[c.from], c.scale.signum()) {
                    (_, 0) => (AxisEnd::Fixed, Some(c.shift)),
                    (AxisEnd::Fixed, _) => (AxisEnd::Fixed, value.map(|v| c.scale * v + c.shift)),
                    (AxisEnd::Plus, 1) | (AxisEnd::Minus, -1) => (AxisEnd::Plus, None),
                    _ => (AxisEnd::Minus, None),
                };
                axes.push(ax);
                fixed.push(v);
            }
            if axes.iter().all(|&a| a == AxisEnd::Fixed) {
                let vals: Option<Vec<i64>> = fixed.into_iter().collect();
                let vals = vals.ok_or_else(|| Error::UnclassifiableImageTrace(class.label(f.source(), value)))?;
                return Ok(ImageTrace::Principal(make_point(*target, &vals)));
            }
            let fixed_vals: Vec<i64> = fixed.into_iter().flatten().collect();
            if fixed_vals.len() > 1 {
                return Err(Error::UnclassifiableImageTrace(class.label(f.source(), value)));
            }
            Ok(ImageTrace::End(EndClass { strand: *target, axes }, fixed_vals.first().copied()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaMap {
    pub map: SymMap,
    /// `(added point of the source, its image)`
    pub images: Vec<(String, String)>,
    pub continuity: MapContinuity,
}

/// Extends `f: X → Y` over end extensions: each added point goes to the least
/// limit of the image of its end.
pub fn extend_map_kappa(f: &SymMap, ex: &EndExtension, ey: &EndExtension) -> Result<KappaMap> {
    if f.source() != &ex.base || f.target() != &ey.base {
        return Err(Error::DifferentBase);
    }
    let sx = ex.space.schema().clone();
    let sy = ey.space.schema().clone();
    let mut pieces: Vec<(Strand, StrandMap)> = f.pieces.iter().map(|(s, m)| (*s, m.clone())).collect();
    let mut images = Vec::new();
    for a in &ex.added {
        let mut target: Option<Point> = None;
        for (class, value) in &a.ends {
            let limits = match image_trace(f, class, *value)? {
                ImageTrace::Principal(q) => ey.space.principal_limits(q)?,
                ImageTrace::End(c, v) => ey.space.end_limits(&c, v)?,
            };
            let p = least_point(&limits).ok_or_else(|| {
                Error::UnclassifiableImageTrace(format!("{}: image has no limit in the target", class.label(f.source(), *value)))
            })?;
            match target {
                Some(t) if t != p => {
                    return Err(Error::UnclassifiableImageTrace(format!("{}: ends disagree", a.name)));
                }
                _ => target = Some(p),
            }
        }
        let p = target.ok_or_else(|| Error::UnclassifiableImageTrace(a.name.clone()))?;
        images.push((a.name.clone(), sy.point_name(p)));
        pieces.push((Strand::Atom(a.atom), StrandMap::Const(p)));
    }
    let map = SymMap::new(sx, sy, pieces)?;
    let continuity = map_continuity(&ex.space, &ey.space, &map)?;
    Ok(KappaMap { map, images, continuity })
}

const SEARCH_LIMIT: usize = 4096;

/// First continuous map `larger → smaller` fixing the common base, sending
/// added points to atoms; searched in lexicographic order of the atom choices.
pub fn projective_witness_sym(smaller: &EndExtension, larger: &EndExtension) -> Result<Option<SymMap>> {
    if smaller.base != larger.base {
        return Err(Error::DifferentBase);
    }
    let base = &larger.base;
    let targets = smaller.space.schema().atoms.len();
    let slots = larger.added.len();
    let total = targets.checked_pow(slots as u32).filter(|&t| t <= SEARCH_LIMIT).ok_or_else(|| {
        Error::SizeLimit(format!("{targets}^{slots} candidate maps, at most {SEARCH_LIMIT}"))
    })?;
    let fixed: Vec<(Strand, StrandMap)> = base.strands().into_iter().map(|s| (s, StrandMap::identity(s))).collect();
    for code in 0..total {
        let mut pieces = fixed.clone();
        let mut rest = code;
        let mut choice = vec![0; slots];
        for i in (0..slots).rev() {
            choice[i] = rest % targets;
            rest /= targets;
        }
        for (a, &t) in larger.added.iter().zip(&choice) {
            pieces.push((Strand::Atom(a.atom), StrandMap::Const(Point::Atom(t))));
        }
        let map = SymMap::new(larger.space.schema().clone(), smaller.space.schema().clone(), pieces)?;
        if map_continuity(&larger.space, &smaller.space, &map)?.holds {
            return Ok(Some(map));
        }
    }
    Ok(None)
}

/// Least `k` at which the vicinities of two finite sets are disjoint, found by
/// scanning past every constant and coordinate involved.
pub fn separate_finite(x: &SymbolicPretop, a: &DefSet, b: &DefSet) -> Result<Option<i64>> {
    let a = x.check_set(a)?;
    let b = x.check_set(b)?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::FragmentEscape("separation scan needs finite sets".into()));
    }
    let pa = a.points_within(a.radius() + 1);
    let pb = b.points_within(b.radius() + 1);
    let reach = x.radius().max(a.radius()).max(b.radius());
    let limit = 4 * reach + 8;
    for k in 0..=limit {
        let union = |pts: &[Point]| -> Result<DefSet> {
            pts.iter().try_fold(DefSet::empty(x.schema()), |acc, &p| acc.union(&x.template_at(p, k)?))
        };
        if !union(&pa)?.meets(&union(&pb)?)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Interval helper for callers building fixed-column sets.
pub fn span(lo: i64, hi: i64) -> Interval {
    Interval { lo: crate::interval::Endpoint::Int(lo), hi: crate::interval::Endpoint::Int(hi) }
}
