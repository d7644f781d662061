//! Definable subsets of a countable ground schema.
//!
//! A [`GroundSchema`] is a disjoint union of named strands: atoms (single
//! points), rays (one integer axis) and grids (two integer axes). A [`DefSet`]
//! picks atoms, an [`IntervalSet`] per ray, and a finite union of rectangles
//! per grid. Grid parts are stored canonically: the row axis is cut into the
//! coarsest partition on which the column section is constant, rows with equal
//! sections are merged, and empty sections are dropped. Equal sets therefore
//! have equal representations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{elementary_cells, AxisDomain, Interval, IntervalSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RayDecl {
    pub name: String,
    pub domain: AxisDomain,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GridDecl {
    pub name: String,
    pub rows: AxisDomain,
    pub cols: AxisDomain,
}

/// Named strands making up a countable ground set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct GroundSchema {
    pub atoms: Vec<String>,
    pub rays: Vec<RayDecl>,
    pub grids: Vec<GridDecl>,
}

/// Which strand a point or term lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Strand {
    Atom(usize),
    Ray(usize),
    Grid(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Point {
    Atom(usize),
    Ray(usize, i64),
    Grid(usize, i64, i64),
}

impl Point {
    pub fn strand(&self) -> Strand {
        match *self {
            Point::Atom(a) => Strand::Atom(a),
            Point::Ray(r, _) => Strand::Ray(r),
            Point::Grid(g, _, _) => Strand::Grid(g),
        }
    }

    pub fn coords(&self) -> Vec<i64> {
        match *self {
            Point::Atom(_) => vec![],
            Point::Ray(_, i) => vec![i],
            Point::Grid(_, r, c) => vec![r, c],
        }
    }
}

impl GroundSchema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_atom(mut self, name: &str) -> Self {
        self.atoms.push(name.to_string());
        self
    }

    pub fn with_ray(mut self, name: &str, domain: AxisDomain) -> Self {
        self.rays.push(RayDecl { name: name.to_string(), domain });
        self
    }

    pub fn with_grid(mut self, name: &str, rows: AxisDomain, cols: AxisDomain) -> Self {
        self.grids.push(GridDecl { name: name.to_string(), rows, cols });
        self
    }

    /// Fails when two strands share a name.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        let names = self
            .atoms
            .iter()
            .chain(self.rays.iter().map(|r| &r.name))
            .chain(self.grids.iter().map(|g| &g.name));
        for n in names {
            if !seen.insert(n.as_str()) {
                return Err(Error::UnknownPoint(format!("duplicate strand name {n}")));
            }
        }
        Ok(())
    }

    pub fn strands(&self) -> Vec<Strand> {
        (0..self.atoms.len())
            .map(Strand::Atom)
            .chain((0..self.rays.len()).map(Strand::Ray))
            .chain((0..self.grids.len()).map(Strand::Grid))
            .collect()
    }

    pub fn strand_name(&self, s: Strand) -> &str {
        match s {
            Strand::Atom(i) => &self.atoms[i],
            Strand::Ray(i) => &self.rays[i].name,
            Strand::Grid(i) => &self.grids[i].name,
        }
    }

    pub fn find(&self, name: &str) -> Option<Strand> {
        if let Some(i) = self.atoms.iter().position(|a| a == name) {
            return Some(Strand::Atom(i));
        }
        if let Some(i) = self.rays.iter().position(|r| r.name == name) {
            return Some(Strand::Ray(i));
        }
        self.grids.iter().position(|g| g.name == name).map(Strand::Grid)
    }

    /// Axis domains of a strand, in coordinate order.
    pub fn axes(&self, s: Strand) -> Vec<AxisDomain> {
        match s {
            Strand::Atom(_) => vec![],
            Strand::Ray(i) => vec![self.rays[i].domain],
            Strand::Grid(i) => vec![self.grids[i].rows, self.grids[i].cols],
        }
    }

    pub fn check_point(&self, p: Point) -> Result<()> {
        let ok = match p {
            Point::Atom(a) => a < self.atoms.len(),
            Point::Ray(r, i) => self.rays.get(r).is_some_and(|d| d.domain.contains(i)),
            Point::Grid(g, r, c) => self.grids.get(g).is_some_and(|d| d.rows.contains(r) && d.cols.contains(c)),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnknownPoint(format!("{p:?}")))
        }
    }

    pub fn point_name(&self, p: Point) -> String {
        match p {
            Point::Atom(a) => self.atoms[a].clone(),
            Point::Ray(r, i) => format!("{}[{i}]", self.rays[r].name),
            Point::Grid(g, r, c) => format!("{}({r},{c})", self.grids[g].name),
        }
    }
}

/// Canonical finite union of rectangles on one grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GridSet {
    rects: Vec<(IntervalSet, IntervalSet)>,
}

impl GridSet {
    pub fn empty() -> Self {
        GridSet { rects: Vec::new() }
    }

    pub fn rects(&self) -> &[(IntervalSet, IntervalSet)] {
        &self.rects
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn contains(&self, r: i64, c: i64) -> bool {
        self.rects.iter().any(|(rows, cols)| rows.contains(r) && cols.contains(c))
    }

    fn cuts(&self) -> impl Iterator<Item = i64> + '_ {
        self.rects.iter().flat_map(|(rows, _)| rows.breakpoints())
    }

    /// Column section over every cell of the partition induced by `cuts`.
    fn sections(&self, rows: AxisDomain, cols: AxisDomain, cuts: &[i64]) -> Vec<(Interval, IntervalSet)> {
        elementary_cells(rows, cuts.iter().copied())
            .into_iter()
            .map(|cell| {
                let rep = cell.representative();
                let mut sec = IntervalSet::empty(cols);
                for (r, c) in &self.rects {
                    if r.contains(rep) {
                        sec = sec.union(c).expect("same column axis");
                    }
                }
                (cell, sec)
            })
            .collect()
    }

    /// Groups cells by equal section and drops empty ones.
    fn from_sections(rows: AxisDomain, sections: Vec<(Interval, IntervalSet)>) -> Self {
        let mut groups: Vec<(IntervalSet, Vec<Interval>)> = Vec::new();
        for (cell, sec) in sections {
            if sec.is_empty() {
                continue;
            }
            match groups.iter_mut().find(|(s, _)| *s == sec) {
                Some((_, cells)) => cells.push(cell),
                None => groups.push((sec, vec![cell])),
            }
        }
        let mut rects: Vec<(IntervalSet, IntervalSet)> = groups
            .into_iter()
            .map(|(sec, cells)| (IntervalSet::normalize(rows, cells), sec))
            .collect();
        rects.sort_by(|a, b| a.0.intervals()[0].cmp(&b.0.intervals()[0]));
        GridSet { rects }
    }

    pub fn from_rects(rows: AxisDomain, cols: AxisDomain, rects: Vec<(IntervalSet, IntervalSet)>) -> Self {
        let raw = GridSet { rects };
        let cuts: Vec<i64> = raw.cuts().collect();
        Self::from_sections(rows, raw.sections(rows, cols, &cuts))
    }

    fn combine(&self, other: &Self, rows: AxisDomain, cols: AxisDomain, op: impl Fn(&IntervalSet, &IntervalSet) -> IntervalSet) -> Self {
        let cuts: Vec<i64> = self.cuts().chain(other.cuts()).collect();
        let a = self.sections(rows, cols, &cuts);
        let b = other.sections(rows, cols, &cuts);
        let merged = a.into_iter().zip(b).map(|((cell, x), (_, y))| (cell, op(&x, &y))).collect();
        Self::from_sections(rows, merged)
    }

    fn complement(&self, rows: AxisDomain, cols: AxisDomain) -> Self {
        let cuts: Vec<i64> = self.cuts().collect();
        let secs = self.sections(rows, cols, &cuts).into_iter().map(|(cell, s)| (cell, s.complement())).collect();
        Self::from_sections(rows, secs)
    }

    pub fn cardinality(&self) -> Option<u64> {
        self.rects.iter().try_fold(0u64, |acc, (r, c)| Some(acc + r.cardinality()? * c.cardinality()?))
    }
}

/// Boolean operations on definable sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
}

/// A definable subset of a ground schema, always in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefSet {
    schema: Arc<GroundSchema>,
    atoms: Vec<bool>,
    rays: Vec<IntervalSet>,
    grids: Vec<GridSet>,
}

impl DefSet {
    pub fn empty(schema: &Arc<GroundSchema>) -> Self {
        DefSet {
            schema: schema.clone(),
            atoms: vec![false; schema.atoms.len()],
            rays: schema.rays.iter().map(|r| IntervalSet::empty(r.domain)).collect(),
            grids: vec![GridSet::empty(); schema.grids.len()],
        }
    }

    pub fn full(schema: &Arc<GroundSchema>) -> Self {
        Self::empty(schema).complement()
    }

    pub fn atom(schema: &Arc<GroundSchema>, a: usize) -> Self {
        let mut s = Self::empty(schema);
        s.atoms[a] = true;
        s
    }

    pub fn ray(schema: &Arc<GroundSchema>, r: usize, sel: IntervalSet) -> Result<Self> {
        if sel.domain() != schema.rays[r].domain {
            return Err(Error::AxisMismatch);
        }
        let mut s = Self::empty(schema);
        s.rays[r] = sel;
        Ok(s)
    }

    pub fn rect(schema: &Arc<GroundSchema>, g: usize, rows: IntervalSet, cols: IntervalSet) -> Result<Self> {
        let decl = &schema.grids[g];
        if rows.domain() != decl.rows || cols.domain() != decl.cols {
            return Err(Error::AxisMismatch);
        }
        let mut s = Self::empty(schema);
        s.grids[g] = GridSet::from_rects(decl.rows, decl.cols, vec![(rows, cols)]);
        Ok(s)
    }

    /// `{p}`
    pub fn point(schema: &Arc<GroundSchema>, p: Point) -> Result<Self> {
        schema.check_point(p)?;
        match p {
            Point::Atom(a) => Ok(Self::atom(schema, a)),
            Point::Ray(r, i) => Self::ray(schema, r, IntervalSet::point(schema.rays[r].domain, i)),
            Point::Grid(g, r, c) => {
                let d = &schema.grids[g];
                Self::rect(schema, g, IntervalSet::point(d.rows, r), IntervalSet::point(d.cols, c))
            }
        }
    }

    /// The whole strand.
    pub fn strand(schema: &Arc<GroundSchema>, s: Strand) -> Self {
        match s {
            Strand::Atom(a) => Self::atom(schema, a),
            Strand::Ray(r) => Self::ray(schema, r, IntervalSet::full(schema.rays[r].domain)).unwrap(),
            Strand::Grid(g) => {
                let d = &schema.grids[g];
                Self::rect(schema, g, IntervalSet::full(d.rows), IntervalSet::full(d.cols)).unwrap()
            }
        }
    }

    pub fn schema(&self) -> &Arc<GroundSchema> {
        &self.schema
    }

    pub fn atom_flags(&self) -> &[bool] {
        &self.atoms
    }

    pub fn ray_part(&self, r: usize) -> &IntervalSet {
        &self.rays[r]
    }

    pub fn grid_part(&self, g: usize) -> &GridSet {
        &self.grids[g]
    }

    fn check_schema(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.schema, &other.schema) || self.schema == other.schema {
            Ok(())
        } else {
            Err(Error::SchemaMismatch)
        }
    }

    pub fn complement(&self) -> Self {
        let schema = &self.schema;
        DefSet {
            schema: schema.clone(),
            atoms: self.atoms.iter().map(|a| !a).collect(),
            rays: self.rays.iter().map(IntervalSet::complement).collect(),
            grids: self
                .grids
                .iter()
                .zip(&schema.grids)
                .map(|(g, d)| g.complement(d.rows, d.cols))
                .collect(),
        }
    }

    pub fn apply(&self, op: SetOp, other: &Self) -> Result<Self> {
        self.check_schema(other)?;
        let other = match op {
            SetOp::Difference => other.complement(),
            _ => other.clone(),
        };
        let union = op == SetOp::Union;
        let schema = &self.schema;
        Ok(DefSet {
            schema: schema.clone(),
            atoms: self.atoms.iter().zip(&other.atoms).map(|(a, b)| if union { a | b } else { a & b }).collect(),
            rays: self
                .rays
                .iter()
                .zip(&other.rays)
                .map(|(a, b)| if union { a.union(b) } else { a.intersect(b) }.expect("same ray axis"))
                .collect(),
            grids: self
                .grids
                .iter()
                .zip(&other.grids)
                .zip(&schema.grids)
                .map(|((a, b), d)| {
                    a.combine(b, d.rows, d.cols, |x, y| {
                        if union { x.union(y) } else { x.intersect(y) }.expect("same column axis")
                    })
                })
                .collect(),
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.apply(SetOp::Union, other)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.apply(SetOp::Intersect, other)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.apply(SetOp::Difference, other)
    }

    pub fn is_empty(&self) -> bool {
        !self.atoms.iter().any(|&a| a) && self.rays.iter().all(IntervalSet::is_empty) && self.grids.iter().all(GridSet::is_empty)
    }

    pub fn contains(&self, p: Point) -> Result<bool> {
        self.schema.check_point(p)?;
        Ok(match p {
            Point::Atom(a) => self.atoms[a],
            Point::Ray(r, i) => self.rays[r].contains(i),
            Point::Grid(g, r, c) => self.grids[g].contains(r, c),
        })
    }

    pub fn meets(&self, other: &Self) -> Result<bool> {
        Ok(!self.intersect(other)?.is_empty())
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    /// `Some(n)` when the set is finite with `n` points.
    pub fn cardinality(&self) -> Option<u64> {
        let atoms = self.atoms.iter().filter(|&&a| a).count() as u64;
        let rays = self.rays.iter().try_fold(0u64, |acc, r| Some(acc + r.cardinality()?))?;
        let grids = self.grids.iter().try_fold(0u64, |acc, g| Some(acc + g.cardinality()?))?;
        Some(atoms + rays + grids)
    }

    pub fn is_finite(&self) -> bool {
        self.cardinality().is_some()
    }

    /// Already canonical by construction; rebuilding is the identity.
    pub fn canonicalize(&self) -> Self {
        let mut out = self.clone();
        for (g, d) in out.grids.iter_mut().zip(&self.schema.grids) {
            *g = GridSet::from_rects(d.rows, d.cols, g.rects.clone());
        }
        out
    }

    /// Builds a grid part from an arbitrary rectangle list.
    pub fn from_rects(schema: &Arc<GroundSchema>, g: usize, rects: Vec<(IntervalSet, IntervalSet)>) -> Self {
        let d = &schema.grids[g];
        let mut s = Self::empty(schema);
        s.grids[g] = GridSet::from_rects(d.rows, d.cols, rects);
        s
    }

    /// Largest absolute value of any finite endpoint.
    pub fn radius(&self) -> i64 {
        let rays = self.rays.iter().map(IntervalSet::radius);
        let grids = self.grids.iter().flat_map(|g| g.rects.iter().map(|(r, c)| r.radius().max(c.radius())));
        rays.chain(grids).max().unwrap_or(0)
    }

    /// Points with all coordinates in `[-bound, bound]`, in point order.
    pub fn points_within(&self, bound: i64) -> Vec<Point> {
        let mut out = Vec::new();
        for (a, &on) in self.atoms.iter().enumerate() {
            if on {
                out.push(Point::Atom(a));
            }
        }
        for (r, set) in self.rays.iter().enumerate() {
            out.extend((-bound..=bound).filter(|&i| set.contains(i)).map(|i| Point::Ray(r, i)));
        }
        for (g, set) in self.grids.iter().enumerate() {
            for r in -bound..=bound {
                for c in -bound..=bound {
                    if set.contains(r, c) {
                        out.push(Point::Grid(g, r, c));
                    }
                }
            }
        }
        out
    }
}

/// Canonical literal syntax, e.g. `atom(pinf) | grid(G; rows=4..; cols=1..)`.
impl fmt::Display for DefSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> = Vec::new();
        for (a, &on) in self.atoms.iter().enumerate() {
            if on {
                terms.push(format!("atom({})", self.schema.atoms[a]));
            }
        }
        for (r, set) in self.rays.iter().enumerate() {
            let name = &self.schema.rays[r].name;
            if set.is_full() {
                terms.push(format!("ray({name})"));
            } else if !set.is_empty() {
                terms.push(format!("ray({name}; {set})"));
            }
        }
        for (g, set) in self.grids.iter().enumerate() {
            let name = &self.schema.grids[g].name;
            for (rows, cols) in &set.rects {
                let mut t = format!("grid({name}");
                if !rows.is_full() {
                    t.push_str(&format!("; rows={rows}"));
                }
                if !cols.is_full() {
                    t.push_str(&format!("; cols={cols}"));
                }
                t.push(')');
                terms.push(t);
            }
        }
        if terms.is_empty() {
            f.write_str("{}")
        } else {
            f.write_str(&terms.join(" | "))
        }
    }
}

impl Serialize for DefSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Per-strand rectangle decomposition; used by the symbolic engine to turn a
/// definable set into constant-endpoint terms.
pub(crate) fn boxes(set: &DefSet) -> Vec<(Strand, Vec<Interval>)> {
    let mut out = Vec::new();
    for (a, &on) in set.atoms.iter().enumerate() {
        if on {
            out.push((Strand::Atom(a), vec![]));
        }
    }
    for (r, s) in set.rays.iter().enumerate() {
        for iv in s.intervals() {
            out.push((Strand::Ray(r), vec![*iv]));
        }
    }
    for (g, gs) in set.grids.iter().enumerate() {
        for (rows, cols) in &gs.rects {
            for ri in rows.intervals() {
                for ci in cols.intervals() {
                    out.push((Strand::Grid(g), vec![*ri, *ci]));
                }
            }
        }
    }
    out
}

/// Builds a set from per-strand boxes (the inverse of [`boxes`]).
pub(crate) fn from_boxes(schema: &Arc<GroundSchema>, items: &[(Strand, Vec<Interval>)]) -> DefSet {
    let mut set = DefSet::empty(schema);
    let mut grid_rects: BTreeMap<usize, Vec<(IntervalSet, IntervalSet)>> = BTreeMap::new();
    let mut ray_ivs: BTreeMap<usize, Vec<Interval>> = BTreeMap::new();
    for (strand, ivs) in items {
        match *strand {
            Strand::Atom(a) => set.atoms[a] = true,
            Strand::Ray(r) => ray_ivs.entry(r).or_default().push(ivs[0]),
            Strand::Grid(g) => {
                let d = &schema.grids[g];
                grid_rects
                    .entry(g)
                    .or_default()
                    .push((IntervalSet::normalize(d.rows, vec![ivs[0]]), IntervalSet::normalize(d.cols, vec![ivs[1]])));
            }
        }
    }
    for (r, ivs) in ray_ivs {
        set.rays[r] = IntervalSet::normalize(schema.rays[r].domain, ivs);
    }
    for (g, rects) in grid_rects {
        let d = &schema.grids[g];
        set.grids[g] = GridSet::from_rects(d.rows, d.cols, rects);
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Endpoint;
    use proptest::prelude::*;
    use AxisDomain::Integers as Z;

    fn urysohn_schema() -> Arc<GroundSchema> {
        Arc::new(GroundSchema::new().with_grid("G", AxisDomain::NAT1, Z).with_atom("pinf").with_atom("minf"))
    }

    fn cols_gt(s: &Arc<GroundSchema>, n: i64) -> DefSet {
        DefSet::rect(s, 0, IntervalSet::full(AxisDomain::NAT1), IntervalSet::at_least(Z, n + 1)).unwrap()
    }

    fn rows_gt(s: &Arc<GroundSchema>, n: i64) -> DefSet {
        DefSet::rect(s, 0, IntervalSet::at_least(AxisDomain::NAT1, n + 1), IntervalSet::full(Z)).unwrap()
    }

    #[test]
    fn complement_of_empty_is_full() {
        let s = urysohn_schema();
        let full = DefSet::empty(&s).complement();
        assert!(full.contains(Point::Atom(0)).unwrap());
        assert!(full.contains(Point::Grid(0, 1, -7)).unwrap());
        assert_eq!(full, DefSet::full(&s));
    }

    #[test]
    fn rectangle_intersection() {
        let s = urysohn_schema();
        let b = cols_gt(&s, 0);
        let got = b.intersect(&rows_gt(&s, 3)).unwrap();
        let expected =
            DefSet::rect(&s, 0, IntervalSet::at_least(AxisDomain::NAT1, 4), IntervalSet::at_least(Z, 1)).unwrap();
        assert_eq!(got, expected);
        assert_eq!(got.to_string(), "grid(G; rows=4..; cols=1..)");
    }

    #[test]
    fn double_complement_against_sampled_points() {
        let s = urysohn_schema();
        let col0 = DefSet::rect(&s, 0, IntervalSet::full(AxisDomain::NAT1), IntervalSet::point(Z, 0)).unwrap();
        let u = col0.union(&cols_gt(&s, 0)).unwrap();
        let back = u.complement().complement();
        let mut sampled = 0;
        for r in 1..=10 {
            for c in -10..=9 {
                let p = Point::Grid(0, r, c);
                assert_eq!(back.contains(p).unwrap(), c >= 0);
                sampled += 1;
            }
        }
        assert_eq!(sampled, 200);
        assert_eq!(back, u);
    }

    #[test]
    fn queries() {
        let s = urysohn_schema();
        let a = cols_gt(&s, 0).intersect(&rows_gt(&s, 3)).unwrap();
        assert!(a.contains(Point::Grid(0, 5, 2)).unwrap());
        let col0 = DefSet::rect(&s, 0, IntervalSet::full(AxisDomain::NAT1), IntervalSet::point(Z, 0)).unwrap();
        assert!(!cols_gt(&s, 0).meets(&col0).unwrap());
        let r = DefSet::rect(&s, 0, IntervalSet::from_pairs(AxisDomain::NAT1, &[(1, 4)]).unwrap(), IntervalSet::from_pairs(Z, &[(-2, 2)]).unwrap())
            .unwrap();
        // enumerate the rectangle
        let counted = (1..=4).flat_map(|r| (-2..=2).map(move |c| (r, c))).count() as u64;
        assert_eq!(r.cardinality(), Some(counted));
        assert_eq!(counted, 20);
        assert!(matches!(a.contains(Point::Grid(0, 0, 0)), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn schema_mismatch() {
        let a = DefSet::empty(&urysohn_schema());
        let other = Arc::new(GroundSchema::new().with_atom("x"));
        assert_eq!(a.union(&DefSet::empty(&other)), Err(Error::SchemaMismatch));
    }

    #[test]
    fn overlapping_rectangles_merge() {
        let s = urysohn_schema();
        let cols = IntervalSet::from_pairs(Z, &[(0, 3)]).unwrap();
        let merged = DefSet::from_rects(
            &s,
            0,
            vec![
                (IntervalSet::from_pairs(AxisDomain::NAT1, &[(1, 5)]).unwrap(), cols.clone()),
                (IntervalSet::from_pairs(AxisDomain::NAT1, &[(4, 9)]).unwrap(), cols.clone()),
            ],
        );
        assert_eq!(merged.grid_part(0).rects().len(), 1);
        assert_eq!(merged.to_string(), "grid(G; rows=1..9; cols=0..3)");
    }

    #[test]
    fn rectangle_order_does_not_matter() {
        let s = urysohn_schema();
        let rects = vec![
            (IntervalSet::from_pairs(AxisDomain::NAT1, &[(7, 9)]).unwrap(), IntervalSet::at_least(Z, 2)),
            (IntervalSet::from_pairs(AxisDomain::NAT1, &[(1, 3)]).unwrap(), IntervalSet::at_most(Z, -1)),
            (IntervalSet::at_least(AxisDomain::NAT1, 2), IntervalSet::point(Z, 0)),
        ];
        let mut shuffled = rects.clone();
        shuffled.rotate_left(1);
        assert_eq!(DefSet::from_rects(&s, 0, rects), DefSet::from_rects(&s, 0, shuffled));
    }

    fn arb_selector(domain: AxisDomain) -> impl Strategy<Value = IntervalSet> {
        proptest::collection::vec((-6i64..6, 0i64..4, 0u8..5), 1..3).prop_map(move |v| {
            let raw: Vec<_> = v
                .into_iter()
                .map(|(lo, len, k)| match k {
                    0 => (Endpoint::NegInf, Endpoint::Int(lo + len)),
                    1 => (Endpoint::Int(lo), Endpoint::PosInf),
                    _ => (Endpoint::Int(lo), Endpoint::Int(lo + len)),
                })
                .collect();
            IntervalSet::new(domain, &raw).unwrap()
        })
    }

    fn arb_defset() -> impl Strategy<Value = DefSet> {
        let s = urysohn_schema();
        (
            any::<[bool; 2]>(),
            proptest::collection::vec((arb_selector(AxisDomain::NAT1), arb_selector(Z)), 0..4),
        )
            .prop_map(move |(atoms, rects)| {
                let mut d = DefSet::from_rects(&s, 0, rects);
                d.atoms = atoms.to_vec();
                d
            })
    }

    fn sample_points(sets: &[&DefSet]) -> Vec<Point> {
        let w = sets.iter().map(|s| s.radius()).max().unwrap_or(0) + 2;
        let mut pts = vec![Point::Atom(0), Point::Atom(1)];
        for r in 1..=w.max(10) {
            for c in -w.max(10)..=w.max(10) {
                pts.push(Point::Grid(0, r, c));
            }
        }
        pts
    }

    proptest! {
        #[test]
        fn membership_respects_boolean_ops(a in arb_defset(), b in arb_defset()) {
            let pts = sample_points(&[&a, &b]);
            prop_assert!(pts.len() >= 200);
            let u = a.union(&b).unwrap();
            let i = a.intersect(&b).unwrap();
            let d = a.difference(&b).unwrap();
            let c = a.complement();
            for &p in &pts {
                let (x, y) = (a.contains(p).unwrap(), b.contains(p).unwrap());
                prop_assert_eq!(u.contains(p).unwrap(), x || y);
                prop_assert_eq!(i.contains(p).unwrap(), x && y);
                prop_assert_eq!(d.contains(p).unwrap(), x && !y);
                prop_assert_eq!(c.contains(p).unwrap(), !x);
            }
            prop_assert_eq!(a.meets(&b).unwrap(), !i.is_empty());
            prop_assert_eq!(&c.complement(), &a);
            prop_assert_eq!(a.union(&b).unwrap().complement(), a.complement().intersect(&b.complement()).unwrap());
        }

        #[test]
        fn canonical_form_is_idempotent_and_semantic(a in arb_defset(), b in arb_defset()) {
            prop_assert_eq!(&a.canonicalize(), &a);
            prop_assert_eq!(a.canonicalize().canonicalize(), a.canonicalize());
            let pts = sample_points(&[&a, &b]);
            let agree = pts.iter().all(|&p| a.contains(p).unwrap() == b.contains(p).unwrap());
            // a finite symmetric difference lies inside the sampled window
            let sym = a.difference(&b).unwrap().union(&b.difference(&a).unwrap()).unwrap();
            if agree && sym.is_finite() {
                prop_assert_eq!(&a, &b);
            }
            if a == b {
                prop_assert!(agree);
            }
        }
    }
}
