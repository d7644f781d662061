//! Text syntax for definable sets.
//!
//! ```text
//! expr    := inter (('|' | '\') inter)*
//! inter   := unary ('&' unary)*
//! unary   := '~' unary | primary
//! primary := '(' expr ')' | '{' point* '}' | atom(NAME) | ray(NAME [; sel])
//!          | grid(NAME [; rows sel] [; cols sel]) | NAME
//! sel     := cond (',' cond)*          union of the conditions
//! cond    := ['='] range | ('>' | '>=' | '<' | '<=' | '!=') INT
//! range   := INT | INT '..' [INT] | '..' [INT]
//! point   := NAME | NAME '[' INT ']' | NAME '(' INT ',' INT ')'
//! ```
//!
//! A bare `NAME` is a named set if the resolver knows it, otherwise the whole
//! strand of that name. The printed form of a [`DefSet`] parses back to itself.

use std::sync::Arc;

use crate::defset::{DefSet, GroundSchema, Point, Strand};
use crate::error::{Error, Result};
use crate::interval::{AxisDomain, Endpoint, IntervalSet};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    schema: &'a Arc<GroundSchema>,
    named: &'a dyn Fn(&str) -> Option<DefSet>,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Parser<'a> {
    fn fail<T>(&self, msg: impl std::fmt::Display) -> Result<T> {
        Err(Error::Literal(format!("{msg} at offset {}", self.pos)))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.fail(format!("expected `{s}`"))
        }
    }

    fn name(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek_raw().filter(|&c| is_name_char(c)) {
            self.pos += c.len_utf8();
        }
        if self.pos == start {
            return self.fail("expected a name");
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.peek_raw() == Some('-') {
            self.pos += 1;
        }
        while self.peek_raw().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        match self.src[start..self.pos].parse() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.pos = start;
                self.fail("expected an integer")
            }
        }
    }

    fn starts_int(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '-')
    }

    fn expr(&mut self) -> Result<DefSet> {
        let mut acc = self.inter()?;
        loop {
            if self.eat("|") {
                acc = acc.union(&self.inter()?)?;
            } else if self.eat("\\") {
                acc = acc.difference(&self.inter()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn inter(&mut self) -> Result<DefSet> {
        let mut acc = self.unary()?;
        while self.eat("&") {
            acc = acc.intersect(&self.unary()?)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<DefSet> {
        if self.eat("~") {
            return Ok(self.unary()?.complement());
        }
        self.primary()
    }

    fn strand_named(&self, name: &str) -> Result<Strand> {
        match self.schema.find(name) {
            Some(s) => Ok(s),
            None => self.fail(format!("unknown name `{name}`")),
        }
    }

    fn primary(&mut self) -> Result<DefSet> {
        if self.eat("(") {
            let s = self.expr()?;
            self.expect(")")?;
            return Ok(s);
        }
        if self.eat("{") {
            let mut acc = DefSet::empty(self.schema);
            while !self.eat("}") {
                if self.peek().is_none() {
                    return self.fail("unterminated `{`");
                }
                let p = self.point()?;
                acc = acc.union(&DefSet::point(self.schema, p)?)?;
            }
            return Ok(acc);
        }
        let name = self.name()?;
        let call = self.peek() == Some('(');
        match name.as_str() {
            "atom" if call => {
                self.expect("(")?;
                let a = self.name()?;
                self.expect(")")?;
                match self.strand_named(&a)? {
                    Strand::Atom(i) => Ok(DefSet::atom(self.schema, i)),
                    _ => self.fail(format!("`{a}` is not an atom")),
                }
            }
            "ray" if call => {
                self.expect("(")?;
                let r = self.name()?;
                let Strand::Ray(i) = self.strand_named(&r)? else {
                    return self.fail(format!("`{r}` is not a ray"));
                };
                let dom = self.schema.rays[i].domain;
                let sel = if self.eat(";") { self.selector(dom)? } else { IntervalSet::full(dom) };
                self.expect(")")?;
                DefSet::ray(self.schema, i, sel)
            }
            "grid" if call => {
                self.expect("(")?;
                let g = self.name()?;
                let Strand::Grid(i) = self.strand_named(&g)? else {
                    return self.fail(format!("`{g}` is not a grid"));
                };
                let decl = &self.schema.grids[i];
                let (mut rows, mut cols) = (IntervalSet::full(decl.rows), IntervalSet::full(decl.cols));
                while self.eat(";") {
                    if self.eat("rows") {
                        rows = rows.intersect(&self.selector(decl.rows)?)?;
                    } else if self.eat("cols") {
                        cols = cols.intersect(&self.selector(decl.cols)?)?;
                    } else {
                        return self.fail("expected `rows` or `cols`");
                    }
                }
                self.expect(")")?;
                DefSet::rect(self.schema, i, rows, cols)
            }
            _ => {
                if let Some(s) = (self.named)(&name) {
                    if s.schema() != self.schema {
                        return Err(Error::SchemaMismatch);
                    }
                    return Ok(s);
                }
                Ok(DefSet::strand(self.schema, self.strand_named(&name)?))
            }
        }
    }

    fn point(&mut self) -> Result<Point> {
        let name = self.name()?;
        let s = self.strand_named(&name)?;
        let p = match s {
            Strand::Atom(a) => Point::Atom(a),
            Strand::Ray(r) => {
                self.expect("[")?;
                let i = self.int()?;
                self.expect("]")?;
                Point::Ray(r, i)
            }
            Strand::Grid(g) => {
                self.expect("(")?;
                let r = self.int()?;
                self.expect(",")?;
                let c = self.int()?;
                self.expect(")")?;
                Point::Grid(g, r, c)
            }
        };
        self.schema.check_point(p)?;
        Ok(p)
    }

    fn selector(&mut self, dom: AxisDomain) -> Result<IntervalSet> {
        let mut acc = self.cond(dom)?;
        while self.eat(",") {
            acc = acc.union(&self.cond(dom)?)?;
        }
        Ok(acc)
    }

    fn cond(&mut self, dom: AxisDomain) -> Result<IntervalSet> {
        if self.eat(">=") {
            return Ok(IntervalSet::at_least(dom, self.int()?));
        }
        if self.eat(">") {
            return Ok(IntervalSet::at_least(dom, self.int()? + 1));
        }
        if self.eat("<=") {
            return Ok(IntervalSet::at_most(dom, self.int()?));
        }
        if self.eat("<") {
            return Ok(IntervalSet::at_most(dom, self.int()? - 1));
        }
        if self.eat("!=") {
            return Ok(IntervalSet::point(dom, self.int()?).complement());
        }
        self.eat("=");
        let lo = if self.starts_int() { Endpoint::Int(self.int()?) } else { Endpoint::NegInf };
        if !self.eat("..") {
            return match lo {
                Endpoint::Int(n) => Ok(IntervalSet::point(dom, n)),
                _ => self.fail("expected a range"),
            };
        }
        let hi = if self.starts_int() { Endpoint::Int(self.int()?) } else { Endpoint::PosInf };
        if let (Endpoint::Int(a), Endpoint::Int(b)) = (lo, hi) {
            if a > b {
                return Err(Error::MalformedInterval(format!("{a}..{b}")));
            }
        }
        Ok(IntervalSet::range(dom, lo, hi))
    }
}

/// Parses a set literal, looking up bare names in `named` first.
pub fn parse_set_with(src: &str, schema: &Arc<GroundSchema>, named: &dyn Fn(&str) -> Option<DefSet>) -> Result<DefSet> {
    let mut p = Parser { src, pos: 0, schema, named };
    let s = p.expr()?;
    if p.peek().is_some() {
        return p.fail("trailing input");
    }
    Ok(s.canonicalize())
}

pub fn parse_set(src: &str, schema: &Arc<GroundSchema>) -> Result<DefSet> {
    parse_set_with(src, schema, &|_| None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn urysohn_schema() -> Arc<GroundSchema> {
        Arc::new(
            GroundSchema::new()
                .with_grid("G", AxisDomain::NAT1, AxisDomain::Integers)
                .with_atom("pinf")
                .with_atom("minf")
                .with_ray("R", AxisDomain::NAT0),
        )
    }

    #[test]
    fn selectors_and_operators() {
        let s = urysohn_schema();
        let b = parse_set("grid(G; cols>0)", &s).unwrap();
        assert!(b.contains(Point::Grid(0, 4, 1)).unwrap());
        assert!(!b.contains(Point::Grid(0, 4, 0)).unwrap());
        let c = parse_set("grid(G; rows>3; cols!=0) & ~grid(G; cols<0)", &s).unwrap();
        assert_eq!(c, parse_set("grid(G; rows=4..; cols=1..)", &s).unwrap());
        let d = parse_set("{pinf G(2,-1) R[3]} \\ atom(pinf)", &s).unwrap();
        assert_eq!(d.cardinality(), Some(2));
        assert_eq!(parse_set("ray(R; ..2, 5)", &s).unwrap().cardinality(), Some(4));
        assert_eq!(parse_set("{}", &s).unwrap(), DefSet::empty(&s));
        assert_eq!(parse_set("pinf | minf", &s).unwrap().cardinality(), Some(2));
    }

    #[test]
    fn named_sets_shadow_strands() {
        let s = urysohn_schema();
        let b = parse_set("grid(G; cols>0)", &s).unwrap();
        let named = |n: &str| (n == "B").then(|| b.clone());
        let x = parse_set_with("B | pinf", &s, &named).unwrap();
        assert!(x.contains(Point::Atom(0)).unwrap());
        assert!(parse_set("B", &s).is_err());
    }

    #[test]
    fn errors() {
        let s = urysohn_schema();
        for bad in ["grid(G; rows>)", "atom(G)", "{G(0,0)}", "ray(R; 5..2)", "(pinf", "pinf minf", "{R}"] {
            assert!(parse_set(bad, &s).is_err(), "{bad}");
        }
    }

    fn arb_sel() -> impl Strategy<Value = String> {
        prop_oneof![
            (-6i64..6).prop_map(|n| format!(">{n}")),
            (-6i64..6).prop_map(|n| format!("<={n}")),
            (-6i64..6).prop_map(|n| format!("!={n}")),
            (-6i64..6, 0i64..4).prop_map(|(a, w)| format!("{a}..{}", a + w)),
        ]
    }

    fn arb_literal() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("atom(pinf)".to_string()),
            Just("minf".to_string()),
            arb_sel().prop_map(|s| format!("ray(R; {s})")),
            (arb_sel(), arb_sel()).prop_map(|(a, b)| format!("grid(G; rows {a}; cols {b})")),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} | {b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} & {b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} \\ {b})")),
                inner.prop_map(|a| format!("~{a}")),
            ]
        })
    }

    proptest! {
        #[test]
        fn printed_form_round_trips(lit in arb_literal()) {
            let s = urysohn_schema();
            let set = parse_set(&lit, &s).unwrap();
            let again = parse_set(&set.to_string(), &s).unwrap();
            prop_assert_eq!(&again, &set);
            for p in set.points_within(10) {
                prop_assert!(again.contains(p).unwrap());
            }
        }
    }
}
