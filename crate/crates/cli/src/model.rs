//! `.pt` model documents: parsing, printing and resolution.
//!
//! ```text
//! space Q3 {
//!     points: 1 2 3;
//!     vicinity 1: {1 2};
//!     vicinity 2: {2 3};
//! }
//! topology S2 { points: a b; opens: {a} {a b}; }
//! map f: D2 -> S2 { 1 -> a; 2 -> b; }
//! extension E = S2 over {a};
//! builtin U = urysohn;
//! set B = grid(G; cols>0);
//! ```
//!
//! A point with no `vicinity` line is isolated. `builtin` and `set` run to
//! the end of their line; a final `;` is optional. `#` starts a comment.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use hclosed_core::defset::{DefSet, GroundSchema};
use hclosed_core::extension::Extension;
use hclosed_core::finite::{FinitePretop, FiniteTopology, Subset};
use hclosed_core::literal::parse_set_with;
use hclosed_core::maps::FiniteMap;
use hclosed_core::symbolic::{builtin, SymbolicPretop};

use crate::error::CliError;

/// Source position, 1-based. Positions do not take part in document
/// equality, so a printed and reparsed document compares equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Loc {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Loc {}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str("command line")
        } else {
            write!(f, "line {}, column {}", self.line, self.col)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VicinityDecl {
    pub point: String,
    pub set: Vec<String>,
    pub loc: Loc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Space { name: String, points: Vec<String>, vicinities: Vec<VicinityDecl>, loc: Loc },
    Topology { name: String, points: Vec<String>, opens: Vec<Vec<String>>, loc: Loc },
    Map { name: String, source: String, target: String, pairs: Vec<(String, String, Loc)>, loc: Loc },
    Extension { name: String, space: String, base: Vec<String>, loc: Loc },
    Builtin { name: String, kind: String, loc: Loc },
    Set { name: String, literal: String, loc: Loc },
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Space { name, .. }
            | Item::Topology { name, .. }
            | Item::Map { name, .. }
            | Item::Extension { name, .. }
            | Item::Builtin { name, .. }
            | Item::Set { name, .. } => name,
        }
    }

    pub fn loc(&self) -> Loc {
        match self {
            Item::Space { loc, .. }
            | Item::Topology { loc, .. }
            | Item::Map { loc, .. }
            | Item::Extension { loc, .. }
            | Item::Builtin { loc, .. }
            | Item::Set { loc, .. } => *loc,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Item::Space { .. } => "space",
            Item::Topology { .. } => "topology",
            Item::Map { .. } => "map",
            Item::Extension { .. } => "extension",
            Item::Builtin { .. } => "builtin",
            Item::Set { .. } => "set",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelDocument {
    pub items: Vec<Item>,
}

fn braces(names: &[String]) -> String {
    format!("{{{}}}", names.join(" "))
}

impl fmt::Display for ModelDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match item {
                Item::Space { name, points, vicinities, .. } => {
                    writeln!(f, "space {name} {{")?;
                    writeln!(f, "    points: {};", points.join(" "))?;
                    for v in vicinities {
                        writeln!(f, "    vicinity {}: {};", v.point, braces(&v.set))?;
                    }
                    writeln!(f, "}}")?;
                }
                Item::Topology { name, points, opens, .. } => {
                    writeln!(f, "topology {name} {{")?;
                    writeln!(f, "    points: {};", points.join(" "))?;
                    let opens: Vec<String> = opens.iter().map(|o| braces(o)).collect();
                    writeln!(f, "    opens: {};", opens.join(" "))?;
                    writeln!(f, "}}")?;
                }
                Item::Map { name, source, target, pairs, .. } => {
                    writeln!(f, "map {name}: {source} -> {target} {{")?;
                    for (p, q, _) in pairs {
                        writeln!(f, "    {p} -> {q};")?;
                    }
                    writeln!(f, "}}")?;
                }
                Item::Extension { name, space, base, .. } => writeln!(f, "extension {name} = {space} over {};", braces(base))?,
                Item::Builtin { name, kind, .. } => writeln!(f, "builtin {name} = {kind};")?,
                Item::Set { name, literal, .. } => writeln!(f, "set {name} = {literal};")?,
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Parser<'a> {
    fn loc(&self) -> Loc {
        Loc { line: self.line, col: self.col }
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, CliError> {
        Err(CliError::Parse { loc: self.loc(), msg: msg.into() })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Skips spaces, newlines and comments.
    fn ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), CliError> {
        if self.eat(s) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |c| format!("`{c}`"));
            self.fail(format!("expected `{s}`, found {found}"))
        }
    }

    fn at_name(&mut self) -> bool {
        self.ws();
        self.peek().is_some_and(is_name_char)
    }

    fn name(&mut self) -> Result<String, CliError> {
        if !self.at_name() {
            let found = self.peek().map_or("end of input".to_string(), |c| format!("`{c}`"));
            return self.fail(format!("expected a name, found {found}"));
        }
        let start = self.pos;
        while self.peek().is_some_and(is_name_char) {
            self.bump();
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn names_until(&mut self, end: &str) -> Result<Vec<String>, CliError> {
        let mut out = Vec::new();
        while !self.eat(end) {
            out.push(self.name()?);
        }
        Ok(out)
    }

    fn point_set(&mut self) -> Result<Vec<String>, CliError> {
        self.expect("{")?;
        self.names_until("}")
    }

    /// Rest of the line, minus a trailing comment and `;`.
    fn rest_of_line(&mut self) -> Result<String, CliError> {
        self.ws_inline();
        let start = self.pos;
        while self.peek().is_some_and(|c| c != '\n' && c != '#') {
            self.bump();
        }
        let text = self.src[start..self.pos].trim_end();
        let text = text.strip_suffix(';').unwrap_or(text).trim_end();
        if text.is_empty() {
            return self.fail("expected a value before the end of the line");
        }
        Ok(text.to_string())
    }

    fn ws_inline(&mut self) {
        while self.peek().is_some_and(|c| c == ' ' || c == '\t') {
            self.bump();
        }
    }

    fn item(&mut self) -> Result<Item, CliError> {
        self.ws();
        let loc = self.loc();
        let keyword = self.name()?;
        match keyword.as_str() {
            "space" => {
                let name = self.name()?;
                self.expect("{")?;
                self.expect("points")?;
                self.expect(":")?;
                let points = self.names_until(";")?;
                let mut vicinities = Vec::new();
                while !self.eat("}") {
                    self.ws();
                    let vloc = self.loc();
                    let kw = self.name()?;
                    if kw != "vicinity" {
                        return Err(CliError::Parse { loc: vloc, msg: format!("expected `vicinity` or `}}`, found `{kw}`") });
                    }
                    let point = self.name()?;
                    self.expect(":")?;
                    let set = self.point_set()?;
                    self.expect(";")?;
                    vicinities.push(VicinityDecl { point, set, loc: vloc });
                }
                Ok(Item::Space { name, points, vicinities, loc })
            }
            "topology" => {
                let name = self.name()?;
                self.expect("{")?;
                self.expect("points")?;
                self.expect(":")?;
                let points = self.names_until(";")?;
                self.expect("opens")?;
                self.expect(":")?;
                let mut opens = Vec::new();
                while !self.eat(";") {
                    opens.push(self.point_set()?);
                }
                self.expect("}")?;
                Ok(Item::Topology { name, points, opens, loc })
            }
            "map" => {
                let name = self.name()?;
                self.expect(":")?;
                let source = self.name()?;
                self.expect("->")?;
                let target = self.name()?;
                self.expect("{")?;
                let mut pairs = Vec::new();
                while !self.eat("}") {
                    self.ws();
                    let ploc = self.loc();
                    let p = self.name()?;
                    self.expect("->")?;
                    let q = self.name()?;
                    self.expect(";")?;
                    pairs.push((p, q, ploc));
                }
                Ok(Item::Map { name, source, target, pairs, loc })
            }
            "extension" => {
                let name = self.name()?;
                self.expect("=")?;
                let space = self.name()?;
                self.expect("over")?;
                let base = self.point_set()?;
                self.expect(";")?;
                Ok(Item::Extension { name, space, base, loc })
            }
            "builtin" => {
                let name = self.name()?;
                self.expect("=")?;
                let kind = self.rest_of_line()?;
                Ok(Item::Builtin { name, kind, loc })
            }
            "set" => {
                let name = self.name()?;
                self.expect("=")?;
                let literal = self.rest_of_line()?;
                Ok(Item::Set { name, literal, loc })
            }
            other => Err(CliError::Parse {
                loc,
                msg: format!("unknown declaration `{other}`; expected space, topology, map, extension, builtin or set"),
            }),
        }
    }
}

pub fn parse_model(text: &str) -> Result<ModelDocument, CliError> {
    let mut p = Parser { src: text, pos: 0, line: 1, col: 1 };
    let mut items = Vec::new();
    loop {
        p.ws();
        if p.peek().is_none() {
            break;
        }
        items.push(p.item()?);
    }
    Ok(ModelDocument { items })
}

/// A declaration after resolution.
#[derive(Clone, Debug)]
pub enum Object {
    Space(FinitePretop),
    Topology(FiniteTopology),
    Map { map: FiniteMap, source: String, target: String },
    Extension { ext: Extension, space: String },
    Builtin(SymbolicPretop),
    Set(String),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Space(_) => "space",
            Object::Topology(_) => "topology",
            Object::Map { .. } => "map",
            Object::Extension { .. } => "extension",
            Object::Builtin(_) => "builtin",
            Object::Set(_) => "set",
        }
    }
}

/// A validated document with every reference resolved.
#[derive(Clone, Debug, Default)]
pub struct Model {
    pub objects: BTreeMap<String, Object>,
    /// Declaration order.
    pub order: Vec<String>,
}

fn resolution(loc: Loc, msg: impl Into<String>) -> CliError {
    CliError::Resolution { loc, msg: msg.into() }
}

fn unique(names: &[String], loc: Loc, what: &str) -> Result<(), CliError> {
    let mut seen = HashSet::new();
    match names.iter().find(|n| !seen.insert(n.as_str())) {
        Some(n) => Err(resolution(loc, format!("duplicate {what} `{n}`"))),
        None => Ok(()),
    }
}

fn mask(names: &[String], x: &FinitePretop, loc: Loc) -> Result<Subset, CliError> {
    names.iter().try_fold(0, |m, n| {
        x.index_of(n).map(|i| m | 1 << i).map_err(|_| resolution(loc, format!("unknown point `{n}`")))
    })
}

fn invalid(loc: Loc, e: hclosed_core::Error) -> CliError {
    CliError::Invalid { loc, msg: e.to_string() }
}

impl Model {
    pub fn resolve(doc: &ModelDocument) -> Result<Model, CliError> {
        let mut model = Model::default();
        for item in &doc.items {
            let loc = item.loc();
            if model.objects.contains_key(item.name()) {
                return Err(resolution(loc, format!("duplicate name `{}`", item.name())));
            }
            let obj = match item {
                Item::Space { points, vicinities, .. } => {
                    unique(points, loc, "point")?;
                    let x = FinitePretop::discrete(points.len());
                    let x = FinitePretop::new(points.clone(), x.vicinities().to_vec()).map_err(|e| invalid(loc, e))?;
                    let mut vic: Vec<Option<Subset>> = vec![None; points.len()];
                    for v in vicinities {
                        let i = x.index_of(&v.point).map_err(|_| resolution(v.loc, format!("unknown point `{}`", v.point)))?;
                        if vic[i].is_some() {
                            return Err(resolution(v.loc, format!("second vicinity for `{}`", v.point)));
                        }
                        let m = mask(&v.set, &x, v.loc)?;
                        if m >> i & 1 == 0 {
                            return Err(invalid(v.loc, hclosed_core::Error::AxiomViolation(v.point.clone())));
                        }
                        vic[i] = Some(m);
                    }
                    let vic = vic.iter().enumerate().map(|(i, v)| v.unwrap_or(1 << i)).collect();
                    Object::Space(x.with_vicinities(vic).map_err(|e| invalid(loc, e))?)
                }
                Item::Topology { points, opens, .. } => {
                    unique(points, loc, "point")?;
                    let x = FinitePretop::discrete(points.len());
                    let x = FinitePretop::new(points.clone(), x.vicinities().to_vec()).map_err(|e| invalid(loc, e))?;
                    let opens = opens.iter().map(|o| mask(o, &x, loc)).collect::<Result<Vec<_>, _>>()?;
                    Object::Topology(FiniteTopology::new(points.clone(), opens).map_err(|e| invalid(loc, e))?)
                }
                Item::Map { source, target, pairs, .. } => {
                    let src = model.finite(source, loc)?;
                    let dst = model.finite(target, loc)?;
                    let mut table: Vec<Option<usize>> = vec![None; src.len()];
                    for (p, q, ploc) in pairs {
                        let i = src.index_of(p).map_err(|_| resolution(*ploc, format!("unknown point `{p}` in `{source}`")))?;
                        let j = dst.index_of(q).map_err(|_| resolution(*ploc, format!("unknown point `{q}` in `{target}`")))?;
                        if table[i].replace(j).is_some() {
                            return Err(resolution(*ploc, format!("`{p}` is mapped twice")));
                        }
                    }
                    if let Some(i) = table.iter().position(Option::is_none) {
                        return Err(resolution(loc, format!("`{}` has no image", src.names()[i])));
                    }
                    let map = FiniteMap::new(table.into_iter().flatten().collect(), dst.len()).map_err(|e| invalid(loc, e))?;
                    Object::Map { map, source: source.clone(), target: target.clone() }
                }
                Item::Extension { space, base, .. } => {
                    let x = model.finite(space, loc)?;
                    let b = mask(base, &x, loc)?;
                    Object::Extension { ext: Extension::new(x, b).map_err(|e| invalid(loc, e))?, space: space.clone() }
                }
                Item::Builtin { kind, .. } => Object::Builtin(builtin(kind).map_err(|e| invalid(loc, e))?),
                Item::Set { literal, .. } => Object::Set(literal.clone()),
            };
            model.order.push(item.name().to_string());
            model.objects.insert(item.name().to_string(), obj);
        }
        Ok(model)
    }

    pub fn get(&self, name: &str) -> Result<&Object, CliError> {
        self.objects.get(name).ok_or_else(|| resolution(Loc::default(), format!("no declaration named `{name}`")))
    }

    /// The pretopology of a finite space, topology or extension.
    pub fn finite(&self, name: &str, loc: Loc) -> Result<FinitePretop, CliError> {
        match self.objects.get(name) {
            Some(Object::Space(x)) => Ok(x.clone()),
            Some(Object::Topology(t)) => Ok(t.to_pretop()),
            Some(Object::Extension { ext, .. }) => Ok(ext.space().clone()),
            Some(o) => Err(resolution(loc, format!("`{name}` is a {}, not a finite space", o.kind()))),
            None => Err(resolution(loc, format!("no declaration named `{name}`"))),
        }
    }

    /// Parses a set literal against `schema`, resolving bare names to the
    /// document's `set` declarations.
    pub fn parse_set(&self, literal: &str, schema: &Arc<GroundSchema>) -> Result<DefSet, CliError> {
        self.parse_set_guarded(literal, schema, &mut Vec::new())
    }

    fn parse_set_guarded(&self, literal: &str, schema: &Arc<GroundSchema>, stack: &mut Vec<String>) -> Result<DefSet, CliError> {
        // resolve named sets up front so errors and cycles surface here
        let mut named = BTreeMap::new();
        for (name, obj) in &self.objects {
            if let Object::Set(text) = obj {
                if literal_mentions(literal, name) {
                    if stack.contains(name) {
                        return Err(resolution(Loc::default(), format!("set `{name}` refers to itself")));
                    }
                    stack.push(name.clone());
                    let s = self.parse_set_guarded(text, schema, stack)?;
                    stack.pop();
                    named.insert(name.clone(), s);
                }
            }
        }
        parse_set_with(literal, schema, &|n| named.get(n).cloned()).map_err(|e| CliError::Parse { loc: Loc::default(), msg: e.to_string() })
    }

    /// A finite subset of `x` from a set literal; point names are the atoms.
    pub fn finite_set(&self, literal: &str, x: &FinitePretop) -> Result<Subset, CliError> {
        let schema = atom_schema(x);
        let s = self.parse_set(literal, &schema)?;
        Ok(s.atom_flags().iter().enumerate().filter(|(_, &b)| b).fold(0, |m, (i, _)| m | 1 << i))
    }
}

/// The schema with one atom per point of `x`, in index order.
pub fn atom_schema(x: &FinitePretop) -> Arc<GroundSchema> {
    Arc::new(x.names().iter().fold(GroundSchema::new(), |s, n| s.with_atom(n)))
}

fn literal_mentions(literal: &str, name: &str) -> bool {
    literal.split(|c: char| !is_name_char(c)).any(|w| w == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q3: &str = "# three points\nspace Q3 {\n  points: 1 2 3;\n  vicinity 1: {1 2};\n  vicinity 2: {2 3};\n}\n";

    #[test]
    fn q3_document() {
        let doc = parse_model(Q3).unwrap();
        assert_eq!(doc.items.len(), 1);
        let m = Model::resolve(&doc).unwrap();
        let Object::Space(x) = m.get("Q3").unwrap() else { panic!() };
        assert_eq!(x.to_string(), "M(1)={1 2}, M(2)={2 3}, M(3)={3}");
    }

    #[test]
    fn axiom_violation_has_location() {
        let doc = parse_model("space X {\n  points: 1 2;\n  vicinity 1: {2};\n}\n").unwrap();
        match Model::resolve(&doc) {
            Err(CliError::Invalid { loc, msg }) => {
                assert_eq!((loc.line, loc.col), (3, 3));
                assert!(msg.contains("axiom"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_have_location() {
        match parse_model("space X {\n  points 1 2;\n}") {
            Err(CliError::Parse { loc, .. }) => assert_eq!((loc.line, loc.col), (2, 10)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_model("spaces X {}"), Err(CliError::Parse { .. })));
    }

    #[test]
    fn dangling_names() {
        let doc = parse_model("space A { points: a; }\nmap f: A -> B { a -> b; }\n").unwrap();
        assert!(matches!(Model::resolve(&doc), Err(CliError::Resolution { .. })));
        let doc = parse_model("set A = B\nset B = A\nbuiltin U = urysohn\n").unwrap();
        let m = Model::resolve(&doc).unwrap();
        let Object::Builtin(u) = m.get("U").unwrap() else { panic!() };
        assert!(matches!(m.parse_set("A", u.schema()), Err(CliError::Resolution { .. })));
    }

    #[test]
    fn named_sets_and_finite_literals() {
        let doc = parse_model(&format!("{Q3}set T = {{3}}\nset U = T | {{1}}\n")).unwrap();
        let m = Model::resolve(&doc).unwrap();
        let x = m.finite("Q3", Loc::default()).unwrap();
        assert_eq!(m.finite_set("U", &x).unwrap(), 0b101);
        assert_eq!(m.finite_set("~T", &x).unwrap(), 0b011);
    }
}
