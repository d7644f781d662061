//! Integer linear expressions over the handful of variables symbolic
//! templates mention, and interval endpoints built from them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::interval::Endpoint;

pub const NVARS: usize = 6;

/// Variable slots. Templates are written over `K` (the shrinking parameter)
/// and `P0`/`P1` (coordinates of the point that owns the template); the
/// solver reuses all six slots with role-specific meanings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Var {
    J = 0,
    K = 1,
    Y0 = 2,
    Y1 = 3,
    P0 = 4,
    P1 = 5,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::J, Var::K, Var::Y0, Var::Y1, Var::P0, Var::P1];

    pub fn y(i: usize) -> Var {
        [Var::Y0, Var::Y1][i]
    }

    pub fn p(i: usize) -> Var {
        [Var::P0, Var::P1][i]
    }
}

/// `c + Σ vᵢ·xᵢ`
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Lin {
    pub c: i64,
    pub v: [i64; NVARS],
}

impl Lin {
    pub fn constant(c: i64) -> Self {
        Lin { c, v: [0; NVARS] }
    }

    pub fn var(x: Var) -> Self {
        let mut l = Lin::default();
        l.v[x as usize] = 1;
        l
    }

    /// `k + c`
    pub fn k(c: i64) -> Self {
        Lin::var(Var::K) + c
    }

    /// Owner coordinate `i` plus `c`.
    pub fn coord(i: usize, c: i64) -> Self {
        Lin::var(Var::p(i)) + c
    }

    pub fn coef(&self, x: Var) -> i64 {
        self.v[x as usize]
    }

    pub fn with_coef(mut self, x: Var, a: i64) -> Self {
        self.v[x as usize] = a;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.v.iter().all(|&a| a == 0)
    }

    pub fn mentions(&self, x: Var) -> bool {
        self.coef(x) != 0
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        Var::ALL.into_iter().filter(|&x| self.mentions(x))
    }

    /// Moves every variable into a new slot; `map[i]` is the target of slot `i`.
    /// Coefficients landing in the same slot add up.
    pub fn rename(&self, map: &[Var; NVARS]) -> Lin {
        let mut out = Lin::constant(self.c);
        for (i, &a) in self.v.iter().enumerate() {
            out.v[map[i] as usize] += a;
        }
        out
    }

    /// Replaces variable `x` by the expression `e`.
    pub fn substitute(&self, x: Var, e: &Lin) -> Lin {
        let a = self.coef(x);
        self.with_coef(x, 0) + *e * a
    }

    pub fn eval(&self, vals: &[i64; NVARS]) -> i64 {
        self.c + self.v.iter().zip(vals).map(|(a, x)| a * x).sum::<i64>()
    }

    /// Largest absolute coefficient or constant, used to size truncation windows.
    pub fn magnitude(&self) -> i64 {
        self.v.iter().chain(std::iter::once(&self.c)).map(|a| a.abs()).max().unwrap_or(0)
    }

    pub fn fmt_with(&self, names: &[&str; NVARS]) -> String {
        let mut s = String::new();
        for (i, &a) in self.v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let sign = if a < 0 { "-" } else if s.is_empty() { "" } else { "+" };
            let mag = if a.abs() == 1 { String::new() } else { a.abs().to_string() };
            s.push_str(&format!("{sign}{mag}{}", names[i]));
        }
        if s.is_empty() {
            return self.c.to_string();
        }
        match self.c {
            0 => s,
            c if c > 0 => format!("{s}+{c}"),
            c => format!("{s}{c}"),
        }
    }
}

pub const TEMPLATE_NAMES: [&str; NVARS] = ["j", "k", "y0", "y1", "p0", "p1"];

impl fmt::Display for Lin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&TEMPLATE_NAMES))
    }
}

impl Add for Lin {
    type Output = Lin;
    fn add(mut self, o: Lin) -> Lin {
        self.c += o.c;
        for i in 0..NVARS {
            self.v[i] += o.v[i];
        }
        self
    }
}

impl Add<i64> for Lin {
    type Output = Lin;
    fn add(mut self, c: i64) -> Lin {
        self.c += c;
        self
    }
}

impl Sub for Lin {
    type Output = Lin;
    fn sub(self, o: Lin) -> Lin {
        self + -o
    }
}

impl Neg for Lin {
    type Output = Lin;
    fn neg(self) -> Lin {
        self * -1
    }
}

impl Mul<i64> for Lin {
    type Output = Lin;
    fn mul(mut self, a: i64) -> Lin {
        self.c *= a;
        for x in self.v.iter_mut() {
            *x *= a;
        }
        self
    }
}

/// An interval endpoint that may depend on variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SymEnd {
    NegInf,
    Lin(Lin),
    PosInf,
}

impl SymEnd {
    pub fn int(c: i64) -> Self {
        SymEnd::Lin(Lin::constant(c))
    }

    pub fn from_endpoint(e: Endpoint) -> Self {
        match e {
            Endpoint::NegInf => SymEnd::NegInf,
            Endpoint::PosInf => SymEnd::PosInf,
            Endpoint::Int(c) => SymEnd::int(c),
        }
    }

    pub fn lin(&self) -> Option<&Lin> {
        match self {
            SymEnd::Lin(l) => Some(l),
            _ => None,
        }
    }

    pub fn map(&self, f: impl FnOnce(&Lin) -> Lin) -> SymEnd {
        match self {
            SymEnd::Lin(l) => SymEnd::Lin(f(l)),
            e => *e,
        }
    }

    pub fn eval(&self, vals: &[i64; NVARS]) -> Endpoint {
        match self {
            SymEnd::NegInf => Endpoint::NegInf,
            SymEnd::PosInf => Endpoint::PosInf,
            SymEnd::Lin(l) => Endpoint::Int(l.eval(vals)),
        }
    }

    pub fn coef(&self, x: Var) -> i64 {
        self.lin().map_or(0, |l| l.coef(x))
    }

    pub fn fmt_with(&self, names: &[&str; NVARS]) -> String {
        match self {
            SymEnd::NegInf => "-inf".into(),
            SymEnd::PosInf => "+inf".into(),
            SymEnd::Lin(l) => l.fmt_with(names),
        }
    }
}

/// The truth of `a ≤ b`, or the residual condition `a − b ≤ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    True,
    False,
    Cond(Lin),
}

pub fn le(a: &SymEnd, b: &SymEnd) -> Cmp {
    match (a, b) {
        (SymEnd::NegInf, _) | (_, SymEnd::PosInf) => Cmp::True,
        (SymEnd::PosInf, _) | (_, SymEnd::NegInf) => Cmp::False,
        (SymEnd::Lin(x), SymEnd::Lin(y)) => {
            let d = *x - *y;
            if d.is_constant() {
                if d.c <= 0 {
                    Cmp::True
                } else {
                    Cmp::False
                }
            } else {
                Cmp::Cond(d)
            }
        }
    }
}

pub fn floor_div(a: i64, b: i64) -> i64 {
    a.div_euclid(b) - if b < 0 && a.rem_euclid(b) != 0 { 1 } else { 0 }
}

pub fn ceil_div(a: i64, b: i64) -> i64 {
    -floor_div(-a, b)
}
