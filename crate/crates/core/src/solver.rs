//! Quantifier elimination for conjunctions of linear endpoint conditions.
//!
//! Every condition is a [`Lin`] read as `expr ≤ 0`. The variable slots play
//! fixed roles:
//!
//! * `J` is universally quantified over ℕ;
//! * `K` is a free shrinking parameter, and any comparison that does not
//!   involve a result coordinate is decided for all sufficiently large `K`;
//! * `Y0`, `Y1` are result coordinates, returned as interval bounds;
//! * `P0`, `P1` are parameters, returned as case splits (guards).
//!
//! Deciding `K` only eventually is sound for vicinity templates because a
//! shrinking family and any of its tails generate the same filter.

use std::cmp::{max, min};

use crate::error::{Error, Result};
use crate::interval::{Endpoint, Interval};
use crate::lin::{ceil_div, floor_div, le, Cmp, Lin, SymEnd, Var};

pub const FULL: Interval = Interval { lo: Endpoint::NegInf, hi: Endpoint::PosInf };

/// Ranges for `P0` and `P1`.
pub type Guard = [Interval; 2];

pub const FULL_GUARD: Guard = [FULL, FULL];

pub fn meet(a: Interval, b: Interval) -> Option<Interval> {
    let lo = max(a.lo, b.lo);
    let hi = min(a.hi, b.hi);
    (lo <= hi).then_some(Interval { lo, hi })
}

pub fn meet_guard(a: &Guard, b: &Guard) -> Option<Guard> {
    Some([meet(a[0], b[0])?, meet(a[1], b[1])?])
}

/// A conjunction under construction; comparisons that are already decided are
/// folded in immediately.
#[derive(Clone, Debug, Default)]
pub struct Conj {
    conds: Vec<Lin>,
    dead: bool,
}

impl Conj {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `a ≤ b`.
    pub fn le(&mut self, a: &SymEnd, b: &SymEnd) -> &mut Self {
        match le(a, b) {
            Cmp::True => {}
            Cmp::False => self.dead = true,
            Cmp::Cond(l) => self.conds.push(l),
        }
        self
    }

    /// Adds `x ∈ iv` for a single-variable expression.
    pub fn within(&mut self, x: &Lin, iv: Interval) -> &mut Self {
        let e = SymEnd::Lin(*x);
        self.le(&SymEnd::from_endpoint(iv.lo), &e).le(&e, &SymEnd::from_endpoint(iv.hi))
    }

    /// Adds the raw condition `l ≤ 0`.
    pub fn push(&mut self, l: Lin) -> &mut Self {
        self.le(&SymEnd::Lin(l), &SymEnd::int(0))
    }

    pub fn kill(&mut self) -> &mut Self {
        self.dead = true;
        self
    }

    pub fn is_dead(&self) -> bool {
        self.dead
    }

    pub fn conds(&self) -> &[Lin] {
        &self.conds
    }
}

/// Which of `J` and `K` is eliminated first. `JFirst` reads `∀j` outside the
/// eventual-`K` decisions (templates built from other templates); `KFirst`
/// reads `∀j ∃k` (continuity-style statements).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    JFirst,
    KFirst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub guard: Guard,
    /// Bounds per result coordinate, over `K`, `P0`, `P1` and constants.
    pub y: Vec<(SymEnd, SymEnd)>,
}

fn has_y(l: &Lin) -> bool {
    l.mentions(Var::Y0) || l.mentions(Var::Y1)
}

fn forall_j(conds: &mut [Lin]) -> bool {
    for c in conds.iter_mut() {
        if c.coef(Var::J) > 0 {
            return false;
        }
        c.v[Var::J as usize] = 0;
    }
    true
}

fn eventually_k(conds: &mut Vec<Lin>) -> bool {
    let mut ok = true;
    conds.retain(|c| {
        if has_y(c) {
            return true;
        }
        match c.coef(Var::K) {
            0 => true,
            a if a > 0 => {
                ok = false;
                true
            }
            _ => false,
        }
    });
    ok
}

/// Splits a guard by the sign of `d` (read eventually in `K`): the part where
/// `d > 0` and the part where `d ≤ 0`.
fn split_sign(d: &Lin, g: &Guard) -> Result<(Option<Guard>, Option<Guard>)> {
    debug_assert!(!has_y(d) && !d.mentions(Var::J));
    match d.coef(Var::K) {
        a if a > 0 => return Ok((Some(*g), None)),
        a if a < 0 => return Ok((None, Some(*g))),
        _ => {}
    }
    let ps: Vec<usize> = (0..2).filter(|&i| d.mentions(Var::p(i))).collect();
    match ps.as_slice() {
        [] => Ok(if d.c > 0 { (Some(*g), None) } else { (None, Some(*g)) }),
        [j] => {
            let j = *j;
            let s = d.coef(Var::p(j));
            let c = d.c;
            // s·P + c > 0
            let (pos, neg) = if s > 0 {
                let t = floor_div(-c, s) + 1;
                (
                    Interval { lo: Endpoint::Int(t), hi: Endpoint::PosInf },
                    Interval { lo: Endpoint::NegInf, hi: Endpoint::Int(t - 1) },
                )
            } else {
                let u = floor_div(c - 1, -s);
                (
                    Interval { lo: Endpoint::NegInf, hi: Endpoint::Int(u) },
                    Interval { lo: Endpoint::Int(u + 1), hi: Endpoint::PosInf },
                )
            };
            let restrict = |iv: Interval| {
                let mut h = *g;
                meet(h[j], iv).map(|m| {
                    h[j] = m;
                    h
                })
            };
            Ok((restrict(pos), restrict(neg)))
        }
        _ => Err(Error::FragmentEscape(format!("condition {d} ≤ 0 relates two parameters"))),
    }
}

/// The parameter guard described by a `Y`-free, `K`-free condition `l ≤ 0`.
fn guard_of(l: &Lin, g: &Guard) -> Result<Option<Guard>> {
    Ok(split_sign(l, g)?.1)
}

fn pick(cands: &[Lin], maximize: bool, g: &Guard) -> Result<Vec<(Guard, SymEnd)>> {
    let Some((first, rest)) = cands.split_first() else {
        return Ok(vec![(*g, if maximize { SymEnd::NegInf } else { SymEnd::PosInf })]);
    };
    let mut states = vec![(*g, *first)];
    for c in rest {
        let mut next = Vec::with_capacity(states.len() * 2);
        for (h, best) in states {
            let d = if maximize { *c - best } else { best - *c };
            let (wins, loses) = split_sign(&d, &h)?;
            next.extend(wins.map(|w| (w, *c)));
            next.extend(loses.map(|l| (l, best)));
        }
        states = next;
    }
    Ok(states.into_iter().map(|(h, l)| (h, SymEnd::Lin(l))).collect())
}

/// Eliminates `J`, decides `K` eventually, and returns the solution set as a
/// union of guarded boxes over the first `ydims` result coordinates.
pub fn solve(conj: &Conj, ydims: usize, order: Order) -> Result<Vec<Solution>> {
    if conj.dead {
        return Ok(vec![]);
    }
    let mut conds = conj.conds.clone();
    let ok = match order {
        Order::JFirst => forall_j(&mut conds) && eventually_k(&mut conds),
        Order::KFirst => eventually_k(&mut conds) && forall_j(&mut conds),
    };
    if !ok {
        return Ok(vec![]);
    }
    let mut guard = FULL_GUARD;
    let mut lows: Vec<Vec<Lin>> = vec![vec![]; ydims];
    let mut highs: Vec<Vec<Lin>> = vec![vec![]; ydims];
    for c in &conds {
        if c.is_constant() {
            if c.c > 0 {
                return Ok(vec![]);
            }
            continue;
        }
        let ys: Vec<usize> = (0..2).filter(|&i| c.mentions(Var::y(i))).collect();
        match ys.as_slice() {
            [] => match guard_of(c, &guard)? {
                Some(g) => guard = g,
                None => return Ok(vec![]),
            },
            [i] => {
                let i = *i;
                if i >= ydims {
                    return Err(Error::FragmentEscape(format!("unexpected result coordinate in {c}")));
                }
                let s = c.coef(Var::y(i));
                let rest = c.with_coef(Var::y(i), 0);
                match s {
                    1 => highs[i].push(-rest),
                    -1 => lows[i].push(rest),
                    _ => return Err(Error::FragmentEscape(format!("non-unit coefficient in {c} ≤ 0"))),
                }
            }
            _ => return Err(Error::FragmentEscape(format!("condition {c} ≤ 0 relates two result coordinates"))),
        }
    }
    let mut states: Vec<(Guard, Vec<(SymEnd, SymEnd)>)> = vec![(guard, vec![])];
    for i in 0..ydims {
        let mut next = Vec::new();
        for (g, bounds) in states {
            for (g1, lo) in pick(&lows[i], true, &g)? {
                for (g2, hi) in pick(&highs[i], false, &g1)? {
                    let g3 = match (lo, hi) {
                        (SymEnd::Lin(a), SymEnd::Lin(b)) => guard_of(&(a - b), &g2)?,
                        _ => Some(g2),
                    };
                    if let Some(g3) = g3 {
                        let mut b = bounds.clone();
                        b.push((lo, hi));
                        next.push((g3, b));
                    }
                }
            }
        }
        states = next;
    }
    Ok(states.into_iter().map(|(guard, y)| Solution { guard, y }).collect())
}

/// Runs only the `J`/`K` elimination, leaving the residual conditions.
pub fn eliminate(conj: &Conj, order: Order) -> Option<Conj> {
    if conj.dead {
        return None;
    }
    let mut conds = conj.conds.clone();
    let ok = match order {
        Order::JFirst => forall_j(&mut conds) && eventually_k(&mut conds),
        Order::KFirst => eventually_k(&mut conds) && forall_j(&mut conds),
    };
    ok.then_some(Conj { conds, dead: false })
}

/// `true` when some solution exists for some parameter value.
pub fn satisfiable(conj: &Conj, order: Order) -> Result<bool> {
    Ok(!solve(conj, 0, order)?.is_empty())
}

/// Integer feasibility of difference constraints over the listed variables
/// (every condition of the form `±x ≤ c` or `x − y ≤ c`, with `J` and `K`
/// already eliminated). Returns a satisfying assignment.
pub fn feasible(conj: &Conj, vars: &[Var]) -> Result<Option<Vec<i64>>> {
    if conj.dead {
        return Ok(None);
    }
    let n = vars.len() + 1;
    let node = |x: Var| vars.iter().position(|&v| v == x).map(|i| i + 1);
    // edge (from, to, w) encodes to − from ≤ w
    let mut edges: Vec<(usize, usize, i64)> = Vec::new();
    for c in &conj.conds {
        let terms: Vec<(Var, i64)> = c.vars().map(|x| (x, c.coef(x))).collect();
        let bound = -c.c;
        let escape = || Error::FragmentEscape(format!("condition {c} ≤ 0 is not a difference constraint"));
        match terms.as_slice() {
            [] => {
                if c.c > 0 {
                    return Ok(None);
                }
            }
            [(x, 1)] => edges.push((0, node(*x).ok_or_else(escape)?, bound)),
            [(x, -1)] => edges.push((node(*x).ok_or_else(escape)?, 0, bound)),
            [(x, a), (y, b)] if *a == -*b && a.abs() == 1 => {
                let (pos, neg) = if *a == 1 { (*x, *y) } else { (*y, *x) };
                edges.push((node(neg).ok_or_else(escape)?, node(pos).ok_or_else(escape)?, bound));
            }
            _ => return Err(escape()),
        }
    }
    let mut dist = vec![0i64; n];
    for round in 0..=n {
        let mut changed = false;
        for &(u, v, w) in &edges {
            let cand = dist[u].saturating_add(w);
            if cand < dist[v] {
                dist[v] = cand;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        if round == n {
            return Ok(None);
        }
    }
    Ok(Some((1..n).map(|i| dist[i] - dist[0]).collect()))
}

/// Turns a constant interval `[lo, hi]` into bounds, for callers that build
/// boxes from solver output.
pub fn constant_bounds(lo: &SymEnd, hi: &SymEnd) -> Option<Interval> {
    let conv = |e: &SymEnd| match e {
        SymEnd::NegInf => Some(Endpoint::NegInf),
        SymEnd::PosInf => Some(Endpoint::PosInf),
        SymEnd::Lin(l) if l.is_constant() => Some(Endpoint::Int(l.c)),
        SymEnd::Lin(_) => None,
    };
    let (lo, hi) = (conv(lo)?, conv(hi)?);
    (lo <= hi && lo != Endpoint::PosInf && hi != Endpoint::NegInf).then_some(Interval { lo, hi })
}

/// Integer range `{x : s·x + c ≤ 0}`.
pub fn linear_range(s: i64, c: i64) -> Interval {
    if s > 0 {
        Interval { lo: Endpoint::NegInf, hi: Endpoint::Int(floor_div(-c, s)) }
    } else {
        Interval { lo: Endpoint::Int(ceil_div(c, -s)), hi: Endpoint::PosInf }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(i: usize) -> Lin {
        Lin::var(Var::y(i))
    }

    #[test]
    fn forall_kills_growing_lower_bounds() {
        // j + 1 ≤ y0 for all j: impossible
        let mut c = Conj::new();
        c.le(&SymEnd::Lin(Lin::var(Var::J) + 1), &SymEnd::Lin(y(0)));
        assert!(solve(&c, 1, Order::JFirst).unwrap().is_empty());
        // -j ≤ y0 for all j: y0 ≥ 0
        let mut c = Conj::new();
        c.le(&SymEnd::Lin(-Lin::var(Var::J)), &SymEnd::Lin(y(0)));
        let s = solve(&c, 1, Order::JFirst).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].y[0], (SymEnd::int(0), SymEnd::PosInf));
    }

    #[test]
    fn eventual_k_picks_the_moving_bound() {
        // y0 ≥ k+1 and y0 ≥ 3: eventually y0 ≥ k+1
        let mut c = Conj::new();
        c.le(&SymEnd::Lin(Lin::k(1)), &SymEnd::Lin(y(0))).le(&SymEnd::int(3), &SymEnd::Lin(y(0)));
        let s = solve(&c, 1, Order::JFirst).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].y[0].0, SymEnd::Lin(Lin::k(1)));
        // k ≤ 5 alone is eventually false
        let mut c = Conj::new();
        c.push(Lin::k(-5));
        assert!(!satisfiable(&c, Order::JFirst).unwrap());
    }

    #[test]
    fn parameters_split_guards() {
        // y0 ≥ p0 and y0 ≥ 2: split at p0 = 2
        let mut c = Conj::new();
        c.le(&SymEnd::Lin(Lin::var(Var::P0)), &SymEnd::Lin(y(0))).le(&SymEnd::int(2), &SymEnd::Lin(y(0)));
        let s = solve(&c, 1, Order::JFirst).unwrap();
        assert_eq!(s.len(), 2);
        for sol in &s {
            let g = sol.guard[0];
            match sol.y[0].0 {
                SymEnd::Lin(l) if l.is_constant() => assert_eq!(g.hi, Endpoint::Int(1)),
                _ => assert_eq!(g.lo, Endpoint::Int(2)),
            }
        }
    }

    #[test]
    fn empty_boxes_are_dropped() {
        let mut c = Conj::new();
        c.within(&y(0), Interval { lo: Endpoint::Int(5), hi: Endpoint::PosInf })
            .le(&SymEnd::Lin(y(0)), &SymEnd::int(1));
        assert!(solve(&c, 1, Order::JFirst).unwrap().is_empty());
    }

    #[test]
    fn diagonal_conditions_escape() {
        let mut c = Conj::new();
        c.le(&SymEnd::Lin(y(0)), &SymEnd::Lin(y(1)));
        assert!(matches!(solve(&c, 2, Order::JFirst), Err(Error::FragmentEscape(_))));
    }

    #[test]
    fn k_first_reads_forall_exists() {
        // for all j there is k with j ≤ k: true
        let mut c = Conj::new();
        c.le(&SymEnd::Lin(Lin::var(Var::J)), &SymEnd::Lin(Lin::k(0)));
        assert!(satisfiable(&c, Order::KFirst).unwrap());
        assert!(!satisfiable(&c, Order::JFirst).unwrap());
    }

    #[test]
    fn difference_constraints() {
        let x = Lin::var(Var::P0);
        let z = Lin::var(Var::Y0);
        let mut c = Conj::new();
        c.le(&SymEnd::Lin(x), &SymEnd::Lin(z + -1)).le(&SymEnd::Lin(z), &SymEnd::int(4)).le(&SymEnd::int(3), &SymEnd::Lin(x));
        let sol = feasible(&c, &[Var::P0, Var::Y0]).unwrap().unwrap();
        assert!(sol[0] >= 3 && sol[0] < sol[1] && sol[1] <= 4);
        c.le(&SymEnd::int(4), &SymEnd::Lin(x));
        assert_eq!(feasible(&c, &[Var::P0, Var::Y0]).unwrap(), None);
    }

    #[test]
    fn ranges() {
        assert_eq!(linear_range(2, -5), Interval { lo: Endpoint::NegInf, hi: Endpoint::Int(2) });
        assert_eq!(linear_range(-2, 5), Interval { lo: Endpoint::Int(3), hi: Endpoint::PosInf });
    }
}
