//! Truncated series of top-substantial Jacobi diagrams with tensor product
//! and composition, stored as the connected part (the ⊔-logarithm).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Deserialize;

use crate::canon::canonicalize;
use crate::color::{Color, Sign};
use crate::diagram::{Diagram, Port};
use crate::lincomb::{Affine, Coeff, LinComb, Q};
use crate::parse::{parse, Bindings};
use crate::Error;

/// Coefficient rings that support products.
pub trait Ring: Coeff {
    fn from_q(q: &Q) -> Self;
    fn times(&self, o: &Self) -> Self;
}

impl Ring for Q {
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
}

impl Ring for Affine {
    fn from_q(q: &Q) -> Self {
        Affine::constant(q.clone())
    }
    /// Panics when both factors carry unknowns.
    fn times(&self, o: &Self) -> Self {
        self.mul(o)
    }
}

/// Value of a bottom-top tangle: connected series with legs colored by
/// 1⁺..top⁺ and 1⁻..bottom⁻, kept up to i-deg `cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangleValue<R: Coeff> {
    pub top: usize,
    pub bottom: usize,
    pub cap: usize,
    pub log: LinComb<R>,
}

fn is_pp_strut(d: &Diagram) -> bool {
    d.i_deg() == 0 && d.leg_colors().iter().all(|c| c.is_plus())
}

impl<R: Ring> TangleValue<R> {
    /// Checks arities, connectivity and top-substantiality; drops terms above the cap.
    pub fn new(top: usize, bottom: usize, cap: usize, log: LinComb<R>) -> Result<Self, Error> {
        for (k, _) in log.iter() {
            let d = k.diagram();
            if !k.is_connected() {
                return Err(Error::Invalid("tangle value log has a disconnected term".into()));
            }
            if is_pp_strut(d) {
                return Err(Error::Invalid("strut with two positive legs".into()));
            }
            for c in d.leg_colors() {
                let lim = if c.is_plus() { top } else { bottom };
                if c.index == 0 || c.index as usize > lim {
                    return Err(Error::Invalid(format!("leg color {c} outside arity ({top}, {bottom})")));
                }
            }
        }
        let log = log.filter(|k| k.diagram().i_deg() <= cap);
        Ok(TangleValue { top, bottom, cap, log })
    }

    pub fn identity(g: usize, cap: usize) -> Self {
        let mut log = LinComb::new();
        for i in 1..=g as u32 {
            log.add_diagram(&Diagram::strut(Color::plus(i), Color::minus(i)), &R::from_q(&Q::one()));
        }
        TangleValue { top: g, bottom: g, cap, log }
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> TangleValue<S> {
        TangleValue { top: self.top, bottom: self.bottom, cap: self.cap, log: self.log.map(f) }
    }

    pub fn truncated(&self, cap: usize) -> Self {
        TangleValue {
            top: self.top,
            bottom: self.bottom,
            cap: cap.min(self.cap),
            log: self.log.filter(|k| k.diagram().i_deg() <= cap),
        }
    }

    /// Juxtaposition: `o` is placed to the right, its colors shifted.
    pub fn tensor(&self, o: &Self) -> Self {
        let (t, b) = (self.top as u32, self.bottom as u32);
        let mut log = self.log.clone();
        for (k, r) in o.log.iter() {
            let d = k.diagram().map_colors(|c| match c.sign {
                Sign::Plus => Color::plus(c.index + t),
                Sign::Minus => Color::minus(c.index + b),
            });
            log.add_diagram(&d, r);
        }
        let cap = self.cap.min(o.cap);
        TangleValue { top: self.top + o.top, bottom: self.bottom + o.bottom, cap, log }.truncated(cap)
    }

    /// `self ∘ o`: each i⁺ leg of `self` is glued to an i⁻ leg of `o`.
    pub fn compose(&self, o: &Self) -> Result<Self, Error> {
        self.compose_to(o, self.cap.min(o.cap))
    }

    /// Composition kept up to i-deg `cap`, which may exceed an operand's cap.
    /// The caller vouches that the operands' omitted terms cannot reach i-deg
    /// `cap`, e.g. because every term of the other operand has i-deg ≥ 1.
    pub fn compose_to(&self, o: &Self, cap: usize) -> Result<Self, Error> {
        if self.top != o.bottom {
            return Err(Error::Invalid(format!(
                "cannot compose: left has {} top legs, right has {} bottom legs",
                self.top, o.bottom
            )));
        }
        let log = glue_connected(&pieces(&self.log, Sign::Plus, self.top), &pieces(&o.log, Sign::Minus, o.bottom), cap);
        TangleValue::new(o.top, self.bottom, cap, log)
    }
}

struct Piece<R> {
    d: Diagram,
    coef: R,
    glue: Vec<u8>,
    n_glue: usize,
    ideg: usize,
    out: usize,
}

fn pieces<R: Ring>(x: &LinComb<R>, glued: Sign, arity: usize) -> Vec<Piece<R>> {
    x.iter()
        .map(|(k, r)| {
            let d = k.diagram().clone();
            let mut glue = vec![0u8; arity];
            let mut out = 0;
            for c in d.leg_colors() {
                if c.sign == glued {
                    glue[c.index as usize - 1] += 1;
                } else {
                    out += 1;
                }
            }
            let n_glue = glue.iter().map(|&g| g as usize).sum();
            Piece { ideg: d.i_deg(), d, coef: r.clone(), glue, n_glue, out }
        })
        .collect()
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Multisets of pieces as (index, multiplicity) lists.
type Multi = Vec<(usize, usize)>;

struct Budget {
    ideg: usize,
    out: usize,
}

fn enum_left<R>(ps: &[Piece<R>], cap: usize, start: usize, cur: &mut Multi, ideg: usize, out: usize, acc: &mut Vec<Multi>) {
    if !cur.is_empty() {
        acc.push(cur.clone());
    }
    for i in start..ps.len() {
        let p = &ps[i];
        if p.n_glue == 0 {
            continue;
        }
        let mut k = 1;
        loop {
            let (ni, no) = (ideg + k * p.ideg, out + k * p.out);
            if ni > cap || no > cap + 2 {
                break;
            }
            cur.push((i, k));
            enum_left(ps, cap, i + 1, cur, ni, no, acc);
            cur.pop();
            k += 1;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn enum_right<R>(ps: &[Piece<R>], start: usize, need: &mut [i32], left: usize, budget: &Budget, ideg: usize, out: usize, cur: &mut Multi, n_pieces: usize, glue_total: usize, acc: &mut Vec<Multi>) {
    if left == 0 {
        if n_pieces <= glue_total + 1 {
            acc.push(cur.clone());
        }
        return;
    }
    if n_pieces >= glue_total + 1 {
        return;
    }
    for i in start..ps.len() {
        let p = &ps[i];
        if p.n_glue == 0 || p.n_glue > left {
            continue;
        }
        let mut k = 1;
        loop {
            let fits = p.glue.iter().zip(need.iter()).all(|(&g, &n)| (g as i32) * (k as i32) <= n);
            let (ni, no) = (ideg + k * p.ideg, out + k * p.out);
            if !fits || ni > budget.ideg || no > budget.out || n_pieces + k > glue_total + 1 {
                break;
            }
            for (n, &g) in need.iter_mut().zip(&p.glue) {
                *n -= g as i32 * k as i32;
            }
            cur.push((i, k));
            enum_right(ps, i + 1, need, left - k * p.n_glue, budget, ni, no, cur, n_pieces + k, glue_total, acc);
            cur.pop();
            for (n, &g) in need.iter_mut().zip(&p.glue) {
                *n += g as i32 * k as i32;
            }
            k += 1;
        }
    }
}

fn weight<R: Ring>(ps: &[Piece<R>], m: &Multi) -> R {
    let mut w = R::from_q(&Q::one());
    let mut den = BigInt::one();
    for &(i, k) in m {
        for _ in 0..k {
            w = w.times(&ps[i].coef);
        }
        den *= factorial(k);
    }
    w.times(&R::from_q(&Q::new(BigInt::one(), den)))
}

/// Lays out the pieces of a multiset; returns glue legs grouped by index.
fn layout<R>(d: &mut Diagram, ps: &[Piece<R>], m: &Multi, glued: Sign, arity: usize) -> Vec<Vec<u32>> {
    let mut legs = vec![Vec::new(); arity];
    for &(i, k) in m {
        for _ in 0..k {
            let off = d.append(&ps[i].d);
            for v in 0..ps[i].d.len() as u32 {
                if let Some(c) = ps[i].d.color(v) {
                    if c.sign == glued {
                        legs[c.index as usize - 1].push(off + v);
                    }
                }
            }
        }
    }
    legs
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out
}

/// Joins leg `x` to leg `y` by splicing their attaching half-edges.
fn splice(d: &mut Diagram, x: u32, y: u32) {
    let p = d.other(Port::leg(x));
    let q = d.other(Port::leg(y));
    assert!(p != Port::leg(y), "gluing closes a strut loop");
    d.connect(p, q);
}

fn glue_connected<R: Ring>(left: &[Piece<R>], right: &[Piece<R>], cap: usize) -> LinComb<R> {
    let mut out = LinComb::new();
    // pieces with nothing to glue pass through unchanged
    for p in left.iter().chain(right) {
        if p.n_glue == 0 {
            out.add_diagram(&p.d, &p.coef);
        }
    }
    let arity = left.first().map(|p| p.glue.len()).or_else(|| right.first().map(|p| p.glue.len())).unwrap_or(0);
    let mut lefts = Vec::new();
    enum_left(left, cap, 0, &mut Vec::new(), 0, 0, &mut lefts);
    let parts: Vec<LinComb<R>> = lefts
        .par_iter()
        .map(|lm| {
            let mut acc = LinComb::new();
            let (mut ideg, mut outl, mut glue) = (0, 0, vec![0i32; arity]);
            let mut n_left = 0;
            for &(i, k) in lm {
                ideg += k * left[i].ideg;
                outl += k * left[i].out;
                n_left += k;
                for (g, &x) in glue.iter_mut().zip(&left[i].glue) {
                    *g += x as i32 * k as i32;
                }
            }
            let total: usize = glue.iter().map(|&g| g as usize).sum();
            if n_left > total + 1 {
                return acc;
            }
            let budget = Budget { ideg: cap - ideg, out: cap + 2 - outl };
            let mut rights = Vec::new();
            enum_right(right, 0, &mut glue.clone(), total, &budget, 0, 0, &mut Vec::new(), n_left, total, &mut rights);
            let wl = weight(left, lm);
            for rm in rights {
                let w = wl.times(&weight(right, &rm));
                let mut base = Diagram::new();
                let lx = layout(&mut base, left, lm, Sign::Plus, arity);
                let ry = layout(&mut base, right, &rm, Sign::Minus, arity);
                let perms: Vec<Vec<Vec<usize>>> = lx.iter().map(|l| permutations(l.len())).collect();
                let mut idx = vec![0usize; arity];
                loop {
                    let mut d = base.clone();
                    let mut gone = Vec::new();
                    for c in 0..arity {
                        for (a, &b) in perms[c][idx[c]].iter().enumerate() {
                            splice(&mut d, lx[c][a], ry[c][b]);
                            gone.push(lx[c][a]);
                            gone.push(ry[c][b]);
                        }
                    }
                    let d = d.remove_nodes(&gone);
                    if d.is_connected() {
                        if let Some((k, s)) = canonicalize(&d) {
                            acc.add_term(k, &if s > 0 { w.clone() } else { w.neg() });
                        }
                    }
                    // next bijection
                    let mut c = 0;
                    while c < arity {
                        idx[c] += 1;
                        if idx[c] < perms[c].len() {
                            break;
                        }
                        idx[c] = 0;
                        c += 1;
                    }
                    if c == arity {
                        break;
                    }
                }
            }
            acc
        })
        .collect();
    for p in parts {
        out.add(&p);
    }
    out
}

/// Disjoint-union product, keeping terms of degree at most `max_deg`.
pub fn union_product<R: Ring>(x: &LinComb<R>, y: &LinComb<R>, max_deg: usize) -> LinComb<R> {
    let mut out = LinComb::new();
    for (a, ra) in x.iter() {
        for (b, rb) in y.iter() {
            let d = a.diagram().disjoint_union(b.diagram());
            if d.deg() > max_deg {
                continue;
            }
            out.add_diagram(&d, &ra.times(rb));
        }
    }
    out
}

fn unit<R: Ring>() -> LinComb<R> {
    LinComb::single(&Diagram::new(), R::from_q(&Q::one()))
}

/// exp_⊔ of a series without constant term, up to degree `max_deg`.
pub fn exp_trunc<R: Ring>(x: &LinComb<R>, max_deg: usize) -> Result<LinComb<R>, Error> {
    if x.iter().any(|(k, _)| k.diagram().is_empty()) {
        return Err(Error::Invalid("exp of a series with constant term".into()));
    }
    let mut out = unit();
    let mut pow = unit::<R>();
    for k in 1..=max_deg {
        pow = union_product(&pow, x, max_deg);
        if pow.is_zero() {
            break;
        }
        out.add(&pow.scaled_q(&Q::new(BigInt::one(), factorial(k))));
    }
    Ok(out)
}

/// log_⊔ of a series with constant term 1, up to degree `max_deg`.
pub fn log_trunc<R: Ring>(y: &LinComb<R>, max_deg: usize) -> Result<LinComb<R>, Error> {
    let mut z = y.clone();
    let one = unit::<R>();
    if y.iter().find(|(k, _)| k.diagram().is_empty()).map(|(_, r)| r.clone()) != Some(R::from_q(&Q::one())) {
        return Err(Error::Invalid("log of a series whose constant term is not 1".into()));
    }
    z.sub(&one);
    let mut out = LinComb::new();
    let mut pow = unit::<R>();
    for k in 1..=max_deg {
        pow = union_product(&pow, &z, max_deg);
        if pow.is_zero() {
            break;
        }
        let s = if k % 2 == 1 { Q::one() } else { -Q::one() };
        out.add(&pow.scaled_q(&(s / Q::from_integer(BigInt::from(k)))));
    }
    Ok(out)
}

impl<R: Ring> LinComb<R> {
    pub fn scaled_q(&self, k: &Q) -> Self {
        let kk = R::from_q(k);
        self.map(|r| r.times(&kk))
    }
}

/// Groups a value's terms by i-deg.
pub fn by_ideg<R: Coeff>(x: &LinComb<R>) -> BTreeMap<usize, LinComb<R>> {
    let mut out: BTreeMap<usize, LinComb<R>> = BTreeMap::new();
    for (k, r) in x.iter() {
        out.entry(k.diagram().i_deg()).or_default().add_term(k.clone(), r);
    }
    out
}


#[derive(Clone, Debug, Deserialize)]
struct Entry {
    top: usize,
    bottom: usize,
    cap: usize,
    log: String,
    #[serde(default)]
    unknowns: Vec<String>,
    #[serde(default)]
    unknown_parts: BTreeMap<usize, String>,
}

/// Named tangle values read from `data/generators.json`.
#[derive(Clone, Debug)]
pub struct GeneratorTable {
    entries: BTreeMap<String, Entry>,
}

const TABLE: &str = include_str!("../data/generators.json");

impl GeneratorTable {
    pub fn load() -> Result<GeneratorTable, Error> {
        Self::from_json(TABLE)
    }

    pub fn from_json(text: &str) -> Result<GeneratorTable, Error> {
        let entries: BTreeMap<String, Entry> =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("generator table: {e}")))?;
        Ok(GeneratorTable { entries })
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn entry(&self, name: &str) -> Result<&Entry, Error> {
        self.entries.get(name).ok_or_else(|| Error::Invalid(format!("no generator named `{name}`")))
    }

    /// The tabulated value with all unknowns set to zero.
    pub fn get(&self, name: &str) -> Result<TangleValue<Q>, Error> {
        let e = self.entry(name)?;
        TangleValue::new(e.top, e.bottom, e.cap, parse(&e.log, &Bindings::new())?)
    }

    /// The tabulated value with its unknown terms a_i·X_i attached.
    pub fn get_symbolic(&self, name: &str) -> Result<TangleValue<Affine>, Error> {
        let e = self.entry(name)?;
        let mut log = parse(&e.log, &Bindings::new())?.to_affine();
        for (i, s) in e.unknowns.iter().enumerate() {
            let x = parse(s, &Bindings::new())?;
            log.add(&x.map(|c| Affine::unknown(i + 1).scale(c)));
        }
        for (&i, s) in &e.unknown_parts {
            let x = parse(s, &Bindings::new())?;
            log.add(&x.map(|c| Affine::unknown(i).scale(c)));
        }
        TangleValue::new(e.top, e.bottom, e.cap, log)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(top: usize, bottom: usize, s: &str) -> TangleValue<Q> {
        TangleValue::new(top, bottom, 3, parse(s, &Bindings::new()).unwrap()).unwrap()
    }

    #[test]
    fn identity_is_neutral() {
        let x = tv(2, 1, "strut(1+,1-) + strut(2+,1-) - 1/2*T(1+,2+,1-)");
        assert_eq!(TangleValue::identity(1, 3).compose(&x).unwrap(), x);
        assert_eq!(x.compose(&TangleValue::identity(2, 3)).unwrap(), x);
    }

    #[test]
    fn rejects_positive_strut() {
        assert!(TangleValue::<Q>::new(2, 0, 3, parse("strut(1+,2+)", &Bindings::new()).unwrap()).is_err());
    }

    #[test]
    fn exp_then_log() {
        let x = parse("strut(1+,1-) - 1/2*T(1+,2+,1-)", &Bindings::new()).unwrap();
        let y = exp_trunc(&x, 4).unwrap();
        assert_eq!(log_trunc(&y, 4).unwrap(), x);
    }
}
