use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::canon::{canonicalize, Canon};
use crate::diagram::Diagram;

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Coefficient group of a linear combination.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn nil() -> Self;
    fn is_nil(&self) -> bool;
    fn add_assign(&mut self, o: &Self);
    fn neg(&self) -> Self;
    fn mul_int(&self, k: &BigInt) -> Self;
    /// Normal form of a coefficient on a 2-torsion diagram; `None` when the
    /// term vanishes.
    fn on_two_torsion(&self) -> Option<Self>;
}

impl Coeff for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        self * k
    }
    fn on_two_torsion(&self) -> Option<Self> {
        if self.is_even() {
            None
        } else {
            Some(BigInt::one())
        }
    }
}

impl Coeff for Q {
    fn nil() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        self * Q::from_integer(k.clone())
    }
    fn on_two_torsion(&self) -> Option<Self> {
        None
    }
}

/// Reduces `x` into [0, m).
pub fn reduce_mod(x: &Q, m: &Q) -> Q {
    let k = (x / m).floor();
    x - k * m
}

/// An element of ℚ/mℤ, stored as its representative in [0, m).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMod<const NUM: i64, const DEN: i64>(Q);

pub type QModHalf = QMod<1, 2>;
pub type QModOne = QMod<1, 1>;

impl<const NUM: i64, const DEN: i64> QMod<NUM, DEN> {
    pub fn modulus() -> Q {
        q(NUM, DEN)
    }
    pub fn new(x: Q) -> Self {
        QMod(reduce_mod(&x, &Self::modulus()))
    }
    pub fn value(&self) -> &Q {
        &self.0
    }
}

impl<const NUM: i64, const DEN: i64> fmt::Display for QMod<NUM, DEN> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const NUM: i64, const DEN: i64> Coeff for QMod<NUM, DEN> {
    fn nil() -> Self {
        QMod(Q::zero())
    }
    fn is_nil(&self) -> bool {
        self.0.is_zero()
    }
    fn add_assign(&mut self, o: &Self) {
        *self = Self::new(&self.0 + &o.0);
    }
    fn neg(&self) -> Self {
        Self::new(-&self.0)
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        Self::new(&self.0 * Q::from_integer(k.clone()))
    }
    fn on_two_torsion(&self) -> Option<Self> {
        None
    }
}

/// Affine-linear form c₀ + c₁a₁ + … over ℚ in formal unknowns.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Affine(pub Vec<Q>);

impl Affine {
    pub fn constant(c: Q) -> Affine {
        Affine(vec![c]).trimmed()
    }
    /// The unknown a_i (1-based).
    pub fn unknown(i: usize) -> Affine {
        let mut v = vec![Q::zero(); i + 1];
        v[i] = Q::one();
        Affine(v)
    }
    fn trimmed(mut self) -> Affine {
        while self.0.last().is_some_and(|x| x.is_zero()) {
            self.0.pop();
        }
        self
    }
    pub fn coef(&self, i: usize) -> Q {
        self.0.get(i).cloned().unwrap_or_else(Q::zero)
    }
    pub fn scale(&self, k: &Q) -> Affine {
        Affine(self.0.iter().map(|x| x * k).collect()).trimmed()
    }
    pub fn mul(&self, o: &Affine) -> Affine {
        if self.0.len() > 1 && o.0.len() > 1 {
            panic!("product of two non-constant affine forms");
        }
        if self.0.len() <= 1 {
            o.scale(&self.coef(0))
        } else {
            self.scale(&o.coef(0))
        }
    }
    pub fn eval(&self, vals: &[Q]) -> Q {
        let mut s = self.coef(0);
        for i in 1..self.0.len() {
            s += &self.0[i] * &vals[i - 1];
        }
        s
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if i == 0 {
                parts.push(format!("{c}"));
            } else {
                parts.push(format!("{c}*a{i}"));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "({})", parts.join(" + "))
        }
    }
}

impl Coeff for Affine {
    fn nil() -> Self {
        Affine(Vec::new())
    }
    fn is_nil(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }
    fn add_assign(&mut self, o: &Self) {
        if self.0.len() < o.0.len() {
            self.0.resize(o.0.len(), Q::zero());
        }
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a += b;
        }
        *self = std::mem::take(self).trimmed();
    }
    fn neg(&self) -> Self {
        Affine(self.0.iter().map(|x| -x).collect())
    }
    fn mul_int(&self, k: &BigInt) -> Self {
        self.scale(&Q::from_integer(k.clone()))
    }
    fn on_two_torsion(&self) -> Option<Self> {
        None
    }
}

/// Finite formal sum of canonical diagrams.
#[derive(Clone, PartialEq)]
pub struct LinComb<R: Coeff> {
    terms: BTreeMap<Canon, R>,
}

impl<R: Coeff> Default for LinComb<R> {
    fn default() -> Self {
        LinComb { terms: BTreeMap::new() }
    }
}

impl<R: Coeff> LinComb<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(d: &Diagram, r: R) -> Self {
        let mut x = Self::new();
        x.add_diagram(d, &r);
        x
    }

    pub fn add_term(&mut self, k: Canon, r: &R) {
        if r.is_nil() {
            return;
        }
        let sym = k.as_symmetric();
        let e = self.terms.entry(k.clone()).or_insert_with(R::nil);
        e.add_assign(r);
        let v = if sym { e.on_two_torsion() } else { Some(e.clone()) };
        match v {
            Some(v) if !v.is_nil() => *e = v,
            _ => {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add_diagram(&mut self, d: &Diagram, r: &R) {
        if let Some((k, s)) = canonicalize(d) {
            let r = if s < 0 { r.neg() } else { r.clone() };
            self.add_term(k, &r);
        }
    }

    pub fn add(&mut self, o: &Self) {
        for (k, r) in &o.terms {
            self.add_term(k.clone(), r);
        }
    }

    pub fn sub(&mut self, o: &Self) {
        for (k, r) in &o.terms {
            self.add_term(k.clone(), &r.neg());
        }
    }

    pub fn scaled_int(&self, k: i64) -> Self {
        self.map(|r| r.mul_int(&BigInt::from(k)))
    }

    pub fn neg(&self) -> Self {
        self.map(|r| r.neg())
    }

    pub fn map<S: Coeff>(&self, f: impl Fn(&R) -> S) -> LinComb<S> {
        let mut out = LinComb::new();
        for (k, r) in &self.terms {
            out.add_term(k.clone(), &f(r));
        }
        out
    }

    pub fn filter(&self, f: impl Fn(&Canon) -> bool) -> Self {
        LinComb { terms: self.terms.iter().filter(|(k, _)| f(k)).map(|(k, r)| (k.clone(), r.clone())).collect() }
    }

    pub fn get(&self, k: &Canon) -> R {
        self.terms.get(k).cloned().unwrap_or_else(R::nil)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Canon, &R)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl LinComb<Q> {
    pub fn scaled(&self, k: &Q) -> Self {
        self.map(|r| r * k)
    }
    pub fn to_mod<const N: i64, const D: i64>(&self) -> LinComb<QMod<N, D>> {
        self.map(|r| QMod::<N, D>::new(r.clone()))
    }
    pub fn to_affine(&self) -> LinComb<Affine> {
        self.map(|r| Affine::constant(r.clone()))
    }
}

impl LinComb<BigInt> {
    pub fn to_rational(&self) -> LinComb<Q> {
        self.map(|r| Q::from_integer(r.clone()))
    }
}

impl<R: Coeff> FromIterator<(Canon, R)> for LinComb<R> {
    fn from_iter<I: IntoIterator<Item = (Canon, R)>>(it: I) -> Self {
        let mut x = LinComb::new();
        for (k, r) in it {
            x.add_term(k, &r);
        }
        x
    }
}

impl<R: Coeff> fmt::Display for LinComb<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, r)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", r, crate::parse::serialize_diagram(k.diagram()))?;
        }
        Ok(())
    }
}

impl<R: Coeff> fmt::Debug for LinComb<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
