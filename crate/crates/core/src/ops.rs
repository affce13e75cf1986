//! Local diagram operations and the composite maps δ₀, δ₁, δ₂.

use std::collections::HashMap;


use crate::color::{Color, Sign};
use crate::diagram::{Diagram, Port};
use crate::lincomb::{q, LinComb, Q};
use crate::Error;

/// A total order on the legs of each color, given as a rank per leg node.
#[derive(Clone, Debug)]
pub struct LegOrder {
    rank: HashMap<u32, usize>,
}

impl LegOrder {
    /// Legs ordered by node index.
    pub fn natural(d: &Diagram) -> LegOrder {
        LegOrder { rank: d.legs().enumerate().map(|(i, v)| (v, i)).collect() }
    }

    /// Order given by an explicit list of leg nodes (earlier = smaller).
    pub fn from_list(d: &Diagram, legs: &[u32]) -> Result<LegOrder, Error> {
        let mut all: Vec<u32> = d.legs().collect();
        let mut given = legs.to_vec();
        all.sort();
        given.sort();
        if all != given {
            return Err(Error::Invalid("leg order must list every leg exactly once".into()));
        }
        Ok(LegOrder { rank: legs.iter().enumerate().map(|(i, &v)| (v, i)).collect() })
    }

    /// u ≺ v: same color and u earlier.
    pub fn less(&self, d: &Diagram, u: u32, v: u32) -> bool {
        d.color(u) == d.color(v) && self.rank[&u] < self.rank[&v]
    }
}

// ---- atomic operations ---------------------------------------------------
// Each returns a new diagram; new vertices read counterclockwise as in the
// defining pictures.

fn leg_color(d: &Diagram, v: u32) -> Color {
    d.color(v).expect("not a leg")
}

/// Leg v becomes a Y carrying ℓ(v) and ℓ(v)*.
pub fn delta_y(d: &Diagram, v: u32) -> Diagram {
    let mut e = d.clone();
    let p = e.leg_port(v);
    let c = leg_color(d, v);
    let y = e.add_tri();
    let n = e.add_leg(c.star());
    e.connect(Port::new(y, 0), Port::leg(n));
    e.connect(Port::new(y, 1), Port::leg(v));
    e.connect(Port::new(y, 2), p);
    e
}

/// Leg v replaced by two vertices with legs i⁺, i⁻ and a second leg of sign `second`.
fn delta_pm(d: &Diagram, v: u32, second: Sign) -> Diagram {
    let i = leg_color(d, v).index;
    let mut e = d.clone();
    let p = e.leg_port(v);
    let a = e.add_tri();
    let b = e.add_tri();
    let a1 = e.add_leg(Color::plus(i));
    let a2 = e.add_leg(Color::minus(i));
    let b1 = e.add_leg(Color::new(i, second));
    e.connect(Port::new(a, 1), Port::leg(a1));
    e.connect(Port::new(a, 2), Port::leg(a2));
    e.connect(Port::new(a, 0), Port::new(b, if second == Sign::Plus { 2 } else { 1 }));
    e.connect(Port::new(b, 0), p);
    e.connect(Port::new(b, if second == Sign::Plus { 1 } else { 2 }), Port::leg(b1));
    e.remove_nodes(&[v])
}

pub fn delta_plus(d: &Diagram, v: u32) -> Diagram {
    delta_pm(d, v, Sign::Plus)
}

pub fn delta_minus(d: &Diagram, v: u32) -> Diagram {
    delta_pm(d, v, Sign::Minus)
}

/// Replaces the vertex carrying leg v by a chain of `k` vertices, each with a
/// leg of color ℓ(v). The leg v itself stays on the first vertex. Returns the
/// new diagram and the chain's leg nodes (v first).
fn multiply_leg(d: &Diagram, v: u32, k: usize) -> (Diagram, Vec<u32>) {
    let p = d.leg_port(v);
    assert!(d.is_tri(p.node), "leg must sit on a trivalent vertex");
    let w = p.node;
    let left = d.other(Port::new(w, (p.slot + 1) % 3));
    let right = d.other(Port::new(w, (p.slot + 2) % 3));
    let c = leg_color(d, v);
    let mut e = d.clone();
    let chain: Vec<u32> = (0..k).map(|_| e.add_tri()).collect();
    let mut legs = vec![v];
    for _ in 1..k {
        legs.push(e.add_leg(c));
    }
    // each chain vertex reads (toward right, leg, toward left)
    for (i, &x) in chain.iter().enumerate() {
        e.connect(Port::new(x, 1), Port::leg(legs[i]));
        if i + 1 < k {
            e.connect(Port::new(x, 0), Port::new(chain[i + 1], 2));
        }
    }
    let fix = |p: Port| if p.node == w { Port::NONE } else { p };
    assert!(!fix(left).is_none() && !fix(right).is_none(), "self-loop at leg vertex");
    e.connect(Port::new(chain[0], 2), left);
    e.connect(Port::new(chain[k - 1], 0), right);
    let e = e.remove_nodes(&[w]);
    // node ids above w shift down by one
    let shift = |x: u32| if x > w { x - 1 } else { x };
    (e, legs.into_iter().map(shift).collect())
}

pub fn delta_double(d: &Diagram, v: u32) -> (Diagram, [u32; 2]) {
    let (e, l) = multiply_leg(d, v, 2);
    (e, [l[0], l[1]])
}

pub fn delta_triple(d: &Diagram, v: u32) -> Diagram {
    multiply_leg(d, v, 3).0
}

/// Legs u, v merged into one vertex carrying a new leg ℓ(v).
pub fn lambda2(d: &Diagram, u: u32, v: u32) -> Diagram {
    let mut e = d.clone();
    let (pu, pv) = (e.leg_port(u), e.leg_port(v));
    assert!(pu.node != v, "cannot merge the two ends of a strut");
    let y = e.add_tri();
    let c = e.add_leg(leg_color(d, v));
    e.connect(Port::new(y, 0), Port::leg(c));
    e.connect(Port::new(y, 1), pu);
    e.connect(Port::new(y, 2), pv);
    e.remove_nodes(&[u, v])
}

/// Legs u, v, w merged into the two trees of the three-leg operation, with a
/// new leg ℓ(v).
pub fn lambda3(d: &Diagram, u: u32, v: u32, w: u32) -> [Diagram; 2] {
    let c = leg_color(d, v);
    let build = |first: bool| {
        let mut e = d.clone();
        let (pu, pv, pw) = (e.leg_port(u), e.leg_port(v), e.leg_port(w));
        let a = e.add_tri();
        let b = e.add_tri();
        let l = e.add_leg(c);
        e.connect(Port::new(a, 0), Port::leg(l));
        if first {
            // a = (c, u, b), b = (a, v, w)
            e.connect(Port::new(a, 1), pu);
            e.connect(Port::new(a, 2), Port::new(b, 0));
            e.connect(Port::new(b, 1), pv);
            e.connect(Port::new(b, 2), pw);
        } else {
            // a = (c, b, w), b = (a, u, v)
            e.connect(Port::new(a, 1), Port::new(b, 0));
            e.connect(Port::new(a, 2), pw);
            e.connect(Port::new(b, 1), pu);
            e.connect(Port::new(b, 2), pv);
        }
        e.remove_nodes(&[u, v, w])
    };
    [build(true), build(false)]
}

/// H-graph on the sites of legs u, v with new legs `cu` over u and `cv` over v.
pub fn h_graph(d: &Diagram, u: u32, v: u32, cu: Color, cv: Color) -> Diagram {
    let mut e = d.clone();
    let (pu, pv) = (e.leg_port(u), e.leg_port(v));
    let l = e.add_tri();
    let r = e.add_tri();
    let lu = e.add_leg(cu);
    let lv = e.add_leg(cv);
    // l = (r, cu, u-site), r = (cv, l, v-site)
    e.connect(Port::new(l, 0), Port::new(r, 1));
    e.connect(Port::new(l, 1), Port::leg(lu));
    e.connect(Port::new(l, 2), pu);
    e.connect(Port::new(r, 0), Port::leg(lv));
    e.connect(Port::new(r, 2), pv);
    e.remove_nodes(&[u, v])
}

/// I-graph on the sites of legs u, v with top legs `a` (left) and `b` (right).
pub fn i_graph(d: &Diagram, u: u32, v: u32, a: Color, b: Color) -> Diagram {
    let mut e = d.clone();
    let (pu, pv) = (e.leg_port(u), e.leg_port(v));
    let t = e.add_tri();
    let bt = e.add_tri();
    let la = e.add_leg(a);
    let lb = e.add_leg(b);
    // t = (b, a, bottom), bottom = (v-site, t, u-site)
    e.connect(Port::new(t, 0), Port::leg(lb));
    e.connect(Port::new(t, 1), Port::leg(la));
    e.connect(Port::new(t, 2), Port::new(bt, 1));
    e.connect(Port::new(bt, 0), pv);
    e.connect(Port::new(bt, 2), pu);
    e.remove_nodes(&[u, v])
}

pub fn h_op(d: &Diagram, u: u32, v: u32) -> Diagram {
    h_graph(d, u, v, leg_color(d, u), leg_color(d, v))
}

pub fn h_prime(d: &Diagram, u: u32, v: u32) -> [Diagram; 2] {
    let cu = leg_color(d, u).with_sign(Sign::Minus);
    let cv = leg_color(d, v).with_sign(Sign::Plus);
    [i_graph(d, u, v, cu, cv), h_graph(d, u, v, cu, cv)]
}

/// Inserts a bubble into the edge (p, q).
pub fn beta(d: &Diagram, p: Port, q: Port) -> Result<Diagram, Error> {
    if d.other(p) != q {
        return Err(Error::Invalid("beta needs an edge".into()));
    }
    let mut e = d.clone();
    let a = e.add_tri();
    let b = e.add_tri();
    // a = (p-side, left, right), b = (q-side, right, left)
    e.connect(Port::new(a, 0), p);
    e.connect(Port::new(b, 0), q);
    e.connect(Port::new(a, 1), Port::new(b, 2));
    e.connect(Port::new(a, 2), Port::new(b, 1));
    Ok(e)
}

/// Orients a leaf pair at vertex y as in the pictures: returns (stem port of
/// y's neighbour, leg read first, leg read second) so that y = (second, first, stem).
fn leaf_pair(d: &Diagram, u: u32, v: u32) -> Result<(Port, u32, u32), Error> {
    let (pu, pv) = (d.leg_port(u), d.leg_port(v));
    if pu.node != pv.node || !d.is_tri(pu.node) {
        return Err(Error::Invalid("not a leaf pair".into()));
    }
    let y = pu.node;
    let s = (0..3u8).find(|&s| s != pu.slot && s != pv.slot).unwrap();
    let stem = d.other(Port::new(y, s));
    // ccw after the stem come the right leg then the left leg
    let right = d.other(Port::new(y, (s + 1) % 3)).node;
    let left = d.other(Port::new(y, (s + 2) % 3)).node;
    Ok((stem, left, right))
}

/// Doubles the Y formed by a leaf pair along the edge below it.
pub fn delta_yy(d: &Diagram, u: u32, v: u32) -> Result<Diagram, Error> {
    let (stem, left, right) = leaf_pair(d, u, v)?;
    if !d.is_tri(stem.node) {
        return Err(Error::Invalid("leaf pair stem must end at a trivalent vertex".into()));
    }
    let (cl, cr) = (leg_color(d, left), leg_color(d, right));
    let y = d.leg_port(u).node;
    let z = stem.node;
    let zl = d.other(Port::new(z, (stem.slot + 2) % 3));
    let zr = d.other(Port::new(z, (stem.slot + 1) % 3));
    // z reads (right, up, left)
    let mut e = d.clone();
    let z1 = e.add_tri();
    let z2 = e.add_tri();
    e.connect(Port::new(z1, 2), zl);
    e.connect(Port::new(z1, 0), Port::new(z2, 2));
    e.connect(Port::new(z2, 0), zr);
    for z in [z1, z2] {
        let yy = e.add_tri();
        let a = e.add_leg(cr);
        let b = e.add_leg(cl);
        e.connect(Port::new(yy, 0), Port::leg(a));
        e.connect(Port::new(yy, 1), Port::leg(b));
        e.connect(Port::new(yy, 2), Port::new(z, 1));
    }
    Ok(e.remove_nodes(&[u, v, y, z]))
}

/// The leaf-pair operation turning Y(ℓ(u), ℓ(v)) into a four-leg comb.
pub fn delta_triple_prime(d: &Diagram, u: u32, v: u32) -> Result<Diagram, Error> {
    let (stem, left, right) = leaf_pair(d, u, v)?;
    let (cu, cv) = (leg_color(d, left), leg_color(d, right));
    let y = d.leg_port(u).node;
    let mut e = d.clone();
    let a = e.add_tri();
    let b = e.add_tri();
    let c = e.add_tri();
    let l1 = e.add_leg(cu);
    let l2 = e.add_leg(cv);
    let l3 = e.add_leg(cu);
    let l4 = e.add_leg(cv);
    // a = (b, ℓ(u), stem), b = (c, ℓ(v), a), c = (end ℓ(v), ℓ(u), b)
    e.connect(Port::new(a, 0), Port::new(b, 2));
    e.connect(Port::new(a, 1), Port::leg(l1));
    e.connect(Port::new(a, 2), stem);
    e.connect(Port::new(b, 0), Port::new(c, 2));
    e.connect(Port::new(b, 1), Port::leg(l2));
    e.connect(Port::new(c, 0), Port::leg(l4));
    e.connect(Port::new(c, 1), Port::leg(l3));
    Ok(e.remove_nodes(&[u, v, y]))
}

// ---- composite maps ------------------------------------------------------

fn legs(d: &Diagram) -> Vec<u32> {
    d.legs().collect()
}

fn check_input(d: &Diagram) -> Result<(), Error> {
    d.validate()?;
    if d.has_self_loop() {
        return Err(Error::Invalid("input has a self-loop".into()));
    }
    for comp in d.components() {
        if comp.iter().all(|&v| !d.is_tri(v)) {
            return Err(Error::Invalid("strut components are not allowed".into()));
        }
    }
    Ok(())
}

pub fn delta0(d: &Diagram, ord: &LegOrder) -> Result<LinComb<Q>, Error> {
    check_input(d)?;
    let mut out = LinComb::new();
    let us = legs(d);
    let (q4, q12, q6) = (q(1, 4), q(1, 12), q(1, 6));
    for (i, &u) in us.iter().enumerate() {
        for &v in &us[i + 1..] {
            out.add_diagram(&delta_y(&delta_y(d, v), u), &q4);
        }
    }
    for &v in &us {
        if leg_color(d, v).is_plus() {
            out.add_diagram(&delta_plus(d, v), &q4);
            out.add_diagram(&delta_minus(d, v), &q12);
        } else {
            out.add_diagram(&delta_plus(d, v), &q12);
        }
    }
    for &u in &us {
        let (e, _) = delta_double(d, u);
        for v in legs(&e) {
            out.add_diagram(&delta_y(&e, v), &q4);
        }
    }
    for (i, &u) in us.iter().enumerate() {
        for &v in &us[i + 1..] {
            // v keeps its node id through delta_double of u only if it is
            // below the removed vertex; track it by position instead
            let (e, _) = delta_double(d, v);
            let u2 = track_leg(d, &e, u, d.leg_port(v).node);
            out.add_diagram(&delta_double(&e, u2).0, &q4);
        }
    }
    for &v in &us {
        out.add_diagram(&delta_triple(d, v), &q6);
    }
    let _ = ord;
    Ok(out)
}

/// Node id of leg `u` of `d` inside a diagram obtained by removing node `gone`.
fn track_leg(_d: &Diagram, _e: &Diagram, u: u32, gone: u32) -> u32 {
    if u > gone {
        u - 1
    } else {
        u
    }
}

pub fn delta1(d: &Diagram, ord: &LegOrder) -> Result<LinComb<Q>, Error> {
    check_input(d)?;
    let mut out = LinComb::new();
    let us = legs(d);
    let (q4, q6, q8) = (q(1, 4), q(1, 6), q(1, 8));
    for &w in &us {
        let e = delta_y(d, w);
        for &u in &us {
            for &v in &us {
                if u != w && v != w && u != v && ord.less(d, u, v) {
                    out.add_diagram(&lambda2(&e, u, v), &q4);
                }
            }
        }
    }
    for &u in &us {
        for &v in &us {
            if u != v && ord.less(d, u, v) {
                if leg_color(d, u).is_plus() {
                    out.add_diagram(&h_op(d, u, v), &q4);
                }
                for t in h_prime(d, u, v) {
                    out.add_diagram(&t, &q6);
                }
            }
        }
    }
    for (i, &u) in us.iter().enumerate() {
        for &v in &us[i + 1..] {
            if leg_color(d, u) == leg_color(d, v).star() {
                out.add_diagram(&h_op(d, u, v), &q4);
            }
        }
    }
    for &v in &us {
        if !leg_color(d, v).is_plus() {
            let p = d.leg_port(v);
            out.add_diagram(&beta(d, Port::leg(v), p)?, &q8);
        }
    }
    for &u in &us {
        let (e, pair) = delta_double(d, u);
        let el = legs(&e);
        for (i, &v) in el.iter().enumerate() {
            for &w in &el[i + 1..] {
                if leg_color(&e, v) != leg_color(&e, w) {
                    continue;
                }
                // the two legs made at u carry the same label and are never merged
                if (v == pair[0] && w == pair[1]) || (v == pair[1] && w == pair[0]) {
                    continue;
                }
                out.add_diagram(&lambda2(&e, v, w), &q4);
            }
        }
    }
    Ok(out)
}

pub fn delta2(d: &Diagram, ord: &LegOrder) -> Result<LinComb<Q>, Error> {
    check_input(d)?;
    let mut out = LinComb::new();
    let us = legs(d);
    let (q4, q6) = (q(1, 4), q(1, 6));
    let pairs: Vec<(u32, u32)> = us
        .iter()
        .flat_map(|&u| us.iter().map(move |&v| (u, v)))
        .filter(|&(u, v)| u != v && ord.less(d, u, v))
        .collect();
    for (i, &(u, v)) in pairs.iter().enumerate() {
        for &(u2, v2) in &pairs[i + 1..] {
            if [u2, v2].contains(&u) || [u2, v2].contains(&v) {
                continue;
            }
            // lambda2 removes u2, v2 and appends; shift ids of u, v
            let e = lambda2(d, u2, v2);
            let sh = |x: u32| x - [u2, v2].iter().filter(|&&y| y < x).count() as u32;
            out.add_diagram(&lambda2(&e, sh(u), sh(v)), &q4);
        }
    }
    for &u in &us {
        for &v in &us {
            for &w in &us {
                if u != v && v != w && u != w && ord.less(d, u, v) && ord.less(d, v, w) {
                    for t in lambda3(d, u, v, w) {
                        out.add_diagram(&t, &q6);
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn delta_sum(d: &Diagram, ord: &LegOrder) -> Result<LinComb<Q>, Error> {
    let mut s = delta0(d, ord)?;
    s.add(&delta1(d, ord)?);
    s.add(&delta2(d, ord)?);
    Ok(s)
}

/// (−1)^{b₁+1}(δ₀ + δ₁ + δ₂)(J) for connected J, computed over ℚ; reduce
/// modulo ½ℤ to read it in the target group.
pub fn zbb_of_surgery(d: &Diagram, ord: &LegOrder) -> Result<LinComb<Q>, Error> {
    if !d.is_connected() {
        return Err(Error::Invalid("zbb of surgery needs a connected diagram".into()));
    }
    let s = delta_sum(d, ord)?;
    Ok(if d.b1() % 2 == 0 { s.neg() } else { s })
}

/// The value for a possibly disconnected J including the corrections from
/// its i-deg 1 components.
pub fn zbb_of_bracket(d: &Diagram, ord: &LegOrder) -> Result<LinComb<Q>, Error> {
    let mut s = delta_sum(d, ord)?;
    s.add(&bracket_corrections(d, ord)?);
    Ok(s)
}

/// Σ_Y (¼δ^Y(J⊔Y) + ¼λ(J⊔Y) + (1/3!)J⊔Y⊔Y + ¼δ^{||}(J⊔Y)) over i-deg 1
/// components Y of J.
pub fn bracket_corrections(d: &Diagram, ord: &LegOrder) -> Result<LinComb<Q>, Error> {
    check_input(d)?;
    let mut out = LinComb::new();
    let (q4, q6) = (q(1, 4), q(1, 6));
    for comp in d.components() {
        if comp.iter().filter(|&&v| d.is_tri(v)).count() != 1 {
            continue;
        }
        let y = d.subdiagram(&comp);
        let e = d.disjoint_union(&y);
        let n = d.len() as u32;
        // the appended copy occupies ids n.., mirror the order on it
        let mut ranks: Vec<(usize, u32)> = Vec::new();
        for v in e.legs() {
            let orig = if v < n { v } else { comp[(v - n) as usize] };
            ranks.push((2 * ord.rank[&orig] + usize::from(v >= n), v));
        }
        ranks.sort();
        let eo = LegOrder::from_list(&e, &ranks.iter().map(|x| x.1).collect::<Vec<_>>())?;
        let el = legs(&e);
        for &v in &el {
            out.add_diagram(&delta_y(&e, v), &q4);
            out.add_diagram(&delta_double(&e, v).0, &q4);
        }
        for &u in &el {
            for &v in &el {
                if u != v && eo.less(&e, u, v) {
                    out.add_diagram(&lambda2(&e, u, v), &q4);
                }
            }
        }
        out.add_diagram(&e.disjoint_union(&y), &q6);
    }
    Ok(out)
}

/// The part of a combination with first Betti number (per component sum) `l`.
pub fn loop_part(x: &LinComb<Q>, l: usize) -> LinComb<Q> {
    x.filter(|k| k.diagram().b1() == l)
}

/// Half the sum θ(a;;a,a,b,a,a) + θ(a,a;a;a,b,a) + θ(a,a,a,a;a;b) + θ(a,a,a,a,a;;b),
/// an element of the (8,2) sector with legs {a⁵, b}.
pub fn eq_aaaaab(a: Color, b: Color) -> Result<LinComb<Q>, Error> {
    if a == b {
        return Err(Error::Invalid("eq_aaaaab needs distinct colors".into()));
    }
    let terms = [
        Diagram::theta(&[a], &[], &[a, a, b, a, a]),
        Diagram::theta(&[a, a], &[a], &[a, b, a]),
        Diagram::theta(&[a, a, a, a], &[a], &[b]),
        Diagram::theta(&[a, a, a, a, a], &[], &[b]),
    ];
    let mut out = LinComb::new();
    for d in &terms {
        out.add_diagram(d, &q(1, 2));
    }
    Ok(out)
}
