//! The sl₂ weight system on closed diagrams.
//!
//! Vertices carry the structure tensor ε_{ijk} in the basis where
//! [e_i, e_j] = ε_{ijk} e_k, edges carry δ_{ij}. A closed trivalent diagram
//! with V vertices is then scaled by normalization()^{V/2}, the constant fixed
//! by the planar triangular prism evaluating to −6.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::diagram::{Diagram, Port};
use crate::lincomb::{q, LinComb, Q};
use crate::Error;

/// Factor per pair of vertices. The raw prism contraction is already −6.
pub fn normalization() -> Q {
    q(1, 1)
}

fn eps(a: u8, b: u8, c: u8) -> i64 {
    if a == b || b == c || a == c {
        0
    } else if (b + 3 - a) % 3 == 1 {
        1
    } else {
        -1
    }
}

/// Full contraction of ε tensors along the edges, without normalization.
pub fn raw_contraction(d: &Diagram) -> Result<BigInt, Error> {
    if d.n_legs() > 0 {
        return Err(Error::Invalid("weight system needs a closed diagram".into()));
    }
    let tri: Vec<u32> = d.tri_nodes().collect();
    let edges = d.edges();
    let mut edge_of = vec![[usize::MAX; 3]; d.len()];
    for (k, (p, q)) in edges.iter().enumerate() {
        edge_of[p.node as usize][p.slot as usize] = k;
        edge_of[q.node as usize][q.slot as usize] = k;
    }
    let mut label = vec![u8::MAX; edges.len()];
    let mut total = BigInt::zero();
    search(&tri, 0, &edge_of, &mut label, 1, &mut total);
    Ok(total)
}

fn search(tri: &[u32], i: usize, edge_of: &[[usize; 3]], label: &mut [u8], acc: i64, total: &mut BigInt) {
    if i == tri.len() {
        *total += acc;
        return;
    }
    let ports = edge_of[tri[i] as usize];
    let free: Vec<usize> = (0..3).filter(|&s| label[ports[s]] == u8::MAX).collect();
    // a self-loop puts one edge on two slots; its labels then coincide and ε vanishes
    let mut uniq = free.iter().map(|&s| ports[s]).collect::<Vec<_>>();
    uniq.dedup();
    let n = uniq.len();
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        for &e in &uniq {
            label[e] = (c % 3) as u8;
            c /= 3;
        }
        let s = eps(label[ports[0]], label[ports[1]], label[ports[2]]);
        if s != 0 {
            search(tri, i + 1, edge_of, label, acc * s, total);
        }
    }
    for &e in &uniq {
        label[e] = u8::MAX;
    }
}

/// The normalized weight of a closed diagram.
pub fn sl2_weight(d: &Diagram) -> Result<Q, Error> {
    let raw = raw_contraction(d)?;
    let v = d.i_deg();
    let mut f = Q::one();
    for _ in 0..v / 2 {
        f *= normalization();
    }
    Ok(Q::from_integer(raw) * f)
}

/// The weight extended linearly.
pub fn sl2_weight_comb(x: &LinComb<Q>) -> Result<Q, Error> {
    let mut s = Q::zero();
    for (k, r) in x.iter() {
        s += sl2_weight(k.diagram())? * r;
    }
    Ok(s)
}

/// The 1-skeleton of the triangular prism: two triangles joined by three rungs.
pub fn prism() -> Diagram {
    let mut d = Diagram::default();
    let v: Vec<u32> = (0..6).map(|_| d.add_tri()).collect();
    // top triangle v0 v1 v2, bottom v3 v4 v5, rung vi – v(i+3)
    for i in 0..3 {
        let (a, b) = (v[i], v[(i + 1) % 3]);
        d.connect(Port::new(a, 1), Port::new(b, 2));
        let (a, b) = (v[3 + i], v[3 + (i + 1) % 3]);
        d.connect(Port::new(a, 2), Port::new(b, 1));
        d.connect(Port::new(v[i], 0), Port::new(v[3 + i], 0));
    }
    d
}

/// K_{3,3} with vertex i of one side joined to vertex j of the other on slot j.
pub fn k33() -> Diagram {
    let mut d = Diagram::default();
    let a: Vec<u32> = (0..3).map(|_| d.add_tri()).collect();
    let b: Vec<u32> = (0..3).map(|_| d.add_tri()).collect();
    for i in 0..3 {
        for j in 0..3 {
            d.connect(Port::new(a[i], j as u8), Port::new(b[j], i as u8));
        }
    }
    d
}
