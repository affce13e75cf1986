use num_bigint::BigInt;
use num_traits::One;

use crate::diagram::{Diagram, Port};
use crate::lincomb::LinComb;

/// The three diagrams of the Jacobi relation at the internal edge `e`.
/// With x = (a, b, e) and y = (e, c, d) they are obtained by cycling the
/// half-edges a, b, c; their sum vanishes.
pub fn ihx_diagrams(d: &Diagram, e: (Port, Port)) -> [Diagram; 3] {
    let (p, q) = e;
    assert!(d.is_tri(p.node) && d.is_tri(q.node) && p.node != q.node);
    let (x, y) = (p.node, q.node);
    let xs = |k: u8| Port::new(x, (p.slot + k) % 3);
    let ys = |k: u8| Port::new(y, (q.slot + k) % 3);
    // x reads (a, b, e) and y reads (e, c, d)
    let (ha, hb) = (xs(1), xs(2));
    let hc = ys(1);
    let rewire = |na: Port, nb: Port, nc: Port| {
        let loc = |h: Port| {
            if h == ha {
                na
            } else if h == hb {
                nb
            } else if h == hc {
                nc
            } else {
                h
            }
        };
        let mut out = d.clone();
        for (u, v) in d.edges() {
            out.connect(loc(u), loc(v));
        }
        out
    };
    [
        d.clone(),
        // x = (b, c, e), y = (e, a, d)
        rewire(hc, ha, hb),
        // x = (c, a, e), y = (e, b, d)
        rewire(hb, hc, ha),
    ]
}

pub fn ihx_relation(d: &Diagram, e: (Port, Port)) -> LinComb<BigInt> {
    let mut out = LinComb::new();
    for t in ihx_diagrams(d, e) {
        out.add_diagram(&t, &BigInt::one());
    }
    out
}

/// Relation vectors at every internal edge.
pub fn ihx_triples(d: &Diagram) -> Vec<((Port, Port), LinComb<BigInt>)> {
    d.internal_edges().into_iter().map(|e| (e, ihx_relation(d, e))).collect()
}
