use jacobi_core::ihx::ihx_relation;
use jacobi_core::lincomb::Q;
use jacobi_core::modules::{enumerate_generators, SectorSpec};
use jacobi_core::sl2::{k33, prism, raw_contraction, sl2_weight, sl2_weight_comb};
use jacobi_core::{BigInt, Canon, Diagram};
use num_traits::Zero;
use proptest::prelude::*;

/// Sum over every labeling of the edges by {0,1,2} of the product of Levi-Civita
/// symbols read in each vertex's cyclic order.
fn brute_weight(d: &Diagram) -> BigInt {
    let edges = d.edges();
    let idx = |node: u32, slot: u8| edges.iter().position(|(p, q)| (p.node, p.slot) == (node, slot) || (q.node, q.slot) == (node, slot)).unwrap();
    let tri: Vec<[usize; 3]> = d.tri_nodes().map(|v| [idx(v, 0), idx(v, 1), idx(v, 2)]).collect();
    let levi = |a: usize, b: usize, c: usize| -> i64 {
        match (a, b, c) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
            _ => 0,
        }
    };
    let mut total = 0i64;
    for code in 0..3usize.pow(edges.len() as u32) {
        let lab: Vec<usize> = (0..edges.len()).map(|k| code / 3usize.pow(k as u32) % 3).collect();
        total += tri.iter().map(|t| levi(lab[t[0]], lab[t[1]], lab[t[2]])).product::<i64>();
    }
    BigInt::from(total)
}

fn closed_generators() -> Vec<Canon> {
    [(2, 2), (4, 3), (6, 4)].iter().flat_map(|&(n, l)| enumerate_generators(&SectorSpec::new(n, l, vec![]).unwrap())).collect()
}

#[test]
fn small_closed_weights() {
    assert_eq!(sl2_weight(&prism()).unwrap(), Q::from_integer((-6).into()));
    assert_eq!(brute_weight(&prism()), BigInt::from(-6));
    let th = Diagram::theta(&[], &[], &[]);
    assert_eq!(raw_contraction(&th).unwrap().magnitude(), &6u32.into());
    assert_eq!(raw_contraction(&th).unwrap(), brute_weight(&th));
    assert_eq!(raw_contraction(&k33()).unwrap(), brute_weight(&k33()));
    assert_eq!(sl2_weight(&k33()).unwrap(), Q::zero());
}

#[test]
fn search_matches_brute_force_on_generators() {
    let gens = closed_generators();
    assert!(gens.len() > 5);
    for g in gens {
        assert_eq!(raw_contraction(g.diagram()).unwrap(), brute_weight(g.diagram()));
    }
}

#[test]
fn open_diagrams_are_rejected() {
    let c = "1+".parse().unwrap();
    assert!(sl2_weight(&Diagram::tree(&[c, c, c])).is_err());
}

#[test]
fn weight_is_multiplicative() {
    let th = Diagram::theta(&[], &[], &[]);
    let w = |d: &Diagram| sl2_weight(d).unwrap();
    assert_eq!(w(&th.disjoint_union(&prism())), w(&th) * w(&prism()));
    assert_eq!(w(&th.disjoint_union(&th)), w(&th) * w(&th));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_respects_as_and_ihx(i in 0usize..1000, pick in 0usize..16) {
        let gens = closed_generators();
        let g = &gens[i % gens.len()];
        let d = g.diagram();
        let v = d.tri_nodes().nth(pick % d.i_deg()).unwrap();
        let mut r = d.clone();
        r.reverse(v);
        prop_assert_eq!(sl2_weight(&r).unwrap(), -sl2_weight(d).unwrap());
        for e in d.internal_edges() {
            prop_assert_eq!(sl2_weight_comb(&ihx_relation(d, e).to_rational()).unwrap(), Q::zero());
        }
    }
}
