use std::collections::BTreeSet;

use jacobi_core::canon::canonicalize_any;
use jacobi_core::ihx::ihx_relation;
use jacobi_core::linalg::cokernel_structure;
use jacobi_core::lincomb::{q, LinComb, Q};
use jacobi_core::modules::{
    build_presentation, enumerate_generators, has_simple_spine, structure, ModuleCache,
    ModuleStructure, Presentation, SectorSpec,
};
use jacobi_core::{BigInt, Canon, Color, Diagram, Port};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn c(s: &str) -> Color {
    s.parse().unwrap()
}

fn cs(s: &str) -> Vec<Color> {
    s.split(',').filter(|t| !t.is_empty()).map(c).collect()
}

fn module(n: usize, l: usize, colors: &str) -> std::sync::Arc<ModuleStructure> {
    ModuleCache::global().get(&SectorSpec::new(n, l, cs(colors)).unwrap()).unwrap()
}

fn theta(top: &str, mid: &str, bot: &str) -> LinComb<Q> {
    LinComb::single(&Diagram::theta(&cs(top), &cs(mid), &cs(bot)), Q::one())
}

/// Every connected, self-loop-free gluing of `n` trivalent vertices and the
/// given legs, found by pairing half-edges in all possible ways.
fn naive_generators(n: usize, legs: &[Color]) -> BTreeSet<Canon> {
    let mut d = Diagram::new();
    let tri: Vec<u32> = (0..n).map(|_| d.add_tri()).collect();
    let leg_ids: Vec<u32> = legs.iter().map(|&c| d.add_leg(c)).collect();
    let mut halves: Vec<Port> = tri.iter().flat_map(|&v| (0..3).map(move |s| Port::new(v, s))).collect();
    halves.extend(leg_ids.iter().map(|&v| Port::leg(v)));
    let mut used = vec![false; halves.len()];
    let mut out = BTreeSet::new();
    fn go(d: &mut Diagram, halves: &[Port], used: &mut [bool], out: &mut BTreeSet<Canon>) {
        let Some(i) = used.iter().position(|u| !u) else {
            if d.is_connected() && !d.has_self_loop() {
                out.insert(canonicalize_any(d).0);
            }
            return;
        };
        used[i] = true;
        for j in i + 1..halves.len() {
            if used[j] {
                continue;
            }
            let (a, b) = (halves[i], halves[j]);
            let a_leg = !d.is_tri(a.node);
            let b_leg = !d.is_tri(b.node);
            // leg–leg edges are struts and self-loops are zero; both are pruned
            if (a_leg && b_leg) || (!a_leg && a.node == b.node) {
                continue;
            }
            used[j] = true;
            d.connect(a, b);
            go(d, halves, used, out);
            used[j] = false;
        }
        used[i] = false;
    }
    go(&mut d, &halves, &mut used, &mut out);
    out
}

#[test]
fn generator_counts_match_naive_matching() {
    let cases: &[(usize, usize, &str)] = &[
        (1, 0, "1+,1+,2-"),
        (1, 0, "1+,1+,1+"),
        (2, 0, "1+,1-,2+,2-"),
        (2, 0, "1+,1+,1+,1+"),
        (2, 1, "1+,1-"),
        (2, 1, "1+,1+"),
        (2, 2, ""),
        (3, 0, "1+,1+,1-,2+,2-"),
        (3, 1, "1+,1+,1-"),
        (3, 1, "1+,2+,2-"),
        (3, 2, "1+"),
        (4, 2, "1+,1-"),
        (4, 2, "2+,2+"),
        (4, 3, ""),
    ];
    for &(n, l, colors) in cases {
        let spec = SectorSpec::new(n, l, cs(colors)).unwrap();
        let got: BTreeSet<Canon> = enumerate_generators(&spec).into_iter().collect();
        let want = naive_generators(n, &spec.colors);
        assert_eq!(got.len(), want.len(), "sector ({n},{l}; {colors})");
        assert_eq!(got, want, "sector ({n},{l}; {colors})");
    }
}

#[test]
fn y_graph_sector_is_two_torsion() {
    let ms = module(1, 0, "1+,1+,2+");
    assert_eq!((ms.free_rank(), ms.torsion()), (0, vec![BigInt::from(2)]));
    let y = canonicalize_any(&Diagram::tree(&cs("1+,1+,2+"))).0;
    assert!(y.as_symmetric());
    assert_eq!(ms.generators, vec![y.clone()]);
    let one = LinComb::single(y.diagram(), BigInt::one());
    assert!(!ms.is_zero_int(&one).unwrap());
    assert!(LinComb::single(y.diagram(), Q::one()).is_zero());
    let basis = ms.basis();
    assert_eq!(basis.len(), 1);
    assert_eq!(basis[0].0, BigInt::from(2));
    assert_eq!(basis[0].1.get(&y).abs(), BigInt::one());
}

#[test]
fn one_loop_symmetry_is_deduplicated() {
    let spec = SectorSpec::new(2, 1, cs("1+,2+")).unwrap();
    let gens = enumerate_generators(&spec);
    let ab = canonicalize_any(&Diagram::one_loop(&cs("1+,2+"))).0;
    let ba = canonicalize_any(&Diagram::one_loop(&cs("2+,1+"))).0;
    assert_eq!(ab, ba);
    assert!(gens.contains(&ab));
}

#[test]
fn a62_relation_and_generators() {
    let ms = module(6, 2, "1+,1+,1+,1+");
    let mut x = LinComb::single(&Diagram::theta(&cs("1+,1+,1+,1+"), &[], &[]), BigInt::one());
    x.add(&LinComb::single(&Diagram::theta(&cs("1+,1+,1+"), &cs("1+"), &[]), BigInt::from(2)));
    assert!(!x.is_zero());
    assert!(ms.is_zero_int(&x).unwrap());
    let gens = [theta("1+,1+", "1+", "1+"), theta("1+,1+", "", "1+,1+")];
    let rows: Vec<Vec<BigInt>> = gens.iter().map(|g| ms.coords(g).unwrap().iter().map(|v| v.to_integer()).collect()).collect();
    let n = ms.factors.len();
    let mut all = rows.clone();
    for (j, f) in ms.factors.iter().enumerate() {
        if !f.is_zero() {
            let mut r = vec![BigInt::zero(); n];
            r[j] = f.clone();
            all.push(r);
        }
    }
    let ck = cokernel_structure(&jacobi_core::linalg::IntMatrix::with_cols(n, all));
    assert!(ck.free_rank == 0 && ck.torsion.is_empty());
}

#[test]
fn a52_torsion_matches_tree_torsion_at_genus_one() {
    let palettes = ["1+,1+,1+", "1+,1+,1-", "1+,1-,1-", "1-,1-,1-"];
    let mut loop2 = Vec::new();
    let mut tree = Vec::new();
    for colors in palettes {
        loop2.extend(module(5, 2, colors).torsion());
        tree.extend(module(1, 0, colors).torsion());
    }
    assert!(loop2.iter().all(|t| *t == BigInt::from(2)));
    assert_eq!(loop2.len(), tree.len());
    assert_eq!(tree.len(), 4);
}

#[test]
fn three_theta_vanishes_for_two_colors() {
    let ms = module(9, 2, "1+,1+,1+,2+,2+,2+,3+");
    let x = theta("1+,2+,3+", "1+,2+", "1+,2+");
    assert!(ms.is_zero(&x.scaled_int(3)).unwrap());
}

#[test]
fn tensor_vanishing() {
    let ms = module(8, 4, "1+,2+");
    assert_eq!(ms.free_rank(), 2);
    let half = q(1, 2);
    for (j, f) in ms.factors.iter().enumerate() {
        if f.is_zero() {
            let b = ms.basis_element(j).to_rational();
            assert!(ms.is_zero_tensor(&b.scaled(&half), &half).unwrap());
            assert!(!ms.is_zero_tensor(&b.scaled(&q(1, 6)), &half).unwrap());
        }
    }
    assert_eq!(ms.coords(&LinComb::new()).unwrap(), vec![Q::zero(); ms.factors.len()]);
    let a82 = module(8, 2, "1+,1+,1+,1+,1+,2+");
    let x = theta("1+", "1+,1+", "1+,2+,1+").scaled(&half);
    assert!(!a82.is_zero_tensor(&x, &Q::one()).unwrap());
    assert!(a82.is_zero_tensor(&x.scaled_int(2), &Q::one()).unwrap());
}

fn permuted(p: &Presentation, seed: u64) -> Presentation {
    let ng = p.generators.len();
    let mut order: Vec<usize> = (0..ng).collect();
    let mut s = seed;
    let mut next = |m: usize| {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 33) as usize % m
    };
    for i in (1..ng).rev() {
        order.swap(i, next(i + 1));
    }
    let mut pos = vec![0; ng];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let mut relations: Vec<_> = p.relations.iter().map(|r| r.iter().map(|(j, v)| (pos[*j], v.clone())).collect()).collect();
    for i in (1..relations.len()).rev() {
        relations.swap(i, next(i + 1));
    }
    Presentation { spec: p.spec.clone(), generators: order.iter().map(|&i| p.generators[i].clone()).collect(), relations }
}

#[test]
fn structure_ignores_presentation_order() {
    for (n, l, colors) in [(6, 2, "1+,1+,1+,1+"), (6, 2, "1+,1+,2+,2-"), (5, 0, "1+,1+,1+,1+,1-,1-,1-")] {
        let spec = SectorSpec::new(n, l, cs(colors)).unwrap();
        let p = build_presentation(&spec);
        let base = ModuleStructure::from_presentation(&p);
        for seed in 1..4 {
            let other = ModuleStructure::from_presentation(&permuted(&p, seed));
            assert_eq!((base.free_rank(), base.torsion()), (other.free_rank(), other.torsion()));
        }
    }
}

#[test]
fn relabeled_sectors_match_direct_computation() {
    for (std, other) in [("1+,1+,1+,2+", "2-,2-,2-,1+"), ("1+,1+,2+,2+", "1-,2-,1-,2-")] {
        let a = structure(&SectorSpec::new(6, 2, cs(std)).unwrap());
        let b = structure(&SectorSpec::new(6, 2, cs(other)).unwrap());
        let cached = module(6, 2, other);
        assert_eq!((a.free_rank(), a.torsion()), (b.free_rank(), b.torsion()));
        assert_eq!((b.free_rank(), b.torsion()), (cached.free_rank(), cached.torsion()));
        for g in &b.generators {
            let x = LinComb::single(g.diagram(), Q::one());
            assert_eq!(b.is_zero(&x).unwrap(), cached.is_zero(&x).unwrap());
        }
    }
}

#[test]
fn cache_round_trip_on_disk() {
    let dir = std::env::temp_dir().join(format!("jacobi-cache-test-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let spec = SectorSpec::new(6, 2, cs("1+,1+,1+,2+")).unwrap();
    let first = ModuleCache::new(Some(dir.clone())).get(&spec).unwrap();
    let file = dir.join("sector_6_2_3-1.json");
    assert!(file.exists());
    let second = ModuleCache::new(Some(dir.clone())).get(&spec).unwrap();
    assert_eq!(first.factors, second.factors);
    let th = theta("1+,2+", "1+", "1+");
    assert_eq!(first.coords(&th).unwrap(), second.coords(&th).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn simple_spines_span_loop_three_sectors() {
    let ms = module(6, 3, "1+,2+");
    assert!(ms.generators.iter().any(|g| has_simple_spine(g.diagram())));
    assert!(!has_simple_spine(&Diagram::theta(&[], &[], &[])));
}

#[test]
fn as_symmetric_generators_carry_two_torsion_rows() {
    let mut seen = 0;
    for (n, l, colors) in [(4, 1, "1+,1+,1-,2+"), (4, 2, "1+,1-"), (5, 2, "1+,1+,2+"), (6, 2, "1+,1+,1+,2+")] {
        let p = build_presentation(&SectorSpec::new(n, l, cs(colors)).unwrap());
        for (j, g) in p.generators.iter().enumerate() {
            let row = vec![(j, BigInt::from(2))];
            assert_eq!(p.relations.contains(&row), g.as_symmetric(), "({n},{l}; {colors}) generator {j}");
            seen += usize::from(g.as_symmetric());
        }
    }
    assert!(seen > 0);
}

fn sector_generators() -> Vec<(SectorSpec, Canon)> {
    let mut out = Vec::new();
    for (n, l, colors) in [(4, 1, "1+,1+,1-,2+"), (4, 2, "1+,1-"), (5, 2, "1+,1+,2+"), (6, 2, "1+,1+,1+,2+")] {
        let spec = SectorSpec::new(n, l, cs(colors)).unwrap();
        for g in enumerate_generators(&spec) {
            out.push((spec.clone(), g));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn relations_reduce_to_zero(i in 0usize..10_000) {
        let all = sector_generators();
        let (spec, g) = &all[i % all.len()];
        let ms = ModuleCache::global().get(spec).unwrap();
        let d = g.diagram();
        for e in d.internal_edges() {
            prop_assert!(ms.is_zero_int(&ihx_relation(d, e)).unwrap());
        }
    }
}
