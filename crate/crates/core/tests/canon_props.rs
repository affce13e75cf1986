use std::collections::HashMap;

use jacobi_core::diagram::{DiagramJson, Node};
use jacobi_core::parse::{parse, parse_diagram, serialize_diagram, Bindings};
use jacobi_core::{canonicalize, Color, Diagram, Port};
use proptest::prelude::*;

fn color() -> impl Strategy<Value = Color> {
    prop_oneof![Just("1+"), Just("1-"), Just("2+"), Just("2-")].prop_map(|s| s.parse().unwrap())
}

/// Small connected diagrams built from the named shapes.
fn diagram() -> impl Strategy<Value = Diagram> {
    prop_oneof![
        prop::collection::vec(color(), 3..7).prop_map(|cs| Diagram::tree(&cs)),
        prop::collection::vec(color(), 1..6).prop_map(|cs| Diagram::one_loop(&cs)),
        (prop::collection::vec(color(), 0..3), prop::collection::vec(color(), 0..3), prop::collection::vec(color(), 0..3))
            .prop_map(|(a, b, c)| Diagram::theta(&a, &b, &c)),
    ]
}

/// An isomorphic copy: half-edge ids permuted, vertex and edge lists
/// shuffled, each vertex triple rotated.
fn relabel(d: &Diagram, seed: &[u32]) -> Diagram {
    let j = d.to_json();
    let mut ids: Vec<i64> = j.tri.iter().flatten().copied().chain(j.uni.iter().map(|u| u.0)).collect();
    ids.sort();
    let mut perm = ids.clone();
    let mut k = 0usize;
    let mut next = || {
        k += 1;
        seed[k % seed.len()] as usize + k
    };
    for i in (1..perm.len()).rev() {
        perm.swap(i, next() % (i + 1));
    }
    let map: HashMap<i64, i64> = ids.iter().copied().zip(perm.iter().map(|x| x * 7 + 3)).collect();
    let mut tri: Vec<[i64; 3]> = j
        .tri
        .iter()
        .map(|t| {
            let r = next() % 3;
            [map[&t[r]], map[&t[(r + 1) % 3]], map[&t[(r + 2) % 3]]]
        })
        .collect();
    let mut uni: Vec<(i64, Color)> = j.uni.iter().map(|(h, c)| (map[h], *c)).collect();
    let mut edges: Vec<[i64; 2]> =
        j.edges.iter().map(|[a, b]| if next() % 2 == 0 { [map[a], map[b]] } else { [map[b], map[a]] }).collect();
    for i in (1..tri.len()).rev() {
        tri.swap(i, next() % (i + 1));
    }
    for i in (1..uni.len()).rev() {
        uni.swap(i, next() % (i + 1));
    }
    for i in (1..edges.len()).rev() {
        edges.swap(i, next() % (i + 1));
    }
    Diagram::from_json(&DiagramJson { tri, uni, edges }).unwrap()
}

/// AS-symmetry by brute force: an automorphism reversing an odd number of
/// cyclic orders. Tries every vertex bijection with every slot map.
fn as_symmetric_brute(d: &Diagram) -> bool {
    let tri: Vec<u32> = d.tri_nodes().collect();
    let legs: Vec<u32> = d.legs().collect();
    let slot_maps: [([u8; 3], bool); 6] =
        [([0, 1, 2], false), ([1, 2, 0], false), ([2, 0, 1], false), ([0, 2, 1], true), ([2, 1, 0], true), ([1, 0, 2], true)];
    let mut found = false;
    permute(&tri, &mut |tp| {
        permute(&legs, &mut |lp| {
            if legs.iter().zip(lp).any(|(a, b)| d.color(*a) != d.color(*b)) {
                return;
            }
            let mut node_map = HashMap::new();
            for (a, b) in tri.iter().zip(tp).chain(legs.iter().zip(lp)) {
                node_map.insert(*a, *b);
            }
            let n = tri.len();
            let mut choice = vec![0usize; n];
            loop {
                let port = |p: Port| -> Port {
                    match d.node(p.node) {
                        Node::Tri => {
                            let i = tri.iter().position(|&v| v == p.node).unwrap();
                            Port::new(node_map[&p.node], slot_maps[choice[i]].0[p.slot as usize])
                        }
                        Node::Leg(_) => Port::leg(node_map[&p.node]),
                    }
                };
                let ok = d.edges().iter().all(|&(p, q)| d.other(port(p)) == port(q));
                let odd = choice.iter().filter(|&&c| slot_maps[c].1).count() % 2 == 1;
                if ok && odd {
                    found = true;
                    return;
                }
                let mut i = 0;
                while i < n && choice[i] == 5 {
                    choice[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
                choice[i] += 1;
            }
        });
    });
    found
}

fn permute(items: &[u32], f: &mut dyn FnMut(&[u32])) {
    fn go(v: &mut Vec<u32>, k: usize, f: &mut dyn FnMut(&[u32])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            go(v, k + 1, f);
            v.swap(k, i);
        }
    }
    go(&mut items.to_vec(), 0, f);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn isomorphic_copies_share_canonical_form(d in diagram(), seed in prop::collection::vec(0u32..1000, 1..8)) {
        prop_assume!(!d.has_self_loop());
        let e = relabel(&d, &seed);
        let (k1, s1) = canonicalize(&d).unwrap();
        let (k2, s2) = canonicalize(&e).unwrap();
        prop_assert_eq!(&k1, &k2);
        if !k1.as_symmetric() {
            prop_assert_eq!(s1, s2);
        }
    }

    #[test]
    fn reversing_a_vertex_negates(d in diagram(), pick in 0usize..64) {
        prop_assume!(!d.has_self_loop());
        let tri: Vec<u32> = d.tri_nodes().collect();
        let v = tri[pick % tri.len()];
        let mut r = d.clone();
        r.reverse(v);
        let (k1, s1) = canonicalize(&d).unwrap();
        let (k2, s2) = canonicalize(&r).unwrap();
        prop_assert_eq!(&k1, &k2);
        if !k1.as_symmetric() {
            prop_assert_eq!(s1, -s2);
        }
    }

    #[test]
    fn canonicalization_is_idempotent(d in diagram()) {
        prop_assume!(!d.has_self_loop());
        let (k, _) = canonicalize(&d).unwrap();
        let (k2, s2) = canonicalize(k.diagram()).unwrap();
        prop_assert_eq!(&k, &k2);
        prop_assert_eq!(s2, 1);
    }

    #[test]
    fn serialize_then_parse_is_identity(d in diagram()) {
        prop_assume!(!d.has_self_loop());
        let (k, _) = canonicalize(&d).unwrap();
        let text = serialize_diagram(k.diagram());
        let back = parse_diagram(&text, &Bindings::new()).unwrap();
        prop_assert_eq!(canonicalize(&back).unwrap(), (k.clone(), 1));
        let lc = parse(&text, &Bindings::new()).unwrap();
        prop_assert_eq!(lc.len(), usize::from(!k.as_symmetric()));
    }

    #[test]
    fn degrees_survive_canonicalization(d in diagram()) {
        prop_assume!(!d.has_self_loop());
        let (k, _) = canonicalize(&d).unwrap();
        let c = k.diagram();
        prop_assert_eq!(c.i_deg(), d.i_deg());
        prop_assert_eq!(c.deg(), d.deg());
        prop_assert_eq!(c.b1(), d.b1());
        prop_assert_eq!(d.b1(), d.b1_spanning());
        let mut lc = c.leg_colors();
        let mut ld = d.leg_colors();
        lc.sort();
        ld.sort();
        prop_assert_eq!(lc, ld);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn as_symmetry_matches_brute_force(
        top in prop::collection::vec(color(), 0..2),
        mid in prop::collection::vec(color(), 0..2),
        bot in prop::collection::vec(color(), 0..2),
    ) {
        let d = Diagram::theta(&top, &mid, &bot);
        prop_assume!(!d.has_self_loop());
        let (k, _) = canonicalize(&d).unwrap();
        prop_assert_eq!(k.as_symmetric(), as_symmetric_brute(&d));
    }
}

#[test]
fn as_symmetry_examples() {
    let a: Color = "1+".parse().unwrap();
    let bare = Diagram::theta(&[], &[], &[]);
    assert!(!canonicalize(&bare).unwrap().0.as_symmetric());
    assert!(!as_symmetric_brute(&bare));
    let two = Diagram::theta(&[a, a], &[], &[]);
    assert_eq!(canonicalize(&two).unwrap().0.as_symmetric(), as_symmetric_brute(&two));
    for s in ["T(1+,1+,1+)", "O(1+,1+)", "T(1+,2+,1+)", "O(1+,2+,1+,2+)"] {
        let d = parse_diagram(s, &Bindings::new()).unwrap();
        assert_eq!(canonicalize(&d).unwrap().0.as_symmetric(), as_symmetric_brute(&d), "{s}");
    }
}

#[test]
fn parsed_shapes_have_expected_degrees() {
    let b = Bindings::new();
    let t = parse_diagram("T(1+,1+,2-)", &b).unwrap();
    assert_eq!((t.i_deg(), t.b1()), (1, 0));
    let o = parse_diagram("O(1+,2+)", &b).unwrap();
    assert_eq!((o.i_deg(), o.b1(), o.n_legs()), (2, 1, 2));
    let th = parse_diagram("theta(1+,2+;1+;1+)", &b).unwrap();
    assert_eq!((th.i_deg(), th.b1(), th.n_legs()), (6, 2, 4));
    let a: Color = "1+".parse().unwrap();
    let bb: Color = "2+".parse().unwrap();
    assert_eq!(canonicalize(&th).unwrap().0, canonicalize(&Diagram::theta(&[a, bb], &[a], &[a])).unwrap().0);
}
