use jacobi_core::ihx::ihx_diagrams;
use jacobi_core::lincomb::{q, reduce_mod, LinComb, Q};
use jacobi_core::modules::{is_zero_tensor_all, ModuleCache, SectorSpec};
use jacobi_core::ops::{
    bracket_corrections, delta0, delta1, delta2, eq_aaaaab, loop_part, zbb_of_bracket, zbb_of_surgery, LegOrder,
};
use jacobi_core::parse::{parse, parse_diagram, Bindings};
use jacobi_core::{Color, Diagram};
use proptest::prelude::*;

type Delta = fn(&Diagram, &LegOrder) -> Result<LinComb<Q>, jacobi_core::Error>;
const DELTAS: [(usize, Delta); 3] = [(0, delta0), (1, delta1), (2, delta2)];

fn cs(s: &str) -> Vec<Color> {
    s.split(',').filter(|t| !t.is_empty()).map(|t| t.parse().unwrap()).collect()
}

fn color() -> impl Strategy<Value = Color> {
    prop_oneof![Just("1+"), Just("1-"), Just("2+"), Just("2-")].prop_map(|s| s.parse().unwrap())
}

fn diagram() -> impl Strategy<Value = Diagram> {
    prop_oneof![
        prop::collection::vec(color(), 3..6).prop_map(|cs| Diagram::tree(&cs)),
        prop::collection::vec(color(), 2..5).prop_map(|cs| Diagram::one_loop(&cs)),
        (prop::collection::vec(color(), 0..2), prop::collection::vec(color(), 0..2), prop::collection::vec(color(), 1..2))
            .prop_map(|(a, b, c)| Diagram::theta(&a, &b, &c)),
    ]
}

fn half_zero(x: &LinComb<Q>) -> bool {
    is_zero_tensor_all(ModuleCache::global(), x, &q(1, 2)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn each_delta_raises_degrees(d in diagram()) {
        let ord = LegOrder::natural(&d);
        for (k, f) in DELTAS {
            for (t, _) in f(&d, &ord).unwrap().iter() {
                let e = t.diagram();
                prop_assert_eq!(e.i_deg(), d.i_deg() + 2);
                prop_assert_eq!(e.b1(), d.b1() + k);
                prop_assert!(e.is_connected());
            }
        }
    }

    #[test]
    fn reversing_a_vertex_negates_each_delta(d in diagram(), pick in 0usize..32) {
        let ord = LegOrder::natural(&d);
        let v = d.tri_nodes().nth(pick % d.i_deg()).unwrap();
        let mut r = d.clone();
        r.reverse(v);
        let ord_r = LegOrder::natural(&r);
        for (k, f) in DELTAS {
            let mut s = f(&d, &ord).unwrap();
            s.add(&f(&r, &ord_r).unwrap());
            // δ₀ and δ₁ build new vertices whose orientation is read off the
            // old ones, so they negate only modulo ½ after AS and IHX
            if k < 2 {
                if d.b1() <= 1 {
                    prop_assert!(half_zero(&s));
                }
            } else {
                prop_assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn delta0_ignores_leg_order(d in diagram()) {
        let mut rev: Vec<u32> = d.legs().collect();
        rev.reverse();
        let a = delta0(&d, &LegOrder::natural(&d)).unwrap();
        let b = delta0(&d, &LegOrder::from_list(&d, &rev).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn delta_sum_is_invariant_modulo_half(
        colors in prop::collection::vec(prop_oneof![Just("1+"), Just("1-"), Just("2+")], 3..5),
        shape in 0usize..2,
    ) {
        let colors: Vec<Color> = colors.iter().map(|s| s.parse().unwrap()).collect();
        let d = if shape == 0 { Diagram::tree(&colors) } else { Diagram::one_loop(&colors) };
        let nat = LegOrder::natural(&d);
        let mut rev: Vec<u32> = d.legs().collect();
        rev.reverse();
        let rev = LegOrder::from_list(&d, &rev).unwrap();
        for (_, f) in DELTAS {
            let mut x = f(&d, &nat).unwrap();
            x.sub(&f(&d, &rev).unwrap());
            prop_assert!(half_zero(&x));
            for e in d.internal_edges() {
                let mut s = LinComb::new();
                for t in ihx_diagrams(&d, e) {
                    if !t.has_self_loop() {
                        s.add(&f(&t, &LegOrder::natural(&t)).unwrap());
                    }
                }
                prop_assert!(half_zero(&s));
            }
        }
    }
}

#[test]
fn example_delta2_and_delta0() {
    let b = Bindings::new();
    let j = parse_diagram("T(1+,2+,2-,1+)", &b).unwrap();
    let ord = LegOrder::natural(&j);
    assert!(half_zero(&delta2(&j, &ord).unwrap()));
    let mut d0 = delta0(&j, &ord).unwrap();
    d0.sub(
        &parse(
            "1/4*T(2-,1-,1+,1+,1-,2+) + 1/12*T(2-,1-,1-,1+,1+,2+) + 1/12*T(2-,1-,1+,1-,1+,2+) \
             + 1/4*T(1-,1+,1+,1+,2+,2-) + 1/12*T(2-,1+,1-,1+,1-,2+) + 1/12*T(2-,1+,1+,1-,1-,2+) \
             - 1/12*T(2-,1+,1-,1-,1+,2+) + 1/12*T(2-,1+,1+,1+,1+,2+) + 1/6*T(1+,2-,2-,2+,2-,1+) \
             + 1/4*T(1+,2-,2+,2+,2-,1+) + 1/6*T(1+,2+,2-,2+,2+,1+)",
            &b,
        )
        .unwrap(),
    );
    assert!(half_zero(&d0));
}

#[test]
fn surgery_sign_follows_loop_parity() {
    let t = Diagram::tree(&cs("1+,2+,1-"));
    let o = Diagram::one_loop(&cs("1+,2+"));
    for (d, flip) in [(&t, true), (&o, false)] {
        let ord = LegOrder::natural(d);
        let mut s = delta0(d, &ord).unwrap();
        s.add(&delta1(d, &ord).unwrap());
        s.add(&delta2(d, &ord).unwrap());
        let z = zbb_of_surgery(d, &ord).unwrap();
        assert_eq!(z, if flip { s.neg() } else { s });
    }
    assert!(zbb_of_surgery(&t.disjoint_union(&o), &LegOrder::natural(&t.disjoint_union(&o))).is_err());
}

#[test]
fn bracket_corrections_come_from_tree_components_only() {
    let o = Diagram::one_loop(&cs("1+,2+"));
    let ord = LegOrder::natural(&o);
    assert!(bracket_corrections(&o, &ord).unwrap().is_zero());
    let y = Diagram::tree(&cs("1+,2+,2-"));
    let j = o.disjoint_union(&y);
    let jo = LegOrder::natural(&j);
    let c = bracket_corrections(&j, &jo).unwrap();
    assert!(!c.is_zero());
    for (k, _) in c.iter() {
        let e = k.diagram();
        assert_eq!(e.i_deg(), j.i_deg() + 2);
        assert!((2..=4).contains(&e.components().len()));
    }
    let mut s = delta0(&j, &jo).unwrap();
    s.add(&delta1(&j, &jo).unwrap());
    s.add(&delta2(&j, &jo).unwrap());
    s.add(&c);
    assert_eq!(zbb_of_bracket(&j, &jo).unwrap(), s);
}

#[test]
fn loop_part_filters_by_betti_number() {
    let b = Bindings::new();
    let x = parse("1/2*T(1+,2+,1-) + 1/3*O(1+,2+)", &b).unwrap();
    assert_eq!(loop_part(&x, 1), parse("1/3*O(1+,2+)", &b).unwrap());
    assert_eq!(loop_part(&x, 0).len(), 1);
    assert!(loop_part(&x, 2).is_zero());
}

#[test]
fn reduction_modulo_half() {
    let h = q(1, 2);
    assert_eq!(reduce_mod(&q(-1, 3), &h), q(1, 6));
    assert_eq!(reduce_mod(&q(5, 4), &h), q(1, 4));
    assert_eq!(reduce_mod(&q(1, 2), &h), q(0, 1));
}

#[test]
fn eq_aaaaab_needs_distinct_colors() {
    let a: Color = "1+".parse().unwrap();
    let b: Color = "2+".parse().unwrap();
    assert!(eq_aaaaab(a, a).is_err());
    let x = eq_aaaaab(a, b).unwrap();
    let spec = SectorSpec::new(8, 2, cs("1+,1+,1+,1+,1+,2+")).unwrap();
    for (k, _) in x.iter() {
        assert_eq!(SectorSpec::of(k.diagram()), spec);
    }
    assert!(is_zero_tensor_all(ModuleCache::global(), &x.scaled_int(2), &Q::from_integer(1.into())).unwrap());
}
