use finecurve::exactgeom::{rat, LocalKind, RatPoint, Rational};
use finecurve::graph::Graph;
use finecurve::shell::{emit_graph6, parse_graph6};
use finecurve::surfaces::{build_surface, intersection_report, Curve, CurveSystem, SurfaceSpec};
use num_bigint::BigInt;
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(move |bits| {
            let mut g = Graph::empty(n);
            let mut k = 0;
            for j in 1..n {
                for i in 0..j {
                    if bits[k] {
                        g.add_edge(i, j);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

/// `num / 10^30`.
fn tiny(num: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(10).pow(30))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn graph6_round_trip(g in graph_strategy(62)) {
        let text = emit_graph6(&g);
        let back = parse_graph6(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(emit_graph6(&back), text);
    }

    /// A flat finger tip on a vertical curve overlaps it; moving the tip by a
    /// 10^-30-scale rational either clears it or crosses twice.
    #[test]
    fn tiny_perturbations_change_counts_exactly(
        xa in 2i64..8,
        ya in 1i64..4,
        yb in 6i64..9,
        d in 1i64..1_000_000,
    ) {
        let x = rat(xa, 10);
        let base = rat(xa + 1, 10);
        let finger = |tip: Rational| {
            Curve::base(1, vec![
                RatPoint::new(base.clone(), rat(0, 1)),
                RatPoint::new(base.clone(), rat(ya, 10)),
                RatPoint::new(tip.clone(), rat(ya + 1, 10)),
                RatPoint::new(tip, rat(yb, 10)),
                RatPoint::new(base.clone(), rat(yb + 1, 10)),
                RatPoint::new(base.clone(), rat(1, 1)),
            ])
        };
        let count = |tip: Rational| {
            let sys = CurveSystem::new(
                build_surface(SurfaceSpec::Torus).unwrap(),
                vec![Curve::vertical(0, x.clone()), finger(tip)],
            ).unwrap();
            intersection_report(&sys, 0, 1).unwrap()
        };

        let on = count(x.clone());
        prop_assert!(on.cardinality.finite().is_none());
        let clear = count(&x + tiny(d));
        prop_assert_eq!(clear.cardinality.finite(), Some(0));
        let past = count(&x - tiny(d));
        prop_assert_eq!(past.cardinality.finite(), Some(2));
        prop_assert!(past.points.iter().all(|p| p.kind == LocalKind::Crossing));
    }

    #[test]
    fn tiny_perturbations_of_a_wedge_tip(xa in 2i64..8, ya in 1i64..8, d in 1i64..1_000_000) {
        let x = rat(xa, 10);
        let base = rat(xa + 1, 10);
        let count = |tip: Rational| {
            let wedge = Curve::base(1, vec![
                RatPoint::new(base.clone(), rat(0, 1)),
                RatPoint::new(base.clone(), rat(ya, 10)),
                RatPoint::new(tip, rat(2 * ya + 1, 20)),
                RatPoint::new(base.clone(), rat(ya + 1, 10)),
                RatPoint::new(base.clone(), rat(1, 1)),
            ]);
            let sys = CurveSystem::new(
                build_surface(SurfaceSpec::Torus).unwrap(),
                vec![Curve::vertical(0, x.clone()), wedge],
            ).unwrap();
            intersection_report(&sys, 0, 1).unwrap()
        };
        let on = count(x.clone());
        prop_assert_eq!(on.cardinality.finite(), Some(1));
        prop_assert_eq!(on.points[0].kind, LocalKind::Touching);
        prop_assert_eq!(count(&x + tiny(d)).cardinality.finite(), Some(0));
        prop_assert_eq!(count(&x - tiny(d)).cardinality.finite(), Some(2));
    }
}
