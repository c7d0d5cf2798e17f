use finecurve::exactgeom::{rat, LocalKind, RatPoint};
use finecurve::surfaces::{build_surface, intersection_report, Curve, CurveSystem, Label, SurfaceSpec};
use finecurve::surgeries::{distance2_witness, pushoff, remove_innermost_bigon, remove_touching, surgery_path, SurgeryCase, SurgeryError};
use finecurve::verifier::find_bigons;

fn pt(x: (i64, i64), y: (i64, i64)) -> RatPoint {
    RatPoint::frac(x.0, x.1, y.0, y.1)
}

fn torus(curves: Vec<Curve>) -> CurveSystem {
    CurveSystem::new(build_surface(SurfaceSpec::Torus).unwrap(), curves).unwrap()
}

fn finite(sys: &CurveSystem, a: Label, b: Label) -> Option<usize> {
    intersection_report(sys, a, b).unwrap().cardinality.finite()
}

/// Climbs x = 3/10 with a tangent finger to x = 1/5 and a crossing finger to x = 1/10.
fn touch_and_cross(label: Label) -> Curve {
    Curve::base(
        label,
        vec![
            pt((3, 10), (0, 1)),
            pt((3, 10), (1, 5)),
            pt((1, 5), (2, 5)),
            pt((3, 10), (3, 5)),
            pt((3, 10), (7, 10)),
            pt((1, 10), (7, 10)),
            pt((1, 10), (9, 10)),
            pt((3, 10), (9, 10)),
            pt((3, 10), (1, 1)),
        ],
    )
}

fn nested_pair() -> CurveSystem {
    let u = Curve::base(
        0,
        vec![
            pt((3, 10), (0, 1)),
            pt((3, 10), (3, 4)),
            pt((1, 4), (3, 4)),
            pt((1, 4), (17, 20)),
            pt((1, 5), (17, 20)),
            pt((1, 5), (3, 4)),
            pt((3, 20), (3, 4)),
            pt((3, 20), (9, 10)),
            pt((3, 10), (9, 10)),
            pt((3, 10), (1, 1)),
        ],
    );
    let v = Curve::base(
        1,
        vec![pt((2, 5), (0, 1)), pt((2, 5), (1, 5)), pt((1, 10), (1, 5)), pt((1, 10), (4, 5)), pt((2, 5), (4, 5)), pt((2, 5), (1, 1))],
    );
    torus(vec![u, v])
}

#[test]
fn diagonal_pushoff_is_disjoint_parallel_copy() {
    let d = Curve::base(0, vec![pt((0, 1), (0, 1)), pt((1, 1), (1, 1))]);
    let sys = torus(vec![d]);
    let c = pushoff(&sys, 0, &rat(1, 64)).unwrap();
    let with = sys.with_curve(Curve { label: 1, ..c }).unwrap();
    assert_eq!(finite(&with, 0, 1), Some(0));
    assert_eq!(with.surface.curve_class(&with.curves[1]).unwrap(), (1, 1));
}

#[test]
fn pushoff_toward_a_mouth_is_bounded_by_half_the_gap() {
    let surface = build_surface(SurfaceSpec::FineHandles(4)).unwrap();
    let x0 = rat(1, 8);
    let m = surface.mouths.iter().map(|m| &m.square.min.x).filter(|x| **x > x0).min().unwrap().clone();
    let gap = &m - &x0;
    let sys = CurveSystem::new(surface, vec![Curve::vertical(0, x0)]).unwrap();
    assert!(matches!(pushoff(&sys, 0, &(&gap / rat(2, 1))), Err(SurgeryError::OffsetTooLarge(_))));
    assert!(pushoff(&sys, 0, &(&gap / rat(4, 1))).is_ok());
}

#[test]
fn touching_point_removed_crossings_kept() {
    let sys = torus(vec![Curve::vertical(0, rat(1, 5)), touch_and_cross(1)]);
    let r = intersection_report(&sys, 0, 1).unwrap();
    assert_eq!(r.cardinality.finite(), Some(3));
    assert_eq!(r.points.iter().filter(|p| p.kind == LocalKind::Touching).count(), 1);
    let out = remove_touching(&sys, 1, 0, &pt((1, 5), (2, 5))).unwrap();
    let after = sys.with_curve(out.curve).unwrap();
    let r = intersection_report(&after, 0, 1).unwrap();
    assert_eq!(r.cardinality.finite(), Some(2));
    assert!(r.all_crossing());
    assert!(matches!(remove_touching(&sys, 1, 0, &pt((1, 5), (7, 10))), Err(SurgeryError::NotTouching(_))));
}

#[test]
fn nested_fingers_lose_two_per_innermost_bigon() {
    let sys = nested_pair();
    assert_eq!(finite(&sys, 0, 1), Some(4));
    let bigons = find_bigons(&sys, 0, 1).unwrap();
    for b in bigons.iter().filter(|b| b.innermost) {
        let out = remove_innermost_bigon(&sys, 0, 1, b).unwrap();
        assert_eq!((out.step.before, out.step.after), (4, 2));
        let after = sys.with_curve(out.curve).unwrap();
        assert_eq!(finite(&after, 0, 1), Some(2));
    }
    let outer = bigons.iter().find(|b| !b.innermost).unwrap();
    assert!(matches!(remove_innermost_bigon(&sys, 0, 1, outer), Err(SurgeryError::NotInnermost)));
}

#[test]
fn surgery_paths_for_each_case() {
    let touch = torus(vec![Curve::vertical(0, rat(1, 5)), touch_and_cross(1)]);
    let p = surgery_path(&touch, 1, 0, 2).unwrap();
    assert_eq!((p.case, p.curves.len()), (SurgeryCase::Touching, 4));

    let bigon = nested_pair();
    let p = surgery_path(&bigon, 0, 1, 3).unwrap();
    assert_eq!((p.case, p.curves.len()), (SurgeryCase::Bigon, 4));

    for p in [surgery_path(&touch, 1, 0, 2).unwrap(), surgery_path(&bigon, 0, 1, 3).unwrap()] {
        let s = &touch.surface;
        let k = if p.case == SurgeryCase::Touching { 2 } else { 3 };
        for w in p.curves.windows(2) {
            assert!(s.report_curves(&w[0], &w[1]).unwrap().cardinality.finite().unwrap() <= k);
        }
    }
    assert!(matches!(surgery_path(&bigon, 0, 1, 1), Err(SurgeryError::InvalidInput(_))));
}

#[test]
fn witness_against_a_diagonal_meets_once() {
    let d = Curve::base(1, vec![pt((0, 1), (0, 1)), pt((1, 1), (1, 1))]);
    let sys = torus(vec![Curve::vertical(0, rat(1, 2)), d]);
    let c = distance2_witness(&sys, 0, 1).unwrap();
    let s = &sys.surface;
    assert_eq!(s.report_curves(&c, &sys.curves[0]).unwrap().cardinality.finite(), Some(0));
    let r = s.report_curves(&c, &sys.curves[1]).unwrap();
    assert_eq!(r.cardinality.finite(), Some(1));
    assert!(r.all_crossing());
}

#[test]
fn witness_for_disjoint_verticals() {
    let sys = torus(vec![Curve::vertical(0, rat(1, 2)), Curve::vertical(1, rat(1, 4))]);
    let c = distance2_witness(&sys, 0, 1).unwrap();
    for other in &sys.curves {
        assert_eq!(sys.surface.report_curves(&c, other).unwrap().cardinality.finite(), Some(0));
    }
}
