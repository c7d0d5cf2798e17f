//! Local moves on base-chart curves: parallel pushoffs, removal of touching
//! points and innermost bigons, short paths in fine k-curve graphs and
//! distance-two witnesses. Every produced curve is re-checked exactly before
//! it is returned; geometric parameters shrink until the checks pass.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactgeom::{cross, dot, rat, segment_intersect, LocalKind, RatPoint, Rational, Rect, Segment, SegmentIntersection};
use crate::realizer::simplify;
use crate::surfaces::{flatten, point_at, Curve, CurveSystem, Label, ReportPoint, Surface, SurfaceError, BASE};
use crate::verifier::{arc_points, find_bigons, is_essential, Bigon, VerifyError};

/// Halvings tried before a move gives up.
const MAX_HALVINGS: u32 = 40;

#[derive(Debug, Error)]
pub enum SurgeryError {
    #[error("offset {0} is not below the clearance of the curve")]
    OffsetTooLarge(String),
    #[error("no touching intersection at {0}")]
    NotTouching(String),
    #[error("bigon is not innermost")]
    NotInnermost,
    #[error("every surgered candidate is inessential or meets an endpoint too often")]
    NoEssentialSurgery,
    #[error("no offset below the clearance gives the required position")]
    OffsetExhausted,
    #[error("unsupported configuration: {0}")]
    NotSupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// One recorded move: where it happened and the intersection count it changed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryStep {
    pub name: String,
    pub chart: usize,
    /// Lifted rectangle containing every modified piece.
    pub region: Rect,
    pub before: usize,
    pub after: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryTrace {
    pub steps: Vec<SurgeryStep>,
}

/// A modified copy of a curve together with the move that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surgery {
    pub curve: Curve,
    pub step: SurgeryStep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurgeryCase {
    Touching,
    Bigon,
    ArcSurgery,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurgeryPath {
    pub case: SurgeryCase,
    /// Curves from `u` to `v`; consecutive curves meet in at most `k` points.
    pub curves: Vec<Curve>,
    pub trace: SurgeryTrace,
}

/// Closed lifted polyline: vertices plus the translation taking the first vertex
/// to the point where the curve closes up.
#[derive(Clone, Debug)]
struct Loop {
    pts: Vec<RatPoint>,
    shift: RatPoint,
}

impl Loop {
    fn of(c: &Curve) -> Result<Loop, SurgeryError> {
        if !c.in_base_chart() {
            return Err(SurgeryError::NotSupported("curves through handles".into()));
        }
        let flat = flatten(c)?;
        let mut pts = vec![flat[0].seg.a.clone()];
        for f in &flat {
            let d = pts.last().unwrap() - &f.seg.a;
            pts.push(&f.seg.b + &d);
        }
        let end = pts.pop().unwrap();
        let shift = &end - &pts[0];
        Ok(Loop { pts, shift })
    }

    /// From an open lifted path whose last point closes up with its first.
    fn from_path(mut path: Vec<RatPoint>) -> Loop {
        let end = path.pop().unwrap();
        let shift = &end - &path[0];
        Loop { pts: path, shift }
    }

    fn prev(&self, k: usize) -> RatPoint {
        if k == 0 {
            self.pts.last().unwrap() - &self.shift
        } else {
            self.pts[k - 1].clone()
        }
    }

    fn next(&self, k: usize) -> RatPoint {
        if k + 1 == self.pts.len() {
            &self.pts[0] + &self.shift
        } else {
            self.pts[k + 1].clone()
        }
    }

    /// Parallel copy at signed offset `eps` (positive is to the right of travel).
    fn offset(&self, eps: &Rational) -> Vec<RatPoint> {
        let mut out: Vec<RatPoint> =
            (0..self.pts.len()).map(|k| miter(&self.prev(k), &self.pts[k], &self.next(k), eps)).collect();
        out.push(&out[0] + &self.shift);
        out
    }

    fn min_edge(&self) -> Rational {
        (0..self.pts.len()).map(|k| max_norm(&(&self.next(k) - &self.pts[k]))).min().unwrap()
    }
}

fn max_norm(d: &RatPoint) -> Rational {
    d.x.abs().max(d.y.abs())
}

/// Right-hand normal scaled to unit max-norm.
fn normal(d: &RatPoint) -> RatPoint {
    let m = max_norm(d);
    RatPoint::new(&d.y / &m, -&d.x / &m)
}

/// Vertex of the offset polyline at `p`: where the two shifted edge lines meet.
fn miter(prev: &RatPoint, p: &RatPoint, next: &RatPoint, eps: &Rational) -> RatPoint {
    let (d1, d2) = (p - prev, next - p);
    let n1 = normal(&d1).scale(eps);
    let n2 = normal(&d2).scale(eps);
    let c = cross(&d1, &d2);
    if c.is_zero() {
        return p + &n1;
    }
    let s = cross(&(&n2 - &n1), &d2) / c;
    &(p + &n1) + &d1.scale(&s)
}

fn offset_open(pts: &[RatPoint], eps: &Rational) -> Vec<RatPoint> {
    let l = pts.len() - 1;
    let mut out = vec![&pts[0] + &normal(&(&pts[1] - &pts[0])).scale(eps)];
    out.extend((1..l).map(|k| miter(&pts[k - 1], &pts[k], &pts[k + 1], eps)));
    out.push(&pts[l] + &normal(&(&pts[l] - &pts[l - 1])).scale(eps));
    out
}

fn bounds<'a>(pts: impl IntoIterator<Item = &'a RatPoint>) -> Rect {
    let mut it = pts.into_iter();
    let first = it.next().unwrap();
    let (mut lo, mut hi) = (first.clone(), first.clone());
    for p in it {
        lo = RatPoint::new(lo.x.min(p.x.clone()), lo.y.min(p.y.clone()));
        hi = RatPoint::new(hi.x.max(p.x.clone()), hi.y.max(p.y.clone()));
    }
    Rect::new(lo, hi)
}

fn signed_area(poly: &[RatPoint]) -> Rational {
    let m = poly.len();
    (0..m).map(|k| cross(&poly[k], &poly[(k + 1) % m])).fold(Rational::zero(), |s, x| s + x)
}

fn count(s: &Surface, x: &Curve, y: &Curve) -> Option<usize> {
    s.report_curves(x, y).ok()?.cardinality.finite()
}

fn base_curve(sys: &CurveSystem, l: Label) -> Result<&Curve, SurgeryError> {
    let c = sys.curve(l)?;
    if !c.in_base_chart() {
        return Err(SurgeryError::NotSupported("curves through handles".into()));
    }
    Ok(c)
}

/// Placement, embeddedness and homology class all match the original.
fn sound_replacement(sys: &CurveSystem, orig: &Curve, c: &Curve) -> bool {
    let s = &sys.surface;
    sys.check_curve(c).is_ok()
        && s.curve_is_embedded(c).unwrap_or(false)
        && matches!((s.curve_class(c), s.curve_class(orig)), (Ok(x), Ok(y)) if x == y)
}

fn meets_closed(r: &Rect, s: &Segment) -> bool {
    if r.contains_closed(&s.a) || r.contains_closed(&s.b) {
        return true;
    }
    let c = [
        r.min.clone(),
        RatPoint::new(r.max.x.clone(), r.min.y.clone()),
        r.max.clone(),
        RatPoint::new(r.min.x.clone(), r.max.y.clone()),
    ];
    (0..4).any(|k| {
        let edge = Segment { a: c[k].clone(), b: c[(k + 1) % 4].clone() };
        segment_intersect(s, &edge) != SegmentIntersection::Empty
    })
}

fn clears_mouths(s: &Surface, c: &Curve) -> bool {
    let Ok(flat) = flatten(c) else { return false };
    let chart = s.base();
    flat.iter().all(|f| {
        s.mouths.iter().filter(|m| m.chart == BASE).all(|m| {
            chart.translates(&f.bbox, &m.square).iter().all(|v| !meets_closed(&m.square.translate(v), &f.seg))
        })
    })
}

/// Parallel copy at signed offset `eps`, accepted only if the band out to twice
/// the offset is free: the far copy is embedded, disjoint from the original and
/// keeps off the closed mouth squares.
fn parallel_copy(sys: &CurveSystem, orig: &Curve, eps: &Rational) -> Option<Curve> {
    let lp = Loop::of(orig).ok()?;
    let s = &sys.surface;
    let ok = |c: &Curve| sound_replacement(sys, orig, c) && count(s, orig, c) == Some(0);
    let copy = Curve::base(orig.label, simplify(lp.offset(eps)));
    let far = Curve::base(orig.label, simplify(lp.offset(&(eps * rat(2, 1)))));
    (ok(&copy) && ok(&far) && clears_mouths(s, &far)).then_some(copy)
}

/// Offsets `scale / 2^j` for growing `j`, alternating sides.
fn offsets(scale: &Rational) -> impl Iterator<Item = Rational> + '_ {
    (0..MAX_HALVINGS).flat_map(move |j| {
        let e = scale / Rational::from_integer(num_bigint::BigInt::one() << j);
        [e.clone(), -e]
    })
}

/// Parallel copy of `a` shifted `offset` to its right, disjoint from `a`.
pub fn pushoff(sys: &CurveSystem, a: Label, offset: &Rational) -> Result<Curve, SurgeryError> {
    if !offset.is_positive() {
        return Err(SurgeryError::InvalidInput(format!("offset must be positive, got {offset}")));
    }
    let ca = base_curve(sys, a)?;
    parallel_copy(sys, ca, offset).ok_or_else(|| SurgeryError::OffsetTooLarge(offset.to_string()))
}

fn pushoff_points(sys: &CurveSystem, a: &Curve, b: &Curve) -> Result<Vec<ReportPoint>, SurgeryError> {
    let r = sys.surface.report_curves(a, b)?;
    if r.cardinality.finite().is_none() {
        return Err(SurgeryError::NotSupported("pair meets in a shared segment".into()));
    }
    Ok(r.points)
}

/// Pushes `a` off `b` near a touching point; nothing else about any report changes.
pub fn remove_touching(sys: &CurveSystem, a: Label, b: Label, point: &RatPoint) -> Result<Surgery, SurgeryError> {
    let (ca, cb) = (base_curve(sys, a)?, base_curve(sys, b)?);
    let s = &sys.surface;
    let an = s.analyze_pair(ca, cb)?;
    if !an.overlaps.is_empty() {
        return Err(SurgeryError::NotSupported("pair meets in a shared segment".into()));
    }
    let key = s.canonical(BASE, point);
    let hit = an
        .hits
        .iter()
        .find(|h| h.chart == key.0 && h.point == key.1 && h.kind == LocalKind::Touching)
        .ok_or_else(|| SurgeryError::NotTouching(point.to_string()))?;
    let old = pushoff_points(sys, ca, cb)?;
    let expected: Vec<ReportPoint> = old.iter().filter(|p| p.point != hit.point).cloned().collect();
    let others: Vec<(&Curve, _)> = sys
        .curves
        .iter()
        .filter(|c| c.label != a && c.label != b)
        .map(|c| (c, s.report_curves(ca, c).ok()))
        .collect();

    let lp = Loop::of(ca)?;
    let lp = rotate_to(&lp, hit.on_a.seg, &hit.on_a.t);
    let p = lp.pts[0].clone();
    let (prev, next) = (lp.prev(0), lp.next(0));
    let (u1, u2) = (&prev - &p, &next - &p);
    let mut w = &u1.scale(&max_norm(&u1).recip()) + &u2.scale(&max_norm(&u2).recip());
    if w.is_zero() {
        w = u2.perp();
    }
    let scale = max_norm(&u1).min(max_norm(&u2));
    for j in 2..MAX_HALVINGS {
        let r = Rational::new(1.into(), num_bigint::BigInt::one() << j);
        for side in [-w.clone(), w.clone()] {
            let p_in = &p + &u1.scale(&r);
            let p_out = &p + &u2.scale(&r);
            let p_mid = &p + &side.scale(&(&r * &scale / max_norm(&side)));
            let mut pts = vec![p_in.clone(), p_mid.clone(), p_out.clone()];
            pts.extend(lp.pts[1..].iter().cloned());
            pts.push(&p_in + &lp.shift);
            let c = Curve::base(a, simplify(pts));
            if !sound_replacement(sys, ca, &c) || pushoff_points(sys, &c, cb).ok() != Some(expected.clone()) {
                continue;
            }
            if others.iter().all(|(d, rep)| s.report_curves(&c, d).ok() == *rep) {
                let step = SurgeryStep {
                    name: "remove touching point".into(),
                    chart: BASE,
                    region: bounds([&p_in, &p, &p_mid, &p_out]),
                    before: old.len(),
                    after: expected.len(),
                };
                return Ok(Surgery { curve: c, step });
            }
        }
    }
    Err(SurgeryError::OffsetExhausted)
}

/// Loop starting at the point `t` along segment `seg`, inserting it as a vertex.
fn rotate_to(lp: &Loop, seg: usize, t: &Rational) -> Loop {
    let mut pts = lp.pts.clone();
    let mut k = seg;
    if !t.is_zero() {
        let q = lp.pts[seg].lerp(&lp.next(seg), t);
        pts.insert(seg + 1, q);
        k = seg + 1;
    }
    let head: Vec<RatPoint> = pts[..k].iter().map(|p| p + &lp.shift).collect();
    let mut out: Vec<RatPoint> = pts[k..].to_vec();
    out.extend(head);
    Loop { pts: out, shift: lp.shift.clone() }
}

/// Reroutes `a` around the far side of the bigon's `b`-arc, removing both corners.
pub fn remove_innermost_bigon(sys: &CurveSystem, a: Label, b: Label, bigon: &Bigon) -> Result<Surgery, SurgeryError> {
    if !bigon.innermost {
        return Err(SurgeryError::NotInnermost);
    }
    let (ca, cb) = (base_curve(sys, a)?, base_curve(sys, b)?);
    let s = &sys.surface;
    let current = find_bigons(sys, a, b)?;
    let bg = current
        .iter()
        .find(|x| x.arc_u == bigon.arc_u && x.arc_v == bigon.arc_v)
        .ok_or_else(|| SurgeryError::InvalidInput("bigon does not belong to this pair".into()))?;
    if !bg.innermost {
        return Err(SurgeryError::NotInnermost);
    }
    let (from, to) = (bg.u_from.clone().unwrap(), bg.u_to.clone().unwrap());
    let an = s.analyze_pair(ca, cb)?;
    let h0 = an.hits.iter().find(|h| h.on_a == from).unwrap();
    let h1 = an.hits.iter().find(|h| h.on_a == to).unwrap();
    let old = pushoff_points(sys, ca, cb)?;
    let expected: Vec<ReportPoint> =
        old.iter().filter(|p| p.point != h0.point && p.point != h1.point).cloned().collect();

    let fa = flatten(ca)?;
    let fb = flatten(cb)?;
    let start = bg.arc_u[0].clone();
    let end = bg.arc_u.last().unwrap().clone();
    let rest = arc_points(&fa, &to, &from, &end);
    let shift = rest.last().unwrap() - &start;

    // The b-arc extended one step past each corner, along b.
    let around = |pos, at: &RatPoint| arc_points(&fb, pos, pos, at);
    let full0 = around(&h0.on_b, &start);
    let full1 = around(&h1.on_b, &end);
    let back = |full: &[RatPoint]| {
        let t = full.last().unwrap() - &full[0];
        &full[full.len() - 2] - &t
    };
    let (e0, e1) = if bg.v_forward { (back(&full0), full1[1].clone()) } else { (full0[1].clone(), back(&full1)) };
    let mut v_ext = vec![e0];
    v_ext.extend(bg.arc_v.iter().cloned());
    v_ext.push(e1);
    let outward = if signed_area(&bg.boundary()).is_positive() { -Rational::one() } else { Rational::one() };
    let m = v_ext.len();
    // Keep the offset arc closer to `b` than where it rejoins `a`.
    let reach0 = reach(&v_ext[1], [&v_ext[0], &v_ext[2]], &(&rest[rest.len() - 2] - &shift));
    let reach1 = reach(&v_ext[m - 2], [&v_ext[m - 3], &v_ext[m - 1]], &rest[1]);
    let scale = v_ext.windows(2).map(|w| max_norm(&(&w[1] - &w[0]))).min().unwrap() / rat(4, 1);
    let scale = scale.min(reach0 / rat(2, 1)).min(reach1 / rat(2, 1));
    if !scale.is_positive() {
        return Err(SurgeryError::NotSupported("bigon corner is not transversal".into()));
    }
    let others: Vec<(&Curve, Option<Vec<ReportPoint>>)> = sys
        .curves
        .iter()
        .filter(|c| c.label != a && c.label != b)
        .map(|c| (c, s.report_curves(ca, c).ok().map(|r| r.points)))
        .collect();

    let (h1l, h0l) = (&rest[0], rest.last().unwrap());
    for j in 0..MAX_HALVINGS {
        let unit = Rational::new(1.into(), num_bigint::BigInt::one() << (j + 2));
        let eps = &outward * &scale * &unit;
        let off = offset_open(&v_ext, &eps);
        let q1 = h1l.lerp(&rest[1], &unit);
        let q0 = h0l.lerp(&rest[rest.len() - 2], &unit);
        let mut pts = vec![q1.clone()];
        pts.extend(rest[1..rest.len() - 1].iter().cloned());
        pts.push(q0.clone());
        let arc: Vec<RatPoint> = off[1..off.len() - 1].iter().map(|p| p + &shift).collect();
        pts.extend(arc.iter().cloned());
        pts.push(&q1 + &shift);
        let c = Curve::base(a, simplify(pts));
        if !sound_replacement(sys, ca, &c) || pushoff_points(sys, &c, cb).ok() != Some(expected.clone()) {
            continue;
        }
        let mut region_pts: Vec<RatPoint> = bg.boundary();
        region_pts.extend(off[1..off.len() - 1].iter().cloned());
        region_pts.extend([&q0 - &shift, q1.clone()]);
        let region = bounds(&region_pts);
        let local = others.iter().all(|(d, rep)| {
            let Some(old_pts) = rep else { return true };
            let Ok(new) = s.report_curves(&c, d) else { return false };
            new.points.iter().filter(|p| !old_pts.contains(p)).all(|p| in_region(s, &region, &p.point))
        });
        if local {
            let step = SurgeryStep {
                name: "remove innermost bigon".into(),
                chart: BASE,
                region,
                before: old.len(),
                after: expected.len(),
            };
            return Ok(Surgery { curve: c, step });
        }
    }
    Err(SurgeryError::OffsetExhausted)
}

/// Distance from `corner` to `p` across the lines through `corner` and each of
/// `ends`, in units of the max-norm normal used by the offsets; the smaller one.
fn reach(corner: &RatPoint, ends: [&RatPoint; 2], p: &RatPoint) -> Rational {
    ends.iter()
        .map(|e| {
            let d = *e - corner;
            cross(&d, &(p - corner)).abs() * max_norm(&d) / dot(&d, &d)
        })
        .min()
        .unwrap()
}

fn in_region(s: &Surface, region: &Rect, p: &RatPoint) -> bool {
    let pr = Rect::new(p.clone(), p.clone());
    s.base().translates(region, &pr).iter().any(|v| region.contains_closed(&(p + v)))
}

fn consecutive_ok(s: &Surface, curves: &[Curve], k: usize) -> bool {
    curves.windows(2).all(|w| count(s, &w[0], &w[1]).is_some_and(|c| c <= k))
}

/// Path of at most three edges from `u` to `v` in the fine `k`-curve graph,
/// given that `u` and `v` meet in exactly `k + 1` points.
pub fn surgery_path(sys: &CurveSystem, u: Label, v: Label, k: usize) -> Result<SurgeryPath, SurgeryError> {
    let (cu, cv) = (base_curve(sys, u)?, base_curve(sys, v)?);
    let s = &sys.surface;
    let an = s.analyze_pair(cu, cv)?;
    if !an.overlaps.is_empty() || an.hits.len() != k + 1 {
        return Err(SurgeryError::InvalidInput(format!("pair must meet in exactly {} points", k + 1)));
    }
    let fresh = sys.curves.iter().map(|c| c.label).max().unwrap_or(0) + 1;
    let touching = an.hits.iter().find(|h| h.kind == LocalKind::Touching);
    let (case, first) = if let Some(h) = touching {
        (SurgeryCase::Touching, remove_touching(sys, u, v, &h.point)?)
    } else {
        let bigons = find_bigons(sys, u, v)?;
        match bigons.iter().find(|b| b.innermost) {
            Some(b) => (SurgeryCase::Bigon, remove_innermost_bigon(sys, u, v, b)?),
            None => return arc_surgery(sys, cu, cv, k, fresh),
        }
    };
    let mut modified = first.curve;
    modified.label = fresh + 1;
    let scale = Loop::of(cu)?.min_edge() / rat(4, 1);
    for eps in offsets(&scale) {
        let Some(mut copy) = parallel_copy(sys, cu, &eps) else { continue };
        copy.label = fresh;
        let curves = vec![cu.clone(), copy, modified.clone(), cv.clone()];
        if consecutive_ok(s, &curves, k) && interiors_sound(s, &curves) {
            let push = SurgeryStep {
                name: "pushoff".into(),
                chart: BASE,
                region: bounds(Loop::of(&curves[1])?.pts.iter().chain(Loop::of(cu)?.pts.iter())),
                before: 0,
                after: count(s, &curves[1], &curves[2]).unwrap_or(0),
            };
            let trace = SurgeryTrace { steps: vec![first.step, push] };
            return Ok(SurgeryPath { case, curves, trace });
        }
    }
    Err(SurgeryError::OffsetExhausted)
}

fn interiors_sound(s: &Surface, curves: &[Curve]) -> bool {
    curves[1..curves.len() - 1]
        .iter()
        .all(|c| s.curve_is_embedded(c).unwrap_or(false) && is_essential(s, c).unwrap_or(false))
}

/// Replaces one arc of `u` by the `v`-arc between two hits consecutive along `v`,
/// then pushes the result off itself.
fn arc_surgery(sys: &CurveSystem, cu: &Curve, cv: &Curve, k: usize, label: Label) -> Result<SurgeryPath, SurgeryError> {
    let s = &sys.surface;
    let an = s.analyze_pair(cu, cv)?;
    let (fu, fv) = (flatten(cu)?, flatten(cv)?);
    let mut along_v: Vec<usize> = (0..an.hits.len()).collect();
    along_v.sort_by(|&x, &y| an.hits[x].on_b.cmp(&an.hits[y].on_b));
    let m = along_v.len();
    let mut seen = BTreeSet::new();
    for i in 0..m {
        let (p, q) = (&an.hits[along_v[i]], &an.hits[along_v[(i + 1) % m]]);
        for u_from_q in [true, false] {
            let path = if u_from_q {
                let alpha = arc_points(&fu, &q.on_a, &p.on_a, &point_at(&fu, &q.on_a));
                let beta = arc_points(&fv, &p.on_b, &q.on_b, alpha.last().unwrap());
                alpha.into_iter().chain(beta.into_iter().skip(1)).collect::<Vec<_>>()
            } else {
                let alpha = arc_points(&fu, &p.on_a, &q.on_a, &point_at(&fu, &p.on_a));
                let beta = arc_points(&fv, &p.on_b, &q.on_b, &point_at(&fv, &p.on_b));
                let d = alpha.last().unwrap() - beta.last().unwrap();
                alpha.into_iter().chain(beta.iter().rev().skip(1).map(|x| x + &d)).collect()
            };
            let lp = Loop::from_path(simplify(path));
            if lp.shift.is_zero() || lp.pts.len() < 2 || !seen.insert((lp.pts.clone(), lp.shift.clone())) {
                continue;
            }
            let scale = lp.min_edge() / rat(4, 1);
            for eps in offsets(&scale).take(24) {
                let w = Curve::base(label, simplify(lp.offset(&eps)));
                let curves = vec![cu.clone(), w, cv.clone()];
                if sys.check_curve(&curves[1]).is_ok() && consecutive_ok(s, &curves, k) && interiors_sound(s, &curves) {
                    let step = SurgeryStep {
                        name: "arc surgery".into(),
                        chart: BASE,
                        region: bounds(&lp.pts),
                        before: k + 1,
                        after: count(s, &curves[1], cv).unwrap_or(0),
                    };
                    return Ok(SurgeryPath {
                        case: SurgeryCase::ArcSurgery,
                        curves,
                        trace: SurgeryTrace { steps: vec![step] },
                    });
                }
            }
        }
    }
    Err(SurgeryError::NoEssentialSurgery)
}

/// A pushoff `c` of `a`, disjoint from `a`, meeting `b` finitely and only in crossings.
/// `c` gets the label one past the largest in `sys`.
pub fn distance2_witness(sys: &CurveSystem, a: Label, b: Label) -> Result<Curve, SurgeryError> {
    let (ca, cb) = (base_curve(sys, a)?, base_curve(sys, b)?);
    let s = &sys.surface;
    let scale = Loop::of(ca)?.min_edge() / rat(4, 1);
    let fresh = sys.curves.iter().map(|c| c.label).max().unwrap_or(0) + 1;
    for j in 0..MAX_HALVINGS {
        // Odd denominators keep the copy off the dyadic grid most constructions live on.
        let e = &scale / Rational::from_integer((num_bigint::BigInt::one() << j) + 1);
        for eps in [e.clone(), -e] {
            let Some(mut c) = parallel_copy(sys, ca, &eps) else { continue };
            c.label = fresh;
            let Ok(r) = s.report_curves(&c, cb) else { continue };
            if r.cardinality.finite().is_some() && r.all_crossing() {
                return Ok(c);
            }
        }
    }
    Err(SurgeryError::OffsetExhausted)
}
