//! Recomputes intersection patterns, checks certificates, finds bigons and
//! enumerates the simple closed curves inside the union of two curves.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactgeom::{orient, LocalKind, Orientation, RatPoint, Rational, Rect, Segment};
use crate::graph::Graph;
use crate::realizer::{RealizationCertificate, Semantics};
use crate::surfaces::{
    flatten, point_at, Cardinality, ChartKind, Curve, CurvePos, CurveSystem, FlatSeg, Hit, Label, Surface,
    SurfaceError,
};

pub const DEFAULT_CYCLE_BUDGET: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("curves {0} and {1} are the same point set")]
    DuplicateCurve(Label, Label),
    #[error("not supported: {0}")]
    NotSupported(String),
    #[error("more than {0} cycles")]
    CycleBudgetExceeded(usize),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    /// Offending pair; both entries equal for single-curve problems.
    pub pair: (Label, Label),
    pub expected: String,
    pub observed: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    pub mismatches: Vec<Mismatch>,
}

impl Verdict {
    fn from(mismatches: Vec<Mismatch>) -> Self {
        Verdict { ok: mismatches.is_empty(), mismatches }
    }
}

fn summary(c: &Cardinality) -> String {
    match c {
        Cardinality::Finite { count } => format!("Finite({count})"),
        Cardinality::InfiniteOverlap { overlaps } => format!("InfiniteOverlap({} segments)", overlaps.len()),
    }
}

fn label_pairs(sys: &CurveSystem) -> Vec<(Label, Label)> {
    let labels = sys.labels();
    let mut out = Vec::new();
    for (i, &a) in labels.iter().enumerate() {
        for &b in &labels[i + 1..] {
            out.push((a, b));
        }
    }
    out
}

type PairCounts = Vec<((Label, Label), Cardinality)>;

fn reports(sys: &CurveSystem) -> Result<PairCounts, SurfaceError> {
    crate::par_map(&label_pairs(sys), |&(a, b)| {
        Ok(((a, b), crate::surfaces::intersection_report(sys, a, b)?.cardinality))
    })
    .into_iter()
    .collect()
}

fn curves_by_label(sys: &CurveSystem) -> Option<usize> {
    let mut labels = sys.labels();
    labels.sort();
    labels.iter().enumerate().all(|(i, &l)| i == l).then_some(labels.len())
}

/// The graph on the system's labels (which must be `0..n`) whose edges are the
/// pairs that `sem` declares adjacent.
pub fn induced_pattern(sys: &CurveSystem, sem: Semantics) -> Result<Graph, VerifyError> {
    let n = curves_by_label(sys)
        .ok_or_else(|| VerifyError::NotSupported("curve labels must be 0..n".into()))?;
    let mut g = Graph::empty(n);
    for ((a, b), card) in reports(sys)? {
        if card.finite().is_none() {
            let (ca, cb) = (sys.curve(a)?, sys.curve(b)?);
            if sys.surface.covered_by(ca, &[cb])? && sys.surface.covered_by(cb, &[ca])? {
                return Err(VerifyError::DuplicateCurve(a, b));
            }
        }
        if sem.is_edge(&card) {
            g.add_edge(a, b);
        }
    }
    Ok(g)
}

/// Whether a base-chart curve is essential: nonzero class on the torus, nonzero
/// winding on the annulus.
pub fn is_essential(surface: &Surface, c: &Curve) -> Result<bool, SurfaceError> {
    let (p, q) = surface.curve_class(c)?;
    Ok(match surface.base().kind {
        ChartKind::AnnulusRect => q != 0,
        _ => (p, q) != (0, 0),
    })
}

/// Re-derives everything a certificate claims: the labeled pattern, embeddedness
/// and essentialness of every base-chart curve.
pub fn check_certificate(cert: &RealizationCertificate) -> Verdict {
    let sys = &cert.system;
    let mut bad = Vec::new();
    let n = cert.graph.n();
    if curves_by_label(sys) != Some(n) {
        bad.push(Mismatch {
            pair: (0, 0),
            expected: format!("curves labelled 0..{n}"),
            observed: format!("labels {:?}", sys.labels()),
        });
        return Verdict::from(bad);
    }
    let per_curve: Vec<Option<Mismatch>> = crate::par_map(&sys.curves, |c| {
        let problem = |observed: String| Some(Mismatch { pair: (c.label, c.label), expected: "embedded essential curve".into(), observed });
        match sys.check_curve(c).and_then(|_| sys.surface.curve_is_embedded(c)) {
            Err(e) => return problem(e.to_string()),
            Ok(false) => return problem("self-intersecting".into()),
            Ok(true) => {}
        }
        if c.in_base_chart() {
            match is_essential(&sys.surface, c) {
                Ok(true) => {}
                Ok(false) => return problem("inessential".into()),
                Err(e) => return problem(e.to_string()),
            }
        }
        None
    });
    bad.extend(per_curve.into_iter().flatten());
    match reports(sys) {
        Err(e) => bad.push(Mismatch { pair: (0, 0), expected: "computable reports".into(), observed: e.to_string() }),
        Ok(rs) => {
            for ((a, b), card) in rs {
                let want = cert.graph.has_edge(a, b);
                if cert.semantics.is_edge(&card) != want {
                    bad.push(Mismatch {
                        pair: (a, b),
                        expected: if want { "edge".into() } else { "non-edge".into() },
                        observed: summary(&card),
                    });
                }
            }
        }
    }
    Verdict::from(bad)
}

/// A disk bounded by one arc of each curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bigon {
    /// Arc of the first curve, lifted, from `u_from` to `u_to` in traversal order.
    pub arc_u: Vec<RatPoint>,
    /// Arc of the second curve between the same points, lifted to start where `arc_u` starts.
    pub arc_v: Vec<RatPoint>,
    pub innermost: bool,
    #[serde(skip)]
    pub u_from: Option<CurvePos>,
    #[serde(skip)]
    pub u_to: Option<CurvePos>,
    /// Whether `arc_v` follows the second curve's traversal direction.
    pub v_forward: bool,
}

impl Bigon {
    /// Closed boundary polygon: `arc_u` followed by `arc_v` reversed.
    pub fn boundary(&self) -> Vec<RatPoint> {
        let mut poly = self.arc_u.clone();
        poly.extend(self.arc_v.iter().rev().skip(1).cloned());
        poly
    }
}

/// Lifted polyline along `flat` from `from` forward to `to`, starting at `start`.
/// Equal positions give the whole curve.
pub fn arc_points(flat: &[FlatSeg], from: &CurvePos, to: &CurvePos, start: &RatPoint) -> Vec<RatPoint> {
    let n = flat.len();
    let mut shift = start - &point_at(flat, from);
    let mut out = vec![start.clone()];
    let mut seg = from.seg;
    if to.seg == seg && to.t > from.t {
        out.push(&flat[seg].seg.at(&to.t) + &shift);
        return out;
    }
    loop {
        let p = &flat[seg].seg.b + &shift;
        if out.last() != Some(&p) {
            out.push(p.clone());
        }
        let next = (seg + 1) % n;
        shift = &p - &flat[next].seg.a;
        seg = next;
        if seg == to.seg {
            let q = &flat[seg].seg.at(&to.t) + &shift;
            if out.last() != Some(&q) {
                out.push(q);
            }
            return out;
        }
    }
}

/// Strict winding-number containment of `q` in a closed polygon.
pub fn strictly_inside(poly: &[RatPoint], q: &RatPoint) -> bool {
    let m = poly.len();
    let mut wn = 0i64;
    for k in 0..m {
        let (a, b) = (&poly[k], &poly[(k + 1) % m]);
        if a == b {
            continue;
        }
        if (Segment { a: a.clone(), b: b.clone() }).contains(q) {
            return false;
        }
        let o = orient(a, b, q);
        if a.y <= q.y {
            if b.y > q.y && o == Orientation::CounterClockwise {
                wn += 1;
            }
        } else if b.y <= q.y && o == Orientation::Clockwise {
            wn -= 1;
        }
    }
    wn != 0
}

fn bbox(pts: &[RatPoint]) -> Rect {
    let mut lo = pts[0].clone();
    let mut hi = pts[0].clone();
    for p in pts {
        lo = RatPoint::new(lo.x.clone().min(p.x.clone()), lo.y.clone().min(p.y.clone()));
        hi = RatPoint::new(hi.x.clone().max(p.x.clone()), hi.y.clone().max(p.y.clone()));
    }
    Rect::new(lo, hi)
}

fn lattice_class(surface: &Surface, d: &RatPoint) -> Option<(i64, i64)> {
    let c = surface.base();
    let unit = |v: &Rational, p: Option<Rational>| -> Option<i64> {
        let q = match p {
            Some(w) => v / w,
            None => v.clone(),
        };
        q.is_integer().then(|| q.to_integer().to_i64()).flatten()
    };
    Some((unit(&d.x, c.period_x())?, unit(&d.y, c.period_y())?))
}

/// A finite, all-crossing pair of base-chart curves with its hits sorted along `a`.
struct Pair {
    fa: Vec<FlatSeg>,
    fb: Vec<FlatSeg>,
    hits: Vec<Hit>,
}

fn crossing_pair(sys: &CurveSystem, a: Label, b: Label) -> Result<Pair, VerifyError> {
    let (ca, cb) = (sys.curve(a)?, sys.curve(b)?);
    if !ca.in_base_chart() || !cb.in_base_chart() {
        return Err(VerifyError::NotSupported("curves through handles".into()));
    }
    let an = sys.surface.analyze_pair(ca, cb)?;
    if !an.overlaps.is_empty() {
        return Err(VerifyError::NotSupported("infinite intersection".into()));
    }
    if an.hits.iter().any(|h| h.kind == LocalKind::Touching) {
        return Err(VerifyError::NotSupported("touching intersection".into()));
    }
    Ok(Pair { fa: flatten(ca)?, fb: flatten(cb)?, hits: an.hits })
}

fn in_open_arc(from: &CurvePos, to: &CurvePos, x: &CurvePos) -> bool {
    if from < to {
        from < x && x < to
    } else {
        x > from || x < to
    }
}

/// Every bigon between consecutive intersection points along `a`.
pub fn find_bigons(sys: &CurveSystem, a: Label, b: Label) -> Result<Vec<Bigon>, VerifyError> {
    let pair = crossing_pair(sys, a, b)?;
    let k = pair.hits.len();
    let mut out = Vec::new();
    if k < 2 {
        return Ok(out);
    }
    let chart = sys.surface.base();
    for i in 0..k {
        let (h0, h1) = (&pair.hits[i], &pair.hits[(i + 1) % k]);
        let start = point_at(&pair.fa, &h0.on_a);
        let arc_u = arc_points(&pair.fa, &h0.on_a, &h1.on_a, &start);
        for forward in [true, false] {
            let arc_v = if forward {
                arc_points(&pair.fb, &h0.on_b, &h1.on_b, &start)
            } else {
                let mut back = arc_points(&pair.fb, &h1.on_b, &h0.on_b, &point_at(&pair.fb, &h1.on_b));
                let shift = &start - back.last().unwrap();
                back = back.iter().rev().map(|p| p + &shift).collect();
                back
            };
            let d = arc_u.last().unwrap() - arc_v.last().unwrap();
            if !d.is_zero() {
                continue;
            }
            let (vf, vt) = if forward { (&h0.on_b, &h1.on_b) } else { (&h1.on_b, &h0.on_b) };
            let mut bigon = Bigon {
                arc_u: arc_u.clone(),
                arc_v,
                innermost: true,
                u_from: Some(h0.on_a.clone()),
                u_to: Some(h1.on_a.clone()),
                v_forward: forward,
            };
            let poly = bigon.boundary();
            let pb = bbox(&poly);
            for (j, h) in pair.hits.iter().enumerate() {
                if j == i || j == (i + 1) % k {
                    continue;
                }
                if in_open_arc(vf, vt, &h.on_b) {
                    bigon.innermost = false;
                    break;
                }
                let q = Rect::new(h.point.clone(), h.point.clone());
                if chart.translates(&pb, &q).iter().any(|v| strictly_inside(&poly, &(&h.point + v))) {
                    bigon.innermost = false;
                    break;
                }
            }
            out.push(bigon);
        }
    }
    Ok(out)
}

/// One arc of the arrangement: a piece of a curve between consecutive intersection points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcRef {
    pub curve: Label,
    /// Index of the arc along its curve, counted from the first intersection point.
    pub index: usize,
    pub reversed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionCycle {
    pub arcs: Vec<ArcRef>,
    pub class: (i64, i64),
    pub essential: bool,
}

struct ArcEdge {
    from: usize,
    to: usize,
    disp: RatPoint,
    arc: ArcRef,
}

/// Simple closed curves inside `a ∪ b` other than `a` and `b`, with their classes.
pub fn curves_in_union(sys: &CurveSystem, a: Label, b: Label) -> Result<Vec<UnionCycle>, VerifyError> {
    curves_in_union_with_budget(sys, a, b, DEFAULT_CYCLE_BUDGET)
}

pub fn curves_in_union_with_budget(
    sys: &CurveSystem,
    a: Label,
    b: Label,
    budget: usize,
) -> Result<Vec<UnionCycle>, VerifyError> {
    let pair = crossing_pair(sys, a, b)?;
    let k = pair.hits.len();
    if k == 0 {
        return Ok(vec![]);
    }
    let mut edges = Vec::with_capacity(2 * k);
    for (label, flat, pick) in [(a, &pair.fa, true), (b, &pair.fb, false)] {
        let pos = |h: &Hit| if pick { h.on_a.clone() } else { h.on_b.clone() };
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| pos(&pair.hits[i]));
        for (idx, w) in (0..k).map(|j| (order[j], order[(j + 1) % k])).enumerate() {
            let (p, q) = (pos(&pair.hits[w.0]), pos(&pair.hits[w.1]));
            let start = point_at(flat, &p);
            let pts = arc_points(flat, &p, &q, &start);
            let disp = pts.last().unwrap() - &start;
            edges.push(ArcEdge { from: w.0, to: w.1, disp, arc: ArcRef { curve: label, index: idx, reversed: false } });
        }
    }
    let mut found: Vec<UnionCycle> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut stack: Vec<(usize, bool)> = Vec::new();
    let mut on_path = vec![false; k];
    for s in 0..k {
        on_path[s] = true;
        dfs(&edges, s, s, &mut on_path, &mut stack, &mut |cycle: &[(usize, bool)]| {
            let mut ids: Vec<usize> = cycle.iter().map(|c| c.0).collect();
            ids.sort();
            if !seen.insert(ids) {
                return Ok(());
            }
            let curves: std::collections::BTreeSet<Label> = cycle.iter().map(|c| edges[c.0].arc.curve).collect();
            if curves.len() < 2 {
                return Ok(());
            }
            if found.len() >= budget {
                return Err(VerifyError::CycleBudgetExceeded(budget));
            }
            let mut d = RatPoint::zero();
            let mut arcs = Vec::new();
            for &(e, rev) in cycle {
                d = if rev { &d - &edges[e].disp } else { &d + &edges[e].disp };
                arcs.push(ArcRef { reversed: rev, ..edges[e].arc.clone() });
            }
            let class = lattice_class(&sys.surface, &d).ok_or_else(|| VerifyError::NotSupported("open cycle".into()))?;
            let essential = match sys.surface.base().kind {
                ChartKind::AnnulusRect => class.1 != 0,
                _ => class != (0, 0),
            };
            found.push(UnionCycle { arcs, class, essential });
            Ok(())
        })?;
        on_path[s] = false;
    }
    Ok(found)
}

type CycleSink<'a> = dyn FnMut(&[(usize, bool)]) -> Result<(), VerifyError> + 'a;

fn dfs(
    edges: &[ArcEdge],
    start: usize,
    at: usize,
    on_path: &mut [bool],
    stack: &mut Vec<(usize, bool)>,
    sink: &mut CycleSink<'_>,
) -> Result<(), VerifyError> {
    for (id, e) in edges.iter().enumerate() {
        if stack.iter().any(|&(u, _)| u == id) {
            continue;
        }
        for (rev, from, to) in [(false, e.from, e.to), (true, e.to, e.from)] {
            if from != at {
                continue;
            }
            stack.push((id, rev));
            if to == start {
                sink(stack)?;
            } else if to > start && !on_path[to] {
                on_path[to] = true;
                dfs(edges, start, to, on_path, stack, sink)?;
                on_path[to] = false;
            }
            stack.pop();
            if e.from == e.to {
                break;
            }
        }
    }
    Ok(())
}

/// Whether some curve of the system lies inside the union of the others.
pub fn contained_curves(sys: &CurveSystem) -> Result<Vec<Label>, SurfaceError> {
    let mut out = Vec::new();
    for c in &sys.curves {
        let others: Vec<&Curve> = sys.curves.iter().filter(|d| d.label != c.label).collect();
        if !others.is_empty() && sys.surface.covered_by(c, &others)? {
            out.push(c.label);
        }
    }
    Ok(out)
}
