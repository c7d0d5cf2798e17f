//! Chart atlases for the torus, the annulus and the torus with handles, curves as
//! chart-local polyline legs, and exact pairwise intersection reports.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactgeom::{
    ceil_int, classify_local, cross, floor_int, int, rat, rem_euclid, segment_intersect, LocalKind,
    LocalStar, RatPoint, Rational, Rect, Segment, SegmentIntersection,
};

pub type Label = usize;

/// Chart id of the base square in every surface built here.
pub const BASE: usize = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("invalid surface spec: {0}")]
    InvalidSpec(String),
    #[error("unknown curve label {0}")]
    UnknownLabel(Label),
    #[error("curve {0} leaves the base chart")]
    NotBaseChartCurve(Label),
    #[error("cannot classify intersection at {0}")]
    UnclassifiablePoint(Box<RatPoint>),
    #[error("malformed curve {label}: {reason}")]
    BadCurve { label: Label, reason: String },
    #[error("duplicate curve label {0}")]
    DuplicateLabel(Label),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartKind {
    TorusSquare,
    AnnulusRect,
    HandleCylinder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Identification {
    /// x = min.x glued to x = max.x by translation.
    LeftRight,
    /// y = min.y glued to y = max.y by translation.
    BottomTop,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub kind: ChartKind,
    pub extents: Rect,
    pub identifications: Vec<Identification>,
}

impl Chart {
    fn new(kind: ChartKind, extents: Rect) -> Self {
        let identifications = match kind {
            ChartKind::TorusSquare => vec![Identification::LeftRight, Identification::BottomTop],
            ChartKind::AnnulusRect | ChartKind::HandleCylinder => vec![Identification::BottomTop],
        };
        Chart { kind, extents, identifications }
    }

    pub fn period_x(&self) -> Option<Rational> {
        self.identifications.contains(&Identification::LeftRight).then(|| self.extents.width())
    }

    pub fn period_y(&self) -> Option<Rational> {
        self.identifications.contains(&Identification::BottomTop).then(|| self.extents.height())
    }

    /// Reduces the periodic coordinates into `[min, max)`.
    pub fn reduce(&self, p: &RatPoint) -> RatPoint {
        let e = &self.extents;
        let x = match self.period_x() {
            Some(w) => rem_euclid(&(&p.x - &e.min.x), &w) + &e.min.x,
            None => p.x.clone(),
        };
        let y = match self.period_y() {
            Some(h) => rem_euclid(&(&p.y - &e.min.y), &h) + &e.min.y,
            None => p.y.clone(),
        };
        RatPoint::new(x, y)
    }

    /// Lattice vectors `v` for which `b + v` meets `a` (closed boxes).
    pub fn translates(&self, a: &Rect, b: &Rect) -> Vec<RatPoint> {
        let axis = |period: Option<Rational>, a_lo: &Rational, a_hi: &Rational, b_lo: &Rational, b_hi: &Rational| {
            match period {
                Some(w) => {
                    let lo = ceil_int(&((a_lo - b_hi) / &w));
                    let hi = floor_int(&((a_hi - b_lo) / &w));
                    let (lo, hi) = (lo.to_i64().unwrap_or(0), hi.to_i64().unwrap_or(-1));
                    (lo..=hi).map(|k| int(k) * &w).collect::<Vec<_>>()
                }
                None if b_lo <= a_hi && a_lo <= b_hi => vec![Rational::zero()],
                None => vec![],
            }
        };
        let xs = axis(self.period_x(), &a.min.x, &a.max.x, &b.min.x, &b.max.x);
        if xs.is_empty() {
            return vec![];
        }
        let ys = axis(self.period_y(), &a.min.y, &a.max.y, &b.min.y, &b.max.y);
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for x in &xs {
            for y in &ys {
                out.push(RatPoint::new(x.clone(), y.clone()));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corner {
    BottomLeft,
    BottomRight,
    TopRight,
    TopLeft,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HandleEnd {
    /// Glued to the cylinder circle `s = 0`.
    Start,
    /// Glued to the cylinder circle `s = 1`.
    Finish,
}

impl HandleEnd {
    pub fn s(self) -> Rational {
        match self {
            HandleEnd::Start => Rational::zero(),
            HandleEnd::Finish => Rational::one(),
        }
    }
}

/// A square removed from a base chart whose perimeter is glued, by arc length
/// from `corner` in the given sense, to one boundary circle of a handle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mouth {
    pub chart: usize,
    pub square: Rect,
    pub handle: usize,
    pub end: HandleEnd,
    pub corner: Corner,
    pub clockwise: bool,
}

impl Mouth {
    fn corners(&self) -> [RatPoint; 4] {
        let (lo, hi) = (&self.square.min, &self.square.max);
        let at = |c: Corner| match c {
            Corner::BottomLeft => lo.clone(),
            Corner::BottomRight => RatPoint::new(hi.x.clone(), lo.y.clone()),
            Corner::TopRight => hi.clone(),
            Corner::TopLeft => RatPoint::new(lo.x.clone(), hi.y.clone()),
        };
        let ccw = [Corner::BottomLeft, Corner::BottomRight, Corner::TopRight, Corner::TopLeft];
        let start = ccw.iter().position(|&c| c == self.corner).unwrap();
        let step = |k: usize| {
            if self.clockwise {
                ccw[(start + 4 - k) % 4]
            } else {
                ccw[(start + k) % 4]
            }
        };
        [at(step(0)), at(step(1)), at(step(2)), at(step(3))]
    }

    pub fn side(&self) -> Rational {
        self.square.width()
    }

    /// Arc-length parameter in `[0, 4 side)` of a perimeter point given in reduced chart coordinates.
    pub fn perimeter_param(&self, p: &RatPoint) -> Option<Rational> {
        let c = self.corners();
        let side = self.side();
        for k in 0..4 {
            let edge = Segment { a: c[k].clone(), b: c[(k + 1) % 4].clone() };
            if edge.contains(p) {
                let t = int(k as i64) * &side + (&p.x - &c[k].x).abs() + (&p.y - &c[k].y).abs();
                return Some(rem_euclid(&t, &(int(4) * &side)));
            }
        }
        None
    }

    pub fn perimeter_point(&self, t: &Rational) -> RatPoint {
        let side = self.side();
        let t = rem_euclid(t, &(int(4) * &side));
        let k = floor_int(&(&t / &side)).to_usize().unwrap_or(0).min(3);
        let c = self.corners();
        let frac = (&t - int(k as i64) * &side) / &side;
        c[k].lerp(&c[(k + 1) % 4], &frac)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SurfaceLabel {
    Torus,
    Annulus,
    FineHandles { n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurfaceSpec {
    Torus,
    Annulus,
    FineHandles(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surface {
    pub label: SurfaceLabel,
    pub charts: Vec<Chart>,
    pub mouths: Vec<Mouth>,
}

/// Coordinates shared by the handle surface and the handle realization.
#[derive(Clone, Debug)]
pub struct FineLayout {
    pub n: usize,
    pub side: Rational,
    pub gap: Rational,
}

impl FineLayout {
    pub fn new(n: usize) -> Self {
        let n3 = (n * n * n) as i64;
        FineLayout { n, side: rat(1, 16 * n3), gap: rat(1, 64 * n3) }
    }

    pub fn x(&self, i: usize) -> Rational {
        rat(2 * i as i64 + 1, 2 * self.n as i64)
    }

    pub fn slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        Graph6Pairs::index(self.n, i, j)
    }

    /// Height reserved for the unordered pair `{i, j}`.
    pub fn height(&self, i: usize, j: usize) -> Rational {
        let pairs = self.n * (self.n - 1) / 2;
        rat(self.slot(i, j) as i64 + 1, pairs as i64 + 1)
    }

    pub fn has_handle(&self, i: usize, j: usize) -> bool {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        j - i >= 2 && !(i == 0 && j == self.n - 1)
    }

    pub fn handle_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_handle(i, j))
            .collect()
    }

    /// Mouth square on the right of curve `i` (first) and on the left of curve `j` (second).
    pub fn mouth_squares(&self, i: usize, j: usize) -> (Rect, Rect) {
        let h = self.height(i, j);
        let half = &self.side / int(2);
        let (y0, y1) = (&h - &half, &h + &half);
        let a0 = self.x(i) + &self.gap;
        let b1 = self.x(j) - &self.gap;
        (
            Rect::new(RatPoint::new(a0.clone(), y0.clone()), RatPoint::new(&a0 + &self.side, y1.clone())),
            Rect::new(RatPoint::new(&b1 - &self.side, y0), RatPoint::new(b1, y1)),
        )
    }
}

/// Index of the pair `i < j` in lexicographic order over all pairs of `0..n`.
struct Graph6Pairs;

impl Graph6Pairs {
    fn index(n: usize, i: usize, j: usize) -> usize {
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }
}

fn unit_square() -> Rect {
    Rect::new(RatPoint::from_ints(0, 0), RatPoint::from_ints(1, 1))
}

pub fn build_surface(spec: SurfaceSpec) -> Result<Surface, SurfaceError> {
    match spec {
        SurfaceSpec::Torus => Ok(Surface {
            label: SurfaceLabel::Torus,
            charts: vec![Chart::new(ChartKind::TorusSquare, unit_square())],
            mouths: vec![],
        }),
        SurfaceSpec::Annulus => Ok(Surface {
            label: SurfaceLabel::Annulus,
            charts: vec![Chart::new(ChartKind::AnnulusRect, unit_square())],
            mouths: vec![],
        }),
        SurfaceSpec::FineHandles(n) if n < 2 => {
            Err(SurfaceError::InvalidSpec(format!("FineHandles needs n >= 2, got {n}")))
        }
        SurfaceSpec::FineHandles(n) => {
            let layout = FineLayout::new(n);
            let mut charts = vec![Chart::new(ChartKind::TorusSquare, unit_square())];
            let mut mouths = Vec::new();
            let circumference = int(4) * &layout.side;
            for (i, j) in layout.handle_pairs() {
                let handle = charts.len();
                charts.push(Chart::new(
                    ChartKind::HandleCylinder,
                    Rect::new(RatPoint::zero(), RatPoint::new(Rational::one(), circumference.clone())),
                ));
                let (first, second) = layout.mouth_squares(i, j);
                mouths.push(Mouth {
                    chart: BASE,
                    square: first,
                    handle,
                    end: HandleEnd::Start,
                    corner: Corner::BottomLeft,
                    clockwise: true,
                });
                mouths.push(Mouth {
                    chart: BASE,
                    square: second,
                    handle,
                    end: HandleEnd::Finish,
                    corner: Corner::BottomRight,
                    clockwise: false,
                });
            }
            Ok(Surface { label: SurfaceLabel::FineHandles { n }, charts, mouths })
        }
    }
}

impl Surface {
    pub fn handle_count(&self) -> usize {
        self.charts.iter().filter(|c| c.kind == ChartKind::HandleCylinder).count()
    }

    pub fn genus(&self) -> usize {
        match self.label {
            SurfaceLabel::Annulus => 0,
            _ => 1 + self.handle_count(),
        }
    }

    pub fn base(&self) -> &Chart {
        &self.charts[BASE]
    }

    pub fn mouth_of(&self, handle: usize, end: HandleEnd) -> Option<&Mouth> {
        self.mouths.iter().find(|m| m.handle == handle && m.end == end)
    }

    /// Canonical surface point: periodic coordinates reduced, and handle boundary
    /// points expressed in the base chart they are glued to.
    pub fn canonical(&self, chart: usize, p: &RatPoint) -> (usize, RatPoint) {
        let c = &self.charts[chart];
        if c.kind == ChartKind::HandleCylinder {
            let end = if p.x.is_zero() {
                Some(HandleEnd::Start)
            } else if p.x.is_one() {
                Some(HandleEnd::Finish)
            } else {
                None
            };
            if let Some(m) = end.and_then(|e| self.mouth_of(chart, e)) {
                let q = m.perimeter_point(&p.y);
                return (m.chart, self.charts[m.chart].reduce(&q));
            }
        }
        (chart, c.reduce(p))
    }

    /// Structural checks: identifications match kinds, handles have two mouths,
    /// mouth squares are disjoint and stay inside the open base square.
    pub fn validate(&self) -> Result<(), SurfaceError> {
        let bad = |m: String| Err(SurfaceError::InvalidSpec(m));
        if self.charts.is_empty() || self.charts[BASE].kind == ChartKind::HandleCylinder {
            return bad("chart 0 must be a base chart".into());
        }
        for (id, c) in self.charts.iter().enumerate() {
            if !c.extents.width().is_positive() || !c.extents.height().is_positive() {
                return bad(format!("chart {id} has empty extents"));
            }
            if *c != Chart::new(c.kind, c.extents.clone()) {
                return bad(format!("chart {id} identifications do not match its kind"));
            }
            if c.kind == ChartKind::HandleCylinder {
                let ends: Vec<_> = self.mouths.iter().filter(|m| m.handle == id).map(|m| m.end).collect();
                if ends.len() != 2 || ends[0] == ends[1] {
                    return bad(format!("handle {id} needs one mouth per end"));
                }
                for m in self.mouths.iter().filter(|m| m.handle == id) {
                    if int(4) * m.side() != c.extents.height() {
                        return bad(format!("handle {id} circumference does not match its mouth"));
                    }
                }
            }
        }
        for (k, m) in self.mouths.iter().enumerate() {
            if m.chart != BASE || self.charts.get(m.handle).map(|c| c.kind) != Some(ChartKind::HandleCylinder) {
                return bad(format!("mouth {k} must join the base chart to a handle"));
            }
            if m.square.width() != m.square.height() || !m.square.width().is_positive() {
                return bad(format!("mouth {k} is not a square"));
            }
            let e = &self.charts[BASE].extents;
            if !(e.contains_open(&m.square.min) && e.contains_open(&m.square.max)) {
                return bad(format!("mouth {k} touches an identified edge"));
            }
            for o in &self.mouths[k + 1..] {
                if m.square.intersects_closed(&o.square) {
                    return bad(format!("mouth {k} overlaps another mouth"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leg {
    pub chart: usize,
    pub points: Vec<RatPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Curve {
    pub label: Label,
    pub legs: Vec<Leg>,
}

impl Curve {
    pub fn base(label: Label, points: Vec<RatPoint>) -> Self {
        Curve { label, legs: vec![Leg { chart: BASE, points }] }
    }

    /// The vertical circle `x = c` traversed upward.
    pub fn vertical(label: Label, x: Rational) -> Self {
        Curve::base(
            label,
            vec![RatPoint::new(x.clone(), Rational::zero()), RatPoint::new(x, Rational::one())],
        )
    }

    /// The horizontal circle `y = c` traversed rightward.
    pub fn horizontal(label: Label, y: Rational) -> Self {
        Curve::base(
            label,
            vec![RatPoint::new(Rational::zero(), y.clone()), RatPoint::new(Rational::one(), y)],
        )
    }

    pub fn reversed(&self) -> Curve {
        let legs = self
            .legs
            .iter()
            .rev()
            .map(|l| Leg { chart: l.chart, points: l.points.iter().rev().cloned().collect() })
            .collect();
        Curve { label: self.label, legs }
    }

    pub fn in_base_chart(&self) -> bool {
        self.legs.iter().all(|l| l.chart == BASE)
    }

    pub fn segment_count(&self) -> usize {
        self.legs.iter().map(|l| l.points.len() - 1).sum()
    }
}

/// A curve segment with its chart and closed bounding box.
#[derive(Clone, Debug)]
pub struct FlatSeg {
    pub chart: usize,
    pub leg: usize,
    pub seg: Segment,
    pub bbox: Rect,
}

impl FlatSeg {
    fn new(chart: usize, leg: usize, seg: Segment) -> Self {
        let bbox = Rect::new(
            RatPoint::new(seg.min_x().clone(), seg.min_y().clone()),
            RatPoint::new(seg.max_x().clone(), seg.max_y().clone()),
        );
        FlatSeg { chart, leg, seg, bbox }
    }
}

/// Point of a flattened curve at a position, in that segment's lifted coordinates.
pub fn point_at(flat: &[FlatSeg], pos: &CurvePos) -> RatPoint {
    flat[pos.seg].seg.at(&pos.t)
}

/// All segments of a curve in traversal order; consecutive entries (cyclically)
/// share a vertex up to the chart identifications.
pub fn flatten(c: &Curve) -> Result<Vec<FlatSeg>, SurfaceError> {
    let mut out = Vec::new();
    for (k, leg) in c.legs.iter().enumerate() {
        if leg.points.len() < 2 {
            return Err(SurfaceError::BadCurve { label: c.label, reason: format!("leg {k} has fewer than 2 points") });
        }
        for w in leg.points.windows(2) {
            let seg = Segment::new(w[0].clone(), w[1].clone()).map_err(|e| SurfaceError::BadCurve {
                label: c.label,
                reason: format!("leg {k}: {e}"),
            })?;
            out.push(FlatSeg::new(leg.chart, k, seg));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSystem {
    pub surface: Surface,
    pub curves: Vec<Curve>,
}

impl CurveSystem {
    /// Builds a system after checking the surface, labels, leg placement and closure.
    pub fn new(surface: Surface, curves: Vec<Curve>) -> Result<Self, SurfaceError> {
        surface.validate()?;
        let sys = CurveSystem { surface, curves };
        let mut seen = std::collections::BTreeSet::new();
        for c in &sys.curves {
            if !seen.insert(c.label) {
                return Err(SurfaceError::DuplicateLabel(c.label));
            }
            sys.check_curve(c)?;
        }
        Ok(sys)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.curves.iter().map(|c| c.label).collect()
    }

    pub fn curve(&self, label: Label) -> Result<&Curve, SurfaceError> {
        self.curves.iter().find(|c| c.label == label).ok_or(SurfaceError::UnknownLabel(label))
    }

    /// Replaces the curve carrying `c.label`, re-checking placement.
    pub fn with_curve(&self, c: Curve) -> Result<CurveSystem, SurfaceError> {
        self.check_curve(&c)?;
        let mut out = self.clone();
        match out.curves.iter_mut().find(|d| d.label == c.label) {
            Some(slot) => *slot = c,
            None => out.curves.push(c),
        }
        Ok(out)
    }

    pub fn check_curve(&self, c: &Curve) -> Result<(), SurfaceError> {
        let bad = |reason: String| Err(SurfaceError::BadCurve { label: c.label, reason });
        if c.legs.is_empty() {
            return bad("no legs".into());
        }
        let flat = flatten(c)?;
        let s = &self.surface;
        for (k, leg) in c.legs.iter().enumerate() {
            let Some(chart) = s.charts.get(leg.chart) else {
                return bad(format!("leg {k} names missing chart {}", leg.chart));
            };
            let e = &chart.extents;
            for p in &leg.points {
                let x_ok = chart.period_x().is_some() || (e.min.x <= p.x && p.x <= e.max.x);
                let y_ok = chart.period_y().is_some() || (e.min.y <= p.y && p.y <= e.max.y);
                if !(x_ok && y_ok) {
                    return bad(format!("leg {k} leaves its chart at {p}"));
                }
            }
            let next = &c.legs[(k + 1) % c.legs.len()];
            let end = leg.points.last().unwrap();
            if s.canonical(leg.chart, end) != s.canonical(next.chart, &next.points[0]) {
                return bad(format!("leg {k} does not close up with the next leg"));
            }
            if leg.chart != next.chart && chart.kind != ChartKind::HandleCylinder
                && s.charts[next.chart].kind != ChartKind::HandleCylinder
            {
                return bad(format!("leg {k} jumps between base charts"));
            }
        }
        for f in flat.iter().filter(|f| s.charts[f.chart].kind != ChartKind::HandleCylinder) {
            let chart = &s.charts[f.chart];
            for m in s.mouths.iter().filter(|m| m.chart == f.chart) {
                for v in chart.translates(&f.bbox, &m.square) {
                    if m.square.translate(&v).segment_enters_interior(&f.seg) {
                        return bad(format!("segment {} enters a removed mouth square", f.seg));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Where a point sits on a curve: flattened segment index and parameter in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurvePos {
    pub seg: usize,
    pub t: Rational,
}

/// One isolated common point of two curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit {
    pub chart: usize,
    pub point: RatPoint,
    pub kind: LocalKind,
    pub on_a: CurvePos,
    pub on_b: CurvePos,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartSegment {
    pub chart: usize,
    pub segment: Segment,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Cardinality {
    Finite { count: usize },
    InfiniteOverlap { overlaps: Vec<ChartSegment> },
}

impl Cardinality {
    pub fn finite(&self) -> Option<usize> {
        match self {
            Cardinality::Finite { count } => Some(*count),
            Cardinality::InfiniteOverlap { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportPoint {
    pub chart: usize,
    pub point: RatPoint,
    pub kind: LocalKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub pair: (Label, Label),
    pub cardinality: Cardinality,
    pub points: Vec<ReportPoint>,
}

impl IntersectionReport {
    pub fn all_crossing(&self) -> bool {
        self.points.iter().all(|p| p.kind == LocalKind::Crossing)
    }
}

/// Full pairwise analysis: isolated hits and maximal shared segments.
#[derive(Clone, Debug)]
pub struct PairAnalysis {
    pub hits: Vec<Hit>,
    pub overlaps: Vec<ChartSegment>,
}

fn strands(flat: &[FlatSeg], pos: &CurvePos, at: &RatPoint) -> Result<[RatPoint; 2], SurfaceError> {
    let n = flat.len();
    let here = &flat[pos.seg];
    let d = here.seg.dir();
    if pos.t.is_zero() {
        let prev = &flat[(pos.seg + n - 1) % n];
        if prev.chart != here.chart {
            return Err(SurfaceError::UnclassifiablePoint(Box::new(at.clone())));
        }
        Ok([d, -prev.seg.dir()])
    } else {
        Ok([d.clone(), -d])
    }
}

fn normalize_pos(flat: &[FlatSeg], seg: usize, t: Rational) -> CurvePos {
    if t.is_one() {
        CurvePos { seg: (seg + 1) % flat.len(), t: Rational::zero() }
    } else {
        CurvePos { seg, t }
    }
}

fn union_collinear(a: &Segment, b: &Segment) -> Segment {
    let pts = [&a.a, &a.b, &b.a, &b.b];
    let params: Vec<Rational> = pts.iter().map(|p| a.param_of(p)).collect();
    let (lo, hi) = params.iter().enumerate().fold((0, 0), |(lo, hi), (k, t)| {
        (if *t < params[lo] { k } else { lo }, if *t > params[hi] { k } else { hi })
    });
    Segment { a: pts[lo].clone(), b: pts[hi].clone() }
}

fn seg_bbox(s: &Segment) -> Rect {
    FlatSeg::new(0, 0, s.clone()).bbox
}

impl Surface {
    /// Merges shared pieces into maximal segments, each anchored with its
    /// lexicographically smaller endpoint reduced into the chart.
    fn merge_overlaps(&self, mut pieces: Vec<ChartSegment>) -> Vec<ChartSegment> {
        'outer: loop {
            for i in 0..pieces.len() {
                for j in i + 1..pieces.len() {
                    if pieces[i].chart != pieces[j].chart {
                        continue;
                    }
                    let chart = &self.charts[pieces[i].chart];
                    let (si, sj) = (&pieces[i].segment, &pieces[j].segment);
                    for v in chart.translates(&seg_bbox(si), &seg_bbox(sj)) {
                        let t = sj.translate(&v);
                        if !cross(&si.dir(), &t.dir()).is_zero() {
                            continue;
                        }
                        if segment_intersect(si, &t) != SegmentIntersection::Empty {
                            let merged = union_collinear(si, &t);
                            pieces[i].segment = merged;
                            pieces.swap_remove(j);
                            continue 'outer;
                        }
                    }
                }
            }
            break;
        }
        let mut out: Vec<ChartSegment> = pieces
            .into_iter()
            .map(|p| {
                let s = p.segment.normalized();
                let anchor = self.charts[p.chart].reduce(&s.a);
                let shift = &anchor - &s.a;
                ChartSegment { chart: p.chart, segment: s.translate(&shift) }
            })
            .collect();
        out.sort_by(|a, b| (a.chart, &a.segment.a, &a.segment.b).cmp(&(b.chart, &b.segment.a, &b.segment.b)));
        out
    }

    fn on_overlap(&self, chart: usize, p: &RatPoint, overlaps: &[ChartSegment]) -> bool {
        let pr = Rect::new(p.clone(), p.clone());
        overlaps.iter().filter(|o| o.chart == chart).any(|o| {
            self.charts[chart]
                .translates(&seg_bbox(&o.segment), &pr)
                .iter()
                .any(|v| o.segment.contains(&(p + v)))
        })
    }

    /// Exact common points and shared segments of two curves on this surface.
    pub fn analyze_pair(&self, a: &Curve, b: &Curve) -> Result<PairAnalysis, SurfaceError> {
        let fa = flatten(a)?;
        let fb = flatten(b)?;
        let mut raw: Vec<(usize, RatPoint, CurvePos, CurvePos)> = Vec::new();
        let mut pieces = Vec::new();
        for (i, sa) in fa.iter().enumerate() {
            for (j, sb) in fb.iter().enumerate() {
                if sa.chart != sb.chart {
                    continue;
                }
                let chart = &self.charts[sa.chart];
                for v in chart.translates(&sa.bbox, &sb.bbox) {
                    let t = sb.seg.translate(&v);
                    match segment_intersect(&sa.seg, &t) {
                        SegmentIntersection::Empty => {}
                        SegmentIntersection::Point(p) => {
                            let pa = normalize_pos(&fa, i, sa.seg.param_of(&p));
                            let pb = normalize_pos(&fb, j, t.param_of(&p));
                            raw.push((sa.chart, p, pa, pb));
                        }
                        SegmentIntersection::Overlap(s) => {
                            pieces.push(ChartSegment { chart: sa.chart, segment: s });
                        }
                    }
                }
            }
        }
        let overlaps = self.merge_overlaps(pieces);
        let mut seen: BTreeMap<(usize, RatPoint), Hit> = BTreeMap::new();
        for (chart, p, pa, pb) in raw {
            let key = self.canonical(chart, &p);
            if seen.contains_key(&key) || self.on_overlap(chart, &p, &overlaps) {
                continue;
            }
            let star = LocalStar {
                center: p.clone(),
                dirs_a: strands(&fa, &pa, &p)?,
                dirs_b: strands(&fb, &pb, &p)?,
            };
            let kind = classify_local(&star).map_err(|_| SurfaceError::UnclassifiablePoint(Box::new(key.1.clone())))?;
            let hit = Hit { chart: key.0, point: key.1.clone(), kind, on_a: pa, on_b: pb };
            seen.insert(key, hit);
        }
        let mut hits: Vec<Hit> = seen.into_values().collect();
        hits.sort_by(|x, y| x.on_a.cmp(&y.on_a));
        Ok(PairAnalysis { hits, overlaps })
    }

    pub fn report_curves(&self, a: &Curve, b: &Curve) -> Result<IntersectionReport, SurfaceError> {
        let an = self.analyze_pair(a, b)?;
        let mut points: Vec<ReportPoint> =
            an.hits.iter().map(|h| ReportPoint { chart: h.chart, point: h.point.clone(), kind: h.kind }).collect();
        points.sort_by(|x, y| (x.chart, &x.point).cmp(&(y.chart, &y.point)));
        let cardinality = if an.overlaps.is_empty() {
            Cardinality::Finite { count: points.len() }
        } else {
            Cardinality::InfiniteOverlap { overlaps: an.overlaps }
        };
        Ok(IntersectionReport { pair: (a.label, b.label), cardinality, points })
    }

    /// Whether the curve has no self-intersections beyond its own vertex joints.
    pub fn curve_is_embedded(&self, c: &Curve) -> Result<bool, SurfaceError> {
        let f = flatten(c)?;
        let n = f.len();
        let joint = |k: usize| self.canonical(f[k].chart, &f[k].seg.b);
        for i in 0..n {
            for j in i..n {
                if f[i].chart != f[j].chart {
                    continue;
                }
                let chart = &self.charts[f[i].chart];
                let consecutive: Vec<(usize, RatPoint)> = [(i, j), (j, i)]
                    .iter()
                    .filter(|(x, y)| (x + 1) % n == *y)
                    .map(|(x, _)| joint(*x))
                    .collect();
                for v in chart.translates(&f[i].bbox, &f[j].bbox) {
                    if i == j && v.is_zero() {
                        continue;
                    }
                    match segment_intersect(&f[i].seg, &f[j].seg.translate(&v)) {
                        SegmentIntersection::Empty => {}
                        SegmentIntersection::Overlap(_) => return Ok(false),
                        SegmentIntersection::Point(p) => {
                            if !consecutive.contains(&self.canonical(f[i].chart, &p)) {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Net lattice displacement of a base-chart curve, in units of the periods.
    pub fn curve_class(&self, c: &Curve) -> Result<(i64, i64), SurfaceError> {
        if !c.in_base_chart() {
            return Err(SurfaceError::NotBaseChartCurve(c.label));
        }
        let mut d = RatPoint::zero();
        for leg in &c.legs {
            d = &d + &(leg.points.last().unwrap() - &leg.points[0]);
        }
        let chart = self.base();
        let unit = |v: &Rational, period: Option<Rational>| -> Result<i64, SurfaceError> {
            let q = match period {
                Some(w) => v / w,
                None => v.clone(),
            };
            if !q.is_integer() {
                return Err(SurfaceError::BadCurve { label: c.label, reason: "curve does not close".into() });
            }
            Ok(q.to_integer().to_i64().unwrap_or(i64::MAX))
        };
        Ok((unit(&d.x, chart.period_x())?, unit(&d.y, chart.period_y())?))
    }

    /// Whether every segment of `a` is covered by segments of the curves in `others`.
    pub fn covered_by(&self, a: &Curve, others: &[&Curve]) -> Result<bool, SurfaceError> {
        let fa = flatten(a)?;
        let fo: Vec<Vec<FlatSeg>> = others.iter().map(|c| flatten(c)).collect::<Result<_, _>>()?;
        for sa in &fa {
            let chart = &self.charts[sa.chart];
            let mut spans: Vec<(Rational, Rational)> = Vec::new();
            for sb in fo.iter().flatten().filter(|s| s.chart == sa.chart) {
                for v in chart.translates(&sa.bbox, &sb.bbox) {
                    if let SegmentIntersection::Overlap(o) =
                        segment_intersect(&sa.seg, &sb.seg.translate(&v))
                    {
                        let (t0, t1) = (sa.seg.param_of(&o.a), sa.seg.param_of(&o.b));
                        spans.push(if t0 <= t1 { (t0, t1) } else { (t1, t0) });
                    }
                }
            }
            spans.sort();
            let mut reach = Rational::zero();
            for (lo, hi) in spans {
                if lo > reach {
                    break;
                }
                if hi > reach {
                    reach = hi;
                }
            }
            if !reach.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn intersection_report(sys: &CurveSystem, a: Label, b: Label) -> Result<IntersectionReport, SurfaceError> {
    sys.surface.report_curves(sys.curve(a)?, sys.curve(b)?)
}

pub fn is_embedded(sys: &CurveSystem, a: Label) -> Result<bool, SurfaceError> {
    sys.surface.curve_is_embedded(sys.curve(a)?)
}

pub fn torus_class(sys: &CurveSystem, a: Label) -> Result<(i64, i64), SurfaceError> {
    sys.surface.curve_class(sys.curve(a)?)
}

pub fn is_contained_in_union(sys: &CurveSystem, a: Label, others: &[Label]) -> Result<bool, SurfaceError> {
    let ca = sys.curve(a)?;
    let os: Vec<&Curve> = others.iter().map(|&l| sys.curve(l)).collect::<Result<_, _>>()?;
    sys.surface.covered_by(ca, &os)
}
