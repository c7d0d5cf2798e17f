use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{simplify, RealizationCertificate, RealizeError, Semantics, TraceStep};
use crate::exactgeom::{floor_int, int, rat, rem_euclid, LocalKind, RatPoint, Rational};
use crate::graph::Graph;
use crate::surfaces::{intersection_report, ChartKind, Curve, CurveSystem, Label};
use crate::verifier::check_certificate;

/// Inductive ways of growing a fine-semantics realization by one vertex or a clique.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// New vertex adjacent to nothing.
    AddIsolated,
    /// New vertex adjacent only to `u`.
    AddPendant(Label),
    /// New vertex with the neighbourhood of `w`, not adjacent to `w`.
    AddCopycat(Label),
    /// Replace `w` by a clique of `m` vertices sharing its neighbourhood.
    BlowupClique(Label, usize),
    /// Clique of `m` new vertices adjacent only to each other and to `w`.
    ConeClique(Label, usize),
}

/// A closed curve that is a graph over one period of `y`: heights strictly increase
/// from `pts[0].y` to `pts[0].y + 1`.
#[derive(Clone, Debug)]
struct Mono {
    pts: Vec<RatPoint>,
}

impl Mono {
    fn from_curve(c: &Curve) -> Option<Mono> {
        let mut pts: Vec<RatPoint> = Vec::new();
        for leg in &c.legs {
            let shift = match pts.last() {
                Some(end) => end - &leg.points[0],
                None => RatPoint::zero(),
            };
            let skip = usize::from(!pts.is_empty());
            pts.extend(leg.points.iter().skip(skip).map(|p| p + &shift));
        }
        let rise = &pts.last()?.y - &pts[0].y;
        if rise == -Rational::one() {
            pts.reverse();
        } else if !rise.is_one() {
            return None;
        }
        pts.windows(2).all(|w| w[0].y < w[1].y).then_some(Mono { pts })
    }

    fn slope_x(&self) -> Rational {
        &self.pts.last().unwrap().x - &self.pts[0].x
    }

    /// Lifted abscissa at lifted height `y`.
    fn eval(&self, y: &Rational) -> Rational {
        let y0 = &self.pts[0].y;
        let k = Rational::from_integer(floor_int(&(y - y0)));
        let yy = y - &k;
        let i = self.pts.windows(2).position(|w| w[0].y <= yy && yy <= w[1].y).unwrap();
        let (a, b) = (&self.pts[i], &self.pts[i + 1]);
        let t = (&yy - &a.y) / (&b.y - &a.y);
        &a.x + t * (&b.x - &a.x) + k * self.slope_x()
    }

    fn heights(&self) -> impl Iterator<Item = Rational> + '_ {
        self.pts.iter().map(|p| rem_euclid(&p.y, &Rational::one()))
    }

    /// Same curve traversed from height `start` (lifted to start in `[0, 1)` in both coordinates).
    fn rebased(&self, start: &Rational) -> Mono {
        let p = self.slope_x();
        let x0 = self.eval(start);
        let shift = -Rational::from_integer(floor_int(&x0));
        let at = |y: &Rational| RatPoint::new(self.eval(y) + &shift, y.clone());
        let end = start + Rational::one();
        let mut pts = vec![at(start)];
        let k0 = floor_int(&(start - &self.pts[0].y)).to_i64().unwrap_or(0);
        for lift in k0 - 1..=k0 + 1 {
            for q in &self.pts[..self.pts.len() - 1] {
                let y = &q.y + int(lift);
                if *start < y && y < end {
                    pts.push(RatPoint::new(&q.x + int(lift) * &p + &shift, y));
                }
            }
        }
        pts.push(at(&end));
        pts.sort_by(|a, b| a.y.cmp(&b.y));
        Mono { pts }
    }

    fn to_curve(&self, label: Label) -> Curve {
        Curve::base(label, simplify(self.pts.clone()))
    }
}

/// Replaces the stretch over `(s0, s3)` by a vertical run over `[s1, s2]`.
fn freeze(m: &Mono, s: &[Rational; 4]) -> Mono {
    let at = |y: &Rational| RatPoint::new(m.eval(y), y.clone());
    let mid = (&s[1] + &s[2]) / int(2);
    let px = m.eval(&mid);
    let mut pts: Vec<RatPoint> = m.pts.iter().filter(|p| p.y <= s[0]).cloned().collect();
    pts.extend([at(&s[0]), RatPoint::new(px.clone(), s[1].clone()), RatPoint::new(px, s[2].clone()), at(&s[3])]);
    pts.extend(m.pts.iter().filter(|p| p.y >= s[3]).cloned());
    pts.dedup();
    Mono { pts }
}

struct Frozen {
    curves: Vec<(Label, Mono)>,
    band: [Rational; 4],
}

impl Frozen {
    fn get(&self, l: Label) -> &Mono {
        &self.curves.iter().find(|(m, _)| *m == l).unwrap().1
    }

    fn band_x(&self, l: Label) -> Rational {
        self.get(l).eval(&self.band[1])
    }

    /// Smallest positive gap, to the right (`sign = 1`) or left, between `parent` and
    /// any other curve over all vertex heights.
    fn clearance(&self, parent: Label, sign: i64) -> Rational {
        let par = self.get(parent);
        let mut best = Rational::one();
        for (l, m) in &self.curves {
            if *l == parent {
                continue;
            }
            for mm in [par, m] {
                for y in mm.heights() {
                    let d = rem_euclid(&(int(sign) * (m.eval(&y) - par.eval(&y))), &Rational::one());
                    if d.is_positive() && d < best {
                        best = d;
                    }
                }
            }
        }
        best
    }
}

fn inapplicable(msg: impl Into<String>) -> RealizeError {
    RealizeError::RuleInapplicable(msg.into())
}

fn freeze_system(cert: &RealizationCertificate) -> Result<Frozen, RealizeError> {
    let sys = &cert.system;
    if sys.surface.base().kind != ChartKind::TorusSquare || sys.surface.handle_count() > 0 {
        return Err(inapplicable("extension needs a torus without handles"));
    }
    let mut monos = Vec::new();
    for c in &sys.curves {
        if !c.in_base_chart() {
            return Err(inapplicable(format!("curve {} leaves the base chart", c.label)));
        }
        let m = Mono::from_curve(c).ok_or_else(|| inapplicable(format!("curve {} is not y-monotone", c.label)))?;
        monos.push((c.label, m));
    }
    let mut events: Vec<Rational> = monos.iter().flat_map(|(_, m)| m.heights().collect::<Vec<_>>()).collect();
    let labels = sys.labels();
    for (i, &a) in labels.iter().enumerate() {
        for &b in &labels[i + 1..] {
            let r = intersection_report(sys, a, b)?;
            events.extend(r.points.iter().map(|p| p.point.y.clone()));
        }
    }
    events.sort();
    events.dedup();
    let (mut lo, mut gap) = (events.last().unwrap().clone(), &events[0] + Rational::one() - events.last().unwrap());
    for w in events.windows(2) {
        let g = &w[1] - &w[0];
        if g > gap {
            gap = g;
            lo = w[0].clone();
        }
    }
    let band = [1, 2, 3, 4].map(|k| &lo + &gap * rat(k, 5));
    let curves = monos.into_iter().map(|(l, m)| (l, freeze(&m.rebased(&lo), &band))).collect();
    Ok(Frozen { curves, band })
}

/// The parent shifted by `shift` (and by `lap` more above the band), with the
/// stretch strictly inside the band replaced by `band_path`.
fn copy_with_band(
    par: &Mono,
    shift: &Rational,
    lap: &Rational,
    band: &[Rational; 4],
    band_path: Vec<(Rational, Rational)>,
) -> Mono {
    let mut pts: Vec<RatPoint> = par
        .pts
        .iter()
        .filter(|p| p.y <= band[1] || p.y >= band[2])
        .map(|p| {
            let extra = if p.y >= band[2] { lap.clone() } else { Rational::zero() };
            RatPoint::new(&p.x + shift + extra, p.y.clone())
        })
        .collect();
    pts.extend(band_path.into_iter().map(|(x, y)| RatPoint::new(x, y)));
    pts.sort_by(|a, b| a.y.cmp(&b.y));
    pts.dedup();
    Mono { pts }
}

/// Grows a fine-semantics torus realization by one of the inductive rules.
///
/// Existing curves must be graphs over the vertical direction. The system is first
/// straightened over a band free of vertices and intersections; new curves are
/// parallel copies of a parent curve that perform their extra crossings inside
/// that band.
pub fn extend(cert: &RealizationCertificate, rule: Rule) -> Result<RealizationCertificate, RealizeError> {
    if cert.semantics != Semantics::Fine {
        return Err(inapplicable("extension needs fine semantics"));
    }
    let verdict = check_certificate(cert);
    if !verdict.ok {
        return Err(inapplicable("input certificate does not verify"));
    }
    let has = |l: Label| cert.system.labels().contains(&l);
    match rule {
        Rule::AddPendant(u) | Rule::AddCopycat(u) | Rule::BlowupClique(u, _) | Rule::ConeClique(u, _) if !has(u) => {
            return Err(inapplicable(format!("no vertex {u}")))
        }
        Rule::AddIsolated if cert.system.curves.is_empty() => return Err(inapplicable("empty system")),
        Rule::BlowupClique(_, 0) | Rule::ConeClique(_, 0) => return Err(inapplicable("clique size must be positive")),
        _ => {}
    }
    match rule {
        Rule::ConeClique(w, m) => {
            let with_pendant = extend(cert, Rule::AddPendant(w))?;
            let v = cert.graph.n();
            let mut out = extend(&with_pendant, Rule::BlowupClique(v, m))?;
            out.construction.push(TraceStep::new(format!("cone clique of size {m} on {w}"), (v..v + m).collect()));
            Ok(out)
        }
        Rule::BlowupClique(w, m) => blowup(cert, w, m),
        _ => {
            let mut last = None;
            for sign in [1, -1] {
                match add_one(cert, rule, sign) {
                    Ok(out) => return Ok(out),
                    Err(e) => last = Some(e),
                }
            }
            Err(last.unwrap())
        }
    }
}

fn add_one(cert: &RealizationCertificate, rule: Rule, sign: i64) -> Result<RealizationCertificate, RealizeError> {
    let frozen = freeze_system(cert)?;
    let new = cert.graph.n();
    let (parent, name) = match rule {
        Rule::AddIsolated => (cert.system.curves[0].label, "isolated vertex".to_string()),
        Rule::AddPendant(u) => (u, format!("pendant on {u}")),
        Rule::AddCopycat(w) => (w, format!("copycat of {w}")),
        _ => unreachable!(),
    };
    let sg = int(sign);
    let eps = frozen.clearance(parent, sign) / int(2) * &sg;
    let base = frozen.band_x(parent);
    let b = &frozen.band;
    let t1 = &b[1] + (&b[2] - &b[1]) / int(3);
    let t2 = &b[1] + (&b[2] - &b[1]) * rat(2, 3);
    let others: Vec<Rational> = frozen
        .curves
        .iter()
        .filter(|(l, _)| *l != parent)
        .map(|(l, _)| rem_euclid(&(&sg * (frozen.band_x(*l) - &base)), &Rational::one()))
        .collect();
    let lap = if rule == Rule::AddIsolated { sg.clone() } else { Rational::zero() };
    let path = match rule {
        Rule::AddIsolated => vec![],
        Rule::AddPendant(_) => {
            let far = others.iter().max().cloned().unwrap_or_else(Rational::zero);
            let t = &base + &sg * (Rational::one() + far) / int(2);
            vec![(t.clone(), t1), (t, t2)]
        }
        Rule::AddCopycat(_) => {
            let near = others.iter().max().map(|r| Rational::one() - r).unwrap_or_else(Rational::one);
            let t = &base - &sg * near / int(2);
            vec![(t.clone(), t1), (t, t2)]
        }
        _ => unreachable!(),
    };
    let copy = copy_with_band(frozen.get(parent), &eps, &lap, b, path);
    let mut graph = cert.graph.with_vertex();
    match rule {
        Rule::AddPendant(u) => graph.add_edge(u, new),
        Rule::AddCopycat(w) => {
            for x in cert.graph.neighbors(w) {
                graph.add_edge(x, new);
            }
        }
        _ => {}
    }
    let mut curves: Vec<Curve> = frozen.curves.iter().map(|(l, m)| m.to_curve(*l)).collect();
    curves.push(copy.to_curve(new));
    finish(cert, graph, curves, TraceStep::new(name, vec![new]))
}

fn blowup(cert: &RealizationCertificate, w: Label, m: usize) -> Result<RealizationCertificate, RealizeError> {
    let labels = cert.system.labels();
    for (i, &a) in labels.iter().enumerate() {
        for &b in &labels[i + 1..] {
            let r = intersection_report(&cert.system, a, b)?;
            if r.cardinality.finite().is_none() || r.points.iter().any(|p| p.kind == LocalKind::Touching) {
                return Err(inapplicable("blowup needs every intersection finite and crossing"));
            }
        }
    }
    let frozen = freeze_system(cert)?;
    let eps = frozen.clearance(w, 1) / int(2 * m as i64);
    let n = cert.graph.n();
    let mut graph = cert.graph.clone();
    let mut curves: Vec<Curve> = frozen.curves.iter().map(|(l, mm)| mm.to_curve(*l)).collect();
    let par = frozen.get(w);
    let clique: Vec<Label> = std::iter::once(w).chain(n..n + m - 1).collect();
    for (k, &l) in clique.iter().enumerate().skip(1) {
        graph = graph.with_vertex();
        let shift = &eps * int(k as i64);
        let pts = par.pts.iter().map(|p| RatPoint::new(&p.x + &shift, p.y.clone())).collect();
        curves.push(Mono { pts }.to_curve(l));
    }
    for (k, &l) in clique.iter().enumerate().skip(1) {
        for x in cert.graph.neighbors(w) {
            graph.add_edge(x, l);
        }
        for &o in &clique[..k] {
            graph.add_edge(o, l);
        }
    }
    finish(cert, graph, curves, TraceStep::new(format!("blowup of {w} to a clique of size {m}"), clique))
}

fn finish(
    cert: &RealizationCertificate,
    graph: Graph,
    mut curves: Vec<Curve>,
    step: TraceStep,
) -> Result<RealizationCertificate, RealizeError> {
    curves.sort_by_key(|c| c.label);
    let system = CurveSystem::new(cert.system.surface.clone(), curves)?;
    let mut construction = cert.construction.clone();
    construction.push(step);
    let out = RealizationCertificate { graph, semantics: Semantics::Fine, system, construction };
    if !check_certificate(&out).ok {
        return Err(inapplicable("extended system does not realize the extended graph"));
    }
    Ok(out)
}
