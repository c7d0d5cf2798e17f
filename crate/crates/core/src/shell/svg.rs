//! SVG figures of curve systems: the base chart as a square frame, handle
//! cylinders as panels to its right, dashed lines joining each mouth to its end.

use std::fmt::Write as _;
use std::path::Path;

use num_traits::Zero;

use crate::exactgeom::{ceil_int, floor_int, to_f64, RatPoint, Rational, Segment};
use crate::surfaces::{flatten, Chart, ChartKind, CurveSystem, HandleEnd, SurfaceLabel, BASE};

const MARGIN: f64 = 24.0;
const BASE_PX: f64 = 480.0;
const PANEL_PX: f64 = 120.0;
const PANEL_GAP: f64 = 24.0;
const PANEL_ROWS: usize = 3;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
];

/// Pixel placement of one chart.
struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn map(&self, chart: &Chart, p: &RatPoint) -> (f64, f64) {
        let e = &chart.extents;
        let fx = to_f64(&((&p.x - &e.min.x) / e.width()));
        let fy = to_f64(&((&p.y - &e.min.y) / e.height()));
        (self.x0 + fx * self.w, self.y0 + (1.0 - fy) * self.h)
    }
}

fn frames(sys: &CurveSystem) -> Vec<Frame> {
    let mut out = vec![Frame { x0: MARGIN, y0: MARGIN, w: BASE_PX, h: BASE_PX }];
    for k in 0..sys.surface.charts.len() - 1 {
        let (col, row) = (k / PANEL_ROWS, k % PANEL_ROWS);
        out.push(Frame {
            x0: MARGIN + BASE_PX + PANEL_GAP + col as f64 * (PANEL_PX + PANEL_GAP),
            y0: MARGIN + row as f64 * (PANEL_PX + PANEL_GAP),
            w: PANEL_PX,
            h: PANEL_PX,
        });
    }
    out
}

/// Cuts a lifted segment where it crosses the chart's seams and moves each
/// piece into the fundamental domain.
fn wrap_segment(chart: &Chart, s: &Segment) -> Vec<(RatPoint, RatPoint)> {
    let d = s.dir();
    let mut cuts: Vec<Rational> = vec![Rational::zero(), Rational::from_integer(1.into())];
    let axes = [
        (chart.period_x(), &chart.extents.min.x, s.min_x(), s.max_x(), &s.a.x, &d.x),
        (chart.period_y(), &chart.extents.min.y, s.min_y(), s.max_y(), &s.a.y, &d.y),
    ];
    for (period, base, lo, hi, start, dv) in axes {
        let Some(w) = period else { continue };
        if dv.is_zero() {
            continue;
        }
        let (k0, k1) = (ceil_int(&((lo - base) / &w)), floor_int(&((hi - base) / &w)));
        let mut k = k0;
        while k <= k1 {
            let t = (base + Rational::from_integer(k.clone()) * &w - start) / dv;
            if t > Rational::zero() && t < Rational::from_integer(1.into()) {
                cuts.push(t);
            }
            k += 1;
        }
    }
    cuts.sort();
    cuts.dedup();
    cuts.windows(2)
        .map(|c| {
            let (p, q) = (s.at(&c[0]), s.at(&c[1]));
            let mid = p.lerp(&q, &Rational::new(1.into(), 2.into()));
            let shift = &chart.reduce(&mid) - &mid;
            (&p + &shift, &q + &shift)
        })
        .collect()
}

fn px(v: f64) -> String {
    format!("{v:.3}")
}

/// Deterministic SVG text for a curve system.
pub fn render_svg(sys: &CurveSystem) -> String {
    let s = &sys.surface;
    let fr = frames(sys);
    let cols = (s.charts.len() - 1).div_ceil(PANEL_ROWS);
    let width = 2.0 * MARGIN + BASE_PX + cols as f64 * (PANEL_PX + PANEL_GAP);
    let height = 2.0 * MARGIN + BASE_PX + 20.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        px(width),
        px(height),
        px(width),
        px(height)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let title = match &s.label {
        SurfaceLabel::Torus => "torus".to_string(),
        SurfaceLabel::Annulus => "annulus".to_string(),
        SurfaceLabel::FineHandles { n } => format!("torus with {} handles (n = {n})", s.handle_count()),
    };
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14">{title}</text>"#,
        px(MARGIN),
        px(MARGIN + BASE_PX + 18.0)
    );

    let b = &fr[BASE];
    let base = s.base();
    let _ = writeln!(
        out,
        r#"<rect class="chart" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        px(b.x0),
        px(b.y0),
        px(b.w),
        px(b.h)
    );
    if base.kind == ChartKind::AnnulusRect {
        for x in [b.x0, b.x0 + b.w] {
            let _ = writeln!(
                out,
                r#"<line class="boundary" x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="4"/>"#,
                px(x),
                px(b.y0),
                px(x),
                px(b.y0 + b.h)
            );
        }
    }

    for (h, f) in fr.iter().enumerate().skip(1) {
        let _ = writeln!(out, r#"<g class="handle" id="handle-{h}">"#);
        let _ = writeln!(
            out,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#f6f6f6" stroke="black"/>"##,
            px(f.x0),
            px(f.y0),
            px(f.w),
            px(f.h)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">h{h}</text>"#,
            px(f.x0 + 4.0),
            px(f.y0 + 12.0)
        );
        for m in s.mouths.iter().filter(|m| m.handle == h) {
            let (lo, hi) = (&m.square.min, &m.square.max);
            let (x1, y1) = b.map(base, &RatPoint::new(lo.x.clone(), hi.y.clone()));
            let (x2, y2) = b.map(base, &RatPoint::new(hi.x.clone(), lo.y.clone()));
            let _ = writeln!(
                out,
                r#"<rect class="mouth" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="0.5"/>"#,
                px(x1),
                px(y1),
                px((x2 - x1).max(0.5)),
                px((y2 - y1).max(0.5))
            );
            let (cx, cy) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
            let end_x = match m.end {
                HandleEnd::Start => f.x0,
                HandleEnd::Finish => f.x0 + f.w,
            };
            let _ = writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="5" fill="none" stroke="gray" stroke-dasharray="2 2"/>"#,
                px(cx),
                px(cy)
            );
            let _ = writeln!(
                out,
                r#"<line class="gluing" x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-width="0.5" stroke-dasharray="4 3"/>"#,
                px(cx),
                px(cy),
                px(end_x),
                px(f.y0 + f.h / 2.0)
            );
        }
        let _ = writeln!(out, "</g>");
    }

    for c in &sys.curves {
        let Ok(flat) = flatten(c) else { continue };
        let mut d = String::new();
        let mut last: Option<(usize, RatPoint)> = None;
        for f in &flat {
            let chart = &s.charts[f.chart];
            for (p, q) in wrap_segment(chart, &f.seg) {
                let (x1, y1) = fr[f.chart].map(chart, &p);
                let (x2, y2) = fr[f.chart].map(chart, &q);
                if last.as_ref() != Some(&(f.chart, p.clone())) {
                    let _ = write!(d, "M{} {} ", px(x1), px(y1));
                }
                let _ = write!(d, "L{} {} ", px(x2), px(y2));
                last = Some((f.chart, q));
            }
        }
        let color = PALETTE[c.label % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<path class="curve" data-label="{}" d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            c.label,
            d.trim_end()
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(sys: &CurveSystem, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_svg(sys))
}
