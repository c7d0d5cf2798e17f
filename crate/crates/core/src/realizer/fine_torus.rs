use num_traits::{One, Zero};

use super::{check_graph, simplify, RealizationCertificate, RealizeError, Semantics, TraceStep};
use crate::exactgeom::{int, RatPoint, Rational};
use crate::graph::Graph;
use crate::surfaces::{build_surface, Curve, CurveSystem, FineLayout, Leg, SurfaceSpec, BASE};

enum Detour {
    /// Through the handle of the pair towards curve `j`.
    Handle { j: usize, chart: usize },
    /// Across the curve sitting at lifted abscissa `target`.
    Wiggle { target: Rational },
}

/// Realizes `g` under fine semantics on the torus with one handle per non-consecutive pair.
///
/// Curve `i` is the vertical circle `x = (2i+1)/(2n)`. Each non-adjacent pair crosses
/// exactly twice: through the pair's handle when it has one, otherwise by a small
/// wiggle of one curve across the other.
pub fn realize_fine_torus(g: &Graph) -> Result<RealizationCertificate, RealizeError> {
    check_graph(g, 2)?;
    let n = g.n();
    let layout = FineLayout::new(n);
    let surface = build_surface(SurfaceSpec::FineHandles(n))?;
    let handle_chart = |i: usize, j: usize| {
        layout.handle_pairs().iter().position(|&p| p == (i, j)).map(|k| k + 1)
    };

    let mut detours: Vec<Vec<(Rational, Detour)>> = (0..n).map(|_| Vec::new()).collect();
    let mut trace = Vec::new();
    for (i, j) in Graph::pairs(n) {
        if g.has_edge(i, j) {
            continue;
        }
        let h = layout.height(i, j);
        if let Some(chart) = handle_chart(i, j) {
            detours[i].push((h, Detour::Handle { j, chart }));
            trace.push(TraceStep::new(format!("handle detour through A_{{{i},{j}}}"), vec![i, j]));
        } else if j == i + 1 {
            detours[i].push((h, Detour::Wiggle { target: layout.x(j) }));
            trace.push(TraceStep::new(format!("wiggle of {i} across {j}"), vec![i, j]));
        } else {
            detours[j].push((h, Detour::Wiggle { target: layout.x(i) + Rational::one() }));
            trace.push(TraceStep::new(format!("wiggle of {j} across {i} through the seam"), vec![i, j]));
        }
    }

    let quarter = &layout.side / int(4);
    let mut curves = Vec::with_capacity(n);
    for (i, mut ds) in detours.into_iter().enumerate() {
        ds.sort_by(|a, b| a.0.cmp(&b.0));
        let xi = layout.x(i);
        let at = |x: &Rational, y: &Rational| RatPoint::new(x.clone(), y.clone());
        let mut legs = Vec::new();
        let mut cur = vec![at(&xi, &Rational::zero())];
        for (h, d) in ds {
            let (y1, y2) = (&h - &quarter, &h + &quarter);
            match d {
                Detour::Wiggle { target } => {
                    let far = &target + &layout.gap;
                    cur.extend([at(&xi, &y1), at(&far, &y1), at(&far, &y2), at(&xi, &y2)]);
                }
                Detour::Handle { j, chart } => {
                    let (m1, m2) = layout.mouth_squares(i, j);
                    let (a0, b1) = (m1.min.x.clone(), m2.max.x.clone());
                    let far = layout.x(j) + &layout.gap;
                    cur.extend([at(&xi, &y1), at(&a0, &y1)]);
                    legs.push(Leg { chart: BASE, points: simplify(std::mem::take(&mut cur)) });
                    let (t1, t3) = (quarter.clone(), &quarter * int(3));
                    legs.push(Leg {
                        chart,
                        points: vec![RatPoint::new(Rational::zero(), t1.clone()), RatPoint::new(Rational::one(), t1)],
                    });
                    legs.push(Leg {
                        chart: BASE,
                        points: vec![at(&b1, &y1), at(&far, &y1), at(&far, &y2), at(&b1, &y2)],
                    });
                    legs.push(Leg {
                        chart,
                        points: vec![RatPoint::new(Rational::one(), t3.clone()), RatPoint::new(Rational::zero(), t3)],
                    });
                    cur = vec![at(&a0, &y2), at(&xi, &y2)];
                }
            }
        }
        cur.push(at(&xi, &Rational::one()));
        legs.push(Leg { chart: BASE, points: simplify(cur) });
        curves.push(Curve { label: i, legs });
    }
    let mut construction = vec![TraceStep::new("vertical circles x = (2i+1)/(2n)", (0..n).collect())];
    construction.extend(trace);
    Ok(RealizationCertificate {
        graph: g.clone(),
        semantics: Semantics::Fine,
        system: CurveSystem::new(surface, curves)?,
        construction,
    })
}
