use num_traits::{One, Zero};

use super::{check_graph, simplify, RealizationCertificate, RealizeError, Semantics, TraceStep};
use crate::exactgeom::{int, rat, RatPoint, Rational};
use crate::graph::Graph;
use crate::surfaces::{build_surface, Curve, CurveSystem, SurfaceSpec};

/// Radial position of the curve with rank `m >= 1`.
fn radial(m: usize) -> Rational {
    rat(1, m as i64 + 1)
}

/// The height band reserved for the finger of the curve with rank `m`.
fn band(m: usize) -> (Rational, Rational) {
    let m = m as i64;
    (rat(2 * m + 3, 2 * (m + 1) * (m + 2)), rat(2 * m + 1, 2 * m * (m + 1)))
}

/// Realizes `g` on the annulus under `KFine` or `Finitary` semantics.
///
/// Vertex `v` sits at radius `1/(v+2)`. Every later curve pushes a finger across all
/// earlier ones inside its own band, giving two crossings per pair. For a non-edge the
/// lower strand either runs along the earlier curve for a short stretch (finitary) or
/// zigzags across it until the count exceeds `k`.
pub fn realize_annulus(g: &Graph, sem: Semantics) -> Result<RealizationCertificate, RealizeError> {
    check_graph(g, 1)?;
    let zigzag_passes = match sem {
        Semantics::Fine => return Err(RealizeError::UnsupportedSemantics(sem)),
        Semantics::Finitary => None,
        Semantics::KFine { k } => Some(2 * (k / 2) + 1),
    };
    let n = g.n();
    let half_width = rat(1, 4 * (n as i64 + 1) * (n as i64 + 2));
    let reach = rat(3, 4);
    let mut curves = Vec::with_capacity(n);
    let mut trace = vec![TraceStep::new("radial circles x = 1/(v+2)", (0..n).collect())];
    for v in 0..n {
        let m = v + 1;
        let x = radial(m);
        let at = |x: &Rational, y: &Rational| RatPoint::new(x.clone(), y.clone());
        if v == 0 {
            curves.push(Curve::vertical(v, x));
            continue;
        }
        let (lo, hi) = band(m);
        let y1 = &lo + (&hi - &lo) / int(4);
        let y2 = &lo + (&hi - &lo) * rat(3, 4);
        let step = (&y2 - &y1) / int(4 * n as i64);
        let mut pts = vec![at(&x, &Rational::zero()), at(&x, &y1)];
        let mut y = y1.clone();
        for u in (0..v).rev() {
            if g.has_edge(u, v) {
                continue;
            }
            let xu = radial(u + 1);
            match zigzag_passes {
                None => {
                    pts.push(at(&xu, &y));
                    y = &y + &step;
                    pts.push(at(&xu, &y));
                    trace.push(TraceStep::new(format!("shared stretch of {v} along {u}"), vec![u, v]));
                }
                Some(passes) => {
                    let dy = &step / int(passes as i64);
                    let left = &xu - &half_width;
                    let right = &xu + &half_width;
                    pts.push(at(&left, &y));
                    for k in 0..passes {
                        y = &y + &dy;
                        pts.push(at(if k % 2 == 0 { &right } else { &left }, &y));
                    }
                    trace.push(TraceStep::new(format!("zigzag of {v} across {u} ({passes} passes)"), vec![u, v]));
                }
            }
        }
        pts.extend([at(&reach, &y), at(&reach, &y2), at(&x, &y2), at(&x, &Rational::one())]);
        curves.push(Curve::base(v, simplify(pts)));
        trace.push(TraceStep::new(format!("finger of {v} across all earlier curves"), vec![v]));
    }
    let system = CurveSystem::new(build_surface(SurfaceSpec::Annulus)?, curves)?;
    Ok(RealizationCertificate { graph: g.clone(), semantics: sem, system, construction: trace })
}
