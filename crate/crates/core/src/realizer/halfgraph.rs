use num_traits::{One, Zero};

use super::{RealizationCertificate, RealizeError, Semantics, TraceStep};
use crate::exactgeom::{rat, RatPoint, Rational};
use crate::graph::Graph;
use crate::surfaces::{build_surface, Curve, CurveSystem, SurfaceSpec};

/// Disjointness graph of the half-graph system: labels `0..N` are `v_1..v_N`,
/// labels `N..2N` are `w_1..w_N`; the `v`s and the `w`s form cliques and
/// `v_i` is adjacent to `w_j` iff `j >= i`.
pub fn half_graph(n: usize) -> Graph {
    let mut g = Graph::empty(2 * n);
    for a in 0..n {
        for b in a + 1..n {
            g.add_edge(a, b);
            g.add_edge(n + a, n + b);
        }
        for j in a..n {
            g.add_edge(a, n + j);
        }
    }
    g
}

/// Annulus system with `v_i` disjoint from `w_j` exactly when `j >= i`.
///
/// All curves start radial; `v_i` begins between `w_{i-1}` and `w_i` and, inside
/// nested rectangles, moves inward past `w_1..w_{i-1}` and back.
pub fn half_graph_system(n: usize) -> Result<RealizationCertificate, RealizeError> {
    if n == 0 {
        return Err(RealizeError::InvalidInput("half-graph needs N >= 1".into()));
    }
    let slots = 3 * n as i64 + 2;
    let x = |slot: usize| rat(slot as i64, slots);
    let levels = 2 * n as i64 + 2;
    let mut curves = Vec::with_capacity(2 * n);
    for i in 1..=n {
        let home = x(n + 2 * i - 1);
        let target = x(i);
        let (lo, hi) = (rat(i as i64, levels), rat(levels - i as i64, levels));
        let at = |x: &Rational, y: &Rational| RatPoint::new(x.clone(), y.clone());
        curves.push(Curve::base(
            i - 1,
            vec![
                at(&home, &Rational::zero()),
                at(&home, &lo),
                at(&target, &lo),
                at(&target, &hi),
                at(&home, &hi),
                at(&home, &Rational::one()),
            ],
        ));
    }
    for j in 1..=n {
        curves.push(Curve::vertical(n + j - 1, x(n + 2 * j)));
    }
    let system = CurveSystem::new(build_surface(SurfaceSpec::Annulus)?, curves)?;
    Ok(RealizationCertificate {
        graph: half_graph(n),
        semantics: Semantics::Fine,
        system,
        construction: vec![
            TraceStep::new("radial w_j", (n..2 * n).collect()),
            TraceStep::new("nested inward detours of v_i", (0..n).collect()),
        ],
    })
}
