//! Constructions of certified curve systems realizing labeled graphs.

mod annulus;
mod catalog;
mod extend;
mod fine_torus;
mod halfgraph;

pub use annulus::realize_annulus;
pub use catalog::{catalog_small_torus, realize_torus_small};
pub use extend::{extend, Rule};
pub use fine_torus::realize_fine_torus;
pub use halfgraph::{half_graph, half_graph_system};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactgeom::{cross, RatPoint};
use crate::graph::Graph;
use crate::surfaces::{Cardinality, CurveSystem, Label, SurfaceError};

/// Which intersection sets count as edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Semantics {
    /// Edge iff disjoint.
    Fine,
    /// Edge iff at most `k` common points.
    KFine { k: usize },
    /// Edge iff finitely many common points.
    Finitary,
}

impl Semantics {
    pub fn is_edge(&self, c: &Cardinality) -> bool {
        match (self, c.finite()) {
            (_, None) => false,
            (Semantics::Fine, Some(n)) => n == 0,
            (Semantics::KFine { k }, Some(n)) => n <= *k,
            (Semantics::Finitary, Some(_)) => true,
        }
    }
}

impl std::fmt::Display for Semantics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Semantics::Fine => write!(f, "fine"),
            Semantics::KFine { k } => write!(f, "k={k}"),
            Semantics::Finitary => write!(f, "finitary"),
        }
    }
}

impl std::str::FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fine" => Ok(Semantics::Fine),
            "finitary" => Ok(Semantics::Finitary),
            _ => match s.strip_prefix("k=").map(str::parse::<usize>) {
                Some(Ok(k)) if k >= 2 => Ok(Semantics::KFine { k }),
                _ => Err(format!("unknown semantics {s:?}; expected fine, finitary or k=<k> with k >= 2")),
            },
        }
    }
}

/// One construction step and the curves it produced or changed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: String,
    pub labels: Vec<Label>,
}

impl TraceStep {
    pub fn new(rule: impl Into<String>, labels: Vec<Label>) -> Self {
        TraceStep { rule: rule.into(), labels }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationCertificate {
    pub graph: Graph,
    pub semantics: Semantics,
    pub system: CurveSystem,
    pub construction: Vec<TraceStep>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("semantics {0} is not supported by this construction")]
    UnsupportedSemantics(Semantics),
    #[error("rule not applicable: {0}")]
    RuleInapplicable(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

impl RealizationCertificate {
    /// Renames every curve label through `map` (old label -> new label), graph included.
    pub fn relabeled(&self, map: &[Label]) -> RealizationCertificate {
        let mut system = self.system.clone();
        for c in &mut system.curves {
            c.label = map[c.label];
        }
        system.curves.sort_by_key(|c| c.label);
        let construction = self
            .construction
            .iter()
            .map(|s| TraceStep::new(s.rule.clone(), s.labels.iter().map(|&l| map[l]).collect()))
            .collect();
        RealizationCertificate { graph: self.graph.permuted(map), semantics: self.semantics, system, construction }
    }
}

/// Drops interior points where the polyline keeps going straight in the same direction.
pub(crate) fn simplify(points: Vec<RatPoint>) -> Vec<RatPoint> {
    let mut out: Vec<RatPoint> = Vec::with_capacity(points.len());
    for p in points {
        if out.last() == Some(&p) {
            continue;
        }
        if out.len() >= 2 {
            let a = &out[out.len() - 2];
            let b = &out[out.len() - 1];
            let (u, v) = (b - a, &p - b);
            if cross(&u, &v) == num_traits::Zero::zero() && crate::exactgeom::dot(&u, &v) > num_traits::Zero::zero() {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

pub(crate) fn check_graph(g: &Graph, min_n: usize) -> Result<(), RealizeError> {
    if g.n() < min_n {
        return Err(RealizeError::InvalidInput(format!("need at least {min_n} vertices, got {}", g.n())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semantics_thresholds() {
        let two = Cardinality::Finite { count: 2 };
        let none = Cardinality::Finite { count: 0 };
        let inf = Cardinality::InfiniteOverlap { overlaps: vec![] };
        assert!(Semantics::Fine.is_edge(&none));
        assert!(!Semantics::Fine.is_edge(&two));
        assert!(Semantics::KFine { k: 2 }.is_edge(&two));
        assert!(!Semantics::KFine { k: 2 }.is_edge(&Cardinality::Finite { count: 3 }));
        assert!(Semantics::Finitary.is_edge(&two));
        assert!(!Semantics::Finitary.is_edge(&inf));
    }

    #[test]
    fn semantics_parse() {
        assert_eq!("k=3".parse::<Semantics>(), Ok(Semantics::KFine { k: 3 }));
        assert_eq!("fine".parse::<Semantics>(), Ok(Semantics::Fine));
        assert!("k=1".parse::<Semantics>().is_err());
        assert_eq!(Semantics::KFine { k: 4 }.to_string(), "k=4");
    }

    #[test]
    fn simplify_merges_straight_runs() {
        let p = |x, y| RatPoint::from_ints(x, y);
        let s = simplify(vec![p(0, 0), p(0, 1), p(0, 2), p(1, 3), p(1, 3), p(2, 4)]);
        assert_eq!(s, vec![p(0, 0), p(0, 2), p(2, 4)]);
    }
}
