//! Sidedness obstructions for disjoint core curves of an annulus, and the
//! graph families that exhibit them.
//!
//! Disjoint core curves of an annulus are strictly ordered from one boundary to
//! the other, so the disjointness graph of a realizable family carries a
//! transitive orientation. A failure to find one is reported with a chain of
//! forced left/right choices that returns to its own reversal.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// Largest vertex count the orientation search accepts.
pub const MAX_ORIENT_VERTICES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObstructionError {
    #[error("orientation search is limited to {MAX_ORIENT_VERTICES} vertices, got {0}")]
    BudgetExceeded(usize),
    #[error("graph has no vertex adjacent to all others")]
    NoDominatingVertex,
    #[error("invalid family: {0}")]
    InvalidSpec(String),
}

/// Left-to-right order on the edges of a graph: `(a, b)` means `a` lies left of `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidednessModel {
    pub order: Vec<(usize, usize)>,
}

impl SidednessModel {
    /// Every edge oriented exactly once, no non-edges, and the order transitive.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        let n = g.n();
        let mut out = vec![0u64; n];
        for &(a, b) in &self.order {
            if a >= n || b >= n || !g.has_edge(a, b) || out[b] >> a & 1 == 1 {
                return false;
            }
            out[a] |= 1 << b;
        }
        self.order.len() == g.edge_count() && is_transitive(&out)
    }
}

/// Whether out-neighbourhood masks describe a transitive relation.
pub fn is_transitive(out: &[u64]) -> bool {
    (0..out.len()).all(|a| bits(out[a]).all(|b| out[b] & !out[a] == 0))
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            b
        })
    })
}

/// One forced choice: `left` lies left of `right`. Consecutive steps share one
/// endpoint in the same role while their other endpoints are non-adjacent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ForcedStep {
    pub left: usize,
    pub right: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum ObstructionVerdict {
    NoObstruction { model: SidednessModel },
    /// Starting from the first step, each choice forces the next, ending at the
    /// reversal of the first.
    Obstruction { witness: Vec<ForcedStep> },
}

impl ObstructionVerdict {
    pub fn is_obstruction(&self) -> bool {
        matches!(self, ObstructionVerdict::Obstruction { .. })
    }
}

/// A transitive orientation of `g`'s edges, or `None` if there is none.
pub fn transitive_orientation(g: &Graph) -> Result<Option<SidednessModel>, ObstructionError> {
    let n = g.n();
    if n > MAX_ORIENT_VERTICES {
        return Err(ObstructionError::BudgetExceeded(n));
    }
    let mut out = vec![0u64; n];
    if !search(g, &mut out) {
        return Ok(None);
    }
    let order = (0..n).flat_map(|a| bits(out[a]).map(move |b| (a, b))).collect();
    Ok(Some(SidednessModel { order }))
}

fn search(g: &Graph, out: &mut Vec<u64>) -> bool {
    let free = g.edges().into_iter().find(|&(a, b)| out[a] >> b & 1 == 0 && out[b] >> a & 1 == 0);
    let Some((a, b)) = free else { return true };
    for (x, y) in [(a, b), (b, a)] {
        let saved = out.clone();
        if force(g, out, x, y) && search(g, out) {
            return true;
        }
        *out = saved;
    }
    false
}

/// Orients `x -> y` and everything it forces; false on a contradiction.
fn force(g: &Graph, out: &mut [u64], x: usize, y: usize) -> bool {
    let n = g.n();
    let mut queue = vec![(x, y)];
    while let Some((a, b)) = queue.pop() {
        if out[b] >> a & 1 == 1 {
            return false;
        }
        if out[a] >> b & 1 == 1 {
            continue;
        }
        out[a] |= 1 << b;
        for c in g.neighbors(a).filter(|&c| c != b && !g.has_edge(b, c)) {
            queue.push((a, c));
        }
        for c in g.neighbors(b).filter(|&c| c != a && !g.has_edge(a, c)) {
            queue.push((c, b));
        }
        for c in bits(out[b]) {
            if !g.has_edge(a, c) {
                return false;
            }
            queue.push((a, c));
        }
        for c in (0..n).filter(|&c| out[c] >> a & 1 == 1) {
            if !g.has_edge(c, b) {
                return false;
            }
            queue.push((c, b));
        }
    }
    true
}

/// Choices forced directly by `left -> right`.
fn forced_by(g: &Graph, s: ForcedStep) -> Vec<ForcedStep> {
    let (a, b) = (s.left, s.right);
    let mut v: Vec<ForcedStep> = g
        .neighbors(a)
        .filter(|&c| c != b && !g.has_edge(b, c))
        .map(|c| ForcedStep { left: a, right: c })
        .collect();
    v.extend(g.neighbors(b).filter(|&c| c != a && !g.has_edge(a, c)).map(|c| ForcedStep { left: c, right: b }));
    v
}

/// Whether `w` is a valid forcing chain in `g` that ends reversing its start.
pub fn check_witness(g: &Graph, w: &[ForcedStep]) -> bool {
    let (Some(first), Some(last)) = (w.first(), w.last()) else { return false };
    w.iter().all(|s| g.has_edge(s.left, s.right))
        && w.windows(2).all(|p| forced_by(g, p[0]).contains(&p[1]))
        && (last.left, last.right) == (first.right, first.left)
}

/// Shortest forcing chain from some choice to its reversal.
fn shortest_witness(g: &Graph) -> Option<Vec<ForcedStep>> {
    let mut best: Option<Vec<ForcedStep>> = None;
    for (a, b) in g.edges() {
        let start = ForcedStep { left: a, right: b };
        let goal = ForcedStep { left: b, right: a };
        let mut prev = std::collections::HashMap::new();
        prev.insert(start, start);
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            if s == goal {
                let mut chain = vec![s];
                let mut cur = s;
                while cur != start {
                    cur = prev[&cur];
                    chain.push(cur);
                }
                chain.reverse();
                if best.as_ref().is_none_or(|b| chain.len() < b.len()) {
                    best = Some(chain);
                }
                break;
            }
            for t in forced_by(g, s) {
                if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(t) {
                    e.insert(s);
                    queue.push_back(t);
                }
            }
        }
    }
    best
}

/// Decides the sidedness obstruction for `g` read as a disjointness graph.
pub fn annulus_core_obstruction(g: &Graph) -> Result<ObstructionVerdict, ObstructionError> {
    if let Some(model) = transitive_orientation(g)? {
        return Ok(ObstructionVerdict::NoObstruction { model });
    }
    let witness = shortest_witness(g).unwrap_or_default();
    Ok(ObstructionVerdict::Obstruction { witness })
}

/// Removes a dominating vertex and decides the obstruction for the rest, with
/// labels mapped back to `g`.
pub fn cone_reduce_check(g: &Graph) -> Result<ObstructionVerdict, ObstructionError> {
    let d = *g.dominating_vertices().first().ok_or(ObstructionError::NoDominatingVertex)?;
    let up = |u: usize| if u < d { u } else { u + 1 };
    Ok(match annulus_core_obstruction(&g.without_vertex(d))? {
        ObstructionVerdict::NoObstruction { model } => ObstructionVerdict::NoObstruction {
            model: SidednessModel { order: model.order.into_iter().map(|(a, b)| (up(a), up(b))).collect() },
        },
        ObstructionVerdict::Obstruction { witness } => ObstructionVerdict::Obstruction {
            witness: witness.into_iter().map(|s| ForcedStep { left: up(s.left), right: up(s.right) }).collect(),
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    OddCycle(usize),
    /// Wheel on the given total number of vertices (an odd rim plus its hub).
    Wheel(usize),
    Fig4Graph,
    Join { g: usize, b: usize, base: Graph },
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::OddCycle(m) => write!(f, "oddcycle:{m}"),
            FamilySpec::Wheel(n) => write!(f, "wheel:{n}"),
            FamilySpec::Fig4Graph => write!(f, "fig4"),
            FamilySpec::Join { g, b, .. } => write!(f, "join:{g},{b}"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = ObstructionError;

    /// `oddcycle:<m>`, `wheel:<n>`, `fig4`, or `join:<g>,<b>` over the 5-cycle.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ObstructionError::InvalidSpec(format!("unrecognized family {s:?}"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let (name, arg) = s.split_once(':').unwrap_or((s, ""));
        match name {
            "oddcycle" => Ok(FamilySpec::OddCycle(num(arg)?)),
            "wheel" => Ok(FamilySpec::Wheel(num(arg)?)),
            "fig4" if arg.is_empty() => Ok(FamilySpec::Fig4Graph),
            "join" => {
                let (g, b) = arg.split_once(',').ok_or_else(bad)?;
                Ok(FamilySpec::Join { g: num(g)?, b: num(b)?, base: Graph::cycle(5) })
            }
            _ => Err(bad()),
        }
    }
}

/// Six vertices `v1..v6` (labels 0..5): a disjoint triple `v3, v4, v5` with
/// `v1` disjoint from `v4` only, `v2` from `v3` only and `v6` from `v5` only.
pub fn fig4_graph() -> Graph {
    Graph::from_edges(6, &[(2, 3), (3, 4), (2, 4), (0, 3), (1, 2), (5, 4)])
}

pub fn generate_family(spec: &FamilySpec) -> Result<Graph, ObstructionError> {
    let bad = |m: String| Err(ObstructionError::InvalidSpec(m));
    match spec {
        FamilySpec::OddCycle(m) => {
            if *m < 5 || m % 2 == 0 {
                return bad(format!("odd cycle needs odd m >= 5, got {m}"));
            }
            Ok(Graph::cycle(*m))
        }
        FamilySpec::Wheel(v) => {
            if *v < 6 || v % 2 == 1 {
                return bad(format!("wheel needs an even vertex count >= 6, got {v}"));
            }
            Ok(Graph::wheel_over(v - 1))
        }
        FamilySpec::Fig4Graph => Ok(fig4_graph()),
        FamilySpec::Join { g, b, base } => {
            let copies = (2 * g + b).checked_sub(1).filter(|&c| c >= 1);
            let Some(copies) = copies else {
                return bad(format!("join needs 2g + b >= 2, got g={g}, b={b}"));
            };
            if !base.complement().is_connected() {
                return bad("base graph has a disconnected complement".into());
            }
            if !annulus_core_obstruction(base)?.is_obstruction() {
                return bad("base graph carries no sidedness obstruction".into());
            }
            let block = base.join(base).with_vertex();
            Ok((1..copies).fold(block.clone(), |acc, _| acc.join(&block)))
        }
    }
}
