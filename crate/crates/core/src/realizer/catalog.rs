use std::collections::{HashMap, VecDeque};

use num_traits::{One, Zero};

use super::{extend, simplify, RealizationCertificate, RealizeError, Rule, Semantics, TraceStep};
use crate::exactgeom::{rat, RatPoint, Rational};
use crate::graph::{isomorphism_classes, Graph};
use crate::surfaces::{build_surface, Curve, CurveSystem, Label, SurfaceSpec};

/// One verified torus certificate per isomorphism class of graphs on `n <= 5` vertices.
pub fn catalog_small_torus(n: usize) -> Result<Vec<RealizationCertificate>, RealizeError> {
    if !(1..=5).contains(&n) {
        return Err(RealizeError::InvalidInput(format!("catalog covers 1..=5 vertices, got {n}")));
    }
    crate::par_map(&isomorphism_classes(n), realize_torus_small).into_iter().collect()
}

/// Realizes a small graph under fine semantics on the torus itself (no handles).
///
/// Vertices removable by an inductive rule (isolated, pendant, true or false twin)
/// are peeled off recursively; what remains is realized by a palindromic schedule
/// of neighbour swaps among vertical circles.
pub fn realize_torus_small(g: &Graph) -> Result<RealizationCertificate, RealizeError> {
    let n = g.n();
    if n == 0 || n > 8 {
        return Err(RealizeError::InvalidInput(format!("torus realization handles 1..=8 vertices, got {n}")));
    }
    if n == 1 {
        return swap_realization(g, &[0], &[]);
    }
    for v in 0..n {
        for rule in reductions(g, v) {
            let sub = g.without_vertex(v);
            let Ok(base) = realize_torus_small(&sub) else { continue };
            let down = |u: usize| if u < v { u } else { u - 1 };
            let r = match rule {
                Rule::AddPendant(u) => Rule::AddPendant(down(u)),
                Rule::AddCopycat(w) => Rule::AddCopycat(down(w)),
                Rule::BlowupClique(w, m) => Rule::BlowupClique(down(w), m),
                other => other,
            };
            let Ok(grown) = extend(&base, r) else { continue };
            let map: Vec<Label> = (0..n - 1).map(|l| if l < v { l } else { l + 1 }).chain([v]).collect();
            let out = grown.relabeled(&map);
            if out.graph == *g {
                return Ok(out);
            }
        }
    }
    let (order, schedule) = find_schedule(g)
        .ok_or_else(|| RealizeError::RuleInapplicable("no swap schedule covers the non-edges".into()))?;
    swap_realization(g, &order, &schedule)
}

fn reductions(g: &Graph, v: usize) -> Vec<Rule> {
    let mut out = Vec::new();
    let nv = g.neighbors_mask(v);
    match g.degree(v) {
        0 => out.push(Rule::AddIsolated),
        1 => out.push(Rule::AddPendant(nv.trailing_zeros() as usize)),
        _ => {}
    }
    for w in (0..g.n()).filter(|&w| w != v) {
        let nw = g.neighbors_mask(w);
        let (bv, bw) = (1u64 << v, 1u64 << w);
        if g.has_edge(v, w) && nv & !bw == nw & !bv {
            out.push(Rule::BlowupClique(w, 2));
        } else if !g.has_edge(v, w) && nv == nw {
            out.push(Rule::AddCopycat(w));
        }
    }
    out
}

/// Shortest sequence of slot swaps (slot `s` swaps the circles at slots `s` and
/// `s + 1 mod n`) that only ever swaps non-adjacent vertices and swaps every
/// non-adjacent pair at least once, over all starting orders.
/// Vertex order plus the set of swapped non-edges, as a bitmask.
type State = (Vec<usize>, u64);

fn find_schedule(g: &Graph) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = g.n();
    let non_edges: Vec<(usize, usize)> = Graph::pairs(n).filter(|&(a, b)| !g.has_edge(a, b)).collect();
    let bit = |a: usize, b: usize| {
        let key = (a.min(b), a.max(b));
        non_edges.iter().position(|&p| p == key).map(|i| 1u64 << i)
    };
    let full: u64 = (1u64 << non_edges.len()) - 1;
    let mut starts = Vec::new();
    crate::graph::permutations(&mut (0..n).collect(), 0, &mut |p| starts.push(p.to_vec()));
    let mut prev: HashMap<State, Option<(State, usize)>> = HashMap::new();
    let mut queue = VecDeque::new();
    for s in starts {
        prev.insert((s.clone(), 0), None);
        queue.push_back((s, 0u64));
    }
    while let Some((order, covered)) = queue.pop_front() {
        if covered == full {
            let mut schedule = Vec::new();
            let mut key = (order, covered);
            while let Some(Some((from, slot))) = prev.get(&key).cloned() {
                schedule.push(slot);
                key = from;
            }
            schedule.reverse();
            return Some((key.0, schedule));
        }
        let slots = if n == 2 { 1 } else { n };
        for s in 0..slots {
            let t = (s + 1) % n;
            let Some(b) = bit(order[s], order[t]) else { continue };
            let mut next = order.clone();
            next.swap(s, t);
            let key = (next, covered | b);
            if !prev.contains_key(&key) {
                prev.insert(key.clone(), Some(((order.clone(), covered), s)));
                queue.push_back(key);
            }
        }
    }
    None
}

/// Vertical circles at `x = (2s+1)/(2n)` in the given slot order, performing the
/// schedule and then undoing it in reverse.
fn swap_realization(g: &Graph, order: &[usize], schedule: &[usize]) -> Result<RealizationCertificate, RealizeError> {
    let n = g.n();
    let steps: Vec<usize> = schedule.iter().chain(schedule.iter().rev()).copied().collect();
    let total = steps.len() as i64;
    let height = |k: usize| rat(k as i64 + 1, total + 2);
    let mut pos: Vec<Rational> = vec![Rational::zero(); n];
    let mut at_slot = order.to_vec();
    for (s, &c) in order.iter().enumerate() {
        pos[c] = rat(2 * s as i64 + 1, 2 * n as i64);
    }
    let mut pts: Vec<Vec<RatPoint>> = (0..n).map(|c| vec![RatPoint::new(pos[c].clone(), Rational::zero())]).collect();
    let step = rat(1, n as i64);
    for (k, &s) in steps.iter().enumerate() {
        let t = (s + 1) % n;
        let (left, right) = (at_slot[s], at_slot[t]);
        for (c, delta) in [(left, step.clone()), (right, -step.clone())] {
            pts[c].push(RatPoint::new(pos[c].clone(), height(k)));
            pos[c] = &pos[c] + &delta;
            pts[c].push(RatPoint::new(pos[c].clone(), height(k + 1)));
        }
        at_slot.swap(s, t);
    }
    let curves: Vec<Curve> = pts
        .into_iter()
        .enumerate()
        .map(|(c, mut p)| {
            p.push(RatPoint::new(pos[c].clone(), Rational::one()));
            Curve::base(c, simplify(p))
        })
        .collect();
    let system = CurveSystem::new(build_surface(SurfaceSpec::Torus)?, curves)?;
    let rule = if schedule.is_empty() {
        "disjoint vertical circles".to_string()
    } else {
        format!("palindromic swap schedule {schedule:?} from slot order {order:?}")
    };
    Ok(RealizationCertificate {
        graph: g.clone(),
        semantics: Semantics::Fine,
        system,
        construction: vec![TraceStep::new(rule, (0..n).collect())],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::check_certificate;

    #[test]
    fn small_catalog_sizes() {
        for (n, count) in [(1, 1), (2, 2), (3, 4), (4, 11), (5, 34)] {
            let certs = catalog_small_torus(n).unwrap();
            assert_eq!(certs.len(), count);
            assert!(certs.iter().all(|c| check_certificate(c).ok));
            assert!(certs.iter().all(|c| c.system.surface.genus() == 1));
        }
    }

    #[test]
    fn five_cycle_and_house() {
        for g in [Graph::cycle(5), Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 4)])] {
            let cert = realize_torus_small(&g).unwrap();
            assert!(check_certificate(&cert).ok);
            assert_eq!(cert.graph, g);
        }
    }
}
