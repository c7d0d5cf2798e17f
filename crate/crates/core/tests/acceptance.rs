//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use finecurve::exactgeom::{rat, LocalKind, RatPoint, Rational};
use finecurve::graph::Graph;
use finecurve::obstructions::{
    annulus_core_obstruction, check_witness, cone_reduce_check, generate_family, FamilySpec, ObstructionVerdict,
};
use finecurve::realizer::{half_graph_system, realize_annulus, realize_fine_torus, RealizationCertificate, Semantics};
use finecurve::shell::cli::run;
use finecurve::shell::{render_svg, CertificateFile};
use finecurve::surfaces::{build_surface, intersection_report, Curve, CurveSystem, IntersectionReport, Label, SurfaceSpec};
use finecurve::surgeries::{distance2_witness, remove_innermost_bigon, remove_touching, surgery_path, SurgeryCase, SurgeryPath};
use finecurve::verifier::{check_certificate, curves_in_union, find_bigons, is_essential};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const CATALOG_BUDGET: Duration = Duration::from_secs(60);
const PER_GRAPH_BUDGET: Duration = Duration::from_secs(5);
const SWEEP_BUDGET: Duration = Duration::from_secs(600);
const RANDOM_GRAPHS: usize = 50;
const SURGERY_PAIRS: usize = 100;
const WITNESS_PAIRS: usize = 100;
const OVERLAP_PAIRS: usize = 20;
const UNION_PAIRS: usize = 50;
const PERTURBATION_TRIALS: usize = 200;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("small torus catalog", catalog),
        ("fine torus realizations", fine_torus),
        ("annulus realizations", annulus),
        ("half-graphs", half_graphs),
        ("sidedness obstruction", obstructions),
        ("join generator", joins),
        ("surgery contracts", surgeries),
        ("distance-two witnesses", witnesses),
        ("curves in a union", unions),
        ("determinism and exactness", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// ---------- shared helpers ----------

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_graph(rng: &mut impl Rng, n: usize) -> Graph {
    let mut g = Graph::empty(n);
    for j in 1..n {
        for i in 0..j {
            if rng.gen_bool(0.5) {
                g.add_edge(i, j);
            }
        }
    }
    g
}

fn milli(v: i64) -> Rational {
    rat(v, 1000)
}

fn pt(x: Rational, y: Rational) -> RatPoint {
    RatPoint::new(x, y)
}

fn torus(curves: Vec<Curve>) -> CurveSystem {
    CurveSystem::new(build_surface(SurfaceSpec::Torus).unwrap(), curves).unwrap()
}

fn report(sys: &CurveSystem, a: Label, b: Label) -> IntersectionReport {
    intersection_report(sys, a, b).unwrap()
}

fn count(sys: &CurveSystem, a: Label, b: Label) -> Option<usize> {
    report(sys, a, b).cardinality.finite()
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Lift from `(x0, 0)` to `(x0 + r, s)` with `bends` interior vertices, each
/// displaced horizontally by less than `1 / (4s)` from the straight line. With
/// `gcd(r, s) = 1` the projected curve is embedded, y-monotone and of class `(r, s)`.
fn ymono(rng: &mut impl Rng, label: Label, x0: Rational, r: i64, s: i64, bends: usize) -> Curve {
    let mut heights = BTreeSet::new();
    while heights.len() < bends {
        heights.insert(rng.gen_range(1..1000 * s));
    }
    let mut points = vec![pt(x0.clone(), Rational::from_integer(0.into()))];
    for t in heights {
        let y = milli(t);
        let eps = rat(rng.gen_range(-240..=240), 1000 * s);
        points.push(pt(&x0 + &y * rat(r, s) + eps, y));
    }
    points.push(pt(&x0 + rat(r, 1), rat(s, 1)));
    Curve::base(label, points)
}

fn swap_axes(c: &Curve) -> Curve {
    let points = c.legs[0].points.iter().map(|p| pt(p.y.clone(), p.x.clone())).collect();
    Curve::base(c.label, points)
}

fn coprime_to(rng: &mut impl Rng, s: i64) -> i64 {
    loop {
        let r = rng.gen_range(1..=s + 2);
        if r.gcd(&s) == 1 {
            return r;
        }
    }
}

/// Curve on the surface: embedded and essential.
fn sound(sys: &CurveSystem, c: &Curve) -> bool {
    sys.surface.curve_is_embedded(c).unwrap_or(false) && is_essential(&sys.surface, c).unwrap_or(false)
}

// ---------- 1 ----------

/// Index of pair `i < j` among pairs ordered by `j` then `i`.
fn pair_index(i: usize, j: usize) -> usize {
    j * (j - 1) / 2 + i
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn edge_bits(g: &Graph) -> u64 {
    pairs(g.n()).filter(|&(i, j)| g.has_edge(i, j)).fold(0, |m, (i, j)| m | 1 << pair_index(i, j))
}

fn canonical_bits(n: usize, mask: u64, perms: &[Vec<usize>]) -> u64 {
    perms
        .iter()
        .map(|p| {
            pairs(n).filter(|&(i, j)| mask >> pair_index(i, j) & 1 == 1).fold(0u64, |m, (i, j)| {
                let (a, b) = (p[i].min(p[j]), p[i].max(p[j]));
                m | 1 << pair_index(a, b)
            })
        })
        .min()
        .unwrap()
}

fn catalog() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut sizes = Vec::new();
    for n in 1..=5usize {
        let perms = permutations(n);
        let classes: BTreeSet<u64> = (0..1u64 << (n * (n - 1) / 2)).map(|m| canonical_bits(n, m, &perms)).collect();
        let out_dir = dir.path().join(n.to_string());
        let mut out = Vec::new();
        let code = run(
            ["finecurve", "catalog", "--n", &n.to_string(), "--dir", out_dir.to_str().unwrap()],
            &mut out,
            &mut std::io::sink(),
        );
        ensure!(code == 0, "catalog --n {n} exited with {code}");
        let doc: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        ensure!(doc["all_ok"] == true, "catalog --n {n} reports a failed verdict");
        let files = doc["files"].as_array().unwrap();
        ensure!(files.len() == classes.len(), "n = {n}: {} certificates, oracle counts {} classes", files.len(), classes.len());
        let mut covered = BTreeSet::new();
        for f in files {
            let text = std::fs::read_to_string(out_dir.join(f["file"].as_str().unwrap())).map_err(|e| e.to_string())?;
            let cert = CertificateFile::from_json(&text).map_err(|e| e.to_string())?.certificate().map_err(|e| e.to_string())?;
            ensure!(cert.semantics == Semantics::Fine, "n = {n}: non-fine certificate");
            ensure!(cert.system.surface.genus() == 1, "n = {n}: certificate not on the torus");
            ensure!(check_certificate(&cert).ok, "n = {n}: certificate for {} fails re-verification", f["graph6"]);
            covered.insert(canonical_bits(n, edge_bits(&cert.graph), &perms));
        }
        ensure!(covered == classes, "n = {n}: certificates do not cover every class once");
        sizes.push(classes.len());
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < CATALOG_BUDGET, "catalog took {elapsed:?}");
    ensure!(sizes == [1, 2, 4, 11, 34], "class counts {sizes:?}");
    Ok(format!("classes {sizes:?} all verified"))
}

// ---------- 2 ----------

fn fine_torus() -> Check {
    let mut rng = rng(2);
    let mut slowest = Duration::ZERO;
    for t in 0..RANDOM_GRAPHS {
        let n = rng.gen_range(4..=8);
        let g = random_graph(&mut rng, n);
        let start = Instant::now();
        let cert = realize_fine_torus(&g).map_err(|e| format!("graph {t}: {e}"))?;
        let verdict = check_certificate(&cert);
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        ensure!(verdict.ok, "graph {t}: {:?}", verdict.mismatches);
        ensure!(elapsed < PER_GRAPH_BUDGET, "graph {t} took {elapsed:?}");
        let handles = cert.system.surface.handle_count();
        ensure!(handles == n * (n - 1) / 2 - n, "graph {t}: {handles} handles for n = {n}");
        for (i, j) in pairs(n) {
            let c = count(&cert.system, i, j);
            ensure!(c == Some(0) || c == Some(2), "graph {t}: pair ({i}, {j}) meets {c:?} times");
            ensure!((c == Some(0)) == g.has_edge(i, j), "graph {t}: pair ({i}, {j}) disagrees with the graph");
        }
    }
    Ok(format!("{RANDOM_GRAPHS} graphs, slowest {:.2}s", slowest.as_secs_f64()))
}

// ---------- 3 ----------

fn annulus() -> Check {
    let mut rng = rng(3);
    let mut slowest = Duration::ZERO;
    for t in 0..RANDOM_GRAPHS {
        let n = rng.gen_range(3..=10);
        let g = random_graph(&mut rng, n);
        for sem in [Semantics::Finitary, Semantics::KFine { k: 2 }] {
            let start = Instant::now();
            let cert = realize_annulus(&g, sem).map_err(|e| format!("graph {t}, {sem}: {e}"))?;
            let verdict = check_certificate(&cert);
            let elapsed = start.elapsed();
            slowest = slowest.max(elapsed);
            ensure!(verdict.ok, "graph {t}, {sem}: {:?}", verdict.mismatches);
            ensure!(elapsed < PER_GRAPH_BUDGET, "graph {t}, {sem} took {elapsed:?}");
            for (i, j) in pairs(n) {
                let r = report(&cert.system, i, j);
                let c = r.cardinality.finite();
                let expected = match (sem, g.has_edge(i, j)) {
                    (_, true) => Some(2),
                    (Semantics::Finitary, false) => None,
                    (_, false) => Some(4),
                };
                ensure!(c == expected, "graph {t}, {sem}: pair ({i}, {j}) meets {c:?} times, expected {expected:?}");
                if g.has_edge(i, j) {
                    ensure!(r.all_crossing(), "graph {t}, {sem}: pair ({i}, {j}) has a touching point");
                }
            }
        }
    }
    Ok(format!("{RANDOM_GRAPHS} graphs x 2 semantics, slowest {:.2}s", slowest.as_secs_f64()))
}

// ---------- 4 ----------

fn half_graphs() -> Check {
    for n in 1..=10usize {
        let cert = half_graph_system(n).map_err(|e| e.to_string())?;
        ensure!(check_certificate(&cert).ok, "N = {n}: certificate fails");
        for i in 1..=n {
            for j in 1..=n {
                let disjoint = count(&cert.system, i - 1, n + j - 1) == Some(0);
                ensure!(disjoint == (j >= i), "N = {n}: v_{i} and w_{j} disjoint = {disjoint}");
            }
        }
    }
    Ok("N = 1..10, all pairs exact".into())
}

// ---------- 5 ----------

/// Exhaustive oracle: some orientation of the edges is transitive.
fn orientable_oracle(g: &Graph) -> bool {
    let n = g.n();
    let edges = g.edges();
    (0..1u64 << edges.len()).any(|choice| {
        let mut out = vec![0u64; n];
        for (k, &(a, b)) in edges.iter().enumerate() {
            if choice >> k & 1 == 0 {
                out[a] |= 1 << b;
            } else {
                out[b] |= 1 << a;
            }
        }
        (0..n).all(|a| (0..n).filter(|&b| out[a] >> b & 1 == 1).all(|b| out[b] & !out[a] == 0))
    })
}

fn verdict_sound(g: &Graph, v: &ObstructionVerdict) -> bool {
    match v {
        ObstructionVerdict::NoObstruction { model } => model.is_valid_for(g),
        ObstructionVerdict::Obstruction { witness } => check_witness(g, witness),
    }
}

fn obstructions() -> Check {
    let named: Vec<(&str, Graph, bool)> = vec![
        ("C5", Graph::cycle(5), true),
        ("C7", Graph::cycle(7), true),
        ("C9", Graph::cycle(9), true),
        ("Fig4", generate_family(&FamilySpec::Fig4Graph).map_err(|e| e.to_string())?, true),
        ("C4", Graph::cycle(4), false),
        ("C6", Graph::cycle(6), false),
        ("P4", Graph::path(4), false),
        ("K5", Graph::complete(5), false),
    ];
    for (name, g, expect) in &named {
        let v = annulus_core_obstruction(g).map_err(|e| e.to_string())?;
        ensure!(v.is_obstruction() == *expect, "{name}: obstruction = {}", v.is_obstruction());
        ensure!(verdict_sound(g, &v), "{name}: verdict does not check out");
    }
    let w6 = generate_family(&FamilySpec::Wheel(6)).map_err(|e| e.to_string())?;
    ensure!(cone_reduce_check(&w6).map_err(|e| e.to_string())?.is_obstruction(), "W6 cone reduction has no obstruction");

    let start = Instant::now();
    let mut swept = 0usize;
    for n in 0..=6usize {
        for mask in 0..1u64 << (n * n.saturating_sub(1) / 2) {
            let g = Graph::from_mask(n, mask);
            let v = annulus_core_obstruction(&g).map_err(|e| e.to_string())?;
            ensure!(v.is_obstruction() != orientable_oracle(&g), "disagreement on n = {n}, mask {mask:#x}");
            ensure!(verdict_sound(&g, &v), "unsound verdict on n = {n}, mask {mask:#x}");
            swept += 1;
        }
    }
    let mut rng = rng(5);
    let mut sampled = 0usize;
    while sampled < 500 {
        let n = rng.gen_range(7..=8);
        let g = random_graph(&mut rng, n);
        if g.edge_count() > 18 {
            continue;
        }
        let v = annulus_core_obstruction(&g).map_err(|e| e.to_string())?;
        ensure!(v.is_obstruction() != orientable_oracle(&g), "disagreement on sampled {g:?}");
        sampled += 1;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < SWEEP_BUDGET, "sweep took {elapsed:?}");
    Ok(format!("named cases ok; {swept} labeled graphs on <= 6 vertices and {sampled} sampled on 7-8 agree with the oracle"))
}

// ---------- 6 ----------

fn joins() -> Check {
    let mut sizes = Vec::new();
    for (g, b) in [(0usize, 3usize), (1, 1)] {
        let spec = FamilySpec::Join { g, b, base: Graph::cycle(5) };
        let graph = generate_family(&spec).map_err(|e| e.to_string())?;
        let copies = 2 * g + b - 1;
        ensure!(graph.n() == copies * 11, "{spec}: {} vertices", graph.n());
        for k in 0..copies {
            let block: Vec<usize> = (11 * k..11 * (k + 1)).collect();
            let sub = graph.induced(&block);
            let v = annulus_core_obstruction(&sub).map_err(|e| e.to_string())?;
            ensure!(v.is_obstruction() && verdict_sound(&sub, &v), "{spec}: copy {k} carries no obstruction");
            for other in 0..graph.n() {
                if !block.contains(&other) {
                    ensure!(block.iter().all(|&u| graph.has_edge(u, other)), "{spec}: copy {k} not joined to vertex {other}");
                }
            }
        }
        sizes.push(graph.n());
    }
    Ok(format!("vertex counts {sizes:?}, every copy obstructed"))
}

// ---------- 7 ----------

/// Three horizontal bands in per-mille, shuffled between the features and the third curve.
fn bands(rng: &mut impl Rng) -> [(i64, i64); 3] {
    let mut b = [(100, 300), (400, 600), (700, 900)];
    b.shuffle(rng);
    b.map(|(lo, hi)| (lo + rng.gen_range(0..50), hi - rng.gen_range(0..50)))
}

/// Curve 0 vertical at `xa`; curve 1 climbs `xb > xa` with an optional wedge
/// touching curve 0 and `fingers` rectangular fingers crossing it twice each;
/// curve 2 horizontal; curve 3 a vertical far to the right.
fn feature_pair(rng: &mut impl Rng, wedge: bool, fingers: usize) -> (CurveSystem, Option<RatPoint>) {
    assert!(fingers + wedge as usize <= 2);
    let xa = milli(rng.gen_range(200..500));
    let xb = &xa + milli(rng.gen_range(20..100));
    let [b0, b1, third] = bands(rng);
    let mut features: Vec<(i64, Vec<RatPoint>)> = Vec::new();
    let mut touch = None;
    let mut free = vec![b1, b0];
    if wedge {
        let w = free.pop().unwrap();
        let mid = rat(w.0 + w.1, 2000);
        touch = Some(pt(xa.clone(), mid.clone()));
        features.push((w.0, vec![pt(xb.clone(), milli(w.0)), pt(xa.clone(), mid), pt(xb.clone(), milli(w.1))]));
    }
    for _ in 0..fingers {
        let f = free.pop().unwrap();
        let depth = &xa - milli(rng.gen_range(10..100));
        features.push((
            f.0,
            vec![pt(xb.clone(), milli(f.0)), pt(depth.clone(), milli(f.0)), pt(depth, milli(f.1)), pt(xb.clone(), milli(f.1))],
        ));
    }
    features.sort_by_key(|f| f.0);
    let mut points = vec![pt(xb.clone(), milli(0))];
    points.extend(features.into_iter().flat_map(|f| f.1));
    points.push(pt(xb, milli(1000)));
    let y3 = milli(rng.gen_range(third.0..third.1));
    let sys = torus(vec![
        Curve::vertical(0, xa),
        Curve::base(1, points),
        Curve::horizontal(2, y3),
        Curve::vertical(3, milli(800)),
    ]);
    (sys, touch)
}

/// Horizontal curve 0 and a bent curve 1 of class `(r, s)`, meeting `s` times.
fn minimal_pair(rng: &mut impl Rng, s: i64) -> CurveSystem {
    loop {
        let r = coprime_to(rng, s);
        let x0 = milli(rng.gen_range(0..1000));
        let bends = rng.gen_range(1..=4);
        let v = ymono(rng, 1, x0, r, s, bends);
        let u = Curve::horizontal(0, rat(rng.gen_range(1..997), 997));
        let sys = torus(vec![u, v]);
        if sound(&sys, &sys.curves[1]) && report(&sys, 0, 1).all_crossing() && count(&sys, 0, 1) == Some(s as usize) {
            return sys;
        }
    }
}

fn path_ok(sys: &CurveSystem, p: &SurgeryPath, u: Label, v: Label, k: usize) -> Result<(), String> {
    let s = &sys.surface;
    ensure!(p.curves.len() >= 2 && p.curves.len() <= 4, "path has {} curves", p.curves.len());
    ensure!(p.curves[0] == *sys.curve(u).unwrap(), "path does not start at u");
    ensure!(p.curves.last() == Some(sys.curve(v).unwrap()), "path does not end at v");
    for w in p.curves.windows(2) {
        let c = s.report_curves(&w[0], &w[1]).map_err(|e| e.to_string())?.cardinality.finite();
        ensure!(c.is_some_and(|c| c <= k), "consecutive curves meet {c:?} times, k = {k}");
    }
    for c in &p.curves[1..p.curves.len() - 1] {
        ensure!(sound(sys, c), "interior curve {} is not embedded and essential", c.label);
    }
    Ok(())
}

/// Reports of pairs avoiding `modified` must be bit-identical; pairs with it
/// must not gain intersections.
fn locality_ok(before: &CurveSystem, after: &CurveSystem, modified: Label) -> Result<(), String> {
    for (i, j) in pairs(before.curves.len()) {
        let (rb, ra) = (report(before, i, j), report(after, i, j));
        if i != modified && j != modified {
            let same = serde_json::to_string(&rb).unwrap() == serde_json::to_string(&ra).unwrap();
            ensure!(same, "untouched pair ({i}, {j}) changed");
        } else if let (Some(cb), Some(ca)) = (rb.cardinality.finite(), ra.cardinality.finite()) {
            ensure!(ca <= cb || (i, j) == (0, 1), "pair ({i}, {j}) went from {cb} to {ca}");
        }
    }
    Ok(())
}

fn surgeries() -> Check {
    let mut rng = rng(7);
    for t in 0..SURGERY_PAIRS {
        let crossing_finger = t % 2 == 1;
        let (sys, touch) = feature_pair(&mut rng, true, crossing_finger as usize);
        let k = if crossing_finger { 2 } else { 0 };
        let before = count(&sys, 0, 1);
        ensure!(before == Some(k + 1), "touching pair {t}: built with {before:?} points");
        let p = surgery_path(&sys, 1, 0, k).map_err(|e| format!("touching pair {t}: {e}"))?;
        ensure!(p.case == SurgeryCase::Touching, "touching pair {t}: case {:?}", p.case);
        path_ok(&sys, &p, 1, 0, k).map_err(|e| format!("touching pair {t}: {e}"))?;
        let out = remove_touching(&sys, 1, 0, touch.as_ref().unwrap()).map_err(|e| format!("touching pair {t}: {e}"))?;
        let after = sys.with_curve(out.curve).map_err(|e| e.to_string())?;
        ensure!(count(&after, 0, 1) == Some(k), "touching pair {t}: count after {:?}", count(&after, 0, 1));
        locality_ok(&sys, &after, 1).map_err(|e| format!("touching pair {t}: {e}"))?;
    }
    for t in 0..SURGERY_PAIRS {
        let fingers = 1 + t % 2;
        let (sys, _) = feature_pair(&mut rng, false, fingers);
        let n = 2 * fingers;
        ensure!(count(&sys, 0, 1) == Some(n), "bigon pair {t}: built with {:?} points", count(&sys, 0, 1));
        let p = surgery_path(&sys, 1, 0, n - 1).map_err(|e| format!("bigon pair {t}: {e}"))?;
        ensure!(p.case == SurgeryCase::Bigon, "bigon pair {t}: case {:?}", p.case);
        path_ok(&sys, &p, 1, 0, n - 1).map_err(|e| format!("bigon pair {t}: {e}"))?;
        let bigons = find_bigons(&sys, 1, 0).map_err(|e| e.to_string())?;
        ensure!(bigons.iter().any(|b| b.innermost), "bigon pair {t}: no innermost bigon");
        for b in bigons.iter().filter(|b| b.innermost) {
            let out = remove_innermost_bigon(&sys, 1, 0, b).map_err(|e| format!("bigon pair {t}: {e}"))?;
            ensure!((out.step.before, out.step.after) == (n, n - 2), "bigon pair {t}: trace {:?}", out.step);
            let after = sys.with_curve(out.curve).map_err(|e| e.to_string())?;
            ensure!(count(&after, 0, 1) == Some(n - 2), "bigon pair {t}: count after {:?}", count(&after, 0, 1));
            locality_ok(&sys, &after, 1).map_err(|e| format!("bigon pair {t}: {e}"))?;
        }
    }
    let mut cases = BTreeSet::new();
    for t in 0..SURGERY_PAIRS {
        let s = 2 + (t % 3) as i64;
        let sys = minimal_pair(&mut rng, s);
        let k = s as usize - 1;
        let p = surgery_path(&sys, 0, 1, k).map_err(|e| format!("minimal pair {t} (s = {s}): {e}"))?;
        path_ok(&sys, &p, 0, 1, k).map_err(|e| format!("minimal pair {t}: {e}"))?;
        cases.insert(format!("{:?}", p.case));
    }
    Ok(format!("{SURGERY_PAIRS} pairs per case; minimal-position cases {cases:?}"))
}

// ---------- 8 ----------

fn witnesses() -> Check {
    let mut rng = rng(8);
    let mut overlaps = 0;
    for t in 0..WITNESS_PAIRS {
        let ra = rng.gen_range(-2..=2);
        let (x0, bends) = (milli(rng.gen_range(0..1000)), rng.gen_range(3..=5));
        let a = ymono(&mut rng, 0, x0, ra, 1, bends);
        let overlap = t < OVERLAP_PAIRS;
        let b = if overlap {
            let mut b = a.clone();
            b.label = 1;
            let pts = &mut b.legs[0].points;
            let k = rng.gen_range(1..pts.len() - 1);
            pts[k].x += milli(rng.gen_range(1..50));
            b
        } else {
            let (x0, r, bends) = (milli(rng.gen_range(0..1000)), rng.gen_range(-2..=2), rng.gen_range(1..=4));
            let c = ymono(&mut rng, 1, x0, r, 1, bends);
            if rng.gen_bool(0.5) {
                c
            } else {
                swap_axes(&c)
            }
        };
        let sys = torus(vec![a, b]);
        let ab = report(&sys, 0, 1).cardinality.finite();
        if overlap {
            ensure!(ab.is_none(), "pair {t} was built to overlap but meets {ab:?} times");
            overlaps += 1;
        }
        let c = distance2_witness(&sys, 0, 1).map_err(|e| format!("pair {t}: {e}"))?;
        let s = &sys.surface;
        let ca = s.report_curves(&c, &sys.curves[0]).map_err(|e| e.to_string())?;
        let cb = s.report_curves(&c, &sys.curves[1]).map_err(|e| e.to_string())?;
        ensure!(ca.cardinality.finite() == Some(0), "pair {t}: witness meets a");
        ensure!(cb.cardinality.finite().is_some() && cb.all_crossing(), "pair {t}: witness meets b badly");
        ensure!(sound(&sys, &c), "pair {t}: witness not embedded and essential");
    }
    ensure!(overlaps == OVERLAP_PAIRS, "{overlaps} overlap pairs");
    Ok(format!("{WITNESS_PAIRS} pairs, {overlaps} at distance >= 2, all joined through a witness"))
}

// ---------- 9 ----------

fn unions() -> Check {
    let mut rng = rng(9);
    for t in 0..UNION_PAIRS {
        let sys = if t % 2 == 0 {
            let r = rng.gen_range(-2..=2);
            let (x0, bends) = (milli(rng.gen_range(0..500)), rng.gen_range(1..=4));
            let a = ymono(&mut rng, 0, x0, r, 1, bends);
            let mut b = a.clone();
            b.label = 1;
            let dx = milli(rng.gen_range(1..500));
            for p in &mut b.legs[0].points {
                p.x += &dx;
            }
            torus(vec![a, b])
        } else {
            let (x0, r, bends) = (milli(rng.gen_range(0..1000)), rng.gen_range(-2..=2), rng.gen_range(1..=4));
            let a = ymono(&mut rng, 0, x0, r, 1, bends);
            torus(vec![a, Curve::horizontal(1, rat(rng.gen_range(1..997), 997))])
        };
        let c = count(&sys, 0, 1);
        ensure!(c.is_some_and(|c| c <= 1), "small pair {t}: meets {c:?} times");
        let cycles = curves_in_union(&sys, 0, 1).map_err(|e| e.to_string())?;
        ensure!(cycles.is_empty(), "small pair {t}: {} cycles in the union", cycles.len());
    }
    for t in 0..UNION_PAIRS {
        let sys = if t % 2 == 0 { minimal_pair(&mut rng, 2) } else { feature_pair(&mut rng, false, 1).0 };
        ensure!(count(&sys, 0, 1) == Some(2), "two-point pair {t}: meets {:?} times", count(&sys, 0, 1));
        let cycles = curves_in_union(&sys, 0, 1).map_err(|e| e.to_string())?;
        ensure!(cycles.iter().any(|c| c.essential), "two-point pair {t}: no essential cycle in the union");
    }
    Ok(format!("{UNION_PAIRS} pairs each way"))
}

// ---------- 10 ----------

fn artifacts() -> Vec<String> {
    let mut out = Vec::new();
    let mut rng = rng(10);
    let mut push = |cert: &RealizationCertificate| {
        out.push(CertificateFile::new(cert).to_json());
        out.push(render_svg(&cert.system));
    };
    for _ in 0..5 {
        let n = rng.gen_range(4..=7);
        let g = random_graph(&mut rng, n);
        push(&realize_fine_torus(&g).unwrap());
        push(&realize_annulus(&g, Semantics::KFine { k: 2 }).unwrap());
    }
    for cert in finecurve::realizer::catalog_small_torus(4).unwrap() {
        push(&cert);
    }
    for s in 2..=4 {
        let sys = minimal_pair(&mut rng, s);
        out.push(serde_json::to_string(&surgery_path(&sys, 0, 1, s as usize - 1).unwrap()).unwrap());
        out.push(serde_json::to_string(&distance2_witness(&sys, 0, 1).unwrap()).unwrap());
    }
    let mut verdicts = Vec::new();
    for mask in 0..1u64 << 10 {
        verdicts.push(annulus_core_obstruction(&Graph::from_mask(5, mask)).unwrap());
    }
    out.push(serde_json::to_string(&verdicts).unwrap());
    out
}

/// Non-test source lines mentioning floating point outside the SVG writer.
fn float_audit() -> Vec<String> {
    fn walk(dir: &Path, hits: &mut Vec<String>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(&p, hits);
                continue;
            }
            if p.extension().is_none_or(|e| e != "rs") || p.ends_with("shell/svg.rs") {
                continue;
            }
            let text = std::fs::read_to_string(&p).unwrap();
            let body = text.split("#[cfg(test)]").next().unwrap();
            for (no, line) in body.lines().enumerate() {
                let floats = line.contains("f32") || line.contains("f64");
                let conversion = line.contains("to_f64") && p.ends_with("exactgeom.rs");
                if (floats || line.contains("to_f64")) && !conversion {
                    hits.push(format!("{}:{}", p.display(), no + 1));
                }
            }
        }
    }
    let mut hits = Vec::new();
    walk(&Path::new(env!("CARGO_MANIFEST_DIR")).join("src"), &mut hits);
    hits
}

fn tiny(num: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(10).pow(30))
}

fn determinism() -> Check {
    let runs: Vec<Vec<String>> = [1usize, 4, 4]
        .iter()
        .map(|&threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(artifacts))
        .collect();
    ensure!(runs[0] == runs[1] && runs[1] == runs[2], "artifacts differ between runs");

    let hits = float_audit();
    ensure!(hits.is_empty(), "floating point outside rendering: {hits:?}");

    let mut rng = rng(11);
    for t in 0..PERTURBATION_TRIALS {
        let x = milli(rng.gen_range(200..800));
        let base = &x + milli(rng.gen_range(1..100));
        let y = rng.gen_range(100..800);
        let d = rng.gen_range(1..1_000_000);
        let count_at = |tip: Rational| {
            let wedge = Curve::base(
                1,
                vec![
                    pt(base.clone(), milli(0)),
                    pt(base.clone(), milli(y)),
                    pt(tip, milli(y + 50)),
                    pt(base.clone(), milli(y + 100)),
                    pt(base.clone(), milli(1000)),
                ],
            );
            let sys = torus(vec![Curve::vertical(0, x.clone()), wedge]);
            let r = report(&sys, 0, 1);
            (r.cardinality.finite(), r.points.iter().map(|p| p.kind).collect::<Vec<_>>())
        };
        ensure!(count_at(x.clone()) == (Some(1), vec![LocalKind::Touching]), "trial {t}: tip on the curve");
        ensure!(count_at(&x + tiny(d)).0 == Some(0), "trial {t}: tip moved off by {d}e-30");
        let past = count_at(&x - tiny(d));
        ensure!(past == (Some(2), vec![LocalKind::Crossing; 2]), "trial {t}: tip moved past by {d}e-30");
    }
    Ok(format!(
        "{} artifacts identical across 3 runs; no floats in predicates; {PERTURBATION_TRIALS} 1e-30 perturbations exact",
        runs[0].len()
    ))
}
