//! Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
//! below; every criterion is recomputed from scratch.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flatfold_core::fixtures;
use flatfold_core::angle::parse_rational;
use flatfold_core::geodesic::PiecewiseGeodesic;
use flatfold_core::geom::{dist, Affine2, Point};
use flatfold_core::link::vertex_girths;
use flatfold_core::rationality::{
    all_triangle_turnings_are_pi, check_extrational, perpendicular_propagation, psi, shear_spectrum,
    GeneratorKind,
};
use flatfold_core::witness::{
    check_word, corrupted, develop_sheared, reduced_words, select_connections, ShearedPiece,
};
use flatfold_core::{
    build_gamma, check_local_cat0, find_sheared_connections, free_subgroup_certificate,
    geodesic_between, patches, shoot_perpendicular, trace, unfold_all, verify_sheared, Angle,
    AngleValue, BranchPolicy, EdgeId, EndStatus, Endpoint, LinkDirection, Location, SearchParams,
    ShearedGeodesic, TriId, TriangleComplex, VertexId,
};
use flatfold_core::folding::verify_folding_properties;

const LENGTH_TOL: f64 = 1e-12;
const OFFSET_TOL: f64 = 1e-9;
const SEPARATION_TOL: f64 = 1e-9;
const SEED: u64 = 0x5eed_f1a7;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let t = Instant::now();
    let out = f();
    let el = t.elapsed();
    ensure(el < limit, format!("{what} took {el:?}, limit {limit:?}"))?;
    Ok(out)
}

fn criterion_1() -> Verdict {
    let sec = Duration::from_secs(1);
    let hex = timed(sec, "hex fan", || check_local_cat0(&fixtures::hex_fan()))?;
    ensure(hex.pass && hex.min_girth == Some(Angle::pi_frac(2, 1)), "hex fan girth is not 2π")?;
    let fan5 = timed(sec, "fan5", || check_local_cat0(&fixtures::fan(5)))?;
    ensure(!fan5.pass, "fan5 passes")?;
    ensure(fan5.failures.iter().any(|f| f.girth == Angle::pi_frac(5, 3)), "fan5 girth is not 5π/3")?;
    let x = fixtures::theta_circle();
    let c3 = timed(sec, "theta circle", || check_local_cat0(&x))?;
    ensure(c3.pass, "theta circle fails")?;
    let all = vertex_girths(&x).iter().all(|(_, g)| g.length == Some(Angle::pi_frac(2, 1)));
    ensure(all, "a theta circle vertex girth differs from 2π")?;
    Ok(format!("hex 2π, fan5 5π/3, theta×circle {} vertices at 2π", x.vertex_count()))
}

/// Maps between the unit square and the local frames of its two triangles.
struct Square {
    x: TriangleComplex,
    abc: TriId,
    acd: TriId,
    /// Global to local for `acd`.
    to_acd: Affine2,
    diagonal: EdgeId,
    diag_lo: Point,
}

impl Square {
    fn new() -> Self {
        let x = fixtures::flat_square();
        let abc = x.parse_triangle("A:B:C").unwrap();
        let acd = x.parse_triangle("A:C:D").unwrap();
        let t = x.triangle(acd);
        let lc = t.local_coords();
        let corner = |n: &str| t.corner_of(x.vertex_by_name(n).unwrap()).unwrap();
        let to_acd = Affine2::from_frames([0.0, 0.0], [1.0, 1.0], lc[corner("A")], lc[corner("C")], false);
        let diagonal = x.parse_edge("A:C").unwrap();
        let lo_name = x.vertex_name(x.edge(diagonal).ends[0]).to_string();
        let diag_lo = if lo_name == "A" { [0.0, 0.0] } else { [1.0, 1.0] };
        Square { x, abc, acd, to_acd, diagonal, diag_lo }
    }

    /// Local frame of the triangle holding `p`, which must be off the diagonal.
    fn host(&self, p: Point) -> (TriId, Affine2) {
        if p[1] < p[0] {
            // `A:B:C` has the square's own coordinates.
            (self.abc, Affine2::identity())
        } else {
            (self.acd, self.to_acd)
        }
    }
}

fn criterion_2() -> Verdict {
    let sq = Square::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst_len, mut worst_off, mut crossings) = (0f64, 0f64, 0usize);
    let mut n = 0;
    while n < 100 {
        let p: Point = [rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99)];
        let q: Point = [rng.gen_range(0.01..0.99), rng.gen_range(0.01..0.99)];
        if (p[1] - p[0]).abs() < 1e-3 || (q[1] - q[0]).abs() < 1e-3 || dist(p, q) < 1e-3 {
            continue;
        }
        n += 1;
        let d = dist(p, q);
        let (tp, fp) = sq.host(p);
        let dir = fp.apply_vec([q[0] - p[0], q[1] - p[1]]);
        let launch = Endpoint {
            location: Location::Interior { triangle: tp, pos: fp.apply(p) },
            direction: LinkDirection::Interior {
                triangle: tp,
                heading: AngleValue::numeric(dir[1].atan2(dir[0])),
            },
        };
        let path = trace(&sq.x, &launch, d, &BranchPolicy::Stop).map_err(|e| e.to_string())?.remove(0);
        ensure(path.status == EndStatus::BudgetExhausted, format!("segment {n} stopped early"))?;
        let last = path.segments.last().unwrap();
        let (_, fq) = sq.host(q);
        let end = fq.inverse().apply(last.exit);
        ensure(dist(end, q) < OFFSET_TOL, format!("segment {n} ends {} from q", dist(end, q)))?;
        worst_len = worst_len.max((path.length - d).abs());

        let crosses = (p[1] - p[0]).signum() != (q[1] - q[0]).signum();
        ensure(path.crossings.len() == usize::from(crosses), format!("segment {n} crossing count"))?;
        if crosses {
            crossings += 1;
            // Solve p + s(q-p) on y = x.
            let s = (p[0] - p[1]) / ((q[1] - p[1]) - (q[0] - p[0]));
            let r = [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])];
            let c = &path.crossings[0];
            ensure(c.edge == sq.diagonal, "crossed the wrong edge")?;
            worst_off = worst_off.max((c.offset - dist(r, sq.diag_lo)).abs());
        }

        let lp = Location::Interior { triangle: tp, pos: fp.apply(p) };
        let (tq, fq) = sq.host(q);
        let lq = Location::Interior { triangle: tq, pos: fq.apply(q) };
        let g = geodesic_between(&sq.x, &lp, &lq, 4.0, true).map_err(|e| e.to_string())?;
        worst_len = worst_len.max((g.length - d).abs());
    }
    ensure(worst_len <= LENGTH_TOL, format!("length error {worst_len:e}"))?;
    ensure(worst_off <= OFFSET_TOL, format!("offset error {worst_off:e}"))?;
    Ok(format!("100 segments ({crossings} crossing), length err {worst_len:.1e}, offset err {worst_off:.1e}"))
}

fn criterion_3() -> Verdict {
    let sq = Square::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let ab = sq.x.parse_edge("A:B").unwrap();
    let mut checked = 0;
    for _ in 0..20 {
        let k = rng.gen_range(1..=11);
        let launch = Endpoint {
            location: Location::Edge { edge: ab, offset: rng.gen_range(0.05..0.6) },
            direction: LinkDirection::Edge {
                triangle: sq.abc,
                angle_from_hi: AngleValue::exact(Angle::pi_frac(k, 12), sq.x.atom_env()).unwrap(),
            },
        };
        let p = trace(&sq.x, &launch, 5.0, &BranchPolicy::Stop).map_err(|e| e.to_string())?.remove(0);
        let pw = PiecewiseGeodesic::new(p.split_at_crossings(&sq.x));
        let r = flatfold_core::verify_local_geodesic(&sq.x, &pw).map_err(|e| e.to_string())?;
        ensure(r.ok, "straight path rejected")?;
        ensure(r.distances.iter().all(|d| d.exact == Some(Angle::pi())), "breakpoint distance is not exactly π")?;
        checked += r.distances.len();
    }
    // Through a flat cone point: straight in the development, distance π.
    let hex = fixtures::hex_fan();
    let through = apex_path(&hex, 3, Angle::pi_frac(1, 12))?;
    let r = flatfold_core::verify_local_geodesic(&hex, &through).map_err(|e| e.to_string())?;
    ensure(r.ok && r.distances[0].exact == Some(Angle::pi()), "hex apex path is not straight")?;
    // Reflection at the diagonal breaks the condition.
    let launch = Endpoint {
        location: Location::Edge { edge: ab, offset: 0.25 },
        direction: LinkDirection::Edge {
            triangle: sq.abc,
            angle_from_hi: AngleValue::exact(Angle::pi_frac(1, 3), sq.x.atom_env()).unwrap(),
        },
    };
    let p = trace(&sq.x, &launch, 5.0, &BranchPolicy::Stop).map_err(|e| e.to_string())?.remove(0);
    let c = &p.crossings[0];
    let first = p.split_at_crossings(&sq.x).remove(0);
    let bounce = Endpoint {
        location: Location::Edge { edge: c.edge, offset: c.offset },
        direction: LinkDirection::Edge { triangle: c.from, angle_from_hi: c.angle_from_hi.clone() },
    };
    let second = trace(&sq.x, &bounce, 0.1, &BranchPolicy::Stop).map_err(|e| e.to_string())?.remove(0);
    let bad = flatfold_core::verify_local_geodesic(&sq.x, &PiecewiseGeodesic::new(vec![first, second]))
        .map_err(|e| e.to_string())?;
    ensure(!bad.ok, "reflected path accepted")?;
    Ok(format!("{checked} breakpoints at exactly π plus a flat apex; reflection rejected"))
}

/// A geodesic into apex `O` from triangle 0 and out through `out_tri`.
fn apex_path(x: &TriangleComplex, out_tri: usize, out_angle: Angle) -> Result<PiecewiseGeodesic, String> {
    let o = x.vertex_by_name("O").unwrap();
    let launch = |t: usize, a: Angle| Endpoint {
        location: Location::Vertex { vertex: o },
        direction: LinkDirection::Vertex {
            triangle: TriId(t),
            corner: 0,
            angle: AngleValue::exact(a, x.atom_env()).unwrap(),
        },
    };
    let err = |e: flatfold_core::GeodesicError| e.to_string();
    let out = trace(x, &launch(0, Angle::pi_frac(1, 12)), 0.5, &BranchPolicy::Stop).map_err(err)?.remove(0);
    let inward = trace(x, &out.end, 0.5 + 1e-6, &BranchPolicy::Stop).map_err(err)?.remove(0);
    ensure(inward.status == EndStatus::HitVertex { vertex: o }, "did not return to the apex")?;
    let second = trace(x, &launch(out_tri, out_angle), 0.5, &BranchPolicy::Stop).map_err(err)?.remove(0);
    Ok(PiecewiseGeodesic::new(vec![inward, second]))
}

fn criterion_4() -> Verdict {
    let corpus = fixtures::folding_corpus();
    ensure(corpus.len() >= 5, "folding corpus too small")?;
    let mut total = 0;
    for (name, x) in &corpus {
        let u = timed(Duration::from_secs(1), name, || unfold_all(x))?;
        let corners = 3 * x.triangle_count();
        ensure(!u.steps.is_empty() && u.steps.len() <= corners, format!("{name}: {} steps", u.steps.len()))?;
        for (k, step) in u.steps.iter().enumerate() {
            let (a, b) = (&u.stages[k], &u.stages[k + 1]);
            let map: Vec<VertexId> = (0..b.vertex_count())
                .map(|i| if i == step.v2.0 { step.vertex } else { VertexId(i) })
                .collect();
            let r = verify_folding_properties(a, b, &map, false).map_err(|e| format!("{name} step {k}: {e}"))?;
            ensure(r.essential.0 == r.essential.1, format!("{name} step {k}: essential changed"))?;
            ensure(r.locally_cat0.0 == r.locally_cat0.1, format!("{name} step {k}: CAT(0) verdict changed"))?;
        }
        verify_folding_properties(x, &u.result, &u.vertex_map, true).map_err(|e| format!("{name}: {e}"))?;
        total += u.steps.len();
    }
    Ok(format!("{} fixtures, {total} steps, fixpoints reached", corpus.len()))
}

fn criterion_5() -> Verdict {
    let c3 = check_extrational(&fixtures::theta_circle()).map_err(|e| e.to_string())?;
    ensure(c3.pass, "theta circle not extrational")?;
    let f7 = check_extrational(&fixtures::fan(7)).map_err(|e| e.to_string())?;
    ensure(!f7.pass && f7.circle_failures.iter().any(|c| c.length == Angle::pi_frac(7, 3)), "fan7 circle is not 7π/3")?;
    let cone = fixtures::cone_annulus(6, 0.9);
    let r = check_extrational(&cone).map_err(|e| e.to_string())?;
    ensure(!r.pass, "cone annulus passes")?;
    let ps = patches(&cone);
    let g = psi(&cone, &ps[0]).map_err(|e| e.to_string())?;
    let alpha = Angle::atom("alpha", parse_rational("1").unwrap());
    let hit = g
        .generators
        .iter()
        .any(|g| matches!(g.kind, GeneratorKind::Loop { .. }) && g.psi == alpha);
    ensure(hit, "no loop with ψ = α")?;
    for (name, x) in fixtures::corpus() {
        ensure(all_triangle_turnings_are_pi(&x), format!("{name}: a triangle turning is not ±π"))?;
    }
    Ok("theta×circle extrational, fan7 7π/3, cone ψ = α, all turnings ±π".into())
}

fn criterion_6() -> Verdict {
    let x = fixtures::theta_circle();
    let r = perpendicular_propagation(&x, &[0.125, 0.25, 0.5, 0.75, 0.875], 10.0).map_err(|e| e.to_string())?;
    ensure(r.pass && r.skipped == 0, "propagation failed or skipped shots")?;
    ensure(r.arrivals.iter().all(|a| a.angle == Some(Angle::pi_frac(1, 2))), "an arrival is not π/2")?;
    for p in patches(&x) {
        let s = shear_spectrum(&x, &p).map_err(|e| e.to_string())?;
        ensure(s.q_prime == 2, format!("patch {} has q′ = {}", p.id, s.q_prime))?;
    }
    Ok(format!("{} arrivals at π/2, q′ = 2", r.arrivals.len()))
}

/// A random sheared geodesic: perpendicular shots joined by random slides,
/// each shot leaving through a triangle other than the arrival one.
fn random_sheared(x: &TriangleComplex, rng: &mut ChaCha8Rng) -> Option<ShearedGeodesic> {
    let thick: Vec<EdgeId> = x.edge_ids().filter(|&e| x.edge_degree(e) >= 3).collect();
    let mut e = thick[rng.gen_range(0..thick.len())];
    let mut offset = x.edge(e).length * rng.gen_range(0.05..0.95);
    let mut arrived: Option<TriId> = None;
    let mut pieces = Vec::new();
    let k = rng.gen_range(1..=8);
    while pieces.len() < 2 * k {
        let mut options: Vec<TriId> =
            x.edge(e).triangles.iter().map(|t| t.0).filter(|&t| Some(t) != arrived).collect();
        let mut shot = None;
        while !options.is_empty() && shot.is_none() {
            let t = options.swap_remove(rng.gen_range(0..options.len()));
            let p = shoot_perpendicular(x, e, offset, t, 20.0, &BranchPolicy::Follow(vec![])).ok()?.remove(0);
            if let EndStatus::HitBranchingEdge { edge, offset, triangle, .. } = p.status {
                shot = Some((p, edge, offset, triangle));
            }
        }
        let (p, edge, at, triangle) = shot?;
        let len = x.edge(edge).length;
        let to = len * rng.gen_range(0.05..0.95);
        pieces.push(ShearedPiece::Geodesic { path: p });
        pieces.push(ShearedPiece::Slide { edge, from: at, to });
        e = edge;
        offset = to;
        arrived = Some(triangle);
    }
    Some(ShearedGeodesic { pieces })
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut min_sep = f64::INFINITY;
    let mut count = 0;
    for (name, x) in [("theta_circle", fixtures::theta_circle()), ("book_chain", fixtures::book_chain(3))] {
        let mut made = 0;
        let mut attempts = 0;
        while made < 100 {
            attempts += 1;
            ensure(attempts < 1000, format!("{name}: could not generate sheared geodesics"))?;
            let Some(g) = random_sheared(&x, &mut rng) else { continue };
            let chk = verify_sheared(&x, &g);
            ensure(chk.ok, format!("{name}: generated path rejected: {:?}", chk.failures))?;
            let d = develop_sheared(&x, &g);
            ensure(d.separation > SEPARATION_TOL, format!("{name}: endpoints coincide"))?;
            let prefix = d.prefix_separations.iter().cloned().fold(f64::INFINITY, f64::min);
            ensure(prefix > SEPARATION_TOL, format!("{name}: a prefix closes up"))?;
            min_sep = min_sep.min(prefix);
            made += 1;
        }
        count += made;
    }
    Ok(format!("{count} sheared geodesics, min prefix separation {min_sep:.3}"))
}

fn criterion_8() -> Verdict {
    let x = fixtures::theta_circle();
    let e = x.parse_edge("u0:u1").unwrap();
    let (conns, cert, g) = timed(Duration::from_secs(10), "witness", || -> Result<_, String> {
        let conns = find_sheared_connections(&x, e, &SearchParams::default()).map_err(|e| e.to_string())?;
        let [ab, ca, bc] = select_connections(&x, e, &conns).map_err(|e| e.to_string())?;
        let g = build_gamma(&x, e, &ab, &ca, &bc).map_err(|e| e.to_string())?;
        let cert = free_subgroup_certificate(&x, &g, 4).map_err(|e| e.to_string())?;
        Ok((conns, cert, g))
    })??;
    let at_e = conns.iter().filter(|c| c.end_edge == e).count();
    ensure(at_e >= 3, format!("only {at_e} connections return to the edge"))?;
    ensure(cert.complete && cert.words_of_max_length == 108, "certificate incomplete")?;
    ensure(cert.min_separation >= 1.0, format!("separation {}", cert.min_separation))?;
    let bad = corrupted(&g);
    let fail = reduced_words(2).iter().find(|w| !check_word(&x, &bad, w).failures.is_empty()).map(|w| w.len());
    ensure(fail.is_some(), "corrupted Γ passes all words of length ≤ 2")?;
    Ok(format!(
        "{at_e} connections, {} words ({} of length 4), min separation {:.3}, corrupted Γ fails at length {}",
        cert.words_checked,
        cert.words_of_max_length,
        cert.min_separation,
        fail.unwrap()
    ))
}

fn corpus_files() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|d| d.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

fn criterion_9() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_flatfold");
    let mut runs: Vec<Vec<String>> = Vec::new();
    for f in corpus_files() {
        let f = f.to_string_lossy().into_owned();
        for c in ["validate", "check", "links", "unfold", "patches", "rational", "render"] {
            runs.push(vec![c.into(), f.clone()]);
        }
    }
    let file = |n: &str| corpus_files().into_iter().find(|p| p.ends_with(n)).unwrap().to_string_lossy().into_owned();
    let s = |v: &[&str]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>();
    runs.push(s(&["trace", &file("flat_square.json"), "--edge", "A:B", "--offset", "0.25", "--triangle", "A:B:C", "--angle", "1/3"]));
    runs.push(s(&["trace", &file("theta_circle.json"), "--edge", "u0:u1", "--offset", "0.4", "--triangle", "u0:mx1:u1", "--enumerate"]));
    runs.push(s(&["witness", &file("theta_circle.json"), "--edge", "u0:u1", "--word-length", "3"]));
    runs.push(s(&["witness", &file("book3.json")]));
    for args in &runs {
        let go = |extra: &[&str]| Command::new(bin).args(args).args(extra).output().expect("binary runs");
        let (a, b, c) = (go(&[]), go(&[]), go(&["--threads", "1"]));
        ensure(a.stdout == b.stdout && a.status == b.status, format!("{args:?} differs between runs"))?;
        ensure(a.stdout == c.stdout, format!("{args:?} differs with one thread"))?;
        ensure(a.status.code().is_some_and(|c| c <= 1), format!("{args:?} exited {:?}", a.status.code()))?;
    }
    Ok(format!("{} invocations byte-identical across 3 runs", runs.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("link condition", criterion_1),
        ("geodesic tracer vs planar oracle", criterion_2),
        ("local-geodesic criterion", criterion_3),
        ("folding suite", criterion_4),
        ("extrationality", criterion_5),
        ("perpendicularity propagation", criterion_6),
        ("sheared geodesics never close", criterion_7),
        ("free-subgroup witness", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
