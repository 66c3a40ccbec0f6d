//! Sheared geodesics, perpendicular connections at a thick edge, and the
//! free-subgroup certificate built from three of them.
//!
//! A sheared geodesic alternates straight pieces, each perpendicular to a
//! branching edge at its junction ends, with slides inside those edges, and
//! it never turns back into the triangle it arrived from. Such paths cannot
//! close up in a CAT(0) complex. Three connections at an edge `e` assemble
//! into a tree Γ whose copies spell out one such path for every reduced word
//! in two letters; checking that none of them closes certifies that the two
//! corresponding loops generate a free group, up to the chosen word length.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::angle::{Angle, AngleValue, AtomEnv};
use crate::complex::{EdgeId, TriId, TriangleComplex, VertexId};
use crate::error::WitnessError;
use crate::geodesic::{
    shoot_perpendicular, BranchPolicy, EndStatus, GeodesicPath, LinkDirection, Location,
};
use crate::geom::{self, dist, glue_frame, Affine2, Point};
use crate::group::{fundamental_group, Presentation, Word};

/// Offsets and positions closer than this are treated as equal.
pub const JUNCTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShearedPiece {
    Geodesic { path: GeodesicPath },
    /// Motion inside the edge from offset `from` to offset `to`.
    Slide { edge: EdgeId, from: f64, to: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShearedGeodesic {
    pub pieces: Vec<ShearedPiece>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShearedCheck {
    pub ok: bool,
    /// True when some perpendicularity was only checked numerically.
    pub numeric: bool,
    pub failures: Vec<String>,
}

fn half_pi(env: &AtomEnv) -> AngleValue {
    AngleValue::exact(Angle::pi_frac(1, 2), env).expect("π/2 is exact")
}

/// Exact when possible: `Some(true)` exact perpendicular, `Some(false)` within
/// tolerance numerically, `None` not perpendicular.
fn perpendicular(a: &AngleValue, env: &AtomEnv, tol: f64) -> Option<bool> {
    match &a.exact {
        Some(x) => (*x == Angle::pi_frac(1, 2)).then_some(true),
        None => (a.cmp_with(&half_pi(env), env, tol).is_eq()).then_some(false),
    }
}

fn edge_end(p: &GeodesicPath) -> Option<(EdgeId, f64, TriId, &AngleValue)> {
    match (&p.end.location, &p.end.direction) {
        (Location::Edge { edge, offset }, LinkDirection::Edge { triangle, angle_from_hi }) => {
            Some((*edge, *offset, *triangle, angle_from_hi))
        }
        _ => None,
    }
}

fn edge_start(p: &GeodesicPath) -> Option<(EdgeId, f64, TriId, &AngleValue)> {
    match (&p.start.location, &p.start.direction) {
        (Location::Edge { edge, offset }, LinkDirection::Edge { triangle, angle_from_hi }) => {
            Some((*edge, *offset, *triangle, angle_from_hi))
        }
        _ => None,
    }
}

/// Checks the alternation, perpendicularity at every junction, distinct
/// junction triangles, and that slides stay inside their edges.
pub fn verify_sheared(x: &TriangleComplex, g: &ShearedGeodesic) -> ShearedCheck {
    let env = x.atom_env();
    let tol = JUNCTION_TOL;
    let mut failures = Vec::new();
    let mut numeric = false;
    let n = g.pieces.len();
    if n < 2 || n % 2 == 1 {
        failures.push(format!("expected an even, nonzero number of pieces, got {n}"));
    }
    for (i, piece) in g.pieces.iter().enumerate() {
        match (i % 2, piece) {
            (0, ShearedPiece::Geodesic { path }) => {
                let Some((e, o, t, back)) = edge_end(path) else {
                    failures.push(format!("piece {i} does not end on an edge"));
                    continue;
                };
                match perpendicular(back, env, tol) {
                    Some(exact) => numeric |= !exact,
                    None => failures.push(format!("piece {i} ends at angle {back} to its edge")),
                }
                let Some(ShearedPiece::Slide { edge, from, to }) = g.pieces.get(i + 1) else {
                    continue;
                };
                if *edge != e || (from - o).abs() > tol {
                    failures.push(format!("slide {} does not start where piece {i} ends", i + 1));
                }
                let Some(ShearedPiece::Geodesic { path: next }) = g.pieces.get(i + 2) else {
                    continue;
                };
                let Some((e2, o2, t2, out)) = edge_start(next) else {
                    failures.push(format!("piece {} does not start on an edge", i + 2));
                    continue;
                };
                if e2 != e || (to - o2).abs() > tol {
                    failures.push(format!("piece {} does not start where slide {} ends", i + 2, i + 1));
                }
                match perpendicular(out, env, tol) {
                    Some(exact) => numeric |= !exact,
                    None => failures.push(format!("piece {} starts at angle {out}", i + 2)),
                }
                if t2 == t {
                    failures.push(format!(
                        "junction {} leaves through its arrival triangle {}",
                        i + 1,
                        x.triangle_label(t)
                    ));
                }
            }
            (1, ShearedPiece::Slide { edge, from, to }) => {
                let len = x.edge(*edge).length;
                let inside = |o: f64| o > tol && o < len - tol;
                if !inside(*from) || !inside(*to) {
                    failures.push(format!("slide {i} leaves the interior of {}", x.edge_label(*edge)));
                }
            }
            _ => failures.push(format!("piece {i} breaks the alternation")),
        }
    }
    ShearedCheck { ok: failures.is_empty(), numeric, failures }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShearedDevelopment {
    pub start: Point,
    pub end: Point,
    /// Developed polyline through every segment end and slide end.
    pub polyline: Vec<Point>,
    /// Distance from the start to the end of each slide.
    pub prefix_separations: Vec<f64>,
    pub separation: f64,
}

/// Develops the path into the plane, gluing each junction as if the path
/// crossed the edge from its arrival triangle into its departure triangle.
pub fn develop_sheared(x: &TriangleComplex, g: &ShearedGeodesic) -> ShearedDevelopment {
    let mut polyline = Vec::new();
    let mut prefix_separations = Vec::new();
    // Global frame of the current triangle.
    let mut frame: Option<(TriId, Affine2)> = None;
    let mut pending_edge: Option<EdgeId> = None;
    let mut start = None;
    for piece in &g.pieces {
        match piece {
            ShearedPiece::Geodesic { path } => {
                let first = &path.segments[0];
                let global_first = match (frame, pending_edge) {
                    (Some((t, f)), Some(e)) => glue_frame(x, t, &f, first.triangle, e),
                    _ => Affine2::identity(),
                };
                let to_global = global_first.compose(&first.frame.inverse());
                if polyline.is_empty() {
                    let p = to_global.apply(path.dev_start());
                    polyline.push(p);
                    start = Some(p);
                }
                for s in &path.segments {
                    polyline.push(to_global.compose(&s.frame).apply(s.exit));
                }
                let last = path.segments.last().unwrap();
                frame = Some((last.triangle, to_global.compose(&last.frame)));
                pending_edge = None;
            }
            ShearedPiece::Slide { edge, to, .. } => {
                let Some((t, f)) = frame else { continue };
                let (plo, phi, _) = geom::edge_in_triangle(x, t, *edge);
                let p = f.apply(geom::lerp(plo, phi, to / x.edge(*edge).length));
                polyline.push(p);
                prefix_separations.push(dist(start.unwrap_or(p), p));
                pending_edge = Some(*edge);
            }
        }
    }
    let start = start.unwrap_or([0.0, 0.0]);
    let end = *polyline.last().unwrap_or(&start);
    ShearedDevelopment { start, end, polyline, prefix_separations, separation: dist(start, end) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchParams {
    /// Launch offsets are `k/(offsets+1)` of the edge length.
    pub offsets: usize,
    pub budget: f64,
    /// Cap on enumerated continuations per launch.
    pub max_paths: usize,
    pub tolerance: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams { offsets: 16, budget: 12.0, max_paths: 4096, tolerance: JUNCTION_TOL }
    }
}

/// A geodesic leaving `e` perpendicularly and arriving perpendicularly at a
/// branching edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerpConnection {
    pub start_edge: EdgeId,
    pub start_offset: f64,
    pub start_triangle: TriId,
    pub end_edge: EdgeId,
    pub end_offset: f64,
    /// The triangle the path arrives through.
    pub end_triangle: TriId,
    pub length: f64,
    /// Arrival only checked within tolerance.
    pub numeric: bool,
    /// Word of the path closed up at the edges' low ends.
    pub word: Word,
    pub path: GeodesicPath,
}

impl PerpConnection {
    pub fn triangles(&self) -> Vec<TriId> {
        self.path.triangles()
    }
}

/// Word of a transverse path: each point on an edge is pushed to the edge's
/// low end, and the piece inside a triangle becomes the side joining those
/// ends.
pub fn word_of_transverse_path(
    x: &TriangleComplex,
    pres: &Presentation,
    path: &GeodesicPath,
) -> Result<Word, WitnessError> {
    let low = |l: &Location| -> Option<VertexId> {
        match l {
            Location::Edge { edge, .. } => Some(x.edge(*edge).ends[0]),
            Location::Vertex { vertex } => Some(*vertex),
            Location::Interior { triangle, .. } => Some(x.triangle(*triangle).vertices[0]),
        }
    };
    let mut verts: Vec<VertexId> = Vec::new();
    verts.extend(low(&path.start.location));
    verts.extend(path.crossings.iter().map(|c| x.edge(c.edge).ends[0]));
    verts.extend(low(&path.end.location));
    Ok(pres.word_of_path(x, &verts)?)
}

fn connection_from(
    x: &TriangleComplex,
    pres: &Presentation,
    path: GeodesicPath,
    numeric: bool,
) -> Result<PerpConnection, WitnessError> {
    let (se, so, st, _) = edge_start(&path).expect("perpendicular launches start on an edge");
    let (ee, eo, et, _) = edge_end(&path).expect("connections end on an edge");
    Ok(PerpConnection {
        start_edge: se,
        start_offset: so,
        start_triangle: st,
        end_edge: ee,
        end_offset: eo,
        end_triangle: et,
        length: path.length,
        numeric,
        word: word_of_transverse_path(x, pres, &path)?,
        path,
    })
}

/// Presentation based at the low end of `e`.
pub fn presentation_at(x: &TriangleComplex, e: EdgeId) -> Result<Presentation, WitnessError> {
    Ok(fundamental_group(x, x.edge(e).ends[0])?)
}

/// Enumerates perpendicular shots from `e` on the offset grid into every
/// triangle at `e`, following every branch except back through `e`, and
/// keeps each perpendicular arrival at a branching edge. Arrivals are
/// deduplicated by start triangle and crossing sequence, keeping the lowest
/// offset.
pub fn find_sheared_connections(
    x: &TriangleComplex,
    e: EdgeId,
    params: &SearchParams,
) -> Result<Vec<PerpConnection>, WitnessError> {
    x.check_edge(e).map_err(crate::error::GeodesicError::from)?;
    let deg = x.edge_degree(e);
    if deg < 3 {
        return Err(WitnessError::NotThick(x.edge_label(e), deg));
    }
    let env = x.atom_env();
    let pres = presentation_at(x, e)?;
    let len = x.edge(e).length;
    let policy = BranchPolicy::Enumerate { max_paths: params.max_paths, stop_at: vec![e] };
    let launches: Vec<(f64, TriId)> = (1..=params.offsets)
        .flat_map(|k| {
            let o = len * k as f64 / (params.offsets + 1) as f64;
            x.edge(e).triangles.iter().map(move |&(t, _)| (o, t))
        })
        .collect();
    let traced: Vec<Vec<GeodesicPath>> = launches
        .par_iter()
        .map(|&(o, t)| shoot_perpendicular(x, e, o, t, params.budget, &policy))
        .collect::<Result<_, _>>()?;

    let mut seen: BTreeSet<(TriId, Vec<TriId>, EdgeId)> = BTreeSet::new();
    let mut out = Vec::new();
    for path in traced.into_iter().flatten() {
        let mut candidates: Vec<(GeodesicPath, bool)> = Vec::new();
        for (k, c) in path.crossings.iter().enumerate() {
            if c.branching {
                if let Some(exact) = perpendicular(&c.angle_from_hi, env, params.tolerance) {
                    candidates.push((path.prefix_to_crossing(x, k), !exact));
                }
            }
        }
        if let EndStatus::HitBranchingEdge { angle, .. } = &path.status {
            if let Some(exact) = perpendicular(angle, env, params.tolerance) {
                candidates.push((path.clone(), !exact));
            }
        }
        for (p, numeric) in candidates {
            let (ee, ..) = edge_end(&p).unwrap();
            let key = (p.segments[0].triangle, p.triangles(), ee);
            if seen.insert(key) {
                out.push(connection_from(x, &pres, p, numeric)?);
            }
        }
    }
    if out.is_empty() {
        return Err(WitnessError::NoConnectionsWithinBudget(params.budget));
    }
    out.sort_by(|a, b| {
        (a.start_triangle, a.end_edge, a.end_triangle)
            .cmp(&(b.start_triangle, b.end_edge, b.end_triangle))
            .then(a.length.total_cmp(&b.length))
            .then(a.start_offset.total_cmp(&b.start_offset))
            .then_with(|| a.triangles().cmp(&b.triangles()))
    });
    Ok(out)
}

/// Positions on `e` of the connection endpoints, named as in the assembly of
/// Γ: `a`, `b`, `c` on the first lift of `e` and the primed ones on the lift
/// reached by `c_ca`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaPoints {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a_prime: f64,
    pub b_prime: f64,
    pub c_prime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalLengths {
    pub ab: f64,
    pub ca: f64,
    pub bc: f64,
    pub i: f64,
    pub i_prime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaGraph {
    pub edge: EdgeId,
    /// `T_a`, `T_b`, `T_c`.
    pub triangles: [TriId; 3],
    pub c_ab: PerpConnection,
    pub c_ca: PerpConnection,
    pub c_bc: PerpConnection,
    pub points: GammaPoints,
    /// Shortest intervals of `e` covering `a, b, c` and `a′, b′, c′`.
    pub interval: [f64; 2],
    pub interval_prime: [f64; 2],
    pub lengths: IntervalLengths,
    pub f: Word,
    pub g: Word,
    pub f_prime: Word,
}

fn span(v: [f64; 3]) -> [f64; 2] {
    [v.iter().cloned().fold(f64::INFINITY, f64::min), v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)]
}

/// Assembles Γ. The connections must run `T_a → T_b`, `T_c → T_a` and
/// `T_b → T_c` at `e` for three distinct triangles.
pub fn build_gamma(
    x: &TriangleComplex,
    e: EdgeId,
    c_ab: &PerpConnection,
    c_ca: &PerpConnection,
    c_bc: &PerpConnection,
) -> Result<GammaGraph, WitnessError> {
    for (name, c) in [("ab", c_ab), ("ca", c_ca), ("bc", c_bc)] {
        if c.start_edge != e || c.end_edge != e {
            return Err(WitnessError::OffsetsNotOnOneEdge(format!(
                "connection {name} runs from {} to {}, not along {}",
                x.edge_label(c.start_edge),
                x.edge_label(c.end_edge),
                x.edge_label(e)
            )));
        }
    }
    let (ta, tb, tc) = (c_ab.start_triangle, c_bc.start_triangle, c_ca.start_triangle);
    let pattern = [
        ("ab ends in T_b", c_ab.end_triangle == tb),
        ("ca ends in T_a", c_ca.end_triangle == ta),
        ("bc ends in T_c", c_bc.end_triangle == tc),
        ("T_a, T_b, T_c distinct", ta != tb && tb != tc && ta != tc),
    ];
    if let Some((what, _)) = pattern.iter().find(|p| !p.1) {
        return Err(WitnessError::TrianglePatternMismatch(what.to_string()));
    }
    let points = GammaPoints {
        a: c_ab.start_offset,
        b: c_ab.end_offset,
        c: c_ca.start_offset,
        a_prime: c_ca.end_offset,
        b_prime: c_bc.start_offset,
        c_prime: c_bc.end_offset,
    };
    let interval = span([points.a, points.b, points.c]);
    let interval_prime = span([points.a_prime, points.b_prime, points.c_prime]);
    let g = c_ca.word.clone();
    let f_prime = g.concat(&c_bc.word).concat(&g.inverse());
    Ok(GammaGraph {
        edge: e,
        triangles: [ta, tb, tc],
        lengths: IntervalLengths {
            ab: c_ab.length,
            ca: c_ca.length,
            bc: c_bc.length,
            i: interval[1] - interval[0],
            i_prime: interval_prime[1] - interval_prime[0],
        },
        c_ab: c_ab.clone(),
        c_ca: c_ca.clone(),
        c_bc: c_bc.clone(),
        points,
        interval,
        interval_prime,
        f: c_ab.word.clone(),
        g,
        f_prime,
    })
}

/// Picks the first triple of distinct triangles at `e` (in id order) for
/// which all three connection patterns occur, taking the shortest connection
/// for each.
pub fn select_connections(
    x: &TriangleComplex,
    e: EdgeId,
    conns: &[PerpConnection],
) -> Result<[PerpConnection; 3], WitnessError> {
    let at_e: Vec<&PerpConnection> =
        conns.iter().filter(|c| c.start_edge == e && c.end_edge == e).collect();
    let best = |from: TriId, to: TriId| {
        at_e.iter()
            .filter(|c| c.start_triangle == from && c.end_triangle == to)
            .min_by(|a, b| a.length.total_cmp(&b.length))
            .map(|c| (*c).clone())
    };
    let tris: Vec<TriId> = x.edge(e).triangles.iter().map(|p| p.0).collect();
    for &ta in &tris {
        for &tb in &tris {
            for &tc in &tris {
                if ta == tb || tb == tc || ta == tc {
                    continue;
                }
                if let (Some(ab), Some(ca), Some(bc)) = (best(ta, tb), best(tc, ta), best(tb, tc)) {
                    return Ok([ab, ca, bc]);
                }
            }
        }
    }
    Err(WitnessError::TrianglePatternMismatch(format!(
        "no triple of connections at {} has the required triangle pattern",
        x.edge_label(e)
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    I,
    IPrime,
    T,
    TPrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Port {
    S,
    T,
    SPrime,
    TPrime,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Step {
    Slide(f64, f64),
    /// Connection 0 = ab, 1 = ca, 2 = bc, and whether it is run forward.
    Conn(usize, bool),
}

/// Letters: 1 = h, -1 = h⁻¹, 2 = h′, -2 = h′⁻¹.
fn entry(l: i64) -> Port {
    match l {
        1 => Port::S,
        -1 => Port::T,
        2 => Port::SPrime,
        _ => Port::TPrime,
    }
}

fn exit(l: i64) -> Port {
    match l {
        1 => Port::T,
        -1 => Port::S,
        2 => Port::TPrime,
        _ => Port::SPrime,
    }
}

impl GammaGraph {
    fn conn(&self, k: usize) -> &PerpConnection {
        [&self.c_ab, &self.c_ca, &self.c_bc][k]
    }

    fn ends(k: usize) -> (Node, Node) {
        [(Node::I, Node::T), (Node::I, Node::IPrime), (Node::IPrime, Node::TPrime)][k]
    }

    fn port(&self, p: Port) -> (Node, Option<f64>) {
        match p {
            Port::S => (Node::I, Some(self.points.b)),
            Port::T => (Node::T, None),
            Port::SPrime => (Node::IPrime, Some(self.points.c_prime)),
            Port::TPrime => (Node::TPrime, None),
        }
    }

    /// Connections along the unique path between two nodes of the tree
    /// obtained by collapsing `I` and `I′`.
    fn node_path(from: Node, to: Node) -> Vec<(usize, bool)> {
        let up = |n: Node| -> Vec<(usize, bool)> {
            // Path from I to n.
            match n {
                Node::I => vec![],
                Node::T => vec![(0, true)],
                Node::IPrime => vec![(1, true)],
                Node::TPrime => vec![(1, true), (2, true)],
            }
        };
        let (a, b) = (up(from), up(to));
        let common = a.iter().zip(&b).take_while(|(x, y)| x == y).count();
        let mut out: Vec<(usize, bool)> = a[common..].iter().rev().map(|&(k, _)| (k, false)).collect();
        out.extend(b[common..].iter().cloned());
        out
    }

    fn route(&self, from: Port, to: Port) -> Vec<Step> {
        let (n0, mut pos) = self.port(from);
        let (n1, target) = self.port(to);
        let mut steps = Vec::new();
        for (k, fwd) in Self::node_path(n0, n1) {
            let c = self.conn(k);
            let (start_off, end_off) =
                if fwd { (c.start_offset, c.end_offset) } else { (c.end_offset, c.start_offset) };
            let (sn, en) = if fwd { Self::ends(k) } else { (Self::ends(k).1, Self::ends(k).0) };
            if matches!(sn, Node::I | Node::IPrime) {
                steps.push(Step::Slide(pos.unwrap_or(start_off), start_off));
            }
            steps.push(Step::Conn(k, fwd));
            pos = matches!(en, Node::I | Node::IPrime).then_some(end_off);
        }
        if let (Some(p), Some(t)) = (pos, target) {
            steps.push(Step::Slide(p, t));
        }
        steps
    }

    /// Steps of the path from a connection endpoint on the axis of the
    /// cyclically reduced word `w` to its translate.
    fn axis_steps(&self, w: &[i64]) -> Vec<Step> {
        let n = w.len();
        let mut steps = Vec::new();
        for i in 0..n {
            let prev = w[(i + n - 1) % n];
            steps.extend(self.route(entry(prev), exit(w[i])));
        }
        let lead = steps.iter().take_while(|s| matches!(s, Step::Slide(..))).count();
        let mut rotated: Vec<Step> = steps[lead..].to_vec();
        rotated.extend_from_slice(&steps[..lead]);
        // Merge runs of slides, and make sure every junction has one.
        let mut out: Vec<Step> = Vec::new();
        for s in rotated {
            match (out.last_mut(), s) {
                (Some(Step::Slide(_, to)), Step::Slide(_, t)) => *to = t,
                (Some(Step::Conn(k, fwd)), Step::Conn(..)) => {
                    let o = self.arrival_offset(*k, *fwd);
                    out.push(Step::Slide(o, o));
                    out.push(s);
                }
                _ => out.push(s),
            }
        }
        if let Some(Step::Conn(k, fwd)) = out.last().copied() {
            let o = self.arrival_offset(k, fwd);
            out.push(Step::Slide(o, o));
        }
        out
    }

    fn arrival_offset(&self, k: usize, fwd: bool) -> f64 {
        let c = self.conn(k);
        if fwd {
            c.end_offset
        } else {
            c.start_offset
        }
    }

    /// The sheared geodesic of the reduced word `w`, or of its cyclic core
    /// when `w` is a conjugate (the axis of `u c u⁻¹` is the `u`-translate
    /// of the axis of `c`, with the same image in the complex).
    pub fn word_path(&self, x: &TriangleComplex, w: &Word) -> ShearedGeodesic {
        let core = w.cyclically_reduced();
        let pieces = self
            .axis_steps(&core.0)
            .into_iter()
            .map(|s| match s {
                Step::Slide(from, to) => ShearedPiece::Slide { edge: self.edge, from, to },
                Step::Conn(k, fwd) => {
                    let p = &self.conn(k).path;
                    ShearedPiece::Geodesic { path: if fwd { p.clone() } else { p.reversed(x) } }
                }
            })
            .collect();
        ShearedGeodesic { pieces }
    }

    /// Image of a word in `h, h′` under `h ↦ f`, `h′ ↦ f′`.
    pub fn image(&self, w: &Word) -> Word {
        w.0.iter().fold(Word::identity(), |acc, &l| {
            let g = if l.abs() == 1 { &self.f } else { &self.f_prime };
            acc.concat(&if l > 0 { g.clone() } else { g.inverse() })
        })
    }
}

/// Spells a word in `h, h′`.
pub fn letters(w: &Word) -> String {
    if w.is_empty() {
        return "1".into();
    }
    let parts: Vec<&str> = w
        .0
        .iter()
        .map(|&l| match l {
            1 => "h",
            -1 => "h^-1",
            2 => "h'",
            _ => "h'^-1",
        })
        .collect();
    parts.join(" ")
}

/// All nontrivial reduced words in `h, h′` of length at most `n`, by length
/// and then letter order `h, h⁻¹, h′, h′⁻¹`.
pub fn reduced_words(n: usize) -> Vec<Word> {
    let alphabet = [1i64, -1, 2, -2];
    let mut out = Vec::new();
    let mut layer: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &alphabet {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned().map(Word));
        layer = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordCheck {
    pub word: String,
    pub length: usize,
    /// Cyclically reduced core whose axis path is checked.
    pub core: String,
    /// Image in the fundamental group, in the spanning-tree generators.
    pub image: String,
    pub pieces: usize,
    pub sheared: bool,
    pub numeric: bool,
    pub separation: f64,
    pub min_prefix_separation: f64,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreeWitness {
    pub gamma: GammaGraph,
    pub word_length: usize,
    pub words_checked: usize,
    pub words_of_max_length: usize,
    pub complete: bool,
    pub min_separation: f64,
    pub words: Vec<WordCheck>,
}

/// Separations at or below this mean the developed endpoints coincide.
pub const SEPARATION_TOL: f64 = 1e-9;

pub fn check_word(x: &TriangleComplex, g: &GammaGraph, w: &Word) -> WordCheck {
    let path = g.word_path(x, w);
    let check = verify_sheared(x, &path);
    let dev = develop_sheared(x, &path);
    let min_prefix = dev.prefix_separations.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut failures = check.failures;
    if dev.separation <= SEPARATION_TOL {
        failures.push(format!("developed endpoints coincide (separation {:e})", dev.separation));
    } else if min_prefix <= SEPARATION_TOL {
        failures.push(format!("a prefix closes up (separation {min_prefix:e})"));
    }
    WordCheck {
        word: letters(w),
        length: w.len(),
        core: letters(&w.cyclically_reduced()),
        image: g.image(w).to_string(),
        pieces: path.pieces.len(),
        sheared: check.ok,
        numeric: check.numeric,
        separation: dev.separation,
        min_prefix_separation: min_prefix,
        failures,
    }
}

/// Checks every reduced word of length at most `n`, in parallel, and fails
/// on the first word (in enumeration order) that is not a sheared geodesic
/// or whose developed endpoints meet.
pub fn free_subgroup_certificate(
    x: &TriangleComplex,
    g: &GammaGraph,
    n: usize,
) -> Result<FreeWitness, WitnessError> {
    let words = reduced_words(n);
    let checks: Vec<WordCheck> = words.par_iter().map(|w| check_word(x, g, w)).collect();
    for c in &checks {
        if !c.sheared {
            return Err(WitnessError::ShearedCheckFailed(c.word.clone(), c.failures.join("; ")));
        }
        if !c.failures.is_empty() {
            return Err(WitnessError::EndpointsCoincide(c.word.clone()));
        }
    }
    let min_separation = checks.iter().map(|c| c.separation).fold(f64::INFINITY, f64::min);
    Ok(FreeWitness {
        gamma: g.clone(),
        word_length: n,
        words_checked: checks.len(),
        words_of_max_length: checks.iter().filter(|c| c.length == n).count(),
        complete: true,
        min_separation,
        words: checks,
    })
}

/// The whole pipeline at `e`: search, selection, assembly and certificate.
pub fn witness_at(
    x: &TriangleComplex,
    e: EdgeId,
    params: &SearchParams,
    n: usize,
) -> Result<(Vec<PerpConnection>, FreeWitness), WitnessError> {
    let conns = find_sheared_connections(x, e, params)?;
    let [ab, ca, bc] = select_connections(x, e, &conns)?;
    let g = build_gamma(x, e, &ab, &ca, &bc)?;
    let w = free_subgroup_certificate(x, &g, n)?;
    Ok((conns, w))
}

/// Γ with `c_ca` replaced by `c_ab`, which forces a junction that leaves
/// through its arrival triangle.
pub fn corrupted(g: &GammaGraph) -> GammaGraph {
    let mut bad = g.clone();
    bad.c_ca = g.c_ab.clone();
    bad.points.c = g.c_ab.start_offset;
    bad.points.a_prime = g.c_ab.end_offset;
    bad
}
