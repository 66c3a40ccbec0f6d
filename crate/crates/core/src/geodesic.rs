//! Geodesic tracing by planar development.
//!
//! Inside a triangle a geodesic is a straight segment. Crossing an edge it
//! keeps the angle it makes with the edge, which is what "link distance π at
//! an edge point" amounts to. Headings are tracked exactly: entering a
//! triangle the new heading is a side direction plus or minus the angle to the
//! edge, and side directions are exact sums of corner angles.

use std::f64::consts::PI;

use serde::Serialize;

use crate::angle::{Angle, AngleValue, AtomEnv};
use crate::complex::{EdgeId, TriId, Triangle, TriangleComplex, VertexId};
use crate::error::GeodesicError;
use crate::geom::{self, cross, dist, dot, glue_frame, Affine2, Point};

/// Default distance below which an edge crossing counts as a vertex hit.
pub const VERTEX_TOL: f64 = 1e-9;

/// Where a path starts or ends.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Location {
    /// Local coordinates inside a triangle.
    Interior { triangle: TriId, pos: Point },
    /// Distance from the edge's low end.
    Edge { edge: EdgeId, offset: f64 },
    Vertex { vertex: VertexId },
}

/// A direction at a point, expressed in one triangle containing it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum LinkDirection {
    /// Heading in the triangle's local frame.
    Interior { triangle: TriId, heading: AngleValue },
    /// Angle in `(0, π)` from the direction toward the edge's high end,
    /// pointing into `triangle`.
    Edge { triangle: TriId, angle_from_hi: AngleValue },
    /// Angle in `(0, A)` from the side toward the next corner in vertex order.
    Vertex { triangle: TriId, corner: usize, angle: AngleValue },
}

impl LinkDirection {
    pub fn triangle(&self) -> TriId {
        match self {
            LinkDirection::Interior { triangle, .. }
            | LinkDirection::Edge { triangle, .. }
            | LinkDirection::Vertex { triangle, .. } => *triangle,
        }
    }
}

/// A located direction: the launch of a path, or the backward direction at
/// its end.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Endpoint {
    pub location: Location,
    pub direction: LinkDirection,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum EndStatus {
    BudgetExhausted,
    HitBoundary { edge: EdgeId, offset: f64 },
    /// `angle` is measured from the high end of the edge.
    HitBranchingEdge { edge: EdgeId, offset: f64, angle: AngleValue, triangle: TriId },
    HitVertex { vertex: VertexId },
}

#[derive(Clone, Debug, PartialEq, Default, Serialize)]
pub enum BranchPolicy {
    #[default]
    Stop,
    /// Continue into every other triangle at each branching edge, except
    /// at the edges in `stop_at`.
    Enumerate { max_paths: usize, stop_at: Vec<EdgeId> },
    /// Take these triangles, in order, at successive branching edges.
    Follow(Vec<TriId>),
}

/// The straight piece of a path inside one triangle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub triangle: TriId,
    pub entry: Point,
    pub exit: Point,
    pub heading: AngleValue,
    pub length: f64,
    /// Local-to-development isometry of the triangle.
    pub frame: Affine2,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeCrossing {
    pub edge: EdgeId,
    pub offset: f64,
    pub from: TriId,
    pub to: TriId,
    /// Angle between the path and the direction to the edge's high end.
    pub angle_from_hi: AngleValue,
    pub branching: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub start: Endpoint,
    pub segments: Vec<Segment>,
    /// `crossings[k]` joins `segments[k]` and `segments[k + 1]`.
    pub crossings: Vec<EdgeCrossing>,
    pub length: f64,
    pub end: Endpoint,
    pub status: EndStatus,
}

impl GeodesicPath {
    pub fn triangles(&self) -> Vec<TriId> {
        self.segments.iter().map(|s| s.triangle).collect()
    }

    pub fn dev_start(&self) -> Point {
        let s = &self.segments[0];
        s.frame.apply(s.entry)
    }

    pub fn dev_end(&self) -> Point {
        let s = self.segments.last().unwrap();
        s.frame.apply(s.exit)
    }

    /// Development polyline: the start point and every segment exit.
    pub fn development(&self) -> Vec<Point> {
        let mut out = vec![self.dev_start()];
        out.extend(self.segments.iter().map(|s| s.frame.apply(s.exit)));
        out
    }

    pub fn first_triangle(&self) -> TriId {
        self.segments[0].triangle
    }

    pub fn last_triangle(&self) -> TriId {
        self.segments.last().unwrap().triangle
    }

    /// Triangles chosen at branching edges, in order.
    pub fn branch_choices(&self) -> Vec<TriId> {
        self.crossings.iter().filter(|c| c.branching).map(|c| c.to).collect()
    }

    /// The path cut at crossing `k`, ending there with
    /// [`EndStatus::HitBranchingEdge`] (or boundary data for degree-2 edges).
    pub fn prefix_to_crossing(&self, x: &TriangleComplex, k: usize) -> GeodesicPath {
        let c = &self.crossings[k];
        let segments = self.segments[..=k].to_vec();
        let length = segments.iter().map(|s| s.length).sum();
        let back = exact_pi(x.atom_env()).sub(&c.angle_from_hi);
        GeodesicPath {
            start: self.start.clone(),
            segments,
            crossings: self.crossings[..k].to_vec(),
            length,
            end: Endpoint {
                location: Location::Edge { edge: c.edge, offset: c.offset },
                direction: LinkDirection::Edge { triangle: c.from, angle_from_hi: back },
            },
            status: EndStatus::HitBranchingEdge {
                edge: c.edge,
                offset: c.offset,
                angle: c.angle_from_hi.clone(),
                triangle: c.from,
            },
        }
    }

    /// The same path traversed backward. Frames are kept, so the development
    /// is unchanged.
    pub fn reversed(&self, x: &TriangleComplex) -> GeodesicPath {
        let env = x.atom_env();
        let pi = exact_pi(env);
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| Segment {
                entry: s.exit,
                exit: s.entry,
                heading: s.heading.add_pi_multiple(1, env).wrap_two_pi(env),
                ..s.clone()
            })
            .collect();
        let crossings = self
            .crossings
            .iter()
            .rev()
            .map(|c| EdgeCrossing {
                from: c.to,
                to: c.from,
                angle_from_hi: pi.sub(&c.angle_from_hi),
                ..c.clone()
            })
            .collect();
        let status = match (&self.start.location, &self.start.direction) {
            (Location::Edge { edge, offset }, LinkDirection::Edge { triangle, angle_from_hi }) => {
                if x.edge_degree(*edge) >= 3 {
                    EndStatus::HitBranchingEdge {
                        edge: *edge,
                        offset: *offset,
                        angle: pi.sub(angle_from_hi),
                        triangle: *triangle,
                    }
                } else {
                    EndStatus::HitBoundary { edge: *edge, offset: *offset }
                }
            }
            (Location::Vertex { vertex }, _) => EndStatus::HitVertex { vertex: *vertex },
            _ => EndStatus::BudgetExhausted,
        };
        GeodesicPath {
            start: self.end.clone(),
            segments,
            crossings,
            length: self.length,
            end: self.start.clone(),
            status,
        }
    }

    /// Splits the path at every edge crossing into single-triangle pieces.
    pub fn split_at_crossings(&self, x: &TriangleComplex) -> Vec<GeodesicPath> {
        let mut out = Vec::new();
        let mut start = self.start.clone();
        for (k, seg) in self.segments.iter().enumerate() {
            let (end, status) = if k < self.crossings.len() {
                let p = self.prefix_to_crossing(x, k);
                (p.end, p.status)
            } else {
                (self.end.clone(), self.status.clone())
            };
            let local = Segment { frame: Affine2::identity(), ..seg.clone() };
            out.push(GeodesicPath {
                start: start.clone(),
                segments: vec![local],
                crossings: Vec::new(),
                length: seg.length,
                end,
                status,
            });
            if let Some(c) = self.crossings.get(k) {
                start = Endpoint {
                    location: Location::Edge { edge: c.edge, offset: c.offset },
                    direction: LinkDirection::Edge {
                        triangle: c.to,
                        angle_from_hi: c.angle_from_hi.clone(),
                    },
                };
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct TraceConfig {
    pub budget: f64,
    pub policy: BranchPolicy,
    pub vertex_tol: f64,
}

impl TraceConfig {
    pub fn new(budget: f64, policy: BranchPolicy) -> Self {
        TraceConfig { budget, policy, vertex_tol: VERTEX_TOL }
    }
}

/// Traces from `launch`. `Stop` and `Follow` give one path; `Enumerate`
/// gives one path per continuation, in increasing triangle-id order.
pub fn trace(
    x: &TriangleComplex,
    launch: &Endpoint,
    budget: f64,
    policy: &BranchPolicy,
) -> Result<Vec<GeodesicPath>, GeodesicError> {
    trace_with(x, launch, &TraceConfig::new(budget, policy.clone()))
}

/// Shoots into `t` at exact angle π/2 from the edge `e` at `offset`.
pub fn shoot_perpendicular(
    x: &TriangleComplex,
    e: EdgeId,
    offset: f64,
    t: TriId,
    budget: f64,
    policy: &BranchPolicy,
) -> Result<Vec<GeodesicPath>, GeodesicError> {
    let launch = perpendicular_launch(x, e, offset, t)?;
    trace(x, &launch, budget, policy)
}

pub fn perpendicular_launch(
    x: &TriangleComplex,
    e: EdgeId,
    offset: f64,
    t: TriId,
) -> Result<Endpoint, GeodesicError> {
    x.check_edge(e)?;
    if t.0 >= x.triangle_count() {
        return Err(GeodesicError::Complex(crate::error::ComplexError::UnknownTriangle(
            t.to_string(),
        )));
    }
    let angle = AngleValue::exact(Angle::pi_frac(1, 2), x.atom_env()).expect("π/2 is exact");
    Ok(Endpoint {
        location: Location::Edge { edge: e, offset },
        direction: LinkDirection::Edge { triangle: t, angle_from_hi: angle },
    })
}

struct Cursor {
    tri: TriId,
    pos: Point,
    heading: AngleValue,
    /// Sides the path may not leave through (the one it came in by, or the
    /// two sides at a launch corner).
    blocked: [bool; 3],
    frame: Affine2,
}

struct Partial {
    segments: Vec<Segment>,
    crossings: Vec<EdgeCrossing>,
    travelled: f64,
    follow_idx: usize,
}

fn wrap(a: &AngleValue, env: &AtomEnv) -> AngleValue {
    a.wrap_two_pi(env)
}

fn exact_pi(env: &AtomEnv) -> AngleValue {
    AngleValue::exact(Angle::pi(), env).expect("π is exact")
}

fn direction_value(tri: &Triangle, from: usize, to: usize, env: &AtomEnv) -> AngleValue {
    AngleValue::exact(tri.direction(from, to), env).expect("atoms validated at load")
}

/// Heading inside `t` making angle `psi` with the direction to the high end
/// of `e`, pointing into `t`.
fn heading_into(x: &TriangleComplex, t: TriId, e: EdgeId, psi: &AngleValue) -> AngleValue {
    let env = x.atom_env();
    let tri = x.triangle(t);
    let [lo, hi] = x.edge(e).ends;
    let (clo, chi) = (tri.corner_of(lo).unwrap(), tri.corner_of(hi).unwrap());
    let beta = direction_value(tri, clo, chi, env);
    let h = if Triangle::is_ccw(clo, chi) { beta.add(psi) } else { beta.sub(psi) };
    wrap(&h, env)
}

/// Angle between an outgoing heading in `t` and the direction to the high
/// end of `e`, in `(0, π)`.
fn angle_to_hi(x: &TriangleComplex, t: TriId, e: EdgeId, heading: &AngleValue) -> AngleValue {
    let env = x.atom_env();
    let tri = x.triangle(t);
    let [lo, hi] = x.edge(e).ends;
    let (clo, chi) = (tri.corner_of(lo).unwrap(), tri.corner_of(hi).unwrap());
    let beta = direction_value(tri, clo, chi, env);
    let delta = wrap(&heading.sub(&beta), env);
    if Triangle::is_ccw(clo, chi) {
        // Exiting to the right of lo→hi: δ ∈ (π, 2π).
        exact_pi(env).add(&exact_pi(env)).sub(&delta)
    } else {
        delta
    }
}

fn in_open_interval(a: &AngleValue, lo: &AngleValue, hi: &AngleValue, env: &AtomEnv) -> bool {
    a.cmp_with(lo, env, 0.0).is_gt() && a.cmp_with(hi, env, 0.0).is_lt()
}

fn start_cursor(x: &TriangleComplex, launch: &Endpoint) -> Result<Cursor, GeodesicError> {
    let env = x.atom_env();
    let t = launch.direction.triangle();
    if t.0 >= x.triangle_count() {
        return Err(crate::error::ComplexError::UnknownTriangle(t.to_string()).into());
    }
    let tri = x.triangle(t);
    let zero = AngleValue::exact(Angle::zero(), env).unwrap();
    match (&launch.location, &launch.direction) {
        (Location::Interior { triangle, pos }, LinkDirection::Interior { heading, .. }) => {
            if triangle != &t {
                return Err(GeodesicError::InvalidDirection(
                    "direction given in another triangle".into(),
                ));
            }
            let p = tri.local_coords();
            let inside = (0..3).all(|j| {
                let (a, b) = Triangle::side_corners(j);
                cross(geom::sub(p[b], p[a]), geom::sub(*pos, p[a])) > 0.0
            });
            if !inside {
                return Err(GeodesicError::InvalidDirection("point not inside triangle".into()));
            }
            Ok(Cursor {
                tri: t,
                pos: *pos,
                heading: wrap(heading, env),
                blocked: [false; 3],
                frame: Affine2::identity(),
            })
        }
        (Location::Edge { edge, offset }, LinkDirection::Edge { angle_from_hi, .. }) => {
            x.check_edge(*edge)?;
            let side = tri.side_of(*edge).ok_or(GeodesicError::TriangleNotIncident(t.0, edge.0))?;
            let len = x.edge(*edge).length;
            if !(*offset > 0.0 && *offset < len) {
                return Err(GeodesicError::NotInterior(*offset));
            }
            if !in_open_interval(angle_from_hi, &zero, &exact_pi(env), env) {
                return Err(GeodesicError::InvalidDirection(format!(
                    "angle {angle_from_hi} not in (0, π)"
                )));
            }
            let (plo, phi, _) = geom::edge_in_triangle(x, t, *edge);
            let mut blocked = [false; 3];
            blocked[side] = true;
            Ok(Cursor {
                tri: t,
                pos: geom::lerp(plo, phi, offset / len),
                heading: heading_into(x, t, *edge, angle_from_hi),
                blocked,
                frame: Affine2::identity(),
            })
        }
        (Location::Vertex { vertex }, LinkDirection::Vertex { corner, angle, .. }) => {
            if tri.vertices.get(*corner) != Some(vertex) {
                return Err(GeodesicError::InvalidDirection(
                    "corner does not sit at the vertex".into(),
                ));
            }
            let c = *corner;
            let a = AngleValue::exact(tri.angles[c].clone(), env).unwrap();
            if !in_open_interval(angle, &zero, &a, env) {
                return Err(GeodesicError::InvalidDirection(format!(
                    "angle {angle} not inside the corner"
                )));
            }
            let mut blocked = [true; 3];
            blocked[c] = false;
            let h = direction_value(tri, c, (c + 1) % 3, env).add(angle);
            Ok(Cursor {
                tri: t,
                pos: tri.local_coords()[c],
                heading: wrap(&h, env),
                blocked,
                frame: Affine2::identity(),
            })
        }
        _ => Err(GeodesicError::InvalidDirection("location and direction kinds differ".into())),
    }
}

pub fn trace_with(
    x: &TriangleComplex,
    launch: &Endpoint,
    cfg: &TraceConfig,
) -> Result<Vec<GeodesicPath>, GeodesicError> {
    if !(cfg.budget > 0.0) {
        return Err(GeodesicError::ZeroBudget);
    }
    let cursor = start_cursor(x, launch)?;
    let mut out = Vec::new();
    let partial = Partial { segments: Vec::new(), crossings: Vec::new(), travelled: 0.0, follow_idx: 0 };
    run(x, launch, cursor, partial, cfg, &mut out);
    Ok(out)
}

fn limit_reached(cfg: &TraceConfig, out: &[GeodesicPath]) -> bool {
    matches!(&cfg.policy, BranchPolicy::Enumerate { max_paths, .. } if out.len() >= *max_paths)
}

fn run(
    x: &TriangleComplex,
    launch: &Endpoint,
    mut cur: Cursor,
    mut part: Partial,
    cfg: &TraceConfig,
    out: &mut Vec<GeodesicPath>,
) {
    let env = x.atom_env();
    loop {
        if limit_reached(cfg, out) {
            return;
        }
        let tri = x.triangle(cur.tri);
        let p = tri.local_coords();
        let d = [cur.heading.value.cos(), cur.heading.value.sin()];

        // Exit side: smallest ray parameter among sides the ray moves out of.
        let mut exit: Option<(usize, f64)> = None;
        for j in 0..3 {
            if cur.blocked[j] {
                continue;
            }
            let (a, b) = Triangle::side_corners(j);
            let e = geom::sub(p[b], p[a]);
            let den = cross(d, e);
            if cross(e, d) >= 0.0 {
                continue;
            }
            let s = (cross(geom::sub(p[a], cur.pos), e) / den).max(0.0);
            if exit.is_none_or(|(_, best)| s < best) {
                exit = Some((j, s));
            }
        }
        let remaining = cfg.budget - part.travelled;
        let Some((j, s)) = exit else {
            // Numerically stuck on a corner: treat as a vertex hit.
            let c = (0..3)
                .min_by(|&a, &b| dist(p[a], cur.pos).total_cmp(&dist(p[b], cur.pos)))
                .unwrap();
            finish_vertex(x, launch, cur, part, c, 0.0, out);
            return;
        };

        if s >= remaining {
            let end = geom::add(cur.pos, geom::scale(d, remaining));
            part.segments.push(Segment {
                triangle: cur.tri,
                entry: cur.pos,
                exit: end,
                heading: cur.heading.clone(),
                length: remaining,
                frame: cur.frame,
            });
            part.travelled = cfg.budget;
            let back = cur.heading.add_pi_multiple(1, env).wrap_two_pi(env);
            let endpoint = Endpoint {
                location: Location::Interior { triangle: cur.tri, pos: end },
                direction: LinkDirection::Interior { triangle: cur.tri, heading: back },
            };
            emit(launch, part, endpoint, EndStatus::BudgetExhausted, out);
            return;
        }

        let q = geom::add(cur.pos, geom::scale(d, s));
        let (a, b) = Triangle::side_corners(j);
        let edge = tri.edges[j];
        let ed = x.edge(edge);
        let len = ed.length;
        let u = (dot(geom::sub(q, p[a]), geom::sub(p[b], p[a])) / (tri.sides[j] * tri.sides[j]))
            .clamp(0.0, 1.0);
        let offset = if tri.vertices[a] == ed.ends[0] { u * len } else { (1.0 - u) * len };
        if offset < cfg.vertex_tol || len - offset < cfg.vertex_tol {
            let c = if (offset < cfg.vertex_tol) == (tri.vertices[a] == ed.ends[0]) { a } else { b };
            finish_vertex(x, launch, cur, part, c, s, out);
            return;
        }

        part.segments.push(Segment {
            triangle: cur.tri,
            entry: cur.pos,
            exit: q,
            heading: cur.heading.clone(),
            length: s,
            frame: cur.frame,
        });
        part.travelled += s;
        let psi = angle_to_hi(x, cur.tri, edge, &cur.heading);
        let back = exact_pi(env).sub(&psi);
        let arrival = Endpoint {
            location: Location::Edge { edge, offset },
            direction: LinkDirection::Edge { triangle: cur.tri, angle_from_hi: back },
        };

        let others: Vec<TriId> =
            ed.triangles.iter().map(|&(t, _)| t).filter(|&t| t != cur.tri).collect();
        let branching = ed.triangles.len() >= 3;
        let nexts: Vec<TriId> = match (others.len(), &cfg.policy) {
            (0, _) => {
                emit(launch, part, arrival, EndStatus::HitBoundary { edge, offset }, out);
                return;
            }
            (1, _) => others,
            (_, BranchPolicy::Stop) => vec![],
            (_, BranchPolicy::Enumerate { stop_at, .. }) => {
                if stop_at.contains(&edge) {
                    vec![]
                } else {
                    others
                }
            }
            (_, BranchPolicy::Follow(list)) => match list.get(part.follow_idx) {
                Some(t) if others.contains(t) => vec![*t],
                _ => vec![],
            },
        };
        if nexts.is_empty() {
            let status =
                EndStatus::HitBranchingEdge { edge, offset, angle: psi, triangle: cur.tri };
            emit(launch, part, arrival, status, out);
            return;
        }
        if branching {
            part.follow_idx += 1;
        }

        let make = |t: TriId| -> Cursor {
            let side = x.triangle(t).side_of(edge).unwrap();
            let (plo, phi, _) = geom::edge_in_triangle(x, t, edge);
            let mut blocked = [false; 3];
            blocked[side] = true;
            Cursor {
                tri: t,
                pos: geom::lerp(plo, phi, offset / len),
                heading: heading_into(x, t, edge, &psi),
                blocked,
                frame: glue_frame(x, cur.tri, &cur.frame, t, edge),
            }
        };
        let crossing = |t: TriId| EdgeCrossing {
            edge,
            offset,
            from: cur.tri,
            to: t,
            angle_from_hi: psi.clone(),
            branching,
        };
        if nexts.len() == 1 {
            let t = nexts[0];
            part.crossings.push(crossing(t));
            cur = make(t);
            continue;
        }
        for &t in &nexts {
            let mut branch = Partial {
                segments: part.segments.clone(),
                crossings: part.crossings.clone(),
                travelled: part.travelled,
                follow_idx: part.follow_idx,
            };
            branch.crossings.push(crossing(t));
            run(x, launch, make(t), branch, cfg, out);
        }
        return;
    }
}

fn finish_vertex(
    x: &TriangleComplex,
    launch: &Endpoint,
    cur: Cursor,
    mut part: Partial,
    corner: usize,
    s: f64,
    out: &mut Vec<GeodesicPath>,
) {
    let env = x.atom_env();
    let tri = x.triangle(cur.tri);
    let p = tri.local_coords()[corner];
    part.segments.push(Segment {
        triangle: cur.tri,
        entry: cur.pos,
        exit: p,
        heading: cur.heading.clone(),
        length: s,
        frame: cur.frame,
    });
    // Backward direction measured from the side toward the next corner.
    let first = direction_value(tri, corner, (corner + 1) % 3, env);
    let back = cur.heading.add_pi_multiple(1, env).sub(&first).wrap_two_pi(env);
    let back = if back.value > tri.angle_values[corner] + 1.0 {
        // Numerically just below zero.
        back.add_pi_multiple(-2, env)
    } else {
        back
    };
    let vertex = tri.vertices[corner];
    let endpoint = Endpoint {
        location: Location::Vertex { vertex },
        direction: LinkDirection::Vertex { triangle: cur.tri, corner, angle: back },
    };
    emit(launch, part, endpoint, EndStatus::HitVertex { vertex }, out);
}

fn emit(
    launch: &Endpoint,
    part: Partial,
    end: Endpoint,
    status: EndStatus,
    out: &mut Vec<GeodesicPath>,
) {
    let length = part.segments.iter().map(|s| s.length).sum();
    out.push(GeodesicPath {
        start: launch.clone(),
        segments: part.segments,
        crossings: part.crossings,
        length,
        end,
        status,
    });
}

/// Consecutive pieces of a path; each piece's end must be the next piece's
/// start.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiecewiseGeodesic {
    pub pieces: Vec<GeodesicPath>,
}

impl PiecewiseGeodesic {
    pub fn new(pieces: Vec<GeodesicPath>) -> Self {
        PiecewiseGeodesic { pieces }
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(|p| p.length).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalGeodesicReport {
    pub ok: bool,
    /// Link distance between incoming and outgoing directions per breakpoint.
    pub distances: Vec<AngleValue>,
    pub min_distance: Option<AngleValue>,
}

fn locations_match(x: &TriangleComplex, a: &Location, b: &Location, tol: f64) -> bool {
    match (a, b) {
        (Location::Vertex { vertex: u }, Location::Vertex { vertex: v }) => u == v,
        (Location::Edge { edge: e, offset: o }, Location::Edge { edge: f, offset: p }) => {
            e == f && (o - p).abs() <= tol
        }
        (
            Location::Interior { triangle: s, pos: p },
            Location::Interior { triangle: t, pos: q },
        ) => s == t && dist(*p, *q) <= tol,
        (Location::Edge { edge, offset }, Location::Vertex { vertex })
        | (Location::Vertex { vertex }, Location::Edge { edge, offset }) => {
            let ed = x.edge(*edge);
            (ed.ends[0] == *vertex && *offset <= tol)
                || (ed.ends[1] == *vertex && ed.length - offset <= tol)
        }
        _ => false,
    }
}

/// Link distance between two directions at the same point.
pub fn direction_distance(
    x: &TriangleComplex,
    at: &Location,
    a: &LinkDirection,
    b: &LinkDirection,
) -> Result<AngleValue, GeodesicError> {
    use crate::link::{link_of_edge_point, link_of_vertex, LinkPoint};
    let env = x.atom_env();
    let bad = || GeodesicError::InvalidDirection("direction does not match its point".into());
    match at {
        Location::Interior { .. } => {
            let (LinkDirection::Interior { heading: h1, .. }, LinkDirection::Interior { heading: h2, .. }) =
                (a, b)
            else {
                return Err(bad());
            };
            let d = h1.sub(h2).wrap_two_pi(env);
            let two_pi = exact_pi(env).add(&exact_pi(env));
            Ok(if d.value > PI { two_pi.sub(&d) } else { d })
        }
        Location::Edge { edge, .. } => {
            let link = link_of_edge_point(x, *edge)?;
            let point = |d: &LinkDirection| -> Result<LinkPoint, GeodesicError> {
                let LinkDirection::Edge { triangle, angle_from_hi } = d else { return Err(bad()) };
                let arc = link.arc_of_triangle(*triangle).ok_or_else(bad)?;
                Ok(LinkPoint::OnArc { arc, offset: exact_pi(env).sub(angle_from_hi) })
            };
            link.distance(&point(a)?, &point(b)?).ok_or_else(bad)
        }
        Location::Vertex { vertex } => {
            let link = link_of_vertex(x, *vertex)?;
            let point = |d: &LinkDirection| -> Result<LinkPoint, GeodesicError> {
                let LinkDirection::Vertex { triangle, corner, angle } = d else {
                    return Err(bad());
                };
                let arc = link
                    .arcs
                    .iter()
                    .position(|r| r.triangle == *triangle && r.slot == *corner)
                    .ok_or_else(bad)?;
                Ok(LinkPoint::OnArc { arc, offset: angle.clone() })
            };
            // Different components of the link are at distance ∞ ≥ π.
            Ok(link
                .distance(&point(a)?, &point(b)?)
                .unwrap_or(AngleValue::numeric(f64::INFINITY)))
        }
    }
}

/// Checks continuity and that incoming and outgoing directions are at link
/// distance at least π at every breakpoint.
pub fn verify_local_geodesic(
    x: &TriangleComplex,
    p: &PiecewiseGeodesic,
) -> Result<LocalGeodesicReport, GeodesicError> {
    let env = x.atom_env();
    let pi = exact_pi(env);
    let mut distances = Vec::new();
    for (i, w) in p.pieces.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        if !locations_match(x, &a.end.location, &b.start.location, 1e-9) {
            return Err(GeodesicError::DiscontinuousPath(i));
        }
        let at = match (&a.end.location, &b.start.location) {
            (Location::Vertex { .. }, _) => a.end.location.clone(),
            (_, Location::Vertex { .. }) => b.start.location.clone(),
            _ => a.end.location.clone(),
        };
        distances.push(direction_distance(x, &at, &a.end.direction, &b.start.direction)?);
    }
    let ok = distances.iter().all(|d| d.cmp_with(&pi, env, 1e-9).is_ge());
    let min_distance =
        distances.iter().cloned().reduce(|m, d| m.min_with(d, env, 0.0));
    Ok(LocalGeodesicReport { ok, distances, min_distance })
}

/// A vertex breakpoint where the path turns by strictly more than π in the
/// link, if any.
pub fn is_curved(
    x: &TriangleComplex,
    p: &PiecewiseGeodesic,
) -> Result<Option<VertexId>, GeodesicError> {
    let env = x.atom_env();
    let pi = exact_pi(env);
    let report = verify_local_geodesic(x, p)?;
    for (w, d) in p.pieces.windows(2).zip(&report.distances) {
        if let Location::Vertex { vertex } = w[0].end.location {
            if d.cmp_with(&pi, env, 1e-9).is_gt() {
                return Ok(Some(vertex));
            }
        }
    }
    Ok(None)
}

/// Retraces `p` backward from its end, following the reversed branch
/// choices.
pub fn reverse(x: &TriangleComplex, p: &GeodesicPath) -> Result<GeodesicPath, GeodesicError> {
    let froms: Vec<TriId> =
        p.crossings.iter().rev().filter(|c| c.branching).map(|c| c.from).collect();
    let mut out = trace(x, &p.end, p.length, &BranchPolicy::Follow(froms))?;
    Ok(out.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn env_exact(x: &TriangleComplex, a: Angle) -> AngleValue {
        AngleValue::exact(a, x.atom_env()).unwrap()
    }

    fn edge_launch(x: &TriangleComplex, e: &str, offset: f64, t: TriId, psi: Angle) -> Endpoint {
        Endpoint {
            location: Location::Edge { edge: x.parse_edge(e).unwrap(), offset },
            direction: LinkDirection::Edge { triangle: t, angle_from_hi: env_exact(x, psi) },
        }
    }

    #[test]
    fn straight_up_through_the_square() {
        let x = fixtures::flat_square();
        let abc = x.parse_triangle("A:B:C").unwrap();
        let launch = edge_launch(&x, "A:B", 0.25, abc, Angle::pi_frac(1, 2));
        let p = trace(&x, &launch, 10.0, &BranchPolicy::Stop).unwrap().remove(0);
        assert!((p.length - 1.0).abs() < 1e-12);
        assert_eq!(p.crossings.len(), 1);
        assert_eq!(p.crossings[0].edge, x.parse_edge("A:C").unwrap());
        let cd = x.parse_edge("C:D").unwrap();
        match p.status {
            EndStatus::HitBoundary { edge, offset } => {
                assert_eq!(edge, cd);
                assert!((offset - 0.75).abs() < 1e-12);
            }
            ref s => panic!("unexpected {s:?}"),
        }
        let end = p.dev_end();
        assert!(dist(end, [0.25, 1.0]) < 1e-12);
        assert!((dist(p.dev_start(), end) - p.length).abs() < 1e-12);
    }

    #[test]
    fn budget_runs_out_inside_a_triangle() {
        let x = fixtures::single_triangle();
        let t = TriId(0);
        let launch = Endpoint {
            location: Location::Interior { triangle: t, pos: [0.5, 0.2] },
            direction: LinkDirection::Interior { triangle: t, heading: env_exact(&x, Angle::pi_frac(1, 2)) },
        };
        let p = trace(&x, &launch, 0.1, &BranchPolicy::Stop).unwrap().remove(0);
        assert_eq!(p.status, EndStatus::BudgetExhausted);
        assert!((p.length - 0.1).abs() < 1e-15);
        assert!(matches!(trace(&x, &launch, 0.0, &BranchPolicy::Stop), Err(GeodesicError::ZeroBudget)));
    }

    #[test]
    fn perpendicular_shots_on_the_book_and_theta_circle() {
        let x = fixtures::book(3);
        let pq = x.parse_edge("P:Q").unwrap();
        let page = x.edge(pq).triangles[0].0;
        let p = shoot_perpendicular(&x, pq, 0.3, page, 5.0, &BranchPolicy::Stop).unwrap().remove(0);
        assert!(matches!(p.status, EndStatus::HitBoundary { .. }));
        assert!((p.length - 1.0).abs() < 1e-12);
        assert!(matches!(
            shoot_perpendicular(&x, pq, 0.0, page, 5.0, &BranchPolicy::Stop),
            Err(GeodesicError::NotInterior(_))
        ));

        let x = fixtures::theta_circle();
        let e = x.parse_edge("u0:u1").unwrap();
        let t = x.parse_triangle("u0:mx1:u1").unwrap();
        let p = shoot_perpendicular(&x, e, 0.4, t, 10.0, &BranchPolicy::Stop).unwrap().remove(0);
        match &p.status {
            EndStatus::HitBranchingEdge { edge, offset, angle, .. } => {
                assert_eq!(x.edge_label(*edge), "v0:v1");
                assert!((offset - 0.4).abs() < 1e-12);
                assert_eq!(angle.exact, Some(Angle::pi_frac(1, 2)));
            }
            s => panic!("unexpected {s:?}"),
        }
        assert!((p.length - 2.0).abs() < 1e-12);
        let wrong = x.parse_triangle("v0:v1:mx0").unwrap_or(TriId(0));
        assert!(matches!(
            shoot_perpendicular(&x, e, 0.4, wrong, 10.0, &BranchPolicy::Stop),
            Err(GeodesicError::TriangleNotIncident(..))
        ));
    }

    #[test]
    fn enumerate_branches_at_branching_edges() {
        let x = fixtures::theta_circle();
        let e = x.parse_edge("u0:u1").unwrap();
        let t = x.parse_triangle("u0:mx1:u1").unwrap();
        let policy = BranchPolicy::Enumerate { max_paths: 100, stop_at: vec![e] };
        let paths = shoot_perpendicular(&x, e, 0.4, t, 10.0, &policy).unwrap();
        assert_eq!(paths.len(), 2);
        for p in &paths {
            assert!((p.length - 4.0).abs() < 1e-12);
            match &p.status {
                EndStatus::HitBranchingEdge { edge, angle, .. } => {
                    assert_eq!(*edge, e);
                    assert_eq!(angle.exact, Some(Angle::pi_frac(1, 2)));
                }
                s => panic!("unexpected {s:?}"),
            }
        }
    }

    #[test]
    fn reversed_path_matches_a_backward_trace() {
        let x = fixtures::theta_circle();
        let e = x.parse_edge("u0:u1").unwrap();
        let t = x.parse_triangle("u0:mx1:u1").unwrap();
        let p = shoot_perpendicular(&x, e, 0.4, t, 10.0, &BranchPolicy::Stop).unwrap().remove(0);
        let r = p.reversed(&x);
        let b = trace(&x, &p.end, 10.0, &BranchPolicy::Stop).unwrap().remove(0);
        assert_eq!(r.triangles(), b.triangles());
        match (&r.status, &b.status) {
            (
                EndStatus::HitBranchingEdge { edge: e1, offset: o1, angle: a1, triangle: t1 },
                EndStatus::HitBranchingEdge { edge: e2, offset: o2, angle: a2, triangle: t2 },
            ) => {
                assert_eq!((e1, t1, &a1.exact), (e2, t2, &a2.exact));
                assert!((o1 - o2).abs() < 1e-9);
            }
            s => panic!("unexpected {s:?}"),
        }
        assert!(dist(r.dev_start(), p.dev_end()) < 1e-12);
        assert!(dist(r.dev_end(), p.dev_start()) < 1e-12);
    }

    #[test]
    fn reversal_retraces_the_crossings() {
        let x = fixtures::theta_circle();
        let t = x.parse_triangle("u0:mx1:u1").unwrap();
        let launch = edge_launch(&x, "u0:u1", 0.3, t, Angle::pi_frac(1, 3));
        let policy = BranchPolicy::Follow(vec![x.parse_triangle("v0:my0:v1").unwrap_or(TriId(0))]);
        let p = trace(&x, &launch, 6.0, &policy).unwrap().remove(0);
        let r = reverse(&x, &p).unwrap();
        let mut fwd = p.triangles();
        fwd.reverse();
        assert_eq!(r.triangles(), fwd);
        for (a, b) in p.crossings.iter().rev().zip(&r.crossings) {
            assert_eq!(a.edge, b.edge);
            assert!((a.offset - b.offset).abs() < 1e-9);
        }
        assert!((r.length - p.length).abs() < 1e-12);
    }

    #[test]
    fn straight_crossings_are_local_geodesics() {
        let x = fixtures::flat_square();
        let abc = x.parse_triangle("A:B:C").unwrap();
        let launch = edge_launch(&x, "A:B", 0.25, abc, Angle::pi_frac(1, 3));
        let p = trace(&x, &launch, 10.0, &BranchPolicy::Stop).unwrap().remove(0);
        let pw = PiecewiseGeodesic::new(p.split_at_crossings(&x));
        let r = verify_local_geodesic(&x, &pw).unwrap();
        assert!(r.ok);
        assert!(r.distances.iter().all(|d| d.exact == Some(Angle::pi())));
        assert_eq!(is_curved(&x, &pw).unwrap(), None);
    }

    #[test]
    fn reflected_path_fails() {
        let x = fixtures::flat_square();
        let abc = x.parse_triangle("A:B:C").unwrap();
        let launch = edge_launch(&x, "A:B", 0.25, abc, Angle::pi_frac(1, 3));
        let p = trace(&x, &launch, 10.0, &BranchPolicy::Stop).unwrap().remove(0);
        let mut pieces = p.split_at_crossings(&x);
        let first = pieces.remove(0);
        // Bounce back into the same triangle at the mirror angle.
        let c = &p.crossings[0];
        let bounce = Endpoint {
            location: Location::Edge { edge: c.edge, offset: c.offset },
            direction: LinkDirection::Edge { triangle: c.from, angle_from_hi: c.angle_from_hi.clone() },
        };
        let second = trace(&x, &bounce, 0.1, &BranchPolicy::Stop).unwrap().remove(0);
        let r = verify_local_geodesic(&x, &PiecewiseGeodesic::new(vec![first, second])).unwrap();
        assert!(!r.ok);
    }

    #[test]
    fn discontinuity_is_reported() {
        let x = fixtures::flat_square();
        let abc = x.parse_triangle("A:B:C").unwrap();
        let a = trace(&x, &edge_launch(&x, "A:B", 0.25, abc, Angle::pi_frac(1, 3)), 0.2, &BranchPolicy::Stop)
            .unwrap()
            .remove(0);
        let b = trace(&x, &edge_launch(&x, "A:B", 0.5, abc, Angle::pi_frac(1, 3)), 0.2, &BranchPolicy::Stop)
            .unwrap()
            .remove(0);
        assert!(matches!(
            verify_local_geodesic(&x, &PiecewiseGeodesic::new(vec![a, b])),
            Err(GeodesicError::DiscontinuousPath(0))
        ));
    }

    fn through_apex(x: &TriangleComplex, out_tri: usize, out_angle: Angle) -> PiecewiseGeodesic {
        let o = x.vertex_by_name("O").unwrap();
        let launch = |t: usize, a: Angle| Endpoint {
            location: Location::Vertex { vertex: o },
            direction: LinkDirection::Vertex {
                triangle: TriId(t),
                corner: 0,
                angle: env_exact(x, a),
            },
        };
        let outward = trace(x, &launch(0, Angle::pi_frac(1, 12)), 0.5, &BranchPolicy::Stop)
            .unwrap()
            .remove(0);
        let inward = trace(x, &outward.end, 0.5 + 1e-6, &BranchPolicy::Stop).unwrap().remove(0);
        assert_eq!(inward.status, EndStatus::HitVertex { vertex: o });
        let second = trace(x, &launch(out_tri, out_angle), 0.5, &BranchPolicy::Stop)
            .unwrap()
            .remove(0);
        PiecewiseGeodesic::new(vec![inward, second])
    }

    #[test]
    fn curved_axis_through_a_large_cone_point() {
        let x = fixtures::fan(7);
        let pw = through_apex(&x, 3, Angle::pi_frac(1, 4));
        let r = verify_local_geodesic(&x, &pw).unwrap();
        assert!(r.ok);
        assert_eq!(r.distances[0].exact, Some(Angle::pi_frac(7, 6)));
        assert_eq!(is_curved(&x, &pw).unwrap(), x.vertex_by_name("O").ok());
    }

    #[test]
    fn flat_vertex_is_not_curved() {
        let x = fixtures::hex_fan();
        // Antipodal direction: π/12 + π lies in triangle 3 at offset π/12.
        let pw = through_apex(&x, 3, Angle::pi_frac(1, 12));
        let r = verify_local_geodesic(&x, &pw).unwrap();
        assert_eq!(r.distances[0].exact, Some(Angle::pi()));
        assert_eq!(is_curved(&x, &pw).unwrap(), None);
    }
}
