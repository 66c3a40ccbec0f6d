//! Point-to-point geodesics by best-first search over developed strips.
//!
//! A search state is a triangle reached through a strip from `p`, together
//! with its development frame and the window of its entry edge still visible
//! from `p`. States are expanded in order of the distance from `p` to the
//! window; a candidate is a state whose triangle holds `q` inside the visible
//! cone. Every candidate is straight in its development, hence a local
//! geodesic, so the first one popped is the shortest path found.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::angle::AngleValue;
use crate::complex::{EdgeId, TriId, Triangle, TriangleComplex};
use crate::error::GeodesicError;
use crate::geodesic::{
    trace, verify_local_geodesic, BranchPolicy, Endpoint, EndStatus, GeodesicPath, LinkDirection,
    Location, PiecewiseGeodesic,
};
use crate::geom::{self, cross, dist, glue_frame, point_segment_distance, Affine2, Point};

/// Default cap on expanded states.
pub const MAX_STATES: usize = 200_000;

#[derive(Clone, Debug)]
pub struct BetweenConfig {
    pub budget: f64,
    pub assume_simply_connected: bool,
    pub max_states: usize,
}

impl BetweenConfig {
    pub fn new(budget: f64, assume_simply_connected: bool) -> Self {
        BetweenConfig { budget, assume_simply_connected, max_states: MAX_STATES }
    }
}

#[derive(Clone)]
struct State {
    tri: TriId,
    frame: Affine2,
    entry: Option<EdgeId>,
    /// Visible part of the entry edge, ordered counter-clockwise about `p`.
    window: Option<(Point, Point)>,
    seq: Vec<TriId>,
    edges: Vec<EdgeId>,
}

enum Item {
    Expand(State),
    Candidate { seq: Vec<TriId>, edges: Vec<EdgeId>, start_tri: TriId, q_dev: Point, q_local: Point },
}

struct Entry {
    key: f64,
    order: usize,
    item: Item,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Entry {
    // Min-heap on (key, insertion order); candidates win ties so an exact
    // answer is not delayed behind states at the same bound.
    fn cmp(&self, o: &Self) -> Ordering {
        o.key
            .total_cmp(&self.key)
            .then_with(|| matches!(self.item, Item::Candidate { .. }).cmp(&matches!(o.item, Item::Candidate { .. })))
            .then_with(|| o.order.cmp(&self.order))
    }
}

/// Triangles holding a point, with its local coordinates in each.
fn hosts(x: &TriangleComplex, p: &Location) -> Result<Vec<(TriId, Point, Option<EdgeId>)>, GeodesicError> {
    match p {
        Location::Interior { triangle, pos } => {
            if triangle.0 >= x.triangle_count() {
                return Err(crate::error::ComplexError::UnknownTriangle(triangle.to_string()).into());
            }
            Ok(vec![(*triangle, *pos, None)])
        }
        Location::Edge { edge, offset } => {
            x.check_edge(*edge)?;
            let ed = x.edge(*edge);
            if !(*offset > 0.0 && *offset < ed.length) {
                return Err(GeodesicError::NotInterior(*offset));
            }
            Ok(ed
                .triangles
                .iter()
                .map(|&(t, _)| {
                    let (plo, phi, _) = geom::edge_in_triangle(x, t, *edge);
                    (t, geom::lerp(plo, phi, offset / ed.length), Some(*edge))
                })
                .collect())
        }
        Location::Vertex { .. } => {
            Err(GeodesicError::InvalidDirection("vertex endpoints are not supported".into()))
        }
    }
}

/// Clips the segment `c→d` to the cone from `p` spanned by `a` then `b`
/// counter-clockwise.
fn clip(p: Point, a: Point, b: Point, c: Point, d: Point) -> Option<(Point, Point)> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut half = |u: Point, sign: f64| {
        // sign·cross(u, x − p) ≥ 0 along x = c + s(d − c).
        let f0 = sign * cross(u, geom::sub(c, p));
        let f1 = sign * cross(u, geom::sub(d, p));
        if f0 < 0.0 && f1 < 0.0 {
            lo = 1.0;
            hi = 0.0;
        } else if f0 < 0.0 {
            lo = lo.max(f0 / (f0 - f1));
        } else if f1 < 0.0 {
            hi = hi.min(f0 / (f0 - f1));
        }
    };
    half(geom::sub(a, p), 1.0);
    half(geom::sub(b, p), -1.0);
    (hi - lo > 1e-12).then(|| (geom::lerp(c, d, lo), geom::lerp(c, d, hi)))
}

fn in_cone(p: Point, w: &Option<(Point, Point)>, q: Point) -> bool {
    match w {
        None => true,
        Some((a, b)) => {
            let scale = dist(p, q).max(1.0) * 1e-12;
            cross(geom::sub(*a, p), geom::sub(q, p)) >= -scale
                && cross(geom::sub(q, p), geom::sub(*b, p)) >= -scale
        }
    }
}

/// Shortest geodesic from `p` to `q` among straight developed strips of
/// length at most `budget`.
pub fn geodesic_between(
    x: &TriangleComplex,
    p: &Location,
    q: &Location,
    budget: f64,
    assume_simply_connected: bool,
) -> Result<GeodesicPath, GeodesicError> {
    geodesic_between_with(x, p, q, &BetweenConfig::new(budget, assume_simply_connected))
}

pub fn geodesic_between_with(
    x: &TriangleComplex,
    p: &Location,
    q: &Location,
    cfg: &BetweenConfig,
) -> Result<GeodesicPath, GeodesicError> {
    if !cfg.assume_simply_connected {
        return Err(GeodesicError::NotSimplyConnectedAsserted);
    }
    if !(cfg.budget > 0.0) {
        return Err(GeodesicError::ZeroBudget);
    }
    let p_hosts = hosts(x, p)?;
    let q_hosts = hosts(x, q)?;
    if let (Location::Edge { edge: e, offset: a }, Location::Edge { edge: f, offset: b }) = (p, q) {
        if e == f {
            return Err(if (a - b).abs() <= 1e-12 {
                GeodesicError::SamePoint
            } else {
                GeodesicError::InvalidDirection("both points lie on one edge".into())
            });
        }
    }
    let q_in = |t: TriId| q_hosts.iter().find(|h| h.0 == t).map(|h| (h.1, h.2));

    let mut heap = BinaryHeap::new();
    let mut order = 0usize;
    let mut push = |heap: &mut BinaryHeap<Entry>, key: f64, item: Item| {
        heap.push(Entry { key, order, item });
        order += 1;
    };
    for &(t, _, on_edge) in &p_hosts {
        let st = State {
            tri: t,
            frame: Affine2::identity(),
            entry: on_edge,
            window: None,
            seq: vec![t],
            edges: Vec::new(),
        };
        push(&mut heap, 0.0, Item::Expand(st));
    }
    let p_dev_of = |t: TriId| p_hosts.iter().find(|h| h.0 == t).map(|h| h.1).unwrap();

    let mut expanded = 0usize;
    while let Some(Entry { item, .. }) = heap.pop() {
        match item {
            Item::Candidate { seq, edges, start_tri, q_dev, q_local } => {
                let p_dev = p_dev_of(start_tri);
                let d = dist(p_dev, q_dev);
                if d <= 1e-12 {
                    return Err(GeodesicError::SamePoint);
                }
                if let Some(path) = realise(x, p, q, &seq, &edges, p_dev, q_dev, q_local)? {
                    return Ok(path);
                }
            }
            Item::Expand(st) => {
                expanded += 1;
                if expanded > cfg.max_states {
                    return Err(GeodesicError::SearchLimit(cfg.max_states));
                }
                let p_dev = p_dev_of(st.seq[0]);
                let tri = x.triangle(st.tri);
                if let Some((q_local, q_edge)) = q_in(st.tri) {
                    let q_dev = st.frame.apply(q_local);
                    let on_entry = q_edge.is_some() && q_edge == st.entry;
                    if !on_entry && in_cone(p_dev, &st.window, q_dev) {
                        let d = dist(p_dev, q_dev);
                        if d <= cfg.budget {
                            let item = Item::Candidate {
                                seq: st.seq.clone(),
                                edges: st.edges.clone(),
                                start_tri: st.seq[0],
                                q_dev,
                                q_local,
                            };
                            push(&mut heap, d, item);
                        }
                    }
                }
                let local = tri.local_coords();
                for j in 0..3 {
                    let e = tri.edges[j];
                    if Some(e) == st.entry {
                        continue;
                    }
                    let (a, b) = Triangle::side_corners(j);
                    let (c, d) = (st.frame.apply(local[a]), st.frame.apply(local[b]));
                    let w = match &st.window {
                        None => {
                            // Order the side counter-clockwise about p.
                            if cross(geom::sub(c, p_dev), geom::sub(d, p_dev)) > 0.0 {
                                Some((c, d))
                            } else {
                                Some((d, c))
                            }
                        }
                        Some((wa, wb)) => clip(p_dev, *wa, *wb, c, d).map(|(u, v)| {
                            if cross(geom::sub(u, p_dev), geom::sub(v, p_dev)) > 0.0 {
                                (u, v)
                            } else {
                                (v, u)
                            }
                        }),
                    };
                    let Some(w) = w else { continue };
                    let lb = point_segment_distance(p_dev, w.0, w.1);
                    if lb > cfg.budget {
                        continue;
                    }
                    for &(t2, _) in &x.edge(e).triangles {
                        if t2 == st.tri {
                            continue;
                        }
                        let mut seq = st.seq.clone();
                        seq.push(t2);
                        let mut edges = st.edges.clone();
                        edges.push(e);
                        let next = State {
                            tri: t2,
                            frame: glue_frame(x, st.tri, &st.frame, t2, e),
                            entry: Some(e),
                            window: Some(w),
                            seq,
                            edges,
                        };
                        push(&mut heap, lb, Item::Expand(next));
                    }
                }
            }
        }
    }
    Err(GeodesicError::BudgetTooSmall(cfg.budget))
}

/// Traces the candidate strip and pins its end to `q`. `None` when the trace
/// leaves the strip, which happens when it passes within tolerance of a
/// vertex.
#[allow(clippy::too_many_arguments)]
fn realise(
    x: &TriangleComplex,
    p: &Location,
    q: &Location,
    seq: &[TriId],
    edges: &[EdgeId],
    p_dev: Point,
    q_dev: Point,
    q_local: Point,
) -> Result<Option<GeodesicPath>, GeodesicError> {
    let env = x.atom_env();
    let d = dist(p_dev, q_dev);
    let v = geom::sub(q_dev, p_dev);
    let t0 = seq[0];
    let direction = match p {
        Location::Edge { edge, .. } => {
            let (plo, phi, _) = geom::edge_in_triangle(x, t0, *edge);
            let u = geom::sub(phi, plo);
            let cos = geom::dot(u, v) / (geom::norm(u) * d);
            LinkDirection::Edge {
                triangle: t0,
                angle_from_hi: AngleValue::numeric(cos.clamp(-1.0, 1.0).acos()),
            }
        }
        _ => LinkDirection::Interior {
            triangle: t0,
            heading: AngleValue::numeric(v[1].atan2(v[0])).wrap_two_pi(env),
        },
    };
    let launch = Endpoint { location: p.clone(), direction };
    let follow: Vec<TriId> = edges
        .iter()
        .zip(&seq[1..])
        .filter(|(e, _)| x.edge_degree(**e) >= 3)
        .map(|(_, t)| *t)
        .collect();
    // Stop just short of q so the trace cannot spill across an edge holding q.
    let mut path = match trace(x, &launch, d * (1.0 - 1e-13), &BranchPolicy::Follow(follow)) {
        Ok(mut v) => v.remove(0),
        Err(GeodesicError::InvalidDirection(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    if path.triangles() != seq || path.status != EndStatus::BudgetExhausted {
        return Ok(None);
    }
    let last = path.segments.last_mut().unwrap();
    last.exit = q_local;
    last.length = dist(last.entry, q_local);
    path.length = path.segments.iter().map(|s| s.length).sum();
    let t_end = *seq.last().unwrap();
    path.end = match q {
        Location::Edge { edge, .. } => {
            let (plo, phi, _) = geom::edge_in_triangle(x, t_end, *edge);
            let u = geom::sub(phi, plo);
            let back = geom::sub(last_entry(&path), q_local);
            let cos = geom::dot(u, back) / (geom::norm(u) * geom::norm(back));
            Endpoint {
                location: q.clone(),
                direction: LinkDirection::Edge {
                    triangle: t_end,
                    angle_from_hi: AngleValue::numeric(cos.clamp(-1.0, 1.0).acos()),
                },
            }
        }
        _ => Endpoint { location: q.clone(), direction: path.end.direction.clone() },
    };
    let report = verify_local_geodesic(x, &PiecewiseGeodesic::new(path.split_at_crossings(x)))?;
    debug_assert!(report.ok);
    Ok(report.ok.then_some(path))
}

fn last_entry(p: &GeodesicPath) -> Point {
    p.segments.last().unwrap().entry
}
