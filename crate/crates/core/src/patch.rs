//! Patches: the pieces of a complex off its branching locus, together with
//! the combinatorics of their completions.
//!
//! The completion of a patch keeps interior edges (degree 2) glued, gives
//! every patch triangle its own copy of each boundary edge (degree 1 or
//! branching), and splits each vertex of the complex into one point per class
//! of patch corners linked through interior edges there.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::angle::Angle;
use crate::complex::{EdgeId, TriId, Triangle, TriangleComplex, UnionFind, VertexId};

/// A point of the completion lying over a vertex of the complex.
#[derive(Clone, Debug, Serialize)]
pub struct CompletionVertex {
    pub vertex: VertexId,
    pub corners: Vec<(TriId, usize)>,
    pub on_boundary: bool,
    /// Total corner angle at this point, the length of its link in the
    /// completion.
    pub link_length: Angle,
}

/// One copy of a boundary edge in the completion.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCopy {
    pub edge: EdgeId,
    pub triangle: TriId,
    pub side: usize,
    /// Completion vertices at the edge's low and high end.
    pub ends: [usize; 2],
    pub component: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Patch {
    pub id: usize,
    pub triangles: Vec<TriId>,
    pub interior_edges: Vec<EdgeId>,
    pub boundary: Vec<BoundaryCopy>,
    pub boundary_components: usize,
    pub completion_vertices: Vec<CompletionVertex>,
    /// Per triangle (parallel to `triangles`): `true` when the triangle's
    /// vertex order is counterclockwise for the patch orientation. `None` when
    /// the patch is not orientable.
    pub orientation: Option<Vec<bool>>,
    #[serde(skip)]
    corner_index: HashMap<(TriId, usize), usize>,
    #[serde(skip)]
    tri_index: HashMap<TriId, usize>,
}

impl Patch {
    pub fn is_orientable(&self) -> bool {
        self.orientation.is_some()
    }

    pub fn contains(&self, t: TriId) -> bool {
        self.tri_index.contains_key(&t)
    }

    pub fn position(&self, t: TriId) -> Option<usize> {
        self.tri_index.get(&t).copied()
    }

    /// Orientation sign of a triangle (`true` = vertex order is positive).
    pub fn positive(&self, t: TriId) -> Option<bool> {
        let o = self.orientation.as_ref()?;
        Some(o[*self.tri_index.get(&t)?])
    }

    pub fn completion_vertex_of(&self, t: TriId, corner: usize) -> Option<usize> {
        self.corner_index.get(&(t, corner)).copied()
    }

    /// V − E + F of the completion.
    pub fn euler_characteristic(&self) -> i64 {
        self.completion_vertices.len() as i64
            - (self.interior_edges.len() + self.boundary.len()) as i64
            + self.triangles.len() as i64
    }
}

fn is_interior(x: &TriangleComplex, e: EdgeId) -> bool {
    x.edge_degree(e) == 2
}

/// Partition of the triangles into patches, ordered by smallest triangle id.
pub fn patches(x: &TriangleComplex) -> Vec<Patch> {
    let nt = x.triangle_count();
    let mut uf = UnionFind::new(nt);
    for e in x.edge_ids() {
        if is_interior(x, e) {
            let ts = &x.edge(e).triangles;
            uf.union(ts[0].0 .0, ts[1].0 .0);
        }
    }
    let mut groups: BTreeMap<usize, Vec<TriId>> = BTreeMap::new();
    for t in 0..nt {
        groups.entry(uf.find(t)).or_default().push(TriId(t));
    }
    groups.into_values().enumerate().map(|(id, tris)| build_patch(x, id, tris)).collect()
}

fn build_patch(x: &TriangleComplex, id: usize, triangles: Vec<TriId>) -> Patch {
    let tri_index: HashMap<TriId, usize> =
        triangles.iter().enumerate().map(|(i, &t)| (t, i)).collect();

    let mut interior_edges = Vec::new();
    let mut boundary_raw = Vec::new();
    for &t in &triangles {
        for (j, &e) in x.triangle(t).edges.iter().enumerate() {
            if is_interior(x, e) {
                interior_edges.push(e);
            } else {
                boundary_raw.push((e, t, j));
            }
        }
    }
    interior_edges.sort();
    interior_edges.dedup();
    boundary_raw.sort();

    // Corner classes per vertex.
    let corners: Vec<(TriId, usize)> =
        triangles.iter().flat_map(|&t| (0..3).map(move |c| (t, c))).collect();
    let cidx: HashMap<(TriId, usize), usize> =
        corners.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut uf = UnionFind::new(corners.len());
    for &e in &interior_edges {
        let ts = &x.edge(e).triangles;
        for &v in &x.edge(e).ends {
            let (t1, t2) = (ts[0].0, ts[1].0);
            let c1 = x.triangle(t1).corner_of(v).unwrap();
            let c2 = x.triangle(t2).corner_of(v).unwrap();
            uf.union(cidx[&(t1, c1)], cidx[&(t2, c2)]);
        }
    }
    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut completion_vertices: Vec<CompletionVertex> = Vec::new();
    let mut corner_index = HashMap::new();
    for (i, &(t, c)) in corners.iter().enumerate() {
        let r = uf.find(i);
        let k = *class_of_root.entry(r).or_insert_with(|| {
            completion_vertices.push(CompletionVertex {
                vertex: x.triangle(t).vertices[c],
                corners: Vec::new(),
                on_boundary: false,
                link_length: Angle::zero(),
            });
            completion_vertices.len() - 1
        });
        let cv = &mut completion_vertices[k];
        cv.corners.push((t, c));
        cv.link_length += &x.triangle(t).angles[c];
        corner_index.insert((t, c), k);
    }

    let mut boundary: Vec<BoundaryCopy> = boundary_raw
        .into_iter()
        .map(|(e, t, j)| {
            let tri = x.triangle(t);
            let [lo, hi] = x.edge(e).ends;
            let ends = [
                corner_index[&(t, tri.corner_of(lo).unwrap())],
                corner_index[&(t, tri.corner_of(hi).unwrap())],
            ];
            BoundaryCopy { edge: e, triangle: t, side: j, ends, component: 0 }
        })
        .collect();
    let mut buf = UnionFind::new(completion_vertices.len());
    for b in &boundary {
        completion_vertices[b.ends[0]].on_boundary = true;
        completion_vertices[b.ends[1]].on_boundary = true;
        buf.union(b.ends[0], b.ends[1]);
    }
    let mut comp_label: BTreeMap<usize, usize> = BTreeMap::new();
    for b in boundary.iter_mut() {
        let r = buf.find(b.ends[0]);
        let next = comp_label.len();
        b.component = *comp_label.entry(r).or_insert(next);
    }
    let boundary_components = comp_label.len();

    let orientation = orient(x, &triangles, &tri_index);

    Patch {
        id,
        triangles,
        interior_edges,
        boundary,
        boundary_components,
        completion_vertices,
        orientation,
        corner_index,
        tri_index,
    }
}

/// +1 when `a → b` follows the triangle's vertex order.
fn order_sign(tri: &Triangle, a: VertexId, b: VertexId) -> bool {
    Triangle::is_ccw(tri.corner_of(a).unwrap(), tri.corner_of(b).unwrap())
}

fn orient(
    x: &TriangleComplex,
    triangles: &[TriId],
    tri_index: &HashMap<TriId, usize>,
) -> Option<Vec<bool>> {
    let mut sign: Vec<Option<bool>> = vec![None; triangles.len()];
    let mut queue = VecDeque::new();
    sign[0] = Some(true);
    queue.push_back(triangles[0]);
    while let Some(t) = queue.pop_front() {
        let st = sign[tri_index[&t]].unwrap();
        let tri = x.triangle(t);
        for &e in &tri.edges {
            if !is_interior(x, e) {
                continue;
            }
            let [a, b] = x.edge(e).ends;
            let (u, _) = *x.edge(e).triangles.iter().find(|(u, _)| *u != t).unwrap();
            let d1 = order_sign(tri, a, b);
            let d2 = order_sign(x.triangle(u), a, b);
            // Coherent orientations traverse the shared edge oppositely.
            let su = if d1 == d2 { !st } else { st };
            let iu = tri_index[&u];
            match sign[iu] {
                None => {
                    sign[iu] = Some(su);
                    queue.push_back(u);
                }
                Some(s) if s != su => return None,
                Some(_) => {}
            }
        }
    }
    sign.into_iter().collect()
}
