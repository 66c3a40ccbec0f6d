//! Finite piecewise-Euclidean triangle complexes: the document format,
//! validation, and the combinatorial queries everything else builds on.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angle::{Angle, AtomEnv};
use crate::error::ComplexError;

/// Relative tolerance for law-of-sines and shared-edge consistency.
pub const LENGTH_RTOL: f64 = 1e-9;

macro_rules! id_type {
    ($name:ident) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub usize);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(VertexId);
id_type!(EdgeId);
id_type!(TriId);

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TriangleDoc {
    pub v: [String; 3],
    pub angles: [Angle; 3],
    pub sides: [f64; 3],
}

/// An edge not carried by any triangle (1-dimensional part of the complex).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FreeEdgeDoc {
    pub v: [String; 2],
    pub length: f64,
}

/// The on-disk JSON form of a complex.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    #[serde(default)]
    pub atoms: BTreeMap<String, f64>,
    pub vertices: Vec<String>,
    pub triangles: Vec<TriangleDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<FreeEdgeDoc>,
}

#[derive(Clone, Debug)]
pub struct Triangle {
    pub vertices: [VertexId; 3],
    pub angles: [Angle; 3],
    pub angle_values: [f64; 3],
    /// Side `i` is opposite corner `i`.
    pub sides: [f64; 3],
    /// Edge `i` is opposite corner `i`.
    pub edges: [EdgeId; 3],
}

impl Triangle {
    pub fn corner_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    pub fn side_of(&self, e: EdgeId) -> Option<usize> {
        self.edges.iter().position(|&f| f == e)
    }

    /// Vertex positions in the triangle's own counterclockwise frame: corner 0
    /// at the origin, corner 1 on the positive x-axis.
    pub fn local_coords(&self) -> [[f64; 2]; 3] {
        let a0 = self.angle_values[0];
        [
            [0.0, 0.0],
            [self.sides[2], 0.0],
            [self.sides[1] * a0.cos(), self.sides[1] * a0.sin()],
        ]
    }

    /// Exact direction angle, in the local frame, of the ray from corner
    /// `from` toward corner `to`.
    pub fn direction(&self, from: usize, to: usize) -> Angle {
        match (from, to) {
            (0, 1) => Angle::zero(),
            (1, 0) => Angle::pi(),
            (0, 2) => self.angles[0].clone(),
            (2, 0) => self.angles[0].add_pi_multiple(1),
            (1, 2) => (-&self.angles[1]).add_pi_multiple(1),
            (2, 1) => (-&self.angles[1]).add_pi_multiple(2),
            _ => panic!("direction between corners {from} and {to}"),
        }
    }

    /// Corners spanned by side `j`.
    pub fn side_corners(j: usize) -> (usize, usize) {
        ((j + 1) % 3, (j + 2) % 3)
    }

    /// True iff travelling from corner `a` to corner `b` follows the
    /// counterclockwise boundary orientation.
    pub fn is_ccw(a: usize, b: usize) -> bool {
        (a + 1) % 3 == b
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    /// Endpoints sorted by vertex id; offsets along the edge run from
    /// `ends[0]` to `ends[1]`.
    pub ends: [VertexId; 2],
    pub length: f64,
    /// `(triangle, side index)` for every triangle containing the edge.
    pub triangles: Vec<(TriId, usize)>,
}

impl Edge {
    pub fn other_end(&self, v: VertexId) -> VertexId {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

/// A validated, immutable triangle complex.
#[derive(Clone, Debug)]
pub struct TriangleComplex {
    names: Vec<String>,
    name_index: HashMap<String, VertexId>,
    triangles: Vec<Triangle>,
    edges: Vec<Edge>,
    edge_index: HashMap<(VertexId, VertexId), EdgeId>,
    atom_env: AtomEnv,
    vertex_edges: Vec<Vec<EdgeId>>,
    vertex_corners: Vec<Vec<(TriId, usize)>>,
    doc: ComplexDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub essential: bool,
    pub thick: bool,
    pub components: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchingLocus {
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<VertexId>,
}

fn rel_close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs())
}

/// Parses and validates a complex document.
pub fn load_complex(json: &str) -> Result<TriangleComplex, ComplexError> {
    let doc: ComplexDoc =
        serde_json::from_str(json).map_err(|e| ComplexError::Format(e.to_string()))?;
    TriangleComplex::from_doc(doc)
}

impl TriangleComplex {
    pub fn from_doc(doc: ComplexDoc) -> Result<Self, ComplexError> {
        let atom_env = AtomEnv::from_map(doc.atoms.clone())?;
        let mut name_index = HashMap::new();
        for (i, n) in doc.vertices.iter().enumerate() {
            if name_index.insert(n.clone(), VertexId(i)).is_some() {
                return Err(ComplexError::NonSimplicial(format!("vertex `{n}` listed twice")));
            }
        }
        let lookup = |n: &str| {
            name_index.get(n).copied().ok_or_else(|| ComplexError::UnknownVertex(n.to_string()))
        };

        // Raw edge lengths per unordered vertex pair, in order of appearance.
        let mut pair_lengths: BTreeMap<(VertexId, VertexId), f64> = BTreeMap::new();
        let mut record = |a: VertexId, b: VertexId, len: f64, names: (&str, &str)| {
            let key = if a < b { (a, b) } else { (b, a) };
            match pair_lengths.get(&key) {
                Some(&prev) if !rel_close(prev, len, LENGTH_RTOL) => {
                    Err(ComplexError::SharedEdgeLengthMismatch {
                        edge: format!("{}:{}", names.0, names.1),
                        first: prev,
                        second: len,
                    })
                }
                Some(_) => Ok(()),
                None => {
                    pair_lengths.insert(key, len);
                    Ok(())
                }
            }
        };

        let pi = Angle::pi();
        let mut seen_triples = BTreeSet::new();
        let mut raw = Vec::with_capacity(doc.triangles.len());
        for (ti, t) in doc.triangles.iter().enumerate() {
            let vs = [lookup(&t.v[0])?, lookup(&t.v[1])?, lookup(&t.v[2])?];
            if vs[0] == vs[1] || vs[1] == vs[2] || vs[0] == vs[2] {
                return Err(ComplexError::NonSimplicial(format!(
                    "triangle {ti} repeats a vertex"
                )));
            }
            let mut key = vs;
            key.sort();
            if !seen_triples.insert(key) {
                return Err(ComplexError::NonSimplicial(format!(
                    "two triangles on vertices {}, {}, {}",
                    t.v[0], t.v[1], t.v[2]
                )));
            }
            let mut values = [0.0; 3];
            for i in 0..3 {
                values[i] = t.angles[i].numeric(&atom_env)?;
                if !(values[i] > 0.0 && values[i] < std::f64::consts::PI) {
                    return Err(ComplexError::Degenerate(format!(
                        "triangle {ti} corner {i} has angle {}",
                        t.angles[i]
                    )));
                }
                if !(t.sides[i].is_finite() && t.sides[i] > 0.0) {
                    return Err(ComplexError::Degenerate(format!(
                        "triangle {ti} side {i} has length {}",
                        t.sides[i]
                    )));
                }
            }
            let sum = &(&t.angles[0] + &t.angles[1]) + &t.angles[2];
            if sum != pi {
                return Err(ComplexError::AngleSumViolation { triangle: ti, sum: sum.to_string() });
            }
            let ratios = [0, 1, 2].map(|i| t.sides[i] / values[i].sin());
            if !(rel_close(ratios[0], ratios[1], LENGTH_RTOL)
                && rel_close(ratios[1], ratios[2], LENGTH_RTOL)
                && rel_close(ratios[0], ratios[2], LENGTH_RTOL))
            {
                return Err(ComplexError::LawOfSinesMismatch { triangle: ti, ratios });
            }
            for j in 0..3 {
                let (a, b) = Triangle::side_corners(j);
                record(vs[a], vs[b], t.sides[j], (&t.v[a], &t.v[b]))?;
            }
            raw.push((vs, values));
        }
        for fe in &doc.edges {
            let a = lookup(&fe.v[0])?;
            let b = lookup(&fe.v[1])?;
            if a == b {
                return Err(ComplexError::NonSimplicial(format!(
                    "free edge on a single vertex `{}`",
                    fe.v[0]
                )));
            }
            if !(fe.length.is_finite() && fe.length > 0.0) {
                return Err(ComplexError::Degenerate(format!(
                    "free edge {}:{} has length {}",
                    fe.v[0], fe.v[1], fe.length
                )));
            }
            record(a, b, fe.length, (&fe.v[0], &fe.v[1]))?;
        }

        let n = doc.vertices.len();
        let mut edges = Vec::with_capacity(pair_lengths.len());
        let mut edge_index = HashMap::new();
        let mut vertex_edges = vec![Vec::new(); n];
        for (i, (&(a, b), &len)) in pair_lengths.iter().enumerate() {
            edges.push(Edge { ends: [a, b], length: len, triangles: Vec::new() });
            edge_index.insert((a, b), EdgeId(i));
            vertex_edges[a.0].push(EdgeId(i));
            vertex_edges[b.0].push(EdgeId(i));
        }
        let mut triangles = Vec::with_capacity(raw.len());
        let mut vertex_corners = vec![Vec::new(); n];
        for (ti, ((vs, values), t)) in raw.into_iter().zip(doc.triangles.iter()).enumerate() {
            let mut es = [EdgeId(0); 3];
            for (j, slot) in es.iter_mut().enumerate() {
                let (a, b) = Triangle::side_corners(j);
                let key = if vs[a] < vs[b] { (vs[a], vs[b]) } else { (vs[b], vs[a]) };
                *slot = edge_index[&key];
                edges[slot.0].triangles.push((TriId(ti), j));
            }
            for (c, v) in vs.iter().enumerate() {
                vertex_corners[v.0].push((TriId(ti), c));
            }
            triangles.push(Triangle {
                vertices: vs,
                angles: t.angles.clone(),
                angle_values: values,
                sides: t.sides,
                edges: es,
            });
        }

        Ok(TriangleComplex {
            names: doc.vertices.clone(),
            name_index,
            triangles,
            edges,
            edge_index,
            atom_env,
            vertex_edges,
            vertex_corners,
            doc,
        })
    }

    pub fn to_doc(&self) -> &ComplexDoc {
        &self.doc
    }

    pub fn atom_env(&self) -> &AtomEnv {
        &self.atom_env
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.names.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn triangle_ids(&self) -> impl Iterator<Item = TriId> {
        (0..self.triangles.len()).map(TriId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn vertex_by_name(&self, name: &str) -> Result<VertexId, ComplexError> {
        self.name_index.get(name).copied().ok_or_else(|| ComplexError::UnknownVertex(name.into()))
    }

    pub fn triangle(&self, t: TriId) -> &Triangle {
        &self.triangles[t.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edge_between(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edge_index.get(&key).copied()
    }

    /// `"A:B"` style label.
    pub fn edge_label(&self, e: EdgeId) -> String {
        let [a, b] = self.edges[e.0].ends;
        format!("{}:{}", self.names[a.0], self.names[b.0])
    }

    pub fn triangle_label(&self, t: TriId) -> String {
        let v = self.triangles[t.0].vertices;
        format!("{}:{}:{}", self.names[v[0].0], self.names[v[1].0], self.names[v[2].0])
    }

    /// Resolves `"A:B"` (either order) or a numeric edge index.
    pub fn parse_edge(&self, s: &str) -> Result<EdgeId, ComplexError> {
        if let Ok(i) = s.parse::<usize>() {
            return if i < self.edges.len() {
                Ok(EdgeId(i))
            } else {
                Err(ComplexError::UnknownEdge(s.into()))
            };
        }
        let (a, b) = s.split_once(':').ok_or_else(|| ComplexError::UnknownEdge(s.into()))?;
        let a = self.vertex_by_name(a)?;
        let b = self.vertex_by_name(b)?;
        self.edge_between(a, b).ok_or_else(|| ComplexError::UnknownEdge(s.into()))
    }

    /// Resolves `"A:B:C"` (any order) or a numeric triangle index.
    pub fn parse_triangle(&self, s: &str) -> Result<TriId, ComplexError> {
        if let Ok(i) = s.parse::<usize>() {
            return if i < self.triangles.len() {
                Ok(TriId(i))
            } else {
                Err(ComplexError::UnknownTriangle(s.into()))
            };
        }
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(ComplexError::UnknownTriangle(s.into()));
        }
        let mut want = [
            self.vertex_by_name(parts[0])?,
            self.vertex_by_name(parts[1])?,
            self.vertex_by_name(parts[2])?,
        ];
        want.sort();
        self.triangle_ids()
            .find(|&t| {
                let mut v = self.triangles[t.0].vertices;
                v.sort();
                v == want
            })
            .ok_or_else(|| ComplexError::UnknownTriangle(s.into()))
    }

    pub fn edges_at(&self, v: VertexId) -> &[EdgeId] {
        &self.vertex_edges[v.0]
    }

    /// `(triangle, corner)` pairs at a vertex.
    pub fn corners_at(&self, v: VertexId) -> &[(TriId, usize)] {
        &self.vertex_corners[v.0]
    }

    pub fn edge_degree(&self, e: EdgeId) -> usize {
        self.edges[e.0].triangles.len()
    }

    pub fn check_edge(&self, e: EdgeId) -> Result<(), ComplexError> {
        if e.0 < self.edges.len() {
            Ok(())
        } else {
            Err(ComplexError::UnknownEdge(e.to_string()))
        }
    }

    pub fn edge_degree_checked(&self, e: EdgeId) -> Result<usize, ComplexError> {
        self.check_edge(e)?;
        Ok(self.edge_degree(e))
    }

    /// Connected component label per vertex (labels are dense, ordered by the
    /// smallest vertex id in each component).
    pub fn component_labels(&self) -> Vec<usize> {
        let n = self.names.len();
        let mut uf = UnionFind::new(n);
        for e in &self.edges {
            uf.union(e.ends[0].0, e.ends[1].0);
        }
        let mut label = HashMap::new();
        (0..n)
            .map(|v| {
                let r = uf.find(v);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect()
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn classify(&self) -> Classification {
        let degs: Vec<usize> = self.edge_ids().map(|e| self.edge_degree(e)).collect();
        let isolated = self.vertices().any(|v| self.vertex_edges[v.0].is_empty());
        Classification {
            essential: degs.iter().all(|&d| d >= 2) && !isolated,
            thick: degs.iter().any(|&d| d >= 3),
            components: self.component_count(),
        }
    }

    pub fn branching_locus(&self) -> BranchingLocus {
        let edges: Vec<EdgeId> = self.edge_ids().filter(|&e| self.edge_degree(e) >= 3).collect();
        let vertices: BTreeSet<VertexId> =
            edges.iter().flat_map(|&e| self.edges[e.0].ends).collect();
        BranchingLocus { edges, vertices: vertices.into_iter().collect() }
    }

    pub fn is_branching(&self, e: EdgeId) -> bool {
        self.edge_degree(e) >= 3
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangle_count() as i64
    }

    /// The subcomplex spanned by the given triangles (free edges dropped,
    /// vertices restricted to those the triangles use).
    pub fn subcomplex(&self, keep: &[TriId]) -> Result<TriangleComplex, ComplexError> {
        let keep: BTreeSet<TriId> = keep.iter().copied().collect();
        let used: BTreeSet<VertexId> =
            keep.iter().flat_map(|t| self.triangles[t.0].vertices).collect();
        let doc = ComplexDoc {
            atoms: self.doc.atoms.clone(),
            vertices: used.iter().map(|v| self.names[v.0].clone()).collect(),
            triangles: keep.iter().map(|t| self.doc.triangles[t.0].clone()).collect(),
            edges: Vec::new(),
        };
        TriangleComplex::from_doc(doc)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn flat_square_counts() {
        let x = fixtures::flat_square();
        assert_eq!((x.vertex_count(), x.edge_count(), x.triangle_count()), (4, 5, 2));
        assert_eq!(x.euler_characteristic(), 1);
        let ac = x.parse_edge("A:C").unwrap();
        assert_eq!(x.edge_degree(ac), 2);
        assert_eq!(x.edge_degree(x.parse_edge("B:A").unwrap()), 1);
        assert!(x.branching_locus().edges.is_empty());
    }

    #[test]
    fn book_of_three_squares() {
        let x = fixtures::book(3);
        assert_eq!(x.edge_degree(x.parse_edge("P:Q").unwrap()), 3);
        assert_eq!(x.euler_characteristic(), 1);
        assert_eq!((x.vertex_count(), x.edge_count(), x.triangle_count()), (8, 13, 6));
        let c = x.classify();
        assert!(!c.essential && c.thick);
        let b = x.branching_locus();
        assert_eq!(b.edges, vec![x.parse_edge("P:Q").unwrap()]);
        assert_eq!(b.vertices.len(), 2);
    }

    #[test]
    fn theta_times_circle() {
        let x = fixtures::theta_circle();
        let c = x.classify();
        assert!(c.essential && c.thick);
        assert_eq!(c.components, 1);
        let b = x.branching_locus();
        assert_eq!(b.edges.len(), 6);
        let names: BTreeSet<&str> = b.vertices.iter().map(|&v| x.vertex_name(v)).collect();
        let want: BTreeSet<&str> = ["u0", "u1", "u2", "v0", "v1", "v2"].into_iter().collect();
        assert_eq!(names, want);
        assert_eq!(x.euler_characteristic(), 0);
    }

    #[test]
    fn single_triangle_classification() {
        let x = fixtures::single_triangle();
        let c = x.classify();
        assert!(!c.essential && !c.thick);
    }

    #[test]
    fn rejects_bad_angle_sum() {
        let right = serde_json::json!({"pi": "1/2"});
        let doc = serde_json::json!({
            "vertices": ["A", "B", "C"],
            "triangles": [{"v": ["A", "B", "C"], "angles": [right, right, right], "sides": [1.0, 1.0, 1.0]}]
        });
        let err = load_complex(&doc.to_string()).unwrap_err();
        assert!(matches!(err, ComplexError::AngleSumViolation { .. }));
    }

    #[test]
    fn rejects_shared_edge_mismatch() {
        let mut doc = fixtures::flat_square().to_doc().clone();
        // Rescale the second triangle so its copy of AC disagrees.
        for s in doc.triangles[1].sides.iter_mut() {
            *s *= 1.5;
        }
        let err = TriangleComplex::from_doc(doc).unwrap_err();
        assert!(matches!(err, ComplexError::SharedEdgeLengthMismatch { .. }));
    }

    #[test]
    fn rejects_law_of_sines_violation() {
        let mut doc = fixtures::single_triangle().to_doc().clone();
        doc.triangles[0].sides[0] *= 1.01;
        let err = TriangleComplex::from_doc(doc).unwrap_err();
        assert!(matches!(err, ComplexError::LawOfSinesMismatch { .. }));
    }

    #[test]
    fn rejects_non_simplicial() {
        let mut doc = fixtures::single_triangle().to_doc().clone();
        let t = doc.triangles[0].clone();
        doc.triangles.push(t);
        assert!(matches!(
            TriangleComplex::from_doc(doc).unwrap_err(),
            ComplexError::NonSimplicial(_)
        ));
        let mut doc = fixtures::single_triangle().to_doc().clone();
        doc.triangles[0].v[1] = doc.triangles[0].v[0].clone();
        assert!(matches!(
            TriangleComplex::from_doc(doc).unwrap_err(),
            ComplexError::NonSimplicial(_)
        ));
    }

    #[test]
    fn rejects_unknown_atom_and_zero_side() {
        let mut doc = fixtures::single_triangle().to_doc().clone();
        doc.triangles[0].angles[0] =
            &doc.triangles[0].angles[0] + &Angle::atom("beta", crate::angle::ratio(1, 1));
        assert!(matches!(
            TriangleComplex::from_doc(doc).unwrap_err(),
            ComplexError::Angle(crate::error::AngleError::UnknownAtom(_))
        ));
        let mut doc = fixtures::single_triangle().to_doc().clone();
        doc.triangles[0].sides[2] = 0.0;
        assert!(matches!(
            TriangleComplex::from_doc(doc).unwrap_err(),
            ComplexError::Degenerate(_)
        ));
    }

    #[test]
    fn local_frame_matches_side_lengths() {
        let x = fixtures::theta_circle();
        for t in x.triangle_ids() {
            let tri = x.triangle(t);
            let p = tri.local_coords();
            for j in 0..3 {
                let (a, b) = Triangle::side_corners(j);
                let d = ((p[a][0] - p[b][0]).powi(2) + (p[a][1] - p[b][1]).powi(2)).sqrt();
                assert!((d - tri.sides[j]).abs() < 1e-12);
                let dir = tri.direction(a, b).numeric(x.atom_env()).unwrap();
                assert!(((p[b][0] - p[a][0]) / d - dir.cos()).abs() < 1e-12);
                assert!(((p[b][1] - p[a][1]) / d - dir.sin()).abs() < 1e-12);
            }
        }
    }
}
