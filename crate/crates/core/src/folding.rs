//! Unfolding vertices whose link is a 2π circle wedged with a clover.
//!
//! Unfolding at `v` keeps the corners of the circle at `v` and moves the
//! clover corners to a fresh vertex, duplicating the wedge edge `vw`. The
//! original complex is recovered by folding the two copies back together.

use std::cmp::Ordering;

use serde::Serialize;

use crate::angle::Angle;
use crate::cat0::check_local_cat0;
use crate::complex::{EdgeId, TriId, TriangleComplex, VertexId};
use crate::error::FoldError;
use crate::link::link_of_vertex;

#[derive(Clone, Debug, Serialize)]
pub struct UnfoldStep {
    /// The unfolded vertex; it keeps its id and becomes `v1`.
    pub vertex: VertexId,
    pub vertex_name: String,
    /// Far end of the wedge edge.
    pub w: VertexId,
    pub v1: VertexId,
    pub v2: VertexId,
    pub v2_name: String,
    pub e1: EdgeId,
    pub e2: EdgeId,
    pub cycle_triangles: Vec<TriId>,
    pub clover_triangles: Vec<TriId>,
}

pub fn unfold_once(
    x: &TriangleComplex,
    v: VertexId,
) -> Result<(TriangleComplex, UnfoldStep), FoldError> {
    let name = x.vertex_name(v).to_string();
    let link = link_of_vertex(x, v)?;
    let u = link.find_unfoldable().ok_or_else(|| FoldError::NotUnfoldable(name.clone()))?;
    let w = link.nodes[u.y].toward;
    let tris = |arcs: &[usize]| -> Vec<TriId> {
        let mut t: Vec<TriId> = arcs.iter().map(|&a| link.arcs[a].triangle).collect();
        t.sort();
        t
    };
    let cycle_triangles = tris(&u.cycle_arcs);
    let clover_triangles = tris(&u.clover_arcs);

    let mut doc = x.to_doc().clone();
    let mut v2_name = format!("{name}'");
    while doc.vertices.contains(&v2_name) {
        v2_name.push('\'');
    }
    doc.vertices.push(v2_name.clone());
    for t in &clover_triangles {
        for slot in doc.triangles[t.0].v.iter_mut() {
            if *slot == name {
                *slot = v2_name.clone();
            }
        }
    }
    let out = TriangleComplex::from_doc(doc)?;
    let v2 = VertexId(x.vertex_count());
    let e1 = out.edge_between(v, w).expect("cycle keeps the wedge edge");
    let e2 = out.edge_between(v2, w).expect("clover receives a copy of the wedge edge");
    let step = UnfoldStep {
        vertex: v,
        vertex_name: name,
        w,
        v1: v,
        v2,
        v2_name,
        e1,
        e2,
        cycle_triangles,
        clover_triangles,
    };
    Ok((out, step))
}

#[derive(Clone, Debug)]
pub struct Unfolding {
    pub result: TriangleComplex,
    pub steps: Vec<UnfoldStep>,
    /// Complexes before each step, followed by the result.
    pub stages: Vec<TriangleComplex>,
    /// Image in the input complex of every vertex of the result.
    pub vertex_map: Vec<VertexId>,
}

/// Unfolds until no vertex link is unfoldable, always taking the unfoldable
/// vertex of smallest id.
pub fn unfold_all(x: &TriangleComplex) -> Unfolding {
    let cap = 3 * x.triangle_count();
    let mut cur = x.clone();
    let mut steps = Vec::new();
    let mut stages = vec![cur.clone()];
    let mut vertex_map: Vec<VertexId> = x.vertices().collect();
    while steps.len() < cap {
        let next = cur.vertices().find_map(|v| unfold_once(&cur, v).ok());
        let Some((y, step)) = next else { break };
        vertex_map.push(vertex_map[step.vertex.0]);
        steps.push(step);
        stages.push(y.clone());
        cur = y;
    }
    Unfolding { result: cur, steps, stages, vertex_map }
}

#[derive(Clone, Debug, Serialize)]
pub struct FoldingReport {
    pub euler_characteristic: (i64, i64),
    pub components: (usize, usize),
    pub essential: (bool, bool),
    pub locally_cat0: (bool, bool),
    pub triangle_isometry: bool,
    pub girth_monotone: bool,
    pub fixpoint: bool,
}

/// Checks an unfolded complex against its source under the vertex quotient
/// map. `require_fixpoint` also demands that no link of `y` is unfoldable.
pub fn verify_folding_properties(
    x: &TriangleComplex,
    y: &TriangleComplex,
    vertex_map: &[VertexId],
    require_fixpoint: bool,
) -> Result<FoldingReport, FoldError> {
    let violation = |what: &str| Err(FoldError::PropertyViolation(what.to_string()));
    let cx = x.classify();
    let cy = y.classify();
    let cat_x = check_local_cat0(x).pass;
    let cat_y = check_local_cat0(y).pass;
    let report = FoldingReport {
        euler_characteristic: (x.euler_characteristic(), y.euler_characteristic()),
        components: (cx.components, cy.components),
        essential: (cx.essential, cy.essential),
        locally_cat0: (cat_x, cat_y),
        triangle_isometry: triangles_isometric(x, y, vertex_map),
        girth_monotone: girth_monotone(x, y, vertex_map),
        fixpoint: y.vertices().all(|v| {
            link_of_vertex(y, v).map(|l| l.find_unfoldable().is_none()).unwrap_or(false)
        }),
    };
    if report.euler_characteristic.0 != report.euler_characteristic.1 {
        return violation("euler characteristic");
    }
    if report.components.0 != report.components.1 {
        return violation("component count");
    }
    if cx.essential && !cy.essential {
        return violation("essential");
    }
    if cat_x && !cat_y {
        return violation("locally CAT(0)");
    }
    if !report.triangle_isometry {
        return violation("triangle isometry");
    }
    if !report.girth_monotone {
        return violation("link girth");
    }
    if require_fixpoint && !report.fixpoint {
        return violation("fixpoint");
    }
    Ok(report)
}

fn triangles_isometric(x: &TriangleComplex, y: &TriangleComplex, map: &[VertexId]) -> bool {
    x.triangle_count() == y.triangle_count()
        && y.vertex_count() == map.len()
        && y.triangle_ids().all(|t| {
            let (a, b) = (x.triangle(t), y.triangle(t));
            b.vertices.map(|v| map[v.0]) == a.vertices
                && a.angles == b.angles
                && a.sides == b.sides
        })
}

fn girth_monotone(x: &TriangleComplex, y: &TriangleComplex, map: &[VertexId]) -> bool {
    let env = x.atom_env();
    y.vertices().all(|v| {
        let gy = link_of_vertex(y, v).expect("vertex").girth().length;
        let gx = link_of_vertex(x, map[v.0]).expect("vertex").girth().length;
        match (gx, gy) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => b.cmp_with(&a, env) != Ordering::Less,
        }
    })
}

/// Corner angle sum at each vertex; used by the step log.
pub fn cone_angle(x: &TriangleComplex, v: VertexId) -> Angle {
    x.corners_at(v).iter().fold(Angle::zero(), |acc, &(t, c)| acc + &x.triangle(t).angles[c])
}
