//! The link condition for piecewise-Euclidean complexes.
//!
//! Euclidean triangles are flat with geodesic sides, so non-positive
//! curvature reduces to every vertex link having girth at least 2π.

use serde::Serialize;

use crate::angle::Angle;
use crate::complex::{TriangleComplex, VertexId};
use crate::group::{betti_numbers, Betti};
use crate::link::{link_of_edge_point, vertex_girths, Girth};

#[derive(Clone, Debug, Serialize)]
pub struct Cat0Failure {
    pub vertex: VertexId,
    pub name: String,
    pub girth: Angle,
    pub girth_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cat0Report {
    pub pass: bool,
    pub failures: Vec<Cat0Failure>,
    /// Smallest vertex-link girth, `None` when every link is a forest.
    pub min_girth: Option<Angle>,
    pub edge_links_ok: bool,
    pub euler_characteristic: i64,
    pub components: usize,
    pub betti: Betti,
}

pub fn check_local_cat0(x: &TriangleComplex) -> Cat0Report {
    let env = x.atom_env();
    let girths = vertex_girths(x);
    let mut failures = Vec::new();
    let mut min: Option<Angle> = None;
    for (v, g) in &girths {
        let Girth { length: Some(l), value, .. } = g else { continue };
        if min.as_ref().is_none_or(|m| l.cmp_with(m, env).is_lt()) {
            min = Some(l.clone());
        }
        if !g.at_least_two_pi(env) {
            failures.push(Cat0Failure {
                vertex: *v,
                name: x.vertex_name(*v).to_string(),
                girth: l.clone(),
                girth_value: *value,
            });
        }
    }
    let edge_links_ok = x.edge_ids().all(|e| {
        link_of_edge_point(x, e).expect("edge exists").girth().at_least_two_pi(env)
    });
    Cat0Report {
        pass: failures.is_empty() && edge_links_ok,
        failures,
        min_girth: min,
        edge_links_ok,
        euler_characteristic: x.euler_characteristic(),
        components: x.component_count(),
        betti: betti_numbers(x),
    }
}
