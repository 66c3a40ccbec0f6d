//! Shared inputs for the criterion benches.

pub use flatfold_core::fixtures;

use flatfold_core::witness::{build_gamma, find_sheared_connections, select_connections, GammaGraph, SearchParams};
use flatfold_core::TriangleComplex;

/// Γ at `u0:u1` of the theta-graph-times-circle fixture.
pub fn theta_gamma(x: &TriangleComplex) -> GammaGraph {
    let e = x.parse_edge("u0:u1").expect("fixture edge");
    let conns = find_sheared_connections(x, e, &SearchParams::default()).expect("connections");
    let [ab, ca, bc] = select_connections(x, e, &conns).expect("pattern");
    build_gamma(x, e, &ab, &ca, &bc).expect("gamma")
}
