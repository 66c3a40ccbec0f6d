//! Exact analysis of finite piecewise-Euclidean triangle complexes.
//!
//! The crate checks the link condition for non-positive curvature, unfolds
//! vertices whose links split as a circle wedged with a clover, traces
//! geodesics by planar development, measures angle holonomy on the patches
//! off the branching locus, and searches for sheared geodesics that certify
//! free subgroups of the fundamental group.

pub mod angle;
pub mod cat0;
pub mod complex;
pub mod error;
pub mod fixtures;
pub mod geodesic;
pub mod geom;
pub mod folding;
pub mod group;
pub mod link;
pub mod patch;
pub mod rationality;
pub mod shortest;
pub mod witness;

pub use angle::{Angle, AngleValue, AtomEnv};
pub use complex::{load_complex, ComplexDoc, EdgeId, TriId, TriangleComplex, VertexId};
pub use cat0::{check_local_cat0, Cat0Report};
pub use error::*;
pub use folding::{unfold_all, unfold_once, FoldingReport, Unfolding};
pub use geodesic::{
    shoot_perpendicular, trace, trace_with, verify_local_geodesic, BranchPolicy, EndStatus,
    Endpoint, GeodesicPath, LinkDirection, Location, TraceConfig,
};
pub use group::{betti_numbers, fundamental_group, Presentation, Word};
pub use link::{link_of_edge_point, link_of_vertex, vertex_girths, LinkGraph};
pub use patch::{patches, Patch};
pub use rationality::{check_extrational, check_rational, psi, shear_spectrum};
pub use shortest::geodesic_between;
pub use witness::{
    build_gamma, find_sheared_connections, free_subgroup_certificate, verify_sheared, FreeWitness,
    GammaGraph, PerpConnection, SearchParams, ShearedGeodesic,
};
