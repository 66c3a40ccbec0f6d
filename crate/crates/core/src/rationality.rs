//! Rationality of link lengths and the holonomy of patches.
//!
//! Directions are transported across interior edges of an oriented patch by
//! keeping the angle they make with the shared edge. Going around a dual loop,
//! or from one boundary edge to another, a direction comes back rotated by an
//! exact angle; modulo πℚ that rotation is the holonomy ψ of the generator.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::angle::{lcm_of_denominators, Angle};
use crate::complex::{EdgeId, TriId, TriangleComplex, VertexId};
use crate::error::RationalityError;
use crate::geodesic::{shoot_perpendicular, BranchPolicy, EndStatus};
use crate::link::{link_of_vertex, ChainKind};
use crate::patch::{patches, Patch};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkChainReport {
    pub vertex: VertexId,
    pub name: String,
    pub kind: ChainKind,
    /// Edges of the complex met by the chain, as "A:B" labels.
    pub through: Vec<String>,
    pub length: Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalReport {
    pub pass: bool,
    /// Segments and cycles whose length is not a rational multiple of π.
    pub witnesses: Vec<LinkChainReport>,
}

fn link_chains(x: &TriangleComplex, keep: impl Fn(ChainKind) -> bool) -> Vec<LinkChainReport> {
    let mut out = Vec::new();
    for v in x.vertices() {
        let link = link_of_vertex(x, v).expect("vertex exists");
        for c in link.decompose().chains {
            if !keep(c.kind) {
                continue;
            }
            out.push(LinkChainReport {
                vertex: v,
                name: x.vertex_name(v).to_string(),
                kind: c.kind,
                through: c.nodes.iter().map(|&n| x.edge_label(link.nodes[n].edge)).collect(),
                length: c.length,
            });
        }
    }
    out
}

/// Every cycle of a link is a sum of segments and circle components, so
/// checking those suffices.
pub fn check_rational(x: &TriangleComplex) -> RationalReport {
    let witnesses: Vec<_> =
        link_chains(x, |k| matches!(k, ChainKind::Segment | ChainKind::Cycle))
            .into_iter()
            .filter(|c| !c.length.is_pi_commensurable())
            .collect();
    RationalReport { pass: witnesses.is_empty(), witnesses }
}

/// Circle components of vertex links with their exact lengths.
pub fn circle_link_report(x: &TriangleComplex) -> Vec<LinkChainReport> {
    link_chains(x, |k| k == ChainKind::Cycle)
}

/// Signed turning of the development of a triangle's boundary: the sum over
/// its sides of the outgoing direction at the start minus the backward
/// direction at the end. Always ±π.
pub fn triangle_turning(x: &TriangleComplex, t: TriId) -> Angle {
    let tri = x.triangle(t);
    [(0, 1), (1, 2), (2, 0)]
        .into_iter()
        .fold(Angle::zero(), |acc, (i, j)| acc + tri.direction(i, j) - tri.direction(j, i))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Dual loop closed by a non-tree interior edge.
    Loop { edge: String },
    /// Dual arc between boundary copies in different components.
    Arc { from: String, to: String, components: [usize; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Generator {
    pub kind: GeneratorKind,
    /// Triangles of the dual path, start to end.
    pub strip: Vec<String>,
    /// Whether the generator was reversed so that ψ has a positive leading
    /// atom coefficient.
    pub reversed: bool,
    /// Exact rotation, including its rational multiple of π.
    pub rotation: Angle,
    /// ψ: the rotation modulo πℚ.
    pub psi: Angle,
}

/// Exact transport data of an oriented patch.
struct Transport<'a> {
    x: &'a TriangleComplex,
    patch: &'a Patch,
    /// Oriented heading offset of each patch triangle relative to the root.
    tau: Vec<Angle>,
    parent: Vec<Option<(usize, EdgeId)>>,
    tree_edges: Vec<EdgeId>,
}

impl<'a> Transport<'a> {
    fn new(x: &'a TriangleComplex, patch: &'a Patch) -> Result<Self, RationalityError> {
        if patch.triangles.is_empty() {
            return Err(RationalityError::EmptyPatch(patch.id));
        }
        if !patch.is_orientable() {
            return Err(RationalityError::NonOrientablePatch(patch.id));
        }
        let n = patch.triangles.len();
        let mut tr = Transport {
            x,
            patch,
            tau: vec![Angle::zero(); n],
            parent: vec![None; n],
            tree_edges: Vec::new(),
        };
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let t = patch.triangles[i];
            for &e in &x.triangle(t).edges {
                if patch.interior_edges.binary_search(&e).is_err() {
                    continue;
                }
                let t2 = x.edge(e).triangles.iter().map(|p| p.0).find(|&s| s != t).unwrap();
                let j = patch.position(t2).expect("interior edge stays in patch");
                if seen[j] {
                    continue;
                }
                seen[j] = true;
                tr.tau[j] = tr.cross(&tr.tau[i], t, t2, e);
                tr.parent[j] = Some((i, e));
                tr.tree_edges.push(e);
                queue.push_back(j);
            }
        }
        tr.tree_edges.sort();
        Ok(tr)
    }

    /// Oriented direction of the low-to-high side of `e` in `t`.
    fn beta(&self, t: TriId, e: EdgeId) -> Angle {
        let tri = self.x.triangle(t);
        let [lo, hi] = self.x.edge(e).ends;
        let d = tri.direction(tri.corner_of(lo).unwrap(), tri.corner_of(hi).unwrap());
        if self.patch.positive(t).unwrap() {
            d
        } else {
            -d
        }
    }

    /// Offset after crossing `e` from `t` into `t2`.
    fn cross(&self, tau: &Angle, t: TriId, t2: TriId, e: EdgeId) -> Angle {
        tau.clone() - self.beta(t, e) + self.beta(t2, e)
    }

    fn strip_to_root(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![i];
        while let Some((p, _)) = self.parent[i] {
            out.push(p);
            i = p;
        }
        out
    }

    /// Dual tree path between two patch triangles, as triangle labels.
    fn strip(&self, a: usize, b: usize) -> Vec<String> {
        let up = self.strip_to_root(a);
        let mut down = self.strip_to_root(b);
        let mut k = 0;
        while k < up.len().min(down.len())
            && up[up.len() - 1 - k] == down[down.len() - 1 - k]
        {
            k += 1;
        }
        let mut path: Vec<usize> = up[..up.len() - k + 1].to_vec();
        down.truncate(down.len() - k);
        down.reverse();
        path.extend(down);
        path.iter().map(|&i| self.x.triangle_label(self.patch.triangles[i])).collect()
    }

    fn loop_generator(&self, e: EdgeId) -> Generator {
        let ts: Vec<TriId> = self.x.edge(e).triangles.iter().map(|p| p.0).collect();
        let (i, j) = (self.patch.position(ts[0]).unwrap(), self.patch.position(ts[1]).unwrap());
        let rotation = self.cross(&self.tau[i], ts[0], ts[1], e) - &self.tau[j];
        let mut strip = self.strip(j, i);
        strip.push(self.x.triangle_label(ts[1]));
        finish(GeneratorKind::Loop { edge: self.x.edge_label(e) }, strip, rotation)
    }

    /// ψ of the dual arc from boundary copy `from` to boundary copy `to`:
    /// the end reference direction minus the transported start reference.
    fn arc_rotation(&self, from: usize, to: usize) -> Angle {
        let (a, b) = (&self.patch.boundary[from], &self.patch.boundary[to]);
        let (i, j) = (self.patch.position(a.triangle).unwrap(), self.patch.position(b.triangle).unwrap());
        let start = self.beta(a.triangle, a.edge) - &self.tau[i] + &self.tau[j];
        self.beta(b.triangle, b.edge) - start
    }

    fn arc_generator(&self, from: usize, to: usize) -> Generator {
        let (a, b) = (&self.patch.boundary[from], &self.patch.boundary[to]);
        let (i, j) = (self.patch.position(a.triangle).unwrap(), self.patch.position(b.triangle).unwrap());
        let kind = GeneratorKind::Arc {
            from: self.copy_label(from),
            to: self.copy_label(to),
            components: [a.component, b.component],
        };
        finish(kind, self.strip(i, j), self.arc_rotation(from, to))
    }

    fn copy_label(&self, c: usize) -> String {
        let b = &self.patch.boundary[c];
        format!("{}@{}", self.x.edge_label(b.edge), self.x.triangle_label(b.triangle))
    }
}

/// Reverses the generator when the leading atom coefficient is negative.
fn finish(kind: GeneratorKind, mut strip: Vec<String>, rotation: Angle) -> Generator {
    let negative = rotation.atom_terms().values().next().is_some_and(|c| c.is_negative());
    let rotation = if negative {
        strip.reverse();
        -rotation
    } else {
        rotation
    };
    let kind = match (kind, negative) {
        (GeneratorKind::Arc { from, to, components: [c0, c1] }, true) => {
            GeneratorKind::Arc { from: to, to: from, components: [c1, c0] }
        }
        (k, _) => k,
    };
    Generator { kind, strip, reversed: negative, psi: rotation.mod_pi_rational(), rotation }
}

fn first_copy_of_each_component(patch: &Patch) -> Vec<usize> {
    let mut firsts = vec![None; patch.boundary_components];
    for (i, b) in patch.boundary.iter().enumerate() {
        firsts[b.component].get_or_insert(i);
    }
    firsts.into_iter().flatten().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiReport {
    pub patch: usize,
    pub generators: Vec<Generator>,
    pub trivial: bool,
}

/// ψ on a generating set of the relative homology of the patch completion:
/// one loop per non-tree interior edge and one arc from the first boundary
/// component to each other one.
pub fn psi(x: &TriangleComplex, patch: &Patch) -> Result<PsiReport, RationalityError> {
    let tr = Transport::new(x, patch)?;
    let mut generators: Vec<Generator> = patch
        .interior_edges
        .iter()
        .filter(|e| tr.tree_edges.binary_search(e).is_err())
        .map(|&e| tr.loop_generator(e))
        .collect();
    let firsts = first_copy_of_each_component(patch);
    for &c in firsts.iter().skip(1) {
        generators.push(tr.arc_generator(firsts[0], c));
    }
    let trivial = generators.iter().all(|g| g.psi.is_zero());
    Ok(PsiReport { patch: patch.id, generators, trivial })
}

/// ψ of the dual arc between two chosen boundary copies.
pub fn psi_arc(
    x: &TriangleComplex,
    patch: &Patch,
    from: usize,
    to: usize,
) -> Result<Angle, RationalityError> {
    Ok(Transport::new(x, patch)?.arc_rotation(from, to).mod_pi_rational())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PatchVerdict {
    Trivial,
    Nontrivial { witness: Generator },
    Undetermined { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatchPsi {
    pub patch: usize,
    #[serde(flatten)]
    pub verdict: PatchVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtrationalReport {
    pub pass: bool,
    /// Circle components of vertex links whose length is not 2π.
    pub circle_failures: Vec<LinkChainReport>,
    pub patches: Vec<PatchPsi>,
}

/// Both extrationality conditions. A patch whose ψ cannot be computed is
/// reported as undetermined and keeps the verdict from passing.
pub fn check_extrational(x: &TriangleComplex) -> Result<ExtrationalReport, RationalityError> {
    let rational = check_rational(x);
    if let Some(w) = rational.witnesses.first() {
        return Err(RationalityError::NotRational(format!(
            "link of {} has a {:?} of length {}",
            w.name, w.kind, w.length
        )));
    }
    let two_pi = Angle::pi_frac(2, 1);
    let circle_failures: Vec<_> =
        circle_link_report(x).into_iter().filter(|c| c.length != two_pi).collect();
    let mut out = Vec::new();
    for p in patches(x) {
        let verdict = match psi(x, &p) {
            Ok(r) => match r.generators.into_iter().find(|g| !g.psi.is_zero()) {
                None => PatchVerdict::Trivial,
                Some(witness) => PatchVerdict::Nontrivial { witness },
            },
            Err(e) => PatchVerdict::Undetermined { reason: e.to_string() },
        };
        out.push(PatchPsi { patch: p.id, verdict });
    }
    let pass = circle_failures.is_empty()
        && out.iter().all(|p| p.verdict == PatchVerdict::Trivial);
    Ok(ExtrationalReport { pass, circle_failures, patches: out })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShearSpectrum {
    pub patch: usize,
    /// Every boundary link length of the completion is a multiple of π/q.
    pub q: u64,
    /// Generator rotations reduced into `[0, π/q)`.
    pub holonomies: Vec<Angle>,
    /// Smallest even multiple of q with every holonomy in (π/q′)ℤ.
    pub q_prime: u64,
}

fn to_u64(b: &BigInt) -> u64 {
    b.to_u64().expect("denominator fits in u64")
}

pub fn shear_spectrum(x: &TriangleComplex, patch: &Patch) -> Result<ShearSpectrum, RationalityError> {
    if patch.boundary.is_empty() {
        return Err(RationalityError::NoBoundary(patch.id));
    }
    let report = psi(x, patch)?;
    if let Some(g) = report.generators.iter().find(|g| !g.psi.is_zero()) {
        return Err(RationalityError::NotExtrational(format!(
            "patch {} has ψ = {} on {:?}",
            patch.id, g.psi, g.kind
        )));
    }
    let lengths: Vec<BigRational> = patch
        .completion_vertices
        .iter()
        .filter(|v| v.on_boundary)
        .map(|v| {
            if !v.link_length.is_pi_commensurable() {
                return Err(RationalityError::NotRational(format!(
                    "boundary link at {} has length {}",
                    x.vertex_name(v.vertex),
                    v.link_length
                )));
            }
            Ok(v.link_length.pi_coeff().clone())
        })
        .collect::<Result<_, _>>()?;
    let q = lcm_of_denominators(&lengths);
    let step = BigRational::new(BigInt::one(), q.clone());
    let holonomies: Vec<BigRational> =
        report.generators.iter().map(|g| g.rotation.pi_coeff_mod(&step)).collect();
    let q_prime = lcm_of_denominators(&holonomies)
        .lcm(&q)
        .lcm(&BigInt::from(2));
    Ok(ShearSpectrum {
        patch: patch.id,
        q: to_u64(&q),
        holonomies: holonomies.into_iter().map(Angle::from_pi).collect(),
        q_prime: to_u64(&q_prime),
    })
}

/// True iff `a` is an integer multiple of π/q.
pub fn in_pi_over(a: &Angle, q: u64) -> bool {
    a.is_pi_commensurable() && (a.pi_coeff() * BigRational::from_integer(BigInt::from(q))).is_integer()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Arrival {
    pub from: String,
    pub offset: f64,
    pub triangle: String,
    pub to: String,
    /// Exact arrival angle from the high end of the target edge.
    pub angle: Option<Angle>,
    pub in_lattice: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropagationReport {
    pub pass: bool,
    pub arrivals: Vec<Arrival>,
    /// Shots that ended at a vertex or ran out of budget.
    pub skipped: usize,
}

/// Shoots perpendicularly from every boundary edge of every patch at the
/// given offset fractions and checks that each shot reaching the patch
/// boundary arrives at an angle in (π/q′)ℤ, with q′ from that patch's shear
/// spectrum.
pub fn perpendicular_propagation(
    x: &TriangleComplex,
    fractions: &[f64],
    budget: f64,
) -> Result<PropagationReport, RationalityError> {
    let mut arrivals = Vec::new();
    let mut skipped = 0;
    let mut seen: Vec<(EdgeId, TriId)> = Vec::new();
    for p in patches(x) {
        if p.boundary.is_empty() {
            continue;
        }
        let q_prime = shear_spectrum(x, &p)?.q_prime;
        for b in &p.boundary {
            if seen.contains(&(b.edge, b.triangle)) {
                continue;
            }
            seen.push((b.edge, b.triangle));
            let len = x.edge(b.edge).length;
            for &f in fractions {
                let paths = shoot_perpendicular(x, b.edge, f * len, b.triangle, budget, &BranchPolicy::Stop)
                    .expect("boundary copy is a valid launch");
                let path = &paths[0];
                let (to, angle) = match &path.status {
                    EndStatus::HitBranchingEdge { edge, angle, .. } => (*edge, angle.exact.clone()),
                    EndStatus::HitBoundary { edge, .. } => {
                        let back = path.end.direction.clone();
                        let crate::geodesic::LinkDirection::Edge { angle_from_hi, .. } = back else {
                            unreachable!("edge ends carry edge directions")
                        };
                        (*edge, angle_from_hi.exact)
                    }
                    _ => {
                        skipped += 1;
                        continue;
                    }
                };
                let in_lattice = angle.as_ref().is_some_and(|a| in_pi_over(a, q_prime));
                arrivals.push(Arrival {
                    from: x.edge_label(b.edge),
                    offset: f * len,
                    triangle: x.triangle_label(b.triangle),
                    to: x.edge_label(to),
                    angle,
                    in_lattice,
                });
            }
        }
    }
    let pass = arrivals.iter().all(|a| a.in_lattice);
    Ok(PropagationReport { pass, arrivals, skipped })
}

/// ψ turning is ±π on every triangle.
pub fn all_triangle_turnings_are_pi(x: &TriangleComplex) -> bool {
    let (pi, neg) = (Angle::pi(), -Angle::pi());
    x.triangle_ids().all(|t| {
        let a = triangle_turning(x, t);
        a == pi || a == neg
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn rationality_examples() {
        assert!(check_rational(&fixtures::theta_circle()).pass);
        assert!(check_rational(&fixtures::book(3)).pass);
        // The cone annulus has atom angles only along path links.
        assert!(check_rational(&fixtures::cone_annulus(6, 0.3)).pass);
    }

    #[test]
    fn atom_angle_on_a_segment_is_reported() {
        // Three pages, each a strip of two triangles from spine PQ to spine
        // PR; the corner at P in the first triangle is an atom.
        let mut b = fixtures::Builder::new();
        b.atom("t", 1.0);
        let (c, s) = (1f64.cos(), 1f64.sin());
        let t = || Angle::atom("t", BigRational::one());
        for k in 0..3 {
            let a = format!("A{k}");
            b.exact(
                ["P", "Q", a.as_str()],
                [t(), Angle::pi_frac(1, 2), Angle::pi_frac(1, 2) - t()],
                [s / c, 1.0 / c, 1.0],
            );
            b.exact(
                ["P", a.as_str(), "R"],
                [Angle::pi_frac(1, 4), Angle::pi_frac(1, 2), Angle::pi_frac(1, 4)],
                [1.0 / c, 2f64.sqrt() / c, 1.0 / c],
            );
        }
        let x = b.build();
        let r = check_rational(&x);
        assert!(!r.pass);
        assert!(r.witnesses.iter().any(|w| w.name == "P" && w.kind == ChainKind::Segment));
        assert!(matches!(check_extrational(&x), Err(RationalityError::NotRational(_))));
    }

    #[test]
    fn circle_components() {
        let hex = circle_link_report(&fixtures::hex_fan());
        assert_eq!(hex.len(), 1);
        assert_eq!(hex[0].name, "O");
        assert_eq!(hex[0].length, Angle::pi_frac(2, 1));
        let fan7 = fixtures::fan(7);
        let r = check_extrational(&fan7).unwrap();
        assert!(!r.pass);
        assert_eq!(r.circle_failures.len(), 1);
        assert_eq!(r.circle_failures[0].length, Angle::pi_frac(7, 3));
        assert!(circle_link_report(&fixtures::book(3)).is_empty());
    }

    #[test]
    fn theta_circle_is_extrational() {
        let x = fixtures::theta_circle();
        let r = check_extrational(&x).unwrap();
        assert!(r.pass);
        for p in patches(&x) {
            let g = psi(&x, &p).unwrap();
            // Core loops (some around interior vertices) plus one cross arc.
            let arcs = g.generators.iter().filter(|g| matches!(g.kind, GeneratorKind::Arc { .. }));
            assert_eq!(arcs.count(), 1);
            assert!(g.trivial);
            let s = shear_spectrum(&x, &p).unwrap();
            assert_eq!(s.q_prime, 2);
            assert!(s.holonomies.iter().all(|h| h.is_zero()));
        }
    }

    #[test]
    fn book_pages_have_trivial_spectrum() {
        let x = fixtures::book(3);
        for p in patches(&x) {
            let r = psi(&x, &p).unwrap();
            assert!(r.generators.is_empty());
            assert_eq!(shear_spectrum(&x, &p).unwrap().q_prime, 2);
        }
    }

    #[test]
    fn cone_annulus_has_holonomy_alpha() {
        let x = fixtures::cone_annulus(6, 0.3);
        let r = check_extrational(&x).unwrap();
        assert!(!r.pass);
        let ps = patches(&x);
        assert_eq!(ps.len(), 1);
        let g = psi(&x, &ps[0]).unwrap();
        let lp = g
            .generators
            .iter()
            .find(|g| matches!(g.kind, GeneratorKind::Loop { .. }))
            .unwrap();
        assert_eq!(lp.psi, Angle::atom("alpha", BigRational::one()));
        assert!(matches!(shear_spectrum(&x, &ps[0]), Err(RationalityError::NotExtrational(_))));
    }

    #[test]
    fn sheared_strip_has_rational_shear() {
        let x = fixtures::sheared_strip();
        let ps = patches(&x);
        assert_eq!(ps.len(), 1);
        let s = shear_spectrum(&x, &ps[0]).unwrap();
        assert_eq!(s.q, 2);
        assert!(s.holonomies.contains(&Angle::pi_frac(1, 3)));
        assert_eq!(s.q_prime, 6);
    }

    #[test]
    fn arc_psi_does_not_depend_on_reference_edges() {
        // Needs rational boundary links, which the cone annulus lacks.
        for x in [fixtures::sheared_strip(), fixtures::theta_circle()] {
            for p in patches(&x) {
                let firsts = first_copy_of_each_component(&p);
                if firsts.len() < 2 {
                    continue;
                }
                let base = psi_arc(&x, &p, firsts[0], firsts[1]).unwrap();
                for (i, a) in p.boundary.iter().enumerate() {
                    for (j, b) in p.boundary.iter().enumerate() {
                        if a.component == 0 && b.component == 1 {
                            assert_eq!(psi_arc(&x, &p, i, j).unwrap(), base);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn triangle_turning_is_pi() {
        for (name, x) in fixtures::corpus() {
            assert!(all_triangle_turnings_are_pi(&x), "{name}");
        }
    }

    #[test]
    fn perpendicular_shots_stay_perpendicular() {
        let x = fixtures::theta_circle();
        let r = perpendicular_propagation(&x, &[0.25, 0.5, 0.75], 10.0).unwrap();
        assert!(r.pass);
        let copies: usize = patches(&x).iter().map(|p| p.boundary.len()).sum();
        assert_eq!(r.arrivals.len(), 3 * copies);
        assert!(r.arrivals.iter().all(|a| a.angle == Some(Angle::pi_frac(1, 2))));
        assert_eq!(r.skipped, 0);
    }
}
