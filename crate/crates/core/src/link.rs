//! Metric link graphs at vertices and at edge-interior points.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::angle::{Angle, AngleValue, AtomEnv};
use crate::complex::{EdgeId, TriId, TriangleComplex, VertexId};
use crate::error::ComplexError;

/// Numeric tolerance for comparisons that cannot be decided exactly.
pub const LINK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LinkSite {
    Vertex(VertexId),
    /// An interior point of the edge.
    EdgePoint(EdgeId),
}

/// A direction along an edge of the complex. At an edge point, `toward` is
/// the endpoint of the edge the direction points to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LinkNode {
    pub edge: EdgeId,
    pub toward: VertexId,
}

/// One triangle corner at the site. Positions along the arc are measured
/// from `ends[0]`; at a vertex, `ends[0]` is the side toward the next corner
/// in the triangle's vertex order, so positions increase counterclockwise in
/// the triangle frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkArc {
    pub ends: [usize; 2],
    pub triangle: TriId,
    /// Corner index at a vertex site; side index at an edge point.
    pub slot: usize,
    pub length: Angle,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkGraph {
    pub site: LinkSite,
    pub nodes: Vec<LinkNode>,
    pub arcs: Vec<LinkArc>,
    #[serde(skip)]
    env: AtomEnv,
    #[serde(skip)]
    incident: Vec<Vec<usize>>,
}

pub fn link_of_vertex(x: &TriangleComplex, v: VertexId) -> Result<LinkGraph, ComplexError> {
    if v.0 >= x.vertex_count() {
        return Err(ComplexError::UnknownVertex(v.to_string()));
    }
    let nodes: Vec<LinkNode> = x
        .edges_at(v)
        .iter()
        .map(|&e| LinkNode { edge: e, toward: x.edge(e).other_end(v) })
        .collect();
    let node_of = |e: EdgeId| nodes.iter().position(|n| n.edge == e).unwrap();
    let arcs = x
        .corners_at(v)
        .iter()
        .map(|&(t, c)| {
            let tri = x.triangle(t);
            // Edge to corner c+1 is opposite corner c+2, and vice versa.
            let first = tri.edges[(c + 2) % 3];
            let second = tri.edges[(c + 1) % 3];
            LinkArc {
                ends: [node_of(first), node_of(second)],
                triangle: t,
                slot: c,
                length: tri.angles[c].clone(),
                value: tri.angle_values[c],
            }
        })
        .collect();
    Ok(LinkGraph::new(LinkSite::Vertex(v), nodes, arcs, x.atom_env().clone()))
}

/// Link at an interior point of `e`: node 0 points to the low end, node 1 to
/// the high end, and each incident triangle contributes an arc of length π.
pub fn link_of_edge_point(x: &TriangleComplex, e: EdgeId) -> Result<LinkGraph, ComplexError> {
    x.check_edge(e)?;
    let ed = x.edge(e);
    let nodes = vec![
        LinkNode { edge: e, toward: ed.ends[0] },
        LinkNode { edge: e, toward: ed.ends[1] },
    ];
    let arcs = ed
        .triangles
        .iter()
        .map(|&(t, j)| LinkArc {
            ends: [0, 1],
            triangle: t,
            slot: j,
            length: Angle::pi(),
            value: std::f64::consts::PI,
        })
        .collect();
    Ok(LinkGraph::new(LinkSite::EdgePoint(e), nodes, arcs, x.atom_env().clone()))
}

/// Shortest cycle of a link.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Girth {
    /// `None` for forests.
    pub length: Option<Angle>,
    pub value: f64,
    pub cycle: Vec<usize>,
}

impl Girth {
    /// Exact test `girth ≥ 2π` (vacuous for forests).
    pub fn at_least_two_pi(&self, env: &AtomEnv) -> bool {
        match &self.length {
            None => true,
            Some(l) => l.cmp_with(&Angle::pi_frac(2, 1), env) != Ordering::Less,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainKind {
    /// Between nodes of degree at least 3 (possibly the same node).
    Segment,
    /// A whole circle component.
    Cycle,
    /// One end has degree 1.
    Hair,
    /// A whole path component.
    Path,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Chain {
    pub kind: ChainKind,
    pub nodes: Vec<usize>,
    pub arcs: Vec<usize>,
    pub length: Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub chains: Vec<Chain>,
    pub isolated_nodes: Vec<usize>,
}

impl Decomposition {
    pub fn count(&self, kind: ChainKind) -> usize {
        self.chains.iter().filter(|c| c.kind == kind).count()
    }
}

/// A wedge decomposition at node `y` of a 2π circle and a clover based at `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Unfoldable {
    pub y: usize,
    pub cycle_arcs: Vec<usize>,
    pub cycle_nodes: Vec<usize>,
    pub clover_arcs: Vec<usize>,
}

/// A point of a link: a node or a position along an arc measured from the
/// arc's first end.
#[derive(Clone, Debug, PartialEq)]
pub enum LinkPoint {
    Node(usize),
    OnArc { arc: usize, offset: AngleValue },
}

impl LinkGraph {
    fn new(site: LinkSite, nodes: Vec<LinkNode>, arcs: Vec<LinkArc>, env: AtomEnv) -> Self {
        let mut incident = vec![Vec::new(); nodes.len()];
        for (i, a) in arcs.iter().enumerate() {
            incident[a.ends[0]].push(i);
            incident[a.ends[1]].push(i);
        }
        LinkGraph { site, nodes, arcs, env, incident }
    }

    pub fn env(&self) -> &AtomEnv {
        &self.env
    }

    pub fn degree(&self, n: usize) -> usize {
        self.incident[n].len()
    }

    pub fn incident(&self, n: usize) -> &[usize] {
        &self.incident[n]
    }

    pub fn node_of_edge(&self, e: EdgeId) -> Option<usize> {
        self.nodes.iter().position(|n| n.edge == e)
    }

    pub fn arc_of_triangle(&self, t: TriId) -> Option<usize> {
        self.arcs.iter().position(|a| a.triangle == t)
    }

    fn other(&self, arc: usize, n: usize) -> usize {
        let e = self.arcs[arc].ends;
        if e[0] == n {
            e[1]
        } else {
            e[0]
        }
    }

    pub fn total_length(&self) -> Angle {
        self.arcs.iter().fold(Angle::zero(), |acc, a| acc + &a.length)
    }

    /// Exact shortest distances from `src` avoiding `skip`, restricted to
    /// arcs accepted by `keep`.
    fn dijkstra(
        &self,
        src: &[(usize, Angle)],
        skip: Option<usize>,
        keep: &dyn Fn(usize) -> bool,
    ) -> Vec<Option<(Angle, Option<usize>)>> {
        let n = self.nodes.len();
        let mut dist: Vec<Option<(Angle, Option<usize>)>> = vec![None; n];
        let mut done = vec![false; n];
        for (node, d) in src {
            let better = match &dist[*node] {
                None => true,
                Some((cur, _)) => d.cmp_with(cur, &self.env) == Ordering::Less,
            };
            if better {
                dist[*node] = Some((d.clone(), None));
            }
        }
        loop {
            let mut best: Option<usize> = None;
            for i in 0..n {
                if done[i] {
                    continue;
                }
                if let Some((d, _)) = &dist[i] {
                    let take = match best {
                        None => true,
                        Some(b) => {
                            d.cmp_with(&dist[b].as_ref().unwrap().0, &self.env) == Ordering::Less
                        }
                    };
                    if take {
                        best = Some(i);
                    }
                }
            }
            let Some(u) = best else { break };
            done[u] = true;
            let du = dist[u].as_ref().unwrap().0.clone();
            for &a in &self.incident[u] {
                if Some(a) == skip || !keep(a) {
                    continue;
                }
                let w = self.other(a, u);
                let nd = &du + &self.arcs[a].length;
                let better = match &dist[w] {
                    None => true,
                    Some((cur, _)) => nd.cmp_with(cur, &self.env) == Ordering::Less,
                };
                if better && !done[w] {
                    dist[w] = Some((nd, Some(a)));
                }
            }
        }
        dist
    }

    pub fn girth(&self) -> Girth {
        let mut best: Option<(Angle, Vec<usize>)> = None;
        for (i, a) in self.arcs.iter().enumerate() {
            let [u, v] = a.ends;
            let dist = self.dijkstra(&[(u, Angle::zero())], Some(i), &|_| true);
            let Some((d, _)) = &dist[v] else { continue };
            let len = d + &a.length;
            if let Some((b, _)) = &best {
                if len.cmp_with(b, &self.env) != Ordering::Less {
                    continue;
                }
            }
            let mut cycle = vec![i];
            let mut w = v;
            while let Some((_, Some(p))) = &dist[w] {
                cycle.push(*p);
                w = self.other(*p, w);
            }
            cycle.sort();
            best = Some((len, cycle));
        }
        match best {
            None => Girth { length: None, value: f64::INFINITY, cycle: Vec::new() },
            Some((l, cycle)) => {
                let value = l.numeric(&self.env).unwrap_or(f64::NAN);
                Girth { length: Some(l), value, cycle }
            }
        }
    }

    /// Maximal chains through degree-2 nodes, relative to the given set of
    /// extra branch nodes, restricted to the arcs accepted by `keep`.
    fn chains(&self, extra: &[usize], keep: &dyn Fn(usize) -> bool) -> Decomposition {
        let deg: Vec<usize> =
            (0..self.nodes.len()).map(|n| self.incident[n].iter().filter(|&&a| keep(a)).count()).collect();
        let is_branch = |n: usize| deg[n] != 2 || extra.contains(&n);
        let mut used = vec![false; self.arcs.len()];
        let mut chains = Vec::new();
        let walk = |start: usize, first: usize, used: &mut Vec<bool>| {
            let mut nodes = vec![start];
            let mut arcs = Vec::new();
            let (mut at, mut arc) = (start, first);
            loop {
                used[arc] = true;
                arcs.push(arc);
                at = self.other(arc, at);
                nodes.push(at);
                if is_branch(at) || at == start {
                    break;
                }
                match self.incident[at].iter().find(|&&a| keep(a) && !used[a]) {
                    Some(&a) => arc = a,
                    None => break,
                }
            }
            (nodes, arcs)
        };
        for n in 0..self.nodes.len() {
            if !is_branch(n) {
                continue;
            }
            for &a in &self.incident[n] {
                if !keep(a) || used[a] {
                    continue;
                }
                let (nodes, arcs) = walk(n, a, &mut used);
                let (s, t) = (nodes[0], *nodes.last().unwrap());
                let kind = match (deg[s] == 1, deg[t] == 1) {
                    (true, true) => ChainKind::Path,
                    (false, false) => ChainKind::Segment,
                    _ => ChainKind::Hair,
                };
                let length = arcs.iter().fold(Angle::zero(), |acc, &i| acc + &self.arcs[i].length);
                chains.push(Chain { kind, nodes, arcs, length });
            }
        }
        for a in 0..self.arcs.len() {
            if !keep(a) || used[a] {
                continue;
            }
            let start = self.arcs[a].ends[0];
            let (nodes, arcs) = walk(start, a, &mut used);
            let length = arcs.iter().fold(Angle::zero(), |acc, &i| acc + &self.arcs[i].length);
            chains.push(Chain { kind: ChainKind::Cycle, nodes, arcs, length });
        }
        let isolated_nodes =
            (0..self.nodes.len()).filter(|&n| self.incident[n].is_empty() && !extra.contains(&n)).collect();
        Decomposition { chains, isolated_nodes }
    }

    pub fn decompose(&self) -> Decomposition {
        self.chains(&[], &|_| true)
    }

    fn is_clover_at(&self, b: usize, keep: &dyn Fn(usize) -> bool) -> bool {
        let d = self.chains(&[b], keep);
        if !d.isolated_nodes.is_empty() {
            return false;
        }
        let pi = Angle::pi();
        let two_pi = Angle::pi_frac(2, 1);
        let mut strands = 0;
        let mut tips: BTreeSet<usize> = BTreeSet::new();
        for c in &d.chains {
            let (s, t) = (c.nodes[0], *c.nodes.last().unwrap());
            if c.kind == ChainKind::Cycle || (s != b && t != b) {
                return false;
            }
            if s == b && t == b {
                if c.length != two_pi {
                    return false;
                }
                strands += 2;
            } else {
                if c.length != pi {
                    return false;
                }
                strands += 1;
                tips.insert(if s == b { t } else { s });
            }
        }
        let deg_keep = |n: usize| self.incident[n].iter().filter(|&&a| keep(a)).count();
        strands >= 2 && tips.iter().all(|&t| deg_keep(t) >= 2)
    }

    /// Basepoint of a clover structure, smallest node id first.
    pub fn classify_clover(&self) -> Option<usize> {
        (0..self.nodes.len()).find(|&b| self.is_clover_at(b, &|_| true))
    }

    pub fn find_unfoldable(&self) -> Option<Unfoldable> {
        if self.arcs.is_empty() || (0..self.nodes.len()).any(|n| self.degree(n) == 0) {
            return None;
        }
        let two_pi = Angle::pi_frac(2, 1);
        for y in 0..self.nodes.len() {
            let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
            for comp in self.components_without(y) {
                let arcs: BTreeSet<usize> =
                    comp.iter().flat_map(|&n| self.incident[n].iter().copied()).collect();
                let to_y = arcs.iter().filter(|&&a| self.arcs[a].ends.contains(&y)).count();
                if to_y != 2 || comp.iter().any(|&n| self.degree(n) != 2) {
                    continue;
                }
                let len = arcs.iter().fold(Angle::zero(), |acc, &a| acc + &self.arcs[a].length);
                if len != two_pi {
                    continue;
                }
                let arcs: Vec<usize> = arcs.into_iter().collect();
                if arcs.len() == self.arcs.len() {
                    continue;
                }
                if !self.is_clover_at(y, &|a| arcs.binary_search(&a).is_err()) {
                    continue;
                }
                let mut nodes = comp.clone();
                nodes.push(y);
                nodes.sort();
                candidates.push((arcs, nodes));
            }
            if let Some((arcs, nodes)) = candidates.into_iter().min() {
                let clover_arcs =
                    (0..self.arcs.len()).filter(|a| arcs.binary_search(a).is_err()).collect();
                return Some(Unfoldable { y, cycle_arcs: arcs, cycle_nodes: nodes, clover_arcs });
            }
        }
        None
    }

    /// Node sets of the connected components of the graph with `y` removed.
    fn components_without(&self, y: usize) -> Vec<Vec<usize>> {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        seen[y] = true;
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                for &a in &self.incident[u] {
                    let w = self.other(a, u);
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    fn attach(&self, p: &LinkPoint) -> Vec<(usize, AngleValue)> {
        match p {
            LinkPoint::Node(n) => vec![(*n, AngleValue { exact: Some(Angle::zero()), value: 0.0 })],
            LinkPoint::OnArc { arc, offset } => {
                let a = &self.arcs[*arc];
                let len = AngleValue { exact: Some(a.length.clone()), value: a.value };
                vec![(a.ends[0], offset.clone()), (a.ends[1], len.sub(offset))]
            }
        }
    }

    /// Path-metric distance between two points of the link; `None` when they
    /// lie in different components.
    pub fn distance(&self, p: &LinkPoint, q: &LinkPoint) -> Option<AngleValue> {
        let src = self.attach(p);
        let dst = self.attach(q);
        let mut best: Option<AngleValue> = None;
        let offer = |c: AngleValue, best: &mut Option<AngleValue>| {
            let take = match best {
                None => true,
                Some(b) => c.cmp_with(b, &self.env, LINK_TOL) == Ordering::Less,
            };
            if take {
                *best = Some(c);
            }
        };
        if let (LinkPoint::OnArc { arc: a1, offset: o1 }, LinkPoint::OnArc { arc: a2, offset: o2 }) =
            (p, q)
        {
            if a1 == a2 {
                let d = o1.sub(o2);
                let d = if d.value < 0.0 { d.neg() } else { d };
                offer(d, &mut best);
            }
        }
        let n = self.nodes.len();
        // Dijkstra over AngleValue distances.
        let mut dist: Vec<Option<AngleValue>> = vec![None; n];
        for (node, d) in src {
            let better = match &dist[node] {
                None => true,
                Some(cur) => d.cmp_with(cur, &self.env, LINK_TOL) == Ordering::Less,
            };
            if better {
                dist[node] = Some(d);
            }
        }
        let mut done = vec![false; n];
        loop {
            let mut pick: Option<usize> = None;
            for i in 0..n {
                if done[i] || dist[i].is_none() {
                    continue;
                }
                let take = match pick {
                    None => true,
                    Some(b) => {
                        dist[i].as_ref().unwrap().cmp_with(
                            dist[b].as_ref().unwrap(),
                            &self.env,
                            LINK_TOL,
                        ) == Ordering::Less
                    }
                };
                if take {
                    pick = Some(i);
                }
            }
            let Some(u) = pick else { break };
            done[u] = true;
            let du = dist[u].clone().unwrap();
            for &a in &self.incident[u] {
                let w = self.other(a, u);
                let arc = &self.arcs[a];
                let nd = du.add(&AngleValue { exact: Some(arc.length.clone()), value: arc.value });
                let better = match &dist[w] {
                    None => true,
                    Some(cur) => nd.cmp_with(cur, &self.env, LINK_TOL) == Ordering::Less,
                };
                if better && !done[w] {
                    dist[w] = Some(nd);
                }
            }
        }
        for (node, d) in dst {
            if let Some(dn) = &dist[node] {
                offer(dn.add(&d), &mut best);
            }
        }
        best
    }
}

/// Girth of the link at every vertex.
pub fn vertex_girths(x: &TriangleComplex) -> Vec<(VertexId, Girth)> {
    use rayon::prelude::*;
    let vs: Vec<VertexId> = x.vertices().collect();
    vs.par_iter()
        .map(|&v| (v, link_of_vertex(x, v).expect("vertex exists").girth()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn vlink(x: &TriangleComplex, name: &str) -> LinkGraph {
        link_of_vertex(x, x.vertex_by_name(name).unwrap()).unwrap()
    }

    #[test]
    fn corner_link_of_square() {
        let x = fixtures::flat_square();
        let l = vlink(&x, "B");
        assert_eq!(l.nodes.len(), 2);
        assert_eq!(l.arcs.len(), 1);
        assert_eq!(l.arcs[0].length, Angle::pi_frac(1, 2));
        assert_eq!(l.girth().length, None);
    }

    #[test]
    fn fan_girths() {
        assert_eq!(vlink(&fixtures::hex_fan(), "O").girth().length, Some(Angle::pi_frac(2, 1)));
        assert_eq!(vlink(&fixtures::fan(5), "O").girth().length, Some(Angle::pi_frac(5, 3)));
        assert_eq!(vlink(&fixtures::fan(7), "O").girth().length, Some(Angle::pi_frac(7, 3)));
    }

    #[test]
    fn edge_point_links() {
        let x = fixtures::book(3);
        let l = link_of_edge_point(&x, x.parse_edge("P:Q").unwrap()).unwrap();
        assert_eq!((l.nodes.len(), l.arcs.len()), (2, 3));
        assert!(l.arcs.iter().all(|a| a.length == Angle::pi()));
        assert_eq!(l.girth().length, Some(Angle::pi_frac(2, 1)));
        let l = link_of_edge_point(&x, x.parse_edge("P:A1").unwrap()).unwrap();
        assert_eq!(l.arcs.len(), 1);
        assert_eq!(l.girth().length, None);
    }

    #[test]
    fn theta_circle_links_have_girth_two_pi() {
        let x = fixtures::theta_circle();
        for (_, g) in vertex_girths(&x) {
            assert_eq!(g.length, Some(Angle::pi_frac(2, 1)));
        }
    }

    #[test]
    fn circle_decomposes_to_one_cycle() {
        let d = vlink(&fixtures::hex_fan(), "O").decompose();
        assert_eq!(d.chains.len(), 1);
        assert_eq!(d.chains[0].kind, ChainKind::Cycle);
        assert_eq!(d.chains[0].length, Angle::pi_frac(2, 1));
    }

    #[test]
    fn theta_link_gives_three_segments() {
        let x = fixtures::book(3);
        let l = link_of_edge_point(&x, x.parse_edge("P:Q").unwrap()).unwrap();
        let d = l.decompose();
        assert_eq!(d.count(ChainKind::Segment), 3);
        assert_eq!(d.chains.len(), 3);
    }

    #[test]
    fn clover_examples() {
        // Circle through the basepoint.
        assert!(vlink(&fixtures::hex_fan(), "O").classify_clover().is_some());
        // Theta link of an edge point: three strands of length π.
        let x = fixtures::book(3);
        let l = link_of_edge_point(&x, x.parse_edge("P:Q").unwrap()).unwrap();
        assert!(l.classify_clover().is_some());
        // Strand of length π/2.
        assert!(vlink(&fixtures::flat_square(), "B").classify_clover().is_none());
        // Four strands, tips identified in pairs: three hexagons minus one.
        let x = fixtures::two_hex_fans();
        let l = vlink(&x, "v");
        assert_eq!(l.classify_clover(), l.node_of_edge(x.parse_edge("v:w").unwrap()));
    }

    #[test]
    fn unfoldable_wedge_of_two_circles() {
        let x = fixtures::two_hex_fans();
        let l = vlink(&x, "v");
        let u = l.find_unfoldable().unwrap();
        assert_eq!(Some(u.y), l.node_of_edge(x.parse_edge("v:w").unwrap()));
        assert_eq!(u.cycle_arcs.len(), 6);
        assert_eq!(u.clover_arcs.len(), 6);
    }

    #[test]
    fn hex_with_theta_clover_is_unfoldable() {
        let x = fixtures::hex_with_theta_clover();
        let l = vlink(&x, "v");
        let u = l.find_unfoldable().unwrap();
        assert_eq!(u.cycle_arcs.len(), 6);
        assert_eq!(u.clover_arcs.len(), 9);
        let cycle_tris: BTreeSet<TriId> = u.cycle_arcs.iter().map(|&a| l.arcs[a].triangle).collect();
        assert!(cycle_tris.iter().all(|&t| x.triangle_label(t).contains('r')));
    }

    #[test]
    fn theta_circle_vertex_links_are_not_unfoldable() {
        let x = fixtures::theta_circle();
        for v in x.vertices() {
            assert!(link_of_vertex(&x, v).unwrap().find_unfoldable().is_none());
        }
    }

    #[test]
    fn link_distance_across_corner_arcs() {
        let x = fixtures::hex_fan();
        let l = vlink(&x, "O");
        let n0 = LinkPoint::Node(0);
        let far = (0..l.nodes.len())
            .map(|n| l.distance(&n0, &LinkPoint::Node(n)).unwrap())
            .max_by(|a, b| a.value.total_cmp(&b.value))
            .unwrap();
        assert_eq!(far.exact, Some(Angle::pi()));
        let env = x.atom_env();
        let half = AngleValue::exact(Angle::pi_frac(1, 6), env).unwrap();
        let p = LinkPoint::OnArc { arc: 0, offset: half.clone() };
        let q = LinkPoint::OnArc { arc: 0, offset: AngleValue::exact(Angle::pi_frac(1, 12), env).unwrap() };
        assert_eq!(l.distance(&p, &q).unwrap().exact, Some(Angle::pi_frac(1, 12)));
    }

    #[test]
    fn arc_lengths_sum_to_corner_angles() {
        for (_, x) in fixtures::corpus() {
            for v in x.vertices() {
                let l = link_of_vertex(&x, v).unwrap();
                let want = x
                    .corners_at(v)
                    .iter()
                    .fold(Angle::zero(), |acc, &(t, c)| acc + &x.triangle(t).angles[c]);
                assert_eq!(l.total_length(), want);
            }
        }
    }
}
