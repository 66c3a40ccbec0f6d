//! SVG pictures of links, patch developments and traced geodesics. Nothing
//! here feeds back into the analysis.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write;

use flatfold_core::geom::{glue_frame, Affine2, Point};
use flatfold_core::link::link_of_vertex;
use flatfold_core::{GeodesicPath, Patch, TriId, TriangleComplex};

const PANEL: f64 = 220.0;
const MARGIN: f64 = 20.0;

struct Panel {
    title: String,
    polys: Vec<Vec<Point>>,
    lines: Vec<Vec<Point>>,
    dots: Vec<(Point, String)>,
}

fn bounds(p: &Panel) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let all = p.polys.iter().chain(&p.lines).flatten().chain(p.dots.iter().map(|d| &d.0));
    for q in all {
        for k in 0..2 {
            lo[k] = lo[k].min(q[k]);
            hi[k] = hi[k].max(q[k]);
        }
    }
    if !lo[0].is_finite() {
        return ([0.0, 0.0], [1.0, 1.0]);
    }
    (lo, hi)
}

fn fmt_pts(pts: &[Point], map: &dyn Fn(Point) -> Point) -> String {
    pts.iter()
        .map(|&q| {
            let m = map(q);
            format!("{:.2},{:.2}", m[0], m[1])
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn document(panels: &[Panel]) -> String {
    let cols = panels.len().clamp(1, 4);
    let rows = panels.len().div_ceil(cols).max(1);
    let (w, h) = (cols as f64 * PANEL, rows as f64 * (PANEL + MARGIN));
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="9">"#
    );
    for (i, p) in panels.iter().enumerate() {
        let (ox, oy) = ((i % cols) as f64 * PANEL, (i / cols) as f64 * (PANEL + MARGIN));
        let (lo, hi) = bounds(p);
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let k = (PANEL - 2.0 * MARGIN) / span;
        let map = move |q: Point| [ox + MARGIN + (q[0] - lo[0]) * k, oy + PANEL - MARGIN - (q[1] - lo[1]) * k];
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, ox + MARGIN, oy + 12.0, p.title);
        for poly in &p.polys {
            let _ = writeln!(
                s,
                r##"<polygon points="{}" fill="#dde8f4" stroke="#4a6a8a" stroke-width="0.8"/>"##,
                fmt_pts(poly, &map)
            );
        }
        for line in &p.lines {
            let _ = writeln!(
                s,
                r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##,
                fmt_pts(line, &map)
            );
        }
        for (q, label) in &p.dots {
            let m = map(*q);
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5"/>"#, m[0], m[1]);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, m[0] + 3.0, m[1] - 3.0, label);
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Vertex links with nodes on a circle; parallel arcs bow apart.
pub fn links_svg(x: &TriangleComplex) -> String {
    let panels: Vec<Panel> = x
        .vertices()
        .map(|v| {
            let l = link_of_vertex(x, v).expect("vertex exists");
            let n = l.nodes.len().max(1);
            let at = |i: usize| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                [t.cos(), t.sin()]
            };
            let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            let lines = l
                .arcs
                .iter()
                .map(|a| {
                    let key = (a.ends[0].min(a.ends[1]), a.ends[0].max(a.ends[1]));
                    let k = seen.entry(key).or_insert(0);
                    *k += 1;
                    let (p, q) = (at(a.ends[0]), at(a.ends[1]));
                    let mid = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
                    let bow = 0.15 * (*k as f64 - 1.0);
                    let normal = [-(q[1] - p[1]), q[0] - p[0]];
                    vec![p, [mid[0] + bow * normal[0], mid[1] + bow * normal[1]], q]
                })
                .collect();
            let dots = l
                .nodes
                .iter()
                .enumerate()
                .map(|(i, nd)| (at(i), x.vertex_name(nd.toward).to_string()))
                .collect();
            Panel { title: format!("link of {}", x.vertex_name(v)), polys: vec![], lines, dots }
        })
        .collect();
    document(&panels)
}

fn triangle_poly(x: &TriangleComplex, t: TriId, f: &Affine2) -> Vec<Point> {
    x.triangle(t).local_coords().iter().map(|&q| f.apply(q)).collect()
}

/// Develops each patch along a spanning tree of its interior edges.
pub fn patches_svg(x: &TriangleComplex, patches: &[Patch]) -> String {
    let panels: Vec<Panel> = patches
        .iter()
        .map(|p| {
            let mut frames: BTreeMap<TriId, Affine2> = BTreeMap::new();
            let first = p.triangles[0];
            frames.insert(first, Affine2::identity());
            let mut queue = VecDeque::from([first]);
            while let Some(t) = queue.pop_front() {
                for &e in &p.interior_edges {
                    let ts: Vec<TriId> = x.edge(e).triangles.iter().map(|c| c.0).collect();
                    if !ts.contains(&t) {
                        continue;
                    }
                    for &u in &ts {
                        if !frames.contains_key(&u) {
                            let f = glue_frame(x, t, &frames[&t], u, e);
                            frames.insert(u, f);
                            queue.push_back(u);
                        }
                    }
                }
            }
            let polys = frames.iter().map(|(&t, f)| triangle_poly(x, t, f)).collect();
            Panel { title: format!("patch {}", p.id), polys, lines: vec![], dots: vec![] }
        })
        .collect();
    document(&panels)
}

/// Each traced path drawn over the triangles it develops through.
pub fn paths_svg(x: &TriangleComplex, paths: &[GeodesicPath]) -> String {
    let panels: Vec<Panel> = paths
        .iter()
        .enumerate()
        .map(|(i, p)| Panel {
            title: format!("path {i}, length {:.6}", p.length),
            polys: p.segments.iter().map(|s| triangle_poly(x, s.triangle, &s.frame)).collect(),
            lines: vec![p.development()],
            dots: vec![],
        })
        .collect();
    document(&panels)
}
