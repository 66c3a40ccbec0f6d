//! Generators for the reference complexes used by tests, benches and the
//! bundled corpus.

use std::f64::consts::PI;

use crate::angle::{ratio, Angle, AtomEnv};
use crate::complex::{ComplexDoc, FreeEdgeDoc, TriangleComplex, TriangleDoc};

/// Best rational approximation of `x` with denominator at most `max_den`,
/// accepted only if it is within `1e-9`.
fn rationalize(x: f64, max_den: i64) -> Option<(i64, i64)> {
    (1..=max_den).find_map(|d| {
        let n = (x * d as f64).round();
        ((x - n / d as f64).abs() < 1e-9).then_some((n as i64, d))
    })
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn corner_angle(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let u = [a[0] - p[0], a[1] - p[1]];
    let v = [b[0] - p[0], b[1] - p[1]];
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    cross.abs().atan2(dot)
}

/// Incremental document builder.
#[derive(Default, Clone)]
pub struct Builder {
    doc: ComplexDoc,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn atom(&mut self, name: &str, value: f64) -> &mut Self {
        self.doc.atoms.insert(name.to_string(), value);
        self
    }

    pub fn vertex(&mut self, name: &str) -> &mut Self {
        if !self.doc.vertices.iter().any(|v| v == name) {
            self.doc.vertices.push(name.to_string());
        }
        self
    }

    /// Adds a triangle from planar coordinates; corner angles must be
    /// rational multiples of π with small denominators.
    pub fn planar(&mut self, v: [&str; 3], p: [[f64; 2]; 3]) -> &mut Self {
        let sides = [dist(p[1], p[2]), dist(p[0], p[2]), dist(p[0], p[1])];
        let raw = [
            corner_angle(p[0], p[1], p[2]),
            corner_angle(p[1], p[0], p[2]),
            corner_angle(p[2], p[0], p[1]),
        ];
        let mut angles: Vec<Angle> = raw[..2]
            .iter()
            .map(|&a| {
                let (n, d) = rationalize(a / PI, 120)
                    .unwrap_or_else(|| panic!("angle {a} is not a small rational multiple of π"));
                Angle::pi_frac(n, d)
            })
            .collect();
        let third = &Angle::pi() - &(&angles[0] + &angles[1]);
        assert!((third.numeric(&AtomEnv::new()).unwrap() - raw[2]).abs() < 1e-9);
        angles.push(third);
        let angles: [Angle; 3] = angles.try_into().unwrap();
        self.exact(v, angles, sides)
    }

    pub fn exact(&mut self, v: [&str; 3], angles: [Angle; 3], sides: [f64; 3]) -> &mut Self {
        for n in v {
            self.vertex(n);
        }
        self.doc.triangles.push(TriangleDoc { v: v.map(String::from), angles, sides });
        self
    }

    pub fn free_edge(&mut self, a: &str, b: &str, length: f64) -> &mut Self {
        self.vertex(a).vertex(b);
        self.doc.edges.push(FreeEdgeDoc { v: [a.to_string(), b.to_string()], length });
        self
    }

    pub fn doc(&self) -> ComplexDoc {
        self.doc.clone()
    }

    pub fn build(&self) -> TriangleComplex {
        TriangleComplex::from_doc(self.doc.clone()).expect("fixture must validate")
    }
}

fn equilateral() -> [Angle; 3] {
    [Angle::pi_frac(1, 3), Angle::pi_frac(1, 3), Angle::pi_frac(1, 3)]
}

pub fn single_triangle() -> TriangleComplex {
    Builder::new().exact(["A", "B", "C"], equilateral(), [1.0; 3]).build()
}

/// The unit square `A(0,0) B(1,0) C(1,1) D(0,1)` split along `AC`.
pub fn flat_square() -> TriangleComplex {
    let (a, b, c, d) = ([0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]);
    Builder::new()
        .planar(["A", "B", "C"], [a, b, c])
        .planar(["A", "C", "D"], [a, c, d])
        .build()
}

/// `n` unit-square pages glued along the spine `PQ`. Page `k` has outer
/// vertices `Ak` (beside `P`) and `Bk` (beside `Q`) and is split along `P Bk`.
pub fn book(n: usize) -> TriangleComplex {
    book_builder(n).build()
}

fn book_builder(n: usize) -> Builder {
    let (p, q, a, b) = ([0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]);
    let mut bld = Builder::new();
    bld.vertex("P").vertex("Q");
    for k in 1..=n {
        let (ak, bk) = (format!("A{k}"), format!("B{k}"));
        bld.planar(["P", &ak, &bk], [p, a, b]).planar(["P", &bk, "Q"], [p, b, q]);
    }
    bld
}

/// Theta graph times a circle.
///
/// The theta graph has branch vertices `u`, `v` and three arcs `x`, `y`, `z`,
/// each of length 2 with midpoint `mx`, `my`, `mz`; the circle has three unit
/// arcs `s0 s1 s2`. Vertex `(a, sk)` is named `a` followed by `k`. Each unit
/// square `(a,b)×(sk,sk+1)` is split along `(a,sk)-(b,sk+1)`.
pub fn theta_circle() -> TriangleComplex {
    let mut bld = Builder::new();
    for base in THETA_VERTICES {
        for k in 0..3 {
            bld.vertex(&format!("{base}{k}"));
        }
    }
    for (a, b) in THETA_EDGES {
        for k in 0..3 {
            let k1 = (k + 1) % 3;
            let (ak, bk, bk1, ak1) =
                (format!("{a}{k}"), format!("{b}{k}"), format!("{b}{k1}"), format!("{a}{k1}"));
            bld.planar([&ak, &bk, &bk1], [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
            bld.planar([&ak, &bk1, &ak1], [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        }
    }
    bld.build()
}

pub const THETA_VERTICES: [&str; 5] = ["u", "v", "mx", "my", "mz"];
pub const THETA_EDGES: [(&str, &str); 6] =
    [("u", "mx"), ("mx", "v"), ("u", "my"), ("my", "v"), ("u", "mz"), ("mz", "v")];

/// `n` equilateral unit triangles around the vertex `O`, closed up into a
/// disc (cone angle `n·π/3`). Rim vertices are `R0..R{n-1}`.
pub fn fan(n: usize) -> TriangleComplex {
    let mut bld = Builder::new();
    add_fan(&mut bld, "O", &rim_names("R", n, None), FanShape::Equilateral);
    bld.build()
}

pub fn hex_fan() -> TriangleComplex {
    fan(6)
}

#[derive(Clone, Copy)]
enum FanShape {
    Equilateral,
    /// Right isosceles triangles with unit legs, right angle at the centre.
    Square,
}

fn rim_names(prefix: &str, n: usize, shared: Option<&str>) -> Vec<String> {
    (0..n)
        .map(|k| match (k, shared) {
            (0, Some(s)) => s.to_string(),
            _ => format!("{prefix}{k}"),
        })
        .collect()
}

fn add_fan(bld: &mut Builder, centre: &str, rim: &[String], shape: FanShape) {
    let n = rim.len();
    for k in 0..n {
        let (a, b) = (&rim[k], &rim[(k + 1) % n]);
        match shape {
            FanShape::Equilateral => bld.exact([centre, a, b], equilateral(), [1.0; 3]),
            FanShape::Square => bld.exact(
                [centre, a, b],
                [Angle::pi_frac(1, 2), Angle::pi_frac(1, 4), Angle::pi_frac(1, 4)],
                [2f64.sqrt(), 1.0, 1.0],
            ),
        };
    }
}

/// Open fan of `k` equilateral triangles at `centre` from spoke `from` to
/// spoke `to` through new rim vertices.
fn add_open_fan(bld: &mut Builder, centre: &str, from: &str, to: &str, k: usize, prefix: &str) {
    let mut rim = vec![from.to_string()];
    rim.extend((1..k).map(|i| format!("{prefix}{i}")));
    rim.push(to.to_string());
    for w in rim.windows(2) {
        bld.exact([centre, &w[0], &w[1]], equilateral(), [1.0; 3]);
    }
}

/// Annulus of `n` sectors around a removed cone point of total angle
/// `2π + α`: inner radius 1, outer radius 2. Each isosceles trapezoid
/// `Ik Ik+1 Ok+1 Ok` is split along `Ik Ok+1`; the angle that diagonal makes
/// with the inner chord is the second atom `gamma`.
pub fn cone_annulus(n: usize, alpha: f64) -> TriangleComplex {
    let beta = (2.0 * PI + alpha) / n as f64;
    let chord = 2.0 * (beta / 2.0).sin();
    let big = (PI + beta) / 2.0;
    let diag = (chord * chord + 1.0 - 2.0 * chord * big.cos()).sqrt();
    let gamma = (big.sin() / diag).asin();

    let beta_a = &Angle::pi_frac(2, n as i64) + &Angle::atom("alpha", ratio(1, n as i64));
    let half = ratio(1, 2);
    let inner = (&Angle::pi() + &beta_a).scale(&half);
    let outer = (&Angle::pi() - &beta_a).scale(&half);
    let g = Angle::atom("gamma", ratio(1, 1));

    let mut bld = Builder::new();
    bld.atom("alpha", alpha).atom("gamma", gamma);
    for k in 0..n {
        bld.vertex(&format!("I{k}"));
    }
    for k in 0..n {
        bld.vertex(&format!("O{k}"));
    }
    for k in 0..n {
        let k1 = (k + 1) % n;
        let (ik, ik1, ok, ok1) =
            (format!("I{k}"), format!("I{k1}"), format!("O{k}"), format!("O{k1}"));
        bld.exact(
            [&ik, &ik1, &ok1],
            [g.clone(), inner.clone(), &outer - &g],
            [1.0, diag, chord],
        );
        bld.exact(
            [&ik, &ok1, &ok],
            [&inner - &g, g.clone(), outer.clone()],
            [2.0 * chord, 1.0, diag],
        );
    }
    bld.build()
}

/// Flat annulus of three periods whose bottom boundary is straight and whose
/// top boundary zigzags at slopes 60° and −30°. The boundary vertex links are
/// multiples of π/2 while the top boundary sits at π/3 to the bottom one.
pub fn sheared_strip() -> TriangleComplex {
    let h = 3f64.sqrt() / 2.0;
    let (b0, bk, b1) = ([0.0, 0.0], [0.5, 0.0], [2.0, 0.0]);
    let (v0, kk, v1) = ([0.0, h], [0.5, 2.0 * h], [2.0, h]);
    let mut bld = Builder::new();
    for i in 0..3 {
        let j = (i + 1) % 3;
        let (ob0, obk, ob1) = (format!("B{i}"), format!("C{i}"), format!("B{j}"));
        let (ov0, okk, ov1) = (format!("V{i}"), format!("K{i}"), format!("V{j}"));
        bld.planar([&ob0, &obk, &ov0], [b0, bk, v0]);
        bld.planar([&obk, &okk, &ov0], [bk, kk, v0]);
        bld.planar([&obk, &ob1, &ov1], [bk, b1, v1]);
        bld.planar([&obk, &ov1, &okk], [bk, v1, kk]);
    }
    bld.build()
}

/// Two hexagonal fans at `v` sharing the spoke `vw`: the link of `v` is a
/// wedge of two 2π circles.
pub fn two_hex_fans() -> TriangleComplex {
    let mut bld = Builder::new();
    add_fan(&mut bld, "v", &rim_names("r", 6, Some("w")), FanShape::Equilateral);
    add_fan(&mut bld, "v", &rim_names("s", 6, Some("w")), FanShape::Equilateral);
    bld.build()
}

/// Three hexagonal fans sharing a spoke; needs two unfolding steps.
pub fn three_hex_fans() -> TriangleComplex {
    let mut bld = Builder::new();
    for p in ["r", "s", "t"] {
        add_fan(&mut bld, "v", &rim_names(p, 6, Some("w")), FanShape::Equilateral);
    }
    bld.build()
}

/// Hexagonal fan wedged with a theta clover: three half-fans (three
/// equilateral triangles each) from spoke `vw` to spoke `vz`.
pub fn hex_with_theta_clover() -> TriangleComplex {
    let mut bld = Builder::new();
    add_fan(&mut bld, "v", &rim_names("r", 6, Some("w")), FanShape::Equilateral);
    for p in ["a", "b", "c"] {
        add_open_fan(&mut bld, "v", "w", "z", 3, p);
    }
    bld.build()
}

/// Two fans of four right isosceles triangles sharing a spoke.
pub fn two_square_fans() -> TriangleComplex {
    let mut bld = Builder::new();
    add_fan(&mut bld, "v", &rim_names("r", 4, Some("w")), FanShape::Square);
    add_fan(&mut bld, "v", &rim_names("s", 4, Some("w")), FanShape::Square);
    bld.build()
}

/// A hexagonal fan and a square fan sharing a unit spoke.
pub fn hex_and_square_fan() -> TriangleComplex {
    let mut bld = Builder::new();
    add_fan(&mut bld, "v", &rim_names("r", 6, Some("w")), FanShape::Equilateral);
    add_fan(&mut bld, "v", &rim_names("s", 4, Some("w")), FanShape::Square);
    bld.build()
}

/// Two disjoint copies of [`two_hex_fans`].
pub fn two_wedges_disjoint() -> TriangleComplex {
    let mut bld = Builder::new();
    for tag in ["1", "2"] {
        let c = format!("v{tag}");
        let w = format!("w{tag}");
        add_fan(&mut bld, &c, &rim_names(&format!("r{tag}_"), 6, Some(&w)), FanShape::Equilateral);
        add_fan(&mut bld, &c, &rim_names(&format!("s{tag}_"), 6, Some(&w)), FanShape::Equilateral);
    }
    bld.build()
}

/// Chain of `n` unit spines `Si Ti` (at x = 2i) with two pages of width 2
/// between consecutive spines, and one dangling page of width 2 beyond each
/// end spine. Each page is two unit squares split along diagonals.
pub fn book_chain(n: usize) -> TriangleComplex {
    assert!(n >= 2);
    let mut bld = Builder::new();
    let sq = |bld: &mut Builder, a: &str, b: &str, c: &str, d: &str| {
        // a=(0,0) b=(1,0) c=(1,1) d=(0,1)
        bld.planar([a, b, c], [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        bld.planar([a, c, d], [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
    };
    let page = |bld: &mut Builder, l: (&str, &str), r: (&str, &str), tag: &str| {
        let (m, mt) = (format!("M{tag}"), format!("N{tag}"));
        sq(bld, l.0, &m, &mt, l.1);
        sq(bld, &m, r.0, r.1, &mt);
    };
    for i in 0..n {
        bld.vertex(&format!("S{i}")).vertex(&format!("T{i}"));
    }
    let spine = |i: usize| (format!("S{i}"), format!("T{i}"));
    let (s0, t0) = spine(0);
    page(&mut bld, ("L", "LT"), (&s0, &t0), "left");
    for i in 0..n - 1 {
        let (a, at) = spine(i);
        let (b, bt) = spine(i + 1);
        for p in ["a", "b"] {
            page(&mut bld, (&a, &at), (&b, &bt), &format!("{i}{p}"));
        }
    }
    let (sl, tl) = spine(n - 1);
    page(&mut bld, (&sl, &tl), ("R", "RT"), "right");
    bld.build()
}

/// A triangle with a free edge hanging off one vertex and a free triangle
/// loop `X Y Z` (a circle subdivided into three edges).
pub fn triangle_with_circle() -> TriangleComplex {
    let mut bld = Builder::new();
    bld.exact(["A", "B", "C"], equilateral(), [1.0; 3]);
    bld.free_edge("C", "X", 1.0).free_edge("X", "Y", 1.0).free_edge("Y", "Z", 1.0);
    bld.free_edge("Z", "X", 1.0);
    bld.build()
}

/// Named fixtures in corpus order.
pub fn corpus() -> Vec<(&'static str, TriangleComplex)> {
    vec![
        ("single_triangle", single_triangle()),
        ("flat_square", flat_square()),
        ("book3", book(3)),
        ("theta_circle", theta_circle()),
        ("hex_fan", hex_fan()),
        ("fan5", fan(5)),
        ("fan7", fan(7)),
        ("cone_annulus", cone_annulus(6, 0.9)),
        ("sheared_strip", sheared_strip()),
        ("two_hex_fans", two_hex_fans()),
        ("three_hex_fans", three_hex_fans()),
        ("hex_with_theta_clover", hex_with_theta_clover()),
        ("two_square_fans", two_square_fans()),
        ("hex_and_square_fan", hex_and_square_fan()),
        ("two_wedges_disjoint", two_wedges_disjoint()),
        ("book_chain", book_chain(3)),
        ("triangle_with_circle", triangle_with_circle()),
    ]
}

/// Fixtures whose links include an unfoldable vertex.
pub fn folding_corpus() -> Vec<(&'static str, TriangleComplex)> {
    vec![
        ("two_hex_fans", two_hex_fans()),
        ("three_hex_fans", three_hex_fans()),
        ("hex_with_theta_clover", hex_with_theta_clover()),
        ("two_square_fans", two_square_fans()),
        ("hex_and_square_fan", hex_and_square_fan()),
        ("two_wedges_disjoint", two_wedges_disjoint()),
    ]
}

/// Canonical JSON text for a fixture document.
pub fn to_json(x: &TriangleComplex) -> String {
    let mut s = serde_json::to_string_pretty(x.to_doc()).expect("serializable");
    s.push('\n');
    s
}
