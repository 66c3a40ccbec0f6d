//! Planar helpers for developing triangle strips.

use serde::Serialize;

use crate::complex::{EdgeId, TriId, TriangleComplex};

pub type Point = [f64; 2];

pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn scale(a: Point, k: f64) -> Point {
    [a[0] * k, a[1] * k]
}

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

pub fn lerp(a: Point, b: Point, t: f64) -> Point {
    add(a, scale(sub(b, a), t))
}

/// Distance from `p` to the segment `ab`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let l2 = dot(ab, ab);
    if l2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / l2).clamp(0.0, 1.0);
    dist(p, lerp(a, b, t))
}

/// An isometry of the plane, `x ↦ m·x + t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Affine2 {
    pub m: [[f64; 2]; 2],
    pub t: Point,
}

impl Affine2 {
    pub fn identity() -> Self {
        Affine2 { m: [[1.0, 0.0], [0.0, 1.0]], t: [0.0, 0.0] }
    }

    pub fn apply(&self, p: Point) -> Point {
        [
            self.m[0][0] * p[0] + self.m[0][1] * p[1] + self.t[0],
            self.m[1][0] * p[0] + self.m[1][1] * p[1] + self.t[1],
        ]
    }

    pub fn apply_vec(&self, v: Point) -> Point {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Affine2) -> Affine2 {
        let a = &self.m;
        let b = &other.m;
        let m = [
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ];
        Affine2 { m, t: self.apply(other.t) }
    }

    /// Inverse, using that the linear part is orthogonal.
    pub fn inverse(&self) -> Affine2 {
        let m = [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]];
        let lin = Affine2 { m, t: [0.0, 0.0] };
        let t = lin.apply(self.t);
        Affine2 { m, t: [-t[0], -t[1]] }
    }

    pub fn determinant(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// The isometry sending `a0 ↦ b0` and the direction of `a1 - a0` to that
    /// of `b1 - b0`, reflecting when `flip` is set.
    pub fn from_frames(a0: Point, a1: Point, b0: Point, b1: Point, flip: bool) -> Affine2 {
        let ua = scale(sub(a1, a0), 1.0 / norm(sub(a1, a0)));
        let ub = scale(sub(b1, b0), 1.0 / norm(sub(b1, b0)));
        let s = if flip { -1.0 } else { 1.0 };
        // Columns: image of ua is ub, image of rot90(ua) is s·rot90(ub).
        let na = [-ua[1], ua[0]];
        let nb = [-ub[1] * s, ub[0] * s];
        // m = [ub nb] · [ua na]^T (orthonormal inverse is the transpose).
        let m = [
            [ub[0] * ua[0] + nb[0] * na[0], ub[0] * ua[1] + nb[0] * na[1]],
            [ub[1] * ua[0] + nb[1] * na[0], ub[1] * ua[1] + nb[1] * na[1]],
        ];
        let lin = Affine2 { m, t: [0.0, 0.0] };
        let t = sub(b0, lin.apply(a0));
        Affine2 { m, t }
    }
}

/// Local positions of the low and high ends of `e` in triangle `t`, plus the
/// third vertex.
pub fn edge_in_triangle(x: &TriangleComplex, t: TriId, e: EdgeId) -> (Point, Point, Point) {
    let tri = x.triangle(t);
    let p = tri.local_coords();
    let [lo, hi] = x.edge(e).ends;
    let clo = tri.corner_of(lo).expect("edge endpoint in triangle");
    let chi = tri.corner_of(hi).expect("edge endpoint in triangle");
    (p[clo], p[chi], p[3 - clo - chi])
}

/// Development frame of `next` given the frame of `prev`, glued along their
/// shared edge `e` so that the two triangles lie on opposite sides of it.
pub fn glue_frame(
    x: &TriangleComplex,
    prev: TriId,
    prev_frame: &Affine2,
    next: TriId,
    e: EdgeId,
) -> Affine2 {
    let (plo, phi, pr) = edge_in_triangle(x, prev, e);
    let (dlo, dhi, dr) = (prev_frame.apply(plo), prev_frame.apply(phi), prev_frame.apply(pr));
    let (qlo, qhi, qr) = edge_in_triangle(x, next, e);
    let side_prev = cross(sub(dhi, dlo), sub(dr, dlo)).signum();
    let side_next = cross(sub(qhi, qlo), sub(qr, qlo)).signum();
    // Without reflection the next triangle keeps its own side; it must end up
    // opposite the previous one.
    let flip = side_next != -side_prev;
    Affine2::from_frames(qlo, qhi, dlo, dhi, flip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn frames_are_isometries() {
        let f = Affine2::from_frames([0.0, 0.0], [1.0, 0.0], [2.0, 1.0], [2.0, 3.0], false);
        assert!((f.determinant() - 1.0).abs() < 1e-12);
        let p = f.apply([1.0, 0.0]);
        assert!(dist(p, [2.0, 2.0]) < 1e-12);
        let g = Affine2::from_frames([0.0, 0.0], [1.0, 0.0], [2.0, 1.0], [2.0, 3.0], true);
        assert!((g.determinant() + 1.0).abs() < 1e-12);
        let h = f.compose(&g);
        assert!((h.determinant() + 1.0).abs() < 1e-12);
        let id = h.compose(&h.inverse());
        assert!(dist(id.apply([0.3, -2.0]), [0.3, -2.0]) < 1e-12);
    }

    #[test]
    fn square_develops_flat() {
        let x = fixtures::flat_square();
        let ac = x.parse_edge("A:C").unwrap();
        let t0 = crate::complex::TriId(0);
        let t1 = crate::complex::TriId(1);
        let f = glue_frame(&x, t0, &Affine2::identity(), t1, ac);
        let d = x.vertex_by_name("D").unwrap();
        let cd = x.triangle(t1).corner_of(d).unwrap();
        let pd = f.apply(x.triangle(t1).local_coords()[cd]);
        assert!(dist(pd, [0.0, 1.0]) < 1e-12);
    }
}
