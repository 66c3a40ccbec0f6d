use proptest::prelude::*;

use flatfold_core::angle::parse_rational;
use flatfold_core::fixtures;
use flatfold_core::folding::cone_angle;
use flatfold_core::geom::{dist, Point};
use flatfold_core::rationality::psi_arc;
use flatfold_core::witness::{build_gamma, check_word, find_sheared_connections, select_connections};
use flatfold_core::{
    betti_numbers, check_local_cat0, fundamental_group, geodesic_between, link_of_edge_point,
    link_of_vertex, patches, trace, unfold_all, Angle, AngleValue, AtomEnv, BranchPolicy, Endpoint,
    GammaGraph, LinkDirection, Location, SearchParams, TriId, TriangleComplex, Word,
};

fn angle() -> impl Strategy<Value = Angle> {
    (-40i64..40, 1i64..13, -5i64..6, 1i64..7, -3i64..4).prop_map(|(n, d, a, ad, b)| {
        let atom = |name: &str, p: i64, q: i64| Angle::atom(name, parse_rational(&format!("{p}/{q}")).unwrap());
        &(&Angle::pi_frac(n, d) + &atom("s", a, ad)) + &atom("t", b, 1)
    })
}

fn env() -> AtomEnv {
    let mut e = AtomEnv::new();
    e.declare("s", 0.37).unwrap();
    e.declare("t", 0.051).unwrap();
    e
}

proptest! {
    #[test]
    fn angle_addition_is_exact(a in angle(), b in angle(), c in angle()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!((&a + &b).mod_pi_rational(), &a.mod_pi_rational() + &b.mod_pi_rational());
        let e = env();
        let sum = (&a + &b).numeric(&e).unwrap();
        prop_assert!((sum - a.numeric(&e).unwrap() - b.numeric(&e).unwrap()).abs() < 1e-12);
    }
}

fn corpus() -> Vec<(&'static str, TriangleComplex)> {
    fixtures::corpus()
}

#[test]
fn patches_partition_triangles_off_the_branching_locus() {
    for (name, x) in corpus() {
        let mut seen = vec![0usize; x.triangle_count()];
        for p in patches(&x) {
            for t in &p.triangles {
                seen[t.0] += 1;
            }
            for &e in &p.interior_edges {
                assert!(x.edge_degree(e) <= 2, "{name}");
                assert!(!x.is_branching(e), "{name}");
            }
        }
        assert!(seen.iter().all(|&k| k == 1), "{name}");
    }
}

#[test]
fn contractible_proxy_and_abelian_rank() {
    for (name, x) in corpus() {
        let b = betti_numbers(&x);
        if x.component_count() == 1 && x.euler_characteristic() == 1 {
            assert_eq!(b.b1, 0, "{name}");
        }
        if x.component_count() == 1 && x.vertex_count() > 0 {
            let p = fundamental_group(&x, flatfold_core::VertexId(0)).unwrap();
            assert_eq!(p.abelian_rank(), b.b1, "{name}");
        }
    }
}

#[test]
fn links_are_consistent() {
    for (name, x) in corpus() {
        for e in x.edge_ids() {
            if x.edge_degree(e) >= 2 {
                let g = link_of_edge_point(&x, e).unwrap().girth();
                assert_eq!(g.length, Some(Angle::pi_frac(2, 1)), "{name} {}", x.edge_label(e));
            }
        }
        for v in x.vertices() {
            let l = link_of_vertex(&x, v).unwrap();
            let total = l.arcs.iter().fold(Angle::zero(), |acc, a| &acc + &a.length);
            assert_eq!(total, cone_angle(&x, v), "{name}");
            if let Some(u) = l.find_unfoldable() {
                let cycle = u.cycle_arcs.iter().fold(Angle::zero(), |acc, &i| &acc + &l.arcs[i].length);
                assert_eq!(cycle, Angle::pi_frac(2, 1), "{name}");
                assert!(l.classify_clover().is_some() || !u.clover_arcs.is_empty(), "{name}");
            }
        }
    }
}

#[test]
fn unfolding_keeps_triangles_and_adds_vertices() {
    for (name, x) in fixtures::folding_corpus() {
        let u = unfold_all(&x);
        for w in u.stages.windows(2) {
            assert_eq!(w[0].triangle_count(), w[1].triangle_count(), "{name}");
            assert!(w[1].vertex_count() > w[0].vertex_count(), "{name}");
        }
        let y = &u.result;
        assert!(y.vertices().all(|v| link_of_vertex(y, v).unwrap().find_unfoldable().is_none()), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn subcomplexes_of_passing_complexes_pass(mask in proptest::collection::vec(any::<bool>(), 36)) {
        for x in [fixtures::theta_circle(), fixtures::hex_fan(), fixtures::book_chain(2)] {
            let keep: Vec<TriId> = x.triangle_ids().filter(|t| mask[t.0 % mask.len()]).collect();
            if keep.is_empty() {
                continue;
            }
            let y = x.subcomplex(&keep).unwrap();
            prop_assert!(check_local_cat0(&y).pass);
        }
    }
}

fn square_point() -> impl Strategy<Value = Point> {
    (0.02f64..0.98, 0.02f64..0.98).prop_filter("off the diagonal", |(a, b)| (a - b).abs() > 1e-3).prop_map(|(a, b)| [a, b])
}

/// `A:B:C` carries the square's coordinates; `A:C:D` is rotated by −π/4.
fn square_location(x: &TriangleComplex, p: Point) -> Location {
    if p[1] < p[0] {
        Location::Interior { triangle: x.parse_triangle("A:B:C").unwrap(), pos: p }
    } else {
        let (c, s) = (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2);
        let pos = [c * p[0] + s * p[1], -s * p[0] + c * p[1]];
        Location::Interior { triangle: x.parse_triangle("A:C:D").unwrap(), pos }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_length_is_developed_length(off in 0.05f64..0.95, k in 1i64..12, budget in 0.1f64..6.0) {
        let x = fixtures::theta_circle();
        let t = x.parse_triangle("u0:mx1:u1").unwrap();
        let launch = Endpoint {
            location: Location::Edge { edge: x.parse_edge("u0:u1").unwrap(), offset: off },
            direction: LinkDirection::Edge {
                triangle: t,
                angle_from_hi: AngleValue::exact(Angle::pi_frac(k, 12), x.atom_env()).unwrap(),
            },
        };
        let Ok(mut paths) = trace(&x, &launch, budget, &BranchPolicy::Follow(vec![])) else { return Ok(()) };
        let p = paths.remove(0);
        let sum: f64 = p.segments.iter().map(|s| dist(s.frame.apply(s.entry), s.frame.apply(s.exit))).sum();
        prop_assert!((sum - p.length).abs() < 1e-12);
        prop_assert!((dist(p.dev_start(), p.dev_end()) - p.length).abs() < 1e-9);
    }

    #[test]
    fn reversal_retraces_crossings(off in 0.05f64..0.95, k in 1i64..12) {
        let x = fixtures::flat_square();
        let launch = Endpoint {
            location: Location::Edge { edge: x.parse_edge("A:B").unwrap(), offset: off },
            direction: LinkDirection::Edge {
                triangle: x.parse_triangle("A:B:C").unwrap(),
                angle_from_hi: AngleValue::exact(Angle::pi_frac(k, 12), x.atom_env()).unwrap(),
            },
        };
        let p = trace(&x, &launch, 5.0, &BranchPolicy::Stop).unwrap().remove(0);
        if matches!(p.status, flatfold_core::EndStatus::HitVertex { .. }) {
            return Ok(());
        }
        let b = flatfold_core::geodesic::reverse(&x, &p).unwrap();
        prop_assert_eq!(b.crossings.len(), p.crossings.len());
        for (a, c) in p.crossings.iter().rev().zip(&b.crossings) {
            prop_assert_eq!(a.edge, c.edge);
            prop_assert!((a.offset - c.offset).abs() < 1e-9);
        }
    }

    #[test]
    fn distances_are_symmetric_and_metric(p in square_point(), q in square_point(), r in square_point()) {
        let x = fixtures::flat_square();
        let d = |a: Point, b: Point| {
            if dist(a, b) < 1e-9 {
                return 0.0;
            }
            geodesic_between(&x, &square_location(&x, a), &square_location(&x, b), 4.0, true).unwrap().length
        };
        let (pq, qp) = (d(p, q), d(q, p));
        prop_assert!((pq - qp).abs() < 1e-12);
        prop_assert!((pq - dist(p, q)).abs() < 1e-12);
        prop_assert!(pq <= d(p, r) + d(r, q) + 1e-9);
    }

    #[test]
    fn geodesics_to_the_spine_end_in_its_page_triangle(px in 0.05f64..0.95, py in 0.05f64..0.95, z in 0.05f64..0.95) {
        // Page 1 of the book has unit-square coordinates with P at the origin
        // and the spine PQ on the y-axis.
        let x = fixtures::book(3);
        let (lower, upper) = (x.parse_triangle("P:A1:B1").unwrap(), x.parse_triangle("P:B1:Q").unwrap());
        let from = if py < px {
            Location::Interior { triangle: lower, pos: [px, py] }
        } else {
            // `P:B1:Q` is the square's upper triangle rotated so `P B1` is the x-axis.
            let s = std::f64::consts::FRAC_1_SQRT_2;
            Location::Interior { triangle: upper, pos: [s * (px + py), s * (py - px)] }
        };
        prop_assume!((px - py).abs() > 1e-3);
        let to = Location::Edge { edge: x.parse_edge("P:Q").unwrap(), offset: z };
        let g = geodesic_between(&x, &from, &to, 4.0, true).unwrap();
        prop_assert_eq!(g.last_triangle(), upper);
        prop_assert!((g.length - dist([px, py], [0.0, z])).abs() < 1e-9);
    }
}

#[test]
fn arc_holonomy_is_additive() {
    for x in [fixtures::sheared_strip(), fixtures::theta_circle(), fixtures::cone_annulus(6, 0.9)] {
        for p in patches(&x) {
            let n = p.boundary_components;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let ab = psi_arc(&x, &p, a, b).unwrap();
                        let bc = psi_arc(&x, &p, b, c).unwrap();
                        let ac = psi_arc(&x, &p, a, c).unwrap();
                        assert_eq!((&ab + &bc).mod_pi_rational(), ac);
                    }
                }
            }
        }
    }
}

fn theta_gamma() -> (TriangleComplex, GammaGraph) {
    let x = fixtures::theta_circle();
    let e = x.parse_edge("u0:u1").unwrap();
    let conns = find_sheared_connections(&x, e, &SearchParams::default()).unwrap();
    let [ab, ca, bc] = select_connections(&x, e, &conns).unwrap();
    let g = build_gamma(&x, e, &ab, &ca, &bc).unwrap();
    (x, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn word_paths_never_close(letters in proptest::collection::vec(prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2)], 1..7)) {
        let w = Word(letters).reduced();
        prop_assume!(!w.is_empty());
        let (x, g) = theta_gamma();
        let c = check_word(&x, &g, &w);
        prop_assert!(c.sheared, "{:?}", c.failures);
        prop_assert!(c.failures.is_empty());
        prop_assert!(c.min_prefix_separation > 1e-9);
    }
}
