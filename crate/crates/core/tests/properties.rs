mod common;

use conveq::functions::{BifunctionKind, BifunctionSpec, ScalarFn};
use conveq::geometry::{self, exposing_functional, normal_excess};
use conveq::oracle::{self, hausdorff};
use conveq::sampling;
use conveq::{
    check_quasiconvex, eq_reduced, eq_set, extreme_points, make_grid, project, pt, ConvexBody,
    Point, ReduceOptions, ReductionMode, Tolerances,
};
use proptest::prelude::*;

fn t() -> Tolerances {
    Tolerances::default()
}

/// A random polytope in dimension 2..=4 with 1..=12 generators and an
/// exterior point, all derived from one seed.
fn polytope_and_exterior(seed: u64) -> Option<(ConvexBody, Point)> {
    let mut rng = sampling::rng(seed);
    let dim = 2 + (seed % 3) as usize;
    let count = 1 + (seed / 3 % 12) as usize;
    let body = sampling::random_polytope(&mut rng, dim, count, 1.0);
    let x = sampling::exterior_point(&mut rng, &body, 3.0, &t())?;
    Some((body, x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projection_is_idempotent(seed in any::<u64>()) {
        let Some((body, x)) = polytope_and_exterior(seed) else { return Ok(()) };
        let p = project(&body, &x, &t()).unwrap().point;
        let again = project(&body, &p, &t()).unwrap().point;
        prop_assert!(p.distance(&again) <= 1e-8);
    }

    #[test]
    fn projection_is_nonexpansive(seed in any::<u64>()) {
        let Some((body, x)) = polytope_and_exterior(seed) else { return Ok(()) };
        let mut rng = sampling::rng(seed ^ 0xabc);
        let y = sampling::point_in_box(&mut rng, body.dim(), 3.0);
        let px = project(&body, &x, &t()).unwrap().point;
        let py = project(&body, &y, &t()).unwrap().point;
        prop_assert!(px.distance(&py) <= x.distance(&y) + 1e-8);
    }

    #[test]
    fn only_the_projection_passes_the_variational_test(seed in any::<u64>()) {
        let Some((body, x)) = polytope_and_exterior(seed) else { return Ok(()) };
        let p = project(&body, &x, &t()).unwrap().point;
        prop_assert!(normal_excess(&body, &p, &(&x - &p)) <= 1e-8);
        let mut rng = sampling::rng(seed.wrapping_add(1));
        let q = sampling::point_in_body(&mut rng, &body);
        if q.distance(&p) > 1e-3 {
            prop_assert!(normal_excess(&body, &q, &(&x - &q)) > 1e-8);
        }
    }

    #[test]
    fn projection_matches_simplex_oracle(seed in any::<u64>()) {
        let Some((body, x)) = polytope_and_exterior(seed) else { return Ok(()) };
        let p = project(&body, &x, &t()).unwrap().point;
        let (q, _) = common::nearest_by_simplices(body.generators().unwrap(), &x, body.dim());
        prop_assert!(p.distance(&q) <= 1e-8);
    }

    #[test]
    fn cell_base_is_unique_under_generator_order(seed in any::<u64>()) {
        let Some((body, x)) = polytope_and_exterior(seed) else { return Ok(()) };
        let mut gens = body.generators().unwrap().to_vec();
        gens.reverse();
        let flipped = ConvexBody::Polytope { generators: gens };
        let a = geometry::locate_partition_cell(&body, &x, &t()).unwrap();
        let b = geometry::locate_partition_cell(&flipped, &x, &t()).unwrap();
        prop_assert!(a.distance(&b) <= 10.0 * t().feas);
    }

    #[test]
    fn gauss_map_matches_cone(seed in any::<u64>()) {
        let Some((body, x)) = polytope_and_exterior(seed) else { return Ok(()) };
        let p = project(&body, &x, &t()).unwrap().point;
        let d = &x - &p;
        let u = d.normalized().unwrap();
        prop_assert!(geometry::normal_cone_contains(&body, &p, &d, 1e-8).unwrap());
        prop_assert!(geometry::gauss_map_contains(&body, &p, &u, 1e-8).unwrap());
        prop_assert!(!geometry::gauss_map_contains(&body, &p, &u.scale(2.0), 1e-8).unwrap());
    }

    #[test]
    fn extreme_points_generate_the_same_hull(seed in any::<u64>()) {
        let Some((body, x)) = polytope_and_exterior(seed) else { return Ok(()) };
        let ext = extreme_points(&body, &t()).unwrap();
        let reduced = ConvexBody::Polytope { generators: ext.clone() };
        for g in body.generators().unwrap() {
            prop_assert!(geometry::contains(&reduced, g, 1e-8).unwrap());
        }
        let a = project(&body, &x, &t()).unwrap().point;
        let b = project(&reduced, &x, &t()).unwrap().point;
        prop_assert!(a.distance(&b) <= 1e-8);
        for v in &ext {
            prop_assert!(exposing_functional(&body, v, &t()).unwrap().is_some());
        }
    }

    #[test]
    fn farthest_points_are_exposed(seed in any::<u64>()) {
        let Some((body, x)) = polytope_and_exterior(seed) else { return Ok(()) };
        for p in geometry::farthest_points(&body, &x, &t()).unwrap().points {
            prop_assert!(geometry::is_exposed(&body, &p, &t()).unwrap());
        }
    }

    #[test]
    fn nested_testers_shrink_the_solution_set(seed in any::<u64>(), cut in 1usize..40) {
        let mut rng = sampling::rng(seed);
        let body = sampling::random_polytope(&mut rng, 2, 6, 1.0);
        let g = BifunctionSpec::from(BifunctionKind::Potential {
            f: ScalarFn::SquaredNorm { center: vec![0.2, -0.1] },
            shift: 0.0,
        })
        .build()
        .unwrap();
        let grid = make_grid(&body, 0.1, &t()).unwrap().points;
        let testers = &grid[..cut.min(grid.len())];
        let small = eq_set(&g, &grid, testers, 1e-9).unwrap();
        let large = eq_set(&g, &grid, &grid, 1e-9).unwrap();
        prop_assert!(large.solutions.iter().all(|p| small.solutions.contains(p)));
    }
}

#[test]
fn partition_covers_the_exterior() {
    let tols = t();
    for dim in [2usize, 3] {
        let mut rng = sampling::rng(dim as u64);
        let body = sampling::random_polytope(&mut rng, dim, 9, 1.0);
        let mut located = 0;
        while located < 10_000 {
            let x = sampling::point_in_box(&mut rng, dim, 4.0);
            match geometry::locate_partition_cell(&body, &x, &tols) {
                Ok(base) => {
                    assert!(normal_excess(&body, &base, &(&x - &base)) <= 1e-8);
                    located += 1;
                }
                Err(conveq::Error::InsideBody) => {
                    assert!(geometry::contains(&body, &x, 1e-8).unwrap())
                }
                Err(e) => panic!("{x}: {e}"),
            }
        }
    }
}

#[test]
fn reductions_agree_with_brute_force_for_checked_quasiconvex_g() {
    let tols = t();
    let mut rng = sampling::rng(11);
    for _ in 0..10 {
        let body = sampling::random_lattice_polytope(&mut rng, 2, 6, 1.0, 0.05);
        let spec = BifunctionSpec::from(BifunctionKind::Potential {
            f: ScalarFn::NegDistance {
                xstar: vec![0.3, 0.1],
            },
            shift: 0.0,
        });
        let g = spec.build().unwrap();
        let center = pt![0.1, 0.2];
        let g_c = g.clone();
        let section = move |v: &Point| g_c.eval(&center, v);
        assert!(check_quasiconvex(&section, &body, 64, 9, 5, 1e-9).holds);

        let cands = make_grid(&body, 0.1, &tols).unwrap().points;
        let opts = ReduceOptions::default();
        let reduced = eq_reduced(&g, &cands, &body, ReductionMode::Extreme, &opts).unwrap();
        let brute = oracle::brute_eq(&g, &cands, &body, 0.05, 1e-9, &tols).unwrap();
        assert!(hausdorff(&reduced.solutions, &brute.solutions) <= 0.05 + 1e-8);
    }
}

#[test]
fn unsound_reduction_is_visible_to_the_checker() {
    let interval = ConvexBody::interval(-1.0, 1.0).unwrap();
    let section = |v: &Point| -v[0] * v[0];
    let check = check_quasiconvex(&section, &interval, 16, 9, 1, 1e-9);
    assert!(!check.holds);
    let w = check.witness.unwrap();
    assert!(w.excess > 0.0);
}

#[test]
fn grid_refinement_never_grows_the_solution_set() {
    // halving the spacing keeps the coarse lattice, so the testers are nested
    let tols = t();
    let body = ConvexBody::polytope(vec![
        pt![-1, -1],
        pt![1, -0.5],
        pt![0.5, 1],
        pt![-0.5, 0.75],
    ])
    .unwrap();
    let g = BifunctionSpec::from(BifunctionKind::Potential {
        f: ScalarFn::SquaredNorm {
            center: vec![0.1, 0.1],
        },
        shift: 0.02,
    })
    .build()
    .unwrap();
    let cands = make_grid(&body, 0.1, &tols).unwrap().points;
    let mut previous: Option<Vec<Point>> = None;
    for h in [0.2, 0.1, 0.05, 0.025] {
        let sols = oracle::brute_eq(&g, &cands, &body, h, 1e-9, &tols)
            .unwrap()
            .solutions;
        if let Some(prev) = &previous {
            assert!(sols.iter().all(|p| prev.contains(p)), "h = {h}");
        }
        previous = Some(sols);
    }
}

#[test]
fn oracle_is_consistent_with_itself() {
    let tols = t();
    let body = ConvexBody::unit_square();
    let g = BifunctionSpec::from(BifunctionKind::Potential {
        f: ScalarFn::NegDistance {
            xstar: vec![0.5, 0.5],
        },
        shift: 0.0,
    })
    .build()
    .unwrap();
    let cands = make_grid(&body, 0.25, &tols).unwrap().points;
    let a = oracle::brute_eq(&g, &cands, &body, 0.05, 1e-9, &tols).unwrap();
    let b = oracle::brute_eq(&g, &cands, &body, 0.05, 1e-9, &tols).unwrap();
    let cmp = oracle::compare(&a, &b, 1e-8).unwrap();
    assert!(cmp.agree);
    assert_eq!(cmp.hausdorff_gap, 0.0);
    assert_eq!(a.solutions, vec![pt![-1, -1]]);
}
