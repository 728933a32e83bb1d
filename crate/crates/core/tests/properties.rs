//! Property tests for the exact-counting and tiling invariants.

use proptest::prelude::*;

use minpart_core::certificate::tile_squares;
use minpart_core::geometry::{build_grid, default_cuts, DomainSpec, PoleConfig};
use minpart_core::operator::GaugeField;
use minpart_core::weyl::n_square_exact;

fn n_square_naive(t: f64) -> usize {
    let tt = t * t;
    let pipi = std::f64::consts::PI.powi(2);
    let cap = (t / std::f64::consts::PI).ceil() as u64 + 2;
    let mut count = 0;
    for m in 1..=cap {
        for n in 1..=cap {
            if pipi * ((m * m + n * n) as f64) < tt {
                count += 1;
            }
        }
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_count_matches_naive_and_is_monotone(t in 0.0f64..80.0, dt in 0.0f64..5.0) {
        let a = n_square_exact(t);
        prop_assert_eq!(a, n_square_naive(t));
        prop_assert!(n_square_exact(t + dt) >= a);
    }

    #[test]
    fn tiling_accounting_is_consistent(lambda in 50.0f64..2000.0, t in 1.0f64..6.0) {
        let side = t / lambda.sqrt();
        prop_assume!(side <= std::f64::consts::SQRT_2 * 0.9);
        let r = tile_squares(&DomainSpec::UnitSquare, &[], lambda, t).unwrap();
        // Bookkeeping identities and bounds the report promises.
        prop_assert_eq!(r.kept + r.excluded_by_pole, r.inside);
        prop_assert!((r.covered_area - r.kept as f64 * side * side).abs() < 1e-12);
        prop_assert!(r.boundary_deficit >= -1e-12);
        prop_assert!(r.covered_area <= 1.0 + 1e-12);
        // Boundary layer: at most a strip of width `side` along the perimeter.
        prop_assert!(r.boundary_deficit <= 4.0 * side + 4.0 * side * side + 1e-12);
    }

    #[test]
    fn grid_refinement_density(inv_h in 20u32..72) {
        let h = 1.0 / inv_h as f64;
        let g = build_grid(&DomainSpec::Disk { radius: 1.0 }, h).unwrap();
        let ratio = g.len() as f64 * h * h / std::f64::consts::PI;
        prop_assert!((0.8..=1.2).contains(&ratio), "ratio {}", ratio);
    }

    #[test]
    fn loop_parity_random_rectangles(
        seed in 0u64..500,
        rect in (0usize..20, 0usize..20, 1usize..10, 1usize..10),
    ) {
        use rand::{Rng, SeedableRng};
        let grid = build_grid(&DomainSpec::UnitSquare, 1.0 / 22.0).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let l = rng.gen_range(1..=3);
        let mut ids = std::collections::BTreeSet::new();
        while ids.len() < l {
            ids.insert(rng.gen_range(0..grid.plaquette_count()));
        }
        let ids: Vec<usize> = ids.into_iter().collect();
        let poles = PoleConfig::from_plaquettes(&grid, &ids).unwrap();
        let cuts = default_cuts(&grid, &poles).unwrap();
        let gauge = GaugeField::from_cuts(&grid, &poles, &cuts);

        let (ox, oy) = grid.lattice(0);
        let (ox, oy) = (ox as i64, oy as i64);
        let side = 20i64;
        let (x0, y0, w, h_) = rect;
        let (x0, y0) = (x0 as i64 % side, y0 as i64 % side);
        let x1 = (x0 + w as i64).min(side);
        let y1 = (y0 + h_ as i64).min(side);
        prop_assume!(x1 > x0 && y1 > y0);

        let at = |ix: i64, iy: i64| grid.at(ox + ix, oy + iy).unwrap();
        let mut sign = 1i32;
        for x in x0..x1 {
            sign *= gauge.right_sign(at(x, y0)) as i32;
            sign *= gauge.right_sign(at(x, y1)) as i32;
        }
        for y in y0..y1 {
            sign *= gauge.up_sign(at(x0, y)) as i32;
            sign *= gauge.up_sign(at(x1, y)) as i32;
        }
        let mut enclosed = 0;
        for &q in poles.plaquette_ids() {
            let (cx, cy) = grid.plaquette_cell(q as usize);
            let (cx, cy) = (cx as i64 - ox, cy as i64 - oy);
            if cx >= x0 && cx < x1 && cy >= y0 && cy < y1 {
                enclosed += 1;
            }
        }
        prop_assert_eq!(sign, if enclosed % 2 == 1 { -1 } else { 1 });
    }
}
