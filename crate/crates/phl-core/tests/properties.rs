//! Property tests for the quasi-norm algebra and grid conventions.

use proptest::prelude::*;

use phl_core::spectral::{forward_ft, inverse_ft};
use phl_core::{Field, GridSpec};

fn small_grid() -> GridSpec {
    GridSpec::new(&[32], &[4.0]).unwrap()
}

fn field_strategy() -> impl Strategy<Value = Field> {
    prop::collection::vec(-100.0f64..100.0, 32).prop_map(|v| {
        Field::from_real(&small_grid(), v).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn p_triangle_inequality(f in field_strategy(), g in field_strategy(), p in 0.1f64..=1.0) {
        let sum = f.add(&g).unwrap();
        let lhs = sum.lp_quasinorm(p).unwrap().powf(p);
        let rhs = f.lp_quasinorm(p).unwrap().powf(p) + g.lp_quasinorm(p).unwrap().powf(p);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn absolute_homogeneity(f in field_strategy(), c in -50.0f64..50.0, p in 0.1f64..=2.0) {
        let a = f.scaled(c).lp_quasinorm(p).unwrap();
        let b = c.abs() * f.lp_quasinorm(p).unwrap();
        prop_assert!((a - b).abs() <= 1e-11 * b.max(1e-30));
    }

    #[test]
    fn round_trip_on_random_fields(f in field_strategy()) {
        let back = inverse_ft(&forward_ft(&f));
        prop_assert!(back.rel_l2_diff(&f) < 1e-12);
    }

    #[test]
    fn indicator_norm_is_measure_up_to_one_cell(
        a in -3.9f64..3.0,
        width in 0.1f64..1.0,
        p in 0.3f64..=1.0,
    ) {
        let grid = small_grid();
        let b = a + width;
        let f = Field::sample(&grid, |x| {
            if x[0] >= a && x[0] <= b { 1.0 } else { 0.0 }
        }).unwrap();
        let norm = f.lp_quasinorm(p).unwrap();
        let measured = norm.powf(p); // sum h over the support
        let h = grid.spacing(0);
        prop_assert!((measured - width).abs() <= h + 1e-12);
    }

    #[test]
    fn half_offset_grids_never_touch_hyperplanes(
        exp in 4u32..8,
        l in 0.5f64..100.0,
    ) {
        let n = 1usize << exp;
        let grid = GridSpec::new(&[n], &[l]).unwrap();
        let h = grid.spacing(0);
        let min_abs = (0..n).map(|k| grid.coord(0, k).abs()).fold(f64::INFINITY, f64::min);
        prop_assert!(min_abs > 0.0);
        prop_assert!((min_abs - h / 2.0).abs() <= 1e-12 * h);
    }
}
