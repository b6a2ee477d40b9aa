//! Round trips of the level-preserving bijections across every dyadic
//! shape the normalizer handles: the S^0 forms sit at 2-valuation
//! h = 2g, their phi_2 images at h = g-2, and the trace-zero forms of
//! orders at doubly even levels in the middle range g <= h <= 2g-2.

use tqf::arith::{valuation, Int};
use tqf::clifford::trace_zero_form;
use tqf::eisenstein::admissible_levels_up_to;
use tqf::ternary::{aut_count, invariants, phi_p, phi_p_inv, reduce};
use tqf::verify::{orders_for_level, s_zero_genus};

const BUDGET: Int = 20_000;

#[test]
fn phi_two_round_trips_on_s_zero_forms() {
    for level in admissible_levels_up_to(30) {
        for f in s_zero_genus(&level, BUDGET).unwrap() {
            let image = phi_p(&f, 2).unwrap();
            let inv = invariants(&image).unwrap();
            // h = 2g drops to g - 2
            let g = valuation(inv.level, 2).unwrap() as i64;
            assert_eq!(
                valuation(inv.disc, 2).unwrap() as i64,
                g - 2,
                "image valuation at level ({}, {})",
                level.n1(),
                level.n2()
            );
            assert_eq!(aut_count(&f), aut_count(&image));
            let back = phi_p_inv(&image, 2).unwrap();
            assert_eq!(
                back,
                reduce(&f),
                "round trip at ({}, {})",
                level.n1(),
                level.n2()
            );
        }
    }
}

#[test]
fn phi_two_round_trips_on_trace_zero_forms() {
    // 2 || L puts the trace-zero forms at v_2(N) = 2 with v_2(d) = 2: the
    // middle dyadic range
    for level in admissible_levels_up_to(30) {
        if level.product() % 2 != 0 || level.product() % 4 == 0 {
            continue;
        }
        for order in orders_for_level(&level, BUDGET).unwrap() {
            let o0 = trace_zero_form(&order).unwrap();
            let inv = invariants(&o0).unwrap();
            let g = valuation(inv.level, 2).unwrap() as i64;
            let h = valuation(inv.disc, 2).unwrap() as i64;
            assert!(
                g <= h && h <= 2 * g - 2,
                "expected the middle range, got g={g}, h={h}"
            );
            let image = phi_p(&o0, 2).unwrap();
            assert_eq!(aut_count(&o0), aut_count(&image));
            let back = phi_p_inv(&image, 2).unwrap();
            assert_eq!(
                back,
                reduce(&o0),
                "round trip at ({}, {})",
                level.n1(),
                level.n2()
            );
        }
    }
}

#[test]
fn phi_odd_round_trips_across_levels() {
    for level in admissible_levels_up_to(21) {
        let odd_primes: Vec<Int> = level
            .n1_factors()
            .primes()
            .chain(level.n2_factors().primes())
            .filter(|&p| p != 2)
            .collect();
        for f in s_zero_genus(&level, BUDGET).unwrap() {
            for &p in &odd_primes {
                let image = phi_p(&f, p).unwrap();
                assert_eq!(aut_count(&f), aut_count(&image));
                let back = phi_p_inv(&image, p).unwrap();
                assert_eq!(
                    back,
                    reduce(&f),
                    "round trip at ({}, {}), p = {p}",
                    level.n1(),
                    level.n2()
                );
            }
        }
    }
}
