use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use skewlab_core::diophantine::{ostrowski_digits, ContinuedFraction, ConvergentTable};
use skewlab_core::dynamics::ergodic::{cocycle_residual, ergodic_sum_at};
use skewlab_core::dynamics::{map_from_name, rotate_turns, RotationVector, TriangleSpec};
use skewlab_core::fourier::FourierSpectrum;
use skewlab_core::partition::TorusPartition;
use skewlab_core::probes::{essential_value_probe, BoxSet, ValueWindow};

const ALPHAS: [&str; 3] = ["sqrt2-1, sqrt3-1", "sqrt2, e", "golden, sqrt2-1"];

fn alpha(i: usize) -> RotationVector {
    RotationVector::parse(ALPHAS[i], 256).unwrap()
}

fn table(expr: &str, depth: usize) -> ConvergentTable {
    let mut cf = ContinuedFraction::from_str(expr, 256).unwrap();
    ConvergentTable::build(&mut cf, depth).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cocycle_identity(i in 0usize..3, x in 0.0f64..1.0, y in 0.0f64..1.0, m in 0u64..400, n in 0u64..400) {
        let map = map_from_name("xy_quarter", None).unwrap();
        let r = cocycle_residual(&map, &alpha(i), [x, y], m, n).unwrap();
        prop_assert!(r <= 1e-9 * (m + n).max(1) as f64);
    }

    #[test]
    fn koksma_at_denominators(x in 0.0f64..1.0, golden in any::<bool>()) {
        let expr = if golden { "golden" } else { "sqrt2-1" };
        let t = table(expr, 20);
        let a = RotationVector::parse(expr, 256).unwrap();
        let psi = map_from_name("psi", Some(1)).unwrap();
        for q in t.q_u64().into_iter().filter(|&q| q <= 20_000) {
            let s = ergodic_sum_at(&psi, &a, [x, 0.0], q).unwrap();
            prop_assert!(s.values[0].abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn rotation_round_trip(i in 0usize..3, x in any::<u128>(), y in any::<u128>(), n in -1_000_000i64..1_000_000) {
        let a = alpha(i);
        prop_assert_eq!(rotate_turns(&a, rotate_turns(&a, [x, y], n), -n), [x, y]);
    }

    #[test]
    fn centered_maps_have_zero_mean(g1 in 1.1f64..3.0, g2 in 1.1f64..3.0, a in 0.2f64..1.0, c in 0.1f64..1.0) {
        let gamma = map_from_name(&format!("gamma({}, {})", g1, g2), None).unwrap();
        prop_assert!(gamma.is_centered());
        let raw = map_from_name(&format!("frac_product({}, {})", g1, g2), None).unwrap();
        prop_assert!(!raw.is_centered());
        if TriangleSpec::new(a, 0.0, c).is_ok() {
            let tri = map_from_name(&format!("centered({}, 0, {})", a, c), None).unwrap();
            prop_assert!(tri.is_centered());
        }
    }

    #[test]
    fn ostrowski_reconstructs(n in 1u64..1_000_000_000, k in 0usize..3) {
        let expr = ["golden", "sqrt2-1", "sqrt3-1"][k];
        let t = table(expr, 60);
        let d = ostrowski_digits(n, &t).unwrap();
        let mut total = BigInt::from(0);
        for (j, dj) in d.iter().enumerate() {
            total += &t.q[j] * BigInt::from(*dj);
            prop_assert!(BigInt::from(*dj) <= t.quotients[j]);
        }
        prop_assert_eq!(total.to_u64().unwrap(), n);
    }

    #[test]
    fn convergent_chain_in_range(k in 0usize..3, depth in 5usize..60) {
        let expr = ["golden", "sqrt2-1", "sqrt3-1"][k];
        let mut cf = ContinuedFraction::from_str(expr, 256).unwrap();
        let t = ConvergentTable::build(&mut cf, depth).unwrap();
        for (n, c) in t.chain_products(cf.value()).iter().enumerate() {
            prop_assert!(*c <= 1.0 + 1e-12);
            if t.q[n + 1] > t.q[n] {
                prop_assert!(*c >= 0.5 - 1e-12);
            }
        }
    }

    #[test]
    fn triangle_spectrum_is_hermitian(a in 0.2f64..1.0, b in -0.9f64..0.9, c in 0.1f64..1.0) {
        if let Ok(tri) = TriangleSpec::new(a, b, c) {
            let s = FourierSpectrum::triangle(&tri, 6, true);
            prop_assert!(s.hermitian_defect() < 1e-12);
        }
    }

    #[test]
    fn partition_invariants_hold(i in 0usize..3, ell in 1usize..14, diagonals in any::<bool>()) {
        let p = TorusPartition::build(&alpha(i), ell, diagonals).unwrap();
        let inv = p.invariants();
        prop_assert!(inv.ok(), "{:?}", inv);
        prop_assert_eq!(p.card(), if diagonals { 3 * ell * ell - ell } else { ell * ell });
    }

    #[test]
    fn window_growth_is_monotone(n in 1u64..300, w in 0.001f64..0.5, extra in 0.0f64..0.5) {
        let a = alpha(0);
        let m = map_from_name("xy_quarter", None).unwrap();
        let b = BoxSet::parse("0,0.6,0.1,1").unwrap();
        let small = essential_value_probe(&a, &m, &b, &ValueWindow::Interval { lo: 0.0, hi: w, abs: true }, &[n], 64).unwrap();
        let big = essential_value_probe(&a, &m, &b, &ValueWindow::Interval { lo: 0.0, hi: w + extra, abs: true }, &[n], 64).unwrap();
        prop_assert!(big.rows[0].hits >= small.rows[0].hits);
    }
}
