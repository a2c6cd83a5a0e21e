use skewlab_core::diophantine::{bad_margin, ContinuedFraction, ConvergentTable};
use skewlab_core::dynamics::ergodic::ergodic_sum_at;
use skewlab_core::dynamics::{map_from_name, RotationVector};
use skewlab_core::fourier::{coboundary_solve, l2_sum_growth, FourierSpectrum};
use skewlab_core::partition::{check_eqfunct, default_schedule, emit_svg, SvgStyle, TorusPartition};
use skewlab_core::probes::{induced_cocycle, l2_growth_probe, simulate_skew, BoxSet, FiberMode};
use skewlab_core::{parse_real, ErrorKind, DEFAULT_BITS};

fn alpha() -> RotationVector {
    RotationVector::parse("sqrt2-1, sqrt3-1", DEFAULT_BITS).unwrap()
}

#[test]
fn coboundary_transfer_solves_parabola() {
    let a = RotationVector::parse("sqrt2-1", DEFAULT_BITS).unwrap();
    let (psi, rep) = coboundary_solve(&FourierSpectrum::parabola(1000), |x| x * (1.0 - x) - 1.0 / 6.0, &a, 4000).unwrap();
    assert!(rep.residual < 1e-4, "{rep:?}");
    assert!(rep.residual <= rep.truncation_estimate);
    // psi(x + alpha) - psi(x) matches the map at an interior point
    let x = 0.3141;
    let lhs = psi.eval([x + a.as_f64()[0], 0.0]) - psi.eval([x, 0.0]);
    assert!((lhs - (x * (1.0 - x) - 1.0 / 6.0)).abs() < 1e-3);
}

#[test]
fn bad_rotation_has_bounded_sawtooth_sums() {
    let a = RotationVector::parse("sqrt2-1", DEFAULT_BITS).unwrap();
    let psi = map_from_name("psi", Some(1)).unwrap();
    let r = l2_growth_probe(&a, &psi, &[1000, 4000, 16000, 64000], 64, 11, 100).unwrap();
    assert!(r.slope < 0.2, "{r:?}");
    assert!(r.consistent);
}

#[test]
fn spectral_chain_holds_for_two_frequencies() {
    let tri = skewlab_core::dynamics::TriangleSpec::new(1.0, 1.0, 1.0).unwrap();
    let spectrum = FourierSpectrum::triangle(&tri, 16, true);
    let rows = l2_sum_growth(&spectrum, &alpha(), &[16, 64, 256], 1.5).unwrap();
    assert!(rows.iter().all(|r| r.violations == 0 && r.exact <= r.min_bound * (1.0 + 1e-12)));
}

#[test]
fn eqfunct_on_default_schedule() {
    let a = alpha();
    let sched = default_schedule(&a, 6).unwrap();
    assert_eq!(sched, vec![1, 3, 4, 11, 15, 41]);
    let r = check_eqfunct(&a, &sched).unwrap();
    assert!(r.pass(), "{:?}", r.checks);
}

#[test]
fn partition_location_agrees_with_codings() {
    let a = alpha();
    let p = TorusPartition::build(&a, 7, true).unwrap();
    for c in p.cells.iter().take(40) {
        assert_eq!(p.locate(c.representative()), c.id);
    }
    let svg = emit_svg(&p, &SvgStyle::default());
    assert_eq!(svg.matches("<polygon").count(), p.card());
}

#[test]
fn skew_orbit_and_induced_sums_agree() {
    let a = alpha();
    let m = map_from_name("xy_quarter", None).unwrap();
    let o = simulate_skew(&a, &m, &FiberMode::Real, [0.21, 0.43], &[0.0], 5000, 1).unwrap();
    let b = BoxSet::whole();
    let ind = induced_cocycle(&a, &m, &b, [0.21, 0.43], 5000, 2).unwrap();
    for (k, (_, v)) in ind.returns.iter().enumerate().step_by(97) {
        assert!((o.samples[k + 1].z[0] - v[0]).abs() < 1e-9);
    }
    let direct = ergodic_sum_at(&m, &a, [0.21, 0.43], 5000).unwrap();
    assert!((o.samples.last().unwrap().z[0] - direct.values[0]).abs() < 1e-9);
}

#[test]
fn golden_margin_and_rational_rejection() {
    let g = parse_real("golden", DEFAULT_BITS).unwrap().to_hp(DEFAULT_BITS);
    let zero = parse_real("0", DEFAULT_BITS).unwrap().to_hp(DEFAULT_BITS);
    let m = bad_margin(&g, &zero, 10_000);
    assert!(m.margin > 0.38 && m.margin < 0.3821);
    let err = ContinuedFraction::from_str("355/113", DEFAULT_BITS).and_then(|mut cf| ConvergentTable::build(&mut cf, 10).map(|_| ()));
    assert_eq!(err.unwrap_err().kind(), ErrorKind::Config);
}
