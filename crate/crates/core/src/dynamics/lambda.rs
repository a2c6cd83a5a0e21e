//! Integrated partial derivatives and the two-sided variation bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ergodic::{check_dims, ergodic_sum_at};
use super::maps::{MapClass, PlanarMap};
use super::rotation::RotationVector;
use crate::error::{Error, Result};
use crate::hp::{turn_mul, turn_to_f64};
use crate::quad::{gl_integrate, gl_integrate_2d};

pub const LAMBDA_AGREEMENT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaFunctionals {
    /// `[lambda_1, lambda_2]` per component from one-sided boundary traces.
    pub boundary: Vec<[f64; 2]>,
    /// Same quantities from cellwise quadrature of the partial derivatives.
    pub quadrature: Vec<[f64; 2]>,
    /// Determinant of `[[l1(phi1), l2(phi1)], [l1(phi2), l2(phi2)]]` for two components.
    pub det: Option<f64>,
}

fn cell_anchor(map: &PlanarMap, r: [f64; 4]) -> ([f64; 2], f64, f64) {
    let (y0, y1) = if map.rho == 2 { (r[2], r[3]) } else { (0.0, 1.0) };
    ([0.5 * (r[0] + r[1]), 0.5 * (y0 + y1)], y0, y1)
}

pub fn lambda_functionals(map: &PlanarMap) -> Result<LambdaFunctionals> {
    if map.class == MapClass::Triangle {
        return Err(Error::Config("derivative functionals need rectangle cells".into()));
    }
    let axes = map.rho;
    let mut boundary = vec![[0.0; 2]; map.dim()];
    let mut quadrature = vec![[0.0; 2]; map.dim()];
    for cell in map.cells() {
        let r = map.cell_rect(cell);
        let (anchor, y0, y1) = cell_anchor(map, r);
        for (k, c) in map.components.iter().enumerate() {
            // d/dx1: traces on the left and right edges, integrated in x2
            let tr1 = |y: f64| c.value_on(anchor, [r[1], y]) - c.value_on(anchor, [r[0], y]);
            boundary[k][0] += if axes == 2 { gl_integrate(y0, y1, tr1) } else { tr1(0.0) };
            quadrature[k][0] += if axes == 2 {
                gl_integrate_2d(r[0], r[1], y0, y1, |x, y| c.grad_on(anchor, [x, y])[0])
            } else {
                gl_integrate(r[0], r[1], |x| c.grad_on(anchor, [x, 0.0])[0])
            };
            if axes == 2 {
                let tr2 = |x: f64| c.value_on(anchor, [x, y1]) - c.value_on(anchor, [x, y0]);
                boundary[k][1] += gl_integrate(r[0], r[1], tr2);
                quadrature[k][1] += gl_integrate_2d(r[0], r[1], y0, y1, |x, y| c.grad_on(anchor, [x, y])[1]);
            }
        }
    }
    for k in 0..map.dim() {
        for ax in 0..axes {
            let (b, q) = (boundary[k][ax], quadrature[k][ax]);
            if (b - q).abs() > LAMBDA_AGREEMENT {
                return Err(Error::MapValidation(format!(
                    "inconsistent pieces: lambda_{} of component {k} is {b} by traces but {q} by quadrature",
                    ax + 1
                )));
            }
        }
    }
    let det = (map.dim() == 2 && axes == 2).then(|| boundary[0][0] * boundary[1][1] - boundary[0][1] * boundary[1][0]);
    Ok(LambdaFunctionals { boundary, quadrature, det })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub n: u64,
    pub pairs: usize,
    pub lambda1: f64,
    /// Fraction with `n|l1|u/2 <= |diff| <= 2n|l1|u` and matching sign.
    pub pass_fraction: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Samples pairs `(x, x + u e1)` inside one cell of the `n`-step partition
/// and tests the two-sided bound on `phi_n(x + u e1) - phi_n(x)`.
pub fn derivative_sandwich_check(map: &PlanarMap, alpha: &RotationVector, n: u64, pairs: usize, seed: u64, comp: usize) -> Result<SandwichReport> {
    check_dims(map, alpha)?;
    if map.rho != 2 {
        return Err(Error::Config("variation check needs a map on T^2".into()));
    }
    let lam = lambda_functionals(map)?.boundary[comp][0];
    if lam.abs() < 1e-12 {
        return Err(Error::Config("lambda_1 vanishes".into()));
    }
    if n == 0 {
        return Err(Error::Sampling("n must be positive".into()));
    }
    // discontinuities in x1 of phi_n: beta - k alpha1
    let a1 = alpha.turns()[0];
    let mut cuts: Vec<f64> = Vec::with_capacity(n as usize * map.breaks[0].len());
    for k in 0..n {
        let s = turn_to_f64(turn_mul(a1, k));
        for &b in &map.breaks[0] {
            let v = b - s;
            cuts.push(v - v.floor());
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut pass, mut lo, mut hi) = (0usize, f64::INFINITY, 0.0f64);
    let mut done = 0;
    let mut attempts = 0;
    while done < pairs {
        attempts += 1;
        if attempts > 100 * pairs + 100 {
            return Err(Error::Sampling(format!("no same-cell pair found at n = {n}")));
        }
        let x1: f64 = rng.gen();
        let x2: f64 = rng.gen();
        let i = cuts.partition_point(|&c| c <= x1);
        let right = if i < cuts.len() { cuts[i] } else { cuts[0] + 1.0 };
        let room = right - x1;
        if room < 1e-12 {
            continue;
        }
        let u = room * rng.gen_range(0.1..0.9);
        let a = ergodic_sum_at(map, alpha, [x1, x2], n)?;
        let b = ergodic_sum_at(map, alpha, [x1 + u, x2], n)?;
        if a.boundary_hits > 0 || b.boundary_hits > 0 {
            continue;
        }
        let diff = b.values[comp] - a.values[comp];
        let ratio = diff / (n as f64 * lam * u);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        if (0.5..=2.0).contains(&ratio) {
            pass += 1;
        }
        done += 1;
    }
    Ok(SandwichReport { n, pairs, lambda1: lam, pass_fraction: pass as f64 / pairs.max(1) as f64, min_ratio: lo, max_ratio: hi })
}

/// Smallest `n` of the schedule from which every later entry passes fully.
pub fn empirical_threshold(reports: &[SandwichReport]) -> Option<u64> {
    let mut out = None;
    for r in reports.iter().rev() {
        if r.pass_fraction < 1.0 {
            break;
        }
        out = Some(r.n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::maps::{example_gamma, map_from_name};

    #[test]
    fn xy_quarter_lambda() {
        let m = map_from_name("xy_quarter", None).unwrap();
        let l = lambda_functionals(&m).unwrap();
        assert!((l.boundary[0][0] - 0.5).abs() < 1e-12);
        assert!((l.quadrature[0][1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gamma_closed_form() {
        let m = map_from_name("gamma(3/2, 5/3)", None).unwrap();
        let l = lambda_functionals(&m).unwrap();
        assert!((l.boundary[0][0] - 0.65).abs() < 1e-12);
        assert!((example_gamma::lambda1(1.5, 5.0 / 3.0) - 0.65).abs() < 1e-15);
        assert!((l.quadrature[0][1] - example_gamma::lambda2(1.5, 5.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn constant_map_has_zero_lambdas() {
        let m = map_from_name("const(0.3)", Some(2)).unwrap();
        let l = lambda_functionals(&m).unwrap();
        assert_eq!(l.boundary[0], [0.0, 0.0]);
    }

    #[test]
    fn pair_determinant() {
        let (g1, g2) = (1.5, 5.0 / 3.0);
        let m = map_from_name("gamma(3/2, 5/3); xy_quarter", None).unwrap();
        let d = lambda_functionals(&m).unwrap().det.unwrap();
        assert!((d - example_gamma::pair_det(g1, g2)).abs() < 1e-12);
    }

    #[test]
    fn triangle_maps_rejected() {
        assert!(lambda_functionals(&map_from_name("triangle0", None).unwrap()).is_err());
    }

    #[test]
    fn sandwich_holds_for_large_n() {
        let m = map_from_name("xy_quarter", None).unwrap();
        let a = RotationVector::parse("sqrt2-1, sqrt3-1", 256).unwrap();
        let r = derivative_sandwich_check(&m, &a, 2000, 100, 7, 0).unwrap();
        assert_eq!(r.pass_fraction, 1.0, "{r:?}");
    }
}
