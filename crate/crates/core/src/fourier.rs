//! Fourier coefficients of triangle indicators and sawtooth-type maps,
//! decay fits, Dirichlet-kernel growth bounds and 1D coboundary solving.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{RotationVector, TriangleSpec};
use crate::error::{Error, Result};
use crate::hp::{turn_dist, turn_mul, turn_to_f64, Turn};
use crate::sum::NeumaierSum;

/// `|u|_+ = max(|u|, 1)`.
#[inline]
pub fn abs_plus(u: f64) -> f64 {
    u.abs().max(1.0)
}

#[inline]
fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// `int_0^len exp(-2 pi i w x) dx`, continuous through `w = 0`.
#[inline]
fn edge_integral(w: f64, len: f64) -> Complex64 {
    let z = PI * w * len;
    Complex64::from_polar(len * sinc(z), -z)
}

/// Fourier coefficient `int_tri exp(-2 pi i (s x + t y))` of the triangle indicator.
///
/// For `t != 0` the inner integral in `y` leaves one term per slanted edge;
/// a vanishing edge frequency (`bt + as = 0` or `(b-c)t + as = 0`) is the
/// `w -> 0` limit of [`edge_integral`]. For `t = 0` the vertical profile
/// `c (1 - x/a)` is integrated directly.
pub fn triangle_coeff(tri: &TriangleSpec, s: i64, t: i64) -> Complex64 {
    let (a, b, c) = (tri.a, tri.b, tri.c);
    let (sf, tf) = (s as f64, t as f64);
    if t == 0 {
        if s == 0 {
            return Complex64::new(0.5 * a * c, 0.0);
        }
        let w = 2.0 * PI * sf;
        let iw = Complex64::new(0.0, w);
        let ea = Complex64::from_polar(1.0, -w * a);
        let i0 = (Complex64::new(1.0, 0.0) - ea) / iw;
        let i1 = (-ea * a + i0) / iw;
        return (i0 - i1 / a) * c;
    }
    let lower = edge_integral(sf + tf * b / a, a);
    let upper = Complex64::from_polar(1.0, -2.0 * PI * tf * c) * edge_integral(sf + tf * (b - c) / a, a);
    (lower - upper) / Complex64::new(0.0, 2.0 * PI * tf)
}

/// Pair of linear forms `(l, l')` contributing `1/(|l(h)|_+ |l'(h)|_+)` to a decay model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FormPair(pub [f64; 2], pub [f64; 2]);

impl FormPair {
    pub fn weight(&self, h: [i64; 2]) -> f64 {
        let ev = |l: [f64; 2]| l[0] * h[0] as f64 + l[1] * h[1] as f64;
        1.0 / (abs_plus(ev(self.0)) * abs_plus(ev(self.1)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierSpectrum {
    /// 1 or 2; 1D spectra store `h = [r, 0]`.
    pub dims: usize,
    pub h_max: i64,
    pub coeffs: BTreeMap<[i64; 2], Complex64>,
    pub decay: Option<Vec<FormPair>>,
}

impl FourierSpectrum {
    pub fn get(&self, h: [i64; 2]) -> Complex64 {
        self.coeffs.get(&h).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|c_h + conj(c_{-h})|` over the table.
    pub fn hermitian_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(h, c)| (c - self.get([-h[0], -h[1]]).conj()).norm())
            .fold(0.0, f64::max)
    }

    fn from_fn_2d(h_max: i64, decay: Option<Vec<FormPair>>, f: impl Fn(i64, i64) -> Complex64 + Sync) -> Self {
        let rows: Vec<Vec<([i64; 2], Complex64)>> = (-h_max..=h_max)
            .into_par_iter()
            .map(|s| (-h_max..=h_max).map(|t| ([s, t], f(s, t))).collect())
            .collect();
        FourierSpectrum { dims: 2, h_max, coeffs: rows.into_iter().flatten().collect(), decay }
    }

    fn from_fn_1d(h_max: i64, decay: Option<Vec<FormPair>>, f: impl Fn(i64) -> Complex64) -> Self {
        let coeffs = (-h_max..=h_max).map(|r| ([r, 0], f(r))).collect();
        FourierSpectrum { dims: 1, h_max, coeffs, decay }
    }

    /// `1_tri - centered * area` over `|s|, |t| <= h_max`, with the three form pairs
    /// `{t, s}`, `{t, bt + as}`, `{t, (b-c)t + as}` as decay model.
    pub fn triangle(tri: &TriangleSpec, h_max: i64, centered: bool) -> Self {
        let (a, b, c) = (tri.a, tri.b, tri.c);
        let forms = vec![FormPair([0.0, 1.0], [1.0, 0.0]), FormPair([0.0, 1.0], [a, b]), FormPair([0.0, 1.0], [a, b - c])];
        let area = tri.area();
        Self::from_fn_2d(h_max, Some(forms), move |s, t| {
            let v = triangle_coeff(tri, s, t);
            if centered && s == 0 && t == 0 {
                v - area
            } else {
                v
            }
        })
    }

    /// `{x} - 1/2`: `c_r = i/(2 pi r)`.
    pub fn sawtooth(h_max: i64) -> Self {
        Self::from_fn_1d(h_max, Some(vec![FormPair([1.0, 0.0], [0.0, 0.0])]), |r| {
            if r == 0 {
                Complex64::default()
            } else {
                Complex64::new(0.0, 1.0 / (2.0 * PI * r as f64))
            }
        })
    }

    /// `x(1 - x) - 1/6`: `c_n = -1/(2 pi^2 n^2)`.
    pub fn parabola(h_max: i64) -> Self {
        Self::from_fn_1d(h_max, Some(vec![FormPair([1.0, 0.0], [1.0, 0.0])]), |r| {
            if r == 0 {
                Complex64::default()
            } else {
                Complex64::new(-1.0 / (2.0 * PI * PI * (r * r) as f64), 0.0)
            }
        })
    }

    /// `cos(2 pi <h0, x>)`.
    pub fn harmonic(h0: [i64; 2], dims: usize, h_max: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if h0 != [0, 0] {
            coeffs.insert(h0, Complex64::new(0.5, 0.0));
            coeffs.insert([-h0[0], -h0[1]], Complex64::new(0.5, 0.0));
        } else {
            coeffs.insert(h0, Complex64::new(1.0, 0.0));
        }
        FourierSpectrum { dims, h_max, coeffs, decay: None }
    }

    pub fn zero(dims: usize, h_max: i64) -> Self {
        FourierSpectrum { dims, h_max, coeffs: BTreeMap::new(), decay: None }
    }

    /// Partial Fourier sum at `x`.
    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let mut acc = NeumaierSum::new();
        for (h, c) in &self.coeffs {
            let ph = 2.0 * PI * (h[0] as f64 * x[0] + h[1] as f64 * x[1]);
            acc.add((c * Complex64::from_polar(1.0, ph)).re);
        }
        acc.value()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub h_max: i64,
    pub fitted_c: f64,
    /// Frequency attaining the fitted constant.
    pub witness: Option<[i64; 2]>,
    pub violations: Vec<[i64; 2]>,
}

/// Smallest `C` with `|c_h| <= C * sum_k w_k(h)` over `|h|_inf <= h_max`.
pub fn decay_bound_check(spectrum: &FourierSpectrum, h_max: i64) -> Result<DecayReport> {
    let forms = spectrum.decay.as_ref().ok_or_else(|| Error::Config("spectrum carries no decay model".into()))?;
    let bound = |h: [i64; 2]| forms.iter().map(|f| f.weight(h)).sum::<f64>();
    let in_ball = |h: &[i64; 2]| h[0].abs() <= h_max && h[1].abs() <= h_max;
    let mut fitted = 0.0;
    let mut witness = None;
    for (h, c) in spectrum.coeffs.iter().filter(|(h, _)| in_ball(h)) {
        let r = c.norm() / bound(*h);
        if r > fitted {
            fitted = r;
            witness = Some(*h);
        }
    }
    let violations = spectrum
        .coeffs
        .iter()
        .filter(|(h, c)| in_ball(h) && c.norm() > fitted * bound(**h) * (1.0 + 1e-12))
        .map(|(h, _)| *h)
        .collect();
    Ok(DecayReport { h_max, fitted_c: fitted, witness, violations })
}

/// `<h, alpha>` mod 1 as a turn.
#[inline]
pub fn dot_turn(h: [i64; 2], alpha: [Turn; 2]) -> Turn {
    alpha[0].wrapping_mul(h[0] as i128 as u128).wrapping_add(alpha[1].wrapping_mul(h[1] as i128 as u128))
}

/// `|sum_{k<n} exp(2 pi i k theta)|` with `n theta` reduced exactly.
pub fn dirichlet_abs(theta: Turn, n: u64) -> f64 {
    let den = (PI * turn_to_f64(theta)).sin().abs();
    if den < 1e-300 {
        return n as f64;
    }
    (PI * turn_to_f64(turn_mul(theta, n))).sin().abs() / den
}

fn alpha_turns(spectrum: &FourierSpectrum, alpha: &RotationVector) -> Result<[Turn; 2]> {
    if alpha.rho() < spectrum.dims {
        return Err(Error::Config(format!("spectrum on T^{} but alpha has {} component(s)", spectrum.dims, alpha.rho())));
    }
    let t = alpha.turns();
    Ok(if spectrum.dims == 1 { [t[0], 0] } else { t })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u64,
    pub exact: f64,
    pub min_bound: f64,
    pub series_bound: f64,
    /// Frequencies where a termwise inequality failed.
    pub violations: usize,
}

/// For each `N`: `sum |c_h|^2 |D_N(h.alpha)|^2`, the `min(N, 1/||h.alpha||)^2`
/// bound and `N^(2-t) sum |c_h|^2 / ||h.alpha||^t`, checked term by term.
pub fn l2_sum_growth(spectrum: &FourierSpectrum, alpha: &RotationVector, schedule: &[u64], t: f64) -> Result<Vec<GrowthRow>> {
    if !(t > 1.0 && t < 2.0) {
        return Err(Error::Config(format!("exponent t = {t} must lie in (1, 2)")));
    }
    let a = alpha_turns(spectrum, alpha)?;
    let terms: Vec<(f64, Turn, f64)> = spectrum
        .coeffs
        .iter()
        .filter(|(h, c)| **h != [0, 0] && c.norm_sqr() > 0.0)
        .map(|(h, c)| {
            let th = dot_turn(*h, a);
            (c.norm_sqr(), th, turn_dist(th))
        })
        .collect();
    if terms.iter().any(|x| x.2 < 1e-15) {
        return Err(Error::Degeneracy("resonant frequency: ||h.alpha|| < 1e-15".into()));
    }
    let series: f64 = terms.iter().map(|&(w, _, d)| w / d.powf(t)).collect::<NeumaierSum>().value();
    Ok(schedule
        .par_iter()
        .map(|&n| {
            let nf = n as f64;
            let (mut ex, mut mb, mut bad) = (NeumaierSum::new(), NeumaierSum::new(), 0);
            let slack = 1.0 + 1e-12;
            for &(w, th, d) in &terms {
                let dk = dirichlet_abs(th, n);
                let m = nf.min(1.0 / d);
                let sb = nf.powf(2.0 - t) / d.powf(t);
                if dk * dk > m * m * slack || m * m > sb * slack {
                    bad += 1;
                }
                ex.add(w * dk * dk);
                mb.add(w * m * m);
            }
            GrowthRow { n, exact: ex.value(), min_bound: mb.value(), series_bound: nf.powf(2.0 - t) * series, violations: bad }
        })
        .collect())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `sum_{0 < |h|_inf <= h_max} 1 / (R(h)^2 ||h.alpha||^t)` with `R(h) = |l1(h)|_+ |l2(h)|_+`.
pub fn niederreiter_sum(alpha: &RotationVector, forms: FormPair, t: f64, h_max: i64) -> Result<f64> {
    if t <= 1.0 {
        return Err(Error::Config(format!("exponent t = {t} must exceed 1")));
    }
    let a = alpha.turns();
    let two_d = alpha.rho() == 2;
    let rows: Vec<Result<f64>> = (-h_max..=h_max)
        .into_par_iter()
        .map(|h1| {
            let mut acc = NeumaierSum::new();
            let range = if two_d { -h_max..=h_max } else { 0..=0 };
            for h2 in range {
                if h1 == 0 && h2 == 0 {
                    continue;
                }
                let h = [h1, h2];
                let d = turn_dist(dot_turn(h, a));
                if d < 1e-15 {
                    return Err(Error::Degeneracy(format!("resonant frequency {h:?}")));
                }
                let w = forms.weight(h);
                acc.add(w * w / d.powf(t));
            }
            Ok(acc.value())
        })
        .collect();
    let mut total = NeumaierSum::new();
    for r in rows {
        total.add(r?);
    }
    Ok(total.value())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoboundaryReport {
    pub h_max: i64,
    pub grid: usize,
    pub residual: f64,
    pub argmax: f64,
    /// Fitted tail `sum_{|n| > h_max} |c_n(phi)|`.
    pub truncation_estimate: f64,
    /// `sum |c_n(psi)|` over the truncated table.
    pub psi_l1: f64,
    pub min_dist: f64,
}

/// Transfer function solution of `phi = psi o T - psi` in 1D.
pub fn coboundary_spectrum(spectrum: &FourierSpectrum, alpha: &RotationVector) -> Result<(FourierSpectrum, f64)> {
    if spectrum.dims != 1 {
        return Err(Error::Config("coboundary solving needs a 1D spectrum".into()));
    }
    if spectrum.get([0, 0]).norm() > 1e-12 {
        return Err(Error::Config("map is not centered: c_0 != 0".into()));
    }
    let a = alpha.turns()[0];
    let mut out = BTreeMap::new();
    let mut min_dist = f64::INFINITY;
    for (h, c) in &spectrum.coeffs {
        if *h == [0, 0] {
            continue;
        }
        let th = dot_turn(*h, [a, 0]);
        let d = turn_dist(th);
        if d < 1e-15 {
            return Err(Error::Degeneracy(format!("near resonance at n = {}: ||n alpha|| = {d:e}", h[0])));
        }
        min_dist = min_dist.min(d);
        let den = Complex64::from_polar(1.0, 2.0 * PI * turn_to_f64(th)) - 1.0;
        out.insert(*h, c / den);
    }
    Ok((FourierSpectrum { dims: 1, h_max: spectrum.h_max, coeffs: out, decay: None }, min_dist))
}

/// Dense evaluation of a 1D spectrum at the points `xs` by power recurrences.
fn eval_1d_many(spectrum: &FourierSpectrum, xs: &[f64]) -> Vec<f64> {
    let h = spectrum.h_max;
    let pos: Vec<Complex64> = (1..=h).map(|n| spectrum.get([n, 0])).collect();
    let neg: Vec<Complex64> = (1..=h).map(|n| spectrum.get([-n, 0])).collect();
    let c0 = spectrum.get([0, 0]).re;
    xs.par_iter()
        .map(|&x| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * x);
            let mut zn = Complex64::new(1.0, 0.0);
            let mut acc = NeumaierSum::new();
            acc.add(c0);
            for n in 0..h as usize {
                if n % 64 == 63 {
                    zn = Complex64::from_polar(1.0, 2.0 * PI * x * (n + 1) as f64);
                } else {
                    zn *= z;
                }
                acc.add((pos[n] * zn + neg[n] * zn.conj()).re);
            }
            acc.value()
        })
        .collect()
}

/// Tail `sum_{|n| > h_max} |c_n|` from a power-law fit to the top half of the table.
pub fn tail_estimate(spectrum: &FourierSpectrum) -> f64 {
    let h = spectrum.h_max;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in (h / 2).max(1)..=h {
        let m = spectrum.get([n, 0]).norm() + spectrum.get([-n, 0]).norm();
        if m > 0.0 {
            xs.push(n as f64);
            ys.push(m);
        }
    }
    if xs.len() < 2 {
        return 0.0;
    }
    let p = -loglog_slope(&xs, &ys);
    if p <= 1.0 {
        return f64::INFINITY;
    }
    let k = ys.last().unwrap() * xs.last().unwrap().powf(p);
    k * (h as f64 + 0.5).powf(1.0 - p) / (p - 1.0)
}

/// Solves the coboundary equation on the truncated spectrum and measures
/// `max |phi(x) - psi(x + alpha) + psi(x)|` on the midpoint grid of `grid` points.
pub fn coboundary_solve(spectrum: &FourierSpectrum, phi: impl Fn(f64) -> f64 + Sync, alpha: &RotationVector, grid: usize) -> Result<(FourierSpectrum, CoboundaryReport)> {
    let (psi, min_dist) = coboundary_spectrum(spectrum, alpha)?;
    let a = turn_to_f64(alpha.turns()[0]);
    let xs: Vec<f64> = (0..grid).map(|i| (i as f64 + 0.5) / grid as f64).collect();
    let shifted: Vec<f64> = xs.iter().map(|x| (x + a).fract()).collect();
    let p0 = eval_1d_many(&psi, &xs);
    let p1 = eval_1d_many(&psi, &shifted);
    let (mut res, mut arg) = (0.0, 0.0);
    for i in 0..grid {
        let r = (phi(xs[i]) - p1[i] + p0[i]).abs();
        if r > res {
            res = r;
            arg = xs[i];
        }
    }
    let psi_l1 = psi.coeffs.values().map(|c| c.norm()).collect::<NeumaierSum>().value();
    let report = CoboundaryReport { h_max: spectrum.h_max, grid, residual: res, argmax: arg, truncation_estimate: tail_estimate(spectrum), psi_l1, min_dist };
    Ok((psi, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    fn tri(a: f64, b: f64, c: f64) -> TriangleSpec {
        TriangleSpec::new(a, b, c).unwrap()
    }

    /// Nested adaptive quadrature over the triangle, independent of the closed form.
    fn oracle(t: &TriangleSpec, s: i64, tt: i64) -> Complex64 {
        let part = |f: fn(f64) -> f64| {
            integrate(0.0, t.a, 1e-12, |x| {
                let lo = t.b * x / t.a;
                let hi = t.c + (t.b - t.c) * x / t.a;
                integrate(lo, hi, 1e-13, |y| f(-2.0 * PI * (s as f64 * x + tt as f64 * y)))
            })
        };
        Complex64::new(part(f64::cos), part(f64::sin))
    }

    #[test]
    fn area_at_origin() {
        assert_eq!(triangle_coeff(&tri(1.0, 1.0, 1.0), 0, 0), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn matches_quadrature_oracle() {
        for t in [tri(1.0, 1.0, 1.0), tri(0.7, 0.3, 0.5), tri(1.0, -0.4, 0.8)] {
            for (s, u) in [(3, -2), (0, 5), (4, 0), (-1, 1), (2, -2), (7, 8)] {
                let d = (triangle_coeff(&t, s, u) - oracle(&t, s, u)).norm();
                assert!(d < 1e-9, "{t:?} ({s},{u}): {d:e}");
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let t = tri(0.7, 0.3, 0.5);
        for (s, u) in [(3, -2), (1, 4), (0, 3)] {
            assert!((triangle_coeff(&t, s, u) - triangle_coeff(&t, -s, -u).conj()).norm() < 1e-15);
        }
        assert!(FourierSpectrum::triangle(&t, 6, true).hermitian_defect() < 1e-15);
    }

    #[test]
    fn sawtooth_constant_is_one_over_two_pi() {
        let r = decay_bound_check(&FourierSpectrum::sawtooth(100), 100).unwrap();
        assert!((r.fitted_c - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(r.violations.is_empty());
        // direct coefficient of {x} - 1/2 at r = 3
        let c3 = Complex64::new(
            integrate(0.0, 1.0, 1e-13, |x| (x - 0.5) * (6.0 * PI * x).cos()),
            -integrate(0.0, 1.0, 1e-13, |x| (x - 0.5) * (6.0 * PI * x).sin()),
        );
        assert!((c3 - FourierSpectrum::sawtooth(3).get([3, 0])).norm() < 1e-12);
    }

    #[test]
    fn zero_spectrum_fits_zero() {
        let mut z = FourierSpectrum::zero(2, 4);
        z.decay = Some(vec![FormPair([1.0, 0.0], [0.0, 1.0])]);
        assert_eq!(decay_bound_check(&z, 4).unwrap().fitted_c, 0.0);
    }

    #[test]
    fn single_harmonic_growth_is_dirichlet() {
        let a = RotationVector::parse("sqrt2-1, sqrt3-1", 256).unwrap();
        let h = FourierSpectrum::harmonic([1, 2], 2, 2);
        let rows = l2_sum_growth(&h, &a, &[1, 10, 1000], 1.5).unwrap();
        let th = 2f64.sqrt() - 1.0 + 2.0 * (3f64.sqrt() - 1.0);
        for r in rows {
            let d = ((PI * r.n as f64 * th).sin() / (PI * th).sin()).powi(2);
            assert!((r.exact - 2.0 * 0.25 * d).abs() < 1e-9 * d.max(1.0), "{r:?}");
            assert_eq!(r.violations, 0);
        }
    }

    #[test]
    fn growth_rejects_bad_exponent() {
        let a = RotationVector::parse("golden", 256).unwrap();
        assert!(l2_sum_growth(&FourierSpectrum::sawtooth(4), &a, &[4], 2.0).is_err());
        assert!(niederreiter_sum(&a, FormPair([1.0, 0.0], [0.0, 0.0]), 1.0, 4).is_err());
    }

    #[test]
    fn harmonic_coboundary_is_exact() {
        let a = RotationVector::parse("sqrt2-1", 256).unwrap();
        let s = FourierSpectrum::harmonic([1, 0], 1, 1);
        let (_, r) = coboundary_solve(&s, |x| (2.0 * PI * x).cos(), &a, 1000).unwrap();
        assert!(r.residual < 1e-13, "{r:?}");
    }

    #[test]
    fn parabola_coboundary_residual() {
        let a = RotationVector::parse("sqrt2-1", 256).unwrap();
        let phi = |x: f64| x * (1.0 - x) - 1.0 / 6.0;
        let mut prev = f64::INFINITY;
        for h in [100, 300, 1000] {
            let (_, r) = coboundary_solve(&FourierSpectrum::parabola(h), phi, &a, 10_000).unwrap();
            assert!(r.residual < prev);
            assert!(r.residual <= r.truncation_estimate * 1.01, "{r:?}");
            prev = r.residual;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn resonance_is_refused() {
        let a = RotationVector::parse("sqrt2-1", 256).unwrap();
        let mut s = FourierSpectrum::parabola(3);
        s.coeffs.insert([0, 0], Complex64::new(0.1, 0.0));
        assert!(coboundary_spectrum(&s, &a).is_err());
    }
}
