//! Gauss–Legendre rules and adaptive Gauss–Kronrod integration.

use std::sync::OnceLock;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Cached 20-point rule used for per-cell integration of smooth pieces.
pub fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Fixed-rule integral over `[a, b]`.
pub fn gl_integrate(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gl20();
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    x.iter().zip(w).map(|(xi, wi)| wi * f(m + h * xi)).sum::<f64>() * h
}

/// Fixed-rule integral over a rectangle.
pub fn gl_integrate_2d(x0: f64, x1: f64, y0: f64, y1: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    gl_integrate(x0, x1, |x| gl_integrate(y0, y1, |y| f(x, y)))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>>(
    a: f64,
    b: f64,
    f: &impl Fn(f64) -> T,
    norm: impl Fn(T) -> f64,
) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let kk = k * h;
    let gg = g * h;
    let err = norm(kk + gg * -1.0);
    (kk, err)
}

/// Adaptive Gauss–Kronrod (7/15) integration of a generic vector-like value.
pub fn adaptive_gk<T>(a: f64, b: f64, tol: f64, max_depth: u32, f: &impl Fn(f64) -> T, norm: &impl Fn(T) -> f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let (v, e) = gk15(a, b, f, norm);
    if e <= tol || max_depth == 0 || (b - a) < 1e-14 {
        return v;
    }
    let m = 0.5 * (a + b);
    adaptive_gk(a, m, 0.5 * tol, max_depth - 1, f, norm) + adaptive_gk(m, b, 0.5 * tol, max_depth - 1, f, norm)
}

/// Adaptive integral of a real function.
pub fn integrate(a: f64, b: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    adaptive_gk(a, b, tol, 40, &f, &|v: f64| v.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_polynomials_exact() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!((gl_integrate(0.0, 1.0, |x| x.powi(30)) - 1.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_kinks() {
        let v = integrate(0.0, 1.0, 1e-13, |x| (x - 0.3).abs());
        assert!((v - (0.3f64.powi(2) + 0.7f64.powi(2)) / 2.0).abs() < 1e-12);
        let v = integrate(0.0, std::f64::consts::PI, 1e-13, f64::sin);
        assert!((v - 2.0).abs() < 1e-12);
    }
}
