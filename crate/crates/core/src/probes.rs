//! Finite experiments on skew products: orbit simulation, near returns,
//! L2 growth, essential-value events, Weyl averages, the shear conjugation
//! and induced cocycles.
//!
//! "Positive measure" means a positive fraction of a uniform grid here.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::ergodic::{check_dims, ergodic_series, ergodic_sum, for_each_orbit_value, sums_on_grid, Grid};
use crate::dynamics::{PlanarMap, RotationVector};
use crate::error::{Error, Result};
use crate::fourier::{dot_turn, loglog_slope};
use crate::hp::{f64_to_turn, turn_dist, turn_mul, turn_to_f64, Turn};
use crate::sum::NeumaierSum;

/// Union of half-open boxes `[x0, x1) x [y0, y1)`, assumed disjoint.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxSet {
    pub boxes: Vec<[f64; 4]>,
}

impl BoxSet {
    pub fn whole() -> Self {
        BoxSet { boxes: vec![[0.0, 1.0, 0.0, 1.0]] }
    }

    /// `"all"` or `"x0,x1,y0,y1; ..."`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Self::whole());
        }
        let mut boxes = vec![];
        for part in s.split(';').filter(|p| !p.trim().is_empty()) {
            let v: Vec<f64> = part
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("box {part:?}: {e}"))))
                .collect::<Result<_>>()?;
            if v.len() != 4 || !(0.0 <= v[0] && v[0] <= v[1] && v[1] <= 1.0 && 0.0 <= v[2] && v[2] <= v[3] && v[3] <= 1.0) {
                return Err(Error::Config(format!("box {part:?} needs 0 <= x0 <= x1 <= 1 and 0 <= y0 <= y1 <= 1")));
            }
            boxes.push([v[0], v[1], v[2], v[3]]);
        }
        Ok(BoxSet { boxes })
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.boxes.iter().any(|b| b[0] <= p[0] && p[0] < b[1] && b[2] <= p[1] && p[1] < b[3])
    }

    pub fn measure(&self) -> f64 {
        self.boxes.iter().map(|b| (b[1] - b[0]) * (b[3] - b[2])).sum()
    }
}

fn to_turns(x: [f64; 2]) -> [Turn; 2] {
    [f64_to_turn(x[0]), f64_to_turn(x[1])]
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub enum FiberMode {
    /// `z in R^d`, `z -> z + phi(x)`.
    Real,
    /// `y in T^d`, `y -> y + phi(x) a` for a scalar map.
    Torus { a: Vec<Turn> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkewSample {
    pub n: u64,
    pub x: [f64; 2],
    pub z: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkewOrbit {
    pub n: u64,
    pub samples: Vec<SkewSample>,
    pub boundary_hits: u64,
    pub degenerate: bool,
    /// `max |z_n - z_0 - phi_n(x_0)| / n` over checked samples (real fibers).
    pub telescoping: f64,
}

fn fiber_step(a: &[Turn], y: &mut [Turn], v: f64) {
    let m = v.round();
    for (yi, ai) in y.iter_mut().zip(a) {
        *yi = if (v - m).abs() < 1e-12 && m.abs() < 1e15 {
            yi.wrapping_add(ai.wrapping_mul(m as i64 as i128 as u128))
        } else {
            yi.wrapping_add(f64_to_turn(turn_to_f64(*ai) * v))
        };
    }
}

pub fn simulate_skew(alpha: &RotationVector, map: &PlanarMap, mode: &FiberMode, x0: [f64; 2], z0: &[f64], n: u64, decimation: u64) -> Result<SkewOrbit> {
    check_dims(map, alpha)?;
    if n > 100_000_000 {
        return Err(Error::Config("orbit length above 1e8".into()));
    }
    let dec = decimation.max(1);
    if n / dec > 1_000_000 {
        return Err(Error::Config(format!("decimation {dec} keeps more than 1e6 samples")));
    }
    let d = match mode {
        FiberMode::Real => map.dim(),
        FiberMode::Torus { a } => {
            if map.dim() != 1 {
                return Err(Error::Config("torus fibers use a scalar map".into()));
            }
            a.len()
        }
    };
    if z0.len() != d {
        return Err(Error::Config(format!("initial fiber point has {} components, expected {d}", z0.len())));
    }
    let xt = to_turns(x0);
    let mut real: Vec<NeumaierSum> = z0.iter().map(|&z| NeumaierSum::from_iter([z])).collect();
    let mut tor: Vec<Turn> = z0.iter().map(|&z| f64_to_turn(z)).collect();
    let mut samples = Vec::new();
    let a = alpha.turns();
    let mut x = xt;
    let emit = |k: u64, x: [Turn; 2], real: &[NeumaierSum], tor: &[Turn]| SkewSample {
        n: k,
        x: [turn_to_f64(x[0]), if map.rho == 2 { turn_to_f64(x[1]) } else { 0.0 }],
        z: match mode {
            FiberMode::Real => real.iter().map(NeumaierSum::value).collect(),
            FiberMode::Torus { .. } => tor.iter().map(|&t| turn_to_f64(t)).collect(),
        },
    };
    samples.push(emit(0, x, &real, &tor));
    let hits = for_each_orbit_value(map, alpha, xt, n, |k, v| {
        match mode {
            FiberMode::Real => {
                for (z, vi) in real.iter_mut().zip(v) {
                    z.add(*vi);
                }
            }
            FiberMode::Torus { a } => fiber_step(a, &mut tor, v[0]),
        }
        x = [x[0].wrapping_add(a[0]), x[1].wrapping_add(if map.rho == 2 { a[1] } else { 0 })];
        if (k + 1) % dec == 0 || k + 1 == n {
            samples.push(emit(k + 1, x, &real, &tor));
        }
    });
    let mut tele = 0.0f64;
    if matches!(mode, FiberMode::Real) {
        let step = (samples.len() / 8).max(1);
        for s in samples.iter().skip(1).step_by(step).chain(samples.last()) {
            if s.n == 0 {
                continue;
            }
            let direct = ergodic_sum(map, alpha, xt, s.n)?;
            for ((z, z0), v) in s.z.iter().zip(z0).zip(&direct.values) {
                tele = tele.max((z - z0 - v).abs() / s.n as f64);
            }
        }
    }
    Ok(SkewOrbit { n, samples, boundary_hits: hits, degenerate: hits as f64 > n as f64 * 1e-6 && hits > 0, telescoping: tele })
}

/// Default near-return radii.
pub const RADII: [f64; 4] = [0.1, 0.05, 0.01, 0.005];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointRecurrence {
    pub x: [f64; 2],
    pub min_abs: f64,
    pub argmin: u64,
    /// First `n` with `|phi_n(x)| < r` for each radius.
    pub first_hit: Vec<Option<u64>>,
    /// `min |phi_n|` over `n <= 10^j`.
    pub profile: Vec<(u64, f64)>,
    /// `min |phi_n|` over the second half `(N/2, N]`.
    pub late_min: f64,
    pub transient: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub n_max: u64,
    pub radii: Vec<f64>,
    pub points: Vec<PointRecurrence>,
    /// Fraction of points reaching each radius.
    pub reached: Vec<f64>,
    /// Median and 90% quantile of the first return below each radius.
    pub quantiles: Vec<[Option<u64>; 2]>,
    pub transient_fraction: f64,
}

fn quantile(sorted: &[u64], q: f64) -> Option<u64> {
    if sorted.is_empty() {
        return None;
    }
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    Some(sorted[i])
}

/// Near returns of `phi_n(x)` to 0 for `m` random base points.
pub fn recurrence_probe(alpha: &RotationVector, map: &PlanarMap, n_max: u64, m: usize, seed: u64, radii: &[f64]) -> Result<RecurrenceReport> {
    check_dims(map, alpha)?;
    if m < 1 || n_max < 2 {
        return Err(Error::Config("recurrence probe needs m >= 1 and n_max >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<[f64; 2]> = (0..m).map(|_| [rng.gen(), if map.rho == 2 { rng.gen() } else { 0.0 }]).collect();
    let coarse = radii.iter().copied().fold(0.0, f64::max);
    let points: Vec<PointRecurrence> = xs
        .par_iter()
        .map(|&x| {
            let d = map.dim();
            let mut acc = vec![NeumaierSum::new(); d];
            let mut cur = vec![0.0; d];
            let (mut best, mut arg, mut late) = (f64::INFINITY, 0, f64::INFINITY);
            let mut first = vec![None; radii.len()];
            let mut profile = vec![];
            let mut next_dec = 10;
            for_each_orbit_value(map, alpha, to_turns(x), n_max, |k, v| {
                for i in 0..d {
                    acc[i].add(v[i]);
                    cur[i] = acc[i].value();
                }
                let n = k + 1;
                let r = norm(&cur);
                if r < best {
                    best = r;
                    arg = n;
                }
                if n > n_max / 2 {
                    late = late.min(r);
                }
                for (f, &rad) in first.iter_mut().zip(radii) {
                    if f.is_none() && r < rad {
                        *f = Some(n);
                    }
                }
                if n == next_dec || n == n_max {
                    profile.push((n, best));
                    next_dec = next_dec.saturating_mul(10);
                }
            });
            PointRecurrence { x, min_abs: best, argmin: arg, first_hit: first, profile, late_min: late, transient: late > coarse }
        })
        .collect();
    let reached = (0..radii.len()).map(|i| points.iter().filter(|p| p.first_hit[i].is_some()).count() as f64 / m as f64).collect();
    let quantiles = (0..radii.len())
        .map(|i| {
            let mut v: Vec<u64> = points.iter().filter_map(|p| p.first_hit[i]).collect();
            v.sort_unstable();
            [quantile(&v, 0.5), quantile(&v, 0.9)]
        })
        .collect();
    let transient_fraction = points.iter().filter(|p| p.transient).count() as f64 / m as f64;
    Ok(RecurrenceReport { n_max, radii: radii.to_vec(), points, reached, quantiles, transient_fraction })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct L2Report {
    pub rows: Vec<(u64, f64)>,
    pub slope: f64,
    pub ci: [f64; 2],
    pub dim: usize,
    /// Upper end of the interval below `1/d`.
    pub consistent: bool,
}

/// Monte-Carlo `||phi_N||_2` along `schedule` with a bootstrap interval on the log-log slope.
pub fn l2_growth_probe(alpha: &RotationVector, map: &PlanarMap, schedule: &[u64], m: usize, seed: u64, resamples: usize) -> Result<L2Report> {
    check_dims(map, alpha)?;
    if m < 2 || schedule.len() < 2 {
        return Err(Error::Config("L2 probe needs at least two points and two schedule entries".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<[f64; 2]> = (0..m).map(|_| [rng.gen(), if map.rho == 2 { rng.gen() } else { 0.0 }]).collect();
    let mut sched = schedule.to_vec();
    sched.sort_unstable();
    sched.dedup();
    // sq[i][j] = |phi_{N_j}(x_i)|^2
    let sq: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| ergodic_series(map, alpha, x, &sched, None).map(|rows| rows.iter().map(|r| r.values.iter().map(|v| v * v).sum()).collect()))
        .collect::<Result<_>>()?;
    let ns: Vec<f64> = sched.iter().map(|&n| n as f64).collect();
    let l2_of = |idx: &[usize]| -> Vec<f64> {
        (0..sched.len()).map(|j| (idx.iter().map(|&i| sq[i][j]).sum::<f64>() / idx.len() as f64).sqrt()).collect()
    };
    let all: Vec<usize> = (0..m).collect();
    let l2 = l2_of(&all);
    let slope = loglog_slope(&ns, &l2);
    let mut boots: Vec<f64> = (0..resamples)
        .map(|_| {
            let idx: Vec<usize> = (0..m).map(|_| rng.gen_range(0..m)).collect();
            loglog_slope(&ns, &l2_of(&idx))
        })
        .filter(|s| s.is_finite())
        .collect();
    boots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ci = if boots.is_empty() {
        [slope, slope]
    } else {
        let q = |p: f64| boots[((boots.len() - 1) as f64 * p).round() as usize];
        [q(0.025), q(0.975)]
    };
    let dim = map.dim();
    Ok(L2Report { rows: sched.iter().copied().zip(l2).collect(), slope, ci, dim, consistent: ci[1] < 1.0 / dim as f64 })
}

/// Target set for `phi_n` in an essential-value event.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ValueWindow {
    /// `v in [lo, hi]`, or `|v| in [lo, hi]` with `abs`, for scalar maps.
    Interval { lo: f64, hi: f64, abs: bool },
    Ball { center: Vec<f64>, radius: f64 },
}

impl ValueWindow {
    pub fn contains(&self, v: &[f64]) -> bool {
        match self {
            ValueWindow::Interval { lo, hi, abs } => {
                let x = if *abs { v[0].abs() } else { v[0] };
                *lo <= x && x <= *hi
            }
            ValueWindow::Ball { center, radius } => {
                v.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() <= *radius
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventRow {
    pub n: u64,
    pub hits: u64,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EssentialValueReport {
    pub grid: usize,
    pub base_measure: f64,
    pub rows: Vec<EventRow>,
    pub positive: usize,
}

/// Fraction of grid points `x` with `x in B`, `T^n x in B` and `phi_n(x) in V`.
pub fn essential_value_probe(alpha: &RotationVector, map: &PlanarMap, base: &BoxSet, window: &ValueWindow, n_list: &[u64], grid_size: usize) -> Result<EssentialValueReport> {
    check_dims(map, alpha)?;
    if map.rho != 2 {
        return Err(Error::Config("essential-value events use maps on T^2".into()));
    }
    let grid = Grid::new(grid_size);
    let in_b: Vec<bool> = (0..grid.len(2)).map(|i| base.contains(grid.point(2, i))).collect();
    let mut rows = vec![];
    for &n in n_list {
        let sums = sums_on_grid(map, alpha, n, grid)?;
        let shift = [turn_to_f64(turn_mul(alpha.turns()[0], n)), turn_to_f64(turn_mul(alpha.turns()[1], n))];
        let hits = (0..grid.len(2))
            .into_par_iter()
            .filter(|&i| {
                if !in_b[i] {
                    return false;
                }
                let p = grid.point(2, i);
                let q = [(p[0] + shift[0]).fract(), (p[1] + shift[1]).fract()];
                let v: Vec<f64> = sums.iter().map(|s| s[i]).collect();
                base.contains(q) && window.contains(&v)
            })
            .count() as u64;
        rows.push(EventRow { n, hits, fraction: hits as f64 / grid.len(2) as f64 });
    }
    let positive = rows.iter().filter(|r| r.hits > 0).count();
    Ok(EssentialValueReport { grid: grid_size, base_measure: base.measure(), rows, positive })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Frequency {
    pub h: [i64; 2],
    pub k: Vec<i64>,
}

/// All `(h, k) != 0` with `|h|_inf <= hb` and `|k|_inf <= kb`, `k in Z^d`.
pub fn frequency_panel(hb: i64, kb: i64, d: usize) -> Vec<Frequency> {
    let mut ks: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..d {
        ks = ks.into_iter().flat_map(|k| (-kb..=kb).map(move |v| [k.clone(), vec![v]].concat())).collect();
    }
    let mut out = vec![];
    for h1 in -hb..=hb {
        for h2 in -hb..=hb {
            for k in &ks {
                if h1 == 0 && h2 == 0 && k.iter().all(|&v| v == 0) {
                    continue;
                }
                out.push(Frequency { h: [h1, h2], k: k.clone() });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylRow {
    pub freq: Frequency,
    /// `|average|` at each checkpoint.
    pub averages: Vec<f64>,
    /// First over last checkpoint average.
    pub ratio: f64,
    /// `1/(2 N ||h.alpha||)` at the last checkpoint for `k = 0` rows.
    pub base_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylReport {
    pub checkpoints: Vec<u64>,
    pub rows: Vec<WeylRow>,
}

/// Weyl averages of `exp(2 pi i (<h, x_n> + <k, y_n>))` along one orbit of
/// `(x, y) -> (x + alpha, y + phi(x) a)`.
pub fn weyl_probe(alpha: &RotationVector, map: &PlanarMap, a: &[Turn], freqs: &[Frequency], x0: [f64; 2], checkpoints: &[u64]) -> Result<WeylReport> {
    check_dims(map, alpha)?;
    if map.dim() != 1 {
        return Err(Error::Config("Weyl probe uses a scalar map".into()));
    }
    if freqs.iter().any(|f| f.k.len() != a.len()) {
        return Err(Error::Config("frequency fiber dimension does not match the translation vector".into()));
    }
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    let n = *cps.last().ok_or_else(|| Error::Config("no checkpoints".into()))?;
    let xt = to_turns(x0);
    let xt = if map.rho == 1 { [xt[0], 0] } else { xt };
    let mut ys: Vec<Vec<Turn>> = Vec::with_capacity(n as usize);
    let mut y = vec![0 as Turn; a.len()];
    for_each_orbit_value(map, alpha, xt, n, |_, v| {
        ys.push(y.clone());
        fiber_step(a, &mut y, v[0]);
    });
    let at = alpha.turns();
    let at = if map.rho == 1 { [at[0], 0] } else { at };
    let rows = freqs
        .par_iter()
        .map(|f| {
            let hx0 = dot_turn(f.h, xt);
            let ha = dot_turn(f.h, at);
            let mut acc = Complex64::default();
            let mut comp = Complex64::default();
            let mut averages = vec![];
            let mut next = 0;
            for (j, yj) in ys.iter().enumerate() {
                let mut ph = hx0.wrapping_add(turn_mul(ha, j as u64));
                for (kk, yy) in f.k.iter().zip(yj) {
                    ph = ph.wrapping_add(yy.wrapping_mul(*kk as i128 as u128));
                }
                // compensated complex accumulation
                let term = Complex64::from_polar(1.0, 2.0 * PI * turn_to_f64(ph)) - comp;
                let t = acc + term;
                comp = (t - acc) - term;
                acc = t;
                while next < cps.len() && cps[next] == j as u64 + 1 {
                    averages.push(acc.norm() / cps[next] as f64);
                    next += 1;
                }
            }
            let base_bound = f.k.iter().all(|&v| v == 0).then(|| 1.0 / (2.0 * n as f64 * turn_dist(ha)));
            let ratio = averages[0] / averages[averages.len() - 1];
            WeylRow { freq: f.clone(), averages, ratio, base_bound }
        })
        .collect();
    Ok(WeylReport { checkpoints: cps, rows })
}

#[inline]
fn fr(u: f64) -> f64 {
    u - u.floor()
}

#[inline]
fn circ(u: f64) -> f64 {
    (u - u.round()).abs()
}

/// Distance between `S o T o S^-1 (p)` and the sheared extension at `p`,
/// for `S(x1, x2, y) = (x1, x2 - x1, y)`.
pub fn conjugation_residual(alpha: [f64; 2], a: f64, p: [f64; 3]) -> Result<f64> {
    let [u1, u2, y] = p;
    if circ(u1) < 1e-9 || circ(u2) < 1e-9 || circ(u1 + u2) < 1e-9 {
        return Err(Error::BoundaryHit(format!("({u1}, {u2})")));
    }
    // left side: unshear, step with 1_{x < y}, shear back
    let x1 = u1;
    let x2 = fr(u2 + u1);
    let ind0 = if x1 < x2 { 1.0 } else { 0.0 };
    let (t1, t2, ty) = (fr(x1 + alpha[0]), fr(x2 + alpha[1]), fr(y + a * ind0));
    let lhs = [t1, fr(t2 - t1), ty];
    // right side: rotation by (a1, a2 - a1) with 1_{x1 + x2 < 1}
    let ind1 = if u1 + u2 < 1.0 { 1.0 } else { 0.0 };
    let rhs = [fr(u1 + alpha[0]), fr(u2 + alpha[1] - alpha[0]), fr(y + a * ind1)];
    Ok((0..3).map(|i| circ(lhs[i] - rhs[i])).fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugationReport {
    pub samples: usize,
    pub rejected: usize,
    pub max_residual: f64,
}

pub fn conjugation_check(alpha: &RotationVector, a: f64, samples: usize, seed: u64) -> Result<ConjugationReport> {
    if alpha.rho() != 2 {
        return Err(Error::Config("the shear acts on T^2".into()));
    }
    let al = alpha.as_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut rejected, mut worst) = (0, 0, 0.0f64);
    while done < samples {
        let p = [rng.gen(), rng.gen(), rng.gen()];
        match conjugation_residual(al, a, p) {
            Ok(r) => {
                worst = worst.max(r);
                done += 1;
            }
            Err(_) => rejected += 1,
        }
    }
    Ok(ConjugationReport { samples, rejected, max_residual: worst })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InducedReport {
    pub measure: f64,
    /// `(R_j(x0), phi_{R_j}(x0))` for `j = 1..=k`.
    pub returns: Vec<(u64, Vec<f64>)>,
    pub mean_return: f64,
    /// `max |sum of induced steps - phi_{R_j}(x0)|` over checked returns.
    pub identity: f64,
}

/// First `k` returns of `x0` to `base` and the induced sums.
pub fn induced_cocycle(alpha: &RotationVector, map: &PlanarMap, base: &BoxSet, x0: [f64; 2], k: usize, n_cap: u64) -> Result<InducedReport> {
    check_dims(map, alpha)?;
    if !base.contains(x0) {
        return Err(Error::Config("base point is outside the inducing set".into()));
    }
    let d = map.dim();
    let a = alpha.turns();
    let mut x = to_turns(x0);
    if map.rho == 1 {
        x[1] = 0;
    }
    let mut steps: Vec<Vec<f64>> = vec![];
    let mut times = vec![];
    let (mut n, mut last) = (0u64, 0u64);
    let mut excursion = vec![NeumaierSum::new(); d];
    while times.len() < k {
        let p = [turn_to_f64(x[0]), turn_to_f64(x[1])];
        for (e, c) in excursion.iter_mut().zip(&map.components) {
            e.add(c.value(p));
        }
        x = [x[0].wrapping_add(a[0]), x[1].wrapping_add(if map.rho == 2 { a[1] } else { 0 })];
        n += 1;
        if base.contains([turn_to_f64(x[0]), turn_to_f64(x[1])]) {
            steps.push(excursion.iter().map(NeumaierSum::value).collect());
            excursion = vec![NeumaierSum::new(); d];
            times.push(n);
            last = n;
        } else if n - last > n_cap {
            return Err(Error::Sampling(format!("no return within {n_cap} steps after return {}", times.len())));
        }
    }
    let mut returns = Vec::with_capacity(k);
    let mut acc = vec![NeumaierSum::new(); d];
    for (t, s) in times.iter().zip(&steps) {
        for (a, v) in acc.iter_mut().zip(s) {
            a.add(*v);
        }
        returns.push((*t, acc.iter().map(NeumaierSum::value).collect::<Vec<f64>>()));
    }
    let step = (k / 16).max(1);
    let mut identity = 0.0f64;
    for (t, v) in returns.iter().step_by(step).chain(returns.last()) {
        let direct = ergodic_sum(map, alpha, to_turns(x0), *t)?;
        for (a, b) in v.iter().zip(&direct.values) {
            identity = identity.max((a - b).abs());
        }
    }
    let mean_return = *times.last().unwrap_or(&0) as f64 / k.max(1) as f64;
    Ok(InducedReport { measure: base.measure(), returns, mean_return, identity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::map_from_name;

    fn alpha(s: &str) -> RotationVector {
        RotationVector::parse(s, 256).unwrap()
    }

    #[test]
    fn zero_map_keeps_fiber() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let m = map_from_name("zero", Some(2)).unwrap();
        let o = simulate_skew(&a, &m, &FiberMode::Real, [0.1, 0.2], &[0.7], 1000, 100).unwrap();
        assert!(o.samples.iter().all(|s| s.z == vec![0.7]));
    }

    #[test]
    fn real_fiber_telescopes() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let m = map_from_name("xy_quarter", None).unwrap();
        let o = simulate_skew(&a, &m, &FiberMode::Real, [0.3, 0.6], &[0.0], 100_000, 1000).unwrap();
        assert!(o.telescoping < 1e-9, "{}", o.telescoping);
        assert_eq!(o.samples.len(), 101);
    }

    #[test]
    fn torus_fiber_is_exact_for_indicators() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let m = map_from_name("delta0", None).unwrap();
        let half = 1u128 << 127;
        let o = simulate_skew(&a, &m, &FiberMode::Torus { a: vec![half] }, [0.3, 0.6], &[0.0], 999, 1).unwrap();
        assert!(o.samples.iter().all(|s| s.z[0] == 0.0 || s.z[0] == 0.5));
    }

    #[test]
    fn drift_is_flagged() {
        let a = alpha("sqrt2-1");
        let m = map_from_name("psi + 0.1", Some(1)).unwrap();
        let r = recurrence_probe(&a, &m, 10_000, 20, 1, &RADII).unwrap();
        assert_eq!(r.transient_fraction, 1.0);
        let c = map_from_name("psi", Some(1)).unwrap();
        let r = recurrence_probe(&a, &c, 100_000, 20, 1, &RADII).unwrap();
        assert_eq!(r.transient_fraction, 0.0);
        assert_eq!(r.reached[1], 1.0);
    }

    #[test]
    fn window_enlargement_is_monotone() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let m = map_from_name("xy_quarter", None).unwrap();
        let b = BoxSet::parse("0,0.5,0,1").unwrap();
        let mut prev = 0;
        for w in [0.001, 0.01, 0.1, 1.0] {
            let r = essential_value_probe(&a, &m, &b, &ValueWindow::Interval { lo: 0.0, hi: w, abs: true }, &[500], 200).unwrap();
            assert!(r.rows[0].hits >= prev);
            prev = r.rows[0].hits;
        }
        let empty = BoxSet::parse("0.2,0.2,0,1").unwrap();
        let r = essential_value_probe(&a, &m, &empty, &ValueWindow::Interval { lo: 0.0, hi: 1.0, abs: true }, &[10], 100).unwrap();
        assert_eq!(r.positive, 0);
    }

    #[test]
    fn weyl_base_rows_obey_geometric_bound() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let m = map_from_name("delta0", None).unwrap();
        let f = vec![Frequency { h: [1, 0], k: vec![0] }, Frequency { h: [1, -2], k: vec![0] }];
        let r = weyl_probe(&a, &m, &[f64_to_turn(5f64.sqrt() - 2.0)], &f, [0.1, 0.2], &[1000, 5000]).unwrap();
        for row in &r.rows {
            assert!(*row.averages.last().unwrap() <= row.base_bound.unwrap() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn rational_fiber_row_does_not_decay() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let m = map_from_name("delta0", None).unwrap();
        let f = vec![Frequency { h: [0, 0], k: vec![2] }];
        let r = weyl_probe(&a, &m, &[1u128 << 127], &f, [0.1, 0.2], &[1000, 4000]).unwrap();
        assert!((r.rows[0].averages[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn panel_size() {
        assert_eq!(frequency_panel(2, 3, 1).len(), 174);
    }

    #[test]
    fn conjugation_identity() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let r = conjugation_check(&a, 5f64.sqrt() - 2.0, 10_000, 3).unwrap();
        assert!(r.max_residual < 1e-12, "{r:?}");
        assert!(conjugation_residual([0.3, 0.4], 0.1, [0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn induced_whole_space_is_plain() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let m = map_from_name("xy_quarter", None).unwrap();
        let r = induced_cocycle(&a, &m, &BoxSet::whole(), [0.2, 0.7], 50, 10).unwrap();
        assert!(r.returns.iter().enumerate().all(|(i, (t, _))| *t == i as u64 + 1));
        assert!(r.identity < 1e-12);
    }

    #[test]
    fn kac_mean_return() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let m = map_from_name("xy_quarter", None).unwrap();
        let b = BoxSet::parse("0.1,0.4,0.2,0.5").unwrap();
        let r = induced_cocycle(&a, &m, &b, [0.25, 0.35], 1000, 1_000_000).unwrap();
        assert!((r.mean_return * b.measure() - 1.0).abs() < 0.2, "{}", r.mean_return);
        assert!(r.identity < 1e-9);
    }
}
