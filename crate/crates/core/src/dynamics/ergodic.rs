//! Ergodic sums along rotation orbits, pointwise and on uniform grids.
//!
//! Orbits are advanced on 128-bit turns, so the k-th point equals
//! `x0 + k*alpha` (mod 1) computed exactly from the stored rotation.
//! Grid sums pick the fastest exact engine a component supports:
//! a sawtooth decomposition, a row sweep for maps piecewise linear in
//! `x1`, or direct summation.

use rayon::prelude::*;
use serde::Serialize;

use super::maps::{Factor2, PlanarMap, Pwl1D, SawTerm};
use super::rotation::RotationVector;
use crate::error::{Error, Result};
use crate::hp::{f64_to_turn, turn_mul, turn_to_f64, HpReal, Turn};
use crate::sum::NeumaierSum;

/// Boundary hits above this fraction of the orbit length mark the orbit as degenerate.
pub const DEGENERATE_HIT_RATE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErgodicSum {
    pub n: u64,
    pub values: Vec<f64>,
    pub boundary_hits: u64,
    pub degenerate: bool,
}

pub fn check_dims(map: &PlanarMap, alpha: &RotationVector) -> Result<()> {
    if alpha.rho() < map.rho {
        return Err(Error::Config(format!("map {:?} lives on T^{} but alpha has {} component(s)", map.name, map.rho, alpha.rho())));
    }
    Ok(())
}

#[inline]
fn point(x: [Turn; 2]) -> [f64; 2] {
    let f = |t: Turn| {
        let v = turn_to_f64(t);
        if v >= 1.0 {
            0.0
        } else {
            v
        }
    };
    [f(x[0]), f(x[1])]
}

fn mask(map: &PlanarMap, alpha: &RotationVector) -> [Turn; 2] {
    let t = alpha.turns();
    if map.rho == 1 {
        [t[0], 0]
    } else {
        t
    }
}

/// Streams `phi(T^k x0)` for `k = 0..n` into `f`, returning the boundary hit count.
pub fn for_each_orbit_value(map: &PlanarMap, alpha: &RotationVector, x0: [Turn; 2], n: u64, mut f: impl FnMut(u64, &[f64])) -> u64 {
    let a = mask(map, alpha);
    let mut x = if map.rho == 1 { [x0[0], 0] } else { x0 };
    let mut vals = vec![0.0; map.dim()];
    let mut hits = 0;
    for k in 0..n {
        let p = point(x);
        if map.is_boundary(p) {
            hits += 1;
        }
        for (v, c) in vals.iter_mut().zip(&map.components) {
            *v = c.value(p);
        }
        f(k, &vals);
        x = [x[0].wrapping_add(a[0]), x[1].wrapping_add(a[1])];
    }
    hits
}

pub fn ergodic_sum(map: &PlanarMap, alpha: &RotationVector, x0: [Turn; 2], n: u64) -> Result<ErgodicSum> {
    check_dims(map, alpha)?;
    let mut acc = vec![NeumaierSum::new(); map.dim()];
    let hits = for_each_orbit_value(map, alpha, x0, n, |_, v| {
        for (a, x) in acc.iter_mut().zip(v) {
            a.add(*x);
        }
    });
    Ok(ErgodicSum {
        n,
        values: acc.iter().map(NeumaierSum::value).collect(),
        boundary_hits: hits,
        degenerate: hits as f64 > n as f64 * DEGENERATE_HIT_RATE && hits > 0,
    })
}

pub fn ergodic_sum_at(map: &PlanarMap, alpha: &RotationVector, x0: [f64; 2], n: u64) -> Result<ErgodicSum> {
    ergodic_sum(map, alpha, [f64_to_turn(x0[0]), f64_to_turn(x0[1])], n)
}

/// Audit path: orbit points from high-precision products and an exact
/// fixed-point accumulator of the evaluated values.
pub fn ergodic_sum_shadow(map: &PlanarMap, alpha: &RotationVector, x0: [f64; 2], n: u64) -> Result<Vec<f64>> {
    check_dims(map, alpha)?;
    let bits = 256;
    let xs: Vec<HpReal> = (0..alpha.rho()).map(|i| HpReal::from_f64(x0[i], bits)).collect();
    let mut acc = vec![HpReal::zero(bits); map.dim()];
    for k in 0..n {
        let y = super::rotation::rotate(alpha, &xs, k as i64);
        let p = [y[0].to_f64(), y.get(1).map(HpReal::to_f64).unwrap_or(0.0)];
        for (a, c) in acc.iter_mut().zip(&map.components) {
            *a = a.add(&HpReal::from_f64(c.value(p), bits));
        }
    }
    Ok(acc.iter().map(HpReal::to_f64).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesRow {
    pub n: u64,
    pub values: Vec<f64>,
    pub sup: Option<f64>,
    pub boundary_hits: u64,
}

/// Sums at every `n` of an increasing schedule along one orbit.
pub fn ergodic_series(map: &PlanarMap, alpha: &RotationVector, x0: [f64; 2], schedule: &[u64], sup_grid: Option<usize>) -> Result<Vec<SeriesRow>> {
    check_dims(map, alpha)?;
    let mut sched: Vec<u64> = schedule.to_vec();
    sched.sort_unstable();
    sched.dedup();
    let n_max = sched.last().copied().unwrap_or(0);
    let mut acc = vec![NeumaierSum::new(); map.dim()];
    let mut rows = Vec::new();
    let mut hits = 0;
    let mut next = 0;
    let x = [f64_to_turn(x0[0]), f64_to_turn(x0[1])];
    while next < sched.len() && sched[next] == 0 {
        rows.push(SeriesRow { n: 0, values: vec![0.0; map.dim()], sup: None, boundary_hits: 0 });
        next += 1;
    }
    let mut on_step = |k: u64, v: &[f64], hit: bool| {
        for (a, x) in acc.iter_mut().zip(v) {
            a.add(*x);
        }
        if hit {
            hits += 1;
        }
        while next < sched.len() && sched[next] == k + 1 {
            rows.push(SeriesRow { n: k + 1, values: acc.iter().map(NeumaierSum::value).collect(), sup: None, boundary_hits: hits });
            next += 1;
        }
    };
    let a = mask(map, alpha);
    let mut y = if map.rho == 1 { [x[0], 0] } else { x };
    let mut vals = vec![0.0; map.dim()];
    for k in 0..n_max {
        let p = point(y);
        let hit = map.is_boundary(p);
        for (v, c) in vals.iter_mut().zip(&map.components) {
            *v = c.value(p);
        }
        on_step(k, &vals, hit);
        y = [y[0].wrapping_add(a[0]), y[1].wrapping_add(a[1])];
    }
    if let Some(g) = sup_grid {
        for r in rows.iter_mut() {
            r.sup = Some(sup_over_grid(map, alpha, r.n, g)?.sup);
        }
    }
    Ok(rows)
}

/// Uniform grid with points `((i + o1)/G, (j + o2)/G)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub size: usize,
    pub offset: [f64; 2],
}

impl Grid {
    /// Offsets chosen so no grid point sits on `x = 0`, `y = 0` or `x = y`.
    pub fn new(size: usize) -> Self {
        Grid { size, offset: [0.5, 0.25] }
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        (i as f64 + self.offset[axis]) / self.size as f64
    }

    pub fn len(&self, rho: usize) -> usize {
        if rho == 1 {
            self.size
        } else {
            self.size * self.size
        }
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Point for flat index `idx = i*G + j` (or `i` on `T^1`).
    pub fn point(&self, rho: usize, idx: usize) -> [f64; 2] {
        if rho == 1 {
            [self.coord(0, idx), 0.0]
        } else {
            [self.coord(0, idx / self.size), self.coord(1, idx % self.size)]
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridEngine {
    Sawtooth,
    RowSweep,
    Direct,
}

pub fn engine_for(map: &PlanarMap, comp: usize) -> GridEngine {
    let c = &map.components[comp];
    if c.sawtooth_terms().is_some() {
        GridEngine::Sawtooth
    } else if c.separable().is_some() {
        GridEngine::RowSweep
    } else {
        GridEngine::Direct
    }
}

struct SawtoothTable {
    sorted: Vec<f64>,
    total: f64,
    n: f64,
}

impl SawtoothTable {
    fn new(theta: Turn, n: u64) -> Self {
        let mut a: Vec<f64> = (0..n)
            .map(|k| {
                let v = turn_to_f64(turn_mul(theta, k));
                if v >= 1.0 {
                    0.0
                } else {
                    v
                }
            })
            .collect();
        let total = a.iter().copied().collect::<NeumaierSum>().value();
        a.par_sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
        SawtoothTable { sorted: a, total, n: n as f64 }
    }

    fn at(&self, u: f64) -> f64 {
        let u = u - u.floor();
        // {u + a} = u + a - [a >= 1 - u]
        let cnt = self.sorted.len() - self.sorted.partition_point(|&x| x < 1.0 - u);
        self.n * u + self.total - cnt as f64 - 0.5 * self.n
    }
}

/// `sum_{k<n} ({u + k theta} - 1/2)` at `u = u0 + i/G`, `i = 0..G`.
pub fn sawtooth_sums_1d(theta: Turn, n: u64, g: usize, u0: f64) -> Vec<f64> {
    let t = SawtoothTable::new(theta, n);
    (0..g).map(|i| t.at(u0 + i as f64 / g as f64)).collect()
}

/// `sum_{k<n} ({u + k theta} - 1/2)` at arbitrary points, `O(log n)` each after sorting the orbit.
pub fn sawtooth_sums_at(theta: Turn, n: u64, us: &[f64]) -> Vec<f64> {
    let t = SawtoothTable::new(theta, n);
    us.iter().map(|&u| t.at(u)).collect()
}

fn sawtooth_engine(map: &PlanarMap, alpha: &RotationVector, terms: &[SawTerm], konst: f64, n: u64, grid: Grid) -> Vec<f64> {
    let g = grid.size;
    let [a1, a2] = mask(map, alpha);
    let tables: Vec<Vec<f64>> = terms
        .par_iter()
        .map(|t| {
            let theta = a1.wrapping_mul(t.form[0] as u128).wrapping_add(a2.wrapping_mul(t.form[1] as u128));
            let u0 = (t.form[0] as f64 * grid.offset[0] + t.form[1] as f64 * grid.offset[1]) / g as f64 - t.shift;
            sawtooth_sums_1d(theta, n, g, u0)
        })
        .collect();
    let base = konst * n as f64;
    let len = grid.len(map.rho);
    (0..len)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = if map.rho == 1 { (idx as i64, 0) } else { ((idx / g) as i64, (idx % g) as i64) };
            let mut v = base;
            for (t, tab) in terms.iter().zip(&tables) {
                let r = (t.form[0] * i + t.form[1] * j).rem_euclid(g as i64) as usize;
                v += t.coef * tab[r];
            }
            v
        })
        .collect()
}

struct SweepPart {
    coef: f64,
    slope: f64,
    f1_start: Vec<f64>,
    /// `(k, grid index, jump)` events, sorted by `k`.
    events: Vec<(u32, u32, f64)>,
    f2: Factor2,
}

fn sweep_prepare(coef: f64, f1: &Pwl1D, f2: Factor2, a1: Turn, n: u64, grid: Grid) -> SweepPart {
    let g = grid.size;
    let x0 = f64_to_turn(grid.coord(0, 0));
    let mut events_pos: Vec<(f64, f64)> = vec![(0.0, f1.wrap_jump())];
    events_pos.extend(f1.jumps.iter().copied());
    let mut f1_start = Vec::with_capacity(n as usize);
    let mut events = Vec::new();
    let mut x = x0;
    for k in 0..n {
        let u = point([x, 0])[0];
        f1_start.push(f1.eval(u));
        for &(p, jmp) in &events_pos {
            if jmp == 0.0 {
                continue;
            }
            let mut d = p - u;
            d -= d.floor();
            if d == 0.0 {
                d = 1.0;
            }
            let idx = (d * g as f64).ceil() as usize;
            if idx < g {
                events.push((k as u32, idx as u32, jmp));
            }
        }
        x = x.wrapping_add(a1);
    }
    SweepPart { coef, slope: f1.slope, f1_start, events, f2 }
}

fn sweep_engine(map: &PlanarMap, alpha: &RotationVector, parts: Vec<(f64, Pwl1D, Factor2)>, n: u64, grid: Grid) -> Vec<f64> {
    let g = grid.size;
    let [a1, a2] = mask(map, alpha);
    let prepared: Vec<SweepPart> = parts.into_iter().map(|(c, f1, f2)| sweep_prepare(c, &f1, f2, a1, n, grid)).collect();
    let b: Vec<f64> = (0..n).map(|k| turn_to_f64(turn_mul(a2, k))).collect();
    let rows = if map.rho == 1 { 1 } else { g };
    let out: Vec<Vec<f64>> = (0..rows)
        .into_par_iter()
        .map(|j| {
            let y = if map.rho == 1 { 0.0 } else { grid.coord(1, j) };
            let mut row = vec![0.0; g];
            let mut w = vec![0.0; n as usize];
            for part in &prepared {
                for (k, wk) in w.iter_mut().enumerate() {
                    *wk = match &part.f2 {
                        Factor2::One => 1.0,
                        f2 => {
                            let v = y + b[k];
                            f2.eval(v - v.floor())
                        }
                    };
                }
                let start: NeumaierSum = w.iter().zip(&part.f1_start).map(|(a, b)| a * b).collect();
                let wsum: NeumaierSum = w.iter().copied().collect();
                let mut diff = vec![0.0; g + 1];
                for &(k, idx, jmp) in &part.events {
                    diff[idx as usize] += w[k as usize] * jmp;
                }
                let (start, wsum) = (start.value(), wsum.value());
                let mut run = 0.0;
                for (i, r) in row.iter_mut().enumerate() {
                    run += diff[i];
                    *r += part.coef * (start + part.slope * wsum * (i as f64 / g as f64) + run);
                }
            }
            row
        })
        .collect();
    if map.rho == 1 {
        return out.concat();
    }
    // rows are indexed by x2; flat layout is x1-major
    let mut flat = vec![0.0; g * g];
    for (j, row) in out.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            flat[i * g + j] = *v;
        }
    }
    flat
}

fn direct_engine(map: &PlanarMap, alpha: &RotationVector, comp: usize, n: u64, grid: Grid) -> Vec<f64> {
    let len = grid.len(map.rho);
    let a = mask(map, alpha);
    let c = &map.components[comp];
    (0..len)
        .into_par_iter()
        .map(|idx| {
            let p = grid.point(map.rho, idx);
            let mut x = [f64_to_turn(p[0]), f64_to_turn(p[1])];
            let mut s = NeumaierSum::new();
            for _ in 0..n {
                s.add(c.value(point(x)));
                x = [x[0].wrapping_add(a[0]), x[1].wrapping_add(a[1])];
            }
            s.value()
        })
        .collect()
}

/// `phi_n` of one component on every grid point, with an explicit engine.
pub fn component_sums_on_grid_with(map: &PlanarMap, alpha: &RotationVector, comp: usize, n: u64, grid: Grid, engine: GridEngine) -> Result<Vec<f64>> {
    check_dims(map, alpha)?;
    let c = &map.components[comp];
    Ok(match engine {
        GridEngine::Sawtooth => {
            let (t, k) = c.sawtooth_terms().ok_or_else(|| Error::Config("component has no sawtooth decomposition".into()))?;
            sawtooth_engine(map, alpha, &t, k, n, grid)
        }
        GridEngine::RowSweep => {
            let parts = c.separable().ok_or_else(|| Error::Config("component is not separable".into()))?;
            sweep_engine(map, alpha, parts, n, grid)
        }
        GridEngine::Direct => direct_engine(map, alpha, comp, n, grid),
    })
}

/// `phi_n` of every component on the grid, each with its fastest engine.
pub fn sums_on_grid(map: &PlanarMap, alpha: &RotationVector, n: u64, grid: Grid) -> Result<Vec<Vec<f64>>> {
    (0..map.dim()).map(|c| component_sums_on_grid_with(map, alpha, c, n, grid, engine_for(map, c))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupReport {
    pub n: u64,
    pub sup: f64,
    pub argmax: [f64; 2],
    pub grid: usize,
    pub engines: Vec<GridEngine>,
}

/// Max over the grid of `max_i |phi^i_n|`; a lower bound for the sup norm.
pub fn sup_over_grid(map: &PlanarMap, alpha: &RotationVector, n: u64, grid_size: usize) -> Result<SupReport> {
    let grid = Grid::new(grid_size);
    let engines: Vec<GridEngine> = (0..map.dim()).map(|c| engine_for(map, c)).collect();
    if n == 0 || grid_size == 0 {
        return Ok(SupReport { n, sup: 0.0, argmax: [0.0; 2], grid: grid_size, engines });
    }
    let sums = sums_on_grid(map, alpha, n, grid)?;
    let mut best = (0.0, 0usize);
    for idx in 0..grid.len(map.rho) {
        let v = sums.iter().map(|s| s[idx].abs()).fold(0.0, f64::max);
        if v > best.0 {
            best = (v, idx);
        }
    }
    Ok(SupReport { n, sup: best.0, argmax: grid.point(map.rho, best.1), grid: grid_size, engines })
}

/// `|1_{x<y} - ({x - y} + {y} - {x})|` on the torus.
pub fn triangle_identity_check(x: f64, y: f64) -> Result<f64> {
    let fr = |u: f64| u - u.floor();
    let circ = |u: f64| (u - u.round()).abs();
    let (x, y) = (fr(x), fr(y));
    if circ(x - y) < 1e-12 || circ(x) < 1e-12 || circ(y) < 1e-12 {
        return Err(Error::BoundaryHit(format!("({x}, {y})")));
    }
    let ind = if x < y { 1.0 } else { 0.0 };
    Ok((ind - (fr(x - y) + fr(y) - fr(x))).abs())
}

/// `|phi_{m+n}(x) - phi_m(x) - phi_n(T^m x)|`, maximised over components.
pub fn cocycle_residual(map: &PlanarMap, alpha: &RotationVector, x: [f64; 2], m: u64, n: u64) -> Result<f64> {
    let x0 = [f64_to_turn(x[0]), f64_to_turn(x[1])];
    let a = ergodic_sum(map, alpha, x0, m + n)?;
    let b = ergodic_sum(map, alpha, x0, m)?;
    let xm = super::rotation::rotate_turns(alpha, x0, m as i64);
    let c = ergodic_sum(map, alpha, xm, n)?;
    Ok((0..map.dim()).map(|i| (a.values[i] - b.values[i] - c.values[i]).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::maps::map_from_name;

    fn alpha(s: &str) -> RotationVector {
        RotationVector::parse(s, 256).unwrap()
    }

    #[test]
    fn zero_map_and_empty_sum() {
        let m = map_from_name("zero", None).unwrap();
        let a = alpha("golden");
        assert_eq!(ergodic_sum_at(&m, &a, [0.3, 0.0], 1000).unwrap().values, vec![0.0]);
        let p = map_from_name("psi", None).unwrap();
        assert_eq!(ergodic_sum_at(&p, &a, [0.3, 0.0], 0).unwrap().values, vec![0.0]);
    }

    #[test]
    fn matches_naive_sum() {
        let m = map_from_name("psi", None).unwrap();
        let a = alpha("golden");
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let naive: f64 = (0..5).map(|k| {
            let v = 0.1 + k as f64 * g;
            v - v.floor() - 0.5
        }).sum();
        let s = ergodic_sum_at(&m, &a, [0.1, 0.0], 5).unwrap();
        assert!((s.values[0] - naive).abs() < 1e-14);
    }

    #[test]
    fn shadow_agrees() {
        let m = map_from_name("xy_quarter; triangle0", None).unwrap();
        let a = alpha("sqrt2-1, sqrt3-1");
        let fast = ergodic_sum_at(&m, &a, [0.123, 0.456], 3000).unwrap();
        let slow = ergodic_sum_shadow(&m, &a, [0.123, 0.456], 3000).unwrap();
        for (f, s) in fast.values.iter().zip(&slow) {
            assert!((f - s).abs() < 1e-11, "{f} vs {s}");
        }
    }

    #[test]
    fn boundary_hits_counted() {
        let m = map_from_name("psi", None).unwrap();
        let a = alpha("golden");
        let s = ergodic_sum_at(&m, &a, [0.0, 0.0], 100).unwrap();
        assert_eq!(s.boundary_hits, 1);
        assert!(s.degenerate);
    }

    #[test]
    fn series_matches_single_sums() {
        let m = map_from_name("triangle0", None).unwrap();
        let a = alpha("sqrt2-1, sqrt3-1");
        let rows = ergodic_series(&m, &a, [0.3, 0.6], &[0, 10, 100, 1000], None).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            let s = ergodic_sum_at(&m, &a, [0.3, 0.6], r.n).unwrap();
            assert!((s.values[0] - r.values[0]).abs() < 1e-12);
        }
    }

    fn engines_agree(name: &str, n: u64, g: usize) {
        let m = map_from_name(name, Some(2)).unwrap();
        let a = alpha("sqrt2-1, sqrt3-1");
        let grid = Grid::new(g);
        let direct = component_sums_on_grid_with(&m, &a, 0, n, grid, GridEngine::Direct).unwrap();
        for eng in [GridEngine::Sawtooth, GridEngine::RowSweep] {
            if let Ok(fast) = component_sums_on_grid_with(&m, &a, 0, n, grid, eng) {
                let err = fast.iter().zip(&direct).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                assert!(err < 1e-9, "{name} {eng:?}: {err}");
            }
        }
    }

    #[test]
    fn grid_engines_agree_with_direct() {
        for name in ["triangle0", "delta1", "xy_quarter", "gamma(1.5,1.6667)", "psi", "psi2 - step(0.3)", "gamma(1.3,1.1) + 2*psi2"] {
            engines_agree(name, 137, 24);
        }
    }

    #[test]
    fn one_dim_grid() {
        let m = map_from_name("psi", None).unwrap();
        let a = alpha("sqrt2-1");
        let grid = Grid::new(50);
        let fast = component_sums_on_grid_with(&m, &a, 0, 200, grid, GridEngine::Sawtooth).unwrap();
        let direct = component_sums_on_grid_with(&m, &a, 0, 200, grid, GridEngine::Direct).unwrap();
        let sweep = component_sums_on_grid_with(&m, &a, 0, 200, grid, GridEngine::RowSweep).unwrap();
        for i in 0..50 {
            assert!((fast[i] - direct[i]).abs() < 1e-10);
            assert!((sweep[i] - direct[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn sup_zero_at_n_zero() {
        let m = map_from_name("psi", None).unwrap();
        let a = alpha("sqrt2-1");
        assert_eq!(sup_over_grid(&m, &a, 0, 100_000).unwrap().sup, 0.0);
    }

    #[test]
    fn identity_examples() {
        assert!(triangle_identity_check(0.2, 0.5).unwrap() < 1e-15);
        assert!(triangle_identity_check(0.5, 0.2).unwrap() < 1e-15);
        assert!(triangle_identity_check(0.5, 0.5).is_err());
    }

    #[test]
    fn cocycle_small() {
        let m = map_from_name("gamma(1.5,1.6667); triangle0", None).unwrap();
        let a = alpha("sqrt2-1, sqrt3-1");
        assert!(cocycle_residual(&m, &a, [0.31, 0.77], 1234, 4321).unwrap() < 1e-9 * 5555.0);
    }

    #[test]
    fn sawtooth_points_match_direct() {
        let m = map_from_name("psi", Some(1)).unwrap();
        let a = alpha("golden");
        let xs = [0.013, 0.5, 0.77, 0.999];
        let fast = sawtooth_sums_at(a.turns()[0], 3000, &xs);
        for (x, v) in xs.iter().zip(fast) {
            assert!((ergodic_sum_at(&m, &a, [*x, 0.0], 3000).unwrap().values[0] - v).abs() < 1e-9);
        }
    }
}
