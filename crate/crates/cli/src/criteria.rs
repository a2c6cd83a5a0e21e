//! The fourteen reproducible checks behind `reproduce` and the acceptance test.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::{anyhow, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use skewlab_core::diophantine::{ContinuedFraction, ConvergentTable};
use skewlab_core::dynamics::ergodic::{sawtooth_sums_at, sup_over_grid, triangle_identity_check};
use skewlab_core::dynamics::maps::example_gamma;
use skewlab_core::dynamics::{lambda_functionals, map_from_name, RotationVector, TriangleSpec};
use skewlab_core::format::fmt_sig;
use skewlab_core::fourier::{coboundary_solve, l2_sum_growth, loglog_slope, triangle_coeff, FourierSpectrum};
use skewlab_core::partition::{check_eqfunct, default_schedule, emit_svg, log_schedule, SvgStyle, TorusPartition};
use skewlab_core::probes::{conjugation_check, essential_value_probe, frequency_panel, weyl_probe, BoxSet, Frequency, ValueWindow};
use skewlab_core::quad::adaptive_gk;
use skewlab_core::{parse_real, DEFAULT_BITS};

use crate::output::Table;
use crate::row;

pub const SEED: u64 = 20_240_917;

#[derive(Clone, Debug, Serialize)]
pub struct Part {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub measured: String,
    pub parts: Vec<Part>,
    pub elapsed_s: f64,
    pub limit_s: f64,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {} ({:.2} s, limit {} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.measured,
            self.elapsed_s,
            self.limit_s
        )
    }

    pub fn part(&self, name: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.name == name)
    }
}

fn part(name: &str, pass: bool, detail: impl Into<String>) -> Part {
    Part { name: name.to_string(), pass, detail: detail.into() }
}

struct Draft {
    measured: String,
    parts: Vec<Part>,
    table: Option<Table>,
}

fn run(id: u8, title: &'static str, limit_s: f64, f: impl FnOnce() -> Result<Draft>) -> Outcome {
    let t = Instant::now();
    let res = f();
    let elapsed_s = t.elapsed().as_secs_f64();
    let (measured, mut parts, table) = match res {
        Ok(d) => (d.measured, d.parts, d.table),
        Err(e) => (format!("error: {e:#}"), vec![part("completed", false, format!("{e:#}"))], None),
    };
    parts.push(part("runtime", elapsed_s <= limit_s, format!("{elapsed_s:.3} s")));
    let pass = parts.iter().all(|p| p.pass);
    Outcome { id, title, pass, measured, parts, elapsed_s, limit_s, table }
}

fn alpha(src: &str) -> Result<RotationVector> {
    Ok(RotationVector::parse(src, DEFAULT_BITS)?)
}

pub const COUNT_ALPHAS: [&str; 3] = ["sqrt2, e", "sqrt2-1, sqrt3-1", "golden, sqrt2-1"];

pub fn partition_counts() -> Outcome {
    run(1, "partition counts", 60.0, || {
        let mut t = Table::new(&["alpha", "ell", "expected_p", "cells_p", "expected_r", "cells_r"]);
        let mut bad = 0;
        for src in COUNT_ALPHAS {
            let a = alpha(src)?;
            for ell in 1..=40usize {
                let p = TorusPartition::build(&a, ell, true)?.card();
                let r = TorusPartition::build(&a, ell, false)?.card();
                let (ep, er) = (3 * ell * ell - ell, ell * ell);
                bad += usize::from(p != ep) + usize::from(r != er);
                t.push(row![src, ell, ep, p, er, r]);
            }
        }
        Ok(Draft { measured: format!("{} of 240 counts differ", bad), parts: vec![part("exact counts", bad == 0, format!("{bad} mismatches"))], table: Some(t) })
    })
}

/// The `ell = 20` figure as SVG bytes.
pub fn figure_svg() -> Result<(usize, String)> {
    let a = alpha("sqrt2, e")?;
    let p = TorusPartition::build(&a, 20, true)?;
    Ok((p.card(), emit_svg(&p, &SvgStyle::default())))
}

pub fn figure() -> Outcome {
    run(2, "figure reproduction", 5.0, || {
        let (cells, first) = figure_svg()?;
        let (_, second) = figure_svg()?;
        let polys = first.matches("<polygon").count();
        Ok(Draft {
            measured: format!("{cells} cells, {polys} polygons, {} bytes", first.len()),
            parts: vec![part("1180 cells", cells == 1180 && polys == 1180, format!("{cells}/{polys}")), part("deterministic bytes", first == second, "two independent renders")],
            table: None,
        })
    })
}

pub fn triangle_identity() -> Outcome {
    run(3, "triangle identity", 5.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let (mut done, mut worst) = (0, 0.0f64);
        while done < 1_000_000 {
            if let Ok(r) = triangle_identity_check(rng.gen(), rng.gen()) {
                worst = worst.max(r);
                done += 1;
            }
        }
        Ok(Draft { measured: format!("max residual {worst:e}"), parts: vec![part("residual < 1e-12", worst < 1e-12, format!("{worst:e}"))], table: None })
    })
}

pub fn koksma() -> Outcome {
    run(4, "Koksma at denominators", 30.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let xs: Vec<f64> = (0..1000).map(|_| rng.gen()).collect();
        let mut t = Table::new(&["alpha", "q", "max_abs_sum"]);
        let mut worst = 0.0f64;
        for src in ["golden", "sqrt2-1"] {
            let mut cf = ContinuedFraction::from_str(src, DEFAULT_BITS)?;
            let tab = ConvergentTable::build(&mut cf, 40)?;
            let theta = parse_real(src, DEFAULT_BITS)?.to_turn();
            let mut qs = tab.q_u64();
            qs.dedup();
            for q in qs.into_iter().filter(|&q| q <= 1_000_000) {
                let m = sawtooth_sums_at(theta, q, &xs).into_iter().map(f64::abs).fold(0.0, f64::max);
                worst = worst.max(m);
                t.push(row![src, q, m]);
            }
        }
        Ok(Draft { measured: format!("max |psi_q(x)| = {}", fmt_sig(worst, 12)), parts: vec![part("bound 1 + 1e-9", worst <= 1.0 + 1e-9, fmt_sig(worst, 15))], table: Some(t) })
    })
}

pub fn convergent_chain() -> Outcome {
    run(5, "convergent chain", 1.0, || {
        let mut t = Table::new(&["alpha", "n", "q_n", "chain"]);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for src in ["golden", "sqrt2-1", "sqrt3-1"] {
            let mut cf = ContinuedFraction::from_str(src, DEFAULT_BITS)?;
            let tab = ConvergentTable::build(&mut cf, 100)?;
            for (n, c) in tab.chain_products(cf.value()).into_iter().enumerate() {
                hi = hi.max(c);
                if tab.q[n + 1] > tab.q[n] {
                    lo = lo.min(c);
                }
                t.push(row![src, n, tab.q[n].to_string(), c]);
            }
        }
        Ok(Draft { measured: format!("chain range [{}, {}] over 300 depths", fmt_sig(lo, 9), fmt_sig(hi, 9)), parts: vec![part("inside [1/2, 1]", lo >= 0.5 && hi <= 1.0, format!("{lo} .. {hi}"))], table: Some(t) })
    })
}

pub const GAMMA_PAIRS: [(f64, f64); 5] = [(1.5, 5.0 / 3.0), (1.2, 1.9), (1.1, 1.3), (1.7, 1.4), (1.9, 1.05)];

pub fn lambda_checks() -> Outcome {
    run(6, "lambda functionals", 10.0, || {
        let q = lambda_functionals(&map_from_name("xy_quarter", None)?)?;
        let l1 = q.boundary[0][0];
        let mut parts = vec![
            part("xy_quarter lambda1 = 0.5", (l1 - 0.5).abs() <= 1e-6, format!("{l1}")),
            part("xy_quarter traces vs quadrature", (l1 - q.quadrature[0][0]).abs() <= 1e-6, format!("{}", q.quadrature[0][0])),
        ];
        let mut t = Table::new(&["g1", "g2", "lambda1", "lambda1_quad", "lambda2", "lambda2_quad", "mean", "mean_quad", "det", "det_quad"]);
        let mut worst = 0.0f64;
        for (g1, g2) in GAMMA_PAIRS {
            let m = map_from_name(&format!("frac_product({g1}, {g2}); xy_quarter"), None)?;
            let lf = lambda_functionals(&m)?;
            let means = m.quadrature_means().ok_or_else(|| anyhow!("no quadrature means"))?;
            let det = lf.det.ok_or_else(|| anyhow!("no determinant"))?;
            let closed = [example_gamma::lambda1(g1, g2), example_gamma::lambda2(g1, g2), example_gamma::mean(g1, g2), example_gamma::pair_det(g1, g2)];
            let quad = [lf.quadrature[0][0], lf.quadrature[0][1], means[0], det];
            for (c, v) in closed.iter().zip(&quad) {
                worst = worst.max((c - v).abs());
            }
            t.push(row![g1, g2, closed[0], quad[0], closed[1], quad[1], closed[2], quad[2], closed[3], quad[3]]);
        }
        parts.push(part("closed forms vs quadrature", worst <= 1e-6, format!("{worst:e}")));
        Ok(Draft { measured: format!("lambda1 = {}, closed-form gap {worst:e}", fmt_sig(l1, 12)), parts, table: Some(t) })
    })
}

/// Nested adaptive quadrature of `exp(-2 pi i (s x + t y))` over the triangle.
pub fn triangle_coeff_quadrature(tri: &TriangleSpec, s: i64, t: i64) -> Complex64 {
    let cnorm = |z: Complex64| z.norm();
    let outer = |x: f64| {
        let lo = tri.b * x / tri.a;
        let hi = tri.c + (tri.b - tri.c) * x / tri.a;
        let inner = |y: f64| Complex64::from_polar(1.0, -2.0 * PI * (s as f64 * x + t as f64 * y));
        adaptive_gk(lo, hi, 1e-13, 30, &inner, &cnorm)
    };
    adaptive_gk(0.0, tri.a, 1e-12, 30, &outer, &cnorm)
}

pub const FOURIER_TRIANGLES: [(f64, f64, f64); 3] = [(1.0, 1.0, 1.0), (0.7, 0.3, 0.5), (1.0, -0.4, 0.8)];

pub fn fourier_exactness() -> Outcome {
    run(7, "triangle coefficients", 60.0, || {
        let mut t = Table::new(&["a", "b", "c", "s", "t", "re", "im", "abs_diff"]);
        let mut worst = 0.0f64;
        for (a, b, c) in FOURIER_TRIANGLES {
            let tri = TriangleSpec::new(a, b, c)?;
            for s in -8..=8 {
                for u in -8..=8 {
                    let v = triangle_coeff(&tri, s, u);
                    let d = (v - triangle_coeff_quadrature(&tri, s, u)).norm();
                    worst = worst.max(d);
                    t.push(row![a, b, c, s, u, v.re, v.im, d]);
                }
            }
        }
        Ok(Draft { measured: format!("max |closed - quadrature| = {worst:e} over 867 coefficients"), parts: vec![part("difference < 1e-9", worst < 1e-9, format!("{worst:e}"))], table: Some(t) })
    })
}

pub fn l2_chain() -> Outcome {
    run(8, "L2 bound chain", 30.0, || {
        let a = alpha("sqrt2-1, sqrt3-1")?;
        let spectrum = FourierSpectrum::triangle(&TriangleSpec::new(1.0, 1.0, 1.0)?, 64, true);
        let sched: Vec<u64> = (4..=14).map(|k| 1u64 << k).collect();
        let rows = l2_sum_growth(&spectrum, &a, &sched, 1.5)?;
        let mut t = Table::new(&["n", "exact", "min_bound", "series_bound", "violations"]);
        let mut v = 0;
        for r in &rows {
            v += r.violations;
            t.push(row![r.n, r.exact, r.min_bound, r.series_bound, r.violations]);
        }
        Ok(Draft { measured: format!("{v} term violations over {} N values, {} coefficients", rows.len(), spectrum.len()), parts: vec![part("chain term-wise", v == 0, format!("{v}"))], table: Some(t) })
    })
}

pub const GROWTH_NS: [u64; 5] = [100, 1_000, 10_000, 100_000, 1_000_000];

pub fn growth() -> Outcome {
    run(9, "sup growth exponent", 300.0, || {
        let a = alpha("sqrt2-1, sqrt3-1")?;
        let m = map_from_name("triangle0", None)?;
        let mut t = Table::new(&["n", "sup", "argmax_x", "argmax_y"]);
        let mut sups = vec![];
        for n in GROWTH_NS {
            let r = sup_over_grid(&m, &a, n, 1000)?;
            t.push(row![n, r.sup, r.argmax[0], r.argmax[1]]);
            sups.push(r.sup);
        }
        let xs: Vec<f64> = GROWTH_NS.iter().map(|&n| n as f64).collect();
        let slope = loglog_slope(&xs, &sups);
        Ok(Draft { measured: format!("fitted exponent {}", fmt_sig(slope, 6)), parts: vec![part("exponent < 0.15", slope < 0.15, format!("{slope}"))], table: Some(t) })
    })
}

pub fn eqfunct() -> Outcome {
    run(10, "partition hypotheses", 120.0, || {
        let a = alpha("sqrt2-1, sqrt3-1")?;
        let sched = default_schedule(&a, 6)?;
        let r = check_eqfunct(&a, &sched)?;
        let mut t = Table::new(&["ell", "cells", "max_diameter", "max_neighbors", "c_fraction", "c2_hat", "one_letter_failures"]);
        for row in &r.rows {
            t.push(row![row.ell, row.cells, row.max_diameter, row.max_neighbors, row.c_fraction, row.c2_hat, row.one_letter_failures.len()]);
        }
        let parts = r.checks.iter().map(|c| part(&c.name, c.pass, c.detail.clone())).collect();
        Ok(Draft { measured: format!("schedule {sched:?}, {} of {} checks pass", r.checks.iter().filter(|c| c.pass).count(), r.checks.len()), parts, table: Some(t) })
    })
}

pub fn conjugation() -> Outcome {
    run(11, "shear conjugation", 10.0, || {
        let a = alpha("sqrt2-1, sqrt3-1")?;
        let fiber = parse_real("sqrt5-2", DEFAULT_BITS)?.to_f64();
        let r = conjugation_check(&a, fiber, 100_000, SEED)?;
        Ok(Draft {
            measured: format!("max residual {:e} ({} near-boundary draws skipped)", r.max_residual, r.rejected),
            parts: vec![part("residual < 1e-12", r.max_residual < 1e-12, format!("{:e}", r.max_residual))],
            table: None,
        })
    })
}

pub fn essential_values() -> Outcome {
    run(12, "essential-value events", 300.0, || {
        let a = alpha("sqrt2-1, sqrt3-1")?;
        let m = map_from_name("xy_quarter", None)?;
        let ns = log_schedule(100_000, 4);
        let r = essential_value_probe(&a, &m, &BoxSet::whole(), &ValueWindow::Interval { lo: 0.001, hi: 0.002, abs: false }, &ns, 2048)?;
        let mut t = Table::new(&["n", "hits", "fraction"]);
        for row in &r.rows {
            t.push(row![row.n, row.hits, row.fraction]);
        }
        Ok(Draft { measured: format!("{} of {} sampled n have positive hit fraction", r.positive, r.rows.len()), parts: vec![part("at least 5 positive n", r.positive >= 5, format!("{}", r.positive))], table: Some(t) })
    })
}

pub const WEYL_X0: [f64; 2] = [0.123, 0.456];
pub const WEYL_CHECKPOINTS: [u64; 3] = [100_000, 200_000, 400_000];

pub fn weyl() -> Outcome {
    run(13, "Weyl decay", 300.0, || {
        let a = alpha("sqrt2-1, sqrt3-1")?;
        let m = map_from_name("delta0", None)?;
        let fiber = parse_real("sqrt5-2", DEFAULT_BITS)?.to_turn();
        let panel = frequency_panel(2, 3, 1);
        let r = weyl_probe(&a, &m, &[fiber], &panel, WEYL_X0, &WEYL_CHECKPOINTS)?;
        let mut t = Table::new(&["h1", "h2", "k", "avg_n4", "avg_n2", "avg_n", "ratio", "base_bound"]);
        for row in &r.rows {
            t.push(row![row.freq.h[0], row.freq.h[1], row.freq.k[0], row.averages[0], row.averages[1], row.averages[2], row.ratio, row.base_bound]);
        }
        let slow: Vec<&_> = r.rows.iter().filter(|w| w.ratio < 1.5).collect();
        let slow_base = slow.iter().filter(|w| w.freq.k[0] == 0).count();
        let bound_ok = r.rows.iter().filter_map(|w| w.base_bound.map(|b| w.averages[2] <= b * (1.0 + 1e-9))).all(|x| x);
        let example = r.rows.iter().find(|w| w.freq.h == [1, 1] && w.freq.k == vec![1]).ok_or_else(|| anyhow!("example row missing"))?;
        let rational = weyl_probe(&a, &m, &[1u128 << 127], &[Frequency { h: [0, 0], k: vec![2] }], WEYL_X0, &WEYL_CHECKPOINTS)?;
        let stuck = rational.rows[0].averages[2];
        let parts = vec![
            part("every panel row decays by 1.5", slow.is_empty(), format!("{} of {} rows below 1.5 ({} with k = 0); min ratio {}", slow.len(), r.rows.len(), slow_base, fmt_sig(slow.iter().map(|w| w.ratio).fold(f64::INFINITY, f64::min), 4))),
            part("example row (1,1),1 decays", example.ratio >= 1.5, fmt_sig(example.ratio, 6)),
            part("k = 0 rows within geometric bound", bound_ok, "1/(2N||h.alpha||)"),
            part("rational fiber row does not decay", (stuck - 1.0).abs() < 1e-9, fmt_sig(stuck, 15)),
        ];
        Ok(Draft { measured: format!("{} of {} rows decay by 1.5; rational row average {}", r.rows.len() - slow.len(), r.rows.len(), fmt_sig(stuck, 12)), parts, table: Some(t) })
    })
}

pub fn coboundary() -> Outcome {
    run(14, "parabola coboundary", 10.0, || {
        let a = alpha("sqrt2-1")?;
        let (_, r) = coboundary_solve(&FourierSpectrum::parabola(1000), |x| x * (1.0 - x) - 1.0 / 6.0, &a, 4000)?;
        Ok(Draft {
            measured: format!("residual {:e} at H = 1000, tail estimate {:e}", r.residual, r.truncation_estimate),
            parts: vec![part("residual < 1e-4", r.residual < 1e-4, format!("{:e}", r.residual))],
            table: None,
        })
    })
}

pub type Criterion = fn() -> Outcome;

pub const ALL: [(u8, Criterion); 14] = [
    (1, partition_counts),
    (2, figure),
    (3, triangle_identity),
    (4, koksma),
    (5, convergent_chain),
    (6, lambda_checks),
    (7, fourier_exactness),
    (8, l2_chain),
    (9, growth),
    (10, eqfunct),
    (11, conjugation),
    (12, essential_values),
    (13, weyl),
    (14, coboundary),
];

pub const SUITES: [(&str, &[u8]); 9] = [
    ("koksma", &[4, 5]),
    ("triangle-identity", &[3]),
    ("partition-counts", &[1, 2]),
    ("eqfunct", &[10]),
    ("fourier", &[7, 8, 14]),
    ("growth", &[9]),
    ("essential-values", &[6, 12]),
    ("weyl", &[13]),
    ("conjugation", &[11]),
];

pub fn suite(name: &str) -> Option<&'static [u8]> {
    SUITES.iter().find(|(n, _)| *n == name).map(|(_, ids)| *ids)
}

pub fn by_id(id: u8) -> Option<Criterion> {
    ALL.iter().find(|(i, _)| *i == id).map(|(_, f)| *f)
}
