//! One function per subcommand. Each returns its artifacts without touching the disk.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use serde_json::json;
use skewlab_core::diophantine::{bad_margin, ostrowski_digits, ContinuedFraction, ConvergentTable};
use skewlab_core::dynamics::ergodic::{ergodic_series, ergodic_sum};
use skewlab_core::dynamics::{map_from_name, RotationVector, TriangleSpec};
use skewlab_core::fourier::{coboundary_solve, decay_bound_check, l2_sum_growth, FourierSpectrum};
use skewlab_core::hp::turn_to_f64;
use skewlab_core::partition::{check_eqfunct, default_schedule, emit_svg, gap_stats, log_schedule, partition_doc, schmidt_probe, SvgStyle, TorusPartition};
use skewlab_core::probes::{conjugation_check, essential_value_probe, frequency_panel, l2_growth_probe, recurrence_probe, weyl_probe, BoxSet, ValueWindow, RADII};
use skewlab_core::{parse_real, Error};

use crate::args::*;
use crate::criteria::{self, Outcome};
use crate::output::{json_bytes, Artifacts, Table};
use crate::row;

/// Settings shared by every command after merging flags and config.
#[derive(Clone, Debug, Serialize)]
pub struct Env {
    pub bits: u32,
    pub seed: u64,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
}

impl Env {
    fn alpha(&self, src: &str) -> Result<RotationVector> {
        Ok(RotationVector::parse(src, self.bits)?)
    }

    /// Explicit artifact paths are taken relative to the output directory when one is set.
    fn place(&self, p: &PathBuf) -> PathBuf {
        match &self.out_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.clone(),
        }
    }
}

pub(crate) fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("missing required parameter `{name}`")).into())
}

fn floats(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{what}: {t:?}: {e}")).into()))
        .collect()
}

fn ints(s: &str, what: &str) -> Result<Vec<u64>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().replace('_', "").parse::<f64>().map(|v| v as u64).map_err(|e| Error::Parse(format!("{what}: {t:?}: {e}")).into()))
        .collect()
}

fn point(s: &str) -> Result<[f64; 2]> {
    let v = floats(s, "point")?;
    match v.as_slice() {
        [x] => Ok([*x, 0.0]),
        [x, y] => Ok([*x, *y]),
        _ => Err(Error::Config(format!("point {s:?} needs one or two coordinates")).into()),
    }
}

pub fn cf(a: &CfArgs, env: &Env) -> Result<Artifacts> {
    let value = need(a.value.clone(), "value")?;
    let depth = a.depth.unwrap_or(20);
    let mut cf = ContinuedFraction::from_str(&value, env.bits)?;
    let table = ConvergentTable::build(&mut cf, depth)?;
    let chain = table.chain_products(cf.value());
    let mut t = Table::new(&["n", "a", "p", "q", "chain"]);
    for (n, c) in chain.iter().enumerate().take(table.depth()) {
        t.push(row![n + 1, table.quotients[n].to_string(), table.p[n + 1].to_string(), table.q[n + 1].to_string(), *c]);
    }
    let summary = json!({
        "value": value,
        "approx": cf.value().to_f64(),
        "a": table.quotients.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        "q": table.q.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        "period": cf.period(),
        "chain_min": chain.iter().copied().fold(f64::INFINITY, f64::min),
        "chain_max": chain.iter().copied().fold(0.0, f64::max),
    });
    Ok(Artifacts::new(summary)?.table("convergents", t))
}

pub fn ostrowski(a: &OstrowskiArgs, env: &Env) -> Result<Artifacts> {
    let src = need(a.alpha.clone(), "alpha")?;
    let n = need(a.n, "n")?;
    let mut cf = ContinuedFraction::from_str(&src, env.bits)?;
    let table = ConvergentTable::build(&mut cf, a.depth.unwrap_or(60))?;
    let digits = ostrowski_digits(n, &table)?;
    let mut t = Table::new(&["k", "q_k", "digit"]);
    for (k, d) in digits.iter().enumerate() {
        t.push(row![k, table.q[k].to_string(), *d]);
    }
    Ok(Artifacts::new(json!({ "alpha": src, "n": n, "digits": digits }))?.table("digits", t))
}

pub fn badmargin(a: &BadMarginArgs, env: &Env) -> Result<Artifacts> {
    let theta = need(a.theta.clone(), "theta")?;
    let x = a.x.clone().unwrap_or_else(|| "0".into());
    let q_max = a.q_max.unwrap_or(1_000_000);
    let th = parse_real(&theta, env.bits)?.frac(env.bits).to_hp(env.bits);
    let xv = parse_real(&x, env.bits)?.to_hp(env.bits);
    Artifacts::new(bad_margin(&th, &xv, q_max))
}

pub fn sums(a: &SumsArgs, env: &Env) -> Result<Artifacts> {
    let alpha = env.alpha(&need(a.alpha.clone(), "alpha")?)?;
    let map = map_from_name(&need(a.map.clone(), "map")?, Some(alpha.rho()))?;
    let x = point(a.x.as_deref().unwrap_or("0.1,0.2"))?;
    let sched = match &a.schedule {
        Some(s) => ints(s, "schedule")?,
        None => log_schedule(a.n_max.unwrap_or(1_000_000), 4),
    };
    let rows = ergodic_series(&map, &alpha, x, &sched, a.grid)?;
    let dim = map.dim();
    let mut header: Vec<String> = vec!["n".into()];
    header.extend((0..dim).map(|i| format!("phi{}", i + 1)));
    header.extend(["sup".into(), "boundary_hits".into()]);
    let mut t = Table { header, rows: vec![] };
    for r in &rows {
        let mut cells = row![r.n];
        cells.extend(r.values.iter().map(|&v| v.into()));
        cells.extend(row![r.sup, r.boundary_hits]);
        t.push(cells);
    }
    let mut summary = json!({ "map": map.name, "means": map.means(), "x": x, "last": rows.last() });
    let m = a.l2_points.unwrap_or(0);
    if m > 0 {
        let l2 = l2_growth_probe(&alpha, &map, &sched, m, env.seed, 200)?;
        summary["l2"] = serde_json::to_value(&l2)?;
    }
    Ok(Artifacts::new(summary)?.table("series", t))
}

fn spectrum(a: &FourierArgs) -> Result<FourierSpectrum> {
    let h = a.h_max.unwrap_or(8);
    Ok(match a.kind.as_deref().unwrap_or("triangle") {
        "triangle" => {
            let v = floats(a.triangle.as_deref().unwrap_or("1,1,1"), "triangle")?;
            if v.len() != 3 {
                return Err(Error::Config("triangle needs a,b,c".into()).into());
            }
            FourierSpectrum::triangle(&TriangleSpec::new(v[0], v[1], v[2])?, h, a.centered)
        }
        "sawtooth" => FourierSpectrum::sawtooth(h),
        "parabola" => FourierSpectrum::parabola(h),
        k => return Err(Error::Config(format!("unknown spectrum kind {k:?}; expected triangle, sawtooth or parabola")).into()),
    })
}

pub fn fourier(a: &FourierArgs, env: &Env) -> Result<Artifacts> {
    let spectrum = spectrum(a)?;
    let mut t = Table::new(&["h1", "h2", "re", "im", "abs"]);
    for (h, c) in &spectrum.coeffs {
        t.push(row![h[0], h[1], c.re, c.im, c.norm()]);
    }
    let decay = decay_bound_check(&spectrum, spectrum.h_max)?;
    let mut summary = json!({ "dims": spectrum.dims, "h_max": spectrum.h_max, "coefficients": spectrum.len(), "hermitian_defect": spectrum.hermitian_defect(), "decay": decay });
    let mut out = Artifacts::new(json!(null))?.table("coefficients", t);
    if let Some(src) = &a.alpha {
        let alpha = env.alpha(src)?;
        let tt = a.t.unwrap_or(1.5);
        let sched: Vec<u64> = (4..=a.log2_n_max.unwrap_or(14)).map(|k| 1u64 << k).collect();
        let rows = l2_sum_growth(&spectrum, &alpha, &sched, tt)?;
        let mut g = Table::new(&["n", "exact", "min_bound", "series_bound", "violations"]);
        for r in &rows {
            g.push(row![r.n, r.exact, r.min_bound, r.series_bound, r.violations]);
        }
        summary["chain_violations"] = json!(rows.iter().map(|r| r.violations).sum::<usize>());
        out = out.table("chain", g);
    }
    out.summary = summary;
    Ok(out)
}

pub fn coboundary(a: &CoboundaryArgs, env: &Env) -> Result<Artifacts> {
    let alpha = env.alpha(a.alpha.as_deref().unwrap_or("sqrt2-1"))?;
    if alpha.rho() != 1 {
        return Err(Error::Config("coboundary solver works over a circle rotation".into()).into());
    }
    let h = a.h_max.unwrap_or(1000);
    let grid = a.grid.unwrap_or(4000);
    let (spectrum, phi): (_, fn(f64) -> f64) = match a.kind.as_deref().unwrap_or("parabola") {
        "parabola" => (FourierSpectrum::parabola(h), |x| x * (1.0 - x) - 1.0 / 6.0),
        "sawtooth" => (FourierSpectrum::sawtooth(h), |x| x - 0.5),
        k => return Err(Error::Config(format!("unknown coboundary kind {k:?}")).into()),
    };
    let (psi, rep) = coboundary_solve(&spectrum, phi, &alpha, grid)?;
    let mut t = Table::new(&["x", "psi"]);
    for i in 0..grid {
        let x = (i as f64 + 0.5) / grid as f64;
        t.push(row![x, psi.eval([x, 0.0])]);
    }
    Ok(Artifacts::new(rep)?.table("psi", t))
}

pub fn partition(a: &PartitionArgs, env: &Env) -> Result<Artifacts> {
    let alpha = env.alpha(&need(a.alpha.clone(), "alpha")?)?;
    let ell = need(a.ell, "ell")?;
    let p = TorusPartition::build(&alpha, ell, !a.no_diagonals)?;
    let inv = p.invariants();
    let mut t = Table::new(&["id", "coding", "area", "diameter", "vertices"]);
    for c in &p.cells {
        t.push(row![c.id, c.coding_string(), c.area, c.diameter, c.vertices.len()]);
    }
    let mut out = Artifacts::new(json!({ "cells": p.card(), "invariants": inv }))?.table("cells", t);
    if let Some(path) = &a.svg {
        let style = SvgStyle { size: a.size.unwrap_or(SvgStyle::default().size), ..SvgStyle::default() };
        out = out.file(env.place(path), emit_svg(&p, &style).into_bytes());
    }
    if let Some(path) = &a.json {
        out = out.file(env.place(path), json_bytes(&partition_doc(&p, &alpha))?);
    }
    Ok(out)
}

pub fn eqfunct(a: &EqfunctArgs, env: &Env) -> Result<Artifacts> {
    let alpha = env.alpha(a.alpha.as_deref().unwrap_or("sqrt2-1, sqrt3-1"))?;
    let ells: Vec<usize> = match &a.ells {
        Some(s) => ints(s, "ells")?.into_iter().map(|v| v as usize).collect(),
        None => default_schedule(&alpha, a.count.unwrap_or(6))?,
    };
    let r = check_eqfunct(&alpha, &ells)?;
    let mut t = Table::new(&["ell", "cells", "max_diameter", "max_neighbors", "c_count", "c_fraction", "min_area_c", "c2_hat", "area_times_card", "one_letter_failures"]);
    for w in &r.rows {
        t.push(row![w.ell, w.cells, w.max_diameter, w.max_neighbors, w.c_count, w.c_fraction, w.min_area_c, w.c2_hat, w.area_times_card, w.one_letter_failures.len()]);
    }
    let pass = r.pass();
    Ok(Artifacts::new(json!({ "ells": ells, "alpha1_margin": r.alpha1_margin, "c2_fit": r.c2_fit, "checks": r.checks }))?.table("rows", t).verdict(pass))
}

pub fn gaps(a: &GapsArgs, env: &Env) -> Result<Artifacts> {
    let th = parse_real(&need(a.alpha1.clone(), "alpha1")?, env.bits)?.to_turn();
    let betas = floats(a.betas.as_deref().unwrap_or("0"), "betas")?;
    Artifacts::new(gap_stats(th, &betas, need(a.n, "n")?)?)
}

pub fn schmidt(a: &SchmidtArgs, env: &Env) -> Result<Artifacts> {
    let alpha = env.alpha(&need(a.alpha.clone(), "alpha")?)?;
    let sched = log_schedule(a.n_max.unwrap_or(100_000), a.per_decade.unwrap_or(4));
    let recs = schmidt_probe(&alpha, &sched)?;
    let mut t = Table::new(&["n", "n1", "n2", "dist", "exponent", "highlighted"]);
    for r in &recs {
        t.push(row![r.n, r.n1, r.n2, r.dist, r.exponent, r.highlighted]);
    }
    Ok(Artifacts::new(json!({ "records": recs.len(), "last": recs.last() }))?.table("records", t))
}

pub fn recur(a: &RecurArgs, env: &Env) -> Result<Artifacts> {
    let alpha = env.alpha(&need(a.alpha.clone(), "alpha")?)?;
    let map = map_from_name(&need(a.map.clone(), "map")?, Some(alpha.rho()))?;
    let radii = match &a.radii {
        Some(s) => floats(s, "radii")?,
        None => RADII.to_vec(),
    };
    let r = recurrence_probe(&alpha, &map, a.n.unwrap_or(1_000_000), a.points.unwrap_or(100), env.seed, &radii)?;
    let mut header = vec!["x1".to_string(), "x2".into(), "min_abs".into(), "argmin".into(), "late_min".into(), "transient".into()];
    header.extend(radii.iter().map(|r| format!("first_below_{r}")));
    let mut t = Table { header, rows: vec![] };
    for p in &r.points {
        let mut cells = row![p.x[0], p.x[1], p.min_abs, p.argmin, p.late_min, p.transient];
        cells.extend(p.first_hit.iter().map(|&h| h.into()));
        t.push(cells);
    }
    let summary = json!({ "n_max": r.n_max, "radii": r.radii, "reached": r.reached, "quantiles": r.quantiles, "transient_fraction": r.transient_fraction });
    Ok(Artifacts::new(summary)?.table("points", t))
}

pub fn essval(a: &EssvalArgs, env: &Env) -> Result<Artifacts> {
    let alpha = env.alpha(&need(a.alpha.clone(), "alpha")?)?;
    let map = map_from_name(&need(a.map.clone(), "map")?, Some(alpha.rho()))?;
    let base = BoxSet::parse(a.base.as_deref().unwrap_or("all"))?;
    let (lo, hi) = (need(a.lo, "lo")?, need(a.hi, "hi")?);
    if lo > hi {
        return Err(Error::Config(format!("empty window [{lo}, {hi}]")).into());
    }
    let ns = match &a.ns {
        Some(s) => ints(s, "ns")?,
        None => log_schedule(100_000, 4),
    };
    let r = essential_value_probe(&alpha, &map, &base, &ValueWindow::Interval { lo, hi, abs: a.abs }, &ns, a.grid.unwrap_or(2048))?;
    let mut t = Table::new(&["n", "hits", "fraction"]);
    for w in &r.rows {
        t.push(row![w.n, w.hits, w.fraction]);
    }
    Ok(Artifacts::new(json!({ "grid": r.grid, "base_measure": r.base_measure, "positive": r.positive, "sampled": r.rows.len() }))?.table("events", t))
}

pub fn weyl(a: &WeylArgs, env: &Env) -> Result<Artifacts> {
    let alpha = env.alpha(a.alpha.as_deref().unwrap_or("sqrt2-1, sqrt3-1"))?;
    let map = map_from_name(a.map.as_deref().unwrap_or("delta0"), Some(alpha.rho()))?;
    let fiber: Vec<_> = a
        .fiber
        .as_deref()
        .unwrap_or("sqrt5-2")
        .split(',')
        .map(|s| parse_real(s.trim(), env.bits).map(|r| r.to_turn()))
        .collect::<skewlab_core::Result<_>>()?;
    let n = a.n.unwrap_or(400_000);
    if n < 4 {
        return Err(Error::Config("Weyl averages need N >= 4".into()).into());
    }
    let panel = frequency_panel(a.h_bound.unwrap_or(2), a.k_bound.unwrap_or(3), fiber.len());
    let r = weyl_probe(&alpha, &map, &fiber, &panel, point(a.x0.as_deref().unwrap_or("0.123,0.456"))?, &[n / 4, n / 2, n])?;
    let mut header = vec!["h1".to_string(), "h2".into()];
    header.extend((0..fiber.len()).map(|i| format!("k{}", i + 1)));
    header.extend(["avg_n4", "avg_n2", "avg_n", "ratio", "base_bound"].map(String::from));
    let mut t = Table { header, rows: vec![] };
    for w in &r.rows {
        let mut cells = row![w.freq.h[0], w.freq.h[1]];
        cells.extend(w.freq.k.iter().map(|&k| k.into()));
        cells.extend(row![w.averages[0], w.averages[1], w.averages[2], w.ratio, w.base_bound]);
        t.push(cells);
    }
    let decaying = r.rows.iter().filter(|w| w.ratio >= 1.5).count();
    let summary = json!({
        "fiber": fiber.iter().map(|&f| turn_to_f64(f)).collect::<Vec<_>>(),
        "checkpoints": r.checkpoints,
        "frequencies": r.rows.len(),
        "decaying_by_1_5": decaying,
    });
    Ok(Artifacts::new(summary)?.table("averages", t))
}

pub fn conjugation(a: &ConjugationArgs, env: &Env) -> Result<Artifacts> {
    let alpha = env.alpha(a.alpha.as_deref().unwrap_or("sqrt2-1, sqrt3-1"))?;
    let fiber = parse_real(a.fiber.as_deref().unwrap_or("sqrt5-2"), env.bits)?.to_f64();
    let r = conjugation_check(&alpha, fiber, a.samples.unwrap_or(100_000), env.seed)?;
    let pass = r.max_residual < 1e-12;
    Ok(Artifacts::new(r)?.verdict(pass))
}

fn outcome_table(outs: &[Outcome]) -> Table {
    let mut t = Table::new(&["criterion", "title", "verdict", "measured", "elapsed_s"]);
    for o in outs {
        t.push(row![o.id, o.title, if o.pass { "PASS" } else { "FAIL" }, o.measured.clone(), o.elapsed_s]);
    }
    t
}

/// Criteria for a suite name; `all` runs every suite.
pub fn suite_ids(name: &str) -> Result<Vec<u8>> {
    if name == "all" {
        return Ok((1..=14).collect());
    }
    criteria::suite(name).map(<[u8]>::to_vec).ok_or_else(|| {
        let names: Vec<&str> = criteria::SUITES.iter().map(|(n, _)| *n).collect();
        Error::Config(format!("unknown suite {name:?}; available: {}", names.join(", "))).into()
    })
}

pub fn reproduce(a: &ReproduceArgs, _env: &Env) -> Result<Artifacts> {
    let name = need(a.suite.clone(), "suite")?;
    let ids = suite_ids(&name)?;
    let outs: Vec<Outcome> = ids.iter().map(|&id| criteria::by_id(id).expect("registered criterion")()).collect();
    for o in &outs {
        eprintln!("{}", o.line());
    }
    let pass = outs.iter().all(|o| o.pass);
    let mut art = Artifacts::new(json!({ "suite": name, "criteria": outs }))?.table("summary", outcome_table(&outs)).verdict(pass);
    for o in &outs {
        if let Some(t) = &o.table {
            art = art.table(&format!("criterion{:02}", o.id), t.clone());
        }
    }
    Ok(art)
}

#[derive(Serialize)]
struct BenchReport {
    kernel: String,
    size: u64,
    wall_s: f64,
    ops_per_s: f64,
    unit: &'static str,
}

pub fn bench(a: &BenchArgs, env: &Env) -> Result<Artifacts> {
    let kernel = need(a.kernel.clone(), "kernel")?;
    let (default, unit) = match kernel.as_str() {
        "ergodic-sum" => (10_000_000, "steps"),
        "arrangement" => (100, "cells"),
        "weyl" => (100_000, "steps x frequencies"),
        k => return Err(Error::Config(format!("unknown kernel {k:?}; expected ergodic-sum, arrangement or weyl")).into()),
    };
    let size = a.size.unwrap_or(default);
    if size == 0 {
        return Artifacts::new(BenchReport { kernel, size, wall_s: 0.0, ops_per_s: 0.0, unit });
    }
    let t = Instant::now();
    let ops = match kernel.as_str() {
        "ergodic-sum" => {
            let alpha = env.alpha("sqrt2-1")?;
            let map = map_from_name("psi", Some(1))?;
            ergodic_sum(&map, &alpha, [alpha.turns()[0] / 3, 0], size)?;
            size as f64
        }
        "arrangement" => {
            let alpha = env.alpha("sqrt2, e")?;
            TorusPartition::build(&alpha, size as usize, true)?.card() as f64
        }
        _ => {
            let alpha = env.alpha("sqrt2-1, sqrt3-1")?;
            let map = map_from_name("delta0", None)?;
            let panel = frequency_panel(2, 3, 1);
            let fiber = parse_real("sqrt5-2", env.bits)?.to_turn();
            weyl_probe(&alpha, &map, &[fiber], &panel, criteria::WEYL_X0, &[size])?;
            (size * panel.len() as u64) as f64
        }
    };
    let wall = t.elapsed().as_secs_f64();
    Artifacts::new(BenchReport { kernel, size, wall_s: wall, ops_per_s: ops / wall.max(1e-12), unit })
}

pub fn dispatch(cmd: &Command, env: &Env) -> Result<Artifacts> {
    match cmd {
        Command::Cf(a) => cf(a, env),
        Command::Ostrowski(a) => ostrowski(a, env),
        Command::Badmargin(a) => badmargin(a, env),
        Command::Sums(a) => sums(a, env),
        Command::Fourier(a) => fourier(a, env),
        Command::Coboundary(a) => coboundary(a, env),
        Command::Partition(a) => partition(a, env),
        Command::Eqfunct(a) => eqfunct(a, env),
        Command::Gaps(a) => gaps(a, env),
        Command::Schmidt(a) => schmidt(a, env),
        Command::Recur(a) => recur(a, env),
        Command::Essval(a) => essval(a, env),
        Command::Weyl(a) => weyl(a, env),
        Command::Conjugation(a) => conjugation(a, env),
        Command::Reproduce(a) => reproduce(a, env),
        Command::Bench(a) => bench(a, env),
    }
}
