//! Torus partitions cut by the lines `x = -k a1`, `y = -k a2` and
//! `x - y = -k (a1 - a2)` for `0 <= k < l`, i.e. the translates of the
//! boundary of `{x < y}` under the first `l` backward iterates.
//!
//! Line offsets live on a 64-bit fixed-point circle. Every vertex of the
//! arrangement is an intersection of an axis-parallel line with a slope-1
//! line, so all vertex coordinates are integers in that scale and the cell
//! extraction is exact. Each rectangle of the vertical/horizontal grid is
//! cut by the slope-1 segments crossing it into parallel strips.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::diophantine::{bad_margin, ContinuedFraction, ConvergentTable};
use crate::dynamics::RotationVector;
use crate::error::{Error, Result};
use crate::format::{fmt_sig, round_sig};
use crate::hp::{f64_to_turn, turn_mul, Turn};

const SCALE: f64 = 18446744073709551616.0; // 2^64
const FULL: i128 = 1 << 64;
/// Three lines passing within this distance of one point are refused.
pub const INCIDENCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LineId {
    V(u32),
    H(u32),
    D(u32),
}

impl LineId {
    pub fn index(&self) -> u32 {
        match *self {
            LineId::V(k) | LineId::H(k) | LineId::D(k) => k,
        }
    }
}

/// Arrangement vertex named by the lines through it; the point where the
/// three lines of one index meet is `Triple(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VertexKey {
    VH(u32, u32),
    VD(u32, u32),
    HD(u32, u32),
    Triple(u32),
}

fn meet(a: LineId, b: LineId) -> VertexKey {
    use LineId::*;
    let k = match (a, b) {
        (V(i), H(j)) | (H(j), V(i)) => VertexKey::VH(i, j),
        (V(i), D(j)) | (D(j), V(i)) => VertexKey::VD(i, j),
        (H(i), D(j)) | (D(j), H(i)) => VertexKey::HD(i, j),
        _ => unreachable!("parallel lines do not meet"),
    };
    match k {
        VertexKey::VH(i, j) | VertexKey::VD(i, j) | VertexKey::HD(i, j) if i == j => VertexKey::Triple(i),
        k => k,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerticalEdge {
    pub line: u32,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionCell {
    pub id: usize,
    /// Rectangle `(i, j)` of the vertical/horizontal grid in sorted order.
    pub rect: [usize; 2],
    pub vertices: Vec<[f64; 2]>,
    pub keys: Vec<VertexKey>,
    /// `lines[i]` carries the edge from vertex `i` to vertex `i + 1`.
    pub lines: Vec<LineId>,
    pub area: f64,
    pub diameter: f64,
    /// `coding[i]` is true when `T^i` of the representative lies in `{x < y}`.
    pub coding: Vec<bool>,
    pub vertical_edges: Vec<VerticalEdge>,
    fix: Vec<[i128; 2]>,
}

impl PartitionCell {
    pub fn coding_string(&self) -> String {
        self.coding.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Interior point: the vertex average.
    pub fn representative(&self) -> [f64; 2] {
        let p = avg(&self.fix);
        [p[0] as f64 / SCALE, p[1] as f64 / SCALE]
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let (a, b, c) = (self.vertices[i], self.vertices[(i + 1) % n], self.vertices[(i + 2) % n]);
            (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) > 0.0
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Adjacency {
    pub a: usize,
    pub b: usize,
    pub line: LineId,
    pub length: f64,
}

#[derive(Clone, Debug)]
pub struct TorusPartition {
    pub ell: usize,
    pub diagonals: bool,
    /// Offsets indexed by `k`.
    pub v_lines: Vec<f64>,
    pub h_lines: Vec<f64>,
    pub d_lines: Vec<f64>,
    pub cells: Vec<PartitionCell>,
    pub adjacency: Vec<Adjacency>,
    /// Cells meeting each vertex.
    pub vertex_cells: BTreeMap<VertexKey, Vec<usize>>,
    xs: Vec<u64>,
    ys: Vec<u64>,
    v_sorted: Vec<(u64, u32)>,
    h_sorted: Vec<(u64, u32)>,
    e_sorted: Vec<(i128, u32)>,
    rect_start: Vec<usize>,
}

fn avg(p: &[[i128; 2]]) -> [i128; 2] {
    let n = p.len() as i128;
    let s = p.iter().fold([0i128; 2], |a, v| [a[0] + v[0], a[1] + v[1]]);
    [s[0].div_euclid(n), s[1].div_euclid(n)]
}

#[inline]
fn fix_line(t: Turn) -> u64 {
    (t >> 64) as u64
}

fn sorted_with_gap_check(vals: &[u64], what: &str) -> Result<Vec<(u64, u32)>> {
    let mut v: Vec<(u64, u32)> = vals.iter().enumerate().map(|(k, &x)| (x, k as u32)).collect();
    v.sort_unstable();
    let tol = (1e-15 * SCALE) as u64;
    for w in v.windows(2) {
        if w[1].0 - w[0].0 <= tol {
            return Err(Error::Degeneracy(format!("{what} lines {} and {} coincide", w[0].1, w[1].1)));
        }
    }
    if v.len() > 1 && v[0].0.wrapping_sub(v[v.len() - 1].0) <= tol {
        return Err(Error::Degeneracy(format!("{what} lines {} and {} coincide", v[0].1, v[v.len() - 1].1)));
    }
    Ok(v)
}

/// Half-plane clip `sgn * (y - x - e) >= 0` keeping edge provenance.
fn clip(poly: &[([i128; 2], VertexKey, LineId)], e: i128, sgn: i128, line: LineId) -> Vec<([i128; 2], VertexKey, LineId)> {
    let g = |p: [i128; 2]| sgn * (p[1] - p[0] - e);
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (p, k, l) = poly[i];
        let q = poly[(i + 1) % n].0;
        let (gp, gq) = (g(p), g(q));
        let cross = |l: LineId| -> [i128; 2] {
            match l {
                LineId::V(_) => [p[0], p[0] + e],
                LineId::H(_) => [p[1] - e, p[1]],
                LineId::D(_) => unreachable!("strip edges are parallel"),
            }
        };
        if gp >= 0 {
            if gq < 0 && gp == 0 {
                out.push((p, k, line));
            } else {
                out.push((p, k, l));
                if gq < 0 {
                    out.push((cross(l), meet(l, line), line));
                }
            }
        } else if gq > 0 {
            out.push((cross(l), meet(l, line), l));
        }
    }
    out
}

fn coding_at(p: [i128; 2], xs: &[u64], ys: &[u64]) -> Vec<bool> {
    let (px, py) = (p[0] as u64, p[1] as u64);
    xs.iter().zip(ys).map(|(&x, &y)| px.wrapping_sub(x) < py.wrapping_sub(y)).collect()
}

impl TorusPartition {
    /// Builds `P_l` (with slope-1 lines) or `R_l` (without).
    pub fn build(alpha: &RotationVector, ell: usize, diagonals: bool) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Config("ell must be at least 1".into()));
        }
        if alpha.rho() != 2 {
            return Err(Error::Config("partitions need a rotation of T^2".into()));
        }
        let [a1, a2] = alpha.turns();
        let xs: Vec<u64> = (0..ell as u64).map(|k| fix_line(turn_mul(a1, k).wrapping_neg())).collect();
        let ys: Vec<u64> = (0..ell as u64).map(|k| fix_line(turn_mul(a2, k).wrapping_neg())).collect();
        let ds: Vec<u64> = xs.iter().zip(&ys).map(|(x, y)| x.wrapping_sub(*y)).collect();
        let v_sorted = sorted_with_gap_check(&xs, "vertical")?;
        let h_sorted = sorted_with_gap_check(&ys, "horizontal")?;
        let mut e_sorted = Vec::new();
        if diagonals {
            let d_sorted = sorted_with_gap_check(&ds, "diagonal")?;
            check_incidences(&v_sorted, &h_sorted, &d_sorted)?;
            for (k, &d) in ds.iter().enumerate() {
                e_sorted.push((-(d as i128), k as u32));
                if d != 0 {
                    e_sorted.push((FULL - d as i128, k as u32));
                }
            }
            e_sorted.sort_unstable();
        }
        let mut p = TorusPartition {
            ell,
            diagonals,
            v_lines: xs.iter().map(|&x| x as f64 / SCALE).collect(),
            h_lines: ys.iter().map(|&y| y as f64 / SCALE).collect(),
            d_lines: if diagonals { ds.iter().map(|&d| d as f64 / SCALE).collect() } else { vec![] },
            cells: vec![],
            adjacency: vec![],
            vertex_cells: BTreeMap::new(),
            xs,
            ys,
            v_sorted,
            h_sorted,
            e_sorted,
            rect_start: vec![],
        };
        p.extract_cells()?;
        p.link()?;
        let expect = if diagonals { 3 * ell * ell - ell } else { ell * ell };
        if p.cells.len() != expect {
            return Err(Error::Degeneracy(format!("found {} cells, expected {expect}", p.cells.len())));
        }
        Ok(p)
    }

    fn bounds(&self, i: usize, j: usize) -> [i128; 4] {
        let l = self.ell;
        let x0 = self.v_sorted[i].0 as i128;
        let x1 = if i + 1 < l { self.v_sorted[i + 1].0 as i128 } else { FULL };
        let y0 = self.h_sorted[j].0 as i128;
        let y1 = if j + 1 < l { self.h_sorted[j + 1].0 as i128 } else { FULL };
        [x0, x1, y0, y1]
    }

    /// Slope-1 lifts `y = x + e` crossing the open rectangle, ascending in `e`.
    fn crossing(&self, r: [i128; 4]) -> &[(i128, u32)] {
        let lo = self.e_sorted.partition_point(|e| e.0 <= r[2] - r[1]);
        let hi = self.e_sorted.partition_point(|e| e.0 < r[3] - r[0]);
        &self.e_sorted[lo..hi.max(lo)]
    }

    fn extract_cells(&mut self) -> Result<()> {
        let l = self.ell;
        let per_rect: Vec<Result<Vec<PartitionCell>>> = (0..l * l)
            .into_par_iter()
            .map(|ri| {
                let (i, j) = (ri / l, ri % l);
                let r = self.bounds(i, j);
                let lv = |s: usize| LineId::V(self.v_sorted[s % l].1);
                let lh = |s: usize| LineId::H(self.h_sorted[s % l].1);
                let rect = vec![
                    ([r[0], r[2]], meet(lv(i), lh(j)), lh(j)),
                    ([r[1], r[2]], meet(lv(i + 1), lh(j)), lv(i + 1)),
                    ([r[1], r[3]], meet(lv(i + 1), lh(j + 1)), lh(j + 1)),
                    ([r[0], r[3]], meet(lv(i), lh(j + 1)), lv(i)),
                ];
                let cuts = self.crossing(r);
                let mut out = Vec::with_capacity(cuts.len() + 1);
                for s in 0..=cuts.len() {
                    let mut poly = rect.clone();
                    if s > 0 {
                        poly = clip(&poly, cuts[s - 1].0, 1, LineId::D(cuts[s - 1].1));
                    }
                    if s < cuts.len() {
                        poly = clip(&poly, cuts[s].0, -1, LineId::D(cuts[s].1));
                    }
                    out.push(self.make_cell([i, j], poly)?);
                }
                Ok(out)
            })
            .collect();
        let mut cells = Vec::with_capacity(3 * l * l);
        let mut starts = Vec::with_capacity(l * l);
        for r in per_rect {
            starts.push(cells.len());
            cells.extend(r?);
        }
        for (id, c) in cells.iter_mut().enumerate() {
            c.id = id;
        }
        // the coding must agree at two more interior points; cells of R_l
        // are not cut by the slope-1 lines and carry no constant coding
        let bad = cells.par_iter().filter(|_| self.diagonals).find_first(|c| {
            let (ctr, n) = (avg(&c.fix), c.fix.len());
            [c.fix[0], c.fix[n / 2]].iter().any(|v| {
                let m = [(ctr[0] + v[0]).div_euclid(2), (ctr[1] + v[1]).div_euclid(2)];
                coding_at(m, &self.xs, &self.ys) != c.coding
            })
        });
        if let Some(c) = bad {
            return Err(Error::CodingAmbiguity { cell: c.id });
        }
        self.cells = cells;
        self.rect_start = starts;
        Ok(())
    }

    fn make_cell(&self, rect: [usize; 2], poly: Vec<([i128; 2], VertexKey, LineId)>) -> Result<PartitionCell> {
        let fix: Vec<[i128; 2]> = poly.iter().map(|p| p.0).collect();
        let n = fix.len();
        if n < 3 {
            return Err(Error::Degeneracy(format!("empty cell in rectangle {rect:?}")));
        }
        let rel: Vec<[f64; 2]> = fix.iter().map(|p| [(p[0] - fix[0][0]) as f64 / SCALE, (p[1] - fix[0][1]) as f64 / SCALE]).collect();
        let mut area = 0.0;
        for i in 0..n {
            let (a, b) = (rel[i], rel[(i + 1) % n]);
            area += a[0] * b[1] - a[1] * b[0];
        }
        area *= 0.5;
        let mut diameter = 0.0f64;
        for a in &rel {
            for b in &rel {
                diameter = diameter.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        let lines: Vec<LineId> = poly.iter().map(|p| p.2).collect();
        let vertical_edges = (0..n)
            .filter_map(|i| match lines[i] {
                LineId::V(k) => Some(VerticalEdge { line: k, length: (rel[(i + 1) % n][1] - rel[i][1]).abs() }),
                _ => None,
            })
            .collect();
        let coding = coding_at(avg(&fix), &self.xs, &self.ys);
        Ok(PartitionCell {
            id: 0,
            rect,
            vertices: fix.iter().map(|p| [p[0] as f64 / SCALE, p[1] as f64 / SCALE]).collect(),
            keys: poly.iter().map(|p| p.1).collect(),
            lines,
            area,
            diameter,
            coding,
            vertical_edges,
            fix,
        })
    }

    fn link(&mut self) -> Result<()> {
        // an edge is named by its line and its lowest coordinate along it
        let mut edges: BTreeMap<(LineId, i128), Vec<(usize, f64)>> = BTreeMap::new();
        let mut verts: BTreeMap<VertexKey, Vec<usize>> = BTreeMap::new();
        for c in &self.cells {
            let n = c.keys.len();
            for i in 0..n {
                let u = c.keys[i];
                let (fu, fv) = (c.fix[i], c.fix[(i + 1) % n]);
                let along = match c.lines[i] {
                    LineId::V(_) => fu[1].min(fv[1]),
                    _ => fu[0].min(fv[0]),
                };
                let key = (c.lines[i], along);
                let (p, q) = (c.vertices[i], c.vertices[(i + 1) % n]);
                edges.entry(key).or_default().push((c.id, (q[0] - p[0]).hypot(q[1] - p[1])));
                let e = verts.entry(u).or_default();
                if e.last() != Some(&c.id) {
                    e.push(c.id);
                }
            }
        }
        let mut adjacency = Vec::with_capacity(edges.len());
        for ((line, ..), sides) in &edges {
            if sides.len() != 2 {
                return Err(Error::Degeneracy(format!("edge on {line:?} bounds {} cells", sides.len())));
            }
            adjacency.push(Adjacency { a: sides[0].0, b: sides[1].0, line: *line, length: sides[0].1 });
        }
        for v in verts.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        self.adjacency = adjacency;
        self.vertex_cells = verts;
        Ok(())
    }

    pub fn card(&self) -> usize {
        self.cells.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_cells.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.len()
    }

    /// `V - E + F`, zero for a cell decomposition of the torus.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.card() as i64
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    /// Cells whose closures meet the closure of `id`.
    pub fn neighbors(&self, id: usize) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for k in &self.cells[id].keys {
            s.extend(self.vertex_cells[k].iter().copied());
        }
        s.remove(&id);
        s
    }

    /// Cell containing `p`, by rectangle lookup and strip count.
    pub fn locate(&self, p: [f64; 2]) -> usize {
        let x = fix_line(f64_to_turn(p[0]));
        let y = fix_line(f64_to_turn(p[1]));
        let i = self.v_sorted.partition_point(|v| v.0 <= x) - 1;
        let j = self.h_sorted.partition_point(|h| h.0 <= y) - 1;
        let r = self.bounds(i, j);
        let d = y as i128 - x as i128;
        let s = self.crossing(r).partition_point(|e| e.0 <= d);
        self.rect_start[i * self.ell + j] + s
    }

    /// Lines per family in the unit square: `(vertical, horizontal, slope-1 segments)`.
    pub fn line_counts(&self) -> (usize, usize, usize) {
        let d = if self.diagonals { self.e_sorted.len() } else { 0 };
        (self.ell, self.ell, d)
    }

    pub fn invariants(&self) -> PartitionInvariants {
        PartitionInvariants {
            ell: self.ell,
            cells: self.card(),
            expected: if self.diagonals { 3 * self.ell * self.ell - self.ell } else { self.ell * self.ell },
            area_sum: self.total_area(),
            euler: self.euler_characteristic(),
            max_edges: self.cells.iter().map(|c| c.lines.len()).max().unwrap_or(0),
            all_convex: self.cells.iter().all(PartitionCell::is_convex),
            max_slopes: self
                .cells
                .iter()
                .map(|c| c.lines.iter().map(std::mem::discriminant).collect::<std::collections::HashSet<_>>().len())
                .max()
                .unwrap_or(0),
        }
    }

    /// Cells of `self` whose representative point falls in a coarser cell
    /// with a different coding prefix.
    pub fn refinement_mismatches(&self, coarse: &TorusPartition) -> Vec<usize> {
        self.cells
            .par_iter()
            .filter(|c| {
                let parent = &coarse.cells[coarse.locate(c.representative())];
                c.coding[..coarse.ell] != parent.coding[..]
            })
            .map(|c| c.id)
            .collect()
    }
}

fn check_incidences(v: &[(u64, u32)], h: &[(u64, u32)], d: &[(u64, u32)]) -> Result<()> {
    let tol = (INCIDENCE_TOL * SCALE) as u64;
    let n = d.len();
    for &(x, kv) in v {
        for &(y, kh) in h {
            let w = x.wrapping_sub(y);
            let i = d.partition_point(|e| e.0 < w);
            for &(dv, kd) in [d[i % n], d[(i + n - 1) % n]].iter() {
                let dist = dv.wrapping_sub(w).min(w.wrapping_sub(dv));
                if dist < tol && !(kv == kh && kh == kd) {
                    return Err(Error::Degeneracy(format!(
                        "vertical {kv}, horizontal {kh} and slope-1 line {kd} meet within {:e}",
                        dist as f64 / SCALE
                    )));
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionInvariants {
    pub ell: usize,
    pub cells: usize,
    pub expected: usize,
    pub area_sum: f64,
    pub euler: i64,
    pub max_edges: usize,
    pub all_convex: bool,
    pub max_slopes: usize,
}

impl PartitionInvariants {
    pub fn ok(&self) -> bool {
        self.cells == self.expected && (self.area_sum - 1.0).abs() < 1e-9 && self.euler == 0 && self.max_edges <= 6 && self.all_convex && self.max_slopes <= 3
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EqfunctRow {
    pub ell: usize,
    pub cells: usize,
    pub max_diameter: f64,
    pub max_neighbors: usize,
    /// Cells with a vertical edge of length `>= 1/(10 l)`.
    pub c_count: usize,
    pub c_fraction: f64,
    pub min_area_c: f64,
    /// `min_area_c * l^2`.
    pub c2_hat: f64,
    /// `min_area_c * Card(P_l)`.
    pub area_times_card: f64,
    /// Cells of the family with no closure-neighbor in the family whose coding differs in exactly one letter.
    pub one_letter_failures: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EqfunctReport {
    pub alpha1_margin: f64,
    pub rows: Vec<EqfunctRow>,
    pub c2_fit: f64,
    pub checks: Vec<Check>,
}

impl EqfunctReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Neighbor bound from the closure-intersection count.
pub const NEIGHBOR_BOUND: usize = 36;
/// Largest accepted decay of the fitted area constant from the first half
/// of the schedule to the second.
pub const C2_SPREAD: f64 = 10.0;

pub fn eqfunct_row(p: &TorusPartition) -> EqfunctRow {
    let l = p.ell as f64;
    let long = 1.0 / (10.0 * l);
    let in_c: Vec<bool> = p.cells.iter().map(|c| c.vertical_edges.iter().any(|e| e.length >= long)).collect();
    let c_ids: Vec<usize> = (0..p.card()).filter(|&i| in_c[i]).collect();
    let max_neighbors = (0..p.card()).into_par_iter().map(|i| p.neighbors(i).len()).max().unwrap_or(0);
    let one_letter_failures = c_ids
        .par_iter()
        .copied()
        .filter(|&i| {
            !p.neighbors(i).into_iter().any(|j| {
                in_c[j] && p.cells[i].coding.iter().zip(&p.cells[j].coding).filter(|(a, b)| a != b).count() == 1
            })
        })
        .collect();
    let min_area_c = c_ids.iter().map(|&i| p.cells[i].area).fold(f64::INFINITY, f64::min);
    EqfunctRow {
        ell: p.ell,
        cells: p.card(),
        max_diameter: p.cells.iter().map(|c| c.diameter).fold(0.0, f64::max),
        max_neighbors,
        c_count: c_ids.len(),
        c_fraction: c_ids.len() as f64 / p.card() as f64,
        min_area_c,
        c2_hat: min_area_c * l * l,
        area_times_card: min_area_c * p.card() as f64,
        one_letter_failures,
    }
}

/// The first `count` distinct denominators `q_1, q_2, ...` of the second component.
pub fn default_schedule(alpha: &RotationVector, count: usize) -> Result<Vec<usize>> {
    if alpha.rho() != 2 {
        return Err(Error::Config("schedule needs a rotation of T^2".into()));
    }
    let mut cf = ContinuedFraction::new(alpha.source(1), 256)?;
    let mut depth = count + 4;
    loop {
        let t = ConvergentTable::build(&mut cf, depth)?;
        let mut out: Vec<usize> = t.q_u64().into_iter().skip(1).map(|q| q as usize).collect();
        out.dedup();
        if out.len() >= count {
            out.truncate(count);
            return Ok(out);
        }
        depth *= 2;
    }
}

/// Runs the five partition checks along `ells`.
pub fn check_eqfunct(alpha: &RotationVector, ells: &[usize]) -> Result<EqfunctReport> {
    let a1 = alpha.component(0);
    let margin = bad_margin(a1, &crate::hp::HpReal::zero(a1.bits()), 10_000).margin;
    let rows: Vec<EqfunctRow> = ells.iter().map(|&l| TorusPartition::build(alpha, l, true).map(|p| eqfunct_row(&p))).collect::<Result<_>>()?;
    let c2_fit = rows.iter().map(|r| r.c2_hat).fold(f64::INFINITY, f64::min);
    let half = rows.len() / 2;
    let min_of = |rs: &[EqfunctRow]| rs.iter().map(|r| r.c2_hat).fold(f64::INFINITY, f64::min);
    let (early, late) = (min_of(&rows[..half.max(1).min(rows.len())]), min_of(&rows[half..]));
    let list = |f: &dyn Fn(&EqfunctRow) -> String| rows.iter().map(f).collect::<Vec<_>>().join(", ");
    let checks = vec![
        Check {
            name: "diameter decreases".into(),
            pass: rows.windows(2).all(|w| w[1].max_diameter < w[0].max_diameter),
            detail: list(&|r| fmt_sig(r.max_diameter, 6)),
        },
        Check {
            name: format!("neighbors <= {NEIGHBOR_BOUND}"),
            pass: rows.iter().all(|r| r.max_neighbors <= NEIGHBOR_BOUND),
            detail: list(&|r| r.max_neighbors.to_string()),
        },
        Check {
            name: "area * l^2 stable".into(),
            pass: c2_fit > 0.0 && late * C2_SPREAD >= early && rows.iter().all(|r| r.area_times_card >= c2_fit / 3.0),
            detail: list(&|r| fmt_sig(r.c2_hat, 6)),
        },
        Check {
            name: "Card(C)/Card(P) >= 1/6".into(),
            pass: rows.iter().all(|r| r.c_fraction >= 1.0 / 6.0),
            detail: list(&|r| fmt_sig(r.c_fraction, 6)),
        },
        Check {
            name: "one-letter neighbor".into(),
            pass: rows.iter().all(|r| r.one_letter_failures.is_empty()),
            detail: list(&|r| r.one_letter_failures.len().to_string()),
        },
    ];
    Ok(EqfunctReport { alpha1_margin: margin, rows, c2_fit, checks })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapStats {
    pub n: u64,
    pub points: usize,
    pub min_gap: f64,
    pub max_gap: f64,
    pub c_hat: f64,
    pub c_prime_hat: f64,
    /// Distinct gap lengths up to `1e-12`.
    pub distinct: usize,
}

/// Gaps between the points `{beta_j - k a1}`, `0 <= k < n`, on the circle.
pub fn gap_stats(alpha1: Turn, betas: &[f64], n: u64) -> Result<GapStats> {
    if n == 0 || betas.is_empty() {
        return Err(Error::Config("gap statistics need n >= 1 and at least one offset".into()));
    }
    let mut pts: Vec<Turn> = Vec::with_capacity(n as usize * betas.len());
    for &b in betas {
        let t = f64_to_turn(b);
        for k in 0..n {
            pts.push(t.wrapping_sub(turn_mul(alpha1, k)));
        }
    }
    pts.sort_unstable();
    let m = pts.len();
    let mut gaps: Vec<f64> = (0..m)
        .map(|i| {
            let g = pts[(i + 1) % m].wrapping_sub(pts[i]);
            if m == 1 {
                1.0
            } else {
                crate::hp::turn_to_f64(g)
            }
        })
        .collect();
    if m > 1 {
        if let Some(i) = gaps.iter().position(|&g| g < 1e-15) {
            return Err(Error::Degeneracy(format!("points {i} and {} coincide", (i + 1) % m)));
        }
    }
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    gaps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    gaps.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    Ok(GapStats { n, points: m, min_gap, max_gap, c_hat: n as f64 * min_gap, c_prime_hat: n as f64 * max_gap, distinct: gaps.len() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchmidtRecord {
    pub n: u64,
    pub n1: u64,
    pub n2: u64,
    pub dist: f64,
    /// `-log(dist) / log(n)`, absent at `n = 1`.
    pub exponent: Option<f64>,
    pub highlighted: bool,
}

/// Roughly eight points per decade up to `n_max`, always including 1 and `n_max`.
pub fn log_schedule(n_max: u64, per_decade: u32) -> Vec<u64> {
    let mut v = vec![];
    let mut i = 0;
    loop {
        let n = 10f64.powf(i as f64 / per_decade as f64).round() as u64;
        if n >= n_max {
            break;
        }
        v.push(n);
        i += 1;
    }
    v.push(n_max);
    v.dedup();
    v
}

fn best_pair(alpha: [Turn; 2], n: u64) -> (u64, u64, Turn) {
    let mut b: Vec<(Turn, u64)> = (1..=n).map(|k| (turn_mul(alpha[1], k), k)).collect();
    b.sort_unstable();
    let m = b.len();
    (1..=n)
        .into_par_iter()
        .map(|k| {
            let a = turn_mul(alpha[0], k);
            let i = b.partition_point(|e| e.0 < a);
            let mut best = (k, 0, Turn::MAX);
            for e in [b[i % m], b[(i + m - 1) % m]] {
                let d = a.wrapping_sub(e.0);
                let d = d.min(d.wrapping_neg());
                if d < best.2 || (d == best.2 && e.1 < best.1) {
                    best = (k, e.1, d);
                }
            }
            best
        })
        .reduce(|| (0, 0, Turn::MAX), |x, y| if y.2 < x.2 || (y.2 == x.2 && (y.0, y.1) < (x.0, x.1)) { y } else { x })
}

/// Best `||n1 a1 - n2 a2||` over `1 <= n1, n2 <= n` along `schedule`.
pub fn schmidt_probe(alpha: &RotationVector, schedule: &[u64]) -> Result<Vec<SchmidtRecord>> {
    if alpha.rho() != 2 {
        return Err(Error::Config("the exponent probe needs a rotation of T^2".into()));
    }
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let t = alpha.turns();
    Ok(schedule
        .iter()
        .filter(|&&n| n >= 1)
        .map(|&n| {
            let (n1, n2, d) = best_pair(t, n);
            let dist = crate::hp::turn_to_f64(d);
            let exponent = (n > 1).then(|| -dist.ln() / (n as f64).ln());
            SchmidtRecord { n, n1, n2, dist, exponent, highlighted: exponent.is_some_and(|e| e >= golden) }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvgStyle {
    pub size: u32,
    pub shade: bool,
    pub stroke: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { size: 800, shade: true, stroke: 0.0015 }
    }
}

fn shade(coding: &[bool]) -> String {
    // FNV-1a over the coding bits
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in coding {
        h ^= b as u64 + 1;
        h = h.wrapping_mul(0x100000001b3);
    }
    let c = |s: u32| 150 + ((h >> s) & 0x5f) as u8;
    format!("#{:02x}{:02x}{:02x}", c(0), c(8), c(16))
}

/// Plain SVG 1.1 drawing of the partition in the unit square, `y` upward.
pub fn emit_svg(p: &TorusPartition, style: &SvgStyle) -> String {
    let f = |x: f64| fmt_sig(x, 15);
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 1 1\">\n",
        style.size
    ));
    s.push_str(&format!("<title>partition l={} cells={}</title>\n", p.ell, p.card()));
    s.push_str("<g transform=\"matrix(1 0 0 -1 0 1)\">\n");
    s.push_str("<g id=\"cells\" stroke=\"none\">\n");
    for c in &p.cells {
        let pts: Vec<String> = c.vertices.iter().map(|v| format!("{},{}", f(v[0]), f(v[1]))).collect();
        let fill = if style.shade { shade(&c.coding) } else { "#ffffff".into() };
        s.push_str(&format!("<polygon points=\"{}\" fill=\"{fill}\"/>\n", pts.join(" ")));
    }
    s.push_str("</g>\n");
    let sw = f(style.stroke);
    s.push_str(&format!("<g id=\"vertical\" stroke=\"#1f4e9a\" stroke-width=\"{sw}\">\n"));
    for &x in &p.v_lines {
        s.push_str(&format!("<line x1=\"{0}\" y1=\"0\" x2=\"{0}\" y2=\"1\"/>\n", f(x)));
    }
    s.push_str("</g>\n");
    s.push_str(&format!("<g id=\"horizontal\" stroke=\"#9a1f1f\" stroke-width=\"{sw}\">\n"));
    for &y in &p.h_lines {
        s.push_str(&format!("<line x1=\"0\" y1=\"{0}\" x2=\"1\" y2=\"{0}\"/>\n", f(y)));
    }
    s.push_str("</g>\n");
    s.push_str(&format!("<g id=\"diagonal\" stroke=\"#1f7a2e\" stroke-width=\"{sw}\">\n"));
    for &(e, _) in &p.e_sorted {
        let e = e as f64 / SCALE;
        // y = x + e clipped to the unit square
        let (x0, x1) = ((-e).max(0.0), (1.0 - e).min(1.0));
        s.push_str(&format!("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", f(x0), f(x0 + e), f(x1), f(x1 + e)));
    }
    s.push_str("</g>\n</g>\n</svg>\n");
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct CellDoc {
    pub id: usize,
    pub vertices: Vec<[f64; 2]>,
    pub lines: Vec<LineId>,
    pub area: f64,
    pub coding: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionDoc {
    pub ell: usize,
    pub diagonals: bool,
    pub alpha: Vec<String>,
    pub cells: Vec<CellDoc>,
    pub adjacency: Vec<Adjacency>,
}

/// Export view with coordinates rounded to 15 significant digits.
pub fn partition_doc(p: &TorusPartition, alpha: &RotationVector) -> PartitionDoc {
    let r = |x: f64| round_sig(x, 15);
    PartitionDoc {
        ell: p.ell,
        diagonals: p.diagonals,
        alpha: alpha.exprs().to_vec(),
        cells: p
            .cells
            .iter()
            .map(|c| CellDoc {
                id: c.id,
                vertices: c.vertices.iter().map(|v| [r(v[0]), r(v[1])]).collect(),
                lines: c.lines.clone(),
                area: r(c.area),
                coding: c.coding_string(),
            })
            .collect(),
        adjacency: p.adjacency.iter().map(|a| Adjacency { length: r(a.length), ..a.clone() }).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(s: &str) -> RotationVector {
        RotationVector::parse(s, 256).unwrap()
    }

    #[test]
    fn single_line_triple_gives_two_triangles() {
        let p = TorusPartition::build(&alpha("sqrt2-1, sqrt3-1"), 1, true).unwrap();
        assert_eq!(p.card(), 2);
        let mut codes: Vec<String> = p.cells.iter().map(|c| c.coding_string()).collect();
        codes.sort();
        assert_eq!(codes, ["0", "1"]);
        assert!(p.cells.iter().all(|c| (c.area - 0.5).abs() < 1e-15 && c.lines.len() == 3));
        assert_eq!((p.vertex_count(), p.edge_count()), (1, 3));
    }

    #[test]
    fn counts_and_euler() {
        for s in ["sqrt2, e", "sqrt2-1, sqrt3-1", "golden, sqrt2-1"] {
            let a = alpha(s);
            for l in [2, 3, 7, 12] {
                let p = TorusPartition::build(&a, l, true).unwrap();
                let inv = p.invariants();
                assert!(inv.ok(), "{s} l={l}: {inv:?}");
                assert_eq!(TorusPartition::build(&a, l, false).unwrap().card(), l * l);
            }
        }
    }

    #[test]
    fn codings_match_direct_evaluation() {
        let a = alpha("golden, sqrt2-1");
        let p = TorusPartition::build(&a, 5, true).unwrap();
        let [a1, a2] = a.as_f64();
        for c in &p.cells {
            let x = c.representative();
            for (i, &bit) in c.coding.iter().enumerate() {
                let u = (x[0] + i as f64 * a1).fract();
                let v = (x[1] + i as f64 * a2).fract();
                assert_eq!(u < v, bit, "cell {} letter {i}", c.id);
            }
        }
        // crossing a vertical edge of line j flips letter j
        for adj in p.adjacency.iter().filter(|e| matches!(e.line, LineId::V(_))) {
            let (u, v) = (&p.cells[adj.a].coding, &p.cells[adj.b].coding);
            let diff: Vec<usize> = (0..u.len()).filter(|&i| u[i] != v[i]).collect();
            assert_eq!(diff, vec![adj.line.index() as usize]);
        }
    }

    #[test]
    fn refinement_and_location() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let coarse = TorusPartition::build(&a, 6, true).unwrap();
        let fine = TorusPartition::build(&a, 7, true).unwrap();
        assert!(fine.refinement_mismatches(&coarse).is_empty());
        for c in &coarse.cells {
            assert_eq!(coarse.locate(c.representative()), c.id);
        }
    }

    #[test]
    fn rejects_rational_like_incidence() {
        // a2 = 2 a1 mod 1 puts k = 2 corners on earlier slope-1 lines
        let a = alpha("sqrt2-1, 2*sqrt2-2");
        assert!(matches!(TorusPartition::build(&a, 4, true), Err(Error::Degeneracy(_))));
    }

    #[test]
    fn gaps_three_distance() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let t = f64_to_turn(g);
        let one = gap_stats(t, &[0.0], 1).unwrap();
        assert_eq!((one.min_gap, one.max_gap), (1.0, 1.0));
        for q in [8u64, 13, 21, 34, 55, 89, 144] {
            let s = gap_stats(t, &[0.0], q).unwrap();
            assert!(s.distinct <= 3);
            assert!(s.max_gap <= 3.0 / q as f64);
        }
        assert!(gap_stats(t, &[0.25, 0.25], 3).is_err());
    }

    fn brute(a: [f64; 2], n: u64) -> f64 {
        let mut best = f64::INFINITY;
        for n1 in 1..=n {
            for n2 in 1..=n {
                let v = n1 as f64 * a[0] - n2 as f64 * a[1];
                best = best.min((v - v.round()).abs());
            }
        }
        best
    }

    #[test]
    fn schmidt_matches_brute_force() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let recs = schmidt_probe(&a, &[1, 2, 5, 17, 60, 150]).unwrap();
        let f = a.as_f64();
        assert!((recs[0].dist - (f[0] - f[1]).abs()).abs() < 1e-15);
        for r in &recs {
            assert!((r.dist - brute(f, r.n)).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn svg_is_deterministic() {
        let a = alpha("sqrt2-1, sqrt3-1");
        let p = TorusPartition::build(&a, 4, true).unwrap();
        let s1 = emit_svg(&p, &SvgStyle::default());
        let s2 = emit_svg(&TorusPartition::build(&a, 4, true).unwrap(), &SvgStyle::default());
        assert_eq!(s1, s2);
        assert_eq!(s1.matches("<polygon").count(), 44);
        assert_eq!(s1.matches("<line").count(), 4 + 4 + 7);
    }
}
