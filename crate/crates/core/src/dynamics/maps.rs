//! Piecewise-smooth maps on the torus, built from a small set of pieces.
//!
//! A map has `d` components; each component is a linear combination of
//! [`Piece`]s. Breakpoint lines of all pieces form the rectangle grid whose
//! cells carry the smooth branches used by derivative-based functionals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::gl_integrate_2d;
use crate::surd::{parse_real, split_top_level};

pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MapClass {
    Step,
    F1,
    F2,
    G,
    Triangle,
}

/// Triangle with vertices `(0,0)`, `(a,b)`, `(0,c)`, wrapped onto the torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriangleSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TriangleSpec {
    /// Requires `0 < a, c <= 1` and `|b| <= 1`, which keeps the triangle
    /// injective on the torus.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0 && c > 0.0 && c <= 1.0 && (-1.0..=1.0).contains(&b)) {
            return Err(Error::Config(format!("triangle ({a}, {b}, {c}) needs 0 < a,c <= 1 and |b| <= 1")));
        }
        Ok(TriangleSpec { a, b, c })
    }

    pub fn area(&self) -> f64 {
        0.5 * self.a * self.c
    }

    /// Lower and upper edge heights above abscissa `x in [0, a]`.
    #[inline]
    fn edges(&self, x: f64) -> (f64, f64) {
        let t = x / self.a;
        (self.b * t, self.c + (self.b - self.c) * t)
    }

    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if x >= self.a {
            return false;
        }
        let (lo, hi) = self.edges(x);
        let r = y - lo;
        r - r.floor() < hi - lo
    }

    /// Distance (sup-norm along axes) to the boundary of the wrapped triangle.
    pub fn boundary_dist(&self, x: f64, y: f64) -> f64 {
        let mut d = x.abs().min((x - self.a).abs()).min((1.0 - x).abs());
        let xc = x.clamp(0.0, self.a);
        if (0.0..=self.a).contains(&x) || (x - xc).abs() < 1e-9 {
            let (lo, hi) = self.edges(xc);
            let slope_lo = (self.b / self.a).abs().max(1.0);
            let slope_hi = ((self.b - self.c) / self.a).abs().max(1.0);
            for (e, s) in [(lo, slope_lo), (hi, slope_hi)] {
                let r = y - e;
                let r = (r - r.round()).abs();
                d = d.min(r / s);
            }
        }
        d
    }
}

/// 1D piecewise-linear periodic profile: `v0 + slope*u + sum_{p <= u} jump_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pwl1D {
    pub v0: f64,
    pub slope: f64,
    /// Interior jumps `(position, size)` with position in `(0, 1)`.
    pub jumps: Vec<(f64, f64)>,
}

impl Pwl1D {
    pub fn eval(&self, u: f64) -> f64 {
        let mut v = self.v0 + self.slope * u;
        for &(p, j) in &self.jumps {
            if u >= p {
                v += j;
            }
        }
        v
    }

    /// Jump at `0 = 1` so that the profile is periodic.
    pub fn wrap_jump(&self) -> f64 {
        -(self.slope + self.jumps.iter().map(|j| j.1).sum::<f64>())
    }
}

/// Second factor of a separable piece, a function of `x2`.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor2 {
    One,
    Pwl(Pwl1D),
}

impl Factor2 {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Factor2::One => 1.0,
            Factor2::Pwl(p) => p.eval(u),
        }
    }
}

/// One term `coef * psi(<m, x> - shift)` of a sawtooth decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SawTerm {
    pub coef: f64,
    pub form: [i64; 2],
    pub shift: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Piece {
    Constant(f64),
    /// `{x_axis - shift} - 1/2`.
    Sawtooth { axis: usize, shift: f64 },
    /// `u(1 - u) - 1/6` with `u = x_axis`.
    Parabola { axis: usize },
    /// `1_[0, beta)(x_axis) - beta`.
    Step { axis: usize, beta: f64 },
    /// `{g1 x1} {g2 x2}`.
    FracProduct { g1: f64, g2: f64 },
    /// Indicator of a wrapped triangle.
    Triangle(TriangleSpec),
    /// Indicator of `x1 + x2 < 1`.
    Delta1,
    /// `cos(2 pi <h, x>)`.
    Harmonic { h: [i64; 2] },
}

#[inline]
fn fr(u: f64) -> f64 {
    u - u.floor()
}

fn frac_breaks(g: f64) -> Vec<f64> {
    let mut v = vec![0.0];
    let mut j = 1.0;
    while j / g < 1.0 - 1e-15 {
        v.push(j / g);
        j += 1.0;
    }
    v
}

/// `int_0^1 {g u} du`.
pub fn frac_mean(g: f64) -> f64 {
    let f = g.floor();
    (0.5 * f + 0.5 * (g - f).powi(2)) / g
}

fn frac_pwl(g: f64) -> Pwl1D {
    Pwl1D { v0: 0.0, slope: g, jumps: frac_breaks(g).into_iter().skip(1).map(|p| (p, -1.0)).collect() }
}

impl Piece {
    pub fn uses_axis(&self, axis: usize) -> bool {
        match self {
            Piece::Constant(_) => false,
            Piece::Sawtooth { axis: a, .. } | Piece::Parabola { axis: a } | Piece::Step { axis: a, .. } => *a == axis,
            Piece::FracProduct { .. } | Piece::Triangle(_) | Piece::Delta1 => true,
            Piece::Harmonic { h } => h[axis] != 0,
        }
    }

    pub fn is_piecewise_constant(&self) -> bool {
        matches!(self, Piece::Constant(_) | Piece::Step { .. } | Piece::Triangle(_) | Piece::Delta1)
    }

    /// True for pieces smooth on every cell of a rectangle grid.
    pub fn is_rectangular(&self) -> bool {
        !matches!(self, Piece::Triangle(_) | Piece::Delta1)
    }

    /// Discontinuity abscissae along `axis`, in `[0, 1)`.
    pub fn breaks(&self, axis: usize) -> Vec<f64> {
        match self {
            Piece::Sawtooth { axis: a, shift } if *a == axis => vec![*shift],
            Piece::Step { axis: a, beta } if *a == axis => vec![0.0, *beta],
            Piece::FracProduct { g1, g2 } => frac_breaks(if axis == 0 { *g1 } else { *g2 }),
            Piece::Triangle(t) if axis == 0 => {
                if t.a < 1.0 {
                    vec![0.0, t.a]
                } else {
                    vec![0.0]
                }
            }
            Piece::Delta1 => vec![0.0],
            _ => vec![],
        }
    }

    #[inline]
    pub fn value(&self, x: [f64; 2]) -> f64 {
        match *self {
            Piece::Constant(c) => c,
            Piece::Sawtooth { axis, shift } => fr(x[axis] - shift) - 0.5,
            Piece::Parabola { axis } => x[axis] * (1.0 - x[axis]) - 1.0 / 6.0,
            Piece::Step { axis, beta } => (if x[axis] < beta { 1.0 } else { 0.0 }) - beta,
            Piece::FracProduct { g1, g2 } => fr(g1 * x[0]) * fr(g2 * x[1]),
            Piece::Triangle(t) => {
                if t.contains(x[0], x[1]) {
                    1.0
                } else {
                    0.0
                }
            }
            Piece::Delta1 => {
                if x[0] + x[1] < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Piece::Harmonic { h } => (std::f64::consts::TAU * (h[0] as f64 * x[0] + h[1] as f64 * x[1])).cos(),
        }
    }

    /// Branch through `anchor` evaluated at `x`; continuous up to the cell closure.
    pub fn value_on(&self, anchor: [f64; 2], x: [f64; 2]) -> f64 {
        match *self {
            Piece::Sawtooth { axis, shift } => {
                let k = (anchor[axis] - shift).floor();
                x[axis] - shift - k - 0.5
            }
            Piece::Step { axis, beta } => (if anchor[axis] < beta { 1.0 } else { 0.0 }) - beta,
            Piece::FracProduct { g1, g2 } => {
                let k1 = (g1 * anchor[0]).floor();
                let k2 = (g2 * anchor[1]).floor();
                (g1 * x[0] - k1) * (g2 * x[1] - k2)
            }
            Piece::Triangle(_) | Piece::Delta1 => self.value(anchor),
            _ => self.value(x),
        }
    }

    /// Gradient of the branch through `anchor`, evaluated at `x`.
    pub fn grad_on(&self, anchor: [f64; 2], x: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0; 2];
        match *self {
            Piece::Sawtooth { axis, .. } => g[axis] = 1.0,
            Piece::Parabola { axis } => g[axis] = 1.0 - 2.0 * x[axis],
            Piece::FracProduct { g1, g2 } => {
                let k1 = (g1 * anchor[0]).floor();
                let k2 = (g2 * anchor[1]).floor();
                g = [g1 * (g2 * x[1] - k2), (g1 * x[0] - k1) * g2];
            }
            Piece::Harmonic { h } => {
                let s = -std::f64::consts::TAU * (std::f64::consts::TAU * (h[0] as f64 * x[0] + h[1] as f64 * x[1])).sin();
                g = [s * h[0] as f64, s * h[1] as f64];
            }
            _ => {}
        }
        g
    }

    /// Distance from `x` to the discontinuity set (infinite for continuous pieces).
    pub fn boundary_dist(&self, x: [f64; 2]) -> f64 {
        let circ = |u: f64, p: f64| {
            let r = u - p;
            (r - r.round()).abs()
        };
        match *self {
            Piece::Sawtooth { axis, shift } => circ(x[axis], shift),
            Piece::Step { axis, beta } => circ(x[axis], 0.0).min(circ(x[axis], beta)),
            Piece::FracProduct { g1, g2 } => {
                let d1 = circ(g1 * x[0], 0.0) / g1;
                let d2 = circ(g2 * x[1], 0.0) / g2;
                d1.min(circ(x[0], 0.0)).min(d2).min(circ(x[1], 0.0))
            }
            Piece::Triangle(t) => t.boundary_dist(x[0], x[1]),
            Piece::Delta1 => circ(x[0], 0.0).min(circ(x[1], 0.0)).min(circ(x[0] + x[1], 0.0) / 2f64.sqrt()),
            _ => f64::INFINITY,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Piece::Constant(c) => c,
            Piece::FracProduct { g1, g2 } => frac_mean(g1) * frac_mean(g2),
            Piece::Triangle(t) => t.area(),
            Piece::Delta1 => 0.5,
            Piece::Harmonic { h: [0, 0] } => 1.0,
            _ => 0.0,
        }
    }

    /// Exact decomposition into sawtooth terms plus a constant, when one is known.
    pub fn sawtooth_terms(&self) -> Option<(Vec<SawTerm>, f64)> {
        let t = |coef, form, shift| SawTerm { coef, form, shift };
        match *self {
            Piece::Constant(c) => Some((vec![], c)),
            Piece::Sawtooth { axis, shift } => {
                let mut f = [0, 0];
                f[axis] = 1;
                Some((vec![t(1.0, f, shift)], 0.0))
            }
            Piece::Step { axis, beta } => {
                let mut f = [0, 0];
                f[axis] = 1;
                Some((vec![t(1.0, f, beta), t(-1.0, f, 0.0)], 0.0))
            }
            // 1_{x<y} = {x - y} + {y} - {x}
            Piece::Triangle(tr) if tr.a == 1.0 && tr.b == 1.0 && tr.c == 1.0 => {
                Some((vec![t(1.0, [1, -1], 0.0), t(1.0, [0, 1], 0.0), t(-1.0, [1, 0], 0.0)], 0.5))
            }
            Piece::Delta1 => Some((vec![t(1.0, [1, 1], 0.0), t(-1.0, [1, 0], 0.0), t(-1.0, [0, 1], 0.0)], 0.5)),
            _ => None,
        }
    }

    /// Form `f1(x1) * f2(x2)` with `f1` piecewise linear, when available.
    pub fn separable(&self) -> Option<(Pwl1D, Factor2)> {
        let one = Pwl1D { v0: 1.0, slope: 0.0, jumps: vec![] };
        let saw = |s: f64| Pwl1D {
            v0: fr(-s) - 0.5,
            slope: 1.0,
            jumps: if s > 0.0 { vec![(s, -1.0)] } else { vec![] },
        };
        let step = |b: f64| Pwl1D { v0: 1.0 - b, slope: 0.0, jumps: vec![(b, -1.0)] };
        match *self {
            Piece::Constant(c) => Some((Pwl1D { v0: c, slope: 0.0, jumps: vec![] }, Factor2::One)),
            Piece::Sawtooth { axis: 0, shift } => Some((saw(shift), Factor2::One)),
            Piece::Sawtooth { axis: _, shift } => Some((one, Factor2::Pwl(saw(shift)))),
            Piece::Step { axis: 0, beta } => Some((step(beta), Factor2::One)),
            Piece::Step { axis: _, beta } => Some((one, Factor2::Pwl(step(beta)))),
            Piece::FracProduct { g1, g2 } => Some((frac_pwl(g1), Factor2::Pwl(frac_pwl(g2)))),
            _ => None,
        }
    }
}

/// Linear combination of pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub terms: Vec<(f64, Piece)>,
}

impl Component {
    #[inline]
    pub fn value(&self, x: [f64; 2]) -> f64 {
        self.terms.iter().map(|(c, p)| c * p.value(x)).sum()
    }

    pub fn value_on(&self, anchor: [f64; 2], x: [f64; 2]) -> f64 {
        self.terms.iter().map(|(c, p)| c * p.value_on(anchor, x)).sum()
    }

    pub fn grad_on(&self, anchor: [f64; 2], x: [f64; 2]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (c, p) in &self.terms {
            let pg = p.grad_on(anchor, x);
            g[0] += c * pg[0];
            g[1] += c * pg[1];
        }
        g
    }

    pub fn mean(&self) -> f64 {
        self.terms.iter().map(|(c, p)| c * p.mean()).sum()
    }

    pub fn boundary_dist(&self, x: [f64; 2]) -> f64 {
        self.terms.iter().map(|(_, p)| p.boundary_dist(x)).fold(f64::INFINITY, f64::min)
    }

    /// Combined sawtooth decomposition, if every piece has one.
    pub fn sawtooth_terms(&self) -> Option<(Vec<SawTerm>, f64)> {
        let mut terms = Vec::new();
        let mut k = 0.0;
        for (c, p) in &self.terms {
            let (t, k0) = p.sawtooth_terms()?;
            terms.extend(t.into_iter().map(|s| SawTerm { coef: s.coef * c, ..s }));
            k += c * k0;
        }
        Some((terms, k))
    }

    /// Separable parts, if every piece is separable.
    pub fn separable(&self) -> Option<Vec<(f64, Pwl1D, Factor2)>> {
        self.terms.iter().map(|(c, p)| p.separable().map(|(a, b)| (*c, a, b))).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub values: Vec<f64>,
    pub cell: [usize; 2],
    pub boundary_hit: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarMap {
    pub name: String,
    pub rho: usize,
    pub components: Vec<Component>,
    pub class: MapClass,
    /// Sorted breakpoints per axis, starting with 0 (cell lower edges).
    pub breaks: [Vec<f64>; 2],
    pub boundary_tol: f64,
}

fn merge_breaks(mut v: Vec<f64>) -> Vec<f64> {
    v.push(0.0);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    v
}

impl PlanarMap {
    pub fn new(name: &str, components: Vec<Component>, rho: Option<usize>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Config("map has no components".into()));
        }
        let pieces = || components.iter().flat_map(|c| c.terms.iter().map(|t| &t.1));
        let needs2 = pieces().any(|p| p.uses_axis(1));
        let rho = rho.unwrap_or(if needs2 { 2 } else { 1 });
        if !(1..=2).contains(&rho) || (needs2 && rho == 1) {
            return Err(Error::Config(format!("map {name:?} cannot live on T^{rho}")));
        }
        let class = if pieces().any(|p| !p.is_rectangular()) {
            MapClass::Triangle
        } else if pieces().all(|p| p.is_piecewise_constant()) {
            MapClass::Step
        } else if components.len() == 2 {
            MapClass::F2
        } else {
            MapClass::F1
        };
        let breaks = [0, 1].map(|ax| merge_breaks(pieces().flat_map(|p| p.breaks(ax)).collect()));
        Ok(PlanarMap { name: name.to_string(), rho, components, class, breaks, boundary_tol: BOUNDARY_TOL })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn means(&self) -> Vec<f64> {
        self.components.iter().map(Component::mean).collect()
    }

    pub fn is_centered(&self) -> bool {
        self.means().iter().all(|m| m.abs() < 1e-12)
    }

    pub fn cell_of(&self, x: [f64; 2]) -> [usize; 2] {
        [0, 1].map(|ax| self.breaks[ax].partition_point(|&b| b <= x[ax]).saturating_sub(1))
    }

    /// Rectangle cell `[x0, x1) x [y0, y1)` for a cell index.
    pub fn cell_rect(&self, cell: [usize; 2]) -> [f64; 4] {
        let edge = |ax: usize, i: usize| self.breaks[ax].get(i).copied().unwrap_or(1.0);
        [edge(0, cell[0]), edge(0, cell[0] + 1), edge(1, cell[1]), edge(1, cell[1] + 1)]
    }

    pub fn cells(&self) -> impl Iterator<Item = [usize; 2]> + '_ {
        let n1 = self.breaks[0].len();
        let n2 = if self.rho == 2 { self.breaks[1].len() } else { 1 };
        (0..n1).flat_map(move |i| (0..n2).map(move |j| [i, j]))
    }

    #[inline]
    pub fn is_boundary(&self, x: [f64; 2]) -> bool {
        self.components.iter().any(|c| c.boundary_dist(x) < self.boundary_tol)
    }

    pub fn evaluate(&self, x: [f64; 2]) -> Evaluation {
        let x = [fr(x[0]), fr(x[1])];
        Evaluation {
            values: self.components.iter().map(|c| c.value(x)).collect(),
            cell: self.cell_of(x),
            boundary_hit: self.is_boundary(x),
        }
    }

    /// Per-cell quadrature of the mean of each component.
    pub fn quadrature_means(&self) -> Option<Vec<f64>> {
        if self.class == MapClass::Triangle {
            return None;
        }
        let mut acc = vec![0.0; self.dim()];
        for cell in self.cells() {
            let r = self.cell_rect(cell);
            let (y0, y1) = if self.rho == 2 { (r[2], r[3]) } else { (0.0, 1.0) };
            let anchor = [0.5 * (r[0] + r[1]), 0.5 * (y0 + y1)];
            for (k, c) in self.components.iter().enumerate() {
                acc[k] += gl_integrate_2d(r[0], r[1], y0, y1, |x, y| c.value_on(anchor, [x, y]));
            }
        }
        Some(acc)
    }

    /// Checks the declared means against quadrature and the derivative
    /// evaluators against central differences.
    pub fn validate(&self) -> Result<()> {
        if let Some(q) = self.quadrature_means() {
            for (k, (m, qm)) in self.means().iter().zip(&q).enumerate() {
                if (m - qm).abs() > 1e-8 {
                    return Err(Error::MapValidation(format!("component {k}: mean {m} vs quadrature {qm}")));
                }
            }
        }
        if matches!(self.class, MapClass::F1 | MapClass::F2 | MapClass::G) {
            let h = 1e-6;
            for cell in self.cells() {
                let r = self.cell_rect(cell);
                let (y0, y1) = if self.rho == 2 { (r[2], r[3]) } else { (0.0, 1.0) };
                let anchor = [0.5 * (r[0] + r[1]), 0.5 * (y0 + y1)];
                for (sx, sy) in [(0.3, 0.3), (0.7, 0.4), (0.5, 0.8)] {
                    let p = [r[0] + sx * (r[1] - r[0]), y0 + sy * (y1 - y0)];
                    for (k, c) in self.components.iter().enumerate() {
                        let g = c.grad_on(anchor, p);
                        for ax in 0..self.rho {
                            let mut a = p;
                            let mut b = p;
                            a[ax] -= h;
                            b[ax] += h;
                            let fd = (c.value_on(anchor, b) - c.value_on(anchor, a)) / (2.0 * h);
                            if (fd - g[ax]).abs() > 1e-4 {
                                return Err(Error::MapValidation(format!(
                                    "component {k}: d/dx{} = {} but finite difference gives {fd} at {p:?}",
                                    ax + 1,
                                    g[ax]
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn args(s: &str, n: usize, name: &str) -> Result<Vec<f64>> {
    let parts = split_top_level(s);
    if parts.len() != n || parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("{name} expects {n} arguments, got {s:?}")));
    }
    parts.iter().map(|p| parse_real(p, 128).map(|r| r.to_f64())).collect()
}

/// Parses one registry atom into weighted pieces.
fn atom(src: &str) -> Result<Vec<(f64, Piece)>> {
    let s = src.trim();
    let (name, inner) = match s.find('(') {
        Some(i) if s.ends_with(')') => (s[..i].trim(), Some(&s[i + 1..s.len() - 1])),
        _ => (s, None),
    };
    let tri = |a: f64, b: f64, c: f64| TriangleSpec::new(a, b, c).map(Piece::Triangle);
    let v = match (name, inner) {
        ("psi", None) => vec![(1.0, Piece::Sawtooth { axis: 0, shift: 0.0 })],
        ("psi2", None) => vec![(1.0, Piece::Sawtooth { axis: 1, shift: 0.0 })],
        ("sawtooth", Some(a)) => {
            let v = args(a, 2, name)?;
            vec![(1.0, Piece::Sawtooth { axis: axis_arg(v[0])?, shift: fr(v[1]) })]
        }
        ("parabola", None) => vec![(1.0, Piece::Parabola { axis: 0 })],
        ("step", Some(a)) => {
            let b = args(a, 1, name)?[0];
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::Config("step(beta) needs 0 < beta < 1".into()));
            }
            vec![(1.0, Piece::Step { axis: 0, beta: b })]
        }
        ("triangle0", None) => vec![(1.0, tri(1.0, 1.0, 1.0)?), (1.0, Piece::Constant(-0.5))],
        ("delta0", None) => vec![(1.0, tri(1.0, 1.0, 1.0)?)],
        ("delta1", None) => vec![(1.0, Piece::Delta1), (1.0, Piece::Constant(-0.5))],
        ("delta1_indicator", None) => vec![(1.0, Piece::Delta1)],
        ("xy_quarter", None) => vec![(1.0, Piece::FracProduct { g1: 1.0, g2: 1.0 }), (1.0, Piece::Constant(-0.25))],
        ("gamma", Some(a)) | ("frac_product", Some(a)) => {
            let v = args(a, 2, name)?;
            if !(v[0] > 0.0 && v[1] > 0.0) {
                return Err(Error::Config(format!("{name} needs positive slopes")));
            }
            let p = Piece::FracProduct { g1: v[0], g2: v[1] };
            let mut out = vec![(1.0, p.clone())];
            if name == "gamma" {
                out.push((1.0, Piece::Constant(-p.mean())));
            }
            out
        }
        ("indicator", Some(a)) | ("centered", Some(a)) => {
            let a = a.trim();
            let a = a.strip_prefix("Δ").or_else(|| a.strip_prefix('D')).map(str::trim).unwrap_or(a);
            let a = a.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(a);
            let v = args(a, 3, name)?;
            let t = TriangleSpec::new(v[0], v[1], v[2])?;
            let mut out = vec![(1.0, Piece::Triangle(t))];
            if name == "centered" {
                out.push((1.0, Piece::Constant(-t.area())));
            }
            out
        }
        ("cos", Some(a)) => {
            let v = args(a, 2, name)?;
            vec![(1.0, Piece::Harmonic { h: [v[0] as i64, v[1] as i64] })]
        }
        ("zero", None) => vec![(1.0, Piece::Constant(0.0))],
        ("const", Some(a)) => vec![(1.0, Piece::Constant(args(a, 1, name)?[0]))],
        _ => match parse_real(s, 128) {
            Ok(r) => vec![(1.0, Piece::Constant(r.to_f64()))],
            Err(_) => return Err(Error::Config(format!("unknown map {s:?}"))),
        },
    };
    Ok(v)
}

fn axis_arg(v: f64) -> Result<usize> {
    match v as i64 {
        1 => Ok(0),
        2 => Ok(1),
        _ => Err(Error::Config("axis must be 1 or 2".into())),
    }
}

/// Splits at top-level `+`/`-` that are not exponent signs.
fn split_terms(s: &str) -> Vec<(f64, String)> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut depth = 0;
    let mut sign = 1.0;
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let is_exp = i >= 2 && (chars[i - 1] == 'e' || chars[i - 1] == 'E') && chars[i - 2].is_ascii_digit();
        if depth == 0 && (c == '+' || c == '-') && !is_exp {
            if !cur.trim().is_empty() {
                out.push((sign, std::mem::take(&mut cur)));
            } else {
                cur.clear();
            }
            sign = if c == '-' { -1.0 } else { 1.0 };
            continue;
        }
        cur.push(c);
    }
    if !cur.trim().is_empty() {
        out.push((sign, cur));
    }
    out
}

fn parse_component(src: &str) -> Result<Component> {
    let mut terms = Vec::new();
    for (sign, t) in split_terms(src) {
        let t = t.trim();
        let (coef, body) = match find_top_level(t, '*') {
            Some(i) => (parse_real(&t[..i], 128)?.to_f64(), &t[i + 1..]),
            None => (1.0, t),
        };
        for (c, p) in atom(body)? {
            terms.push((sign * coef * c, p));
        }
    }
    if terms.is_empty() {
        return Err(Error::Config(format!("empty map component {src:?}")));
    }
    Ok(Component { terms })
}

fn find_top_level(s: &str, ch: char) -> Option<usize> {
    let mut depth = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == ch && depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Builds a map from its registry name, e.g. `psi`, `triangle0`,
/// `gamma(3/2,5/3)`, `indicator(Δ(1,1,1))`, `psi + 0.1` or
/// `xy_quarter; gamma(1.5,1.6)` for a two-component map.
pub fn map_from_name(name: &str, rho: Option<usize>) -> Result<PlanarMap> {
    let comps: Vec<String> = name.split(';').map(|s| s.trim().to_string()).collect();
    let components = comps.iter().map(|c| parse_component(c)).collect::<Result<Vec<_>>>()?;
    PlanarMap::new(name.trim(), components, rho)
}

/// Closed forms for `{g1 x1}{g2 x2}` with `1 < g1, g2 < 2`.
pub mod example_gamma {
    pub fn mean(g1: f64, g2: f64) -> f64 {
        (g1 / 2.0 - 1.0 + 1.0 / g1) * (g2 / 2.0 - 1.0 + 1.0 / g2)
    }
    pub fn lambda1(g1: f64, g2: f64) -> f64 {
        g1 * (g2 / 2.0 - 1.0 + 1.0 / g2)
    }
    pub fn lambda2(g1: f64, g2: f64) -> f64 {
        g2 * (g1 / 2.0 - 1.0 + 1.0 / g1)
    }
    /// Determinant of the 2x2 matrix for the pair `(gamma(g1, g2), xy_quarter)`.
    pub fn pair_det(g1: f64, g2: f64) -> f64 {
        0.5 * (g2 - g1) * (1.0 - (g1 + g2) / (g1 * g2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        let d0 = map_from_name("delta0", None).unwrap();
        assert_eq!(d0.evaluate([0.2, 0.5]).values, vec![1.0]);
        assert_eq!(d0.evaluate([0.5, 0.2]).values, vec![0.0]);
        let q = map_from_name("xy_quarter", None).unwrap();
        assert_eq!(q.evaluate([0.5, 0.5]).values, vec![0.0]);
        let s = map_from_name("step(0.3)", None).unwrap();
        assert!(s.evaluate([0.3, 0.0]).boundary_hit);
        assert!(!s.evaluate([0.31, 0.0]).boundary_hit);
        assert_eq!(s.rho, 1);
    }

    #[test]
    fn registry_shapes() {
        let m = map_from_name("xy_quarter; gamma(3/2, 5/3)", None).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.class, MapClass::F2);
        assert!(m.is_centered());
        assert_eq!(m.breaks[0], vec![0.0, 2.0 / 3.0]);
        assert_eq!(map_from_name("triangle0", None).unwrap().class, MapClass::Triangle);
        assert_eq!(map_from_name("step(0.5)", None).unwrap().class, MapClass::Step);
        let d = map_from_name("psi + 0.1", None).unwrap();
        assert!((d.means()[0] - 0.1).abs() < 1e-15);
        let e = map_from_name("2*psi - 1e-3", None).unwrap();
        assert!((e.evaluate([0.75, 0.0]).values[0] - 0.499).abs() < 1e-15);
        assert!(map_from_name("indicator(Δ(1, -0.4, 0.8))", None).is_ok());
        assert!(map_from_name("nonsense", None).is_err());
        assert!(map_from_name("indicator(Δ(1, 2, 0.8))", None).is_err());
    }

    #[test]
    fn validation_passes_for_registry() {
        for name in ["psi", "parabola", "xy_quarter", "gamma(1.5,1.6667)", "gamma(1.2,1.9)", "step(0.3)", "cos(1,2)", "psi2 + xy_quarter"] {
            let m = map_from_name(name, None).unwrap();
            m.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn frac_mean_matches_quadrature() {
        for g in [1.0, 1.3, 1.5, 1.9, 2.5, 3.7] {
            let m = map_from_name(&format!("frac_product({g}, 1)"), None).unwrap();
            let q = m.quadrature_means().unwrap()[0];
            assert!((q - frac_mean(g) * 0.5).abs() < 1e-12, "{g}");
        }
    }

    #[test]
    fn sawtooth_decomposition_matches_values() {
        for name in ["triangle0", "delta1", "step(0.37)", "psi", "psi2 - 0.2"] {
            let m = map_from_name(name, None).unwrap();
            let (terms, k) = m.components[0].sawtooth_terms().unwrap();
            for &(x, y) in &[(0.2, 0.5), (0.7, 0.1), (0.33, 0.91), (0.9, 0.95)] {
                let direct = m.evaluate([x, y]).values[0];
                let s: f64 = terms.iter().map(|t| t.coef * (fr(t.form[0] as f64 * x + t.form[1] as f64 * y - t.shift) - 0.5)).sum::<f64>() + k;
                assert!((direct - s).abs() < 1e-14, "{name} at ({x},{y}): {direct} vs {s}");
            }
        }
    }

    #[test]
    fn separable_matches_values() {
        for name in ["xy_quarter", "gamma(1.5,1.7)", "psi", "psi2", "step(0.4)"] {
            let m = map_from_name(name, Some(2)).unwrap();
            let parts = m.components[0].separable().unwrap();
            for &(x, y) in &[(0.2, 0.5), (0.7, 0.1), (0.33, 0.91), (0.9, 0.95)] {
                let s: f64 = parts.iter().map(|(c, f1, f2)| c * f1.eval(x) * f2.eval(y)).sum();
                assert!((m.evaluate([x, y]).values[0] - s).abs() < 1e-14, "{name}");
            }
        }
    }

    #[test]
    fn triangle_wraps_for_negative_b() {
        let t = TriangleSpec::new(1.0, -0.4, 0.8).unwrap();
        assert!(t.contains(0.5, 0.95)); // below y = 0 before wrapping
        assert!(t.contains(0.5, 0.1));
        assert!(!t.contains(0.5, 0.5));
    }
}
