//! Functions of `r ∈ (0, ∞)` on log-spaced grids, and integrals
//! `∫₀^r s^β f(s) ds`, `∫_r^∞ s^β f(s) ds` against them.
//!
//! Inside `[r_min, r_max]` integrals use Gauss–Legendre panels in `u = log r`
//! between consecutive nodes (plus any declared breakpoints). The pieces
//! `(0, r_min)` and `(r_max, ∞)` come from the function's [`EndRule`]s.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{End, Error, Result};
use crate::quadrature::{lagrange, GaussRule};

/// Number of Gauss–Legendre points per panel.
pub const PANEL_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    nodes: Vec<f64>,
    step: f64,
}

impl RadialGrid {
    /// `n` nodes `r_min·q^i` with constant ratio `q`.
    pub fn log_spaced(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!("radial range [{r_min}, {r_max}] is not 0 < r_min < r_max")));
        }
        if n < 2 {
            return Err(Error::TooFewNodes { needed: 2, found: n });
        }
        let (a, b) = (r_min.ln(), r_max.ln());
        let step = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
        nodes[0] = r_min;
        nodes[n - 1] = r_max;
        Ok(RadialGrid { r_min, r_max, nodes, step })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Spacing in `log r`.
    pub fn log_step(&self) -> f64 {
        self.step
    }

    pub fn ratio(&self) -> f64 {
        self.step.exp()
    }

    /// Index of the cell `[r_i, r_{i+1}]` containing `r`, clamped to the grid.
    pub fn cell(&self, r: f64) -> usize {
        let i = ((r.ln() - self.r_min.ln()) / self.step).floor();
        (i.max(0.0) as usize).min(self.len() - 2)
    }
}

/// Behavior of a function outside the grid, on one side.
#[derive(Clone)]
pub enum EndRule {
    /// Identically zero beyond the grid.
    Compact,
    /// A power law `A s^p` fitted through the two outermost nodes.
    Extrapolate,
    /// Exact moments: `f(side, β, r)` returns `∫₀^r s^β` (origin side) or
    /// `∫_r^∞ s^β` (infinity side) of the function.
    Exact(Arc<dyn Fn(End, f64, f64) -> Result<f64> + Send + Sync>),
}

impl fmt::Debug for EndRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndRule::Compact => write!(f, "Compact"),
            EndRule::Extrapolate => write!(f, "Extrapolate"),
            EndRule::Exact(_) => write!(f, "Exact"),
        }
    }
}

/// A radial function: point evaluation plus end behavior.
#[derive(Clone)]
pub struct RadialFn {
    pub label: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub head: EndRule,
    pub tail: EndRule,
    /// Points inside the grid where the function is not smooth.
    pub breakpoints: Vec<f64>,
}

impl fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFn")
            .field("label", &self.label)
            .field("head", &self.head)
            .field("tail", &self.tail)
            .finish()
    }
}

impl RadialFn {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        RadialFn {
            label: label.into(),
            eval: Arc::new(f),
            head: EndRule::Extrapolate,
            tail: EndRule::Extrapolate,
            breakpoints: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        let mut f = Self::new("0", |_| 0.0);
        f.head = EndRule::Compact;
        f.tail = EndRule::Compact;
        f
    }

    pub fn with_ends(mut self, head: EndRule, tail: EndRule) -> Self {
        self.head = head;
        self.tail = tail;
        self
    }

    pub fn with_breakpoints(mut self, points: &[f64]) -> Self {
        self.breakpoints.extend_from_slice(points);
        self.breakpoints.sort_by(f64::total_cmp);
        self
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    /// Samples on the grid nodes.
    pub fn sample(&self, grid: &RadialGrid) -> RadialProfile {
        RadialProfile {
            grid: grid.clone(),
            values: grid.nodes().iter().map(|&r| self.eval(r)).collect(),
        }
    }
}

/// Values of a radial function on the nodes of a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "profile has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                what: "radial profile",
                index,
                value,
            });
        }
        Ok(RadialProfile { grid, values })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        let n = grid.len();
        RadialProfile {
            grid,
            values: alloc::vec![0.0; n],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Interpolant of degree 5 in `log r` (six-node stencils), with the given
    /// end rules.
    pub fn interpolant(&self, head: EndRule, tail: EndRule) -> RadialFn {
        let grid = self.grid.clone();
        let values = self.values.clone();
        let us: Vec<f64> = grid.nodes().iter().map(|r| r.ln()).collect();
        let n = values.len();
        let width = 6.min(n);
        RadialFn {
            label: String::from("interpolated profile"),
            eval: Arc::new(move |r: f64| {
                if r < grid.r_min() || r > grid.r_max() {
                    return 0.0;
                }
                let u = r.ln();
                let i = grid.cell(r);
                let start = (i + 1).saturating_sub(width / 2).min(n - width);
                let xs = &us[start..start + width];
                let ys = &values[start..start + width];
                if let Some(k) = xs.iter().position(|&x| x == u) {
                    return ys[k];
                }
                lagrange(xs, ys, u)
            }),
            head,
            tail,
            breakpoints: Vec::new(),
        }
    }
}

/// Integration engine over one radial grid.
#[derive(Debug, Clone)]
pub struct Radial {
    grid: RadialGrid,
    rule: GaussRule,
}

impl Radial {
    pub fn new(grid: RadialGrid) -> Self {
        Radial {
            grid,
            rule: GaussRule::new(PANEL_POINTS),
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// `∫_a^b s^β f(s) ds` for `r_min ≤ a ≤ b ≤ r_max`, by panels in `log s`.
    pub fn inside(&self, f: &RadialFn, beta: f64, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut sum = 0.0;
        self.for_each_panel(f, a, b, |ua, ub| {
            sum += self.rule.integrate(ua, ub, |u| {
                let s = u.exp();
                s.powf(beta + 1.0) * f.eval(s)
            });
        });
        sum
    }

    /// Calls `visit(log a_j, log b_j)` for the panels covering `[a, b]`:
    /// grid cells, split at breakpoints.
    pub(crate) fn for_each_panel(&self, f: &RadialFn, a: f64, b: f64, mut visit: impl FnMut(f64, f64)) {
        let nodes = self.grid.nodes();
        let mut cuts: Vec<f64> = Vec::new();
        cuts.push(a);
        let first = nodes.partition_point(|&r| r <= a);
        for &r in &nodes[first..] {
            if r >= b {
                break;
            }
            cuts.push(r);
        }
        cuts.push(b);
        let mut k = 0;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut start = lo.ln();
            while k < f.breakpoints.len() && f.breakpoints[k] <= lo {
                k += 1;
            }
            let mut j = k;
            while j < f.breakpoints.len() && f.breakpoints[j] < hi {
                let p = f.breakpoints[j].ln();
                visit(start, p);
                start = p;
                j += 1;
            }
            visit(start, hi.ln());
        }
    }

    /// Cached `∫₀^{r_i}` and `∫_{r_i}^∞` of `s^β f` at every node.
    pub fn moments(&self, f: &RadialFn, beta: f64) -> Result<Moments> {
        self.moments_on(f, beta, true, true)
    }

    /// Like [`Radial::moments`] but only the origin-side integrals, which
    /// never touch the behavior of `f` at infinity.
    pub fn head_moments(&self, f: &RadialFn, beta: f64) -> Result<Moments> {
        self.moments_on(f, beta, true, false)
    }

    /// Only the infinity-side integrals.
    pub fn tail_moments(&self, f: &RadialFn, beta: f64) -> Result<Moments> {
        self.moments_on(f, beta, false, true)
    }

    fn moments_on(&self, f: &RadialFn, beta: f64, want_head: bool, want_tail: bool) -> Result<Moments> {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        let mut cells = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            cells.push(self.inside(f, beta, nodes[i], nodes[i + 1]));
        }
        let head = if want_head {
            let mut acc = end_integral(f, &f.head, End::Origin, beta, nodes, self.grid.r_min())?;
            let mut head = Vec::with_capacity(n);
            head.push(acc);
            for c in &cells {
                acc += c;
                head.push(acc);
            }
            Some(head)
        } else {
            None
        };
        let tail = if want_tail {
            let mut acc = end_integral(f, &f.tail, End::Infinity, beta, nodes, self.grid.r_max())?;
            let mut tail = alloc::vec![0.0; n];
            tail[n - 1] = acc;
            for i in (0..n - 1).rev() {
                acc += cells[i];
                tail[i] = acc;
            }
            Some(tail)
        } else {
            None
        };
        Ok(Moments {
            engine: self.clone(),
            f: f.clone(),
            beta,
            head,
            tail,
        })
    }

    /// `∫₀^r s^β f(s) ds`.
    pub fn head(&self, f: &RadialFn, beta: f64, r: f64) -> Result<f64> {
        let nodes = self.grid.nodes();
        if r <= self.grid.r_min() {
            return end_integral(f, &f.head, End::Origin, beta, nodes, r);
        }
        let r0 = end_integral(f, &f.head, End::Origin, beta, nodes, self.grid.r_min())?;
        let upper = r.min(self.grid.r_max());
        let mut total = r0 + self.inside(f, beta, self.grid.r_min(), upper);
        if r > self.grid.r_max() {
            total += end_integral(f, &f.tail, End::Infinity, beta, nodes, self.grid.r_max())?
                - end_integral(f, &f.tail, End::Infinity, beta, nodes, r)?;
        }
        Ok(total)
    }

    /// `∫_r^∞ s^β f(s) ds`.
    pub fn tail(&self, f: &RadialFn, beta: f64, r: f64) -> Result<f64> {
        let nodes = self.grid.nodes();
        if r >= self.grid.r_max() {
            return end_integral(f, &f.tail, End::Infinity, beta, nodes, r);
        }
        let r1 = end_integral(f, &f.tail, End::Infinity, beta, nodes, self.grid.r_max())?;
        let lower = r.max(self.grid.r_min());
        let mut total = r1 + self.inside(f, beta, lower, self.grid.r_max());
        if r < self.grid.r_min() {
            total += end_integral(f, &f.head, End::Origin, beta, nodes, self.grid.r_min())?
                - end_integral(f, &f.head, End::Origin, beta, nodes, r)?;
        }
        Ok(total)
    }

    /// `∫₀^∞ f(s) g(s) ds` over the grid only (both factors evaluated).
    pub fn pairing_inside(&self, f: &RadialFn, g: &RadialFn) -> f64 {
        let mut sum = 0.0;
        let a = self.grid.r_min();
        let b = self.grid.r_max();
        let mut merged = f.breakpoints.clone();
        merged.extend_from_slice(&g.breakpoints);
        merged.sort_by(f64::total_cmp);
        let probe = RadialFn {
            breakpoints: merged,
            ..RadialFn::zero()
        };
        self.for_each_panel(&probe, a, b, |ua, ub| {
            sum += self.rule.integrate(ua, ub, |u| {
                let s = u.exp();
                s * f.eval(s) * g.eval(s)
            });
        });
        sum
    }
}

/// Cumulative moments of one function; point queries cost one panel.
#[derive(Debug, Clone)]
pub struct Moments {
    engine: Radial,
    f: RadialFn,
    beta: f64,
    head: Option<Vec<f64>>,
    tail: Option<Vec<f64>>,
}

impl Moments {
    /// `∫₀^{r_i}` at every node.
    pub fn head_at_nodes(&self) -> Result<&[f64]> {
        self.head.as_deref().ok_or_else(|| missing("origin"))
    }

    /// `∫_{r_i}^∞` at every node.
    pub fn tail_at_nodes(&self) -> Result<&[f64]> {
        self.tail.as_deref().ok_or_else(|| missing("infinity"))
    }

    pub fn head(&self, r: f64) -> Result<f64> {
        let grid = &self.engine.grid;
        if r < grid.r_min() || r > grid.r_max() {
            return self.engine.head(&self.f, self.beta, r);
        }
        let i = grid.cell(r);
        Ok(self.head_at_nodes()?[i] + self.engine.inside(&self.f, self.beta, grid.nodes()[i], r))
    }

    pub fn tail(&self, r: f64) -> Result<f64> {
        let grid = &self.engine.grid;
        if r < grid.r_min() || r > grid.r_max() {
            return self.engine.tail(&self.f, self.beta, r);
        }
        let i = grid.cell(r);
        Ok(self.tail_at_nodes()?[i + 1] + self.engine.inside(&self.f, self.beta, r, grid.nodes()[i + 1]))
    }
}

fn missing(side: &str) -> Error {
    Error::InvalidParameter {
        name: "moments",
        reason: format!("integrals toward {side} were not prepared"),
    }
}

/// `∫₀^r s^β f` (origin side, `r ≤ r_min`) or `∫_r^∞ s^β f` (infinity side,
/// `r ≥ r_max`) from an end rule.
fn end_integral(f: &RadialFn, rule: &EndRule, end: End, beta: f64, nodes: &[f64], r: f64) -> Result<f64> {
    match rule {
        EndRule::Compact => Ok(0.0),
        EndRule::Exact(m) => m(end, beta, r),
        EndRule::Extrapolate => {
            let Some((a, p)) = power_fit(f, end, nodes)? else {
                return Ok(0.0);
            };
            let q = beta + p + 1.0;
            match end {
                End::Origin if q > 0.0 => Ok(a * r.powf(q) / q),
                End::Infinity if q < 0.0 => Ok(-a * r.powf(q) / q),
                _ => Err(Error::NonConvergentTail {
                    end,
                    detail: format!("integrand behaves like s^{:.3} near the end", q - 1.0),
                }),
            }
        }
    }
}

/// `(A, p)` with `f(s) ≈ A s^p` through the two outermost nodes on one side;
/// `None` when both values vanish.
pub(crate) fn power_fit(f: &RadialFn, end: End, nodes: &[f64]) -> Result<Option<(f64, f64)>> {
    let (r0, r1) = match end {
        End::Origin => (nodes[0], nodes[1]),
        End::Infinity => (nodes[nodes.len() - 1], nodes[nodes.len() - 2]),
    };
    let (f0, f1) = (f.eval(r0), f.eval(r1));
    if f0 == 0.0 && f1 == 0.0 {
        return Ok(None);
    }
    if f0 == 0.0 || f0.signum() != f1.signum() {
        return Err(Error::NonConvergentTail {
            end,
            detail: format!("cannot fit a power law through {f1:e} and {f0:e}"),
        });
    }
    let p = (f0 / f1).ln() / (r0 / r1).ln();
    Ok(Some((f0 * r0.powf(-p), p)))
}
