//! Uniform periodic grids in one or two dimensions.

use alloc::format;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// What the periodic grid stands for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// The torus itself.
    Torus,
    /// A periodic box `[-L, L)^d` standing in for the whole line or plane.
    Line { half_width: f64 },
}

/// Default box half-width for line-domain problems.
pub const DEFAULT_HALF_WIDTH: f64 = 32.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    period: [f64; 2],
    origin: [f64; 2],
    domain: Domain,
}

impl Grid {
    pub fn torus(dim: usize, n: usize) -> Result<Self> {
        Self::torus_with_period(dim, n, 2.0 * PI)
    }

    pub fn torus_with_period(dim: usize, n: usize, period: f64) -> Result<Self> {
        Self::build(dim, n, period, 0.0, Domain::Torus)
    }

    pub fn line(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "box half-width must be positive and finite, got {half_width}"
            )));
        }
        Self::build(dim, n, 2.0 * half_width, -half_width, Domain::Line { half_width })
    }

    fn build(dim: usize, n: usize, period: f64, origin: f64, domain: Domain) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and at least 4, got {n}"
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        let origin = if dim == 1 { [origin, 0.0] } else { [origin, origin] };
        let period = if dim == 1 { [period, 0.0] } else { [period, period] };
        Ok(Grid {
            dim,
            n,
            period,
            origin,
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of nodes, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn period(&self) -> f64 {
        self.period[0]
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn spacing(&self) -> f64 {
        self.period[0] / self.n as f64
    }

    /// Quadrature weight of one node, `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Domain volume `period^dim`.
    pub fn volume(&self) -> f64 {
        self.period[0].powi(self.dim as i32)
    }

    /// The same lattice translated by `offset` along every axis.
    pub fn shifted(&self, offset: f64) -> Self {
        let mut g = *self;
        g.origin[0] += offset;
        if self.dim == 2 {
            g.origin[1] += offset;
        }
        g
    }

    /// The same domain with `factor` times as many points per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let mut g = *self;
        g.n = self
            .n
            .checked_mul(factor)
            .filter(|&n| n >= 4)
            .ok_or_else(|| Error::InvalidGrid(format!("cannot refine by {factor}")))?;
        Ok(g)
    }

    /// Same dimension, resolution, period and node positions.
    pub fn same_lattice(&self, other: &Grid) -> bool {
        self.dim == other.dim
            && self.n == other.n
            && self.period == other.period
            && self.origin == other.origin
    }

    /// Same dimension and period; resolution and origin may differ.
    pub fn same_domain(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.period == other.period
    }

    /// Multi-index of a flat (row-major) node index.
    pub fn multi_index(&self, index: usize) -> [usize; 2] {
        if self.dim == 1 {
            [index, 0]
        } else {
            [index / self.n, index % self.n]
        }
    }

    /// Physical coordinates of a node; the second entry is 0 in 1-D.
    pub fn coords(&self, index: usize) -> [f64; 2] {
        let [i, j] = self.multi_index(index);
        let h = self.spacing();
        if self.dim == 1 {
            [self.origin[0] + i as f64 * h, 0.0]
        } else {
            [self.origin[0] + i as f64 * h, self.origin[1] + j as f64 * h]
        }
    }

    /// Integer wavenumber stored at DFT index `i` of one axis, in `(-n/2, n/2]`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Integer wavenumber vector at a flat coefficient index.
    pub fn wavevector(&self, index: usize) -> [i64; 2] {
        let [i, j] = self.multi_index(index);
        if self.dim == 1 {
            [self.wavenumber(i), 0]
        } else {
            [self.wavenumber(i), self.wavenumber(j)]
        }
    }

    /// Physical frequency `2πk/period` for an integer wavevector.
    pub fn frequency_of(&self, k: [i64; 2]) -> [f64; 2] {
        let scale = 2.0 * PI / self.period[0];
        [k[0] as f64 * scale, k[1] as f64 * scale]
    }

    /// Flat index of the conjugate partner of a coefficient index, i.e. the
    /// index holding wavevector `-k` modulo `n`.
    pub fn partner(&self, index: usize) -> usize {
        let [i, j] = self.multi_index(index);
        let flip = |a: usize| (self.n - a) % self.n;
        if self.dim == 1 {
            flip(i)
        } else {
            flip(i) * self.n + flip(j)
        }
    }

    /// True when any axis of the wavevector sits on the Nyquist index `n/2`.
    pub fn is_nyquist(&self, index: usize) -> bool {
        let [i, j] = self.multi_index(index);
        i == self.n / 2 || (self.dim == 2 && j == self.n / 2)
    }
}
