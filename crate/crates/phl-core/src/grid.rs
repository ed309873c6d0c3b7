//! Uniform grids over `[-L_1, L_1) x ... x [-L_d, L_d)` and exponent bookkeeping.
//!
//! Samples are half-offset: `x_i(k) = -L_i + (k + 1/2) h_i` with `h_i = 2 L_i / n_i`,
//! so no sample ever sits on a coordinate hyperplane `x_i = 0`. Everything singular
//! on those hyperplanes (the Hardy-Cesaro division, direct-space kernels such as
//! `|y|^(beta-1)`) stays finite at every node.

use serde::Serialize;

use crate::error::{Error, Result};

/// Shape and extent of a uniform sampling grid, `d` in `{1, 2, 3}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    n: Vec<usize>,
    half_width: Vec<f64>,
}

impl GridSpec {
    /// Build a grid from per-axis sample counts and half-widths.
    ///
    /// Each `n[i]` must be a power of two `>= 16` and each `half_width[i]`
    /// positive; the dimension is `n.len()` and must be 1, 2, or 3.
    pub fn new(n: &[usize], half_width: &[f64]) -> Result<Self> {
        if n.len() != half_width.len() {
            return Err(Error::AxisCountMismatch {
                n: n.len(),
                l: half_width.len(),
            });
        }
        if n.is_empty() || n.len() > 3 {
            return Err(Error::BadDimension(n.len()));
        }
        for (axis, &count) in n.iter().enumerate() {
            if count < 16 || !count.is_power_of_two() {
                return Err(Error::BadSampleCount { axis, n: count });
            }
        }
        for (axis, &l) in half_width.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::BadHalfWidth { axis });
            }
        }
        Ok(Self {
            n: n.to_vec(),
            half_width: half_width.to_vec(),
        })
    }

    /// Square grid helper: the same sample count and half-width on every axis.
    pub fn cubic(d: usize, n: usize, half_width: f64) -> Result<Self> {
        Self::new(&vec![n; d], &vec![half_width; d])
    }

    pub fn dim(&self) -> usize {
        self.n.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.n
    }

    pub fn samples(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn half_width(&self, axis: usize) -> f64 {
        self.half_width[axis]
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_width
    }

    /// Grid spacing `h_i = 2 L_i / n_i`.
    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_width[axis] / self.n[axis] as f64
    }

    /// Half-offset sample coordinate `x_i(k) = -L_i + (k + 1/2) h_i`.
    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        -self.half_width[axis] + (k as f64 + 0.5) * self.spacing(axis)
    }

    /// Frequency-bin spacing `1 / (2 L_i)`.
    pub fn freq_step(&self, axis: usize) -> f64 {
        1.0 / (2.0 * self.half_width[axis])
    }

    /// Signed frequency index of a DFT-ordered bin: `0..n/2` map to themselves,
    /// `n/2..n` map to `bin - n` (the Nyquist bin carries index `-n/2`).
    pub fn signed_bin(n: usize, bin: usize) -> i64 {
        debug_assert!(bin < n);
        if bin < n / 2 {
            bin as i64
        } else {
            bin as i64 - n as i64
        }
    }

    /// Frequency `xi_i` of a DFT-ordered bin along an axis.
    pub fn freq(&self, axis: usize, bin: usize) -> f64 {
        Self::signed_bin(self.n[axis], bin) as f64 * self.freq_step(axis)
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of one grid cell, `prod_i h_i`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Volume of one frequency cell, `prod_i (2 L_i)^-1`.
    pub fn freq_cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.freq_step(a)).product()
    }

    /// Row-major strides over the axes.
    pub fn strides(&self) -> Vec<usize> {
        let d = self.dim();
        let mut s = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.n[a + 1];
        }
        s
    }

    /// Flat index of a multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dim());
        let mut flat = 0;
        for (a, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.n[a]);
            flat = flat * self.n[a] + i;
        }
        flat
    }

    /// Decompose a flat index into `out`.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.dim()).rev() {
            out[a] = flat % self.n[a];
            flat /= self.n[a];
        }
    }

    pub(crate) fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim() {
            Err(Error::AxisOutOfRange {
                axis,
                d: self.dim(),
            })
        } else {
            Ok(())
        }
    }
}

/// The exponent triple of a fractional-integration experiment:
/// `1/q = 1/p - alpha/d` with `p` in `(0, 1]` and `alpha` in `(0, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Exponents {
    p: f64,
    alpha: f64,
    q: f64,
}

impl Exponents {
    pub fn new(p: f64, alpha: f64, d: usize) -> Result<Self> {
        if !(p.is_finite() && p > 0.0 && p <= 1.0) {
            return Err(Error::ExponentOutOfRange(p));
        }
        if !(alpha.is_finite() && alpha > 0.0 && alpha < d as f64) {
            return Err(Error::OrderOutOfRange {
                lo: 0.0,
                hi: d as f64,
                got: alpha,
            });
        }
        let inv_q = 1.0 / p - alpha / d as f64;
        if inv_q <= 0.0 {
            return Err(Error::IncompatibleExponents { p, alpha, d });
        }
        Ok(Self {
            p,
            alpha,
            q: 1.0 / inv_q,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}
