//! Sampled fields: the universal operand of every operator in this crate.
//!
//! A [`Field`] is a real- or complex-valued function sampled on a [`GridSpec`],
//! stored row-major. Values are immutable after construction; every operation
//! returns a fresh field.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Whether a field stores real or complex samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarKind {
    Real,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
enum Values {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// A function sampled on a uniform half-offset grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    spec: GridSpec,
    values: Values,
}

impl Field {
    /// Sample a real-valued evaluator at every grid node.
    ///
    /// Rejects evaluators that produce NaN or infinity anywhere.
    pub fn sample<F>(spec: &GridSpec, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let d = spec.dim();
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0f64; d];
        let mut values = Vec::with_capacity(spec.len());
        for flat in 0..spec.len() {
            spec.unravel(flat, &mut idx);
            for a in 0..d {
                x[a] = spec.coord(a, idx[a]);
            }
            let v = f(&x);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample(flat));
            }
            values.push(v);
        }
        Ok(Self {
            spec: spec.clone(),
            values: Values::Real(values),
        })
    }

    /// Wrap an existing real buffer; the length must match the grid.
    pub fn from_real(spec: &GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                want: spec.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(Self {
            spec: spec.clone(),
            values: Values::Real(values),
        })
    }

    /// Wrap an existing complex buffer; the length must match the grid.
    pub fn from_complex(spec: &GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                want: spec.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(Self {
            spec: spec.clone(),
            values: Values::Complex(values),
        })
    }

    /// The all-zero real field.
    pub fn zeros(spec: &GridSpec) -> Self {
        Self {
            spec: spec.clone(),
            values: Values::Real(vec![0.0; spec.len()]),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn kind(&self) -> ScalarKind {
        match self.values {
            Values::Real(_) => ScalarKind::Real,
            Values::Complex(_) => ScalarKind::Complex,
        }
    }

    pub fn len(&self) -> usize {
        self.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match &self.values {
            Values::Real(v) => Some(v),
            Values::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&[Complex64]> {
        match &self.values {
            Values::Complex(v) => Some(v),
            Values::Real(_) => None,
        }
    }

    /// Copy out the samples promoted to complex.
    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        match &self.values {
            Values::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Values::Complex(v) => v.clone(),
        }
    }

    /// Value at a multi-index, promoted to complex.
    pub fn value_at(&self, idx: &[usize]) -> Complex64 {
        let flat = self.spec.flat_index(idx);
        match &self.values {
            Values::Real(v) => Complex64::new(v[flat], 0.0),
            Values::Complex(v) => v[flat],
        }
    }

    /// Pointwise modulus, always a real field.
    pub fn abs(&self) -> Field {
        let values = match &self.values {
            Values::Real(v) => v.iter().map(|x| x.abs()).collect(),
            Values::Complex(v) => v.iter().map(|z| z.norm()).collect(),
        };
        Field {
            spec: self.spec.clone(),
            values: Values::Real(values),
        }
    }

    /// Real part as a real field.
    pub fn real_part(&self) -> Field {
        let values = match &self.values {
            Values::Real(v) => v.clone(),
            Values::Complex(v) => v.iter().map(|z| z.re).collect(),
        };
        Field {
            spec: self.spec.clone(),
            values: Values::Real(values),
        }
    }

    /// Imaginary part as a real field (zero for real fields).
    pub fn imag_part(&self) -> Field {
        let values = match &self.values {
            Values::Real(v) => vec![0.0; v.len()],
            Values::Complex(v) => v.iter().map(|z| z.im).collect(),
        };
        Field {
            spec: self.spec.clone(),
            values: Values::Real(values),
        }
    }

    /// `(sum_k |f_k|^p * prod_i h_i)^(1/p)`, the Riemann approximation of the
    /// `L^p` quasi-norm. Rejects `p <= 0`.
    pub fn lp_quasinorm(&self, p: f64) -> Result<f64> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::BadExponent(p));
        }
        let cell = self.spec.cell_volume();
        let sum: f64 = match &self.values {
            Values::Real(v) => v.iter().map(|x| x.abs().powf(p)).sum(),
            Values::Complex(v) => v.iter().map(|z| z.norm().powf(p)).sum(),
        };
        Ok((sum * cell).powf(1.0 / p))
    }

    /// Largest sample modulus.
    pub fn sup_norm(&self) -> f64 {
        match &self.values {
            Values::Real(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Values::Complex(v) => v.iter().fold(0.0, |m, z| m.max(z.norm())),
        }
    }

    /// Riemann integral `sum_k f_k * prod_i h_i`.
    pub fn integral(&self) -> Complex64 {
        let cell = self.spec.cell_volume();
        match &self.values {
            Values::Real(v) => Complex64::new(v.iter().sum::<f64>() * cell, 0.0),
            Values::Complex(v) => v.iter().sum::<Complex64>() * cell,
        }
    }

    /// Scale by a real constant.
    pub fn scaled(&self, c: f64) -> Field {
        let values = match &self.values {
            Values::Real(v) => Values::Real(v.iter().map(|x| c * x).collect()),
            Values::Complex(v) => Values::Complex(v.iter().map(|z| c * z).collect()),
        };
        Field {
            spec: self.spec.clone(),
            values,
        }
    }

    /// Pointwise sum; both fields must share a grid.
    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Pointwise difference; both fields must share a grid.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with<F>(&self, other: &Field, op: F) -> Result<Field>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        let values = match (&self.values, &other.values) {
            (Values::Real(a), Values::Real(b)) => Values::Real(
                a.iter()
                    .zip(b)
                    .map(|(&x, &y)| op(Complex64::new(x, 0.0), Complex64::new(y, 0.0)).re)
                    .collect(),
            ),
            _ => {
                let a = self.to_complex_vec();
                let b = other.to_complex_vec();
                Values::Complex(a.iter().zip(&b).map(|(&x, &y)| op(x, y)).collect())
            }
        };
        Ok(Field {
            spec: self.spec.clone(),
            values,
        })
    }

    /// Largest pointwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        assert_eq!(self.spec, other.spec, "fields live on different grids");
        let a = self.to_complex_vec();
        let b = other.to_complex_vec();
        a.iter()
            .zip(&b)
            .fold(0.0, |m, (&x, &y)| m.max((x - y).norm()))
    }

    /// `||self - other||_2 / ||other||_2`, promoted to complex.
    pub fn rel_l2_diff(&self, other: &Field) -> f64 {
        assert_eq!(self.spec, other.spec, "fields live on different grids");
        let a = self.to_complex_vec();
        let b = other.to_complex_vec();
        let num: f64 = a.iter().zip(&b).map(|(&x, &y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|z| z.norm_sqr()).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }

    /// `||Im f||_2 / ||f||_2`; zero for real fields.
    pub fn imag_residue(&self) -> f64 {
        match &self.values {
            Values::Real(_) => 0.0,
            Values::Complex(v) => {
                let im: f64 = v.iter().map(|z| z.im * z.im).sum();
                let all: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                if all == 0.0 {
                    0.0
                } else {
                    (im / all).sqrt()
                }
            }
        }
    }

    /// The reflected field `x -> f(-x)` (all axes). Exact on the half-offset
    /// grid: coordinate `x_i(k)` mirrors to `x_i(n_i - 1 - k)`.
    pub fn reflected(&self) -> Field {
        let spec = self.spec.clone();
        let d = spec.dim();
        let mut idx = vec![0usize; d];
        let map = |src: &mut dyn FnMut(usize) -> usize| -> Vec<usize> {
            (0..spec.len()).map(|f| src(f)).collect()
        };
        let mut source_of = |flat: usize| -> usize {
            spec.unravel(flat, &mut idx);
            let mirrored: Vec<usize> = idx
                .iter()
                .enumerate()
                .map(|(a, &i)| spec.samples(a) - 1 - i)
                .collect();
            spec.flat_index(&mirrored)
        };
        let perm = map(&mut source_of);
        let values = match &self.values {
            Values::Real(v) => Values::Real(perm.iter().map(|&s| v[s]).collect()),
            Values::Complex(v) => Values::Complex(perm.iter().map(|&s| v[s]).collect()),
        };
        Field { spec, values }
    }

    /// Circular shift by a whole number of cells along one axis:
    /// `out(.., k, ..) = self(.., k - cells, ..)` with wraparound.
    pub fn shifted_cells(&self, axis: usize, cells: i64) -> Result<Field> {
        self.spec.check_axis(axis)?;
        let spec = self.spec.clone();
        let n = spec.samples(axis) as i64;
        let d = spec.dim();
        let mut idx = vec![0usize; d];
        let mut perm = Vec::with_capacity(spec.len());
        for flat in 0..spec.len() {
            spec.unravel(flat, &mut idx);
            let shifted = (idx[axis] as i64 - cells).rem_euclid(n) as usize;
            let mut src = idx.clone();
            src[axis] = shifted;
            perm.push(spec.flat_index(&src));
        }
        let values = match &self.values {
            Values::Real(v) => Values::Real(perm.iter().map(|&s| v[s]).collect()),
            Values::Complex(v) => Values::Complex(perm.iter().map(|&s| v[s]).collect()),
        };
        Ok(Field { spec, values })
    }

    /// Build a complex field without revalidating (internal fast path).
    pub(crate) fn from_complex_unchecked(spec: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Field {
            spec,
            values: Values::Complex(values),
        }
    }

    /// Build a real field without revalidating (internal fast path).
    pub(crate) fn from_real_unchecked(spec: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Field {
            spec,
            values: Values::Real(values),
        }
    }
}
