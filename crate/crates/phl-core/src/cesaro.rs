//! The multiparameter Hardy-Cesaro operator and its weighted functionals.
//!
//! `hardy_cesaro` realizes `(x_1 ... x_d)^-1 int_0^{x_1} ... int_0^{x_d} f`
//! with oriented prefix sums: along each axis the integral starts fresh at
//! the origin-adjacent cell and marches outward in both directions, counting
//! a half cell at the endpoint (so constants are exact) and adopting the
//! convention `int_0^x = -int_x^0` for `x < 0`. The half-offset grid keeps
//! every divisor `x_i` away from zero.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::for_each_lane;
use crate::field::{Field, ScalarKind};
use crate::spectral::forward_ft;
use crate::spectrum::Spectrum;

trait CesaroScalar:
    Copy
    + Default
    + std::ops::AddAssign
    + std::ops::Add<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::ops::Mul<f64, Output = Self>
    + std::ops::Div<f64, Output = Self>
{
}

impl CesaroScalar for f64 {}
impl CesaroScalar for Complex64 {}

/// One oriented prefix-and-divide pass along `axis`.
fn cesaro_pass<T: CesaroScalar>(data: &mut [T], shape: &[usize], axis: usize, h: f64, coords: &[f64]) {
    let n = shape[axis];
    for_each_lane(shape, axis, |base, stride| {
        // Positive side: origin-adjacent cell n/2 outward.
        let mut acc = T::default();
        for k in n / 2..n {
            let slot = base + k * stride;
            let v = data[slot];
            let integral = acc + v * (h / 2.0);
            acc += v * h;
            data[slot] = integral / coords[k];
        }
        // Negative side: cell n/2 - 1 downward; int_0^x = -int_x^0.
        let mut acc = T::default();
        for k in (0..n / 2).rev() {
            let slot = base + k * stride;
            let v = data[slot];
            let integral = -(acc + v * (h / 2.0));
            acc += v * h;
            data[slot] = integral / coords[k];
        }
    });
}

/// The Hardy-Cesaro operator. Exact on constants; `O(h^2)` on smooth fields;
/// tensor-factorizes on separable inputs.
pub fn hardy_cesaro(f: &Field) -> Field {
    let spec = f.spec().clone();
    let d = spec.dim();
    let shape: Vec<usize> = spec.shape().to_vec();
    match f.kind() {
        ScalarKind::Real => {
            let mut data = f.as_real().unwrap().to_vec();
            for axis in 0..d {
                let coords: Vec<f64> =
                    (0..spec.samples(axis)).map(|k| spec.coord(axis, k)).collect();
                cesaro_pass(&mut data, &shape, axis, spec.spacing(axis), &coords);
            }
            Field::from_real_unchecked(spec, data)
        }
        ScalarKind::Complex => {
            let mut data = f.as_complex().unwrap().to_vec();
            for axis in 0..d {
                let coords: Vec<f64> =
                    (0..spec.samples(axis)).map(|k| spec.coord(axis, k)).collect();
                cesaro_pass(&mut data, &shape, axis, spec.spacing(axis), &coords);
            }
            Field::from_complex_unchecked(spec, data)
        }
    }
}

/// Hardy-Cesaro on the frequency lattice: trapezoid prefix integrals from
/// `xi = 0` outward (the lattice has a bin at zero, unlike the half-offset
/// space grid), divided by `prod xi_i`. Values on the zero hyperplanes are
/// set to zero; the weighted functional below never reads them.
pub fn cesaro_on_bins(s: &Spectrum) -> Vec<Complex64> {
    let spec = s.spec();
    let d = spec.dim();
    let shape: Vec<usize> = spec.shape().to_vec();
    let mut data = s.coeffs().to_vec();
    for axis in 0..d {
        let n = spec.samples(axis);
        let dxi = spec.freq_step(axis);
        for_each_lane(&shape, axis, |base, stride| {
            let at = |m: i64| -> usize {
                let bin = m.rem_euclid(n as i64) as usize;
                base + bin * stride
            };
            let g0 = data[at(0)];
            // Positive frequencies m = 1 .. n/2 - 1.
            let mut integral = Complex64::default();
            let mut prev = g0;
            for m in 1..(n as i64) / 2 {
                let g = data[at(m)];
                integral += (prev + g) * (dxi / 2.0);
                prev = g;
                data[at(m)] = integral / (m as f64 * dxi);
            }
            // Negative frequencies m = -1 .. -n/2.
            let mut integral = Complex64::default();
            let mut prev = g0;
            for mm in 1..=(n as i64) / 2 {
                let m = -mm;
                let g = data[at(m)];
                integral -= (prev + g) * (dxi / 2.0);
                prev = g;
                data[at(m)] = integral / (m as f64 * dxi);
            }
            data[at(0)] = Complex64::default();
        });
    }
    data
}

/// Which side of the Cesaro inequalities to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CesaroMode {
    /// `|| H f ||_p` on the space grid.
    Direct,
    /// The weighted functional of `H(f_hat)` on the frequency lattice:
    /// `( sum |H(f_hat)(xi)|^p prod |xi_i|^(p-2) prod dxi )^(1/p)`.
    OnFourier,
}

pub fn cesaro_hardy_lhs(f: &Field, p: f64, mode: CesaroMode) -> Result<f64> {
    if !(p.is_finite() && p > 0.0 && p <= 1.0) {
        return Err(Error::ExponentOutOfRange(p));
    }
    match mode {
        CesaroMode::Direct => hardy_cesaro(f).lp_quasinorm(p),
        CesaroMode::OnFourier => {
            let s = forward_ft(f);
            let spec = s.spec().clone();
            let values = cesaro_on_bins(&s);
            let d = spec.dim();
            let mut idx = vec![0usize; d];
            let mut sum = 0.0f64;
            for v in &values {
                let mut all_nonzero = true;
                let mut weight = 1.0f64;
                for a in 0..d {
                    let xi = spec.freq(a, idx[a]);
                    if xi == 0.0 {
                        all_nonzero = false;
                        break;
                    }
                    weight *= xi.abs().powf(2.0 - p);
                }
                if all_nonzero {
                    sum += v.norm().powf(p) / weight;
                }
                for a in (0..d).rev() {
                    idx[a] += 1;
                    if idx[a] < spec.samples(a) {
                        break;
                    }
                    idx[a] = 0;
                }
            }
            Ok((sum * spec.freq_cell_volume()).powf(1.0 / p))
        }
    }
}
