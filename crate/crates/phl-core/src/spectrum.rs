//! Continuous-Fourier-transform approximations of sampled fields.

use num_complex::Complex64;

use crate::grid::GridSpec;

/// The continuous Fourier transform of a [`crate::Field`], approximated on the
/// frequency lattice `xi_i(m) = m / (2 L_i)`, `m = -n_i/2 .. n_i/2 - 1`.
///
/// Coefficients are stored in DFT bin order along each axis: bins `0..n/2`
/// carry the nonnegative frequencies and bins `n/2..n` the negative ones
/// (`GridSpec::signed_bin` recovers the signed index; bin `n/2` is the
/// Nyquist bin `m = -n/2`).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn new(spec: GridSpec, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), spec.len());
        Self { spec, coeffs }
    }

    /// Wrap an explicit coefficient buffer (length must match the grid, all
    /// entries finite).
    pub fn from_coeffs(spec: &GridSpec, coeffs: Vec<Complex64>) -> crate::Result<Self> {
        if coeffs.len() != spec.len() {
            return Err(crate::Error::LengthMismatch {
                got: coeffs.len(),
                want: spec.len(),
            });
        }
        if let Some(i) = coeffs
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(crate::Error::NonFiniteSample(i));
        }
        Ok(Self {
            spec: spec.clone(),
            coeffs,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at a multi-bin index (DFT order).
    pub fn coeff_at(&self, bins: &[usize]) -> Complex64 {
        self.coeffs[self.spec.flat_index(bins)]
    }

    /// Frequency of a bin along an axis.
    pub fn freq(&self, axis: usize, bin: usize) -> f64 {
        self.spec.freq(axis, bin)
    }

    /// `l^2` bin norm weighted by the frequency cell volume, i.e. the
    /// Riemann approximation of `||f_hat||_2`.
    pub fn l2_norm(&self) -> f64 {
        let cell = self.spec.freq_cell_volume();
        (self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell).sqrt()
    }
}
