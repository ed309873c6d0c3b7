//! Shared helpers for unit tests.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::field::Field;
use crate::grid::GridSpec;
use crate::spectrum::Spectrum;

/// Real field synthesized from a Hermitian band-limited spectrum with the dc
/// and Nyquist hyperplanes empty: `|m_a| <= max_bin` and `m_a != 0` on every
/// axis.
pub fn band_limited_field(spec: &GridSpec, max_bin: i64, seed: u64) -> Field {
    let mut rng = StdRng::seed_from_u64(seed);
    let d = spec.dim();
    let mut coeffs = vec![Complex64::default(); spec.len()];
    let mut idx = vec![0usize; d];
    for flat in 0..spec.len() {
        spec.unravel(flat, &mut idx);
        let signed: Vec<i64> = (0..d)
            .map(|a| GridSpec::signed_bin(spec.samples(a), idx[a]))
            .collect();
        if signed.iter().any(|&m| m == 0 || m.abs() > max_bin) {
            continue;
        }
        // Fill only the half with a positive leading bin; mirror conjugates.
        if signed[0] < 0 {
            continue;
        }
        let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        coeffs[flat] = v;
        let mirror: Vec<usize> = (0..d)
            .map(|a| {
                let n = spec.samples(a) as i64;
                (-signed[a]).rem_euclid(n) as usize
            })
            .collect();
        coeffs[spec.flat_index(&mirror)] = v.conj();
    }
    let s = Spectrum::new(spec.clone(), coeffs);
    crate::spectral::inverse_ft(&s).real_part()
}

/// Tensor product of two real 1-d fields on the product grid.
pub fn tensor_product(u: &Field, v: &Field) -> Field {
    let nu = u.spec().samples(0);
    let nv = v.spec().samples(0);
    let spec = GridSpec::new(
        &[nu, nv],
        &[u.spec().half_width(0), v.spec().half_width(0)],
    )
    .unwrap();
    let a = u.as_real().expect("real field");
    let b = v.as_real().expect("real field");
    Field::from_real(
        &spec,
        (0..nu * nv).map(|k| a[k / nv] * b[k % nv]).collect(),
    )
    .unwrap()
}
