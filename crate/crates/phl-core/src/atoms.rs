//! Atom generators and deterministic corpus construction.
//!
//! Three flavors: sup-normalized 1-d atoms with vanishing moments,
//! rectangular tensor atoms with per-variable cancellation and an `L^2`
//! budget, and simplified multi-rectangle atoms (a finite disjoint union of
//! dyadic rectangles with the summed `L^2` budget). Every generator is a
//! pure function of `(spec, seed)`, and every product ships through an
//! independent validator that re-checks support, normalization, and moments
//! without sharing code with the generator.
//!
//! Supports always sit inside the central half of the domain; this is the
//! padding rule that keeps circular convolutions in the downstream operators
//! from wrapping atom mass around the torus.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;

/// Vanishing-moment order required at exponent `p`: `floor(1/p - 1)`.
pub fn moment_order_for(p: f64) -> usize {
    (1.0 / p - 1.0).floor() as usize
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fixed seed-splitting rule for deriving member/axis streams.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 0.0 && p <= 1.0) {
        return Err(Error::ExponentOutOfRange(p));
    }
    Ok(())
}

/// Seeded random profile on the given support coordinates with discrete
/// moments `0..=order` projected out (against an orthonormalized polynomial
/// basis in the normalized coordinate `(x - center)/radius`).
fn moment_cancelled_profile(
    coords: &[f64],
    center: f64,
    radius: f64,
    h: f64,
    order: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let n = coords.len();
    if n < order + 2 {
        return Err(Error::SupportTooSmall {
            got: n,
            need: order + 2,
        });
    }
    let mut profile: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let before = profile.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let mut e: Vec<f64> = coords
            .iter()
            .map(|&x| ((x - center) / radius).powi(j as i32))
            .collect();
        // Two Gram-Schmidt sweeps keep the basis orthonormal to rounding.
        for _ in 0..2 {
            for prev in &basis {
                let dot: f64 = e.iter().zip(prev).map(|(u, v)| u * v).sum::<f64>() * h;
                for (u, v) in e.iter_mut().zip(prev) {
                    *u -= dot * v;
                }
            }
        }
        let norm = (e.iter().map(|u| u * u).sum::<f64>() * h).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateAtom);
        }
        for u in e.iter_mut() {
            *u /= norm;
        }
        basis.push(e);
    }
    for _ in 0..2 {
        for e in &basis {
            let dot: f64 = profile.iter().zip(e).map(|(u, v)| u * v).sum::<f64>() * h;
            for (u, v) in profile.iter_mut().zip(e) {
                *u -= dot * v;
            }
        }
    }
    let after = profile.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if after <= 1e-10 * before {
        return Err(Error::DegenerateAtom);
    }
    Ok(profile)
}

fn central_half_check(lo: f64, hi: f64, half_width: f64) -> Result<()> {
    if lo < -half_width / 2.0 || hi > half_width / 2.0 {
        return Err(Error::SupportOutsideCore);
    }
    Ok(())
}

/// Specification of a 1-d sup-normalized atom on `B = [center - radius,
/// center + radius]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AtomSpec1D {
    pub p: f64,
    pub center: f64,
    pub radius: f64,
    pub seed: u64,
}

/// Seeded random profile on `B`, moments `0..=floor(1/p-1)` cancelled, then
/// sup-normalized so `max |a| = |B|^(-1/p)` with `|B| = 2 radius`.
pub fn make_hp_atom_1d(spec: &AtomSpec1D, grid: &GridSpec) -> Result<Field> {
    if grid.dim() != 1 {
        return Err(Error::RequiresOneDim(grid.dim()));
    }
    check_p(spec.p)?;
    if !(spec.radius.is_finite() && spec.radius > 0.0) {
        return Err(Error::BadHalfWidth { axis: 0 });
    }
    central_half_check(
        spec.center - spec.radius,
        spec.center + spec.radius,
        grid.half_width(0),
    )?;
    let order = moment_order_for(spec.p);
    let support: Vec<usize> = (0..grid.samples(0))
        .filter(|&k| (grid.coord(0, k) - spec.center).abs() <= spec.radius)
        .collect();
    let coords: Vec<f64> = support.iter().map(|&k| grid.coord(0, k)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let profile = moment_cancelled_profile(
        &coords,
        spec.center,
        spec.radius,
        grid.spacing(0),
        order,
        &mut rng,
    )?;
    let sup = profile.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = (2.0 * spec.radius).powf(-1.0 / spec.p) / sup;
    let mut values = vec![0.0f64; grid.len()];
    for (i, &k) in support.iter().enumerate() {
        values[k] = profile[i] * scale;
    }
    Field::from_real(grid, values)
}

/// Specification of a rectangular tensor atom.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RectAtomSpec {
    pub p: f64,
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
    pub seed: u64,
}

impl RectAtomSpec {
    /// Continuous rectangle measure `prod_i 2 r_i`.
    pub fn measure(&self) -> f64 {
        self.radii.iter().map(|r| 2.0 * r).product()
    }
}

/// Sparse tensor product of per-axis moment-cancelled profiles.
fn tensor_profile(
    grid: &GridSpec,
    centers: &[f64],
    radii: &[f64],
    order: usize,
    seed: u64,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let d = grid.dim();
    let mut per_axis: Vec<(Vec<usize>, Vec<f64>)> = Vec::with_capacity(d);
    for axis in 0..d {
        let support: Vec<usize> = (0..grid.samples(axis))
            .filter(|&k| (grid.coord(axis, k) - centers[axis]).abs() <= radii[axis])
            .collect();
        let coords: Vec<f64> = support.iter().map(|&k| grid.coord(axis, k)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, axis as u64));
        let profile = moment_cancelled_profile(
            &coords,
            centers[axis],
            radii[axis],
            grid.spacing(axis),
            order,
            &mut rng,
        )?;
        per_axis.push((support, profile));
    }
    let count: usize = per_axis.iter().map(|(s, _)| s.len()).product();
    let mut flats = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    let mut cursor = vec![0usize; d];
    let mut idx = vec![0usize; d];
    'outer: loop {
        let mut v = 1.0f64;
        for a in 0..d {
            idx[a] = per_axis[a].0[cursor[a]];
            v *= per_axis[a].1[cursor[a]];
        }
        flats.push(grid.flat_index(&idx));
        values.push(v);
        for a in (0..d).rev() {
            cursor[a] += 1;
            if cursor[a] < per_axis[a].0.len() {
                continue 'outer;
            }
            cursor[a] = 0;
        }
        break;
    }
    Ok((flats, values))
}

/// Tensor product of per-axis moment-cancelled profiles on the rectangle,
/// rescaled so `||a||_2^2 = |R|^(1 - 2/p)` exactly (the budget saturates).
/// Per-variable cancellation holds on every grid line by the tensor
/// structure.
pub fn make_rect_atom(spec: &RectAtomSpec, grid: &GridSpec) -> Result<Field> {
    check_p(spec.p)?;
    let d = grid.dim();
    if spec.centers.len() != d || spec.radii.len() != d {
        return Err(Error::AxisCountMismatch {
            n: d,
            l: spec.centers.len(),
        });
    }
    for axis in 0..d {
        if !(spec.radii[axis].is_finite() && spec.radii[axis] > 0.0) {
            return Err(Error::BadHalfWidth { axis });
        }
        central_half_check(
            spec.centers[axis] - spec.radii[axis],
            spec.centers[axis] + spec.radii[axis],
            grid.half_width(axis),
        )?;
    }
    let order = moment_order_for(spec.p);
    let (flats, mut values) = tensor_profile(
        grid,
        &spec.centers,
        &spec.radii,
        order,
        derive_seed(spec.seed, 0),
    )?;
    let cell = grid.cell_volume();
    let l2 = (values.iter().map(|v| v * v).sum::<f64>() * cell).sqrt();
    if l2 == 0.0 {
        return Err(Error::DegenerateAtom);
    }
    let target = spec.measure().powf((1.0 - 2.0 / spec.p) / 2.0);
    let scale = target / l2;
    for v in values.iter_mut() {
        *v *= scale;
    }
    let mut buf = vec![0.0f64; grid.len()];
    for (f, v) in flats.iter().zip(&values) {
        buf[*f] = *v;
    }
    Field::from_real(grid, buf)
}

/// A dyadic interval `[index 2^level, (index + 1) 2^level)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicInterval {
    pub level: i32,
    pub index: i64,
}

impl DyadicInterval {
    pub fn lo(&self) -> f64 {
        self.index as f64 * (2.0f64).powi(self.level)
    }

    pub fn hi(&self) -> f64 {
        (self.index + 1) as f64 * (2.0f64).powi(self.level)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo() + self.hi())
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.hi() - self.lo())
    }

    fn overlaps(&self, other: &DyadicInterval) -> bool {
        self.lo() < other.hi() && other.lo() < self.hi()
    }
}

/// A dyadic rectangle: one dyadic interval per axis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicRect {
    pub sides: Vec<DyadicInterval>,
}

impl DyadicRect {
    pub fn measure(&self) -> f64 {
        self.sides.iter().map(|s| (2.0f64).powi(s.level)).product()
    }

    pub fn overlaps(&self, other: &DyadicRect) -> bool {
        self.sides
            .iter()
            .zip(&other.sides)
            .all(|(a, b)| a.overlaps(b))
    }
}

/// Specification of a simplified multi-rectangle atom: finitely many
/// pairwise-disjoint dyadic rectangles carrying tensor profiles with random
/// relative weights and the summed budget
/// `sum_R ||a_R||_2^2 = |Omega|^(1 - 2/p)`, `|Omega| = sum_R |R|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CfAtomSpec {
    pub p: f64,
    pub rects: Vec<DyadicRect>,
    pub seed: u64,
}

pub fn make_cf_atom(spec: &CfAtomSpec, grid: &GridSpec) -> Result<Field> {
    check_p(spec.p)?;
    if spec.rects.is_empty() {
        return Err(Error::EmptyRectangleList);
    }
    let d = grid.dim();
    for rect in &spec.rects {
        if rect.sides.len() != d {
            return Err(Error::AxisCountMismatch {
                n: d,
                l: rect.sides.len(),
            });
        }
        for (axis, side) in rect.sides.iter().enumerate() {
            central_half_check(side.lo(), side.hi(), grid.half_width(axis))?;
        }
    }
    for i in 0..spec.rects.len() {
        for j in i + 1..spec.rects.len() {
            if spec.rects[i].overlaps(&spec.rects[j]) {
                return Err(Error::OverlappingRectangles);
            }
        }
    }

    let omega: f64 = spec.rects.iter().map(|r| r.measure()).sum();
    let budget = omega.powf(1.0 - 2.0 / spec.p);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, u64::MAX));
    let weights: Vec<f64> = (0..spec.rects.len())
        .map(|_| rng.random_range(0.5..1.5))
        .collect();
    let weight_sq: f64 = weights.iter().map(|w| w * w).sum();
    let global = (budget / weight_sq).sqrt();

    let order = moment_order_for(spec.p);
    let cell = grid.cell_volume();
    let mut buf = vec![0.0f64; grid.len()];
    for (r, rect) in spec.rects.iter().enumerate() {
        let centers: Vec<f64> = rect.sides.iter().map(|s| s.center()).collect();
        let radii: Vec<f64> = rect.sides.iter().map(|s| s.radius()).collect();
        let (flats, mut values) = tensor_profile(
            grid,
            &centers,
            &radii,
            order,
            derive_seed(spec.seed, r as u64),
        )?;
        let l2 = (values.iter().map(|v| v * v).sum::<f64>() * cell).sqrt();
        if l2 == 0.0 {
            return Err(Error::DegenerateAtom);
        }
        let scale = global * weights[r] / l2;
        for v in values.iter_mut() {
            *v *= scale;
        }
        for (f, v) in flats.iter().zip(&values) {
            buf[*f] += *v;
        }
    }
    Field::from_real(grid, buf)
}

/// Samples of the indicator difference `1 on (0, 1], -1 on (1, 2]`, the
/// standard witness that the Hardy-Cesaro image of a mean-free field can
/// fail every cancellation condition.
pub fn counterexample_field(grid: &GridSpec) -> Result<Field> {
    if grid.dim() != 1 {
        return Err(Error::RequiresOneDim(grid.dim()));
    }
    if grid.half_width(0) < 4.0 {
        return Err(Error::DomainTooSmall);
    }
    Field::sample(grid, |x| {
        if x[0] > 0.0 && x[0] <= 1.0 {
            1.0
        } else if x[0] > 1.0 && x[0] <= 2.0 {
            -1.0
        } else {
            0.0
        }
    })
}

/// Independent validators. These re-derive support masks from the geometry
/// and compute moment sums directly from powers of the raw coordinate; they
/// share no code with the generators above.
pub mod validate {
    use super::*;

    fn fail(msg: impl Into<String>) -> Error {
        Error::AtomValidation(msg.into())
    }

    /// Support, sup-normalization, and vanishing moments of a 1-d atom.
    pub fn hp_atom_1d(field: &Field, spec: &AtomSpec1D) -> Result<()> {
        let grid = field.spec();
        let v = field
            .as_real()
            .ok_or_else(|| fail("atom fields must be real"))?;
        let h = grid.spacing(0);
        let bound = (2.0 * spec.radius).powf(-1.0 / spec.p);
        let mut sup = 0.0f64;
        for (k, &val) in v.iter().enumerate() {
            let x = grid.coord(0, k);
            let inside = (x - spec.center).abs() <= spec.radius;
            if !inside && val != 0.0 {
                return Err(fail(format!("support leak at x = {x}")));
            }
            sup = sup.max(val.abs());
        }
        if sup > bound * (1.0 + 1e-8) {
            return Err(fail(format!("sup {sup} exceeds |B|^(-1/p) = {bound}")));
        }
        if sup < bound * (1.0 - 1e-8) {
            return Err(fail(format!("sup {sup} fails to saturate {bound}")));
        }
        for moment in 0..=moment_order_for(spec.p) {
            let mut signed = 0.0f64;
            let mut mass = 0.0f64;
            for (k, &val) in v.iter().enumerate() {
                let w = field.spec().coord(0, k).powi(moment as i32) * val;
                signed += w * h;
                mass += w.abs() * h;
            }
            if signed.abs() > 1e-8 * mass {
                return Err(fail(format!("moment {moment} = {signed:.3e} too large")));
            }
        }
        Ok(())
    }

    fn line_moments_ok(
        field: &Field,
        lo: &[f64],
        hi: &[f64],
        order: usize,
    ) -> std::result::Result<(), String> {
        let grid = field.spec();
        let d = grid.dim();
        let v = field.as_real().expect("real field");
        // For each axis, sum x_axis^k over every line segment inside the box.
        for axis in 0..d {
            let h = grid.spacing(axis);
            let mut idx = vec![0usize; d];
            // Iterate over transverse positions inside the box.
            let mut transverse: Vec<Vec<usize>> = vec![Vec::new()];
            for a in 0..d {
                if a == axis {
                    continue;
                }
                let ks: Vec<usize> = (0..grid.samples(a))
                    .filter(|&k| {
                        let x = grid.coord(a, k);
                        x >= lo[a] && x <= hi[a]
                    })
                    .collect();
                let mut next = Vec::new();
                for t in &transverse {
                    for &k in &ks {
                        let mut row = t.clone();
                        row.push(k);
                        next.push(row);
                    }
                }
                transverse = next;
            }
            let axis_ks: Vec<usize> = (0..grid.samples(axis))
                .filter(|&k| {
                    let x = grid.coord(axis, k);
                    x >= lo[axis] && x <= hi[axis]
                })
                .collect();
            for t in &transverse {
                for moment in 0..=order {
                    let mut signed = 0.0f64;
                    let mut mass = 0.0f64;
                    for &k in &axis_ks {
                        let mut ti = t.iter();
                        for a in 0..d {
                            idx[a] = if a == axis { k } else { *ti.next().unwrap() };
                        }
                        let w = grid.coord(axis, k).powi(moment as i32)
                            * v[grid.flat_index(&idx)];
                        signed += w * h;
                        mass += w.abs() * h;
                    }
                    if mass > 0.0 && signed.abs() > 1e-8 * mass {
                        return Err(format!(
                            "axis {axis} line moment {moment} = {signed:.3e} too large"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Support, `L^2` budget saturation, and per-variable line cancellation.
    pub fn rect_atom(field: &Field, spec: &RectAtomSpec) -> Result<()> {
        let grid = field.spec();
        let d = grid.dim();
        let v = field
            .as_real()
            .ok_or_else(|| fail("atom fields must be real"))?;
        let lo: Vec<f64> = (0..d).map(|a| spec.centers[a] - spec.radii[a]).collect();
        let hi: Vec<f64> = (0..d).map(|a| spec.centers[a] + spec.radii[a]).collect();
        let mut idx = vec![0usize; d];
        let mut l2sq = 0.0f64;
        for (flat, &val) in v.iter().enumerate() {
            grid.unravel(flat, &mut idx);
            let inside = (0..d).all(|a| {
                let x = grid.coord(a, idx[a]);
                x >= lo[a] && x <= hi[a]
            });
            if !inside && val != 0.0 {
                return Err(fail("support leak outside the rectangle"));
            }
            l2sq += val * val;
        }
        l2sq *= grid.cell_volume();
        let budget = spec.measure().powf(1.0 - 2.0 / spec.p);
        if (l2sq - budget).abs() > 1e-8 * budget {
            return Err(fail(format!("L2 budget {l2sq} != {budget}")));
        }
        line_moments_ok(field, &lo, &hi, moment_order_for(spec.p)).map_err(fail)
    }

    /// Disjoint supports, summed budget, and per-rectangle line cancellation.
    pub fn cf_atom(field: &Field, spec: &CfAtomSpec) -> Result<()> {
        let grid = field.spec();
        let d = grid.dim();
        let v = field
            .as_real()
            .ok_or_else(|| fail("atom fields must be real"))?;
        let mut idx = vec![0usize; d];
        let mut budgets = vec![0.0f64; spec.rects.len()];
        for (flat, &val) in v.iter().enumerate() {
            if val == 0.0 {
                continue;
            }
            grid.unravel(flat, &mut idx);
            let mut owner = None;
            for (r, rect) in spec.rects.iter().enumerate() {
                let inside = (0..d).all(|a| {
                    let x = grid.coord(a, idx[a]);
                    x >= rect.sides[a].lo() && x <= rect.sides[a].hi()
                });
                if inside {
                    if owner.is_some() {
                        return Err(fail("sample claimed by two rectangles"));
                    }
                    owner = Some(r);
                }
            }
            match owner {
                Some(r) => budgets[r] += val * val,
                None => return Err(fail("support leak outside every rectangle")),
            }
        }
        let cell = grid.cell_volume();
        let total: f64 = budgets.iter().map(|b| b * cell).sum();
        let omega: f64 = spec.rects.iter().map(|r| r.measure()).sum();
        let budget = omega.powf(1.0 - 2.0 / spec.p);
        if (total - budget).abs() > 1e-8 * budget {
            return Err(fail(format!("summed budget {total} != {budget}")));
        }
        let order = moment_order_for(spec.p);
        for rect in &spec.rects {
            let lo: Vec<f64> = rect.sides.iter().map(|s| s.lo()).collect();
            let hi: Vec<f64> = rect.sides.iter().map(|s| s.hi()).collect();
            line_moments_ok(field, &lo, &hi, order).map_err(fail)?;
        }
        Ok(())
    }
}

/// Which generator produced a corpus member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomKind {
    Hp1d,
    Rect,
    ChangFefferman,
}

impl std::fmt::Display for AtomKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AtomKind::Hp1d => write!(f, "hp1d"),
            AtomKind::Rect => write!(f, "rect"),
            AtomKind::ChangFefferman => write!(f, "cf"),
        }
    }
}

/// Geometry summary for manifests and reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum Geometry {
    Interval {
        center: f64,
        radius: f64,
    },
    Rect {
        centers: Vec<f64>,
        radii: Vec<f64>,
    },
    DyadicUnion {
        rects: Vec<DyadicRect>,
    },
}

/// One labeled corpus member.
#[derive(Clone, Debug)]
pub struct CorpusMember {
    pub id: String,
    pub kind: AtomKind,
    pub p: f64,
    pub seed: u64,
    pub geometry: Geometry,
    pub field: Field,
}

/// Where atoms land inside the central half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Centers jittered anywhere the support fits.
    Free,
    /// Centers jittered within twice the atom's own radius of the origin.
    /// Operators with a distinguished point (the Cesaro average) are
    /// dilation- but not translation-covariant; anchoring keeps the
    /// position-to-size ratio bounded across scales.
    Anchored,
}

/// Deterministic corpus parameters.
///
/// `scales` are dyadic exponents of the short radius; `aspects` are dyadic
/// aspect exponents (the long radius is `2^(scale + aspect)`, capped at a
/// quarter of the axis half-width); `variants` jittered copies are produced
/// per (scale, aspect) pair. `cf_count` multi-rectangle atoms are added for
/// d >= 2 with rectangle counts cycling `cf_rect_min..=cf_rect_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusConfig {
    pub p: f64,
    pub scales: Vec<i32>,
    pub aspects: Vec<i32>,
    pub variants: usize,
    pub cf_count: usize,
    pub cf_rect_min: usize,
    pub cf_rect_max: usize,
    pub placement: Placement,
    pub seed: u64,
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<()> {
        check_p(self.p).map_err(|_| {
            Error::BadCorpusConfig(format!("p = {} out of (0, 1]", self.p))
        })?;
        if self.scales.is_empty() {
            return Err(Error::BadCorpusConfig("no scales".into()));
        }
        if self.variants == 0 {
            return Err(Error::BadCorpusConfig("variants must be >= 1".into()));
        }
        if self.cf_count > 0 {
            if self.cf_rect_min < 1 || self.cf_rect_min > self.cf_rect_max {
                return Err(Error::BadCorpusConfig(
                    "need 1 <= cf_rect_min <= cf_rect_max".into(),
                ));
            }
            if self.cf_rect_max > 16 {
                return Err(Error::BadCorpusConfig("cf_rect_max > 16".into()));
            }
        }
        Ok(())
    }
}

fn jitter(rng: &mut ChaCha8Rng, amplitude: f64) -> f64 {
    if amplitude > 0.0 {
        rng.random_range(-amplitude..amplitude)
    } else {
        0.0
    }
}

/// Deterministic labeled atom corpus on a grid. Every member passes its
/// type validator before the corpus is returned; identical configs yield
/// bit-identical fields.
pub fn build_corpus(cfg: &CorpusConfig, grid: &GridSpec) -> Result<Vec<CorpusMember>> {
    cfg.validate()?;
    let d = grid.dim();
    let mut members = Vec::new();
    let mut ordinal: u64 = 0;

    if d == 1 {
        let l = grid.half_width(0);
        for &sigma in &cfg.scales {
            for v in 0..cfg.variants {
                let member_seed = derive_seed(cfg.seed, ordinal);
                ordinal += 1;
                let mut rng = ChaCha8Rng::seed_from_u64(member_seed);
                let radius = (2.0f64).powi(sigma);
                if radius >= l / 2.0 {
                    return Err(Error::BadCorpusConfig(format!(
                        "scale 2^{sigma} too large for half-width {l}"
                    )));
                }
                let room = match cfg.placement {
                    Placement::Free => l / 2.0 - radius,
                    Placement::Anchored => (l / 2.0 - radius).min(2.0 * radius),
                };
                let center = jitter(&mut rng, room);
                let spec = AtomSpec1D {
                    p: cfg.p,
                    center,
                    radius,
                    seed: derive_seed(member_seed, 7),
                };
                let field = make_hp_atom_1d(&spec, grid)?;
                validate::hp_atom_1d(&field, &spec)?;
                members.push(CorpusMember {
                    id: format!("hp1d-s{sigma}-v{v}"),
                    kind: AtomKind::Hp1d,
                    p: cfg.p,
                    seed: member_seed,
                    geometry: Geometry::Interval { center, radius },
                    field,
                });
            }
        }
        return Ok(members);
    }

    // d >= 2: rectangular atoms over scales x aspects, then multi-rectangle
    // atoms on a coarse dyadic cell partition.
    for &sigma in &cfg.scales {
        for &delta in &cfg.aspects {
            for v in 0..cfg.variants {
                let member_seed = derive_seed(cfg.seed, ordinal);
                ordinal += 1;
                let mut rng = ChaCha8Rng::seed_from_u64(member_seed);
                let mut radii = vec![(2.0f64).powi(sigma); d];
                let long_axis = v % d;
                let cap = grid.half_width(long_axis) / 4.0;
                radii[long_axis] = (2.0f64).powi(sigma + delta).min(cap);
                let mut centers = vec![0.0f64; d];
                for (a, c) in centers.iter_mut().enumerate() {
                    let room = grid.half_width(a) / 2.0 - radii[a];
                    if room < 0.0 {
                        return Err(Error::BadCorpusConfig(format!(
                            "radius {} too large for axis {a}",
                            radii[a]
                        )));
                    }
                    let room = match cfg.placement {
                        Placement::Free => room,
                        Placement::Anchored => room.min(2.0 * radii[a]),
                    };
                    *c = jitter(&mut rng, room);
                }
                let spec = RectAtomSpec {
                    p: cfg.p,
                    centers: centers.clone(),
                    radii: radii.clone(),
                    seed: derive_seed(member_seed, 7),
                };
                let field = make_rect_atom(&spec, grid)?;
                validate::rect_atom(&field, &spec)?;
                members.push(CorpusMember {
                    id: format!("rect-s{sigma}-a{delta}-v{v}"),
                    kind: AtomKind::Rect,
                    p: cfg.p,
                    seed: member_seed,
                    geometry: Geometry::Rect { centers, radii },
                    field,
                });
            }
        }
    }

    if cfg.cf_count > 0 {
        // Coarse dyadic cells tiling the central half of each axis.
        let cell_level: Vec<i32> = (0..d)
            .map(|a| (grid.half_width(a) / 2.0).log2().floor() as i32 - 1)
            .collect();
        let cells_per_axis: Vec<i64> = (0..d)
            .map(|a| {
                let size = (2.0f64).powi(cell_level[a]);
                (grid.half_width(a) / 2.0 / size).floor() as i64 * 2
            })
            .collect();
        let total_cells: i64 = cells_per_axis.iter().product();
        // Minimum sub-rectangle side: four grid cells.
        let min_level: Vec<i32> = (0..d)
            .map(|a| (4.0 * grid.spacing(a)).log2().ceil() as i32)
            .collect();

        for i in 0..cfg.cf_count {
            let span = cfg.cf_rect_max - cfg.cf_rect_min + 1;
            let count = cfg.cf_rect_min + (i % span);
            if (count as i64) > total_cells {
                return Err(Error::BadCorpusConfig(format!(
                    "{count} rectangles exceed the {total_cells} available cells"
                )));
            }
            let member_seed = derive_seed(cfg.seed, ordinal);
            ordinal += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(member_seed);
            // Fisher-Yates over the flat cell index space.
            let mut cells: Vec<i64> = (0..total_cells).collect();
            for k in (1..cells.len()).rev() {
                let j = rng.random_range(0..=k);
                cells.swap(k, j);
            }
            let mut rects = Vec::with_capacity(count);
            for &cell in cells.iter().take(count) {
                let mut rest = cell;
                let mut sides = Vec::with_capacity(d);
                for a in (0..d).rev() {
                    let per = cells_per_axis[a];
                    let cell_idx = rest % per - per / 2;
                    rest /= per;
                    let sub_level =
                        (cell_level[a] - rng.random_range(0..=2)).max(min_level[a]);
                    let splits = (2.0f64).powi(cell_level[a] - sub_level) as i64;
                    let offset = if splits > 1 {
                        rng.random_range(0..splits)
                    } else {
                        0
                    };
                    sides.push(DyadicInterval {
                        level: sub_level,
                        index: cell_idx * splits + offset,
                    });
                }
                sides.reverse();
                rects.push(DyadicRect { sides });
            }
            let spec = CfAtomSpec {
                p: cfg.p,
                rects: rects.clone(),
                seed: derive_seed(member_seed, 7),
            };
            let field = make_cf_atom(&spec, grid)?;
            validate::cf_atom(&field, &spec)?;
            members.push(CorpusMember {
                id: format!("cf-{i}-r{count}"),
                kind: AtomKind::ChangFefferman,
                p: cfg.p,
                seed: member_seed,
                geometry: Geometry::DyadicUnion { rects },
                field,
            });
        }
    }

    Ok(members)
}

/// Mean of the complex integral, for tests and the counterexample gate.
pub fn integral_abs(f: &Field) -> f64 {
    Complex64::norm(f.integral())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_1d() -> GridSpec {
        GridSpec::new(&[1024], &[16.0]).unwrap()
    }

    fn grid_2d() -> GridSpec {
        GridSpec::new(&[128, 128], &[16.0, 16.0]).unwrap()
    }

    #[test]
    fn hp_atom_normalization_and_cancellation() {
        let grid = grid_1d();
        for (p, bound) in [(1.0, 0.5), (0.7, (2.0f64).powf(-10.0 / 7.0))] {
            let spec = AtomSpec1D {
                p,
                center: 0.0,
                radius: 1.0,
                seed: 42,
            };
            let a = make_hp_atom_1d(&spec, &grid).unwrap();
            validate::hp_atom_1d(&a, &spec).unwrap();
            assert!((a.sup_norm() - bound).abs() <= 1e-12 * bound);
            let mean: f64 =
                a.as_real().unwrap().iter().sum::<f64>() * grid.spacing(0);
            assert!(mean.abs() < 1e-10);
        }
    }

    #[test]
    fn hp_atom_is_deterministic() {
        let grid = grid_1d();
        let spec = AtomSpec1D {
            p: 0.8,
            center: 2.5,
            radius: 0.5,
            seed: 7,
        };
        let a = make_hp_atom_1d(&spec, &grid).unwrap();
        let b = make_hp_atom_1d(&spec, &grid).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hp_atom_rejects_bad_geometry() {
        let grid = grid_1d();
        // outside the central half
        let spec = AtomSpec1D {
            p: 1.0,
            center: 7.9,
            radius: 0.5,
            seed: 0,
        };
        assert!(matches!(
            make_hp_atom_1d(&spec, &grid),
            Err(Error::SupportOutsideCore)
        ));
        // support too small for the projection
        let spec = AtomSpec1D {
            p: 0.5,
            center: 0.0,
            radius: grid.spacing(0) / 2.0,
            seed: 0,
        };
        assert!(make_hp_atom_1d(&spec, &grid).is_err());
    }

    #[test]
    fn hp_atom_dilation_closure() {
        let grid = grid_1d();
        for scale in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let spec = AtomSpec1D {
                p: 0.8,
                center: 1.0,
                radius: scale,
                seed: 99,
            };
            let a = make_hp_atom_1d(&spec, &grid).unwrap();
            validate::hp_atom_1d(&a, &spec).unwrap();
        }
    }

    #[test]
    fn rect_atom_budget_and_line_cancellation() {
        let grid = grid_2d();
        let spec = RectAtomSpec {
            p: 0.8,
            centers: vec![1.0, -2.0],
            radii: vec![2.0, 0.5],
            seed: 5,
        };
        let a = make_rect_atom(&spec, &grid).unwrap();
        validate::rect_atom(&a, &spec).unwrap();
        let l2 = a.lp_quasinorm(2.0).unwrap();
        let budget = spec.measure().powf((1.0 - 2.0 / 0.8) / 2.0);
        assert!((l2 - budget).abs() <= 1e-10 * budget);
        // Explicit per-line check along axis 0 for a few lines.
        let v = a.as_real().unwrap();
        for k1 in [30usize, 64, 90] {
            let mut line = 0.0f64;
            let mut mass = 0.0f64;
            for k0 in 0..128 {
                let val = v[k0 * 128 + k1];
                line += val * grid.spacing(0);
                mass += val.abs() * grid.spacing(0);
            }
            if mass > 0.0 {
                assert!(line.abs() <= 1e-10 * mass.max(1.0));
            }
        }
    }

    #[test]
    fn cf_atom_single_rectangle_matches_rect_atom() {
        let grid = grid_2d();
        let rect = DyadicRect {
            sides: vec![
                DyadicInterval { level: 1, index: 0 },
                DyadicInterval { level: 0, index: -2 },
            ],
        };
        let cf_spec = CfAtomSpec {
            p: 0.8,
            rects: vec![rect.clone()],
            seed: 11,
        };
        let cf = make_cf_atom(&cf_spec, &grid).unwrap();
        validate::cf_atom(&cf, &cf_spec).unwrap();
        let rect_spec = RectAtomSpec {
            p: 0.8,
            centers: rect.sides.iter().map(|s| s.center()).collect(),
            radii: rect.sides.iter().map(|s| s.radius()).collect(),
            seed: 11,
        };
        let plain = make_rect_atom(&rect_spec, &grid).unwrap();
        // Same budget, same profile seed path (stream 0): equal up to rounding.
        assert!(cf.rel_l2_diff(&plain) < 1e-13);
    }

    #[test]
    fn cf_atom_budget_and_disjoint_supports() {
        let grid = grid_2d();
        let spec = CfAtomSpec {
            p: 0.7,
            rects: vec![
                DyadicRect {
                    sides: vec![
                        DyadicInterval { level: 0, index: -4 },
                        DyadicInterval { level: 1, index: 1 },
                    ],
                },
                DyadicRect {
                    sides: vec![
                        DyadicInterval { level: 1, index: 1 },
                        DyadicInterval { level: 0, index: -3 },
                    ],
                },
                DyadicRect {
                    sides: vec![
                        DyadicInterval { level: -1, index: 3 },
                        DyadicInterval { level: -1, index: 3 },
                    ],
                },
            ],
            seed: 3,
        };
        let a = make_cf_atom(&spec, &grid).unwrap();
        validate::cf_atom(&a, &spec).unwrap();
        let omega: f64 = spec.rects.iter().map(|r| r.measure()).sum();
        let l2sq = a.lp_quasinorm(2.0).unwrap().powi(2);
        let budget = omega.powf(1.0 - 2.0 / 0.7);
        assert!((l2sq - budget).abs() <= 1e-10 * budget);
    }

    #[test]
    fn cf_atom_rejects_overlap() {
        let grid = grid_2d();
        let a = DyadicRect {
            sides: vec![
                DyadicInterval { level: 1, index: 0 },
                DyadicInterval { level: 1, index: 0 },
            ],
        };
        let b = DyadicRect {
            sides: vec![
                DyadicInterval { level: 0, index: 1 }, // inside a on axis 0
                DyadicInterval { level: 0, index: 0 }, // inside a on axis 1
            ],
        };
        let spec = CfAtomSpec {
            p: 0.8,
            rects: vec![a, b],
            seed: 0,
        };
        assert!(matches!(
            make_cf_atom(&spec, &grid),
            Err(Error::OverlappingRectangles)
        ));
    }

    #[test]
    fn counterexample_field_values() {
        let grid = GridSpec::new(&[4096], &[8.0]).unwrap();
        let f = counterexample_field(&grid).unwrap();
        let at = |x: f64| {
            let k = (0..4096)
                .min_by(|&a, &b| {
                    (grid.coord(0, a) - x)
                        .abs()
                        .partial_cmp(&(grid.coord(0, b) - x).abs())
                        .unwrap()
                })
                .unwrap();
            f.as_real().unwrap()[k]
        };
        assert_eq!(at(0.5), 1.0);
        assert_eq!(at(1.5), -1.0);
        assert_eq!(at(3.0), 0.0);
        let h = grid.spacing(0);
        assert!(integral_abs(&f) <= h);
        let l1 = f.lp_quasinorm(1.0).unwrap();
        assert!((l1 - 2.0).abs() <= 2.0 * h);
        // Too-small domains are rejected.
        let tiny = GridSpec::new(&[64], &[2.0]).unwrap();
        assert!(matches!(
            counterexample_field(&tiny),
            Err(Error::DomainTooSmall)
        ));
    }

    #[test]
    fn corpus_is_deterministic_and_validated() {
        let grid = grid_2d();
        let cfg = CorpusConfig {
            p: 0.8,
            scales: vec![-2, -1, 0, 1],
            aspects: vec![0, 1, 2, 3],
            variants: 2,
            cf_count: 8,
            cf_rect_min: 2,
            cf_rect_max: 8,
            placement: Placement::Free,
            seed: 7,
        };
        let a = build_corpus(&cfg, &grid).unwrap();
        let b = build_corpus(&cfg, &grid).unwrap();
        assert_eq!(a.len(), 4 * 4 * 2 + 8);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.field, y.field);
        }
        // At least 4 distinct aspect exponents appear in the labels.
        let aspects: std::collections::HashSet<&str> = a
            .iter()
            .filter(|m| m.kind == AtomKind::Rect)
            .map(|m| m.id.split('-').nth(2).unwrap())
            .collect();
        assert!(aspects.len() >= 4);
        // Rectangle measures straddle 1.
        let measures: Vec<f64> = a
            .iter()
            .filter_map(|m| match &m.geometry {
                Geometry::Rect { radii, .. } => {
                    Some(radii.iter().map(|r| 2.0 * r).product::<f64>())
                }
                _ => None,
            })
            .collect();
        assert!(measures.iter().any(|&m| m < 1.0));
        assert!(measures.iter().any(|&m| m > 1.0));
    }

    #[test]
    fn corpus_1d() {
        let grid = grid_1d();
        let cfg = CorpusConfig {
            p: 0.8,
            scales: vec![-3, -2, -1, 0, 1, 2],
            aspects: vec![],
            variants: 6,
            cf_count: 0,
            cf_rect_min: 2,
            cf_rect_max: 8,
            placement: Placement::Free,
            seed: 13,
        };
        let corpus = build_corpus(&cfg, &grid).unwrap();
        assert_eq!(corpus.len(), 36);
        assert!(corpus.iter().all(|m| m.kind == AtomKind::Hp1d));
    }

    #[test]
    fn corpus_config_validation() {
        let bad = CorpusConfig {
            p: 1.4,
            scales: vec![0],
            aspects: vec![],
            variants: 1,
            cf_count: 0,
            cf_rect_min: 2,
            cf_rect_max: 8,
            placement: Placement::Free,
            seed: 0,
        };
        assert!(bad.validate().is_err());
        let bad = CorpusConfig {
            p: 0.8,
            scales: vec![],
            aspects: vec![],
            variants: 1,
            cf_count: 0,
            cf_rect_min: 2,
            cf_rect_max: 8,
            placement: Placement::Free,
            seed: 0,
        };
        assert!(bad.validate().is_err());
    }
}
