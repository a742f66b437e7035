//! Effective 4×4 spin Hamiltonian of one ²E manifold, Zeeman scans of the
//! optical transitions between the ground (g) and excited (u) manifolds, and
//! thermal occupation of the lower doublet.
//!
//! Basis order is {e_+↑, e_+↓, e_−↑, e_−↓}; energies in GHz, fields in tesla.

use std::io::Write;

use nalgebra::{DMatrix, Vector3};

use crate::basis::{OperatorMatrix, C64};
use crate::djt::ReductionFactors;
use crate::eigen;
use crate::units::{G_S, KELVIN_PER_GHZ, MU_B_GHZ_PER_T};
use crate::{Error, Result};

/// Stevens orbital reduction factor of the ground manifolds.
pub const G_L_GROUND: f64 = 0.328;
/// Stevens orbital reduction factor of the excited manifolds.
pub const G_L_EXCITED: f64 = 0.782;

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveSpinParams {
    /// Zero-field splitting, GHz.
    pub lambda: f64,
    /// Orbital Zeeman factor p·g_L.
    pub f: f64,
    /// δ_p·g_L.
    pub delta_f: f64,
    pub g_s: f64,
    pub g_l: f64,
    /// Optional Hermitian strain addend (GHz), zero when absent.
    pub strain: Option<DMatrix<C64>>,
}

impl EffectiveSpinParams {
    pub fn new(lambda: f64, f: f64, delta_f: f64, g_l: f64) -> Result<Self> {
        let p = Self {
            lambda,
            f,
            delta_f,
            g_s: G_S,
            g_l,
            strain: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_factors(rf: &ReductionFactors, g_l: f64) -> Result<Self> {
        Self::new(rf.lambda_zfs_ghz(), rf.p * g_l, rf.delta_p * g_l, g_l)
    }

    pub fn with_strain(mut self, strain: DMatrix<C64>) -> Result<Self> {
        self.strain = Some(strain);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.lambda, self.f, self.delta_f, self.g_s, self.g_l]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite spin Hamiltonian parameter".into()));
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidParameter(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if !(self.g_l > 0.0 && self.g_l <= 1.0) {
            return Err(Error::InvalidParameter(format!("g_L must lie in (0, 1], got {}", self.g_l)));
        }
        if self.f.abs() > self.g_l || self.delta_f.abs() > self.g_l {
            return Err(Error::InvalidParameter(format!(
                "|f| and |delta_f| may not exceed g_L = {} (f = {}, delta_f = {})",
                self.g_l, self.f, self.delta_f
            )));
        }
        if let Some(s) = &self.strain {
            if s.nrows() != 4 || s.ncols() != 4 {
                return Err(Error::BasisMismatch("strain addend must be 4x4".into()));
            }
            let defect = OperatorMatrix(s.clone()).hermiticity_defect();
            if defect > eigen::HERMITIAN_TOL {
                return Err(Error::NonHermitian { defect });
            }
        }
        Ok(())
    }
}

/// Magnetic field in the lab frame and the defect symmetry axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    pub magnitude: f64,
    pub direction: Vector3<f64>,
    pub defect_axis: Vector3<f64>,
}

fn unit(v: Vector3<f64>, what: &str) -> Result<Vector3<f64>> {
    let n = v.norm();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter(format!("{what} must be a non-zero finite vector")));
    }
    Ok(v / n)
}

impl FieldSpec {
    pub fn new(magnitude: f64, direction: Vector3<f64>, defect_axis: Vector3<f64>) -> Result<Self> {
        if !magnitude.is_finite() {
            return Err(Error::InvalidParameter("field magnitude must be finite".into()));
        }
        Ok(Self {
            magnitude,
            direction: unit(direction, "field direction")?,
            defect_axis: unit(defect_axis, "defect axis")?,
        })
    }

    /// Field along the lattice direction `[h k l]`, defect axis ⟨111⟩.
    pub fn along_miller(magnitude: f64, hkl: [i32; 3]) -> Result<Self> {
        let d = Vector3::new(hkl[0] as f64, hkl[1] as f64, hkl[2] as f64);
        Self::new(magnitude, d, Vector3::new(1.0, 1.0, 1.0))
    }

    pub fn with_magnitude(&self, magnitude: f64) -> Self {
        Self { magnitude, ..*self }
    }

    /// Orthonormal (x, y, z) defect frame with z along the axis. The x axis is
    /// the lab ẑ projected off the defect axis (lab x̂ if they are parallel).
    pub fn defect_frame(&self) -> [Vector3<f64>; 3] {
        let z = self.defect_axis;
        let mut reference = Vector3::z();
        if z.cross(&reference).norm() < 1e-6 {
            reference = Vector3::x();
        }
        let x = (reference - z * reference.dot(&z)).normalize();
        [x, z.cross(&x), z]
    }

    /// Field components (B_x, B_y, B_z) in the defect frame.
    pub fn defect_components(&self) -> Vector3<f64> {
        let [x, y, z] = self.defect_frame();
        let b = self.direction * self.magnitude;
        Vector3::new(b.dot(&x), b.dot(&y), b.dot(&z))
    }
}

/// (B_z, B_⊥, azimuth) of the field relative to the defect axis.
pub fn frame_components(field: &FieldSpec) -> (f64, f64, f64) {
    let cos = field.direction.dot(&field.defect_axis).clamp(-1.0, 1.0);
    let b_z = field.magnitude * cos;
    let b_perp = field.magnitude * (1.0 - cos * cos).max(0.0).sqrt();
    let c = field.defect_components();
    (b_z, b_perp, c.y.atan2(c.x))
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn build_effective(params: &EffectiveSpinParams, field: &FieldSpec) -> DMatrix<C64> {
    let b = field.defect_components();
    let lz = [1.0, 1.0, -1.0, -1.0];
    let sz = [0.5, -0.5, 0.5, -0.5];
    let mut h = DMatrix::from_element(4, 4, c(0.0, 0.0));
    for i in 0..4 {
        h[(i, i)] = c(
            -params.lambda * lz[i] * sz[i]
                + MU_B_GHZ_PER_T * params.f * lz[i] * b.z
                + MU_B_GHZ_PER_T * params.g_s * sz[i] * b.z
                - 2.0 * MU_B_GHZ_PER_T * params.delta_f * sz[i] * b.z,
            0.0,
        );
    }
    // S_x B_x + S_y B_y within each orbital block: ⟨↑|·|↓⟩ = (B_x − iB_y)/2
    let off = c(b.x, -b.y) * (0.5 * MU_B_GHZ_PER_T * params.g_s);
    for blk in [0, 2] {
        h[(blk, blk + 1)] = off;
        h[(blk + 1, blk)] = off.conj();
    }
    if let Some(s) = &params.strain {
        h += s;
    }
    h
}

/// Ascending eigenvalues and eigenvectors of the 4×4 at one field.
pub fn effective_levels(params: &EffectiveSpinParams, field: &FieldSpec) -> Result<eigen::Eigenpairs> {
    eigen::solve(&OperatorMatrix(build_effective(params, field)))
}

/// Field grid `B_k = k·b_max/steps`, k = 0..=steps.
pub fn field_grid(b_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(b_max.is_finite() && b_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "field scan needs steps > 0 and b_max > 0 (got steps = {steps}, b_max = {b_max})"
        )));
    }
    Ok((0..=steps).map(|k| b_max * k as f64 / steps as f64).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSet {
    pub fields: Vec<f64>,
    pub ground: Vec<[f64; 4]>,
    pub excited: Vec<[f64; 4]>,
    /// lines[k][4i + j] = excited[k][i] − ground[k][j], GHz from the ZPL.
    pub lines: Vec<[f64; 16]>,
    pub zpl_ev: f64,
}

impl TransitionSet {
    pub fn column_names() -> Vec<String> {
        let mut cols = vec!["B_tesla".to_string()];
        cols.extend((1..=4).map(|i| format!("g{i}")));
        cols.extend((1..=4).map(|i| format!("u{i}")));
        for i in 1..=4 {
            for j in 1..=4 {
                cols.push(format!("t{i}{j}"));
            }
        }
        cols
    }

    /// CSV rows only; callers add their own `#` header block first.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::column_names().join(","))?;
        for k in 0..self.fields.len() {
            let mut row = vec![self.fields[k].to_string()];
            row.extend(self.ground[k].iter().map(f64::to_string));
            row.extend(self.excited[k].iter().map(f64::to_string));
            row.extend(self.lines[k].iter().map(f64::to_string));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Distinct line offsets at grid point `k`, merged within `tol` GHz.
    pub fn distinct_lines(&self, k: usize, tol: f64) -> Vec<f64> {
        let mut v = self.lines[k].to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() <= tol);
        v
    }
}

const PERMUTATIONS: usize = 24;

fn permutation(mut k: usize) -> [usize; 4] {
    let mut pool = vec![0, 1, 2, 3];
    let mut out = [0; 4];
    for (slot, radix) in [6, 2, 1, 1].into_iter().enumerate() {
        out[slot] = pool.remove(k / radix);
        k %= radix;
    }
    out
}

/// Continue four levels from the previous grid point by maximal eigenvector
/// overlap, so that crossing lines keep their identity.
struct LevelTracker {
    previous: Option<DMatrix<C64>>,
}

impl LevelTracker {
    fn step(&mut self, eig: eigen::Eigenpairs) -> [f64; 4] {
        let order = match &self.previous {
            None => [0, 1, 2, 3],
            Some(prev) => {
                let overlap = prev.adjoint() * &eig.vectors;
                (0..PERMUTATIONS)
                    .map(permutation)
                    .max_by(|a, b| {
                        let score = |p: &[usize; 4]| (0..4).map(|i| overlap[(i, p[i])].norm_sqr()).sum::<f64>();
                        score(a).total_cmp(&score(b))
                    })
                    .expect("24 permutations")
            }
        };
        let mut vectors = DMatrix::zeros(4, 4);
        let mut values = [0.0; 4];
        for (i, &src) in order.iter().enumerate() {
            vectors.set_column(i, &eig.vectors.column(src));
            values[i] = eig.values[src];
        }
        self.previous = Some(vectors);
        values
    }
}

/// Levels of both manifolds and all 16 ZPL fine-structure lines on a field grid.
pub fn zeeman_scan(
    ground: &EffectiveSpinParams,
    excited: &EffectiveSpinParams,
    zpl_ev: f64,
    direction: &FieldSpec,
    b_max: f64,
    steps: usize,
) -> Result<TransitionSet> {
    ground.validate()?;
    excited.validate()?;
    let fields = field_grid(b_max, steps)?;
    let mut tg = LevelTracker { previous: None };
    let mut tu = LevelTracker { previous: None };
    let mut set = TransitionSet {
        fields: Vec::with_capacity(fields.len()),
        ground: Vec::with_capacity(fields.len()),
        excited: Vec::with_capacity(fields.len()),
        lines: Vec::with_capacity(fields.len()),
        zpl_ev,
    };
    for &b in &fields {
        let f = direction.with_magnitude(b);
        let g = tg.step(effective_levels(ground, &f)?);
        let u = tu.step(effective_levels(excited, &f)?);
        let mut lines = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                lines[4 * i + j] = u[i] - g[j];
            }
        }
        set.fields.push(b);
        set.ground.push(g);
        set.excited.push(u);
        set.lines.push(lines);
    }
    Ok(set)
}

/// Mean |dE/dB| (GHz/T) of the four levels at field magnitude `b`, by
/// central difference over ±`h`.
pub fn mean_abs_slope(params: &EffectiveSpinParams, direction: &FieldSpec, b: f64, h: f64) -> Result<f64> {
    let lo = effective_levels(params, &direction.with_magnitude(b - h))?.values;
    let hi = effective_levels(params, &direction.with_magnitude(b + h))?.values;
    Ok(lo.iter().zip(&hi).map(|(a, c)| ((c - a) / (2.0 * h)).abs()).sum::<f64>() / 4.0)
}

fn boltzmann_exponent(lambda_ghz: f64, temperature_k: f64) -> Result<f64> {
    if temperature_k.is_nan() || temperature_k <= 0.0 || !lambda_ghz.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "thermal population needs T > 0 and finite lambda (T = {temperature_k}, lambda = {lambda_ghz})"
        )));
    }
    Ok(lambda_ghz * KELVIN_PER_GHZ / temperature_k)
}

/// Occupation of the lower of two equally degenerate doublets split by λ.
pub fn thermal_population(lambda_ghz: f64, temperature_k: f64) -> Result<f64> {
    Ok(1.0 / (1.0 + (-boltzmann_exponent(lambda_ghz, temperature_k)?).exp()))
}

/// 1 − `thermal_population`, computed without cancellation.
pub fn thermal_excited_fraction(lambda_ghz: f64, temperature_k: f64) -> Result<f64> {
    Ok(1.0 / (1.0 + boltzmann_exponent(lambda_ghz, temperature_k)?.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn siv_g() -> EffectiveSpinParams {
        EffectiveSpinParams::new(50.0, 0.1, 0.001, G_L_GROUND).unwrap()
    }

    #[test]
    fn frame_geometry() {
        let along = FieldSpec::along_miller(2.0, [1, 1, 1]).unwrap();
        let (bz, bp, _) = frame_components(&along);
        assert_relative_eq!(bz, 2.0, max_relative = 1e-15);
        assert!(bp.abs() < 1e-7);
        let perp = FieldSpec::along_miller(1.0, [1, -1, 0]).unwrap();
        let (bz, bp, _) = frame_components(&perp);
        assert!(bz.abs() < 1e-15);
        assert_relative_eq!(bp, 1.0, max_relative = 1e-15);
        let (bz, _, _) = frame_components(&FieldSpec::along_miller(1.0, [1, 0, 0]).unwrap());
        assert!((bz - 0.57735).abs() < 1e-5);
        assert!(FieldSpec::along_miller(1.0, [0, 0, 0]).is_err());
    }

    #[test]
    fn defect_frame_is_orthonormal() {
        for axis in [Vector3::new(1.0, 1.0, 1.0), Vector3::z(), Vector3::new(0.0, 0.2, -3.0)] {
            let f = FieldSpec::new(1.0, Vector3::x(), axis).unwrap();
            let [x, y, z] = f.defect_frame();
            for (a, b) in [(x, y), (y, z), (x, z)] {
                assert!(a.dot(&b).abs() < 1e-14);
            }
            assert!((x.cross(&y) - z).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_field_splitting() {
        let e = effective_levels(&siv_g(), &FieldSpec::along_miller(0.0, [1, 0, 0]).unwrap()).unwrap();
        assert_relative_eq!(e.values[0], -25.0, max_relative = 1e-14);
        assert_relative_eq!(e.values[1], -25.0, max_relative = 1e-14);
        assert_relative_eq!(e.values[3] - e.values[0], 50.0, max_relative = 1e-14);
    }

    #[test]
    fn bare_spin_zeeman() {
        let p = EffectiveSpinParams::new(0.0, 0.0, 0.0, 0.5).unwrap();
        let e = effective_levels(&p, &FieldSpec::along_miller(1.0, [1, 1, 1]).unwrap()).unwrap();
        assert!((e.values[3] - e.values[0] - 28.02).abs() < 0.01);
    }

    #[test]
    fn parameter_validation() {
        assert!(EffectiveSpinParams::new(50.0, 0.5, 0.0, 0.328).is_err());
        assert!(EffectiveSpinParams::new(50.0, 0.1, 0.0, 1.5).is_err());
        assert!(EffectiveSpinParams::new(-1.0, 0.1, 0.0, 0.3).is_err());
        let bad = DMatrix::from_element(4, 4, C64::new(0.0, 1.0));
        assert!(siv_g().with_strain(bad).is_err());
    }

    #[test]
    fn strain_addend_enters() {
        let mut s = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
        s[(0, 2)] = C64::new(3.0, 0.0);
        s[(2, 0)] = C64::new(3.0, 0.0);
        let p = siv_g().with_strain(s).unwrap();
        let f = FieldSpec::along_miller(0.0, [1, 0, 0]).unwrap();
        let h = build_effective(&p, &f);
        assert_eq!(h[(0, 2)], C64::new(3.0, 0.0));
    }

    #[test]
    fn thermal_limits() {
        assert!(thermal_excited_fraction(4385.0, 4.0).unwrap() < 1e-20);
        assert!((thermal_population(4385.0, 77.0).unwrap() - 0.94).abs() < 0.005);
        assert!((thermal_population(4385.0, 1e12).unwrap() - 0.5).abs() < 1e-9);
        assert!(thermal_population(10.0, 0.0).is_err());
    }

    #[test]
    fn permutations_are_distinct() {
        let mut all: Vec<[usize; 4]> = (0..PERMUTATIONS).map(permutation).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 24);
    }

    #[test]
    fn csv_shape() {
        let u = EffectiveSpinParams::new(260.0, 0.1, 0.022, G_L_EXCITED).unwrap();
        let dir = FieldSpec::along_miller(1.0, [1, 0, 0]).unwrap();
        let set = zeeman_scan(&siv_g(), &u, 1.68, &dir, 1.0, 4).unwrap();
        let mut out = Vec::new();
        set.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 6);
        assert!(lines.iter().all(|l| l.split(',').count() == 25));
        assert!(zeeman_scan(&siv_g(), &u, 1.68, &dir, 1.0, 0).is_err());
    }

    proptest! {
        #[test]
        fn hermitian_and_traceless(
            lambda in 0.0f64..5000.0, fr in 0.0f64..1.0, dfr in -1.0f64..1.0, gl in 0.05f64..1.0,
            b in -10.0f64..10.0, dx in -1.0f64..1.0, dy in -1.0f64..1.0, dz in 0.1f64..1.0,
        ) {
            let p = EffectiveSpinParams::new(lambda, fr * gl, dfr * gl, gl).unwrap();
            let f = FieldSpec::new(b, Vector3::new(dx, dy, dz), Vector3::new(1.0, 1.0, 1.0)).unwrap();
            let h = OperatorMatrix(build_effective(&p, &f));
            prop_assert!(h.is_exactly_hermitian());
            prop_assert!(h.trace().norm() <= 1e-12 * (lambda + 100.0 * b.abs()));
        }

        #[test]
        fn field_reversal_keeps_spectrum(
            lambda in 0.0f64..5000.0, fr in 0.0f64..1.0, dfr in -1.0f64..1.0, b in 0.0f64..10.0,
        ) {
            let p = EffectiveSpinParams::new(lambda, fr * 0.5, dfr * 0.5, 0.5).unwrap();
            let f = FieldSpec::along_miller(b, [1, 0, 0]).unwrap();
            let a = effective_levels(&p, &f).unwrap().values;
            let r = effective_levels(&p, &f.with_magnitude(-b)).unwrap().values;
            for (x, y) in a.iter().zip(&r) {
                prop_assert!((x - y).abs() <= 1e-9 * (1.0 + lambda));
            }
        }
    }
}
