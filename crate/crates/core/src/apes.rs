//! E⊗e adiabatic potential energy surface: {F, G, ħω} ⇄ {E_JT, δ_JT, ħω} and
//! classical sheets on a grid of dimensionless normal coordinates.
//!
//! Sign convention: F ≥ 0. For G > 0 the three minima of the lower sheet sit
//! at polar angles 0°, 120° and 240° (first one on the +x axis); the saddles
//! are at 60°, 180° and 300°.

use crate::{Error, Result};

/// Linear (F) and quadratic (G) vibronic couplings and the effective E_g
/// mode quantum, all in meV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JahnTellerParams {
    pub f: f64,
    pub g: f64,
    pub hbar_omega: f64,
}

impl JahnTellerParams {
    pub fn new(f: f64, g: f64, hbar_omega: f64) -> Result<Self> {
        let p = Self { f, g, hbar_omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f.is_finite() && self.g.is_finite() && self.hbar_omega.is_finite()) {
            return Err(Error::InvalidApes("non-finite parameter".into()));
        }
        if self.hbar_omega <= 0.0 {
            return Err(Error::InvalidApes(format!(
                "hbar_omega must be positive, got {}",
                self.hbar_omega
            )));
        }
        if self.f < 0.0 {
            return Err(Error::InvalidApes(format!("F must be non-negative, got {}", self.f)));
        }
        // Both sheets must stay bounded and the barrier formula finite.
        let lower = self.hbar_omega - 2.0 * self.g;
        let upper = self.hbar_omega + 2.0 * self.g;
        let tiny = f64::EPSILON * self.hbar_omega * 16.0;
        if lower <= tiny || upper <= tiny {
            return Err(Error::InvalidApes(format!(
                "|2G| must stay below hbar_omega (G = {}, hbar_omega = {})",
                self.g, self.hbar_omega
            )));
        }
        Ok(())
    }

    /// Radius of the three minima, F/(ħω − 2G).
    pub fn minimum_radius(&self) -> f64 {
        self.f / (self.hbar_omega - 2.0 * self.g)
    }

    /// Radius of the saddle points, F/(ħω + 2G).
    pub fn saddle_radius(&self) -> f64 {
        self.f / (self.hbar_omega + 2.0 * self.g)
    }
}

/// Stabilization energy, inter-minimum barrier and mode quantum, in meV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApesObservables {
    pub e_jt: f64,
    pub delta_jt: f64,
    pub hbar_omega: f64,
}

impl ApesObservables {
    pub fn new(e_jt: f64, delta_jt: f64, hbar_omega: f64) -> Self {
        Self {
            e_jt,
            delta_jt,
            hbar_omega,
        }
    }
}

pub fn fg_from_observables(obs: &ApesObservables) -> Result<JahnTellerParams> {
    let ApesObservables {
        e_jt,
        delta_jt,
        hbar_omega,
    } = *obs;
    if !(e_jt.is_finite() && delta_jt.is_finite() && hbar_omega.is_finite()) {
        return Err(Error::InvalidApes("non-finite observable".into()));
    }
    if hbar_omega <= 0.0 {
        return Err(Error::InvalidApes("hbar_omega must be positive".into()));
    }
    if e_jt < 0.0 {
        return Err(Error::InvalidApes("E_JT must be non-negative".into()));
    }
    let g = if delta_jt == 0.0 {
        0.0
    } else {
        let denom = 4.0 * e_jt - 2.0 * delta_jt;
        if denom <= 0.0 {
            return Err(Error::InvalidApes(format!(
                "4 E_JT - 2 delta_JT must be positive (E_JT = {e_jt}, delta_JT = {delta_jt})"
            )));
        }
        delta_jt * hbar_omega / denom
    };
    let lower = hbar_omega - 2.0 * g;
    if lower <= 0.0 {
        return Err(Error::InvalidApes(format!(
            "derived G = {g} leaves an unbounded surface (hbar_omega - 2G = {lower})"
        )));
    }
    JahnTellerParams::new((2.0 * e_jt * lower).sqrt(), g, hbar_omega)
}

pub fn observables_from_fg(params: &JahnTellerParams) -> Result<ApesObservables> {
    params.validate()?;
    let JahnTellerParams { f, g, hbar_omega } = *params;
    let e_jt = f * f / (2.0 * (hbar_omega - 2.0 * g));
    let delta_jt = 4.0 * e_jt * g / (hbar_omega + 2.0 * g);
    if !e_jt.is_finite() || !delta_jt.is_finite() {
        return Err(Error::InvalidApes("E_JT overflows near the G = hbar_omega/2 pole".into()));
    }
    Ok(ApesObservables {
        e_jt,
        delta_jt,
        hbar_omega,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApesPoint {
    pub x: f64,
    pub y: f64,
    pub v_minus: f64,
    pub v_plus: f64,
}

/// Both sheets at one point, zero-point term dropped (V(0, 0) = 0).
pub fn apes_sheets(params: &JahnTellerParams, x: f64, y: f64) -> (f64, f64) {
    let JahnTellerParams { f, g, hbar_omega } = *params;
    let diag = 0.5 * hbar_omega * (x * x + y * y);
    // coefficients of σ_z and σ_x
    let a = f * x + g * (x * x - y * y);
    let b = -f * y + 2.0 * g * x * y;
    let split = a.hypot(b);
    (diag - split, diag + split)
}

pub fn apes_surface(params: &JahnTellerParams, grid: &[(f64, f64)]) -> Vec<ApesPoint> {
    grid.iter()
        .map(|&(x, y)| {
            let (v_minus, v_plus) = apes_sheets(params, x, y);
            ApesPoint {
                x,
                y,
                v_minus,
                v_plus,
            }
        })
        .collect()
}

/// Row-major `n × n` grid over [−extent, extent]².
pub fn square_grid(extent: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n.max(2);
    let step = 2.0 * extent / (n - 1) as f64;
    let mut grid = Vec::with_capacity(n * n);
    for j in 0..n {
        let y = -extent + j as f64 * step;
        for i in 0..n {
            grid.push((-extent + i as f64 * step, y));
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn siv_ground_inversion() {
        let p = fg_from_observables(&ApesObservables::new(42.3, 3.0, 85.2)).unwrap();
        // closed form: G = 3·85.2/(4·42.3 − 6), F = sqrt(2·42.3·(85.2 − 2G))
        let g = 3.0 * 85.2 / (4.0 * 42.3 - 6.0);
        assert_relative_eq!(p.g, g, max_relative = 1e-14);
        assert!((p.g - 1.566).abs() < 1e-3);
        assert!((p.f - 83.3).abs() < 0.05);
        let back = observables_from_fg(&p).unwrap();
        assert_relative_eq!(back.e_jt, 42.3, max_relative = 1e-9);
        assert_relative_eq!(back.delta_jt, 3.0, max_relative = 1e-9);
    }

    #[test]
    fn zero_barrier_means_zero_quadratic_coupling() {
        let p = fg_from_observables(&ApesObservables::new(30.0, 0.0, 80.0)).unwrap();
        assert_eq!(p.g, 0.0);
        assert_relative_eq!(p.f, (2.0 * 30.0 * 80.0f64).sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn zero_coupling() {
        let o = observables_from_fg(&JahnTellerParams::new(0.0, 0.0, 70.0).unwrap()).unwrap();
        assert_eq!((o.e_jt, o.delta_jt), (0.0, 0.0));
    }

    #[test]
    fn pole_is_rejected() {
        assert!(JahnTellerParams::new(50.0, 40.0, 80.0).is_err());
        let p = JahnTellerParams { f: 50.0, g: 40.0 - 1e-15, hbar_omega: 80.0 };
        assert!(observables_from_fg(&p).is_err());
        assert!(fg_from_observables(&ApesObservables::new(1.0, 2.0, 80.0)).is_err());
        assert!(fg_from_observables(&ApesObservables::new(1.0, 0.5, -1.0)).is_err());
    }

    #[test]
    fn conical_intersection_at_origin() {
        let p = JahnTellerParams::new(83.3, 1.57, 85.2).unwrap();
        assert_eq!(apes_sheets(&p, 0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn minimum_on_positive_x_axis() {
        let p = JahnTellerParams::new(83.3, 1.57, 85.2).unwrap();
        let e = observables_from_fg(&p).unwrap().e_jt;
        let (vm, _) = apes_sheets(&p, p.minimum_radius(), 0.0);
        assert_relative_eq!(vm, -e, max_relative = 1e-13);
        let r = p.saddle_radius();
        let th = std::f64::consts::FRAC_PI_3;
        let (vs, _) = apes_sheets(&p, r * th.cos(), r * th.sin());
        let o = observables_from_fg(&p).unwrap();
        assert_relative_eq!(vs - vm, o.delta_jt, max_relative = 1e-10);
    }

    #[test]
    fn axial_symmetry_without_quadratic_term() {
        let p = JahnTellerParams::new(60.0, 0.0, 80.0).unwrap();
        for r in [0.1, 0.5, 0.75, 1.3] {
            let vals: Vec<_> = (0..64)
                .map(|k| {
                    let th = k as f64 * std::f64::consts::TAU / 64.0;
                    apes_sheets(&p, r * th.cos(), r * th.sin())
                })
                .collect();
            let (m0, p0) = vals[0];
            for (vm, vp) in vals {
                assert!((vm - m0).abs() <= 1e-12 * p.hbar_omega);
                assert!((vp - p0).abs() <= 1e-12 * p.hbar_omega);
            }
        }
    }

    #[test]
    fn three_minima_on_minimum_circle() {
        let p = JahnTellerParams::new(47.9, 0.73, 74.9).unwrap();
        let r = p.minimum_radius();
        let n = 3600;
        let v: Vec<f64> = (0..n)
            .map(|k| {
                let th = (k as f64 + 0.5) * std::f64::consts::TAU / n as f64;
                apes_sheets(&p, r * th.cos(), r * th.sin()).0
            })
            .collect();
        // count minima: derivative goes from negative to positive
        let mut minima = 0;
        for k in 0..n {
            let d0 = v[k] - v[(k + n - 1) % n];
            let d1 = v[(k + 1) % n] - v[k];
            if d0 < 0.0 && d1 >= 0.0 {
                minima += 1;
            }
        }
        assert_eq!(minima, 3);
    }

    #[test]
    fn square_grid_shape() {
        let g = square_grid(2.0, 5);
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], (-2.0, -2.0));
        assert_eq!(g[24], (2.0, 2.0));
        assert_eq!(g[12], (0.0, 0.0));
    }

    proptest! {
        #[test]
        fn observables_round_trip(e in 0.5f64..150.0, frac in 0.0f64..0.45, hw in 20.0f64..120.0) {
            let obs = ApesObservables::new(e, frac * e, hw);
            let p = fg_from_observables(&obs).unwrap();
            let back = observables_from_fg(&p).unwrap();
            prop_assert!((back.e_jt - e).abs() <= 1e-12 * e);
            prop_assert!((back.delta_jt - obs.delta_jt).abs() <= 1e-12 * e);
        }

        #[test]
        fn upper_sheet_dominates(x in -3.0f64..3.0, y in -3.0f64..3.0, f in 0.0f64..120.0, g in -10.0f64..10.0) {
            let p = JahnTellerParams::new(f, g, 80.0).unwrap();
            let (vm, vp) = apes_sheets(&p, x, y);
            prop_assert!(vp >= vm);
        }
    }
}
