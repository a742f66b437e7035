//! Radiative lifetime, Huang-Rhys emission lineshape, charge-transition-level
//! arithmetic and the vibronic correction to the zero-phonon line.

use crate::apes::{observables_from_fg, JahnTellerParams};
use crate::basis::VibronicBasis;
use crate::djt::{self, SocParams};
use crate::units::{DEBYE_C_M, ELEMENTARY_CHARGE_C, EPSILON0_F_PER_M, HBAR_J_S, SPEED_OF_LIGHT_M_PER_S};
use crate::{Error, Result};

pub const DIAMOND_REFRACTIVE_INDEX: f64 = 2.41;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeInputs {
    pub refractive_index: f64,
    pub photon_energy_ev: f64,
    pub dipole_debye: f64,
}

impl LifetimeInputs {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.refractive_index, self.photon_energy_ev, self.dipole_debye]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !ok {
            return Err(Error::InvalidParameter(format!("lifetime inputs must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// n ω³ / (3π ε₀ ħ c³) in SI, the rate per unit μ² (C·m)².
fn rate_per_dipole_sq(refractive_index: f64, photon_energy_ev: f64) -> f64 {
    let omega = photon_energy_ev * ELEMENTARY_CHARGE_C / HBAR_J_S;
    refractive_index * omega.powi(3)
        / (3.0 * std::f64::consts::PI * EPSILON0_F_PER_M * HBAR_J_S * SPEED_OF_LIGHT_M_PER_S.powi(3))
}

/// Spontaneous-emission lifetime in ns.
pub fn radiative_lifetime_ns(inputs: &LifetimeInputs) -> Result<f64> {
    inputs.validate()?;
    let mu = inputs.dipole_debye * DEBYE_C_M;
    Ok(1e9 / (rate_per_dipole_sq(inputs.refractive_index, inputs.photon_energy_ev) * mu * mu))
}

/// Transition dipole (debye) that gives lifetime `tau_ns`.
pub fn dipole_for_lifetime(refractive_index: f64, photon_energy_ev: f64, tau_ns: f64) -> Result<f64> {
    LifetimeInputs {
        refractive_index,
        photon_energy_ev,
        dipole_debye: 1.0,
    }
    .validate()?;
    if !(tau_ns.is_finite() && tau_ns > 0.0) {
        return Err(Error::InvalidParameter(format!("lifetime must be positive, got {tau_ns}")));
    }
    let mu_sq = 1e9 / (tau_ns * rate_per_dipole_sq(refractive_index, photon_energy_ev));
    Ok(mu_sq.sqrt() / DEBYE_C_M)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrMode {
    /// Partial Huang-Rhys factor.
    pub s: f64,
    pub hbar_omega_mev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineshapeSpec {
    pub zpl_ev: f64,
    pub modes: Vec<HrMode>,
    /// Gaussian σ of every replica, meV.
    pub broadening_mev: f64,
    /// Sampling step, meV.
    pub resolution_mev: f64,
}

impl LineshapeSpec {
    pub fn single_mode(zpl_ev: f64, s: f64, hbar_omega_mev: f64, broadening_mev: f64, resolution_mev: f64) -> Self {
        Self {
            zpl_ev,
            modes: vec![HrMode { s, hbar_omega_mev }],
            broadening_mev,
            resolution_mev,
        }
    }

    pub fn total_s(&self) -> f64 {
        self.modes.iter().map(|m| m.s).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.zpl_ev.is_finite() {
            return Err(Error::InvalidParameter("ZPL energy must be finite".into()));
        }
        for m in &self.modes {
            if !(m.s.is_finite() && m.s >= 0.0 && m.hbar_omega_mev.is_finite() && m.hbar_omega_mev > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "mode needs S >= 0 and hbar_omega > 0, got S = {}, hbar_omega = {}",
                    m.s, m.hbar_omega_mev
                )));
            }
        }
        if !(self.broadening_mev > 0.0 && self.broadening_mev.is_finite()) {
            return Err(Error::InvalidParameter("broadening must be positive".into()));
        }
        if !(self.resolution_mev > 0.0 && self.resolution_mev <= self.broadening_mev) {
            return Err(Error::InvalidParameter(format!(
                "resolution must be positive and no coarser than the broadening ({} meV)",
                self.broadening_mev
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TemperatureMode {
    #[default]
    ZeroK,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lineshape {
    /// Ascending photon energies, eV.
    pub energies_ev: Vec<f64>,
    /// Intensity per eV; Σ intensity·Δ = 1.
    pub intensities: Vec<f64>,
    /// e^{−ΣS}.
    pub zpl_weight: f64,
    /// (position eV, weight) of every retained replica; weights sum to 1.
    pub replicas: Vec<(f64, f64)>,
    /// Σ of the untruncated Poisson weights that were kept.
    pub retained_weight: f64,
}

impl Lineshape {
    pub fn step_ev(&self) -> f64 {
        match self.energies_ev.as_slice() {
            [a, b, ..] => b - a,
            _ => 0.0,
        }
    }

    pub fn area(&self) -> f64 {
        self.intensities.iter().sum::<f64>() * self.step_ev()
    }
}

const POISSON_TAIL: f64 = 1e-14;

/// Poisson weights e^{−S}S^k/k! up to the first k whose remaining tail is
/// below `POISSON_TAIL`.
fn poisson_weights(s: f64) -> Vec<f64> {
    let mut w = vec![(-s).exp()];
    let mut total = w[0];
    let mut k = 0usize;
    while 1.0 - total > POISSON_TAIL && k < 10_000 {
        k += 1;
        let next = w[k - 1] * s / k as f64;
        // past the mode and numerically gone
        if next == 0.0 {
            break;
        }
        w.push(next);
        total += next;
    }
    w
}

pub fn hr_lineshape(spec: &LineshapeSpec, _mode: TemperatureMode) -> Result<Lineshape> {
    spec.validate()?;
    let per_mode: Vec<Vec<f64>> = spec.modes.iter().map(|m| poisson_weights(m.s)).collect();

    // product over modes, pruning branches that cannot matter
    let mut replicas: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for (mode, weights) in spec.modes.iter().zip(&per_mode) {
        let mut next = Vec::with_capacity(replicas.len() * weights.len());
        for &(shift, w) in &replicas {
            for (k, wk) in weights.iter().enumerate() {
                let p = w * wk;
                if p > 1e-300 {
                    next.push((shift + k as f64 * mode.hbar_omega_mev, p));
                }
            }
        }
        replicas = next;
    }
    let retained: f64 = replicas.iter().map(|r| r.1).sum();

    let sigma = spec.broadening_mev;
    let max_shift = replicas.iter().fold(0.0f64, |m, r| m.max(r.0));
    let lo = -max_shift - 8.0 * sigma;
    let hi = 8.0 * sigma;
    let n = ((hi - lo) / spec.resolution_mev).ceil() as usize + 1;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());

    let mut intensities = vec![0.0; n];
    for &(shift, w) in &replicas {
        let w = w / retained;
        let center = -shift;
        let first = (((center - 8.0 * sigma) - lo) / spec.resolution_mev).floor().max(0.0) as usize;
        let last = ((((center + 8.0 * sigma) - lo) / spec.resolution_mev).ceil() as usize).min(n - 1);
        for (i, slot) in intensities.iter_mut().enumerate().take(last + 1).skip(first) {
            let e = lo + i as f64 * spec.resolution_mev;
            let z = (e - center) / sigma;
            *slot += w * norm * (-0.5 * z * z).exp();
        }
    }
    // per meV -> per eV
    let energies_ev: Vec<f64> = (0..n).map(|i| spec.zpl_ev + (lo + i as f64 * spec.resolution_mev) * 1e-3).collect();
    let intensities: Vec<f64> = intensities.into_iter().map(|v| v * 1e3).collect();

    Ok(Lineshape {
        energies_ev,
        intensities,
        zpl_weight: (-spec.total_s()).exp(),
        replicas: replicas
            .iter()
            .map(|&(shift, w)| (spec.zpl_ev - shift * 1e-3, w / retained))
            .collect(),
        retained_weight: retained,
    })
}

/// E(q|q+1) = E_tot(q) − E_tot(q+1) + corr(q) − corr(q+1), all in eV.
pub fn charge_transition_level(e_tot_q: f64, e_tot_q1: f64, corr_q: f64, corr_q1: f64) -> f64 {
    e_tot_q - e_tot_q1 + corr_q - corr_q1
}

/// One manifold's input to the ZPL correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZplInput {
    pub params: JahnTellerParams,
    /// meV, may be zero.
    pub lambda0: f64,
    pub cutoff: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZplCorrection {
    /// E₀ + E_JT − ħω of the ground manifold, meV.
    pub c_g: f64,
    pub c_u: f64,
    /// c_u − c_g, meV.
    pub delta_mev: f64,
}

/// E₀ + E_JT − ħω for one manifold: the lowest coupled level measured from
/// the classical APES minimum, less the 2D zero point.
pub fn vibronic_zpl_shift(input: &ZplInput) -> Result<f64> {
    if input.cutoff < djt::MIN_CUTOFF {
        return Err(Error::InvalidParameter(format!(
            "cutoff {} is below the minimum of {}",
            input.cutoff,
            djt::MIN_CUTOFF
        )));
    }
    let basis = VibronicBasis::new(input.cutoff, true);
    let sol = djt::solve_vibronic(&input.params, &SocParams::new(input.lambda0)?, &basis)?;
    let e_jt = observables_from_fg(&input.params)?.e_jt;
    Ok(sol.ground_energy() + e_jt - input.params.hbar_omega)
}

pub fn zpl_soc_correction(ground: &ZplInput, excited: &ZplInput) -> Result<ZplCorrection> {
    if ground.cutoff != excited.cutoff {
        return Err(Error::InvalidParameter(format!(
            "ground and excited manifolds solved at different cutoffs ({} vs {})",
            ground.cutoff, excited.cutoff
        )));
    }
    let c_g = vibronic_zpl_shift(ground)?;
    let c_u = vibronic_zpl_shift(excited)?;
    Ok(ZplCorrection {
        c_g,
        c_u,
        delta_mev: c_u - c_g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn inputs(ev: f64, mu: f64) -> LifetimeInputs {
        LifetimeInputs {
            refractive_index: DIAMOND_REFRACTIVE_INDEX,
            photon_energy_ev: ev,
            dipole_debye: mu,
        }
    }

    #[test]
    fn lifetime_power_laws() {
        let t = radiative_lifetime_ns(&inputs(2.0, 5.0)).unwrap();
        assert_relative_eq!(radiative_lifetime_ns(&inputs(2.0, 10.0)).unwrap(), t / 4.0, max_relative = 1e-13);
        assert_relative_eq!(radiative_lifetime_ns(&inputs(4.0, 5.0)).unwrap(), t / 8.0, max_relative = 1e-13);
        assert!(radiative_lifetime_ns(&inputs(1.68, 5.0)).unwrap() > radiative_lifetime_ns(&inputs(2.4, 5.0)).unwrap());
    }

    #[test]
    fn gev_dipole_inversion() {
        let mu = dipole_for_lifetime(DIAMOND_REFRACTIVE_INDEX, 2.06, 6.62).unwrap();
        // a few debye, as expected for an allowed intra-defect transition
        assert!(mu > 1.0 && mu < 20.0);
        let tau = radiative_lifetime_ns(&inputs(2.06, mu)).unwrap();
        assert_relative_eq!(tau, 6.62, max_relative = 1e-12);
        assert!(radiative_lifetime_ns(&inputs(2.06, -1.0)).is_err());
    }

    #[test]
    fn lifetime_magnitude() {
        // 1/τ = n ω³ μ²/(3π ε₀ ħ c³) for 1 eV, 1 D, n = 1: ≈ 1.06 μs
        let t = radiative_lifetime_ns(&LifetimeInputs { refractive_index: 1.0, photon_energy_ev: 1.0, dipole_debye: 1.0 }).unwrap();
        let omega: f64 = 1.602_176_634e-19 / 1.054_571_817e-34;
        let mu = 3.335_640_951_98e-30;
        let rate = omega.powi(3) * mu * mu / (3.0 * std::f64::consts::PI * 8.854_187_812_8e-12 * 1.054_571_817e-34 * 299_792_458.0f64.powi(3));
        assert_relative_eq!(t, 1e9 / rate, max_relative = 1e-12);
    }

    #[test]
    fn no_coupling_single_gaussian() {
        let ls = hr_lineshape(&LineshapeSpec::single_mode(1.7, 0.0, 60.0, 2.0, 0.1), TemperatureMode::ZeroK).unwrap();
        assert_eq!(ls.zpl_weight, 1.0);
        assert_eq!(ls.replicas.len(), 1);
        let peak = ls
            .intensities
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((ls.energies_ev[peak] - 1.7).abs() < 1e-9);
        assert!((ls.area() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn siv_zpl_fraction() {
        let ls = hr_lineshape(&LineshapeSpec::single_mode(1.68, 0.27, 85.2, 5.0, 0.5), TemperatureMode::ZeroK).unwrap();
        assert!((ls.zpl_weight - 0.763).abs() < 1e-3);
        assert!((ls.zpl_weight - (-0.27f64).exp()).abs() < 1e-15);
        assert!((ls.replicas[0].1 - ls.zpl_weight).abs() < 1e-12);
    }

    #[test]
    fn poisson_tail_cut() {
        let w = poisson_weights(1.6);
        assert!(1.0 - w.iter().sum::<f64>() <= 1e-14);
        assert!(w.len() < 30);
    }

    #[test]
    fn lineshape_validation() {
        assert!(hr_lineshape(&LineshapeSpec::single_mode(1.7, -0.1, 60.0, 2.0, 0.1), TemperatureMode::ZeroK).is_err());
        assert!(hr_lineshape(&LineshapeSpec::single_mode(1.7, 0.3, 60.0, 2.0, 3.0), TemperatureMode::ZeroK).is_err());
    }

    #[test]
    fn charge_level_arithmetic() {
        assert_eq!(charge_transition_level(5.0, 3.0, 0.0, 0.0), 2.0);
        assert_eq!(charge_transition_level(5.0, 3.0, 0.4, 0.4), 2.0);
        assert_eq!(charge_transition_level(3.0, 5.0, 0.1, 0.3), -charge_transition_level(5.0, 3.0, 0.3, 0.1));
    }

    #[test]
    fn zpl_correction_vanishes_without_coupling() {
        let p = JahnTellerParams::new(0.0, 0.0, 80.0).unwrap();
        let z = ZplInput { params: p, lambda0: 0.0, cutoff: 6 };
        let c = zpl_soc_correction(&z, &z).unwrap();
        assert!(c.delta_mev.abs() < 1e-12);
        assert!(c.c_g.abs() < 1e-12);
        let other = ZplInput { cutoff: 8, ..z };
        assert!(zpl_soc_correction(&z, &other).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn lineshape_area(s1 in 0.0f64..2.0, s2 in 0.0f64..1.0, w1 in 20.0f64..90.0, w2 in 20.0f64..90.0) {
            let spec = LineshapeSpec {
                zpl_ev: 2.0,
                modes: vec![HrMode { s: s1, hbar_omega_mev: w1 }, HrMode { s: s2, hbar_omega_mev: w2 }],
                broadening_mev: 4.0,
                resolution_mev: 0.5,
            };
            let ls = hr_lineshape(&spec, TemperatureMode::ZeroK).unwrap();
            prop_assert!((ls.area() - 1.0).abs() < 1e-6);
            prop_assert!((ls.replicas.iter().map(|r| r.1).sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!((ls.zpl_weight - (-(s1 + s2)).exp()).abs() < 1e-15);
        }

        #[test]
        fn lifetime_round_trip(ev in 1.0f64..3.0, mu in 0.5f64..20.0, n in 1.0f64..3.0) {
            let tau = radiative_lifetime_ns(&LifetimeInputs { refractive_index: n, photon_energy_ev: ev, dipole_debye: mu }).unwrap();
            let back = dipole_for_lifetime(n, ev, tau).unwrap();
            prop_assert!((back - mu).abs() <= 1e-12 * mu);
        }
    }
}
