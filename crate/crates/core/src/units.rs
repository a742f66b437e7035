//! Unit conversions and physical constants. Energies inside the solvers are in
//! meV; the spin Hamiltonian works in GHz.

/// 1 meV expressed in GHz (E/h).
pub const GHZ_PER_MEV: f64 = 241.79892;

/// Bohr magneton over Planck's constant, GHz per tesla.
pub const MU_B_GHZ_PER_T: f64 = 13.9962;

/// Free-electron g-factor.
pub const G_S: f64 = 2.0023;

/// h / k_B in kelvin per GHz.
pub const KELVIN_PER_GHZ: f64 = 0.047_992_430_7;

pub const HBAR_J_S: f64 = 1.054_571_817e-34;
pub const EPSILON0_F_PER_M: f64 = 8.854_187_812_8e-12;
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;
/// 1 debye in C·m.
pub const DEBYE_C_M: f64 = 3.335_640_951_98e-30;

pub fn mev_to_ghz(mev: f64) -> f64 {
    mev * GHZ_PER_MEV
}

pub fn ghz_to_mev(ghz: f64) -> f64 {
    ghz / GHZ_PER_MEV
}

pub fn thz_to_mev(thz: f64) -> f64 {
    thz * 1000.0 / GHZ_PER_MEV
}

pub fn mev_to_thz(mev: f64) -> f64 {
    mev * GHZ_PER_MEV / 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyUnit {
    MeV,
    GHz,
}

impl EnergyUnit {
    /// Convert a value in meV into this unit.
    pub fn from_mev(self, mev: f64) -> f64 {
        match self {
            EnergyUnit::MeV => mev,
            EnergyUnit::GHz => mev_to_ghz(mev),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EnergyUnit::MeV => "meV",
            EnergyUnit::GHz => "GHz",
        }
    }
}

impl std::str::FromStr for EnergyUnit {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mev" => Ok(EnergyUnit::MeV),
            "ghz" => Ok(EnergyUnit::GHz),
            _ => Err(crate::Error::Config(format!(
                "unknown energy unit '{s}' (expected meV or GHz)"
            ))),
        }
    }
}
