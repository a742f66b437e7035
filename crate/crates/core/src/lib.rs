//! Spin-orbit and dynamic Jahn-Teller modeling of group-IV vacancy (SiV, GeV,
//! SnV, PbV) color centers in diamond.
//!
//! The crate is organized bottom-up:
//!
//! * [`basis`]: truncated |orbital⟩⊗|spin⟩⊗|n,m⟩ product basis and the
//!   elementary operators acting on it.
//! * [`apes`]: conversion between the {F, G} and {E_JT, δ_JT} descriptions of
//!   the E⊗e adiabatic potential energy surface.
//! * [`eigen`]: dense Hermitian eigensolver used by everything above it.
//! * [`djt`]: exact diagonalization of the coupled Jahn-Teller + spin-orbit
//!   problem and extraction of the reduction factors.
//! * [`spin`]: 4×4 effective spin Hamiltonian and Zeeman scans.
//! * [`photophysics`]: lifetimes, Huang-Rhys lineshapes, charge transition
//!   levels and the vibronic ZPL correction.
//! * [`fitting`]: finite-size extrapolation of the intrinsic spin-orbit
//!   coupling.
//! * [`dataset`], [`config`], [`cli`]: bundled defect data and the command
//!   line front end.

pub mod apes;
pub mod basis;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod djt;
pub mod eigen;
pub mod error;
pub mod fitting;
pub mod photophysics;
pub mod spin;
pub mod units;

pub use error::{Error, Result};
