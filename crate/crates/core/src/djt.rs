//! Exact diagonalization of the E⊗e dynamic Jahn-Teller Hamiltonian with and
//! without spin-orbit coupling, and the reduction factors derived from it.
//!
//! H_DJT = ħω(a_x†a_x + a_y†a_y + 1) + F(x̂σ_z − ŷσ_x) + G[(x̂² − ŷ²)σ_z + 2x̂ŷσ_x]
//! H_SOC = −λ₀ L_z S_z, with L_z = σ_y in the Cartesian orbital basis.
//!
//! Doublet labels follow the hole convention of the XV(−) manifolds: the lower
//! of the two lowest Kramers doublets is Γ = 3/2.

use nalgebra::{DMatrix, DVector};

use crate::apes::JahnTellerParams;
use crate::basis::{
    complex_orbital_unitary, pauli_and_angular, Orbital, OperatorMatrix, Spin, VibronicBasis, C64,
};
use crate::eigen::{self, Eigenpairs};
use crate::units::GHZ_PER_MEV;
use crate::{Error, Result};

pub const DEFAULT_CUTOFF: usize = 10;
/// Smallest cutoff accepted anywhere; below it even the ground doublet is junk.
pub const MIN_CUTOFF: usize = 4;
/// Smallest cutoff for the spinful reduction-factor extraction.
pub const MIN_EXACT_CUTOFF: usize = 8;

/// Intrinsic spin-orbit coupling λ₀ in meV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocParams {
    pub lambda0: f64,
}

impl SocParams {
    pub fn new(lambda0: f64) -> Result<Self> {
        if !lambda0.is_finite() || lambda0 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda0 must be finite and non-negative, got {lambda0}"
            )));
        }
        Ok(Self { lambda0 })
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.lambda0 * factor)
    }
}

/// Degeneracy threshold for a Hamiltonian of the given norm (meV).
pub fn degeneracy_tolerance(h_norm: f64) -> f64 {
    (1e-10 * h_norm).max(1e-9)
}

pub fn build_djt_hamiltonian(params: &JahnTellerParams, basis: &VibronicBasis) -> OperatorMatrix {
    let JahnTellerParams { f, g, hbar_omega } = *params;
    let nph = basis.phonon_dim();
    let x = basis.phonon_position(crate::basis::Axis::X);
    let y = basis.phonon_position(crate::basis::Axis::Y);
    let one_ph = DMatrix::<f64>::identity(nph, nph);
    let one_orb = DMatrix::<f64>::identity(2, 2);
    let sz = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);

    let oscillator = (basis.phonon_number() + &one_ph) * hbar_omega;
    let xx_yy = &x * &x - &y * &y;
    // x̂ŷ is not symmetric once the top shell is cut off
    let xy = (&x * &y + &y * &x) * 0.5;

    let h = basis.embed(&one_orb, &oscillator);
    let h = &h + &basis.embed(&sz, &x).scale(f);
    let h = &h - &basis.embed(&sx, &y).scale(f);
    let h = &h + &basis.embed(&sz, &xx_yy).scale(g);
    &h + &basis.embed(&sx, &xy).scale(2.0 * g)
}

/// −λ₀ L_z S_z on a spinful basis.
pub fn build_soc_hamiltonian(soc: &SocParams, basis: &VibronicBasis) -> Result<OperatorMatrix> {
    if !basis.with_spin() {
        return Err(Error::BasisMismatch(
            "spin-orbit Hamiltonian needs a spinful basis (use build_soc_spinless)".into(),
        ));
    }
    Ok(pauli_and_angular(basis).lz_sz()?.scale(-soc.lambda0))
}

/// (λ₀/2)σ_y on a spinless basis: the single-sector form of the hole-like
/// spin-orbit term.
pub fn build_soc_spinless(soc: &SocParams, basis: &VibronicBasis) -> Result<OperatorMatrix> {
    if basis.with_spin() {
        return Err(Error::BasisMismatch(
            "spinless spin-orbit helper used on a spinful basis".into(),
        ));
    }
    Ok(pauli_and_angular(basis).sigma_y.scale(0.5 * soc.lambda0))
}

fn spectral_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Spectrum of H_DJT alone on a spinless basis.
#[derive(Debug, Clone)]
pub struct DjtSpectrum {
    pub basis: VibronicBasis,
    pub params: JahnTellerParams,
    pub eigen: Eigenpairs,
}

impl DjtSpectrum {
    pub fn h_norm(&self) -> f64 {
        spectral_norm(&self.eigen.values)
    }
}

pub fn solve_djt(params: &JahnTellerParams, cutoff: usize) -> Result<DjtSpectrum> {
    params.validate()?;
    let basis = VibronicBasis::new(cutoff, false);
    let eigen = eigen::solve(&build_djt_hamiltonian(params, &basis))?;
    Ok(DjtSpectrum {
        basis,
        params: *params,
        eigen,
    })
}

/// Ham reduction factor from the ground vibronic doublet of H_DJT.
#[derive(Debug, Clone)]
pub struct HamFactor {
    /// Σ(|c_nm|² − |d_nm|²) from the expansion in {e_+, e_−} ⊗ |n, m⟩.
    pub p: f64,
    /// √(Tr(P L_z P L_z)/2) over the doublet projector P.
    pub p_trace: f64,
    /// Coefficients on |e_+⟩|n,m⟩ and |e_−⟩|n,m⟩ of the L_z-diagonal member,
    /// indexed like `basis.phonons()`.
    pub c: Vec<C64>,
    pub d: Vec<C64>,
    pub ground_energy: f64,
    /// Energy gap from the ground doublet to the next level.
    pub gap: f64,
}

pub fn ham_factor_perturbative(spectrum: &DjtSpectrum) -> Result<HamFactor> {
    let basis = &spectrum.basis;
    if basis.with_spin() {
        return Err(Error::BasisMismatch("perturbative Ham factor expects a spinless solve".into()));
    }
    let vals = &spectrum.eigen.values;
    if vals.len() < 3 {
        return Err(Error::Doublet("basis too small to isolate the ground doublet".into()));
    }
    let tol = degeneracy_tolerance(spectrum.h_norm());
    if (vals[1] - vals[0]).abs() > tol {
        return Err(Error::Doublet(format!(
            "ground level is not a doublet (splitting {:.3e} meV)",
            vals[1] - vals[0]
        )));
    }
    let gap = vals[2] - vals[1];
    if gap <= tol {
        return Err(Error::Doublet(format!(
            "ground doublet not separated from the next level (gap {gap:.3e} meV)"
        )));
    }

    let ops = pauli_and_angular(basis);
    let v0 = spectrum.eigen.vector(0);
    let v1 = spectrum.eigen.vector(1);
    let lz = &ops.l_z;
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            lz.matrix_element(&v0, &v0),
            lz.matrix_element(&v0, &v1),
            lz.matrix_element(&v1, &v0),
            lz.matrix_element(&v1, &v1),
        ],
    );
    let frob2: f64 = m.iter().map(|c| c.norm_sqr()).sum();
    let p_trace = (0.5 * frob2).sqrt();

    // member of the doublet with L_z-projection +p
    let restricted = eigen::solve(&OperatorMatrix(m))?;
    let u = restricted.vector(1);
    let psi: DVector<C64> = v0 * u[0] + v1 * u[1];
    let coeffs = complex_orbital_unitary(basis).0.adjoint() * psi;

    let nph = basis.phonon_dim();
    let plus = Orbital::Ex as usize * nph;
    let minus = Orbital::Ey as usize * nph;
    let c: Vec<C64> = (0..nph).map(|k| coeffs[plus + k]).collect();
    let d: Vec<C64> = (0..nph).map(|k| coeffs[minus + k]).collect();
    let p = c.iter().map(|z| z.norm_sqr()).sum::<f64>() - d.iter().map(|z| z.norm_sqr()).sum::<f64>();

    Ok(HamFactor {
        p,
        p_trace,
        c,
        d,
        ground_energy: vals[0],
        gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gamma {
    ThreeHalves,
    OneHalf,
}

/// One Kramers pair of the spinful solve.
#[derive(Debug, Clone)]
pub struct Doublet {
    /// Index of the spin-up member in `VibronicSolution::eigenvalues`.
    pub up: usize,
    pub down: usize,
    /// Mean energy of the pair, meV.
    pub energy: f64,
    /// |E_up − E_down|, meV.
    pub kramers_split: f64,
    /// Tr(P L_z S_z) over the pair, i.e. 2⟨L_z S_z⟩ of either member.
    pub trace_lzsz: f64,
    pub gamma: Option<Gamma>,
}

#[derive(Debug, Clone)]
pub struct VibronicSolution {
    pub basis: VibronicBasis,
    pub params: JahnTellerParams,
    pub soc: SocParams,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<C64>,
    /// Spin sector of each eigenvector.
    pub spins: Vec<Spin>,
    pub doublets: Vec<Doublet>,
    pub h_norm: f64,
}

impl VibronicSolution {
    pub fn vector(&self, k: usize) -> DVector<C64> {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// 2⟨L_z S_z⟩ of eigenvector `k`.
    pub fn two_lzsz(&self, k: usize) -> f64 {
        2.0 * self.spins[k].sz() * expect_sigma_y(&self.basis, &self.vector(k))
    }

    /// Largest norm an eigenvector carries in the opposite spin sector.
    pub fn spin_leakage(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.eigenvalues.len() {
            let v = self.eigenvectors.column(k);
            let wrong: f64 = (0..v.len())
                .filter(|&i| self.basis.state(i).spin != Some(self.spins[k]))
                .map(|i| v[i].norm_sqr())
                .sum();
            worst = worst.max(wrong.sqrt());
        }
        worst
    }

    /// max |E_up − E_down| / ‖H‖ over all Kramers pairs.
    pub fn max_kramers_defect(&self) -> f64 {
        let scale = self.h_norm.max(f64::MIN_POSITIVE);
        self.doublets
            .iter()
            .map(|d| d.kramers_split / scale)
            .fold(0.0, f64::max)
    }

    pub fn doublet_of(&self, gamma: Gamma) -> Option<&Doublet> {
        self.doublets.iter().find(|d| d.gamma == Some(gamma))
    }
}

/// ⟨v|σ_y|v⟩ = 2 Σ Im(v̄_x v_y), using the orbital-outermost layout.
fn expect_sigma_y(basis: &VibronicBasis, v: &DVector<C64>) -> f64 {
    let half = basis.dim() / 2;
    2.0 * (0..half).map(|i| (v[i].conj() * v[half + i]).im).sum::<f64>()
}

/// Diagonalize H_DJT + H_SOC on a spinful basis, one S_z sector at a time.
pub fn solve_vibronic(
    params: &JahnTellerParams,
    soc: &SocParams,
    basis: &VibronicBasis,
) -> Result<VibronicSolution> {
    params.validate()?;
    let h_soc = build_soc_hamiltonian(soc, basis)?;
    let h = &build_djt_hamiltonian(params, basis) + &h_soc;

    let up_idx = basis.spin_sector(Spin::Up)?;
    let down_idx = basis.spin_sector(Spin::Down)?;
    let sectors = eigen::solve_blocks(&h, &[up_idx, down_idx])?;
    let (up, down) = (&sectors[0], &sectors[1]);
    let h_norm = spectral_norm(&up.values).max(spectral_norm(&down.values));

    // Kramers partners: time reversal maps the up sector onto the down sector,
    // so the k-th level of each sector belong together.
    let mut entries: Vec<(f64, Spin, usize)> = Vec::with_capacity(basis.dim());
    for k in 0..up.len() {
        entries.push((up.values[k], Spin::Up, k));
        entries.push((down.values[k], Spin::Down, k));
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1 as u8).cmp(&(b.1 as u8))));

    let n = basis.dim();
    let mut eigenvectors = DMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut spins = Vec::with_capacity(n);
    let mut position = vec![[0usize; 2]; up.len()];
    for (g, &(e, spin, k)) in entries.iter().enumerate() {
        let src = if spin == Spin::Up { up } else { down };
        eigenvectors.set_column(g, &src.vectors.column(k));
        eigenvalues.push(e);
        spins.push(spin);
        position[k][spin as usize] = g;
    }

    let pairing_tol = 1e-8 * h_norm.max(1.0);
    let mut doublets = Vec::with_capacity(up.len());
    for (k, pos) in position.iter().enumerate() {
        let split = (up.values[k] - down.values[k]).abs();
        if split > pairing_tol {
            return Err(Error::Doublet(format!(
                "Kramers partners {k} split by {split:.3e} meV"
            )));
        }
        let tr = 0.5 * expect_sigma_y(basis, &up.vector(k)) - 0.5 * expect_sigma_y(basis, &down.vector(k));
        doublets.push(Doublet {
            up: pos[0],
            down: pos[1],
            energy: 0.5 * (up.values[k] + down.values[k]),
            kramers_split: split,
            trace_lzsz: tr,
            gamma: None,
        });
    }

    if soc.lambda0 > 0.0 && doublets.len() >= 2 {
        let gap = doublets[1].energy - doublets[0].energy;
        if gap > degeneracy_tolerance(h_norm) && gap > 1e-12 * soc.lambda0 {
            doublets[0].gamma = Some(Gamma::ThreeHalves);
            doublets[1].gamma = Some(Gamma::OneHalf);
        }
    }

    Ok(VibronicSolution {
        basis: basis.clone(),
        params: *params,
        soc: *soc,
        eigenvalues,
        eigenvectors,
        spins,
        doublets,
        h_norm,
    })
}

/// Reduction factors of the lowest two Kramers doublets. Energies in meV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionFactors {
    pub p32: f64,
    pub p12: f64,
    pub p: f64,
    pub delta_p: f64,
    pub k_jt: f64,
    /// E(1/2) − E(3/2).
    pub lambda_zfs: f64,
    /// p_perturbative · λ₀.
    pub lambda_ham: f64,
    pub p_perturbative: f64,
    /// (p32 − p12)·λ₀/4; reported, never added to λ.
    pub offset: f64,
    pub e32: f64,
    pub e12: f64,
    pub lambda0: f64,
}

impl ReductionFactors {
    pub fn lambda_zfs_ghz(&self) -> f64 {
        self.lambda_zfs * GHZ_PER_MEV
    }

    pub fn k_jt_ghz(&self) -> f64 {
        self.k_jt * GHZ_PER_MEV
    }

    pub fn lambda_ham_ghz(&self) -> f64 {
        self.lambda_ham * GHZ_PER_MEV
    }

    /// λ_zfs − (p λ₀ + K_JT), relative to λ_zfs.
    pub fn identity_defect(&self) -> f64 {
        (self.lambda_zfs - (self.p * self.lambda0 + self.k_jt)).abs() / self.lambda_zfs.abs()
    }
}

fn check_exact_inputs(soc: &SocParams, basis: &VibronicBasis) -> Result<()> {
    if !basis.with_spin() {
        return Err(Error::BasisMismatch("exact factors need a spinful basis".into()));
    }
    if basis.cutoff() < MIN_EXACT_CUTOFF {
        return Err(Error::InvalidParameter(format!(
            "cutoff {} is below the minimum of {MIN_EXACT_CUTOFF}",
            basis.cutoff()
        )));
    }
    if soc.lambda0 <= 0.0 {
        return Err(Error::InvalidParameter(
            "lambda0 must be positive to label the Γ = 3/2 and 1/2 doublets".into(),
        ));
    }
    Ok(())
}

pub fn exact_factors(
    params: &JahnTellerParams,
    soc: &SocParams,
    basis: &VibronicBasis,
) -> Result<ReductionFactors> {
    check_exact_inputs(soc, basis)?;
    let sol = solve_vibronic(params, soc, basis)?;
    let d32 = sol.doublet_of(Gamma::ThreeHalves);
    let d12 = sol.doublet_of(Gamma::OneHalf);
    let (d32, d12) = match (d32, d12) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Doublet(format!(
                "lowest doublets are not resolved (gap {:.3e} meV at lambda0 = {} meV)",
                sol.doublets[1].energy - sol.doublets[0].energy,
                soc.lambda0
            )))
        }
    };

    let h_djt = build_djt_hamiltonian(params, basis);
    let trace_h = |d: &Doublet| h_djt.expectation(&sol.vector(d.up)) + h_djt.expectation(&sol.vector(d.down));

    let p32 = d32.trace_lzsz;
    let p12 = -d12.trace_lzsz;
    let k_jt = 0.5 * (trace_h(d12) - trace_h(d32));
    let p_pert = ham_factor_perturbative(&solve_djt(params, basis.cutoff())?)?.p;

    Ok(ReductionFactors {
        p32,
        p12,
        p: 0.5 * (p32 + p12),
        delta_p: 0.5 * (p32 - p12),
        k_jt,
        lambda_zfs: d12.energy - d32.energy,
        lambda_ham: p_pert * soc.lambda0,
        p_perturbative: p_pert,
        offset: 0.25 * (p32 - p12) * soc.lambda0,
        e32: d32.energy,
        e12: d12.energy,
        lambda0: soc.lambda0,
    })
}

/// One state of the ⟨L_z S_z⟩-resolved spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LzSzRow {
    pub doublet: usize,
    /// 2⟨L_z S_z⟩ of this state.
    pub two_lzsz: f64,
    /// E − E₀, meV.
    pub energy: f64,
    pub spin: Spin,
}

/// Lowest `k` doublets as (2⟨L_z S_z⟩, E − E₀), two rows (↑ then ↓) per doublet.
pub fn lzsz_spectrum(
    params: &JahnTellerParams,
    soc: &SocParams,
    basis: &VibronicBasis,
    k: usize,
) -> Result<Vec<LzSzRow>> {
    check_exact_inputs(soc, basis)?;
    if k > basis.dim() / 2 {
        return Err(Error::InvalidParameter(format!(
            "requested {k} doublets but the basis holds {}",
            basis.dim() / 2
        )));
    }
    let sol = solve_vibronic(params, soc, basis)?;
    let e0 = sol.ground_energy();
    let mut rows = Vec::with_capacity(2 * k);
    for (i, d) in sol.doublets.iter().take(k).enumerate() {
        for idx in [d.up, d.down] {
            rows.push(LzSzRow {
                doublet: i,
                two_lzsz: sol.two_lzsz(idx),
                energy: sol.eigenvalues[idx] - e0,
                spin: sol.spins[idx],
            });
        }
    }
    Ok(rows)
}
