//! Truncated vibronic product basis |orbital⟩ ⊗ |spin⟩ ⊗ |n, m⟩ and the
//! elementary operators acting on it.
//!
//! Ordering: the orbital index is outermost, spin is in the middle and the
//! two-mode oscillator state is innermost. Oscillator states are sorted by
//! total quanta n + m ascending and, within a shell, by n descending, so the
//! phonon index of |n, m⟩ is s(s+1)/2 + m with s = n + m.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix};

use crate::{Error, Result};

pub type C64 = Complex<f64>;

/// Occupation numbers of the x and y components of the E_g mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OscillatorState {
    pub n: usize,
    pub m: usize,
}

impl OscillatorState {
    pub fn quanta(&self) -> usize {
        self.n + self.m
    }

    /// Position of this state in the shell ordering.
    pub fn phonon_index(&self) -> usize {
        let s = self.quanta();
        s * (s + 1) / 2 + self.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Cartesian orbital components of the e doublet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orbital {
    Ex = 0,
    Ey = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up = 0,
    Down = 1,
}

impl Spin {
    pub fn sz(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub orbital: Orbital,
    /// `None` for a spinless basis.
    pub spin: Option<Spin>,
    pub phonon: OscillatorState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VibronicBasis {
    cutoff: usize,
    with_spin: bool,
    phonons: Vec<OscillatorState>,
}

/// Enumerate the product basis with n + m ≤ `cutoff`.
pub fn enumerate_basis(cutoff: usize, with_spin: bool) -> VibronicBasis {
    VibronicBasis::new(cutoff, with_spin)
}

impl VibronicBasis {
    pub fn new(cutoff: usize, with_spin: bool) -> Self {
        let mut phonons = Vec::with_capacity(Self::phonon_dim_for(cutoff));
        for s in 0..=cutoff {
            for n in (0..=s).rev() {
                phonons.push(OscillatorState { n, m: s - n });
            }
        }
        Self {
            cutoff,
            with_spin,
            phonons,
        }
    }

    pub fn phonon_dim_for(cutoff: usize) -> usize {
        (cutoff + 1) * (cutoff + 2) / 2
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn with_spin(&self) -> bool {
        self.with_spin
    }

    pub fn phonon_dim(&self) -> usize {
        self.phonons.len()
    }

    pub fn spin_dim(&self) -> usize {
        if self.with_spin {
            2
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.spin_dim() * self.phonon_dim()
    }

    pub fn phonons(&self) -> &[OscillatorState] {
        &self.phonons
    }

    pub fn state(&self, index: usize) -> BasisState {
        let nph = self.phonon_dim();
        let ns = self.spin_dim();
        assert!(index < self.dim(), "basis index {index} out of range");
        let phonon = self.phonons[index % nph];
        let rest = index / nph;
        let spin = if self.with_spin {
            Some(if rest.is_multiple_of(ns) { Spin::Up } else { Spin::Down })
        } else {
            None
        };
        let orbital = if rest / ns == 0 { Orbital::Ex } else { Orbital::Ey };
        BasisState {
            orbital,
            spin,
            phonon,
        }
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        if state.phonon.quanta() > self.cutoff || state.spin.is_some() != self.with_spin {
            return None;
        }
        let spin = state.spin.map_or(0, |s| s as usize);
        Some(
            ((state.orbital as usize) * self.spin_dim() + spin) * self.phonon_dim()
                + state.phonon.phonon_index(),
        )
    }

    pub fn states(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim()).map(|i| self.state(i))
    }

    /// Indices of the states carrying the given spin projection.
    pub fn spin_sector(&self, spin: Spin) -> Result<Vec<usize>> {
        if !self.with_spin {
            return Err(Error::BasisMismatch(
                "spin sector requested on a spinless basis".into(),
            ));
        }
        Ok((0..self.dim())
            .filter(|&i| self.state(i).spin == Some(spin))
            .collect())
    }

    /// Lift a phonon-sector matrix to the full space (identity on orbital and spin).
    pub fn embed_phonon(&self, phonon: &DMatrix<f64>) -> OperatorMatrix {
        self.embed(&DMatrix::identity(2, 2), phonon)
    }

    /// `orbital ⊗ 1_spin ⊗ phonon`.
    pub fn embed(&self, orbital: &DMatrix<f64>, phonon: &DMatrix<f64>) -> OperatorMatrix {
        let spin = DMatrix::<f64>::identity(self.spin_dim(), self.spin_dim());
        to_complex_op(&orbital.kronecker(&spin).kronecker(phonon))
    }

    fn embed_complex(
        &self,
        orbital: &DMatrix<C64>,
        spin: &DMatrix<C64>,
        phonon: &DMatrix<C64>,
    ) -> OperatorMatrix {
        OperatorMatrix(orbital.kronecker(spin).kronecker(phonon))
    }

    /// Annihilation operator of one mode in the phonon sector.
    pub fn phonon_annihilation(&self, axis: Axis) -> DMatrix<f64> {
        let d = self.phonon_dim();
        let mut a = DMatrix::zeros(d, d);
        for (col, st) in self.phonons.iter().enumerate() {
            let (q, lowered) = match axis {
                Axis::X if st.n > 0 => (st.n, OscillatorState { n: st.n - 1, m: st.m }),
                Axis::Y if st.m > 0 => (st.m, OscillatorState { n: st.n, m: st.m - 1 }),
                _ => continue,
            };
            a[(lowered.phonon_index(), col)] = (q as f64).sqrt();
        }
        a
    }

    /// (a† + a)/√2 in the phonon sector.
    pub fn phonon_position(&self, axis: Axis) -> DMatrix<f64> {
        let a = self.phonon_annihilation(axis);
        (a.transpose() + a) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// i(a† − a)/√2 in the phonon sector.
    pub fn phonon_momentum(&self, axis: Axis) -> DMatrix<C64> {
        let a = self.phonon_annihilation(axis);
        let diff = a.transpose() - a;
        diff.map(|v| C64::new(0.0, v * std::f64::consts::FRAC_1_SQRT_2))
    }

    /// a_x†a_x + a_y†a_y in the phonon sector.
    pub fn phonon_number(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.phonon_dim(),
            self.phonons.iter().map(|s| s.quanta() as f64),
        ))
    }
}

fn to_complex_op(m: &DMatrix<f64>) -> OperatorMatrix {
    OperatorMatrix(m.map(|v| C64::new(v, 0.0)))
}

/// Dense complex square matrix. Hamiltonians are in meV; everything else is
/// dimensionless.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix(pub DMatrix<C64>);

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Self {
        to_complex_op(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|v| v * s))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(self.0.map(|v| v * s))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }

    /// max|A − A†| / max|A| (0 for the zero matrix).
    pub fn hermiticity_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst / scale
    }

    pub fn is_exactly_hermitian(&self) -> bool {
        self.0.is_square() && self.0 == self.0.adjoint()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|v| v.im == 0.0)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// ⟨u|A|v⟩ for column vectors.
    pub fn matrix_element(&self, u: &nalgebra::DVector<C64>, v: &nalgebra::DVector<C64>) -> C64 {
        u.dotc(&(&self.0 * v))
    }

    pub fn expectation(&self, v: &nalgebra::DVector<C64>) -> f64 {
        self.matrix_element(v, v).re
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        OperatorMatrix(-&self.0)
    }
}

/// Matrix of (a_axis† + a_axis)/√2 on the full basis.
pub fn position_operator(axis: Axis, basis: &VibronicBasis) -> OperatorMatrix {
    basis.embed_phonon(&basis.phonon_position(axis))
}

pub fn annihilation_operator(axis: Axis, basis: &VibronicBasis) -> OperatorMatrix {
    basis.embed_phonon(&basis.phonon_annihilation(axis))
}

pub fn number_operator(basis: &VibronicBasis) -> OperatorMatrix {
    basis.embed_phonon(&basis.phonon_number())
}

pub fn pauli_x() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Orbital Pauli matrices in the Cartesian {e_x, e_y} basis, L_z = σ_y, and
/// S_z when the basis carries spin.
#[derive(Debug, Clone)]
pub struct AngularOperators {
    pub sigma_x: OperatorMatrix,
    pub sigma_y: OperatorMatrix,
    pub sigma_z: OperatorMatrix,
    pub l_z: OperatorMatrix,
    s_z: Option<OperatorMatrix>,
}

impl AngularOperators {
    pub fn s_z(&self) -> Result<&OperatorMatrix> {
        self.s_z.as_ref().ok_or_else(|| {
            Error::BasisMismatch("S_z requested on a spinless basis".into())
        })
    }

    /// L_z S_z on a spinful basis.
    pub fn lz_sz(&self) -> Result<OperatorMatrix> {
        Ok(&self.l_z * self.s_z()?)
    }
}

pub fn pauli_and_angular(basis: &VibronicBasis) -> AngularOperators {
    let ns = basis.spin_dim();
    let one_spin = DMatrix::<C64>::identity(ns, ns);
    let one_ph = DMatrix::<C64>::identity(basis.phonon_dim(), basis.phonon_dim());
    let lift = |orb: DMatrix<C64>| basis.embed_complex(&orb, &one_spin, &one_ph);
    let sigma_y = lift(pauli_y());
    let s_z = basis.with_spin().then(|| {
        let sz = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        basis.embed_complex(&DMatrix::identity(2, 2), &sz, &one_ph)
    });
    AngularOperators {
        sigma_x: lift(pauli_x()),
        l_z: sigma_y.clone(),
        sigma_y,
        sigma_z: lift(pauli_z()),
        s_z,
    }
}

/// Unitary whose columns are |e_+⟩ = (|e_x⟩ + i|e_y⟩)/√2 and |e_−⟩ =
/// (|e_x⟩ − i|e_y⟩)/√2, lifted to the full basis. Coefficients in the complex
/// orbital basis are obtained as U†ψ.
pub fn complex_orbital_unitary(basis: &VibronicBasis) -> OperatorMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u = DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(0.0, h), c(0.0, -h)]);
    let ns = basis.spin_dim();
    basis.embed_complex(
        &u,
        &DMatrix::identity(ns, ns),
        &DMatrix::identity(basis.phonon_dim(), basis.phonon_dim()),
    )
}
