#![allow(dead_code)]

//! Reference values transcribed independently of data/xv_defects.tsv.

pub struct Row {
    pub name: &'static str,
    pub manifold: &'static str,
    // APES and intrinsic coupling
    pub lambda0_mev: f64,
    pub e_jt: f64,
    pub delta_jt: f64,
    pub hbar_omega: f64,
    pub p: f64,
    pub lambda_ham_ghz: f64,
    pub lambda_ghz: f64,
    // effective-Hamiltonian set with scaled coupling
    pub lambda0_thz: f64,
    pub p32: f64,
    pub p12: f64,
    pub p_exact: f64,
    pub delta_p: f64,
    pub g_l: f64,
    pub k_jt_ghz: f64,
    pub p_lambda0_ghz: f64,
    pub lambda_scaled_ghz: f64,
    pub f: f64,
    pub delta_f: f64,
}

macro_rules! row {
    ($n:expr, $m:expr, [$l0:expr, $e:expr, $d:expr, $w:expr, $p:expr, $lh:expr, $l:expr],
     [$thz:expr, $p32:expr, $p12:expr, $pe:expr, $dp:expr, $gl:expr, $k:expr, $pl:expr, $ls:expr, $f:expr, $df:expr]) => {
        Row {
            name: $n, manifold: $m,
            lambda0_mev: $l0, e_jt: $e, delta_jt: $d, hbar_omega: $w, p: $p, lambda_ham_ghz: $lh, lambda_ghz: $l,
            lambda0_thz: $thz, p32: $p32, p12: $p12, p_exact: $pe, delta_p: $dp, g_l: $gl, k_jt_ghz: $k,
            p_lambda0_ghz: $pl, lambda_scaled_ghz: $ls, f: $f, delta_f: $df,
        }
    };
}

pub const ROWS: [Row; 8] = [
    row!("SiV", "g", [0.82, 42.3, 3.0, 85.2, 0.308, 61.0, 61.0], [0.163, 0.311, 0.305, 0.308, 0.003, 0.328, 0.06, 50.0, 50.0, 0.1, 0.001]),
    row!("GeV", "g", [2.20, 30.1, 2.0, 82.2, 0.390, 207.0, 207.0], [0.465, 0.400, 0.380, 0.390, 0.010, 0.328, 0.11, 181.0, 181.0, 0.128, 0.003]),
    row!("SnV", "g", [8.28, 21.6, 1.6, 79.4, 0.472, 946.0, 945.0], [1.801, 0.513, 0.429, 0.471, 0.042, 0.328, 1.82, 848.0, 850.0, 0.154, 0.014]),
    row!("PbV", "g", [34.6, 15.6, 0.6, 74.9, 0.540, 4514.0, 4385.0], [8.361, 0.705, 0.284, 0.494, 0.211, 0.328, 252.0, 4133.0, 4385.0, 0.162, 0.069]),
    row!("SiV", "u", [6.96, 78.5, 2.7, 73.5, 0.128, 215.0, 215.0], [2.034, 0.156, 0.100, 0.128, 0.028, 0.782, 0.39, 260.0, 260.0, 0.1, 0.022]),
    row!("GeV", "u", [36.1, 85.7, 5.4, 73.0, 0.113, 987.0, 989.0], [9.877, 0.241, -0.014, 0.113, 0.128, 0.782, -2.91, 1123.0, 1120.0, 0.089, 0.100]),
    row!("SnV", "u", [96.8, 83.1, 6.8, 75.6, 0.125, 2897.0, 2925.0], [23.77, 0.429, -0.178, 0.125, 0.303, 0.782, 18.0, 2981.0, 3000.0, 0.098, 0.238]),
    row!("PbV", "u", [245.0, 91.6, 12.3, 78.6, 0.119, 7051.0, 6920.0], [59.30, 0.709, -0.500, 0.105, 0.604, 0.782, 689.0, 6231.0, 6920.0, 0.082, 0.473]),
];

pub fn row(name: &str, manifold: &str) -> &'static Row {
    ROWS.iter().find(|r| r.name == name && r.manifold == manifold).expect("known row")
}

pub const DEFECTS: [&str; 4] = ["SiV", "GeV", "SnV", "PbV"];
/// ZPL(C2h), ZPL(SOC) in eV and Huang-Rhys S.
pub const ZPL_C2H: [f64; 4] = [1.72, 2.15, 2.11, 2.45];
pub const ZPL_SOC: [f64; 4] = [1.70, 2.12, 2.09, 2.40];
pub const HUANG_RHYS: [f64; 4] = [0.27, 0.50, 0.89, 1.60];
pub const TAU_RAD_NS: [f64; 4] = [12.13, 6.62, 5.49, 2.88];

use xvspin::apes::{fg_from_observables, ApesObservables, JahnTellerParams};

impl Row {
    pub fn params(&self) -> JahnTellerParams {
        fg_from_observables(&ApesObservables::new(self.e_jt, self.delta_jt, self.hbar_omega)).unwrap()
    }

    pub fn label(&self) -> String {
        format!("{} {}", self.name, self.manifold)
    }
}
