//! Bundled per-defect parameters with a provenance tag on every number.
//!
//! Long-format TSV: `defect  manifold  field  value  provenance`, leading `#`
//! lines kept verbatim. Parsing then serializing reproduces a canonical file
//! byte for byte.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::apes::ApesObservables;
use crate::spin::EffectiveSpinParams;
use crate::units::thz_to_mev;
use crate::{Error, Result};

pub const BUNDLED_TSV: &str = include_str!("../data/xv_defects.tsv");
const COLUMNS: &str = "defect\tmanifold\tfield\tvalue\tprovenance";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Defect {
    SiV,
    GeV,
    SnV,
    PbV,
}

impl Defect {
    pub const ALL: [Defect; 4] = [Defect::SiV, Defect::GeV, Defect::SnV, Defect::PbV];

    pub fn name(self) -> &'static str {
        match self {
            Defect::SiV => "SiV",
            Defect::GeV => "GeV",
            Defect::SnV => "SnV",
            Defect::PbV => "PbV",
        }
    }
}

impl FromStr for Defect {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Defect::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown defect '{s}' (expected SiV, GeV, SnV or PbV)")))
    }
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Manifold {
    Ground,
    Excited,
    /// Whole-defect quantities.
    Defect,
}

impl Manifold {
    pub fn tag(self) -> &'static str {
        match self {
            Manifold::Ground => "g",
            Manifold::Excited => "u",
            Manifold::Defect => "-",
        }
    }
}

impl FromStr for Manifold {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g" | "G" => Ok(Manifold::Ground),
            "u" | "U" => Ok(Manifold::Excited),
            "-" => Ok(Manifold::Defect),
            _ => Err(Error::Config(format!("unknown manifold '{s}' (expected g or u)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    Table1,
    Table2,
    Table3,
    Table4,
    Text,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Table1 => "table1",
            Provenance::Table2 => "table2",
            Provenance::Table3 => "table3",
            Provenance::Table4 => "table4",
            Provenance::Text => "text",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            Provenance::Table1 => "Table I: computed ZPL energies (C2h average and with DJT+SOC), Huang-Rhys factors, experimental ZPL and S",
            Provenance::Table2 => "Table II: computed radiative lifetimes and observed PL lifetimes",
            Provenance::Table3 => "Table III: APES parameters, intrinsic spin-orbit coupling, Ham factor and ZFS",
            Provenance::Table4 => "Table IV: effective spin Hamiltonian parameters with scaled spin-orbit coupling",
            Provenance::Text => "value quoted in the running text",
        }
    }
}

impl FromStr for Provenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Provenance::Table1, Provenance::Table2, Provenance::Table3, Provenance::Table4, Provenance::Text]
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown provenance tag '{s}'")))
    }
}

/// Tag → description for every provenance tag.
pub fn citation_map() -> BTreeMap<&'static str, &'static str> {
    [Provenance::Table1, Provenance::Table2, Provenance::Table3, Provenance::Table4, Provenance::Text]
        .into_iter()
        .map(|p| (p.tag(), p.citation()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub defect: Defect,
    pub manifold: Manifold,
    pub field: String,
    pub quantity: Quantity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub comments: Vec<String>,
    pub rows: Vec<Row>,
}

impl Dataset {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TSV).expect("bundled dataset parses")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut comments = Vec::new();
        let mut rows = Vec::new();
        let mut seen_header = false;
        for (i, line) in text.lines().enumerate() {
            let no = i + 1;
            let err = |msg: String| Error::Dataset { line: no, msg };
            if !seen_header {
                if let Some(c) = line.strip_prefix('#') {
                    comments.push(c.to_string());
                    continue;
                }
                if line != COLUMNS {
                    return Err(err(format!("expected column header '{COLUMNS}'")));
                }
                seen_header = true;
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(err(format!("expected 5 tab-separated columns, got {}", cols.len())));
            }
            let value: f64 = cols[3]
                .parse()
                .map_err(|_| err(format!("bad number '{}'", cols[3])))?;
            let reparse = |e: Error| err(e.to_string());
            rows.push(Row {
                defect: cols[0].parse().map_err(reparse)?,
                manifold: cols[1].parse().map_err(reparse)?,
                field: cols[2].to_string(),
                quantity: Quantity {
                    value,
                    provenance: cols[4].parse().map_err(reparse)?,
                },
            });
        }
        if !seen_header {
            return Err(Error::Dataset {
                line: text.lines().count(),
                msg: "missing column header".into(),
            });
        }
        Ok(Self { comments, rows })
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push('#');
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(COLUMNS);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                r.defect,
                r.manifold.tag(),
                r.field,
                r.quantity.value,
                r.quantity.provenance.tag()
            ));
        }
        out
    }

    pub fn get(&self, defect: Defect, manifold: Manifold, field: &str) -> Option<Quantity> {
        self.rows
            .iter()
            .find(|r| r.defect == defect && r.manifold == manifold && r.field == field)
            .map(|r| r.quantity)
    }

    pub fn require(&self, defect: Defect, manifold: Manifold, field: &str) -> Result<Quantity> {
        self.get(defect, manifold, field).ok_or_else(|| {
            Error::Config(format!("dataset has no '{field}' for {defect} manifold {}", manifold.tag()))
        })
    }

    pub fn manifold(&self, defect: Defect, manifold: Manifold) -> Result<ManifoldRecord> {
        let q = |f: &str| self.require(defect, manifold, f);
        Ok(ManifoldRecord {
            lambda0_mev: q("lambda0_mev")?,
            lambda0_ghz: q("lambda0_ghz")?,
            e_jt_mev: q("e_jt_mev")?,
            delta_jt_mev: q("delta_jt_mev")?,
            hbar_omega_mev: q("hbar_omega_mev")?,
            p_ham: q("p_ham")?,
            lambda_ham_ghz: q("lambda_ham_ghz")?,
            lambda_ghz: q("lambda_ghz")?,
            lambda_exp_ghz: self.get(defect, manifold, "lambda_exp_ghz"),
            lambda0_thz: q("lambda0_thz")?,
            p32: q("p32")?,
            p12: q("p12")?,
            p: q("p")?,
            delta_p: q("delta_p")?,
            g_l: q("g_l")?,
            k_jt_ghz: q("k_jt_ghz")?,
            p_lambda0_ghz: q("p_lambda0_ghz")?,
            lambda_scaled_ghz: q("lambda_scaled_ghz")?,
            f: q("f")?,
            delta_f: q("delta_f")?,
        })
    }

    pub fn defect(&self, defect: Defect) -> Result<DefectRecord> {
        let q = |f: &str| self.require(defect, Manifold::Defect, f);
        let opt = |f: &str| self.get(defect, Manifold::Defect, f);
        Ok(DefectRecord {
            name: defect,
            zpl_c2h_ev: q("zpl_c2h_ev")?,
            zpl_soc_ev: q("zpl_soc_ev")?,
            s: q("s")?,
            zpl_exp_ev: opt("zpl_exp_ev"),
            s_exp: opt("s_exp"),
            tau_rad_ns: q("tau_rad_ns")?,
            tau_pl_ns: opt("tau_pl_ns"),
            ctl_ev: opt("ctl_2minus_minus_ev"),
            ground: self.manifold(defect, Manifold::Ground)?,
            excited: self.manifold(defect, Manifold::Excited)?,
        })
    }
}

/// One ²E manifold. Table III columns use the intrinsic λ₀; the Table IV
/// block uses the scaled λ₀ (`lambda0_thz`).
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldRecord {
    pub lambda0_mev: Quantity,
    pub lambda0_ghz: Quantity,
    pub e_jt_mev: Quantity,
    pub delta_jt_mev: Quantity,
    pub hbar_omega_mev: Quantity,
    pub p_ham: Quantity,
    pub lambda_ham_ghz: Quantity,
    pub lambda_ghz: Quantity,
    pub lambda_exp_ghz: Option<Quantity>,
    pub lambda0_thz: Quantity,
    pub p32: Quantity,
    pub p12: Quantity,
    pub p: Quantity,
    pub delta_p: Quantity,
    pub g_l: Quantity,
    pub k_jt_ghz: Quantity,
    pub p_lambda0_ghz: Quantity,
    pub lambda_scaled_ghz: Quantity,
    pub f: Quantity,
    pub delta_f: Quantity,
}

impl ManifoldRecord {
    pub fn observables(&self) -> ApesObservables {
        ApesObservables::new(self.e_jt_mev.value, self.delta_jt_mev.value, self.hbar_omega_mev.value)
    }

    pub fn scaled_lambda0_mev(&self) -> f64 {
        thz_to_mev(self.lambda0_thz.value)
    }

    /// Effective spin parameters exactly as tabulated (scaled λ₀ set).
    pub fn effective_spin(&self) -> Result<EffectiveSpinParams> {
        EffectiveSpinParams::new(self.lambda_scaled_ghz.value, self.f.value, self.delta_f.value, self.g_l.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectRecord {
    pub name: Defect,
    pub zpl_c2h_ev: Quantity,
    pub zpl_soc_ev: Quantity,
    pub s: Quantity,
    pub zpl_exp_ev: Option<Quantity>,
    pub s_exp: Option<Quantity>,
    pub tau_rad_ns: Quantity,
    pub tau_pl_ns: Option<Quantity>,
    /// (2−|−) charge transition level above the valence band maximum.
    pub ctl_ev: Option<Quantity>,
    pub ground: ManifoldRecord,
    pub excited: ManifoldRecord,
}

impl DefectRecord {
    /// Experimental ZPL where measured, computed ZPL(SOC) otherwise.
    pub fn best_zpl_ev(&self) -> f64 {
        self.zpl_exp_ev.unwrap_or(self.zpl_soc_ev).value
    }

    pub fn manifold(&self, m: Manifold) -> Result<&ManifoldRecord> {
        match m {
            Manifold::Ground => Ok(&self.ground),
            Manifold::Excited => Ok(&self.excited),
            Manifold::Defect => Err(Error::Config("a manifold (g or u) is required".into())),
        }
    }
}
