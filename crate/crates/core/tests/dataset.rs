mod common;

use common::{Row, DEFECTS, HUANG_RHYS, ROWS, TAU_RAD_NS, ZPL_C2H, ZPL_SOC};
use xvspin::dataset::{Dataset, Defect, Manifold, ManifoldRecord, Provenance};

fn record(r: &Row) -> ManifoldRecord {
    let m = if r.manifold == "g" { Manifold::Ground } else { Manifold::Excited };
    Dataset::bundled().manifold(r.name.parse().unwrap(), m).unwrap()
}

#[test]
fn bundle_matches_independent_transcription() {
    for r in &ROWS {
        let rec = record(r);
        let pairs = [
            (rec.lambda0_mev.value, r.lambda0_mev),
            (rec.e_jt_mev.value, r.e_jt),
            (rec.delta_jt_mev.value, r.delta_jt),
            (rec.hbar_omega_mev.value, r.hbar_omega),
            (rec.p_ham.value, r.p),
            (rec.lambda_ham_ghz.value, r.lambda_ham_ghz),
            (rec.lambda_ghz.value, r.lambda_ghz),
            (rec.lambda0_thz.value, r.lambda0_thz),
            (rec.p32.value, r.p32),
            (rec.p12.value, r.p12),
            (rec.p.value, r.p_exact),
            (rec.delta_p.value, r.delta_p),
            (rec.g_l.value, r.g_l),
            (rec.k_jt_ghz.value, r.k_jt_ghz),
            (rec.p_lambda0_ghz.value, r.p_lambda0_ghz),
            (rec.lambda_scaled_ghz.value, r.lambda_scaled_ghz),
            (rec.f.value, r.f),
            (rec.delta_f.value, r.delta_f),
        ];
        for (k, (got, want)) in pairs.iter().enumerate() {
            assert_eq!(got, want, "{} field #{k}", r.label());
        }
        assert_eq!(rec.e_jt_mev.provenance, Provenance::Table3);
        assert_eq!(rec.p32.provenance, Provenance::Table4);
    }
}

#[test]
fn defect_level_values() {
    let ds = Dataset::bundled();
    for (i, d) in DEFECTS.iter().enumerate() {
        let rec = ds.defect(d.parse::<Defect>().unwrap()).unwrap();
        assert_eq!(rec.zpl_c2h_ev.value, ZPL_C2H[i]);
        assert_eq!(rec.zpl_soc_ev.value, ZPL_SOC[i]);
        assert_eq!(rec.s.value, HUANG_RHYS[i]);
        assert_eq!(rec.tau_rad_ns.value, TAU_RAD_NS[i]);
        assert_eq!(rec.tau_rad_ns.provenance, Provenance::Table2);
    }
    assert!(ds.defect(Defect::PbV).unwrap().ground.lambda_exp_ghz.is_none());
}

#[test]
fn file_on_disk_equals_bundle() {
    let disk = Dataset::load(std::path::Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/data/xv_defects.tsv"))).unwrap();
    assert_eq!(disk, Dataset::bundled());
}
