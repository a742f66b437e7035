mod common;

use approx::assert_relative_eq;
use common::{row, DEFECTS};
use nalgebra::Vector3;
use xvspin::spin::{
    build_effective, effective_levels, frame_components, thermal_population, zeeman_scan, EffectiveSpinParams,
    FieldSpec,
};
use xvspin::units::{G_S, MU_B_GHZ_PER_T};

fn tabulated(name: &str, m: &str) -> EffectiveSpinParams {
    let r = row(name, m);
    EffectiveSpinParams::new(r.lambda_scaled_ghz, r.f, r.delta_f, r.g_l).unwrap()
}

#[test]
fn hundred_field_on_111_axis() {
    let (bz, bperp, _) = frame_components(&FieldSpec::along_miller(1.0, [1, 0, 0]).unwrap());
    assert_relative_eq!(bz, 1.0 / 3f64.sqrt(), epsilon = 1e-12);
    assert_relative_eq!(bperp, (2.0f64 / 3.0).sqrt(), epsilon = 1e-12);
}

#[test]
fn zero_length_direction_rejected() {
    assert!(FieldSpec::new(1.0, Vector3::zeros(), Vector3::new(1.0, 1.0, 1.0)).is_err());
}

#[test]
fn pure_spin_zeeman_is_linear() {
    let p = EffectiveSpinParams::new(0.0, 0.0, 0.0, 0.5).unwrap();
    let dir = FieldSpec::along_miller(1.0, [1, 1, 0]).unwrap();
    let one = effective_levels(&p, &dir).unwrap().values;
    let two = effective_levels(&p, &dir.with_magnitude(2.0)).unwrap().values;
    for (a, b) in one.iter().zip(&two) {
        assert_relative_eq!(2.0 * a, *b, epsilon = 1e-12);
    }
    assert_relative_eq!(one[3] - one[0], G_S * MU_B_GHZ_PER_T, epsilon = 1e-12);
}

#[test]
fn parallel_field_slopes() {
    let p = EffectiveSpinParams::new(50.0, 0.1, 0.0, 0.328).unwrap();
    let levels = |b: f64| effective_levels(&p, &FieldSpec::along_miller(b, [1, 1, 1]).unwrap()).unwrap().values;
    // both fields below the first level crossing (~1.6 T)
    let (a, b) = (levels(0.1), levels(0.2));
    let mut slopes: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (y - x) / 0.1).collect();
    slopes.sort_by(f64::total_cmp);
    let mut expect: Vec<f64> = [1.0, -1.0]
        .iter()
        .flat_map(|lz| [0.5, -0.5].map(|sz| MU_B_GHZ_PER_T * (0.1 * lz + G_S * sz)))
        .collect();
    expect.sort_by(f64::total_cmp);
    for (s, e) in slopes.iter().zip(&expect) {
        assert_relative_eq!(s, e, epsilon = 1e-9);
    }
}

#[test]
fn zero_field_kramers_pairs() {
    for d in DEFECTS {
        let p = tabulated(d, "u");
        let v = effective_levels(&p, &FieldSpec::along_miller(0.0, [1, 0, 0]).unwrap()).unwrap().values;
        assert_relative_eq!(v[0], v[1], epsilon = 1e-12 * p.lambda);
        assert_relative_eq!(v[2], v[3], epsilon = 1e-12 * p.lambda);
        assert_relative_eq!(v[2] - v[0], p.lambda, epsilon = 1e-9 * p.lambda);
    }
}

#[test]
fn scan_is_continuous() {
    let set = zeeman_scan(&tabulated("SnV", "g"), &tabulated("SnV", "u"), 2.0, &FieldSpec::along_miller(1.0, [1, 0, 0]).unwrap(), 7.0, 140)
        .unwrap();
    assert_eq!(set.fields.len(), 141);
    let h = set.fields[1] - set.fields[0];
    for i in 1..set.fields.len() - 1 {
        for k in 0..4 {
            let jump = (set.ground[i + 1][k] - set.ground[i][k]).abs();
            let local = (set.ground[i][k] - set.ground[i - 1][k]).abs().max(MU_B_GHZ_PER_T * h);
            assert!(jump <= 10.0 * local, "B={} level {k}", set.fields[i]);
        }
    }
}

#[test]
fn pbv_zero_field_span() {
    let set = zeeman_scan(&tabulated("PbV", "g"), &tabulated("PbV", "u"), 2.4, &FieldSpec::along_miller(1.0, [1, 0, 0]).unwrap(), 1.0, 10)
        .unwrap();
    let lines = set.distinct_lines(0, 1e-6);
    assert_eq!(lines.len(), 4);
    assert_relative_eq!(lines[3] - lines[0], 11305.0, epsilon = 1e-9);
}

#[test]
fn thermal_occupation_of_pbv() {
    assert!(1.0 - thermal_population(4385.0, 4.0).unwrap() < 1e-20);
    let occ = thermal_population(4385.0, 77.0).unwrap();
    assert!((occ - 0.94).abs() < 0.01, "{occ}");
    assert!((thermal_population(4385.0, 1e9).unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn effective_matrix_traceless_with_strain() {
    let mut s = nalgebra::DMatrix::zeros(4, 4);
    s[(0, 2)] = xvspin::basis::C64::new(3.0, 1.0);
    s[(2, 0)] = xvspin::basis::C64::new(3.0, -1.0);
    let p = tabulated("GeV", "g").with_strain(s).unwrap();
    let h = build_effective(&p, &FieldSpec::along_miller(3.0, [1, 1, 0]).unwrap());
    assert!(h.trace().norm() < 1e-12);
    assert_eq!(h, h.adjoint());
}
