use std::f64::consts::PI;

use casimir_core::consts::{K_B, ZETA_3};
use casimir_core::thermo::{
    default_dt, drude_entropy_deficit_oracle, entropy, nernst_scan, pressure, standard_comparison,
    thermal_correction,
};
use casimir_core::{CoefficientFamily, MaterialModel, PlateSystem, QuadratureSpec};

fn unit(a: f64) -> f64 {
    K_B * ZETA_3 / (16.0 * PI * a * a)
}

const LOW_GRID: [f64; 4] = [40.0, 20.0, 10.0, 5.0];

#[test]
fn drude_entropy_negative_at_low_temperature() {
    let fam = CoefficientFamily::dielectric(MaterialModel::gold());
    for a in [0.5e-6, 1e-6] {
        let scan = nernst_scan(a, &fam, &QuadratureSpec::precise(), &LOW_GRID).unwrap();
        assert!(scan.entropy[scan.entropy.len() - 1] < 0.0);
        assert!(scan.extrapolated_s0 < 0.0);
    }
}

#[test]
fn ideal_and_impedance_entropy_vanish_at_zero_temperature() {
    let a = 1e-6;
    for fam in [
        CoefficientFamily::impedance(MaterialModel::ideal_metal()),
        CoefficientFamily::impedance(MaterialModel::gold_plasma()),
    ] {
        let scan = nernst_scan(a, &fam, &QuadratureSpec::precise(), &LOW_GRID).unwrap();
        assert!(scan.extrapolated_s0.abs() < 0.05 * unit(a), "{scan:?}");
        assert!(scan.entropy.iter().all(|&s| s > 0.0));
        assert!(scan.entropy.windows(2).all(|w| w[0] > w[1]));
    }
}

#[test]
fn deficit_oracle_matches_drude_extrapolation_when_relaxation_is_slow() {
    // gamma far below xi_1(5 K) ≈ 4e12 rad/s: the l >= 1 terms coincide with
    // the plasma model and the only difference is the static TE term
    let a = 1e-6;
    let m = MaterialModel::drude(1.37e16, 1e10).unwrap();
    let spec = QuadratureSpec::precise();
    let scan = nernst_scan(
        a,
        &CoefficientFamily::dielectric(m.clone()),
        &spec,
        &LOW_GRID,
    )
    .unwrap();
    let oracle = drude_entropy_deficit_oracle(a, &m, &spec).unwrap();
    assert!(scan.extrapolated_s0 < 0.0);
    assert!(
        (scan.extrapolated_s0.abs() / oracle - 1.0).abs() < 0.01,
        "{} vs {oracle}",
        scan.extrapolated_s0
    );
}

#[test]
fn richardson_pair_agrees_above_a_few_kelvin() {
    let fam = CoefficientFamily::impedance(MaterialModel::gold_plasma());
    let spec = QuadratureSpec::precise();
    for a in [0.3e-6, 1e-6] {
        for t in [5.0, 20.0, 77.0, 150.0, 300.0] {
            let sys = PlateSystem::new(a, t).unwrap();
            let d = entropy(&sys, &fam, &spec, default_dt(t)).unwrap();
            assert!(
                (d.coarse - d.fine).abs() <= 0.01 * d.value.abs(),
                "a={a} T={t}: {d:?}"
            );
        }
    }
}

#[test]
fn thermal_corrections_separate_the_families() {
    let sys = PlateSystem::new(300e-9, 300.0).unwrap();
    let spec = QuadratureSpec::default();
    let drude = thermal_correction(
        &sys,
        &CoefficientFamily::dielectric(MaterialModel::gold()),
        &spec,
    )
    .unwrap();
    let imp = thermal_correction(
        &sys,
        &CoefficientFamily::impedance(MaterialModel::gold_plasma()),
        &spec,
    )
    .unwrap();
    let ideal = thermal_correction(
        &sys,
        &CoefficientFamily::impedance(MaterialModel::ideal_metal()),
        &spec,
    )
    .unwrap();
    assert!(imp.ratio < 0.01);
    assert!(drude.ratio > 10.0 * imp.ratio);
    assert!(ideal.ratio < 0.01);
    // the Drude free energy loses magnitude at finite T
    assert!(drude.correction > 0.0);
}

#[test]
fn comparison_report_is_ordered() {
    let sys = PlateSystem::new(300e-9, 300.0).unwrap();
    let r = standard_comparison(&sys, &MaterialModel::gold(), &QuadratureSpec::default()).unwrap();
    assert_eq!(r.models.len(), 3);
    assert!(r.models[0].correction_ratio > r.models[1].correction_ratio);
}

#[test]
fn pressure_scaling_at_zero_temperature() {
    let fam = CoefficientFamily::impedance(MaterialModel::ideal_metal());
    let spec = QuadratureSpec::precise();
    let p1 = pressure(&PlateSystem::new(1e-6, 0.0).unwrap(), &fam, &spec, 5e-9).unwrap();
    assert!((p1.value / -1.300e-3 - 1.0).abs() < 5e-3);
    let p2 = pressure(&PlateSystem::new(2e-6, 0.0).unwrap(), &fam, &spec, 1e-8).unwrap();
    assert!((p2.value * 16.0 / p1.value - 1.0).abs() < 1e-6);
}

#[test]
fn finite_temperature_pressure_is_attractive() {
    let spec = QuadratureSpec::precise();
    for fam in [
        CoefficientFamily::dielectric(MaterialModel::gold()),
        CoefficientFamily::impedance(MaterialModel::gold_plasma()),
    ] {
        let sys = PlateSystem::new(0.5e-6, 300.0).unwrap();
        assert!(pressure(&sys, &fam, &spec, 2.5e-9).unwrap().value < 0.0);
    }
}
