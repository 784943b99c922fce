use casimir_core::reflection::{
    delta_infinity, delta_par, delta_perp, r2_dielectric, r2_impedance, CoefficientFamily,
    FrequencySlice,
};
use casimir_core::{MaterialModel, PlateSystem, Polarization};
use proptest::prelude::*;

fn polarization() -> impl Strategy<Value = Polarization> {
    prop_oneof![
        Just(Polarization::Parallel),
        Just(Polarization::Perpendicular)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn mode_function_ratio_matches_reflection_form(
        x in 0.0f64..=1.0,
        u in 0.0f64..=1.0,
        y in 0.01f64..=50.0,
        pol in polarization(),
    ) {
        // zeta/y in [max(x, 0.01), 1] keeps the impedance within [0, 1]
        let ratio = (x + (1.0 - x) * u).max(0.01);
        let zeta = ratio * y;
        let z = match pol {
            Polarization::Parallel => x / ratio,
            Polarization::Perpendicular => x * ratio,
        };
        let slice = FrequencySlice::Impedance { zeta, z };
        let delta = match pol {
            Polarization::Parallel => delta_par(y, x),
            Polarization::Perpendicular => delta_perp(y, x),
        };
        let r = slice.reflectivity(pol, y);
        let lhs = delta / delta_infinity(x, pol);
        let rhs = 1.0 - r.r2 * (-y).exp();
        prop_assert!((lhs - rhs).abs() <= 1e-12, "x={x} y={y}: {lhs} vs {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn coefficients_stay_in_unit_interval(
        log_chi in -6.0f64..12.0,
        z in 0.0f64..=1.0,
        zeta in 1e-3f64..40.0,
        extra in 0.0f64..60.0,
    ) {
        let y = zeta + extra;
        let chi = 10f64.powf(log_chi);
        for slice in [FrequencySlice::Dielectric { zeta, chi }, FrequencySlice::Impedance { zeta, z }] {
            for r in slice.reflectivities(y) {
                prop_assert!((0.0..=1.0).contains(&r.r2));
                prop_assert!((0.0..=1.0).contains(&r.complement));
                prop_assert!((r.r2 + r.complement - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn material_coefficients_in_unit_interval(
        l in 0u64..50,
        log_k in 2.0f64..9.0,
        log_a in -8.0f64..-4.0,
        t in 1.0f64..1000.0,
    ) {
        let sys = PlateSystem::new(10f64.powf(log_a), t).unwrap();
        let k = 10f64.powf(log_k);
        for m in [MaterialModel::gold(), MaterialModel::gold_plasma(), MaterialModel::constant(11.7).unwrap()] {
            for pol in Polarization::BOTH {
                let d = r2_dielectric(pol, l, k, &sys, &m).unwrap();
                let i = r2_impedance(pol, l, k, &sys, &m).unwrap();
                prop_assert!((0.0..=1.0).contains(&d));
                prop_assert!((0.0..=1.0).contains(&i));
            }
        }
    }

    #[test]
    fn ideal_metal_reflects_fully_in_both_families(
        l in 0u64..1000,
        log_k in 2.0f64..9.0,
    ) {
        let sys = PlateSystem::new(1e-6, 300.0).unwrap();
        let k = 10f64.powf(log_k);
        for fam in [
            CoefficientFamily::impedance(MaterialModel::ideal_metal()),
            CoefficientFamily::dielectric(MaterialModel::ideal_metal()),
        ] {
            for pol in Polarization::BOTH {
                prop_assert_eq!(fam.r2(pol, l, k, &sys).unwrap(), 1.0);
            }
        }
    }
}

#[test]
fn static_split_holds_across_separations_and_temperatures() {
    let gold = MaterialModel::gold();
    for a in [1e-8, 3e-7, 1e-6, 1e-4] {
        for t in [1.0, 300.0, 1000.0] {
            let sys = PlateSystem::new(a, t).unwrap();
            for k in [1e2, 1e5, 1e8] {
                assert_eq!(
                    r2_dielectric(Polarization::Perpendicular, 0, k, &sys, &gold).unwrap(),
                    0.0
                );
                assert_eq!(
                    r2_impedance(Polarization::Perpendicular, 0, k, &sys, &gold).unwrap(),
                    1.0
                );
                assert_eq!(
                    r2_dielectric(Polarization::Parallel, 0, k, &sys, &gold).unwrap(),
                    1.0
                );
                assert_eq!(
                    r2_impedance(Polarization::Parallel, 0, k, &sys, &gold).unwrap(),
                    1.0
                );
            }
        }
    }
}

#[test]
fn drude_tm_reflectivity_is_continuous_at_zero_frequency() {
    // r_par -> 1 as xi -> 0 for a Drude metal, matching the static value
    let gold = MaterialModel::gold();
    let fam = CoefficientFamily::dielectric(gold);
    let a = 1e-6;
    let y = 1.0;
    let mut last = 0.0;
    for e in [1.0, 2.0, 3.0, 4.0, 5.0, 6.0] {
        let zeta = 10f64.powf(-e);
        let r2 = fam
            .at_frequency(zeta, a)
            .unwrap()
            .reflectivity(Polarization::Parallel, y)
            .r2;
        assert!(r2 > last);
        last = r2;
    }
    assert!(1.0 - last < 1e-6);
}
