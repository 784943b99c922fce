//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line each and exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use casimir_core::consts::{C, HBAR, K_B, ZETA_3};
use casimir_core::modes::{eigenfrequencies, mode_sum_check, ModeGrid};
use casimir_core::reflection::{delta_infinity, delta_par, delta_perp, FrequencySlice};
use casimir_core::thermo::{
    default_dt, drude_entropy_deficit_oracle, entropy, nernst_scan, standard_comparison,
};
use casimir_core::{
    free_energy, zero_t_energy, CoefficientFamily, MaterialModel, PlateSystem, Polarization,
    QuadratureSpec,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn unit(a: f64) -> f64 {
    K_B * ZETA_3 / (16.0 * PI * a * a)
}

fn rel(x: f64, reference: f64) -> f64 {
    (x / reference - 1.0).abs()
}

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn renormalization_identity() -> Check {
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 10_000,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(
            proptest::test_runner::RngAlgorithm::ChaCha,
        ),
    );
    let worst = std::cell::Cell::new(0.0f64);
    let strategy = (
        0.0f64..=1.0,
        0.0f64..=1.0,
        0.01f64..=50.0,
        prop_oneof![
            Just(Polarization::Parallel),
            Just(Polarization::Perpendicular)
        ],
    );
    let result = runner.run(&strategy, |(x, u, y, pol)| {
        let ratio = (x + (1.0 - x) * u).max(0.01);
        let z = match pol {
            Polarization::Parallel => x / ratio,
            Polarization::Perpendicular => x * ratio,
        };
        let slice = FrequencySlice::Impedance { zeta: ratio * y, z };
        let delta = match pol {
            Polarization::Parallel => delta_par(y, x),
            Polarization::Perpendicular => delta_perp(y, x),
        };
        let r2 = slice.reflectivity(pol, y).r2;
        let err = (delta / delta_infinity(x, pol) - (1.0 - r2 * (-y).exp())).abs();
        worst.set(worst.get().max(err));
        prop_assert!(err <= 1e-12, "x={} y={} err={}", x, y, err);
        Ok(())
    });
    let detail = format!(
        "10000 tuples, max |error| = {:.2e} (tol 1e-12)",
        worst.get()
    );
    match result {
        Ok(()) => Ok(detail),
        Err(e) => Err(format!("{detail}; {e}")),
    }
}

fn zero_temperature_limit() -> Check {
    let fam = CoefficientFamily::impedance(MaterialModel::ideal_metal());
    let spec = QuadratureSpec::default();
    let mut worst = 0.0f64;
    for a in [0.5e-6, 1e-6, 2e-6] {
        let e = zero_t_energy(a, &fam, &spec).map_err(|e| e.to_string())?;
        worst = worst.max(rel(e, -PI.powi(2) * HBAR * C / (720.0 * a.powi(3))));
    }
    verdict(
        worst < 1e-3,
        format!("max relative deviation {worst:.2e} (tol 1e-3)"),
    )
}

fn classical_limit() -> Check {
    let sys = PlateSystem::new(10e-6, 300.0).map_err(|e| e.to_string())?;
    let fam = CoefficientFamily::impedance(MaterialModel::ideal_metal());
    let f = free_energy(&sys, &fam, &QuadratureSpec::default())
        .map_err(|e| e.to_string())?
        .value;
    let target = -9.905e-13;
    verdict(
        rel(f, target) < 1e-3,
        format!(
            "F = {f:.4e} J/m2, target {target:.4e}, ratio {:.4} (tol 0.1%)",
            f / target
        ),
    )
}

fn ideal_limit_agreement() -> Check {
    let sys = PlateSystem::new(1e-6, 300.0).map_err(|e| e.to_string())?;
    let spec = QuadratureSpec::precise();
    let imp = free_energy(
        &sys,
        &CoefficientFamily::impedance(MaterialModel::ideal_metal()),
        &spec,
    )
    .map_err(|e| e.to_string())?
    .value;
    let eps = MaterialModel::constant(1e10).map_err(|e| e.to_string())?;
    let diel = free_energy(&sys, &CoefficientFamily::dielectric(eps), &spec)
        .map_err(|e| e.to_string())?
        .value;
    let d = rel(diel, imp);
    verdict(
        d < 1e-6,
        format!(
            "impedance {imp:.6e}, dielectric {diel:.6e}, relative difference {d:.3e} (tol 1e-6)"
        ),
    )
}

fn zero_frequency_split() -> Check {
    let gold = MaterialModel::gold();
    let sys = PlateSystem::new(1e-6, 300.0).map_err(|e| e.to_string())?;
    let diel = CoefficientFamily::dielectric(gold.clone());
    let imp = CoefficientFamily::impedance(gold);
    for k in [1.0, 1e3, 1e6, 1e7, 1e8] {
        let d = diel
            .r2(Polarization::Perpendicular, 0, k, &sys)
            .map_err(|e| e.to_string())?;
        let i = imp
            .r2(Polarization::Perpendicular, 0, k, &sys)
            .map_err(|e| e.to_string())?;
        if d != 0.0 || i != 1.0 {
            return Err(format!("k_perp = {k}: dielectric {d}, impedance {i}"));
        }
    }
    Ok("dielectric-drude r_perp^2(0) = 0, impedance r_perp^2(0) = 1 at all sampled k_perp".into())
}

fn nernst_behavior() -> Check {
    let a = 1e-6;
    let grid = [40.0, 20.0, 10.0, 5.0];
    let spec = QuadratureSpec::precise();
    let imp = nernst_scan(
        a,
        &CoefficientFamily::impedance(MaterialModel::gold_plasma()),
        &spec,
        &grid,
    )
    .map_err(|e| e.to_string())?;
    let gold = MaterialModel::gold();
    let drude = nernst_scan(
        a,
        &CoefficientFamily::dielectric(gold.clone()),
        &spec,
        &grid,
    )
    .map_err(|e| e.to_string())?;
    let oracle = drude_entropy_deficit_oracle(a, &gold, &spec).map_err(|e| e.to_string())?;
    let u = unit(a);
    let imp_ok = imp.extrapolated_s0.abs() < 0.05 * u;
    let sign_ok = drude.extrapolated_s0 < 0.0;
    let gap = rel(drude.extrapolated_s0.abs(), oracle);
    let detail = format!(
        "S0 in units of kB*zeta(3)/16pi a^2: impedance {:.4} (tol 0.05), drude {:.4} (must be < 0), \
         drude vs deficit oracle {:.4}: {:.1}% (tol 15%)",
        imp.extrapolated_s0 / u,
        drude.extrapolated_s0 / u,
        oracle / u,
        100.0 * gap
    );
    verdict(imp_ok && sign_ok && gap < 0.15, detail)
}

fn thermal_correction_separation() -> Check {
    let sys = PlateSystem::new(300e-9, 300.0).map_err(|e| e.to_string())?;
    let report = standard_comparison(&sys, &MaterialModel::gold(), &QuadratureSpec::default())
        .map_err(|e| e.to_string())?;
    let drude = &report.models[0];
    let imp = &report.models[1];
    verdict(
        drude.correction_ratio > 10.0 * imp.correction_ratio && imp.correction_ratio < 0.01,
        format!(
            "{} {:.3}%, {} {:.3}%",
            drude.family,
            100.0 * drude.correction_ratio,
            imp.family,
            100.0 * imp.correction_ratio
        ),
    )
}

fn mode_spectrum() -> Check {
    let a = 1e-6;
    let mut worst = 0.0f64;
    for k in [0.0, 1e6, 5e6] {
        for pol in Polarization::BOTH {
            let s = eigenfrequencies(a, k, 0.0, pol, 20).map_err(|e| e.to_string())?;
            for (i, w) in s.frequencies.iter().enumerate() {
                let p = (i + 1) as f64 * PI / a;
                worst = worst.max(rel(*w, C * k.hypot(p)));
            }
        }
    }
    let check = mode_sum_check(a, 300.0, &ModeGrid::reference(), &QuadratureSpec::default())
        .map_err(|e| e.to_string())?;
    verdict(
        worst <= 1e-10 && check.deviation < 0.02,
        format!(
            "max spectrum error {worst:.2e} (tol 1e-10), mode-sum deviation {:.2e} (tol 2e-2)",
            check.deviation
        ),
    )
}

fn entropy_positivity() -> Check {
    let fam = CoefficientFamily::impedance(MaterialModel::gold_plasma());
    let spec = QuadratureSpec::precise();
    let mut lowest = f64::INFINITY;
    for a in [0.3e-6, 1e-6] {
        for t in [1.0, 5.0, 20.0, 77.0, 150.0, 300.0] {
            let sys = PlateSystem::new(a, t).map_err(|e| e.to_string())?;
            let s = entropy(&sys, &fam, &spec, default_dt(t))
                .map_err(|e| format!("a={a} T={t}: {e}"))?;
            if s.value < 0.0 {
                return Err(format!("a={a} T={t}: S = {:.3e}", s.value));
            }
            lowest = lowest.min(s.value / unit(a));
        }
    }
    Ok(format!(
        "12 points, smallest S = {lowest:.3e} kB*zeta(3)/16pi a^2"
    ))
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("run{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_casimir"))
            .args([
                "compare",
                "--a",
                "3e-7,1e-6",
                "--T",
                "77,300",
                "--material",
                "gold",
                "--out",
            ])
            .arg(&path)
            .env("CASIMIR_THREADS", "4")
            .output()
            .map_err(|e| e.to_string())?
            .status;
        if !status.success() {
            return Err(format!("run {i} exited with {status}"));
        }
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    verdict(
        outputs[0] == outputs[1],
        format!(
            "two 4-thread runs, {} bytes each, identical: {}",
            outputs[0].len(),
            outputs[0] == outputs[1]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: &[Criterion] = &[
        ("renormalization identity", renormalization_identity),
        ("ideal-metal zero-temperature limit", zero_temperature_limit),
        ("ideal-metal classical limit", classical_limit),
        ("family agreement in the ideal limit", ideal_limit_agreement),
        ("zero-frequency structural split", zero_frequency_split),
        ("Nernst behavior", nernst_behavior),
        (
            "thermal-correction separation",
            thermal_correction_separation,
        ),
        ("mode spectrum and mode sum", mode_spectrum),
        ("entropy positivity", entropy_positivity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} [{secs:.2} s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2} s]: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
