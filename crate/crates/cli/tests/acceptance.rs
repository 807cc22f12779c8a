//! Acceptance suite: one test per shipped claim, each printing a pass line
//! (run with `--nocapture` to see them). Tolerances are pinned in the
//! assertions themselves.

use humsim_cli::config::RunConfig;
use humsim_cli::csvio::{read_sweep_csv, write_sweep_csv};
use humsim_core::adsorption::{bet_finite, bet_infinite, RelativePressure};
use humsim_core::calibrate::{
    bet_linear_fit, fit, FitParameter, FitSpec, Measurement, MeasurementSet,
};
use humsim_core::capillary::{kelvin_radius, kelvin_rh, KelvinParameters, KelvinRadius, SorptionBranch};
use humsim_core::sensor::{rh_loop_path, rh_sweep, sensitivity, temperature_sweep, Branch, SensorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs;
use std::path::Path;
use std::process::Command;

const R: f64 = 8.314;
const T_ROOM: f64 = 298.15;

fn rp(x: f64) -> RelativePressure<f64> {
    RelativePressure::new(x).unwrap()
}

fn pass(n: u32, what: impl AsRef<str>) {
    println!("acceptance criterion {n}: PASS - {}", what.as_ref());
}

#[test]
fn criterion_1_bet_reductions() {
    for &c in &[0.5, 1.0, 10.0, 100.0] {
        for i in 0..=900 {
            let x = i as f64 / 1000.0;
            let langmuir = c * x / (1.0 + c * x);
            let n1 = bet_finite(rp(x), c, 1.0).unwrap();
            assert!(
                (n1 - langmuir).abs() < 1e-6,
                "Langmuir reduction c={c} x={x}: {n1} vs {langmuir}"
            );
            let deep = bet_finite(rp(x), c, 1e4).unwrap();
            let infinite = bet_infinite(rp(x), c).unwrap();
            assert!(
                (deep - infinite).abs() < 1e-6,
                "infinite-layer limit c={c} x={x}: {deep} vs {infinite}"
            );
        }
    }
    pass(1, "finite-layer BET reduces to Langmuir (n=1) and the infinite form (n=1e4) within 1e-6");
}

#[test]
fn criterion_2_bet_plot_identity() {
    let (v_m, c) = (2.5, 50.0);
    let points: Vec<(f64, f64)> = (5..=35)
        .map(|i| {
            let x = i as f64 / 100.0;
            (x, v_m * bet_infinite(rp(x), c).unwrap())
        })
        .collect();
    let line = bet_linear_fit(&points).unwrap();
    let vm_err = (line.monolayer_capacity - v_m).abs() / v_m;
    let c_err = (line.energy_constant - c).abs() / c;
    assert!(vm_err < 1e-6, "v_m relative error {vm_err}");
    assert!(c_err < 1e-6, "c relative error {c_err}");
    pass(2, "linearized BET plot recovers (v_m, c) from noiseless data within 1e-6");
}

#[test]
fn criterion_3_kelvin_desk_values() {
    let kp = KelvinParameters::new(0.072, 1.8e-5, 0.0, 0.0).unwrap();
    let r = match kelvin_radius(rp(0.9), T_ROOM, &kp, SorptionBranch::Adsorption, R).unwrap() {
        KelvinRadius::Finite(r) => r,
        KelvinRadius::Unbounded => panic!("finite radius expected"),
    };
    let r_err = (r - 9.93e-9).abs() / 9.93e-9;
    assert!(r_err < 0.01, "kelvin_radius(0.9) = {r}, relative error {r_err}");

    let x = kelvin_rh(3e-9, T_ROOM, &kp, SorptionBranch::Adsorption, R).unwrap();
    let x_err = (x.value() - 0.706).abs() / 0.706;
    assert!(x_err < 0.01, "kelvin_rh(3 nm) = {}, relative error {x_err}", x.value());
    pass(3, "Kelvin radius at x=0.9 is 9.93 nm and kelvin_rh(3 nm) is 0.706, both within 1%");
}

#[test]
fn criterion_4_hysteresis_loop() {
    let cfg = SensorConfig::<f64>::default();
    assert!(cfg.kelvin.theta_advancing_deg == 40.0 && cfg.kelvin.theta_receding_deg == 10.0);
    let result = rh_sweep(&cfg, &rh_loop_path(95.0), T_ROOM).unwrap();
    let ascending: Vec<_> = result.rows.iter().filter(|r| r.branch == Branch::Ascending).collect();
    for d in result.rows.iter().filter(|r| r.branch == Branch::Descending) {
        if let Some(a) = ascending.iter().find(|a| a.rh_percent == d.rh_percent) {
            assert!(
                d.capacitance >= a.capacitance,
                "C_desc < C_asc at RH {}%",
                d.rh_percent
            );
        }
    }
    let gap_pf = (result.rows.first().unwrap().capacitance
        - result.rows.last().unwrap().capacitance)
        .abs()
        * 1e12;
    assert!(gap_pf < 1e-3, "loop fails to close at RH 0: {gap_pf} pF");

    // Equal contact angles: identically zero loop width.
    let mut flat = cfg.clone();
    flat.kelvin = KelvinParameters::new(0.072, 1.8e-5, 25.0, 25.0).unwrap();
    let result = rh_sweep(&flat, &rh_loop_path(95.0), T_ROOM).unwrap();
    let ascending: Vec<_> = result.rows.iter().filter(|r| r.branch == Branch::Ascending).collect();
    for d in result.rows.iter().filter(|r| r.branch == Branch::Descending) {
        if let Some(a) = ascending.iter().find(|a| a.rh_percent == d.rh_percent) {
            assert_eq!(d.capacitance, a.capacitance, "nonzero width at RH {}%", d.rh_percent);
        }
    }
    pass(4, "0->95->0 loop: descending branch dominates, closes at RH 0 within 1e-3 pF, zero width for equal angles");
}

#[test]
fn criterion_5_high_rh_sensitivity_enhancement() {
    let cfg = SensorConfig::<f64>::default();
    let path: Vec<f64> = (0..=95).map(|v| v as f64).collect();
    let result = rh_sweep(&cfg, &path, T_ROOM).unwrap();
    let steep = sensitivity(&result, (80.0, 95.0), Branch::Ascending).unwrap();
    let mid = sensitivity(&result, (40.0, 60.0), Branch::Ascending).unwrap();
    assert!(mid > 0.0, "mid-band slope {mid} not positive");
    assert!(
        steep >= 1.5 * mid,
        "80-95% slope {steep} pF/RH% is not 1.5x the 40-60% slope {mid} pF/RH%"
    );
    pass(5, "default-config slope over 80-95% RH exceeds 1.5x the 40-60% slope");
}

fn ascending_measurements(cfg: &SensorConfig<f64>, lo: u32, hi: u32) -> MeasurementSet<f64> {
    let path: Vec<f64> = (lo..=hi).map(|v| v as f64).collect();
    let sweep = rh_sweep(cfg, &path, T_ROOM).unwrap();
    MeasurementSet::new(
        sweep
            .rows
            .iter()
            .map(|r| Measurement {
                rh_percent: r.rh_percent,
                capacitance: r.capacitance,
                temp_c: 25.0,
                branch: Some(r.branch),
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn criterion_6_sensitivity_reproduction() {
    // Synthetic target: the default device scaled in electrode area so the
    // 20-80% ascending-branch sensitivity is exactly 5 pF/RH% (capacitance,
    // hence the fitted slope, is exactly linear in area).
    let mut target = SensorConfig::<f64>::default();
    let path: Vec<f64> = (20..=80).map(|v| v as f64).collect();
    let base_sens = sensitivity(
        &rh_sweep(&target, &path, T_ROOM).unwrap(),
        (20.0, 80.0),
        Branch::Ascending,
    )
    .unwrap();
    target.stack.area *= 5.0 / base_sens;
    let target_sens = sensitivity(
        &rh_sweep(&target, &path, T_ROOM).unwrap(),
        (20.0, 80.0),
        Branch::Ascending,
    )
    .unwrap();
    assert!((target_sens - 5.0).abs() < 1e-9, "target curve sensitivity {target_sens}");

    let data = ascending_measurements(&target, 20, 80);
    let spec = FitSpec {
        parameters: vec![
            FitParameter {
                name: "stack.area".into(),
                initial: target.stack.area * 1.10,
                lower: 1e-7,
                upper: 1e-4,
            },
            FitParameter {
                name: "stack.porosity".into(),
                initial: 0.27,
                lower: 0.05,
                upper: 0.6,
            },
            FitParameter {
                name: "kelvin.theta_adv".into(),
                initial: 43.0,
                lower: 20.0,
                upper: 70.0,
            },
            FitParameter {
                name: "kelvin.theta_rec".into(),
                initial: 11.0,
                lower: 0.0,
                upper: 19.0,
            },
        ],
        max_iterations: 40,
        ..FitSpec::default()
    };
    let base = SensorConfig::<f64>::default();
    let result = fit(&data, &spec, &base).unwrap();
    assert!(result.converged, "fit did not converge");
    assert!(
        result.evaluations < 200,
        "took {} objective evaluations",
        result.evaluations
    );
    let fitted_sens = sensitivity(
        &rh_sweep(&result.config, &path, T_ROOM).unwrap(),
        (20.0, 80.0),
        Branch::Ascending,
    )
    .unwrap();
    assert!(
        (fitted_sens - 5.0).abs() <= 0.1,
        "fitted sensitivity {fitted_sens} pF/RH% not within 5.0 +/- 0.1"
    );
    pass(
        6,
        &format!(
            "fit of {{area, porosity, theta_A, theta_R}} gives {fitted_sens:.4} pF/RH% in {} evaluations (< 200)",
            result.evaluations
        ),
    );
}

#[test]
fn criterion_7_temperature_hysteresis() {
    let mut path_k: Vec<f64> = (5..=95).map(|t| t as f64 + 273.15).collect();
    path_k.extend((5..=94).rev().map(|t| t as f64 + 273.15));

    let shoelace = |rows: &[humsim_core::SweepRow64]| {
        let n = rows.len();
        let mut twice = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            twice += rows[i].temp_c * rows[j].capacitance * 1e12
                - rows[j].temp_c * rows[i].capacitance * 1e12;
        }
        (twice / 2.0).abs()
    };

    let cfg = SensorConfig::<f64>::default();
    let result = temperature_sweep(&cfg, 35.0, &path_k, 60.0).unwrap();
    let c_5 = result.rows[0].capacitance;
    let c_95 = result.rows[90].capacitance;
    assert_eq!(result.rows[90].temp_c, 95.0);
    assert!(c_95 > c_5, "C(95C) = {c_95} not above C(5C) = {c_5}");
    let area = shoelace(&result.rows);
    assert!(area > 0.0, "loop area {area} not positive");

    let mut frozen = cfg.clone();
    frozen.diffusion.max_uptake = 0.0;
    let result = temperature_sweep(&frozen, 35.0, &path_k, 60.0).unwrap();
    let area0 = shoelace(&result.rows);
    assert!(
        area0 < 1e-12,
        "u_max = 0 loop area {area0} did not collapse"
    );
    pass(7, "35% RH temperature loop: C rises with T, positive area, and u_max=0 collapses it");
}

#[test]
fn criterion_8_parameter_recovery() {
    let truth = SensorConfig::<f64>::default();
    let sweep = rh_sweep(&truth, &rh_loop_path(95.0), T_ROOM).unwrap();
    let clean: Vec<Measurement<f64>> = sweep
        .rows
        .iter()
        .map(|r| Measurement {
            rh_percent: r.rh_percent,
            capacitance: r.capacitance,
            temp_c: 25.0,
            branch: Some(r.branch),
        })
        .collect();

    let spec = |perturb: f64| FitSpec {
        parameters: vec![
            FitParameter {
                name: "kelvin.theta_adv".into(),
                initial: 40.0 * perturb,
                lower: 20.0,
                upper: 70.0,
            },
            FitParameter {
                name: "kelvin.theta_rec".into(),
                initial: 10.0 * perturb,
                lower: 0.0,
                upper: 19.0,
            },
            FitParameter {
                name: "stack.porosity".into(),
                initial: 0.25 * perturb,
                lower: 0.05,
                upper: 0.6,
            },
        ],
        max_iterations: 60,
        ..FitSpec::default()
    };

    // Noiseless round trip: every free parameter back within 1e-3 relative.
    let data = MeasurementSet::new(clean.clone()).unwrap();
    let result = fit(&data, &spec(1.07), &truth).unwrap();
    assert!(result.converged);
    for (value, (target, name)) in result
        .values
        .iter()
        .zip([(40.0, "theta_adv"), (10.0, "theta_rec"), (0.25, "porosity")])
    {
        let rel = (value - target).abs() / target;
        assert!(rel < 1e-3, "{name}: recovered {value}, relative error {rel}");
    }

    // 1% multiplicative noise, 10 seeds: rms within twice the injected level.
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut injected_sq = 0.0;
        let rows: Vec<Measurement<f64>> = clean
            .iter()
            .map(|m| {
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                let noisy = m.capacitance * (1.0 + 0.01 * g);
                injected_sq += ((noisy - m.capacitance) * 1e12).powi(2);
                Measurement {
                    capacitance: noisy,
                    ..*m
                }
            })
            .collect();
        let injected_rms = (injected_sq / clean.len() as f64).sqrt();
        let noisy = MeasurementSet::new(rows).unwrap();
        let result = fit(&noisy, &spec(1.05), &truth).unwrap();
        assert!(
            result.rms_residual_pf <= 2.0 * injected_rms,
            "seed {seed}: rms {} pF vs injected {injected_rms} pF",
            result.rms_residual_pf
        );
    }
    pass(8, "noiseless generate-then-fit recovers parameters within 1e-3; noisy rms stays under 2x the injected level over 10 seeds");
}

#[test]
fn criterion_9_determinism_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.toml");
    fs::write(&config_path, RunConfig::default().to_toml()).unwrap();
    let bin = env!("CARGO_BIN_EXE_humsim");

    let run_all = |tag: &str| -> (Vec<u8>, Vec<u8>, Vec<u8>, Vec<u8>) {
        let csv = dir.path().join(format!("sweep_{tag}.csv"));
        let svg = dir.path().join(format!("sweep_{tag}.svg"));
        let out = Command::new(bin)
            .args([
                "sweep",
                "--config",
                config_path.to_str().unwrap(),
                "--out",
                csv.to_str().unwrap(),
                "--chart",
                svg.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        let tcsv = dir.path().join(format!("temp_{tag}.csv"));
        let out2 = Command::new(bin)
            .args([
                "temp-sweep",
                "--config",
                config_path.to_str().unwrap(),
                "--out",
                tcsv.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out2.status.success());
        let iso = Command::new(bin)
            .args(["isotherm", "--c", "50", "--layers", "12.5", "--points", "101"])
            .output()
            .unwrap();
        assert!(iso.status.success());
        (
            fs::read(&csv).unwrap(),
            fs::read(&svg).unwrap(),
            fs::read(&tcsv).unwrap(),
            iso.stdout,
        )
    };

    let first = run_all("a");
    let second = run_all("b");
    assert_eq!(first.0, second.0, "sweep CSV differs between runs");
    assert_eq!(first.1, second.1, "chart differs between runs");
    assert_eq!(first.2, second.2, "temp-sweep CSV differs between runs");
    assert_eq!(first.3, second.3, "isotherm stdout differs between runs");

    // CSV round trip at formatted precision: read then rewrite is identity.
    let text = String::from_utf8(first.0.clone()).unwrap();
    let path = Path::new("sweep_a.csv");
    let parsed = read_sweep_csv(path, &text).unwrap();
    assert_eq!(write_sweep_csv(&parsed, &[]), text);

    let temp_text = String::from_utf8(first.2.clone()).unwrap();
    let footer: Vec<String> = temp_text
        .lines()
        .filter(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches("# ").to_string())
        .collect();
    let parsed = read_sweep_csv(path, &temp_text).unwrap();
    assert_eq!(write_sweep_csv(&parsed, &footer), temp_text);

    pass(9, "byte-identical CLI outputs across runs; CSV round trip is lossless at formatted precision");
}
