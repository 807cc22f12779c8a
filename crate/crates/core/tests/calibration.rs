//! Generate-then-fit oracles and the brute-force pore-volume reference.

use humsim_core::calibrate::{fit, FitParameter, FitSpec, Measurement, MeasurementSet};
use humsim_core::capillary::{condensed_volume_fraction, KelvinRadius, PoreSizeDistribution};
use humsim_core::sensor::{rh_loop_path, rh_sweep, SensorConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 10^6-bin midpoint discretization of the volume-weighted truncated
/// log-normal, written independently of the library's quadrature.
struct BruteForcePsd {
    radii: Vec<f64>,
    weights: Vec<f64>,
}

impl BruteForcePsd {
    fn new(median: f64, sigma: f64, r_min: f64, r_max: f64, bins: usize) -> Self {
        let m = median.ln();
        let (u_min, u_max) = (r_min.ln(), r_max.ln());
        let du = (u_max - u_min) / bins as f64;
        let mut radii = Vec::with_capacity(bins);
        let mut weights = Vec::with_capacity(bins);
        for i in 0..bins {
            let u = u_min + (i as f64 + 0.5) * du;
            let r = u.exp();
            let z = (u - m) / sigma;
            // r^2 * lognormal pdf * dr, with dr = r du; constants drop out.
            weights.push(r.powi(3) * (-z * z / 2.0).exp() / r);
            radii.push(r);
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Self { radii, weights }
    }

    fn fraction_below(&self, r_cut: f64) -> f64 {
        self.radii
            .iter()
            .zip(&self.weights)
            .filter(|(&r, _)| r <= r_cut)
            .map(|(_, &w)| w)
            .sum()
    }
}

#[test]
fn condensed_fraction_matches_brute_force_reference() {
    let psd = PoreSizeDistribution::<f64>::default();
    let reference = BruteForcePsd::new(3.75e-9, 0.2, 1e-9, 2e-8, 1_000_000);
    for i in 0..=60 {
        let r_cut = 1e-9 + (2e-8 - 1e-9) * i as f64 / 60.0;
        let coarse = condensed_volume_fraction(&psd, KelvinRadius::Finite(r_cut));
        let fine = reference.fraction_below(r_cut);
        assert!(
            (coarse - fine).abs() < 1e-3,
            "r_cut {r_cut}: coarse {coarse} vs brute-force {fine}"
        );
    }
}

fn loop_measurements(cfg: &SensorConfig<f64>) -> MeasurementSet<f64> {
    let sweep = rh_sweep(cfg, &rh_loop_path(95.0), 298.15).unwrap();
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

fn recovery_spec(perturb: f64) -> FitSpec<f64> {
    FitSpec {
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
    }
}

#[test]
fn noiseless_loop_fit_recovers_contact_angles_and_porosity() {
    let truth = SensorConfig::<f64>::default();
    let data = loop_measurements(&truth);
    let result = fit(&data, &recovery_spec(1.07), &truth).unwrap();
    assert!(result.converged, "fit did not converge: {result:?}");
    let expected = [40.0, 10.0, 0.25];
    for ((value, target), name) in result.values.iter().zip(expected).zip(&result.names) {
        let rel = (value - target).abs() / target;
        assert!(rel < 1e-3, "{name}: fitted {value}, target {target}, rel {rel}");
    }
    assert!(result.rms_residual_pf < 1e-4, "rms {}", result.rms_residual_pf);
}

#[test]
fn noisy_fits_stay_within_twice_the_noise_level() {
    let truth = SensorConfig::<f64>::default();
    let clean = loop_measurements(&truth);
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut injected_sq = 0.0;
        let rows: Vec<Measurement<f64>> = clean
            .rows()
            .iter()
            .map(|m| {
                // 1% multiplicative Gaussian noise via Box-Muller.
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
        let data = MeasurementSet::new(rows).unwrap();
        let result = fit(&data, &recovery_spec(1.05), &truth).unwrap();
        assert!(
            result.rms_residual_pf <= 2.0 * injected_rms,
            "seed {seed}: rms {} vs injected {injected_rms}",
            result.rms_residual_pf
        );
    }
}
