//! TOML run configuration: the complete sensor description plus sweep and
//! fit sections. Unknown keys are rejected; missing keys fall back to the
//! model defaults. Units are documented per key in the example config.

use humsim_core::calibrate::{FitParameter, FitSpec};
use humsim_core::{
    BetParameters64, DiffusionParameters, KelvinParameters64, LayerStack64, MixingRule,
    Permittivities64, PhysicalConstants64, PoreSizeDistribution64, SensorConfig64, SurfaceTerm,
};
use serde::{Deserialize, Serialize};

fn default_true_temperature() -> f64 {
    25.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsSection {
    /// Gas constant, J/(mol*K).
    pub gas_constant: f64,
    /// Vacuum permittivity, F/m.
    pub vacuum_permittivity: f64,
    /// Statistical monolayer thickness of adsorbed water, m.
    pub monolayer_thickness: f64,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        let c = PhysicalConstants64::default();
        Self {
            gas_constant: c.gas_constant,
            vacuum_permittivity: c.vacuum_permittivity,
            monolayer_thickness: c.monolayer_thickness,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BetSection {
    /// Monolayer capacity v_m (coverage unit).
    pub monolayer_capacity: f64,
    /// First-layer adsorption heat E1, J/mol.
    pub heat_first_layer: f64,
    /// Condensation heat E_L, J/mol.
    pub heat_condensation: f64,
    /// Maximum adsorbed layers n (real-valued, >= 1).
    pub max_layers: f64,
}

impl Default for BetSection {
    fn default() -> Self {
        let b = BetParameters64::default();
        Self {
            monolayer_capacity: b.monolayer_capacity,
            heat_first_layer: b.heat_first_layer,
            heat_condensation: b.heat_condensation,
            max_layers: b.max_layers,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KelvinSection {
    /// Surface tension, N/m.
    pub surface_tension: f64,
    /// Molar volume of water, m^3/mol.
    pub molar_volume: f64,
    /// Advancing contact angle, degrees.
    pub theta_advancing_deg: f64,
    /// Receding contact angle, degrees.
    pub theta_receding_deg: f64,
    /// Linear surface-tension temperature coefficient, N/(m*K).
    pub surface_tension_temp_coeff: f64,
}

impl Default for KelvinSection {
    fn default() -> Self {
        let k = KelvinParameters64::default();
        Self {
            surface_tension: k.surface_tension,
            molar_volume: k.molar_volume,
            theta_advancing_deg: k.theta_advancing_deg,
            theta_receding_deg: k.theta_receding_deg,
            surface_tension_temp_coeff: k.surface_tension_temp_coeff,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsdSection {
    /// Median pore radius, m.
    pub median_radius: f64,
    /// Log-normal shape parameter (dimensionless).
    pub sigma_log: f64,
    /// Truncation radii, m.
    pub r_min: f64,
    pub r_max: f64,
    /// Quadrature bins (>= 16).
    pub bins: usize,
}

impl Default for PsdSection {
    fn default() -> Self {
        let p = PoreSizeDistribution64::default();
        Self {
            median_radius: p.median_radius(),
            sigma_log: p.sigma_log(),
            r_min: p.r_min(),
            r_max: p.r_max(),
            bins: p.bins(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StackSection {
    /// Electrode overlap area, m^2.
    pub area: f64,
    /// SiO2 insulation thickness, m.
    pub oxide_thickness: f64,
    /// Porous alumina thickness, m.
    pub alumina_thickness: f64,
    /// Open pore fraction, [0, 1).
    pub porosity: f64,
    /// Diagnostic wet/dry morphology exponent.
    pub morphology_exponent: f64,
}

impl Default for StackSection {
    fn default() -> Self {
        let s = LayerStack64::default();
        Self {
            area: s.area,
            oxide_thickness: s.oxide_thickness,
            alumina_thickness: s.alumina_thickness,
            porosity: s.porosity,
            morphology_exponent: s.morphology_exponent,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PermittivitySection {
    pub alumina: f64,
    pub water: f64,
    pub air: f64,
    pub oxide: f64,
    /// Linear water-permittivity temperature coefficient, 1/K.
    pub water_temp_coeff: f64,
    /// Mixing rule: "lichtenecker", "parallel" or "series".
    pub mixing_rule: String,
}

impl Default for PermittivitySection {
    fn default() -> Self {
        let e = Permittivities64::default();
        Self {
            alumina: e.alumina,
            water: e.water,
            air: e.air,
            oxide: e.oxide,
            water_temp_coeff: e.water_temp_coeff,
            mixing_rule: MixingRule::default().to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceSection {
    pub enabled: bool,
    /// Onset relative pressure (fraction of saturation).
    pub onset_rh: f64,
    /// Added capacitance per unit relative pressure above onset, F.
    pub gain: f64,
}

impl Default for SurfaceSection {
    fn default() -> Self {
        let s = SurfaceTerm::<f64>::default();
        Self {
            enabled: s.enabled,
            onset_rh: s.onset_rh,
            gain: s.gain,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffusionSection {
    /// Wall-uptake ceiling (fill-fraction units).
    pub u_max: f64,
    /// Relaxation-time prefactor, s.
    pub tau0: f64,
    /// Activation energy, J/mol.
    pub activation_energy: f64,
    /// Equilibrium-uptake onset temperature, K.
    pub t_ref: f64,
    /// Equilibrium-uptake temperature scale, K.
    pub t_scale: f64,
}

impl Default for DiffusionSection {
    fn default() -> Self {
        let d = DiffusionParameters::<f64>::default();
        Self {
            u_max: d.max_uptake,
            tau0: d.tau0,
            activation_energy: d.activation_energy,
            t_ref: d.t_ref,
            t_scale: d.t_scale,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    /// RH path segments "start:end:step" joined by commas, percent.
    pub path: String,
    /// Sweep temperature, Celsius.
    pub temperature_c: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            path: "0:95:1,95:0:1".to_string(),
            temperature_c: default_true_temperature(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TempSweepSection {
    /// Constant relative humidity, percent.
    pub rh_percent: f64,
    /// Temperature path segments "start:end:step", Celsius.
    pub t_path_c: String,
    /// Quasi-static step duration, s.
    pub dt: f64,
}

impl Default for TempSweepSection {
    fn default() -> Self {
        Self {
            rh_percent: 35.0,
            t_path_c: "5:95:1,95:5:1".to_string(),
            dt: 60.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitParameterSection {
    /// One of the `humsim_core::calibrate::FITTABLE_PARAMETERS` names.
    pub name: String,
    pub initial: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    pub max_iterations: usize,
    /// Relative objective decrease below which an accepted step counts as
    /// converged (three in a row stop the fit).
    pub tolerance: f64,
    /// Gradient-norm criterion, relative to the initial gradient.
    pub gradient_tolerance: f64,
    /// Seed for the optional multi-start.
    pub seed: u64,
    /// Extra seeded Latin-hypercube restarts; 0 fits once from `initial`.
    pub restarts: usize,
    pub parameters: Vec<FitParameterSection>,
}

impl Default for FitSection {
    fn default() -> Self {
        let s = FitSpec::<f64>::default();
        Self {
            max_iterations: s.max_iterations,
            tolerance: s.tolerance,
            gradient_tolerance: s.gradient_tolerance,
            seed: s.seed,
            restarts: s.restarts,
            parameters: Vec::new(),
        }
    }
}

impl FitSection {
    pub fn to_spec(&self) -> FitSpec<f64> {
        FitSpec {
            parameters: self
                .parameters
                .iter()
                .map(|p| FitParameter {
                    name: p.name.clone(),
                    initial: p.initial,
                    lower: p.lower,
                    upper: p.upper,
                })
                .collect(),
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            gradient_tolerance: self.gradient_tolerance,
            seed: self.seed,
            restarts: self.restarts,
        }
    }
}

/// Complete run configuration document.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub constants: ConstantsSection,
    pub bet: BetSection,
    pub kelvin: KelvinSection,
    pub psd: PsdSection,
    pub stack: StackSection,
    pub permittivities: PermittivitySection,
    pub surface_term: SurfaceSection,
    pub diffusion: DiffusionSection,
    pub sweep: SweepSection,
    pub temp_sweep: TempSweepSection,
    pub fit: FitSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config: {e}"))
    }

    /// Builds the validated core config.
    pub fn to_sensor_config(&self) -> Result<SensorConfig64, String> {
        let mut constants = PhysicalConstants64::default();
        constants.gas_constant = self.constants.gas_constant;
        constants.vacuum_permittivity = self.constants.vacuum_permittivity;
        constants.monolayer_thickness = self.constants.monolayer_thickness;

        let psd = PoreSizeDistribution64::new(
            self.psd.median_radius,
            self.psd.sigma_log,
            self.psd.r_min,
            self.psd.r_max,
            self.psd.bins,
        )
        .map_err(|e| e.to_string())?;

        let mixing: MixingRule = self.permittivities.mixing_rule.parse()?;

        let cfg = SensorConfig64 {
            constants,
            bet: BetParameters64 {
                monolayer_capacity: self.bet.monolayer_capacity,
                heat_first_layer: self.bet.heat_first_layer,
                heat_condensation: self.bet.heat_condensation,
                max_layers: self.bet.max_layers,
            },
            kelvin: KelvinParameters64 {
                surface_tension: self.kelvin.surface_tension,
                molar_volume: self.kelvin.molar_volume,
                theta_advancing_deg: self.kelvin.theta_advancing_deg,
                theta_receding_deg: self.kelvin.theta_receding_deg,
                surface_tension_temp_coeff: self.kelvin.surface_tension_temp_coeff,
            },
            psd,
            stack: LayerStack64 {
                area: self.stack.area,
                oxide_thickness: self.stack.oxide_thickness,
                alumina_thickness: self.stack.alumina_thickness,
                porosity: self.stack.porosity,
                morphology_exponent: self.stack.morphology_exponent,
            },
            eps: Permittivities64 {
                alumina: self.permittivities.alumina,
                water: self.permittivities.water,
                air: self.permittivities.air,
                oxide: self.permittivities.oxide,
                water_temp_coeff: self.permittivities.water_temp_coeff,
            },
            mixing,
            surface: SurfaceTerm {
                enabled: self.surface_term.enabled,
                onset_rh: self.surface_term.onset_rh,
                gain: self.surface_term.gain,
            },
            diffusion: DiffusionParameters {
                max_uptake: self.diffusion.u_max,
                tau0: self.diffusion.tau0,
                activation_energy: self.diffusion.activation_energy,
                t_ref: self.diffusion.t_ref,
                t_scale: self.diffusion.t_scale,
            },
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    /// Writes the physical sections back from a (fitted) core config while
    /// keeping the sweep/fit sections of this document.
    pub fn with_sensor_config(&self, cfg: &SensorConfig64) -> Self {
        let mut out = self.clone();
        out.constants.gas_constant = cfg.constants.gas_constant;
        out.constants.vacuum_permittivity = cfg.constants.vacuum_permittivity;
        out.constants.monolayer_thickness = cfg.constants.monolayer_thickness;
        out.bet.monolayer_capacity = cfg.bet.monolayer_capacity;
        out.bet.heat_first_layer = cfg.bet.heat_first_layer;
        out.bet.heat_condensation = cfg.bet.heat_condensation;
        out.bet.max_layers = cfg.bet.max_layers;
        out.kelvin.surface_tension = cfg.kelvin.surface_tension;
        out.kelvin.molar_volume = cfg.kelvin.molar_volume;
        out.kelvin.theta_advancing_deg = cfg.kelvin.theta_advancing_deg;
        out.kelvin.theta_receding_deg = cfg.kelvin.theta_receding_deg;
        out.kelvin.surface_tension_temp_coeff = cfg.kelvin.surface_tension_temp_coeff;
        out.psd.median_radius = cfg.psd.median_radius();
        out.psd.sigma_log = cfg.psd.sigma_log();
        out.psd.r_min = cfg.psd.r_min();
        out.psd.r_max = cfg.psd.r_max();
        out.psd.bins = cfg.psd.bins();
        out.stack.area = cfg.stack.area;
        out.stack.oxide_thickness = cfg.stack.oxide_thickness;
        out.stack.alumina_thickness = cfg.stack.alumina_thickness;
        out.stack.porosity = cfg.stack.porosity;
        out.stack.morphology_exponent = cfg.stack.morphology_exponent;
        out.permittivities.alumina = cfg.eps.alumina;
        out.permittivities.water = cfg.eps.water;
        out.permittivities.air = cfg.eps.air;
        out.permittivities.oxide = cfg.eps.oxide;
        out.permittivities.water_temp_coeff = cfg.eps.water_temp_coeff;
        out.permittivities.mixing_rule = cfg.mixing.to_string();
        out.surface_term.enabled = cfg.surface.enabled;
        out.surface_term.onset_rh = cfg.surface.onset_rh;
        out.surface_term.gain = cfg.surface.gain;
        out.diffusion.u_max = cfg.diffusion.max_uptake;
        out.diffusion.tau0 = cfg.diffusion.tau0;
        out.diffusion.activation_energy = cfg.diffusion.activation_energy;
        out.diffusion.t_ref = cfg.diffusion.t_ref;
        out.diffusion.t_scale = cfg.diffusion.t_scale;
        out
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serializes")
    }
}

/// Standalone fit-spec file: the same shape as the `[fit]` section.
pub fn parse_fit_spec(text: &str) -> Result<FitSection, String> {
    toml::from_str(text).map_err(|e| format!("fit spec: {e}"))
}
