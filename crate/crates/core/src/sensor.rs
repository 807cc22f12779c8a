//! The full device model: capacitance at a given (RH, T, history), RH sweeps
//! with capillary hysteresis, and quasi-static temperature sweeps with
//! wall-uptake relaxation.

use crate::adsorption::{bet_finite, film_thickness, BetParameters, RelativePressure};
use crate::capillary::{
    update_fill_state, water_fill_fraction, KelvinParameters, PoreFillState, PoreSizeDistribution,
};
use crate::constants::PhysicalConstants;
use crate::dielectric::{
    effective_permittivity_mixed, stack_capacitance, LayerStack, MixingRule, Permittivities,
};
use crate::error::{Error, Result};
use crate::scalar::Real;
use std::fmt;
use std::str::FromStr;

/// Optional linear capacitance term for surface condensation above an RH onset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceTerm<T> {
    pub enabled: bool,
    /// Onset relative pressure, in (0, 1).
    pub onset_rh: T,
    /// Added capacitance per unit relative pressure above the onset, F.
    pub gain: T,
}

impl<T: Real> Default for SurfaceTerm<T> {
    fn default() -> Self {
        Self {
            enabled: false,
            onset_rh: T::of(0.8),
            gain: T::of(1e-10),
        }
    }
}

impl<T: Real> SurfaceTerm<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.onset_rh > T::zero() && self.onset_rh < T::one()) {
            return Err(Error::OpenUnitInterval {
                name: "surface term onset",
                value: self.onset_rh.to_f64_lossy(),
            });
        }
        if self.gain < T::zero() || !self.gain.is_finite() {
            return Err(Error::Negative {
                name: "surface term gain",
                value: self.gain.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// Wall-uptake relaxation: lateral moisture diffusion into the pore walls,
/// modeled as a virtual addition to the water fill fraction that relaxes
/// toward a saturating equilibrium with an Arrhenius time constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionParameters<T> {
    /// Equilibrium uptake ceiling u_max, dimensionless fill-fraction units.
    pub max_uptake: T,
    /// Arrhenius prefactor of the relaxation time, s.
    pub tau0: T,
    /// Activation energy of the relaxation, J/mol.
    pub activation_energy: T,
    /// Temperature where equilibrium uptake starts to grow, K.
    pub t_ref: T,
    /// Temperature scale of the saturating equilibrium curve, K.
    pub t_scale: T,
}

impl<T: Real> Default for DiffusionParameters<T> {
    fn default() -> Self {
        Self {
            max_uptake: T::of(0.3),
            tau0: T::of(0.005),
            activation_energy: T::of(30_000.0),
            t_ref: T::of(278.0),
            t_scale: T::of(40.0),
        }
    }
}

impl<T: Real> DiffusionParameters<T> {
    pub fn validate(&self) -> Result<()> {
        if self.max_uptake < T::zero() || !self.max_uptake.is_finite() {
            return Err(Error::Negative {
                name: "max uptake",
                value: self.max_uptake.to_f64_lossy(),
            });
        }
        for (name, v) in [("tau0", self.tau0), ("t_scale", self.t_scale), ("t_ref", self.t_ref)] {
            if v <= T::zero() || !v.is_finite() {
                return Err(Error::NonPositive {
                    name,
                    value: v.to_f64_lossy(),
                });
            }
        }
        if !self.activation_energy.is_finite() {
            return Err(Error::NonFinite {
                name: "activation energy",
                value: self.activation_energy.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Equilibrium uptake u_eq(T) = u_max·(1 − exp(−(T − T_ref)/T_scale)),
    /// clamped to [0, u_max].
    pub fn equilibrium_uptake(&self, temperature: T) -> T {
        let raw = self.max_uptake
            * (T::one() - (-(temperature - self.t_ref) / self.t_scale).exp());
        raw.max(T::zero()).min(self.max_uptake)
    }

    /// Relaxation time τ(T) = tau0·exp(Ea/(R·T)).
    pub fn time_constant(&self, temperature: T, gas_constant: T) -> T {
        self.tau0 * (self.activation_energy / (gas_constant * temperature)).exp()
    }
}

/// Complete device description used by the forward model.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorConfig<T> {
    pub constants: PhysicalConstants<T>,
    pub bet: BetParameters<T>,
    pub kelvin: KelvinParameters<T>,
    pub psd: PoreSizeDistribution<T>,
    pub stack: LayerStack<T>,
    pub eps: Permittivities<T>,
    pub mixing: MixingRule,
    pub surface: SurfaceTerm<T>,
    pub diffusion: DiffusionParameters<T>,
}

impl<T: Real> Default for SensorConfig<T> {
    fn default() -> Self {
        Self {
            constants: PhysicalConstants::default(),
            bet: BetParameters::default(),
            kelvin: KelvinParameters::default(),
            psd: PoreSizeDistribution::default(),
            stack: LayerStack::default(),
            eps: Permittivities::default(),
            mixing: MixingRule::default(),
            surface: SurfaceTerm::default(),
            diffusion: DiffusionParameters::default(),
        }
    }
}

impl<T: Real> SensorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        self.bet.validate()?;
        self.kelvin.validate()?;
        self.stack.validate()?;
        self.eps.validate()?;
        self.surface.validate()?;
        self.diffusion.validate()?;
        Ok(())
    }

    /// Layer cap tied to geometry: n = median pore radius / monolayer thickness.
    pub fn layers_from_geometry(&self) -> T {
        self.psd.median_radius() / self.constants.monolayer_thickness
    }
}

/// Direction tag of a sweep row: rising or falling control variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Ascending,
    Descending,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Ascending => "asc",
            Branch::Descending => "desc",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "asc" => Ok(Branch::Ascending),
            "desc" => Ok(Branch::Descending),
            other => Err(format!("unknown branch tag {other:?} (expected asc or desc)")),
        }
    }
}

/// One traversed point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow<T> {
    pub rh_percent: T,
    pub temp_c: T,
    pub branch: Branch,
    /// Pore water volume fraction (capillary condensate plus film).
    pub water_fill: T,
    pub eps_eff: T,
    /// Device capacitance, F.
    pub capacitance: T,
}

/// Ordered rows of a sweep, as traversed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult<T> {
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Real> SweepResult<T> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Capacitance plus the intermediate quantities behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitanceSample<T> {
    /// Device capacitance, F.
    pub capacitance: T,
    /// Pore water volume fraction before wall uptake.
    pub water_fill: T,
    /// Effective permittivity of the sensing layer (includes wall uptake).
    pub eps_eff: T,
}

fn capacitance_pipeline<T: Real>(
    cfg: &SensorConfig<T>,
    x: RelativePressure<T>,
    temperature: T,
    state: &PoreFillState<T>,
    wall_uptake: T,
) -> Result<CapacitanceSample<T>> {
    if wall_uptake < T::zero() || wall_uptake > cfg.diffusion.max_uptake {
        return Err(Error::OutOfRange {
            name: "wall uptake",
            value: wall_uptake.to_f64_lossy(),
            min: 0.0,
            max: cfg.diffusion.max_uptake.to_f64_lossy(),
        });
    }
    let c = cfg.bet.c_at(temperature, cfg.constants.gas_constant)?;
    let coverage = bet_finite(x, c, cfg.bet.max_layers)?;
    let t_film = film_thickness(coverage, cfg.constants.monolayer_thickness)?;
    let water = water_fill_fraction(state, &cfg.psd, t_film)?;
    let effective = (water + wall_uptake).min(T::one());
    let mut eps = cfg.eps;
    eps.water = eps.water_at(temperature)?;
    let eps_eff = effective_permittivity_mixed(cfg.mixing, cfg.stack.porosity, effective, &eps)?;
    let mut capacitance = stack_capacitance(
        &cfg.stack,
        eps_eff,
        cfg.eps.oxide,
        cfg.constants.vacuum_permittivity,
    )?;
    if cfg.surface.enabled && x.value() > cfg.surface.onset_rh {
        capacitance = capacitance + cfg.surface.gain * (x.value() - cfg.surface.onset_rh);
    }
    Ok(CapacitanceSample {
        capacitance,
        water_fill: water,
        eps_eff,
    })
}

/// Device capacitance for a given relative pressure, temperature, fill state
/// and wall uptake. The state is not advanced; use `update_fill_state` first.
pub fn capacitance_at<T: Real>(
    cfg: &SensorConfig<T>,
    x: RelativePressure<T>,
    temperature: T,
    state: &PoreFillState<T>,
    wall_uptake: T,
) -> Result<CapacitanceSample<T>> {
    cfg.validate()?;
    capacitance_pipeline(cfg, x, temperature, state, wall_uptake)
}

const KELVIN_OFFSET: f64 = 273.15;

/// Runs an RH path (percent values) at fixed temperature from the all-empty
/// state, advancing the hysteresis state point by point.
pub fn rh_sweep<T: Real>(
    cfg: &SensorConfig<T>,
    path_rh_percent: &[T],
    temperature: T,
) -> Result<SweepResult<T>> {
    cfg.validate()?;
    let temp_c = temperature - T::of(KELVIN_OFFSET);
    let mut state = PoreFillState::empty(&cfg.psd);
    let mut rows = Vec::with_capacity(path_rh_percent.len());
    let mut branch = Branch::Ascending;
    let mut prev: Option<T> = None;
    for &rh in path_rh_percent {
        let x = RelativePressure::from_rh_percent(rh)?;
        state = update_fill_state(
            state,
            x,
            temperature,
            &cfg.kelvin,
            &cfg.psd,
            cfg.constants.gas_constant,
        )?;
        let sample = capacitance_pipeline(cfg, x, temperature, &state, T::zero())?;
        if let Some(p) = prev {
            if rh > p {
                branch = Branch::Ascending;
            } else if rh < p {
                branch = Branch::Descending;
            }
        }
        rows.push(SweepRow {
            rh_percent: rh,
            temp_c,
            branch,
            water_fill: sample.water_fill,
            eps_eff: sample.eps_eff,
            capacitance: sample.capacitance,
        });
        prev = Some(rh);
    }
    Ok(SweepResult { rows })
}

/// Quasi-static temperature march at constant RH. For each path point the
/// fill state is re-equilibrated at the new Kelvin threshold and the wall
/// uptake takes one relaxation step
/// `u += min(1, dt/τ)·(u_eq − u)` with τ(T) = tau0·exp(Ea/(R·T)).
/// The step factor is capped at 1 so vanishing τ tracks equilibrium exactly.
pub fn temperature_sweep<T: Real>(
    cfg: &SensorConfig<T>,
    rh_percent: T,
    temp_path_kelvin: &[T],
    dt: T,
) -> Result<SweepResult<T>> {
    cfg.validate()?;
    if dt <= T::zero() || !dt.is_finite() {
        return Err(Error::NonPositive {
            name: "time step",
            value: dt.to_f64_lossy(),
        });
    }
    let x = RelativePressure::from_rh_percent(rh_percent)?;
    let mut state = PoreFillState::empty(&cfg.psd);
    let mut uptake = T::zero();
    let mut rows = Vec::with_capacity(temp_path_kelvin.len());
    let mut branch = Branch::Ascending;
    let mut prev: Option<T> = None;
    for &temperature in temp_path_kelvin {
        if temperature <= T::zero() || !temperature.is_finite() {
            return Err(Error::NonPositive {
                name: "temperature",
                value: temperature.to_f64_lossy(),
            });
        }
        state = update_fill_state(
            state,
            x,
            temperature,
            &cfg.kelvin,
            &cfg.psd,
            cfg.constants.gas_constant,
        )?;
        let u_eq = cfg.diffusion.equilibrium_uptake(temperature);
        let tau = cfg.diffusion.time_constant(temperature, cfg.constants.gas_constant);
        let factor = if tau > T::zero() { (dt / tau).min(T::one()) } else { T::one() };
        uptake = uptake + factor * (u_eq - uptake);
        uptake = uptake.max(T::zero()).min(cfg.diffusion.max_uptake);
        let sample = capacitance_pipeline(cfg, x, temperature, &state, uptake)?;
        if let Some(p) = prev {
            if temperature > p {
                branch = Branch::Ascending;
            } else if temperature < p {
                branch = Branch::Descending;
            }
        }
        rows.push(SweepRow {
            rh_percent,
            temp_c: temperature - T::of(KELVIN_OFFSET),
            branch,
            water_fill: sample.water_fill,
            eps_eff: sample.eps_eff,
            capacitance: sample.capacitance,
        });
        prev = Some(temperature);
    }
    Ok(SweepResult { rows })
}

/// Least-squares slope of capacitance (pF) against RH (%) over a band of one
/// branch.
pub fn sensitivity<T: Real>(
    result: &SweepResult<T>,
    band: (T, T),
    branch: Branch,
) -> Result<T> {
    let (lo, hi) = band;
    let pf = T::of(1e12);
    let points: Vec<(T, T)> = result
        .rows
        .iter()
        .filter(|r| r.branch == branch && r.rh_percent >= lo && r.rh_percent <= hi)
        .map(|r| (r.rh_percent, r.capacitance * pf))
        .collect();
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    let n = T::from_usize(points.len()).unwrap();
    let mean_x = points.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let mean_y = points.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (x, y) in points {
        sxx = sxx + (x - mean_x) * (x - mean_x);
        sxy = sxy + (x - mean_x) * (y - mean_y);
    }
    if sxx == T::zero() {
        return Err(Error::DegenerateBand);
    }
    Ok(sxy / sxx)
}

/// Convenience grid builder: RH percent points from `start` to `end` in unit
/// steps (inclusive), in either direction.
pub fn rh_loop_path<T: Real>(up_to: T) -> Vec<T> {
    let mut path = Vec::new();
    let mut v = T::zero();
    while v <= up_to {
        path.push(v);
        v = v + T::one();
    }
    let mut v = up_to - T::one();
    while v >= T::zero() {
        path.push(v);
        v = v - T::one();
    }
    path
}
