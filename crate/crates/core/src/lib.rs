//! Forward physics model of capacitive porous-alumina humidity sensors and
//! the inverse calibration engine that fits it to measured data.
//!
//! The forward chain is: BET multilayer film growth on the pore walls
//! ([`adsorption`]), Kelvin capillary condensation with contact-angle
//! hysteresis over a log-normal pore-size distribution ([`capillary`]),
//! effective-permittivity mixing and the series oxide/alumina capacitance
//! stack ([`dielectric`]), composed into RH and temperature sweeps by
//! [`sensor`]. [`calibrate`] inverts the chain with bounded nonlinear least
//! squares and the linearized BET regression.
//!
//! Everything is generic over the floating scalar through [`scalar::Real`];
//! the `*64` aliases below pin the common `f64` instantiations.

pub mod adsorption;
pub mod calibrate;
pub mod capillary;
pub mod constants;
pub mod dielectric;
pub mod error;
pub mod scalar;
pub mod sensor;

pub use adsorption::{BetParameters, RelativePressure};
pub use calibrate::{
    bet_linear_fit, fit, residuals, BetLineFit, FitParameter, FitResult, FitSpec, Measurement,
    MeasurementSet,
};
pub use capillary::{
    condensed_volume_fraction, kelvin_radius, kelvin_rh, update_fill_state, water_fill_fraction,
    KelvinParameters, KelvinRadius, PoreFillState, PoreSizeDistribution, SorptionBranch,
};
pub use constants::PhysicalConstants;
pub use dielectric::{
    effective_permittivity, effective_permittivity_mixed, layer_capacitance, morphology_exponent,
    stack_capacitance, LayerStack, MixingRule, Permittivities,
};
pub use error::{Error, Result};
pub use scalar::Real;
pub use sensor::{
    capacitance_at, rh_sweep, sensitivity, temperature_sweep, Branch, CapacitanceSample,
    DiffusionParameters, SensorConfig, SurfaceTerm, SweepResult, SweepRow,
};

/// `f64` instantiations of the main model types.
pub type SensorConfig64 = sensor::SensorConfig<f64>;
pub type SweepResult64 = sensor::SweepResult<f64>;
pub type SweepRow64 = sensor::SweepRow<f64>;
pub type PoreSizeDistribution64 = capillary::PoreSizeDistribution<f64>;
pub type PoreFillState64 = capillary::PoreFillState<f64>;
pub type KelvinParameters64 = capillary::KelvinParameters<f64>;
pub type BetParameters64 = adsorption::BetParameters<f64>;
pub type LayerStack64 = dielectric::LayerStack<f64>;
pub type Permittivities64 = dielectric::Permittivities<f64>;
pub type PhysicalConstants64 = constants::PhysicalConstants<f64>;
pub type MeasurementSet64 = calibrate::MeasurementSet<f64>;
pub type FitSpec64 = calibrate::FitSpec<f64>;
pub type FitResult64 = calibrate::FitResult<f64>;
