//! Physical constants and standard water properties.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reference temperature (K) for the optional linear temperature coefficients
/// of surface tension and water permittivity.
pub const ROOM_TEMPERATURE_K: f64 = 298.15;

/// Gas constant, vacuum permittivity and default water properties.
///
/// The water entries (surface tension, molar volume, permittivity, statistical
/// monolayer thickness) are ordinary room-temperature values and may be
/// overridden through configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    /// Gas constant R, J/(mol K).
    pub gas_constant: T,
    /// Vacuum permittivity ε₀, F/m.
    pub vacuum_permittivity: T,
    /// Surface tension of water γ, N/m.
    pub water_surface_tension: T,
    /// Molar volume of liquid water V, m³/mol.
    pub water_molar_volume: T,
    /// Relative permittivity of liquid water (dimensionless).
    pub water_permittivity: T,
    /// Statistical thickness of one adsorbed water layer, m.
    pub monolayer_thickness: T,
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self {
            gas_constant: T::of(8.314),
            vacuum_permittivity: T::of(8.854e-12),
            water_surface_tension: T::of(0.072),
            water_molar_volume: T::of(1.8e-5),
            water_permittivity: T::of(80.0),
            monolayer_thickness: T::of(3e-10),
        }
    }
}

impl<T: Real> PhysicalConstants<T> {
    /// Checks that every constant is finite and strictly positive.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gas constant", self.gas_constant),
            ("vacuum permittivity", self.vacuum_permittivity),
            ("water surface tension", self.water_surface_tension),
            ("water molar volume", self.water_molar_volume),
            ("water permittivity", self.water_permittivity),
            ("monolayer thickness", self.monolayer_thickness),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    name,
                    value: v.to_f64_lossy(),
                });
            }
            if v <= T::zero() {
                return Err(Error::NonPositive {
                    name,
                    value: v.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }
}
