//! Effective permittivity of the partially wet porous layer, parallel-plate
//! capacitances, the series oxide/alumina stack and the wet/dry morphology
//! exponent.

use crate::constants::ROOM_TEMPERATURE_K;
use crate::error::{Error, Result};
use crate::scalar::Real;
use std::fmt;
use std::str::FromStr;

/// Relative permittivities of the four phases in the stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Permittivities<T> {
    /// Alumina skeleton.
    pub alumina: T,
    /// Liquid water at the reference temperature.
    pub water: T,
    /// Air in the open pore volume.
    pub air: T,
    /// Insulating oxide (SiO₂) under the sensing layer.
    pub oxide: T,
    /// Optional linear dε_water/dT, 1/K; zero keeps ε_water constant.
    pub water_temp_coeff: T,
}

impl<T: Real> Default for Permittivities<T> {
    fn default() -> Self {
        Self {
            alumina: T::of(9.0),
            water: T::of(80.0),
            air: T::one(),
            oxide: T::of(3.9),
            water_temp_coeff: T::zero(),
        }
    }
}

impl<T: Real> Permittivities<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alumina permittivity", self.alumina),
            ("water permittivity", self.water),
            ("air permittivity", self.air),
            ("oxide permittivity", self.oxide),
        ] {
            if !(v >= T::one() && v.is_finite()) {
                return Err(Error::OutOfRange {
                    name,
                    value: v.to_f64_lossy(),
                    min: 1.0,
                    max: f64::INFINITY,
                });
            }
        }
        if !self.water_temp_coeff.is_finite() {
            return Err(Error::NonFinite {
                name: "water permittivity temperature coefficient",
                value: self.water_temp_coeff.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Water permittivity at temperature T with the optional linear coefficient.
    pub fn water_at(&self, temperature: T) -> Result<T> {
        let e = self.water + self.water_temp_coeff * (temperature - T::of(ROOM_TEMPERATURE_K));
        if e < T::one() {
            return Err(Error::OutOfRange {
                name: "water permittivity at temperature",
                value: e.to_f64_lossy(),
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        Ok(e)
    }
}

/// Three-phase mixing rule for the sensing layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixingRule {
    /// Logarithmic (Lichtenecker) mixing; the model default.
    #[default]
    Lichtenecker,
    /// Volume-weighted arithmetic mean (upper Wiener bound).
    Parallel,
    /// Volume-weighted harmonic mean (lower Wiener bound).
    Series,
}

impl fmt::Display for MixingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MixingRule::Lichtenecker => "lichtenecker",
            MixingRule::Parallel => "parallel",
            MixingRule::Series => "series",
        };
        f.write_str(s)
    }
}

impl FromStr for MixingRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lichtenecker" => Ok(MixingRule::Lichtenecker),
            "parallel" => Ok(MixingRule::Parallel),
            "series" => Ok(MixingRule::Series),
            other => Err(format!(
                "unknown mixing rule {other:?} (expected lichtenecker, parallel or series)"
            )),
        }
    }
}

/// Electrode geometry and the porous-layer descriptors entering capacitance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerStack<T> {
    /// Electrode overlap area, m².
    pub area: T,
    /// Insulating oxide thickness, m.
    pub oxide_thickness: T,
    /// Porous alumina thickness, m.
    pub alumina_thickness: T,
    /// Open pore volume fraction, in [0, 1). Zero models a dense film.
    pub porosity: T,
    /// Diagnostic wet/dry exponent; not used by the forward pipeline.
    pub morphology_exponent: T,
}

impl<T: Real> Default for LayerStack<T> {
    /// 70 nm oxide under 440 nm alumina on a 1 mm² electrode.
    fn default() -> Self {
        Self {
            area: T::of(1e-6),
            oxide_thickness: T::of(70e-9),
            alumina_thickness: T::of(440e-9),
            porosity: T::of(0.25),
            morphology_exponent: T::one(),
        }
    }
}

impl<T: Real> LayerStack<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("electrode area", self.area),
            ("oxide thickness", self.oxide_thickness),
            ("alumina thickness", self.alumina_thickness),
        ] {
            if v <= T::zero() || !v.is_finite() {
                return Err(Error::NonPositive {
                    name,
                    value: v.to_f64_lossy(),
                });
            }
        }
        if !(self.porosity >= T::zero() && self.porosity < T::one()) {
            return Err(Error::OutOfRange {
                name: "porosity",
                value: self.porosity.to_f64_lossy(),
                min: 0.0,
                max: 1.0,
            });
        }
        if !self.morphology_exponent.is_finite() {
            return Err(Error::NonFinite {
                name: "morphology exponent",
                value: self.morphology_exponent.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

fn check_fill_fraction<T: Real>(w: T) -> Result<()> {
    if !(w >= T::zero() && w <= T::one()) {
        return Err(Error::OutOfRange {
            name: "water fill fraction",
            value: w.to_f64_lossy(),
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

fn check_porosity<T: Real>(p: T) -> Result<()> {
    if !(p >= T::zero() && p < T::one()) {
        return Err(Error::OutOfRange {
            name: "porosity",
            value: p.to_f64_lossy(),
            min: 0.0,
            max: 1.0,
        });
    }
    Ok(())
}

/// Lichtenecker three-phase mix of the sensing layer:
///
/// ```text
/// ln ε_eff = (1−P)·ln ε_alumina + P·w·ln ε_water + P·(1−w)·ln ε_air
/// ```
pub fn effective_permittivity<T: Real>(
    porosity: T,
    water_fill: T,
    eps: &Permittivities<T>,
) -> Result<T> {
    effective_permittivity_mixed(MixingRule::Lichtenecker, porosity, water_fill, eps)
}

/// Effective permittivity under the selected mixing rule.
pub fn effective_permittivity_mixed<T: Real>(
    rule: MixingRule,
    porosity: T,
    water_fill: T,
    eps: &Permittivities<T>,
) -> Result<T> {
    check_porosity(porosity)?;
    check_fill_fraction(water_fill)?;
    eps.validate()?;
    let one = T::one();
    let solid = one - porosity;
    let water = porosity * water_fill;
    let air = porosity * (one - water_fill);
    let value = match rule {
        MixingRule::Lichtenecker => {
            (solid * eps.alumina.ln() + water * eps.water.ln() + air * eps.air.ln()).exp()
        }
        MixingRule::Parallel => solid * eps.alumina + water * eps.water + air * eps.air,
        MixingRule::Series => one / (solid / eps.alumina + water / eps.water + air / eps.air),
    };
    Ok(value)
}

/// Parallel-plate capacitance ε₀·ε·A/d.
pub fn layer_capacitance<T: Real>(
    eps_r: T,
    area: T,
    thickness: T,
    vacuum_permittivity: T,
) -> Result<T> {
    for (name, v) in [
        ("relative permittivity", eps_r),
        ("area", area),
        ("thickness", thickness),
        ("vacuum permittivity", vacuum_permittivity),
    ] {
        if v <= T::zero() || !v.is_finite() {
            return Err(Error::NonPositive {
                name,
                value: v.to_f64_lossy(),
            });
        }
    }
    Ok(vacuum_permittivity * eps_r * area / thickness)
}

/// Series combination of the insulating oxide and the sensing layer.
pub fn stack_capacitance<T: Real>(
    stack: &LayerStack<T>,
    eps_eff: T,
    eps_oxide: T,
    vacuum_permittivity: T,
) -> Result<T> {
    stack.validate()?;
    let c_ox = layer_capacitance(eps_oxide, stack.area, stack.oxide_thickness, vacuum_permittivity)?;
    let c_sens = layer_capacitance(eps_eff, stack.area, stack.alumina_thickness, vacuum_permittivity)?;
    Ok(c_ox * c_sens / (c_ox + c_sens))
}

/// The unique n with C_w/C_d = (ε_w/ε_d)ⁿ: ln(C_w/C_d) / ln(ε_w/ε_d).
pub fn morphology_exponent<T: Real>(c_wet: T, c_dry: T, eps_wet: T, eps_dry: T) -> Result<T> {
    for (name, v) in [
        ("wet capacitance", c_wet),
        ("dry capacitance", c_dry),
        ("wet permittivity", eps_wet),
        ("dry permittivity", eps_dry),
    ] {
        if v <= T::zero() || !v.is_finite() {
            return Err(Error::NonPositive {
                name,
                value: v.to_f64_lossy(),
            });
        }
    }
    if eps_wet == eps_dry {
        return Err(Error::DegenerateRatio(eps_wet.to_f64_lossy()));
    }
    Ok((c_wet / c_dry).ln() / (eps_wet / eps_dry).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const EPS0: f64 = 8.854e-12;

    #[test]
    fn effective_permittivity_examples() {
        let eps = Permittivities::<f64>::default();
        assert_relative_eq!(
            effective_permittivity(0.3, 0.0, &eps).unwrap(),
            9.0f64.powf(0.7),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            effective_permittivity(0.3, 1.0, &eps).unwrap(),
            (0.7 * 9.0f64.ln() + 0.3 * 80.0f64.ln()).exp(),
            max_relative = 1e-12
        );
        // Dense-film limit.
        assert_relative_eq!(effective_permittivity(0.0, 0.5, &eps).unwrap(), 9.0);
        // Spot values quoted against the closed forms: 4.656 and 17.34.
        assert_relative_eq!(effective_permittivity(0.3, 0.0, &eps).unwrap(), 4.656, max_relative = 1e-3);
        assert_relative_eq!(effective_permittivity(0.3, 1.0, &eps).unwrap(), 17.34, max_relative = 1e-3);
    }

    #[test]
    fn effective_permittivity_domain() {
        let eps = Permittivities::<f64>::default();
        assert!(effective_permittivity(0.3, -0.1, &eps).is_err());
        assert!(effective_permittivity(0.3, 1.1, &eps).is_err());
        assert!(effective_permittivity(1.0, 0.5, &eps).is_err());
        assert!(effective_permittivity(-0.1, 0.5, &eps).is_err());
    }

    #[test]
    fn mixing_rules_bracket_each_other() {
        let eps = Permittivities::<f64>::default();
        for &(p, w) in &[(0.25, 0.0), (0.25, 0.5), (0.4, 1.0), (0.1, 0.3)] {
            let series = effective_permittivity_mixed(MixingRule::Series, p, w, &eps).unwrap();
            let log = effective_permittivity_mixed(MixingRule::Lichtenecker, p, w, &eps).unwrap();
            let parallel = effective_permittivity_mixed(MixingRule::Parallel, p, w, &eps).unwrap();
            assert!(series <= log + 1e-12 && log <= parallel + 1e-12);
            assert!(series >= 1.0 && parallel <= 80.0);
        }
    }

    #[test]
    fn effective_permittivity_increases_with_water() {
        let eps = Permittivities::<f64>::default();
        let mut prev = 0.0;
        for i in 0..=100 {
            let w = i as f64 / 100.0;
            let e = effective_permittivity(0.25, w, &eps).unwrap();
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn layer_capacitance_examples() {
        let c = layer_capacitance(9.0, 1e-6, 440e-9, EPS0).unwrap();
        assert_relative_eq!(c, 1.811e-10, max_relative = 1e-3);
        let c = layer_capacitance(3.9, 1e-6, 70e-9, EPS0).unwrap();
        assert_relative_eq!(c, 493.3e-12, max_relative = 1e-3);
        // Doubling the thickness halves C.
        let half = layer_capacitance(9.0, 1e-6, 880e-9, EPS0).unwrap();
        assert_relative_eq!(half, 1.811e-10 / 2.0, max_relative = 1e-3);
        assert!(layer_capacitance(9.0, 0.0, 440e-9, EPS0).is_err());
        assert!(layer_capacitance(9.0, 1e-6, -1e-9, EPS0).is_err());
    }

    #[test]
    fn stack_capacitance_examples() {
        let stack = LayerStack::<f64>::default();
        let c = stack_capacitance(&stack, 9.0, 3.9, EPS0).unwrap();
        assert_relative_eq!(c, 132.5e-12, max_relative = 1e-3);

        // The series value sits below both layers.
        let c_ox = layer_capacitance(3.9, stack.area, stack.oxide_thickness, EPS0).unwrap();
        let c_sens = layer_capacitance(9.0, stack.area, stack.alumina_thickness, EPS0).unwrap();
        assert!(c < c_ox.min(c_sens));

        // Equal layers halve; vanishing oxide thickness recovers the sensor layer.
        let mut equal = stack;
        equal.oxide_thickness = stack.alumina_thickness;
        let c_eq = stack_capacitance(&equal, 9.0, 9.0, EPS0).unwrap();
        assert_relative_eq!(c_eq, c_sens / 2.0, max_relative = 1e-12);

        let mut thin = stack;
        thin.oxide_thickness = 1e-15;
        let c_thin = stack_capacitance(&thin, 9.0, 3.9, EPS0).unwrap();
        assert_relative_eq!(c_thin, c_sens, max_relative = 1e-4);
    }

    #[test]
    fn morphology_exponent_examples() {
        assert_eq!(morphology_exponent(2.0, 2.0, 80.0, 5.0).unwrap(), 0.0);
        assert_relative_eq!(
            morphology_exponent(16.0, 1.0, 80.0, 5.0).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            morphology_exponent(2.0, 1.0, 80.0, 5.0).unwrap(),
            0.25,
            max_relative = 1e-12
        );
        assert!(morphology_exponent(2.0, 1.0, 5.0, 5.0).is_err());
        assert!(morphology_exponent(0.0, 1.0, 80.0, 5.0).is_err());
    }

    #[test]
    fn morphology_exponent_area_invariant_and_invertible() {
        let eps = Permittivities::<f64>::default();
        let dry = effective_permittivity(0.25, 0.0, &eps).unwrap();
        let wet = effective_permittivity(0.25, 1.0, &eps).unwrap();
        let mut n_values = Vec::new();
        for scale in [1.0, 3.0, 10.0] {
            let mut stack = LayerStack::<f64>::default();
            stack.area *= scale;
            let c_d = stack_capacitance(&stack, dry, 3.9, EPS0).unwrap();
            let c_w = stack_capacitance(&stack, wet, 3.9, EPS0).unwrap();
            n_values.push(morphology_exponent(c_w, c_d, eps.water, dry).unwrap());
        }
        assert_relative_eq!(n_values[0], n_values[1], max_relative = 1e-12);
        assert_relative_eq!(n_values[0], n_values[2], max_relative = 1e-12);

        // Round trip: reconstructing C_w from n matches the input.
        let n = n_values[0];
        let stack = LayerStack::<f64>::default();
        let c_d = stack_capacitance(&stack, dry, 3.9, EPS0).unwrap();
        let c_w = stack_capacitance(&stack, wet, 3.9, EPS0).unwrap();
        let reconstructed = c_d * (eps.water / dry).powf(n);
        assert_relative_eq!(reconstructed, c_w, max_relative = 1e-12);
    }
}
