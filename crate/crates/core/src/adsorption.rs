//! BET multilayer adsorption: the temperature factor c, the finite-layer
//! isotherm with its Langmuir and infinite-layer reductions, the linearizing
//! BET-plot transform, and coverage-to-film-thickness conversion.
//!
//! Coverage is always reported as v/v_m (dimensionless); the absolute adsorbed
//! quantity only enters `bet_transform`, where the caller supplies it.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Margin used when a sweep endpoint reaches saturation: x = 1 is clamped to
/// 1 − SATURATION_CLAMP before isotherm evaluation.
pub const SATURATION_CLAMP: f64 = 1e-6;

/// Relative pressure p/p₀ (equivalently RH as a fraction), valid on [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RelativePressure<T>(T);

impl<T: Real> RelativePressure<T> {
    /// Accepts x in [0, 1); rejects saturation and anything non-finite.
    pub fn new(x: T) -> Result<Self> {
        if x >= T::zero() && x < T::one() {
            Ok(Self(x))
        } else {
            Err(Error::RelativePressure(x.to_f64_lossy()))
        }
    }

    /// Like `new`, but accepts x = 1 (a sweep endpoint at saturation) by
    /// clamping it to 1 − 1e-6.
    pub fn clamped(x: T) -> Result<Self> {
        if x > T::one() {
            return Err(Error::RelativePressure(x.to_f64_lossy()));
        }
        let cap = T::one() - T::of(SATURATION_CLAMP);
        Self::new(x.min(cap))
    }

    /// Converts relative humidity in percent (0..=100) with the saturation
    /// clamp applied at 100%.
    pub fn from_rh_percent(rh: T) -> Result<Self> {
        if !(rh >= T::zero() && rh <= T::of(100.0)) {
            return Err(Error::OutOfRange {
                name: "relative humidity percent",
                value: rh.to_f64_lossy(),
                min: 0.0,
                max: 100.0,
            });
        }
        Self::clamped(rh / T::of(100.0))
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// BET isotherm parameters (coverage model of the pore-wall film).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetParameters<T> {
    /// Monolayer capacity v_m in the adsorbed-quantity unit of the data.
    pub monolayer_capacity: T,
    /// Adsorption heat of the first layer E₁, J/mol.
    pub heat_first_layer: T,
    /// Heat of condensation E_L (all layers beyond the first), J/mol.
    pub heat_condensation: T,
    /// Maximum number of adsorbed layers n; real-valued, ≥ 1.
    pub max_layers: T,
}

impl<T: Real> Default for BetParameters<T> {
    fn default() -> Self {
        // E1 - EL = 5 kJ/mol gives c ≈ 7.5 at 298 K; n = 12.5 corresponds to
        // the default 3.75 nm median pore radius at 0.3 nm per layer.
        Self {
            monolayer_capacity: T::one(),
            heat_first_layer: T::of(49_000.0),
            heat_condensation: T::of(44_000.0),
            max_layers: T::of(12.5),
        }
    }
}

impl<T: Real> BetParameters<T> {
    pub fn validate(&self) -> Result<()> {
        if self.monolayer_capacity <= T::zero() {
            return Err(Error::NonPositive {
                name: "monolayer capacity",
                value: self.monolayer_capacity.to_f64_lossy(),
            });
        }
        if self.max_layers < T::one() || self.max_layers.is_nan() {
            return Err(Error::OutOfRange {
                name: "max layers",
                value: self.max_layers.to_f64_lossy(),
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        for (name, v) in [
            ("first-layer heat", self.heat_first_layer),
            ("condensation heat", self.heat_condensation),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    name,
                    value: v.to_f64_lossy(),
                });
            }
        }
        Ok(())
    }

    /// Energy constant c at the given temperature.
    pub fn c_at(&self, temperature: T, gas_constant: T) -> Result<T> {
        c_factor(
            self.heat_first_layer,
            self.heat_condensation,
            temperature,
            gas_constant,
        )
    }
}

/// c = exp((E₁ − E_L)/(R·T)); strictly decreasing in T when E₁ > E_L.
pub fn c_factor<T: Real>(e1: T, e_l: T, temperature: T, gas_constant: T) -> Result<T> {
    if temperature <= T::zero() || !temperature.is_finite() {
        return Err(Error::NonPositive {
            name: "temperature",
            value: temperature.to_f64_lossy(),
        });
    }
    for (name, v) in [("first-layer heat", e1), ("condensation heat", e_l)] {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                name,
                value: v.to_f64_lossy(),
            });
        }
    }
    Ok(((e1 - e_l) / (gas_constant * temperature)).exp())
}

fn check_energy_constant<T: Real>(c: T) -> Result<()> {
    if c <= T::zero() || !c.is_finite() {
        return Err(Error::NonPositive {
            name: "energy constant c",
            value: c.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Coverage v/v_m for adsorption limited to n layers:
///
/// ```text
/// v/v_m = [c·x/(1−x)] · [1 − (n+1)xⁿ + n·xⁿ⁺¹] / [1 + (c−1)x − c·xⁿ⁺¹]
/// ```
///
/// n is real-valued; xⁿ is evaluated as exp(n·ln x) so n can track pore
/// geometry continuously and serve as a fit parameter.
pub fn bet_finite<T: Real>(x: RelativePressure<T>, c: T, n: T) -> Result<T> {
    check_energy_constant(c)?;
    if n < T::one() || n.is_nan() {
        return Err(Error::OutOfRange {
            name: "max layers",
            value: n.to_f64_lossy(),
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    let x = x.value();
    if x == T::zero() {
        return Ok(T::zero());
    }
    let one = T::one();
    let xn = (n * x.ln()).exp();
    let xn1 = xn * x;
    let numerator = one - (n + one) * xn + n * xn1;
    let denominator = one + (c - one) * x - c * xn1;
    Ok(c * x / (one - x) * numerator / denominator)
}

/// Infinite-layer coverage c·x / ((1−x)(1+(c−1)x)); diverges as x → 1.
pub fn bet_infinite<T: Real>(x: RelativePressure<T>, c: T) -> Result<T> {
    check_energy_constant(c)?;
    let x = x.value();
    let one = T::one();
    Ok(c * x / ((one - x) * (one + (c - one) * x)))
}

/// BET-plot ordinate p/(v(p₀ − p)) expressed through x: returns x/(v·(1 − x)).
///
/// For data produced by `bet_infinite` this is exactly linear in x with
/// intercept 1/(v_m·c) and slope (c−1)/(v_m·c).
pub fn bet_transform<T: Real>(x: RelativePressure<T>, v: T) -> Result<T> {
    let xv = x.value();
    if xv <= T::zero() {
        return Err(Error::OpenUnitInterval {
            name: "relative pressure for BET transform",
            value: xv.to_f64_lossy(),
        });
    }
    if v <= T::zero() {
        return Err(Error::NonPositive {
            name: "adsorbed quantity",
            value: v.to_f64_lossy(),
        });
    }
    Ok(xv / (v * (T::one() - xv)))
}

/// Statistical film thickness of `coverage` adsorbed layers.
pub fn film_thickness<T: Real>(coverage: T, monolayer_thickness: T) -> Result<T> {
    if coverage < T::zero() || !coverage.is_finite() {
        return Err(Error::Negative {
            name: "coverage",
            value: coverage.to_f64_lossy(),
        });
    }
    if monolayer_thickness <= T::zero() {
        return Err(Error::NonPositive {
            name: "monolayer thickness",
            value: monolayer_thickness.to_f64_lossy(),
        });
    }
    Ok(coverage * monolayer_thickness)
}
