//! Kelvin-equation condensation thresholds, the pore-size distribution and
//! the branch-dependent fill state that produces the type-IV hysteresis loop.
//!
//! Pores are independent cylinders: each fills once the advancing-angle Kelvin
//! radius reaches its own radius and empties once the receding-angle radius
//! drops below it. The memory of the loop is the set of filled pores.

use crate::adsorption::RelativePressure;
use crate::constants::ROOM_TEMPERATURE_K;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Side of the sorption loop a Kelvin evaluation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SorptionBranch {
    /// Pores filling; uses the advancing contact angle θ_A.
    Adsorption,
    /// Pores emptying; uses the receding contact angle θ_R.
    Desorption,
}

/// Kelvin threshold radius. `Unbounded` is the cos θ = 0 degenerate case:
/// no finite radius satisfies the condensation condition below saturation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KelvinRadius<T> {
    Finite(T),
    Unbounded,
}

/// Surface tension, molar volume and the two contact angles entering the
/// Kelvin condensation thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KelvinParameters<T> {
    /// Surface tension γ at the reference temperature, N/m.
    pub surface_tension: T,
    /// Molar volume of the condensate V, m³/mol.
    pub molar_volume: T,
    /// Advancing contact angle θ_A, degrees.
    pub theta_advancing_deg: T,
    /// Receding contact angle θ_R, degrees.
    pub theta_receding_deg: T,
    /// Optional linear dγ/dT, N/(m·K); zero keeps γ constant.
    pub surface_tension_temp_coeff: T,
}

impl<T: Real> Default for KelvinParameters<T> {
    fn default() -> Self {
        Self {
            surface_tension: T::of(0.072),
            molar_volume: T::of(1.8e-5),
            theta_advancing_deg: T::of(40.0),
            theta_receding_deg: T::of(10.0),
            surface_tension_temp_coeff: T::zero(),
        }
    }
}

impl<T: Real> KelvinParameters<T> {
    pub fn new(
        surface_tension: T,
        molar_volume: T,
        theta_advancing_deg: T,
        theta_receding_deg: T,
    ) -> Result<Self> {
        let kp = Self {
            surface_tension,
            molar_volume,
            theta_advancing_deg,
            theta_receding_deg,
            surface_tension_temp_coeff: T::zero(),
        };
        kp.validate()?;
        Ok(kp)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("surface tension", self.surface_tension),
            ("molar volume", self.molar_volume),
        ] {
            if v <= T::zero() || !v.is_finite() {
                return Err(Error::NonPositive {
                    name,
                    value: v.to_f64_lossy(),
                });
            }
        }
        if !self.surface_tension_temp_coeff.is_finite() {
            return Err(Error::NonFinite {
                name: "surface tension temperature coefficient",
                value: self.surface_tension_temp_coeff.to_f64_lossy(),
            });
        }
        let (ta, tr) = (self.theta_advancing_deg, self.theta_receding_deg);
        // 0 <= θ_R <= θ_A < 90: both menisci must wet the wall.
        if !(tr >= T::zero() && tr <= ta && ta < T::of(90.0)) {
            return Err(Error::OutOfRange {
                name: "contact angles (require 0 <= theta_rec <= theta_adv < 90)",
                value: ta.to_f64_lossy(),
                min: tr.to_f64_lossy(),
                max: 90.0,
            });
        }
        Ok(())
    }

    /// Contact angle of the requested branch, degrees.
    pub fn theta_deg(&self, branch: SorptionBranch) -> T {
        match branch {
            SorptionBranch::Adsorption => self.theta_advancing_deg,
            SorptionBranch::Desorption => self.theta_receding_deg,
        }
    }

    /// Surface tension at temperature T, with the optional linear coefficient.
    pub fn surface_tension_at(&self, temperature: T) -> Result<T> {
        let g = self.surface_tension
            + self.surface_tension_temp_coeff * (temperature - T::of(ROOM_TEMPERATURE_K));
        if g <= T::zero() {
            return Err(Error::NonPositive {
                name: "surface tension at temperature",
                value: g.to_f64_lossy(),
            });
        }
        Ok(g)
    }
}

/// r_K = 2·γ·V·cos θ / (R·T·ln(1/x)) for an explicit contact angle in degrees.
///
/// Returns `Unbounded` when cos θ ≤ 0 (θ ≥ 90°): condensation then happens
/// only at saturation, whatever the radius.
pub fn kelvin_radius_for_angle<T: Real>(
    x: RelativePressure<T>,
    temperature: T,
    surface_tension: T,
    molar_volume: T,
    theta_deg: T,
    gas_constant: T,
) -> Result<KelvinRadius<T>> {
    let xv = x.value();
    if xv <= T::zero() {
        return Err(Error::OpenUnitInterval {
            name: "relative pressure for Kelvin radius",
            value: xv.to_f64_lossy(),
        });
    }
    if temperature <= T::zero() || !temperature.is_finite() {
        return Err(Error::NonPositive {
            name: "temperature",
            value: temperature.to_f64_lossy(),
        });
    }
    // Branch on the angle, not on cos θ: cos(90°) rounds to ~6e-17, not 0.
    if theta_deg >= T::of(90.0) {
        return Ok(KelvinRadius::Unbounded);
    }
    let cos_theta = theta_deg.to_radians().cos();
    let two = T::of(2.0);
    let ln_inv = -(xv.ln()); // ln(1/x) > 0 on (0, 1)
    Ok(KelvinRadius::Finite(
        two * surface_tension * molar_volume * cos_theta / (gas_constant * temperature * ln_inv),
    ))
}

/// Branch-resolved Kelvin radius; strictly increasing in x.
pub fn kelvin_radius<T: Real>(
    x: RelativePressure<T>,
    temperature: T,
    kp: &KelvinParameters<T>,
    branch: SorptionBranch,
    gas_constant: T,
) -> Result<KelvinRadius<T>> {
    kelvin_radius_for_angle(
        x,
        temperature,
        kp.surface_tension_at(temperature)?,
        kp.molar_volume,
        kp.theta_deg(branch),
        gas_constant,
    )
}

/// Inverse of `kelvin_radius`: x = exp(−2·γ·V·cos θ / (r·R·T)).
pub fn kelvin_rh<T: Real>(
    radius: T,
    temperature: T,
    kp: &KelvinParameters<T>,
    branch: SorptionBranch,
    gas_constant: T,
) -> Result<RelativePressure<T>> {
    if radius <= T::zero() || !radius.is_finite() {
        return Err(Error::NonPositive {
            name: "pore radius",
            value: radius.to_f64_lossy(),
        });
    }
    if temperature <= T::zero() || !temperature.is_finite() {
        return Err(Error::NonPositive {
            name: "temperature",
            value: temperature.to_f64_lossy(),
        });
    }
    let cos_theta = kp.theta_deg(branch).to_radians().cos();
    let two = T::of(2.0);
    let exponent = -two * kp.surface_tension_at(temperature)? * kp.molar_volume * cos_theta
        / (radius * gas_constant * temperature);
    let mut x = exponent.exp();
    // For very large radii the exponent underflows and exp rounds to 1.
    if x >= T::one() {
        x = T::one() - T::epsilon();
    }
    RelativePressure::new(x)
}

/// Truncated log-normal pore-radius distribution discretized into
/// geometrically spaced bins with volume (r²-weighted) quadrature weights.
///
/// Number-weighted statistics are kept alongside for comparison with imaged
/// pore-diameter ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct PoreSizeDistribution<T> {
    median_radius: T,
    sigma_log: T,
    r_min: T,
    r_max: T,
    bins: usize,
    /// Bin edges, ascending, length bins + 1.
    edges: Vec<T>,
    /// Representative (log-midpoint) radius per bin.
    radii: Vec<T>,
    /// Volume-weighted bin masses, normalized to sum to 1.
    volume_weights: Vec<T>,
    /// Number-weighted bin masses, normalized to sum to 1.
    number_weights: Vec<T>,
    /// Prefix sums of volume_weights at each edge (length bins + 1).
    cumulative_volume: Vec<T>,
    /// Unnormalized total of the volume integral, for sub-bin fractions.
    raw_volume_total: T,
}

/// Panels per bin for the composite-Simpson bin integrals.
const SIMPSON_PANELS: usize = 16;

fn simpson<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, panels: usize) -> T {
    debug_assert!(panels >= 2 && panels.is_multiple_of(2));
    let n = T::from_usize(panels).unwrap();
    let h = (b - a) / n;
    let mut sum = f(a) + f(b);
    let two = T::of(2.0);
    let four = T::of(4.0);
    for i in 1..panels {
        let x = a + h * T::from_usize(i).unwrap();
        sum = sum + if i % 2 == 1 { four * f(x) } else { two * f(x) };
    }
    sum * h / T::of(3.0)
}

impl<T: Real> PoreSizeDistribution<T> {
    pub fn new(median_radius: T, sigma_log: T, r_min: T, r_max: T, bins: usize) -> Result<Self> {
        if !(r_min > T::zero() && r_min < median_radius && median_radius < r_max) {
            return Err(Error::OutOfRange {
                name: "pore-size distribution radii (require 0 < r_min < median < r_max)",
                value: median_radius.to_f64_lossy(),
                min: r_min.to_f64_lossy(),
                max: r_max.to_f64_lossy(),
            });
        }
        if sigma_log <= T::zero() || !sigma_log.is_finite() {
            return Err(Error::NonPositive {
                name: "sigma_log",
                value: sigma_log.to_f64_lossy(),
            });
        }
        if bins < 16 {
            return Err(Error::OutOfRange {
                name: "psd bins",
                value: bins as f64,
                min: 16.0,
                max: f64::INFINITY,
            });
        }

        let m = median_radius.ln();
        let u_min = r_min.ln();
        let u_max = r_max.ln();
        let du = (u_max - u_min) / T::from_usize(bins).unwrap();

        // Densities in u = ln r, constants dropped (normalization removes them):
        // number: exp(-(u-m)^2 / 2σ²); volume: e^{2u} · number (the extra e^u
        // from dr = r·du plus r² volume weighting gives e^{3u}·pdf_r(e^u)·e^{-u}).
        let gauss = move |u: T| {
            let z = (u - m) / sigma_log;
            (-z * z / T::of(2.0)).exp()
        };
        let volume_density = move |u: T| (T::of(2.0) * u).exp() * gauss(u);

        let mut edges = Vec::with_capacity(bins + 1);
        for i in 0..=bins {
            edges.push((u_min + du * T::from_usize(i).unwrap()).exp());
        }
        // Pin the outer edges to the exact truncation bounds.
        edges[0] = r_min;
        edges[bins] = r_max;

        let mut radii = Vec::with_capacity(bins);
        let mut vol_raw = Vec::with_capacity(bins);
        let mut num_raw = Vec::with_capacity(bins);
        for i in 0..bins {
            let (a, b) = (edges[i].ln(), edges[i + 1].ln());
            radii.push(((a + b) / T::of(2.0)).exp());
            vol_raw.push(simpson(volume_density, a, b, SIMPSON_PANELS));
            num_raw.push(simpson(gauss, a, b, SIMPSON_PANELS));
        }

        let raw_volume_total = vol_raw.iter().fold(T::zero(), |acc, &w| acc + w);
        let num_total = num_raw.iter().fold(T::zero(), |acc, &w| acc + w);
        let volume_weights: Vec<T> = vol_raw.iter().map(|&w| w / raw_volume_total).collect();
        let number_weights: Vec<T> = num_raw.iter().map(|&w| w / num_total).collect();

        let mut cumulative_volume = Vec::with_capacity(bins + 1);
        let mut acc = T::zero();
        cumulative_volume.push(acc);
        for &w in &volume_weights {
            acc = acc + w;
            cumulative_volume.push(acc);
        }
        cumulative_volume[bins] = T::one();

        Ok(Self {
            median_radius,
            sigma_log,
            r_min,
            r_max,
            bins,
            edges,
            radii,
            volume_weights,
            number_weights,
            cumulative_volume,
            raw_volume_total,
        })
    }

    pub fn median_radius(&self) -> T {
        self.median_radius
    }

    pub fn sigma_log(&self) -> T {
        self.sigma_log
    }

    pub fn r_min(&self) -> T {
        self.r_min
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn edges(&self) -> &[T] {
        &self.edges
    }

    /// Representative radius per bin, ascending.
    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    pub fn volume_weights(&self) -> &[T] {
        &self.volume_weights
    }

    pub fn number_weights(&self) -> &[T] {
        &self.number_weights
    }

    /// Number-weighted mean pore diameter (for comparison with imaging).
    pub fn number_mean_diameter(&self) -> T {
        let mean_r = self
            .radii
            .iter()
            .zip(&self.number_weights)
            .fold(T::zero(), |acc, (&r, &w)| acc + r * w);
        mean_r * T::of(2.0)
    }

    fn volume_density_at(&self, u: T) -> T {
        let z = (u - self.median_radius.ln()) / self.sigma_log;
        (T::of(2.0) * u).exp() * (-z * z / T::of(2.0)).exp()
    }

    /// Unnormalized volume integral over [a, b] (radii inside the support).
    fn raw_volume_between(&self, a: T, b: T) -> T {
        if b <= a {
            return T::zero();
        }
        simpson(|u| self.volume_density_at(u), a.ln(), b.ln(), SIMPSON_PANELS)
    }

    /// Index of the bin whose [edge_i, edge_{i+1}) range contains r.
    fn bin_containing(&self, r: T) -> usize {
        let mut lo = 0usize;
        let mut hi = self.bins;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.edges[mid] <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Fraction of one bin's volume lying below `r` (r inside the bin).
    fn bin_fraction_below(&self, bin: usize, r: T) -> T {
        let raw_bin = self.volume_weights[bin] * self.raw_volume_total;
        if raw_bin <= T::zero() {
            return T::zero();
        }
        let f = self.raw_volume_between(self.edges[bin], r) / raw_bin;
        f.max(T::zero()).min(T::one())
    }
}

impl<T: Real> Default for PoreSizeDistribution<T> {
    /// 6…9 nm imaged pore diameters: median radius 3.75 nm, log-normal shape
    /// 0.2, truncated to 1…20 nm, 256 bins.
    fn default() -> Self {
        Self::new(T::of(3.75e-9), T::of(0.2), T::of(1e-9), T::of(2e-8), 256)
            .expect("default distribution is valid")
    }
}

/// Volume fraction of pores with radius at or below `r_cut`. The cut bin is
/// resolved fractionally, so the result is continuous and nondecreasing.
pub fn condensed_volume_fraction<T: Real>(
    psd: &PoreSizeDistribution<T>,
    r_cut: KelvinRadius<T>,
) -> T {
    let r = match r_cut {
        KelvinRadius::Unbounded => return T::one(),
        KelvinRadius::Finite(r) => r,
    };
    if r < psd.r_min {
        return T::zero();
    }
    if r >= psd.r_max {
        return T::one();
    }
    let bin = psd.bin_containing(r);
    let f = psd.cumulative_volume[bin] + psd.volume_weights[bin] * psd.bin_fraction_below(bin, r);
    f.max(T::zero()).min(T::one())
}

/// Hysteresis memory: which pores currently hold capillary condensate.
///
/// The flags always form a prefix of the radius-sorted bins (all pores below
/// the condensation cut are filled, all above are empty); `cut_radius` keeps
/// the continuous position of that front inside the marginal bin.
#[derive(Debug, Clone, PartialEq)]
pub struct PoreFillState<T> {
    /// Per-bin condensation flags, aligned with `PoreSizeDistribution::radii`.
    filled: Vec<bool>,
    /// Continuous condensation cut: pores with r <= cut hold condensate.
    cut_radius: T,
    /// Relative pressure of the most recent update (0 before any update).
    last_x: T,
    /// Temperature of the most recent update, K (0 before any update).
    last_temperature: T,
}

impl<T: Real> PoreFillState<T> {
    /// All-empty state for the given distribution.
    pub fn empty(psd: &PoreSizeDistribution<T>) -> Self {
        Self {
            filled: vec![false; psd.bins()],
            cut_radius: T::zero(),
            last_x: T::zero(),
            last_temperature: T::zero(),
        }
    }

    pub fn filled(&self) -> &[bool] {
        &self.filled
    }

    pub fn cut_radius(&self) -> T {
        self.cut_radius
    }

    pub fn last_x(&self) -> T {
        self.last_x
    }

    pub fn last_temperature(&self) -> T {
        self.last_temperature
    }

    pub fn filled_count(&self) -> usize {
        self.filled.iter().filter(|&&f| f).count()
    }

    /// True when the flags form a prefix of the radius-sorted bins.
    pub fn is_prefix(&self) -> bool {
        let mut seen_empty = false;
        for &f in &self.filled {
            if f && seen_empty {
                return false;
            }
            seen_empty = seen_empty || !f;
        }
        true
    }
}

/// Advances the fill state to relative pressure `x` at temperature `T`.
///
/// Per bin of radius r: the bin becomes filled if r ≤ r_K(adsorption), becomes
/// empty if r > r_K(desorption), and otherwise keeps its flag. Equivalently
/// the continuous cut is clamped into [r_K,ads, r_K,des]. At x = 0 both
/// thresholds vanish and the state empties (their x → 0 limit;
/// `kelvin_radius` itself rejects x = 0).
pub fn update_fill_state<T: Real>(
    state: PoreFillState<T>,
    x: RelativePressure<T>,
    temperature: T,
    kp: &KelvinParameters<T>,
    psd: &PoreSizeDistribution<T>,
    gas_constant: T,
) -> Result<PoreFillState<T>> {
    if state.filled.len() != psd.bins() {
        return Err(Error::BinCountMismatch {
            state: state.filled.len(),
            psd: psd.bins(),
        });
    }
    let (ads, des) = if x.value() == T::zero() {
        (KelvinRadius::Finite(T::zero()), KelvinRadius::Finite(T::zero()))
    } else {
        (
            kelvin_radius(x, temperature, kp, SorptionBranch::Adsorption, gas_constant)?,
            kelvin_radius(x, temperature, kp, SorptionBranch::Desorption, gas_constant)?,
        )
    };
    let lower = match ads {
        KelvinRadius::Finite(r) => r,
        KelvinRadius::Unbounded => T::zero(),
    };
    let cut = match des {
        KelvinRadius::Finite(r) => state.cut_radius.max(lower).min(r),
        KelvinRadius::Unbounded => state.cut_radius.max(lower),
    };
    let filled = psd.radii().iter().map(|&r| r <= cut).collect();
    Ok(PoreFillState {
        filled,
        cut_radius: cut,
        last_x: x.value(),
        last_temperature: temperature,
    })
}

fn annular_film_fill<T: Real>(radius: T, t_film: T) -> T {
    if t_film >= radius {
        return T::one();
    }
    let open = T::one() - t_film / radius;
    T::one() - open * open
}

/// Total water volume fraction: condensation-filled pores count fully, open
/// pores carry an annular film of thickness `t_film` (clamped to the radius),
/// and the bin holding the condensation front is blended by the exact volume
/// split at the continuous cut.
pub fn water_fill_fraction<T: Real>(
    state: &PoreFillState<T>,
    psd: &PoreSizeDistribution<T>,
    t_film: T,
) -> Result<T> {
    if state.filled.len() != psd.bins() {
        return Err(Error::BinCountMismatch {
            state: state.filled.len(),
            psd: psd.bins(),
        });
    }
    if t_film < T::zero() || !t_film.is_finite() {
        return Err(Error::Negative {
            name: "film thickness",
            value: t_film.to_f64_lossy(),
        });
    }
    let cut = state.cut_radius;
    let edges = psd.edges();
    let radii = psd.radii();
    let weights = psd.volume_weights();
    let mut w = T::zero();
    for i in 0..psd.bins() {
        let (lo, hi) = (edges[i], edges[i + 1]);
        let wi = weights[i];
        if cut >= hi {
            w = w + wi;
        } else {
            let film = annular_film_fill(radii[i], t_film);
            if cut <= lo {
                w = w + wi * film;
            } else {
                let condensed = psd.bin_fraction_below(i, cut);
                w = w + wi * (condensed + (T::one() - condensed) * film);
            }
        }
    }
    Ok(w.max(T::zero()).min(T::one()))
}
