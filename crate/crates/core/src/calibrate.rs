//! Inverse problem: fit selected sensor parameters to measured
//! capacitance–RH data with bounded, damped Gauss–Newton least squares, plus
//! the classic linearized BET regression.

use crate::adsorption::{bet_transform, RelativePressure};
use crate::capillary::{update_fill_state, PoreFillState, PoreSizeDistribution};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sensor::{Branch, SensorConfig};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const KELVIN_OFFSET: f64 = 273.15;

/// One measured point. Capacitance is stored in farads; residuals are
/// evaluated in picofarads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement<T> {
    pub rh_percent: T,
    /// Measured capacitance, F.
    pub capacitance: T,
    pub temp_c: T,
    /// Optional direction tag carried through from the instrument log.
    pub branch: Option<Branch>,
}

/// Ordered measurement log, replayed in acquisition order so the hysteresis
/// state seen by the model matches the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet<T> {
    rows: Vec<Measurement<T>>,
}

impl<T: Real> MeasurementSet<T> {
    pub fn new(rows: Vec<Measurement<T>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        for m in &rows {
            if !(m.rh_percent >= T::zero() && m.rh_percent <= T::of(100.0)) {
                return Err(Error::OutOfRange {
                    name: "measured RH percent",
                    value: m.rh_percent.to_f64_lossy(),
                    min: 0.0,
                    max: 100.0,
                });
            }
            if m.capacitance <= T::zero() || !m.capacitance.is_finite() {
                return Err(Error::NonPositive {
                    name: "measured capacitance",
                    value: m.capacitance.to_f64_lossy(),
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Measurement<T>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Model-minus-measured capacitance in pF, elementwise, replaying the
/// measured RH/temperature path from the all-empty (dry) state.
pub fn residuals<T: Real>(cfg: &SensorConfig<T>, data: &MeasurementSet<T>) -> Result<Vec<T>> {
    cfg.validate()?;
    let pf = T::of(1e12);
    let mut state = PoreFillState::empty(&cfg.psd);
    let mut out = Vec::with_capacity(data.len());
    for m in data.rows() {
        let x = RelativePressure::from_rh_percent(m.rh_percent)?;
        let temperature = m.temp_c + T::of(KELVIN_OFFSET);
        state = update_fill_state(
            state,
            x,
            temperature,
            &cfg.kelvin,
            &cfg.psd,
            cfg.constants.gas_constant,
        )?;
        let sample = crate::sensor::capacitance_at(cfg, x, temperature, &state, T::zero())?;
        out.push((sample.capacitance - m.capacitance) * pf);
    }
    Ok(out)
}

/// Names accepted by `FitParameter::name`, addressing scalar fields of
/// `SensorConfig`.
pub const FITTABLE_PARAMETERS: &[&str] = &[
    "bet.monolayer_capacity",
    "bet.heat_first_layer",
    "bet.heat_condensation",
    "bet.max_layers",
    "kelvin.surface_tension",
    "kelvin.molar_volume",
    "kelvin.theta_adv",
    "kelvin.theta_rec",
    "psd.median_radius",
    "psd.sigma_log",
    "stack.area",
    "stack.oxide_thickness",
    "stack.alumina_thickness",
    "stack.porosity",
    "eps.alumina",
    "eps.water",
    "eps.oxide",
    "surface.onset_rh",
    "surface.gain",
    "diffusion.u_max",
    "diffusion.tau0",
    "diffusion.activation_energy",
    "diffusion.t_ref",
    "diffusion.t_scale",
];

/// Reads the named scalar from a config.
pub fn get_parameter<T: Real>(cfg: &SensorConfig<T>, name: &str) -> Result<T> {
    let v = match name {
        "bet.monolayer_capacity" => cfg.bet.monolayer_capacity,
        "bet.heat_first_layer" => cfg.bet.heat_first_layer,
        "bet.heat_condensation" => cfg.bet.heat_condensation,
        "bet.max_layers" => cfg.bet.max_layers,
        "kelvin.surface_tension" => cfg.kelvin.surface_tension,
        "kelvin.molar_volume" => cfg.kelvin.molar_volume,
        "kelvin.theta_adv" => cfg.kelvin.theta_advancing_deg,
        "kelvin.theta_rec" => cfg.kelvin.theta_receding_deg,
        "psd.median_radius" => cfg.psd.median_radius(),
        "psd.sigma_log" => cfg.psd.sigma_log(),
        "stack.area" => cfg.stack.area,
        "stack.oxide_thickness" => cfg.stack.oxide_thickness,
        "stack.alumina_thickness" => cfg.stack.alumina_thickness,
        "stack.porosity" => cfg.stack.porosity,
        "eps.alumina" => cfg.eps.alumina,
        "eps.water" => cfg.eps.water,
        "eps.oxide" => cfg.eps.oxide,
        "surface.onset_rh" => cfg.surface.onset_rh,
        "surface.gain" => cfg.surface.gain,
        "diffusion.u_max" => cfg.diffusion.max_uptake,
        "diffusion.tau0" => cfg.diffusion.tau0,
        "diffusion.activation_energy" => cfg.diffusion.activation_energy,
        "diffusion.t_ref" => cfg.diffusion.t_ref,
        "diffusion.t_scale" => cfg.diffusion.t_scale,
        other => return Err(Error::UnknownParameter(other.to_string())),
    };
    Ok(v)
}

/// Returns a copy of `cfg` with the named scalar replaced. Component
/// invariants are re-validated; the pore-size distribution is rebuilt when
/// one of its parameters changes.
pub fn set_parameter<T: Real>(cfg: &SensorConfig<T>, name: &str, value: T) -> Result<SensorConfig<T>> {
    let mut next = cfg.clone();
    match name {
        "bet.monolayer_capacity" => next.bet.monolayer_capacity = value,
        "bet.heat_first_layer" => next.bet.heat_first_layer = value,
        "bet.heat_condensation" => next.bet.heat_condensation = value,
        "bet.max_layers" => next.bet.max_layers = value,
        "kelvin.surface_tension" => next.kelvin.surface_tension = value,
        "kelvin.molar_volume" => next.kelvin.molar_volume = value,
        "kelvin.theta_adv" => next.kelvin.theta_advancing_deg = value,
        "kelvin.theta_rec" => next.kelvin.theta_receding_deg = value,
        "psd.median_radius" => {
            next.psd = PoreSizeDistribution::new(
                value,
                cfg.psd.sigma_log(),
                cfg.psd.r_min(),
                cfg.psd.r_max(),
                cfg.psd.bins(),
            )?;
        }
        "psd.sigma_log" => {
            next.psd = PoreSizeDistribution::new(
                cfg.psd.median_radius(),
                value,
                cfg.psd.r_min(),
                cfg.psd.r_max(),
                cfg.psd.bins(),
            )?;
        }
        "stack.area" => next.stack.area = value,
        "stack.oxide_thickness" => next.stack.oxide_thickness = value,
        "stack.alumina_thickness" => next.stack.alumina_thickness = value,
        "stack.porosity" => next.stack.porosity = value,
        "eps.alumina" => next.eps.alumina = value,
        "eps.water" => next.eps.water = value,
        "eps.oxide" => next.eps.oxide = value,
        "surface.onset_rh" => next.surface.onset_rh = value,
        "surface.gain" => next.surface.gain = value,
        "diffusion.u_max" => next.diffusion.max_uptake = value,
        "diffusion.tau0" => next.diffusion.tau0 = value,
        "diffusion.activation_energy" => next.diffusion.activation_energy = value,
        "diffusion.t_ref" => next.diffusion.t_ref = value,
        "diffusion.t_scale" => next.diffusion.t_scale = value,
        other => return Err(Error::UnknownParameter(other.to_string())),
    }
    next.validate()?;
    Ok(next)
}

/// One free parameter with box bounds and a starting value.
#[derive(Debug, Clone, PartialEq)]
pub struct FitParameter<T> {
    pub name: String,
    pub initial: T,
    pub lower: T,
    pub upper: T,
}

/// Fit controls. `tolerance` is the relative objective decrease below which
/// an accepted step counts as converged (three in a row stop the fit);
/// `gradient_tolerance` stops once the gradient norm falls below that
/// fraction of its initial value.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSpec<T> {
    pub parameters: Vec<FitParameter<T>>,
    pub max_iterations: usize,
    pub tolerance: T,
    pub gradient_tolerance: T,
    /// Seed for the optional Latin-hypercube multi-start.
    pub seed: u64,
    /// Extra seeded restarts drawn inside the bounds; 0 fits once from the
    /// declared initial values.
    pub restarts: usize,
}

impl<T: Real> Default for FitSpec<T> {
    fn default() -> Self {
        Self {
            parameters: Vec::new(),
            max_iterations: 100,
            tolerance: T::of(1e-10),
            gradient_tolerance: T::of(1e-10),
            seed: 0,
            restarts: 0,
        }
    }
}

/// Fit outcome: fitted values, residual level, bookkeeping and the updated
/// config.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult<T> {
    pub names: Vec<String>,
    pub initial_values: Vec<T>,
    pub values: Vec<T>,
    /// Root-mean-square residual, pF.
    pub rms_residual_pf: T,
    pub iterations: usize,
    /// Total residual-vector evaluations, including finite-difference probes.
    pub evaluations: usize,
    pub converged: bool,
    /// Objective (sum of squared pF residuals) after each accepted step,
    /// starting with the initial point; nonincreasing.
    pub objective_trace: Vec<T>,
    pub config: SensorConfig<T>,
}

struct Objective<'a, T> {
    base: &'a SensorConfig<T>,
    names: Vec<String>,
    data: &'a MeasurementSet<T>,
    evaluations: usize,
}

impl<'a, T: Real> Objective<'a, T> {
    fn apply(&self, params: &[T]) -> Result<SensorConfig<T>> {
        let mut cfg = self.base.clone();
        for (name, &value) in self.names.iter().zip(params) {
            cfg = set_parameter(&cfg, name, value)?;
        }
        Ok(cfg)
    }

    fn eval(&mut self, params: &[T]) -> Result<(Vec<T>, T)> {
        self.evaluations += 1;
        let cfg = self.apply(params)?;
        let r = residuals(&cfg, self.data)?;
        let f = r.iter().fold(T::zero(), |acc, &v| acc + v * v);
        Ok((r, f))
    }
}

/// Solves A·x = b in place via Gaussian elimination with partial pivoting.
/// Returns None when the system is singular to working precision.
fn solve_dense<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() <= T::zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        let pivot_b = b[col];
        for row in col + 1..n {
            let factor = a[row][col] / pivot_row[col];
            for (entry, &p) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                *entry = *entry - factor * p;
            }
            b[row] = b[row] - factor * pivot_b;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut sum = b[row];
        for k in row + 1..n {
            sum = sum - a[row][k] * x[k];
        }
        if !a[row][row].is_finite() || a[row][row] == T::zero() {
            return None;
        }
        x[row] = sum / a[row][row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

const FD_RELATIVE_STEP: f64 = 1e-6;
const FD_STEP_FLOOR: f64 = 1e-12;

struct LmRun<T> {
    params: Vec<T>,
    objective: T,
    iterations: usize,
    converged: bool,
    trace: Vec<T>,
}

fn run_lm<T: Real>(
    obj: &mut Objective<'_, T>,
    spec: &FitSpec<T>,
    start: &[T],
    lower: &[T],
    upper: &[T],
) -> Result<LmRun<T>> {
    let k = start.len();
    let mut params = start.to_vec();
    let (mut residual, mut f) = obj.eval(&params).map_err(|_| Error::NonFiniteObjective)?;
    if !f.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let mut trace = vec![f];
    let mut lambda = T::of(1e-3);
    let mut initial_gradient_norm: Option<T> = None;
    let mut small_streak = 0usize;
    let mut converged = false;
    let mut iterations = 0usize;

    'outer: for _ in 0..spec.max_iterations {
        iterations += 1;
        if f == T::zero() {
            converged = true;
            break;
        }

        // Central finite-difference Jacobian, relative step 1e-6 floored at
        // 1e-12; falls back to a one-sided difference when a probe leaves the
        // model's validity region.
        let m = residual.len();
        let mut jacobian = vec![vec![T::zero(); k]; m];
        for col in 0..k {
            let h = (params[col].abs() * T::of(FD_RELATIVE_STEP)).max(T::of(FD_STEP_FLOOR));
            let mut plus = params.clone();
            plus[col] = params[col] + h;
            let mut minus = params.clone();
            minus[col] = params[col] - h;
            let r_plus = obj.eval(&plus).ok().map(|(r, _)| r);
            let r_minus = obj.eval(&minus).ok().map(|(r, _)| r);
            match (r_plus, r_minus) {
                (Some(rp), Some(rm)) => {
                    let twoh = T::of(2.0) * h;
                    for (jrow, (p, q)) in jacobian.iter_mut().zip(rp.iter().zip(&rm)) {
                        jrow[col] = (*p - *q) / twoh;
                    }
                }
                (Some(rp), None) => {
                    for (jrow, (p, r0)) in jacobian.iter_mut().zip(rp.iter().zip(&residual)) {
                        jrow[col] = (*p - *r0) / h;
                    }
                }
                (None, Some(rm)) => {
                    for (jrow, (q, r0)) in jacobian.iter_mut().zip(rm.iter().zip(&residual)) {
                        jrow[col] = (*r0 - *q) / h;
                    }
                }
                (None, None) => {}
            }
        }

        // Gradient of ½‖r‖²: g = Jᵀ r.
        let mut gradient = vec![T::zero(); k];
        for col in 0..k {
            let mut g = T::zero();
            for row in 0..m {
                g = g + jacobian[row][col] * residual[row];
            }
            gradient[col] = g;
        }
        let gnorm = gradient
            .iter()
            .fold(T::zero(), |acc, &g| acc.max(g.abs()));
        let g0 = *initial_gradient_norm.get_or_insert(gnorm);
        if gnorm <= spec.gradient_tolerance * g0 {
            converged = true;
            break;
        }

        // Normal equations JᵀJ with Marquardt diagonal damping.
        let mut jtj = vec![vec![T::zero(); k]; k];
        for i in 0..k {
            for j in i..k {
                let mut s = T::zero();
                for row in 0..m {
                    s = s + jacobian[row][i] * jacobian[row][j];
                }
                jtj[i][j] = s;
                jtj[j][i] = s;
            }
        }

        let mut accepted = false;
        for _ in 0..24 {
            let mut damped = jtj.clone();
            for i in 0..k {
                let diag = jtj[i][i].max(T::of(1e-30));
                damped[i][i] = jtj[i][i] + lambda * diag;
            }
            let rhs: Vec<T> = gradient.iter().map(|&g| -g).collect();
            let step = match solve_dense(damped, rhs) {
                Some(s) => s,
                None => {
                    lambda = lambda * T::of(10.0);
                    continue;
                }
            };
            let mut candidate = params.clone();
            let mut moved = false;
            for i in 0..k {
                let v = (params[i] + step[i]).max(lower[i]).min(upper[i]);
                if v != candidate[i] {
                    moved = true;
                }
                candidate[i] = v;
            }
            if !moved {
                lambda = lambda * T::of(10.0);
                if lambda > T::of(1e14) {
                    break 'outer;
                }
                continue;
            }
            match obj.eval(&candidate) {
                Ok((rc, fc)) if fc.is_finite() && fc < f => {
                    let decrease = (f - fc) / f.max(T::of(1e-300));
                    params = candidate;
                    residual = rc;
                    f = fc;
                    trace.push(f);
                    lambda = (lambda / T::of(10.0)).max(T::of(1e-12));
                    if decrease < spec.tolerance {
                        small_streak += 1;
                    } else {
                        small_streak = 0;
                    }
                    accepted = true;
                    break;
                }
                _ => {
                    lambda = lambda * T::of(10.0);
                    if lambda > T::of(1e14) {
                        break;
                    }
                }
            }
        }

        if small_streak >= 3 {
            converged = true;
            break;
        }
        if !accepted {
            // No improving step exists at any damping: stalled.
            break;
        }
    }

    Ok(LmRun {
        params,
        objective: f,
        iterations,
        converged,
        trace,
    })
}

/// Bounded least-squares fit of the named parameters against a measurement
/// log. Deterministic for a given (data, spec, base) triple.
pub fn fit<T: Real>(
    data: &MeasurementSet<T>,
    spec: &FitSpec<T>,
    base: &SensorConfig<T>,
) -> Result<FitResult<T>> {
    for p in &spec.parameters {
        get_parameter(base, &p.name)?;
        let ok = p.lower.is_finite()
            && p.upper.is_finite()
            && p.lower < p.upper
            && p.initial >= p.lower
            && p.initial <= p.upper;
        if !ok {
            return Err(Error::InvalidBounds {
                name: p.name.clone(),
                initial: p.initial.to_f64_lossy(),
                lower: p.lower.to_f64_lossy(),
                upper: p.upper.to_f64_lossy(),
            });
        }
    }

    let names: Vec<String> = spec.parameters.iter().map(|p| p.name.clone()).collect();
    let mut objective = Objective {
        base,
        names: names.clone(),
        data,
        evaluations: 0,
    };

    // Degenerate spec: nothing to fit, report the base config as-is.
    if spec.parameters.is_empty() {
        let r = residuals(base, data)?;
        let f = r.iter().fold(T::zero(), |acc, &v| acc + v * v);
        if !f.is_finite() {
            return Err(Error::NonFiniteObjective);
        }
        let n = T::from_usize(r.len()).unwrap();
        return Ok(FitResult {
            names,
            initial_values: Vec::new(),
            values: Vec::new(),
            rms_residual_pf: (f / n).sqrt(),
            iterations: 0,
            evaluations: 1,
            converged: true,
            objective_trace: vec![f],
            config: base.clone(),
        });
    }

    let initial: Vec<T> = spec.parameters.iter().map(|p| p.initial).collect();
    let lower: Vec<T> = spec.parameters.iter().map(|p| p.lower).collect();
    let upper: Vec<T> = spec.parameters.iter().map(|p| p.upper).collect();

    let mut best = run_lm(&mut objective, spec, &initial, &lower, &upper)?;

    if spec.restarts > 0 {
        // Latin-hypercube starts: one stratum per restart and dimension.
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let k = initial.len();
        let n = spec.restarts;
        let mut starts = vec![vec![T::zero(); k]; n];
        for dim in 0..k {
            let mut order: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            let span = upper[dim] - lower[dim];
            for (start, &cell) in starts.iter_mut().zip(&order) {
                let u: f64 = rng.gen_range(0.0..1.0);
                let frac = (cell as f64 + u) / n as f64;
                start[dim] = lower[dim] + span * T::of(frac);
            }
        }
        for start in &starts {
            if let Ok(run) = run_lm(&mut objective, spec, start, &lower, &upper) {
                if run.objective < best.objective {
                    best = run;
                }
            }
        }
    }

    let cfg = objective.apply(&best.params)?;
    let n = T::from_usize(data.len()).unwrap();
    Ok(FitResult {
        names,
        initial_values: initial,
        values: best.params,
        rms_residual_pf: (best.objective / n).sqrt(),
        iterations: best.iterations,
        evaluations: objective.evaluations,
        converged: best.converged,
        objective_trace: best.trace,
        config: cfg,
    })
}

/// Result of the linearized BET regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetLineFit<T> {
    /// Monolayer capacity v_m in the unit of the supplied v values.
    pub monolayer_capacity: T,
    /// Energy constant c.
    pub energy_constant: T,
    /// Intercept 1/(v_m·c) of the BET plot.
    pub intercept: T,
    /// Slope (c−1)/(v_m·c) of the BET plot.
    pub slope: T,
}

/// Ordinary least squares through the BET-plot points (x, x/(v(1−x))),
/// recovering v_m = 1/(a+b) and c = 1 + b/a from intercept a and slope b.
pub fn bet_linear_fit<T: Real>(points: &[(T, T)]) -> Result<BetLineFit<T>> {
    if points.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: points.len(),
        });
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(x, v) in points {
        let x = RelativePressure::new(x)?;
        ys.push(bet_transform(x, v)?);
        xs.push(x.value());
    }
    let n = T::from_usize(xs.len()).unwrap();
    let mean_x = xs.iter().fold(T::zero(), |a, &v| a + v) / n;
    let mean_y = ys.iter().fold(T::zero(), |a, &v| a + v) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx = sxx + (x - mean_x) * (x - mean_x);
        sxy = sxy + (x - mean_x) * (y - mean_y);
    }
    if sxx == T::zero() {
        return Err(Error::DegenerateBand);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    if intercept <= T::zero() || intercept + slope <= T::zero() {
        return Err(Error::NonPhysicalFit {
            intercept: intercept.to_f64_lossy(),
            slope: slope.to_f64_lossy(),
        });
    }
    Ok(BetLineFit {
        monolayer_capacity: T::one() / (intercept + slope),
        energy_constant: T::one() + slope / intercept,
        intercept,
        slope,
    })
}
