//! Parameter sweeps over `(p, ν, k)`: one trajectory per tuple, reduced to a
//! fitted decay rate, a mixing time and the envelope checks.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::functionals::{compute_constants, rates_and_times, Diagnostics, HypoConstants};
use crate::grid::RadialGrid;
use crate::ledger::{fmt_f64, EnergyLedger};
use crate::solver::{
    default_dt, default_record_every, evolve, initial_profile, FlowConfig, ModeState,
    ProfileKind, Stepper, Trajectory,
};

/// `e^{−2}`
pub const DEFAULT_MIX_THRESHOLD: f64 = 0.135_335_283_236_612_7;
/// `(upper, lower)` fractions of `x_sq(0)` bounding the fit window.
pub const DEFAULT_FIT_WINDOW: (f64, f64) = (0.5, 1e-3);
/// Sweep window: past the shearing transient, inside the slowest-mode decay.
pub const ASYMPTOTIC_FIT_WINDOW: (f64, f64) = (1e-6, 1e-10);
pub const MIN_FIT_ROWS: usize = 10;

/// First time with `x_sq ≤ threshold²·x_sq(0)`, interpolated linearly in
/// `ln x_sq`. `None` when the ledger never gets there.
pub fn mixing_time(ledger: &EnergyLedger, threshold: f64) -> Result<Option<f64>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::param("threshold", format!("must lie in (0, 1], got {threshold}")));
    }
    let rows = ledger.rows();
    let first = rows
        .first()
        .ok_or_else(|| Error::InsufficientData("empty ledger".into()))?;
    let target = threshold * threshold * first.x_sq;
    if first.x_sq <= target {
        return Ok(Some(first.t));
    }
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.x_sq <= target {
            if b.x_sq <= 0.0 {
                return Ok(Some(b.t));
            }
            let (la, lb, lt) = (a.x_sq.ln(), b.x_sq.ln(), target.ln());
            let s = if la == lb { 1.0 } else { (la - lt) / (la - lb) };
            return Ok(Some(a.t + s * (b.t - a.t)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub rms_residual: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return Err(Error::InsufficientData(format!("linear fit needs >= 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("linear fit needs distinct abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let slope_stderr = if n > 2 {
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        rms_residual: (ssr / nf).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// `−d/dt ½ ln x_sq`
    pub rate: f64,
    pub stderr: f64,
    /// RMS residual of `½ ln x_sq` about the fitted line.
    pub rms_residual: f64,
    pub rows: usize,
    /// Residual below 2% of the window's log span.
    pub exponential: bool,
}

/// Least-squares decay rate of `½ ln x_sq` over the rows between the first
/// passage below `window.0·x_sq(0)` and the first passage below `window.1·x_sq(0)`.
pub fn fit_rate(ledger: &EnergyLedger, window: (f64, f64)) -> Result<RateFit> {
    let (hi, lo) = window;
    if !(lo > 0.0 && lo < hi && hi <= 1.0) {
        return Err(Error::param("window", format!("need 0 < lower < upper <= 1, got {window:?}")));
    }
    let rows = ledger.rows();
    let x0 = rows
        .first()
        .ok_or_else(|| Error::InsufficientData("empty ledger".into()))?
        .x_sq;
    let start = rows.iter().position(|r| r.x_sq <= hi * x0);
    let end = rows.iter().position(|r| r.x_sq < lo * x0).unwrap_or(rows.len());
    let selected = match start {
        Some(s) if s < end => &rows[s..end],
        _ => &rows[0..0],
    };
    if selected.len() < MIN_FIT_ROWS {
        return Err(Error::InsufficientData(format!(
            "only {} ledger rows inside the fit window, need {MIN_FIT_ROWS}; increase t_max or record more often",
            selected.len()
        )));
    }
    let ts: Vec<f64> = selected.iter().map(|r| r.t).collect();
    let ys: Vec<f64> = selected.iter().map(|r| 0.5 * r.x_sq.ln()).collect();
    let fit = linear_fit(&ts, &ys)?;
    let span = 0.5 * (hi / lo).ln();
    Ok(RateFit {
        rate: -fit.slope,
        stderr: fit.slope_stderr,
        rms_residual: fit.rms_residual,
        rows: selected.len(),
        exponential: fit.rms_residual <= 0.02 * span,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub stderr: f64,
}

/// Slope of `ln y` against `ln ν` for `(ν, y)` pairs: at least 4 distinct
/// `ν` spanning two decades.
pub fn scaling_exponent(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if let Some(&(nu, y)) = points.iter().find(|(nu, y)| !(*nu > 0.0 && *y > 0.0)) {
        return Err(Error::param("points", format!("need positive values, got ({nu}, {y})")));
    }
    let mut nus: Vec<f64> = points.iter().map(|p| p.0).collect();
    nus.sort_by(f64::total_cmp);
    nus.dedup();
    if nus.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "scaling fit needs >= 4 distinct nu, got {}",
            nus.len()
        )));
    }
    if nus[nus.len() - 1] / nus[0] < 100.0 * (1.0 - 1e-12) {
        return Err(Error::InsufficientData("nu values must span at least two decades".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(ScalingFit {
        slope: fit.slope,
        stderr: fit.slope_stderr,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    /// `max_t Φ(t) e^{λ_thm t} / Φ(0)`
    pub phi_ratio_max: f64,
    pub phi_ok: bool,
    /// `max_t W(t) e^{λ_W t} / W(0)`
    pub c0_fit: f64,
    /// Largest relative increase of `‖f‖²` between consecutive rows.
    pub l2_max_increase: f64,
    pub l2_monotone: bool,
}

pub fn envelope_checks(
    ledger: &EnergyLedger,
    config: &FlowConfig,
    consts: &HypoConstants,
    tol: f64,
) -> Result<EnvelopeReport> {
    if config.ell == 0 {
        return Err(Error::param("ell", "envelopes need ell >= 1"));
    }
    let rates = rates_and_times(consts, config.nu, config.ell)?;
    let first = ledger
        .first()
        .ok_or_else(|| Error::InsufficientData("empty ledger".into()))?;
    let t0 = first.t;
    let mut phi_ratio_max = f64::NEG_INFINITY;
    let mut c0_fit = f64::NEG_INFINITY;
    for row in ledger.rows() {
        let dt = row.t - t0;
        phi_ratio_max = phi_ratio_max.max(row.phi * (rates.lambda_thm * dt).exp() / first.phi);
        c0_fit = c0_fit.max(row.w * (rates.lambda_w * dt).exp() / first.w);
    }
    let l2_max_increase = ledger
        .rows()
        .windows(2)
        .map(|w| (w[1].l2_sq - w[0].l2_sq) / w[0].l2_sq)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EnvelopeReport {
        phi_ratio_max,
        phi_ok: phi_ratio_max <= 1.0 + tol,
        c0_fit,
        l2_max_increase,
        l2_monotone: !(l2_max_increase > 1e-12),
    })
}

/// Simulation settings shared by every tuple of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDefaults {
    pub r_max: f64,
    pub n_cells: usize,
    pub width: f64,
    pub profile: ProfileKind,
    /// `None`: [`default_dt`].
    pub dt: Option<f64>,
    /// `None`: `min(5·T_{ν,k,ln}, 2/ν)`.
    pub t_max: Option<f64>,
    /// `None`: record every step; otherwise about this many rows.
    pub rows: Option<usize>,
    /// Stop once `x_sq < stop_fraction·x_sq(0)`; 0 disables.
    pub stop_fraction: f64,
    pub mix_threshold: f64,
    pub window: (f64, f64),
    pub envelope_tol: f64,
}

impl Default for SimDefaults {
    fn default() -> Self {
        Self {
            r_max: 8.0,
            n_cells: 2048,
            width: 1.0,
            profile: ProfileKind::GaussianMonomial,
            dt: None,
            t_max: None,
            rows: None,
            stop_fraction: 1e-11,
            mix_threshold: DEFAULT_MIX_THRESHOLD,
            window: ASYMPTOTIC_FIT_WINDOW,
            envelope_tol: 1e-4,
        }
    }
}

impl SimDefaults {
    pub fn validate(&self) -> Result<()> {
        RadialGrid::new(self.r_max, self.n_cells)?;
        if !(self.width > 0.0 && self.width < self.r_max / 4.0) {
            return Err(Error::param("width", "must lie in (0, r_max/4)"));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::param("dt", "must be positive"));
            }
        }
        if let Some(t) = self.t_max {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::param("t_max", "must be positive"));
            }
        }
        if self.rows == Some(0) {
            return Err(Error::param("rows", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.stop_fraction) {
            return Err(Error::param("stop_fraction", "must lie in [0, 1)"));
        }
        if !(self.mix_threshold > 0.0 && self.mix_threshold <= 1.0) {
            return Err(Error::param("mix_threshold", "must lie in (0, 1]"));
        }
        let (hi, lo) = self.window;
        if !(lo > 0.0 && lo < hi && hi <= 1.0) {
            return Err(Error::param("window", "need 0 < lower < upper <= 1"));
        }
        if !(self.envelope_tol >= 0.0) {
            return Err(Error::param("envelope_tol", "must be >= 0"));
        }
        Ok(())
    }

    /// Resolved flow configuration for one tuple.
    pub fn flow_config(&self, p: f64, nu: f64, k: u32) -> Result<(FlowConfig, Arc<RadialGrid>)> {
        let consts = compute_constants(p)?;
        let rates = rates_and_times(&consts, nu, k)?;
        let grid = Arc::new(RadialGrid::new(self.r_max, self.n_cells)?);
        let initial = initial_profile(self.profile, k, &grid, self.width)?;
        let t_max = self.t_max.unwrap_or((5.0 * rates.t_nu_k_ln).min(2.0 / nu));
        let dt = self.dt.unwrap_or_else(|| default_dt(p, nu, k, &initial)).min(t_max);
        let mut config = FlowConfig {
            p,
            nu,
            ell: k,
            dt,
            t_max,
            record_every: 1,
        };
        if let Some(rows) = self.rows {
            config.record_every = default_record_every(config.steps_from(0.0), rows);
        }
        config.validate()?;
        Ok((config, grid))
    }
}

/// One trajectory with the ledger recorded by [`Diagnostics`], stopping early
/// per `defaults.stop_fraction`.
pub fn simulate_mode(p: f64, nu: f64, k: u32, defaults: &SimDefaults) -> Result<(FlowConfig, Trajectory)> {
    defaults.validate()?;
    let (config, grid) = defaults.flow_config(p, nu, k)?;
    let initial = initial_profile(defaults.profile, k, &grid, defaults.width)?;
    let stepper = Stepper::new(config.clone(), grid)?;
    let diag = Diagnostics::new(p, nu, k)?;
    let state = ModeState::new(initial, 0.0, config.clone())?;
    let stop = defaults.stop_fraction;
    let mut x0 = None;
    let trajectory = evolve(state, &stepper, |s| {
        let row = diag.row(&s.field, s.t)?;
        let x0 = *x0.get_or_insert(row.x_sq);
        let flow = if stop > 0.0 && row.x_sq < stop * x0 {
            crate::solver::Flow::Stop
        } else {
            crate::solver::Flow::Continue
        };
        Ok((row, flow))
    });
    Ok((config, trajectory))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub nu: f64,
    pub k: u32,
    pub lambda_fit: Option<f64>,
    pub lambda_fit_stderr: Option<f64>,
    pub exponential: Option<bool>,
    pub tau_mix: Option<f64>,
    pub lambda_thm: f64,
    pub lambda_w: f64,
    pub t_nu_k_ln: f64,
    pub envelope_phi_ok: Option<bool>,
    pub phi_ratio_max: Option<f64>,
    pub c0_fit: Option<f64>,
    pub l2_monotone: Option<bool>,
    pub t_end: f64,
    pub ledger_rows: usize,
    /// Failure of the trajectory or of a reduction.
    pub error: Option<String>,
}

pub const SWEEP_COLUMNS: [&str; 17] = [
    "p",
    "nu",
    "k",
    "lambda_fit",
    "lambda_fit_stderr",
    "exponential",
    "tau_mix",
    "lambda_thm",
    "lambda_w",
    "t_nu_k_ln",
    "envelope_phi_ok",
    "phi_ratio_max",
    "c0_fit",
    "l2_monotone",
    "t_end",
    "ledger_rows",
    "status",
];

impl SweepRow {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.p
            .total_cmp(&other.p)
            .then(self.nu.total_cmp(&other.nu))
            .then(self.k.cmp(&other.k))
    }

    fn csv_line(&self) -> String {
        let f = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let b = |v: Option<bool>| v.map(|b| if b { "1" } else { "0" }).unwrap_or_default();
        let status = match &self.error {
            None => "ok".to_string(),
            Some(e) => format!("error: {}", e.replace([',', '\n'], ";")),
        };
        [
            fmt_f64(self.p),
            fmt_f64(self.nu),
            self.k.to_string(),
            f(self.lambda_fit),
            f(self.lambda_fit_stderr),
            b(self.exponential).into(),
            f(self.tau_mix),
            fmt_f64(self.lambda_thm),
            fmt_f64(self.lambda_w),
            fmt_f64(self.t_nu_k_ln),
            b(self.envelope_phi_ok).into(),
            f(self.phi_ratio_max),
            f(self.c0_fit),
            b(self.l2_monotone).into(),
            fmt_f64(self.t_end),
            self.ledger_rows.to_string(),
            status,
        ]
        .join(",")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Sorted by `(p, ν, k)`.
    pub rows: Vec<SweepRow>,
    /// Tuples appearing more than once in the plan.
    pub duplicates: usize,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = SWEEP_COLUMNS.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    /// `(ν, λ_fit)` for every completed row at `(p, k)`.
    pub fn rate_points(&self, p: f64, k: u32) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.p == p && r.k == k)
            .filter_map(|r| r.lambda_fit.map(|l| (r.nu, l)))
            .collect()
    }

    /// `(ν, 1/τ_mix)` for every row at `(p, k)` that mixed.
    pub fn mixing_points(&self, p: f64, k: u32) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.p == p && r.k == k)
            .filter_map(|r| r.tau_mix.filter(|&t| t > 0.0).map(|t| (r.nu, 1.0 / t)))
            .collect()
    }

    pub fn summary(&self) -> String {
        format!(
            "rows={},failures={},duplicates={}",
            self.rows.len(),
            self.failures(),
            self.duplicates
        )
    }
}

fn check_tuple(p: f64, nu: f64, k: u32) -> Result<()> {
    compute_constants(p)?;
    rates_and_times(&compute_constants(p)?, nu, k)?;
    if nu / k as f64 > 1.0 {
        return Err(Error::param("nu", "requires nu / k <= 1"));
    }
    Ok(())
}

fn run_one(p: f64, nu: f64, k: u32, defaults: &SimDefaults) -> SweepRow {
    let consts = compute_constants(p).expect("validated");
    let rates = rates_and_times(&consts, nu, k).expect("validated");
    let mut row = SweepRow {
        p,
        nu,
        k,
        lambda_fit: None,
        lambda_fit_stderr: None,
        exponential: None,
        tau_mix: None,
        lambda_thm: rates.lambda_thm,
        lambda_w: rates.lambda_w,
        t_nu_k_ln: rates.t_nu_k_ln,
        envelope_phi_ok: None,
        phi_ratio_max: None,
        c0_fit: None,
        l2_monotone: None,
        t_end: 0.0,
        ledger_rows: 0,
        error: None,
    };
    let (config, trajectory) = match simulate_mode(p, nu, k, defaults) {
        Ok(v) => v,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let ledger = &trajectory.ledger;
    row.t_end = ledger.rows().last().map_or(0.0, |r| r.t);
    row.ledger_rows = ledger.len();
    let mut errors = Vec::new();
    if let Some(e) = &trajectory.failure {
        errors.push(e.to_string());
    }
    match fit_rate(ledger, defaults.window) {
        Ok(fit) => {
            row.lambda_fit = Some(fit.rate);
            row.lambda_fit_stderr = Some(fit.stderr);
            row.exponential = Some(fit.exponential);
        }
        Err(e) => errors.push(format!("fit: {e}")),
    }
    match mixing_time(ledger, defaults.mix_threshold) {
        Ok(t) => row.tau_mix = t,
        Err(e) => errors.push(format!("mixing: {e}")),
    }
    match envelope_checks(ledger, &config, &consts, defaults.envelope_tol) {
        Ok(env) => {
            row.envelope_phi_ok = Some(env.phi_ok);
            row.phi_ratio_max = Some(env.phi_ratio_max);
            row.c0_fit = Some(env.c0_fit);
            row.l2_monotone = Some(env.l2_monotone);
        }
        Err(e) => errors.push(format!("envelope: {e}")),
    }
    if !errors.is_empty() {
        row.error = Some(errors.join("; "));
    }
    row
}

/// Run every tuple of `plan`; rows come back sorted by `(p, ν, k)` whatever
/// the execution order.
pub fn run_sweep(plan: &[(f64, f64, u32)], defaults: &SimDefaults, exec: Execution) -> Result<SweepResult> {
    if plan.is_empty() {
        return Err(Error::param("plan", "must not be empty"));
    }
    defaults.validate()?;
    for &(p, nu, k) in plan {
        check_tuple(p, nu, k)?;
        defaults.flow_config(p, nu, k)?;
    }
    let mut rows = exec.map(plan, |&(p, nu, k)| run_one(p, nu, k, defaults));
    rows.sort_by(SweepRow::key_cmp);
    let duplicates = rows
        .windows(2)
        .filter(|w| w[0].key_cmp(&w[1]) == Ordering::Equal)
        .count();
    Ok(SweepResult { rows, duplicates })
}
