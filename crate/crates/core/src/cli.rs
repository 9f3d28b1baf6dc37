//! Command implementations behind the `vortexmix` binary: settings merged from
//! a `key = value` file and command-line flags, validated up front, and
//! outputs assembled in memory before any file is written.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;

use crate::balance::{balance_residuals, gronwall_bound_check, Balance};
use crate::error::Error;
use crate::exec::Execution;
use crate::functionals::{compute_constants, rates_and_times, Diagnostics};
use crate::grid::{RadialField, RadialGrid};
use crate::ledger::{fmt_f64, write_atomic, write_record};
use crate::lemmas::{log_space, LemmaSuite};
use crate::solver::{
    default_dt, default_record_every, evolve, initial_profile, Flow, FlowConfig, ModeState,
    ProfileKind, Stepper, DEFAULT_LEDGER_ROWS,
};
use crate::sweep::{run_sweep, scaling_exponent, simulate_mode, SimDefaults};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Usage = 2,
    CheckFailed = 3,
    Numerical = 4,
}

/// A failed command: exit status plus a one-line reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub status: Status,
    pub reason: String,
}

impl Failure {
    pub fn usage(reason: impl Into<String>) -> Self {
        Self {
            status: Status::Usage,
            reason: reason.into(),
        }
    }

    fn check(reason: impl Into<String>) -> Self {
        Self {
            status: Status::CheckFailed,
            reason: reason.into(),
        }
    }

    /// `vortexmix: status=<n> kind=<usage|check|numerical> reason=<text>`
    pub fn diagnostic_line(&self) -> String {
        let kind = match self.status {
            Status::Usage => "usage",
            Status::CheckFailed => "check",
            Status::Numerical => "numerical",
            Status::Success => "ok",
        };
        format!(
            "vortexmix: status={} kind={kind} reason={}",
            self.status as i32,
            self.reason.replace('\n', " ")
        )
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidParameter { .. } | Error::GridMismatch { .. } => Status::Usage,
            Error::InsufficientData(_) => Status::CheckFailed,
            Error::NonFinite { .. } | Error::Internal(_) | Error::Numerical { .. } => {
                Status::Numerical
            }
        };
        Self {
            status,
            reason: e.to_string(),
        }
    }
}

pub type CmdResult<T> = std::result::Result<T, Failure>;

/// Keys accepted in config files and as `--key` flags.
pub const KNOWN_KEYS: [&str; 19] = [
    "p", "nu", "ell", "rmax", "cells", "dt", "tmax", "out", "seed", "width", "profile", "rows",
    "plan", "samples", "sigmas", "tol", "n_theta", "frames", "window",
];

/// Flat `key = value` settings; later sources override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> CmdResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Failure::usage(format!("config line {}: expected key = value", i + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Failure::usage(format!("config line {}: unknown key `{key}`", i + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn from_file(path: &Path) -> CmdResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    /// `self` with every entry of `other` taking precedence.
    pub fn overridden_by(mut self, other: &Settings) -> Self {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
        self
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse_one<T: std::str::FromStr>(key: &str, s: &str) -> CmdResult<T> {
        s.trim()
            .parse()
            .map_err(|_| Failure::usage(format!("invalid value `{s}` for `{key}`")))
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> CmdResult<Option<T>> {
        self.raw(key).map(|s| Self::parse_one(key, s)).transpose()
    }

    pub fn get_or<T: std::str::FromStr>(&self, key: &str, default: T) -> CmdResult<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: std::str::FromStr>(&self, key: &str) -> CmdResult<Option<Vec<T>>> {
        self.raw(key)
            .map(|s| {
                s.split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| Self::parse_one(key, t))
                    .collect()
            })
            .transpose()
    }

    pub fn list_or<T: std::str::FromStr>(&self, key: &str, default: Vec<T>) -> CmdResult<Vec<T>> {
        Ok(self.list(key)?.unwrap_or(default))
    }

    fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.raw("out").unwrap_or("."))
    }

    fn profile(&self) -> CmdResult<ProfileKind> {
        match self.raw("profile").unwrap_or("monomial") {
            "monomial" | "gaussian_monomial" => Ok(ProfileKind::GaussianMonomial),
            "polynomial" | "gaussian_polynomial" => Ok(ProfileKind::GaussianPolynomial {
                seed: self.get_or("seed", 0)?,
            }),
            other => Err(Failure::usage(format!("unknown profile `{other}`"))),
        }
    }
}

/// Result of a command: files to write, text for stdout, and whether every
/// requested check passed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<(PathBuf, String)>,
    pub stdout: String,
    pub failed_checks: Vec<String>,
}

impl Outcome {
    /// Write every file atomically, then map failed checks to a status.
    pub fn commit(&self) -> CmdResult<()> {
        for (path, contents) in &self.files {
            write_atomic(path, contents).map_err(|e| Failure {
                status: Status::Numerical,
                reason: format!("cannot write {}: {e}", path.display()),
            })?;
        }
        if self.failed_checks.is_empty() {
            Ok(())
        } else {
            Err(Failure::check(self.failed_checks.join("; ")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constants,
    Simulate,
    Sweep,
    VerifyLemmas,
    VerifyBalances,
    Snapshot,
}

pub fn run(command: Command, settings: &Settings) -> CmdResult<Outcome> {
    match command {
        Command::Constants => constants(settings),
        Command::Simulate => simulate(settings),
        Command::Sweep => sweep(settings),
        Command::VerifyLemmas => verify_lemmas(settings),
        Command::VerifyBalances => verify_balances(settings),
        Command::Snapshot => snapshot(settings),
    }
}

fn constants(s: &Settings) -> CmdResult<Outcome> {
    let p: f64 = s.get_or("p", 1.0)?;
    let c = compute_constants(p)?;
    let mut out = String::new();
    let _ = writeln!(out, "p={}", c.p);
    for (name, v) in [
        ("c1", c.c1),
        ("c2", c.c2),
        ("c3", c.c3),
        ("c_p", c.c_p),
        ("delta", c.delta),
        ("alpha0", c.alpha0),
        ("beta0", c.beta0),
        ("gamma0", c.gamma0),
        ("eps0", c.eps0),
        ("gronwall_c", c.gronwall_c),
    ] {
        let _ = writeln!(out, "{name}={v}");
    }
    let constraints = c.constraints();
    for k in &constraints {
        let _ = writeln!(
            out,
            "constraint {}: lhs={} rhs={} slack={:e} {}",
            k.name,
            k.lhs,
            k.rhs,
            k.slack(),
            if k.holds() { "pass" } else { "FAIL" }
        );
    }
    let passed = constraints.iter().filter(|k| k.holds()).count();
    let _ = writeln!(out, "constraints: {passed}/{} pass", constraints.len());
    let mut outcome = Outcome {
        stdout: out,
        ..Outcome::default()
    };
    if passed != constraints.len() {
        outcome
            .failed_checks
            .push(format!("{} constraints violated", constraints.len() - passed));
    }
    Ok(outcome)
}

fn sim_defaults(s: &Settings) -> CmdResult<SimDefaults> {
    let base = SimDefaults::default();
    let window = match s.list::<f64>("window")? {
        None => base.window,
        Some(w) if w.len() == 2 => (w[0], w[1]),
        Some(_) => return Err(Failure::usage("window needs two fractions `upper,lower`")),
    };
    let d = SimDefaults {
        r_max: s.get_or("rmax", base.r_max)?,
        n_cells: s.get_or("cells", base.n_cells)?,
        width: s.get_or("width", base.width)?,
        profile: s.profile()?,
        dt: s.get("dt")?,
        t_max: s.get("tmax")?,
        rows: s.get("rows")?,
        stop_fraction: 0.1 * window.1,
        window,
        ..base
    };
    d.validate()?;
    Ok(d)
}

fn simulate(s: &Settings) -> CmdResult<Outcome> {
    let p: f64 = s.get_or("p", 1.0)?;
    let nu: f64 = s.get_or("nu", 1e-3)?;
    let ell: u32 = s.get_or("ell", 1)?;
    let defaults = SimDefaults {
        rows: Some(s.get_or("rows", DEFAULT_LEDGER_ROWS)?),
        stop_fraction: 0.0,
        ..sim_defaults(s)?
    };
    let (config, trajectory) = if ell == 0 {
        simulate_radial(p, nu, &defaults)?
    } else {
        simulate_mode(p, nu, ell, &defaults)?
    };
    let mut outcome = Outcome::default();
    outcome
        .files
        .push((s.out_dir().join("ledger.csv"), trajectory.ledger.to_csv()));
    let last = trajectory.ledger.rows().last().copied().unwrap_or_default();
    let _ = writeln!(
        outcome.stdout,
        "p={} nu={} ell={} dt={} t_max={} rows={} t_end={} l2_sq={}",
        config.p,
        config.nu,
        config.ell,
        config.dt,
        config.t_max,
        trajectory.ledger.len(),
        last.t,
        last.l2_sq
    );
    if let Some(e) = trajectory.failure {
        return Err(Failure::from(e));
    }
    let increasing = trajectory
        .ledger
        .rows()
        .windows(2)
        .any(|w| w[1].l2_sq > w[0].l2_sq * (1.0 + 1e-12));
    if increasing {
        outcome.failed_checks.push("l2_sq increased".into());
    }
    Ok(outcome)
}

/// Radial mode `ℓ = 0`, where `Φ` and the rates are not defined.
fn simulate_radial(p: f64, nu: f64, d: &SimDefaults) -> CmdResult<(FlowConfig, crate::solver::Trajectory)> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Failure::usage("nu must lie in (0, 1]"));
    }
    let grid = Arc::new(RadialGrid::new(d.r_max, d.n_cells)?);
    let initial = initial_profile(d.profile, 0, &grid, d.width)?;
    let t_max = d.t_max.unwrap_or(1.0 / nu);
    let dt = d.dt.unwrap_or_else(|| default_dt(p, nu, 0, &initial)).min(t_max);
    let mut config = FlowConfig {
        p,
        nu,
        ell: 0,
        dt,
        t_max,
        record_every: 1,
    };
    config.record_every = default_record_every(config.steps_from(0.0), d.rows.unwrap_or(DEFAULT_LEDGER_ROWS));
    let stepper = Stepper::new(config.clone(), grid)?;
    let diag = Diagnostics::new(p, nu, 0)?;
    let state = ModeState::new(initial, 0.0, config.clone())?;
    let traj = evolve(state, &stepper, |st| Ok((diag.row(&st.field, st.t)?, Flow::Continue)));
    Ok((config, traj))
}

/// `plan = p:nu:k, ...`, or the product of the `p`, `nu` and `ell` lists.
pub fn sweep_plan(s: &Settings) -> CmdResult<Vec<(f64, f64, u32)>> {
    if let Some(plan) = s.raw("plan") {
        return plan
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                let parts: Vec<&str> = t.split(':').collect();
                if parts.len() != 3 {
                    return Err(Failure::usage(format!("plan entry `{t}` is not p:nu:k")));
                }
                Ok((
                    Settings::parse_one("plan", parts[0])?,
                    Settings::parse_one("plan", parts[1])?,
                    Settings::parse_one("plan", parts[2])?,
                ))
            })
            .collect();
    }
    let ps = s.list_or("p", vec![1.0])?;
    let nus = s.list_or("nu", vec![1e-3, 3e-4, 1e-4, 3e-5, 1e-5])?;
    let ells = s.list_or("ell", vec![1u32])?;
    let mut plan = Vec::new();
    for &p in &ps {
        for &nu in &nus {
            for &k in &ells {
                plan.push((p, nu, k));
            }
        }
    }
    Ok(plan)
}

fn sweep(s: &Settings) -> CmdResult<Outcome> {
    let plan = sweep_plan(s)?;
    let defaults = sim_defaults(s)?;
    let result = run_sweep(&plan, &defaults, Execution::default())?;
    let mut outcome = Outcome::default();
    outcome
        .files
        .push((s.out_dir().join("sweep.csv"), result.to_csv()));
    let _ = writeln!(outcome.stdout, "{}", result.summary());
    let mut keys: Vec<(f64, u32)> = plan.iter().map(|&(p, _, k)| (p, k)).collect();
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keys.dedup();
    for (p, k) in keys {
        if let Ok(fit) = scaling_exponent(&result.rate_points(p, k)) {
            let _ = writeln!(
                outcome.stdout,
                "scaling p={p} k={k}: slope={:.6} stderr={:.6} expected={:.6}",
                fit.slope,
                fit.stderr,
                p / (p + 2.0)
            );
        }
    }
    for row in result.rows.iter().filter(|r| r.error.is_some()) {
        outcome.failed_checks.push(format!(
            "row p={} nu={} k={} failed: {}",
            row.p,
            row.nu,
            row.k,
            row.error.as_deref().unwrap_or("")
        ));
    }
    Ok(outcome)
}

fn verify_lemmas(s: &Settings) -> CmdResult<Outcome> {
    let base = LemmaSuite::default();
    let n_sigma: usize = s.get_or("sigmas", base.sigmas.len())?;
    if n_sigma == 0 {
        return Err(Failure::usage("sigmas must be positive"));
    }
    let suite = LemmaSuite {
        ps: s.list_or("p", base.ps.clone())?,
        ells: s.list_or("ell", base.ells.clone())?,
        samples: s.get_or("samples", base.samples)?,
        sigmas: log_space(1e-6, 1e2, n_sigma),
        seed: s.get_or("seed", base.seed)?,
        r_max: s.get_or("rmax", base.r_max)?,
        n_cells: s.get_or("cells", base.n_cells)?,
    };
    if suite.ells.contains(&0) {
        return Err(Failure::usage("ell must be >= 1 for the lemma suite"));
    }
    let result = suite.run(Execution::default())?;
    let out = s.out_dir();
    let summary = result.summary_csv();
    let mut outcome = Outcome {
        files: vec![
            (out.join("lemma_reports.csv"), result.to_csv()),
            (out.join("lemma_summary.csv"), summary.clone()),
        ],
        stdout: summary,
        failed_checks: Vec::new(),
    };
    for sm in result.summaries() {
        if sm.passed != sm.total {
            outcome
                .failed_checks
                .push(format!("{}: {} of {} violated", sm.lemma, sm.total - sm.passed, sm.total));
        }
    }
    if result.chain_failures > 0 {
        outcome
            .failed_checks
            .push(format!("spectral_gap chain: {} violations", result.chain_failures));
    }
    Ok(outcome)
}

fn verify_balances(s: &Settings) -> CmdResult<Outcome> {
    let p: f64 = s.get_or("p", 1.0)?;
    let nu: f64 = s.get_or("nu", 1e-2)?;
    let ell: u32 = s.get_or("ell", 1)?;
    let tol: f64 = s.get_or("tol", 1e-2)?;
    if ell == 0 {
        return Err(Failure::usage("ell must be >= 1 for the balance checks"));
    }
    let defaults = SimDefaults {
        r_max: s.get_or("rmax", 8.0)?,
        n_cells: s.get_or("cells", 512)?,
        dt: Some(s.get_or("dt", 0.01)?),
        t_max: Some(s.get_or("tmax", 10.0)?),
        rows: None,
        stop_fraction: 0.0,
        ..sim_defaults(s)?
    };
    let (config, trajectory) = simulate_mode(p, nu, ell, &defaults)?;
    if let Some(e) = trajectory.failure {
        return Err(Failure::from(e));
    }
    let report = balance_residuals(&trajectory.ledger, p, nu)?;
    let consts = compute_constants(p)?;
    let gronwall = gronwall_bound_check(&trajectory.ledger, nu, &consts)?;
    let mut csv = String::from("balance,relative,max_abs,scale\n");
    let mut outcome = Outcome::default();
    for b in Balance::ALL {
        let r = report.get(b);
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            b.name(),
            fmt_f64(r.relative),
            fmt_f64(r.max_abs),
            fmt_f64(r.scale)
        );
        let _ = writeln!(outcome.stdout, "{}: relative residual {:e}", b.name(), r.relative);
        if !(r.relative <= tol) {
            outcome
                .failed_checks
                .push(format!("{} residual {:e} above {tol:e}", b.name(), r.relative));
        }
    }
    let _ = writeln!(csv, "gronwall_min_margin,{},,", fmt_f64(gronwall.min_margin));
    let _ = writeln!(
        outcome.stdout,
        "gronwall: min margin {:e} at t={} (dt={}, t_max={})",
        gronwall.min_margin, gronwall.argmin_t, config.dt, config.t_max
    );
    if !gronwall.holds() {
        outcome.failed_checks.push("gronwall bound violated".into());
    }
    outcome.files.push((s.out_dir().join("balances.csv"), csv));
    Ok(outcome)
}

/// `F[j][m] = g₀(r_j) + Σ_{ℓ≥1} 2 Re(g_ℓ(r_j) e^{iℓθ_m})`, `θ_m = 2πm/n_theta`.
pub fn assemble_field2d(modes: &[(u32, RadialField)], n_theta: usize) -> crate::Result<Vec<Vec<f64>>> {
    if n_theta < 8 {
        return Err(Error::param("n_theta", format!("must be >= 8, got {n_theta}")));
    }
    let Some((_, first)) = modes.first() else {
        return Err(Error::param("modes", "must not be empty"));
    };
    let grid = first.grid();
    let mut seen = Vec::new();
    for (ell, g) in modes {
        if seen.contains(ell) {
            return Err(Error::param("modes", format!("duplicate ell = {ell}")));
        }
        seen.push(*ell);
        if g.grid() != grid {
            return Err(Error::GridMismatch {
                expected: grid.n_cells(),
                got: g.grid().n_cells(),
            });
        }
    }
    let thetas: Vec<f64> = (0..n_theta).map(|m| 2.0 * PI * m as f64 / n_theta as f64).collect();
    let mut field = vec![vec![0.0; n_theta]; grid.n_cells()];
    for (ell, g) in modes {
        let phases: Vec<Complex64> = thetas
            .iter()
            .map(|&th| Complex64::from_polar(1.0, *ell as f64 * th))
            .collect();
        for (row, v) in field.iter_mut().zip(g.values()) {
            if *ell == 0 {
                row.iter_mut().for_each(|x| *x += v.re);
            } else {
                for (x, e) in row.iter_mut().zip(&phases) {
                    *x += 2.0 * (v * e).re;
                }
            }
        }
    }
    Ok(field)
}

/// First row `t, θ_0, …`; then one row `r_j, F[j][0], …` per center.
pub fn snapshot_csv(t: f64, grid: &RadialGrid, field: &[Vec<f64>]) -> String {
    let n_theta = field.first().map_or(0, Vec::len);
    let mut out = String::new();
    let mut header = vec![t];
    header.extend((0..n_theta).map(|m| 2.0 * PI * m as f64 / n_theta as f64));
    write_record(&mut out, &header);
    let mut row = Vec::with_capacity(n_theta + 1);
    for (r, values) in grid.centers().iter().zip(field) {
        row.clear();
        row.push(*r);
        row.extend_from_slice(values);
        write_record(&mut out, &row);
    }
    out
}

fn snapshot(s: &Settings) -> CmdResult<Outcome> {
    let p: f64 = s.get_or("p", 1.0)?;
    let nu: f64 = s.get_or("nu", 1e-3)?;
    let ells: Vec<u32> = s.list_or("ell", vec![1, 2])?;
    let n_theta: usize = s.get_or("n_theta", 128)?;
    let frames: usize = s.get_or("frames", 5)?;
    let r_max: f64 = s.get_or("rmax", 4.0)?;
    let n_cells: usize = s.get_or("cells", 256)?;
    let width: f64 = s.get_or("width", 0.5)?;
    let profile = s.profile()?;
    if frames == 0 {
        return Err(Failure::usage("frames must be positive"));
    }
    if n_theta < 8 {
        return Err(Failure::usage("n_theta must be >= 8"));
    }
    if ells.is_empty() {
        return Err(Failure::usage("ell list must not be empty"));
    }
    let mut sorted = ells.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != ells.len() {
        return Err(Failure::usage("duplicate ell in snapshot mode set"));
    }
    let grid = Arc::new(RadialGrid::new(r_max, n_cells)?);
    let t_max: f64 = s.get_or("tmax", 20.0)?;
    let initials: Vec<RadialField> = ells
        .iter()
        .map(|&ell| initial_profile(profile, ell, &grid, width))
        .collect::<crate::Result<_>>()?;
    let dt: f64 = match s.get("dt")? {
        Some(dt) => dt,
        None => ells
            .iter()
            .zip(&initials)
            .map(|(&ell, g)| default_dt(p, nu, ell, g))
            .fold(f64::INFINITY, f64::min),
    };
    let steps_per_frame = if frames > 1 {
        ((t_max / dt) / (frames - 1) as f64).round().max(1.0) as usize
    } else {
        1
    };
    let configs: Vec<FlowConfig> = ells
        .iter()
        .map(|&ell| FlowConfig {
            p,
            nu,
            ell,
            dt,
            t_max: dt * (steps_per_frame * (frames - 1)) as f64,
            record_every: steps_per_frame,
        })
        .collect();
    for c in &configs {
        c.validate()?;
    }

    let mut per_mode: Vec<Vec<(f64, RadialField)>> = Vec::with_capacity(ells.len());
    for (config, initial) in configs.into_iter().zip(initials) {
        let stepper = Stepper::new(config.clone(), Arc::clone(&grid))?;
        let state = ModeState::new(initial, 0.0, config)?;
        let mut frames_out = Vec::with_capacity(frames);
        let mut state = state;
        let mut scratch = Vec::new();
        frames_out.push((state.t, state.field.clone()));
        for _ in 1..frames {
            for _ in 0..steps_per_frame {
                stepper.advance(&mut state, &mut scratch)?;
            }
            frames_out.push((state.t, state.field.clone()));
        }
        per_mode.push(frames_out);
    }

    let mut outcome = Outcome::default();
    for frame in 0..frames {
        let modes: Vec<(u32, RadialField)> = ells
            .iter()
            .zip(&per_mode)
            .map(|(&ell, m)| (ell, m[frame].1.clone()))
            .collect();
        let t = per_mode[0][frame].0;
        let field = assemble_field2d(&modes, n_theta)?;
        outcome.files.push((
            s.out_dir().join(format!("snapshot_{frame:04}.csv")),
            snapshot_csv(t, &grid, &field),
        ));
    }
    let _ = writeln!(outcome.stdout, "frames={frames} n_theta={n_theta} cells={n_cells}");
    Ok(outcome)
}

/// `T_{ν,k,ln}` for convenience in scripts and tests.
pub fn log_time(p: f64, nu: f64, k: u32) -> crate::Result<f64> {
    Ok(rates_and_times(&compute_constants(p)?, nu, k)?.t_nu_k_ln)
}
