//! Time integration of one angular mode
//!
//! ```text
//! ∂_t f + iℓ r^p f = ν (∂_rr + r⁻¹∂_r − ℓ²/r²) f
//! ```
//!
//! with the implicit trapezoidal rule. Writing `A = −iℓ r^p + νΔ_ℓ`, a step
//! solves `(I − dt/2 A) f⁺ = (I + dt/2 A) f`. `A` is skew plus dissipative in
//! the r-weighted inner product, so the update never increases the discrete
//! L² norm, whatever `dt` is.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{RadialField, RadialGrid};
use crate::ledger::{EnergyLedger, LedgerRow};
use crate::tridiag::{ThomasFactor, Tridiagonal};

/// Target number of ledger rows when `record_every` is left to the default.
pub const DEFAULT_LEDGER_ROWS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    /// Flow exponent: angular velocity is `r^p`.
    pub p: f64,
    pub nu: f64,
    pub ell: u32,
    pub dt: f64,
    pub t_max: f64,
    pub record_every: usize,
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::param("p", format!("must be >= 1, got {}", self.p)));
        }
        // ν = 0 is accepted for pure-transport diagnostics
        if !(self.nu.is_finite() && (0.0..=1.0).contains(&self.nu)) {
            return Err(Error::param("nu", format!("must lie in [0, 1], got {}", self.nu)));
        }
        if self.ell >= 1 && self.nu / self.ell as f64 > 1.0 {
            return Err(Error::param("nu", "requires nu / ell <= 1"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::param("t_max", format!("must be >= 0, got {}", self.t_max)));
        }
        if self.t_max > 0.0 && self.t_max < self.dt {
            return Err(Error::param("t_max", "must be at least one time step"));
        }
        if self.record_every == 0 {
            return Err(Error::param("record_every", "must be positive"));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_max` from `t0`.
    pub fn steps_from(&self, t0: f64) -> usize {
        let remaining = (self.t_max - t0).max(0.0);
        (remaining / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// Accuracy-motivated default time step
/// `min(0.5 / (ℓ r_core^p), min(0.1 h²/ν, 1e-2))`, where `r_core` holds 99% of
/// the initial mass.
pub fn default_dt(p: f64, nu: f64, ell: u32, initial: &RadialField) -> f64 {
    let grid = initial.grid();
    let r_core = mass_radius(initial, 0.99);
    let advective = if ell == 0 {
        f64::INFINITY
    } else {
        0.5 / (ell as f64 * r_core.powf(p))
    };
    let diffusive = if nu > 0.0 {
        (0.1 * grid.h() * grid.h() / nu).min(1e-2)
    } else {
        1e-2
    };
    advective.min(diffusive)
}

/// Stride giving about `rows` ledger samples over `n_steps` steps.
pub fn default_record_every(n_steps: usize, rows: usize) -> usize {
    (n_steps as f64 / rows.max(1) as f64).round().max(1.0) as usize
}

/// Smallest cell-center radius enclosing `fraction` of `∫|g|² r dr`.
pub fn mass_radius(g: &RadialField, fraction: f64) -> f64 {
    let centers = g.grid().centers();
    let total = g.weighted_norm_sq(0.0);
    if total == 0.0 {
        return *centers.last().unwrap();
    }
    let mut acc = 0.0;
    for (v, &r) in g.values().iter().zip(centers) {
        acc += v.norm_sqr() * r * g.grid().h();
        if acc >= fraction * total {
            return r;
        }
    }
    *centers.last().unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// `r^ℓ e^{−(r/w)²}`
    GaussianMonomial,
    /// `r^ℓ (a₀ + a₁r² + a₂r⁴) e^{−(r/w)²}` with seeded `aᵢ ∈ [−1, 1]`
    GaussianPolynomial { seed: u64 },
}

/// Smooth initial profile vanishing like `r^ℓ` at the origin, normalized to
/// unit per-mode L² norm.
pub fn initial_profile(
    kind: ProfileKind,
    ell: u32,
    grid: &Arc<RadialGrid>,
    width: f64,
) -> Result<RadialField> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::param("width", "must be positive"));
    }
    if width >= grid.r_max() / 4.0 {
        return Err(Error::param(
            "width",
            format!("must be below r_max/4 = {}", grid.r_max() / 4.0),
        ));
    }
    let coeffs = match kind {
        ProfileKind::GaussianMonomial => [1.0, 0.0, 0.0],
        ProfileKind::GaussianPolynomial { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            [
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
            ]
        }
    };
    gaussian_polynomial(grid, ell, coeffs, width)
}

/// `r^ℓ (a₀ + a₁r² + a₂r⁴) e^{−(r/w)²}` normalized to unit L² norm.
pub(crate) fn gaussian_polynomial(
    grid: &Arc<RadialGrid>,
    ell: u32,
    coeffs: [f64; 3],
    width: f64,
) -> Result<RadialField> {
    let raw = grid.sample_real(|r| {
        let r2 = r * r;
        r.powi(ell as i32)
            * (coeffs[0] + coeffs[1] * r2 + coeffs[2] * r2 * r2)
            * (-r2 / (width * width)).exp()
    })?;
    let norm = raw.weighted_norm_sq(0.0).sqrt();
    if !(norm > 0.0) {
        return Err(Error::param("profile", "initial profile has zero norm"));
    }
    Ok(raw.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// Exact radially symmetric heat evolution of `e^{−(r/w)²}`:
/// `w²/(w²+4νt) · e^{−r²/(w²+4νt)}`.
pub fn heat_mode_exact(
    width: f64,
    nu: f64,
    t: f64,
    grid: &Arc<RadialGrid>,
) -> Result<RadialField> {
    if t < 0.0 {
        return Err(Error::param("t", "must be >= 0"));
    }
    let w2 = width * width;
    let s = w2 + 4.0 * nu * t;
    grid.sample_real(|r| w2 / s * (-r * r / s).exp())
}

/// Assembled trapezoidal pair for one `(config, grid)`; immutable and shareable.
#[derive(Debug, Clone)]
pub struct Stepper {
    config: FlowConfig,
    grid: Arc<RadialGrid>,
    operator: Tridiagonal,
    explicit: Tridiagonal,
    implicit: ThomasFactor,
}

impl Stepper {
    pub fn new(config: FlowConfig, grid: Arc<RadialGrid>) -> Result<Self> {
        config.validate()?;
        let operator = mode_operator(&config, &grid);
        let explicit = operator.shifted_identity(0.5 * config.dt);
        let implicit = ThomasFactor::new(&operator.shifted_identity(-0.5 * config.dt))?;
        Ok(Self {
            config,
            grid,
            operator,
            explicit,
            implicit,
        })
    }

    pub fn config(&self) -> &FlowConfig {
        &self.config
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// `A_ℓ = −iℓ r^p + νΔ_ℓ` as a tridiagonal matrix.
    pub fn operator(&self) -> &Tridiagonal {
        &self.operator
    }

    /// Advance `state` by one step in place. `scratch` is resized as needed.
    pub fn advance(&self, state: &mut ModeState, scratch: &mut Vec<Complex64>) -> Result<()> {
        if state.config != self.config {
            return Err(Error::param("state", "config does not match the stepper"));
        }
        let n = self.grid.n_cells();
        scratch.resize(n, Complex64::new(0.0, 0.0));
        self.explicit.apply_into(&state.field.values, scratch);
        self.implicit.solve_in_place(scratch);
        for (index, v) in scratch.iter_mut().enumerate() {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Numerical {
                    t: state.t + self.config.dt,
                    reason: format!("non-finite solution at cell {index}"),
                });
            }
            // subnormals carry no precision and stall the arithmetic of long decays
            if v.re.abs() < f64::MIN_POSITIVE {
                v.re = 0.0;
            }
            if v.im.abs() < f64::MIN_POSITIVE {
                v.im = 0.0;
            }
        }
        std::mem::swap(&mut state.field.values, scratch);
        state.steps += 1;
        state.t = state.t0 + state.steps as f64 * self.config.dt;
        Ok(())
    }

    pub fn step(&self, state: &ModeState) -> Result<ModeState> {
        let mut next = state.clone();
        let mut scratch = Vec::with_capacity(self.grid.n_cells());
        self.advance(&mut next, &mut scratch)?;
        Ok(next)
    }
}

fn mode_operator(config: &FlowConfig, grid: &RadialGrid) -> Tridiagonal {
    let n = grid.n_cells();
    let h = grid.h();
    let nu = config.nu;
    let ell = config.ell as f64;
    let zero = Complex64::new(0.0, 0.0);
    let mut lower = vec![zero; n];
    let mut diag = vec![zero; n];
    let mut upper = vec![zero; n];
    for j in 0..n {
        let r = grid.centers()[j];
        let face_in = grid.faces()[j];
        let face_out = grid.faces()[j + 1];
        let scale = nu / (r * h * h);
        if j > 0 {
            lower[j] = Complex64::new(scale * face_in, 0.0);
        }
        if j + 1 < n {
            upper[j] = Complex64::new(scale * face_out, 0.0);
        }
        diag[j] = Complex64::new(
            -scale * (face_in + face_out) - nu * ell * ell / (r * r),
            -ell * r.powf(config.p),
        );
    }
    Tridiagonal { lower, diag, upper }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    pub field: RadialField,
    pub t: f64,
    pub config: FlowConfig,
    t0: f64,
    steps: usize,
}

impl ModeState {
    pub fn new(field: RadialField, t: f64, config: FlowConfig) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::param("t", "must be finite and >= 0"));
        }
        config.validate()?;
        Ok(Self {
            field,
            t,
            config,
            t0: t,
            steps: 0,
        })
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }
}

/// Whether the trajectory should keep going after a ledger sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub ledger: EnergyLedger,
    pub state: ModeState,
    /// Set when the run aborted; the ledger then holds the rows recorded so far.
    pub failure: Option<Error>,
}

impl Trajectory {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

/// Step to `t_max`, calling `recorder` on the initial state and after every
/// `record_every` steps.
pub fn evolve<R>(mut state: ModeState, stepper: &Stepper, mut recorder: R) -> Trajectory
where
    R: FnMut(&ModeState) -> Result<(LedgerRow, Flow)>,
{
    let mut ledger = EnergyLedger::default();
    let stride = state.config.record_every;
    let n_steps = state.config.steps_from(state.t);
    let mut scratch = Vec::with_capacity(stepper.grid().n_cells());

    let mut record = |state: &ModeState, ledger: &mut EnergyLedger| -> Result<Flow> {
        let (row, flow) = recorder(state)?;
        ledger.push(row)?;
        Ok(flow)
    };

    match record(&state, &mut ledger) {
        Ok(Flow::Continue) => {}
        Ok(Flow::Stop) => {
            return Trajectory {
                ledger,
                state,
                failure: None,
            }
        }
        Err(e) => {
            return Trajectory {
                ledger,
                state,
                failure: Some(e),
            }
        }
    }

    for step in 1..=n_steps {
        if let Err(e) = stepper.advance(&mut state, &mut scratch) {
            return Trajectory {
                ledger,
                state,
                failure: Some(e),
            };
        }
        if step % stride == 0 {
            match record(&state, &mut ledger) {
                Ok(Flow::Continue) => {}
                Ok(Flow::Stop) => break,
                Err(e) => {
                    return Trajectory {
                        ledger,
                        state,
                        failure: Some(e),
                    }
                }
            }
        }
    }
    Trajectory {
        ledger,
        state,
        failure: None,
    }
}
