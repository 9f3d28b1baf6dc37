//! Mode-by-mode simulation of the drift-diffusion equation
//! `∂_t f + r^{p−1}∂_θ f = νΔf` around a radial vortex with angular velocity
//! `r^p`, together with the hypocoercive functionals, the weighted
//! inequalities behind them and sweep tooling for enhanced-dissipation rates.
//!
//! Each angular Fourier mode `ℓ` decouples into
//! `∂_t g + iℓr^p g = ν(∂_rr + r⁻¹∂_r − ℓ²/r²)g` on a cell-centered radial grid.

pub mod balance;
pub mod cli;
pub mod error;
pub mod exec;
pub mod functionals;
pub mod grid;
pub mod ledger;
pub mod lemmas;
pub mod solver;
pub mod sweep;
pub mod tridiag;

pub use error::{Error, Result};
pub use exec::Execution;
pub use functionals::{compute_constants, HypoConstants};
pub use grid::{RadialField, RadialGrid};
pub use ledger::{EnergyLedger, LedgerRow};
pub use solver::{FlowConfig, ModeState, Stepper};
