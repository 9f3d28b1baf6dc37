//! Residuals of the four energy balances and the Grönwall bound on the
//! weighted norm, evaluated on a recorded ledger.

use crate::error::{Error, Result};
use crate::functionals::HypoConstants;
use crate::ledger::EnergyLedger;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Balance {
    /// `½ d/dt ‖f‖² = −ν‖∇f‖²`
    L2,
    /// `½ d/dt ‖∇f‖² = −ν‖Δf‖² − p⟨r^{p−1}∂_θ f, ∂_r f⟩`
    Gradient,
    /// `d/dt ⟨r^{p−1}∂_θ f, ∂_r f⟩ = −p‖r^{p−1}∂_θ f‖² − 2ν⟨r^{p−1}∂_r∂_θ f, Δf⟩ − νp⟨r^{p−2}∂_θ f, Δf⟩`
    Cross,
    /// `½ d/dt ‖r^{p−1}∂_θ f‖² = −ν‖r^{p−1}∂_θ∇f‖² + 2ν(p−1)²‖r^{p−2}∂_θ f‖²`
    Weighted,
}

impl Balance {
    pub const ALL: [Balance; 4] = [Balance::L2, Balance::Gradient, Balance::Cross, Balance::Weighted];

    pub fn name(self) -> &'static str {
        match self {
            Balance::L2 => "dtf",
            Balance::Gradient => "dtnablaf",
            Balance::Cross => "dtscalar",
            Balance::Weighted => "rdtheta",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceResidual {
    pub balance: Balance,
    /// `max_t |lhs − rhs| / max_t max(|lhs|, |rhs|)`; zero when both sides vanish.
    pub relative: f64,
    pub max_abs: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub residuals: Vec<BalanceResidual>,
}

impl ResidualReport {
    pub fn get(&self, balance: Balance) -> &BalanceResidual {
        self.residuals
            .iter()
            .find(|r| r.balance == balance)
            .expect("every balance is reported")
    }

    pub fn max_relative(&self) -> f64 {
        self.residuals.iter().map(|r| r.relative).fold(0.0, f64::max)
    }
}

/// Compare central-difference time derivatives of the ledger columns with the
/// right-hand sides assembled from the recorded columns at the same time.
pub fn balance_residuals(ledger: &EnergyLedger, p: f64, nu: f64) -> Result<ResidualReport> {
    let rows = ledger.rows();
    if rows.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "balance residuals need at least 3 ledger rows, got {}",
            rows.len()
        )));
    }
    let spacing = rows[1].t - rows[0].t;
    for w in rows.windows(2) {
        let dt = w[1].t - w[0].t;
        if (dt - spacing).abs() > 1e-6 * spacing {
            return Err(Error::param("ledger", "balance residuals need uniform spacing"));
        }
    }

    let residuals = Balance::ALL
        .iter()
        .map(|&balance| {
            let mut max_abs = 0.0f64;
            let mut scale = 0.0f64;
            for i in 1..rows.len() - 1 {
                let (prev, row, next) = (&rows[i - 1], &rows[i], &rows[i + 1]);
                let dt = next.t - prev.t;
                let (lhs, rhs) = match balance {
                    Balance::L2 => (0.5 * (next.l2_sq - prev.l2_sq) / dt, -nu * row.grad_sq),
                    Balance::Gradient => (
                        0.5 * (next.grad_sq - prev.grad_sq) / dt,
                        -nu * row.lap_sq - p * row.cross,
                    ),
                    Balance::Cross => (
                        (next.cross - prev.cross) / dt,
                        -p * row.wtheta_sq - 2.0 * nu * row.mix_rd - nu * p * row.mix_lap,
                    ),
                    Balance::Weighted => (
                        0.5 * (next.wtheta_sq - prev.wtheta_sq) / dt,
                        -nu * row.wgrad_sq + 2.0 * nu * (p - 1.0).powi(2) * row.wm2_sq,
                    ),
                };
                max_abs = max_abs.max((lhs - rhs).abs());
                scale = scale.max(lhs.abs()).max(rhs.abs());
            }
            let relative = if scale > 0.0 { max_abs / scale } else { 0.0 };
            BalanceResidual {
                balance,
                relative,
                max_abs,
                scale,
            }
        })
        .collect();
    Ok(ResidualReport { residuals })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallMargin {
    /// `min_t [(‖r^{p−1}f⁰‖² + C_p^p/2 ‖f⁰‖²) e^{νt} − ‖r^{p−1}f(t)‖²]`
    pub min_margin: f64,
    pub argmin_t: f64,
}

impl GronwallMargin {
    pub fn holds(&self) -> bool {
        self.min_margin >= 0.0
    }
}

/// Check `‖r^{p−1}f(t)‖² ≤ (‖r^{p−1}f⁰‖² + (C_p^p/2)‖f⁰‖²) e^{νt}` at every row.
pub fn gronwall_bound_check(
    ledger: &EnergyLedger,
    nu: f64,
    consts: &HypoConstants,
) -> Result<GronwallMargin> {
    let first = ledger
        .first()
        .ok_or_else(|| Error::InsufficientData("empty ledger".into()))?;
    let t0 = first.t;
    let weight = consts.gronwall_c.powf(consts.p);
    let base = first.wr_sq + 0.5 * weight * first.l2_sq;
    let mut best = GronwallMargin {
        min_margin: f64::INFINITY,
        argmin_t: t0,
    };
    for row in ledger.rows() {
        let margin = base * (nu * (row.t - t0)).exp() - row.wr_sq;
        if margin < best.min_margin {
            best = GronwallMargin {
                min_margin: margin,
                argmin_t: row.t,
            };
        }
    }
    Ok(best)
}
