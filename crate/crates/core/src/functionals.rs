//! Explicit constants of the hypocoercivity estimate, the `ν, k` scalings of
//! its coefficients, decay rates and time scales, and the functionals
//! `Φ_k`, `W_k` and the X-norm evaluated on a discrete mode profile.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::RadialField;
use crate::ledger::LedgerRow;

/// Relative slack allowed on constraints that bind with equality.
pub const CONSTRAINT_SLACK: f64 = 1e-12;

/// The constant ledger, all depending on the flow exponent `p` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypoConstants {
    pub p: f64,
    /// `4p²(2 + p²/2)`
    pub c1: f64,
    /// `c_p · p^{−2(p−1)/p} · 2^{2+1/p}`
    pub c2: f64,
    /// `2^{(3p−1)/p} p^{−2/p}`
    pub c3: f64,
    /// constant of the weighted Hardy-type inequality
    pub c_p: f64,
    pub delta: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub gamma0: f64,
    pub eps0: f64,
    /// `4(p−1)²`, the Grönwall constant
    pub gronwall_c: f64,
}

/// Constant of `σ^{1/p}‖r^{p−2}g‖²/c_p ≤ σ‖∇g‖² + ‖r^{p−1}g‖²`.
///
/// `1` at `p = 1`, `2` for `p ≥ 2`, and for `p ∈ (1, 2)` the larger of `2`
/// and `1/(p (p−1)^{1/p})`.
pub fn hardy_constant(p: f64) -> f64 {
    if p == 1.0 {
        1.0
    } else if p >= 2.0 {
        2.0
    } else {
        (1.0 / (p * (p - 1.0).powf(1.0 / p))).max(2.0)
    }
}

pub fn compute_constants(p: f64) -> Result<HypoConstants> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::param("p", format!("must be >= 1, got {p}")));
    }
    let c1 = 4.0 * p * p * (2.0 + p * p / 2.0);
    let c3 = 2f64.powf((3.0 * p - 1.0) / p) * p.powf(-2.0 / p);
    let c_p = hardy_constant(p);
    let inv_c2 = p.powf(2.0 * (p - 1.0) / p) * 2f64.powf(-(2.0 + 1.0 / p)) / c_p;
    let c2 = 1.0 / inv_c2;
    let first = if p == 1.0 {
        f64::INFINITY
    } else {
        1.0 / (2.0 * c2 * (p - 1.0).powi(2))
    };
    let delta = first.min(c3 / 3.0);
    let beta0 = (delta * delta / (4.0 * c1 * c1))
        .min(c3 * delta / (3.0 * c1))
        .powf(p / (p + 2.0));
    let alpha0 = c1 / delta * beta0.powf((p + 1.0) / p);
    let gamma0 = delta * beta0.powf((p - 1.0) / p);
    let eps0 = beta0.powf(1.0 / p) / (2.0 * c3);
    Ok(HypoConstants {
        p,
        c1,
        c2,
        c3,
        c_p,
        delta,
        alpha0,
        beta0,
        gamma0,
        eps0,
        gronwall_c: 4.0 * (p - 1.0).powi(2),
    })
}

/// One scaled constraint `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl Constraint {
    /// `(rhs − lhs) / |rhs|`; nonnegative when the constraint holds.
    pub fn slack(&self) -> f64 {
        (self.rhs - self.lhs) / self.rhs.abs()
    }

    pub fn holds(&self) -> bool {
        self.slack() >= -CONSTRAINT_SLACK
    }
}

impl HypoConstants {
    /// The five `ν, k`-free constraints on `(α₀, β₀, γ₀)`.
    pub fn constraints(&self) -> Vec<Constraint> {
        let p = self.p;
        let (a, b, g) = (self.alpha0, self.beta0, self.gamma0);
        vec![
            Constraint {
                name: "alpha_sq_over_beta",
                lhs: a * a / b,
                rhs: 0.25,
            },
            Constraint {
                name: "beta_sq_over_alpha_gamma",
                lhs: b * b / (a * g),
                rhs: 1.0 / self.c1,
            },
            Constraint {
                name: "gamma_weighted_origin",
                lhs: 2.0 * g * (p - 1.0).powi(2),
                rhs: b.powf((p - 1.0) / p) / self.c2,
            },
            Constraint {
                name: "alpha_vs_c3",
                lhs: 3.0,
                rhs: self.c3 / (a * b.powf(1.0 / p)),
            },
            Constraint {
                name: "gamma_vs_c3",
                lhs: 3.0,
                rhs: self.c3 * b.powf((p - 1.0) / p) / g,
            },
        ]
    }

    pub fn all_constraints_hold(&self) -> bool {
        self.constraints().iter().all(Constraint::holds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn check_nu_k(nu: f64, k: u32) -> Result<()> {
    if !(nu.is_finite() && nu > 0.0 && nu <= 1.0) {
        return Err(Error::param("nu", format!("must lie in (0, 1], got {nu}")));
    }
    if k == 0 {
        return Err(Error::param("k", "the functional is defined for k >= 1"));
    }
    Ok(())
}

/// `α = α₀ ν^{2/(p+2)} k^{−2/(p+2)}`, `β = β₀ ν^{(2−p)/(p+2)} k^{−4/(p+2)}`,
/// `γ = γ₀ ν^{−2(p−1)/(p+2)} k^{−6/(p+2)}`.
pub fn coefficients_abc(consts: &HypoConstants, nu: f64, k: u32) -> Result<Coefficients> {
    check_nu_k(nu, k)?;
    let p = consts.p;
    let q = p + 2.0;
    let k = k as f64;
    Ok(Coefficients {
        alpha: consts.alpha0 * nu.powf(2.0 / q) * k.powf(-2.0 / q),
        beta: consts.beta0 * nu.powf((2.0 - p) / q) * k.powf(-4.0 / q),
        gamma: consts.gamma0 * nu.powf(-2.0 * (p - 1.0) / q) * k.powf(-6.0 / q),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBundle {
    /// `ν^{p/(p+2)} / (1 + 2(p−1)/(p+2)·|ln ν|)`
    pub lambda_nu: f64,
    /// `2ε₀ ν^{p/(p+2)} k^{2/(p+2)}`, the rate of `Φ_k`
    pub lambda_thm: f64,
    /// `λ_thm / (1 + 2(p−1)/(p+2)·(|ln ν| + ln k))`, the rate of `W_k`
    pub lambda_w: f64,
    pub t_nu_k: f64,
    pub t_nu_k_ln: f64,
}

impl RateBundle {
    /// Log-correction factor `T_{ν,k,ln} / T_{ν,k}`.
    pub fn log_factor(&self) -> f64 {
        self.t_nu_k_ln / self.t_nu_k
    }
}

pub fn rates_and_times(consts: &HypoConstants, nu: f64, k: u32) -> Result<RateBundle> {
    check_nu_k(nu, k)?;
    let p = consts.p;
    let q = p + 2.0;
    let slope = 2.0 * (p - 1.0) / q;
    let ln_nu = nu.ln().abs();
    let ln_k = (k as f64).ln();
    let enhanced = nu.powf(p / q);
    let lambda_thm = 2.0 * consts.eps0 * enhanced * (k as f64).powf(2.0 / q);
    let log_factor = 1.0 + slope * (ln_nu + ln_k);
    Ok(RateBundle {
        lambda_nu: enhanced / (1.0 + slope * ln_nu),
        lambda_thm,
        lambda_w: lambda_thm / log_factor,
        t_nu_k: 1.0 / lambda_thm,
        t_nu_k_ln: log_factor / lambda_thm,
    })
}

/// `‖g‖² + ‖r^{p−1}g‖²`
pub fn x_norm_sq(g: &RadialField, p: f64) -> f64 {
    g.weighted_norm_sq(0.0) + g.weighted_norm_sq(p - 1.0)
}

/// `Re ∫ (iℓ g) conj(∂_r g) r^{p−1} r dr`
pub fn cross_term(g: &RadialField, ell: u32, p: f64) -> f64 {
    let d = g.radial_derivative();
    let i_ell = Complex64::new(0.0, ell as f64);
    g.grid().integrate(|j, r| {
        (i_ell * g.values()[j] * d.values()[j].conj()).re * r.powf(p - 1.0)
    })
}

/// `Φ = ½[‖f‖² + α‖∇f‖² + 2pβ⟨r^{p−1}∂_θ f, ∂_r f⟩ + γ‖r^{p−1}∂_θ f‖²]`
pub fn phi_functional(
    g: &RadialField,
    ell: u32,
    p: f64,
    nu: f64,
    consts: &HypoConstants,
) -> Result<f64> {
    let abc = coefficients_abc(consts, nu, ell)?;
    let l2 = g.weighted_norm_sq(0.0);
    let grad = g.gradient_norm_sq(ell);
    let cross = cross_term(g, ell, p);
    let wtheta = (ell as f64).powi(2) * g.weighted_norm_sq(p - 1.0);
    phi_from_parts(&abc, p, l2, grad, cross, wtheta)
}

pub(crate) fn phi_from_parts(
    abc: &Coefficients,
    p: f64,
    l2: f64,
    grad: f64,
    cross: f64,
    wtheta: f64,
) -> Result<f64> {
    let phi = 0.5 * (l2 + abc.alpha * grad + 2.0 * p * abc.beta * cross + abc.gamma * wtheta);
    if phi < 0.0 {
        return Err(Error::Internal(format!(
            "negative functional {phi}: coefficient constraints violated"
        )));
    }
    Ok(phi)
}

/// `W = ½‖f‖² + (γ₀/4)‖r^{p−1}f‖²`
pub fn w_functional(g: &RadialField, p: f64, consts: &HypoConstants) -> f64 {
    0.5 * g.weighted_norm_sq(0.0) + 0.25 * consts.gamma0 * g.weighted_norm_sq(p - 1.0)
}

/// Evaluates the full ledger row for one mode.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub p: f64,
    pub nu: f64,
    pub ell: u32,
    pub consts: HypoConstants,
    /// `None` for `ℓ = 0` or `ν = 0`, where `Φ` is undefined.
    pub coefficients: Option<Coefficients>,
}

impl Diagnostics {
    pub fn new(p: f64, nu: f64, ell: u32) -> Result<Self> {
        let consts = compute_constants(p)?;
        let coefficients = if ell >= 1 && nu > 0.0 {
            Some(coefficients_abc(&consts, nu, ell)?)
        } else {
            None
        };
        Ok(Self {
            p,
            nu,
            ell,
            consts,
            coefficients,
        })
    }

    pub fn row(&self, g: &RadialField, t: f64) -> Result<LedgerRow> {
        let p = self.p;
        let ell = self.ell as f64;
        let ell2 = ell * ell;
        let d = g.radial_derivative();
        let lap = g.mode_laplacian(self.ell);
        let grid = g.grid();
        let (f, df, lf) = (g.values(), d.values(), lap.values());
        let i_ell = Complex64::new(0.0, ell);

        let mut acc = [0.0f64; 8];
        for (j, &r) in grid.centers().iter().enumerate() {
            let w1 = r.powf(p - 1.0);
            let w2 = r.powf(p - 2.0);
            let f2 = f[j].norm_sqr();
            let rr = r * grid.h();
            acc[0] += f2 * rr;
            acc[1] += lf[j].norm_sqr() * rr;
            acc[2] += f2 * w1 * w1 * rr;
            acc[3] += df[j].norm_sqr() * w1 * w1 * rr;
            acc[4] += f2 * w2 * w2 * rr;
            acc[5] += (i_ell * f[j] * df[j].conj()).re * w1 * rr;
            acc[6] += (i_ell * df[j] * lf[j].conj()).re * w1 * rr;
            acc[7] += (i_ell * f[j] * lf[j].conj()).re * w2 * rr;
        }
        let [l2_sq, lap_sq, wr_sq, wdr_sq, wm2_plain, cross, mix_rd, mix_lap] = acc;
        let grad_sq = g.gradient_norm_sq(self.ell);
        let wtheta_sq = ell2 * wr_sq;
        let wm2_sq = ell2 * wm2_plain;
        let wgrad_sq = ell2 * (wdr_sq + ell2 * wm2_plain);
        let phi = match &self.coefficients {
            Some(abc) => phi_from_parts(abc, p, l2_sq, grad_sq, cross, wtheta_sq)?,
            None => f64::NAN,
        };
        Ok(LedgerRow {
            t,
            l2_sq,
            grad_sq,
            wtheta_sq,
            cross,
            lap_sq,
            wgrad_sq,
            wm2_sq,
            mix_rd,
            mix_lap,
            wr_sq,
            x_sq: l2_sq + wr_sq,
            sup_abs: g.sup_norm(),
            phi,
            w: 0.5 * l2_sq + 0.25 * self.consts.gamma0 * wr_sq,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RadialGrid;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    /// Independent evaluation of the constant formulas, written out per case.
    fn oracle_p1() -> [f64; 6] {
        // c1 = 10, c3 = 4, δ = 4/3, β₀ = (δ²/(4c1²))^{1/3} = (1/225)^{1/3}
        let beta0 = (1.0f64 / 225.0).cbrt();
        let alpha0 = 10.0 / (4.0 / 3.0) * beta0 * beta0;
        [10.0, 4.0, 4.0 / 3.0, beta0, alpha0, beta0 / 8.0]
    }

    #[test]
    fn constants_at_p1() {
        let c = compute_constants(1.0).unwrap();
        let [c1, c3, delta, beta0, alpha0, eps0] = oracle_p1();
        assert_eq!(c.c1, c1);
        assert_relative_eq!(c.c3, c3, max_relative = 1e-15);
        assert_eq!(c.c_p, 1.0);
        assert_relative_eq!(c.delta, delta, max_relative = 1e-15);
        assert_relative_eq!(c.beta0, beta0, max_relative = 1e-14);
        assert_relative_eq!(c.alpha0, alpha0, max_relative = 1e-14);
        assert_relative_eq!(c.gamma0, 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(c.eps0, eps0, max_relative = 1e-14);
        assert!((c.eps0 - 0.02055).abs() < 5e-6);
        assert_eq!(c.gronwall_c, 0.0);
        // α₀²/β₀ = 1/4 binds
        assert_relative_eq!(c.alpha0 * c.alpha0 / c.beta0, 0.25, max_relative = 1e-13);
    }

    #[test]
    fn constants_at_p2() {
        let c = compute_constants(2.0).unwrap();
        assert_eq!(c.c1, 64.0);
        assert_relative_eq!(c.c3, 2f64.powf(1.5), max_relative = 1e-15);
        assert_eq!(c.c_p, 2.0);
        assert_eq!(c.gronwall_c, 4.0);
    }

    #[test]
    fn hardy_constant_branches() {
        assert_eq!(hardy_constant(1.0), 1.0);
        assert_eq!(hardy_constant(3.0), 2.0);
        let p: f64 = 1.25;
        assert_relative_eq!(
            hardy_constant(p),
            1.0 / (p * (p - 1.0).powf(1.0 / p)),
            max_relative = 1e-15
        );
        assert_eq!(hardy_constant(1.5), 2.0);
    }

    #[test]
    fn rejects_small_p() {
        assert!(compute_constants(0.99).is_err());
        assert!(compute_constants(f64::NAN).is_err());
    }

    #[test]
    fn constraint_suite_over_p_grid() {
        for i in 0..=30 {
            let p = 1.0 + 0.1 * i as f64;
            let c = compute_constants(p).unwrap();
            for con in c.constraints() {
                assert!(con.holds(), "p = {p}: {} slack {}", con.name, con.slack());
            }
            assert_eq!(c.constraints().len(), 5);
        }
    }

    #[test]
    fn coefficient_scalings() {
        let c = compute_constants(1.0).unwrap();
        let abc = coefficients_abc(&c, 1e-3, 1).unwrap();
        assert_relative_eq!(abc.alpha, c.alpha0 * 1e-2, max_relative = 1e-12);
        assert_relative_eq!(abc.beta, c.beta0 * 1e-1, max_relative = 1e-12);
        assert_relative_eq!(abc.gamma, c.gamma0, max_relative = 1e-12);
        for &p in &[1.0, 1.7, 3.0] {
            let c = compute_constants(p).unwrap();
            let unit = coefficients_abc(&c, 1.0, 1).unwrap();
            assert_eq!((unit.alpha, unit.beta, unit.gamma), (c.alpha0, c.beta0, c.gamma0));
            for &(nu, k) in &[(1e-4, 1), (0.3, 5), (1e-2, 17)] {
                let abc = coefficients_abc(&c, nu, k).unwrap();
                assert_relative_eq!(
                    abc.alpha * abc.alpha / abc.beta,
                    c.alpha0 * c.alpha0 / c.beta0 * nu,
                    max_relative = 1e-12
                );
            }
        }
        assert!(coefficients_abc(&c, 1e-3, 0).is_err());
        assert!(coefficients_abc(&c, 0.0, 1).is_err());
    }

    #[test]
    fn rates() {
        let c1 = compute_constants(1.0).unwrap();
        let r = rates_and_times(&c1, 1e-3, 1).unwrap();
        assert_relative_eq!(r.lambda_nu, 0.1, max_relative = 1e-12);
        let c2 = compute_constants(2.0).unwrap();
        let r = rates_and_times(&c2, 1e-4, 1).unwrap();
        assert_relative_eq!(r.lambda_nu, 1e-2 / (1.0 + 0.5 * 1e4f64.ln()), max_relative = 1e-12);
        assert!((r.lambda_nu - 1.784e-3).abs() < 1e-6);
        for &p in &[1.0, 1.5, 2.0, 4.0] {
            let c = compute_constants(p).unwrap();
            for &(nu, k) in &[(1e-5, 1), (1e-2, 3), (0.5, 8)] {
                let r = rates_and_times(&c, nu, k).unwrap();
                let expected = 1.0 + 2.0 * (p - 1.0) / (p + 2.0) * (nu.ln().abs() + (k as f64).ln());
                assert_relative_eq!(r.log_factor(), expected, max_relative = 1e-12);
                assert!(r.log_factor() >= 1.0);
                assert_relative_eq!(r.lambda_w * r.t_nu_k_ln, 1.0, max_relative = 1e-14);
                assert_relative_eq!(r.lambda_thm * r.t_nu_k, 1.0, max_relative = 1e-14);
            }
        }
    }

    fn fine() -> Arc<RadialGrid> {
        Arc::new(RadialGrid::new(8.0, 4096).unwrap())
    }

    #[test]
    fn x_norm_values() {
        let g = fine();
        let f = g.sample_real(|r| (-r * r).exp()).unwrap();
        assert_relative_eq!(x_norm_sq(&f, 1.0), 2.0 * f.weighted_norm_sq(0.0), max_relative = 1e-15);
        assert_relative_eq!(x_norm_sq(&f, 2.0), 0.375, max_relative = 1e-6);
        assert_eq!(x_norm_sq(&RadialField::zeros(g), 2.0), 0.0);
    }

    #[test]
    fn cross_term_vanishes_on_aligned_phases() {
        let g = fine();
        let real = g.sample_real(|r| r * (-r * r).exp()).unwrap();
        assert_eq!(cross_term(&real, 1, 1.0), 0.0);
        let imag = real.scaled(Complex64::new(0.0, 1.0));
        assert!(cross_term(&imag, 2, 1.5).abs() < 1e-15);
        let mixed = real.scaled(Complex64::new(1.0, 1.0));
        assert!(cross_term(&mixed, 1, 1.0).abs() < 1e-14);
        // a radially varying phase gives a nonzero cross term
        let twisted = real.map(|r, v| v * Complex64::from_polar(1.0, -r * r)).unwrap();
        assert!(cross_term(&twisted, 1, 1.0).abs() > 1e-3);
    }

    #[test]
    fn phi_and_w_basics() {
        let g = fine();
        let c = compute_constants(1.0).unwrap();
        assert_eq!(phi_functional(&RadialField::zeros(g.clone()), 1, 1.0, 1e-2, &c).unwrap(), 0.0);
        assert_eq!(w_functional(&RadialField::zeros(g.clone()), 1.0, &c), 0.0);
        let f = g.sample_real(|r| r * (-r * r).exp()).unwrap();
        let abc = coefficients_abc(&c, 1e-2, 1).unwrap();
        let l2 = f.weighted_norm_sq(0.0);
        let expected = 0.5 * (l2 + abc.alpha * f.gradient_norm_sq(1) + abc.gamma * l2);
        assert_relative_eq!(phi_functional(&f, 1, 1.0, 1e-2, &c).unwrap(), expected, max_relative = 1e-14);
        assert_relative_eq!(w_functional(&f, 1.0, &c), 5.0 / 6.0 * l2, max_relative = 1e-14);
    }

    fn random_field(g: &Arc<RadialGrid>, rng: &mut ChaCha8Rng, ell: u32) -> RadialField {
        let a: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let b: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let w = rng.gen_range(0.5..2.0);
        let twist = rng.gen_range(-5.0..5.0);
        g.sample(|r| {
            let r2 = r * r;
            let env = r.powi(ell as i32) * (-r2 / (w * w)).exp();
            Complex64::new(a[0] + a[1] * r2 + a[2] * r2 * r2, b[0] + b[1] * r2 + b[2] * r2 * r2)
                * env
                * Complex64::from_polar(1.0, twist * r2)
        })
        .unwrap()
    }

    #[test]
    fn phi_sandwich_on_random_fields() {
        let g = Arc::new(RadialGrid::new(12.0, 1536).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &p in &[1.0, 2.0, 3.0] {
            let c = compute_constants(p).unwrap();
            for i in 0..100 {
                let ell = 1 + (i % 3) as u32;
                let f = random_field(&g, &mut rng, ell);
                for &nu in &[1e-4, 1e-2, 1.0] {
                    let abc = coefficients_abc(&c, nu, ell).unwrap();
                    let l2 = f.weighted_norm_sq(0.0);
                    let grad = f.gradient_norm_sq(ell);
                    let wth = (ell as f64).powi(2) * f.weighted_norm_sq(p - 1.0);
                    let phi = phi_functional(&f, ell, p, nu, &c).unwrap();
                    let lo = 0.25 * (2.0 * l2 + abc.alpha * grad + abc.gamma * wth);
                    let hi = 0.25 * (2.0 * l2 + 3.0 * abc.alpha * grad + 3.0 * abc.gamma * wth);
                    assert!(phi >= lo * (1.0 - 1e-12) && phi <= hi * (1.0 + 1e-12));
                    let w = w_functional(&f, p, &c);
                    let x = x_norm_sq(&f, p);
                    assert!(w >= 0.5f64.min(c.gamma0 / 4.0) * x * (1.0 - 1e-14));
                    assert!(w <= 0.5f64.max(c.gamma0 / 4.0) * x * (1.0 + 1e-14));
                }
            }
        }
    }

    #[test]
    fn diagnostics_row_matches_standalone_functions() {
        let g = Arc::new(RadialGrid::new(8.0, 512).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_field(&g, &mut rng, 2);
        let d = Diagnostics::new(1.5, 1e-2, 2).unwrap();
        let row = d.row(&f, 0.0).unwrap();
        assert_relative_eq!(row.l2_sq, f.weighted_norm_sq(0.0), max_relative = 1e-13);
        assert_relative_eq!(row.cross, cross_term(&f, 2, 1.5), max_relative = 1e-10);
        assert_relative_eq!(row.x_sq, x_norm_sq(&f, 1.5), max_relative = 1e-13);
        assert_relative_eq!(row.phi, phi_functional(&f, 2, 1.5, 1e-2, &d.consts).unwrap(), max_relative = 1e-12);
        assert_relative_eq!(row.w, w_functional(&f, 1.5, &d.consts), max_relative = 1e-13);
        assert!(Diagnostics::new(1.0, 1e-2, 0).unwrap().row(&f, 0.0).unwrap().phi.is_nan());
    }
}
