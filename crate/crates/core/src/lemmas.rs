//! Property checks of the two weighted inequalities for band-localized
//! profiles:
//!
//! * spectral gap: `σ^{(p−1)/p}‖g‖² ≤ σ‖g/r‖² + ‖r^{p−1}g‖² ≤ σ‖∇g‖² + ‖r^{p−1}g‖²`
//! * weighted Hardy: `σ^{1/p}‖r^{p−2}g‖² / c_p ≤ σ‖∇g‖² + ‖r^{p−1}g‖²`
//!
//! evaluated with the discrete norms of [`crate::grid`] over seeded families
//! of Gaussian-times-polynomial profiles and log-spaced `σ`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::functionals::hardy_constant;
use crate::grid::{RadialField, RadialGrid};
use crate::ledger::fmt_f64;
use crate::solver::gaussian_polynomial;

/// Relative tolerance below which a violation is attributed to quadrature.
pub const LEMMA_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lemma {
    SpectralGap,
    WeightedHardy,
}

impl Lemma {
    pub fn id(self) -> &'static str {
        match self {
            Lemma::SpectralGap => "spectral_gap",
            Lemma::WeightedHardy => "weighted_hardy",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub lemma: Lemma,
    pub p: f64,
    pub ell: u32,
    pub sigma: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`
    pub margin: f64,
    /// `margin ≥ −tol·rhs`
    pub pass: bool,
    /// Passed only thanks to the quadrature tolerance.
    pub within_tolerance: bool,
}

impl InequalityReport {
    fn new(lemma: Lemma, p: f64, ell: u32, sigma: f64, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        let pass = margin >= -LEMMA_TOL * rhs;
        Self {
            lemma,
            p,
            ell,
            sigma,
            lhs,
            rhs,
            margin,
            pass,
            within_tolerance: pass && margin < 0.0,
        }
    }

    /// `margin / rhs`, or 0 when both sides vanish.
    pub fn relative_margin(&self) -> f64 {
        if self.rhs > 0.0 {
            self.margin / self.rhs
        } else {
            0.0
        }
    }
}

/// The discrete norms entering both inequalities, computed once per profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaNorms {
    pub p: f64,
    pub ell: u32,
    /// `‖g‖²`
    pub l2: f64,
    /// `‖g/r‖²`
    pub inv_r: f64,
    /// `‖r^{p−1}g‖²`
    pub weighted: f64,
    /// `‖r^{p−2}g‖²`
    pub origin: f64,
    /// `‖∇g‖²`
    pub grad: f64,
}

impl LemmaNorms {
    pub fn of(g: &RadialField, ell: u32, p: f64) -> Self {
        Self {
            p,
            ell,
            l2: g.weighted_norm_sq(0.0),
            inv_r: g.weighted_norm_sq(-1.0),
            weighted: g.weighted_norm_sq(p - 1.0),
            origin: g.weighted_norm_sq(p - 2.0),
            grad: g.gradient_norm_sq(ell),
        }
    }

    pub fn spectral_gap(&self, sigma: f64) -> SpectralGapReport {
        let p = self.p;
        let lhs = sigma.powf((p - 1.0) / p) * self.l2;
        let middle = sigma * self.inv_r + self.weighted;
        let right = sigma * self.grad + self.weighted;
        SpectralGapReport {
            first: InequalityReport::new(Lemma::SpectralGap, p, self.ell, sigma, lhs, middle),
            second_link_margin: right - middle,
        }
    }

    pub fn weighted_hardy(&self, sigma: f64) -> InequalityReport {
        let p = self.p;
        let lhs = sigma.powf(1.0 / p) * self.origin / hardy_constant(p);
        let rhs = sigma * self.grad + self.weighted;
        InequalityReport::new(Lemma::WeightedHardy, p, self.ell, sigma, lhs, rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGapReport {
    /// `σ^{(p−1)/p}‖g‖² ≤ σ‖g/r‖² + ‖r^{p−1}g‖²`
    pub first: InequalityReport,
    /// `(σ‖∇g‖² + ‖r^{p−1}g‖²) − (σ‖g/r‖² + ‖r^{p−1}g‖²)`
    pub second_link_margin: f64,
}

impl SpectralGapReport {
    pub fn second_link_holds(&self) -> bool {
        self.second_link_margin >= -LEMMA_TOL * self.first.rhs.abs()
    }
}

fn check_args(ell: u32, p: f64, sigma: f64) -> Result<()> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::param("p", format!("must be >= 1, got {p}")));
    }
    if ell == 0 {
        return Err(Error::param("ell", "inequalities need ell >= 1"));
    }
    Ok(())
}

pub fn check_spectral_gap(g: &RadialField, ell: u32, p: f64, sigma: f64) -> Result<SpectralGapReport> {
    check_args(ell, p, sigma)?;
    Ok(LemmaNorms::of(g, ell, p).spectral_gap(sigma))
}

pub fn check_weighted_hardy(g: &RadialField, ell: u32, p: f64, sigma: f64) -> Result<InequalityReport> {
    check_args(ell, p, sigma)?;
    Ok(LemmaNorms::of(g, ell, p).weighted_hardy(sigma))
}

/// `count` profiles `r^ℓ(a₀+a₁r²+a₂r⁴)e^{−(r/w)²}`, `aᵢ ∈ [−1,1]`,
/// `w ∈ [0.5, 2]`, unit L² norm. Deterministic in `(ℓ, seed)`.
pub fn sample_admissible(
    ell: u32,
    grid: &Arc<RadialGrid>,
    count: usize,
    seed: u64,
) -> Result<Vec<RadialField>> {
    if ell == 0 {
        return Err(Error::param("ell", "admissible samples need ell >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ell as u64);
    (0..count)
        .map(|_| {
            let coeffs = [
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
            ];
            let width = rng.gen_range(0.5..=2.0);
            gaussian_polynomial(grid, ell, coeffs, width)
        })
        .collect()
}

/// `n` points log-spaced over `[lo, hi]`, endpoints included.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct LemmaSuite {
    pub ps: Vec<f64>,
    pub ells: Vec<u32>,
    pub samples: usize,
    pub sigmas: Vec<f64>,
    pub seed: u64,
    pub r_max: f64,
    pub n_cells: usize,
}

impl Default for LemmaSuite {
    fn default() -> Self {
        Self {
            ps: vec![1.0, 1.25, 1.5, 2.0, 3.0],
            ells: vec![1, 2, 5],
            samples: 100,
            sigmas: log_space(1e-6, 1e2, 25),
            seed: 0,
            r_max: 16.0,
            n_cells: 2048,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaSummary {
    pub lemma: Lemma,
    pub total: usize,
    pub passed: usize,
    pub min_relative_margin: f64,
}

#[derive(Debug, Clone)]
pub struct LemmaSuiteResult {
    pub reports: Vec<InequalityReport>,
    /// Failures of the second link of the spectral-gap chain.
    pub chain_failures: usize,
}

impl LemmaSuite {
    pub fn run(&self, exec: Execution) -> Result<LemmaSuiteResult> {
        for &p in &self.ps {
            check_args(1, p, 1.0)?;
        }
        for &s in &self.sigmas {
            check_args(1, 1.0, s)?;
        }
        let grid = Arc::new(RadialGrid::new(self.r_max, self.n_cells)?);
        let mut jobs = Vec::new();
        for &ell in &self.ells {
            for (index, field) in sample_admissible(ell, &grid, self.samples, self.seed)?
                .into_iter()
                .enumerate()
            {
                for &p in &self.ps {
                    jobs.push((p, ell, index, field.clone()));
                }
            }
        }
        let per_job = exec.map(&jobs, |(p, ell, _, field)| {
            let norms = LemmaNorms::of(field, *ell, *p);
            let mut reports = Vec::with_capacity(2 * self.sigmas.len());
            let mut chain_failures = 0;
            for &sigma in &self.sigmas {
                let gap = norms.spectral_gap(sigma);
                if !gap.second_link_holds() {
                    chain_failures += 1;
                }
                reports.push(gap.first);
                reports.push(norms.weighted_hardy(sigma));
            }
            (reports, chain_failures)
        });
        let mut reports = Vec::with_capacity(jobs.len() * 2 * self.sigmas.len());
        let mut chain_failures = 0;
        for (r, c) in per_job {
            reports.extend(r);
            chain_failures += c;
        }
        Ok(LemmaSuiteResult {
            reports,
            chain_failures,
        })
    }
}

impl LemmaSuiteResult {
    pub fn summaries(&self) -> Vec<LemmaSummary> {
        [Lemma::SpectralGap, Lemma::WeightedHardy]
            .into_iter()
            .map(|lemma| {
                let subset = self.reports.iter().filter(|r| r.lemma == lemma);
                let mut total = 0;
                let mut passed = 0;
                let mut min_rel = f64::INFINITY;
                for r in subset {
                    total += 1;
                    passed += r.pass as usize;
                    min_rel = min_rel.min(r.relative_margin());
                }
                LemmaSummary {
                    lemma,
                    total,
                    passed,
                    min_relative_margin: min_rel,
                }
            })
            .collect()
    }

    pub fn all_pass(&self) -> bool {
        self.chain_failures == 0 && self.reports.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lemma,p,ell,sigma,lhs,rhs,margin,pass\n");
        for r in &self.reports {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.lemma,
                fmt_f64(r.p),
                r.ell,
                fmt_f64(r.sigma),
                fmt_f64(r.lhs),
                fmt_f64(r.rhs),
                fmt_f64(r.margin),
                if r.pass { 1 } else { 0 }
            ));
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("lemma,total,passed,min_relative_margin\n");
        for s in self.summaries() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                s.lemma,
                s.total,
                s.passed,
                fmt_f64(s.min_relative_margin)
            ));
        }
        out
    }
}
