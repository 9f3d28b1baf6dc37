//! Cell-centered radial mesh on `[0, r_max]` and the discrete operators that
//! act on one angular mode.
//!
//! Unknowns live at cell centers `r_j = (j + 1/2) h`, so no unknown sits on
//! the coordinate singularity. The innermost face is at `r = 0`, which makes
//! the diffusive flux through the origin vanish structurally. Beyond `r_max`
//! a ghost value of zero closes the stencil (homogeneous Dirichlet).
//!
//! All integrals are per-mode: `∫ |g|² w(r) r dr` evaluated with the midpoint
//! rule on the cell centers.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Smallest mesh accepted by [`RadialGrid::new`].
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    n_cells: usize,
    r_max: f64,
    h: f64,
    centers: Vec<f64>,
    faces: Vec<f64>,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_cells: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::param("r_max", format!("must be positive, got {r_max}")));
        }
        if n_cells < MIN_CELLS {
            return Err(Error::param(
                "n_cells",
                format!("need at least {MIN_CELLS} cells, got {n_cells}"),
            ));
        }
        let h = r_max / n_cells as f64;
        let centers = (0..n_cells).map(|j| (j as f64 + 0.5) * h).collect();
        let faces = (0..=n_cells).map(|j| j as f64 * h).collect();
        Ok(Self {
            n_cells,
            r_max,
            h,
            centers,
            faces,
        })
    }

    /// Grid without the `MIN_CELLS` floor; only for tiny worked examples.
    #[doc(hidden)]
    pub fn new_unchecked(r_max: f64, n_cells: usize) -> Self {
        let h = r_max / n_cells as f64;
        Self {
            n_cells,
            r_max,
            h,
            centers: (0..n_cells).map(|j| (j as f64 + 0.5) * h).collect(),
            faces: (0..=n_cells).map(|j| j as f64 * h).collect(),
        }
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Cell width.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    /// Midpoint quadrature `h Σ_j w_j r_j` of a per-cell integrand.
    pub fn integrate(&self, integrand: impl Fn(usize, f64) -> f64) -> f64 {
        let sum: f64 = self
            .centers
            .iter()
            .enumerate()
            .map(|(j, &r)| integrand(j, r) * r)
            .sum();
        self.h * sum
    }

    /// Sample a complex profile at the cell centers.
    pub fn sample(self: &Arc<Self>, f: impl Fn(f64) -> Complex64) -> Result<RadialField> {
        let values = self.centers.iter().map(|&r| f(r)).collect();
        RadialField::new(Arc::clone(self), values)
    }

    /// Sample a real profile at the cell centers.
    pub fn sample_real(self: &Arc<Self>, f: impl Fn(f64) -> f64) -> Result<RadialField> {
        self.sample(|r| Complex64::new(f(r), 0.0))
    }
}

/// Complex radial profile of a single angular mode, one value per cell center.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    pub(crate) values: Vec<Complex64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_cells {
            return Err(Error::GridMismatch {
                expected: grid.n_cells,
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite {
                what: "radial field",
                index,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.n_cells;
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Internal constructor for results of finite arithmetic on finite data.
    pub(crate) fn from_parts(grid: Arc<RadialGrid>, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_cells);
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::from_parts(
            Arc::clone(&self.grid),
            self.values.iter().map(|v| v * c).collect(),
        )
    }

    /// Pointwise map, keeping the grid.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Self> {
        let values = self
            .grid
            .centers
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        Self::new(Arc::clone(&self.grid), values)
    }

    /// `max_j |g_j|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Weighted inner product `h Σ_j f_j conj(g_j) r_j`.
    pub fn inner(&self, other: &RadialField) -> Complex64 {
        assert_eq!(self.values.len(), other.values.len(), "grid mismatch");
        let h = self.grid.h;
        self.grid
            .centers
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(&r, (a, b))| a * b.conj() * r)
            .sum::<Complex64>()
            * h
    }

    /// `∫ |g|² r^{2m} r dr` by the midpoint rule.
    pub fn weighted_norm_sq(&self, m: f64) -> f64 {
        let two_m = 2.0 * m;
        self.grid
            .integrate(|j, r| self.values[j].norm_sqr() * r.powf(two_m))
    }

    /// Second-order centered differences in the interior, one-sided
    /// second-order stencils at the first and last center.
    pub fn radial_derivative(&self) -> RadialField {
        let g = &self.values;
        let n = g.len();
        assert!(n >= 3, "radial_derivative needs at least 3 cells");
        let inv2h = 0.5 / self.grid.h;
        let mut d = Vec::with_capacity(n);
        d.push((-3.0 * g[0] + 4.0 * g[1] - g[2]) * inv2h);
        for j in 1..n - 1 {
            d.push((g[j + 1] - g[j - 1]) * inv2h);
        }
        d.push((3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) * inv2h);
        RadialField::from_parts(Arc::clone(&self.grid), d)
    }

    /// Conservative `∂_rr + r⁻¹∂_r − ℓ²/r²` with zero flux through `r = 0`
    /// and a zero ghost value beyond `r_max`.
    pub fn mode_laplacian(&self, ell: u32) -> RadialField {
        let grid = &self.grid;
        let g = &self.values;
        let n = g.len();
        let h = grid.h;
        let inv_h2 = 1.0 / (h * h);
        let ell2 = (ell as f64).powi(2);
        let zero = Complex64::new(0.0, 0.0);
        let out = (0..n)
            .map(|j| {
                let r = grid.centers[j];
                let left = if j == 0 { zero } else { g[j - 1] };
                let right = if j + 1 == n { zero } else { g[j + 1] };
                let flux_out = grid.faces[j + 1] * (right - g[j]);
                let flux_in = grid.faces[j] * (g[j] - left);
                (flux_out - flux_in) * (inv_h2 / r) - g[j] * (ell2 / (r * r))
            })
            .collect();
        RadialField::from_parts(Arc::clone(grid), out)
    }

    /// Discrete `‖∇g‖² = ‖∂_r g‖² + ℓ²‖g/r‖²`, with `∂_r` taken on faces so
    /// that the result equals `−Re⟨Δ_ℓ g, g⟩` exactly.
    pub fn gradient_norm_sq(&self, ell: u32) -> f64 {
        let grid = &self.grid;
        let g = &self.values;
        let n = g.len();
        let h = grid.h;
        // interior faces plus the outer face against the zero ghost
        let mut radial = 0.0;
        for j in 0..n {
            let right = if j + 1 == n {
                Complex64::new(0.0, 0.0)
            } else {
                g[j + 1]
            };
            radial += grid.faces[j + 1] * (right - g[j]).norm_sqr();
        }
        radial /= h;
        let ell2 = (ell as f64).powi(2);
        let angular = if ell == 0 {
            0.0
        } else {
            ell2 * grid.integrate(|j, r| g[j].norm_sqr() / (r * r))
        };
        radial + angular
    }
}
