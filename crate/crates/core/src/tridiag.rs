//! Complex tridiagonal systems: matrix-vector product and a pre-factored
//! Thomas elimination for a fixed left-hand matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tridiagonal matrix stored by diagonals. `lower[0]` and `upper[n-1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub upper: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `out = self · x`
    pub fn apply_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.len();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.upper[i] * x[i + 1];
            }
            out[i] = acc;
        }
    }

    /// `I + s·self`
    pub fn shifted_identity(&self, s: f64) -> Tridiagonal {
        let one = Complex64::new(1.0, 0.0);
        Tridiagonal {
            lower: self.lower.iter().map(|v| v * s).collect(),
            diag: self.diag.iter().map(|v| one + v * s).collect(),
            upper: self.upper.iter().map(|v| v * s).collect(),
        }
    }
}

/// LU factors of a tridiagonal matrix, no pivoting.
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    lower: Vec<Complex64>,
    /// modified super-diagonal `c'_i`
    c_prime: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
}

impl ThomasFactor {
    pub fn new(m: &Tridiagonal) -> Result<Self> {
        let n = m.len();
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); n];
        let scale = m.diag.iter().map(|d| d.norm()).fold(0.0, f64::max);
        for i in 0..n {
            let pivot = if i == 0 {
                m.diag[0]
            } else {
                m.diag[i] - m.lower[i] * c_prime[i - 1]
            };
            if !(pivot.norm() > 1e-14 * scale) || !pivot.re.is_finite() {
                return Err(Error::Internal(format!(
                    "singular tridiagonal pivot at row {i}"
                )));
            }
            inv_pivot[i] = pivot.inv();
            if i + 1 < n {
                c_prime[i] = m.upper[i] * inv_pivot[i];
            }
        }
        Ok(Self {
            lower: m.lower.clone(),
            c_prime,
            inv_pivot,
        })
    }

    /// Solve in place: on return `rhs` holds the solution.
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) {
        let n = rhs.len();
        debug_assert_eq!(n, self.inv_pivot.len());
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            let prev = rhs[i - 1];
            rhs[i] = (rhs[i] - self.lower[i] * prev) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= self.c_prime[i] * next;
        }
    }
}
