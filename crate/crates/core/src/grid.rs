//! Uniform radial grid and quadrature helpers.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

/// Uniformly spaced grid on `[r_min, r_max]` with `n_points >= 3` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid<T> {
    pub r_min: T,
    pub r_max: T,
    pub n_points: usize,
}

impl<T: Scalar> RadialGrid<T> {
    pub fn new(r_min: T, r_max: T, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::Domain(format!("grid needs >= 3 points, got {n_points}")));
        }
        if !(r_min < r_max) || !r_min.is_finite() || !r_max.is_finite() {
            return Err(Error::Domain(format!(
                "grid bounds must satisfy r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            n_points,
        })
    }

    pub fn spacing(&self) -> T {
        (self.r_max - self.r_min) / T::from_usize(self.n_points - 1).unwrap()
    }

    pub fn point(&self, i: usize) -> T {
        self.r_min + T::from_usize(i).unwrap() * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    /// Same endpoints, halved spacing (`n -> 2n - 1`).
    pub fn halved(&self) -> Self {
        Self {
            r_min: self.r_min,
            r_max: self.r_max,
            n_points: self.n_points * 2 - 1,
        }
    }

    /// Trapezoid rule for `integral f^2 dr` given samples of `f`.
    pub fn trapezoid(&self, values: &[T]) -> T {
        self.trapezoid_product(values, values)
    }

    /// Trapezoid rule for `integral f g dr`.
    pub fn trapezoid_product(&self, f: &[T], g: &[T]) -> T {
        debug_assert_eq!(f.len(), self.n_points);
        debug_assert_eq!(g.len(), self.n_points);
        let n = f.len();
        let mut sum = (f[0] * g[0] + f[n - 1] * g[n - 1]) / T::c(2.0);
        for i in 1..n - 1 {
            sum = sum + f[i] * g[i];
        }
        sum * self.spacing()
    }

    /// Composite Simpson rule for `integral w dr` over the pre-multiplied
    /// integrand samples `w`, falling back to a trapezoid panel on the last
    /// interval when the interval count is odd.
    pub fn simpson(&self, w: &[T]) -> T {
        debug_assert_eq!(w.len(), self.n_points);
        let h = self.spacing();
        let n = w.len();
        let intervals = n - 1;
        let simpson_end = if intervals % 2 == 0 { n - 1 } else { n - 2 };
        let mut sum = T::zero();
        let mut i = 0;
        while i + 2 <= simpson_end {
            sum = sum + (w[i] + T::c(4.0) * w[i + 1] + w[i + 2]) * h / T::c(3.0);
            i += 2;
        }
        if simpson_end < n - 1 {
            sum = sum + (w[n - 2] + w[n - 1]) * h / T::c(2.0);
        }
        sum
    }
}
