//! Analytic Morse-oscillator model.
//!
//! `V(r) = C [exp(-2a(r-r0)) - 2 exp(-a(r-r0))]` with well depth `C`,
//! inverse width `a` and equilibrium position `r0`. The closed-form
//! spectrum and eigenfunction shapes serve as the independent oracle for
//! the finite-difference solver.

use serde::{Deserialize, Serialize};

use crate::grid::RadialGrid;
use crate::solver::BoundState;
use crate::{Error, Result, Scalar};

/// Morse potential parameters. Valid iff `C > 0`, `a > 0`, `r0` finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorseParams<T> {
    /// Well depth; the potential minimum is `-C` at `r = r0`.
    pub depth: T,
    /// Inverse width of the well.
    pub inv_width: T,
    /// Equilibrium position.
    pub r0: T,
}

impl<T: Scalar> MorseParams<T> {
    pub fn new(depth: T, inv_width: T, r0: T) -> Result<Self> {
        let p = Self {
            depth,
            inv_width,
            r0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.depth > T::zero()) || !self.depth.is_finite() {
            return Err(Error::Domain(format!("well depth C must be > 0, got {}", self.depth)));
        }
        if !(self.inv_width > T::zero()) || !self.inv_width.is_finite() {
            return Err(Error::Domain(format!(
                "inverse width a must be > 0, got {}",
                self.inv_width
            )));
        }
        if !self.r0.is_finite() {
            return Err(Error::Domain(format!("r0 must be finite, got {}", self.r0)));
        }
        Ok(())
    }
}

/// Potential value at `r`.
pub fn potential_at<T: Scalar>(params: &MorseParams<T>, r: T) -> T {
    let two = T::c(2.0);
    let t = (-params.inv_width * (r - params.r0)).exp();
    params.depth * (t * t - two * t)
}

/// Dimensionless depth parameter `lambda = sqrt(2C)/a` (hbar = m = 1).
pub fn lambda_param<T: Scalar>(params: &MorseParams<T>) -> T {
    (T::c(2.0) * params.depth).sqrt() / params.inv_width
}

/// Number of bound states: `floor(lambda - 1/2) + 1` when `lambda > 1/2`.
pub fn bound_state_count<T: Scalar>(params: &MorseParams<T>) -> usize {
    let lam = lambda_param(params);
    let half = T::c(0.5);
    if lam > half {
        (lam - half).floor().to_usize().unwrap_or(0) + 1
    } else {
        0
    }
}

/// Closed-form bound-state energy `E_n = -C (1 - (n + 1/2)/lambda)^2`.
pub fn analytic_energy<T: Scalar>(params: &MorseParams<T>, n: usize) -> Result<T> {
    let count = bound_state_count(params);
    if n >= count {
        return Err(Error::Domain(format!(
            "quantum number {n} out of range: only {count} bound states"
        )));
    }
    let lam = lambda_param(params);
    let x = T::one() - (T::from_usize(n).unwrap() + T::c(0.5)) / lam;
    Ok(-params.depth * x * x)
}

/// Generalized Laguerre polynomial `L_n^{(alpha)}(x)` by the standard
/// three-term recurrence.
fn laguerre<T: Scalar>(n: usize, alpha: T, x: T) -> T {
    if n == 0 {
        return T::one();
    }
    let mut prev = T::one();
    let mut cur = T::one() + alpha - x;
    for k in 1..n {
        let kf = T::from_usize(k).unwrap();
        let next = ((T::c(2.0) * kf + T::one() + alpha - x) * cur - (kf + alpha) * prev)
            / (kf + T::one());
        prev = cur;
        cur = next;
    }
    cur
}

/// Closed-form eigenfunction shape sampled on `grid`, normalized by
/// trapezoid quadrature, outermost lobe positive.
///
/// `psi_n(z) ~ z^{lambda - n - 1/2} e^{-z/2} L_n^{(2 lambda - 2n - 1)}(z)`
/// with `z = 2 lambda exp(-a(r - r0))`. The envelope is evaluated in log
/// space so large `lambda` does not overflow.
pub fn analytic_wavefunction<T: Scalar>(
    params: &MorseParams<T>,
    n: usize,
    grid: &RadialGrid<T>,
) -> Result<BoundState<T>> {
    let count = bound_state_count(params);
    if n >= count {
        return Err(Error::Domain(format!(
            "quantum number {n} out of range: only {count} bound states"
        )));
    }
    let lam = lambda_param(params);
    let nf = T::from_usize(n).unwrap();
    let alpha = T::c(2.0) * lam - T::c(2.0) * nf - T::one();
    let power = lam - nf - T::c(0.5);
    let mut values: Vec<T> = (0..grid.n_points)
        .map(|i| {
            let r = grid.point(i);
            let z = T::c(2.0) * lam * (-params.inv_width * (r - params.r0)).exp();
            let envelope = (power * z.ln() - z / T::c(2.0)).exp();
            envelope * laguerre(n, alpha, z)
        })
        .collect();
    let norm = grid.trapezoid(&values).sqrt();
    if !norm.is_finite() || norm == T::zero() {
        return Err(Error::Domain(
            "analytic wavefunction not normalizable on this grid".into(),
        ));
    }
    for v in &mut values {
        *v = *v / norm;
    }
    crate::solver::fix_phase(&mut values);

    // The grid must hold essentially all probability mass; a visible tail
    // at either endpoint means the window is too narrow.
    let h = grid.spacing();
    let tail_tol = T::c(1e-8);
    let head = values[0] * values[0] * h;
    let tail = values[grid.n_points - 1] * values[grid.n_points - 1] * h;
    if head > tail_tol || tail > tail_tol {
        return Err(Error::Domain(format!(
            "grid too narrow for analytic state n={n}: endpoint mass {head:?}/{tail:?}"
        )));
    }

    Ok(BoundState {
        n,
        energy: analytic_energy(params, n)?,
        grid: grid.clone(),
        values,
    })
}
