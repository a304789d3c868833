//! Lowest eigenpairs of a symmetric tridiagonal matrix, by Sturm-sequence
//! bisection for the eigenvalues and inverse iteration for the vectors.

use crate::Scalar;

/// Symmetric tridiagonal operator: `diag` has length `n`, `off` length `n-1`.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Scalar> Tridiagonal<T> {
    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin bounds on the whole spectrum.
    fn spectrum_bounds(&self) -> (T, T) {
        let n = self.order();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let mut radius = T::zero();
            if i > 0 {
                radius = radius + self.off[i - 1].abs();
            }
            if i + 1 < n {
                radius = radius + self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via the LDL^T
    /// recurrence, with the usual guard against vanishing pivots).
    fn count_below(&self, x: T) -> usize {
        let n = self.order();
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..n {
            // a vanishing pivot is perturbed to a negative one *before*
            // the sign test, so it still registers as a sign agreement
            if q.abs() < tiny {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
            if i + 1 < n {
                q = self.diag[i + 1] - x - self.off[i] * self.off[i] / q;
            }
        }
        count
    }

    /// The `k` smallest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<T> {
        let (lo0, hi0) = self.spectrum_bounds();
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let mut lo = lo0;
            let mut hi = hi0;
            // bisect until the interval is at rounding width
            for _ in 0..120 {
                let mid = (lo + hi) / T::c(2.0);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.count_below(mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push((lo + hi) / T::c(2.0));
        }
        out
    }

    /// Eigenvector for eigenvalue `lambda` by inverse iteration, orthogonalized
    /// against `previous` vectors. Returned vector has unit Euclidean norm.
    pub fn eigenvector(&self, lambda: T, previous: &[Vec<T>]) -> Vec<T> {
        let n = self.order();
        // deterministic start vector with no special symmetry
        let mut v: Vec<T> = (0..n)
            .map(|i| T::c(1.0) + T::c(0.5) * T::from_usize((i * 2654435761) % 97).unwrap() / T::c(97.0))
            .collect();
        normalize(&mut v);
        for _ in 0..4 {
            let mut w = self.solve_shifted(lambda, &v);
            for p in previous {
                let dot = dot(&w, p);
                for i in 0..n {
                    w[i] = w[i] - dot * p[i];
                }
            }
            normalize(&mut w);
            // residual check: ||(A - lambda) w||
            let res = self.residual(lambda, &w);
            v = w;
            if res < T::c(1e-10) * (T::one() + lambda.abs()) {
                break;
            }
        }
        v
    }

    fn residual(&self, lambda: T, v: &[T]) -> T {
        let n = self.order();
        let mut max = T::zero();
        for i in 0..n {
            let mut acc = (self.diag[i] - lambda) * v[i];
            if i > 0 {
                acc = acc + self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc = acc + self.off[i] * v[i + 1];
            }
            max = max.max(acc.abs());
        }
        max
    }

    /// Solve `(A - sigma I) x = b` by LU with partial pivoting; the factor
    /// stays banded with two superdiagonals.
    fn solve_shifted(&self, sigma: T, b: &[T]) -> Vec<T> {
        let n = self.order();
        // working copies of the three bands plus the fill-in band
        let mut d: Vec<T> = self.diag.iter().map(|&x| x - sigma).collect();
        let mut e: Vec<T> = self.off.clone(); // superdiagonal
        let mut sub: Vec<T> = self.off.clone(); // subdiagonal
        let mut f: Vec<T> = vec![T::zero(); n]; // second superdiagonal fill-in
        let mut x: Vec<T> = b.to_vec();
        let tiny = T::min_positive_value().sqrt();

        for i in 0..n - 1 {
            if sub[i].abs() > d[i].abs() {
                // swap rows i and i+1
                std::mem::swap(&mut d[i], &mut sub[i]);
                let tmp = e[i];
                e[i] = d[i + 1];
                d[i + 1] = tmp;
                if i + 1 < n - 1 {
                    f[i] = e[i + 1];
                    e[i + 1] = T::zero();
                }
                x.swap(i, i + 1);
            }
            let mut pivot = d[i];
            if pivot.abs() < tiny {
                pivot = if pivot >= T::zero() { tiny } else { -tiny };
                d[i] = pivot;
            }
            let m = sub[i] / pivot;
            d[i + 1] = d[i + 1] - m * e[i];
            if i + 1 < n - 1 {
                e[i + 1] = e[i + 1] - m * f[i];
            }
            x[i + 1] = x[i + 1] - m * x[i];
        }
        // back substitution
        let mut pivot = d[n - 1];
        if pivot.abs() < tiny {
            pivot = if pivot >= T::zero() { tiny } else { -tiny };
        }
        x[n - 1] = x[n - 1] / pivot;
        for i in (0..n - 1).rev() {
            let mut acc = x[i] - e[i] * x[i + 1];
            if i + 2 < n {
                acc = acc - f[i] * x[i + 2];
            }
            let mut pivot = d[i];
            if pivot.abs() < tiny {
                pivot = if pivot >= T::zero() { tiny } else { -tiny };
            }
            x[i] = acc / pivot;
        }
        x
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn normalize<T: Scalar>(v: &mut [T]) {
    let norm = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x = *x / norm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Discrete Dirichlet Laplacian `-(1/2) d^2/dx^2` on (0, L): eigenvalues
    /// `(2/h^2) sin^2(k pi h / (2L)) ... ` times the 1/2 kinetic factor.
    fn free_particle(n: usize, l: f64) -> Tridiagonal<f64> {
        let h = l / (n + 1) as f64;
        Tridiagonal {
            diag: vec![1.0 / (h * h); n],
            off: vec![-0.5 / (h * h); n - 1],
        }
    }

    #[test]
    fn free_particle_eigenvalues() {
        let n = 200;
        let l = 1.0;
        let h = l / (n + 1) as f64;
        let t = free_particle(n, l);
        let eigs = t.lowest_eigenvalues(3);
        for (k, &e) in eigs.iter().enumerate() {
            let kf = (k + 1) as f64;
            let exact = (2.0 / (h * h)) * (kf * std::f64::consts::PI * h / (2.0 * l)).sin().powi(2);
            assert_relative_eq!(e, exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn eigenvectors_match_sines() {
        let n = 100;
        let l = 1.0;
        let h = l / (n + 1) as f64;
        let t = free_particle(n, l);
        let eigs = t.lowest_eigenvalues(2);
        let v0 = t.eigenvector(eigs[0], &[]);
        let v1 = t.eigenvector(eigs[1], &[v0.clone()]);
        for (k, v) in [(1usize, &v0), (2usize, &v1)] {
            let mut exact: Vec<f64> = (0..n)
                .map(|i| (k as f64 * std::f64::consts::PI * (i + 1) as f64 * h / l).sin())
                .collect();
            let norm = exact.iter().map(|x| x * x).sum::<f64>().sqrt();
            for x in &mut exact {
                *x /= norm;
            }
            let overlap: f64 = v.iter().zip(&exact).map(|(a, b)| a * b).sum();
            assert!(overlap.abs() > 1.0 - 1e-9, "k={k} overlap {overlap}");
        }
        let cross: f64 = v0.iter().zip(&v1).map(|(a, b)| a * b).sum();
        assert!(cross.abs() < 1e-9);
    }
}
