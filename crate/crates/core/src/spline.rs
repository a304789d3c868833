//! Cubic-spline resampling of contour polylines, parameterized by
//! cumulative chord length. Open contours use natural end conditions,
//! closed ones a periodic spline.

use crate::contour::Contour;
use crate::{Error, Result, Scalar};

/// Second derivatives of a natural cubic spline through `(t_i, y_i)`.
fn natural_second_derivatives<T: Scalar>(t: &[T], y: &[T]) -> Vec<T> {
    let n = t.len();
    let mut m = vec![T::zero(); n];
    if n < 3 {
        return m;
    }
    // tridiagonal system for the n-2 interior second derivatives
    let mut diag = vec![T::zero(); n - 2];
    let mut rhs = vec![T::zero(); n - 2];
    let mut lower = vec![T::zero(); n - 2];
    let mut upper = vec![T::zero(); n - 2];
    for k in 0..n - 2 {
        let i = k + 1;
        let h0 = t[i] - t[i - 1];
        let h1 = t[i + 1] - t[i];
        lower[k] = h0;
        diag[k] = T::c(2.0) * (h0 + h1);
        upper[k] = h1;
        rhs[k] = T::c(6.0) * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    // Thomas algorithm
    for k in 1..n - 2 {
        let w = lower[k] / diag[k - 1];
        diag[k] = diag[k] - w * upper[k - 1];
        rhs[k] = rhs[k] - w * rhs[k - 1];
    }
    if n >= 3 {
        m[n - 2] = rhs[n - 3] / diag[n - 3];
        for k in (0..n - 3).rev() {
            m[k + 1] = (rhs[k] - upper[k] * m[k + 2]) / diag[k];
        }
    }
    m
}

/// Second derivatives of a periodic cubic spline; `y[0]` and `y[n-1]`
/// must coincide. Solved as a cyclic tridiagonal system via the
/// Sherman-Morrison correction.
fn periodic_second_derivatives<T: Scalar>(t: &[T], y: &[T]) -> Vec<T> {
    let n = t.len() - 1; // unknowns m_0 .. m_{n-1}, m_n = m_0
    let mut h = vec![T::zero(); n];
    for i in 0..n {
        h[i] = t[i + 1] - t[i];
    }
    let slope = |i: usize| (y[i + 1] - y[i]) / h[i];
    let mut diag = vec![T::zero(); n];
    let mut rhs = vec![T::zero(); n];
    for i in 0..n {
        let prev = (i + n - 1) % n;
        diag[i] = T::c(2.0) * (h[prev] + h[i]);
        let slope_prev = if i == 0 { slope(n - 1) } else { slope(i - 1) };
        rhs[i] = T::c(6.0) * (slope(i) - slope_prev);
    }
    // cyclic system: sub/sup entries are h[prev]/h[i]; corners h[n-1]
    let solve_tri = |d: &mut [T], b: &mut [T], lower: &[T], upper: &[T]| {
        let n = d.len();
        for k in 1..n {
            let w = lower[k] / d[k - 1];
            d[k] = d[k] - w * upper[k - 1];
            b[k] = b[k] - w * b[k - 1];
        }
        let mut x = vec![T::zero(); n];
        x[n - 1] = b[n - 1] / d[n - 1];
        for k in (0..n - 1).rev() {
            x[k] = (b[k] - upper[k] * x[k + 1]) / d[k];
        }
        x
    };
    let mut lower = vec![T::zero(); n];
    let mut upper = vec![T::zero(); n];
    for i in 0..n {
        lower[i] = h[(i + n - 1) % n];
        upper[i] = h[i];
    }
    // Sherman-Morrison with u = (gamma, 0, ..., alpha), where
    // alpha = h[n-1] couples the first and last unknowns
    let alpha = h[n - 1];
    let gamma = -diag[0];
    let mut d1 = diag.clone();
    d1[0] = d1[0] - gamma;
    d1[n - 1] = d1[n - 1] - alpha * alpha / gamma;
    let mut b1 = rhs.clone();
    let x = solve_tri(&mut d1.clone(), &mut b1, &lower, &upper);
    let mut u = vec![T::zero(); n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tri(&mut d1, &mut u.clone(), &lower, &upper);
    let vx = x[0] + alpha / gamma * x[n - 1];
    let vz = T::one() + z[0] + alpha / gamma * z[n - 1];
    let factor = vx / vz;
    let mut m = vec![T::zero(); n + 1];
    for i in 0..n {
        m[i] = x[i] - factor * z[i];
    }
    m[n] = m[0];
    m
}

/// Spline interpolant over one coordinate of the polyline.
struct Spline1<T> {
    t: Vec<T>,
    y: Vec<T>,
    m: Vec<T>,
}

impl<T: Scalar> Spline1<T> {
    fn new(t: &[T], y: &[T], periodic: bool) -> Self {
        let m = if periodic {
            periodic_second_derivatives(t, y)
        } else {
            natural_second_derivatives(t, y)
        };
        Self {
            t: t.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    fn eval(&self, x: T) -> T {
        let n = self.t.len();
        // locate the interval by binary search
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.t[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.t[hi] - self.t[lo];
        let a = (self.t[hi] - x) / h;
        let b = (x - self.t[lo]) / h;
        a * self.y[lo]
            + b * self.y[hi]
            + ((a * a * a - a) * self.m[lo] + (b * b * b - b) * self.m[hi]) * h * h / T::c(6.0)
    }
}

/// Resample a contour to `n_out` points uniformly spaced in cumulative
/// chord length. The spline interpolates every original point.
pub fn resample_spline<T: Scalar>(contour: &Contour<T>, n_out: usize) -> Result<Contour<T>> {
    if contour.points.len() < 4 {
        return Err(Error::Domain(format!(
            "spline resampling needs >= 4 points, got {}",
            contour.points.len()
        )));
    }
    if n_out < 2 {
        return Err(Error::Domain("n_out must be >= 2".into()));
    }
    let mut pts = contour.points.clone();
    if contour.closed && pts.first() != pts.last() {
        pts.push(pts[0]);
    }
    let mut t = vec![T::zero(); pts.len()];
    for i in 1..pts.len() {
        let dx = pts[i].0 - pts[i - 1].0;
        let dy = pts[i].1 - pts[i - 1].1;
        t[i] = t[i - 1] + (dx * dx + dy * dy).sqrt();
    }
    let total = t[pts.len() - 1];
    if !(total > T::zero()) {
        return Err(Error::Domain("contour has zero chord length".into()));
    }
    let xs: Vec<T> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<T> = pts.iter().map(|p| p.1).collect();
    let sx = Spline1::new(&t, &xs, contour.closed);
    let sy = Spline1::new(&t, &ys, contour.closed);
    // closed contours stop one step short of the seam
    let span = total;
    let denom = if contour.closed { n_out } else { n_out - 1 };
    let points: Vec<(T, T)> = (0..n_out)
        .map(|k| {
            let x = span * T::from_usize(k).unwrap() / T::from_usize(denom).unwrap();
            (sx.eval(x), sy.eval(x))
        })
        .collect();
    Ok(Contour {
        level: contour.level,
        s: contour.s,
        points,
        closed: contour.closed,
    })
}
