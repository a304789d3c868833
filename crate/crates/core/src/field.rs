//! Sampled `d01` fields over the (a, C) parameter rectangle under the
//! scale map `(a, C) -> (a/s, C s)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dipole::dipole_01;
use crate::morse::{bound_state_count, MorseParams};
use crate::solver::SolverConfig;
use crate::{Error, Result, Scalar};

/// Rectangular parameter grid: `n_a` columns over `[a_min, a_max]`,
/// `n_c` rows over `[c_min, c_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid<T> {
    pub a_min: T,
    pub a_max: T,
    pub n_a: usize,
    pub c_min: T,
    pub c_max: T,
    pub n_c: usize,
}

impl<T: Scalar> ParamGrid<T> {
    /// The default sweep rectangle: `a` in [0.8, 2.0], `C` in [12, 26], at the
    /// default 61 x 71 resolution.
    pub fn default_rect() -> Self {
        Self {
            a_min: T::c(0.8),
            a_max: T::c(2.0),
            n_a: 61,
            c_min: T::c(12.0),
            c_max: T::c(26.0),
            n_c: 71,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(T::zero() < self.a_min && self.a_min < self.a_max) {
            return Err(Error::Domain(format!(
                "need 0 < a_min < a_max, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        if !(T::zero() < self.c_min && self.c_min < self.c_max) {
            return Err(Error::Domain(format!(
                "need 0 < C_min < C_max, got [{}, {}]",
                self.c_min, self.c_max
            )));
        }
        if self.n_a < 2 || self.n_c < 2 {
            return Err(Error::Domain("grid needs at least 2 points per axis".into()));
        }
        Ok(())
    }

    pub fn a_value(&self, j: usize) -> T {
        self.a_min
            + (self.a_max - self.a_min) * T::from_usize(j).unwrap()
                / T::from_usize(self.n_a - 1).unwrap()
    }

    pub fn c_value(&self, i: usize) -> T {
        self.c_min
            + (self.c_max - self.c_min) * T::from_usize(i).unwrap()
                / T::from_usize(self.n_c - 1).unwrap()
    }

    pub fn a_step(&self) -> T {
        (self.a_max - self.a_min) / T::from_usize(self.n_a - 1).unwrap()
    }

    pub fn c_step(&self) -> T {
        (self.c_max - self.c_min) / T::from_usize(self.n_c - 1).unwrap()
    }
}

/// Scale map of the evolution parameter `s`: `(a, C, r0) -> (a/s, C s, r0)`.
pub fn apply_scale<T: Scalar>(params: &MorseParams<T>, s: T) -> Result<MorseParams<T>> {
    if !(s > T::zero()) || !s.is_finite() {
        return Err(Error::Domain(format!("scale s must be > 0, got {s}")));
    }
    Ok(MorseParams {
        depth: params.depth * s,
        inv_width: params.inv_width / s,
        r0: params.r0,
    })
}

/// Exact derivative of the scaled trajectories at scale `s`, with `(a, C)`
/// the unscaled base parameters: `(da/ds, dC/ds) = (-a/s^2, C)`.
pub fn velocity_field<T: Scalar>(params: &MorseParams<T>, s: T) -> Result<(T, T)> {
    if !(s > T::zero()) || !s.is_finite() {
        return Err(Error::Domain(format!("scale s must be > 0, got {s}")));
    }
    Ok((-params.inv_width / (s * s), params.depth))
}

/// `d01` sampled over a parameter grid at a fixed scale. Values are stored
/// row-major with `C` as the slow (row) index; `mask[k]` is true where the
/// solve succeeded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField2D<T> {
    pub grid: ParamGrid<T>,
    pub s: T,
    pub r0: T,
    pub values: Vec<T>,
    pub mask: Vec<bool>,
    /// Digest of the solver configuration the samples were produced with.
    pub solver_digest: String,
}

impl<T: Scalar> ScalarField2D<T> {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.grid.n_a + j
    }

    pub fn value(&self, i: usize, j: usize) -> T {
        self.values[self.index(i, j)]
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.mask[self.index(i, j)]
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Build a field by evaluating `f(a, C)` at every node (synthetic
    /// fields, tests). All cells valid.
    pub fn from_fn(grid: ParamGrid<T>, s: T, mut f: impl FnMut(T, T) -> T) -> Self {
        let mut values = Vec::with_capacity(grid.n_a * grid.n_c);
        for i in 0..grid.n_c {
            for j in 0..grid.n_a {
                values.push(f(grid.a_value(j), grid.c_value(i)));
            }
        }
        let mask = vec![true; values.len()];
        Self {
            grid,
            s,
            r0: T::one(),
            values,
            mask,
            solver_digest: "synthetic".into(),
        }
    }

    /// Range of the field over valid cells, `None` when everything is masked.
    pub fn valid_range(&self) -> Option<(T, T)> {
        let mut range: Option<(T, T)> = None;
        for (v, m) in self.values.iter().zip(&self.mask) {
            if *m {
                range = Some(match range {
                    Some((lo, hi)) => (lo.min(*v), hi.max(*v)),
                    None => (*v, *v),
                });
            }
        }
        range
    }

    /// Percentile (0..=100) of the valid values, by sorted-rank interpolation.
    pub fn percentile(&self, p: T) -> Option<T> {
        let mut vals: Vec<T> = self
            .values
            .iter()
            .zip(&self.mask)
            .filter_map(|(v, m)| m.then_some(*v))
            .collect();
        if vals.is_empty() {
            return None;
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let frac = (p / T::c(100.0)).max(T::zero()).min(T::one());
        let pos = frac * T::from_usize(vals.len() - 1).unwrap();
        let lo = pos.floor().to_usize().unwrap();
        let hi = (lo + 1).min(vals.len() - 1);
        let t = pos - pos.floor();
        Some(vals[lo] * (T::one() - t) + vals[hi] * t)
    }

    /// Bilinear interpolation of the field at fractional grid coordinates
    /// (`x` along `a` in [0, n_a-1], `y` along `C` in [0, n_c-1]).
    /// `None` when any stencil corner is masked or out of range.
    pub fn bilinear(&self, x: T, y: T) -> Option<T> {
        let (i, j, u, v) = self.cell_of(x, y)?;
        let f00 = self.value(i, j);
        let f01 = self.value(i, j + 1);
        let f10 = self.value(i + 1, j);
        let f11 = self.value(i + 1, j + 1);
        if !(self.is_valid(i, j)
            && self.is_valid(i, j + 1)
            && self.is_valid(i + 1, j)
            && self.is_valid(i + 1, j + 1))
        {
            return None;
        }
        let one = T::one();
        Some(
            f00 * (one - u) * (one - v)
                + f10 * u * (one - v)
                + f01 * (one - u) * v
                + f11 * u * v,
        )
    }

    fn cell_of(&self, x: T, y: T) -> Option<(usize, usize, T, T)> {
        let nx = T::from_usize(self.grid.n_a - 1).unwrap();
        let ny = T::from_usize(self.grid.n_c - 1).unwrap();
        if x < T::zero() || y < T::zero() || x > nx || y > ny {
            return None;
        }
        let j = x.floor().to_usize().unwrap().min(self.grid.n_a - 2);
        let i = y.floor().to_usize().unwrap().min(self.grid.n_c - 2);
        let v = x - T::from_usize(j).unwrap();
        let u = y - T::from_usize(i).unwrap();
        Some((i, j, u, v))
    }
}

/// Sample `dipole_01` over `grid` at scale `s`. Cells whose scaled
/// parameters hold fewer than two bound states are masked invalid, as are
/// cells where the solve fails. The result is independent of how many
/// workers computed it.
pub fn sample_field<T: Scalar>(
    grid: &ParamGrid<T>,
    s: T,
    config: &SolverConfig<T>,
) -> Result<ScalarField2D<T>> {
    grid.validate()?;
    config.validate()?;
    if !(s > T::zero()) {
        return Err(Error::Domain(format!("scale s must be > 0, got {s}")));
    }
    let cells: Vec<(usize, usize)> = (0..grid.n_c)
        .flat_map(|i| (0..grid.n_a).map(move |j| (i, j)))
        .collect();
    let results: Vec<(T, bool)> = cells
        .par_iter()
        .map(|&(i, j)| {
            let base = MorseParams {
                depth: grid.c_value(i),
                inv_width: grid.a_value(j),
                r0: T::one(),
            };
            let scaled = match apply_scale(&base, s) {
                Ok(p) => p,
                Err(_) => return (T::nan(), false),
            };
            if bound_state_count(&scaled) < 2 {
                return (T::nan(), false);
            }
            match dipole_01(&scaled, config) {
                Ok(r) => (r.value, true),
                Err(_) => (T::nan(), false),
            }
        })
        .collect();
    let (values, mask): (Vec<T>, Vec<bool>) = results.into_iter().unzip();
    Ok(ScalarField2D {
        grid: grid.clone(),
        s,
        r0: T::one(),
        values,
        mask,
        solver_digest: crate::field_io::solver_digest(config),
    })
}

/// Gradient `(df/da, df/dC)` per node: central differences in the
/// interior, one-sided at boundaries and next to masked cells. Entries are
/// `None` where no valid stencil exists.
pub fn field_gradient<T: Scalar>(field: &ScalarField2D<T>) -> Vec<Option<(T, T)>> {
    let grid = &field.grid;
    let ha = grid.a_step();
    let hc = grid.c_step();
    let mut out = vec![None; field.values.len()];
    let valid = |i: usize, j: usize| field.is_valid(i, j);
    for i in 0..grid.n_c {
        for j in 0..grid.n_a {
            if !valid(i, j) {
                continue;
            }
            let da = axis_diff(
                j,
                grid.n_a,
                ha,
                |jj| valid(i, jj),
                |jj| field.value(i, jj),
            );
            let dc = axis_diff(
                i,
                grid.n_c,
                hc,
                |ii| valid(ii, j),
                |ii| field.value(ii, j),
            );
            if let (Some(da), Some(dc)) = (da, dc) {
                out[field.index(i, j)] = Some((da, dc));
            }
        }
    }
    out
}

fn axis_diff<T: Scalar>(
    k: usize,
    n: usize,
    h: T,
    valid: impl Fn(usize) -> bool,
    value: impl Fn(usize) -> T,
) -> Option<T> {
    let has_prev = k > 0 && valid(k - 1);
    let has_next = k + 1 < n && valid(k + 1);
    match (has_prev, has_next) {
        (true, true) => Some((value(k + 1) - value(k - 1)) / (T::c(2.0) * h)),
        (false, true) => Some((value(k + 1) - value(k)) / h),
        (true, false) => Some((value(k) - value(k - 1)) / h),
        (false, false) => None,
    }
}
