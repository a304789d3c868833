//! Contour-to-contour normal motion across the scale parameter.
//!
//! The scale map is multiplicative, so all normals, distances and speeds
//! are measured in log coordinates `(x, y) = (ln a, ln C)`, and the
//! evolution step between scales `s` and `s2` is `ln(s2/s)`. In these
//! coordinates the parameter velocity per unit `ln s` is the constant
//! `(-1, +1)`, which is what makes the observed speeds comparable across
//! the whole rectangle.

use serde::{Deserialize, Serialize};

use crate::contour::{extract_contours, Contour};
use crate::field::{field_gradient, ScalarField2D};
use crate::spline::resample_spline;
use crate::{Error, Result, Scalar};

/// Points sampled along the source contour when measuring speeds.
pub const SPEED_RESAMPLE_POINTS: usize = 200;

/// Largest angle between the casting normal and the normal of the hit
/// segment for a correspondence to count; near-tangent hits are boundary
/// artifacts of the clipped contours.
pub const MAX_MATCH_ANGLE_DEG: f64 = 45.0;

/// One normal-ray correspondence between contours at consecutive scales.
#[derive(Debug, Clone)]
pub struct SpeedSample<T> {
    /// Base point on the source contour, (a, C) units.
    pub base: (T, T),
    /// Unit normal at the base point in log coordinates, oriented toward
    /// increasing field value.
    pub normal: (T, T),
    /// Signed distance to the target contour along the normal, log coords.
    pub distance: T,
    /// `distance` per unit evolution step.
    pub speed: T,
    /// Matched point on the target contour, (a, C) units.
    pub hit: Option<(T, T)>,
    /// True when no usable correspondence exists; excluded from averages.
    pub excluded: bool,
}

/// One row of the average-speed table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpeedRow<T> {
    pub s: T,
    /// Raw step to the next scale in the list.
    pub ds: T,
    pub mean_speed: T,
    pub std_speed: T,
    pub n_samples: usize,
    pub n_excluded: usize,
}

/// Average normal speeds per scale step at a fixed level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpeedTable<T> {
    pub level: T,
    pub rows: Vec<SpeedRow<T>>,
}

pub(crate) fn to_log<T: Scalar>(p: (T, T)) -> (T, T) {
    (p.0.ln(), p.1.ln())
}

fn norm<T: Scalar>(v: (T, T)) -> T {
    (v.0 * v.0 + v.1 * v.1).sqrt()
}

/// Gradient of the field interpolated at an (a, C) point and mapped to log
/// coordinates: `df/d(ln a) = a df/da`, `df/d(ln C) = C df/dC`.
fn log_gradient_at<T: Scalar>(
    field: &ScalarField2D<T>,
    grads: &[Option<(T, T)>],
    p: (T, T),
) -> Option<(T, T)> {
    let grid = &field.grid;
    let x = (p.0 - grid.a_min) / grid.a_step();
    let y = (p.1 - grid.c_min) / grid.c_step();
    let nx = T::from_usize(grid.n_a - 1).unwrap();
    let ny = T::from_usize(grid.n_c - 1).unwrap();
    if x < T::zero() || y < T::zero() || x > nx || y > ny {
        return None;
    }
    let j = x.floor().to_usize().unwrap().min(grid.n_a - 2);
    let i = y.floor().to_usize().unwrap().min(grid.n_c - 2);
    let v = x - T::from_usize(j).unwrap();
    let u = y - T::from_usize(i).unwrap();
    let one = T::one();
    let mut da = T::zero();
    let mut dc = T::zero();
    for (ii, jj, w) in [
        (i, j, (one - u) * (one - v)),
        (i, j + 1, (one - u) * v),
        (i + 1, j, u * (one - v)),
        (i + 1, j + 1, u * v),
    ] {
        let (ga, gc) = grads[ii * grid.n_a + jj]?;
        da = da + w * ga;
        dc = dc + w * gc;
    }
    Some((p.0 * da, p.1 * dc))
}

/// Unit normals (log coordinates, toward increasing field value) at each
/// contour point; `None` where the gradient stencil is masked or the
/// gradient vanishes.
pub fn contour_normals<T: Scalar>(
    contour: &Contour<T>,
    field: &ScalarField2D<T>,
) -> Vec<Option<(T, T)>> {
    let grads = field_gradient(field);
    contour
        .points
        .iter()
        .map(|&p| {
            let g = log_gradient_at(field, &grads, p)?;
            let n = norm(g);
            if !(n > T::zero()) || !n.is_finite() {
                return None;
            }
            Some((g.0 / n, g.1 / n))
        })
        .collect()
}

/// Intersection of the ray `p + t n` (both directions) with a polyline in
/// log coordinates. Returns the smallest-|t| transverse hit as
/// `(t, hit_point, segment_unit_normal)`.
fn ray_polyline_intersection<T: Scalar>(
    p: (T, T),
    n: (T, T),
    polyline: &[(T, T)],
) -> Option<(T, (T, T), (T, T))> {
    let mut best: Option<(T, (T, T), (T, T))> = None;
    for w in polyline.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        let dx = x1 - x0;
        let dy = y1 - y0;
        let denom = n.0 * dy - n.1 * dx;
        if denom.abs() < T::c(1e-300) {
            continue;
        }
        let rx = x0 - p.0;
        let ry = y0 - p.1;
        let t = (rx * dy - ry * dx) / denom;
        let u = (rx * n.1 - ry * n.0) / denom;
        if !(-u >= T::zero() && -u <= T::one()) && !(u >= T::zero() && u <= T::one()) {
            continue;
        }
        // clamp the segment parameter into [0, 1] regardless of its sign
        // convention from the cross-product form above
        let u = if u >= T::zero() { u } else { -u };
        if u > T::one() {
            continue;
        }
        match &best {
            Some((tb, _, _)) if t.abs() >= tb.abs() => {}
            _ => {
                let hit = (p.0 + t * n.0, p.1 + t * n.1);
                let len = norm((dx, dy));
                let seg_normal = (-dy / len, dx / len);
                best = Some((t, hit, seg_normal));
            }
        }
    }
    best
}

/// Measure signed normal distances from `contour_s` to `contour_s2`.
/// `delta` is the evolution step between the two scales (`ln(s2/s)`);
/// speeds are `distance / delta`. The source contour is spline-resampled
/// to [`SPEED_RESAMPLE_POINTS`] before casting.
pub fn normal_speed<T: Scalar>(
    contour_s: &Contour<T>,
    contour_s2: &Contour<T>,
    field_s: &ScalarField2D<T>,
    delta: T,
) -> Result<Vec<SpeedSample<T>>> {
    if contour_s.points.len() < 2 || contour_s2.points.len() < 2 {
        return Err(Error::Domain("normal_speed requires non-empty contours".into()));
    }
    if !(delta > T::zero()) {
        return Err(Error::Domain(format!("evolution step must be > 0, got {delta}")));
    }
    let source = if contour_s.points.len() >= 4 {
        resample_spline(contour_s, SPEED_RESAMPLE_POINTS)?
    } else {
        contour_s.clone()
    };
    let normals = contour_normals(&source, field_s);
    let target_log: Vec<(T, T)> = contour_s2.points.iter().map(|&p| to_log(p)).collect();
    let max_angle_cos = T::c(MAX_MATCH_ANGLE_DEG.to_radians().cos());

    let samples = source
        .points
        .iter()
        .zip(&normals)
        .map(|(&base, normal)| {
            let Some(n) = *normal else {
                return SpeedSample {
                    base,
                    normal: (T::zero(), T::zero()),
                    distance: T::zero(),
                    speed: T::zero(),
                    hit: None,
                    excluded: true,
                };
            };
            let p = to_log(base);
            match ray_polyline_intersection(p, n, &target_log) {
                Some((t, hit, seg_normal)) => {
                    let transverse = (n.0 * seg_normal.0 + n.1 * seg_normal.1).abs();
                    let excluded = transverse < max_angle_cos;
                    SpeedSample {
                        base,
                        normal: n,
                        distance: t,
                        speed: t / delta,
                        hit: Some((hit.0.exp(), hit.1.exp())),
                        excluded,
                    }
                }
                None => SpeedSample {
                    base,
                    normal: n,
                    distance: T::zero(),
                    speed: T::zero(),
                    hit: None,
                    excluded: true,
                },
            }
        })
        .collect();
    Ok(samples)
}

/// Mean and standard deviation of the included samples.
pub fn speed_stats<T: Scalar>(samples: &[SpeedSample<T>]) -> Option<(T, T, usize, usize)> {
    let included: Vec<T> = samples
        .iter()
        .filter(|s| !s.excluded)
        .map(|s| s.speed)
        .collect();
    let n_excluded = samples.len() - included.len();
    if included.is_empty() {
        return None;
    }
    let nf = T::from_usize(included.len()).unwrap();
    let mean = included.iter().copied().sum::<T>() / nf;
    let var = included
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<T>()
        / nf;
    Some((mean, var.sqrt(), included.len(), n_excluded))
}

/// Longest contour of `field` at `level`, if any.
pub fn principal_contour<T: Scalar>(field: &ScalarField2D<T>, level: T) -> Result<Option<Contour<T>>> {
    let contours = extract_contours(field, level)?;
    Ok(contours.into_iter().next())
}

/// Build the average-speed table for consecutive scale pairs in `fields`
/// (which must be ordered by `s`). Rows where a contour is missing carry
/// zero samples.
pub fn average_speed_table<T: Scalar>(
    fields: &[&ScalarField2D<T>],
    level: T,
) -> Result<SpeedTable<T>> {
    if fields.len() < 2 {
        return Err(Error::Domain("speed table needs at least two scales".into()));
    }
    let mut rows = Vec::new();
    for pair in fields.windows(2) {
        let (f1, f2) = (pair[0], pair[1]);
        if !(f2.s > f1.s) {
            return Err(Error::Domain("fields must be ordered by increasing s".into()));
        }
        let delta = (f2.s / f1.s).ln();
        let ds = f2.s - f1.s;
        let c1 = principal_contour(f1, level)?;
        let c2 = principal_contour(f2, level)?;
        let row = match (c1, c2) {
            (Some(c1), Some(c2)) => {
                let samples = normal_speed(&c1, &c2, f1, delta)?;
                match speed_stats(&samples) {
                    Some((mean, std, n, excluded)) => SpeedRow {
                        s: f1.s,
                        ds,
                        mean_speed: mean,
                        std_speed: std,
                        n_samples: n,
                        n_excluded: excluded,
                    },
                    None => empty_row(f1.s, ds),
                }
            }
            _ => empty_row(f1.s, ds),
        };
        rows.push(row);
    }
    Ok(SpeedTable { level, rows })
}

fn empty_row<T: Scalar>(s: T, ds: T) -> SpeedRow<T> {
    SpeedRow {
        s,
        ds,
        mean_speed: T::zero(),
        std_speed: T::zero(),
        n_samples: 0,
        n_excluded: 0,
    }
}

/// Angles (degrees) between the source normals and the target-field
/// normals at the matched points, over included samples.
pub fn parallelism_metric<T: Scalar>(
    samples: &[SpeedSample<T>],
    field_s2: &ScalarField2D<T>,
) -> Result<(T, T)> {
    let grads = field_gradient(field_s2);
    let mut angles = Vec::new();
    for sample in samples.iter().filter(|s| !s.excluded) {
        let Some(hit) = sample.hit else { continue };
        let Some(g) = log_gradient_at(field_s2, &grads, hit) else {
            continue;
        };
        let n = norm(g);
        if !(n > T::zero()) {
            continue;
        }
        let cosang = (sample.normal.0 * g.0 + sample.normal.1 * g.1) / n;
        let cosang = cosang.max(-T::one()).min(T::one());
        angles.push(cosang.acos().to_degrees());
    }
    if angles.is_empty() {
        return Err(Error::Domain("no matched points for parallelism metric".into()));
    }
    let nf = T::from_usize(angles.len()).unwrap();
    let mean = angles.iter().copied().sum::<T>() / nf;
    let max = angles.iter().copied().fold(T::zero(), T::max);
    Ok((mean, max))
}

/// Displace every contour point by `mean_speed * delta` along its local
/// field normal (log coordinates). Points leaving the grid rectangle are
/// clamped to it; the returned mask is `true` at every clamped point (and
/// at points without a usable normal) so callers can exclude boundary
/// artifacts from consistency metrics.
pub fn advect_contour<T: Scalar>(
    contour: &Contour<T>,
    mean_speed: T,
    delta: T,
    field: &ScalarField2D<T>,
) -> Result<(Contour<T>, Vec<bool>)> {
    let source = if contour.points.len() >= 4 {
        resample_spline(contour, SPEED_RESAMPLE_POINTS)?
    } else {
        contour.clone()
    };
    let normals = contour_normals(&source, field);
    let grid = &field.grid;
    let step = mean_speed * delta;
    let mut clamped = Vec::with_capacity(source.points.len());
    let points: Vec<(T, T)> = source
        .points
        .iter()
        .zip(&normals)
        .map(|(&p, normal)| match normal {
            Some(n) => {
                let (x, y) = to_log(p);
                let mut a = (x + step * n.0).exp();
                let mut c = (y + step * n.1).exp();
                if a < grid.a_min || a > grid.a_max || c < grid.c_min || c > grid.c_max {
                    clamped.push(true);
                    a = a.max(grid.a_min).min(grid.a_max);
                    c = c.max(grid.c_min).min(grid.c_max);
                } else {
                    clamped.push(false);
                }
                (a, c)
            }
            None => {
                clamped.push(true);
                p
            }
        })
        .collect();
    Ok((
        Contour {
            level: contour.level,
            s: contour.s,
            points,
            closed: contour.closed,
        },
        clamped,
    ))
}

/// Directed Hausdorff distance (log coordinates) from the points of `from`
/// to the polyline of `to`.
pub fn directed_hausdorff<T: Scalar>(from: &Contour<T>, to: &Contour<T>) -> T {
    directed_hausdorff_masked(from, None, to)
}

/// Like [`directed_hausdorff`] but skipping points where `exclude` is
/// `true` (e.g. points clamped to the rectangle by [`advect_contour`]).
pub fn directed_hausdorff_masked<T: Scalar>(
    from: &Contour<T>,
    exclude: Option<&[bool]>,
    to: &Contour<T>,
) -> T {
    let target: Vec<(T, T)> = to.points.iter().map(|&p| to_log(p)).collect();
    from.points
        .iter()
        .enumerate()
        .filter(|&(i, _)| exclude.map_or(true, |m| !m.get(i).copied().unwrap_or(false)))
        .map(|(_, &p)| point_polyline_distance(to_log(p), &target))
        .fold(T::zero(), T::max)
}

fn point_polyline_distance<T: Scalar>(p: (T, T), polyline: &[(T, T)]) -> T {
    let mut best = T::infinity();
    if polyline.len() == 1 {
        return norm((p.0 - polyline[0].0, p.1 - polyline[0].1));
    }
    for w in polyline.windows(2) {
        let (x0, y0) = w[0];
        let (dx, dy) = (w[1].0 - x0, w[1].1 - y0);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > T::zero() {
            (((p.0 - x0) * dx + (p.1 - y0) * dy) / len2)
                .max(T::zero())
                .min(T::one())
        } else {
            T::zero()
        };
        let d = norm((p.0 - (x0 + t * dx), p.1 - (y0 + t * dy)));
        best = best.min(d);
    }
    best
}

/// CSV serialization of a speed table: `s,ds,mean_speed,std_speed,n_samples,n_excluded`.
pub fn speed_table_to_csv(table: &SpeedTable<f64>) -> String {
    let mut out = String::from("s,ds,mean_speed,std_speed,n_samples,n_excluded\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.s, row.ds, row.mean_speed, row.std_speed, row.n_samples, row.n_excluded
        ));
    }
    out
}

pub fn speed_table_from_csv(text: &str, level: f64) -> Result<SpeedTable<f64>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("s,ds,mean_speed,std_speed,n_samples,n_excluded") => {}
        other => return Err(Error::Format(format!("bad speed CSV header: {other:?}"))),
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Format(format!("speed CSV line {} malformed", lineno + 2)));
        }
        let parse_f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::Format(format!("speed CSV line {}: {e}", lineno + 2)))
        };
        let parse_u = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|e| Error::Format(format!("speed CSV line {}: {e}", lineno + 2)))
        };
        rows.push(SpeedRow {
            s: parse_f(fields[0])?,
            ds: parse_f(fields[1])?,
            mean_speed: parse_f(fields[2])?,
            std_speed: parse_f(fields[3])?,
            n_samples: parse_u(fields[4])?,
            n_excluded: parse_u(fields[5])?,
        });
    }
    Ok(SpeedTable { level, rows })
}
