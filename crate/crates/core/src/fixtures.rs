//! Synthetic closed-form field families used by tests and the CLI's
//! `--fixture` mode. They exercise the full contour/speed pipeline without
//! any quantum-mechanical solves.

use crate::field::{ParamGrid, ScalarField2D};

/// Rectangle used by the moving-line fixture. Chosen so the median level
/// set of the `s = 1` field stays inside the rectangle for every scale in
/// the default list (contour sits at `a = level * s`, and
/// `3.5 * 1.7 < 6`).
pub fn line_grid() -> ParamGrid<f64> {
    ParamGrid {
        a_min: 1.0,
        a_max: 6.0,
        n_a: 101,
        c_min: 1.0,
        c_max: 2.0,
        n_c: 9,
    }
}

/// Moving-line family `F(a, C; s) = a / s`. The level set `F = c` is the
/// vertical line `a = c * s`: in log coordinates it travels exactly one
/// unit of `ln a` per unit of `ln s`, so every normal-speed estimate must
/// be 1 to interpolation accuracy (which is exact here — `F` is linear in
/// `a`, so marching squares places its crossings exactly).
pub fn line_field(s: f64) -> ScalarField2D<f64> {
    let mut field = ScalarField2D::from_fn(line_grid(), s, |a, _c| a / s);
    field.solver_digest = format!("fixture-line-{s:e}");
    field
}

/// Center of the circle fixture in (a, C) coordinates.
pub const CIRCLE_CENTER: (f64, f64) = (3.0, 3.0);

/// Circle family `F(a, C; s) = dist((a, C), center) / s` on a square
/// rectangle; the level set `F = c` is a circle of radius `c * s`. The
/// field is smooth but not piecewise-linear along grid edges, so marching
/// squares incurs the generic `O(h^2)` position error — which is what the
/// convergence check measures.
pub fn circle_field(s: f64, n: usize) -> ScalarField2D<f64> {
    let grid = ParamGrid {
        a_min: 1.0,
        a_max: 5.0,
        n_a: n,
        c_min: 1.0,
        c_max: 5.0,
        n_c: n,
    };
    let (x0, y0) = CIRCLE_CENTER;
    let mut field =
        ScalarField2D::from_fn(grid, s, |a, c| ((a - x0).powi(2) + (c - y0).powi(2)).sqrt() / s);
    field.solver_digest = format!("fixture-circle-{s:e}-{n}");
    field
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::extract_contours;

    #[test]
    fn line_contour_is_exact_vertical_line() {
        let field = line_field(1.3);
        let level = 2.0;
        let contours = extract_contours(&field, level).unwrap();
        assert_eq!(contours.len(), 1);
        for &(a, _c) in &contours[0].points {
            assert!((a - level * 1.3).abs() < 1e-12, "a = {a}");
        }
    }

    #[test]
    fn circle_contour_radius_converges() {
        // halving h must cut the worst radial error by roughly 4x
        let errs: Vec<f64> = [41usize, 81, 161]
            .iter()
            .map(|&n| {
                let field = circle_field(1.0, n);
                let contours = extract_contours(&field, 1.2).unwrap();
                assert!(!contours.is_empty());
                contours[0]
                    .points
                    .iter()
                    .map(|&(a, c)| {
                        let r = ((a - CIRCLE_CENTER.0).powi(2) + (c - CIRCLE_CENTER.1).powi(2))
                            .sqrt();
                        (r - 1.2).abs()
                    })
                    .fold(0.0f64, f64::max)
            })
            .collect();
        let slope = (errs[0] / errs[2]).ln() / (4.0f64).ln();
        assert!(
            (slope - 2.0).abs() < 0.3,
            "convergence slope {slope}, errors {errs:?}"
        );
    }
}
