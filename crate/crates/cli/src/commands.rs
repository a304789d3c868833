//! Subcommand implementations. All machine-readable output goes to files
//! or stdout; progress and warnings go to the log (stderr).

use std::path::{Path, PathBuf};

use log::{info, warn};

use morse_lsm::contour::{extract_contours, write_contours_csv};
use morse_lsm::field::sample_field;
use morse_lsm::field_io::{load_field, save_field, solver_digest};
use morse_lsm::fixtures;
use morse_lsm::morse::{analytic_energy, bound_state_count};
use morse_lsm::speed::{
    advect_contour, average_speed_table, directed_hausdorff_masked, normal_speed,
    principal_contour, speed_stats, speed_table_to_csv,
};
use morse_lsm::{apply_scale, dipole_01, Contour64, Error, MorseParams64, Result, ScalarField2D64};

use crate::config::{Fixture, LevelSpec, RunConfig};

/// Canonical field file name for a scale value.
pub fn field_path(out_dir: &Path, s: f64) -> PathBuf {
    out_dir.join(format!("field_s{s}.json"))
}

pub fn contours_path(out_dir: &Path, s: f64) -> PathBuf {
    out_dir.join(format!("contours_s{s}.csv"))
}

pub fn svg_path(out_dir: &Path) -> PathBuf {
    out_dir.join("contours.svg")
}

pub fn speeds_path(out_dir: &Path) -> PathBuf {
    out_dir.join("speeds.csv")
}

/// Compute one field, honoring the fixture setting.
fn build_field(cfg: &RunConfig, s: f64) -> Result<ScalarField2D64> {
    match cfg.fixture {
        Some(Fixture::Line) => Ok(fixtures::line_field(s)),
        Some(Fixture::Circle) => Ok(fixtures::circle_field(s, 81)),
        None => sample_field(&cfg.grid, s, &cfg.solver),
    }
}

fn expected_digest(cfg: &RunConfig, s: f64) -> String {
    match cfg.fixture {
        Some(Fixture::Line) => format!("fixture-line-{s:e}"),
        Some(Fixture::Circle) => format!("fixture-circle-{s:e}-81"),
        None => solver_digest(&cfg.solver),
    }
}

/// `field` subcommand: one file per scale, resumable unless `force`.
pub fn cmd_field(cfg: &RunConfig, force: bool) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    for &s in &cfg.s_list {
        let path = field_path(&cfg.out_dir, s);
        if !force && path.exists() {
            match load_field(&path) {
                Ok(existing) if existing.solver_digest == expected_digest(cfg, s) => {
                    info!("s = {s}: {} up to date, skipping", path.display());
                    continue;
                }
                Ok(_) => info!("s = {s}: digest mismatch, recomputing"),
                Err(e) => warn!("s = {s}: unreadable field file ({e}), recomputing"),
            }
        }
        match cfg.fixture {
            Some(f) => info!("s = {s}: building {f:?} fixture field"),
            None => info!("s = {s}: sampling {} x {} grid", cfg.grid.n_a, cfg.grid.n_c),
        }
        let field = build_field(cfg, s)?;
        save_field(&field, &path)?;
        info!(
            "s = {s}: wrote {} ({} / {} cells valid)",
            path.display(),
            field.valid_count(),
            field.values.len()
        );
    }
    Ok(())
}

/// Load the per-scale fields the sweep subcommands consume. Fixture fields
/// are recomputed in memory when no file exists (they are cheap); physics
/// fields must have been produced by `field` first.
pub fn obtain_fields(cfg: &RunConfig) -> Result<Vec<ScalarField2D64>> {
    cfg.s_list
        .iter()
        .map(|&s| {
            let path = field_path(&cfg.out_dir, s);
            if path.exists() {
                let field = load_field(&path)?;
                if field.solver_digest != expected_digest(cfg, s) {
                    return Err(Error::Domain(format!(
                        "{} was produced with a different configuration; \
                         rerun `morse-lsm field --force`",
                        path.display()
                    )));
                }
                Ok(field)
            } else if cfg.fixture.is_some() {
                build_field(cfg, s)
            } else {
                Err(Error::Domain(format!(
                    "missing field file {}; run `morse-lsm field` first",
                    path.display()
                )))
            }
        })
        .collect()
}

/// Resolve the contour level against the first (smallest-s) field.
pub fn resolve_level(cfg: &RunConfig, fields: &[ScalarField2D64]) -> Result<f64> {
    match cfg.level {
        LevelSpec::Value(v) => Ok(v),
        LevelSpec::Percentile(p) => fields[0]
            .percentile(p)
            .ok_or_else(|| Error::Domain("cannot take percentile: all cells masked".into())),
    }
}

/// `contours` subcommand: CSV per scale, optional overlay SVG.
pub fn cmd_contours(cfg: &RunConfig, svg: bool) -> Result<()> {
    let fields = obtain_fields(cfg)?;
    let level = resolve_level(cfg, &fields)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut groups: Vec<(f64, Vec<Contour64>)> = Vec::new();
    let mut any = false;
    for field in &fields {
        let contours = extract_contours(field, level)?;
        if contours.is_empty() {
            warn!("s = {}: level {level} not crossed, no contours", field.s);
        } else {
            any = true;
        }
        let path = contours_path(&cfg.out_dir, field.s);
        write_contours_csv(&contours, &path)?;
        info!(
            "s = {}: {} contour(s), wrote {}",
            field.s,
            contours.len(),
            path.display()
        );
        groups.push((field.s, contours));
    }
    if !any {
        return Err(Error::Domain(format!(
            "level {level} is outside the field range at every scale"
        )));
    }
    if svg {
        let doc = crate::svg::contour_svg(&fields[0].grid, level, &groups);
        let path = svg_path(&cfg.out_dir);
        std::fs::write(&path, doc)?;
        info!("wrote {}", path.display());
    }
    println!("level {level:.12}");
    for (s, contours) in &groups {
        let longest = contours.first().map_or(0, |c| c.points.len());
        println!("s {s}: {} contour(s), longest {longest} points", contours.len());
    }
    Ok(())
}

/// `speeds` subcommand: average-speed table CSV, optional summary line.
pub fn cmd_speeds(cfg: &RunConfig, summary: bool) -> Result<()> {
    if cfg.s_list.len() < 2 {
        return Err(Error::Domain("speeds needs at least two scales".into()));
    }
    let fields = obtain_fields(cfg)?;
    let level = resolve_level(cfg, &fields)?;
    for field in &fields {
        if principal_contour(field, level)?.is_none() {
            return Err(Error::Domain(format!(
                "s = {}: no contour at level {level}",
                field.s
            )));
        }
    }
    let refs: Vec<&ScalarField2D64> = fields.iter().collect();
    let table = average_speed_table(&refs, level)?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = speeds_path(&cfg.out_dir);
    std::fs::write(&path, speed_table_to_csv(&table))?;
    info!("wrote {}", path.display());
    println!("s,ds,mean_speed,std_speed,n_samples,n_excluded");
    for row in &table.rows {
        println!(
            "{},{},{:.6},{:.6},{},{}",
            row.s, row.ds, row.mean_speed, row.std_speed, row.n_samples, row.n_excluded
        );
    }
    if summary {
        let means: Vec<f64> = table.rows.iter().map(|r| r.mean_speed).collect();
        let mean_of_means = means.iter().sum::<f64>() / means.len() as f64;
        let spread = (means.iter().cloned().fold(f64::MIN, f64::max)
            - means.iter().cloned().fold(f64::MAX, f64::min))
            / mean_of_means.abs();
        println!("summary: mean_of_means {mean_of_means:.6} relative_spread {spread:.6}");
    }
    Ok(())
}

/// One row of the advection consistency report.
#[derive(serde::Serialize)]
pub struct AdvectRow {
    pub s_from: f64,
    pub s_to: f64,
    pub mean_speed: f64,
    pub std_speed: f64,
    pub hausdorff: f64,
    pub clipped_points: usize,
}

/// `advect` subcommand: constant-speed advection vs the recomputed contour.
pub fn cmd_advect(cfg: &RunConfig, json: bool) -> Result<()> {
    if cfg.s_list.len() < 2 {
        return Err(Error::Domain("advect needs at least two scales".into()));
    }
    let fields = obtain_fields(cfg)?;
    let level = resolve_level(cfg, &fields)?;
    let mut rows = Vec::new();
    for pair in fields.windows(2) {
        let (f1, f2) = (&pair[0], &pair[1]);
        let c1 = principal_contour(f1, level)?.ok_or_else(|| {
            Error::Domain(format!("s = {}: no contour at level {level}", f1.s))
        })?;
        let c2 = principal_contour(f2, level)?.ok_or_else(|| {
            Error::Domain(format!("s = {}: no contour at level {level}", f2.s))
        })?;
        let delta = (f2.s / f1.s).ln();
        let samples = normal_speed(&c1, &c2, f1, delta)?;
        let (mean, std, _, _) = speed_stats(&samples).ok_or_else(|| {
            Error::Domain(format!("s = {}: every speed sample excluded", f1.s))
        })?;
        let (predicted, clipped) = advect_contour(&c1, mean, delta, f1)?;
        // clamped boundary points measure the rectangle edge, not the
        // advection, so they are excluded from the residual
        let hausdorff = directed_hausdorff_masked(&predicted, Some(&clipped), &c2);
        rows.push(AdvectRow {
            s_from: f1.s,
            s_to: f2.s,
            mean_speed: mean,
            std_speed: std,
            hausdorff,
            clipped_points: clipped.iter().filter(|&&x| x).count(),
        });
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("serializable"));
    } else {
        println!("s_from,s_to,mean_speed,std_speed,hausdorff,clipped_points");
        for r in &rows {
            println!(
                "{},{},{:.6},{:.6},{:.6},{}",
                r.s_from, r.s_to, r.mean_speed, r.std_speed, r.hausdorff, r.clipped_points
            );
        }
    }
    Ok(())
}

/// `solve` subcommand: single-point inspection of the bound states and d01.
pub fn cmd_solve(c: f64, a: f64, r0: f64, s: f64, json: bool, cfg: &RunConfig) -> Result<()> {
    let base = MorseParams64::new(c, a, r0)?;
    let params = apply_scale(&base, s)?;
    let count = bound_state_count(&params);
    if count < 2 {
        return Err(Error::Domain(format!(
            "bound_state_count = {count} at C' = {}, a' = {}: need >= 2 for d01",
            params.depth, params.inv_width
        )));
    }
    let result = dipole_01(&params, &cfg.solver)?;
    let exact0 = analytic_energy(&params, 0)?;
    let exact1 = analytic_energy(&params, 1)?;
    if json {
        let doc = serde_json::json!({
            "C": c, "a": a, "r0": r0, "s": s,
            "scaled": {"C": params.depth, "a": params.inv_width},
            "bound_states": count,
            "E0": {"numeric": result.energies.0, "analytic": exact0},
            "E1": {"numeric": result.energies.1, "analytic": exact1},
            "d01": result.value,
            "d01_estimated_error": result.estimated_error,
            "grid": {
                "r_min": result.grid_used.r_min,
                "r_max": result.grid_used.r_max,
                "n_points": result.grid_used.n_points,
            },
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    } else {
        println!("C = {c}, a = {a}, r0 = {r0}, s = {s}  (scaled: C' = {}, a' = {})", params.depth, params.inv_width);
        println!("bound states: {count}");
        println!("E_0: numeric {:.12}  analytic {:.12}", result.energies.0, exact0);
        println!("E_1: numeric {:.12}  analytic {:.12}", result.energies.1, exact1);
        println!("d01 = {:.12}  (estimated error {:.3e})", result.value, result.estimated_error);
        println!(
            "grid: [{:.6}, {:.6}] with {} points",
            result.grid_used.r_min, result.grid_used.r_max, result.grid_used.n_points
        );
    }
    Ok(())
}
