//! Acceptance suite: one pass/fail line per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines as they
//! complete; they are also printed on failure.
//!
//! The five default-resolution fields are computed once (through the CLI
//! binary, which also exercises the field-file round trip) and shared by
//! the criteria that need them.

use std::path::{Path, PathBuf};
use std::process::Command;

use once_cell::sync::Lazy;

use morse_lsm::contour::extract_contours;
use morse_lsm::field_io::load_field;
use morse_lsm::fixtures;
use morse_lsm::speed::{
    advect_contour, average_speed_table, directed_hausdorff_masked, normal_speed,
    parallelism_metric, principal_contour, speed_stats,
};
use morse_lsm::{dipole_01, Contour64, MorseParams64, ScalarField2D64, SolverConfig64};

const BIN: &str = env!("CARGO_BIN_EXE_morse-lsm");
const S_LIST: [f64; 5] = [1.0, 1.1, 1.2, 1.5, 1.7];

/// (C, a, E0, E1, d01) at r0 = 1, pinned from an independent solver.
const ORACLE: [(f64, f64, f64, f64, f64); 25] = [
    (6.0, 0.80, -4.694359353944898e+00, -2.563078061834693e+00, 4.46516158879085e-01),
    (6.0, 1.10, -4.245994111674235e+00, -1.645482335022704e+00, 3.84107975541869e-01),
    (6.0, 1.40, -3.820128869403572e+00, -9.303866082107153e-01, 3.38153021818398e-01),
    (6.0, 1.70, -3.416763627132909e+00, -4.177908813987258e-01, 2.93923423706118e-01),
    (6.0, 2.00, -3.035898384862246e+00, -1.076951545867361e-01, 2.32651274337054e-01),
    (11.0, 0.80, -9.203833696070628e+00, -6.091501088211884e+00, 3.79649273598505e-01),
    (11.0, 1.10, -8.571521332097115e+00, -4.622063996291342e+00, 3.27423921410568e-01),
    (11.0, 1.40, -7.961708968123599e+00, -3.355126904370799e+00, 2.92317586657235e-01),
    (11.0, 1.70, -7.374396604150085e+00, -2.290689812450255e+00, 2.65324918228935e-01),
    (11.0, 2.00, -6.809584240176569e+00, -1.428752720529711e+00, 2.41628066257459e-01),
    (16.0, 0.80, -1.381725830020305e+01, -9.931774900609144e+00, 3.43636394544497e-01),
    (16.0, 1.10, -1.303998016277919e+01, -8.027440488337573e+00, 2.96159244966869e-01),
    (16.0, 1.40, -1.228520202535533e+01, -6.325606076066003e+00, 2.64767843617410e-01),
    (16.0, 1.70, -1.155292388793148e+01, -4.826271663794430e+00, 2.41585535475885e-01),
    (16.0, 2.00, -1.084314575050762e+01, -3.529437251522860e+00, 2.22867231857609e-01),
    (21.0, 0.80, -1.848770372063685e+01, -1.394311116191057e+01, 3.19802948861693e-01),
    (21.0, 1.10, -1.758684261587567e+01, -1.166802784762703e+01, 2.75393356421855e-01),
    (21.0, 1.40, -1.670848151111450e+01, -9.595444533343496e+00, 2.46188480218137e-01),
    (21.0, 1.70, -1.585262040635332e+01, -7.725361219059955e+00, 2.24906781373440e-01),
    (21.0, 2.00, -1.501925930159214e+01, -6.057777904776420e+00, 2.08188160603727e-01),
    (26.0, 0.80, -2.319555897962881e+01, -1.806667693888642e+01, 3.02332164567357e-01),
    (26.0, 1.10, -2.218514359698961e+01, -1.546293079096883e+01, 2.60165400943217e-01),
    (26.0, 1.40, -2.119722821435041e+01, -1.306168464305124e+01, 2.32498278778358e-01),
    (26.0, 1.70, -2.023181283171122e+01, -1.086293849513365e+01, 2.12454717081447e-01),
    (26.0, 2.00, -1.928889744907202e+01, -8.866692347216066e+00, 1.96896634683337e-01),
];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Results of the 25 oracle-point solves, shared by criteria 1 and 2.
static ORACLE_SOLVES: Lazy<Vec<(f64, f64, f64)>> = Lazy::new(|| {
    let cfg = SolverConfig64::default();
    ORACLE
        .iter()
        .map(|&(c, a, _, _, _)| {
            let r = dipole_01(&MorseParams64::new(c, a, 1.0).unwrap(), &cfg)
                .unwrap_or_else(|e| panic!("solve failed at C={c}, a={a}: {e}"));
            (r.energies.0, r.energies.1, r.value)
        })
        .collect()
});

/// Shared output directory holding the default-resolution run.
static OUT_DIR: Lazy<tempfile::TempDir> = Lazy::new(|| tempfile::tempdir().unwrap());

fn run_bin(args: &[&str]) -> std::process::Output {
    Command::new(BIN)
        .args(args)
        .env("MORSE_LSM_OUT", OUT_DIR.path())
        .output()
        .expect("binary runs")
}

/// The five default fields, produced through the CLI binary.
static FIELDS: Lazy<Vec<ScalarField2D64>> = Lazy::new(|| {
    let out = run_bin(&["field"]);
    assert!(
        out.status.success(),
        "field sweep failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    S_LIST
        .iter()
        .map(|&s| load_field(&field_path(OUT_DIR.path(), s)).expect("field file loads"))
        .collect()
});

fn field_path(dir: &Path, s: f64) -> PathBuf {
    dir.join(format!("field_s{s}.json"))
}

static MEDIAN_LEVEL: Lazy<f64> = Lazy::new(|| FIELDS[0].percentile(50.0).unwrap());

/// Longest contour per scale at the median level.
static MEDIAN_CONTOURS: Lazy<Vec<Contour64>> = Lazy::new(|| {
    FIELDS
        .iter()
        .map(|f| {
            principal_contour(f, *MEDIAN_LEVEL)
                .unwrap()
                .unwrap_or_else(|| panic!("no contour at s = {}", f.s))
        })
        .collect()
});

type Checked = Result<String, String>;

fn criterion_1_spectrum_oracle() -> Checked {
    let mut worst = 0.0f64;
    for (&(c, a, e0, e1, _), &(n0, n1, _)) in ORACLE.iter().zip(ORACLE_SOLVES.iter()) {
        let err = rel(n0, e0).max(rel(n1, e1));
        worst = worst.max(err);
        if err > 1e-6 {
            return Err(format!("C={c}, a={a}: energy error {err:.2e} > 1e-6"));
        }
    }
    Ok(format!("25 points, worst relative energy error {worst:.2e}"))
}

fn criterion_2_dipole_oracle() -> Checked {
    let mut worst = 0.0f64;
    for (&(c, a, _, _, d), &(_, _, nd)) in ORACLE.iter().zip(ORACLE_SOLVES.iter()) {
        let err = rel(nd, d);
        worst = worst.max(err);
        if err > 1e-5 {
            return Err(format!("C={c}, a={a}: d01 error {err:.2e} > 1e-5"));
        }
    }
    Ok(format!("25 points, worst relative d01 error {worst:.2e}"))
}

fn criterion_3_scaling_symmetry() -> Checked {
    let cfg = SolverConfig64::default();
    let bases: [(f64, f64); 5] = [(12.0, 1.0), (16.0, 1.4), (21.0, 0.8), (26.0, 2.0), (11.0, 1.7)];
    let mut worst = 0.0f64;
    for &(c, a) in &bases {
        let d = dipole_01(&MorseParams64::new(c, a, 1.0).unwrap(), &cfg)
            .map_err(|e| e.to_string())?
            .value;
        for k in [0.5f64, 2.0] {
            let ds = dipole_01(&MorseParams64::new(c / (k * k), a / k, 1.0).unwrap(), &cfg)
                .map_err(|e| e.to_string())?
                .value;
            let err = rel(ds, k * d);
            worst = worst.max(err);
            if err > 1e-5 {
                return Err(format!("C={c}, a={a}, k={k}: scaling error {err:.2e} > 1e-5"));
            }
        }
    }
    // lambda collapse: equal lambda implies equal a * d01
    let pairs: [((f64, f64), (f64, f64)); 2] = [((12.0, 1.0), (48.0, 2.0)), ((16.0, 1.4), (4.0, 0.7))];
    for &((c1, a1), (c2, a2)) in &pairs {
        let d1 = dipole_01(&MorseParams64::new(c1, a1, 1.0).unwrap(), &cfg)
            .map_err(|e| e.to_string())?
            .value;
        let d2 = dipole_01(&MorseParams64::new(c2, a2, 1.0).unwrap(), &cfg)
            .map_err(|e| e.to_string())?
            .value;
        let err = rel(a1 * d1, a2 * d2);
        worst = worst.max(err);
        if err > 1e-5 {
            return Err(format!("lambda pair ({c1},{a1})/({c2},{a2}): collapse error {err:.2e}"));
        }
    }
    Ok(format!("worst symmetry violation {worst:.2e}"))
}

fn criterion_4_extraction_convergence() -> Checked {
    // circle fixture: max position error must scale O(h^2)
    let errs: Vec<f64> = [41usize, 81, 161]
        .iter()
        .map(|&n| {
            let field = fixtures::circle_field(1.0, n);
            let contours = extract_contours(&field, 1.2).unwrap();
            contours[0]
                .points
                .iter()
                .map(|&(a, c)| {
                    let r = ((a - fixtures::CIRCLE_CENTER.0).powi(2)
                        + (c - fixtures::CIRCLE_CENTER.1).powi(2))
                    .sqrt();
                    (r - 1.2).abs()
                })
                .fold(0.0f64, f64::max)
        })
        .collect();
    let slope = (errs[0] / errs[2]).ln() / (4.0f64).ln();
    if (slope - 2.0).abs() > 0.3 {
        return Err(format!("circle convergence slope {slope:.3} outside 2 +/- 0.3"));
    }
    // moving-line fixture: speed table means exactly 1
    let line_fields: Vec<ScalarField2D64> = S_LIST.iter().map(|&s| fixtures::line_field(s)).collect();
    let refs: Vec<&ScalarField2D64> = line_fields.iter().collect();
    let level = line_fields[0].percentile(50.0).unwrap();
    let table = average_speed_table(&refs, level).map_err(|e| e.to_string())?;
    for row in &table.rows {
        if (row.mean_speed - 1.0).abs() > 1e-6 {
            return Err(format!("line fixture mean at s={} is {}", row.s, row.mean_speed));
        }
    }
    Ok(format!(
        "circle slope {slope:.3}; line means within {:.1e} of 1",
        table
            .rows
            .iter()
            .map(|r| (r.mean_speed - 1.0).abs())
            .fold(0.0f64, f64::max)
    ))
}

fn criterion_5_contour_overlay() -> Checked {
    Lazy::force(&FIELDS);
    let out = run_bin(&["contours", "--svg"]);
    if !out.status.success() {
        return Err(format!("contours run failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let mut worst_dev = 0.0f64;
    for (field, contour) in FIELDS.iter().zip(MEDIAN_CONTOURS.iter()) {
        // level fidelity: interpolated field equals the level at every point
        let dev = contour.max_level_deviation(field);
        worst_dev = worst_dev.max(dev);
        if dev > 1e-9 {
            return Err(format!("s={}: level deviation {dev:.2e}", field.s));
        }
        // monotone graph over a: no self-intersections
        let monotone = contour
            .points
            .windows(2)
            .all(|w| w[1].0 > w[0].0)
            || contour.points.windows(2).all(|w| w[1].0 < w[0].0);
        if !monotone {
            return Err(format!("s={}: contour is not a monotone graph over a", field.s));
        }
    }
    let svg = std::fs::read_to_string(OUT_DIR.path().join("contours.svg"))
        .map_err(|e| format!("missing SVG: {e}"))?;
    let groups = svg.matches("<g id=\"s-").count();
    if groups != 5 {
        return Err(format!("SVG has {groups} contour groups, expected 5"));
    }
    Ok(format!(
        "5 contours, monotone, worst level deviation {worst_dev:.2e}, SVG emitted"
    ))
}

fn criterion_6_speed_constancy() -> Checked {
    let refs: Vec<&ScalarField2D64> = FIELDS.iter().collect();
    let mut report = Vec::new();
    for pct in [25.0, 50.0, 75.0] {
        let level = FIELDS[0].percentile(pct).unwrap();
        let table = average_speed_table(&refs, level).map_err(|e| e.to_string())?;
        let means: Vec<f64> = table.rows.iter().map(|r| r.mean_speed).collect();
        if means.len() != 4 || table.rows.iter().any(|r| r.n_samples == 0) {
            return Err(format!("percentile {pct}: missing speed rows"));
        }
        let mean = means.iter().sum::<f64>() / means.len() as f64;
        let spread = (means.iter().cloned().fold(f64::MIN, f64::max)
            - means.iter().cloned().fold(f64::MAX, f64::min))
            / mean.abs();
        if spread >= 0.10 {
            return Err(format!("percentile {pct}: relative spread {spread:.3} >= 0.10"));
        }
        for row in &table.rows {
            let ratio = row.std_speed / row.mean_speed.abs();
            if ratio >= 0.15 {
                return Err(format!(
                    "percentile {pct}, s={}: std/mean {ratio:.3} >= 0.15",
                    row.s
                ));
            }
        }
        report.push(format!("p{pct:.0} spread {spread:.3}"));
    }
    Ok(report.join(", "))
}

fn criterion_7_parallelism() -> Checked {
    let mut worst_mean = 0.0f64;
    for k in 0..4 {
        let (f1, f2) = (&FIELDS[k], &FIELDS[k + 1]);
        let delta = (f2.s / f1.s).ln();
        let samples = normal_speed(&MEDIAN_CONTOURS[k], &MEDIAN_CONTOURS[k + 1], f1, delta)
            .map_err(|e| e.to_string())?;
        let (mean_angle, _max_angle) = parallelism_metric(&samples, f2).map_err(|e| e.to_string())?;
        worst_mean = worst_mean.max(mean_angle);
        if mean_angle >= 10.0 {
            return Err(format!(
                "pair s={}→{}: mean matched-normal angle {mean_angle:.2} deg >= 10",
                f1.s, f2.s
            ));
        }
    }
    Ok(format!("worst pair mean angle {worst_mean:.2} deg"))
}

fn criterion_8_advection() -> Checked {
    let mut worst_ratio = 0.0f64;
    for k in 0..4 {
        let (f1, f2) = (&FIELDS[k], &FIELDS[k + 1]);
        let delta = (f2.s / f1.s).ln();
        let samples = normal_speed(&MEDIAN_CONTOURS[k], &MEDIAN_CONTOURS[k + 1], f1, delta)
            .map_err(|e| e.to_string())?;
        let (mean, std, _, _) = speed_stats(&samples).ok_or("no included samples")?;
        let (predicted, clipped) = advect_contour(&MEDIAN_CONTOURS[k], mean, delta, f1)
            .map_err(|e| e.to_string())?;
        let hausdorff =
            directed_hausdorff_masked(&predicted, Some(&clipped), &MEDIAN_CONTOURS[k + 1]);
        let bound = 2.0 * std * delta;
        let ratio = hausdorff / bound;
        worst_ratio = worst_ratio.max(ratio);
        if hausdorff > bound {
            return Err(format!(
                "pair s={}→{}: Hausdorff {hausdorff:.3e} > 2*std*delta = {bound:.3e} (ratio {ratio:.2})",
                f1.s, f2.s
            ));
        }
    }
    Ok(format!("worst Hausdorff / (2 std delta) ratio {worst_ratio:.2}"))
}

fn criterion_9_no_kinks() -> Checked {
    let mut worst = 0.0f64;
    for (field, contour) in FIELDS.iter().zip(MEDIAN_CONTOURS.iter()) {
        for w in contour.points.windows(3) {
            let v1 = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            let v2 = (w[2].0 - w[1].0, w[2].1 - w[1].1);
            let dot = v1.0 * v2.0 + v1.1 * v2.1;
            let n1 = (v1.0 * v1.0 + v1.1 * v1.1).sqrt();
            let n2 = (v2.0 * v2.0 + v2.1 * v2.1).sqrt();
            let angle = (dot / (n1 * n2)).clamp(-1.0, 1.0).acos().to_degrees();
            worst = worst.max(angle);
            if angle > 90.0 {
                return Err(format!(
                    "s={}: turn of {angle:.1} deg near a={:.3}, C={:.3}",
                    field.s, w[1].0, w[1].1
                ));
            }
        }
    }
    Ok(format!("max segment turn {worst:.2} deg across all scales"))
}

fn criterion_10_determinism() -> Checked {
    let grid = "0.9,1.9,7,12,26,8";
    let dirs: Vec<tempfile::TempDir> =
        (0..2).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, workers) in dirs.iter().zip(["1", "8"]) {
        let out = Command::new(BIN)
            .args([
                "field",
                "--grid",
                grid,
                "--s",
                "1.0,1.3",
                "--workers",
                workers,
                "--out",
                dir.path().to_str().unwrap(),
            ])
            .output()
            .expect("binary runs");
        if !out.status.success() {
            return Err(format!(
                "field --workers {workers} failed: {}",
                String::from_utf8_lossy(&out.stderr)
            ));
        }
    }
    for s in ["1", "1.3"] {
        let name = format!("field_s{s}.json");
        let b1 = std::fs::read(dirs[0].path().join(&name)).map_err(|e| e.to_string())?;
        let b8 = std::fs::read(dirs[1].path().join(&name)).map_err(|e| e.to_string())?;
        if b1 != b8 {
            return Err(format!("{name} differs between worker counts 1 and 8"));
        }
    }
    Ok("field files byte-identical for workers 1 and 8".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Checked); 10] = [
        ("1 spectrum oracle", criterion_1_spectrum_oracle),
        ("2 dipole oracle", criterion_2_dipole_oracle),
        ("3 scaling symmetry", criterion_3_scaling_symmetry),
        ("4 extraction convergence", criterion_4_extraction_convergence),
        ("5 contour overlay", criterion_5_contour_overlay),
        ("6 speed constancy", criterion_6_speed_constancy),
        ("7 parallelism", criterion_7_parallelism),
        ("8 advection consistency", criterion_8_advection),
        ("9 no kinks", criterion_9_no_kinks),
        ("10 determinism", criterion_10_determinism),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("criterion {name}: PASS — {detail}"),
            Err(detail) => {
                println!("criterion {name}: FAIL — {detail}");
                failures += 1;
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
