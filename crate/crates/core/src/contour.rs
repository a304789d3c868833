//! Equal-value contour extraction by marching squares with linear edge
//! interpolation, plus the contour CSV format.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::field::ScalarField2D;
use crate::{Error, Result, Scalar};

/// Ordered polyline in (a, C) parameter space at a fixed level and scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour<T> {
    pub level: T,
    pub s: T,
    pub points: Vec<(T, T)>,
    pub closed: bool,
}

impl<T: Scalar> Contour<T> {
    /// Largest deviation of the bilinearly interpolated field from the
    /// contour level, over all points. Diagnostic for level fidelity.
    pub fn max_level_deviation(&self, field: &ScalarField2D<T>) -> T {
        let grid = &field.grid;
        self.points
            .iter()
            .filter_map(|&(a, c)| {
                let x = (a - grid.a_min) / grid.a_step();
                let y = (c - grid.c_min) / grid.c_step();
                field.bilinear(x, y).map(|v| (v - self.level).abs())
            })
            .fold(T::zero(), T::max)
    }

    /// Chord length in raw (a, C) units.
    pub fn chord_length(&self) -> T {
        self.points
            .windows(2)
            .map(|w| {
                let dx = w[1].0 - w[0].0;
                let dy = w[1].1 - w[0].1;
                (dx * dx + dy * dy).sqrt()
            })
            .sum()
    }
}

/// Edge identifier inside the sample lattice; `horizontal` edges join
/// column `j` to `j+1` at row `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct EdgeId {
    i: usize,
    j: usize,
    horizontal: bool,
}

struct Segment {
    a: EdgeId,
    b: EdgeId,
}

/// Extract all contours of `field` at level `c`. Cells touching masked
/// samples are skipped; saddle cells are resolved by the cell-center
/// average rule. Returns maximal chained polylines, longest first.
pub fn extract_contours<T: Scalar>(field: &ScalarField2D<T>, c: T) -> Result<Vec<Contour<T>>> {
    let grid = &field.grid;
    if field.valid_count() < 4 {
        return Err(Error::Domain("contour extraction needs at least 2x2 valid cells".into()));
    }
    let Some((lo, hi)) = field.valid_range() else {
        return Err(Error::Domain("field has no valid cells".into()));
    };
    if !(c > lo && c < hi) {
        // level outside the sampled range: empty result, caller may warn
        return Ok(Vec::new());
    }

    let mut segments: Vec<Segment> = Vec::new();
    for i in 0..grid.n_c - 1 {
        for j in 0..grid.n_a - 1 {
            if !(field.is_valid(i, j)
                && field.is_valid(i, j + 1)
                && field.is_valid(i + 1, j)
                && field.is_valid(i + 1, j + 1))
            {
                continue;
            }
            let f = [
                field.value(i, j),
                field.value(i, j + 1),
                field.value(i + 1, j + 1),
                field.value(i + 1, j),
            ];
            let code = (usize::from(f[0] >= c))
                | (usize::from(f[1] >= c) << 1)
                | (usize::from(f[2] >= c) << 2)
                | (usize::from(f[3] >= c) << 3);
            let bottom = EdgeId { i, j, horizontal: true };
            let top = EdgeId { i: i + 1, j, horizontal: true };
            let left = EdgeId { i, j, horizontal: false };
            let right = EdgeId { i, j: j + 1, horizontal: false };
            let mut push = |a: EdgeId, b: EdgeId| segments.push(Segment { a, b });
            match code {
                0 | 15 => {}
                1 => push(left, bottom),
                2 => push(bottom, right),
                3 => push(left, right),
                4 => push(top, right),
                6 => push(bottom, top),
                7 => push(left, top),
                8 => push(left, top),
                9 => push(bottom, top),
                11 => push(top, right),
                12 => push(left, right),
                13 => push(bottom, right),
                14 => push(left, bottom),
                5 => {
                    // corners 0 and 2 high
                    let center = (f[0] + f[1] + f[2] + f[3]) / T::c(4.0);
                    if center >= c {
                        push(left, top);
                        push(bottom, right);
                    } else {
                        push(left, bottom);
                        push(top, right);
                    }
                }
                10 => {
                    // corners 1 and 3 high
                    let center = (f[0] + f[1] + f[2] + f[3]) / T::c(4.0);
                    if center >= c {
                        push(left, bottom);
                        push(top, right);
                    } else {
                        push(bottom, right);
                        push(left, top);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // crossing position of the level on an edge, in (a, C) units
    let crossing = |e: &EdgeId| -> (T, T) {
        let (f0, f1) = if e.horizontal {
            (field.value(e.i, e.j), field.value(e.i, e.j + 1))
        } else {
            (field.value(e.i, e.j), field.value(e.i + 1, e.j))
        };
        let t = if f1 == f0 { T::c(0.5) } else { (c - f0) / (f1 - f0) };
        let t = t.max(T::zero()).min(T::one());
        if e.horizontal {
            (
                grid.a_value(e.j) + t * grid.a_step(),
                grid.c_value(e.i),
            )
        } else {
            (
                grid.a_value(e.j),
                grid.c_value(e.i) + t * grid.c_step(),
            )
        }
    };

    // adjacency: each edge borders at most two cells, so at most two segments
    let mut by_edge: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (k, seg) in segments.iter().enumerate() {
        by_edge.entry(seg.a).or_default().push(k);
        by_edge.entry(seg.b).or_default().push(k);
    }

    let mut used = vec![false; segments.len()];
    let mut contours = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut chain: Vec<EdgeId> = vec![segments[start].a, segments[start].b];
        let mut closed = false;
        // walk forward from the tail, then backward from the head
        loop {
            let tail = *chain.last().unwrap();
            let next = by_edge[&tail].iter().find(|&&k| !used[k]).copied();
            match next {
                Some(k) => {
                    used[k] = true;
                    let seg = &segments[k];
                    let other = if seg.a == tail { seg.b } else { seg.a };
                    if other == chain[0] {
                        closed = true;
                        break;
                    }
                    chain.push(other);
                }
                None => break,
            }
        }
        if !closed {
            loop {
                let head = chain[0];
                let next = by_edge[&head].iter().find(|&&k| !used[k]).copied();
                match next {
                    Some(k) => {
                        used[k] = true;
                        let seg = &segments[k];
                        let other = if seg.a == head { seg.b } else { seg.a };
                        chain.insert(0, other);
                    }
                    None => break,
                }
            }
        }
        let mut points: Vec<(T, T)> = chain.iter().map(&crossing).collect();
        points.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        if points.len() >= 2 {
            contours.push(Contour {
                level: c,
                s: field.s,
                points,
                closed,
            });
        }
    }
    contours.sort_by(|a, b| {
        b.points
            .len()
            .cmp(&a.points.len())
            .then_with(|| a.points[0].0.partial_cmp(&b.points[0].0).unwrap())
    });
    Ok(contours)
}

/// Write contours as CSV: `level,s,contour_id,point_index,a,C`.
pub fn write_contours_csv(contours: &[Contour<f64>], path: &Path) -> Result<()> {
    let mut out = String::from("level,s,contour_id,point_index,a,C\n");
    for (id, contour) in contours.iter().enumerate() {
        for (k, (a, c)) in contour.points.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                contour.level, contour.s, id, k, a, c
            ));
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(out.as_bytes())?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Read contours back from the CSV layout of [`write_contours_csv`].
/// The `closed` flag is not stored; reloaded contours are treated as open.
pub fn read_contours_csv(path: &Path) -> Result<Vec<Contour<f64>>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("level,s,contour_id,point_index,a,C") => {}
        other => {
            return Err(Error::Format(format!("bad contour CSV header: {other:?}")));
        }
    }
    let mut contours: Vec<Contour<f64>> = Vec::new();
    let mut current_id: Option<usize> = None;
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Format(format!("contour CSV line {} malformed", lineno + 2)));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::Format(format!("contour CSV line {}: {e}", lineno + 2)))
        };
        let level = parse(fields[0])?;
        let s = parse(fields[1])?;
        let id: usize = fields[2]
            .parse()
            .map_err(|e| Error::Format(format!("contour CSV line {}: {e}", lineno + 2)))?;
        let a = parse(fields[4])?;
        let c = parse(fields[5])?;
        if current_id != Some(id) {
            contours.push(Contour {
                level,
                s,
                points: Vec::new(),
                closed: false,
            });
            current_id = Some(id);
        }
        contours.last_mut().unwrap().points.push((a, c));
    }
    Ok(contours)
}
