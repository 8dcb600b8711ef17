//! Surface files: a CSV grid plus a JSON sidecar with run metadata.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::io_error;
use crate::otoc::{SpreadSurface, SurfaceDiagnostics, SurfacePoint, Variant};
use crate::{Error, Result};

pub const CSV_COLUMNS: [&str; 10] = [
    "j", "ell", "t", "C_raw", "C_tmem", "C_zne", "C_corr", "C_exact", "F_abs", "F_phase",
];

/// Version of the CSV/JSON layout.
pub const FORMAT_VERSION: u32 = 1;

/// Rounds to 12 significant digits and prints the shortest decimal that reads back to it.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

fn format_optional(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

pub fn write_surface_csv<W: Write>(surface: &SpreadSurface, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for p in &surface.points {
        w.write_record([
            p.j.to_string(),
            p.ell.to_string(),
            format_number(p.t),
            format_optional(p.c_raw),
            format_optional(p.c_tmem),
            format_optional(p.c_zne),
            format_optional(p.c_corr),
            format_optional(p.c_exact),
            format_optional(p.f_abs),
            format_optional(p.f_phase),
        ])?;
    }
    w.flush().map_err(io_error("<csv>"))?;
    Ok(())
}

pub fn surface_csv_string(surface: &SpreadSurface) -> String {
    let mut buf = Vec::new();
    write_surface_csv(surface, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

/// Parses a surface CSV. The grid must be complete and `j`-major.
pub fn read_surface_csv<R: Read>(input: R) -> Result<SpreadSurface> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::GridMismatch(format!(
            "unexpected header `{}`",
            header.join(",")
        )));
    }
    let mut points = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |col: &str, v: &str| {
            Error::GridMismatch(format!("row {}: bad {col} value `{v}`", row + 2))
        };
        let int = |i: usize| {
            rec[i]
                .parse::<usize>()
                .map_err(|_| bad(CSV_COLUMNS[i], &rec[i]))
        };
        let real = |i: usize| -> Result<Option<f64>> {
            if rec[i].is_empty() {
                Ok(None)
            } else {
                rec[i]
                    .parse()
                    .map(Some)
                    .map_err(|_| bad(CSV_COLUMNS[i], &rec[i]))
            }
        };
        points.push(SurfacePoint {
            j: int(0)?,
            ell: int(1)?,
            t: real(2)?.ok_or_else(|| bad("t", ""))?,
            c_raw: real(3)?,
            c_tmem: real(4)?,
            c_zne: real(5)?,
            c_corr: real(6)?,
            c_exact: real(7)?,
            f_abs: real(8)?,
            f_phase: real(9)?,
        });
    }
    let n = points.iter().map(|p| p.j).max().unwrap_or(0);
    let ell_max = points.iter().map(|p| p.ell).max().unwrap_or(0);
    if points.is_empty() || points.len() != n * (ell_max + 1) {
        return Err(Error::GridMismatch(format!(
            "{} rows do not form a complete grid",
            points.len()
        )));
    }
    for (idx, p) in points.iter().enumerate() {
        if (p.j, p.ell) != (idx / (ell_max + 1) + 1, idx % (ell_max + 1)) {
            return Err(Error::GridMismatch(format!(
                "row {} is (j={}, ell={}), out of j-major order",
                idx + 2,
                p.j,
                p.ell
            )));
        }
    }
    let tau = if ell_max > 0 { points[1].t } else { 0.0 };
    Ok(SpreadSurface {
        n,
        ell_max,
        tau,
        points,
        diagnostics: SurfaceDiagnostics::default(),
    })
}

pub fn load_surface(path: impl AsRef<Path>) -> Result<SpreadSurface> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(io_error(path))?;
    read_surface_csv(std::io::BufReader::new(file))
}

/// Provenance of a difference surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSource {
    pub minuend: String,
    pub minuend_column: Variant,
    pub subtrahend: String,
    pub subtrahend_column: Variant,
}

/// The JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMetadata {
    pub format_version: u32,
    pub code_version: String,
    pub columns: Vec<String>,
    pub rows: usize,
    pub n: usize,
    pub ell_max: usize,
    pub tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ExperimentConfig>,
    pub diagnostics: SurfaceDiagnostics,
    pub difference: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference_of: Option<DifferenceSource>,
}

impl SurfaceMetadata {
    pub fn for_surface(surface: &SpreadSurface) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            columns: CSV_COLUMNS.iter().map(|c| c.to_string()).collect(),
            rows: surface.points.len(),
            n: surface.n,
            ell_max: surface.ell_max,
            tau: surface.tau,
            seed: None,
            shots: None,
            config: None,
            diagnostics: surface.diagnostics.clone(),
            difference: false,
            difference_of: None,
        }
    }

    pub fn for_run(surface: &SpreadSurface, config: &ExperimentConfig) -> Self {
        let sampled = !config.pipeline.is_unitary();
        Self {
            seed: Some(config.seed),
            shots: sampled.then_some(config.shots),
            config: Some(config.clone()),
            ..Self::for_surface(surface)
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metadata serializes");
        s.push('\n');
        s
    }
}

/// Sidecar path next to a CSV: `surface.csv` → `surface.json`.
pub fn sidecar_path(csv: impl AsRef<Path>) -> PathBuf {
    csv.as_ref().with_extension("json")
}

pub fn load_metadata(csv: impl AsRef<Path>) -> Result<Option<SurfaceMetadata>> {
    let path = sidecar_path(csv);
    match std::fs::read_to_string(&path) {
        Ok(s) => Ok(Some(serde_json::from_str(&s)?)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(io_error(path)(e)),
    }
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`, returning both paths.
pub fn write_surface_files(
    dir: &Path,
    stem: &str,
    surface: &SpreadSurface,
    metadata: &SurfaceMetadata,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(io_error(dir))?;
    let csv = dir.join(format!("{stem}.csv"));
    let json = sidecar_path(&csv);
    std::fs::write(&csv, surface_csv_string(surface)).map_err(io_error(&csv))?;
    std::fs::write(&json, metadata.to_json()).map_err(io_error(&json))?;
    Ok((csv, json))
}

/// Pointwise `a[column] − b[against]` over congruent grids, stored in `column`.
pub fn diff_surfaces(
    a: &SpreadSurface,
    b: &SpreadSurface,
    column: Variant,
    against: Variant,
) -> Result<SpreadSurface> {
    if (a.n, a.ell_max) != (b.n, b.ell_max) {
        return Err(Error::GridMismatch(format!(
            "n={}, ell_max={} vs n={}, ell_max={}",
            a.n, a.ell_max, b.n, b.ell_max
        )));
    }
    let mut points = Vec::with_capacity(a.points.len());
    for (pa, pb) in a.points.iter().zip(&b.points) {
        if format_number(pa.t) != format_number(pb.t) {
            return Err(Error::GridMismatch(format!(
                "t differs at j={}, ell={}: {} vs {}",
                pa.j, pa.ell, pa.t, pb.t
            )));
        }
        let value = |s: &SpreadSurface, p: &SurfacePoint, v: Variant| {
            p.get(v).ok_or_else(|| {
                Error::GridMismatch(format!(
                    "{v} is empty at j={}, ell={} (n={})",
                    p.j, p.ell, s.n
                ))
            })
        };
        let mut d = SurfacePoint {
            j: pa.j,
            ell: pa.ell,
            t: pa.t,
            ..Default::default()
        };
        d.set(column, Some(value(a, pa, column)? - value(b, pb, against)?));
        points.push(d);
    }
    Ok(SpreadSurface {
        n: a.n,
        ell_max: a.ell_max,
        tau: a.tau,
        points,
        diagnostics: SurfaceDiagnostics::default(),
    })
}

/// Columns named in a CSV header that actually carry data in every row.
pub fn populated_columns(surface: &SpreadSurface) -> BTreeSet<&'static str> {
    surface
        .present_variants()
        .into_iter()
        .map(Variant::column)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SpreadSurface {
        let points = (1..=3)
            .flat_map(|j| {
                (0..=2).map(move |ell| SurfacePoint {
                    j,
                    ell,
                    t: ell as f64 * 0.1,
                    c_raw: Some(0.1 * j as f64 + ell as f64 / 3.0),
                    c_exact: Some(-0.0),
                    ..Default::default()
                })
            })
            .collect();
        SpreadSurface {
            n: 3,
            ell_max: 2,
            tau: 0.1,
            points,
            diagnostics: SurfaceDiagnostics::default(),
        }
    }

    #[test]
    fn number_format_is_twelve_digits() {
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(2.0), "2");
        assert_eq!(
            format_number(1.23456789012345e-20),
            "0.0000000000000000000123456789012"
        );
        assert_eq!(format_number(3.0 * 0.06), "0.18");
    }

    #[test]
    fn csv_round_trip() {
        let s = tiny();
        let text = surface_csv_string(&s);
        assert!(text.starts_with("j,ell,t,C_raw,C_tmem,C_zne,C_corr,C_exact,F_abs,F_phase\n"));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 1 + 9);
        assert!(text.contains("\n2,1,0.1,0.533333333333,,,,0,,\n"), "{text}");
        let back = read_surface_csv(text.as_bytes()).unwrap();
        assert_eq!((back.n, back.ell_max, back.tau), (3, 2, 0.1));
        assert_eq!(surface_csv_string(&back), text);
        assert_eq!(
            populated_columns(&back).into_iter().collect::<Vec<_>>(),
            ["C_exact", "C_raw"]
        );
    }

    #[test]
    fn incomplete_grids_are_rejected() {
        let text = surface_csv_string(&tiny());
        let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            read_surface_csv(truncated.as_bytes()),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn difference_of_identical_surfaces_is_zero() {
        let s = tiny();
        let d = diff_surfaces(&s, &s, Variant::Raw, Variant::Raw).unwrap();
        assert!(d
            .points
            .iter()
            .all(|p| p.c_raw == Some(0.0) && p.c_exact.is_none()));
        let d = diff_surfaces(&s, &s, Variant::Raw, Variant::Exact).unwrap();
        assert_eq!(d.point(2, 1).c_raw, s.point(2, 1).c_raw);
        assert!(diff_surfaces(&s, &s, Variant::Tmem, Variant::Raw).is_err());

        let mut other = tiny();
        other.ell_max = 1;
        assert!(matches!(
            diff_surfaces(&s, &other, Variant::Raw, Variant::Raw),
            Err(Error::GridMismatch(_))
        ));
    }
}
