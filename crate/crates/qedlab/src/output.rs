//! CSV files and gnuplot scripts.
//!
//! Every file starts with the resolved configuration as `#` comment lines.
//! Floating-point fields use scientific notation with 12 significant digits.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::ground::ResultRow;
use crate::spectrum::SpectrumMap;

pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn create(path: &Path) -> Result<File, CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    }
    File::create(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn with_header(path: &Path, run: &RunConfig) -> Result<csv::Writer<File>, CliError> {
    let mut f = create(path)?;
    f.write_all(run.header().as_bytes())
        .map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    Ok(csv::Writer::from_writer(f))
}

const GROUND_COLUMNS: &[&str] = &[
    "preset",
    "label",
    "method",
    "points",
    "spacing",
    "boundary",
    "order",
    "max_n",
    "lambda",
    "omega",
    "g_over_omega",
    "softening",
    "kappa",
    "energy",
    "dipole_variance",
    "photon_number",
    "scf_iterations",
    "excitation_distribution",
    "reference_energy",
    "energy_deviation",
    "reference_photon_number",
    "photon_number_deviation",
    "status",
];

/// Writes `<dir>/<preset>_<label>.csv` with one row per sweep point.
pub fn write_ground(dir: &Path, run: &RunConfig, rows: &[ResultRow]) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{}.csv", run.file_stem()));
    let mut w = with_header(&path, run)?;
    w.write_record(GROUND_COLUMNS)?;
    for r in rows {
        let p = &r.point;
        let mut rec = vec![
            run.preset.clone(),
            run.label.clone(),
            run.method.name().to_string(),
            run.grid.points.to_string(),
            num(run.grid.spacing),
            format!("{:?}", run.grid.boundary).to_lowercase(),
            run.grid.order.to_string(),
            run.solver.max_n.to_string(),
            num(p.lambda),
            num(p.omega),
            num(p.lambda * (0.5 * p.omega).sqrt() / p.omega),
            num(p.softening),
            num(p.kappa),
        ];
        let reference = r.reference.as_ref().and_then(|x| x.as_ref().ok());
        match &r.outcome {
            Ok(o) => {
                rec.push(num(o.energy));
                rec.push(opt(o.dipole_variance));
                rec.push(opt(o.photon_number));
                rec.push(o.scf_iterations.map(|n| n.to_string()).unwrap_or_default());
                rec.push(
                    o.excitation_distribution
                        .as_ref()
                        .map(|d| d.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";"))
                        .unwrap_or_default(),
                );
                rec.push(opt(reference.map(|x| x.energy)));
                rec.push(opt(reference.map(|x| (o.energy - x.energy).abs())));
                rec.push(opt(reference.and_then(|x| x.photon_number)));
                rec.push(opt(reference
                    .and_then(|x| x.photon_number)
                    .zip(o.photon_number)
                    .map(|(a, b)| (a - b).abs())));
            }
            Err(_) => rec.extend(std::iter::repeat_n(String::new(), 9)),
        }
        rec.push(status(r));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::Io(path.clone(), e))?;
    Ok(path)
}

fn status(r: &ResultRow) -> String {
    match (&r.outcome, &r.reference) {
        (Err(e), _) => format!("failed: {e}"),
        (Ok(_), Some(Err(e))) => format!("reference failed: {e}"),
        _ => "ok".into(),
    }
}

pub fn row_failed(r: &ResultRow) -> bool {
    status(r) != "ok"
}

/// Writes the `|d(ω)|` matrix: the first row holds the column count and the
/// cavity frequencies, each further row a response frequency and its values.
pub fn write_spectrum(dir: &Path, run: &RunConfig, map: &SpectrumMap) -> Result<Vec<PathBuf>, CliError> {
    let path = dir.join(format!("{}.csv", run.file_stem()));
    let mut w = with_header(&path, run)?;
    let mut head = vec![map.cavity.len().to_string()];
    head.extend(map.cavity.iter().map(|p| num(p.omega)));
    w.write_record(&head)?;
    for (i, w_resp) in map.omega.iter().enumerate() {
        let mut rec = vec![num(*w_resp)];
        rec.extend(map.columns.iter().map(|c| match c {
            Ok(s) => num(s.amplitude[i]),
            Err(_) => "nan".into(),
        }));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::Io(path.clone(), e))?;

    let runs = dir.join(format!("{}_runs.csv", run.file_stem()));
    let mut w = with_header(&runs, run)?;
    w.write_record([
        "omega",
        "lambda",
        "ground_energy",
        "max_norm_drift",
        "energy_drift",
        "peak_1",
        "peak_2",
        "peak_3",
        "status",
    ])?;
    for (p, c) in map.cavity.iter().zip(&map.columns) {
        let mut rec = vec![num(p.omega), num(p.lambda)];
        match c {
            Ok(s) => {
                rec.extend([num(s.ground_energy), num(s.max_norm_drift), num(s.energy_drift)]);
                for k in 0..3 {
                    rec.push(s.peaks.get(k).map(|x| num(x.omega)).unwrap_or_default());
                }
                rec.push("ok".into());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 6));
                rec.push(format!("failed: {e}"));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::Io(runs.clone(), e))?;
    Ok(vec![path, runs])
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    let mut f = create(path)?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// A gnuplot script for a ground-state table: a heat map when both λ and ω
/// vary, a line plot otherwise.
pub fn write_ground_plot(dir: &Path, run: &RunConfig, rows: &[ResultRow]) -> Result<PathBuf, CliError> {
    let stem = run.file_stem();
    let path = dir.join(format!("{stem}.plot"));
    let distinct = |f: fn(&ResultRow) -> f64| {
        let mut v: Vec<u64> = rows.iter().map(|r| f(r).to_bits()).collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    let n_lambda = distinct(|r| r.point.lambda);
    let n_omega = distinct(|r| r.point.omega);
    let n_soft = distinct(|r| r.point.softening);
    let value = if run.reference.is_some() { "energy_deviation" } else { "energy" };
    let mut s = format!(
        "# gnuplot script for {stem}.csv\nset datafile separator ','\nset datafile commentschars '#'\n\
         set datafile columnheaders\nset terminal pngcairo size 900,700\nset output '{stem}.png'\nset title '{stem}'\n"
    );
    let (x, y) = if n_lambda > 1 && n_omega > 1 {
        ("lambda", Some("omega"))
    } else if n_lambda > 1 && n_soft > 1 {
        ("lambda", Some("softening"))
    } else if n_lambda > 1 {
        ("lambda", None)
    } else if n_omega > 1 {
        ("omega", None)
    } else {
        ("softening", None)
    };
    match y {
        Some(y) => s.push_str(&format!(
            "set view map\nset xlabel '{x}'\nset ylabel '{y}'\nset cblabel '{value}'\n\
             splot '{stem}.csv' using (column('{x}')):(column('{y}')):(column('{value}')) \
             with points pointtype 5 pointsize 2 palette notitle\n"
        )),
        None => s.push_str(&format!(
            "set xlabel '{x}'\nset ylabel '{value}'\n\
             plot '{stem}.csv' using (column('{x}')):(column('{value}')) with linespoints title '{}'\n",
            run.label
        )),
    }
    write_text(&path, &s)?;
    Ok(path)
}

/// A gnuplot heat map of the spectrum matrix.
pub fn write_spectrum_plot(dir: &Path, run: &RunConfig) -> Result<PathBuf, CliError> {
    let stem = run.file_stem();
    let path = dir.join(format!("{stem}.plot"));
    let s = format!(
        "# gnuplot script for {stem}.csv\nset datafile separator ','\nset datafile commentschars '#'\n\
         set terminal pngcairo size 900,700\nset output '{stem}.png'\nset title '{stem}'\n\
         set view map\nset xlabel 'cavity frequency'\nset ylabel 'response frequency'\n\
         set cblabel '|d(omega)|'\nset logscale cb\n\
         splot '{stem}.csv' matrix nonuniform with image notitle\n"
    );
    write_text(&path, &s)?;
    Ok(path)
}
