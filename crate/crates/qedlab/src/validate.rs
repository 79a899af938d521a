//! Dry run: what a configuration would compute, without computing it.

use std::fmt::Write;

use qedlab_core::exact_qed::SolveOptions;
use qedlab_core::linalg::DENSE_LIMIT;

use crate::config::{BoundarySpec, Kind, Method, RunConfig};
use crate::points::expand;

/// Problems found in one run; an empty list means it can be started.
pub fn problems(run: &RunConfig) -> Vec<String> {
    let mut out = Vec::new();
    let periodic = run.grid.boundary == BoundarySpec::Periodic;
    let m = run.method;
    if m == Method::Pheg && !periodic {
        out.push("pheg needs a periodic grid".into());
    }
    let dirichlet_only = matches!(
        m,
        Method::ExactPzw | Method::PzwSelfpol | Method::QedftPx | Method::QedftPxlda | Method::PxldaMaxwell
    );
    if periodic && (dirichlet_only || run.kind == Kind::Spectrum) {
        out.push(format!("{m} {} needs a Dirichlet grid", kind_name(run.kind)));
    }
    if run.kind == Kind::Spectrum
        && !matches!(
            m,
            Method::ExactPzw | Method::ExactPf | Method::PhotonFree | Method::Maxwell | Method::PxldaMaxwell
        )
    {
        out.push(format!("{m} has no time propagation"));
    }
    if let Some(r) = &run.reference {
        if r.method == Method::Pheg && !periodic {
            out.push("the pheg reference needs a periodic grid".into());
        }
    }
    if let Err(e) = run.grid.fd_order() {
        out.push(e.to_string());
    }
    out
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Ground => "ground state",
        Kind::Spectrum => "propagation",
    }
}

/// Dimension of the coupled space and a rough memory bound in bytes.
pub fn footprint(run: &RunConfig, method: Method, max_n: usize) -> (usize, f64) {
    let matter = run.grid.points;
    let dim = if method.has_fock_space() {
        (max_n + 1)
            .checked_pow(run.modes.count as u32)
            .and_then(|p| p.checked_mul(matter))
            .unwrap_or(usize::MAX)
    } else {
        matter
    };
    let d = dim as f64;
    let bytes = if dim <= DENSE_LIMIT {
        2.0 * d * d * 8.0
    } else {
        (SolveOptions::default().lanczos.max_basis as f64 + 8.0) * d * 8.0
    };
    (dim, bytes)
}

fn human(bytes: f64) -> String {
    let units = ["B", "KiB", "MiB", "GiB", "TiB"];
    let mut v = bytes;
    let mut i = 0;
    while v >= 1024.0 && i + 1 < units.len() {
        v /= 1024.0;
        i += 1;
    }
    format!("{v:.1} {}", units[i])
}

/// A human-readable report; the second value counts runs with problems.
pub fn report(runs: &[RunConfig]) -> (String, usize) {
    let mut s = String::new();
    let mut bad = 0;
    for run in runs {
        let _ = writeln!(s, "run {} ({}, {})", run.file_stem(), run.method, kind_name(run.kind));
        let _ = writeln!(
            s,
            "  grid: {} points, spacing {}, {:?}, order {}",
            run.grid.points, run.grid.spacing, run.grid.boundary, run.grid.order
        );
        let (dim, bytes) = footprint(run, run.method, run.solver.max_n);
        let _ = writeln!(s, "  dimension {dim}, about {}", human(bytes));
        if let Some(r) = &run.reference {
            let (dim, bytes) = footprint(run, r.method, r.max_n.unwrap_or(run.solver.max_n));
            let _ = writeln!(s, "  reference {}: dimension {dim}, about {}", r.method, human(bytes));
        }
        let p = problems(run);
        if !p.is_empty() {
            bad += 1;
        }
        for msg in &p {
            let _ = writeln!(s, "  problem: {msg}");
        }
        match expand(run) {
            Ok(points) => {
                let _ = writeln!(s, "  {} points", points.len());
                for q in points {
                    let _ = writeln!(
                        s,
                        "    omega {:.10} lambda {:.10} softening {} kappa {}",
                        q.omega, q.lambda, q.softening, q.kappa
                    );
                }
            }
            Err(e) => {
                bad += 1;
                let _ = writeln!(s, "  problem: {e}");
            }
        }
    }
    (s, bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigFile;

    #[test]
    fn fig2_dimension() {
        let runs = ConfigFile::load(None, Some("fig2")).unwrap().resolve().unwrap();
        let exact = runs.iter().find(|r| r.method == Method::ExactPzw).unwrap();
        assert_eq!(footprint(exact, exact.method, exact.solver.max_n).0, 301 * 41);
    }

    #[test]
    fn pheg_on_a_box_is_a_problem() {
        let text = r#"
            method = "pheg"
            [grid]
            points = 11
            spacing = 0.5
        "#;
        let run = &ConfigFile::parse(text).unwrap().resolve().unwrap()[0];
        assert_eq!(problems(run).len(), 1);
    }
}
