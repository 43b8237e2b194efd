//! CSV trajectories and verification reports.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use fraccos_core::families::Report;
use fraccos_core::solver::SolveResult;
use fraccos_core::spectral::SineBasis;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("nodal output: {0}")]
    Transform(String),
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `t,res_fp,res_volterra,c_1..c_N[,u_1..u_M]`, one row per node.
pub fn render_csv(
    result: &SolveResult,
    nodal_points: Option<usize>,
) -> Result<String, OutputError> {
    let n_modes = result.trajectory.first().map_or(0, |u| u.len());
    let mut out = String::from("t,res_fp,res_volterra");
    for k in 1..=n_modes {
        write!(out, ",c_{k}").unwrap();
    }
    let basis = match nodal_points {
        Some(m) => {
            for j in 1..=m {
                write!(out, ",u_{j}").unwrap();
            }
            if n_modes == 0 {
                None
            } else {
                Some(
                    SineBasis::new(n_modes, m)
                        .map_err(|e| OutputError::Transform(e.to_string()))?,
                )
            }
        }
        None => None,
    };
    out.push('\n');
    for (i, u) in result.trajectory.iter().enumerate() {
        let mut row = vec![
            num(result.grid.node(i)),
            num(result.fixed_point_by_node[i]),
            num(result.volterra_by_node[i]),
        ];
        row.extend(u.coeffs.iter().map(|&c| num(c)));
        if let Some(b) = &basis {
            let nodal = b
                .inverse(u)
                .map_err(|e| OutputError::Transform(e.to_string()))?;
            row.extend(nodal.samples.iter().map(|&v| num(v)));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(
    result: &SolveResult,
    nodal_points: Option<usize>,
    path: &Path,
) -> Result<(), OutputError> {
    let text = render_csv(result, nodal_points)?;
    fs::write(path, text).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Aligned table: environment echo, then one line per check.
pub fn render_table(report: &Report) -> String {
    let mut out = String::new();
    for (k, v) in &report.env {
        writeln!(out, "# {k} = {v}").unwrap();
    }
    let width = report
        .rows
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(5)
        .max(5);
    writeln!(
        out,
        "{:<width$}  {:>12}  {:>12}  result",
        "check", "residual", "tolerance"
    )
    .unwrap();
    for r in &report.rows {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{:<width$}  {:>12.4e}  {:>12.4e}  {verdict}",
            r.name, r.residual, r.tolerance
        )
        .unwrap();
    }
    let overall = if report.passed() { "PASS" } else { "FAIL" };
    writeln!(out, "overall: {overall}").unwrap();
    out
}

/// `check,residual,tolerance,pass`, preceded by `# key=value` lines.
pub fn render_report_csv(report: &Report) -> String {
    let mut out = String::new();
    for (k, v) in &report.env {
        writeln!(out, "# {k}={v}").unwrap();
    }
    out.push_str("check,residual,tolerance,pass\n");
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.name,
            num(r.residual),
            num(r.tolerance),
            r.pass
        )
        .unwrap();
    }
    out
}

pub fn write_report(report: &Report, path: &Path) -> Result<(), OutputError> {
    fs::write(path, render_report_csv(report)).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fraccos_core::fracalc::TimeGrid;
    use fraccos_core::spectral::SpectralField;

    fn result(nodes: usize, modes: usize) -> SolveResult {
        let grid = TimeGrid::new(1.0, nodes.max(2) - 1).unwrap();
        SolveResult {
            grid,
            trajectory: (0..nodes)
                .map(|i| SpectralField::from_vec(vec![i as f64; modes]))
                .collect(),
            iterations: 1,
            fixed_point_residual: 0.0,
            volterra_residual: 0.0,
            fixed_point_by_node: vec![0.0; nodes],
            volterra_by_node: vec![0.5; nodes],
            max_beta_excursion: 0.0,
            converged: true,
        }
    }

    #[test]
    fn layout() {
        let text = render_csv(&result(3, 2), None).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "t,res_fp,res_volterra,c_1,c_2");
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 5));
        assert_eq!(lines[3], "1.0000000000000000e0,0.0000000000000000e0,5.0000000000000000e-1,2.0000000000000000e0,2.0000000000000000e0");
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }

    #[test]
    fn empty_and_nodal() {
        let mut empty = result(2, 2);
        empty.trajectory.clear();
        assert_eq!(render_csv(&empty, None).unwrap(), "t,res_fp,res_volterra\n");
        let text = render_csv(&result(3, 2), Some(4)).unwrap();
        assert!(text.starts_with("t,res_fp,res_volterra,c_1,c_2,u_1,u_2,u_3,u_4\n"));
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 9));
    }

    #[test]
    fn values_round_trip() {
        let v = std::f64::consts::PI / 7.0;
        assert_eq!(num(v).parse::<f64>().unwrap(), v);
    }
}
