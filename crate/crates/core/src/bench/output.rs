//! CSV encodings of reports and trajectories.
//!
//! Reals are written in scientific notation with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::sim::{Channel, Trajectory};

use super::{RmseReport, SweepReport};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed record {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>, OutputError> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|source| OutputError::Csv {
            path: path.to_path_buf(),
            source,
        })
}

fn write_all<I, R>(path: &Path, records: I) -> Result<(), OutputError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let csv_err = |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = writer(path)?;
    for rec in records {
        w.write_record(rec).map_err(csv_err)?;
    }
    w.flush().map_err(|source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Columns `step, rmse_x1..rmse_xn, total`.
pub fn write_rmse_csv(report: &RmseReport, path: &Path) -> Result<(), OutputError> {
    let n = report.state_dim();
    let mut header = vec!["step".to_string()];
    header.extend((1..=n).map(|i| format!("rmse_x{i}")));
    header.push("total".into());
    let rows = report
        .per_component
        .iter()
        .zip(&report.total)
        .enumerate()
        .map(|(k, (comp, total))| {
            let mut r = vec![(k + 1).to_string()];
            r.extend(comp.iter().map(|&x| format_real(x)));
            r.push(format_real(*total));
            r
        });
    write_all(path, std::iter::once(header).chain(rows))
}

/// Columns `delta, algorithm, scalar_rmse, status, breakdown_flag`; one row per
/// (δ, algorithm) in grid order. The flag is 1 for broken cells.
pub fn write_sweep_csv(report: &SweepReport, path: &Path) -> Result<(), OutputError> {
    let header = [
        "delta",
        "algorithm",
        "scalar_rmse",
        "status",
        "breakdown_flag",
    ]
    .map(String::from);
    let rows = report.cells.iter().map(|c| {
        [
            format_real(c.delta),
            c.algorithm.to_string(),
            format_real(c.scalar_rmse),
            c.status.to_string(),
            u8::from(c.broken()).to_string(),
        ]
    });
    write_all(path, std::iter::once(header).chain(rows))
}

/// Columns `step, x1..xn, y1..ym, w_shot1..w_shotq, v_shot1..v_shotm`; the
/// shot columns flag injected impulses with 1.
pub fn write_trajectory_csv(
    traj: &Trajectory,
    noise_dim: usize,
    path: &Path,
) -> Result<(), OutputError> {
    let n = traj.truth.first().map_or(0, Vec::len);
    let m = traj.measurements.first().map_or(0, |y| y.value.len());
    let mut header = vec!["step".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=m).map(|i| format!("y{i}")));
    header.extend((1..=noise_dim).map(|i| format!("w_shot{i}")));
    header.extend((1..=m).map(|i| format!("v_shot{i}")));

    let mut flags = vec![vec![0u8; noise_dim + m]; traj.horizon + 1];
    for o in &traj.outliers {
        let col = match o.channel {
            Channel::Process(i) => i,
            Channel::Measurement(i) => noise_dim + i,
        };
        flags[o.step][col] = 1;
    }
    let rows = traj.truth.iter().zip(&traj.measurements).map(|(x, y)| {
        let mut r = vec![y.step.to_string()];
        r.extend(x.iter().map(|&v| format_real(v)));
        r.extend(y.value.iter().map(|&v| format_real(v)));
        r.extend(flags[y.step].iter().map(u8::to_string));
        r
    });
    write_all(path, std::iter::once(header).chain(rows))
}

/// Writes free-form `key: value` lines.
pub fn write_meta(path: &Path, entries: &[(&str, String)]) -> Result<(), OutputError> {
    let io_err = |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = File::create(path).map_err(io_err)?;
    for (k, v) in entries {
        writeln!(f, "{k}: {v}").map_err(io_err)?;
    }
    Ok(())
}

fn records(path: &Path) -> Result<Vec<csv::StringRecord>, OutputError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|source| OutputError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    rdr.records()
        .collect::<Result<_, _>>()
        .map_err(|source| OutputError::Csv {
            path: path.to_path_buf(),
            source,
        })
}

fn parse_real(path: &Path, line: usize, s: &str) -> Result<f64, OutputError> {
    s.parse().map_err(|_| OutputError::Parse {
        path: path.to_path_buf(),
        line,
        msg: format!("not a number: `{s}`"),
    })
}

/// Reads back `(per_component, total)` from [`write_rmse_csv`] output.
pub fn read_rmse_csv(path: &Path) -> Result<(Vec<Vec<f64>>, Vec<f64>), OutputError> {
    let mut comps = Vec::new();
    let mut totals = Vec::new();
    for (line, rec) in records(path)?.iter().enumerate() {
        let vals = rec
            .iter()
            .skip(1)
            .map(|s| parse_real(path, line + 2, s))
            .collect::<Result<Vec<_>, _>>()?;
        let (total, comp) = vals.split_last().ok_or_else(|| OutputError::Parse {
            path: path.to_path_buf(),
            line: line + 2,
            msg: "empty row".into(),
        })?;
        comps.push(comp.to_vec());
        totals.push(*total);
    }
    Ok((comps, totals))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub algorithm: String,
    pub scalar_rmse: f64,
    pub status: String,
    pub breakdown_flag: bool,
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>, OutputError> {
    records(path)?
        .iter()
        .enumerate()
        .map(|(line, rec)| {
            let field = |i: usize| rec.get(i).unwrap_or_default();
            Ok(SweepRow {
                delta: parse_real(path, line + 2, field(0))?,
                algorithm: field(1).to_string(),
                scalar_rmse: parse_real(path, line + 2, field(2))?,
                status: field(3).to_string(),
                breakdown_flag: field(4) == "1",
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::sweep::{CellStatus, SweepCell};
    use crate::filters::Algorithm;

    #[test]
    fn real_format_has_17_digits() {
        assert_eq!(format_real(0.1), "1.0000000000000001e-1");
        assert_eq!(format_real(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(format_real(f64::NAN), "NaN");
    }

    #[test]
    fn rmse_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rmse.csv");
        let rep = RmseReport {
            algorithm: Algorithm::Sr1b,
            per_component: vec![vec![0.1, 1.0 / 3.0], vec![2e-300, 7.5e12]],
            total: vec![0.35, 7.5e12],
            scalar_summary: 0.0,
            completed_runs: 1,
            failed_runs: vec![],
        };
        write_rmse_csv(&rep, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("step,rmse_x1,rmse_x2,total\n1,"));
        let (comps, total) = read_rmse_csv(&path).unwrap();
        assert_eq!(comps, rep.per_component);
        assert_eq!(total, rep.total);
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        let rep = SweepReport {
            delta_grid: vec![],
            algorithms: vec![],
            cells: vec![],
            breakdown: vec![],
        };
        write_sweep_csv(&rep, &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "delta,algorithm,scalar_rmse,status,breakdown_flag\n"
        );
        assert!(read_sweep_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn sweep_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        let rep = SweepReport {
            delta_grid: vec![0.1],
            algorithms: vec![Algorithm::Conventional, Algorithm::Sr1b],
            cells: vec![
                SweepCell {
                    delta: 0.1,
                    algorithm: Algorithm::Conventional,
                    scalar_rmse: 12.25,
                    status: CellStatus::Diverged { runs: 2 },
                },
                SweepCell {
                    delta: 0.1,
                    algorithm: Algorithm::Sr1b,
                    scalar_rmse: 1.0 / 7.0,
                    status: CellStatus::Healthy,
                },
            ],
            breakdown: vec![],
        };
        write_sweep_csv(&rep, &path).unwrap();
        let rows = read_sweep_csv(&path).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].status, "diverged:2");
        assert!(rows[0].breakdown_flag);
        assert_eq!(rows[1].scalar_rmse, 1.0 / 7.0);
        assert_eq!(rows[1].algorithm, "sr1b");
    }

    #[test]
    fn unwritable_path_reports_location() {
        let rep = SweepReport {
            delta_grid: vec![],
            algorithms: vec![],
            cells: vec![],
            breakdown: vec![],
        };
        let err = write_sweep_csv(&rep, Path::new("/nonexistent-dir/x/sweep.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x/sweep.csv"));
    }
}
