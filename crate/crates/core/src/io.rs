//! CSV output. Every file is written to a temporary sibling and renamed into
//! place, so readers never see a partial file.

use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::collapse::Jump;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::experiments::{DynamicsKind, SweepRow, WElbow};
use crate::observables::DensityHistogram;

/// Decimal notation with 17 significant digits (never an exponent).
pub fn fmt_sig17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sign = if x < 0.0 { "-" } else { "" };
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else if exp as usize + 1 >= digits.len() {
        format!("{}{}", digits, "0".repeat(exp as usize + 1 - digits.len()))
    } else {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

/// Writes through a temp file in the destination directory, then renames.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir)?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut buf)?;
        buf.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    write_atomic(path, |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    })
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    write_csv(
        path,
        &["t", "norm", "energy", "mean_jz", "dispersion"],
        traj.samples.iter().map(|s| [s.t, s.norm, s.energy, s.mean_jz, s.dispersion].map(fmt_sig17).to_vec()),
    )
}

pub fn write_histogram_csv(path: &Path, hist: &DensityHistogram) -> Result<()> {
    write_csv(
        path,
        &["m", "mass"],
        hist.m_values.iter().zip(&hist.mass).map(|(&m, &p)| vec![fmt_sig17(m), fmt_sig17(p)]),
    )
}

pub fn write_jumps_csv(path: &Path, jumps: &[Jump]) -> Result<()> {
    write_csv(path, &["t", "center"], jumps.iter().map(|j| vec![fmt_sig17(j.t), fmt_sig17(j.center)]))
}

pub const SWEEP_HEADER: [&str; 8] = ["dynamics", "w", "alpha", "height", "rep", "peak_dispersion", "t_peak", "status"];

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_csv(
        path,
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            vec![
                r.dynamics.as_str().to_string(),
                fmt_sig17(r.w),
                fmt_sig17(r.alpha),
                fmt_sig17(r.height),
                r.rep.to_string(),
                fmt_sig17(r.peak_dispersion),
                fmt_sig17(r.t_peak),
                r.status.clone(),
            ]
        }),
    )
}

pub fn write_elbow_csv(path: &Path, elbows: &[WElbow]) -> Result<()> {
    write_csv(
        path,
        &["w", "breakpoint", "slope_low", "slope_high", "sse", "degenerate"],
        elbows.iter().map(|e| {
            let f = &e.fit;
            vec![
                fmt_sig17(e.w),
                fmt_sig17(f.breakpoint),
                fmt_sig17(f.slope_low),
                fmt_sig17(f.slope_high),
                fmt_sig17(f.sse),
                f.degenerate.to_string(),
            ]
        }),
    )
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != SWEEP_HEADER {
        return Err(Error::Parse(format!("{}: unexpected header {:?}", path.display(), header)));
    }
    let bad = |line: u64, what: &str, v: &str| Error::Parse(format!("{}:{line}: bad {what} `{v}`", path.display()));
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let f = |i: usize, what: &str| rec[i].parse::<f64>().map_err(|_| bad(line, what, &rec[i]));
        rows.push(SweepRow {
            dynamics: rec[0].parse::<DynamicsKind>().map_err(|_| bad(line, "dynamics", &rec[0]))?,
            w: f(1, "w")?,
            alpha: f(2, "alpha")?,
            height: f(3, "height")?,
            rep: rec[4].parse().map_err(|_| bad(line, "rep", &rec[4]))?,
            peak_dispersion: f(5, "peak_dispersion")?,
            t_peak: f(6, "t_peak")?,
            status: rec[7].to_string(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sig17_examples() {
        assert_eq!(fmt_sig17(1.0), "1.0000000000000000");
        assert_eq!(fmt_sig17(-0.5), "-0.50000000000000000");
        assert_eq!(fmt_sig17(123.25), "123.25000000000000");
        assert_eq!(fmt_sig17(1e-3), "0.0010000000000000000");
        assert_eq!(fmt_sig17(1e20), "100000000000000000000");
        assert_eq!(fmt_sig17(0.0), "0");
        assert_eq!(fmt_sig17(f64::NAN), "NaN");
    }

    proptest! {
        #[test]
        fn sig17_round_trips(x in proptest::num::f64::NORMAL) {
            let s = fmt_sig17(x);
            prop_assert!(!s.contains('e'));
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sweep_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        let rows = vec![
            SweepRow {
                dynamics: DynamicsKind::Sc,
                w: 2.2,
                alpha: 0.05,
                height: 3.5,
                rep: 4,
                peak_dispersion: 1.0 / 3.0,
                t_peak: 2.7,
                status: "ok".into(),
            },
            SweepRow {
                dynamics: DynamicsKind::Hamiltonian,
                w: 0.0,
                alpha: 0.5,
                height: 0.0,
                rep: 0,
                peak_dispersion: f64::NAN,
                t_peak: f64::NAN,
                status: "integration failed, at t = 1".into(),
            },
        ];
        write_sweep_csv(&path, &rows).unwrap();
        let back = read_sweep_csv(&path).unwrap();
        assert_eq!(back[0], rows[0]);
        assert_eq!(back[1].status, rows[1].status);
        assert!(back[1].peak_dispersion.is_nan());
        let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }

    #[test]
    fn trajectory_csv_layout() {
        use crate::dynamics::Sample;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("traj.csv");
        let s = Sample { t: 0.5, norm: 1.0, energy: -2.0, mean_jz: 0.0, dispersion: 4.0, density: vec![] };
        write_trajectory_csv(&path, &Trajectory { samples: vec![s] }).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,norm,energy,mean_jz,dispersion"));
        assert_eq!(lines.next(), Some("0.50000000000000000,1.0000000000000000,-2.0000000000000000,0,4.0000000000000000"));
    }

    #[test]
    fn bad_sweep_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(matches!(read_sweep_csv(&path), Err(Error::Parse(_))));
    }
}
