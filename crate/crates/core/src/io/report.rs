//! CSV and JSON output for sweeps, verification outcomes and error bands.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::montecarlo::MonteCarloBands;
use crate::correlations::CorrelationRecord;
use crate::dynamics::TrajectoryReport;
use crate::error::{Error, Result};
use crate::verify::VerificationOutcome;

pub const CSV_HEADER: &str = "p,j_z,j_x,j_max,opt_theta,opt_phi,mutual_info,discord";
pub const BANDS_CSV_HEADER: &str =
    "p,j_z_mean,j_z_std,j_x_mean,j_x_std,j_max_mean,j_max_std,discord_mean,discord_std";
const VERIFY_CSV_HEADER: &str = "suite,trials,failures,worst_violation,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Config(format!("unknown format `{s}` (csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// `x` rounded to `digits` significant digits, like C's `%.{digits}g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // the exponent after rounding decides between fixed and scientific form
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g12(x: f64) -> String {
    format_sig(x, 12)
}

fn csv_row(r: &CorrelationRecord) -> String {
    [
        r.p,
        r.j_z,
        r.j_x,
        r.j_max,
        r.opt_theta,
        r.opt_phi,
        r.mutual_info,
        r.discord,
    ]
    .map(g12)
    .join(",")
}

pub fn report_csv(report: &TrajectoryReport) -> Result<String> {
    if report.records.is_empty() {
        return Err(Error::Grid("report has no records".into()));
    }
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &report.records {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    Ok(out)
}

pub fn bands_csv(bands: &MonteCarloBands) -> Result<String> {
    if bands.rows.is_empty() {
        return Err(Error::Grid("band table has no rows".into()));
    }
    let mut out = String::from(BANDS_CSV_HEADER);
    out.push('\n');
    for r in &bands.rows {
        let cells = [
            r.p,
            r.j_z.mean,
            r.j_z.std,
            r.j_x.mean,
            r.j_x.std,
            r.j_max.mean,
            r.j_max.std,
            r.discord.mean,
            r.discord.std,
        ];
        out.push_str(&cells.map(g12).join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn verification_csv(outcome: &VerificationOutcome) -> String {
    format!(
        "{VERIFY_CSV_HEADER}\n{},{},{},{},{}\n",
        outcome.suite,
        outcome.trials,
        outcome.failures,
        g12(outcome.worst_violation),
        outcome.seed
    )
}

/// Anything the CLI can write out.
#[derive(Debug, Clone, Copy)]
pub enum Emit<'a> {
    Trajectory(&'a TrajectoryReport),
    Verification(&'a VerificationOutcome),
    Bands(&'a MonteCarloBands),
}

impl Emit<'_> {
    pub fn render(&self, format: Format) -> Result<String> {
        match (self, format) {
            (Emit::Trajectory(r), Format::Csv) => report_csv(r),
            (Emit::Verification(v), Format::Csv) => Ok(verification_csv(v)),
            (Emit::Bands(b), Format::Csv) => bands_csv(b),
            (Emit::Trajectory(r), Format::Json) => {
                if r.records.is_empty() {
                    return Err(Error::Grid("report has no records".into()));
                }
                to_json(r)
            }
            (Emit::Verification(v), Format::Json) => to_json(v),
            (Emit::Bands(b), Format::Json) => to_json(b),
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Renders first, so a failure never leaves a partial or empty file behind.
pub fn emit_report(item: Emit<'_>, format: Format, path: &Path) -> Result<()> {
    let text = item.render(format)?;
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{sweep, uniform_grid, ChannelFamily, SweepConfig};
    use crate::qstate::{make_x_state, XStateParams};
    use crate::verify::verify_theorem1;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(-0.0, 12), "0");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(0.4, 12), "0.4");
        assert_eq!(format_sig(0.278071905112638, 12), "0.278071905113");
        assert_eq!(format_sig(-1.5e-7, 12), "-1.5e-07");
        assert_eq!(format_sig(123456.0, 3), "1.23e+05");
        assert_eq!(format_sig(0.0001, 12), "0.0001");
        assert_eq!(format_sig(9.9999999999999e-5, 12), "0.0001");
        assert_eq!(format_sig(std::f64::consts::PI, 12), "3.14159265359");
    }

    fn state1_report(points: usize) -> TrajectoryReport {
        let rho = make_x_state(XStateParams::STATE_1).unwrap();
        sweep(
            &rho,
            ChannelFamily::PhaseDamping,
            &uniform_grid(points).unwrap(),
            &SweepConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn csv_has_exact_columns_and_constant_jz() {
        let csv = report_csv(&state1_report(11)).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let rows: Vec<Vec<f64>> = lines
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 11);
        for row in rows {
            assert_eq!(row.len(), 8);
            assert!((row[1] - 0.278072).abs() < 1e-6);
        }
    }

    #[test]
    fn json_carries_metadata() {
        let json = Emit::Trajectory(&state1_report(11))
            .render(Format::Json)
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["regime"], "decay-then-constant");
        assert!((v["transition_p"].as_f64().unwrap() - 0.4).abs() < 1e-6);
        assert_eq!(v["records"].as_array().unwrap().len(), 11);
        assert!(v["records"][0]["opt_theta"].is_number());
    }

    #[test]
    fn verification_json_reports_failures() {
        let outcome = verify_theorem1(10, 3).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&Emit::Verification(&outcome).render(Format::Json).unwrap())
                .unwrap();
        assert_eq!(v["failures"], 0);
        assert_eq!(v["suite"], "theorem1");
    }

    #[test]
    fn empty_report_is_an_error_and_writes_nothing() {
        let mut report = state1_report(3);
        report.records.clear();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        for format in [Format::Csv, Format::Json] {
            assert!(emit_report(Emit::Trajectory(&report), format, &path).is_err());
            assert!(!path.exists());
        }
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("out.csv");
        let e = emit_report(Emit::Trajectory(&state1_report(3)), Format::Csv, &path).unwrap_err();
        assert!(matches!(e, Error::Io { .. }));
    }
}
