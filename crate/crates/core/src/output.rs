//! JSON and CSV rendering and the process exit codes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::suite::{AmnRow, BetaRow, SuiteResult, VolkenbornOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOURCE_CAP: i32 = 3;

/// The exit code for an error that stopped a run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceCap(_) => EXIT_RESOURCE_CAP,
        _ => EXIT_CONFIG,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Parse(format!(
                "unknown format {s:?}; expected json or csv"
            ))),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_string<F>(header: &[&str], write_rows: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let err = |e: csv::Error| Error::Parse(e.to_string());
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header).map_err(err)?;
    write_rows(&mut w).map_err(err)?;
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn suite_csv(r: &SuiteResult) -> Result<String> {
    csv_string(
        &["identity", "m", "n", "p", "q", "agreement", "verdict"],
        |w| {
            for x in &r.reports {
                w.write_record([
                    x.identity.as_str(),
                    &opt(x.params.m),
                    &opt(x.params.n),
                    &opt(x.params.p),
                    &x.params.q,
                    &x.agreement.render(),
                    x.verdict.as_str(),
                ])?;
            }
            Ok(())
        },
    )
}

pub fn beta_csv(rows: &[BetaRow]) -> Result<String> {
    csv_string(&["n", "kind", "value", "padic", "real"], |w| {
        for r in rows {
            w.write_record([
                r.n.to_string(),
                r.kind.name().to_string(),
                r.value.clone(),
                opt(r.padic.as_ref()),
                r.real.clone().unwrap_or_default(),
            ])?;
        }
        Ok(())
    })
}

pub fn volkenborn_csv(out: &VolkenbornOutput) -> Result<String> {
    csv_string(&["f", "p", "q", "N", "value", "delta_valuation"], |w| {
        for r in &out.rows {
            w.write_record([
                r.f.clone(),
                r.p.to_string(),
                r.q.clone(),
                r.level.to_string(),
                r.value.to_string(),
                r.delta_valuation.clone().unwrap_or_default(),
            ])?;
        }
        Ok(())
    })
}

pub fn amn_csv(rows: &[AmnRow]) -> Result<String> {
    csv_string(
        &[
            "m",
            "n",
            "direct",
            "direct_weighted",
            "closed",
            "agreement",
            "threshold",
            "agrees",
            "valuation_ok",
        ],
        |w| {
            for r in rows {
                w.write_record([
                    r.m.to_string(),
                    r.n.to_string(),
                    r.direct.to_string(),
                    r.direct_weighted.to_string(),
                    r.closed.clone(),
                    r.agreement.clone(),
                    r.threshold.clone(),
                    r.agrees.to_string(),
                    r.valuation_ok.to_string(),
                ])?;
            }
            Ok(())
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite::{run_suites, RunConfig, Suite};

    #[test]
    fn csv_has_one_line_per_report() {
        let c = RunConfig {
            suites: vec![Suite::Valuation],
            max_m: 1,
            max_n: 2,
            ..RunConfig::default()
        };
        let r = run_suites(&c).unwrap();
        let s = suite_csv(&r).unwrap();
        assert_eq!(s.lines().count(), r.reports.len() + 1);
        assert!(s.starts_with("identity,m,n,p,q,agreement,verdict\n"));
        let j: serde_json::Value = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
        assert_eq!(j["summary"]["pass"], r.summary.pass);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&Error::ResourceCap("x".into())),
            EXIT_RESOURCE_CAP
        );
        assert_eq!(exit_code(&Error::DivisionByZero), EXIT_CONFIG);
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!("xml".parse::<Format>().is_err());
    }
}
