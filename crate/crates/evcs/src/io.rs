//! CSV and JSON readers and writers, plus the flat key=value config format.
//!
//! All floating-point output is printed with 9 significant digits, so files
//! written from the same inputs are byte-identical across runs and
//! platforms. Nothing here emits timestamps.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::baselines::ContinuousProfileSet;
use crate::brd::BrdResult;
use crate::error::{Error, Result};
use crate::experiments::ExperimentReport;
use crate::model::{EvSpec, FleetSpec, LoadProfile, ProfileKind, ScheduleVector, TimeGrid};
use crate::thermal::ThermalTrace;

/// Formats a float with 9 significant digits, trimming trailing zeros.
/// Zero prints as `0`; non-finite values print as `NaN`, `inf`, `-inf`.
pub fn fmt_g9(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("scientific form parses");
    format!("{rounded}")
}

/// Rounds a finite float to 9 significant digits.
pub fn round_g9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("scientific form parses")
}

/// Rounds every float in a JSON tree to 9 significant digits, in place.
/// Integers are left untouched.
pub fn round_json_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if !n.is_u64() && !n.is_i64() {
                if let Some(x) = n.as_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_g9(x)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json_floats),
        Value::Object(map) => map.values_mut().for_each(round_json_floats),
        _ => {}
    }
}

/// Serializes a value to pretty JSON with floats rounded to 9 significant
/// digits and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut tree = serde_json::to_value(value)
        .map_err(|e| Error::Invalid(format!("serialization failed: {e}")))?;
    round_json_floats(&mut tree);
    let body = serde_json::to_string_pretty(&tree)
        .map_err(|e| Error::Invalid(format!("serialization failed: {e}")))?;
    Ok(format!("{body}\n"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json_string(value)?)?;
    Ok(())
}

fn data_error(line: usize, message: impl Into<String>) -> Error {
    Error::Data {
        line: Some(line as u64),
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(raw: &str, line: usize, what: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| data_error(line, format!("{what}: cannot parse {raw:?}")))
}

/// Splits one CSV line on commas. The formats here never quote fields, so a
/// plain split is exact.
fn split_row(row: &str) -> Vec<&str> {
    row.split(',').map(str::trim).collect()
}

fn read_rows(path: &Path, header: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim() == header => {}
        Some((_, first)) => {
            return Err(data_error(
                1,
                format!("expected header {header:?}, got {:?}", first.trim()),
            ))
        }
        None => return Err(data_error(1, "empty file")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_row(line);
        rows.push((idx + 1, fields.into_iter().map(str::to_string).collect()));
    }
    Ok(rows)
}

/// Reads a `slot,value` profile. Slots must run contiguously from 1; the
/// grid is rebuilt from the row count and the supplied slot length.
pub fn read_load_profile(path: &Path, kind: ProfileKind, dt_hours: f64) -> Result<LoadProfile> {
    let rows = read_rows(path, "slot,value")?;
    if rows.is_empty() {
        return Err(data_error(1, "profile has no rows"));
    }
    let mut values = Vec::with_capacity(rows.len());
    for (expected, (line, fields)) in rows.iter().enumerate() {
        if fields.len() != 2 {
            return Err(data_error(*line, "expected exactly `slot,value`"));
        }
        let slot: usize = parse_field(&fields[0], *line, "slot")?;
        if slot != expected + 1 {
            return Err(data_error(
                *line,
                format!("slots must be contiguous from 1: expected {}, got {slot}", expected + 1),
            ));
        }
        values.push(parse_field::<f64>(&fields[1], *line, "value")?);
    }
    let grid = TimeGrid::new(values.len(), dt_hours)?;
    LoadProfile::new(grid, kind, values)
}

pub fn write_load_profile(path: &Path, profile: &LoadProfile) -> Result<()> {
    let mut out = String::from("slot,value\n");
    for (i, v) in profile.values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, fmt_g9(*v)));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads an `id,arrival,departure,duration` fleet file. The common charging
/// power is not part of the file and comes from the caller.
pub fn read_fleet(path: &Path, power_kw: f64) -> Result<FleetSpec> {
    let rows = read_rows(path, "id,arrival,departure,duration")?;
    let mut evs = Vec::with_capacity(rows.len());
    for (line, fields) in rows {
        if fields.len() != 4 {
            return Err(data_error(line, "expected `id,arrival,departure,duration`"));
        }
        let id: usize = parse_field(&fields[0], line, "id")?;
        let arrival: usize = parse_field(&fields[1], line, "arrival")?;
        let departure: usize = parse_field(&fields[2], line, "departure")?;
        let duration: usize = parse_field(&fields[3], line, "duration")?;
        let ev = EvSpec::new(id, arrival, departure, duration)
            .map_err(|e| data_error(line, e.to_string()))?;
        evs.push(ev);
    }
    FleetSpec::new(evs, power_kw)
}

pub fn write_fleet(path: &Path, fleet: &FleetSpec) -> Result<()> {
    let mut out = String::from("id,arrival,departure,duration\n");
    for ev in &fleet.evs {
        out.push_str(&format!(
            "{},{},{},{}\n",
            ev.id, ev.arrival, ev.departure, ev.duration
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads an `ev,start` schedule and validates it against the fleet.
pub fn read_schedule(path: &Path, fleet: &FleetSpec) -> Result<ScheduleVector> {
    let rows = read_rows(path, "ev,start")?;
    let mut starts = Vec::with_capacity(rows.len());
    for (expected, (line, fields)) in rows.iter().enumerate() {
        if fields.len() != 2 {
            return Err(data_error(*line, "expected `ev,start`"));
        }
        let ev: usize = parse_field(&fields[0], *line, "ev")?;
        if ev != expected + 1 {
            return Err(data_error(
                *line,
                format!("evs must be contiguous from 1: expected {}, got {ev}", expected + 1),
            ));
        }
        starts.push(parse_field::<usize>(&fields[1], *line, "start")?);
    }
    ScheduleVector::new(starts, fleet)
}

pub fn write_schedule(path: &Path, starts: &[usize]) -> Result<()> {
    let mut out = String::from("ev,start\n");
    for (i, s) in starts.iter().enumerate() {
        out.push_str(&format!("{},{s}\n", i + 1));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes a BRD run as `round,ev,start,payoff,potential`; the potential
/// column is empty when no potential applies to the configuration.
pub fn write_brd_updates(path: &Path, result: &BrdResult) -> Result<()> {
    let mut out = String::from("round,ev,start,payoff,potential\n");
    for u in &result.updates {
        let potential = u.potential.map(fmt_g9).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{potential}\n",
            u.round,
            u.ev,
            u.start,
            fmt_g9(u.payoff)
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_thermal_trace(path: &Path, trace: &ThermalTrace) -> Result<()> {
    let mut out = String::from("slot,hotspot_c,top_oil_rise_c,aging\n");
    for i in 0..trace.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            fmt_g9(trace.hotspot_c[i]),
            fmt_g9(trace.top_oil_rise_c[i]),
            fmt_g9(trace.aging[i])
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes per-EV continuous rates as `slot,ev_1,...,ev_I`.
pub fn write_rates(path: &Path, set: &ContinuousProfileSet) -> Result<()> {
    let mut header = String::from("slot");
    for i in 1..=set.rates_kw.len() {
        header.push_str(&format!(",ev_{i}"));
    }
    let mut out = format!("{header}\n");
    for t in 0..set.grid.slots {
        out.push_str(&format!("{}", t + 1));
        for row in &set.rates_kw {
            out.push_str(&format!(",{}", fmt_g9(row[t])));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_report_csv(path: &Path, report: &ExperimentReport) -> Result<()> {
    let mut out = String::from("sweep,label,metric,median,lo68,hi68,replicates\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.sweep,
            row.label,
            row.metric,
            fmt_g9(row.median),
            fmt_g9(row.lo68),
            fmt_g9(row.hi68),
            row.replicates
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a flat `key=value` config file. Blank lines and lines starting
/// with `#` are skipped; later keys override earlier ones.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((key, value)) => {
                let key = key.trim();
                if key.is_empty() {
                    return Err(data_error(idx + 1, "empty key"));
                }
                map.insert(key.to_string(), value.trim().to_string());
            }
            None => {
                return Err(data_error(
                    idx + 1,
                    format!("expected key=value, got {line:?}"),
                ))
            }
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScheduleVector;
    use tempfile::tempdir;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_g9(0.0), "0");
        assert_eq!(fmt_g9(1.0), "1");
        assert_eq!(fmt_g9(0.2), "0.2");
        assert_eq!(fmt_g9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_g9(123456789.123), "123456789");
        assert_eq!(fmt_g9(-2.5e-7), "-0.00000025");
        assert_eq!(fmt_g9(f64::NAN), "NaN");
        assert_eq!(fmt_g9(f64::INFINITY), "inf");
    }

    #[test]
    fn profile_round_trips() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("exo.csv");
        let grid = TimeGrid::new(5, 0.5).unwrap();
        let profile =
            LoadProfile::new(grid, ProfileKind::PowerKw, vec![1.0, 2.5, 3.25, 0.0, 7.125])
                .unwrap();
        write_load_profile(&path, &profile).unwrap();
        let back = read_load_profile(&path, ProfileKind::PowerKw, 0.5).unwrap();
        assert_eq!(back, profile);
    }

    #[test]
    fn duplicate_slot_names_the_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "slot,value\n1,1.0\n2,2.0\n2,3.0\n").unwrap();
        match read_load_profile(&path, ProfileKind::PowerKw, 0.5) {
            Err(Error::Data { line, message }) => {
                assert_eq!(line, Some(4));
                assert!(message.contains("contiguous"), "{message}");
            }
            other => panic!("expected a data error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_value_is_a_data_error() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "slot,value\n1,apple\n").unwrap();
        match read_load_profile(&path, ProfileKind::PowerKw, 0.5) {
            Err(Error::Data { line, .. }) => assert_eq!(line, Some(2)),
            other => panic!("expected a data error, got {other:?}"),
        }
    }

    #[test]
    fn negative_demand_is_rejected_on_read() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "slot,value\n1,-1\n").unwrap();
        assert!(read_load_profile(&path, ProfileKind::PowerKw, 0.5).is_err());
    }

    #[test]
    fn fleet_and_schedule_round_trip() {
        let dir = tempdir().unwrap();
        let fleet_path = dir.path().join("fleet.csv");
        let sched_path = dir.path().join("schedule.csv");
        let fleet = FleetSpec::new(
            vec![
                EvSpec::new(1, 2, 9, 3).unwrap(),
                EvSpec::new(2, 1, 6, 2).unwrap(),
            ],
            3.0,
        )
        .unwrap();
        write_fleet(&fleet_path, &fleet).unwrap();
        let back = read_fleet(&fleet_path, 3.0).unwrap();
        assert_eq!(back, fleet);

        let schedule = ScheduleVector::new(vec![4, 5], &fleet).unwrap();
        write_schedule(&sched_path, &schedule.starts).unwrap();
        let sched_back = read_schedule(&sched_path, &fleet).unwrap();
        assert_eq!(sched_back, schedule);
    }

    #[test]
    fn config_parses_comments_and_overrides() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# study\nalpha = 0.5\nseed=7\n\nalpha=1.0\n").unwrap();
        let map = read_config(&path).unwrap();
        assert_eq!(map.get("alpha").map(String::as_str), Some("1.0"));
        assert_eq!(map.get("seed").map(String::as_str), Some("7"));
    }

    #[test]
    fn malformed_config_line_is_located() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "alpha=1\nnonsense\n").unwrap();
        match read_config(&path) {
            Err(Error::Data { line, .. }) => assert_eq!(line, Some(2)),
            other => panic!("expected a data error, got {other:?}"),
        }
    }

    #[test]
    fn json_floats_are_rounded() {
        #[derive(Serialize)]
        struct Out {
            x: f64,
            xs: Vec<f64>,
            n: u64,
        }
        let text = to_json_string(&Out {
            x: 1.0 / 3.0,
            xs: vec![2.0 / 3.0],
            n: 123456789012,
        })
        .unwrap();
        assert!(text.contains("0.333333333"), "{text}");
        assert!(text.contains("0.666666667"), "{text}");
        assert!(text.contains("123456789012"), "{text}");
        assert!(text.ends_with('\n'));
    }
}
