//! CSV and JSON output. Floats in CSVs carry 12 significant digits so the
//! same inputs give the same bytes everywhere.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analyze::{Analysis, Ingested};
use crate::condstats::BinnedCurve;
use crate::error::{Error, Result};

pub const SIG_DIGITS: usize = 12;

/// `%.12g`-style rendering: positional for moderate exponents, scientific
/// otherwise, trailing zeros dropped. NaN is written as an empty field.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return String::new();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mant, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mant),
    };
    let digits = mant.replace('.', "");
    let trim = |int: &str, frac: &str| {
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    };
    let body = if (-4..SIG_DIGITS as i32).contains(&exp) {
        if exp >= 0 {
            let p = exp as usize + 1;
            trim(&digits[..p], &digits[p..])
        } else {
            trim("0", &format!("{}{digits}", "0".repeat((-exp - 1) as usize)))
        }
    } else {
        format!("{}e{exp}", trim(&digits[..1], &digits[1..]))
    };
    format!("{sign}{body}")
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Provenance shared by every file of one report.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub asset: String,
    pub first_day: NaiveDate,
    pub last_day: NaiveDate,
    pub n_days: usize,
    /// Arguments that reproduce the run.
    pub command: Vec<String>,
}

impl Provenance {
    pub fn of(a: &Analysis, command: Vec<String>) -> Self {
        Provenance { asset: a.asset.clone(), first_day: a.first_day, last_day: a.last_day, n_days: a.n_days, command }
    }
}

fn sidecar(prov: &Provenance, file: &str, kind: &str, extra: Value) -> Value {
    let mut v = json!({ "file": file, "kind": kind, "provenance": prov });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

/// `ASSET_<estimator>_<params>.csv`.
pub fn curve_file_name(asset: &str, c: &BinnedCurve) -> String {
    let mut params = Vec::new();
    if let Some(n0) = c.meta.n0 {
        params.push(format!("N{n0}"));
    }
    if let Some(dt) = c.meta.dt0_ms {
        params.push(format!("dt{dt}ms"));
    }
    params.push(format!("bins{}", c.meta.n_bins));
    format!("{asset}_{}_{}.csv", c.meta.estimator, params.join("_"))
}

pub const CURVE_HEADER: [&str; 6] = ["bin_lo", "bin_hi", "bin_center", "count", "value", "stderr"];

pub fn write_curve(dir: &Path, prov: &Provenance, c: &BinnedCurve) -> Result<PathBuf> {
    let name = curve_file_name(&prov.asset, c);
    let path = dir.join(&name);
    write_csv(
        &path,
        &CURVE_HEADER,
        c.rows.iter().map(|r| {
            vec![fmt_float(r.lo), fmt_float(r.hi), fmt_float(r.center), r.count.to_string(), fmt_float(r.value), fmt_float(r.stderr)]
        }),
    )?;
    let extra = json!({ "meta": c.meta, "pooled": c.pooled, "pooled_count": c.pooled_count });
    write_json(&path.with_extension("json"), &sidecar(prov, &name, "binned_curve", extra))?;
    Ok(path)
}

/// Files written for one analysis.
#[derive(Clone, Debug, Default)]
pub struct BundleFiles {
    pub csv: Vec<PathBuf>,
    pub json: Vec<PathBuf>,
}

pub fn write_bundle(dir: &Path, a: &Analysis, ingest: Option<&Ingested>, command: Vec<String>) -> Result<BundleFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let prov = Provenance::of(a, command);
    let asset = &a.asset;
    let mut out = BundleFiles::default();
    let add = |out: &mut BundleFiles, csv: PathBuf| {
        out.json.push(csv.with_extension("json"));
        out.csv.push(csv);
    };

    let name = format!("{asset}_tickmetrics.csv");
    let path = dir.join(&name);
    let t = &a.tick;
    write_csv(
        &path,
        &["asset", "P_eq", "P_0", "eta", "perceived", "days_used", "days_skipped"],
        [vec![
            asset.clone(),
            fmt_float(t.p_eq),
            fmt_float(t.p_zero),
            fmt_float(t.eta),
            fmt_float(t.perceived),
            t.days_used.to_string(),
            t.days_skipped.to_string(),
        ]],
    )?;
    write_json(&path.with_extension("json"), &sidecar(&prov, &name, "tickmetrics", json!({ "n_alt": t.n_alt, "n_cont": t.n_cont })))?;
    add(&mut out, path);

    let name = format!("{asset}_seasonality.csv");
    let path = dir.join(&name);
    write_csv(
        &path,
        &["slot_start_ms", "slot_end_ms", "days", "rate", "rate_stderr", "variance", "variance_stderr", "variance_days"],
        a.seasonality.iter().map(|s| {
            vec![
                s.start_ms.to_string(),
                s.end_ms.to_string(),
                s.days.to_string(),
                fmt_float(s.rate),
                fmt_float(s.rate_stderr),
                fmt_float(s.variance),
                fmt_float(s.variance_stderr),
                s.variance_days.to_string(),
            ]
        }),
    )?;
    let extra = json!({
        "slot_ms": a.seasonality.first().map(|s| s.end_ms - s.start_ms),
        "rate_unit": "trades per second",
        "variance_unit": "ticks^2",
    });
    write_json(&path.with_extension("json"), &sidecar(&prov, &name, "seasonality", extra))?;
    add(&mut out, path);

    let name = format!("{asset}_daily_scatter.csv");
    let path = dir.join(&name);
    write_csv(
        &path,
        &["day", "n_trades", "sample_ms", "realized_variance"],
        a.daily.iter().flat_map(|(ms, d)| {
            d.points.iter().map(move |p| {
                vec![p.day_id.format("%Y-%m-%d").to_string(), p.n_trades.to_string(), ms.to_string(), fmt_float(p.realized_variance)]
            })
        }),
    )?;
    let slopes: Vec<Value> = a.daily.iter().map(|(ms, d)| json!({ "sample_ms": ms, "slope": d.slope })).collect();
    write_json(&path.with_extension("json"), &sidecar(&prov, &name, "daily_scatter", json!({ "zero_intercept_slopes": slopes })))?;
    add(&mut out, path);

    for c in a.curves() {
        let p = write_curve(dir, &prov, c)?;
        add(&mut out, p);
    }

    if let Some(ing) = ingest {
        let path = dir.join(format!("{asset}_diagnostics.json"));
        write_json(&path, &json!({ "provenance": prov, "ingest": ing, "events": ing.events() }))?;
        out.json.push(path);
    }

    let path = dir.join(format!("{asset}_run.json"));
    let files: Vec<String> =
        out.csv.iter().filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned())).collect();
    let run = json!({
        "provenance": prov,
        "tickmetrics": a.tick,
        "zero_intercept_slopes": slopes,
        "null_check": a.null_check,
        "null_consistent": a.null_check.null_consistent,
        "csv_files": files,
    });
    write_json(&path, &run)?;
    out.json.push(path);
    Ok(out)
}
