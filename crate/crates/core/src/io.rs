//! Text formats for matrices, C-datasets, distributions, clouds, verdicts,
//! predictions, sweeps and histograms.
//!
//! CSV floats carry 17 significant digits. JSON floats use the shortest
//! representation that round-trips to the same `f64`. Files written by
//! the CLI embed a [`Provenance`] record: a leading `# provenance ...`
//! comment line in CSV, a `"provenance"` member in JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::correlators::CDataset;
use crate::error::{Error, Result};
use crate::experiments::{Histogram, Prediction, SweepRow};
use crate::matrix::CMatrix;
use crate::oracle::OutputDistribution;
use crate::stats::{CertificationVerdict, VerdictStatus};
use crate::unitary::{InterferometerSubmatrix, UnitaryMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: Value,
}

impl Provenance {
    pub fn new(command: &str, seed: u64, config: Value) -> Self {
        Self {
            tool: "boson-bench".into(),
            version: crate::VERSION.into(),
            command: command.into(),
            seed,
            config,
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "# provenance {}\n",
            serde_json::to_string(self).expect("provenance serialises")
        )
    }
}

/// 17 significant digits; `NaN` for missing values.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn with_provenance(mut obj: Map<String, Value>, prov: Option<&Provenance>) -> Value {
    if let Some(p) = prov {
        obj.insert(
            "provenance".into(),
            serde_json::to_value(p).expect("provenance serialises"),
        );
    }
    Value::Object(obj)
}

fn entries_json(m: &CMatrix<f64>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array(m.row(r).iter().map(|z| json!([z.re, z.im])).collect()))
            .collect(),
    )
}

pub fn unitary_json(u: &UnitaryMatrix<f64>, prov: Option<&Provenance>) -> Value {
    let mut obj = Map::new();
    obj.insert("m".into(), json!(u.m()));
    obj.insert("entries".into(), entries_json(u.matrix()));
    with_provenance(obj, prov)
}

pub fn submatrix_json(sub: &InterferometerSubmatrix<f64>, prov: Option<&Provenance>) -> Value {
    let mut obj = Map::new();
    obj.insert("n".into(), json!(sub.n()));
    obj.insert("m".into(), json!(sub.m()));
    obj.insert("entries".into(), entries_json(sub.entries()));
    with_provenance(obj, prov)
}

/// Parses either matrix schema; returns the declared `n` (if present)
/// and the entries.
pub fn parse_matrix_json(text: &str) -> Result<(Option<usize>, CMatrix<f64>)> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let m = v["m"]
        .as_u64()
        .ok_or_else(|| Error::Parse("missing integer field `m`".into()))? as usize;
    let n = v.get("n").and_then(Value::as_u64).map(|x| x as usize);
    let rows = v["entries"]
        .as_array()
        .ok_or_else(|| Error::Parse("missing array `entries`".into()))?;
    let parsed = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("matrix row is not an array".into()))?
                .iter()
                .map(|z| match z.as_array().map(Vec::as_slice) {
                    Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                        (Some(re), Some(im)) => Ok(Complex::new(re, im)),
                        _ => Err(Error::Parse("entry is not a [re, im] number pair".into())),
                    },
                    _ => Err(Error::Parse("entry is not a [re, im] pair".into())),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix = CMatrix::from_rows(parsed)?;
    if matrix.cols() != m || matrix.rows() != n.unwrap_or(m) {
        return Err(Error::Parse(format!(
            "declared shape {}x{m} does not match entries {}x{}",
            n.unwrap_or(m),
            matrix.rows(),
            matrix.cols()
        )));
    }
    Ok((n, matrix))
}

pub fn dataset_csv(ds: &CDataset<f64>, prov: Option<&Provenance>) -> String {
    let mut out = prov.map(Provenance::csv_line).unwrap_or_default();
    out.push_str("i,j,value\n");
    for ((i, j), v) in ds.iter() {
        let _ = writeln!(out, "{i},{j},{}", fmt_float(v));
    }
    out
}

pub fn dataset_sidecar_json(
    ds: &CDataset<f64>,
    source_seed: u64,
    prov: Option<&Provenance>,
) -> Value {
    let mut obj = Map::new();
    obj.insert("species".into(), json!(ds.species));
    obj.insert("n".into(), json!(ds.n));
    obj.insert("m".into(), json!(ds.m));
    obj.insert("source_seed".into(), json!(source_seed));
    with_provenance(obj, prov)
}

pub fn distribution_json(dist: &OutputDistribution<f64>, prov: Option<&Provenance>) -> Value {
    let mut obj = Map::new();
    obj.insert("species".into(), json!(dist.species));
    obj.insert("n".into(), json!(dist.n));
    obj.insert("m".into(), json!(dist.m));
    obj.insert(
        "entries".into(),
        Value::Array(
            dist.entries
                .iter()
                .map(|(y, p)| json!({"y": y, "p": p}))
                .collect(),
        ),
    );
    with_provenance(obj, prov)
}

pub fn cloud_csv(points: &[(f64, f64)], prov: Option<&Provenance>) -> String {
    let mut out = prov.map(Provenance::csv_line).unwrap_or_default();
    out.push_str("trial,cv,s\n");
    for (t, (cv, s)) in points.iter().enumerate() {
        let _ = writeln!(out, "{t},{},{}", fmt_float(*cv), fmt_float(*s));
    }
    out
}

/// Reads `trial,cv,s` rows, skipping `#` comments and the header.
pub fn parse_cloud_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("trial") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [_, cv, s] = fields.as_slice() else {
            return Err(Error::Parse(format!(
                "line {}: expected 3 fields",
                lineno + 1
            )));
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {}: bad number `{t}`", lineno + 1)))
        };
        points.push((num(cv)?, num(s)?));
    }
    Ok(points)
}

pub fn verdict_json(v: &CertificationVerdict<f64>, prov: Option<&Provenance>) -> Value {
    let mut obj = Map::new();
    obj.insert("k".into(), json!(v.k));
    let distances: BTreeMap<String, f64> = v
        .distances
        .iter()
        .map(|(s, d)| (s.to_string(), *d))
        .collect();
    obj.insert("distances".into(), json!(distances));
    obj.insert("accepted".into(), json!(v.accepted));
    match &v.status {
        VerdictStatus::Conclusive => {
            obj.insert("status".into(), json!("conclusive"));
        }
        VerdictStatus::Inconclusive(why) => {
            obj.insert("status".into(), json!("inconclusive"));
            obj.insert("diagnostic".into(), json!(why));
        }
    }
    obj.insert("regularized".into(), json!(v.regularized));
    obj.insert("low_confidence".into(), json!(v.low_confidence));
    with_provenance(obj, prov)
}

pub fn prediction_json(p: &Prediction) -> Value {
    json!({
        "species": p.species,
        "n": p.n,
        "m": p.m,
        "m1": p.moments.m1,
        "m2": p.moments.m2,
        "m3": p.moments.m3,
        "nm": p.statistics.nm,
        "cv": p.statistics.cv,
        "s": p.statistics.s,
    })
}

pub fn sweep_csv(rows: &[SweepRow], prov: Option<&Provenance>) -> String {
    let mut out = prov.map(Provenance::csv_line).unwrap_or_default();
    out.push_str("m,species,trials,nm_mean,nm_sd,cv_mean,cv_sd,s_mean,s_sd,nm_rmt,cv_rmt,s_rmt\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.m,
            r.species,
            r.trials,
            fmt_float(r.nm.mean),
            fmt_float(r.nm.sd),
            fmt_float(r.cv.mean),
            fmt_float(r.cv.sd),
            fmt_float(r.s.mean),
            fmt_float(r.s.sd),
            fmt_float(r.rmt.nm),
            fmt_float(r.rmt.cv),
            fmt_float(r.rmt.s),
        );
    }
    out
}

pub fn histogram_csv(h: &Histogram, prov: Option<&Provenance>) -> String {
    let mut out = prov.map(Provenance::csv_line).unwrap_or_default();
    out.push_str("bin_left,bin_right,count,density\n");
    for (b, w) in h.edges.windows(2).enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_float(w[0]),
            fmt_float(w[1]),
            h.counts[b],
            fmt_float(h.density[b])
        );
    }
    out
}
