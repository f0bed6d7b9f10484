//! Report files: depth table, scaling CSV, fits with crossovers, and
//! per-method success-ratio tables. All output is deterministic for a given
//! dataset, with floats written to six significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rotaq_core::circuit::depth_table;
use rotaq_core::record::Method;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::crossover::{estimate_crossover, Clocks, CrossoverEstimate};
use crate::fit::{fit_scaling, ScalingFit};
use crate::format::g6;
use crate::runner::Dataset;
use crate::Result;

/// Marker written where a mean cost is undefined (no trajectory converged).
pub const UNDEFINED: &str = "undefined";

/// CD and CD-SP of one-layer ansätze for `N = n = 2..=max_size`.
pub fn depth_table_csv(max_size: usize) -> Result<String> {
    let mut out = String::from("Rot.,Res.,Method,CD,CD-SP,CNOTs\n");
    for (r, _) in depth_table(max_size)? {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.rotamers,
            r.num_residues,
            r.regime.method_label(),
            r.cd,
            r.cd_sp,
            r.cnot_count
        );
    }
    Ok(out)
}

/// One row per cell: size, method, normalized mean cost and spread.
pub fn scaling_csv(data: &Dataset) -> String {
    let mut out = String::from("M,N,n,method,mean_cost,std_cost,convergence_ratio,converged,trajectories\n");
    for c in &data.cells {
        let s = &c.summary;
        let opt = |v: Option<f64>| v.map_or_else(|| UNDEFINED.to_string(), g6);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.spec.num_qubits,
            c.spec.residues,
            c.spec.rotamers,
            c.spec.label,
            opt(s.mean_cost),
            opt(s.std_cost),
            g6(s.convergence_ratio),
            s.converged,
            s.trajectories
        );
    }
    out
}

/// Success ratios of one method by size.
pub fn convergence_table(data: &Dataset, label: &str) -> String {
    let mut out = String::from("Res.,Rot.,Total,Success Ratio\n");
    for c in data.cells_for(label) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            c.spec.residues,
            c.spec.rotamers,
            c.spec.num_qubits,
            g6(c.summary.convergence_ratio)
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodFit {
    pub label: String,
    pub method: Method,
    pub fit_start_m: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<ScalingFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverEntry {
    pub classical: String,
    pub quantum: String,
    pub estimate: CrossoverEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub fits: Vec<MethodFit>,
    pub crossovers: Vec<CrossoverEntry>,
}

/// Fit every method (with its own fit start unless `fit_start` overrides
/// it) and estimate a crossover for each classical/quantum pair.
pub fn fit_report(data: &Dataset, fit_start: Option<usize>, clocks: Clocks) -> FitReport {
    let fits: Vec<MethodFit> = data
        .labels()
        .into_iter()
        .map(|label| {
            let method = data.method(&label).expect("label has cells");
            let start = fit_start.or_else(|| data.fit_start(&label)).unwrap_or(0);
            let (fit, error) = match fit_scaling(&data.points(&label), start) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            MethodFit {
                label,
                method,
                fit_start_m: start,
                fit,
                error,
            }
        })
        .collect();
    let mut crossovers = Vec::new();
    for c in fits.iter().filter(|f| !f.method.is_quantum()) {
        for q in fits.iter().filter(|f| f.method.is_quantum()) {
            if let (Some(fc), Some(fq)) = (&c.fit, &q.fit) {
                crossovers.push(CrossoverEntry {
                    classical: c.label.clone(),
                    quantum: q.label.clone(),
                    estimate: estimate_crossover(fc, fq, clocks),
                });
            }
        }
    }
    FitReport { fits, crossovers }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                let r: f64 = g6(x).parse().expect("formatted float parses");
                if let Some(m) = serde_json::Number::from_f64(r) {
                    *n = m;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to six significant digits.
pub fn to_report_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Write all reports for `data` into `out`; returns the paths written.
pub fn emit_reports(data: &Dataset, out: &Path, clocks: Clocks, max_depth_size: usize) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let mut files: Vec<(String, String)> = vec![
        ("depth_table.csv".into(), depth_table_csv(max_depth_size)?),
        ("scaling.csv".into(), scaling_csv(data)),
        ("fits.json".into(), to_report_json(&fit_report(data, None, clocks))?),
    ];
    for label in data.labels() {
        files.push((format!("success_{label}.csv"), convergence_table(data, &label)));
    }
    let mut written = Vec::new();
    for (name, body) in files {
        let path = out.join(name);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
