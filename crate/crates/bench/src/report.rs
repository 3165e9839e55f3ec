//! Per-query rows and run summaries.

use std::io::Write;

use crate::error::Result;
use crate::workload::WorkloadSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub query: usize,
    pub wall_ns: u64,
    pub points_examined: usize,
    pub nodes_visited: usize,
    pub result_size: usize,
    /// 1 when the answer matched the exhaustive oracle; absent without
    /// verification.
    pub recall: Option<f64>,
    /// Conformal queries only.
    pub guaranteed: Option<bool>,
    pub backend: String,
    /// `key=value` pairs separated by `;`.
    pub params: String,
}

pub const ROW_HEADER: [&str; 9] = [
    "query",
    "wall_ns",
    "points_examined",
    "nodes_visited",
    "result_size",
    "recall",
    "guaranteed",
    "backend",
    "params",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl ReportRow {
    fn record(&self) -> [String; 9] {
        [
            self.query.to_string(),
            self.wall_ns.to_string(),
            self.points_examined.to_string(),
            self.nodes_visited.to_string(),
            self.result_size.to_string(),
            opt(&self.recall),
            opt(&self.guaranteed),
            self.backend.clone(),
            self.params.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub kind: String,
    pub backend: String,
    pub n: usize,
    pub d: usize,
    pub queries: usize,
    pub epsilon: Option<f64>,
    pub best_effort_epsilon: Option<bool>,
    pub sample_size: Option<usize>,
    pub build_ms: f64,
    /// Serialized size of the built index; 0 for the linear scan.
    pub index_bytes: usize,
    pub median_ns: Option<u64>,
    pub p95_ns: Option<u64>,
    pub mean_points_examined: Option<f64>,
    pub mean_nodes_visited: Option<f64>,
    pub mean_result_size: Option<f64>,
    pub recall: Option<f64>,
    pub fallbacks: usize,
}

impl Summary {
    pub(crate) fn new(spec: &WorkloadSpec, n: usize, d: usize) -> Self {
        Self {
            kind: spec.kind.name().into(),
            backend: spec.backend.name().into(),
            n,
            d,
            queries: 0,
            epsilon: None,
            best_effort_epsilon: None,
            sample_size: None,
            build_ms: 0.0,
            index_bytes: 0,
            median_ns: None,
            p95_ns: None,
            mean_points_examined: None,
            mean_nodes_visited: None,
            mean_result_size: None,
            recall: None,
            fallbacks: 0,
        }
    }

    pub(crate) fn absorb(&mut self, rows: &[ReportRow]) {
        self.queries = rows.len();
        if rows.is_empty() {
            return;
        }
        let q = rows.len() as f64;
        let mut times: Vec<u64> = rows.iter().map(|r| r.wall_ns).collect();
        times.sort_unstable();
        // Nearest-rank percentiles.
        let pct = |p: f64| times[((p * q).ceil() as usize).clamp(1, rows.len()) - 1];
        self.median_ns = Some(pct(0.5));
        self.p95_ns = Some(pct(0.95));
        let mean = |f: fn(&ReportRow) -> usize| rows.iter().map(f).sum::<usize>() as f64 / q;
        self.mean_points_examined = Some(mean(|r| r.points_examined));
        self.mean_nodes_visited = Some(mean(|r| r.nodes_visited));
        self.mean_result_size = Some(mean(|r| r.result_size));
        let checked: Vec<f64> = rows.iter().filter_map(|r| r.recall).collect();
        if !checked.is_empty() {
            self.recall = Some(checked.iter().sum::<f64>() / checked.len() as f64);
        }
    }

    pub fn fields(&self) -> Vec<(&'static str, String)> {
        vec![
            ("kind", self.kind.clone()),
            ("backend", self.backend.clone()),
            ("n", self.n.to_string()),
            ("d", self.d.to_string()),
            ("queries", self.queries.to_string()),
            ("epsilon", opt(&self.epsilon)),
            ("best_effort_epsilon", opt(&self.best_effort_epsilon)),
            ("sample_size", opt(&self.sample_size)),
            ("build_ms", format!("{:.3}", self.build_ms)),
            ("index_bytes", self.index_bytes.to_string()),
            ("median_ns", opt(&self.median_ns)),
            ("p95_ns", opt(&self.p95_ns)),
            ("mean_points_examined", opt(&self.mean_points_examined)),
            ("mean_nodes_visited", opt(&self.mean_nodes_visited)),
            ("mean_result_size", opt(&self.mean_result_size)),
            ("recall", opt(&self.recall)),
            ("fallbacks", self.fallbacks.to_string()),
        ]
    }

    /// `key=value` lines.
    pub fn to_text(&self) -> String {
        self.fields()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadReport {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

pub fn write_rows(out: impl Write, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROW_HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush().map_err(|e| crate::BenchError::Data(e.to_string()))
}

/// One CSV row per sweep value: the axis value followed by summary fields.
pub fn write_sweep(out: impl Write, axis: &str, results: &[(f64, Summary)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if let Some((_, first)) = results.first() {
        let mut header = vec![axis.to_string()];
        header.extend(first.fields().into_iter().map(|(k, _)| k.to_string()));
        w.write_record(&header)?;
    }
    for (v, s) in results {
        let mut rec = vec![v.to_string()];
        rec.extend(s.fields().into_iter().map(|(_, v)| v));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| crate::BenchError::Data(e.to_string()))
}
