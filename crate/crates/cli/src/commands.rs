use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use labelrankt::dynamic::IncrementalDetector;
use labelrankt::graph::symmetrize;
use labelrankt::labelprop::run_labelrank;
use labelrankt::metrics::{modularity, ModularityVariant};
use labelrankt::synthgen::{generate_stream, write_stream, PlantedStream, StreamSpec};
use labelrankt::{CommunityAssignment, Params, Snapshot};

use crate::error::{CliError, Result};
use crate::report::{RunRecord, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Static,
    Incremental,
}

/// How arcs are read before detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphView {
    pub directed: bool,
    pub weighted: bool,
}

impl GraphView {
    pub const WEIGHTED_DIRECTED: GraphView = GraphView {
        directed: true,
        weighted: true,
    };
    pub const BINARIZED_UNDIRECTED: GraphView = GraphView {
        directed: false,
        weighted: false,
    };

    /// The snapshot as this view sees it. Undirected views fold each arc into
    /// both directions.
    pub fn apply(&self, snapshot: &Snapshot) -> Snapshot {
        match (self.directed, self.weighted) {
            (true, true) => snapshot.clone(),
            (true, false) => snapshot.binarize(),
            (false, weighted) => symmetrize(snapshot, !weighted),
        }
    }

    pub fn variant(&self) -> ModularityVariant {
        if self.directed {
            ModularityVariant::DirectedWeighted
        } else {
            ModularityVariant::UndirectedWeighted
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub mode: Mode,
    pub params: Params,
    pub view: GraphView,
    /// When false every `ms` field is 0, making reports byte-reproducible.
    pub timing: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub assignments: Vec<CommunityAssignment>,
}

fn millis(start: Instant, timing: bool) -> u64 {
    if timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}

/// Detects communities in every snapshot. Q is measured on the viewed graph.
pub fn run(snapshots: &[Snapshot], opts: &RunOptions) -> Result<RunOutput> {
    opts.params.validate()?;
    if snapshots.is_empty() {
        return Err(labelrankt::Error::EmptyStream.into());
    }
    let viewed: Vec<Snapshot> = snapshots.iter().map(|s| opts.view.apply(s)).collect();
    let results: Vec<(RunRecord, CommunityAssignment)> = match opts.mode {
        Mode::Static => viewed
            .par_iter()
            .map(|s| {
                let start = Instant::now();
                let run = run_labelrank(s, &opts.params)?;
                let ms = millis(start, opts.timing);
                let q = modularity(s, &run.assignment, opts.view.variant())?.q;
                let record = RunRecord {
                    t: s.time_index(),
                    q,
                    communities: run.assignment.community_count(),
                    iters: run.stats.iterations,
                    updated: run.stats.updated_nodes,
                    ms,
                };
                Ok((record, run.assignment))
            })
            .collect::<labelrankt::Result<_>>()?,
        Mode::Incremental => {
            let mut detector = IncrementalDetector::new(opts.params.clone());
            let mut out = Vec::with_capacity(viewed.len());
            for s in &viewed {
                let start = Instant::now();
                let step = detector.push(s)?;
                let ms = millis(start, opts.timing);
                let q = modularity(s, &step.assignment, opts.view.variant())?.q;
                let record = RunRecord {
                    t: s.time_index(),
                    q,
                    communities: step.assignment.community_count(),
                    iters: step.stats.iterations,
                    updated: step.stats.updated_nodes,
                    ms,
                };
                out.push((record, step.assignment));
            }
            out
        }
    };
    let (records, assignments) = results.into_iter().unzip();
    Ok(RunOutput {
        report: RunReport { records },
        assignments,
    })
}

pub fn assignment_file_name(time_index: u64) -> String {
    format!("assign.{time_index:04}.txt")
}

/// Writes `assign.NNNN.txt` per snapshot and `report.csv` into `dir`.
pub fn write_run(output: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for (record, assignment) in output.report.records.iter().zip(&output.assignments) {
        let path = dir.join(assignment_file_name(record.t));
        fs::write(&path, assignment.to_text()).map_err(|e| CliError::io(&path, e))?;
    }
    let path = dir.join("report.csv");
    fs::write(&path, output.report.to_csv()?).map_err(|e| CliError::io(&path, e))
}

pub const DEFAULT_Q_GRID: [f64; 11] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub q: f64,
    /// Mean Q over the stream, weighted and directed detection.
    pub weighted_directed: f64,
    /// Mean Q over the stream, binarized and undirected detection.
    pub binarized_undirected: f64,
}

impl SweepRow {
    pub fn difference(&self) -> f64 {
        self.weighted_directed - self.binarized_undirected
    }
}

/// Incremental detection per q in both views. Both partitions are scored
/// with directed weighted Q on the original snapshots, so the difference
/// reflects partition quality rather than a change of yardstick.
pub fn sweep(snapshots: &[Snapshot], base: &Params, q_values: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(q) = q_values.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(CliError::Usage(format!("q value {q} is outside [0, 1]")));
    }
    if snapshots.is_empty() {
        return Err(labelrankt::Error::EmptyStream.into());
    }
    let mean_q = |params: &Params, view: GraphView| -> Result<f64> {
        let opts = RunOptions {
            mode: Mode::Incremental,
            params: params.clone(),
            view,
            timing: false,
        };
        let out = run(snapshots, &opts)?;
        let mut total = 0.0;
        for (s, a) in snapshots.iter().zip(&out.assignments) {
            total += modularity(s, a, ModularityVariant::DirectedWeighted)?.q;
        }
        Ok(total / snapshots.len() as f64)
    };
    q_values
        .par_iter()
        .map(|&q| {
            let params = base.clone().with_q(q);
            Ok(SweepRow {
                q,
                weighted_directed: mean_q(&params, GraphView::WEIGHTED_DIRECTED)?,
                binarized_undirected: mean_q(&params, GraphView::BINARIZED_UNDIRECTED)?,
            })
        })
        .collect()
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("q,weighted_directed,binarized_undirected,difference\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.q,
            r.weighted_directed,
            r.binarized_undirected,
            r.difference()
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub static_ms: f64,
    pub incremental_ms: f64,
    pub static_updated: Vec<usize>,
    pub incremental_updated: Vec<usize>,
    pub static_row_ops: u64,
    pub incremental_row_ops: u64,
}

impl BenchReport {
    /// Incremental row-update operations over static ones.
    pub fn row_op_ratio(&self) -> f64 {
        if self.static_row_ops == 0 {
            return 0.0;
        }
        self.incremental_row_ops as f64 / self.static_row_ops as f64
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "static_ms {:.3}\nincremental_ms {:.3}\nstatic_updated {}\nincremental_updated {}\n\
             static_row_ops {}\nincremental_row_ops {}\nrow_op_ratio {:.6}\n",
            self.static_ms,
            self.incremental_ms,
            join(&self.static_updated),
            join(&self.incremental_updated),
            self.static_row_ops,
            self.incremental_row_ops,
            self.row_op_ratio()
        )
    }
}

/// Static and incremental runs over the same snapshots, one after the other
/// on a single thread.
pub fn bench(snapshots: &[Snapshot], params: &Params) -> Result<BenchReport> {
    params.validate()?;
    if snapshots.is_empty() {
        return Err(labelrankt::Error::EmptyStream.into());
    }
    let mut report = BenchReport {
        static_ms: 0.0,
        incremental_ms: 0.0,
        static_updated: Vec::new(),
        incremental_updated: Vec::new(),
        static_row_ops: 0,
        incremental_row_ops: 0,
    };
    let start = Instant::now();
    for s in snapshots {
        let run = run_labelrank(s, params)?;
        report.static_updated.push(run.stats.updated_nodes);
        report.static_row_ops += run.stats.row_ops;
    }
    report.static_ms = start.elapsed().as_secs_f64() * 1e3;

    let start = Instant::now();
    let mut detector = IncrementalDetector::new(params.clone());
    for s in snapshots {
        let step = detector.push(s)?;
        report.incremental_updated.push(step.stats.updated_nodes);
        report.incremental_row_ops += step.stats.row_ops;
    }
    report.incremental_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

pub fn parse_stream_spec(text: &str, path: &Path) -> Result<StreamSpec> {
    toml::from_str(text).map_err(|source| CliError::SpecFile {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a TOML stream spec, generates it with `seed`, and writes it to `out`.
pub fn generate(spec_path: &Path, seed: u64, out: &Path) -> Result<PlantedStream> {
    let text = fs::read_to_string(spec_path).map_err(|e| CliError::io(spec_path, e))?;
    let spec = parse_stream_spec(&text, spec_path)?;
    let stream = generate_stream(&spec, seed)?;
    write_stream(&stream, out)?;
    Ok(stream)
}
