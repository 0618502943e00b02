//! Benchmark harness: solve every manifest instance under each encoding,
//! with a per-instance timeout, on a bounded pool of worker threads.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::benchgen::ManifestEntry;
use crate::encode::Encoding;
use crate::error::{Error, Result};
use crate::matrix::PartialMatrix;
use crate::solve::{mine, Backend, Status};

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub encodings: Vec<Encoding>,
    pub timeout: Duration,
    pub workers: usize,
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub instance: String,
    pub status: Status,
    pub seconds: f64,
    /// Unoccupied classes, for solved instances.
    pub objective: Option<usize>,
}

impl Outcome {
    pub fn solved(&self) -> bool {
        self.status == Status::Optimal
    }
}

#[derive(Debug, Clone)]
pub struct EncodingReport {
    pub encoding: Encoding,
    /// In manifest order.
    pub outcomes: Vec<Outcome>,
}

/// A named instance ready to solve.
#[derive(Debug, Clone)]
pub struct Job {
    pub name: String,
    pub psm: PartialMatrix,
    pub m: usize,
}

pub fn load_jobs(manifest: impl AsRef<Path>) -> Result<Vec<Job>> {
    let manifest = manifest.as_ref();
    crate::benchgen::read_manifest(manifest)?
        .iter()
        .map(|e: &ManifestEntry| {
            Ok(Job { name: e.instance.clone(), psm: PartialMatrix::read(e.resolve(manifest))?, m: e.m })
        })
        .collect()
}

fn run_one(job: &Job, encoding: Encoding, opts: &EvalOptions) -> Result<Outcome> {
    let start = Instant::now();
    let res = mine(&job.psm, encoding, Some(job.m), &opts.backend, Some(opts.timeout));
    let seconds = start.elapsed().as_secs_f64();
    let (status, objective) = match res {
        Ok(found) => (Status::Optimal, Some(found.objective)),
        Err(Error::Infeasible { .. }) => (Status::Infeasible, None),
        Err(Error::Timeout { .. }) => (Status::Timeout, None),
        Err(e) => return Err(e),
    };
    Ok(Outcome { instance: job.name.clone(), status, seconds, objective })
}

/// Solves every job under every encoding. Output order follows
/// `opts.encodings` and then the job order, whatever the scheduling.
pub fn run(jobs: &[Job], opts: &EvalOptions) -> Result<Vec<EncodingReport>> {
    let tasks: Vec<(usize, usize)> =
        (0..opts.encodings.len()).flat_map(|e| (0..jobs.len()).map(move |j| (e, j))).collect();
    let results: Mutex<Vec<Option<Result<Outcome>>>> = Mutex::new((0..tasks.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = opts.workers.clamp(1, tasks.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let t = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(e, j)) = tasks.get(t) else { break };
                let out = run_one(&jobs[j], opts.encodings[e], opts);
                results.lock().expect("no worker panicked")[t] = Some(out);
            });
        }
    });
    let mut flat = results.into_inner().expect("no worker panicked").into_iter();
    opts.encodings
        .iter()
        .map(|&encoding| {
            let outcomes = (0..jobs.len())
                .map(|_| flat.next().flatten().expect("every task ran"))
                .collect::<Result<Vec<_>>>()?;
            Ok(EncodingReport { encoding, outcomes })
        })
        .collect()
}

/// Solved count and total time of the solved instances; timed-out and
/// infeasible runs do not contribute time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub solved: usize,
    pub total: usize,
    pub seconds: f64,
}

pub fn summarize(outcomes: &[Outcome]) -> Summary {
    let solved: Vec<&Outcome> = outcomes.iter().filter(|o| o.solved()).collect();
    Summary { solved: solved.len(), total: outcomes.len(), seconds: solved.iter().map(|o| o.seconds).sum() }
}

/// Cactus points `(T_i, i)`: the `i` fastest solved instances take `T_i`
/// seconds in total.
pub fn cactus(outcomes: &[Outcome]) -> Vec<(f64, usize)> {
    let mut times: Vec<f64> = outcomes.iter().filter(|o| o.solved()).map(|o| o.seconds).collect();
    times.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    times
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            acc += t;
            (acc, i + 1)
        })
        .collect()
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Optimal => "optimal",
        Status::Infeasible => "infeasible",
        Status::Timeout => "timeout",
    }
}

#[derive(Serialize)]
struct OutcomeRow<'a> {
    instance: &'a str,
    status: &'static str,
    seconds: String,
    objective: Option<usize>,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))
}

/// Columns: `instance,status,seconds,objective`.
pub fn write_outcomes(outcomes: &[Outcome], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    for o in outcomes {
        let row = OutcomeRow {
            instance: &o.instance,
            status: status_name(o.status),
            seconds: format!("{:.6}", o.seconds),
            objective: o.objective,
        };
        w.serialize(row).map_err(|e| Error::io(path, e.into()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Columns: `encoding,solved,total,seconds`.
pub fn write_summary(reports: &[EncodingReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(["encoding", "solved", "total", "seconds"]).map_err(|e| Error::io(path, e.into()))?;
    for r in reports {
        let s = summarize(&r.outcomes);
        w.write_record([r.encoding.to_string(), s.solved.to_string(), s.total.to_string(), format!("{:.6}", s.seconds)])
            .map_err(|e| Error::io(path, e.into()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Columns: `encoding,seconds,solved`, one row per cactus point.
pub fn write_cactus(reports: &[EncodingReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(["encoding", "seconds", "solved"]).map_err(|e| Error::io(path, e.into()))?;
    for r in reports {
        for (t, i) in cactus(&r.outcomes) {
            w.write_record([r.encoding.to_string(), format!("{t:.6}"), i.to_string()])
                .map_err(|e| Error::io(path, e.into()))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}
