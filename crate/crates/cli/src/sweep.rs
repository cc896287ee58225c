//! One-parameter sweeps over a base config, run on a small worker pool.

use crate::config::{is_numeric, qualify, ExperimentConfig, RawConfig};
use crate::error::{config, Result};
use crate::experiments::run_experiment;
use crate::report::{Cell, Check, Report, Table};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub const WORKERS_ENV: &str = "FKSLAB_WORKERS";

/// Worker cap: `FKSLAB_WORKERS` if set, else the available parallelism.
pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(config(format!("{WORKERS_ENV} must be a positive integer, got '{text}'"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

#[derive(Debug)]
pub struct Job {
    pub index: usize,
    pub value: String,
    pub seed: u64,
    pub outcome: std::result::Result<Report, String>,
}

#[derive(Debug)]
pub struct Sweep {
    pub key: String,
    pub jobs: Vec<Job>,
}

impl Sweep {
    pub fn all_pass(&self) -> bool {
        self.jobs
            .iter()
            .all(|j| matches!(&j.outcome, Ok(r) if r.all_pass()))
    }

    /// Merged report: one table row per job check, sorted by the swept value.
    pub fn merged(&self, id: &str) -> Report {
        let mut report = Report::new(&format!("{id}-sweep"), "sweep");
        report.env("parameter", &self.key);
        report.env("values", self.jobs.iter().map(|j| j.value.clone()).collect::<Vec<_>>());
        let mut table = Table::new(
            "merged",
            &[&self.key, "job", "seed", "status", "check", "measured", "predicted", "pass"],
        );
        let mut order: Vec<&Job> = self.jobs.iter().collect();
        order.sort_by(|a, b| match (a.value.parse::<f64>(), b.value.parse::<f64>()) {
            (Ok(x), Ok(y)) => x.total_cmp(&y).then(a.index.cmp(&b.index)),
            _ => a.value.cmp(&b.value).then(a.index.cmp(&b.index)),
        });
        for job in order {
            let lead = |status: &str| -> Vec<Cell> {
                vec![
                    job.value.as_str().into(),
                    job.index.into(),
                    job.seed.into(),
                    status.into(),
                ]
            };
            match &job.outcome {
                Ok(r) => {
                    for c in &r.checks {
                        let mut row = lead(if r.all_pass() { "pass" } else { "fail" });
                        row.extend([c.id.as_str().into(), c.measured.into(), c.predicted.into(), c.pass.into()]);
                        table.push(row);
                    }
                }
                Err(msg) => {
                    let mut row = lead("error");
                    row.extend([Cell::Empty, Cell::Empty, Cell::Empty, false.into()]);
                    table.push(row);
                    report.check(
                        Check::at_most(format!("job-{}-error", job.index), 1.0, 0.0)
                            .param(&self.key, &job.value)
                            .note(msg.clone()),
                    );
                }
            }
            if let Ok(r) = &job.outcome {
                let failed = r.failures().count();
                report.check(
                    Check::at_most(format!("job-{}-failures", job.index), failed as f64, 0.0)
                        .param(&self.key, &job.value)
                        .seed(job.seed),
                );
            }
        }
        report.table(table);
        report
    }
}

/// Runs `base` once per value of `param`. Job `i` gets seed `base seed + i`.
/// Per-job errors are recorded, not propagated; reports land in
/// `out/<id>-sweep/job-<i>/`.
pub fn run_sweep(base: &RawConfig, base_dir: &Path, param: &str, values: &[String], out: &Path) -> Result<Sweep> {
    if values.is_empty() {
        return Err(config("--values needs at least one value"));
    }
    let key = qualify(param)?;
    if !is_numeric(&key) {
        return Err(config(format!("'{key}' is not a numeric key and cannot be swept")));
    }
    for v in values {
        if v.parse::<f64>().is_err() {
            return Err(config(format!("sweep value '{v}' is not numeric for '{key}'")));
        }
    }
    let base_cfg = ExperimentConfig::from_raw(base, base_dir)?;
    let sweep_dir = out.join(format!("{}-sweep", base_cfg.id));
    let workers = worker_count()?.min(values.len());
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Job>>> = Mutex::new((0..values.len()).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::SeqCst);
                if index >= values.len() {
                    break;
                }
                let seed = base_cfg.seed + index as u64;
                let outcome = run_job(base, base_dir, &key, &values[index], seed, &sweep_dir.join(format!("job-{index}")))
                    .map_err(|e| e.to_string());
                slots.lock().expect("no poisoned workers")[index] = Some(Job {
                    index,
                    value: values[index].clone(),
                    seed,
                    outcome,
                });
            });
        }
    });
    let jobs = slots
        .into_inner()
        .expect("no poisoned workers")
        .into_iter()
        .map(|j| j.expect("every job ran"))
        .collect();
    Ok(Sweep { key, jobs })
}

fn run_job(base: &RawConfig, base_dir: &Path, key: &str, value: &str, seed: u64, dir: &Path) -> Result<Report> {
    let mut raw = base.clone();
    raw.set(key, value);
    raw.set("experiment.seed", &seed.to_string());
    let cfg = ExperimentConfig::from_raw(&raw, base_dir)?;
    let mut report = run_experiment(&cfg)?;
    report.env("sweep_parameter", key);
    report.env("sweep_value", value);
    report.write(dir)?;
    Ok(report)
}
