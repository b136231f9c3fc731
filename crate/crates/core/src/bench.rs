//! Benchmark runner: BDCC over a sweep of `tau` plus the baseline on every
//! instance, with serial and simulated-parallel timings and a gap table.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::baseline::solve_baseline;
use crate::graph::Instance;
use crate::io::format_real;
use crate::master::{bdcc, BoundsTrace, SolveResult, SolverConfig};

pub const EPSILONS: [f64; 3] = [0.1, 1.0, 10.0];
pub const CHECKPOINTS_S: [f64; 4] = [10.0, 50.0, 100.0, 300.0];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub taus: Vec<f64>,
    pub solver: SolverConfig,
    /// Multiplies the checkpoint times of the summary table.
    pub time_scale: f64,
    pub include_baseline: bool,
    /// Instances solved concurrently.
    pub workers: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            taus: vec![0.0, 0.5],
            solver: SolverConfig::default(),
            time_scale: 0.1,
            include_baseline: true,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    Serial,
    Parallel,
}

impl Timing {
    pub fn as_str(self) -> &'static str {
        match self {
            Timing::Serial => "serial",
            Timing::Parallel => "parallel",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub solver: String,
    pub tau: Option<f64>,
    /// Solver status, or `error` when the run failed.
    pub status: String,
    pub cost: f64,
    pub lower_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub rows_std: usize,
    pub rows_mwr: usize,
    pub serial_ms: f64,
    pub parallel_ms: f64,
    /// Time until the gap first drops to each of [`EPSILONS`], per timing model.
    pub time_to_gap_serial: [Option<f64>; 3],
    pub time_to_gap_parallel: [Option<f64>; 3],
    pub error: Option<String>,
}

impl BenchRow {
    /// Label used to group rows in the summary, e.g. `bdcc tau=0.5`.
    pub fn config_label(&self) -> String {
        match self.tau {
            Some(t) => format!("{} tau={}", self.solver, format_real(t)),
            None => self.solver.clone(),
        }
    }

    pub fn time_to_gap(&self, timing: Timing) -> &[Option<f64>; 3] {
        match timing {
            Timing::Serial => &self.time_to_gap_serial,
            Timing::Parallel => &self.time_to_gap_parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub time_scale: f64,
}

/// First cumulative time at which `ub − lb ≤ eps`.
pub fn time_to_gap(trace: &BoundsTrace, eps: f64, timing: Timing) -> Option<f64> {
    let mut t = 0.0;
    for r in &trace.records {
        t += r.master_ms
            + match timing {
                Timing::Serial => r.sum_sub_ms,
                Timing::Parallel => r.max_sub_ms,
            };
        if r.ub - r.lb <= eps {
            return Some(t);
        }
    }
    None
}

fn row_from(instance: &str, solver: &str, tau: Option<f64>, res: Result<SolveResult, String>) -> BenchRow {
    match res {
        Ok(r) => {
            let tt = |timing| {
                let mut out = [None; 3];
                for (o, &eps) in out.iter_mut().zip(&EPSILONS) {
                    *o = time_to_gap(&r.trace, eps, timing);
                }
                out
            };
            let last = r.trace.records.last();
            BenchRow {
                instance: instance.to_string(),
                solver: solver.to_string(),
                tau,
                status: r.status.as_str().to_string(),
                cost: r.cost,
                lower_bound: r.lower_bound,
                gap: r.gap(),
                iterations: r.iterations,
                rows_std: last.map_or(0, |l| l.rows_std),
                rows_mwr: last.map_or(0, |l| l.rows_mwr),
                serial_ms: r.trace.serial_total_ms(),
                parallel_ms: r.trace.parallel_total_ms(),
                time_to_gap_serial: if r.trace.records.is_empty() { [Some(0.0); 3] } else { tt(Timing::Serial) },
                time_to_gap_parallel: if r.trace.records.is_empty() { [Some(0.0); 3] } else { tt(Timing::Parallel) },
                error: None,
            }
        }
        Err(e) => BenchRow {
            instance: instance.to_string(),
            solver: solver.to_string(),
            tau,
            status: "error".into(),
            cost: f64::NAN,
            lower_bound: f64::NAN,
            gap: f64::NAN,
            iterations: 0,
            rows_std: 0,
            rows_mwr: 0,
            serial_ms: 0.0,
            parallel_ms: 0.0,
            time_to_gap_serial: [None; 3],
            time_to_gap_parallel: [None; 3],
            error: Some(e),
        },
    }
}

fn bench_instance(name: &str, inst: &Instance, cfg: &BenchConfig) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for &tau in &cfg.taus {
        let solver = SolverConfig { tau, ..cfg.solver.clone() };
        rows.push(row_from(name, "bdcc", Some(tau), bdcc(inst, &solver).map_err(|e| e.to_string())));
    }
    if cfg.include_baseline {
        let res = solve_baseline(inst, &cfg.solver).map(|b| b.result).map_err(|e| e.to_string());
        rows.push(row_from(name, "baseline", None, res));
    }
    rows
}

pub fn run_bench(instances: &[(String, Instance)], cfg: &BenchConfig) -> BenchReport {
    let workers = cfg.workers.clamp(1, instances.len().max(1));
    let mut per_instance: Vec<Vec<BenchRow>> = vec![Vec::new(); instances.len()];
    if workers == 1 {
        for (slot, (name, inst)) in per_instance.iter_mut().zip(instances) {
            *slot = bench_instance(name, inst, cfg);
        }
    } else {
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    scope.spawn(|| {
                        let mut done = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            if i >= instances.len() {
                                break;
                            }
                            let (name, inst) = &instances[i];
                            done.push((i, bench_instance(name, inst, cfg)));
                        }
                        done
                    })
                })
                .collect();
            for h in handles {
                for (i, rows) in h.join().expect("bench worker panicked") {
                    per_instance[i] = rows;
                }
            }
        });
    }
    BenchReport { rows: per_instance.into_iter().flatten().collect(), time_scale: cfg.time_scale }
}

pub const REPORT_HEADER: &str =
    "instance,solver,tau,status,cost,lb,gap,iterations,rows_std,rows_mwr,serial_ms,parallel_ms,\
ttg_serial_0.1,ttg_serial_1,ttg_serial_10,ttg_parallel_0.1,ttg_parallel_1,ttg_parallel_10";

fn opt(v: Option<f64>) -> String {
    v.map(format_real).unwrap_or_default()
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            let mut fields = vec![
                r.instance.clone(),
                r.solver.clone(),
                opt(r.tau),
                r.status.clone(),
                format_real(r.cost),
                format_real(r.lower_bound),
                format_real(r.gap),
                r.iterations.to_string(),
                r.rows_std.to_string(),
                r.rows_mwr.to_string(),
                format_real(r.serial_ms),
                format_real(r.parallel_ms),
            ];
            fields.extend(r.time_to_gap_serial.iter().map(|&v| opt(v)));
            fields.extend(r.time_to_gap_parallel.iter().map(|&v| opt(v)));
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    /// Distinct configuration labels in first-appearance order.
    pub fn configs(&self) -> Vec<String> {
        let mut seen: Vec<String> = Vec::new();
        for r in &self.rows {
            let l = r.config_label();
            if !seen.contains(&l) {
                seen.push(l);
            }
        }
        seen
    }

    /// Percentage of instances of `config` whose gap reached `eps` within
    /// each scaled checkpoint.
    pub fn percentages(&self, config: &str, timing: Timing, eps_index: usize) -> [f64; 4] {
        let rows: Vec<&BenchRow> = self.rows.iter().filter(|r| r.config_label() == config).collect();
        let mut out = [0.0; 4];
        if rows.is_empty() {
            return out;
        }
        for (o, &c) in out.iter_mut().zip(&CHECKPOINTS_S) {
            let limit_ms = c * self.time_scale * 1e3;
            let hits = rows.iter().filter(|r| r.time_to_gap(timing)[eps_index].is_some_and(|t| t <= limit_ms)).count();
            *o = 100.0 * hits as f64 / rows.len() as f64;
        }
        out
    }

    /// One line per (configuration, timing model, epsilon) with the
    /// percentage of solved instances at each checkpoint.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("config,timing,eps");
        for c in CHECKPOINTS_S {
            out.push_str(&format!(",{}s", format_real(c * self.time_scale)));
        }
        out.push('\n');
        for config in self.configs() {
            for timing in [Timing::Serial, Timing::Parallel] {
                for (e, &eps) in EPSILONS.iter().enumerate() {
                    let p = self.percentages(&config, timing, e);
                    out.push_str(&format!("{config},{},{}", timing.as_str(), format_real(eps)));
                    for v in p {
                        out.push_str(&format!(",{}", format_real(v)));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::t1;

    #[test]
    fn empty_bench_has_header_only() {
        let r = run_bench(&[], &BenchConfig::default());
        assert!(r.rows.is_empty());
        assert_eq!(r.to_csv(), format!("{REPORT_HEADER}\n"));
    }

    #[test]
    fn row_accounting() {
        let cfg = BenchConfig { taus: vec![0.0, 0.5], ..Default::default() };
        let r = run_bench(&[("t1".into(), t1())], &cfg);
        assert_eq!(r.rows.len(), 3);
        assert_eq!(r.rows.iter().filter(|x| x.solver == "bdcc").count(), 2);
        assert_eq!(r.rows[2].solver, "baseline");
        for row in &r.rows {
            assert!(row.parallel_ms <= row.serial_ms);
            assert_eq!(row.status, "optimal");
        }
        let s = r.summary_csv();
        assert_eq!(s.lines().count(), 1 + 3 * 2 * 3);
    }
}
