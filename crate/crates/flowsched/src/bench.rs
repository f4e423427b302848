//! Benchmark harness: runs the (workload x sufficiency x budget-level x
//! algorithm) matrix, validates every schedule, and aggregates
//! normalized makespans, success rates and average-rank scores.
//!
//! Pools are seeded per (workload, sufficiency) so all budget levels of
//! one series share the same instances, and reruns with the same seed
//! reproduce the matrix byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::budget::{budget_levels, split, SplitMode};
use crate::dag::{merge_workflows, WorkflowDag};
use crate::money::Money;
use crate::platform::VmType;
use crate::ranking::{
    plain_upward_ranks, priority_list, stationary_distribution, weighted_upward_ranks,
    TransitionMatrix,
};
use crate::scheduler::{schedule_greedy, validate_schedule};
use crate::workloads::{gen_vm_pool, Sufficiency};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("cannot compute an average rank over zero cases")]
    NoCases,
    #[error(transparent)]
    Dag(#[from] crate::dag::DagError),
    #[error(transparent)]
    Workload(#[from] crate::workloads::WorkloadError),
}

/// One scheduling policy under test: a priority scheme plus a spare
/// budget splitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Algorithm {
    pub weighted: bool,
    pub split: SplitMode,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm { weighted: false, split: SplitMode::Uniform },
        Algorithm { weighted: true, split: SplitMode::Uniform },
        Algorithm { weighted: false, split: SplitMode::Proportional },
        Algorithm { weighted: true, split: SplitMode::Proportional },
    ];

    pub fn label(&self) -> String {
        format!("{}-{}", if self.weighted { "weighted" } else { "plain" }, self.split)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (prio, split) = s
            .split_once('-')
            .ok_or_else(|| format!("expected <plain|weighted>-<uniform|proportional>, got `{s}`"))?;
        let weighted = match prio {
            "plain" => false,
            "weighted" => true,
            other => return Err(format!("unknown priority scheme `{other}`")),
        };
        Ok(Algorithm { weighted, split: split.parse()? })
    }
}

/// A named workflow entering the matrix.
#[derive(Debug, Clone)]
pub struct NamedWorkload {
    pub name: String,
    pub dag: WorkflowDag,
}

/// The full experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub workloads: Vec<NamedWorkload>,
    pub vm_types: Vec<VmType>,
    pub sufficiencies: Vec<Sufficiency>,
    pub phi_grid: Vec<Money>,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
}

/// Outcome of one (workload, sufficiency, phi, algorithm) cell.
#[derive(Debug, Clone)]
pub struct CellRecord {
    pub workload: String,
    pub sufficiency: Sufficiency,
    pub phi: Money,
    pub algorithm: String,
    pub budget: Money,
    pub success: bool,
    pub makespan: Option<u64>,
    pub normalized: Option<f64>,
    pub cost: Option<Money>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct MatrixResult {
    pub records: Vec<CellRecord>,
}

/// Stable seed derivation so each (workload, sufficiency) series draws
/// its own pool independent of iteration order. FNV-1a over the parts.
pub fn derive_seed(base: u64, parts: &[&str]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ base.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    for part in parts {
        for b in part.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Runs every cell of the matrix. Per-cell failures are recorded as
/// unsuccessful rows; they never abort the rest of the matrix.
pub fn run_matrix(spec: &ExperimentSpec) -> Result<MatrixResult, BenchError> {
    let mut records = Vec::new();
    for wl in &spec.workloads {
        let ext = merge_workflows(&[wl.dag.clone()])?;
        // the stationary vector depends only on the topology, not on the
        // pool, so one solve covers every sufficiency level
        let pi: Result<Vec<f64>, String> = TransitionMatrix::from_extended(&ext)
            .and_then(|p| stationary_distribution(&p))
            .map_err(|e| e.to_string());
        for &suff in &spec.sufficiencies {
            let pool_seed = derive_seed(spec.seed, &[&wl.name, &suff.to_string()]);
            let pool =
                gen_vm_pool(&spec.vm_types, ext.real_job_count(), suff, pool_seed)?;
            // budget endpoints and both rankings are fixed per series
            let levels = budget_levels(&ext, &pool);
            let plain = plain_upward_ranks(&ext, &pool)
                .map(|r| priority_list(&ext, &r))
                .map_err(|e| e.to_string());
            let weighted = pi.clone().and_then(|pi| {
                weighted_upward_ranks(&ext, &pool, &pi)
                    .map(|r| priority_list(&ext, &r))
                    .map_err(|e| e.to_string())
            });
            for &phi in &spec.phi_grid {
                let mut cell: Vec<CellRecord> = Vec::new();
                for algo in &spec.algorithms {
                    let mut record = CellRecord {
                        workload: wl.name.clone(),
                        sufficiency: suff,
                        phi,
                        algorithm: algo.label(),
                        budget: Money::ZERO,
                        success: false,
                        makespan: None,
                        normalized: None,
                        cost: None,
                        error: None,
                    };
                    let outcome = (|| -> Result<(), String> {
                        let levels = levels.as_ref().map_err(|e| e.to_string())?;
                        let budget = levels.level(phi);
                        record.budget = budget;
                        let order = if algo.weighted { &weighted } else { &plain };
                        let order = order.as_ref().map_err(|e| e.clone())?;
                        let plan = split(&ext, &pool, budget, algo.split)
                            .map_err(|e| e.to_string())?;
                        let schedule =
                            schedule_greedy(&ext, &pool, plan, order, algo.label())
                                .map_err(|e| e.to_string())?;
                        let violations =
                            validate_schedule(&schedule, &ext, &pool, Some(budget));
                        if let Some(v) = violations.first() {
                            return Err(v.to_string());
                        }
                        record.makespan = Some(schedule.makespan);
                        record.cost = Some(schedule.total_cost);
                        record.success = true;
                        Ok(())
                    })();
                    if let Err(msg) = outcome {
                        record.error = Some(msg);
                    }
                    cell.push(record);
                }
                if let Some(best) = cell.iter().filter_map(|r| r.makespan).min() {
                    for r in &mut cell {
                        r.normalized = r.makespan.map(|m| m as f64 / best as f64);
                    }
                }
                records.append(&mut cell);
            }
        }
    }
    records.sort_by(|a, b| {
        (&a.workload, a.sufficiency, a.phi, &a.algorithm)
            .cmp(&(&b.workload, b.sufficiency, b.phi, &b.algorithm))
    });
    Ok(MatrixResult { records })
}

/// Average ranked value: (R1 + 2 R2 + 3 R3 + 4 R4) / cases. Lower is
/// better; 1.0 means first place in every case.
pub fn compute_ar(rank_counts: [u64; 4], n_cases: u64) -> Result<f64, BenchError> {
    if n_cases == 0 {
        return Err(BenchError::NoCases);
    }
    let weighted: u64 = rank_counts.iter().zip(1u64..).map(|(&c, w)| c * w).sum();
    Ok(weighted as f64 / n_cases as f64)
}

/// Per-algorithm rank counts over the given records. Within each cell
/// algorithms are ordered by makespan; ties share the best applicable
/// rank and the following ranks are skipped. Unsuccessful runs are not
/// ranked. Returns (counts per algorithm, number of cells).
pub fn rank_counts(records: &[CellRecord]) -> (BTreeMap<String, [u64; 4]>, u64) {
    let mut cells: BTreeMap<(String, Sufficiency, Money), Vec<&CellRecord>> = BTreeMap::new();
    let mut algorithms: BTreeMap<String, [u64; 4]> = BTreeMap::new();
    for r in records {
        algorithms.entry(r.algorithm.clone()).or_default();
        cells
            .entry((r.workload.clone(), r.sufficiency, r.phi))
            .or_default()
            .push(r);
    }
    for members in cells.values() {
        let mut ranked: Vec<(&String, u64)> = members
            .iter()
            .filter_map(|r| r.makespan.map(|m| (&r.algorithm, m)))
            .collect();
        ranked.sort_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(b.0)));
        for (i, &(algo, makespan)) in ranked.iter().enumerate() {
            // tied makespans share the rank of the first of the group
            let rank = 1 + ranked.iter().take(i).filter(|&&(_, m)| m < makespan).count();
            if rank <= 4 {
                algorithms.get_mut(algo).expect("registered algorithm")[rank - 1] += 1;
            }
        }
    }
    (algorithms, cells.len() as u64)
}

/// CSV with one row per cell-algorithm pair; reruns with identical
/// seeds produce byte-identical output.
pub fn report_csv(result: &MatrixResult) -> String {
    let mut out =
        String::from("workload,sufficiency,phi,algorithm,budget,success,makespan,normalized_makespan,cost\n");
    for r in &result.records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.workload,
            r.sufficiency,
            r.phi,
            r.algorithm,
            r.budget,
            r.success,
            r.makespan.map(|m| m.to_string()).unwrap_or_default(),
            r.normalized.map(|n| format!("{n:.6}")).unwrap_or_default(),
            r.cost.map(|c| c.to_string()).unwrap_or_default(),
        )
        .unwrap();
    }
    out
}

/// Human-readable summary: per-workload and combined average-rank
/// tables (rows ascending by AR) plus success rates.
pub fn report_text(result: &MatrixResult) -> String {
    let mut out = String::new();
    let mut groups: Vec<(String, Vec<&CellRecord>)> = Vec::new();
    let mut by_workload: BTreeMap<&str, Vec<&CellRecord>> = BTreeMap::new();
    for r in &result.records {
        by_workload.entry(&r.workload).or_default().push(r);
    }
    for (name, rs) in &by_workload {
        groups.push((format!("workload {name}"), rs.clone()));
    }
    groups.push(("all workloads".to_string(), result.records.iter().collect()));

    for (title, rs) in groups {
        let owned: Vec<CellRecord> = rs.iter().map(|r| (*r).clone()).collect();
        let (counts, n_cases) = rank_counts(&owned);
        writeln!(out, "== {title} ({n_cases} cases)").unwrap();
        writeln!(out, "{:<24} {:>5} {:>5} {:>5} {:>5} {:>7} {:>9}", "algorithm", "R1", "R2", "R3", "R4", "AR", "success").unwrap();
        let mut rows: Vec<(String, [u64; 4], f64, f64)> = Vec::new();
        for (algo, c) in counts {
            let ar = compute_ar(c, n_cases).unwrap_or(f64::NAN);
            let total = owned.iter().filter(|r| r.algorithm == algo).count();
            let ok = owned.iter().filter(|r| r.algorithm == algo && r.success).count();
            let success = if total == 0 { 0.0 } else { ok as f64 / total as f64 };
            rows.push((algo, c, ar, success));
        }
        rows.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
        for (algo, c, ar, success) in rows {
            writeln!(
                out,
                "{:<24} {:>5} {:>5} {:>5} {:>5} {:>7.2} {:>8.0}%",
                algo,
                c[0],
                c[1],
                c[2],
                c[3],
                ar,
                success * 100.0
            )
            .unwrap();
        }
        out.push('\n');
    }
    out
}

/// Fraction of (workload, sufficiency, algorithm) series whose makespan
/// is non-increasing along the budget-level grid.
pub fn monotone_series_fraction(result: &MatrixResult) -> f64 {
    let mut series: BTreeMap<(String, Sufficiency, String), Vec<(Money, Option<u64>)>> =
        BTreeMap::new();
    for r in &result.records {
        series
            .entry((r.workload.clone(), r.sufficiency, r.algorithm.clone()))
            .or_default()
            .push((r.phi, r.makespan));
    }
    if series.is_empty() {
        return 1.0;
    }
    let mut monotone = 0usize;
    for values in series.values_mut() {
        values.sort_by(|a, b| a.0.cmp(&b.0));
        let ok = values.windows(2).all(|w| match (w[0].1, w[1].1) {
            (Some(a), Some(b)) => b <= a,
            _ => false,
        });
        if ok {
            monotone += 1;
        }
    }
    monotone as f64 / series.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workloads::{gen_fft, WorkSampler};

    #[test]
    fn ar_endpoints_and_reference_value() {
        // always first / always last over 75 cases
        assert_eq!(compute_ar([75, 0, 0, 0], 75).unwrap(), 1.0);
        assert_eq!(compute_ar([0, 0, 0, 75], 75).unwrap(), 4.0);
        let ar = compute_ar([64, 9, 2, 0], 75).unwrap();
        assert!((ar - 88.0 / 75.0).abs() < 1e-12);
        assert_eq!(format!("{:.2}", ar), "1.17");
        assert!(matches!(compute_ar([0, 0, 0, 0], 0), Err(BenchError::NoCases)));
    }

    #[test]
    fn ties_share_the_best_rank_and_skip() {
        let mk = |algo: &str, makespan: u64| CellRecord {
            workload: "w".into(),
            sufficiency: Sufficiency::Normal,
            phi: Money::ZERO,
            algorithm: algo.into(),
            budget: Money::ZERO,
            success: true,
            makespan: Some(makespan),
            normalized: None,
            cost: None,
            error: None,
        };
        let records = vec![mk("a", 10), mk("b", 10), mk("c", 12), mk("d", 15)];
        let (counts, n) = rank_counts(&records);
        assert_eq!(n, 1);
        assert_eq!(counts["a"], [1, 0, 0, 0]);
        assert_eq!(counts["b"], [1, 0, 0, 0]);
        assert_eq!(counts["c"], [0, 0, 1, 0]); // rank 2 skipped
        assert_eq!(counts["d"], [0, 0, 0, 1]);
    }

    #[test]
    fn empty_result_is_header_only() {
        let csv = report_csv(&MatrixResult { records: vec![] });
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("workload,sufficiency,phi,algorithm"));
    }

    #[test]
    fn small_matrix_runs_and_normalizes() {
        let spec = ExperimentSpec {
            workloads: vec![NamedWorkload {
                name: "fft4".into(),
                dag: gen_fft(4, &mut WorkSampler::uniform(10, 100, 1)).unwrap(),
            }],
            vm_types: crate::workloads::ec2_types(),
            sufficiencies: vec![Sufficiency::Normal],
            phi_grid: crate::budget::phi_grid(),
            algorithms: Algorithm::ALL.to_vec(),
            seed: 42,
        };
        let result = run_matrix(&spec).unwrap();
        assert_eq!(result.records.len(), 5 * 4);
        for r in &result.records {
            assert!(r.success, "{:?}", r.error);
            assert!(r.normalized.unwrap() >= 1.0);
            assert!(r.cost.unwrap() <= r.budget);
        }
        // exactly one tie-group of normalized 1.0 per cell
        for phi in crate::budget::phi_grid() {
            let best = result
                .records
                .iter()
                .filter(|r| r.phi == phi && r.normalized == Some(1.0))
                .count();
            assert!(best >= 1);
        }
        // determinism: rerun gives byte-identical csv
        let again = run_matrix(&spec).unwrap();
        assert_eq!(report_csv(&result), report_csv(&again));
    }

    #[test]
    fn text_report_orders_rows_by_ascending_ar() {
        let spec = ExperimentSpec {
            workloads: vec![NamedWorkload {
                name: "fft8".into(),
                dag: gen_fft(8, &mut WorkSampler::uniform(10, 100, 2)).unwrap(),
            }],
            vm_types: crate::workloads::ec2_types(),
            sufficiencies: Sufficiency::ALL.to_vec(),
            phi_grid: crate::budget::phi_grid(),
            algorithms: Algorithm::ALL.to_vec(),
            seed: 5,
        };
        let text = report_text(&run_matrix(&spec).unwrap());
        for block in text.split("== ").skip(1) {
            let ars: Vec<f64> = block
                .lines()
                .skip(2)
                .filter(|l| !l.is_empty())
                .map(|l| {
                    let cols: Vec<&str> = l.split_whitespace().collect();
                    cols[cols.len() - 2].parse().unwrap()
                })
                .collect();
            assert!(ars.windows(2).all(|w| w[0] <= w[1]), "{ars:?}\n{block}");
        }
    }
}
