//! The greedy list scheduler, the cost-oblivious fastest-finish baseline,
//! per-instance timelines with insertion-based placement, and schedule
//! validation against the full constraint set.

use serde::Serialize;

use crate::budget::BudgetPlan;
use crate::dag::ExtendedDag;
use crate::money::Money;
use crate::platform::{exec_cost, running_time, VmCatalog};

#[derive(Debug, thiserror::Error)]
pub enum ScheduleError {
    #[error("job `{0}` fits no vm instance in the pool")]
    NoEligibleVm(String),
    #[error("job `{job}` cannot afford any eligible vm with {available} available")]
    NoAffordableVm { job: String, available: Money },
    #[error("priority order must cover every real job exactly once")]
    BadPriorityOrder,
    #[error("predecessor `{pred}` of `{job}` not scheduled before it")]
    PredecessorNotScheduled { job: String, pred: String },
    #[error(transparent)]
    Budget(#[from] Box<crate::budget::BudgetError>),
}

/// Occupied intervals per VM instance, kept sorted by start slot.
#[derive(Debug, Clone)]
pub struct Timeline {
    busy: Vec<Vec<(u64, u64)>>,
}

impl Timeline {
    pub fn new(instances: usize) -> Self {
        Timeline { busy: vec![Vec::new(); instances] }
    }

    /// Smallest start `t >= ready` such that `[t, t + duration)` fits in
    /// a gap of the instance's timeline. The slot after the last interval
    /// always works, so a start always exists.
    pub fn earliest_fit(&self, instance: usize, ready: u64, duration: u64) -> u64 {
        let mut t = ready;
        for &(start, finish) in &self.busy[instance] {
            if t + duration <= start {
                break;
            }
            if finish > t {
                t = finish;
            }
        }
        t
    }

    pub fn occupy(&mut self, instance: usize, start: u64, duration: u64) {
        debug_assert!(duration > 0);
        let iv = (start, start + duration);
        let row = &mut self.busy[instance];
        let pos = row.partition_point(|&(s, _)| s < iv.0);
        debug_assert!(pos == 0 || row[pos - 1].1 <= iv.0);
        debug_assert!(pos == row.len() || iv.1 <= row[pos].0);
        row.insert(pos, iv);
    }

    pub fn intervals(&self, instance: usize) -> &[(u64, u64)] {
        &self.busy[instance]
    }
}

/// One placed job.
#[derive(Debug, Clone, Serialize)]
pub struct Assignment {
    pub job: usize,
    pub instance: usize,
    pub start: u64,
    pub finish: u64,
    pub cost: Money,
    /// Budget available when the job was placed (reserve + balance);
    /// absent for unbudgeted runs.
    pub budget: Option<Money>,
    /// Remaining balance right after the placement.
    pub saved: Option<Money>,
}

/// A complete placement of all real jobs.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub algorithm: String,
    /// Jobs in the order they were placed.
    pub order: Vec<usize>,
    /// Assignment per job index; pseudo jobs stay `None`.
    pub assignments: Vec<Option<Assignment>>,
    pub makespan: u64,
    pub total_cost: Money,
}

impl Schedule {
    pub fn assignment(&self, job: usize) -> Option<&Assignment> {
        self.assignments.get(job).and_then(|a| a.as_ref())
    }

    /// Table form mirroring the per-job budget/cost/saved/start/finish/vm
    /// layout, rows in placement order.
    pub fn to_csv(&self, ext: &ExtendedDag, catalog: &VmCatalog) -> String {
        let mut out = String::from("job,budget,cost,saved,start,finish,vm\n");
        for &j in &self.order {
            let a = self.assignments[j].as_ref().expect("ordered job must be assigned");
            let fmt_opt = |m: &Option<Money>| m.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                ext.dag.job(j).name,
                fmt_opt(&a.budget),
                a.cost,
                fmt_opt(&a.saved),
                a.start,
                a.finish,
                catalog.instances()[a.instance].name,
            ));
        }
        out
    }

    pub fn to_json(&self, ext: &ExtendedDag, catalog: &VmCatalog) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .order
            .iter()
            .map(|&j| {
                let a = self.assignments[j].as_ref().unwrap();
                serde_json::json!({
                    "job": ext.dag.job(j).name,
                    "budget": a.budget.map(Money::to_f64),
                    "cost": a.cost.to_f64(),
                    "saved": a.saved.map(Money::to_f64),
                    "start": a.start,
                    "finish": a.finish,
                    "vm": catalog.instances()[a.instance].name,
                })
            })
            .collect();
        serde_json::json!({
            "algorithm": self.algorithm,
            "makespan": self.makespan,
            "total_cost": self.total_cost.to_f64(),
            "rows": rows,
        })
    }
}

/// Earliest slot at which every predecessor has finished.
fn ready_slot(
    ext: &ExtendedDag,
    assignments: &[Option<Assignment>],
    job: usize,
) -> Result<u64, ScheduleError> {
    let mut ready = 0;
    for &p in ext.dag.predecessors(job).expect("validated dag") {
        if ext.is_pseudo(p) {
            continue;
        }
        match &assignments[p] {
            Some(a) => ready = ready.max(a.finish),
            None => {
                return Err(ScheduleError::PredecessorNotScheduled {
                    job: ext.dag.job(job).name.clone(),
                    pred: ext.dag.job(p).name.clone(),
                })
            }
        }
    }
    Ok(ready)
}

/// Greedy budgeted list scheduling: walk the priority order and place
/// each job on the eligible instance that finishes it earliest among
/// those its budget (reserve plus rolled-over balance) can pay for.
/// Finish ties prefer the cheaper type, then the lower instance index.
/// Unspent reserve rolls into the shared balance for later jobs.
pub fn schedule_greedy(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    mut plan: BudgetPlan,
    order: &[usize],
    algorithm: impl Into<String>,
) -> Result<Schedule, ScheduleError> {
    let real = ext.real_jobs();
    {
        let mut seen = vec![false; ext.dag.job_count()];
        for &j in order {
            if j >= seen.len() || ext.is_pseudo(j) || std::mem::replace(&mut seen[j], true) {
                return Err(ScheduleError::BadPriorityOrder);
            }
        }
        if order.len() != real.len() {
            return Err(ScheduleError::BadPriorityOrder);
        }
    }

    let mut timeline = Timeline::new(catalog.instances().len());
    let mut assignments: Vec<Option<Assignment>> = vec![None; ext.dag.job_count()];
    let mut total_cost = Money::ZERO;
    for &j in order {
        let job = ext.dag.job(j);
        let ready = ready_slot(ext, &assignments, j)?;
        let available = plan.available(j);
        let eligible = catalog.eligible_instances(job);
        if eligible.is_empty() {
            return Err(ScheduleError::NoEligibleVm(job.name.clone()));
        }
        let mut best: Option<(u64, Money, usize, u64)> = None; // finish, cost, instance, start
        for inst in eligible {
            let vm = catalog.instance_type(inst);
            let cost = exec_cost(job, vm);
            if cost > available {
                continue;
            }
            let duration = running_time(job, vm);
            let start = timeline.earliest_fit(inst, ready, duration);
            let finish = start + duration;
            let cand = (finish, cost, inst, start);
            if best.as_ref().is_none_or(|b| (cand.0, cand.1, cand.2) < (b.0, b.1, b.2)) {
                best = Some(cand);
            }
        }
        let (finish, cost, inst, start) =
            best.ok_or(ScheduleError::NoAffordableVm { job: job.name.clone(), available })?;
        plan.consume(ext, j, cost).map_err(Box::new)?;
        timeline.occupy(inst, start, finish - start);
        total_cost += cost;
        assignments[j] = Some(Assignment {
            job: j,
            instance: inst,
            start,
            finish,
            cost,
            budget: Some(available),
            saved: Some(plan.remain()),
        });
    }
    let makespan = assignments.iter().flatten().map(|a| a.finish).max().unwrap_or(0);
    Ok(Schedule {
        algorithm: algorithm.into(),
        order: order.to_vec(),
        assignments,
        makespan,
        total_cost,
    })
}

/// Cost-oblivious baseline: plain upward-rank order, every job on the
/// eligible instance with the earliest insertion-based finish time. Its
/// cost serves as the upper budget endpoint for the experiment grid.
pub fn schedule_fastest_finish(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
) -> Result<Schedule, ScheduleError> {
    let ranking = crate::ranking::rank_jobs(ext, catalog, false)
        .map_err(|e| schedule_error_from_ranking(ext, e))?;
    let mut timeline = Timeline::new(catalog.instances().len());
    let mut assignments: Vec<Option<Assignment>> = vec![None; ext.dag.job_count()];
    let mut total_cost = Money::ZERO;
    for &j in &ranking.order {
        let job = ext.dag.job(j);
        let ready = ready_slot(ext, &assignments, j)?;
        let eligible = catalog.eligible_instances(job);
        if eligible.is_empty() {
            return Err(ScheduleError::NoEligibleVm(job.name.clone()));
        }
        let mut best: Option<(u64, Money, usize, u64)> = None;
        for inst in eligible {
            let vm = catalog.instance_type(inst);
            let duration = running_time(job, vm);
            let start = timeline.earliest_fit(inst, ready, duration);
            let cand = (start + duration, exec_cost(job, vm), inst, start);
            if best.as_ref().is_none_or(|b| (cand.0, cand.1, cand.2) < (b.0, b.1, b.2)) {
                best = Some(cand);
            }
        }
        let (finish, cost, inst, start) = best.expect("non-empty eligible set");
        timeline.occupy(inst, start, finish - start);
        total_cost += cost;
        assignments[j] = Some(Assignment {
            job: j,
            instance: inst,
            start,
            finish,
            cost,
            budget: None,
            saved: None,
        });
    }
    let makespan = assignments.iter().flatten().map(|a| a.finish).max().unwrap_or(0);
    Ok(Schedule {
        algorithm: "fastest-finish".into(),
        order: ranking.order,
        assignments,
        makespan,
        total_cost,
    })
}

fn schedule_error_from_ranking(ext: &ExtendedDag, e: crate::ranking::RankingError) -> ScheduleError {
    match e {
        crate::ranking::RankingError::Unschedulable(name) => ScheduleError::NoEligibleVm(name),
        other => ScheduleError::NoEligibleVm(format!("{}: {other}", ext.dag.job(ext.entry).name)),
    }
}

/// A broken constraint found by [`validate_schedule`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MissingAssignment { job: String },
    IneligibleVm { job: String, vm: String },
    WrongDuration { job: String, expected: u64, actual: u64 },
    PrecedenceBroken { job: String, pred: String },
    Overlap { vm: String, first: String, second: String },
    MakespanMismatch { recorded: u64, actual: u64 },
    CostMismatch { job: String },
    BudgetExceeded { cost: Money, budget: Money },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::MissingAssignment { job } => write!(f, "job `{job}` is not assigned"),
            Violation::IneligibleVm { job, vm } => {
                write!(f, "job `{job}` placed on ineligible vm `{vm}`")
            }
            Violation::WrongDuration { job, expected, actual } => {
                write!(f, "job `{job}` runs {actual} slots, expected {expected}")
            }
            Violation::PrecedenceBroken { job, pred } => {
                write!(f, "job `{job}` starts before predecessor `{pred}` finishes")
            }
            Violation::Overlap { vm, first, second } => {
                write!(f, "vm `{vm}` runs `{first}` and `{second}` at the same time")
            }
            Violation::MakespanMismatch { recorded, actual } => {
                write!(f, "recorded makespan {recorded} but intervals end at {actual}")
            }
            Violation::CostMismatch { job } => {
                write!(f, "job `{job}` cost does not match its vm price and runtime")
            }
            Violation::BudgetExceeded { cost, budget } => {
                write!(f, "total cost {cost} exceeds budget {budget}")
            }
        }
    }
}

/// Checks a schedule against the whole constraint set: full assignment,
/// CPU/memory eligibility, exact durations and costs, precedence,
/// instance exclusivity, makespan consistency and the budget cap.
/// Returns every violation found rather than stopping at the first.
pub fn validate_schedule(
    schedule: &Schedule,
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    budget: Option<Money>,
) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut max_finish = 0u64;
    let mut cost_sum = Money::ZERO;
    for j in ext.real_jobs() {
        let job = ext.dag.job(j);
        let Some(a) = schedule.assignment(j) else {
            violations.push(Violation::MissingAssignment { job: job.name.clone() });
            continue;
        };
        let vm = catalog.instance_type(a.instance);
        if !vm.fits(job) {
            violations
                .push(Violation::IneligibleVm { job: job.name.clone(), vm: vm.name.clone() });
        }
        let expected = running_time(job, vm);
        if a.finish - a.start != expected {
            violations.push(Violation::WrongDuration {
                job: job.name.clone(),
                expected,
                actual: a.finish - a.start,
            });
        }
        if a.cost != exec_cost(job, vm) {
            violations.push(Violation::CostMismatch { job: job.name.clone() });
        }
        for &p in ext.dag.predecessors(j).expect("validated dag") {
            if ext.is_pseudo(p) {
                continue;
            }
            match schedule.assignment(p) {
                Some(pa) if a.start < pa.finish => violations.push(Violation::PrecedenceBroken {
                    job: job.name.clone(),
                    pred: ext.dag.job(p).name.clone(),
                }),
                Some(_) => {}
                None => {} // already reported as missing
            }
        }
        max_finish = max_finish.max(a.finish);
        cost_sum += a.cost;
    }

    let mut per_instance: Vec<Vec<(u64, u64, usize)>> =
        vec![Vec::new(); catalog.instances().len()];
    for j in ext.real_jobs() {
        if let Some(a) = schedule.assignment(j) {
            per_instance[a.instance].push((a.start, a.finish, j));
        }
    }
    for (inst, spans) in per_instance.iter_mut().enumerate() {
        spans.sort_unstable();
        for w in spans.windows(2) {
            if w[1].0 < w[0].1 {
                violations.push(Violation::Overlap {
                    vm: catalog.instances()[inst].name.clone(),
                    first: ext.dag.job(w[0].2).name.clone(),
                    second: ext.dag.job(w[1].2).name.clone(),
                });
            }
        }
    }

    if schedule.makespan != max_finish {
        violations.push(Violation::MakespanMismatch {
            recorded: schedule.makespan,
            actual: max_finish,
        });
    }
    if let Some(d) = budget {
        if cost_sum > d {
            violations.push(Violation::BudgetExceeded { cost: cost_sum, budget: d });
        }
    }
    violations
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::split_uniform;
    use crate::dag::{merge_workflows, Job, WorkflowDag};
    use crate::platform::VmType;
    use crate::ranking::rank_jobs;

    fn one_type_catalog(instances: usize, vcpus: u32, price: i64) -> VmCatalog {
        let mut cat =
            VmCatalog::new(vec![VmType::new("m", vcpus, 64.0, Money::from_int(price))]).unwrap();
        for i in 0..instances {
            cat.add_instance(format!("m{i}"), "m").unwrap();
        }
        cat
    }

    #[test]
    fn earliest_fit_cases() {
        let mut tl = Timeline::new(1);
        assert_eq!(tl.earliest_fit(0, 0, 5), 0);
        tl.occupy(0, 0, 7);
        assert_eq!(tl.earliest_fit(0, 0, 5), 7);
        let mut tl2 = Timeline::new(1);
        tl2.occupy(0, 0, 5);
        tl2.occupy(0, 20, 5);
        // oracle: scan every start slot and take the first that fits
        let fits = |t: u64| {
            let iv = (t, t + 5);
            iv.0 >= 6 && [(0u64, 5u64), (20, 25)].iter().all(|&(s, f)| iv.1 <= s || iv.0 >= f)
        };
        let expected = (0..100).find(|&t| fits(t)).unwrap();
        assert_eq!(tl2.earliest_fit(0, 6, 5), expected);
        assert_eq!(expected, 6);
    }

    #[test]
    fn single_job_single_vm() {
        let cat = one_type_catalog(1, 1, 4);
        let mut dag = WorkflowDag::new();
        dag.add_job(Job::new("a", 1, 1.0, 3.0)).unwrap();
        let ext = merge_workflows(&[dag]).unwrap();
        let plan = split_uniform(&ext, &cat, Money::from_int(100)).unwrap();
        let order = rank_jobs(&ext, &cat, false).unwrap().order;
        let s = schedule_greedy(&ext, &cat, plan, &order, "greedy").unwrap();
        let a = s.assignment(ext.dag.index_of("a").unwrap()).unwrap();
        assert_eq!((a.start, a.finish), (0, 3));
        assert_eq!(s.makespan, 3);
        assert_eq!(s.total_cost, Money::from_int(12));
        assert!(validate_schedule(&s, &ext, &cat, Some(Money::from_int(100))).is_empty());
    }

    #[test]
    fn independent_jobs_run_in_parallel_on_twin_vms() {
        let cat = one_type_catalog(2, 1, 1);
        let mut dag = WorkflowDag::new();
        dag.add_job(Job::new("a", 1, 1.0, 5.0)).unwrap();
        dag.add_job(Job::new("b", 1, 1.0, 3.0)).unwrap();
        let ext = merge_workflows(&[dag]).unwrap();
        let s = schedule_fastest_finish(&ext, &cat).unwrap();
        assert_eq!(s.makespan, 5);
        assert!(validate_schedule(&s, &ext, &cat, None).is_empty());
    }

    #[test]
    fn greedy_respects_the_budget_cap() {
        let mut cat = VmCatalog::new(vec![
            VmType::new("slow", 1, 64.0, Money::from_int(1)),
            VmType::new("fast", 8, 64.0, Money::from_int(9)),
        ])
        .unwrap();
        cat.add_instance("s0", "slow").unwrap();
        cat.add_instance("f0", "fast").unwrap();
        let mut dag = WorkflowDag::new();
        for n in ["a", "b", "c"] {
            dag.add_job(Job::new(n, 1, 1.0, 8.0)).unwrap();
        }
        let ext = merge_workflows(&[dag]).unwrap();
        let d_min = crate::budget::total_min_budget(&ext, &cat).unwrap();
        for extra in [0i64, 5, 50] {
            let budget = d_min + Money::from_int(extra);
            let plan = split_uniform(&ext, &cat, budget).unwrap();
            let order = rank_jobs(&ext, &cat, false).unwrap().order;
            let s = schedule_greedy(&ext, &cat, plan, &order, "greedy").unwrap();
            assert!(s.total_cost <= budget);
            assert!(validate_schedule(&s, &ext, &cat, Some(budget)).is_empty());
        }
    }

    #[test]
    fn validator_flags_overlap_and_precedence() {
        let cat = one_type_catalog(1, 1, 1);
        let mut dag = WorkflowDag::new();
        dag.add_job(Job::new("a", 1, 1.0, 5.0)).unwrap();
        dag.add_job(Job::new("b", 1, 1.0, 5.0)).unwrap();
        dag.add_dependency(1, 0).unwrap();
        let ext = merge_workflows(&[dag]).unwrap();
        let mk = |start_b: u64| Schedule {
            algorithm: "bogus".into(),
            order: vec![0, 1],
            assignments: vec![
                Some(Assignment {
                    job: 0,
                    instance: 0,
                    start: 0,
                    finish: 5,
                    cost: Money::from_int(5),
                    budget: None,
                    saved: None,
                }),
                Some(Assignment {
                    job: 1,
                    instance: 0,
                    start: start_b,
                    finish: start_b + 5,
                    cost: Money::from_int(5),
                    budget: None,
                    saved: None,
                }),
                None,
                None,
            ],
            makespan: start_b + 5,
            total_cost: Money::from_int(10),
        };
        let bad = mk(3); // starts before its parent finishes, on the same vm
        let violations = validate_schedule(&bad, &ext, &cat, None);
        assert!(violations.iter().any(|v| matches!(v, Violation::PrecedenceBroken { .. })));
        assert!(violations.iter().any(|v| matches!(v, Violation::Overlap { .. })));
        let good = mk(5);
        assert!(validate_schedule(&good, &ext, &cat, None).is_empty());
    }

    #[test]
    fn identical_inputs_give_identical_schedules() {
        let cat = one_type_catalog(3, 2, 2);
        let mut dag = WorkflowDag::new();
        for n in 0..6 {
            dag.add_job(Job::new(format!("j{n}"), 1, 1.0, (n + 3) as f64)).unwrap();
        }
        dag.add_dependency(2, 0).unwrap();
        dag.add_dependency(3, 1).unwrap();
        dag.add_dependency(4, 2).unwrap();
        dag.add_dependency(5, 3).unwrap();
        let ext = merge_workflows(&[dag]).unwrap();
        let budget = crate::budget::total_min_budget(&ext, &cat).unwrap() + Money::from_int(9);
        let order = rank_jobs(&ext, &cat, false).unwrap().order;
        let run = || {
            let plan = split_uniform(&ext, &cat, budget).unwrap();
            schedule_greedy(&ext, &cat, plan, &order, "greedy").unwrap()
        };
        let (s1, s2) = (run(), run());
        assert_eq!(s1.to_csv(&ext, &cat), s2.to_csv(&ext, &cat));
    }
}
