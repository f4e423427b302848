//! Exact formulation of the minimum-makespan problem: binary start
//! variables x_j_k_t (job j starts on VM k at slot t), an integer
//! makespan bound d, and the seven constraint families (assignment,
//! CPU, memory, precedence, exclusivity, makespan link, budget).
//!
//! The model is exported as CPLEX-dialect LP text for external solvers;
//! a pruned exhaustive search doubles as an optimal oracle on desk-sized
//! instances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::dag::ExtendedDag;
use crate::money::Money;
use crate::platform::{exec_cost, running_time, VmCatalog};
use crate::scheduler::{Assignment, Schedule};

#[derive(Debug, thiserror::Error)]
pub enum MipError {
    #[error("horizon {horizon} cannot fit job `{job}` (fastest runtime {fastest})")]
    HorizonTooSmall { horizon: u64, job: String, fastest: u64 },
    #[error("job `{0}` fits no vm instance")]
    NoEligibleVm(String),
    #[error("instance too large for exhaustive search: {what}")]
    TooLarge { what: String },
    #[error("no feasible schedule within budget and horizon")]
    Infeasible,
    #[error("malformed lp text: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Eq => "=",
            Sense::Le => "<=",
            Sense::Ge => ">=",
        }
    }
}

/// One linear constraint; `family` is the equation family tag (1-8)
/// carried in the constraint name prefix.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub family: u8,
    pub terms: Vec<(Money, String)>,
    pub sense: Sense,
    pub rhs: Money,
}

/// The assembled integer program.
#[derive(Debug, Clone)]
pub struct MipModel {
    /// Real jobs, in the order their variable index `j` counts.
    pub jobs: Vec<usize>,
    pub num_vms: usize,
    pub horizon: u64,
    pub constraints: Vec<Constraint>,
    /// Start variables fixed to zero because the run would cross the
    /// horizon (or the VM cannot host the job); emitted in Bounds.
    pub fixed_zero: Vec<String>,
    pub binaries: Vec<String>,
    pub generals: Vec<String>,
}

impl MipModel {
    /// Total declared variables: one binary per (job, vm, slot) plus d.
    pub fn variable_count(&self) -> usize {
        self.binaries.len() + self.generals.len()
    }

    pub fn family_count(&self, family: u8) -> usize {
        self.constraints.iter().filter(|c| c.family == family).count()
    }
}

fn var_name(j: usize, k: usize, t: u64) -> String {
    format!("x_{j}_{k}_{t}")
}

/// Builds the model over all (job, instance, slot) start variables.
///
/// Every variable in the full grid is declared (so the count is always
/// jobs x vms x horizon + 1); starts that would run past the horizon are
/// pinned to zero through bounds rather than dropped.
pub fn build_model(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    budget: Money,
    horizon: u64,
) -> Result<MipModel, MipError> {
    let jobs = ext.real_jobs();
    let num_vms = catalog.instances().len();
    let mut runtimes = vec![vec![0u64; num_vms]; jobs.len()];
    for (ji, &j) in jobs.iter().enumerate() {
        let job = ext.dag.job(j);
        let eligible = catalog.eligible_instances(job);
        if eligible.is_empty() {
            return Err(MipError::NoEligibleVm(job.name.clone()));
        }
        let fastest = eligible
            .iter()
            .map(|&k| running_time(job, catalog.instance_type(k)))
            .min()
            .expect("non-empty");
        if fastest > horizon {
            return Err(MipError::HorizonTooSmall { horizon, job: job.name.clone(), fastest });
        }
        for k in 0..num_vms {
            runtimes[ji][k] = running_time(job, catalog.instance_type(k));
        }
    }

    let mut constraints = Vec::new();
    let mut fixed_zero = Vec::new();
    let mut binaries = Vec::with_capacity(jobs.len() * num_vms * horizon as usize);
    for (ji, &j) in jobs.iter().enumerate() {
        for k in 0..num_vms {
            for t in 0..horizon {
                let name = var_name(ji, k, t);
                if t + runtimes[ji][k] > horizon
                    || !catalog.instance_type(k).fits(ext.dag.job(j))
                {
                    fixed_zero.push(name.clone());
                }
                binaries.push(name);
            }
        }
    }

    // family 1: each job starts exactly once
    for ji in 0..jobs.len() {
        let mut terms = Vec::new();
        for k in 0..num_vms {
            for t in 0..horizon {
                terms.push((Money::from_int(1), var_name(ji, k, t)));
            }
        }
        constraints.push(Constraint {
            name: format!("eq1_{ji}"),
            family: 1,
            terms,
            sense: Sense::Eq,
            rhs: Money::from_int(1),
        });
    }
    // families 2-3: the chosen vm covers the cpu and memory demands
    for (ji, &j) in jobs.iter().enumerate() {
        let job = ext.dag.job(j);
        let mut cpu_terms = Vec::new();
        let mut mem_terms = Vec::new();
        for k in 0..num_vms {
            let vm = catalog.instance_type(k);
            let cpus = Money::from_int(vm.vcpus as i64);
            let mem = Money::from_f64_decimal(vm.mem_gib).expect("catalog memory");
            for t in 0..horizon {
                cpu_terms.push((cpus, var_name(ji, k, t)));
                mem_terms.push((mem, var_name(ji, k, t)));
            }
        }
        constraints.push(Constraint {
            name: format!("eq2_{ji}"),
            family: 2,
            terms: cpu_terms,
            sense: Sense::Ge,
            rhs: Money::from_int(job.cpu as i64),
        });
        constraints.push(Constraint {
            name: format!("eq3_{ji}"),
            family: 3,
            terms: mem_terms,
            sense: Sense::Ge,
            rhs: Money::from_f64_decimal(job.mem_gib).expect("job memory"),
        });
    }
    // family 5: one linear row per dependent pair (the dependency matrix
    // is data, so the product form collapses to plain inequalities)
    let mut pair_no = 0usize;
    for (ci, &child) in jobs.iter().enumerate() {
        for &parent in ext.dag.predecessors(child).expect("validated dag") {
            if ext.is_pseudo(parent) {
                continue;
            }
            let pi = jobs.iter().position(|&x| x == parent).expect("real parent");
            let mut terms = Vec::new();
            for k in 0..num_vms {
                for t in 0..horizon {
                    if t > 0 {
                        terms.push((Money::from_int(t as i64), var_name(ci, k, t)));
                    }
                    terms.push((
                        -Money::from_int((t + runtimes[pi][k]) as i64),
                        var_name(pi, k, t),
                    ));
                }
            }
            constraints.push(Constraint {
                name: format!("eq5_{pair_no}"),
                family: 5,
                terms,
                sense: Sense::Ge,
                rhs: Money::ZERO,
            });
            pair_no += 1;
        }
    }
    // family 6: at most one job occupies a vm in any slot
    for k in 0..num_vms {
        for t in 0..horizon {
            let mut terms = Vec::new();
            for ji in 0..jobs.len() {
                let r = runtimes[ji][k];
                let lo = t.saturating_sub(r.saturating_sub(1));
                for start in lo..=t {
                    terms.push((Money::from_int(1), var_name(ji, k, start)));
                }
            }
            constraints.push(Constraint {
                name: format!("eq6_{k}_{t}"),
                family: 6,
                terms,
                sense: Sense::Le,
                rhs: Money::from_int(1),
            });
        }
    }
    // family 7: every finish time is bounded by d
    for ji in 0..jobs.len() {
        let mut terms = Vec::new();
        for k in 0..num_vms {
            for t in 0..horizon {
                terms.push((Money::from_int((t + runtimes[ji][k]) as i64), var_name(ji, k, t)));
            }
        }
        terms.push((-Money::from_int(1), "d".to_string()));
        constraints.push(Constraint {
            name: format!("eq7_{ji}"),
            family: 7,
            terms,
            sense: Sense::Le,
            rhs: Money::ZERO,
        });
    }
    // family 8: the budget cap
    let mut terms = Vec::new();
    for (ji, &j) in jobs.iter().enumerate() {
        let job = ext.dag.job(j);
        for k in 0..num_vms {
            let cost = exec_cost(job, catalog.instance_type(k));
            for t in 0..horizon {
                terms.push((cost, var_name(ji, k, t)));
            }
        }
    }
    constraints.push(Constraint {
        name: "eq8_0".to_string(),
        family: 8,
        terms,
        sense: Sense::Le,
        rhs: budget,
    });

    Ok(MipModel {
        jobs,
        num_vms,
        horizon,
        constraints,
        fixed_zero,
        binaries,
        generals: vec!["d".to_string()],
    })
}

/// Renders the model as CPLEX-dialect LP text: `Minimize`, `Subject To`,
/// `Bounds`, `Binary`, `Generals`, `End`. Output is deterministic;
/// identical models produce byte-identical text.
pub fn export_lp(model: &MipModel) -> String {
    let mut out = String::new();
    out.push_str("\\ minimum-makespan workflow schedule\n");
    out.push_str("Minimize\n obj: d\nSubject To\n");
    for c in &model.constraints {
        let mut line = format!(" {}:", c.name);
        for (i, (coef, var)) in c.terms.iter().enumerate() {
            let (sign, mag) = if coef.is_negative() { ("-", -*coef) } else { ("+", *coef) };
            if i == 0 && sign == "+" {
                if mag == Money::from_int(1) {
                    write!(line, " {var}").unwrap();
                } else {
                    write!(line, " {mag} {var}").unwrap();
                }
            } else if mag == Money::from_int(1) {
                write!(line, " {sign} {var}").unwrap();
            } else {
                write!(line, " {sign} {mag} {var}").unwrap();
            }
            if line.len() > 480 && i + 1 < c.terms.len() {
                out.push_str(&line);
                out.push('\n');
                line = String::from("   ");
            }
        }
        writeln!(out, "{line} {} {}", c.sense.symbol(), c.rhs).unwrap();
    }
    out.push_str("Bounds\n");
    for v in &model.fixed_zero {
        writeln!(out, " {v} = 0").unwrap();
    }
    out.push_str("Binary\n");
    for v in &model.binaries {
        writeln!(out, " {v}").unwrap();
    }
    out.push_str("Generals\n");
    for v in &model.generals {
        writeln!(out, " {v}").unwrap();
    }
    out.push_str("End\n");
    out
}

/// Section and name counts recovered from LP text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSummary {
    pub variables: BTreeSet<String>,
    pub constraints_per_family: BTreeMap<String, usize>,
    pub bounds_fixed: usize,
}

/// Parses our own LP dialect back into counts; used to check that the
/// exported text structurally matches the model it came from.
pub fn parse_lp(text: &str) -> Result<LpSummary, MipError> {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Objective,
        Constraints,
        Bounds,
        Binary,
        Generals,
        End,
    }
    let mut section = Section::Preamble;
    let mut variables = BTreeSet::new();
    let mut constraints_per_family: BTreeMap<String, usize> = BTreeMap::new();
    let mut bounds_fixed = 0usize;
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line {
            "Minimize" => {
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                section = Section::Constraints;
                continue;
            }
            "Bounds" => {
                section = Section::Bounds;
                continue;
            }
            "Binary" => {
                section = Section::Binary;
                continue;
            }
            "Generals" => {
                section = Section::Generals;
                continue;
            }
            "End" => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Constraints => {
                if let Some((name, _)) = line.split_once(':') {
                    let family = name.split('_').next().unwrap_or(name).to_string();
                    *constraints_per_family.entry(family).or_insert(0) += 1;
                }
            }
            Section::Bounds => bounds_fixed += 1,
            Section::Binary | Section::Generals => {
                variables.insert(line.to_string());
            }
            Section::Objective | Section::Preamble => {}
            Section::End => return Err(MipError::Parse("content after End".into())),
        }
    }
    if section != Section::End {
        return Err(MipError::Parse("missing End marker".into()));
    }
    Ok(LpSummary { variables, constraints_per_family, bounds_fixed })
}

/// Encodes a schedule as an assignment of the model's variables.
pub fn encode_schedule(model: &MipModel, schedule: &Schedule) -> BTreeMap<String, i64> {
    let mut values = BTreeMap::new();
    for (ji, &j) in model.jobs.iter().enumerate() {
        if let Some(a) = schedule.assignment(j) {
            values.insert(var_name(ji, a.instance, a.start), 1);
        }
    }
    values.insert("d".to_string(), schedule.makespan as i64);
    values
}

/// Evaluates every constraint under the given 0/1 assignment (absent
/// variables read as zero); returns the names of violated rows.
pub fn violated_constraints(model: &MipModel, values: &BTreeMap<String, i64>) -> Vec<String> {
    let mut bad = Vec::new();
    for c in &model.constraints {
        let lhs: Money = c
            .terms
            .iter()
            .map(|(coef, var)| *coef * Money::from_int(values.get(var).copied().unwrap_or(0)))
            .sum();
        let ok = match c.sense {
            Sense::Eq => lhs == c.rhs,
            Sense::Le => lhs <= c.rhs,
            Sense::Ge => lhs >= c.rhs,
        };
        if !ok {
            bad.push(c.name.clone());
        }
    }
    for v in &model.fixed_zero {
        if values.get(v).copied().unwrap_or(0) != 0 {
            bad.push(format!("bound {v}"));
        }
    }
    bad
}

const MAX_ORACLE_JOBS: usize = 6;
const MAX_ORACLE_VMS: usize = 3;
const MAX_ORACLE_HORIZON: u64 = 30;

/// Exhaustive minimum-makespan search for tiny instances.
///
/// Enumerates every linear extension of the precedence order and every
/// job-to-instance assignment; each combination is placed left-shifted
/// (a job starts as soon as its predecessors and its machine allow).
/// Every feasible schedule has a left-shifted equivalent that this walk
/// visits, so the best one found is optimal. Branches are pruned on
/// budget, horizon and the incumbent makespan.
pub fn solve_bruteforce(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    budget: Money,
    horizon: u64,
) -> Result<Schedule, MipError> {
    let jobs = ext.real_jobs();
    if jobs.len() > MAX_ORACLE_JOBS {
        return Err(MipError::TooLarge {
            what: format!("{} jobs (max {MAX_ORACLE_JOBS})", jobs.len()),
        });
    }
    let num_vms = catalog.instances().len();
    if num_vms > MAX_ORACLE_VMS {
        return Err(MipError::TooLarge { what: format!("{num_vms} vms (max {MAX_ORACLE_VMS})") });
    }
    if horizon > MAX_ORACLE_HORIZON {
        return Err(MipError::TooLarge {
            what: format!("horizon {horizon} (max {MAX_ORACLE_HORIZON})"),
        });
    }
    for &j in &jobs {
        if catalog.eligible_instances(ext.dag.job(j)).is_empty() {
            return Err(MipError::NoEligibleVm(ext.dag.job(j).name.clone()));
        }
    }

    struct Search<'a> {
        ext: &'a ExtendedDag,
        catalog: &'a VmCatalog,
        budget: Money,
        horizon: u64,
        jobs: Vec<usize>,
        scheduled: Vec<bool>,
        best: Option<(u64, Vec<(usize, usize, u64, u64)>)>,
        current: Vec<(usize, usize, u64, u64)>,
    }

    impl Search<'_> {
        fn dfs(
            &mut self,
            remaining: usize,
            indeg: &mut [usize],
            finish: &mut [u64],
            machine_last: &mut [u64],
            cost: Money,
            max_finish: u64,
        ) {
            if remaining == 0 {
                if self.best.as_ref().is_none_or(|(b, _)| max_finish < *b) {
                    self.best = Some((max_finish, self.current.clone()));
                }
                return;
            }
            if self.best.as_ref().is_some_and(|(b, _)| max_finish >= *b) {
                return;
            }
            let ready: Vec<usize> = self
                .jobs
                .iter()
                .copied()
                .filter(|&j| indeg[j] == 0 && !self.scheduled[j])
                .collect();
            for j in ready {
                let job = self.ext.dag.job(j);
                let ready_at = self
                    .ext
                    .dag
                    .predecessors(j)
                    .expect("validated dag")
                    .iter()
                    .filter(|&&p| !self.ext.is_pseudo(p))
                    .map(|&p| finish[p])
                    .max()
                    .unwrap_or(0);
                for k in 0..self.catalog.instances().len() {
                    let vm = self.catalog.instance_type(k);
                    if !vm.fits(job) {
                        continue;
                    }
                    let run = running_time(job, vm);
                    let start = ready_at.max(machine_last[k]);
                    let end = start + run;
                    let new_cost = cost + exec_cost(job, vm);
                    if end > self.horizon || new_cost > self.budget {
                        continue;
                    }
                    let old_last = machine_last[k];
                    machine_last[k] = end;
                    finish[j] = end;
                    self.scheduled[j] = true;
                    for &s in self.ext.dag.successors(j).expect("validated dag") {
                        indeg[s] -= 1;
                    }
                    self.current.push((j, k, start, end));
                    self.dfs(
                        remaining - 1,
                        indeg,
                        finish,
                        machine_last,
                        new_cost,
                        max_finish.max(end),
                    );
                    self.current.pop();
                    for &s in self.ext.dag.successors(j).expect("validated dag") {
                        indeg[s] += 1;
                    }
                    self.scheduled[j] = false;
                    finish[j] = 0;
                    machine_last[k] = old_last;
                }
            }
        }
    }

    let mut indeg: Vec<usize> = (0..ext.dag.job_count())
        .map(|j| {
            ext.dag
                .predecessors(j)
                .expect("validated dag")
                .iter()
                .filter(|&&p| !ext.is_pseudo(p))
                .count()
        })
        .collect();
    let total = jobs.len();
    let mut search = Search {
        ext,
        catalog,
        budget,
        horizon,
        jobs,
        scheduled: vec![false; ext.dag.job_count()],
        best: None,
        current: Vec::new(),
    };
    let mut finish = vec![0u64; ext.dag.job_count()];
    let mut machine_last = vec![0u64; num_vms];
    search.dfs(total, &mut indeg, &mut finish, &mut machine_last, Money::ZERO, 0);

    let (makespan, placed) = search.best.ok_or(MipError::Infeasible)?;
    let mut assignments: Vec<Option<Assignment>> = vec![None; ext.dag.job_count()];
    let mut order = Vec::new();
    let mut total_cost = Money::ZERO;
    for (j, k, start, end) in placed {
        let cost = exec_cost(ext.dag.job(j), catalog.instance_type(k));
        total_cost += cost;
        order.push(j);
        assignments[j] = Some(Assignment {
            job: j,
            instance: k,
            start,
            finish: end,
            cost,
            budget: None,
            saved: None,
        });
    }
    Ok(Schedule { algorithm: "bruteforce".into(), order, assignments, makespan, total_cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::{split_uniform, total_min_budget};
    use crate::dag::{merge_workflows, Job, WorkflowDag};
    use crate::platform::VmType;
    use crate::ranking::rank_jobs;
    use crate::scheduler::{schedule_greedy, validate_schedule};

    fn one_vm_catalog(price: i64) -> VmCatalog {
        let mut cat =
            VmCatalog::new(vec![VmType::new("m", 1, 8.0, Money::from_int(price))]).unwrap();
        cat.add_instance("m0", "m").unwrap();
        cat
    }

    fn ext_of(jobs: &[(&str, f64)], edges: &[(usize, usize)]) -> ExtendedDag {
        let mut dag = WorkflowDag::new();
        for (n, w) in jobs {
            dag.add_job(Job::new(*n, 1, 1.0, *w)).unwrap();
        }
        for &(c, p) in edges {
            dag.add_dependency(c, p).unwrap();
        }
        merge_workflows(&[dag]).unwrap()
    }

    #[test]
    fn one_job_model_counts_and_optimum() {
        let ext = ext_of(&[("a", 2.0)], &[]);
        let cat = one_vm_catalog(1);
        let model = build_model(&ext, &cat, Money::from_int(10), 5).unwrap();
        assert_eq!(model.variable_count(), 5 + 1);
        assert_eq!(model.family_count(1), 1);
        let text = export_lp(&model);
        let eq1_rows = text.lines().filter(|l| l.trim_start().starts_with("eq1_")).count();
        assert_eq!(eq1_rows, 1);
        assert!(text.contains("= 1"));
        let best = solve_bruteforce(&ext, &cat, Money::from_int(10), 5).unwrap();
        assert_eq!(best.makespan, 2);
    }

    #[test]
    fn serial_chain_on_one_vm_is_sum_of_runtimes() {
        let ext = ext_of(&[("a", 2.0), ("b", 2.0)], &[(1, 0)]);
        let cat = one_vm_catalog(1);
        let best = solve_bruteforce(&ext, &cat, Money::from_int(100), 6).unwrap();
        assert_eq!(best.makespan, 4);
        assert!(validate_schedule(&best, &ext, &cat, Some(Money::from_int(100))).is_empty());
    }

    #[test]
    fn two_independent_jobs_pack_back_to_back() {
        let ext = ext_of(&[("a", 3.0), ("b", 5.0)], &[]);
        let cat = one_vm_catalog(1);
        let best = solve_bruteforce(&ext, &cat, Money::from_int(100), 10).unwrap();
        assert_eq!(best.makespan, 8);
    }

    #[test]
    fn oracle_never_loses_to_greedy() {
        let cat = {
            let mut c = VmCatalog::new(vec![
                VmType::new("s", 1, 8.0, Money::from_int(1)),
                VmType::new("f", 4, 8.0, Money::from_int(3)),
            ])
            .unwrap();
            c.add_instance("s0", "s").unwrap();
            c.add_instance("f0", "f").unwrap();
            c
        };
        let ext = ext_of(&[("a", 4.0), ("b", 6.0), ("c", 2.0)], &[(2, 0)]);
        let budget = total_min_budget(&ext, &cat).unwrap() + Money::from_int(6);
        let order = rank_jobs(&ext, &cat, false).unwrap().order;
        let plan = split_uniform(&ext, &cat, budget).unwrap();
        let greedy = schedule_greedy(&ext, &cat, plan, &order, "greedy").unwrap();
        let best = solve_bruteforce(&ext, &cat, budget, 25).unwrap();
        assert!(best.makespan <= greedy.makespan);
        assert!(validate_schedule(&best, &ext, &cat, Some(budget)).is_empty());
    }

    #[test]
    fn oracle_reports_infeasible_budgets() {
        let ext = ext_of(&[("a", 4.0)], &[]);
        let cat = one_vm_catalog(10);
        assert!(matches!(
            solve_bruteforce(&ext, &cat, Money::from_int(5), 10),
            Err(MipError::Infeasible)
        ));
    }

    #[test]
    fn oracle_guards_instance_size() {
        let mut dag = WorkflowDag::new();
        for i in 0..7 {
            dag.add_job(Job::new(format!("j{i}"), 1, 1.0, 1.0)).unwrap();
        }
        let ext = merge_workflows(&[dag]).unwrap();
        let cat = one_vm_catalog(1);
        assert!(matches!(
            solve_bruteforce(&ext, &cat, Money::from_int(100), 10),
            Err(MipError::TooLarge { .. })
        ));
    }

    #[test]
    fn export_is_deterministic_and_self_parses() {
        let ext = ext_of(&[("a", 2.0), ("b", 3.0)], &[(1, 0)]);
        let cat = one_vm_catalog(2);
        let model = build_model(&ext, &cat, Money::from_int(50), 8).unwrap();
        let (t1, t2) = (export_lp(&model), export_lp(&model));
        assert_eq!(t1, t2);
        let summary = parse_lp(&t1).unwrap();
        assert_eq!(summary.variables.len(), model.variable_count());
        assert_eq!(summary.constraints_per_family["eq1"], 2);
        assert_eq!(summary.constraints_per_family["eq5"], 1);
        assert_eq!(summary.constraints_per_family["eq6"], 8);
        assert_eq!(summary.bounds_fixed, model.fixed_zero.len());
    }

    #[test]
    fn feasible_encodings_satisfy_the_rows_and_overlaps_break_eq6() {
        let ext = ext_of(&[("a", 2.0), ("b", 2.0)], &[(1, 0)]);
        let cat = one_vm_catalog(1);
        let budget = Money::from_int(50);
        let model = build_model(&ext, &cat, budget, 8).unwrap();
        let best = solve_bruteforce(&ext, &cat, budget, 8).unwrap();
        let values = encode_schedule(&model, &best);
        assert!(violated_constraints(&model, &values).is_empty());

        // force overlap: both jobs start at slot 0 on the same vm
        let mut bad = BTreeMap::new();
        bad.insert("x_0_0_0".to_string(), 1);
        bad.insert("x_1_0_0".to_string(), 1);
        bad.insert("d".to_string(), 2);
        let violated = violated_constraints(&model, &bad);
        assert!(violated.iter().any(|n| n.starts_with("eq6")), "{violated:?}");
    }
}
