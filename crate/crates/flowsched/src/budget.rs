//! Per-job budget floors, feasibility, spare-budget splitting and the
//! remaining-balance ledger consumed during scheduling.
//!
//! Everything here is exact rational arithmetic; a schedule is accepted
//! or rejected on the same numbers the plan was built from.

use crate::dag::ExtendedDag;
use crate::money::Money;
use crate::platform::{exec_cost, VmCatalog};

#[derive(Debug, thiserror::Error)]
pub enum BudgetError {
    #[error("job `{0}` fits no vm type in the pool")]
    Unschedulable(String),
    #[error("budget {budget} is below the aggregate minimum {minimum}")]
    Infeasible { budget: Money, minimum: Money },
    #[error("job `{job}` overspends: {spent} > reserve {reserve} + balance {remain}")]
    Overspend { job: String, spent: Money, reserve: Money, remain: Money },
    #[error("job `{0}` already consumed its reserve")]
    AlreadyConsumed(String),
    #[error(transparent)]
    Ranking(#[from] crate::ranking::RankingError),
    #[error(transparent)]
    Schedule(#[from] Box<crate::scheduler::ScheduleError>),
}

/// How the spare budget (total minus the sum of per-job floors) is
/// distributed across jobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitMode {
    /// Every job gets the same share of the spare.
    Uniform,
    /// Shares proportional to each job's extra demand, i.e. the cost gap
    /// between its most and least expensive eligible VM type.
    Proportional,
}

impl std::fmt::Display for SplitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SplitMode::Uniform => "uniform",
            SplitMode::Proportional => "proportional",
        })
    }
}

impl std::str::FromStr for SplitMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(SplitMode::Uniform),
            "proportional" => Ok(SplitMode::Proportional),
            other => Err(format!("unknown split mode `{other}`")),
        }
    }
}

/// Cheapest way to run the job on any eligible pooled VM type.
pub fn min_budget(job: &crate::dag::Job, catalog: &VmCatalog) -> Result<Money, BudgetError> {
    if job.pseudo {
        return Ok(Money::ZERO);
    }
    catalog
        .eligible_types(job)
        .iter()
        .map(|&t| exec_cost(job, catalog.vm_type(t)))
        .min()
        .ok_or_else(|| BudgetError::Unschedulable(job.name.clone()))
}

/// Most expensive way; the spread above the floor is a job's extra demand.
fn max_cost(job: &crate::dag::Job, catalog: &VmCatalog) -> Result<Money, BudgetError> {
    catalog
        .eligible_types(job)
        .iter()
        .map(|&t| exec_cost(job, catalog.vm_type(t)))
        .max()
        .ok_or_else(|| BudgetError::Unschedulable(job.name.clone()))
}

/// Sum of per-job floors over all real jobs.
pub fn total_min_budget(ext: &ExtendedDag, catalog: &VmCatalog) -> Result<Money, BudgetError> {
    ext.real_jobs().into_iter().map(|j| min_budget(ext.dag.job(j), catalog)).sum()
}

/// A budget covers the workload iff it pays for every job's cheapest VM.
pub fn check_feasible(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    budget: Money,
) -> Result<bool, BudgetError> {
    Ok(budget >= total_min_budget(ext, catalog)?)
}

/// Reserved budget per job plus the shared remaining balance.
///
/// Owned by a single scheduler run: consuming a reserve rolls the unspent
/// part into `remain`, which later jobs may draw on.
#[derive(Debug, Clone)]
pub struct BudgetPlan {
    pub total: Money,
    pub mode: SplitMode,
    reserves: Vec<Money>,
    consumed: Vec<bool>,
    remain: Money,
}

impl BudgetPlan {
    pub fn reserve(&self, job: usize) -> Money {
        self.reserves[job]
    }

    pub fn remain(&self) -> Money {
        self.remain
    }

    /// Budget the next assignment of `job` may spend.
    pub fn available(&self, job: usize) -> Money {
        self.reserves[job] + self.remain
    }

    /// Books `spent` against the job's reserve, rolling the difference
    /// into the remaining balance. Overspending is a hard error: the
    /// caller must never rely on silent clipping.
    pub fn consume(&mut self, ext: &ExtendedDag, job: usize, spent: Money) -> Result<(), BudgetError> {
        if self.consumed[job] {
            return Err(BudgetError::AlreadyConsumed(ext.dag.job(job).name.clone()));
        }
        if spent > self.reserves[job] + self.remain {
            return Err(BudgetError::Overspend {
                job: ext.dag.job(job).name.clone(),
                spent,
                reserve: self.reserves[job],
                remain: self.remain,
            });
        }
        self.consumed[job] = true;
        self.remain = self.remain + self.reserves[job] - spent;
        debug_assert!(!self.remain.is_negative());
        Ok(())
    }

    /// Exact conservation check: spent + unconsumed reserves + remain
    /// must always recompose the total.
    pub fn unconsumed_total(&self) -> Money {
        self.reserves
            .iter()
            .zip(&self.consumed)
            .filter(|&(_, c)| !c)
            .map(|(r, _)| *r)
            .sum()
    }
}

/// Splits the spare budget evenly: every job gets its floor plus an
/// equal share of what is left.
pub fn split_uniform(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    budget: Money,
) -> Result<BudgetPlan, BudgetError> {
    split(ext, catalog, budget, SplitMode::Uniform)
}

/// Splits the spare budget in proportion to each job's extra demand;
/// falls back to even shares when no job has any spread.
pub fn split_proportional(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    budget: Money,
) -> Result<BudgetPlan, BudgetError> {
    split(ext, catalog, budget, SplitMode::Proportional)
}

pub fn split(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    budget: Money,
    mode: SplitMode,
) -> Result<BudgetPlan, BudgetError> {
    let n = ext.dag.job_count();
    let real = ext.real_jobs();
    let mut floors = vec![Money::ZERO; n];
    for &j in &real {
        floors[j] = min_budget(ext.dag.job(j), catalog)?;
    }
    let minimum: Money = floors.iter().copied().sum();
    if budget < minimum {
        return Err(BudgetError::Infeasible { budget, minimum });
    }
    let spare = budget - minimum;

    let mut reserves = floors;
    match mode {
        SplitMode::Uniform => {
            let share = spare / real.len() as u64;
            for &j in &real {
                reserves[j] += share;
            }
        }
        SplitMode::Proportional => {
            let mut extras = vec![Money::ZERO; n];
            let mut extra_total = Money::ZERO;
            for &j in &real {
                let e = max_cost(ext.dag.job(j), catalog)? - reserves[j];
                extras[j] = e;
                extra_total += e;
            }
            if extra_total.is_zero() {
                let share = spare / real.len() as u64;
                for &j in &real {
                    reserves[j] += share;
                }
            } else {
                for &j in &real {
                    reserves[j] += spare * extras[j] / extra_total;
                }
            }
        }
    }
    Ok(BudgetPlan {
        total: budget,
        mode,
        consumed: vec![false; n],
        reserves,
        remain: Money::ZERO,
    })
}

/// The experiment budget grid: interpolates between the aggregate floor
/// and the cost of the cost-oblivious fastest-finish schedule.
#[derive(Debug, Clone)]
pub struct BudgetLevels {
    pub d_min: Money,
    pub d_max: Money,
}

impl BudgetLevels {
    pub fn level(&self, phi: Money) -> Money {
        self.d_min + phi * (self.d_max - self.d_min)
    }
}

/// The five-point budget factor grid used by the benchmark protocol.
pub fn phi_grid() -> Vec<Money> {
    vec![
        Money::ZERO,
        Money::from_ratio(1, 4),
        Money::from_ratio(1, 2),
        Money::from_ratio(3, 4),
        Money::from_int(1),
    ]
}

/// Computes the budget endpoints for a workload on a pool: the floor sum
/// and the fastest-finish schedule's cost. The upper endpoint is clamped
/// to the floor so the interpolation stays monotone even in corner cases.
pub fn budget_levels(ext: &ExtendedDag, catalog: &VmCatalog) -> Result<BudgetLevels, BudgetError> {
    let d_min = total_min_budget(ext, catalog)?;
    let heft = crate::scheduler::schedule_fastest_finish(ext, catalog).map_err(Box::new)?;
    let d_max = heft.total_cost.max(d_min);
    Ok(BudgetLevels { d_min, d_max })
}
