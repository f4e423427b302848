//! Budget-constrained scheduling of DAG workflows onto heterogeneous
//! pay-as-you-go VMs.
//!
//! The pipeline: merge workflows behind pseudo entry/exit nodes, rank
//! jobs (plain upward ranks or random-walk-weighted ranks), reserve each
//! job a floor budget plus a spare-budget share (uniform or proportional
//! splitting), then greedily place jobs on the fastest affordable VM.
//! A mixed-integer model of the same problem can be exported for exact
//! solvers, with a small exhaustive oracle for desk-sized instances, and
//! a benchmark harness runs the whole comparison matrix.

pub mod bench;
pub mod budget;
pub mod dag;
pub mod mip;
pub mod money;
pub mod platform;
pub mod ranking;
pub mod scheduler;
pub mod workloads;

pub use budget::{
    budget_levels, check_feasible, min_budget, phi_grid, split_proportional, split_uniform,
    BudgetLevels, BudgetPlan, SplitMode,
};
pub use dag::{merge_workflows, ExtendedDag, Job, WorkflowDag};
pub use money::Money;
pub use platform::{exec_cost, running_time, VmCatalog, VmInstance, VmType};
pub use ranking::{
    avg_exec_slots, plain_upward_ranks, priority_list, rank_jobs, stationary_distribution,
    weighted_upward_ranks, PriorityRanking, TransitionMatrix,
};
pub use scheduler::{
    schedule_fastest_finish, schedule_greedy, validate_schedule, Schedule, Timeline, Violation,
};
pub use workloads::{
    ec2_types, gen_fft, gen_gaussian, gen_random, gen_vm_pool, import_dax, load_catalog,
    load_workflow, save_catalog, save_workflow, Sufficiency, WorkSampler,
};
