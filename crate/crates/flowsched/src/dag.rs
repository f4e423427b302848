//! Workflow DAG representation, validation and multi-workflow merging.
//!
//! Jobs are addressed by dense indices in insertion order; all tie-breaks
//! in traversals use ascending index so every run is reproducible.
//! Precedence is stored as sparse successor/predecessor lists (workloads
//! reach thousands of jobs, a dense matrix would not scale).

use std::collections::HashMap;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum DagError {
    #[error("duplicate job id `{0}`")]
    DuplicateJob(String),
    #[error("unknown job index {0}")]
    UnknownJob(usize),
    #[error("unknown job id `{0}`")]
    UnknownJobName(String),
    #[error("job `{0}` depends on itself")]
    SelfLoop(String),
    #[error("dependency cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("workflow has no jobs")]
    Empty,
    #[error("no workflows to merge")]
    NoWorkflows,
    #[error("job `{0}` has negative work")]
    NegativeWork(String),
}

/// One schedulable unit of a workflow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Job {
    pub name: String,
    /// Minimum vCPU count required to host the job.
    pub cpu: u32,
    /// Minimum memory in GiB.
    pub mem_gib: f64,
    /// Computation volume in vCPU-time-slots.
    pub work: f64,
    /// Pseudo nodes glue workflows together; they carry no work, are
    /// never scheduled and never charged.
    pub pseudo: bool,
    /// Optional explicit per-VM-type running times (slots), overriding
    /// the work/vcpus formula. Used by fixtures with measured times.
    pub runtimes: Option<BTreeMap<String, u64>>,
}

impl Job {
    pub fn new(name: impl Into<String>, cpu: u32, mem_gib: f64, work: f64) -> Self {
        Job {
            name: name.into(),
            cpu,
            mem_gib,
            work,
            pseudo: false,
            runtimes: None,
        }
    }

    pub fn pseudo(name: impl Into<String>) -> Self {
        Job {
            name: name.into(),
            cpu: 0,
            mem_gib: 0.0,
            work: 0.0,
            pseudo: true,
            runtimes: None,
        }
    }
}

/// A DAG of jobs with sparse precedence lists.
///
/// An edge is recorded as "child depends on parent": the child cannot
/// start before the parent finishes.
#[derive(Debug, Clone, Default)]
pub struct WorkflowDag {
    jobs: Vec<Job>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    by_name: HashMap<String, usize>,
}

impl WorkflowDag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_job(&mut self, job: Job) -> Result<usize, DagError> {
        if self.by_name.contains_key(&job.name) {
            return Err(DagError::DuplicateJob(job.name));
        }
        let idx = self.jobs.len();
        self.by_name.insert(job.name.clone(), idx);
        self.jobs.push(job);
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        Ok(idx)
    }

    /// Records that `child` cannot start before `parent` finishes.
    pub fn add_dependency(&mut self, child: usize, parent: usize) -> Result<(), DagError> {
        let n = self.jobs.len();
        if child >= n {
            return Err(DagError::UnknownJob(child));
        }
        if parent >= n {
            return Err(DagError::UnknownJob(parent));
        }
        if child == parent {
            return Err(DagError::SelfLoop(self.jobs[child].name.clone()));
        }
        if !self.succ[parent].contains(&child) {
            self.succ[parent].push(child);
            self.succ[parent].sort_unstable();
            self.pred[child].push(parent);
            self.pred[child].sort_unstable();
        }
        Ok(())
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, idx: usize) -> &Job {
        &self.jobs[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn successors(&self, job: usize) -> Result<&[usize], DagError> {
        self.succ.get(job).map(Vec::as_slice).ok_or(DagError::UnknownJob(job))
    }

    pub fn predecessors(&self, job: usize) -> Result<&[usize], DagError> {
        self.pred.get(job).map(Vec::as_slice).ok_or(DagError::UnknownJob(job))
    }

    /// All edges as (child, parent) pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (child, parents) in self.pred.iter().enumerate() {
            for &parent in parents {
                out.push((child, parent));
            }
        }
        out.sort_unstable();
        out
    }

    /// Checks acyclicity and basic job invariants, reporting one cycle
    /// (as a job-name path) when there is one.
    pub fn validate(&self) -> Result<(), DagError> {
        if self.jobs.is_empty() {
            return Err(DagError::Empty);
        }
        for job in &self.jobs {
            if job.work < 0.0 {
                return Err(DagError::NegativeWork(job.name.clone()));
            }
        }
        match self.topological_order() {
            Ok(_) => Ok(()),
            Err(e) => Err(e),
        }
    }

    /// Kahn's algorithm with an index min-heap: among ready jobs the
    /// smallest index goes first, so the order is deterministic.
    pub fn topological_order(&self) -> Result<Vec<usize>, DagError> {
        let n = self.jobs.len();
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut heap: BinaryHeap<std::cmp::Reverse<usize>> = indeg
            .iter()
            .enumerate()
            .filter(|&(_, d)| *d == 0)
            .map(|(i, _)| std::cmp::Reverse(i))
            .collect();
        let mut order = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(j)) = heap.pop() {
            order.push(j);
            for &s in &self.succ[j] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    heap.push(std::cmp::Reverse(s));
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(DagError::Cycle(self.find_cycle(&indeg)))
        }
    }

    /// Walks successor pointers inside the unresolved subgraph until a
    /// node repeats; the repeated segment is a concrete cycle.
    fn find_cycle(&self, indeg: &[usize]) -> Vec<String> {
        let start = indeg
            .iter()
            .position(|&d| d > 0)
            .expect("cycle reported without unresolved nodes");
        let mut seen_at: HashMap<usize, usize> = HashMap::new();
        let mut path: Vec<usize> = Vec::new();
        let mut cur = start;
        loop {
            if let Some(&at) = seen_at.get(&cur) {
                return path[at..].iter().map(|&j| self.jobs[j].name.clone()).collect();
            }
            seen_at.insert(cur, path.len());
            path.push(cur);
            cur = *self.succ[cur]
                .iter()
                .find(|&&s| indeg[s] > 0)
                .expect("unresolved node with no unresolved successor");
        }
    }
}

/// One or more workflows merged behind a single pseudo entry/exit pair.
///
/// Real jobs keep their original indices (workflows are appended in
/// order); the two pseudo nodes come last.
#[derive(Debug, Clone)]
pub struct ExtendedDag {
    pub dag: WorkflowDag,
    pub entry: usize,
    pub exit: usize,
    /// Source workflow per job; `None` for the pseudo nodes.
    pub origin: Vec<Option<usize>>,
}

impl ExtendedDag {
    pub fn is_pseudo(&self, job: usize) -> bool {
        self.dag.job(job).pseudo
    }

    /// Indices of real (schedulable) jobs in ascending order.
    pub fn real_jobs(&self) -> Vec<usize> {
        (0..self.dag.job_count()).filter(|&j| !self.is_pseudo(j)).collect()
    }

    pub fn real_job_count(&self) -> usize {
        self.dag.job_count() - 2
    }
}

/// Connects the given workflows with zero-work pseudo entry/exit nodes:
/// every original source becomes a successor of the pseudo entry, every
/// original sink a predecessor of the pseudo exit.
pub fn merge_workflows(workflows: &[WorkflowDag]) -> Result<ExtendedDag, DagError> {
    if workflows.is_empty() {
        return Err(DagError::NoWorkflows);
    }
    for w in workflows {
        w.validate()?;
    }
    let mut dag = WorkflowDag::new();
    let mut origin = Vec::new();
    let mut offsets = Vec::with_capacity(workflows.len());
    for (wi, w) in workflows.iter().enumerate() {
        offsets.push(dag.job_count());
        for job in w.jobs() {
            let mut job = job.clone();
            // qualify colliding names so the merged id space stays unique
            if dag.index_of(&job.name).is_some() {
                job.name = format!("w{wi}/{}", job.name);
            }
            dag.add_job(job)?;
            origin.push(Some(wi));
        }
    }
    for (wi, w) in workflows.iter().enumerate() {
        let off = offsets[wi];
        for (child, parent) in w.edges() {
            dag.add_dependency(off + child, off + parent)?;
        }
    }
    let mut entry_name = String::from("<entry>");
    while dag.index_of(&entry_name).is_some() {
        entry_name.push('+');
    }
    let mut exit_name = String::from("<exit>");
    while dag.index_of(&exit_name).is_some() {
        exit_name.push('+');
    }
    let real = dag.job_count();
    let entry = dag.add_job(Job::pseudo(entry_name))?;
    let exit = dag.add_job(Job::pseudo(exit_name))?;
    origin.push(None);
    origin.push(None);
    for j in 0..real {
        if dag.predecessors(j)?.is_empty() {
            dag.add_dependency(j, entry)?;
        }
        if dag.successors(j)?.is_empty() {
            dag.add_dependency(exit, j)?;
        }
    }
    Ok(ExtendedDag { dag, entry, exit, origin })
}
