//! Workload generators, workflow/catalog file formats and a minimal
//! scientific-workflow (DAX) importer.
//!
//! All generators are seeded and draw in a fixed order, so identical
//! parameters always reproduce identical workloads.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dag::{DagError, Job, WorkflowDag};
use crate::money::Money;
use crate::platform::{PlatformError, VmCatalog, VmType};

#[derive(Debug, thiserror::Error)]
pub enum WorkloadError {
    #[error("fft size {0} is not a power of two (>= 2)")]
    NotPowerOfTwo(u64),
    #[error("gaussian elimination needs a matrix with at least 2 rows, got {0}")]
    MatrixTooSmall(u64),
    #[error("edge density {0} out of [0, 1]")]
    BadDensity(f64),
    #[error("need at least one job")]
    NoJobs,
    #[error("workflow document has an empty jobs array")]
    EmptyJobs,
    #[error("edge endpoint `{0}` is not a declared job")]
    UnknownEdgeEndpoint(String),
    #[error("pool generation needs vm types on both sides of the {0}-vCPU boundary")]
    OneSidedCatalog(u32),
    #[error("dax: {0}")]
    Dax(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Xml(#[from] roxmltree::Error),
    #[error(transparent)]
    Dag(#[from] DagError),
    #[error(transparent)]
    Platform(#[from] PlatformError),
}

/// Seeded integer work sampler; every generated job draws once.
#[derive(Debug, Clone)]
pub struct WorkSampler {
    lo: u64,
    hi: u64,
    rng: ChaCha8Rng,
}

impl WorkSampler {
    pub const DEFAULT_RANGE: (u64, u64) = (10, 100);

    pub fn uniform(lo: u64, hi: u64, seed: u64) -> Self {
        WorkSampler { lo: lo.min(hi), hi: lo.max(hi), rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Every job gets one vCPU-slot of work; used for symmetry checks.
    pub fn unit() -> Self {
        WorkSampler::uniform(1, 1, 0)
    }

    pub fn sample(&mut self) -> f64 {
        self.rng.random_range(self.lo..=self.hi) as f64
    }

    pub fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }
}

fn generated_job(name: String, work: f64) -> Job {
    // generated workloads do not pin resource shapes: one vCPU and one
    // GiB keeps every catalog type eligible
    Job::new(name, 1, 1.0, work)
}

/// Recursive-FFT task graph over `m = 2^k` points: a binary tree of
/// recursive calls (sizes 1, 2, ..., m) feeding `log2 m` butterfly
/// levels of `m` nodes each. Job count is `2m - 1 + m log2 m`, and with
/// unit works every entry-to-exit path carries the same total work.
pub fn gen_fft(m: u64, works: &mut WorkSampler) -> Result<WorkflowDag, WorkloadError> {
    if m < 2 || !m.is_power_of_two() {
        return Err(WorkloadError::NotPowerOfTwo(m));
    }
    let levels = m.trailing_zeros() as u64; // log2 m
    let mut dag = WorkflowDag::new();

    let mut tree: Vec<Vec<usize>> = Vec::new();
    for level in 0..=levels {
        let width = 1u64 << level;
        let mut row = Vec::with_capacity(width as usize);
        for i in 0..width {
            let idx = dag.add_job(generated_job(format!("c{level}_{i}"), works.sample()))?;
            row.push(idx);
        }
        tree.push(row);
    }
    for level in 0..levels as usize {
        for (i, &parent) in tree[level].iter().enumerate() {
            dag.add_dependency(tree[level + 1][2 * i], parent)?;
            dag.add_dependency(tree[level + 1][2 * i + 1], parent)?;
        }
    }

    let mut prev: Vec<usize> = tree[levels as usize].clone();
    for stage in 1..=levels {
        let span = m >> stage; // butterfly pair distance at this stage
        let mut row = Vec::with_capacity(m as usize);
        for i in 0..m {
            let idx = dag.add_job(generated_job(format!("b{stage}_{i}"), works.sample()))?;
            row.push(idx);
        }
        for i in 0..m as usize {
            dag.add_dependency(row[i], prev[i])?;
            dag.add_dependency(row[i], prev[i ^ span as usize])?;
        }
        prev = row;
    }
    debug_assert_eq!(dag.job_count() as u64, 2 * m - 1 + m * levels);
    Ok(dag)
}

/// Gaussian-elimination dependency DAG for an `n x n` matrix: step `k`
/// has one pivot task and `n - k` column updates; each update feeds the
/// next step's task on the same column, and each pivot gates its step's
/// updates. Job count is `(n^2 + n - 2) / 2`.
pub fn gen_gaussian(n: u64, works: &mut WorkSampler) -> Result<WorkflowDag, WorkloadError> {
    if n < 2 {
        return Err(WorkloadError::MatrixTooSmall(n));
    }
    let n = n as usize;
    let mut dag = WorkflowDag::new();
    let mut idx: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for k in 1..n {
        for j in k..=n {
            let id = dag.add_job(generated_job(format!("g{k}_{j}"), works.sample()))?;
            idx.insert((k, j), id);
        }
    }
    for k in 1..n {
        for j in k + 1..=n {
            // updates wait for their step's pivot
            dag.add_dependency(idx[&(k, j)], idx[&(k, k)])?;
            // and feed the same column in the next step
            if k < n - 1 {
                dag.add_dependency(idx[&(k + 1, j)], idx[&(k, j)])?;
            }
        }
    }
    debug_assert_eq!(dag.job_count(), (n * n + n - 2) / 2);
    Ok(dag)
}

/// Random DAG: edges only point from lower to higher job index, so the
/// result is acyclic by construction.
pub fn gen_random(
    num_jobs: usize,
    edge_density: f64,
    works: &mut WorkSampler,
    seed: u64,
) -> Result<WorkflowDag, WorkloadError> {
    if num_jobs == 0 {
        return Err(WorkloadError::NoJobs);
    }
    if !(0.0..=1.0).contains(&edge_density) {
        return Err(WorkloadError::BadDensity(edge_density));
    }
    let mut dag = WorkflowDag::new();
    for i in 0..num_jobs {
        dag.add_job(generated_job(format!("j{i}"), works.sample()))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for parent in 0..num_jobs {
        for child in parent + 1..num_jobs {
            if rng.random::<f64>() < edge_density {
                dag.add_dependency(child, parent)?;
            }
        }
    }
    Ok(dag)
}

/// Pool size relative to the job count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sufficiency {
    /// Half as many instances as jobs.
    Scarce,
    /// As many instances as jobs.
    Normal,
    /// One and a half times as many instances as jobs.
    Sufficient,
}

impl Sufficiency {
    pub const ALL: [Sufficiency; 3] = [Sufficiency::Scarce, Sufficiency::Normal, Sufficiency::Sufficient];

    pub fn instance_count(self, num_jobs: usize) -> usize {
        match self {
            Sufficiency::Scarce => num_jobs.div_ceil(2),
            Sufficiency::Normal => num_jobs,
            Sufficiency::Sufficient => (3 * num_jobs).div_ceil(2),
        }
    }
}

impl std::fmt::Display for Sufficiency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sufficiency::Scarce => "scarce",
            Sufficiency::Normal => "normal",
            Sufficiency::Sufficient => "sufficient",
        })
    }
}

impl std::str::FromStr for Sufficiency {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scarce" => Ok(Sufficiency::Scarce),
            "normal" => Ok(Sufficiency::Normal),
            "sufficient" => Ok(Sufficiency::Sufficient),
            other => Err(format!("unknown sufficiency `{other}`")),
        }
    }
}

/// vCPU boundary between "small" and "large" type groups in pools.
pub const SMALL_TYPE_MAX_VCPUS: u32 = 8;

/// Draws a seeded instance pool over the given types: the pool size
/// follows the sufficiency level and exactly two thirds (rounded up) of
/// the instances come from types with at most 8 vCPUs, the rest from
/// larger ones.
pub fn gen_vm_pool(
    types: &[VmType],
    num_jobs: usize,
    sufficiency: Sufficiency,
    seed: u64,
) -> Result<VmCatalog, WorkloadError> {
    let small: Vec<&VmType> =
        types.iter().filter(|t| t.vcpus <= SMALL_TYPE_MAX_VCPUS).collect();
    let large: Vec<&VmType> = types.iter().filter(|t| t.vcpus > SMALL_TYPE_MAX_VCPUS).collect();
    if small.is_empty() || large.is_empty() {
        return Err(WorkloadError::OneSidedCatalog(SMALL_TYPE_MAX_VCPUS));
    }
    let total = sufficiency.instance_count(num_jobs);
    let num_small = (2 * total).div_ceil(3);
    let mut catalog = VmCatalog::new(types.to_vec())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..total {
        let group = if i < num_small { &small } else { &large };
        let t = group[rng.random_range(0..group.len())];
        catalog.add_instance(format!("vm{i:04}"), &t.name)?;
    }
    Ok(catalog)
}

/// The 23 heterogeneous on-demand VM shapes used by the benchmark
/// harness, with hourly prices read as per-slot prices (one slot is the
/// billing unit).
pub fn ec2_types() -> Vec<VmType> {
    let rows: [(&str, u32, f64, &str); 23] = [
        ("t2.micro", 1, 1.0, "0.0116"),
        ("t2.medium", 2, 4.0, "0.0464"),
        ("m5.xlarge", 4, 16.0, "0.192"),
        ("m5.2xlarge", 8, 32.0, "0.384"),
        ("m5.4xlarge", 16, 64.0, "0.768"),
        ("m5.12xlarge", 48, 192.0, "2.304"),
        ("c5.large", 2, 4.0, "0.085"),
        ("c5.xlarge", 4, 8.0, "0.17"),
        ("c5.2xlarge", 8, 16.0, "0.34"),
        ("c5.4xlarge", 16, 32.0, "0.68"),
        ("c5.9xlarge", 36, 72.0, "1.53"),
        ("c5.18xlarge", 72, 144.0, "3.06"),
        ("r4.large", 2, 15.25, "0.133"),
        ("r4.xlarge", 4, 30.5, "0.266"),
        ("r4.2xlarge", 8, 61.0, "0.532"),
        ("r4.4xlarge", 16, 122.0, "1.064"),
        ("r4.8xlarge", 32, 244.0, "2.128"),
        ("i3.xlarge", 4, 30.5, "0.312"),
        ("i3.2xlarge", 8, 61.0, "0.624"),
        ("i3.4xlarge", 16, 122.0, "1.248"),
        ("i3.8xlarge", 32, 244.0, "2.496"),
        ("g3.4xlarge", 16, 122.0, "1.14"),
        ("g3.8xlarge", 32, 244.0, "2.28"),
    ];
    rows.iter()
        .map(|&(name, vcpus, mem, price)| {
            VmType::new(name, vcpus, mem, Money::parse_decimal(price).expect("literal price"))
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkflowDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<BTreeMap<String, String>>,
    jobs: Vec<JobDoc>,
    edges: Vec<(String, String)>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobDoc {
    id: String,
    #[serde(default)]
    cpu: u32,
    #[serde(default)]
    mem_gib: f64,
    #[serde(default)]
    work: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    runtimes: Option<BTreeMap<String, u64>>,
}

/// Parses the workflow JSON document: jobs plus `[child, parent]` edge
/// pairs. Unknown fields are rejected; the result must be acyclic.
pub fn load_workflow(text: &str) -> Result<WorkflowDag, WorkloadError> {
    let doc: WorkflowDoc = serde_json::from_str(text)?;
    if doc.jobs.is_empty() {
        return Err(WorkloadError::EmptyJobs);
    }
    let mut dag = WorkflowDag::new();
    for j in doc.jobs {
        let mut job = Job::new(j.id, j.cpu, j.mem_gib, j.work);
        job.runtimes = j.runtimes;
        dag.add_job(job)?;
    }
    for (child, parent) in doc.edges {
        let c = dag
            .index_of(&child)
            .ok_or(WorkloadError::UnknownEdgeEndpoint(child))?;
        let p = dag
            .index_of(&parent)
            .ok_or(WorkloadError::UnknownEdgeEndpoint(parent))?;
        dag.add_dependency(c, p)?;
    }
    dag.validate()?;
    Ok(dag)
}

/// Serializes a workflow (with optional generator metadata) such that
/// [`load_workflow`] reproduces it structurally.
pub fn save_workflow(
    dag: &WorkflowDag,
    meta: Option<BTreeMap<String, String>>,
) -> Result<String, WorkloadError> {
    let jobs: Vec<JobDoc> = dag
        .jobs()
        .iter()
        .map(|j| JobDoc {
            id: j.name.clone(),
            cpu: j.cpu,
            mem_gib: j.mem_gib,
            work: j.work,
            runtimes: j.runtimes.clone(),
        })
        .collect();
    let edges: Vec<(String, String)> = dag
        .edges()
        .into_iter()
        .map(|(c, p)| (dag.job(c).name.clone(), dag.job(p).name.clone()))
        .collect();
    Ok(serde_json::to_string_pretty(&WorkflowDoc { meta, jobs, edges })? + "\n")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogDoc {
    types: Vec<VmType>,
    #[serde(default)]
    instances: Vec<InstanceDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    id: String,
    #[serde(rename = "type")]
    type_name: String,
}

/// Parses a VM catalog document: type shapes plus (optionally) the
/// instance pool.
pub fn load_catalog(text: &str) -> Result<VmCatalog, WorkloadError> {
    let doc: CatalogDoc = serde_json::from_str(text)?;
    let mut catalog = VmCatalog::new(doc.types)?;
    for inst in doc.instances {
        catalog.add_instance(inst.id, &inst.type_name)?;
    }
    Ok(catalog)
}

pub fn save_catalog(catalog: &VmCatalog) -> Result<String, WorkloadError> {
    let doc = CatalogDoc {
        types: catalog.types().to_vec(),
        instances: catalog
            .instances()
            .iter()
            .map(|i| InstanceDoc {
                id: i.name.clone(),
                type_name: catalog.types()[i.type_idx].name.clone(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Imports the scientific-workflow DAX subset: `<job id runtime>`
/// elements and `<child ref><parent ref/></child>` dependencies. Work is
/// runtime times the reference vCPU count (default one); transfer-time
/// attributes are ignored since communication is folded into runtimes.
pub fn import_dax(xml_text: &str) -> Result<WorkflowDag, WorkloadError> {
    import_dax_with(xml_text, 1.0)
}

pub fn import_dax_with(xml_text: &str, ref_vcpus: f64) -> Result<WorkflowDag, WorkloadError> {
    let doc = roxmltree::Document::parse(xml_text)?;
    let mut dag = WorkflowDag::new();
    for node in doc.root_element().children().filter(|n| n.has_tag_name("job")) {
        let id = node
            .attribute("id")
            .ok_or_else(|| WorkloadError::Dax("job element without id".into()))?;
        let runtime: f64 = match node.attribute("runtime") {
            Some(r) => r
                .trim()
                .parse()
                .map_err(|_| WorkloadError::Dax(format!("job `{id}` has bad runtime `{r}`")))?,
            None => 1.0,
        };
        dag.add_job(generated_job(id.to_string(), runtime * ref_vcpus))?;
    }
    if dag.job_count() == 0 {
        return Err(WorkloadError::Dax("document declares no jobs".into()));
    }
    for node in doc.root_element().children().filter(|n| n.has_tag_name("child")) {
        let child_ref = node
            .attribute("ref")
            .ok_or_else(|| WorkloadError::Dax("child element without ref".into()))?;
        let child = dag
            .index_of(child_ref)
            .ok_or_else(|| WorkloadError::Dax(format!("child ref `{child_ref}` undeclared")))?;
        for parent_node in node.children().filter(|n| n.has_tag_name("parent")) {
            let parent_ref = parent_node
                .attribute("ref")
                .ok_or_else(|| WorkloadError::Dax("parent element without ref".into()))?;
            let parent = dag.index_of(parent_ref).ok_or_else(|| {
                WorkloadError::Dax(format!("parent ref `{parent_ref}` undeclared"))
            })?;
            dag.add_dependency(child, parent)?;
        }
    }
    dag.validate()?;
    Ok(dag)
}
