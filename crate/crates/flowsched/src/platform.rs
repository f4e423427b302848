//! VM type catalog, instance pools, eligibility and cost model.

use serde::{Deserialize, Serialize};

use crate::dag::Job;
use crate::money::Money;

#[derive(Debug, thiserror::Error)]
pub enum PlatformError {
    #[error("vm type `{0}` has zero vCPUs")]
    ZeroCpu(String),
    #[error("vm type `{0}` has a negative price")]
    NegativePrice(String),
    #[error("duplicate vm type `{0}`")]
    DuplicateType(String),
    #[error("duplicate vm instance `{0}`")]
    DuplicateInstance(String),
    #[error("instance `{0}` references unknown vm type `{1}`")]
    UnknownType(String, String),
    #[error("job `{0}` fits no vm type in the catalog")]
    Unschedulable(String),
}

/// A purchasable machine shape: vCPUs, memory and per-slot price.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VmType {
    pub name: String,
    pub vcpus: u32,
    pub mem_gib: f64,
    pub price_per_slot: Money,
}

impl VmType {
    pub fn new(name: impl Into<String>, vcpus: u32, mem_gib: f64, price_per_slot: Money) -> Self {
        VmType { name: name.into(), vcpus, mem_gib, price_per_slot }
    }

    pub fn fits(&self, job: &Job) -> bool {
        self.vcpus >= job.cpu && self.mem_gib >= job.mem_gib
    }
}

/// A concrete leased machine of some type.
#[derive(Debug, Clone)]
pub struct VmInstance {
    pub name: String,
    pub type_idx: usize,
}

/// The available platform: type definitions plus the instance pool.
#[derive(Debug, Clone, Default)]
pub struct VmCatalog {
    types: Vec<VmType>,
    instances: Vec<VmInstance>,
}

impl VmCatalog {
    pub fn new(types: Vec<VmType>) -> Result<Self, PlatformError> {
        let mut cat = VmCatalog { types: Vec::new(), instances: Vec::new() };
        for t in types {
            cat.add_type(t)?;
        }
        Ok(cat)
    }

    pub fn add_type(&mut self, t: VmType) -> Result<usize, PlatformError> {
        if t.vcpus == 0 {
            return Err(PlatformError::ZeroCpu(t.name));
        }
        if t.price_per_slot.is_negative() {
            return Err(PlatformError::NegativePrice(t.name));
        }
        if self.types.iter().any(|x| x.name == t.name) {
            return Err(PlatformError::DuplicateType(t.name));
        }
        self.types.push(t);
        Ok(self.types.len() - 1)
    }

    pub fn add_instance(
        &mut self,
        name: impl Into<String>,
        type_name: &str,
    ) -> Result<usize, PlatformError> {
        let name = name.into();
        if self.instances.iter().any(|i| i.name == name) {
            return Err(PlatformError::DuplicateInstance(name));
        }
        let type_idx = self
            .types
            .iter()
            .position(|t| t.name == type_name)
            .ok_or_else(|| PlatformError::UnknownType(name.clone(), type_name.to_string()))?;
        self.instances.push(VmInstance { name, type_idx });
        Ok(self.instances.len() - 1)
    }

    pub fn types(&self) -> &[VmType] {
        &self.types
    }

    pub fn instances(&self) -> &[VmInstance] {
        &self.instances
    }

    pub fn vm_type(&self, idx: usize) -> &VmType {
        &self.types[idx]
    }

    pub fn instance_type(&self, instance: usize) -> &VmType {
        &self.types[self.instances[instance].type_idx]
    }

    /// Type indices that are actually present in the pool (have at least
    /// one instance). Averages and budget floors range over these, so
    /// duplicate instances do not skew them and absent shapes do not
    /// distort them.
    pub fn pooled_types(&self) -> Vec<usize> {
        let mut seen = vec![false; self.types.len()];
        for inst in &self.instances {
            seen[inst.type_idx] = true;
        }
        (0..self.types.len()).filter(|&i| seen[i]).collect()
    }

    /// Pooled types with enough vCPUs and memory for the job.
    pub fn eligible_types(&self, job: &Job) -> Vec<usize> {
        self.pooled_types().into_iter().filter(|&t| self.types[t].fits(job)).collect()
    }

    /// The instance set the job may run on.
    pub fn eligible_instances(&self, job: &Job) -> Vec<usize> {
        (0..self.instances.len())
            .filter(|&i| self.types[self.instances[i].type_idx].fits(job))
            .collect()
    }
}

/// Whole slots needed to run `job` on a machine of type `vm`.
///
/// An explicit per-type entry on the job wins; otherwise work is divided
/// across the type's vCPUs and rounded up so the reserved slots always
/// cover the work. Real jobs occupy at least one billing slot.
pub fn running_time(job: &Job, vm: &VmType) -> u64 {
    if job.pseudo {
        return 0;
    }
    if let Some(rt) = job.runtimes.as_ref().and_then(|m| m.get(&vm.name)) {
        return *rt;
    }
    let slots = (job.work / vm.vcpus as f64).ceil() as u64;
    slots.max(1)
}

/// Cost of running `job` on type `vm`: per-slot price times slots used.
pub fn exec_cost(job: &Job, vm: &VmType) -> Money {
    vm.price_per_slot * running_time(job, vm)
}
