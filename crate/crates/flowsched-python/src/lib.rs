//! Python bindings: workflows, catalogs, ranking, scheduling, budget
//! levels, LP export and the tiny-instance oracle.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use flowsched::bench as fbench;
use flowsched::budget as fbudget;
use flowsched::mip as fmip;
use flowsched::ranking as franking;
use flowsched::scheduler as fsched;
use flowsched::workloads as fwork;
use flowsched::{merge_workflows, ExtendedDag, Money, VmCatalog, WorkflowDag};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn money(v: f64) -> PyResult<Money> {
    Money::from_f64_decimal(v).map_err(err)
}

/// A workflow DAG of jobs with precedence edges.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Workflow {
    inner: WorkflowDag,
}

#[pymethods]
impl Workflow {
    /// Parse the workflow JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Workflow { inner: fwork::load_workflow(text).map_err(err)? })
    }

    /// Import the scientific-workflow XML subset.
    #[staticmethod]
    fn from_dax(text: &str) -> PyResult<Self> {
        Ok(Workflow { inner: fwork::import_dax(text).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (m, work_lo=10, work_hi=100, seed=42))]
    fn fft(m: u64, work_lo: u64, work_hi: u64, seed: u64) -> PyResult<Self> {
        let mut sampler = fwork::WorkSampler::uniform(work_lo, work_hi, seed);
        Ok(Workflow { inner: fwork::gen_fft(m, &mut sampler).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n, work_lo=10, work_hi=100, seed=42))]
    fn gaussian(n: u64, work_lo: u64, work_hi: u64, seed: u64) -> PyResult<Self> {
        let mut sampler = fwork::WorkSampler::uniform(work_lo, work_hi, seed);
        Ok(Workflow { inner: fwork::gen_gaussian(n, &mut sampler).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (jobs, density=0.2, work_lo=10, work_hi=100, seed=42))]
    fn random(jobs: usize, density: f64, work_lo: u64, work_hi: u64, seed: u64) -> PyResult<Self> {
        let mut sampler = fwork::WorkSampler::uniform(work_lo, work_hi, seed);
        Ok(Workflow { inner: fwork::gen_random(jobs, density, &mut sampler, seed).map_err(err)? })
    }

    fn job_count(&self) -> usize {
        self.inner.job_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn job_names(&self) -> Vec<String> {
        self.inner.jobs().iter().map(|j| j.name.clone()).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        fwork::save_workflow(&self.inner, None).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Workflow({} jobs, {} edges)", self.inner.job_count(), self.inner.edge_count())
    }
}

/// VM type shapes plus the leased instance pool.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Catalog {
    inner: VmCatalog,
}

#[pymethods]
impl Catalog {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Catalog { inner: fwork::load_catalog(text).map_err(err)? })
    }

    /// The built-in 23-type on-demand catalog (no instances drawn yet).
    #[staticmethod]
    fn builtin() -> PyResult<Self> {
        Ok(Catalog { inner: VmCatalog::new(fwork::ec2_types()).map_err(err)? })
    }

    /// Draw a seeded instance pool over this catalog's types.
    #[pyo3(signature = (jobs, sufficiency="normal", seed=42))]
    fn pool(&self, jobs: usize, sufficiency: &str, seed: u64) -> PyResult<Catalog> {
        let suff: fwork::Sufficiency = sufficiency.parse().map_err(err)?;
        Ok(Catalog {
            inner: fwork::gen_vm_pool(self.inner.types(), jobs, suff, seed).map_err(err)?,
        })
    }

    fn type_count(&self) -> usize {
        self.inner.types().len()
    }

    fn instance_count(&self) -> usize {
        self.inner.instances().len()
    }

    fn to_json(&self) -> PyResult<String> {
        fwork::save_catalog(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Catalog({} types, {} instances)",
            self.inner.types().len(),
            self.inner.instances().len()
        )
    }
}

/// A computed placement of every job.
#[pyclass]
struct Schedule {
    #[pyo3(get)]
    algorithm: String,
    #[pyo3(get)]
    makespan: u64,
    #[pyo3(get)]
    total_cost: f64,
    rows: Vec<Row>,
    csv: String,
}

#[derive(Clone)]
struct Row {
    job: String,
    budget: Option<f64>,
    cost: f64,
    saved: Option<f64>,
    start: u64,
    finish: u64,
    vm: String,
}

#[pymethods]
impl Schedule {
    /// One dict per job in placement order.
    fn rows(&self, py: Python<'_>) -> PyResult<Vec<Py<pyo3::types::PyDict>>> {
        use pyo3::types::PyDict;
        self.rows
            .iter()
            .map(|r| {
                let d = PyDict::new(py);
                d.set_item("job", &r.job)?;
                d.set_item("budget", r.budget)?;
                d.set_item("cost", r.cost)?;
                d.set_item("saved", r.saved)?;
                d.set_item("start", r.start)?;
                d.set_item("finish", r.finish)?;
                d.set_item("vm", &r.vm)?;
                Ok(d.into())
            })
            .collect()
    }

    fn to_csv(&self) -> String {
        self.csv.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Schedule({}, makespan={}, cost={})",
            self.algorithm, self.makespan, self.total_cost
        )
    }
}

fn wrap_schedule(s: &fsched::Schedule, ext: &ExtendedDag, catalog: &VmCatalog) -> Schedule {
    let rows = s
        .order
        .iter()
        .map(|&j| {
            let a = s.assignment(j).expect("ordered job assigned");
            Row {
                job: ext.dag.job(j).name.clone(),
                budget: a.budget.map(Money::to_f64),
                cost: a.cost.to_f64(),
                saved: a.saved.map(Money::to_f64),
                start: a.start,
                finish: a.finish,
                vm: catalog.instances()[a.instance].name.clone(),
            }
        })
        .collect();
    Schedule {
        algorithm: s.algorithm.clone(),
        makespan: s.makespan,
        total_cost: s.total_cost.to_f64(),
        rows,
        csv: s.to_csv(ext, catalog),
    }
}

fn extend(wf: &Workflow) -> PyResult<ExtendedDag> {
    merge_workflows(&[wf.inner.clone()]).map_err(err)
}

/// Plain upward ranks per job name.
#[pyfunction]
fn plain_ranks(wf: &Workflow, catalog: &Catalog) -> PyResult<BTreeMap<String, f64>> {
    let ext = extend(wf)?;
    let ranks = franking::plain_upward_ranks(&ext, &catalog.inner).map_err(err)?;
    Ok(named_real(&ext, &ranks))
}

/// Random-walk-weighted upward ranks per job name.
#[pyfunction]
fn weighted_ranks(wf: &Workflow, catalog: &Catalog) -> PyResult<BTreeMap<String, f64>> {
    let ext = extend(wf)?;
    let p = franking::TransitionMatrix::from_extended(&ext).map_err(err)?;
    let pi = franking::stationary_distribution(&p).map_err(err)?;
    let ranks = franking::weighted_upward_ranks(&ext, &catalog.inner, &pi).map_err(err)?;
    Ok(named_real(&ext, &ranks))
}

fn named_real(ext: &ExtendedDag, values: &[f64]) -> BTreeMap<String, f64> {
    ext.real_jobs()
        .into_iter()
        .map(|j| (ext.dag.job(j).name.clone(), values[j]))
        .collect()
}

/// Stationary probabilities of the random walk on the extended DAG
/// (pseudo entry/exit included).
#[pyfunction]
fn stationary(wf: &Workflow) -> PyResult<BTreeMap<String, f64>> {
    let ext = extend(wf)?;
    let p = franking::TransitionMatrix::from_extended(&ext).map_err(err)?;
    let pi = franking::stationary_distribution(&p).map_err(err)?;
    Ok((0..ext.dag.job_count()).map(|j| (ext.dag.job(j).name.clone(), pi[j])).collect())
}

/// Scheduling order of job names under the chosen priority scheme.
#[pyfunction]
#[pyo3(signature = (wf, catalog, weighted=false))]
fn priority_order(wf: &Workflow, catalog: &Catalog, weighted: bool) -> PyResult<Vec<String>> {
    let ext = extend(wf)?;
    let ranking = franking::rank_jobs(&ext, &catalog.inner, weighted).map_err(err)?;
    Ok(ranking.order.iter().map(|&j| ext.dag.job(j).name.clone()).collect())
}

/// Budget endpoints: the aggregate per-job floor and the cost of the
/// cost-oblivious fastest-finish schedule.
#[pyfunction]
fn budget_levels(wf: &Workflow, catalog: &Catalog) -> PyResult<BTreeMap<String, f64>> {
    let ext = extend(wf)?;
    let levels = fbudget::budget_levels(&ext, &catalog.inner).map_err(err)?;
    Ok([("d_min".to_string(), levels.d_min.to_f64()), ("d_max".to_string(), levels.d_max.to_f64())]
        .into_iter()
        .collect())
}

/// Greedy budgeted scheduling; pass either an absolute `budget` or a
/// level factor `phi` in [0, 1].
#[pyfunction]
#[pyo3(signature = (wf, catalog, budget=None, phi=None, weighted=false, split="uniform"))]
fn schedule(
    wf: &Workflow,
    catalog: &Catalog,
    budget: Option<f64>,
    phi: Option<f64>,
    weighted: bool,
    split: &str,
) -> PyResult<Schedule> {
    let ext = extend(wf)?;
    let budget = match (budget, phi) {
        (Some(b), None) => money(b)?,
        (None, Some(p)) => {
            let levels = fbudget::budget_levels(&ext, &catalog.inner).map_err(err)?;
            levels.level(money(p)?)
        }
        _ => return Err(PyValueError::new_err("pass exactly one of budget or phi")),
    };
    let mode: fbudget::SplitMode = split.parse().map_err(err)?;
    let ranking = franking::rank_jobs(&ext, &catalog.inner, weighted).map_err(err)?;
    let plan = fbudget::split(&ext, &catalog.inner, budget, mode).map_err(err)?;
    let label = format!("{}-{mode}", if weighted { "weighted" } else { "plain" });
    let s = fsched::schedule_greedy(&ext, &catalog.inner, plan, &ranking.order, label)
        .map_err(err)?;
    let violations = fsched::validate_schedule(&s, &ext, &catalog.inner, Some(budget));
    if let Some(v) = violations.first() {
        return Err(PyValueError::new_err(format!("schedule failed validation: {v}")));
    }
    Ok(wrap_schedule(&s, &ext, &catalog.inner))
}

/// The cost-oblivious fastest-finish baseline (no budget cap).
#[pyfunction]
fn fastest_finish(wf: &Workflow, catalog: &Catalog) -> PyResult<Schedule> {
    let ext = extend(wf)?;
    let s = fsched::schedule_fastest_finish(&ext, &catalog.inner).map_err(err)?;
    Ok(wrap_schedule(&s, &ext, &catalog.inner))
}

/// Exhaustive optimum for tiny instances (few jobs, few VMs).
#[pyfunction]
#[pyo3(signature = (wf, catalog, budget, horizon=25))]
fn oracle(wf: &Workflow, catalog: &Catalog, budget: f64, horizon: u64) -> PyResult<Schedule> {
    let ext = extend(wf)?;
    let s = fmip::solve_bruteforce(&ext, &catalog.inner, money(budget)?, horizon).map_err(err)?;
    Ok(wrap_schedule(&s, &ext, &catalog.inner))
}

/// CPLEX-dialect LP text of the schedule model.
#[pyfunction]
fn export_lp(wf: &Workflow, catalog: &Catalog, budget: f64, horizon: u64) -> PyResult<String> {
    let ext = extend(wf)?;
    let model = fmip::build_model(&ext, &catalog.inner, money(budget)?, horizon).map_err(err)?;
    Ok(fmip::export_lp(&model))
}

/// Average ranked value over rank-1..rank-4 counts.
#[pyfunction]
fn compute_ar(rank_counts: [u64; 4], n_cases: u64) -> PyResult<f64> {
    fbench::compute_ar(rank_counts, n_cases).map_err(err)
}

#[pymodule]
fn flowsched_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Workflow>()?;
    m.add_class::<Catalog>()?;
    m.add_class::<Schedule>()?;
    m.add_function(wrap_pyfunction!(plain_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(stationary, m)?)?;
    m.add_function(wrap_pyfunction!(priority_order, m)?)?;
    m.add_function(wrap_pyfunction!(budget_levels, m)?)?;
    m.add_function(wrap_pyfunction!(schedule, m)?)?;
    m.add_function(wrap_pyfunction!(fastest_finish, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(export_lp, m)?)?;
    m.add_function(wrap_pyfunction!(compute_ar, m)?)?;
    Ok(())
}
