//! Command-line front end: workload generation, single-instance
//! scheduling, the benchmark matrix, LP export and the tiny-instance
//! oracle.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use flowsched::bench::{report_csv, report_text, run_matrix, Algorithm, ExperimentSpec, NamedWorkload};
use flowsched::budget::{budget_levels, phi_grid, split, SplitMode};
use flowsched::mip::{build_model, export_lp, solve_bruteforce};
use flowsched::ranking::rank_jobs;
use flowsched::scheduler::{schedule_greedy, validate_schedule};
use flowsched::workloads::{
    gen_fft, gen_gaussian, gen_random, gen_vm_pool, import_dax, load_catalog, load_workflow,
    save_catalog, save_workflow, Sufficiency, WorkSampler,
};
use flowsched::{ec2_types, merge_workflows, schedule_fastest_finish, Money, VmCatalog, WorkflowDag};

#[derive(Parser)]
#[command(
    name = "flowsched",
    about = "Budget-constrained DAG workflow scheduling on heterogeneous VMs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate workloads and VM instance pools.
    Gen(GenArgs),
    /// Schedule one workflow onto one catalog and print the table.
    Schedule(ScheduleArgs),
    /// Run the benchmark matrix and write CSV plus a text report.
    Bench(BenchArgs),
    /// Export the schedule model as CPLEX-dialect LP text.
    ExportMip(ExportMipArgs),
    /// Exhaustively solve a tiny instance to optimality.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    what: GenWhat,
}

#[derive(Subcommand)]
enum GenWhat {
    /// Generate a workflow DAG.
    Workflow(GenWorkflowArgs),
    /// Draw a seeded VM instance pool over a type catalog.
    Pool(GenPoolArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum WorkflowKind {
    Fft,
    Gaussian,
    Random,
}

#[derive(Args)]
struct GenWorkflowArgs {
    /// Workflow family.
    #[arg(long, value_enum)]
    kind: WorkflowKind,
    /// FFT size (power of two).
    #[arg(long)]
    m: Option<u64>,
    /// Matrix rows for the elimination workflow.
    #[arg(long)]
    n: Option<u64>,
    /// Job count for random workflows.
    #[arg(long)]
    jobs: Option<usize>,
    /// Edge probability for random workflows.
    #[arg(long, default_value_t = 0.2)]
    density: f64,
    /// Work sampler range, `lo:hi` vCPU-slots.
    #[arg(long, default_value = "10:100")]
    work: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenPoolArgs {
    /// Type catalog JSON; the built-in 23-type catalog when omitted.
    #[arg(long)]
    types: Option<PathBuf>,
    /// Number of jobs the pool will serve.
    #[arg(long)]
    jobs: usize,
    #[arg(long, default_value = "normal")]
    sufficiency: Sufficiency,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    workflow: PathBuf,
    #[arg(long)]
    catalog: PathBuf,
    /// Absolute budget; mutually exclusive with --phi.
    #[arg(long, conflicts_with = "phi")]
    budget: Option<String>,
    /// Budget level factor in [0, 1] between the cheapest total and the
    /// fastest-finish schedule cost.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long, default_value = "plain")]
    priority: PriorityArg,
    #[arg(long, default_value = "uniform")]
    split: SplitArg,
    /// Recorded in JSON output; scheduling itself is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PriorityArg {
    Plain,
    Weighted,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Uniform,
    Proportional,
}

impl From<SplitArg> for SplitMode {
    fn from(v: SplitArg) -> SplitMode {
        match v {
            SplitArg::Uniform => SplitMode::Uniform,
            SplitArg::Proportional => SplitMode::Proportional,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated workloads: `fft:M`, `gaussian:N`,
    /// `random:JOBS:DENSITY`, or paths to workflow/DAX files.
    #[arg(long, value_delimiter = ',')]
    workload_set: Vec<String>,
    /// Sufficiency levels to sweep.
    #[arg(long, value_delimiter = ',', default_values = ["scarce", "normal", "sufficient"])]
    sufficiency: Vec<Sufficiency>,
    /// Budget level factors.
    #[arg(long, value_delimiter = ',', default_values = ["0", "0.25", "0.5", "0.75", "1"])]
    phi_grid: Vec<String>,
    /// Algorithms, e.g. `plain-uniform,weighted-uniform`.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    /// Work sampler range for generated workloads.
    #[arg(long, default_value = "10:100")]
    work: String,
    /// Type catalog JSON; built-in catalog when omitted.
    #[arg(long)]
    types: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output prefix; writes `<out>.csv` and `<out>.txt`.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct ExportMipArgs {
    #[arg(long)]
    workflow: PathBuf,
    #[arg(long)]
    catalog: PathBuf,
    #[arg(long)]
    budget: String,
    /// Slot horizon; twice the fastest-finish makespan when omitted.
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    workflow: PathBuf,
    #[arg(long)]
    catalog: PathBuf,
    #[arg(long)]
    budget: String,
    #[arg(long, default_value_t = 25)]
    horizon: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => match args.what {
            GenWhat::Workflow(a) => gen_workflow(a),
            GenWhat::Pool(a) => gen_pool(a),
        },
        Command::Schedule(a) => schedule_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::ExportMip(a) => export_mip_cmd(a),
        Command::Oracle(a) => oracle_cmd(a),
    }
}

fn parse_work_range(s: &str) -> Result<(u64, u64)> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| anyhow!("work range must be `lo:hi`"))?;
    Ok((lo.parse().context("work lower bound")?, hi.parse().context("work upper bound")?))
}

fn parse_money(s: &str) -> Result<Money> {
    Money::parse_decimal(s).map_err(|e| anyhow!("{e}"))
}

fn read_workflow(path: &Path) -> Result<WorkflowDag> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let dag = if path.extension().is_some_and(|e| e == "xml" || e == "dax") {
        import_dax(&text)?
    } else {
        load_workflow(&text)?
    };
    Ok(dag)
}

fn read_catalog(path: &Path) -> Result<VmCatalog> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(load_catalog(&text)?)
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn gen_workflow(a: GenWorkflowArgs) -> Result<()> {
    let (lo, hi) = parse_work_range(&a.work)?;
    let mut sampler = WorkSampler::uniform(lo, hi, a.seed);
    let mut meta = BTreeMap::new();
    meta.insert("seed".to_string(), a.seed.to_string());
    meta.insert("work".to_string(), format!("{lo}:{hi}"));
    let dag = match a.kind {
        WorkflowKind::Fft => {
            let m = a.m.ok_or_else(|| anyhow!("--kind fft requires --m"))?;
            meta.insert("generator".to_string(), format!("fft m={m}"));
            gen_fft(m, &mut sampler)?
        }
        WorkflowKind::Gaussian => {
            let n = a.n.ok_or_else(|| anyhow!("--kind gaussian requires --n"))?;
            meta.insert("generator".to_string(), format!("gaussian n={n}"));
            gen_gaussian(n, &mut sampler)?
        }
        WorkflowKind::Random => {
            let jobs = a.jobs.ok_or_else(|| anyhow!("--kind random requires --jobs"))?;
            meta.insert("generator".to_string(), format!("random jobs={jobs} density={}", a.density));
            gen_random(jobs, a.density, &mut sampler, a.seed)?
        }
    };
    let text = save_workflow(&dag, Some(meta))?;
    write_or_print(a.out.as_deref(), &text)?;
    eprintln!("generated {} jobs, {} edges", dag.job_count(), dag.edge_count());
    Ok(())
}

fn load_types(path: Option<&Path>) -> Result<Vec<flowsched::VmType>> {
    match path {
        Some(p) => Ok(read_catalog(p)?.types().to_vec()),
        None => Ok(ec2_types()),
    }
}

fn gen_pool(a: GenPoolArgs) -> Result<()> {
    let types = load_types(a.types.as_deref())?;
    let pool = gen_vm_pool(&types, a.jobs, a.sufficiency, a.seed)?;
    let text = save_catalog(&pool)?;
    write_or_print(a.out.as_deref(), &text)?;
    eprintln!("generated {} instances over {} types", pool.instances().len(), types.len());
    Ok(())
}

fn schedule_cmd(a: ScheduleArgs) -> Result<()> {
    let dag = read_workflow(&a.workflow)?;
    let catalog = read_catalog(&a.catalog)?;
    if catalog.instances().is_empty() {
        bail!("catalog has no instances; draw a pool first (see `gen pool`)");
    }
    let ext = merge_workflows(&[dag])?;
    let budget = match (&a.budget, &a.phi) {
        (Some(b), None) => parse_money(b)?,
        (None, Some(phi)) => {
            let levels = budget_levels(&ext, &catalog)?;
            levels.level(parse_money(phi)?)
        }
        (None, None) => bail!("one of --budget or --phi is required"),
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    let weighted = matches!(a.priority, PriorityArg::Weighted);
    let ranking = rank_jobs(&ext, &catalog, weighted)?;
    let plan = split(&ext, &catalog, budget, a.split.into())?;
    let label = format!(
        "{}-{}",
        if weighted { "weighted" } else { "plain" },
        SplitMode::from(a.split)
    );
    let schedule = schedule_greedy(&ext, &catalog, plan, &ranking.order, label)?;
    let violations = validate_schedule(&schedule, &ext, &catalog, Some(budget));
    if !violations.is_empty() {
        bail!("schedule failed validation: {}", violations[0]);
    }
    match a.format {
        OutputFormat::Csv => write_or_print(a.out.as_deref(), &schedule.to_csv(&ext, &catalog))?,
        OutputFormat::Json => {
            let mut doc = schedule.to_json(&ext, &catalog);
            doc["budget"] = serde_json::json!(budget.to_f64());
            doc["seed"] = serde_json::json!(a.seed);
            write_or_print(a.out.as_deref(), &(doc.to_string() + "\n"))?;
        }
    }
    eprintln!(
        "{}: makespan {}, cost {} within budget {}",
        schedule.algorithm, schedule.makespan, schedule.total_cost, budget
    );
    Ok(())
}

fn parse_workload_descriptor(desc: &str, work: (u64, u64), seed: u64) -> Result<NamedWorkload> {
    let mut sampler = WorkSampler::uniform(
        work.0,
        work.1,
        flowsched::bench::derive_seed(seed, &[desc, "work"]),
    );
    let parts: Vec<&str> = desc.split(':').collect();
    let dag = match parts.as_slice() {
        ["fft", m] => gen_fft(m.parse().context("fft size")?, &mut sampler)?,
        ["gaussian", n] => gen_gaussian(n.parse().context("matrix rows")?, &mut sampler)?,
        ["random", jobs, density] => gen_random(
            jobs.parse().context("job count")?,
            density.parse().context("edge density")?,
            &mut sampler,
            flowsched::bench::derive_seed(seed, &[desc, "edges"]),
        )?,
        [path] if Path::new(path).exists() => read_workflow(Path::new(path))?,
        _ => bail!("unknown workload descriptor `{desc}`"),
    };
    Ok(NamedWorkload { name: desc.replace(':', "-"), dag })
}

fn bench_cmd(a: BenchArgs) -> Result<()> {
    if a.workload_set.is_empty() {
        bail!("--workload-set requires at least one workload");
    }
    let work = parse_work_range(&a.work)?;
    let workloads = a
        .workload_set
        .iter()
        .map(|d| parse_workload_descriptor(d, work, a.seed))
        .collect::<Result<Vec<_>>>()?;
    let algorithms = match &a.algorithms {
        None => Algorithm::ALL.to_vec(),
        Some(labels) => labels
            .iter()
            .map(|l| l.parse().map_err(|e: String| anyhow!(e)))
            .collect::<Result<Vec<_>>>()?,
    };
    let phi_grid = if a.phi_grid.is_empty() {
        phi_grid()
    } else {
        a.phi_grid.iter().map(|p| parse_money(p)).collect::<Result<Vec<_>>>()?
    };
    let spec = ExperimentSpec {
        workloads,
        vm_types: load_types(a.types.as_deref())?,
        sufficiencies: a.sufficiency.clone(),
        phi_grid,
        algorithms,
        seed: a.seed,
    };
    let result = run_matrix(&spec)?;
    let csv_path = a.out.with_extension("csv");
    let txt_path = a.out.with_extension("txt");
    fs::write(&csv_path, report_csv(&result))
        .with_context(|| format!("writing {}", csv_path.display()))?;
    let text = report_text(&result);
    fs::write(&txt_path, &text).with_context(|| format!("writing {}", txt_path.display()))?;
    print!("{text}");
    eprintln!("wrote {} and {}", csv_path.display(), txt_path.display());
    Ok(())
}

fn export_mip_cmd(a: ExportMipArgs) -> Result<()> {
    let dag = read_workflow(&a.workflow)?;
    let catalog = read_catalog(&a.catalog)?;
    let ext = merge_workflows(&[dag])?;
    let budget = parse_money(&a.budget)?;
    let horizon = match a.horizon {
        Some(t) => t,
        None => {
            let heft = schedule_fastest_finish(&ext, &catalog)?;
            2 * heft.makespan.max(1)
        }
    };
    let model = build_model(&ext, &catalog, budget, horizon)?;
    let text = export_lp(&model);
    write_or_print(a.out.as_deref(), &text)?;
    eprintln!(
        "model: {} variables, {} constraints, horizon {horizon}",
        model.variable_count(),
        model.constraints.len()
    );
    Ok(())
}

fn oracle_cmd(a: OracleArgs) -> Result<()> {
    let dag = read_workflow(&a.workflow)?;
    let catalog = read_catalog(&a.catalog)?;
    let ext = merge_workflows(&[dag])?;
    let budget = parse_money(&a.budget)?;
    let schedule = solve_bruteforce(&ext, &catalog, budget, a.horizon)?;
    match a.format {
        OutputFormat::Csv => write_or_print(a.out.as_deref(), &schedule.to_csv(&ext, &catalog))?,
        OutputFormat::Json => {
            write_or_print(a.out.as_deref(), &(schedule.to_json(&ext, &catalog).to_string() + "\n"))?
        }
    }
    eprintln!("optimal makespan {}, cost {}", schedule.makespan, schedule.total_cost);
    Ok(())
}
