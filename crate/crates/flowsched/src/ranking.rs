//! Job prioritization: upward ranks, the random walk over the extended
//! DAG, its stationary distribution, and the sorted priority list.
//!
//! Two schemes are supported. The plain scheme accumulates average
//! running times along the longest downstream path. The weighted scheme
//! scales each job's average time by its stationary probability in a
//! random walk on the back-edged extended DAG, so jobs that are more
//! entangled with the rest of the topology get pulled forward among
//! otherwise-unordered peers.

use crate::dag::ExtendedDag;
use crate::platform::{running_time, VmCatalog};

#[derive(Debug, thiserror::Error)]
pub enum RankingError {
    #[error("job `{0}` fits no vm type in the pool")]
    Unschedulable(String),
    #[error("transition row {row} sums to {sum}, expected 1")]
    NotStochastic { row: usize, sum: f64 },
    #[error("node {0} has no successors; every random-walk state needs at least one")]
    NoSuccessors(usize),
    #[error("stationary solve failed: residual {residual:e} after {iterations} iterations")]
    NumericalFailure { residual: f64, iterations: usize },
    #[error(transparent)]
    Dag(#[from] crate::dag::DagError),
}

/// Nodes above this size switch from the direct linear solve to the
/// averaged power iteration.
pub const DENSE_SOLVE_LIMIT: usize = 2000;

const RESIDUAL_TOLERANCE: f64 = 1e-9;
const MAX_POWER_ITERATIONS: usize = 100_000;

/// Whole-slot average running time of a job over its eligible VM types.
///
/// The mean is taken over type shapes present in the pool (instances of
/// the same type do not skew it) and rounded up to whole slots, matching
/// the slot-granular runtime model. Pseudo jobs average to zero.
pub fn avg_exec_slots(
    job: &crate::dag::Job,
    catalog: &VmCatalog,
) -> Result<u64, RankingError> {
    if job.pseudo {
        return Ok(0);
    }
    let eligible = catalog.eligible_types(job);
    if eligible.is_empty() {
        return Err(RankingError::Unschedulable(job.name.clone()));
    }
    let sum: u64 = eligible.iter().map(|&t| running_time(job, catalog.vm_type(t))).sum();
    let n = eligible.len() as u64;
    Ok(sum.div_ceil(n))
}

/// Row-stochastic transition matrix of the random walk over an extended
/// DAG plus the exit-to-entry back edge.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl TransitionMatrix {
    /// Uniform transitions to immediate successors; the pseudo exit
    /// walks back to the pseudo entry with probability one.
    pub fn from_extended(ext: &ExtendedDag) -> Result<Self, RankingError> {
        let n = ext.dag.job_count();
        let mut rows = Vec::with_capacity(n);
        for j in 0..n {
            let succ = ext.dag.successors(j)?;
            let row: Vec<(usize, f64)> = if j == ext.exit {
                vec![(ext.entry, 1.0)]
            } else if succ.is_empty() {
                return Err(RankingError::NoSuccessors(j));
            } else {
                let p = 1.0 / succ.len() as f64;
                succ.iter().map(|&s| (s, p)).collect()
            };
            rows.push(row);
        }
        Ok(TransitionMatrix { rows })
    }

    /// Builds a matrix from explicit rows, checking row-stochasticity.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<Self, RankingError> {
        for (i, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(RankingError::NoSuccessors(i));
            }
            let sum: f64 = row.iter().map(|&(_, p)| p).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(RankingError::NotStochastic { row: i, sum });
            }
        }
        Ok(TransitionMatrix { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, j: usize) -> &[(usize, f64)] {
        &self.rows[j]
    }

    pub fn row_sum(&self, j: usize) -> f64 {
        self.rows[j].iter().map(|&(_, p)| p).sum()
    }

    /// Left-multiplies: out = x P.
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (j, row) in self.rows.iter().enumerate() {
            let xj = x[j];
            if xj != 0.0 {
                for &(i, p) in row {
                    out[i] += xj * p;
                }
            }
        }
    }
}

/// Infinity norm of the stationarity defect `pi P - pi`.
pub fn stationary_residual(p: &TransitionMatrix, pi: &[f64]) -> f64 {
    let mut next = vec![0.0; pi.len()];
    p.apply(pi, &mut next);
    next.iter().zip(pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Solves `pi P = pi`, `sum pi = 1` for an irreducible chain.
///
/// Small chains go through a direct linear solve; larger ones through
/// the averaged power iteration. The result is verified against the
/// residual tolerance either way.
pub fn stationary_distribution(p: &TransitionMatrix) -> Result<Vec<f64>, RankingError> {
    if p.len() <= DENSE_SOLVE_LIMIT {
        stationary_dense(p)
    } else {
        stationary_averaged_power(p)
    }
}

/// Direct solve of `(P^T - I) pi = 0` with the normalization row
/// replacing the last equation; partial-pivot Gaussian elimination.
pub fn stationary_dense(p: &TransitionMatrix) -> Result<Vec<f64>, RankingError> {
    let n = p.len();
    let mut a = vec![0.0f64; n * n];
    for (j, row) in p.rows.iter().enumerate() {
        for &(i, prob) in row {
            a[i * n + j] += prob; // transpose
        }
    }
    for d in 0..n {
        a[d * n + d] -= 1.0;
    }
    for c in 0..n {
        a[(n - 1) * n + c] = 1.0;
    }
    let mut b = vec![0.0f64; n];
    b[n - 1] = 1.0;

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                a[r1 * n + col]
                    .abs()
                    .partial_cmp(&a[r2 * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[pivot_row * n + col].abs() < 1e-14 {
            return Err(RankingError::NumericalFailure { residual: f64::INFINITY, iterations: 0 });
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap(col * n + c, pivot_row * n + c);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor != 0.0 {
                for c in col..n {
                    a[r * n + c] -= factor * a[col * n + c];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    let mut pi = vec![0.0f64; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r * n + c] * pi[c];
        }
        pi[r] = acc / a[r * n + r];
    }
    finalize_stationary(p, pi, 0)
}

/// Power iteration with pairwise averaging: each step maps the iterate
/// through `(I + P) / 2`, which shares the fixed point of `P` while
/// staying convergent on periodic walks (every equal-path DAG produces
/// one). Residuals are always measured against the original `P`.
pub fn stationary_averaged_power(p: &TransitionMatrix) -> Result<Vec<f64>, RankingError> {
    let n = p.len();
    let mut x = vec![1.0 / n as f64; n];
    let mut px = vec![0.0f64; n];
    for iter in 1..=MAX_POWER_ITERATIONS {
        p.apply(&x, &mut px);
        let mut residual = 0.0f64;
        for i in 0..n {
            residual = residual.max((px[i] - x[i]).abs());
        }
        if residual <= 0.5 * RESIDUAL_TOLERANCE {
            return finalize_stationary(p, x, iter);
        }
        for i in 0..n {
            x[i] = 0.5 * (x[i] + px[i]);
        }
    }
    let residual = stationary_residual(p, &x);
    Err(RankingError::NumericalFailure { residual, iterations: MAX_POWER_ITERATIONS })
}

fn finalize_stationary(
    p: &TransitionMatrix,
    mut pi: Vec<f64>,
    iterations: usize,
) -> Result<Vec<f64>, RankingError> {
    let sum: f64 = pi.iter().sum();
    if !(sum.is_finite() && sum > 0.0) {
        return Err(RankingError::NumericalFailure { residual: f64::INFINITY, iterations });
    }
    for v in &mut pi {
        *v /= sum;
    }
    let residual = stationary_residual(p, &pi);
    if residual > RESIDUAL_TOLERANCE || pi.iter().any(|&v| v <= 0.0) {
        return Err(RankingError::NumericalFailure { residual, iterations });
    }
    Ok(pi)
}

/// Plain upward ranks over the extended DAG: whole-slot average time
/// plus the largest successor rank, accumulated from the exit upward.
pub fn plain_upward_ranks(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
) -> Result<Vec<f64>, RankingError> {
    upward_ranks(ext, catalog, None)
}

/// Weighted upward ranks: like the plain scheme but each job's average
/// time is scaled by its stationary probability `pi[j]`.
pub fn weighted_upward_ranks(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    pi: &[f64],
) -> Result<Vec<f64>, RankingError> {
    upward_ranks(ext, catalog, Some(pi))
}

fn upward_ranks(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    pi: Option<&[f64]>,
) -> Result<Vec<f64>, RankingError> {
    let n = ext.dag.job_count();
    let order = ext.dag.topological_order()?;
    let mut ranks = vec![0.0f64; n];
    for &j in order.iter().rev() {
        let avg = avg_exec_slots(ext.dag.job(j), catalog)? as f64;
        let own = match pi {
            Some(pi) => avg * pi[j],
            None => avg,
        };
        let tail = ext
            .dag
            .successors(j)?
            .iter()
            .map(|&s| ranks[s])
            .fold(f64::NEG_INFINITY, f64::max);
        ranks[j] = if tail.is_finite() { own + tail } else { own };
    }
    Ok(ranks)
}

/// Relative gap below which two rank values count as an exact tie.
/// Symmetric jobs get identical ranks up to float noise from the
/// stationary solve; this keeps their tie-break on job index stable.
const RANK_TIE_TOLERANCE: f64 = 1e-9;

/// Sorts real jobs by non-increasing rank; ties (within tolerance) break
/// on ascending job index. Pseudo nodes are excluded: they are ranked
/// for propagation only and never scheduled.
pub fn priority_list(ext: &ExtendedDag, ranks: &[f64]) -> Vec<usize> {
    let mut jobs = ext.real_jobs();
    jobs.sort_by(|&a, &b| {
        ranks[b].partial_cmp(&ranks[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    // merge adjacent near-ties into groups, then order each group by index
    let mut out = Vec::with_capacity(jobs.len());
    let mut group: Vec<usize> = Vec::new();
    for &j in &jobs {
        let tied = group.last().is_some_and(|&prev| {
            let scale = ranks[prev].abs().max(1.0);
            (ranks[prev] - ranks[j]).abs() <= RANK_TIE_TOLERANCE * scale
        });
        if !tied && !group.is_empty() {
            group.sort_unstable();
            out.append(&mut group);
        }
        group.push(j);
    }
    group.sort_unstable();
    out.append(&mut group);
    out
}

/// Per-job rank value map paired with the sorted order, as produced by
/// one of the two schemes.
#[derive(Debug, Clone)]
pub struct PriorityRanking {
    pub ranks: Vec<f64>,
    pub order: Vec<usize>,
}

/// Convenience: compute ranks under the chosen scheme and sort.
pub fn rank_jobs(
    ext: &ExtendedDag,
    catalog: &VmCatalog,
    weighted: bool,
) -> Result<PriorityRanking, RankingError> {
    let ranks = if weighted {
        let p = TransitionMatrix::from_extended(ext)?;
        let pi = stationary_distribution(&p)?;
        weighted_upward_ranks(ext, catalog, &pi)?
    } else {
        plain_upward_ranks(ext, catalog)?
    };
    let order = priority_list(ext, &ranks);
    Ok(PriorityRanking { ranks, order })
}
