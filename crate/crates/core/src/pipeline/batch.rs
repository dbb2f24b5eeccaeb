use std::time::Instant;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use super::PipelineError;
use crate::attest::{AttestationBackend, ProveError, Receipt};
use crate::dataio::{pack_blob, Dataset};
use crate::noise::Seed;
use crate::regression::{aggregate, LinearModel, PrivacyParams};

pub const DEFAULT_BATCH_SIZE: u64 = 1400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Batch {
    pub offset: u64,
    pub len: u64,
}

/// Contiguous, in-order partition of `0..n`. Only the last batch may be short.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchPlan {
    pub batch_size: u64,
    pub batches: Vec<Batch>,
}

pub fn plan_batches(n: u64, batch_size: u64) -> Result<BatchPlan, PipelineError> {
    if n == 0 || batch_size == 0 {
        return Err(PipelineError::InvalidPlan);
    }
    let batches = (0..n.div_ceil(batch_size))
        .map(|b| {
            let offset = b * batch_size;
            Batch { offset, len: batch_size.min(n - offset) }
        })
        .collect();
    Ok(BatchPlan { batch_size, batches })
}

impl BatchPlan {
    pub fn len(&self) -> usize {
        self.batches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.batches.iter().map(|b| b.len).sum()
    }
}

/// Noise seed for batch `index`: `SHA-256(root || index_le)`.
pub fn batch_seed(root: &Seed, index: u64) -> Seed {
    root.derive(index)
}

/// A proved batch; `blob` is the batch's own packed dataset.
#[derive(Debug, Clone)]
pub struct BatchProof {
    pub index: usize,
    pub batch: Batch,
    pub blob: Vec<u8>,
    pub receipt: Receipt,
    pub prove_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("batch {index}: {source}")]
pub struct BatchError {
    pub index: usize,
    #[source]
    pub source: ProveError,
}

/// Packs and proves one batch.
pub fn prove_batch(
    dataset: &Dataset,
    params: &PrivacyParams,
    plan: &BatchPlan,
    index: usize,
    backend: &dyn AttestationBackend,
) -> Result<BatchProof, BatchError> {
    let batch = plan.batches[index];
    let started = Instant::now();
    let part = dataset.slice(batch.offset as usize, batch.len as usize);
    let blob = pack_blob(&part).expect("batches are nonempty");
    let batch_params = params.with_seed(batch_seed(&params.seed, index as u64));
    let receipt = backend.prove(&blob, &batch_params).map_err(|source| BatchError { index, source })?;
    Ok(BatchProof { index, batch, blob, receipt, prove_ms: started.elapsed().as_secs_f64() * 1e3 })
}

/// Proves every batch on a pool of `jobs` workers. Results are in plan order.
pub fn prove_all(
    dataset: &Dataset,
    params: &PrivacyParams,
    plan: &BatchPlan,
    jobs: usize,
    backend: &dyn AttestationBackend,
) -> Result<Vec<Result<BatchProof, BatchError>>, PipelineError> {
    if plan.total() != dataset.len() as u64 {
        return Err(PipelineError::InvalidPlan);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))?;
    Ok(pool.install(|| {
        (0..plan.len())
            .into_par_iter()
            .map(|i| prove_batch(dataset, params, plan, i, backend))
            .collect()
    }))
}

/// Unweighted mean of the non-failed batch models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateOutcome {
    pub model: LinearModel,
    pub used: Vec<usize>,
    /// Batches whose private fit returned the failure output.
    pub excluded: Vec<usize>,
}

pub fn aggregate_receipts<'a, I>(receipts: I) -> Result<AggregateOutcome, PipelineError>
where
    I: IntoIterator<Item = (usize, &'a Receipt)>,
{
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    let mut models = Vec::new();
    for (i, r) in receipts {
        if r.journal.result.failed {
            warn!("batch {i}: private fit failed, excluded from aggregation");
            excluded.push(i);
        } else {
            used.push(i);
            models.push(r.journal.result);
        }
    }
    let model = aggregate(&models)?;
    Ok(AggregateOutcome { model, used, excluded })
}
