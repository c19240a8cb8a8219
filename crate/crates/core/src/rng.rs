//! Seedable, splittable random streams.
//!
//! Every stochastic routine draws from a ChaCha8 stream identified by
//! `(seed, stream_index)`. Work is partitioned into fixed-size blocks with
//! one stream per block, so results do not depend on how many threads run
//! the blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Seed used by the CLI when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0x1501_A7ED;

/// Number of draws handled by one random stream in the batch drivers.
pub const BLOCK_SIZE: u64 = 16_384;

pub fn stream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Splits `samples` draws into `(stream_index, draws)` blocks.
pub fn blocks(samples: u64) -> impl Iterator<Item = (u64, u64)> {
    let count = samples.div_ceil(BLOCK_SIZE);
    (0..count).map(move |b| (b, BLOCK_SIZE.min(samples - b * BLOCK_SIZE)))
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send, F: FnOnce() -> T + Send>(workers: usize, f: F) -> T {
    match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Evaluates `job(stream_index, draws)` for every block of `samples` on
/// `workers` threads and returns the partial results in block order.
pub fn par_blocks<T, F>(samples: u64, workers: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let blocks: Vec<(u64, u64)> = blocks(samples).collect();
    with_workers(workers, || {
        blocks
            .into_par_iter()
            .map(|(index, draws)| job(index, draws))
            .collect()
    })
}
