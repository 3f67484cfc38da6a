//! Deterministic block-parallel sampling.
//!
//! Samples are cut into fixed blocks of `BLOCK`; block `b` draws from the
//! ChaCha8 stream `b` of the master seed. Results are concatenated in block
//! order, so output is identical for every thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

pub const BLOCK: u64 = 64;

pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Runs `f(block, count)` over all blocks covering `samples` and concatenates
/// the per-block outputs in order. `threads = Some(1)` forces the sequential
/// path.
pub fn map_blocks<T, F>(samples: u64, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<Vec<T>> + Sync + Send,
{
    let blocks = samples.div_ceil(BLOCK);
    let count = |b: u64| BLOCK.min(samples - b * BLOCK);
    let parts: Vec<Result<Vec<T>>> = if threads == Some(1) {
        (0..blocks).map(|b| f(b, count(b))).collect()
    } else {
        run_parallel(blocks, threads, &|b| f(b, count(b)))
    };
    let mut out = Vec::with_capacity(samples as usize);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[cfg(feature = "parallel")]
fn run_parallel<T: Send>(blocks: u64, threads: Option<usize>, f: &(dyn Fn(u64) -> Result<Vec<T>> + Sync)) -> Vec<Result<Vec<T>>> {
    use rayon::prelude::*;
    let go = || (0..blocks).into_par_iter().map(f).collect();
    match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(go),
            Err(_) => go(),
        },
        None => go(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_parallel<T: Send>(blocks: u64, _threads: Option<usize>, f: &(dyn Fn(u64) -> Result<Vec<T>> + Sync)) -> Vec<Result<Vec<T>>> {
    (0..blocks).map(f).collect()
}
