//! Reproducible random streams.
//!
//! Every draw in the toolkit comes from a [`RngStream`], a `(seed, stream_id)`
//! pair mapped onto an independent ChaCha8 keystream. Batches are split into
//! fixed-size chunks and chunk `j` always reads from `stream.substream(j)`, so
//! the values produced never depend on how many worker threads run the chunks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per chunk in batch sampling. Part of the reproducibility contract:
/// changing it changes every batch output.
pub const CHUNK: usize = 512;

/// The generator type handed to samplers.
pub type StreamRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A child stream, deterministic in `(self, index)` and distinct for
    /// distinct indices.
    pub fn substream(&self, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(1))),
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Draws `n` values with `draw`, chunked across the current rayon pool.
///
/// The result is identical for any pool size.
pub fn sample_batch<T, F>(n: usize, stream: RngStream, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream.substream(j as u64).rng();
            let len = CHUNK.min(n - j * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Runs `f` inside a dedicated pool with `threads` workers (`0` = rayon default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn equal_streams_reproduce() {
        let a: Vec<u64> = (0..8).map(|_| RngStream::new(7, 3).rng().random()).collect();
        let b: Vec<u64> = (0..8).map(|_| RngStream::new(7, 3).rng().random()).collect();
        assert_eq!(a, b);
        let mut r1 = RngStream::new(7, 3).rng();
        let mut r2 = RngStream::new(7, 4).rng();
        assert_ne!(r1.random::<u64>(), r2.random::<u64>());
    }

    #[test]
    fn substreams_are_distinct() {
        let s = RngStream::new(1, 0);
        let ids: std::collections::HashSet<u64> = (0..1000).map(|i| s.substream(i).stream_id).collect();
        assert_eq!(ids.len(), 1000);
    }

    #[test]
    fn batch_independent_of_thread_count() {
        let s = RngStream::new(42, 9);
        let draw = |r: &mut StreamRng| r.random::<f64>();
        let one = with_threads(1, || sample_batch(3 * CHUNK + 17, s, draw));
        let four = with_threads(4, || sample_batch(3 * CHUNK + 17, s, draw));
        let sixteen = with_threads(16, || sample_batch(3 * CHUNK + 17, s, draw));
        assert_eq!(one.len(), 3 * CHUNK + 17);
        assert_eq!(one, four);
        assert_eq!(one, sixteen);
    }
}
