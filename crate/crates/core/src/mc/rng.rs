//! Seeded substreams. Sample `i` always comes from substream `i / CHUNK`, so
//! results do not depend on how chunks are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK: usize = 4096;

/// Stream reserved for auxiliary draws (directions, bases) so they never
/// collide with sample substreams.
pub const AUX_STREAM: u64 = u64::MAX;

pub fn substream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

pub fn n_chunks(n: usize) -> usize {
    n.div_ceil(CHUNK)
}

fn chunk_len(n: usize, k: usize) -> usize {
    CHUNK.min(n - k * CHUNK)
}

/// Runs `f(rng, len)` on every chunk in parallel and returns the results in
/// chunk order.
pub fn map_chunks<T, F>(seed: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    (0..n_chunks(n)).into_par_iter().map(|k| f(&mut substream(seed, k as u64), chunk_len(n, k))).collect()
}

/// Serial counterpart of [`map_chunks`].
pub fn map_chunks_serial<T, F>(seed: u64, n: usize, f: F) -> Vec<T>
where
    F: Fn(&mut ChaCha8Rng, usize) -> T,
{
    (0..n_chunks(n)).map(|k| f(&mut substream(seed, k as u64), chunk_len(n, k))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn parallel_matches_serial() {
        let draw = |rng: &mut ChaCha8Rng, len: usize| (0..len).map(|_| rng.random::<u64>()).collect::<Vec<_>>();
        let n = 3 * CHUNK + 17;
        let a = map_chunks(7, n, draw);
        let b = map_chunks_serial(7, n, draw);
        assert_eq!(a, b);
        assert_eq!(a.iter().map(Vec::len).sum::<usize>(), n);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn streams_differ() {
        let x: u64 = substream(1, 0).random();
        let y: u64 = substream(1, 1).random();
        let z: u64 = substream(2, 0).random();
        assert!(x != y && x != z);
    }
}
