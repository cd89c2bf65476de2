//! Seeded random streams.
//!
//! Every stochastic routine draws from ChaCha8 keyed by
//! `ChaCha8Rng::seed_from_u64(seed)` and positioned on a 64-bit stream id
//! with `set_stream`. Work is split into fixed-size blocks (or one stream per
//! ensemble member), and block `i` always reads stream `i`. The numbers a
//! block sees therefore depend only on `(seed, i)`, never on which thread ran
//! it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Draws per block in block-parallel samplers.
pub const BLOCK_LEN: u64 = 1 << 14;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Splits `n` items into `(block index, start, len)` triples of at most
/// [`BLOCK_LEN`] items.
pub(crate) fn blocks(n: u64) -> impl Iterator<Item = (u64, u64, u64)> {
    let count = n.div_ceil(BLOCK_LEN);
    (0..count).map(move |b| {
        let start = b * BLOCK_LEN;
        (b, start, BLOCK_LEN.min(n - start))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_and_stream_repeat() {
        let a: Vec<u64> = (0..8)
            .map({
                let mut r = stream_rng(7, 3);
                move |_| r.random()
            })
            .collect();
        let b: Vec<u64> = (0..8)
            .map({
                let mut r = stream_rng(7, 3);
                move |_| r.random()
            })
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ() {
        let x: u64 = stream_rng(7, 0).random();
        let y: u64 = stream_rng(7, 1).random();
        let z: u64 = stream_rng(8, 0).random();
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn blocks_cover_range() {
        let v: Vec<_> = blocks(2 * BLOCK_LEN + 5).collect();
        assert_eq!(v.len(), 3);
        assert_eq!(v[2], (2, 2 * BLOCK_LEN, 5));
        assert_eq!(v.iter().map(|b| b.2).sum::<u64>(), 2 * BLOCK_LEN + 5);
        assert_eq!(blocks(0).count(), 0);
    }
}
