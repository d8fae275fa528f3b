//! Reproducible random streams.
//!
//! A single 64-bit master seed is expanded into a ChaCha8 key per cell; the
//! cell is named by a path of integers (family hash, θ index, n, rep, ...).
//! The final path component selects the ChaCha stream, so draws depend only
//! on `(seed, path)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a word into a running hash.
pub fn mix(h: u64, word: u64) -> u64 {
    let mut s = h ^ word.wrapping_mul(0xd6e8_feb8_6659_fd93);
    splitmix64(&mut s)
}

/// Stable 64-bit hash of a label (FNV-1a), for use as a path component.
pub fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Streams {
    master: u64,
}

impl Streams {
    pub fn new(master: u64) -> Self {
        Streams { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// A child handle rooted at `path`.
    pub fn child(&self, path: &[u64]) -> Streams {
        Streams {
            master: path.iter().fold(mix(self.master, 0x5eed), |h, &w| mix(h, w)),
        }
    }

    /// The generator for stream `index` under this handle.
    pub fn stream(&self, index: u64) -> StreamRng {
        let mut state = self.master;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        rng
    }
}
