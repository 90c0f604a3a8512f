//! Counter-based random substreams.
//!
//! Every Monte Carlo path draws from its own ChaCha8 stream selected by
//! `(seed, path index)`, so results do not depend on how paths are spread
//! over worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PathRng = ChaCha8Rng;

pub fn substream(seed: u64, index: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
