//! Deterministic stream derivation.
//!
//! Every randomized routine takes a `u64` seed plus a domain path and maps
//! it to an independent ChaCha stream. Parallel loops derive one stream per
//! unit of work from the same root seed, so results do not depend on thread
//! count or scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keeping unrelated consumers of one root seed on disjoint
/// streams.
pub mod domain {
    /// Point-cloud generators.
    pub const GENERATOR: u64 = 1;
    /// Kernel density resampling draws.
    pub const KDE_DRAW: u64 = 2;
    /// One bootstrap replicate.
    pub const BOOT_REPLICATE: u64 = 3;
    /// Monte Carlo truth estimation.
    pub const TRUTH_SAMPLE: u64 = 4;
    /// Base sample of one coverage repetition.
    pub const COVERAGE_BASE: u64 = 5;
    /// Bootstrap stage of one coverage repetition.
    pub const COVERAGE_BOOT: u64 = 6;
    /// One stabilization-tail trial.
    pub const STAB_TRIAL: u64 = 7;
    /// Poisson process sampling.
    pub const POISSON: u64 = 8;
}

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One step of the splitmix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    mix(x.wrapping_add(GAMMA))
}

/// Folds a path of domain tags and indices into a child seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut state = splitmix64(seed);
    for &p in path {
        state = splitmix64(state ^ p);
    }
    state
}

/// Independent generator for the given root seed and derivation path.
pub fn derive_rng(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut state = derive_seed(seed, path);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(GAMMA);
        chunk.copy_from_slice(&mix(state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
