//! Seed derivation. Every seed is a pure function of the base seed and the
//! run's coordinates, so any cell can be rerun in isolation.

const ENV_TAG: u64 = 0x454e_565f_5345_4544;
const CTRL_TAG: u64 = 0x4354_524c_5345_4544;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fold(parts: &[u64]) -> u64 {
    parts.iter().fold(0, |acc, &p| splitmix64(acc ^ p))
}

/// FNV-1a, used to turn method ids into seed material.
fn hash_str(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Environment seed (initial state and process noise). Independent of
/// method and sample size, so every method faces the same disturbances in
/// run `run`.
pub fn env_seed(base: u64, run: usize) -> u64 {
    fold(&[ENV_TAG, base, run as u64])
}

/// Controller seed (random sampling and rotations).
pub fn controller_seed(base: u64, method: &str, n: usize, run: usize) -> u64 {
    fold(&[CTRL_TAG, base, hash_str(method), n as u64, run as u64])
}
