//! Deterministic child-seed derivation.
//!
//! One user-facing seed fans out into independent streams (adversary blocks,
//! per-policy RNGs, per-run seeds) via a splitmix-style mix. The mix is a pure
//! integer function, so derived seeds are stable across platforms.

pub const ADVERSARY_STREAM: u64 = 0x41445645_52534152; // "ADVERSAR"
pub const POLICY_STREAM: u64 = 0x504f4c49_43590000; // "POLICY"

/// Mixes a seed with a stream tag into a new 64-bit seed.
pub fn mix(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_is_deterministic_and_tag_sensitive() {
        assert_eq!(mix(7, 0), mix(7, 0));
        assert_ne!(mix(7, 0), mix(7, 1));
        assert_ne!(mix(7, 0), mix(8, 0));
    }
}
