fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Order-sensitive hash of a key tuple into a 64-bit stream seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |h, &p| splitmix64(h ^ splitmix64(p)))
}

/// Stream tags, so sibling streams of one key never coincide.
pub(crate) const TAG_COMBINING: u64 = 0xC0;
pub(crate) const TAG_PATHS: u64 = 0x01;
pub(crate) const TAG_NOISE: u64 = 0x02;
