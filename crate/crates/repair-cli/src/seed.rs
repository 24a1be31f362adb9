//! Per-cell seed derivation.

const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(OFFSET, |h, b| (h ^ u64::from(*b)).wrapping_mul(PRIME))
}

/// Seed of one attempt: FNV-1a over `"{base}|{bug}|{config}|{attempt}"`.
/// Any cell of an experiment can be rerun on its own.
pub fn cell_seed(base: u64, bug: &str, config: &str, attempt: u32) -> u64 {
    fnv1a64(format!("{base}|{bug}|{config}|{attempt}").as_bytes())
}
