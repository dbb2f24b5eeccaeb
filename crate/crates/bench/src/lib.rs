//! Shared fixtures for the criterion benches.

use adpr_core::dataio::{gen_synthetic, pack_blob, write_csv, Dataset, SynthSpec};
use adpr_core::{FixedQ, PrivacyParams, Seed};

pub const SIZES: [usize; 4] = [1_400, 5_000, 20_000, 50_000];

pub fn dataset(n: usize) -> Dataset {
    let spec = SynthSpec::age_cost(n, 0xBE4C);
    Dataset::from_raw(&gen_synthetic(&spec), spec.bounds).expect("generator stays in bounds")
}

pub fn blob(n: usize) -> Vec<u8> {
    pack_blob(&dataset(n)).expect("nonempty")
}

pub fn csv_bytes(n: usize) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(&mut out, "age", "cost", &gen_synthetic(&SynthSpec::age_cost(n, 0xBE4C))).expect("in-memory write");
    out
}

pub fn params() -> PrivacyParams {
    PrivacyParams::new(FixedQ::TWO, Seed::from_u64(0xBE4C)).expect("positive epsilon")
}

/// Deterministic operands in `[-2^15, 2^15)` with no zeros.
pub fn operands(count: usize) -> Vec<FixedQ> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    (0..count)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            let raw = ((z ^ (z >> 31)) >> 16) as i64 - (1 << 47);
            FixedQ::from_raw(if raw == 0 { 1 } else { raw })
        })
        .collect()
}
