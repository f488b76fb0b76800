//! Exhaustive enumeration of simple random-walk bridges.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Largest half-length `n` with `C(2n, n)` bridges enumerated.
pub const MAX_WALK_HALF_LENGTH: usize = 8;

/// Exact law: fraction of positive steps mapped to its probability.
pub type WalkLaw = BTreeMap<Ratio<u64>, Ratio<u64>>;

/// Law of the fraction of time a simple random-walk bridge of length `2n`
/// spends above 0. A step counts as positive when its edge lies above the
/// axis, i.e. `S_k + S_{k+1} > 0`.
pub fn walk_bridge_exact(n_half: usize) -> Result<WalkLaw> {
    if !(1..=MAX_WALK_HALF_LENGTH).contains(&n_half) {
        return Err(Error::Size(format!(
            "walk bridge half-length {n_half} outside 1..={MAX_WALK_HALF_LENGTH}"
        )));
    }
    let len = 2 * n_half;
    let mut counts = vec![0u64; len + 1];
    let mut total = 0u64;
    for mask in 0u32..(1 << len) {
        if mask.count_ones() as usize != n_half {
            continue;
        }
        let mut s = 0i32;
        let mut positive = 0;
        for k in 0..len {
            let next = if mask >> k & 1 == 1 { s + 1 } else { s - 1 };
            if s + next > 0 {
                positive += 1;
            }
            s = next;
        }
        counts[positive] += 1;
        total += 1;
    }
    let mut law = WalkLaw::new();
    for (k, &c) in counts.iter().enumerate() {
        if c > 0 {
            law.insert(Ratio::new(k as u64, len as u64), Ratio::new(c, total));
        }
    }
    Ok(law)
}
