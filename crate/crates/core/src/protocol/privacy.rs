use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{out_of_range, Result};

/// Seeded Toeplitz hashing over GF(2).
///
/// The `out_len × n` Toeplitz matrix is fixed by its first row and column,
/// `n + out_len − 1` bits drawn from a ChaCha stream keyed by `seed`.
/// Output bit `j` is `⊕_i T[j][i]·bits[i]` with `T[j][i] = diag[j − i + n − 1]`.
/// Input and output bits are `0`/`1` bytes.
pub fn privacy_amplify(bits: &[u8], seed: u64, out_len: usize) -> Result<Vec<u8>> {
    let n = bits.len();
    if out_len > n {
        return Err(out_of_range("out_len", out_len, format!("≤ input length {n}")));
    }
    if let Some(pos) = bits.iter().position(|&b| b > 1) {
        return Err(out_of_range("bit", bits[pos], "0 or 1"));
    }
    if out_len == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag: Vec<u8> = (0..n + out_len - 1).map(|_| rng.random::<bool>() as u8).collect();
    Ok((0..out_len)
        .map(|j| {
            bits.iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc ^ (diag[j + n - 1 - i] & b))
        })
        .collect())
}
